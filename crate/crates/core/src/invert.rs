//! Applying an Abate–Whitt method to a Laplace transform.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::methods::AwMethod;
use crate::numerics::{CMatrix, C64};

/// Value of a transform at one point.
#[derive(Clone, Debug, PartialEq)]
pub enum TransformValue {
    Scalar(C64),
    Matrix(CMatrix),
}

/// Result of an inversion: a scalar (exactly real for reduced methods) or a
/// matrix.
pub type Inverted = TransformValue;

impl TransformValue {
    pub fn as_scalar(&self) -> Option<C64> {
        match self {
            TransformValue::Scalar(z) => Some(*z),
            TransformValue::Matrix(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&CMatrix> {
        match self {
            TransformValue::Scalar(_) => None,
            TransformValue::Matrix(m) => Some(m),
        }
    }

    /// Real part of a scalar value.
    pub fn re(&self) -> Option<f64> {
        self.as_scalar().map(|z| z.re)
    }

    fn is_finite(&self) -> bool {
        match self {
            TransformValue::Scalar(z) => z.is_finite(),
            TransformValue::Matrix(m) => m.is_finite(),
        }
    }

    fn conj(&self) -> TransformValue {
        match self {
            TransformValue::Scalar(z) => TransformValue::Scalar(z.conj()),
            TransformValue::Matrix(m) => TransformValue::Matrix(m.map(|z| z.conj())),
        }
    }

    fn distance(&self, o: &TransformValue) -> Option<(f64, f64)> {
        match (self, o) {
            (TransformValue::Scalar(a), TransformValue::Scalar(b)) => Some(((a - b).norm(), a.norm().max(b.norm()))),
            (TransformValue::Matrix(a), TransformValue::Matrix(b)) if a.rows() == b.rows() && a.cols() == b.cols() => {
                let d = a.sub(b).ok()?.max_abs();
                Some((d, a.max_abs().max(b.max_abs())))
            }
            _ => None,
        }
    }
}

/// A Laplace transform `F(s) = ∫₀^∞ e^{−st} f(t) dt`.
pub trait Transform {
    fn eval(&self, s: C64) -> Result<TransformValue>;

    /// `F(conj s) = conj F(s)`, which licenses reduced-form evaluation.
    fn is_symmetric(&self) -> bool {
        false
    }

    /// Known poles of `F`.
    fn singularities(&self) -> &[C64] {
        &[]
    }

    /// Whether `eval` may be called from several threads at once.
    fn concurrent_safe(&self) -> bool {
        false
    }
}

impl<T: Transform + ?Sized> Transform for &T {
    fn eval(&self, s: C64) -> Result<TransformValue> {
        (**self).eval(s)
    }
    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }
    fn singularities(&self) -> &[C64] {
        (**self).singularities()
    }
    fn concurrent_safe(&self) -> bool {
        (**self).concurrent_safe()
    }
}

/// A scalar transform from a closure.
pub struct ScalarTransform<F> {
    f: F,
    symmetric: bool,
    singularities: Vec<C64>,
}

impl<F: Fn(C64) -> C64 + Send + Sync> ScalarTransform<F> {
    pub fn new(f: F) -> Self {
        ScalarTransform { f, symmetric: false, singularities: Vec::new() }
    }

    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn with_singularities(mut self, s: Vec<C64>) -> Self {
        self.singularities = s;
        self
    }
}

impl<F: Fn(C64) -> C64 + Send + Sync> Transform for ScalarTransform<F> {
    fn eval(&self, s: C64) -> Result<TransformValue> {
        Ok(TransformValue::Scalar((self.f)(s)))
    }
    fn is_symmetric(&self) -> bool {
        self.symmetric
    }
    fn singularities(&self) -> &[C64] {
        &self.singularities
    }
    fn concurrent_safe(&self) -> bool {
        true
    }
}

/// A matrix-valued transform from a fallible closure.
pub struct MatrixTransform<F> {
    f: F,
    symmetric: bool,
    concurrent: bool,
}

impl<F: Fn(C64) -> Result<CMatrix> + Send + Sync> MatrixTransform<F> {
    pub fn new(f: F) -> Self {
        MatrixTransform { f, symmetric: false, concurrent: true }
    }

    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn sequential(mut self) -> Self {
        self.concurrent = false;
        self
    }
}

impl<F: Fn(C64) -> Result<CMatrix> + Send + Sync> Transform for MatrixTransform<F> {
    fn eval(&self, s: C64) -> Result<TransformValue> {
        (self.f)(s).map(TransformValue::Matrix)
    }
    fn is_symmetric(&self) -> bool {
        self.symmetric
    }
    fn concurrent_safe(&self) -> bool {
        self.concurrent
    }
}

/// Spot-check `F(conj s) = conj F(s)` at three fixed points to `1e-12`
/// relative.
pub fn check_symmetry(f: &dyn Transform) -> Result<()> {
    for s in [C64::new(0.7313, 1.918), C64::new(2.25, 0.377), C64::new(0.061, 7.43)] {
        let a = f.eval(s)?;
        let b = f.eval(s.conj())?.conj();
        let (d, scale) = a
            .distance(&b)
            .ok_or_else(|| Error::Dimension("transform changed shape between evaluations".into()))?;
        if d > 1e-12 * scale {
            return Err(Error::NotSymmetric);
        }
    }
    Ok(())
}

fn check_nodes(m: &AwMethod, f: &dyn Transform, t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be positive and finite, got {t}")));
    }
    if m.is_reduced() && !f.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    for &b in m.nodes() {
        let s = b / t;
        for &p in f.singularities() {
            if (s - p).norm() <= 1e-10 * p.norm().max(1.0) {
                return Err(Error::NodeCollision(format!("node {s} at t = {t} hits singularity {p}")));
            }
        }
    }
    Ok(())
}

fn combine(m: &AwMethod, t: f64, mut eval: impl FnMut(C64) -> Result<TransformValue>) -> Result<Inverted> {
    let reduced = m.is_reduced();
    let mut acc: Option<TransformValue> = None;
    for (&w, &b) in m.weights().iter().zip(m.nodes()) {
        let v = eval(b / t)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("transform at {}", b / t)));
        }
        let c = w / t;
        let term = match v {
            TransformValue::Scalar(z) => {
                let p = c * z;
                TransformValue::Scalar(if reduced { C64::new(p.re, 0.0) } else { p })
            }
            TransformValue::Matrix(a) => {
                TransformValue::Matrix(a.map(|z| if reduced { C64::new((c * z).re, 0.0) } else { c * z }))
            }
        };
        acc = Some(match (acc, term) {
            (None, t) => t,
            (Some(TransformValue::Scalar(a)), TransformValue::Scalar(b)) => TransformValue::Scalar(a + b),
            (Some(TransformValue::Matrix(a)), TransformValue::Matrix(b)) => TransformValue::Matrix(a.add(&b)?),
            _ => return Err(Error::Dimension("transform mixes scalar and matrix values".into())),
        });
    }
    acc.ok_or_else(|| Error::InvalidArgument("empty method".into()))
}

/// `Σ (wₙ/t)·F(βₙ/t)`, or `Σ Re((w′ₙ/t)·F(βₙ/t))` for a reduced method.
pub fn invert(m: &AwMethod, f: &dyn Transform, t: f64) -> Result<Inverted> {
    check_nodes(m, f, t)?;
    combine(m, t, |s| f.eval(s))
}

/// Scalar convenience wrapper around [`invert`].
pub fn invert_scalar(m: &AwMethod, f: &dyn Transform, t: f64) -> Result<f64> {
    match invert(m, f, t)? {
        TransformValue::Scalar(z) => Ok(z.re),
        TransformValue::Matrix(_) => Err(Error::Dimension("expected a scalar transform".into())),
    }
}

type Memo = Mutex<HashMap<(u64, u64), TransformValue>>;

fn memo_eval(memo: &Memo, f: &dyn Transform, s: C64) -> Result<TransformValue> {
    let key = (s.re.to_bits(), s.im.to_bits());
    if let Some(v) = memo.lock().expect("memo lock").get(&key) {
        return Ok(v.clone());
    }
    let v = f.eval(s)?;
    memo.lock().expect("memo lock").insert(key, v.clone());
    Ok(v)
}

/// [`invert`] at every `t`, sharing transform evaluations at repeated
/// points. Failures are reported per point.
pub fn invert_curve<T: Transform + Sync + ?Sized>(m: &AwMethod, f: &T, ts: &[f64]) -> Vec<Result<Inverted>> {
    let memo: Memo = Mutex::new(HashMap::new());
    let one = |t: f64| -> Result<Inverted> {
        check_nodes(m, &f, t)?;
        combine(m, t, |s| memo_eval(&memo, &f, s))
    };
    if f.concurrent_safe() {
        ts.par_iter().map(|&t| one(t)).collect()
    } else {
        ts.iter().map(|&t| one(t)).collect()
    }
}

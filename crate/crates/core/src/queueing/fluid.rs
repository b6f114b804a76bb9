use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use super::{GeneratorKind, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::invert::{Transform, TransformValue};
use crate::numerics::{lu, CMatrix, RMatrix, C64, U};

/// Markov-modulated fluid queue: phase generator `Q` and nonzero level
/// rates `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluidQueueModel {
    q: GeneratorMatrix,
    rates: Vec<f64>,
    plus: Vec<usize>,
    minus: Vec<usize>,
}

struct Blocks {
    pp: CMatrix,
    pm: CMatrix,
    mp: CMatrix,
    mm: CMatrix,
    scale: f64,
}

impl FluidQueueModel {
    pub fn new(q: GeneratorMatrix, rates: Vec<f64>) -> Result<Self> {
        if q.kind() != GeneratorKind::Generator {
            return Err(Error::InvalidArgument("fluid queue needs a conservative generator".into()));
        }
        if rates.len() != q.dim() {
            return Err(Error::Dimension(format!("{} rates for {} phases", rates.len(), q.dim())));
        }
        if rates.iter().any(|r| !r.is_finite() || *r == 0.0) {
            return Err(Error::InvalidArgument("rates must be finite and nonzero".into()));
        }
        let plus: Vec<usize> = (0..rates.len()).filter(|&i| rates[i] > 0.0).collect();
        let minus: Vec<usize> = (0..rates.len()).filter(|&i| rates[i] < 0.0).collect();
        if plus.is_empty() || minus.is_empty() {
            return Err(Error::InvalidArgument("fluid queue needs both positive and negative rates".into()));
        }
        Ok(FluidQueueModel { q, rates, plus, minus })
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.q
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn plus(&self) -> &[usize] {
        &self.plus
    }

    pub fn minus(&self) -> &[usize] {
        &self.minus
    }

    pub fn lambda(&self) -> f64 {
        self.q.lambda()
    }

    /// `A(s) = C⁻¹(Q − sI)` split by the sign of the rates.
    fn blocks(&self, s: C64) -> Blocks {
        let q = self.q.matrix();
        let a = |i: usize, j: usize| {
            let v = if i == j { C64::new(q[(i, j)], 0.0) - s } else { C64::new(q[(i, j)], 0.0) };
            v / self.rates[i].abs()
        };
        let sub = |rows: &[usize], cols: &[usize]| CMatrix::from_fn(rows.len(), cols.len(), |i, j| a(rows[i], cols[j]));
        let n = self.rates.len();
        let scale = (0..n).map(|i| (0..n).map(|j| a(i, j).norm()).sum::<f64>()).fold(0.0, f64::max);
        Blocks {
            pp: sub(&self.plus, &self.plus),
            pm: sub(&self.plus, &self.minus),
            mp: sub(&self.minus, &self.plus),
            mm: sub(&self.minus, &self.minus),
            scale,
        }
    }

    /// `ψ̂(s)`, the `d₊ × d₋` transform of the first-return density.
    pub fn psi(&self, s: C64) -> Result<CMatrix> {
        solve_nare(self, s)
    }

    /// `Ψ(∞) = ψ̂(0)`.
    pub fn psi_infinity(&self) -> Result<RMatrix> {
        Ok(self.psi(C64::new(0.0, 0.0))?.re())
    }

    /// `E[ψ] = −ψ̂′(0)`, entrywise first moments of the first-return
    /// density.
    pub fn first_moment(&self) -> Result<RMatrix> {
        let x = self.psi(C64::new(0.0, 0.0))?;
        let b = self.blocks(C64::new(0.0, 0.0));
        // d/ds of the Riccati residual: A′₊₊ = −C₊⁻¹, A′₋₋ = −C₋⁻¹
        let cp = CMatrix::from_fn(self.plus.len(), self.plus.len(), |i, j| {
            C64::new(if i == j { 1.0 / self.rates[self.plus[i]].abs() } else { 0.0 }, 0.0)
        });
        let cm = CMatrix::from_fn(self.minus.len(), self.minus.len(), |i, j| {
            C64::new(if i == j { 1.0 / self.rates[self.minus[i]].abs() } else { 0.0 }, 0.0)
        });
        let rhs = cp.matmul(&x)?.add(&x.matmul(&cm)?)?;
        let dx = sylvester(&b, &x, &rhs)?;
        Ok(dx.re().map(|v| -v))
    }

    pub fn to_json(&self) -> Value {
        let q = self.q.matrix();
        json!({
            "schema": 1,
            "Q": (0..q.rows()).map(|i| q.row(i).to_vec()).collect::<Vec<_>>(),
            "rates": self.rates,
            "lambda": self.lambda(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows: Vec<Vec<f64>> = v
            .get("Q")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("model needs a Q matrix".into()))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Format("Q rows must be arrays".into()))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| Error::Format("Q entries must be numbers".into())))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let rates: Vec<f64> = v
            .get("rates")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("model needs rates".into()))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| Error::Format("rates must be numbers".into())))
            .collect::<Result<_>>()?;
        let mut g = GeneratorMatrix::new(RMatrix::from_rows(&rows)?, GeneratorKind::Generator)?;
        if let Some(l) = v.get("lambda").and_then(Value::as_f64) {
            g = g.with_lambda(l)?;
        }
        FluidQueueModel::new(g, rates)
    }
}

fn residual(b: &Blocks, x: &CMatrix) -> Result<CMatrix> {
    x.matmul(&b.mp)?.matmul(x)?.add(&b.pp.matmul(x)?)?.add(&x.matmul(&b.mm)?)?.add(&b.pm)
}

/// Solve `(A₊₊ + XA₋₊)Δ + Δ(A₋₋ + A₋₊X) = R` through its Kronecker form.
fn sylvester(b: &Blocks, x: &CMatrix, r: &CMatrix) -> Result<CMatrix> {
    let (p, m) = (x.rows(), x.cols());
    let left = b.pp.add(&x.matmul(&b.mp)?)?;
    let right = b.mm.add(&b.mp.matmul(x)?)?;
    let n = p * m;
    let mut k = CMatrix::zeros(n, n);
    for j in 0..m {
        for i in 0..p {
            let row = i + j * p;
            for l in 0..p {
                k[(row, l + j * p)] += left[(i, l)];
            }
            for l in 0..m {
                k[(row, i + l * p)] += right[(l, j)];
            }
        }
    }
    let rhs: Vec<C64> = (0..n).map(|idx| r[(idx % p, idx / p)]).collect();
    let f = lu(&k).map_err(|_| Error::Singular("Riccati Newton operator".into()))?;
    let d = f.solve_vec(&rhs);
    Ok(CMatrix::from_fn(p, m, |i, j| d[i + j * p]))
}

/// Newton iteration from `x`, run until the correction reaches roundoff
/// level or the residual stops decreasing; returns the iterate and its
/// residual norm.
fn newton(b: &Blocks, mut x: CMatrix, max_iter: usize) -> Result<(CMatrix, f64)> {
    let mut res = residual(b, &x)?.norm_inf();
    let mut stalls = 0;
    for _ in 0..max_iter {
        if res == 0.0 {
            break;
        }
        let r = residual(b, &x)?;
        let d = sylvester(b, &x, &r.scale(C64::new(-1.0, 0.0)))?;
        let xn = x.add(&d)?;
        let rn = residual(b, &xn)?.norm_inf();
        if !rn.is_finite() {
            return Err(Error::NoConvergence("Riccati Newton iterate overflowed".into()));
        }
        stalls = if rn >= res { stalls + 1 } else { 0 };
        let small = d.norm_inf() <= 4.0 * U * (1.0 + xn.norm_inf());
        if rn <= res || stalls < 3 {
            x = xn;
            res = rn;
        }
        if small || stalls >= 3 {
            break;
        }
    }
    Ok((x, res))
}

fn accept(b: &Blocks, x: CMatrix, res: f64, s: C64) -> Result<CMatrix> {
    if res > 1e-12 * b.scale {
        return Err(Error::RiccatiResidual(format!("residual {res:.3e} at s = {s} (scale {:.3e})", b.scale)));
    }
    Ok(x)
}

fn solve_real(model: &FluidQueueModel, s: f64) -> Result<CMatrix> {
    let b = model.blocks(C64::new(s, 0.0));
    // from X = 0 Newton increases monotonically to the minimal solution
    let (x, res) = newton(&b, CMatrix::zeros(model.plus.len(), model.minus.len()), 200)?;
    accept(&b, x, res, C64::new(s, 0.0))
}

/// Minimal solution of the first-return Riccati equation at `s`, continued
/// analytically to complex `s` outside the closed disc `B(−λ, λ)`.
///
/// Real `s ≥ 0` is solved by Newton's method from zero. Other points are
/// reached along the arc of radius `|s + λ|` centred at `−λ`, starting on
/// the positive real axis, with a Newton correction at every step.
pub fn solve_nare(model: &FluidQueueModel, s: C64) -> Result<CMatrix> {
    if !s.is_finite() {
        return Err(Error::NonFinite(format!("s = {s}")));
    }
    if s.im < 0.0 {
        return Ok(solve_nare(model, s.conj())?.map(|z| z.conj()));
    }
    if s.im == 0.0 && s.re >= 0.0 {
        return solve_real(model, s.re);
    }
    let lam = model.lambda();
    let centre = C64::new(-lam, 0.0);
    let radius = (s - centre).norm();
    if radius <= lam * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "s = {s} lies in the closed disc B(-{lam}, {lam}) where the transform is not continued"
        )));
    }
    let theta_end = (s - centre).arg();
    let h_max = (0.5 * (radius - lam) / radius).min(0.2);
    let mut h = h_max;
    let mut theta = 0.0;
    let mut x = solve_real(model, radius - lam)?;
    let mut prev: Option<(f64, CMatrix)> = None;
    while theta < theta_end {
        let step = h.min(theta_end - theta);
        let next = theta + step;
        let sn = if next >= theta_end { s } else { centre + C64::from_polar(radius, next) };
        let guess = match &prev {
            Some((tp, xp)) if theta > *tp => {
                let f = step / (theta - tp);
                x.add(&x.sub(xp)?.scale(C64::new(f, 0.0)))?
            }
            _ => x.clone(),
        };
        let b = model.blocks(sn);
        let (xn, res) = newton(&b, guess.clone(), 8)?;
        let moved = xn.sub(&x)?.norm_inf();
        if res <= 1e-12 * b.scale && moved <= 0.25 * (1.0 + x.norm_inf()) {
            prev = Some((theta, x));
            x = xn;
            theta = next;
            h = (1.5 * h).min(h_max);
        } else {
            h *= 0.5;
            if h < 1e-10 {
                return Err(Error::SplittingAmbiguity(format!("continuation to s = {s} stalled at angle {theta}")));
            }
        }
    }
    let b = model.blocks(s);
    let (x, res) = newton(&b, x, 4)?;
    accept(&b, x, res, s)
}

/// Matrix transform `ψ̂(s)` of the first-return density.
#[derive(Clone, Debug)]
pub struct FluidPsi {
    model: FluidQueueModel,
}

/// Matrix transform `Ψ̂(s) = ψ̂(s)/s` of the first-return CDF.
#[derive(Clone, Debug)]
pub struct FluidPsiCdf {
    model: FluidQueueModel,
    poles: Vec<C64>,
}

pub fn fluid_psi_transform(model: &FluidQueueModel) -> (FluidPsi, FluidPsiCdf) {
    (FluidPsi { model: model.clone() }, FluidPsiCdf { model: model.clone(), poles: vec![C64::new(0.0, 0.0)] })
}

impl Transform for FluidPsi {
    fn eval(&self, s: C64) -> Result<TransformValue> {
        self.model.psi(s).map(TransformValue::Matrix)
    }
    fn is_symmetric(&self) -> bool {
        true
    }
    fn concurrent_safe(&self) -> bool {
        true
    }
}

impl Transform for FluidPsiCdf {
    fn eval(&self, s: C64) -> Result<TransformValue> {
        if s == C64::new(0.0, 0.0) {
            return Err(Error::Singular("CDF transform at s = 0".into()));
        }
        Ok(TransformValue::Matrix(self.model.psi(s)?.scale(s.inv())))
    }
    fn is_symmetric(&self) -> bool {
        true
    }
    fn singularities(&self) -> &[C64] {
        &self.poles
    }
    fn concurrent_safe(&self) -> bool {
        true
    }
}

/// Random model with `|N(0,1)|` off-diagonal rates, positive level rates in
/// `(0, 1]` for the first `d_plus` phases and negative rates in `[−1, 0)`
/// for the rest, scaled so that `λ = maxᵢ |Qᵢᵢ| = 1`. Uses ChaCha8 seeded
/// with `seed`.
pub fn make_experiment_model(d_plus: usize, d_minus: usize, seed: u64) -> Result<FluidQueueModel> {
    if d_plus == 0 || d_minus == 0 {
        return Err(Error::InvalidArgument("need d_plus >= 1 and d_minus >= 1".into()));
    }
    let d = d_plus + d_minus;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = RMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                q[(i, j)] = rng.sample::<f64, _>(StandardNormal).abs();
            }
        }
    }
    // rescale so the largest exit rate, and hence λ, is 1
    let top = (0..d).map(|i| (0..d).map(|j| q[(i, j)]).sum::<f64>()).fold(0.0, f64::max);
    for i in 0..d {
        let mut sum = 0.0;
        for j in 0..d {
            if i != j {
                q[(i, j)] /= top;
                sum += q[(i, j)];
            }
        }
        q[(i, i)] = -sum;
    }
    let rates = (0..d)
        .map(|i| {
            let u = 1.0 - rng.gen::<f64>();
            if i < d_plus {
                u
            } else {
                -u
            }
        })
        .collect();
    FluidQueueModel::new(GeneratorMatrix::new(q, GeneratorKind::Generator)?, rates)
}

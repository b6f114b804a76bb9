//! TAME methods: a modified AAA fit of `eᶻ` on a domain boundary, with a
//! barycentric form that vanishes at infinity, followed by pole and residue
//! extraction.

mod presets;

pub use presets::{preset_file_name, preset_rows, preset_tame, preset_tame_with_metadata, PresetRow, PRESET_DIR_ENV};

use num_complex::Complex;

use crate::diagnostics::epsilon_accuracy;
use crate::domains::{discretize, Discretization, Domain, DEFAULT_COUNT};
use crate::error::{Error, Result};
use crate::methods::{symmetrize, AwMethod, MethodMetadata};
use crate::numerics::scalar::{lift, lower};
use crate::numerics::{dense_eigenvalues_dd, smallest_singular_vector, CMatrix, Cdd, Dd, C64, U};

/// Realness test for candidate support points.
pub fn is_real_point(z: C64) -> bool {
    z.im.abs() <= 1e-12 * (1.0 + z.norm())
}

/// `r(z) = (Σ uₖfₖ/(z−zₖ)) / (u₀ + Σ uₖ/(z−zₖ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct BarycentricApproximant {
    support: Vec<C64>,
    values: Vec<C64>,
    u0: C64,
    weights: Vec<C64>,
}

impl BarycentricApproximant {
    pub fn new(support: Vec<C64>, values: Vec<C64>, u0: C64, weights: Vec<C64>) -> Result<Self> {
        if support.len() != values.len() || support.len() != weights.len() {
            return Err(Error::Dimension("support, values and weights must have equal length".into()));
        }
        for i in 0..support.len() {
            if support[..i].contains(&support[i]) {
                return Err(Error::DuplicateNodes(format!("support point {} repeated", support[i])));
            }
        }
        Ok(BarycentricApproximant { support, values, u0, weights })
    }

    pub fn support(&self) -> &[C64] {
        &self.support
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn u0(&self) -> C64 {
        self.u0
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.support.len()
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        barycentric_eval(self, z)
    }

    /// Evaluate through the raw quotient, without the interpolation
    /// short-circuit.
    pub fn eval_raw(&self, z: C64) -> C64 {
        let (n, d) = self.parts(z);
        n / d
    }

    fn parts(&self, z: C64) -> (C64, C64) {
        let mut n = C64::new(0.0, 0.0);
        let mut d = self.u0;
        for ((&zk, &fk), &uk) in self.support.iter().zip(&self.values).zip(&self.weights) {
            let c = uk / (z - zk);
            n += c * fk;
            d += c;
        }
        (n, d)
    }
}

/// Evaluate a barycentric approximant; exact at support points.
pub fn barycentric_eval(b: &BarycentricApproximant, z: C64) -> Result<C64> {
    if let Some(k) = b.support.iter().position(|&s| s == z) {
        return Ok(b.values[k]);
    }
    let (n, d) = b.parts(z);
    if d == C64::new(0.0, 0.0) {
        return Err(Error::PoleHit(format!("barycentric denominator vanishes at {z}")));
    }
    Ok(n / d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    MaxOrder,
    NoRoomForPair,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Tolerance => "tolerance",
            Termination::MaxOrder => "max_order",
            Termination::NoRoomForPair => "no_room_for_pair",
        })
    }
}

/// Trace of a modified AAA run.
#[derive(Clone, Debug, PartialEq)]
pub struct AaaReport {
    /// Maximum residual on the non-support points after each iteration.
    pub residuals: Vec<f64>,
    pub epsilon: f64,
    /// Support points in the order they were chosen.
    pub support: Vec<C64>,
    pub termination: Termination,
}

/// Fix the global phase of `u` and make it conjugate-symmetric with respect
/// to the support layout (`pairs[k] = Some(j)` when `zⱼ = conj zₖ`).
fn symmetrize_weights(u: &mut [C64], is_pair_head: &[Option<usize>], real: &[bool]) {
    // index 0 is u₀; support k sits at k + 1
    let mut pivot = u[0];
    for (k, &r) in real.iter().enumerate() {
        if r && u[k + 1].norm() > pivot.norm() {
            pivot = u[k + 1];
        }
    }
    let unorm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phase = if pivot.norm() > 1e-8 * unorm {
        pivot.conj() / pivot.norm()
    } else {
        let (k, j) = is_pair_head
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.map(|j| (k, j)))
            .max_by(|a, b| u[a.0 + 1].norm().total_cmp(&u[b.0 + 1].norm()))
            .unwrap_or((0, 0));
        let c2 = u[k + 1].conj() / u[j + 1];
        let c = c2.sqrt();
        if c.norm() > 0.0 && c.is_finite() {
            c / c.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    };
    for z in u.iter_mut() {
        *z *= phase;
    }
    u[0] = C64::new(u[0].re, 0.0);
    for (k, &r) in real.iter().enumerate() {
        if r {
            u[k + 1] = C64::new(u[k + 1].re, 0.0);
        }
        if let Some(j) = is_pair_head[k] {
            let avg = (u[k + 1] + u[j + 1].conj()) * 0.5;
            u[k + 1] = avg;
            u[j + 1] = avg.conj();
        }
    }
    let nrm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in u.iter_mut() {
        *z /= nrm;
    }
}

/// Modified AAA fit with `r(∞) = 0`, adding non-real support points
/// together with their conjugates. The loop runs in binary64.
pub fn aaa_fit(
    target: impl Fn(C64) -> C64,
    z: &Discretization,
    max_order: usize,
    tol: f64,
) -> Result<(BarycentricApproximant, AaaReport)> {
    aaa_fit_points(target, &z.points, max_order, tol)
}

/// [`aaa_fit`] on an explicit point set.
pub fn aaa_fit_points(
    target: impl Fn(C64) -> C64,
    zs: &[C64],
    max_order: usize,
    tol: f64,
) -> Result<(BarycentricApproximant, AaaReport)> {
    if max_order < 2 {
        return Err(Error::InvalidArgument(format!("max order must be at least 2, got {max_order}")));
    }
    if zs.len() < 2 * max_order {
        return Err(Error::InvalidArgument(format!(
            "{} points cannot support order {max_order}; need at least {}",
            zs.len(),
            2 * max_order
        )));
    }
    let fz: Vec<C64> = zs.iter().map(|&z| target(z)).collect();
    if let Some(i) = fz.iter().position(|f| !f.is_finite()) {
        return Err(Error::NonFinite(format!("target at {}", zs[i])));
    }
    let l = zs.len();
    let mut in_support = vec![false; l];
    let mut sup: Vec<usize> = Vec::new();
    let mut real: Vec<bool> = Vec::new();
    let mut pair_head: Vec<Option<usize>> = Vec::new();
    let mut u = vec![C64::new(1.0, 0.0)];
    let mut r = vec![C64::new(0.0, 0.0); l];
    let mut residuals = Vec::new();
    let max_res = |r: &[C64], in_support: &[bool]| -> (f64, usize) {
        let mut best = (-1.0, usize::MAX);
        for i in 0..l {
            if !in_support[i] {
                let e = (fz[i] - r[i]).norm();
                if e > best.0 {
                    best = (e, i);
                }
            }
        }
        best
    };
    let termination = loop {
        let (err, j) = max_res(&r, &in_support);
        if err <= tol {
            break Termination::Tolerance;
        }
        if sup.len() >= max_order {
            break Termination::MaxOrder;
        }
        let zj = zs[j];
        let partner = if is_real_point(zj) {
            None
        } else {
            let c = zj.conj();
            (0..l).find(|&i| !in_support[i] && i != j && zs[i] == c)
        };
        if partner.is_some() && sup.len() + 2 > max_order {
            break Termination::NoRoomForPair;
        }
        in_support[j] = true;
        sup.push(j);
        real.push(is_real_point(zj));
        pair_head.push(None);
        if let Some(p) = partner {
            in_support[p] = true;
            let k = sup.len() - 1;
            sup.push(p);
            real.push(false);
            pair_head.push(None);
            pair_head[k] = Some(k + 1);
        }
        u = lsq_weights(zs, &fz, &in_support, &sup, &pair_head, &real)?;
        for i in 0..l {
            if in_support[i] {
                r[i] = fz[i];
                continue;
            }
            let mut n = C64::new(0.0, 0.0);
            let mut d = u[0];
            for (c, &s) in sup.iter().enumerate() {
                let q = u[c + 1] / (zs[i] - zs[s]);
                n += q * fz[s];
                d += q;
            }
            r[i] = n / d;
        }
        residuals.push(max_res(&r, &in_support).0);
    };
    let epsilon = max_res(&r, &in_support).0.max(0.0);
    let b = BarycentricApproximant::new(
        sup.iter().map(|&i| zs[i]).collect(),
        sup.iter().map(|&i| fz[i]).collect(),
        u[0],
        u[1..].to_vec(),
    )?;
    let report = AaaReport { residuals, epsilon, support: b.support.clone(), termination };
    Ok((b, report))
}

/// Weights `u₀, u₁..u_K` from the smallest singular vector of the
/// augmented Loewner matrix over the non-support points.
fn lsq_weights(
    zs: &[C64],
    fz: &[C64],
    in_support: &[bool],
    sup: &[usize],
    pair_head: &[Option<usize>],
    real: &[bool],
) -> Result<Vec<C64>> {
    let rows: Vec<usize> = (0..zs.len()).filter(|&i| !in_support[i]).collect();
    let mut a = CMatrix::zeros(rows.len(), sup.len() + 1);
    for (ri, &i) in rows.iter().enumerate() {
        a[(ri, 0)] = fz[i];
        for (c, &s) in sup.iter().enumerate() {
            a[(ri, c + 1)] = (fz[i] - fz[s]) / (zs[i] - zs[s]);
        }
    }
    let (mut v, _) = smallest_singular_vector(&a)?;
    symmetrize_weights(&mut v, pair_head, real);
    Ok(v)
}

/// Re-solve the least-squares problem for a given support set drawn from
/// `zs`. Conjugate support points must both be present.
fn refit(target: impl Fn(C64) -> C64, zs: &[C64], support: &[C64]) -> Result<BarycentricApproximant> {
    let fz: Vec<C64> = zs.iter().map(|&z| target(z)).collect();
    let mut in_support = vec![false; zs.len()];
    let mut sup = Vec::with_capacity(support.len());
    for &p in support {
        let i = (0..zs.len())
            .find(|&i| zs[i] == p && !in_support[i])
            .ok_or_else(|| Error::InvalidArgument(format!("support point {p} is not in the point set")))?;
        in_support[i] = true;
        sup.push(i);
    }
    let real: Vec<bool> = support.iter().map(|&z| is_real_point(z)).collect();
    let mut pair_head = vec![None; support.len()];
    let mut taken = vec![false; support.len()];
    for k in 0..support.len() {
        if real[k] || taken[k] {
            continue;
        }
        let j = (k + 1..support.len())
            .find(|&j| !taken[j] && support[j] == support[k].conj())
            .ok_or_else(|| Error::MissingConjugate(format!("support point {}", support[k])))?;
        taken[j] = true;
        pair_head[k] = Some(j);
    }
    let u = lsq_weights(zs, &fz, &in_support, &sup, &pair_head, &real)?;
    BarycentricApproximant::new(support.to_vec(), sup.iter().map(|&i| fz[i]).collect(), u[0], u[1..].to_vec())
}

/// Remove Froissart doublets: for every pole whose weight is below
/// `1e2·u·max|w|` or which lies in the domain, drop the nearest support point
/// (with its conjugate) and re-solve for the weights, until no such pole
/// remains. Poles come in conjugate pairs, so only the upper one is used.
fn remove_doublets(
    mut b: BarycentricApproximant,
    domain: &Domain,
    zs: &[C64],
) -> Result<(BarycentricApproximant, Vec<Cdd>, Vec<Cdd>)> {
    loop {
        let poles = poles_dd(&b)?;
        let res = residues_dd(&b, &poles)?;
        let wmax = res.iter().map(|w| lower(*w).norm()).fold(0.0, f64::max);
        let spurious: Vec<C64> = poles
            .iter()
            .zip(&res)
            .map(|(p, w)| (lower(*p), lower(*w)))
            .filter(|(p, w)| p.im >= 0.0 && (w.norm() < 1e2 * U * wmax || !domain.strictly_outside(*p)))
            .map(|(p, _)| p)
            .collect();
        if spurious.is_empty() || b.order() <= 1 {
            return Ok((b, poles, res));
        }
        let mut keep = vec![true; b.order()];
        for p in spurious {
            let nearest = (0..b.order())
                .filter(|&k| keep[k])
                .min_by(|&i, &j| (b.support[i] - p).norm().total_cmp(&(b.support[j] - p).norm()));
            if let Some(k) = nearest {
                keep[k] = false;
                let zk = b.support[k];
                if !is_real_point(zk) {
                    if let Some(j) = (0..b.order()).find(|&j| keep[j] && b.support[j] == zk.conj()) {
                        keep[j] = false;
                    }
                }
            }
        }
        let support: Vec<C64> = b.support.iter().zip(&keep).filter(|(_, &k)| k).map(|(&z, _)| z).collect();
        if support.is_empty() {
            return Ok((b, poles, res));
        }
        b = refit(|z| z.exp(), zs, &support)?;
    }
}

fn dd_c(z: C64) -> Cdd {
    lift(z)
}

fn poles_dd(b: &BarycentricApproximant) -> Result<Vec<Cdd>> {
    if b.u0 == C64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("u0 = 0: the approximant is not of degree (K-1, K)".into()));
    }
    let k = b.order();
    let n = k + 2;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut a = CMatrix::zeros(n, n);
    let mut bm = CMatrix::zeros(n, n);
    a[(0, 1)] = b.u0;
    a[(1, 0)] = one;
    a[(1, 1)] = -one;
    for j in 0..k {
        a[(0, j + 2)] = b.weights[j];
        a[(j + 2, 0)] = one;
        a[(j + 2, j + 2)] = b.support[j];
        bm[(j + 2, j + 2)] = one;
    }
    debug_assert_eq!(bm[(0, 0)], zero);
    let (finite, _) = dense_eigenvalues_dd(&a, &bm)?;
    if finite.len() != k {
        return Err(Error::EigenCount { expected: k, found: finite.len() });
    }
    // real poles carry double-double noise in their imaginary parts
    Ok(finite
        .into_iter()
        .map(|p| {
            let mag = (p.re.to_f64().powi(2) + p.im.to_f64().powi(2)).sqrt();
            if p.im.to_f64().abs() <= 1e-24 * (1.0 + mag) {
                Complex::new(p.re, Dd::ZERO)
            } else {
                p
            }
        })
        .collect())
}

/// Poles of a barycentric approximant from the arrowhead pencil, solved in
/// double-double.
pub fn extract_poles(b: &BarycentricApproximant) -> Result<Vec<C64>> {
    let p = poles_dd(b)?;
    let pairs: Vec<(C64, C64)> = p.iter().map(|z| (C64::new(0.0, 0.0), lower(*z))).collect();
    let sym = symmetrize(pairs, |z| z.im == 0.0)?;
    Ok(sym.into_iter().map(|(_, z)| z).collect())
}

fn residues_dd(b: &BarycentricApproximant, poles: &[Cdd]) -> Result<Vec<Cdd>> {
    let zero = Complex::new(Dd::ZERO, Dd::ZERO);
    let scale = b.support.iter().map(|z| z.norm()).fold(1.0, f64::max);
    poles
        .iter()
        .map(|&beta| {
            let mut n = zero;
            let mut dp = zero;
            for ((&zk, &fk), &uk) in b.support.iter().zip(&b.values).zip(&b.weights) {
                let diff = beta - dd_c(zk);
                let dist = lower(diff).norm();
                if dist <= 1e-12 * scale {
                    return Err(Error::PoleHit(format!("pole {} coincides with support point {zk}", lower(beta))));
                }
                let inv = Complex::new(Dd::ONE, Dd::ZERO) / diff;
                let c = dd_c(uk) * inv;
                n = n + c * dd_c(fk);
                dp = dp - c * inv;
            }
            // r ≈ w/(β − z) near β, so w = −n(β)/d′(β)
            Ok(-(n / dp))
        })
        .collect()
}

/// Coefficients `w` with `r(z) = Σ w/(β − z)`, i.e. the negated residues
/// `−n(β)/d′(β)`.
pub fn extract_residues(b: &BarycentricApproximant, poles: &[C64]) -> Result<Vec<C64>> {
    let p: Vec<Cdd> = poles.iter().map(|&z| dd_c(z)).collect();
    Ok(residues_dd(b, &p)?.into_iter().map(lower).collect())
}

/// Options for [`build_tame_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TameOptions {
    pub tol: f64,
    pub count: usize,
    /// Remove Froissart doublets and drop terms with `|w| < 1e2·u·max|w|`.
    pub prune: bool,
}

impl Default for TameOptions {
    fn default() -> Self {
        TameOptions { tol: 0.0, count: DEFAULT_COUNT, prune: true }
    }
}

/// A TAME method with its quality metadata and fit trace.
#[derive(Clone, Debug)]
pub struct TameBuild {
    pub method: AwMethod,
    pub metadata: MethodMetadata,
    pub report: AaaReport,
    pub approximant: BarycentricApproximant,
}

/// Build a TAME method with `N_max = 2·n_reduced` on `domain`.
pub fn build_tame(domain: &Domain, n_reduced: usize, tol: f64, count: usize) -> Result<TameBuild> {
    build_tame_with(domain, n_reduced, TameOptions { tol, count, ..TameOptions::default() })
}

pub fn build_tame_with(domain: &Domain, n_reduced: usize, opts: TameOptions) -> Result<TameBuild> {
    if n_reduced < 1 {
        return Err(Error::InvalidArgument("TAME needs N' >= 1".into()));
    }
    if !domain.is_axis_symmetric() {
        return Err(Error::InvalidArgument(format!("domain {domain} is not symmetric about the real axis")));
    }
    let z = discretize(domain, opts.count)?;
    let (b, report) = aaa_fit(|z| z.exp(), &z, 2 * n_reduced, opts.tol)?;
    let (b, poles, res) = if opts.prune {
        remove_doublets(b, domain, &z.points)?
    } else {
        let poles = poles_dd(&b)?;
        let res = residues_dd(&b, &poles)?;
        (b, poles, res)
    };

    let pairs: Vec<(C64, C64)> = res.iter().zip(&poles).map(|(&w, &p)| (lower(w), lower(p))).collect();
    let mut pairs = symmetrize(pairs, |p| p.im.abs() <= 1e-10 * p.norm().max(1.0))?;
    if opts.prune {
        let wmax = pairs.iter().map(|(w, _)| w.norm()).fold(0.0, f64::max);
        pairs.retain(|(w, _)| w.norm() >= 1e2 * U * wmax);
    }
    for &(_, p) in &pairs {
        if !domain.strictly_outside(p) {
            return Err(Error::PoleInsideDomain(format!("pole {p} lies in {domain}")));
        }
    }
    let (w, nodes): (Vec<C64>, Vec<C64>) = pairs.into_iter().unzip();
    let name = format!("tame({n_reduced},{domain})");
    let method = AwMethod::full(name, w, nodes)?.to_reduced()?;
    let fine = discretize(domain, 4 * opts.count)?;
    let eps = epsilon_accuracy(&method, &fine)?;
    let wmax = method.max_abs_weight();
    let metadata = MethodMetadata::new(eps, wmax, Some(domain.clone()));
    Ok(TameBuild { method, metadata, report, approximant: b })
}

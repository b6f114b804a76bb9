//! Built-in transform pairs with analytic ground truth.
//!
//! Entries are addressed on the command line as
//! `builtin:<name>[:<param>=<value>,...]`. List-valued parameters separate
//! items with `;` and matrix rows with `/`.

pub mod special;

use std::fmt;
use std::str::FromStr;

use crate::domains::{fov_hermitian_bound, Domain};
use crate::error::{Error, Result};
use crate::invert::{Transform, TransformValue};
use crate::numerics::{eigenvalues, lu, matrix_exponential, CMatrix, C64};
use special::{exp_e1, normal_cdf};

/// Function class an entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionClass {
    SumOfExponentials,
    MatrixExponential,
    LaplaceStieltjes,
    Other,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionClass::SumOfExponentials => "SE",
            FunctionClass::MatrixExponential => "ME",
            FunctionClass::LaplaceStieltjes => "LS",
            FunctionClass::Other => "other",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    ExpSum { c: Vec<C64>, alpha: Vec<C64> },
    MonomialExp { b: u32, alpha: f64 },
    MatrixExp { v: Vec<C64>, q: CMatrix, u: Vec<C64> },
    TriangularWave,
    SquareWave,
    BsCall { price: f64, strike: f64, rate: f64, sigma: f64 },
    CompletelyMonotone,
}

/// A transform pair `(f, 𝓛f)` with its derivative where known.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    name: String,
    kind: Kind,
    symmetric: bool,
    singularities: Vec<C64>,
}

/// Distance below which wave ground truths refuse to evaluate next to a
/// jump or kink.
pub const JUMP_GUARD: f64 = 1e-9;

/// Truncation level of the measure for the completely monotone entry.
pub const LS_TAIL: f64 = 1e-12;

fn conj_closed(c: &[C64], a: &[C64]) -> bool {
    c.iter().zip(a).all(|(&ci, &ai)| {
        if ai.im == 0.0 {
            ci.im == 0.0
        } else {
            c.iter().zip(a).any(|(&cj, &aj)| aj == ai.conj() && cj == ci.conj())
        }
    })
}

fn factorial(b: u32) -> f64 {
    (1..=b).map(f64::from).product()
}

impl CatalogEntry {
    fn build(name: &str, kind: Kind) -> Result<Self> {
        let (symmetric, singularities) = match &kind {
            Kind::ExpSum { c, alpha } => {
                if c.len() != alpha.len() || c.is_empty() {
                    return Err(Error::InvalidArgument("exp_sum needs equally many c and alpha values".into()));
                }
                (conj_closed(c, alpha), alpha.clone())
            }
            Kind::MonomialExp { alpha, .. } => (true, vec![C64::new(*alpha, 0.0)]),
            Kind::MatrixExp { v, q, u } => {
                if !q.is_square() || v.len() != q.rows() || u.len() != q.rows() {
                    return Err(Error::Dimension("matrix_exp needs v, Q, u of matching size".into()));
                }
                let real = q.data().iter().chain(v).chain(u).all(|z| z.im == 0.0);
                (real, eigenvalues(q)?)
            }
            Kind::TriangularWave | Kind::SquareWave | Kind::BsCall { .. } => (true, vec![C64::new(0.0, 0.0)]),
            Kind::CompletelyMonotone => (true, vec![C64::new(0.0, 0.0)]),
        };
        if let Kind::BsCall { price, strike, rate, sigma } = kind {
            if !(price > 0.0 && strike > 0.0 && sigma > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidArgument("bs_call needs positive price, strike and sigma".into()));
            }
        }
        Ok(CatalogEntry { name: name.to_string(), kind, symmetric, singularities })
    }

    /// `f(t) = Σ cₘ e^{αₘt}`.
    pub fn exp_sum(c: Vec<C64>, alpha: Vec<C64>) -> Result<Self> {
        Self::build("exp_sum", Kind::ExpSum { c, alpha })
    }

    /// `f(t) = tᵇ e^{αt} / b!`.
    pub fn monomial_exp(b: u32, alpha: f64) -> Result<Self> {
        Self::build("monomial_exp", Kind::MonomialExp { b, alpha })
    }

    /// `f(t) = v* exp(tQ) u`.
    pub fn matrix_exp(v: Vec<C64>, q: CMatrix, u: Vec<C64>) -> Result<Self> {
        Self::build("matrix_exp", Kind::MatrixExp { v, q, u })
    }

    /// Period-2 triangular wave with values in `[0, 1]`, `f(0) = 0`.
    pub fn triangular_wave() -> Self {
        Self::build("triangular_wave", Kind::TriangularWave).expect("no parameters")
    }

    /// `f(t) = ⌊t⌋ mod 2`.
    pub fn square_wave() -> Self {
        Self::build("square_wave", Kind::SquareWave).expect("no parameters")
    }

    /// European call price as a function of time to maturity.
    pub fn bs_call(price: f64, strike: f64, rate: f64, sigma: f64) -> Result<Self> {
        Self::build("bs_call", Kind::BsCall { price, strike, rate, sigma })
    }

    /// `f(t) = 1/(1 + t) = ∫₀^∞ e^{−xt} e^{−x} dx`.
    pub fn completely_monotone_demo() -> Self {
        Self::build("completely_monotone_demo", Kind::CompletelyMonotone).expect("no parameters")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> FunctionClass {
        match self.kind {
            Kind::ExpSum { .. } | Kind::MonomialExp { .. } => FunctionClass::SumOfExponentials,
            Kind::MatrixExp { .. } => FunctionClass::MatrixExponential,
            Kind::CompletelyMonotone => FunctionClass::LaplaceStieltjes,
            _ => FunctionClass::Other,
        }
    }

    /// Coefficients `cₘ` of a sum of exponentials.
    pub fn se_coefficients(&self) -> Option<&[C64]> {
        match &self.kind {
            Kind::ExpSum { c, .. } => Some(c),
            _ => None,
        }
    }

    /// Total mass `μ(ℝ⁺)` of the representing measure of an LS entry.
    pub fn measure_total(&self) -> Option<f64> {
        matches!(self.kind, Kind::CompletelyMonotone).then_some(1.0)
    }

    /// `𝓛f(s)`.
    pub fn transform(&self, s: C64) -> Result<C64> {
        let one = C64::new(1.0, 0.0);
        let v = match &self.kind {
            Kind::ExpSum { c, alpha } => c.iter().zip(alpha).map(|(&c, &a)| c / (s - a)).sum(),
            Kind::MonomialExp { b, alpha } => (s - alpha).powi(-(*b as i32) - 1),
            Kind::MatrixExp { v, q, u } => {
                let n = q.rows();
                let a = CMatrix::from_fn(n, n, |i, j| if i == j { s - q[(i, j)] } else { -q[(i, j)] });
                let x = lu(&a).map_err(|_| Error::Singular(format!("sI - Q at s = {s}")))?.solve_vec(u);
                v.iter().zip(&x).map(|(v, x)| v.conj() * x).sum()
            }
            Kind::TriangularWave => {
                // tanh(s/2)/s², evaluated with a decaying exponential
                let (e, sign) = if s.re >= 0.0 { ((-s).exp(), 1.0) } else { (s.exp(), -1.0) };
                (one - e) / (one + e) * sign / (s * s)
            }
            Kind::SquareWave => {
                if s.re >= 0.0 {
                    let e = (-s).exp();
                    e / (s * (one + e))
                } else {
                    one / (s * (one + s.exp()))
                }
            }
            Kind::BsCall { price, strike, rate, sigma } => bs_transform(*price, *strike, *rate, *sigma, s),
            Kind::CompletelyMonotone => exp_e1(s),
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{} transform at {s}", self.name)));
        }
        Ok(v)
    }

    /// Ground truth `f(t)`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("t must be nonnegative, got {t}")));
        }
        Ok(match &self.kind {
            Kind::ExpSum { c, alpha } => c.iter().zip(alpha).map(|(&c, &a)| c * (a * t).exp()).sum::<C64>().re,
            Kind::MonomialExp { b, alpha } => t.powi(*b as i32) * (alpha * t).exp() / factorial(*b),
            Kind::MatrixExp { v, q, u } => {
                let e = matrix_exponential(&q.scale(C64::new(t, 0.0)))?;
                let x = e.mul_vec(u)?;
                v.iter().zip(&x).map(|(v, x)| v.conj() * x).sum::<C64>().re
            }
            Kind::TriangularWave => {
                self.guard(t)?;
                let k = t.floor();
                let frac = t - k;
                if (k as i64) % 2 == 0 {
                    frac
                } else {
                    1.0 - frac
                }
            }
            Kind::SquareWave => {
                self.guard(t)?;
                ((t.floor() as i64) % 2) as f64
            }
            Kind::BsCall { price, strike, rate, sigma } => bs_value(*price, *strike, *rate, *sigma, t),
            Kind::CompletelyMonotone => 1.0 / (1.0 + t),
        })
    }

    /// `f′(t)` where available.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        match &self.kind {
            Kind::ExpSum { c, alpha } => Some(c.iter().zip(alpha).map(|(&c, &a)| c * a * (a * t).exp()).sum::<C64>().re),
            Kind::MonomialExp { b, alpha } => {
                let lead = if *b == 0 { 0.0 } else { t.powi(*b as i32 - 1) / factorial(b - 1) };
                Some((lead + alpha * t.powi(*b as i32) / factorial(*b)) * (alpha * t).exp())
            }
            Kind::TriangularWave => {
                let k = t.floor();
                (t - k > JUMP_GUARD && k + 1.0 - t > JUMP_GUARD).then(|| if (k as i64) % 2 == 0 { 1.0 } else { -1.0 })
            }
            Kind::SquareWave => (self.guard(t).is_ok()).then_some(0.0),
            Kind::CompletelyMonotone => Some(-1.0 / ((1.0 + t) * (1.0 + t))),
            _ => None,
        }
    }

    fn guard(&self, t: f64) -> Result<()> {
        let d = (t - t.round()).abs();
        if t > 0.0 && d < JUMP_GUARD {
            return Err(Error::InvalidArgument(format!("t = {t} is within {JUMP_GUARD} of a non-smooth point of {}", self.name)));
        }
        Ok(())
    }

    /// Domain on which a method should be accurate to invert this entry at
    /// `t`.
    pub fn recommended_domain(&self, t: f64) -> Result<Domain> {
        match &self.kind {
            Kind::ExpSum { alpha, .. } => containing_disc(&alpha.iter().map(|a| a * t).collect::<Vec<_>>()),
            Kind::MonomialExp { alpha, .. } => {
                // the Jordan-block argument needs B(αt, t)
                let z = alpha * t;
                if z + t <= 0.0 {
                    Domain::disc(z.min(-t), (z.min(-t)).abs())
                } else {
                    Domain::disc_c(C64::new(z, 0.0), t * (1.0 + 1e-9))
                }
            }
            Kind::MatrixExp { q, .. } => fov_hermitian_bound(&q.scale(C64::new(t, 0.0))),
            Kind::TriangularWave | Kind::SquareWave => Domain::imag_segment(80.0),
            Kind::BsCall { .. } => Domain::real_segment(100.0),
            Kind::CompletelyMonotone => Domain::real_segment(-LS_TAIL.ln() * t),
        }
    }
}

/// Smallest `disc(−r, r)` holding all points, or a centred disc when a
/// point lies in the open right half-plane.
fn containing_disc(points: &[C64]) -> Result<Domain> {
    if points.iter().all(|z| z.re < 0.0 || z.norm() == 0.0) {
        let r = points
            .iter()
            .filter(|z| z.norm() > 0.0)
            .map(|z| z.norm_sqr() / (-2.0 * z.re))
            .fold(f64::MIN_POSITIVE, f64::max);
        Domain::disc(-r, r)
    } else {
        let r = points.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Domain::disc_c(C64::new(0.0, 0.0), r * (1.0 + 1e-9))
    }
}

fn bs_gammas(rate: f64, sigma: f64, s: C64) -> (C64, C64) {
    let s2 = sigma * sigma;
    let m = rate - 0.5 * s2;
    let root = (C64::new(m * m, 0.0) + (s + rate) * (2.0 * s2)).sqrt();
    ((root - m) / s2, (-root - m) / s2)
}

fn bs_transform(price: f64, strike: f64, rate: f64, sigma: f64, s: C64) -> C64 {
    let (gp, gm) = bs_gammas(rate, sigma, s);
    let one = C64::new(1.0, 0.0);
    let ratio = (price / strike).ln();
    let scale = strike / (gp - gm);
    if price >= strike {
        scale * (gm * ratio).exp() * (gp / (s + rate) - (gp - one) / s) + price / s - strike / (s + rate)
    } else {
        scale * (gp * ratio).exp() * (gm / (s + rate) - (gm - one) / s)
    }
}

fn bs_value(price: f64, strike: f64, rate: f64, sigma: f64, t: f64) -> f64 {
    if t == 0.0 {
        return (price - strike).max(0.0);
    }
    let v = sigma * t.sqrt();
    let base = (price / strike).ln() + rate * t;
    let dp = (base + 0.5 * v * v) / v;
    let dm = (base - 0.5 * v * v) / v;
    price * normal_cdf(dp) - strike * (-rate * t).exp() * normal_cdf(dm)
}

impl Transform for CatalogEntry {
    fn eval(&self, s: C64) -> Result<TransformValue> {
        self.transform(s).map(TransformValue::Scalar)
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

fn parse_c(s: &str) -> Result<C64> {
    C64::from_str(s.trim()).map_err(|_| Error::InvalidArgument(format!("not a complex number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<C64>> {
    s.split(';').map(parse_c).collect()
}

fn parse_matrix(s: &str) -> Result<CMatrix> {
    let rows = s.split('/').map(parse_list).collect::<Result<Vec<_>>>()?;
    CMatrix::from_rows(&rows)
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::InvalidArgument(format!("not a number: {s:?}")))
}

/// Names accepted by [`entry`].
pub const NAMES: [&str; 7] =
    ["exp_sum", "monomial_exp", "matrix_exp", "triangular_wave", "square_wave", "bs_call", "completely_monotone_demo"];

/// Build an entry from its name and `key=value` parameters.
pub fn entry(name: &str, params: &[(&str, &str)]) -> Result<CatalogEntry> {
    let get = |keys: &[&str]| params.iter().find(|(k, _)| keys.contains(k)).map(|(_, v)| *v);
    let known: &[&str] = match name {
        "exp_sum" => &["c", "a", "alpha"],
        "monomial_exp" => &["b", "a", "alpha"],
        "matrix_exp" => &["v", "Q", "q", "u"],
        "bs_call" => &["price", "strike", "rate", "sigma"],
        "triangular_wave" | "square_wave" | "completely_monotone_demo" => &[],
        _ => return Err(Error::InvalidArgument(format!("unknown builtin {name:?}; known: {}", NAMES.join(", ")))),
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(k)) {
        return Err(Error::InvalidArgument(format!("{name} has no parameter {k:?}")));
    }
    match name {
        "exp_sum" => CatalogEntry::exp_sum(
            parse_list(get(&["c"]).unwrap_or("1"))?,
            parse_list(get(&["a", "alpha"]).unwrap_or("-1"))?,
        ),
        "monomial_exp" => {
            let b = get(&["b"]).unwrap_or("1");
            let b: u32 = b.trim().parse().map_err(|_| Error::InvalidArgument(format!("b must be a nonnegative integer, got {b:?}")))?;
            CatalogEntry::monomial_exp(b, parse_real(get(&["a", "alpha"]).unwrap_or("-1"))?)
        }
        "matrix_exp" => CatalogEntry::matrix_exp(
            parse_list(get(&["v"]).unwrap_or("1;0"))?,
            parse_matrix(get(&["Q", "q"]).unwrap_or("-1;1/0;-1"))?,
            parse_list(get(&["u"]).unwrap_or("0;1"))?,
        ),
        "triangular_wave" => Ok(CatalogEntry::triangular_wave()),
        "square_wave" => Ok(CatalogEntry::square_wave()),
        "bs_call" => CatalogEntry::bs_call(
            parse_real(get(&["price"]).unwrap_or("80"))?,
            parse_real(get(&["strike"]).unwrap_or("100"))?,
            parse_real(get(&["rate"]).unwrap_or("0.05"))?,
            parse_real(get(&["sigma"]).unwrap_or("0.1"))?,
        ),
        _ => Ok(CatalogEntry::completely_monotone_demo()),
    }
}

/// Parse `builtin:<name>[:<k>=<v>,...]`.
pub fn parse_builtin(spec: &str) -> Result<CatalogEntry> {
    let rest = spec
        .strip_prefix("builtin:")
        .ok_or_else(|| Error::InvalidArgument(format!("transform must start with 'builtin:', got {spec:?}")))?;
    let (name, args) = match rest.split_once(':') {
        Some((n, a)) => (n, a),
        None => (rest, ""),
    };
    let params = args
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::InvalidArgument(format!("parameter {p:?} is not key=value")))
        })
        .collect::<Result<Vec<_>>>()?;
    entry(name, &params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::integrate;
    use crate::invert::check_symmetry;

    fn laplace_quadrature(e: &CatalogEntry, s: f64, horizon: f64) -> f64 {
        let pieces = (horizon.ceil() as usize).max(1);
        // integer breakpoints keep wave kinks and jumps on piece boundaries
        let f = |t: f64| {
            let t = if (t - t.round()).abs() < 2.0 * JUMP_GUARD { t.round() + 2.0 * JUMP_GUARD } else { t };
            (-s * t).exp() * e.value(t).unwrap()
        };
        integrate(f, 0.0, pieces as f64, pieces, 1e-13, 20_000).value
    }

    #[test]
    fn examples() {
        let e = parse_builtin("builtin:exp_sum:c=1,a=-1").unwrap();
        assert_eq!(e.value(1.0).unwrap(), (-1f64).exp());
        let sq = CatalogEntry::square_wave();
        let v = sq.transform(C64::new(1.0, 0.0)).unwrap().re;
        assert!((v - 1.0 / (1.0 + std::f64::consts::E)).abs() < 1e-16);
        assert!((v - 0.268_941).abs() < 1e-6);
        assert!(sq.value(2.0).is_err());
        assert_eq!(sq.value(1.5).unwrap(), 1.0);
        assert_eq!(CatalogEntry::triangular_wave().value(1.25).unwrap(), 0.75);
        assert!(parse_builtin("builtin:nope").is_err());
        assert!(parse_builtin("builtin:exp_sum:z=1").is_err());
        assert!(parse_builtin("exp_sum").is_err());
    }

    #[test]
    fn transform_pairs_agree_with_quadrature() {
        let entries = [
            parse_builtin("builtin:exp_sum:c=1;2,a=-1;-0.5").unwrap(),
            parse_builtin("builtin:exp_sum:c=1+1i;1-1i,a=-1+2i;-1-2i").unwrap(),
            parse_builtin("builtin:monomial_exp:b=2,a=-0.5").unwrap(),
            parse_builtin("builtin:matrix_exp").unwrap(),
            CatalogEntry::triangular_wave(),
            CatalogEntry::square_wave(),
            CatalogEntry::bs_call(80.0, 100.0, 0.05, 0.1).unwrap(),
            CatalogEntry::bs_call(120.0, 100.0, 0.05, 0.2).unwrap(),
            CatalogEntry::completely_monotone_demo(),
        ];
        for e in &entries {
            assert!(e.is_symmetric(), "{}", e.name());
            check_symmetry(e).unwrap();
            for s in [0.7, 1.3, 2.9] {
                let horizon = if e.name() == "completely_monotone_demo" { 400.0 } else { 60.0 };
                let q = laplace_quadrature(e, s, horizon);
                let tail = if e.name() == "completely_monotone_demo" { (-s * horizon).exp() / (s * horizon) } else { 0.0 };
                let want = e.transform(C64::new(s, 0.0)).unwrap().re;
                assert!((q + tail - want).abs() <= 1e-8 * want.abs().max(1.0), "{} at s = {s}: {q} vs {want}", e.name());
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-6;
        for e in [
            parse_builtin("builtin:exp_sum:c=1;2,a=-1;-0.5").unwrap(),
            parse_builtin("builtin:monomial_exp:b=3,a=-0.7").unwrap(),
            CatalogEntry::completely_monotone_demo(),
        ] {
            let t = 1.7;
            let fd = (e.value(t + h).unwrap() - e.value(t - h).unwrap()) / (2.0 * h);
            assert!((fd - e.derivative(t).unwrap()).abs() < 1e-8, "{}", e.name());
        }
    }

    #[test]
    fn recommended_domains_contain_exponents() {
        let e = parse_builtin("builtin:exp_sum:c=1;1,a=-1;-3").unwrap();
        let d = e.recommended_domain(2.0).unwrap();
        for z in [C64::new(-2.0, 0.0), C64::new(-6.0, 0.0)] {
            assert!(d.distance(z) <= 1e-12, "{d} {z}");
        }
        let c = parse_builtin("builtin:exp_sum:c=1;1,a=-1+2i;-1-2i").unwrap();
        let d = c.recommended_domain(1.0).unwrap();
        assert!(d.distance(C64::new(-1.0, 2.0)) <= 1e-12);
    }
}

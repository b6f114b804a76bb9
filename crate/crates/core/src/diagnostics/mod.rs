//! Accuracy measurements, Dirac-approximant analysis, moments and error
//! bounds for Abate–Whitt methods.

mod bounds;
pub mod quadrature;

pub use bounds::{
    bound_fluid_cdf, bound_fluid_pdf, bound_lipschitz, bound_ls, bound_me, bound_phase_type, bound_second_order,
    bound_se, BoundClass, ErrorBoundReport,
};
pub use quadrature::{integrate, Integral};

use crate::domains::Discretization;
use crate::error::{Error, Result};
use crate::methods::AwMethod;
use crate::numerics::{C64, U};

/// Absolute tolerance for Dirac-approximant integrals.
pub const QUAD_TOL: f64 = 1e-12;

/// Floating-point aware error proxy `ε + u·max|wₙ|`.
pub fn eta_proxy(epsilon: f64, max_abs_weight: f64) -> f64 {
    epsilon + U * max_abs_weight
}

/// `max |eᶻ − Σ wₙ/(βₙ − z)|` over the given points.
pub fn epsilon_on(m: &AwMethod, points: &[C64]) -> Result<f64> {
    let terms = m.full_terms();
    let mut worst = 0.0f64;
    for &z in points {
        let mut r = C64::new(0.0, 0.0);
        for &(w, b) in &terms {
            let d = b - z;
            if d.norm() <= 1e-14 * (1.0 + b.norm()) {
                return Err(Error::NodeCollision(format!("node {b} coincides with evaluation point {z}")));
            }
            r += w / d;
        }
        worst = worst.max((z.exp() - r).norm());
    }
    Ok(worst)
}

/// ε-accuracy of `m` on a boundary discretization.
pub fn epsilon_accuracy(m: &AwMethod, z: &Discretization) -> Result<f64> {
    epsilon_on(m, &z.points)
}

fn require_right_half_plane(m: &AwMethod) -> Result<Vec<(C64, C64)>> {
    let terms = m.full_terms();
    if let Some((_, b)) = terms.iter().find(|(_, b)| b.re <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Dirac approximant needs all nodes in the right half-plane; found {b}"
        )));
    }
    Ok(terms)
}

fn dirac_value(terms: &[(C64, C64)], y: f64) -> f64 {
    terms.iter().map(|&(w, b)| (w * (-b * y).exp()).re).sum()
}

/// Dirac approximant `δ̂(y) = Σ wₙ e^{−βₙ y}`.
pub fn dirac_eval(m: &AwMethod, y: f64) -> Result<f64> {
    let terms = require_right_half_plane(m)?;
    let full: C64 = terms.iter().map(|&(w, b)| w * (-b * y).exp()).sum();
    let scale: f64 = terms.iter().map(|&(w, b)| (w * (-b * y).exp()).norm()).sum();
    if full.im.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(format!("Dirac approximant is not real at y = {y}: {full}")));
    }
    Ok(full.re)
}

/// Integration window `Y*` where the envelope `Σ|wₙ|e^{−Re βₙ Y}` drops
/// below `1e-14`.
fn window(terms: &[(C64, C64)]) -> f64 {
    let env = |y: f64| terms.iter().map(|&(w, b)| w.norm() * (-b.re * y).exp()).sum::<f64>();
    let mut hi = 1.0;
    while env(hi) > 1e-14 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if env(mid) > 1e-14 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `∫_Y^∞ y^k e^{−b y} dy` for `k ≤ 2`, shifted by `c`: `∫ (y−c)^k …`.
fn exp_tail(b: f64, y: f64, k: u32, c: f64) -> f64 {
    let e = (-b * y).exp() / b;
    let d = y - c;
    match k {
        0 => e,
        1 => e * (d + 1.0 / b),
        _ => e * (d * d + 2.0 * d / b + 2.0 / (b * b)),
    }
}

fn dirac_integral(m: &AwMethod, weight: impl Fn(f64) -> f64, absolute: bool, k: u32, c: f64) -> Result<Integral> {
    let terms = require_right_half_plane(m)?;
    let y_star = window(&terms);
    let max_im = terms.iter().map(|(_, b)| b.im.abs()).fold(0.0, f64::max);
    let pieces = ((y_star * (1.0 + max_im) / 2.0).ceil() as usize).clamp(16, 4096);
    // evaluation roundoff of δ̂ sets a floor below which refinement is noise
    let floor: f64 = 1e2 * U * terms.iter().map(|&(w, b)| w.norm() / b.re).sum::<f64>();
    let r = integrate(
        |y| {
            let d = dirac_value(&terms, y);
            weight(y) * if absolute { d.abs() } else { d }
        },
        0.0,
        y_star,
        pieces,
        QUAD_TOL.max(floor),
        50_000,
    );
    let tail: f64 = terms.iter().map(|&(w, b)| w.norm() * exp_tail(b.re, y_star, k, c)).sum();
    Ok(Integral { value: r.value, uncertainty: r.uncertainty + tail })
}

/// `‖δ̂‖₁ = ∫₀^∞ |δ̂(y)| dy`.
pub fn dirac_l1_norm(m: &AwMethod) -> Result<Integral> {
    dirac_integral(m, |_| 1.0, true, 0, 0.0)
}

/// `ν̃₂ = ∫₀^∞ (y − 1)² |δ̂(y)| dy`.
pub fn nu2_tilde(m: &AwMethod) -> Result<Integral> {
    dirac_integral(m, |y| (y - 1.0) * (y - 1.0), true, 2, 1.0)
}

/// Moments `μ₀, μ₁, μ₂` of δ̂ by quadrature.
pub fn quadrature_moments(m: &AwMethod) -> Result<[Integral; 3]> {
    Ok([
        dirac_integral(m, |_| 1.0, false, 0, 0.0)?,
        dirac_integral(m, |y| y, false, 1, 0.0)?,
        dirac_integral(m, |y| y * y, false, 2, 0.0)?,
    ])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet {
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub nu2: f64,
    pub nu2_tilde: Option<f64>,
    pub scv: Option<f64>,
}

impl MomentSet {
    pub fn from_moments(mu0: f64, mu1: f64, mu2: f64) -> Self {
        MomentSet {
            mu0,
            mu1,
            mu2,
            nu2: mu2 - 2.0 * mu1 + mu0,
            nu2_tilde: None,
            scv: (mu1 != 0.0).then(|| mu0 * mu2 / (mu1 * mu1) - 1.0),
        }
    }
}

/// Closed-form moments `μ₀ = Σ w/β`, `μ₁ = Σ w/β²`, `μ₂ = 2Σ w/β³`.
pub fn moments(m: &AwMethod) -> Result<MomentSet> {
    let terms = m.full_terms();
    if terms.iter().any(|(_, b)| *b == C64::new(0.0, 0.0)) {
        return Err(Error::InvalidArgument("moments need nonzero nodes".into()));
    }
    let mut s = [C64::new(0.0, 0.0); 3];
    let mut mag = [0.0f64; 3];
    for &(w, b) in &terms {
        let mut x = w / b;
        for k in 0..3 {
            s[k] += x;
            mag[k] += x.norm();
            x /= b;
        }
    }
    for k in 0..3 {
        if s[k].im.abs() > 1e-10 * mag[k].max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidArgument(format!("moment {k} has a non-negligible imaginary part {}", s[k].im)));
        }
    }
    Ok(MomentSet::from_moments(s[0].re, s[1].re, 2.0 * s[2].re))
}

/// First-order moment estimate `|μ₀ − 1|·|f(t)| + t·|f′(t)|·|μ₁ − μ₀|`.
pub fn moment_error_estimate(m: &AwMethod, f_value: f64, f_derivative: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let ms = moments(m)?;
    Ok((ms.mu0 - 1.0).abs() * f_value.abs() + t * f_derivative.abs() * (ms.mu1 - ms.mu0).abs())
}

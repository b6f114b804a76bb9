//! Class-wise rigorous error bounds.

use std::f64::consts::SQRT_2;
use std::fmt;

use super::MomentSet;
use crate::error::{Error, Result};
use crate::numerics::C64;

const CP: f64 = 1.0 + SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundClass {
    Se,
    Me,
    PhaseTypePdf,
    PhaseTypeCdf,
    FluidPdf,
    FluidCdf,
    Ls,
    Lipschitz,
    SecondOrder,
    MomentEstimate,
}

impl fmt::Display for BoundClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundClass::Se => "SE",
            BoundClass::Me => "ME",
            BoundClass::PhaseTypePdf => "phase_type_pdf",
            BoundClass::PhaseTypeCdf => "phase_type_cdf",
            BoundClass::FluidPdf => "fluid_pdf",
            BoundClass::FluidCdf => "fluid_cdf",
            BoundClass::Ls => "LS",
            BoundClass::Lipschitz => "lipschitz",
            BoundClass::SecondOrder => "second_order",
            BoundClass::MomentEstimate => "moment_estimate",
        };
        f.write_str(s)
    }
}

/// A bound value with the ingredients it was computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBoundReport {
    pub class: BoundClass,
    pub value: f64,
    pub ingredients: Vec<(&'static str, f64)>,
}

fn report(class: BoundClass, value: f64, ingredients: Vec<(&'static str, f64)>) -> Result<ErrorBoundReport> {
    if ingredients.iter().any(|(_, v)| !v.is_finite()) || !value.is_finite() {
        return Err(Error::NonFinite(format!("{class} bound ingredients")));
    }
    if ingredients.iter().any(|(_, v)| *v < 0.0) {
        return Err(Error::InvalidArgument(format!("{class} bound ingredients must be nonnegative")));
    }
    Ok(ErrorBoundReport { class, value, ingredients })
}

/// Sums of exponentials: `Σ|cₘ|·ε`.
pub fn bound_se(eps: f64, coeffs: &[C64]) -> Result<ErrorBoundReport> {
    let c: f64 = coeffs.iter().map(|c| c.norm()).sum();
    report(BoundClass::Se, c * eps, vec![("epsilon", eps), ("sum_abs_c", c)])
}

/// `f(t) = v* exp(tQ) u`: `(1+√2)·ε·‖v‖₂‖u‖₂`.
pub fn bound_me(eps: f64, norm_v: f64, norm_u: f64) -> Result<ErrorBoundReport> {
    report(BoundClass::Me, CP * eps * norm_v * norm_u, vec![("epsilon", eps), ("norm_v", norm_v), ("norm_u", norm_u)])
}

/// Phase-type pdf bound and the two CDF bounds (the CDF bounds need
/// `0 ∈ Ω`). `mean` is `−αᵀQ⁻¹1`.
pub fn bound_phase_type(
    eps: f64,
    q_l1: f64,
    d: usize,
    mean: f64,
) -> Result<(ErrorBoundReport, ErrorBoundReport, ErrorBoundReport)> {
    let pdf = report(BoundClass::PhaseTypePdf, CP * eps * q_l1, vec![("epsilon", eps), ("q_l1", q_l1)])?;
    let cdf_a = report(
        BoundClass::PhaseTypeCdf,
        eps + CP * eps * (d as f64).sqrt(),
        vec![("epsilon", eps), ("d", d as f64)],
    )?;
    let cdf_b = report(
        BoundClass::PhaseTypeCdf,
        eps + CP * eps * mean * q_l1,
        vec![("epsilon", eps), ("mean", mean), ("q_l1", q_l1)],
    )?;
    Ok((pdf, cdf_a, cdf_b))
}

/// Fluid-queue first-return density entry: `(1+√2)·ε·λ·Ψ(∞)ᵢⱼ`.
pub fn bound_fluid_pdf(eps: f64, lambda: f64, psi_inf: f64) -> Result<ErrorBoundReport> {
    report(
        BoundClass::FluidPdf,
        CP * eps * lambda * psi_inf,
        vec![("epsilon", eps), ("lambda", lambda), ("psi_inf", psi_inf)],
    )
}

/// Fluid-queue first-return CDF entry: `ε·Ψ(∞)ᵢⱼ + (1+√2)·ε·λ·E[ψ]ᵢⱼ`.
pub fn bound_fluid_cdf(eps: f64, lambda: f64, psi_inf: f64, first_moment: f64) -> Result<ErrorBoundReport> {
    report(
        BoundClass::FluidCdf,
        eps * psi_inf + CP * eps * lambda * first_moment,
        vec![("epsilon", eps), ("lambda", lambda), ("psi_inf", psi_inf), ("first_moment", first_moment)],
    )
}

/// Laplace–Stieltjes class: `(1+‖δ̂‖₁)·η + μ(ℝ⁺)·ε`.
pub fn bound_ls(eps: f64, eta: f64, mu_total: f64, dirac_l1: f64) -> Result<ErrorBoundReport> {
    report(
        BoundClass::Ls,
        (1.0 + dirac_l1) * eta + mu_total * eps,
        vec![("epsilon", eps), ("eta", eta), ("mu_total", mu_total), ("dirac_l1", dirac_l1)],
    )
}

/// Bounded Lipschitz functions: `3(2HL²t²)^{1/3}·SCV^{1/3}`; requires
/// `μ₀ = μ₁ = 1` within `1e-10`.
pub fn bound_lipschitz(ms: &MomentSet, h: f64, l: f64, t: f64) -> Result<ErrorBoundReport> {
    if (ms.mu0 - 1.0).abs() > 1e-10 || (ms.mu1 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "Lipschitz bound needs mu0 = mu1 = 1, got {} and {}",
            ms.mu0, ms.mu1
        )));
    }
    let scv = ms.scv.ok_or_else(|| Error::InvalidArgument("SCV undefined".into()))?;
    if scv < 0.0 {
        return Err(Error::InvalidArgument(format!("negative SCV {scv}")));
    }
    let v = 3.0 * (2.0 * h * l * l * t * t).cbrt() * scv.cbrt();
    report(BoundClass::Lipschitz, v, vec![("H", h), ("L", l), ("t", t), ("scv", scv)])
}

/// Second-order moment bound
/// `|μ₀−1|·|f(t)| + t|f′(t)||μ₁−μ₀| + ½t²‖f″‖∞·ν̃₂`. Usually far too large
/// to be useful for methods whose Dirac approximant changes sign.
pub fn bound_second_order(ms: &MomentSet, f: f64, fp: f64, fpp_sup: f64, t: f64) -> Result<ErrorBoundReport> {
    let nt = ms.nu2_tilde.ok_or_else(|| Error::InvalidArgument("second-order bound needs nu2_tilde".into()))?;
    let v = (ms.mu0 - 1.0).abs() * f.abs() + t * fp.abs() * (ms.mu1 - ms.mu0).abs() + 0.5 * t * t * fpp_sup * nt;
    report(
        BoundClass::SecondOrder,
        v,
        vec![("abs_f", f.abs()), ("abs_fp", fp.abs()), ("fpp_sup", fpp_sup), ("t", t), ("nu2_tilde", nt)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn se_examples() {
        assert_eq!(bound_se(1e-12, &[C64::new(1.0, 0.0)]).unwrap().value, 1e-12);
        let v = bound_se(1e-12, &[C64::new(2.0, 0.0), C64::new(0.0, -3.0)]).unwrap().value;
        assert!((v - 5e-12).abs() < 1e-27);
    }

    #[test]
    fn me_and_fluid_constants() {
        assert!((bound_me(1e-12, 1.0, 1.0).unwrap().value - 2.414_213_562_373_095e-12).abs() < 1e-26);
        assert_eq!(bound_me(0.0, 3.0, 2.0).unwrap().value, 0.0);
        assert!((bound_fluid_pdf(1e-12, 1.0, 1.0).unwrap().value - CP * 1e-12).abs() < 1e-27);
        assert_eq!(bound_fluid_cdf(0.0, 1.0, 1.0, 5.0).unwrap().value, 0.0);
        let (p, a, b) = bound_phase_type(1e-12, 1.0, 1, 1.0).unwrap();
        assert!((p.value - CP * 1e-12).abs() < 1e-27);
        assert!((a.value - (1e-12 + CP * 1e-12)).abs() < 1e-27);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn ls_and_lipschitz() {
        assert_eq!(bound_ls(1e-12, 0.0, 2.0, 5.0).unwrap().value, 2e-12);
        assert_eq!(bound_ls(0.0, 0.0, 2.0, 5.0).unwrap().value, 0.0);
        let ms = MomentSet::from_moments(1.0, 1.0, 2.0);
        let v = bound_lipschitz(&ms, 1.0, 1.0, 1.0).unwrap().value;
        assert!((v - 3.779_763_149_684_619).abs() < 1e-14);
        let perfect = MomentSet::from_moments(1.0, 1.0, 1.0);
        assert_eq!(bound_lipschitz(&perfect, 1.0, 1.0, 1.0).unwrap().value, 0.0);
        assert!(bound_lipschitz(&MomentSet::from_moments(1.1, 1.0, 2.0), 1.0, 1.0, 1.0).is_err());
    }
}

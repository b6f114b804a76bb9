use super::{GeneratorKind, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::invert::{Transform, TransformValue};
use crate::numerics::{eigenvalues, lu, matrix_exponential, CMatrix, RMatrix, C64};

/// Phase-type distribution with pdf `αᵀ exp(tQ) q`, `q = −Q·1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseType {
    alpha: Vec<f64>,
    q: GeneratorMatrix,
    exit: Vec<f64>,
}

impl PhaseType {
    pub fn new(alpha: Vec<f64>, q: RMatrix) -> Result<Self> {
        let q = GeneratorMatrix::new(q, GeneratorKind::Subgenerator)?;
        let d = q.dim();
        if alpha.len() != d {
            return Err(Error::Dimension(format!("alpha has {} entries for dimension {d}", alpha.len())));
        }
        if alpha.iter().any(|&a| !(a >= 0.0)) || (alpha.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("alpha must be a probability vector".into()));
        }
        let m = q.matrix();
        let exit: Vec<f64> = (0..d).map(|i| -(0..d).map(|j| m[(i, j)]).sum::<f64>()).map(|x| x.max(0.0)).collect();
        Ok(PhaseType { alpha, q, exit })
    }

    /// Erlang distribution with `k` phases of rate `rate`.
    pub fn erlang(k: usize, rate: f64) -> Result<Self> {
        if k == 0 || !(rate > 0.0) {
            return Err(Error::InvalidArgument("Erlang needs k >= 1 and a positive rate".into()));
        }
        let q = RMatrix::from_fn(k, k, |i, j| {
            if i == j {
                -rate
            } else if j == i + 1 {
                rate
            } else {
                0.0
            }
        });
        let mut alpha = vec![0.0; k];
        alpha[0] = 1.0;
        PhaseType::new(alpha, q)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.q
    }

    pub fn exit(&self) -> &[f64] {
        &self.exit
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// `‖q‖₁`.
    pub fn exit_l1(&self) -> f64 {
        self.exit.iter().map(|x| x.abs()).sum()
    }

    /// Mean `−αᵀQ⁻¹1`.
    pub fn mean(&self) -> Result<f64> {
        let d = self.dim();
        let q = CMatrix::from_real(self.q.matrix());
        let f = lu(&q)?;
        let x = f.solve_vec(&vec![C64::new(1.0, 0.0); d]);
        Ok(-self.alpha.iter().zip(&x).map(|(a, x)| a * x.re).sum::<f64>())
    }

    fn resolvent_form(&self, s: C64) -> Result<C64> {
        let d = self.dim();
        let m = self.q.matrix();
        let a = CMatrix::from_fn(d, d, |i, j| if i == j { s - m[(i, j)] } else { C64::new(-m[(i, j)], 0.0) });
        let f = lu(&a).map_err(|_| Error::Singular(format!("sI - Q at s = {s}")))?;
        let x = f.solve_vec(&self.exit.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
        Ok(self.alpha.iter().zip(&x).map(|(&a, &x)| x * a).sum())
    }
}

/// Transform `αᵀ(sI − Q)⁻¹q` of the pdf.
#[derive(Clone, Debug)]
pub struct PhaseTypePdf {
    p: PhaseType,
    poles: Vec<C64>,
}

/// Transform `αᵀ(sI − Q)⁻¹q / s` of the CDF.
#[derive(Clone, Debug)]
pub struct PhaseTypeCdf {
    p: PhaseType,
    poles: Vec<C64>,
}

pub fn phase_type_transform(p: &PhaseType) -> Result<(PhaseTypePdf, PhaseTypeCdf)> {
    let poles = eigenvalues(&CMatrix::from_real(p.q.matrix()))?;
    let mut cdf_poles = poles.clone();
    cdf_poles.push(C64::new(0.0, 0.0));
    Ok((PhaseTypePdf { p: p.clone(), poles }, PhaseTypeCdf { p: p.clone(), poles: cdf_poles }))
}

impl Transform for PhaseTypePdf {
    fn eval(&self, s: C64) -> Result<TransformValue> {
        self.p.resolvent_form(s).map(TransformValue::Scalar)
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

impl Transform for PhaseTypeCdf {
    fn eval(&self, s: C64) -> Result<TransformValue> {
        if s == C64::new(0.0, 0.0) {
            return Err(Error::Singular("CDF transform at s = 0".into()));
        }
        self.p.resolvent_form(s).map(|v| TransformValue::Scalar(v / s))
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

/// `(αᵀe^{tQ}q, 1 − αᵀe^{tQ}1)` by the matrix exponential.
pub fn phase_type_ground_truth(p: &PhaseType, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be nonnegative, got {t}")));
    }
    let e = matrix_exponential(&CMatrix::from_real(p.q.matrix()).scale(C64::new(t, 0.0)))?;
    let d = p.dim();
    let mut pdf = 0.0;
    let mut survival = 0.0;
    for i in 0..d {
        for j in 0..d {
            let v = p.alpha[i] * e[(i, j)].re;
            pdf += v * p.exit[j];
            survival += v;
        }
    }
    Ok((pdf, 1.0 - survival))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_erlang() {
        let e = PhaseType::erlang(1, 1.0).unwrap();
        let (pdf, cdf) = phase_type_transform(&e).unwrap();
        assert_eq!(pdf.eval(C64::new(1.0, 0.0)).unwrap(), TransformValue::Scalar(C64::new(0.5, 0.0)));
        assert!(cdf.singularities().contains(&C64::new(0.0, 0.0)));
        let (f, cdf1) = phase_type_ground_truth(&e, 1.0).unwrap();
        let em1 = (-1f64).exp();
        assert!((f - em1).abs() < 1e-15 && (cdf1 - (1.0 - em1)).abs() < 1e-15);
        assert_eq!(phase_type_ground_truth(&e, 0.0).unwrap().1, 0.0);

        let e2 = PhaseType::erlang(2, 1.0).unwrap();
        let (f, c) = phase_type_ground_truth(&e2, 2.0).unwrap();
        let em2 = (-2f64).exp();
        assert!((f - 2.0 * em2).abs() < 1e-15 && (c - (1.0 - 3.0 * em2)).abs() < 1e-15);
        let s = C64::new(0.3, 0.8);
        let (pdf2, _) = phase_type_transform(&e2).unwrap();
        let want = ((s + 1.0) * (s + 1.0)).inv();
        assert!((pdf2.eval(s).unwrap().as_scalar().unwrap() - want).norm() < 1e-15);
        assert!((e2.mean().unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(e2.exit_l1(), 1.0);
    }
}

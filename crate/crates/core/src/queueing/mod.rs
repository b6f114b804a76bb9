//! CTMC generators, phase-type distributions and fluid-queue first-return
//! transforms.

mod fluid;
mod phase_type;

pub use fluid::{fluid_psi_transform, make_experiment_model, solve_nare, FluidPsi, FluidPsiCdf, FluidQueueModel};
pub use phase_type::{phase_type_ground_truth, phase_type_transform, PhaseType, PhaseTypeCdf, PhaseTypePdf};

use crate::error::{Error, Result};
use crate::numerics::RMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Rows sum to zero.
    Generator,
    /// Rows sum to at most zero.
    Subgenerator,
}

/// A (sub)generator matrix with a uniformization rate `λ ≥ maxᵢ |Qᵢᵢ|`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix {
    q: RMatrix,
    kind: GeneratorKind,
    lambda: f64,
}

impl GeneratorMatrix {
    /// Validate `q`; the rate defaults to `maxᵢ |Qᵢᵢ|`.
    pub fn new(q: RMatrix, kind: GeneratorKind) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::Dimension("generator must be square".into()));
        }
        if !q.is_finite() {
            return Err(Error::NonFinite("generator entries".into()));
        }
        let n = q.rows();
        let tol = 1e-12 * q.norm_inf_real().max(f64::MIN_POSITIVE);
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                if i != j && q[(i, j)] < 0.0 {
                    return Err(Error::InvalidArgument(format!("negative off-diagonal entry at ({i},{j})")));
                }
                sum += q[(i, j)];
            }
            let bad = match kind {
                GeneratorKind::Generator => sum.abs() > tol,
                GeneratorKind::Subgenerator => sum > tol,
            };
            if bad {
                return Err(Error::InvalidArgument(format!("row {i} sums to {sum}")));
            }
        }
        let lambda = (0..n).map(|i| q[(i, i)].abs()).fold(0.0, f64::max);
        Ok(GeneratorMatrix { q, kind, lambda })
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda >= self.lambda) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "uniformization rate {lambda} is below max |Q_ii| = {}",
                self.lambda
            )));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.q
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_validation() {
        let q = RMatrix::from_rows(&[vec![-1.0, 1.0], vec![2.0, -2.0]]).unwrap();
        let g = GeneratorMatrix::new(q.clone(), GeneratorKind::Generator).unwrap();
        assert_eq!(g.lambda(), 2.0);
        assert!(g.clone().with_lambda(1.5).is_err());
        assert_eq!(g.with_lambda(3.0).unwrap().lambda(), 3.0);
        let sub = RMatrix::from_rows(&[vec![-1.0, 0.5], vec![0.0, -2.0]]).unwrap();
        assert!(GeneratorMatrix::new(sub.clone(), GeneratorKind::Generator).is_err());
        assert!(GeneratorMatrix::new(sub, GeneratorKind::Subgenerator).is_ok());
        let neg = RMatrix::from_rows(&[vec![-1.0, -1.0], vec![0.0, 0.0]]).unwrap();
        assert!(GeneratorMatrix::new(neg, GeneratorKind::Subgenerator).is_err());
    }
}

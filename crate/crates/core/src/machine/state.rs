use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, re, ComplexMatrix, HermitianMatrix, HERMITIAN_TOL, ZERO,
};

/// Tolerance on trace and positivity of a density matrix.
pub const STATE_TOL: f64 = 1e-10;

/// Largest entry allowed outside the X-form support.
pub const X_FORM_TOL: f64 = 1e-8;

/// Two-qubit density matrix in the basis (|00⟩, |01⟩, |10⟩, |11⟩).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    rho: ComplexMatrix,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(rho, STATE_TOL)
    }

    pub fn with_tolerance(rho: ComplexMatrix, tol: f64) -> Result<Self> {
        if rho.rows() != 4 || rho.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4x4".into(),
                got: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        let h = HermitianMatrix::new(rho, HERMITIAN_TOL.max(tol))?.into_inner();
        let tr = h.trace().re;
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min_ev = *hermitian_eigenvalues(&h)?.last().unwrap();
        if min_ev < -tol {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue is {min_ev:.3e}"
            )));
        }
        Ok(Self { rho: h })
    }

    /// Normalizes a Hermitian, positive semidefinite matrix by its trace.
    pub fn from_unnormalized(m: ComplexMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        Self::new(m.scale_real(1.0 / tr))
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: ComplexMatrix::identity(4).scale_real(0.25),
        }
    }

    /// |ψ⁻⟩ = (|01⟩ − |10⟩)/√2
    pub fn singlet() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [ZERO, re(s), re(-s), ZERO];
        Self {
            rho: ComplexMatrix::outer(&v, &v),
        }
    }

    pub fn pure(v: &[num_complex::Complex64; 4]) -> Result<Self> {
        let n = crate::linalg::vector_norm(v);
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let u: Vec<_> = v.iter().map(|z| z / n).collect();
        Ok(Self {
            rho: ComplexMatrix::outer(&u, &u),
        })
    }

    pub fn product(rho_a: &ComplexMatrix, rho_b: &ComplexMatrix) -> Result<Self> {
        Self::new(crate::linalg::kron(rho_a, rho_b))
    }

    /// `(1 − q)ρ + q·I/4`
    pub fn with_white_noise(&self, q: f64) -> Self {
        let mixed = ComplexMatrix::identity(4).scale_real(0.25 * q);
        Self {
            rho: &self.rho.scale_real(1.0 - q) + &mixed,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn populations(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.rho[(i, i)].re)
    }

    /// Largest entry outside the X-form support.
    pub fn x_form_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let allowed = i == j || (i, j) == (1, 2) || (i, j) == (2, 1);
                if !allowed {
                    worst = worst.max(self.rho[(i, j)].norm());
                }
            }
        }
        worst
    }
}

/// Canonical X-form: populations of |00⟩, |01⟩, |10⟩ and the modulus of the
/// (|01⟩, |10⟩) coherence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XState {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub alpha: f64,
}

impl XState {
    pub fn new(a1: f64, a2: f64, a3: f64, alpha: f64) -> Result<Self> {
        let x = Self { a1, a2, a3, alpha };
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a1, a2, a3, alpha } = *self;
        if [a1, a2, a3, alpha].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite X-state entry".into()));
        }
        if a1 < -STATE_TOL || a2 < -STATE_TOL || a3 < -STATE_TOL || self.a4() < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative population in {self:?}"
            )));
        }
        if alpha < 0.0 {
            return Err(Error::InvalidState("alpha must be >= 0".into()));
        }
        if alpha > (a2.max(0.0) * a3.max(0.0)).sqrt() + STATE_TOL {
            return Err(Error::InvalidState(format!(
                "alpha = {alpha} exceeds sqrt(a2 a3)"
            )));
        }
        Ok(())
    }

    pub fn singlet() -> Self {
        Self {
            a1: 0.0,
            a2: 0.5,
            a3: 0.5,
            alpha: 0.5,
        }
    }

    /// Population of |11⟩.
    pub fn a4(&self) -> f64 {
        1.0 - self.a1 - self.a2 - self.a3
    }

    /// Δ = a2 + a3
    pub fn delta(&self) -> f64 {
        self.a2 + self.a3
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.a1, self.a2, self.a3, self.a4()]
    }

    /// Density matrix with real coherence −α, the phase convention in which
    /// the overlap with |ψ⁻⟩ is α + Δ/2.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::diag_real(&self.diagonal());
        m[(1, 2)] = re(-self.alpha);
        m[(2, 1)] = re(-self.alpha);
        m
    }

    pub fn to_state(&self) -> Result<TwoQubitState> {
        TwoQubitState::new(self.to_matrix())
    }
}

/// Removes the coherence phase with a local diagonal unitary on qubit A.
pub fn canonicalize_x_state(rho: &TwoQubitState) -> Result<XState> {
    let v = rho.x_form_violation();
    if v > X_FORM_TOL {
        return Err(Error::NonXState { magnitude: v });
    }
    let [a1, a2, a3, _] = rho.populations();
    let alpha = rho.matrix()[(1, 2)].norm();
    // clamp rounding so that the positivity invariant holds exactly
    let alpha = alpha.min((a2.max(0.0) * a3.max(0.0)).sqrt());
    XState::new(a1, a2, a3, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn canonicalize_extracts_modulus() {
        let mut m = ComplexMatrix::diag_real(&[0.1, 0.2, 0.6, 0.1]);
        m[(1, 2)] = c(0.0, -0.3);
        m[(2, 1)] = c(0.0, 0.3);
        let x = canonicalize_x_state(&TwoQubitState::new(m).unwrap()).unwrap();
        assert!((x.alpha - 0.3).abs() < 1e-15);
        assert_eq!((x.a1, x.a2, x.a3), (0.1, 0.2, 0.6));
    }

    #[test]
    fn diagonal_state_has_no_coherence() {
        let x = canonicalize_x_state(&TwoQubitState::maximally_mixed()).unwrap();
        assert_eq!(x.alpha, 0.0);
    }

    #[test]
    fn forbidden_entry_rejected() {
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        m[(0, 3)] = re(0.1);
        m[(3, 0)] = re(0.1);
        let s = TwoQubitState::new(m).unwrap();
        assert!(matches!(
            canonicalize_x_state(&s),
            Err(Error::NonXState { .. })
        ));
    }

    #[test]
    fn state_validation() {
        assert!(TwoQubitState::new(ComplexMatrix::identity(4)).is_err());
        let mut m = ComplexMatrix::diag_real(&[0.5, 0.5, 0.0, 0.0]);
        m[(1, 2)] = re(0.1);
        m[(2, 1)] = re(0.1);
        assert!(matches!(TwoQubitState::new(m), Err(Error::InvalidState(_))));
        assert!(XState::new(0.0, 0.25, 0.25, 0.3).is_err());
    }

    #[test]
    fn singlet_round_trip() {
        let x = canonicalize_x_state(&TwoQubitState::singlet()).unwrap();
        assert!((x.alpha - 0.5).abs() < 1e-15);
        assert!(x
            .to_matrix()
            .approx_eq(TwoQubitState::singlet().matrix(), 1e-15));
    }
}

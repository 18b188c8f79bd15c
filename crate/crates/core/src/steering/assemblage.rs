use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron, partial_trace_a, ComplexMatrix};
use crate::machine::TwoQubitState;

use super::measurements::MeasurementSet;

/// Tolerance on no-signalling and normalization.
pub const ASSEMBLAGE_TOL: f64 = 1e-10;

/// Unnormalized conditional states `sigma[x][a]` prepared on B.
#[derive(Clone, Debug, PartialEq)]
pub struct Assemblage {
    sigma: Vec<[ComplexMatrix; 2]>,
}

impl Assemblage {
    pub fn new(sigma: Vec<[ComplexMatrix; 2]>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::InvalidAssemblage("no settings".into()));
        }
        for (x, pair) in sigma.iter().enumerate() {
            for (a, s) in pair.iter().enumerate() {
                if s.rows() != 2 || s.cols() != 2 {
                    return Err(Error::InvalidAssemblage(format!(
                        "sigma[{a}|{x}] is not 2x2"
                    )));
                }
                if !s.is_hermitian(ASSEMBLAGE_TOL) {
                    return Err(Error::InvalidAssemblage(format!(
                        "sigma[{a}|{x}] is not Hermitian"
                    )));
                }
                let min = *hermitian_eigenvalues(s)?.last().unwrap();
                if min < -ASSEMBLAGE_TOL {
                    return Err(Error::InvalidAssemblage(format!(
                        "sigma[{a}|{x}] has eigenvalue {min:.3e}"
                    )));
                }
            }
        }
        let marginal = &sigma[0][0] + &sigma[0][1];
        let tr = marginal.trace().re;
        if (tr - 1.0).abs() > ASSEMBLAGE_TOL {
            return Err(Error::InvalidAssemblage(format!("total trace is {tr}")));
        }
        for (x, pair) in sigma.iter().enumerate().skip(1) {
            let m = &pair[0] + &pair[1];
            let dev = m.max_abs_diff(&marginal);
            if dev > ASSEMBLAGE_TOL {
                return Err(Error::InvalidAssemblage(format!(
                    "setting {x} signals (deviation {dev:.3e})"
                )));
            }
        }
        Ok(Self { sigma })
    }

    pub fn settings(&self) -> usize {
        self.sigma.len()
    }

    pub fn get(&self, a: usize, x: usize) -> &ComplexMatrix {
        &self.sigma[x][a]
    }

    /// Reduced state of B, Σ_a σ_{a|x}.
    pub fn marginal(&self) -> ComplexMatrix {
        &self.sigma[0][0] + &self.sigma[0][1]
    }

    /// Assemblage of (1 − q)ρ + q·I/4 given the assemblage of ρ, for rank-one projectors.
    pub fn with_white_noise(&self, q: f64) -> Self {
        let noise = ComplexMatrix::identity(2).scale_real(0.25 * q);
        let sigma = self
            .sigma
            .iter()
            .map(|[s0, s1]| {
                [
                    &s0.scale_real(1.0 - q) + &noise,
                    &s1.scale_real(1.0 - q) + &noise,
                ]
            })
            .collect();
        Self { sigma }
    }
}

/// σ_{a|x} = Tr_A[(A_{a|x} ⊗ 1)ρ]
pub fn assemblage(rho: &TwoQubitState, m: &MeasurementSet) -> Assemblage {
    let id = ComplexMatrix::identity(2);
    let sigma = (0..m.len())
        .map(|x| {
            m.projectors(x).map(|p| {
                let s = partial_trace_a(&(&kron(&p, &id) * rho.matrix())).expect("4x4 input");
                (&s + &s.adjoint()).scale_real(0.5)
            })
        })
        .collect();
    Assemblage { sigma }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::steering::measurements::{dodecahedron_measurements, MeasurementSet};

    #[test]
    fn maximally_mixed_gives_quarter_identity() {
        let asm = assemblage(
            &TwoQubitState::maximally_mixed(),
            &dodecahedron_measurements(),
        );
        let q = ComplexMatrix::identity(2).scale_real(0.25);
        for x in 0..10 {
            for a in 0..2 {
                assert!(asm.get(a, x).approx_eq(&q, 1e-15));
            }
        }
    }

    #[test]
    fn product_state_factorizes() {
        let mut ra = ComplexMatrix::diag_real(&[0.7, 0.3]);
        ra[(0, 1)] = re(0.2);
        ra[(1, 0)] = re(0.2);
        let rb = ComplexMatrix::diag_real(&[0.4, 0.6]);
        let rho = TwoQubitState::product(&ra, &rb).unwrap();
        let m = dodecahedron_measurements();
        let asm = assemblage(&rho, &m);
        for x in 0..m.len() {
            let p = m.projectors(x);
            for a in 0..2 {
                let w = (&p[a] * &ra).trace().re;
                assert!(asm.get(a, x).approx_eq(&rb.scale_real(w), 1e-14));
            }
        }
    }

    #[test]
    fn singlet_anticorrelation() {
        let m = MeasurementSet::new(vec![[0.0, 0.0, 1.0]]).unwrap();
        let asm = assemblage(&TwoQubitState::singlet(), &m);
        assert!(asm
            .get(0, 0)
            .approx_eq(&ComplexMatrix::ket_bra(2, 1, 1).scale_real(0.5), 1e-15));
    }

    #[test]
    fn generated_assemblages_validate() {
        let asm = assemblage(&TwoQubitState::singlet(), &dodecahedron_measurements());
        let rebuilt = Assemblage::new(
            (0..10)
                .map(|x| [asm.get(0, x).clone(), asm.get(1, x).clone()])
                .collect(),
        );
        assert!(rebuilt.is_ok());
    }

    #[test]
    fn signalling_rejected() {
        let a = ComplexMatrix::diag_real(&[0.5, 0.0]);
        let b = ComplexMatrix::diag_real(&[0.0, 0.5]);
        let c = ComplexMatrix::diag_real(&[0.25, 0.25]);
        let r = Assemblage::new(vec![[a.clone(), b.clone()], [c.clone(), c.scale_real(1.0)]]);
        assert!(r.is_ok());
        let r = Assemblage::new(vec![[a.clone(), b.clone()], [a.clone(), a]]);
        assert!(matches!(r, Err(Error::InvalidAssemblage(_))));
    }
}

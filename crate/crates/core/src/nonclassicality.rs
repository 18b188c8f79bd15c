//! Teleportation (singlet fraction), Bell nonlocality (CHSH), concurrence and
//! purity of two-qubit states, plus the trivial-region predicates on X-states.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, kron, pauli, qubit_rotation, ComplexMatrix, ZERO,
};
use crate::machine::{canonicalize_x_state, TwoQubitState, XState};
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Strict margin on the classical thresholds.
pub const THRESHOLD_TOL: f64 = 1e-12;

/// Singlet fraction of a canonical X-state.
pub fn singlet_fraction_x(x: &XState) -> f64 {
    let delta = x.delta();
    let entangled = x.alpha + delta / 2.0;
    if 1.0 + 2.0 * x.alpha - 2.0 * delta <= 0.0 {
        entangled
    } else {
        entangled.max((1.0 - delta) / 2.0)
    }
}

/// ⟨ψ⁻|(1 ⊗ U)ρ(1 ⊗ U†)|ψ⁻⟩ for U = exp(iμ n·σ).
pub fn singlet_overlap(rho: &ComplexMatrix, mu: f64, theta: f64, phi: f64) -> f64 {
    let u = qubit_rotation(mu, theta, phi);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [ZERO, Complex64::new(s, 0.0), Complex64::new(-s, 0.0), ZERO];
    // (1 ⊗ U†)|ψ⁻⟩
    let v = kron(&ComplexMatrix::identity(2), &u.adjoint()).matvec(&psi);
    let rv = rho.matvec(&v);
    v.iter()
        .zip(&rv)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .re
}

/// Singlet fraction by maximizing over local unitaries on qubit B: a
/// 40×20×20 grid over (μ, θ, φ) followed by simplex refinement of the best cells.
pub fn singlet_fraction_general(rho: &TwoQubitState) -> f64 {
    let m = rho.matrix();
    let (nm, nt, np) = (40usize, 20usize, 20usize);
    let mut samples = Vec::with_capacity(nm * nt * np);
    for i in 0..nm {
        let mu = PI * i as f64 / (nm - 1) as f64;
        for j in 0..nt {
            let theta = PI * j as f64 / (nt - 1) as f64;
            for k in 0..np {
                let phi = 2.0 * PI * k as f64 / np as f64;
                samples.push((singlet_overlap(m, mu, theta, phi), [mu, theta, phi]));
            }
        }
    }
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = samples[0].0;
    let opts = NelderMeadOptions {
        max_evals: 2000,
        x_tol: 1e-11,
        f_tol: 1e-15,
    };
    for (_, start) in samples.iter().take(6) {
        let r = nelder_mead(|p| -singlet_overlap(m, p[0], p[1], p[2]), start, 0.1, opts);
        best = best.max(-r.value);
    }
    best
}

/// Pauli correlation matrix T_ij = Tr(ρ σ_i ⊗ σ_j).
pub fn correlation_matrix(rho: &TwoQubitState) -> [[f64; 3]; 3] {
    let s = pauli();
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = (rho.matrix() * &kron(&s[i], &s[j])).trace().re;
        }
    }
    t
}

/// Maximal CHSH value 2√(λ1 + λ2) from the two largest eigenvalues of TᵀT.
pub fn chsh_max(rho: &TwoQubitState) -> f64 {
    let t = correlation_matrix(rho);
    let mut tt = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tt[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let ev = hermitian_eigenvalues(&ComplexMatrix::from_real_rows(&tt)).expect("TᵀT is symmetric");
    2.0 * (ev[0] + ev[1]).max(0.0).sqrt()
}

/// Closed-form CHSH maximum for a canonical X-state.
pub fn chsh_x(x: &XState) -> f64 {
    let a2 = 4.0 * x.alpha * x.alpha;
    let d2 = (2.0 * x.delta() - 1.0).powi(2);
    2.0 * (2.0 * a2 + d2 - a2.min(d2)).max(0.0).sqrt()
}

/// Sufficient conditions for trivial teleportation and CHSH statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoGoPredicates {
    /// α + Δ/2 ≤ 1/2: no teleportation advantage.
    pub telecond2: bool,
    /// Δ ≤ 1/2, which implies `telecond2`.
    pub telecond: bool,
    /// 8α² + (2Δ − 1)² ≤ 1: no CHSH violation.
    pub chshcond: bool,
    /// Δ ≤ 1/2, which implies `chshcond`.
    pub chshcond2: bool,
}

pub fn no_go_predicates(x: &XState) -> NoGoPredicates {
    let delta = x.delta();
    let s = 8.0 * x.alpha * x.alpha + (2.0 * delta - 1.0).powi(2);
    NoGoPredicates {
        telecond2: x.alpha + delta / 2.0 <= 0.5 + THRESHOLD_TOL,
        telecond: delta <= 0.5 + THRESHOLD_TOL,
        chshcond: s <= 1.0 + THRESHOLD_TOL,
        chshcond2: delta <= 0.5 + THRESHOLD_TOL,
    }
}

/// S = 8α² + (2Δ − 1)²; CHSH ≤ 2 whenever S ≤ 1.
pub fn chsh_s(x: &XState) -> f64 {
    8.0 * x.alpha * x.alpha + (2.0 * x.delta() - 1.0).powi(2)
}

/// Concurrence of a canonical X-state with coherence only between |01⟩ and |10⟩.
pub fn concurrence_x(x: &XState) -> f64 {
    (2.0 * (x.alpha - (x.a1.max(0.0) * x.a4().max(0.0)).sqrt())).max(0.0)
}

/// Wootters concurrence of an arbitrary two-qubit state.
pub fn concurrence(rho: &TwoQubitState) -> f64 {
    let m = rho.matrix();
    let [_, sy, _] = pauli();
    let yy = kron(&sy, &sy);
    let tilde = &(&yy * &m.conj()) * &yy;
    let sqrt_rho = psd_sqrt(m);
    let r = &(&sqrt_rho * &tilde) * &sqrt_rho;
    let r = (&r + &r.adjoint()).scale_real(0.5);
    let ev: Vec<f64> = hermitian_eigenvalues(&r)
        .expect("Hermitian by construction")
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    (ev[0] - ev[1] - ev[2] - ev[3]).max(0.0)
}

fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eigen(m).expect("density matrices are Hermitian");
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for (l, v) in eig.values.iter().zip(&eig.vectors) {
        let w = ComplexMatrix::outer(v, v).scale_real(l.max(0.0).sqrt());
        out = &out + &w;
    }
    out
}

/// Tr(ρ²)
pub fn purity(rho: &TwoQubitState) -> f64 {
    (rho.matrix() * rho.matrix()).trace().re
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonclassicalityReport {
    pub singlet_fraction: f64,
    pub teleport_useful: bool,
    pub chsh: f64,
    pub chsh_violating: bool,
    pub concurrence: f64,
    pub purity: f64,
}

impl NonclassicalityReport {
    /// Closed forms are used for X-states, numeric maximization otherwise.
    pub fn of_state(rho: &TwoQubitState) -> Self {
        match canonicalize_x_state(rho) {
            Ok(x) => Self::from_parts(
                singlet_fraction_x(&x),
                chsh_x(&x),
                concurrence_x(&x),
                purity(rho),
            ),
            Err(_) => Self::from_parts(
                singlet_fraction_general(rho),
                chsh_max(rho),
                concurrence(rho),
                purity(rho),
            ),
        }
    }

    pub fn of_x_state(x: &XState) -> Self {
        let p = x.diagonal().iter().map(|a| a * a).sum::<f64>() + 2.0 * x.alpha * x.alpha;
        Self::from_parts(singlet_fraction_x(x), chsh_x(x), concurrence_x(x), p)
    }

    fn from_parts(f: f64, chsh: f64, c: f64, purity: f64) -> Self {
        Self {
            singlet_fraction: f,
            teleport_useful: f > 0.5 + THRESHOLD_TOL,
            chsh,
            chsh_violating: chsh > 2.0 + THRESHOLD_TOL,
            concurrence: c,
            purity,
        }
    }
}

/// Tsirelson's bound.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, re};
    use crate::machine::{steady_state_analytic, AnalyticModel, MachineParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_x(rng: &mut impl Rng) -> XState {
        let w: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0f64)).collect();
        let s: f64 = w.iter().sum();
        let (a1, a2, a3) = (w[0] / s, w[1] / s, w[2] / s);
        let alpha = rng.gen_range(0.0..1.0) * (a2 * a3).sqrt();
        XState::new(a1, a2, a3, alpha).unwrap()
    }

    fn random_unitary(rng: &mut impl Rng) -> ComplexMatrix {
        let u = qubit_rotation(
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..2.0 * PI),
        );
        let phase = c(0.0, rng.gen_range(0.0..2.0 * PI)).exp();
        u.scale(phase)
    }

    fn random_state(rng: &mut impl Rng) -> TwoQubitState {
        let data = (0..16)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let a = ComplexMatrix::from_vec(4, 4, data).unwrap();
        TwoQubitState::from_unnormalized(&a * &a.adjoint()).unwrap()
    }

    #[test]
    fn singlet_fraction_examples() {
        let g = (5f64.sqrt() - 1.0) / 4.0;
        let x = steady_state_analytic(
            AnalyticModel::FermionInversion,
            &MachineParams::inversion(g, 1.0, 1.0),
        )
        .unwrap();
        assert!((singlet_fraction_x(&x) - (3.0 + 5f64.sqrt()) / 8.0).abs() < 1e-12);
        assert!((singlet_fraction_x(&XState::singlet()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singlet_fraction_matches_grid_oracle() {
        // 21³ grid containing the boundary angles 0 and π/2
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let x = random_x(&mut rng);
            let m = x.to_matrix();
            let mut grid_max = f64::MIN;
            for i in 0..=20 {
                for j in 0..=20 {
                    for k in 0..=20 {
                        let v = singlet_overlap(
                            &m,
                            PI * i as f64 / 20.0,
                            PI * j as f64 / 20.0,
                            2.0 * PI * k as f64 / 20.0,
                        );
                        grid_max = grid_max.max(v);
                    }
                }
            }
            let f = singlet_fraction_x(&x);
            assert!((f - grid_max).abs() < 1e-8, "{x:?}: {f} vs {grid_max}");
        }
    }

    #[test]
    fn general_singlet_fraction() {
        assert!((singlet_fraction_general(&TwoQubitState::singlet()) - 1.0).abs() < 1e-9);
        assert!((singlet_fraction_general(&TwoQubitState::maximally_mixed()) - 0.25).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let x = random_x(&mut rng);
            let f = singlet_fraction_general(&x.to_state().unwrap());
            assert!((f - singlet_fraction_x(&x)).abs() < 1e-6);
        }
    }

    #[test]
    fn chsh_examples() {
        assert!((chsh_max(&TwoQubitState::singlet()) - TSIRELSON).abs() < 1e-12);
        assert!(chsh_max(&TwoQubitState::maximally_mixed()).abs() < 1e-12);
        // Δ = 1: T = diag(−1/2, −1/2, −1)
        let x = XState::new(0.0, 0.5, 0.5, 0.25).unwrap();
        assert!((chsh_x(&x) - 5f64.sqrt()).abs() < 1e-12);
        assert!((chsh_max(&x.to_state().unwrap()) - 5f64.sqrt()).abs() < 1e-12);
        // Δ = 1/2: T = diag(−1/2, −1/2, 0)
        let x = XState::new(0.25, 0.25, 0.25, 0.25).unwrap();
        assert!((chsh_x(&x) - SQRT_2).abs() < 1e-12);
        assert!((chsh_max(&x.to_state().unwrap()) - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn chsh_closed_form_matches_horodecki() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let x = random_x(&mut rng);
            assert!((chsh_x(&x) - chsh_max(&x.to_state().unwrap())).abs() < 1e-9);
        }
    }

    #[test]
    fn predicates() {
        let p = no_go_predicates(&XState::singlet());
        assert!(!p.telecond && !p.telecond2 && !p.chshcond && !p.chshcond2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let x = random_x(&mut rng);
            let p = no_go_predicates(&x);
            if p.telecond {
                assert!(p.telecond2 && singlet_fraction_x(&x) <= 0.5 + 1e-12);
            }
            if p.chshcond2 {
                assert!(p.chshcond && chsh_x(&x) <= 2.0 + 1e-9);
            }
            if p.chshcond {
                assert!(chsh_x(&x) <= 2.0 + 1e-9);
            }
        }
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence_x(&XState::singlet()) - 1.0).abs() < 1e-15);
        assert_eq!(
            concurrence_x(&XState::new(0.25, 0.25, 0.25, 0.0).unwrap()),
            0.0
        );
        assert!((concurrence(&TwoQubitState::singlet()) - 1.0).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let x = random_x(&mut rng);
            assert!((concurrence(&x.to_state().unwrap()) - concurrence_x(&x)).abs() < 1e-7);
        }
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&TwoQubitState::maximally_mixed()) - 0.25).abs() < 1e-15);
        assert!((purity(&TwoQubitState::singlet()) - 1.0).abs() < 1e-15);
        let g = 1e-3;
        let x = steady_state_analytic(
            AnalyticModel::FermionInversion,
            &MachineParams::inversion(g, 1.0, 1.0),
        )
        .unwrap();
        let mixedness = 1.0 - purity(&x.to_state().unwrap());
        assert!((mixedness - 4e-6).abs() < 0.4e-6, "{mixedness}");
        let r = NonclassicalityReport::of_x_state(&x);
        assert!((r.purity - purity(&x.to_state().unwrap())).abs() < 1e-14);
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for k in 0..50 {
            let rho = if k % 2 == 0 {
                random_x(&mut rng).to_state().unwrap()
            } else {
                random_state(&mut rng)
            };
            let u = kron(&random_unitary(&mut rng), &random_unitary(&mut rng));
            let rotated = TwoQubitState::new(&(&u * rho.matrix()) * &u.adjoint()).unwrap();
            assert!((chsh_max(&rho) - chsh_max(&rotated)).abs() < 1e-9);
            assert!((purity(&rho) - purity(&rotated)).abs() < 1e-9);
            assert!((concurrence(&rho) - concurrence(&rotated)).abs() < 1e-7);
            if k < 10 {
                let (a, b) = (
                    singlet_fraction_general(&rho),
                    singlet_fraction_general(&rotated),
                );
                assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn report_flags() {
        let r = NonclassicalityReport::of_state(&TwoQubitState::singlet());
        assert!(r.teleport_useful && r.chsh_violating);
        assert!(r.chsh <= TSIRELSON + 1e-9);
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        m[(0, 3)] = re(0.1);
        m[(3, 0)] = re(0.1);
        let r = NonclassicalityReport::of_state(&TwoQubitState::new(m).unwrap());
        assert!(!r.teleport_useful && !r.chsh_violating);
    }
}

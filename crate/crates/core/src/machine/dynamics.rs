use crate::error::{Error, Result};
use crate::linalg::{kernel_dimension, kernel_vector, kron, re, ComplexMatrix, I};

use super::params::{BathKind, Charge, MachineParams, Temperature, U_INF_PROXY};
use super::state::TwoQubitState;

/// Qubit excitation energy; everything is measured in units of it.
pub const E: f64 = 1.0;

/// Mean occupation of a bath mode at energy `eps`.
pub fn occupation(bath: BathKind, eps: f64, t: Temperature) -> Result<f64> {
    match bath {
        BathKind::Bosonic => match t {
            Temperature::ZeroPlus => Ok(0.0),
            Temperature::Finite(t) if t > 0.0 => Ok(1.0 / (eps / t).exp_m1()),
            Temperature::Infinite => Err(Error::InvalidTemperature {
                bath: "bosonic",
                reason: "occupation diverges at infinite temperature".into(),
            }),
            _ => Err(Error::InvalidTemperature {
                bath: "bosonic",
                reason: "temperature must be > 0".into(),
            }),
        },
        BathKind::Fermionic => Ok(match t {
            Temperature::ZeroPlus => 0.0,
            Temperature::ZeroMinus => 1.0,
            Temperature::Infinite => 0.5,
            Temperature::Finite(t) => fermi_dirac(eps / t),
        }),
    }
}

/// 1/(1 + e^x) without overflow.
fn fermi_dirac(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Fermionic occupation at energy E + u in the limit u → ∞ taken before any
/// temperature limit.
fn occupation_infinite_energy(t: Temperature) -> f64 {
    if t.is_negative() {
        1.0
    } else {
        0.0
    }
}

/// `(Γ⁺, Γ⁻)`: rates of gaining and losing an excitation.
pub fn rates(bath: BathKind, gamma: f64, eps: f64, t: Temperature) -> Result<(f64, f64)> {
    let n = occupation(bath, eps, t)?;
    Ok(rate_pair(bath, gamma, n))
}

fn rate_pair(bath: BathKind, gamma: f64, n: f64) -> (f64, f64) {
    match bath {
        BathKind::Bosonic => (gamma * n, gamma * (1.0 + n)),
        BathKind::Fermionic => (gamma * n, gamma * (1.0 - n)),
    }
}

/// H = diag(0, E, E, 2E + u) + g(|01⟩⟨10| + |10⟩⟨01|)
pub fn hamiltonian(p: &MachineParams) -> ComplexMatrix {
    let u = match p.charge() {
        Charge::None => 0.0,
        Charge::Finite(u) => u,
        Charge::Infinite => U_INF_PROXY,
    };
    let mut h = ComplexMatrix::diag_real(&[0.0, E, E, 2.0 * E + u]);
    h[(1, 2)] = re(p.g);
    h[(2, 1)] = re(p.g);
    h
}

/// Jump operators with their rates.
pub fn jump_operators(p: &MachineParams) -> Result<Vec<(ComplexMatrix, f64)>> {
    let ta = p.temperature_a();
    let tb = p.temperature_b();
    let mut jumps = Vec::new();
    if p.is_charged() {
        let na_hi = match p.charge() {
            Charge::Finite(u) => occupation(p.bath, E + u, ta)?,
            _ => occupation_infinite_energy(ta),
        };
        let nb_hi = match p.charge() {
            Charge::Finite(u) => occupation(p.bath, E + u, tb)?,
            _ => occupation_infinite_energy(tb),
        };
        let na = occupation(p.bath, E, ta)?;
        let nb = occupation(p.bath, E, tb)?;
        // J_A0 = |10⟩⟨00|, J_A1 = |11⟩⟨01|, J_B0 = |01⟩⟨00|, J_B1 = |11⟩⟨10|
        let channels = [
            ((2, 0), p.gamma_a, na),
            ((3, 1), p.gamma_a, na_hi),
            ((1, 0), p.gamma_b, nb),
            ((3, 2), p.gamma_b, nb_hi),
        ];
        for ((i, j), gamma, n) in channels {
            let (up, down) = rate_pair(p.bath, gamma, n);
            let jump = ComplexMatrix::ket_bra(4, i, j);
            jumps.push((jump.adjoint(), down));
            jumps.push((jump, up));
        }
    } else {
        let raise = ComplexMatrix::ket_bra(2, 1, 0);
        let id = ComplexMatrix::identity(2);
        let ja = kron(&raise, &id);
        let jb = kron(&id, &raise);
        for (jump, gamma, t) in [(ja, p.gamma_a, ta), (jb, p.gamma_b, tb)] {
            let (up, down) = rates(p.bath, gamma, E, t)?;
            jumps.push((jump.adjoint(), down));
            jumps.push((jump, up));
        }
    }
    Ok(jumps)
}

/// Superoperator acting on column-stacked ρ, using vec(AXB) = (Bᵀ ⊗ A) vec(X).
pub fn build_liouvillian(p: &MachineParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let h = hamiltonian(p);
    let id = ComplexMatrix::identity(4);
    let mut l = (&kron(&id, &h) - &kron(&h.transpose(), &id)).scale(-I);
    for (j, rate) in jump_operators(p)? {
        if rate == 0.0 {
            continue;
        }
        let jdj = &j.adjoint() * &j;
        let d = &(&kron(&j.conj(), &j) - &kron(&id, &jdj).scale_real(0.5))
            - &kron(&jdj.transpose(), &id).scale_real(0.5);
        l = &l + &d.scale_real(rate);
    }
    Ok(l)
}

fn devectorize_state(v: &[num_complex::Complex64], tol: f64) -> Result<TwoQubitState> {
    let m = ComplexMatrix::devectorize(v, 4)?;
    let m = (&m + &m.adjoint()).scale_real(0.5);
    let tr = m.trace().re;
    if tr.abs() < 1e-300 {
        return Err(Error::InvalidState("kernel vector has zero trace".into()));
    }
    TwoQubitState::with_tolerance(m.scale_real(1.0 / tr), tol)
}

/// Unique steady state from the kernel of the Liouvillian.
pub fn steady_state_numeric(p: &MachineParams) -> Result<TwoQubitState> {
    let l = build_liouvillian(p)?;
    let dim = kernel_dimension(&l);
    if dim > 1 {
        return Err(Error::DegenerateKernel { dim });
    }
    let v = kernel_vector(&l)?;
    devectorize_state(&v, 1e-9)
}

/// Fixed-step fourth-order Runge–Kutta integration of vec(ρ̇) = L vec(ρ).
///
/// For a linear generator one RK4 step is the matrix polynomial
/// P = Σ_{k≤4} (hL)^k / k!, so n steps are applied as Pⁿ by repeated squaring.
pub fn time_evolve(p: &MachineParams, rho0: &TwoQubitState, t: f64) -> Result<TwoQubitState> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParams(format!(
            "evolution time must be finite and >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let l = build_liouvillian(p)?;
    let norm = l.inf_norm();
    if norm == 0.0 {
        return Ok(rho0.clone());
    }
    let h_max = 0.01 / norm;
    let steps = (t / h_max).ceil();
    if !steps.is_finite() || steps > 1e15 {
        return Err(Error::StepUnderflow(format!(
            "{steps:e} steps of size <= {h_max:e} required"
        )));
    }
    let steps = steps.max(1.0) as u64;
    let h = t / steps as f64;
    if h <= 0.0 {
        return Err(Error::StepUnderflow(format!("step size {h:e}")));
    }
    let step = rk4_step_matrix(&l, h);
    let propagator = matrix_power(&step, steps);
    let v = propagator.matvec(&rho0.matrix().vectorize());
    devectorize_state(&v, 1e-7)
}

fn rk4_step_matrix(l: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let n = l.rows();
    let hl = l.scale_real(h);
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=4 {
        term = (&term * &hl).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    sum
}

fn matrix_power(m: &ComplexMatrix, mut n: u64) -> ComplexMatrix {
    let mut result = ComplexMatrix::identity(m.rows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::params::Limit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn occupation_examples() {
        assert_eq!(
            occupation(BathKind::Fermionic, 1.0, Temperature::ZeroMinus).unwrap(),
            1.0
        );
        assert_eq!(
            occupation(BathKind::Fermionic, 1.0, Temperature::Infinite).unwrap(),
            0.5
        );
        assert!(matches!(
            occupation(BathKind::Bosonic, 1.0, Temperature::Finite(-1.0)),
            Err(Error::InvalidTemperature { .. })
        ));
        // no overflow deep in the tails
        assert_eq!(
            occupation(BathKind::Fermionic, 1.0, Temperature::Finite(1e-6)).unwrap(),
            0.0
        );
        assert_eq!(
            occupation(BathKind::Fermionic, 1.0, Temperature::Finite(-1e-6)).unwrap(),
            1.0
        );
        let n = occupation(BathKind::Bosonic, 1.0, Temperature::Finite(2.0)).unwrap();
        assert!((n - 1.0 / (0.5f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn rate_examples() {
        assert_eq!(
            rates(BathKind::Fermionic, 2.0, 1.0, Temperature::ZeroPlus).unwrap(),
            (0.0, 2.0)
        );
        assert_eq!(
            rates(BathKind::Fermionic, 2.0, 1.0, Temperature::ZeroMinus).unwrap(),
            (2.0, 0.0)
        );
        assert_eq!(
            rates(BathKind::Bosonic, 1.0, 1.0, Temperature::ZeroPlus).unwrap(),
            (0.0, 1.0)
        );
    }

    fn random_state(rng: &mut impl Rng) -> TwoQubitState {
        let data = (0..16)
            .map(|_| {
                num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .collect();
        let a = ComplexMatrix::from_vec(4, 4, data).unwrap();
        TwoQubitState::from_unnormalized(&a * &a.adjoint()).unwrap()
    }

    #[test]
    fn liouvillian_is_trace_annihilating_and_hermiticity_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let configs = [
            MachineParams::hot_cold(BathKind::Fermionic, 0.3, 1.0, 2.1),
            MachineParams::new(BathKind::Bosonic, 0.2, 0.7, 1.3, 1.5, 0.4),
            MachineParams::charged_cold_b(0.3, 1.0, 2.1, Temperature::Finite(0.7)),
            MachineParams::new(BathKind::Fermionic, 0.1, 1.0, 0.5, -0.4, 0.2).with_charge(3.0),
        ];
        for p in &configs {
            let l = build_liouvillian(p).unwrap();
            for _ in 0..20 {
                let rho = random_state(&mut rng);
                let d =
                    ComplexMatrix::devectorize(&l.matvec(&rho.matrix().vectorize()), 4).unwrap();
                assert!(d.trace().norm() <= 1e-10);
                assert!(d.is_hermitian(1e-12));
            }
        }
    }

    #[test]
    fn decoupled_qubits_thermalize_locally() {
        let p = MachineParams::hot_cold(BathKind::Fermionic, 0.0, 1.0, 1.0);
        let rho = steady_state_numeric(&p).unwrap();
        let expected = ComplexMatrix::diag_real(&[0.5, 0.0, 0.5, 0.0]);
        assert!(rho.matrix().approx_eq(&expected, 1e-10));

        let p = MachineParams::new(BathKind::Fermionic, 0.0, 1.0, 2.0, 1.5, 0.8);
        let na = occupation(BathKind::Fermionic, 1.0, Temperature::Finite(1.5)).unwrap();
        let nb = occupation(BathKind::Fermionic, 1.0, Temperature::Finite(0.8)).unwrap();
        let rho = steady_state_numeric(&p).unwrap();
        let expected = ComplexMatrix::diag_real(&[
            (1.0 - na) * (1.0 - nb),
            (1.0 - na) * nb,
            na * (1.0 - nb),
            na * nb,
        ]);
        assert!(rho.matrix().approx_eq(&expected, 1e-10));
    }

    #[test]
    fn steady_state_is_x_form() {
        let p = MachineParams::new(BathKind::Bosonic, 0.2, 0.7, 1.3, 1.5, 0.4);
        let rho = steady_state_numeric(&p).unwrap();
        assert!(rho.x_form_violation() < 1e-8);
        assert!(rho.matrix()[(1, 2)].norm() > 1e-3);
    }

    #[test]
    fn zero_time_is_identity() {
        let p = MachineParams::hot_cold(BathKind::Fermionic, 0.3, 1.0, 2.1);
        let rho = TwoQubitState::singlet();
        assert_eq!(time_evolve(&p, &rho, 0.0).unwrap(), rho);
    }

    #[test]
    fn pure_decay_of_qubit_b() {
        let p = MachineParams::new(BathKind::Fermionic, 0.0, 1.0, 1.0, 0.0, 0.0)
            .with_limit(Limit::TbZero);
        let rho0 = TwoQubitState::new(ComplexMatrix::ket_bra(4, 3, 3)).unwrap();
        let mut last = 1.0;
        for k in 1..=10 {
            let rho = time_evolve(&p, &rho0, 0.3 * k as f64).unwrap();
            let pops = rho.populations();
            let excited_b = pops[1] + pops[3];
            assert!(excited_b < last);
            assert!((excited_b - (-0.3 * k as f64).exp()).abs() < 1e-8);
            last = excited_b;
        }
    }
}

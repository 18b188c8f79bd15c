//! Local-hidden-state models for two-outcome assemblages and the isotropic
//! noise needed to reach one.
//!
//! Every 2×2 Hermitian block σ = (t·I + v·σ⃗)/2 is stored by its coordinates
//! (t, v) = (Tr σ, Tr σσ_x, Tr σσ_y, Tr σσ_z), in which positivity is the
//! second-order cone t ≥ ‖v‖. The program
//!
//! ```text
//!   minimize q ≥ 0 over σ̄_λ ⪰ 0
//!   subject to Σ_λ D(0|x,λ) σ̄_λ = (1 − q)σ_{0|x} + q·I/4   for every x,
//!              Σ_λ σ̄_λ          = (1 − q)ρ_B     + q·I/2,
//! ```
//!
//! returns the smallest noise rate q* at which the noisy assemblage admits a
//! model; the outcome-1 constraints follow from the marginal.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, partial_transpose_b, pauli, re, ComplexMatrix};
use crate::machine::TwoQubitState;

use super::assemblage::{assemblage, Assemblage};
use super::colgen::PauliFunctional;
use super::measurements::{
    dodecahedron_measurements, fibonacci_sphere, icosahedron_measurements,
    octahedron_measurements, spiral_measurements, MeasurementSet,
};
use super::socp::{ConeBlock, ConeProgram, SolverOptions};
use super::strategies::{deterministic_strategies, StrategyTable};

/// q* at or below this counts as zero.
pub const Q_ZERO_TOL: f64 = 1e-8;

/// Minimal violation carried by a steering witness.
pub const WITNESS_MARGIN: f64 = 1e-8;

/// Bisection tolerance for the fallback search on q.
pub const BISECTION_TOL: f64 = 1e-4;

/// Up to this many settings the program runs over the full strategy table;
/// beyond it strategies are generated as the dual asks for them.
pub const ENUMERATION_MAX_SETTINGS: usize = 13;

const PRICING_TOL: f64 = 1e-9;
const COLUMNS_PER_ROUND: usize = 64;
const MAX_ROUNDS: usize = 200;
const SEED_DIRECTIONS: usize = 64;

fn coords(h: &ComplexMatrix) -> [f64; 4] {
    let [sx, sy, sz] = pauli();
    [
        h.trace().re,
        (h * &sx).trace().re,
        (h * &sy).trace().re,
        (h * &sz).trace().re,
    ]
}

/// (t·I + v·σ⃗)/2
fn from_coords(v: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        [re(0.5 * (v[0] + v[3])), c(0.5 * v[1], -0.5 * v[2])],
        [c(0.5 * v[1], 0.5 * v[2]), re(0.5 * (v[0] - v[3]))],
    ])
}

/// y₀·I + y⃗·σ⃗, so that Tr(G(y)σ) = y·coords(σ).
fn dual_operator(y: &[f64]) -> ComplexMatrix {
    from_coords(&[2.0 * y[0], 2.0 * y[1], 2.0 * y[2], 2.0 * y[3]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LhsVerdict {
    Feasible,
    Infeasible,
}

/// Linear functional β(σ) = Σ_x Tr(F_x σ_{0|x}) + Tr(F_B Σ_a σ_{a|x}) that is
/// ≤ 0 on every assemblage with a local-hidden-state model.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringWitness {
    pub f: Vec<ComplexMatrix>,
    pub f_marginal: ComplexMatrix,
    /// β evaluated on the certified assemblage.
    pub margin: f64,
}

impl SteeringWitness {
    pub fn evaluate(&self, asm: &Assemblage) -> f64 {
        let mut v = (&self.f_marginal * &asm.marginal()).trace().re;
        for (x, fx) in self.f.iter().enumerate() {
            v += (fx * asm.get(0, x)).trace().re;
        }
        v
    }

    /// Smallest eigenvalue over λ of −(Σ_{x: λ(x)=0} F_x + F_B); nonnegative
    /// exactly when β ≤ 0 on all local-hidden-state assemblages.
    pub fn lhs_bound_slack(&self, strategies: &StrategyTable) -> f64 {
        let mut worst = f64::INFINITY;
        for l in 0..strategies.len() {
            let mut w = self.f_marginal.clone();
            for (x, fx) in self.f.iter().enumerate() {
                if strategies.response(l, x) == 0 {
                    w = &w + fx;
                }
            }
            let ev = hermitian_eigenvalues(&w.scale_real(-1.0)).expect("Hermitian");
            worst = worst.min(*ev.last().unwrap());
        }
        worst
    }

    /// [`Self::lhs_bound_slack`] over all 2^n strategies, found without listing them.
    pub fn lhs_bound_slack_all(&self) -> f64 {
        let split = |h: &ComplexMatrix| {
            let v = coords(h);
            (0.5 * v[0], [0.5 * v[1], 0.5 * v[2], 0.5 * v[3]])
        };
        let (f0, f) = self.f.iter().map(split).unzip();
        let (b0, b) = split(&self.f_marginal);
        -PauliFunctional { f0, f, b0, b }.max_value()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhsCertificate {
    pub verdict: LhsVerdict,
    /// Strategies the program ran over: all of them, or those generated.
    pub strategies: StrategyTable,
    /// σ̄_λ indexed like `strategies` (Feasible only).
    pub states: Option<Vec<ComplexMatrix>>,
    pub dual: Option<SteeringWitness>,
    /// Noise rate returned by the conic program.
    pub q_star: f64,
    /// max_{a,x} ‖Σ_λ D(a|x,λ)σ̄_λ − σ_{a|x}‖ for Feasible models.
    pub residual: f64,
}

struct LhsOutcome {
    q_star: f64,
    states: Vec<ComplexMatrix>,
    y: Vec<f64>,
}

fn solve_noise_program(asm: &Assemblage, strategies: &StrategyTable) -> Result<LhsOutcome> {
    let n = asm.settings();
    let rows = 4 * (n + 1);
    let mut b = Vec::with_capacity(rows);
    let quarter = ComplexMatrix::identity(2).scale_real(0.25);
    let mut q_entries = Vec::with_capacity(rows);
    for x in 0..n {
        let s = coords(asm.get(0, x));
        let shift = coords(&(asm.get(0, x) - &quarter));
        for i in 0..4 {
            b.push(s[i]);
            q_entries.push((4 * x + i, 0, shift[i]));
        }
    }
    let rho_b = asm.marginal();
    let s = coords(&rho_b);
    let shift = coords(&(&rho_b - &quarter.scale_real(2.0)));
    for i in 0..4 {
        b.push(s[i]);
        q_entries.push((4 * n + i, 0, shift[i]));
    }
    q_entries.retain(|e| e.2 != 0.0);

    let mut blocks: Vec<ConeBlock> = (0..strategies.len())
        .map(|l| {
            let mut entries = Vec::new();
            for x in 0..n {
                if strategies.response(l, x) == 0 {
                    entries.extend((0..4).map(|i| (4 * x + i, i, 1.0)));
                }
            }
            entries.extend((0..4).map(|i| (4 * n + i, i, 1.0)));
            ConeBlock {
                dim: 4,
                entries,
                c: vec![0.0; 4],
            }
        })
        .collect();
    blocks.push(ConeBlock {
        dim: 1,
        entries: q_entries,
        c: vec![1.0],
    });

    let program = ConeProgram { rows, b, blocks };
    let sol = program.solve(SolverOptions::default())?;
    let states = sol.x[..strategies.len()]
        .iter()
        .map(|v| from_coords(v))
        .collect();
    Ok(LhsOutcome {
        q_star: sol.x[strategies.len()][0],
        states,
        y: sol.y,
    })
}

fn functional_from_dual(y: &[f64], n: usize) -> PauliFunctional {
    let part = |x: usize| (y[4 * x], [y[4 * x + 1], y[4 * x + 2], y[4 * x + 3]]);
    let (f0, f) = (0..n).map(part).unzip();
    let (b0, b) = part(n);
    PauliFunctional { f0, f, b0, b }
}

/// Strategy answering 0 exactly on the marked settings.
fn strategy_row(in_s: &[bool]) -> Vec<u8> {
    in_s.iter().map(|&s| u8::from(!s)).collect()
}

/// Constant strategies plus splits of the settings by planes through the
/// Bloch vectors of σ_{0|x} − σ_{1|x}.
fn seed_strategies(asm: &Assemblage) -> Vec<Vec<u8>> {
    let n = asm.settings();
    let r: Vec<[f64; 4]> = (0..n)
        .map(|x| coords(&(asm.get(0, x) - asm.get(1, x))))
        .collect();
    let mut rows = vec![vec![0; n], vec![1; n]];
    for d in fibonacci_sphere(SEED_DIRECTIONS) {
        rows.push(
            r.iter()
                .map(|v| u8::from(v[1] * d[0] + v[2] * d[1] + v[3] * d[2] <= 0.0))
                .collect(),
        );
    }
    let mut seen = HashSet::new();
    rows.retain(|row| seen.insert(row.clone()));
    rows
}

/// The noise program over strategies added while some strategy violates the
/// dual constraint, found by exact pricing.
fn solve_generated(asm: &Assemblage) -> Result<(LhsOutcome, StrategyTable)> {
    let n = asm.settings();
    let mut strategies = StrategyTable {
        settings: n,
        outcomes: 2,
        table: seed_strategies(asm),
    };
    let mut known: HashSet<Vec<u8>> = strategies.table.iter().cloned().collect();
    let mut violation = f64::NAN;
    for _ in 0..MAX_ROUNDS {
        let out = solve_noise_program(asm, &strategies)?;
        let price = functional_from_dual(&out.y, n);
        let tol = PRICING_TOL * (1.0 + out.y.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let mut fresh: Vec<(f64, Vec<u8>)> = price
            .candidate_sets()
            .into_iter()
            .map(|s| (price.value(&s), strategy_row(&s)))
            .filter(|(v, row)| *v > tol && !known.contains(row))
            .collect();
        if fresh.is_empty() {
            return Ok((out, strategies));
        }
        fresh.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        violation = fresh[0].0;
        for (_, row) in fresh.into_iter().take(COLUMNS_PER_ROUND) {
            known.insert(row.clone());
            strategies.table.push(row);
        }
    }
    Err(Error::SolverStalled {
        iterations: MAX_ROUNDS,
        gap: violation,
        residual: f64::NAN,
    })
}

fn solve_for(asm: &Assemblage) -> Result<(LhsOutcome, StrategyTable)> {
    if asm.settings() > ENUMERATION_MAX_SETTINGS {
        return solve_generated(asm);
    }
    let strategies = deterministic_strategies(asm.settings(), 2)?;
    let out = solve_noise_program(asm, &strategies)?;
    Ok((out, strategies))
}

/// Decides whether `asm` has a local-hidden-state model.
///
/// Infeasible verdicts carry a witness that is exactly bounded on all local
/// models and violated by more than [`WITNESS_MARGIN`]; otherwise the model
/// found by the solver is returned with its reconstruction residual. Above
/// [`ENUMERATION_MAX_SETTINGS`] the model uses only generated strategies.
pub fn lhs_feasibility(asm: &Assemblage) -> Result<LhsCertificate> {
    let (out, strategies) = solve_for(asm)?;
    let n = asm.settings();

    if out.q_star > Q_ZERO_TOL {
        let f: Vec<ComplexMatrix> = (0..n)
            .map(|x| dual_operator(&out.y[4 * x..4 * x + 4]))
            .collect();
        let f_marginal = dual_operator(&out.y[4 * n..4 * n + 4]);
        let mut witness = SteeringWitness {
            f,
            f_marginal,
            margin: 0.0,
        };
        let slack = if n > ENUMERATION_MAX_SETTINGS {
            witness.lhs_bound_slack_all()
        } else {
            witness.lhs_bound_slack(&strategies)
        };
        if slack < 0.0 {
            // shift F_B by −δ·I to make the bound exact; costs δ·Tr ρ_B = δ
            witness.f_marginal =
                &witness.f_marginal - &ComplexMatrix::identity(2).scale_real(-slack);
        }
        witness.margin = witness.evaluate(asm);
        if witness.margin > WITNESS_MARGIN {
            return Ok(LhsCertificate {
                verdict: LhsVerdict::Infeasible,
                strategies,
                states: None,
                dual: Some(witness),
                q_star: out.q_star,
                residual: f64::NAN,
            });
        }
    }

    let mut residual = 0.0f64;
    for x in 0..n {
        for a in 0..2 {
            let mut sum = ComplexMatrix::zeros(2, 2);
            for (l, s) in out.states.iter().enumerate() {
                if strategies.response(l, x) == a {
                    sum = &sum + s;
                }
            }
            residual = residual.max(sum.max_abs_diff(asm.get(a, x)));
        }
    }
    Ok(LhsCertificate {
        verdict: LhsVerdict::Feasible,
        strategies,
        states: Some(out.states),
        dual: None,
        q_star: out.q_star.max(0.0),
        residual,
    })
}

/// Smallest isotropic noise rate q at which `rho` admits a local-hidden-state
/// model for the measurements `m`; zero if it already does.
pub fn noise_robustness(rho: &TwoQubitState, m: &MeasurementSet) -> Result<f64> {
    noise_robustness_of_assemblage(&assemblage(rho, m))
}

pub fn noise_robustness_of_assemblage(asm: &Assemblage) -> Result<f64> {
    match solve_for(asm) {
        Ok((out, _)) => Ok(if out.q_star <= Q_ZERO_TOL {
            0.0
        } else {
            out.q_star.min(1.0)
        }),
        Err(Error::SolverStalled { .. }) => noise_robustness_bisection(asm),
        Err(e) => Err(e),
    }
}

/// Bisection on q with [`lhs_feasibility`] as the oracle, to [`BISECTION_TOL`].
pub fn noise_robustness_bisection(asm: &Assemblage) -> Result<f64> {
    let feasible = |q: f64| -> Result<bool> {
        Ok(lhs_feasibility(&asm.with_white_noise(q))?.verdict == LhsVerdict::Feasible)
    };
    if feasible(0.0)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Steerability {
    Steerable,
    Unsteerable,
    Undecided,
}

/// Evidence behind a [`SteerVerdict`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SteerEvidence {
    /// No local model for this many settings; q* is the noise needed to reach one.
    FiniteSetInfeasible { settings: usize, q_star: f64 },
    /// Positive partial transpose: separable, hence unsteerable.
    PositivePartialTranspose { min_eigenvalue: f64 },
    /// Neither certificate applied within the budget.
    Inconclusive {
        settings_tried: Vec<usize>,
        solver_failures: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteerVerdict {
    pub verdict: Steerability,
    pub evidence: SteerEvidence,
}

/// Largest measurement set the classifier may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyBudget {
    pub max_settings: usize,
}

impl Default for ClassifyBudget {
    fn default() -> Self {
        Self { max_settings: 16 }
    }
}

/// Eigenvalues below this count as a failed partial-transpose test.
const PPT_TOL: f64 = 1e-12;
/// Partial transposes closer than this to singular are rechecked with the steering path.
const PPT_MARGIN: f64 = 1e-9;

/// Spiral set sizes tried after the polyhedral sets.
const SPIRAL_LADDER: [usize; 2] = [16, 24];

/// Measurement sets of growing size used by [`steerability_classify`].
pub fn classification_ladder(budget: ClassifyBudget) -> Vec<MeasurementSet> {
    let dodeca = dodecahedron_measurements();
    let mut ladder = vec![
        octahedron_measurements(),
        icosahedron_measurements(),
        dodeca.clone(),
        dodeca.union(&octahedron_measurements()),
    ];
    for n in SPIRAL_LADDER {
        ladder.push(spiral_measurements(n).expect("nonzero count"));
    }
    ladder.retain(|m| m.len() <= budget.max_settings);
    ladder
}

/// Steerable if some finite set within `budget` has no local model; Unsteerable
/// if the partial transpose is positive (two-qubit separability).
pub fn steerability_classify(rho: &TwoQubitState, budget: ClassifyBudget) -> SteerVerdict {
    let pt = partial_transpose_b(rho.matrix()).expect("4x4 state");
    let min_pt = *hermitian_eigenvalues(&pt)
        .expect("Hermitian")
        .last()
        .unwrap();
    let ppt = min_pt >= -PPT_TOL;
    if ppt && min_pt > PPT_MARGIN {
        return SteerVerdict {
            verdict: Steerability::Unsteerable,
            evidence: SteerEvidence::PositivePartialTranspose {
                min_eigenvalue: min_pt,
            },
        };
    }

    let mut tried = Vec::new();
    let mut failures = 0;
    let mut steering = None;
    for m in classification_ladder(budget) {
        tried.push(m.len());
        match lhs_feasibility(&assemblage(rho, &m)) {
            Ok(cert) if cert.verdict == LhsVerdict::Infeasible => {
                steering = Some(SteerEvidence::FiniteSetInfeasible {
                    settings: m.len(),
                    q_star: cert.q_star,
                });
                break;
            }
            Ok(_) => {}
            Err(_) => failures += 1,
        }
    }
    match (steering, ppt) {
        (Some(e), false) => SteerVerdict {
            verdict: Steerability::Steerable,
            evidence: e,
        },
        (None, true) => SteerVerdict {
            verdict: Steerability::Unsteerable,
            evidence: SteerEvidence::PositivePartialTranspose {
                min_eigenvalue: min_pt,
            },
        },
        _ => SteerVerdict {
            verdict: Steerability::Undecided,
            evidence: SteerEvidence::Inconclusive {
                settings_tried: tried,
                solver_failures: failures,
            },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_round_trip() {
        let h = from_coords(&[1.0, 0.2, -0.3, 0.4]);
        let back = coords(&h);
        for (a, b) in back.iter().zip([1.0, 0.2, -0.3, 0.4]) {
            assert!((a - b).abs() < 1e-15);
        }
        let y = [0.3, -0.1, 0.5, 0.2];
        let lhs = (&dual_operator(&y) * &h).trace().re;
        let rhs: f64 = y.iter().zip(&back).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_feasible() {
        let cert = lhs_feasibility(&assemblage(
            &TwoQubitState::maximally_mixed(),
            &dodecahedron_measurements(),
        ))
        .unwrap();
        assert_eq!(cert.verdict, LhsVerdict::Feasible);
        assert!(cert.residual < 1e-7);
        for s in cert.states.unwrap() {
            assert!(*hermitian_eigenvalues(&s).unwrap().last().unwrap() > -1e-9);
        }
    }

    #[test]
    fn singlet_is_infeasible_with_witness() {
        let m = dodecahedron_measurements();
        let asm = assemblage(&TwoQubitState::singlet(), &m);
        let cert = lhs_feasibility(&asm).unwrap();
        assert_eq!(cert.verdict, LhsVerdict::Infeasible);
        let w = cert.dual.unwrap();
        assert!(w.margin > WITNESS_MARGIN);
        assert!(w.lhs_bound_slack(&deterministic_strategies(10, 2).unwrap()) >= 0.0);
        assert!((w.evaluate(&asm) - w.margin).abs() < 1e-12);
    }

    #[test]
    fn generated_columns_match_enumeration() {
        let werner = |q: f64| {
            let m = &TwoQubitState::singlet().matrix().scale_real(1.0 - q)
                + &ComplexMatrix::identity(4).scale_real(q / 4.0);
            TwoQubitState::new(m).unwrap()
        };
        let mut tilted = ComplexMatrix::diag_real(&[0.05, 0.45, 0.3, 0.2]);
        tilted[(1, 2)] = re(-0.28);
        tilted[(2, 1)] = re(-0.28);
        let states = [werner(0.2), werner(0.5), TwoQubitState::new(tilted).unwrap()];
        let m = dodecahedron_measurements();
        for rho in &states {
            let asm = assemblage(rho, &m);
            let full = solve_noise_program(&asm, &deterministic_strategies(10, 2).unwrap())
                .unwrap()
                .q_star;
            let (gen, table) = solve_generated(&asm).unwrap();
            assert!((gen.q_star - full).abs() < 1e-6, "{} vs {full}", gen.q_star);
            assert!(table.len() < 1024);
        }
    }

    #[test]
    fn exact_slack_agrees_with_table() {
        let m = dodecahedron_measurements();
        let cert = lhs_feasibility(&assemblage(&TwoQubitState::singlet(), &m)).unwrap();
        let w = cert.dual.unwrap();
        let table = w.lhs_bound_slack(&deterministic_strategies(10, 2).unwrap());
        assert!((w.lhs_bound_slack_all() - table).abs() < 1e-12);
    }

    #[test]
    fn classify_extremes() {
        assert_eq!(
            steerability_classify(&TwoQubitState::singlet(), ClassifyBudget::default()).verdict,
            Steerability::Steerable
        );
        let prod = TwoQubitState::product(
            &ComplexMatrix::ket_bra(2, 0, 0),
            &ComplexMatrix::diag_real(&[0.3, 0.7]),
        )
        .unwrap();
        assert_eq!(
            steerability_classify(&prod, ClassifyBudget::default()).verdict,
            Steerability::Unsteerable
        );
    }
}

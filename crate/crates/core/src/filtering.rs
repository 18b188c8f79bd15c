//! Local filters diagonal in the energy basis, the heralded state they
//! produce, and searches for the best nonclassicality at a given heralding
//! efficiency.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix};
use crate::machine::{
    canonicalize_x_state, steady_state_analytic, steady_state_numeric, AnalyticModel, BathKind,
    Charge, Limit, MachineParams, Temperature, TwoQubitState, XState,
};
use crate::nonclassicality::{chsh_x, singlet_fraction_x};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::steering::{dodecahedron_measurements, noise_robustness};

/// Heralding efficiencies at or below this are treated as a failed filter.
pub const DEGENERATE_P_SUC: f64 = 1e-12;

/// Allowed |p_suc − p_target| relative to p_target.
pub const P_SUC_TOL: f64 = 1e-3;

/// Largest trace distance to a pure state accepted by [`pure_state_filter_target`].
pub const NEAR_PURE_DISTANCE: f64 = 0.1;

/// Kraus operators F_A = aA|0⟩⟨0| + bA|1⟩⟨1| and F_B = aB|0⟩⟨0| + bB|1⟩⟨1|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterPair {
    #[serde(rename = "aA")]
    pub a_a: f64,
    #[serde(rename = "bA")]
    pub b_a: f64,
    #[serde(rename = "aB")]
    pub a_b: f64,
    #[serde(rename = "bB")]
    pub b_b: f64,
}

impl FilterPair {
    pub fn new(a_a: f64, b_a: f64, a_b: f64, b_b: f64) -> Result<Self> {
        let f = Self { a_a, b_a, a_b, b_b };
        f.validate()?;
        Ok(f)
    }

    pub fn identity() -> Self {
        Self {
            a_a: 1.0,
            b_a: 1.0,
            a_b: 1.0,
            b_b: 1.0,
        }
    }

    /// Filter on qubit B only.
    pub fn on_b(a_b: f64, b_b: f64) -> Result<Self> {
        Self::new(1.0, 1.0, a_b, b_b)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("aA", self.a_a),
            ("bA", self.b_a),
            ("aB", self.a_b),
            ("bB", self.b_b),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidFilter(format!(
                    "{name} = {v} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn kraus_a(&self) -> ComplexMatrix {
        ComplexMatrix::diag_real(&[self.a_a, self.b_a])
    }

    pub fn kraus_b(&self) -> ComplexMatrix {
        ComplexMatrix::diag_real(&[self.a_b, self.b_b])
    }

    /// Factors multiplying the populations of |00⟩, |01⟩, |10⟩, |11⟩.
    fn population_factors(&self) -> [f64; 4] {
        let (a, b, c, d) = (
            self.a_a * self.a_a,
            self.b_a * self.b_a,
            self.a_b * self.a_b,
            self.b_b * self.b_b,
        );
        [a * c, a * d, b * c, b * d]
    }

    fn with_b_scaled(&self, c: f64) -> Self {
        Self {
            a_b: self.a_b * c,
            b_b: self.b_b * c,
            ..*self
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeraldResult {
    pub state: TwoQubitState,
    pub p_suc: f64,
}

/// ρ_herald = (F_A ⊗ F_B)ρ(F_A ⊗ F_B)† / p_suc.
pub fn apply_filters(rho: &TwoQubitState, f: &FilterPair) -> Result<HeraldResult> {
    f.validate()?;
    let k = kron(&f.kraus_a(), &f.kraus_b());
    let out = &(&k * rho.matrix()) * &k.adjoint();
    let p_suc = out.trace().re;
    if !(p_suc > DEGENERATE_P_SUC) {
        return Err(Error::DegenerateHerald { p_suc });
    }
    let state = TwoQubitState::new((&out + &out.adjoint()).scale_real(0.5 / p_suc))?;
    Ok(HeraldResult { state, p_suc })
}

/// [`apply_filters`] on a canonical X-state.
pub fn apply_filters_x(x: &XState, f: &FilterPair) -> Result<(XState, f64)> {
    f.validate()?;
    let w = f.population_factors();
    let d = x.diagonal();
    let p_suc: f64 = w.iter().zip(&d).map(|(a, b)| a * b).sum();
    if !(p_suc > DEGENERATE_P_SUC) {
        return Err(Error::DegenerateHerald { p_suc });
    }
    let coh = f.a_a * f.b_a * f.a_b * f.b_b;
    let out = XState::new(
        w[0] * d[0] / p_suc,
        w[1] * d[1] / p_suc,
        w[2] * d[2] / p_suc,
        coh * x.alpha / p_suc,
    )?;
    Ok((out, p_suc))
}

/// Splits a ratio r = b/a into a filter (a, b) with max(a, b) = 1.
fn split_ratio(r: f64) -> (f64, f64) {
    if r <= 1.0 {
        (1.0, r)
    } else {
        (1.0 / r, 1.0)
    }
}

/// Filters that equalize the Schmidt coefficients of the dominant eigenvector
/// of `x` and, among those, suppress the |00⟩ and |11⟩ admixture.
///
/// With ratios r_A = bA/aA and r_B = bB/aB the equalization fixes r_B/r_A and
/// the heralded overlap with the singlet is maximal at r_A·r_B = √(a1/a4).
pub fn pure_state_filter_target(x: &XState) -> Result<FilterPair> {
    x.validate()?;
    let (a1, a2, a3, a4) = (x.a1, x.a2, x.a3, x.a4());
    let half = (a2 - a3) / 2.0;
    let root = half.hypot(x.alpha);
    let lambda = (a2 + a3) / 2.0 + root;
    let not_near = Error::NotNearPure {
        tolerance: NEAR_PURE_DISTANCE,
    };
    // commuting case: the trace distance to the dominant eigenprojector is 1 − λ
    if lambda < a1.max(a4) || 1.0 - lambda > NEAR_PURE_DISTANCE || x.alpha <= 0.0 {
        return Err(not_near);
    }
    // |c10| / |c01| of the dominant eigenvector, in a cancellation-free form
    let k = if half >= 0.0 {
        x.alpha / (half + root)
    } else {
        (root - half) / x.alpha
    };
    if !(k.is_finite() && k > 0.0) {
        return Err(not_near);
    }
    let s = if a1 > 0.0 && a4 > 0.0 {
        (a1 / a4).sqrt()
    } else {
        k
    };
    let (r_a, r_b) = ((s / k).sqrt(), (s * k).sqrt());
    let (a_a, b_a) = split_ratio(r_a);
    let (a_b, b_b) = split_ratio(r_b);
    FilterPair::new(a_a, b_a, a_b, b_b)
}

/// Machines searched by [`optimize_tradeoff`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TradeoffModel {
    Analytic(AnalyticModel),
    /// Fermionic baths with finite charge u, fixed T_A and T_B → 0, solved numerically.
    FermionChargedFinite {
        u: f64,
        ta: Temperature,
    },
}

impl TradeoffModel {
    /// Finite charge with T_A set so that the excited-state occupation of the
    /// A bath at energy E equals `population`.
    pub fn charged_finite_population(u: f64, population: f64) -> Result<Self> {
        let ta = temperature_for_population(population)?;
        Ok(TradeoffModel::FermionChargedFinite { u, ta })
    }

    pub fn default_scope(&self) -> FilterScope {
        match self {
            TradeoffModel::Analytic(AnalyticModel::FermionInversion) => FilterScope::QubitBOnly,
            TradeoffModel::FermionChargedFinite { ta, .. } if ta.is_negative() => {
                FilterScope::QubitBOnly
            }
            _ => FilterScope::BothQubits,
        }
    }

    fn has_free_temperature(&self) -> bool {
        matches!(
            self,
            TradeoffModel::Analytic(
                AnalyticModel::BosonColdB | AnalyticModel::FermionChargedColdBUInf
            )
        )
    }

    /// Machine with γA = 1 at coupling `g`, γB and inverse temperature `beta` of bath A.
    pub fn params(&self, g: f64, gamma_b: f64, beta: f64) -> MachineParams {
        match *self {
            TradeoffModel::Analytic(AnalyticModel::FermionInversion) => {
                MachineParams::inversion(g, 1.0, gamma_b)
            }
            TradeoffModel::Analytic(AnalyticModel::FermionUnchargedHotColdLimit) => {
                MachineParams::hot_cold(BathKind::Fermionic, g, 1.0, gamma_b)
            }
            TradeoffModel::Analytic(AnalyticModel::FermionChargedColdBUInf) => {
                let ta = if beta <= BETA_ZERO {
                    Temperature::Infinite
                } else {
                    Temperature::Finite(1.0 / beta)
                };
                MachineParams::charged_cold_b(g, 1.0, gamma_b, ta)
            }
            TradeoffModel::Analytic(AnalyticModel::BosonColdB) => {
                MachineParams::new(BathKind::Bosonic, g, 1.0, gamma_b, 1.0 / beta, 0.0)
                    .with_limit(Limit::TbZero)
            }
            TradeoffModel::FermionChargedFinite { u, ta } => {
                let p = MachineParams::new(BathKind::Fermionic, g, 1.0, gamma_b, 0.0, 0.0)
                    .with_charge(u)
                    .with_limit(Limit::TbZero);
                match ta {
                    Temperature::Finite(t) => MachineParams { ta: t, ..p },
                    Temperature::Infinite => p.with_limit(Limit::TaInf),
                    Temperature::ZeroMinus => p.with_limit(Limit::TaZeroMinus),
                    Temperature::ZeroPlus => p,
                }
            }
        }
    }

    pub fn steady_state(&self, p: &MachineParams) -> Result<XState> {
        match self {
            TradeoffModel::Analytic(m) => steady_state_analytic(*m, p),
            TradeoffModel::FermionChargedFinite { .. } => {
                canonicalize_x_state(&steady_state_numeric(p)?)
            }
        }
    }
}

/// Inverse temperatures at or below this stand for T_A = ∞.
const BETA_ZERO: f64 = 1e-9;

/// T with 1/(e^{E/T} + 1) = population, E = 1.
pub fn temperature_for_population(population: f64) -> Result<Temperature> {
    if !(0.0..=1.0).contains(&population) {
        return Err(Error::InvalidParams(format!(
            "population must lie in [0, 1], got {population}"
        )));
    }
    Ok(if population == 1.0 {
        Temperature::ZeroMinus
    } else if population == 0.0 {
        Temperature::ZeroPlus
    } else if population == 0.5 {
        Temperature::Infinite
    } else {
        Temperature::Finite(1.0 / ((1.0 - population) / population).ln())
    })
}

/// `0+`, `0-`, `inf` or the finite value.
pub fn temperature_label(t: Temperature) -> String {
    match t {
        Temperature::Finite(v) => format!("{v}"),
        Temperature::ZeroPlus => "0+".into(),
        Temperature::ZeroMinus => "0-".into(),
        Temperature::Infinite => "inf".into(),
    }
}

/// Inverse of [`temperature_label`]; plain `0` is the limit `0+`.
pub fn parse_temperature(s: &str) -> Result<Temperature> {
    match s {
        "0+" | "0" => Ok(Temperature::ZeroPlus),
        "0-" | "-0" => Ok(Temperature::ZeroMinus),
        "inf" | "+inf" | "-inf" => Ok(Temperature::Infinite),
        _ => s
            .parse::<f64>()
            .map(Temperature::from_value)
            .map_err(|_| Error::InvalidParams(format!("cannot read temperature '{s}'"))),
    }
}

impl fmt::Display for TradeoffModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TradeoffModel::Analytic(m) => write!(f, "{m}"),
            TradeoffModel::FermionChargedFinite { u, ta } => {
                write!(
                    f,
                    "FermionChargedFinite(u={u},TA={})",
                    temperature_label(*ta)
                )
            }
        }
    }
}

/// Accepts analytic model names and `FermionChargedFinite(u=20,TA=-0.5)` or
/// `FermionChargedFinite(u=20,population=0.88)`.
impl FromStr for TradeoffModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(args) = s.strip_prefix("FermionChargedFinite") else {
            return s.parse().map(TradeoffModel::Analytic);
        };
        let bad = || Error::InvalidParams(format!("cannot read model '{s}'"));
        let args = args
            .trim()
            .strip_prefix('(')
            .and_then(|a| a.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (mut u, mut ta) = (None, None);
        for kv in args.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            let v = v.trim();
            match k.trim() {
                "u" => u = Some(v.parse::<f64>().map_err(|_| bad())?),
                "TA" => ta = Some(parse_temperature(v)?),
                "population" => {
                    ta = Some(temperature_for_population(v.parse().map_err(|_| bad())?)?)
                }
                _ => return Err(bad()),
            }
        }
        let u = u.ok_or_else(bad)?;
        if !(u.is_finite() && u > 0.0) {
            return Err(Error::InvalidParams(format!(
                "charge must be finite and > 0, got {u}"
            )));
        }
        Ok(TradeoffModel::FermionChargedFinite {
            u,
            ta: ta.ok_or_else(bad)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    SingletFraction,
    Chsh,
    /// Dodecahedral isotropic-noise robustness of the state that is optimal for teleportation.
    SteeringRobustness,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::SingletFraction => "SingletFraction",
            Objective::Chsh => "Chsh",
            Objective::SteeringRobustness => "SteeringRobustness",
        }
    }

    /// Value that separates classical from nonclassical states.
    pub fn classical_threshold(self) -> f64 {
        match self {
            Objective::SingletFraction => 0.5,
            Objective::Chsh => 2.0,
            Objective::SteeringRobustness => 0.0,
        }
    }

    /// Value maximized during the search. For the singlet fraction this is
    /// the overlap α + Δ/2 with the singlet, which equals the singlet fraction
    /// wherever the latter exceeds 1/2 and keeps a slope where it does not.
    fn search_value(self, x: &XState) -> f64 {
        match self {
            Objective::Chsh => chsh_x(x),
            Objective::SingletFraction | Objective::SteeringRobustness => x.alpha + x.delta() / 2.0,
        }
    }

    fn value(self, x: &XState) -> f64 {
        match self {
            Objective::Chsh => chsh_x(x),
            Objective::SingletFraction | Objective::SteeringRobustness => singlet_fraction_x(x),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "singletfraction" | "f" | "teleportation" => Ok(Objective::SingletFraction),
            "chsh" => Ok(Objective::Chsh),
            "steeringrobustness" | "steering" | "q" => Ok(Objective::SteeringRobustness),
            _ => Err(Error::InvalidParams(format!("unknown objective '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterScope {
    BothQubits,
    QubitBOnly,
}

impl FromStr for FilterScope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "both" | "bothqubits" => Ok(FilterScope::BothQubits),
            "b" | "bonly" | "qubitbonly" => Ok(FilterScope::QubitBOnly),
            _ => Err(Error::InvalidParams(format!("unknown filter scope '{s}'"))),
        }
    }
}

/// Search effort. Results are deterministic for a given value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TradeoffOptions {
    pub seed: u64,
    /// Random points evaluated before local refinement.
    pub samples: usize,
    /// Best samples refined by the simplex search.
    pub restarts: usize,
    pub max_evals: usize,
}

impl Default for TradeoffOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            samples: 512,
            restarts: 32,
            max_evals: 1500,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffPoint {
    pub p_target: f64,
    pub objective: Objective,
    pub value: f64,
    pub p_suc: f64,
    pub params: MachineParams,
    pub filter: FilterPair,
    pub seed: u64,
    /// Taken over from a larger efficiency by the monotone envelope.
    pub smoothed: bool,
}

impl TradeoffPoint {
    pub const CSV_HEADER: [&'static str; 13] = [
        "p_target",
        "objective",
        "value",
        "g",
        "gammaA",
        "gammaB",
        "TA",
        "u",
        "aA",
        "bA",
        "aB",
        "bB",
        "seed",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        let p = &self.params;
        let u = match p.charge() {
            Charge::Infinite => "inf".to_string(),
            _ => format!("{}", p.u),
        };
        let f = &self.filter;
        vec![
            format!("{}", self.p_target),
            self.objective.name().to_string(),
            format!("{}", self.value),
            format!("{}", p.g),
            format!("{}", p.gamma_a),
            format!("{}", p.gamma_b),
            temperature_label(p.temperature_a()),
            u,
            format!("{}", f.a_a),
            format!("{}", f.b_a),
            format!("{}", f.a_b),
            format!("{}", f.b_b),
            self.seed.to_string(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffCurve {
    pub model: TradeoffModel,
    pub objective: Objective,
    pub scope: FilterScope,
    pub points: Vec<TradeoffPoint>,
    /// Whether the raw optimum increased with efficiency anywhere.
    pub smoothed: bool,
}

/// Coordinates of the search space, each mapped from ℝ onto a box.
struct SearchSpace {
    model: TradeoffModel,
    scope: FilterScope,
    p_target: f64,
}

const LOG_GAMMA_B: (f64, f64) = (-4.605170185988091, 2.995732273553991); // ln 0.01, ln 20
const LOG_G_MIN: f64 = -9.210340371976182; // ln 1e-4
const LOG_RATIO: f64 = 20.0;

fn squash(z: f64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) / (1.0 + (-z).exp())
}

/// One evaluated candidate.
struct Candidate {
    value: f64,
    params: MachineParams,
    filter: FilterPair,
    state: XState,
    p_suc: f64,
}

impl SearchSpace {
    fn dim(&self) -> usize {
        let mut d = 3; // log γB, log g, log r_B
        if self.model.has_free_temperature() {
            d += 1;
        }
        if self.scope == FilterScope::BothQubits {
            d += 1;
        }
        d
    }

    fn decode(&self, z: &[f64]) -> (MachineParams, f64, f64) {
        let gamma_b = squash(z[0], LOG_GAMMA_B.0, LOG_GAMMA_B.1).exp();
        let g = squash(z[1], LOG_G_MIN, (2.0 * gamma_b.max(1.0)).ln()).exp();
        let mut i = 2;
        let beta = match self.model {
            TradeoffModel::Analytic(AnalyticModel::BosonColdB) => {
                i += 1;
                squash(z[2], 0.01, 20.0)
            }
            TradeoffModel::Analytic(AnalyticModel::FermionChargedColdBUInf) => {
                i += 1;
                squash(z[2], 0.0, 20.0)
            }
            _ => 0.0,
        };
        let log_ra = if self.scope == FilterScope::BothQubits {
            i += 1;
            squash(z[i - 1], -LOG_RATIO, LOG_RATIO)
        } else {
            0.0
        };
        let log_rb = squash(z[i], -LOG_RATIO, LOG_RATIO);
        (self.model.params(g, gamma_b, beta), log_ra, log_rb)
    }

    /// Heralded state for the decoded point. The ratio on B is clamped into
    /// the interval where the target efficiency is reachable; Err carries the
    /// shortfall when no ratio reaches it.
    fn candidate(&self, z: &[f64]) -> std::result::Result<Candidate, f64> {
        let (params, log_ra, log_rb) = self.decode(z);
        let x = self
            .model
            .steady_state(&params)
            .map_err(|_| f64::INFINITY)?;
        let (a_a, b_a) = split_ratio(log_ra.exp());
        let [d00, d01, d10, d11] = x.diagonal();
        // p_suc = aB²·U + bB²·V at full transmission of the B filter
        let u = a_a * a_a * d00 + b_a * b_a * d10;
        let v = a_a * a_a * d01 + b_a * b_a * d11;
        let p = self.p_target;
        let tol = P_SUC_TOL * p;
        if u + v < p - tol {
            return Err(p - u - v);
        }
        let lo = if u >= p {
            f64::NEG_INFINITY
        } else {
            (((p - u) / v).sqrt()).ln()
        };
        let hi = if v >= p {
            f64::INFINITY
        } else {
            ((u / (p - v)).sqrt()).ln()
        };
        let log_rb = if lo <= hi {
            log_rb.clamp(lo.max(-LOG_RATIO), hi.min(LOG_RATIO))
        } else {
            0.0
        };
        let (a_b, b_b) = split_ratio(log_rb.exp());
        let full = a_b * a_b * u + b_b * b_b * v;
        let scale = if full > p { (p / full).sqrt() } else { 1.0 };
        let filter = FilterPair {
            a_a,
            b_a,
            a_b: a_b * scale,
            b_b: b_b * scale,
        };
        let (state, p_suc) = apply_filters_x(&x, &filter).map_err(|_| f64::INFINITY)?;
        if (p_suc - p).abs() > tol {
            return Err((p_suc - p).abs());
        }
        Ok(Candidate {
            value: 0.0,
            params,
            filter,
            state,
            p_suc,
        })
    }

    /// Loss minimized by the simplex search.
    fn loss(&self, z: &[f64], objective: Objective) -> f64 {
        match self.candidate(z) {
            Ok(c) => -objective.search_value(&c.state),
            Err(shortfall) => INFEASIBLE_LOSS + (shortfall / self.p_target).min(1.0),
        }
    }
}

/// Loss of points that miss the target efficiency, above every feasible loss.
const INFEASIBLE_LOSS: f64 = 10.0;

/// Best objective of the heralded state with |p_suc − p_target| ≤ [`P_SUC_TOL`]·p_target,
/// over the machine couplings (γA = 1 by scale invariance), the free bath
/// temperature of the model and the filter ratios.
pub fn optimize_tradeoff(
    model: TradeoffModel,
    objective: Objective,
    p_target: f64,
    scope: FilterScope,
    opts: TradeoffOptions,
) -> Result<TradeoffPoint> {
    if !(p_target > 0.0 && p_target <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "p_target must lie in (0, 1], got {p_target}"
        )));
    }
    if opts.samples == 0 || opts.restarts == 0 {
        return Err(Error::InvalidConfig(
            "samples and restarts must be positive".into(),
        ));
    }
    let space = SearchSpace {
        model,
        scope,
        p_target,
    };
    let dim = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.samples)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let u: f64 = rng.gen_range(0.02..0.98);
                    (u / (1.0 - u)).ln()
                })
                .collect()
        })
        .collect();
    let mut scored: Vec<(f64, usize)> = starts
        .par_iter()
        .enumerate()
        .map(|(i, z)| (space.loss(z, objective), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let nm = NelderMeadOptions {
        max_evals: opts.max_evals,
        x_tol: 1e-9,
        f_tol: 1e-13,
    };
    let refined: Vec<(f64, Vec<f64>)> = scored
        .iter()
        .take(opts.restarts)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&(_, i)| {
            let f = |z: &[f64]| space.loss(z, objective);
            let first = nelder_mead(f, &starts[i], 0.5, nm);
            let second = nelder_mead(f, &first.x, 0.2, nm);
            if second.value <= first.value {
                (second.value, second.x)
            } else {
                (first.value, first.x)
            }
        })
        .collect();
    let (best_loss, best_z) = refined
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart");
    if best_loss >= INFEASIBLE_LOSS {
        return Err(Error::InfeasibleTarget { p_target });
    }
    let mut c = space
        .candidate(&best_z)
        .map_err(|_| Error::InfeasibleTarget { p_target })?;
    c.value = final_value(objective, &c.state)?;
    Ok(TradeoffPoint {
        p_target,
        objective,
        value: c.value,
        p_suc: c.p_suc,
        params: c.params,
        filter: c.filter,
        seed: opts.seed,
        smoothed: false,
    })
}

fn final_value(objective: Objective, x: &XState) -> Result<f64> {
    match objective {
        Objective::SteeringRobustness => {
            noise_robustness(&x.to_state()?, &dodecahedron_measurements())
        }
        _ => Ok(objective.value(x)),
    }
}

/// One [`optimize_tradeoff`] point per grid value, followed by the monotone
/// envelope: a point that is beaten at a larger efficiency is replaced by that
/// solution with the B filter attenuated down to the smaller efficiency.
pub fn tradeoff_curve(
    model: TradeoffModel,
    objective: Objective,
    p_grid: &[f64],
    scope: FilterScope,
    opts: TradeoffOptions,
) -> Result<TradeoffCurve> {
    if p_grid.is_empty() || p_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParams(
            "p_grid must be non-empty and strictly ascending".into(),
        ));
    }
    let mut points = p_grid
        .par_iter()
        .map(|&p| optimize_tradeoff(model, objective, p, scope, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut smoothed = false;
    for i in (0..points.len().saturating_sub(1)).rev() {
        let next = &points[i + 1];
        if next.value > points[i].value {
            let p_target = points[i].p_target;
            let filter = next.filter.with_b_scaled((p_target / next.p_suc).sqrt());
            let x = model.steady_state(&next.params)?;
            let (state, p_suc) = apply_filters_x(&x, &filter)?;
            let value = final_value(objective, &state).map(|v| v.max(next.value))?;
            points[i] = TradeoffPoint {
                p_target,
                value,
                p_suc,
                filter,
                smoothed: true,
                ..next.clone()
            };
            smoothed = true;
        }
    }
    Ok(TradeoffCurve {
        model,
        objective,
        scope,
        points,
        smoothed,
    })
}

impl TradeoffCurve {
    /// Largest grid efficiency whose value beats the classical threshold.
    pub fn crossing(&self) -> Option<f64> {
        let t = self.objective.classical_threshold();
        self.points
            .iter()
            .filter(|p| p.value > t)
            .map(|p| p.p_target)
            .fold(None, |a, p| Some(a.map_or(p, |a: f64| a.max(p))))
    }
}

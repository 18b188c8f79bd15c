//! Closed-form steady states in the limits where the machine is solvable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::params::{BathKind, Charge, MachineParams, Temperature};
use super::state::XState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnalyticModel {
    /// Bosonic baths, T_B → 0, arbitrary T_A > 0.
    BosonColdB,
    /// Fermionic baths, u = 0, T_A → ∞, T_B → 0.
    FermionUnchargedHotColdLimit,
    /// Fermionic baths, u → ∞, T_B → 0, arbitrary T_A > 0.
    #[serde(rename = "FermionChargedColdB_uInf")]
    FermionChargedColdBUInf,
    /// Fermionic baths, T_A → 0⁻, T_B → 0.
    FermionInversion,
}

impl AnalyticModel {
    pub const ALL: [AnalyticModel; 4] = [
        AnalyticModel::BosonColdB,
        AnalyticModel::FermionUnchargedHotColdLimit,
        AnalyticModel::FermionChargedColdBUInf,
        AnalyticModel::FermionInversion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnalyticModel::BosonColdB => "BosonColdB",
            AnalyticModel::FermionUnchargedHotColdLimit => "FermionUnchargedHotColdLimit",
            AnalyticModel::FermionChargedColdBUInf => "FermionChargedColdB_uInf",
            AnalyticModel::FermionInversion => "FermionInversion",
        }
    }

    pub fn bath(self) -> BathKind {
        match self {
            AnalyticModel::BosonColdB => BathKind::Bosonic,
            _ => BathKind::Fermionic,
        }
    }

    /// The model whose limits exactly match the flags of `p`, if any.
    pub fn applicable(p: &MachineParams) -> Option<AnalyticModel> {
        if p.temperature_b() != Temperature::ZeroPlus {
            return None;
        }
        let ta = p.temperature_a();
        match p.bath {
            BathKind::Bosonic => {
                matches!(ta, Temperature::Finite(t) if t > 0.0).then_some(AnalyticModel::BosonColdB)
            }
            BathKind::Fermionic => {
                if ta == Temperature::ZeroMinus {
                    return Some(AnalyticModel::FermionInversion);
                }
                match p.charge() {
                    Charge::None if ta == Temperature::Infinite => {
                        Some(AnalyticModel::FermionUnchargedHotColdLimit)
                    }
                    Charge::Infinite if !ta.is_negative() => {
                        Some(AnalyticModel::FermionChargedColdBUInf)
                    }
                    _ => None,
                }
            }
        }
    }
}

impl fmt::Display for AnalyticModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalyticModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        Self::ALL
            .into_iter()
            .find(|m| m.name().to_ascii_lowercase().replace('_', "") == key)
            .or(match key.as_str() {
                "boson" | "bosons" => Some(AnalyticModel::BosonColdB),
                "uncharged" => Some(AnalyticModel::FermionUnchargedHotColdLimit),
                "charged" => Some(AnalyticModel::FermionChargedColdBUInf),
                "inversion" => Some(AnalyticModel::FermionInversion),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidParams(format!("unknown analytic model '{s}'")))
    }
}

fn mismatch(model: AnalyticModel, reason: impl Into<String>) -> Error {
    Error::ModelMismatch {
        model: model.name(),
        reason: reason.into(),
    }
}

/// Steady state of `model` at the couplings of `p`.
///
/// Temperatures and charge that the model fixes by its own limits are ignored;
/// the free temperature T_A of the bosonic and charged models is read from `p`.
pub fn steady_state_analytic(model: AnalyticModel, p: &MachineParams) -> Result<XState> {
    p.validate()?;
    if p.bath != model.bath() {
        return Err(mismatch(
            model,
            format!("requires {:?} baths", model.bath()),
        ));
    }
    let (g, ga, gb) = (p.g, p.gamma_a, p.gamma_b);
    let x = match model {
        AnalyticModel::FermionInversion => inversion(g, ga, gb),
        AnalyticModel::FermionUnchargedHotColdLimit => {
            if p.charge() != Charge::None {
                return Err(mismatch(model, "requires u = 0"));
            }
            uncharged(g, ga, gb)
        }
        AnalyticModel::FermionChargedColdBUInf => {
            let w = match p.temperature_a() {
                Temperature::Infinite => 1.0,
                Temperature::ZeroPlus => 0.0,
                Temperature::Finite(t) if t > 0.0 => (-1.0 / t).exp(),
                _ => return Err(mismatch(model, "requires T_A > 0")),
            };
            charged_u_inf(g, ga, gb, w)
        }
        AnalyticModel::BosonColdB => match p.temperature_a() {
            Temperature::Finite(t) if t > 0.0 => boson_cold_b(g, ga, gb, t)?,
            _ => return Err(mismatch(model, "requires finite T_A > 0")),
        },
    };
    finish(x)
}

fn finish(x: XState) -> Result<XState> {
    let alpha = x.alpha.min((x.a2.max(0.0) * x.a3.max(0.0)).sqrt());
    XState::new(x.a1, x.a2, x.a3, alpha)
}

/// Complete inversion on A, cold B.
pub(crate) fn inversion(g: f64, ga: f64, gb: f64) -> XState {
    let t = ga + gb;
    let n = t * t * (4.0 * g * g + ga * gb);
    XState {
        a1: 4.0 * g * g * gb * gb / n,
        a2: 4.0 * g * g * ga * gb / n,
        a3: ga * gb * (4.0 * g * g + t * t) / n,
        alpha: 2.0 * t * g * ga * gb / n,
    }
}

/// Infinitely hot A, cold B, no charge.
pub(crate) fn uncharged(g: f64, ga: f64, gb: f64) -> XState {
    let t = ga + gb;
    let s = ga + 2.0 * gb;
    let n2 = 2.0 * t * t * (4.0 * g * g + ga * gb);
    XState {
        a1: (ga * gb * t * t + 2.0 * g * g * s * s) / n2,
        a2: 2.0 * g * g * ga * s / n2,
        a3: ga * (gb * t * t + 2.0 * g * g * s) / n2,
        alpha: 2.0 * g * t * ga * gb / n2,
    }
}

/// Infinite charge, cold B. `w = e^{−E/T_A}` so that T_A → ∞ is `w = 1`.
pub(crate) fn charged_u_inf(g: f64, ga: f64, gb: f64, w: f64) -> XState {
    let t = ga + gb;
    let g2 = 4.0 * g * g;
    let d = g2 * (ga * (2.0 * w + 1.0) + gb * (w + 1.0)) + ga * gb * (gb * w + t);
    let a1 = (g2 * (1.0 + w) + ga * gb) * (gb * w + t) / ((1.0 + w) * d);
    let a2 = g2 * ga * w / d;
    XState {
        a1,
        a2,
        a3: 1.0 - a1 - a2,
        alpha: 2.0 * g * ga * gb * w / d,
    }
}

/// Bosonic baths with cold B. The closed form is naturally written in the
/// reversed basis order (|11⟩, |10⟩, |01⟩, |00⟩); it is mapped back here.
pub(crate) fn boson_cold_b(g: f64, ga: f64, gb: f64, ta: f64) -> Result<XState> {
    let t = ga + gb;
    let s = ga + 2.0 * gb;
    let e = (1.0 / ta).exp();
    let coth = 1.0 / (0.5 / ta).tanh();
    let g2 = 4.0 * g * g;
    let shift = ga - gb + t * e;
    let den = g2 * (e - 1.0) + ga * gb * (1.0 + e);
    let p11 = g2 * ga * ga / (shift * shift * (g2 + ga * gb * coth));
    let p10 = ga
        * ((g2 + (ga - gb).powi(2)) * gb + t * e * e * (g2 + gb * t)
            - 2.0 * e * (-ga * ga * gb + gb.powi(3) + 0.5 * g2 * s))
        / (den * shift * shift);
    let p01 = g2 * ga * (t + ga / (e - 1.0)) / (den * (gb + ga * coth).powi(2));
    let alpha = (2.0 * g * ga * gb * (e - 1.0) / (den * shift)).abs();
    let x = XState {
        a1: 1.0 - p11 - p10 - p01,
        a2: p01,
        a3: p10,
        alpha,
    };
    if [x.a1, x.a2, x.a3, x.alpha].iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "bosonic closed form overflows at T_A = {ta}"
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{canonicalize_x_state, steady_state_numeric};

    fn assert_x_close(a: &XState, b: &XState, tol: f64) {
        for (u, v) in [(a.a1, b.a1), (a.a2, b.a2), (a.a3, b.a3), (a.alpha, b.alpha)] {
            assert!((u - v).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn inversion_optimum_singlet_fraction() {
        let g = (5f64.sqrt() - 1.0) / 4.0;
        let x = steady_state_analytic(
            AnalyticModel::FermionInversion,
            &MachineParams::inversion(g, 1.0, 1.0),
        )
        .unwrap();
        let f = x.alpha + x.delta() / 2.0;
        assert!((f - (3.0 + 5f64.sqrt()) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn uncharged_weak_coupling() {
        let x = uncharged(1e-6, 1.0, 1.5);
        assert!(x.alpha < 1e-5 && x.a2 < 1e-11);
    }

    #[test]
    fn boson_scale_invariance() {
        let p = MachineParams::new(BathKind::Bosonic, 0.2, 1.0, 1.7, 0.9, 0.0);
        let a = steady_state_analytic(AnalyticModel::BosonColdB, &p).unwrap();
        let b = steady_state_analytic(AnalyticModel::BosonColdB, &p.scaled(2.0)).unwrap();
        assert_x_close(&a, &b, 1e-12);
    }

    #[test]
    fn matches_kernel_in_each_limit() {
        let g = (5f64.sqrt() - 1.0) / 4.0;
        let cases = [
            (
                AnalyticModel::FermionInversion,
                MachineParams::inversion(g, 1.0, 1.0),
            ),
            (
                AnalyticModel::FermionInversion,
                MachineParams::inversion(0.3, 0.4, 1.3).with_charge(20.0),
            ),
            (
                AnalyticModel::FermionUnchargedHotColdLimit,
                MachineParams::hot_cold(BathKind::Fermionic, 0.3, 1.0, 2.1),
            ),
            (
                AnalyticModel::FermionChargedColdBUInf,
                MachineParams::charged_cold_b(0.3, 1.0, 2.1, Temperature::Infinite),
            ),
            (
                AnalyticModel::FermionChargedColdBUInf,
                MachineParams::charged_cold_b(0.3, 1.0, 2.1, Temperature::Finite(0.7)),
            ),
            (
                AnalyticModel::BosonColdB,
                MachineParams::new(BathKind::Bosonic, 0.3, 1.0, 2.1, 1.3, 0.0)
                    .with_limit(super::super::Limit::TbZero),
            ),
        ];
        for (model, p) in cases {
            assert_eq!(AnalyticModel::applicable(&p), Some(model));
            let a = steady_state_analytic(model, &p).unwrap();
            let n = canonicalize_x_state(&steady_state_numeric(&p).unwrap()).unwrap();
            assert_x_close(&a, &n, 1e-10);
        }
    }

    #[test]
    fn model_mismatch() {
        let p = MachineParams::hot_cold(BathKind::Fermionic, 0.3, 1.0, 2.1);
        assert!(matches!(
            steady_state_analytic(AnalyticModel::BosonColdB, &p),
            Err(Error::ModelMismatch { .. })
        ));
        let p = MachineParams::charged_cold_b(0.3, 1.0, 2.1, Temperature::Finite(-0.5));
        assert!(matches!(
            steady_state_analytic(AnalyticModel::FermionChargedColdBUInf, &p),
            Err(Error::ModelMismatch { .. })
        ));
    }

    #[test]
    fn model_names_parse() {
        for m in AnalyticModel::ALL {
            assert_eq!(m.name().parse::<AnalyticModel>().unwrap(), m);
        }
        assert_eq!(
            "inversion".parse::<AnalyticModel>().unwrap(),
            AnalyticModel::FermionInversion
        );
        assert!("nope".parse::<AnalyticModel>().is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Statistics of the baths attached to both qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BathKind {
    Bosonic,
    Fermionic,
}

/// Limit flags that replace a finite parameter by its limiting value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Limit {
    /// T_A → +∞
    #[serde(rename = "TA_inf")]
    TaInf,
    /// T_B → 0⁺
    #[serde(rename = "TB_zero")]
    TbZero,
    /// T_A → 0⁻ (complete population inversion, fermions only)
    #[serde(rename = "TA_zero_minus")]
    TaZeroMinus,
    /// u → ∞
    #[serde(rename = "u_inf")]
    UInf,
}

/// Effective temperature after resolving limit flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Temperature {
    Finite(f64),
    ZeroPlus,
    ZeroMinus,
    Infinite,
}

impl Temperature {
    /// `T = 0.0` is read as the limit `0⁺`; `±∞` collapse to `Infinite`.
    pub fn from_value(t: f64) -> Self {
        if t == 0.0 {
            Temperature::ZeroPlus
        } else if t.is_infinite() {
            Temperature::Infinite
        } else {
            Temperature::Finite(t)
        }
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Temperature::ZeroMinus) || matches!(self, Temperature::Finite(t) if t < 0.0)
    }
}

/// Charge term on the doubly excited level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Charge {
    None,
    Finite(f64),
    Infinite,
}

/// Full configuration of the machine. Energies and temperatures are in units of E = 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineParams {
    pub bath: BathKind,
    pub g: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(rename = "gammaA")]
    pub gamma_a: f64,
    #[serde(rename = "gammaB")]
    pub gamma_b: f64,
    #[serde(rename = "TA", default)]
    pub ta: f64,
    #[serde(rename = "TB", default)]
    pub tb: f64,
    #[serde(default)]
    pub limits: Vec<Limit>,
}

/// Finite proxy for `u → ∞` in the Hamiltonian of the numeric path. Only the
/// |11⟩ energy is affected and it never couples to the steady-state support.
pub const U_INF_PROXY: f64 = 1e3;

impl MachineParams {
    /// Uncharged machine with finite temperatures; add limit flags with [`MachineParams::with_limit`].
    pub fn new(bath: BathKind, g: f64, gamma_a: f64, gamma_b: f64, ta: f64, tb: f64) -> Self {
        Self {
            bath,
            g,
            u: 0.0,
            gamma_a,
            gamma_b,
            ta,
            tb,
            limits: Vec::new(),
        }
    }

    pub fn with_charge(mut self, u: f64) -> Self {
        self.u = u;
        self
    }

    pub fn with_limit(mut self, l: Limit) -> Self {
        if !self.limits.contains(&l) {
            self.limits.push(l);
            self.limits.sort();
        }
        self
    }

    /// Hot bath at infinite temperature, cold bath at zero temperature, no charge.
    pub fn hot_cold(bath: BathKind, g: f64, gamma_a: f64, gamma_b: f64) -> Self {
        Self::new(bath, g, gamma_a, gamma_b, 0.0, 0.0)
            .with_limit(Limit::TaInf)
            .with_limit(Limit::TbZero)
    }

    /// Fully inverted bath on A, zero temperature bath on B.
    pub fn inversion(g: f64, gamma_a: f64, gamma_b: f64) -> Self {
        Self::new(BathKind::Fermionic, g, gamma_a, gamma_b, 0.0, 0.0)
            .with_limit(Limit::TaZeroMinus)
            .with_limit(Limit::TbZero)
    }

    /// Fermionic machine with infinite charge and a zero temperature bath on B.
    pub fn charged_cold_b(g: f64, gamma_a: f64, gamma_b: f64, ta: Temperature) -> Self {
        let p = Self::new(BathKind::Fermionic, g, gamma_a, gamma_b, 0.0, 0.0)
            .with_limit(Limit::UInf)
            .with_limit(Limit::TbZero);
        match ta {
            Temperature::Infinite => p.with_limit(Limit::TaInf),
            Temperature::ZeroMinus => p.with_limit(Limit::TaZeroMinus),
            Temperature::ZeroPlus => p,
            Temperature::Finite(t) => Self { ta: t, ..p },
        }
    }

    pub fn has(&self, l: Limit) -> bool {
        self.limits.contains(&l)
    }

    pub fn temperature_a(&self) -> Temperature {
        if self.has(Limit::TaInf) {
            Temperature::Infinite
        } else if self.has(Limit::TaZeroMinus) {
            Temperature::ZeroMinus
        } else {
            Temperature::from_value(self.ta)
        }
    }

    pub fn temperature_b(&self) -> Temperature {
        if self.has(Limit::TbZero) {
            Temperature::ZeroPlus
        } else {
            Temperature::from_value(self.tb)
        }
    }

    pub fn charge(&self) -> Charge {
        if self.has(Limit::UInf) {
            Charge::Infinite
        } else if self.u > 0.0 {
            Charge::Finite(self.u)
        } else {
            Charge::None
        }
    }

    /// Whether the charged jump set is used.
    pub fn is_charged(&self) -> bool {
        self.bath == BathKind::Fermionic && self.charge() != Charge::None
    }

    /// Same machine with (g, γA, γB) multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            g: c * self.g,
            gamma_a: c * self.gamma_a,
            gamma_b: c * self.gamma_b,
            ..self.clone()
        }
    }

    /// Checks the type invariants. Regime validity is not checked here.
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !finite_nonneg(self.g) {
            return Err(Error::InvalidParams(format!(
                "g must be finite and >= 0, got {}",
                self.g
            )));
        }
        for (name, v) in [("gammaA", self.gamma_a), ("gammaB", self.gamma_b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(self.u >= 0.0) || self.u.is_infinite() {
            return Err(Error::InvalidParams(format!(
                "u must be finite and >= 0 (use the u_inf flag for the limit), got {}",
                self.u
            )));
        }
        if self.ta.is_nan() || self.tb.is_nan() {
            return Err(Error::InvalidParams("temperatures must not be NaN".into()));
        }
        if self.has(Limit::TaInf) && self.has(Limit::TaZeroMinus) {
            return Err(Error::InvalidParams(
                "TA_inf and TA_zero_minus are mutually exclusive".into(),
            ));
        }
        if self.temperature_b().is_negative() {
            return Err(Error::InvalidTemperature {
                bath: "B",
                reason: format!("TB must be >= 0, got {}", self.tb),
            });
        }
        if self.bath == BathKind::Bosonic {
            if self.charge() != Charge::None {
                return Err(Error::InvalidParams(
                    "bosonic baths are only modelled without charge (u = 0)".into(),
                ));
            }
            if self.temperature_a().is_negative() {
                return Err(Error::InvalidTemperature {
                    bath: "A",
                    reason: "negative temperature requires fermionic baths".into(),
                });
            }
        }
        Ok(())
    }

    /// g ≤ max(γA, γB) and max(g, γA, γB) ≤ 0.1·min(E, u).
    pub fn is_regime_valid(&self) -> bool {
        let u_eff = match self.charge() {
            Charge::Finite(u) => u,
            _ => f64::INFINITY,
        };
        let gmax = self.gamma_a.max(self.gamma_b);
        self.g <= gmax && self.g.max(gmax) <= 0.1 * u_eff.min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_with_limits() {
        let text = r#"{"bath":"Fermionic","g":0.3,"u":0,"gammaA":1,"gammaB":2.1,"TA":0,"TB":0,"limits":["u_inf","TA_inf","TB_zero"]}"#;
        let p: MachineParams = serde_json::from_str(text).unwrap();
        assert_eq!(p.temperature_a(), Temperature::Infinite);
        assert_eq!(p.temperature_b(), Temperature::ZeroPlus);
        assert_eq!(p.charge(), Charge::Infinite);
        let back: MachineParams =
            serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn charged_bosons_are_rejected() {
        let p = MachineParams::new(BathKind::Bosonic, 0.1, 1.0, 1.0, 1.0, 0.0).with_charge(2.0);
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn negative_temperature_needs_fermions() {
        let p = MachineParams::new(BathKind::Bosonic, 0.1, 1.0, 1.0, -1.0, 0.0);
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidTemperature { .. })
        ));
        let p = MachineParams::new(BathKind::Fermionic, 0.1, 1.0, 1.0, -1.0, 0.0);
        assert!(p.validate().is_ok());
        let p = MachineParams::new(BathKind::Fermionic, 0.1, 1.0, 1.0, 1.0, -0.5);
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidTemperature { bath: "B", .. })
        ));
    }

    #[test]
    fn bad_rates_rejected() {
        let p = MachineParams::new(BathKind::Fermionic, 0.1, 0.0, 1.0, 1.0, 0.0);
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
        let p = MachineParams::new(BathKind::Fermionic, -0.1, 1.0, 1.0, 1.0, 0.0);
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn regime_validity() {
        assert!(MachineParams::hot_cold(BathKind::Fermionic, 0.01, 0.02, 0.05).is_regime_valid());
        assert!(!MachineParams::hot_cold(BathKind::Fermionic, 0.3, 1.0, 2.1).is_regime_valid());
        assert!(!MachineParams::hot_cold(BathKind::Fermionic, 0.06, 0.02, 0.05).is_regime_valid());
        let p = MachineParams::hot_cold(BathKind::Fermionic, 0.01, 0.02, 0.05).with_charge(0.3);
        assert!(!p.is_regime_valid());
    }
}

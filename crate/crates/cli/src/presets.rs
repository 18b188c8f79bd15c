//! Named configurations that regenerate the data behind the region maps and trade-off curves.

use qtm_core::filtering::{FilterScope, Objective, TradeoffModel};
use qtm_core::machine::AnalyticModel;

use crate::grid::GridSpec;
use crate::tradeoff::{efficiencies, Curve};
use crate::CliError;

/// Coupling plane shared by the region maps: g/γA ∈ (0, 1], γB/γA ∈ (0, 20].
const PLANE: &str = "g=0.05:1:20,gammaB=0.5:20:40";

/// Efficiencies of the trade-off curves.
const P_GRID: &str = "p=0.001:1:25:log";

pub const SWEEP_PRESETS: [&str; 4] = ["fig2", "fig3a", "fig3b", "fig3c"];
pub const TRADEOFF_PRESETS: [&str; 3] = ["fig4", "fig5-left", "fig5-right"];

fn parse(spec: &str) -> GridSpec {
    spec.parse().expect("preset grids are well formed")
}

pub fn sweep(name: &str) -> Result<(AnalyticModel, GridSpec), CliError> {
    Ok(match name {
        "fig2" => (
            AnalyticModel::BosonColdB,
            parse(&format!("{PLANE},TA=0.5:2:3:log")),
        ),
        "fig3a" => (AnalyticModel::FermionUnchargedHotColdLimit, parse(PLANE)),
        "fig3b" => (AnalyticModel::FermionInversion, parse(PLANE)),
        "fig3c" => (AnalyticModel::FermionChargedColdBUInf, parse(PLANE)),
        _ => {
            return Err(CliError::BadInput(format!(
                "unknown sweep preset '{name}' (expected {})",
                SWEEP_PRESETS.join(", ")
            )))
        }
    })
}

fn curve(
    label: &str,
    model: TradeoffModel,
    objective: Objective,
    scope: FilterScope,
    p_grid: &[f64],
) -> Curve {
    Curve {
        label: label.to_string(),
        model,
        objective,
        scope,
        p_grid: p_grid.to_vec(),
    }
}

pub fn tradeoff(name: &str) -> Result<Vec<Curve>, CliError> {
    use FilterScope::{BothQubits, QubitBOnly};
    use Objective::{Chsh, SingletFraction, SteeringRobustness};
    let p = efficiencies(&parse(P_GRID))?;
    let boson = TradeoffModel::Analytic(AnalyticModel::BosonColdB);
    let charged = TradeoffModel::Analytic(AnalyticModel::FermionChargedColdBUInf);
    let inversion = TradeoffModel::Analytic(AnalyticModel::FermionInversion);
    let finite = |pop: f64| TradeoffModel::charged_finite_population(20.0, pop);
    Ok(match name {
        "fig4" => vec![curve(
            "boson-singlet",
            boson,
            SingletFraction,
            BothQubits,
            &p,
        )],
        "fig5-left" => vec![
            curve("charged-singlet", charged, SingletFraction, BothQubits, &p),
            curve("charged-chsh", charged, Chsh, BothQubits, &p),
            curve(
                "charged-steering",
                charged,
                SteeringRobustness,
                BothQubits,
                &p,
            ),
        ],
        "fig5-right" => vec![
            curve(
                "inversion-singlet",
                inversion,
                SingletFraction,
                QubitBOnly,
                &p,
            ),
            curve("u20-pop100-chsh", finite(1.0)?, Chsh, QubitBOnly, &p),
            curve("u20-pop88-chsh", finite(0.88)?, Chsh, QubitBOnly, &p),
            curve("u20-pop75-chsh", finite(0.75)?, Chsh, QubitBOnly, &p),
            curve(
                "inversion-steering",
                inversion,
                SteeringRobustness,
                QubitBOnly,
                &p,
            ),
        ],
        _ => {
            return Err(CliError::BadInput(format!(
                "unknown trade-off preset '{name}' (expected {})",
                TRADEOFF_PRESETS.join(", ")
            )))
        }
    })
}

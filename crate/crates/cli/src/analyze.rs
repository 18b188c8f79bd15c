use std::path::Path;

use serde::Serialize;

use qtm_core::machine::{
    canonicalize_x_state, steady_state_analytic, steady_state_numeric, AnalyticModel,
    MachineParams, XState,
};
use qtm_core::nonclassicality::{no_go_predicates, NoGoPredicates, NonclassicalityReport};
use qtm_core::steering::{
    dodecahedron_measurements, noise_robustness, steerability_classify, ClassifyBudget,
    SteerVerdict,
};

use crate::output::write_json;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct XFields {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub alpha: f64,
}

impl From<&XState> for XFields {
    fn from(x: &XState) -> Self {
        Self {
            a1: x.a1,
            a2: x.a2,
            a3: x.a3,
            a4: x.a4(),
            alpha: x.alpha,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    /// Closed-form model, or "numeric" for the Liouvillian kernel.
    pub model: String,
    pub params: MachineParams,
    /// Diagonal in the basis |00>, |01>, |10>, |11>.
    pub populations: [f64; 4],
    pub x_state: Option<XFields>,
    pub nonclassicality: NonclassicalityReport,
    pub no_go: Option<NoGoPredicates>,
    /// Isotropic noise rate at which the dodecahedral assemblage becomes local.
    pub q_star_dodecahedral: f64,
    pub steering: SteerVerdict,
}

pub fn analyze(
    params: &MachineParams,
    model: Option<AnalyticModel>,
    max_settings: usize,
) -> Result<AnalyzeReport, CliError> {
    params.validate()?;
    let (name, state, x) = match model {
        Some(m) => {
            let x = steady_state_analytic(m, params)?;
            (m.name().to_string(), x.to_state()?, Some(x))
        }
        None => {
            let rho = steady_state_numeric(params)?;
            let x = canonicalize_x_state(&rho).ok();
            ("numeric".to_string(), rho, x)
        }
    };
    let nonclassicality = match &x {
        Some(x) if model.is_some() => NonclassicalityReport::of_x_state(x),
        _ => NonclassicalityReport::of_state(&state),
    };
    Ok(AnalyzeReport {
        model: name,
        params: params.clone(),
        populations: state.populations(),
        x_state: x.as_ref().map(XFields::from),
        nonclassicality,
        no_go: x.as_ref().map(no_go_predicates),
        q_star_dodecahedral: noise_robustness(&state, &dodecahedron_measurements())?,
        steering: steerability_classify(&state, ClassifyBudget { max_settings }),
    })
}

pub fn run(
    path: &Path,
    model: Option<&str>,
    max_settings: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
    let params: MachineParams = serde_json::from_str(&text)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
    let model = model.map(str::parse::<AnalyticModel>).transpose()?;
    write_json(&analyze(&params, model, max_settings)?, out)
}

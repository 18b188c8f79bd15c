use std::path::Path;

use rayon::prelude::*;

use qtm_core::filtering::temperature_label;
use qtm_core::machine::{
    steady_state_analytic, AnalyticModel, BathKind, Limit, MachineParams, Temperature,
};
use qtm_core::nonclassicality::{chsh_x, concurrence_x, no_go_predicates, singlet_fraction_x};
use qtm_core::steering::{
    dodecahedron_measurements, noise_robustness, steerability_classify, ClassifyBudget,
    SteerEvidence,
};

use crate::grid::GridSpec;
use crate::output::{write_csv, UNITS};
use crate::presets;
use crate::CliError;

pub const AXES: [&str; 3] = ["g", "gammaB", "TA"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Outputs {
    pub state: bool,
    pub functionals: bool,
    pub nogo: bool,
    pub qstar: bool,
    pub verdict: bool,
}

impl Outputs {
    pub fn parse(names: &[String]) -> Result<Self, CliError> {
        let mut o = Outputs::default();
        for n in names {
            match n.trim() {
                "state" => o.state = true,
                "functionals" => o.functionals = true,
                "nogo" => o.nogo = true,
                "qstar" => o.qstar = true,
                "verdict" => o.verdict = true,
                "all" => {
                    o = Outputs {
                        state: true,
                        functionals: true,
                        nogo: true,
                        qstar: true,
                        verdict: true,
                    }
                }
                other => {
                    return Err(CliError::BadInput(format!(
                        "unknown output group '{other}'"
                    )))
                }
            }
        }
        Ok(o)
    }

    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["g_over_gammaA", "gammaB_over_gammaA", "TA"];
        if self.state {
            h.extend(["a1", "a2", "a3", "a4", "alpha"]);
        }
        if self.functionals {
            h.extend(["singlet_fraction", "chsh", "concurrence"]);
        }
        if self.nogo {
            h.extend(["telecond", "telecond2", "chshcond", "chshcond2"]);
        }
        if self.qstar {
            h.push("q_star");
        }
        if self.verdict {
            h.extend(["verdict", "evidence"]);
        }
        h
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub model: AnalyticModel,
    pub grid: GridSpec,
    pub outputs: Outputs,
    pub max_settings: usize,
    pub preset: Option<String>,
}

impl SweepConfig {
    pub fn resolve(
        preset: Option<&str>,
        model: Option<&str>,
        grid: Option<GridSpec>,
        outputs: &[String],
        max_settings: usize,
    ) -> Result<Self, CliError> {
        let base = preset.map(presets::sweep).transpose()?;
        let model = match model {
            Some(m) => m.parse::<AnalyticModel>()?,
            None => base
                .as_ref()
                .map(|b| b.0)
                .ok_or_else(|| CliError::BadInput("no model given".into()))?,
        };
        let grid = grid
            .or(base.map(|b| b.1))
            .ok_or_else(|| CliError::BadInput("no grid given".into()))?;
        grid.check(&AXES).map_err(CliError::BadInput)?;
        for name in ["g", "gammaB"] {
            let a = grid
                .axis(name)
                .ok_or_else(|| CliError::BadInput(format!("grid needs a '{name}' axis")))?;
            if a.start <= 0.0 {
                return Err(CliError::BadInput(format!(
                    "axis '{name}' must be positive"
                )));
            }
        }
        match (model, grid.axis("TA")) {
            (AnalyticModel::BosonColdB, None) => {
                return Err(CliError::BadInput("BosonColdB needs a TA axis".into()))
            }
            (AnalyticModel::BosonColdB | AnalyticModel::FermionChargedColdBUInf, Some(a))
                if a.start <= 0.0 =>
            {
                return Err(CliError::BadInput("axis 'TA' must be positive".into()))
            }
            (
                AnalyticModel::FermionUnchargedHotColdLimit | AnalyticModel::FermionInversion,
                Some(_),
            ) => {
                return Err(CliError::BadInput(format!(
                    "{model} fixes TA by its limits; drop the TA axis"
                )))
            }
            _ => {}
        }
        Ok(SweepConfig {
            model,
            grid,
            outputs: Outputs::parse(outputs)?,
            max_settings,
            preset: preset.map(String::from),
        })
    }

    /// Grid points in output order: TA outermost, then g, then gammaB.
    pub fn points(&self) -> Vec<(Temperature, f64, f64)> {
        let tas = match self.grid.axis("TA") {
            Some(a) => a.values().into_iter().map(Temperature::Finite).collect(),
            None if self.model == AnalyticModel::FermionChargedColdBUInf => {
                vec![Temperature::Infinite]
            }
            None if self.model == AnalyticModel::FermionInversion => vec![Temperature::ZeroMinus],
            None => vec![Temperature::Infinite],
        };
        let gs = self.grid.axis("g").map(|a| a.values()).unwrap_or_default();
        let gbs = self
            .grid
            .axis("gammaB")
            .map(|a| a.values())
            .unwrap_or_default();
        let mut pts = Vec::with_capacity(tas.len() * gs.len() * gbs.len());
        for &ta in &tas {
            for &g in &gs {
                for &gb in &gbs {
                    pts.push((ta, g, gb));
                }
            }
        }
        pts
    }
}

pub fn machine(model: AnalyticModel, ta: Temperature, g: f64, gamma_b: f64) -> MachineParams {
    match model {
        AnalyticModel::BosonColdB => {
            let Temperature::Finite(t) = ta else {
                unreachable!("bosonic sweeps carry a finite TA")
            };
            MachineParams::new(BathKind::Bosonic, g, 1.0, gamma_b, t, 0.0).with_limit(Limit::TbZero)
        }
        AnalyticModel::FermionUnchargedHotColdLimit => {
            MachineParams::hot_cold(BathKind::Fermionic, g, 1.0, gamma_b)
        }
        AnalyticModel::FermionChargedColdBUInf => {
            MachineParams::charged_cold_b(g, 1.0, gamma_b, ta)
        }
        AnalyticModel::FermionInversion => MachineParams::inversion(g, 1.0, gamma_b),
    }
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn row(cfg: &SweepConfig, ta: Temperature, g: f64, gb: f64) -> Result<Vec<String>, CliError> {
    let x = steady_state_analytic(cfg.model, &machine(cfg.model, ta, g, gb))?;
    let o = &cfg.outputs;
    let mut r = vec![g.to_string(), gb.to_string(), temperature_label(ta)];
    if o.state {
        r.extend([x.a1, x.a2, x.a3, x.a4(), x.alpha].map(|v| v.to_string()));
    }
    if o.functionals {
        r.extend([singlet_fraction_x(&x), chsh_x(&x), concurrence_x(&x)].map(|v| v.to_string()));
    }
    if o.nogo {
        let p = no_go_predicates(&x);
        r.extend([p.telecond, p.telecond2, p.chshcond, p.chshcond2].map(flag));
    }
    if o.qstar || o.verdict {
        let rho = x.to_state()?;
        if o.qstar {
            r.push(noise_robustness(&rho, &dodecahedron_measurements())?.to_string());
        }
        if o.verdict {
            let v = steerability_classify(
                &rho,
                ClassifyBudget {
                    max_settings: cfg.max_settings,
                },
            );
            let evidence = match v.evidence {
                SteerEvidence::FiniteSetInfeasible { settings, q_star } => {
                    format!("infeasible with {settings} settings, q*={q_star}")
                }
                SteerEvidence::PositivePartialTranspose { min_eigenvalue } => {
                    format!("ppt, min eigenvalue {min_eigenvalue}")
                }
                SteerEvidence::Inconclusive {
                    settings_tried,
                    solver_failures,
                } => {
                    format!("inconclusive, settings {settings_tried:?}, {solver_failures} solver failures")
                }
            };
            r.extend([format!("{:?}", v.verdict), evidence]);
        }
    }
    Ok(r)
}

/// Rows in grid order; evaluation runs in parallel.
pub fn rows(cfg: &SweepConfig) -> Result<Vec<Vec<String>>, CliError> {
    cfg.points()
        .par_iter()
        .map(|&(ta, g, gb)| row(cfg, ta, g, gb))
        .collect()
}

pub fn run(cfg: &SweepConfig, out: &Path) -> Result<(), CliError> {
    let rows = rows(cfg)?;
    let mut comments = vec![UNITS.to_string()];
    let source = cfg
        .preset
        .as_ref()
        .map_or(String::new(), |p| format!(" preset={p}"));
    comments.push(format!(
        "# sweep model={} grid={}{source} max_settings={}",
        cfg.model, cfg.grid, cfg.max_settings
    ));
    if cfg.outputs.qstar {
        comments.push("# q_star: isotropic noise rate for the ten dodecahedral settings".into());
    }
    write_csv(out, &comments, &cfg.outputs.header(), &rows)?;
    println!("{} rows written to {}", rows.len(), out.display());
    Ok(())
}

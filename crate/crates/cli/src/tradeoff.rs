use std::path::Path;

use qtm_core::filtering::{
    tradeoff_curve, FilterScope, Objective, TradeoffCurve, TradeoffModel, TradeoffOptions,
    TradeoffPoint,
};

use crate::grid::GridSpec;
use crate::output::{write_csv, UNITS};
use crate::presets;
use crate::CliError;

/// One optimized curve of a trade-off run.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub model: TradeoffModel,
    pub objective: Objective,
    pub scope: FilterScope,
    pub p_grid: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct TradeoffConfig {
    pub curves: Vec<Curve>,
    pub opts: TradeoffOptions,
    pub preset: Option<String>,
}

pub struct Request<'a> {
    pub preset: Option<&'a str>,
    pub model: Option<&'a str>,
    pub objective: Option<&'a str>,
    pub pgrid: Option<GridSpec>,
    pub scope: Option<&'a str>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub restarts: Option<usize>,
    pub max_evals: Option<usize>,
}

/// Efficiencies of a `p=start:stop:count[:log]` grid.
pub fn efficiencies(grid: &GridSpec) -> Result<Vec<f64>, CliError> {
    grid.check(&["p"]).map_err(CliError::BadInput)?;
    let axis = grid
        .axis("p")
        .ok_or_else(|| CliError::BadInput("efficiency grid needs a 'p' axis".into()))?;
    if !(axis.start > 0.0 && axis.stop <= 1.0) {
        return Err(CliError::BadInput("efficiencies must lie in (0, 1]".into()));
    }
    let mut v = axis.values();
    v.dedup();
    Ok(v)
}

impl TradeoffConfig {
    pub fn resolve(req: Request<'_>) -> Result<Self, CliError> {
        let objective = req.objective.map(str::parse::<Objective>).transpose()?;
        let scope = req.scope.map(str::parse::<FilterScope>).transpose()?;
        let p_grid = req.pgrid.as_ref().map(efficiencies).transpose()?;
        let curves = match req.preset {
            Some(name) => {
                if req.model.is_some() {
                    return Err(CliError::BadInput(
                        "--model cannot be combined with --preset".into(),
                    ));
                }
                let curves: Vec<Curve> = presets::tradeoff(name)?
                    .into_iter()
                    .filter(|c| objective.map_or(true, |o| o == c.objective))
                    .map(|c| Curve {
                        scope: scope.unwrap_or(c.scope),
                        p_grid: p_grid.clone().unwrap_or(c.p_grid),
                        ..c
                    })
                    .collect();
                if curves.is_empty() {
                    return Err(CliError::BadInput(format!(
                        "preset {name} has no curve for that objective"
                    )));
                }
                curves
            }
            None => {
                let model: TradeoffModel = req
                    .model
                    .ok_or_else(|| CliError::BadInput("no model given".into()))?
                    .parse()?;
                let objective =
                    objective.ok_or_else(|| CliError::BadInput("no objective given".into()))?;
                vec![Curve {
                    label: model.to_string(),
                    model,
                    objective,
                    scope: scope.unwrap_or(model.default_scope()),
                    p_grid: p_grid
                        .ok_or_else(|| CliError::BadInput("no efficiency grid given".into()))?,
                }]
            }
        };
        let d = TradeoffOptions::default();
        let opts = TradeoffOptions {
            seed: req.seed,
            samples: req.samples.unwrap_or(d.samples),
            restarts: req.restarts.unwrap_or(d.restarts),
            max_evals: req.max_evals.unwrap_or(d.max_evals),
        };
        Ok(TradeoffConfig {
            curves,
            opts,
            preset: req.preset.map(String::from),
        })
    }
}

pub fn header() -> Vec<&'static str> {
    let mut h = vec!["curve"];
    h.extend(TradeoffPoint::CSV_HEADER);
    h.extend(["p_suc", "smoothed"]);
    h
}

fn summary(c: &Curve, curve: &TradeoffCurve) -> String {
    let crossing = curve
        .crossing()
        .map_or("none".to_string(), |p| p.to_string());
    format!(
        "crossing {}: {} above {} up to p_suc = {crossing}",
        c.label,
        c.objective.name(),
        c.objective.classical_threshold()
    )
}

pub fn run(cfg: &TradeoffConfig, out: &Path) -> Result<(), CliError> {
    let mut comments = vec![UNITS.to_string()];
    let o = &cfg.opts;
    let source = cfg
        .preset
        .as_ref()
        .map_or(String::new(), |p| format!(" preset={p}"));
    comments.push(format!(
        "# tradeoff{source} seed={} samples={} restarts={} max_evals={}",
        o.seed, o.samples, o.restarts, o.max_evals
    ));
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for c in &cfg.curves {
        let curve = tradeoff_curve(c.model, c.objective, &c.p_grid, c.scope, cfg.opts)?;
        comments.push(format!(
            "# curve {}: model={} objective={} scope={:?}",
            c.label,
            c.model,
            c.objective.name(),
            c.scope
        ));
        lines.push(summary(c, &curve));
        for p in &curve.points {
            let mut r = vec![c.label.clone()];
            r.extend(p.csv_record());
            r.extend([p.p_suc.to_string(), p.smoothed.to_string()]);
            rows.push(r);
        }
    }
    comments.extend(lines.iter().map(|l| format!("# {l}")));
    write_csv(out, &comments, &header(), &rows)?;
    for l in &lines {
        println!("{l}");
    }
    Ok(())
}

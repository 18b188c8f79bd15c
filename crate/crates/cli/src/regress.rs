use std::path::Path;

use serde::Serialize;

use qtm_validation::{run_criterion, CriterionOutcome, CRITERIA};

use crate::output::write_json;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RegressSummary {
    pub passed: bool,
    pub failed: Vec<u8>,
    pub criteria: Vec<CriterionOutcome>,
}

pub fn summarize(ids: &[u8]) -> Result<RegressSummary, CliError> {
    let ids: Vec<u8> = if ids.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        ids.to_vec()
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(CliError::BadInput(format!("no criterion {bad}")));
    }
    let criteria: Vec<CriterionOutcome> = ids.iter().map(|&id| run_criterion(id)).collect();
    let failed = criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.id)
        .collect::<Vec<_>>();
    Ok(RegressSummary {
        passed: failed.is_empty(),
        failed,
        criteria,
    })
}

pub fn run(only: &[u8], json: Option<&Path>) -> Result<(), CliError> {
    let s = summarize(only)?;
    for c in &s.criteria {
        println!(
            "criterion {}: {}  {}  ({})",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.title,
            c.detail
        );
    }
    if let Some(p) = json {
        write_json(&s, Some(p))?;
    }
    if s.passed {
        Ok(())
    } else {
        Err(CliError::Regression(format!(
            "failed criteria: {:?}",
            s.failed
        )))
    }
}

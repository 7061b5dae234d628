//! Library side of the `fairsched` command: instance generation, solver
//! dispatch with certificates, verification, bounds and benchmark reports.

pub mod bench;
pub mod gen;
pub mod solve;
pub mod verify;

use anyhow::Result;
use fairsched::approx2::{approx2_solve, AUXILIARY_SIZE_LIMIT};
use fairsched::model::{enhanced_lower_bound, trivial_lower_bounds};
use fairsched::ratio;
use fairsched::Instance;
use serde_json::{json, Value};

/// Every implemented lower bound, with its certification status.
pub fn bounds_report(instance: &Instance) -> Result<Value> {
    let mut bounds: Vec<Value> = trivial_lower_bounds(instance)
        .into_iter()
        .map(|b| json!({ "name": b.name, "value": b.value.to_string(), "certified": b.certified }))
        .collect();
    if let Ok(lb) = enhanced_lower_bound(instance) {
        bounds.push(json!({
            "name": "enhanced_lower_bound",
            "value": ratio::display(&lb),
            "certified": true,
        }));
    }
    if instance.n() * instance.m() <= AUXILIARY_SIZE_LIMIT {
        let a = approx2_solve(instance)?;
        bounds.push(json!({
            "name": "lp_relaxation",
            "value": format!("{}", a.k_lp),
            "certified": a.certified,
        }));
    }
    Ok(json!({
        "n": instance.n(),
        "m": instance.m(),
        "bounds": bounds,
        "best_certified": solve::certified_lower_bound(instance)?,
    }))
}

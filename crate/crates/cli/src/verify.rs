//! Independent re-check of a schedule and its claimed certificate.

use anyhow::Result;
use fairsched::model::evaluate_schedule;
use fairsched::{Instance, Schedule, Time};
use serde::{Deserialize, Serialize};

use crate::solve::certified_lower_bound;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Claim {
    pub K: Time,
    pub lb: Option<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub claimed_k: Time,
    pub recomputed_k: Option<Time>,
    pub claimed_lb: Option<Time>,
    pub recomputed_lb: Time,
    pub failures: Vec<String>,
}

/// Reads `certificate.K` and `certificate.lb` from a solver output file.
pub fn claim_from_output(text: &str) -> Option<Claim> {
    let v: serde_json::Value = serde_json::from_str(text).ok()?;
    serde_json::from_value(v.get("certificate")?.clone()).ok()
}

/// Passes when the schedule is valid, its objective equals the claim, and
/// the claimed lower bound does not exceed the best certified bound
/// recomputed from the instance.
pub fn verify(instance: &Instance, schedule: &Schedule, claim: &Claim) -> Result<VerifyReport> {
    let mut failures = Vec::new();
    let recomputed_k = match evaluate_schedule(instance, schedule) {
        Ok(ev) => Some(ev.objective),
        Err(e) => {
            failures.push(format!("invalid schedule: {e}"));
            None
        }
    };
    if let Some(k) = recomputed_k {
        if k != claim.K {
            failures.push(format!(
                "K: claimed {} but schedule evaluates to {k}",
                claim.K
            ));
        }
    }
    let recomputed_lb = certified_lower_bound(instance)?;
    if let Some(lb) = claim.lb {
        if lb > recomputed_lb {
            failures.push(format!(
                "lb: claimed {lb} exceeds certified bound {recomputed_lb}"
            ));
        }
        if lb > claim.K {
            failures.push(format!("lb: claimed {lb} exceeds claimed K {}", claim.K));
        }
    }
    Ok(VerifyReport {
        pass: failures.is_empty(),
        claimed_k: claim.K,
        recomputed_k,
        claimed_lb: claim.lb,
        recomputed_lb,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairsched::dayinv::two_day_inversion;

    fn e1() -> (Instance, Schedule) {
        let inst = Instance::day_invariant(vec![1, 2], 2).unwrap();
        let s = two_day_inversion(&inst, &[0, 1]).unwrap();
        (inst, s)
    }

    #[test]
    fn e1_inversion_passes() {
        let (inst, s) = e1();
        let r = verify(&inst, &s, &Claim { K: 5, lb: Some(5) }).unwrap();
        assert!(r.pass, "{:?}", r.failures);
    }

    #[test]
    fn tampered_k_fails() {
        let (inst, s) = e1();
        let r = verify(&inst, &s, &Claim { K: 4, lb: None }).unwrap();
        assert!(!r.pass);
        assert!(r.failures[0].contains("claimed 4"));
    }

    #[test]
    fn lb_above_bound_fails() {
        let (inst, s) = e1();
        let r = verify(&inst, &s, &Claim { K: 5, lb: Some(6) }).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn wrong_shape_fails() {
        let (inst, _) = e1();
        let s = Schedule::new(vec![vec![0, 1]]);
        let r = verify(&inst, &s, &Claim { K: 5, lb: None }).unwrap();
        assert!(!r.pass);
    }
}

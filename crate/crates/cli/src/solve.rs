//! Solver dispatch and certificates.

use std::time::Duration;

use anyhow::{bail, Result};
use fairsched::approx2::{approx2_solve, AUXILIARY_SIZE_LIMIT};
use fairsched::dayinv::dayinv_approx;
use fairsched::exact::{brute_force_optimum, Limits};
use fairsched::lp::LinearProgram;
use fairsched::model::{best_closed_form_bound, objective};
use fairsched::ptas::{ptas_solve, PtasOptions};
use fairsched::qptas::{qptas_solve, QptasOptions};
use fairsched::ratio::{self, Rational};
use fairsched::{Instance, Schedule, Time};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Lp2,
    Ptas,
    Inversion,
    Qptas,
    Exact,
}

impl Algo {
    pub const ALL: [Algo; 5] = [
        Algo::Lp2,
        Algo::Ptas,
        Algo::Inversion,
        Algo::Qptas,
        Algo::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Lp2 => "lp2",
            Algo::Ptas => "ptas",
            Algo::Inversion => "inversion",
            Algo::Qptas => "qptas",
            Algo::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| anyhow::anyhow!("unknown algorithm '{s}'"))
    }
}

#[derive(Debug, Clone)]
pub struct SolveParams {
    pub eps: Rational,
    pub seed: Option<u64>,
    pub time_budget: Option<Duration>,
    pub oracle_batching: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            eps: ratio::frac(1, 2),
            seed: None,
            time_budget: None,
            oracle_batching: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub algo: Algo,
    pub schedule: Schedule,
    pub k: Time,
    /// Certified lower bound on the optimum.
    pub lb: Time,
    /// Proven ratio against the optimum, when the run is certified.
    pub ratio_bound: Option<f64>,
    /// Set when a cap, budget or best-effort path was hit.
    pub flagged: bool,
    pub details: Value,
    pub lp: Option<LinearProgram>,
}

#[derive(Serialize)]
struct OutputFile<'a> {
    algo: &'a str,
    perms: Vec<Vec<usize>>,
    certificate: Certificate<'a>,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct Certificate<'a> {
    K: Time,
    lb: Time,
    ratio_bound: Option<f64>,
    flagged: bool,
    details: &'a Value,
}

impl SolveOutput {
    /// Schedule (`perms`, 1-based) plus certificate, as one JSON document.
    pub fn to_json(&self) -> String {
        let file = OutputFile {
            algo: self.algo.name(),
            perms: self.schedule.to_file().perms,
            certificate: Certificate {
                K: self.k,
                lb: self.lb,
                ratio_bound: self.ratio_bound,
                flagged: self.flagged,
                details: &self.details,
            },
        };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }
}

/// Largest implemented certified lower bound: closed forms, and the LP
/// bound when the relaxation is small enough to solve.
pub fn certified_lower_bound(instance: &Instance) -> Result<Time> {
    let mut lb = best_closed_form_bound(instance);
    if instance.n() * instance.m() <= AUXILIARY_SIZE_LIMIT {
        let a = approx2_solve(instance)?;
        if a.certified {
            lb = lb.max(a.integer_lower_bound());
        }
    }
    Ok(lb)
}

fn one_plus(eps: &Rational) -> f64 {
    1.0 + ratio::to_f64(eps)
}

fn oracle_schedule(instance: &Instance, params: &SolveParams) -> Result<Schedule> {
    let r = brute_force_optimum(
        instance,
        Limits {
            time_budget: params.time_budget,
            ..Limits::default()
        },
    )?;
    if !r.certified {
        bail!("oracle optimum not reached within limits");
    }
    Ok(r.schedule)
}

pub fn solve(instance: &Instance, algo: Algo, params: &SolveParams) -> Result<SolveOutput> {
    if params.eps <= ratio::int(0) {
        bail!("epsilon must be positive");
    }
    let lb = certified_lower_bound(instance)?;
    let eps_text = ratio::display(&params.eps);
    let out = match algo {
        Algo::Lp2 => {
            let a = approx2_solve(instance)?;
            SolveOutput {
                algo,
                k: a.k,
                lb,
                ratio_bound: a.certified.then_some(2.0),
                flagged: !a.certified,
                details: json!({ "K_lp": a.k_lp, "rounds": a.rounds }),
                lp: Some(a.lp),
                schedule: a.schedule,
            }
        }
        Algo::Ptas => {
            let mut opts = PtasOptions {
                time_budget: params.time_budget,
                ..PtasOptions::default()
            };
            if params.oracle_batching {
                opts.oracle_schedule = Some(oracle_schedule(instance, params)?);
                opts.internal_eps = Some(params.eps.clone());
            }
            let r = ptas_solve(instance, &params.eps, &opts)?;
            SolveOutput {
                algo,
                k: r.k,
                lb,
                ratio_bound: r.certified.then(|| one_plus(&params.eps)),
                flagged: !r.certified,
                details: json!({
                    "eps": eps_text,
                    "eps_internal": ratio::display(&r.eps_internal),
                    "k_hat": r.k_hat,
                    "ktilde": r.ktilde.as_ref().map(ratio::display),
                    "candidates": r.candidates,
                    "batchings_tried": r.batchings_tried,
                    "coarsened": r.coarsened,
                    "oracle_batching": params.oracle_batching,
                }),
                lp: None,
                schedule: r.schedule,
            }
        }
        Algo::Inversion => {
            let r = dayinv_approx(instance, &params.eps, &PtasOptions::default())?;
            SolveOutput {
                algo,
                k: r.k,
                lb,
                ratio_bound: r.certified_ratio,
                flagged: r.certified_ratio.is_none(),
                details: json!({
                    "eps": eps_text,
                    "used_ptas": r.used_ptas,
                    "inversion": r.certificate,
                }),
                lp: None,
                schedule: r.schedule,
            }
        }
        Algo::Qptas => {
            let Some(seed) = params.seed else {
                bail!("qptas needs an explicit --seed");
            };
            let mut opts = QptasOptions::default();
            if params.oracle_batching {
                opts.oracle_schedule = Some(oracle_schedule(instance, params)?);
                opts.internal_eps = Some(params.eps.clone());
            }
            let r = qptas_solve(instance, &params.eps, seed, &opts)?;
            let run = r.pipeline.as_ref().map(|p| {
                json!({
                    "ktilde": ratio::display(&p.ktilde),
                    "sigma": ratio::display(&p.sigma),
                    "k_ab": ratio::display(&p.k_ab),
                    "k_reduced": p.k_reduced,
                    "large_clients": p.large,
                    "tries": p.tries,
                    "lp_solves": p.lp_solves,
                    "stretch_bound_holds": p.stretch_bound_holds(),
                })
            });
            SolveOutput {
                algo,
                k: r.k,
                lb,
                ratio_bound: r.certified.then(|| one_plus(&params.eps)),
                flagged: !r.certified,
                details: json!({
                    "eps": eps_text,
                    "eps_internal": ratio::display(&r.eps_internal),
                    "seed": seed,
                    "coarsened": r.coarsened,
                    "reduction": r.reduction,
                    "replication": r.replication,
                    "replication_holds": r.replication.holds(),
                    "pipeline": run,
                    "used_fallback": r.used_fallback,
                }),
                lp: r.pipeline.map(|p| p.lp),
                schedule: r.schedule,
            }
        }
        Algo::Exact => {
            let r = brute_force_optimum(
                instance,
                Limits {
                    time_budget: params.time_budget,
                    ..Limits::default()
                },
            )?;
            SolveOutput {
                algo,
                k: r.optimum,
                lb: if r.certified { lb.max(r.optimum) } else { lb },
                ratio_bound: r.certified.then_some(1.0),
                flagged: !r.certified,
                details: json!({ "nodes_explored": r.nodes_explored, "optimal": r.certified }),
                lp: None,
                schedule: r.schedule,
            }
        }
    };
    debug_assert_eq!(objective(instance, &out.schedule)?, out.k);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_algorithm_on_e1() {
        let inst = Instance::day_invariant(vec![1, 2], 2).unwrap();
        let params = SolveParams {
            seed: Some(1),
            ..SolveParams::default()
        };
        for algo in Algo::ALL {
            let out = solve(&inst, algo, &params).unwrap();
            assert!(out.k >= 5, "{}", algo.name());
            assert_eq!(Algo::parse(algo.name()).unwrap(), algo);
        }
        assert_eq!(solve(&inst, Algo::Exact, &params).unwrap().k, 5);
    }

    #[test]
    fn qptas_requires_seed() {
        let inst = Instance::day_invariant(vec![1, 2], 2).unwrap();
        assert!(solve(&inst, Algo::Qptas, &SolveParams::default()).is_err());
    }

    #[test]
    fn output_is_a_schedule_file() {
        let inst = Instance::new(vec![vec![1, 2], vec![2, 1]]).unwrap();
        let out = solve(&inst, Algo::Lp2, &SolveParams::default()).unwrap();
        let back = Schedule::from_json(&out.to_json()).unwrap();
        assert_eq!(back, out.schedule);
    }
}

//! Benchmark suites: CSV report plus text Gantt charts for small runs.

use std::io::Write;
use std::time::{Duration, Instant};

use anyhow::Result;
use fairsched::exact::{brute_force_optimum, Limits};
use fairsched::model::evaluate_schedule;
use fairsched::ratio::Rational;
use fairsched::{Instance, Schedule, Time};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gen::{generate, Distribution, GenSpec};
use crate::solve::{solve, Algo, SolveParams};

/// Fixed CSV columns, in order.
pub const COLUMNS: [&str; 12] = [
    "instance_id",
    "algo",
    "n",
    "m",
    "day_invariant",
    "K",
    "lower_bound",
    "certified_ratio",
    "oracle_K",
    "empirical_ratio",
    "flagged",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance_id: usize,
    pub algo: &'static str,
    pub n: usize,
    pub m: usize,
    pub day_invariant: bool,
    #[serde(rename = "K")]
    pub k: Time,
    pub lower_bound: Time,
    pub certified_ratio: Option<f64>,
    #[serde(rename = "oracle_K")]
    pub oracle_k: Option<Time>,
    /// `K / K*` when the oracle ran, otherwise `K / lower_bound`.
    pub empirical_ratio: f64,
    pub flagged: bool,
    pub wall_ms: u128,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub count: usize,
    pub seed: u64,
    pub n_range: (usize, usize),
    pub m_range: (usize, usize),
    pub p_max: Time,
    pub algos: Vec<Algo>,
    pub eps: Rational,
    pub time_budget: Option<Duration>,
    /// Instances with `n <= oracle_max_n` are solved exactly for reference.
    pub oracle_max_n: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub gantt: Vec<String>,
}

impl BenchReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row)?;
        }
        if self.rows.is_empty() {
            out.write_record(COLUMNS)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// One row per day, one glyph per time unit: the last digit of the 1-based
/// client index.
pub fn gantt(instance: &Instance, schedule: &Schedule) -> Result<String> {
    evaluate_schedule(instance, schedule)?;
    let mut s = String::new();
    for i in 0..instance.m() {
        s.push_str(&format!("day {:>2} |", i + 1));
        for &j in schedule.order(i) {
            let glyph = char::from_digit(((j + 1) % 10) as u32, 10).expect("digit");
            s.extend(std::iter::repeat_n(glyph, instance.p(i, j) as usize));
        }
        s.push_str("|\n");
    }
    Ok(s)
}

pub fn suite_instances(cfg: &BenchConfig) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.count)
        .map(|_| {
            let spec = GenSpec {
                n: rng.gen_range(cfg.n_range.0..=cfg.n_range.1),
                m: rng.gen_range(cfg.m_range.0..=cfg.m_range.1),
                p_min: 1,
                p_max: cfg.p_max,
                day_invariant: rng.gen_bool(0.5),
                distribution: Distribution::Uniform,
                seed: rng.gen(),
            };
            generate(&spec)
        })
        .collect()
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    let params = SolveParams {
        eps: cfg.eps.clone(),
        seed: Some(cfg.seed),
        time_budget: cfg.time_budget,
        oracle_batching: false,
    };
    for (id, inst) in suite_instances(cfg)?.iter().enumerate() {
        let oracle = if inst.n() <= cfg.oracle_max_n {
            let r = brute_force_optimum(
                inst,
                Limits {
                    time_budget: cfg.time_budget,
                    ..Limits::default()
                },
            )?;
            r.certified.then_some(r.optimum)
        } else {
            None
        };
        for &algo in &cfg.algos {
            if matches!(algo, Algo::Inversion | Algo::Qptas) && !inst.is_day_invariant() {
                continue;
            }
            let start = Instant::now();
            let out = solve(inst, algo, &params)?;
            let wall_ms = start.elapsed().as_millis();
            let reference = oracle.unwrap_or(out.lb).max(1);
            report.rows.push(BenchRow {
                instance_id: id,
                algo: algo.name(),
                n: inst.n(),
                m: inst.m(),
                day_invariant: inst.is_day_invariant(),
                k: out.k,
                lower_bound: out.lb,
                certified_ratio: out.ratio_bound,
                oracle_k: oracle,
                empirical_ratio: out.k as f64 / reference as f64,
                flagged: out.flagged,
                wall_ms,
            });
            if inst.m() <= 4 && inst.n() <= 10 {
                report.gantt.push(format!(
                    "instance {id} algo {} K = {}\n{}",
                    algo.name(),
                    out.k,
                    gantt(inst, &out.schedule)?
                ));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairsched::ratio::frac;

    #[test]
    fn gantt_rows() {
        let inst = Instance::new(vec![vec![1, 2], vec![2, 1]]).unwrap();
        let s = Schedule::new(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(gantt(&inst, &s).unwrap(), "day  1 |122|\nday  2 |211|\n");
    }

    #[test]
    fn small_suite_respects_certified_ratios() {
        let cfg = BenchConfig {
            count: 6,
            seed: 9,
            n_range: (2, 4),
            m_range: (2, 3),
            p_max: 6,
            algos: Algo::ALL.to_vec(),
            eps: frac(1, 2),
            time_budget: None,
            oracle_max_n: 5,
        };
        let report = run_bench(&cfg).unwrap();
        assert!(!report.rows.is_empty());
        for row in &report.rows {
            assert!(row.oracle_k.is_some());
            assert!(row.empirical_ratio >= 1.0);
            if let Some(c) = row.certified_ratio {
                assert!(c + 1e-9 >= row.empirical_ratio, "{row:?}");
            }
        }
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&COLUMNS.join(",")));
    }
}

//! Quasi-polynomial approximation scheme for day-invariant instances.
//!
//! The horizon is first cut down to `D = ceil(6 ln(2n) / eps^2)` days when
//! `m` is large, and a `D`-day schedule is replicated afterwards. On the short
//! horizon a refined good batching (capacities from `eps^3 P` upwards) is
//! guessed, large clients get a guessed configuration each, and the
//! remaining clients are placed by a configuration LP followed by randomized
//! rounding until the assignment is `(1 + 2 eps)`-stretched.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx2::{approx2_solve, AUXILIARY_SIZE_LIMIT};
use crate::batching::{
    assignment_to_schedule, batching_from_schedule_on_grid, check_translation,
    enumerate_good_batchings, enumerate_valid_configurations, feasibility_report, Assignment,
    Batching, CapacityGrid, FeasibilityReport,
};
use crate::dayinv::two_day_inversion;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, Row, Sense, Status};
use crate::model::{best_closed_form_bound, objective, Instance, Schedule, Time};
use crate::ptas::estimate_ktilde;
use crate::ratio::{self, Rational};

/// A target of `eps` runs with `min(eps, 1) / 116`.
pub const CHAIN_FACTOR: u64 = 116;
pub const MAX_TRIES: u32 = 64;
pub const MAX_CONFIGURATIONS: usize = 100_000;
pub const MAX_PIN_GUESSES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DayReduction {
    pub days: usize,
    pub reps: usize,
    pub tail_days: usize,
    pub applied: bool,
}

impl DayReduction {
    pub fn identity(m: usize) -> Self {
        Self {
            days: m,
            reps: 1,
            tail_days: 0,
            applied: false,
        }
    }
}

/// `ceil(6 ln(2n) / eps^2)`.
pub fn reduced_day_count(n: usize, eps: &Rational) -> usize {
    let e = ratio::to_f64(eps);
    (6.0 * (2.0 * n as f64).ln() / (e * e)).ceil() as usize
}

pub fn plan_reduction(n: usize, m: usize, eps: &Rational) -> DayReduction {
    let e = ratio::to_f64(eps);
    let d = reduced_day_count(n, eps);
    if (m as f64) < (n as f64).ln() / e.powi(3) || d >= m {
        return DayReduction::identity(m);
    }
    DayReduction {
        days: d,
        reps: m / d,
        tail_days: m - (m / d) * d,
        applied: true,
    }
}

pub fn reduce_days(instance: &Instance, eps: &Rational) -> Result<(Instance, DayReduction)> {
    instance.require_day_invariant()?;
    let plan = plan_reduction(instance.n(), instance.m(), eps);
    Ok((instance.with_days(plan.days)?, plan))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReplicationCheck {
    pub k_reduced: Time,
    pub k_expanded: Time,
    /// `reps K(pi_D) + tail P`.
    pub bound: Time,
}

impl ReplicationCheck {
    pub fn holds(&self) -> bool {
        self.k_expanded <= self.bound
    }
}

/// Repeats a `D`-day schedule `reps` times and fills the tail with the
/// identity order.
pub fn expand(
    instance: &Instance,
    plan: &DayReduction,
    reduced: &Schedule,
) -> Result<(Schedule, ReplicationCheck)> {
    instance.require_day_invariant()?;
    let (n, m) = (instance.n(), instance.m());
    if reduced.days() != plan.days || plan.reps * plan.days + plan.tail_days != m {
        return Err(Error::Dimension(
            "reduction plan does not match schedule".into(),
        ));
    }
    let mut orders = Vec::with_capacity(m);
    for _ in 0..plan.reps {
        orders.extend(reduced.orders().iter().cloned());
    }
    orders.extend((0..plan.tail_days).map(|_| (0..n).collect::<Vec<_>>()));
    let schedule = Schedule::new(orders);
    let k_reduced = objective(&instance.with_days(plan.days)?, reduced)?;
    let k_expanded = objective(instance, &schedule)?;
    let bound = plan.reps as Time * k_reduced + plan.tail_days as Time * instance.total()?;
    Ok((
        schedule,
        ReplicationCheck {
            k_reduced,
            k_expanded,
            bound,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// Large clients by decreasing processing time.
    pub large: Vec<usize>,
    pub small: Vec<usize>,
    /// `eps^6 P / (6 ln(2 m beta))`.
    pub lambda: f64,
}

pub fn classify_clients(
    instance: &Instance,
    eps: &Rational,
    beta: usize,
) -> Result<Classification> {
    instance.require_day_invariant()?;
    let mb = instance.m() * beta;
    if mb == 0 {
        return Err(Error::InvalidParameter("m beta must be at least 1".into()));
    }
    let e = ratio::to_f64(eps);
    let lambda = e.powi(6) * instance.total()? as f64 / (6.0 * (2.0 * mb as f64).ln());
    let (mut large, small): (Vec<usize>, Vec<usize>) =
        (0..instance.n()).partition(|&j| instance.p(0, j) as f64 >= lambda);
    large.sort_by_key(|&j| (std::cmp::Reverse(instance.p(0, j)), j));
    Ok(Classification {
        large,
        small,
        lambda,
    })
}

/// `ceil(6 ln(2 m beta) / eps^6)`.
pub fn large_count_bound(eps: &Rational, m: usize, beta: usize) -> f64 {
    let e = ratio::to_f64(eps);
    (6.0 * (2.0 * (m * beta) as f64).ln() / e.powi(6)).ceil()
}

/// Configuration LP: one variable per (client, valid configuration).
#[derive(Debug, Clone)]
pub struct ConfigLp {
    pub lp: LinearProgram,
    pub configs: Vec<Vec<usize>>,
    pub n: usize,
}

impl ConfigLp {
    /// `pins` holds `(client, configuration index)` pairs. Processing times
    /// and capacities are divided by `P`.
    pub fn build(
        instance: &Instance,
        batching: &Batching,
        configs: Vec<Vec<usize>>,
        pins: &[(usize, usize)],
    ) -> Result<Self> {
        instance.require_day_invariant()?;
        if batching.days() != instance.m() {
            return Err(Error::Dimension(
                "batching and instance disagree on m".into(),
            ));
        }
        let (n, m, beta) = (instance.n(), instance.m(), batching.beta());
        let nc = configs.len();
        let scale = instance.total()?.max(1) as f64;
        let mut lp = LinearProgram::new();
        for j in 0..n {
            for c in 0..nc {
                lp.add_var(format!("x_{}_{}", j + 1, c + 1), 0.0, f64::INFINITY);
            }
        }
        for j in 0..n {
            let coeffs = (0..nc).map(|c| (j * nc + c, 1.0)).collect();
            lp.add_row(Row::new(format!("one_{}", j + 1), coeffs, Sense::Eq, 1.0));
        }
        for i in 0..m {
            for b in 0..beta {
                let mut coeffs = Vec::new();
                for (c, conf) in configs.iter().enumerate() {
                    if conf[i] == b {
                        for j in 0..n {
                            coeffs.push((j * nc + c, instance.p(i, j) as f64 / scale));
                        }
                    }
                }
                if coeffs.is_empty() {
                    continue;
                }
                let cap = ratio::to_f64(batching.capacity(i, b)) / scale;
                lp.add_row(Row::new(
                    format!("cap_{}_{}", i + 1, b + 1),
                    coeffs,
                    Sense::Le,
                    cap,
                ));
            }
        }
        for &(j, c) in pins {
            if j >= n || c >= nc {
                return Err(Error::Dimension("pin out of range".into()));
            }
            lp.add_row(Row::new(
                format!("pin_{}", j + 1),
                vec![(j * nc + c, 1.0)],
                Sense::Eq,
                1.0,
            ));
        }
        Ok(Self { lp, configs, n })
    }

    /// Feasible point as per-client weights over configurations, or `None`.
    pub fn solve(&self) -> Result<Option<ConfigLpSolution>> {
        if self.configs.is_empty() {
            return Ok(None);
        }
        let sol = solve_lp(&self.lp)?;
        if sol.status != Status::Optimal {
            return Ok(None);
        }
        let nc = self.configs.len();
        let weights = (0..self.n)
            .map(|j| {
                sol.x[j * nc..(j + 1) * nc]
                    .iter()
                    .map(|&v| v.max(0.0))
                    .collect()
            })
            .collect();
        Ok(Some(ConfigLpSolution {
            configs: self.configs.clone(),
            weights,
        }))
    }
}

pub fn solve_config_lp(
    instance: &Instance,
    batching: &Batching,
    configs: Vec<Vec<usize>>,
    pins: &[(usize, usize)],
) -> Result<Option<ConfigLpSolution>> {
    ConfigLp::build(instance, batching, configs, pins)?.solve()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigLpSolution {
    pub configs: Vec<Vec<usize>>,
    /// `weights[j][c]`, non-negative, summing to one up to round-off.
    pub weights: Vec<Vec<f64>>,
}

impl ConfigLpSolution {
    pub fn is_integral(&self) -> bool {
        self.weights
            .iter()
            .all(|w| w.iter().all(|&v| !(1e-9..=1.0 - 1e-9).contains(&v)))
    }

    /// One independent draw per client.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Assignment> {
        let m = self.configs.first().map_or(0, Vec::len);
        let chosen = self
            .weights
            .iter()
            .map(|w| {
                let dist = WeightedIndex::new(w)
                    .map_err(|e| Error::InvalidParameter(format!("bad LP weights: {e}")))?;
                Ok(self.configs[dist.sample(rng)].clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Assignment::from_configurations(&chosen, m))
    }
}

/// Generator for try `index` of trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u32, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((trial as u64) << 32) | index as u64);
    rng
}

/// `true` when every batch load is at most `(1 + 2 eps)` times its capacity.
pub fn is_accepted(report: &FeasibilityReport, eps: &Rational) -> bool {
    report.max_stretch <= ratio::int(1) + ratio::int(2) * eps
}

#[derive(Debug, Clone)]
pub struct Rounding {
    pub assignment: Assignment,
    pub report: FeasibilityReport,
    /// Draws used, including the accepted one.
    pub tries: u32,
}

/// Draws assignments until one is `(1 + 2 eps)`-stretched; `None` after
/// `max_tries` rejections.
#[allow(clippy::too_many_arguments)]
pub fn randomized_round(
    solution: &ConfigLpSolution,
    instance: &Instance,
    batching: &Batching,
    eps: &Rational,
    seed: u64,
    trial: u32,
    max_tries: u32,
) -> Result<Option<Rounding>> {
    for t in 0..max_tries {
        let mut rng = trial_rng(seed, trial, t);
        let assignment = solution.sample(&mut rng)?;
        let report = feasibility_report(batching, &assignment, instance)?;
        if is_accepted(&report, eps) {
            return Ok(Some(Rounding {
                assignment,
                report,
                tries: t + 1,
            }));
        }
    }
    Ok(None)
}

/// Pin guesses in lexicographic order: the first large client varies
/// slowest, configurations by increasing cost.
pub struct PinGuesses {
    large: Vec<usize>,
    configs: usize,
    digits: Vec<usize>,
    done: bool,
}

impl PinGuesses {
    pub fn new(large: &[usize], configs: usize) -> Self {
        Self {
            large: large.to_vec(),
            configs,
            digits: vec![0; large.len()],
            done: configs == 0 && !large.is_empty(),
        }
    }
}

impl Iterator for PinGuesses {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self
            .large
            .iter()
            .copied()
            .zip(self.digits.iter().copied())
            .collect();
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.configs {
                break;
            }
            self.digits[k] = 0;
        }
        Some(out)
    }
}

#[derive(Debug, Clone)]
pub struct QptasOptions {
    pub max_tries: u32,
    pub config_cap: usize,
    pub pin_cap: usize,
    /// Batchings tried per `K~` candidate after the seed batching.
    pub batching_limit: u64,
    pub max_grid: usize,
    pub internal_eps: Option<Rational>,
    /// Oracle mode: the structure batching and pins of this schedule on the
    /// reduced horizon, with `K~` equal to its objective.
    pub oracle_schedule: Option<Schedule>,
}

impl Default for QptasOptions {
    fn default() -> Self {
        Self {
            max_tries: MAX_TRIES,
            config_cap: MAX_CONFIGURATIONS,
            pin_cap: 1_000,
            batching_limit: 20,
            max_grid: 16,
            internal_eps: None,
            oracle_schedule: None,
        }
    }
}

impl QptasOptions {
    pub fn with_internal_eps(eps: Rational) -> Self {
        Self {
            internal_eps: Some(eps),
            ..Self::default()
        }
    }
}

/// Data of a successful configuration-LP run on the reduced horizon.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub ktilde: Rational,
    pub batching: Batching,
    pub assignment: Assignment,
    pub large: usize,
    pub sigma: Rational,
    pub k_ab: Rational,
    pub k_reduced: Time,
    pub tries: u32,
    pub lp_solves: usize,
    /// The configuration LP that produced the assignment.
    pub lp: LinearProgram,
}

impl PipelineRun {
    /// `K(pi) <= sigma K(A,B)`.
    pub fn stretch_bound_holds(&self) -> bool {
        ratio::int(self.k_reduced) <= &self.sigma * &self.k_ab
    }
}

#[derive(Debug, Clone)]
pub struct QptasResult {
    pub schedule: Schedule,
    pub k: Time,
    /// `K <= (1 + eps) LB` for a certified lower bound `LB`.
    pub certified: bool,
    pub lower_bound: Time,
    pub eps_internal: Rational,
    pub coarsened: bool,
    pub reduction: DayReduction,
    pub replication: ReplicationCheck,
    pub pipeline: Option<PipelineRun>,
    /// The two-day inversion beat (or replaced) the pipeline.
    pub used_fallback: bool,
}

fn grid_len_estimate(eps: &Rational) -> f64 {
    let e = ratio::to_f64(eps);
    (1.0 / e.powi(3)).ln() / (1.0 + e).ln() + 1.0
}

struct Search<'a> {
    reduced: &'a Instance,
    eps: &'a Rational,
    seed: u64,
    opts: &'a QptasOptions,
    trial: u32,
    lp_solves: usize,
}

impl Search<'_> {
    /// Pins, LP and rounding on one batching.
    fn try_batching(
        &mut self,
        batching: &Batching,
        ktilde: &Rational,
        pins_from: Option<&Assignment>,
    ) -> Result<Option<PipelineRun>> {
        let threshold = (ratio::int(1) + ratio::int(29) * self.eps) * ktilde;
        let configs = match enumerate_valid_configurations(
            batching,
            &threshold,
            self.opts.config_cap.min(MAX_CONFIGURATIONS),
        ) {
            Ok(c) => c,
            Err(Error::CapExceeded(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let class = classify_clients(self.reduced, self.eps, batching.beta())?;
        let guesses: Box<dyn Iterator<Item = Vec<(usize, usize)>>> = match pins_from {
            Some(a) => {
                let mut pins = Vec::new();
                for &j in &class.large {
                    match configs.iter().position(|c| *c == a.configuration(j)) {
                        Some(k) => pins.push((j, k)),
                        None => return Ok(None),
                    }
                }
                Box::new(std::iter::once(pins))
            }
            None => Box::new(
                PinGuesses::new(&class.large, configs.len())
                    .take(self.opts.pin_cap.min(MAX_PIN_GUESSES)),
            ),
        };
        let lp_template = ConfigLp::build(self.reduced, batching, configs, &[])?;
        for pins in guesses {
            let mut lp = lp_template.clone();
            for &(j, c) in &pins {
                let nc = lp.configs.len();
                lp.lp.add_row(Row::new(
                    format!("pin_{}", j + 1),
                    vec![(j * nc + c, 1.0)],
                    Sense::Eq,
                    1.0,
                ));
            }
            self.lp_solves += 1;
            let Some(sol) = lp.solve()? else { continue };
            self.trial += 1;
            let Some(r) = randomized_round(
                &sol,
                self.reduced,
                batching,
                self.eps,
                self.seed,
                self.trial,
                self.opts.max_tries,
            )?
            else {
                continue;
            };
            let (schedule, check) = check_translation(batching, &r.assignment, self.reduced)?;
            debug_assert_eq!(objective(self.reduced, &schedule)?, check.k_schedule);
            return Ok(Some(PipelineRun {
                ktilde: ktilde.clone(),
                batching: batching.clone(),
                assignment: r.assignment,
                large: class.large.len(),
                sigma: r.report.max_stretch,
                k_ab: check.k_ab,
                k_reduced: check.k_schedule,
                tries: r.tries,
                lp_solves: self.lp_solves,
                lp: lp.lp,
            }));
        }
        Ok(None)
    }
}

/// `(1 + eps)`-approximation for day-invariant instances. Caps turn the
/// run into a best-effort search; the two-day inversion is kept whenever it
/// is better.
pub fn qptas_solve(
    instance: &Instance,
    eps: &Rational,
    seed: u64,
    opts: &QptasOptions,
) -> Result<QptasResult> {
    instance.require_day_invariant()?;
    if *eps <= ratio::int(0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let (n, m) = (instance.n(), instance.m());
    let eps_target = opts.internal_eps.clone().unwrap_or_else(|| {
        let capped = if *eps > ratio::int(1) {
            ratio::int(1)
        } else {
            eps.clone()
        };
        capped / ratio::int(CHAIN_FACTOR)
    });
    let mut eps_run = eps_target;
    let mut coarsened = false;
    if opts.oracle_schedule.is_none() {
        while grid_len_estimate(&eps_run) > opts.max_grid as f64 {
            eps_run *= ratio::int(2);
            coarsened = true;
        }
    }

    let identity: Vec<usize> = (0..n).collect();
    let full_inversion = two_day_inversion(instance, &identity)?;
    let k_full_inversion = objective(instance, &full_inversion)?;

    let (reduced, plan) = match &opts.oracle_schedule {
        Some(s) if s.days() == m => (instance.clone(), DayReduction::identity(m)),
        _ => reduce_days(instance, &eps_run)?,
    };
    let mut best_reduced = two_day_inversion(&reduced, &identity)?;
    let best_reduced_k = objective(&reduced, &best_reduced)?;

    let mut pipeline = None;
    let mut from_pipeline = false;
    if n > 1 {
        let mut search = Search {
            reduced: &reduced,
            eps: &eps_run,
            seed,
            opts,
            trial: 0,
            lp_solves: 0,
        };
        let grid = CapacityGrid::day_invariant(&eps_run, reduced.total()?)?;
        if let Some(oracle) = &opts.oracle_schedule {
            let kt = ratio::int(objective(&reduced, oracle)?);
            let (b, a) = batching_from_schedule_on_grid(&reduced, oracle, &grid)?;
            pipeline = search.try_batching(&b, &kt, Some(&a))?;
        } else {
            let mut k_hat = best_reduced_k;
            if n * plan.days <= AUXILIARY_SIZE_LIMIT {
                k_hat = k_hat.min(approx2_solve(&reduced)?.k);
            }
            'outer: for kt in estimate_ktilde(k_hat, &eps_run) {
                let (seed_batching, witness) =
                    batching_from_schedule_on_grid(&reduced, &best_reduced, &grid)?;
                if let Some(run) = search.try_batching(&seed_batching, &kt, Some(&witness))? {
                    pipeline = Some(run);
                    break 'outer;
                }
                let stream = enumerate_good_batchings(&grid, reduced.m(), opts.batching_limit);
                for b in std::iter::once(seed_batching).chain(stream) {
                    if let Some(run) = search.try_batching(&b, &kt, None)? {
                        pipeline = Some(run);
                        break 'outer;
                    }
                }
            }
        }
        if let Some(run) = &pipeline {
            if run.k_reduced < best_reduced_k {
                best_reduced = assignment_to_schedule(&run.batching, &run.assignment, &reduced)?;
                from_pipeline = true;
            }
        }
    }

    let (expanded, replication) = expand(instance, &plan, &best_reduced)?;
    let (schedule, k, used_fallback) = if replication.k_expanded <= k_full_inversion {
        (expanded, replication.k_expanded, !from_pipeline)
    } else {
        (full_inversion, k_full_inversion, true)
    };

    let mut lower_bound = best_closed_form_bound(instance);
    if n * m <= AUXILIARY_SIZE_LIMIT {
        let a = approx2_solve(instance)?;
        if a.certified {
            lower_bound = lower_bound.max(a.integer_lower_bound());
        }
    }
    let certified = ratio::int(k) <= (ratio::int(1) + eps) * ratio::int(lower_bound);

    Ok(QptasResult {
        schedule,
        k,
        certified,
        lower_bound,
        eps_internal: eps_run,
        coarsened,
        reduction: plan,
        replication,
        pipeline,
        used_fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force_optimum, Limits};
    use crate::ratio::{frac, int};

    #[test]
    fn day_count_arithmetic() {
        assert_eq!(reduced_day_count(4, &frac(1, 2)), 50);
        let plan = plan_reduction(4, 10_000, &frac(1, 2));
        assert_eq!(
            plan,
            DayReduction {
                days: 50,
                reps: 200,
                tail_days: 0,
                applied: true
            }
        );
        assert_eq!(plan_reduction(4, 5, &frac(1, 2)), DayReduction::identity(5));
        let p = plan_reduction(4, 10_007, &frac(1, 2));
        assert_eq!((p.reps, p.tail_days), (200, 7));
    }

    #[test]
    fn expansion_respects_replication_bound() {
        let inst = Instance::day_invariant(vec![3, 1, 4, 1], 10_007).unwrap();
        let (reduced, plan) = reduce_days(&inst, &frac(1, 2)).unwrap();
        assert_eq!(reduced.m(), 50);
        let s = two_day_inversion(&reduced, &[2, 0, 3, 1]).unwrap();
        let (full, check) = expand(&inst, &plan, &s).unwrap();
        assert_eq!(full.days(), 10_007);
        assert!(check.holds());
        assert_eq!(check.bound, 200 * check.k_reduced + 7 * 9);
    }

    #[test]
    fn classification() {
        let inst = Instance::day_invariant(vec![100, 1, 1, 1], 2).unwrap();
        let c = classify_clients(&inst, &frac(1, 2), 3).unwrap();
        assert!(c.large.contains(&0));
        assert!(c.large.len() as f64 <= large_count_bound(&frac(1, 2), 2, 3));
        let flat = Instance::day_invariant(vec![1; 2000], 2).unwrap();
        let c = classify_clients(&flat, &frac(1, 2), 3).unwrap();
        assert!(c.large.is_empty());
    }

    #[test]
    fn pin_guess_order() {
        let g: Vec<_> = PinGuesses::new(&[2, 0], 2).collect();
        assert_eq!(
            g,
            vec![
                vec![(2, 0), (0, 0)],
                vec![(2, 0), (0, 1)],
                vec![(2, 1), (0, 0)],
                vec![(2, 1), (0, 1)]
            ]
        );
        assert_eq!(PinGuesses::new(&[], 5).count(), 1);
    }

    #[test]
    fn lp_from_structure_batching_is_feasible() {
        let inst = Instance::day_invariant(vec![3, 1, 2], 2).unwrap();
        let opt = brute_force_optimum(&inst, Limits::default()).unwrap();
        let eps = frac(1, 2);
        let grid = CapacityGrid::day_invariant(&eps, inst.total().unwrap()).unwrap();
        let (b, a) = batching_from_schedule_on_grid(&inst, &opt.schedule, &grid).unwrap();
        let threshold = (int(1) + int(29) * &eps) * int(opt.optimum);
        let configs = enumerate_valid_configurations(&b, &threshold, MAX_CONFIGURATIONS).unwrap();
        let pins: Vec<_> = (0..3)
            .map(|j| {
                (
                    j,
                    configs
                        .iter()
                        .position(|c| *c == a.configuration(j))
                        .unwrap(),
                )
            })
            .collect();
        let sol = solve_config_lp(&inst, &b, configs, &pins).unwrap().unwrap();
        assert!(sol.is_integral());
        let r = randomized_round(&sol, &inst, &b, &eps, 7, 0, MAX_TRIES)
            .unwrap()
            .unwrap();
        assert_eq!(r.tries, 1);
        assert_eq!(r.assignment, a);
    }

    #[test]
    fn undersized_capacities_are_infeasible() {
        let inst = Instance::day_invariant(vec![3, 3], 2).unwrap();
        let b = Batching::new(vec![vec![int(1), int(1)], vec![int(1), int(1)]]).unwrap();
        let configs = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        assert!(solve_config_lp(&inst, &b, configs, &[]).unwrap().is_none());
    }

    #[test]
    fn fair_coin_sampling() {
        let sol = ConfigLpSolution {
            configs: vec![vec![0], vec![1]],
            weights: vec![vec![0.5, 0.5]],
        };
        let draws = 10_000;
        let ones = (0..draws)
            .filter(|&t| {
                let a = sol.sample(&mut trial_rng(11, 0, t)).unwrap();
                a.configuration(0) == vec![1]
            })
            .count() as f64;
        let sd = (draws as f64 * 0.25).sqrt();
        assert!((ones - draws as f64 / 2.0).abs() <= 3.0 * sd);
    }

    #[test]
    fn single_client_is_exact() {
        let inst = Instance::day_invariant(vec![5], 3).unwrap();
        let r = qptas_solve(&inst, &frac(1, 2), 1, &QptasOptions::default()).unwrap();
        assert_eq!(r.k, 15);
        assert!(r.certified);
    }

    #[test]
    fn oracle_pipeline_small() {
        let inst = Instance::day_invariant(vec![4, 2, 1, 3], 2).unwrap();
        let opt = brute_force_optimum(&inst, Limits::default()).unwrap();
        let eps = frac(1, 2);
        let opts = QptasOptions {
            oracle_schedule: Some(opt.schedule.clone()),
            ..QptasOptions::with_internal_eps(eps.clone())
        };
        let r = qptas_solve(&inst, &eps, 3, &opts).unwrap();
        let run = r.pipeline.as_ref().unwrap();
        assert!(run.stretch_bound_holds());
        assert!(run.sigma <= int(2));
        assert!(r.k >= opt.optimum);
        let chain = (int(1) + int(2) * &eps) * (int(1) + int(29) * &eps);
        assert!(int(r.k) <= chain * int(opt.optimum));
    }

    #[test]
    fn long_horizon_reports_replication() {
        let inst = Instance::day_invariant(vec![3, 1, 4, 1], 10_000).unwrap();
        let opts = QptasOptions::with_internal_eps(frac(1, 2));
        let r = qptas_solve(&inst, &frac(1, 2), 5, &opts).unwrap();
        assert_eq!(r.reduction.days, 50);
        assert_eq!(r.reduction.reps, 200);
        assert!(r.replication.holds());
        assert_eq!(objective(&inst, &r.schedule).unwrap(), r.k);
    }
}

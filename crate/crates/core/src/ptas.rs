//! Approximation scheme for day-dependent instances with few days.
//!
//! For each guess `K~` of the optimum and each good batching, a dynamic
//! program over clients decides whether every client can be given a valid
//! configuration (one batch per day, batch ends summing to at most
//! `(1+45 eps) K~`) without exceeding any capacity in rounded-down
//! processing times. Loads are stored as integer multiples of the quantum
//! `Delta / n`.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use crate::approx2::approx2_solve;
use crate::batching::{
    assignment_to_schedule, batching_from_schedule_on_grid, count_good_batchings,
    enumerate_good_batchings, enumerate_valid_configurations, feasibility_report, Assignment,
    Batching, CapacityGrid,
};
use crate::error::{Error, Result};
use crate::model::{best_closed_form_bound, objective, spt_order, Instance, Schedule, Time};
use crate::ratio::{self, Rational};

/// Overall factor of the analysis: a target of `eps` runs with `eps / 135`.
pub const CHAIN_FACTOR: u64 = 135;

#[derive(Debug, Clone)]
pub struct PtasOptions {
    /// Batchings tried per `K~` candidate.
    pub batching_limit: u64,
    pub config_cap: usize,
    /// Explored plus memoized DP states per batching.
    pub state_cap: u64,
    /// Largest capacity grid attempted; finer grids are coarsened and the
    /// result is flagged.
    pub max_grid: usize,
    /// Use this accuracy directly instead of `eps / 135`.
    pub internal_eps: Option<Rational>,
    /// Oracle mode: only the structure batching of this schedule is tried.
    pub oracle_schedule: Option<Schedule>,
    pub time_budget: Option<Duration>,
}

impl Default for PtasOptions {
    fn default() -> Self {
        Self {
            batching_limit: 200,
            config_cap: 1_000_000,
            state_cap: 10_000_000,
            max_grid: 16,
            internal_eps: None,
            oracle_schedule: None,
            time_budget: None,
        }
    }
}

impl PtasOptions {
    /// Runs with accuracy `eps` used as is inside the construction.
    pub fn with_internal_eps(eps: Rational) -> Self {
        Self {
            internal_eps: Some(eps),
            ..Self::default()
        }
    }
}

/// `(1+eps)^t K^/2` for every `t >= 0` with the value at most `(1+eps) K^`.
pub fn estimate_ktilde(k_hat: Time, eps: &Rational) -> Vec<Rational> {
    let factor = ratio::int(1) + eps.clone();
    let top = ratio::int(k_hat) * &factor;
    let mut v = ratio::frac(k_hat as i64, 2);
    let mut out = Vec::new();
    while v <= top {
        out.push(v.clone());
        v *= &factor;
    }
    out
}

/// A DP instance in quantum units.
#[derive(Debug, Clone)]
pub struct DpProblem {
    pub m: usize,
    pub beta: usize,
    /// `caps[i * beta + b]`.
    pub caps: Vec<u64>,
    /// `pdown[j][i]`.
    pub pdown: Vec<Vec<u64>>,
    pub configs: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpOutcome {
    /// Index into `configs` for every client.
    Assigned(Vec<usize>),
    Infeasible,
    Aborted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DpStats {
    pub nodes: u64,
    pub memo: u64,
}

struct DpSearch<'a> {
    prob: &'a DpProblem,
    order: Vec<usize>,
    /// `rest[d][i]`: rounded load of clients `order[d..]` on day `i`.
    rest: Vec<Vec<u64>>,
    loads: Vec<u64>,
    free: Vec<u64>,
    chosen: Vec<usize>,
    failed: HashSet<(usize, Vec<u64>)>,
    stats: DpStats,
    state_cap: u64,
    aborted: bool,
}

impl DpSearch<'_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        if (0..self.prob.m).any(|i| self.free[i] < self.rest[depth][i]) {
            return false;
        }
        if self.failed.contains(&(depth, self.loads.clone())) {
            return false;
        }
        if self.stats.nodes + self.stats.memo >= self.state_cap {
            self.aborted = true;
            return false;
        }
        self.stats.nodes += 1;
        let j = self.order[depth];
        let beta = self.prob.beta;
        for (ci, c) in self.prob.configs.iter().enumerate() {
            let fits = c.iter().enumerate().all(|(i, &b)| {
                self.loads[i * beta + b] + self.prob.pdown[j][i] <= self.prob.caps[i * beta + b]
            });
            if !fits {
                continue;
            }
            for (i, &b) in c.iter().enumerate() {
                self.loads[i * beta + b] += self.prob.pdown[j][i];
                self.free[i] -= self.prob.pdown[j][i];
            }
            self.chosen[j] = ci;
            let ok = self.run(depth + 1);
            for (i, &b) in c.iter().enumerate() {
                self.loads[i * beta + b] -= self.prob.pdown[j][i];
                self.free[i] += self.prob.pdown[j][i];
            }
            if ok {
                return true;
            }
            if self.aborted {
                return false;
            }
        }
        self.failed.insert((depth, self.loads.clone()));
        self.stats.memo += 1;
        false
    }
}

/// Depth-first evaluation of the reachability table, memoizing states known
/// to be dead ends. Clients are processed by decreasing total rounded load.
pub fn dp_search(prob: &DpProblem, state_cap: u64) -> (DpOutcome, DpStats) {
    let n = prob.pdown.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(prob.pdown[j].iter().sum::<u64>()), j));
    let mut rest = vec![vec![0u64; prob.m]; n + 1];
    for d in (0..n).rev() {
        for i in 0..prob.m {
            rest[d][i] = rest[d + 1][i] + prob.pdown[order[d]][i];
        }
    }
    let free = (0..prob.m)
        .map(|i| prob.caps[i * prob.beta..(i + 1) * prob.beta].iter().sum())
        .collect();
    let mut s = DpSearch {
        prob,
        order,
        rest,
        loads: vec![0; prob.m * prob.beta],
        free,
        chosen: vec![0; n],
        failed: HashSet::new(),
        stats: DpStats::default(),
        state_cap,
        aborted: false,
    };
    let ok = s.run(0);
    let outcome = if ok {
        DpOutcome::Assigned(s.chosen)
    } else if s.aborted {
        DpOutcome::Aborted
    } else {
        DpOutcome::Infeasible
    };
    (outcome, s.stats)
}

#[derive(Debug, Clone)]
pub struct DpResult {
    pub assignment: Option<Assignment>,
    pub aborted: bool,
    pub stats: DpStats,
    pub valid_configurations: usize,
    /// `Delta / n`.
    pub quantum: Rational,
    /// `Delta = eps^3 K~ / m^2`.
    pub delta: Rational,
}

/// `Delta = eps^3 K~ / m^2`.
pub fn delta(eps: &Rational, ktilde: &Rational, m: usize) -> Rational {
    ratio::pow(eps, 3) * ktilde / ratio::int((m * m) as u64)
}

/// Validity threshold `(1 + 45 eps) K~`.
pub fn validity_threshold(eps: &Rational, ktilde: &Rational) -> Rational {
    (ratio::int(1) + ratio::int(45) * eps) * ktilde
}

/// Finds a `Delta`-feasible assignment into `batching` using only valid
/// configurations, or reports that none exists in rounded processing times.
pub fn dp_assign(
    instance: &Instance,
    batching: &Batching,
    eps: &Rational,
    ktilde: &Rational,
    opts: &PtasOptions,
) -> Result<DpResult> {
    let (n, m) = (instance.n(), instance.m());
    if batching.days() != m {
        return Err(Error::Dimension(
            "batching and instance disagree on m".into(),
        ));
    }
    let delta = delta(eps, ktilde, m);
    let quantum = &delta / ratio::int(n as u64);
    let configs = enumerate_valid_configurations(
        batching,
        &validity_threshold(eps, ktilde),
        opts.config_cap,
    )?;
    let beta = batching.beta();
    let caps = (0..m)
        .flat_map(|i| (0..beta).map(move |b| (i, b)))
        .map(|(i, b)| ratio::floor_div(batching.capacity(i, b), &quantum))
        .collect();
    let pdown = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| ratio::floor_div(&ratio::int(instance.p(i, j)), &quantum))
                .collect()
        })
        .collect();
    let prob = DpProblem {
        m,
        beta,
        caps,
        pdown,
        configs,
    };
    let (outcome, stats) = dp_search(&prob, opts.state_cap);
    let assignment = match &outcome {
        DpOutcome::Assigned(idx) => {
            let chosen: Vec<Vec<usize>> = idx.iter().map(|&k| prob.configs[k].clone()).collect();
            Some(Assignment::from_configurations(&chosen, m))
        }
        _ => None,
    };
    Ok(DpResult {
        assignment,
        aborted: outcome == DpOutcome::Aborted,
        stats,
        valid_configurations: prob.configs.len(),
        quantum,
        delta,
    })
}

#[derive(Debug, Clone)]
pub struct PtasResult {
    pub schedule: Schedule,
    pub k: Time,
    /// `true` when the `(1+eps)` guarantee holds for this run.
    pub certified: bool,
    pub eps_internal: Rational,
    /// Upper end `K^` of the 2-approximation sandwich.
    pub k_hat: Time,
    pub ktilde: Option<Rational>,
    pub candidates: usize,
    pub batchings_tried: u64,
    /// Set when the grid was coarsened to stay within `max_grid`.
    pub coarsened: bool,
    /// Certified lower bound on the optimum used for the a posteriori check.
    pub lower_bound: Time,
}

enum Attempt {
    Found(Schedule, Time),
    Failed { aborted: bool },
}

fn try_dp(
    instance: &Instance,
    batching: &Batching,
    eps: &Rational,
    ktilde: &Rational,
    opts: &PtasOptions,
) -> Result<Attempt> {
    let dp = match dp_assign(instance, batching, eps, ktilde, opts) {
        Ok(dp) => dp,
        Err(Error::CapExceeded(_)) => return Ok(Attempt::Failed { aborted: true }),
        Err(e) => return Err(e),
    };
    match dp.assignment {
        Some(a) => {
            debug_assert!(feasibility_report(batching, &a, instance)
                .map(|r| r.max_additive_overflow <= dp.delta)
                .unwrap_or(false));
            let schedule = assignment_to_schedule(batching, &a, instance)?;
            let k = objective(instance, &schedule)?;
            Ok(Attempt::Found(schedule, k))
        }
        None => Ok(Attempt::Failed {
            aborted: dp.aborted,
        }),
    }
}

fn grid_size_estimate(eps: &Rational, m: usize) -> f64 {
    let e = ratio::to_f64(eps);
    ((m * m) as f64 / e.powi(3)).ln() / (1.0 + e).ln() + 2.0
}

/// `(1 + eps)`-approximation for day-dependent instances.
///
/// Candidates `K~` are processed in increasing order; the first candidate
/// where the DP succeeds ends the search. The result is certified when that
/// success happened after every smaller candidate was enumerated in full, or
/// when `K <= (1 + eps) LB` for a certified lower bound `LB`.
pub fn ptas_solve(instance: &Instance, eps: &Rational, opts: &PtasOptions) -> Result<PtasResult> {
    if *eps <= ratio::int(0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let (n, m) = (instance.n(), instance.m());
    let eps_target = opts
        .internal_eps
        .clone()
        .unwrap_or_else(|| eps / ratio::int(CHAIN_FACTOR));

    if m == 1 || n == 1 {
        let schedule = Schedule::new((0..m).map(|i| spt_order(instance, i)).collect());
        let k = objective(instance, &schedule)?;
        return Ok(PtasResult {
            schedule,
            k,
            certified: true,
            eps_internal: eps_target,
            k_hat: k,
            ktilde: None,
            candidates: 0,
            batchings_tried: 0,
            coarsened: false,
            lower_bound: k,
        });
    }

    let start = Instant::now();
    let approx = approx2_solve(instance)?;
    let mut best_schedule = approx.schedule.clone();
    let mut best_k = approx.k;
    let k_hat = approx.k;

    let mut eps_run = eps_target.clone();
    let mut coarsened = false;
    while grid_size_estimate(&eps_run, m) > opts.max_grid as f64 {
        eps_run *= ratio::int(2);
        coarsened = true;
    }

    let candidates = estimate_ktilde(k_hat, &eps_run);
    let mut all_smaller_complete = approx.certified && !coarsened;
    let mut certified = false;
    let mut ktilde_used = None;
    let mut tried = 0u64;
    let out_of_time = || opts.time_budget.is_some_and(|b| start.elapsed() > b);

    // Pass 1 runs candidates in increasing order, enumerating a grid in
    // full only when it fits the batching limit; otherwise just the seed
    // batching is tried and the truncated stream is deferred to pass 2.
    let mut deferred: Vec<(Rational, CapacityGrid)> = Vec::new();
    let mut found = false;
    'candidates: for kt in &candidates {
        let grid = match CapacityGrid::day_dependent(&eps_run, kt, m) {
            Ok(g) => g,
            Err(Error::CapExceeded(_)) => {
                all_smaller_complete = false;
                continue;
            }
            Err(e) => return Err(e),
        };
        let seed = match &opts.oracle_schedule {
            Some(oracle) => Some(batching_from_schedule_on_grid(instance, oracle, &grid)?.0),
            None => batching_from_schedule_on_grid(instance, &approx.schedule, &grid)
                .ok()
                .map(|(b, _)| b),
        };
        let fits = opts.oracle_schedule.is_none()
            && count_good_batchings(&grid, m).is_some_and(|c| c <= opts.batching_limit as u128);
        let mut complete = fits;
        let stream = fits.then(|| enumerate_good_batchings(&grid, m, opts.batching_limit));
        for batching in seed.into_iter().chain(stream.into_iter().flatten()) {
            if out_of_time() {
                break 'candidates;
            }
            tried += 1;
            match try_dp(instance, &batching, &eps_run, kt, opts)? {
                Attempt::Found(schedule, k) => {
                    if k < best_k {
                        best_k = k;
                        best_schedule = schedule;
                    }
                    certified = all_smaller_complete && opts.oracle_schedule.is_none();
                    ktilde_used = Some(kt.clone());
                    found = true;
                    break 'candidates;
                }
                Attempt::Failed { aborted } => complete &= !aborted,
            }
        }
        if !fits && opts.oracle_schedule.is_none() {
            deferred.push((kt.clone(), grid));
        }
        all_smaller_complete &= complete;
    }

    if !found {
        'deferred: for (kt, grid) in &deferred {
            for batching in enumerate_good_batchings(grid, m, opts.batching_limit) {
                if out_of_time() {
                    break 'deferred;
                }
                tried += 1;
                if let Attempt::Found(schedule, k) =
                    try_dp(instance, &batching, &eps_run, kt, opts)?
                {
                    if k < best_k {
                        best_k = k;
                        best_schedule = schedule;
                    }
                    ktilde_used = Some(kt.clone());
                    break 'deferred;
                }
            }
        }
    }

    let mut lower_bound = best_closed_form_bound(instance);
    if approx.certified {
        lower_bound = lower_bound.max(approx.integer_lower_bound());
    }
    certified |= ratio::int(best_k) <= (ratio::int(1) + eps) * ratio::int(lower_bound);

    Ok(PtasResult {
        schedule: best_schedule,
        k: best_k,
        certified,
        lower_bound,
        eps_internal: eps_run,
        k_hat,
        ktilde: ktilde_used,
        candidates: candidates.len(),
        batchings_tried: tried,
        coarsened,
    })
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub batching: Batching,
    pub witness: Assignment,
    pub dp: DpResult,
    pub schedule: Option<Schedule>,
    pub k: Option<Time>,
}

/// The DP on the structure batching of a known schedule `reference`, with
/// `K~ = ktilde` and accuracy `eps` used as is.
pub fn oracle_dp(
    instance: &Instance,
    reference: &Schedule,
    eps: &Rational,
    ktilde: &Rational,
    opts: &PtasOptions,
) -> Result<OracleRun> {
    let grid = CapacityGrid::day_dependent(eps, ktilde, instance.m())?;
    let (batching, witness) = batching_from_schedule_on_grid(instance, reference, &grid)?;
    let dp = dp_assign(instance, &batching, eps, ktilde, opts)?;
    let (schedule, k) = match &dp.assignment {
        Some(a) => {
            let s = assignment_to_schedule(&batching, a, instance)?;
            let k = objective(instance, &s)?;
            (Some(s), Some(k))
        }
        None => (None, None),
    };
    Ok(OracleRun {
        batching,
        witness,
        dp,
        schedule,
        k,
    })
}

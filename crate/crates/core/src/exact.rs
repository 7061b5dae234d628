//! Exact optimum by depth-first branch and bound over daily permutations.
//!
//! Days are filled position by position. The last day is never branched on:
//! once the accumulated totals are fixed, ordering the remaining jobs by
//! decreasing accumulated total minimizes the maximum (it is a single-machine
//! maximum-lateness problem with due dates `-acc[j]`).

use std::time::{Duration, Instant};

use crate::approx2::approx2_solve;
use crate::dayinv::two_day_inversion;
use crate::error::Result;
use crate::model::{objective, Instance, Schedule, Time};

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_nodes: u64,
    pub time_budget: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_nodes: 200_000_000,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub optimum: Time,
    pub schedule: Schedule,
    pub nodes_explored: u64,
    /// `false` when a limit stopped the search; `optimum` is then only the
    /// best incumbent.
    pub certified: bool,
}

struct Search<'a> {
    inst: &'a Instance,
    n: usize,
    m: usize,
    /// `suffix_work[i][j]`: sum of `p[i'][j]` over days `i' > i`.
    suffix_work: Vec<Vec<Time>>,
    /// Sum over days `i' > i` of the minimum total completion time of day `i'`.
    suffix_spt: Vec<Time>,
    /// Clients of each day sorted by processing time.
    spt: Vec<Vec<usize>>,
    acc: Vec<Time>,
    placed: Vec<bool>,
    orders: Vec<Vec<usize>>,
    /// Symmetry breaking for the current day: client `k` may only be placed
    /// after `pred[k]`.
    pred: Vec<Option<usize>>,
    best: Time,
    found_leaf: bool,
    best_orders: Option<Vec<Vec<usize>>>,
    nodes: u64,
    limits: Limits,
    start: Instant,
    aborted: bool,
}

impl Search<'_> {
    fn prunes(&self, lb: Time) -> bool {
        if self.found_leaf {
            lb >= self.best
        } else {
            lb > self.best
        }
    }

    fn lower_bound(&self, day: usize, t: Time) -> Time {
        let p = self.inst.day(day);
        let mut per_client = 0;
        let mut sum: Time = self.acc.iter().sum();
        for j in 0..self.n {
            let v = if self.placed[j] {
                self.acc[j]
            } else {
                self.acc[j] + t + p[j]
            };
            per_client = per_client.max(v + self.suffix_work[day][j]);
        }
        let mut clock = t;
        for &j in &self.spt[day] {
            if !self.placed[j] {
                clock += p[j];
                sum += clock;
            }
        }
        sum += self.suffix_spt[day];
        per_client.max(sum.div_ceil(self.n as Time))
    }

    fn start_day(&mut self, day: usize) {
        self.placed.iter_mut().for_each(|v| *v = false);
        self.orders[day].clear();
        for k in 0..self.n {
            self.pred[k] = (0..k).rev().find(|&j| {
                self.acc[j] == self.acc[k]
                    && (day..self.m).all(|i| self.inst.p(i, j) == self.inst.p(i, k))
            });
        }
    }

    fn finish_last_day(&mut self, t: Time) {
        let day = self.m - 1;
        let mut rest: Vec<usize> = (0..self.n).filter(|&j| !self.placed[j]).collect();
        rest.sort_by(|&a, &b| self.acc[b].cmp(&self.acc[a]).then(a.cmp(&b)));
        let p = self.inst.day(day);
        let mut clock = t;
        let mut k = self
            .acc
            .iter()
            .enumerate()
            .filter(|(j, _)| self.placed[*j])
            .map(|(_, &a)| a)
            .max()
            .unwrap_or(0);
        for &j in &rest {
            clock += p[j];
            k = k.max(self.acc[j] + clock);
        }
        self.nodes += 1;
        let improves = if self.found_leaf {
            k < self.best
        } else {
            k <= self.best
        };
        if improves {
            self.best = k;
            self.found_leaf = true;
            let mut orders = self.orders.clone();
            orders[day].extend(rest);
            self.best_orders = Some(orders);
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.nodes >= self.limits.max_nodes {
            self.aborted = true;
        } else if let Some(b) = self.limits.time_budget {
            if self.nodes.is_multiple_of(4096) && self.start.elapsed() > b {
                self.aborted = true;
            }
        }
        self.aborted
    }

    fn dfs(&mut self, day: usize, t: Time) {
        if self.out_of_budget() {
            return;
        }
        if day == self.m - 1 {
            self.finish_last_day(t);
            return;
        }
        if self.orders[day].len() == self.n {
            let saved_placed = self.placed.clone();
            let saved_pred = self.pred.clone();
            self.start_day(day + 1);
            self.dfs(day + 1, 0);
            self.placed = saved_placed;
            self.pred = saved_pred;
            return;
        }
        if self.prunes(self.lower_bound(day, t)) {
            return;
        }
        let p = self.inst.day(day);
        for j in 0..self.n {
            if self.placed[j] || self.pred[j].is_some_and(|q| !self.placed[q]) {
                continue;
            }
            let c = t + p[j];
            self.placed[j] = true;
            self.acc[j] += c;
            self.orders[day].push(j);
            self.nodes += 1;
            self.dfs(day, c);
            self.orders[day].pop();
            self.acc[j] -= c;
            self.placed[j] = false;
            if self.aborted {
                return;
            }
        }
    }
}

fn warm_start(instance: &Instance) -> Result<Schedule> {
    if instance.is_day_invariant() {
        two_day_inversion(instance, &(0..instance.n()).collect::<Vec<_>>())
    } else {
        Ok(approx2_solve(instance)?.schedule)
    }
}

/// Globally optimal objective and a witness schedule.
///
/// The witness is the first optimal schedule met in the search order
/// (ascending client index per position, last day in decreasing accumulated
/// total).
pub fn brute_force_optimum(instance: &Instance, limits: Limits) -> Result<ExactResult> {
    let (n, m) = (instance.n(), instance.m());
    let warm = warm_start(instance)?;
    let warm_k = objective(instance, &warm)?;

    let mut suffix_work = vec![vec![0; n]; m];
    let mut suffix_spt = vec![0; m];
    let mut spt = Vec::with_capacity(m);
    for i in 0..m {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&j| (instance.p(i, j), j));
        spt.push(order);
    }
    for i in (0..m.saturating_sub(1)).rev() {
        let mut clock = 0;
        let mut total = 0;
        for &j in &spt[i + 1] {
            clock += instance.p(i + 1, j);
            total += clock;
        }
        suffix_spt[i] = suffix_spt[i + 1] + total;
        for j in 0..n {
            suffix_work[i][j] = suffix_work[i + 1][j] + instance.p(i + 1, j);
        }
    }

    let mut s = Search {
        inst: instance,
        n,
        m,
        suffix_work,
        suffix_spt,
        spt,
        acc: vec![0; n],
        placed: vec![false; n],
        orders: vec![Vec::with_capacity(n); m],
        pred: vec![None; n],
        best: warm_k,
        found_leaf: false,
        best_orders: None,
        nodes: 0,
        limits,
        start: Instant::now(),
        aborted: false,
    };
    s.start_day(0);
    s.dfs(0, 0);

    let schedule = match s.best_orders {
        Some(orders) => Schedule::new(orders),
        None => warm,
    };
    let optimum = objective(instance, &schedule)?;
    debug_assert_eq!(optimum, s.best.min(warm_k));
    Ok(ExactResult {
        optimum,
        schedule,
        nodes_explored: s.nodes,
        certified: !s.aborted,
    })
}

//! Batchings, job-to-batch assignments and geometric capacity grids.
//!
//! A batching gives every day the same number `beta` of batches with
//! positive capacities; a job placed in batch `b` is charged the batch end,
//! the sum of capacities up to and including `b`. Assignments are translated
//! back to schedules by concatenating batches in index order.
//!
//! Batch indices are 0-based throughout.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{evaluate_schedule, Instance, Schedule};
use crate::ratio::{self, Rational};

/// Largest capacity grid this crate will build.
pub const MAX_GRID: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Base `eps^3 K~ / m^2`, top at least `K~`.
    DayDependent,
    /// Base `eps^3 P`, top at least `P`.
    DayInvariant,
}

/// `{base (1+eps)^t : t = 0..=chi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityGrid {
    pub base: Rational,
    pub eps: Rational,
    pub chi: usize,
    pub values: Vec<Rational>,
}

impl CapacityGrid {
    /// Geometric grid from `base` up to the first value `>= top`.
    pub fn geometric(base: Rational, eps: Rational, top: &Rational) -> Result<Self> {
        if eps <= ratio::int(0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if base <= ratio::int(0) {
            return Err(Error::InvalidParameter("grid base must be positive".into()));
        }
        let factor = ratio::int(1) + eps.clone();
        let mut values = vec![base.clone()];
        while values.last().unwrap() < top {
            if values.len() >= MAX_GRID {
                return Err(Error::CapExceeded(format!(
                    "capacity grid would exceed {MAX_GRID} values"
                )));
            }
            let next = values.last().unwrap() * &factor;
            values.push(next);
        }
        Ok(Self {
            base,
            eps,
            chi: values.len() - 1,
            values,
        })
    }

    /// Grid with base `Delta = eps^3 K~ / m^2`.
    pub fn day_dependent(eps: &Rational, ktilde: &Rational, m: usize) -> Result<Self> {
        let m2 = ratio::int((m * m) as u64);
        let base = ratio::pow(eps, 3) * ktilde / m2;
        Self::geometric(base, eps.clone(), ktilde)
    }

    /// Grid with base `eps^3 P`.
    pub fn day_invariant(eps: &Rational, total: u64) -> Result<Self> {
        let p = ratio::int(total);
        Self::geometric(ratio::pow(eps, 3) * &p, eps.clone(), &p)
    }

    pub fn for_variant(
        variant: Variant,
        instance: &Instance,
        eps: &Rational,
        ktilde: &Rational,
    ) -> Result<Self> {
        match variant {
            Variant::DayDependent => Self::day_dependent(eps, ktilde, instance.m()),
            Variant::DayInvariant => Self::day_invariant(eps, instance.total()?),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> &Rational {
        self.values.last().unwrap()
    }

    /// `beta = 2 chi + 1`.
    pub fn beta(&self) -> usize {
        2 * self.chi + 1
    }

    /// Index of the smallest grid value `>= v`.
    pub fn round_up_index(&self, v: &Rational) -> Result<usize> {
        if v > self.max() {
            return Err(Error::AboveGrid {
                value: ratio::display(v),
                max: ratio::display(self.max()),
            });
        }
        Ok(self.values.partition_point(|g| g < v))
    }

    /// Smallest grid value `>= v`.
    pub fn round_up(&self, v: &Rational) -> Result<Rational> {
        Ok(self.values[self.round_up_index(v)?].clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batching {
    capacities: Vec<Vec<Rational>>,
    ends: Vec<Vec<Rational>>,
}

impl Batching {
    /// Every day must have the same positive number of batches, each with
    /// positive capacity.
    pub fn new(capacities: Vec<Vec<Rational>>) -> Result<Self> {
        let beta = capacities.first().map_or(0, Vec::len);
        if capacities.is_empty() || beta == 0 {
            return Err(Error::Dimension(
                "batching needs at least one day and one batch".into(),
            ));
        }
        for (i, day) in capacities.iter().enumerate() {
            if day.len() != beta {
                return Err(Error::Dimension(format!(
                    "day {} has {} batches, expected {beta}",
                    i + 1,
                    day.len()
                )));
            }
            if day.iter().any(|c| *c <= ratio::int(0)) {
                return Err(Error::InvalidParameter(format!(
                    "day {} has a non-positive batch capacity",
                    i + 1
                )));
            }
        }
        let ends = capacities
            .iter()
            .map(|day| {
                day.iter()
                    .scan(ratio::int(0), |acc, c| {
                        *acc += c;
                        Some(acc.clone())
                    })
                    .collect()
            })
            .collect();
        Ok(Self { capacities, ends })
    }

    /// One batch per job in schedule order, with capacity equal to its
    /// processing time.
    pub fn per_job(instance: &Instance, schedule: &Schedule) -> Result<(Self, Assignment)> {
        schedule.validate(instance.n(), instance.m())?;
        let mut caps = Vec::with_capacity(instance.m());
        let mut batch_of = Vec::with_capacity(instance.m());
        for i in 0..instance.m() {
            let order = schedule.order(i);
            caps.push(
                order
                    .iter()
                    .map(|&j| ratio::int(instance.p(i, j)))
                    .collect(),
            );
            let mut a = vec![0; instance.n()];
            for (b, &j) in order.iter().enumerate() {
                a[j] = b;
            }
            batch_of.push(a);
        }
        Ok((Self::new(caps)?, Assignment::new(batch_of)))
    }

    pub fn days(&self) -> usize {
        self.capacities.len()
    }

    pub fn beta(&self) -> usize {
        self.capacities[0].len()
    }

    pub fn capacity(&self, i: usize, b: usize) -> &Rational {
        &self.capacities[i][b]
    }

    pub fn capacities(&self) -> &[Vec<Rational>] {
        &self.capacities
    }

    /// End of batch `b` on day `i`.
    pub fn end(&self, i: usize, b: usize) -> &Rational {
        &self.ends[i][b]
    }

    pub fn ends(&self) -> &[Vec<Rational>] {
        &self.ends
    }

    pub fn to_json(&self) -> Value {
        json!({
            "beta": self.beta(),
            "capacities": self.capacities.iter()
                .map(|d| d.iter().map(ratio::display).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    /// `batch_of[i][j]`: batch of client `j` on day `i`.
    pub batch_of: Vec<Vec<usize>>,
}

impl Assignment {
    pub fn new(batch_of: Vec<Vec<usize>>) -> Self {
        Self { batch_of }
    }

    /// Builds the assignment from one configuration per client.
    pub fn from_configurations(configs: &[Vec<usize>], m: usize) -> Self {
        let batch_of = (0..m)
            .map(|i| configs.iter().map(|c| c[i]).collect())
            .collect();
        Self { batch_of }
    }

    pub fn configuration(&self, j: usize) -> Vec<usize> {
        self.batch_of.iter().map(|d| d[j]).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({ "batch_of": self.batch_of })
    }

    fn check(&self, batching: &Batching, n: Option<usize>) -> Result<()> {
        if self.batch_of.len() != batching.days() {
            return Err(Error::Dimension(format!(
                "assignment has {} days, batching has {}",
                self.batch_of.len(),
                batching.days()
            )));
        }
        for (i, day) in self.batch_of.iter().enumerate() {
            if n.is_some_and(|n| n != day.len()) {
                return Err(Error::Dimension(format!(
                    "day {} assigns the wrong number of jobs",
                    i + 1
                )));
            }
            if day.iter().any(|&b| b >= batching.beta()) {
                return Err(Error::Dimension(format!(
                    "day {} uses a batch index out of range",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// `K(c) = sum_i end(i, c_i)`.
pub fn configuration_cost(batching: &Batching, c: &[usize]) -> Rational {
    c.iter()
        .enumerate()
        .fold(ratio::int(0), |acc, (i, &b)| acc + batching.end(i, b))
}

/// `K(A,B) = max_j sum_i end(i, A_i(j))`.
pub fn objective_kab(batching: &Batching, assignment: &Assignment) -> Result<Rational> {
    assignment.check(batching, None)?;
    let n = assignment.batch_of[0].len();
    Ok((0..n)
        .map(|j| configuration_cost(batching, &assignment.configuration(j)))
        .max()
        .unwrap_or_else(|| ratio::int(0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `max_{i,b} (load - capacity)^+`.
    pub max_additive_overflow: Rational,
    /// `max_{i,b} load / capacity`.
    pub max_stretch: Rational,
    /// `loads[i][b]`: true processing time placed in batch `(i, b)`.
    pub loads: Vec<Vec<u64>>,
}

pub fn feasibility_report(
    batching: &Batching,
    assignment: &Assignment,
    instance: &Instance,
) -> Result<FeasibilityReport> {
    assignment.check(batching, Some(instance.n()))?;
    if batching.days() != instance.m() {
        return Err(Error::Dimension(
            "batching and instance disagree on m".into(),
        ));
    }
    let mut loads = vec![vec![0u64; batching.beta()]; instance.m()];
    for (i, day) in assignment.batch_of.iter().enumerate() {
        for (j, &b) in day.iter().enumerate() {
            loads[i][b] += instance.p(i, j);
        }
    }
    let mut overflow = ratio::int(0);
    let mut stretch = ratio::int(0);
    for (i, day) in loads.iter().enumerate() {
        for (b, &load) in day.iter().enumerate() {
            let load = ratio::int(load);
            let cap = batching.capacity(i, b);
            let over = &load - cap;
            if over > overflow {
                overflow = over;
            }
            let s = load / cap;
            if s > stretch {
                stretch = s;
            }
        }
    }
    Ok(FeasibilityReport {
        max_additive_overflow: overflow,
        max_stretch: stretch,
        loads,
    })
}

/// Concatenates batches in index order, jobs within a batch by ascending
/// client index.
pub fn assignment_to_schedule(
    batching: &Batching,
    assignment: &Assignment,
    instance: &Instance,
) -> Result<Schedule> {
    assignment.check(batching, Some(instance.n()))?;
    let orders = assignment
        .batch_of
        .iter()
        .map(|day| {
            let mut order: Vec<usize> = (0..instance.n()).collect();
            order.sort_by_key(|&j| (day[j], j));
            order
        })
        .collect();
    Ok(Schedule::new(orders))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationCheck {
    pub k_schedule: u64,
    pub k_ab: Rational,
    pub report: FeasibilityReport,
    /// `K(A,B) + m beta Delta_obs`.
    pub additive_bound: Rational,
    /// `sigma_obs K(A,B)`.
    pub stretch_bound: Rational,
}

impl TranslationCheck {
    pub fn holds(&self) -> bool {
        let k = ratio::int(self.k_schedule);
        k <= self.additive_bound && k <= self.stretch_bound
    }
}

/// Translates and evaluates both translation bounds exactly.
pub fn check_translation(
    batching: &Batching,
    assignment: &Assignment,
    instance: &Instance,
) -> Result<(Schedule, TranslationCheck)> {
    let schedule = assignment_to_schedule(batching, assignment, instance)?;
    let k_schedule = evaluate_schedule(instance, &schedule)?.objective;
    let k_ab = objective_kab(batching, assignment)?;
    let report = feasibility_report(batching, assignment, instance)?;
    let mb = ratio::int((instance.m() * batching.beta()) as u64);
    let additive_bound = &k_ab + mb * &report.max_additive_overflow;
    let stretch_bound = &report.max_stretch * &k_ab;
    Ok((
        schedule,
        TranslationCheck {
            k_schedule,
            k_ab,
            report,
            additive_bound,
            stretch_bound,
        },
    ))
}

/// Batch (0-based) that the structure construction gives a job with
/// completion time `c` and processing time `p`.
///
/// A job occupies `(c - p, c]`. With `t` the largest index such that
/// `g_t <= c`, the job goes to the even slot `2t + 1` when it covers `g_t`
/// and to the odd slot `2t + 2` otherwise; jobs finishing before `g_0` go to
/// slot 0. A job finishing exactly at the top value closes the last slot.
pub fn structure_batch_index(grid: &CapacityGrid, c: u64, p: u64) -> Result<usize> {
    let cr = ratio::int(c);
    let start = ratio::int(c - p);
    let g = &grid.values;
    if &cr > grid.max() {
        return Err(Error::AboveGrid {
            value: c.to_string(),
            max: ratio::display(grid.max()),
        });
    }
    let above = g.partition_point(|v| *v <= cr);
    if above == 0 {
        return Ok(0);
    }
    let t = above - 1;
    let chi = grid.chi;
    if t < chi {
        return Ok(if start < g[t] { 2 * t + 1 } else { 2 * t + 2 });
    }
    if chi == 0 {
        Ok(0)
    } else if start < g[chi - 1] {
        Ok(2 * chi - 1)
    } else {
        Ok(2 * chi)
    }
}

/// Structure batching and its zero-overflow assignment for
/// `schedule`, on `beta = 2 chi + 1` batches per day. Empty batches get the
/// smallest grid value.
pub fn batching_from_schedule_on_grid(
    instance: &Instance,
    schedule: &Schedule,
    grid: &CapacityGrid,
) -> Result<(Batching, Assignment)> {
    let ev = evaluate_schedule(instance, schedule)?;
    let beta = grid.beta();
    let mut caps = Vec::with_capacity(instance.m());
    let mut batch_of = Vec::with_capacity(instance.m());
    for i in 0..instance.m() {
        let mut loads = vec![0u64; beta];
        let mut a = vec![0; instance.n()];
        for j in 0..instance.n() {
            let b = structure_batch_index(grid, ev.completion[i][j], instance.p(i, j))?;
            a[j] = b;
            loads[b] += instance.p(i, j);
        }
        caps.push(
            loads
                .iter()
                .map(|&l| grid.round_up(&ratio::int(l)))
                .collect::<Result<Vec<_>>>()?,
        );
        batch_of.push(a);
    }
    Ok((Batching::new(caps)?, Assignment::new(batch_of)))
}

pub fn batching_from_schedule(
    instance: &Instance,
    schedule: &Schedule,
    eps: &Rational,
    ktilde: &Rational,
    variant: Variant,
) -> Result<(Batching, Assignment)> {
    let grid = CapacityGrid::for_variant(variant, instance, eps, ktilde)?;
    batching_from_schedule_on_grid(instance, schedule, &grid)
}

/// `|grid|^(beta m)`, or `None` on overflow.
pub fn count_good_batchings(grid: &CapacityGrid, m: usize) -> Option<u128> {
    let digits = u32::try_from(grid.beta().checked_mul(m)?).ok()?;
    (grid.len() as u128).checked_pow(digits)
}

/// Every grid-valued batching of length `2 chi + 1`, in lexicographic order
/// of the capacity-index vector (day 1 first), stopping after `limit`.
pub struct GoodBatchings<'a> {
    grid: &'a CapacityGrid,
    m: usize,
    digits: Vec<usize>,
    remaining: u64,
    done: bool,
    truncated: bool,
}

impl<'a> GoodBatchings<'a> {
    pub fn new(grid: &'a CapacityGrid, m: usize, limit: u64) -> Self {
        Self {
            grid,
            m,
            digits: vec![0; grid.beta() * m],
            remaining: limit,
            done: false,
            truncated: false,
        }
    }

    /// `true` once the stream stopped because of `limit`.
    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

impl Iterator for GoodBatchings<'_> {
    type Item = Batching;

    fn next(&mut self) -> Option<Batching> {
        if self.done {
            return None;
        }
        if self.remaining == 0 {
            self.done = true;
            self.truncated = true;
            return None;
        }
        self.remaining -= 1;
        let beta = self.grid.beta();
        let caps = (0..self.m)
            .map(|i| {
                self.digits[i * beta..(i + 1) * beta]
                    .iter()
                    .map(|&d| self.grid.values[d].clone())
                    .collect()
            })
            .collect();
        let out = Batching::new(caps).expect("grid values are positive");
        let base = self.grid.len();
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < base {
                break;
            }
            self.digits[k] = 0;
        }
        Some(out)
    }
}

pub fn enumerate_good_batchings(grid: &CapacityGrid, m: usize, limit: u64) -> GoodBatchings<'_> {
    GoodBatchings::new(grid, m, limit)
}

/// All configurations `c` with `K(c) <= threshold`, sorted by `K(c)` and
/// then lexicographically.
///
/// Sums run in floating point; the threshold is decided exactly whenever a
/// sum lies within a relative `1e-9` of it. The sort key is the
/// floating-point cost.
pub fn enumerate_valid_configurations(
    batching: &Batching,
    threshold: &Rational,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    const REL: f64 = 1e-9;
    let m = batching.days();
    let ends: Vec<Vec<f64>> = batching
        .ends()
        .iter()
        .map(|row| row.iter().map(ratio::to_f64).collect())
        .collect();
    // Cheapest completion of days i.. .
    let mut min_rest = vec![0.0; m + 1];
    for i in (0..m).rev() {
        min_rest[i] = min_rest[i + 1] + ends[i][0];
    }
    let thr = ratio::to_f64(threshold);
    let hi = thr + REL * thr.abs();
    let lo = thr - REL * thr.abs();

    struct Walk<'a> {
        batching: &'a Batching,
        ends: &'a [Vec<f64>],
        min_rest: &'a [f64],
        threshold: &'a Rational,
        hi: f64,
        lo: f64,
        cap: usize,
        current: Vec<usize>,
        out: Vec<(f64, Vec<usize>)>,
    }

    impl Walk<'_> {
        fn rec(&mut self, day: usize, sum: f64) -> Result<()> {
            if day == self.ends.len() {
                if sum > self.lo {
                    let exact = configuration_cost(self.batching, &self.current);
                    if &exact > self.threshold {
                        return Ok(());
                    }
                }
                if self.out.len() >= self.cap {
                    return Err(Error::CapExceeded(format!(
                        "more than {} valid configurations",
                        self.cap
                    )));
                }
                self.out.push((sum, self.current.clone()));
                return Ok(());
            }
            for b in 0..self.ends[day].len() {
                let s = sum + self.ends[day][b];
                if s + self.min_rest[day + 1] > self.hi {
                    break;
                }
                self.current.push(b);
                self.rec(day + 1, s)?;
                self.current.pop();
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        batching,
        ends: &ends,
        min_rest: &min_rest,
        threshold,
        hi,
        lo,
        cap,
        current: Vec::with_capacity(m),
        out: Vec::new(),
    };
    walk.rec(0, 0.0)?;
    let mut out = walk.out;
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out.into_iter().map(|(_, c)| c).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{frac, int};

    fn caps(rows: &[&[u64]]) -> Batching {
        Batching::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_batch_charges_day_total() {
        let inst = Instance::new(vec![vec![1, 2, 3], vec![4, 1, 1]]).unwrap();
        let b = caps(&[&[6], &[6]]);
        let a = Assignment::new(vec![vec![0; 3]; 2]);
        assert_eq!(objective_kab(&b, &a).unwrap(), int(12));
        let rep = feasibility_report(&b, &a, &inst).unwrap();
        assert_eq!(rep.max_additive_overflow, int(0));
        assert_eq!(rep.max_stretch, int(1));
    }

    #[test]
    fn per_job_batching_reproduces_schedule() {
        let inst = Instance::new(vec![vec![3, 1, 2], vec![2, 5, 1]]).unwrap();
        let s = Schedule::new(vec![vec![1, 2, 0], vec![2, 0, 1]]);
        let (b, a) = Batching::per_job(&inst, &s).unwrap();
        let k = evaluate_schedule(&inst, &s).unwrap().objective;
        assert_eq!(objective_kab(&b, &a).unwrap(), int(k));
        assert_eq!(assignment_to_schedule(&b, &a, &inst).unwrap(), s);
    }

    #[test]
    fn batch_end_is_prefix_sum() {
        let b = caps(&[&[2, 3, 1]]);
        assert_eq!(b.end(0, 1), &int(5));
        assert_eq!(configuration_cost(&b, &[1]), int(5));
    }

    #[test]
    fn overflow_and_stretch() {
        let inst = Instance::new(vec![vec![5, 7]]).unwrap();
        let b = caps(&[&[10]]);
        let a = Assignment::new(vec![vec![0, 0]]);
        let rep = feasibility_report(&b, &a, &inst).unwrap();
        assert_eq!(rep.max_additive_overflow, int(2));
        assert_eq!(rep.max_stretch, frac(6, 5));
    }

    #[test]
    fn zero_capacity_is_rejected() {
        assert!(Batching::new(vec![vec![int(0)]]).is_err());
        assert!(Batching::new(vec![vec![int(1)], vec![int(1), int(2)]]).is_err());
    }

    #[test]
    fn grid_rounding() {
        let g = CapacityGrid::geometric(int(1), int(1), &int(8)).unwrap();
        assert_eq!(g.values, vec![int(1), int(2), int(4), int(8)]);
        assert_eq!(g.chi, 3);
        assert_eq!(g.round_up(&int(0)).unwrap(), int(1));
        assert_eq!(g.round_up(&int(3)).unwrap(), int(4));
        assert_eq!(g.round_up(&int(4)).unwrap(), int(4));
        assert!(matches!(g.round_up(&int(9)), Err(Error::AboveGrid { .. })));
    }

    #[test]
    fn grid_sizes() {
        // Delta = 1 * 8 / 4 = 2; 2 * 2^t >= 8 at t = 2.
        let g = CapacityGrid::day_dependent(&int(1), &int(8), 2).unwrap();
        assert_eq!(g.base, int(2));
        assert_eq!(g.chi, 2);
        // Delta = 8 / 8 / 4 = 1/4; (3/2)^t >= 32 at t = 9.
        let g = CapacityGrid::day_dependent(&frac(1, 2), &int(8), 2).unwrap();
        assert_eq!(g.base, frac(1, 4));
        assert_eq!(g.chi, 9);
        // eps^3 = 1/8, (3/2)^chi >= 8 at chi = 6.
        let g = CapacityGrid::day_invariant(&frac(1, 2), 10).unwrap();
        assert_eq!(g.chi, 6);
        assert_eq!(g.base, frac(10, 8));
        assert_eq!(g.max(), &(frac(10, 8) * ratio::pow(&frac(3, 2), 6)));
    }

    #[test]
    fn structure_slots() {
        let g = CapacityGrid::geometric(int(1), int(1), &int(8)).unwrap();
        // Finishes before g_0: first slot.
        assert_eq!(structure_batch_index(&g, 0, 0).unwrap(), 0);
        // Covers g_0 = 1.
        assert_eq!(structure_batch_index(&g, 1, 1).unwrap(), 1);
        // Covers g_1 = 2 while finishing at 3.
        assert_eq!(structure_batch_index(&g, 3, 2).unwrap(), 3);
        // Strictly between g_1 and g_2.
        assert_eq!(structure_batch_index(&g, 3, 1).unwrap(), 4);
        // Finishes exactly on the top value.
        assert_eq!(structure_batch_index(&g, 8, 1).unwrap(), 6);
        assert_eq!(structure_batch_index(&g, 8, 5).unwrap(), 5);
        assert!(structure_batch_index(&g, 9, 1).is_err());
    }

    #[test]
    fn structure_batching_single_client() {
        let inst = Instance::day_invariant(vec![3], 2).unwrap();
        let s = Schedule::identity(1, 2);
        let (b, a) =
            batching_from_schedule(&inst, &s, &int(1), &int(6), Variant::DayDependent).unwrap();
        let grid = CapacityGrid::day_dependent(&int(1), &int(6), 2).unwrap();
        assert_eq!(b.beta(), grid.beta());
        for i in 0..2 {
            let used = a.batch_of[i][0];
            for bb in 0..b.beta() {
                if bb != used {
                    assert_eq!(b.capacity(i, bb), &grid.base);
                }
            }
        }
        assert_eq!(
            feasibility_report(&b, &a, &inst)
                .unwrap()
                .max_additive_overflow,
            int(0)
        );
    }

    #[test]
    fn e1_structure_witness() {
        let inst = Instance::day_invariant(vec![1, 2], 2).unwrap();
        let s = Schedule::new(vec![vec![0, 1], vec![1, 0]]);
        let (b, a) =
            batching_from_schedule(&inst, &s, &int(1), &int(5), Variant::DayDependent).unwrap();
        assert_eq!(
            feasibility_report(&b, &a, &inst)
                .unwrap()
                .max_additive_overflow,
            int(0)
        );
        assert!(objective_kab(&b, &a).unwrap() <= int(46 * 5));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let g = CapacityGrid::geometric(int(1), int(1), &int(1)).unwrap();
        assert_eq!(enumerate_good_batchings(&g, 3, 100).count(), 1);
        let g = CapacityGrid::geometric(int(1), int(1), &int(2)).unwrap();
        let all: Vec<Batching> = enumerate_good_batchings(&g, 1, 100).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(count_good_batchings(&g, 1), Some(8));
        assert_eq!(all[0].capacities()[0], vec![int(1); 3]);
        assert_eq!(all[1].capacities()[0], vec![int(1), int(1), int(2)]);
        let mut it = enumerate_good_batchings(&g, 1, 5);
        assert_eq!(it.by_ref().count(), 5);
        assert!(it.truncated());
    }

    #[test]
    fn valid_configurations_example() {
        let b = caps(&[&[1, 1, 1], &[1, 1, 1]]);
        let cs = enumerate_valid_configurations(&b, &int(4), 100).unwrap();
        let want: Vec<Vec<usize>> = vec![
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![0, 2],
            vec![1, 1],
            vec![2, 0],
        ];
        assert_eq!(cs, want);
        assert_eq!(
            enumerate_valid_configurations(&b, &int(6), 100)
                .unwrap()
                .len(),
            9
        );
        assert!(enumerate_valid_configurations(&b, &int(6), 5).is_err());
        let single = caps(&[&[2], &[3]]);
        assert_eq!(
            enumerate_valid_configurations(&single, &int(5), 10)
                .unwrap()
                .len(),
            1
        );
        assert!(enumerate_valid_configurations(&single, &int(4), 10)
            .unwrap()
            .is_empty());
    }
}

//! Instances, schedules, objective evaluation and closed-form lower bounds.
//!
//! An instance has `n` clients and `m` days; client `j` submits one job per
//! day with integer processing time `p[i][j]`. A schedule fixes one
//! processing order per day. The objective of a schedule is
//! `K = max_j sum_i C[i][j]`, the largest total completion time any client
//! accumulates over the horizon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratio::{self, Rational};

/// Processing and completion times, in integer time units.
pub type Time = u64;

pub const MAX_CLIENTS: usize = 10_000;
pub const MAX_DAYS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    m: usize,
    /// One row per day, or a single shared row when day-invariant.
    rows: Vec<Vec<Time>>,
    day_invariant: bool,
}

impl Instance {
    /// Builds an instance from one row per day. The day-invariant flag is
    /// derived from the data.
    pub fn new(rows: Vec<Vec<Time>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidInstance(
                "at least one day is required".into(),
            ));
        }
        let n = rows[0].len();
        Self::check_dims(n, m)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "day {} has {} jobs, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            if row.contains(&0) {
                return Err(Error::InvalidInstance(format!(
                    "day {} has a non-positive processing time",
                    i + 1
                )));
            }
        }
        let day_invariant = rows.iter().all(|r| r == &rows[0]);
        let rows = if day_invariant {
            vec![rows.into_iter().next().unwrap()]
        } else {
            rows
        };
        Ok(Self {
            n,
            m,
            rows,
            day_invariant,
        })
    }

    /// A day-invariant instance: every day repeats `row`.
    pub fn day_invariant(row: Vec<Time>, m: usize) -> Result<Self> {
        let n = row.len();
        Self::check_dims(n, m)?;
        if row.contains(&0) {
            return Err(Error::InvalidInstance(
                "processing times must be positive".into(),
            ));
        }
        Ok(Self {
            n,
            m,
            rows: vec![row],
            day_invariant: true,
        })
    }

    fn check_dims(n: usize, m: usize) -> Result<()> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidInstance("n and m must be at least 1".into()));
        }
        if n > MAX_CLIENTS || m > MAX_DAYS {
            return Err(Error::InvalidInstance(format!(
                "instance too large (n <= {MAX_CLIENTS}, m <= {MAX_DAYS})"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_day_invariant(&self) -> bool {
        self.day_invariant
    }

    /// Processing time of client `j` on day `i` (both 0-based).
    #[inline]
    pub fn p(&self, i: usize, j: usize) -> Time {
        self.day(i)[j]
    }

    #[inline]
    pub fn day(&self, i: usize) -> &[Time] {
        if self.day_invariant {
            &self.rows[0]
        } else {
            &self.rows[i]
        }
    }

    /// Total processing time on day `i`.
    pub fn day_total(&self, i: usize) -> Time {
        self.day(i).iter().sum()
    }

    /// `P`, the single-day total of a day-invariant instance.
    pub fn total(&self) -> Result<Time> {
        self.require_day_invariant()?;
        Ok(self.rows[0].iter().sum())
    }

    /// Largest processing time over all days and clients.
    pub fn p_max(&self) -> Time {
        self.rows.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.rows.iter().flatten().all(|&p| p == 1)
    }

    pub fn require_day_invariant(&self) -> Result<()> {
        if self.day_invariant {
            Ok(())
        } else {
            Err(Error::RequiresDayInvariant)
        }
    }

    /// Same instance restricted (or extended) to `days` days. Only defined for
    /// day-invariant instances.
    pub fn with_days(&self, days: usize) -> Result<Self> {
        self.require_day_invariant()?;
        Self::day_invariant(self.rows[0].clone(), days)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.n,
            m: self.m,
            day_invariant: self.day_invariant,
            p: self.rows.clone(),
        }
    }

    pub fn from_file(f: InstanceFile) -> Result<Self> {
        let inst = if f.day_invariant && f.p.len() == 1 {
            Self::day_invariant(f.p.into_iter().next().unwrap(), f.m)?
        } else {
            if f.p.len() != f.m {
                return Err(Error::InvalidInstance(format!(
                    "expected {} rows, found {}",
                    f.m,
                    f.p.len()
                )));
            }
            let inst = Self::new(f.p)?;
            if inst.day_invariant != f.day_invariant {
                return Err(Error::InvalidInstance(
                    "day_invariant flag disagrees with the processing times".into(),
                ));
            }
            inst
        };
        if inst.n != f.n || inst.m != f.m {
            return Err(Error::InvalidInstance(format!(
                "declared n={}, m={} but data has n={}, m={}",
                f.n, f.m, inst.n, inst.m
            )));
        }
        Ok(inst)
    }

    /// Canonical JSON: compact, fields in the order `n, m, day_invariant, p`,
    /// day-invariant instances carry a single row.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    pub day_invariant: bool,
    pub p: Vec<Vec<Time>>,
}

/// One processing order per day; `order(i)[k]` is the client at position `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    orders: Vec<Vec<usize>>,
}

impl Schedule {
    /// Wraps per-day orders without validation; see [`Schedule::validate`].
    pub fn new(orders: Vec<Vec<usize>>) -> Self {
        Self { orders }
    }

    /// The same order on each of `m` days.
    pub fn repeated(order: Vec<usize>, m: usize) -> Self {
        Self {
            orders: vec![order; m],
        }
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self::repeated((0..n).collect(), m)
    }

    pub fn days(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self, i: usize) -> &[usize] {
        &self.orders[i]
    }

    pub fn orders(&self) -> &[Vec<usize>] {
        &self.orders
    }

    /// Position of client `j` on day `i` (0-based).
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        self.orders[i].iter().position(|&c| c == j)
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.orders.len() != m {
            return Err(Error::DayCountMismatch {
                expected: m,
                found: self.orders.len(),
            });
        }
        let mut seen = vec![false; n];
        for (i, order) in self.orders.iter().enumerate() {
            if order.len() != n {
                return Err(Error::NotAPermutation { day: i + 1, n });
            }
            seen.iter_mut().for_each(|s| *s = false);
            for &c in order {
                if c >= n || seen[c] {
                    return Err(Error::NotAPermutation { day: i + 1, n });
                }
                seen[c] = true;
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> ScheduleFile {
        ScheduleFile {
            perms: self
                .orders
                .iter()
                .map(|o| o.iter().map(|&c| c + 1).collect())
                .collect(),
        }
    }

    pub fn from_file(f: ScheduleFile) -> Result<Self> {
        let orders = f
            .perms
            .into_iter()
            .enumerate()
            .map(|(i, o)| {
                o.into_iter()
                    .map(|c| {
                        c.checked_sub(1)
                            .ok_or(Error::NotAPermutation { day: i + 1, n: 0 })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { orders })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }
}

/// Serialized schedule with 1-based client indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub perms: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    /// `completion[i][j]`: completion time of client `j` on day `i`.
    pub completion: Vec<Vec<Time>>,
    pub per_client_total: Vec<Time>,
    pub objective: Time,
}

impl Evaluation {
    /// A client attaining the objective (smallest index on ties).
    pub fn argmax(&self) -> usize {
        self.per_client_total
            .iter()
            .position(|&c| c == self.objective)
            .unwrap_or(0)
    }
}

/// Completion times, per-client totals and objective of `schedule`.
pub fn evaluate_schedule(instance: &Instance, schedule: &Schedule) -> Result<Evaluation> {
    schedule.validate(instance.n(), instance.m())?;
    let (n, m) = (instance.n(), instance.m());
    let mut completion = vec![vec![0; n]; m];
    let mut totals = vec![0; n];
    for (i, row) in completion.iter_mut().enumerate() {
        let p = instance.day(i);
        let mut t = 0;
        for &j in schedule.order(i) {
            t += p[j];
            row[j] = t;
            totals[j] += t;
        }
    }
    let objective = totals.iter().copied().max().unwrap_or(0);
    Ok(Evaluation {
        completion,
        per_client_total: totals,
        objective,
    })
}

/// Objective only, without materializing the completion matrix.
pub fn objective(instance: &Instance, schedule: &Schedule) -> Result<Time> {
    schedule.validate(instance.n(), instance.m())?;
    let mut totals = vec![0 as Time; instance.n()];
    for i in 0..instance.m() {
        let p = instance.day(i);
        let mut t = 0;
        for &j in schedule.order(i) {
            t += p[j];
            totals[j] += t;
        }
    }
    Ok(totals.into_iter().max().unwrap_or(0))
}

/// `(m/2) * (P + p_max^2 / P)` for a day-invariant instance, exact.
pub fn enhanced_lower_bound(instance: &Instance) -> Result<Rational> {
    let total = instance.total()?;
    let pmax = instance.p_max();
    let p = ratio::int(total);
    let bound = ratio::frac(instance.m() as i64, 2) * (p.clone() + ratio::int(pmax * pmax) / p);
    Ok(bound)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedBound {
    pub name: &'static str,
    pub value: Time,
    /// `false` for bounds that are reported but not proven.
    pub certified: bool,
}

/// Cheap closed-form bounds.
///
/// * `max_client_work`: `max_j sum_i p[i][j]` (equals `m * p_max` for
///   day-invariant instances). Certified.
/// * `unit_lower_bound`: `ceil((n+1) m / 2)` for all-unit instances. Certified.
/// * `per_day_max_sum`: `sum_i max_j p[i][j]`, day-dependent instances only.
///   Heuristic; it can exceed the optimum.
pub fn trivial_lower_bounds(instance: &Instance) -> Vec<NamedBound> {
    let (n, m) = (instance.n(), instance.m());
    let mut out = Vec::new();
    let work = if instance.is_day_invariant() {
        m as Time * instance.p_max()
    } else {
        (0..n)
            .map(|j| (0..m).map(|i| instance.p(i, j)).sum::<Time>())
            .max()
            .unwrap_or(0)
    };
    out.push(NamedBound {
        name: "max_client_work",
        value: work,
        certified: true,
    });
    if instance.is_unit() {
        out.push(NamedBound {
            name: "unit_lower_bound",
            value: ((n as Time + 1) * m as Time).div_ceil(2),
            certified: true,
        });
    }
    if !instance.is_day_invariant() {
        out.push(NamedBound {
            name: "per_day_max_sum",
            value: (0..m).map(|i| *instance.day(i).iter().max().unwrap()).sum(),
            certified: false,
        });
    }
    out
}

/// Largest certified closed-form bound, including the enhanced bound (rounded
/// up) on day-invariant instances.
pub fn best_closed_form_bound(instance: &Instance) -> Time {
    let mut best = trivial_lower_bounds(instance)
        .into_iter()
        .filter(|b| b.certified)
        .map(|b| b.value)
        .max()
        .unwrap_or(0);
    if let Ok(lb) = enhanced_lower_bound(instance) {
        best = best.max(ratio::ceil_u64(&lb));
    }
    best
}

/// Shortest-processing-time order for day `i`, ties by client index.
pub fn spt_order(instance: &Instance, i: usize) -> Vec<usize> {
    let p = instance.day(i);
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by_key(|&j| (p[j], j));
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Instance {
        Instance::day_invariant(vec![1, 2], 2).unwrap()
    }

    #[test]
    fn single_client_accumulates_each_day() {
        let inst = Instance::day_invariant(vec![1], 3).unwrap();
        let ev = evaluate_schedule(&inst, &Schedule::identity(1, 3)).unwrap();
        assert_eq!(ev.objective, 3);
    }

    #[test]
    fn two_client_example() {
        let s = Schedule::new(vec![vec![0, 1], vec![1, 0]]);
        let ev = evaluate_schedule(&e1(), &s).unwrap();
        assert_eq!(ev.per_client_total, vec![4, 5]);
        assert_eq!(ev.objective, 5);
        assert_eq!(ev.argmax(), 1);
        assert_eq!(ev.completion, vec![vec![1, 3], vec![3, 2]]);
    }

    #[test]
    fn unit_day_completions() {
        let inst = Instance::day_invariant(vec![1, 1, 1], 1).unwrap();
        let ev = evaluate_schedule(&inst, &Schedule::new(vec![vec![2, 0, 1]])).unwrap();
        let mut c = ev.completion[0].clone();
        c.sort();
        assert_eq!(c, vec![1, 2, 3]);
        assert_eq!(ev.objective, 3);
    }

    #[test]
    fn dimension_errors_name_the_day() {
        let inst = e1();
        let err = evaluate_schedule(&inst, &Schedule::new(vec![vec![0, 1]])).unwrap_err();
        assert_eq!(
            err,
            Error::DayCountMismatch {
                expected: 2,
                found: 1
            }
        );
        let err =
            evaluate_schedule(&inst, &Schedule::new(vec![vec![0, 1], vec![1, 1]])).unwrap_err();
        assert_eq!(err, Error::NotAPermutation { day: 2, n: 2 });
    }

    #[test]
    fn enhanced_bound_values() {
        assert_eq!(enhanced_lower_bound(&e1()).unwrap(), ratio::frac(13, 3));
        let unit = Instance::day_invariant(vec![1; 5], 4).unwrap();
        // (m/2)(n + 1/n)
        assert_eq!(
            enhanced_lower_bound(&unit).unwrap(),
            ratio::int(2) * (ratio::int(5) + ratio::frac(1, 5))
        );
        let single = Instance::day_invariant(vec![7], 3).unwrap();
        assert_eq!(enhanced_lower_bound(&single).unwrap(), ratio::int(21));
        let dd = Instance::new(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(enhanced_lower_bound(&dd), Err(Error::RequiresDayInvariant));
    }

    #[test]
    fn trivial_bounds() {
        let unit = Instance::day_invariant(vec![1; 7], 10).unwrap();
        let b = trivial_lower_bounds(&unit);
        assert!(b
            .iter()
            .any(|b| b.name == "unit_lower_bound" && b.value == 40));
        let b = trivial_lower_bounds(&e1());
        assert_eq!(b[0].value, 4);
        let e2 = Instance::new(vec![vec![1, 2], vec![2, 1]]).unwrap();
        let b = trivial_lower_bounds(&e2);
        let heur = b.iter().find(|b| b.name == "per_day_max_sum").unwrap();
        assert_eq!(heur.value, 4);
        assert!(!heur.certified);
    }

    #[test]
    fn day_invariance_is_derived() {
        let inst = Instance::new(vec![vec![3, 1], vec![3, 1]]).unwrap();
        assert!(inst.is_day_invariant());
        assert_eq!(inst.p(1, 0), 3);
        let inst = Instance::new(vec![vec![3, 1], vec![1, 3]]).unwrap();
        assert!(!inst.is_day_invariant());
        assert!(Instance::new(vec![vec![0, 1]]).is_err());
        assert!(Instance::new(vec![vec![1, 1], vec![1]]).is_err());
    }

    #[test]
    fn json_canonical_form() {
        let inst = e1();
        assert_eq!(
            inst.to_json(),
            r#"{"n":2,"m":2,"day_invariant":true,"p":[[1,2]]}"#
        );
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
        let bad = r#"{"n":2,"m":2,"day_invariant":true,"p":[[1,2],[2,1]]}"#;
        assert!(Instance::from_json(bad).is_err());
        let s = Schedule::new(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(s.to_json(), r#"{"perms":[[1,2],[2,1]]}"#);
        assert_eq!(Schedule::from_json(&s.to_json()).unwrap(), s);
        assert!(Schedule::from_json(r#"{"perms":[[0,1]]}"#).is_err());
    }
}

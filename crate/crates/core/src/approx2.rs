//! LP-based 2-approximation for day-dependent instances.
//!
//! The relaxation has one fractional completion time `x[i][j]` per job and a
//! makespan-like variable `K`:
//!
//! * `sum_i x[i][j] <= K` for every client `j`;
//! * `sum_{j in S} p[i][j] x[i][j] >= P_i(S)^2 / 2` for every day `i` and
//!   every client set `S`.
//!
//! The exponential family is separated exactly by checking, per day, the
//! prefix sets of the clients sorted by `x`. Rounding orders each day by
//! `x` and yields `C[i][j] <= 2 x[i][j]`.

use crate::error::Result;
use crate::lp::{self, LinearProgram, Row, Scalar, Sense, Status};
use crate::model::{objective, Instance, Schedule, Time};
use crate::ratio::Rational;

/// Separation tolerance in normalized units (processing times scaled to a
/// maximum of 1).
pub const TAU_SEP: f64 = 1e-7;

/// Largest `n m` for which other modules solve the relaxation just for a
/// bound or an estimate.
pub const AUXILIARY_SIZE_LIMIT: usize = 600;

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationSolution {
    pub k_lp: f64,
    /// `x[i][j]`, in the instance's time units.
    pub x: Vec<Vec<f64>>,
    /// Objective value after each cutting-plane round.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationCut {
    pub day: usize,
    /// Clients of the violated set, in ascending `x` order.
    pub clients: Vec<usize>,
    /// `P(S)^2 / 2 - sum p x`, in squared time units.
    pub violation: f64,
}

#[derive(Debug, Clone)]
pub struct Approx2Result {
    pub schedule: Schedule,
    pub k: Time,
    pub k_lp: f64,
    pub relaxation: RelaxationSolution,
    /// `false` when the cutting-plane loop stopped before separation
    /// certified the LP point.
    pub certified: bool,
    pub rounds: usize,
    /// Final program including generated cuts, normalized units.
    pub lp: LinearProgram,
}

impl Approx2Result {
    /// `K_lp` rounded up to the next integer, with a small allowance for
    /// floating-point noise.
    pub fn integer_lower_bound(&self) -> Time {
        let slack = 1e-7 * self.k_lp.abs().max(1.0);
        (self.k_lp - slack).ceil().max(0.0) as Time
    }
}

fn var(n: usize, i: usize, j: usize) -> usize {
    1 + i * n + j
}

/// Core program with processing times divided by `unit`: constraint (1) per
/// client, and singleton constraints `x[i][j] >= p[i][j] / 2` as bounds.
fn build_core(instance: &Instance, unit: f64) -> LinearProgram {
    let (n, m) = (instance.n(), instance.m());
    let mut lp = LinearProgram::new();
    let k = lp.add_var("K", 0.0, f64::INFINITY);
    for i in 0..m {
        for j in 0..n {
            let p = instance.p(i, j) as f64 / unit;
            lp.add_var(format!("x_{}_{}", i + 1, j + 1), 0.5 * p, f64::INFINITY);
        }
    }
    for j in 0..n {
        let mut coeffs: Vec<(usize, f64)> = (0..m).map(|i| (var(n, i, j), 1.0)).collect();
        coeffs.push((k, -1.0));
        lp.add_row(Row::new(
            format!("client_{}", j + 1),
            coeffs,
            Sense::Le,
            0.0,
        ));
    }
    lp.set_objective(vec![(k, 1.0)]);
    lp
}

/// The seed program in normalized units (largest processing time 1).
pub fn build_relaxation_core(instance: &Instance) -> LinearProgram {
    build_core(instance, instance.p_max() as f64)
}

struct PrefixCut<S> {
    day: usize,
    clients: Vec<usize>,
    violation: S,
}

/// Most violated prefix set of each day. `p` and `x` share one unit.
fn prefix_cuts<S: Scalar>(p: &[Vec<S>], x: &[Vec<S>], tol: &S) -> Vec<PrefixCut<S>> {
    let mut cuts = Vec::new();
    for (day, (pd, xd)) in p.iter().zip(x).enumerate() {
        let mut order: Vec<usize> = (0..pd.len()).collect();
        order.sort_by(|&a, &b| {
            xd[a]
                .partial_cmp(&xd[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let half = S::one() / (S::one() + S::one());
        let (mut load, mut lhs) = (S::zero(), S::zero());
        let mut best: Option<(usize, S)> = None;
        for (len, &j) in order.iter().enumerate() {
            load = load + pd[j].clone();
            lhs = lhs + pd[j].clone() * xd[j].clone();
            let v = half.clone() * load.clone() * load.clone() - lhs.clone();
            if v > *tol && best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                best = Some((len + 1, v));
            }
        }
        if let Some((len, violation)) = best {
            cuts.push(PrefixCut {
                day,
                clients: order[..len].to_vec(),
                violation,
            });
        }
    }
    cuts
}

fn cut_row<S: Scalar>(n: usize, p: &[Vec<S>], cut: &PrefixCut<S>) -> Row {
    let load: f64 = cut.clients.iter().map(|&j| p[cut.day][j].to_f64()).sum();
    let coeffs = cut
        .clients
        .iter()
        .map(|&j| (var(n, cut.day, j), p[cut.day][j].to_f64()))
        .collect();
    Row::new(
        format!("prefix_{}_{}", cut.day + 1, cut.clients.len()),
        coeffs,
        Sense::Ge,
        0.5 * load * load,
    )
}

fn normalized<S: Scalar>(instance: &Instance, unit: f64) -> Vec<Vec<S>> {
    (0..instance.m())
        .map(|i| {
            instance
                .day(i)
                .iter()
                .map(|&p| S::from_f64(p as f64 / unit))
                .collect()
        })
        .collect()
}

fn unflatten<S: Clone>(n: usize, m: usize, x: &[S]) -> Vec<Vec<S>> {
    (0..m)
        .map(|i| (0..n).map(|j| x[var(n, i, j)].clone()).collect())
        .collect()
}

/// Direct separation: the most violated prefix set over all days, or `None`
/// when every prefix set (and hence every client set) is satisfied.
pub fn separation_direct(instance: &Instance, x: &[Vec<f64>]) -> Option<SeparationCut> {
    let unit = instance.p_max() as f64;
    let p = normalized::<f64>(instance, unit);
    let xn: Vec<Vec<f64>> = x
        .iter()
        .map(|r| r.iter().map(|v| v / unit).collect())
        .collect();
    prefix_cuts(&p, &xn, &TAU_SEP)
        .into_iter()
        .max_by(|a, b| a.violation.total_cmp(&b.violation).then(b.day.cmp(&a.day)))
        .map(|c| SeparationCut {
            day: c.day,
            clients: c.clients,
            violation: c.violation * unit * unit,
        })
}

/// Checks all `2^n - 1` client sets of every day. Test oracle for
/// [`separation_direct`]; `n` must be small.
pub fn separation_exhaustive(instance: &Instance, x: &[Vec<f64>]) -> Option<SeparationCut> {
    let n = instance.n();
    assert!(n < 25, "exhaustive separation is exponential in n");
    let unit = instance.p_max() as f64;
    let mut best: Option<SeparationCut> = None;
    for (day, xd) in x.iter().enumerate() {
        let p = instance.day(day);
        for mask in 1u32..(1 << n) {
            let (mut load, mut lhs) = (0.0, 0.0);
            for j in (0..n).filter(|j| mask >> j & 1 == 1) {
                let pj = p[j] as f64 / unit;
                load += pj;
                lhs += pj * xd[j] / unit;
            }
            let v = 0.5 * load * load - lhs;
            if v > TAU_SEP && best.as_ref().is_none_or(|b| v * unit * unit > b.violation) {
                best = Some(SeparationCut {
                    day,
                    clients: (0..n).filter(|j| mask >> j & 1 == 1).collect(),
                    violation: v * unit * unit,
                });
            }
        }
    }
    best
}

fn default_rounds(instance: &Instance) -> usize {
    10 * instance.n() * instance.m()
}

/// Solves the relaxation by cut generation in `f64`.
pub fn solve_relaxation(
    instance: &Instance,
) -> Result<(RelaxationSolution, bool, usize, LinearProgram)> {
    let (n, m) = (instance.n(), instance.m());
    let unit = instance.p_max() as f64;
    let core = build_core(instance, unit);
    let p = normalized::<f64>(instance, unit);
    let res = lp::cutting_plane_solve::<f64, _>(
        &core,
        |x| {
            let xs = unflatten(n, m, x);
            prefix_cuts(&p, &xs, &TAU_SEP)
                .iter()
                .map(|c| cut_row(n, &p, c))
                .collect()
        },
        default_rounds(instance),
    )?;
    let certified = res.solution.status == Status::Optimal;
    let x = unflatten(n, m, &res.solution.x)
        .into_iter()
        .map(|r| r.into_iter().map(|v| v * unit).collect())
        .collect();
    Ok((
        RelaxationSolution {
            k_lp: res.solution.value * unit,
            x,
            history: res.history.iter().map(|v| v * unit).collect(),
        },
        certified,
        res.rounds,
        res.lp,
    ))
}

/// Exact relaxation value over rationals, on unnormalized data.
pub fn relaxation_value_exact(instance: &Instance) -> Result<Option<Rational>> {
    let (n, m) = (instance.n(), instance.m());
    let core = build_core(instance, 1.0);
    let p = normalized::<Rational>(instance, 1.0);
    let zero = Rational::from_integer(0.into());
    let res = lp::cutting_plane_solve::<Rational, _>(
        &core,
        |x| {
            let xs = unflatten(n, m, x);
            prefix_cuts(&p, &xs, &zero)
                .iter()
                .map(|c| cut_row(n, &p, c))
                .collect()
        },
        usize::MAX,
    )?;
    Ok((res.solution.status == Status::Optimal).then_some(res.solution.value))
}

/// Orders every day by non-decreasing `x`, ties by client index. Values are
/// compared in steps of `1e-9` times the day's largest value, so round-off
/// does not split ties.
pub fn round_lp_solution(instance: &Instance, sol: &RelaxationSolution) -> Schedule {
    let orders = (0..instance.m())
        .map(|i| {
            let xd = &sol.x[i];
            let top = xd.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            let step = if top > 0.0 { top * 1e-9 } else { 1.0 };
            let key = |j: usize| (xd[j] / step).round() as i64;
            let mut order: Vec<usize> = (0..instance.n()).collect();
            order.sort_by_key(|&j| (key(j), j));
            order
        })
        .collect();
    Schedule::new(orders)
}

pub fn approx2_solve(instance: &Instance) -> Result<Approx2Result> {
    let (relaxation, certified, rounds, lp) = solve_relaxation(instance)?;
    let schedule = round_lp_solution(instance, &relaxation);
    let k = objective(instance, &schedule)?;
    Ok(Approx2Result {
        schedule,
        k,
        k_lp: relaxation.k_lp,
        relaxation,
        certified,
        rounds,
        lp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate_schedule;
    use crate::ratio;

    fn e1() -> Instance {
        Instance::day_invariant(vec![1, 2], 2).unwrap()
    }

    fn e2() -> Instance {
        Instance::new(vec![vec![1, 2], vec![2, 1]]).unwrap()
    }

    #[test]
    fn seed_program_shape() {
        let lp = build_relaxation_core(&Instance::day_invariant(vec![1], 1).unwrap());
        assert_eq!(lp.vars.len(), 2);
        assert_eq!(lp.vars[1].lower, 0.5);
        assert_eq!(lp.rows.len(), 1);
        assert_eq!(lp::solve_lp(&lp).unwrap().value, 0.5);
    }

    #[test]
    fn exact_relaxation_goldens() {
        let cases: Vec<(Instance, Rational)> = vec![
            (
                Instance::day_invariant(vec![1], 1).unwrap(),
                ratio::frac(1, 2),
            ),
            (
                Instance::day_invariant(vec![1, 2], 1).unwrap(),
                ratio::frac(3, 2),
            ),
            (e1(), ratio::int(3)),
            (e2(), ratio::frac(5, 2)),
            (
                Instance::new(vec![vec![4, 2, 7, 1], vec![3, 3, 8, 2]]).unwrap(),
                ratio::frac(223, 16),
            ),
        ];
        for (inst, want) in cases {
            assert_eq!(relaxation_value_exact(&inst).unwrap(), Some(want.clone()));
            let approx = approx2_solve(&inst).unwrap();
            assert!((approx.k_lp - ratio::to_f64(&want)).abs() < 1e-9);
        }
    }

    #[test]
    fn six_client_golden() {
        let inst = Instance::new(vec![
            vec![3, 1, 4, 1, 5, 9],
            vec![2, 6, 5, 3, 5, 8],
            vec![9, 7, 9, 3, 2, 3],
        ])
        .unwrap();
        let res = approx2_solve(&inst).unwrap();
        assert!(res.certified);
        assert!((res.k_lp - 2099.0 / 64.0).abs() < 1e-7);
        let ev = evaluate_schedule(&inst, &res.schedule).unwrap();
        for i in 0..3 {
            for j in 0..6 {
                let c = ev.completion[i][j] as f64;
                assert!(c <= 2.0 * res.relaxation.x[i][j] + 1e-6);
            }
        }
        assert!(res.k as f64 <= 2.0 * res.k_lp + 1e-6);
    }

    #[test]
    fn zero_point_violates_first_singleton() {
        let inst = e1();
        let cut = separation_direct(&inst, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(cut.day, 0);
        assert!(cut.violation > 0.0);
    }

    #[test]
    fn schedule_completions_are_feasible() {
        let inst = Instance::new(vec![vec![3, 1, 4], vec![1, 5, 9]]).unwrap();
        let s = Schedule::new(vec![vec![2, 0, 1], vec![1, 2, 0]]);
        let ev = evaluate_schedule(&inst, &s).unwrap();
        let x: Vec<Vec<f64>> = ev
            .completion
            .iter()
            .map(|r| r.iter().map(|&c| c as f64).collect())
            .collect();
        assert_eq!(separation_direct(&inst, &x), None);
        assert_eq!(separation_exhaustive(&inst, &x), None);
        let rounded = round_lp_solution(
            &inst,
            &RelaxationSolution {
                k_lp: 0.0,
                x,
                history: vec![],
            },
        );
        assert_eq!(rounded, s);
    }

    #[test]
    fn e2_sandwich() {
        let res = approx2_solve(&e2()).unwrap();
        assert!(res.certified);
        assert!(res.k_lp <= 4.0);
        assert!(res.k >= 4);
        assert!(res.k as f64 <= 2.0 * res.k_lp + 1e-9);
    }
}

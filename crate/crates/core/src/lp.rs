//! Dense two-phase simplex with Bland's rule and a cutting-plane driver.
//!
//! The solver is generic over [`Scalar`]: `f64` for speed, [`Rational`] for
//! exact golden values. Problem data is always stored as `f64`; in exact mode
//! every coefficient is converted without rounding.

use std::fmt::{self, Debug, Write as _};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::ratio::{self, Rational};

/// Feasibility tolerance for the floating-point solver, relative to the
/// magnitude of the data.
pub const TAU: f64 = 1e-9;

/// Residual of the auxiliary problem above which an `f64` solve reports
/// infeasibility, relative to the largest right-hand side.
const PHASE_ONE_TOL: f64 = 1e-7;

pub trait Scalar: Signed + Clone + PartialOrd + Debug {
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Pivot and optimality tolerance; zero in exact arithmetic.
    fn tol() -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn tol() -> Self {
        TAU
    }
}

impl Scalar for Rational {
    fn from_f64(v: f64) -> Self {
        ratio::from_f64(v)
    }
    fn to_f64(&self) -> f64 {
        ratio::to_f64(self)
    }
    fn tol() -> Self {
        Rational::from_integer(0.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    /// May be `f64::NEG_INFINITY`.
    pub lower: f64,
    /// May be `f64::INFINITY`.
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn new(name: impl Into<String>, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        Self {
            name: name.into(),
            coeffs,
            sense,
            rhs,
        }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(k, a)| a * x[k]).sum()
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// `minimize c·x` subject to rows and variable bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    pub objective: Vec<(usize, f64)>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn set_objective(&mut self, c: Vec<(usize, f64)>) {
        self.objective = c;
    }

    pub fn validate(&self) -> Result<()> {
        let nv = self.vars.len();
        for v in &self.vars {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower == f64::INFINITY || v.lower > v.upper
            {
                return Err(Error::MalformedLp(format!("bad bounds on {}", v.name)));
            }
        }
        for r in &self.rows {
            if !r.rhs.is_finite() {
                return Err(Error::MalformedLp(format!("non-finite rhs in {}", r.name)));
            }
            for &(k, a) in &r.coeffs {
                if k >= nv || !a.is_finite() {
                    return Err(Error::MalformedLp(format!("bad coefficient in {}", r.name)));
                }
            }
        }
        for &(k, a) in &self.objective {
            if k >= nv || !a.is_finite() {
                return Err(Error::MalformedLp("bad objective coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(k, c)| c * x[k]).sum()
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x));
        let bounds = self
            .vars
            .iter()
            .zip(x)
            .map(|(v, &xi)| (v.lower - xi).max(xi - v.upper).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// CPLEX-LP text rendering.
    pub fn to_cplex_lp(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        write_terms(&mut out, &self.objective, &self.vars);
        out.push_str("\nSubject To\n");
        for (r, row) in self.rows.iter().enumerate() {
            let name = if row.name.is_empty() {
                format!("r{r}")
            } else {
                sanitize(&row.name)
            };
            let _ = write!(out, " {name}:");
            write_terms(&mut out, &row.coeffs, &self.vars);
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        out.push_str("Bounds\n");
        for v in &self.vars {
            let name = sanitize(&v.name);
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (true, true) => {
                    let _ = writeln!(out, " {} <= {name} <= {}", v.lower, v.upper);
                }
                (true, false) => {
                    let _ = writeln!(out, " {name} >= {}", v.lower);
                }
                (false, true) => {
                    let _ = writeln!(out, " -inf <= {name} <= {}", v.upper);
                }
                (false, false) => {
                    let _ = writeln!(out, " {name} free");
                }
            }
        }
        out.push_str("End\n");
        out
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], vars: &[Variable]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (idx, &(k, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 {
            " -"
        } else if idx > 0 {
            " +"
        } else {
            ""
        };
        let _ = write!(out, "{sign} {} {}", a.abs(), sanitize(&vars[k].name));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration-limit",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S = f64> {
    pub status: Status,
    pub x: Vec<S>,
    pub value: S,
    pub pivots: usize,
}

impl<S: Scalar> LpSolution<S> {
    pub fn x_f64(&self) -> Vec<f64> {
        self.x.iter().map(Scalar::to_f64).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_pivots: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_pivots: 200_000,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution<f64>> {
    solve_with::<f64>(lp, SimplexOptions::default())
}

/// Exact solve over rationals.
pub fn solve_lp_exact(lp: &LinearProgram) -> Result<LpSolution<Rational>> {
    solve_with::<Rational>(lp, SimplexOptions::default())
}

/// How an original variable maps onto non-negative tableau columns:
/// `x = offset + sign * y[col] (- y[neg])`.
#[derive(Clone)]
struct VarMap<S> {
    col: usize,
    neg: Option<usize>,
    sign: S,
    offset: S,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    /// Reduced costs; last entry holds minus the objective value.
    obj: Vec<S>,
    basis: Vec<usize>,
    ncols: usize,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / piv.clone();
            }
        }
        let prow = self.rows[r].clone();
        let nz: Vec<usize> = (0..=self.ncols).filter(|&k| !prow[k].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &k in &nz {
                row[k] = row[k].clone() - f.clone() * prow[k].clone();
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &k in &nz {
                self.obj[k] = self.obj[k].clone() - f.clone() * prow[k].clone();
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn set_costs(&mut self, cost: &[S]) {
        let mut obj: Vec<S> = cost.to_vec();
        obj.push(S::zero());
        for (r, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            for (k, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    obj[k] = obj[k].clone() - cb.clone() * v.clone();
                }
            }
        }
        self.obj = obj;
    }

    /// Runs Bland-rule pivots over columns `< allowed`.
    fn optimize(&mut self, allowed: usize, max_pivots: usize) -> Status {
        let tol = S::tol();
        let neg_tol = -tol.clone();
        loop {
            if self.pivots >= max_pivots {
                return Status::IterationLimit;
            }
            let Some(c) = (0..allowed).find(|&k| self.obj[k] < neg_tol) else {
                return Status::Optimal;
            };
            let mut best: Option<(usize, S)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c] > tol {
                    let ratio = row[self.ncols].clone() / row[c].clone();
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => {
                            ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                        }
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                None => return Status::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    /// Dual simplex from a dual-feasible basis, with the smallest-index
    /// rule for both the leaving row and ties in the ratio test.
    fn dual_optimize(&mut self, max_pivots: usize) -> Status {
        let tol = S::tol();
        let neg_tol = -tol;
        loop {
            if self.pivots >= max_pivots {
                return Status::IterationLimit;
            }
            let leaving = (0..self.rows.len())
                .filter(|&r| self.rows[r][self.ncols] < neg_tol)
                .min_by_key(|&r| self.basis[r]);
            let Some(r) = leaving else {
                return Status::Optimal;
            };
            let mut best: Option<(usize, S)> = None;
            for k in 0..self.ncols {
                let a = &self.rows[r][k];
                if *a < neg_tol {
                    let ratio = self.obj[k].clone() / -a.clone();
                    if best.as_ref().is_none_or(|(_, bv)| ratio < *bv) {
                        best = Some((k, ratio));
                    }
                }
            }
            match best {
                None => return Status::Infeasible,
                Some((k, _)) => self.pivot(r, k),
            }
        }
    }

    /// Appends the row `a y (sense) rhs` over the first `a.len()` columns
    /// with a fresh slack column, expressed in the current basis.
    fn add_row(&mut self, a: Vec<S>, sense: Sense, rhs: S) {
        debug_assert!(sense != Sense::Eq);
        let n = self.ncols;
        for row in self.rows.iter_mut() {
            row.insert(n, S::zero());
        }
        self.obj.insert(n, S::zero());
        let flip = sense == Sense::Ge;
        let mut row: Vec<S> = a.into_iter().map(|v| if flip { -v } else { v }).collect();
        row.resize(n, S::zero());
        row.push(S::one());
        row.push(if flip { -rhs } else { rhs });
        for (r, b) in self.basis.iter().enumerate() {
            let f = row[*b].clone();
            if f.is_zero() {
                continue;
            }
            for (k, v) in self.rows[r].iter().enumerate() {
                if !v.is_zero() {
                    row[k] = row[k].clone() - f.clone() * v.clone();
                }
            }
        }
        self.rows.push(row);
        self.basis.push(n);
        self.ncols += 1;
    }
}

/// Tableau state of a solve, reusable for re-solves after adding rows.
struct Solver<S> {
    t: Tableau<S>,
    maps: Vec<VarMap<S>>,
    nstruct: usize,
    /// `false` once the tableau no longer describes an optimal basis.
    warm: bool,
}

fn column_maps<S: Scalar>(lp: &LinearProgram) -> (Vec<VarMap<S>>, usize, Vec<(usize, S)>) {
    let mut maps: Vec<VarMap<S>> = Vec::with_capacity(lp.vars.len());
    let mut ncols = 0;
    // Extra `y <= u - l` rows for doubly bounded variables.
    let mut bound_rows: Vec<(usize, S)> = Vec::new();
    for v in &lp.vars {
        if v.lower.is_finite() {
            maps.push(VarMap {
                col: ncols,
                neg: None,
                sign: S::one(),
                offset: S::from_f64(v.lower),
            });
            if v.upper.is_finite() {
                bound_rows.push((ncols, S::from_f64(v.upper) - S::from_f64(v.lower)));
            }
            ncols += 1;
        } else if v.upper.is_finite() {
            maps.push(VarMap {
                col: ncols,
                neg: None,
                sign: -S::one(),
                offset: S::from_f64(v.upper),
            });
            ncols += 1;
        } else {
            maps.push(VarMap {
                col: ncols,
                neg: Some(ncols + 1),
                sign: S::one(),
                offset: S::zero(),
            });
            ncols += 2;
        }
    }
    (maps, ncols, bound_rows)
}

/// `row` over structural columns, with the right-hand side shifted by the
/// variable offsets.
fn structural_row<S: Scalar>(row: &Row, maps: &[VarMap<S>], nstruct: usize) -> (Vec<S>, S) {
    let mut a = vec![S::zero(); nstruct];
    let mut rhs = S::from_f64(row.rhs);
    for &(k, coef) in &row.coeffs {
        let c = S::from_f64(coef);
        let m = &maps[k];
        rhs = rhs - c.clone() * m.offset.clone();
        a[m.col] = a[m.col].clone() + c.clone() * m.sign.clone();
        if let Some(neg) = m.neg {
            a[neg] = a[neg].clone() - c;
        }
    }
    (a, rhs)
}

impl<S: Scalar> Solver<S> {
    /// Two-phase simplex from scratch.
    fn cold(lp: &LinearProgram, opts: SimplexOptions) -> Result<(Self, Status)> {
        lp.validate()?;
        let (maps, nstruct, bound_rows) = column_maps::<S>(lp);

        // Dense rows over structural columns, in standard form with rhs >= 0.
        let mut dense: Vec<(Vec<S>, Sense, S)> = lp
            .rows
            .iter()
            .map(|row| {
                let (a, rhs) = structural_row(row, &maps, nstruct);
                (a, row.sense, rhs)
            })
            .collect();
        for (col, ub) in bound_rows {
            let mut a = vec![S::zero(); nstruct];
            a[col] = S::one();
            dense.push((a, Sense::Le, ub));
        }
        for (a, sense, rhs) in dense.iter_mut() {
            if rhs.is_negative() {
                a.iter_mut().for_each(|v| *v = -v.clone());
                *rhs = -rhs.clone();
                *sense = match *sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
        }

        let nrows = dense.len();
        let nslack = dense.iter().filter(|(_, s, _)| *s != Sense::Eq).count();
        let nart = dense.iter().filter(|(_, s, _)| *s != Sense::Le).count();
        let art_start = nstruct + nslack;
        let total = art_start + nart;

        let mut rows = Vec::with_capacity(nrows);
        let mut basis = Vec::with_capacity(nrows);
        let (mut si, mut ai) = (nstruct, art_start);
        for (a, sense, rhs) in dense {
            let mut row = a;
            row.resize(total + 1, S::zero());
            match sense {
                Sense::Le => {
                    row[si] = S::one();
                    basis.push(si);
                    si += 1;
                }
                Sense::Ge => {
                    row[si] = -S::one();
                    si += 1;
                    row[ai] = S::one();
                    basis.push(ai);
                    ai += 1;
                }
                Sense::Eq => {
                    row[ai] = S::one();
                    basis.push(ai);
                    ai += 1;
                }
            }
            row[total] = rhs;
            rows.push(row);
        }

        let mut s = Solver {
            t: Tableau {
                rows,
                obj: Vec::new(),
                basis,
                ncols: total,
                pivots: 0,
            },
            maps,
            nstruct,
            warm: false,
        };
        let t = &mut s.t;

        let scale = t
            .rows
            .iter()
            .map(|r| r[total].to_f64().abs())
            .fold(1.0, f64::max);

        if nart > 0 {
            let mut cost = vec![S::zero(); total];
            cost[art_start..].iter_mut().for_each(|c| *c = S::one());
            t.set_costs(&cost);
            let status = t.optimize(total, opts.max_pivots);
            if status == Status::IterationLimit {
                return Ok((s, Status::IterationLimit));
            }
            let infeas = -t.obj[total].clone();
            let limit = if S::tol().is_zero() {
                S::zero()
            } else {
                S::from_f64(PHASE_ONE_TOL * scale)
            };
            if infeas > limit {
                return Ok((s, Status::Infeasible));
            }
            // Pivot remaining artificials out of the basis, dropping redundant rows.
            let mut r = 0;
            while r < t.rows.len() {
                if t.basis[r] >= art_start {
                    let tol = S::tol();
                    match (0..art_start).find(|&k| t.rows[r][k].abs() > tol) {
                        Some(c) => t.pivot(r, c),
                        None => {
                            t.rows.remove(r);
                            t.basis.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
            for row in t.rows.iter_mut() {
                let rhs = row[total].clone();
                row.truncate(art_start);
                row.push(rhs);
            }
            t.ncols = art_start;
        }

        let mut cost = vec![S::zero(); art_start];
        for &(k, c) in &lp.objective {
            let m = &s.maps[k];
            let c = S::from_f64(c);
            cost[m.col] = cost[m.col].clone() + c.clone() * m.sign.clone();
            if let Some(neg) = m.neg {
                cost[neg] = cost[neg].clone() - c;
            }
        }
        s.t.set_costs(&cost);
        let status = s.t.optimize(art_start, opts.max_pivots);
        s.warm = status == Status::Optimal;
        Ok((s, status))
    }

    /// Adds inequality rows to an optimal tableau and restores optimality.
    fn add_rows(&mut self, rows: &[Row], opts: SimplexOptions) -> Status {
        debug_assert!(self.warm && rows.iter().all(|r| r.sense != Sense::Eq));
        for row in rows {
            let (a, rhs) = structural_row(row, &self.maps, self.nstruct);
            self.t.add_row(a, row.sense, rhs);
        }
        let limit = self.t.pivots + opts.max_pivots;
        let mut status = self.t.dual_optimize(limit);
        if status == Status::Optimal {
            let n = self.t.ncols;
            status = self.t.optimize(n, limit);
        }
        self.warm = status == Status::Optimal;
        status
    }

    fn solution(&self, lp: &LinearProgram, status: Status) -> LpSolution<S> {
        let t = &self.t;
        let mut y = vec![S::zero(); t.ncols];
        for (r, &b) in t.basis.iter().enumerate() {
            y[b] = t.rows[r][t.ncols].clone();
        }
        let x: Vec<S> = self
            .maps
            .iter()
            .map(|m| {
                let mut v = m.offset.clone() + m.sign.clone() * y[m.col].clone();
                if let Some(neg) = m.neg {
                    v = v - y[neg].clone();
                }
                v
            })
            .collect();
        let value = lp.objective.iter().fold(S::zero(), |acc, &(k, c)| {
            acc + S::from_f64(c) * x[k].clone()
        });
        LpSolution {
            status,
            x,
            value,
            pivots: t.pivots,
        }
    }
}

/// Two-phase simplex in scalar type `S`.
pub fn solve_with<S: Scalar>(lp: &LinearProgram, opts: SimplexOptions) -> Result<LpSolution<S>> {
    let (solver, status) = Solver::<S>::cold(lp, opts)?;
    Ok(solver.solution(lp, status))
}

#[derive(Debug, Clone)]
pub struct CuttingPlaneResult<S = f64> {
    pub solution: LpSolution<S>,
    pub rounds: usize,
    /// Objective value after each round.
    pub history: Vec<f64>,
    /// The final program, including every generated cut.
    pub lp: LinearProgram,
}

/// Re-solves `core` while `separate` keeps returning violated rows.
///
/// The callback receives the current iterate and returns the cuts to add; an
/// empty vector certifies feasibility for the full constraint family.
/// Inequality cuts are added to the optimal tableau and re-optimized by dual
/// simplex; a final iterate that fails re-substitution into every row is
/// recomputed from scratch.
pub fn cutting_plane_solve<S, F>(
    core: &LinearProgram,
    mut separate: F,
    max_rounds: usize,
) -> Result<CuttingPlaneResult<S>>
where
    S: Scalar,
    F: FnMut(&[S]) -> Vec<Row>,
{
    let opts = SimplexOptions::default();
    let mut lp = core.clone();
    let mut history = Vec::new();
    let mut rounds = 0;
    let (mut solver, mut status) = Solver::<S>::cold(&lp, opts)?;
    loop {
        let mut sol = solver.solution(&lp, status);
        if status == Status::Optimal && !resubstitutes(&lp, &sol) {
            (solver, status) = Solver::<S>::cold(&lp, opts)?;
            sol = solver.solution(&lp, status);
        }
        history.push(sol.value.to_f64());
        let done = |sol, rounds, history, lp| {
            Ok(CuttingPlaneResult {
                solution: sol,
                rounds,
                history,
                lp,
            })
        };
        if sol.status != Status::Optimal {
            return done(sol, rounds, history, lp);
        }
        let cuts = separate(&sol.x);
        if cuts.is_empty() {
            return done(sol, rounds, history, lp);
        }
        if rounds >= max_rounds {
            sol.status = Status::IterationLimit;
            return done(sol, rounds, history, lp);
        }
        let start = lp.rows.len();
        lp.rows.extend(cuts);
        lp.validate()?;
        if solver.warm && lp.rows[start..].iter().all(|r| r.sense != Sense::Eq) {
            status = solver.add_rows(&lp.rows[start..], opts);
        } else {
            (solver, status) = Solver::<S>::cold(&lp, opts)?;
        }
        rounds += 1;
    }
}

/// Every row and bound holds at `sol.x` within `TAU` relative to the data.
fn resubstitutes<S: Scalar>(lp: &LinearProgram, sol: &LpSolution<S>) -> bool {
    if S::tol().is_zero() {
        return true;
    }
    let scale = lp.rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
    lp.max_violation(&sol.x_f64()) <= 100.0 * TAU * scale
}

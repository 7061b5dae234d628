//! Two-day inversion for day-invariant instances.
//!
//! Odd days follow a fixed order and even days its reverse, so every client
//! finishes each pair of consecutive days at `P + p_j` in total. With the
//! enhanced lower bound this gives a ratio of `(1 + sqrt 2)/2 + O(eps)` once
//! `m >= 1/eps`; shorter horizons are handed to the PTAS.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{enhanced_lower_bound, objective, Instance, Schedule, Time};
use crate::ptas::{ptas_solve, PtasOptions};
use crate::ratio::{self, Rational};

/// `(1 + sqrt 2) / 2`, attained at `(x, y) = (1 + 1/sqrt 2, 1/sqrt 2)`.
pub fn ratio_constant() -> f64 {
    (1.0 + std::f64::consts::SQRT_2) / 2.0
}

pub const RATIO_CONSTANT_TEXT: &str = "(1+sqrt2)/2 at (x,y) = (1+1/sqrt2, 1/sqrt2)";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionCertificate {
    pub k: Time,
    /// `floor(m/2) (P + p_max) + P`.
    pub upper_formula: Time,
    #[serde(serialize_with = "ser_rational")]
    pub lb: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub ratio_vs_lb: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio::display(r))
}

impl InversionCertificate {
    pub fn new(instance: &Instance, k: Time) -> Result<Self> {
        let lb = enhanced_lower_bound(instance)?;
        let ratio_vs_lb = ratio::int(k) / lb.clone();
        Ok(Self {
            k,
            upper_formula: upper_formula(instance)?,
            lb,
            ratio_vs_lb,
        })
    }
}

pub fn upper_formula(instance: &Instance) -> Result<Time> {
    let total = instance.total()?;
    Ok((instance.m() / 2) as Time * (total + instance.p_max()) + total)
}

/// `order` on odd days (1st, 3rd, ...), its reverse on even days.
pub fn two_day_inversion(instance: &Instance, order: &[usize]) -> Result<Schedule> {
    instance.require_day_invariant()?;
    let rev: Vec<usize> = order.iter().rev().copied().collect();
    let orders = (0..instance.m())
        .map(|i| {
            if i % 2 == 0 {
                order.to_vec()
            } else {
                rev.clone()
            }
        })
        .collect();
    let s = Schedule::new(orders);
    s.validate(instance.n(), instance.m())?;
    Ok(s)
}

#[derive(Debug, Clone)]
pub struct DayinvResult {
    pub schedule: Schedule,
    pub k: Time,
    pub used_ptas: bool,
    pub certificate: InversionCertificate,
    /// Guaranteed ratio against the optimum, when certified.
    pub certified_ratio: Option<f64>,
}

/// Inversion when `m >= 1/eps`, otherwise the PTAS (keeping the inversion
/// schedule if it happens to be better).
pub fn dayinv_approx(
    instance: &Instance,
    eps: &Rational,
    opts: &PtasOptions,
) -> Result<DayinvResult> {
    instance.require_day_invariant()?;
    if *eps <= ratio::int(0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let identity: Vec<usize> = (0..instance.n()).collect();
    let inversion = two_day_inversion(instance, &identity)?;
    let k_inv = objective(instance, &inversion)?;
    let eps_f = ratio::to_f64(eps);

    if ratio::int(instance.m() as u64) * eps.clone() < ratio::int(1) {
        let res = ptas_solve(instance, eps, opts)?;
        let (schedule, k) = if res.k <= k_inv {
            (res.schedule, res.k)
        } else {
            (inversion, k_inv)
        };
        return Ok(DayinvResult {
            certificate: InversionCertificate::new(instance, k)?,
            schedule,
            k,
            used_ptas: true,
            certified_ratio: res.certified.then_some(1.0 + eps_f),
        });
    }
    Ok(DayinvResult {
        certificate: InversionCertificate::new(instance, k_inv)?,
        schedule: inversion,
        k: k_inv,
        used_ptas: false,
        certified_ratio: Some(ratio_constant() + 2.0 * eps_f),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_instance_meets_counting_bound() {
        let inst = Instance::day_invariant(vec![1; 7], 10).unwrap();
        let s = two_day_inversion(&inst, &(0..7).collect::<Vec<_>>()).unwrap();
        assert_eq!(objective(&inst, &s).unwrap(), 40);
    }

    #[test]
    fn e1_is_optimal() {
        let inst = Instance::day_invariant(vec![1, 2], 2).unwrap();
        let s = two_day_inversion(&inst, &[0, 1]).unwrap();
        assert_eq!(objective(&inst, &s).unwrap(), 5);
        assert_eq!(upper_formula(&inst).unwrap(), 8);
    }

    #[test]
    fn single_day_uses_the_order() {
        let inst = Instance::day_invariant(vec![4, 1, 2], 1).unwrap();
        let s = two_day_inversion(&inst, &[1, 2, 0]).unwrap();
        assert_eq!(s, Schedule::new(vec![vec![1, 2, 0]]));
        assert_eq!(objective(&inst, &s).unwrap(), 7);
    }

    #[test]
    fn rejects_day_dependent() {
        let inst = Instance::new(vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(
            two_day_inversion(&inst, &[0, 1]),
            Err(Error::RequiresDayInvariant)
        );
    }

    #[test]
    fn dispatch_and_certificate() {
        let inst = Instance::day_invariant(vec![3, 1, 4, 1, 5], 8).unwrap();
        let r = dayinv_approx(&inst, &ratio::frac(1, 4), &PtasOptions::default()).unwrap();
        assert!(!r.used_ptas);
        assert!(r.k <= r.certificate.upper_formula);
        assert!(r.certificate.ratio_vs_lb >= ratio::int(1));
        assert!(ratio::to_f64(&r.certificate.ratio_vs_lb) <= ratio_constant() + 0.5);

        let short = Instance::day_invariant(vec![3, 1, 4], 2).unwrap();
        let r = dayinv_approx(&short, &ratio::frac(1, 4), &PtasOptions::default()).unwrap();
        assert!(r.used_ptas);

        let single = Instance::day_invariant(vec![6], 5).unwrap();
        let r = dayinv_approx(&single, &ratio::frac(1, 4), &PtasOptions::default()).unwrap();
        assert_eq!(r.k, 30);
        assert_eq!(r.certificate.ratio_vs_lb, ratio::int(1));
    }
}

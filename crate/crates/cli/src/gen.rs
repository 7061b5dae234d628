//! Seeded instance generation.

use anyhow::{bail, Result};
use fairsched::{Instance, Time};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    Uniform,
    /// `round(fraction n)` clients take `p_max`, the others `p_min`.
    TwoPoint {
        fraction: f64,
    },
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    pub p_min: Time,
    pub p_max: Time,
    pub day_invariant: bool,
    pub distribution: Distribution,
    pub seed: u64,
}

pub fn high_count(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64).round() as usize).min(n)
}

fn row(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<Time> {
    match spec.distribution {
        Distribution::Unit => vec![1; spec.n],
        Distribution::Uniform => (0..spec.n)
            .map(|_| rng.gen_range(spec.p_min..=spec.p_max))
            .collect(),
        Distribution::TwoPoint { fraction } => {
            let high = high_count(spec.n, fraction);
            let mut r: Vec<Time> = (0..spec.n)
                .map(|j| if j < high { spec.p_max } else { spec.p_min })
                .collect();
            r.shuffle(rng);
            r
        }
    }
}

/// Deterministic for a given spec.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    if spec.n == 0 || spec.m == 0 {
        bail!("n and m must be positive");
    }
    if spec.p_min == 0 || spec.p_min > spec.p_max {
        bail!("processing-time range must satisfy 1 <= p_min <= p_max");
    }
    if let Distribution::TwoPoint { fraction } = spec.distribution {
        if !(0.0..=1.0).contains(&fraction) {
            bail!("two-point fraction must lie in [0, 1]");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let inst = if spec.day_invariant {
        Instance::day_invariant(row(spec, &mut rng), spec.m)?
    } else {
        Instance::new((0..spec.m).map(|_| row(spec, &mut rng)).collect())?
    };
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(distribution: Distribution) -> GenSpec {
        GenSpec {
            n: 7,
            m: 10,
            p_min: 1,
            p_max: 100,
            day_invariant: false,
            distribution,
            seed: 42,
        }
    }

    #[test]
    fn unit_instance() {
        let inst = generate(&spec(Distribution::Unit)).unwrap();
        assert!(inst.is_unit());
        assert!(inst.is_day_invariant());
        assert_eq!((inst.n(), inst.m()), (7, 10));
    }

    #[test]
    fn seed_determinism() {
        let s = spec(Distribution::Uniform);
        assert_eq!(
            generate(&s).unwrap().to_json(),
            generate(&s).unwrap().to_json()
        );
        let other = GenSpec {
            seed: 43,
            ..s.clone()
        };
        assert_ne!(
            generate(&s).unwrap().to_json(),
            generate(&other).unwrap().to_json()
        );
    }

    #[test]
    fn two_point_counts() {
        let s = GenSpec {
            n: 50,
            ..spec(Distribution::TwoPoint { fraction: 0.1 })
        };
        let inst = generate(&s).unwrap();
        for i in 0..inst.m() {
            let high = inst.day(i).iter().filter(|&&p| p == 100).count();
            let low = inst.day(i).iter().filter(|&&p| p == 1).count();
            assert_eq!((high, low), (5, 45));
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        let mut s = spec(Distribution::Uniform);
        s.p_min = 0;
        assert!(generate(&s).is_err());
        s.p_min = 5;
        s.p_max = 4;
        assert!(generate(&s).is_err());
    }
}

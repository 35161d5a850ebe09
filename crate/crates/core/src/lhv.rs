//! Deterministic local-hidden-variable semantics for the MK polynomial:
//! scalar evaluation of M_n(lambda), exhaustive enumeration of all 4^n sign
//! assignments, and moment evaluation of weighted assignment distributions.
//!
//! Every deterministic value of M_n lands exactly on -1 or +1: each recursion
//! step multiplies one of the previous values by a sign, since exactly one of
//! (v + v')/2 and (v - v')/2 vanishes. The enumeration therefore asserts exact
//! set membership, not closeness.

use crate::error::{Error, Result};
use crate::{CONSTRUCTION_TOL, LHV_ENUM_CAP_QUBITS};

/// A deterministic strategy lambda: one sign pair (v_j, v'_j) per site, the
/// predetermined outcomes of the two observables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhvAssignment {
    values: Vec<(i8, i8)>,
}

impl LhvAssignment {
    pub fn new(values: Vec<(i8, i8)>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain {
                what: "assignment needs at least one site",
            });
        }
        for &(v, vp) in &values {
            if !((v == 1 || v == -1) && (vp == 1 || vp == -1)) {
                return Err(Error::Invariant {
                    what: "assignment entries must be exactly +-1",
                    deviation: f64::from(v) * f64::from(vp),
                });
            }
        }
        Ok(Self { values })
    }

    /// Decode a 2n-bit code: bit 2j holds v_j, bit 2j+1 holds v'_j, with a
    /// set bit meaning +1 and a clear bit -1.
    pub fn from_code(n: usize, code: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain {
                what: "assignment needs at least one site",
            });
        }
        if n > 32 || (n < 32 && code >= 1u64 << (2 * n)) {
            return Err(Error::Domain {
                what: "code out of range for the site count",
            });
        }
        let values = (0..n)
            .map(|j| {
                let v = if code >> (2 * j) & 1 == 1 { 1 } else { -1 };
                let vp = if code >> (2 * j + 1) & 1 == 1 { 1 } else { -1 };
                (v, vp)
            })
            .collect();
        Ok(Self { values })
    }

    pub fn code(&self) -> u64 {
        let mut code = 0u64;
        for (j, &(v, vp)) in self.values.iter().enumerate() {
            if v == 1 {
                code |= 1 << (2 * j);
            }
            if vp == 1 {
                code |= 1 << (2 * j + 1);
            }
        }
        code
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[(i8, i8)] {
        &self.values
    }
}

/// A weighted set of deterministic strategies: weights non-negative, summing
/// to one within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvDistribution {
    support: Vec<(LhvAssignment, f64)>,
}

impl LhvDistribution {
    pub fn new(support: Vec<(LhvAssignment, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Domain {
                what: "distribution needs non-empty support",
            });
        }
        let n = support[0].0.n();
        if support.iter().any(|(a, _)| a.n() != n) {
            return Err(Error::Shape {
                left: n,
                right: support.iter().map(|(a, _)| a.n()).max().unwrap_or(0),
            });
        }
        let mut sum = 0.0;
        for &(_, w) in &support {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Invariant {
                    what: "weights must be non-negative",
                    deviation: w,
                });
            }
            sum += w;
        }
        let dev = (sum - 1.0).abs();
        if dev > CONSTRUCTION_TOL {
            return Err(Error::Invariant {
                what: "weights must sum to one",
                deviation: dev,
            });
        }
        Ok(Self { support })
    }

    pub fn support(&self) -> &[(LhvAssignment, f64)] {
        &self.support
    }
}

/// Summary of an exhaustive sweep over all 4^n deterministic strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvEnumerationReport {
    pub n: usize,
    /// Number of assignments visited, always 4^n.
    pub count: u64,
    /// How many assignments evaluate to exactly -1.
    pub minus_count: u64,
    /// How many assignments evaluate to exactly +1.
    pub plus_count: u64,
    pub max_m: f64,
    pub min_m: f64,
    pub max_v: f64,
    pub min_v: f64,
    /// First assignment in code order attaining `max_v`.
    pub witness: LhvAssignment,
}

/// M_n(lambda) by the scalar recursion
/// B_k = B_{k-1} (v_k + v'_k)/2 + B'_{k-1} (v_k - v'_k)/2 (and symmetrically
/// for B'), starting from B_1 = v_1, B'_1 = v'_1.
pub fn mk_value(lambda: &LhvAssignment) -> f64 {
    let (v1, vp1) = lambda.values[0];
    let mut b = f64::from(v1);
    let mut bp = f64::from(vp1);
    for &(v, vp) in &lambda.values[1..] {
        let half_sum = f64::from(v + vp) / 2.0;
        let half_diff = f64::from(v - vp) / 2.0;
        let next_b = b * half_sum + bp * half_diff;
        let next_bp = bp * half_sum - b * half_diff;
        b = next_b;
        bp = next_bp;
    }
    b
}

/// V(lambda) = M(lambda) + M(lambda)^2 under determinism.
pub fn v_value(lambda: &LhvAssignment) -> f64 {
    let m = mk_value(lambda);
    m + m * m
}

fn mk_value_code(n: usize, code: u64) -> f64 {
    let mut b = if code & 1 == 1 { 1.0 } else { -1.0 };
    let mut bp = if code >> 1 & 1 == 1 { 1.0 } else { -1.0 };
    for j in 1..n {
        let v = if code >> (2 * j) & 1 == 1 { 1i32 } else { -1 };
        let vp = if code >> (2 * j + 1) & 1 == 1 {
            1i32
        } else {
            -1
        };
        let half_sum = f64::from(v + vp) / 2.0;
        let half_diff = f64::from(v - vp) / 2.0;
        let next_b = b * half_sum + bp * half_diff;
        let next_bp = bp * half_sum - b * half_diff;
        b = next_b;
        bp = next_bp;
    }
    b
}

/// Visit every deterministic strategy exactly once (a dense counter over
/// 2n-bit codes) and report the extremes with a witness. Deterministic
/// output; capped at n = 12 because the bound claim needs exhaustiveness
/// rather than sampling.
pub fn enumerate_lhv(n: usize) -> Result<LhvEnumerationReport> {
    if n == 0 || n > LHV_ENUM_CAP_QUBITS {
        return Err(Error::Capacity {
            what: "lhv enumeration qubit count",
            requested: n,
            limit: LHV_ENUM_CAP_QUBITS,
        });
    }
    let total = 1u64 << (2 * n);
    let mut minus_count = 0u64;
    let mut plus_count = 0u64;
    let mut max_m = f64::NEG_INFINITY;
    let mut min_m = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    let mut min_v = f64::INFINITY;
    let mut witness_code = 0u64;
    for code in 0..total {
        let m = mk_value_code(n, code);
        assert!(
            m == 1.0 || m == -1.0,
            "deterministic MK value must be exactly +-1, got {m}"
        );
        if m == 1.0 {
            plus_count += 1;
        } else {
            minus_count += 1;
        }
        let v = m + m * m;
        if m > max_m {
            max_m = m;
        }
        if m < min_m {
            min_m = m;
        }
        if v > max_v {
            max_v = v;
            witness_code = code;
        }
        if v < min_v {
            min_v = v;
        }
    }
    Ok(LhvEnumerationReport {
        n,
        count: total,
        minus_count,
        plus_count,
        max_m,
        min_m,
        max_v,
        min_v,
        witness: LhvAssignment::from_code(n, witness_code)?,
    })
}

/// First and second moments of M under a distribution, and the expectation
/// of V. By construction the decomposition
/// `v_expectation = mean + mean^2 + variance` holds to 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionMoments {
    pub mean: f64,
    pub variance: f64,
    pub v_expectation: f64,
}

pub fn distribution_moments(d: &LhvDistribution) -> DistributionMoments {
    let mut mean = 0.0;
    let mut v_expectation = 0.0;
    let ms: Vec<(f64, f64)> = d
        .support
        .iter()
        .map(|(lambda, w)| (mk_value(lambda), *w))
        .collect();
    for &(m, w) in &ms {
        mean += w * m;
        v_expectation += w * (m + m * m);
    }
    let mut variance = 0.0;
    for &(m, w) in &ms {
        let dev = m - mean;
        variance += w * dev * dev;
    }
    DistributionMoments {
        mean,
        variance,
        v_expectation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::IDENTITY_TOL;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assignment(values: &[(i8, i8)]) -> LhvAssignment {
        LhvAssignment::new(values.to_vec()).unwrap()
    }

    #[test]
    fn single_site_base_case() {
        assert_eq!(mk_value(&assignment(&[(1, -1)])), 1.0);
        assert_eq!(mk_value(&assignment(&[(-1, 1)])), -1.0);
    }

    #[test]
    fn two_site_hand_recursion() {
        // B_2 = B_1 * 1 + B'_1 * 0 = 1 for the all-plus assignment.
        assert_eq!(mk_value(&assignment(&[(1, 1), (1, 1)])), 1.0);
    }

    #[test]
    fn all_two_site_assignments_are_signs() {
        for code in 0..16 {
            let lambda = LhvAssignment::from_code(2, code).unwrap();
            let m = mk_value(&lambda);
            assert!(m == 1.0 || m == -1.0, "code {code} gave {m}");
        }
    }

    #[test]
    fn v_value_from_signs() {
        assert_eq!(v_value(&assignment(&[(1, 1)])), 2.0);
        assert_eq!(v_value(&assignment(&[(-1, -1)])), 0.0);
    }

    #[test]
    fn code_round_trip() {
        for code in 0..64 {
            let lambda = LhvAssignment::from_code(3, code).unwrap();
            assert_eq!(lambda.code(), code);
        }
        assert!(LhvAssignment::from_code(2, 16).is_err());
    }

    #[test]
    fn assignment_rejects_non_signs() {
        assert!(LhvAssignment::new(vec![(0, 1)]).is_err());
        assert!(LhvAssignment::new(vec![]).is_err());
    }

    #[test]
    fn enumeration_small_cases() {
        let r1 = enumerate_lhv(1).unwrap();
        assert_eq!(r1.count, 4);
        assert_eq!(r1.max_m, 1.0);
        assert_eq!(r1.max_v, 2.0);

        let r2 = enumerate_lhv(2).unwrap();
        assert_eq!(r2.count, 16);
        assert_eq!(r2.max_m, 1.0);
        assert_eq!(r2.min_m, -1.0);
        assert_eq!(r2.max_v, 2.0);
        assert_eq!(r2.min_v, 0.0);
        assert_eq!(r2.plus_count + r2.minus_count, 16);

        let r3 = enumerate_lhv(3).unwrap();
        assert_eq!(r3.count, 64);
        assert_eq!((r3.minus_count, r3.plus_count), (32, 32));
        assert_eq!(v_value(&r3.witness), 2.0);
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(enumerate_lhv(13), Err(Error::Capacity { .. })));
        assert!(matches!(enumerate_lhv(0), Err(Error::Capacity { .. })));
    }

    #[test]
    fn point_mass_moments() {
        let d = LhvDistribution::new(vec![(assignment(&[(1, 1), (1, 1)]), 1.0)]).unwrap();
        let m = distribution_moments(&d);
        assert_eq!((m.mean, m.variance, m.v_expectation), (1.0, 0.0, 2.0));
    }

    #[test]
    fn uniform_over_opposite_signs() {
        // Hand computation: mean 0, variance 1, <V> = 0 + 0 + 1 = 1 <= 2.
        let plus = assignment(&[(1, 1), (1, 1)]);
        let minus = assignment(&[(-1, -1), (1, 1)]);
        assert_eq!(mk_value(&minus), -1.0);
        let d = LhvDistribution::new(vec![(plus, 0.5), (minus, 0.5)]).unwrap();
        let m = distribution_moments(&d);
        assert_eq!((m.mean, m.variance, m.v_expectation), (0.0, 1.0, 1.0));
    }

    #[test]
    fn distribution_validation() {
        let a = assignment(&[(1, 1)]);
        assert!(LhvDistribution::new(vec![(a.clone(), 0.5)]).is_err());
        assert!(LhvDistribution::new(vec![(a.clone(), -0.1), (a.clone(), 1.1)]).is_err());
        let b = assignment(&[(1, 1), (1, 1)]);
        assert!(LhvDistribution::new(vec![(a, 0.5), (b, 0.5)]).is_err());
    }

    #[test]
    fn random_distributions_respect_bound_and_identity() {
        let enum_max = enumerate_lhv(3).unwrap().max_v;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let k = rng.gen_range(1..=12usize);
            let mut support = Vec::with_capacity(k);
            let mut weights = Vec::with_capacity(k);
            for _ in 0..k {
                support.push(LhvAssignment::from_code(3, rng.gen_range(0..64)).unwrap());
                weights.push(rng.gen_range(0.0..1.0f64));
            }
            let total: f64 = weights.iter().sum();
            let d = LhvDistribution::new(
                support
                    .into_iter()
                    .zip(weights.into_iter().map(|w| w / total))
                    .collect(),
            )
            .unwrap();
            let m = distribution_moments(&d);
            let identity_gap = (m.v_expectation - (m.mean + m.mean * m.mean + m.variance)).abs();
            assert!(
                identity_gap <= IDENTITY_TOL,
                "identity gap {identity_gap:e}"
            );
            assert!(m.v_expectation <= enum_max + IDENTITY_TOL);
        }
    }
}

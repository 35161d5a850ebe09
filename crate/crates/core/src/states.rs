//! State families entering the bound checks: generalized GHZ states, the
//! GHZ+- pair, Bloch-parameterized product states, and the closed-form
//! product-state expectation of the variant operator V_n.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::PureState;
use crate::{pow2, pow2_half, CONSTRUCTION_TOL, DENSE_CAP_QUBITS};

/// Mixing angle theta of the generalized GHZ family, restricted to
/// [0, pi/4]; values outside the family's stated range are rejected rather
/// than folded back by symmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzParameter {
    theta: f64,
}

impl GhzParameter {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_4).contains(&theta) {
            return Err(Error::Invariant {
                what: "theta must lie in [0, pi/4]",
                deviation: theta,
            });
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Sign selecting one of the two GHZ corner superpositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Bloch-sphere coordinates of one qubit: polar in [0, pi], azimuth in
/// [0, 2pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBloch {
    pub polar: f64,
    pub azimuth: f64,
}

impl QubitBloch {
    pub fn new(polar: f64, azimuth: f64) -> Result<Self> {
        if !polar.is_finite() || !(0.0..=std::f64::consts::PI).contains(&polar) {
            return Err(Error::Invariant {
                what: "polar angle must lie in [0, pi]",
                deviation: polar,
            });
        }
        if !azimuth.is_finite() || !(0.0..std::f64::consts::TAU).contains(&azimuth) {
            return Err(Error::Invariant {
                what: "azimuth must lie in [0, 2pi)",
                deviation: azimuth,
            });
        }
        Ok(Self { polar, azimuth })
    }
}

/// An n-qubit product state stored as per-qubit amplitude pairs
/// (alpha_j, beta_j), each pair normalized. The global phase is gauged onto
/// beta_j: alpha_j is kept real and non-negative so that serialization is
/// canonical (the expectation values are phase-invariant).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    qubits: Vec<(Complex64, Complex64)>,
}

impl ProductState {
    pub fn new(qubits: Vec<(Complex64, Complex64)>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::Domain {
                what: "product state needs at least one qubit",
            });
        }
        let mut gauged = Vec::with_capacity(qubits.len());
        for &(alpha, beta) in &qubits {
            if !(alpha.re.is_finite()
                && alpha.im.is_finite()
                && beta.re.is_finite()
                && beta.im.is_finite())
            {
                return Err(Error::Invariant {
                    what: "qubit amplitudes must be finite",
                    deviation: f64::NAN,
                });
            }
            let norm_sq = alpha.norm_sqr() + beta.norm_sqr();
            let dev = (norm_sq - 1.0).abs();
            if dev > CONSTRUCTION_TOL {
                return Err(Error::Invariant {
                    what: "qubit amplitudes must be normalized",
                    deviation: dev,
                });
            }
            gauged.push(gauge(alpha, beta));
        }
        Ok(Self { qubits: gauged })
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[(Complex64, Complex64)] {
        &self.qubits
    }
}

/// Rotate a qubit's global phase so alpha is real and non-negative; when
/// alpha vanishes the phase lands on beta instead.
fn gauge(alpha: Complex64, beta: Complex64) -> (Complex64, Complex64) {
    let r = alpha.norm();
    if r > 0.0 {
        let phase = alpha / r;
        (Complex64::new(r, 0.0), beta * phase.conj())
    } else {
        let b = beta.norm();
        (Complex64::ZERO, Complex64::new(b, 0.0))
    }
}

fn check_ghz_range(n: usize) -> Result<()> {
    if !(2..=DENSE_CAP_QUBITS).contains(&n) {
        return Err(Error::Capacity {
            what: "ghz qubit count",
            requested: n,
            limit: DENSE_CAP_QUBITS,
        });
    }
    Ok(())
}

/// cos(theta)|0^n> + sin(theta)|1^n>.
pub fn generalized_ghz(n: usize, p: GhzParameter) -> Result<PureState> {
    check_ghz_range(n)?;
    let dim = 1usize << n;
    let mut amplitudes = vec![Complex64::ZERO; dim];
    amplitudes[0] = Complex64::new(p.theta.cos(), 0.0);
    amplitudes[dim - 1] = Complex64::new(p.theta.sin(), 0.0);
    PureState::from_amplitudes(amplitudes)
}

/// (|0^n> +- |1^n>)/sqrt(2).
pub fn ghz_pm(n: usize, sign: Sign) -> Result<PureState> {
    check_ghz_range(n)?;
    let dim = 1usize << n;
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut amplitudes = vec![Complex64::ZERO; dim];
    amplitudes[0] = Complex64::new(amp, 0.0);
    amplitudes[dim - 1] = Complex64::new(sign.factor() * amp, 0.0);
    PureState::from_amplitudes(amplitudes)
}

/// Product state with alpha_j = cos(polar_j/2) and
/// beta_j = exp(i azimuth_j) sin(polar_j/2).
pub fn product_state(blochs: &[QubitBloch]) -> Result<ProductState> {
    if blochs.is_empty() {
        return Err(Error::Domain {
            what: "product state needs at least one qubit",
        });
    }
    let qubits = blochs
        .iter()
        .map(|b| {
            let alpha = Complex64::new((b.polar / 2.0).cos(), 0.0);
            let beta = Complex64::from_polar((b.polar / 2.0).sin(), b.azimuth);
            (alpha, beta)
        })
        .collect();
    ProductState::new(qubits)
}

/// Kronecker expansion of a product state into the full 2^n amplitude vector,
/// qubit 1 in the most significant bit of the index.
pub fn embed(ps: &ProductState) -> Result<PureState> {
    let n = ps.n();
    if n > DENSE_CAP_QUBITS {
        return Err(Error::Capacity {
            what: "embedded qubit count",
            requested: n,
            limit: DENSE_CAP_QUBITS,
        });
    }
    let mut amplitudes = vec![Complex64::ONE];
    for &(alpha, beta) in &ps.qubits {
        let mut next = Vec::with_capacity(amplitudes.len() * 2);
        for &a in &amplitudes {
            next.push(a * alpha);
            next.push(a * beta);
        }
        amplitudes = next;
    }
    PureState::from_amplitudes(amplitudes)
}

/// Closed-form expectation of the canonical variant operator on a product
/// state:
///
/// ```text
/// <V_n> = 2^((n-1)/2) (prod alpha_j beta_j* + prod alpha_j* beta_j)
///       + 2^(n-1)     (prod |alpha_j|^2   + prod |beta_j|^2)
/// ```
///
/// Requires n >= 2 and remains usable far beyond the dense cap (the 2^(n-1)
/// factor is floating point), up to n around 50.
pub fn product_expectation_v(ps: &ProductState) -> Result<f64> {
    let n = ps.n();
    if n < 2 {
        return Err(Error::Domain {
            what: "the variant expectation needs n >= 2",
        });
    }
    let mut cross = Complex64::ONE;
    let mut all_zero = 1.0f64;
    let mut all_one = 1.0f64;
    for &(alpha, beta) in &ps.qubits {
        cross *= alpha * beta.conj();
        all_zero *= alpha.norm_sqr();
        all_one *= beta.norm_sqr();
    }
    Ok(pow2_half(n) * 2.0 * cross.re + pow2(n - 1) * (all_zero + all_one))
}

/// Uniformly random product state: polar angles via arccos of a uniform
/// variate on [-1, 1], azimuths uniform on [0, 2pi). Deterministic for a
/// fixed seed.
pub fn random_product_state(n: usize, seed: u64) -> Result<ProductState> {
    if n == 0 {
        return Err(Error::Domain {
            what: "product state needs at least one qubit",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_product_state_from(n, &mut rng)
}

/// As [`random_product_state`] but drawing from a caller-provided stream, so
/// multiple independent states can be derived from one seed.
pub fn random_product_state_from(n: usize, rng: &mut ChaCha8Rng) -> Result<ProductState> {
    let blochs: Vec<QubitBloch> = (0..n)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let polar = z.acos();
            let azimuth = rng.gen_range(0.0..std::f64::consts::TAU);
            QubitBloch { polar, azimuth }
        })
        .collect();
    product_state(&blochs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn ghz_theta_zero_is_all_zeros_ket() {
        let psi = generalized_ghz(3, GhzParameter::new(0.0).unwrap()).unwrap();
        assert_eq!(psi.amplitudes()[0], Complex64::ONE);
        assert!(psi.amplitudes()[1..].iter().all(|&z| z == Complex64::ZERO));
    }

    #[test]
    fn ghz_quarter_pi_matches_plus_state() {
        let a = generalized_ghz(4, GhzParameter::new(FRAC_PI_4).unwrap()).unwrap();
        let b = ghz_pm(4, Sign::Plus).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn ghz_parameter_rejects_out_of_range() {
        assert!(GhzParameter::new(-0.1).is_err());
        assert!(GhzParameter::new(FRAC_PI_4 + 0.1).is_err());
        assert!(GhzParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn ghz_range_is_enforced() {
        assert!(matches!(
            generalized_ghz(1, GhzParameter::new(0.0).unwrap()),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            ghz_pm(11, Sign::Plus),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn ghz_pair_is_orthogonal() {
        let plus = ghz_pm(2, Sign::Plus).unwrap();
        let minus = ghz_pm(2, Sign::Minus).unwrap();
        assert_eq!(plus.amplitudes()[0].re, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(plus.amplitudes()[3].re, std::f64::consts::FRAC_1_SQRT_2);
        let overlap: Complex64 = plus
            .amplitudes()
            .iter()
            .zip(minus.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert_eq!(overlap, Complex64::ZERO);
    }

    #[test]
    fn product_state_extremes() {
        let zeros = product_state(&[QubitBloch::new(0.0, 0.0).unwrap(); 3]).unwrap();
        for &(alpha, beta) in zeros.qubits() {
            assert_eq!(alpha, Complex64::ONE);
            assert_eq!(beta, Complex64::ZERO);
        }

        let plus = product_state(&[QubitBloch::new(FRAC_PI_2, 0.0).unwrap(); 2]).unwrap();
        for &(alpha, beta) in plus.qubits() {
            assert!((alpha.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((beta.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }

        let one = product_state(&[QubitBloch::new(PI, 1.5).unwrap()]).unwrap();
        let (alpha, beta) = one.qubits()[0];
        assert!(alpha.norm() < 1e-12);
        assert!((beta.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_puts_phase_on_beta() {
        let phase = Complex64::from_polar(1.0, 0.7);
        let alpha = Complex64::new(0.6, 0.0) * phase;
        let beta = Complex64::new(0.8, 0.0) * phase;
        let ps = ProductState::new(vec![(alpha, beta)]).unwrap();
        let (ga, gb) = ps.qubits()[0];
        assert!(ga.im == 0.0 && ga.re >= 0.0);
        assert!((ga.re - 0.6).abs() < 1e-15);
        assert!((gb.norm() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn embed_basis_and_plus_products() {
        let zeros = product_state(&[QubitBloch::new(0.0, 0.0).unwrap(); 2]).unwrap();
        let psi = embed(&zeros).unwrap();
        assert_eq!(psi.amplitudes()[0], Complex64::ONE);
        assert!(psi.amplitudes()[1..].iter().all(|&z| z == Complex64::ZERO));

        let plus = product_state(&[QubitBloch::new(FRAC_PI_2, 0.0).unwrap(); 2]).unwrap();
        let psi = embed(&plus).unwrap();
        for &z in psi.amplitudes() {
            assert!((z.re - 0.5).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn variant_expectation_on_basis_product_is_separability_bound() {
        for n in 2..=8 {
            let ps = product_state(&vec![QubitBloch::new(0.0, 0.0).unwrap(); n]).unwrap();
            assert_eq!(product_expectation_v(&ps).unwrap(), pow2(n - 1));
        }
    }

    #[test]
    fn variant_expectation_on_plus_pair() {
        // Dense-oracle value for |+>|+>: 1 + 2^(-1/2).
        let ps = product_state(&[QubitBloch::new(FRAC_PI_2, 0.0).unwrap(); 2]).unwrap();
        let v = product_expectation_v(&ps).unwrap();
        assert!((v - (1.0 + std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-14);
    }

    #[test]
    fn variant_expectation_single_plus_among_zeros() {
        // One |+> zeroes the cross term and the all-ones product, halving the
        // all-zeros product: 2^(n-2) for n=3 is 2.
        let blochs = [
            QubitBloch::new(FRAC_PI_2, 0.0).unwrap(),
            QubitBloch::new(0.0, 0.0).unwrap(),
            QubitBloch::new(0.0, 0.0).unwrap(),
        ];
        let ps = product_state(&blochs).unwrap();
        assert!((product_expectation_v(&ps).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn variant_expectation_needs_two_qubits() {
        let ps = product_state(&[QubitBloch::new(0.0, 0.0).unwrap()]).unwrap();
        assert!(matches!(
            product_expectation_v(&ps),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn variant_expectation_far_beyond_dense_cap() {
        let n = 50;
        let ps = product_state(&vec![QubitBloch::new(0.0, 0.0).unwrap(); n]).unwrap();
        assert_eq!(product_expectation_v(&ps).unwrap(), pow2(49));
        let random = random_product_state(n, 9).unwrap();
        let v = product_expectation_v(&random).unwrap();
        assert!(v.is_finite() && v <= pow2(49) + 1e-9);
    }

    #[test]
    fn embed_rejects_beyond_dense_cap() {
        let ps = product_state(&[QubitBloch::new(0.0, 0.0).unwrap(); 11]).unwrap();
        assert!(matches!(embed(&ps), Err(Error::Capacity { .. })));
    }

    #[test]
    fn random_product_state_needs_a_qubit() {
        assert!(matches!(
            random_product_state(0, 1),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn random_product_state_is_deterministic() {
        let a = random_product_state(4, 1234).unwrap();
        let b = random_product_state(4, 1234).unwrap();
        assert_eq!(a, b);
        let c = random_product_state(4, 1235).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_product_states_are_normalized_and_bounded() {
        let bound = pow2(3);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..1000 {
            let ps = random_product_state_from(4, &mut rng).unwrap();
            for &(alpha, beta) in ps.qubits() {
                assert!((alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() <= 1e-12);
            }
            assert!(product_expectation_v(&ps).unwrap() <= bound + 1e-9);
        }
    }
}

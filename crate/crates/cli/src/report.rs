//! Machine-readable report types and their canonical serialization.
//!
//! Reports are deterministic byte-for-byte: no timestamps, struct fields
//! serialize in declaration order, and every number is rounded to 12
//! significant digits at construction so emitting and re-parsing a report
//! reproduces it exactly.

use serde::{Deserialize, Serialize};

use mkbell::lhv::LhvEnumerationReport;
use mkbell::states::ProductState;

/// Round to 12 significant digits. The rounded value is what reports store,
/// so serialization (shortest round-trip form) is stable across runs.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}")
        .parse()
        .expect("formatted float re-parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub construction: f64,
    pub equality: f64,
    pub eigenvalue: f64,
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            construction: mkbell::CONSTRUCTION_TOL,
            equality: mkbell::EQUALITY_TOL,
            eigenvalue: mkbell::EIGEN_TOL,
            identity: mkbell::IDENTITY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub n: usize,
    pub seed: u64,
    pub restarts: u32,
    pub tol: f64,
    pub theta_points: usize,
    pub tolerances: Tolerances,
    pub frozen_calibration_pattern: String,
}

/// One verified statement: the analytic value, the computed evidence, their
/// difference, and whether the check passed at its pinned tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub paper_eq: String,
    pub analytic: f64,
    pub computed: f64,
    pub delta: f64,
    pub pass: bool,
}

impl Claim {
    fn rounded(name: &str, eq: &str, analytic: f64, computed: f64, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            paper_eq: eq.to_string(),
            analytic: sig12(analytic),
            computed: sig12(computed),
            delta: sig12(computed - analytic),
            pass,
        }
    }

    /// |computed - analytic| <= tol.
    pub fn equality(name: &str, eq: &str, analytic: f64, computed: f64, tol: f64) -> Self {
        Self::rounded(
            name,
            eq,
            analytic,
            computed,
            (computed - analytic).abs() <= tol,
        )
    }

    /// computed <= bound + slack.
    pub fn upper_bounded(name: &str, eq: &str, bound: f64, computed: f64, slack: f64) -> Self {
        Self::rounded(name, eq, bound, computed, computed <= bound + slack)
    }

    /// computed == analytic bit-for-bit.
    pub fn exact(name: &str, eq: &str, analytic: f64, computed: f64) -> Self {
        Self::rounded(name, eq, analytic, computed, computed == analytic)
    }

    /// computed > bound strictly.
    pub fn strictly_above(name: &str, eq: &str, bound: f64, computed: f64) -> Self {
        Self::rounded(name, eq, bound, computed, computed > bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerWitness {
    pub value: f64,
    /// Per-qubit amplitudes as [alpha_re, alpha_im, beta_re, beta_im].
    pub qubits: Vec<[f64; 4]>,
}

impl OptimizerWitness {
    pub fn new(value: f64, witness: &ProductState) -> Self {
        Self {
            value: sig12(value),
            qubits: witness
                .qubits()
                .iter()
                .map(|(a, b)| [sig12(a.re), sig12(a.im), sig12(b.re), sig12(b.im)])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvSummary {
    pub count: u64,
    pub plus_count: u64,
    pub minus_count: u64,
    pub max_m: f64,
    pub min_m: f64,
    pub max_v: f64,
    pub min_v: f64,
    /// Sign pairs (v_j, v'_j) of the first assignment attaining max_v.
    pub witness: Vec<[i8; 2]>,
}

impl LhvSummary {
    pub fn new(report: &LhvEnumerationReport) -> Self {
        Self {
            count: report.count,
            plus_count: report.plus_count,
            minus_count: report.minus_count,
            max_m: report.max_m,
            min_m: report.min_m,
            max_v: report.max_v,
            min_v: report.min_v,
            witness: report
                .witness
                .values()
                .iter()
                .map(|&(v, vp)| [v, vp])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub separability: f64,
    pub entanglement: f64,
    pub lhv: f64,
    pub gap_ratio: f64,
    pub separable_violates_lhv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub theta: f64,
    pub value: f64,
    pub violation: f64,
}

impl CurveRecord {
    /// The reported violation is derived from the reported (rounded) value so
    /// the two columns stay consistent to the last digit.
    pub fn new(theta: f64, value: f64, separability_bound: f64) -> Self {
        let value = sig12(value);
        Self {
            theta: sig12(theta),
            value,
            violation: sig12(value - separability_bound),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Witnesses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhv: Option<LhvSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<CurveRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub claims: Vec<Claim>,
    pub witnesses: Witnesses,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut body = serde_json::to_string_pretty(self).expect("report serializes");
        body.push('\n');
        body
    }

    #[cfg(test)]
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// CSV rendering of a curve: header plus one row per point in ascending
/// theta, all values at 12 significant digits.
pub fn curve_to_csv(points: &[CurveRecord]) -> String {
    let mut out = String::from("theta,value,violation\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.theta, p.value, p.violation));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    // The literal is the intended 12-significant-digit rounding of pi.
    #[allow(clippy::approx_constant)]
    fn sig12_rounds_and_is_stable() {
        assert_eq!(sig12(2.0000000000000004), 2.0);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-0.0), 0.0);
        let x = std::f64::consts::PI;
        assert_eq!(sig12(x), 3.14159265359);
        assert_eq!(sig12(sig12(x)), sig12(x));
    }

    fn random_report(rng: &mut ChaCha8Rng) -> Report {
        let f = |rng: &mut ChaCha8Rng| sig12(rng.gen_range(-1e3..1e3));
        let word = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(3..10);
            (0..len)
                .map(|_| (b'a' + rng.gen_range(0..26u8)) as char)
                .collect::<String>()
        };
        let claims = (0..rng.gen_range(1..6))
            .map(|_| Claim {
                name: word(rng),
                paper_eq: rng.gen_range(1..11u8).to_string(),
                analytic: f(rng),
                computed: f(rng),
                delta: f(rng),
                pass: rng.gen_bool(0.5),
            })
            .collect();
        let curve = if rng.gen_bool(0.5) {
            Some(
                (0..rng.gen_range(0..5))
                    .map(|_| CurveRecord {
                        theta: f(rng),
                        value: f(rng),
                        violation: f(rng),
                    })
                    .collect(),
            )
        } else {
            None
        };
        Report {
            meta: Meta {
                command: word(rng),
                n: rng.gen_range(2..11),
                seed: rng.gen(),
                restarts: rng.gen_range(1..100),
                tol: sig12(rng.gen_range(1e-12..1e-6)),
                theta_points: rng.gen_range(0..40),
                tolerances: Tolerances::default(),
                frozen_calibration_pattern: word(rng),
            },
            claims,
            witnesses: Witnesses {
                bounds: None,
                optimizer: None,
                lhv: None,
                curve,
            },
        }
    }

    #[test]
    fn json_round_trip_for_random_reports() {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        for _ in 0..100 {
            let report = random_report(&mut rng);
            let parsed = Report::from_json(&report.to_json()).unwrap();
            assert_eq!(parsed, report);
        }
    }

    #[test]
    fn csv_of_empty_curve_is_header_only() {
        assert_eq!(curve_to_csv(&[]), "theta,value,violation\n");
    }

    #[test]
    fn claim_constructors() {
        assert!(Claim::equality("a", "7", 4.0, 4.0 + 5e-7, 1e-6).pass);
        assert!(!Claim::equality("a", "7", 4.0, 4.0 + 2e-6, 1e-6).pass);
        assert!(Claim::upper_bounded("b", "7", 4.0, 3.0, 1e-9).pass);
        assert!(!Claim::upper_bounded("b", "7", 4.0, 4.1, 1e-9).pass);
        assert!(Claim::exact("c", "10", 2.0, 2.0).pass);
        assert!(!Claim::exact("c", "10", 2.0, 2.0 + 1e-15).pass);
        assert!(Claim::strictly_above("d", "9", 0.0, 1e-12).pass);
        assert!(!Claim::strictly_above("d", "9", 0.0, 0.0).pass);
    }
}

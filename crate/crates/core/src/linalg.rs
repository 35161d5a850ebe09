//! Dense complex linear algebra kernel sized for up to [`DENSE_CAP_QUBITS`] qubits:
//! Kronecker products, Hermitian operators, expectation values, matrix comparison,
//! and dominant-eigenvalue estimation by shifted power iteration.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::{CONSTRUCTION_TOL, DENSE_CAP_QUBITS, EQUALITY_TOL};

/// Largest dense dimension handled by the kernel (2^10 = 1024).
pub const DENSE_CAP_DIM: usize = 1 << DENSE_CAP_QUBITS;

/// Dense square complex matrix of dimension 2^n, row-major, with a
/// constructor-checked Hermitian tag. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
    hermitian: bool,
}

impl Operator {
    /// Build an operator from row-major entries, validating the dimension cap,
    /// finiteness of every entry, and (when tagged) Hermiticity to `1e-12`.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>, hermitian: bool) -> Result<Self> {
        check_dense_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::Shape {
                left: entries.len(),
                right: dim * dim,
            });
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Invariant {
                what: "operator entries must be finite",
                deviation: f64::NAN,
            });
        }
        let op = Self {
            dim,
            entries,
            hermitian,
        };
        if hermitian {
            let dev = op.hermiticity_deviation();
            if dev > CONSTRUCTION_TOL {
                return Err(Error::Hermiticity { deviation: dev });
            }
        }
        Ok(op)
    }

    /// The 2^n x 2^n identity.
    pub fn identity(dim: usize) -> Result<Self> {
        check_dense_dim(dim)?;
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::ONE;
        }
        Ok(Self {
            dim,
            entries,
            hermitian: true,
        })
    }

    /// The zero operator, tagged Hermitian.
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dense_dim(dim)?;
        Ok(Self {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
            hermitian: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Qubit count n with dim = 2^n.
    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// max_{i,j} |A[i][j] - conj(A[j][i])|
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    /// Entrywise sum. The result keeps the Hermitian tag only if both operands carry it.
    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::Shape {
                left: self.dim,
                right: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Operator {
            dim: self.dim,
            entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    /// Entrywise negation.
    pub fn neg(&self) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|z| -z).collect(),
            hermitian: self.hermitian,
        }
    }

    /// Scale by a real factor.
    pub fn scale(&self, factor: f64) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
            hermitian: self.hermitian,
        }
    }

    /// Matrix product. Not Hermitian in general, so the tag is dropped.
    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::Shape {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut entries = vec![Complex64::ZERO; n * n];
        // ikj order keeps the inner loop contiguous in both operands.
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let row_b = &other.entries[k * n..(k + 1) * n];
                let row_out = &mut entries[i * n..(i + 1) * n];
                for j in 0..n {
                    row_out[j] += a * row_b[j];
                }
            }
        }
        Ok(Operator {
            dim: n,
            entries,
            hermitian: false,
        })
    }

    /// A*A for Hermitian A. The square of a Hermitian matrix is Hermitian, so
    /// the tag is preserved (the floating-point result is exactly symmetric:
    /// conjugating both factors of every product term conjugates it bit-for-bit).
    pub fn square(&self) -> Result<Operator> {
        if !self.hermitian {
            return Err(Error::Hermiticity {
                deviation: self.hermiticity_deviation(),
            });
        }
        let mut sq = self.matmul(self)?;
        sq.hermitian = true;
        Ok(sq)
    }

    /// Induced 1-norm: max over columns of the absolute column sum. For a
    /// Hermitian matrix this bounds the spectral radius.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim;
        let mut best = 0.0f64;
        for j in 0..n {
            let mut sum = 0.0;
            for i in 0..n {
                sum += self.entries[i * n + j].norm();
            }
            if sum > best {
                best = sum;
            }
        }
        best
    }

    /// y = A x
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        debug_assert_eq!(x.len(), n);
        self.entries
            .chunks_exact(n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Normalized pure state of dimension 2^n.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Build a state from amplitudes, validating the dimension cap, finiteness,
    /// and |<psi|psi> - 1| <= 1e-12.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        check_dense_dim(dim)?;
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::Invariant {
                what: "state amplitudes must be finite",
                deviation: f64::NAN,
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let dev = (norm_sq - 1.0).abs();
        if dev > CONSTRUCTION_TOL {
            return Err(Error::Invariant {
                what: "state must be normalized",
                deviation: dev,
            });
        }
        Ok(Self { dim, amplitudes })
    }

    /// Computational basis state |index> of the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        check_dense_dim(dim)?;
        if index >= dim {
            return Err(Error::Shape {
                left: index,
                right: dim,
            });
        }
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Ok(Self { dim, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

fn check_dense_dim(dim: usize) -> Result<()> {
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Invariant {
            what: "dimension must be a power of two >= 2",
            deviation: dim as f64,
        });
    }
    if dim > DENSE_CAP_DIM {
        return Err(Error::Capacity {
            what: "dense dimension",
            requested: dim,
            limit: DENSE_CAP_DIM,
        });
    }
    Ok(())
}

/// Kronecker product a (x) b. The result is Hermitian exactly when both
/// factors are, and the product dimension must stay within the dense cap.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let dim = a.dim.saturating_mul(b.dim);
    check_dense_dim(dim)?;
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for i in 0..a.dim {
        for j in 0..a.dim {
            let aij = a.get(i, j);
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..b.dim {
                let row = (i * b.dim + k) * dim + j * b.dim;
                let brow = &b.entries[k * b.dim..(k + 1) * b.dim];
                for (l, bkl) in brow.iter().enumerate() {
                    entries[row + l] = aij * bkl;
                }
            }
        }
    }
    Ok(Operator {
        dim,
        entries,
        hermitian: a.hermitian && b.hermitian,
    })
}

/// <psi|O|psi> for a Hermitian operator. The imaginary residue of the raw
/// inner product must be below `1e-10`; it is then discarded.
pub fn expectation(op: &Operator, psi: &PureState) -> Result<f64> {
    if !op.hermitian {
        return Err(Error::Hermiticity {
            deviation: op.hermiticity_deviation(),
        });
    }
    if op.dim != psi.dim {
        return Err(Error::Shape {
            left: op.dim,
            right: psi.dim,
        });
    }
    let y = op.matvec(&psi.amplitudes);
    let raw: Complex64 = psi
        .amplitudes
        .iter()
        .zip(&y)
        .map(|(a, b)| a.conj() * b)
        .sum();
    if raw.im.abs() > EQUALITY_TOL {
        return Err(Error::Hermiticity {
            deviation: raw.im.abs(),
        });
    }
    Ok(raw.re)
}

/// Variance <(O - <O>)^2> = <O^2> - <O>^2, computed as |O psi|^2 - <O>^2 and
/// clamped to zero when rounding takes it slightly negative (within 1e-10).
pub fn variance(op: &Operator, psi: &PureState) -> Result<f64> {
    let mean = expectation(op, psi)?;
    let y = op.matvec(&psi.amplitudes);
    let second_moment: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let var = second_moment - mean * mean;
    if (-EQUALITY_TOL..0.0).contains(&var) {
        return Ok(0.0);
    }
    Ok(var)
}

/// Max-entry absolute difference between two operators of equal dimension.
pub fn matrix_distance(a: &Operator, b: &Operator) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::Shape {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Maximal eigenvalue of a Hermitian operator by power iteration on the
/// diagonally shifted matrix O + |O|_1 I, whose extreme positive eigenvalue
/// dominates in magnitude. Deterministic for a fixed seed.
///
/// Convergence is declared when the residual |(O + sI)v - theta v| drops
/// below `tol`, which for Hermitian matrices places an eigenvalue within
/// `tol` of the returned estimate.
pub fn dominant_eigenvalue(op: &Operator, tol: f64, max_iter: usize, seed: u64) -> Result<f64> {
    if !op.hermitian {
        return Err(Error::Hermiticity {
            deviation: op.hermiticity_deviation(),
        });
    }
    if tol <= 0.0 {
        return Err(Error::Domain {
            what: "tolerance must be positive",
        });
    }
    let n = op.dim;
    let shift = op.one_norm();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut v);

    let mut last = 0.0;
    for it in 0..max_iter {
        // w = (O + shift I) v
        let mut w = op.matvec(&v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
        }
        let theta: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let residual: f64 = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - theta * vi).norm_sqr())
            .sum::<f64>()
            .sqrt();
        last = theta - shift;
        if residual <= tol {
            return Ok(last);
        }
        let _ = it;
        normalize(&mut w);
        v = w;
    }
    Err(Error::Convergence {
        last,
        iterations: max_iter,
    })
}

fn normalize(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

//! Dense complex linear algebra on small square matrices.
//!
//! Storage is a [`nalgebra::DMatrix`] behind the [`ComplexMatrix`] newtype.
//! The Kronecker convention is fixed throughout the crate: in `kron(a, b)` the
//! left factor indexes the outer blocks and the right factor indexes entries
//! within a block, so row `(i, k)` of `H ⊗ K` is `i * dim_k + k`.
//! [`ComplexMatrix::partial_trace`] uses the identical convention.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QmeError, Result};
use crate::tolerance::{TOL_HERM, TOL_PSD};

pub type Scalar = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

/// Which tensor factor [`ComplexMatrix::partial_trace`] removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOut {
    /// Trace over the left (outer-block) factor, keeping the right one.
    Left,
    /// Trace over the right (inner) factor, keeping the left one.
    Right,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(QmeError::Dimension("matrix dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(QmeError::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QmeError::Numerical(format!("non-finite entry at index {pos}")));
        }
        Ok(ComplexMatrix {
            inner: DMatrix::from_row_slice(dim, dim, &entries),
        })
    }

    /// Builds a real matrix from rows. Panics on ragged or empty input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        assert!(dim > 0 && rows.iter().all(|r| r.len() == dim), "rows must form a square matrix");
        Self::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        ComplexMatrix {
            inner: DMatrix::from_fn(dim, dim, |i, j| f(i, j)),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| ZERO)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        assert_eq!(v.len(), w.len(), "outer product needs equal lengths");
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    pub(crate) fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.inner.column(j).iter().copied().collect()
    }

    /// Matrix product; errors when dimensions differ.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(other, "matmul")?;
        Ok(ComplexMatrix {
            inner: &self.inner * &other.inner,
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn scale(&self, factor: f64) -> ComplexMatrix {
        ComplexMatrix {
            inner: self.inner.map(|z| z * factor),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * factor,
        }
    }

    /// `max_ij |m_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` entrywise. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff needs equal dimensions");
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> ComplexMatrix {
        ComplexMatrix {
            inner: (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    /// Kronecker product; `self` indexes the outer blocks.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: self.inner.kronecker(&other.inner),
        }
    }

    /// Partial trace of an operator on `H ⊗ K` with `dim H = dim_h`, `dim K = dim_k`.
    pub fn partial_trace(&self, dim_h: usize, dim_k: usize, over: TraceOut) -> Result<ComplexMatrix> {
        if dim_h == 0 || dim_k == 0 || dim_h * dim_k != self.dim() {
            return Err(QmeError::Dimension(format!(
                "cannot factor a {0}x{0} matrix as {dim_h} ⊗ {dim_k}",
                self.dim()
            )));
        }
        let m = &self.inner;
        let out = match over {
            TraceOut::Right => DMatrix::from_fn(dim_h, dim_h, |i, j| {
                (0..dim_k).map(|k| m[(i * dim_k + k, j * dim_k + k)]).sum()
            }),
            TraceOut::Left => DMatrix::from_fn(dim_k, dim_k, |i, j| {
                (0..dim_h).map(|h| m[(h * dim_k + i, h * dim_k + j)]).sum()
            }),
        };
        Ok(ComplexMatrix { inner: out })
    }

    /// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
    pub fn hermitian_eig(&self) -> Result<EigenDecomposition> {
        self.hermitian_eig_with(TOL_HERM)
    }

    pub fn hermitian_eig_with(&self, tol_herm: f64) -> Result<EigenDecomposition> {
        let deviation = self.hermitian_deviation();
        if deviation > tol_herm {
            return Err(QmeError::NotHermitian {
                deviation,
                tolerance: tol_herm,
            });
        }
        let n = self.dim();
        let sym = self.hermitian_part().inner;
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 10_000 * n.max(1))
            .ok_or_else(|| QmeError::Numerical("Hermitian eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors: ComplexMatrix { inner: eigenvectors },
        })
    }

    /// Square root of a positive semidefinite matrix.
    ///
    /// Eigenvalues in `[-TOL_PSD, 0)` are clipped to zero before the root.
    pub fn psd_sqrt(&self) -> Result<ComplexMatrix> {
        let eig = self.hermitian_eig()?;
        eig.check_psd(TOL_PSD)?;
        Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()))
    }

    /// `m^{-1/2}` for a positive definite matrix.
    ///
    /// Fails when the smallest eigenvalue is below `rel_floor` times the largest.
    pub fn psd_inv_sqrt(&self, rel_floor: f64) -> Result<ComplexMatrix> {
        let eig = self.hermitian_eig()?;
        let max = eig.max_eigenvalue().max(0.0);
        let min = eig.min_eigenvalue();
        if max <= 0.0 || min <= rel_floor * max {
            return Err(QmeError::Numerical(format!(
                "matrix is singular to working precision (eigenvalues in [{min:.3e}, {max:.3e}])"
            )));
        }
        Ok(eig.map_spectrum(|l| 1.0 / l.sqrt()))
    }

    fn check_same_dim(&self, other: &ComplexMatrix, what: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(QmeError::Dimension(format!(
                "{what}: {0}x{0} vs {1}x{1}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        writeln!(f, "ComplexMatrix({n}x{n}) [")?;
        for i in 0..n {
            write!(f, "  ")?;
            for j in 0..n {
                let z = self.inner[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator impls panic on dimension mismatch, like nalgebra's; the fallible
// route is `matmul`.

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in addition");
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in addition");
        self.inner += &rhs.inner;
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in subtraction");
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in product");
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { inner: -&self.inner }
    }
}

/// Spectral decomposition `m = U diag(λ) U†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Non-decreasing.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// `U f(Λ) U†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = &self.eigenvectors.inner;
        let n = u.nrows();
        let scaled = DMatrix::from_fn(n, n, |i, j| u[(i, j)] * f(self.eigenvalues[j]));
        ComplexMatrix {
            inner: scaled * u.adjoint(),
        }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }

    pub fn check_psd(&self, tol: f64) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(QmeError::NotPositive {
                min_eigenvalue: min,
                tolerance: tol,
            });
        }
        Ok(())
    }

    /// Distinct eigenvalues with their spectral projections, merging
    /// eigenvalues that lie within `group_tol` of their neighbour.
    pub fn spectral_projections(&self, group_tol: f64) -> Vec<(f64, ComplexMatrix)> {
        let n = self.eigenvalues.len();
        let mut groups: Vec<(Vec<usize>, f64)> = Vec::new();
        for k in 0..n {
            match groups.last_mut() {
                Some((members, _)) if self.eigenvalues[k] - self.eigenvalues[*members.last().unwrap()] <= group_tol => {
                    members.push(k)
                }
                _ => groups.push((vec![k], 0.0)),
            }
        }
        groups
            .into_iter()
            .map(|(members, _)| {
                let mean = members.iter().map(|&k| self.eigenvalues[k]).sum::<f64>() / members.len() as f64;
                let mut proj = ComplexMatrix::zeros(n);
                for &k in &members {
                    let v = self.eigenvectors.column(k);
                    proj += &ComplexMatrix::outer(&v, &v);
                }
                (mean, proj)
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            dim: self.dim(),
            entries: self.row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let entries = repr.entries.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(repr.dim, entries).map_err(serde::de::Error::custom)
    }
}

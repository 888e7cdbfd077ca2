//! Dense vectors and small symmetric matrices with the norm and eigenvalue
//! primitives the convergence analysis needs.
//!
//! Everything here targets matrices of order at most a few dozen (Gram
//! matrices are m×m with m ≤ 64 at desk scale), so the eigensolver is a
//! plain cyclic Jacobi iteration and the spectral norm of a rectangular A is
//! obtained from the symmetric eigenproblem for AᵀA. Summation order is
//! fixed (ascending index) throughout so results are bit-reproducible.

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Rotation threshold of the Jacobi sweep, relative to the entry scale.
const JACOBI_TOL: f64 = 1e-14;
/// Jacobi gives up after this many full sweeps.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative tolerance for accepting nearly-symmetric input as symmetric.
const SYMMETRY_TOL: f64 = 1e-12;

/// Dense real vector; entries are finite and the length is at least one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealVector<R = f64> {
    entries: Vec<R>,
}

impl<R: Real> RealVector<R> {
    pub fn new(entries: Vec<R>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("vector must be nonempty".into()));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("vector entry is not finite".into()));
        }
        Ok(Self { entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![R::zero(); n.max(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<R> {
        self.entries
    }
}

impl<R: Real> std::ops::Index<usize> for RealVector<R> {
    type Output = R;
    fn index(&self, i: usize) -> &R {
        &self.entries[i]
    }
}

/// Symmetric matrix stored dense row-major; `entries[i][j] == entries[j][i]`
/// holds exactly (the constructor mirrors the lower triangle).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix<R = f64> {
    order: usize,
    entries: Vec<R>,
}

impl<R: Real> SymMatrix<R> {
    /// Builds from row-major entries. Input may deviate from symmetry by at
    /// most `1e-12` relative to the entry scale; beyond that the call is a
    /// contract error.
    pub fn from_rows(order: usize, entries: Vec<R>) -> Result<Self> {
        if order == 0 || entries.len() != order * order {
            return Err(Error::Dimension(format!(
                "expected {order}x{order} entries, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("matrix entry is not finite".into()));
        }
        let scale = entries
            .iter()
            .fold(R::zero(), |acc, x| acc.max(x.abs()))
            .max(R::one());
        let tol = R::of(SYMMETRY_TOL) * scale;
        let mut m = entries;
        for i in 0..order {
            for j in (i + 1)..order {
                let a = m[i * order + j];
                let b = m[j * order + i];
                if (a - b).abs() > tol {
                    return Err(Error::Contract(format!(
                        "matrix is asymmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                m[i * order + j] = b;
            }
        }
        Ok(Self { order, entries: m })
    }

    /// Builds from `f(i, j)`; `f` is evaluated only for `i <= j` and
    /// mirrored, so the result is symmetric by construction.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> R) -> Result<Self> {
        if order == 0 {
            return Err(Error::Dimension("matrix order must be positive".into()));
        }
        let mut entries = vec![R::zero(); order * order];
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::Domain(format!("entry ({i},{j}) is not finite")));
                }
                entries[i * order + j] = v;
                entries[j * order + i] = v;
            }
        }
        Ok(Self { order, entries })
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { R::one() } else { R::zero() })
            .expect("identity is well formed")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> R {
        self.entries[i * self.order + j]
    }

    pub fn rows(&self) -> &[R] {
        &self.entries
    }

    /// Entrywise difference, itself exactly symmetric.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::Dimension(format!(
                "orders {} vs {}",
                self.order, other.order
            )));
        }
        Self::from_fn(self.order, |i, j| self.get(i, j) - other.get(i, j))
    }

    /// ⟨x, Ax⟩ with ascending-index summation.
    pub fn quadratic_form(&self, x: &RealVector<R>) -> Result<R> {
        if x.len() != self.order {
            return Err(Error::Dimension(format!(
                "vector length {} vs order {}",
                x.len(),
                self.order
            )));
        }
        let mut acc = R::zero();
        for i in 0..self.order {
            let mut row = R::zero();
            for j in 0..self.order {
                row = row + self.get(i, j) * x[j];
            }
            acc = acc + x[i] * row;
        }
        Ok(acc)
    }

    /// Views the symmetric matrix as a rectangular one.
    pub fn to_rect(&self) -> RectMatrix<R> {
        RectMatrix {
            rows: self.order,
            cols: self.order,
            entries: self.entries.clone(),
        }
    }
}

/// Rectangular matrix stored dense row-major; all entries finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectMatrix<R = f64> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

impl<R: Real> RectMatrix<R> {
    pub fn new(rows: usize, cols: usize, entries: Vec<R>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {rows}x{cols} entries, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("matrix entry is not finite".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: rows.max(1),
            cols: cols.max(1),
            entries: vec![R::zero(); rows.max(1) * cols.max(1)],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> R {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    /// AᵀA, formed explicitly; exact symmetry by construction.
    pub fn gram_of_columns(&self) -> SymMatrix<R> {
        let n = self.cols;
        SymMatrix::from_fn(n, |i, j| {
            let mut acc = R::zero();
            for k in 0..self.rows {
                acc = acc + self.get(k, i) * self.get(k, j);
            }
            acc
        })
        .expect("AᵀA of a finite matrix is well formed")
    }
}

/// Euclidean norm (Σᵢ vᵢ²)^½ with fixed ascending-index summation.
pub fn euclidean_norm<R: Real>(v: &RealVector<R>) -> R {
    let mut acc = R::zero();
    for &x in v.entries() {
        acc = acc + x * x;
    }
    acc.sqrt()
}

/// Norm of a bare slice; same summation order as [`euclidean_norm`].
pub fn slice_norm<R: Real>(v: &[R]) -> R {
    let mut acc = R::zero();
    for &x in v {
        acc = acc + x * x;
    }
    acc.sqrt()
}

/// Standard scalar product Σᵢ uᵢvᵢ, summed in ascending index order.
pub fn scalar_product<R: Real>(u: &RealVector<R>, v: &RealVector<R>) -> Result<R> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "lengths {} vs {}",
            u.len(),
            v.len()
        )));
    }
    Ok(slice_dot(u.entries(), v.entries()))
}

/// Dot product of equal-length slices, ascending index order.
pub fn slice_dot<R: Real>(u: &[R], v: &[R]) -> R {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = R::zero();
    for i in 0..u.len() {
        acc = acc + u[i] * v[i];
    }
    acc
}

/// Largest singular value of `a`, computed as √λ_max(AᵀA).
pub fn spectral_norm<R: Real>(a: &RectMatrix<R>) -> R {
    let ata = a.gram_of_columns();
    let eigs = jacobi_eigenvalues(&ata);
    let lmax = eigs.iter().fold(R::zero(), |acc, &x| acc.max(x));
    lmax.max(R::zero()).sqrt()
}

/// Smallest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.
pub fn lambda_min<R: Real>(a: &SymMatrix<R>) -> R {
    jacobi_eigenvalues(a)
        .into_iter()
        .fold(R::infinity(), |acc, x| acc.min(x))
}

/// All eigenvalues of a symmetric matrix (unsorted), by cyclic Jacobi
/// rotations with threshold `1e-14` relative to the entry scale and at most
/// 100 sweeps. Matrices here are tiny, so no pivot ordering is needed.
pub fn jacobi_eigenvalues<R: Real>(a: &SymMatrix<R>) -> Vec<R> {
    let n = a.order();
    let mut m = a.rows().to_vec();
    if n == 1 {
        return m;
    }
    let scale = m
        .iter()
        .fold(R::zero(), |acc, x| acc.max(x.abs()))
        .max(R::one());
    let tol = R::of(JACOBI_TOL).max(R::epsilon()) * scale;
    let half = R::of(0.5);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = R::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m[p * n + q].abs();
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= tol * half {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                // Symmetric Schur 2x2: stable tangent of the rotation angle.
                let tau = (aqq - app) / (R::of(2.0) * apq);
                let t = if tau >= R::zero() {
                    R::one() / (tau + (R::one() + tau * tau).sqrt())
                } else {
                    R::one() / (tau - (R::one() + tau * tau).sqrt())
                };
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = t * c;
                // A <- Jᵀ A J, applied as column then row updates.
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

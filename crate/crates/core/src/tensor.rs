//! Dense complex matrices over tensor-product spaces.
//!
//! Factor indices flatten row-major: for dims `[d0, d1, .., dn]` the global
//! index of `(i0, i1, .., in)` is `Σ ik · Π_{j>k} dj`. This is the ordering
//! [`kron`] produces, so `kron(a, b)` acts on factors `[a, b]` in that order.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used by every predicate unless the caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Convenience constructor from real rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let diag: Vec<_> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&diag)
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of `self - other`; panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in distance"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry-wise difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in max_abs_diff"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Panicking product for code paths whose shapes are already validated.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Ordered list of subsystem dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorShape {
    dims: Vec<usize>,
}

impl FactorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidFactorDim(d));
        }
        Ok(Self { dims })
    }

    /// `count` two-level factors.
    pub fn qubits(count: usize) -> Self {
        Self {
            dims: vec![2; count],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Total Hilbert space dimension.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Shape of the listed factors, in the listed order.
    pub fn select(&self, factors: &[usize]) -> Result<Self> {
        self.validate_subset(factors)?;
        Ok(Self {
            dims: factors.iter().map(|&k| self.dims[k]).collect(),
        })
    }

    /// Factor indices not in `factors`, ascending.
    pub fn complement(&self, factors: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|k| !factors.contains(k)).collect()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims }
    }

    pub fn validate_subset(&self, factors: &[usize]) -> Result<()> {
        for (pos, &k) in factors.iter().enumerate() {
            if k >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    factors: self.len(),
                });
            }
            if factors[..pos].contains(&k) {
                return Err(Error::DuplicateIndex(k));
            }
        }
        Ok(())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.len()];
        for k in (0..self.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Global offsets contributed by every multi-index over `factors`,
    /// enumerated big-endian in the listed order.
    fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &k in factors {
            let stride = strides[k];
            offsets = offsets
                .iter()
                .flat_map(|&base| (0..self.dims[k]).map(move |i| base + i * stride))
                .collect();
        }
        offsets
    }
}

/// Kronecker product; `a` is the leftmost factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Lifts `p`, acting on the factors `on` (in that order), to the full space of
/// `shape`, acting as identity on every other factor.
pub fn embed(p: &ComplexMatrix, on: &[usize], shape: &FactorShape) -> Result<ComplexMatrix> {
    p.require_square()?;
    shape.validate_subset(on)?;
    let sub_dim = shape.select(on)?.dim();
    if p.rows != sub_dim {
        return Err(Error::DimensionMismatch {
            expected: sub_dim,
            actual: p.rows,
        });
    }
    let rest = shape.complement(on);
    let on_offsets = shape.offsets(on);
    let rest_offsets = shape.offsets(&rest);
    let mut out = ComplexMatrix::zeros(shape.dim(), shape.dim());
    for &r in &rest_offsets {
        for (u, &ou) in on_offsets.iter().enumerate() {
            for (v, &ov) in on_offsets.iter().enumerate() {
                out[(ou + r, ov + r)] = p[(u, v)];
            }
        }
    }
    Ok(out)
}

pub fn trace(a: &ComplexMatrix) -> Result<Complex64> {
    a.require_square()?;
    Ok((0..a.rows).map(|i| a[(i, i)]).sum())
}

/// Traces out the factors listed in `traced`. The result acts on the
/// remaining factors in their original relative order.
pub fn partial_trace(
    rho: &ComplexMatrix,
    shape: &FactorShape,
    traced: &[usize],
) -> Result<ComplexMatrix> {
    rho.require_square()?;
    if rho.rows != shape.dim() {
        return Err(Error::DimensionMismatch {
            expected: shape.dim(),
            actual: rho.rows,
        });
    }
    shape.validate_subset(traced)?;
    if traced.is_empty() || traced.len() >= shape.len() {
        return Err(Error::ImproperSubset);
    }
    let kept = shape.complement(traced);
    let kept_offsets = shape.offsets(&kept);
    let traced_offsets = shape.offsets(traced);
    let n = kept_offsets.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (a, &oa) in kept_offsets.iter().enumerate() {
        for (b, &ob) in kept_offsets.iter().enumerate() {
            out[(a, b)] = traced_offsets.iter().map(|&t| rho[(oa + t, ob + t)]).sum();
        }
    }
    Ok(out)
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    a.require_square()?;
    Ok(a.max_abs_diff(&a.dagger()) <= tol)
}

/// Eigenvalues (ascending) of the hermitian part `(a + a†)/2`.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.require_square()?;
    let herm = (a + &a.dagger()).scale_real(0.5);
    let m = DMatrix::from_row_slice(herm.rows, herm.cols, herm.entries());
    let mut values: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Hermitian with every eigenvalue `≥ -tol·‖a‖_max`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    if !is_hermitian(a, tol)? {
        return Ok(false);
    }
    let floor = -tol * a.max_abs();
    Ok(hermitian_eigenvalues(a)?.iter().all(|&l| l >= floor))
}

pub fn is_unit_trace(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok((trace(a)? - ONE).norm() <= tol)
}

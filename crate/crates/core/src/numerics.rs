//! Dense complex linear algebra.
//!
//! Everything here works on small dense matrices (a few hundred rows at most),
//! stored row-major. Exponentials are only ever taken of Hermitian (or
//! skew-Hermitian, via a factor of `i`) matrices, through a full
//! eigendecomposition, so the results are unitary up to eigensolver accuracy.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute Frobenius-residual tolerance used by every Hermiticity precondition.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in 0..cols {
                data.push(f(r, col));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries; the entry count must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        Self::diag(
            &entries
                .iter()
                .map(|&x| C64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    /// Permutation matrix sending basis vector `e_i` to `e_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (i, &p) in perm.iter().enumerate() {
            m[(p, i)] = C64::new(1.0, 0.0);
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)])
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * z).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Matrix product, checking inner dimensions.
    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimMismatch {
                expected: format!("{} rows", self.cols),
                got: format!("{} rows", rhs.rows),
            });
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^k` by repeated squaring. `self` must be square.
    pub fn pow(&self, mut k: usize) -> CMatrix {
        assert!(self.is_square(), "pow of a non-square matrix");
        let mut result = CMatrix::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        CVector::from_vec(
            (0..self.rows)
                .map(|r| {
                    self.data[r * self.cols..(r + 1) * self.cols]
                        .iter()
                        .zip(v.as_slice())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    /// `‖A − A†‖_F`
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self - &self.adjoint()).frobenius_norm()
    }

    /// `‖A + A†‖_F`
    pub fn skew_hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self + &self.adjoint()).frobenius_norm()
    }

    /// `‖A†A − I‖_F`
    pub fn unitary_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&(&self.adjoint() * self) - &CMatrix::identity(self.rows)).frobenius_norm()
    }

    /// Distance to the nearest 0/1 pattern, or infinity when the rounded
    /// pattern is not a permutation.
    pub fn permutation_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut row_hits = vec![0usize; n];
        let mut col_hits = vec![0usize; n];
        let mut residual = 0.0;
        for r in 0..n {
            for col in 0..n {
                let z = self[(r, col)];
                let target = if (z - C64::new(1.0, 0.0)).norm() < 0.5 {
                    row_hits[r] += 1;
                    col_hits[col] += 1;
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                residual += (z - target).norm_sqr();
            }
        }
        if row_hits.iter().chain(&col_hits).any(|&h| h != 1) {
            return f64::INFINITY;
        }
        residual.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.skew_hermitian_residual() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_residual() <= tol
    }

    pub fn is_permutation(&self, tol: f64) -> bool {
        self.permutation_residual() <= tol
    }

    /// Copies a `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |r, col| self[(r0 + r, c0 + col)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &CMatrix) {
        for r in 0..block.rows {
            for col in 0..block.cols {
                self[(r0 + r, c0 + col)] = block[(r, col)];
            }
        }
    }

    /// Block-diagonal matrix from square blocks.
    pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = CMatrix::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    fn check_same_shape(&self, other: &CMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && col < self.cols);
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && col < self.cols);
        &mut self.data[r * self.cols + col]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs)
            .expect("matrix product dimension mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum dimension mismatch");
        CMatrix {
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

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            self.shape(),
            rhs.shape(),
            "matrix difference dimension mismatch"
        );
        CMatrix {
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

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

/// Dense complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_vec(data: Vec<C64>) -> Self {
        Self { data }
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        self.scale(C64::new(1.0 / self.norm(), 0.0))
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            data: self.data.iter().map(|&v| v * z).collect(),
        }
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Concatenation `[self; other]`.
    pub fn stack(&self, other: &CVector) -> Self {
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self { data }
    }

    /// Probabilities `|ψ_j|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }
}

impl Index<usize> for CVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl Add for &CVector {
    type Output = CVector;

    fn add(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "vector sum dimension mismatch");
        CVector {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CVector {
    type Output = CVector;

    fn sub(self, rhs: &CVector) -> CVector {
        assert_eq!(
            self.dim(),
            rhs.dim(),
            "vector difference dimension mismatch"
        );
        CVector {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Kronecker product `a ⊗ b`; dimensions multiply.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

fn check_hermitian(h: &CMatrix) -> Result<CMatrix> {
    if !h.is_square() {
        return Err(Error::NonHermitian {
            residual: f64::INFINITY,
        });
    }
    let residual = h.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NonHermitian { residual });
    }
    Ok((h + &h.adjoint()).scale_real(0.5))
}

pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig> {
    let sym = check_hermitian(h)?;
    let n = sym.rows();
    if n == 0 {
        return Ok(HermitianEig {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let dense = DMatrix::from_fn(n, n, |r, col| sym[(r, col)]);
    let eig = SymmetricEigen::new(dense);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(HermitianEig { values, vectors })
}

/// `f(h) = V·diag(f(λ))·V†` for Hermitian `h`.
pub fn hermitian_apply(h: &CMatrix, f: impl Fn(f64) -> C64) -> Result<CMatrix> {
    let HermitianEig { values, vectors } = hermitian_eig(h)?;
    let n = values.len();
    let fv: Vec<C64> = values.iter().map(|&l| f(l)).collect();
    let scaled = CMatrix::from_fn(n, n, |r, col| vectors[(r, col)] * fv[col]);
    Ok(&scaled * &vectors.adjoint())
}

/// `e^{−i s h}` for Hermitian `h`.
pub fn expm_hermitian(h: &CMatrix, s: f64) -> Result<CMatrix> {
    if s == 0.0 {
        check_hermitian(h)?;
        return Ok(CMatrix::identity(h.rows()));
    }
    hermitian_apply(h, |l| C64::new(0.0, -s * l).exp())
}

/// `e^{s x}` for skew-Hermitian `x`, computed as `e^{−i s (i x)}`.
pub fn expm_skew_hermitian(x: &CMatrix, s: f64) -> Result<CMatrix> {
    let residual = x.skew_hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotSkewHermitian { residual });
    }
    expm_hermitian(&x.scale(C64::new(0.0, 1.0)), s)
}

/// Real Hilbert–Schmidt inner product `Re tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum())
}

/// `ab − ba`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    a.check_same_shape(b)?;
    Ok(&(a * b) - &(b * a))
}

//! Dense complex matrices in row-major layout.
//!
//! This is deliberately small: the PTM kernels only need block access,
//! single-pass assembly of sums of Kronecker products and a handful of
//! reference operations (products, adjoints, Kronecker products) used by
//! the oracle and tests.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{domain, mismatch, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let mut data = output_buffer(rows * cols);
        data.resize(rows * cols, ZERO);
        Self { rows, cols, data }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn scalar(value: Complex64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![value],
        }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Builds a matrix from a row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(domain("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(mismatch(format!(
                "buffer of length {} cannot hold a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(mismatch("ragged rows"));
        }
        Self::from_vec(nrows, ncols, rows.into_iter().flatten().collect())
    }

    /// Real-valued convenience constructor, mostly for tests and tables.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols + c])
            .collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[Complex64]) {
        debug_assert_eq!(values.len(), self.rows);
        for (r, v) in values.iter().enumerate() {
            self.data[r * self.cols + c] = *v;
        }
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Copies the `size`x`size` block whose top-left corner is `(row, col)`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> DenseMatrix {
        let mut out = Vec::with_capacity(size * size);
        for r in row..row + size {
            out.extend_from_slice(&self.data[r * self.cols + col..r * self.cols + col + size]);
        }
        DenseMatrix {
            rows: size,
            cols: size,
            data: out,
        }
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &DenseMatrix) {
        for r in 0..block.rows {
            let dst = (row + r) * self.cols + col;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let mut out = self.transpose();
        out.data.iter_mut().for_each(|z| *z = z.conj());
        out
    }

    pub fn conj(&self) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: Complex64, other: &DenseMatrix) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &DenseMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(mismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Plain triple-loop product.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(mismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(mismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self
            .rows_iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "max_abs_diff on different shapes"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_real(&self) -> f64 {
        self.data.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }
}

const HUGE_PAGE_MIN_BYTES: usize = 8 << 20;

/// Empty buffer with room for `len` entries. On Linux, buffers of at least
/// 8 MiB are advised to use transparent huge pages: a large PTM is written
/// once into fresh memory, and with 4 KiB pages the page faults cost more
/// than the writes themselves.
pub(crate) fn output_buffer(len: usize) -> Vec<Complex64> {
    let mut buf = Vec::with_capacity(len);
    let bytes = len * std::mem::size_of::<Complex64>();
    if bytes >= HUGE_PAGE_MIN_BYTES {
        advise_huge_pages(buf.as_mut_ptr() as usize, bytes);
    }
    buf
}

#[cfg(target_os = "linux")]
fn advise_huge_pages(addr: usize, bytes: usize) {
    const PAGE: usize = 4096;
    let start = (addr + PAGE - 1) & !(PAGE - 1);
    let end = (addr + bytes) & !(PAGE - 1);
    if end > start {
        // SAFETY: the range lies inside an allocation owned by the caller;
        // madvise only changes paging hints and never touches the contents.
        // A failure leaves ordinary pages in place, so the result is ignored.
        unsafe {
            libc::madvise(start as *mut libc::c_void, end - start, libc::MADV_HUGEPAGE);
        }
    }
}

#[cfg(not(target_os = "linux"))]
fn advise_huge_pages(_addr: usize, _bytes: usize) {}

/// `Σ_i factor_i ⊗ child_i` for square children of equal size `cs`,
/// written row by row in a single pass over the output.
pub(crate) fn kron4_sum(terms: &[(&[[Complex64; 4]; 4], &DenseMatrix)], cs: usize) -> DenseMatrix {
    let dim = 4 * cs;
    // For each 4x4 block position, the terms whose factor is nonzero there.
    let active: Vec<Vec<(Complex64, &DenseMatrix)>> = (0..16)
        .map(|ab| {
            terms
                .iter()
                .filter_map(|(f, child)| {
                    debug_assert_eq!(child.rows, cs);
                    let e = f[ab / 4][ab % 4];
                    (e != ZERO).then_some((e, *child))
                })
                .collect()
        })
        .collect();
    let mut data = output_buffer(dim * dim);
    for a in 0..4 {
        for r in 0..cs {
            for block in &active[4 * a..4 * a + 4] {
                match block.split_first() {
                    None => data.resize(data.len() + cs, ZERO),
                    Some(((e, first), rest)) => {
                        let start = data.len();
                        extend_scaled(&mut data, *e, first.row(r));
                        for (e, child) in rest {
                            axpy_slice(&mut data[start..], *e, child.row(r));
                        }
                    }
                }
            }
        }
    }
    DenseMatrix {
        rows: dim,
        cols: dim,
        data,
    }
}

/// Appends `e * src` to `dst`.
#[inline]
fn extend_scaled(dst: &mut Vec<Complex64>, e: Complex64, src: &[Complex64]) {
    if e == ONE {
        dst.extend_from_slice(src);
    } else if e == -ONE {
        dst.extend(src.iter().map(|s| -s));
    } else if e == I {
        dst.extend(src.iter().map(|s| Complex64::new(-s.im, s.re)));
    } else if e == -I {
        dst.extend(src.iter().map(|s| Complex64::new(s.im, -s.re)));
    } else {
        dst.extend(src.iter().map(|s| e * s));
    }
}

/// `dst += e * src`, with fast paths for the unit factors that dominate the
/// elementary tables.
#[inline]
pub(crate) fn axpy_slice(dst: &mut [Complex64], e: Complex64, src: &[Complex64]) {
    if e == ONE {
        dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
    } else if e == -ONE {
        dst.iter_mut().zip(src).for_each(|(d, s)| *d -= s);
    } else if e == I {
        dst.iter_mut().zip(src).for_each(|(d, s)| {
            d.re -= s.im;
            d.im += s.re;
        });
    } else if e == -I {
        dst.iter_mut().zip(src).for_each(|(d, s)| {
            d.re += s.im;
            d.im -= s.re;
        });
    } else {
        dst.iter_mut().zip(src).for_each(|(d, s)| *d += e * s);
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.rows_iter() {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>8.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product: `(A⊗B)[i*p + k, j*q + l] = A[i,j] * B[k,l]` for `B` of
/// shape `p x q`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (p, q) = (b.rows, b.cols);
    let mut out = DenseMatrix::zeros(a.rows * p, a.cols * q);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                let dst = (i * p + k) * out.cols + j * q;
                axpy_slice(&mut out.data[dst..dst + q], aij, b.row(k));
            }
        }
    }
    out
}

/// `log2(dim)` when `dim` is a power of two.
pub fn log2_exact(dim: usize) -> Option<usize> {
    (dim > 0 && dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

/// Number of qubits `n` of a square `2^n x 2^n` operator.
pub fn operator_qubits(m: &DenseMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(domain(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    log2_exact(m.rows).ok_or_else(|| domain(format!("dimension {} is not a power of 2", m.rows)))
}

/// Number of qubits `n` of a square `4^n x 4^n` superoperator matrix.
pub fn superop_qubits(m: &DenseMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(domain(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    match log2_exact(m.rows) {
        Some(k) if k % 2 == 0 => Ok(k / 2),
        _ => Err(domain(format!("dimension {} is not a power of 4", m.rows))),
    }
}

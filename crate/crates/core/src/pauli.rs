//! Pauli strings, the normalized Frobenius inner product, cumulative matrix
//! weights (CMWs) and the tensorized Pauli decomposition (TPD) with its
//! inverse.
//!
//! Conventions used throughout the crate:
//!
//! * `⟨A, B⟩ = 2^(-n) tr(A† B)` for `2^n x 2^n` matrices, so the Pauli strings
//!   form an orthonormal basis and the matrix units `E_{k,l}` have norm
//!   `2^(-n)`.
//! * Pauli strings are indexed by the 0-based lexicographic rank of their
//!   quaternary digit string, most significant qubit first.
//! * Canonical component vectors use **row-major** vectorization:
//!   `vec(A)[k * 2^n + l] = A[k, l]`. The transposed (column-major) reshape
//!   is available through [`Orientation::ColumnMajor`] and is what the bra
//!   side of a two-sided basis change needs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, mismatch, PtmError, Result};
use crate::matrix::{kron, log2_exact, operator_qubits, DenseMatrix, I, ONE, ZERO};

/// Word over `{0, 1, 2, 3}` naming the Pauli string `σ^{t1} ⊗ … ⊗ σ^{tn}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuaternaryString(Vec<u8>);

impl QuaternaryString {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d > 3) {
            return Err(domain(format!("digit {d} is not in {{0,1,2,3}}")));
        }
        Ok(Self(digits))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ_i t_i 4^(n-1-i)`, 0-based.
    pub fn lex_rank(&self) -> usize {
        self.0.iter().fold(0, |acc, &d| acc * 4 + d as usize)
    }

    pub fn unrank(rank: usize, n: usize) -> Result<Self> {
        let bound = 1usize
            .checked_shl(2 * n as u32)
            .filter(|_| 2 * n < usize::BITS as usize)
            .ok_or_else(|| domain(format!("{n} digits exceed the index width")))?;
        if rank >= bound {
            return Err(domain(format!("rank {rank} out of range [0, 4^{n})")));
        }
        let digits = (0..n)
            .rev()
            .map(|i| ((rank >> (2 * i)) & 3) as u8)
            .collect();
        Ok(Self(digits))
    }

    pub fn concat(&self, other: &QuaternaryString) -> QuaternaryString {
        let mut d = self.0.clone();
        d.extend_from_slice(&other.0);
        Self(d)
    }

    /// Number of `Y` factors; `(σ^t)^T = (-1)^{y_count} σ^t`.
    pub fn y_count(&self) -> usize {
        self.0.iter().filter(|&&d| d == 2).count()
    }
}

impl FromStr for QuaternaryString {
    type Err = PtmError;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|ch| match ch {
                '0'..='3' => Ok(ch as u8 - b'0'),
                'I' | 'i' => Ok(0),
                'X' | 'x' => Ok(1),
                'Y' | 'y' => Ok(2),
                'Z' | 'z' => Ok(3),
                other => Err(domain(format!("`{other}` is not a Pauli digit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(digits))
    }
}

impl fmt::Display for QuaternaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parity of the number of `2` digits in the base-4 expansion of `rank`.
#[inline]
pub(crate) fn y_parity(mut rank: usize) -> bool {
    let mut odd = false;
    while rank != 0 {
        odd ^= rank & 3 == 2;
        rank >>= 2;
    }
    odd
}

/// `(-1)^{#Y(t)}` for the string of lexicographic rank `rank`.
#[inline]
pub(crate) fn y_sign(rank: usize) -> f64 {
    if y_parity(rank) {
        -1.0
    } else {
        1.0
    }
}

/// 2x2 Pauli matrix `I, X, Y, Z` for digit `0..=3`.
pub fn pauli_matrix(t: u8) -> Result<DenseMatrix> {
    let m = match t {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => return Err(domain(format!("Pauli digit {t} is not in {{0,1,2,3}}"))),
    };
    DenseMatrix::from_rows(m.iter().map(|r| r.to_vec()).collect())
}

pub fn pauli_string(t: &QuaternaryString) -> Result<DenseMatrix> {
    let (first, rest) = t
        .digits()
        .split_first()
        .ok_or_else(|| domain("Pauli string must have at least one factor"))?;
    rest.iter().try_fold(pauli_matrix(*first)?, |acc, &d| {
        Ok(kron(&acc, &pauli_matrix(d)?))
    })
}

/// `2^(-n) tr(A† B)`.
pub fn frobenius_inner(a: &DenseMatrix, b: &DenseMatrix) -> Result<Complex64> {
    let n = operator_qubits(a)?;
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(mismatch(format!(
            "inner product of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let s: Complex64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(s / (1u64 << n) as f64)
}

/// Pauli coefficients `ω_t = ⟨σ^t, A⟩`, indexed by lexicographic rank.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliWeights {
    n: usize,
    weights: Vec<Complex64>,
}

impl PauliWeights {
    pub fn new(weights: Vec<Complex64>) -> Result<Self> {
        let n = log2_exact(weights.len())
            .filter(|k| k % 2 == 0)
            .map(|k| k / 2)
            .ok_or_else(|| domain(format!("length {} is not a power of 4", weights.len())))?;
        Ok(Self { n, weights })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, t: &QuaternaryString) -> Complex64 {
        self.weights[t.lex_rank()]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.weights
    }

    /// Strings with nonzero weight.
    pub fn support(&self) -> impl Iterator<Item = QuaternaryString> + '_ {
        let n = self.n;
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != ZERO)
            .map(move |(r, _)| QuaternaryString::unrank(r, n).expect("rank in range"))
    }
}

/// The four cumulative matrix weights of one decomposition level:
/// `A = Σ_t σ^t ⊗ cmw[t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CmwSet {
    /// Qubit count of the parent matrix.
    pub n: usize,
    pub cmw: [DenseMatrix; 4],
}

pub fn cmw_decompose(a: &DenseMatrix) -> Result<CmwSet> {
    let n = operator_qubits(a)?;
    if n == 0 {
        return Err(domain("a 1x1 matrix has no CMW decomposition"));
    }
    let h = a.rows() / 2;
    let half = Complex64::new(0.5, 0.0);
    let a11 = a.block(0, 0, h);
    let a12 = a.block(0, h, h);
    let a21 = a.block(h, 0, h);
    let a22 = a.block(h, h, h);
    let c0 = a11.add(&a22)?.scale(half);
    let c1 = a12.add(&a21)?.scale(half);
    let c2 = a12.sub(&a21)?.scale(Complex64::new(0.0, 0.5));
    let c3 = a11.sub(&a22)?.scale(half);
    Ok(CmwSet {
        n,
        cmw: [c0, c1, c2, c3],
    })
}

pub fn cmw_compose(c: &CmwSet) -> Result<DenseMatrix> {
    let h = c.cmw[0].rows();
    if c.cmw.iter().any(|m| !m.is_square() || m.rows() != h) {
        return Err(mismatch("CMWs must be square and of equal dimension"));
    }
    let [c0, c1, c2, c3] = &c.cmw;
    let mut out = DenseMatrix::zeros(2 * h, 2 * h);
    out.set_block(0, 0, &c0.add(c3)?);
    out.set_block(h, h, &c0.sub(c3)?);
    let ic2 = c2.scale(I);
    out.set_block(0, h, &c1.sub(&ic2)?);
    out.set_block(h, 0, &c1.add(&ic2)?);
    Ok(out)
}

/// Reshape rule between `4^n` component vectors and `2^n x 2^n` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `v[k * 2^n + l] = A[k, l]`. The frozen convention for canonical
    /// components.
    RowMajor,
    /// `v[l * 2^n + k] = A[k, l]`.
    ColumnMajor,
}

/// Square buffer view used by the in-place kernels.
struct Grid<'a> {
    data: &'a mut [Complex64],
    stride: usize,
}

impl Grid<'_> {
    #[inline]
    fn at(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.stride + c]
    }

    fn is_negligible(&self, row: usize, col: usize, size: usize, threshold: f64) -> bool {
        (row..row + size).all(|r| {
            self.data[r * self.stride + col..r * self.stride + col + size]
                .iter()
                .all(|z| {
                    if threshold == 0.0 {
                        *z == ZERO
                    } else {
                        z.norm() <= threshold
                    }
                })
        })
    }

    fn clear(&mut self, row: usize, col: usize, size: usize) {
        for r in row..row + size {
            self.data[r * self.stride + col..r * self.stride + col + size].fill(ZERO);
        }
    }

    /// Turns the block at `(row, col)` into its four CMWs, laid out as
    /// quadrants `[[cmw0, cmw1], [cmw2, cmw3]]`, then recurses into nonzero
    /// quadrants for `levels - 1` more levels.
    fn decompose(&mut self, row: usize, col: usize, size: usize, levels: usize, threshold: f64) {
        if levels == 0 || size == 1 {
            return;
        }
        let h = size / 2;
        for r in 0..h {
            for c in 0..h {
                let a = *self.at(row + r, col + c);
                let b = *self.at(row + r, col + h + c);
                let cc = *self.at(row + h + r, col + c);
                let d = *self.at(row + h + r, col + h + c);
                *self.at(row + r, col + c) = (a + d) * 0.5;
                *self.at(row + r, col + h + c) = (b + cc) * 0.5;
                *self.at(row + h + r, col + c) = (b - cc) * Complex64::new(0.0, 0.5);
                *self.at(row + h + r, col + h + c) = (a - d) * 0.5;
            }
        }
        for (qr, qc) in [(0, 0), (0, h), (h, 0), (h, h)] {
            if self.is_negligible(row + qr, col + qc, h, threshold) {
                if threshold != 0.0 {
                    self.clear(row + qr, col + qc, h);
                }
                continue;
            }
            self.decompose(row + qr, col + qc, h, levels - 1, threshold);
        }
    }

    /// Inverse of [`Grid::decompose`]: children first, then recombine.
    fn compose(&mut self, row: usize, col: usize, size: usize, levels: usize) {
        if levels == 0 || size == 1 {
            return;
        }
        let h = size / 2;
        for (qr, qc) in [(0, 0), (0, h), (h, 0), (h, h)] {
            if !self.is_negligible(row + qr, col + qc, h, 0.0) {
                self.compose(row + qr, col + qc, h, levels - 1);
            }
        }
        for r in 0..h {
            for c in 0..h {
                let w0 = *self.at(row + r, col + c);
                let w1 = *self.at(row + r, col + h + c);
                let w2 = *self.at(row + h + r, col + c);
                let w3 = *self.at(row + h + r, col + h + c);
                *self.at(row + r, col + c) = w0 + w3;
                *self.at(row + r, col + h + c) = w1 - I * w2;
                *self.at(row + h + r, col + c) = w1 + I * w2;
                *self.at(row + h + r, col + h + c) = w0 - w3;
            }
        }
    }
}

/// Spreads the low `bits` bits of `x` to even bit positions.
#[inline]
fn spread_bits(x: usize, bits: usize) -> usize {
    (0..bits).fold(0, |acc, b| acc | (((x >> b) & 1) << (2 * b)))
}

/// Lexicographic rank of the string whose digit `q` is `2*row_q + col_q`,
/// where `row_q`, `col_q` are the `q`-th most significant of `bits` bits.
#[inline]
pub(crate) fn interleave(row: usize, col: usize, bits: usize) -> usize {
    (spread_bits(row, bits) << 1) | spread_bits(col, bits)
}

/// Tensorized Pauli decomposition with exact-zero pruning.
pub fn tpd(a: &DenseMatrix) -> Result<PauliWeights> {
    tpd_pruned(a, 0.0)
}

/// Tensorized Pauli decomposition. CMW branches whose entries all have
/// modulus `<= prune_threshold` are dropped (zeroed); `0.0` prunes only exact
/// zeros and is lossless.
pub fn tpd_pruned(a: &DenseMatrix, prune_threshold: f64) -> Result<PauliWeights> {
    let n = operator_qubits(a)?;
    if prune_threshold.is_nan() || prune_threshold < 0.0 {
        return Err(domain("prune threshold must be a non-negative number"));
    }
    let dim = a.rows();
    let mut buf = a.as_slice().to_vec();
    Grid {
        data: &mut buf,
        stride: dim,
    }
    .decompose(0, 0, dim, n, prune_threshold);
    let mut weights = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            weights[interleave(r, c, n)] = buf[r * dim + c];
        }
    }
    Ok(PauliWeights { n, weights })
}

/// Inverse TPD: `Σ_t w_t σ^t`.
pub fn itpd(w: &PauliWeights) -> DenseMatrix {
    let n = w.n;
    let dim = 1usize << n;
    let mut buf = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            buf[r * dim + c] = w.weights[interleave(r, c, n)];
        }
    }
    Grid {
        data: &mut buf,
        stride: dim,
    }
    .compose(0, 0, dim, n);
    DenseMatrix::from_vec(dim, dim, buf).expect("square buffer")
}

fn reshape(v: &[Complex64], orientation: Orientation) -> Result<DenseMatrix> {
    let k = log2_exact(v.len())
        .filter(|k| k % 2 == 0)
        .ok_or_else(|| domain(format!("length {} is not a power of 4", v.len())))?;
    let dim = 1usize << (k / 2);
    let m = DenseMatrix::from_vec(dim, dim, v.to_vec())?;
    Ok(match orientation {
        Orientation::RowMajor => m,
        Orientation::ColumnMajor => m.transpose(),
    })
}

/// Vectorizes a square matrix under `orientation`.
pub fn vectorize(a: &DenseMatrix, orientation: Orientation) -> Vec<Complex64> {
    match orientation {
        Orientation::RowMajor => a.as_slice().to_vec(),
        Orientation::ColumnMajor => a.transpose().into_vec(),
    }
}

pub fn unvectorize(v: &[Complex64], orientation: Orientation) -> Result<DenseMatrix> {
    let dim = (v.len() as f64).sqrt() as usize;
    if dim * dim != v.len() || dim == 0 {
        return Err(domain(format!(
            "length {} is not a perfect square",
            v.len()
        )));
    }
    let m = DenseMatrix::from_vec(dim, dim, v.to_vec())?;
    Ok(match orientation {
        Orientation::RowMajor => m,
        Orientation::ColumnMajor => m.transpose(),
    })
}

/// TPD of a canonical component vector.
pub fn tpd_vec(v: &[Complex64], orientation: Orientation) -> Result<Vec<Complex64>> {
    Ok(tpd(&reshape(v, orientation)?)?.into_vec())
}

/// Inverse of [`tpd_vec`]: Pauli weights to canonical components.
pub fn itpd_vec(w: &[Complex64], orientation: Orientation) -> Result<Vec<Complex64>> {
    let weights = PauliWeights::new(w.to_vec())?;
    Ok(vectorize(&itpd(&weights), orientation))
}

/// Expands the leading `depth` qubits of a `2^m x 2^m` matrix in the Pauli
/// basis: returns the `4^depth` blocks `G_t` (by lexicographic rank of `t`)
/// with `A = Σ_t σ^t ⊗ G_t`. Blocks of pruned (all-zero) branches are zero.
pub(crate) fn expand_leading(a: &DenseMatrix, depth: usize) -> Result<Vec<DenseMatrix>> {
    let m = operator_qubits(a)?;
    if depth > m {
        return Err(domain(format!("cannot expand {depth} of {m} qubits")));
    }
    let dim = a.rows();
    let block = dim >> depth;
    let mut buf = a.as_slice().to_vec();
    Grid {
        data: &mut buf,
        stride: dim,
    }
    .decompose(0, 0, dim, depth, 0.0);
    let buf = DenseMatrix::from_vec(dim, dim, buf)?;
    let count = 1usize << (2 * depth);
    let mut out = vec![DenseMatrix::zeros(block, block); count];
    for br in 0..(1usize << depth) {
        for bc in 0..(1usize << depth) {
            out[interleave(br, bc, depth)] = buf.block(br * block, bc * block, block);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(s: &str) -> QuaternaryString {
        s.parse().unwrap()
    }

    fn m1234() -> DenseMatrix {
        DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap()
    }

    #[test]
    fn pauli_matrices() {
        assert_eq!(pauli_matrix(0).unwrap(), DenseMatrix::identity(2));
        let y = pauli_matrix(2).unwrap();
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
        assert_eq!(
            pauli_matrix(3).unwrap(),
            DenseMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
        );
        assert!(pauli_matrix(4).is_err());
    }

    #[test]
    fn pauli_strings() {
        let zi = pauli_string(&q("30")).unwrap();
        assert_eq!(zi, DenseMatrix::diagonal(&[ONE, ONE, -ONE, -ONE]));
        assert_eq!(pauli_string(&q("000")).unwrap(), DenseMatrix::identity(8));
        let xy = kron(&pauli_matrix(1).unwrap(), &pauli_matrix(2).unwrap());
        assert_eq!(pauli_string(&q("12")).unwrap(), xy);
        assert!(pauli_string(&QuaternaryString::empty()).is_err());
    }

    #[test]
    fn pauli_strings_are_hermitian_involutory() {
        for r in 0..64 {
            let p = pauli_string(&QuaternaryString::unrank(r, 3).unwrap()).unwrap();
            assert_eq!(p.adjoint(), p);
            assert_eq!(p.matmul(&p).unwrap(), DenseMatrix::identity(8));
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(q("00").lex_rank(), 0);
        assert_eq!(q("30").lex_rank(), 12);
        assert_eq!(QuaternaryString::unrank(6, 2).unwrap(), q("12"));
        assert!(QuaternaryString::unrank(16, 2).is_err());
        assert!(QuaternaryString::new(vec![0, 4]).is_err());
        assert_eq!(q("XYZI"), q("1230"));
        assert_eq!(q("0120").y_count(), 1);
    }

    #[test]
    fn inner_products() {
        let e11 = DenseMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(frobenius_inner(&e11, &e11).unwrap(), c(0.5, 0.0));
        for s in 0..16 {
            for t in 0..16 {
                let ps = pauli_string(&QuaternaryString::unrank(s, 2).unwrap()).unwrap();
                let pt = pauli_string(&QuaternaryString::unrank(t, 2).unwrap()).unwrap();
                let expect = if s == t { ONE } else { ZERO };
                assert_eq!(frobenius_inner(&ps, &pt).unwrap(), expect);
            }
        }
        assert!(frobenius_inner(&DenseMatrix::identity(2), &DenseMatrix::identity(4)).is_err());
    }

    #[test]
    fn cmw_of_small_matrix() {
        let set = cmw_decompose(&m1234()).unwrap();
        let scalars: Vec<_> = set.cmw.iter().map(|m| m[(0, 0)]).collect();
        assert_eq!(
            scalars,
            vec![c(2.5, 0.0), c(2.5, 0.0), c(0.0, -0.5), c(-1.5, 0.0)]
        );
        assert_eq!(cmw_compose(&set).unwrap(), m1234());

        let y = cmw_decompose(&pauli_matrix(2).unwrap()).unwrap();
        let scalars: Vec<_> = y.cmw.iter().map(|m| m[(0, 0)]).collect();
        assert_eq!(scalars, vec![ZERO, ZERO, ONE, ZERO]);

        assert!(cmw_decompose(&DenseMatrix::scalar(ONE)).is_err());
    }

    #[test]
    fn cmw_compose_identity_and_mismatch() {
        let set = CmwSet {
            n: 1,
            cmw: [
                DenseMatrix::scalar(ONE),
                DenseMatrix::scalar(ZERO),
                DenseMatrix::scalar(ZERO),
                DenseMatrix::scalar(ZERO),
            ],
        };
        assert_eq!(cmw_compose(&set).unwrap(), DenseMatrix::identity(2));
        let bad = CmwSet {
            n: 2,
            cmw: [
                DenseMatrix::identity(2),
                DenseMatrix::identity(2),
                DenseMatrix::identity(1),
                DenseMatrix::identity(2),
            ],
        };
        assert!(cmw_compose(&bad).is_err());
    }

    #[test]
    fn diagonal_cmws_vanish_off_diagonal() {
        let d = DenseMatrix::diagonal(&[c(1.0, 2.0), c(-3.0, 0.5), c(0.25, 0.0), c(7.0, -1.0)]);
        let set = cmw_decompose(&d).unwrap();
        assert!(set.cmw[1].is_zero());
        assert!(set.cmw[2].is_zero());
    }

    #[test]
    fn tpd_examples() {
        let w = tpd(&pauli_string(&q("30")).unwrap()).unwrap();
        for (r, x) in w.as_slice().iter().enumerate() {
            assert_eq!(*x, if r == 12 { ONE } else { ZERO });
        }
        let w = tpd(&m1234()).unwrap();
        assert_eq!(
            w.as_slice(),
            &[c(2.5, 0.0), c(2.5, 0.0), c(0.0, -0.5), c(-1.5, 0.0)]
        );
        let s = tpd(&DenseMatrix::scalar(c(3.0, 1.0))).unwrap();
        assert_eq!(s.as_slice(), &[c(3.0, 1.0)]);
        assert!(tpd(&DenseMatrix::identity(3)).is_err());
        assert!(tpd(&DenseMatrix::zeros(2, 4)).is_err());
    }

    #[test]
    fn itpd_examples() {
        let mut w = vec![ZERO; 16];
        w[0] = ONE;
        assert_eq!(
            itpd(&PauliWeights::new(w).unwrap()),
            DenseMatrix::identity(4)
        );
        let w = PauliWeights::new(vec![ZERO, ZERO, ONE, ZERO]).unwrap();
        assert_eq!(itpd(&w), pauli_matrix(2).unwrap());
        assert!(PauliWeights::new(vec![ZERO; 8]).is_err());
    }

    #[test]
    fn basis_vectors_are_exact() {
        for n in 1..=3 {
            for r in 0..(1 << (2 * n)) {
                let t = QuaternaryString::unrank(r, n).unwrap();
                let w = tpd(&pauli_string(&t).unwrap()).unwrap();
                for (k, x) in w.as_slice().iter().enumerate() {
                    assert_eq!(*x, if k == r { ONE } else { ZERO }, "t={t} k={k}");
                }
            }
        }
    }

    #[test]
    fn vectorized_variants() {
        let id = vectorize(&DenseMatrix::identity(2), Orientation::RowMajor);
        for o in [Orientation::RowMajor, Orientation::ColumnMajor] {
            assert_eq!(tpd_vec(&id, o).unwrap(), vec![ONE, ZERO, ZERO, ZERO]);
        }
        let v = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        assert_eq!(
            tpd_vec(&v, Orientation::RowMajor).unwrap(),
            vec![c(2.5, 0.0), c(2.5, 0.0), c(0.0, -0.5), c(-1.5, 0.0)]
        );
        // The column-major reshape of the same data is the transpose.
        assert_eq!(
            tpd_vec(&v, Orientation::ColumnMajor).unwrap(),
            vec![c(2.5, 0.0), c(2.5, 0.0), c(0.0, 0.5), c(-1.5, 0.0)]
        );
        assert!(tpd_vec(&v[..3], Orientation::RowMajor).is_err());
        assert!(itpd_vec(&v[..2], Orientation::RowMajor).is_err());
    }

    #[test]
    fn pruning_threshold_drops_small_branches() {
        let mut a = pauli_string(&q("10")).unwrap();
        a.axpy(c(1e-9, 0.0), &pauli_string(&q("33")).unwrap())
            .unwrap();
        let exact = tpd(&a).unwrap();
        assert!((exact.get(&q("33")) - c(1e-9, 0.0)).norm() < 1e-20);
        let lossy = tpd_pruned(&a, 1e-6).unwrap();
        assert_eq!(lossy.get(&q("33")), ZERO);
        assert_eq!(lossy.get(&q("10")), ONE);
        assert!(tpd_pruned(&a, -1.0).is_err());
    }

    #[test]
    fn leading_expansion_of_pure_tensor() {
        let g = DenseMatrix::from_rows(vec![
            vec![c(1.0, 1.0), c(0.0, 2.0)],
            vec![c(-3.0, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        let m = kron(&pauli_matrix(3).unwrap(), &g);
        let blocks = expand_leading(&m, 1).unwrap();
        assert_eq!(blocks[3], g);
        assert!(blocks[..3].iter().all(DenseMatrix::is_zero));
    }

    #[test]
    fn y_parity_by_rank() {
        assert!(!y_parity(0));
        assert!(y_parity(2));
        assert!(y_parity(q("012").lex_rank()));
        assert!(!y_parity(q("220").lex_rank()));
    }
}

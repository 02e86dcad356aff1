//! Channel representations and their conversion to PTM.
//!
//! Conventions (the oracle in [`crate::oracle`] is the ground truth):
//!
//! * `Can` is defined component-wise, `E(E_j) = Σ_i Can[i, j] E_i`, with the
//!   matrix units in row-major order `j = k * 2^n + l`. Equivalently
//!   `vec(E(ρ)) = Can · vec(ρ)` under row-major vectorization.
//! * `Choi(E) = Σ_{k,l} E_{k,l} ⊗ E(E_{k,l})`: the first factor indexes,
//!   the second holds the image.
//! * `E(ρ) = Σ_{s,t} Chi[s, t] σ^s ρ σ^t`.
//! * `PTM[s, t] = 2^(-n) tr(σ^s E(σ^t))`.
//!
//! With `B` the transition matrix whose column `t` is `vec(σ^t)`, one has
//! `PTM = B⁻¹ · Can · B`. The column (ket) side is the TPD of the row-major
//! reshape; the row (bra) side `r ↦ r·B` equals `2^n` times the TPD of the
//! column-major reshape, because `(σ^t)^T = (-1)^{#Y(t)} σ^t`. The same
//! kernel relates Choi and Chi: `Chi = 2^(-n) Σ · can_to_ptm(Choi) · Σ`
//! where `Σ = diag((-1)^{#Y(s)})`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, mismatch, Result};
use crate::matrix::{kron4_sum, operator_qubits, superop_qubits, DenseMatrix, ZERO};
use crate::pauli::{expand_leading, itpd_vec, tpd, tpd_vec, y_sign, Orientation, QuaternaryString};
use crate::superop::PtmEngine;
use crate::tables::Mat4;

/// One generalized Kraus term `ρ ↦ K ρ L†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausPair {
    pub k: DenseMatrix,
    pub l: DenseMatrix,
}

impl KrausPair {
    pub fn new(k: DenseMatrix, l: DenseMatrix) -> Self {
        Self { k, l }
    }

    /// Ordinary Kraus operator: `L = K`.
    pub fn single(k: DenseMatrix) -> Self {
        Self { l: k.clone(), k }
    }

    pub fn is_plain(&self) -> bool {
        self.k == self.l
    }
}

/// Tag of a [`ChannelRep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RepKind {
    Can,
    Choi,
    Chi,
    Ptm,
    Kraus,
}

impl RepKind {
    pub fn name(self) -> &'static str {
        match self {
            RepKind::Can => "can",
            RepKind::Choi => "choi",
            RepKind::Chi => "chi",
            RepKind::Ptm => "ptm",
            RepKind::Kraus => "kraus",
        }
    }
}

impl std::str::FromStr for RepKind {
    type Err = crate::error::PtmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "can" => Ok(RepKind::Can),
            "choi" => Ok(RepKind::Choi),
            "chi" => Ok(RepKind::Chi),
            "ptm" => Ok(RepKind::Ptm),
            "kraus" => Ok(RepKind::Kraus),
            other => Err(domain(format!("unknown representation `{other}`"))),
        }
    }
}

impl std::fmt::Display for RepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A superoperator in one of the supported representations. Constructed
/// through the validating constructors, so the matrix variants always hold
/// a `4^n x 4^n` matrix and the Kraus variant a nonempty list of equally
/// sized `2^n x 2^n` pairs.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelRep {
    Can(DenseMatrix),
    Choi(DenseMatrix),
    Chi(DenseMatrix),
    Ptm(DenseMatrix),
    Kraus(Vec<KrausPair>),
}

impl ChannelRep {
    pub fn from_matrix(kind: RepKind, m: DenseMatrix) -> Result<Self> {
        superop_qubits(&m)?;
        Ok(match kind {
            RepKind::Can => ChannelRep::Can(m),
            RepKind::Choi => ChannelRep::Choi(m),
            RepKind::Chi => ChannelRep::Chi(m),
            RepKind::Ptm => ChannelRep::Ptm(m),
            RepKind::Kraus => {
                return Err(domain("a Kraus representation is a list of operator pairs"))
            }
        })
    }

    pub fn can(m: DenseMatrix) -> Result<Self> {
        Self::from_matrix(RepKind::Can, m)
    }

    pub fn choi(m: DenseMatrix) -> Result<Self> {
        Self::from_matrix(RepKind::Choi, m)
    }

    pub fn chi(m: DenseMatrix) -> Result<Self> {
        Self::from_matrix(RepKind::Chi, m)
    }

    pub fn ptm(m: DenseMatrix) -> Result<Self> {
        Self::from_matrix(RepKind::Ptm, m)
    }

    pub fn kraus(pairs: Vec<KrausPair>) -> Result<Self> {
        check_kraus(&pairs)?;
        Ok(ChannelRep::Kraus(pairs))
    }

    pub fn kind(&self) -> RepKind {
        match self {
            ChannelRep::Can(_) => RepKind::Can,
            ChannelRep::Choi(_) => RepKind::Choi,
            ChannelRep::Chi(_) => RepKind::Chi,
            ChannelRep::Ptm(_) => RepKind::Ptm,
            ChannelRep::Kraus(_) => RepKind::Kraus,
        }
    }

    pub fn qubits(&self) -> usize {
        match self {
            ChannelRep::Can(m) | ChannelRep::Choi(m) | ChannelRep::Chi(m) | ChannelRep::Ptm(m) => {
                superop_qubits(m).expect("validated on construction")
            }
            ChannelRep::Kraus(pairs) => {
                operator_qubits(&pairs[0].k).expect("validated on construction")
            }
        }
    }

    pub fn matrix(&self) -> Option<&DenseMatrix> {
        match self {
            ChannelRep::Can(m) | ChannelRep::Choi(m) | ChannelRep::Chi(m) | ChannelRep::Ptm(m) => {
                Some(m)
            }
            ChannelRep::Kraus(_) => None,
        }
    }

    /// Converts to PTM with the fast algorithm for the representation.
    pub fn to_ptm(&self) -> Result<DenseMatrix> {
        match self {
            ChannelRep::Can(m) => can_to_ptm(m),
            ChannelRep::Choi(m) => choi_to_ptm(m),
            ChannelRep::Chi(m) => chi_to_ptm(m),
            ChannelRep::Ptm(m) => Ok(m.clone()),
            ChannelRep::Kraus(pairs) => kraus_to_ptm(pairs),
        }
    }
}

fn check_kraus(pairs: &[KrausPair]) -> Result<usize> {
    let first = pairs
        .first()
        .ok_or_else(|| domain("a Kraus representation needs at least one pair"))?;
    let n = operator_qubits(&first.k)?;
    for (i, p) in pairs.iter().enumerate() {
        for (label, m) in [("K", &p.k), ("L", &p.l)] {
            if operator_qubits(m)? != n || !m.is_square() {
                return Err(mismatch(format!(
                    "Kraus pair {i}: {label} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    1 << n,
                    1 << n
                )));
            }
        }
    }
    Ok(n)
}

fn map_rows(
    m: &DenseMatrix,
    parallel: bool,
    f: impl Fn(&[Complex64]) -> Result<Vec<Complex64>> + Sync,
) -> Result<DenseMatrix> {
    let cols = m.cols();
    let mut out = crate::matrix::output_buffer(m.rows() * cols);
    out.resize(m.rows() * cols, ZERO);
    let apply = |(dst, src): (&mut [Complex64], &[Complex64])| -> Result<()> {
        dst.copy_from_slice(&f(src)?);
        Ok(())
    };
    if parallel {
        out.par_chunks_mut(cols)
            .zip(m.as_slice().par_chunks(cols))
            .try_for_each(apply)?;
    } else {
        out.chunks_mut(cols)
            .zip(m.as_slice().chunks(cols))
            .try_for_each(apply)?;
    }
    DenseMatrix::from_vec(m.rows(), cols, out)
}

fn map_columns(
    m: &DenseMatrix,
    parallel: bool,
    f: impl Fn(&[Complex64]) -> Result<Vec<Complex64>> + Sync,
) -> Result<DenseMatrix> {
    Ok(map_rows(&m.transpose(), parallel, f)?.transpose())
}

fn can_to_ptm_impl(m: &DenseMatrix, parallel: bool) -> Result<DenseMatrix> {
    let n = superop_qubits(m)?;
    let bra_scale = (1u64 << n) as f64;
    let w = map_rows(m, parallel, |row| {
        let mut v = tpd_vec(row, Orientation::ColumnMajor)?;
        v.iter_mut().for_each(|x| *x *= bra_scale);
        Ok(v)
    })?;
    map_columns(&w, parallel, |col| tpd_vec(col, Orientation::RowMajor))
}

fn ptm_to_can_impl(m: &DenseMatrix, parallel: bool) -> Result<DenseMatrix> {
    let n = superop_qubits(m)?;
    let bra_scale = 1.0 / (1u64 << n) as f64;
    let r = map_rows(m, parallel, |row| {
        let mut v = itpd_vec(row, Orientation::ColumnMajor)?;
        v.iter_mut().for_each(|x| *x *= bra_scale);
        Ok(v)
    })?;
    map_columns(&r, parallel, |col| itpd_vec(col, Orientation::RowMajor))
}

/// Canonical representation to PTM: a TPD along every row, then along
/// every column.
pub fn can_to_ptm(m: &DenseMatrix) -> Result<DenseMatrix> {
    can_to_ptm_impl(m, false)
}

/// [`can_to_ptm`] with rows and columns distributed over the rayon pool.
/// Each row/column uses the same serial kernel, so results are identical.
pub fn can_to_ptm_par(m: &DenseMatrix) -> Result<DenseMatrix> {
    can_to_ptm_impl(m, true)
}

/// Inverse of [`can_to_ptm`].
pub fn ptm_to_can(m: &DenseMatrix) -> Result<DenseMatrix> {
    ptm_to_can_impl(m, false)
}

pub fn ptm_to_can_par(m: &DenseMatrix) -> Result<DenseMatrix> {
    ptm_to_can_impl(m, true)
}

/// Conjugates by `diag((-1)^{#Y})` and scales.
fn y_conjugate(m: &DenseMatrix, scale: f64) -> DenseMatrix {
    let mut out = m.clone();
    let dim = m.rows();
    for r in 0..dim {
        let sr = y_sign(r) * scale;
        for (c, x) in out.row_mut(r).iter_mut().enumerate() {
            *x *= sr * y_sign(c);
        }
    }
    out
}

pub fn choi_to_chi(m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = superop_qubits(m)?;
    Ok(y_conjugate(&can_to_ptm(m)?, 1.0 / (1u64 << n) as f64))
}

pub fn chi_to_choi(m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = superop_qubits(m)?;
    ptm_to_can(&y_conjugate(m, (1u64 << n) as f64))
}

/// Blocks `G_t` with `M = Σ_t σ^t ⊗ G_t`, obtained by expanding only the
/// leading `n` qubits of a `4^n x 4^n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialExpansion {
    pub n: usize,
    blocks: Vec<DenseMatrix>,
}

impl PartialExpansion {
    pub fn get(&self, t: &QuaternaryString) -> &DenseMatrix {
        &self.blocks[t.lex_rank()]
    }

    pub fn by_rank(&self, rank: usize) -> &DenseMatrix {
        &self.blocks[rank]
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }
}

pub fn partial_expand_first(m: &DenseMatrix) -> Result<PartialExpansion> {
    let n = superop_qubits(m)?;
    Ok(PartialExpansion {
        n,
        blocks: expand_leading(m, n)?,
    })
}

/// Choi matrix to PTM. Under the index-first Choi convention the expansion
/// blocks satisfy `E(σ^t) = 2^n (-1)^{#Y(t)} G_t`, so column `t` of the PTM
/// is that multiple of `tpd(G_t)`.
pub fn choi_to_ptm(m: &DenseMatrix) -> Result<DenseMatrix> {
    let exp = partial_expand_first(m)?;
    let n = exp.n;
    let dim = 1usize << (2 * n);
    let scale = (1u64 << n) as f64;
    let mut out = DenseMatrix::zeros(dim, dim);
    for (t, block) in exp.blocks.iter().enumerate() {
        if block.is_zero() {
            continue;
        }
        let factor = scale * y_sign(t);
        let w = tpd(block)?;
        for (s, x) in w.as_slice().iter().enumerate() {
            out[(s, t)] = x * factor;
        }
    }
    Ok(out)
}

/// Chi matrix to PTM via the 16-way block recursion over digit pairs.
pub fn chi_to_ptm(m: &DenseMatrix) -> Result<DenseMatrix> {
    PtmEngine::default().chi_to_ptm(m)
}

/// Generalized Kraus set to PTM: `Σ_i PTM(ρ ↦ K_i ρ L_i†)`.
pub fn kraus_to_ptm(pairs: &[KrausPair]) -> Result<DenseMatrix> {
    PtmEngine::default().kraus_to_ptm(pairs)
}

/// Nonzero flags of the 16-ary block tree of a Chi matrix.
struct BlockTree {
    n: usize,
    /// `live[i]` is a `4^i x 4^i` grid, row-major.
    live: Vec<Vec<bool>>,
}

impl BlockTree {
    fn new(m: &DenseMatrix, n: usize) -> Self {
        let mut live = vec![Vec::new(); n + 1];
        live[n] = m.as_slice().iter().map(|x| *x != ZERO).collect();
        for level in (0..n).rev() {
            let side = 1usize << (2 * level);
            let child_side = side * 4;
            let child = &live[level + 1];
            live[level] = (0..side * side)
                .map(|idx| {
                    let (s, t) = (idx / side, idx % side);
                    (0..4).any(|a| (0..4).any(|b| child[(4 * s + a) * child_side + 4 * t + b]))
                })
                .collect();
        }
        Self { n, live }
    }

    #[inline]
    fn is_live(&self, level: usize, s: usize, t: usize) -> bool {
        let side = 1usize << (2 * level);
        self.live[level][s * side + t]
    }
}

fn chi_node(
    table: &[[Mat4; 4]; 4],
    chi: &DenseMatrix,
    tree: &BlockTree,
    level: usize,
    s: usize,
    t: usize,
) -> DenseMatrix {
    let remaining = tree.n - level;
    let dim = 1usize << (2 * remaining);
    if remaining == 1 {
        let mut acc = [[ZERO; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let w = chi[(4 * s + a, 4 * t + b)];
                if w == ZERO {
                    continue;
                }
                for (r, row) in acc.iter_mut().enumerate() {
                    for (c, x) in row.iter_mut().enumerate() {
                        *x += w * table[a][b][r][c];
                    }
                }
            }
        }
        return crate::tables::mat4_to_dense(&acc);
    }
    let mut children = Vec::with_capacity(16);
    for a in 0..4 {
        for b in 0..4 {
            let (cs, ct) = (4 * s + a, 4 * t + b);
            if tree.is_live(level + 1, cs, ct) {
                children.push((&table[a][b], chi_node(table, chi, tree, level + 1, cs, ct)));
            }
        }
    }
    let terms: Vec<(&Mat4, &DenseMatrix)> = children.iter().map(|(f, c)| (*f, c)).collect();
    kron4_sum(&terms, dim / 4)
}

impl PtmEngine<'_> {
    pub fn chi_to_ptm(&self, m: &DenseMatrix) -> Result<DenseMatrix> {
        let n = superop_qubits(m)?;
        if n == 0 {
            return Ok(m.clone());
        }
        let tree = BlockTree::new(m, n);
        if !tree.is_live(0, 0, 0) {
            return Ok(DenseMatrix::zeros(m.rows(), m.cols()));
        }
        Ok(chi_node(&self.tables().sandwich, m, &tree, 0, 0, 0))
    }

    pub fn kraus_to_ptm(&self, pairs: &[KrausPair]) -> Result<DenseMatrix> {
        let n = check_kraus(pairs)?;
        let dim = 1usize << (2 * n);
        let mut out = DenseMatrix::zeros(dim, dim);
        for p in pairs {
            let term = self.m_ptm(&p.k, &p.l.adjoint())?;
            out.axpy(Complex64::new(1.0, 0.0), &term)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{kron, ONE};
    use crate::pauli::pauli_matrix;
    use crate::tables::eptm_sandwich;

    fn x_conjugation_ptm() -> DenseMatrix {
        DenseMatrix::diagonal(&[ONE, ONE, -ONE, -ONE])
    }

    #[test]
    fn identity_channel_in_every_representation() {
        for n in 1..=2 {
            let big = DenseMatrix::identity(1 << (2 * n));
            assert_eq!(can_to_ptm(&big).unwrap(), big);
            assert_eq!(ptm_to_can(&big).unwrap(), big);
            let mut chi = DenseMatrix::zeros(big.rows(), big.cols());
            chi[(0, 0)] = ONE;
            assert_eq!(chi_to_ptm(&chi).unwrap(), big);
            let id = DenseMatrix::identity(1 << n);
            assert_eq!(kraus_to_ptm(&[KrausPair::single(id)]).unwrap(), big);
        }
    }

    #[test]
    fn x_conjugation() {
        let x = pauli_matrix(1).unwrap();
        assert_eq!(
            kraus_to_ptm(&[KrausPair::single(x)]).unwrap(),
            x_conjugation_ptm()
        );
        // Can(ρ ↦ XρX) = X ⊗ conj(X) under row-major vectorization.
        let can = kron(&pauli_matrix(1).unwrap(), &pauli_matrix(1).unwrap());
        assert_eq!(can_to_ptm(&can).unwrap(), x_conjugation_ptm());
        assert_eq!(ptm_to_can(&x_conjugation_ptm()).unwrap(), can);
    }

    #[test]
    fn chi_unit_entry_is_sandwich_table() {
        let mut chi = DenseMatrix::zeros(4, 4);
        chi[(1, 2)] = ONE;
        assert_eq!(chi_to_ptm(&chi).unwrap(), eptm_sandwich(1, 2).unwrap());
    }

    #[test]
    fn choi_of_identity_channel() {
        // Σ_{k,l} E_kl ⊗ E_kl
        let mut choi = DenseMatrix::zeros(4, 4);
        for k in 0..2 {
            for l in 0..2 {
                choi[(2 * k + k, 2 * l + l)] = ONE;
            }
        }
        assert_eq!(choi_to_ptm(&choi).unwrap(), DenseMatrix::identity(4));
        let chi = choi_to_chi(&choi).unwrap();
        let mut expect = DenseMatrix::zeros(4, 4);
        expect[(0, 0)] = ONE;
        assert_eq!(chi, expect);
        assert_eq!(chi_to_choi(&chi).unwrap(), choi);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let m = DenseMatrix::identity(8);
        assert!(can_to_ptm(&m).is_err());
        assert!(ptm_to_can(&m).is_err());
        assert!(choi_to_ptm(&m).is_err());
        assert!(chi_to_ptm(&m).is_err());
        assert!(choi_to_chi(&m).is_err());
        assert!(partial_expand_first(&m).is_err());
        assert!(kraus_to_ptm(&[]).is_err());
        let bad = [
            KrausPair::single(DenseMatrix::identity(2)),
            KrausPair::single(DenseMatrix::identity(4)),
        ];
        assert!(kraus_to_ptm(&bad).is_err());
        assert!(ChannelRep::can(DenseMatrix::identity(2)).is_err());
        assert!(ChannelRep::from_matrix(RepKind::Kraus, DenseMatrix::identity(4)).is_err());
    }

    #[test]
    fn rep_metadata() {
        let rep = ChannelRep::chi(DenseMatrix::identity(16)).unwrap();
        assert_eq!(rep.qubits(), 2);
        assert_eq!(rep.kind(), RepKind::Chi);
        let k = ChannelRep::kraus(vec![KrausPair::single(DenseMatrix::identity(8))]).unwrap();
        assert_eq!(k.qubits(), 3);
        assert!(k.matrix().is_none());
        assert_eq!("choi".parse::<RepKind>().unwrap(), RepKind::Choi);
        assert!("superop".parse::<RepKind>().is_err());
    }
}

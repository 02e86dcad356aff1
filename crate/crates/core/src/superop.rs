//! PTMs of the special superoperators `ρ ↦ Aρ`, `ρ ↦ ρA`, `ρ ↦ A₁ρA₂`,
//! `ρ ↦ [A, ρ]` and `ρ ↦ {A, ρ}`.
//!
//! All five follow the same recursion: split the operator into its four
//! CMWs, compute the PTM of each nonzero CMW recursively and accumulate
//! `elementary[t] ⊗ child` into the output in one pass. The CMW tree of an operator is
//! computed once per top-level call (one in-place TPD) and shared by every
//! branch; a branch is pruned when its CMW is identically zero, which is the
//! case exactly when all Pauli weights below its prefix vanish.

use num_complex::Complex64;

use crate::error::{mismatch, Result};
use crate::matrix::{kron4_sum, operator_qubits, DenseMatrix, ZERO};
use crate::pauli::tpd;
use crate::tables::{ElementaryTables, Mat4, TABLES};

/// Pauli weights of an operator plus, per recursion level, which CMWs are
/// nonzero.
struct CmwTree {
    n: usize,
    weights: Vec<Complex64>,
    /// `nonzero[i][p]`: the CMW for the length-`i` prefix `p` is nonzero.
    nonzero: Vec<Vec<bool>>,
}

impl CmwTree {
    fn new(a: &DenseMatrix) -> Result<Self> {
        let weights = tpd(a)?.into_vec();
        let n = operator_qubits(a)?;
        let mut nonzero = vec![Vec::new(); n + 1];
        nonzero[n] = weights.iter().map(|w| *w != ZERO).collect();
        for level in (0..n).rev() {
            nonzero[level] = nonzero[level + 1]
                .chunks_exact(4)
                .map(|c| c.iter().any(|&b| b))
                .collect();
        }
        Ok(Self {
            n,
            weights,
            nonzero,
        })
    }

    #[inline]
    fn live(&self, level: usize, prefix: usize) -> bool {
        self.nonzero[level][prefix]
    }

    fn is_zero(&self) -> bool {
        !self.nonzero[0][0]
    }
}

fn mat4_combination(terms: impl Iterator<Item = (Complex64, Mat4)>) -> DenseMatrix {
    let mut acc = [[ZERO; 4]; 4];
    for (w, m) in terms {
        if w == ZERO {
            continue;
        }
        for (ar, mr) in acc.iter_mut().zip(&m) {
            for (a, x) in ar.iter_mut().zip(mr) {
                *a += w * x;
            }
        }
    }
    crate::tables::mat4_to_dense(&acc)
}

#[inline]
fn ptm_dim(remaining: usize) -> usize {
    1usize << (2 * remaining)
}

/// PTM constructors parameterized by their elementary tables. The free
/// functions of this module use the hard-coded [`TABLES`].
#[derive(Clone, Copy, Debug)]
pub struct PtmEngine<'a> {
    tables: &'a ElementaryTables,
}

impl Default for PtmEngine<'static> {
    fn default() -> Self {
        Self { tables: &TABLES }
    }
}

impl<'a> PtmEngine<'a> {
    pub fn with_tables(tables: &'a ElementaryTables) -> Self {
        Self { tables }
    }

    pub fn tables(&self) -> &ElementaryTables {
        self.tables
    }

    pub fn l_ptm(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        single_sided(a, &self.tables.left)
    }

    pub fn r_ptm(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        single_sided(a, &self.tables.right)
    }

    pub fn m_ptm(&self, a1: &DenseMatrix, a2: &DenseMatrix) -> Result<DenseMatrix> {
        if a1.rows() != a2.rows() || a1.cols() != a2.cols() {
            return Err(mismatch(format!(
                "sandwich factors are {}x{} and {}x{}",
                a1.rows(),
                a1.cols(),
                a2.rows(),
                a2.cols()
            )));
        }
        let left = CmwTree::new(a1)?;
        let right = CmwTree::new(a2)?;
        let n = left.n;
        if n == 0 {
            return Ok(DenseMatrix::scalar(left.weights[0] * right.weights[0]));
        }
        if left.is_zero() || right.is_zero() {
            return Ok(DenseMatrix::zeros(ptm_dim(n), ptm_dim(n)));
        }
        Ok(sandwich_node(&self.tables.sandwich, &left, &right, 0, 0, 0))
    }

    pub fn c_ptm(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(self
            .commutator_family(a, true, false)?
            .0
            .expect("requested"))
    }

    pub fn ac_ptm(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(self
            .commutator_family(a, false, true)?
            .1
            .expect("requested"))
    }

    /// Commutator and anticommutator PTMs from a single decomposition.
    pub fn c_ac_ptm(&self, a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
        let (c, ac) = self.commutator_family(a, true, true)?;
        Ok((c.expect("requested"), ac.expect("requested")))
    }

    fn commutator_family(
        &self,
        a: &DenseMatrix,
        want_c: bool,
        want_ac: bool,
    ) -> Result<(Option<DenseMatrix>, Option<DenseMatrix>)> {
        let tree = CmwTree::new(a)?;
        if tree.n == 0 {
            // [a, ρ] = 0 and {a, ρ} = 2aρ for a scalar a.
            let w = tree.weights[0];
            return Ok((
                want_c.then(|| DenseMatrix::scalar(ZERO)),
                want_ac.then(|| DenseMatrix::scalar(w * 2.0)),
            ));
        }
        Ok(comm_node(self.tables, &tree, 0, 0, want_c, want_ac))
    }
}

fn single_sided(a: &DenseMatrix, table: &[Mat4; 4]) -> Result<DenseMatrix> {
    let tree = CmwTree::new(a)?;
    if tree.n == 0 {
        return Ok(DenseMatrix::scalar(tree.weights[0]));
    }
    if tree.is_zero() {
        return Ok(DenseMatrix::zeros(ptm_dim(tree.n), ptm_dim(tree.n)));
    }
    Ok(single_node(table, &tree, 0, 0))
}

fn single_node(table: &[Mat4; 4], tree: &CmwTree, level: usize, prefix: usize) -> DenseMatrix {
    let remaining = tree.n - level;
    if remaining == 1 {
        return mat4_combination((0..4).map(|t| (tree.weights[4 * prefix + t], table[t])));
    }
    let children: Vec<(&Mat4, DenseMatrix)> = (0..4)
        .filter(|&t| tree.live(level + 1, 4 * prefix + t))
        .map(|t| {
            (
                &table[t],
                single_node(table, tree, level + 1, 4 * prefix + t),
            )
        })
        .collect();
    assemble(&children, remaining)
}

fn assemble(children: &[(&Mat4, DenseMatrix)], remaining: usize) -> DenseMatrix {
    let terms: Vec<(&Mat4, &DenseMatrix)> = children.iter().map(|(f, c)| (*f, c)).collect();
    kron4_sum(&terms, ptm_dim(remaining - 1))
}

fn sandwich_node(
    table: &[[Mat4; 4]; 4],
    left: &CmwTree,
    right: &CmwTree,
    level: usize,
    p1: usize,
    p2: usize,
) -> DenseMatrix {
    let remaining = left.n - level;
    if remaining == 1 {
        let terms = (0..4).flat_map(|t| {
            (0..4).map(move |u| {
                (
                    left.weights[4 * p1 + t] * right.weights[4 * p2 + u],
                    table[t][u],
                )
            })
        });
        return mat4_combination(terms);
    }
    let mut children = Vec::with_capacity(16);
    for t in 0..4 {
        let c1 = 4 * p1 + t;
        if !left.live(level + 1, c1) {
            continue;
        }
        for u in 0..4 {
            let c2 = 4 * p2 + u;
            if right.live(level + 1, c2) {
                let child = sandwich_node(table, left, right, level + 1, c1, c2);
                children.push((&table[t][u], child));
            }
        }
    }
    assemble(&children, remaining)
}

/// Returns `(C, AC)` for the CMW at (`level`, `prefix`), computing only the
/// requested halves. Uses
/// `[A, ·] = Σ_t ½[σ^t,·]⊗{W_t,·} + ½{σ^t,·}⊗[W_t,·]` and
/// `{A, ·} = Σ_t ½[σ^t,·]⊗[W_t,·] + ½{σ^t,·}⊗{W_t,·}`
/// with the ½ absorbed into the halved tables.
fn comm_node(
    tables: &ElementaryTables,
    tree: &CmwTree,
    level: usize,
    prefix: usize,
    want_c: bool,
    want_ac: bool,
) -> (Option<DenseMatrix>, Option<DenseMatrix>) {
    let remaining = tree.n - level;
    if remaining == 1 {
        let w = |t: usize| tree.weights[4 * prefix + t];
        return (
            want_c.then(|| mat4_combination((0..4).map(|t| (w(t), tables.comm[t])))),
            want_ac.then(|| mat4_combination((0..4).map(|t| (w(t), tables.acomm[t])))),
        );
    }
    let mut c_terms: Vec<(&Mat4, usize)> = Vec::new();
    let mut ac_terms: Vec<(&Mat4, usize)> = Vec::new();
    // Child results; index 2 * k holds the C and 2 * k + 1 the AC of the
    // k-th live child.
    let mut results: Vec<Option<DenseMatrix>> = Vec::new();
    let comm_is_zero = |t: usize| tables.comm_halved[t].iter().flatten().all(|x| *x == ZERO);
    for t in 0..4 {
        let child = 4 * prefix + t;
        if !tree.live(level + 1, child) {
            continue;
        }
        // With a vanishing commutator factor the parent C needs only the
        // child C and the parent AC only the child AC.
        let (need_c, need_ac) = if comm_is_zero(t) {
            (want_c, want_ac)
        } else {
            (true, true)
        };
        let (cc, cac) = comm_node(tables, tree, level + 1, child, need_c, need_ac);
        let (ic, iac) = (results.len(), results.len() + 1);
        let ch = &tables.comm_halved[t];
        let ah = &tables.acomm_halved[t];
        if want_c {
            if cac.is_some() && !comm_is_zero(t) {
                c_terms.push((ch, iac));
            }
            if cc.is_some() {
                c_terms.push((ah, ic));
            }
        }
        if want_ac {
            if cc.is_some() && !comm_is_zero(t) {
                ac_terms.push((ch, ic));
            }
            if cac.is_some() {
                ac_terms.push((ah, iac));
            }
        }
        results.push(cc);
        results.push(cac);
    }
    let build = |terms: &[(&Mat4, usize)]| {
        let refs: Vec<(&Mat4, &DenseMatrix)> = terms
            .iter()
            .map(|&(f, i)| (f, results[i].as_ref().expect("computed")))
            .collect();
        kron4_sum(&refs, ptm_dim(remaining - 1))
    };
    (
        want_c.then(|| build(&c_terms)),
        want_ac.then(|| build(&ac_terms)),
    )
}

/// PTM of `ρ ↦ Aρ`.
pub fn l_ptm(a: &DenseMatrix) -> Result<DenseMatrix> {
    PtmEngine::default().l_ptm(a)
}

/// PTM of `ρ ↦ ρA`.
pub fn r_ptm(a: &DenseMatrix) -> Result<DenseMatrix> {
    PtmEngine::default().r_ptm(a)
}

/// PTM of `ρ ↦ A₁ ρ A₂`.
pub fn m_ptm(a1: &DenseMatrix, a2: &DenseMatrix) -> Result<DenseMatrix> {
    PtmEngine::default().m_ptm(a1, a2)
}

/// PTM of `ρ ↦ [A, ρ]`.
pub fn c_ptm(a: &DenseMatrix) -> Result<DenseMatrix> {
    PtmEngine::default().c_ptm(a)
}

/// PTM of `ρ ↦ {A, ρ}`.
pub fn ac_ptm(a: &DenseMatrix) -> Result<DenseMatrix> {
    PtmEngine::default().ac_ptm(a)
}

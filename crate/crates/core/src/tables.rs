//! Elementary 4x4 PTMs of single-qubit superoperators.
//!
//! The constants are the runtime source; [`generate_tables`] recomputes every
//! entry from the brute-force oracle and is exercised by the tests.

use num_complex::Complex64;

use crate::channel::{ChannelRep, KrausPair};
use crate::error::{domain, Result};
use crate::matrix::DenseMatrix;
use crate::oracle::ptm_direct;
use crate::pauli::pauli_matrix;

pub type Mat4 = [[Complex64; 4]; 4];

const O: Complex64 = Complex64::new(0.0, 0.0);
const P: Complex64 = Complex64::new(1.0, 0.0);
const N: Complex64 = Complex64::new(-1.0, 0.0);
const J: Complex64 = Complex64::new(0.0, 1.0);
const NJ: Complex64 = Complex64::new(0.0, -1.0);
const T: Complex64 = Complex64::new(2.0, 0.0);
const TJ: Complex64 = Complex64::new(0.0, 2.0);
const NTJ: Complex64 = Complex64::new(0.0, -2.0);

const ID4: Mat4 = [[P, O, O, O], [O, P, O, O], [O, O, P, O], [O, O, O, P]];
const ZERO4: Mat4 = [[O; 4]; 4];

/// The full set of elementary tables, rows/columns in `I, X, Y, Z` order.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryTables {
    /// `ρ ↦ σ^t ρ`
    pub left: [Mat4; 4],
    /// `ρ ↦ ρ σ^t`
    pub right: [Mat4; 4],
    /// `ρ ↦ [σ^t, ρ]`
    pub comm: [Mat4; 4],
    /// `ρ ↦ {σ^t, ρ}`
    pub acomm: [Mat4; 4],
    /// `sandwich[t][u]`: `ρ ↦ σ^t ρ σ^u`
    pub sandwich: [[Mat4; 4]; 4],
    pub comm_halved: [Mat4; 4],
    pub acomm_halved: [Mat4; 4],
}

const fn halve(m: Mat4) -> Mat4 {
    let mut out = m;
    let mut r = 0;
    while r < 4 {
        let mut c = 0;
        while c < 4 {
            out[r][c] = Complex64::new(m[r][c].re * 0.5, m[r][c].im * 0.5);
            c += 1;
        }
        r += 1;
    }
    out
}

const LEFT: [Mat4; 4] = [
    ID4,
    [[O, P, O, O], [P, O, O, O], [O, O, O, NJ], [O, O, J, O]],
    [[O, O, P, O], [O, O, O, J], [P, O, O, O], [O, NJ, O, O]],
    [[O, O, O, P], [O, O, NJ, O], [O, J, O, O], [P, O, O, O]],
];

const RIGHT: [Mat4; 4] = [
    ID4,
    [[O, P, O, O], [P, O, O, O], [O, O, O, J], [O, O, NJ, O]],
    [[O, O, P, O], [O, O, O, NJ], [P, O, O, O], [O, J, O, O]],
    [[O, O, O, P], [O, O, J, O], [O, NJ, O, O], [P, O, O, O]],
];

const COMM: [Mat4; 4] = [
    ZERO4,
    [[O, O, O, O], [O, O, O, O], [O, O, O, NTJ], [O, O, TJ, O]],
    [[O, O, O, O], [O, O, O, TJ], [O, O, O, O], [O, NTJ, O, O]],
    [[O, O, O, O], [O, O, NTJ, O], [O, TJ, O, O], [O, O, O, O]],
];

const ACOMM: [Mat4; 4] = [
    [[T, O, O, O], [O, T, O, O], [O, O, T, O], [O, O, O, T]],
    [[O, T, O, O], [T, O, O, O], [O, O, O, O], [O, O, O, O]],
    [[O, O, T, O], [O, O, O, O], [T, O, O, O], [O, O, O, O]],
    [[O, O, O, T], [O, O, O, O], [O, O, O, O], [T, O, O, O]],
];

const SANDWICH: [[Mat4; 4]; 4] = [
    [
        ID4,
        [[O, P, O, O], [P, O, O, O], [O, O, O, J], [O, O, NJ, O]],
        [[O, O, P, O], [O, O, O, NJ], [P, O, O, O], [O, J, O, O]],
        [[O, O, O, P], [O, O, J, O], [O, NJ, O, O], [P, O, O, O]],
    ],
    [
        [[O, P, O, O], [P, O, O, O], [O, O, O, NJ], [O, O, J, O]],
        [[P, O, O, O], [O, P, O, O], [O, O, N, O], [O, O, O, N]],
        [[O, O, O, NJ], [O, O, P, O], [O, P, O, O], [J, O, O, O]],
        [[O, O, J, O], [O, O, O, P], [NJ, O, O, O], [O, P, O, O]],
    ],
    [
        [[O, O, P, O], [O, O, O, J], [P, O, O, O], [O, NJ, O, O]],
        [[O, O, O, J], [O, O, P, O], [O, P, O, O], [NJ, O, O, O]],
        [[P, O, O, O], [O, N, O, O], [O, O, P, O], [O, O, O, N]],
        [[O, NJ, O, O], [J, O, O, O], [O, O, O, P], [O, O, P, O]],
    ],
    [
        [[O, O, O, P], [O, O, NJ, O], [O, J, O, O], [P, O, O, O]],
        [[O, O, NJ, O], [O, O, O, P], [J, O, O, O], [O, P, O, O]],
        [[O, J, O, O], [NJ, O, O, O], [O, O, O, P], [O, O, P, O]],
        [[P, O, O, O], [O, N, O, O], [O, O, N, O], [O, O, O, P]],
    ],
];

/// Hard-coded elementary tables.
pub static TABLES: ElementaryTables = ElementaryTables {
    left: LEFT,
    right: RIGHT,
    comm: COMM,
    acomm: ACOMM,
    sandwich: SANDWICH,
    comm_halved: [
        halve(COMM[0]),
        halve(COMM[1]),
        halve(COMM[2]),
        halve(COMM[3]),
    ],
    acomm_halved: [
        halve(ACOMM[0]),
        halve(ACOMM[1]),
        halve(ACOMM[2]),
        halve(ACOMM[3]),
    ],
};

pub fn mat4_to_dense(m: &Mat4) -> DenseMatrix {
    DenseMatrix::from_rows(m.iter().map(|r| r.to_vec()).collect()).expect("4x4")
}

fn dense_to_mat4(m: &DenseMatrix) -> Mat4 {
    debug_assert_eq!((m.rows(), m.cols()), (4, 4));
    let mut out = ZERO4;
    for (r, row) in out.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = m[(r, c)];
        }
    }
    out
}

fn check_digit(t: u8) -> Result<usize> {
    if t > 3 {
        return Err(domain(format!("Pauli digit {t} is not in {{0,1,2,3}}")));
    }
    Ok(t as usize)
}

pub fn eptm_left(t: u8) -> Result<DenseMatrix> {
    Ok(mat4_to_dense(&TABLES.left[check_digit(t)?]))
}

pub fn eptm_right(t: u8) -> Result<DenseMatrix> {
    Ok(mat4_to_dense(&TABLES.right[check_digit(t)?]))
}

pub fn eptm_comm(t: u8) -> Result<DenseMatrix> {
    Ok(mat4_to_dense(&TABLES.comm[check_digit(t)?]))
}

pub fn eptm_acomm(t: u8) -> Result<DenseMatrix> {
    Ok(mat4_to_dense(&TABLES.acomm[check_digit(t)?]))
}

pub fn eptm_sandwich(t: u8, u: u8) -> Result<DenseMatrix> {
    Ok(mat4_to_dense(
        &TABLES.sandwich[check_digit(t)?][check_digit(u)?],
    ))
}

/// Recomputes every table from `ptm_direct` of the corresponding one-qubit
/// superoperator, written as a generalized Kraus sum `Σ K ρ L†`.
pub fn generate_tables() -> ElementaryTables {
    let id = DenseMatrix::identity(2);
    let sigma: Vec<DenseMatrix> = (0..4).map(|t| pauli_matrix(t).expect("digit")).collect();
    let ptm = |pairs: Vec<(DenseMatrix, DenseMatrix)>| -> Mat4 {
        let rep = ChannelRep::kraus(
            pairs
                .into_iter()
                .map(|(k, l)| KrausPair::new(k, l))
                .collect(),
        )
        .expect("valid Kraus set");
        dense_to_mat4(&ptm_direct(&rep).expect("one-qubit oracle"))
    };
    let neg = |m: &DenseMatrix| m.scale(Complex64::new(-1.0, 0.0));

    let per_digit = |f: &dyn Fn(&DenseMatrix) -> Vec<(DenseMatrix, DenseMatrix)>| -> [Mat4; 4] {
        std::array::from_fn(|t| ptm(f(&sigma[t])))
    };
    let left = per_digit(&|s| vec![(s.clone(), id.clone())]);
    let right = per_digit(&|s| vec![(id.clone(), s.adjoint())]);
    let comm = per_digit(&|s| vec![(s.clone(), id.clone()), (id.clone(), neg(&s.adjoint()))]);
    let acomm = per_digit(&|s| vec![(s.clone(), id.clone()), (id.clone(), s.adjoint())]);
    let sandwich: [[Mat4; 4]; 4] = std::array::from_fn(|t| {
        std::array::from_fn(|u| ptm(vec![(sigma[t].clone(), sigma[u].adjoint())]))
    });
    let comm_halved = comm.map(halve);
    let acomm_halved = acomm.map(halve);
    ElementaryTables {
        left,
        right,
        comm,
        acomm,
        sandwich,
        comm_halved,
        acomm_halved,
    }
}

/// Table selector used by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Left,
    Right,
    Comm,
    Acomm,
    Sandwich,
}

impl std::str::FromStr for TableKind {
    type Err = crate::error::PtmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Self::Left),
            "right" => Ok(Self::Right),
            "comm" => Ok(Self::Comm),
            "acomm" => Ok(Self::Acomm),
            "sandwich" => Ok(Self::Sandwich),
            other => Err(domain(format!(
                "unknown table `{other}` (expected left|right|comm|acomm|sandwich)"
            ))),
        }
    }
}

const NAMES: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// Named entries of one table, e.g. `("left[Z]", matrix)`.
pub fn table_entries(kind: TableKind) -> Vec<(String, DenseMatrix)> {
    let single = |label: &str, t: &[Mat4; 4]| {
        (0..4)
            .map(|i| (format!("{label}[{}]", NAMES[i]), mat4_to_dense(&t[i])))
            .collect()
    };
    match kind {
        TableKind::Left => single("left", &TABLES.left),
        TableKind::Right => single("right", &TABLES.right),
        TableKind::Comm => single("comm", &TABLES.comm),
        TableKind::Acomm => single("acomm", &TABLES.acomm),
        TableKind::Sandwich => (0..4)
            .flat_map(|t| {
                (0..4).map(move |u| {
                    (
                        format!("sandwich[{}][{}]", NAMES[t], NAMES[u]),
                        mat4_to_dense(&TABLES.sandwich[t][u]),
                    )
                })
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
        std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] - b[r][c]))
    }

    fn add(a: &Mat4, b: &Mat4) -> Mat4 {
        std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] + b[r][c]))
    }

    #[test]
    fn table_entries_from_the_printed_tables() {
        assert_eq!(
            eptm_left(3).unwrap(),
            mat4_to_dense(&[[O, O, O, P], [O, O, NJ, O], [O, J, O, O], [P, O, O, O]])
        );
        assert_eq!(
            eptm_comm(1).unwrap(),
            mat4_to_dense(&[[O, O, O, O], [O, O, O, O], [O, O, O, NTJ], [O, O, TJ, O]])
        );
        assert_eq!(eptm_acomm(0).unwrap(), DenseMatrix::identity(4).scale(T));
        assert_eq!(
            eptm_sandwich(1, 1).unwrap(),
            DenseMatrix::diagonal(&[P, P, N, N])
        );
        assert_eq!(
            eptm_sandwich(1, 2).unwrap(),
            mat4_to_dense(&[[O, O, O, NJ], [O, O, P, O], [O, P, O, O], [J, O, O, O]])
        );
        assert_eq!(eptm_sandwich(0, 0).unwrap(), DenseMatrix::identity(4));
        assert!(eptm_left(4).is_err());
        assert!(eptm_sandwich(0, 7).is_err());
    }

    #[test]
    fn structural_invariants() {
        let t = &TABLES;
        assert_eq!(t.left[0], ID4);
        assert_eq!(t.right[0], ID4);
        assert_eq!(t.comm[0], ZERO4);
        for i in 0..4 {
            assert_eq!(t.comm[i], sub(&t.left[i], &t.right[i]));
            assert_eq!(t.acomm[i], add(&t.left[i], &t.right[i]));
            assert_eq!(t.sandwich[i][0], t.left[i]);
            assert_eq!(t.sandwich[0][i], t.right[i]);
            assert_eq!(add(&t.comm_halved[i], &t.comm_halved[i]), t.comm[i]);
            assert_eq!(add(&t.acomm_halved[i], &t.acomm_halved[i]), t.acomm[i]);
        }
    }

    #[test]
    fn regenerated_tables_match_constants_exactly() {
        let generated = generate_tables();
        assert_eq!(generated, TABLES);
        for i in 0..4 {
            assert_eq!(
                generated.comm[i],
                sub(&generated.left[i], &generated.right[i])
            );
        }
    }

    #[test]
    fn entries_by_selector() {
        assert_eq!(table_entries(TableKind::Left).len(), 4);
        assert_eq!(table_entries(TableKind::Sandwich).len(), 16);
        assert!("bogus".parse::<TableKind>().is_err());
        let (name, m) = &table_entries(TableKind::Sandwich)[6];
        assert_eq!(name, "sandwich[X][Y]");
        assert_eq!(*m, eptm_sandwich(1, 2).unwrap());
    }
}

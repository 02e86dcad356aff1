//! Pauli transfer matrices (PTMs) of superoperators.
//!
//! The crate builds the PTM of left, right, sandwich, commutator and
//! anticommutator superoperators directly from a matrix `A` by a recursive
//! block algorithm over precomputed one-qubit tables, and converts the
//! canonical, Choi, Chi and (generalized) Kraus representations of a channel
//! to PTM. A slow definitional [`oracle`] backs the test suite.
//!
//! Conventions: `⟨A, B⟩ = 2^(-n) tr(A† B)`, Pauli strings are ranked
//! lexicographically with the most significant qubit first, and matrices are
//! vectorized row-major.

pub mod bench;
pub mod channel;
pub mod error;
pub mod instance;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod pauli;
pub mod superop;
pub mod tables;
pub mod verify;

pub use channel::{
    can_to_ptm, can_to_ptm_par, chi_to_choi, chi_to_ptm, choi_to_chi, choi_to_ptm, kraus_to_ptm,
    partial_expand_first, ptm_to_can, ptm_to_can_par, ChannelRep, KrausPair, RepKind,
};
pub use error::{PtmError, Result};
pub use matrix::{kron, DenseMatrix};
pub use num_complex::Complex64;
pub use pauli::{
    cmw_compose, cmw_decompose, frobenius_inner, itpd, itpd_vec, pauli_matrix, pauli_string, tpd,
    tpd_pruned, tpd_vec, CmwSet, Orientation, PauliWeights, QuaternaryString,
};
pub use superop::{ac_ptm, c_ptm, l_ptm, m_ptm, r_ptm, PtmEngine};
pub use tables::{generate_tables, ElementaryTables, TABLES};

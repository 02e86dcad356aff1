//! Slow reference semantics, written straight from the definitions.
//!
//! Nothing here calls the fast TPD or recursion kernels. The tests use
//! these functions as ground truth for the fast paths.

use num_complex::Complex64;

use crate::channel::{ChannelRep, KrausPair};
use crate::error::{domain, mismatch, PtmError, Result};
use crate::matrix::{kron, operator_qubits, DenseMatrix, I, ONE, ZERO};
use crate::pauli::{frobenius_inner, pauli_string, PauliWeights, QuaternaryString};

/// All `4^n` Pauli strings of `n` qubits in lex order.
pub fn pauli_basis(n: usize) -> Result<Vec<DenseMatrix>> {
    if n == 0 {
        return Err(domain("a Pauli basis needs at least one qubit"));
    }
    (0..1usize << (2 * n))
        .map(|r| pauli_string(&QuaternaryString::unrank(r, n)?))
        .collect()
}

fn check_state(rho: &DenseMatrix, n: usize) -> Result<()> {
    if !rho.is_square() || rho.rows() != 1 << n {
        return Err(mismatch(format!(
            "input is {}x{}, channel acts on {n} qubits",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Row-major vectorization by explicit loop.
fn vec_rows(a: &DenseMatrix) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(a.rows() * a.cols());
    for k in 0..a.rows() {
        for l in 0..a.cols() {
            v.push(a[(k, l)]);
        }
    }
    v
}

/// Applies a channel given in any non-PTM representation to `rho`.
///
/// * Can: `unvec(Can · vec(ρ))`, row-major.
/// * Choi: `Σ_{k,l} ρ_{kl} · Choi_{(k,l) block}`, since block `(k, l)` of
///   the Choi matrix is `E(E_{kl})`.
/// * Chi: `Σ_{s,t} Chi_{st} σ^s ρ σ^t`.
/// * Kraus: `Σ_i K_i ρ L_i†`.
pub fn apply_channel(rep: &ChannelRep, rho: &DenseMatrix) -> Result<DenseMatrix> {
    let n = rep.qubits();
    check_state(rho, n)?;
    let d = 1usize << n;
    match rep {
        ChannelRep::Can(can) => {
            let out = can.matvec(&vec_rows(rho))?;
            DenseMatrix::from_vec(d, d, out)
        }
        ChannelRep::Choi(choi) => {
            let mut out = DenseMatrix::zeros(d, d);
            for k in 0..d {
                for l in 0..d {
                    let c = rho[(k, l)];
                    if c != ZERO {
                        out.axpy(c, &choi.block(k * d, l * d, d))?;
                    }
                }
            }
            Ok(out)
        }
        ChannelRep::Chi(chi) => {
            let basis = pauli_basis(n)?;
            let mut out = DenseMatrix::zeros(d, d);
            for (s, sigma_s) in basis.iter().enumerate() {
                let mut right = DenseMatrix::zeros(d, d);
                for (t, sigma_t) in basis.iter().enumerate() {
                    let c = chi[(s, t)];
                    if c != ZERO {
                        right.axpy(c, sigma_t)?;
                    }
                }
                if !right.is_zero() {
                    out.axpy(ONE, &sigma_s.matmul(rho)?.matmul(&right)?)?;
                }
            }
            Ok(out)
        }
        ChannelRep::Kraus(pairs) => {
            let mut out = DenseMatrix::zeros(d, d);
            for p in pairs {
                out.axpy(ONE, &p.k.matmul(rho)?.matmul(&p.l.adjoint())?)?;
            }
            Ok(out)
        }
        ChannelRep::Ptm(_) => Err(PtmError::UnsupportedRepresentation(
            "a PTM acts on Pauli weights; use apply_ptm".into(),
        )),
    }
}

/// Applies a PTM to `rho` through its Pauli weights.
pub fn apply_ptm(ptm: &DenseMatrix, rho: &DenseMatrix) -> Result<DenseMatrix> {
    let n = crate::matrix::superop_qubits(ptm)?;
    check_state(rho, n)?;
    let w = pauli_decompose_direct(rho)?;
    let out = ptm.matvec(w.as_slice())?;
    let basis = pauli_basis(n)?;
    let mut rho_out = DenseMatrix::zeros(1 << n, 1 << n);
    for (c, sigma) in out.iter().zip(&basis) {
        rho_out.axpy(*c, sigma)?;
    }
    Ok(rho_out)
}

/// `PTM[s, t] = ⟨σ^s, E(σ^t)⟩`, evaluated entry by entry.
pub fn ptm_direct(rep: &ChannelRep) -> Result<DenseMatrix> {
    if let ChannelRep::Ptm(m) = rep {
        return Ok(m.clone());
    }
    let basis = pauli_basis(rep.qubits())?;
    let dim = basis.len();
    let mut out = DenseMatrix::zeros(dim, dim);
    for (t, sigma_t) in basis.iter().enumerate() {
        let image = apply_channel(rep, sigma_t)?;
        for (s, sigma_s) in basis.iter().enumerate() {
            out[(s, t)] = frobenius_inner(sigma_s, &image)?;
        }
    }
    Ok(out)
}

/// Pauli weights by explicit inner products.
pub fn pauli_decompose_direct(a: &DenseMatrix) -> Result<PauliWeights> {
    let n = operator_qubits(a)?;
    if n == 0 {
        return Err(domain("Pauli decomposition needs at least one qubit"));
    }
    let weights = pauli_basis(n)?
        .iter()
        .map(|sigma| frobenius_inner(sigma, a))
        .collect::<Result<Vec<_>>>()?;
    PauliWeights::new(weights)
}

/// The one-qubit transition matrix: column `t` is `vec(σ^t)`.
pub fn transition_factor() -> DenseMatrix {
    DenseMatrix::from_rows(vec![
        vec![ONE, ZERO, ZERO, ONE],
        vec![ZERO, ONE, -I, ZERO],
        vec![ZERO, ONE, I, ZERO],
        vec![ONE, ZERO, ZERO, -ONE],
    ])
    .expect("4x4")
}

/// Inverse of [`transition_factor`].
pub fn transition_factor_inverse() -> DenseMatrix {
    let h = Complex64::new(0.5, 0.0);
    let hi = Complex64::new(0.0, 0.5);
    DenseMatrix::from_rows(vec![
        vec![h, ZERO, ZERO, h],
        vec![ZERO, h, h, ZERO],
        vec![ZERO, hi, -hi, ZERO],
        vec![h, ZERO, ZERO, -h],
    ])
    .expect("4x4")
}

fn kron_power(factor: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(domain("transition matrices need n >= 1"));
    }
    let mut out = factor.clone();
    for _ in 1..n {
        out = kron(&out, factor);
    }
    Ok(out)
}

/// `B^{⊗n}`.
pub fn transition_matrix(n: usize) -> Result<DenseMatrix> {
    kron_power(&transition_factor(), n)
}

/// `(B⁻¹)^{⊗n}`.
pub fn transition_matrix_inverse(n: usize) -> Result<DenseMatrix> {
    kron_power(&transition_factor_inverse(), n)
}

/// Maps a tensor-product index of `B^{⊗n}`, whose qubit `q` digit is
/// `2 k_q + l_q`, to the row-major matrix-unit index `k · 2^n + l`.
pub fn interleave_permutation(n: usize) -> Vec<usize> {
    (0..1usize << (2 * n))
        .map(|idx| {
            let (mut k, mut l) = (0usize, 0usize);
            for q in 0..n {
                let digit = (idx >> (2 * (n - 1 - q))) & 3;
                k = (k << 1) | (digit >> 1);
                l = (l << 1) | (digit & 1);
            }
            (k << n) | l
        })
        .collect()
}

/// Transition matrix of the canonical (row-major) basis: column `t` is
/// `vec(σ^t)`. Equals `B^{⊗n}` with rows reordered by
/// [`interleave_permutation`].
pub fn canonical_transition(n: usize) -> Result<DenseMatrix> {
    let basis = pauli_basis(n)?;
    let dim = basis.len();
    let mut out = DenseMatrix::zeros(dim, dim);
    for (t, sigma) in basis.iter().enumerate() {
        out.set_column(t, &vec_rows(sigma));
    }
    Ok(out)
}

/// `B⁻¹ · Can · B` with the explicit canonical transition matrix.
pub fn ptm_by_basis_change(can: &DenseMatrix) -> Result<DenseMatrix> {
    let n = crate::matrix::superop_qubits(can)?;
    let b = canonical_transition(n)?;
    let b_inv = b
        .adjoint()
        .scale(Complex64::new(1.0 / (1u64 << n) as f64, 0.0));
    b_inv.matmul(can)?.matmul(&b)
}

/// Canonical representation, column `j` = `vec(E(E_j))`.
pub fn can_of(rep: &ChannelRep) -> Result<DenseMatrix> {
    let n = rep.qubits();
    let d = 1usize << n;
    let mut out = DenseMatrix::zeros(d * d, d * d);
    for j in 0..d * d {
        let mut unit = DenseMatrix::zeros(d, d);
        unit[(j / d, j % d)] = ONE;
        out.set_column(j, &vec_rows(&apply_channel(rep, &unit)?));
    }
    Ok(out)
}

/// `Σ_{k,l} E_{kl} ⊗ E(E_{kl})`.
pub fn choi_of(rep: &ChannelRep) -> Result<DenseMatrix> {
    let n = rep.qubits();
    let d = 1usize << n;
    let mut out = DenseMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            let mut unit = DenseMatrix::zeros(d, d);
            unit[(k, l)] = ONE;
            out.set_block(k * d, l * d, &apply_channel(rep, &unit)?);
        }
    }
    Ok(out)
}

/// Chi matrix of a generalized Kraus set: with `K = Σ a_s σ^s` and
/// `L = Σ b_t σ^t`, the term `K ρ L†` contributes `a_s conj(b_t)`.
pub fn chi_from_kraus(pairs: &[KrausPair]) -> Result<DenseMatrix> {
    let rep = ChannelRep::kraus(pairs.to_vec())?;
    let dim = 1usize << (2 * rep.qubits());
    let mut out = DenseMatrix::zeros(dim, dim);
    for p in pairs {
        let a = pauli_decompose_direct(&p.k)?;
        let b = pauli_decompose_direct(&p.l)?;
        for s in 0..dim {
            for t in 0..dim {
                out[(s, t)] += a.as_slice()[s] * b.as_slice()[t].conj();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli_matrix;

    #[test]
    fn kraus_x_flips_z() {
        let x = pauli_matrix(1).unwrap();
        let rep = ChannelRep::kraus(vec![KrausPair::single(x)]).unwrap();
        let z = pauli_matrix(3).unwrap();
        assert_eq!(apply_channel(&rep, &z).unwrap(), z.scale(-ONE));
    }

    #[test]
    fn identity_channels() {
        let rho = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let can = ChannelRep::can(DenseMatrix::identity(4)).unwrap();
        assert_eq!(apply_channel(&can, &rho).unwrap(), rho);
        let mut chi = DenseMatrix::zeros(4, 4);
        chi[(0, 0)] = ONE;
        let chi = ChannelRep::chi(chi).unwrap();
        assert_eq!(apply_channel(&chi, &rho).unwrap(), rho);
        assert_eq!(ptm_direct(&chi).unwrap(), DenseMatrix::identity(4));
    }

    #[test]
    fn ptm_tag_is_rejected() {
        let rep = ChannelRep::ptm(DenseMatrix::identity(4)).unwrap();
        let err = apply_channel(&rep, &DenseMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, PtmError::UnsupportedRepresentation(_)));
        assert_eq!(
            apply_ptm(&DenseMatrix::identity(4), &pauli_matrix(2).unwrap()).unwrap(),
            pauli_matrix(2).unwrap()
        );
    }

    #[test]
    fn z_conjugation_ptm() {
        let z = pauli_matrix(3).unwrap();
        let rep = ChannelRep::kraus(vec![KrausPair::single(z)]).unwrap();
        let expect = DenseMatrix::diagonal(&[ONE, -ONE, -ONE, ONE]);
        assert_eq!(ptm_direct(&rep).unwrap(), expect);
    }

    #[test]
    fn direct_decomposition_examples() {
        let y = pauli_decompose_direct(&pauli_matrix(2).unwrap()).unwrap();
        assert_eq!(y.as_slice(), &[ZERO, ZERO, ONE, ZERO]);
        let a = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let w = pauli_decompose_direct(&a).unwrap();
        let expect = [
            Complex64::new(2.5, 0.0),
            Complex64::new(2.5, 0.0),
            Complex64::new(0.0, -0.5),
            Complex64::new(-1.5, 0.0),
        ];
        assert_eq!(w.as_slice(), &expect);
    }

    #[test]
    fn transition_matrices() {
        let b = transition_factor();
        let b_inv = transition_factor_inverse();
        assert_eq!(b.matmul(&b_inv).unwrap(), DenseMatrix::identity(4));
        assert_eq!(b_inv.matmul(&b).unwrap(), DenseMatrix::identity(4));
        assert_eq!(b_inv, b.adjoint().scale(Complex64::new(0.5, 0.0)));
        assert_eq!(
            transition_matrix(1).unwrap(),
            canonical_transition(1).unwrap()
        );
        for n in 1..=3 {
            let bn = transition_matrix(n).unwrap();
            let inv = transition_matrix_inverse(n).unwrap();
            assert_eq!(bn.matmul(&inv).unwrap(), DenseMatrix::identity(bn.rows()));
            let full = canonical_transition(n).unwrap();
            let perm = interleave_permutation(n);
            for (tensor_row, &canonical_row) in perm.iter().enumerate() {
                assert_eq!(bn.row(tensor_row), full.row(canonical_row));
            }
        }
        assert!(transition_matrix(0).is_err());
    }

    #[test]
    fn kron_power_columns_need_the_permutation() {
        // At n = 2 the plain Kronecker power does not list vec(σ^t) in the
        // row-major canonical order; the interleave permutation fixes that.
        assert_ne!(
            transition_matrix(2).unwrap(),
            canonical_transition(2).unwrap()
        );
    }

    #[test]
    fn builders_agree_with_application() {
        let x = pauli_matrix(1).unwrap();
        let y = pauli_matrix(2).unwrap();
        let pairs = vec![KrausPair::new(x.clone(), y.clone()), KrausPair::single(y)];
        let rep = ChannelRep::kraus(pairs.clone()).unwrap();
        let direct = ptm_direct(&rep).unwrap();
        for other in [
            ChannelRep::can(can_of(&rep).unwrap()).unwrap(),
            ChannelRep::choi(choi_of(&rep).unwrap()).unwrap(),
            ChannelRep::chi(chi_from_kraus(&pairs).unwrap()).unwrap(),
        ] {
            assert!(ptm_direct(&other).unwrap().max_abs_diff(&direct) < 1e-14);
        }
        let can = can_of(&rep).unwrap();
        assert!(ptm_by_basis_change(&can).unwrap().max_abs_diff(&direct) < 1e-14);
    }
}

//! Seeded random instances for tests and benchmarks.
//!
//! The generator is ChaCha8 seeded from a `u64`. Every entry has real and
//! imaginary parts drawn uniformly from `[-1, 1]`. Diagonal instances draw
//! only the diagonal and leave every other entry exactly zero. Instances are
//! not required to be quantum channels.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::KrausPair;
use crate::error::{domain, PtmError, Result};
use crate::matrix::{DenseMatrix, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Dense,
    Diagonal,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Dense => "dense",
            InstanceKind::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = PtmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(InstanceKind::Dense),
            "diagonal" => Ok(InstanceKind::Diagonal),
            other => Err(domain(format!("unknown instance kind `{other}`"))),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn entry(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// A `dim x dim` random matrix drawn from `rng`.
pub fn random_matrix(kind: InstanceKind, dim: usize, rng: &mut impl Rng) -> DenseMatrix {
    match kind {
        InstanceKind::Dense => {
            let data = (0..dim * dim).map(|_| entry(rng)).collect();
            DenseMatrix::from_vec(dim, dim, data).expect("square")
        }
        InstanceKind::Diagonal => {
            let diag: Vec<Complex64> = (0..dim).map(|_| entry(rng)).collect();
            DenseMatrix::diagonal(&diag)
        }
    }
}

/// A random `2^n x 2^n` operator.
pub fn gen_instance(kind: InstanceKind, n: usize, seed: u64) -> DenseMatrix {
    random_matrix(kind, 1 << n, &mut rng(seed))
}

/// A random `4^n x 4^n` superoperator-sized matrix.
pub fn gen_superop(kind: InstanceKind, n: usize, seed: u64) -> DenseMatrix {
    random_matrix(kind, 1 << (2 * n), &mut rng(seed))
}

/// `m` ordinary Kraus operators (`L = K`).
pub fn gen_kraus(kind: InstanceKind, n: usize, m: usize, seed: u64) -> Vec<KrausPair> {
    let mut r = rng(seed);
    (0..m)
        .map(|_| KrausPair::single(random_matrix(kind, 1 << n, &mut r)))
        .collect()
}

/// `m` generalized pairs with independent `K` and `L`.
pub fn gen_generalized_kraus(kind: InstanceKind, n: usize, m: usize, seed: u64) -> Vec<KrausPair> {
    let mut r = rng(seed);
    (0..m)
        .map(|_| {
            let k = random_matrix(kind, 1 << n, &mut r);
            let l = random_matrix(kind, 1 << n, &mut r);
            KrausPair::new(k, l)
        })
        .collect()
}

/// A random `2^n x 2^n` unitary: Gram-Schmidt on the columns of a dense
/// random matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let dim = 1usize << n;
    loop {
        let a = random_matrix(InstanceKind::Dense, dim, rng);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        let mut degenerate = false;
        for c in 0..dim {
            let mut v = a.column(c);
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                degenerate = true;
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        if degenerate {
            continue;
        }
        let mut u = DenseMatrix::zeros(dim, dim);
        for (c, v) in cols.iter().enumerate() {
            u.set_column(c, v);
        }
        return u;
    }
}

/// A Kraus channel `ρ ↦ Σ_i p_i U_i ρ U_i†` with random unitaries and
/// random probabilities summing to one.
pub fn random_unitary_mixture(n: usize, m: usize, seed: u64) -> Vec<KrausPair> {
    let mut r = rng(seed);
    let weights: Vec<f64> = (0..m).map(|_| r.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights
        .iter()
        .map(|w| {
            let u = random_unitary(n, &mut r);
            KrausPair::single(u.scale(Complex64::new((w / total).sqrt(), 0.0)))
        })
        .collect()
}

/// True when every off-diagonal entry is exactly zero.
pub fn is_diagonal(m: &DenseMatrix) -> bool {
    (0..m.rows()).all(|r| (0..m.cols()).all(|c| r == c || m[(r, c)] == ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;

    #[test]
    fn deterministic_for_fixed_seed() {
        assert_eq!(
            gen_instance(InstanceKind::Dense, 3, 7),
            gen_instance(InstanceKind::Dense, 3, 7)
        );
        assert_ne!(
            gen_instance(InstanceKind::Dense, 3, 7),
            gen_instance(InstanceKind::Dense, 3, 8)
        );
    }

    #[test]
    fn diagonal_has_exact_zeros() {
        let m = gen_instance(InstanceKind::Diagonal, 2, 11);
        assert!(is_diagonal(&m));
        assert!((0..4).all(|i| m[(i, i)] != ZERO));
    }

    #[test]
    fn entries_in_range() {
        let m = gen_superop(InstanceKind::Dense, 2, 3);
        assert!(m
            .as_slice()
            .iter()
            .all(|x| x.re.abs() <= 1.0 && x.im.abs() <= 1.0));
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(3, &mut rng(5));
        let prod = u.adjoint().matmul(&u).unwrap();
        assert!(prod.max_abs_diff(&DenseMatrix::identity(8)) < 1e-12);
    }

    #[test]
    fn unitary_mixture_is_trace_preserving() {
        let pairs = random_unitary_mixture(2, 3, 9);
        let mut sum = DenseMatrix::zeros(4, 4);
        for p in &pairs {
            sum.axpy(ONE, &p.k.adjoint().matmul(&p.k).unwrap()).unwrap();
        }
        assert!(sum.max_abs_diff(&DenseMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "diagonal".parse::<InstanceKind>().unwrap(),
            InstanceKind::Diagonal
        );
        assert!("sparse".parse::<InstanceKind>().is_err());
        assert_eq!(InstanceKind::Dense.to_string(), "dense");
    }
}

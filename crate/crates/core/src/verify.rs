//! Oracle-equivalence checks shared by the CLI `verify` command and tests.

use num_complex::Complex64;

use crate::bench::{prepare, Algorithm, Instance};
use crate::channel::{can_to_ptm, choi_to_ptm, ChannelRep, KrausPair};
use crate::error::{domain, Result};
use crate::instance::{gen_generalized_kraus, InstanceKind};
use crate::matrix::DenseMatrix;
use crate::oracle::ptm_direct;
use crate::superop::PtmEngine;

/// Generalized Kraus form of the superoperator that `alg` builds from
/// `instance`, or the matrix representation for the conversion algorithms.
pub fn oracle_rep(alg: Algorithm, instance: &Instance) -> Result<ChannelRep> {
    let id = |a: &DenseMatrix| DenseMatrix::identity(a.rows());
    let neg = |a: &DenseMatrix| a.scale(Complex64::new(-1.0, 0.0));
    match (alg, instance) {
        (Algorithm::LPtm, Instance::Operator(a)) => {
            ChannelRep::kraus(vec![KrausPair::new(a.clone(), id(a))])
        }
        (Algorithm::RPtm, Instance::Operator(a)) => {
            ChannelRep::kraus(vec![KrausPair::new(id(a), a.adjoint())])
        }
        (Algorithm::MPtm, Instance::Pair(a1, a2)) => {
            ChannelRep::kraus(vec![KrausPair::new(a1.clone(), a2.adjoint())])
        }
        (Algorithm::CPtm, Instance::Operator(a)) => ChannelRep::kraus(vec![
            KrausPair::new(a.clone(), id(a)),
            KrausPair::new(id(a), neg(&a.adjoint())),
        ]),
        (Algorithm::AcPtm, Instance::Operator(a)) => ChannelRep::kraus(vec![
            KrausPair::new(a.clone(), id(a)),
            KrausPair::new(id(a), a.adjoint()),
        ]),
        (Algorithm::CanPtm, Instance::Superop(m)) => ChannelRep::can(m.clone()),
        (Algorithm::ChoiPtm, Instance::Superop(m)) => ChannelRep::choi(m.clone()),
        (Algorithm::ChiPtm, Instance::Superop(m)) => ChannelRep::chi(m.clone()),
        (Algorithm::KrausPtm, Instance::Kraus(p)) => ChannelRep::kraus(p.clone()),
        (alg, _) => Err(domain(format!("instance does not fit algorithm `{alg}`"))),
    }
}

/// Fast PTM of `instance` with the tables of `engine`.
pub fn fast_ptm(engine: &PtmEngine, alg: Algorithm, instance: &Instance) -> Result<DenseMatrix> {
    match (alg, instance) {
        (Algorithm::LPtm, Instance::Operator(a)) => engine.l_ptm(a),
        (Algorithm::RPtm, Instance::Operator(a)) => engine.r_ptm(a),
        (Algorithm::MPtm, Instance::Pair(a1, a2)) => engine.m_ptm(a1, a2),
        (Algorithm::CPtm, Instance::Operator(a)) => engine.c_ptm(a),
        (Algorithm::AcPtm, Instance::Operator(a)) => engine.ac_ptm(a),
        (Algorithm::CanPtm, Instance::Superop(m)) => can_to_ptm(m),
        (Algorithm::ChoiPtm, Instance::Superop(m)) => choi_to_ptm(m),
        (Algorithm::ChiPtm, Instance::Superop(m)) => engine.chi_to_ptm(m),
        (Algorithm::KrausPtm, Instance::Kraus(p)) => engine.kraus_to_ptm(p),
        (alg, _) => Err(domain(format!("instance does not fit algorithm `{alg}`"))),
    }
}

/// Seeded instance for a check. Kraus checks use generalized pairs so that
/// `K != L` is exercised.
pub fn check_instance(alg: Algorithm, n: usize, seed: u64, kraus_count: usize) -> Instance {
    match alg {
        Algorithm::KrausPtm => Instance::Kraus(gen_generalized_kraus(
            InstanceKind::Dense,
            n,
            kraus_count,
            seed,
        )),
        _ => prepare(alg, InstanceKind::Dense, n, seed, kraus_count),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub algorithm: Algorithm,
    pub n: usize,
    /// Largest max-abs deviation from the oracle over all instances.
    pub max_abs_dev: f64,
}

impl CheckResult {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_abs_dev <= tolerance
    }
}

/// Compares every algorithm with [`ptm_direct`] on `count` instances with
/// seeds `seed, seed + 1, ...`.
pub fn oracle_suite(
    engine: &PtmEngine,
    n: usize,
    seed: u64,
    count: usize,
    kraus_count: usize,
) -> Result<Vec<CheckResult>> {
    Algorithm::ALL
        .iter()
        .map(|&alg| {
            let mut worst = 0.0f64;
            for i in 0..count as u64 {
                let instance = check_instance(alg, n, seed.wrapping_add(i), kraus_count);
                let expect = ptm_direct(&oracle_rep(alg, &instance)?)?;
                let got = fast_ptm(engine, alg, &instance)?;
                let dev = got.max_abs_diff(&expect);
                worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
            }
            Ok(CheckResult {
                algorithm: alg,
                n,
                max_abs_dev: worst,
            })
        })
        .collect()
}

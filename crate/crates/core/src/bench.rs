//! Timing harness: seeded instances, wall-clock repetitions, summary records.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use crate::channel::{
    can_to_ptm, can_to_ptm_par, chi_to_ptm, choi_to_ptm, kraus_to_ptm, KrausPair,
};
use crate::error::{domain, PtmError, Result};
use crate::instance::{gen_kraus, random_matrix, rng, InstanceKind};
use crate::io::TimingRecord;
use crate::matrix::DenseMatrix;
use crate::superop::{ac_ptm, c_ptm, l_ptm, m_ptm, r_ptm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    LPtm,
    RPtm,
    MPtm,
    CPtm,
    AcPtm,
    CanPtm,
    ChoiPtm,
    ChiPtm,
    KrausPtm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::LPtm,
        Algorithm::RPtm,
        Algorithm::MPtm,
        Algorithm::CPtm,
        Algorithm::AcPtm,
        Algorithm::CanPtm,
        Algorithm::ChoiPtm,
        Algorithm::ChiPtm,
        Algorithm::KrausPtm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LPtm => "l-ptm",
            Algorithm::RPtm => "r-ptm",
            Algorithm::MPtm => "m-ptm",
            Algorithm::CPtm => "c-ptm",
            Algorithm::AcPtm => "ac-ptm",
            Algorithm::CanPtm => "can-ptm",
            Algorithm::ChoiPtm => "choi-ptm",
            Algorithm::ChiPtm => "chi-ptm",
            Algorithm::KrausPtm => "kraus-ptm",
        }
    }

    /// Rough peak working set in bytes for an `n`-qubit run: the `16^n`
    /// output plus the inputs and intermediates of each algorithm.
    pub fn estimated_peak_bytes(self, n: usize, kraus_count: usize) -> u128 {
        let entry = std::mem::size_of::<num_complex::Complex64>() as u128;
        let superop = entry << (4 * n);
        let operator = entry << (2 * n);
        match self {
            Algorithm::LPtm | Algorithm::RPtm | Algorithm::CPtm | Algorithm::AcPtm => {
                superop + superop / 8 + operator * 2
            }
            Algorithm::MPtm => superop + superop / 8 + operator * 3,
            Algorithm::KrausPtm => 2 * superop + superop / 8 + operator * 2 * kraus_count as u128,
            Algorithm::ChiPtm => 2 * superop + superop / 8,
            Algorithm::ChoiPtm => 3 * superop,
            Algorithm::CanPtm => 4 * superop,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = PtmError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| domain(format!("unknown algorithm `{s}`")))
    }
}

/// Input data for one timed algorithm.
#[derive(Clone, Debug)]
pub enum Instance {
    Operator(DenseMatrix),
    Pair(DenseMatrix, DenseMatrix),
    Superop(DenseMatrix),
    Kraus(Vec<KrausPair>),
}

/// Builds the seeded input for `alg`.
pub fn prepare(
    alg: Algorithm,
    kind: InstanceKind,
    n: usize,
    seed: u64,
    kraus_count: usize,
) -> Instance {
    let mut r = rng(seed);
    match alg {
        Algorithm::LPtm | Algorithm::RPtm | Algorithm::CPtm | Algorithm::AcPtm => {
            Instance::Operator(random_matrix(kind, 1 << n, &mut r))
        }
        Algorithm::MPtm => {
            let a = random_matrix(kind, 1 << n, &mut r);
            Instance::Pair(a, random_matrix(kind, 1 << n, &mut r))
        }
        Algorithm::CanPtm | Algorithm::ChoiPtm | Algorithm::ChiPtm => {
            Instance::Superop(random_matrix(kind, 1 << (2 * n), &mut r))
        }
        Algorithm::KrausPtm => Instance::Kraus(gen_kraus(kind, n, kraus_count, seed)),
    }
}

/// Runs `alg` once on a prepared instance.
pub fn run(alg: Algorithm, instance: &Instance, parallel: bool) -> Result<DenseMatrix> {
    match (alg, instance) {
        (Algorithm::LPtm, Instance::Operator(a)) => l_ptm(a),
        (Algorithm::RPtm, Instance::Operator(a)) => r_ptm(a),
        (Algorithm::CPtm, Instance::Operator(a)) => c_ptm(a),
        (Algorithm::AcPtm, Instance::Operator(a)) => ac_ptm(a),
        (Algorithm::MPtm, Instance::Pair(a, b)) => m_ptm(a, b),
        (Algorithm::CanPtm, Instance::Superop(m)) if parallel => can_to_ptm_par(m),
        (Algorithm::CanPtm, Instance::Superop(m)) => can_to_ptm(m),
        (Algorithm::ChoiPtm, Instance::Superop(m)) => choi_to_ptm(m),
        (Algorithm::ChiPtm, Instance::Superop(m)) => chi_to_ptm(m),
        (Algorithm::KrausPtm, Instance::Kraus(p)) => kraus_to_ptm(p),
        (alg, _) => Err(domain(format!("instance does not fit algorithm `{alg}`"))),
    }
}

/// Mean and sample standard deviation (zero for a single sample).
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    let len = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / len;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0);
    (mean, var.sqrt())
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub min_qubits: usize,
    pub max_qubits: usize,
    pub instance_kind: InstanceKind,
    pub seed: u64,
    pub repetitions: usize,
    /// Number of Kraus operators for `kraus-ptm`; `None` means one per qubit.
    pub kraus_count: Option<usize>,
    /// Run once untimed before the timed repetitions.
    pub warmup: bool,
    pub parallel: bool,
    pub memory_budget_bytes: u128,
}

pub const DEFAULT_MEMORY_BUDGET: u128 = 6 << 30;
pub const MAX_BENCH_QUBITS: usize = 10;

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            min_qubits: 1,
            max_qubits: 4,
            instance_kind: InstanceKind::Dense,
            seed: 0,
            repetitions: 5,
            kraus_count: None,
            warmup: false,
            parallel: false,
            memory_budget_bytes: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_qubits < 1
            || self.max_qubits > MAX_BENCH_QUBITS
            || self.min_qubits > self.max_qubits
        {
            return Err(domain(format!(
                "qubit range {}..={} must lie within 1..={MAX_BENCH_QUBITS}",
                self.min_qubits, self.max_qubits
            )));
        }
        if self.repetitions == 0 {
            return Err(domain("repetitions must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(domain("no algorithms selected"));
        }
        if self.kraus_count == Some(0) {
            return Err(domain("kraus count must be at least 1"));
        }
        for &alg in &self.algorithms {
            for n in self.min_qubits..=self.max_qubits {
                let need = alg.estimated_peak_bytes(n, self.kraus_count_for(n));
                if need > self.memory_budget_bytes {
                    return Err(domain(format!(
                        "{alg} at n = {n} needs about {} MiB, over the {} MiB budget",
                        need >> 20,
                        self.memory_budget_bytes >> 20
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kraus_count_for(&self, n: usize) -> usize {
        self.kraus_count.unwrap_or(n)
    }
}

/// Times `config.repetitions` runs of `alg` on one seeded `n`-qubit
/// instance. Instance generation happens before the clock starts. Only the
/// per-instance settings of `config` are used; its algorithm list and qubit
/// range are ignored.
pub fn time_algorithm(config: &BenchConfig, alg: Algorithm, n: usize) -> Result<TimingRecord> {
    let (kind, seed, repetitions, parallel) = (
        config.instance_kind,
        config.seed,
        config.repetitions,
        config.parallel,
    );
    if repetitions == 0 {
        return Err(domain("repetitions must be at least 1"));
    }
    let instance = prepare(alg, kind, n, seed, config.kraus_count_for(n));
    if config.warmup {
        black_box(run(alg, &instance, parallel)?);
    }
    let mut samples = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        let out = run(alg, black_box(&instance), parallel)?;
        samples.push(start.elapsed().as_secs_f64());
        drop(black_box(out));
    }
    let (mean, std) = mean_std(&samples);
    Ok(TimingRecord {
        algorithm: alg.name().to_string(),
        n,
        instance_kind: kind,
        seed,
        repetitions,
        mean_seconds: mean.max(f64::MIN_POSITIVE),
        std_seconds: std,
    })
}

/// Runs every (algorithm, n) pair of the config, calling `progress` after
/// each record.
pub fn run_bench(
    config: &BenchConfig,
    mut progress: impl FnMut(&TimingRecord),
) -> Result<Vec<TimingRecord>> {
    config.validate()?;
    let mut out = Vec::new();
    for &alg in &config.algorithms {
        for n in config.min_qubits..=config.max_qubits {
            let rec = time_algorithm(config, alg, n)?;
            progress(&rec);
            out.push(rec);
        }
    }
    Ok(out)
}

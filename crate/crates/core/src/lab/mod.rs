//! Sweep experiments over many primes and coefficient pairs.

mod output;
pub mod verify;

pub use output::{write_records, OutputFormat, RunMetadata};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::CurveError;
use crate::dynamics::{check_precondition, functional_graph_stats, image_size, orbit_of_zero, PolyMap};
use crate::field::{is_prime, primes_in, ParamError, MAX_MODULUS};
use crate::graphs::GraphError;
use crate::recur::mu_sequence;
use crate::scalar::{rational_to_decimal, rational_to_f64};

/// Name of the portable generator recorded in every output.
pub const GENERATOR: &str = "ChaCha8Rng";

/// Resampling attempts per requested instance before giving up on a prime.
const ATTEMPTS_PER_INSTANCE: usize = 1000;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("output error: {0}")]
    Io(String),
}

impl LabError {
    /// 1 check failure, 2 invalid configuration, 3 budget exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Check(_) => 1,
            LabError::Config(_) | LabError::Param(_) | LabError::Io(_) => 2,
            LabError::Budget(_) => 3,
        }
    }
}

impl From<CurveError> for LabError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Budget { .. } | CurveError::Graph(GraphError::Cap { .. }) => LabError::Budget(e.to_string()),
            other => LabError::Config(other.to_string()),
        }
    }
}

impl From<GraphError> for LabError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Cap { .. } => LabError::Budget(e.to_string()),
            other => LabError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientPolicy {
    /// Every `A in [1, p-1]`, `C in [0, p-1]`.
    AllPairs,
    /// `per_prime` draws from a seeded generator.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub d: u32,
    pub n: usize,
    pub p_min: u64,
    pub p_max: u64,
    pub per_prime: usize,
    pub policy: CoefficientPolicy,
    pub require_precondition: bool,
    /// Primes at or above this are expected to satisfy the depth-`N_0`
    /// image bound in [`graph_sweep`]; below it the bound is only reported.
    pub assert_threshold: Option<u64>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.d < 2 {
            return Err(LabError::Config(format!("d = {} must be at least 2", self.d)));
        }
        if self.p_min > self.p_max {
            return Err(LabError::Config(format!("empty range: {} > {}", self.p_min, self.p_max)));
        }
        if self.p_max >= MAX_MODULUS {
            return Err(LabError::Config(format!("p_max = {} must be below 2^31", self.p_max)));
        }
        if matches!(self.policy, CoefficientPolicy::Random { .. }) && self.per_prime == 0 {
            return Err(LabError::Config("per_prime must be positive for random sampling".into()));
        }
        Ok(())
    }

    pub fn metadata(&self) -> RunMetadata {
        let (seed, generator) = match self.policy {
            CoefficientPolicy::AllPairs => (None, "all-pairs".to_string()),
            CoefficientPolicy::Random { seed } => (Some(seed), GENERATOR.to_string()),
        };
        RunMetadata { seed, generator, log_base: "e".into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

/// Maps selected by a configuration, plus primes skipped for `d not | p - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSet {
    pub maps: Vec<PolyMap>,
    pub skipped_primes: Vec<u64>,
}

fn prime_rng(seed: u64, p: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Expand a configuration into concrete maps, sorted by `(p, A, C)`.
pub fn instances(cfg: &SweepConfig) -> Result<InstanceSet, LabError> {
    cfg.validate()?;
    let mut skipped_primes = Vec::new();
    let mut usable = Vec::new();
    for p in primes_in(cfg.p_min, cfg.p_max) {
        if p > 2 && (p - 1) % cfg.d as u64 == 0 {
            usable.push(p);
        } else {
            skipped_primes.push(p);
        }
    }
    let per_prime: Vec<Vec<PolyMap>> = usable
        .par_iter()
        .map(|&p| -> Result<Vec<PolyMap>, LabError> {
            let mut maps = Vec::new();
            match cfg.policy {
                CoefficientPolicy::AllPairs => {
                    for a in 1..p {
                        for c in 0..p {
                            let f = PolyMap::new(p, cfg.d, a, c)?;
                            if !cfg.require_precondition || check_precondition(&f, cfg.n) {
                                maps.push(f);
                            }
                        }
                    }
                }
                CoefficientPolicy::Random { seed } => {
                    let mut rng = prime_rng(seed, p);
                    let mut attempts = 0;
                    while maps.len() < cfg.per_prime && attempts < ATTEMPTS_PER_INSTANCE * cfg.per_prime {
                        attempts += 1;
                        let a = rng.gen_range(1..p);
                        let c = rng.gen_range(0..p);
                        let f = PolyMap::new(p, cfg.d, a, c)?;
                        if !cfg.require_precondition || check_precondition(&f, cfg.n) {
                            maps.push(f);
                        }
                    }
                }
            }
            Ok(maps)
        })
        .collect::<Result<_, _>>()?;
    let mut maps: Vec<PolyMap> = per_prime.into_iter().flatten().collect();
    maps.sort_by_key(|f| (f.p(), f.params.a, f.params.c));
    Ok(InstanceSet { maps, skipped_primes })
}

/// One image-size observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub p: u64,
    pub d: u32,
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "C")]
    pub c: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub image_size: u64,
    /// `mu_N * p` rendered as a decimal.
    pub mu_p: String,
    /// `(image_size - mu_N p) / sqrt(p)`
    pub norm_err: f64,
    pub precondition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub count: usize,
    pub mean_abs_norm_err: f64,
    pub max_abs_norm_err: f64,
    pub precondition_failure_fraction: f64,
    pub skipped_primes: Vec<u64>,
}

/// Digits after the point when rendering `mu_N p`.
pub const MU_P_DIGITS: u32 = 6;

pub fn sweep_theorem(cfg: &SweepConfig) -> Result<(Vec<SweepRecord>, SweepSummary), LabError> {
    let set = instances(cfg)?;
    let mu = mu_sequence::<BigRational>(cfg.d, cfg.n).values.pop().unwrap();
    let records: Vec<SweepRecord> = set
        .maps
        .par_iter()
        .map(|f| {
            let p = f.p();
            let image = image_size(f, cfg.n);
            let mu_p = &mu * BigRational::from_integer(BigInt::from(p));
            let diff = BigRational::from_integer(BigInt::from(image)) - &mu_p;
            SweepRecord {
                p,
                d: cfg.d,
                a: f.params.a,
                c: f.params.c,
                n: cfg.n,
                image_size: image,
                mu_p: rational_to_decimal(&mu_p, MU_P_DIGITS),
                norm_err: rational_to_f64(&diff) / (p as f64).sqrt(),
                precondition: check_precondition(f, cfg.n),
            }
        })
        .collect();
    let summary = summarize(&records, set.skipped_primes);
    Ok((records, summary))
}

fn summarize(records: &[SweepRecord], skipped_primes: Vec<u64>) -> SweepSummary {
    let count = records.len();
    if count == 0 {
        return SweepSummary {
            count,
            mean_abs_norm_err: 0.0,
            max_abs_norm_err: 0.0,
            precondition_failure_fraction: 0.0,
            skipped_primes,
        };
    }
    let abs: Vec<f64> = records.iter().map(|r| r.norm_err.abs()).collect();
    SweepSummary {
        count,
        mean_abs_norm_err: abs.iter().sum::<f64>() / count as f64,
        max_abs_norm_err: abs.iter().cloned().fold(0.0, f64::max),
        precondition_failure_fraction: records.iter().filter(|r| !r.precondition).count() as f64 / count as f64,
        skipped_primes,
    }
}

/// Orbit-of-zero collision data for one map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionRecord {
    pub p: u64,
    pub d: u32,
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "C")]
    pub c: u64,
    pub tail_len: u64,
    pub cycle_len: u64,
    pub collision_index: u64,
    /// `collision_index * ln ln p / p`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    /// Nearest-rank quantiles; `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |q: f64| v[((q * (v.len() - 1) as f64).round()) as usize];
        Some(Quantiles { min: v[0], q25: at(0.25), median: at(0.5), q75: at(0.75), max: v[v.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionSummary {
    pub count: usize,
    pub ratio: Option<Quantiles>,
    pub skipped_primes: Vec<u64>,
}

pub fn ln_ln(p: u64) -> f64 {
    (p as f64).ln().ln()
}

pub fn collision_stats(cfg: &SweepConfig) -> Result<(Vec<CollisionRecord>, CollisionSummary), LabError> {
    let set = instances(cfg)?;
    let records: Vec<CollisionRecord> = set
        .maps
        .par_iter()
        .map(|f| {
            let orbit = orbit_of_zero(f);
            let p = f.p();
            CollisionRecord {
                p,
                d: f.d(),
                a: f.params.a,
                c: f.params.c,
                tail_len: orbit.tail_len,
                cycle_len: orbit.cycle_len,
                collision_index: orbit.collision_index(),
                ratio: orbit.collision_index() as f64 * ln_ln(p) / p as f64,
            }
        })
        .collect();
    let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    let summary = CollisionSummary { count: records.len(), ratio: Quantiles::of(&ratios), skipped_primes: set.skipped_primes };
    Ok((records, summary))
}

/// Functional-graph statistics for one map alongside the cycle-sum bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub p: u64,
    pub d: u32,
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "C")]
    pub c: u64,
    pub num_cycles: u64,
    pub sum_cycle_lengths: u64,
    pub sum_precyclic: u64,
    pub max_tail: u64,
    /// `21 p ln d / ln ln p`
    pub cycle_bound: f64,
    /// `28 p ln d / ln ln p`
    pub precyclic_bound: f64,
    pub cycle_within: bool,
    pub precyclic_within: bool,
    /// `floor(ln ln p / (7 ln d)) + 1`
    pub n0: usize,
    pub image_at_n0: u64,
    /// `(2/(d-1) + 1) p / N_0`
    pub n0_image_bound: f64,
    pub n0_image_within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSweepSummary {
    pub count: usize,
    pub cycle_bound_failures: usize,
    pub precyclic_bound_failures: usize,
    pub n0_image_failures: usize,
    /// Failures of the depth-`N_0` bound at primes at or above the threshold.
    pub asserted_failures: usize,
    pub skipped_primes: Vec<u64>,
}

pub fn depth_n0(p: u64, d: u32) -> usize {
    (ln_ln(p) / (7.0 * (d as f64).ln())).floor().max(0.0) as usize + 1
}

pub fn graph_sweep(cfg: &SweepConfig) -> Result<(Vec<GraphRecord>, GraphSweepSummary), LabError> {
    let set = instances(cfg)?;
    let records: Vec<GraphRecord> = set
        .maps
        .par_iter()
        .map(|f| {
            let p = f.p();
            let d = f.d();
            let stats = functional_graph_stats(f);
            let scale = p as f64 * (d as f64).ln() / ln_ln(p);
            let n0 = depth_n0(p, d);
            let image_at_n0 = image_size(f, n0);
            let n0_image_bound = (2.0 / (d as f64 - 1.0) + 1.0) * p as f64 / n0 as f64;
            GraphRecord {
                p,
                d,
                a: f.params.a,
                c: f.params.c,
                num_cycles: stats.num_cycles,
                sum_cycle_lengths: stats.sum_cycle_lengths,
                sum_precyclic: stats.sum_precyclic_path_lengths,
                max_tail: stats.max_tail,
                cycle_bound: 21.0 * scale,
                precyclic_bound: 28.0 * scale,
                cycle_within: stats.sum_cycle_lengths as f64 <= 21.0 * scale,
                precyclic_within: stats.sum_precyclic_path_lengths as f64 <= 28.0 * scale,
                n0,
                image_at_n0,
                n0_image_bound,
                n0_image_within: (image_at_n0 as f64) < n0_image_bound,
            }
        })
        .collect();
    let threshold = cfg.assert_threshold.unwrap_or(u64::MAX);
    let summary = GraphSweepSummary {
        count: records.len(),
        cycle_bound_failures: records.iter().filter(|r| !r.cycle_within).count(),
        precyclic_bound_failures: records.iter().filter(|r| !r.precyclic_within).count(),
        n0_image_failures: records.iter().filter(|r| !r.n0_image_within).count(),
        asserted_failures: records.iter().filter(|r| r.p >= threshold && !r.n0_image_within).count(),
        skipped_primes: set.skipped_primes,
    };
    Ok((records, summary))
}

/// `true` iff `p` is an admissible modulus for degree `d`.
pub fn admissible(p: u64, d: u32) -> bool {
    is_prime(p) && p > 2 && d >= 2 && (p - 1) % d as u64 == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: u32, n: usize, lo: u64, hi: u64, policy: CoefficientPolicy) -> SweepConfig {
        SweepConfig {
            d,
            n,
            p_min: lo,
            p_max: hi,
            per_prime: 5,
            policy,
            require_precondition: false,
            assert_threshold: None,
        }
    }

    #[test]
    fn n1_error_is_closed_form() {
        let (records, summary) = sweep_theorem(&cfg(2, 1, 2, 60, CoefficientPolicy::AllPairs)).unwrap();
        assert!(!records.is_empty());
        let mut expected_sum = 0.0;
        for r in &records {
            let expect = 1.0 / (2.0 * (r.p as f64).sqrt());
            assert!((r.norm_err - expect).abs() < 1e-12);
            expected_sum += expect;
        }
        assert!((summary.mean_abs_norm_err - expected_sum / records.len() as f64).abs() < 1e-12);
        assert_eq!(summary.skipped_primes, vec![2]);
    }

    #[test]
    fn small_theorem_record() {
        let (records, _) = sweep_theorem(&cfg(2, 2, 5, 5, CoefficientPolicy::AllPairs)).unwrap();
        let r = records.iter().find(|r| r.a == 1 && r.c == 1).unwrap();
        assert_eq!(r.image_size, 3);
        assert_eq!(r.mu_p, "1.875000");
        assert!((r.norm_err - (3.0 - 1.875) / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_range() {
        let (records, summary) = sweep_theorem(&cfg(2, 1, 24, 28, CoefficientPolicy::AllPairs)).unwrap();
        assert!(records.is_empty());
        assert_eq!(summary.count, 0);
        assert!(sweep_theorem(&cfg(2, 1, 30, 10, CoefficientPolicy::AllPairs)).is_err());
    }

    #[test]
    fn non_dividing_primes_skipped() {
        let set = instances(&cfg(3, 1, 5, 20, CoefficientPolicy::Random { seed: 1 })).unwrap();
        assert_eq!(set.skipped_primes, vec![5, 11, 17]);
        assert!(set.maps.iter().all(|f| (f.p() - 1) % 3 == 0));
    }

    #[test]
    fn random_policy_reproducible_and_precondition_respected() {
        let mut c = cfg(2, 3, 100, 300, CoefficientPolicy::Random { seed: 7 });
        c.require_precondition = true;
        let a = sweep_theorem(&c).unwrap();
        let b = sweep_theorem(&c).unwrap();
        assert_eq!(a, b);
        assert!(a.0.iter().all(|r| r.precondition));
        assert_eq!(a.1.precondition_failure_fraction, 0.0);
        assert_eq!(a.0.len(), 5 * primes_in(100, 300).len());
    }

    #[test]
    fn collision_examples() {
        let (records, summary) = collision_stats(&cfg(2, 1, 5, 7, CoefficientPolicy::AllPairs)).unwrap();
        let find = |p, a, c| records.iter().find(|r| r.p == p && r.a == a && r.c == c).unwrap();
        assert_eq!(find(5, 1, 1).collision_index, 3);
        assert_eq!(find(7, 1, 1).collision_index, 4);
        assert!(records.iter().all(|r| r.collision_index <= r.p));
        assert_eq!(summary.count, records.len());
    }

    #[test]
    fn graph_sweep_examples() {
        let (records, summary) = graph_sweep(&cfg(2, 1, 5, 5, CoefficientPolicy::AllPairs)).unwrap();
        let r = records.iter().find(|r| r.a == 1 && r.c == 1).unwrap();
        assert_eq!(r.sum_cycle_lengths, 3);
        assert!(records.iter().all(|r| r.sum_cycle_lengths <= r.p));
        assert_eq!(summary.asserted_failures, 0);
        assert_eq!(depth_n0(5, 2), 1);
    }

    #[test]
    fn quantiles() {
        let q = Quantiles::of(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!((q.min, q.q25, q.median, q.q75, q.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        assert!(Quantiles::of(&[]).is_none());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(LabError::Check("x".into()).exit_code(), 1);
        assert_eq!(LabError::Config("x".into()).exit_code(), 2);
        assert_eq!(LabError::Budget("x".into()).exit_code(), 3);
        let e: LabError = CurveError::Budget { p: 1000, k: 2 }.into();
        assert_eq!(e.exit_code(), 3);
    }
}

//! Direct iteration of `f(X) = A X^d + C` over the whole of `F_p`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{mul_mod, pow_mod, FieldParams, ParamError};
use crate::scalar::Scalar;

/// Largest `d^N` for which the zero-indicator polynomial is expanded.
pub const Q_EXPANSION_CAP: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("d^N = {0} exceeds the expansion cap {Q_EXPANSION_CAP}")]
    ExpansionCap(u64),
}

/// The map `x -> A x^d + C` on `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyMap {
    pub params: FieldParams,
}

impl PolyMap {
    pub fn new(p: u64, d: u32, a: u64, c: u64) -> Result<Self, ParamError> {
        FieldParams::new(p, d, a, c).map(|params| Self { params })
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn d(&self) -> u32 {
        self.params.d
    }

    pub fn gamma(&self) -> u64 {
        self.params.gamma
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        let FieldParams { p, d, a, c, .. } = self.params;
        (mul_mod(a, pow_mod(x, d as u64, p), p) + c) % p
    }

    /// `f^{N}(x)` by repeated evaluation.
    pub fn iterate(&self, x: u64, n: usize) -> u64 {
        (0..n).fold(x, |y, _| self.eval(y))
    }

    /// The iterates `0, f(0), ..., f^{n}(0)`.
    pub fn orbit_prefix(&self, n: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut x = 0;
        out.push(x);
        for _ in 0..n {
            x = self.eval(x);
            out.push(x);
        }
        out
    }
}

/// Tail and period of the forward orbit of 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub tail_len: u64,
    pub cycle_len: u64,
}

impl OrbitSummary {
    /// Smallest `j` such that `f^{j}(0)` repeats an earlier iterate.
    pub fn collision_index(&self) -> u64 {
        self.tail_len + self.cycle_len
    }
}

/// Table `m -> rho_N(m)`, the number of `x` with `f^{N}(x) = m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageDistribution {
    pub depth: usize,
    pub counts: Vec<u64>,
}

impl PreimageDistribution {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn zero_count(&self) -> u64 {
        self.counts.iter().filter(|&&c| c == 0).count() as u64
    }
}

/// Cycle structure of the functional graph `x -> f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_cycles: u64,
    pub sum_cycle_lengths: u64,
    /// Sum over in-degree-zero vertices of the distance to the first cyclic vertex.
    pub sum_precyclic_path_lengths: u64,
    pub max_tail: u64,
}

pub fn eval_map(f: &PolyMap, x: u64) -> u64 {
    f.eval(x)
}

/// Entry `x` holds `f^{N}(x)`; computed as `N` full-domain passes.
pub fn apply_map_to_domain(f: &PolyMap, n: usize) -> Vec<u32> {
    let p = f.p();
    // one table lookup per level instead of a pow per point
    let step: Vec<u32> = (0..p).map(|x| f.eval(x) as u32).collect();
    let mut cur: Vec<u32> = (0..p as u32).collect();
    for _ in 0..n {
        for v in cur.iter_mut() {
            *v = step[*v as usize];
        }
    }
    cur
}

pub fn image_size(f: &PolyMap, n: usize) -> u64 {
    let values = apply_map_to_domain(f, n);
    let mut seen = vec![false; f.p() as usize];
    let mut count = 0;
    for v in values {
        if !std::mem::replace(&mut seen[v as usize], true) {
            count += 1;
        }
    }
    count
}

/// Tail and period of `0, f(0), f^2(0), ...` via Brent's teleporting
/// tortoise, followed by an exact tail scan. Constant memory.
pub fn orbit_of_zero(f: &PolyMap) -> OrbitSummary {
    let step = |x: u64| f.eval(x);
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = 0u64;
    let mut hare = step(0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = step(hare);
        lam += 1;
    }
    let mut mu = 0u64;
    tortoise = 0;
    hare = (0..lam).fold(0, |x, _| step(x));
    while tortoise != hare {
        tortoise = step(tortoise);
        hare = step(hare);
        mu += 1;
    }
    OrbitSummary { tail_len: mu, cycle_len: lam }
}

/// True iff `f^{i}(0) != f^{j}(0)` for all `0 <= i < j <= N`.
pub fn check_precondition(f: &PolyMap, n: usize) -> bool {
    (n as u64) < orbit_of_zero(f).collision_index()
}

pub fn preimage_distribution(f: &PolyMap, n: usize) -> PreimageDistribution {
    let mut counts = vec![0u64; f.p() as usize];
    for v in apply_map_to_domain(f, n) {
        counts[v as usize] += 1;
    }
    PreimageDistribution { depth: n, counts }
}

/// `W(N, k) = sum_m rho_N(m)^k`, with `0^0 = 1` so `W(N, 0) = p`.
pub fn moment_w(f: &PolyMap, n: usize, k: u32) -> BigUint {
    moment_from_distribution(&preimage_distribution(f, n), k)
}

pub fn moment_from_distribution(dist: &PreimageDistribution, k: u32) -> BigUint {
    // group equal counts: rho takes at most d^N + 1 distinct values
    let mut hist = std::collections::BTreeMap::<u64, u64>::new();
    for &c in &dist.counts {
        *hist.entry(c).or_default() += 1;
    }
    hist.into_iter()
        .map(|(rho, mult)| num_traits::pow(BigUint::from(rho), k as usize) * BigUint::from(mult))
        .sum()
}

/// Coefficients of `Q(T) = (1/D!) prod_{j=1}^{D} (j - T)` with `D = d^N`,
/// lowest degree first.
pub fn q_coeffs<T: Scalar>(d: u32, n: usize) -> Result<Vec<T>, DynamicsError> {
    let big_d = checked_power(d as u64, n).filter(|&v| v <= Q_EXPANSION_CAP);
    let big_d = match big_d {
        Some(v) => v,
        None => return Err(DynamicsError::ExpansionCap(checked_power(d as u64, n).unwrap_or(u64::MAX))),
    };
    let mut coeffs = vec![T::one()];
    for j in 1..=big_d {
        // multiply by (j - T) / j
        let jj = T::from_int(j as i64);
        let mut next = vec![T::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] = next[i].clone() + c.clone();
            next[i + 1] = next[i + 1].clone() - c.clone() / jj.clone();
        }
        coeffs = next;
    }
    Ok(coeffs)
}

pub(crate) fn checked_power(base: u64, exp: usize) -> Option<u64> {
    (0..exp).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

/// Both sides of the zero-count identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroCountIdentity {
    pub direct: u64,
    pub via_q: BigRational,
}

impl ZeroCountIdentity {
    pub fn holds(&self) -> bool {
        self.via_q.is_integer() && self.via_q.to_integer() == BigInt::from(self.direct)
    }
}

/// Integer coefficients of `prod_{j=1}^{D} (j - T)`, lowest degree first.
fn product_coeffs(big_d: u64) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::from(1)];
    for j in 1..=big_d {
        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c * BigInt::from(j);
            next[i + 1] -= c;
        }
        coeffs = next;
    }
    coeffs
}

/// `#{m : rho_N(m) = 0}` counted directly and as `sum_k C_{N,k} W(N,k)`.
pub fn zero_count_identity(f: &PolyMap, n: usize) -> Result<ZeroCountIdentity, DynamicsError> {
    let big_d = match checked_power(f.d() as u64, n) {
        Some(v) if v <= Q_EXPANSION_CAP => v,
        other => return Err(DynamicsError::ExpansionCap(other.unwrap_or(u64::MAX))),
    };
    let dist = preimage_distribution(f, n);
    let mut hist = std::collections::BTreeMap::<u64, u64>::new();
    for &c in &dist.counts {
        *hist.entry(c).or_default() += 1;
    }
    // sum over the D! numerators, one division at the end
    let numerator: BigInt = product_coeffs(big_d)
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let w: BigInt = hist
                .iter()
                .map(|(&rho, &mult)| num_traits::pow(BigInt::from(rho), k) * BigInt::from(mult))
                .sum();
            c * w
        })
        .sum();
    let factorial: BigInt = (1..=big_d).map(BigInt::from).product();
    Ok(ZeroCountIdentity { direct: dist.zero_count(), via_q: BigRational::new(numerator, factorial) })
}

/// Decompose the functional graph into cycles and the trees hanging off them.
pub fn functional_graph_stats(f: &PolyMap) -> GraphStats {
    let next: Vec<u32> = (0..f.p()).map(|x| f.eval(x) as u32).collect();
    functional_graph_stats_of(&next)
}

/// Same as [`functional_graph_stats`] for an arbitrary successor table.
pub fn functional_graph_stats_of(next: &[u32]) -> GraphStats {
    let n = next.len();
    // 0 = unvisited, 1 = on current walk, 2 = done
    let mut state = vec![0u8; n];
    let mut cyclic = vec![false; n];
    let mut num_cycles = 0;
    let mut sum_cycle_lengths = 0;
    let mut walk = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        walk.clear();
        let mut x = start;
        while state[x] == 0 {
            state[x] = 1;
            walk.push(x);
            x = next[x] as usize;
        }
        if state[x] == 1 {
            // closed a new cycle at x
            num_cycles += 1;
            let mut y = x;
            loop {
                cyclic[y] = true;
                sum_cycle_lengths += 1;
                y = next[y] as usize;
                if y == x {
                    break;
                }
            }
        }
        for &v in &walk {
            state[v] = 2;
        }
    }

    // distance to the first cyclic vertex, filled lazily along each walk
    let mut depth: Vec<Option<u64>> = cyclic.iter().map(|&c| c.then_some(0)).collect();
    let mut indegree = vec![0u32; n];
    for &y in next {
        indegree[y as usize] += 1;
    }
    let mut sum_pre = 0;
    let mut max_tail = 0;
    for v in 0..n {
        if indegree[v] != 0 {
            continue;
        }
        walk.clear();
        let mut x = v;
        while depth[x].is_none() {
            walk.push(x);
            x = next[x] as usize;
        }
        let mut dd = depth[x].unwrap();
        for &w in walk.iter().rev() {
            dd += 1;
            depth[w] = Some(dd);
        }
        let dv = depth[v].unwrap();
        sum_pre += dv;
        max_tail = max_tail.max(dv);
    }
    GraphStats { num_cycles, sum_cycle_lengths, sum_precyclic_path_lengths: sum_pre, max_tail }
}

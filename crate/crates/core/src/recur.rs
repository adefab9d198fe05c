//! The density recursion `mu_r`, the exponential series `E(X; r)` and the
//! graph counts `U(r, k)` it generates.
//!
//! Everything here is generic over [`Scalar`]; the exact instantiation over
//! [`BigRational`] is the one identity checks rely on.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::Scalar;

/// Largest exponent index `d^{r+1}` a coefficient table may reach.
pub const COEFF_TABLE_CAP: u64 = 1024;

/// Largest tuple size for the set-partition recursion.
pub const PARTITION_K_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecurError {
    #[error("degree {0} must be at least 2")]
    DegreeTooSmall(u32),
    #[error("level {0} is below -1")]
    LevelTooSmall(i32),
    #[error("coefficient table for d = {d}, r = {r} exceeds {COEFF_TABLE_CAP} entries")]
    TableCap { d: u32, r: i32 },
    #[error("U({r}, {k}) evaluated to the non-integer {value}")]
    NonIntegral { r: i32, k: u32, value: String },
    #[error("partition recursion needs 1 <= k <= {PARTITION_K_CAP}, got {0}")]
    PartitionCap(usize),
}

/// `mu_0, ..., mu_R` for a fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct MuSequence<T> {
    pub d: u32,
    pub values: Vec<T>,
}

impl<T: Scalar> MuSequence<T> {
    /// `q_r = 1 / mu_r`.
    pub fn reciprocals(&self) -> Vec<T> {
        self.values.iter().map(|m| T::one() / m.clone()).collect()
    }
}

/// `mu_0 = 1`, `d mu_r = 1 - (1 - mu_{r-1})^d`.
pub fn mu_sequence<T: Scalar>(d: u32, max_level: usize) -> MuSequence<T> {
    let dd = T::from_int(d as i64);
    let mut values = Vec::with_capacity(max_level + 1);
    values.push(T::one());
    for r in 1..=max_level {
        let prev: &T = &values[r - 1];
        let next = (T::one() - (T::one() - prev.clone()).powu(d)) / dd.clone();
        values.push(next);
    }
    MuSequence { d, values }
}

/// `1/mu_r >= (d-1) r / 2 + 1` for every computed level.
pub fn q_bound_holds<T: Scalar>(mu: &MuSequence<T>) -> bool {
    let half_slope = T::ratio(mu.d as i64 - 1, 2);
    mu.reciprocals()
        .iter()
        .enumerate()
        .all(|(r, q)| *q >= half_slope.clone() * T::from_int(r as i64) + T::one())
}

/// Exact check of `q_r >= (d-1) r / 2 + 1` for `0 <= r <= R`.
pub fn q_bound_check(d: u32, max_level: usize) -> bool {
    q_bound_holds(&mu_sequence::<BigRational>(d, max_level))
}

/// `q_{r+1} - q_r >= (d-1)/2` for every consecutive pair.
pub fn q_increment_holds<T: Scalar>(mu: &MuSequence<T>) -> bool {
    let half_slope = T::ratio(mu.d as i64 - 1, 2);
    mu.reciprocals().windows(2).all(|w| w[1].clone() - w[0].clone() >= half_slope)
}

/// `r -> mu_r (d-1) r / 2` for `1 <= r <= R`; tends to 1.
pub fn asymptotic_table<T: Scalar>(d: u32, max_level: usize) -> Vec<(usize, T)> {
    let mu = mu_sequence::<T>(d, max_level);
    let half_slope = T::ratio(d as i64 - 1, 2);
    mu.values
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(r, m)| (r, m * half_slope.clone() * T::from_int(r as i64)))
        .collect()
}

/// Rigorous bounds `lo[r] <= mu_r <= hi[r]`, stored as integers over
/// `2^bits`. For levels whose exact denominators are out of reach.
#[derive(Debug, Clone, PartialEq)]
pub struct MuEnclosure {
    pub d: u32,
    pub bits: u32,
    pub lo: Vec<BigUint>,
    pub hi: Vec<BigUint>,
}

impl MuEnclosure {
    /// `(lo, hi)` for level `r` as exact rationals.
    pub fn bounds(&self, r: usize) -> (BigRational, BigRational) {
        let den = BigInt::one() << self.bits;
        let to_q = |n: &BigUint| BigRational::new(BigInt::from(n.clone()), den.clone());
        (to_q(&self.lo[r]), to_q(&self.hi[r]))
    }

    /// Enclosure of `mu_r (d-1) r / 2`.
    pub fn ratio_bounds(&self, r: usize) -> (BigRational, BigRational) {
        let scale = BigRational::new(BigInt::from((self.d as u64 - 1) * r as u64), BigInt::from(2));
        let (lo, hi) = self.bounds(r);
        (lo * &scale, hi * &scale)
    }
}

/// `x^d` for `x` a fixed-point fraction over `2^bits`, rounded down or up.
fn fixed_pow(x: &BigUint, d: u32, bits: u32, round_up: bool) -> BigUint {
    let mut acc = BigUint::one() << bits;
    let mask = (BigUint::one() << bits) - BigUint::one();
    for _ in 0..d {
        let prod = &acc * x;
        let carry = !(&prod & &mask).is_zero();
        acc = prod >> bits;
        if round_up && carry {
            acc += BigUint::one();
        }
    }
    acc
}

/// Outward-rounded fixed-point evaluation of `d mu_r = 1 - (1 - mu_{r-1})^d`.
/// The step is increasing in `mu`, so rounding each end outward keeps the
/// true value inside.
pub fn mu_enclosure(d: u32, max_level: usize, bits: u32) -> MuEnclosure {
    let one = BigUint::one() << bits;
    let dd = BigUint::from(d);
    let mut lo = vec![one.clone()];
    let mut hi = vec![one.clone()];
    for r in 1..=max_level {
        let pow_up = fixed_pow(&(&one - &lo[r - 1]), d, bits, true);
        let pow_down = fixed_pow(&(&one - &hi[r - 1]), d, bits, false);
        lo.push((&one - pow_up.min(one.clone())) / &dd);
        hi.push((&one - pow_down).div_ceil(&dd));
    }
    MuEnclosure { d, bits, lo, hi }
}

/// Coefficients `v(r, m)` of `E(X; r) = sum_m v(r, m) e^{mX}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable<T> {
    pub d: u32,
    pub r: i32,
    pub v: Vec<T>,
}

impl<T: Scalar> CoeffTable<T> {
    pub fn base(d: u32) -> Self {
        CoeffTable { d, r: -1, v: vec![T::zero(), T::one()] }
    }

    /// One step of `E(X; r) = (E(X; r-1)^d + d - 1) / d`.
    pub fn next_level(&self) -> Self {
        let mut power = self.v.clone();
        for _ in 1..self.d {
            power = convolve(&power, &self.v);
        }
        let dd = T::from_int(self.d as i64);
        power[0] = power[0].clone() + T::from_int(self.d as i64 - 1);
        let v = power.into_iter().map(|x| x / dd.clone()).collect();
        CoeffTable { d: self.d, r: self.r + 1, v }
    }

    pub fn total(&self) -> T {
        self.v.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// `sum_m v(r, m) m^k` in the scalar type.
    pub fn moment(&self, k: u32) -> T {
        self.v
            .iter()
            .enumerate()
            .map(|(m, c)| {
                // m^0 = 1 including m = 0
                c.clone() * T::from_int(m as i64).powu(k)
            })
            .fold(T::zero(), |a, b| a + b)
    }
}

impl CoeffTable<BigRational> {
    /// `U(r, k)`; fails loudly if the sum is not an integer.
    pub fn u(&self, k: u32) -> Result<BigUint, RecurError> {
        let value = self.moment(k);
        match value.as_integer().and_then(|n| n.to_biguint()) {
            Some(n) => Ok(n),
            None => Err(RecurError::NonIntegral { r: self.r, k, value: value.to_string() }),
        }
    }
}

fn convolve<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
    }
    out
}

fn check_table_size(d: u32, r: i32) -> Result<(), RecurError> {
    if d < 2 {
        return Err(RecurError::DegreeTooSmall(d));
    }
    if r < -1 {
        return Err(RecurError::LevelTooSmall(r));
    }
    let exp = (r + 1) as u32;
    match (d as u64).checked_pow(exp) {
        Some(n) if n <= COEFF_TABLE_CAP => Ok(()),
        _ => Err(RecurError::TableCap { d, r }),
    }
}

/// All tables `E(X; -1), ..., E(X; r)`.
pub fn e_coeff_levels<T: Scalar>(d: u32, r: i32) -> Result<Vec<CoeffTable<T>>, RecurError> {
    check_table_size(d, r)?;
    let mut out = vec![CoeffTable::base(d)];
    for _ in -1..r {
        let next = out.last().unwrap().next_level();
        out.push(next);
    }
    Ok(out)
}

pub fn e_coeffs<T: Scalar>(d: u32, r: i32) -> Result<CoeffTable<T>, RecurError> {
    Ok(e_coeff_levels(d, r)?.pop().unwrap())
}

/// `v(r, 0)` from its own scalar recurrence `v(r,0) = (d - 1 + v(r-1,0)^d) / d`,
/// `v(-1, 0) = 0`. Entry `i` is level `i - 1`.
pub fn v_zero_sequence<T: Scalar>(d: u32, r: i32) -> Vec<T> {
    let dd = T::from_int(d as i64);
    let mut out = vec![T::zero()];
    for _ in -1..r {
        let prev = out.last().unwrap().clone();
        out.push((T::from_int(d as i64 - 1) + prev.powu(d)) / dd.clone());
    }
    out
}

/// `U(r, k)`, the number of complete proper `(r, k, d)`-graphs.
pub fn u_value(d: u32, r: i32, k: u32) -> Result<BigUint, RecurError> {
    e_coeffs::<BigRational>(d, r)?.u(k)
}

/// `U(r, k) <= C(k(k-1)/2, k-1) (r+2)^{k-1} d^{k-1}`, exactly.
pub fn u_bound_check(d: u32, r: i32, k: u32) -> Result<bool, RecurError> {
    let u = u_value(d, r, k)?;
    Ok(u <= u_tree_bound(d, r, k))
}

/// Right-hand side of the tree-count bound; `1` for `k <= 1`.
pub fn u_tree_bound(d: u32, r: i32, k: u32) -> BigUint {
    if k <= 1 {
        return BigUint::one();
    }
    let pairs = (k as u64) * (k as u64 - 1) / 2;
    binomial(pairs, k as u64 - 1)
        * num_traits::pow(BigUint::from((r + 2) as u64), k as usize - 1)
        * num_traits::pow(BigUint::from(d), k as usize - 1)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// A set partition of `{1, ..., k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Sort vertices within blocks and blocks by their least element.
    pub fn canonical(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        Partition { blocks }
    }

    /// Blocks of consecutive vertices with the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let mut next = 1;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let b: Vec<usize> = (next..next + s).collect();
                next += s;
                b
            })
            .collect();
        Partition::canonical(blocks)
    }

    pub fn t(&self) -> usize {
        self.blocks.len()
    }

    pub fn k(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// `S = s_1! s_2! ...` where `s_n` counts blocks of size `n`.
    pub fn symmetry_factor(&self) -> BigUint {
        size_multiset_symmetry(&self.sizes())
    }

    /// Number of set partitions sharing this block-size multiset:
    /// `k! / (S prod |A_i|!)`.
    pub fn class_size(&self) -> BigUint {
        class_size(&self.sizes())
    }
}

fn size_multiset_symmetry(sizes: &[usize]) -> BigUint {
    let mut counts = std::collections::BTreeMap::<usize, u64>::new();
    for &s in sizes {
        *counts.entry(s).or_default() += 1;
    }
    counts.values().map(|&c| factorial(c)).product()
}

pub fn class_size(sizes: &[usize]) -> BigUint {
    let k: usize = sizes.iter().sum();
    let denom: BigUint =
        size_multiset_symmetry(sizes) * sizes.iter().map(|&s| factorial(s as u64)).product::<BigUint>();
    let (q, rem) = factorial(k as u64).div_rem(&denom);
    debug_assert!(rem.is_zero());
    q
}

/// Integer partitions of `k` into exactly `t` positive parts, parts
/// non-increasing.
pub fn integer_partitions(k: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, parts: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // leave at least 1 for each remaining part
        let hi = max.min(rest.saturating_sub(parts - 1));
        for part in (1..=hi).rev() {
            if part * parts < rest {
                break;
            }
            cur.push(part);
            go(rest - part, parts - 1, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if t == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(k, t, k, &mut Vec::new(), &mut out);
    out
}

/// `(d-1)! / (d-t)!`, the number of ways to assign distinct nonzero twists
/// to blocks `2..t` relative to block 1.
pub fn falling_twist_count(d: u32, t: usize) -> BigUint {
    if t == 0 || t > d as usize {
        return BigUint::zero();
    }
    ((d as u64 - t as u64 + 1)..d as u64).map(BigUint::from).product()
}

/// Both sides of the set-partition recursion for `U(r, k) - U(r-1, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionRecursion {
    pub lhs: BigInt,
    pub rhs: BigUint,
}

impl PartitionRecursion {
    pub fn holds(&self) -> bool {
        self.lhs == BigInt::from(self.rhs.clone())
    }
}

/// `U(r,k) - U(r-1,k)` against the sum over block-size classes with
/// `2 <= t <= d` of `k!/(S prod|A_i|!) * (d-1)!/(d-t)! * prod U(r-1, |A_i|)`.
pub fn partition_recursion(d: u32, r: i32, k: usize) -> Result<PartitionRecursion, RecurError> {
    if k == 0 || k > PARTITION_K_CAP {
        return Err(RecurError::PartitionCap(k));
    }
    if r < 0 {
        return Err(RecurError::LevelTooSmall(r));
    }
    let levels = e_coeff_levels::<BigRational>(d, r)?;
    let current = &levels[levels.len() - 1];
    let previous = &levels[levels.len() - 2];
    let prev_u: Vec<BigUint> = (0..=k as u32).map(|m| previous.u(m)).collect::<Result<_, _>>()?;
    let lhs = BigInt::from(current.u(k as u32)?) - BigInt::from(prev_u[k].clone());
    let mut rhs = BigUint::zero();
    for t in 2..=(d as usize).min(k) {
        for sizes in integer_partitions(k, t) {
            let product: BigUint = sizes.iter().map(|&s| prev_u[s].clone()).product();
            rhs += class_size(&sizes) * falling_twist_count(d, t) * product;
        }
    }
    Ok(PartitionRecursion { lhs, rhs })
}

pub fn partition_recursion_check(d: u32, r: i32, k: usize) -> Result<bool, RecurError> {
    partition_recursion(d, r, k).map(|p| p.holds())
}

/// Largest level of the exact table reachable under the cap, for reporting.
pub fn max_table_level(d: u32) -> i32 {
    let mut r = -1;
    while (d as u64).checked_pow((r + 2) as u32).is_some_and(|n| n <= COEFF_TABLE_CAP) {
        r += 1;
    }
    r
}

/// `true` iff every entry is non-negative.
pub fn all_nonnegative<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

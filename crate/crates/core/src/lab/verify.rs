//! Cross-module consistency checks on a fixed instance matrix, with a
//! machine-readable manifest of the outcome.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::curves::{decomposition_check, intersection_check, weil_check, CurveError};
use crate::dynamics::{image_size, moment_w, preimage_distribution, zero_count_identity, PolyMap};
use crate::graphs::{
    enumerate_complete_proper, enumerate_trees, maximal_extension_with, GraphError, TripleOrder,
};
use crate::recur::{
    e_coeff_levels, mu_sequence, partition_recursion_check, q_bound_check, q_increment_holds, u_tree_bound,
    u_value, v_zero_sequence, CoeffTable, RecurError,
};

pub const MU_V_CONSISTENCY: &str = "mu-v-consistency";
pub const Q_BOUND: &str = "q-bound";
pub const ENUMERATION_U: &str = "enumeration-u";
pub const PARTITION_RECURSION: &str = "partition-recursion";
pub const TREE_GENERATION: &str = "tree-generation";
pub const MOMENT_IDENTITIES: &str = "moment-identities";
pub const Q_IDENTITY: &str = "q-identity";
pub const DECOMPOSITION: &str = "decomposition";
pub const WEIL_BEZOUT: &str = "weil-bezout";
pub const BUDGET: &str = "budget";

/// Why a check did not pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckFailure {
    Failed(String),
    Budget(String),
}

impl From<CurveError> for CheckFailure {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Budget { .. } | CurveError::Graph(GraphError::Cap { .. }) => {
                CheckFailure::Budget(e.to_string())
            }
            other => CheckFailure::Failed(other.to_string()),
        }
    }
}

impl From<GraphError> for CheckFailure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Cap { .. } => CheckFailure::Budget(e.to_string()),
            other => CheckFailure::Failed(other.to_string()),
        }
    }
}

impl From<RecurError> for CheckFailure {
    fn from(e: RecurError) -> Self {
        match e {
            RecurError::TableCap { .. } | RecurError::PartitionCap(..) => CheckFailure::Budget(e.to_string()),
            other => CheckFailure::Failed(other.to_string()),
        }
    }
}

type CheckResult = Result<(), CheckFailure>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> CheckResult {
    if cond {
        Ok(())
    } else {
        Err(CheckFailure::Failed(msg()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyManifest {
    pub version: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyManifest {
    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// 0 when everything passed, 3 if only budget checks failed, else 1.
    pub fn exit_code(&self) -> i32 {
        let mut failures = self.failures().peekable();
        if failures.peek().is_none() {
            0
        } else if failures.all(|c| c.name == BUDGET) {
            3
        } else {
            1
        }
    }
}

/// A map `x -> A x^d + C` over `F_p` as plain numbers.
pub type MapSpec = (u64, u32, u64, u64);

/// Point-count instance: map, depth `N`, and tuple size `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCase {
    pub map: MapSpec,
    pub n: usize,
    pub k: usize,
}

/// The instance matrix run by [`run_plan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyPlan {
    /// `(d, R)`: coefficient tables up to level `R`.
    pub mu_v_levels: Vec<(u32, i32)>,
    /// `(d, R)`: exact `q_r` bounds for `r <= R`.
    pub q_levels: Vec<(u32, usize)>,
    /// `(d, r, k)` for enumeration against `U(r, k)`.
    pub enumeration: Vec<(u32, i32, usize)>,
    pub partition: Vec<(u32, i32, usize)>,
    pub trees: Vec<(u32, i32, usize)>,
    pub moment_maps: Vec<MapSpec>,
    pub moment_depth: usize,
    pub moment_tuple: usize,
    pub curves: Vec<CurveCase>,
}

fn moment_matrix() -> Vec<MapSpec> {
    let mut maps = Vec::new();
    for p in [5u64, 13, 17, 29] {
        for d in 2..=4u32 {
            if (p - 1) % d as u64 != 0 {
                continue;
            }
            let a_values: Vec<u64> = if p <= 13 { (1..p).collect() } else { vec![1, 2, 3] };
            for &a in &a_values {
                for c in 0..p {
                    maps.push((p, d, a, c));
                }
            }
        }
    }
    maps
}

impl VerifyPlan {
    /// The fixed desk-scale matrix.
    pub fn desk() -> Self {
        let mut enumeration = Vec::new();
        for d in [2u32, 3] {
            for r in -1..=2 {
                for k in 1..=4 {
                    enumeration.push((d, r, k));
                }
            }
        }
        let mut trees = Vec::new();
        for d in [2u32, 3] {
            for r in -1..=1 {
                for k in 1..=3 {
                    trees.push((d, r, k));
                }
            }
        }
        let mut partition = Vec::new();
        for d in [2u32, 3] {
            for r in 0..=3 {
                for k in 1..=5 {
                    partition.push((d, r, k));
                }
            }
        }
        let curve = |p, k| CurveCase { map: (p, 2, 1, 1), n: 1, k };
        VerifyPlan {
            mu_v_levels: vec![(2, 6), (3, 4)],
            q_levels: vec![(2, 12), (3, 8), (4, 6)],
            enumeration,
            partition,
            trees,
            moment_maps: moment_matrix(),
            moment_depth: 3,
            moment_tuple: 3,
            curves: vec![curve(5, 2), curve(13, 2), curve(5, 3)],
        }
    }

    /// A plan with only the given point-count cases.
    pub fn curves_only(curves: Vec<CurveCase>) -> Self {
        VerifyPlan {
            mu_v_levels: vec![],
            q_levels: vec![],
            enumeration: vec![],
            partition: vec![],
            trees: vec![],
            moment_maps: vec![],
            moment_depth: 0,
            moment_tuple: 0,
            curves,
        }
    }
}

/// Tables for levels `-1..=R` must each sum to 1, be nonnegative, agree
/// at `m = 0` with the scalar recurrence, and satisfy `mu_{r+1} = 1 - v(r, 0)`.
pub fn mu_v_consistency(d: u32, levels: &[CoeffTable<BigRational>]) -> CheckResult {
    let r_max = levels.last().map_or(-1, |t| t.r);
    let v0 = v_zero_sequence::<BigRational>(d, r_max);
    let mu = mu_sequence::<BigRational>(d, (r_max + 1).max(0) as usize);
    for (i, table) in levels.iter().enumerate() {
        let r = table.r;
        ensure(r == i as i32 - 1, || format!("d={d}: table {i} is at level {r}"))?;
        ensure(table.total().is_one(), || format!("d={d} r={r}: coefficients sum to {}", table.total()))?;
        ensure(table.v.iter().all(|x| *x >= BigRational::zero()), || format!("d={d} r={r}: negative coefficient"))?;
        ensure(table.v[0] == v0[i], || format!("d={d} r={r}: v(r,0) = {} but recurrence gives {}", table.v[0], v0[i]))?;
        let next_mu = BigRational::one() - &table.v[0];
        ensure(next_mu == mu.values[i], || format!("d={d} r={r}: 1 - v(r,0) = {next_mu} != mu_{}", r + 1))?;
    }
    Ok(())
}

fn check_mu_v(plan: &VerifyPlan) -> CheckResult {
    for &(d, r) in &plan.mu_v_levels {
        mu_v_consistency(d, &e_coeff_levels(d, r)?)?;
    }
    Ok(())
}

fn check_q_bound(plan: &VerifyPlan) -> CheckResult {
    for &(d, r) in &plan.q_levels {
        ensure(q_bound_check(d, r), || format!("d={d}: q_r bound fails below r={r}"))?;
        ensure(q_increment_holds(&mu_sequence::<BigRational>(d, r)), || format!("d={d}: q increment fails below r={r}"))?;
    }
    Ok(())
}

fn check_enumeration(plan: &VerifyPlan) -> CheckResult {
    for &(d, r, k) in &plan.enumeration {
        let count = enumerate_complete_proper(r, k, d)?.len();
        let u = u_value(d, r, k as u32)?;
        ensure(BigUint::from(count) == u, || format!("d={d} r={r} k={k}: enumerated {count}, U = {u}"))?;
        ensure(u <= u_tree_bound(d, r, k as u32), || format!("d={d} r={r} k={k}: U above tree bound"))?;
    }
    Ok(())
}

fn check_partition(plan: &VerifyPlan) -> CheckResult {
    for &(d, r, k) in &plan.partition {
        ensure(partition_recursion_check(d, r, k)?, || format!("d={d} r={r} k={k}: partition recursion fails"))?;
    }
    Ok(())
}

fn check_trees(plan: &VerifyPlan) -> CheckResult {
    for &(d, r, k) in &plan.trees {
        let complete: BTreeSet<_> = enumerate_complete_proper(r, k, d)?.into_iter().collect();
        let mut covered = BTreeSet::new();
        for t in enumerate_trees(r, k, d)? {
            let lex = maximal_extension_with(&t, TripleOrder::Lexicographic);
            let rev = maximal_extension_with(&t, TripleOrder::Reverse);
            ensure(lex == rev, || format!("d={d} r={r} k={k}: extension of {t} depends on order"))?;
            if lex.is_complete() {
                covered.insert(lex);
            }
        }
        let missing = complete.difference(&covered).count();
        ensure(missing == 0, || format!("d={d} r={r} k={k}: {missing} complete graphs not generated by a tree"))?;
    }
    Ok(())
}

/// Count `k`-tuples with equal `N`-th iterates by scanning all `p^k` tuples.
pub fn brute_force_tuples(f: &PolyMap, n: usize, k: usize) -> u64 {
    let p = f.p() as usize;
    let values: Vec<u64> = (0..f.p()).map(|x| f.iterate(x, n)).collect();
    if k == 0 {
        return 1;
    }
    let mut count = 0u64;
    let mut tuple = vec![0usize; k];
    loop {
        if tuple.iter().all(|&x| values[x] == values[tuple[0]]) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == k {
                return count;
            }
            tuple[i] += 1;
            if tuple[i] < p {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

fn maps(specs: &[MapSpec]) -> Result<Vec<PolyMap>, CheckFailure> {
    specs
        .iter()
        .map(|&(p, d, a, c)| PolyMap::new(p, d, a, c).map_err(|e| CheckFailure::Failed(e.to_string())))
        .collect()
}

fn check_moments(plan: &VerifyPlan) -> CheckResult {
    for f in maps(&plan.moment_maps)? {
        let (p, d) = (f.p(), f.d() as u64);
        ensure(image_size(&f, 1) == (p - 1) / d + 1, || format!("{f:?}: image at depth 1"))?;
        for n in 0..=plan.moment_depth {
            let dist = preimage_distribution(&f, n);
            ensure(dist.total() == p, || format!("{f:?} N={n}: preimages sum to {}", dist.total()))?;
            ensure(moment_w(&f, n, 1) == BigUint::from(p), || format!("{f:?} N={n}: W(N,1) != p"))?;
            ensure(moment_w(&f, n, 0) == BigUint::from(p), || format!("{f:?} N={n}: W(N,0) != p"))?;
            for k in 1..=plan.moment_tuple {
                let w = moment_w(&f, n, k as u32);
                let brute = brute_force_tuples(&f, n, k);
                ensure(w == BigUint::from(brute), || format!("{f:?} N={n} k={k}: W = {w}, tuples = {brute}"))?;
            }
        }
    }
    Ok(())
}

fn check_q_identity(plan: &VerifyPlan) -> CheckResult {
    for f in maps(&plan.moment_maps)? {
        for n in 0..=plan.moment_depth {
            let id = zero_count_identity(&f, n).map_err(|e| CheckFailure::Budget(e.to_string()))?;
            ensure(id.holds(), || format!("{f:?} N={n}: {} zero preimages, identity gives {}", id.direct, id.via_q))?;
        }
    }
    Ok(())
}

fn curve_map(case: &CurveCase) -> Result<PolyMap, CheckFailure> {
    let (p, d, a, c) = case.map;
    PolyMap::new(p, d, a, c).map_err(|e| CheckFailure::Failed(e.to_string()))
}

fn check_decomposition(plan: &VerifyPlan) -> CheckResult {
    for case in &plan.curves {
        let f = curve_map(case)?;
        let rep = decomposition_check(&f, case.n, case.k)?;
        ensure(rep.passed(), || format!("{case:?}: union {} vs C_N {}", rep.union_count, rep.cr.total()))?;
        ensure(rep.direct_infinity == rep.gcd_power, || {
            format!("{case:?}: {} points at infinity, expected {}", rep.direct_infinity, rep.gcd_power)
        })?;
    }
    Ok(())
}

fn check_weil(plan: &VerifyPlan) -> CheckResult {
    for case in &plan.curves {
        let f = curve_map(case)?;
        let graphs = enumerate_complete_proper(case.n as i32 - 1, case.k, f.d())?;
        for g in &graphs {
            let rep = weil_check(&f, g, case.k, case.n)?;
            ensure(rep.within(), || format!("{case:?} {g}: deviation {} > {}", rep.deviation, rep.bound))?;
        }
        for (i, g1) in graphs.iter().enumerate() {
            for g2 in &graphs[i + 1..] {
                let rep = intersection_check(&f, g1, g2, case.k, case.n)?;
                ensure(rep.within(), || format!("{case:?} {g1} / {g2}: {rep:?}"))?;
            }
        }
    }
    Ok(())
}

fn run_check(name: &str, check: impl FnOnce() -> CheckResult) -> CheckOutcome {
    let start = Instant::now();
    let result = check();
    let millis = start.elapsed().as_millis();
    match result {
        Ok(()) => CheckOutcome { name: name.into(), passed: true, detail: String::new(), millis },
        Err(CheckFailure::Failed(detail)) => CheckOutcome { name: name.into(), passed: false, detail, millis },
        Err(CheckFailure::Budget(detail)) => {
            CheckOutcome { name: BUDGET.into(), passed: false, detail: format!("{name}: {detail}"), millis }
        }
    }
}

pub fn run_plan(plan: &VerifyPlan) -> VerifyManifest {
    let checks: Vec<(&str, fn(&VerifyPlan) -> CheckResult)> = vec![
        (MU_V_CONSISTENCY, check_mu_v),
        (Q_BOUND, check_q_bound),
        (ENUMERATION_U, check_enumeration),
        (PARTITION_RECURSION, check_partition),
        (TREE_GENERATION, check_trees),
        (MOMENT_IDENTITIES, check_moments),
        (Q_IDENTITY, check_q_identity),
        (DECOMPOSITION, check_decomposition),
        (WEIL_BEZOUT, check_weil),
    ];
    let checks: Vec<CheckOutcome> = checks.into_iter().map(|(name, f)| run_check(name, || f(plan))).collect();
    VerifyManifest {
        version: env!("CARGO_PKG_VERSION").into(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

/// Run the desk matrix.
pub fn verify_all() -> VerifyManifest {
    run_plan(&VerifyPlan::desk())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_small() {
        let f = PolyMap::new(5, 2, 1, 1).unwrap();
        assert_eq!(brute_force_tuples(&f, 0, 2), 5);
        assert_eq!(brute_force_tuples(&f, 1, 2), 9);
        assert_eq!(brute_force_tuples(&f, 1, 0), 1);
    }

    #[test]
    fn corrupted_table_is_named() {
        let mut levels = e_coeff_levels::<BigRational>(2, 3).unwrap();
        levels[2].v[1] += BigRational::new(1.into(), 64.into());
        assert!(matches!(mu_v_consistency(2, &levels), Err(CheckFailure::Failed(_))));
        let outcome = run_check(MU_V_CONSISTENCY, || mu_v_consistency(2, &levels));
        assert_eq!(outcome.name, MU_V_CONSISTENCY);
        assert!(!outcome.passed);
        assert!(mu_v_consistency(2, &e_coeff_levels(2, 3).unwrap()).is_ok());
    }

    #[test]
    fn budget_is_named() {
        let plan = VerifyPlan::curves_only(vec![CurveCase { map: (223, 2, 1, 1), n: 1, k: 2 }]);
        let manifest = run_plan(&plan);
        assert!(!manifest.passed);
        assert!(manifest.failures().all(|c| c.name == BUDGET));
        assert_eq!(manifest.exit_code(), 3);
    }

    #[test]
    fn small_curve_plan_passes() {
        let plan = VerifyPlan::curves_only(vec![CurveCase { map: (5, 2, 1, 1), n: 1, k: 2 }]);
        let manifest = run_plan(&plan);
        assert!(manifest.passed, "{manifest:?}");
        assert_eq!(manifest.exit_code(), 0);
    }
}

//! Brute-force point counts on the projective varieties cut out by graph
//! edges and by the equal-iterates system.
//!
//! Points of `P^k(F_p)` are stored normalized: the first nonzero coordinate
//! is 1, so the homogenizing coordinate `x_0` is always 0 or 1.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{moment_w, PolyMap};
use crate::field::{mul_mod, pow_mod};
use crate::graphs::{enumerate_complete_proper, GraphError, IterGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("point count over P^{k}(F_{p}) exceeds the brute-force budget")]
    Budget { p: u64, k: usize },
    #[error("graph degree {graph} does not match the map degree {map}")]
    DegreeMismatch { graph: u32, map: u32 },
    #[error("the two graphs must differ")]
    SameGraph,
    #[error("graphs have different vertex counts")]
    VertexMismatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Whether `P^k(F_p)` is small enough to scan exhaustively.
pub fn within_budget(p: u64, k: usize) -> bool {
    match k {
        0..=2 => p <= 211,
        3 => p <= 101,
        _ => false,
    }
}

fn check_budget(p: u64, k: usize) -> Result<(), CurveError> {
    if within_budget(p, k) {
        Ok(())
    } else {
        Err(CurveError::Budget { p, k })
    }
}

/// A normalized projective point `(x_0 : x_1 : ... : x_k)`.
pub type Point = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectivePointSet {
    pub affine_count: u64,
    pub infinity_count: u64,
}

impl ProjectivePointSet {
    pub fn total(&self) -> u64 {
        self.affine_count + self.infinity_count
    }

    fn from_points(points: &[Point]) -> Self {
        let affine_count = points.iter().filter(|pt| pt[0] == 1).count() as u64;
        ProjectivePointSet { affine_count, infinity_count: points.len() as u64 - affine_count }
    }
}

/// Which factor `Phi(X, Y, Z; level, twist)` of `f^r(X) - f^r(Y)` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiSpec {
    pub level: i32,
    pub twist: u32,
}

/// `F^{l}(x, z) = z^{d^l} f^{l}(x/z)` via `F^0 = x`,
/// `F^{i+1} = A (F^i)^d + C z^{d^{i+1}}`.
pub fn homogeneous_iterate(f: &PolyMap, level: usize, x: u64, z: u64) -> u64 {
    let (p, d, a, c) = (f.p(), f.d() as u64, f.params.a, f.params.c);
    let mut value = x % p;
    let mut z_pow = z % p;
    for _ in 0..level {
        z_pow = pow_mod(z_pow, d, p);
        value = (mul_mod(a, pow_mod(value, d, p), p) + mul_mod(c, z_pow, p)) % p;
    }
    value
}

/// Homogenized `Phi` at `(x, y, z)`: `x - y` at level -1, otherwise
/// `F^{l}(x, z) - gamma^h F^{l}(y, z)`.
pub fn phi_eval(f: &PolyMap, spec: PhiSpec, x: u64, y: u64, z: u64) -> u64 {
    let p = f.p();
    if spec.level < 0 {
        return (x % p + p - y % p) % p;
    }
    let level = spec.level as usize;
    let lhs = homogeneous_iterate(f, level, x, z);
    let rhs = mul_mod(pow_mod(f.gamma(), spec.twist as u64, p), homogeneous_iterate(f, level, y, z), p);
    (lhs + p - rhs) % p
}

/// `F^{l}(x, z)` for `z in {0, 1}`, every `x`, and `0 <= l <= max_level`.
struct HomTable {
    p: u64,
    /// `[level][z][x]`
    values: Vec<[Vec<u32>; 2]>,
}

impl HomTable {
    fn new(f: &PolyMap, max_level: usize) -> Self {
        let p = f.p();
        let values = (0..=max_level)
            .map(|l| {
                let at = |z| (0..p).map(|x| homogeneous_iterate(f, l, x, z) as u32).collect();
                [at(0), at(1)]
            })
            .collect();
        HomTable { p, values }
    }

    #[inline]
    fn get(&self, level: usize, x: u32, z: u32) -> u64 {
        self.values[level][z as usize][x as usize] as u64
    }
}

/// Visit every normalized point of `P^k(F_p)`; coordinate 0 is `x_0`.
fn for_each_point(p: u64, k: usize, mut visit: impl FnMut(&[u32])) {
    let mut pt = vec![0u32; k + 1];
    for lead in 0..=k {
        for v in pt.iter_mut() {
            *v = 0;
        }
        pt[lead] = 1;
        let free = k - lead;
        let total = (p as usize).pow(free as u32);
        for mut code in 0..total {
            for slot in pt[lead + 1..].iter_mut().rev() {
                *slot = (code % p as usize) as u32;
                code /= p as usize;
            }
            visit(&pt);
        }
    }
}

fn edge_equations(f: &PolyMap, g: &IterGraph) -> Vec<(usize, usize, i32, u64)> {
    g.edges()
        .map(|(a, b, l)| (a, b, l.xi, pow_mod(f.gamma(), l.eta as u64, f.p())))
        .collect()
}

/// Normalized points of `C_G`, sorted.
pub fn curve_points(f: &PolyMap, g: &IterGraph) -> Result<Vec<Point>, CurveError> {
    if g.d() != f.d() {
        return Err(CurveError::DegreeMismatch { graph: g.d(), map: f.d() });
    }
    check_budget(f.p(), g.k())?;
    let eqs = edge_equations(f, g);
    let max_level = eqs.iter().map(|e| e.2.max(0) as usize).max().unwrap_or(0);
    let table = HomTable::new(f, max_level);
    let p = f.p();
    let mut out = Vec::new();
    for_each_point(p, g.k(), |pt| {
        let z = pt[0];
        let on_curve = eqs.iter().all(|&(a, b, xi, twist)| {
            if xi < 0 {
                pt[a] == pt[b]
            } else {
                let l = xi as usize;
                table.get(l, pt[a], z) == mul_mod(twist, table.get(l, pt[b], z), table.p)
            }
        });
        if on_curve {
            out.push(pt.to_vec());
        }
    });
    out.sort_unstable();
    Ok(out)
}

pub fn count_curve_points(f: &PolyMap, g: &IterGraph) -> Result<ProjectivePointSet, CurveError> {
    curve_points(f, g).map(|pts| ProjectivePointSet::from_points(&pts))
}

/// Normalized points of `C_N: F^N(x_1, x_0) = ... = F^N(x_k, x_0)`, sorted.
pub fn cr_points(f: &PolyMap, n: usize, k: usize) -> Result<Vec<Point>, CurveError> {
    check_budget(f.p(), k)?;
    let table = HomTable::new(f, n);
    let mut out = Vec::new();
    for_each_point(f.p(), k, |pt| {
        let z = pt[0];
        let first = table.get(n, pt[1.min(k)], z);
        if (2..=k).all(|a| table.get(n, pt[a], z) == first) {
            out.push(pt.to_vec());
        }
    });
    out.sort_unstable();
    Ok(out)
}

pub fn count_cr_points(f: &PolyMap, n: usize, k: usize) -> Result<ProjectivePointSet, CurveError> {
    cr_points(f, n, k).map(|pts| ProjectivePointSet::from_points(&pts))
}

/// The union of `C_G` over complete proper `(N-1, k, d)`-graphs against `C_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub p: u64,
    pub d: u32,
    pub n: usize,
    pub k: usize,
    pub graph_count: usize,
    pub union_count: u64,
    pub cr: ProjectivePointSet,
    pub w: u64,
    /// `(p - 1) gcd(p - 1, d^N)^{k-2}`; absent for `k < 2`.
    pub stated_infinity_term: Option<u64>,
    pub direct_infinity: u64,
    /// `gcd(p - 1, d^N)^{k-1}`.
    pub gcd_power: u64,
    pub union_equals_cr: bool,
    pub every_graph_inside_cr: bool,
}

impl DecompositionReport {
    /// The asserted parts: equal point sets, containment, affine part = W.
    pub fn passed(&self) -> bool {
        self.union_equals_cr && self.every_graph_inside_cr && self.cr.affine_count == self.w
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// `gcd(p - 1, d^N)` without overflowing `d^N`.
pub fn gcd_with_power(p: u64, d: u32, n: usize) -> u64 {
    let mut g = 1;
    for _ in 0..n {
        g = gcd(p - 1, g * d as u64);
    }
    g
}

pub fn decomposition_check(f: &PolyMap, n: usize, k: usize) -> Result<DecompositionReport, CurveError> {
    check_budget(f.p(), k)?;
    let graphs = enumerate_complete_proper(n as i32 - 1, k, f.d())?;
    let cr = cr_points(f, n, k)?;
    let cr_set: BTreeSet<&Point> = cr.iter().collect();
    let mut union = BTreeSet::new();
    let mut every_graph_inside_cr = true;
    for g in &graphs {
        for pt in curve_points(f, g)? {
            every_graph_inside_cr &= cr_set.contains(&pt);
            union.insert(pt);
        }
    }
    let union_equals_cr = union.len() == cr.len() && union.iter().zip(&cr).all(|(a, b)| a == b);
    let g = gcd_with_power(f.p(), f.d(), n);
    let stated_infinity_term = (k >= 2).then(|| (f.p() - 1) * g.pow(k as u32 - 2));
    let cr_counts = ProjectivePointSet::from_points(&cr);
    let w = moment_w(f, n, k as u32);
    Ok(DecompositionReport {
        p: f.p(),
        d: f.d(),
        n,
        k,
        graph_count: graphs.len(),
        union_count: union.len() as u64,
        cr: cr_counts,
        w: u64::try_from(&w).expect("W fits in u64 at brute-force scale"),
        stated_infinity_term,
        direct_infinity: cr_counts.infinity_count,
        gcd_power: g.pow(k.saturating_sub(1) as u32),
        union_equals_cr,
        every_graph_inside_cr,
    })
}

/// `d^{2kN}` as a float; saturates to infinity.
pub fn degree_bound(d: u32, k: usize, n: usize) -> f64 {
    (d as f64).powi((2 * k * n) as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilReport {
    pub points: ProjectivePointSet,
    /// `|#C(F_p) - (p + 1)| / sqrt(p)`
    pub deviation: f64,
    pub bound: f64,
}

impl WeilReport {
    pub fn within(&self) -> bool {
        self.deviation <= self.bound
    }
}

pub fn weil_check(f: &PolyMap, g: &IterGraph, k: usize, n: usize) -> Result<WeilReport, CurveError> {
    if g.k() != k {
        return Err(CurveError::VertexMismatch);
    }
    let points = count_curve_points(f, g)?;
    Ok(WeilReport { points, deviation: weil_deviation(f.p(), points.total()), bound: degree_bound(f.d(), k, n) })
}

pub fn weil_deviation(p: u64, total: u64) -> f64 {
    (total as f64 - (p + 1) as f64).abs() / (p as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub common: u64,
    pub bound: f64,
    /// `Some(true)` when both point sets are nonempty and differ.
    pub sets_differ: Option<bool>,
}

impl IntersectionReport {
    pub fn within(&self) -> bool {
        self.common as f64 <= self.bound && self.sets_differ != Some(false)
    }
}

pub fn intersection_check(
    f: &PolyMap,
    g1: &IterGraph,
    g2: &IterGraph,
    k: usize,
    n: usize,
) -> Result<IntersectionReport, CurveError> {
    if g1 == g2 {
        return Err(CurveError::SameGraph);
    }
    if g1.k() != k || g2.k() != k {
        return Err(CurveError::VertexMismatch);
    }
    let first = curve_points(f, g1)?;
    let second = curve_points(f, g2)?;
    let second_set: BTreeSet<&Point> = second.iter().collect();
    let common = first.iter().filter(|pt| second_set.contains(pt)).count() as u64;
    let sets_differ = (!first.is_empty() && !second.is_empty()).then(|| first != second);
    Ok(IntersectionReport { common, bound: degree_bound(f.d(), k, n), sets_differ })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Suspicious,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityProbe {
    pub points: ProjectivePointSet,
    pub deviation: f64,
    /// `(D - 1)(D - 2)` with `D = d^r`, in units of `sqrt(p)`.
    pub genus_bound: f64,
    pub verdict: Verdict,
}

/// Point count on the plane curve `F^r(X, Z) = gamma^i F^r(Y, Z)` compared
/// against the genus bound for a degree `d^r` curve. Evidence only.
pub fn irreducibility_probe(f: &PolyMap, r: usize, twist: u32) -> Result<IrreducibilityProbe, CurveError> {
    let g = IterGraph::empty(2, r as i32, f.d()).with_edge(1, 2, r as i32, twist);
    let points = count_curve_points(f, &g)?;
    let big_d = (f.d() as f64).powi(r as i32);
    let genus_bound = (big_d - 1.0) * (big_d - 2.0);
    let deviation = weil_deviation(f.p(), points.total());
    let verdict = if deviation <= genus_bound { Verdict::Consistent } else { Verdict::Suspicious };
    Ok(IrreducibilityProbe { points, deviation, genus_bound, verdict })
}

/// One point-count record as emitted by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub p: u64,
    pub d: u32,
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "C")]
    pub c: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub graph: String,
    pub affine: u64,
    pub infinity: u64,
    pub total: u64,
    pub weil_dev: f64,
}

impl CurveRecord {
    pub fn new(f: &PolyMap, n: usize, g: &IterGraph, points: ProjectivePointSet) -> Self {
        CurveRecord {
            p: f.p(),
            d: f.d(),
            a: f.params.a,
            c: f.params.c,
            n,
            k: g.k(),
            graph: g.to_string(),
            affine: points.affine_count,
            infinity: points.infinity_count,
            total: points.total(),
            weil_dev: weil_deviation(f.p(), points.total()),
        }
    }
}

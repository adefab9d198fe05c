use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigUint;
use proptest::prelude::*;

use itermap::curves::{cr_points, curve_points};
use itermap::dynamics::{
    apply_map_to_domain, check_precondition, functional_graph_stats, image_size, moment_w, orbit_of_zero,
    preimage_distribution, PolyMap,
};
use itermap::field::{multiplicative_order, primes_in};
use itermap::graphs::{
    enumerate_complete_proper, enumerate_trees, extract_partition, is_proper, maximal_extension, maximal_extension_with,
    TripleOrder,
};
use itermap::recur::{partition_recursion_check, u_value, Partition};

fn map_strategy(max_p: u64) -> impl Strategy<Value = PolyMap> {
    let primes: Vec<u64> = primes_in(3, max_p);
    (prop::sample::select(primes), 2u32..5, any::<u64>(), any::<u64>()).prop_filter_map(
        "d must divide p - 1",
        |(p, d, a, c)| {
            if (p - 1) % d as u64 != 0 {
                return None;
            }
            PolyMap::new(p, d, 1 + a % (p - 1), c % p).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_has_exact_order(f in map_strategy(2000)) {
        prop_assert_eq!(multiplicative_order(f.gamma(), f.p()), Some(f.d() as u64));
    }

    #[test]
    fn preimages_cover_the_field(f in map_strategy(2000), n in 0usize..5) {
        let dist = preimage_distribution(&f, n);
        prop_assert_eq!(dist.total(), f.p());
        prop_assert_eq!(moment_w(&f, n, 0), BigUint::from(f.p()));
        prop_assert_eq!(moment_w(&f, n, 1), BigUint::from(f.p()));
        prop_assert_eq!(f.p() - dist.zero_count(), image_size(&f, n));
    }

    #[test]
    fn image_shrinks_with_depth(f in map_strategy(2000)) {
        let sizes: Vec<u64> = (0..6).map(|n| image_size(&f, n)).collect();
        prop_assert_eq!(sizes[0], f.p());
        prop_assert!(sizes.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn domain_table_matches_pointwise(f in map_strategy(500), n in 0usize..4) {
        let table = apply_map_to_domain(&f, n);
        for x in 0..f.p() {
            prop_assert_eq!(table[x as usize] as u64, f.iterate(x, n));
        }
    }

    #[test]
    fn orbit_agrees_with_visited_set(f in map_strategy(5000)) {
        let mut seen = HashSet::new();
        let mut x = 0;
        while seen.insert(x) {
            x = f.eval(x);
        }
        let o = orbit_of_zero(&f);
        prop_assert_eq!(o.collision_index(), seen.len() as u64);
        prop_assert!(o.cycle_len >= 1);
        prop_assert_eq!(f.iterate(0, (o.tail_len + o.cycle_len) as usize), f.iterate(0, o.tail_len as usize));
        // the precondition holds exactly up to the collision index
        prop_assert!(check_precondition(&f, (o.collision_index() - 1) as usize));
        prop_assert!(!check_precondition(&f, o.collision_index() as usize));
    }

    #[test]
    fn cycle_lengths_partition_cyclic_points(f in map_strategy(3000)) {
        let s = functional_graph_stats(&f);
        let cyclic = image_size(&f, f.p() as usize);
        prop_assert_eq!(s.sum_cycle_lengths, cyclic);
        prop_assert!(s.num_cycles >= 1 && s.num_cycles <= s.sum_cycle_lengths);
    }

    #[test]
    fn graph_varieties_inside_equal_iterates(f in map_strategy(30), k in 2usize..4) {
        let n = 1;
        let cr: BTreeSet<_> = cr_points(&f, n, k).unwrap().into_iter().collect();
        let mut union = BTreeSet::new();
        for g in enumerate_complete_proper(n as i32 - 1, k, f.d()).unwrap() {
            for pt in curve_points(&f, &g).unwrap() {
                prop_assert!(cr.contains(&pt));
                union.insert(pt);
            }
        }
        prop_assert_eq!(union, cr);
    }
}

#[test]
fn trees_generate_every_complete_graph_uniquely() {
    for d in [2u32, 3] {
        for r in -1..=1 {
            for k in 1..=3 {
                let complete: BTreeSet<_> = enumerate_complete_proper(r, k, d).unwrap().into_iter().collect();
                let mut image = BTreeSet::new();
                for t in enumerate_trees(r, k, d).unwrap() {
                    let ext = maximal_extension(&t);
                    assert_eq!(ext, maximal_extension_with(&t, TripleOrder::Reverse), "{t}");
                    assert!(t.is_subgraph_of(&ext));
                    assert!(is_proper(&ext), "{ext}");
                    if ext.is_complete() {
                        assert!(complete.contains(&ext), "{ext}");
                        image.insert(ext);
                    }
                }
                assert_eq!(image, complete, "d={d} r={r} k={k}");
            }
        }
    }
}

#[test]
fn extension_of_complete_graph_is_itself() {
    for d in [2u32, 3] {
        for r in -1..=1 {
            for k in 1..=3 {
                for g in enumerate_complete_proper(r, k, d).unwrap() {
                    assert_eq!(maximal_extension(&g), g);
                }
            }
        }
    }
}

#[test]
fn partitions_of_strict_graphs_match_counts() {
    for d in [2u32, 3] {
        for r in 0..=2 {
            for k in 1..=4usize {
                let mut by_partition: BTreeMap<Partition, u64> = BTreeMap::new();
                let mut non_strict = 0u64;
                for g in enumerate_complete_proper(r, k, d).unwrap() {
                    if g.is_strict() {
                        *by_partition.entry(extract_partition(&g).unwrap()).or_default() += 1;
                    } else {
                        non_strict += 1;
                    }
                }
                for (blocks, count) in &by_partition {
                    let expect = itermap::graphs::count_partition_graphs(blocks, r, d).unwrap();
                    assert_eq!(BigUint::from(*count), expect, "d={d} r={r} k={k} {blocks:?}");
                }
                // non-strict graphs are the complete proper (r-1)-graphs
                assert_eq!(BigUint::from(non_strict), u_value(d, r - 1, k as u32).unwrap());
                assert!(partition_recursion_check(d, r, k).unwrap());
            }
        }
    }
}

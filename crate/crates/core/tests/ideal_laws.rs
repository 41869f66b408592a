use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use hlw_core::ideals::{
    density_profile, interval_count, max_antichain_weight, minimal_elements, phi, summable_weight, Comparison,
    DensityMode, NatSet, NodeSet,
};
use hlw_core::treecore::BinaryString;

fn natset() -> impl Strategy<Value = NatSet> {
    (1u64..200).prop_flat_map(|bound| {
        proptest::collection::btree_set(0..bound, 0..40).prop_map(move |m| NatSet::new(bound, m).unwrap())
    })
}

/// Brute force over every subset of `a`: the heaviest antichain.
fn antichain_oracle(a: &NodeSet) -> BigRational {
    let nodes: Vec<BinaryString> = a.nodes().iter().copied().collect();
    let mut best = BigRational::zero();
    for mask in 0u32..1 << nodes.len() {
        let chosen: Vec<&BinaryString> = (0..nodes.len()).filter(|i| mask >> i & 1 == 1).map(|i| &nodes[i]).collect();
        let antichain = chosen
            .iter()
            .enumerate()
            .all(|(i, s)| chosen[i + 1..].iter().all(|t| !s.compatible(t)));
        if antichain {
            let w = chosen
                .iter()
                .map(|s| BigRational::new(BigInt::one(), BigInt::one() << s.len()))
                .fold(BigRational::zero(), |x, y| x + y);
            if w > best {
                best = w;
            }
        }
    }
    best
}

proptest! {
    #[test]
    fn complement_splits_every_window(a in natset(), lo in 0u64..200, len in 0u64..200) {
        let hi = (lo + len).min(a.bound());
        let lo = lo.min(hi);
        let c = a.complement();
        prop_assert_eq!(a.count_in(lo, hi) + c.count_in(lo, hi), hi - lo);
        let da = density_profile(&a, DensityMode::Dyadic);
        let dc = density_profile(&c, DensityMode::Dyadic);
        for (x, y) in da.values().iter().zip(dc.values()) {
            prop_assert_eq!(x + y, BigRational::one());
        }
    }

    #[test]
    fn statistics_are_monotone(a in natset(), keep in any::<u64>(), len in 1u64..8, t in 0u64..4) {
        let sub = NatSet::new(a.bound(), a.members().iter().copied().filter(|n| keep >> (n % 64) & 1 == 1)).unwrap();
        prop_assert!(sub.is_subset(&a));
        prop_assert!(summable_weight(&sub) <= summable_weight(&a));
        for cmp in [Comparison::AtLeast, Comparison::MoreThan] {
            prop_assert!(interval_count(&sub, len, t, cmp).unwrap() <= interval_count(&a, len, t, cmp).unwrap());
        }
        for (x, y) in density_profile(&sub, DensityMode::Natural).values().iter()
            .zip(density_profile(&a, DensityMode::Natural).values()) {
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn phi_matches_antichain_oracle(
        bits in proptest::collection::btree_set(0usize..31, 0..12),
    ) {
        let a = NodeSet::new(5, bits.into_iter().map(BinaryString::from_index)).unwrap();
        let oracle = antichain_oracle(&a);
        prop_assert_eq!(phi(&a), oracle.clone());
        prop_assert_eq!(max_antichain_weight(&a), oracle);
        let m = minimal_elements(&a);
        prop_assert!(m.is_subset(&a));
        prop_assert_eq!(minimal_elements(&m), m);
    }
}

#[test]
fn phi_oracle_on_every_subset_of_depth_three() {
    let nodes: Vec<BinaryString> = (0..3).flat_map(BinaryString::level).collect();
    for mask in 0u32..1 << nodes.len() {
        let a = NodeSet::new(3, (0..nodes.len()).filter(|i| mask >> i & 1 == 1).map(|i| nodes[i])).unwrap();
        assert_eq!(phi(&a), antichain_oracle(&a), "mask {mask:#b}");
    }
}

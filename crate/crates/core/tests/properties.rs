use proptest::prelude::*;

use clg::exactmath::{count_disjoint, qbinom};
use clg::format::ClksetFile;
use clg::gfq::{FieldCtx, FieldElement};
use clg::projspace::{GeometryCtx, KFamily};
use clg::search::{search_all, SearchConfig};
use clg::scheme::Scheme;
use clg::SchemeParams;
use num_bigint::BigInt;
use num_rational::BigRational;

fn field_order() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27])
}

proptest! {
    #[test]
    fn qbinom_symmetry(q in field_order(), a in 0u32..12, b in 0u32..12) {
        prop_assume!(b <= a);
        prop_assert_eq!(qbinom(a, b, q).unwrap(), qbinom(a, a - b, q).unwrap());
    }

    #[test]
    fn qbinom_pascal(q in field_order(), a in 1u32..12, b in 1u32..12) {
        prop_assume!(b < a);
        let lhs = qbinom(a, b, q).unwrap();
        let rhs = qbinom(a - 1, b - 1, q).unwrap() + BigInt::from(q).pow(b) * qbinom(a - 1, b, q).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn disjoint_counts_partition(q in field_order(), n in 1u32..8, j in 0u32..8) {
        prop_assume!(j < n);
        // Disjoint from a point = all j-spaces minus the pencil through it.
        let total = qbinom(n + 1, j + 1, q).unwrap();
        let through = qbinom(n, j, q).unwrap();
        prop_assert_eq!(count_disjoint(n, q, 0, j), total - through);
    }

    #[test]
    fn field_axioms(q in field_order(), a in 0usize..27, b in 0usize..27, c in 0usize..27) {
        let f = FieldCtx::new(q).unwrap();
        let qs = q as usize;
        let (a, b, c) = (f.element(a % qs), f.element(b % qs), f.element(c % qs));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
        if a != FieldElement::ZERO {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
        }
    }

    #[test]
    fn clkset_round_trip(q in prop::sample::select(vec![2u64, 3, 4]), ids in prop::collection::btree_set(0u32..35, 0..20)) {
        let ctx = GeometryCtx::enumerate(SchemeParams::new(3, 1, q).unwrap()).unwrap();
        let fam = KFamily::new(ids.into_iter().filter(|&i| (i as usize) < ctx.num_kspaces()).collect());
        let text = ClksetFile::from_family(&ctx, &fam).render();
        let parsed = ClksetFile::parse(&text).unwrap();
        prop_assert_eq!(parsed.render(), text);
        prop_assert_eq!(parsed.to_family(&ctx).unwrap(), fam);
    }
}

#[test]
fn pruning_loses_nothing() {
    let ctx = GeometryCtx::enumerate(SchemeParams::new(3, 1, 2).unwrap()).unwrap();
    let scheme = Scheme::build(&ctx).unwrap();
    let x = BigRational::from_integer(1.into());
    let pruned = search_all(&ctx, &scheme, &x, &SearchConfig::default()).unwrap();
    let full = search_all(&ctx, &scheme, &x, &SearchConfig { prune: false, threads: 4, ..Default::default() }).unwrap();
    assert_eq!(pruned.families, full.families);
    assert!(full.stats.leaves > pruned.stats.leaves);
    let sym = search_all(&ctx, &scheme, &x, &SearchConfig { symmetry: true, ..Default::default() }).unwrap();
    assert_eq!(sym.families, pruned.families);
}

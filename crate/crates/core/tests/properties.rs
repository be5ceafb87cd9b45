//! Property tests for the operator laws the constructions lean on.

use proptest::prelude::*;

use schurlab_core::block::BlockOp;
use schurlab_core::coupling::{perturb_kernel, witness_from_complemented, Witness};
use schurlab_core::fredholm::{
    block_index, fredholm_data, fredholm_data_seq, index, is_fredholm, BackendConfig,
};
use schurlab_core::mat::Mat;
use schurlab_core::scalar::{q, Scalar};
use schurlab_core::seqop::{Correction, SeqOp};
use schurlab_core::shape::SpaceShape;
use schurlab_core::symbol::LaurentSymbol;

fn cfg() -> BackendConfig {
    BackendConfig::default()
}

fn small_scalar() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| q(n, d))
}

fn nonzero_scalar() -> impl Strategy<Value = Scalar> {
    (prop_oneof![-4i64..=-1, 1i64..=4], 1i64..=3).prop_map(|(n, d)| q(n, d))
}

/// Arbitrary band symbol with offsets in [-2, 2].
fn band_symbol() -> impl Strategy<Value = LaurentSymbol> {
    proptest::collection::vec((-2i64..=2, small_scalar()), 1..4)
        .prop_map(LaurentSymbol::from_coeffs)
}

/// Arbitrary finite correction supported in [1, 4]^2.
fn correction() -> impl Strategy<Value = Correction> {
    proptest::collection::vec(((1usize..=4, 1usize..=4), small_scalar()), 0..4)
        .prop_map(|entries| {
            Correction::from_entries(entries.into_iter().map(|((i, j), v)| (i, j, v)))
        })
}

fn band_op() -> impl Strategy<Value = SeqOp> {
    (band_symbol(), correction()).prop_map(|(s, c)| SeqOp::new(s, c))
}

/// Monomial-class operator: `c z^d` plus a correction.
fn monomial_op() -> impl Strategy<Value = SeqOp> {
    (-3i64..=3, nonzero_scalar(), correction())
        .prop_map(|(d, c, corr)| SeqOp::new(LaurentSymbol::monomial(d, c), corr))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Index Theorem: index of a composition is the sum of the indices.
    #[test]
    fn index_additivity(a in band_op(), b in band_op()) {
        prop_assume!(is_fredholm(&a) && is_fredholm(&b));
        let ab = a.compose(&b);
        prop_assert!(is_fredholm(&ab));
        prop_assert_eq!(
            index(&ab).unwrap(),
            index(&a).unwrap() + index(&b).unwrap()
        );
    }

    // Finite-rank perturbations never move the index.
    #[test]
    fn finite_rank_invariance(a in band_op(), f in correction()) {
        prop_assume!(is_fredholm(&a));
        let perturbed = a.add(&SeqOp::new(LaurentSymbol::zero(), f));
        prop_assert_eq!(index(&a).unwrap(), index(&perturbed).unwrap());
    }

    // rank + nullity = number of columns.
    #[test]
    fn rank_nullity(rows in 1usize..5, cols in 1usize..5,
                    entries in proptest::collection::vec(small_scalar(), 25)) {
        let m = Mat::from_fn(rows, cols, |i, j| entries[i * 5 + j].clone());
        prop_assert_eq!(m.rank() + m.null_space().len(), cols);
    }

    // alpha - beta = index, and the kernel really is the kernel.
    #[test]
    fn fredholm_data_consistency(t in monomial_op()) {
        let d = fredholm_data_seq(&t, &cfg()).unwrap();
        prop_assert_eq!(d.alpha as i64 - d.beta as i64, d.index);
        prop_assert_eq!(d.index, index(&t).unwrap());
        prop_assert_eq!(d.kernel_basis.len(), d.alpha);
        prop_assert_eq!(d.range_complement.len(), d.beta);
        let block = BlockOp::from_seq(t);
        for v in &d.kernel_basis {
            prop_assert!(block.apply(v).unwrap().is_zero());
        }
        for v in &d.range_complement {
            prop_assert!(!schurlab_core::coupling::in_range_probe(&block, v).unwrap());
        }
    }

    // The numeric backend must reproduce the exact one on monomial symbols.
    #[test]
    fn backend_agreement(t in monomial_op()) {
        let exact = fredholm_data_seq(&t, &cfg()).unwrap();
        let numeric =
            schurlab_core::numeric::fredholm_data_numeric(&t, &cfg()).unwrap();
        prop_assert_eq!((numeric.alpha, numeric.beta), (exact.alpha, exact.beta));
    }
}

/// Witness with a perturbed complemented construction: the defect stays in
/// the exact class while the square corrections push it around.
fn perturbed_witness(k: i64, s_corr: Correction, t_corr: Correction) -> Witness {
    let r = BlockOp::from_seq(SeqOp::shift(-k));
    let base = witness_from_complemented(&r, &SpaceShape::empty()).unwrap();
    let s = base
        .s
        .add(&BlockOp::from_seq(SeqOp::new(LaurentSymbol::zero(), s_corr)))
        .unwrap();
    let t = base
        .t
        .add(&BlockOp::from_seq(SeqOp::new(LaurentSymbol::zero(), t_corr)))
        .unwrap();
    Witness::new(s, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Kernel-isomorphism law: I - ST and I - TS share alpha and beta.
    #[test]
    fn kernel_isomorphism_law(k in -2i64..=2, sc in correction(), tc in correction()) {
        let w = perturbed_witness(k, sc, tc);
        let dx = fredholm_data(&w.defect_x(), &cfg()).unwrap();
        let dy = fredholm_data(&w.defect_y(), &cfg()).unwrap();
        prop_assert_eq!(dx.alpha, dy.alpha);
        prop_assert_eq!(dx.beta, dy.beta);
    }

    // Kernel perturbation hits its target exactly and keeps the index.
    #[test]
    fn perturb_kernel_targets(d in -3i64..=3, corr in correction(), m in 0usize..=6) {
        let t = BlockOp::from_seq(SeqOp::shift(d).add(&SeqOp::new(LaurentSymbol::zero(), corr)));
        let before = fredholm_data(&t, &cfg()).unwrap();
        if (m as i64) < before.index {
            prop_assert!(perturb_kernel(&t, m, &cfg()).is_err());
        } else {
            let r = perturb_kernel(&t, m, &cfg()).unwrap();
            let after = fredholm_data(&t.add(&r).unwrap(), &cfg()).unwrap();
            prop_assert_eq!(after.alpha, m);
            prop_assert_eq!(after.index, before.index);
        }
    }

    // Witness powers multiply the defect index.
    #[test]
    fn witness_power_multiplies(k in 1i64..=2, m in -3i64..=3) {
        prop_assume!(m != 0);
        let w = perturbed_witness(k, Correction::zero(), Correction::zero());
        let wp = schurlab_core::coupling::witness_power(&w, m, &cfg()).unwrap();
        prop_assert_eq!(block_index(&wp.defect_x()).unwrap(), k * m);
    }
}

mod ideal_laws {
    use proptest::prelude::*;
    use schurlab_core::spaces::IdealZ;

    fn ideal() -> impl Strategy<Value = IdealZ> {
        (0u64..=24).prop_map(IdealZ::new)
    }

    proptest! {
        #[test]
        fn lattice_laws(a in ideal(), b in ideal(), c in ideal()) {
            // commutativity
            prop_assert_eq!(a.intersect(&b), b.intersect(&a));
            prop_assert_eq!(a.sum(&b), b.sum(&a));
            // associativity
            prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
            prop_assert_eq!(a.sum(&b).sum(&c), a.sum(&b.sum(&c)));
            // idempotence
            prop_assert_eq!(a.intersect(&a), a);
            prop_assert_eq!(a.sum(&a), a);
            // containment semantics
            prop_assert!(a.intersect(&b).is_subset(&a));
            prop_assert!(a.is_subset(&a.sum(&b)));
        }

        #[test]
        fn membership_matches_generators(a in ideal(), k in -40i64..=40) {
            let g = a.generator() as i64;
            let expected = if g == 0 { k == 0 } else { k % g == 0 };
            prop_assert_eq!(a.contains(k), expected);
        }
    }
}

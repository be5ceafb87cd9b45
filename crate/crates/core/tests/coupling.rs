//! End-to-end checks of the coupling constructions against worked examples.

use schurlab_core::block::{block_diag, BlockOp, BlockVec};
use schurlab_core::coupling::{
    couple_from_mn, eae_check, eae_construct, eae_verify, head_tail_iso, mn_from_couple,
    perturb_kernel, perturb_witness, range_alignment_iso, sc_construct, sc_extend_blockdiag,
    sc_verify, witness_compress, witness_from_complemented, witness_power, InvOp, SchurCouple,
    Witness,
};
use schurlab_core::error::OpError;
use schurlab_core::fredholm::{block_index, fredholm_data, BackendConfig, FredholmData};
use schurlab_core::scalar::qi;
use schurlab_core::seqop::SeqOp;
use schurlab_core::shape::SpaceShape;

fn cfg() -> BackendConfig {
    BackendConfig::default()
}

fn data(op: &BlockOp) -> FredholmData {
    fredholm_data(op, &cfg()).unwrap()
}

fn seq_op(t: SeqOp) -> BlockOp {
    BlockOp::from_seq(t)
}

#[test]
fn eae_check_compares_dimensions() {
    let shift2 = data(&seq_op(SeqOp::shift(-2))); // (2, 0)
    let shift2b = data(&seq_op(SeqOp::shift(-2)));
    assert!(eae_check(&shift2, &shift2b));

    // same index, different nullities: not EAE
    let base = seq_op(SeqOp::shift(-2));
    let r = perturb_kernel(&base, 3, &cfg()).unwrap();
    let bumped = data(&base.add(&r).unwrap()); // (3, 1)
    assert!(!eae_check(&shift2, &bumped));
    assert_eq!(shift2.index, bumped.index);

    let id = data(&seq_op(SeqOp::identity()));
    assert!(eae_check(&id, &id));
}

#[test]
fn perturb_kernel_cases() {
    // already there: R = 0
    let t = seq_op(SeqOp::shift(-2));
    let r = perturb_kernel(&t, 2, &cfg()).unwrap();
    assert!(r.is_zero());

    // grow the kernel to 5: rank <= 3 perturbation
    let r = perturb_kernel(&t, 5, &cfg()).unwrap();
    let d = data(&t.add(&r).unwrap());
    assert_eq!((d.alpha, d.index), (5, 2));

    // shrink: add a correction first so alpha > target
    let grown = t.add(&perturb_kernel(&t, 4, &cfg()).unwrap()).unwrap();
    let r = perturb_kernel(&grown, 3, &cfg()).unwrap();
    let d = data(&grown.add(&r).unwrap());
    assert_eq!((d.alpha, d.beta, d.index), (3, 1, 2));

    // below the index: impossible
    assert!(matches!(
        perturb_kernel(&seq_op(SeqOp::shift(-3)), 1, &cfg()),
        Err(OpError::IndexObstruction { index: 3, requested: 1 })
    ));
}

#[test]
fn perturb_kernel_on_finite_shapes() {
    // all-finite: index 0, kernel can grow up to the dimension
    let m = schurlab_core::mat::Mat::identity(4);
    let t = BlockOp::from_mat(m);
    let r = perturb_kernel(&t, 3, &cfg()).unwrap();
    let d = data(&t.add(&r).unwrap());
    assert_eq!((d.alpha, d.beta, d.index), (3, 3, 0));
}

fn shift_witness(k: i64) -> Witness {
    witness_from_complemented(&seq_op(SeqOp::shift(-k)), &SpaceShape::empty()).unwrap()
}

#[test]
fn witness_from_complemented_examples() {
    // r = identity: defect = I (+) I, index 0
    let w = witness_from_complemented(&seq_op(SeqOp::identity()), &SpaceShape::seq()).unwrap();
    assert_eq!(block_index(&w.defect_x()).unwrap(), 0);
    assert!(w.defect_x().is_identity());

    // r = shift(-k0), empty complement: index k0
    for k0 in 1..=3 {
        let w = shift_witness(k0);
        assert_eq!(block_index(&w.defect_x()).unwrap(), k0);
    }

    // r = shift(2), Z = [Seq]: index -2, via full data on the two-factor shape
    let w = witness_from_complemented(&seq_op(SeqOp::shift(2)), &SpaceShape::seq()).unwrap();
    let d = data(&w.defect_x());
    assert_eq!((d.alpha, d.beta, d.index), (0, 2, -2));
}

#[test]
fn perturb_witness_examples() {
    // alpha already 1: unchanged
    let w = shift_witness(1);
    let w1 = perturb_witness(&w, 1, &cfg()).unwrap();
    assert_eq!(w1.s, w.s);
    assert_eq!(w1.t, w.t);

    // raise alpha to 4: the defect changes by finite rank only
    let w4 = perturb_witness(&w, 4, &cfg()).unwrap();
    let d = data(&w4.defect_x());
    assert_eq!((d.alpha, d.beta, d.index), (4, 3, 1));
    let diff = w
        .s
        .compose(&w.t)
        .unwrap()
        .sub(&w4.s.compose(&w4.t).unwrap())
        .unwrap();
    assert!(schurlab_core::coupling::is_finite_rank(&diff));

    // m = 0 with k = 2: violates m >= k
    let w2 = shift_witness(2);
    assert!(matches!(
        perturb_witness(&w2, 0, &cfg()),
        Err(OpError::IndexObstruction { .. })
    ));

    // zero-index witnesses are rejected
    let w0 = shift_witness(0);
    assert!(matches!(
        perturb_witness(&w0, 3, &cfg()),
        Err(OpError::ZeroIndexInput)
    ));
}

#[test]
fn head_tail_examples() {
    let shape = SpaceShape::seq();
    for j in [0usize, 1, 3] {
        let iso = head_tail_iso(&shape, j).unwrap();
        assert!(iso.op().compose(iso.inv()).unwrap().is_identity());
        assert!(iso.inv().compose(iso.op()).unwrap().is_identity());
    }
    // j = 1 sends e_1 to the finite coordinate and e_2 to tail position 1
    let iso = head_tail_iso(&shape, 1).unwrap();
    let e1 = BlockVec::basis(&shape, 0, 1);
    let img = iso.op().apply(&e1).unwrap();
    assert_eq!(img, BlockVec::basis(iso.op().codomain(), 0, 1));
    let e2 = BlockVec::basis(&shape, 0, 2);
    let img = iso.op().apply(&e2).unwrap();
    assert_eq!(img, BlockVec::basis(iso.op().codomain(), 1, 1));
}

#[test]
fn range_alignment_examples() {
    // t1 = t2: identity
    let t = seq_op(SeqOp::shift(2));
    let a = range_alignment_iso(&t, &t).unwrap();
    assert!(a.op().is_identity());

    // both surjective: identity
    let t1 = seq_op(SeqOp::shift(-1));
    let t2 = seq_op(SeqOp::shift(-3));
    let a = range_alignment_iso(&t1, &t2).unwrap();
    assert!(a.op().is_identity());

    // beta mismatch rejected
    assert!(matches!(
        range_alignment_iso(&seq_op(SeqOp::shift(1)), &seq_op(SeqOp::shift(2))),
        Err(OpError::BetaMismatch { .. })
    ));

    // equal beta = 2 with different ranges: membership transfer
    let t1 = seq_op(SeqOp::shift(2));
    let t2 = seq_op(SeqOp::shift(1).add(&SeqOp::rank_one(1, 1, qi(1))));
    let d2 = data(&t2);
    assert_eq!(d2.beta, 1);
    let t2 = seq_op(
        SeqOp::shift(2)
            .add(&SeqOp::rank_one(1, 1, qi(1)))
            .add(&SeqOp::rank_one(2, 1, qi(1))),
    );
    let d1 = data(&t1);
    let d2 = data(&t2);
    assert_eq!(d1.beta, d2.beta);
    let a = range_alignment_iso(&t1, &t2).unwrap();
    // A maps images of t1 to elements of ran t2: probe with basis vectors
    for c in 1..=6 {
        let x = BlockVec::basis(t1.domain(), 0, c);
        let y = t1.apply(&x).unwrap();
        let ay = a.op().apply(&y).unwrap();
        // membership: solve t2 z = ay exactly
        let view_ok = {
            let d = fredholm_data(&t2, &cfg()).unwrap();
            let _ = d;
            // a vector is in ran t2 iff appending it does not raise the
            // window rank; use the library's solve through a fresh view
            schurlab_core::coupling::in_range_probe(&t2, &ay).unwrap()
        };
        assert!(view_ok, "A t1 e_{c} must lie in ran t2");
    }
}

#[test]
fn sc_construct_trivial_couple() {
    let x = SpaceShape::seq();
    let u = BlockOp::identity(&x);
    let w = Witness::zero(&x, &x);
    let sc = sc_construct(&w, &u, &u, &cfg()).unwrap();
    assert!(sc.a.op().is_identity());
    assert!(sc.d.op().is_identity());
    assert!(sc.b.is_zero());
    assert!(sc.c.is_zero());
    assert!(sc_verify(&u, &u, &sc, 50).unwrap());
}

#[test]
fn sc_construct_shift_end_to_end() {
    let u = seq_op(SeqOp::shift(-1));
    let w = shift_witness(1);
    let sc = sc_construct(&w, &u, &u, &cfg()).unwrap();
    assert!(sc_verify(&u, &u, &sc, 50).unwrap());
}

#[test]
fn sc_construct_index_zero_rank_one_kernels() {
    // u, v of index 0 with alpha = 1: I minus the projection onto e1
    let u = seq_op(SeqOp::identity().add(&SeqOp::rank_one(1, 1, qi(-1))));
    let v = seq_op(SeqOp::identity().add(&SeqOp::rank_one(2, 2, qi(-1))));
    let du = data(&u);
    let dv = data(&v);
    assert!(eae_check(&du, &dv));
    assert_eq!(du.index, 0);
    let w = Witness::zero(&SpaceShape::seq(), &SpaceShape::seq());
    let sc = sc_construct(&w, &u, &v, &cfg()).unwrap();
    assert!(sc_verify(&u, &v, &sc, 50).unwrap());
}

#[test]
fn sc_construct_mixed_shapes() {
    // X = [Seq, Fin(2)], Y = [Seq]; index -1 pair with matching data
    let x = SpaceShape::seq().concat(&SpaceShape::fin(2));
    let y = SpaceShape::seq();
    let mut u = BlockOp::identity(&x);
    u.set_entry(0, 0, schurlab_core::block::Entry::Seq(SeqOp::shift(1)))
        .unwrap();
    let v0 = seq_op(SeqOp::shift(1));
    // u has (alpha, beta) = (0, 1); v0 too
    let du = data(&u);
    let dv = data(&v0);
    assert!(eae_check(&du, &dv));
    let w = witness_from_complemented(&v0, &SpaceShape::fin(2)).unwrap();
    let sc = sc_construct(&w, &u, &v0, &cfg()).unwrap();
    assert!(sc_verify(&u, &v0, &sc, 50).unwrap());
}

#[test]
fn sc_verify_rejects_tampering() {
    let u = seq_op(SeqOp::shift(-1));
    let w = shift_witness(1);
    let sc = sc_construct(&w, &u, &u, &cfg()).unwrap();
    let tampered = SchurCouple {
        a: sc.a.clone(),
        b: sc.b.add(&seq_op(SeqOp::rank_one(1, 1, qi(1)))).unwrap(),
        c: sc.c.clone(),
        d: sc.d.clone(),
    };
    assert!(!sc_verify(&u, &u, &tampered, 50).unwrap());
}

#[test]
fn couple_from_mn_round_trip() {
    let x = SpaceShape::seq();
    // trivial: m = n = identity
    let idm = InvOp::identity(&x);
    let w = Witness::zero(&x, &x);
    let sc = couple_from_mn(&idm, &idm, &w).unwrap();
    assert!(sc.a.op().is_identity());
    assert!(sc.d.op().is_identity());

    // round trip through the converse translation
    let m = InvOp::certify(
        seq_op(SeqOp::identity().add(&SeqOp::rank_one(1, 2, qi(3)))),
        seq_op(SeqOp::identity().add(&SeqOp::rank_one(1, 2, qi(-3)))),
    )
    .unwrap();
    let w = shift_witness(1);
    let sc = couple_from_mn(&m, &idm, &w).unwrap();
    let (m2, n2, w2) = mn_from_couple(&sc).unwrap();
    let rebuilt = couple_from_mn(&m2, &n2, &w2).unwrap();
    assert_eq!(rebuilt.a.op(), sc.a.op());
    assert_eq!(rebuilt.d.op(), sc.d.op());
    assert_eq!(rebuilt.b, sc.b);
    assert_eq!(rebuilt.c, sc.c);

    // U = m^{-1} with a trivial witness: the couple identities hold
    let sc = couple_from_mn(&m, &idm, &Witness::zero(&x, &x)).unwrap();
    let u = m.inv().clone();
    let v = BlockOp::identity(&x);
    assert!(sc_verify(&u, &v, &sc, 30).unwrap());
}

#[test]
fn witness_power_indices() {
    let w = shift_witness(1);
    // m = 1: unchanged
    let w1 = witness_power(&w, 1, &cfg()).unwrap();
    assert_eq!(w1.s, w.s);
    // m = 3: index 3
    let w3 = witness_power(&w, 3, &cfg()).unwrap();
    assert_eq!(block_index(&w3.defect_x()).unwrap(), 3);
    // m = -1: index -1
    let wm1 = witness_power(&w, -1, &cfg()).unwrap();
    assert_eq!(block_index(&wm1.defect_x()).unwrap(), -1);
    // negative source index
    let wneg = witness_from_complemented(&seq_op(SeqOp::shift(2)), &SpaceShape::empty()).unwrap();
    let wp = witness_power(&wneg, -2, &cfg()).unwrap();
    assert_eq!(block_index(&wp.defect_x()).unwrap(), 4);
}

#[test]
fn witness_compress_examples() {
    // surjective u, v: projections are the identity, so b1 = t, b2 = s
    let u = seq_op(SeqOp::shift(-1));
    let v = seq_op(SeqOp::shift(-2));
    let w = shift_witness(1);
    let (b1, b2, disc) = witness_compress(&w, &u, &v, &cfg()).unwrap();
    assert_eq!(b1, w.t);
    assert_eq!(b2, w.s);
    assert!(disc.is_zero());

    // k = 1 witness compressed to shift ranges: compressed defect keeps index 1
    let u = seq_op(SeqOp::shift(1));
    let v = seq_op(SeqOp::shift(2));
    let (b1, b2, _disc) = witness_compress(&w, &u, &v, &cfg()).unwrap();
    let defect = BlockOp::identity(v.domain())
        .sub(&b1.compose(&b2).unwrap())
        .unwrap();
    assert_eq!(block_index(&defect).unwrap(), 1);

    // trivial witness: I - B1 B2 = I
    let wz = Witness::zero(u.domain(), v.domain());
    let (b1, b2, disc) = witness_compress(&wz, &u, &v, &cfg()).unwrap();
    assert!(b1.is_zero() && b2.is_zero() && disc.is_zero());
}

#[test]
fn sc_extend_examples() {
    // trivial couple extended by finite factors stays an identity couple
    let x = SpaceShape::seq();
    let u = BlockOp::identity(&x);
    let sc = sc_construct(&Witness::zero(&x, &x), &u, &u, &cfg()).unwrap();
    let ext = sc_extend_blockdiag(&sc, &SpaceShape::fin(3), &SpaceShape::fin(3));
    let bigger = BlockOp::identity(&SpaceShape::fin(3).concat(&x));
    assert!(sc_verify(&bigger, &bigger, &ext, 20).unwrap());

    // extend the shift(-1) couple by [Seq]
    let u = seq_op(SeqOp::shift(-1));
    let sc = sc_construct(&shift_witness(1), &u, &u, &cfg()).unwrap();
    let ext = sc_extend_blockdiag(&sc, &SpaceShape::seq(), &SpaceShape::seq());
    let u_ext = block_diag(&BlockOp::identity(&SpaceShape::seq()), &u);
    assert!(sc_verify(&u_ext, &u_ext, &ext, 30).unwrap());

    // double extension = single extension with concatenated shapes
    let two_step = sc_extend_blockdiag(
        &sc_extend_blockdiag(&sc, &SpaceShape::fin(1), &SpaceShape::fin(1)),
        &SpaceShape::fin(2),
        &SpaceShape::fin(2),
    );
    let one_step = sc_extend_blockdiag(
        &sc,
        &SpaceShape::fin(2).concat(&SpaceShape::fin(1)),
        &SpaceShape::fin(2).concat(&SpaceShape::fin(1)),
    );
    assert_eq!(two_step.b, one_step.b);
    assert_eq!(two_step.c, one_step.c);
    assert_eq!(two_step.a.op(), one_step.a.op());
}

#[test]
fn eae_construct_examples() {
    // identity case
    let x = SpaceShape::seq();
    let u = BlockOp::identity(&x);
    let ext = eae_construct(&u, &u, &cfg()).unwrap();
    assert!(eae_verify(&u, &u, &ext, 30).unwrap());

    // shift(-1) on both sides, verified on a 50-coordinate window
    let u = seq_op(SeqOp::shift(-1));
    let ext = eae_construct(&u, &u, &cfg()).unwrap();
    assert!(eae_verify(&u, &u, &ext, 50).unwrap());

    // different alpha/beta at the same index: refused
    let u = seq_op(SeqOp::shift(-1)); // (1, 0)
    let bumped = {
        let r = perturb_kernel(&u, 2, &cfg()).unwrap();
        u.add(&r).unwrap() // (2, 1)
    };
    assert!(matches!(
        eae_construct(&u, &bumped, &cfg()),
        Err(OpError::NotEAE)
    ));

    // tampering breaks verification: swap E for its inverse
    let ext = eae_construct(&u, &u, &cfg()).unwrap();
    let tampered = schurlab_core::coupling::Extension {
        e: ext.e.inverse(),
        f: ext.f,
        x0: ext.x0,
        y0: ext.y0,
    };
    assert!(!eae_verify(&u, &u, &tampered, 30).unwrap());
}

#[test]
fn eae_construct_mismatched_shapes() {
    // X = [Seq], Y = [Seq, Fin(1)]: X does not contain Y, so the direct
    // kernel/range matching route is exercised
    let y = SpaceShape::seq().concat(&SpaceShape::fin(1));
    let u = seq_op(SeqOp::shift(-2)); // (2, 0)
    let mut v = BlockOp::identity(&y);
    v.set_entry(0, 0, schurlab_core::block::Entry::Seq(SeqOp::shift(-2)))
        .unwrap();
    let du = data(&u);
    let dv = data(&v);
    assert!(eae_check(&du, &dv));
    let ext = eae_construct(&u, &v, &cfg()).unwrap();
    assert!(eae_verify(&u, &v, &ext, 40).unwrap());
}

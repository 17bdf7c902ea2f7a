use rcalg::chain::{ChainModel, Relation, Term};
use rcalg::tight::{
    distinguish, FidelityMode, LadderSystem, OrdinalIdx, TightCoding, TightParams,
    ZeroProductEvaluator,
};
use rcalg::Error;

const fn o(k: usize, n: usize) -> OrdinalIdx {
    OrdinalIdx::new(k, n)
}

const OMEGA: OrdinalIdx = o(1, 0);

fn build(k_max: usize, s: &[OrdinalIdx], budget: usize) -> TightCoding {
    TightCoding::build(&TightParams {
        k_max,
        s: s.to_vec(),
        budget,
        ladders: None,
    })
    .unwrap()
}

#[test]
fn default_ladders_start_after_previous_limit() {
    let l = LadderSystem::default_ladders(3, 5);
    assert_eq!(&l.get(OMEGA)[..3], &[o(0, 1), o(0, 2), o(0, 3)]);
    assert_eq!(&l.get(o(2, 0))[..2], &[o(1, 1), o(1, 2)]);
    assert!(l.ladders.values().flatten().all(|d| d.n != 0));
}

#[test]
fn coded_omega_relations() {
    let tc = build(2, &[OMEGA], 6);
    let rel = &tc.presentation().relations;
    assert_eq!(rel.len(), 1);
    assert_eq!(
        rel[0],
        Relation::Ideal {
            upper: 6,
            lower: vec![1, 2, 3, 4, 5]
        }
    );
}

#[test]
fn ladder_meeting_coded_set_rejected() {
    let mut l = LadderSystem::default_ladders(3, 4);
    l.ladders.insert(o(2, 0), vec![o(1, 0), o(1, 1)]);
    let err = TightCoding::build(&TightParams {
        k_max: 3,
        s: vec![OMEGA, o(2, 0)],
        budget: 4,
        ladders: Some(l),
    })
    .unwrap_err();
    assert!(matches!(err, Error::InvalidLadder(_)));
}

#[test]
fn non_rc_certificates() {
    let tc = build(2, &[OMEGA], 6);
    let c = tc.verify_non_rc(OMEGA, 6).unwrap();
    assert!(c.passed, "{:?}", c.refutation);
    assert_eq!(c.checks.len(), 5);
    assert!(c.checks[0].exhaustive.is_some());
    assert!(c
        .checks
        .iter()
        .all(|e| e.witness_stage == Some(e.stage + 1)));
    assert!(tc.verify_non_rc(OMEGA, 2).unwrap().passed);
    let free = build(2, &[], 6);
    assert!(matches!(
        free.verify_non_rc(OMEGA, 6),
        Err(Error::Precondition(_))
    ));
    assert!(!free.non_rc_attempt(OMEGA, 6).unwrap().passed);
}

#[test]
fn rc_and_closed_form() {
    let tc = build(2, &[OMEGA], 6);
    let r = tc.verify_rc(o(0, 3), 6).unwrap();
    assert!(r.certificate.stable);
    let row = r.closed_form.iter().find(|c| c.delta == o(0, 3)).unwrap();
    assert!(row.mismatched_stages.is_empty());

    let lc = tc.localizer().chain_for(1 << 6).unwrap();
    let st = lc.chain.stage(6).unwrap();
    let cut3 = lc.local_mask(tc.filtration().cut(3));
    let x = st.eval(&lc.local_term(&Term::Gen(6))).unwrap();
    let expect = st.eval(&lc.local_term(&Term::sum([1, 2]))).unwrap();
    assert_eq!(st.lpr_cut(cut3, &x).unwrap(), expect);
    let cut1 = lc.local_mask(tc.filtration().cut(1));
    assert!(st.lpr_cut(cut1, &x).unwrap().is_zero());

    let bad = tc.rc_attempt(OMEGA, 6).unwrap();
    assert!(!bad.stable);
    assert!(bad.failure_locus.iter().any(|p| p == "x[ω]"));
}

#[test]
fn fidelity_localized_and_full_agree() {
    for s in [vec![], vec![OMEGA], vec![o(2, 0)], vec![OMEGA, o(2, 0)]] {
        let tc = build(3, &s, 4);
        let a = tc.fidelity(4, FidelityMode::Localized).unwrap();
        let b = tc.fidelity(4, FidelityMode::FullStage).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.ok()), "{a:?}");
    }
}

#[test]
fn zero_product_examples() {
    let tc = build(2, &[OMEGA], 6);
    let z = ZeroProductEvaluator::new(&tc).unwrap();
    let r = z.evaluate(&[OMEGA, o(0, 1)], &[1, 0]).unwrap();
    assert!(r.model_zero && r.predicate);
    let r = z.evaluate(&[OMEGA, o(0, 1)], &[0, 0]).unwrap();
    assert!(!r.model_zero && !r.predicate);
    for g in 0..4u8 {
        let r = z.evaluate(&[o(0, 1), o(0, 2)], &[g & 1, g >> 1]).unwrap();
        assert!(!r.model_zero && r.agrees());
    }
}

#[test]
fn zero_product_matches_full_model_sample() {
    let tc = build(2, &[OMEGA], 4);
    let z = ZeroProductEvaluator::new(&tc).unwrap();
    let c = ChainModel::new(tc.presentation().clone()).unwrap();
    let st = c.stage(4).unwrap();
    let scope = tc.scope();
    for ymask in 0u32..1 << scope.len() {
        if ymask.count_ones() > 3 {
            continue;
        }
        let y: Vec<OrdinalIdx> = (0..scope.len())
            .filter(|i| ymask >> i & 1 == 1)
            .map(|i| scope[i])
            .collect();
        for g in 0u32..1 << y.len() {
            let signs: Vec<u8> = (0..y.len()).map(|i| (g >> i & 1) as u8).collect();
            let lits = y
                .iter()
                .zip(&signs)
                .map(|(&a, &s)| Term::literal(tc.index(a).unwrap(), s))
                .collect();
            let full = st.eval(&Term::And(lits)).unwrap().is_zero();
            assert_eq!(z.evaluate(&y, &signs).unwrap().model_zero, full);
        }
    }
}

#[test]
fn distinguish_examples() {
    let a = build(3, &[OMEGA], 8);
    let b = build(3, &[o(2, 0)], 8);
    let r = distinguish(&a, &b, 8).unwrap();
    assert!(r.differ && r.both_exact);
    assert_eq!(r.first.non_rc, vec![OMEGA]);
    assert_eq!(r.second.non_rc, vec![o(2, 0)]);
    let same = distinguish(&a, &a, 8).unwrap();
    assert!(!same.differ);
    let e = build(3, &[], 8);
    let r = distinguish(&e, &a, 8).unwrap();
    assert!(r.first.non_rc.is_empty() && r.differ);
    assert!(distinguish(&a, &build(2, &[OMEGA], 8), 8).is_err());
}

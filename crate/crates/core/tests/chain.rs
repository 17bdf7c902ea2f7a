use proptest::prelude::*;
use rcalg::chain::{
    non_principality_certificate, rc_check, ChainElem, ChainModel, Filtration, Localizer,
    PresentedBA, Relation, Term,
};
use rcalg::oracle;
use rcalg::Error;

fn leq_chain() -> PresentedBA {
    PresentedBA {
        generators: vec!["a".into(), "b".into()],
        relations: vec![Relation::Leq { lower: 0, upper: 1 }],
        schedule: vec![vec![0], vec![1]],
    }
}

#[test]
fn free_chain_stages_are_free() {
    let c = ChainModel::new(PresentedBA::free_chain(3).unwrap()).unwrap();
    for m in 0..=3 {
        assert_eq!(c.stage(m).unwrap().atom_count(), 1 << m);
    }
}

#[test]
fn single_inequality_kills_one_minterm() {
    let c = ChainModel::new(leq_chain()).unwrap();
    assert_eq!(c.stage(2).unwrap().atom_count(), 3);
    let a = c.elem(2, &Term::Gen(0)).unwrap();
    let b = c.elem(2, &Term::Gen(1)).unwrap();
    assert!(c.chain_leq(&a, &b).unwrap());
    assert!(!c.chain_leq(&b, &a).unwrap());
}

#[test]
fn stage_atoms_match_implication_oracle() {
    let p = PresentedBA {
        generators: (0..4).map(|i| format!("g{i}")).collect(),
        relations: vec![
            Relation::Leq { lower: 0, upper: 2 },
            Relation::Ideal {
                upper: 3,
                lower: vec![0, 1],
            },
        ],
        schedule: vec![vec![0, 1], vec![2], vec![3]],
    };
    let c = ChainModel::new(p).unwrap();
    let top = c.stage(3).unwrap();
    let models = oracle::implication_models(4, &[(0, 2), (0, 3), (1, 3)]);
    let mut globals: Vec<u32> = top.globals().iter().map(|&g| g as u32).collect();
    globals.sort();
    assert_eq!(globals, models);
}

#[test]
fn inconsistent_presentation_names_relation() {
    let p = PresentedBA {
        generators: vec!["a".into(), "b".into(), "y".into()],
        relations: vec![
            Relation::Leq { lower: 0, upper: 2 },
            Relation::Leq { lower: 2, upper: 1 },
        ],
        schedule: vec![vec![0, 1], vec![2]],
    };
    let c = ChainModel::new(p).unwrap();
    match c.stage(2) {
        Err(Error::PresentationInconsistent { stage, relation }) => {
            assert_eq!(stage, 2);
            assert!(relation == "a <= y" || relation == "y <= b", "{relation}");
        }
        other => panic!("expected inconsistency, got {other:?}"),
    }
}

#[test]
fn lift_identity_and_canonical_stage() {
    let c = ChainModel::new(PresentedBA::free_chain(3).unwrap()).unwrap();
    let e = c.elem(1, &Term::Gen(0)).unwrap();
    assert_eq!(c.lift(&e, 1).unwrap(), e.value);
    let high = ChainElem {
        stage: 3,
        value: c.lift(&e, 3).unwrap(),
    };
    let canon = c.canonicalize(&high).unwrap();
    assert_eq!(canon.stage, 1);
    assert_eq!(canon.value, e.value);
    assert_eq!(
        c.canonicalize(&c.elem(3, &Term::One).unwrap())
            .unwrap()
            .stage,
        0
    );
}

#[test]
fn subalgebra_at_ends() {
    let c = ChainModel::new(PresentedBA::free_chain(3).unwrap()).unwrap();
    let f = Filtration::by_index(3);
    assert_eq!(c.subalgebra_at(&f, 0, 3).unwrap().block_count(), 1);
    assert!(c.subalgebra_at(&f, 3, 3).unwrap().is_whole());
    assert!(c.verify_filtration(&f, 3).unwrap());
}

#[test]
fn rc_check_free_chain_stamps_at_intro() {
    let p = PresentedBA::free_chain(4).unwrap();
    let loc = Localizer::new(p).unwrap();
    let f = Filtration::by_index(4);
    let probes: Vec<Term> = (0..4)
        .flat_map(|g| [Term::literal(g, 0), Term::literal(g, 1)])
        .collect();
    for alpha in 0..=4 {
        let cert = rc_check(&loc, &f, alpha, 4, &probes).unwrap();
        assert!(cert.stable);
        assert!(cert.failure_locus.is_empty());
        assert!(cert.probes.iter().all(|p| p.stamp == p.intro_stage));
    }
}

#[test]
fn trivial_cut_lpr_dichotomy() {
    let c = ChainModel::new(PresentedBA::free_chain(2).unwrap()).unwrap();
    let st = c.stage(2).unwrap();
    let g = st.gen(0).unwrap();
    assert!(st.lpr_cut(0, &g).unwrap().is_zero());
    assert!(st.lpr_cut(0, &st.algebra.one()).unwrap().is_one());
}

fn ladder_presentation(len: usize) -> PresentedBA {
    // x is generator 0, ladder points 1..len, x <= nothing, points <= x.
    let mut generators = vec!["x".to_string()];
    generators.extend((1..=len).map(|i| format!("d{i}")));
    PresentedBA {
        generators,
        relations: vec![Relation::Ideal {
            upper: 0,
            lower: (1..=len).collect(),
        }],
        schedule: std::iter::once(vec![0])
            .chain((1..=len).map(|i| vec![i]))
            .collect(),
    }
}

#[test]
fn non_principality_ladder_passes() {
    let p = ladder_presentation(4);
    let loc = Localizer::new(p).unwrap();
    let f = Filtration {
        order: vec![1, 2, 3, 4, 0],
    };
    let sched: Vec<Term> = (1..=4).map(|j| Term::sum(1..=j)).collect();
    let cert = non_principality_certificate(&loc, &f, 4, &Term::Gen(0), &sched, 5).unwrap();
    assert!(cert.passed, "{:?}", cert.refutation);
    assert!(cert.checks.iter().all(|c| c.exhaustive.is_some()));
}

#[test]
fn non_principality_refutations() {
    let p = ladder_presentation(3);
    let loc = Localizer::new(p).unwrap();
    let f = Filtration {
        order: vec![1, 2, 3, 0],
    };
    let constant = vec![Term::Gen(1), Term::Gen(1)];
    let cert = non_principality_certificate(&loc, &f, 3, &Term::Gen(0), &constant, 4).unwrap();
    assert!(!cert.passed);
    assert!(cert.refutation.unwrap().contains("strictly"));

    let free = Localizer::new(PresentedBA::free_chain(3).unwrap()).unwrap();
    let f = Filtration::by_index(3);
    let cert = non_principality_certificate(&free, &f, 2, &Term::Gen(2), &[Term::Zero], 3).unwrap();
    assert!(!cert.passed);

    let bad = non_principality_certificate(&free, &f, 1, &Term::Gen(2), &[Term::Gen(1)], 3);
    assert!(matches!(bad, Err(Error::Usage(_))));
}

fn arb_presentation() -> impl Strategy<Value = PresentedBA> {
    (2usize..=7)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n, 0..n), 0..5),
                prop::collection::vec(0..n, n),
            )
        })
        .prop_map(|(n, rels, stage_of)| {
            let stages = stage_of.iter().copied().max().unwrap_or(0) + 1;
            let mut schedule = vec![Vec::new(); stages];
            for (g, &s) in stage_of.iter().enumerate() {
                schedule[s].push(g);
            }
            PresentedBA {
                generators: (0..n).map(|i| format!("g{i}")).collect(),
                relations: rels
                    .into_iter()
                    .filter(|(a, b)| a != b)
                    .map(|(lower, upper)| Relation::Leq { lower, upper })
                    .collect(),
                schedule,
            }
        })
}

fn consistent(c: &ChainModel) -> bool {
    (0..=c.stage_count()).all(|m| c.stage(m).is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embeddings_preserve_and_reflect_order(p in arb_presentation(), seed in any::<u64>()) {
        let c = ChainModel::new(p).unwrap();
        prop_assume!(consistent(&c));
        let top = c.stage_count();
        for m in 0..top {
            let st = c.stage(m).unwrap();
            let n = st.atom_count();
            let pick = |k: u64| {
                let mask = seed.rotate_left(k as u32) ^ k.wrapping_mul(0x9e3779b97f4a7c15);
                st.algebra.elem(rcalg::bitset::AtomSet::from_fn(n, |a| mask >> (a % 64) & 1 == 1)).unwrap()
            };
            let (a, b) = (pick(m as u64), pick(m as u64 + 17));
            let ea = ChainElem { stage: m, value: a.clone() };
            let eb = ChainElem { stage: m, value: b.clone() };
            let la = c.lift(&ea, m + 1).unwrap();
            let lb = c.lift(&eb, m + 1).unwrap();
            prop_assert_eq!(a.leq(&b).unwrap(), la.leq(&lb).unwrap());
            prop_assert_eq!(a == b, la == lb);
            prop_assert_eq!(a.lt(&b).unwrap(), la.lt(&lb).unwrap());
        }
    }

    #[test]
    fn localized_lpr_matches_full_model(p in arb_presentation(), alpha in 0usize..8) {
        let full = Localizer::whole(p.clone()).unwrap();
        let c = ChainModel::new(p.clone()).unwrap();
        prop_assume!(consistent(&c));
        let local = Localizer::new(p.clone()).unwrap();
        let n = p.generators.len();
        let f = Filtration::by_index(n);
        let alpha = alpha.min(n);
        let top = p.stage_count();
        let mut probes: Vec<Term> = Vec::new();
        for g in 0..n {
            probes.push(Term::literal(g, 0));
            probes.push(Term::literal(g, 1));
            if g + 1 < n {
                probes.push(Term::Or(vec![Term::literal(g, 1), Term::Gen(g + 1)]));
            }
        }
        let a = rc_check(&full, &f, alpha, top, &probes).unwrap();
        let b = rc_check(&local, &f, alpha, top, &probes).unwrap();
        for (x, y) in a.probes.iter().zip(&b.probes) {
            prop_assert_eq!(x.stamp, y.stamp);
            prop_assert_eq!(x.stable, y.stable);
            let gx: Vec<bool> = x.values.iter().map(|v| v.grew).collect();
            let gy: Vec<bool> = y.values.iter().map(|v| v.grew).collect();
            prop_assert_eq!(gx, gy);
        }
    }

    #[test]
    fn filtration_matches_kernel_closure(p in arb_presentation()) {
        let c = ChainModel::new(p.clone()).unwrap();
        prop_assume!(consistent(&c));
        let f = Filtration::by_index(p.generators.len());
        prop_assert!(c.verify_filtration(&f, p.stage_count()).unwrap());
    }
}

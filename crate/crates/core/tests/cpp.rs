use rcalg::chain::{ChainElem, ChainModel, PresentedBA};
use rcalg::cpp::{
    admissible_patterns, build_cpp, extend_independent_witness, sirota_ladder, CppParams, JPattern,
    RowPattern,
};
use rcalg::Error;

fn triple(n: usize, l_max: usize, w: usize) -> rcalg::cpp::CppTriple {
    build_cpp(&CppParams { n, l_max, w }).unwrap()
}

fn finite(c: &[usize]) -> RowPattern {
    RowPattern::Finite(c.to_vec())
}

#[test]
fn smallest_triple() {
    let t = triple(1, 1, 0);
    assert_eq!(t.h.algebra.atom_count(), 2);
    // x ≥ x_{1,0}: atoms of H below x_{1,0} appear once, the other twice.
    assert_eq!(t.k.algebra.atom_count(), 3);
    let x10 = t.h_in_k(&t.h.generators[0]).unwrap();
    assert!(x10.lt(&t.k.x).unwrap());
    assert_eq!(t.l.algebra.atom_count(), 3);
}

#[test]
fn column_products_and_blocks() {
    let t = triple(2, 2, 0);
    assert_eq!(t.h.algebra.atom_count(), 16);
    assert_eq!(t.blocks(), vec![vec![0, 1], vec![2, 3]]);
    let p0 = t.h.generators[0].meet(&t.h.generators[2]).unwrap();
    assert_eq!(t.column_products[0], p0);
    assert!(t.ideal_law().unwrap().holds());
    assert!(t.block_law().unwrap().holds());
}

#[test]
fn chain_top_stage_matches_kernel_triple() {
    for (n, l, w) in [(1, 3, 1), (2, 2, 0), (3, 2, 1), (2, 3, 1)] {
        let t = triple(n, l, w);
        let k = t.chain(false).unwrap().stage(l).unwrap();
        let lch = t.chain(true).unwrap().stage(l).unwrap();
        assert_eq!(k.atom_count(), t.k.algebra.atom_count());
        assert_eq!(lch.atom_count(), t.l.algebra.atom_count());
    }
}

#[test]
fn k_is_free_in_l() {
    for w in 0..3 {
        let t = triple(2, 2, w);
        let wit = t.k_free_in_l().unwrap().unwrap();
        assert_eq!(wit.len(), w);
    }
}

#[test]
fn clause_ii_certificates() {
    let t = triple(2, 3, 1);
    let c = t.verify_clause_ii().unwrap();
    assert!(c.passed && !c.degenerate);
    let k = c.in_k.unwrap();
    assert_eq!(k.checks.len(), 2);
    assert!(k
        .checks
        .iter()
        .all(|e| e.witness_stage == Some(e.stage + 1)));
    assert!(c.in_l.unwrap().passed);
    let d = triple(1, 1, 0).verify_clause_ii().unwrap();
    assert!(d.degenerate && d.passed && d.in_k.is_none());
}

#[test]
fn clause_i_examples() {
    let t = triple(2, 3, 0);
    let empty = JPattern {
        rows: vec![finite(&[]), finite(&[])],
    };
    let c = t.verify_clause_i(&empty).unwrap();
    assert!(c.stable && c.in_k.iter().all(|s| s.exact()));
    assert!(c.key_step.x_independent && c.key_step.meet_trivial);

    let j = JPattern {
        rows: vec![finite(&[0]), finite(&[])],
    };
    for l in 1..=3 {
        let c = triple(2, l, 1).verify_clause_i(&j).unwrap();
        assert!(c.stable, "{c:?}");
        assert_eq!(c.generators, vec!["x[1,0]".to_string()]);
    }

    let h = JPattern::whole(2);
    assert!(matches!(t.verify_clause_i(&h), Err(Error::Usage(_))));
    let (k, l) = t.lpr_profile(&h).unwrap();
    assert!(k
        .iter()
        .chain(&l)
        .filter(|s| s.stage > 1)
        .all(|s| !s.exact()));
    assert!(k[0].exact());
}

#[test]
fn key_step_meet_is_principal_not_trivial() {
    // With a column of block k0 kept, I ∩ H_m contains p_0.
    let t = triple(2, 3, 0);
    let j = JPattern {
        rows: vec![finite(&[0]), RowPattern::All],
    };
    let c = t.verify_clause_i(&j).unwrap();
    assert!(c.stable);
    assert_eq!(c.key_step.m, Some(0));
    assert!(c.key_step.meet_principal && !c.key_step.meet_trivial);
    assert!(!c.key_step.x_independent);
}

#[test]
fn every_admissible_pattern_is_stable() {
    for (n, l) in [(1, 3), (2, 2), (3, 2)] {
        let t = triple(n, l, 1);
        let pats = admissible_patterns(n, l);
        assert_eq!(pats.len(), ((1usize << l) + 1).pow(n as u32) - 1);
        for j in pats {
            let c = t.verify_clause_i(&j).unwrap();
            assert!(c.stable, "{j:?}");
            assert_eq!(c.key_step.x_independent, c.key_step.meet_trivial);
        }
    }
}

#[test]
fn sirota_free_chain_takes_new_generators() {
    let c = ChainModel::new(PresentedBA::free_chain(4).unwrap()).unwrap();
    let ladder = sirota_ladder(&c, 0b1, 4).unwrap();
    assert!(ladder.complete());
    assert_eq!(ladder.witnesses, vec!["g1", "g2", "g3"]);
}

#[test]
fn sirota_fails_where_x_enters() {
    let t = triple(2, 2, 0);
    let c = t.chain(false).unwrap();
    let h = (1u64 << 4) - 1;
    let ladder = sirota_ladder(c, h, 2).unwrap();
    assert_eq!(ladder.failed_at, Some(1));
    assert!(ladder.steps[0].exhaustive);
    let whole = sirota_ladder(c, u64::MAX, 2).unwrap();
    assert!(whole.complete() && whole.witnesses.is_empty());
    let o = extend_independent_witness(c, u64::MAX, &[], 1).unwrap();
    assert!(o.found.is_none() && o.exhaustive);
}

#[test]
fn sirota_rejects_dependent_witnesses() {
    let c = ChainModel::new(PresentedBA::free_chain(2).unwrap()).unwrap();
    let st = c.stage(1).unwrap();
    let g0 = ChainElem {
        stage: 1,
        value: st.gen(0).unwrap(),
    };
    assert!(matches!(
        extend_independent_witness(&c, 0b1, &[g0], 2),
        Err(Error::Precondition(_))
    ));
}

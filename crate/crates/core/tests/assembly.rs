use std::collections::BTreeMap;

use rcalg::assembly::{build_as, ASAssembly, AsFixture};
use rcalg::cpp::CppParams;
use rcalg::lambda::{BasedFamily, FamilyMember, LambdaSystem, NodeSpec};

fn fixture(text: &str) -> ASAssembly {
    let f = AsFixture::parse(text).unwrap();
    build_as(&f.family, &f.params).unwrap()
}

fn height2() -> ASAssembly {
    fixture(include_str!("../fixtures/height2.json"))
}

fn disjoint() -> ASAssembly {
    fixture(include_str!("../fixtures/disjoint.json"))
}

fn counter() -> ASAssembly {
    fixture(include_str!("../fixtures/counter.json"))
}

/// Atoms of `Fr(elements, x_η, y_η)` modulo `∏ column ≤ x_η`, counted by
/// enumerating assignments.
fn presented_atoms(asm: &ASAssembly) -> usize {
    let f = &asm.family;
    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    for m in &f.members {
        for x in m.blocks.iter().flatten() {
            let n = ids.len();
            ids.entry(x).or_insert(n);
        }
    }
    let e = ids.len();
    let nodes = asm.finals.len();
    let w = asm.params.w;
    let mut clauses: Vec<(u64, usize)> = Vec::new();
    for (i, eta) in asm.finals.iter().enumerate() {
        let m = f.member(eta).unwrap();
        for c in 0..asm.params.l_max {
            let body = m
                .blocks
                .iter()
                .fold(0u64, |acc, b| acc | 1 << ids[b[c].as_str()]);
            clauses.push((body, e + i));
        }
    }
    let vars = e + nodes;
    let sat = (0u64..1 << vars)
        .filter(|&t| {
            clauses
                .iter()
                .all(|&(body, head)| t & body != body || t >> head & 1 == 1)
        })
        .count();
    sat << (w * nodes)
}

fn node(node: &[usize], rank: usize, base: &[&str]) -> NodeSpec {
    NodeSpec {
        node: node.to_vec(),
        rank,
        base: base.iter().map(|s| s.to_string()).collect(),
        marked: false,
        limit: false,
    }
}

fn flat(nodes: Vec<NodeSpec>, members: Vec<(Vec<usize>, Vec<Vec<&str>>)>) -> BasedFamily {
    BasedFamily {
        system: LambdaSystem { nodes },
        members: members
            .into_iter()
            .map(|(node, blocks)| FamilyMember {
                node,
                blocks: blocks
                    .into_iter()
                    .map(|b| b.into_iter().map(String::from).collect())
                    .collect(),
            })
            .collect(),
        finiteness_bound: 0,
    }
}

#[test]
fn one_node_is_a_copy_of_l() {
    let f = flat(
        vec![node(&[], 3, &[]), node(&[0], 0, &["a", "b"])],
        vec![(vec![0], vec![vec!["a"], vec!["b"]])],
    );
    for w in [0, 1] {
        let p = CppParams { n: 2, l_max: 1, w };
        let asm = build_as(&f, &p).unwrap();
        assert!(asm.theta_pairs.is_empty());
        assert_eq!(asm.a.atom_count(), asm.triple.l.algebra.atom_count());
    }
}

#[test]
fn one_shared_element_gives_one_pair() {
    let f = flat(
        vec![
            node(&[], 5, &[]),
            node(&[0], 0, &["a", "b"]),
            node(&[1], 0, &["a", "b", "c"]),
        ],
        vec![
            (vec![0], vec![vec!["a"], vec!["b"]]),
            (vec![1], vec![vec!["a"], vec!["c"]]),
        ],
    );
    let asm = build_as(
        &f,
        &CppParams {
            n: 2,
            l_max: 1,
            w: 0,
        },
    )
    .unwrap();
    assert_eq!(asm.theta_pairs.len(), 1);
    assert_eq!(asm.theta_pairs[0].element, "a");
    assert!(asm.a.atom_count() < asm.g.atom_count());
    assert_eq!(asm.a.atom_count(), presented_atoms(&asm));
}

#[test]
fn quotient_matches_the_presentation() {
    for asm in [height2(), disjoint(), counter()] {
        assert_eq!(asm.a.atom_count(), presented_atoms(&asm));
    }
    let asm = height2();
    assert_eq!(asm.g.atom_count(), 7usize.pow(4));
    assert_eq!(asm.theta_pairs.len(), 3);
}

#[test]
fn wider_parameters() {
    let f = flat(
        vec![
            node(&[], 5, &[]),
            node(&[0], 0, &["a", "b"]),
            node(&[1], 0, &["a", "b", "c"]),
        ],
        vec![
            (vec![0], vec![vec!["a", "b"]]),
            (vec![1], vec![vec!["c", "b"]]),
        ],
    );
    let asm = build_as(
        &f,
        &CppParams {
            n: 1,
            l_max: 2,
            w: 1,
        },
    )
    .unwrap();
    assert_eq!(asm.a.atom_count(), presented_atoms(&asm));
    let d = asm.claim1_verify(Some(0), 2).unwrap();
    assert!(!d.holds(), "the only block of (1) meets (0)");
    assert!(asm.claim1_verify(None, 1).unwrap().holds());
}

#[test]
fn identified_generators_agree() {
    let asm = height2();
    for t in &asm.theta_pairs {
        let i = asm
            .finals
            .iter()
            .position(|e| rcalg::lambda::show(e) == t.left.0)
            .unwrap();
        let j = asm
            .finals
            .iter()
            .position(|e| rcalg::lambda::show(e) == t.right.0)
            .unwrap();
        assert_eq!(asm.images[i][t.left.1], asm.images[j][t.right.1]);
    }
}

#[test]
fn filtration_ends_and_middle() {
    let asm = height2();
    assert_eq!(asm.filtration(0).unwrap().block_count(), 1);
    assert!(asm.filtration(asm.top()).unwrap().is_whole());
    // a, b, e, x_(0,0), x_(0,1) with a·b ≤ x_(0,0) and a·e ≤ x_(0,1).
    assert_eq!(asm.filtration(1).unwrap().block_count(), 25);
    assert!(asm.filtration(asm.top() + 1).is_err());
}

#[test]
fn disjoint_family_is_a_coproduct() {
    let asm = disjoint();
    assert_eq!(asm.a.atom_count(), asm.g.atom_count());
    for beta in 0..5 {
        for alpha in std::iter::once(None).chain((0..beta).map(Some)) {
            let d = asm.claim1_verify(alpha, beta).unwrap();
            assert!(d.holds(), "{alpha:?} {beta}");
            assert!(d.steps.iter().all(|s| s.complement_is_whole));
        }
    }
    assert!(asm.gamma_diagnostic().unwrap().flagged.is_empty());
    assert!(asm.claim2_verify(0, 0).is_err());
    assert!(asm.rc_at_marked_stages(0).is_err());
}

#[test]
fn height_two_claims() {
    let asm = height2();
    let lambda = asm.family.system.root().unwrap().rank;
    for beta in 0..lambda {
        for alpha in std::iter::once(None).chain((0..beta).map(Some)) {
            let d = asm.claim1_verify(alpha, beta).unwrap();
            assert!(d.holds(), "{alpha:?} {beta}: {d:?}");
            if alpha.map_or(0, |a| a + 1) == beta {
                assert!(d.steps.is_empty());
            }
        }
    }
    for alpha in 0..asm.top() {
        let rank = asm.family.system.get(&[alpha]).unwrap().rank;
        for beta in 0..rank {
            let d = asm.claim2_verify(alpha, beta).unwrap();
            assert!(d.holds(), "{alpha} {beta}: {d:?}");
        }
        assert!(asm.claim2_verify(alpha, rank).is_err());
    }
    assert!(asm.claim1_verify(Some(2), 2).is_err());
}

#[test]
fn overlaps_are_never_finitely_free() {
    let asm = height2();
    let d = asm.claim1_verify(None, 2).unwrap();
    assert!(d.holds());
    assert!(d.steps.iter().any(|s| !s.overlap.is_empty()));
    assert!(!d.finite_free);
}

#[test]
fn marked_stage_certificate() {
    let asm = height2();
    let c = asm.rc_at_marked_stages(1).unwrap();
    assert!(c.marked && c.complete, "{c:?}");
    let c = asm.rc_at_marked_stages(0).unwrap();
    assert!(!c.marked && c.complete);
    assert!(c.note.contains("limit"));
}

#[test]
fn gamma_shadow() {
    assert!(height2().gamma_diagnostic().unwrap().flagged.is_empty());
    let g = counter().gamma_diagnostic().unwrap();
    assert!(!g.flagged.is_empty());
    let asm = counter();
    assert!(asm.claim1_verify(None, 1).unwrap().finding.is_some());
}

#[test]
fn capacity_and_shape_errors() {
    let f = flat(
        vec![node(&[], 3, &[]), node(&[0], 0, &["a", "b"])],
        vec![(vec![0], vec![vec!["a"], vec!["b"]])],
    );
    assert!(build_as(
        &f,
        &CppParams {
            n: 2,
            l_max: 3,
            w: 0
        }
    )
    .is_err());
    assert!(build_as(
        &f,
        &CppParams {
            n: 1,
            l_max: 1,
            w: 0
        }
    )
    .is_err());
}

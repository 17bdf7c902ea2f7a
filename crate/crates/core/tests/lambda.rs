use std::cmp::Ordering;

use rcalg::lambda::{
    check_order_1, check_order_2, lex_compare, reshuffle_order, reshuffle_order_2, BasedFamily,
    Height, LambdaSystem, NodeSpec, DEFAULT_SEARCH_BUDGET,
};
use rcalg::transversal::{family_from_lambda_system, find_transversal};

fn load(text: &str) -> BasedFamily {
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    serde_json::from_value(v["family"].clone()).unwrap()
}

fn height2() -> BasedFamily {
    load(include_str!("../fixtures/height2.json"))
}

fn counter() -> BasedFamily {
    load(include_str!("../fixtures/counter.json"))
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

#[test]
fn fixtures_are_valid() {
    for f in [
        height2(),
        counter(),
        load(include_str!("../fixtures/disjoint.json")),
    ] {
        assert_eq!(f.validate(), vec![]);
    }
    let f = height2();
    assert_eq!(f.system.height(), Height::Uniform(2));
    assert_eq!(f.system.marked_root_indices(), vec![1]);
    assert_eq!(f.system.finals().len(), 4);
}

#[test]
fn violations_name_node_and_clause() {
    let sys = LambdaSystem {
        nodes: vec![
            node(&[], 3, &["z"]),
            node(&[0], 0, &["a", "b", "c"]),
            node(&[5], 1, &["a"]),
        ],
    };
    let v = sys.validate();
    let has = |n: &str, c: &str| v.iter().any(|x| x.node == n && x.clause == c);
    assert!(has("()", "2"), "{v:?}");
    assert!(has("(0)", "2a"), "{v:?}");
    assert!(has("(5)", "1a"), "{v:?}");
    assert!(has("(5)", "1b"), "{v:?}");
    assert!(has("(5)", "2b"), "{v:?}");
}

#[test]
fn literal_clause_2a_at_the_root_is_what_fails() {
    // With B_∅ = ∅ the parent's B cannot exceed a child rank; the child's B can.
    let sys = LambdaSystem {
        nodes: vec![node(&[], 2, &[]), node(&[0], 0, &["a"])],
    };
    assert_eq!(sys.validate(), vec![]);
}

#[test]
fn continuity_at_declared_limits() {
    let mut l = node(&[2], 0, &["a"]);
    l.limit = true;
    let sys = LambdaSystem {
        nodes: vec![
            node(&[], 4, &[]),
            node(&[0], 0, &["a"]),
            node(&[1], 0, &["a", "b"]),
            l,
        ],
    };
    assert!(sys.validate().iter().any(|v| v.clause == "2b"));
}

#[test]
fn mixed_height_and_missing_parent() {
    let sys = LambdaSystem {
        nodes: vec![
            node(&[], 4, &[]),
            node(&[0], 0, &["a"]),
            node(&[1], 1, &["a", "b"]),
            node(&[1, 0], 0, &[]),
        ],
    };
    assert_eq!(sys.height(), Height::Mixed(vec![1, 2]));
    let sys = LambdaSystem {
        nodes: vec![node(&[], 4, &[]), node(&[0, 0], 0, &[])],
    };
    assert!(sys.validate().iter().any(|v| v.clause == "tree"));
}

#[test]
fn family_must_be_based() {
    let mut f = height2();
    f.members[0].blocks[0][0] = "zz".into();
    assert!(f.validate().iter().any(|v| v.clause == "based"));
    let mut f = height2();
    f.members.pop();
    assert!(f.validate().iter().any(|v| v.clause == "based"));
    let mut f = height2();
    f.members[1].blocks[1] = vec!["a".into()];
    assert!(f.validate().iter().any(|v| v.clause == "blocks"));
}

#[test]
fn lex_order_puts_prefixes_first() {
    assert_eq!(lex_compare(&[0], &[0, 3]), Ordering::Less);
    assert_eq!(lex_compare(&[0, 3], &[1]), Ordering::Less);
    assert_eq!(lex_compare(&[1, 0], &[1, 0]), Ordering::Equal);
}

#[test]
fn clause_one_orderings() {
    let f = height2();
    let all = f.system.finals();
    for eta0 in &all {
        let r = reshuffle_order(&f, &all, eta0, DEFAULT_SEARCH_BUDGET).unwrap();
        let order = r.order.expect("ordering exists");
        assert_eq!(check_order_1(&f, &all, eta0, &order), Vec::<String>::new());
    }
    let f = counter();
    let pair = vec![vec![0, 0], vec![0, 1]];
    let r = reshuffle_order(&f, &pair, &[0, 0], DEFAULT_SEARCH_BUDGET).unwrap();
    assert!(r.order.is_none() && !r.budget_hit);
}

#[test]
fn clause_two_orderings_for_every_mu_alpha_and_i() {
    let f = height2();
    let sys = &f.system;
    for mu in sys.nodes.iter().filter(|n| n.rank > 0) {
        let below: Vec<Vec<usize>> = sys
            .finals()
            .into_iter()
            .filter(|e| e.len() > mu.node.len() && e[..mu.node.len()] == mu.node[..])
            .collect();
        for mask in 0u32..1 << below.len() {
            if mask.count_ones() as usize >= mu.rank {
                continue;
            }
            let i: Vec<_> = (0..below.len())
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| below[k].clone())
                .collect();
            for alpha in std::iter::once(None).chain((0..mu.rank).map(Some)) {
                let r = reshuffle_order_2(&f, &mu.node, alpha, &i, DEFAULT_SEARCH_BUDGET).unwrap();
                let order = r
                    .order
                    .unwrap_or_else(|| panic!("{:?} {alpha:?} {i:?}", mu.node));
                assert_eq!(
                    check_order_2(&f, &mu.node, alpha, &i, &order),
                    Vec::<String>::new()
                );
            }
        }
    }
}

#[test]
fn clause_two_respects_precedence() {
    let f = height2();
    let all = f.system.finals();
    let r = reshuffle_order_2(&f, &[], Some(0), &all, DEFAULT_SEARCH_BUDGET).unwrap();
    let order = r.order.unwrap();
    let first_late = order.iter().position(|e| e[0] > 0).unwrap();
    assert!(order[first_late..].iter().all(|e| e[0] > 0));
    let mut swapped = order.clone();
    swapped.swap(0, order.len() - 1);
    assert!(!check_order_2(&f, &[], Some(0), &all, &swapped).is_empty());
}

#[test]
fn search_preconditions() {
    let f = height2();
    assert!(reshuffle_order_2(&f, &[0, 0], None, &[], 10).is_err());
    assert!(reshuffle_order_2(&f, &[0], Some(3), &[], 10).is_err());
    assert!(reshuffle_order_2(&f, &[0], None, &[vec![1, 0]], 10).is_err());
    assert!(reshuffle_order(&f, &[vec![0, 0]], &[1, 1], 10).is_err());
}

#[test]
fn search_budget_is_reported() {
    let f = height2();
    let all = f.system.finals();
    let r = reshuffle_order(&f, &all, &[0, 0], 0).unwrap();
    assert!(r.budget_hit && r.order.is_none());
}

#[test]
fn family_as_set_family() {
    let t = family_from_lambda_system(&height2()).unwrap();
    assert_eq!(t.indices, vec!["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
    assert!(find_transversal(&t).is_free());
    // Reshuffling fails on blocks even though the sets have a transversal.
    assert!(find_transversal(&family_from_lambda_system(&counter()).unwrap()).is_free());
}

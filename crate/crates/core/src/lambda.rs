//! λ-systems on finite trees, families based on them, and the strong
//! reshuffling property.
//!
//! Cardinals are replaced by integer ranks (rank 0 plays `ℵ₀`), "finite
//! intersection" by "at most `finiteness_bound` common elements", and
//! stationarity of `E_η` by a declared marker.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Node = Vec<usize>;

pub fn show(node: &[usize]) -> String {
    format!(
        "({})",
        node.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
}

/// Lexicographic order on sequences; a proper prefix comes first.
pub fn lex_compare(a: &[usize], b: &[usize]) -> Ordering {
    a.cmp(b)
}

fn is_proper_prefix(mu: &[usize], eta: &[usize]) -> bool {
    mu.len() < eta.len() && eta[..mu.len()] == *mu
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub node: Node,
    pub rank: usize,
    /// `B_η`.
    #[serde(default)]
    pub base: Vec<String>,
    /// This node's index is a marked (stationary) member of its parent's `E`.
    #[serde(default)]
    pub marked: bool,
    /// This node's index is a declared limit point of its parent's `E`.
    #[serde(default)]
    pub limit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSystem {
    pub nodes: Vec<NodeSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyMember {
    pub node: Node,
    /// `s_η^1, …, s_η^n`, each in enumeration order.
    pub blocks: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasedFamily {
    pub system: LambdaSystem,
    pub members: Vec<FamilyMember>,
    #[serde(default)]
    pub finiteness_bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub node: String,
    pub clause: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.node, self.clause, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Height {
    Uniform(usize),
    /// Depths of the final nodes when they differ.
    Mixed(Vec<usize>),
}

impl LambdaSystem {
    pub fn get(&self, node: &[usize]) -> Option<&NodeSpec> {
        self.nodes.iter().find(|n| n.node == node)
    }

    pub fn root(&self) -> Option<&NodeSpec> {
        self.get(&[])
    }

    /// Child indices of `node` in increasing order.
    pub fn children(&self, node: &[usize]) -> Vec<usize> {
        let mut c: Vec<usize> = self
            .nodes
            .iter()
            .filter(|n| n.node.len() == node.len() + 1 && n.node[..node.len()] == *node)
            .map(|n| n.node[node.len()])
            .collect();
        c.sort();
        c
    }

    pub fn is_final(&self, node: &[usize]) -> bool {
        self.children(node).is_empty()
    }

    /// `S_f` in lexicographic order.
    pub fn finals(&self) -> Vec<Node> {
        let mut f: Vec<Node> = self
            .nodes
            .iter()
            .filter(|n| self.is_final(&n.node))
            .map(|n| n.node.clone())
            .collect();
        f.sort();
        f
    }

    /// Marked members of `E_∅`.
    pub fn marked_root_indices(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self
            .nodes
            .iter()
            .filter(|n| n.node.len() == 1 && n.marked)
            .map(|n| n.node[0])
            .collect();
        m.sort();
        m
    }

    /// `B̄_η = ⋃{B_{η↾m} : m ≤ dom(η)}`.
    pub fn base_closure(&self, node: &[usize]) -> BTreeSet<&str> {
        (0..=node.len())
            .filter_map(|m| self.get(&node[..m]))
            .flat_map(|n| n.base.iter().map(String::as_str))
            .collect()
    }

    pub fn height(&self) -> Height {
        let depths: BTreeSet<usize> = self.finals().iter().map(Vec::len).collect();
        match depths.len() {
            1 => Height::Uniform(*depths.iter().next().expect("one depth")),
            _ => Height::Mixed(depths.into_iter().collect()),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut v = |node: &[usize], clause: &str, detail: String| {
            out.push(Violation {
                node: show(node),
                clause: clause.into(),
                detail,
            })
        };
        let mut seen = HashSet::new();
        for n in &self.nodes {
            if !seen.insert(&n.node) {
                v(&n.node, "tree", "node listed twice".into());
            }
        }
        let Some(root) = self.root() else {
            v(&[], "tree", "no root node".into());
            return out;
        };
        if !root.base.is_empty() {
            v(&[], "2", "B_∅ must be empty".into());
        }
        for n in &self.nodes {
            let eta = &n.node;
            if !eta.is_empty() && self.get(&eta[..eta.len() - 1]).is_none() {
                v(
                    eta,
                    "tree",
                    "parent missing (tree not prefix-closed)".into(),
                );
            }
            let distinct: BTreeSet<&String> = n.base.iter().collect();
            if distinct.len() != n.base.len() {
                v(eta, "2", "B_η lists an element twice".into());
            }
            let fin = self.is_final(eta);
            if fin != (n.rank == 0) {
                v(
                    eta,
                    "1a",
                    if fin {
                        format!("final node has rank {}, expected 0", n.rank)
                    } else {
                        "non-final node has rank 0".into()
                    },
                );
            }
            if fin {
                continue;
            }
            let kids = self.children(eta);
            let mut prev: Option<&NodeSpec> = None;
            let mut union: BTreeSet<&str> = BTreeSet::new();
            for &beta in &kids {
                let mut child = eta.clone();
                child.push(beta);
                let c = self.get(&child).expect("child listed");
                if beta >= n.rank {
                    v(
                        &child,
                        "1b",
                        format!("index {beta} not below parent rank {}", n.rank),
                    );
                }
                if c.rank >= n.rank {
                    v(
                        &child,
                        "1b",
                        format!("rank {} not below parent rank {}", c.rank, n.rank),
                    );
                }
                let b = c.base.len();
                if !(c.rank <= b && b < n.rank) {
                    v(
                        &child,
                        "2a",
                        format!("need rank {} ≤ |B| = {b} < parent rank {}", c.rank, n.rank),
                    );
                }
                let mine: BTreeSet<&str> = c.base.iter().map(String::as_str).collect();
                if let Some(p) = prev {
                    if !p.base.iter().all(|x| mine.contains(x.as_str())) {
                        v(
                            &child,
                            "2b",
                            format!("B does not contain B of sibling {}", show(&p.node)),
                        );
                    }
                }
                if c.limit && mine != union {
                    v(
                        &child,
                        "2b",
                        "B at a declared limit point is not the union of earlier B".into(),
                    );
                }
                union.extend(mine);
                prev = Some(c);
            }
        }
        out
    }
}

impl BasedFamily {
    pub fn member(&self, node: &[usize]) -> Option<&FamilyMember> {
        self.members.iter().find(|m| m.node == node)
    }

    /// `s_η` as a set.
    pub fn set_of(&self, node: &[usize]) -> BTreeSet<&str> {
        self.member(node)
            .map(|m| m.blocks.iter().flatten().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn block_count(&self) -> usize {
        self.members.first().map_or(0, |m| m.blocks.len())
    }

    pub fn block_len(&self) -> usize {
        self.members
            .first()
            .and_then(|m| m.blocks.first())
            .map_or(0, Vec::len)
    }

    /// Violations of the system together with those of the family.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.system.validate();
        let mut v = |node: &[usize], clause: &str, detail: String| {
            out.push(Violation {
                node: show(node),
                clause: clause.into(),
                detail,
            })
        };
        let finals: BTreeSet<Node> = self.system.finals().into_iter().collect();
        let mut listed = BTreeSet::new();
        let (n, len) = (self.block_count(), self.block_len());
        if n == 0 || len == 0 {
            v(
                &[],
                "blocks",
                "members need at least one nonempty block".into(),
            );
        }
        for m in &self.members {
            if !listed.insert(m.node.clone()) {
                v(&m.node, "based", "member listed twice".into());
            }
            if !finals.contains(&m.node) {
                v(&m.node, "based", "family member is not a final node".into());
            }
            if m.blocks.len() != n || m.blocks.iter().any(|b| b.len() != len) {
                v(
                    &m.node,
                    "blocks",
                    format!("expected {n} blocks of {len} elements"),
                );
            }
            let all: Vec<&String> = m.blocks.iter().flatten().collect();
            if all.iter().collect::<BTreeSet<_>>().len() != all.len() {
                v(
                    &m.node,
                    "blocks",
                    "blocks overlap or repeat an element".into(),
                );
            }
            let closure = self.system.base_closure(&m.node);
            if let Some(x) = all.iter().find(|x| !closure.contains(x.as_str())) {
                v(&m.node, "based", format!("{x} is not in B̄_η"));
            }
        }
        for f in finals.difference(&listed) {
            v(f, "based", "final node has no set".into());
        }
        out
    }

    /// Bad block count of `eta` against the union of `placed`: true when
    /// some block meets it in at most `bound` elements.
    fn has_small_block(&self, eta: &[usize], union: &BTreeSet<&str>) -> bool {
        self.member(eta).is_some_and(|m| {
            m.blocks.iter().any(|b| {
                b.iter().filter(|x| union.contains(x.as_str())).count() <= self.finiteness_bound
            })
        })
    }

    fn check_finals(&self, nodes: &[Node]) -> Result<()> {
        for n in nodes {
            if self.member(n).is_none() {
                return Err(Error::Precondition(format!(
                    "{} is not a family member",
                    show(n)
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of an ordering search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reshuffle {
    pub order: Option<Vec<Node>>,
    /// Distinct placed-sets visited.
    pub explored: usize,
    /// The search stopped at its state budget without an answer.
    pub budget_hit: bool,
}

pub const DEFAULT_SEARCH_BUDGET: usize = 1 << 16;

/// Depth-first search over sets of placed nodes. Whether a node may come
/// next depends only on the set already placed, so dead sets are memoized.
fn search(
    f: &BasedFamily,
    items: &[Node],
    start: Vec<usize>,
    may_follow: &dyn Fn(usize, u64) -> bool,
    budget: usize,
) -> Result<Reshuffle> {
    if items.len() > 64 {
        return Err(Error::Capacity {
            what: "reshuffle index set".into(),
            requested: items.len() as u128,
            limit: 64,
        });
    }
    let full = if items.len() == 64 {
        u64::MAX
    } else {
        (1u64 << items.len()) - 1
    };
    let mut dead: HashSet<u64> = HashSet::new();
    let mut explored = 0usize;
    let mut order = start;
    let placed0 = order.iter().fold(0u64, |a, &i| a | 1 << i);

    #[allow(clippy::too_many_arguments)]
    fn go(
        f: &BasedFamily,
        items: &[Node],
        placed: u64,
        full: u64,
        order: &mut Vec<usize>,
        dead: &mut HashSet<u64>,
        explored: &mut usize,
        budget: usize,
        may_follow: &dyn Fn(usize, u64) -> bool,
    ) -> Option<bool> {
        if placed == full {
            return Some(true);
        }
        if dead.contains(&placed) {
            return Some(false);
        }
        *explored += 1;
        if *explored > budget {
            return None;
        }
        let union: BTreeSet<&str> = (0..items.len())
            .filter(|&i| placed >> i & 1 == 1)
            .flat_map(|i| f.set_of(&items[i]))
            .collect();
        for i in 0..items.len() {
            if placed >> i & 1 == 1 || !may_follow(i, placed) {
                continue;
            }
            if !f.has_small_block(&items[i], &union) {
                continue;
            }
            order.push(i);
            match go(
                f,
                items,
                placed | 1 << i,
                full,
                order,
                dead,
                explored,
                budget,
                may_follow,
            ) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            order.pop();
        }
        dead.insert(placed);
        Some(false)
    }

    let r = go(
        f,
        items,
        placed0,
        full,
        &mut order,
        &mut dead,
        &mut explored,
        budget,
        may_follow,
    );
    Ok(Reshuffle {
        order: (r == Some(true)).then(|| order.iter().map(|&i| items[i].clone()).collect()),
        explored,
        budget_hit: r.is_none(),
    })
}

fn dedup_sorted(nodes: &[Node]) -> Vec<Node> {
    let s: BTreeSet<Node> = nodes.iter().cloned().collect();
    s.into_iter().collect()
}

/// Clause (1): an ordering of `i` beginning with `eta0` in which every node
/// has a block meeting the union of its predecessors in at most
/// `finiteness_bound` elements.
pub fn reshuffle_order(
    f: &BasedFamily,
    i: &[Node],
    eta0: &[usize],
    budget: usize,
) -> Result<Reshuffle> {
    let items = dedup_sorted(i);
    f.check_finals(&items)?;
    let first = items
        .iter()
        .position(|n| n == eta0)
        .ok_or_else(|| Error::Precondition(format!("{} is not in I", show(eta0))))?;
    search(f, &items, vec![first], &|_, _| true, budget)
}

/// `Ī = {η ∈ S_f : η <_lex μ} ∪ I`.
pub fn i_bar(f: &BasedFamily, mu: &[usize], i: &[Node]) -> Vec<Node> {
    let mut all: BTreeSet<Node> = f
        .system
        .finals()
        .into_iter()
        .filter(|eta| lex_compare(eta, mu) == Ordering::Less)
        .collect();
    all.extend(i.iter().cloned());
    all.into_iter().collect()
}

/// The nodes clause (2b) requires before `eta`. `alpha = None` stands for
/// `-1`, below every index.
fn required_before(mu: &[usize], alpha: Option<usize>, eta: &[usize], nu: &[usize]) -> bool {
    if !is_proper_prefix(mu, eta) || nu == eta {
        return false;
    }
    let d = mu.len();
    lex_compare(nu, mu) == Ordering::Less
        || (is_proper_prefix(mu, nu) && alpha.is_some_and(|a| nu[d] <= a && a < eta[d]))
}

/// Clause (2): an ordering of `Ī` satisfying (2a) and the precedence
/// constraint (2b).
pub fn reshuffle_order_2(
    f: &BasedFamily,
    mu: &[usize],
    alpha: Option<usize>,
    i: &[Node],
    budget: usize,
) -> Result<Reshuffle> {
    let spec = f
        .system
        .get(mu)
        .ok_or_else(|| Error::Precondition(format!("{} is not a node", show(mu))))?;
    if f.system.is_final(mu) {
        return Err(Error::Precondition(format!("{} is final", show(mu))));
    }
    if let Some(a) = alpha {
        if a >= spec.rank {
            return Err(Error::Precondition(format!(
                "α = {a} not below rank {}",
                spec.rank
            )));
        }
    }
    if let Some(bad) = i.iter().find(|eta| !is_proper_prefix(mu, eta)) {
        return Err(Error::Precondition(format!(
            "{} does not extend {}",
            show(bad),
            show(mu)
        )));
    }
    let items = i_bar(f, mu, i);
    f.check_finals(&items)?;
    let before: Vec<u64> = items
        .iter()
        .map(|eta| {
            (0..items.len())
                .filter(|&j| required_before(mu, alpha, eta, &items[j]))
                .fold(0u64, |acc, j| acc | 1 << j)
        })
        .collect();
    search(
        f,
        &items,
        Vec::new(),
        &|k, placed| before[k] & !placed == 0,
        budget,
    )
}

/// Re-checks an ordering against clause (1) without using the search.
pub fn check_order_1(f: &BasedFamily, i: &[Node], eta0: &[usize], order: &[Node]) -> Vec<String> {
    let mut problems = Vec::new();
    let want: BTreeSet<&Node> = i.iter().collect();
    let got: BTreeSet<&Node> = order.iter().collect();
    if want != got || got.len() != order.len() {
        problems.push("not an ordering of I".to_string());
    }
    if order.first().map(Vec::as_slice) != Some(eta0) {
        problems.push(format!("does not begin with {}", show(eta0)));
    }
    problems.extend(clause_a(f, order));
    problems
}

fn clause_a(f: &BasedFamily, order: &[Node]) -> Vec<String> {
    let mut problems = Vec::new();
    for (p, eta) in order.iter().enumerate() {
        let before: BTreeSet<&str> = order[..p].iter().flat_map(|nu| f.set_of(nu)).collect();
        let ok = f.member(eta).is_some_and(|m| {
            m.blocks.iter().any(|b| {
                b.iter().filter(|x| before.contains(x.as_str())).count() <= f.finiteness_bound
            })
        });
        if !ok {
            problems.push(format!(
                "{}: every block meets its predecessors in more than {} elements",
                show(eta),
                f.finiteness_bound
            ));
        }
    }
    problems
}

/// Re-checks an ordering of `Ī` against clauses (2a) and (2b) verbatim.
pub fn check_order_2(
    f: &BasedFamily,
    mu: &[usize],
    alpha: Option<usize>,
    i: &[Node],
    order: &[Node],
) -> Vec<String> {
    let mut problems = Vec::new();
    let want: BTreeSet<Node> = i_bar(f, mu, i).into_iter().collect();
    let got: BTreeSet<Node> = order.iter().cloned().collect();
    if want != got || got.len() != order.len() {
        problems.push("not an ordering of Ī".to_string());
    }
    problems.extend(clause_a(f, order));
    let pos: BTreeMap<&Node, usize> = order.iter().enumerate().map(|(p, n)| (n, p)).collect();
    for eta in order {
        if !is_proper_prefix(mu, eta) {
            continue;
        }
        for nu in order {
            let lex_before = lex_compare(nu, mu) == Ordering::Less;
            let below_alpha = is_proper_prefix(mu, nu)
                && alpha.is_some_and(|a| nu[mu.len()] <= a && a < eta[mu.len()]);
            if (lex_before || below_alpha) && nu != eta && pos[nu] > pos[eta] {
                problems.push(format!("{} must precede {}", show(nu), show(eta)));
            }
        }
    }
    problems
}

//! Transversals of finite set families via bipartite matching.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A family `(s_i)_{i∈I}` of finite nonempty sets of opaque elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFamily {
    pub indices: Vec<String>,
    pub sets: Vec<BTreeSet<String>>,
}

/// Either a one-one choice function, or a subfamily `J` whose union is
/// smaller than `J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum TransversalResult {
    Transversal {
        /// `choice[i]` is the element picked for `indices[i]`.
        choice: Vec<String>,
    },
    HallViolator {
        /// Positions into the family.
        subfamily: Vec<usize>,
        neighborhood: BTreeSet<String>,
    },
}

impl TransversalResult {
    pub fn is_free(&self) -> bool {
        matches!(self, TransversalResult::Transversal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostFreeReport {
    /// `omit_one[i]` says whether the family without index `i` has a transversal.
    pub omit_one: Vec<bool>,
    pub almost_free: bool,
    pub free: bool,
}

impl SetFamily {
    pub fn new<I, S, T>(indices: I, sets: Vec<S>) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
        S: IntoIterator,
        S::Item: ToString,
    {
        let f = SetFamily {
            indices: indices.into_iter().map(Into::into).collect(),
            sets: sets
                .into_iter()
                .map(|s| s.into_iter().map(|e| e.to_string()).collect())
                .collect(),
        };
        f.validate()?;
        Ok(f)
    }

    /// Indexed by position.
    pub fn from_sets<S>(sets: Vec<S>) -> Result<Self>
    where
        S: IntoIterator,
        S::Item: ToString,
    {
        let n = sets.len();
        Self::new((0..n).map(|i| i.to_string()), sets)
    }

    pub fn validate(&self) -> Result<()> {
        if self.indices.len() != self.sets.len() {
            return Err(Error::Usage("one set per index".into()));
        }
        let distinct: BTreeSet<&String> = self.indices.iter().collect();
        if distinct.len() != self.indices.len() {
            return Err(Error::Usage("family indices must be distinct".into()));
        }
        if let Some(i) = self.sets.iter().position(|s| s.is_empty()) {
            return Err(Error::Usage(format!("set {} is empty", self.indices[i])));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn without(&self, i: usize) -> SetFamily {
        let mut f = self.clone();
        f.indices.remove(i);
        f.sets.remove(i);
        f
    }

    /// Element universe in sorted order and the adjacency lists into it.
    fn adjacency(&self) -> (Vec<&String>, Vec<Vec<usize>>) {
        let universe: Vec<&String> = self
            .sets
            .iter()
            .flatten()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let pos: BTreeMap<&String, usize> =
            universe.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let adj = self
            .sets
            .iter()
            .map(|s| s.iter().map(|e| pos[e]).collect())
            .collect();
        (universe, adj)
    }

    /// `⋃_{i∈J} s_i`.
    pub fn neighborhood(&self, subfamily: &[usize]) -> BTreeSet<String> {
        subfamily
            .iter()
            .flat_map(|&i| self.sets[i].iter().cloned())
            .collect()
    }
}

/// Maximum matching by augmenting paths, indices and elements visited in
/// sorted order. `mate_left[i]` is the element matched to set `i`.
fn matching(adj: &[Vec<usize>], right: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        mate_left: &mut [Option<usize>],
        mate_right: &mut [Option<usize>],
    ) -> bool {
        for &r in &adj[i] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if mate_right[r].is_none_or(|j| augment(j, adj, seen, mate_left, mate_right)) {
                mate_left[i] = Some(r);
                mate_right[r] = Some(i);
                return true;
            }
        }
        false
    }
    let mut mate_left = vec![None; adj.len()];
    let mut mate_right = vec![None; right];
    for i in 0..adj.len() {
        let mut seen = vec![false; right];
        augment(i, adj, &mut seen, &mut mate_left, &mut mate_right);
    }
    (mate_left, mate_right)
}

pub fn find_transversal(f: &SetFamily) -> TransversalResult {
    let (universe, adj) = f.adjacency();
    let (mate_left, mate_right) = matching(&adj, universe.len());
    let Some(free) = mate_left.iter().position(Option::is_none) else {
        return TransversalResult::Transversal {
            choice: mate_left
                .iter()
                .map(|m| universe[m.unwrap()].clone())
                .collect(),
        };
    };
    // Sets reachable from an unmatched set by alternating paths: their union
    // is matched into the others, one element short.
    let mut in_j = vec![false; adj.len()];
    let mut stack = vec![free];
    in_j[free] = true;
    while let Some(i) = stack.pop() {
        for &r in &adj[i] {
            if let Some(j) = mate_right[r] {
                if !in_j[j] {
                    in_j[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    let subfamily: Vec<usize> = (0..adj.len()).filter(|&i| in_j[i]).collect();
    TransversalResult::HallViolator {
        neighborhood: f.neighborhood(&subfamily),
        subfamily,
    }
}

/// Checks a result against the family without trusting the matcher.
pub fn check_result(f: &SetFamily, r: &TransversalResult) -> bool {
    match r {
        TransversalResult::Transversal { choice } => {
            choice.len() == f.len()
                && choice.iter().collect::<BTreeSet<_>>().len() == choice.len()
                && choice.iter().zip(&f.sets).all(|(c, s)| s.contains(c))
        }
        TransversalResult::HallViolator {
            subfamily,
            neighborhood,
        } => {
            let distinct: BTreeSet<&usize> = subfamily.iter().collect();
            distinct.len() == subfamily.len()
                && subfamily.iter().all(|&i| i < f.len())
                && *neighborhood == f.neighborhood(subfamily)
                && neighborhood.len() < subfamily.len()
        }
    }
}

/// Tries every choice function.
pub fn exhaustive_has_transversal(f: &SetFamily) -> bool {
    fn go(sets: &[Vec<&String>], i: usize, used: &mut BTreeSet<String>) -> bool {
        if i == sets.len() {
            return true;
        }
        for e in &sets[i] {
            if used.insert((*e).clone()) {
                if go(sets, i + 1, used) {
                    return true;
                }
                used.remove(*e);
            }
        }
        false
    }
    let sets: Vec<Vec<&String>> = f.sets.iter().map(|s| s.iter().collect()).collect();
    go(&sets, 0, &mut BTreeSet::new())
}

/// Strictly smaller subfamilies all have transversals iff each family
/// omitting one index does.
pub fn almost_free_sweep(f: &SetFamily) -> Result<AlmostFreeReport> {
    if f.is_empty() {
        return Err(Error::Precondition("empty family".into()));
    }
    let omit_one: Vec<bool> = (0..f.len())
        .map(|i| find_transversal(&f.without(i)).is_free())
        .collect();
    Ok(AlmostFreeReport {
        almost_free: omit_one.iter().all(|&b| b),
        free: find_transversal(f).is_free(),
        omit_one,
    })
}

/// A family of `1..=max_sets` sets, each of size `1..=max_size`, over
/// elements `0..universe`.
pub fn random_family<R: Rng>(
    rng: &mut R,
    max_sets: usize,
    max_size: usize,
    universe: usize,
) -> SetFamily {
    let n = rng.gen_range(1..=max_sets);
    let sets: Vec<BTreeSet<usize>> = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=max_size.min(universe));
            let mut s = BTreeSet::new();
            while s.len() < k {
                s.insert(rng.gen_range(0..universe));
            }
            s
        })
        .collect();
    SetFamily::from_sets(sets).expect("sets are nonempty")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cases: usize,
    pub free: usize,
    pub disagreements: usize,
    pub bad_violators: usize,
}

/// Matching against exhaustive search on seeded random families.
pub fn oracle_sweep<R: Rng>(
    rng: &mut R,
    cases: usize,
    max_sets: usize,
    max_size: usize,
    universe: usize,
) -> SweepSummary {
    let mut out = SweepSummary {
        cases,
        free: 0,
        disagreements: 0,
        bad_violators: 0,
    };
    for _ in 0..cases {
        let f = random_family(rng, max_sets, max_size, universe);
        let r = find_transversal(&f);
        if r.is_free() {
            out.free += 1;
        }
        if r.is_free() != exhaustive_has_transversal(&f) {
            out.disagreements += 1;
        }
        if !check_result(&f, &r) {
            out.bad_violators += 1;
        }
    }
    out
}

/// The sets `s_η` of a based family, indexed by final node.
pub fn family_from_lambda_system(f: &crate::lambda::BasedFamily) -> Result<SetFamily> {
    let finals = f.system.finals();
    SetFamily::new(
        finals.iter().map(|n| crate::lambda::show(n)),
        finals.iter().map(|n| f.set_of(n)).collect(),
    )
}

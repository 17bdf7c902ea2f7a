//! Countable algebras presented by generators and inequalities, evaluated
//! lazily as chains of finite stage models.

mod cert;
mod local;
mod model;

pub use cert::{
    lpr_transitions, non_principality_certificate, rc_check, EscapeCheck, NonRcCertificate,
    ProbeRecord, RcCertificate, StageValue, Transition,
};
pub use local::{LocalChain, Localizer};
pub use model::{ChainElem, ChainModel, StageModel};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Generators are limited to 64 so that an assignment fits a `u64` mask.
pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Relation {
    /// `g_lower ≤ g_upper`.
    Leq { lower: usize, upper: usize },
    /// `g_upper` is bounded below exactly by the listed generators and has
    /// no nonzero element below its complement.
    Ideal { upper: usize, lower: Vec<usize> },
    /// `∏ g_factors ≤ g_upper`.
    Product { factors: Vec<usize>, upper: usize },
}

/// `∏ body ≤ head`, tagged with the index of the relation it comes from.
pub type Clause = (Vec<usize>, usize, usize);

impl Relation {
    /// The inequalities `∏ body ≤ head` this relation contributes.
    pub fn clauses(&self) -> Vec<(Vec<usize>, usize)> {
        match self {
            Relation::Leq { lower, upper } => vec![(vec![*lower], *upper)],
            Relation::Ideal { upper, lower } => lower.iter().map(|&l| (vec![l], *upper)).collect(),
            Relation::Product { factors, upper } => vec![(factors.clone(), *upper)],
        }
    }

    fn gens(&self) -> Vec<usize> {
        match self {
            Relation::Leq { lower, upper } => vec![*lower, *upper],
            Relation::Ideal { upper, lower }
            | Relation::Product {
                factors: lower,
                upper,
            } => {
                let mut v = lower.clone();
                v.push(*upper);
                v
            }
        }
    }
}

/// Generators, inequality relations, and the stage at which each generator
/// becomes active. Stage `m` (for `0 ≤ m ≤ schedule.len()`) has the
/// generators of `schedule[..m]` active; an inequality is imposed as soon as
/// both of its ends are active.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentedBA {
    pub generators: Vec<String>,
    pub relations: Vec<Relation>,
    pub schedule: Vec<Vec<usize>>,
}

impl PresentedBA {
    /// A presentation with no relations activating one generator per stage.
    pub fn free_chain(n: usize) -> Result<Self> {
        let p = Self {
            generators: (0..n).map(|i| format!("g{i}")).collect(),
            relations: Vec::new(),
            schedule: (0..n).map(|i| vec![i]).collect(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.generators.len();
        if n > MAX_GENERATORS {
            return Err(Error::Capacity {
                what: "presentation generators".into(),
                requested: n as u128,
                limit: MAX_GENERATORS as u128,
            });
        }
        let mut seen = vec![false; n];
        for (m, step) in self.schedule.iter().enumerate() {
            for &g in step {
                if g >= n {
                    return Err(Error::Parse(format!(
                        "schedule stage {} names generator {g}, only {n} exist",
                        m + 1
                    )));
                }
                if std::mem::replace(&mut seen[g], true) {
                    return Err(Error::Parse(format!(
                        "generator {} scheduled twice",
                        self.generators[g]
                    )));
                }
            }
        }
        if let Some(g) = seen.iter().position(|s| !s) {
            return Err(Error::Parse(format!(
                "generator {} is never scheduled",
                self.generators[g]
            )));
        }
        for r in &self.relations {
            if let Some(g) = r.gens().into_iter().find(|&g| g >= n) {
                return Err(Error::Parse(format!(
                    "relation names unknown generator {g}"
                )));
            }
            if matches!(r, Relation::Product { factors, .. } if factors.is_empty()) {
                return Err(Error::Parse("product relation without factors".into()));
            }
        }
        Ok(())
    }

    pub fn stage_count(&self) -> usize {
        self.schedule.len()
    }

    /// Generators active at stage `m`, in activation order.
    pub fn active(&self, m: usize) -> Vec<usize> {
        self.schedule[..m].iter().flatten().copied().collect()
    }

    pub fn active_mask(&self, m: usize) -> u64 {
        self.active(m).iter().fold(0, |acc, &g| acc | 1 << g)
    }

    /// Stage at which generator `g` becomes active.
    pub fn activation_stage(&self, g: usize) -> usize {
        self.schedule
            .iter()
            .position(|s| s.contains(&g))
            .map(|p| p + 1)
            .expect("validated presentation schedules every generator")
    }

    /// Clauses whose generators are all active at stage `m`.
    pub fn active_clauses(&self, m: usize) -> Vec<Clause> {
        let mask = self.active_mask(m);
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(ri, r)| r.clauses().into_iter().map(move |(b, h)| (b, h, ri)))
            .filter(|(b, h, _)| mask >> h & 1 == 1 && b.iter().all(|&g| mask >> g & 1 == 1))
            .collect()
    }

    pub fn describe_relation(&self, ri: usize) -> String {
        let name = |g: usize| self.generators[g].as_str();
        match &self.relations[ri] {
            Relation::Leq { lower, upper } => format!("{} <= {}", name(*lower), name(*upper)),
            Relation::Ideal { upper, lower } => format!(
                "ideal below {} generated by {{{}}}",
                name(*upper),
                lower
                    .iter()
                    .map(|&g| name(g))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Relation::Product { factors, upper } => format!(
                "{} <= {}",
                factors
                    .iter()
                    .map(|&g| name(g))
                    .collect::<Vec<_>>()
                    .join(" * "),
                name(*upper)
            ),
        }
    }

    /// Connected components of the relation graph, as a component id per
    /// generator (ids in order of least member).
    pub fn components(&self) -> Vec<usize> {
        let n = self.generators.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for r in &self.relations {
            let gens = r.gens();
            for &g in &gens[1..] {
                let (a, b) = (find(&mut parent, gens[0]), find(&mut parent, g));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut id = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|g| {
                let root = find(&mut parent, g);
                if id[root] == usize::MAX {
                    id[root] = next;
                    next += 1;
                }
                id[root]
            })
            .collect()
    }

    /// The presentation on the generators in `keep` (global indices, sorted),
    /// with the relations among them and the same number of stages.
    pub fn restrict(&self, keep: &[usize]) -> PresentedBA {
        let mut local = vec![usize::MAX; self.generators.len()];
        for (i, &g) in keep.iter().enumerate() {
            local[g] = i;
        }
        let relations = self
            .relations
            .iter()
            .filter_map(|r| {
                let kept = |g: &usize| local[*g] != usize::MAX;
                match r {
                    Relation::Ideal { upper, lower } if kept(upper) => Some(Relation::Ideal {
                        upper: local[*upper],
                        lower: lower
                            .iter()
                            .filter(|g| kept(g))
                            .map(|&g| local[g])
                            .collect(),
                    }),
                    Relation::Leq { lower, upper } if kept(lower) && kept(upper) => {
                        Some(Relation::Leq {
                            lower: local[*lower],
                            upper: local[*upper],
                        })
                    }
                    Relation::Product { factors, upper }
                        if kept(upper) && factors.iter().all(kept) =>
                    {
                        Some(Relation::Product {
                            factors: factors.iter().map(|&g| local[g]).collect(),
                            upper: local[*upper],
                        })
                    }
                    _ => None,
                }
            })
            .collect();
        PresentedBA {
            generators: keep.iter().map(|&g| self.generators[g].clone()).collect(),
            relations,
            schedule: self
                .schedule
                .iter()
                .map(|s| {
                    s.iter()
                        .filter(|&&g| local[g] != usize::MAX)
                        .map(|&g| local[g])
                        .collect()
                })
                .collect(),
        }
    }
}

/// Boolean terms over the generators of a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Term {
    Zero,
    One,
    Gen(usize),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
}

impl Term {
    /// `g^sign` with `g^0 = g`, `g^1 = -g`.
    pub fn literal(g: usize, sign: u8) -> Term {
        if sign == 0 {
            Term::Gen(g)
        } else {
            Term::Not(Box::new(Term::Gen(g)))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn sum(gens: impl IntoIterator<Item = usize>) -> Term {
        Term::Or(gens.into_iter().map(Term::Gen).collect())
    }

    /// Mask of generators mentioned.
    pub fn support(&self) -> u64 {
        match self {
            Term::Zero | Term::One => 0,
            Term::Gen(g) => 1 << g,
            Term::Not(t) => t.support(),
            Term::And(ts) | Term::Or(ts) => ts.iter().fold(0, |acc, t| acc | t.support()),
        }
    }

    /// Evaluates on one assignment (bit `g` = value of generator `g`).
    pub fn holds(&self, assignment: u64) -> bool {
        match self {
            Term::Zero => false,
            Term::One => true,
            Term::Gen(g) => assignment >> g & 1 == 1,
            Term::Not(t) => !t.holds(assignment),
            Term::And(ts) => ts.iter().all(|t| t.holds(assignment)),
            Term::Or(ts) => ts.iter().any(|t| t.holds(assignment)),
        }
    }

    /// Renames generators through `map`.
    pub fn rename(&self, map: &impl Fn(usize) -> usize) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::One => Term::One,
            Term::Gen(g) => Term::Gen(map(*g)),
            Term::Not(t) => Term::not(t.rename(map)),
            Term::And(ts) => Term::And(ts.iter().map(|t| t.rename(map)).collect()),
            Term::Or(ts) => Term::Or(ts.iter().map(|t| t.rename(map)).collect()),
        }
    }

    pub fn display(&self, names: &[String]) -> String {
        let join = |ts: &[Term], op: &str, empty: &str| {
            if ts.is_empty() {
                empty.to_string()
            } else {
                let parts: Vec<String> = ts.iter().map(|t| t.display(names)).collect();
                format!("({})", parts.join(op))
            }
        };
        match self {
            Term::Zero => "0".into(),
            Term::One => "1".into(),
            Term::Gen(g) => names.get(*g).cloned().unwrap_or_else(|| format!("g{g}")),
            Term::Not(t) => format!("-{}", t.display(names)),
            Term::And(ts) => join(ts, "*", "1"),
            Term::Or(ts) => join(ts, " + ", "0"),
        }
    }
}

/// The tight filtration by initial segments of a generator order:
/// `cut(i)` is the set of the first `i` generators in `order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filtration {
    pub order: Vec<usize>,
}

impl Filtration {
    pub fn by_index(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn validate(&self, p: &PresentedBA) -> Result<()> {
        let mut seen = vec![false; p.generators.len()];
        for &g in &self.order {
            if g >= seen.len() || std::mem::replace(&mut seen[g], true) {
                return Err(Error::Parse(format!(
                    "filtration order repeats or overruns at {g}"
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse("filtration order omits a generator".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn cut(&self, alpha: usize) -> u64 {
        self.order[..alpha.min(self.order.len())]
            .iter()
            .fold(0, |acc, &g| acc | 1 << g)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Leq { lower, upper } => write!(f, "g{lower} <= g{upper}"),
            Relation::Ideal { upper, lower } => write!(f, "ideal below g{upper} from {lower:?}"),
            Relation::Product { factors, upper } => write!(f, "product of {factors:?} <= g{upper}"),
        }
    }
}

//! `A(𝒮)`: copies of the CP+ algebra `L`, one per final node, amalgamated
//! along shared base elements, with the free decompositions of its
//! filtration and the diagnostic shadow of `Γ`.
//!
//! Freeness of one stage over another is reported as a decomposition
//! witness: an ordering of the added nodes in which each node's overlap
//! with what came before is an admissible CP+ pattern, and each step is an
//! amalgamated free product (checked by counting atoms). Finite copies of
//! `L` are never finitely free over a nonempty overlap, so the literal
//! finite test is recorded alongside but does not decide.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::bitset::AtomSet;
use crate::cpp::{build_cpp, CppParams, CppTriple, JPattern, RowPattern};
use crate::kernel::{
    coproduct, generated_subalgebra, is_free_over, quotient_by_congruence, CongruenceQuotient,
    Elem, Embedding, FiniteBA, Hom, SubalgebraDesc,
};
use crate::lambda::{reshuffle_order_2, show, BasedFamily, Height, Node, DEFAULT_SEARCH_BUDGET};
use crate::{Error, Result};

pub const MAX_FINAL_NODES: usize = 4;
pub const MAX_NODE_GENERATORS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsFixture {
    pub name: String,
    pub params: CppParams,
    pub family: BasedFamily,
}

impl AsFixture {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `h_{η,m} ~ h_{ν,l}` because both enumerate `element`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaPair {
    pub element: String,
    pub left: (String, usize),
    pub right: (String, usize),
}

#[derive(Debug)]
pub struct ASAssembly {
    pub family: BasedFamily,
    pub params: CppParams,
    pub triple: CppTriple,
    /// `S_f` in lexicographic order; copy `i` of `L` belongs to `finals[i]`.
    pub finals: Vec<Node>,
    pub g: FiniteBA,
    pub copies: Vec<Embedding>,
    pub theta_pairs: Vec<ThetaPair>,
    pub a: FiniteBA,
    pub projection: Hom,
    /// Images in `A` of the generators of each copy: `h`s, `x`, then `y`s.
    pub images: Vec<Vec<Elem>>,
    clause_i: Mutex<BTreeMap<String, bool>>,
}

pub fn build_as(f: &BasedFamily, p: &CppParams) -> Result<ASAssembly> {
    if let Some(v) = f.validate().first() {
        return Err(Error::Precondition(format!(
            "family is not based on a λ-system: {v}"
        )));
    }
    let finals = f.system.finals();
    if finals.len() > MAX_FINAL_NODES {
        return Err(Error::Capacity {
            what: "final nodes".into(),
            requested: finals.len() as u128,
            limit: MAX_FINAL_NODES as u128,
        });
    }
    if p.h_generators() > MAX_NODE_GENERATORS {
        return Err(Error::Capacity {
            what: "generators per node".into(),
            requested: p.h_generators() as u128,
            limit: MAX_NODE_GENERATORS as u128,
        });
    }
    if f.block_count() != p.n || f.block_len() != p.l_max {
        return Err(Error::Usage(format!(
            "family has {} blocks of {}, parameters ask for {} of {}",
            f.block_count(),
            f.block_len(),
            p.n,
            p.l_max
        )));
    }
    let triple = build_cpp(p)?;
    let l = &triple.l.algebra;
    let mut gens: Vec<Elem> = triple
        .h
        .generators
        .iter()
        .map(|h| triple.k_in_l(&triple.h_in_k(h)?))
        .collect::<Result<_>>()?;
    gens.push(triple.k_in_l(&triple.k.x)?);
    for y in &triple.free_part.generators {
        gens.push(triple.l.right.apply(l, y)?);
    }

    let identity = Embedding::new(Hom::new(l, l, (0..l.atom_count() as u32).collect())?)?;
    let mut g = l.clone();
    let mut copies = vec![identity];
    for _ in 1..finals.len() {
        let cp = coproduct(&g, l)?;
        copies = copies
            .iter()
            .map(|e| e.then(&cp.left))
            .collect::<Result<_>>()?;
        copies.push(cp.right);
        g = cp.algebra;
    }
    let in_g = |i: usize, e: &Elem| copies[i].apply(&g, e);

    let mut first: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut theta_pairs = Vec::new();
    let mut pairs = Vec::new();
    for (i, eta) in finals.iter().enumerate() {
        let m = f.member(eta).expect("validated");
        for (k, block) in m.blocks.iter().enumerate() {
            for (c, x) in block.iter().enumerate() {
                let here = (i, triple.h_index(k + 1, c));
                match first.get(x.as_str()) {
                    None => {
                        first.insert(x, here);
                    }
                    Some(&(j, mj)) => {
                        pairs.push((in_g(j, &gens[mj])?, in_g(i, &gens[here.1])?));
                        theta_pairs.push(ThetaPair {
                            element: x.clone(),
                            left: (show(&finals[j]), mj),
                            right: (show(eta), here.1),
                        });
                    }
                }
            }
        }
    }
    let q = match quotient_by_congruence(&g, &pairs)? {
        CongruenceQuotient::Proper(q) => q,
        CongruenceQuotient::Degenerate { .. } => return Err(Error::DegenerateQuotient),
    };
    let images = (0..finals.len())
        .map(|i| {
            gens.iter()
                .map(|e| q.projection.apply(&q.algebra, &in_g(i, e)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(ASAssembly {
        family: f.clone(),
        params: *p,
        triple,
        finals,
        g,
        copies,
        theta_pairs,
        a: q.algebra,
        projection: q.projection,
        images,
        clause_i: Mutex::new(BTreeMap::new()),
    })
}

/// One added node of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionStep {
    pub node: String,
    /// Elements of `s_η` already present.
    pub overlap: Vec<String>,
    pub pattern: JPattern,
    pub admissible: bool,
    pub clause_i_stable: bool,
    /// No overlap: the complement `G_η` is the whole copy.
    pub complement_is_whole: bool,
    pub atoms_before: usize,
    pub atoms_after: usize,
    /// Atom count of the amalgamated free product over the overlap.
    pub amalgam_atoms: u64,
}

impl DecompositionStep {
    pub fn holds(&self) -> bool {
        self.admissible && self.clause_i_stable && self.atoms_after as u64 == self.amalgam_atoms
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeDecomposition {
    pub base: Vec<String>,
    pub order: Vec<String>,
    pub steps: Vec<DecompositionStep>,
    /// The base and the added copies generate the target stage.
    pub generated: bool,
    /// Informational: the literal finite freeness test on the pair.
    pub finite_free: bool,
    pub explored: usize,
    pub finding: Option<String>,
}

impl FreeDecomposition {
    pub fn holds(&self) -> bool {
        self.finding.is_none() && self.generated && self.steps.iter().all(DecompositionStep::holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaDiagnostic {
    /// Cuts `α` below the top at which `A_α ≤ A_top` has no decomposition.
    pub flagged: Vec<usize>,
    pub top: usize,
    pub findings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveredElement {
    pub element: String,
    /// Least second-level index whose stage contains the element.
    pub beta: Option<usize>,
    pub lpr_maximal: bool,
}

/// `A_α ≤rc A_{α+1}` through the second-level filtration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedRc {
    pub alpha: usize,
    pub marked: bool,
    /// Least `β < λ_(α)` with `A_{α,β} = A_{α+1}`.
    pub covered_at: Option<usize>,
    pub witnesses: Vec<(usize, bool)>,
    pub elements: Vec<CoveredElement>,
    pub complete: bool,
    pub note: String,
}

impl ASAssembly {
    /// One past the largest root index.
    pub fn top(&self) -> usize {
        self.finals.iter().map(|e| e[0] + 1).max().unwrap_or(0)
    }

    fn generated_by(&self, nodes: impl Fn(&Node) -> bool) -> Result<SubalgebraDesc> {
        let gens: Vec<Elem> = self
            .finals
            .iter()
            .enumerate()
            .filter(|(_, e)| nodes(e))
            .flat_map(|(i, _)| self.images[i].iter().cloned())
            .collect();
        generated_subalgebra(&self.a, &gens)
    }

    /// `A_α`, generated by the copies with `η(0) < α`.
    pub fn filtration(&self, alpha: usize) -> Result<SubalgebraDesc> {
        if alpha > self.top() {
            return Err(Error::Usage(format!(
                "α = {alpha} beyond the top {}",
                self.top()
            )));
        }
        self.generated_by(|e| e[0] < alpha)
    }

    /// `A_{α,β}`: copies with `η(0) < α`, or `η(0) = α` and `η(1) < β`.
    pub fn second_level(&self, alpha: usize, beta: usize) -> Result<SubalgebraDesc> {
        self.require_height_two()?;
        self.generated_by(|e| e[0] < alpha || (e[0] == alpha && e[1] < beta))
    }

    fn require_height_two(&self) -> Result<()> {
        match self.family.system.height() {
            Height::Uniform(h) if h >= 2 => Ok(()),
            h => Err(Error::Precondition(format!(
                "needs a system of height > 1, got {h:?}"
            ))),
        }
    }

    fn index_of(&self, eta: &[usize]) -> usize {
        self.finals
            .iter()
            .position(|e| e == eta)
            .expect("final node")
    }

    fn clause_i_stable(&self, j: &JPattern) -> Result<bool> {
        let key = serde_json::to_string(j).expect("pattern serializes");
        if let Some(&s) = self.clause_i.lock().expect("cache").get(&key) {
            return Ok(s);
        }
        let s = self.triple.verify_clause_i(j)?.stable;
        self.clause_i.lock().expect("cache").insert(key, s);
        Ok(s)
    }

    /// Decomposes the stage generated by `target` over the stage generated
    /// by `base`, adding nodes in the given order.
    fn decompose(
        &self,
        base: &[Node],
        order: &[Node],
        target: &SubalgebraDesc,
    ) -> Result<FreeDecomposition> {
        let f = &self.family;
        let mut cur = self.generated_by(|e| base.contains(e))?;
        let start = cur.clone();
        let mut present: BTreeSet<String> = base
            .iter()
            .flat_map(|e| f.set_of(e))
            .map(str::to_string)
            .collect();
        let mut steps = Vec::new();
        for eta in order.iter().filter(|e| !base.contains(e)) {
            let i = self.index_of(eta);
            let m = f.member(eta).expect("member");
            let mut rows = Vec::new();
            let mut overlap = Vec::new();
            let mut positions = Vec::new();
            for (k, block) in m.blocks.iter().enumerate() {
                let cols: Vec<usize> = (0..block.len())
                    .filter(|&c| present.contains(&block[c]))
                    .collect();
                for &c in &cols {
                    overlap.push(block[c].clone());
                    positions.push(self.triple.h_index(k + 1, c));
                }
                rows.push(if cols.len() <= f.finiteness_bound {
                    RowPattern::Finite(cols)
                } else {
                    RowPattern::All
                });
            }
            let pattern = JPattern { rows };
            let admissible = pattern.admissible();
            let clause_i_stable = admissible && self.clause_i_stable(&pattern)?;
            let amalgam_atoms = self.amalgam_atoms(&cur, i, &positions)?;
            let next = cur.extend(&self.a, &self.images[i])?;
            steps.push(DecompositionStep {
                node: show(eta),
                complement_is_whole: overlap.is_empty(),
                overlap,
                pattern,
                admissible,
                clause_i_stable,
                atoms_before: cur.block_count(),
                atoms_after: next.block_count(),
                amalgam_atoms,
            });
            present.extend(m.blocks.iter().flatten().cloned());
            cur = next;
        }
        let (big, _) = target.as_algebra(&self.a)?;
        let finite_free = is_free_over(&big, &start.relative_to(target, &big)?)?;
        Ok(FreeDecomposition {
            base: base.iter().map(|e| show(e)).collect(),
            order: order.iter().map(|e| show(e)).collect(),
            steps,
            generated: cur == *target,
            finite_free,
            explored: 0,
            finding: None,
        })
    }

    /// `Σ_σ a_σ · l_σ` over sign patterns `σ` of the overlap generators,
    /// with `a_σ` the atoms of `cur` and `l_σ` those of `L` inside `σ`.
    fn amalgam_atoms(&self, cur: &SubalgebraDesc, i: usize, positions: &[usize]) -> Result<u64> {
        let cells = 1usize << positions.len();
        let mut a_count = vec![0u64; cells];
        let mut seen = vec![false; cur.block_count()];
        for (t, &b) in cur.block_of().iter().enumerate() {
            if std::mem::replace(&mut seen[b as usize], true) {
                continue;
            }
            let sigma = positions
                .iter()
                .enumerate()
                .filter(|(_, &m)| self.images[i][m].atoms().contains(t))
                .fold(0, |acc, (j, _)| acc | 1 << j);
            a_count[sigma] += 1;
        }
        let l = &self.triple.l.algebra;
        let hs: Vec<Elem> = positions
            .iter()
            .map(|&m| {
                self.triple
                    .k_in_l(&self.triple.h_in_k(&self.triple.h.generators[m])?)
            })
            .collect::<Result<_>>()?;
        let mut l_count = vec![0u64; cells];
        for t in 0..l.atom_count() {
            let sigma = hs
                .iter()
                .enumerate()
                .filter(|(_, h)| h.atoms().contains(t))
                .fold(0, |acc, (j, _)| acc | 1 << j);
            l_count[sigma] += 1;
        }
        Ok(a_count.iter().zip(&l_count).map(|(a, l)| a * l).sum())
    }

    fn ordered(
        &self,
        mu: &[usize],
        alpha: Option<usize>,
        i: &[Node],
        base: Vec<Node>,
        target: SubalgebraDesc,
    ) -> Result<FreeDecomposition> {
        let r = reshuffle_order_2(&self.family, mu, alpha, i, DEFAULT_SEARCH_BUDGET)?;
        match r.order {
            Some(order) => {
                let mut d = self.decompose(&base, &order, &target)?;
                d.explored = r.explored;
                Ok(d)
            }
            None => Ok(FreeDecomposition {
                base: base.iter().map(|e| show(e)).collect(),
                order: Vec::new(),
                steps: Vec::new(),
                generated: false,
                finite_free: false,
                explored: r.explored,
                finding: Some(if r.budget_hit {
                    "reshuffle search hit its budget".into()
                } else {
                    format!("no reshuffle ordering for μ = {}, α = {alpha:?}", show(mu))
                }),
            }),
        }
    }

    fn claim1_unchecked(&self, alpha: Option<usize>, beta: usize) -> Result<FreeDecomposition> {
        let i: Vec<Node> = self
            .finals
            .iter()
            .filter(|e| e[0] < beta)
            .cloned()
            .collect();
        let base: Vec<Node> = i
            .iter()
            .filter(|e| alpha.is_some_and(|a| e[0] <= a))
            .cloned()
            .collect();
        let target = self.generated_by(|e| e[0] < beta)?;
        self.ordered(&[], alpha, &i, base, target)
    }

    /// `A_{α+1} ≤free A_β` for `α ∈ [-1, β)` (`None` is `-1`), `β < λ`.
    pub fn claim1_verify(&self, alpha: Option<usize>, beta: usize) -> Result<FreeDecomposition> {
        let lambda = self.family.system.root().map_or(0, |r| r.rank);
        if beta >= lambda || alpha.is_some_and(|a| a >= beta) {
            return Err(Error::Usage(format!("need α < β < λ = {lambda}")));
        }
        self.claim1_unchecked(alpha, beta)
    }

    /// `A_α = A_{α,0} ≤free A_{α,β}` for `β < λ_(α)`.
    pub fn claim2_verify(&self, alpha: usize, beta: usize) -> Result<FreeDecomposition> {
        self.require_height_two()?;
        let mu = vec![alpha];
        let rank = self
            .family
            .system
            .get(&mu)
            .ok_or_else(|| Error::Usage(format!("({alpha}) is not a node")))?
            .rank;
        if beta >= rank {
            return Err(Error::Usage(format!("need β < λ_({alpha}) = {rank}")));
        }
        let i: Vec<Node> = self
            .finals
            .iter()
            .filter(|e| e[0] == alpha && e[1] < beta)
            .cloned()
            .collect();
        let base: Vec<Node> = self
            .finals
            .iter()
            .filter(|e| e[0] < alpha)
            .cloned()
            .collect();
        let target = self.second_level(alpha, beta)?;
        self.ordered(&mu, None, &i, base, target)
    }

    pub fn gamma_diagnostic(&self) -> Result<GammaDiagnostic> {
        let top = self.top();
        let mut out = GammaDiagnostic {
            flagged: Vec::new(),
            top,
            findings: Vec::new(),
        };
        for alpha in 0..top {
            let d = self.claim1_unchecked(alpha.checked_sub(1), top)?;
            if !d.holds() {
                out.flagged.push(alpha);
                out.findings.push(match &d.finding {
                    Some(f) => format!("α = {alpha}: {f}"),
                    None => format!("α = {alpha}: a decomposition step fails"),
                });
            }
        }
        Ok(out)
    }

    pub fn rc_at_marked_stages(&self, alpha: usize) -> Result<MarkedRc> {
        self.require_height_two()?;
        let node = self
            .family
            .system
            .get(&[alpha])
            .ok_or_else(|| Error::Usage(format!("({alpha}) is not a node")))?;
        let (rank, marked) = (node.rank, node.marked);
        let lower = self.filtration(alpha)?;
        let upper = self.filtration(alpha + 1)?;
        let stages: Vec<SubalgebraDesc> = (0..rank)
            .map(|b| self.second_level(alpha, b))
            .collect::<Result<_>>()?;
        let witnesses: Vec<(usize, bool)> = (0..rank)
            .map(|b| Ok((b, self.claim2_verify(alpha, b)?.holds())))
            .collect::<Result<_>>()?;
        let covered_at = stages.iter().position(|s| *s == upper);

        let mut probes: Vec<(String, Elem)> = Vec::new();
        let mut seen = vec![false; upper.block_count()];
        for &b in upper.block_of() {
            if !std::mem::replace(&mut seen[b as usize], true) {
                let one = AtomSet::from_indices(upper.block_count(), [b as usize]);
                let e = upper.union_of_blocks(&self.a, &one)?;
                probes.push((format!("atom {b} of A_{}", alpha + 1), e));
            }
        }
        let names = self.triple.generator_names();
        for (i, eta) in self
            .finals
            .iter()
            .enumerate()
            .filter(|(_, e)| e[0] == alpha)
        {
            for (g, e) in self.images[i].iter().enumerate() {
                probes.push((format!("{}@{}", names[g], show(eta)), e.clone()));
            }
        }
        let mut elements = Vec::new();
        for (name, e) in probes {
            let beta = stages
                .iter()
                .map(|s| s.contains(&e))
                .position(|c| c.unwrap_or(false));
            let p = lower.lpr(&self.a, &e)?;
            let maximal = p.leq(&e)?
                && lower.blocks().iter().all(|blk| {
                    blk.iter().all(|&t| p.atoms().contains(t))
                        || !blk.iter().all(|&t| e.atoms().contains(t))
                });
            elements.push(CoveredElement {
                element: name,
                beta,
                lpr_maximal: maximal,
            });
        }
        let complete = covered_at.is_some()
            && witnesses.iter().all(|w| w.1)
            && elements.iter().all(|c| c.beta.is_some() && c.lpr_maximal);
        Ok(MarkedRc {
            alpha,
            marked,
            covered_at,
            witnesses,
            elements,
            complete,
            note: if marked {
                "marked stage".into()
            } else {
                "unmarked stage: rc holds at finite scale too; the marked/unmarked distinction lives in the limit".into()
            },
        })
    }
}

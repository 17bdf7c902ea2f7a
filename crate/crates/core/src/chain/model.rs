use std::sync::{Arc, OnceLock};

use super::{Filtration, PresentedBA, Term};
use crate::bitset::AtomSet;
use crate::kernel::{
    make_free, meet_all, quotient_by_element, Elem, Embedding, FiniteBA, Hom, SubalgebraDesc,
};
use crate::{Error, Result};

/// Stage `m` of a presented algebra: the free algebra on the active
/// generators modulo the active inequalities. Each atom is a satisfying
/// assignment; `locals` holds it with bit `i` for the `i`-th active
/// generator, `globals` with bit `g` for generator `g`.
#[derive(Debug)]
pub struct StageModel {
    pub stage: usize,
    pub algebra: FiniteBA,
    pub active: Vec<usize>,
    pub from_prev: Option<Embedding>,
    locals: Vec<u32>,
    globals: Vec<u64>,
    index: OnceLock<Vec<u32>>,
}

impl StageModel {
    pub fn atom_count(&self) -> usize {
        self.algebra.atom_count()
    }

    pub fn globals(&self) -> &[u64] {
        &self.globals
    }

    pub fn active_mask(&self) -> u64 {
        self.active.iter().fold(0, |acc, &g| acc | 1 << g)
    }

    /// Local bit mask of the active generators in `global`.
    pub fn local_mask(&self, global: u64) -> u32 {
        self.active
            .iter()
            .enumerate()
            .filter(|(_, &g)| global >> g & 1 == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Atom index of each local assignment (`u32::MAX` if killed).
    fn index(&self) -> &[u32] {
        self.index.get_or_init(|| {
            let mut idx = vec![u32::MAX; 1 << self.active.len()];
            for (a, &t) in self.locals.iter().enumerate() {
                idx[t as usize] = a as u32;
            }
            idx
        })
    }

    pub fn gen(&self, g: usize) -> Result<Elem> {
        let i = self.active.iter().position(|&h| h == g).ok_or_else(|| {
            Error::Usage(format!(
                "generator {g} is not active at stage {}",
                self.stage
            ))
        })?;
        self.algebra.elem(AtomSet::from_fn(self.locals.len(), |a| {
            self.locals[a] >> i & 1 == 1
        }))
    }

    pub fn eval(&self, t: &Term) -> Result<Elem> {
        Ok(match t {
            Term::Zero => self.algebra.zero(),
            Term::One => self.algebra.one(),
            Term::Gen(g) => self.gen(*g)?,
            Term::Not(t) => self.eval(t)?.complement(),
            Term::And(ts) => {
                let mut acc = self.algebra.one();
                for t in ts {
                    acc = acc.meet(&self.eval(t)?)?;
                }
                acc
            }
            Term::Or(ts) => {
                let mut acc = self.algebra.zero();
                for t in ts {
                    acc = acc.join(&self.eval(t)?)?;
                }
                acc
            }
        })
    }

    /// Subalgebra generated by the active generators in `cut`.
    pub fn subalgebra(&self, cut: u64) -> SubalgebraDesc {
        let mask = self.local_mask(cut);
        SubalgebraDesc::from_keys(
            &self.algebra,
            self.locals.iter().map(|&t| (t & mask) as u64),
        )
    }

    /// Lower projection into the subalgebra generated by the active
    /// generators in `cut`. Blocks are keyed by the cut part of the local
    /// assignment, so no partition is materialized.
    pub fn lpr_cut(&self, cut: u64, b: &Elem) -> Result<Elem> {
        self.algebra.check(b)?;
        let mask = self.local_mask(cut);
        let mut bad = AtomSet::empty(1 << self.active.len());
        for (a, &t) in self.locals.iter().enumerate() {
            if !b.atoms().contains(a) {
                bad.insert((t & mask) as usize);
            }
        }
        self.algebra.elem(AtomSet::from_fn(self.locals.len(), |a| {
            !bad.contains((self.locals[a] & mask) as usize)
        }))
    }

    pub fn upr_cut(&self, cut: u64, b: &Elem) -> Result<Elem> {
        Ok(self.lpr_cut(cut, &b.complement())?.complement())
    }

    /// Is `xs` independent over the subalgebra generated by `cut`?
    pub fn independent_over_cut(&self, cut: u64, xs: &[Elem]) -> Result<bool> {
        for x in xs {
            self.algebra.check(x)?;
        }
        if xs.len() > 8 {
            return Err(Error::Capacity {
                what: "independence family over a stage cut".into(),
                requested: xs.len() as u128,
                limit: 8,
            });
        }
        let mask = self.local_mask(cut);
        let cells = 1usize << xs.len();
        let keys = 1usize << self.active.len();
        let mut present = AtomSet::empty(keys);
        let mut seen = AtomSet::empty(keys * cells);
        for (a, &t) in self.locals.iter().enumerate() {
            let key = (t & mask) as usize;
            let mut cell = 0;
            for (i, x) in xs.iter().enumerate() {
                if !x.atoms().contains(a) {
                    cell |= 1 << i;
                }
            }
            present.insert(key);
            seen.insert(key * cells + cell);
        }
        let ok = present
            .iter()
            .all(|key| (0..cells).all(|c| seen.contains(key * cells + c)));
        Ok(ok)
    }
}

/// A presented algebra with its stage models built on demand and cached.
#[derive(Debug)]
pub struct ChainModel {
    pres: PresentedBA,
    stages: Vec<OnceLock<Result<Arc<StageModel>>>>,
}

/// An element of some stage model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainElem {
    pub stage: usize,
    pub value: Elem,
}

impl ChainModel {
    pub fn new(pres: PresentedBA) -> Result<Self> {
        pres.validate()?;
        let stages = (0..=pres.stage_count()).map(|_| OnceLock::new()).collect();
        Ok(Self { pres, stages })
    }

    pub fn presentation(&self) -> &PresentedBA {
        &self.pres
    }

    pub fn stage_count(&self) -> usize {
        self.pres.stage_count()
    }

    pub fn stage(&self, m: usize) -> Result<Arc<StageModel>> {
        let slot = self.stages.get(m).ok_or_else(|| {
            Error::Usage(format!(
                "stage {m} beyond the schedule ({} stages)",
                self.pres.stage_count()
            ))
        })?;
        slot.get_or_init(|| self.build(m).map(Arc::new)).clone()
    }

    fn build(&self, m: usize) -> Result<StageModel> {
        let active = self.pres.active(m);
        let n = active.len();
        let mut pos = vec![usize::MAX; self.pres.generators.len()];
        for (i, &g) in active.iter().enumerate() {
            pos[g] = i;
        }
        let fr = make_free(n)?;
        let mut r = fr.algebra.zero();
        for (body, head, _) in self.pres.active_clauses(m) {
            let prod = meet_all(&fr.algebra, body.iter().map(|&g| &fr.generators[pos[g]]))?;
            r = r.join(&prod.minus(&fr.generators[pos[head]])?)?;
        }
        let q = quotient_by_element(&fr.algebra, &r)?;
        let locals = q.kept;
        let globals = locals
            .iter()
            .map(|&t| {
                active
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| t >> i & 1 == 1)
                    .fold(0u64, |acc, (_, &g)| acc | 1 << g)
            })
            .collect();
        let mut model = StageModel {
            stage: m,
            algebra: q.algebra,
            active,
            from_prev: None,
            locals,
            globals,
            index: OnceLock::new(),
        };
        if m > 0 {
            let prev = self.stage(m - 1)?;
            let low = (1u32 << prev.active.len()) - 1;
            let idx = prev.index();
            let map: Vec<u32> = model
                .locals
                .iter()
                .map(|&t| idx[(t & low) as usize])
                .collect();
            if map.contains(&u32::MAX) {
                return Err(Error::Precondition(format!(
                    "stage {m} contains an assignment that violates an earlier stage"
                )));
            }
            let hom = Hom::new(&prev.algebra, &model.algebra, map)?;
            if !hom.is_injective() {
                return Err(self.diagnose(&prev, &hom, m));
            }
            model.from_prev = Some(Embedding::new(hom)?);
        }
        Ok(model)
    }

    /// Names a newly active relation used in forward chaining from an old
    /// assignment with no extension to a generator it sets false.
    fn diagnose(&self, prev: &StageModel, hom: &Hom, m: usize) -> Error {
        let mut hit = vec![false; prev.atom_count()];
        for &s in hom.atom_map() {
            hit[s as usize] = true;
        }
        let lost = hit.iter().position(|h| !h).unwrap_or(0);
        let assignment = prev.globals[lost];
        let old = prev.active_mask();
        let old_clauses = self.pres.active_clauses(m - 1);
        let clauses = self.pres.active_clauses(m);
        let n = self.pres.generators.len();
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut reached: Vec<bool> = (0..n).map(|g| assignment >> g & 1 == 1).collect();
        let mut conflict = None;
        let mut changed = true;
        while changed && conflict.is_none() {
            changed = false;
            for (k, (body, head, _)) in clauses.iter().enumerate() {
                if reached[*head] || !body.iter().all(|&g| reached[g]) {
                    continue;
                }
                reached[*head] = true;
                via[*head] = Some(k);
                changed = true;
                if old >> head & 1 == 1 && assignment >> head & 1 == 0 {
                    conflict = Some(*head);
                    break;
                }
            }
        }
        let relation = match conflict {
            Some(g) => {
                let mut stack = vec![g];
                let mut culprit = None;
                while let Some(u) = stack.pop() {
                    let Some(k) = via[u] else { continue };
                    let (body, head, ri) = &clauses[k];
                    if culprit.is_none()
                        && !old_clauses.iter().any(|(b, h, _)| b == body && h == head)
                    {
                        culprit = Some(*ri);
                    }
                    stack.extend(body.iter().copied());
                }
                self.pres
                    .describe_relation(culprit.unwrap_or(clauses[via[g].unwrap()].2))
            }
            None => "unknown".into(),
        };
        Error::PresentationInconsistent { stage: m, relation }
    }

    /// Atom map from stage `m` to stage `s ≤ m`.
    pub fn projection(&self, s: usize, m: usize) -> Result<Vec<u32>> {
        if s > m {
            return Err(Error::Usage(format!(
                "cannot project stage {m} to later stage {s}"
            )));
        }
        let (src, dst) = (self.stage(s)?, self.stage(m)?);
        let low = (1u32 << src.active.len()) - 1;
        let idx = src.index();
        Ok(dst
            .locals
            .iter()
            .map(|&t| idx[(t & low) as usize])
            .collect())
    }

    pub fn elem(&self, m: usize, t: &Term) -> Result<ChainElem> {
        Ok(ChainElem {
            stage: m,
            value: self.stage(m)?.eval(t)?,
        })
    }

    pub fn lift(&self, e: &ChainElem, m: usize) -> Result<Elem> {
        let src = self.stage(e.stage)?;
        src.algebra.check(&e.value)?;
        let map = self.projection(e.stage, m)?;
        self.stage(m)?
            .algebra
            .elem(AtomSet::from_fn(map.len(), |a| {
                e.value.atoms().contains(map[a] as usize)
            }))
    }

    pub fn chain_leq(&self, a: &ChainElem, b: &ChainElem) -> Result<bool> {
        let m = a.stage.max(b.stage);
        self.lift(a, m)?.leq(&self.lift(b, m)?)
    }

    pub fn chain_eq(&self, a: &ChainElem, b: &ChainElem) -> Result<bool> {
        let m = a.stage.max(b.stage);
        Ok(self.lift(a, m)? == self.lift(b, m)?)
    }

    /// The same element at the least stage whose image contains it.
    pub fn canonicalize(&self, e: &ChainElem) -> Result<ChainElem> {
        for s in 0..=e.stage {
            let map = self.projection(s, e.stage)?;
            let src = self.stage(s)?;
            let mut val: Vec<Option<bool>> = vec![None; src.atom_count()];
            let consistent = map.iter().enumerate().all(|(a, &p)| {
                let here = e.value.atoms().contains(a);
                *val[p as usize].get_or_insert(here) == here
            });
            if consistent {
                let atoms = AtomSet::from_fn(val.len(), |i| val[i] == Some(true));
                return Ok(ChainElem {
                    stage: s,
                    value: src.algebra.elem(atoms)?,
                });
            }
        }
        Ok(e.clone())
    }

    /// The filtration's `alpha`-th subalgebra inside stage `m`.
    pub fn subalgebra_at(&self, f: &Filtration, alpha: usize, m: usize) -> Result<SubalgebraDesc> {
        Ok(self.stage(m)?.subalgebra(f.cut(alpha)))
    }

    /// Re-derives each cut subalgebra by closing the cut generators with the
    /// kernel and compares with [`ChainModel::subalgebra_at`].
    pub fn verify_filtration(&self, f: &Filtration, budget: usize) -> Result<bool> {
        f.validate(&self.pres)?;
        for m in 0..=budget.min(self.stage_count()) {
            let st = self.stage(m)?;
            for alpha in 0..=f.len() {
                let cut = f.cut(alpha) & st.active_mask();
                let gens: Vec<Elem> = (0..self.pres.generators.len())
                    .filter(|g| cut >> g & 1 == 1)
                    .map(|g| st.gen(g))
                    .collect::<Result<_>>()?;
                let closed = crate::kernel::generated_subalgebra(&st.algebra, &gens)?;
                if closed != self.subalgebra_at(f, alpha, m)? {
                    return Ok(false);
                }
                if alpha > 0 {
                    let prev = self.subalgebra_at(f, alpha - 1, m)?;
                    if !prev.is_subalgebra_of(&closed)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

use serde::{Deserialize, Serialize};

use crate::bitset::AtomSet;
use crate::chain::{ChainElem, ChainModel, Term};
use crate::kernel::{Elem, SubalgebraDesc};
use crate::{Error, Result, ORACLE_ATOMS};

/// Result of looking for one more element independent over the cut.
#[derive(Debug, Clone)]
pub struct SirotaOutcome {
    pub found: Option<(Elem, String)>,
    pub candidates: u64,
    /// Every element of the stage was tried.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SirotaStep {
    pub stage: usize,
    pub witness: Option<String>,
    pub candidates: u64,
    pub exhaustive: bool,
}

/// Witnesses grown stage by stage until, at each stage, the cut together
/// with them generates the stage model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SirotaLadder {
    pub cut: Vec<String>,
    pub budget: usize,
    pub steps: Vec<SirotaStep>,
    /// Stages at which the cut and the witnesses generate everything.
    pub generated_at: Vec<usize>,
    pub failed_at: Option<usize>,
    pub witnesses: Vec<String>,
}

impl SirotaLadder {
    /// Free over the cut at every stage up to the budget.
    pub fn complete(&self) -> bool {
        self.failed_at.is_none() && self.generated_at.len() == self.budget
    }
}

fn independent(sub: &SubalgebraDesc, ws: &[Elem], u: &Elem) -> Result<bool> {
    let mut all = ws.to_vec();
    all.push(u.clone());
    sub.is_independent(&all)
}

/// Active generators (newest first), then meets and joins of two of them.
fn candidates(chain: &ChainModel, m: usize) -> Vec<Term> {
    let p = chain.presentation();
    let mut gens = p.active(m);
    let new = p.schedule[m - 1].len();
    gens.rotate_right(new);
    let mut out: Vec<Term> = gens.iter().map(|&g| Term::Gen(g)).collect();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            out.push(Term::And(vec![Term::Gen(a), Term::Gen(b)]));
            out.push(Term::Or(vec![Term::Gen(a), Term::Gen(b)]));
        }
    }
    out
}

/// Searches stage `m` for `u` with `witnesses ∪ {u}` independent over the
/// cut subalgebra. Term candidates come first; stages with at most
/// [`ORACLE_ATOMS`] atoms are then searched exhaustively.
pub fn extend_independent_witness(
    chain: &ChainModel,
    cut: u64,
    witnesses: &[ChainElem],
    m: usize,
) -> Result<SirotaOutcome> {
    if m == 0 {
        return Err(Error::Usage("stage 0 has no generators".into()));
    }
    let st = chain.stage(m)?;
    let sub = st.subalgebra(cut);
    let ws = witnesses
        .iter()
        .map(|w| chain.lift(w, m))
        .collect::<Result<Vec<_>>>()?;
    if !sub.is_independent(&ws)? {
        return Err(Error::Precondition(format!(
            "witnesses are not independent over the cut at stage {m}"
        )));
    }
    let names = &chain.presentation().generators;
    let mut out = SirotaOutcome {
        found: None,
        candidates: 0,
        exhaustive: false,
    };
    for t in candidates(chain, m) {
        out.candidates += 1;
        let u = st.eval(&t)?;
        if independent(&sub, &ws, &u)? {
            out.found = Some((u, t.display(names)));
            return Ok(out);
        }
    }
    let atoms = st.atom_count();
    if atoms <= ORACLE_ATOMS {
        out.exhaustive = true;
        for mask in 0u64..1 << atoms {
            out.candidates += 1;
            let u = st.algebra.elem(AtomSet::from_mask(atoms, mask))?;
            if independent(&sub, &ws, &u)? {
                let name = format!("atoms:{}", u.atoms().to_hex());
                out.found = Some((u, name));
                out.exhaustive = false;
                return Ok(out);
            }
        }
    }
    Ok(out)
}

pub fn sirota_ladder(chain: &ChainModel, cut: u64, budget: usize) -> Result<SirotaLadder> {
    let p = chain.presentation();
    if budget > p.stage_count() {
        return Err(Error::Usage(format!(
            "budget {budget} beyond the {} scheduled stages",
            p.stage_count()
        )));
    }
    let mut ladder = SirotaLadder {
        cut: (0..p.generators.len())
            .filter(|&g| cut >> g & 1 == 1)
            .map(|g| p.generators[g].clone())
            .collect(),
        budget,
        steps: Vec::new(),
        generated_at: Vec::new(),
        failed_at: None,
        witnesses: Vec::new(),
    };
    let mut ws: Vec<ChainElem> = Vec::new();
    'stages: for m in 1..=budget {
        let st = chain.stage(m)?;
        let sub = st.subalgebra(cut);
        let lifted = ws
            .iter()
            .map(|w| chain.lift(w, m))
            .collect::<Result<Vec<_>>>()?;
        if !sub.is_independent(&lifted)? {
            ladder.failed_at = Some(m);
            break;
        }
        loop {
            let lifted = ws
                .iter()
                .map(|w| chain.lift(w, m))
                .collect::<Result<Vec<_>>>()?;
            if sub.extend(&st.algebra, &lifted)?.is_whole() {
                ladder.generated_at.push(m);
                break;
            }
            let o = extend_independent_witness(chain, cut, &ws, m)?;
            ladder.steps.push(SirotaStep {
                stage: m,
                witness: o.found.as_ref().map(|f| f.1.clone()),
                candidates: o.candidates,
                exhaustive: o.exhaustive,
            });
            match o.found {
                Some((u, name)) => {
                    ladder.witnesses.push(name);
                    ws.push(ChainElem { stage: m, value: u });
                }
                None => {
                    ladder.failed_at = Some(m);
                    break 'stages;
                }
            }
        }
    }
    Ok(ladder)
}

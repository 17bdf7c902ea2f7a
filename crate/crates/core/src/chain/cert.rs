use serde::{Deserialize, Serialize};

use super::{ChainElem, ChainModel, Filtration, LocalChain, Localizer, Term};
use crate::bitset::AtomSet;
use crate::kernel::Elem;
use crate::{Error, Result};

/// Recorded lower projection of one probe at one stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageValue {
    pub stage: usize,
    pub stage_atoms: usize,
    pub lpr_atoms: usize,
    /// Full bitset for small stages, otherwise an FNV-1a digest of it.
    pub value: String,
    pub grew: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub probe: String,
    pub intro_stage: usize,
    pub values: Vec<StageValue>,
    /// Last stage at which the value changed (or the intro stage).
    pub stamp: usize,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcCertificate {
    pub alpha: usize,
    pub budget: usize,
    pub probes: Vec<ProbeRecord>,
    /// Probes whose lower projection grew at some stage.
    pub failure_locus: Vec<String>,
    /// No probe grew at the final stage.
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeCheck {
    pub stage: usize,
    pub active_schedule: usize,
    /// Schedule index that escapes above the largest cut element below the
    /// target, and the later stage where it does.
    pub witness: Option<usize>,
    pub witness_stage: Option<usize>,
    /// Number of cut elements below the target checked one by one, when
    /// small enough to enumerate.
    pub exhaustive: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonRcCertificate {
    pub alpha: usize,
    pub target: String,
    pub budget: usize,
    pub schedule: Vec<String>,
    pub checks: Vec<EscapeCheck>,
    pub passed: bool,
    pub refutation: Option<String>,
}

const EXHAUSTIVE_BLOCKS: usize = 10;

fn render(e: &Elem) -> String {
    let a = e.atoms();
    if a.len() <= 64 {
        a.to_hex()
    } else {
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in a.to_hex().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("fnv:{h:016x}")
    }
}

fn intro_stage(lc: &LocalChain, support: u64) -> Result<usize> {
    let p = lc.chain.presentation();
    (0..=p.stage_count())
        .find(|&m| support & !p.active_mask(m) == 0)
        .ok_or_else(|| Error::Usage("term mentions an unknown generator".into()))
}

fn probe_record(loc: &Localizer, cut: u64, probe: &Term, budget: usize) -> Result<ProbeRecord> {
    let names = &loc.presentation().generators;
    let lc = loc.chain_for(probe.support())?;
    let t = lc.local_term(probe);
    let lcut = lc.local_mask(cut);
    let intro = intro_stage(&lc, t.support())?;
    let mut values = Vec::new();
    let mut prev: Option<ChainElem> = None;
    let mut stamp = intro;
    for m in intro..=budget {
        let st = lc.chain.stage(m)?;
        let b = st.eval(&t)?;
        let l = st.lpr_cut(lcut, &b)?;
        let grew = match &prev {
            Some(p) => {
                let lifted = lc.chain.lift(p, m)?;
                if !lifted.leq(&l)? {
                    return Err(Error::Precondition(format!(
                        "lower projection of {} shrank at stage {m}",
                        probe.display(names)
                    )));
                }
                lifted != l
            }
            None => false,
        };
        if grew {
            stamp = m;
        }
        values.push(StageValue {
            stage: m,
            stage_atoms: st.atom_count(),
            lpr_atoms: l.atoms().count(),
            value: render(&l),
            grew,
        });
        prev = Some(ChainElem { stage: m, value: l });
    }
    let stable = !values.last().is_some_and(|v| v.grew);
    Ok(ProbeRecord {
        probe: probe.display(names),
        intro_stage: intro,
        values,
        stamp,
        stable,
    })
}

/// Stage-wise lower projections of each probe into the filtration's
/// `alpha`-th subalgebra, for stages up to `budget`.
pub fn rc_check(
    loc: &Localizer,
    f: &Filtration,
    alpha: usize,
    budget: usize,
    probes: &[Term],
) -> Result<RcCertificate> {
    let budget = check_budget(loc, budget)?;
    f.validate(loc.presentation())?;
    let cut = f.cut(alpha);
    let probes = probes
        .iter()
        .map(|p| probe_record(loc, cut, p, budget))
        .collect::<Result<Vec<_>>>()?;
    let failure_locus = probes
        .iter()
        .filter(|p| p.values.iter().any(|v| v.grew))
        .map(|p| p.probe.clone())
        .collect();
    let stable = probes.iter().all(|p| p.stable);
    Ok(RcCertificate {
        alpha,
        budget,
        probes,
        failure_locus,
        stable,
    })
}

fn check_budget(loc: &Localizer, budget: usize) -> Result<usize> {
    let n = loc.presentation().stage_count();
    if budget > n {
        Err(Error::Usage(format!(
            "budget {budget} beyond the {n} scheduled stages"
        )))
    } else {
        Ok(budget)
    }
}

/// Evidence that the `alpha`-th subalgebra has no largest element below `x`
/// in the limit: the schedule is strictly increasing below `x` at every stage
/// up to `budget`, and the largest cut element below `x` at each stage is
/// escaped by a schedule element at some later stage.
pub fn non_principality_certificate(
    loc: &Localizer,
    f: &Filtration,
    alpha: usize,
    x: &Term,
    schedule: &[Term],
    budget: usize,
) -> Result<NonRcCertificate> {
    let budget = check_budget(loc, budget)?;
    f.validate(loc.presentation())?;
    let names = &loc.presentation().generators;
    let cut = f.cut(alpha);
    for s in schedule {
        if s.support() & !cut != 0 {
            return Err(Error::Usage(format!(
                "schedule element {} is not in the cut subalgebra",
                s.display(names)
            )));
        }
    }
    let support = schedule
        .iter()
        .fold(x.support(), |acc, s| acc | s.support());
    let lc = loc.chain_for(support)?;
    let lcut = lc.local_mask(cut);
    let lx = lc.local_term(x);
    let ls: Vec<Term> = schedule.iter().map(|s| lc.local_term(s)).collect();
    let intro = intro_stage(&lc, lx.support())?;
    let mut cert = NonRcCertificate {
        alpha,
        target: x.display(names),
        budget,
        schedule: schedule.iter().map(|s| s.display(names)).collect(),
        checks: Vec::new(),
        passed: false,
        refutation: None,
    };
    let refute = |mut c: NonRcCertificate, why: String| {
        c.refutation = Some(why);
        Ok(c)
    };
    if intro >= budget {
        return refute(
            cert,
            format!("target first appears at stage {intro}, no later stage to escape into"),
        );
    }
    for m in intro..=budget {
        let st = lc.chain.stage(m)?;
        let xm = st.eval(&lx)?;
        let active: Vec<Elem> = ls
            .iter()
            .take_while(|s| s.support() & !st_active(&lc, m) == 0)
            .map(|s| st.eval(s))
            .collect::<Result<_>>()?;
        for (j, s) in active.iter().enumerate() {
            if !s.leq(&xm)? {
                return refute(
                    cert,
                    format!("schedule element {j} is not below the target at stage {m}"),
                );
            }
            if j > 0 && !active[j - 1].lt(s)? {
                return refute(
                    cert,
                    format!("schedule not strictly increasing at stage {m} (index {j})"),
                );
            }
        }
        if m == budget {
            break;
        }
        let top = st.lpr_cut(lcut, &xm)?;
        let mut witness = None;
        let mut next_sched = Vec::new();
        for later in m + 1..=budget {
            let next = lc.chain.stage(later)?;
            let top_next = lc.chain.lift(
                &ChainElem {
                    stage: m,
                    value: top.clone(),
                },
                later,
            )?;
            next_sched = ls
                .iter()
                .take_while(|s| s.support() & !st_active(&lc, later) == 0)
                .map(|s| next.eval(s))
                .collect::<Result<_>>()?;
            for (j, s) in next_sched.iter().enumerate() {
                if !s.leq(&top_next)? {
                    witness = Some((later, j));
                    break;
                }
            }
            if witness.is_some() {
                break;
            }
        }
        let exhaustive = match witness {
            Some((later, _)) => exhaustive_escape(&lc, m, later, lcut, &top, &next_sched)?,
            None => None,
        };
        cert.checks.push(EscapeCheck {
            stage: m,
            active_schedule: active.len(),
            witness_stage: witness.map(|w| w.0),
            witness: witness.map(|w| w.1),
            exhaustive,
        });
        if witness.is_none() {
            return refute(
                cert,
                format!("escape fails at stage {m}: the largest cut element below the target absorbs the schedule"),
            );
        }
    }
    cert.passed = true;
    Ok(cert)
}

fn st_active(lc: &LocalChain, m: usize) -> u64 {
    lc.chain.presentation().active_mask(m)
}

/// Checks every cut element `a ≤ top` individually: some schedule element at
/// stage `later` satisfies `a < a + s`.
fn exhaustive_escape(
    lc: &LocalChain,
    m: usize,
    later: usize,
    lcut: u64,
    top: &Elem,
    next_sched: &[Elem],
) -> Result<Option<u64>> {
    let st = lc.chain.stage(m)?;
    let sub = st.subalgebra(lcut);
    let blocks: Vec<Vec<usize>> = sub
        .blocks()
        .into_iter()
        .filter(|b| top.atoms().contains(b[0]))
        .collect();
    if blocks.len() > EXHAUSTIVE_BLOCKS {
        return Ok(None);
    }
    for mask in 0u64..1 << blocks.len() {
        let a = AtomSet::from_indices(
            st.atom_count(),
            blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, b)| b.iter().copied()),
        );
        let a = st.algebra.elem(a)?;
        let lifted = lc.chain.lift(&ChainElem { stage: m, value: a }, later)?;
        let mut escaped = false;
        for s in next_sched {
            if !s.leq(&lifted)? {
                escaped = true;
                break;
            }
        }
        if !escaped {
            return Err(Error::Precondition(format!(
                "exhaustive escape check disagrees with the maximal-element check at stage {m}"
            )));
        }
    }
    Ok(Some(1 << blocks.len()))
}

/// Whether lower projections into a cut subalgebra survive the step from
/// stage `stage - 1` to `stage`, for every element of the earlier stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub stage: usize,
    pub blocks: usize,
    /// Cut blocks at `stage` whose projection misses part of their parent.
    pub short_blocks: usize,
    /// An earlier-stage element whose lower projection grows, if any.
    pub witness: Option<String>,
}

impl Transition {
    pub fn exact(&self) -> bool {
        self.short_blocks == 0
    }
}

/// For `a` at stage `m - 1`, the lower projection of its lift equals the
/// lift of its lower projection iff every cut block at stage `m` projects
/// onto the whole of its parent block; this checks that for `m ≤ budget`.
pub fn lpr_transitions(chain: &ChainModel, cut: u64, budget: usize) -> Result<Vec<Transition>> {
    let n = chain.presentation().stage_count();
    if budget > n {
        return Err(Error::Usage(format!(
            "budget {budget} beyond the {n} scheduled stages"
        )));
    }
    let mut out = Vec::new();
    for m in 1..=budget {
        let (prev, st) = (chain.stage(m - 1)?, chain.stage(m)?);
        let (sub_prev, sub) = (prev.subalgebra(cut), st.subalgebra(cut));
        let map = chain.projection(m - 1, m)?;
        let mut image = vec![AtomSet::empty(prev.atom_count()); sub.block_count()];
        for (a, &b) in sub.block_of().iter().enumerate() {
            image[b as usize].insert(map[a] as usize);
        }
        let sizes = sub_prev.block_sizes();
        let mut t = Transition {
            stage: m,
            blocks: sub.block_count(),
            short_blocks: 0,
            witness: None,
        };
        for img in &image {
            let parent = sub_prev.block_of()[img.first().expect("blocks are nonempty")];
            if img.count() < sizes[parent as usize] {
                t.short_blocks += 1;
                if t.witness.is_none() {
                    t.witness = Some(render(&prev.algebra.elem(img.clone())?));
                }
            }
        }
        out.push(t);
    }
    Ok(out)
}

use serde::{Deserialize, Serialize};

use super::CppTriple;
use crate::chain::{
    lpr_transitions, non_principality_certificate, Localizer, NonRcCertificate, Term, Transition,
};
use crate::{Error, Result};

/// Which columns of one block a generator set `J` takes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowPattern {
    /// A fixed finite set of columns, whatever the truncation.
    Finite(Vec<usize>),
    /// Every column, at every truncation.
    All,
}

/// One row pattern per block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JPattern {
    pub rows: Vec<RowPattern>,
}

impl JPattern {
    pub fn whole(n: usize) -> Self {
        Self {
            rows: vec![RowPattern::All; n],
        }
    }

    pub fn admissible(&self) -> bool {
        self.rows.iter().any(|r| matches!(r, RowPattern::Finite(_)))
    }

    /// Generator mask of `J` in the triple's presentation.
    pub fn mask(&self, t: &CppTriple) -> Result<u64> {
        let p = &t.params;
        if self.rows.len() != p.n {
            return Err(Error::Usage(format!(
                "J has {} rows, the triple has {} blocks",
                self.rows.len(),
                p.n
            )));
        }
        let mut mask = 0u64;
        for (i, r) in self.rows.iter().enumerate() {
            let cols: Vec<usize> = match r {
                RowPattern::All => (0..p.l_max).collect(),
                RowPattern::Finite(c) => c.clone(),
            };
            for c in cols {
                if c >= p.l_max {
                    return Err(Error::Usage(format!(
                        "column {c} beyond l_max = {}",
                        p.l_max
                    )));
                }
                mask |= 1 << t.h_index(i + 1, c);
            }
        }
        Ok(mask)
    }

    /// Stage after which no generator of a finite row is still to come.
    pub fn settled_stage(&self) -> usize {
        self.rows
            .iter()
            .filter_map(|r| match r {
                RowPattern::Finite(c) => c.iter().max().map(|&m| m + 1),
                RowPattern::All => None,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Every admissible pattern over `n` blocks at truncation `l_max`.
pub fn admissible_patterns(n: usize, l_max: usize) -> Vec<JPattern> {
    let mut options: Vec<RowPattern> = (0u32..1 << l_max)
        .map(|m| RowPattern::Finite((0..l_max).filter(|c| m >> c & 1 == 1).collect()))
        .collect();
    options.push(RowPattern::All);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let j = JPattern {
            rows: idx.iter().map(|&i| options[i].clone()).collect(),
        };
        if j.admissible() {
            out.push(j);
        }
        let mut d = 0;
        while d < n {
            idx[d] += 1;
            if idx[d] < options.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == n {
            return out;
        }
    }
}

/// `H ≰rc K` and `H ≰rc L`: the schedule `Σ_{h<j} p_h` climbs below `x`
/// and escapes the largest element of `H` below `x` at every truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseII {
    pub n: usize,
    pub l_max: usize,
    pub w: usize,
    /// With a single column there is no later truncation to escape into.
    pub degenerate: bool,
    pub in_k: Option<NonRcCertificate>,
    pub in_l: Option<NonRcCertificate>,
    pub passed: bool,
}

/// The step from `H' ⊆ H_m` to `H_m(x)`, at the final truncation. `H_m`
/// omits the columns of block `k0` after `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyStep {
    pub k0: usize,
    pub m: Option<usize>,
    pub j_inside: bool,
    /// The elements of `H_m` below `x` are those below `Σ_{h≤m} p_h`.
    pub meet_principal: bool,
    pub coideal_trivial: bool,
    pub x_independent: bool,
    /// `I ∩ H_m = {0}`, i.e. no column of block `k0` survives in `H_m`.
    pub meet_trivial: bool,
}

impl KeyStep {
    pub fn holds(&self) -> bool {
        self.j_inside && self.meet_principal && self.coideal_trivial
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseI {
    pub j: JPattern,
    pub generators: Vec<String>,
    pub settled_stage: usize,
    pub in_k: Vec<Transition>,
    pub in_l: Vec<Transition>,
    pub key_step: KeyStep,
    /// Every transition after the settled stage is exact in `K` and `L`,
    /// and the key step holds.
    pub stable: bool,
}

impl CppTriple {
    pub fn verify_clause_ii(&self) -> Result<ClauseII> {
        let p = self.params;
        let mut out = ClauseII {
            n: p.n,
            l_max: p.l_max,
            w: p.w,
            degenerate: p.l_max < 2,
            in_k: None,
            in_l: None,
            passed: true,
        };
        if out.degenerate {
            return Ok(out);
        }
        let schedule: Vec<Term> = (1..=p.l_max).map(|j| self.schedule_term(j)).collect();
        let x = Term::Gen(self.x_index());
        for free in [false, true] {
            let loc = Localizer::new(self.presentation(free))?;
            let c = non_principality_certificate(
                &loc,
                &self.filtration(free),
                p.h_generators(),
                &x,
                &schedule,
                p.l_max,
            )?;
            out.passed &= c.passed;
            if free {
                out.in_l = Some(c);
            } else {
                out.in_k = Some(c);
            }
        }
        Ok(out)
    }

    /// Lower projections into `⟨J⟩` across the truncations, with no
    /// admissibility requirement.
    pub fn lpr_profile(&self, j: &JPattern) -> Result<(Vec<Transition>, Vec<Transition>)> {
        let mask = j.mask(self)?;
        let l = self.params.l_max;
        Ok((
            lpr_transitions(self.chain(false)?, mask, l)?,
            lpr_transitions(self.chain(true)?, mask, l)?,
        ))
    }

    pub fn verify_clause_i(&self, j: &JPattern) -> Result<ClauseI> {
        if !j.admissible() {
            return Err(Error::Usage("J takes every column of every block".into()));
        }
        let mask = j.mask(self)?;
        let (in_k, in_l) = self.lpr_profile(j)?;
        let settled_stage = j.settled_stage();
        let key_step = self.key_step(j, mask)?;
        let exact_after = |ts: &[Transition]| {
            ts.iter()
                .filter(|t| t.stage > settled_stage)
                .all(Transition::exact)
        };
        let names = self.generator_names();
        Ok(ClauseI {
            generators: (0..names.len())
                .filter(|&g| mask >> g & 1 == 1)
                .map(|g| names[g].clone())
                .collect(),
            settled_stage,
            stable: exact_after(&in_k) && exact_after(&in_l) && key_step.holds(),
            j: j.clone(),
            in_k,
            in_l,
            key_step,
        })
    }

    fn key_step(&self, j: &JPattern, j_mask: u64) -> Result<KeyStep> {
        let p = self.params;
        let (k0, m) = j
            .rows
            .iter()
            .enumerate()
            .find_map(|(i, r)| match r {
                super::RowPattern::Finite(c) => Some((i + 1, c.iter().max().copied())),
                super::RowPattern::All => None,
            })
            .expect("admissible pattern has a finite row");
        let mut hm = 0u64;
        for k in 1..=p.n {
            for l in 0..p.l_max {
                if k != k0 || m.is_some_and(|m| l <= m) {
                    hm |= 1 << self.h_index(k, l);
                }
            }
        }
        let st = self.chain(false)?.stage(p.l_max)?;
        let x = st.gen(self.x_index())?;
        let q = st.eval(&Term::Or(
            (0..m.map_or(0, |m| m + 1))
                .map(|c| self.column_term(c))
                .collect(),
        ))?;
        Ok(KeyStep {
            k0,
            m,
            j_inside: j_mask & !hm == 0,
            meet_principal: st.lpr_cut(hm, &x)? == q,
            coideal_trivial: st.lpr_cut(hm, &x.complement())?.is_zero(),
            x_independent: st.independent_over_cut(hm, std::slice::from_ref(&x))?,
            meet_trivial: q.is_zero(),
        })
    }
}

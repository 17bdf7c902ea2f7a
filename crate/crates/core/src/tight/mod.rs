//! The tight-coding construction: one generator per ordinal below
//! `ω·K_max` (finite parts truncated to the budget), with the ladder points
//! of each coded limit forced below it.

mod ordinal;
mod verify;
mod zero;

pub use ordinal::OrdinalIdx;
pub use verify::{
    distinguish, ClosedFormRow, DistinguishReport, FidelityMode, FidelityRow, Fingerprint, RcReport,
};
pub use zero::{ZeroProduct, ZeroProductEvaluator, ZeroSweep};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::chain::{Filtration, Localizer, PresentedBA, Relation, Term, MAX_GENERATORS};
use crate::{Error, Result};

/// For each limit in scope, a strictly increasing sequence of ordinals below it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LadderSystem {
    pub ladders: BTreeMap<OrdinalIdx, Vec<OrdinalIdx>>,
}

impl LadderSystem {
    /// `ladder(ω·k) = ω·(k-1) + 1, ω·(k-1) + 2, …`, truncated to finite
    /// parts below `budget`.
    pub fn default_ladders(k_max: usize, budget: usize) -> Self {
        let ladders = (1..k_max)
            .map(|k| {
                let pts = (1..budget).map(|n| OrdinalIdx::new(k - 1, n)).collect();
                (OrdinalIdx::new(k, 0), pts)
            })
            .collect();
        Self { ladders }
    }

    pub fn get(&self, alpha: OrdinalIdx) -> &[OrdinalIdx] {
        self.ladders.get(&alpha).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Parameters of a tight-coding instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightParams {
    pub k_max: usize,
    pub s: Vec<OrdinalIdx>,
    pub budget: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladders: Option<LadderSystem>,
}

#[derive(Debug)]
pub struct TightCoding {
    k_max: usize,
    budget: usize,
    s: BTreeSet<OrdinalIdx>,
    ladders: LadderSystem,
    pres: PresentedBA,
    filtration: Filtration,
    local: Localizer,
}

impl TightCoding {
    pub fn build(p: &TightParams) -> Result<Self> {
        let (k_max, budget) = (p.k_max, p.budget);
        if k_max == 0 || budget == 0 {
            return Err(Error::Usage("K_max and budget must be at least 1".into()));
        }
        if k_max * budget > MAX_GENERATORS {
            return Err(Error::Capacity {
                what: "tight-coding generators (K_max * budget)".into(),
                requested: (k_max * budget) as u128,
                limit: MAX_GENERATORS as u128,
            });
        }
        let in_scope = |o: &OrdinalIdx| o.k < k_max && o.n < budget;
        let mut s = BTreeSet::new();
        for &a in &p.s {
            if !a.is_limit() || !in_scope(&a) {
                return Err(Error::Usage(format!(
                    "coded set member {a} is not a limit ordinal below ω·{k_max}"
                )));
            }
            s.insert(a);
        }
        let ladders = p
            .ladders
            .clone()
            .unwrap_or_else(|| LadderSystem::default_ladders(k_max, budget));
        let limits: Vec<OrdinalIdx> = (1..k_max).map(|k| OrdinalIdx::new(k, 0)).collect();
        for (&alpha, pts) in &ladders.ladders {
            if !limits.contains(&alpha) {
                return Err(Error::InvalidLadder(format!(
                    "{alpha} is not a limit in scope"
                )));
            }
            for w in pts.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidLadder(format!(
                        "ladder of {alpha} not strictly increasing at {}",
                        w[1]
                    )));
                }
            }
            for &d in pts {
                if d >= alpha || !in_scope(&d) {
                    return Err(Error::InvalidLadder(format!(
                        "ladder point {d} of {alpha} is not an ordinal in scope below it"
                    )));
                }
                if s.contains(&d) {
                    return Err(Error::InvalidLadder(format!(
                        "ladder of {alpha} meets the coded set at {d}"
                    )));
                }
            }
            if budget > 1 && pts.last().is_none_or(|d| d.k + 1 != alpha.k) {
                return Err(Error::InvalidLadder(format!(
                    "ladder of {alpha} does not reach the last block below it"
                )));
            }
        }
        for &alpha in &limits {
            if budget > 1 && !ladders.ladders.contains_key(&alpha) {
                return Err(Error::InvalidLadder(format!("no ladder for {alpha}")));
            }
        }
        let idx = |o: OrdinalIdx| o.k * budget + o.n;
        let generators = (0..k_max * budget)
            .map(|i| format!("x[{}]", OrdinalIdx::new(i / budget, i % budget)))
            .collect();
        let relations = s
            .iter()
            .map(|&a| Relation::Ideal {
                upper: idx(a),
                lower: ladders.get(a).iter().map(|&d| idx(d)).collect(),
            })
            .collect();
        let schedule = (0..budget)
            .map(|n| (0..k_max).map(|k| k * budget + n).collect())
            .collect();
        let pres = PresentedBA {
            generators,
            relations,
            schedule,
        };
        let filtration = Filtration::by_index(k_max * budget);
        let local = Localizer::new(pres.clone())?;
        Ok(Self {
            k_max,
            budget,
            s,
            ladders,
            pres,
            filtration,
            local,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn coded(&self) -> &BTreeSet<OrdinalIdx> {
        &self.s
    }

    pub fn ladders(&self) -> &LadderSystem {
        &self.ladders
    }

    pub fn presentation(&self) -> &PresentedBA {
        &self.pres
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn localizer(&self) -> &Localizer {
        &self.local
    }

    /// Generator index of `x_α`, which is also the filtration index of `A_α`.
    pub fn index(&self, a: OrdinalIdx) -> Result<usize> {
        if a.k < self.k_max && a.n < self.budget {
            Ok(a.k * self.budget + a.n)
        } else {
            Err(Error::Usage(format!(
                "{a} is outside the scope of this instance"
            )))
        }
    }

    pub fn ordinal(&self, i: usize) -> OrdinalIdx {
        OrdinalIdx::new(i / self.budget, i % self.budget)
    }

    /// All ordinals in scope, in increasing order.
    pub fn scope(&self) -> Vec<OrdinalIdx> {
        (0..self.k_max * self.budget)
            .map(|i| self.ordinal(i))
            .collect()
    }

    pub fn limits(&self) -> Vec<OrdinalIdx> {
        (1..self.k_max).map(|k| OrdinalIdx::new(k, 0)).collect()
    }

    pub fn x(&self, a: OrdinalIdx) -> Result<Term> {
        Ok(Term::Gen(self.index(a)?))
    }

    /// `Σ_{n<j} x_{δ_n^α}`.
    pub fn ladder_sum(&self, a: OrdinalIdx, j: usize) -> Result<Term> {
        let pts = self.ladders.get(a);
        Ok(Term::Or(
            pts[..j.min(pts.len())]
                .iter()
                .map(|&d| self.x(d))
                .collect::<Result<_>>()?,
        ))
    }

    fn check_budget(&self, budget: usize) -> Result<()> {
        if budget == 0 || budget > self.budget {
            Err(Error::Usage(format!(
                "verification budget {budget} outside 1..={}",
                self.budget
            )))
        } else {
            Ok(())
        }
    }
}

use serde::{Deserialize, Serialize};

use super::{OrdinalIdx, TightCoding};
use crate::chain::{
    non_principality_certificate, rc_check, Localizer, NonRcCertificate, RcCertificate, Term,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityMode {
    /// Each check runs in the stage models of the relevant components.
    Localized,
    /// Each check runs in the full stage model.
    FullStage,
}

/// Recursion checks at one stage: independence of `x_α` over `A_α` for
/// `α ∉ S`, and for `α ∈ S` that the cut elements below `x_α` are exactly
/// the ideal of the active ladder points and none lie below `-x_α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub stage: usize,
    pub checked: usize,
    pub independence_failures: Vec<OrdinalIdx>,
    pub ideal_failures: Vec<OrdinalIdx>,
    pub coideal_failures: Vec<OrdinalIdx>,
}

impl FidelityRow {
    pub fn ok(&self) -> bool {
        self.independence_failures.is_empty()
            && self.ideal_failures.is_empty()
            && self.coideal_failures.is_empty()
    }
}

/// Lower projection of `x_β` into `A_δ` against `Σ{x_{δ_n^β} : δ_n^β < δ}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormRow {
    pub beta: OrdinalIdx,
    pub delta: OrdinalIdx,
    pub stages_checked: usize,
    pub mismatched_stages: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcReport {
    pub alpha: OrdinalIdx,
    pub certificate: RcCertificate,
    pub closed_form: Vec<ClosedFormRow>,
}

/// Which ordinals carry a passing non-rc certificate and which show an
/// unstable lower projection at the final stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub coded: Vec<OrdinalIdx>,
    pub non_rc: Vec<OrdinalIdx>,
    pub unstable: Vec<OrdinalIdx>,
    /// Every ordinal in scope gets exactly one verdict: certified non-rc and
    /// unstable, or stable with any non-rc attempt refuted.
    pub dichotomy_holds: bool,
    pub equals_coded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishReport {
    pub first: Fingerprint,
    pub second: Fingerprint,
    pub differ: bool,
    pub both_exact: bool,
}

impl TightCoding {
    /// Certificate that `A_α` is not relatively complete in the limit:
    /// schedule `s_j = Σ_{n<j} x_{δ_n^α}` below `x_α`.
    pub fn verify_non_rc(&self, alpha: OrdinalIdx, budget: usize) -> Result<NonRcCertificate> {
        if !self.s.contains(&alpha) {
            return Err(Error::Precondition(format!(
                "{alpha} is not in the coded set"
            )));
        }
        self.non_rc_attempt(alpha, budget)
    }

    /// The non-rc certificate attempt for any limit in scope.
    pub fn non_rc_attempt(&self, alpha: OrdinalIdx, budget: usize) -> Result<NonRcCertificate> {
        self.check_budget(budget)?;
        if !alpha.is_limit() {
            return Err(Error::Precondition(format!("{alpha} has no ladder")));
        }
        let len = self.ladders.get(alpha).len();
        let schedule = (1..=len)
            .map(|j| self.ladder_sum(alpha, j))
            .collect::<Result<Vec<_>>>()?;
        non_principality_certificate(
            &self.local,
            &self.filtration,
            self.index(alpha)?,
            &self.x(alpha)?,
            &schedule,
            budget,
        )
    }

    /// Generator literals, and joins of two literals of distinct generators
    /// from the same relation component.
    pub fn rc_probes(&self) -> Vec<Term> {
        let n = self.pres.generators.len();
        let comp = self.pres.components();
        let mut probes: Vec<Term> = (0..n)
            .flat_map(|g| [Term::literal(g, 0), Term::literal(g, 1)])
            .collect();
        for g in 0..n {
            for h in g + 1..n {
                if comp[g] == comp[h] {
                    for sg in 0..2 {
                        for sh in 0..2 {
                            probes.push(Term::Or(vec![Term::literal(g, sg), Term::literal(h, sh)]));
                        }
                    }
                }
            }
        }
        probes
    }

    pub fn rc_attempt(&self, alpha: OrdinalIdx, budget: usize) -> Result<RcCertificate> {
        self.check_budget(budget)?;
        rc_check(
            &self.local,
            &self.filtration,
            self.index(alpha)?,
            budget,
            &self.rc_probes(),
        )
    }

    /// Stage-wise rc evidence for `A_α` with `α ∉ S`, plus the closed-form
    /// lower projections of coded generators into every `A_δ`, `δ ≤ α`.
    pub fn verify_rc(&self, alpha: OrdinalIdx, budget: usize) -> Result<RcReport> {
        if self.s.contains(&alpha) {
            return Err(Error::Precondition(format!("{alpha} is in the coded set")));
        }
        let certificate = self.rc_attempt(alpha, budget)?;
        let mut closed_form = Vec::new();
        for &beta in &self.s {
            for delta in self.scope() {
                if delta <= alpha && delta <= beta {
                    closed_form.push(self.closed_form(&self.local, beta, delta, budget)?);
                }
            }
        }
        Ok(RcReport {
            alpha,
            certificate,
            closed_form,
        })
    }

    /// Compares the stage lower projection of `x_β` into `A_δ` with the sum
    /// of the active ladder points of `β` below `δ`, at every stage.
    pub fn closed_form(
        &self,
        loc: &Localizer,
        beta: OrdinalIdx,
        delta: OrdinalIdx,
        budget: usize,
    ) -> Result<ClosedFormRow> {
        self.check_budget(budget)?;
        let xb = self.x(beta)?;
        let lc = loc.chain_for(xb.support())?;
        let cut = lc.local_mask(self.filtration.cut(self.index(delta)?));
        let mut row = ClosedFormRow {
            beta,
            delta,
            stages_checked: 0,
            mismatched_stages: Vec::new(),
        };
        for m in beta.n + 1..=budget {
            let st = lc.chain.stage(m)?;
            let lpr = st.lpr_cut(cut, &st.eval(&lc.local_term(&xb))?)?;
            let pts: Vec<Term> = self
                .ladders
                .get(beta)
                .iter()
                .filter(|d| **d < delta && d.n < m)
                .map(|&d| self.x(d))
                .collect::<Result<_>>()?;
            let expected = st.eval(&lc.local_term(&Term::Or(pts)))?;
            row.stages_checked += 1;
            if lpr != expected {
                row.mismatched_stages.push(m);
            }
        }
        Ok(row)
    }

    pub fn fidelity(&self, budget: usize, mode: FidelityMode) -> Result<Vec<FidelityRow>> {
        self.check_budget(budget)?;
        let whole;
        let loc = match mode {
            FidelityMode::Localized => &self.local,
            FidelityMode::FullStage => {
                whole = Localizer::whole(self.pres.clone())?;
                &whole
            }
        };
        let mut rows = Vec::new();
        for m in 1..=budget {
            let mut row = FidelityRow {
                stage: m,
                checked: 0,
                independence_failures: Vec::new(),
                ideal_failures: Vec::new(),
                coideal_failures: Vec::new(),
            };
            for alpha in self.scope().into_iter().filter(|a| a.n < m) {
                let xa = self.x(alpha)?;
                let lc = loc.chain_for(xa.support())?;
                let st = lc.chain.stage(m)?;
                let cut = lc.local_mask(self.filtration.cut(self.index(alpha)?));
                let x = st.eval(&lc.local_term(&xa))?;
                row.checked += 1;
                if self.s.contains(&alpha) {
                    let pts: Vec<Term> = self
                        .ladders
                        .get(alpha)
                        .iter()
                        .filter(|d| d.n < m)
                        .map(|&d| self.x(d))
                        .collect::<Result<_>>()?;
                    let ideal = st.eval(&lc.local_term(&Term::Or(pts)))?;
                    if st.lpr_cut(cut, &x)? != ideal {
                        row.ideal_failures.push(alpha);
                    }
                    if !st.lpr_cut(cut, &x.complement())?.is_zero() {
                        row.coideal_failures.push(alpha);
                    }
                } else if !st.independent_over_cut(cut, std::slice::from_ref(&x))? {
                    row.independence_failures.push(alpha);
                }
            }
            rows.push(row);
        }
        Ok(rows)
    }

    pub fn fingerprint(&self, budget: usize) -> Result<Fingerprint> {
        self.check_budget(budget)?;
        let mut non_rc = Vec::new();
        let mut unstable = Vec::new();
        let mut dichotomy_holds = true;
        for alpha in self.scope() {
            let certified = alpha.is_limit() && self.non_rc_attempt(alpha, budget)?.passed;
            let stable = self.rc_attempt(alpha, budget)?.stable;
            if certified {
                non_rc.push(alpha);
            }
            if !stable {
                unstable.push(alpha);
            }
            if certified == stable {
                dichotomy_holds = false;
            }
        }
        let coded: Vec<OrdinalIdx> = self.s.iter().copied().collect();
        let equals_coded = non_rc == coded && unstable == coded;
        Ok(Fingerprint {
            coded,
            non_rc,
            unstable,
            dichotomy_holds,
            equals_coded,
        })
    }
}

/// Fingerprints of two instances over the same `K_max`.
pub fn distinguish(a: &TightCoding, b: &TightCoding, budget: usize) -> Result<DistinguishReport> {
    if a.k_max != b.k_max {
        return Err(Error::Precondition("instances differ in K_max".into()));
    }
    let first = a.fingerprint(budget)?;
    let second = b.fingerprint(budget)?;
    Ok(DistinguishReport {
        differ: first.non_rc != second.non_rc,
        both_exact: first.equals_coded && second.equals_coded,
        first,
        second,
    })
}

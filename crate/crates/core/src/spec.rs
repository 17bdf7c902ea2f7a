//! Run specifications: strict JSON, one section per kind.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assembly::{MAX_FINAL_NODES, MAX_NODE_GENERATORS};
use crate::chain::MAX_GENERATORS;
use crate::cpp::{CppParams, JPattern};
use crate::lambda::{BasedFamily, DEFAULT_SEARCH_BUDGET};
use crate::selftest::SelftestConfig;
use crate::tight::{FidelityMode, LadderSystem, OrdinalIdx};
use crate::transversal::SetFamily;
use crate::{Error, Result};

/// Budget used by tight-coding runs when the spec gives none.
pub const DEFAULT_TIGHT_BUDGET: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    TightCoding,
    CpPlus,
    LambdaSystem,
    AsConstruction,
    Transversal,
    Selftest,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::TightCoding => "tight-coding",
            Kind::CpPlus => "cp-plus",
            Kind::LambdaSystem => "lambda-system",
            Kind::AsConstruction => "as-construction",
            Kind::Transversal => "transversal",
            Kind::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightSpec {
    pub k_max: usize,
    pub s: Vec<OrdinalIdx>,
    /// A second coded set; the run then also distinguishes the two.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<Vec<OrdinalIdx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladders: Option<LadderSystem>,
    #[serde(default = "localized")]
    pub mode: FidelityMode,
}

fn localized() -> FidelityMode {
    FidelityMode::Localized
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CppSpec {
    pub n: usize,
    pub l_max: usize,
    #[serde(default)]
    pub w: usize,
    /// Defaults to every admissible pattern.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<Vec<JPattern>>,
}

impl CppSpec {
    pub fn params(&self) -> CppParams {
        CppParams {
            n: self.n,
            l_max: self.l_max,
            w: self.w,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSpec {
    pub family: BasedFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsSpec {
    pub params: CppParams,
    pub family: BasedFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransversalSpec {
    pub family: SetFamily,
    /// Also test every subfamily missing one index.
    #[serde(default)]
    pub almost_free: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunSpec {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    /// Search or stage budget; each kind has its own default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tight_coding: Option<TightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cp_plus: Option<CppSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_system: Option<LambdaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub as_construction: Option<AsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transversal: Option<TransversalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selftest: Option<SelftestConfig>,
}

impl RunSpec {
    pub fn selftest(seed: u64) -> Self {
        Self {
            kind: Kind::Selftest,
            seed,
            budget: None,
            output: None,
            tight_coding: None,
            cp_plus: None,
            lambda_system: None,
            as_construction: None,
            transversal: None,
            selftest: None,
        }
    }

    pub fn effective_budget(&self) -> usize {
        self.budget.unwrap_or(match self.kind {
            Kind::TightCoding => DEFAULT_TIGHT_BUDGET,
            Kind::Selftest => self
                .selftest
                .as_ref()
                .map_or(DEFAULT_TIGHT_BUDGET, |c| c.tight_budget),
            _ => DEFAULT_SEARCH_BUDGET,
        })
    }

    /// Section presence and capacity bounds.
    pub fn check(&self) -> Result<()> {
        let present: Vec<Kind> = [
            (Kind::TightCoding, self.tight_coding.is_some()),
            (Kind::CpPlus, self.cp_plus.is_some()),
            (Kind::LambdaSystem, self.lambda_system.is_some()),
            (Kind::AsConstruction, self.as_construction.is_some()),
            (Kind::Transversal, self.transversal.is_some()),
            (Kind::Selftest, self.selftest.is_some()),
        ]
        .into_iter()
        .filter_map(|(k, p)| p.then_some(k))
        .collect();
        if let Some(k) = present.iter().find(|&&k| k != self.kind) {
            return Err(Error::Parse(format!(
                "field {:?}: section does not match kind {:?}",
                k.name(),
                self.kind.name()
            )));
        }
        if present.is_empty() && self.kind != Kind::Selftest {
            return Err(Error::Parse(format!(
                "field {:?}: missing section for kind",
                self.kind.name()
            )));
        }
        let budget = self.effective_budget();
        if budget == 0 {
            return Err(Error::Parse("field \"budget\": must be at least 1".into()));
        }
        if let Some(t) = &self.tight_coding {
            if t.k_max == 0 {
                return Err(Error::Parse("field \"k_max\": must be at least 1".into()));
            }
            if t.k_max * budget > MAX_GENERATORS {
                return Err(Error::Capacity {
                    what: "tight-coding generators (K_max * budget)".into(),
                    requested: (t.k_max * budget) as u128,
                    limit: MAX_GENERATORS as u128,
                });
            }
        }
        if let Some(c) = &self.cp_plus {
            c.params().validate()?;
        }
        if let Some(a) = &self.as_construction {
            a.params.validate()?;
            let finals = a.family.system.finals().len();
            if finals > MAX_FINAL_NODES {
                return Err(Error::Capacity {
                    what: "final nodes".into(),
                    requested: finals as u128,
                    limit: MAX_FINAL_NODES as u128,
                });
            }
            if a.params.h_generators() > MAX_NODE_GENERATORS {
                return Err(Error::Capacity {
                    what: "generators per node".into(),
                    requested: a.params.h_generators() as u128,
                    limit: MAX_NODE_GENERATORS as u128,
                });
            }
        }
        if let Some(t) = &self.transversal {
            t.family.validate()?;
        }
        Ok(())
    }
}

/// Strict parse. Errors carry the line and column, or the offending field.
pub fn parse_spec(text: &str) -> Result<RunSpec> {
    if text.trim().is_empty() {
        return Err(Error::Parse("empty spec document".into()));
    }
    let spec: RunSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.check()?;
    Ok(spec)
}

pub fn read_spec(path: &Path) -> Result<RunSpec> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

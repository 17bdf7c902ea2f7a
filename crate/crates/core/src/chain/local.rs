use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{ChainModel, PresentedBA, Term};
use crate::Result;

/// Evaluates terms in the smallest sub-presentation that determines them.
///
/// Every stage model is the coproduct of the stage models of the relation
/// graph's components, so an element supported on some components, its
/// lower projection into a cut subalgebra, independence over a cut, and
/// whether a product of literals vanishes are all decided inside the
/// presentation restricted to those components.
#[derive(Debug)]
pub struct Localizer {
    pres: PresentedBA,
    comp: Vec<usize>,
    whole: bool,
    cache: Mutex<HashMap<u64, Arc<LocalChain>>>,
}

/// A restricted presentation together with its chain of stage models.
#[derive(Debug)]
pub struct LocalChain {
    /// Global index of each local generator.
    pub keep: Vec<usize>,
    pub chain: ChainModel,
}

impl LocalChain {
    pub fn local_mask(&self, global: u64) -> u64 {
        self.keep
            .iter()
            .enumerate()
            .filter(|(_, &g)| global >> g & 1 == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn local_term(&self, t: &Term) -> Term {
        let keep = &self.keep;
        t.rename(&|g| {
            keep.iter()
                .position(|&h| h == g)
                .expect("term outside local chain")
        })
    }
}

impl Localizer {
    pub fn new(pres: PresentedBA) -> Result<Self> {
        pres.validate()?;
        Ok(Self {
            comp: pres.components(),
            pres,
            whole: false,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// No localization: every query runs on the full presentation.
    pub fn whole(pres: PresentedBA) -> Result<Self> {
        let mut l = Self::new(pres)?;
        l.whole = true;
        Ok(l)
    }

    pub fn presentation(&self) -> &PresentedBA {
        &self.pres
    }

    pub fn chain_for(&self, support: u64) -> Result<Arc<LocalChain>> {
        let n = self.pres.generators.len();
        let comps: u64 = if self.whole {
            u64::MAX
        } else {
            (0..n)
                .filter(|&g| support >> g & 1 == 1)
                .fold(0, |acc, g| acc | 1 << self.comp[g])
        };
        let mut cache = self.cache.lock().expect("localizer cache poisoned");
        if let Some(c) = cache.get(&comps) {
            return Ok(c.clone());
        }
        let keep: Vec<usize> = (0..n).filter(|&g| comps >> self.comp[g] & 1 == 1).collect();
        let sub = if self.whole {
            self.pres.clone()
        } else {
            self.pres.restrict(&keep)
        };
        let lc = Arc::new(LocalChain {
            keep,
            chain: ChainModel::new(sub)?,
        });
        cache.insert(comps, lc.clone());
        Ok(lc)
    }
}

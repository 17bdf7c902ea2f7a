use serde::{Deserialize, Serialize};

use super::{OrdinalIdx, TightCoding};
use crate::bitset::AtomSet;
use crate::chain::Term;
use crate::{Error, Result};

/// `∏_{y∈Y} y^{g(y)}` evaluated in the model, next to the combinatorial
/// characterization: some coded `α` and ladder point `δ_i^α` both in `Y`
/// with `g(x_α) = 1` and `g(x_{δ_i^α}) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroProduct {
    pub y: Vec<OrdinalIdx>,
    pub signs: Vec<u8>,
    pub model_zero: bool,
    pub predicate: bool,
}

impl ZeroProduct {
    pub fn agrees(&self) -> bool {
        self.model_zero == self.predicate
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroSweep {
    pub max_size: usize,
    pub sets: u64,
    pub cases: u64,
    pub zero_cases: u64,
    pub disagreements: u64,
    pub examples: Vec<ZeroProduct>,
}

/// Literal tables of every generator in the final stage model of its
/// relation component; a product of literals vanishes iff it vanishes in
/// some component.
pub struct ZeroProductEvaluator<'a> {
    tc: &'a TightCoding,
    comp: Vec<usize>,
    literals: Vec<[AtomSet; 2]>,
    /// For each generator, the generators it must lie below.
    uppers: Vec<Vec<usize>>,
}

impl<'a> ZeroProductEvaluator<'a> {
    pub fn new(tc: &'a TightCoding) -> Result<Self> {
        let n = tc.pres.generators.len();
        let comp = tc.pres.components();
        let mut literals = Vec::with_capacity(n);
        for g in 0..n {
            let lc = tc.local.chain_for(1 << g)?;
            let st = lc.chain.stage(tc.budget)?;
            let x = st.eval(&lc.local_term(&Term::Gen(g)))?;
            let neg = x.complement().into_atoms();
            literals.push([x.into_atoms(), neg]);
        }
        let mut uppers = vec![Vec::new(); n];
        for &a in &tc.s {
            for &d in tc.ladders.get(a) {
                uppers[tc.index(d)?].push(tc.index(a)?);
            }
        }
        Ok(Self {
            tc,
            comp,
            literals,
            uppers,
        })
    }

    /// Bit `i` of `signs` is the sign of `ys[i]`.
    fn model_zero<'s>(&'s self, ys: &[usize], signs: u32, buf: &mut Vec<&'s AtomSet>) -> bool {
        let mut done = 0u32;
        for i in 0..ys.len() {
            if done >> i & 1 == 1 {
                continue;
            }
            buf.clear();
            for j in i..ys.len() {
                if self.comp[ys[j]] == self.comp[ys[i]] {
                    done |= 1 << j;
                    buf.push(&self.literals[ys[j]][(signs >> j & 1) as usize]);
                }
            }
            if !AtomSet::meet_nonzero(buf) {
                return true;
            }
        }
        false
    }

    fn predicate(&self, ys: &[usize], signs: u32) -> bool {
        ys.iter().enumerate().any(|(i, &d)| {
            signs >> i & 1 == 0
                && self.uppers[d].iter().any(|&a| {
                    ys.iter()
                        .position(|&y| y == a)
                        .is_some_and(|j| signs >> j & 1 == 1)
                })
        })
    }

    pub fn evaluate(&self, y: &[OrdinalIdx], signs: &[u8]) -> Result<ZeroProduct> {
        if y.len() != signs.len() || y.len() > 32 {
            return Err(Error::Usage("one sign per element of Y, at most 32".into()));
        }
        let ys: Vec<usize> = y.iter().map(|&a| self.tc.index(a)).collect::<Result<_>>()?;
        let mut sorted = ys.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != ys.len() {
            return Err(Error::Usage("Y lists a generator twice".into()));
        }
        let mask = signs
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &s)| acc | ((s & 1) as u32) << i);
        let mut buf = Vec::new();
        Ok(ZeroProduct {
            y: y.to_vec(),
            signs: signs.to_vec(),
            model_zero: self.model_zero(&ys, mask, &mut buf),
            predicate: self.predicate(&ys, mask),
        })
    }

    /// Every `Y` with `|Y| ≤ max_size` and every sign map on it.
    pub fn sweep(&self, max_size: usize) -> ZeroSweep {
        let n = self.literals.len();
        let mut out = ZeroSweep {
            max_size,
            sets: 0,
            cases: 0,
            zero_cases: 0,
            disagreements: 0,
            examples: Vec::new(),
        };
        let mut ys = Vec::with_capacity(max_size);
        let mut buf = Vec::new();
        self.walk(n, max_size, 0, &mut ys, &mut buf, &mut out);
        out
    }

    fn walk<'s>(
        &'s self,
        n: usize,
        max_size: usize,
        from: usize,
        ys: &mut Vec<usize>,
        buf: &mut Vec<&'s AtomSet>,
        out: &mut ZeroSweep,
    ) {
        out.sets += 1;
        for signs in 0u32..1 << ys.len() {
            out.cases += 1;
            let z = self.model_zero(ys, signs, buf);
            let p = self.predicate(ys, signs);
            if z {
                out.zero_cases += 1;
            }
            if z != p {
                out.disagreements += 1;
                if out.examples.len() < 8 {
                    out.examples.push(ZeroProduct {
                        y: ys.iter().map(|&g| self.tc.ordinal(g)).collect(),
                        signs: (0..ys.len()).map(|i| (signs >> i & 1) as u8).collect(),
                        model_zero: z,
                        predicate: p,
                    });
                }
            }
        }
        if ys.len() == max_size {
            return;
        }
        for g in from..n {
            ys.push(g);
            self.walk(n, max_size, g + 1, ys, buf, out);
            ys.pop();
        }
    }
}

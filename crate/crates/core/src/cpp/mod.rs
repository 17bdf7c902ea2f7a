//! Truncations of the triple `H ≤ K ≤ L` witnessing the strong
//! construction principle, and checks of its two clauses.

mod clauses;
mod sirota;

pub use clauses::{admissible_patterns, ClauseI, ClauseII, JPattern, KeyStep, RowPattern};
pub use sirota::{
    extend_independent_witness, sirota_ladder, SirotaLadder, SirotaOutcome, SirotaStep,
};

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bitset::AtomSet;
use crate::chain::{ChainModel, Filtration, PresentedBA, Relation, Term, MAX_GENERATORS};
use crate::kernel::{
    adjoin_element, coproduct, join_all, make_free, meet_all, Adjunction, Coproduct, Elem, FreeBA,
    SubalgebraDesc,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CppParams {
    /// Number of blocks.
    pub n: usize,
    /// Columns kept per block.
    pub l_max: usize,
    /// Width of the free coproduct factor.
    pub w: usize,
}

impl CppParams {
    pub fn h_generators(&self) -> usize {
        self.n * self.l_max
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.l_max == 0 {
            return Err(Error::Usage("CP+ needs n ≥ 1 and l_max ≥ 1".into()));
        }
        let total = self.h_generators() + 1 + self.w;
        if total > MAX_GENERATORS {
            return Err(Error::Capacity {
                what: "CP+ generators".into(),
                requested: total as u128,
                limit: MAX_GENERATORS as u128,
            });
        }
        Ok(())
    }
}

/// `H = Fr(x_{k,l})`, `K = H(x)` with `H↾x` the ideal generated by the
/// column products `p_h = ∏_k x_{k,h}` and `H↾-x = {0}`, `L = K ⊕ Fr(w)`.
/// Generators of `H` are enumerated row-major: `h_m = x_{k,l}` with
/// `m = (k-1)·l_max + l`, so block `s^k` is the `k`-th run of `l_max`.
#[derive(Debug)]
pub struct CppTriple {
    pub params: CppParams,
    pub h: FreeBA,
    pub column_products: Vec<Elem>,
    pub ideal_generator: Elem,
    pub k: Adjunction,
    pub free_part: FreeBA,
    pub l: Coproduct,
    chains: [OnceLock<Result<ChainModel>>; 2],
}

/// `{a ∈ H : a ≤ x}` against the principal ideal of the ideal generator,
/// decided atom by atom (an element lies below `x` iff its atoms do).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealLaw {
    pub atoms_checked: usize,
    pub mismatched_atoms: usize,
    pub lpr_matches: bool,
}

impl IdealLaw {
    pub fn holds(&self) -> bool {
        self.mismatched_atoms == 0 && self.lpr_matches
    }
}

/// Products of generator literals: nonzero in `H`, nonzero against `x` in
/// `K`, and zero against `-x` exactly when some column is fully positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLaw {
    pub patterns: u64,
    pub zero_in_h: u64,
    pub zero_with_x: u64,
    pub mispredicted_with_complement: u64,
    pub column_products_below_x: bool,
}

impl BlockLaw {
    pub fn holds(&self) -> bool {
        self.zero_in_h == 0
            && self.zero_with_x == 0
            && self.mispredicted_with_complement == 0
            && self.column_products_below_x
    }
}

const BLOCK_LAW_GENERATORS: usize = 12;

pub fn build_cpp(p: &CppParams) -> Result<CppTriple> {
    p.validate()?;
    let h = make_free(p.h_generators())?;
    let column_products = (0..p.l_max)
        .map(|c| meet_all(&h.algebra, (1..=p.n).map(|k| &h.generators[index(p, k, c)])))
        .collect::<Result<Vec<_>>>()?;
    let ideal_generator = join_all(&h.algebra, &column_products)?;
    let k = adjoin_element(&h.algebra, &ideal_generator, &h.algebra.zero())?;
    let free_part = make_free(p.w)?;
    let l = coproduct(&k.algebra, &free_part.algebra)?;
    Ok(CppTriple {
        params: *p,
        h,
        column_products,
        ideal_generator,
        k,
        free_part,
        l,
        chains: [OnceLock::new(), OnceLock::new()],
    })
}

fn index(p: &CppParams, k: usize, l: usize) -> usize {
    (k - 1) * p.l_max + l
}

impl CppTriple {
    /// Row-major position of `x_{k,l}`, `k` counted from 1.
    pub fn h_index(&self, k: usize, l: usize) -> usize {
        index(&self.params, k, l)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        (1..=self.params.n)
            .map(|k| (0..self.params.l_max).map(|l| self.h_index(k, l)).collect())
            .collect()
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.params.n)
            .flat_map(|k| (0..self.params.l_max).map(move |l| format!("x[{k},{l}]")))
            .collect();
        names.push("x".into());
        names.extend((0..self.params.w).map(|i| format!("y[{i}]")));
        names
    }

    /// Generator index of `x` in [`CppTriple::presentation`].
    pub fn x_index(&self) -> usize {
        self.params.h_generators()
    }

    pub fn h_in_k(&self, a: &Elem) -> Result<Elem> {
        self.k.embedding.apply(&self.k.algebra, a)
    }

    pub fn k_in_l(&self, a: &Elem) -> Result<Elem> {
        self.l.left.apply(&self.l.algebra, a)
    }

    /// `p_c` as a term over [`CppTriple::presentation`].
    pub fn column_term(&self, c: usize) -> Term {
        Term::And(
            (1..=self.params.n)
                .map(|k| Term::Gen(self.h_index(k, c)))
                .collect(),
        )
    }

    /// `Σ_{h<j} p_h`.
    pub fn schedule_term(&self, j: usize) -> Term {
        Term::Or((0..j).map(|c| self.column_term(c)).collect())
    }

    /// The K-chain (or L-chain with `free`) whose stage `l` is the
    /// truncation to the first `l` columns: stage 1 activates column 0,
    /// `x` and the free generators, stage `l+1` activates column `l`.
    pub fn presentation(&self, free: bool) -> PresentedBA {
        let p = &self.params;
        let mut generators = self.generator_names();
        if !free {
            generators.truncate(p.h_generators() + 1);
        }
        let column = |c: usize| (1..=p.n).map(|k| index(p, k, c)).collect::<Vec<_>>();
        let mut schedule: Vec<Vec<usize>> = (0..p.l_max).map(column).collect();
        schedule[0].push(self.x_index());
        if free {
            schedule[0].extend(self.x_index() + 1..self.x_index() + 1 + p.w);
        }
        PresentedBA {
            generators,
            relations: (0..p.l_max)
                .map(|c| Relation::Product {
                    factors: column(c),
                    upper: self.x_index(),
                })
                .collect(),
            schedule,
        }
    }

    /// `H` first, then `x`, then the free generators.
    pub fn filtration(&self, free: bool) -> Filtration {
        Filtration::by_index(self.x_index() + 1 + if free { self.params.w } else { 0 })
    }

    pub fn chain(&self, free: bool) -> Result<&ChainModel> {
        self.chains[free as usize]
            .get_or_init(|| ChainModel::new(self.presentation(free)))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn ideal_law(&self) -> Result<IdealLaw> {
        let ha = &self.h.algebra;
        let x = &self.k.x;
        let mut mismatched_atoms = 0;
        for t in 0..ha.atom_count() {
            let below = self.h_in_k(&ha.atom(t))?.leq(x)?;
            if below != self.ideal_generator.atoms().contains(t) {
                mismatched_atoms += 1;
            }
        }
        let image = self.k.embedding.image(&self.k.algebra)?;
        let lpr = image.lpr(&self.k.algebra, x)?;
        Ok(IdealLaw {
            atoms_checked: ha.atom_count(),
            mismatched_atoms,
            lpr_matches: lpr == self.h_in_k(&self.ideal_generator)?,
        })
    }

    /// Exhaustive over every partial sign pattern on the generators of `H`.
    pub fn block_law(&self) -> Result<BlockLaw> {
        let g = self.params.h_generators();
        if g > BLOCK_LAW_GENERATORS {
            return Err(Error::Capacity {
                what: "block law generators".into(),
                requested: g as u128,
                limit: BLOCK_LAW_GENERATORS as u128,
            });
        }
        let lit_h: Vec<[AtomSet; 2]> = self
            .h
            .generators
            .iter()
            .map(|e| [e.atoms().clone(), e.atoms().complement()])
            .collect();
        let lit_k: Vec<[AtomSet; 2]> = self
            .h
            .generators
            .iter()
            .map(|e| {
                let k = self.h_in_k(e)?;
                Ok([k.atoms().clone(), k.atoms().complement()])
            })
            .collect::<Result<_>>()?;
        let x = self.k.x.atoms().clone();
        let not_x = x.complement();
        let mut law = BlockLaw {
            patterns: 0,
            zero_in_h: 0,
            zero_with_x: 0,
            mispredicted_with_complement: 0,
            column_products_below_x: true,
        };
        // Digit i of `code` in base 3: 0 absent, 1 positive, 2 negative.
        let mut digits = vec![0u8; g];
        let mut hs: Vec<&AtomSet> = Vec::with_capacity(g);
        let mut ks: Vec<&AtomSet> = Vec::with_capacity(g + 1);
        for _ in 0..3u64.pow(g as u32) {
            hs.clear();
            ks.clear();
            for (i, &d) in digits.iter().enumerate() {
                if d > 0 {
                    hs.push(&lit_h[i][d as usize - 1]);
                    ks.push(&lit_k[i][d as usize - 1]);
                }
            }
            law.patterns += 1;
            if !hs.is_empty() && !AtomSet::meet_nonzero(&hs) {
                law.zero_in_h += 1;
            }
            ks.push(&x);
            if !AtomSet::meet_nonzero(&ks) {
                law.zero_with_x += 1;
            }
            ks.pop();
            ks.push(&not_x);
            let zero = !AtomSet::meet_nonzero(&ks);
            let predicted = (0..self.params.l_max)
                .any(|c| (1..=self.params.n).all(|k| digits[self.h_index(k, c)] == 1));
            if zero != predicted {
                law.mispredicted_with_complement += 1;
            }
            for d in digits.iter_mut() {
                *d += 1;
                if *d < 3 {
                    break;
                }
                *d = 0;
            }
        }
        for p in &self.column_products {
            if !self.h_in_k(p)?.meet(&self.k.x.complement())?.is_zero() {
                law.column_products_below_x = false;
            }
        }
        Ok(law)
    }

    /// `K ≤free L`: the image of `K` and a free witness over it.
    pub fn k_free_in_l(&self) -> Result<Option<Vec<Elem>>> {
        let image: SubalgebraDesc = self.l.left.image(&self.l.algebra)?;
        image.free_witness(&self.l.algebra)
    }
}

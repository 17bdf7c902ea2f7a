use std::collections::HashMap;

use super::{AlgebraId, Elem, Embedding, FiniteBA, Hom};
use crate::bitset::AtomSet;
use crate::{Error, Result};

/// A subalgebra of a finite algebra, stored as the partition of atoms into
/// blocks; the subalgebra consists of all unions of blocks. Block ids are
/// canonical: numbered by first occurrence in atom order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubalgebraDesc {
    algebra: AlgebraId,
    block_of: Vec<u32>,
    block_count: usize,
}

impl SubalgebraDesc {
    /// Partition by arbitrary keys, one per atom.
    pub fn from_keys(ba: &FiniteBA, keys: impl IntoIterator<Item = u64>) -> Self {
        let mut ids: HashMap<u64, u32> = HashMap::new();
        let block_of: Vec<u32> = keys
            .into_iter()
            .map(|k| {
                let next = ids.len() as u32;
                *ids.entry(k).or_insert(next)
            })
            .collect();
        assert_eq!(block_of.len(), ba.atom_count());
        Self {
            algebra: ba.id(),
            block_count: ids.len(),
            block_of,
        }
    }

    pub fn from_blocks(ba: &FiniteBA, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut key = vec![u64::MAX; ba.atom_count()];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Parse("empty block in subalgebra".into()));
            }
            for &a in block {
                if a >= key.len() || key[a] != u64::MAX {
                    return Err(Error::Parse(format!(
                        "blocks do not partition the atoms (atom {a})"
                    )));
                }
                key[a] = b as u64;
            }
        }
        if key.contains(&u64::MAX) {
            return Err(Error::Parse("blocks do not cover every atom".into()));
        }
        Ok(Self::from_keys(ba, key))
    }

    /// The two-element subalgebra `{0, 1}`.
    pub fn trivial(ba: &FiniteBA) -> Self {
        Self {
            algebra: ba.id(),
            block_of: vec![0; ba.atom_count()],
            block_count: 1,
        }
    }

    pub fn whole(ba: &FiniteBA) -> Self {
        Self {
            algebra: ba.id(),
            block_of: (0..ba.atom_count() as u32).collect(),
            block_count: ba.atom_count(),
        }
    }

    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    pub fn atom_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_of(&self) -> &[u32] {
        &self.block_of
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count];
        for (a, &b) in self.block_of.iter().enumerate() {
            out[b as usize].push(a);
        }
        out
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.block_count];
        for &b in &self.block_of {
            out[b as usize] += 1;
        }
        out
    }

    pub fn is_whole(&self) -> bool {
        self.block_count == self.block_of.len()
    }

    fn check(&self, e: &Elem) -> Result<()> {
        if e.algebra() == self.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// Per-block flag: is the block entirely inside `b`?
    fn full_blocks(&self, b: &AtomSet) -> Vec<bool> {
        let mut full = vec![true; self.block_count];
        for (a, &blk) in self.block_of.iter().enumerate() {
            if !b.contains(a) {
                full[blk as usize] = false;
            }
        }
        full
    }

    pub fn contains(&self, e: &Elem) -> Result<bool> {
        self.check(e)?;
        let full = self.full_blocks(e.atoms());
        Ok(e.atoms().iter().all(|a| full[self.block_of[a] as usize]))
    }

    /// Union of the blocks flagged in `mask` (indexed by block id).
    pub fn union_of_blocks(&self, ba: &FiniteBA, mask: &AtomSet) -> Result<Elem> {
        if ba.id() != self.algebra || mask.len() != self.block_count {
            return Err(Error::AlgebraMismatch);
        }
        Ok(ba.wrap(AtomSet::from_fn(self.block_of.len(), |a| {
            mask.contains(self.block_of[a] as usize)
        })))
    }

    /// Largest element of the subalgebra below `b`.
    pub fn lpr(&self, ba: &FiniteBA, b: &Elem) -> Result<Elem> {
        self.check(b)?;
        ba.check(b)?;
        let full = self.full_blocks(b.atoms());
        Ok(ba.wrap(AtomSet::from_fn(self.block_of.len(), |a| {
            full[self.block_of[a] as usize]
        })))
    }

    /// Smallest element of the subalgebra above `b`.
    pub fn upr(&self, ba: &FiniteBA, b: &Elem) -> Result<Elem> {
        Ok(self.lpr(ba, &b.complement())?.complement())
    }

    /// `self ⊆ other` as subalgebras of the same algebra.
    pub fn is_subalgebra_of(&self, other: &SubalgebraDesc) -> Result<bool> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let mut owner = vec![u32::MAX; other.block_count];
        for (a, &ob) in other.block_of.iter().enumerate() {
            let sb = self.block_of[a];
            let slot = &mut owner[ob as usize];
            if *slot == u32::MAX {
                *slot = sb;
            } else if *slot != sb {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Subalgebra generated by `self` and `other`.
    pub fn join(&self, ba: &FiniteBA, other: &SubalgebraDesc) -> Result<SubalgebraDesc> {
        if self.algebra != other.algebra || ba.id() != self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Self::from_keys(
            ba,
            self.block_of
                .iter()
                .zip(&other.block_of)
                .map(|(&x, &y)| (x as u64) << 32 | y as u64),
        ))
    }

    /// Subalgebra generated by `self` and the given elements.
    pub fn extend(&self, ba: &FiniteBA, gens: &[Elem]) -> Result<SubalgebraDesc> {
        let mut cur = self.clone();
        for g in gens {
            cur.check(g)?;
            cur = cur.split_by(ba, g.atoms());
        }
        Ok(cur)
    }

    fn split_by(&self, ba: &FiniteBA, g: &AtomSet) -> SubalgebraDesc {
        let mut table = vec![u32::MAX; 2 * self.block_count];
        let mut next = 0u32;
        let block_of = self
            .block_of
            .iter()
            .enumerate()
            .map(|(a, &b)| {
                let slot = &mut table[2 * b as usize + g.contains(a) as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect();
        SubalgebraDesc {
            algebra: ba.id(),
            block_of,
            block_count: next as usize,
        }
    }

    /// The subalgebra as an algebra in its own right (atoms = blocks),
    /// with its inclusion into the ambient algebra.
    pub fn as_algebra(&self, ba: &FiniteBA) -> Result<(FiniteBA, Embedding)> {
        if ba.id() != self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let small = FiniteBA::new(self.block_count)?;
        let inc = Embedding::new(Hom::new(&small, ba, self.block_of.clone())?)?;
        Ok((small, inc))
    }

    /// Express `self ⊆ big` as a subalgebra of `big` viewed as an algebra
    /// (`big_ba` must come from [`SubalgebraDesc::as_algebra`] on `big`).
    pub fn relative_to(&self, big: &SubalgebraDesc, big_ba: &FiniteBA) -> Result<SubalgebraDesc> {
        if !self.is_subalgebra_of(big)? {
            return Err(Error::Precondition(
                "subalgebra is not contained in the larger one".into(),
            ));
        }
        if big_ba.atom_count() != big.block_count {
            return Err(Error::AlgebraMismatch);
        }
        let mut key = vec![0u64; big.block_count];
        for (a, &bb) in big.block_of.iter().enumerate() {
            key[bb as usize] = self.block_of[a] as u64;
        }
        Ok(Self::from_keys(big_ba, key))
    }

    /// An element of the ambient algebra lying in `self`, as an element of
    /// `self` viewed as an algebra.
    pub fn restrict(&self, small: &FiniteBA, e: &Elem) -> Result<Elem> {
        if !self.contains(e)? || small.atom_count() != self.block_count {
            return Err(Error::Precondition(
                "element is not in the subalgebra".into(),
            ));
        }
        let mut s = AtomSet::empty(self.block_count);
        for a in e.atoms().iter() {
            s.insert(self.block_of[a] as usize);
        }
        Ok(small.wrap(s))
    }

    /// Do the elements `xs` form an independent family over `self`, i.e.
    /// does every block meet every sign cell?
    pub fn is_independent(&self, xs: &[Elem]) -> Result<bool> {
        for x in xs {
            self.check(x)?;
        }
        let k = xs.len();
        if k > 20 {
            return Err(Error::Capacity {
                what: "independence family size".into(),
                requested: k as u128,
                limit: 20,
            });
        }
        if k == 0 {
            return Ok(true);
        }
        let cells = 1usize << k;
        if self.block_sizes().iter().any(|&s| s < cells) {
            return Ok(false);
        }
        let mut seen = AtomSet::empty(self.block_count * cells);
        for (a, &b) in self.block_of.iter().enumerate() {
            let mut cell = 0usize;
            for (i, x) in xs.iter().enumerate() {
                if !x.atoms().contains(a) {
                    cell |= 1 << i;
                }
            }
            seen.insert(b as usize * cells + cell);
        }
        Ok(seen.is_full())
    }

    /// If the ambient algebra is free over `self` (finite case: all blocks
    /// have the same size `2^m`), an independent family of `m` elements that
    /// generates the ambient algebra over `self`.
    pub fn free_witness(&self, ba: &FiniteBA) -> Result<Option<Vec<Elem>>> {
        if ba.id() != self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let sizes = self.block_sizes();
        let s = sizes[0];
        if !s.is_power_of_two() || sizes.iter().any(|&t| t != s) {
            return Ok(None);
        }
        let m = s.trailing_zeros() as usize;
        let mut pos_counter = vec![0usize; self.block_count];
        let pos: Vec<usize> = self
            .block_of
            .iter()
            .map(|&b| {
                let p = pos_counter[b as usize];
                pos_counter[b as usize] += 1;
                p
            })
            .collect();
        Ok(Some(
            (0..m)
                .map(|i| ba.wrap(AtomSet::from_fn(pos.len(), |a| pos[a] >> i & 1 == 1)))
                .collect(),
        ))
    }
}

/// Subalgebra generated by a list of elements.
pub fn generated_subalgebra(ba: &FiniteBA, gens: &[Elem]) -> Result<SubalgebraDesc> {
    SubalgebraDesc::trivial(ba).extend(ba, gens)
}

pub fn lpr(ba: &FiniteBA, sub: &SubalgebraDesc, b: &Elem) -> Result<Elem> {
    sub.lpr(ba, b)
}

pub fn upr(ba: &FiniteBA, sub: &SubalgebraDesc, b: &Elem) -> Result<Elem> {
    sub.upr(ba, b)
}

pub fn is_independent_over(sub: &SubalgebraDesc, xs: &[Elem]) -> Result<bool> {
    sub.is_independent(xs)
}

/// Is `ba` finitely free over `sub`?
pub fn is_free_over(ba: &FiniteBA, sub: &SubalgebraDesc) -> Result<bool> {
    Ok(sub.free_witness(ba)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::super::make_free;
    use super::*;

    #[test]
    fn generated_by_one_generator() {
        let f = make_free(3).unwrap();
        let s = generated_subalgebra(&f.algebra, &f.generators[..1]).unwrap();
        assert_eq!(s.block_count(), 2);
        assert_eq!(s.block_sizes(), vec![4, 4]);
        assert!(s.contains(&f.generators[0]).unwrap());
        assert!(!s.contains(&f.generators[1]).unwrap());
    }

    #[test]
    fn free_algebra_is_free_over_generated_part() {
        let f = make_free(4).unwrap();
        let s = generated_subalgebra(&f.algebra, &f.generators[..2]).unwrap();
        let w = s.free_witness(&f.algebra).unwrap().unwrap();
        assert_eq!(w.len(), 2);
        assert!(s.is_independent(&w).unwrap());
        assert!(s.is_independent(&f.generators[2..]).unwrap());
        assert!(!s.is_independent(&f.generators[1..3]).unwrap());
    }

    #[test]
    fn lpr_upr_bracket() {
        let f = make_free(3).unwrap();
        let s = generated_subalgebra(&f.algebra, &f.generators[..1]).unwrap();
        let b = f.generators[0].join(&f.generators[1]).unwrap();
        let lo = s.lpr(&f.algebra, &b).unwrap();
        let hi = s.upr(&f.algebra, &b).unwrap();
        assert_eq!(lo, f.generators[0]);
        assert!(hi.is_one());
    }

    #[test]
    fn relative_subalgebra_roundtrip() {
        let f = make_free(3).unwrap();
        let small = generated_subalgebra(&f.algebra, &f.generators[..1]).unwrap();
        let big = generated_subalgebra(&f.algebra, &f.generators[..2]).unwrap();
        let (big_ba, _) = big.as_algebra(&f.algebra).unwrap();
        let rel = small.relative_to(&big, &big_ba).unwrap();
        assert_eq!(rel.block_count(), 2);
        assert!(big.relative_to(&small, &f.algebra).is_err());
    }
}

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::bitset::AtomSet;
use crate::{check_atoms, Error, Result};

/// Identity of a [`FiniteBA`]; clones share it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraId(u64);

impl AlgebraId {
    fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        AlgebraId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

/// A finite Boolean algebra, i.e. the power set of `atom_count` atoms.
#[derive(Debug, Clone)]
pub struct FiniteBA {
    id: AlgebraId,
    atom_count: usize,
    labels: Option<Arc<Vec<u64>>>,
}

impl FiniteBA {
    pub fn new(atom_count: usize) -> Result<Self> {
        if atom_count == 0 {
            return Err(Error::Precondition(
                "a Boolean algebra needs at least one atom".into(),
            ));
        }
        check_atoms("algebra", atom_count as u128)?;
        Ok(Self {
            id: AlgebraId::fresh(),
            atom_count,
            labels: None,
        })
    }

    /// An algebra whose atoms carry opaque numeric labels.
    pub fn with_labels(labels: Vec<u64>) -> Result<Self> {
        let mut ba = Self::new(labels.len())?;
        ba.labels = Some(Arc::new(labels));
        Ok(ba)
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref().map(Vec::as_slice)
    }

    pub fn zero(&self) -> Elem {
        self.wrap(AtomSet::empty(self.atom_count))
    }

    pub fn one(&self) -> Elem {
        self.wrap(AtomSet::full(self.atom_count))
    }

    pub fn atom(&self, i: usize) -> Elem {
        self.wrap(AtomSet::from_indices(self.atom_count, [i]))
    }

    pub fn elem(&self, atoms: AtomSet) -> Result<Elem> {
        if atoms.len() != self.atom_count {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.wrap(atoms))
    }

    pub fn elem_from_indices<I: IntoIterator<Item = usize>>(&self, indices: I) -> Result<Elem> {
        let mut s = AtomSet::empty(self.atom_count);
        for i in indices {
            if i >= self.atom_count {
                return Err(Error::Usage(format!(
                    "atom {i} out of range for an algebra with {} atoms",
                    self.atom_count
                )));
            }
            s.insert(i);
        }
        Ok(self.wrap(s))
    }

    pub(crate) fn wrap(&self, atoms: AtomSet) -> Elem {
        debug_assert_eq!(atoms.len(), self.atom_count);
        Elem {
            algebra: self.id,
            atoms,
        }
    }

    pub fn owns(&self, e: &Elem) -> bool {
        e.algebra == self.id
    }

    pub fn check(&self, e: &Elem) -> Result<()> {
        if self.owns(e) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// All `2^atom_count` elements, for brute-force use on small algebras.
    pub fn elements(&self) -> Result<impl Iterator<Item = Elem> + '_> {
        if self.atom_count > crate::ORACLE_ATOMS {
            return Err(Error::Capacity {
                what: "element enumeration".into(),
                requested: self.atom_count as u128,
                limit: crate::ORACLE_ATOMS as u128,
            });
        }
        let n = self.atom_count;
        Ok((0u64..1 << n).map(move |m| self.wrap(AtomSet::from_mask(n, m))))
    }
}

/// An element of a [`FiniteBA`]: the set of atoms below it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Elem {
    algebra: AlgebraId,
    atoms: AtomSet,
}

impl Elem {
    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    pub fn atoms(&self) -> &AtomSet {
        &self.atoms
    }

    pub fn into_atoms(self) -> AtomSet {
        self.atoms
    }

    fn same(&self, other: &Elem) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn meet(&self, other: &Elem) -> Result<Elem> {
        self.same(other)?;
        Ok(self.with(self.atoms.intersection(&other.atoms)))
    }

    pub fn join(&self, other: &Elem) -> Result<Elem> {
        self.same(other)?;
        Ok(self.with(self.atoms.union(&other.atoms)))
    }

    pub fn minus(&self, other: &Elem) -> Result<Elem> {
        self.same(other)?;
        Ok(self.with(self.atoms.difference(&other.atoms)))
    }

    pub fn sym_diff(&self, other: &Elem) -> Result<Elem> {
        self.same(other)?;
        Ok(self.with(self.atoms.symmetric_difference(&other.atoms)))
    }

    pub fn complement(&self) -> Elem {
        self.with(self.atoms.complement())
    }

    pub fn leq(&self, other: &Elem) -> Result<bool> {
        self.same(other)?;
        Ok(self.atoms.is_subset(&other.atoms))
    }

    /// `self < other`.
    pub fn lt(&self, other: &Elem) -> Result<bool> {
        Ok(self.leq(other)? && self.atoms != other.atoms)
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.atoms.is_full()
    }

    /// `self^sign` under the convention `x^0 = x`, `x^1 = -x`.
    pub fn literal(&self, sign: u8) -> Elem {
        if sign == 0 {
            self.clone()
        } else {
            self.complement()
        }
    }

    fn with(&self, atoms: AtomSet) -> Elem {
        Elem {
            algebra: self.algebra,
            atoms,
        }
    }
}

/// Meet of a nonempty list, or `one` for an empty list.
pub fn meet_all<'a>(ba: &FiniteBA, elems: impl IntoIterator<Item = &'a Elem>) -> Result<Elem> {
    let mut acc = ba.one();
    for e in elems {
        acc = acc.meet(e)?;
    }
    Ok(acc)
}

pub fn join_all<'a>(ba: &FiniteBA, elems: impl IntoIterator<Item = &'a Elem>) -> Result<Elem> {
    let mut acc = ba.zero();
    for e in elems {
        acc = acc.join(e)?;
    }
    Ok(acc)
}

/// `Fr(n)` together with its free generators.
#[derive(Debug, Clone)]
pub struct FreeBA {
    pub algebra: FiniteBA,
    pub generators: Vec<Elem>,
}

/// The free algebra on `n` generators. Atoms are minterms in binary order:
/// atom `t` lies below generator `i` iff bit `i` of `t` is set.
pub fn make_free(n: usize) -> Result<FreeBA> {
    if n >= usize::BITS as usize - 1 {
        return Err(Error::Capacity {
            what: "free algebra generators".into(),
            requested: n as u128,
            limit: crate::ATOM_CEILING.trailing_zeros() as u128,
        });
    }
    check_atoms("free algebra", 1u128 << n)?;
    let atoms = 1usize << n;
    let algebra = FiniteBA::new(atoms)?;
    let generators = (0..n)
        .map(|i| algebra.wrap(AtomSet::from_fn(atoms, |t| t >> i & 1 == 1)))
        .collect();
    Ok(FreeBA {
        algebra,
        generators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_zero_generators() {
        let f = make_free(0).unwrap();
        assert_eq!(f.algebra.atom_count(), 1);
        assert_eq!(f.algebra.elements().unwrap().count(), 2);
    }

    #[test]
    fn free_one_generator_is_single_atom() {
        let f = make_free(1).unwrap();
        assert_eq!(f.generators[0].atoms().count(), 1);
    }

    #[test]
    fn free_two_minterms_partition_unit() {
        let f = make_free(2).unwrap();
        let (g0, g1) = (&f.generators[0], &f.generators[1]);
        let minterms: Vec<Elem> = (0..4u8)
            .map(|s| g0.literal(s & 1).meet(&g1.literal(s >> 1 & 1)).unwrap())
            .collect();
        for (i, a) in minterms.iter().enumerate() {
            assert_eq!(a.atoms().count(), 1);
            for b in &minterms[i + 1..] {
                assert!(a.meet(b).unwrap().is_zero());
            }
        }
        assert!(join_all(&f.algebra, &minterms).unwrap().is_one());
    }

    #[test]
    fn basic_laws() {
        let f = make_free(2).unwrap();
        let a = &f.generators[0];
        assert!(a.meet(&a.complement()).unwrap().is_zero());
        assert!(a.join(&a.complement()).unwrap().is_one());
        let p = a.meet(&f.generators[1]).unwrap();
        assert!(p.leq(a).unwrap());
    }

    #[test]
    fn mismatch_is_usage_error() {
        let f = make_free(1).unwrap();
        let g = make_free(1).unwrap();
        assert_eq!(
            f.generators[0].meet(&g.generators[0]),
            Err(Error::AlgebraMismatch)
        );
    }
}

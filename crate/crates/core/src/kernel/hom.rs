use std::ops::Deref;

use super::{AlgebraId, Elem, FiniteBA, SubalgebraDesc};
use crate::bitset::AtomSet;
use crate::{Error, Result};

/// A homomorphism between finite algebras, given dually by a map from target
/// atoms to source atoms: `h(a) = { t : atom_map[t] ∈ a }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hom {
    source: AlgebraId,
    target: AlgebraId,
    source_atoms: usize,
    atom_map: Vec<u32>,
}

impl Hom {
    pub fn new(source: &FiniteBA, target: &FiniteBA, atom_map: Vec<u32>) -> Result<Self> {
        if atom_map.len() != target.atom_count() {
            return Err(Error::Usage(format!(
                "atom map has {} entries, target has {} atoms",
                atom_map.len(),
                target.atom_count()
            )));
        }
        if let Some(&bad) = atom_map
            .iter()
            .find(|&&s| s as usize >= source.atom_count())
        {
            return Err(Error::Usage(format!(
                "atom map points to source atom {bad} of {}",
                source.atom_count()
            )));
        }
        Ok(Self {
            source: source.id(),
            target: target.id(),
            source_atoms: source.atom_count(),
            atom_map,
        })
    }

    pub fn source(&self) -> AlgebraId {
        self.source
    }

    pub fn target(&self) -> AlgebraId {
        self.target
    }

    pub fn atom_map(&self) -> &[u32] {
        &self.atom_map
    }

    pub fn apply_atoms(&self, a: &AtomSet) -> AtomSet {
        AtomSet::from_fn(self.atom_map.len(), |t| {
            a.contains(self.atom_map[t] as usize)
        })
    }

    pub fn apply(&self, target: &FiniteBA, a: &Elem) -> Result<Elem> {
        if a.algebra() != self.source || target.id() != self.target {
            return Err(Error::AlgebraMismatch);
        }
        Ok(target.wrap(self.apply_atoms(a.atoms())))
    }

    /// Injective iff every source atom has a nonempty fiber.
    pub fn is_injective(&self) -> bool {
        let mut hit = AtomSet::empty(self.source_atoms);
        for &s in &self.atom_map {
            hit.insert(s as usize);
        }
        hit.is_full()
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &Hom) -> Result<Hom> {
        if after.source != self.target {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Hom {
            source: self.source,
            target: after.target,
            source_atoms: self.source_atoms,
            atom_map: after
                .atom_map
                .iter()
                .map(|&m| self.atom_map[m as usize])
                .collect(),
        })
    }

    /// The image subalgebra in the target: its blocks are the fibers.
    pub fn image(&self, target: &FiniteBA) -> Result<SubalgebraDesc> {
        if target.id() != self.target {
            return Err(Error::AlgebraMismatch);
        }
        Ok(SubalgebraDesc::from_keys(
            target,
            self.atom_map.iter().map(|&s| s as u64),
        ))
    }

    /// Largest source element whose image lies below `b` (the residual).
    pub fn preimage_floor(&self, b: &AtomSet) -> AtomSet {
        let mut ok = AtomSet::full(self.source_atoms);
        for (t, &s) in self.atom_map.iter().enumerate() {
            if !b.contains(t) {
                ok.remove(s as usize);
            }
        }
        ok
    }
}

/// An injective homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding(Hom);

impl Embedding {
    pub fn new(hom: Hom) -> Result<Self> {
        if hom.is_injective() {
            Ok(Embedding(hom))
        } else {
            Err(Error::Precondition(
                "homomorphism is not injective (some source atom has an empty fiber)".into(),
            ))
        }
    }

    pub fn hom(&self) -> &Hom {
        &self.0
    }

    pub fn then(&self, after: &Embedding) -> Result<Embedding> {
        Ok(Embedding(self.0.then(&after.0)?))
    }
}

impl Deref for Embedding {
    type Target = Hom;

    fn deref(&self) -> &Hom {
        &self.0
    }
}

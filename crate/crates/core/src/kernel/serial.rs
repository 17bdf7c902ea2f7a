use serde::{Deserialize, Serialize};

use super::{Elem, FiniteBA, SubalgebraDesc};
use crate::bitset::AtomSet;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraRepr {
    pub atom_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u64>>,
}

impl AlgebraRepr {
    pub fn of(ba: &FiniteBA) -> Self {
        Self {
            atom_count: ba.atom_count(),
            labels: ba.labels().map(<[u64]>::to_vec),
        }
    }

    /// A fresh algebra with this shape.
    pub fn build(&self) -> Result<FiniteBA> {
        match &self.labels {
            Some(l) if l.len() != self.atom_count => {
                Err(Error::Parse("label count differs from atom count".into()))
            }
            Some(l) => FiniteBA::with_labels(l.clone()),
            None => FiniteBA::new(self.atom_count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElemRepr {
    pub atom_count: usize,
    /// Big-endian hex bitset; atom 0 is the lowest bit.
    pub bits: String,
}

impl ElemRepr {
    pub fn of(e: &Elem) -> Self {
        Self {
            atom_count: e.atoms().len(),
            bits: e.atoms().to_hex(),
        }
    }

    pub fn resolve(&self, ba: &FiniteBA) -> Result<Elem> {
        if self.atom_count != ba.atom_count() {
            return Err(Error::Parse(format!(
                "element over {} atoms, algebra has {}",
                self.atom_count,
                ba.atom_count()
            )));
        }
        let set = AtomSet::from_hex(self.atom_count, &self.bits)
            .ok_or_else(|| Error::Parse(format!("bad element bitset {:?}", self.bits)))?;
        ba.elem(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubalgebraRepr {
    pub atom_count: usize,
    /// Blocks as sorted atom lists, ordered by least atom.
    pub blocks: Vec<Vec<usize>>,
}

impl SubalgebraRepr {
    pub fn of(s: &SubalgebraDesc) -> Self {
        Self {
            atom_count: s.atom_count(),
            blocks: s.blocks(),
        }
    }

    pub fn resolve(&self, ba: &FiniteBA) -> Result<SubalgebraDesc> {
        if self.atom_count != ba.atom_count() {
            return Err(Error::Parse(
                "subalgebra over the wrong number of atoms".into(),
            ));
        }
        SubalgebraDesc::from_blocks(ba, &self.blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{generated_subalgebra, make_free};
    use super::*;

    #[test]
    fn roundtrip_elem_and_subalgebra() {
        let f = make_free(3).unwrap();
        let e = f.generators[1].join(&f.generators[2]).unwrap();
        let json = serde_json::to_string(&ElemRepr::of(&e)).unwrap();
        assert_eq!(json, r#"{"atom_count":8,"bits":"fc"}"#);
        let back: ElemRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(back.resolve(&f.algebra).unwrap(), e);

        let s = generated_subalgebra(&f.algebra, &f.generators[..1]).unwrap();
        let r = SubalgebraRepr::of(&s);
        assert_eq!(r.blocks, vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]]);
        assert_eq!(r.resolve(&f.algebra).unwrap(), s);
    }
}

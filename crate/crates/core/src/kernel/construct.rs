use super::{Elem, Embedding, FiniteBA, Hom};
use crate::bitset::AtomSet;
use crate::{check_atoms, Error, Result};

/// `B1 ⊕ B2` with its two coprojections. Atom `a1 * n2 + a2` is the pair
/// `(a1, a2)`.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub algebra: FiniteBA,
    pub left: Embedding,
    pub right: Embedding,
}

pub fn coproduct(b1: &FiniteBA, b2: &FiniteBA) -> Result<Coproduct> {
    let (n1, n2) = (b1.atom_count(), b2.atom_count());
    check_atoms("coproduct", n1 as u128 * n2 as u128)?;
    let algebra = FiniteBA::new(n1 * n2)?;
    let left = Hom::new(
        b1,
        &algebra,
        (0..n1 * n2).map(|t| (t / n2) as u32).collect(),
    )?;
    let right = Hom::new(
        b2,
        &algebra,
        (0..n1 * n2).map(|t| (t % n2) as u32).collect(),
    )?;
    Ok(Coproduct {
        left: Embedding::new(left)?,
        right: Embedding::new(right)?,
        algebra,
    })
}

/// `B/(r)` with the canonical projection. Surviving atoms keep their order.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: FiniteBA,
    pub projection: Hom,
    /// Source atom of each quotient atom.
    pub kept: Vec<u32>,
}

pub fn quotient_by_element(b: &FiniteBA, r: &Elem) -> Result<Quotient> {
    b.check(r)?;
    if r.is_one() {
        return Err(Error::DegenerateQuotient);
    }
    let kept: Vec<u32> = r.atoms().complement().iter().map(|a| a as u32).collect();
    let algebra = match b.labels() {
        Some(l) => FiniteBA::with_labels(kept.iter().map(|&a| l[a as usize]).collect())?,
        None => FiniteBA::new(kept.len())?,
    };
    let projection = Hom::new(b, &algebra, kept.clone())?;
    Ok(Quotient {
        algebra,
        projection,
        kept,
    })
}

#[derive(Debug, Clone)]
pub enum CongruenceQuotient {
    Proper(Quotient),
    /// The pairs force `0 = 1`; `relator` is the join of their differences.
    Degenerate {
        relator: Elem,
    },
}

/// Quotient by the least congruence identifying each pair.
pub fn quotient_by_congruence(b: &FiniteBA, pairs: &[(Elem, Elem)]) -> Result<CongruenceQuotient> {
    let mut r = b.zero();
    for (x, y) in pairs {
        b.check(x)?;
        r = r.join(&x.sym_diff(y)?)?;
    }
    if r.is_one() {
        Ok(CongruenceQuotient::Degenerate { relator: r })
    } else {
        quotient_by_element(b, &r).map(CongruenceQuotient::Proper)
    }
}

/// `A(x)`: `A` with one new element `x` such that `a ≤ x` iff `a ≤ i` and
/// `a ≤ -x` iff `a ≤ j`. Atoms of `A` outside `j` give the atoms below `x`
/// (listed first), atoms outside `i` give those below `-x`.
#[derive(Debug, Clone)]
pub struct Adjunction {
    pub algebra: FiniteBA,
    pub embedding: Embedding,
    pub x: Elem,
}

pub fn adjoin_element(a: &FiniteBA, i: &Elem, j: &Elem) -> Result<Adjunction> {
    a.check(i)?;
    a.check(j)?;
    if !i.meet(j)?.is_zero() {
        return Err(Error::InconsistentExtension);
    }
    let upper: Vec<u32> = j.atoms().complement().iter().map(|t| t as u32).collect();
    let lower: Vec<u32> = i.atoms().complement().iter().map(|t| t as u32).collect();
    let split = upper.len();
    let mut map = upper;
    map.extend(lower);
    check_atoms("adjunction", map.len() as u128)?;
    let algebra = FiniteBA::new(map.len())?;
    let x = algebra.wrap(AtomSet::from_fn(map.len(), |t| t < split));
    let embedding = Embedding::new(Hom::new(a, &algebra, map)?)?;
    Ok(Adjunction {
        algebra,
        embedding,
        x,
    })
}

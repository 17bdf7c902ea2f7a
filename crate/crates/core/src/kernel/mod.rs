//! Finite Boolean algebras as power sets of atoms, with subalgebras,
//! homomorphisms and the standard constructions.

mod algebra;
mod construct;
mod hom;
mod serial;
mod subalgebra;

pub use algebra::{join_all, make_free, meet_all, AlgebraId, Elem, FiniteBA, FreeBA};
pub use construct::{
    adjoin_element, coproduct, quotient_by_congruence, quotient_by_element, Adjunction,
    CongruenceQuotient, Coproduct, Quotient,
};
pub use hom::{Embedding, Hom};
pub use serial::{AlgebraRepr, ElemRepr, SubalgebraRepr};
pub use subalgebra::{
    generated_subalgebra, is_free_over, is_independent_over, lpr, upr, SubalgebraDesc,
};

//! Finite-stage constructions of Boolean algebras with relatively complete
//! and tight filtrations, together with the verifiers that check their
//! defining properties against brute-force oracles.
//!
//! Every algebra here is finite. Countable algebras are modelled as chains of
//! finite stage models joined by embeddings ([`chain`]); limit behaviour is
//! reported as evidence gathered across stages, never as a verdict about the
//! limit itself.
//!
//! Literal convention used throughout: `x^0 = x`, `x^1 = -x`.

pub mod assembly;
pub mod bitset;
pub mod chain;
pub mod cpp;
mod error;
pub mod kernel;
pub mod lambda;
pub mod oracle;
pub mod report;
pub mod run;
pub mod selftest;
pub mod spec;
pub mod tight;
pub mod transversal;

pub use error::{Error, Result};

use std::sync::OnceLock;

/// Hard ceiling on atoms in any single algebra.
pub const ATOM_CEILING: usize = 1 << 24;

/// Brute-force oracles enumerate elements only up to this many atoms.
pub const ORACLE_ATOMS: usize = 16;

/// Environment variable that lowers the atom capacity.
pub const CAPACITY_ENV: &str = "RCALG_MAX_ATOMS";

/// Current atom capacity: [`ATOM_CEILING`], lowered by `RCALG_MAX_ATOMS` if set.
pub fn max_atoms() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(CAPACITY_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .map(|v| v.clamp(1, ATOM_CEILING))
            .unwrap_or(ATOM_CEILING)
    })
}

pub(crate) fn check_atoms(what: &str, requested: u128) -> Result<()> {
    let limit = max_atoms() as u128;
    if requested > limit {
        Err(Error::Capacity {
            what: what.to_string(),
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}

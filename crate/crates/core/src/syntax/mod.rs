//! Terms, types, scalars and typing contexts.

use std::collections::BTreeSet;

pub mod context;
pub mod scalar;
pub mod term;
pub mod types;

pub use context::Context;
pub use scalar::{Scalar, ScalarError};
pub use term::{alpha_eq, canonicalize_term, is_basis, subst_term, subst_type_in_term, Skel, SubstError, Term};
pub use types::{type_equiv, TySkel, Type, UnitType};

/// `base` with primes appended until it is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

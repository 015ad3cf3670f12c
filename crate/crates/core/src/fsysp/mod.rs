//! System F with pairs: the concrete end of the abstraction chain.
//! Sums become left-nested products, `0` becomes the unit type.

pub mod check;
pub mod derivation;
pub mod layout;
pub mod order;
pub mod term;
pub mod translate;

pub use check::{f_check, f_check_term, translate_context, FCheckError, FContext};
pub use derivation::{derive, DNode, Derivation, Rule};
pub use layout::{Layout, Move, MoveKind, Pos};
pub use order::{f_lessapprox, f_lessapprox_any_layout, f_sqleq, f_sqleq_strict, FSkel};
pub use term::{f_normalize, f_step, is_f_normal, FFuelExhausted, FTerm, FType};
pub use translate::{translate, translate_term};

use crate::syntax::Type;

/// The F type of a λ_CA type, through its canonical layout.
pub fn ttype(t: &Type) -> FType {
    Layout::of_type(t).ftype()
}

pub mod additive;
pub mod fsysp;
pub mod parse;
pub mod precision;
pub mod propgen;
pub mod rewrite;
pub mod syntax;
pub mod typing;

//! The scalar-free Additive calculus, the abstraction `σ` into it, and
//! the orders `⊑` and `≲`.

use std::fmt;

use thiserror::Error;

use crate::rewrite::{self, Outcome, Reduct, RuleId, Strategy};
use crate::syntax::{canonicalize_term, Context, Skel, Term, Type};
use crate::typing::{synthesize, TypeError};

/// A canonical term with no scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ATerm(Term);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` contains a scalar and is not an Additive term")]
pub struct NotAdditive(pub Term);

impl ATerm {
    pub fn new(t: Term) -> Result<ATerm, NotAdditive> {
        if t.has_scalars() {
            Err(NotAdditive(t))
        } else {
            Ok(ATerm(canonicalize_term(&t)))
        }
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }
}

impl fmt::Display for ATerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `σ`: every `α.t` becomes `⌊α⌋` copies of `σ(t)`.
pub fn sigma(t: &Term) -> ATerm {
    ATerm(canonicalize_term(&abstract_term(t)))
}

fn abstract_term(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Zero => t.clone(),
        Term::Abs(x, u, b) => Term::abs(x.clone(), u.clone(), abstract_term(b)),
        Term::TyAbs(x, b) => Term::ty_abs(x.clone(), abstract_term(b)),
        Term::App(f, a) => Term::app(abstract_term(f), abstract_term(a)),
        Term::TyApp(f, u) => Term::ty_app(abstract_term(f), u.clone()),
        Term::Sum(items) => Term::Sum(items.iter().map(abstract_term).collect()),
        Term::Scaled(alpha, b) => {
            let inner = abstract_term(b);
            Term::sum(vec![inner; alpha.floor()])
        }
    }
}

pub fn a_step(t: &ATerm) -> Vec<Reduct> {
    rewrite::step(&t.0).into_iter().filter(|r| r.rule.is_additive()).collect()
}

fn additive_rule(r: RuleId) -> bool {
    r.is_additive()
}

pub fn a_normalize(t: &ATerm, strategy: &Strategy, fuel: usize) -> Outcome {
    rewrite::normalize_with(&t.0, strategy, fuel, additive_rule)
}

pub fn a_trace(t: &ATerm, strategy: &Strategy, fuel: usize) -> rewrite::Trace {
    rewrite::trace_with(&t.0, strategy, fuel, additive_rule)
}

/// Additive typing coincides with λ_CA typing on scalar-free terms.
pub fn a_synthesize(ctx: &Context, t: &ATerm) -> Result<Type, TypeError> {
    synthesize(ctx, &t.0)
}

/// `t ⊑ r`, reading `0` as the empty sum: every summand of `t` is matched
/// to a distinct summand of `r` that dominates it, the rest of `r` is free.
pub fn sqleq(t: &ATerm, r: &ATerm) -> bool {
    skel_sqleq(&t.0.skeleton(), &r.0.skeleton())
}

/// The same order on nameless skeletons.
pub fn skel_sqleq(l: &Skel, r: &Skel) -> bool {
    match (l, r) {
        (Skel::Zero, _) => return true,
        (Skel::Sum(_), _) | (_, Skel::Sum(_)) => {}
        (_, Skel::Zero) => return false,
        _ => return atom_sqleq(l, r),
    }
    let ls = atoms(l);
    let rs = atoms(r);
    if ls.len() > rs.len() {
        return false;
    }
    let edges: Vec<Vec<usize>> = ls
        .iter()
        .map(|a| (0..rs.len()).filter(|&j| atom_sqleq(a, rs[j])).collect())
        .collect();
    let mut owner = vec![None; rs.len()];
    (0..ls.len()).all(|i| augment(i, &edges, &mut owner, &mut vec![false; rs.len()]))
}

fn atoms(s: &Skel) -> Vec<&Skel> {
    match s {
        Skel::Zero => Vec::new(),
        Skel::Sum(items) => items.iter().filter(|i| !matches!(i, Skel::Zero)).collect(),
        other => vec![other],
    }
}

fn atom_sqleq(a: &Skel, b: &Skel) -> bool {
    match (a, b) {
        (Skel::Bound(i), Skel::Bound(j)) => i == j,
        (Skel::Free(x), Skel::Free(y)) => x == y,
        (Skel::Abs(u, t), Skel::Abs(v, r)) => u == v && skel_sqleq(t, r),
        (Skel::TyAbs(t), Skel::TyAbs(r)) => skel_sqleq(t, r),
        (Skel::App(f, x), Skel::App(g, y)) => skel_sqleq(f, g) && skel_sqleq(x, y),
        (Skel::TyApp(f, u), Skel::TyApp(g, v)) => u == v && skel_sqleq(f, g),
        _ => false,
    }
}

/// `⊑` read literally, with `t + 0` and `t` distinct: every summand of `r`
/// (zeros included) must dominate some summand of `t`, and each summand of
/// `t` needs a summand of `r` of its own.
pub fn sqleq_strict(t: &ATerm, r: &ATerm) -> bool {
    skel_sqleq_strict(&t.0.skeleton(), &r.0.skeleton())
}

pub fn skel_sqleq_strict(l: &Skel, r: &Skel) -> bool {
    let (ls, rs) = (summands(l), summands(r));
    if ls.len() > rs.len() {
        return false;
    }
    let edges: Vec<Vec<usize>> = ls
        .iter()
        .map(|a| (0..rs.len()).filter(|&j| strict_atom(a, rs[j])).collect())
        .collect();
    let covered = (0..rs.len()).all(|j| edges.iter().any(|e| e.contains(&j)));
    let mut owner = vec![None; rs.len()];
    covered && (0..ls.len()).all(|i| augment(i, &edges, &mut owner, &mut vec![false; rs.len()]))
}

fn summands(s: &Skel) -> Vec<&Skel> {
    match s {
        Skel::Sum(items) => items.iter().collect(),
        other => vec![other],
    }
}

fn strict_atom(a: &Skel, b: &Skel) -> bool {
    match (a, b) {
        (Skel::Zero, _) => true,
        (Skel::Bound(i), Skel::Bound(j)) => i == j,
        (Skel::Free(x), Skel::Free(y)) => x == y,
        (Skel::Abs(u, t), Skel::Abs(v, r)) => u == v && skel_sqleq_strict(t, r),
        (Skel::TyAbs(t), Skel::TyAbs(r)) => skel_sqleq_strict(t, r),
        (Skel::App(f, x), Skel::App(g, y)) => skel_sqleq_strict(f, g) && skel_sqleq_strict(x, y),
        (Skel::TyApp(f, u), Skel::TyApp(g, v)) => u == v && skel_sqleq_strict(f, g),
        _ => false,
    }
}

fn augment(i: usize, edges: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &edges[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].is_none() || augment(owner[j].unwrap(), edges, owner, seen) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no normal form within fuel for `{0}`")]
pub struct FuelExhausted(pub Term);

fn a_normal_form(t: &ATerm, fuel: usize) -> Result<ATerm, FuelExhausted> {
    match a_normalize(t, &Strategy::Leftmost, fuel) {
        Outcome::Normal { term, .. } => Ok(ATerm(term)),
        Outcome::FuelExhausted { last, .. } => Err(FuelExhausted(last)),
    }
}

/// `t ≲ r`: `⊑` on Additive normal forms.
pub fn lesssim(t: &ATerm, r: &ATerm, fuel: usize) -> Result<bool, FuelExhausted> {
    Ok(sqleq(&a_normal_form(t, fuel)?, &a_normal_form(r, fuel)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_context, parse_term};
    use crate::rewrite::DEFAULT_FUEL;

    fn a(src: &str) -> ATerm {
        ATerm::new(parse_term(src).unwrap()).unwrap()
    }

    fn sig(src: &str) -> ATerm {
        sigma(&parse_term(src).unwrap())
    }

    #[test]
    fn sigma_takes_floors() {
        assert_eq!(sig("2.5 . x"), a("x + x"));
        assert_eq!(sig("0.9 . x"), a("zero"));
        assert_eq!(sig("x + 1 . y"), a("x + y"));
        assert_eq!(sig("\\x:X. 2 . x"), a("\\x:X. x + x"));
    }

    #[test]
    fn scalars_are_rejected() {
        assert!(ATerm::new(parse_term("2 . x").unwrap()).is_err());
    }

    #[test]
    fn additive_reduction() {
        let reds = a_step(&a("(x + y) z"));
        assert_eq!(reds.len(), 1);
        assert_eq!(reds[0].term, parse_term("x z + y z").unwrap());
        assert_eq!(a_step(&a("x + zero"))[0].term, parse_term("x").unwrap());
        // no factorization in Additive
        assert!(a_step(&a("x + x")).is_empty());
        let out = a_normalize(&sig("0.9 . y + 1.1 . y"), &Strategy::Leftmost, DEFAULT_FUEL);
        assert_eq!(out.term(), &parse_term("y").unwrap());
    }

    #[test]
    fn additive_typing() {
        let ctx = parse_context("x:U, y:V").unwrap();
        assert_eq!(a_synthesize(&ctx, &a("x + y")).unwrap().to_string(), "U + V");
        assert_eq!(a_synthesize(&ctx, &a("x")).unwrap().to_string(), "U");
    }

    #[test]
    fn order_examples() {
        assert!(sqleq(&a("y"), &a("y + y")));
        assert!(!sqleq(&a("y + y"), &a("y")));
        assert!(sqleq(&a("y"), &a("y")));
        assert!(sqleq(&a("zero"), &a("x + y")));
        assert!(sqleq(&a("f x"), &a("(f + f) (x + x)")));
        assert!(sqleq(&a("\\x:X. x"), &a("\\z:X. z + z")));
        assert!(!sqleq(&a("\\x:X. x"), &a("\\z:Y. z")));
        assert!(sqleq(&a("s"), &a("s + r")));
    }

    #[test]
    fn strict_order_keeps_zero_summands() {
        assert!(sqleq_strict(&a("y"), &a("y + y")));
        assert!(!sqleq_strict(&a("s"), &a("s + r")));
        assert!(sqleq_strict(&a("s + zero"), &a("s + r")));
        assert!(!sqleq_strict(&a("s"), &a("s + zero")));
        assert!(sqleq_strict(&a("zero"), &a("x + y")));
        assert!(sqleq_strict(&a("x + y"), &a("x + y + x")));
    }

    #[test]
    fn lesssim_examples() {
        assert!(lesssim(&a("zero + y"), &a("y + y"), DEFAULT_FUEL).unwrap());
        assert!(lesssim(&a("(x + y) z"), &a("x z + y z"), DEFAULT_FUEL).unwrap());
    }
}

//! Type checking for System F with pairs, and replay of translated
//! derivations. Terms are Curry-style, so eliminations instantiate `∀`
//! prefixes with flexible variables solved by unification.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::derivation::{DNode, Derivation, Rule};
use super::layout::{apply_all, Layout};
use super::term::{FTerm, FType};
use super::translate::local;
use crate::syntax::{fresh_name, Context, Term};
use crate::typing::synthesize;

pub type FContext = Vec<(String, FType)>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FCheckError {
    #[error("`{term}` does not check against {ty}")]
    Local { term: FTerm, ty: FType },
    #[error("conclusion {found} of `{term}` should be {expected}")]
    Conclusion { term: Term, found: Layout, expected: Layout },
    #[error("type variable {var} is free in the context of `{term}`")]
    Escapes { var: String, term: Term },
    #[error("moves do not lead from {from} to {to}")]
    BadMoves { from: Layout, to: Layout },
}

/// The context translated: each binding at the product type of its layout.
pub fn translate_context(ctx: &Context) -> FContext {
    ctx.bindings().iter().map(|(x, u)| (x.clone(), Layout::of_unit(u).ftype())).collect()
}

/// `Δ ⊢ t : A`.
pub fn f_check_term(delta: &FContext, t: &FTerm, ty: &FType) -> bool {
    Checker::default().check(delta, t, ty)
}

/// Re-checks every node of a translated derivation, and that its root
/// agrees with λ_CA synthesis.
pub fn f_check(d: &Derivation) -> Result<(), FCheckError> {
    check_node(&d.root)?;
    let root = &d.root;
    if let Ok(ty) = synthesize(&root.context, &root.term) {
        let expected = Layout::of_type(&ty);
        if root.ty != expected {
            return Err(FCheckError::Conclusion { term: root.term.clone(), found: root.ty.clone(), expected });
        }
    }
    Ok(())
}

fn check_node(n: &DNode) -> Result<(), FCheckError> {
    for p in &n.premises {
        check_node(p)?;
    }
    let conclusion = |expected: Layout| {
        if n.ty == expected {
            Ok(())
        } else {
            Err(FCheckError::Conclusion { term: n.term.clone(), found: n.ty.clone(), expected })
        }
    };
    match &n.rule {
        Rule::ForallIntro => {
            let Term::TyAbs(x, _) = &n.term else { unreachable!() };
            let free: BTreeSet<String> =
                translate_context(&n.context).iter().flat_map(|(_, t)| t.free_vars()).collect();
            if free.contains(x) {
                return Err(FCheckError::Escapes { var: x.clone(), term: n.term.clone() });
            }
            conclusion(Layout::Forall(x.clone(), Box::new(n.premises[0].ty.clone())))
        }
        Rule::ForallElim(v) => {
            let Layout::Forall(x, body) = &n.premises[0].ty else {
                return conclusion(Layout::Forall("_".into(), Box::new(n.ty.clone())));
            };
            let expected = body.ftype().subst(x, &Layout::of_unit(v).ftype());
            if n.ty.ftype() == expected {
                Ok(())
            } else {
                conclusion(body.subst(x, &Layout::of_unit(v)))
            }
        }
        _ => {
            if let Rule::Eq(moves) = &n.rule {
                let from = &n.premises[0].ty;
                if apply_all(from, moves).as_ref() != Some(&n.ty) {
                    return Err(FCheckError::BadMoves { from: from.clone(), to: n.ty.clone() });
                }
            }
            if let (Rule::ArrowIntro, Term::Abs(_, u, _)) = (&n.rule, &n.term) {
                conclusion(Layout::arrow(Layout::of_unit(u), n.premises[0].ty.clone()))?;
            }
            let mut avoid = n.context.names();
            avoid.extend(n.term.free_term_vars());
            let mut delta = translate_context(&n.context);
            let mut holes = Vec::new();
            for p in &n.premises {
                let h = fresh_name("hole", &avoid);
                avoid.insert(h.clone());
                delta.push((h.clone(), p.ty.ftype()));
                holes.push(FTerm::var(h));
            }
            let term = local(n, holes);
            let ty = n.ty.ftype();
            if f_check_term(&delta, &term, &ty) {
                Ok(())
            } else {
                Err(FCheckError::Local { term, ty })
            }
        }
    }
}

#[derive(Default)]
struct Checker {
    next: usize,
    solved: HashMap<String, FType>,
}

fn is_flex(x: &str) -> bool {
    x.starts_with('?')
}

impl Checker {
    fn fresh(&mut self, prefix: char) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn flex(&mut self) -> FType {
        FType::Var(self.fresh('?'))
    }

    fn head(&self, t: &FType) -> FType {
        let mut cur = t.clone();
        while let FType::Var(x) = &cur {
            match self.solved.get(x) {
                Some(s) => cur = s.clone(),
                None => break,
            }
        }
        cur
    }

    fn resolve(&self, t: &FType) -> FType {
        match self.head(t) {
            FType::Arrow(a, b) => FType::arrow(self.resolve(&a), self.resolve(&b)),
            FType::Prod(a, b) => FType::prod(self.resolve(&a), self.resolve(&b)),
            FType::Forall(x, a) => FType::forall(x, self.resolve(&a)),
            other => other,
        }
    }

    fn unify(&mut self, a: &FType, b: &FType) -> bool {
        let (a, b) = (self.head(a), self.head(b));
        match (&a, &b) {
            (FType::Var(x), FType::Var(y)) if x == y => true,
            (FType::Var(x), other) | (other, FType::Var(x)) if is_flex(x) => {
                if self.resolve(other).free_vars().contains(x) {
                    return false;
                }
                self.solved.insert(x.clone(), other.clone());
                true
            }
            (FType::One, FType::One) => true,
            (FType::Arrow(a1, a2), FType::Arrow(b1, b2)) | (FType::Prod(a1, a2), FType::Prod(b1, b2)) => {
                self.unify(a1, b1) && self.unify(a2, b2)
            }
            (FType::Forall(x, s), FType::Forall(y, t)) => {
                let r = FType::Var(self.fresh('#'));
                let (s, t) = (s.subst(x, &r), t.subst(y, &r));
                self.unify(&s, &t)
            }
            _ => false,
        }
    }

    /// Strips leading `∀`s, instantiating each with a flexible variable.
    fn instantiate(&mut self, t: FType) -> FType {
        match self.head(&t) {
            FType::Forall(x, body) => {
                let v = self.flex();
                let inst = body.subst(&x, &v);
                self.instantiate(inst)
            }
            other => other,
        }
    }

    fn check(&mut self, delta: &FContext, t: &FTerm, ty: &FType) -> bool {
        let ty = self.head(ty);
        match (t, &ty) {
            (FTerm::Lam(x, body), FType::Arrow(a, b)) => {
                let mut inner = delta.clone();
                inner.push((x.clone(), (**a).clone()));
                self.check(&inner, body, b)
            }
            (FTerm::Pair(l, r), FType::Prod(a, b)) => self.check(delta, l, a) && self.check(delta, r, b),
            (FTerm::Star, FType::One) => true,
            (FTerm::App(f, bound), _) if matches!(**f, FTerm::Lam(..)) => {
                let FTerm::Lam(x, body) = f.as_ref() else { unreachable!() };
                let Some(b) = self.synth(delta, bound) else { return false };
                let mut inner = delta.clone();
                inner.push((x.clone(), b));
                self.check(&inner, body, &ty)
            }
            (_, FType::Forall(x, body)) => {
                let free: BTreeSet<String> =
                    delta.iter().flat_map(|(_, t)| self.resolve(t).free_vars()).collect();
                let r = fresh_name(x, &free);
                let body = body.subst(x, &FType::Var(r));
                self.check(delta, t, &body)
            }
            _ => match self.synth(delta, t) {
                Some(s) => {
                    let s = self.instantiate(s);
                    self.unify(&s, &ty)
                }
                None => false,
            },
        }
    }

    fn synth(&mut self, delta: &FContext, t: &FTerm) -> Option<FType> {
        match t {
            FTerm::Var(x) => delta.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t.clone()),
            FTerm::Star => Some(FType::One),
            FTerm::Pair(a, b) => Some(FType::prod(self.synth(delta, a)?, self.synth(delta, b)?)),
            FTerm::Lam(x, body) => {
                let a = self.flex();
                let mut inner = delta.clone();
                inner.push((x.clone(), a.clone()));
                let b = self.synth(&inner, body)?;
                Some(FType::arrow(a, b))
            }
            FTerm::Proj1(p) | FTerm::Proj2(p) => {
                let s = self.synth(delta, p)?;
                let s = self.instantiate(s);
                let (l, r) = (self.flex(), self.flex());
                if !self.unify(&s, &FType::prod(l.clone(), r.clone())) {
                    return None;
                }
                Some(if matches!(t, FTerm::Proj1(_)) { l } else { r })
            }
            FTerm::App(f, a) => {
                if let FTerm::Lam(x, body) = f.as_ref() {
                    let b = self.synth(delta, a)?;
                    let mut inner = delta.clone();
                    inner.push((x.clone(), b));
                    return self.synth(&inner, body);
                }
                let s = self.synth(delta, f)?;
                let s = self.instantiate(s);
                let (dom, cod) = (self.flex(), self.flex());
                if !self.unify(&s, &FType::arrow(dom.clone(), cod.clone())) {
                    return None;
                }
                self.check(delta, a, &dom).then_some(cod)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::derivation::derive;
    use super::*;
    use crate::additive::ATerm;
    use crate::parse::{parse_context, parse_term};

    fn v(x: &str) -> FType {
        FType::var(x)
    }

    #[test]
    fn checks_basic_terms() {
        let delta = vec![("x".to_string(), v("X")), ("y".to_string(), v("Y"))];
        assert!(f_check_term(&delta, &FTerm::pair(FTerm::var("x"), FTerm::Star), &FType::prod(v("X"), FType::One)));
        assert!(!f_check_term(&delta, &FTerm::pair(FTerm::var("x"), FTerm::Star), &FType::prod(v("Y"), FType::One)));
        let swap = FTerm::lam("p", FTerm::pair(FTerm::proj2(FTerm::var("p")), FTerm::proj1(FTerm::var("p"))));
        assert!(f_check_term(&delta, &swap, &FType::arrow(FType::prod(v("X"), v("Y")), FType::prod(v("Y"), v("X")))));
    }

    #[test]
    fn polymorphic_identity() {
        let id = FTerm::lam("x", FTerm::var("x"));
        let ty = FType::forall("X", FType::arrow(v("X"), v("X")));
        assert!(f_check_term(&vec![], &id, &ty));
        let delta = vec![("i".to_string(), ty)];
        assert!(f_check_term(&delta, &FTerm::app(FTerm::var("i"), FTerm::Star), &FType::One));
        // X is free in the context, so it cannot be generalized
        let delta = vec![("x".to_string(), v("X"))];
        assert!(!f_check_term(&delta, &FTerm::lam("y", FTerm::var("x")), &FType::forall("X", FType::arrow(v("X"), v("X")))));
    }

    fn replay(ctx: &str, src: &str) -> Result<(), FCheckError> {
        let t = ATerm::new(parse_term(src).unwrap()).unwrap();
        f_check(&derive(&parse_context(ctx).unwrap(), &t).unwrap())
    }

    #[test]
    fn derivations_replay() {
        let ctx = "f:U -> T, g:U -> R, b:U, c:U, a:Y, i:forall X. X -> (X + Z), \
                   k:U -> (A + C), m:U -> B, j:forall X. (W -> (X + Z)) -> Z, l:forall X. forall Q. X -> (X + Q)";
        for src in [
            "(f + g) (b + c)",
            "a + b + zero",
            "\\x:U. (f + g) x",
            "i @ (Y -> (Y + A))",
            "(/\\X. \\x:X. x + x) @ (U -> (T + R))",
            "(\\x:U. f x + g x) (b + c) + zero b",
            "(k + m) (b + c)",
            "j @ (Y -> Y)",
            "l @ (Y -> Y)",
        ] {
            replay(ctx, src).unwrap_or_else(|e| panic!("{src}: {e}"));
        }
    }

    #[test]
    fn tampered_derivations_fail() {
        let t = ATerm::new(parse_term("a + b").unwrap()).unwrap();
        let mut d = derive(&parse_context("a:Y, b:X").unwrap(), &t).unwrap();
        let Rule::Eq(moves) = &mut d.root.rule else { panic!("expected an Eq node") };
        moves.clear();
        assert!(matches!(f_check(&d), Err(FCheckError::BadMoves { .. })));
    }
}

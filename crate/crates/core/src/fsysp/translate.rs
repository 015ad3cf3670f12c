//! The derivation-directed translation into System F with pairs. Each rule
//! contributes a local combinator over the translations of its premises;
//! the checker replays the same combinators with hole variables.

use std::collections::BTreeSet;

use super::derivation::{derive, summand_layouts, DNode, Derivation, Rule};
use super::layout::{Move, MoveKind, Pos};
use super::term::FTerm;
use crate::additive::ATerm;
use crate::syntax::{fresh_name, Context, Term};
use crate::typing::TypeError;

pub fn translate(d: &Derivation) -> FTerm {
    translate_node(&d.root)
}

/// Derives `t` and translates the derivation.
pub fn translate_term(ctx: &Context, t: &ATerm) -> Result<FTerm, TypeError> {
    Ok(translate(&derive(ctx, t)?))
}

fn translate_node(n: &DNode) -> FTerm {
    let parts = n.premises.iter().map(translate_node).collect();
    local(n, parts)
}

/// The rule's combinator applied to the premises' terms.
pub(crate) fn local(n: &DNode, mut parts: Vec<FTerm>) -> FTerm {
    match &n.rule {
        Rule::Ax => match &n.term {
            Term::Var(x) => FTerm::var(x.clone()),
            _ => unreachable!("axiom on a variable"),
        },
        Rule::AxZero => FTerm::Star,
        Rule::ArrowIntro => match &n.term {
            Term::Abs(x, _, _) => FTerm::lam(x.clone(), parts.remove(0)),
            _ => unreachable!("->I on an abstraction"),
        },
        Rule::ForallIntro | Rule::ForallElim(_) => parts.remove(0),
        Rule::SumIntro => {
            let b = parts.pop().unwrap();
            FTerm::pair(parts.pop().unwrap(), b)
        }
        Rule::Eq(moves) => moves.iter().fold(parts.remove(0), |e, m| coerce(e, m)),
        Rule::ArrowElim => {
            let n_funs = summand_layouts(&n.premises[0].ty).len();
            let n_args = summand_layouts(&n.premises[1].ty).len();
            let arg = parts.pop().unwrap();
            let fun = parts.pop().unwrap();
            if n_funs == 0 || n_args == 0 {
                return FTerm::Star;
            }
            if n_funs == 1 && n_args == 1 {
                return FTerm::app(fun, arg);
            }
            let h = fresh_name("h", &arg.free_vars());
            let a = fresh_name("a", &BTreeSet::from([h.clone()]));
            let apps = (1..=n_funs).flat_map(|i| {
                let (h, a) = (h.clone(), a.clone());
                (1..=n_args).map(move |j| FTerm::app(project(FTerm::var(&h), i, n_funs), project(FTerm::var(&a), j, n_args)))
            });
            let tuple = apps.reduce(FTerm::pair).unwrap();
            FTerm::let_in(h, fun, FTerm::let_in(a, arg, tuple))
        }
    }
}

/// Component `k` (1-based) of a left-nested tuple of `n` components.
pub fn project(e: FTerm, k: usize, n: usize) -> FTerm {
    if n == 1 {
        e
    } else if k == n {
        FTerm::proj2(e)
    } else {
        project(FTerm::proj1(e), k, n - 1)
    }
}

/// Lifts a move's combinator to the position it acts on.
pub fn coerce(e: FTerm, m: &Move) -> FTerm {
    coerce_at(e, &m.at, m.kind)
}

fn coerce_at(e: FTerm, at: &[Pos], kind: MoveKind) -> FTerm {
    let Some((first, rest)) = at.split_first() else {
        return at_root(e, kind);
    };
    let fv = e.free_vars();
    let p = || FTerm::var(fresh_name("p", &fv));
    match first {
        Pos::PlusLeft => FTerm::let_in(
            fresh_name("p", &fv),
            e,
            FTerm::pair(coerce_at(FTerm::proj1(p()), rest, kind), FTerm::proj2(p())),
        ),
        Pos::PlusRight => FTerm::let_in(
            fresh_name("p", &fv),
            e,
            FTerm::pair(FTerm::proj1(p()), coerce_at(FTerm::proj2(p()), rest, kind)),
        ),
        Pos::ArrowCod => {
            let a = fresh_name("a", &fv);
            FTerm::lam(a.clone(), coerce_at(FTerm::app(e, FTerm::var(a)), rest, kind))
        }
        Pos::ArrowDom => {
            let a = fresh_name("a", &fv);
            FTerm::lam(a.clone(), FTerm::app(e, coerce_at(FTerm::var(a), rest, kind.inverse())))
        }
        Pos::ForallBody => coerce_at(e, rest, kind),
    }
}

fn at_root(e: FTerm, kind: MoveKind) -> FTerm {
    let name = fresh_name("p", &e.free_vars());
    let p = || FTerm::var(name.clone());
    let body = match kind {
        MoveKind::DropUnitLeft => return FTerm::proj2(e),
        MoveKind::DropUnitRight => return FTerm::proj1(e),
        MoveKind::AddUnitLeft => return FTerm::pair(FTerm::Star, e),
        MoveKind::AddUnitRight => return FTerm::pair(e, FTerm::Star),
        MoveKind::Swap => FTerm::pair(FTerm::proj2(p()), FTerm::proj1(p())),
        MoveKind::ReassocLeft => FTerm::pair(
            FTerm::pair(FTerm::proj1(p()), FTerm::proj1(FTerm::proj2(p()))),
            FTerm::proj2(FTerm::proj2(p())),
        ),
        MoveKind::ReassocRight => FTerm::pair(
            FTerm::proj1(FTerm::proj1(p())),
            FTerm::pair(FTerm::proj2(FTerm::proj1(p())), FTerm::proj2(p())),
        ),
    };
    FTerm::let_in(name, e, body)
}

#[cfg(test)]
mod tests {
    use super::super::term::f_normalize;
    use super::*;
    use crate::parse::{parse_context, parse_term};

    fn tr(ctx: &str, src: &str) -> FTerm {
        let t = ATerm::new(parse_term(src).unwrap()).unwrap();
        translate_term(&parse_context(ctx).unwrap(), &t).unwrap()
    }

    fn nf(t: &FTerm) -> String {
        f_normalize(t, 10_000).unwrap().to_string()
    }

    #[test]
    fn simple_shapes() {
        assert_eq!(tr("x:X", "x").to_string(), "x");
        assert_eq!(tr("", "zero").to_string(), "*");
        assert_eq!(tr("x:X, y:Y", "x + y").to_string(), "(x, y)");
        assert_eq!(tr("f:X -> Y, x:X", "\\z:X. f z").to_string(), "\\z. f z");
        assert_eq!(tr("f:X -> Y, x:X", "zero x").to_string(), "*");
    }

    #[test]
    fn sums_follow_canonical_order() {
        // terms sort by name, types by type: the pair is swapped into place
        assert_eq!(nf(&tr("a:Y, b:X", "a + b")), "(b, a)");
        assert_eq!(nf(&tr("x:X", "x + zero")), "x");
    }

    #[test]
    fn application_of_sums_is_a_tuple_of_applications() {
        let ctx = "f:U -> T, g:U -> R, b:U, c:U";
        // R sorts before T, so the g components come first
        assert_eq!(nf(&tr(ctx, "(f + g) (b + c)")), "(((g b, g c), f b), f c)");
    }

    #[test]
    fn type_application_is_transparent() {
        assert_eq!(tr("", "(/\\X. \\x:X. x) @ Y").to_string(), "\\x. x");
    }

    #[test]
    fn projections_of_left_combs() {
        let e = FTerm::var("e");
        assert_eq!(project(e.clone(), 1, 3).to_string(), "p1 (p1 e)");
        assert_eq!(project(e.clone(), 2, 3).to_string(), "p2 (p1 e)");
        assert_eq!(project(e.clone(), 3, 3).to_string(), "p2 e");
        assert_eq!(project(e, 1, 1).to_string(), "e");
    }
}

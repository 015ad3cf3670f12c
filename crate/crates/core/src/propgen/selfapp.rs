//! The self-application `Y_b = (λx. b + x x)(λx. b + x x)`, which rewrites
//! to `b + Y_b` forever. Untyped, two strategies reach readings of
//! `Y_b + Y_b` that differ by a single `b`; typed, no annotation of `x`
//! is accepted.

use num_traits::One;

use crate::rewrite::{linear_combination, normalize, trace, Group, Strategy};
use crate::syntax::{Context, Scalar, Skel, Term, Type, UnitType};
use crate::typing::synthesize;

/// `Y_b` with `x` annotated by `annotation`.
pub fn y_b(annotation: &UnitType) -> Term {
    let half = Term::abs(
        "x",
        annotation.clone(),
        Term::sum(vec![Term::var("b"), Term::app(Term::var("x"), Term::var("x"))]),
    );
    Term::app(half.clone(), half)
}

/// Keeps the count of `b` even: merges the two copies before unfolding.
pub fn even_strategy() -> Strategy {
    Strategy::ByGroup(vec![Group::F, Group::E, Group::A, Group::Beta])
}

/// Unfolds one copy at a time.
pub fn odd_strategy() -> Strategy {
    Strategy::ByGroup(vec![Group::Beta, Group::F, Group::E, Group::A])
}

/// Unit types of depth at most `depth` over `vars`, with codomains of at
/// most two summands.
pub fn annotation_family(depth: usize, vars: &[&str]) -> Vec<UnitType> {
    let mut out: Vec<UnitType> = vars.iter().map(|v| UnitType::var(*v)).collect();
    if depth <= 1 {
        return out;
    }
    let smaller = annotation_family(depth - 1, vars);
    let mut codomains = vec![Type::zero()];
    for (i, a) in smaller.iter().enumerate() {
        codomains.push(Type::unit(a.clone()));
        for b in &smaller[i..] {
            codomains.push(Type::from_summands(vec![a.clone(), b.clone()]));
        }
    }
    for dom in &smaller {
        for cod in &codomains {
            out.push(UnitType::arrow(dom.clone(), cod.clone()));
        }
    }
    for body in annotation_family(depth - 1, &[vars, &["Z"]].concat()) {
        out.push(UnitType::forall("Z", body));
    }
    out
}

#[derive(Debug, Clone)]
pub struct Reading {
    pub step: usize,
    pub term: Term,
    pub b: Scalar,
    pub y_b: Scalar,
}

#[derive(Debug, Clone)]
pub struct SelfApplicationReport {
    /// First pair of partial results, one per strategy, with equal nonzero
    /// `Y_b` weight and `b` weights one apart, the even one first and
    /// past the start.
    pub split: Option<(Reading, Reading)>,
    /// Every reading on the even path has an even `b` weight.
    pub even_throughout: bool,
    /// Both strategies run out of fuel.
    pub diverges: bool,
    pub annotations_tried: usize,
    pub annotations_accepted: Vec<UnitType>,
}

impl SelfApplicationReport {
    pub fn passed(&self) -> bool {
        self.split.is_some() && self.even_throughout && self.diverges && self.annotations_accepted.is_empty()
    }
}

fn readings(start: &Term, strategy: &Strategy, steps: usize, unit: &Skel) -> Vec<Reading> {
    let path = trace(start, strategy, steps);
    std::iter::once(start.clone())
        .chain(path.steps.into_iter().map(|r| r.term))
        .enumerate()
        .map(|(step, term)| {
            let lc = linear_combination(&term);
            let weight = |s: &Skel| lc.get(s).cloned().unwrap_or_else(Scalar::zero);
            Reading { step, b: weight(&Skel::Free("b".to_string())), y_b: weight(unit), term }
        })
        .collect()
}

/// Runs `Y_b + Y_b` for `steps` steps under both strategies and checks
/// every annotation of depth at most `depth` against `b : X`.
pub fn self_application(steps: usize, depth: usize) -> SelfApplicationReport {
    let yb = y_b(&UnitType::var("X"));
    let unit = yb.skeleton();
    let start = Term::sum(vec![yb.clone(), yb]);
    let even = readings(&start, &even_strategy(), steps, &unit);
    let odd = readings(&start, &odd_strategy(), steps, &unit);
    let parity = |s: &Scalar, want_even: bool| {
        s.is_integer() && (s.floor() % 2 == 0) == want_even
    };
    let split = even
        .iter()
        .filter(|e| parity(&e.b, true) && !e.b.is_zero())
        .flat_map(|e| odd.iter().map(move |o| (e, o)))
        .find(|(e, o)| {
            parity(&o.b, false) && e.y_b == o.y_b && !e.y_b.is_zero() && {
                let (lo, hi) = (e.b.value().min(o.b.value()), e.b.value().max(o.b.value()));
                hi - lo == One::one()
            }
        })
        .map(|(e, o)| (e.clone(), o.clone()));
    let even_throughout = even.iter().all(|e| parity(&e.b, true));
    let diverges = [even_strategy(), odd_strategy()]
        .iter()
        .all(|s| !normalize(&start, s, steps).is_normal());
    let ctx = Context::new().extend("b", UnitType::var("X"));
    let family = annotation_family(depth, &["X", "Y"]);
    let annotations_accepted = family
        .iter()
        .filter(|u| {
            let half = match y_b(u) {
                Term::App(f, _) => *f,
                _ => unreachable!(),
            };
            synthesize(&ctx, &half).is_ok()
        })
        .cloned()
        .collect();
    SelfApplicationReport { split, even_throughout, diverges, annotations_tried: family.len(), annotations_accepted }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unfolds_to_b_plus_itself() {
        let yb = y_b(&UnitType::var("X"));
        let out = trace(&yb, &Strategy::Leftmost, 1);
        assert_eq!(out.steps[0].term.to_string(), format!("b + {yb}"));
    }

    #[test]
    fn family_grows_with_depth() {
        assert_eq!(annotation_family(1, &["X", "Y"]).len(), 2);
        assert!(annotation_family(2, &["X", "Y"]).len() > 10);
    }
}

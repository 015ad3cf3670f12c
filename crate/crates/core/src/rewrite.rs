//! One-step reduction modulo AC, strategies and normalization.
//!
//! Terms are kept AC-canonical; every reduct is re-canonicalized, so sum
//! order never depends on which rule fired.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::syntax::term::{subst_any, subst_ty_raw};
use crate::syntax::{alpha_eq, canonicalize_term, Scalar, Skel, Term};

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    E,
    F,
    A,
    Beta,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Group::E => "E",
            Group::F => "F",
            Group::A => "A",
            Group::Beta => "B",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    PlusZero,
    ZeroScalar,
    OneScalar,
    ScalarZeroTerm,
    ScalarScalar,
    ScalarDistrib,
    FactorBoth,
    FactorOne,
    FactorNone,
    AppDistribL,
    AppDistribR,
    ScalarOutL,
    ScalarOutR,
    ZeroAppL,
    ZeroAppR,
    BetaTerm,
    BetaType,
}

impl RuleId {
    pub const ALL: [RuleId; 17] = [
        RuleId::PlusZero,
        RuleId::ZeroScalar,
        RuleId::OneScalar,
        RuleId::ScalarZeroTerm,
        RuleId::ScalarScalar,
        RuleId::ScalarDistrib,
        RuleId::FactorBoth,
        RuleId::FactorOne,
        RuleId::FactorNone,
        RuleId::AppDistribL,
        RuleId::AppDistribR,
        RuleId::ScalarOutL,
        RuleId::ScalarOutR,
        RuleId::ZeroAppL,
        RuleId::ZeroAppR,
        RuleId::BetaTerm,
        RuleId::BetaType,
    ];

    pub fn group(self) -> Group {
        use RuleId::*;
        match self {
            PlusZero | ZeroScalar | OneScalar | ScalarZeroTerm | ScalarScalar | ScalarDistrib => {
                Group::E
            }
            FactorBoth | FactorOne | FactorNone => Group::F,
            AppDistribL | AppDistribR | ScalarOutL | ScalarOutR | ZeroAppL | ZeroAppR => Group::A,
            BetaTerm | BetaType => Group::Beta,
        }
    }

    /// Rules of the scalar-free Additive calculus.
    pub fn is_additive(self) -> bool {
        use RuleId::*;
        matches!(
            self,
            PlusZero | AppDistribL | AppDistribR | ZeroAppL | ZeroAppR | BetaTerm | BetaType
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One step of a position. `Pair`, `Split` and `Drop` end a path and
/// select the summands a rule acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathStep {
    AbsBody,
    TyAbsBody,
    AppFun,
    AppArg,
    TyAppFun,
    ScaledBody,
    Summand(usize),
    /// Two summands of this sum, `i < j`.
    Pair(usize, usize),
    /// Summand `i` of the sum child is split off from the rest.
    Split(usize),
    /// Summand `i` of this sum is dropped.
    Drop(usize),
}

impl PathStep {
    fn is_focus(self) -> bool {
        matches!(self, PathStep::Pair(..) | PathStep::Split(_) | PathStep::Drop(_))
    }
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathStep::AbsBody => write!(f, "lam"),
            PathStep::TyAbsBody => write!(f, "tlam"),
            PathStep::AppFun => write!(f, "fun"),
            PathStep::AppArg => write!(f, "arg"),
            PathStep::TyAppFun => write!(f, "tfun"),
            PathStep::ScaledBody => write!(f, "scaled"),
            PathStep::Summand(i) => write!(f, "+{i}"),
            PathStep::Pair(i, j) => write!(f, "pair({i},{j})"),
            PathStep::Split(i) => write!(f, "split({i})"),
            PathStep::Drop(i) => write!(f, "drop({i})"),
        }
    }
}

pub fn format_path(path: &[PathStep]) -> String {
    if path.is_empty() {
        return "root".to_string();
    }
    path.iter().map(ToString::to_string).collect::<Vec<_>>().join("/")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex {
    pub rule: RuleId,
    pub path: Vec<PathStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduct {
    pub term: Term,
    pub rule: RuleId,
    pub path: Vec<PathStep>,
}

/// Every redex of `t`, in pre-order: a node's own redexes, then its
/// children left to right.
pub fn redexes(t: &Term) -> Vec<Redex> {
    let mut out = Vec::new();
    collect(t, &mut Vec::new(), &mut out);
    out
}

fn collect(t: &Term, path: &mut Vec<PathStep>, out: &mut Vec<Redex>) {
    for (focus, rule) in node_redexes(t) {
        let mut p = path.clone();
        p.extend(focus);
        out.push(Redex { rule, path: p });
    }
    let mut child = |step: PathStep, sub: &Term, out: &mut Vec<Redex>| {
        path.push(step);
        collect(sub, path, out);
        path.pop();
    };
    match t {
        Term::Var(_) | Term::Zero => {}
        Term::Abs(_, _, b) => child(PathStep::AbsBody, b, out),
        Term::TyAbs(_, b) => child(PathStep::TyAbsBody, b, out),
        Term::App(f, a) => {
            child(PathStep::AppFun, f, out);
            child(PathStep::AppArg, a, out);
        }
        Term::TyApp(f, _) => child(PathStep::TyAppFun, f, out),
        Term::Scaled(_, b) => child(PathStep::ScaledBody, b, out),
        Term::Sum(items) => {
            for (i, item) in items.iter().enumerate() {
                child(PathStep::Summand(i), item, out);
            }
        }
    }
}

fn splits(items: &[Term]) -> impl Iterator<Item = usize> {
    // with two summands, splitting off either one gives the same reduct
    let n = if items.len() == 2 { 1 } else { items.len() };
    0..n
}

fn node_redexes(t: &Term) -> Vec<(Option<PathStep>, RuleId)> {
    use RuleId::*;
    let mut out = Vec::new();
    match t {
        Term::Sum(items) => {
            for (i, item) in items.iter().enumerate() {
                if matches!(item, Term::Zero) {
                    out.push((Some(PathStep::Drop(i)), PlusZero));
                }
            }
            for i in 0..items.len() {
                for j in i + 1..items.len() {
                    for rule in [FactorBoth, FactorOne, FactorNone] {
                        if factor(&items[i], &items[j], rule).is_some() {
                            out.push((Some(PathStep::Pair(i, j)), rule));
                        }
                    }
                }
            }
        }
        Term::Scaled(alpha, body) => {
            if alpha.is_zero() {
                out.push((None, ZeroScalar));
            }
            if alpha.is_one() {
                out.push((None, OneScalar));
            }
            match body.as_ref() {
                Term::Zero => out.push((None, ScalarZeroTerm)),
                Term::Scaled(..) => out.push((None, ScalarScalar)),
                Term::Sum(items) => {
                    out.extend(splits(items).map(|i| (Some(PathStep::Split(i)), ScalarDistrib)))
                }
                _ => {}
            }
        }
        Term::App(f, a) => {
            if let Term::Sum(items) = f.as_ref() {
                out.extend(splits(items).map(|i| (Some(PathStep::Split(i)), AppDistribL)));
            }
            if let Term::Sum(items) = a.as_ref() {
                out.extend(splits(items).map(|i| (Some(PathStep::Split(i)), AppDistribR)));
            }
            if matches!(f.as_ref(), Term::Scaled(..)) {
                out.push((None, ScalarOutL));
            }
            if matches!(a.as_ref(), Term::Scaled(..)) {
                out.push((None, ScalarOutR));
            }
            if matches!(f.as_ref(), Term::Zero) {
                out.push((None, ZeroAppL));
            }
            if matches!(a.as_ref(), Term::Zero) {
                out.push((None, ZeroAppR));
            }
            if matches!(f.as_ref(), Term::Abs(..)) && a.is_basis() {
                out.push((None, BetaTerm));
            }
        }
        Term::TyApp(f, _) => {
            if matches!(f.as_ref(), Term::TyAbs(..)) {
                out.push((None, BetaType));
            }
        }
        Term::Var(_) | Term::Zero | Term::Abs(..) | Term::TyAbs(..) => {}
    }
    out
}

fn factor(a: &Term, b: &Term, rule: RuleId) -> Option<Term> {
    match (rule, a, b) {
        (RuleId::FactorBoth, Term::Scaled(x, u), Term::Scaled(y, v)) if alpha_eq(u, v) => {
            Some(Term::scaled(x + y, (**u).clone()))
        }
        (RuleId::FactorOne, Term::Scaled(x, u), v) | (RuleId::FactorOne, v, Term::Scaled(x, u))
            if alpha_eq(u, v) =>
        {
            Some(Term::scaled(x + &Scalar::one(), (**u).clone()))
        }
        (RuleId::FactorNone, u, v) if alpha_eq(u, v) => {
            Some(Term::scaled(Scalar::from_integer(2), u.clone()))
        }
        _ => None,
    }
}

fn without(items: &[Term], skip: &[usize]) -> Vec<Term> {
    items
        .iter()
        .enumerate()
        .filter(|(k, _)| !skip.contains(k))
        .map(|(_, t)| t.clone())
        .collect()
}

/// Contracts the redex `rule` at a node; `None` if it does not match.
fn contract(t: &Term, focus: Option<PathStep>, rule: RuleId) -> Option<Term> {
    use RuleId::*;
    match (rule, focus, t) {
        (PlusZero, Some(PathStep::Drop(i)), Term::Sum(items)) => match items.get(i)? {
            Term::Zero => Some(Term::sum(without(items, &[i]))),
            _ => None,
        },
        (FactorBoth | FactorOne | FactorNone, Some(PathStep::Pair(i, j)), Term::Sum(items)) => {
            if i >= j {
                return None;
            }
            let merged = factor(items.get(i)?, items.get(j)?, rule)?;
            let mut rest = without(items, &[i, j]);
            rest.push(merged);
            Some(Term::sum(rest))
        }
        (ZeroScalar, None, Term::Scaled(a, _)) if a.is_zero() => Some(Term::Zero),
        (OneScalar, None, Term::Scaled(a, u)) if a.is_one() => Some((**u).clone()),
        (ScalarZeroTerm, None, Term::Scaled(_, u)) if matches!(**u, Term::Zero) => Some(Term::Zero),
        (ScalarScalar, None, Term::Scaled(a, inner)) => match inner.as_ref() {
            Term::Scaled(b, u) => Some(Term::scaled(a * b, (**u).clone())),
            _ => None,
        },
        (ScalarDistrib, Some(PathStep::Split(i)), Term::Scaled(a, inner)) => match inner.as_ref() {
            Term::Sum(items) => {
                let one = items.get(i)?.clone();
                let rest = Term::sum(without(items, &[i]));
                Some(Term::Sum(vec![Term::scaled(a.clone(), one), Term::scaled(a.clone(), rest)]))
            }
            _ => None,
        },
        (AppDistribL, Some(PathStep::Split(i)), Term::App(f, r)) => match f.as_ref() {
            Term::Sum(items) => {
                let one = items.get(i)?.clone();
                let rest = Term::sum(without(items, &[i]));
                Some(Term::Sum(vec![Term::app(one, (**r).clone()), Term::app(rest, (**r).clone())]))
            }
            _ => None,
        },
        (AppDistribR, Some(PathStep::Split(i)), Term::App(w, a)) => match a.as_ref() {
            Term::Sum(items) => {
                let one = items.get(i)?.clone();
                let rest = Term::sum(without(items, &[i]));
                Some(Term::Sum(vec![Term::app((**w).clone(), one), Term::app((**w).clone(), rest)]))
            }
            _ => None,
        },
        (ScalarOutL, None, Term::App(f, v)) => match f.as_ref() {
            Term::Scaled(a, u) => Some(Term::scaled(a.clone(), Term::app((**u).clone(), (**v).clone()))),
            _ => None,
        },
        (ScalarOutR, None, Term::App(v, arg)) => match arg.as_ref() {
            Term::Scaled(a, u) => Some(Term::scaled(a.clone(), Term::app((**v).clone(), (**u).clone()))),
            _ => None,
        },
        (ZeroAppL, None, Term::App(f, _)) if matches!(**f, Term::Zero) => Some(Term::Zero),
        (ZeroAppR, None, Term::App(_, a)) if matches!(**a, Term::Zero) => Some(Term::Zero),
        (BetaTerm, None, Term::App(f, b)) if b.is_basis() => match f.as_ref() {
            Term::Abs(x, _, body) => Some(subst_any(body, x, b)),
            _ => None,
        },
        (BetaType, None, Term::TyApp(f, u)) => match f.as_ref() {
            Term::TyAbs(var, body) => Some(subst_ty_raw(body, var, u)),
            _ => None,
        },
        _ => None,
    }
}

fn rebuild(t: &Term, path: &[PathStep], rule: RuleId) -> Option<Term> {
    let Some((&step, rest)) = path.split_first() else {
        return contract(t, None, rule);
    };
    if step.is_focus() {
        return if rest.is_empty() { contract(t, Some(step), rule) } else { None };
    }
    match (step, t) {
        (PathStep::AbsBody, Term::Abs(x, u, b)) => {
            Some(Term::abs(x.clone(), u.clone(), rebuild(b, rest, rule)?))
        }
        (PathStep::TyAbsBody, Term::TyAbs(x, b)) => Some(Term::ty_abs(x.clone(), rebuild(b, rest, rule)?)),
        (PathStep::AppFun, Term::App(f, a)) => Some(Term::app(rebuild(f, rest, rule)?, (**a).clone())),
        (PathStep::AppArg, Term::App(f, a)) => Some(Term::app((**f).clone(), rebuild(a, rest, rule)?)),
        (PathStep::TyAppFun, Term::TyApp(f, u)) => Some(Term::ty_app(rebuild(f, rest, rule)?, u.clone())),
        (PathStep::ScaledBody, Term::Scaled(a, b)) => Some(Term::scaled(a.clone(), rebuild(b, rest, rule)?)),
        (PathStep::Summand(i), Term::Sum(items)) => {
            let mut items = items.clone();
            let new = rebuild(items.get(i)?, rest, rule)?;
            items[i] = new;
            Some(Term::Sum(items))
        }
        _ => None,
    }
}

/// Applies `rule` at `path`, returning the canonical reduct, or `None`
/// when the rule does not match there.
pub fn apply_rule(t: &Term, path: &[PathStep], rule: RuleId) -> Option<Term> {
    rebuild(t, path, rule).map(|r| canonicalize_term(&r))
}

pub fn fire(t: &Term, redex: &Redex) -> Term {
    apply_rule(t, &redex.path, redex.rule).expect("enumerated redex must match")
}

/// `Red(t)`: all one-step reducts.
pub fn step(t: &Term) -> Vec<Reduct> {
    redexes(t)
        .into_iter()
        .map(|r| Reduct { term: fire(t, &r), rule: r.rule, path: r.path })
        .collect()
}

pub fn is_normal(t: &Term) -> bool {
    redexes(t).is_empty()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Value,
    Neutral,
    OpenTerm,
}

pub fn classify(t: &Term) -> Classification {
    if !t.free_term_vars().is_empty() {
        Classification::OpenTerm
    } else if is_value(t) {
        Classification::Value
    } else {
        Classification::Neutral
    }
}

fn is_value(t: &Term) -> bool {
    match t {
        Term::Abs(..) | Term::TyAbs(..) => true,
        Term::Sum(items) => items.iter().all(is_value),
        Term::Scaled(_, b) => is_value(b),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Random(u64),
    /// Pre-order first redex of the best-ranked group; unlisted groups rank last.
    ByGroup(Vec<Group>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy `{0}`; expected leftmost, rightmost, random:SEED or group:F,E,A,B")]
pub struct StrategyParseError(String);

impl FromStr for Strategy {
    type Err = StrategyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || StrategyParseError(s.to_string());
        match s {
            "leftmost" => return Ok(Strategy::Leftmost),
            "rightmost" => return Ok(Strategy::Rightmost),
            _ => {}
        }
        if let Some(seed) = s.strip_prefix("random:") {
            return seed.parse().map(Strategy::Random).map_err(|_| err());
        }
        if let Some(list) = s.strip_prefix("group:") {
            let groups = list
                .split(',')
                .map(|g| match g.trim() {
                    "E" => Ok(Group::E),
                    "F" => Ok(Group::F),
                    "A" => Ok(Group::A),
                    "B" | "Beta" => Ok(Group::Beta),
                    _ => Err(err()),
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Strategy::ByGroup(groups));
        }
        Err(err())
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Leftmost => write!(f, "leftmost"),
            Strategy::Rightmost => write!(f, "rightmost"),
            Strategy::Random(seed) => write!(f, "random:{seed}"),
            Strategy::ByGroup(groups) => {
                let names: Vec<String> = groups.iter().map(ToString::to_string).collect();
                write!(f, "group:{}", names.join(","))
            }
        }
    }
}

struct Picker {
    strategy: Strategy,
    rng: ChaCha8Rng,
}

impl Picker {
    fn new(strategy: &Strategy) -> Self {
        let seed = match strategy {
            Strategy::Random(seed) => *seed,
            _ => 0,
        };
        Picker { strategy: strategy.clone(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn pick(&mut self, candidates: &[Redex]) -> usize {
        match &self.strategy {
            Strategy::Leftmost => 0,
            Strategy::Rightmost => candidates.len() - 1,
            Strategy::Random(_) => self.rng.gen_range(0..candidates.len()),
            Strategy::ByGroup(order) => {
                let rank = |r: &Redex| {
                    order.iter().position(|g| *g == r.rule.group()).unwrap_or(order.len())
                };
                // min_by_key keeps the first of equal ranks, i.e. pre-order
                (0..candidates.len()).min_by_key(|&i| rank(&candidates[i])).unwrap()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Normal { term: Term, steps: usize },
    FuelExhausted { last: Term, steps: usize },
}

impl Outcome {
    pub fn term(&self) -> &Term {
        match self {
            Outcome::Normal { term, .. } => term,
            Outcome::FuelExhausted { last, .. } => last,
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            Outcome::Normal { steps, .. } | Outcome::FuelExhausted { steps, .. } => *steps,
        }
    }

    pub fn is_normal(&self) -> bool {
        matches!(self, Outcome::Normal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Reduct>,
    pub outcome: Outcome,
}

/// Restricts which rules may fire; used for the Additive fragment.
pub type RuleFilter = fn(RuleId) -> bool;

fn any_rule(_: RuleId) -> bool {
    true
}

fn run(t: &Term, strategy: &Strategy, fuel: usize, allowed: RuleFilter, record: bool) -> Trace {
    let mut picker = Picker::new(strategy);
    let mut current = canonicalize_term(t);
    let mut steps = Vec::new();
    let mut count = 0;
    loop {
        let candidates: Vec<Redex> = redexes(&current).into_iter().filter(|r| allowed(r.rule)).collect();
        if candidates.is_empty() {
            return Trace { steps, outcome: Outcome::Normal { term: current, steps: count } };
        }
        if count >= fuel {
            return Trace { steps, outcome: Outcome::FuelExhausted { last: current, steps: count } };
        }
        let chosen = &candidates[picker.pick(&candidates)];
        let next = fire(&current, chosen);
        if record {
            steps.push(Reduct { term: next.clone(), rule: chosen.rule, path: chosen.path.clone() });
        }
        current = next;
        count += 1;
    }
}

pub fn normalize(t: &Term, strategy: &Strategy, fuel: usize) -> Outcome {
    run(t, strategy, fuel, any_rule, false).outcome
}

pub fn normalize_with(t: &Term, strategy: &Strategy, fuel: usize, allowed: RuleFilter) -> Outcome {
    run(t, strategy, fuel, allowed, false).outcome
}

pub fn trace(t: &Term, strategy: &Strategy, fuel: usize) -> Trace {
    run(t, strategy, fuel, any_rule, true)
}

pub fn trace_with(t: &Term, strategy: &Strategy, fuel: usize, allowed: RuleFilter) -> Trace {
    run(t, strategy, fuel, allowed, true)
}

/// Reads a term as a formal linear combination: scalars and sums are
/// interpreted, every other subterm is an opaque atom up to α and AC.
pub fn linear_combination(t: &Term) -> BTreeMap<Skel, Scalar> {
    let mut out = BTreeMap::new();
    accumulate(t, &Scalar::one(), &mut out);
    out.retain(|_, v| !v.is_zero());
    out
}

fn accumulate(t: &Term, coeff: &Scalar, out: &mut BTreeMap<Skel, Scalar>) {
    match t {
        Term::Zero => {}
        Term::Sum(items) => items.iter().for_each(|i| accumulate(i, coeff, out)),
        Term::Scaled(a, b) => accumulate(b, &(coeff * a), out),
        atom => {
            let slot = out.entry(atom.skeleton()).or_insert_with(Scalar::zero);
            *slot = &*slot + coeff;
        }
    }
}

/// Whether a path stays in the scalar/sum layer of a term.
pub fn is_linear_position(path: &[PathStep]) -> bool {
    path.iter().all(|s| {
        matches!(
            s,
            PathStep::Summand(_) | PathStep::ScaledBody | PathStep::Pair(..) | PathStep::Split(_) | PathStep::Drop(_)
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn t(src: &str) -> Term {
        parse_term(src).unwrap()
    }

    fn rules_of(src: &str) -> Vec<RuleId> {
        step(&t(src)).into_iter().map(|r| r.rule).collect()
    }

    #[test]
    fn factor_both_on_example() {
        let out = normalize(&t("0.9 . s + 1.1 . s"), &Strategy::Leftmost, DEFAULT_FUEL);
        assert_eq!(out.term(), &t("2 . s"));
        assert!(out.is_normal());
    }

    #[test]
    fn one_scalar() {
        let tr = trace(&t("1 . x"), &Strategy::Leftmost, 10);
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.steps[0].term, t("x"));
        assert_eq!(tr.steps[0].rule, RuleId::OneScalar);
        assert!(tr.steps[0].path.is_empty());
    }

    #[test]
    fn beta_trace() {
        let tr = trace(&t("(\\x:U. x) y"), &Strategy::Leftmost, 10);
        assert_eq!(tr.steps.len(), 1);
        assert_eq!((tr.steps[0].term.clone(), tr.steps[0].rule), (t("y"), RuleId::BetaTerm));
    }

    #[test]
    fn type_beta() {
        let out = normalize(&t("(/\\X. \\x:X. x) @ Y"), &Strategy::Leftmost, 10);
        assert!(alpha_eq(out.term(), &t("\\x:Y. x")));
    }

    #[test]
    fn normal_terms_have_no_reducts() {
        assert!(step(&t("\\x:X. x")).is_empty());
        assert!(is_normal(&t("2 . (\\x:U. x)")));
        assert!(is_normal(&t("zero")));
    }

    #[test]
    fn group_f_is_syntactic() {
        assert_eq!(rules_of("x + x"), vec![RuleId::FactorNone]);
        assert_eq!(rules_of("2 . x + x"), vec![RuleId::FactorOne]);
        assert_eq!(rules_of("x + y"), vec![]);
        // u + u where u is itself scaled: two factorizations apply
        let mut rules = rules_of("2 . x + 2 . x");
        rules.sort();
        assert_eq!(rules, vec![RuleId::FactorBoth, RuleId::FactorNone]);
    }

    #[test]
    fn pairs_are_enumerated_exhaustively() {
        // three copies give three unordered pairs
        assert_eq!(rules_of("x + x + x").len(), 3);
    }

    #[test]
    fn beta_needs_basis_argument() {
        assert!(!rules_of("(\\x:U. x) (y + z)").contains(&RuleId::BetaTerm));
        assert!(rules_of("(\\x:U. x) (y + z)").contains(&RuleId::AppDistribR));
        assert!(!rules_of("(\\x:U. x) (2 . y)").contains(&RuleId::BetaTerm));
    }

    #[test]
    fn distribution_reaches_linear_form() {
        let out = normalize(&t("f (1/2 . x + 3 . y)"), &Strategy::Leftmost, 100);
        assert_eq!(out.term(), &t("1/2 . (f x) + 3 . (f y)"));
    }

    #[test]
    fn reductions_under_binders() {
        let reds = step(&t("\\x:U. 1 . x"));
        assert_eq!(reds.len(), 1);
        assert_eq!(reds[0].path, vec![PathStep::AbsBody]);
    }

    #[test]
    fn group_e_rules_fire() {
        assert_eq!(rules_of("0 . x"), vec![RuleId::ZeroScalar]);
        assert_eq!(rules_of("2 . zero"), vec![RuleId::ScalarZeroTerm]);
        assert_eq!(rules_of("2 . 3 . x"), vec![RuleId::ScalarScalar]);
        assert_eq!(rules_of("2 . (x + y)"), vec![RuleId::ScalarDistrib]);
        assert_eq!(rules_of("x + zero"), vec![RuleId::PlusZero]);
        let reds = step(&t("2 . 3 . x"));
        assert_eq!(reds[0].term, t("6 . x"));
    }

    #[test]
    fn group_a_rules_fire() {
        assert_eq!(rules_of("zero x"), vec![RuleId::ZeroAppL]);
        assert_eq!(rules_of("x zero"), vec![RuleId::ZeroAppR]);
        assert_eq!(rules_of("(2 . f) x"), vec![RuleId::ScalarOutL]);
        assert_eq!(rules_of("f (2 . x)"), vec![RuleId::ScalarOutR]);
        assert_eq!(rules_of("(f + g) x"), vec![RuleId::AppDistribL]);
        assert_eq!(rules_of("(f + g + h) x").len(), 3);
    }

    #[test]
    fn every_reduct_replays() {
        let term = t("(\\x:U. 1 . x + x) (2 . y + zero) + 0.9 . z + 1.1 . z");
        for r in step(&term) {
            assert_eq!(apply_rule(&term, &r.path, r.rule).as_ref(), Some(&r.term));
        }
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&t("\\x:U. x + \\y:U. y")), Classification::Value);
        assert_eq!(classify(&t("zero")), Classification::Neutral);
        assert_eq!(classify(&t("2 . (\\x:U. x)")), Classification::Value);
        assert_eq!(classify(&t("x")), Classification::OpenTerm);
        assert_eq!(classify(&t("(\\x:U. x) (\\x:U. x)")), Classification::Neutral);
    }

    #[test]
    fn fuel_bounds_divergence() {
        let omega = t("(\\x:X. x x) (\\x:X. x x)");
        let out = normalize(&omega, &Strategy::Leftmost, 25);
        assert_eq!(out, Outcome::FuelExhausted { last: omega, steps: 25 });
    }

    #[test]
    fn random_strategy_is_reproducible() {
        let term = t("(f + g) (x + y) + 1 . z + 2 . 3 . w");
        let a = trace(&term, &Strategy::Random(7), 100);
        let b = trace(&term, &Strategy::Random(7), 100);
        assert_eq!(a, b);
    }

    #[test]
    fn strategy_syntax() {
        assert_eq!("group:F,E,A,B".parse::<Strategy>().unwrap(), Strategy::ByGroup(vec![Group::F, Group::E, Group::A, Group::Beta]));
        assert_eq!("random:3".parse::<Strategy>().unwrap(), Strategy::Random(3));
        assert!("sideways".parse::<Strategy>().is_err());
        for s in ["leftmost", "rightmost", "random:9", "group:B,A"] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn linear_combination_reading() {
        let lc = linear_combination(&t("1/2 . x + 2 . (x + 0 . y) + zero"));
        assert_eq!(lc.len(), 1);
        assert_eq!(lc.values().next().unwrap(), &Scalar::ratio(5, 2).unwrap());
    }
}

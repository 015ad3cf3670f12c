//! The per-sample metatheory checks and their reports.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{default_context, gen_typed_term, GenConfig};
use crate::additive::{a_synthesize, lesssim, sigma};
use crate::fsysp::{derive, f_check, f_lessapprox_any_layout, translate};
use crate::precision::precedes;
use crate::rewrite::{normalize, step, trace, Group, Outcome, RuleId, Strategy};
use crate::syntax::{alpha_eq, subst_term, subst_type_in_term, type_equiv, Context, Term, Type, UnitType};
use crate::typing::{check_subject_reduction, synthesize};

pub const SUBJECT_REDUCTION: &str = "subject-reduction";
pub const STRONG_NORMALISATION: &str = "strong-normalisation";
pub const CONFLUENCE: &str = "confluence";
pub const SUBSTITUTION: &str = "substitution";
pub const SIGMA_TYPING: &str = "sigma-typing";
pub const ADDITIVE_SQUARE: &str = "additive-square";
pub const FP_SQUARE: &str = "fp-square";
pub const MONOTONE_PRECISION: &str = "monotone-precision";
pub const WEIGHT: &str = "weight";

pub const CHECKS: [&str; 9] = [
    SUBJECT_REDUCTION,
    STRONG_NORMALISATION,
    CONFLUENCE,
    SUBSTITUTION,
    SIGMA_TYPING,
    ADDITIVE_SQUARE,
    FP_SQUARE,
    MONOTONE_PRECISION,
    WEIGHT,
];

/// Longest trace kept in a failure record.
const TRACE_LIMIT: usize = 20;

/// The two ways a reduction step loses typability under the floor reading
/// of scalars, neither of which the subject reduction argument covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gap {
    /// `α.t` with `⌊α⌋ = 0` types as `0` in an application, so the domain
    /// of the head is never compared with the argument; moving the scalar
    /// out exposes the mismatch.
    FloorZeroApplication,
    /// Merging or multiplying scalars can raise the floor
    /// (`⌊9/10⌋ + ⌊11/10⌋ < ⌊2⌋`), so the reduct has more summands, which a
    /// type abstraction, instantiation or argument position rejects.
    FloorWeightGain,
}

impl Gap {
    pub fn of_rule(rule: RuleId) -> Option<Gap> {
        match rule {
            RuleId::ScalarOutL | RuleId::ScalarOutR => Some(Gap::FloorZeroApplication),
            RuleId::FactorBoth | RuleId::ScalarScalar => Some(Gap::FloorWeightGain),
            _ => None,
        }
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::FloorZeroApplication => write!(f, "floor-zero application"),
            Gap::FloorWeightGain => write!(f, "floor weight gain"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub term: Term,
    pub trace: Vec<String>,
    pub property: String,
    /// Set when a step broke typing in one of the known ways.
    pub gap: Option<Gap>,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub failures: Vec<Failure>,
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{:<20} {status} {}/{} ({:.2?})", self.name, self.samples - self.failures.len(), self.samples, self.elapsed)
    }
}

#[derive(Debug, Clone)]
pub struct SampleResult {
    pub index: usize,
    pub term: Term,
    pub ty: Type,
    pub failures: Vec<(&'static str, Failure)>,
    pub timings: Vec<(&'static str, Duration)>,
    pub fired: BTreeMap<RuleId, usize>,
}

#[derive(Debug, Clone)]
pub struct FuzzRun {
    pub samples: Vec<SampleResult>,
    pub reports: Vec<CheckReport>,
    pub fired: BTreeMap<RuleId, usize>,
    pub elapsed: Duration,
}

impl FuzzRun {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(CheckReport::passed)
    }

    /// Samples where some step lost typability in a known way.
    pub fn gap_samples(&self) -> Vec<(usize, Gap)> {
        self.samples
            .iter()
            .filter_map(|s| s.failures.iter().find_map(|(_, f)| f.gap).map(|g| (s.index, g)))
            .collect()
    }

    /// Failures not accounted for by a known gap in the same sample.
    pub fn unexplained(&self) -> Vec<(usize, &'static str, &Failure)> {
        self.samples
            .iter()
            .filter(|s| !s.failures.iter().any(|(_, f)| f.gap.is_some()))
            .flat_map(|s| s.failures.iter().map(move |(n, f)| (s.index, *n, f)))
            .collect()
    }

    pub fn report(&self, name: &str) -> &CheckReport {
        self.reports.iter().find(|r| r.name == name).expect("known check")
    }

    /// One line per sample, in generation order.
    pub fn records(&self) -> Vec<String> {
        self.samples
            .iter()
            .map(|s| {
                let mut line = format!("sample={} size={} type=\"{}\" term=\"{}\"", s.index, s.term.size(), s.ty, s.term);
                if s.failures.is_empty() {
                    line.push_str(" status=pass");
                } else {
                    let names: Vec<&str> = s.failures.iter().map(|(n, _)| *n).collect();
                    line.push_str(&format!(" status=fail failed={}", names.join(",")));
                    if let Some(gap) = s.failures.iter().find_map(|(_, f)| f.gap) {
                        line.push_str(&format!(" gap=\"{gap}\""));
                    }
                    for (name, f) in &s.failures {
                        line.push_str(&format!(" {name}=\"{}\"", f.property));
                    }
                }
                line
            })
            .collect()
    }

    pub fn summary(&self) -> String {
        let mut out = String::from("summary:\n");
        for r in &self.reports {
            out.push_str(&format!("  {r}\n"));
        }
        let missing: Vec<String> =
            RuleId::ALL.iter().filter(|r| !self.fired.contains_key(r)).map(ToString::to_string).collect();
        let fired: Vec<String> = self.fired.iter().map(|(r, n)| format!("{r}={n}")).collect();
        out.push_str(&format!("  rules fired: {}\n", fired.join(" ")));
        if !missing.is_empty() {
            out.push_str(&format!("  rules never fired: {}\n", missing.join(" ")));
        }
        let gaps = self.gap_samples();
        if !gaps.is_empty() {
            let count = |g| gaps.iter().filter(|(_, x)| *x == g).count();
            out.push_str(&format!(
                "  samples with a known typing gap: {} ({} {}, {} {})\n",
                gaps.len(),
                count(Gap::FloorZeroApplication),
                Gap::FloorZeroApplication,
                count(Gap::FloorWeightGain),
                Gap::FloorWeightGain
            ));
        }
        out.push_str(&format!("  unexplained failures: {}\n", self.unexplained().len()));
        out.push_str(&format!("  total {:.2?}", self.elapsed));
        out
    }
}

/// Strategies whose normal forms are compared; the random one is seeded
/// per sample.
pub fn strategies(seed: u64) -> Vec<Strategy> {
    vec![
        Strategy::Leftmost,
        Strategy::Rightmost,
        Strategy::Random(seed),
        Strategy::ByGroup(vec![Group::Beta, Group::A, Group::F, Group::E]),
        Strategy::ByGroup(vec![Group::E, Group::F, Group::A, Group::Beta]),
    ]
}

pub fn run_checks(cfg: &GenConfig) -> Vec<CheckReport> {
    fuzz(cfg).reports
}

pub fn fuzz(cfg: &GenConfig) -> FuzzRun {
    fuzz_in(cfg, &default_context(cfg))
}

pub fn fuzz_in(cfg: &GenConfig, ctx: &Context) -> FuzzRun {
    let start = Instant::now();
    let terms: Vec<(Term, Type)> = gen_typed_term(cfg, ctx).take(cfg.samples).collect();
    let samples: Vec<SampleResult> = terms
        .into_par_iter()
        .enumerate()
        .map(|(index, (term, ty))| check_sample(cfg, ctx, index, term, ty))
        .collect();
    let mut fired = BTreeMap::new();
    for s in &samples {
        for (r, n) in &s.fired {
            *fired.entry(*r).or_insert(0) += n;
        }
    }
    let reports = CHECKS
        .iter()
        .map(|&name| CheckReport {
            name: name.to_string(),
            samples: samples.len(),
            failures: samples
                .iter()
                .flat_map(|s| s.failures.iter().filter(|(n, _)| *n == name).map(|(_, f)| f.clone()))
                .collect(),
            elapsed: samples
                .iter()
                .flat_map(|s| s.timings.iter().filter(|(n, _)| *n == name).map(|(_, d)| *d))
                .sum(),
        })
        .collect();
    FuzzRun { samples, reports, fired, elapsed: start.elapsed() }
}

struct Sample<'a> {
    cfg: &'a GenConfig,
    ctx: &'a Context,
    term: Term,
    ty: Type,
    seed: u64,
    failures: Vec<(&'static str, Failure)>,
    timings: Vec<(&'static str, Duration)>,
    fired: BTreeMap<RuleId, usize>,
}

impl Sample<'_> {
    fn fail(&mut self, check: &'static str, trace: Vec<String>, property: String) {
        self.failures.push((check, Failure { term: self.term.clone(), trace, property, gap: None }));
    }

    fn fail_step(&mut self, check: &'static str, trace: Vec<String>, property: String, rule: RuleId) {
        let gap = Gap::of_rule(rule);
        self.failures.push((check, Failure { term: self.term.clone(), trace, property, gap }));
    }

    fn timed<T>(&mut self, check: &'static str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        self.timings.push((check, start.elapsed()));
        out
    }
}

fn show_trace(start: &Term, steps: &[(RuleId, Term)]) -> Vec<String> {
    let mut out = vec![start.to_string()];
    out.extend(steps.iter().take(TRACE_LIMIT).map(|(r, t)| format!("-{r}-> {t}")));
    out
}

pub fn check_sample(cfg: &GenConfig, ctx: &Context, index: usize, term: Term, ty: Type) -> SampleResult {
    let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(index as u64);
    let mut s = Sample {
        cfg,
        ctx,
        term,
        ty,
        seed,
        failures: Vec::new(),
        timings: Vec::new(),
        fired: BTreeMap::new(),
    };
    s.timed(SUBJECT_REDUCTION, subject_reduction);
    let normal = s.timed(STRONG_NORMALISATION, strong_normalisation);
    if let Some(normal) = &normal {
        s.timed(CONFLUENCE, |s| confluence(s, normal));
    }
    s.timed(SUBSTITUTION, substitution);
    s.timed(SIGMA_TYPING, sigma_typing);
    if let Some(normal) = &normal {
        s.timed(ADDITIVE_SQUARE, |s| additive_square(s, normal));
        s.timed(FP_SQUARE, |s| fp_square(s, normal));
        s.timed(MONOTONE_PRECISION, |s| monotone_precision(s, normal));
    }
    s.timed(WEIGHT, weight);
    SampleResult {
        index,
        term: s.term,
        ty: s.ty,
        failures: s.failures,
        timings: s.timings,
        fired: s.fired,
    }
}

/// Every one-step reduct of every term on the leftmost path keeps a type
/// at least as precise.
fn subject_reduction(s: &mut Sample) {
    let path = trace(&s.term, &Strategy::Leftmost, s.cfg.fuel);
    let mut current = s.term.clone();
    let mut seen: Vec<(RuleId, Term)> = Vec::new();
    for next in std::iter::once(None).chain(path.steps.iter().map(Some)) {
        if let Some(r) = next {
            seen.push((r.rule, r.term.clone()));
            current = r.term.clone();
        }
        for r in step(&current) {
            *s.fired.entry(r.rule).or_insert(0) += 1;
        }
        match check_subject_reduction(s.ctx, &current) {
            Ok(report) => {
                if let Some(v) = report.violations.first() {
                    let prop = format!("`{current}` : {} but its {} reduct `{}` has {:?}", report.ty, v.rule, v.reduct, v.failure);
                    s.fail_step(SUBJECT_REDUCTION, show_trace(&s.term, &seen), prop, v.rule);
                    return;
                }
            }
            Err(e) => {
                let prop = format!("`{current}` on the reduction path is untypable: {e}");
                s.fail(SUBJECT_REDUCTION, show_trace(&s.term, &seen), prop);
                return;
            }
        }
    }
}

/// Normalizes under every strategy within fuel; returns the leftmost
/// normal form.
fn strong_normalisation(s: &mut Sample) -> Option<Term> {
    let mut first = None;
    for strategy in strategies(s.seed) {
        match normalize(&s.term, &strategy, s.cfg.fuel) {
            Outcome::Normal { term, .. } => {
                first.get_or_insert(term);
            }
            Outcome::FuelExhausted { last, steps } => {
                let prop = format!("{strategy} did not finish in {steps} steps; reached `{last}`");
                s.fail(STRONG_NORMALISATION, Vec::new(), prop);
                return None;
            }
        }
    }
    first
}

fn confluence(s: &mut Sample, normal: &Term) {
    for strategy in strategies(s.seed) {
        let other = normalize(&s.term, &strategy, s.cfg.fuel);
        if !alpha_eq(normal, other.term()) {
            let prop = format!("leftmost gives `{normal}` but {strategy} gives `{}`", other.term());
            s.fail(CONFLUENCE, Vec::new(), prop);
            return;
        }
    }
}

/// Both halves of the substitution lemma: a unit type for a type variable
/// throughout, and a basis term of the right type for a context variable.
fn substitution(s: &mut Sample) {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let var = s.cfg.tyvars.choose(&mut rng).unwrap().clone();
    let replacements = [
        UnitType::var(s.cfg.tyvars.last().unwrap().clone()),
        UnitType::arrow(UnitType::var(var.clone()), Type::unit(UnitType::var(var.clone()))),
    ];
    let unit = replacements.choose(&mut rng).unwrap().clone();
    let mut ctx = Context::new();
    for (name, ty) in s.ctx.bindings() {
        ctx = ctx.extend(name, ty.subst(&var, &unit));
    }
    let t = subst_type_in_term(&s.term, &var, &unit);
    let expected = s.ty.subst(&var, &unit);
    match synthesize(&ctx, &t) {
        Ok(ty) if type_equiv(&ty, &expected) => {}
        found => {
            let prop = format!("[{unit}/{var}] gives `{t}` typed {found:?}, expected {expected}");
            s.fail(SUBSTITUTION, Vec::new(), prop);
            return;
        }
    }
    let free = s.term.free_term_vars();
    let Some(x) = free.iter().collect::<Vec<_>>().choose(&mut rng).map(|x| (*x).clone()) else {
        return;
    };
    let u = s.ctx.lookup(&x).unwrap().clone();
    let basis = s
        .ctx
        .bindings()
        .iter()
        .filter(|(n, ty)| *ty == u && *n != x)
        .map(|(n, _)| Term::var(n.clone()))
        .chain(basis_of(s.ctx, &u))
        .collect::<Vec<_>>();
    let Some(b) = basis.choose(&mut rng) else { return };
    let t = match subst_term(&s.term, &x, b) {
        Ok(t) => t,
        Err(e) => {
            s.fail(SUBSTITUTION, Vec::new(), format!("[{b}/{x}] rejected: {e}"));
            return;
        }
    };
    match synthesize(s.ctx, &t) {
        Ok(ty) if type_equiv(&ty, &s.ty) => {}
        found => {
            let prop = format!("[{b}/{x}] gives `{t}` typed {found:?}, expected {}", s.ty);
            s.fail(SUBSTITUTION, Vec::new(), prop);
        }
    }
}

/// A closed-form basis inhabitant of `u` built from context variables,
/// when the shape allows one.
fn basis_of(ctx: &Context, u: &UnitType) -> Option<Term> {
    match u {
        UnitType::Var(_) => None,
        UnitType::Arrow(dom, cod) => {
            let body = Term::sum(
                cod.summands()
                    .iter()
                    .map(|c| match c {
                        _ if c == dom.as_ref() => Some(Term::var("z")),
                        _ => ctx.bindings().iter().find(|(n, t)| t == c && n != "z").map(|(n, _)| Term::var(n.clone())),
                    })
                    .collect::<Option<Vec<_>>>()?,
            );
            Some(Term::abs("z", (**dom).clone(), body))
        }
        UnitType::Forall(_, _) => None,
    }
}

fn sigma_typing(s: &mut Sample) {
    let a = sigma(&s.term);
    match a_synthesize(s.ctx, &a) {
        Ok(ty) if type_equiv(&ty, &s.ty) => {}
        found => {
            let prop = format!("sigma gives `{a}` typed {found:?}, expected {}", s.ty);
            s.fail(SIGMA_TYPING, Vec::new(), prop);
        }
    }
}

fn additive_square(s: &mut Sample, normal: &Term) {
    let (top, bottom) = (sigma(&s.term), sigma(normal));
    match lesssim(&top, &bottom, s.cfg.fuel) {
        Ok(true) => {}
        Ok(false) => {
            let prop = format!("normal form of `{top}` is not below `{bottom}`");
            s.fail(ADDITIVE_SQUARE, Vec::new(), prop);
        }
        Err(e) => s.fail(ADDITIVE_SQUARE, Vec::new(), format!("Additive reduction ran out of fuel at `{}`", e.0)),
    }
}

fn fp_square(s: &mut Sample, normal: &Term) {
    let mut translated = Vec::new();
    for t in [s.term.clone(), normal.clone()] {
        let a = sigma(&t);
        let d = match derive(s.ctx, &a) {
            Ok(d) => d,
            Err(e) => {
                s.fail(FP_SQUARE, Vec::new(), format!("no derivation for `{a}`: {e}"));
                return;
            }
        };
        if let Err(e) = f_check(&d) {
            s.fail(FP_SQUARE, Vec::new(), format!("translation of `{a}` does not type-check: {e}"));
            return;
        }
        translated.push((translate(&d), d.root.ty.ftype()));
    }
    let ((left, left_ty), (right, right_ty)) = (&translated[0], &translated[1]);
    // F reduction of the let-tuples costs more contractions than the source
    match f_lessapprox_any_layout(left, left_ty, right, right_ty, 10 * s.cfg.fuel) {
        Ok(true) => {}
        Ok(false) => {
            let prop = format!("`{left}` is not below `{right}` after F normalization");
            s.fail(FP_SQUARE, Vec::new(), prop);
        }
        Err(e) => s.fail(FP_SQUARE, Vec::new(), e.to_string()),
    }
}

fn monotone_precision(s: &mut Sample, normal: &Term) {
    match synthesize(s.ctx, normal) {
        Ok(ty) if precedes(&s.ty, &ty).is_ok() => {}
        found => {
            let prop = format!("{} does not precede the normal form's type {found:?}", s.ty);
            s.fail(MONOTONE_PRECISION, Vec::new(), prop);
        }
    }
}

/// Along a random path, each type precedes the next and the number of
/// summands never drops.
fn weight(s: &mut Sample) {
    let path = trace(&s.term, &Strategy::Random(s.seed), s.cfg.fuel);
    let mut prev = s.ty.clone();
    let mut seen = Vec::new();
    for r in &path.steps {
        seen.push((r.rule, r.term.clone()));
        let ty = match synthesize(s.ctx, &r.term) {
            Ok(ty) => ty,
            Err(e) => {
                s.fail_step(WEIGHT, show_trace(&s.term, &seen), format!("untypable reduct: {e}"), r.rule);
                return;
            }
        };
        if ty.len() < prev.len() || precedes(&prev, &ty).is_err() {
            s.fail_step(WEIGHT, show_trace(&s.term, &seen), format!("{prev} then {ty}"), r.rule);
            return;
        }
        prev = ty;
    }
}

//! Brute-force oracles: each order is computed as the least relation closed
//! under its defining rules over a bounded universe, and compared pair by
//! pair with the library's decision procedure.
//!
//! All three orders only relate a term to terms at least as large, so a
//! universe closed under taking components contains every intermediate step
//! of a derivation between two of its members and the closure is exact.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use crate::additive::{skel_sqleq, skel_sqleq_strict};
use crate::fsysp::order::{reduced_le, strict_le, unit_reduce};
use crate::fsysp::FSkel;
use crate::precision::precedes;
use crate::syntax::{Skel, TySkel, Type, UnitType};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub left: String,
    pub right: String,
    pub oracle: bool,
    pub decision: bool,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub name: String,
    pub universe: usize,
    pub pairs: usize,
    pub related: usize,
    pub rounds: usize,
    /// Distinct pairs related both ways by the closure.
    pub symmetric_pairs: Vec<(String, String)>,
    pub disagreements: Vec<Disagreement>,
    pub elapsed: Duration,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} terms, {} pairs, {} related, {} rounds, {} disagreements, {} symmetric pairs ({:.2?})",
            self.name,
            self.universe,
            self.pairs,
            self.related,
            self.rounds,
            self.disagreements.len(),
            self.symmetric_pairs.len(),
            self.elapsed
        )?;
        for d in self.disagreements.iter().take(10) {
            write!(f, "\n  {} vs {}: oracle {} decision {}", d.left, d.right, d.oracle, d.decision)?;
        }
        Ok(())
    }
}

/// Square boolean matrix, one bitset row per element.
struct BitRel {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitRel {
    fn new(n: usize) -> BitRel {
        let words = n.div_ceil(64);
        BitRel { n, words, bits: vec![0; n * words] }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// True when the bit was not set before.
    #[inline]
    fn set(&mut self, i: usize, j: usize) -> bool {
        let w = &mut self.bits[i * self.words + j / 64];
        let mask = 1u64 << (j % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    /// Warshall's algorithm on bitset rows.
    fn close(&mut self) {
        let w = self.words;
        let mut row_k = vec![0u64; w];
        for k in 0..self.n {
            row_k.copy_from_slice(&self.bits[k * w..(k + 1) * w]);
            for i in 0..self.n {
                if i != k && self.get(i, k) {
                    for (dst, src) in self.bits[i * w..(i + 1) * w].iter_mut().zip(&row_k) {
                        *dst |= src;
                    }
                }
            }
        }
    }

    fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Interns values, handing out dense indices.
struct Interner<T: std::hash::Hash + Eq + Clone> {
    items: Vec<T>,
    index: HashMap<T, usize>,
}

impl<T: std::hash::Hash + Eq + Clone> Interner<T> {
    fn new() -> Self {
        Interner { items: Vec::new(), index: HashMap::new() }
    }

    fn add(&mut self, t: T) -> (usize, bool) {
        if let Some(&i) = self.index.get(&t) {
            return (i, false);
        }
        self.items.push(t.clone());
        self.index.insert(t, self.items.len() - 1);
        (self.items.len() - 1, true)
    }

    fn get(&self, t: &T) -> Option<usize> {
        self.index.get(t).copied()
    }
}

/// Runs `round` until it adds nothing, closing transitively after each pass.
fn saturate(rel: &mut BitRel, mut round: impl FnMut(&mut BitRel) -> bool) -> usize {
    rel.close();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let changed = round(rel);
        rel.close();
        if !changed {
            return rounds;
        }
    }
}

fn compare<T>(
    name: &str,
    items: &[T],
    rel: &BitRel,
    rounds: usize,
    start: Instant,
    show: impl Fn(&T) -> String,
    mut decide: impl FnMut(usize, usize) -> bool,
) -> OracleReport {
    let mut disagreements = Vec::new();
    let mut symmetric_pairs = Vec::new();
    for i in 0..items.len() {
        for j in 0..items.len() {
            if i < j && rel.get(i, j) && rel.get(j, i) {
                symmetric_pairs.push((show(&items[i]), show(&items[j])));
            }
            let (oracle, decision) = (rel.get(i, j), decide(i, j));
            if oracle != decision {
                disagreements.push(Disagreement { left: show(&items[i]), right: show(&items[j]), oracle, decision });
            }
        }
    }
    OracleReport {
        name: name.to_string(),
        universe: items.len(),
        pairs: items.len() * items.len(),
        related: rel.count(),
        rounds,
        symmetric_pairs,
        disagreements,
        elapsed: start.elapsed(),
    }
}

/// Sub-multisets of `items` as ordered (chosen, rest) pairs, deduplicated.
fn splits<T: Clone + Ord>(items: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << items.len()) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (k, t) in items.iter().enumerate() {
            if mask >> k & 1 == 1 {
                a.push(t.clone());
            } else {
                b.push(t.clone());
            }
        }
        out.insert((a, b));
    }
    out.into_iter().collect()
}

// ---------------------------------------------------------------- precision

/// Nameless unit types. Variables 0 and 1 are the free `X` and `Y`; `2 + i`
/// is the de Bruijn index `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum OUnit {
    Var(u8),
    Arrow(Box<OUnit>, OType),
    Forall(Box<OUnit>),
}

/// Sorted multiset of unit types.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct OType(Vec<OUnit>);

fn ceil_log2(k: usize) -> usize {
    (usize::BITS - (k - 1).leading_zeros()) as usize
}

struct TypeGen {
    units: HashMap<(usize, u8), Vec<OUnit>>,
    types: HashMap<(usize, u8), Vec<OType>>,
}

impl TypeGen {
    fn units(&mut self, d: usize, binders: u8) -> Vec<OUnit> {
        if let Some(v) = self.units.get(&(d, binders)) {
            return v.clone();
        }
        let mut out: Vec<OUnit> = (0..2 + binders).map(OUnit::Var).collect();
        if d >= 2 {
            for dom in self.units(d - 1, binders) {
                for cod in self.types(d - 1, binders) {
                    out.push(OUnit::Arrow(Box::new(dom.clone()), cod));
                }
            }
            for body in self.units(d - 1, binders + 1) {
                out.push(OUnit::Forall(Box::new(body)));
            }
        }
        self.units.insert((d, binders), out.clone());
        out
    }

    /// Depth of a `k`-summand sum is its deepest summand plus `⌈log₂ k⌉`.
    fn types(&mut self, d: usize, binders: u8) -> Vec<OType> {
        if let Some(v) = self.types.get(&(d, binders)) {
            return v.clone();
        }
        let mut out = vec![OType(Vec::new())];
        let mut k = 1;
        while ceil_log2(k) < d {
            let pool = self.units(d - ceil_log2(k), binders);
            multisets(&pool, k, 0, &mut Vec::new(), &mut |m| out.push(OType(m.to_vec())));
            k += 1;
        }
        self.types.insert((d, binders), out.clone());
        out
    }
}

fn multisets<T: Clone + Ord>(pool: &[T], k: usize, from: usize, acc: &mut Vec<T>, emit: &mut impl FnMut(&[T])) {
    if k == 0 {
        let mut m = acc.clone();
        m.sort();
        emit(&m);
        return;
    }
    for i in from..pool.len() {
        acc.push(pool[i].clone());
        multisets(pool, k - 1, i, acc, emit);
        acc.pop();
    }
}

/// Binders are named by depth; indices pointing past the outermost binder
/// become free variables of their own.
fn unit_to_lib(u: &OUnit, depth: u8) -> UnitType {
    match u {
        OUnit::Var(0) => UnitType::var("X"),
        OUnit::Var(1) => UnitType::var("Y"),
        OUnit::Var(v) if v - 2 < depth => UnitType::var(format!("Z{}", depth - 1 - (v - 2))),
        OUnit::Var(v) => UnitType::var(format!("W{}", v - 2 - depth)),
        OUnit::Arrow(d, c) => UnitType::arrow(unit_to_lib(d, depth), type_to_lib(c, depth)),
        OUnit::Forall(b) => UnitType::forall(format!("Z{depth}"), unit_to_lib(b, depth + 1)),
    }
}

fn type_to_lib(t: &OType, depth: u8) -> Type {
    Type::from_summands(t.0.iter().map(|u| unit_to_lib(u, depth)))
}

/// `≼` by closure under Sub-Eq, Sub-Wk, Sub-Tr and Sub-Ctxt₁₋₃ on all types
/// of depth at most `max_depth` over `X`, `Y`, compared with [`precedes`].
pub fn precision_oracle(max_depth: usize) -> OracleReport {
    let start = Instant::now();
    let mut gen = TypeGen { units: HashMap::new(), types: HashMap::new() };
    let mut uni: Interner<OType> = Interner::new();
    let mut work = gen.types(max_depth, 0);
    while let Some(t) = work.pop() {
        if !uni.add(t.clone()).1 {
            continue;
        }
        for (a, _) in splits(&t.0) {
            work.push(OType(a));
        }
        for u in &t.0 {
            match u {
                OUnit::Arrow(d, c) => {
                    work.push(OType(vec![(**d).clone()]));
                    work.push(c.clone());
                }
                OUnit::Forall(b) => work.push(OType(vec![(**b).clone()])),
                OUnit::Var(_) => {}
            }
        }
    }
    let items = uni.items.clone();
    let n = items.len();
    let idx = |t: &OType| uni.get(t);
    let mut rel = BitRel::new(n);
    for (i, t) in items.iter().enumerate() {
        rel.set(i, i);
        // Sub-Wk: α.T ≼ β.T for α ≤ β
        let multiples: Vec<usize> = (0..)
            .map(|m| {
                let mut s: Vec<OUnit> = t.0.iter().cloned().cycle().take(m * t.0.len()).collect();
                s.sort();
                idx(&OType(s))
            })
            .take_while(|m| m.is_some())
            .map(Option::unwrap)
            .take(if t.0.is_empty() { 1 } else { usize::MAX })
            .collect();
        for a in 0..multiples.len() {
            for b in a..multiples.len() {
                rel.set(multiples[a], multiples[b]);
            }
        }
    }
    let sum_splits: Vec<Vec<(usize, usize)>> = items
        .iter()
        .map(|t| splits(&t.0).into_iter().map(|(a, b)| (idx(&OType(a)).unwrap(), idx(&OType(b)).unwrap())).collect())
        .collect();
    let arrows: Vec<(usize, usize, usize)> = items
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match t.0.as_slice() {
            [OUnit::Arrow(d, c)] => Some((i, idx(&OType(vec![(**d).clone()])).unwrap(), idx(c).unwrap())),
            _ => None,
        })
        .collect();
    let foralls: Vec<(usize, usize)> = items
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match t.0.as_slice() {
            [OUnit::Forall(b)] => Some((i, idx(&OType(vec![(**b).clone()])).unwrap())),
            _ => None,
        })
        .collect();
    let rounds = saturate(&mut rel, |rel| {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if rel.get(a, b) {
                    continue;
                }
                let ctxt1 = sum_splits[a]
                    .iter()
                    .any(|&(t1, s1)| sum_splits[b].iter().any(|&(t2, s2)| rel.get(t1, t2) && rel.get(s1, s2)));
                if ctxt1 {
                    changed |= rel.set(a, b);
                }
            }
        }
        for &(a, d1, c1) in &arrows {
            for &(b, d2, c2) in &arrows {
                if rel.get(d2, d1) && rel.get(c1, c2) {
                    changed |= rel.set(a, b);
                }
            }
        }
        for &(a, b1) in &foralls {
            for &(b, b2) in &foralls {
                if rel.get(b1, b2) {
                    changed |= rel.set(a, b);
                }
            }
        }
        changed
    });
    let lib: Vec<Type> = items.iter().map(|t| type_to_lib(t, 0)).collect();
    compare("precision", &lib, &rel, rounds, start, |t| t.to_string(), |i, j| precedes(&lib[i], &lib[j]).is_ok())
}

// ---------------------------------------------------------- variable pools

/// Which binder each of the two names `x`, `y` refers to, as a de Bruijn
/// index, or `None` when free.
type Visible = [Option<u8>; 2];

fn under_binder(vis: Visible, name: usize) -> Visible {
    let mut out = vis.map(|v| v.map(|i| i + 1));
    out[name] = Some(0);
    out
}

// ----------------------------------------------------------------- additive

/// Nameless Additive terms over the names `x`, `y`, with every annotation `X`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum OA {
    Zero,
    Free(u8),
    Bound(u8),
    Lam(Box<OA>),
    TLam(Box<OA>),
    App(Box<OA>, Box<OA>),
    TApp(Box<OA>),
    /// Sorted, at least two summands, none of them a sum.
    Sum(Vec<OA>),
}

impl OA {
    fn summands(&self, unit_law: bool) -> Vec<OA> {
        match self {
            OA::Sum(items) => items.clone(),
            OA::Zero if unit_law => Vec::new(),
            other => vec![other.clone()],
        }
    }

    fn from_summands(mut items: Vec<OA>, unit_law: bool) -> OA {
        if unit_law {
            items.retain(|t| *t != OA::Zero);
        }
        items.sort();
        match items.len() {
            0 => OA::Zero,
            1 => items.pop().unwrap(),
            _ => OA::Sum(items),
        }
    }

    fn to_skel(&self) -> Skel {
        let x = || TySkel::Free("X".to_string());
        match self {
            OA::Zero => Skel::Zero,
            OA::Free(v) => Skel::Free(["x", "y"][*v as usize].to_string()),
            OA::Bound(i) => Skel::Bound(*i as usize),
            OA::Lam(b) => Skel::Abs(x(), Box::new(b.to_skel())),
            OA::TLam(b) => Skel::TyAbs(Box::new(b.to_skel())),
            OA::App(f, a) => Skel::App(Box::new(f.to_skel()), Box::new(a.to_skel())),
            OA::TApp(f) => Skel::TyApp(Box::new(f.to_skel()), x()),
            OA::Sum(items) => Skel::Sum(items.iter().map(OA::to_skel).collect()),
        }
    }
}

impl fmt::Display for OA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OA::Zero => write!(f, "zero"),
            OA::Free(v) => write!(f, "{}", ["x", "y"][*v as usize]),
            OA::Bound(i) => write!(f, "#{i}"),
            OA::Lam(b) => write!(f, "(\\:X. {b})"),
            OA::TLam(b) => write!(f, "(/\\. {b})"),
            OA::App(g, a) => write!(f, "({g} {a})"),
            OA::TApp(g) => write!(f, "({g} @ X)"),
            OA::Sum(items) => {
                let parts: Vec<String> = items.iter().map(OA::to_string).collect();
                write!(f, "({})", parts.join(" + "))
            }
        }
    }
}

struct AdditiveGen {
    unit_law: bool,
    memo: HashMap<(usize, Visible), Vec<OA>>,
    atoms: HashMap<(usize, Visible), Vec<OA>>,
}

impl AdditiveGen {
    /// Non-sum terms of exactly `size`.
    fn atoms(&mut self, size: usize, vis: Visible) -> Vec<OA> {
        if let Some(v) = self.atoms.get(&(size, vis)) {
            return v.clone();
        }
        let mut out = BTreeSet::new();
        if size == 1 {
            for (name, v) in vis.iter().enumerate() {
                out.insert(v.map_or(OA::Free(name as u8), OA::Bound));
            }
            if !self.unit_law {
                out.insert(OA::Zero);
            }
        } else {
            for name in 0..2 {
                for b in self.terms(size - 1, under_binder(vis, name)) {
                    out.insert(OA::Lam(Box::new(b)));
                }
            }
            for b in self.terms(size - 1, vis) {
                out.insert(OA::TLam(Box::new(b.clone())));
                out.insert(OA::TApp(Box::new(b)));
            }
            for i in 1..size - 1 {
                for f in self.terms(i, vis) {
                    for a in self.terms(size - 1 - i, vis) {
                        out.insert(OA::App(Box::new(f.clone()), Box::new(a)));
                    }
                }
            }
        }
        let out: Vec<OA> = out.into_iter().collect();
        self.atoms.insert((size, vis), out.clone());
        out
    }

    /// All terms of exactly `size`.
    fn terms(&mut self, size: usize, vis: Visible) -> Vec<OA> {
        if let Some(v) = self.memo.get(&(size, vis)) {
            return v.clone();
        }
        let mut out: BTreeSet<OA> = self.atoms(size, vis).into_iter().collect();
        if size == 1 {
            out.insert(OA::Zero);
        }
        // k summands cost k - 1 plus their sizes
        let pool: Vec<(OA, usize)> =
            (1..size).flat_map(|s| self.atoms(s, vis).into_iter().map(move |a| (a, s))).collect();
        for k in 2..=size {
            if 2 * k - 1 > size {
                break;
            }
            sized_multisets(&pool, k, size + 1 - k, 0, &mut Vec::new(), &mut |m| {
                out.insert(OA::Sum(m.to_vec()));
            });
        }
        let out: Vec<OA> = out.into_iter().collect();
        self.memo.insert((size, vis), out.clone());
        out
    }
}

fn sized_multisets<T: Clone + Ord>(
    pool: &[(T, usize)],
    k: usize,
    budget: usize,
    from: usize,
    acc: &mut Vec<T>,
    emit: &mut impl FnMut(&[T]),
) {
    if k == 0 {
        if budget == 0 {
            let mut m = acc.clone();
            m.sort();
            emit(&m);
        }
        return;
    }
    for i in from..pool.len() {
        let (t, s) = &pool[i];
        if *s <= budget {
            acc.push(t.clone());
            sized_multisets(pool, k - 1, budget - s, i, acc, emit);
            acc.pop();
        }
    }
}

/// `⊑` on Additive terms of size at most `max_size`, by closure under its
/// clauses. With `unit_law`, `0` is the empty sum (the reading the library's
/// [`skel_sqleq`] decides); without it, `t + 0` and `t` are distinct terms
/// and the comparison is against [`skel_sqleq_strict`].
pub fn additive_oracle(max_size: usize, unit_law: bool) -> OracleReport {
    let start = Instant::now();
    let mut gen = AdditiveGen { unit_law, memo: HashMap::new(), atoms: HashMap::new() };
    let mut work: Vec<OA> = (1..=max_size).flat_map(|s| gen.terms(s, [None, None])).collect();
    let mut uni: Interner<OA> = Interner::new();
    while let Some(t) = work.pop() {
        if !uni.add(t.clone()).1 {
            continue;
        }
        match &t {
            OA::Lam(b) | OA::TLam(b) | OA::TApp(b) => work.push((**b).clone()),
            OA::App(f, a) => {
                work.push((**f).clone());
                work.push((**a).clone());
            }
            OA::Sum(items) => {
                for (a, _) in splits(items) {
                    work.push(OA::from_summands(a, unit_law));
                }
            }
            _ => {}
        }
    }
    let items = uni.items.clone();
    let n = items.len();
    let idx = |t: &OA| uni.get(t);
    let mut rel = BitRel::new(n);
    let zero = idx(&OA::Zero);
    for (i, t) in items.iter().enumerate() {
        rel.set(i, i);
        // Σ^α t ⊑ Σ^β t for α ≤ β; the empty sum is `0`
        let base = t.summands(unit_law);
        let mut multiples = vec![zero];
        for m in 1.. {
            let s = OA::from_summands(base.iter().cloned().cycle().take(m * base.len()).collect(), unit_law);
            match idx(&s) {
                Some(j) if m == 1 || s != *t => multiples.push(Some(j)),
                _ => break,
            }
            if base.is_empty() {
                break;
            }
        }
        let multiples: Vec<usize> = multiples.into_iter().flatten().collect();
        for a in 0..multiples.len() {
            for b in a..multiples.len() {
                rel.set(multiples[a], multiples[b]);
            }
        }
    }
    // t + r ⊑ t' + r' with all four parts nonempty; under the unit law the
    // instances with an empty part amount to `part ⊑ whole`
    let mut sum_splits: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, t) in items.iter().enumerate() {
        if let OA::Sum(parts) = t {
            for (a, b) in splits(parts) {
                if a.is_empty() || b.is_empty() {
                    continue;
                }
                let (a, b) = (OA::from_summands(a, unit_law), OA::from_summands(b, unit_law));
                let (ia, ib) = (idx(&a).unwrap(), idx(&b).unwrap());
                sum_splits[i].push((ia, ib));
                if unit_law {
                    rel.set(ia, i);
                }
            }
        }
    }
    let sums: Vec<usize> = (0..n).filter(|&i| !sum_splits[i].is_empty()).collect();
    let by_ctor = |pick: fn(&OA) -> Option<(&OA, Option<&OA>)>| -> Vec<(usize, usize, Option<usize>)> {
        items
            .iter()
            .enumerate()
            .filter_map(|(i, t)| pick(t).map(|(a, b)| (i, idx(a).unwrap(), b.map(|b| idx(b).unwrap()))))
            .collect()
    };
    let groups = [
        by_ctor(|t| if let OA::Lam(b) = t { Some((b, None)) } else { None }),
        by_ctor(|t| if let OA::TLam(b) = t { Some((b, None)) } else { None }),
        by_ctor(|t| if let OA::TApp(b) = t { Some((b, None)) } else { None }),
        by_ctor(|t| if let OA::App(f, a) = t { Some((f, Some(a))) } else { None }),
    ];
    let rounds = saturate(&mut rel, |rel| {
        let mut changed = false;
        for group in &groups {
            congruence(rel, group, &mut changed);
        }
        for &p in &sums {
            for &q in &sums {
                if rel.get(p, q) {
                    continue;
                }
                let hit = sum_splits[p]
                    .iter()
                    .any(|&(t1, s1)| sum_splits[q].iter().any(|&(t2, s2)| rel.get(t1, t2) && rel.get(s1, s2)));
                if hit {
                    changed |= rel.set(p, q);
                }
            }
        }
        changed
    });
    let skels: Vec<Skel> = items.iter().map(OA::to_skel).collect();
    let name = if unit_law { "additive order" } else { "additive order, strict" };
    compare(name, &items, &rel, rounds, start, OA::to_string, |i, j| {
        if unit_law {
            skel_sqleq(&skels[i], &skels[j])
        } else {
            skel_sqleq_strict(&skels[i], &skels[j])
        }
    })
}

/// One- and two-argument congruence over terms sharing a constructor.
fn congruence(rel: &mut BitRel, group: &[(usize, usize, Option<usize>)], changed: &mut bool) {
    for &(p, a1, b1) in group {
        for &(q, a2, b2) in group {
            if rel.get(p, q) || !rel.get(a1, a2) {
                continue;
            }
            let second = match (b1, b2) {
                (Some(x), Some(y)) => rel.get(x, y),
                _ => true,
            };
            if second {
                *changed |= rel.set(p, q);
            }
        }
    }
}

// ------------------------------------------------------------- F with pairs

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum OF {
    Free(u8),
    Bound(u8),
    Star,
    Lam(Box<OF>),
    App(Box<OF>, Box<OF>),
    Pair(Box<OF>, Box<OF>),
    P1(Box<OF>),
    P2(Box<OF>),
}

impl OF {
    fn to_skel(&self) -> FSkel {
        match self {
            OF::Free(v) => FSkel::Free(["x", "y"][*v as usize].to_string()),
            OF::Bound(i) => FSkel::Bound(*i as usize),
            OF::Star => FSkel::Star,
            OF::Lam(b) => FSkel::Lam(Box::new(b.to_skel())),
            OF::App(a, b) => FSkel::App(Box::new(a.to_skel()), Box::new(b.to_skel())),
            OF::Pair(a, b) => FSkel::Pair(Box::new(a.to_skel()), Box::new(b.to_skel())),
            OF::P1(a) => FSkel::Proj1(Box::new(a.to_skel())),
            OF::P2(a) => FSkel::Proj2(Box::new(a.to_skel())),
        }
    }
}

impl fmt::Display for OF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OF::Free(v) => write!(f, "{}", ["x", "y"][*v as usize]),
            OF::Bound(i) => write!(f, "#{i}"),
            OF::Star => write!(f, "*"),
            OF::Lam(b) => write!(f, "(\\. {b})"),
            OF::App(a, b) => write!(f, "({a} {b})"),
            OF::Pair(a, b) => write!(f, "({a}, {b})"),
            OF::P1(a) => write!(f, "(p1 {a})"),
            OF::P2(a) => write!(f, "(p2 {a})"),
        }
    }
}

struct FGen {
    unit_law: bool,
    memo: HashMap<(usize, Visible), Vec<OF>>,
}

impl FGen {
    fn terms(&mut self, size: usize, vis: Visible) -> Vec<OF> {
        if let Some(v) = self.memo.get(&(size, vis)) {
            return v.clone();
        }
        let mut out = BTreeSet::new();
        if size == 1 {
            for (name, v) in vis.iter().enumerate() {
                out.insert(v.map_or(OF::Free(name as u8), OF::Bound));
            }
            out.insert(OF::Star);
        } else {
            for name in 0..2 {
                for b in self.terms(size - 1, under_binder(vis, name)) {
                    out.insert(OF::Lam(Box::new(b)));
                }
            }
            for b in self.terms(size - 1, vis) {
                out.insert(OF::P1(Box::new(b.clone())));
                out.insert(OF::P2(Box::new(b)));
            }
            for i in 1..size - 1 {
                for a in self.terms(i, vis) {
                    for b in self.terms(size - 1 - i, vis) {
                        out.insert(OF::App(Box::new(a.clone()), Box::new(b.clone())));
                        if !self.unit_law || (a != OF::Star && b != OF::Star) {
                            out.insert(OF::Pair(Box::new(a.clone()), Box::new(b)));
                        }
                    }
                }
            }
        }
        let out: Vec<OF> = out.into_iter().collect();
        self.memo.insert((size, vis), out.clone());
        out
    }
}

/// `⊑_F` on F terms of size at most `max_size`, by closure under `⋆ ⊑ t`,
/// `t ⊑ (t, t)`, reflexivity, congruences and transitivity. With `unit_law`
/// the universe is taken modulo `(t, ⋆) = (⋆, t) = t` and compared with the
/// library's unit-law decision; without it, with the literal one.
pub fn f_order_oracle(max_size: usize, unit_law: bool) -> OracleReport {
    let start = Instant::now();
    let mut gen = FGen { unit_law, memo: HashMap::new() };
    let mut work: Vec<OF> = (1..=max_size).flat_map(|s| gen.terms(s, [None, None])).collect();
    let mut uni: Interner<OF> = Interner::new();
    while let Some(t) = work.pop() {
        if !uni.add(t.clone()).1 {
            continue;
        }
        match &t {
            OF::Lam(b) | OF::P1(b) | OF::P2(b) => work.push((**b).clone()),
            OF::App(a, b) | OF::Pair(a, b) => {
                work.push((**a).clone());
                work.push((**b).clone());
            }
            _ => {}
        }
    }
    let items = uni.items.clone();
    let n = items.len();
    let idx = |t: &OF| uni.get(t).unwrap();
    let star = idx(&OF::Star);
    let mut rel = BitRel::new(n);
    for (i, t) in items.iter().enumerate() {
        rel.set(i, i);
        rel.set(star, i);
        if let Some(j) = uni.get(&OF::Pair(Box::new(t.clone()), Box::new(t.clone()))) {
            rel.set(i, j);
        }
        if let (true, OF::Pair(a, b)) = (unit_law, t) {
            // (a, ⋆) ⊑ (a, b) and (⋆, b) ⊑ (a, b), read through the unit law
            rel.set(idx(a), i);
            rel.set(idx(b), i);
        }
    }
    let by_ctor = |pick: fn(&OF) -> Option<(&OF, Option<&OF>)>| -> Vec<(usize, usize, Option<usize>)> {
        items
            .iter()
            .enumerate()
            .filter_map(|(i, t)| pick(t).map(|(a, b)| (i, idx(a), b.map(idx))))
            .collect()
    };
    let groups = [
        by_ctor(|t| if let OF::Lam(b) = t { Some((b, None)) } else { None }),
        by_ctor(|t| if let OF::P1(b) = t { Some((b, None)) } else { None }),
        by_ctor(|t| if let OF::P2(b) = t { Some((b, None)) } else { None }),
        by_ctor(|t| if let OF::App(a, b) = t { Some((a, Some(b))) } else { None }),
        by_ctor(|t| if let OF::Pair(a, b) = t { Some((a, Some(b))) } else { None }),
    ];
    let rounds = saturate(&mut rel, |rel| {
        let mut changed = false;
        for group in &groups {
            congruence(rel, group, &mut changed);
        }
        changed
    });
    let skels: Vec<FSkel> = items.iter().map(OF::to_skel).collect();
    if unit_law {
        assert!(skels.iter().all(|s| unit_reduce(s) == *s), "universe is unit-reduced");
    }
    let name = if unit_law { "F order" } else { "F order, strict" };
    compare(name, &items, &rel, rounds, start, OF::to_string, |i, j| {
        if unit_law {
            reduced_le(&skels[i], &skels[j])
        } else {
            strict_le(&skels[i], &skels[j])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_closure_agrees_at_depth_two() {
        let r = precision_oracle(2);
        assert!(r.passed(), "{r}");
        assert!(r.universe > 10);
    }

    #[test]
    fn additive_closure_agrees_on_small_terms() {
        for unit_law in [true, false] {
            let r = additive_oracle(4, unit_law);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn f_closure_agrees_on_small_terms() {
        for unit_law in [true, false] {
            let r = f_order_oracle(4, unit_law);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn bit_relation_closes_transitively() {
        let mut r = BitRel::new(70);
        for i in 0..69 {
            r.set(i, i + 1);
        }
        r.close();
        assert!(r.get(0, 69));
        assert!(!r.get(69, 0));
    }
}

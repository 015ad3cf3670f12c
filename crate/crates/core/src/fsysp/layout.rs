//! Type layouts: λ_CA types before canonicalization. A layout fixes the
//! bracketing and order of every sum, which is exactly what the translation
//! into products has to know. `≡` steps between layouts are [`Move`]s.

use std::fmt;

use super::term::FType;
use crate::syntax::{Type, UnitType};

#[derive(Debug, Clone)]
pub enum Layout {
    Zero,
    Var(String),
    Arrow(Box<Layout>, Box<Layout>),
    Forall(String, Box<Layout>),
    Plus(Box<Layout>, Box<Layout>),
}

/// One step into a layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pos {
    PlusLeft,
    PlusRight,
    ArrowDom,
    ArrowCod,
    ForallBody,
}

/// A single `≡` step at the root of a sub-layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// `0 + A ~> A`
    DropUnitLeft,
    /// `A + 0 ~> A`
    DropUnitRight,
    /// `A ~> 0 + A`
    AddUnitLeft,
    /// `A ~> A + 0`
    AddUnitRight,
    /// `A + B ~> B + A`
    Swap,
    /// `A + (B + C) ~> (A + B) + C`
    ReassocLeft,
    /// `(A + B) + C ~> A + (B + C)`
    ReassocRight,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub at: Vec<Pos>,
    pub kind: MoveKind,
}

impl MoveKind {
    pub fn inverse(self) -> MoveKind {
        match self {
            MoveKind::DropUnitLeft => MoveKind::AddUnitLeft,
            MoveKind::DropUnitRight => MoveKind::AddUnitRight,
            MoveKind::AddUnitLeft => MoveKind::DropUnitLeft,
            MoveKind::AddUnitRight => MoveKind::DropUnitRight,
            MoveKind::Swap => MoveKind::Swap,
            MoveKind::ReassocLeft => MoveKind::ReassocRight,
            MoveKind::ReassocRight => MoveKind::ReassocLeft,
        }
    }

    fn apply(self, l: &Layout) -> Option<Layout> {
        use Layout::Plus;
        Some(match (self, l) {
            (MoveKind::DropUnitLeft, Plus(a, b)) if matches!(**a, Layout::Zero) => (**b).clone(),
            (MoveKind::DropUnitRight, Plus(a, b)) if matches!(**b, Layout::Zero) => (**a).clone(),
            (MoveKind::AddUnitLeft, a) => Layout::plus(Layout::Zero, a.clone()),
            (MoveKind::AddUnitRight, a) => Layout::plus(a.clone(), Layout::Zero),
            (MoveKind::Swap, Plus(a, b)) => Layout::plus((**b).clone(), (**a).clone()),
            (MoveKind::ReassocLeft, Plus(a, bc)) => match bc.as_ref() {
                Plus(b, c) => Layout::plus(Layout::plus((**a).clone(), (**b).clone()), (**c).clone()),
                _ => return None,
            },
            (MoveKind::ReassocRight, Plus(ab, c)) => match ab.as_ref() {
                Plus(a, b) => Layout::plus((**a).clone(), Layout::plus((**b).clone(), (**c).clone())),
                _ => return None,
            },
            _ => return None,
        })
    }
}

impl Move {
    pub fn new(at: Vec<Pos>, kind: MoveKind) -> Move {
        Move { at, kind }
    }

    /// `None` if the move does not match the layout.
    pub fn apply(&self, l: &Layout) -> Option<Layout> {
        l.replace_at(&self.at, |sub| self.kind.apply(sub))
    }
}

impl Layout {
    pub fn plus(a: Layout, b: Layout) -> Layout {
        Layout::Plus(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Layout, b: Layout) -> Layout {
        Layout::Arrow(Box::new(a), Box::new(b))
    }

    /// Left comb of the given layouts; `Zero` when empty.
    pub fn comb(items: impl IntoIterator<Item = Layout>) -> Layout {
        items.into_iter().reduce(Layout::plus).unwrap_or(Layout::Zero)
    }

    pub fn of_unit(u: &UnitType) -> Layout {
        match u {
            UnitType::Var(x) => Layout::Var(x.clone()),
            UnitType::Arrow(d, c) => Layout::arrow(Layout::of_unit(d), Layout::of_type(c)),
            UnitType::Forall(x, b) => Layout::Forall(x.clone(), Box::new(Layout::of_unit(b))),
        }
    }

    /// The canonical layout of a type: a left comb of its summands in order.
    pub fn of_type(t: &Type) -> Layout {
        Layout::comb(t.summands().iter().map(Layout::of_unit))
    }

    pub fn to_type(&self) -> Type {
        match self {
            Layout::Zero => Type::zero(),
            Layout::Plus(a, b) => a.to_type().plus(&b.to_type()),
            _ => Type::unit(self.to_unit().expect("non-sum layout")),
        }
    }

    pub fn to_unit(&self) -> Option<UnitType> {
        match self {
            Layout::Var(x) => Some(UnitType::var(x.clone())),
            Layout::Arrow(d, c) => Some(UnitType::arrow(d.to_unit()?, c.to_type())),
            Layout::Forall(x, b) => Some(UnitType::forall(x.clone(), b.to_unit()?)),
            Layout::Zero | Layout::Plus(..) => None,
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == Layout::of_type(&self.to_type())
    }

    /// Products for sums, `1` for the zero type.
    pub fn ftype(&self) -> FType {
        match self {
            Layout::Zero => FType::One,
            Layout::Var(x) => FType::var(x.clone()),
            Layout::Arrow(a, b) => FType::arrow(a.ftype(), b.ftype()),
            Layout::Forall(x, a) => FType::forall(x.clone(), a.ftype()),
            Layout::Plus(a, b) => FType::prod(a.ftype(), b.ftype()),
        }
    }

    /// Syntactic `self[v/x]`; sums inside `v` keep their layout.
    pub fn subst(&self, x: &str, v: &Layout) -> Layout {
        match self {
            Layout::Var(y) if y == x => v.clone(),
            Layout::Var(_) | Layout::Zero => self.clone(),
            Layout::Arrow(a, b) => Layout::arrow(a.subst(x, v), b.subst(x, v)),
            Layout::Plus(a, b) => Layout::plus(a.subst(x, v), b.subst(x, v)),
            Layout::Forall(y, _) if y == x => self.clone(),
            Layout::Forall(y, b) => {
                let vfv = v.ftype().free_vars();
                if vfv.contains(y) && b.ftype().free_vars().contains(x) {
                    let mut avoid = vfv;
                    avoid.extend(b.ftype().free_vars());
                    avoid.insert(x.to_string());
                    let fresh = crate::syntax::fresh_name(y, &avoid);
                    let renamed = b.subst(y, &Layout::Var(fresh.clone()));
                    Layout::Forall(fresh, Box::new(renamed.subst(x, v)))
                } else {
                    Layout::Forall(y.clone(), Box::new(b.subst(x, v)))
                }
            }
        }
    }

    pub fn at(&self, path: &[Pos]) -> Option<&Layout> {
        let Some((first, rest)) = path.split_first() else {
            return Some(self);
        };
        match (first, self) {
            (Pos::PlusLeft, Layout::Plus(a, _)) | (Pos::PlusRight, Layout::Plus(_, a)) => a.at(rest),
            (Pos::ArrowDom, Layout::Arrow(a, _)) | (Pos::ArrowCod, Layout::Arrow(_, a)) => a.at(rest),
            (Pos::ForallBody, Layout::Forall(_, a)) => a.at(rest),
            _ => None,
        }
    }

    fn replace_at(&self, path: &[Pos], f: impl FnOnce(&Layout) -> Option<Layout>) -> Option<Layout> {
        let Some((first, rest)) = path.split_first() else {
            return f(self);
        };
        Some(match (first, self) {
            (Pos::PlusLeft, Layout::Plus(a, b)) => Layout::plus(a.replace_at(rest, f)?, (**b).clone()),
            (Pos::PlusRight, Layout::Plus(a, b)) => Layout::plus((**a).clone(), b.replace_at(rest, f)?),
            (Pos::ArrowDom, Layout::Arrow(a, b)) => Layout::arrow(a.replace_at(rest, f)?, (**b).clone()),
            (Pos::ArrowCod, Layout::Arrow(a, b)) => Layout::arrow((**a).clone(), b.replace_at(rest, f)?),
            (Pos::ForallBody, Layout::Forall(x, a)) => Layout::Forall(x.clone(), Box::new(a.replace_at(rest, f)?)),
            _ => return None,
        })
    }

    fn is_sum_node(&self) -> bool {
        matches!(self, Layout::Zero | Layout::Plus(..))
    }
}

/// Structural equality up to renaming of bound type variables.
impl PartialEq for Layout {
    fn eq(&self, other: &Self) -> bool {
        self.ftype() == other.ftype()
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layout::Zero => write!(f, "Zero"),
            Layout::Var(x) => write!(f, "{x}"),
            Layout::Arrow(a, b) => {
                match a.as_ref() {
                    Layout::Arrow(..) | Layout::Forall(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " -> ")?;
                match b.as_ref() {
                    Layout::Plus(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Layout::Forall(x, a) => write!(f, "forall {x}. {a}"),
            Layout::Plus(a, b) => {
                write!(f, "{a} + ")?;
                match b.as_ref() {
                    Layout::Plus(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pos::PlusLeft => "l",
            Pos::PlusRight => "r",
            Pos::ArrowDom => "dom",
            Pos::ArrowCod => "cod",
            Pos::ForallBody => "all",
        };
        f.write_str(s)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@", self.kind)?;
        if self.at.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.at.iter().map(Pos::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Moves that turn `from` into the canonical layout of its type.
pub fn canonicalize(from: &Layout) -> Vec<Move> {
    let mut moves = Vec::new();
    let mut cur = from.clone();
    normalize_at(&mut cur, &mut Vec::new(), &mut moves);
    debug_assert!(cur == Layout::of_type(&from.to_type()), "{cur} from {from}");
    moves
}

/// Moves that relate two layouts of the same type, through the canonical one.
pub fn relate(from: &Layout, to: &Layout) -> Vec<Move> {
    let mut moves = canonicalize(from);
    let mut back = canonicalize(to);
    back.reverse();
    moves.extend(back.into_iter().map(|m| Move::new(m.at, m.kind.inverse())));
    moves
}

pub fn apply_all(l: &Layout, moves: &[Move]) -> Option<Layout> {
    moves.iter().try_fold(l.clone(), |acc, m| m.apply(&acc))
}

fn push(cur: &mut Layout, moves: &mut Vec<Move>, at: Vec<Pos>, kind: MoveKind) {
    let m = Move::new(at, kind);
    *cur = m.apply(cur).expect("move matches the current layout");
    moves.push(m);
}

fn sub<'a>(cur: &'a Layout, path: &[Pos]) -> &'a Layout {
    cur.at(path).expect("path inside layout")
}

fn with(path: &[Pos], more: &[Pos]) -> Vec<Pos> {
    let mut p = path.to_vec();
    p.extend_from_slice(more);
    p
}

fn normalize_at(cur: &mut Layout, path: &mut Vec<Pos>, moves: &mut Vec<Move>) {
    match sub(cur, path).clone() {
        Layout::Zero | Layout::Var(_) => {}
        Layout::Arrow(..) => {
            for p in [Pos::ArrowDom, Pos::ArrowCod] {
                path.push(p);
                normalize_at(cur, path, moves);
                path.pop();
            }
        }
        Layout::Forall(..) => {
            path.push(Pos::ForallBody);
            normalize_at(cur, path, moves);
            path.pop();
        }
        Layout::Plus(..) => {
            normalize_leaves(cur, path, moves);
            drop_units(cur, path, moves);
            to_left_comb(cur, path, moves);
            sort_comb(cur, path, moves);
        }
    }
}

fn normalize_leaves(cur: &mut Layout, path: &mut Vec<Pos>, moves: &mut Vec<Move>) {
    if let Layout::Plus(..) = sub(cur, path) {
        for p in [Pos::PlusLeft, Pos::PlusRight] {
            path.push(p);
            normalize_leaves(cur, path, moves);
            path.pop();
        }
    } else {
        normalize_at(cur, path, moves);
    }
}

/// Removes every `0` summand of the sum tree at `path`, leaving a lone `0`
/// only when the whole tree is zero.
fn drop_units(cur: &mut Layout, path: &[Pos], moves: &mut Vec<Move>) {
    while let Some((at, kind)) = find_unit(sub(cur, path), path.to_vec()) {
        push(cur, moves, at, kind);
    }
}

fn find_unit(l: &Layout, at: Vec<Pos>) -> Option<(Vec<Pos>, MoveKind)> {
    let Layout::Plus(a, b) = l else { return None };
    if matches!(**a, Layout::Zero) {
        return Some((at, MoveKind::DropUnitLeft));
    }
    if matches!(**b, Layout::Zero) {
        return Some((at, MoveKind::DropUnitRight));
    }
    find_unit(a, with(&at, &[Pos::PlusLeft])).or_else(|| find_unit(b, with(&at, &[Pos::PlusRight])))
}

fn to_left_comb(cur: &mut Layout, path: &[Pos], moves: &mut Vec<Move>) {
    while let Some(at) = find_right_nest(sub(cur, path), path.to_vec()) {
        push(cur, moves, at, MoveKind::ReassocLeft);
    }
}

fn find_right_nest(l: &Layout, at: Vec<Pos>) -> Option<Vec<Pos>> {
    let Layout::Plus(a, b) = l else { return None };
    if matches!(**b, Layout::Plus(..)) {
        return Some(at);
    }
    find_right_nest(a, with(&at, &[Pos::PlusLeft]))
}

pub(crate) fn comb_leaves(l: &Layout) -> Vec<&Layout> {
    match l {
        Layout::Plus(a, b) => {
            let mut v = comb_leaves(a);
            v.push(b);
            v
        }
        other => vec![other],
    }
}

/// Bubble sort of the comb's leaves by the key `Type` sorts summands with.
fn sort_comb(cur: &mut Layout, path: &[Pos], moves: &mut Vec<Move>) {
    let n = comb_leaves(sub(cur, path)).len();
    if n < 2 {
        return;
    }
    loop {
        let keys: Vec<_> = comb_leaves(sub(cur, path))
            .iter()
            .map(|l| {
                debug_assert!(!l.is_sum_node());
                l.to_unit().expect("unit leaf").skeleton()
            })
            .collect();
        let Some(k) = (0..n - 1).find(|&k| keys[k] > keys[k + 1]) else {
            return;
        };
        // node whose right child is leaf k + 1 sits n - 1 - (k + 1) steps down the spine
        let node = with(path, &vec![Pos::PlusLeft; n - 2 - k]);
        if k == 0 {
            push(cur, moves, node, MoveKind::Swap);
        } else {
            push(cur, moves, node.clone(), MoveKind::ReassocRight);
            push(cur, moves, with(&node, &[Pos::PlusRight]), MoveKind::Swap);
            push(cur, moves, node, MoveKind::ReassocLeft);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_type;

    fn v(x: &str) -> Layout {
        Layout::Var(x.into())
    }

    fn check(l: Layout) {
        let moves = canonicalize(&l);
        let out = apply_all(&l, &moves).unwrap();
        assert_eq!(out, Layout::of_type(&l.to_type()), "{l}");
        assert!(out.is_canonical());
    }

    #[test]
    fn canonical_layout_is_a_left_comb() {
        let t = parse_type("C + A + B").unwrap();
        assert_eq!(Layout::of_type(&t).to_string(), "A + B + C");
        assert_eq!(Layout::of_type(&t).ftype().to_string(), "A * B * C");
        assert_eq!(Layout::of_type(&Type::zero()).ftype(), FType::One);
    }

    #[test]
    fn moves_reach_the_canonical_layout() {
        check(Layout::plus(v("C"), Layout::plus(v("B"), v("A"))));
        check(Layout::plus(Layout::Zero, Layout::plus(v("B"), Layout::Zero)));
        check(Layout::plus(Layout::Zero, Layout::Zero));
        check(Layout::plus(
            Layout::plus(v("D"), v("A")),
            Layout::plus(Layout::arrow(v("X"), Layout::plus(v("Z"), v("Y"))), v("B")),
        ));
        check(Layout::Forall(
            "X".into(),
            Box::new(Layout::arrow(Layout::arrow(v("X"), Layout::plus(v("B"), v("A"))), Layout::Zero)),
        ));
    }

    #[test]
    fn inverse_moves_undo() {
        let l = Layout::plus(v("B"), Layout::plus(v("A"), Layout::Zero));
        let to = Layout::plus(Layout::Zero, Layout::plus(v("B"), v("A")));
        let moves = relate(&l, &to);
        assert_eq!(apply_all(&l, &moves).unwrap(), to);
    }

    #[test]
    fn mismatched_moves_are_rejected() {
        assert!(Move::new(vec![], MoveKind::Swap).apply(&v("A")).is_none());
        assert!(Move::new(vec![Pos::ArrowDom], MoveKind::AddUnitLeft).apply(&v("A")).is_none());
    }
}

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::fresh_name;
use super::scalar::Scalar;
use super::types::{TySkel, UnitType};

/// A λ_CA term. Names are kept for printing; comparisons go through
/// [`Skel`], the nameless view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Abs(String, UnitType, Box<Term>),
    TyAbs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    TyApp(Box<Term>, UnitType),
    Zero,
    Scaled(Scalar, Box<Term>),
    /// At least two summands, none of them a `Sum`, once canonical.
    Sum(Vec<Term>),
}

/// Nameless view of a term, with sums flattened and sorted. Two terms are
/// α-equivalent modulo AC exactly when their skeletons are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Skel {
    Bound(usize),
    Free(String),
    Zero,
    Abs(TySkel, Box<Skel>),
    TyAbs(Box<Skel>),
    App(Box<Skel>, Box<Skel>),
    TyApp(Box<Skel>, TySkel),
    Scaled(Scalar, Box<Skel>),
    Sum(Vec<Skel>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("only basis terms can be substituted, got `{0}`")]
    NotBasis(String),
}

#[derive(Default)]
struct Binders {
    terms: Vec<String>,
    types: Vec<String>,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn abs(var: impl Into<String>, ty: UnitType, body: Term) -> Term {
        Term::Abs(var.into(), ty, Box::new(body))
    }

    pub fn ty_abs(var: impl Into<String>, body: Term) -> Term {
        Term::TyAbs(var.into(), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn ty_app(fun: Term, ty: UnitType) -> Term {
        Term::TyApp(Box::new(fun), ty)
    }

    pub fn scaled(alpha: Scalar, body: Term) -> Term {
        Term::Scaled(alpha, Box::new(body))
    }

    /// Builds a sum without canonicalizing; one element collapses to
    /// itself and none to `Zero`.
    pub fn sum(mut items: Vec<Term>) -> Term {
        match items.len() {
            0 => Term::Zero,
            1 => items.pop().unwrap(),
            _ => Term::Sum(items),
        }
    }

    pub fn is_basis(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Abs(..) | Term::TyAbs(..))
    }

    /// Summands of a top-level sum, or the term itself.
    pub fn summands(&self) -> &[Term] {
        match self {
            Term::Sum(items) => items,
            other => std::slice::from_ref(other),
        }
    }

    pub fn skeleton(&self) -> Skel {
        self.skel_in(&mut Binders::default())
    }

    fn skel_in(&self, env: &mut Binders) -> Skel {
        match self {
            Term::Var(name) => match env.terms.iter().rposition(|b| b == name) {
                Some(pos) => Skel::Bound(env.terms.len() - 1 - pos),
                None => Skel::Free(name.clone()),
            },
            Term::Abs(var, ty, body) => {
                let ty = ty.skeleton_in(&mut env.types);
                env.terms.push(var.clone());
                let body = body.skel_in(env);
                env.terms.pop();
                Skel::Abs(ty, Box::new(body))
            }
            Term::TyAbs(var, body) => {
                env.types.push(var.clone());
                let body = body.skel_in(env);
                env.types.pop();
                Skel::TyAbs(Box::new(body))
            }
            Term::App(f, a) => Skel::App(Box::new(f.skel_in(env)), Box::new(a.skel_in(env))),
            Term::TyApp(f, ty) => {
                let f = f.skel_in(env);
                Skel::TyApp(Box::new(f), ty.skeleton_in(&mut env.types))
            }
            Term::Zero => Skel::Zero,
            Term::Scaled(alpha, body) => Skel::Scaled(alpha.clone(), Box::new(body.skel_in(env))),
            Term::Sum(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item.skel_in(env) {
                        Skel::Sum(inner) => out.extend(inner),
                        s => out.push(s),
                    }
                }
                out.sort();
                match out.len() {
                    0 => Skel::Zero,
                    1 => out.pop().unwrap(),
                    _ => Skel::Sum(out),
                }
            }
        }
    }

    /// Number of AST nodes, counting an n-ary sum as n−1 binary nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero => 1,
            Term::Abs(_, _, b) | Term::TyAbs(_, b) | Term::Scaled(_, b) => 1 + b.size(),
            Term::TyApp(f, _) => 1 + f.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Sum(items) => items.len() - 1 + items.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn free_vars(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        (self.free_term_vars(), self.free_type_vars())
    }

    pub fn free_term_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_term_fv(&mut Vec::new(), &mut out);
        out
    }

    fn collect_term_fv(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(name) => {
                if !bound.contains(name) {
                    out.insert(name.clone());
                }
            }
            Term::Abs(var, _, body) => {
                bound.push(var.clone());
                body.collect_term_fv(bound, out);
                bound.pop();
            }
            Term::TyAbs(_, b) | Term::TyApp(b, _) | Term::Scaled(_, b) => {
                b.collect_term_fv(bound, out)
            }
            Term::App(f, a) => {
                f.collect_term_fv(bound, out);
                a.collect_term_fv(bound, out);
            }
            Term::Zero => {}
            Term::Sum(items) => items.iter().for_each(|i| i.collect_term_fv(bound, out)),
        }
    }

    pub fn free_type_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_type_fv(&mut Vec::new(), &mut out);
        out
    }

    fn collect_type_fv(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add = |ty: &UnitType, bound: &Vec<String>| {
            out.extend(ty.free_vars().into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Term::Var(_) | Term::Zero => {}
            Term::Abs(_, ty, body) => {
                add(ty, bound);
                body.collect_type_fv(bound, out);
            }
            Term::TyAbs(var, body) => {
                bound.push(var.clone());
                body.collect_type_fv(bound, out);
                bound.pop();
            }
            Term::TyApp(f, ty) => {
                add(ty, bound);
                f.collect_type_fv(bound, out);
            }
            Term::Scaled(_, b) => b.collect_type_fv(bound, out),
            Term::App(f, a) => {
                f.collect_type_fv(bound, out);
                a.collect_type_fv(bound, out);
            }
            Term::Sum(items) => items.iter().for_each(|i| i.collect_type_fv(bound, out)),
        }
    }

    /// Whether the term mentions a scalar anywhere.
    pub fn has_scalars(&self) -> bool {
        match self {
            Term::Scaled(..) => true,
            Term::Var(_) | Term::Zero => false,
            Term::Abs(_, _, b) | Term::TyAbs(_, b) | Term::TyApp(b, _) => b.has_scalars(),
            Term::App(f, a) => f.has_scalars() || a.has_scalars(),
            Term::Sum(items) => items.iter().any(Term::has_scalars),
        }
    }
}

/// The AC-canonical representative: sums flattened and sorted by skeleton.
/// Performs no rewriting.
pub fn canonicalize_term(t: &Term) -> Term {
    canon(t, &mut Binders::default()).0
}

fn canon(t: &Term, env: &mut Binders) -> (Term, Skel) {
    match t {
        Term::Var(_) | Term::Zero => (t.clone(), t.skel_in(env)),
        Term::Abs(var, ty, body) => {
            let ty_skel = ty.skeleton_in(&mut env.types);
            env.terms.push(var.clone());
            let (body, body_skel) = canon(body, env);
            env.terms.pop();
            (
                Term::abs(var.clone(), ty.clone(), body),
                Skel::Abs(ty_skel, Box::new(body_skel)),
            )
        }
        Term::TyAbs(var, body) => {
            env.types.push(var.clone());
            let (body, body_skel) = canon(body, env);
            env.types.pop();
            (Term::ty_abs(var.clone(), body), Skel::TyAbs(Box::new(body_skel)))
        }
        Term::App(f, a) => {
            let (f, fs) = canon(f, env);
            let (a, as_) = canon(a, env);
            (Term::app(f, a), Skel::App(Box::new(fs), Box::new(as_)))
        }
        Term::TyApp(f, ty) => {
            let (f, fs) = canon(f, env);
            let ts = ty.skeleton_in(&mut env.types);
            (Term::ty_app(f, ty.clone()), Skel::TyApp(Box::new(fs), ts))
        }
        Term::Scaled(alpha, body) => {
            let (b, bs) = canon(body, env);
            (Term::scaled(alpha.clone(), b), Skel::Scaled(alpha.clone(), Box::new(bs)))
        }
        Term::Sum(items) => {
            let mut flat: Vec<(Skel, Term)> = Vec::with_capacity(items.len());
            for item in items {
                match canon(item, env) {
                    (Term::Sum(inner), Skel::Sum(inner_skel)) => {
                        // inner sums come back sorted and aligned with their skeletons
                        flat.extend(inner_skel.into_iter().zip(inner));
                    }
                    (term, skel) => flat.push((skel, term)),
                }
            }
            flat.sort_by(|a, b| a.0.cmp(&b.0));
            match flat.len() {
                0 => (Term::Zero, Skel::Zero),
                1 => {
                    let (s, t) = flat.pop().unwrap();
                    (t, s)
                }
                _ => {
                    let (skels, terms): (Vec<Skel>, Vec<Term>) = flat.into_iter().unzip();
                    (Term::Sum(terms), Skel::Sum(skels))
                }
            }
        }
    }
}

/// α-equivalence modulo associativity and commutativity of `+`.
pub fn alpha_eq(t: &Term, r: &Term) -> bool {
    t.skeleton() == r.skeleton()
}

pub fn is_basis(t: &Term) -> bool {
    t.is_basis()
}

pub fn free_vars(t: &Term) -> (BTreeSet<String>, BTreeSet<String>) {
    t.free_vars()
}

/// `t[b/x]`, distributed linearly over sums and scalings; the result is canonical.
pub fn subst_term(t: &Term, x: &str, b: &Term) -> Result<Term, SubstError> {
    if !b.is_basis() {
        return Err(SubstError::NotBasis(b.to_string()));
    }
    Ok(canonicalize_term(&subst_any(t, x, b)))
}

/// Capture-avoiding substitution of an arbitrary term; callers enforce
/// the basis restriction.
pub(crate) fn subst_any(t: &Term, x: &str, b: &Term) -> Term {
    let (fv, ftv) = b.free_vars();
    subst_rec(t, x, b, &fv, &ftv)
}

fn subst_rec(
    t: &Term,
    x: &str,
    b: &Term,
    fv: &BTreeSet<String>,
    ftv: &BTreeSet<String>,
) -> Term {
    match t {
        Term::Var(name) if name == x => b.clone(),
        Term::Var(_) | Term::Zero => t.clone(),
        Term::Abs(var, _, _) if var == x => t.clone(),
        Term::Abs(var, ty, body) => {
            if fv.contains(var) && body.free_term_vars().contains(x) {
                let mut avoid = fv.clone();
                avoid.extend(body.free_term_vars());
                avoid.insert(x.to_string());
                let fresh = fresh_name(var, &avoid);
                let renamed = subst_any(body, var, &Term::Var(fresh.clone()));
                Term::abs(fresh, ty.clone(), subst_rec(&renamed, x, b, fv, ftv))
            } else {
                Term::abs(var.clone(), ty.clone(), subst_rec(body, x, b, fv, ftv))
            }
        }
        Term::TyAbs(var, body) => {
            if ftv.contains(var) && body.free_term_vars().contains(x) {
                let mut avoid = ftv.clone();
                avoid.extend(body.free_type_vars());
                let fresh = fresh_name(var, &avoid);
                let renamed = subst_ty_raw(body, var, &UnitType::Var(fresh.clone()));
                Term::ty_abs(fresh, subst_rec(&renamed, x, b, fv, ftv))
            } else {
                Term::ty_abs(var.clone(), subst_rec(body, x, b, fv, ftv))
            }
        }
        Term::App(f, a) => Term::app(subst_rec(f, x, b, fv, ftv), subst_rec(a, x, b, fv, ftv)),
        Term::TyApp(f, ty) => Term::ty_app(subst_rec(f, x, b, fv, ftv), ty.clone()),
        Term::Scaled(alpha, body) => Term::scaled(alpha.clone(), subst_rec(body, x, b, fv, ftv)),
        Term::Sum(items) => Term::Sum(items.iter().map(|i| subst_rec(i, x, b, fv, ftv)).collect()),
    }
}

/// `t[U/X]` on every annotation, capture-avoiding; the result is canonical.
pub fn subst_type_in_term(t: &Term, var: &str, u: &UnitType) -> Term {
    canonicalize_term(&subst_ty_raw(t, var, u))
}

pub(crate) fn subst_ty_raw(t: &Term, var: &str, u: &UnitType) -> Term {
    match t {
        Term::Var(_) | Term::Zero => t.clone(),
        Term::Abs(x, ty, body) => Term::abs(x.clone(), ty.subst(var, u), subst_ty_raw(body, var, u)),
        Term::TyAbs(bound, _) if bound == var => t.clone(),
        Term::TyAbs(bound, body) => {
            let u_fv = u.free_vars();
            if u_fv.contains(bound) && body.free_type_vars().contains(var) {
                let mut avoid = u_fv;
                avoid.extend(body.free_type_vars());
                avoid.insert(var.to_string());
                let fresh = fresh_name(bound, &avoid);
                let renamed = subst_ty_raw(body, bound, &UnitType::Var(fresh.clone()));
                Term::ty_abs(fresh, subst_ty_raw(&renamed, var, u))
            } else {
                Term::ty_abs(bound.clone(), subst_ty_raw(body, var, u))
            }
        }
        Term::App(f, a) => Term::app(subst_ty_raw(f, var, u), subst_ty_raw(a, var, u)),
        Term::TyApp(f, ty) => Term::ty_app(subst_ty_raw(f, var, u), ty.subst(var, u)),
        Term::Scaled(alpha, body) => Term::scaled(alpha.clone(), subst_ty_raw(body, var, u)),
        Term::Sum(items) => Term::Sum(items.iter().map(|i| subst_ty_raw(i, var, u)).collect()),
    }
}

// Printing precedence: 0 top, 1 summand, 2 scaled body, 3 application head, 4 argument.
impl Term {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Term::Var(name) => write!(f, "{name}"),
            Term::Zero => write!(f, "zero"),
            Term::Abs(..) | Term::TyAbs(..) if prec > 0 => {
                write!(f, "(")?;
                self.fmt_prec(f, 0)?;
                write!(f, ")")
            }
            Term::Abs(x, ty, body) => {
                write!(f, "\\{x}:{ty}. ")?;
                body.fmt_prec(f, 0)
            }
            Term::TyAbs(x, body) => {
                write!(f, "/\\{x}. ")?;
                body.fmt_prec(f, 0)
            }
            Term::Sum(items) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    item.fmt_prec(f, 1)?;
                }
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::Scaled(alpha, body) => {
                if prec > 2 {
                    write!(f, "(")?;
                }
                write!(f, "{alpha} . ")?;
                body.fmt_prec(f, 2)?;
                if prec > 2 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::App(fun, arg) => {
                if prec > 3 {
                    write!(f, "(")?;
                }
                fun.fmt_prec(f, 3)?;
                write!(f, " ")?;
                arg.fmt_prec(f, 4)?;
                if prec > 3 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::TyApp(fun, ty) => {
                if prec > 3 {
                    write!(f, "(")?;
                }
                fun.fmt_prec(f, 3)?;
                write!(f, " @ {}", ty.atomic())?;
                if prec > 3 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

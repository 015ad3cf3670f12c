use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::fresh_name;

/// Curry-style terms of System F with pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FTerm {
    Var(String),
    Lam(String, Box<FTerm>),
    App(Box<FTerm>, Box<FTerm>),
    Star,
    Pair(Box<FTerm>, Box<FTerm>),
    Proj1(Box<FTerm>),
    Proj2(Box<FTerm>),
}

#[derive(Debug, Clone, Eq)]
pub enum FType {
    Var(String),
    Arrow(Box<FType>, Box<FType>),
    Forall(String, Box<FType>),
    One,
    Prod(Box<FType>, Box<FType>),
}

impl FTerm {
    pub fn var(x: impl Into<String>) -> FTerm {
        FTerm::Var(x.into())
    }

    pub fn lam(x: impl Into<String>, body: FTerm) -> FTerm {
        FTerm::Lam(x.into(), Box::new(body))
    }

    pub fn app(f: FTerm, a: FTerm) -> FTerm {
        FTerm::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: FTerm, b: FTerm) -> FTerm {
        FTerm::Pair(Box::new(a), Box::new(b))
    }

    pub fn proj1(t: FTerm) -> FTerm {
        FTerm::Proj1(Box::new(t))
    }

    pub fn proj2(t: FTerm) -> FTerm {
        FTerm::Proj2(Box::new(t))
    }

    /// `let x = bound in body`, encoded as a β-redex.
    pub fn let_in(x: impl Into<String>, bound: FTerm, body: FTerm) -> FTerm {
        FTerm::app(FTerm::lam(x, body), bound)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            FTerm::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            FTerm::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            FTerm::App(a, b) | FTerm::Pair(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            FTerm::Proj1(a) | FTerm::Proj2(a) => a.collect_free(bound, out),
            FTerm::Star => {}
        }
    }

    pub fn size(&self) -> usize {
        match self {
            FTerm::Var(_) | FTerm::Star => 1,
            FTerm::Lam(_, b) | FTerm::Proj1(b) | FTerm::Proj2(b) => 1 + b.size(),
            FTerm::App(a, b) | FTerm::Pair(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Capture-avoiding `self[u/x]`.
    pub fn subst(&self, x: &str, u: &FTerm) -> FTerm {
        self.subst_with(x, u, &u.free_vars())
    }

    fn subst_with(&self, x: &str, u: &FTerm, fv: &BTreeSet<String>) -> FTerm {
        match self {
            FTerm::Var(y) if y == x => u.clone(),
            FTerm::Var(_) | FTerm::Star => self.clone(),
            FTerm::Lam(y, _) if y == x => self.clone(),
            FTerm::Lam(y, b) => {
                if fv.contains(y) && b.free_vars().contains(x) {
                    let mut avoid = fv.clone();
                    avoid.extend(b.free_vars());
                    avoid.insert(x.to_string());
                    let fresh = fresh_name(y, &avoid);
                    let renamed = b.subst(y, &FTerm::Var(fresh.clone()));
                    FTerm::lam(fresh, renamed.subst_with(x, u, fv))
                } else {
                    FTerm::lam(y.clone(), b.subst_with(x, u, fv))
                }
            }
            FTerm::App(a, b) => FTerm::app(a.subst_with(x, u, fv), b.subst_with(x, u, fv)),
            FTerm::Pair(a, b) => FTerm::pair(a.subst_with(x, u, fv), b.subst_with(x, u, fv)),
            FTerm::Proj1(a) => FTerm::proj1(a.subst_with(x, u, fv)),
            FTerm::Proj2(a) => FTerm::proj2(a.subst_with(x, u, fv)),
        }
    }

    pub fn alpha_eq(&self, other: &FTerm) -> bool {
        fn go(a: &FTerm, b: &FTerm, ea: &mut Vec<String>, eb: &mut Vec<String>) -> bool {
            match (a, b) {
                (FTerm::Var(x), FTerm::Var(y)) => {
                    let ix = ea.iter().rposition(|v| v == x);
                    let iy = eb.iter().rposition(|v| v == y);
                    match (ix, iy) {
                        (Some(i), Some(j)) => ea.len() - i == eb.len() - j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (FTerm::Lam(x, s), FTerm::Lam(y, t)) => {
                    ea.push(x.clone());
                    eb.push(y.clone());
                    let r = go(s, t, ea, eb);
                    ea.pop();
                    eb.pop();
                    r
                }
                (FTerm::App(a1, a2), FTerm::App(b1, b2)) | (FTerm::Pair(a1, a2), FTerm::Pair(b1, b2)) => {
                    go(a1, b1, ea, eb) && go(a2, b2, ea, eb)
                }
                (FTerm::Proj1(s), FTerm::Proj1(t)) | (FTerm::Proj2(s), FTerm::Proj2(t)) => go(s, t, ea, eb),
                (FTerm::Star, FTerm::Star) => true,
                _ => false,
            }
        }
        go(self, other, &mut Vec::new(), &mut Vec::new())
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let paren = |f: &mut fmt::Formatter<'_>, open: bool| if open { write!(f, "(") } else { Ok(()) };
        let close = |f: &mut fmt::Formatter<'_>, open: bool| if open { write!(f, ")") } else { Ok(()) };
        match self {
            FTerm::Var(x) => write!(f, "{x}"),
            FTerm::Star => write!(f, "*"),
            FTerm::Pair(a, b) => {
                write!(f, "(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ", ")?;
                b.fmt_prec(f, 0)?;
                write!(f, ")")
            }
            FTerm::Lam(x, b) => {
                paren(f, prec > 0)?;
                write!(f, "\\{x}. ")?;
                b.fmt_prec(f, 0)?;
                close(f, prec > 0)
            }
            FTerm::App(a, b) => {
                paren(f, prec > 1)?;
                a.fmt_prec(f, 1)?;
                write!(f, " ")?;
                b.fmt_prec(f, 2)?;
                close(f, prec > 1)
            }
            FTerm::Proj1(a) | FTerm::Proj2(a) => {
                let name = if matches!(self, FTerm::Proj1(_)) { "p1" } else { "p2" };
                paren(f, prec > 0)?;
                write!(f, "{name} ")?;
                a.fmt_prec(f, 2)?;
                close(f, prec > 0)
            }
        }
    }
}

impl fmt::Display for FTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl FType {
    pub fn var(x: impl Into<String>) -> FType {
        FType::Var(x.into())
    }

    pub fn arrow(a: FType, b: FType) -> FType {
        FType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn forall(x: impl Into<String>, a: FType) -> FType {
        FType::Forall(x.into(), Box::new(a))
    }

    pub fn prod(a: FType, b: FType) -> FType {
        FType::Prod(Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            FType::Var(x) => BTreeSet::from([x.clone()]),
            FType::One => BTreeSet::new(),
            FType::Arrow(a, b) | FType::Prod(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            FType::Forall(x, a) => {
                let mut s = a.free_vars();
                s.remove(x);
                s
            }
        }
    }

    /// Capture-avoiding `self[b/x]`.
    pub fn subst(&self, x: &str, b: &FType) -> FType {
        match self {
            FType::Var(y) if y == x => b.clone(),
            FType::Var(_) | FType::One => self.clone(),
            FType::Arrow(l, r) => FType::arrow(l.subst(x, b), r.subst(x, b)),
            FType::Prod(l, r) => FType::prod(l.subst(x, b), r.subst(x, b)),
            FType::Forall(y, _) if y == x => self.clone(),
            FType::Forall(y, body) => {
                let bfv = b.free_vars();
                if bfv.contains(y) && body.free_vars().contains(x) {
                    let mut avoid = bfv;
                    avoid.extend(body.free_vars());
                    avoid.insert(x.to_string());
                    let fresh = fresh_name(y, &avoid);
                    let renamed = body.subst(y, &FType::Var(fresh.clone()));
                    FType::forall(fresh, renamed.subst(x, b))
                } else {
                    FType::forall(y.clone(), body.subst(x, b))
                }
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: anything, 1: left of an arrow, 2: operand of a product
        match self {
            FType::Var(x) => write!(f, "{x}"),
            FType::One => write!(f, "1"),
            FType::Prod(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            FType::Arrow(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            FType::Forall(x, a) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                write!(f, "forall {x}. ")?;
                a.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// α-equivalence.
impl PartialEq for FType {
    fn eq(&self, other: &Self) -> bool {
        fn go(a: &FType, b: &FType, ea: &mut Vec<String>, eb: &mut Vec<String>) -> bool {
            match (a, b) {
                (FType::Var(x), FType::Var(y)) => {
                    let ix = ea.iter().rposition(|v| v == x);
                    let iy = eb.iter().rposition(|v| v == y);
                    match (ix, iy) {
                        (Some(i), Some(j)) => ea.len() - i == eb.len() - j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (FType::One, FType::One) => true,
                (FType::Arrow(a1, a2), FType::Arrow(b1, b2)) | (FType::Prod(a1, a2), FType::Prod(b1, b2)) => {
                    go(a1, b1, ea, eb) && go(a2, b2, ea, eb)
                }
                (FType::Forall(x, s), FType::Forall(y, t)) => {
                    ea.push(x.clone());
                    eb.push(y.clone());
                    let r = go(s, t, ea, eb);
                    ea.pop();
                    eb.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

impl fmt::Display for FType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// All one-step `β`/`π` reducts, in every context.
pub fn f_step(t: &FTerm) -> Vec<FTerm> {
    let mut out = Vec::new();
    match t {
        FTerm::App(f, a) => {
            if let FTerm::Lam(x, b) = f.as_ref() {
                out.push(b.subst(x, a));
            }
        }
        FTerm::Proj1(p) => {
            if let FTerm::Pair(a, _) = p.as_ref() {
                out.push((**a).clone());
            }
        }
        FTerm::Proj2(p) => {
            if let FTerm::Pair(_, b) = p.as_ref() {
                out.push((**b).clone());
            }
        }
        _ => {}
    }
    match t {
        FTerm::Var(_) | FTerm::Star => {}
        FTerm::Lam(x, b) => out.extend(f_step(b).into_iter().map(|b| FTerm::lam(x.clone(), b))),
        FTerm::App(f, a) => {
            out.extend(f_step(f).into_iter().map(|f| FTerm::app(f, (**a).clone())));
            out.extend(f_step(a).into_iter().map(|a| FTerm::app((**f).clone(), a)));
        }
        FTerm::Pair(a, b) => {
            out.extend(f_step(a).into_iter().map(|a| FTerm::pair(a, (**b).clone())));
            out.extend(f_step(b).into_iter().map(|b| FTerm::pair((**a).clone(), b)));
        }
        FTerm::Proj1(a) => out.extend(f_step(a).into_iter().map(FTerm::proj1)),
        FTerm::Proj2(a) => out.extend(f_step(a).into_iter().map(FTerm::proj2)),
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no F normal form within {fuel} steps")]
pub struct FFuelExhausted {
    pub fuel: usize,
}

/// Normal form by innermost reduction; `fuel` bounds the number of contractions.
pub fn f_normalize(t: &FTerm, fuel: usize) -> Result<FTerm, FFuelExhausted> {
    let mut left = fuel;
    nf(t, &mut left).ok_or(FFuelExhausted { fuel })
}

fn nf(t: &FTerm, fuel: &mut usize) -> Option<FTerm> {
    let spend = |fuel: &mut usize| {
        if *fuel == 0 {
            None
        } else {
            *fuel -= 1;
            Some(())
        }
    };
    match t {
        FTerm::Var(_) | FTerm::Star => Some(t.clone()),
        FTerm::Lam(x, b) => Some(FTerm::lam(x.clone(), nf(b, fuel)?)),
        FTerm::Pair(a, b) => Some(FTerm::pair(nf(a, fuel)?, nf(b, fuel)?)),
        FTerm::App(f, a) => {
            let f = nf(f, fuel)?;
            let a = nf(a, fuel)?;
            match f {
                FTerm::Lam(x, b) => {
                    spend(fuel)?;
                    nf(&b.subst(&x, &a), fuel)
                }
                f => Some(FTerm::app(f, a)),
            }
        }
        FTerm::Proj1(p) | FTerm::Proj2(p) => {
            let first = matches!(t, FTerm::Proj1(_));
            match nf(p, fuel)? {
                FTerm::Pair(a, b) => {
                    spend(fuel)?;
                    Some(if first { *a } else { *b })
                }
                p if first => Some(FTerm::proj1(p)),
                p => Some(FTerm::proj2(p)),
            }
        }
    }
}

pub fn is_f_normal(t: &FTerm) -> bool {
    f_step(t).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> FTerm {
        FTerm::var("x")
    }
    fn y() -> FTerm {
        FTerm::var("y")
    }

    #[test]
    fn projection_and_beta() {
        assert_eq!(f_step(&FTerm::proj1(FTerm::pair(x(), y()))), vec![x()]);
        let id_star = FTerm::app(FTerm::lam("x", x()), FTerm::Star);
        assert_eq!(f_normalize(&id_star, 10).unwrap(), FTerm::Star);
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = FTerm::lam("y", x());
        let out = t.subst("x", &y());
        assert!(out.alpha_eq(&FTerm::lam("z", y())));
    }

    #[test]
    fn normal_form_agrees_with_stepping() {
        let t = FTerm::let_in("p", FTerm::pair(x(), FTerm::Star), FTerm::pair(FTerm::proj2(FTerm::var("p")), FTerm::proj1(FTerm::var("p"))));
        let mut cur = t.clone();
        while let Some(next) = f_step(&cur).into_iter().next() {
            cur = next;
        }
        assert_eq!(f_normalize(&t, 100).unwrap(), cur);
        assert_eq!(cur, FTerm::pair(FTerm::Star, x()));
    }

    #[test]
    fn fuel_guard() {
        let delta = FTerm::lam("x", FTerm::app(x(), x()));
        let omega = FTerm::app(delta.clone(), delta);
        assert!(f_normalize(&omega, 50).is_err());
    }

    #[test]
    fn printing() {
        let t = FTerm::lam("x", FTerm::pair(FTerm::proj1(x()), FTerm::app(FTerm::app(y(), x()), FTerm::Star)));
        assert_eq!(t.to_string(), "\\x. (p1 x, y x *)");
        let ty = FType::arrow(FType::prod(FType::var("A"), FType::One), FType::forall("X", FType::var("X")));
        assert_eq!(ty.to_string(), "A * 1 -> forall X. X");
        let nested = FType::prod(FType::var("A"), FType::prod(FType::var("B"), FType::var("C")));
        assert_eq!(nested.to_string(), "A * (B * C)");
    }

    #[test]
    fn type_alpha_equivalence() {
        let a = FType::forall("X", FType::arrow(FType::var("X"), FType::var("X")));
        let b = FType::forall("Y", FType::arrow(FType::var("Y"), FType::var("Y")));
        assert_eq!(a, b);
        assert_ne!(a, FType::forall("Y", FType::arrow(FType::var("Y"), FType::var("X"))));
    }
}

//! `⊑_F`, read with `⋆` as the unit of pairing, and `≲_F` on normal forms.

use super::term::{f_normalize, FFuelExhausted, FTerm, FType};

/// Nameless F terms: bound variables are de Bruijn indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FSkel {
    Bound(usize),
    Free(String),
    Lam(Box<FSkel>),
    App(Box<FSkel>, Box<FSkel>),
    Star,
    Pair(Box<FSkel>, Box<FSkel>),
    Proj1(Box<FSkel>),
    Proj2(Box<FSkel>),
}

pub fn skeleton(t: &FTerm) -> FSkel {
    fn go(t: &FTerm, env: &mut Vec<String>) -> FSkel {
        match t {
            FTerm::Var(x) => match env.iter().rposition(|b| b == x) {
                Some(i) => FSkel::Bound(env.len() - 1 - i),
                None => FSkel::Free(x.clone()),
            },
            FTerm::Lam(x, b) => {
                env.push(x.clone());
                let b = go(b, env);
                env.pop();
                FSkel::Lam(Box::new(b))
            }
            FTerm::App(a, b) => FSkel::App(Box::new(go(a, env)), Box::new(go(b, env))),
            FTerm::Pair(a, b) => FSkel::Pair(Box::new(go(a, env)), Box::new(go(b, env))),
            FTerm::Proj1(a) => FSkel::Proj1(Box::new(go(a, env))),
            FTerm::Proj2(a) => FSkel::Proj2(Box::new(go(a, env))),
            FTerm::Star => FSkel::Star,
        }
    }
    go(t, &mut Vec::new())
}

impl FSkel {
    pub fn pair(a: FSkel, b: FSkel) -> FSkel {
        FSkel::Pair(Box::new(a), Box::new(b))
    }

    pub fn size(&self) -> usize {
        match self {
            FSkel::Bound(_) | FSkel::Free(_) | FSkel::Star => 1,
            FSkel::Lam(a) | FSkel::Proj1(a) | FSkel::Proj2(a) => 1 + a.size(),
            FSkel::App(a, b) | FSkel::Pair(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// Drops `⋆` components of pairs, bottom-up.
pub fn unit_reduce(s: &FSkel) -> FSkel {
    match s {
        FSkel::Pair(a, b) => {
            let (a, b) = (unit_reduce(a), unit_reduce(b));
            match (a, b) {
                (FSkel::Star, b) => b,
                (a, FSkel::Star) => a,
                (a, b) => FSkel::pair(a, b),
            }
        }
        FSkel::Lam(a) => FSkel::Lam(Box::new(unit_reduce(a))),
        FSkel::App(a, b) => FSkel::App(Box::new(unit_reduce(a)), Box::new(unit_reduce(b))),
        FSkel::Proj1(a) => FSkel::Proj1(Box::new(unit_reduce(a))),
        FSkel::Proj2(a) => FSkel::Proj2(Box::new(unit_reduce(a))),
        _ => s.clone(),
    }
}

pub fn f_sqleq(t: &FTerm, r: &FTerm) -> bool {
    skel_sqleq(&skeleton(t), &skeleton(r))
}

pub fn skel_sqleq(a: &FSkel, b: &FSkel) -> bool {
    reduced_le(&unit_reduce(a), &unit_reduce(b))
}

/// Both sides already unit-reduced.
pub fn reduced_le(a: &FSkel, b: &FSkel) -> bool {
    if *a == FSkel::Star || a == b {
        return true;
    }
    match (a, b) {
        (_, FSkel::Pair(b1, b2)) => {
            reduced_le(a, b1)
                || reduced_le(a, b2)
                || matches!(a, FSkel::Pair(a1, a2) if reduced_le(a1, b1) && reduced_le(a2, b2))
        }
        (FSkel::Lam(s), FSkel::Lam(t)) => reduced_le(s, t),
        (FSkel::App(f, x), FSkel::App(g, y)) => reduced_le(f, g) && reduced_le(x, y),
        (FSkel::Proj1(s), FSkel::Proj1(t)) | (FSkel::Proj2(s), FSkel::Proj2(t)) => reduced_le(s, t),
        _ => false,
    }
}

/// The clauses read literally, without the unit law: a term below a pair
/// must be below both components, unless both sides are pairs.
pub fn f_sqleq_strict(t: &FTerm, r: &FTerm) -> bool {
    strict_le(&skeleton(t), &skeleton(r))
}

pub fn strict_le(a: &FSkel, b: &FSkel) -> bool {
    if *a == FSkel::Star || a == b {
        return true;
    }
    match (a, b) {
        (_, FSkel::Pair(b1, b2)) => {
            (strict_le(a, b1) && strict_le(a, b2))
                || matches!(a, FSkel::Pair(a1, a2) if strict_le(a1, b1) && strict_le(a2, b2))
        }
        (FSkel::Lam(s), FSkel::Lam(t)) => strict_le(s, t),
        (FSkel::App(f, x), FSkel::App(g, y)) => strict_le(f, g) && strict_le(x, y),
        (FSkel::Proj1(s), FSkel::Proj1(t)) | (FSkel::Proj2(s), FSkel::Proj2(t)) => strict_le(s, t),
        _ => false,
    }
}

/// `t ≲_F r`: `⊑_F` on F normal forms.
pub fn f_lessapprox(t: &FTerm, r: &FTerm, fuel: usize) -> Result<bool, FFuelExhausted> {
    Ok(f_sqleq(&f_normalize(t, fuel)?, &f_normalize(r, fuel)?))
}

/// `≲_F` where the right-hand side may come from any derivation: the order
/// in which equal types are laid out side by side is a free choice, so
/// both normal forms have their equal-typed tuple components sorted first.
pub fn f_lessapprox_any_layout(
    t: &FTerm,
    t_ty: &FType,
    r: &FTerm,
    r_ty: &FType,
    fuel: usize,
) -> Result<bool, FFuelExhausted> {
    let t = sort_equal_components(&f_normalize(t, fuel)?, t_ty);
    let r = sort_equal_components(&f_normalize(r, fuel)?, r_ty);
    Ok(f_sqleq(&t, &r))
}

/// Sorts each run of equal-typed components of a tuple by skeleton,
/// descending through abstractions and tuple components.
pub fn sort_equal_components(t: &FTerm, ty: &FType) -> FTerm {
    match (t, ty) {
        (_, FType::Forall(_, body)) => sort_equal_components(t, body),
        (FTerm::Lam(x, b), FType::Arrow(_, cod)) => FTerm::lam(x.clone(), sort_equal_components(b, cod)),
        (FTerm::Pair(..), FType::Prod(..)) => {
            let mut leaves = Vec::new();
            comb_leaves(t, ty, &mut leaves);
            let mut leaves: Vec<(FTerm, &FType)> =
                leaves.into_iter().map(|(l, a)| (sort_equal_components(l, a), a)).collect();
            let mut i = 0;
            while i < leaves.len() {
                let j = (i..leaves.len()).find(|&j| leaves[j].1 != leaves[i].1).unwrap_or(leaves.len());
                leaves[i..j].sort_by_cached_key(|(l, _)| skeleton(l));
                i = j;
            }
            leaves.into_iter().map(|(l, _)| l).reduce(FTerm::pair).unwrap()
        }
        _ => t.clone(),
    }
}

fn comb_leaves<'a>(t: &'a FTerm, ty: &'a FType, out: &mut Vec<(&'a FTerm, &'a FType)>) {
    match (t, ty) {
        (FTerm::Pair(a, b), FType::Prod(x, y)) => {
            comb_leaves(a, x, out);
            out.push((b, y));
        }
        _ => out.push((t, ty)),
    }
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
    fn listed_clauses() {
        assert!(f_sqleq(&FTerm::Star, &FTerm::lam("z", x())));
        assert!(f_sqleq(&x(), &FTerm::pair(x(), x())));
        assert!(!f_sqleq(&FTerm::pair(x(), y()), &x()));
    }

    #[test]
    fn pairs_absorb_and_compare_componentwise() {
        assert!(f_sqleq(&x(), &FTerm::pair(y(), x())));
        assert!(f_sqleq(&FTerm::pair(x(), y()), &FTerm::pair(FTerm::pair(x(), x()), y())));
        assert!(!f_sqleq(&FTerm::pair(x(), y()), &FTerm::pair(y(), x())));
        assert!(f_sqleq(&FTerm::pair(x(), FTerm::Star), &x()));
    }

    #[test]
    fn strict_reading() {
        assert!(f_sqleq_strict(&x(), &FTerm::pair(x(), x())));
        assert!(!f_sqleq_strict(&x(), &FTerm::pair(x(), y())));
        assert!(f_sqleq_strict(&FTerm::pair(x(), FTerm::Star), &FTerm::pair(x(), y())));
        assert!(!f_sqleq_strict(&FTerm::pair(x(), FTerm::Star), &x()));
    }

    #[test]
    fn binders_compare_up_to_renaming() {
        let l = FTerm::lam("a", FTerm::var("a"));
        let r = FTerm::lam("b", FTerm::pair(FTerm::var("b"), FTerm::var("b")));
        assert!(f_sqleq(&l, &r));
        assert!(!f_sqleq(&r, &l));
    }

    #[test]
    fn equal_types_may_be_laid_out_in_either_order() {
        let (tx, ty) = (FType::var("X"), FType::var("Y"));
        let yy = FType::prod(ty.clone(), ty.clone());
        let fx = FTerm::app(FTerm::var("f"), x());
        let l = FTerm::pair(fx.clone(), y());
        let r = FTerm::pair(y(), fx.clone());
        assert!(!f_lessapprox(&l, &r, 10).unwrap());
        assert!(f_lessapprox_any_layout(&l, &yy, &r, &yy, 10).unwrap());
        let xy = FType::prod(tx, ty);
        assert!(!f_lessapprox_any_layout(&FTerm::pair(y(), x()), &xy, &FTerm::pair(x(), y()), &xy, 10).unwrap());
    }

    #[test]
    fn lessapprox_normalizes() {
        let redex = FTerm::proj1(FTerm::pair(x(), y()));
        assert!(f_lessapprox(&redex, &x(), 10).unwrap());
        assert!(!f_sqleq(&redex, &x()));
    }
}

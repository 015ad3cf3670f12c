use std::collections::BTreeSet;
use std::fmt;

use super::fresh_name;

/// Unit types: no top-level sum.
#[derive(Debug, Clone)]
pub enum UnitType {
    Var(String),
    Arrow(Box<UnitType>, Type),
    Forall(String, Box<UnitType>),
}

/// General types in canonical form: a sorted multiset of unit types.
///
/// The empty multiset is the zero type. Because the representation is a
/// multiset, `T + 0 ≡ T`, commutativity and associativity hold by
/// construction and `==` decides type equivalence.
#[derive(Debug, Clone)]
pub struct Type {
    summands: Vec<UnitType>,
}

/// Nameless view of a type: bound variables become indices, free ones keep
/// their names. Sum positions hold sorted vectors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TySkel {
    Bound(usize),
    Free(String),
    Arrow(Box<TySkel>, Vec<TySkel>),
    Forall(Box<TySkel>),
}

impl UnitType {
    pub fn var(name: impl Into<String>) -> Self {
        UnitType::Var(name.into())
    }

    pub fn arrow(domain: UnitType, codomain: Type) -> Self {
        UnitType::Arrow(Box::new(domain), codomain)
    }

    pub fn forall(var: impl Into<String>, body: UnitType) -> Self {
        UnitType::Forall(var.into(), Box::new(body))
    }

    pub fn skeleton(&self) -> TySkel {
        self.skeleton_in(&mut Vec::new())
    }

    /// `env` lists enclosing type binders, innermost last.
    pub fn skeleton_in(&self, env: &mut Vec<String>) -> TySkel {
        match self {
            UnitType::Var(name) => match env.iter().rposition(|b| b == name) {
                Some(pos) => TySkel::Bound(env.len() - 1 - pos),
                None => TySkel::Free(name.clone()),
            },
            UnitType::Arrow(dom, cod) => {
                let dom = dom.skeleton_in(env);
                TySkel::Arrow(Box::new(dom), cod.skeleton_in(env))
            }
            UnitType::Forall(var, body) => {
                env.push(var.clone());
                let body = body.skeleton_in(env);
                env.pop();
                TySkel::Forall(Box::new(body))
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            UnitType::Var(name) => {
                if !bound.contains(name) {
                    out.insert(name.clone());
                }
            }
            UnitType::Arrow(dom, cod) => {
                dom.collect_free(bound, out);
                for u in cod.summands() {
                    u.collect_free(bound, out);
                }
            }
            UnitType::Forall(var, body) => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Capture-avoiding `self[replacement/var]`.
    pub fn subst(&self, var: &str, replacement: &UnitType) -> UnitType {
        match self {
            UnitType::Var(name) if name == var => replacement.clone(),
            UnitType::Var(_) => self.clone(),
            UnitType::Arrow(dom, cod) => {
                UnitType::arrow(dom.subst(var, replacement), cod.subst(var, replacement))
            }
            UnitType::Forall(bound, _) if bound == var => self.clone(),
            UnitType::Forall(bound, body) => {
                let repl_fv = replacement.free_vars();
                if repl_fv.contains(bound) && body.free_vars().contains(var) {
                    let mut avoid = repl_fv;
                    avoid.extend(body.free_vars());
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(bound, &avoid);
                    let renamed = body.subst(bound, &UnitType::Var(fresh.clone()));
                    UnitType::forall(fresh, renamed.subst(var, replacement))
                } else {
                    UnitType::forall(bound.clone(), body.subst(var, replacement))
                }
            }
        }
    }

    /// Number of constructors, used by generators and oracles to bound size.
    pub fn depth(&self) -> usize {
        match self {
            UnitType::Var(_) => 1,
            UnitType::Arrow(dom, cod) => 1 + dom.depth().max(cod.depth()),
            UnitType::Forall(_, body) => 1 + body.depth(),
        }
    }
}

impl PartialEq for UnitType {
    fn eq(&self, other: &Self) -> bool {
        self.skeleton() == other.skeleton()
    }
}

impl Eq for UnitType {}

impl Type {
    pub fn zero() -> Self {
        Type { summands: Vec::new() }
    }

    pub fn unit(u: UnitType) -> Self {
        Type { summands: vec![u] }
    }

    pub fn from_summands(summands: impl IntoIterator<Item = UnitType>) -> Self {
        let mut summands: Vec<UnitType> = summands.into_iter().collect();
        summands.sort_by_cached_key(|u| u.skeleton());
        Type { summands }
    }

    pub fn summands(&self) -> &[UnitType] {
        &self.summands
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// The single summand, if the type is a unit type.
    pub fn as_unit(&self) -> Option<&UnitType> {
        match self.summands.as_slice() {
            [u] => Some(u),
            _ => None,
        }
    }

    pub fn plus(&self, other: &Type) -> Type {
        Type::from_summands(self.summands.iter().chain(other.summands.iter()).cloned())
    }

    /// `n.T`: `n` copies of every summand.
    pub fn times(&self, n: usize) -> Type {
        Type::from_summands(
            std::iter::repeat(self.summands.iter())
                .take(n)
                .flatten()
                .cloned(),
        )
    }

    pub fn skeleton(&self) -> Vec<TySkel> {
        self.skeleton_in(&mut Vec::new())
    }

    pub fn skeleton_in(&self, env: &mut Vec<String>) -> Vec<TySkel> {
        let mut out: Vec<TySkel> = self.summands.iter().map(|u| u.skeleton_in(env)).collect();
        out.sort();
        out
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.summands.iter().flat_map(|u| u.free_vars()).collect()
    }

    pub fn subst(&self, var: &str, replacement: &UnitType) -> Type {
        Type::from_summands(self.summands.iter().map(|u| u.subst(var, replacement)))
    }

    pub fn depth(&self) -> usize {
        self.summands.iter().map(UnitType::depth).max().unwrap_or(1)
    }
}

impl PartialEq for Type {
    fn eq(&self, other: &Self) -> bool {
        self.summands.len() == other.summands.len() && self.skeleton() == other.skeleton()
    }
}

impl Eq for Type {}

impl From<UnitType> for Type {
    fn from(u: UnitType) -> Self {
        Type::unit(u)
    }
}

/// `T ≡ R`.
pub fn type_equiv(t: &Type, r: &Type) -> bool {
    t == r
}

impl UnitType {
    fn fmt_atomic(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitType::Var(name) => write!(f, "{name}"),
            _ => write!(f, "({self})"),
        }
    }

    /// Printed form usable after `@`, which only accepts atoms.
    pub fn atomic(&self) -> String {
        struct Atomic<'a>(&'a UnitType);
        impl fmt::Display for Atomic<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_atomic(f)
            }
        }
        Atomic(self).to_string()
    }
}

impl fmt::Display for UnitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitType::Var(name) => write!(f, "{name}"),
            UnitType::Arrow(dom, cod) => {
                dom.fmt_atomic(f)?;
                write!(f, " -> ")?;
                match cod.as_unit() {
                    Some(u) => write!(f, "{u}"),
                    None if cod.is_zero() => write!(f, "Zero"),
                    None => write!(f, "({cod})"),
                }
            }
            UnitType::Forall(var, body) => write!(f, "forall {var}. {body}"),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "Zero");
        }
        for (i, u) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{u}")?;
        }
        Ok(())
    }
}

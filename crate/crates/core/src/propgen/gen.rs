//! Goal-directed generation of well-typed terms: pick a target type, then
//! build a term inhabiting it by choosing a typing rule whose conclusion
//! matches and recursing on the premises.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GenConfig;
use crate::syntax::{fresh_name, type_equiv, Context, Scalar, Term, Type, UnitType};
use crate::typing::synthesize;

/// Binder names for generated abstractions; reusing them produces shadowing.
const TERM_BINDERS: [&str; 3] = ["a", "b", "c"];

/// `x:X, y:Y, f:X -> Y, g:X -> X + Y, k:(X -> X) -> Y, i:forall Z. Z -> Z`
/// over the first two type variables of the pool.
pub fn default_context(cfg: &GenConfig) -> Context {
    let x = UnitType::var(cfg.tyvars[0].clone());
    let y = UnitType::var(cfg.tyvars[1 % cfg.tyvars.len()].clone());
    let arrow = |d: &UnitType, c: Vec<&UnitType>| UnitType::arrow(d.clone(), Type::from_summands(c.into_iter().cloned()));
    let z = unused("Z", &cfg.tyvars.iter().cloned().collect());
    let zv = UnitType::var(z.clone());
    Context::new()
        .extend("x", x.clone())
        .extend("y", y.clone())
        .extend("f", arrow(&x, vec![&y]))
        .extend("g", arrow(&x, vec![&x, &y]))
        .extend("k", arrow(&arrow(&x, vec![&x]), vec![&y]))
        .extend("i", UnitType::forall(z, arrow(&zv, vec![&zv])))
}

pub struct Generator {
    cfg: GenConfig,
    ctx: Context,
    rng: ChaCha8Rng,
}

/// Endless stream of `(t, T)` with `Γ ⊢ t : T`.
pub fn gen_typed_term(cfg: &GenConfig, ctx: &Context) -> Generator {
    assert!(!cfg.scalars.is_empty() && !cfg.tyvars.is_empty(), "pools must be nonempty");
    Generator { cfg: cfg.clone(), ctx: ctx.clone(), rng: ChaCha8Rng::seed_from_u64(cfg.seed) }
}

impl Iterator for Generator {
    type Item = (Term, Type);

    fn next(&mut self) -> Option<(Term, Type)> {
        loop {
            let ctx = self.ctx.clone();
            let target = self.rand_type(&ctx, 2);
            if let Some(t) = self.term(&ctx, &target, self.cfg.max_depth) {
                let ty = synthesize(&ctx, &t).unwrap_or_else(|e| panic!("generated `{t}` is ill-typed: {e}"));
                assert!(type_equiv(&ty, &target), "generated `{t}` has type {ty}, aimed at {target}");
                return Some((t, target));
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Choice {
    Leaf,
    Split,
    Twice,
    Scale,
    Pad,
    Apply,
    ApplyTwice,
    ApplyZero,
    Instantiate,
}

impl Generator {
    fn scope(&self, ctx: &Context) -> Vec<String> {
        let mut vars: BTreeSet<String> = self.cfg.tyvars.iter().cloned().collect();
        vars.extend(ctx.tyvars().iter().cloned());
        vars.into_iter().collect()
    }

    fn rand_unit(&mut self, vars: &[String], depth: usize) -> UnitType {
        let pick = if depth <= 1 { 0 } else { self.rng.gen_range(0..6) };
        match pick {
            0..=2 => UnitType::var(vars.choose(&mut self.rng).unwrap().clone()),
            3 | 4 => {
                let dom = self.rand_unit(vars, depth - 1);
                let cod = self.rand_type_in(vars, depth - 1);
                UnitType::arrow(dom, cod)
            }
            _ => {
                let z = unused("Z", &vars.iter().cloned().collect());
                let mut inner = vars.to_vec();
                inner.push(z.clone());
                UnitType::forall(z, self.rand_unit(&inner, depth - 1))
            }
        }
    }

    fn rand_type_in(&mut self, vars: &[String], depth: usize) -> Type {
        let n = match self.rng.gen_range(0..10) {
            0 => 0,
            1..=5 => 1,
            _ => self.rng.gen_range(2..=self.cfg.max_summands.max(2)),
        };
        Type::from_summands((0..n).map(|_| self.rand_unit(vars, depth)).collect::<Vec<_>>())
    }

    fn rand_type(&mut self, ctx: &Context, depth: usize) -> Type {
        let vars = self.scope(ctx);
        self.rand_type_in(&vars, depth)
    }

    fn scalar_with_floor(&mut self, k: usize) -> Option<Scalar> {
        let pool: Vec<&Scalar> = self.cfg.scalars.iter().filter(|s| s.floor() == k).collect();
        pool.choose(&mut self.rng).map(|s| (*s).clone())
    }

    fn term(&mut self, ctx: &Context, target: &Type, depth: usize) -> Option<Term> {
        if depth == 0 {
            return self.leaf(ctx, target);
        }
        use Choice::*;
        let mut choices = match target.len() {
            0 => vec![Leaf, Scale, Twice, Pad, ApplyZero, ApplyZero],
            1 => vec![Leaf, Leaf, Twice, Scale, Pad, Apply, Apply, Instantiate],
            _ => vec![Split, Split, Twice, Scale, Pad, Apply, ApplyTwice],
        };
        choices.shuffle(&mut self.rng);
        for choice in choices {
            if let Some(t) = self.by_rule(ctx, target, depth, choice) {
                return Some(t);
            }
        }
        None
    }

    fn by_rule(&mut self, ctx: &Context, target: &Type, depth: usize, choice: Choice) -> Option<Term> {
        let d = depth - 1;
        match choice {
            Choice::Leaf => match target.as_unit() {
                Some(u) => self.unit_term(ctx, u, d),
                None => self.leaf(ctx, target),
            },
            Choice::Split => {
                let parts = self.partition(target);
                let terms = parts.iter().map(|p| self.term(ctx, p, d)).collect::<Option<Vec<_>>>()?;
                Some(Term::sum(terms))
            }
            Choice::Twice => {
                // α.u + β.u with ⌊α⌋ + ⌊β⌋ copies of the half type
                let (half, k) = halve(target);
                let (a, b) = match (k, self.rng.gen_range(0..3)) {
                    (0, _) => (self.scalar_with_floor(0)?, self.scalar_with_floor(0)?),
                    (1, _) => (self.scalar_with_floor(0)?, self.scalar_with_floor(1)?),
                    (_, 0) => return Some(Term::sum(vec![self.term(ctx, &half, d)?; 2])),
                    (_, 1) => {
                        let u = self.term(ctx, &half, d)?;
                        return Some(Term::sum(vec![Term::scaled(self.scalar_with_floor(1)?, u.clone()), u]));
                    }
                    _ => (self.scalar_with_floor(1)?, self.scalar_with_floor(1)?),
                };
                let body = if k == 0 { self.rand_type(ctx, 1) } else { half };
                let u = self.term(ctx, &body, d)?;
                Some(Term::sum(vec![Term::scaled(a, u.clone()), Term::scaled(b, u)]))
            }
            Choice::Scale => {
                let (inner, k) = match target.len() {
                    0 => (self.rand_type(ctx, 1), 0),
                    _ => match self.rng.gen_bool(0.5) {
                        true => (target.clone(), 1),
                        false => {
                            let (half, k) = halve(target);
                            if k != 2 {
                                return None;
                            }
                            (half, 2)
                        }
                    },
                };
                let alpha = self.scalar_with_floor(k)?;
                Some(Term::scaled(alpha, self.term(ctx, &inner, d)?))
            }
            Choice::Pad => {
                let t = self.term(ctx, target, d)?;
                Some(Term::sum(vec![t, Term::Zero]))
            }
            Choice::Apply => {
                let groups = self.partition(target);
                let dom = self.rand_unit(&self.scope(ctx), 2);
                self.application(ctx, &dom, &groups, 1, d)
            }
            Choice::ApplyTwice => {
                let (half, k) = halve(target);
                if k != 2 {
                    return None;
                }
                let groups = self.partition(&half);
                let dom = self.rand_unit(&self.scope(ctx), 1);
                self.application(ctx, &dom, &groups, 2, d)
            }
            Choice::ApplyZero => {
                let dom = self.rand_unit(&self.scope(ctx), 1);
                if self.rng.gen_bool(0.5) {
                    // a head of type 0 applied to copies of a common unit type
                    let copies = self.rng.gen_range(0..=2);
                    let arg_ty = Type::from_summands(vec![dom; copies]);
                    Some(Term::app(self.term(ctx, &Type::zero(), d)?, self.term(ctx, &arg_ty, d)?))
                } else {
                    let cod = self.rand_type(ctx, 1);
                    let fun = self.term(ctx, &Type::unit(UnitType::arrow(dom, cod)), d)?;
                    Some(Term::app(fun, self.term(ctx, &Type::zero(), d)?))
                }
            }
            Choice::Instantiate => {
                let u = target.as_unit()?;
                let free: Vec<String> = u.free_vars().into_iter().collect();
                let mut avoid = u.free_vars();
                avoid.extend(ctx.free_type_vars());
                avoid.extend(self.scope(ctx));
                let z = unused("Z", &avoid);
                let (body, arg) = match (free.choose(&mut self.rng), self.rng.gen_bool(0.7)) {
                    (Some(x), true) => (u.subst(x, &UnitType::var(z.clone())), UnitType::var(x.clone())),
                    _ => (u.clone(), self.rand_unit(&self.scope(ctx), 2)),
                };
                let fun = self.term(ctx, &Type::unit(UnitType::forall(z, body)), d)?;
                Some(Term::ty_app(fun, arg))
            }
        }
    }

    /// `(Σ dom → Cᵢ) r` with `r : copies·dom`; its type is `copies·ΣCᵢ`.
    fn application(&mut self, ctx: &Context, dom: &UnitType, groups: &[Type], copies: usize, d: usize) -> Option<Term> {
        let fun_ty = Type::from_summands(groups.iter().map(|c| UnitType::arrow(dom.clone(), c.clone())).collect::<Vec<_>>());
        let fun = self.term(ctx, &fun_ty, d)?;
        let arg = self.term(ctx, &Type::from_summands(vec![dom.clone(); copies]), d)?;
        Some(Term::app(fun, arg))
    }

    /// Splits a type into 1 to `max_summands` nonempty groups; a single
    /// unit may also split off an empty codomain group.
    fn partition(&mut self, target: &Type) -> Vec<Type> {
        let n = target.len();
        if n <= 1 {
            return vec![target.clone()];
        }
        let k = self.rng.gen_range(2..=n.min(self.cfg.max_summands.max(2)));
        let mut groups: Vec<Vec<UnitType>> = vec![Vec::new(); k];
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        for (slot, &i) in order.iter().enumerate() {
            let g = if slot < k { slot } else { self.rng.gen_range(0..k) };
            groups[g].push(target.summands()[i].clone());
        }
        groups.into_iter().map(Type::from_summands).collect()
    }

    /// Introduction forms, variables and instantiation for a unit target.
    fn unit_term(&mut self, ctx: &Context, u: &UnitType, d: usize) -> Option<Term> {
        let vars: Vec<&String> = ctx.bindings().iter().filter(|(_, t)| t == u).map(|(n, _)| n).collect();
        if let (Some(x), true) = (vars.choose(&mut self.rng), self.rng.gen_bool(0.5)) {
            return Some(Term::var((*x).clone()));
        }
        match u {
            UnitType::Arrow(dom, cod) => {
                let x = *TERM_BINDERS.choose(&mut self.rng).unwrap();
                let inner = ctx.extend(x, (**dom).clone());
                let body = if d == 0 { self.leaf(&inner, cod) } else { self.term(&inner, cod, d) }?;
                Some(Term::abs(x, (**dom).clone(), body))
            }
            UnitType::Forall(z, body) => {
                let mut avoid = ctx.free_type_vars();
                avoid.extend(body.free_vars());
                let (z, body) = if avoid.contains(z) {
                    let fresh = fresh_name(z, &avoid);
                    let renamed = body.subst(z, &UnitType::var(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (z.clone(), (**body).clone())
                };
                let inner = ctx.with_tyvar(&z);
                let body_ty = Type::unit(body);
                let t = if d == 0 { self.leaf(&inner, &body_ty) } else { self.term(&inner, &body_ty, d) }?;
                Some(Term::ty_abs(z, t))
            }
            UnitType::Var(_) => vars.first().map(|x| Term::var((*x).clone())),
        }
    }

    fn leaf(&mut self, ctx: &Context, target: &Type) -> Option<Term> {
        match target.len() {
            0 => Some(Term::Zero),
            1 => self.unit_term(ctx, &target.summands()[0], 0),
            _ => {
                let parts = target.summands().to_vec();
                let terms = parts.iter().map(|u| self.unit_term(ctx, u, 0)).collect::<Option<Vec<_>>>()?;
                Some(Term::sum(terms))
            }
        }
    }
}

fn unused(base: &str, avoid: &BTreeSet<String>) -> String {
    if avoid.contains(base) {
        fresh_name(base, avoid)
    } else {
        base.to_string()
    }
}

/// The largest `k ≤ 2` and `S` with `T = k·S`; `(T, 1)` when `T` is not
/// a double, `(0, 0)` for the empty type.
fn halve(t: &Type) -> (Type, usize) {
    if t.is_zero() {
        return (Type::zero(), 0);
    }
    let s = t.summands();
    if s.len() % 2 == 0 {
        let half: Vec<UnitType> = s.iter().step_by(2).cloned().collect();
        let candidate = Type::from_summands(half);
        if type_equiv(&candidate.times(2), t) {
            return (candidate, 2);
        }
    }
    (t.clone(), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{normalize, step, RuleId, Strategy};

    #[test]
    fn same_seed_same_stream() {
        let cfg = GenConfig::default();
        let ctx = default_context(&cfg);
        let a: Vec<String> = gen_typed_term(&cfg, &ctx).take(30).map(|(t, _)| t.to_string()).collect();
        let b: Vec<String> = gen_typed_term(&cfg, &ctx).take(30).map(|(t, _)| t.to_string()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn depth_zero_yields_leaves() {
        let cfg = GenConfig { max_depth: 0, ..GenConfig::default() };
        for (t, _) in gen_typed_term(&cfg, &default_context(&cfg)).take(50) {
            assert!(!t.has_scalars(), "{t}");
        }
    }

    #[test]
    fn every_rule_fires_somewhere() {
        let cfg = GenConfig::default();
        let mut fired = BTreeSet::new();
        for (t, _) in gen_typed_term(&cfg, &default_context(&cfg)).take(200) {
            let mut current = t;
            for _ in 0..50 {
                let reducts = step(&current);
                fired.extend(reducts.iter().map(|r| r.rule));
                match reducts.into_iter().next() {
                    Some(r) => current = r.term,
                    None => break,
                }
            }
            let _ = normalize(&current, &Strategy::Leftmost, 10);
        }
        let missing: Vec<RuleId> = RuleId::ALL.into_iter().filter(|r| !fired.contains(r)).collect();
        assert!(missing.is_empty(), "{missing:?}");
    }
}

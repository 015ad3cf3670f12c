//! Additive typing derivations with explicit `≡` steps. Every conclusion
//! outside an [`Rule::Eq`] premise is a canonical layout; the rules whose
//! natural conclusion is not canonical get an `Eq` node on top.

use std::fmt;

use super::layout::{canonicalize, comb_leaves, Layout, Move};
use crate::additive::ATerm;
use crate::syntax::{Context, Term, UnitType};
use crate::typing::{synthesize, TypeError};

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Ax,
    AxZero,
    ArrowIntro,
    ArrowElim,
    ForallIntro,
    /// Instantiation with the given type.
    ForallElim(UnitType),
    SumIntro,
    Eq(Vec<Move>),
}

#[derive(Debug, Clone)]
pub struct DNode {
    pub rule: Rule,
    pub context: Context,
    pub term: Term,
    pub ty: Layout,
    pub premises: Vec<DNode>,
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub root: DNode,
}

/// Builds the derivation that follows the shape of `t`.
pub fn derive(ctx: &Context, t: &ATerm) -> Result<Derivation, TypeError> {
    synthesize(ctx, t.term())?;
    Ok(Derivation { root: build(ctx, t.term()) })
}

fn node(rule: Rule, ctx: &Context, term: &Term, ty: Layout, premises: Vec<DNode>) -> DNode {
    DNode { rule, context: ctx.clone(), term: term.clone(), ty, premises }
}

fn settle(n: DNode) -> DNode {
    if n.ty.is_canonical() {
        return n;
    }
    let target = Layout::of_type(&n.ty.to_type());
    let moves = canonicalize(&n.ty);
    let (ctx, term) = (n.context.clone(), n.term.clone());
    node(Rule::Eq(moves), &ctx, &term, target, vec![n])
}

fn build(ctx: &Context, t: &Term) -> DNode {
    match t {
        Term::Var(x) => {
            let u = ctx.lookup(x).expect("checked by synthesis");
            node(Rule::Ax, ctx, t, Layout::of_unit(u), vec![])
        }
        Term::Zero => node(Rule::AxZero, ctx, t, Layout::Zero, vec![]),
        Term::Abs(x, u, body) => {
            let p = build(&ctx.extend(x, u.clone()), body);
            let ty = Layout::arrow(Layout::of_unit(u), p.ty.clone());
            node(Rule::ArrowIntro, ctx, t, ty, vec![p])
        }
        Term::TyAbs(x, body) => {
            let p = build(&ctx.with_tyvar(x), body);
            let ty = Layout::Forall(x.clone(), Box::new(p.ty.clone()));
            node(Rule::ForallIntro, ctx, t, ty, vec![p])
        }
        Term::TyApp(f, v) => {
            let p = build(ctx, f);
            let Layout::Forall(x, body) = &p.ty else { unreachable!("checked by synthesis") };
            let ty = body.subst(x, &Layout::of_unit(v));
            settle(node(Rule::ForallElim(v.clone()), ctx, t, ty, vec![p]))
        }
        Term::Sum(items) => {
            let mut acc = build(ctx, &items[0]);
            for k in 1..items.len() {
                let next = build(ctx, &items[k]);
                let term = if k + 1 == items.len() { t.clone() } else { Term::Sum(items[..=k].to_vec()) };
                let ty = Layout::plus(acc.ty.clone(), next.ty.clone());
                acc = node(Rule::SumIntro, ctx, &term, ty, vec![acc, next]);
            }
            settle(acc)
        }
        Term::App(f, a) => {
            let pf = build(ctx, f);
            let pa = build(ctx, a);
            let ty = app_layout(&pf.ty, &pa.ty);
            settle(node(Rule::ArrowElim, ctx, t, ty, vec![pf, pa]))
        }
        Term::Scaled(..) => unreachable!("Additive terms carry no scalars"),
    }
}

/// Conclusion of `→E`: the codomains, one per (function summand, argument
/// summand) pair, function-major.
pub(crate) fn app_layout(fun: &Layout, arg: &Layout) -> Layout {
    let (fs, n_args) = (summand_layouts(fun), summand_layouts(arg).len());
    Layout::comb(fs.iter().flat_map(|f| {
        let Layout::Arrow(_, cod) = f else { unreachable!("checked by synthesis") };
        std::iter::repeat((**cod).clone()).take(n_args)
    }))
}

/// The leaves of a canonical layout; empty for `Zero`.
pub(crate) fn summand_layouts(l: &Layout) -> Vec<Layout> {
    match l {
        Layout::Zero => Vec::new(),
        _ => comb_leaves(l).into_iter().cloned().collect(),
    }
}

impl DNode {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(DNode::size).sum::<usize>()
    }

    fn fmt_indent(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let name = match &self.rule {
            Rule::Ax => "ax".to_string(),
            Rule::AxZero => "ax0".to_string(),
            Rule::ArrowIntro => "->I".to_string(),
            Rule::ArrowElim => "->E".to_string(),
            Rule::ForallIntro => "forallI".to_string(),
            Rule::ForallElim(v) => format!("forallE[{v}]"),
            Rule::SumIntro => "+I".to_string(),
            Rule::Eq(moves) => {
                let ms: Vec<String> = moves.iter().map(Move::to_string).collect();
                format!("eq[{}]", ms.join(", "))
            }
        };
        writeln!(f, "{:width$}{name}  {} |- {} : {}", "", self.context, self.term, self.ty, width = 2 * depth)?;
        for p in &self.premises {
            p.fmt_indent(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt_indent(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_context, parse_term};

    fn d(ctx: &str, t: &str) -> Derivation {
        let t = ATerm::new(parse_term(t).unwrap()).unwrap();
        derive(&parse_context(ctx).unwrap(), &t).unwrap()
    }

    fn all_nodes(n: &DNode) -> Vec<&DNode> {
        let mut v = vec![n];
        for p in &n.premises {
            v.extend(all_nodes(p));
        }
        v
    }

    #[test]
    fn conclusions_match_synthesis() {
        let ctx = "f:U -> T, g:U -> R, b:U, c:U";
        for src in ["(f + g) (b + c)", "f b + g c + b", "(f + g) zero", "zero b", "\\x:U. f x + g x"] {
            let der = d(ctx, src);
            let expected = synthesize(&parse_context(ctx).unwrap(), &parse_term(src).unwrap()).unwrap();
            assert_eq!(der.root.ty.to_type(), expected, "{src}");
            assert!(der.root.ty.is_canonical());
        }
    }

    #[test]
    fn eq_nodes_sit_over_non_canonical_conclusions() {
        let der = d("f:U -> (A + C), g:U -> B, b:U", "(f + g) b + zero");
        assert!(matches!(der.root.rule, Rule::Eq(_)));
        for n in all_nodes(&der.root) {
            if let Rule::ArrowElim = n.rule {
                assert_eq!(n.ty.to_string(), "A + C + B");
            }
            if let Rule::Eq(ms) = &n.rule {
                assert_eq!(super::super::layout::apply_all(&n.premises[0].ty, ms).unwrap(), n.ty);
            }
        }
    }

    #[test]
    fn instantiation_with_a_sum_codomain() {
        // X + Z is sorted, but after X := Y -> (Y + A) the arrow must move right
        let der = d("i:forall X. X -> (X + Z)", "i @ (Y -> (Y + A))");
        assert!(der.root.ty.is_canonical());
        assert!(matches!(der.root.rule, Rule::Eq(_)));
        assert!(matches!(der.root.premises[0].rule, Rule::ForallElim(_)));
    }
}

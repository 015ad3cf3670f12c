//! Syntax-directed type synthesis. Type equivalence is equality of
//! canonical forms, so the conversion rule never has to be guessed.

use thiserror::Error;

use crate::precision::precedes;
use crate::rewrite::{step, PathStep, RuleId};
use crate::syntax::{Context, Term, Type, UnitType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{term}` has type {ty}, which is not a sum of arrows")]
    NotAnArrowSum { term: Term, ty: Type },
    #[error("`{term}` has type {ty}; expected summands equivalent to {expected}")]
    DomainMismatch { term: Term, ty: Type, expected: UnitType },
    #[error("`{term}` has type {ty}, which is not a forall type")]
    NotForall { term: Term, ty: Type },
    #[error("`{term}` has type {ty}, which is not a unit type")]
    NotUnitType { term: Term, ty: Type },
    #[error("type variable {var} is free in the context of `{term}` : {ty}")]
    VariableEscapes { var: String, term: Term, ty: Type },
}

pub fn synthesize(ctx: &Context, t: &Term) -> Result<Type, TypeError> {
    match t {
        Term::Var(x) => ctx
            .lookup(x)
            .map(|u| Type::unit(u.clone()))
            .ok_or_else(|| TypeError::UnboundVariable(x.clone())),
        Term::Zero => Ok(Type::zero()),
        Term::Abs(x, u, body) => {
            let cod = synthesize(&ctx.extend(x, u.clone()), body)?;
            Ok(Type::unit(UnitType::arrow(u.clone(), cod)))
        }
        Term::App(fun, arg) => {
            let fun_ty = synthesize(ctx, fun)?;
            let mut domain: Option<&UnitType> = None;
            let mut codomains = Vec::with_capacity(fun_ty.len());
            for summand in fun_ty.summands() {
                let UnitType::Arrow(dom, cod) = summand else {
                    return Err(TypeError::NotAnArrowSum { term: (**fun).clone(), ty: fun_ty.clone() });
                };
                match domain {
                    None => domain = Some(dom),
                    Some(d) if d == dom.as_ref() => {}
                    Some(d) => {
                        return Err(TypeError::DomainMismatch {
                            term: (**fun).clone(),
                            ty: fun_ty.clone(),
                            expected: d.clone(),
                        })
                    }
                }
                codomains.push(cod);
            }
            let arg_ty = synthesize(ctx, arg)?;
            // with no arrows the domain is whatever the argument's summands share
            let expected = domain.or(arg_ty.summands().first());
            if let Some(expected) = expected {
                if arg_ty.summands().iter().any(|s| s != expected) {
                    return Err(TypeError::DomainMismatch {
                        term: (**arg).clone(),
                        ty: arg_ty.clone(),
                        expected: expected.clone(),
                    });
                }
            }
            let copies = arg_ty.len();
            Ok(codomains
                .into_iter()
                .fold(Type::zero(), |acc, cod| acc.plus(&cod.times(copies))))
        }
        Term::TyAbs(var, body) => {
            let ty = synthesize(ctx, body)?;
            let Some(unit) = ty.as_unit() else {
                return Err(TypeError::NotUnitType { term: (**body).clone(), ty });
            };
            if ctx.free_type_vars().contains(var) {
                return Err(TypeError::VariableEscapes { var: var.clone(), term: t.clone(), ty });
            }
            Ok(Type::unit(UnitType::forall(var.clone(), unit.clone())))
        }
        Term::TyApp(fun, arg) => {
            let ty = synthesize(ctx, fun)?;
            match ty.as_unit() {
                Some(UnitType::Forall(var, body)) => Ok(Type::unit(body.subst(var, arg))),
                Some(_) => Err(TypeError::NotForall { term: (**fun).clone(), ty }),
                None => Err(TypeError::NotUnitType { term: (**fun).clone(), ty }),
            }
        }
        Term::Scaled(alpha, body) => Ok(synthesize(ctx, body)?.times(alpha.floor())),
        Term::Sum(items) => items
            .iter()
            .try_fold(Type::zero(), |acc, item| Ok(acc.plus(&synthesize(ctx, item)?))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SrFailure {
    Untypable(TypeError),
    LessPrecise(Type),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrViolation {
    pub reduct: Term,
    pub rule: RuleId,
    pub path: Vec<PathStep>,
    pub failure: SrFailure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrReport {
    pub ty: Type,
    pub reducts: usize,
    pub violations: Vec<SrViolation>,
}

impl SrReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every one-step reduct of `t` for a type at least as precise as `t`'s.
pub fn check_subject_reduction(ctx: &Context, t: &Term) -> Result<SrReport, TypeError> {
    let ty = synthesize(ctx, t)?;
    let reducts = step(t);
    let mut violations = Vec::new();
    for r in &reducts {
        let failure = match synthesize(ctx, &r.term) {
            Err(e) => Some(SrFailure::Untypable(e)),
            Ok(next) if precedes(&ty, &next).is_err() => Some(SrFailure::LessPrecise(next)),
            Ok(_) => None,
        };
        if let Some(failure) = failure {
            violations.push(SrViolation { reduct: r.term.clone(), rule: r.rule, path: r.path.clone(), failure });
        }
    }
    Ok(SrReport { ty, reducts: reducts.len(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_context, parse_term, parse_type};

    fn synth(ctx: &str, t: &str) -> Result<Type, TypeError> {
        synthesize(&parse_context(ctx).unwrap(), &parse_term(t).unwrap())
    }

    fn ty(src: &str) -> Type {
        parse_type(src).unwrap()
    }

    #[test]
    fn scalar_floor() {
        assert_eq!(synth("t:T", "0.9 . t + 1.1 . t").unwrap(), ty("T"));
        assert_eq!(synth("t:T", "2 . t").unwrap(), ty("T + T"));
        assert_eq!(synth("t:T", "5/2 . t").unwrap(), ty("T + T"));
        assert_eq!(synth("t:T", "1/2 . t").unwrap(), ty("Zero"));
    }

    #[test]
    fn heterogeneous_application() {
        let ctx = "f:U -> T, g:U -> R, b:U, c:U";
        assert_eq!(synth(ctx, "(f + g) (b + c)").unwrap(), ty("T + T + R + R"));
        assert_eq!(synth(ctx, "(f + g) zero").unwrap(), ty("Zero"));
        assert_eq!(synth(ctx, "zero (b + c)").unwrap(), ty("Zero"));
    }

    #[test]
    fn application_errors() {
        let ctx = "f:U -> T, h:V -> T, b:U, v:V, x:X";
        assert!(matches!(synth(ctx, "x b"), Err(TypeError::NotAnArrowSum { .. })));
        assert!(matches!(synth(ctx, "(f + h) b"), Err(TypeError::DomainMismatch { .. })));
        assert!(matches!(synth(ctx, "f (b + v)"), Err(TypeError::DomainMismatch { .. })));
        assert!(matches!(synth(ctx, "zero (b + v)"), Err(TypeError::DomainMismatch { .. })));
        assert!(matches!(synth(ctx, "y"), Err(TypeError::UnboundVariable(_))));
    }

    #[test]
    fn polymorphism() {
        assert_eq!(synth("", "/\\X. \\x:X. x").unwrap(), ty("forall X. X -> X"));
        assert_eq!(synth("", "(/\\X. \\x:X. x) @ Y").unwrap(), ty("Y -> Y"));
        assert!(matches!(synth("x:X", "/\\X. x"), Err(TypeError::VariableEscapes { .. })));
        assert!(matches!(synth("x:X", "/\\Y. x + x"), Err(TypeError::NotUnitType { .. })));
        assert!(matches!(synth("x:X", "x @ Y"), Err(TypeError::NotForall { .. })));
        assert!(matches!(synth("", "(/\\X. \\x:X. x) + (/\\X. \\x:X. x) @ Y"), Ok(_)));
        assert!(matches!(
            synth("", "((/\\X. \\x:X. x) + (/\\X. \\x:X. x)) @ Y"),
            Err(TypeError::NotUnitType { .. })
        ));
    }

    #[test]
    fn self_application_is_rejected() {
        for u in ["X", "X -> X", "forall X. X", "(X -> X) -> X", "forall X. X -> X"] {
            let src = format!("\\x:{u}. b + x x");
            assert!(synth("b:B", &src).is_err(), "{src}");
        }
    }

    #[test]
    fn subject_reduction_on_factoring() {
        let ctx = parse_context("t:T").unwrap();
        let report = check_subject_reduction(&ctx, &parse_term("0.9 . t + 1.1 . t").unwrap()).unwrap();
        assert!(report.passed());
        assert_eq!(report.reducts, 1);
    }

    #[test]
    fn floor_zero_head_breaks_subject_reduction() {
        // (1/2 . f) w : Zero, but 1/2 . (f w) needs f's domain to match w
        let ctx = parse_context("f:V -> T, w:U").unwrap();
        let t = parse_term("(1/2 . f) w").unwrap();
        assert_eq!(synthesize(&ctx, &t).unwrap(), ty("Zero"));
        let report = check_subject_reduction(&ctx, &t).unwrap();
        assert!(matches!(report.violations[0].failure, SrFailure::Untypable(_)));
    }
}

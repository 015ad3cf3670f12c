//! Concrete syntax for terms, types and contexts.
//!
//! ```text
//! term  ::= scaled ('+' scaled)*
//! scaled::= NUM '.' scaled | '\' x ':' unit '.' term | '/\' X '.' term | app
//! app   ::= atom (atom | '@' tyatom)*
//! atom  ::= x | 'zero' | '(' term ')'
//! type  ::= arrow ('+' arrow)*
//! arrow ::= 'forall' X '.' arrow | 'Zero' | tyatom ('->' arrow)?
//! ```

use std::fmt;

use thiserror::Error;

use crate::syntax::{canonicalize_term, Context, Scalar, Term, Type, UnitType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    Lambda,
    BigLambda,
    Forall,
    Zero,
    TyZero,
    Colon,
    Dot,
    Plus,
    At,
    Arrow,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Num(s) => write!(f, "`{s}`"),
            Tok::Lambda => write!(f, "`\\`"),
            Tok::BigLambda => write!(f, "`/\\`"),
            Tok::Forall => write!(f, "`forall`"),
            Tok::Zero => write!(f, "`zero`"),
            Tok::TyZero => write!(f, "`Zero`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::At => write!(f, "`@`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| ParseError { pos, message };
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|&(_, c)| c);
        match c {
            c if c.is_whitespace() => i += 1,
            '\\' | 'λ' => {
                out.push((pos, Tok::Lambda));
                i += 1;
            }
            'Λ' => {
                out.push((pos, Tok::BigLambda));
                i += 1;
            }
            '∀' => {
                out.push((pos, Tok::Forall));
                i += 1;
            }
            '/' if next == Some('\\') => {
                out.push((pos, Tok::BigLambda));
                i += 2;
            }
            '-' if next == Some('>') => {
                out.push((pos, Tok::Arrow));
                i += 2;
            }
            '→' => {
                out.push((pos, Tok::Arrow));
                i += 1;
            }
            ':' => {
                out.push((pos, Tok::Colon));
                i += 1;
            }
            '.' => {
                out.push((pos, Tok::Dot));
                i += 1;
            }
            '+' => {
                out.push((pos, Tok::Plus));
                i += 1;
            }
            '@' => {
                out.push((pos, Tok::At));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((pos, Tok::Comma));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                let digit_at = |j: usize| chars.get(j).is_some_and(|&(_, c)| c.is_ascii_digit());
                while digit_at(i) {
                    i += 1;
                }
                // a '.' only continues the literal when a digit follows, so `2.x` is `2 . x`
                if chars.get(i).is_some_and(|&(_, c)| c == '.' || c == '/') && digit_at(i + 1) {
                    i += 1;
                    while digit_at(i) {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Num(text)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while chars
                    .get(i)
                    .is_some_and(|&(_, c)| c.is_alphanumeric() || c == '_' || c == '\'')
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                let tok = match text.as_str() {
                    "zero" => Tok::Zero,
                    "Zero" => Tok::TyZero,
                    "forall" => Tok::Forall,
                    _ => Tok::Ident(text),
                };
                out.push((pos, tok));
            }
            other => return Err(err(pos, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0, end: src.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.offset(), message: message.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(tok) => self.error(format!("expected {wanted}, found {tok}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.unexpected(&tok.to_string())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.unexpected("end of input"),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut items = vec![self.scaled()?];
        while self.eat(&Tok::Plus) {
            items.push(self.scaled()?);
        }
        Ok(Term::sum(items))
    }

    fn scaled(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Num(text)) => {
                let text = text.clone();
                let at = self.offset();
                let alpha: Scalar = text
                    .parse()
                    .map_err(|e| ParseError { pos: at, message: format!("{e}") })?;
                self.pos += 1;
                self.expect(Tok::Dot)?;
                Ok(Term::scaled(alpha, self.scaled()?))
            }
            Some(Tok::Lambda) | Some(Tok::BigLambda) => self.binder(),
            _ => self.app(),
        }
    }

    fn binder(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::Lambda) {
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.unit_type()?;
            self.expect(Tok::Dot)?;
            Ok(Term::abs(x, ty, self.term()?))
        } else {
            self.expect(Tok::BigLambda)?;
            let var = self.ident()?;
            self.expect(Tok::Dot)?;
            Ok(Term::ty_abs(var, self.term()?))
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut head = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::At) => {
                    self.pos += 1;
                    let ty = self.type_atom()?;
                    head = Term::ty_app(head, ty);
                }
                Some(Tok::Ident(_)) | Some(Tok::Zero) | Some(Tok::LParen) => {
                    let arg = self.atom()?;
                    head = Term::app(head, arg);
                }
                // a trailing abstraction argument extends to the right
                Some(Tok::Lambda) | Some(Tok::BigLambda) => {
                    let arg = self.binder()?;
                    return Ok(Term::app(head, arg));
                }
                _ => return Ok(head),
            }
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(Term::Var(self.ident()?)),
            Some(Tok::Zero) => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a term"),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let mut acc = self.arrow()?;
        while self.eat(&Tok::Plus) {
            acc = acc.plus(&self.arrow()?);
        }
        Ok(acc)
    }

    fn arrow(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Some(Tok::Forall) => {
                self.pos += 1;
                let var = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = self.unit_type()?;
                Ok(Type::unit(UnitType::forall(var, body)))
            }
            Some(Tok::TyZero) => {
                self.pos += 1;
                Ok(Type::zero())
            }
            _ => {
                let start = self.offset();
                let prim = self.type_prim()?;
                if self.eat(&Tok::Arrow) {
                    let dom = match prim.as_unit() {
                        Some(u) => u.clone(),
                        None => {
                            return Err(ParseError {
                                pos: start,
                                message: format!("arrow domain must be a unit type, found `{prim}`"),
                            })
                        }
                    };
                    let cod = self.arrow()?;
                    Ok(Type::unit(UnitType::arrow(dom, cod)))
                } else {
                    Ok(prim)
                }
            }
        }
    }

    fn type_prim(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(Type::unit(UnitType::Var(self.ident()?))),
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a type"),
        }
    }

    fn unit_type(&mut self) -> Result<UnitType, ParseError> {
        let start = self.offset();
        let t = self.arrow()?;
        Self::require_unit(t, start)
    }

    fn type_atom(&mut self) -> Result<UnitType, ParseError> {
        let start = self.offset();
        let t = self.type_prim()?;
        Self::require_unit(t, start)
    }

    fn require_unit(t: Type, pos: usize) -> Result<UnitType, ParseError> {
        match t.as_unit() {
            Some(u) => Ok(u.clone()),
            None => Err(ParseError { pos, message: format!("expected a unit type, found `{t}`") }),
        }
    }
}

/// Parses a term and returns its canonical form.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(canonicalize_term(&t))
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_unit_type(src: &str) -> Result<UnitType, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.unit_type()?;
    p.finish()?;
    Ok(t)
}

/// `x:U, y:V`; free type variables of the annotations are put in scope.
pub fn parse_context(src: &str) -> Result<Context, ParseError> {
    let mut p = Parser::new(src)?;
    let mut ctx = Context::new();
    if p.peek().is_none() {
        return Ok(ctx);
    }
    loop {
        let name = p.ident()?;
        p.expect(Tok::Colon)?;
        let ty = p.unit_type()?;
        for v in ty.free_vars() {
            ctx = ctx.with_tyvar(&v);
        }
        ctx = ctx.extend(&name, ty);
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.finish()?;
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_eq;

    fn t(src: &str) -> Term {
        parse_term(src).unwrap()
    }

    #[test]
    fn application_binds_tighter_than_scalar_and_sum() {
        let parsed = t("2 . f x + y");
        let expected = canonicalize_term(&Term::Sum(vec![
            Term::scaled(Scalar::from_integer(2), Term::app(Term::var("f"), Term::var("x"))),
            Term::var("y"),
        ]));
        assert_eq!(parsed, expected);
    }

    #[test]
    fn abstraction_body_extends_right() {
        let parsed = t("\\x:X. x + y");
        match parsed {
            Term::Abs(_, _, body) => assert!(matches!(*body, Term::Sum(_))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scalar_literals() {
        assert!(alpha_eq(&t("0.9.x"), &t("9/10 . x")));
        assert!(alpha_eq(&t("2.x"), &t("2 . x")));
        assert!(parse_term("-1 . x").is_err());
    }

    #[test]
    fn type_application_and_annotations() {
        let parsed = t("(/\\X. \\x:X. x) @ (Y -> Y)");
        assert!(matches!(parsed, Term::TyApp(..)));
        assert!(parse_term("f @ X -> Y").is_err());
        let arrow = parse_unit_type("X -> Y -> Z").unwrap();
        assert_eq!(arrow.to_string(), "X -> Y -> Z");
        let sum_cod = parse_unit_type("X -> (Y + Z)").unwrap();
        assert_eq!(sum_cod.to_string(), "X -> (Y + Z)");
        assert!(parse_unit_type("(X + Y) -> Z").is_err());
        assert!(parse_unit_type("X + Y").is_err());
    }

    #[test]
    fn types_with_zero() {
        let zero = parse_type("Zero").unwrap();
        assert!(zero.is_zero());
        assert_eq!(parse_type("X + Zero").unwrap(), parse_type("X").unwrap());
        assert_eq!(parse_unit_type("X -> Zero").unwrap().to_string(), "X -> Zero");
    }

    #[test]
    fn print_parse_round_trip() {
        for src in [
            "\\x:X. x",
            "(\\x:X. x) y",
            "f (1/2 . x + y)",
            "(\\x:X -> Y. \\y:X. x y) + zero",
            "/\\X. \\x:forall Y. Y -> X. x @ X",
            "2 . 3 . x",
            "(2 . f) x",
            "f x y + f (x y)",
            "x @ (forall X. X)",
            "\\x:(X -> X) -> X. x",
        ] {
            let parsed = t(src);
            let printed = parsed.to_string();
            let reparsed = t(&printed);
            assert_eq!(reparsed, parsed, "{src} printed as {printed}");
        }
    }

    #[test]
    fn contexts() {
        let ctx = parse_context("x:X, f:X -> Y").unwrap();
        assert_eq!(ctx.bindings().len(), 2);
        assert!(ctx.tyvars().contains("Y"));
        assert!(parse_context("").unwrap().is_empty());
        assert!(parse_context("x:X +").is_err());
    }

    #[test]
    fn errors_report_offsets() {
        let e = parse_term("f (x").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse_term("x $").unwrap_err();
        assert_eq!(e.pos, 2);
    }

    #[test]
    fn unicode_forms() {
        assert!(alpha_eq(&t("λx:X. x"), &t("\\x:X. x")));
        assert_eq!(parse_unit_type("∀X. X → X").unwrap(), parse_unit_type("forall X. X -> X").unwrap());
    }
}

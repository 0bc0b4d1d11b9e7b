//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := "true" | "false" | atom | "~" formula | formula "/\" formula
//!          | formula "\/" formula | formula "->" formula
//!          | "exists" ident "." formula | "forall" ident "." formula
//!          | "(" formula ")"
//! atom    := term "=" term | term "<" term | "G(" term ")"
//!          | "Gl[" scalarlist "](" term ")" | "pp{" ppspec "}(" termlist ")"
//! term    := ident | scalar "*" term | term "+" term | term "-" term
//!          | "-" term | "0" | "f[" scalarlist ";" int "](" term ")" | "(" term ")"
//! ppspec  := matrix "|" matrix "|" intvector
//! ```
//!
//! Scalars are rationals `p/q`, the field generator `a` (with powers `a^k`),
//! or parenthesized polynomials such as `(1 + 2*a - a^2)`.  Implication is
//! eliminated during parsing (`p -> q` becomes `~p \/ q`), and every parsed
//! formula is alpha-normalized so bound names are distinct from free ones.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::formula::{AtomExpr, FormulaExpr, PPConstraint, TermExpr};
use crate::linalg::IntMatrix;
use crate::scalar::{FieldElem, FieldSpec, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Pipe,
    Star,
    Plus,
    Minus,
    Slash,
    Caret,
    Eq,
    Lt,
    Tilde,
    Dot,
    AndOp,
    OrOp,
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Dot => "`.`".into(),
            Tok::AndOp => "`/\\`".into(),
            Tok::OrOp => "`\\/`".into(),
            Tok::Arrow => "`->`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBracket, i));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBracket, i));
                i += 1;
            }
            '{' => {
                out.push((Tok::LBrace, i));
                i += 1;
            }
            '}' => {
                out.push((Tok::RBrace, i));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            ';' => {
                out.push((Tok::Semi, i));
                i += 1;
            }
            '|' => {
                out.push((Tok::Pipe, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, i));
                i += 1;
            }
            '=' => {
                out.push((Tok::Eq, i));
                i += 1;
            }
            '<' => {
                out.push((Tok::Lt, i));
                i += 1;
            }
            '~' => {
                out.push((Tok::Tilde, i));
                i += 1;
            }
            '.' => {
                out.push((Tok::Dot, i));
                i += 1;
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    out.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    out.push((Tok::Minus, i));
                    i += 1;
                }
            }
            '/' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'\\' {
                    out.push((Tok::AndOp, i));
                    i += 2;
                } else {
                    out.push((Tok::Slash, i));
                    i += 1;
                }
            }
            '\\' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'/' {
                    out.push((Tok::OrOp, i));
                    i += 2;
                } else {
                    return Err(Error::Syntax { position: i, expected: "`\\/`".into() });
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((Tok::Int(n), start));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Syntax {
                    position: i,
                    expected: "a token of the formula grammar".into(),
                })
            }
        }
    }
    Ok(out)
}

const KEYWORDS: &[&str] = &["true", "false", "exists", "forall", "G", "Gl", "pp", "f", "a"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    spec: Arc<FieldSpec>,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        match self.peek() {
            Some(got) if got == t => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(&t.describe())),
        }
    }

    fn err(&self, expected: &str) -> Error {
        Error::Syntax { position: self.here(), expected: expected.to_string() }
    }

    // ----- formulas -------------------------------------------------------

    fn formula(&mut self) -> Result<FormulaExpr> {
        let lhs = self.or_level()?;
        if matches!(self.peek(), Some(Tok::Arrow)) {
            self.bump();
            let rhs = self.formula()?; // right-associative
            return Ok(FormulaExpr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or_level(&mut self) -> Result<FormulaExpr> {
        let mut acc = self.and_level()?;
        while matches!(self.peek(), Some(Tok::OrOp)) {
            self.bump();
            let rhs = self.and_level()?;
            acc = FormulaExpr::Or(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn and_level(&mut self) -> Result<FormulaExpr> {
        let mut acc = self.unary()?;
        while matches!(self.peek(), Some(Tok::AndOp)) {
            self.bump();
            let rhs = self.unary()?;
            acc = FormulaExpr::And(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<FormulaExpr> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                let inner = self.unary()?;
                Ok(FormulaExpr::Not(Box::new(inner)))
            }
            Some(Tok::Ident(s)) if s == "exists" || s == "forall" => {
                let is_exists = s == "exists";
                self.bump();
                let var = self.binder_ident()?;
                self.expect(&Tok::Dot)?;
                let body = self.formula()?; // quantifiers extend maximally right
                Ok(if is_exists {
                    FormulaExpr::exists(var, body)
                } else {
                    FormulaExpr::forall(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn binder_ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let v = s.clone();
                self.bump();
                Ok(v)
            }
            _ => Err(self.err("a variable name")),
        }
    }

    fn primary(&mut self) -> Result<FormulaExpr> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == "true" => {
                self.bump();
                Ok(FormulaExpr::True)
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.bump();
                Ok(FormulaExpr::False)
            }
            Some(Tok::Ident(s)) if s == "G" && matches!(self.peek2(), Some(Tok::LParen)) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(FormulaExpr::Atom(AtomExpr::InG(t)))
            }
            Some(Tok::Ident(s)) if s == "Gl" => {
                self.bump();
                self.expect(&Tok::LBracket)?;
                let lams = self.scalar_list(&Tok::RBracket)?;
                self.expect(&Tok::RBracket)?;
                self.expect(&Tok::LParen)?;
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(FormulaExpr::Atom(AtomExpr::in_g_lambda(lams, t)?))
            }
            Some(Tok::Ident(s)) if s == "pp" => {
                self.bump();
                self.expect(&Tok::LBrace)?;
                let constraint = self.ppspec()?;
                self.expect(&Tok::RBrace)?;
                self.expect(&Tok::LParen)?;
                let mut args = vec![self.term()?];
                while matches!(self.peek(), Some(Tok::Comma)) {
                    self.bump();
                    args.push(self.term()?);
                }
                self.expect(&Tok::RParen)?;
                Ok(FormulaExpr::Atom(AtomExpr::pp(constraint, args)?))
            }
            Some(Tok::LParen) => {
                // try a parenthesized formula; fall back to a relational atom
                let snap = self.pos;
                self.bump();
                if let Ok(inner) = self.formula() {
                    if self.expect(&Tok::RParen).is_ok() {
                        return Ok(inner);
                    }
                }
                self.pos = snap;
                self.relational_atom()
            }
            _ => self.relational_atom(),
        }
    }

    fn relational_atom(&mut self) -> Result<FormulaExpr> {
        let lhs = self.term()?;
        match self.peek() {
            Some(Tok::Eq) => {
                self.bump();
                let rhs = self.term()?;
                Ok(FormulaExpr::Atom(AtomExpr::Eq(lhs, rhs)))
            }
            Some(Tok::Lt) => {
                let pos = self.here();
                self.bump();
                if !self.spec.is_ordered() {
                    return Err(Error::Syntax {
                        position: pos,
                        expected: "`=` (order atoms need an ordered configuration)".into(),
                    });
                }
                let rhs = self.term()?;
                Ok(FormulaExpr::Atom(AtomExpr::Lt(lhs, rhs)))
            }
            _ => Err(self.err("`=` or `<`")),
        }
    }

    // ----- terms ----------------------------------------------------------

    fn term(&mut self) -> Result<TermExpr> {
        let mut acc = self.term_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term_factor()?;
                    acc = TermExpr::sum(acc, rhs);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term_factor()?;
                    acc = TermExpr::sum(acc, TermExpr::neg(rhs, &FieldElem::one(&self.spec)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term_factor(&mut self) -> Result<TermExpr> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                let inner = self.term_factor()?;
                Ok(TermExpr::neg(inner, &FieldElem::one(&self.spec)))
            }
            Some(Tok::Int(_)) => {
                let q = self.rational()?;
                if matches!(self.peek(), Some(Tok::Star)) {
                    self.bump();
                    let inner = self.term_factor()?;
                    Ok(TermExpr::scale(FieldElem::from_rational(&self.spec, q), inner))
                } else if q.is_zero() {
                    Ok(TermExpr::Zero)
                } else {
                    Err(self.err("`*` after a scalar (only `0` is a standalone term)"))
                }
            }
            Some(Tok::Ident(s)) if s == "a" => {
                let lam = self.generator_power()?;
                self.expect(&Tok::Star)?;
                let inner = self.term_factor()?;
                Ok(TermExpr::scale(lam, inner))
            }
            Some(Tok::Ident(s)) if s == "f" => {
                self.bump();
                self.expect(&Tok::LBracket)?;
                let lams = self.scalar_list(&Tok::Semi)?;
                self.expect(&Tok::Semi)?;
                let idx = self.integer()?;
                self.expect(&Tok::RBracket)?;
                self.expect(&Tok::LParen)?;
                let arg = self.term()?;
                self.expect(&Tok::RParen)?;
                let index = usize::try_from(&idx)
                    .map_err(|_| self.err("a positive coordinate index"))?;
                Ok(TermExpr::fapp(lams, index, arg)?)
            }
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let v = s.clone();
                self.bump();
                Ok(TermExpr::Var(v))
            }
            Some(Tok::LParen) => {
                // "(scalar-poly) * term" or a parenthesized term
                let snap = self.pos;
                self.bump();
                if let Ok(lam) = self.scalar_poly() {
                    if self.expect(&Tok::RParen).is_ok() && matches!(self.peek(), Some(Tok::Star)) {
                        self.bump();
                        let inner = self.term_factor()?;
                        return Ok(TermExpr::scale(lam, inner));
                    }
                }
                self.pos = snap;
                self.bump();
                let inner = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.err("a term")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        match self.bump() {
            Some(Tok::Int(n)) => Ok(n),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("an integer"))
            }
        }
    }

    fn signed_integer(&mut self) -> Result<BigInt> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            Ok(-self.integer()?)
        } else {
            self.integer()
        }
    }

    fn rational(&mut self) -> Result<Rat> {
        let n = self.integer()?;
        if matches!(self.peek(), Some(Tok::Slash)) {
            self.bump();
            let d = self.integer()?;
            if d.is_zero() {
                return Err(self.err("a nonzero denominator"));
            }
            Ok(Rat::new(n, d))
        } else {
            Ok(Rat::from(n))
        }
    }

    fn generator_power(&mut self) -> Result<FieldElem> {
        // caller has seen ident `a`
        let pos = self.here();
        self.bump();
        let mut k = 1usize;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let e = self.integer()?;
            k = usize::try_from(&e).map_err(|_| self.err("a small exponent"))?;
        }
        if self.spec.is_rationals() {
            return Err(Error::Syntax {
                position: pos,
                expected: "a rational scalar (no field generator over the rationals)".into(),
            });
        }
        let gen = FieldElem::generator(&self.spec).expect("number field has a generator");
        let mut acc = FieldElem::one(&self.spec);
        for _ in 0..k {
            acc = acc.mul(&gen);
        }
        Ok(acc)
    }

    // ----- scalars --------------------------------------------------------

    fn scalar_list(&mut self, stop: &Tok) -> Result<Vec<FieldElem>> {
        let mut out = vec![self.scalar_poly()?];
        while matches!(self.peek(), Some(Tok::Comma)) {
            self.bump();
            out.push(self.scalar_poly()?);
        }
        if self.peek() != Some(stop) {
            return Err(self.err(&stop.describe()));
        }
        Ok(out)
    }

    fn scalar_poly(&mut self) -> Result<FieldElem> {
        let mut negate = false;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            negate = true;
        }
        let mut acc = self.scalar_mono()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let m = self.scalar_mono()?;
                    acc = acc.add(&m);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let m = self.scalar_mono()?;
                    acc = acc.sub(&m);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn scalar_mono(&mut self) -> Result<FieldElem> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let q = self.rational()?;
                let coeff = FieldElem::from_rational(&self.spec, q);
                if matches!(self.peek(), Some(Tok::Star)) {
                    // rational * a^k
                    self.bump();
                    if !matches!(self.peek(), Some(Tok::Ident(s)) if s == "a") {
                        return Err(self.err("the field generator `a`"));
                    }
                    let pow = self.generator_power()?;
                    Ok(coeff.mul(&pow))
                } else {
                    Ok(coeff)
                }
            }
            Some(Tok::Ident(s)) if s == "a" => self.generator_power(),
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.scalar_poly()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.err("a scalar")),
        }
    }

    // ----- pp spec --------------------------------------------------------

    fn ppspec(&mut self) -> Result<PPConstraint> {
        let a_rows = self.int_matrix_rows(&Tok::Pipe)?;
        self.expect(&Tok::Pipe)?;
        let b_rows = self.int_matrix_rows(&Tok::Pipe)?;
        self.expect(&Tok::Pipe)?;
        let c = self.int_vector(&Tok::RBrace)?;
        let n = c.len().max(a_rows.len()).max(b_rows.len());
        let build = |rows: Vec<Vec<BigInt>>| -> Result<IntMatrix> {
            if rows.is_empty() {
                return Ok(IntMatrix::zero(n, 0));
            }
            if rows.len() != n {
                return Err(Error::DimensionMismatch("pp row counts differ".into()));
            }
            let w = rows[0].len();
            if rows.iter().any(|r| r.len() != w) {
                return Err(Error::DimensionMismatch("ragged pp matrix".into()));
            }
            Ok(IntMatrix::from_rows(rows))
        };
        let a = build(a_rows)?;
        let b = build(b_rows)?;
        let mut c = c;
        if c.is_empty() {
            c = vec![BigInt::zero(); n];
        } else if c.len() != n {
            return Err(Error::DimensionMismatch("pp rhs length differs from rows".into()));
        }
        Ok(PPConstraint::new(a, b, c)?)
    }

    fn int_matrix_rows(&mut self, stop: &Tok) -> Result<Vec<Vec<BigInt>>> {
        if self.peek() == Some(stop) {
            return Ok(Vec::new());
        }
        let mut rows = vec![self.int_row()?];
        while matches!(self.peek(), Some(Tok::Semi)) {
            self.bump();
            rows.push(self.int_row()?);
        }
        Ok(rows)
    }

    fn int_row(&mut self) -> Result<Vec<BigInt>> {
        let mut row = vec![self.signed_integer()?];
        while matches!(self.peek(), Some(Tok::Comma)) {
            self.bump();
            row.push(self.signed_integer()?);
        }
        Ok(row)
    }

    fn int_vector(&mut self, stop: &Tok) -> Result<Vec<BigInt>> {
        if self.peek() == Some(stop) {
            return Ok(Vec::new());
        }
        self.int_row()
    }
}

/// Parse a formula under the given field configuration.
pub fn parse_formula(text: &str, spec: &Arc<FieldSpec>) -> Result<FormulaExpr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, spec: spec.clone(), end: text.len() };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.err("end of input"));
    }
    Ok(f.alpha_normalize())
}

/// Parse a term (used by model snapshots and tests).
pub fn parse_term(text: &str, spec: &Arc<FieldSpec>) -> Result<TermExpr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, spec: spec.clone(), end: text.len() };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return Err(p.err("end of input"));
    }
    Ok(t)
}

/// Parse a scalar literal in the grammar's scalar syntax.
pub fn parse_scalar(text: &str, spec: &Arc<FieldSpec>) -> Result<FieldElem> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, spec: spec.clone(), end: text.len() };
    let s = p.scalar_poly()?;
    if p.pos != p.toks.len() {
        return Err(p.err("end of input"));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_traits::One;

    fn q() -> Arc<FieldSpec> {
        FieldSpec::rationals(false)
    }

    fn q_ordered() -> Arc<FieldSpec> {
        FieldSpec::rationals(true)
    }

    fn qsqrt2() -> Arc<FieldSpec> {
        FieldSpec::number_field(vec![BigInt::from(-2), BigInt::zero(), BigInt::one()], Some(1))
            .unwrap()
    }

    #[test]
    fn parse_example_formula() {
        let f = parse_formula("exists x . G(x) /\\ ~G(x + c)", &q()).unwrap();
        let expected = FormulaExpr::exists(
            "x",
            FormulaExpr::and(
                FormulaExpr::Atom(AtomExpr::InG(TermExpr::var("x"))),
                FormulaExpr::not(FormulaExpr::Atom(AtomExpr::InG(TermExpr::sum(
                    TermExpr::var("x"),
                    TermExpr::var("c"),
                )))),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn dependent_scalar_tuple_is_rejected() {
        let err = parse_formula("Gl[1, 2](x)", &q()).unwrap_err();
        assert!(matches!(err, Error::DependentTuple(_)), "{err:?}");
    }

    #[test]
    fn order_atoms_require_ordered_mode() {
        assert!(parse_formula("x < y", &q()).is_err());
        assert!(parse_formula("x < y", &q_ordered()).is_ok());
    }

    #[test]
    fn print_parse_roundtrip_corpus() {
        let corpus = [
            "true",
            "false",
            "G(x)",
            "~G(x)",
            "G(x) /\\ G(y) \\/ x = y",
            "G(x) /\\ (G(y) \\/ x = y)",
            "exists x . forall y . x = y \\/ ~(x = y)",
            "Gl[1](c)",
            "Gl[1, a](x + 2*y)",
            "f[1, a; 2](x - 3*c) = 0",
            "2*x - 1/2*y = 0",
            "pp{1|-2|0}(x)",
            "pp{1,0;0,1|2,0;0,2|1,1}(x, y, z)",
            "exists x . G(x) /\\ ~G(x + c)",
            "(exists x . G(x)) /\\ G(c)",
            "G(c) /\\ exists x . G(x)",
            "~(exists x . ~(x = 0))",
            "0 = 0",
            "x - y + 2*z = 0",
            "-x = c",
            "1/3*x + (1 + 2*a)*y = 0",
            "a*x = y",
            "a^2*x - 2*a*y = 0",
        ];
        for text in corpus {
            let spec = if text.contains('a') { qsqrt2() } else { q() };
            let ast = parse_formula(text, &spec)
                .unwrap_or_else(|e| panic!("parse failed for `{text}`: {e}"));
            let printed = ast.to_string();
            let reparsed = parse_formula(&printed, &spec)
                .unwrap_or_else(|e| panic!("reparse failed for `{printed}`: {e}"));
            assert_eq!(ast, reparsed, "round trip failed: `{text}` -> `{printed}`");
        }
    }

    #[test]
    fn implication_desugars() {
        let f = parse_formula("G(x) -> G(y)", &q()).unwrap();
        assert_eq!(
            f,
            FormulaExpr::or(
                FormulaExpr::not(FormulaExpr::Atom(AtomExpr::InG(TermExpr::var("x")))),
                FormulaExpr::Atom(AtomExpr::InG(TermExpr::var("y"))),
            )
        );
    }

    #[test]
    fn scalar_literals() {
        let spec = qsqrt2();
        let s = parse_scalar("1 + 2*a - a^2", &spec).unwrap();
        assert_eq!(s.coords()[0], rat(-1, 1)); // 1 - 2 (a^2 = 2)
        assert_eq!(s.coords()[1], rat(2, 1));
        let t = parse_scalar("-1/2", &spec).unwrap();
        assert_eq!(t.coords()[0], rat(-1, 2));
    }

    #[test]
    fn malformed_input_reports_position() {
        let err = parse_formula("exists . G(x)", &q()).unwrap_err();
        match err {
            Error::Syntax { position, .. } => assert_eq!(position, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_standalone_versus_scalar() {
        let t = parse_term("x + 0", &q()).unwrap();
        assert_eq!(t, TermExpr::var("x"));
        assert!(parse_term("2", &q()).is_err());
        assert_eq!(parse_term("0*x", &q()).unwrap(), TermExpr::Zero);
    }

    #[test]
    fn alpha_normalization_on_parse() {
        let f = parse_formula("G(x) /\\ exists x . G(2*x)", &q()).unwrap();
        match f {
            FormulaExpr::And(_, rhs) => match *rhs {
                FormulaExpr::Exists(v, _) => assert_ne!(v, "x"),
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }
}

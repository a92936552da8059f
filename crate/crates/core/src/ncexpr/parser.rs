//! Recursive-descent parser for nc expressions.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := factor (("*" factor) | factor)*
//! factor  := ["-"] atom ["'" | "^*"]
//! atom    := var | complex-literal | "(" expr ")" | "sqrtm" "(" expr ")"
//! var     := ("X" | "A" | "B") digit+
//! complex-literal := float | float "i" | float ("+" | "-") float "i"
//! ```
//!
//! Juxtaposition is multiplication. A leading minus directly in front of a
//! number is part of the literal, so `-2+3i` is the constant `−2+3i`.

use num_complex::Complex64;

use super::ast::{NcExpr, VarKind};
use crate::error::{NcError, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, imag: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Prime,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(pos: usize, expected: &str) -> NcError {
    NcError::Syntax {
        position: pos,
        expected: expected.to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'\'' => Some(Tok::Prime),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'^' => {
                if bytes.get(i + 1) == Some(&b'*') {
                    i += 2;
                    out.push(Token {
                        tok: Tok::Prime,
                        pos: start,
                    });
                    continue;
                }
                return Err(syntax(i, "`^*`"));
            }
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let value: f64 = text[start..i].parse().map_err(|_| syntax(start, "a number"))?;
            let imag = bytes.get(i) == Some(&b'i') && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric());
            if imag {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Num { value, imag },
                pos: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                pos: start,
            });
            continue;
        }
        return Err(syntax(i, "an operator, number, variable or parenthesis"));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    end: usize,
    vars: &'a VarKind,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            Err(syntax(self.pos(), what))
        }
    }

    fn expr(&mut self) -> Result<NcExpr> {
        let mut left = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    left = NcExpr::add(left, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    left = NcExpr::sub(left, self.term()?);
                }
                _ => return Ok(left),
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Num { .. }) | Some(Tok::Ident(_)) | Some(Tok::LParen)
        )
    }

    fn term(&mut self) -> Result<NcExpr> {
        let mut left = self.factor()?;
        loop {
            let right = if self.peek() == Some(&Tok::Star) {
                self.at += 1;
                self.factor()?
            } else if self.starts_atom() {
                self.factor()?
            } else {
                return Ok(left);
            };
            left = match left {
                NcExpr::Const(c) => NcExpr::scalar_mul(c, right),
                l => NcExpr::mul(l, right),
            };
        }
    }

    fn factor(&mut self) -> Result<NcExpr> {
        let negate = self.peek() == Some(&Tok::Minus);
        if negate {
            self.at += 1;
        }
        let (mut base, folded) = if negate && matches!(self.peek(), Some(Tok::Num { .. })) {
            (NcExpr::Const(self.literal(-1.0)?), true)
        } else {
            (self.atom()?, false)
        };
        if self.peek() == Some(&Tok::Prime) {
            self.at += 1;
            base = NcExpr::adjoint(base);
        }
        if !negate || folded {
            return Ok(base);
        }
        Ok(match base {
            NcExpr::Const(c) => NcExpr::Const(-c),
            e => NcExpr::scalar_mul(Complex64::new(-1.0, 0.0), e),
        })
    }

    /// Reads `float`, `float i`, or `float ± float i`; `sign` multiplies the
    /// leading number only.
    fn literal(&mut self, sign: f64) -> Result<Complex64> {
        let Some(Tok::Num { value, imag }) = self.peek().cloned() else {
            return Err(syntax(self.pos(), "a number"));
        };
        self.at += 1;
        if imag {
            return Ok(Complex64::new(0.0, sign * value));
        }
        let re = sign * value;
        if let (Some(op @ (Tok::Plus | Tok::Minus)), Some(Tok::Num { value: im, imag: true })) =
            (self.peek().cloned(), self.peek_at(1).cloned())
        {
            self.at += 2;
            let im = if op == Tok::Minus { -im } else { im };
            return Ok(Complex64::new(re, im));
        }
        Ok(Complex64::new(re, 0.0))
    }

    fn atom(&mut self) -> Result<NcExpr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num { .. }) => Ok(NcExpr::Const(self.literal(1.0)?)),
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) if name == "sqrtm" => {
                self.at += 1;
                self.expect(Tok::LParen, "`(` after sqrtm")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(NcExpr::sqrt_pos(e))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                self.vars.lookup(&name).map(NcExpr::Var)
            }
            _ => Err(syntax(pos, "a variable, number, `(` or `sqrtm(`")),
        }
    }
}

/// Parses `text` for the given variable kind.
pub fn parse(text: &str, vars: VarKind) -> Result<NcExpr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        vars: &vars,
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(syntax(p.pos(), "an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::super::ast::serialize;
    use super::*;

    fn x(i: usize) -> NcExpr {
        NcExpr::var(i)
    }

    #[test]
    fn juxtaposition_and_star() {
        let v = VarKind::ComplexVars(1);
        assert_eq!(parse("X1*X1", v).unwrap(), NcExpr::mul(x(0), x(0)));
        assert_eq!(parse("X1 X1", v).unwrap(), NcExpr::mul(x(0), x(0)));
    }

    #[test]
    fn real_pair_square_difference() {
        let v = VarKind::RealPairs(1);
        let e = parse("A1 A1 - B1 B1", v).unwrap();
        assert_eq!(e, NcExpr::sub(NcExpr::mul(x(0), x(0)), NcExpr::mul(x(1), x(1))));
    }

    #[test]
    fn sqrt_of_gram() {
        let e = parse("sqrtm(X1' X1)", VarKind::ComplexVars(1)).unwrap();
        assert_eq!(e, NcExpr::sqrt_pos(NcExpr::mul(NcExpr::adjoint(x(0)), x(0))));
        let e2 = parse("sqrtm(X1^* X1)", VarKind::ComplexVars(1)).unwrap();
        assert_eq!(e, e2);
    }

    #[test]
    fn literals() {
        let v = VarKind::ComplexVars(1);
        assert_eq!(parse("2", v).unwrap(), NcExpr::constant(2.0, 0.0));
        assert_eq!(parse("2.5i", v).unwrap(), NcExpr::constant(0.0, 2.5));
        assert_eq!(parse("2+0i", v).unwrap(), NcExpr::constant(2.0, 0.0));
        assert_eq!(parse("1.5-2e-3i", v).unwrap(), NcExpr::constant(1.5, -2e-3));
        assert_eq!(parse("-2+3i", v).unwrap(), NcExpr::constant(-2.0, 3.0));
        assert_eq!(
            parse("2 X1", v).unwrap(),
            NcExpr::scalar_mul(Complex64::new(2.0, 0.0), x(0))
        );
        assert_eq!(
            parse("1 + X1", v).unwrap(),
            NcExpr::add(NcExpr::constant(1.0, 0.0), x(0))
        );
    }

    #[test]
    fn precedence() {
        let v = VarKind::ComplexVars(2);
        // adjoint binds tighter than unary minus, which binds tighter than products
        let e = parse("-X1' X2 + X2", v).unwrap();
        let neg = NcExpr::scalar_mul(Complex64::new(-1.0, 0.0), NcExpr::adjoint(x(0)));
        assert_eq!(e, NcExpr::add(NcExpr::mul(neg, x(1)), x(1)));
        let e = parse("(X1 + X2)'", v).unwrap();
        assert_eq!(e, NcExpr::adjoint(NcExpr::add(x(0), x(1))));
        let e = parse("X1 - X2 - X1", v).unwrap();
        assert_eq!(e, NcExpr::sub(NcExpr::sub(x(0), x(1)), x(0)));
    }

    #[test]
    fn errors() {
        let v = VarKind::ComplexVars(1);
        assert!(matches!(parse("X1 +", v), Err(NcError::Syntax { position: 4, .. })));
        assert!(matches!(parse("(X1", v), Err(NcError::Syntax { .. })));
        assert!(matches!(parse("X1 )", v), Err(NcError::Syntax { position: 3, .. })));
        assert!(matches!(parse("Y1", v), Err(NcError::UnknownVariable(_))));
        assert!(matches!(parse("X2", v), Err(NcError::Arity { .. })));
        assert!(matches!(parse("X1 ^ 2", v), Err(NcError::Syntax { .. })));
        assert!(matches!(parse("A1", v), Err(NcError::UnknownVariable(_))));
    }

    #[test]
    fn canonical_text_roundtrips() {
        let v = VarKind::RealPairs(2);
        for text in [
            "A1*B2 - (2.0+1.0i)*(A2 + B1)",
            "sqrtm(A1*A1)'",
            "(A1')'",
            "A1*((3.0-0.0i)*B1)",
            "(-1.0+0.0i)*A1*B1 + (0.5+0.0i)",
        ] {
            let e = parse(text, v).unwrap();
            assert_eq!(serialize(&e, v), text);
        }
    }
}

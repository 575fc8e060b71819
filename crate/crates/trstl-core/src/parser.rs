//! Concrete ASCII grammar for STL formulas.
//!
//! ```text
//! formula   := orExpr
//! orExpr    := andExpr ( "|" andExpr )*
//! andExpr   := unary ( "&" unary )*
//! unary     := "!" unary | "G" interval unary | "F" interval unary
//!            | atom ( "U" interval unary )?
//! atom      := "(" formula ")" | predicate
//! predicate := linexpr (">=" | "<=") number
//! linexpr   := term ( ("+"|"-") term )*
//! term      := number "*" ident | ident | number
//! interval  := "[" integer "," integer "]"
//! ```
//!
//! Whitespace is insignificant; precedence is `! > U > & > |`. `G` and `F`
//! are operators only when immediately applied to an interval, so they remain
//! usable as variable names. Predicates are normalized to `mu(x) >= 0` form;
//! for `expr <= c` the coefficients are negated.

use crate::formula::{Formula, FormulaError, Interval, LinearPredicate};
use crate::rat;
use num::rational::BigRational;
use num::Zero;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(String),
    #[error("expected {expected}, found `{found}`")]
    Unexpected { expected: String, found: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("interval bound must be a nonnegative integer")]
    NegativeIntervalBound,
    #[error("interval bound is not an integer")]
    NonIntegerIntervalBound,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
}

/// Syntax or binding error with the byte offset where it was detected.
#[derive(Debug, Error, Clone, PartialEq)]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.pos, self.kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(BigRational),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Amp,
    Pipe,
    Bang,
    Star,
    Plus,
    Minus,
    Ge,
    Le,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Num(n) => write!(f, "{n}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Comma => write!(f, ","),
            Tok::Amp => write!(f, "&"),
            Tok::Pipe => write!(f, "|"),
            Tok::Bang => write!(f, "!"),
            Tok::Star => write!(f, "*"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Ge => write!(f, ">="),
            Tok::Le => write!(f, "<="),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => toks.push((Tok::LParen, start)),
            b')' => toks.push((Tok::RParen, start)),
            b'[' => toks.push((Tok::LBracket, start)),
            b']' => toks.push((Tok::RBracket, start)),
            b',' => toks.push((Tok::Comma, start)),
            b'&' => toks.push((Tok::Amp, start)),
            b'|' => toks.push((Tok::Pipe, start)),
            b'!' => toks.push((Tok::Bang, start)),
            b'*' => toks.push((Tok::Star, start)),
            b'+' => toks.push((Tok::Plus, start)),
            b'-' => toks.push((Tok::Minus, start)),
            b'>' | b'<' => {
                if i + 1 >= bytes.len() || bytes[i + 1] != b'=' {
                    return Err(ParseError {
                        pos: start,
                        kind: ParseErrorKind::UnexpectedChar(b as char),
                    });
                }
                toks.push((if b == b'>' { Tok::Ge } else { Tok::Le }, start));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                let mut dots = 0;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    if bytes[j] == b'.' {
                        dots += 1;
                    }
                    j += 1;
                }
                let lit = &text[i..j];
                if dots > 1 || lit == "." {
                    return Err(ParseError {
                        pos: start,
                        kind: ParseErrorKind::UnexpectedChar('.'),
                    });
                }
                let value = rat::parse_decimal(lit).map_err(|_| ParseError {
                    pos: start,
                    kind: ParseErrorKind::UnexpectedChar(b as char),
                })?;
                toks.push((Tok::Num(value), start));
                i = j;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                toks.push((Tok::Ident(text[i..j].to_string()), start));
                i = j;
                continue;
            }
            other => {
                return Err(ParseError {
                    pos: start,
                    kind: ParseErrorKind::UnexpectedChar(other as char),
                })
            }
        }
        i += 1;
    }
    toks.push((Tok::End, text.len()));
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: Vec<&'a str>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        let i = (self.at + 1).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&want.to_string()))
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError {
            pos: self.pos(),
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found: self.peek().to_string(),
            },
        }
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let mut children = vec![self.and_expr()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            children.push(self.and_expr()?);
        }
        Formula::or(children).map_err(|e| ParseError { pos, kind: e.into() })
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let mut children = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            children.push(self.unary()?);
        }
        Formula::and(children).map_err(|e| ParseError { pos, kind: e.into() })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(name) if (name == "G" || name == "F") && *self.peek2() == Tok::LBracket => {
                let always = name == "G";
                self.bump();
                let iv = self.interval()?;
                let child = self.unary()?;
                Ok(if always {
                    Formula::always(iv, child)
                } else {
                    Formula::eventually(iv, child)
                })
            }
            _ => {
                let lhs = self.atom()?;
                match self.peek() {
                    Tok::Ident(name) if name == "U" && *self.peek2() == Tok::LBracket => {
                        self.bump();
                        let iv = self.interval()?;
                        let rhs = self.unary()?;
                        Ok(Formula::until(lhs, iv, rhs))
                    }
                    _ => Ok(lhs),
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.or_expr()?;
            self.expect(Tok::RParen)?;
            Ok(inner)
        } else {
            self.predicate()
        }
    }

    fn interval(&mut self) -> Result<Interval, ParseError> {
        self.expect(Tok::LBracket)?;
        let lo = self.interval_bound()?;
        self.expect(Tok::Comma)?;
        let hi = self.interval_bound()?;
        let pos = self.pos();
        self.expect(Tok::RBracket)?;
        Interval::new(lo, hi).map_err(|e| ParseError { pos, kind: e.into() })
    }

    fn interval_bound(&mut self) -> Result<usize, ParseError> {
        let pos = self.pos();
        if *self.peek() == Tok::Minus {
            return Err(ParseError {
                pos,
                kind: ParseErrorKind::NegativeIntervalBound,
            });
        }
        match self.bump() {
            Tok::Num(n) => {
                if !rat::is_integer(&n) {
                    return Err(ParseError {
                        pos,
                        kind: ParseErrorKind::NonIntegerIntervalBound,
                    });
                }
                rat::round_to_i64(&n, 0.0)
                    .filter(|v| *v >= 0)
                    .map(|v| v as usize)
                    .ok_or(ParseError {
                        pos,
                        kind: ParseErrorKind::NonIntegerIntervalBound,
                    })
            }
            other => Err(ParseError {
                pos,
                kind: ParseErrorKind::Unexpected {
                    expected: "integer".to_string(),
                    found: other.to_string(),
                },
            }),
        }
    }

    /// `linexpr (>=|<=) number`, normalized to `mu(x) >= 0`.
    fn predicate(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos();
        let (mut coeffs, mut constant) = self.linexpr()?;
        let op_pos = self.pos();
        let flip = match self.bump() {
            Tok::Ge => false,
            Tok::Le => true,
            other => {
                return Err(ParseError {
                    pos: op_pos,
                    kind: ParseErrorKind::Unexpected {
                        expected: ">= or <=".to_string(),
                        found: other.to_string(),
                    },
                })
            }
        };
        let rhs = self.signed_number()?;
        constant -= rhs;
        if flip {
            for c in coeffs.iter_mut() {
                *c = -c.clone();
            }
            constant = -constant;
        }
        let p = LinearPredicate::new(coeffs, constant)
            .map_err(|e| ParseError { pos: start, kind: e.into() })?;
        Ok(Formula::Predicate(p))
    }

    fn signed_number(&mut self) -> Result<BigRational, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(if neg { -n } else { n }),
            other => Err(ParseError {
                pos,
                kind: ParseErrorKind::Unexpected {
                    expected: "number".to_string(),
                    found: other.to_string(),
                },
            }),
        }
    }

    /// Affine expression over the declared variables; returns coefficients
    /// per variable and the accumulated constant.
    fn linexpr(&mut self) -> Result<(Vec<BigRational>, BigRational), ParseError> {
        let mut coeffs = vec![BigRational::zero(); self.vars.len()];
        let mut constant = BigRational::zero();
        let mut negate = false;
        if *self.peek() == Tok::Minus {
            self.bump();
            negate = true;
        }
        loop {
            self.term(&mut coeffs, &mut constant, negate)?;
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    negate = false;
                }
                Tok::Minus => {
                    self.bump();
                    negate = true;
                }
                _ => break,
            }
        }
        Ok((coeffs, constant))
    }

    fn term(
        &mut self,
        coeffs: &mut [BigRational],
        constant: &mut BigRational,
        negate: bool,
    ) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => {
                let n = if negate { -n } else { n };
                if *self.peek() == Tok::Star {
                    self.bump();
                    let vpos = self.pos();
                    match self.bump() {
                        Tok::Ident(name) => {
                            let idx = self.var_index(&name, vpos)?;
                            coeffs[idx] += n;
                        }
                        other => {
                            return Err(ParseError {
                                pos: vpos,
                                kind: ParseErrorKind::Unexpected {
                                    expected: "variable name".to_string(),
                                    found: other.to_string(),
                                },
                            })
                        }
                    }
                } else {
                    *constant += n;
                }
                Ok(())
            }
            Tok::Ident(name) => {
                let idx = self.var_index(&name, pos)?;
                let one = BigRational::from_integer(1.into());
                coeffs[idx] += if negate { -one } else { one };
                Ok(())
            }
            other => Err(ParseError {
                pos,
                kind: ParseErrorKind::Unexpected {
                    expected: "term".to_string(),
                    found: other.to_string(),
                },
            }),
        }
    }

    fn var_index(&self, name: &str, pos: usize) -> Result<usize, ParseError> {
        self.vars.iter().position(|v| *v == name).ok_or(ParseError {
            pos,
            kind: ParseErrorKind::UnknownVariable(name.to_string()),
        })
    }
}

/// Parses `text` against the declared state variable names.
pub fn parse_formula(text: &str, var_names: &[impl AsRef<str>]) -> Result<Formula, ParseError> {
    let vars: Vec<&str> = var_names.iter().map(AsRef::as_ref).collect();
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(ParseError {
                pos: 0,
                kind: ParseErrorKind::DuplicateVariable(v.to_string()),
            });
        }
    }
    let toks = lex(text)?;
    let mut parser = Parser { toks, at: 0, vars };
    let formula = parser.or_expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected("end of input"));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::parse_decimal;

    fn r(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn altitude_hold() {
        let phi = parse_formula("G[20,30] (z >= 20)", &["z", "vz"]).unwrap();
        let expected = Formula::always(
            Interval::new(20, 30).unwrap(),
            Formula::Predicate(LinearPredicate::new(vec![r("1"), r("0")], r("-20")).unwrap()),
        );
        assert_eq!(phi, expected);
    }

    #[test]
    fn bare_predicate() {
        let phi = parse_formula("x >= 0.1", &["x"]).unwrap();
        let expected =
            Formula::Predicate(LinearPredicate::new(vec![r("1")], r("-0.1")).unwrap());
        assert_eq!(phi, expected);
    }

    #[test]
    fn le_negates_coefficients() {
        let phi = parse_formula("x <= 0.5", &["x"]).unwrap();
        let expected =
            Formula::Predicate(LinearPredicate::new(vec![r("-1")], r("0.5")).unwrap());
        assert_eq!(phi, expected);
    }

    #[test]
    fn until_production() {
        let phi = parse_formula("((x >= 0) U[0,2] (x <= 1))", &["x"]).unwrap();
        match phi {
            Formula::Until(_, iv, _) => {
                assert_eq!((iv.lo(), iv.hi()), (0, 2));
            }
            other => panic!("expected until, got {other:?}"),
        }
    }

    #[test]
    fn precedence_not_until_and_or() {
        let phi = parse_formula("!x >= 0 & x >= 1 | x >= 2", &["x"]).unwrap();
        // ((!p & q) | r)
        match phi {
            Formula::Or(cs) => {
                assert_eq!(cs.len(), 2);
                assert!(matches!(cs[0], Formula::And(_)));
            }
            other => panic!("expected or at top, got {other:?}"),
        }
        let phi = parse_formula("(x >= 0) U[0,2] x >= 1 & x >= 2", &["x"]).unwrap();
        match phi {
            Formula::And(cs) => assert!(matches!(cs[0], Formula::Until(..))),
            other => panic!("expected and at top, got {other:?}"),
        }
    }

    #[test]
    fn linear_expressions() {
        let phi = parse_formula("2*x - y + 1 >= -0.5", &["x", "y"]).unwrap();
        let expected = Formula::Predicate(
            LinearPredicate::new(vec![r("2"), r("-1")], r("1.5")).unwrap(),
        );
        assert_eq!(phi, expected);
    }

    #[test]
    fn constant_predicate_is_expressible() {
        let top = parse_formula("1 >= 0", &["x"]).unwrap();
        match top {
            Formula::Predicate(p) => {
                assert!(p.coeffs().iter().all(num::Zero::is_zero));
                assert_eq!(*p.offset(), r("1"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_positions_and_kinds() {
        let err = parse_formula("x >= ", &["x"]).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));
        let err = parse_formula("y >= 0", &["x"]).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownVariable("y".to_string()));
        assert_eq!(err.pos, 0);
        let err = parse_formula("G[3,2] x >= 0", &["x"]).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Formula(FormulaError::EmptyInterval { .. })));
        let err = parse_formula("G[-1,2] x >= 0", &["x"]).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NegativeIntervalBound);
        let err = parse_formula("x >= 0 )", &["x"]).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));
        let err = parse_formula("0 >= 0", &["x"]).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Formula(FormulaError::DegeneratePredicate)));
    }

    #[test]
    fn g_and_f_remain_valid_variable_names() {
        let phi = parse_formula("G >= 1", &["G"]).unwrap();
        assert!(matches!(phi, Formula::Predicate(_)));
        let phi = parse_formula("F[0,1] G >= 1", &["G"]).unwrap();
        assert!(matches!(phi, Formula::Eventually(..)));
    }

    #[test]
    fn pretty_round_trip() {
        let vars = ["z", "vz"];
        for text in [
            "G[20,30] (z >= 20) & G[60,70] (z <= 10)",
            "!(z >= 1) | (vz >= 0 & z <= 5)",
            "(z >= 0) U[2,4] (F[0,3] (vz <= 0.25))",
            "G[0,10] F[0,10] (z + 0.5*vz >= 0.1)",
        ] {
            let parsed = parse_formula(text, &vars).unwrap();
            let printed = parsed.pretty(&vars);
            let reparsed = parse_formula(&printed, &vars).unwrap();
            assert_eq!(parsed, reparsed, "{text} -> {printed}");
        }
    }
}

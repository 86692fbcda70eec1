//! Recursive-descent parser for GMEC and timed CTL formulas.
//!
//! ```text
//! formula  ::= leads [ "=>" formula ]
//! leads    ::= disj [ "-->" [interval] disj ]
//! disj     ::= conj { ("|" | "||" | "\/") conj }
//! conj     ::= unary { ("&" | "&&" | "/\") unary }
//! unary    ::= "!" unary
//!            | ("EF" | "AF" | "EG" | "AG") [interval] unary
//!            | ("E" | "A") "[" formula "U" [interval] formula "]"
//!            | ("E" | "A") unary "U" [interval] unary
//!            | "(" formula ")"
//!            | "true" | "false" | atom
//! atom     ::= sum relop sum
//! sum      ::= ["-"] term { ("+" | "-") term }
//! term     ::= INT [ "*" "M" "(" IDENT ")" ] | "M" "(" IDENT ")"
//! relop    ::= "<" | "<=" | "=" | "==" | ">=" | ">"
//! interval ::= ("[" | "]") INT "," (INT | "inf") ("]" | "[" | ")")
//! ```
//!
//! An omitted interval means `[0,inf[`. Comments run from `#` or `//` to the
//! end of the line.

use crate::domain::Relation;
use crate::error::{Error, Result};
use crate::interval::{Bound, TimeInterval};

use super::ast::{check_response_interval, Atom, Formula, Gmec};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Star,
    Plus,
    Minus,
    Rel(Relation),
    And,
    Or,
    Implies,
    LeadsTo,
    Bang,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let n1 = chars.get(i + 1).copied();
        let n2 = chars.get(i + 2).copied();
        let simple = match c {
            '/' if n1 == Some('\\') => Some((Tok::And, 2)),
            '\\' if n1 == Some('/') => Some((Tok::Or, 2)),
            '(' => Some((Tok::LParen, 1)),
            ')' => Some((Tok::RParen, 1)),
            '[' => Some((Tok::LBrack, 1)),
            ']' => Some((Tok::RBrack, 1)),
            ',' => Some((Tok::Comma, 1)),
            '*' => Some((Tok::Star, 1)),
            '+' => Some((Tok::Plus, 1)),
            '!' => Some((Tok::Bang, 1)),
            '-' if n1 == Some('-') && n2 == Some('>') => Some((Tok::LeadsTo, 3)),
            '-' => Some((Tok::Minus, 1)),
            '&' if n1 == Some('&') => Some((Tok::And, 2)),
            '&' => Some((Tok::And, 1)),
            '|' if n1 == Some('|') => Some((Tok::Or, 2)),
            '|' => Some((Tok::Or, 1)),
            '=' if n1 == Some('>') => Some((Tok::Implies, 2)),
            '=' if n1 == Some('=') => Some((Tok::Rel(Relation::Eq), 2)),
            '=' => Some((Tok::Rel(Relation::Eq), 1)),
            '<' if n1 == Some('=') => Some((Tok::Rel(Relation::Le), 2)),
            '<' => Some((Tok::Rel(Relation::Lt), 1)),
            '>' if n1 == Some('=') => Some((Tok::Rel(Relation::Ge), 2)),
            '>' => Some((Tok::Rel(Relation::Gt), 1)),
            _ => None,
        };
        if let Some((tok, len)) = simple {
            out.push(Spanned { tok, line, col });
            i += len;
            col += len;
            continue;
        }
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if n1 == Some('/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s
                    .parse::<u64>()
                    .map_err(|_| Error::syntax(line, col, format!("integer `{s}` out of range")))?;
                out.push(Spanned {
                    tok: Tok::Int(n),
                    line,
                    col,
                });
                col += i - start;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.')
                {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    col,
                });
                col += i - start;
            }
            other => {
                return Err(Error::syntax(line, col, format!("unexpected character `{other}`")));
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    places: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::syntax(s.line, s.col, msg)
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.leads()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(match (lhs, rhs) {
                (Formula::Gmec(a), Formula::Gmec(b)) => Formula::Gmec(Gmec::implies(a, b)),
                (a, b) => Formula::implies(a, b),
            });
        }
        Ok(lhs)
    }

    fn leads(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if *self.peek() != Tok::LeadsTo {
            return Ok(lhs);
        }
        self.bump();
        let interval = self.opt_interval()?;
        let rhs = self.disj()?;
        check_response_interval(&interval)?;
        let phi = lhs
            .as_gmec()
            .ok_or_else(|| Error::Shape("left operand of --> must be a GMEC".into()))?;
        let psi = rhs
            .as_gmec()
            .ok_or_else(|| Error::Shape("right operand of --> must be a GMEC".into()))?;
        Ok(Formula::LeadsTo(phi, interval, psi))
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let g = self.conj()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                // A parenthesised sum such as `(M(a) + M(b)) >= 1` is not
                // supported; parentheses always group formulas.
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::truth())
                }
                "false" => {
                    self.bump();
                    Ok(Formula::Gmec(Gmec::falsity()))
                }
                "EF" | "AF" | "EG" | "AG" => {
                    self.bump();
                    let i = self.opt_interval()?;
                    let body = self.unary()?;
                    Ok(match name.as_str() {
                        "EF" => Formula::ef(i, body),
                        "AF" => Formula::af(i, body),
                        "EG" => Formula::eg(i, body),
                        _ => Formula::ag(i, body),
                    })
                }
                "E" | "A" => {
                    self.bump();
                    let existential = name == "E";
                    let (lhs, i, rhs) = if *self.peek() == Tok::LBrack {
                        self.bump();
                        let lhs = self.formula()?;
                        self.expect_until()?;
                        let i = self.opt_interval()?;
                        let rhs = self.formula()?;
                        self.expect(Tok::RBrack)?;
                        (lhs, i, rhs)
                    } else {
                        let lhs = self.unary()?;
                        self.expect_until()?;
                        let i = self.opt_interval()?;
                        let rhs = self.unary()?;
                        (lhs, i, rhs)
                    };
                    Ok(if existential {
                        Formula::eu(lhs, i, rhs)
                    } else {
                        Formula::au(lhs, i, rhs)
                    })
                }
                _ => self.atom().map(Formula::Gmec),
            },
            Tok::Int(_) | Tok::Minus => self.atom().map(Formula::Gmec),
            other => Err(self.error(format!("unexpected {}", other.describe()))),
        }
    }

    fn expect_until(&mut self) -> Result<()> {
        if self.is_ident("U") {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `U`, found {}", self.peek().describe())))
        }
    }

    fn opt_interval(&mut self) -> Result<TimeInterval> {
        let starts = matches!(self.peek(), Tok::LBrack | Tok::RBrack)
            && matches!(self.peek_at(1), Tok::Int(_));
        if starts {
            self.interval()
        } else {
            Ok(TimeInterval::unbounded())
        }
    }

    fn interval(&mut self) -> Result<TimeInterval> {
        let low_open = match self.bump() {
            Tok::LBrack => false,
            Tok::RBrack => true,
            _ => return Err(self.error("expected `[` or `]` opening an interval")),
        };
        let low = self.u32_lit()?;
        self.expect(Tok::Comma)?;
        let high = if self.is_ident("inf") {
            self.bump();
            Bound::Infinite
        } else {
            Bound::Finite(self.u32_lit()?)
        };
        let high_open = match self.peek() {
            Tok::RBrack => false,
            Tok::LBrack | Tok::RParen => true,
            _ => return Err(self.error("expected `]`, `[` or `)` closing an interval")),
        };
        self.bump();
        TimeInterval::new(low, high, low_open, high_open).map_err(|e| self.error(e.to_string()))
    }

    fn u32_lit(&mut self) -> Result<u32> {
        match self.peek().clone() {
            Tok::Int(n) => {
                let v = u32::try_from(n).map_err(|_| self.error("interval bound out of range"))?;
                self.bump();
                Ok(v)
            }
            other => Err(self.error(format!("expected integer, found {}", other.describe()))),
        }
    }

    /// Linear sum of `k*M(p)` terms and integer constants.
    fn sum(&mut self) -> Result<(Vec<(usize, i64)>, i64)> {
        let mut terms = Vec::new();
        let mut constant = 0i64;
        let mut sign = 1i64;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -1;
        }
        loop {
            match self.peek().clone() {
                Tok::Int(k) => {
                    self.bump();
                    let k = i64::try_from(k).map_err(|_| self.error("coefficient out of range"))?;
                    if *self.peek() == Tok::Star {
                        self.bump();
                        let p = self.marking_ref()?;
                        terms.push((p, sign * k));
                    } else {
                        constant += sign * k;
                    }
                }
                Tok::Ident(ref s) if s == "M" => {
                    let p = self.marking_ref()?;
                    terms.push((p, sign));
                }
                other => {
                    return Err(self.error(format!(
                        "expected `M(place)` or integer, found {}",
                        other.describe()
                    )))
                }
            }
            match self.peek() {
                Tok::Plus => sign = 1,
                Tok::Minus => sign = -1,
                _ => break,
            }
            self.bump();
        }
        Ok((terms, constant))
    }

    fn marking_ref(&mut self) -> Result<usize> {
        if !self.is_ident("M") {
            return Err(self.error("expected `M(place)`"));
        }
        self.bump();
        self.expect(Tok::LParen)?;
        let name = match self.bump() {
            Tok::Ident(s) => s,
            other => {
                return Err(self.error(format!("expected place name, found {}", other.describe())))
            }
        };
        let idx = self
            .places
            .iter()
            .position(|p| *p == name)
            .ok_or(Error::UnknownPlace(name))?;
        self.expect(Tok::RParen)?;
        Ok(idx)
    }

    fn atom(&mut self) -> Result<Gmec> {
        let (lterms, lconst) = self.sum()?;
        let relation = match self.bump() {
            Tok::Rel(r) => r,
            other => {
                self.pos -= 1;
                return Err(self.error(format!(
                    "expected comparison operator, found {}",
                    other.describe()
                )));
            }
        };
        let (rterms, rconst) = self.sum()?;
        // lhs - rhs ⋈ 0  →  Σ a_i M(p_i) ⋈ rconst - lconst
        let mut terms = lterms;
        terms.extend(rterms.into_iter().map(|(p, a)| (p, -a)));
        let c = rconst - lconst;
        let atom = if c >= 0 {
            Atom::new(terms, relation, c as u64)
        } else {
            let flipped = terms.into_iter().map(|(p, a)| (p, -a)).collect();
            Atom::new(flipped, relation.flipped(), c.unsigned_abs())
        };
        Ok(Gmec::Atom(atom))
    }
}

fn parse_all(text: &str, places: &[String]) -> Result<Formula> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        places,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {} after formula", p.peek().describe())));
    }
    Ok(f)
}

/// Parses a timed CTL formula whose `M(..)` references resolve against
/// `places`.
pub fn parse_formula(text: &str, places: &[String]) -> Result<Formula> {
    parse_all(text, places)
}

/// Parses a GMEC (no temporal operators).
pub fn parse_gmec(text: &str, places: &[String]) -> Result<Gmec> {
    parse_all(text, places)?
        .as_gmec()
        .ok_or_else(|| Error::Shape("temporal operator inside a GMEC".into()))
}

//! The line-oriented `.tpnet` net format.
//!
//! ```text
//! document   = { line } ;
//! line       = [ item ] [ comment ] "\n" ;
//! comment    = "#" { any } ;
//! item       = place | param | domain | transition | arcs ;
//! place      = "place" ident [ "=" nat ] ;
//! param      = "param" ident ;
//! domain     = "domain" ":" linear relation linear ;
//! transition = "transition" ident interval ;
//! arcs       = ( "pre" | "post" | "read" | "inhibit" ) ":" [ arc { "," arc } ] ;
//! arc        = ident [ "*" nat ] ;
//! interval   = "[" bound "," ( bound "]" | "inf" ( "[" | ")" | "]" ) ) ;
//! bound      = nat | ident ;
//! linear     = [ "-" ] term { ( "+" | "-" ) term } ;
//! term       = number [ "*" ident ] | ident ;
//! number     = nat [ "/" nat | "." digits ] ;
//! relation   = "<" | "<=" | "=" | "==" | ">=" | ">" ;
//! ```
//!
//! Arc lines attach to the closest preceding `transition`. Names may be used
//! before they are declared; they are resolved once the whole document has
//! been read.

use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::domain::{LinearConstraint, Relation};
use crate::error::{Error, Result};
use crate::net::{Net, ParamExpr, ParamInterval};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arc {
    Pre,
    Post,
    Read,
    Inhibit,
}

struct TransitionItem {
    line: usize,
    name: String,
    interval: ParamInterval,
    arcs: Vec<(Arc, usize, usize, String, u32)>,
}

#[derive(Default)]
struct Document {
    places: Vec<(usize, String, u32)>,
    params: Vec<(usize, String)>,
    domain: Vec<(usize, usize, LinearConstraint<Rational>)>,
    transitions: Vec<TransitionItem>,
}

/// Character cursor over one line, tracking 1-based columns.
struct Cursor {
    line: usize,
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(line: usize, src: &str) -> Self {
        let body = src.split('#').next().unwrap_or("");
        Cursor {
            line,
            chars: body.chars().collect(),
            pos: 0,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::syntax(self.line, self.col(), msg))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected `{c}`, found `{found}`")),
                None => self.err(format!("expected `{c}` before end of line")),
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected `{c}`")),
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(&c) = self.chars.get(self.pos) {
            let ok = if self.pos == start {
                c.is_alphabetic() || c == '_'
            } else {
                c.is_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a name");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn nat(&mut self) -> Result<u32> {
        self.skip_ws();
        let col = self.col();
        let d = self.digits();
        if d.is_empty() {
            return self.err("expected a natural number");
        }
        d.parse()
            .map_err(|_| Error::syntax(self.line, col, format!("number `{d}` is too large")))
    }

    fn starts_number(&mut self) -> bool {
        self.peek().is_some_and(|c| c.is_ascii_digit())
    }

    fn starts_ident(&mut self) -> bool {
        self.peek().is_some_and(|c| c.is_alphabetic() || c == '_')
    }

    fn number(&mut self) -> Result<Rational> {
        self.skip_ws();
        let col = self.col();
        let whole = self.digits();
        let line = self.line;
        let too_large = move || Error::syntax(line, col, "coefficient is too large");
        let int: i64 = whole.parse().map_err(|_| too_large())?;
        if self.chars.get(self.pos) == Some(&'/') {
            self.pos += 1;
            let den = self.digits();
            let den: i64 = den
                .parse()
                .map_err(|_| Error::syntax(self.line, col, "expected a denominator"))?;
            if den == 0 {
                return Err(Error::syntax(self.line, col, "zero denominator"));
            }
            return Ok(Rational::new(int, den));
        }
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            let frac = self.digits();
            if frac.is_empty() || frac.len() > 12 {
                return Err(Error::syntax(self.line, col, "malformed decimal"));
            }
            let scale = 10i64.pow(frac.len() as u32);
            let f: i64 = frac.parse().map_err(|_| too_large())?;
            let num = int
                .checked_mul(scale)
                .and_then(|x| x.checked_add(f))
                .ok_or_else(too_large)?;
            return Ok(Rational::new(num, scale));
        }
        Ok(Rational::from_integer(int))
    }

    fn relation(&mut self) -> Result<Relation> {
        self.skip_ws();
        let next = |k: usize| self.chars.get(self.pos + k).copied();
        let (rel, len) = match (next(0), next(1)) {
            (Some('<'), Some('=')) => (Relation::Le, 2),
            (Some('>'), Some('=')) => (Relation::Ge, 2),
            (Some('='), Some('=')) => (Relation::Eq, 2),
            (Some('<'), _) => (Relation::Lt, 1),
            (Some('>'), _) => (Relation::Gt, 1),
            (Some('='), _) => (Relation::Eq, 1),
            _ => return self.err("expected one of <, <=, =, >=, >"),
        };
        self.pos += len;
        Ok(rel)
    }

    /// Signed linear expression: variable terms in order, plus a constant.
    fn linear(&mut self) -> Result<(Vec<(String, Rational)>, Rational)> {
        let mut terms = Vec::new();
        let mut constant = Rational::zero();
        let mut first = true;
        loop {
            let negative = if self.eat('-') {
                true
            } else if first || self.eat('+') {
                false
            } else {
                break;
            };
            first = false;
            if self.starts_number() {
                let c = self.number()?;
                let c = if negative { -c } else { c };
                if self.eat('*') {
                    terms.push((self.ident()?, c));
                } else {
                    constant += c;
                }
            } else if self.starts_ident() {
                let one = Rational::one();
                terms.push((self.ident()?, if negative { -one } else { one }));
            } else {
                return self.err("expected a term");
            }
        }
        Ok((terms, constant))
    }

    fn param_expr(&mut self) -> Result<ParamExpr> {
        if self.starts_number() {
            Ok(ParamExpr::Lit(self.nat()?))
        } else {
            Ok(ParamExpr::Param(self.ident()?))
        }
    }

    fn interval(&mut self) -> Result<ParamInterval> {
        self.expect('[')?;
        let low = self.param_expr()?;
        self.expect(',')?;
        let high = self.param_expr()?;
        if high == ParamExpr::Param("inf".into()) {
            if !(self.eat('[') || self.eat(')') || self.eat(']')) {
                return self.err("expected `[` after `inf`");
            }
            return Ok(ParamInterval::new(low, None));
        }
        self.expect(']')?;
        Ok(ParamInterval::new(low, Some(high)))
    }
}

fn parse_document(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    for (k, raw) in text.lines().enumerate() {
        let mut c = Cursor::new(k + 1, raw);
        if c.at_end() {
            continue;
        }
        let key_col = c.col();
        let key = c.ident()?;
        match key.as_str() {
            "place" => {
                let name = c.ident()?;
                let tokens = if c.eat('=') { c.nat()? } else { 0 };
                c.finish()?;
                doc.places.push((k + 1, name, tokens));
            }
            "param" => {
                let name = c.ident()?;
                c.finish()?;
                doc.params.push((k + 1, name));
            }
            "domain" => {
                c.expect(':')?;
                let col = c.col();
                let (mut terms, lconst) = c.linear()?;
                let relation = c.relation()?;
                let (rterms, rconst) = c.linear()?;
                c.finish()?;
                terms.extend(rterms.into_iter().map(|(p, a)| (p, -a)));
                let bound = rconst - lconst;
                doc.domain
                    .push((k + 1, col, LinearConstraint::new(terms, relation, bound)));
            }
            "transition" => {
                let name = c.ident()?;
                let interval = c.interval()?;
                c.finish()?;
                doc.transitions.push(TransitionItem {
                    line: k + 1,
                    name,
                    interval,
                    arcs: Vec::new(),
                });
            }
            "pre" | "post" | "read" | "inhibit" => {
                let kind = match key.as_str() {
                    "pre" => Arc::Pre,
                    "post" => Arc::Post,
                    "read" => Arc::Read,
                    _ => Arc::Inhibit,
                };
                let Some(t) = doc.transitions.last_mut() else {
                    return Err(Error::syntax(k + 1, key_col, "arc list outside a transition"));
                };
                c.expect(':')?;
                if !c.at_end() {
                    loop {
                        c.skip_ws();
                        let col = c.col();
                        let place = c.ident()?;
                        let w = if c.eat('*') { c.nat()? } else { 1 };
                        t.arcs.push((kind, k + 1, col, place, w));
                        if !c.eat(',') {
                            break;
                        }
                    }
                }
                c.finish()?;
            }
            other => {
                return Err(Error::syntax(k + 1, key_col, format!("unknown keyword `{other}`")));
            }
        }
    }
    Ok(doc)
}

/// Parses a `.tpnet` document into a net.
///
/// Syntax errors carry a line and column. Duplicate names and references to
/// undeclared places or parameters are reported as semantic errors.
pub fn parse_net_file(text: &str) -> Result<Net> {
    let doc = parse_document(text)?;
    let mut net = Net::new();
    for (_, name, tokens) in &doc.places {
        net.add_place(name.clone(), *tokens)?;
    }
    for (_, name) in &doc.params {
        net.add_parameter(name.clone())?;
    }
    for t in &doc.transitions {
        for p in t.interval.parameters() {
            if !net.parameters.iter().any(|q| q == p) {
                return Err(Error::UnknownParameter(format!("{p} (line {})", t.line)));
            }
        }
        net.add_transition(t.name.clone(), t.interval.clone())?;
        for (kind, line, col, place, w) in &t.arcs {
            if net.place_index(place).is_none() {
                return Err(Error::syntax(*line, *col, format!("unknown place `{place}`")));
            }
            match kind {
                Arc::Pre => net.set_pre(&t.name, place, *w)?,
                Arc::Post => net.set_post(&t.name, place, *w)?,
                Arc::Read => net.set_read(&t.name, place, *w)?,
                Arc::Inhibit => net.set_inhibit(&t.name, place, *w)?,
            }
        }
    }
    for (line, col, c) in doc.domain {
        if let Some(p) = c.parameters().find(|p| !net.parameters.iter().any(|q| q == p)) {
            return Err(Error::syntax(line, col, format!("unknown parameter `{p}`")));
        }
        net.domain.push(c);
    }
    Ok(net)
}

/// Writes `n` in the `.tpnet` format. [`parse_net_file`] inverts it.
pub fn serialize_net(n: &Net) -> String {
    let mut out = String::new();
    for (p, name) in n.places.iter().enumerate() {
        match n.initial.tokens(p) {
            0 => writeln!(out, "place {name}"),
            k => writeln!(out, "place {name} = {k}"),
        }
        .unwrap();
    }
    for p in &n.parameters {
        writeln!(out, "param {p}").unwrap();
    }
    for c in &n.domain.constraints {
        writeln!(out, "domain: {c}").unwrap();
    }
    for (t, name) in n.transitions.iter().enumerate() {
        writeln!(out, "transition {name} {}", n.intervals[t]).unwrap();
        for (key, table) in [
            ("pre", &n.pre),
            ("post", &n.post),
            ("read", &n.read),
            ("inhibit", &n.inhibit),
        ] {
            let arcs: Vec<String> = table[t]
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0)
                .map(|(p, &w)| match w {
                    1 => n.places[p].clone(),
                    w => format!("{}*{w}", n.places[p]),
                })
                .collect();
            if !arcs.is_empty() {
                writeln!(out, "  {key}: {}", arcs.join(", ")).unwrap();
            }
        }
    }
    out
}

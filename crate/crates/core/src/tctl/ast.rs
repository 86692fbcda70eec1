use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::Relation;
use crate::error::{Error, Result};
use crate::interval::{Bound, TimeInterval};
use crate::net::Marking;

/// `Σ a_i·M(p_i) ⋈ c` with integer coefficients and a natural bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    /// `(place index, coefficient)`, each place at most once.
    pub terms: Vec<(usize, i64)>,
    pub relation: Relation,
    pub bound: u64,
}

impl Atom {
    pub fn new(terms: Vec<(usize, i64)>, relation: Relation, bound: u64) -> Self {
        let mut merged: Vec<(usize, i64)> = Vec::new();
        for (p, a) in terms {
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some((_, b)) => *b += a,
                None => merged.push((p, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0);
        Atom {
            terms: merged,
            relation,
            bound,
        }
    }

    /// `M(place) ⋈ bound`.
    pub fn place(place: usize, relation: Relation, bound: u64) -> Self {
        Atom::new(vec![(place, 1)], relation, bound)
    }

    pub fn weighted_sum(&self, m: &Marking) -> i64 {
        self.terms
            .iter()
            .map(|&(p, a)| a * i64::from(m.tokens(p)))
            .sum()
    }

    pub fn holds(&self, m: &Marking) -> bool {
        let bound = i64::try_from(self.bound).unwrap_or(i64::MAX);
        self.relation.holds(&self.weighted_sum(m), &bound)
    }
}

/// Generalised mutual exclusion constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gmec {
    Atom(Atom),
    Or(Box<Gmec>, Box<Gmec>),
    And(Box<Gmec>, Box<Gmec>),
    Implies(Box<Gmec>, Box<Gmec>),
}

impl Gmec {
    pub fn truth() -> Gmec {
        Gmec::Atom(Atom::new(Vec::new(), Relation::Ge, 0))
    }

    pub fn falsity() -> Gmec {
        Gmec::Atom(Atom::new(Vec::new(), Relation::Gt, 0))
    }

    pub fn and(a: Gmec, b: Gmec) -> Gmec {
        Gmec::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Gmec, b: Gmec) -> Gmec {
        Gmec::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Gmec, b: Gmec) -> Gmec {
        Gmec::Implies(Box::new(a), Box::new(b))
    }

    /// Logical complement, still a GMEC.
    pub fn negate(&self) -> Gmec {
        match self {
            Gmec::Atom(a) => {
                let atom = |relation| {
                    Gmec::Atom(Atom {
                        terms: a.terms.clone(),
                        relation,
                        bound: a.bound,
                    })
                };
                match a.relation {
                    Relation::Lt => atom(Relation::Ge),
                    Relation::Le => atom(Relation::Gt),
                    Relation::Ge => atom(Relation::Lt),
                    Relation::Gt => atom(Relation::Le),
                    Relation::Eq => Gmec::or(atom(Relation::Lt), atom(Relation::Gt)),
                }
            }
            Gmec::Or(a, b) => Gmec::and(a.negate(), b.negate()),
            Gmec::And(a, b) => Gmec::or(a.negate(), b.negate()),
            Gmec::Implies(a, b) => Gmec::and((**a).clone(), b.negate()),
        }
    }

    pub fn check_places(&self, places: usize) -> Result<()> {
        match self {
            Gmec::Atom(a) => match a.terms.iter().find(|(p, _)| *p >= places) {
                Some((p, _)) => Err(Error::UnknownPlace(format!("#{p}"))),
                None => Ok(()),
            },
            Gmec::Or(a, b) | Gmec::And(a, b) | Gmec::Implies(a, b) => {
                a.check_places(places)?;
                b.check_places(places)
            }
        }
    }

    pub fn render(&self, places: &[String]) -> String {
        let mut out = String::new();
        self.render_into(places, &mut out, 0);
        out
    }

    // precedence: 0 implies, 1 or, 2 and, 3 atom
    fn render_into(&self, places: &[String], out: &mut String, ctx: u8) {
        let (prec, op, a, b) = match self {
            Gmec::Atom(a) => {
                render_atom(a, places, out);
                return;
            }
            Gmec::Implies(a, b) => (0, "=>", a, b),
            Gmec::Or(a, b) => (1, "|", a, b),
            Gmec::And(a, b) => (2, "&", a, b),
        };
        let paren = prec < ctx;
        if paren {
            out.push('(');
        }
        // implication is right associative, the others left associative
        let (lctx, rctx) = if prec == 0 { (1, 0) } else { (prec, prec + 1) };
        a.render_into(places, out, lctx);
        let _ = write!(out, " {op} ");
        b.render_into(places, out, rctx);
        if paren {
            out.push(')');
        }
    }
}

fn render_atom(a: &Atom, places: &[String], out: &mut String) {
    if a.terms.is_empty() {
        match (a.relation, a.bound) {
            (Relation::Ge, 0) => out.push_str("true"),
            (Relation::Gt, 0) => out.push_str("false"),
            (r, c) => {
                let _ = write!(out, "0 {r} {c}");
            }
        }
        return;
    }
    for (i, &(p, coef)) in a.terms.iter().enumerate() {
        let name = places.get(p).map_or("?", String::as_str);
        let mag = coef.unsigned_abs();
        match (i, coef < 0) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if mag == 1 {
            let _ = write!(out, "M({name})");
        } else {
            let _ = write!(out, "{mag}*M({name})");
        }
    }
    let _ = write!(out, " {} {}", a.relation, a.bound);
}

/// TPN-TCTL / PTPN-TCTL formulas.
///
/// `And`/`Or` between temporal formulas are conveniences on top of `Not` and
/// `Implies`; pure boolean combinations of markings are kept as [`Gmec`]
/// leaves by the parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Gmec(Gmec),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    EU(Box<Formula>, TimeInterval, Box<Formula>),
    AU(Box<Formula>, TimeInterval, Box<Formula>),
    EF(TimeInterval, Box<Formula>),
    AF(TimeInterval, Box<Formula>),
    EG(TimeInterval, Box<Formula>),
    AG(TimeInterval, Box<Formula>),
    /// `φ ⇝_{I_r} ψ`; `I_r` is `[0,m]` or `[0,inf[`.
    LeadsTo(Gmec, TimeInterval, Gmec),
}

/// Which unfolding to use for the bounded-response operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeadsToMode {
    /// `AG(φ ⇒ AF_{I_r} ψ)`.
    #[default]
    Ag,
    /// `AF(φ ⇒ AF_{I_r} ψ)`.
    Af,
}

impl Formula {
    pub fn gmec(g: Gmec) -> Formula {
        Formula::Gmec(g)
    }

    pub fn truth() -> Formula {
        Formula::Gmec(Gmec::truth())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::Gmec(x), Formula::Gmec(y)) => Formula::Gmec(Gmec::and(x, y)),
            (a, b) => Formula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::Gmec(x), Formula::Gmec(y)) => Formula::Gmec(Gmec::or(x, y)),
            (a, b) => Formula::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn eu(a: Formula, i: TimeInterval, b: Formula) -> Formula {
        Formula::EU(Box::new(a), i, Box::new(b))
    }

    pub fn au(a: Formula, i: TimeInterval, b: Formula) -> Formula {
        Formula::AU(Box::new(a), i, Box::new(b))
    }

    pub fn ef(i: TimeInterval, f: Formula) -> Formula {
        Formula::EF(i, Box::new(f))
    }

    pub fn af(i: TimeInterval, f: Formula) -> Formula {
        Formula::AF(i, Box::new(f))
    }

    pub fn eg(i: TimeInterval, f: Formula) -> Formula {
        Formula::EG(i, Box::new(f))
    }

    pub fn ag(i: TimeInterval, f: Formula) -> Formula {
        Formula::AG(i, Box::new(f))
    }

    /// Builds `φ ⇝_{I_r} ψ`, enforcing the `[0,m]` / `[0,inf[` shape.
    pub fn leads_to(phi: Gmec, response: TimeInterval, psi: Gmec) -> Result<Formula> {
        check_response_interval(&response)?;
        Ok(Formula::LeadsTo(phi, response, psi))
    }

    /// The formula `φ ⇝_{I_r} ψ` abbreviates under `mode`.
    pub fn expand_leads_to(phi: &Gmec, response: TimeInterval, psi: &Gmec, mode: LeadsToMode) -> Formula {
        let body = Formula::implies(
            Formula::Gmec(phi.clone()),
            Formula::af(response, Formula::Gmec(psi.clone())),
        );
        match mode {
            LeadsToMode::Ag => Formula::ag(TimeInterval::unbounded(), body),
            LeadsToMode::Af => Formula::af(TimeInterval::unbounded(), body),
        }
    }

    /// Interprets a purely boolean formula as a GMEC; `None` if it contains a
    /// temporal operator.
    pub fn as_gmec(&self) -> Option<Gmec> {
        match self {
            Formula::Gmec(g) => Some(g.clone()),
            Formula::Not(f) => f.as_gmec().map(|g| g.negate()),
            Formula::Implies(a, b) => Some(Gmec::implies(a.as_gmec()?, b.as_gmec()?)),
            Formula::And(a, b) => Some(Gmec::and(a.as_gmec()?, b.as_gmec()?)),
            Formula::Or(a, b) => Some(Gmec::or(a.as_gmec()?, b.as_gmec()?)),
            _ => None,
        }
    }

    /// Intervals of all temporal operators, outermost first.
    pub fn intervals(&self) -> Vec<TimeInterval> {
        let mut out = Vec::new();
        self.visit(&mut |f| match f {
            Formula::EU(_, i, _)
            | Formula::AU(_, i, _)
            | Formula::EF(i, _)
            | Formula::AF(i, _)
            | Formula::EG(i, _)
            | Formula::AG(i, _)
            | Formula::LeadsTo(_, i, _) => out.push(*i),
            _ => {}
        });
        out
    }

    /// Largest finite constant in any interval of the formula.
    pub fn max_constant(&self) -> u32 {
        self.intervals()
            .iter()
            .map(TimeInterval::max_constant)
            .max()
            .unwrap_or(0)
    }

    pub fn gmecs(&self) -> Vec<&Gmec> {
        let mut out: Vec<&Gmec> = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Gmec>) {
            match f {
                Formula::Gmec(g) => out.push(g),
                Formula::LeadsTo(a, _, b) => {
                    out.push(a);
                    out.push(b);
                }
                Formula::Not(a) | Formula::EF(_, a) | Formula::AF(_, a) | Formula::EG(_, a) | Formula::AG(_, a) => walk(a, out),
                Formula::Implies(a, b)
                | Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::EU(a, _, b)
                | Formula::AU(a, _, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn check_places(&self, places: usize) -> Result<()> {
        for g in self.gmecs() {
            g.check_places(places)?;
        }
        Ok(())
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Gmec(_) | Formula::LeadsTo(..) => {}
            Formula::Not(a) | Formula::EF(_, a) | Formula::AF(_, a) | Formula::EG(_, a) | Formula::AG(_, a) => a.visit(f),
            Formula::Implies(a, b)
            | Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::EU(a, _, b)
            | Formula::AU(a, _, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Text form accepted back by the parser.
    pub fn render(&self, places: &[String]) -> String {
        match self {
            Formula::Gmec(g) => format!("({})", g.render(places)),
            Formula::Not(a) => format!("!{}", a.render(places)),
            Formula::Implies(a, b) => format!("({} => {})", a.render(places), b.render(places)),
            Formula::And(a, b) => format!("({} & {})", a.render(places), b.render(places)),
            Formula::Or(a, b) => format!("({} | {})", a.render(places), b.render(places)),
            Formula::EU(a, i, b) => format!("E[{} U{} {}]", a.render(places), i, b.render(places)),
            Formula::AU(a, i, b) => format!("A[{} U{} {}]", a.render(places), i, b.render(places)),
            Formula::EF(i, a) => format!("EF{} {}", i, a.render(places)),
            Formula::AF(i, a) => format!("AF{} {}", i, a.render(places)),
            Formula::EG(i, a) => format!("EG{} {}", i, a.render(places)),
            Formula::AG(i, a) => format!("AG{} {}", i, a.render(places)),
            Formula::LeadsTo(a, i, b) => {
                format!("({}) -->{} ({})", a.render(places), i, b.render(places))
            }
        }
    }
}

pub(crate) fn check_response_interval(i: &TimeInterval) -> Result<()> {
    let ok = i.low() == 0 && !i.low_open() && (i.high().is_infinite() || !i.high_open());
    if ok {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "response interval must be [0,m] or [0,inf[, got {i}"
        )))
    }
}

/// Integer window of a temporal operator, or `None` when it contains no
/// integer.
pub(crate) fn window(i: &TimeInterval) -> Option<(u32, Bound)> {
    i.integer_bounds()
}

/// Evaluates a GMEC on a marking.
pub fn eval_gmec(m: &Marking, phi: &Gmec) -> bool {
    match phi {
        Gmec::Atom(a) => a.holds(m),
        Gmec::Or(a, b) => eval_gmec(m, a) || eval_gmec(m, b),
        Gmec::And(a, b) => eval_gmec(m, a) && eval_gmec(m, b),
        Gmec::Implies(a, b) => !eval_gmec(m, a) || eval_gmec(m, b),
    }
}

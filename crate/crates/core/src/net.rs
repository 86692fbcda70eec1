//! Parametric time Petri nets with read and logical inhibitor arcs.
//!
//! Arc weights are stored densely, one vector per transition indexed by the
//! ordered place list. A zero read weight is "no read arc" and a zero
//! inhibitor weight is "no inhibitor arc on this place", so a transition is
//! enabled by `M` when, for every place `p`,
//!
//! ```text
//! M(p) >= pre(t)(p)  and  M(p) >= read(t)(p)  and  (inhibit(t)(p) == 0 or M(p) < inhibit(t)(p))
//! ```

use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::domain::{domain_contains, Valuation};
use crate::error::{Error, Result};
use crate::interval::{Bound, TimeInterval};
use crate::Domain;

/// Token count per place, indexed by the owning net's place order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn zeros(places: usize) -> Self {
        Marking(vec![0; places])
    }

    pub fn tokens(&self, place: usize) -> u32 {
        self.0[place]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Componentwise `self >= weights`.
    pub fn covers(&self, weights: &[u32]) -> bool {
        self.0.iter().zip(weights).all(|(m, w)| m >= w)
    }
}

/// Bound of a parametric interval: a literal or a parameter name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamExpr {
    Lit(u32),
    Param(String),
}

impl ParamExpr {
    pub fn param(name: impl Into<String>) -> Self {
        ParamExpr::Param(name.into())
    }

    pub fn eval(&self, v: &Valuation) -> Result<u32> {
        match self {
            ParamExpr::Lit(n) => Ok(*n),
            ParamExpr::Param(p) => v.require(p),
        }
    }

    pub fn parameter(&self) -> Option<&str> {
        match self {
            ParamExpr::Lit(_) => None,
            ParamExpr::Param(p) => Some(p),
        }
    }
}

impl From<u32> for ParamExpr {
    fn from(n: u32) -> Self {
        ParamExpr::Lit(n)
    }
}

impl From<&str> for ParamExpr {
    fn from(p: &str) -> Self {
        ParamExpr::Param(p.to_string())
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamExpr::Lit(n) => write!(f, "{n}"),
            ParamExpr::Param(p) => f.write_str(p),
        }
    }
}

/// Closed firing interval `[low, high]`, `high = None` meaning `[low, inf[`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamInterval {
    pub low: ParamExpr,
    pub high: Option<ParamExpr>,
}

impl ParamInterval {
    pub fn new(low: impl Into<ParamExpr>, high: Option<ParamExpr>) -> Self {
        ParamInterval {
            low: low.into(),
            high,
        }
    }

    pub fn literal(low: u32, high: Bound) -> Self {
        ParamInterval {
            low: ParamExpr::Lit(low),
            high: high.finite().map(ParamExpr::Lit),
        }
    }

    /// `[e, e]`, the usual shape for a parametric delay.
    pub fn point(e: impl Into<ParamExpr>) -> Self {
        let e = e.into();
        ParamInterval {
            low: e.clone(),
            high: Some(e),
        }
    }

    pub fn parameters(&self) -> impl Iterator<Item = &str> {
        self.low
            .parameter()
            .into_iter()
            .chain(self.high.iter().filter_map(|h| h.parameter()))
    }

    pub fn eval(&self, v: &Valuation) -> Result<TimeInterval> {
        let low = self.low.eval(v)?;
        match &self.high {
            None => Ok(TimeInterval::from_lower(low)),
            Some(h) => TimeInterval::closed(low, h.eval(v)?),
        }
    }
}

impl fmt::Display for ParamInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.high {
            Some(h) => write!(f, "[{},{}]", self.low, h),
            None => write!(f, "[{},inf[", self.low),
        }
    }
}

/// Places, transitions, the four arc functions and the initial marking.
///
/// This part is shared verbatim between a parametric [`Net`] and any of its
/// instantiations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Topology {
    pub places: Vec<String>,
    pub transitions: Vec<String>,
    pub pre: Vec<Vec<u32>>,
    pub post: Vec<Vec<u32>>,
    pub read: Vec<Vec<u32>>,
    pub inhibit: Vec<Vec<u32>>,
    pub initial: Marking,
}

impl Topology {
    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p == name)
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t == name)
    }

    pub fn require_place(&self, name: &str) -> Result<usize> {
        self.place_index(name)
            .ok_or_else(|| Error::UnknownPlace(name.to_string()))
    }

    pub fn require_transition(&self, name: &str) -> Result<usize> {
        self.transition_index(name)
            .ok_or_else(|| Error::UnknownTransition(name.to_string()))
    }

    /// `(M >= •t) ∧ (M >= □t) ∧ (M < ∘t)` with the zero-means-absent
    /// convention for inhibitor weights.
    pub fn is_enabled(&self, m: &Marking, t: usize) -> bool {
        let pre = &self.pre[t];
        let read = &self.read[t];
        let inh = &self.inhibit[t];
        m.0.iter()
            .enumerate()
            .all(|(p, &k)| k >= pre[p] && k >= read[p] && (inh[p] == 0 || k < inh[p]))
    }

    pub fn enabled_set(&self, m: &Marking) -> Vec<usize> {
        (0..self.transition_count())
            .filter(|&t| self.is_enabled(m, t))
            .collect()
    }

    /// `M - •t + t•`. The caller guarantees `M >= •t`.
    pub fn fire_marking(&self, m: &Marking, t: usize) -> Marking {
        Marking(
            m.0.iter()
                .zip(&self.pre[t])
                .zip(&self.post[t])
                .map(|((&k, &w_in), &w_out)| k - w_in + w_out)
                .collect(),
        )
    }

    /// Transitions newly enabled by firing `fired` from `m`: enabled at
    /// `M' = M - •fired + fired•` and either equal to `fired` or not enabled
    /// at `m`.
    pub fn newly_enabled_set(&self, m: &Marking, fired: usize) -> Result<Vec<usize>> {
        if !self.is_enabled(m, fired) {
            return Err(Error::Precondition(format!(
                "transition `{}` is not enabled",
                self.transitions[fired]
            )));
        }
        let next = self.fire_marking(m, fired);
        Ok((0..self.transition_count())
            .filter(|&t| self.is_enabled(&next, t) && (t == fired || !self.is_enabled(m, t)))
            .collect())
    }

    fn weight_tables(&self) -> [(&'static str, &Vec<Vec<u32>>); 4] {
        [
            ("pre", &self.pre),
            ("post", &self.post),
            ("read", &self.read),
            ("inhibit", &self.inhibit),
        ]
    }
}

/// A parametric time Petri net.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Net {
    pub topology: Topology,
    pub parameters: Vec<String>,
    pub intervals: Vec<ParamInterval>,
    pub domain: Domain,
}

impl Deref for Net {
    type Target = Topology;

    fn deref(&self) -> &Topology {
        &self.topology
    }
}

impl Net {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_place(&mut self, name: impl Into<String>, tokens: u32) -> Result<usize> {
        let name = name.into();
        if self.topology.place_index(&name).is_some() {
            return Err(Error::DuplicateName(name));
        }
        let topo = &mut self.topology;
        topo.places.push(name);
        topo.initial.0.push(tokens);
        for table in [&mut topo.pre, &mut topo.post, &mut topo.read, &mut topo.inhibit] {
            for row in table.iter_mut() {
                row.push(0);
            }
        }
        Ok(topo.places.len() - 1)
    }

    pub fn add_parameter(&mut self, name: impl Into<String>) -> Result<()> {
        let name = name.into();
        if self.parameters.contains(&name) {
            return Err(Error::DuplicateName(name));
        }
        self.parameters.push(name);
        Ok(())
    }

    pub fn add_transition(
        &mut self,
        name: impl Into<String>,
        interval: ParamInterval,
    ) -> Result<usize> {
        let name = name.into();
        if self.topology.transition_index(&name).is_some() {
            return Err(Error::DuplicateName(name));
        }
        let n = self.topology.place_count();
        let topo = &mut self.topology;
        topo.transitions.push(name);
        for table in [&mut topo.pre, &mut topo.post, &mut topo.read, &mut topo.inhibit] {
            table.push(vec![0; n]);
        }
        self.intervals.push(interval);
        Ok(self.topology.transitions.len() - 1)
    }

    fn indices(&self, t: &str, p: &str) -> Result<(usize, usize)> {
        Ok((self.require_transition(t)?, self.require_place(p)?))
    }

    pub fn set_pre(&mut self, t: &str, p: &str, w: u32) -> Result<()> {
        let (t, p) = self.indices(t, p)?;
        self.topology.pre[t][p] = w;
        Ok(())
    }

    pub fn set_post(&mut self, t: &str, p: &str, w: u32) -> Result<()> {
        let (t, p) = self.indices(t, p)?;
        self.topology.post[t][p] = w;
        Ok(())
    }

    pub fn set_read(&mut self, t: &str, p: &str, w: u32) -> Result<()> {
        let (t, p) = self.indices(t, p)?;
        self.topology.read[t][p] = w;
        Ok(())
    }

    pub fn set_inhibit(&mut self, t: &str, p: &str, w: u32) -> Result<()> {
        let (t, p) = self.indices(t, p)?;
        self.topology.inhibit[t][p] = w;
        Ok(())
    }

    pub fn set_initial(&mut self, p: &str, tokens: u32) -> Result<()> {
        let p = self.require_place(p)?;
        self.topology.initial.0[p] = tokens;
        Ok(())
    }

    pub fn set_interval(&mut self, t: &str, interval: ParamInterval) -> Result<()> {
        let t = self.require_transition(t)?;
        self.intervals[t] = interval;
        Ok(())
    }

    /// Evaluates every firing interval at `v`, after checking `v` against the
    /// parameter domain.
    pub fn instantiate(&self, v: &Valuation) -> Result<ConcreteNet> {
        for p in &self.parameters {
            v.require(p)?;
        }
        if !domain_contains(&self.domain, v)? {
            return Err(Error::OutsideDomain(v.to_string()));
        }
        let intervals = self
            .intervals
            .iter()
            .zip(&self.topology.transitions)
            .map(|(i, t)| {
                i.eval(v).map_err(|e| match e {
                    Error::IllFormedInterval(msg) => {
                        Error::IllFormedInterval(format!("transition `{t}` at {v}: {msg}"))
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConcreteNet {
            topology: self.topology.clone(),
            intervals,
        })
    }

    /// Diagnostics for every violated structural invariant; empty when the
    /// net is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let topo = &self.topology;
        for (kind, names) in [
            ("place", &topo.places),
            ("transition", &topo.transitions),
            ("parameter", &self.parameters),
        ] {
            let mut seen = HashSet::new();
            for n in names {
                if !seen.insert(n) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::DuplicateName,
                        format!("duplicate {kind} name `{n}`"),
                    ));
                }
            }
        }
        let np = topo.place_count();
        let nt = topo.transition_count();
        if topo.initial.len() != np {
            out.push(Diagnostic::new(
                DiagnosticKind::IncompleteMarking,
                format!(
                    "initial marking has {} entries for {np} places",
                    topo.initial.len()
                ),
            ));
        }
        for (name, table) in topo.weight_tables() {
            if table.len() != nt {
                out.push(Diagnostic::new(
                    DiagnosticKind::IncompleteWeightVector,
                    format!("{name} table has {} rows for {nt} transitions", table.len()),
                ));
            }
            for (t, row) in table.iter().enumerate() {
                if row.len() != np {
                    let tname = topo.transitions.get(t).map_or("?", String::as_str);
                    out.push(Diagnostic::new(
                        DiagnosticKind::IncompleteWeightVector,
                        format!(
                            "{name} vector of `{tname}` has {} entries for {np} places",
                            row.len()
                        ),
                    ));
                }
            }
        }
        if self.intervals.len() != nt {
            out.push(Diagnostic::new(
                DiagnosticKind::MissingInterval,
                format!("{} intervals for {nt} transitions", self.intervals.len()),
            ));
        }
        for (t, interval) in self.intervals.iter().enumerate() {
            let tname = topo.transitions.get(t).map_or("?", String::as_str);
            let referenced: std::collections::BTreeSet<&str> = interval.parameters().collect();
            for p in referenced {
                if !self.parameters.iter().any(|q| q == p) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::UnknownParameter,
                        format!("interval of `{tname}` references undeclared parameter `{p}`"),
                    ));
                }
            }
            if let (ParamExpr::Lit(lo), Some(ParamExpr::Lit(hi))) = (&interval.low, &interval.high)
            {
                if lo > hi {
                    out.push(Diagnostic::new(
                        DiagnosticKind::IllFormedInterval,
                        format!("interval of `{tname}` is [{lo},{hi}]"),
                    ));
                }
            }
        }
        for c in &self.domain.constraints {
            for p in c.parameters() {
                if !self.parameters.iter().any(|q| q == p) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::UnknownParameter,
                        format!("constraint `{c}` references undeclared parameter `{p}`"),
                    ));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    DuplicateName,
    IncompleteWeightVector,
    IncompleteMarking,
    MissingInterval,
    UnknownParameter,
    IllFormedInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, message: String) -> Self {
        Diagnostic { kind, message }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn validate_net(n: &Net) -> Vec<Diagnostic> {
    n.validate()
}

/// A net whose firing intervals have been fixed by a valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteNet {
    pub topology: Topology,
    pub intervals: Vec<TimeInterval>,
}

impl Deref for ConcreteNet {
    type Target = Topology;

    fn deref(&self) -> &Topology {
        &self.topology
    }
}

impl ConcreteNet {
    /// Integer form `(low, high)` of the static interval of `t`.
    pub fn static_bounds(&self, t: usize) -> (u32, Bound) {
        self.intervals[t]
            .integer_bounds()
            .expect("instantiated intervals are non-empty")
    }
}

pub fn enabled_set(n: &ConcreteNet, m: &Marking) -> Vec<usize> {
    n.enabled_set(m)
}

pub fn newly_enabled_set(n: &ConcreteNet, m: &Marking, fired: usize) -> Result<Vec<usize>> {
    n.newly_enabled_set(m, fired)
}

pub fn instantiate(n: &Net, v: &Valuation) -> Result<ConcreteNet> {
    n.instantiate(v)
}

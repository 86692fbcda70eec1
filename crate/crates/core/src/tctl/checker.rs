//! Timed CTL model checking by fixpoint labelling.
//!
//! Each timed until is decided on the product of graph nodes with an elapsed
//! time counter. For a window `[lo, hi]` the counter runs over `0..=hi+1`,
//! the last value standing for "past the window"; for `[lo, inf[` it runs
//! over `0..=lo`, the last value standing for "at least `lo`". Fire edges
//! keep the counter, unit delays increment it, saturating at the last value.
//! Existential until is a backward least fixpoint; universal until counts
//! unsatisfied successors per product node.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Bound, TimeInterval};
use crate::net::ConcreteNet;
use crate::semantics::StepLabel;
use crate::statespace::ReachGraph;

use super::ast::{eval_gmec, window, Formula, LeadsToMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    /// Evidence for a formula that holds.
    Witness,
    /// Evidence against a formula that fails.
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub kind: TraceKind,
    pub steps: Vec<StepLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Trace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub leads_to: LeadsToMode,
    /// Largest admissible counter range for a timed operator.
    pub max_horizon: Bound,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            leads_to: LeadsToMode::Ag,
            max_horizon: Bound::Infinite,
        }
    }
}

/// Counter discretisation for one timed operator.
#[derive(Debug, Clone, Copy)]
struct Clock {
    lo: u32,
    hi: Option<u32>,
    cap: u32,
}

impl Clock {
    fn new(i: &TimeInterval) -> Option<Clock> {
        let (lo, hi) = window(i)?;
        Some(match hi {
            Bound::Finite(h) => Clock {
                lo,
                hi: Some(h),
                cap: h + 1,
            },
            Bound::Infinite => Clock { lo, hi: None, cap: lo },
        })
    }

    fn classes(&self) -> usize {
        self.cap as usize + 1
    }

    fn inside(&self, c: u32) -> bool {
        c >= self.lo && self.hi.is_none_or(|h| c <= h)
    }

    fn next(&self, label: StepLabel, c: u32) -> u32 {
        match label {
            StepLabel::Fire(_) => c,
            StepLabel::Delay(d) => c.saturating_add(d).min(self.cap),
        }
    }

    /// Counters `c'` with `next(label, c') == c`.
    fn previous(&self, label: StepLabel, c: u32, out: &mut Vec<u32>) {
        out.clear();
        match label {
            StepLabel::Fire(_) => out.push(c),
            StepLabel::Delay(d) => {
                if c == self.cap {
                    let from = self.cap.saturating_sub(d);
                    out.extend(from..=self.cap);
                } else if c >= d {
                    out.push(c - d);
                }
            }
        }
    }
}

/// Satisfaction of a timed until over the product.
struct UntilTable {
    clock: Option<Clock>,
    sat: Vec<bool>,
}

impl UntilTable {
    fn at(&self, node: usize, c: u32) -> bool {
        match self.clock {
            Some(k) => self.sat[node * k.classes() + c as usize],
            None => false,
        }
    }
}

pub struct Checker<'a> {
    net: &'a ConcreteNet,
    graph: &'a ReachGraph,
    preds: Vec<Vec<usize>>,
    options: CheckOptions,
    cache: HashMap<Formula, Vec<bool>>,
}

impl<'a> Checker<'a> {
    pub fn new(net: &'a ConcreteNet, graph: &'a ReachGraph, options: CheckOptions) -> Result<Self> {
        if !graph.complete {
            return Err(Error::Incomplete(graph.node_count()));
        }
        Ok(Checker {
            net,
            graph,
            preds: graph.predecessors(),
            options,
            cache: HashMap::new(),
        })
    }

    /// Checks `f` at the initial state.
    pub fn check(&mut self, f: &Formula) -> Result<Verdict> {
        f.check_places(self.net.place_count())?;
        let holds = self.sat(f)?[self.graph.initial()];
        let steps = self.explain(f, holds, self.graph.initial())?;
        let kind = if holds {
            TraceKind::Witness
        } else {
            TraceKind::Counterexample
        };
        Ok(Verdict {
            holds,
            witness: steps.map(|steps| Trace { kind, steps }),
        })
    }

    /// Set of graph nodes satisfying `f`.
    pub fn sat(&mut self, f: &Formula) -> Result<Vec<bool>> {
        if let Some(v) = self.cache.get(f) {
            return Ok(v.clone());
        }
        let n = self.graph.node_count();
        let v = match f {
            Formula::Gmec(g) => (0..n)
                .map(|i| eval_gmec(&self.graph.state(i).marking, g))
                .collect(),
            Formula::Not(a) => self.sat(a)?.into_iter().map(|x| !x).collect(),
            Formula::Implies(a, b) => zip(&self.sat(a)?, &self.sat(b)?, |x, y| !x || y),
            Formula::And(a, b) => zip(&self.sat(a)?, &self.sat(b)?, |x, y| x && y),
            Formula::Or(a, b) => zip(&self.sat(a)?, &self.sat(b)?, |x, y| x || y),
            Formula::EU(a, i, b) => {
                let (pa, pb) = (self.sat(a)?, self.sat(b)?);
                self.project(&self.exists_until(&pa, i, &pb)?)
            }
            Formula::AU(a, i, b) => {
                let (pa, pb) = (self.sat(a)?, self.sat(b)?);
                self.project(&self.forall_until(&pa, i, &pb)?)
            }
            Formula::EF(i, b) => {
                let pb = self.sat(b)?;
                self.project(&self.exists_until(&vec![true; n], i, &pb)?)
            }
            Formula::AF(i, b) => {
                let pb = self.sat(b)?;
                self.project(&self.forall_until(&vec![true; n], i, &pb)?)
            }
            Formula::EG(i, a) => {
                let inner = Formula::af(*i, Formula::not((**a).clone()));
                self.sat(&inner)?.into_iter().map(|x| !x).collect()
            }
            Formula::AG(i, a) => {
                let inner = Formula::ef(*i, Formula::not((**a).clone()));
                self.sat(&inner)?.into_iter().map(|x| !x).collect()
            }
            Formula::LeadsTo(a, i, b) => {
                let expanded = Formula::expand_leads_to(a, *i, b, self.options.leads_to);
                self.sat(&expanded)?
            }
        };
        self.cache.insert(f.clone(), v.clone());
        Ok(v)
    }

    fn project(&self, t: &UntilTable) -> Vec<bool> {
        (0..self.graph.node_count()).map(|i| t.at(i, 0)).collect()
    }

    fn clock(&self, i: &TimeInterval) -> Result<Option<Clock>> {
        let clock = Clock::new(i);
        if let (Some(k), Bound::Finite(cap)) = (clock, self.options.max_horizon) {
            if k.cap > cap {
                return Err(Error::HorizonOverflow {
                    needed: k.cap,
                    cap,
                });
            }
        }
        Ok(clock)
    }

    fn exists_until(&self, phi: &[bool], i: &TimeInterval, psi: &[bool]) -> Result<UntilTable> {
        let Some(k) = self.clock(i)? else {
            return Ok(UntilTable { clock: None, sat: Vec::new() });
        };
        let kc = k.classes();
        let mut sat = vec![false; self.graph.node_count() * kc];
        let mut queue = VecDeque::new();
        for n in 0..self.graph.node_count() {
            for c in 0..=k.cap {
                if psi[n] && k.inside(c) {
                    sat[n * kc + c as usize] = true;
                    queue.push_back((n, c));
                }
            }
        }
        let mut prev = Vec::new();
        while let Some((n, c)) = queue.pop_front() {
            for &e in &self.preds[n] {
                let edge = self.graph.edges()[e];
                let m = edge.source;
                if !phi[m] {
                    continue;
                }
                k.previous(edge.label, c, &mut prev);
                for &cp in &prev {
                    let idx = m * kc + cp as usize;
                    if !sat[idx] {
                        sat[idx] = true;
                        queue.push_back((m, cp));
                    }
                }
            }
        }
        Ok(UntilTable { clock: Some(k), sat })
    }

    fn forall_until(&self, phi: &[bool], i: &TimeInterval, psi: &[bool]) -> Result<UntilTable> {
        let Some(k) = self.clock(i)? else {
            return Ok(UntilTable { clock: None, sat: Vec::new() });
        };
        let kc = k.classes();
        let nodes = self.graph.node_count();
        let mut sat = vec![false; nodes * kc];
        let mut pending: Vec<usize> = (0..nodes)
            .flat_map(|n| std::iter::repeat_n(self.graph.out_edges(n).len(), kc))
            .collect();
        let mut queue = VecDeque::new();
        for n in 0..nodes {
            for c in 0..=k.cap {
                if psi[n] && k.inside(c) {
                    sat[n * kc + c as usize] = true;
                    queue.push_back((n, c));
                }
            }
        }
        let mut prev = Vec::new();
        while let Some((n, c)) = queue.pop_front() {
            for &e in &self.preds[n] {
                let edge = self.graph.edges()[e];
                let m = edge.source;
                if !phi[m] {
                    continue;
                }
                k.previous(edge.label, c, &mut prev);
                for &cp in &prev {
                    let idx = m * kc + cp as usize;
                    if sat[idx] {
                        continue;
                    }
                    pending[idx] -= 1;
                    if pending[idx] == 0 {
                        sat[idx] = true;
                        queue.push_back((m, cp));
                    }
                }
            }
        }
        Ok(UntilTable { clock: Some(k), sat })
    }

    /// Evidence that `f` evaluates to `want` at `node`, as a label path
    /// starting there. `None` when no path-shaped evidence applies.
    fn explain(&mut self, f: &Formula, want: bool, node: usize) -> Result<Option<Vec<StepLabel>>> {
        let n = self.graph.node_count();
        match f {
            Formula::Gmec(_) => Ok(None),
            Formula::Not(a) => self.explain(a, !want, node),
            Formula::Implies(a, b) if !want => self.explain(b, false, node),
            Formula::And(a, b) if !want => {
                if !self.sat(a)?[node] {
                    self.explain(a, false, node)
                } else {
                    self.explain(b, false, node)
                }
            }
            Formula::Or(a, b) if want => {
                if self.sat(a)?[node] {
                    self.explain(a, true, node)
                } else {
                    self.explain(b, true, node)
                }
            }
            Formula::Implies(..) | Formula::And(..) | Formula::Or(..) => Ok(None),
            Formula::EU(a, i, b) if want => {
                let (pa, pb) = (self.sat(a)?, self.sat(b)?);
                let t = self.exists_until(&pa, i, &pb)?;
                self.explain_exists(&pa, &pb, &t, b, node)
            }
            Formula::EF(i, b) if want => {
                let pa = vec![true; n];
                let pb = self.sat(b)?;
                let t = self.exists_until(&pa, i, &pb)?;
                self.explain_exists(&pa, &pb, &t, b, node)
            }
            Formula::AU(a, i, b) if !want => {
                let (pa, pb) = (self.sat(a)?, self.sat(b)?);
                let t = self.forall_until(&pa, i, &pb)?;
                Ok(Some(self.explain_forall_failure(&pa, &t, node)))
            }
            Formula::AF(i, b) if !want => {
                let pa = vec![true; n];
                let pb = self.sat(b)?;
                let t = self.forall_until(&pa, i, &pb)?;
                Ok(Some(self.explain_forall_failure(&pa, &t, node)))
            }
            Formula::EG(i, a) => {
                let inner = Formula::af(*i, Formula::not((**a).clone()));
                self.explain(&inner, !want, node)
            }
            Formula::AG(i, a) => {
                let inner = Formula::ef(*i, Formula::not((**a).clone()));
                self.explain(&inner, !want, node)
            }
            Formula::LeadsTo(a, i, b) => {
                let expanded = Formula::expand_leads_to(a, *i, b, self.options.leads_to);
                self.explain(&expanded, want, node)
            }
            Formula::EU(..) | Formula::EF(..) | Formula::AU(..) | Formula::AF(..) => Ok(None),
        }
    }

    /// Shortest product path from `(node, 0)` to a target, followed by the
    /// explanation of the target formula there.
    fn explain_exists(
        &mut self,
        phi: &[bool],
        psi: &[bool],
        t: &UntilTable,
        target: &Formula,
        node: usize,
    ) -> Result<Option<Vec<StepLabel>>> {
        let Some(k) = t.clock else { return Ok(None) };
        if !t.at(node, 0) {
            return Ok(None);
        }
        let mut parent: HashMap<(usize, u32), ((usize, u32), StepLabel)> = HashMap::new();
        let mut seen = HashSet::from([(node, 0u32)]);
        let mut queue = VecDeque::from([(node, 0u32)]);
        while let Some((m, c)) = queue.pop_front() {
            if psi[m] && k.inside(c) {
                let mut steps = Vec::new();
                let mut cur = (m, c);
                while let Some(&(p, label)) = parent.get(&cur) {
                    steps.push(label);
                    cur = p;
                }
                steps.reverse();
                if let Some(rest) = self.explain(target, true, m)? {
                    steps.extend(rest);
                }
                return Ok(Some(steps));
            }
            if !phi[m] {
                continue;
            }
            for e in self.graph.out_edges(m) {
                let next = (e.target, k.next(e.label, c));
                if t.at(next.0, next.1) && seen.insert(next) {
                    parent.insert(next, ((m, c), e.label));
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    /// A path that keeps the universal until unsatisfied: it ends where `phi`
    /// fails, where the window has passed, at a deadlock, or just before it
    /// would revisit a product node (a lasso).
    fn explain_forall_failure(&self, phi: &[bool], t: &UntilTable, node: usize) -> Vec<StepLabel> {
        let mut steps = Vec::new();
        let Some(k) = t.clock else { return steps };
        let mut cur = (node, 0u32);
        let mut seen = HashSet::from([cur]);
        loop {
            let (m, c) = cur;
            if !phi[m] || k.hi.is_some() && c == k.cap {
                return steps;
            }
            let next = self
                .graph
                .out_edges(m)
                .iter()
                .map(|e| (e.label, (e.target, k.next(e.label, c))))
                .find(|(_, p)| !t.at(p.0, p.1));
            match next {
                Some((label, p)) => {
                    steps.push(label);
                    if !seen.insert(p) {
                        return steps;
                    }
                    cur = p;
                }
                None => return steps,
            }
        }
    }
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// Checks `phi` against a complete reachability graph with default options.
pub fn check(n: &ConcreteNet, g: &ReachGraph, phi: &Formula) -> Result<Verdict> {
    check_with(n, g, phi, CheckOptions::default())
}

pub fn check_with(
    n: &ConcreteNet,
    g: &ReachGraph,
    phi: &Formula,
    options: CheckOptions,
) -> Result<Verdict> {
    Checker::new(n, g, options)?.check(phi)
}

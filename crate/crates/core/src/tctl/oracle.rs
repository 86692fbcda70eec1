//! Reference evaluator that works directly on the semantics, without a
//! reachability graph or a time-counter product.
//!
//! Every temporal operator is decided by sweeping the runs forward one time
//! unit at a time. Layer `t` holds the states occupied at accumulated time `t`
//! by run prefixes that are still undecided; firings stay inside a layer and
//! unit delays move to the next one. Runs that are stuck inside a layer
//! (a cycle of firings) or have no successor count as maximal runs. An
//! unbounded window is settled once the layer sequence repeats past its
//! lower end, because layers are a function of their predecessor.
//!
//! Intended for small nets only; cost is exponential in the worst case.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::interval::{Bound, TimeInterval};
use crate::net::ConcreteNet;
use crate::semantics::{initial_state, successors, State, StepLabel};

use super::ast::{eval_gmec, window, Formula, LeadsToMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sweep {
    Eu,
    Au,
    Eg,
    Ag,
}

enum Verdict {
    /// The sweep is decided by this state.
    Stop,
    /// This run prefix is settled without deciding the sweep.
    Drop,
    Expand,
}

struct Oracle<'a> {
    net: &'a ConcreteNet,
    horizon: u32,
    mode: LeadsToMode,
    memo: HashMap<Formula, HashMap<State, bool>>,
}

impl<'a> Oracle<'a> {
    fn eval(&mut self, f: &Formula, s: &State) -> Result<bool> {
        if let Formula::Gmec(g) = f {
            return Ok(eval_gmec(&s.marking, g));
        }
        if let Some(v) = self.memo.get(f).and_then(|m| m.get(s)) {
            return Ok(*v);
        }
        let truth = Formula::truth();
        let v = match f {
            Formula::Gmec(_) => unreachable!(),
            Formula::Not(a) => !self.eval(a, s)?,
            Formula::Implies(a, b) => !self.eval(a, s)? || self.eval(b, s)?,
            Formula::And(a, b) => self.eval(a, s)? && self.eval(b, s)?,
            Formula::Or(a, b) => self.eval(a, s)? || self.eval(b, s)?,
            Formula::EU(a, i, b) => self.sweep(Sweep::Eu, a, i, b, s)?,
            Formula::AU(a, i, b) => self.sweep(Sweep::Au, a, i, b, s)?,
            Formula::EF(i, b) => self.sweep(Sweep::Eu, &truth, i, b, s)?,
            Formula::AF(i, b) => self.sweep(Sweep::Au, &truth, i, b, s)?,
            Formula::EG(i, a) => self.sweep(Sweep::Eg, a, i, &truth, s)?,
            Formula::AG(i, a) => self.sweep(Sweep::Ag, a, i, &truth, s)?,
            Formula::LeadsTo(a, i, b) => {
                let e = Formula::expand_leads_to(a, *i, b, self.mode);
                self.eval(&e, s)?
            }
        };
        self.memo.entry(f.clone()).or_default().insert(s.clone(), v);
        Ok(v)
    }

    fn classify(
        &mut self,
        kind: Sweep,
        a: &Formula,
        b: &Formula,
        inside: bool,
        x: &State,
    ) -> Result<Verdict> {
        Ok(match kind {
            Sweep::Eu => {
                if inside && self.eval(b, x)? {
                    Verdict::Stop
                } else if self.eval(a, x)? {
                    Verdict::Expand
                } else {
                    Verdict::Drop
                }
            }
            Sweep::Au => {
                if inside && self.eval(b, x)? {
                    Verdict::Drop
                } else if !self.eval(a, x)? {
                    Verdict::Stop
                } else {
                    Verdict::Expand
                }
            }
            Sweep::Eg => {
                if inside && !self.eval(a, x)? {
                    Verdict::Drop
                } else {
                    Verdict::Expand
                }
            }
            Sweep::Ag => {
                if inside && !self.eval(a, x)? {
                    Verdict::Stop
                } else {
                    Verdict::Expand
                }
            }
        })
    }

    /// Runs one forward sweep from `s`. For `Eu`/`Eg` the result is whether a
    /// deciding run exists; for `Au`/`Ag` whether none does.
    fn sweep(
        &mut self,
        kind: Sweep,
        a: &Formula,
        i: &TimeInterval,
        b: &Formula,
        s: &State,
    ) -> Result<bool> {
        let universal = matches!(kind, Sweep::Au | Sweep::Ag);
        let stopped = match window(i) {
            None => matches!(kind, Sweep::Au | Sweep::Eg),
            Some((lo, hi)) => self.run_layers(kind, a, lo, hi, b, s)?,
        };
        Ok(stopped != universal)
    }

    fn run_layers(
        &mut self,
        kind: Sweep,
        a: &Formula,
        lo: u32,
        hi: Bound,
        b: &Formula,
        s: &State,
    ) -> Result<bool> {
        // Zeno runs, deadlocks, leftovers past the window and endless
        // unbounded runs all decide the sweep for these two.
        let persistent = matches!(kind, Sweep::Au | Sweep::Eg);
        let mut layer: BTreeSet<State> = BTreeSet::from([s.clone()]);
        let mut seen: HashSet<BTreeSet<State>> = HashSet::new();
        let mut t: u32 = 0;
        loop {
            if layer.is_empty() {
                return Ok(false);
            }
            if Bound::Finite(t) > hi {
                return Ok(persistent);
            }
            if t > self.horizon {
                return Err(Error::HorizonTooSmall(self.horizon));
            }
            if hi.is_infinite() && t >= lo && !seen.insert(layer.clone()) {
                return Ok(persistent);
            }
            let inside = t >= lo;
            let mut members: Vec<State> = layer.iter().cloned().collect();
            let mut index: HashMap<State, usize> =
                members.iter().cloned().enumerate().map(|(k, x)| (x, k)).collect();
            let mut expanded = vec![false; members.len()];
            let mut fire_edges: Vec<(usize, usize)> = Vec::new();
            let mut next = BTreeSet::new();
            let mut k = 0;
            while k < members.len() {
                let x = members[k].clone();
                match self.classify(kind, a, b, inside, &x)? {
                    Verdict::Stop => return Ok(true),
                    Verdict::Drop => {}
                    Verdict::Expand => {
                        expanded[k] = true;
                        let succ = successors(self.net, &x);
                        if succ.is_empty() && persistent {
                            return Ok(true);
                        }
                        for (label, y) in succ {
                            match label {
                                StepLabel::Delay(_) => {
                                    next.insert(y);
                                }
                                StepLabel::Fire(_) => {
                                    let j = *index.entry(y.clone()).or_insert_with(|| {
                                        members.push(y);
                                        expanded.push(false);
                                        members.len() - 1
                                    });
                                    fire_edges.push((k, j));
                                }
                            }
                        }
                    }
                }
                k += 1;
            }
            if persistent && has_cycle(members.len(), &fire_edges, &expanded) {
                return Ok(true);
            }
            layer = next;
            t += 1;
        }
    }
}

/// Cycle detection on the firing edges between expanded states.
fn has_cycle(n: usize, edges: &[(usize, usize)], keep: &[bool]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if keep[u] && keep[v] {
            adj[u].push(v);
            indeg[v] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| keep[v] && indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = stack.pop() {
        removed += 1;
        for &v in &adj[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    removed < keep.iter().filter(|&&k| k).count()
}

/// Decides `phi` at the initial state of `n` by forward enumeration of runs
/// up to accumulated time `horizon`.
pub fn brute_force_check(n: &ConcreteNet, phi: &Formula, horizon: u32) -> Result<bool> {
    brute_force_check_with(n, phi, horizon, LeadsToMode::Ag)
}

pub fn brute_force_check_with(
    n: &ConcreteNet,
    phi: &Formula,
    horizon: u32,
    mode: LeadsToMode,
) -> Result<bool> {
    phi.check_places(n.place_count())?;
    let mut o = Oracle {
        net: n,
        horizon,
        mode,
        memo: HashMap::new(),
    };
    o.eval(phi, &initial_state(n))
}

//! Explicit reachability graph over the unit-delay semantics.

use std::fmt;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::interval::Bound;
use crate::net::ConcreteNet;
use crate::semantics::{initial_state, successors, State, StepLabel};
use crate::tctl::{eval_gmec, Gmec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreLimits {
    /// Largest admissible token count in any place.
    pub k_bound: u32,
    pub max_states: usize,
    /// Cap on the time horizon used by the timed checker.
    pub max_horizon: Bound,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits {
            k_bound: 8,
            max_states: 1_000_000,
            max_horizon: Bound::Infinite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub label: StepLabel,
    pub target: usize,
}

/// The explored fragment of the timed transition system.
///
/// Nodes are numbered in breadth-first discovery order and edges are stored
/// grouped by source in the same order, so the out-edges of a node form a
/// contiguous slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachGraph {
    nodes: IndexSet<State>,
    edges: Vec<Edge>,
    /// `offsets[i]..offsets[i + 1]` are the out-edges of node `i`, for every
    /// expanded node.
    offsets: Vec<usize>,
    pub complete: bool,
}

impl ReachGraph {
    pub const INITIAL: usize = 0;

    pub fn initial(&self) -> usize {
        Self::INITIAL
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn state(&self, i: usize) -> &State {
        &self.nodes[i]
    }

    pub fn states(&self) -> impl Iterator<Item = &State> {
        self.nodes.iter()
    }

    pub fn index_of(&self, s: &State) -> Option<usize> {
        self.nodes.get_index_of(s)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, i: usize) -> &[Edge] {
        if i + 1 < self.offsets.len() {
            &self.edges[self.offsets[i]..self.offsets[i + 1]]
        } else {
            &[]
        }
    }

    /// Incoming edge indices per node.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.node_count()];
        for (k, e) in self.edges.iter().enumerate() {
            preds[e.target].push(k);
        }
        preds
    }

    /// Shortest label path from the initial node to `target`, if any.
    pub fn path_to(&self, target: usize) -> Option<Vec<StepLabel>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.node_count()];
        let mut seen = vec![false; self.node_count()];
        let mut queue = std::collections::VecDeque::from([Self::INITIAL]);
        seen[Self::INITIAL] = true;
        while let Some(n) = queue.pop_front() {
            if n == target {
                let mut labels = Vec::new();
                let mut cur = n;
                while let Some(k) = parent[cur] {
                    labels.push(self.edges[k].label);
                    cur = self.edges[k].source;
                }
                labels.reverse();
                return Some(labels);
            }
            for (k, e) in self.out_edges(n).iter().enumerate() {
                if !seen[e.target] {
                    seen[e.target] = true;
                    parent[e.target] = Some(self.offsets[n] + k);
                    queue.push_back(e.target);
                }
            }
        }
        None
    }
}

/// Exploration aborted; the graph built so far is kept for inspection.
#[derive(Debug, Clone)]
pub struct BuildFailure {
    pub error: Error,
    pub partial: ReachGraph,
}

impl fmt::Display for BuildFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (after {} states)",
            self.error,
            self.partial.node_count()
        )
    }
}

impl std::error::Error for BuildFailure {}

impl From<BuildFailure> for Error {
    fn from(f: BuildFailure) -> Self {
        f.error
    }
}

fn check_k_bound(n: &ConcreteNet, s: &State, k: u32) -> Result<()> {
    match s.marking.0.iter().position(|&m| m > k) {
        Some(p) => Err(Error::KBoundViolation {
            place: n.places[p].clone(),
            tokens: s.marking.0[p],
            bound: k,
        }),
        None => Ok(()),
    }
}

/// Breadth-first closure of [`successors`] from the initial state.
///
/// Reaching `max_states` stops exploration with `complete = false`.
/// Exceeding the token bound aborts with a [`BuildFailure`].
pub fn build(n: &ConcreteNet, lim: &ExploreLimits) -> Result<ReachGraph, BuildFailure> {
    let mut g = ReachGraph {
        nodes: IndexSet::new(),
        edges: Vec::new(),
        offsets: vec![0],
        complete: true,
    };
    let s0 = initial_state(n);
    if let Err(error) = check_k_bound(n, &s0, lim.k_bound) {
        g.nodes.insert(s0);
        return Err(BuildFailure { error, partial: g });
    }
    g.nodes.insert(s0);
    let mut next = 0;
    while next < g.nodes.len() {
        let s = g.nodes[next].clone();
        for (label, succ) in successors(n, &s) {
            let target = match g.nodes.get_index_of(&succ) {
                Some(i) => i,
                None => {
                    if let Err(error) = check_k_bound(n, &succ, lim.k_bound) {
                        g.offsets.push(g.edges.len());
                        return Err(BuildFailure { error, partial: g });
                    }
                    if g.nodes.len() >= lim.max_states.max(1) {
                        g.complete = false;
                        g.offsets.push(g.edges.len());
                        return Ok(g);
                    }
                    g.nodes.insert_full(succ).0
                }
            };
            g.edges.push(Edge {
                source: next,
                label,
                target,
            });
        }
        g.offsets.push(g.edges.len());
        next += 1;
    }
    Ok(g)
}

/// Node indices whose marking satisfies `phi`.
pub fn states_satisfying(n: &ConcreteNet, g: &ReachGraph, phi: &Gmec) -> Result<Vec<usize>> {
    phi.check_places(n.place_count())?;
    Ok((0..g.node_count())
        .filter(|&i| eval_gmec(&g.state(i).marking, phi))
        .collect())
}

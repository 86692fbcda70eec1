//! Integer-time operational semantics.
//!
//! A state pairs a marking with a dynamic interval for each enabled
//! transition. Time moves in integer steps: elapsing `d` lowers every
//! remaining earliest delay (floored at zero) and every remaining deadline, and
//! may never push a deadline below zero. A transition can fire once its
//! earliest delay reaches zero. After a firing, newly enabled transitions get
//! their static interval back, and transitions that stay enabled keep their
//! partially elapsed one.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Bound;
use crate::net::{ConcreteNet, Marking};

/// Remaining firing window of an enabled transition, closed on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DynInterval {
    pub low: u32,
    pub high: Bound,
}

impl DynInterval {
    pub fn new(low: u32, high: Bound) -> Self {
        DynInterval { low, high }
    }
}

impl fmt::Display for DynInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.high {
            Bound::Finite(h) => write!(f, "[{},{}]", self.low, h),
            Bound::Infinite => write!(f, "[{},inf[", self.low),
        }
    }
}

/// `(M, I)`. `clocks[t]` is `Some` exactly when `t` is enabled at `marking`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct State {
    pub marking: Marking,
    pub clocks: Vec<Option<DynInterval>>,
}

impl State {
    pub fn clock(&self, t: usize) -> Option<DynInterval> {
        self.clocks[t]
    }

    pub fn enabled(&self) -> impl Iterator<Item = (usize, DynInterval)> + '_ {
        self.clocks
            .iter()
            .enumerate()
            .filter_map(|(t, c)| c.map(|c| (t, c)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StepLabel {
    Delay(u32),
    Fire(usize),
}

impl StepLabel {
    pub fn delay(self) -> u32 {
        match self {
            StepLabel::Delay(d) => d,
            StepLabel::Fire(_) => 0,
        }
    }

    /// Human-readable form using the net's transition names.
    pub fn describe(self, net: &ConcreteNet) -> String {
        match self {
            StepLabel::Delay(d) => format!("delay {d}"),
            StepLabel::Fire(t) => format!("fire {}", net.transitions[t]),
        }
    }
}

fn static_clock(n: &ConcreteNet, t: usize) -> DynInterval {
    let (low, high) = n.static_bounds(t);
    DynInterval::new(low, high)
}

/// `q0 = (M0, I_s)` restricted to the transitions enabled at `M0`.
pub fn initial_state(n: &ConcreteNet) -> State {
    let marking = n.initial.clone();
    let clocks = (0..n.transition_count())
        .map(|t| n.is_enabled(&marking, t).then(|| static_clock(n, t)))
        .collect();
    State { marking, clocks }
}

/// Largest admissible delay: the smallest remaining deadline over enabled
/// transitions, `inf` if there is none.
pub fn max_elapse(_n: &ConcreteNet, s: &State) -> Bound {
    s.enabled()
        .map(|(_, c)| c.high)
        .min()
        .unwrap_or(Bound::Infinite)
}

pub fn elapse(n: &ConcreteNet, s: &State, d: u32) -> Result<State> {
    let allowed = max_elapse(n, s);
    if d == 0 || Bound::Finite(d) > allowed {
        return Err(Error::TimeOverrun {
            requested: d,
            allowed: allowed.to_string(),
        });
    }
    let clocks = s
        .clocks
        .iter()
        .map(|c| {
            c.map(|c| DynInterval {
                low: c.low.saturating_sub(d),
                high: c.high.checked_sub(d).expect("guarded by max_elapse"),
            })
        })
        .collect();
    Ok(State {
        marking: s.marking.clone(),
        clocks,
    })
}

/// Enabled transitions whose earliest remaining delay is zero.
pub fn fireable_set(_n: &ConcreteNet, s: &State) -> Vec<usize> {
    s.enabled()
        .filter(|(_, c)| c.low == 0)
        .map(|(t, _)| t)
        .collect()
}

pub fn fire(n: &ConcreteNet, s: &State, t: usize) -> Result<State> {
    match s.clocks.get(t).copied().flatten() {
        Some(c) if c.low == 0 => {}
        _ => {
            return Err(Error::Precondition(format!(
                "transition `{}` is not fireable",
                n.transitions.get(t).map_or("?", String::as_str)
            )))
        }
    }
    let marking = n.fire_marking(&s.marking, t);
    let clocks = (0..n.transition_count())
        .map(|k| {
            if !n.is_enabled(&marking, k) {
                None
            } else if k == t || s.clocks[k].is_none() {
                Some(static_clock(n, k))
            } else {
                s.clocks[k]
            }
        })
        .collect();
    Ok(State { marking, clocks })
}

/// Applies one labelled step.
pub fn apply(n: &ConcreteNet, s: &State, label: StepLabel) -> Result<State> {
    match label {
        StepLabel::Delay(d) => elapse(n, s, d),
        StepLabel::Fire(t) => fire(n, s, t),
    }
}

/// Successors under unit-delay normalisation: every `Fire(t)` for fireable
/// `t` in transition order, then `Delay(1)` if time can advance.
pub fn successors(n: &ConcreteNet, s: &State) -> Vec<(StepLabel, State)> {
    let mut out: Vec<(StepLabel, State)> = fireable_set(n, s)
        .into_iter()
        .map(|t| (StepLabel::Fire(t), fire(n, s, t).expect("fireable")))
        .collect();
    if max_elapse(n, s) >= Bound::Finite(1) {
        out.push((StepLabel::Delay(1), elapse(n, s, 1).expect("admissible")));
    }
    out
}

/// Replays a trace from the initial state, returning every visited state
/// (including the initial one).
pub fn replay(n: &ConcreteNet, trace: &[StepLabel]) -> Result<Vec<State>> {
    let mut states = vec![initial_state(n)];
    for &label in trace {
        let next = apply(n, states.last().unwrap(), label)?;
        states.push(next);
    }
    Ok(states)
}

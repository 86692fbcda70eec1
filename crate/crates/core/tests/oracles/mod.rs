//! Reference implementations used by the property and acceptance suites.
//! Each one is written against the definitions directly and shares no
//! code with the library beyond plain data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ptpn_core::interval::Bound;
use ptpn_core::semantics::{
    apply, elapse, fire, fireable_set, initial_state, max_elapse, successors, State, StepLabel,
};
use ptpn_core::statespace::{build, ExploreLimits, ReachGraph};
use ptpn_core::synthesis::ParamBox;
use ptpn_core::tctl::{check, eval_gmec, Formula, Gmec, Trace, TraceKind};
use ptpn_core::{ConcreteNet, Marking, Net, TimeInterval, Valuation};

/// Enabledness straight from the definition: enough tokens on every input
/// and read place, below the threshold on every inhibitor place.
pub fn enabled_by_definition(n: &ConcreteNet, m: &Marking) -> Vec<usize> {
    let mut out = Vec::new();
    'next: for t in 0..n.transitions.len() {
        for p in 0..n.places.len() {
            let have = m.0[p];
            if have < n.pre[t][p] || have < n.read[t][p] {
                continue 'next;
            }
            let inh = n.inhibit[t][p];
            if inh > 0 && have >= inh {
                continue 'next;
            }
        }
        out.push(t);
    }
    out
}

/// Largest delay worth trying from `s` with arbitrary-step exploration:
/// past the last remaining earliest bound every longer delay leads to
/// the same state unless a deadline stops it first.
fn delay_cap(s: &State) -> u32 {
    s.clocks
        .iter()
        .flatten()
        .map(|c| c.low)
        .max()
        .unwrap_or(0)
        .max(1)
}

/// Reachable states when every admissible delay `d >= 1` is a step.
pub fn reach_arbitrary_delays(n: &ConcreteNet, limit: usize) -> Option<BTreeSet<State>> {
    let s0 = initial_state(n);
    let mut seen = BTreeSet::from([s0.clone()]);
    let mut queue = VecDeque::from([s0]);
    while let Some(s) = queue.pop_front() {
        let mut next = Vec::new();
        for t in fireable_set(n, &s) {
            next.push(fire(n, &s, t).ok()?);
        }
        let hi = match max_elapse(n, &s) {
            Bound::Finite(h) => h,
            Bound::Infinite => delay_cap(&s),
        };
        for d in 1..=hi {
            next.push(elapse(n, &s, d).ok()?);
        }
        for x in next {
            if seen.insert(x.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(x);
            }
        }
    }
    Some(seen)
}

/// Least fixpoint of the one-step successor relation, computed by
/// repeated sweeps over the whole set.
pub fn reach_fixpoint(n: &ConcreteNet, limit: usize) -> Option<BTreeSet<State>> {
    let mut set = BTreeSet::from([initial_state(n)]);
    loop {
        let mut grown = set.clone();
        for s in &set {
            for (_, x) in successors(n, s) {
                grown.insert(x);
            }
        }
        if grown.len() > limit {
            return None;
        }
        if grown.len() == set.len() {
            return Some(set);
        }
        set = grown;
    }
}

/// Checks the semantic laws on every state of `g`. Returns the first
/// violation found.
pub fn semantic_laws(n: &ConcreteNet, g: &ReachGraph) -> Result<(), String> {
    for s in g.states() {
        let enabled = enabled_by_definition(n, &s.marking);
        let clocked: Vec<usize> = s.enabled().map(|(t, _)| t).collect();
        if enabled != clocked {
            return Err(format!("clock domain {clocked:?} != enabled {enabled:?} at {s:?}"));
        }
        let me = max_elapse(n, s);
        if me == Bound::Finite(0) && !enabled.is_empty() && fireable_set(n, s).is_empty() {
            return Err(format!("urgency violated at {s:?}"));
        }
        let horizon = match me {
            Bound::Finite(h) => h,
            Bound::Infinite => delay_cap(s) + 2,
        };
        for d1 in 1..=horizon {
            for d2 in 1..=horizon - d1 {
                let two = elapse(n, &elapse(n, s, d1).unwrap(), d2).map_err(|e| e.to_string())?;
                let one = elapse(n, s, d1 + d2).map_err(|e| e.to_string())?;
                if one != two {
                    return Err(format!("elapse {d1}+{d2} not additive at {s:?}"));
                }
            }
        }
        for t in fireable_set(n, s) {
            let after = fire(n, s, t).map_err(|e| e.to_string())?;
            for p in 0..n.places.len() {
                let want = i64::from(s.marking.0[p]) - i64::from(n.pre[t][p]) + i64::from(n.post[t][p]);
                if want < 0 || i64::from(after.marking.0[p]) != want {
                    return Err(format!("token count of place {p} after firing {t}"));
                }
                if n.read[t][p] > 0 && n.pre[t][p] == 0 && n.post[t][p] == 0
                    && after.marking.0[p] != s.marking.0[p]
                {
                    return Err(format!("read arc {t}->{p} consumed"));
                }
            }
            let enabled_after = enabled_by_definition(n, &after.marking);
            let clocked_after: Vec<usize> = after.enabled().map(|(k, _)| k).collect();
            if enabled_after != clocked_after {
                return Err(format!("clock domain after firing {t}"));
            }
        }
    }
    Ok(())
}

/// Every edge of `g` is one semantic step.
pub fn edges_sound(n: &ConcreteNet, g: &ReachGraph) -> bool {
    g.edges()
        .iter()
        .all(|e| apply(n, g.state(e.source), e.label).as_ref() == Ok(g.state(e.target)))
}

/// Markings reachable when timing is ignored.
pub fn untimed_markings(n: &ConcreteNet, limit: usize) -> Option<BTreeSet<Vec<u32>>> {
    let m0 = n.initial.clone();
    let mut seen = BTreeSet::from([m0.0.clone()]);
    let mut queue = VecDeque::from([m0]);
    while let Some(m) = queue.pop_front() {
        for t in enabled_by_definition(n, &m) {
            let next: Vec<u32> = (0..n.places.len())
                .map(|p| m.0[p] - n.pre[t][p] + n.post[t][p])
                .collect();
            if seen.insert(next.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(Marking(next));
            }
        }
    }
    Some(seen)
}

/// Projection of a marking onto its first `k` places.
pub fn project(m: &Marking, k: usize) -> Vec<u32> {
    m.0[..k].to_vec()
}

/// Projected `(marking, label, marking)` steps of a graph, with observer
/// transitions dropped.
pub fn projected_steps(g: &ReachGraph, places: usize, transitions: usize) -> BTreeSet<(Vec<u32>, StepLabel, Vec<u32>)> {
    g.edges()
        .iter()
        .filter(|e| matches!(e.label, StepLabel::Delay(_)) || matches!(e.label, StepLabel::Fire(t) if t < transitions))
        .map(|e| {
            (
                project(&g.state(e.source).marking, places),
                e.label,
                project(&g.state(e.target).marking, places),
            )
        })
        .collect()
}

/// Every integer point of the box, by recursion over the parameters.
pub fn box_points(params: &[String], b: &ParamBox) -> Vec<Valuation> {
    fn go(params: &[String], b: &ParamBox, acc: Valuation, out: &mut Vec<Valuation>) {
        match params.split_first() {
            None => out.push(acc),
            Some((p, rest)) => {
                let (lo, hi) = b[p];
                for x in lo..=hi {
                    go(rest, b, acc.clone().with(p.clone(), x), out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(params, b, Valuation::new(), &mut out);
    out
}

/// Naive synthesis: instantiate and check every box point in the domain.
pub fn naive_synthesis(net: &Net, phi: &Formula, b: &ParamBox) -> (BTreeSet<Valuation>, usize) {
    let mut sat = BTreeSet::new();
    let mut explored = 0;
    for v in box_points(&net.parameters, b) {
        if !net.domain.contains(&v).unwrap() {
            continue;
        }
        explored += 1;
        let Ok(c) = net.instantiate(&v) else { continue };
        let Ok(g) = build(&c, &ExploreLimits::default()) else { continue };
        if check(&c, &g, phi).map(|r| r.holds).unwrap_or(false) {
            sat.insert(v);
        }
    }
    (sat, explored)
}

/// Replays a witness of an `EF_I ψ` or `EU` verdict: the final state
/// satisfies `target`, the total delay lies in `window`, and every state
/// strictly before the end satisfies `along`.
pub fn witness_valid(n: &ConcreteNet, w: &Trace, window: &TimeInterval, along: &Gmec, target: &Gmec) -> bool {
    if w.kind != TraceKind::Witness {
        return false;
    }
    let mut s = initial_state(n);
    let mut elapsed = 0;
    for &l in &w.steps {
        if !eval_gmec(&s.marking, along) {
            return false;
        }
        match apply(n, &s, l) {
            Ok(x) => s = x,
            Err(_) => return false,
        }
        elapsed += l.delay();
    }
    window.contains(elapsed) && eval_gmec(&s.marking, target)
}

/// Rewritings that must not change the verdict at the initial state.
pub fn alias_pairs(f: &Formula) -> Vec<(&'static str, Formula, Formula)> {
    let mut out = Vec::new();
    let truth = Formula::truth();
    let neg = |f: &Formula| Formula::not(f.clone());
    let mut visit = |f: &Formula| match f {
        Formula::EF(i, a) => out.push(("EF = E true U", f.clone(), Formula::eu(truth.clone(), *i, (**a).clone()))),
        Formula::AF(i, a) => out.push(("AF = A true U", f.clone(), Formula::au(truth.clone(), *i, (**a).clone()))),
        Formula::AG(i, a) => out.push(("AG = not EF not", f.clone(), neg(&Formula::ef(*i, neg(a))))),
        Formula::EG(i, a) => out.push(("EG = not AF not", f.clone(), neg(&Formula::af(*i, neg(a))))),
        _ => {}
    };
    visit(f);
    out.push(("double negation", f.clone(), neg(&neg(f))));
    out
}

/// Number of states per marking, used to compare graph shapes.
pub fn marking_histogram(g: &ReachGraph) -> BTreeMap<Marking, usize> {
    let mut h = BTreeMap::new();
    for s in g.states() {
        *h.entry(s.marking.clone()).or_insert(0) += 1;
    }
    h
}

//! Random small nets and formulas for differential and property testing.
//!
//! Generated nets conserve tokens on most transitions, so their state spaces
//! stay small; a transition may occasionally produce or consume a token.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::{Relation, Valuation};
use crate::interval::{Bound, TimeInterval};
use crate::net::{ConcreteNet, Net, ParamInterval};
use crate::tctl::{Atom, Formula, Gmec};

#[derive(Debug, Clone, Copy)]
pub struct NetShape {
    pub max_places: usize,
    pub max_transitions: usize,
    /// Largest finite interval endpoint.
    pub max_bound: u32,
    pub max_tokens: u32,
}

impl Default for NetShape {
    fn default() -> Self {
        NetShape {
            max_places: 5,
            max_transitions: 5,
            max_bound: 6,
            max_tokens: 3,
        }
    }
}

fn random_interval<R: Rng>(rng: &mut R, max_bound: u32) -> ParamInterval {
    let low = rng.gen_range(0..=max_bound);
    if rng.gen_bool(0.15) {
        ParamInterval::literal(low, Bound::Infinite)
    } else {
        ParamInterval::literal(low, Bound::Finite(rng.gen_range(low..=max_bound)))
    }
}

/// A parameter-free net within `shape`.
pub fn random_net<R: Rng>(rng: &mut R, shape: NetShape) -> ConcreteNet {
    random_parametric_net(rng, shape, &[])
        .instantiate(&Valuation::new())
        .expect("literal intervals")
}

/// A net whose intervals may use the given parameters as endpoints.
pub fn random_parametric_net<R: Rng>(rng: &mut R, shape: NetShape, params: &[&str]) -> Net {
    let mut n = Net::new();
    for p in params {
        n.add_parameter(*p).unwrap();
    }
    let np = rng.gen_range(1..=shape.max_places);
    let places: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
    let mut budget = rng.gen_range(1..=shape.max_tokens);
    for p in &places {
        let k = rng.gen_range(0..=budget.min(2));
        budget -= k;
        n.add_place(p.clone(), k).unwrap();
    }
    let nt = rng.gen_range(0..=shape.max_transitions);
    for t in 0..nt {
        let name = format!("t{t}");
        let mut interval = random_interval(rng, shape.max_bound);
        if !params.is_empty() && rng.gen_bool(0.5) {
            let p = *params.choose(rng).unwrap();
            interval = if rng.gen_bool(0.5) {
                ParamInterval::point(p)
            } else {
                ParamInterval::new(0, Some(p.into()))
            };
        }
        n.add_transition(name.clone(), interval).unwrap();
        let consumed = rng.gen_range(0..=2usize);
        for _ in 0..consumed {
            let p = places.choose(rng).unwrap();
            let w = n.pre[t][n.place_index(p).unwrap()];
            n.set_pre(&name, p, w + 1).unwrap();
        }
        let produced = match rng.gen_range(0..10) {
            0 => consumed.saturating_sub(1),
            1 if consumed > 0 => consumed + 1,
            _ => consumed,
        };
        for _ in 0..produced {
            let p = places.choose(rng).unwrap();
            let w = n.post[t][n.place_index(p).unwrap()];
            n.set_post(&name, p, w + 1).unwrap();
        }
        if rng.gen_bool(0.3) {
            let p = places.choose(rng).unwrap();
            n.set_read(&name, p, 1).unwrap();
        }
        if rng.gen_bool(0.3) {
            let p = places.choose(rng).unwrap();
            n.set_inhibit(&name, p, rng.gen_range(1..=2)).unwrap();
        }
    }
    n
}

pub fn random_gmec<R: Rng>(rng: &mut R, places: usize) -> Gmec {
    if rng.gen_bool(0.7) || places == 0 {
        let k = rng.gen_range(1..=2.min(places.max(1)));
        let terms = (0..k)
            .map(|_| (rng.gen_range(0..places.max(1)), rng.gen_range(-2..=2)))
            .collect();
        let rel = *Relation::ALL.choose(rng).unwrap();
        return Gmec::Atom(Atom::new(terms, rel, rng.gen_range(0..=2)));
    }
    let a = random_gmec(rng, places);
    let b = random_gmec(rng, places);
    match rng.gen_range(0..3) {
        0 => Gmec::and(a, b),
        1 => Gmec::or(a, b),
        _ => Gmec::implies(a, b),
    }
}

/// A window over small constants, in any of the five interval shapes.
pub fn random_time_interval<R: Rng>(rng: &mut R, max: u32) -> TimeInterval {
    let lo = rng.gen_range(0..=max);
    if rng.gen_bool(0.3) {
        return TimeInterval::new(lo, Bound::Infinite, rng.gen_bool(0.3), true).unwrap();
    }
    let hi = rng.gen_range(lo..=max);
    let (lo_open, hi_open) = if lo == hi {
        (false, false)
    } else {
        (rng.gen_bool(0.25), rng.gen_bool(0.25))
    };
    TimeInterval::new(lo, Bound::Finite(hi), lo_open, hi_open).unwrap()
}

/// A formula of nesting depth at most `depth`, with window constants up to
/// `max_constant`.
pub fn random_formula<R: Rng>(rng: &mut R, places: usize, depth: u32, max_constant: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return Formula::Gmec(random_gmec(rng, places));
    }
    let sub = |rng: &mut R| random_formula(rng, places, depth - 1, max_constant);
    match rng.gen_range(0..12) {
        0 => Formula::Not(Box::new(sub(rng))),
        1 => Formula::Implies(Box::new(sub(rng)), Box::new(sub(rng))),
        2 => {
            let (a, b) = (sub(rng), sub(rng));
            if rng.gen_bool(0.5) {
                Formula::And(Box::new(a), Box::new(b))
            } else {
                Formula::Or(Box::new(a), Box::new(b))
            }
        }
        3 | 4 => {
            let i = random_time_interval(rng, max_constant);
            Formula::eu(sub(rng), i, sub(rng))
        }
        5 | 6 => {
            let i = random_time_interval(rng, max_constant);
            Formula::au(sub(rng), i, sub(rng))
        }
        7 => Formula::ef(random_time_interval(rng, max_constant), sub(rng)),
        8 => Formula::af(random_time_interval(rng, max_constant), sub(rng)),
        9 => Formula::eg(random_time_interval(rng, max_constant), sub(rng)),
        10 => Formula::ag(random_time_interval(rng, max_constant), sub(rng)),
        _ => {
            let m = rng.gen_range(0..=max_constant);
            let ir = if rng.gen_bool(0.2) {
                TimeInterval::unbounded()
            } else {
                TimeInterval::closed(0, m).unwrap()
            };
            Formula::leads_to(random_gmec(rng, places), ir, random_gmec(rng, places))
                .expect("restricted response window")
        }
    }
}

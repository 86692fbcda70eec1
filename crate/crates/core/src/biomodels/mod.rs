//! Observer nets and the circadian clock case study.
//!
//! An observer is a small subnet glued onto a model through fresh places and
//! arcs. The ones here restrict behaviour (permanently inhibiting a
//! transition), expose it (a flag place marked by a firing), or replace parts
//! of the light schedule of the clock model.

mod circadian;

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::domain::{LinearConstraint, Relation};
use crate::error::{Error, Result};
use crate::net::{Net, ParamExpr, ParamInterval};
use crate::Rational;

pub use circadian::{build_circadian_clock, ClockConfig, ClockTransition, Component, CLOCK_TRANSITIONS};

/// Place and transition names of the light component of the clock model,
/// used by the light observers.
pub const LIGHT_OFF: &str = "pL0";
pub const LIGHT_ON: &str = "pL1";
pub const SWITCH_ON: &str = "t_on";
pub const SWITCH_OFF: &str = "t_off";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObserverSpec {
    /// A permanently marked place inhibiting `t`.
    InhibitTransition(String),
    /// A place that receives a token when `t` fires.
    EventFlag(String),
    /// Replace the light-off switch by one firing exactly `τ_d` after the
    /// light came on.
    LightDuration(ParamExpr),
    /// Dark for `τ_1`, light for `τ_2`, dark for `τ_3`, repeated every night;
    /// the three phases fill a 12 unit night.
    NightLight(ParamExpr, ParamExpr, ParamExpr),
    /// After `normal` time units, keep the light on for `extended` units.
    JetLag { normal: u32, extended: u32 },
    KnockOut(Vec<String>),
}

impl ObserverSpec {
    /// Name of the flag place added by [`ObserverSpec::EventFlag`].
    pub fn flag_place(t: &str) -> String {
        format!("pO_{t}")
    }

    pub fn block_place(t: &str) -> String {
        format!("pO_block_{t}")
    }
}

fn fresh_place(n: &mut Net, name: &str, tokens: u32) -> Result<()> {
    if n.place_index(name).is_some() || n.transition_index(name).is_some() {
        return Err(Error::Observer(format!("name `{name}` already exists")));
    }
    n.add_place(name, tokens)?;
    Ok(())
}

fn fresh_transition(n: &mut Net, name: &str, i: ParamInterval) -> Result<()> {
    if n.place_index(name).is_some() || n.transition_index(name).is_some() {
        return Err(Error::Observer(format!("name `{name}` already exists")));
    }
    n.add_transition(name, i)?;
    Ok(())
}

fn ensure_parameter(n: &mut Net, e: &ParamExpr) {
    if let Some(p) = e.parameter() {
        if !n.parameters.iter().any(|q| q == p) {
            n.parameters.push(p.to_string());
        }
    }
}

fn require_light(n: &Net) -> Result<()> {
    for p in [LIGHT_OFF, LIGHT_ON] {
        n.require_place(p)?;
    }
    for t in [SWITCH_ON, SWITCH_OFF] {
        n.require_transition(t)?;
    }
    Ok(())
}

fn inhibit(n: &mut Net, t: &str) -> Result<()> {
    n.require_transition(t)?;
    let p = ObserverSpec::block_place(t);
    fresh_place(n, &p, 1)?;
    n.set_inhibit(t, &p, 1)
}

/// Composes `spec` with `n`.
pub fn apply_observer(n: &Net, spec: &ObserverSpec) -> Result<Net> {
    let mut n = n.clone();
    match spec {
        ObserverSpec::InhibitTransition(t) => inhibit(&mut n, t)?,
        ObserverSpec::KnockOut(ts) => {
            for t in ts {
                inhibit(&mut n, t)?;
            }
        }
        ObserverSpec::EventFlag(t) => {
            n.require_transition(t)?;
            let p = ObserverSpec::flag_place(t);
            fresh_place(&mut n, &p, 0)?;
            n.set_post(t, &p, 1)?;
            n.set_inhibit(t, &p, 1)?;
        }
        ObserverSpec::LightDuration(td) => {
            require_light(&n)?;
            inhibit(&mut n, SWITCH_OFF)?;
            ensure_parameter(&mut n, td);
            fresh_transition(&mut n, "t_star", ParamInterval::point(td.clone()))?;
            n.set_pre("t_star", LIGHT_ON, 1)?;
            n.set_post("t_star", LIGHT_OFF, 1)?;
        }
        ObserverSpec::NightLight(t1, t2, t3) => {
            require_light(&n)?;
            inhibit(&mut n, SWITCH_ON)?;
            for (q, tokens) in [("pQ0", 1), ("pQ1", 0), ("pQ2", 0)] {
                fresh_place(&mut n, q, tokens)?;
            }
            // each phase ends by toggling the light
            let phases = [
                ("t_n1", t1, "pQ0", "pQ1", LIGHT_OFF, LIGHT_ON),
                ("t_n2", t2, "pQ1", "pQ2", LIGHT_ON, LIGHT_OFF),
                ("t_n3", t3, "pQ2", "pQ0", LIGHT_OFF, LIGHT_ON),
            ];
            for (t, tau, from, to, l_from, l_to) in phases {
                ensure_parameter(&mut n, tau);
                fresh_transition(&mut n, t, ParamInterval::point(tau.clone()))?;
                n.set_pre(t, from, 1)?;
                n.set_pre(t, l_from, 1)?;
                n.set_post(t, to, 1)?;
                n.set_post(t, l_to, 1)?;
            }
            n.set_inhibit(SWITCH_OFF, "pQ1", 1)?;
            let mut terms = Vec::new();
            let mut bound = Rational::from_integer(12);
            for tau in [t1, t2, t3] {
                match tau {
                    ParamExpr::Param(p) => terms.push((p.clone(), Rational::from_integer(1))),
                    ParamExpr::Lit(v) => bound -= Rational::from_integer(i64::from(*v)),
                }
            }
            if terms.is_empty() {
                if !bound.is_zero() {
                    return Err(Error::Observer("night phases must add up to 12".into()));
                }
            } else {
                n.domain.push(LinearConstraint::new(terms, Relation::Eq, bound));
            }
        }
        ObserverSpec::JetLag { normal, extended } => {
            require_light(&n)?;
            for (q, tokens) in [("pJ0", 1), ("pJ1", 0), ("pJ2", 0)] {
                fresh_place(&mut n, q, tokens)?;
            }
            fresh_transition(&mut n, "t_j1", ParamInterval::point(*normal))?;
            n.set_pre("t_j1", "pJ0", 1)?;
            n.set_post("t_j1", "pJ1", 1)?;
            n.set_inhibit(SWITCH_OFF, "pJ1", 1)?;
            fresh_transition(&mut n, "t_j2", ParamInterval::point(*extended))?;
            n.set_pre("t_j2", "pJ1", 1)?;
            n.set_pre("t_j2", LIGHT_ON, 1)?;
            n.set_post("t_j2", "pJ2", 1)?;
            n.set_post("t_j2", LIGHT_OFF, 1)?;
        }
    }
    Ok(n)
}

fn parse_expr(s: &str) -> Result<ParamExpr> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Observer("missing observer argument".into()));
    }
    if let Ok(v) = s.parse::<u32>() {
        return Ok(ParamExpr::Lit(v));
    }
    if s.chars().all(|c| c.is_alphanumeric() || c == '_') {
        Ok(ParamExpr::Param(s.to_string()))
    } else {
        Err(Error::Observer(format!("bad observer argument `{s}`")))
    }
}

/// `inhibit:t`, `flag:t`, `light-duration:td`, `night-light:a,b,c`,
/// `jet-lag:24,30`, `knock-out:t_b,t_f`.
impl FromStr for ObserverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Observer(format!("expected `kind:args`, got `{s}`")))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let arity = |k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::Observer(format!(
                    "`{kind}` takes {k} argument(s), got {}",
                    args.len()
                )))
            }
        };
        let name = |a: &str| -> Result<String> {
            match parse_expr(a)? {
                ParamExpr::Param(p) => Ok(p),
                ParamExpr::Lit(_) => Err(Error::Observer(format!("`{a}` is not a name"))),
            }
        };
        let nat = |a: &str| -> Result<u32> {
            a.parse()
                .map_err(|_| Error::Observer(format!("`{a}` is not a natural number")))
        };
        match kind.trim() {
            "inhibit" => {
                arity(1)?;
                Ok(ObserverSpec::InhibitTransition(name(args[0])?))
            }
            "flag" => {
                arity(1)?;
                Ok(ObserverSpec::EventFlag(name(args[0])?))
            }
            "light-duration" => {
                arity(1)?;
                Ok(ObserverSpec::LightDuration(parse_expr(args[0])?))
            }
            "night-light" => {
                arity(3)?;
                Ok(ObserverSpec::NightLight(
                    parse_expr(args[0])?,
                    parse_expr(args[1])?,
                    parse_expr(args[2])?,
                ))
            }
            "jet-lag" => {
                arity(2)?;
                Ok(ObserverSpec::JetLag {
                    normal: nat(args[0])?,
                    extended: nat(args[1])?,
                })
            }
            "knock-out" => Ok(ObserverSpec::KnockOut(
                args.iter().map(|a| name(a)).collect::<Result<_>>()?,
            )),
            other => Err(Error::Observer(format!("unknown observer `{other}`"))),
        }
    }
}

impl fmt::Display for ObserverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObserverSpec::InhibitTransition(t) => write!(f, "inhibit:{t}"),
            ObserverSpec::EventFlag(t) => write!(f, "flag:{t}"),
            ObserverSpec::LightDuration(e) => write!(f, "light-duration:{e}"),
            ObserverSpec::NightLight(a, b, c) => write!(f, "night-light:{a},{b},{c}"),
            ObserverSpec::JetLag { normal, extended } => write!(f, "jet-lag:{normal},{extended}"),
            ObserverSpec::KnockOut(ts) => write!(f, "knock-out:{}", ts.join(",")),
        }
    }
}

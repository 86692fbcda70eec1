//! A three-component circadian clock: light `L`, gene `G` and protein
//! complex `PC`, each a boolean level held by a pair of complementary places.
//!
//! Light alternates through `t_on` / `t_off`. Every other transition moves
//! one of `G` and `PC` up or down by one level inside a regulatory context,
//! given as read arcs on the light and on the other component. A context
//! change disables the transition and discards its elapsed time, which is
//! the usual behaviour of delays in discrete regulatory networks.
//!
//! Provenance of each transition is recorded next to it in
//! [`CLOCK_TRANSITIONS`]: `stated` when the text names the transition and its
//! role, `inferred` when the context or direction was reconstructed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::net::{Net, ParamExpr, ParamInterval};
use crate::synthesis::enumerate_valuations;
use crate::Constraint;

use super::{LIGHT_OFF, LIGHT_ON, SWITCH_OFF, SWITCH_ON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Gene,
    Protein,
}

impl Component {
    fn places(self) -> (&'static str, &'static str) {
        match self {
            Component::Gene => ("pG0", "pG1"),
            Component::Protein => ("pPC0", "pPC1"),
        }
    }

    fn other(self) -> Component {
        match self {
            Component::Gene => Component::Protein,
            Component::Protein => Component::Gene,
        }
    }
}

/// One level change of `component` inside a context. `None` in a context
/// slot means the level of that variable does not matter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockTransition {
    pub name: &'static str,
    pub component: Component,
    pub rising: bool,
    pub light: Option<bool>,
    pub other: Option<bool>,
    pub provenance: &'static str,
}

const fn tr(
    name: &'static str,
    component: Component,
    rising: bool,
    light: Option<bool>,
    other: Option<bool>,
    provenance: &'static str,
) -> ClockTransition {
    ClockTransition {
        name,
        component,
        rising,
        light,
        other,
        provenance,
    }
}

use Component::{Gene, Protein};

pub const CLOCK_TRANSITIONS: &[ClockTransition] = &[
    tr(
        "t_a",
        Protein,
        false,
        Some(true),
        Some(true),
        "inferred: light clears the complex while the gene is on; enabled only for an instant at nominal dusk",
    ),
    tr(
        "t_b",
        Gene,
        true,
        Some(false),
        Some(false),
        "stated: one of the two gene activations; context inferred (dark, no protein)",
    ),
    tr(
        "t_c",
        Protein,
        true,
        Some(false),
        Some(true),
        "stated: sole protein activation, dark only; gene requirement inferred",
    ),
    tr(
        "t_d",
        Gene,
        false,
        None,
        Some(true),
        "inferred: the complex represses the gene whatever the light",
    ),
    tr(
        "t_e",
        Protein,
        false,
        None,
        Some(false),
        "inferred: the complex decays once the gene is off",
    ),
    tr(
        "t_f",
        Gene,
        true,
        Some(true),
        Some(false),
        "stated: the other gene activation; context inferred (light, no protein)",
    ),
    tr(
        "t_g",
        Gene,
        false,
        Some(true),
        Some(true),
        "inferred: light speeds up repression by the complex",
    ),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ClockConfig {
    pub light_on: bool,
    pub gene: bool,
    pub protein: bool,
    /// Firing delay per transition name, each used as a point interval.
    pub delays: BTreeMap<String, ParamExpr>,
    pub constraints: Vec<Constraint>,
    pub structure: Vec<ClockTransition>,
}

impl ClockConfig {
    /// 12 units of light, 12 of darkness, starting at dawn just after the
    /// gene was switched off.
    pub fn nominal() -> Self {
        let delays = [
            (SWITCH_ON, 12),
            (SWITCH_OFF, 12),
            ("t_a", 7),
            ("t_b", 6),
            ("t_c", 7),
            ("t_d", 5),
            ("t_e", 1),
            ("t_f", 5),
            ("t_g", 1),
        ]
        .into_iter()
        .map(|(t, d)| (t.to_string(), ParamExpr::Lit(d)))
        .collect();
        ClockConfig {
            light_on: true,
            gene: false,
            protein: true,
            delays,
            constraints: Vec::new(),
            structure: CLOCK_TRANSITIONS.to_vec(),
        }
    }

    /// Darkness with the gene off and no protein complex.
    pub fn dark_start() -> Self {
        ClockConfig {
            light_on: false,
            gene: false,
            protein: false,
            ..Self::nominal()
        }
    }

    pub fn with_delay(mut self, t: &str, d: impl Into<ParamExpr>) -> Self {
        self.delays.insert(t.to_string(), d.into());
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }
}

/// Builds the clock net. Parameters are collected from the delays in
/// transition order.
pub fn build_circadian_clock(cfg: &ClockConfig) -> Result<Net> {
    let mut n = Net::new();
    let level = |up: bool| u32::from(up);
    n.add_place(LIGHT_OFF, level(!cfg.light_on))?;
    n.add_place(LIGHT_ON, level(cfg.light_on))?;
    n.add_place("pG0", level(!cfg.gene))?;
    n.add_place("pG1", level(cfg.gene))?;
    n.add_place("pPC0", level(!cfg.protein))?;
    n.add_place("pPC1", level(cfg.protein))?;

    let delay = |t: &str| -> Result<ParamExpr> {
        cfg.delays
            .get(t)
            .cloned()
            .ok_or_else(|| Error::InvalidNet(format!("no delay configured for `{t}`")))
    };
    let add = |n: &mut Net, t: &str| -> Result<()> {
        let d = delay(t)?;
        if let Some(p) = d.parameter() {
            if !n.parameters.iter().any(|q| q == p) {
                n.add_parameter(p)?;
            }
        }
        n.add_transition(t, ParamInterval::point(d))?;
        Ok(())
    };

    add(&mut n, SWITCH_ON)?;
    n.set_pre(SWITCH_ON, LIGHT_OFF, 1)?;
    n.set_post(SWITCH_ON, LIGHT_ON, 1)?;
    add(&mut n, SWITCH_OFF)?;
    n.set_pre(SWITCH_OFF, LIGHT_ON, 1)?;
    n.set_post(SWITCH_OFF, LIGHT_OFF, 1)?;

    for ct in &cfg.structure {
        add(&mut n, ct.name)?;
        let (low, high) = ct.component.places();
        let (from, to) = if ct.rising { (low, high) } else { (high, low) };
        n.set_pre(ct.name, from, 1)?;
        n.set_post(ct.name, to, 1)?;
        if let Some(on) = ct.light {
            n.set_read(ct.name, if on { LIGHT_ON } else { LIGHT_OFF }, 1)?;
        }
        if let Some(up) = ct.other {
            let (o_low, o_high) = ct.component.other().places();
            n.set_read(ct.name, if up { o_high } else { o_low }, 1)?;
        }
    }

    for c in &cfg.constraints {
        if let Some(p) = c.parameters().find(|p| !n.parameters.iter().any(|q| q == p)) {
            return Err(Error::InvalidNet(format!(
                "constraint `{c}` uses `{p}`, which is not a delay parameter"
            )));
        }
        n.domain.push(c.clone());
    }
    if !n.parameters.is_empty() && n.parameters.len() <= 3 {
        let bounds = n.parameters.iter().map(|p| (p.clone(), (0, 48))).collect();
        if enumerate_valuations(&n.parameters, &n.domain, &bounds)?.is_empty() {
            return Err(Error::InvalidNet("the parameter domain has no point in 0..48".into()));
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Relation;
    use crate::statespace::{build, ExploreLimits};
    use crate::domain::Valuation;
    use crate::Rational;

    fn valuation(pairs: &[(&str, u32)]) -> Valuation {
        pairs.iter().map(|&(p, v)| (p, v)).collect()
    }

    #[test]
    fn nominal_clock_is_one_safe() {
        let n = build_circadian_clock(&ClockConfig::nominal()).unwrap();
        assert!(n.validate().is_empty());
        let c = n.instantiate(&Valuation::new()).unwrap();
        let g = build(&c, &ExploreLimits::default()).unwrap();
        assert!(g.complete);
        assert!(g.states().all(|s| s.marking.0.iter().all(|&k| k <= 1)));
        // light starts on, so t_off is clocked at its static interval
        let s0 = g.state(0);
        let t_off = c.require_transition(SWITCH_OFF).unwrap();
        assert_eq!(s0.clock(t_off).map(|d| d.low), Some(12));
    }

    #[test]
    fn nominal_rhythm_is_tight() {
        use crate::tctl::{check, parse_formula};
        let c = build_circadian_clock(&ClockConfig::nominal())
            .unwrap()
            .instantiate(&Valuation::new())
            .unwrap();
        let g = build(&c, &ExploreLimits::default()).unwrap();
        let holds = |a: &str, m: u32, b: &str| {
            let f = parse_formula(&format!("(M({a}) = 1) -->[0,{m}] (M({b}) = 1)"), &c.places).unwrap();
            check(&c, &g, &f).unwrap().holds
        };
        for (a, m, b) in [("pPC0", 18, "pPC1"), ("pPC1", 6, "pPC0"), ("pG0", 6, "pG1"), ("pG1", 18, "pG0"), ("pPC1", 5, "pG0")] {
            assert!(holds(a, m, b), "{a} -> {b} within {m}");
            assert!(!holds(a, m - 1, b), "{a} -> {b} within {}", m - 1);
        }
    }

    #[test]
    fn parametric_light_cycle() {
        let cfg = ClockConfig::nominal()
            .with_delay(SWITCH_ON, "ton")
            .with_delay(SWITCH_OFF, "toff")
            .with_constraint(Constraint::sum(["ton", "toff"], Relation::Eq, Rational::from_integer(24)));
        let n = build_circadian_clock(&cfg).unwrap();
        assert_eq!(n.parameters, vec!["ton".to_string(), "toff".to_string()]);
        assert!(n.instantiate(&valuation(&[("ton", 7), ("toff", 17)])).is_ok());
        assert!(n.instantiate(&valuation(&[("ton", 7), ("toff", 16)])).is_err());
    }

    #[test]
    fn inconsistent_configs() {
        let mut cfg = ClockConfig::nominal();
        cfg.delays.remove("t_c");
        assert!(build_circadian_clock(&cfg).is_err());
        let cfg = ClockConfig::nominal()
            .with_delay("t_g", "tg")
            .with_constraint(Constraint::single("tg", Relation::Ge, Rational::from_integer(50)));
        assert!(build_circadian_clock(&cfg).is_err());
        let cfg = ClockConfig::nominal()
            .with_constraint(Constraint::single("tq", Relation::Ge, Rational::from_integer(1)));
        assert!(build_circadian_clock(&cfg).is_err());
    }
}

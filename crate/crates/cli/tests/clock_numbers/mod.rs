//! Published clock numbers against the reconstructed model. Each item
//! prints one MATCH or MISMATCH line with the reconstructed value next to
//! the expected one.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use ptpn_core::biomodels::{
    apply_observer, build_circadian_clock, ClockConfig, ObserverSpec, SWITCH_OFF, SWITCH_ON,
};
use ptpn_core::semantics::StepLabel;
use ptpn_core::statespace::{build, ExploreLimits};
use ptpn_core::synthesis::{synthesize, ParamBox, SynthesisProblem};
use ptpn_core::tctl::{check, parse_formula, Formula};
use ptpn_core::{Constraint, Net, Rational, Relation, Valuation};

fn query(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "models", "queries", name]
        .iter()
        .collect();
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn leads_to(a: &str, m: u32, b: &str) -> String {
    format!("(M({a}) = 1) -->[0,{m}] (M({b}) = 1)")
}

fn formula(net: &Net, text: &str) -> Formula {
    parse_formula(text, &net.places).unwrap()
}

fn holds(net: &Net, v: &Valuation, text: &str) -> bool {
    let c = net.instantiate(v).unwrap();
    let g = build(&c, &ExploreLimits::default()).unwrap();
    assert!(g.complete);
    check(&c, &g, &formula(net, text)).unwrap().holds
}

/// Least `m` for which `wrap(a -->[0,m] b)` holds, up to `cap`.
fn tightest(net: &Net, a: &str, b: &str, cap: u32, wrap: impl Fn(String) -> String) -> Option<u32> {
    (0..=cap).find(|&m| holds(net, &Valuation::new(), &wrap(leads_to(a, m, b))))
}

fn boxed(pairs: &[(&str, u32, u32)]) -> ParamBox {
    pairs.iter().map(|&(p, lo, hi)| (p.to_string(), (lo, hi))).collect()
}

fn satisfying(net: &Net, text: &str, b: ParamBox) -> BTreeSet<Valuation> {
    let p = SynthesisProblem::new(net.clone(), formula(net, text), b);
    let r = synthesize(&p).unwrap();
    assert!(r.failures.is_empty(), "{:?}", r.failures);
    r.satisfying.into_iter().collect()
}

fn values(set: &BTreeSet<Valuation>, p: &str) -> Vec<u32> {
    let v: BTreeSet<u32> = set.iter().map(|v| v.get(p).unwrap()).collect();
    v.into_iter().collect()
}

fn int(x: i64) -> Rational {
    Rational::from_integer(x)
}

fn tg_at_least_one(cfg: ClockConfig) -> ClockConfig {
    cfg.with_delay("t_g", "tg")
        .with_constraint(Constraint::single("tg", Relation::Ge, int(1)))
}

fn parametric_light(cfg: ClockConfig) -> ClockConfig {
    cfg.with_delay(SWITCH_ON, "ton")
        .with_delay(SWITCH_OFF, "toff")
        .with_constraint(Constraint::sum(["ton", "toff"], Relation::Eq, int(24)))
}

fn flagged(cfg: &ClockConfig, t: &str) -> Net {
    apply_observer(&build_circadian_clock(cfg).unwrap(), &ObserverSpec::EventFlag(t.into())).unwrap()
}

struct Tally {
    matched: usize,
    total: usize,
}

impl Tally {
    fn item(&mut self, name: &str, ok: bool, got: impl std::fmt::Display, want: impl std::fmt::Display) {
        self.total += 1;
        if ok {
            self.matched += 1;
        }
        let tag = if ok { "MATCH   " } else { "MISMATCH" };
        println!("      {tag} {name}: reconstructed {got}; expected {want}");
    }
}

fn query_one(t: &mut Tally) {
    let cfg = ClockConfig::dark_start();
    let net = apply_observer(&build_circadian_clock(&cfg).unwrap(), &ObserverSpec::InhibitTransition(SWITCH_ON.into())).unwrap();
    let free = holds(&net, &Valuation::new(), &query("oscillation.tctl"));
    let bounds: Vec<String> = [("pPC0", "pPC1"), ("pPC1", "pPC0"), ("pG0", "pG1"), ("pG1", "pG0")]
        .iter()
        .map(|(a, b)| match tightest(&net, a, b, 48, |f| f) {
            Some(m) => format!("{a}->{b} {m}"),
            None => format!("{a}->{b} never"),
        })
        .collect();
    t.item(
        "Query I, constant darkness",
        free,
        format!("oscillation {} with {}", if free { "persists" } else { "stops" }, bounds.join(", ")),
        "oscillation persists, bounds differ from the entrained ones",
    );
}

fn query_two(t: &mut Tally) {
    let cfg = ClockConfig::nominal().with_delay("t_g", 1);
    let net = apply_observer(&build_circadian_clock(&cfg).unwrap(), &ObserverSpec::LightDuration("td".into())).unwrap();
    let sat = satisfying(&net, &query("phi_i.tctl"), boxed(&[("td", 0, 24)]));
    let got = values(&sat, "td");
    let want: Vec<u32> = (6..=12).collect();
    t.item("Query II, light duration td", got == want, format!("{got:?}"), format!("{want:?}"));
}

fn query_three(t: &mut Tally) {
    let cfg = tg_at_least_one(ClockConfig::nominal());
    let net = apply_observer(
        &build_circadian_clock(&cfg).unwrap(),
        &ObserverSpec::NightLight("t1".into(), "t2".into(), "t3".into()),
    )
    .unwrap();
    let b = boxed(&[("tg", 1, 12), ("t1", 0, 12), ("t2", 0, 12), ("t3", 0, 12)]);
    let sat = satisfying(&net, &query("phi_i.tctl"), b);
    let (mut extra, mut missing, mut points) = (Vec::new(), Vec::new(), 0);
    for tg in 1..=12u32 {
        for t1 in 0..=12u32 {
            for t2 in 0..=12 - t1 {
                let t3 = 12 - t1 - t2;
                points += 1;
                let v = Valuation::new().with("tg", tg).with("t1", t1).with("t2", t2).with("t3", t3);
                let want = tg > t2 && t2 + t3 <= 4;
                match (sat.contains(&v), want) {
                    (true, false) => extra.push((tg, t1, t2, t3)),
                    (false, true) => missing.push((tg, t1, t2, t3)),
                    _ => {}
                }
            }
        }
    }
    let show = |xs: &[(u32, u32, u32, u32)]| -> String {
        let head: Vec<String> = xs.iter().take(4).map(|(g, a, b, c)| format!("tg={g} t={a},{b},{c}")).collect();
        if xs.len() > 4 { format!("{} ...", head.join("; ")) } else { head.join("; ") }
    };
    t.item(
        "Query III, night light",
        extra.is_empty() && missing.is_empty(),
        format!(
            "{} of {points} points satisfy; {} extra [{}], {} missing [{}]",
            sat.len(),
            extra.len(),
            show(&extra),
            missing.len(),
            show(&missing)
        ),
        "tg - t2 >= 1 and t2 + t3 <= 4",
    );
}

fn elicitation_tg(t: &mut Tally) {
    let cfg = tg_at_least_one(ClockConfig::nominal());
    let sat = satisfying(&flagged(&cfg, "t_g"), &query("flag_t_g.tctl"), boxed(&[("tg", 0, 12)]));
    let zero = ClockConfig::nominal().with_delay("t_g", 0);
    let at_zero = holds(&flagged(&zero, "t_g"), &Valuation::new(), &query("flag_t_g.tctl"));
    t.item(
        "t_g flag, nominal light, tg >= 1",
        sat.is_empty(),
        format!("satisfied for tg {:?}; tg = 0 {}", values(&sat, "tg"), if at_zero { "fires" } else { "does not fire" }),
        "never satisfied; only tg = 0 fires",
    );

    let cfg = parametric_light(tg_at_least_one(ClockConfig::nominal()));
    let b = boxed(&[("tg", 1, 12), ("ton", 0, 24), ("toff", 0, 24)]);
    let sat = satisfying(&flagged(&cfg, "t_g"), &query("flag_t_g.tctl"), b);
    let mut rows = Vec::new();
    let mut covered = true;
    for tg in 1..=12u32 {
        let mut on: Vec<u32> = sat.iter().filter(|v| v.get("tg") == Some(tg)).map(|v| v.get("ton").unwrap()).collect();
        on.sort_unstable();
        covered &= (7..=11).all(|x| on.contains(&x));
        rows.push(format!("tg={tg}:{on:?}"));
    }
    let late = sat.iter().any(|v| v.get("ton") == Some(23));
    t.item(
        "t_g flag, parametric light",
        covered && late,
        format!("ton per tg {}", rows.join(" ")),
        "every tg >= 1 with ton in [7,11], and ton = 23",
    );
}

fn elicitation_ta(t: &mut Tally) {
    let cfg = parametric_light(ClockConfig::nominal());
    let b = boxed(&[("ton", 0, 24), ("toff", 0, 24)]);
    let got = values(&satisfying(&flagged(&cfg, "t_a"), &query("flag_t_a.tctl"), b), "ton");
    let zero = ClockConfig::nominal().with_delay("t_a", 0);
    let at_zero = holds(&flagged(&zero, "t_a"), &Valuation::new(), &query("flag_t_a.tctl"));
    let nominal = holds(&flagged(&ClockConfig::nominal(), "t_a"), &Valuation::new(), &query("flag_t_a.tctl"));
    t.item(
        "t_a flag, nominal light",
        at_zero && !nominal,
        format!("delay 0 {}, delay 7 {}", if at_zero { "fires" } else { "never fires" }, if nominal { "fires" } else { "never fires" }),
        "fires only with delay 0",
    );
    t.item("t_a flag, parametric light", got == [23, 24], format!("ton {got:?}"), "ton {23, 24}");
}

fn knock_out(t: &mut Tally) {
    let base = build_circadian_clock(&ClockConfig::nominal()).unwrap();
    let net = apply_observer(&base, &ObserverSpec::KnockOut(vec!["t_b".into(), "t_f".into()])).unwrap();
    let c = net.instantiate(&Valuation::new()).unwrap();
    let g = build(&c, &ExploreLimits::default()).unwrap();
    let suppressed = [c.require_transition("t_b").unwrap(), c.require_transition("t_f").unwrap()];
    let fired = g.edges().iter().any(|e| matches!(e.label, StepLabel::Fire(k) if suppressed.contains(&k)));
    let osc = holds(&net, &Valuation::new(), &query("pc_oscillation.tctl"));
    t.item(
        "knock-out of t_b and t_f",
        !fired && !osc,
        format!("suppressed transitions {}, PC oscillation {}", if fired { "fire" } else { "never fire" }, if osc { "persists" } else { "stops" }),
        "never fire, oscillation stops",
    );
}

fn jet_lag(t: &mut Tally) {
    let base = build_circadian_clock(&ClockConfig::nominal()).unwrap();
    let net = apply_observer(&base, &ObserverSpec::JetLag { normal: 24, extended: 30 }).unwrap();
    let whole = tightest(&net, "pPC0", "pPC1", 60, |f| f);
    t.item("jet-lag, PC 0 to 1 delay", whole == Some(36), format!("{whole:?}"), "Some(36)");
    let later = tightest(&net, "pPC0", "pPC1", 60, |f| format!("AG[100,100] ({f})"));
    t.item("jet-lag, delay measured after 100 units", later == Some(18), format!("{later:?}"), "Some(18)");
}

pub fn report() -> (usize, usize) {
    let mut t = Tally { matched: 0, total: 0 };
    query_one(&mut t);
    query_two(&mut t);
    query_three(&mut t);
    elicitation_tg(&mut t);
    elicitation_ta(&mut t);
    knock_out(&mut t);
    jet_lag(&mut t);
    (t.matched, t.total)
}

//! Acceptance run: one line per criterion. Criteria 1-4 and 6 decide the
//! exit status; criterion 5 compares the reconstructed clock model with
//! published numbers and reports each comparison.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;
mod clock_numbers;

use std::collections::BTreeSet;
use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptpn_core::semantics::replay;
use ptpn_core::statespace::{build, ExploreLimits};
use ptpn_core::synthesis::{enumerate_valuations, synthesize_with_jobs, ParamBox, SynthesisProblem};
use ptpn_core::tctl::{brute_force_check, check, parse_formula, Formula, Gmec, TraceKind};
use ptpn_core::testgen::{
    random_formula, random_gmec, random_net, random_parametric_net, random_time_interval, NetShape,
};
use ptpn_core::{Bound, Constraint, Domain, Net, ParamInterval, Rational, Relation, TimeInterval, Valuation};

use oracles::*;

const SEMANTIC_NETS: usize = 500;
const DELAY_COMPARISONS: usize = 100;
const ORACLE_PAIRS: usize = 200;
/// Oracle precondition: graphs small enough for the forward sweep.
const ORACLE_MAX_NODES: usize = 1500;
const ORACLE_HORIZON: u32 = 400;
const ALIAS_FORMULAS: usize = 200;
const SYNTH_PROBLEMS: usize = 40;
const SYNTH_MAX_POINTS: usize = 200;
const SIMPLEX_POINTS: usize = 91;

fn limits() -> ExploreLimits {
    ExploreLimits {
        max_states: 5000,
        ..ExploreLimits::default()
    }
}

fn semantics() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut nets, mut compared) = (0, 0);
    while nets < SEMANTIC_NETS || compared < DELAY_COMPARISONS {
        let n = random_net(&mut rng, NetShape::default());
        let Ok(g) = build(&n, &limits()) else { continue };
        if !g.complete {
            continue;
        }
        semantic_laws(&n, &g)?;
        if !edges_sound(&n, &g) {
            return Err("an edge is not a semantic step".into());
        }
        nets += 1;
        if let Some(any) = reach_arbitrary_delays(&n, 5000) {
            let unit: BTreeSet<_> = g.states().cloned().collect();
            if unit != any {
                return Err(format!("unit and arbitrary delays differ on {n:?}"));
            }
            compared += 1;
        }
    }
    Ok(format!("{nets} nets, {compared} unit/arbitrary-delay comparisons"))
}

fn net_a() -> ptpn_core::ConcreteNet {
    let mut n = Net::new();
    n.add_place("p1", 1).unwrap();
    n.add_place("p2", 0).unwrap();
    n.add_transition("t1", ParamInterval::literal(2, Bound::Finite(3))).unwrap();
    n.set_pre("t1", "p1", 1).unwrap();
    n.set_post("t1", "p2", 1).unwrap();
    n.instantiate(&Valuation::new()).unwrap()
}

fn checker_vs_oracle() -> Result<String, String> {
    // NET-A: p1 --t1[2,3]--> p2, enumerated by hand. The token leaves p1
    // at time 2 or 3 on every run.
    let n = net_a();
    let g = build(&n, &limits()).unwrap();
    let by_hand = [
        ("EF[2,3](M(p2)>=1)", true),
        ("EF[0,1](M(p2)>=1)", false),
        ("AF[0,3](M(p2)>=1)", true),
        ("AF[0,2](M(p2)>=1)", false),
        ("EG[0,2](M(p1)=1)", true),
        ("AG[0,1](M(p1)=1)", true),
        ("AG[0,2](M(p1)=1)", false),
        ("(M(p1)>=1) -->[0,3] (M(p2)>=1)", true),
        ("(M(p1)>=1) -->[0,2] (M(p2)>=1)", false),
    ];
    for (text, want) in by_hand {
        let f = parse_formula(text, &n.places).unwrap();
        let got = check(&n, &g, &f).unwrap().holds;
        let slow = brute_force_check(&n, &f, 10).unwrap();
        if got != want || slow != want {
            return Err(format!("NET-A {text}: checker {got}, oracle {slow}, expected {want}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pairs = 0;
    while pairs < ORACLE_PAIRS {
        let n = random_net(&mut rng, NetShape::default());
        let Ok(g) = build(&n, &limits()) else { continue };
        if !g.complete || g.node_count() > ORACLE_MAX_NODES {
            continue;
        }
        let f = random_formula(&mut rng, n.place_count(), 2, 6);
        let fast = check(&n, &g, &f).map_err(|e| e.to_string())?;
        let slow = brute_force_check(&n, &f, ORACLE_HORIZON).map_err(|e| e.to_string())?;
        if fast.holds != slow {
            return Err(format!("disagreement on {}", f.render(&n.places)));
        }
        if let Some(w) = &fast.witness {
            replay(&n, &w.steps).map_err(|e| format!("witness does not replay: {e}"))?;
        }
        pairs += 1;
    }
    Ok(format!("{} NET-A cases, {pairs} random pairs", by_hand.len()))
}

fn aliases() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut formulas, mut rewrites, mut witnesses) = (0, 0, 0);
    while formulas < ALIAS_FORMULAS {
        let n = random_net(&mut rng, NetShape::default());
        let Ok(g) = build(&n, &limits()) else { continue };
        if !g.complete {
            continue;
        }
        let holds = |f: &Formula| check(&n, &g, f).map(|v| v.holds).map_err(|e| e.to_string());
        let f = random_formula(&mut rng, n.place_count(), 2, 6);
        let i = random_time_interval(&mut rng, 6);
        let phi = Formula::Gmec(random_gmec(&mut rng, n.place_count()));
        let mut cases = alias_pairs(&f);
        for core in [Formula::ef(i, phi.clone()), Formula::af(i, phi.clone()), Formula::eg(i, phi.clone()), Formula::ag(i, phi.clone())] {
            cases.extend(alias_pairs(&core));
        }
        for (name, a, b) in cases {
            if holds(&a)? != holds(&b)? {
                return Err(format!("{name} fails on {}", a.render(&n.places)));
            }
            rewrites += 1;
        }
        if holds(&Formula::not(f.clone()))? == holds(&f)? {
            return Err(format!("negation duality fails on {}", f.render(&n.places)));
        }
        let lower = rng.gen_range(0..=i.low());
        let wider = TimeInterval::new(lower, Bound::Infinite, false, true).unwrap();
        let target = random_gmec(&mut rng, n.place_count());
        let narrow = check(&n, &g, &Formula::ef(i, Formula::Gmec(target.clone()))).unwrap();
        if narrow.holds {
            if !holds(&Formula::ef(wider, Formula::Gmec(target.clone())))? {
                return Err("EF is not monotone in its interval".into());
            }
            let w = narrow.witness.as_ref().ok_or("EF verdict without witness")?;
            if w.kind != TraceKind::Witness || !witness_valid(&n, w, &i, &Gmec::truth(), &target) {
                return Err("invalid EF witness".into());
            }
            witnesses += 1;
        }
        formulas += 1;
    }
    Ok(format!("{formulas} formulas, {rewrites} rewritings, {witnesses} witnesses replayed"))
}

fn synthesis() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut problems = 0;
    let mut points = 0;
    while problems < SYNTH_PROBLEMS {
        let mut net = random_parametric_net(&mut rng, NetShape { max_transitions: 4, ..NetShape::default() }, &["a", "b"]);
        if rng.gen_bool(0.5) {
            let bound = Rational::from_integer(rng.gen_range(0..8));
            net.domain.push(Constraint::sum(["a", "b"], Relation::Ge, bound));
        }
        let bounds: ParamBox = [("a", rng.gen_range(0..10)), ("b", rng.gen_range(0..10))]
            .into_iter()
            .map(|(p, hi)| (p.to_string(), (0, hi)))
            .collect();
        if box_points(&net.parameters, &bounds).len() > SYNTH_MAX_POINTS {
            continue;
        }
        let f = random_formula(&mut rng, net.place_count(), 1, 6);
        let p = SynthesisProblem::new(net.clone(), f.clone(), bounds.clone());
        let got = synthesize_with_jobs(&p, 2).map_err(|e| e.to_string())?;
        if !got.failures.is_empty() {
            continue;
        }
        let (want, explored) = naive_synthesis(&net, &f, &bounds);
        let got_set: BTreeSet<Valuation> = got.satisfying.iter().cloned().collect();
        if got_set != want || got.explored != explored {
            return Err(format!("synthesis differs from the naive loop on {}", f.render(&net.places)));
        }
        if synthesize_with_jobs(&p, 1).map_err(|e| e.to_string())? != got {
            return Err("result depends on the number of jobs".into());
        }
        problems += 1;
        points += explored;
    }
    let params: Vec<String> = ["t1", "t2", "t3"].iter().map(|s| s.to_string()).collect();
    let d = Domain::new(vec![Constraint::sum(["t1", "t2", "t3"], Relation::Eq, Rational::from_integer(12))]);
    let cube: ParamBox = params.iter().map(|p| (p.clone(), (0, 12))).collect();
    let simplex = enumerate_valuations(&params, &d, &cube).map_err(|e| e.to_string())?;
    // independent count: pairs (t1, t2) with t1 + t2 <= 12 fix t3
    let by_pairs = (0..=12).map(|t1| 13 - t1).sum::<usize>();
    if simplex.len() != SIMPLEX_POINTS || by_pairs != SIMPLEX_POINTS {
        return Err(format!("simplex has {} points", simplex.len()));
    }
    Ok(format!("{problems} boxes ({points} points) match the naive loop, simplex has {SIMPLEX_POINTS} points"))
}

fn cli_contract() -> Result<String, String> {
    use tpnsynth::{run, EXIT_FAILS, EXIT_HOLDS, EXIT_INPUT, EXIT_LIMIT};
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let file = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p.display().to_string()
    };
    let a = file("a.tpnet", "place p1 = 1\nplace p2\ntransition t1 [2,3]\n  pre: p1\n  post: p2\n");
    let grow = file("g.tpnet", "place p = 1\ntransition t [1,1]\n  read: p\n  post: p\n");
    let par = file("p.tpnet", "place p1 = 1\nplace p2\nparam td\ntransition t [td,td]\n  pre: p1\n  post: p2\n");
    let missing = dir.path().join("missing.tpnet").display().to_string();
    let composed = dir.path().join("c.tpnet").display().to_string();
    let table: Vec<(Vec<&str>, i32)> = vec![
        (vec!["validate", &a], EXIT_HOLDS),
        (vec!["check", &a, "--formula", "EF[2,3] (M(p2)>=1)"], EXIT_HOLDS),
        (vec!["check", &a, "--formula", "EF[0,1] (M(p2)>=1)"], EXIT_FAILS),
        (vec!["check", &missing, "--formula", "EF (M(p2)>=1)"], EXIT_INPUT),
        (vec!["check", &a, "--formula", "EF (M("], EXIT_INPUT),
        (vec!["check", &grow, "--formula", "EF (M(p)>=2)"], EXIT_LIMIT),
        (vec!["graph", &a, "--max-states", "1"], EXIT_LIMIT),
        (vec!["simulate", &a, "--steps", "4", "--seed", "9"], EXIT_HOLDS),
        (vec!["synth", &par, "--formula", "EF[0,4] (M(p2)>=1)", "--box", "td=0..8"], EXIT_HOLDS),
        (vec!["synth", &par, "--formula", "EF[0,4] (M(p2)>=1)", "--box", "td=5..8"], EXIT_FAILS),
        (vec!["compose", &a, "--observer", "flag:t1", "-o", &composed], EXIT_HOLDS),
        (vec!["check", &composed, "--formula", "EF (M(pO_t1)>=1)"], EXIT_HOLDS),
        (vec!["bogus"], EXIT_INPUT),
    ];
    for (args, want) in &table {
        let mut argv = vec!["tpnsynth"];
        argv.extend(args.iter().copied());
        let code = run(argv, &mut Vec::new(), &mut Vec::new());
        if code != *want {
            return Err(format!("{args:?}: exit {code}, expected {want}"));
        }
    }
    let mut n = random_parametric_net(&mut ChaCha8Rng::seed_from_u64(6), NetShape::default(), &["x"]);
    n.domain.push(Constraint::single("x", Relation::Le, Rational::new(7, 2)));
    let text = ptpn_core::format::serialize_net(&n);
    if ptpn_core::format::parse_net_file(&text).map_err(|e| e.to_string())? != n {
        return Err("net format does not round-trip".into());
    }
    Ok(format!("{} exit-code cases, net file round-trip", table.len()))
}

type Criterion = fn() -> Result<String, String>;

fn main() {
    let mut failed = false;
    let criteria: [(&str, Criterion); 5] = [
        ("1 semantics properties", semantics),
        ("2 checker vs oracle", checker_vs_oracle),
        ("3 aliases and duality", aliases),
        ("4 synthesis differential", synthesis),
        ("6 cli contract", cli_contract),
    ];
    for (name, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed = true;
                println!("FAIL  criterion {name}: {why} ({secs:.1}s)");
            }
        }
    }
    let t = Instant::now();
    let (matched, total) = clock_numbers::report();
    let verdict = if matched == total { "PASS" } else { "FAIL" };
    println!(
        "{verdict}  criterion 5 clock model numbers (conditional): {matched}/{total} reproduced ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
    if failed {
        std::process::exit(1);
    }
}

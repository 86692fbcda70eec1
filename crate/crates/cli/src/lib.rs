//! `tpnsynth`: validation, simulation, model checking and parameter
//! synthesis for `.tpnet` nets.
//!
//! Exit codes: 0 success or the property holds, 1 the property fails,
//! 2 usage or input error, 3 a resource limit was hit.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ptpn_core::biomodels::{apply_observer, ObserverSpec};
use ptpn_core::format::{parse_net_file, serialize_net};
use ptpn_core::semantics::{initial_state, successors, State, StepLabel};
use ptpn_core::statespace::{build, ExploreLimits, ReachGraph};
use ptpn_core::synthesis::{synthesize_with_jobs, ParamBox, SynthesisProblem, SynthesisResult};
use ptpn_core::tctl::{check_with, parse_formula, CheckOptions, Formula, LeadsToMode, Verdict};
use ptpn_core::{Bound, ConcreteNet, Error, Net, Valuation};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

/// Version of the JSON report layout, bumped on incompatible changes.
pub const REPORT_SCHEMA: u32 = 1;
/// Env var overriding the default state cap.
pub const MAX_STATES_ENV: &str = "TPNSYNTH_MAX_STATES";

#[derive(Parser, Debug)]
#[command(name = "tpnsynth", version, about = "Parametric time Petri net checker and parameter synthesizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report structural problems of a net.
    Validate(NetArgs),
    /// Print one random timed run.
    Simulate {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export the reachability graph.
    Graph(NetArgs),
    /// Check a formula at the initial state.
    Check {
        #[command(flatten)]
        net: NetArgs,
        /// Formula text, or a path to a `.tctl` file.
        #[arg(long)]
        formula: String,
    },
    /// Enumerate a parameter box and report the satisfying valuations.
    Synth {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        formula: String,
        /// `name=lo..hi`, once per parameter.
        #[arg(long = "box", value_name = "RANGE")]
        ranges: Vec<String>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Compose observers with a net and print the result.
    Compose {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long = "observer", value_name = "SPEC", required = true)]
        observers: Vec<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct NetArgs {
    /// Net in the `.tpnet` format.
    path: PathBuf,
    /// Parameter value `name=v`; repeatable.
    #[arg(long = "param", value_name = "NAME=V")]
    params: Vec<String>,
    #[arg(long, default_value_t = 8)]
    k_bound: u32,
    #[arg(long, env = MAX_STATES_ENV, default_value_t = 1_000_000)]
    max_states: usize,
    /// Largest time horizon the checker may use.
    #[arg(long)]
    max_horizon: Option<u32>,
    #[arg(long, value_enum, default_value_t = LeadsTo::Ag)]
    leadsto: LeadsTo,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LeadsTo {
    Ag,
    Af,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::KBoundViolation { .. }
            | Error::Incomplete(_)
            | Error::HorizonOverflow { .. }
            | Error::HorizonTooSmall(_) => EXIT_LIMIT,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

struct Session {
    argv: Vec<String>,
    inputs: BTreeMap<String, String>,
    started: Instant,
}

impl Session {
    fn load_net(&mut self, args: &NetArgs) -> Result<Net, Failure> {
        let text = read_file(&args.path)?;
        self.inputs
            .insert(args.path.display().to_string(), digest(&text));
        Ok(parse_net_file(&text)?)
    }

    /// Inline formula text, or the contents of the named file.
    fn load_formula(&mut self, spec: &str, places: &[String]) -> Result<Formula, Failure> {
        let path = Path::new(spec);
        let text = if path.is_file() {
            let text = read_file(path)?;
            self.inputs.insert(spec.to_string(), digest(&text));
            text
        } else {
            spec.to_string()
        };
        Ok(parse_formula(&text, places)?)
    }

    fn report(&self, result: Value) -> Value {
        json!({
            "schema": REPORT_SCHEMA,
            "tool": "tpnsynth",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.argv,
            "inputs": self.inputs,
            "result": result,
            "elapsed_ms": self.started.elapsed().as_millis() as u64,
        })
    }
}

fn limits(args: &NetArgs) -> ExploreLimits {
    ExploreLimits {
        k_bound: args.k_bound,
        max_states: args.max_states,
        max_horizon: args.max_horizon.map_or(Bound::Infinite, Bound::Finite),
    }
}

fn check_options(args: &NetArgs) -> CheckOptions {
    CheckOptions {
        leads_to: match args.leadsto {
            LeadsTo::Ag => LeadsToMode::Ag,
            LeadsTo::Af => LeadsToMode::Af,
        },
        max_horizon: args.max_horizon.map_or(Bound::Infinite, Bound::Finite),
    }
}

fn parse_assignment(s: &str) -> Result<(String, String), Failure> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| input_error(format!("expected `name=value`, got `{s}`")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn valuation(args: &NetArgs) -> Result<Valuation, Failure> {
    let mut v = Valuation::new();
    for a in &args.params {
        let (k, raw) = parse_assignment(a)?;
        let x = raw
            .parse()
            .map_err(|_| input_error(format!("`{raw}` is not a natural number")))?;
        v.set(k, x);
    }
    Ok(v)
}

fn parse_box(ranges: &[String]) -> Result<ParamBox, Failure> {
    let mut b = ParamBox::new();
    for r in ranges {
        let (k, span) = parse_assignment(r)?;
        let (lo, hi) = span
            .split_once("..")
            .ok_or_else(|| input_error(format!("expected `lo..hi`, got `{span}`")))?;
        let nat = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| input_error(format!("`{s}` is not a natural number")))
        };
        b.insert(k, (nat(lo)?, nat(hi)?));
    }
    Ok(b)
}

fn concrete(session: &mut Session, args: &NetArgs) -> Result<ConcreteNet, Failure> {
    let net = session.load_net(args)?;
    let diagnostics = net.validate();
    if let Some(d) = diagnostics.first() {
        return Err(input_error(d.to_string()));
    }
    Ok(net.instantiate(&valuation(args)?)?)
}

fn build_graph(n: &ConcreteNet, args: &NetArgs) -> Result<ReachGraph, Failure> {
    let g = build(n, &limits(args)).map_err(Error::from)?;
    if !g.complete {
        return Err(Error::Incomplete(g.node_count()).into());
    }
    Ok(g)
}

#[derive(Serialize)]
struct StateView {
    marking: BTreeMap<String, u32>,
    clocks: BTreeMap<String, String>,
}

fn view(n: &ConcreteNet, s: &State) -> StateView {
    StateView {
        marking: n
            .places
            .iter()
            .zip(&s.marking.0)
            .map(|(p, &k)| (p.clone(), k))
            .collect(),
        clocks: s
            .enabled()
            .map(|(t, c)| (n.transitions[t].clone(), c.to_string()))
            .collect(),
    }
}

fn label(n: &ConcreteNet, l: StepLabel) -> Value {
    match l {
        StepLabel::Delay(d) => json!({ "delay": d }),
        StepLabel::Fire(t) => json!({ "fire": n.transitions[t] }),
    }
}

fn verdict_json(n: &ConcreteNet, v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "witness": v.witness.as_ref().map(|w| json!({
            "kind": w.kind,
            "steps": w.steps.iter().map(|&l| label(n, l)).collect::<Vec<_>>(),
        })),
    })
}

fn graph_json(n: &ConcreteNet, g: &ReachGraph) -> Value {
    json!({
        "complete": g.complete,
        "initial": g.initial(),
        "nodes": g.states().enumerate().map(|(i, s)| {
            let v = view(n, s);
            json!({ "id": i, "marking": v.marking, "clocks": v.clocks })
        }).collect::<Vec<_>>(),
        "edges": g.edges().iter().map(|e| json!({
            "source": e.source,
            "label": label(n, e.label),
            "target": e.target,
        })).collect::<Vec<_>>(),
    })
}

fn synthesis_csv(params: &[String], r: &SynthesisResult) -> String {
    let mut out = params.join(",");
    out.push('\n');
    for v in &r.satisfying {
        let row: Vec<String> = params
            .iter()
            .map(|p| v.get(p).map_or(String::new(), |x| x.to_string()))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn synthesis_text(r: &SynthesisResult) -> String {
    let mut out = format!(
        "explored {} valuations, {} satisfying, {} failed\n",
        r.explored,
        r.satisfying.len(),
        r.failures.len()
    );
    for (p, range) in &r.summary.projections {
        out.push_str(&format!("{p} in [{}, {}]\n", range.min, range.max));
    }
    if r.summary.box_exact {
        out.push_str("the satisfying set is exactly this box\n");
    }
    for v in &r.satisfying {
        out.push_str(&format!("  {v}\n"));
    }
    for f in &r.failures {
        out.push_str(&format!("  {} failed: {}\n", f.valuation, f.error));
    }
    out
}

fn emit(out: &mut dyn Write, session: &Session, format: Format, result: Value, text: String) {
    let body = match format {
        Format::Json => {
            let report = session.report(result);
            serde_json::to_string_pretty(&report).expect("serializable") + "\n"
        }
        Format::Csv | Format::Text => text,
    };
    let _ = out.write_all(body.as_bytes());
}

fn execute(cli: Cli, session: &mut Session, out: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Validate(args) => {
            let net = session.load_net(&args)?;
            let diagnostics = net.validate();
            let text: String = diagnostics.iter().map(|d| format!("{d}\n")).collect();
            let result = json!({
                "valid": diagnostics.is_empty(),
                "diagnostics": diagnostics.iter().map(|d| json!({
                    "kind": d.kind,
                    "message": d.message,
                })).collect::<Vec<_>>(),
            });
            let text = if text.is_empty() { "ok\n".to_string() } else { text };
            emit(out, session, args.format, result, text);
            Ok(if diagnostics.is_empty() { EXIT_HOLDS } else { EXIT_INPUT })
        }
        Command::Simulate { net: args, steps, seed } => {
            let n = concrete(session, &args)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = initial_state(&n);
            let mut trace = vec![json!({ "state": view(&n, &s) })];
            let mut text = format!("{:?}\n", view(&n, &s).marking);
            let mut time = 0u64;
            for _ in 0..steps {
                let succ = successors(&n, &s);
                let Some((l, next)) = succ.choose(&mut rng).cloned() else { break };
                time += u64::from(l.delay());
                text.push_str(&format!("@{time} {}\n", l.describe(&n)));
                trace.push(json!({ "step": label(&n, l), "time": time, "state": view(&n, &next) }));
                s = next;
            }
            emit(out, session, args.format, json!({ "seed": seed, "trace": trace }), text);
            Ok(EXIT_HOLDS)
        }
        Command::Graph(args) => {
            let n = concrete(session, &args)?;
            let (g, code) = match build(&n, &limits(&args)) {
                Ok(g) if g.complete => (g, EXIT_HOLDS),
                Ok(g) => (g, EXIT_LIMIT),
                Err(f) => (f.partial, EXIT_LIMIT),
            };
            let text = format!("{} states, {} edges\n", g.node_count(), g.edge_count());
            emit(out, session, args.format, graph_json(&n, &g), text);
            Ok(code)
        }
        Command::Check { net: args, formula } => {
            let n = concrete(session, &args)?;
            let f = session.load_formula(&formula, &n.places)?;
            let g = build_graph(&n, &args)?;
            let v = check_with(&n, &g, &f, check_options(&args))?;
            let mut text = format!("{}\n", if v.holds { "holds" } else { "fails" });
            if let Some(w) = &v.witness {
                for l in &w.steps {
                    text.push_str(&format!("  {}\n", l.describe(&n)));
                }
            }
            emit(out, session, args.format, verdict_json(&n, &v), text);
            Ok(if v.holds { EXIT_HOLDS } else { EXIT_FAILS })
        }
        Command::Synth { net: args, formula, ranges, jobs } => {
            let net = session.load_net(&args)?;
            if let Some(d) = net.validate().first() {
                return Err(input_error(d.to_string()));
            }
            let f = session.load_formula(&formula, &net.places)?;
            let params = net.parameters.clone();
            let mut p = SynthesisProblem::new(net, f, parse_box(&ranges)?);
            p.limits = limits(&args);
            p.options = check_options(&args);
            let r = synthesize_with_jobs(&p, jobs)?;
            let text = match args.format {
                Format::Csv => synthesis_csv(&params, &r),
                _ => synthesis_text(&r),
            };
            let code = if r.satisfying.is_empty() { EXIT_FAILS } else { EXIT_HOLDS };
            emit(out, session, args.format, serde_json::to_value(&r).expect("serializable"), text);
            Ok(code)
        }
        Command::Compose { net: args, observers, output } => {
            let mut net = session.load_net(&args)?;
            for o in &observers {
                let spec: ObserverSpec = o.parse()?;
                net = apply_observer(&net, &spec)?;
            }
            let text = serialize_net(&net);
            match output {
                Some(path) => fs::write(&path, &text)
                    .map_err(|e| input_error(format!("{}: {e}", path.display())))?,
                None => {
                    let _ = out.write_all(text.as_bytes());
                }
            }
            Ok(EXIT_HOLDS)
        }
    }
}

/// Runs the tool on `argv` (program name first), writing the report to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_HOLDS };
        }
    };
    let mut session = Session {
        argv: argv.iter().skip(1).cloned().collect(),
        inputs: BTreeMap::new(),
        started: Instant::now(),
    };
    match execute(cli, &mut session, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

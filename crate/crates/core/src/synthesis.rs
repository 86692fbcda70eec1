//! Parameter synthesis by exhaustive enumeration of a box of valuations.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::Valuation;
use crate::error::{Error, Result};
use crate::net::Net;
use crate::scalar::Scalar;
use crate::domain::ParamDomain;
use crate::statespace::{build, ExploreLimits};
use crate::tctl::{check_with, CheckOptions, Formula};

/// Inclusive integer range per parameter.
pub type ParamBox = BTreeMap<String, (u32, u32)>;

#[derive(Debug, Clone)]
pub struct SynthesisProblem {
    pub net: Net,
    pub formula: Formula,
    pub bounds: ParamBox,
    pub limits: ExploreLimits,
    pub options: CheckOptions,
}

impl SynthesisProblem {
    pub fn new(net: Net, formula: Formula, bounds: ParamBox) -> Self {
        SynthesisProblem {
            net,
            formula,
            bounds,
            limits: ExploreLimits::default(),
            options: CheckOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Projection {
    pub min: u32,
    pub max: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    /// Tight `[min, max]` per parameter over the satisfying set.
    pub projections: BTreeMap<String, Projection>,
    /// The satisfying set is exactly the box spanned by the projections.
    pub box_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub valuation: Valuation,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthesisResult {
    pub satisfying: Vec<Valuation>,
    pub explored: usize,
    pub summary: Summary,
    pub failures: Vec<Failure>,
}

fn check_box(params: &[String], bounds: &ParamBox) -> Result<()> {
    for p in params {
        match bounds.get(p) {
            None => return Err(Error::InvalidBox(format!("no range for parameter `{p}`"))),
            Some(&(lo, hi)) if lo > hi => {
                return Err(Error::InvalidBox(format!("empty range {lo}..{hi} for `{p}`")))
            }
            Some(_) => {}
        }
    }
    if let Some(extra) = bounds.keys().find(|k| !params.contains(k)) {
        return Err(Error::UnknownParameter(extra.clone()));
    }
    Ok(())
}

/// Integer points of the box that satisfy every constraint of `d`, in
/// lexicographic order of `params` (the first parameter varies slowest).
pub fn enumerate_valuations<S: Scalar>(
    params: &[String],
    d: &ParamDomain<S>,
    bounds: &ParamBox,
) -> Result<Vec<Valuation>> {
    check_box(params, bounds)?;
    let ranges: Vec<(u32, u32)> = params.iter().map(|p| bounds[p]).collect();
    let mut out = Vec::new();
    let mut point: Vec<u32> = ranges.iter().map(|r| r.0).collect();
    loop {
        let v: Valuation = params.iter().cloned().zip(point.iter().copied()).collect();
        if d.contains(&v)? {
            out.push(v);
        }
        // odometer increment, last parameter fastest
        let mut k = params.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if point[k] < ranges[k].1 {
                point[k] += 1;
                break;
            }
            point[k] = ranges[k].0;
        }
    }
}

/// Outcome of a single valuation: `Ok(holds)` or the error that stopped it.
pub fn check_valuation(p: &SynthesisProblem, v: &Valuation) -> Result<bool> {
    let concrete = p.net.instantiate(v)?;
    let graph = build(&concrete, &p.limits)?;
    let options = CheckOptions {
        max_horizon: p.limits.max_horizon,
        ..p.options
    };
    Ok(check_with(&concrete, &graph, &p.formula, options)?.holds)
}

/// Checks every enumerated valuation, using up to `jobs` worker threads
/// (`0` means one per core). The result does not depend on `jobs`.
pub fn synthesize_with_jobs(p: &SynthesisProblem, jobs: usize) -> Result<SynthesisResult> {
    let points = enumerate_valuations(&p.net.parameters, &p.net.domain, &p.bounds)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let outcomes: Vec<Result<bool>> =
        pool.install(|| points.par_iter().map(|v| check_valuation(p, v)).collect());
    let mut satisfying = Vec::new();
    let mut failures = Vec::new();
    for (v, r) in points.iter().zip(outcomes) {
        match r {
            Ok(true) => satisfying.push(v.clone()),
            Ok(false) => {}
            Err(e) => failures.push(Failure {
                valuation: v.clone(),
                error: e.to_string(),
            }),
        }
    }
    let summary = summarize(&satisfying, &p.net.parameters);
    Ok(SynthesisResult {
        satisfying,
        explored: points.len(),
        summary,
        failures,
    })
}

pub fn synthesize(p: &SynthesisProblem) -> Result<SynthesisResult> {
    synthesize_with_jobs(p, 0)
}

/// Per-parameter projections of a set of valuations.
pub fn summarize(satisfying: &[Valuation], params: &[String]) -> Summary {
    if satisfying.is_empty() {
        return Summary::default();
    }
    let mut projections = BTreeMap::new();
    for p in params {
        let values = satisfying.iter().filter_map(|v| v.get(p));
        let (min, max) = values.fold((u32::MAX, 0), |(a, b), x| (a.min(x), b.max(x)));
        if min <= max {
            projections.insert(p.clone(), Projection { min, max });
        }
    }
    let volume: u128 = projections
        .values()
        .map(|r| u128::from(r.max - r.min) + 1)
        .product();
    let mut distinct = satisfying.to_vec();
    distinct.sort();
    distinct.dedup();
    Summary {
        box_exact: distinct.len() as u128 == volume,
        projections,
    }
}

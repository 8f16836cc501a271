use std::collections::BTreeMap;

use lozenge_core::cumulants::{free_cumulants, monotone_k, MomentVector, MAX_K_DEGREE};
use lozenge_core::error::Error as CoreError;
use lozenge_core::hciz::verify_theorem2;
use lozenge_core::hurwitz::HurwitzTable;
use lozenge_core::numeric::{factorial, format_rational, rat, with_working_digits, HighFloat, Real, Scalar};
use lozenge_core::rmt::chi_square_p;
use lozenge_core::seed::{replicate_rng, replicate_seed};
use lozenge_core::tilings::{
    enumerate_patterns, laplace_l, laplace_l_char, sample_pattern, sampler_matches_enumeration, BeadArray,
    SampleMethod, SawtoothSpec, MAX_CHAR_RANK,
};
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Check, VerifyArgs};
use crate::{read_spec, write_json, CliError, CliResult, Outcome};

/// Fixed grid of small real vectors for the Laplace factorization check.
pub const KEY_PROP_GRID: [[f64; 8]; 5] = [
    [0.3, -0.2, 0.1, 0.45, -0.5, 0.25, -0.35, 0.05],
    [-0.05, 0.25, 0.0, -0.35, 0.15, 0.4, -0.45, 0.2],
    [0.5, -0.5, 0.2, -0.1, 0.35, -0.3, 0.0, 0.15],
    [0.01, -0.02, 0.03, -0.04, 0.05, -0.06, 0.07, -0.08],
    [-0.25, -0.15, 0.35, 0.2, -0.4, 0.45, -0.1, 0.3],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub label: String,
    pub status: Status,
    pub detail: Value,
}

impl Entry {
    fn new(label: impl Into<String>, pass: bool, detail: Value) -> Self {
        Entry {
            label: label.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail,
        }
    }

    fn skip(label: impl Into<String>, reason: impl Into<String>) -> Self {
        Entry {
            label: label.into(),
            status: Status::Skip,
            detail: json!({"skipped": format!("budget: {}", reason.into())}),
        }
    }
}

pub fn outcome(entries: &[Entry]) -> Outcome {
    if entries.iter().any(|e| e.status == Status::Fail) {
        Outcome::Fail
    } else if entries.iter().any(|e| e.status == Status::Skip) {
        Outcome::Skipped
    } else {
        Outcome::Pass
    }
}

/// Budget errors become skips; everything else propagates.
fn or_skip<T>(label: &str, r: lozenge_core::error::Result<T>) -> CliResult<std::result::Result<T, Entry>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(CoreError::Budget(msg)) => Ok(Err(Entry::skip(label, msg))),
        Err(e) => Err(e.into()),
    }
}

pub fn key_prop(spec: &SawtoothSpec, ks: &[usize], digits: u32, tol: f64) -> CliResult<Vec<Entry>> {
    if spec.n() > MAX_CHAR_RANK {
        return Ok(vec![Entry::skip(
            "key-prop",
            format!("rank {} exceeds {MAX_CHAR_RANK}", spec.n()),
        )]);
    }
    if let Err(skip) = or_skip("key-prop", enumerate_patterns(spec))? {
        return Ok(vec![skip]);
    }
    let mut entries = Vec::new();
    with_working_digits(digits, || -> CliResult<()> {
        for &k in ks {
            for (g, row) in KEY_PROP_GRID.iter().enumerate() {
                let a: Vec<HighFloat> = row[..k].iter().map(|&x| HighFloat::from_f64(x)).collect();
                let l = laplace_l(spec, k, &a)?;
                let c = laplace_l_char(spec, k, &a)?;
                let rel = ((l.clone() - c.clone()) / l.clone()).abs().as_f64();
                entries.push(Entry::new(
                    format!("k={k} a=grid[{g}]"),
                    rel < tol,
                    json!({"k": k, "a": &row[..k], "laplace_l": l.to_string(), "laplace_l_char": c.to_string(), "rel_error": rel}),
                ));
            }
        }
        Ok(())
    })?;
    Ok(entries)
}

pub fn theorem2(n: u32, d: u32, g_max: u32, tol: f64, table: &HurwitzTable) -> CliResult<Vec<Entry>> {
    let report = match or_skip("theorem2", verify_theorem2(n, d, g_max, table))? {
        Ok(r) => r,
        Err(skip) => return Ok(vec![skip]),
    };
    Ok(report
        .pairs
        .iter()
        .map(|p| {
            let last = p.abs_errors[g_max as usize];
            Entry::new(
                format!("alpha={} beta={}", p.alpha, p.beta),
                last < tol && p.improves,
                json!({
                    "exact": p.exact,
                    "exact_f64": p.exact_f64,
                    "counts_by_genus": p.counts,
                    "abs_error_by_genus": p.abs_errors,
                    "rel_error": p.rel_error,
                    "decreasing": p.improves,
                }),
            )
        })
        .collect())
}

pub fn random_moments(rng: &mut impl Rng, len: usize) -> Vec<BigRational> {
    (0..len)
        .map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=7)))
        .collect()
}

pub fn cumulant_identity(d: u32, vectors: usize, seed: u64) -> CliResult<Vec<Entry>> {
    if d > MAX_K_DEGREE {
        return Ok(vec![Entry::skip("cumulant-identity", format!("d = {d} exceeds {MAX_K_DEGREE}"))]);
    }
    let table = HurwitzTable::new(d, d)?;
    let mut rng = replicate_rng(seed, 0);
    let mut entries = Vec::new();
    for i in 0..vectors {
        let psi = MomentVector::new(random_moments(&mut rng, d as usize))?;
        let kappa = free_cumulants(&psi)?;
        for j in 1..=d {
            let k = monotone_k(j, &psi, &table)?;
            let expected = BigRational::from_integer(factorial(j - 1).into()) * &kappa[j as usize - 1];
            entries.push(Entry::new(
                format!("vector {i} d={j}"),
                k == expected,
                json!({
                    "psi": psi.as_slice().iter().map(format_rational).collect::<Vec<_>>(),
                    "monotone_k": format_rational(&k),
                    "factorial_times_kappa": format_rational(&expected),
                }),
            ));
        }
    }
    Ok(entries)
}

/// Spec used for the chi-square uniformity check.
pub fn chi_square_spec() -> SawtoothSpec {
    SawtoothSpec::new(vec![5, 3, 2, 0]).expect("valid spec")
}

pub fn chi_square_uniformity(spec: &SawtoothSpec, draws: usize, seed: u64) -> CliResult<(f64, usize)> {
    let all = enumerate_patterns(spec)?;
    let index: BTreeMap<&BeadArray, usize> = all.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let samples: Vec<BeadArray> = (0..draws as u64)
        .into_par_iter()
        .map(|i| sample_pattern(spec, replicate_seed(seed, i), SampleMethod::Exact))
        .collect::<lozenge_core::error::Result<_>>()?;
    let mut counts = vec![0u64; all.len()];
    for p in &samples {
        counts[index[p]] += 1;
    }
    Ok((chi_square_p(&counts, &vec![1.0 / all.len() as f64; all.len()]), all.len()))
}

pub fn sampler_exactness(max_n: usize, specs: usize, draws: usize, seed: u64) -> CliResult<Vec<Entry>> {
    let mut rng = replicate_rng(seed, 0);
    let mut entries = Vec::new();
    for _ in 0..specs {
        let spec = SawtoothSpec::random(&mut rng, max_n, 3);
        let label = format!("conditionals top={:?}", spec.top());
        match or_skip(&label, sampler_matches_enumeration(&spec))? {
            Ok(ok) => entries.push(Entry::new(label, ok, json!({"top": spec.top(), "comparison": "exact rational"}))),
            Err(skip) => entries.push(skip),
        }
    }
    if draws > 0 {
        let spec = chi_square_spec();
        let (p, cells) = chi_square_uniformity(&spec, draws, seed)?;
        entries.push(Entry::new(
            format!("chi-square top={:?}", spec.top()),
            p > 0.001,
            json!({"draws": draws, "cells": cells, "p_value": p, "threshold": 0.001}),
        ));
    }
    Ok(entries)
}

pub fn run(args: &VerifyArgs) -> CliResult<Outcome> {
    let (config, entries) = match args.which {
        Check::KeyProp => {
            let spec = match (&args.spec, args.n) {
                (Some(path), _) => read_spec(path)?,
                (None, n) => SawtoothSpec::arithmetic(n.unwrap_or(4), 2)?,
            };
            let ks: Vec<usize> = match args.k {
                Some(k) if k == 0 || k > spec.n() => {
                    return Err(CliError::Usage(format!("--k must lie in 1..={}", spec.n())))
                }
                Some(k) => vec![k],
                None => (1..=spec.n()).collect(),
            };
            let tol = args.tolerance.unwrap_or(1e-9);
            let config = json!({
                "spec": spec, "k": ks, "grid": KEY_PROP_GRID, "tolerance": tol,
                "tolerance_kind": "relative", "precision_digits": args.precision,
            });
            (config, key_prop(&spec, &ks, args.precision, tol)?)
        }
        Check::Theorem2 => {
            let n = args.n.unwrap_or(10) as u32;
            let d = args.d.unwrap_or(3);
            let tol = args.tolerance.unwrap_or(1e-6);
            let r_max = 2 * args.g_max + 2 * d.max(1) - 2;
            let table = HurwitzTable::new(d.max(1), r_max)?;
            if let Some(cache) = args.cache.as_deref().filter(|c| c.exists()) {
                table.load(cache)?;
            }
            let config = json!({
                "N": n, "d": d, "g_max": args.g_max, "tolerance": tol,
                "tolerance_kind": "absolute", "precision": "exact rationals, errors reported as binary64",
                "cache": args.cache,
            });
            let entries = theorem2(n, d, args.g_max, tol, &table)?;
            if let Some(cache) = &args.cache {
                table.save(cache)?;
            }
            (config, entries)
        }
        Check::CumulantIdentity => {
            let d = args.d.unwrap_or(5);
            let vectors = args.samples.unwrap_or(20);
            let config = json!({"d_max": d, "vectors": vectors, "seed": args.seed, "precision": "exact rationals"});
            (config, cumulant_identity(d, vectors, args.seed)?)
        }
        Check::SamplerExactness => {
            let max_n = args.n.unwrap_or(5);
            let draws = args.samples.unwrap_or(100_000);
            let config = json!({
                "max_N": max_n, "specs": 20, "chi_square_draws": draws, "seed": args.seed,
                "precision": "exact rationals",
            });
            (config, sampler_exactness(max_n, 20, draws, args.seed)?)
        }
    };
    let outcome = outcome(&entries);
    let count = |s: Status| entries.iter().filter(|e| e.status == s).count();
    let mut config = config;
    config["command"] = json!("verify");
    config["check"] = serde_json::to_value(args.which).expect("check serializes");
    config["version"] = json!(env!("CARGO_PKG_VERSION"));
    let doc = json!({
        "config": config,
        "summary": {"passed": count(Status::Pass), "failed": count(Status::Fail), "skipped": count(Status::Skip)},
        "pass": outcome == Outcome::Pass,
        "entries": entries,
    });
    write_json(args.out.as_deref(), &doc)?;
    Ok(outcome)
}

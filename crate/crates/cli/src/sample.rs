use std::path::{Path, PathBuf};

use lozenge_core::seed::replicate_seed;
use lozenge_core::tilings::{sample_pattern, BeadArray, SampleMethod, SawtoothSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Method, SampleArgs};
use crate::{read_spec, render, write_output, CliError, CliResult, Outcome};

/// Glauber proposals per replicate when none are given: `10 N^3`.
pub fn default_glauber_steps(n: usize) -> u64 {
    10u64.saturating_mul((n as u64).saturating_pow(3))
}

pub fn resolve_method(method: Method, steps: Option<u64>, n: usize) -> SampleMethod {
    match method {
        Method::Exact => SampleMethod::Exact,
        Method::Glauber => SampleMethod::Glauber {
            steps: steps.unwrap_or_else(|| default_glauber_steps(n)),
        },
    }
}

pub fn method_json(method: SampleMethod) -> Value {
    match method {
        SampleMethod::Exact => json!({"name": "exact"}),
        SampleMethod::Glauber { steps } => json!({"name": "glauber", "steps": steps}),
    }
}

/// `count` patterns; replicate `i` is `sample_pattern(spec, replicate_seed(seed, i))`.
pub fn draw_patterns(spec: &SawtoothSpec, count: usize, seed: u64, method: SampleMethod) -> CliResult<Vec<(u64, BeadArray)>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = replicate_seed(seed, i);
            Ok((s, sample_pattern(spec, s, method)?))
        })
        .collect()
}

pub fn csv_header(n: usize) -> Vec<String> {
    let mut header = vec!["seed".to_string()];
    for k in 1..=n {
        for i in 1..=k {
            header.push(format!("row{k}_{i}"));
        }
    }
    header
}

/// The batch as CSV, preceded by a `# config:` comment line.
pub fn to_csv(config: &Value, n: usize, samples: &[(u64, BeadArray)]) -> CliResult<Vec<u8>> {
    let mut buf = format!("# config: {config}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(csv_header(n))?;
        for (seed, p) in samples {
            let mut record = vec![seed.to_string()];
            record.extend(p.flattened().iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

fn svg_path(out: &Path, index: usize) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sample");
    out.with_file_name(format!("{stem}_{index}.svg"))
}

pub fn run(args: &SampleArgs) -> CliResult<Outcome> {
    let spec = read_spec(&args.spec)?;
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if args.render && args.out.is_none() {
        return Err(CliError::Usage("--render needs --out to place the SVG files".into()));
    }
    let method = resolve_method(args.method, args.glauber_steps, spec.n());
    let config = json!({
        "command": "sample",
        "version": env!("CARGO_PKG_VERSION"),
        "spec": spec,
        "samples": args.samples,
        "seed": args.seed,
        "seeding": "row seed = first u64 of ChaCha8 stream i keyed by --seed",
        "method": method_json(method),
        "render": args.render,
    });
    let samples = draw_patterns(&spec, args.samples, args.seed, method)?;
    write_output(args.out.as_deref(), &to_csv(&config, spec.n(), &samples)?)?;
    if let Some(out) = args.out.as_deref().filter(|_| args.render) {
        for (i, (seed, p)) in samples.iter().enumerate() {
            let cfg = json!({"command": "sample", "spec": spec, "seed": seed, "method": method_json(method)});
            std::fs::write(svg_path(out, i), render::svg(p, &cfg))?;
        }
    }
    Ok(Outcome::Pass)
}

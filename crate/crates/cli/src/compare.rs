use lozenge_core::rmt::{compare_samples, gue_eigenvalue_samples, mean_and_se, ComparisonReport};
use lozenge_core::seed::replicate_seed;
use lozenge_core::tilings::{rescale_thread_with, BeadArray, MomentEstimate, Normalizer, SawtoothSpec};
use serde::Serialize;
use serde_json::json;

use crate::args::GueCompareArgs;
use crate::sample::{draw_patterns, method_json, resolve_method};
use crate::{read_spec, write_json, CliError, CliResult, Outcome};

/// Stream index reserved for the GUE reference sample.
pub const GUE_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedComparison {
    pub normalizer: &'static str,
    /// Empirical mean and variance of each rescaled coordinate.
    pub coordinate_mean: Vec<f64>,
    pub coordinate_variance: Vec<f64>,
    pub report: ComparisonReport,
}

pub fn normalizer_name(n: Normalizer) -> &'static str {
    match n {
        Normalizer::SquareRoot => "square-root",
        Normalizer::Linear => "linear",
    }
}

pub fn rescaled_threads(
    patterns: &[BeadArray],
    k: usize,
    m: &MomentEstimate,
    normalizer: Normalizer,
) -> CliResult<Vec<Vec<f64>>> {
    patterns
        .iter()
        .map(|p| Ok(rescale_thread_with(p.row(k), p.n(), m, normalizer)?))
        .collect()
}

pub fn compare_normalized(a: &[Vec<f64>], gue: &[Vec<f64>], normalizer: Normalizer) -> CliResult<NormalizedComparison> {
    let k = a[0].len();
    let mut coordinate_mean = Vec::with_capacity(k);
    let mut coordinate_variance = Vec::with_capacity(k);
    for l in 0..k {
        let xs: Vec<f64> = a.iter().map(|v| v[l]).collect();
        let (mean, se) = mean_and_se(&xs);
        coordinate_mean.push(mean);
        coordinate_variance.push(se * se * xs.len() as f64);
    }
    Ok(NormalizedComparison {
        normalizer: normalizer_name(normalizer),
        coordinate_mean,
        coordinate_variance,
        report: compare_samples(a, gue)?,
    })
}

/// Both normalizer readings against one GUE sample of the same size.
pub fn gue_compare(
    spec: &SawtoothSpec,
    patterns: &[BeadArray],
    k: usize,
    seed: u64,
) -> CliResult<(NormalizedComparison, NormalizedComparison)> {
    let m = spec.moments();
    let gue = gue_eigenvalue_samples(k, patterns.len(), replicate_seed(seed, GUE_STREAM))?;
    let root = compare_normalized(&rescaled_threads(patterns, k, &m, Normalizer::SquareRoot)?, &gue, Normalizer::SquareRoot)?;
    let linear = compare_normalized(&rescaled_threads(patterns, k, &m, Normalizer::Linear)?, &gue, Normalizer::Linear)?;
    Ok((root, linear))
}

pub fn run(args: &GueCompareArgs) -> CliResult<Outcome> {
    let spec = read_spec(&args.spec)?;
    if args.k == 0 || args.k > spec.n() {
        return Err(CliError::Usage(format!("--k must lie in 1..={}", spec.n())));
    }
    if args.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let method = resolve_method(args.method, args.glauber_steps, spec.n());
    let m = spec.moments();
    let config = json!({
        "command": "gue-compare",
        "version": env!("CARGO_PKG_VERSION"),
        "spec": spec,
        "k": args.k,
        "samples": args.samples,
        "seed": args.seed,
        "method": method_json(method),
        "moments": {"psi1": m.psi1, "psi2": m.psi2, "psi2_minus_psi1_sq_minus_twelfth": m.variance_parameter()},
        "rescaling": "(b / sqrt(N) - (psi1 - 1/2) sqrt(N)) / s, s = sqrt(v) or v",
        "precision": "binary64",
    });
    let patterns: Vec<BeadArray> = draw_patterns(&spec, args.samples, args.seed, method)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let (root, linear) = gue_compare(&spec, &patterns, args.k, args.seed)?;
    let doc = json!({
        "config": config,
        "gue_reference": {"E_p1": 0.0, "E_p2": (args.k * args.k) as f64},
        "square_root": root,
        "linear": linear,
    });
    write_json(args.out.as_deref(), &doc)?;
    Ok(Outcome::Pass)
}

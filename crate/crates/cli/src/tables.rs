use lozenge_core::combinat::partitions_of;
use lozenge_core::hciz::extract_coeffs;
use lozenge_core::hurwitz::{genus, HurwitzTable, WalkQuery};
use serde_json::json;

use crate::args::{CoeffsArgs, HurwitzArgs};
use crate::{write_json, CliResult, Outcome};

/// Fills `table` with every monotone and classical count of degree `<= d_max`
/// and at most `r_max` steps that has a genus.
pub fn fill_hurwitz(table: &HurwitzTable, d_max: u32, r_max: u32) -> CliResult<usize> {
    let mut filled = 0;
    for d in 1..=d_max {
        let parts = partitions_of(d)?;
        for alpha in &parts {
            for beta in &parts {
                for r in 0..=r_max {
                    if genus(r, alpha, beta)?.is_none() {
                        continue;
                    }
                    for monotone in [true, false] {
                        table.get_or_compute(&WalkQuery::new(r, alpha.clone(), beta.clone(), monotone)?)?;
                        filled += 1;
                    }
                }
            }
        }
    }
    Ok(filled)
}

pub fn run_hurwitz(args: &HurwitzArgs) -> CliResult<Outcome> {
    let table = HurwitzTable::new(args.d, args.r)?;
    if let Some(cache) = args.cache.as_deref().filter(|c| c.exists()) {
        table.load(cache)?;
    }
    let filled = fill_hurwitz(&table, args.d, args.r)?;
    if let Some(cache) = &args.cache {
        table.save(cache)?;
    }
    let doc = json!({
        "config": {
            "command": "hurwitz",
            "version": env!("CARGO_PKG_VERSION"),
            "d_max": args.d,
            "r_max": args.r,
            "cache": args.cache,
            "key": "d/r/alpha/beta/monotone",
            "precision": "exact integers",
        },
        "entries": filled,
        "counts": table.to_json(),
    });
    write_json(args.out.as_deref(), &doc)?;
    Ok(Outcome::Pass)
}

pub fn run_coeffs(args: &CoeffsArgs) -> CliResult<Outcome> {
    let table = extract_coeffs(args.n, args.d)?;
    let doc = json!({
        "config": {
            "command": "coeffs",
            "version": env!("CARGO_PKG_VERSION"),
            "N": args.n,
            "d": args.d,
            "precision": "exact rationals",
        },
        "coefficients": table.to_json(),
    });
    write_json(args.out.as_deref(), &doc)?;
    Ok(Outcome::Pass)
}

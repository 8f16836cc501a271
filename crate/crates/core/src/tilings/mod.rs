//! Lozenge tilings of sawtooth domains, encoded as interlacing bead arrays
//! (Gelfand-Tsetlin patterns with strictly decreasing rows).
//!
//! Row `k` of a [`BeadArray`] lists the positions of the `k` vertical tiles
//! threaded by the horizontal line at height `k`. Adjacent rows satisfy
//! `x_{k+1,i} > x_{k,i} >= x_{k+1,i+1}`.

mod geometry;
mod sampler;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::hciz::orbital_laplace;
use crate::numeric::Real;

pub use geometry::{domain_triangles, pattern_to_lozenges, to_cartesian, window, Tile, TileKind, Triangle};
pub use sampler::{
    conditional_row_distribution, glauber_initial, glauber_run, sample_pattern, sample_pattern_with,
    Arithmetic, RowSampler, SampleMethod, EXACT_RATIONAL_MAX_N, EXACT_SAMPLER_MAX_N, GLAUBER_MAX_N,
};

pub const MAX_COUNT_RANK: usize = 300;
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// Rank `N` and the strictly decreasing top row `b_1 > ... > b_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct SawtoothSpec {
    top: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    #[serde(rename = "N")]
    n: usize,
    top: Vec<i64>,
}

impl TryFrom<SpecJson> for SawtoothSpec {
    type Error = Error;
    fn try_from(v: SpecJson) -> Result<Self> {
        if v.n != v.top.len() {
            return Err(argument(format!("N = {} but top has {} entries", v.n, v.top.len())));
        }
        SawtoothSpec::new(v.top)
    }
}

impl From<SawtoothSpec> for SpecJson {
    fn from(s: SawtoothSpec) -> Self {
        SpecJson {
            n: s.top.len(),
            top: s.top,
        }
    }
}

impl SawtoothSpec {
    pub fn new(top: Vec<i64>) -> Result<Self> {
        if top.is_empty() {
            return Err(argument("a sawtooth domain has rank at least 1"));
        }
        if !is_strictly_decreasing(&top) {
            return Err(argument(format!("top row {top:?} is not strictly decreasing")));
        }
        Ok(SawtoothSpec { top })
    }

    /// `b_i = step * (N - i)`, e.g. `step = 2` gives `2N-2, ..., 2, 0`.
    pub fn arithmetic(n: usize, step: i64) -> Result<Self> {
        SawtoothSpec::new((1..=n as i64).map(|i| step * (n as i64 - i)).collect())
    }

    /// A random spec: `N` uniform in `1..=max_n`, first entry in `-3..=3`,
    /// gaps uniform in `1..=max_gap`.
    pub fn random(rng: &mut impl Rng, max_n: usize, max_gap: i64) -> Self {
        let n = rng.random_range(1..=max_n.max(1));
        let mut top = vec![rng.random_range(-3..=3)];
        for _ in 1..n {
            let last = *top.last().expect("nonempty");
            top.push(last - rng.random_range(1..=max_gap.max(1)));
        }
        SawtoothSpec { top }
    }

    pub fn n(&self) -> usize {
        self.top.len()
    }

    pub fn top(&self) -> &[i64] {
        &self.top
    }

    pub fn shifted(&self, t: i64) -> Self {
        SawtoothSpec {
            top: self.top.iter().map(|b| b + t).collect(),
        }
    }

    pub fn moments(&self) -> MomentEstimate {
        MomentEstimate::from_spec(self)
    }
}

pub(crate) fn is_strictly_decreasing(x: &[i64]) -> bool {
    x.windows(2).all(|w| w[0] > w[1])
}

/// `true` when `lower` (length `k`) interlaces `upper` (length `k + 1`).
pub fn interlaces(upper: &[i64], lower: &[i64]) -> bool {
    upper.len() == lower.len() + 1
        && lower
            .iter()
            .enumerate()
            .all(|(i, &y)| upper[i] > y && y >= upper[i + 1])
}

/// Rows `1..=N` of an interlacing triangular array; `rows()[k - 1]` is row `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct BeadArray {
    rows: Vec<Vec<i64>>,
}

impl TryFrom<Vec<Vec<i64>>> for BeadArray {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        BeadArray::new(rows)
    }
}

impl From<BeadArray> for Vec<Vec<i64>> {
    fn from(b: BeadArray) -> Self {
        b.rows
    }
}

impl BeadArray {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(argument("a bead array has at least one row"));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(argument(format!("row {} has {} beads", k + 1, row.len())));
            }
            if !is_strictly_decreasing(row) {
                return Err(argument(format!("row {} is not strictly decreasing", k + 1)));
            }
        }
        for k in 1..rows.len() {
            if !interlaces(&rows[k], &rows[k - 1]) {
                return Err(argument(format!("rows {} and {} do not interlace", k, k + 1)));
            }
        }
        Ok(BeadArray { rows })
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<i64>>) -> Self {
        debug_assert!(BeadArray::new(rows.clone()).is_ok());
        BeadArray { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Row `k`, 1-indexed.
    pub fn row(&self, k: usize) -> &[i64] {
        &self.rows[k - 1]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn top(&self) -> &[i64] {
        self.rows.last().expect("nonempty")
    }

    pub fn spec(&self) -> SawtoothSpec {
        SawtoothSpec {
            top: self.top().to_vec(),
        }
    }

    /// Rows `1..=N` concatenated.
    pub fn flattened(&self) -> Vec<i64> {
        self.rows.iter().flatten().copied().collect()
    }

    /// Inverse of [`flattened`](Self::flattened).
    pub fn from_flattened(values: &[i64]) -> Result<Self> {
        let mut rows = Vec::new();
        let mut rest = values;
        let mut k = 1;
        while !rest.is_empty() {
            if rest.len() < k {
                return Err(argument("flattened bead array has a ragged last row"));
            }
            rows.push(rest[..k].to_vec());
            rest = &rest[k..];
            k += 1;
        }
        BeadArray::new(rows)
    }
}

/// Empirical moments of the measure placing mass `1/N` at each `b_i / N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub psi1: f64,
    pub psi2: f64,
}

impl MomentEstimate {
    pub fn from_spec(spec: &SawtoothSpec) -> Self {
        let n = spec.n() as f64;
        let psi1 = spec.top.iter().map(|&b| b as f64 / n).sum::<f64>() / n;
        let psi2 = spec.top.iter().map(|&b| (b as f64 / n).powi(2)).sum::<f64>() / n;
        MomentEstimate { psi1, psi2 }
    }

    /// `psi2 - psi1^2 - 1/12`.
    pub fn variance_parameter(&self) -> f64 {
        self.psi2 - self.psi1 * self.psi1 - 1.0 / 12.0
    }
}

/// Number of bead arrays with top row `spec.top`:
/// `prod_{i<j} (b_i - b_j) / (j - i)`.
pub fn count_patterns(spec: &SawtoothSpec) -> Result<BigUint> {
    let n = spec.n();
    if n > MAX_COUNT_RANK {
        return Err(argument(format!("rank {n} exceeds {MAX_COUNT_RANK}")));
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= BigUint::from((spec.top[i] - spec.top[j]) as u64);
            den *= BigUint::from((j - i) as u64);
        }
    }
    Ok(num / den)
}

fn enumerate_below(rows: &mut Vec<Vec<i64>>, out: &mut Vec<BeadArray>) {
    let upper = rows.last().expect("nonempty").clone();
    if upper.len() == 1 {
        let mut full = rows.clone();
        full.reverse();
        out.push(BeadArray::from_rows_unchecked(full));
        return;
    }
    let m = upper.len() - 1;
    let mut y: Vec<i64> = (0..m).map(|i| upper[i + 1]).collect();
    loop {
        rows.push(y.clone());
        enumerate_below(rows, out);
        rows.pop();
        // odometer over the disjoint ranges [upper[i+1], upper[i] - 1]
        let mut i = m;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if y[i] < upper[i] - 1 {
                y[i] += 1;
                break;
            }
            y[i] = upper[i + 1];
        }
    }
}

/// Every bead array with the given top row, exactly once.
pub fn enumerate_patterns(spec: &SawtoothSpec) -> Result<Vec<BeadArray>> {
    enumerate_patterns_limited(spec, ENUMERATION_LIMIT)
}

pub fn enumerate_patterns_limited(spec: &SawtoothSpec, limit: u64) -> Result<Vec<BeadArray>> {
    let count = count_patterns(spec)?;
    if count > BigUint::from(limit) {
        return Err(Error::Budget(format!(
            "{count} patterns exceed the enumeration limit {limit}"
        )));
    }
    let mut out = Vec::new();
    enumerate_below(&mut vec![spec.top.clone()], &mut out);
    Ok(out)
}

fn row_to_real<T: Real>(a: &[f64]) -> Vec<T> {
    a.iter().map(|&x| T::from_f64(x)).collect()
}

fn check_k(spec: &SawtoothSpec, k: usize, a_len: usize) -> Result<()> {
    if k == 0 || k > spec.n() {
        return Err(argument(format!("thread {k} outside 1..={}", spec.n())));
    }
    if a_len != k {
        return Err(argument(format!("thread {k} needs {k} arguments, got {a_len}")));
    }
    Ok(())
}

/// `L_k^(N)(a)`: the average over all tilings of the HCIZ transform of row `k`.
pub fn laplace_l<T: Real>(spec: &SawtoothSpec, k: usize, a: &[T]) -> Result<T> {
    check_k(spec, k, a.len())?;
    let patterns = enumerate_patterns(spec)?;
    let total = patterns.len();
    let mut by_row: BTreeMap<&[i64], usize> = BTreeMap::new();
    for p in &patterns {
        *by_row.entry(p.row(k)).or_default() += 1;
    }
    let mut sum = T::zero();
    for (row, count) in by_row {
        sum = sum + T::from_i64(count as i64) * orbital_laplace(a, row)?;
    }
    Ok(sum / T::from_i64(total as i64))
}

/// Convenience wrapper taking `f64` arguments.
pub fn laplace_l_f64<T: Real>(spec: &SawtoothSpec, k: usize, a: &[f64]) -> Result<T> {
    laplace_l(spec, k, &row_to_real::<T>(a))
}

pub const MAX_CHAR_RANK: usize = 8;

/// `(prod_i a_i/(e^{a_i} - 1))^{N-k} L_N^(N)(a_1, .., a_k, 0, .., 0)`.
pub fn laplace_l_char<T: Real>(spec: &SawtoothSpec, k: usize, a: &[T]) -> Result<T> {
    check_k(spec, k, a.len())?;
    if spec.n() > MAX_CHAR_RANK {
        return Err(argument(format!("rank {} exceeds {MAX_CHAR_RANK}", spec.n())));
    }
    let mut factor = T::one();
    for x in a {
        if !x.is_zero() {
            factor = factor * x.clone() / (x.exp() - T::one());
        }
    }
    let mut power = T::one();
    for _ in k..spec.n() {
        power = power * factor.clone();
    }
    let mut padded = a.to_vec();
    padded.resize(spec.n(), T::zero());
    Ok(power * orbital_laplace(&padded, &spec.top)?)
}

/// Which denominator to use when rescaling beads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalizer {
    /// `sqrt(psi2 - psi1^2 - 1/12)`.
    SquareRoot,
    /// `psi2 - psi1^2 - 1/12` with no square root.
    Linear,
}

/// `(b / sqrt(N) - (psi1 - 1/2) sqrt(N)) / s` for each bead `b` in `row`.
pub fn rescale_thread(row: &[i64], n: usize, m: &MomentEstimate) -> Result<Vec<f64>> {
    rescale_thread_with(row, n, m, Normalizer::SquareRoot)
}

pub fn rescale_thread_with(row: &[i64], n: usize, m: &MomentEstimate, normalizer: Normalizer) -> Result<Vec<f64>> {
    let v = m.variance_parameter();
    if !(v > 0.0) {
        return Err(argument(format!("psi2 - psi1^2 - 1/12 = {v} is not positive")));
    }
    let s = match normalizer {
        Normalizer::SquareRoot => v.sqrt(),
        Normalizer::Linear => v,
    };
    let root = (n as f64).sqrt();
    let shift = (m.psi1 - 0.5) * root;
    Ok(row.iter().map(|&b| (b as f64 / root - shift) / s).collect())
}

/// Exact rational `P(row k = y)` for each reachable `y`, from enumeration.
pub fn row_distribution_by_enumeration(spec: &SawtoothSpec, k: usize) -> Result<BTreeMap<Vec<i64>, BigRational>> {
    let patterns = enumerate_patterns(spec)?;
    let total = BigInt::from(patterns.len());
    let mut counts: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for p in &patterns {
        *counts.entry(p.row(k).to_vec()).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(row, c)| (row, BigRational::new(BigInt::from(c), total.clone())))
        .collect())
}

/// Law of the row below, keyed by the row above.
pub type RowConditionals = BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, BigRational>>;

/// For every row `x` (length >= 2) occurring in some pattern, the law of the
/// row below it given `x`, from enumeration.
pub fn row_conditionals_by_enumeration(spec: &SawtoothSpec) -> Result<RowConditionals> {
    let patterns = enumerate_patterns(spec)?;
    let mut pairs: BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, u64>> = BTreeMap::new();
    for p in &patterns {
        for k in 2..=p.n() {
            *pairs
                .entry(p.row(k).to_vec())
                .or_default()
                .entry(p.row(k - 1).to_vec())
                .or_default() += 1;
        }
    }
    Ok(pairs
        .into_iter()
        .map(|(x, below)| {
            let total: u64 = below.values().sum();
            let law = below
                .into_iter()
                .map(|(y, c)| (y, BigRational::new(BigInt::from(c), BigInt::from(total))))
                .collect();
            (x, law)
        })
        .collect())
}

/// Whether the sequential sampler's conditional law of every row equals the
/// enumeration-derived one, exactly.
pub fn sampler_matches_enumeration(spec: &SawtoothSpec) -> Result<bool> {
    for (x, law) in row_conditionals_by_enumeration(spec)? {
        let sampler: BTreeMap<Vec<i64>, BigRational> = conditional_row_distribution(&x)?.into_iter().collect();
        if sampler != law {
            return Ok(false);
        }
    }
    Ok(true)
}

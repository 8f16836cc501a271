//! Exact uniform sampling of bead arrays row by row, and Glauber dynamics.
//!
//! Given row `x` of length `n`, the next row `y` (length `m = n - 1`) of a
//! uniform pattern has law `P(y) = V(y) / Z` with `V` the Vandermonde product,
//! since `V(y)` is proportional to the number of patterns below `y`. The
//! candidate ranges `R_i = [x_{i+1}, x_i - 1]` are disjoint, so summing the
//! determinant `det[phi_j(y_i)]` over later coordinates replaces each of their
//! rows by the range sum `S_l = sum_{v in R_l} phi(v)`. With `A` the matrix
//! whose rows are the fixed `phi(y_l)` followed by the remaining `S_l`,
//! `P(y_i = v | y_0..y_{i-1}) = phi(v) . c`, where `c` is column `i` of
//! `A^{-1}`. After drawing `v`, row `i` becomes `phi(v)` and `A^{-1}` is
//! updated by Sherman-Morrison.
//!
//! For large rows the determinants lose too many digits in floating point.
//! There the row is drawn as the floor of continuous corner eigenvalues: with
//! `t` of density proportional to `V(t)` on `x_{i+1} <= t_i <= x_i`, the
//! integral of `V` over the unit cube at `y` is exactly `V(y)`, so `floor(t)`
//! has law `V(y) / Z`. The continuous `t` are the roots of
//! `sum_i w_i / (s - x_i)` with `w` uniform on the simplex, and `floor(t_i)`
//! is the largest integer of `R_i` where that sum is nonnegative.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore};
use rand_distr::Exp1;
use rand_chacha::ChaCha8Rng;

use super::{is_strictly_decreasing, BeadArray, SawtoothSpec};
use crate::error::{argument, Error, Result};
use crate::numeric::Scalar;
use crate::seed::rng_from_seed;

/// Largest rank for the determinantal sampler.
pub const EXACT_SAMPLER_MAX_N: usize = 120;
/// Ranks up to this use rational determinants under [`Arithmetic::Auto`].
pub const EXACT_RATIONAL_MAX_N: usize = 12;
pub const GLAUBER_MAX_N: usize = 500;

const PRODUCT_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMethod {
    Exact,
    Glauber { steps: u64 },
}

/// Row kernel used by the exact sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Arithmetic {
    /// Rational determinants up to [`EXACT_RATIONAL_MAX_N`], the floating
    /// point secular kernel above.
    #[default]
    Auto,
    /// Rational determinants with exact draws.
    Rational,
    /// Floors of secular-equation roots under `f64` Dirichlet weights.
    Float,
}

fn invert<T: Scalar>(mut a: Vec<Vec<T>>) -> Result<Vec<Vec<T>>> {
    let n = a.len();
    let mut inv: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = if T::EXACT {
            (col..n).find(|&r| !a[r][col].is_zero())
        } else {
            (col..n).max_by(|&x, &y| a[x][col].as_f64().abs().total_cmp(&a[y][col].as_f64().abs()))
        };
        let p = match pivot {
            Some(p) if !a[p][col].is_zero() => p,
            _ => return Err(Error::Numeric(format!("singular range-sum matrix at column {col}"))),
        };
        a.swap(p, col);
        inv.swap(p, col);
        let piv = T::one() / a[col][col].clone();
        for c in 0..n {
            a[col][c] = a[col][c].clone() * piv.clone();
            inv[col][c] = inv[col][c].clone() * piv.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                a[r][c] = a[r][c].clone() - f.clone() * a[col][c].clone();
                inv[r][c] = inv[r][c].clone() - f.clone() * inv[col][c].clone();
            }
        }
    }
    Ok(inv)
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Sequential sampler for the row below `x`.
#[derive(Clone, Debug)]
pub struct RowSampler<T> {
    x: Vec<i64>,
    nodes: Vec<T>,
    rows: Vec<Vec<T>>,
    inverse: Vec<Vec<T>>,
    fixed: Vec<i64>,
}

impl<T: Scalar> RowSampler<T> {
    pub fn new(x: &[i64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(argument("a row below exists only for rows of length >= 2"));
        }
        if !is_strictly_decreasing(x) {
            return Err(argument(format!("row {x:?} is not strictly decreasing")));
        }
        let m = x.len() - 1;
        // Newton basis prod_{l<j} (v - t_l) anchored at range midpoints
        let nodes = (0..m.saturating_sub(1))
            .map(|l| T::from_rational(&BigRational::new(BigInt::from(x[l] - 1 + x[l + 1]), BigInt::from(2))))
            .collect();
        let mut sampler = RowSampler {
            x: x.to_vec(),
            nodes,
            rows: Vec::with_capacity(m),
            inverse: Vec::new(),
            fixed: Vec::with_capacity(m),
        };
        for i in 0..m {
            let mut sum = vec![T::zero(); m];
            for v in sampler.range(i) {
                for (s, p) in sum.iter_mut().zip(sampler.basis(v)) {
                    *s = s.clone() + p;
                }
            }
            sampler.rows.push(sum);
        }
        sampler.inverse = invert(sampler.rows.clone())?;
        Ok(sampler)
    }

    fn basis(&self, v: i64) -> Vec<T> {
        let m = self.x.len() - 1;
        let vt = T::from_i64(v);
        let mut out = Vec::with_capacity(m);
        out.push(T::one());
        for j in 1..m {
            let next = out[j - 1].clone() * (vt.clone() - self.nodes[j - 1].clone());
            out.push(next);
        }
        out
    }

    fn range(&self, i: usize) -> std::ops::RangeInclusive<i64> {
        self.x[i + 1]..=self.x[i] - 1
    }

    /// Index of the coordinate to be drawn next.
    pub fn position(&self) -> usize {
        self.fixed.len()
    }

    pub fn is_complete(&self) -> bool {
        self.fixed.len() == self.x.len() - 1
    }

    /// Candidate values for the next coordinate.
    pub fn candidates(&self) -> std::ops::RangeInclusive<i64> {
        self.range(self.position())
    }

    /// Conditional law of the next coordinate over [`candidates`](Self::candidates).
    pub fn marginal(&self) -> Result<Vec<T>> {
        let i = self.position();
        let c: Vec<T> = self.inverse.iter().map(|row| row[i].clone()).collect();
        let w: Vec<T> = self.candidates().map(|v| dot(&self.basis(v), &c)).collect();
        if T::EXACT {
            return Ok(w);
        }
        let total = w.iter().fold(T::zero(), |acc, x| acc + x.clone());
        let t = total.as_f64();
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Numeric(format!("conditional weights sum to {t}")));
        }
        let mut out = Vec::with_capacity(w.len());
        for x in w {
            let p = x.as_f64() / t;
            if p < -1e-9 {
                return Err(Error::Numeric(format!("negative conditional weight {p:e}")));
            }
            out.push(T::from_rational(&f64_to_rational(p.max(0.0))));
        }
        Ok(out)
    }

    /// Fixes the next coordinate to `v`.
    pub fn fix(&mut self, v: i64) -> Result<()> {
        if self.is_complete() {
            return Err(argument("all coordinates are already fixed"));
        }
        let i = self.position();
        if !self.candidates().contains(&v) {
            return Err(argument(format!("{v} is outside the candidate range {:?}", self.candidates())));
        }
        let m = self.x.len() - 1;
        let r = self.basis(v);
        if i + 1 < m {
            let c: Vec<T> = self.inverse.iter().map(|row| row[i].clone()).collect();
            let u: Vec<T> = r
                .iter()
                .zip(&self.rows[i])
                .map(|(a, b)| a.clone() - b.clone())
                .collect();
            let denom = T::one() + dot(&u, &c);
            if denom.is_zero() {
                return Err(Error::Numeric(format!("value {v} has zero conditional probability")));
            }
            let ut_b: Vec<T> = (0..m)
                .map(|col| {
                    (0..m).fold(T::zero(), |acc, k| acc + u[k].clone() * self.inverse[k][col].clone())
                })
                .collect();
            for (row, ck) in self.inverse.iter_mut().zip(&c) {
                let f = ck.clone() / denom.clone();
                for (entry, w) in row.iter_mut().zip(&ut_b) {
                    *entry = entry.clone() - f.clone() * w.clone();
                }
            }
        }
        self.rows[i] = r;
        self.fixed.push(v);
        Ok(())
    }

    pub fn fixed(&self) -> &[i64] {
        &self.fixed
    }
}

fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Uniform integer in `[0, bound)` by rejection on random bit strings.
pub(crate) fn uniform_below(bound: &BigUint, rng: &mut impl RngCore) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let excess = (bytes as u64) * 8 - bits;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        // buf is little-endian; clear the excess high bits of the last byte
        if let Some(last) = buf.last_mut() {
            *last &= 0xffu8 >> excess;
        }
        let v = BigUint::from_bytes_le(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// Draws an index with exact rational probabilities summing to one.
pub(crate) fn draw_rational(probs: &[BigRational], rng: &mut impl RngCore) -> usize {
    let lcm = probs
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let weights: Vec<BigInt> = probs
        .iter()
        .map(|p| p.numer() * (&lcm / p.denom()))
        .collect();
    let total: BigInt = weights.iter().sum();
    let u = BigInt::from(uniform_below(&total.to_biguint().expect("positive total"), rng));
    let mut acc = BigInt::zero();
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    unreachable!("probabilities sum to one")
}

/// Sign of `sum_i e_i / (c - x_i)`, exact for the given `e`.
fn secular_nonnegative(x: &[i64], e: &[f64], c: i64) -> bool {
    let mut sum = 0.0;
    let mut mag = 0.0;
    for (&xi, &ei) in x.iter().zip(e) {
        let term = ei / (c - xi) as f64;
        sum += term;
        mag += term.abs();
    }
    let bound = 4.0 * (x.len() as f64 + 2.0) * f64::EPSILON * mag;
    if sum.abs() > bound {
        return sum > 0.0;
    }
    let exact = x
        .iter()
        .zip(e)
        .fold(BigRational::zero(), |acc, (&xi, &ei)| {
            acc + f64_to_rational(ei) / BigRational::from_integer(BigInt::from(c - xi))
        });
    !exact.is_negative()
}

/// The row below `x` as floors of the secular-equation roots.
pub(crate) fn sample_row_secular(x: &[i64], rng: &mut impl Rng) -> Vec<i64> {
    let e: Vec<f64> = (0..x.len()).map(|_| rng.sample(Exp1)).collect();
    (0..x.len() - 1)
        .map(|i| {
            // largest c in [x_{i+1}, x_i - 1] with a nonnegative sum; the
            // sum decreases on the open interval and is +inf at x_{i+1}
            let (mut lo, mut hi) = (x[i + 1], x[i] - 1);
            while lo < hi {
                let mid = lo + (hi - lo + 1) / 2;
                if secular_nonnegative(x, &e, mid) {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            lo
        })
        .collect()
}

fn sample_row_rational(x: &[i64], rng: &mut ChaCha8Rng) -> Result<Vec<i64>> {
    let mut s = RowSampler::<BigRational>::new(x)?;
    while !s.is_complete() {
        let cands = s.candidates();
        let v = if cands.start() == cands.end() {
            *cands.start()
        } else {
            let probs = s.marginal()?;
            cands.start() + draw_rational(&probs, rng) as i64
        };
        s.fix(v)?;
    }
    Ok(s.fixed)
}

/// Exact conditional law of the row below `x`, as `(y, P(y))` pairs in
/// lexicographic order of `y`, obtained by chaining the sequential marginals.
pub fn conditional_row_distribution(x: &[i64]) -> Result<Vec<(Vec<i64>, BigRational)>> {
    if x.len() < 2 {
        return Err(argument("a row below exists only for rows of length >= 2"));
    }
    let support: u64 = x.windows(2).map(|w| (w[0] - w[1]) as u64).product();
    if support > PRODUCT_LIMIT {
        return Err(Error::Budget(format!("{support} candidate rows exceed {PRODUCT_LIMIT}")));
    }
    fn walk(s: RowSampler<BigRational>, weight: BigRational, out: &mut Vec<(Vec<i64>, BigRational)>) -> Result<()> {
        if s.is_complete() {
            out.push((s.fixed, weight));
            return Ok(());
        }
        let probs = s.marginal()?;
        for (v, p) in s.candidates().zip(probs) {
            if p.is_zero() {
                continue;
            }
            if p.is_negative() {
                return Err(Error::Consistency(format!("negative probability {p}")));
            }
            let mut next = s.clone();
            next.fix(v)?;
            walk(next, &weight * &p, out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(RowSampler::new(x)?, BigRational::one(), &mut out)?;
    Ok(out)
}

/// The maximal pattern: each row is the row above minus one, dropping the last entry.
pub fn glauber_initial(spec: &SawtoothSpec) -> BeadArray {
    let mut rows = vec![spec.top().to_vec()];
    while rows.last().expect("nonempty").len() > 1 {
        let upper = rows.last().expect("nonempty");
        let next = upper[..upper.len() - 1].iter().map(|v| v - 1).collect();
        rows.push(next);
    }
    rows.reverse();
    BeadArray::from_rows_unchecked(rows)
}

/// Runs `steps` single-bead `+-1` proposals, each rejected unless
/// interlacing is preserved. Returns the number of accepted moves.
pub fn glauber_run(pattern: &mut BeadArray, steps: u64, rng: &mut impl Rng) -> u64 {
    let n = pattern.n();
    if n < 2 {
        return 0;
    }
    let rows = &mut pattern.rows;
    // rows below the top: there are n(n-1)/2 movable beads
    let movable = n * (n - 1) / 2;
    let mut accepted = 0;
    for _ in 0..steps {
        let mut idx = rng.random_range(0..movable);
        let mut k = 0;
        while idx > k {
            idx -= k + 1;
            k += 1;
        }
        let i = idx;
        let up = rng.random::<bool>();
        let v = rows[k][i] + if up { 1 } else { -1 };
        let above = &rows[k + 1];
        let ok_above = above[i] > v && v >= above[i + 1];
        let ok_below = k == 0 || {
            let below = &rows[k - 1];
            (i == k || v > below[i]) && (i == 0 || below[i - 1] >= v)
        };
        if ok_above && ok_below {
            rows[k][i] = v;
            accepted += 1;
        }
    }
    accepted
}

/// A pattern with top row `spec.top`, drawn with the requested method from
/// a generator seeded by `seed`.
pub fn sample_pattern(spec: &SawtoothSpec, seed: u64, method: SampleMethod) -> Result<BeadArray> {
    sample_pattern_with(spec, &mut rng_from_seed(seed), method, Arithmetic::Auto)
}

pub fn sample_pattern_with(
    spec: &SawtoothSpec,
    rng: &mut ChaCha8Rng,
    method: SampleMethod,
    arithmetic: Arithmetic,
) -> Result<BeadArray> {
    let n = spec.n();
    match method {
        SampleMethod::Exact => {
            if n > EXACT_SAMPLER_MAX_N {
                return Err(argument(format!(
                    "exact sampling supports N <= {EXACT_SAMPLER_MAX_N}, got {n}"
                )));
            }
            let rational = match arithmetic {
                Arithmetic::Auto => n <= EXACT_RATIONAL_MAX_N,
                Arithmetic::Rational => true,
                Arithmetic::Float => false,
            };
            let mut rows = vec![spec.top().to_vec()];
            while rows.last().expect("nonempty").len() > 1 {
                let upper = rows.last().expect("nonempty");
                let next = if rational {
                    sample_row_rational(upper, rng)?
                } else {
                    sample_row_secular(upper, rng)
                };
                rows.push(next);
            }
            rows.reverse();
            Ok(BeadArray::from_rows_unchecked(rows))
        }
        SampleMethod::Glauber { steps } => {
            if n > GLAUBER_MAX_N {
                return Err(argument(format!("Glauber sampling supports N <= {GLAUBER_MAX_N}, got {n}")));
            }
            let mut p = glauber_initial(spec);
            glauber_run(&mut p, steps, rng);
            Ok(p)
        }
    }
}

//! The Harish-Chandra/Itzykson-Zuber integral
//! `I_N(z; a, b) = int_{U(N)} exp(z Tr diag(a) U diag(b) U^*) dU`:
//! closed-form evaluation, confluent (repeated `a`) evaluation as a
//! normalized character, exact Maclaurin coefficients of `log I_N`, and the
//! comparison of those coefficients with monotone Hurwitz numbers.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::{partitions_of, power_sum, Partition};
use crate::error::{argument, Error, Result};
use crate::hurwitz::HurwitzTable;
use crate::jets::{series_det, TruncatedSeries};
use crate::numeric::{determinant, factorial, format_rational, parse_rational, solve, Real, Scalar};

/// Largest rank accepted by the exact series routines.
pub const MAX_SERIES_RANK: usize = 12;
/// Largest order accepted by [`hciz_log_series`].
pub const MAX_SERIES_ORDER: usize = 12;
/// Largest degree accepted by [`extract_coeffs`].
pub const MAX_EXTRACT_DEGREE: u32 = 5;

fn strictly_decreasing(b: &[i64]) -> bool {
    b.windows(2).all(|w| w[0] > w[1])
}

/// `prod_{i<j} (x_i - x_j)`.
pub fn vandermonde<T: Scalar>(x: &[T]) -> T {
    let mut v = T::one();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            v = v * (x[i].clone() - x[j].clone());
        }
    }
    v
}

fn superfactorial(n: usize) -> BigUint {
    (1..n as u32).map(factorial).product()
}

/// Weyl dimension `prod_{i<j} (b_i - b_j)/(j - i)` of the irreducible
/// representation of `GL(N)` with particle configuration `b`.
pub fn dimension(b: &[i64]) -> Result<BigUint> {
    if b.is_empty() {
        return Err(argument("dimension of an empty configuration"));
    }
    if !strictly_decreasing(b) {
        return Err(argument(format!("configuration {b:?} is not strictly decreasing")));
    }
    let mut value = BigRational::one();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            value *= BigRational::new(BigInt::from(b[i] - b[j]), BigInt::from((j - i) as i64));
        }
    }
    if !value.is_integer() {
        return Err(Error::Consistency(format!("dimension of {b:?} is not an integer")));
    }
    Ok(value.to_integer().to_biguint().expect("positive"))
}

/// `I_N(z; a, b)` from the determinant formula
/// `prod_{p<N} p! det[exp(z a_i b_j)] / (z^{N(N-1)/2} V(a) V(b))`.
pub fn hciz_value<T: Real>(z: &T, a: &[T], b: &[T]) -> Result<T> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(argument("hciz_value needs spectra of equal positive length"));
    }
    if z.is_zero() {
        return Ok(T::one());
    }
    let va = vandermonde(a);
    if va.is_zero() {
        return Err(argument(
            "hciz_value needs distinct a; use orbital_laplace for repeated eigenvalues",
        ));
    }
    let vb = vandermonde(b);
    if vb.is_zero() {
        return Err(argument("hciz_value needs distinct b"));
    }
    let m: Vec<Vec<T>> = a
        .iter()
        .map(|ai| {
            b.iter()
                .map(|bj| (z.clone() * ai.clone() * bj.clone()).exp())
                .collect()
        })
        .collect();
    let det = determinant(m);
    let mut zpow = T::one();
    for _ in 0..n * (n - 1) / 2 {
        zpow = zpow * z.clone();
    }
    let sf = T::from_rational(&BigRational::from_integer(superfactorial(n).into()));
    Ok(sf * det / (zpow * va * vb))
}

fn falling<T: Scalar>(x: i64, r: usize) -> T {
    (0..r as i64).fold(T::one(), |acc, k| acc * T::from_i64(x - k))
}

/// Evaluates `I_N(1; a, b)` for any real `a`, repeats allowed, and integer
/// `b` strictly decreasing, as
/// `chi^b(e^a) / chi^b(1) * prod_{i<j} (e^{a_i} - e^{a_j})/(a_i - a_j)`.
///
/// The character is the ratio of alternants `det[x_i^{b_j}] / det[x_i^{N-j}]`
/// with derivative rows at repeated nodes, so no limit is taken numerically.
pub fn orbital_laplace<T: Real>(a: &[T], b: &[i64]) -> Result<T> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(argument("orbital_laplace needs spectra of equal positive length"));
    }
    let dim = dimension(b)?;
    // Group equal entries of a; each group of size m contributes rows for
    // derivatives 0..m.
    let mut nodes: Vec<(T, usize)> = Vec::new();
    for x in a {
        match nodes.iter_mut().find(|(y, _)| y == x) {
            Some(node) => node.1 += 1,
            None => nodes.push((x.clone(), 1)),
        }
    }
    let rows = |exponents: &mut dyn Iterator<Item = i64>| -> Vec<Vec<T>> {
        let exps: Vec<i64> = exponents.collect();
        let mut m = Vec::with_capacity(n);
        for (x, mult) in &nodes {
            for r in 0..*mult {
                m.push(
                    exps.iter()
                        .map(|&e| falling::<T>(e, r) * (x.clone() * T::from_i64(e - r as i64)).exp())
                        .collect(),
                );
            }
        }
        m
    };
    let num = determinant(rows(&mut b.iter().copied()));
    let den = determinant(rows(&mut (0..n as i64).rev()));
    let dim = T::from_rational(&BigRational::from_integer(dim.into()));
    let mut correction = T::one();
    for i in 0..n {
        for j in i + 1..n {
            correction = correction
                * if a[i] == a[j] {
                    a[i].exp()
                } else {
                    (a[i].exp() - a[j].exp()) / (a[i].clone() - a[j].clone())
                };
        }
    }
    Ok(num / den / dim * correction)
}

fn check_series_inputs(a: &[BigRational], b: &[BigRational], order: usize) -> Result<()> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(argument("spectra must have equal positive length"));
    }
    if n > MAX_SERIES_RANK {
        return Err(argument(format!("rank {n} exceeds {MAX_SERIES_RANK}")));
    }
    if order > MAX_SERIES_ORDER {
        return Err(argument(format!("order {order} exceeds {MAX_SERIES_ORDER}")));
    }
    if vandermonde(a).is_zero() || vandermonde(b).is_zero() {
        return Err(argument("series expansion needs distinct a and distinct b"));
    }
    Ok(())
}

/// Exact Maclaurin jet of `I_N(z; a, b)` to order `order`.
///
/// Rows of `[exp(z a_i b_j)]` are replaced by divided differences in `a`,
/// which removes `V(a)` and leaves row `i` divisible by `z^i`; each row is
/// shifted accordingly (with an exact-vanishing check) so the remaining
/// determinant has constant term `det[b_j^i / i!]`.
pub fn hciz_series(a: &[BigRational], b: &[BigRational], order: usize) -> Result<TruncatedSeries<BigRational>> {
    check_series_inputs(a, b, order)?;
    let n = a.len();
    let len = order + n - 1;
    let mut rows: Vec<Vec<TruncatedSeries<BigRational>>> = a
        .iter()
        .map(|ai| b.iter().map(|bj| TruncatedSeries::exp_linear(&(ai * bj), len)).collect())
        .collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let inv = (&a[i] - &a[i - level]).recip();
            rows[i] = (0..n)
                .map(|j| (&rows[i][j] - &rows[i - 1][j]).scale(&inv))
                .collect();
        }
    }
    let reduced = rows
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .map(|s| s.shift(i).map(|t| t.truncate(order)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let det = series_det(&reduced)?;
    // det[original] = z^{N(N-1)/2} prod_{k<i}(a_i - a_k) det[reduced], and
    // prod_{k<i}(a_i - a_k) = (-1)^{N(N-1)/2} V(a).
    let mut norm = BigRational::from_integer(superfactorial(n).into()) / vandermonde(b);
    if (n * (n - 1) / 2) % 2 == 1 {
        norm = -norm;
    }
    let series = det.scale(&norm);
    if !series.coeff(0).is_one() {
        return Err(Error::Consistency(format!(
            "normalized HCIZ series has constant term {}",
            series.coeff(0)
        )));
    }
    Ok(series)
}

/// Exact Maclaurin jet of `log I_N(z; a, b)` to order `order`.
pub fn hciz_log_series(
    a: &[BigRational],
    b: &[BigRational],
    order: usize,
) -> Result<TruncatedSeries<BigRational>> {
    hciz_series(a, b, order)?.log()
}

/// Exact coefficients `C_N(alpha, beta)` for all `alpha, beta` partitions of `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable {
    pub n: u32,
    pub d: u32,
    pub entries: BTreeMap<(Partition, Partition), BigRational>,
}

#[derive(Serialize, Deserialize)]
struct CoeffEntryJson {
    alpha: Partition,
    beta: Partition,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct CoeffTableJson {
    #[serde(rename = "N")]
    n: u32,
    d: u32,
    entries: Vec<CoeffEntryJson>,
}

impl CoeffTable {
    pub fn get(&self, alpha: &Partition, beta: &Partition) -> Option<&BigRational> {
        self.entries.get(&(alpha.clone(), beta.clone()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = CoeffTableJson {
            n: self.n,
            d: self.d,
            entries: self
                .entries
                .iter()
                .map(|((alpha, beta), v)| CoeffEntryJson {
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                    value: format_rational(v),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("coefficient table serializes")
    }

    pub fn from_json(doc: &serde_json::Value) -> Result<Self> {
        let parsed: CoeffTableJson = serde_json::from_value(doc.clone())
            .map_err(|e| argument(format!("malformed coefficient table: {e}")))?;
        let mut entries = BTreeMap::new();
        for e in parsed.entries {
            entries.insert((e.alpha, e.beta), parse_rational(&e.value)?);
        }
        Ok(CoeffTable {
            n: parsed.n,
            d: parsed.d,
            entries,
        })
    }
}

/// Deterministic integer sample points: a window of length `n` from
/// `1, 2, 3, 5, 7, 11, ...` starting at `offset`, optionally negated.
fn sample_vector(n: usize, offset: usize, negate: bool) -> Vec<BigRational> {
    let mut grid: Vec<i64> = vec![1];
    let mut k = 2;
    while grid.len() < n + offset {
        if (2..k).take_while(|p| p * p <= k).all(|p| k % p != 0) {
            grid.push(k);
        }
        k += 1;
    }
    grid[offset..offset + n]
        .iter()
        .map(|&v| BigRational::from_integer(BigInt::from(if negate { -v } else { v })))
        .collect()
}

/// Sample points used by [`extract_coeffs`] on a given attempt.
pub fn extraction_samples(n: usize, d: u32, attempt: usize) -> (Vec<Vec<BigRational>>, Vec<Vec<BigRational>>) {
    let p = partitions_of(d).map(|v| v.len()).unwrap_or(1);
    let a = (0..p).map(|s| sample_vector(n, s + attempt * p, false)).collect();
    let b = (0..p)
        .map(|t| sample_vector(n, 2 * t + attempt, t % 2 == 1))
        .collect();
    (a, b)
}

const EXTRACT_ATTEMPTS: usize = 6;

/// Solves for `C_N(alpha, beta)`, `alpha, beta` partitions of `d`, from the
/// order-`d` coefficients of `log I_N` at `P^2` sample spectra.
pub fn extract_coeffs(n: u32, d: u32) -> Result<CoeffTable> {
    if d == 0 || d > MAX_EXTRACT_DEGREE {
        return Err(argument(format!("degree {d} outside 1..={MAX_EXTRACT_DEGREE}")));
    }
    if n < d || n as usize > MAX_SERIES_RANK {
        return Err(argument(format!(
            "rank {n} outside {d}..={MAX_SERIES_RANK} for degree {d}"
        )));
    }
    let parts = partitions_of(d)?;
    let p = parts.len();
    let d_fact = BigRational::from_integer(factorial(d).into());
    let mut last_err = None;
    for attempt in 0..EXTRACT_ATTEMPTS {
        let (a_samples, b_samples) = extraction_samples(n as usize, d, attempt);
        let pairs: Vec<(usize, usize)> = (0..p).flat_map(|s| (0..p).map(move |t| (s, t))).collect();
        let mut design = Vec::with_capacity(p * p);
        for &(s, t) in &pairs {
            let pa: Vec<BigRational> = parts.iter().map(|al| power_sum(al, &a_samples[s])).collect::<Result<_>>()?;
            let pb: Vec<BigRational> = parts.iter().map(|be| power_sum(be, &b_samples[t])).collect::<Result<_>>()?;
            design.push(
                pa.iter()
                    .flat_map(|x| pb.iter().map(move |y| x * y))
                    .collect::<Vec<_>>(),
            );
        }
        let rhs: Vec<BigRational> = pairs
            .par_iter()
            .map(|&(s, t)| {
                hciz_log_series(&a_samples[s], &b_samples[t], d as usize)
                    .map(|series| series.coeff(d as usize) * &d_fact)
            })
            .collect::<Result<_>>()?;
        match solve(design, rhs) {
            Ok(x) => {
                let mut entries = BTreeMap::new();
                for (i, alpha) in parts.iter().enumerate() {
                    for (j, beta) in parts.iter().enumerate() {
                        entries.insert((alpha.clone(), beta.clone()), x[i * p + j].clone());
                    }
                }
                return Ok(CoeffTable { n, d, entries });
            }
            Err(Error::Singular(msg)) => last_err = Some(msg),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Singular(format!(
        "design matrix singular after {EXTRACT_ATTEMPTS} sample sets: {}",
        last_err.unwrap_or_default()
    )))
}

/// The genus-`g` term `(-1)^{l(a)+l(b)} N^{2-d-l(a)-l(b)-2g} H_g(a, b)`.
pub fn genus_term(n: u32, g: u32, alpha: &Partition, beta: &Partition, count: u64) -> BigRational {
    let exp = 2 - alpha.size() as i64 - alpha.len() as i64 - beta.len() as i64 - 2 * g as i64;
    let nn = BigRational::from_integer(BigInt::from(n));
    let power = if exp >= 0 {
        num_traits::pow(nn, exp as usize)
    } else {
        num_traits::pow(nn, (-exp) as usize).recip()
    };
    let value = power * BigRational::from_integer(BigInt::from(count));
    if (alpha.len() + beta.len()) % 2 == 1 {
        -value
    } else {
        value
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Pair {
    pub alpha: Partition,
    pub beta: Partition,
    /// Exact coefficient as `"num/den"`.
    pub exact: String,
    pub exact_f64: f64,
    /// Monotone counts `H_g` for `g = 0..=g_max`.
    pub counts: Vec<u64>,
    /// `|C_N - partial sum through genus g|` for each `g`.
    pub abs_errors: Vec<f64>,
    pub rel_error: f64,
    /// Whether `|error(g_max)| < |error(0)|`, or `error(0) = 0`.
    pub improves: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Report {
    #[serde(rename = "N")]
    pub n: u32,
    pub d: u32,
    pub g_max: u32,
    pub pairs: Vec<Theorem2Pair>,
}

impl Theorem2Report {
    pub fn max_rel_error(&self) -> f64 {
        self.pairs.iter().map(|p| p.rel_error).fold(0.0, f64::max)
    }

    pub fn all_improve(&self) -> bool {
        self.pairs.iter().all(|p| p.improves)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Compares extracted `C_N(alpha, beta)` with the genus expansion truncated
/// at `g_max`, using walk counts from `table`.
pub fn verify_theorem2(n: u32, d: u32, g_max: u32, table: &HurwitzTable) -> Result<Theorem2Report> {
    let coeffs = extract_coeffs(n, d)?;
    let mut pairs = Vec::new();
    for ((alpha, beta), exact) in &coeffs.entries {
        let mut partial = BigRational::zero();
        let mut counts = Vec::new();
        let mut abs_errors = Vec::new();
        for g in 0..=g_max {
            let h = table.monotone_by_genus(g, alpha, beta)?;
            counts.push(h);
            partial += genus_term(n, g, alpha, beta, h);
            abs_errors.push(rational_to_f64(&(exact - &partial).abs()));
        }
        let exact_f64 = rational_to_f64(exact);
        let last = *abs_errors.last().expect("g_max >= 0");
        pairs.push(Theorem2Pair {
            alpha: alpha.clone(),
            beta: beta.clone(),
            exact: format_rational(exact),
            exact_f64,
            counts,
            rel_error: last / exact_f64.abs(),
            improves: abs_errors[0] == 0.0 || last < abs_errors[0],
            abs_errors,
        });
    }
    Ok(Theorem2Report { n, d, g_max, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::{count_walks, WalkQuery, DEFAULT_BUDGET};
    use crate::numeric::{rat, with_working_digits, HighFloat};

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    fn hf(v: &[f64]) -> Vec<HighFloat> {
        v.iter().map(|&x| HighFloat::from_f64(x)).collect()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * y.abs().max(1e-300)
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension(&[4, 3, 2, 1, 0]).unwrap(), BigUint::one());
        assert_eq!(dimension(&[2, 0]).unwrap(), BigUint::from(2u32));
        assert_eq!(dimension(&[3, 1, 0]).unwrap(), BigUint::from(3u32));
        assert_eq!(dimension(&[1, -1, -5]).unwrap(), dimension(&[6, 4, 0]).unwrap());
        assert!(dimension(&[1, 1]).is_err());
    }

    #[test]
    fn vandermonde_sign_convention() {
        // N = 2 closed form pins the sign of V and of det[e^{z a_i b_j}].
        let (a1, a2, b1, b2, z) = (0.7f64, -0.4, 2.0, -1.0, 0.9);
        let closed = ((z * (a1 * b1 + a2 * b2)).exp() - (z * (a1 * b2 + a2 * b1)).exp())
            / (z * (a1 - a2) * (b1 - b2));
        let v = hciz_value(&z, &[a1, a2], &[b1, b2]).unwrap();
        assert!(close(v, closed, 1e-14));
        // the same with the spectra listed in increasing order
        let v = hciz_value(&z, &[a2, a1], &[b2, b1]).unwrap();
        assert!(close(v, closed, 1e-14));
        assert!(close(hciz_value(&1.0, &[1.0, 0.0], &[1.0, 0.0]).unwrap(), std::f64::consts::E - 1.0, 1e-14));
    }

    #[test]
    fn hciz_value_basics() {
        let v = hciz_value(&0.3, &[1.5], &[2.0]).unwrap();
        assert!(close(v, (0.3f64 * 1.5 * 2.0).exp(), 1e-15));
        assert_eq!(hciz_value(&0.0, &[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert!(matches!(hciz_value(&1.0, &[1.0, 1.0], &[1.0, 0.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn hciz_value_symmetries() {
        let a = hf(&[0.3, -0.2, 0.11, 0.05]);
        let b = hf(&[3.0, 1.0, 0.0, -2.0]);
        let z = HighFloat::from_f64(0.7);
        let base = hciz_value(&z, &a, &b).unwrap().as_f64();
        let a_perm = vec![a[2].clone(), a[0].clone(), a[3].clone(), a[1].clone()];
        let b_perm = vec![b[1].clone(), b[3].clone(), b[0].clone(), b[2].clone()];
        assert!(close(hciz_value(&z, &a_perm, &b_perm).unwrap().as_f64(), base, 1e-25));
        let za: Vec<HighFloat> = a.iter().map(|x| x.clone() * z.clone()).collect();
        let zb: Vec<HighFloat> = b.iter().map(|x| x.clone() * z.clone()).collect();
        let one = HighFloat::one();
        assert!(close(hciz_value(&one, &za, &b).unwrap().as_f64(), base, 1e-25));
        assert!(close(hciz_value(&one, &a, &zb).unwrap().as_f64(), base, 1e-25));
    }

    #[test]
    fn orbital_laplace_matches_hciz_on_distinct_spectra() {
        let a = hf(&[0.4, -0.3, 0.1, 0.25, -0.45]);
        let b = [7i64, 4, 3, 0, -2];
        let bf: Vec<HighFloat> = b.iter().map(|&x| HighFloat::from_i64(x)).collect();
        let x = orbital_laplace(&a, &b).unwrap().as_f64();
        let y = hciz_value(&HighFloat::one(), &a, &bf).unwrap().as_f64();
        assert!(close(x, y, 1e-10));
    }

    #[test]
    fn orbital_laplace_at_zero_is_one() {
        for b in [vec![0i64], vec![5, 2, -1], vec![9, 4, 3, 1, 0, -3]] {
            let a = vec![HighFloat::zero(); b.len()];
            assert!(close(orbital_laplace(&a, &b).unwrap().as_f64(), 1.0, 1e-28));
        }
    }

    /// Schur polynomial by enumerating semistandard tableaux of shape `lambda`
    /// with entries in 1..=n.
    fn schur_ssyt(lambda: &[usize], x: &[f64]) -> f64 {
        let cells: Vec<(usize, usize)> = lambda
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
            .collect();
        let n = x.len();
        let mut filling = vec![0usize; cells.len()];
        let mut total = 0.0;
        fn rec(
            idx: usize,
            cells: &[(usize, usize)],
            filling: &mut Vec<usize>,
            n: usize,
            x: &[f64],
            total: &mut f64,
        ) {
            if idx == cells.len() {
                *total += filling.iter().map(|&v| x[v]).product::<f64>();
                return;
            }
            let (r, c) = cells[idx];
            for v in 0..n {
                let left_ok = c == 0 || {
                    let li = cells.iter().position(|&q| q == (r, c - 1)).unwrap();
                    filling[li] <= v
                };
                let up_ok = r == 0 || {
                    let ui = cells.iter().position(|&q| q == (r - 1, c)).unwrap();
                    filling[ui] < v
                };
                if left_ok && up_ok {
                    filling[idx] = v;
                    rec(idx + 1, cells, filling, n, x, total);
                }
            }
        }
        rec(0, &cells, &mut filling, n, x, &mut total);
        total
    }

    #[test]
    fn orbital_laplace_matches_tableau_characters() {
        // b = lambda + staircase, lambda with at most four cells
        let shapes: &[&[usize]] = &[&[0, 0, 0], &[1, 0, 0], &[2, 1, 0], &[1, 1, 1], &[3, 1, 0], &[2, 2, 0], &[4, 0, 0]];
        let avals: &[&[f64]] = &[&[0.3, 0.0, 0.0], &[0.2, -0.4, 0.1], &[0.5, 0.5, -0.1]];
        for lambda in shapes {
            let b: Vec<i64> = lambda
                .iter()
                .enumerate()
                .map(|(i, &l)| l as i64 + (lambda.len() - 1 - i) as i64)
                .collect();
            for a in avals {
                let x: Vec<f64> = a.iter().map(|v| v.exp()).collect();
                let ratio = schur_ssyt(lambda, &x) / schur_ssyt(lambda, &[1.0, 1.0, 1.0]);
                let mut correction = 1.0;
                for i in 0..3 {
                    for j in i + 1..3 {
                        correction *= if a[i] == a[j] {
                            a[i].exp()
                        } else {
                            (a[i].exp() - a[j].exp()) / (a[i] - a[j])
                        };
                    }
                }
                let value = orbital_laplace(&hf(a), &b).unwrap().as_f64();
                assert!(close(value, ratio * correction, 1e-12), "{lambda:?} {a:?}");
            }
        }
    }

    #[test]
    fn orbital_laplace_is_continuous_at_repeats() {
        with_working_digits(60, || {
            let b = [6i64, 3, 1, 0];
            let base = hf(&[0.35, 0.0, 0.0, 0.0]);
            let exact = orbital_laplace(&base, &b).unwrap().as_f64();
            let mut prev_err = f64::INFINITY;
            for eps in [1e-3, 1e-5, 1e-7] {
                let a = hf(&[0.35, 0.0, eps, -eps]);
                let bf: Vec<HighFloat> = b.iter().map(|&x| HighFloat::from_i64(x)).collect();
                let v = hciz_value(&HighFloat::one(), &a, &bf).unwrap().as_f64();
                let err = (v - exact).abs();
                assert!(err < prev_err);
                prev_err = err;
            }
            assert!(prev_err < 1e-9 * exact.abs());
        });
    }

    /// Direct path: determinant of the full jet matrix to order
    /// `order + N(N-1)/2`, then a single shift by `z^{N(N-1)/2}`.
    fn series_direct(a: &[BigRational], b: &[BigRational], order: usize) -> Result<TruncatedSeries<BigRational>> {
        let n = a.len();
        let m = n * (n - 1) / 2;
        let entries: Vec<Vec<TruncatedSeries<BigRational>>> = a
            .iter()
            .map(|ai| b.iter().map(|bj| TruncatedSeries::exp_linear(&(ai * bj), order + m)).collect())
            .collect();
        let det = series_det(&entries)?.shift(m)?;
        let norm = BigRational::from_integer(superfactorial(n).into()) / (vandermonde(a) * vandermonde(b));
        let s = det.scale(&norm);
        assert!(s.coeff(0).is_one(), "constant term {}", s.coeff(0));
        Ok(s)
    }

    #[test]
    fn reduced_series_matches_direct_determinant() {
        let cases = [
            (vec![rat(1, 1), rat(0, 1)], ints(&[1, 0]), 6),
            (vec![rat(1, 2), rat(-1, 3), rat(2, 1)], ints(&[3, 1, -1]), 5),
            (ints(&[2, 3, 5, 7]), ints(&[-1, 4, 0, 2]), 4),
        ];
        for (a, b, order) in cases {
            assert_eq!(hciz_series(&a, &b, order).unwrap(), series_direct(&a, &b, order).unwrap());
        }
    }

    #[test]
    fn series_matches_numeric_value() {
        let a = [rat(1, 2), rat(-1, 4), rat(1, 5)];
        let b = ints(&[2, 0, -1]);
        let series = hciz_series(&a, &b, 12).unwrap();
        let z = 0.05f64;
        let approx: f64 = series
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.as_f64() * z.powi(k as i32))
            .sum();
        let af: Vec<f64> = a.iter().map(|x| x.as_f64()).collect();
        let bf: Vec<f64> = b.iter().map(|x| x.as_f64()).collect();
        assert!(close(approx, hciz_value(&z, &af, &bf).unwrap(), 1e-12));
    }

    #[test]
    fn log_series_low_orders() {
        let a = ints(&[1, 2, 5]);
        let b = ints(&[3, -1, 4]);
        let s = hciz_log_series(&a, &b, 3).unwrap();
        assert!(s.coeff(0).is_zero());
        let p1 = |x: &[BigRational]| x.iter().fold(BigRational::zero(), |acc, v| acc + v);
        assert_eq!(s.coeff(1), &(p1(&a) * p1(&b) / rat(3, 1)));
    }

    fn closed_form_d2(n: i64) -> [(Partition, Partition, BigRational); 4] {
        let n2 = n * n;
        [
            (p(&[2]), p(&[2]), rat(1, n2 - 1)),
            (p(&[2]), p(&[1, 1]), rat(-1, n * (n2 - 1))),
            (p(&[1, 1]), p(&[2]), rat(-1, n * (n2 - 1))),
            (p(&[1, 1]), p(&[1, 1]), rat(1, n2 * (n2 - 1))),
        ]
    }

    #[test]
    fn closed_forms_are_sums_of_s2_walk_series() {
        // sum_r (-1)^r H^r / N^{r+2} over the S(2) walk counts, to 40 terms
        for n in [3i64, 4, 5] {
            for (alpha, beta, value) in closed_form_d2(n) {
                let mut sum = 0.0;
                for r in 0..40u32 {
                    let h = count_walks(&WalkQuery::monotone(r, alpha.clone(), beta.clone()).unwrap(), DEFAULT_BUDGET)
                        .unwrap();
                    sum += (-1f64).powi(r as i32) * h as f64 / (n as f64).powi(r as i32 + 2);
                }
                assert!(close(sum, value.as_f64(), 1e-14));
            }
        }
    }

    #[test]
    fn log_series_second_order_example() {
        let a = ints(&[1, 0]);
        let b = ints(&[1, 0]);
        let s = hciz_log_series(&a, &b, 2).unwrap();
        let mut expected = BigRational::zero();
        for (alpha, beta, c) in closed_form_d2(2) {
            expected += c * power_sum(&alpha, &a).unwrap() * power_sum(&beta, &b).unwrap();
        }
        assert_eq!(s.coeff(2), &(expected / rat(2, 1)));
    }

    #[test]
    fn extract_degree_one() {
        for n in 1..=6u32 {
            let t = extract_coeffs(n, 1).unwrap();
            assert_eq!(t.get(&p(&[1]), &p(&[1])).unwrap(), &rat(1, n as i64));
        }
    }

    #[test]
    fn extract_degree_two_closed_forms() {
        for n in [3i64, 4, 5] {
            let t = extract_coeffs(n as u32, 2).unwrap();
            for (alpha, beta, value) in closed_form_d2(n) {
                assert_eq!(t.get(&alpha, &beta).unwrap(), &value, "N={n} {alpha} {beta}");
            }
        }
    }

    #[test]
    fn extracted_signs_and_leading_order() {
        let d = 3u32;
        let mut prev: BTreeMap<(Partition, Partition), f64> = BTreeMap::new();
        for n in [d, d + 2, d + 4, d + 8] {
            let t = extract_coeffs(n, d).unwrap();
            for ((alpha, beta), c) in &t.entries {
                let sign = if (alpha.len() + beta.len()) % 2 == 0 { 1.0 } else { -1.0 };
                assert!(sign * c.as_f64() > 0.0);
                let h0 = monotone_h0(alpha, beta) as f64;
                let scaled = (n as f64).powi((d as usize + alpha.len() + beta.len()) as i32 - 2) * c.as_f64().abs();
                let dist = (scaled - h0).abs();
                if let Some(&before) = prev.get(&(alpha.clone(), beta.clone())) {
                    assert!(dist < before, "N={n} {alpha} {beta}");
                }
                prev.insert((alpha.clone(), beta.clone()), dist);
            }
        }
    }

    fn monotone_h0(alpha: &Partition, beta: &Partition) -> u64 {
        crate::hurwitz::monotone_by_genus(0, alpha, beta).unwrap()
    }

    #[test]
    fn theorem2_degree_one_is_exact() {
        let table = HurwitzTable::new(4, 12).unwrap();
        for n in [1u32, 3, 6] {
            let report = verify_theorem2(n, 1, 0, &table).unwrap();
            assert_eq!(report.pairs.len(), 1);
            assert_eq!(report.pairs[0].abs_errors, vec![0.0]);
        }
    }

    #[test]
    fn theorem2_degree_two_converges() {
        let table = HurwitzTable::new(4, 12).unwrap();
        let n = 5f64;
        let report = verify_theorem2(5, 2, 3, &table).unwrap();
        for pair in &report.pairs {
            // every S(2) genus count is 1, so the remainder after genus g is
            // the geometric tail N^{-(d + l(a) + l(b) - 2) - 2(g + 1)} / (1 - N^{-2})
            let lead = (pair.alpha.len() + pair.beta.len()) as i32;
            for (g, err) in pair.abs_errors.iter().enumerate() {
                let tail = n.powi(-lead - 2 * (g as i32 + 1)) / (1.0 - n.powi(-2));
                assert!(close(*err, tail, 1e-9), "{} {} g={g}", pair.alpha, pair.beta);
            }
            assert!(pair.improves);
        }
    }

    #[test]
    fn coeff_table_json_round_trip() {
        let t = extract_coeffs(3, 2).unwrap();
        let doc = t.to_json();
        assert_eq!(doc["N"], 3);
        assert_eq!(doc["entries"][0]["value"], serde_json::json!(format_rational(t.entries.values().next().unwrap())));
        assert_eq!(CoeffTable::from_json(&doc).unwrap(), t);
    }

    #[test]
    fn extraction_argument_checks() {
        assert!(extract_coeffs(2, 3).is_err());
        assert!(extract_coeffs(8, 6).is_err());
        assert!(hciz_log_series(&ints(&[1, 1]), &ints(&[1, 0]), 2).is_err());
    }
}

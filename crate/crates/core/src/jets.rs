//! Truncated power series in one variable `z` (jets of order `D`), over
//! exact rationals or floating point.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{argument, Error, Result};
use crate::numeric::Scalar;

/// Coefficients of `z^0 ..= z^D`.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Builds a jet from coefficients; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(argument("a jet needs at least one coefficient"));
        }
        Ok(TruncatedSeries { coeffs })
    }

    /// Pads with zeros or truncates `coeffs` to order `d`.
    pub fn from_poly(mut coeffs: Vec<T>, d: usize) -> Self {
        coeffs.resize(d + 1, T::zero());
        TruncatedSeries { coeffs }
    }

    pub fn zero(d: usize) -> Self {
        TruncatedSeries::from_poly(Vec::new(), d)
    }

    pub fn one(d: usize) -> Self {
        TruncatedSeries::constant(T::one(), d)
    }

    pub fn constant(c: T, d: usize) -> Self {
        TruncatedSeries::from_poly(vec![c], d)
    }

    /// The jet of `z` itself.
    pub fn variable(d: usize) -> Self {
        TruncatedSeries::from_poly(vec![T::zero(), T::one()], d)
    }

    /// `exp(c z)` to order `d`.
    pub fn exp_linear(c: &T, d: usize) -> Self {
        let mut coeffs = Vec::with_capacity(d + 1);
        coeffs.push(T::one());
        for n in 1..=d {
            let prev: T = coeffs[n - 1].clone();
            coeffs.push(prev * c.clone() / T::from_i64(n as i64));
        }
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &T {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn truncate(&self, d: usize) -> Self {
        assert!(d <= self.order(), "cannot raise the order of a jet");
        TruncatedSeries {
            coeffs: self.coeffs[..=d].to_vec(),
        }
    }

    fn scale_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.as_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Index of the first coefficient that is not negligible, if any.
    pub fn valuation(&self) -> Option<usize> {
        let scale = self.scale_f64();
        self.coeffs.iter().position(|c| !c.is_negligible(scale))
    }

    pub fn scale(&self, c: &T) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(
            self.order(),
            other.order(),
            "jets of different orders cannot be combined"
        );
    }

    /// `self / other`; the divisor must have a nonzero constant term.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_order(other);
        if other.coeffs[0].is_negligible(other.scale_f64()) || other.coeffs[0].is_zero() {
            return Err(Error::Singularity);
        }
        Ok(TruncatedSeries {
            coeffs: series_quotient(&self.coeffs, &other.coeffs, self.order() + 1),
        })
    }

    pub fn recip(&self) -> Result<Self> {
        TruncatedSeries::one(self.order()).div(self)
    }

    /// Divides by `z^m` after checking that the first `m` coefficients
    /// vanish: exactly for rationals, below `1e-12 * max|coeff|` for floats.
    /// The result has order `D - m`.
    pub fn shift(&self, m: usize) -> Result<Self> {
        if m > self.order() {
            return Err(argument(format!(
                "cannot shift a jet of order {} by {m}",
                self.order()
            )));
        }
        let scale = self.scale_f64();
        if let Some(n) = (0..m).find(|&n| !self.coeffs[n].is_negligible(scale)) {
            return Err(Error::Consistency(format!(
                "coefficient of z^{n} does not vanish before dividing by z^{m}: {:?}",
                self.coeffs[n]
            )));
        }
        Ok(TruncatedSeries {
            coeffs: self.coeffs[m..].to_vec(),
        })
    }

    /// `exp(self)`; requires a vanishing constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_negligible(self.scale_f64().max(1.0)) {
            return Err(Error::Domain("series exp needs s(0) = 0".into()));
        }
        let d = self.order();
        // e' = s' e  =>  n e_n = sum_k k s_k e_{n-k}
        let mut e = vec![T::one()];
        for n in 1..=d {
            let mut acc = T::zero();
            for k in 1..=n {
                acc = acc + T::from_i64(k as i64) * self.coeffs[k].clone() * e[n - k].clone();
            }
            e.push(acc / T::from_i64(n as i64));
        }
        Ok(TruncatedSeries { coeffs: e })
    }

    /// `log(self)`; requires constant term 1.
    pub fn log(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone() - T::one();
        if !c0.is_negligible(1.0) {
            return Err(Error::Domain("series log needs s(0) = 1".into()));
        }
        let d = self.order();
        // s l' = s'  =>  n l_n = n s_n - sum_{k<n} k l_k s_{n-k}
        let mut l = vec![T::zero()];
        for n in 1..=d {
            let mut acc = T::from_i64(n as i64) * self.coeffs[n].clone();
            for k in 1..n {
                acc = acc - T::from_i64(k as i64) * l[k].clone() * self.coeffs[n - k].clone();
            }
            l.push(acc / T::from_i64(n as i64));
        }
        Ok(TruncatedSeries { coeffs: l })
    }
}

impl<T: Scalar> Add for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn add(self, rhs: Self) -> TruncatedSeries<T> {
        self.check_order(rhs);
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn sub(self, rhs: Self) -> TruncatedSeries<T> {
        self.check_order(rhs);
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn mul(self, rhs: Self) -> TruncatedSeries<T> {
        self.check_order(rhs);
        TruncatedSeries {
            coeffs: truncated_product(&self.coeffs, &rhs.coeffs, self.order() + 1),
        }
    }
}

impl<T: Scalar> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> TruncatedSeries<T> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet")?;
        f.debug_list().entries(&self.coeffs).finish()
    }
}

/// First `len` coefficients of `a * b`.
fn truncated_product<T: Scalar>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// First `len` coefficients of `a / b`, `b[0]` invertible.
fn series_quotient<T: Scalar>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let inv = T::one() / b[0].clone();
    let mut q: Vec<T> = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = a.get(n).cloned().unwrap_or_else(T::zero);
        for k in 1..=n.min(b.len() - 1) {
            if !b[k].is_zero() {
                acc = acc - b[k].clone() * q[n - k].clone();
            }
        }
        q.push(acc * inv.clone());
    }
    q
}

fn poly_product<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    truncated_product(a, b, a.len() + b.len() - 1)
}

fn poly_sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(T::zero);
            let y = b.get(i).cloned().unwrap_or_else(T::zero);
            x - y
        })
        .collect()
}

fn poly_trim<T: Scalar>(mut a: Vec<T>) -> Vec<T> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

/// Quotient of polynomials known to divide exactly (long division from the top).
fn poly_exact_div<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let b = poly_trim(b.to_vec());
    let mut rem = poly_trim(a.to_vec());
    if rem.len() < b.len() {
        return Vec::new();
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![T::zero(); rem.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let c = rem[k + b.len() - 1].clone() / lead.clone();
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] = rem[k + j].clone() - c.clone() * bj.clone();
        }
        q[k] = c;
    }
    if T::EXACT {
        debug_assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    }
    q
}

/// Determinant of a square matrix of jets of a common order `D`, to order `D`.
///
/// When every elimination step finds a pivot with an invertible constant
/// term, the computation stays in jets of order `D` (fraction-free Bareiss
/// for exact scalars, partial pivoting on constant terms for floats).
/// Otherwise the entries are treated as polynomials and eliminated by Bareiss
/// with exact polynomial division, so no precision is lost to pivots that
/// vanish at `z = 0`.
pub fn series_det<T: Scalar>(m: &[Vec<TruncatedSeries<T>>]) -> Result<TruncatedSeries<T>> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(argument("series_det needs a square matrix"));
    }
    if n == 0 {
        return Err(argument("series_det of an empty matrix"));
    }
    let d = m[0][0].order();
    if m.iter().flatten().any(|s| s.order() != d) {
        return Err(argument("series_det entries have different orders"));
    }
    let result = if T::EXACT {
        bareiss_truncated(m, d)
    } else {
        gauss_truncated(m, d)
    };
    Ok(match result {
        Some(det) => det,
        None => bareiss_polynomial(m, d),
    })
}

fn constant_scale<T: Scalar>(m: &[Vec<Vec<T>>]) -> f64 {
    m.iter()
        .flatten()
        .map(|s| s[0].as_f64().abs())
        .fold(0.0, f64::max)
}

fn bareiss_truncated<T: Scalar>(m: &[Vec<TruncatedSeries<T>>], d: usize) -> Option<TruncatedSeries<T>> {
    let n = m.len();
    let len = d + 1;
    let mut a: Vec<Vec<Vec<T>>> = m
        .iter()
        .map(|row| row.iter().map(|s| s.coeffs.clone()).collect())
        .collect();
    let mut sign = false;
    let mut prev: Vec<T> = vec![T::one()];
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k][0].is_zero())?;
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = poly_sub(
                    &truncated_product(&a[k][k], &a[i][j], len),
                    &truncated_product(&a[i][k], &a[k][j], len),
                );
                a[i][j] = series_quotient(&num, &prev, len);
            }
        }
        prev = a[k][k].clone();
    }
    let det = TruncatedSeries { coeffs: prev };
    Some(if sign { -&det } else { det })
}

fn gauss_truncated<T: Scalar>(m: &[Vec<TruncatedSeries<T>>], d: usize) -> Option<TruncatedSeries<T>> {
    let n = m.len();
    let len = d + 1;
    let mut a: Vec<Vec<Vec<T>>> = m
        .iter()
        .map(|row| row.iter().map(|s| s.coeffs.clone()).collect())
        .collect();
    let scale = constant_scale(&a);
    let mut det = vec![T::one()];
    det.resize(len, T::zero());
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| {
            a[x][k][0]
                .as_f64()
                .abs()
                .total_cmp(&a[y][k][0].as_f64().abs())
        })?;
        if a[p][k][0].is_negligible(scale) {
            return None;
        }
        if p != k {
            a.swap(p, k);
            det = det.into_iter().map(|c| -c).collect();
        }
        det = truncated_product(&det, &a[k][k], len);
        for i in k + 1..n {
            let f = series_quotient(&a[i][k], &a[k][k], len);
            for j in k + 1..n {
                let v = poly_sub(&a[i][j], &truncated_product(&f, &a[k][j], len));
                a[i][j] = v;
            }
        }
    }
    Some(TruncatedSeries { coeffs: det })
}

fn bareiss_polynomial<T: Scalar>(m: &[Vec<TruncatedSeries<T>>], d: usize) -> TruncatedSeries<T> {
    let n = m.len();
    let mut a: Vec<Vec<Vec<T>>> = m
        .iter()
        .map(|row| row.iter().map(|s| poly_trim(s.coeffs.clone())).collect())
        .collect();
    let low = |p: &Vec<T>| p.iter().position(|c| !c.is_zero());
    let mut sign = false;
    let mut prev: Vec<T> = vec![T::one()];
    for k in 0..n {
        let pivot = (k..n)
            .filter_map(|r| low(&a[r][k]).map(|v| (v, r)))
            .min_by_key(|&(v, _)| v);
        let Some((_, p)) = pivot else {
            return TruncatedSeries::zero(d);
        };
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = poly_sub(
                    &poly_product(&a[k][k], &a[i][j]),
                    &poly_product(&a[i][k], &a[k][j]),
                );
                a[i][j] = poly_trim(poly_exact_div(&num, &prev));
            }
        }
        prev = a[k][k].clone();
    }
    let det = TruncatedSeries::from_poly(prev, d);
    if sign {
        -&det
    } else {
        det
    }
}

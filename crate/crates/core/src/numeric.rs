//! Scalar abstractions shared by the exact and floating-point code paths.
//!
//! [`Scalar`] is a field element (exact rationals, `f64`, or [`HighFloat`]);
//! [`Real`] adds ordering and `exp` for the transcendental HCIZ evaluations.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact (rationals); governs zero tests and pivoting.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn as_f64(&self) -> f64;

    /// Zero test relative to `scale`: exact comparison in exact mode,
    /// `|x| <= 1e-12 * scale` otherwise.
    fn is_negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.as_f64().abs() <= 1e-12 * scale
        }
    }
}

pub trait Real: Scalar + PartialOrd {
    fn from_f64(v: f64) -> Self;
    fn exp(&self) -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

// ---------------------------------------------------------------------------
// Extended precision floats
// ---------------------------------------------------------------------------

const RM: RoundingMode = RoundingMode::ToEven;

/// Default working precision for [`HighFloat`], in significant decimal digits.
pub const DEFAULT_DIGITS: u32 = 34;

thread_local! {
    static WORK_BITS: Cell<usize> = Cell::new(digits_to_bits(DEFAULT_DIGITS));
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn digits_to_bits(digits: u32) -> usize {
    // log2(10) ~ 3.3219; 32 guard bits, rounded up to whole 64-bit words.
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
    bits.div_ceil(64) * 64
}

/// Sets the working precision of [`HighFloat`] values created on this thread.
pub fn set_working_digits(digits: u32) {
    WORK_BITS.with(|b| b.set(digits_to_bits(digits.max(16))));
}

pub fn working_digits() -> u32 {
    let bits = WORK_BITS.with(|b| b.get());
    ((bits - 32) as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// Runs `f` with the given working precision on the current thread.
pub fn with_working_digits<T>(digits: u32, f: impl FnOnce() -> T) -> T {
    let saved = WORK_BITS.with(|b| b.get());
    set_working_digits(digits);
    let out = f();
    WORK_BITS.with(|b| b.set(saved));
    out
}

fn work_bits() -> usize {
    WORK_BITS.with(|b| b.get())
}

/// Arbitrary precision binary float; precision is taken from the thread's
/// working precision at construction and is the max of both operands in
/// binary operations.
#[derive(Clone)]
pub struct HighFloat(BigFloat);

impl HighFloat {
    fn bits(&self) -> usize {
        // zeros built from f64 report an empty mantissa
        self.0.mantissa_max_bit_len().unwrap_or(0).max(work_bits())
    }

    fn prec2(&self, other: &Self) -> usize {
        self.bits().max(other.bits())
    }

    pub fn parse_decimal(s: &str) -> Self {
        let p = work_bits();
        let v = CONSTS.with(|c| BigFloat::parse(s, Radix::Dec, p, RM, &mut c.borrow_mut()));
        HighFloat(v)
    }

    pub fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }

    pub fn ln(&self) -> Self {
        let p = self.bits();
        HighFloat(CONSTS.with(|c| self.0.ln(p, RM, &mut c.borrow_mut())))
    }
}

impl fmt::Debug for HighFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for HighFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for HighFloat {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for HighFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl Add for HighFloat {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let p = self.prec2(&rhs);
        HighFloat(self.0.add(&rhs.0, p, RM))
    }
}

impl Sub for HighFloat {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let p = self.prec2(&rhs);
        HighFloat(self.0.sub(&rhs.0, p, RM))
    }
}

impl Mul for HighFloat {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = self.prec2(&rhs);
        HighFloat(self.0.mul(&rhs.0, p, RM))
    }
}

impl Div for HighFloat {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let p = self.prec2(&rhs);
        HighFloat(self.0.div(&rhs.0, p, RM))
    }
}

impl Neg for HighFloat {
    type Output = Self;
    fn neg(self) -> Self {
        HighFloat(self.0.neg())
    }
}

impl Zero for HighFloat {
    fn zero() -> Self {
        HighFloat(BigFloat::from_i64(0, work_bits()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for HighFloat {
    fn one() -> Self {
        HighFloat(BigFloat::from_i64(1, work_bits()))
    }
}

impl Scalar for HighFloat {
    const EXACT: bool = false;
    fn from_i64(v: i64) -> Self {
        HighFloat(BigFloat::from_i64(v, work_bits()))
    }
    fn from_rational(r: &BigRational) -> Self {
        let n = HighFloat::parse_decimal(&r.numer().to_string());
        let d = HighFloat::parse_decimal(&r.denom().to_string());
        n / d
    }
    fn as_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        format!("{}", self.0).parse::<f64>().unwrap_or(f64::NAN)
    }
    fn is_negligible(&self, scale: f64) -> bool {
        let eps = 2f64.powi(-(self.bits() as i32) + 40);
        self.as_f64().abs() <= eps * scale
    }
}

impl Real for HighFloat {
    fn from_f64(v: f64) -> Self {
        HighFloat(BigFloat::from_f64(v, work_bits()))
    }
    fn exp(&self) -> Self {
        let p = self.bits();
        HighFloat(CONSTS.with(|c| self.0.exp(p, RM, &mut c.borrow_mut())))
    }
    fn abs(&self) -> Self {
        HighFloat(self.0.abs())
    }
    fn sqrt(&self) -> Self {
        HighFloat(self.0.sqrt(self.bits(), RM))
    }
}

// ---------------------------------------------------------------------------
// Rational helpers
// ---------------------------------------------------------------------------

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Renders a rational as `"num/den"` (always with a denominator).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Argument(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Relative error `|x - y| / |y|`, falling back to the absolute error when `y == 0`.
pub fn relative_error(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        (x - y).abs()
    } else {
        ((x - y) / y).abs()
    }
}

/// Determinant by Gaussian elimination. Exact scalars pivot on the first
/// nonzero entry; floats use partial pivoting.
pub fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for col in 0..n {
        let pivot = if T::EXACT {
            (col..n).find(|&r| !m[r][col].is_zero())
        } else {
            (col..n)
                .filter(|&r| !m[r][col].is_zero())
                .max_by(|&a, &b| m[a][col].as_f64().abs().total_cmp(&m[b][col].as_f64().abs()))
        };
        let Some(p) = pivot else {
            return T::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det = det * piv.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / piv.clone();
            for c in col..n {
                let v = m[r][c].clone() - f.clone() * m[col][c].clone();
                m[r][c] = v;
            }
        }
    }
    det
}

/// Solves `A x = b` by Gaussian elimination; errors when `A` is singular.
pub fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Argument("solve: dimension mismatch".into()));
    }
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(|v| v.as_f64().abs()))
        .fold(0.0, f64::max);
    for col in 0..n {
        let pivot = if T::EXACT {
            (col..n).find(|&r| !a[r][col].is_zero())
        } else {
            (col..n).max_by(|&x, &y| a[x][col].as_f64().abs().total_cmp(&a[y][col].as_f64().abs()))
        };
        let p = match pivot {
            Some(p) if !a[p][col].is_negligible(scale) => p,
            _ => return Err(Error::Singular(format!("no pivot in column {col}"))),
        };
        a.swap(p, col);
        b.swap(p, col);
        let piv = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / piv.clone();
            for c in col..n {
                let v = a[r][c].clone() - f.clone() * a[col][c].clone();
                a[r][c] = v;
            }
            let v = b[r].clone() - f * b[col].clone();
            b[r] = v;
        }
    }
    Ok((0..n).map(|i| b[i].clone() / a[i][i].clone()).collect())
}

pub fn abs_rational(r: &BigRational) -> BigRational {
    r.abs()
}

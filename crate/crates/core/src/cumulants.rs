//! Free cumulants, the monotone Hurwitz combination `K_d`, and the classical
//! cumulants of the uniform distribution on `[0, 1]`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::combinat::{partitions_of, Partition};
use crate::error::{argument, Result};
use crate::hurwitz::HurwitzTable;
use crate::jets::TruncatedSeries;
use crate::numeric::{factorial, Scalar};

pub const MAX_FREE_ORDER: usize = 10;
pub const MAX_K_DEGREE: u32 = 6;
pub const MAX_UNIFORM_ORDER: usize = 20;

/// Moments `psi_1, ..., psi_D` of a probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector<T> {
    psi: Vec<T>,
}

impl<T: Scalar> MomentVector<T> {
    pub fn new(psi: Vec<T>) -> Result<Self> {
        if psi.is_empty() {
            return Err(argument("a moment vector needs at least psi_1"));
        }
        Ok(MomentVector { psi })
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// `psi_n`, 1-indexed.
    pub fn psi(&self, n: usize) -> &T {
        &self.psi[n - 1]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.psi
    }

    /// `psi_beta = prod_i psi_{beta_i}`.
    pub fn product(&self, beta: &Partition) -> Result<T> {
        beta.parts().iter().try_fold(T::one(), |acc, &part| {
            if part as usize > self.psi.len() {
                return Err(argument(format!("psi_{part} is not available")));
            }
            Ok(acc * self.psi(part as usize).clone())
        })
    }
}

/// Free cumulants `kappa_1..kappa_D`.
///
/// Uses the first-block decomposition of noncrossing partitions:
/// `psi_n = sum_s kappa_s [x^{n-s}] M(x)^s` with `M(x) = 1 + sum_k psi_k x^k`.
pub fn free_cumulants<T: Scalar>(m: &MomentVector<T>) -> Result<Vec<T>> {
    let d = m.len();
    if d > MAX_FREE_ORDER {
        return Err(argument(format!("at most {MAX_FREE_ORDER} moments are supported")));
    }
    let mut coeffs = vec![T::one()];
    coeffs.extend(m.as_slice().iter().cloned());
    let series = TruncatedSeries::new(coeffs)?;
    // powers[s] = M(x)^s to order d
    let mut powers = vec![TruncatedSeries::one(d)];
    for s in 1..d {
        let next = &powers[s - 1] * &series;
        powers.push(next);
    }
    let mut kappa: Vec<T> = Vec::with_capacity(d);
    for n in 1..=d {
        let mut value = m.psi(n).clone();
        for s in 1..n {
            value = value - kappa[s - 1].clone() * powers[s].coeff(n - s).clone();
        }
        kappa.push(value);
    }
    Ok(kappa)
}

/// `K_d = sum_{beta |- d} (-1)^{1 + l(beta)} H_0((d), beta) psi_beta`.
pub fn monotone_k<T: Scalar>(d: u32, m: &MomentVector<T>, table: &HurwitzTable) -> Result<T> {
    if d == 0 || d > MAX_K_DEGREE {
        return Err(argument(format!("K_d needs 1 <= d <= {MAX_K_DEGREE}")));
    }
    if m.len() < d as usize {
        return Err(argument(format!("K_{d} needs {d} moments, got {}", m.len())));
    }
    let top = Partition::single(d);
    let mut total = T::zero();
    for beta in partitions_of(d)? {
        let h = table.monotone_by_genus(0, &top, &beta)?;
        let term = T::from_i64(h as i64) * m.product(&beta)?;
        total = if beta.len() % 2 == 1 { total + term } else { total - term };
    }
    Ok(total)
}

/// Classical cumulants `c_1..c_D` of the uniform measure on `[0, 1]`:
/// `log((e^a - 1)/a) = sum_d c_d a^d / d!`.
pub fn uniform01_cumulants(order: usize) -> Result<Vec<BigRational>> {
    if order == 0 || order > MAX_UNIFORM_ORDER {
        return Err(argument(format!("order must lie in 1..={MAX_UNIFORM_ORDER}")));
    }
    // (e^a - 1)/a = sum_n a^n / (n + 1)!
    let coeffs = (0..=order)
        .map(|n| BigRational::new(BigInt::from(1), factorial(n as u32 + 1).into()))
        .collect();
    let log = TruncatedSeries::new(coeffs)?.log()?;
    Ok((1..=order)
        .map(|d| log.coeff(d) * BigRational::from_integer(factorial(d as u32).into()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{catalan, noncrossing_partitions};
    use crate::numeric::rat;
    use num_traits::{One, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mv(v: Vec<BigRational>) -> MomentVector<BigRational> {
        MomentVector::new(v).unwrap()
    }

    /// psi_n from free cumulants by summing over all noncrossing partitions.
    fn moments_from_cumulants(kappa: &[BigRational]) -> Vec<BigRational> {
        (1..=kappa.len())
            .map(|n| {
                noncrossing_partitions(n)
                    .unwrap()
                    .iter()
                    .map(|pi| pi.block_sizes().map(|s| kappa[s - 1].clone()).product::<BigRational>())
                    .sum()
            })
            .collect()
    }

    fn random_rationals(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
        (0..n)
            .map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=7)))
            .collect()
    }

    #[test]
    fn free_cumulant_examples() {
        let (p1, p2) = (rat(3, 2), rat(7, 5));
        assert_eq!(free_cumulants(&mv(vec![p1.clone()])).unwrap(), vec![p1.clone()]);
        let k = free_cumulants(&mv(vec![p1.clone(), p2.clone()])).unwrap();
        assert_eq!(k[1], &p2 - &p1 * &p1);
        let c = rat(-2, 3);
        let point: Vec<BigRational> = (1..=6).map(|n| num_traits::pow(c.clone(), n)).collect();
        let k = free_cumulants(&mv(point)).unwrap();
        assert_eq!(k[0], c);
        assert!(k[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn semicircle_has_single_cumulant() {
        let psi: Vec<BigRational> = (1..=10u64)
            .map(|n| if n % 2 == 0 { rat(catalan(n / 2) as i64, 1) } else { BigRational::zero() })
            .collect();
        let k = free_cumulants(&mv(psi)).unwrap();
        for (i, x) in k.iter().enumerate() {
            assert_eq!(x, &if i == 1 { BigRational::one() } else { BigRational::zero() });
        }
    }

    #[test]
    fn inversion_matches_noncrossing_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let kappa = random_rationals(&mut rng, 8);
            let psi = moments_from_cumulants(&kappa);
            assert_eq!(free_cumulants(&mv(psi)).unwrap(), kappa);
        }
    }

    #[test]
    fn monotone_k_examples() {
        let table = HurwitzTable::new(6, 8).unwrap();
        let psi = mv(vec![rat(1, 2), rat(1, 3), rat(1, 4)]);
        let (p1, p2, p3) = (psi.psi(1).clone(), psi.psi(2).clone(), psi.psi(3).clone());
        assert_eq!(monotone_k(1, &psi, &table).unwrap(), p1);
        assert_eq!(monotone_k(2, &psi, &table).unwrap(), &p2 - &p1 * &p1);
        let expected = rat(2, 1) * (&p3 - rat(3, 1) * &p1 * &p2 + rat(2, 1) * &p1 * &p1 * &p1);
        assert_eq!(monotone_k(3, &psi, &table).unwrap(), expected);
    }

    #[test]
    fn monotone_k_is_scaled_free_cumulant() {
        let table = HurwitzTable::new(6, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let psi = mv(random_rationals(&mut rng, 6));
            let kappa = free_cumulants(&psi).unwrap();
            for d in 1..=6u32 {
                let scale = BigRational::from_integer(factorial(d - 1).into());
                assert_eq!(monotone_k(d, &psi, &table).unwrap(), scale * &kappa[d as usize - 1]);
            }
        }
    }

    #[test]
    fn uniform_cumulant_values() {
        let c = uniform01_cumulants(20).unwrap();
        assert_eq!(c[0], rat(1, 2));
        assert_eq!(c[1], rat(1, 12));
        assert_eq!(c[2], BigRational::zero());
        assert_eq!(c[3], rat(-1, 120));
        for d in (3..=20).step_by(2) {
            assert!(c[d - 1].is_zero(), "c_{d}");
        }
        assert!(uniform01_cumulants(21).is_err());
    }
}

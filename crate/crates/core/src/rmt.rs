//! GUE sampling, Hermitian eigenvalues, and two-sample comparison of
//! eigenvalue-like vectors.
//!
//! The GUE here has `log E[exp Tr(AX)] = Tr(A^2) / 2`: standard normal
//! diagonal, off-diagonal real and imaginary parts of variance `1/2`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{argument, Error, Result};
use crate::seed::{replicate_rng, rng_from_seed};

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// A `k x k` Hermitian matrix stored as its real diagonal and strict lower
/// triangle, so Hermitian symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    k: usize,
    diag: Vec<f64>,
    // entry (i, j), i > j, at i(i-1)/2 + j
    lower: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn new(diag: Vec<f64>, lower: Vec<Complex64>) -> Result<Self> {
        let k = diag.len();
        if k == 0 {
            return Err(argument("a Hermitian matrix needs k >= 1"));
        }
        if lower.len() != k * (k - 1) / 2 {
            return Err(argument(format!(
                "a {k}x{k} matrix has {} strictly lower entries, got {}",
                k * (k - 1) / 2,
                lower.len()
            )));
        }
        Ok(HermitianMatrix { k, diag, lower })
    }

    /// From dense rows; the input must be exactly Hermitian.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(argument("matrix rows must all have length k"));
        }
        let mut diag = Vec::with_capacity(k);
        let mut lower = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        for i in 0..k {
            if rows[i][i].im != 0.0 {
                return Err(argument(format!("diagonal entry {i} is not real")));
            }
            diag.push(rows[i][i].re);
            for j in 0..i {
                if rows[i][j] != rows[j][i].conj() {
                    return Err(argument(format!("entries ({i},{j}) and ({j},{i}) are not conjugate")));
                }
                lower.push(rows[i][j]);
            }
        }
        HermitianMatrix::new(diag, lower)
    }

    /// From a real symmetric matrix given by its rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        HermitianMatrix::from_rows(&complex)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Complex64::new(self.diag[i], 0.0),
            std::cmp::Ordering::Greater => self.lower[i * (i - 1) / 2 + j],
            std::cmp::Ordering::Less => self.lower[j * (j - 1) / 2 + i].conj(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// `Tr(H^2) = sum |h_ij|^2`.
    pub fn frobenius_sq(&self) -> f64 {
        self.diag.iter().map(|d| d * d).sum::<f64>() + 2.0 * self.lower.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.k, self.k, |i, j| self.get(i, j))
    }

    /// `U H U*`, keeping the lower triangle of the product.
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != self.k || u.ncols() != self.k {
            return Err(argument("conjugating matrix has the wrong size"));
        }
        let m = u * self.to_dmatrix() * u.adjoint();
        let diag = (0..self.k).map(|i| m[(i, i)].re).collect();
        let lower = (0..self.k).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect();
        HermitianMatrix::new(diag, lower)
    }
}

pub fn sample_gue_with(k: usize, rng: &mut impl Rng) -> Result<HermitianMatrix> {
    if k == 0 {
        return Err(argument("GUE size must be at least 1"));
    }
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let diag = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let lower = (0..k * (k - 1) / 2)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(half * re, half * im)
        })
        .collect();
    HermitianMatrix::new(diag, lower)
}

pub fn sample_gue(k: usize, seed: u64) -> Result<HermitianMatrix> {
    sample_gue_with(k, &mut rng_from_seed(seed))
}

/// Eigenvalues in decreasing order.
pub fn eigenvalues_sorted(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let eig = h
        .to_dmatrix()
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numeric(format!("eigensolver did not converge in {EIGEN_MAX_ITER} sweeps")))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `count` sorted GUE eigenvalue vectors; replicate `i` uses stream `i` of `seed`.
pub fn gue_eigenvalue_samples(k: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    (0..count)
        .into_par_iter()
        .map(|i| eigenvalues_sorted(&sample_gue_with(k, &mut replicate_rng(seed, i as u64))?))
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov tail `Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = (-2.0 * j * j * lambda * lambda).exp();
        sum += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Statistic and asymptotic p-value of the two-sample KS test, with the
/// effective size correction `(sqrt(n) + 0.12 + 0.11 / sqrt(n)) D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d = ks_statistic(a, b);
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    let root = ne.sqrt();
    (d, kolmogorov_q((root + 0.12 + 0.11 / root) * d))
}

/// Pearson chi-square p-value of `counts` against cell probabilities `probs`.
pub fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let dof = (counts.len() - 1).max(1) as f64;
    1.0 - ChiSquared::new(dof).expect("positive degrees of freedom").cdf(stat)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateComparison {
    /// 1-based position in the sorted vectors.
    pub coordinate: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
}

/// Empirical mean of a power sum in both samples, with standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub power: u32,
    pub mean_a: f64,
    pub se_a: f64,
    pub mean_b: f64,
    pub se_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub k: usize,
    pub samples_a: usize,
    pub samples_b: usize,
    pub coordinates: Vec<CoordinateComparison>,
    pub moments: Vec<MomentComparison>,
}

impl ComparisonReport {
    pub fn min_p_value(&self) -> f64 {
        self.coordinates.iter().map(|c| c.p_value).fold(1.0, f64::min)
    }

    pub fn moment(&self, power: u32) -> Option<&MomentComparison> {
        self.moments.iter().find(|m| m.power == power)
    }
}

pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn check_dims(samples: &[Vec<f64>], k: usize, name: &str) -> Result<()> {
    match samples.iter().position(|v| v.len() != k) {
        Some(i) => Err(argument(format!("sample {name}[{i}] has dimension {} instead of {k}", samples[i].len()))),
        None => Ok(()),
    }
}

/// Per-coordinate KS comparison and power-sum means `E[p_1]`, `E[p_2]`.
pub fn compare_samples(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<ComparisonReport> {
    if a.is_empty() || b.is_empty() {
        return Err(argument("both samples must be nonempty"));
    }
    let k = a[0].len();
    if k == 0 {
        return Err(argument("sample vectors must be nonempty"));
    }
    check_dims(a, k, "A")?;
    check_dims(b, k, "B")?;
    let coordinates = (0..k)
        .map(|l| {
            let xa: Vec<f64> = a.iter().map(|v| v[l]).collect();
            let xb: Vec<f64> = b.iter().map(|v| v[l]).collect();
            let (ks_statistic, p_value) = ks_two_sample(&xa, &xb);
            CoordinateComparison {
                coordinate: l + 1,
                ks_statistic,
                p_value,
            }
        })
        .collect();
    let moments = [1u32, 2]
        .into_iter()
        .map(|power| {
            let pa: Vec<f64> = a.iter().map(|v| v.iter().map(|x| x.powi(power as i32)).sum()).collect();
            let pb: Vec<f64> = b.iter().map(|v| v.iter().map(|x| x.powi(power as i32)).sum()).collect();
            let (mean_a, se_a) = mean_and_se(&pa);
            let (mean_b, se_b) = mean_and_se(&pb);
            MomentComparison {
                power,
                mean_a,
                se_a,
                mean_b,
                se_b,
            }
        })
        .collect();
    Ok(ComparisonReport {
        k,
        samples_a: a.len(),
        samples_b: b.len(),
        coordinates,
        moments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    #[test]
    fn eigenvalue_examples() {
        let h = HermitianMatrix::from_real_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]]).unwrap();
        let e = eigenvalues_sorted(&h).unwrap();
        for (x, y) in e.iter().zip([3.0, 2.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        let h = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = eigenvalues_sorted(&h).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] + 1.0).abs() < 1e-12);
        // [[1, i], [-i, 1]] has eigenvalues 2 and 0
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let h = HermitianMatrix::from_rows(&[vec![one, i], vec![-i, one]]).unwrap();
        let e = eigenvalues_sorted(&h).unwrap();
        assert!((e[0] - 2.0).abs() < 1e-12 && e[1].abs() < 1e-12);
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        assert!(HermitianMatrix::from_rows(&[vec![one, i], vec![i, one]]).is_err());
        assert!(HermitianMatrix::from_rows(&[vec![i]]).is_err());
        assert!(HermitianMatrix::new(vec![], vec![]).is_err());
        assert!(HermitianMatrix::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(sample_gue(0, 1).is_err());
    }

    #[test]
    fn eigenvalue_invariants_on_random_matrices() {
        for seed in 0..50 {
            let h = sample_gue(1 + seed as usize % 7, seed).unwrap();
            let e = eigenvalues_sorted(&h).unwrap();
            assert!(e.windows(2).all(|w| w[0] >= w[1]));
            assert!((e.iter().sum::<f64>() - h.trace()).abs() < 1e-9);
            assert!((e.iter().map(|x| x * x).sum::<f64>() - h.frobenius_sq()).abs() < 1e-9);
            let m = h.to_dmatrix();
            let eig = m.clone().symmetric_eigen();
            let residual = &m * &eig.eigenvectors - &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(v, 0.0)));
            assert!(residual.norm() < 1e-10);
        }
    }

    #[test]
    fn gue_is_deterministic_per_seed() {
        assert_eq!(sample_gue(4, 9).unwrap(), sample_gue(4, 9).unwrap());
        assert_ne!(sample_gue(4, 9).unwrap(), sample_gue(4, 10).unwrap());
        assert_eq!(gue_eigenvalue_samples(3, 20, 5).unwrap(), gue_eigenvalue_samples(3, 20, 5).unwrap());
    }

    #[test]
    fn gue_entry_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let scalars: Vec<f64> = (0..n).map(|_| sample_gue_with(1, &mut rng).unwrap().trace()).collect();
        let (mean, _) = mean_and_se(&scalars);
        let var = scalars.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((0.97..=1.03).contains(&var), "variance {var}");
        let draws: Vec<HermitianMatrix> = (0..n).map(|_| sample_gue_with(3, &mut rng).unwrap()).collect();
        let (tr2, _) = mean_and_se(&draws.iter().map(|h| h.frobenius_sq()).collect::<Vec<_>>());
        assert!((tr2 - 9.0).abs() < 0.18, "E Tr X^2 = {tr2}");
        let (tr, se) = mean_and_se(&draws.iter().map(|h| h.trace()).collect::<Vec<_>>());
        assert!(tr.abs() < 3.0 * se, "E Tr X = {tr} with se {se}");
    }

    #[test]
    fn ordered_eigenvalue_means_have_expected_signs() {
        for k in 2..=4 {
            let e = gue_eigenvalue_samples(k, 2000, k as u64).unwrap();
            let top = mean_and_se(&e.iter().map(|v| v[0]).collect::<Vec<_>>()).0;
            let bottom = mean_and_se(&e.iter().map(|v| v[k - 1]).collect::<Vec<_>>()).0;
            assert!(top > 0.0 && bottom < 0.0);
        }
    }

    #[test]
    fn spectrum_law_is_unitarily_invariant() {
        let k = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let z = DMatrix::from_fn(k, k, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let u = z.qr().q();
        assert!((&u * u.adjoint() - DMatrix::identity(k, k)).norm() < 1e-12);
        let n = 10_000;
        let plain = gue_eigenvalue_samples(k, n, 1).unwrap();
        let rotated: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let h = sample_gue_with(k, &mut replicate_rng(2, i as u64)).unwrap();
                eigenvalues_sorted(&h.conjugate_by(&u).unwrap()).unwrap()
            })
            .collect();
        let report = compare_samples(&plain, &rotated).unwrap();
        assert!(report.min_p_value() > 0.001, "{report:?}");
        // the same draws, conjugated, keep their spectrum
        let h = sample_gue(k, 3).unwrap();
        let a = eigenvalues_sorted(&h).unwrap();
        let b = eigenvalues_sorted(&h.conjugate_by(&u).unwrap()).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
    }

    #[test]
    fn ks_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<Vec<f64>> = (0..500).map(|_| normals(&mut rng, 2)).collect();
        let report = compare_samples(&a, &a).unwrap();
        assert!(report.coordinates.iter().all(|c| c.ks_statistic == 0.0 && c.p_value == 1.0));
        assert_eq!(ks_statistic(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert_eq!(ks_statistic(&[1.0, 3.0], &[2.0, 4.0]), 0.5);
        // tabulated Kolmogorov quantiles
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-4);
        assert!((kolmogorov_q(1.9495) - 0.001).abs() < 1e-4);
    }

    #[test]
    fn ks_null_rejection_rate() {
        let trials = 200;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut small = 0;
        for _ in 0..trials {
            let a = normals(&mut rng, 10_000);
            let b = normals(&mut rng, 10_000);
            if ks_two_sample(&a, &b).1 <= 0.001 {
                small += 1;
            }
        }
        // about 0.2 rejections expected under the null
        assert!(small <= 1, "{small} rejections");
    }

    #[test]
    fn chi_square_examples() {
        assert!((chi_square_p(&[50, 50], &[0.5, 0.5]) - 1.0).abs() < 1e-12);
        // statistic 4 on one degree of freedom
        assert!((chi_square_p(&[60, 40], &[0.5, 0.5]) - 0.0455003).abs() < 1e-6);
    }

    #[test]
    fn compare_samples_errors_and_moments() {
        assert!(compare_samples(&[], &[vec![1.0]]).is_err());
        assert!(compare_samples(&[vec![1.0]], &[vec![1.0, 2.0]]).is_err());
        assert!(compare_samples(&[vec![1.0], vec![1.0, 2.0]], &[vec![1.0]]).is_err());
        let a = vec![vec![1.0, -1.0], vec![3.0, 1.0]];
        let r = compare_samples(&a, &a).unwrap();
        let p1 = r.moment(1).unwrap();
        let p2 = r.moment(2).unwrap();
        assert_eq!(p1.mean_a, 2.0);
        assert_eq!(p2.mean_a, 6.0);
        assert_eq!(p2.se_a, 4.0);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<ComparisonReport>(&json).unwrap(), r);
    }
}

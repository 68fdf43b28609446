use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::kernel::Kernel;
use crate::error::{Error, Result};
use crate::linalg;

/// Observed points in `[0,1]^d` with their (noisy) values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::invalid(format!(
                "dataset has {} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let mut data = Dataset::default();
        for (p, v) in points.into_iter().zip(values) {
            data.push(p, v)?;
        }
        Ok(data)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn push(&mut self, point: Vec<f64>, value: f64) -> Result<()> {
        check_unit_cube(&point)?;
        if let Some(first) = self.points.first() {
            if first.len() != point.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    actual: point.len(),
                });
            }
        }
        if !value.is_finite() {
            return Err(Error::invalid(format!("observation {value} is not finite")));
        }
        self.points.push(point);
        self.values.push(value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(Vec::len)
    }

    /// Median of the observed values; `None` when empty.
    pub fn median(&self) -> Option<f64> {
        if self.values.is_empty() {
            return None;
        }
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        Some(if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        })
    }

    /// Unbiased sample variance; zero for fewer than two values.
    pub fn sample_variance(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.values.iter().sum::<f64>() / n as f64;
        self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    }
}

pub(crate) fn check_unit_cube(x: &[f64]) -> Result<()> {
    match x.iter().position(|c| !(0.0..=1.0).contains(c)) {
        Some(index) => Err(Error::OutOfDomain {
            index,
            value: x[index],
        }),
        None => Ok(()),
    }
}

fn gram(kernel: &Kernel, points: &[Vec<f64>]) -> DMatrix<f64> {
    let n = points.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = kernel.k(&points[i], &points[i]);
        for j in 0..i {
            let v = kernel.k(&points[i], &points[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Cholesky of `K + η² I` with jitter escalation.
fn factor_gram(
    kernel: &Kernel,
    data: &Dataset,
    noise_var: f64,
) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let mut k = gram(kernel, data.points());
    for i in 0..k.nrows() {
        k[(i, i)] += noise_var;
    }
    linalg::cholesky_with_jitter(&k, kernel.scale).ok_or(Error::SingularGram {
        max_jitter: linalg::MAX_JITTER * kernel.scale,
    })
}

fn validate(kernel: &Kernel, data: &Dataset, noise_var: f64) -> Result<()> {
    if let Some(d) = data.dim() {
        if d != kernel.dim() {
            return Err(Error::DimensionMismatch {
                expected: kernel.dim(),
                actual: d,
            });
        }
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::invalid(format!(
            "noise variance must be non-negative, got {noise_var}"
        )));
    }
    Ok(())
}

/// A Gaussian process conditioned on a finite dataset. Immutable once built.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    kernel: Kernel,
    data: Dataset,
    noise_var: f64,
    mean_const: f64,
    chol: Option<Cholesky<f64, Dyn>>,
    /// `(K + η² I)⁻¹ (Y − m·1)`
    alpha: DVector<f64>,
    jitter: f64,
}

impl GpPosterior {
    /// Condition the constant-mean GP prior on `data`.
    pub fn condition(
        kernel: Kernel,
        data: Dataset,
        noise_var: f64,
        mean_const: f64,
    ) -> Result<Self> {
        validate(&kernel, &data, noise_var)?;
        if data.is_empty() {
            return Ok(GpPosterior {
                kernel,
                data,
                noise_var,
                mean_const,
                chol: None,
                alpha: DVector::zeros(0),
                jitter: 0.0,
            });
        }
        let (chol, jitter) = factor_gram(&kernel, &data, noise_var)?;
        let z = DVector::from_iterator(data.len(), data.values().iter().map(|y| y - mean_const));
        let alpha = chol.solve(&z);
        Ok(GpPosterior {
            kernel,
            data,
            noise_var,
            mean_const,
            chol: Some(chol),
            alpha,
            jitter,
        })
    }

    /// The prior: no observations.
    pub fn prior(kernel: Kernel, noise_var: f64, mean_const: f64) -> Result<Self> {
        Self::condition(kernel, Dataset::empty(), noise_var, mean_const)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn mean_const(&self) -> f64 {
        self.mean_const
    }

    /// Diagonal jitter that was needed to factor the Gram matrix.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// Re-condition on the current data plus `points` observed at `values`,
    /// keeping every hyperparameter.
    pub fn with_observations(&self, points: &[Vec<f64>], values: &[f64]) -> Result<Self> {
        let mut data = self.data.clone();
        for (p, v) in points.iter().zip(values) {
            data.push(p.clone(), *v)?;
        }
        Self::condition(self.kernel.clone(), data, self.noise_var, self.mean_const)
    }

    fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    fn cross(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.data.len(),
            self.data.points().iter().map(|p| self.kernel.k(x, p)),
        )
    }

    /// `K(data, candidates)`, an `n × m` matrix.
    fn cross_matrix(&self, candidates: &[Vec<f64>]) -> DMatrix<f64> {
        let n = self.data.len();
        DMatrix::from_fn(n, candidates.len(), |i, j| {
            self.kernel.k(&self.data.points()[i], &candidates[j])
        })
    }

    /// `L⁻¹ K(data, candidates)`.
    fn whitened(&self, candidates: &[Vec<f64>]) -> Option<DMatrix<f64>> {
        let chol = self.chol.as_ref()?;
        let kx = self.cross_matrix(candidates);
        Some(linalg::solve_lower(chol.l_dirty(), kx))
    }

    /// Posterior mean and variance at `x`.
    ///
    /// Panics if `x` has the wrong dimension; use [`Self::predict`] for a
    /// checked batch query.
    pub fn mean_var(&self, x: &[f64]) -> (f64, f64) {
        assert_eq!(x.len(), self.dim(), "query dimension mismatch");
        let prior = self.kernel.k(x, x);
        match &self.chol {
            None => (self.mean_const, prior),
            Some(chol) => {
                let k = self.cross(x);
                let mean = self.mean_const + k.dot(&self.alpha);
                let v = chol
                    .l_dirty()
                    .solve_lower_triangular(&k)
                    .expect("Cholesky factor has a positive diagonal");
                (mean, (prior - v.norm_squared()).max(0.0))
            }
        }
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        self.mean_var(x).0
    }

    pub fn variance(&self, x: &[f64]) -> f64 {
        self.mean_var(x).1
    }

    pub fn std_dev(&self, x: &[f64]) -> f64 {
        self.variance(x).sqrt()
    }

    /// Means and variances at every candidate.
    pub fn predict(&self, candidates: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
        for c in candidates {
            self.check_query(c)?;
        }
        let prior: Vec<f64> = candidates.iter().map(|c| self.kernel.k(c, c)).collect();
        let Some(v) = self.whitened(candidates) else {
            return Ok((vec![self.mean_const; candidates.len()], prior));
        };
        let kx = self.cross_matrix(candidates);
        let means = (0..candidates.len())
            .map(|j| self.mean_const + kx.column(j).dot(&self.alpha))
            .collect();
        let vars = (0..candidates.len())
            .map(|j| (prior[j] - v.column(j).norm_squared()).max(0.0))
            .collect();
        Ok((means, vars))
    }

    /// Posterior mean vector and cross-covariance matrix over `candidates`.
    pub fn mean_and_covariance(
        &self,
        candidates: &[Vec<f64>],
    ) -> Result<(DVector<f64>, DMatrix<f64>)> {
        for c in candidates {
            self.check_query(c)?;
        }
        let m = candidates.len();
        let mut cov = DMatrix::zeros(m, m);
        for j in 0..m {
            for i in j..m {
                let v = self.kernel.k(&candidates[i], &candidates[j]);
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        let mean = match &self.chol {
            None => DVector::from_element(m, self.mean_const),
            Some(chol) => {
                let kx = self.cross_matrix(candidates);
                let mean = kx.tr_mul(&self.alpha).add_scalar(self.mean_const);
                let v = linalg::solve_lower(chol.l_dirty(), kx.clone());
                cov -= v.transpose() * &v;
                mean
            }
        };
        // restore exact symmetry lost to rounding
        for i in 0..m {
            for j in 0..i {
                let s = 0.5 * (cov[(i, j)] + cov[(j, i)]);
                cov[(i, j)] = s;
                cov[(j, i)] = s;
            }
        }
        Ok((mean, cov))
    }

    /// One joint draw of the posterior process at `candidates`.
    pub fn sample_joint<R: Rng + ?Sized>(
        &self,
        candidates: &[Vec<f64>],
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        if candidates.is_empty() {
            return Err(Error::invalid("cannot sample on an empty candidate set"));
        }
        let (mean, cov) = self.mean_and_covariance(candidates)?;
        let l = linalg::sampling_factor(&cov, self.kernel.scale).ok_or(
            Error::NotPositiveSemiDefinite {
                size: candidates.len(),
                max_jitter: linalg::MAX_JITTER * self.kernel.scale,
            },
        )?;
        let z = DVector::from_iterator(
            candidates.len(),
            (0..candidates.len()).map(|_| rng.sample::<f64, _>(StandardNormal)),
        );
        Ok((mean + l * z).iter().copied().collect())
    }

    /// Log evidence of the conditioning data under this posterior's hyperparameters.
    pub fn log_marginal_likelihood(&self) -> Result<f64> {
        let chol = self.chol.as_ref().ok_or_else(|| {
            Error::invalid("log marginal likelihood needs at least one observation")
        })?;
        let z = DVector::from_iterator(
            self.data.len(),
            self.data.values().iter().map(|y| y - self.mean_const),
        );
        Ok(lml_from_parts(chol, &z, &self.alpha))
    }
}

fn lml_from_parts(chol: &Cholesky<f64, Dyn>, z: &DVector<f64>, alpha: &DVector<f64>) -> f64 {
    let n = z.len() as f64;
    -0.5 * z.dot(alpha) - 0.5 * linalg::log_det(chol) - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
}

/// `log p(Y | X, θ)` for a constant-mean GP.
pub fn log_marginal_likelihood(
    kernel: &Kernel,
    data: &Dataset,
    noise_var: f64,
    mean_const: f64,
) -> Result<f64> {
    validate(kernel, data, noise_var)?;
    if data.is_empty() {
        return Err(Error::invalid(
            "log marginal likelihood needs at least one observation",
        ));
    }
    let (chol, _) = factor_gram(kernel, data, noise_var)?;
    let z = DVector::from_iterator(data.len(), data.values().iter().map(|y| y - mean_const));
    let alpha = chol.solve(&z);
    Ok(lml_from_parts(&chol, &z, &alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_data_recovers_prior() {
        let k = Kernel::se(2, 0.3, 1.7).unwrap();
        let post = GpPosterior::prior(k, 0.1, 4.0).unwrap();
        let (m, v) = post.mean_var(&[0.2, 0.9]);
        assert_eq!(m, 4.0);
        assert_eq!(v, 1.7);
    }

    #[test]
    fn single_observation_closed_form() {
        let k = Kernel::se(1, 0.5, 1.0).unwrap();
        let data = Dataset::new(vec![vec![0.3]], vec![2.0]).unwrap();
        let post = GpPosterior::condition(k, data, 1.0, 0.0).unwrap();
        let (m, v) = post.mean_var(&[0.3]);
        assert!((m - 1.0).abs() < 1e-14);
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn scalar_log_marginal_likelihood() {
        let k = Kernel::se(1, 0.5, 1.0).unwrap();
        let data = Dataset::new(vec![vec![0.5]], vec![0.0]).unwrap();
        let lml = log_marginal_likelihood(&k, &data, 1.0, 0.0).unwrap();
        assert!((lml - (-0.5 * (4.0 * std::f64::consts::PI).ln())).abs() < 1e-14);
        assert!((lml + 1.26551).abs() < 1e-5);

        // zero residual at a non-zero mean gives the same value
        let data = Dataset::new(vec![vec![0.5]], vec![3.0]).unwrap();
        let lml2 = log_marginal_likelihood(&k, &data, 1.0, 3.0).unwrap();
        assert!((lml - lml2).abs() < 1e-14);
    }

    #[test]
    fn lml_on_empty_data_is_an_error() {
        let k = Kernel::se(1, 0.5, 1.0).unwrap();
        assert!(log_marginal_likelihood(&k, &Dataset::empty(), 1.0, 0.0).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![vec![0.1]], vec![]).is_err());
        assert!(matches!(
            Dataset::new(vec![vec![1.2]], vec![0.0]),
            Err(Error::OutOfDomain { index: 0, .. })
        ));
        assert!(Dataset::new(vec![vec![0.1], vec![0.1, 0.2]], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        let d = Dataset::new(vec![vec![0.0]; 3], vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.median(), Some(2.0));
        let d = Dataset::new(vec![vec![0.0]; 4], vec![3.0, 1.0, 2.0, 10.0]).unwrap();
        assert_eq!(d.median(), Some(2.5));
    }

    #[test]
    fn zero_variance_candidate_samples_its_mean() {
        let k = Kernel::se(1, 0.3, 1.0).unwrap();
        let data = Dataset::new(vec![vec![0.4]], vec![1.5]).unwrap();
        let post = GpPosterior::condition(k, data, 0.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let s = post.sample_joint(&[vec![0.4]], &mut rng).unwrap();
            assert!((s[0] - post.mean(&[0.4])).abs() < 1e-6);
            assert!((s[0] - 1.5).abs() < 1e-6);
        }
    }

    #[test]
    fn sample_joint_is_reproducible() {
        let k = Kernel::se(2, 0.3, 1.0).unwrap();
        let data = Dataset::new(vec![vec![0.1, 0.2], vec![0.8, 0.5]], vec![1.0, -1.0]).unwrap();
        let post = GpPosterior::condition(k, data, 0.01, 0.0).unwrap();
        let cands: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 29.0, 0.5]).collect();
        let a = post
            .sample_joint(&cands, &mut ChaCha8Rng::seed_from_u64(9))
            .unwrap();
        let b = post
            .sample_joint(&cands, &mut ChaCha8Rng::seed_from_u64(9))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_noiseless_points_need_jitter() {
        let k = Kernel::se(1, 0.3, 1.0).unwrap();
        let data = Dataset::new(vec![vec![0.5], vec![0.5]], vec![1.0, 1.0]).unwrap();
        let post = GpPosterior::condition(k, data, 0.0, 0.0).unwrap();
        assert!(post.jitter() > 0.0);
        assert!((post.mean(&[0.5]) - 1.0).abs() < 1e-6);
    }
}

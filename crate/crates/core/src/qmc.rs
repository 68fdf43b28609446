//! Quasi-uniform point sets on the unit cube.
//!
//! Uses the Kronecker sequence built on the generalised golden ratio
//! (the unique positive root of `x^(d+1) = x + 1`), which stays well spread
//! in high dimension where Halton bases start to correlate. A random shift
//! modulo one (Cranley-Patterson rotation) makes each set seeded but
//! unbiased.

use rand::Rng;

/// Additive recurrence generator for `dim` dimensions.
#[derive(Debug, Clone)]
pub struct Kronecker {
    alpha: Vec<f64>,
    shift: Vec<f64>,
}

impl Kronecker {
    pub fn new(dim: usize) -> Self {
        let phi = generalised_golden_ratio(dim);
        let alpha = (0..dim)
            .map(|i| (1.0 / phi).powi(i as i32 + 1).fract())
            .collect();
        Kronecker {
            alpha,
            shift: vec![0.5; dim],
        }
    }

    /// Same sequence, rotated by a uniform random shift.
    pub fn shifted<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut k = Self::new(dim);
        for s in &mut k.shift {
            *s = rng.random::<f64>();
        }
        k
    }

    pub fn point(&self, n: usize) -> Vec<f64> {
        self.alpha
            .iter()
            .zip(&self.shift)
            .map(|(a, s)| (s + a * n as f64).fract())
            .collect()
    }

    pub fn points(&self, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|n| self.point(n)).collect()
    }
}

fn generalised_golden_ratio(dim: usize) -> f64 {
    let p = dim as f64 + 1.0;
    let mut x = 2.0_f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / p);
    }
    x
}

/// `count` seeded quasi-uniform points in `[0,1]^dim`.
pub fn candidate_set<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    Kronecker::shifted(dim, rng).points(count)
}

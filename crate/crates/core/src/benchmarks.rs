//! Synthetic objectives on `[0,1]^d`, all posed as maximisation problems.
//!
//! | id             | d  | natural domain                  | base formula (natural coordinates)                              |
//! |----------------|----|---------------------------------|-----------------------------------------------------------------|
//! | `branin`       | 2  | `[-5,10] × [0,15]`              | `−[(x₂ − 5.1x₁²/4π² + 5x₁/π − 6)² + 10(1 − 1/8π)cos x₁ + 10]`    |
//! | `currin_exp`   | 2  | `[0,1]²`                        | `(1 − e^{−1/2x₂})(2300x₁³+1900x₁²+2092x₁+60)/(100x₁³+500x₁²+4x₁+20)` |
//! | `hartmann3`    | 3  | `[0,1]³`                        | `Σᵢ αᵢ exp(−Σⱼ Aᵢⱼ(xⱼ − Pᵢⱼ)²)`                                  |
//! | `park1`        | 4  | `[0,1]⁴`                        | `x₁/2 (√(1 + (x₂+x₃²)x₄/x₁²) − 1) + (x₁+3x₄) e^{1+sin x₃}`        |
//! | `park2`        | 4  | `[0,1]⁴`                        | `⅔ e^{x₁+x₂} − x₄ sin x₃ + x₃`                                  |
//! | `hartmann6`    | 6  | `[0,1]⁶`                        | as `hartmann3` with the 6-d constants                            |
//! | `hartmann12`   | 12 | `[0,1]¹²`                       | `hartmann6(x₁..₆) + hartmann6(x₇..₁₂)`                           |
//! | `park2_16`     | 16 | `[0,1]¹⁶`                       | `park2` on four consecutive 4-blocks, summed                     |
//! | `currin_exp14` | 14 | `[0,1]¹⁴`                       | `currin_exp` on seven consecutive 2-blocks, summed               |
//! | `hartmann18`   | 18 | `[0,1]¹⁸`                       | `hartmann6` on three consecutive 6-blocks, summed                |
//!
//! Branin is the only benchmark whose natural domain is not the unit cube;
//! `x₁ = −5 + 15u₁`, `x₂ = 15u₂`. Branin and Hartmann are classical
//! minimisation problems and appear here negated (Hartmann's usual form is
//! `−Σ...`, so its maximisation form drops the sign). Currin-exponential and
//! the Park functions are used in their maximisation form directly.
//!
//! Park1 is evaluated through the algebraically equal
//! `½(√(x₁² + (x₂+x₃²)x₄) − x₁)` so that `x₁ = 0` is well defined.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::check_unit_cube;
use crate::qmc::Kronecker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkId {
    Branin,
    CurrinExp,
    Hartmann3,
    Park1,
    Park2,
    Hartmann6,
    Hartmann12,
    #[serde(rename = "park2_16")]
    Park2_16,
    #[serde(rename = "currin_exp14")]
    CurrinExp14,
    Hartmann18,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 10] = [
        BenchmarkId::Branin,
        BenchmarkId::CurrinExp,
        BenchmarkId::Hartmann3,
        BenchmarkId::Park1,
        BenchmarkId::Park2,
        BenchmarkId::Hartmann6,
        BenchmarkId::Hartmann12,
        BenchmarkId::Park2_16,
        BenchmarkId::CurrinExp14,
        BenchmarkId::Hartmann18,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::Branin => "branin",
            BenchmarkId::CurrinExp => "currin_exp",
            BenchmarkId::Hartmann3 => "hartmann3",
            BenchmarkId::Park1 => "park1",
            BenchmarkId::Park2 => "park2",
            BenchmarkId::Hartmann6 => "hartmann6",
            BenchmarkId::Hartmann12 => "hartmann12",
            BenchmarkId::Park2_16 => "park2_16",
            BenchmarkId::CurrinExp14 => "currin_exp14",
            BenchmarkId::Hartmann18 => "hartmann18",
        }
    }

    /// Base function and how many disjoint copies are summed.
    fn composition(self) -> (Base, usize) {
        match self {
            BenchmarkId::Branin => (Base::Branin, 1),
            BenchmarkId::CurrinExp => (Base::CurrinExp, 1),
            BenchmarkId::Hartmann3 => (Base::Hartmann3, 1),
            BenchmarkId::Park1 => (Base::Park1, 1),
            BenchmarkId::Park2 => (Base::Park2, 1),
            BenchmarkId::Hartmann6 => (Base::Hartmann6, 1),
            BenchmarkId::Hartmann12 => (Base::Hartmann6, 2),
            BenchmarkId::Park2_16 => (Base::Park2, 4),
            BenchmarkId::CurrinExp14 => (Base::CurrinExp, 7),
            BenchmarkId::Hartmann18 => (Base::Hartmann6, 3),
        }
    }

    pub fn dim(self) -> usize {
        let (base, copies) = self.composition();
        base.dim() * copies
    }

    /// Observation noise standard deviation used in the experiments.
    pub fn default_noise_sd(self) -> f64 {
        match self {
            BenchmarkId::Branin
            | BenchmarkId::CurrinExp
            | BenchmarkId::Hartmann3
            | BenchmarkId::Park1
            | BenchmarkId::Park2
            | BenchmarkId::Hartmann6 => 0.2,
            BenchmarkId::Hartmann12
            | BenchmarkId::Park2_16
            | BenchmarkId::CurrinExp14
            | BenchmarkId::Hartmann18 => 1.0,
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BenchmarkId::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown benchmark `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Base {
    Branin,
    CurrinExp,
    Hartmann3,
    Park1,
    Park2,
    Hartmann6,
}

const H_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

const H3_A: [[f64; 3]; 4] = [
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
];
const H3_P: [[f64; 3]; 4] = [
    [0.3689, 0.1170, 0.2673],
    [0.4699, 0.4387, 0.7470],
    [0.1091, 0.8732, 0.5547],
    [0.0381, 0.5743, 0.8828],
];

const H6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const H6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

fn hartmann<const D: usize>(x: &[f64], a: &[[f64; D]; 4], p: &[[f64; D]; 4]) -> f64 {
    (0..4)
        .map(|i| {
            let inner: f64 = (0..D).map(|j| a[i][j] * (x[j] - p[i][j]).powi(2)).sum();
            H_ALPHA[i] * (-inner).exp()
        })
        .sum()
}

impl Base {
    fn dim(self) -> usize {
        match self {
            Base::Branin | Base::CurrinExp => 2,
            Base::Hartmann3 => 3,
            Base::Park1 | Base::Park2 => 4,
            Base::Hartmann6 => 6,
        }
    }

    fn eval(self, u: &[f64]) -> f64 {
        match self {
            Base::Branin => {
                let x1 = -5.0 + 15.0 * u[0];
                let x2 = 15.0 * u[1];
                let b = 5.1 / (4.0 * PI * PI);
                let c = 5.0 / PI;
                let t = 1.0 / (8.0 * PI);
                -((x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0)
            }
            Base::CurrinExp => {
                let (x1, x2) = (u[0], u[1]);
                let damp = 1.0 - (-1.0 / (2.0 * x2)).exp();
                let num = 2300.0 * x1.powi(3) + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
                let den = 100.0 * x1.powi(3) + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
                damp * num / den
            }
            Base::Hartmann3 => hartmann(u, &H3_A, &H3_P),
            Base::Hartmann6 => hartmann(u, &H6_A, &H6_P),
            Base::Park1 => {
                let (x1, x2, x3, x4) = (u[0], u[1], u[2], u[3]);
                0.5 * ((x1 * x1 + (x2 + x3 * x3) * x4).sqrt() - x1)
                    + (x1 + 3.0 * x4) * (1.0 + x3.sin()).exp()
            }
            Base::Park2 => {
                let (x1, x2, x3, x4) = (u[0], u[1], u[2], u[3]);
                2.0 / 3.0 * (x1 + x2).exp() - x4 * x3.sin() + x3
            }
        }
    }

    /// Maximiser on the unit cube, located once by a quasi-random sweep
    /// followed by local refinement (see `examples/benchmark_optima.rs`).
    fn argmax(self) -> &'static [f64] {
        match self {
            Base::Branin => &BRANIN_ARGMAX,
            Base::CurrinExp => &CURRIN_ARGMAX,
            Base::Hartmann3 => &HARTMANN3_ARGMAX,
            Base::Park1 => &[1.0, 1.0, 1.0, 1.0],
            Base::Park2 => &[1.0, 1.0, 1.0, 0.0],
            Base::Hartmann6 => &HARTMANN6_ARGMAX,
        }
    }

    fn opt_value(self) -> f64 {
        match self {
            Base::Branin => BRANIN_OPT,
            Base::CurrinExp => CURRIN_OPT,
            Base::Hartmann3 => HARTMANN3_OPT,
            Base::Park1 => PARK1_OPT,
            Base::Park2 => PARK2_OPT,
            Base::Hartmann6 => HARTMANN6_OPT,
        }
    }

    /// `opt − min`, estimated by a 10⁶-point quasi-random sweep.
    fn worst_dev(self) -> f64 {
        static CACHE: [OnceLock<f64>; 6] = [const { OnceLock::new() }; 6];
        let slot = match self {
            Base::Branin => 0,
            Base::CurrinExp => 1,
            Base::Hartmann3 => 2,
            Base::Park1 => 3,
            Base::Park2 => 4,
            Base::Hartmann6 => 5,
        };
        *CACHE[slot].get_or_init(|| {
            let seq = Kronecker::new(self.dim());
            let min = (0..WORST_DEV_SWEEP)
                .map(|n| self.eval(&seq.point(n)))
                .fold(f64::INFINITY, f64::min);
            self.opt_value() - min
        })
    }
}

pub(crate) const WORST_DEV_SWEEP: usize = 1_000_000;

const BRANIN_ARGMAX: [f64; 2] = [(PI + 5.0) / 15.0, 2.275 / 15.0];
const BRANIN_OPT: f64 = -0.397_887_357_729_738_16;
const CURRIN_ARGMAX: [f64; 2] = [0.216_666_671_422_543_03, 0.0];
const CURRIN_OPT: f64 = 13.798_722_044_728_436;
const HARTMANN3_ARGMAX: [f64; 3] = [
    0.114_588_882_515_847_24,
    0.555_648_895_695_048_8,
    0.852_546_985_822_889_9,
];
const HARTMANN3_OPT: f64 = 3.862_779_787_332_663;
const PARK1_OPT: f64 = 25.589_254_158_606_547;
const PARK2_OPT: f64 = 5.926_037_399_287_1;
const HARTMANN6_ARGMAX: [f64; 6] = [
    0.201_689_512_816_257_83,
    0.150_010_691_765_928_6,
    0.476_873_978_248_797_35,
    0.275_332_432_175_753_65,
    0.311_651_614_201_488,
    0.657_300_529_436_906_8,
];
const HARTMANN6_OPT: f64 = 3.322_368_011_415_514_3;

/// A benchmark together with its observation noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub id: BenchmarkId,
    pub noise_sd: f64,
}

impl Benchmark {
    /// The benchmark with its default noise level.
    pub fn new(id: BenchmarkId) -> Self {
        Benchmark {
            id,
            noise_sd: id.default_noise_sd(),
        }
    }

    pub fn with_noise(id: BenchmarkId, noise_sd: f64) -> Result<Self> {
        if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
            return Err(Error::invalid(format!(
                "noise sd must be non-negative, got {noise_sd}"
            )));
        }
        Ok(Benchmark { id, noise_sd })
    }

    pub fn dim(&self) -> usize {
        self.id.dim()
    }

    /// Global maximum value on the unit cube.
    pub fn opt_value(&self) -> f64 {
        let (base, copies) = self.id.composition();
        base.opt_value() * copies as f64
    }

    /// A maximiser of the clean function.
    pub fn argmax(&self) -> Vec<f64> {
        let (base, copies) = self.id.composition();
        base.argmax().repeat(copies)
    }

    /// `sup_x |f(x*) − f(x)|`, from a cached quasi-random sweep. For sums of
    /// disjoint copies this is the per-copy value times the number of copies.
    pub fn worst_dev(&self) -> f64 {
        let (base, copies) = self.id.composition();
        base.worst_dev() * copies as f64
    }

    pub fn eval_clean(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        check_unit_cube(x)?;
        let (base, _) = self.id.composition();
        Ok(x.chunks(base.dim()).map(|block| base.eval(block)).sum())
    }

    /// Clean value plus `N(0, η²)` noise.
    pub fn eval_noisy<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<f64> {
        let clean = self.eval_clean(x)?;
        if self.noise_sd == 0.0 {
            return Ok(clean);
        }
        Ok(clean + self.noise_sd * rng.sample::<f64, _>(StandardNormal))
    }
}

/// Clean value of one copy of the base function on its own block of
/// coordinates; exposed so callers can check compositions.
pub fn base_value(id: BenchmarkId, block: &[f64]) -> Result<f64> {
    let (base, _) = id.composition();
    if block.len() != base.dim() {
        return Err(Error::DimensionMismatch {
            expected: base.dim(),
            actual: block.len(),
        });
    }
    check_unit_cube(block)?;
    Ok(base.eval(block))
}

/// Seeded quasi-random sweep of a benchmark, returning the best point found.
pub fn sweep_max(b: &Benchmark, points: usize, seed: u64) -> (Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq = Kronecker::shifted(b.dim(), &mut rng);
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for n in 0..points {
        let x = seq.point(n);
        let v = b.eval_clean(&x).expect("sweep points lie in the unit cube");
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

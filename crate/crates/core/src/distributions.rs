//! Marginal laws and the two Marshall-Olkin bivariate laws: exact cdf,
//! survival and pmf evaluation plus seeded sampling.
//!
//! Geometric variables count failures before the first success, so
//! `P(X = k) = (1-q) q^k` on `k = 0, 1, ...`. For such lattice laws
//! `cdf(x) = P(X <= x)` and `survival(x) = P(X >= x) = q^ceil(x)`.

use rand::distr::Open01;
use rand::Rng as _;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use libm::erfc;

use crate::error::{check, Error, Result};
use crate::rng;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MarginalLaw {
    Exponential { rate: f64 },
    Pareto { shape: f64, scale: f64 },
    Uniform { a: f64, b: f64 },
    StdNormal,
    StdCauchy,
    Geometric { q: f64 },
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

impl MarginalLaw {
    pub fn exponential(rate: f64) -> Result<Self> {
        check(rate > 0.0 && rate.is_finite(), || format!("exponential rate must be positive, got {rate}"))?;
        Ok(MarginalLaw::Exponential { rate })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        check(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(), || {
            format!("Pareto needs shape > 0 and scale > 0, got ({shape}, {scale})")
        })?;
        Ok(MarginalLaw::Pareto { shape, scale })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        check(a < b && a.is_finite() && b.is_finite(), || format!("uniform needs a < b, got ({a}, {b})"))?;
        Ok(MarginalLaw::Uniform { a, b })
    }

    pub fn geometric(q: f64) -> Result<Self> {
        check(q > 0.0 && q < 1.0, || format!("geometric failure probability must lie in (0,1), got {q}"))?;
        Ok(MarginalLaw::Geometric { q })
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, MarginalLaw::Geometric { .. })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            MarginalLaw::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            MarginalLaw::Pareto { shape, scale } => {
                if x <= scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(shape)
                }
            }
            MarginalLaw::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            MarginalLaw::StdNormal => std_normal_cdf(x),
            MarginalLaw::StdCauchy => {
                if x > 0.0 {
                    1.0 - (1.0 / x).atan() / PI
                } else {
                    0.5 + x.atan() / PI
                }
            }
            MarginalLaw::Geometric { q } => {
                if x < 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    -((x.floor() + 1.0) * q.ln()).exp_m1()
                }
            }
        }
    }

    /// `P(X > x)` for continuous laws, `P(X >= x)` for the geometric law.
    pub fn survival(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            MarginalLaw::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            MarginalLaw::Pareto { shape, scale } => {
                if x <= scale {
                    1.0
                } else {
                    (scale / x).powf(shape)
                }
            }
            MarginalLaw::Uniform { a, b } => ((b - x) / (b - a)).clamp(0.0, 1.0),
            MarginalLaw::StdNormal => std_normal_sf(x),
            MarginalLaw::StdCauchy => {
                if x > 0.0 {
                    (1.0 / x).atan() / PI
                } else {
                    0.5 - x.atan() / PI
                }
            }
            MarginalLaw::Geometric { q } => {
                if x <= 0.0 {
                    1.0
                } else {
                    q.powf(x.ceil())
                }
            }
        }
    }

    /// Density for continuous laws, pmf at integers for the geometric law.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            MarginalLaw::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            MarginalLaw::Pareto { shape, scale } => {
                if x < scale {
                    0.0
                } else {
                    shape / scale * (scale / x).powf(shape + 1.0)
                }
            }
            MarginalLaw::Uniform { a, b } => {
                if (a..=b).contains(&x) {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            MarginalLaw::StdNormal => std_normal_pdf(x),
            MarginalLaw::StdCauchy => 1.0 / (PI * (1.0 + x * x)),
            MarginalLaw::Geometric { q } => {
                if x < 0.0 || x.fract() != 0.0 {
                    0.0
                } else {
                    (1.0 - q) * q.powf(x)
                }
            }
        }
    }

    /// Generalized inverse of the cdf on `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check(p > 0.0 && p < 1.0, || format!("quantile level must lie in (0,1), got {p}"))?;
        Ok(match *self {
            MarginalLaw::Exponential { rate } => -(-p).ln_1p() / rate,
            MarginalLaw::Pareto { shape, scale } => scale * (-(-p).ln_1p() / shape).exp(),
            MarginalLaw::Uniform { a, b } => a + (b - a) * p,
            MarginalLaw::StdNormal => Normal::standard().inverse_cdf(p),
            MarginalLaw::StdCauchy => (PI * (p - 0.5)).tan(),
            MarginalLaw::Geometric { q } => ((-p).ln_1p() / q.ln()).ceil() - 1.0,
        }
        .max(if self.is_lattice() { 0.0 } else { f64::NEG_INFINITY }))
    }

    pub fn draw(&self, rng: &mut rng::Rng) -> f64 {
        let u: f64 = rng.sample(Open01);
        match *self {
            MarginalLaw::Exponential { rate } => -u.ln() / rate,
            MarginalLaw::Pareto { shape, scale } => scale * (-u.ln() / shape).exp(),
            MarginalLaw::Uniform { a, b } => a + (b - a) * u,
            MarginalLaw::StdNormal => StandardNormal.sample(rng),
            MarginalLaw::StdCauchy => (PI * (u - 0.5)).tan(),
            MarginalLaw::Geometric { q } => (u.ln() / q.ln()).floor(),
        }
    }
}

pub fn sample_marginal(law: &MarginalLaw, seed: u64, count: usize) -> Vec<f64> {
    let mut rng = rng::stream(seed, 0);
    (0..count).map(|_| law.draw(&mut rng)).collect()
}

/// Fatal-shock law: `X1 = min(E1, E12)`, `X2 = min(E2, E12)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MOExponentialLaw {
    pub nu1: f64,
    pub nu2: f64,
    pub nu12: f64,
}

impl MOExponentialLaw {
    /// `nu12 = 0` is accepted and gives independent exponential margins.
    pub fn new(nu1: f64, nu2: f64, nu12: f64) -> Result<Self> {
        check(nu1 > 0.0 && nu2 > 0.0 && nu12 >= 0.0 && (nu1 + nu2 + nu12).is_finite(), || {
            format!("shock rates must satisfy nu1, nu2 > 0 and nu12 >= 0, got ({nu1}, {nu2}, {nu12})")
        })?;
        Ok(MOExponentialLaw { nu1, nu2, nu12 })
    }

    pub fn total_rate(&self) -> f64 {
        self.nu1 + self.nu2 + self.nu12
    }

    pub fn survival(&self, y1: f64, y2: f64) -> Result<f64> {
        if !(y1 >= 0.0 && y2 >= 0.0) {
            return Err(Error::Domain(format!("survival needs nonnegative coordinates, got ({y1}, {y2})")));
        }
        Ok((-self.nu1 * y1 - self.nu2 * y2 - self.nu12 * y1.max(y2)).exp())
    }

    pub fn marginal_survival(&self, j: usize, y: f64) -> f64 {
        let rate = if j == 0 { self.nu1 + self.nu12 } else { self.nu2 + self.nu12 };
        (-rate * y.max(0.0)).exp()
    }

    /// Parameters `(alpha, beta)` of the Marshall-Olkin survival copula.
    pub fn copula_params(&self) -> (f64, f64) {
        (self.nu12 / (self.nu1 + self.nu12), self.nu12 / (self.nu2 + self.nu12))
    }

    pub fn draw(&self, rng: &mut rng::Rng) -> (f64, f64) {
        let e1: f64 = Exp1.sample(rng);
        let e2: f64 = Exp1.sample(rng);
        let e12: f64 = Exp1.sample(rng);
        let shock = if self.nu12 > 0.0 { e12 / self.nu12 } else { f64::INFINITY };
        ((e1 / self.nu1).min(shock), (e2 / self.nu2).min(shock))
    }

    pub fn sample(&self, seed: u64, count: usize) -> Vec<(f64, f64)> {
        let mut rng = rng::stream(seed, 1);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }
}

/// Marshall-Olkin geometric law of the leading-failure counts of two paired
/// Bernoulli streams; `p_ij = P(S = i, T = j)` with `0` a failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MOGeometricLaw {
    pub q1: f64,
    pub q2: f64,
    pub p00: f64,
}

impl MOGeometricLaw {
    pub fn new(q1: f64, q2: f64, p00: f64) -> Result<Self> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        check(open(q1) && open(q2) && open(p00), || {
            format!("q1, q2, p00 must lie in (0,1), got ({q1}, {q2}, {p00})")
        })?;
        check(p00 >= q1 * q2 * (1.0 - 1e-15), || format!("need p00 >= q1 q2, got {p00} < {}", q1 * q2))?;
        check(p00 <= q1.min(q2), || format!("need p00 <= min(q1, q2), got {p00}"))?;
        Ok(MOGeometricLaw { q1, q2, p00 })
    }

    /// `q1 = 1-(1+gamma) p11`, `q2 = 1-(1+delta) p11`, `p00 = 1-(1+gamma+delta) p11`.
    pub fn from_rates(gamma: f64, delta: f64, p11: f64) -> Result<Self> {
        check(gamma > 0.0 && delta > 0.0, || format!("gamma and delta must be positive, got ({gamma}, {delta})"))?;
        check(p11 > 0.0 && p11 < 1.0, || format!("p11 must lie in (0,1), got {p11}"))?;
        check((1.0 + gamma + delta) * p11 < 1.0, || {
            format!("need (1+gamma+delta) p11 < 1, got {}", (1.0 + gamma + delta) * p11)
        })?;
        Self::new(1.0 - (1.0 + gamma) * p11, 1.0 - (1.0 + delta) * p11, 1.0 - (1.0 + gamma + delta) * p11)
    }

    /// Cell probabilities `[p00, p01, p10, p11]`.
    pub fn cells(&self) -> [f64; 4] {
        let MOGeometricLaw { q1, q2, p00 } = *self;
        [p00, q1 - p00, q2 - p00, 1.0 - q1 - q2 + p00]
    }

    pub fn pmf(&self, k: i64, l: i64) -> Result<f64> {
        if k < 0 || l < 0 {
            return Err(Error::Domain(format!("pmf needs nonnegative indices, got ({k}, {l})")));
        }
        let MOGeometricLaw { q1, q2, p00 } = *self;
        let (k, l) = (k as f64, l as f64);
        Ok(if k < l {
            p00.powf(k) * q2.powf(l - k) * (1.0 - p00 / q2 - q2 + p00)
        } else if k == l {
            p00.powf(k) * (1.0 - q1 - q2 + p00)
        } else {
            p00.powf(l) * q1.powf(k - l) * (1.0 - q1 - p00 / q1 + p00)
        })
    }

    /// `P(X1 >= k, X2 >= l)` with real arguments rounded up.
    pub fn survival(&self, k: f64, l: f64) -> f64 {
        let k = k.ceil().max(0.0);
        let l = l.ceil().max(0.0);
        let MOGeometricLaw { q1, q2, p00 } = *self;
        if k < l {
            p00.powf(k) * q2.powf(l - k)
        } else if k == l {
            p00.powf(k)
        } else {
            p00.powf(l) * q1.powf(k - l)
        }
    }

    /// Trial-by-trial simulation; expected cost `O(1/(1 - max(q1, q2)))`.
    pub fn draw(&self, rng: &mut rng::Rng) -> (u64, u64) {
        let [p00, p01, p10, _] = self.cells();
        let (mut x, mut y) = (0u64, 0u64);
        let (mut done_x, mut done_y) = (false, false);
        while !(done_x && done_y) {
            let u: f64 = rng.random();
            // (s, t) of this trial, 1 = success
            let (s, t) = if u < p00 {
                (0, 0)
            } else if u < p00 + p01 {
                (0, 1)
            } else if u < p00 + p01 + p10 {
                (1, 0)
            } else {
                (1, 1)
            };
            if !done_x {
                if s == 1 {
                    done_x = true;
                } else {
                    x += 1;
                }
            }
            if !done_y {
                if t == 1 {
                    done_y = true;
                } else {
                    y += 1;
                }
            }
        }
        (x, y)
    }

    pub fn sample(&self, seed: u64, count: usize) -> Vec<(u64, u64)> {
        let mut rng = rng::stream(seed, 2);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn documented_values() {
        assert_eq!(MarginalLaw::exponential(1.0).unwrap().cdf(0.0), 0.0);
        let g = MarginalLaw::geometric(0.5).unwrap();
        // p + p q summed directly
        assert_relative_eq!(g.cdf(1.7), 0.5 + 0.25, epsilon = 1e-15);
        assert_eq!(MarginalLaw::StdCauchy.cdf(0.0), 0.5);
        assert_relative_eq!(MarginalLaw::pareto(2.0, 1.0).unwrap().survival(10.0), 0.01, epsilon = 1e-15);
        assert_eq!(MarginalLaw::geometric(0.3).unwrap().survival(0.0), 1.0);
        assert_eq!(MarginalLaw::uniform(0.0, 1.0).unwrap().survival(0.25), 0.75);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MarginalLaw::exponential(0.0).is_err());
        assert!(MarginalLaw::pareto(1.0, -1.0).is_err());
        assert!(MarginalLaw::uniform(1.0, 1.0).is_err());
        assert!(MarginalLaw::geometric(1.0).is_err());
        assert!(MOGeometricLaw::new(0.5, 0.5, 0.2).is_err());
        assert!(MOGeometricLaw::from_rates(1.0, 1.0, 0.34).is_err());
    }

    #[test]
    fn normal_cdf_reference_values() {
        // values from the series erfc expansion at 40 digits
        assert_relative_eq!(std_normal_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-15);
        assert_relative_eq!(std_normal_sf(5.0), 2.866_515_718_791_939e-7, max_relative = 1e-12);
        assert_relative_eq!(std_normal_sf(10.0), 7.619_853_024_160_527e-24, max_relative = 1e-12);
    }

    #[test]
    fn sampling_bands() {
        let u = sample_marginal(&MarginalLaw::uniform(0.0, 1.0).unwrap(), 11, 100_000);
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        assert!((mean - 0.5).abs() < 0.01);
        let g = sample_marginal(&MarginalLaw::geometric(0.5).unwrap(), 12, 100_000);
        let zero = g.iter().filter(|&&x| x == 0.0).count() as f64 / 1e5;
        assert!((zero - 0.5).abs() < 0.01);
        let e = MarginalLaw::exponential(1.0).unwrap();
        assert_eq!(sample_marginal(&e, 3, 1), sample_marginal(&e, 3, 1));
    }

    #[test]
    fn mo_exponential_examples() {
        let ind = MOExponentialLaw::new(1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(ind.survival(1.0, 1.0).unwrap(), (-2.0f64).exp(), epsilon = 1e-16);
        assert_eq!(MOExponentialLaw::new(1.0, 1.0, 1.0).unwrap().survival(0.0, 0.0).unwrap(), 1.0);
        let l = MOExponentialLaw::new(1.0, 2.0, 3.0).unwrap();
        assert_relative_eq!(l.survival(1.0, 2.0).unwrap(), (-11.0f64).exp(), max_relative = 1e-14);
        assert!(l.survival(-1.0, 0.0).is_err());
        assert!(MOExponentialLaw::new(1.0, 1.0, 1.0).unwrap().sample(1, 0).is_empty());
    }

    #[test]
    fn mo_exponential_sampling() {
        let l = MOExponentialLaw::new(1.0, 1.0, 1.0).unwrap();
        let s = l.sample(5, 100_000);
        let ties = s.iter().filter(|(a, b)| a == b).count() as f64 / 1e5;
        assert!((ties - 1.0 / 3.0).abs() < 0.01);
        let near = MOExponentialLaw::new(1.0, 1.0, 1e-9).unwrap().sample(6, 100_000);
        let n = near.len() as f64;
        let (ma, mb) = (near.iter().map(|p| p.0).sum::<f64>() / n, near.iter().map(|p| p.1).sum::<f64>() / n);
        let cov = near.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum::<f64>() / n;
        assert!(cov.abs() < 0.02);
        let p = s.iter().filter(|(a, b)| *a > 0.5 && *b > 0.3).count() as f64 / 1e5;
        assert!((p - l.survival(0.5, 0.3).unwrap()).abs() < 0.01);
    }

    #[test]
    fn mo_geometric_examples() {
        let (q1, q2) = (0.6, 0.7);
        let ind = MOGeometricLaw::new(q1, q2, q1 * q2).unwrap();
        let prod = (1.0 - q1) * q1.powi(2) * (1.0 - q2) * q2.powi(3);
        assert_relative_eq!(ind.pmf(2, 3).unwrap(), prod, max_relative = 1e-13);
        let q = 0.4;
        let diag = MOGeometricLaw::new(q, q, q).unwrap();
        assert_relative_eq!(diag.pmf(3, 3).unwrap(), q.powi(3) * (1.0 - q), max_relative = 1e-14);
        assert!(diag.pmf(1, 3).unwrap().abs() < 1e-16);
        let g = MOGeometricLaw::new(0.9, 0.8, 0.75).unwrap();
        assert_relative_eq!(g.pmf(0, 0).unwrap(), 1.0 - 0.9 - 0.8 + 0.75, epsilon = 1e-15);
        assert_eq!(g.survival(0.0, 0.0), 1.0);
        assert_relative_eq!(g.survival(4.0, 4.0), 0.75f64.powi(4), epsilon = 1e-15);
        assert_relative_eq!(g.survival(2.0, 1.0), 0.675, epsilon = 1e-15);
        assert!(g.pmf(-1, 0).is_err());
    }

    #[test]
    fn mo_geometric_survival_is_summed_pmf() {
        let g = MOGeometricLaw::from_rates(1.0, 0.5, 0.08).unwrap();
        // tail beyond index 400 is below max(q1,q2)^400 < 1e-12
        let m = 400;
        let mut grid = vec![vec![0.0; m + 1]; m + 1];
        for i in (0..=m).rev() {
            for j in (0..=m).rev() {
                let below = if i < m { grid[i + 1][j] } else { 0.0 };
                let right = if j < m { grid[i][j + 1] } else { 0.0 };
                let both = if i < m && j < m { grid[i + 1][j + 1] } else { 0.0 };
                grid[i][j] = g.pmf(i as i64, j as i64).unwrap() + below + right - both;
            }
        }
        assert!((grid[0][0] - 1.0).abs() < 1e-10);
        for k in 0..=10 {
            for l in 0..=10 {
                assert!((grid[k][l] - g.survival(k as f64, l as f64)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mo_geometric_sampling() {
        let g = MOGeometricLaw::from_rates(1.0, 1.0, 0.1).unwrap();
        let s = g.sample(9, 100_000);
        let ties = s.iter().filter(|(a, b)| a == b).count() as f64 / 1e5;
        let diag: f64 = (0..400).map(|k| g.pmf(k, k).unwrap()).sum();
        assert!((ties - diag).abs() < 0.01);
        let eps = 1e-4;
        let near = MOGeometricLaw::new(eps, eps, eps).unwrap().sample(1, 1000);
        assert!(near.iter().filter(|&&p| p == (0, 0)).count() > 990);
        let ind = MOGeometricLaw::new(0.5, 0.6, 0.3).unwrap().sample(2, 100_000);
        let n = ind.len() as f64;
        let ma = ind.iter().map(|p| p.0 as f64).sum::<f64>() / n;
        let mb = ind.iter().map(|p| p.1 as f64).sum::<f64>() / n;
        let cov = ind.iter().map(|p| (p.0 as f64 - ma) * (p.1 as f64 - mb)).sum::<f64>() / n;
        assert!(cov.abs() < 0.03);
    }

    fn any_law() -> impl Strategy<Value = MarginalLaw> {
        prop_oneof![
            (0.1f64..5.0).prop_map(|r| MarginalLaw::exponential(r).unwrap()),
            (0.2f64..4.0, 0.5f64..3.0).prop_map(|(a, s)| MarginalLaw::pareto(a, s).unwrap()),
            (-3.0f64..0.0, 0.5f64..3.0).prop_map(|(a, w)| MarginalLaw::uniform(a, a + w).unwrap()),
            Just(MarginalLaw::StdNormal),
            Just(MarginalLaw::StdCauchy),
        ]
    }

    proptest! {
        #[test]
        fn continuous_cdf_and_survival_complement(law in any_law(), x in -20.0f64..20.0) {
            prop_assert!((law.cdf(x) + law.survival(x) - 1.0).abs() < 1e-14);
        }

        #[test]
        fn geometric_lattice_convention(q in 0.01f64..0.99, k in 0u32..60) {
            let g = MarginalLaw::geometric(q).unwrap();
            let k = k as f64;
            prop_assert!((g.cdf(k) + g.survival(k + 1.0) - 1.0).abs() < 1e-14);
            prop_assert!((g.cdf(k + 0.5) - g.cdf(k)).abs() == 0.0);
        }

        #[test]
        fn cdf_is_monotone(law in any_law(), x in -20.0f64..20.0, dx in 0.0f64..5.0) {
            prop_assert!(law.cdf(x) <= law.cdf(x + dx) + 1e-15);
        }

        #[test]
        fn independent_shock_law_factorizes(a in 0.1f64..3.0, b in 0.1f64..3.0, y1 in 0.0f64..4.0, y2 in 0.0f64..4.0) {
            let l = MOExponentialLaw::new(a, b, 0.0).unwrap();
            prop_assert_eq!(l.survival(y1, y2).unwrap(), (-a * y1 - b * y2).exp());
        }

        #[test]
        fn quantile_inverts_cdf(law in any_law(), p in 0.001f64..0.999) {
            let x = law.quantile(p).unwrap();
            prop_assert!((law.cdf(x) - p).abs() < 1e-9);
        }
    }
}

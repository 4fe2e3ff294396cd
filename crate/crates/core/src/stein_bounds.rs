//! Poisson approximation bounds for sums of indicators, exact total
//! variation between discrete laws, and total-variation / d2 bounds between
//! Poisson processes given by their intensities.

use std::sync::Arc;

use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{check, Error, Result};
use crate::numeric::{quad, quad2};

pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * lambda.ln() - lambda - ln_factorial(k)).exp()
}

pub fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
}

/// Smallest `m` with the Chernoff bound `e^-lambda (e lambda / m)^m` on
/// `P(Poi(lambda) >= m)` at most `tail`.
pub fn poisson_tail_index(lambda: f64, tail: f64) -> u64 {
    let mut m = (lambda.ceil() as u64).max(1);
    loop {
        let mf = m as f64;
        let log_bound = -lambda + mf * (1.0 + lambda.ln() - mf.ln());
        if mf > lambda && log_bound <= tail.ln() {
            return m;
        }
        m += 1;
    }
}

/// `1/2 sum_{k <= m} |p(k) - q(k)|`; fails unless both laws leave at most
/// `tail_bound` mass beyond `m`, which bounds the truncation error.
pub fn exact_dtv_pmf<P: Fn(u64) -> f64, Q: Fn(u64) -> f64>(p: P, q: Q, m: u64, tail_bound: f64) -> Result<f64> {
    let (mut sp, mut sq, mut acc) = (0.0, 0.0, 0.0);
    for k in 0..=m {
        let (a, b) = (p(k), q(k));
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::Domain(format!("pmf value at {k} is not a probability")));
        }
        sp += a;
        sq += b;
        acc += (a - b).abs();
    }
    let slack = 1e-12;
    if 1.0 - sp > tail_bound + slack || 1.0 - sq > tail_bound + slack {
        return Err(Error::Numerical(format!(
            "unaccounted tail mass {:.3e} / {:.3e} exceeds {tail_bound:.3e} at index {m}",
            1.0 - sp,
            1.0 - sq
        )));
    }
    Ok(0.5 * acc)
}

pub fn dtv_binomial_poisson(n: u64, p: f64, tail_bound: f64) -> Result<f64> {
    check((0.0..=1.0).contains(&p), || format!("p must lie in [0,1], got {p}"))?;
    let lambda = n as f64 * p;
    let m = n.max(poisson_tail_index(lambda, tail_bound));
    exact_dtv_pmf(|k| binomial_pmf(n, p, k), |k| poisson_pmf(lambda, k), m, tail_bound)
}

pub fn dtv_poisson_poisson(l1: f64, l2: f64, tail_bound: f64) -> Result<f64> {
    check(l1 >= 0.0 && l2 >= 0.0, || format!("Poisson means must be nonnegative, got ({l1}, {l2})"))?;
    let m = poisson_tail_index(l1.max(l2), tail_bound);
    exact_dtv_pmf(|k| poisson_pmf(l1, k), |k| poisson_pmf(l2, k), m, tail_bound)
}

fn check_probs(p: &[f64]) -> Result<()> {
    for (i, &x) in p.iter().enumerate() {
        check(x > 0.0 && x < 1.0, || format!("p[{i}] = {x} is outside (0,1)"))?;
    }
    Ok(())
}

/// Sum of squared success probabilities.
pub fn lecam_bound(p: &[f64]) -> Result<f64> {
    check_probs(p)?;
    Ok(p.iter().map(|x| x * x).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarbourHall {
    pub lambda: f64,
    /// `(1 - e^-lambda)/lambda * sum p^2`
    pub bound: f64,
    /// `min(1, 1/lambda) * sum p^2`
    pub simple: f64,
}

pub fn barbour_hall_bound(p: &[f64]) -> Result<BarbourHall> {
    if p.is_empty() {
        return Err(Error::InvalidParameter("need at least one indicator".into()));
    }
    check_probs(p)?;
    let lambda: f64 = p.iter().sum();
    let sq: f64 = p.iter().map(|x| x * x).sum();
    Ok(BarbourHall {
        lambda,
        bound: -(-lambda).exp_m1() / lambda * sq,
        simple: (1.0f64).min(1.0 / lambda) * sq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDependence {
    pub lambda: f64,
    pub strong: f64,
    pub weak: f64,
    pub total: f64,
}

/// Bound for dependent indicators split into strongly dependent
/// neighbourhoods (`ez[i] = E Z_i`, `eiz[i] = E I_i Z_i`) and a weakly
/// dependent remainder controlled by `eta`.
pub fn local_dependence_bound(p: &[f64], ez: &[f64], eiz: &[f64], eta: &[f64]) -> Result<LocalDependence> {
    let n = p.len();
    if ez.len() != n || eiz.len() != n || eta.len() != n {
        return Err(Error::InvalidParameter(format!(
            "length mismatch: p {n}, ez {}, eiz {}, eta {}",
            ez.len(),
            eiz.len(),
            eta.len()
        )));
    }
    for (name, v) in [("p", p), ("ez", ez), ("eiz", eiz), ("eta", eta)] {
        check(v.iter().all(|x| *x >= 0.0 && x.is_finite()), || format!("{name} must be nonnegative"))?;
    }
    let lambda: f64 = p.iter().sum();
    check(lambda > 0.0, || "need positive total mean".into())?;
    let core: f64 = (0..n).map(|i| p[i] * p[i] + p[i] * ez[i] + eiz[i]).sum();
    let strong = core * (1.0f64).min(1.0 / lambda);
    let weak = eta.iter().sum::<f64>() * (1.0f64).min((2.0 / (std::f64::consts::E * lambda)).sqrt());
    Ok(LocalDependence { lambda, strong, weak, total: strong + weak })
}

/// `(1 - e^-lambda)(2 - e^-lambda) d1` between two Poisson processes of
/// equal total mass `lambda`.
pub fn d2_two_prm_bound(lambda: f64, d1: f64) -> Result<f64> {
    check(lambda > 0.0, || format!("total mass must be positive, got {lambda}"))?;
    check((0.0..=1.0).contains(&d1), || format!("d1 must lie in [0,1], got {d1}"))?;
    let e = (-lambda).exp();
    Ok((1.0 - e) * (2.0 - e) * d1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Interval { lo: f64, hi: f64 },
    Rectangle { s: (f64, f64), t: (f64, f64) },
}

pub type Density1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Density2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Density {
    Line(Density1),
    Plane(Density2),
}

/// A mean measure: density on a region, optional density along the
/// diagonal `s = t` (parameterized by `s`), optional point masses.
#[derive(Clone)]
pub struct IntensitySpec {
    pub region: Region,
    pub density: Option<Density>,
    pub diagonal: Option<Density1>,
    pub atoms: Vec<(Vec<f64>, f64)>,
}

impl std::fmt::Debug for IntensitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntensitySpec")
            .field("region", &self.region)
            .field("density", &self.density.is_some())
            .field("diagonal", &self.diagonal.is_some())
            .field("atoms", &self.atoms.len())
            .finish()
    }
}

const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-10;

fn diagonal_range(region: &Region) -> Option<(f64, f64)> {
    match *region {
        Region::Rectangle { s, t } => {
            let lo = s.0.max(t.0);
            let hi = s.1.min(t.1);
            (hi > lo).then_some((lo, hi))
        }
        Region::Interval { .. } => None,
    }
}

impl IntensitySpec {
    pub fn line<F: Fn(f64) -> f64 + Send + Sync + 'static>(lo: f64, hi: f64, f: F) -> Self {
        IntensitySpec {
            region: Region::Interval { lo, hi },
            density: Some(Density::Line(Arc::new(f))),
            diagonal: None,
            atoms: Vec::new(),
        }
    }

    pub fn plane<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(s: (f64, f64), t: (f64, f64), f: F) -> Self {
        IntensitySpec {
            region: Region::Rectangle { s, t },
            density: Some(Density::Plane(Arc::new(f))),
            diagonal: None,
            atoms: Vec::new(),
        }
    }

    pub fn atoms(region: Region, atoms: Vec<(Vec<f64>, f64)>) -> Self {
        IntensitySpec { region, density: None, diagonal: None, atoms }
    }

    pub fn with_diagonal<F: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.diagonal = Some(Arc::new(f));
        self
    }

    pub fn continuous_mass(&self) -> Result<(f64, f64)> {
        let mut value = 0.0;
        let mut error = 0.0;
        match (&self.density, self.region) {
            (Some(Density::Line(f)), Region::Interval { lo, hi }) => {
                let q = quad(|x| f(x), lo, hi, QUAD_ABS, QUAD_REL);
                value += q.value;
                error += q.error;
            }
            (Some(Density::Plane(f)), Region::Rectangle { s, t }) => {
                let q = quad2(|a, b| f(a, b), s, t, true, QUAD_ABS, QUAD_REL);
                value += q.value;
                error += q.error;
            }
            (None, _) => {}
            _ => return Err(Error::InvalidParameter("density dimension does not match region".into())),
        }
        if let (Some(d), Some((lo, hi))) = (&self.diagonal, diagonal_range(&self.region)) {
            let q = quad(|x| d(x), lo, hi, QUAD_ABS, QUAD_REL);
            value += q.value;
            error += q.error;
        }
        if !value.is_finite() {
            return Err(Error::Numerical("intensity has infinite mass".into()));
        }
        Ok((value, error))
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.continuous_mass()?.0 + self.atom_mass())
    }
}

/// Upper bound `int |lambda1 - lambda2|` on the total variation distance
/// between the two Poisson processes.
pub fn prm_dtv_bound(a: &IntensitySpec, b: &IntensitySpec) -> Result<f64> {
    if a.region != b.region {
        return Err(Error::InvalidParameter(format!(
            "region mismatch: {:?} vs {:?}",
            a.region, b.region
        )));
    }
    let mut total = 0.0;
    let mut err = 0.0;
    match (&a.density, &b.density, a.region) {
        (None, None, _) => {}
        (Some(Density::Line(f)), g, Region::Interval { lo, hi }) | (g, Some(Density::Line(f)), Region::Interval { lo, hi }) => {
            let g = match g {
                Some(Density::Line(g)) => Some(g.clone()),
                None => None,
                _ => return Err(Error::InvalidParameter("density dimension mismatch".into())),
            };
            let q = quad(
                |x| (f(x) - g.as_ref().map_or(0.0, |g| g(x))).abs(),
                lo,
                hi,
                QUAD_ABS,
                QUAD_REL,
            );
            total += q.value;
            err += q.error;
        }
        (Some(Density::Plane(f)), g, Region::Rectangle { s, t }) | (g, Some(Density::Plane(f)), Region::Rectangle { s, t }) => {
            let g = match g {
                Some(Density::Plane(g)) => Some(g.clone()),
                None => None,
                _ => return Err(Error::InvalidParameter("density dimension mismatch".into())),
            };
            let q = quad2(
                |x, y| (f(x, y) - g.as_ref().map_or(0.0, |g| g(x, y))).abs(),
                s,
                t,
                true,
                QUAD_ABS,
                QUAD_REL,
            );
            total += q.value;
            err += q.error;
        }
        _ => return Err(Error::InvalidParameter("density dimension does not match region".into())),
    }
    if let Some((lo, hi)) = diagonal_range(&a.region) {
        let da = a.diagonal.clone();
        let db = b.diagonal.clone();
        if da.is_some() || db.is_some() {
            let q = quad(
                |x| (da.as_ref().map_or(0.0, |d| d(x)) - db.as_ref().map_or(0.0, |d| d(x))).abs(),
                lo,
                hi,
                QUAD_ABS,
                QUAD_REL,
            );
            total += q.value;
            err += q.error;
        }
    }
    let mut atoms: Vec<(Vec<f64>, f64)> = a.atoms.clone();
    for (loc, m) in &b.atoms {
        match atoms.iter_mut().find(|(l, _)| l == loc) {
            Some(slot) => slot.1 -= m,
            None => atoms.push((loc.clone(), -m)),
        }
    }
    total += atoms.iter().map(|x| x.1.abs()).sum::<f64>();
    let scale = a.total_mass()?.max(b.total_mass()?).max(1.0);
    if err > 1e-8 * scale || !total.is_finite() {
        return Err(Error::Numerical(format!("quadrature error {err:.3e} too large")));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn documented_bounds() {
        assert_relative_eq!(lecam_bound(&[0.1; 10]).unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(lecam_bound(&[]).unwrap(), 0.0);
        assert_relative_eq!(lecam_bound(&[0.5, 0.25]).unwrap(), 0.3125, epsilon = 1e-15);
        assert!(lecam_bound(&[1.2]).is_err());
        let bh = barbour_hall_bound(&[0.1; 10]).unwrap();
        assert_relative_eq!(bh.bound, (1.0 - (-1.0f64).exp()) * 0.1, epsilon = 1e-15);
        assert_relative_eq!(bh.bound, 0.063_212_055_882_855_77, epsilon = 1e-15);
        let single = barbour_hall_bound(&[0.5]).unwrap();
        assert_relative_eq!(single.bound, (1.0 - (-0.5f64).exp()) / 0.5 * 0.25, epsilon = 1e-15);
        assert!(barbour_hall_bound(&[]).is_err());
        let big = barbour_hall_bound(&vec![0.01; 100_000]).unwrap();
        assert_relative_eq!(big.bound, 0.01, max_relative = 1e-9);
    }

    #[test]
    fn exact_dtv_examples() {
        assert_eq!(dtv_poisson_poisson(1.5, 1.5, 1e-14).unwrap(), 0.0);
        let a = dtv_poisson_poisson(1.0, 2.0, 1e-10).unwrap();
        let b = dtv_poisson_poisson(1.0, 2.0, 1e-14).unwrap();
        assert!((a - b).abs() <= 1e-10);
        // the two laws cross between 1 and 2, so dtv = P(Poi(2) >= 2) - P(Poi(1) >= 2)
        let closed = (1.0 - 3.0 * (-2.0f64).exp()) - (1.0 - 2.0 * (-1.0f64).exp());
        assert_relative_eq!(b, closed, epsilon = 1e-14);
        let d = dtv_binomial_poisson(10, 0.1, 1e-14).unwrap();
        assert!(d <= barbour_hall_bound(&[0.1; 10]).unwrap().bound);
        assert!(exact_dtv_pmf(|k| poisson_pmf(5.0, k), |k| poisson_pmf(5.0, k), 3, 1e-6).is_err());
    }

    #[test]
    fn local_dependence_degenerates_to_independent_case() {
        let p = [0.1, 0.2, 0.05];
        let z = [0.0; 3];
        let ld = local_dependence_bound(&p, &z, &z, &z).unwrap();
        assert_relative_eq!(ld.total, barbour_hall_bound(&p).unwrap().simple, epsilon = 1e-16);
        let ld = local_dependence_bound(&[0.2, 0.0], &[0.0; 2], &[0.0; 2], &[0.0; 2]).unwrap();
        assert_relative_eq!(ld.total, 0.04, epsilon = 1e-16);
        assert!(local_dependence_bound(&p, &z, &z, &[0.0]).is_err());
    }

    /// Exact law of `W = sum_i J_i J_{i+1} J_{i+2}` for i.i.d. Bernoulli(r)
    /// `J`, by a transfer recursion over the last two `J`s.
    fn runs_of_three_law(n: usize, r: f64) -> Vec<f64> {
        // state index: 2 * J_{k-1} + J_k, value: law of partial W
        let mut dist = vec![vec![0.0; n + 1]; 4];
        for a in 0..2 {
            for b in 0..2 {
                let pa = if a == 1 { r } else { 1.0 - r };
                let pb = if b == 1 { r } else { 1.0 - r };
                dist[2 * a + b][0] = pa * pb;
            }
        }
        for _ in 0..n {
            let mut next = vec![vec![0.0; n + 1]; 4];
            for (state, law) in dist.iter().enumerate() {
                let (a, b) = (state / 2, state % 2);
                for c in 0..2 {
                    let pc = if c == 1 { r } else { 1.0 - r };
                    let inc = a * b * c;
                    for w in 0..n {
                        next[2 * b + c][w + inc] += law[w] * pc;
                    }
                }
            }
            dist = next;
        }
        (0..=n).map(|w| dist.iter().map(|l| l[w]).sum()).collect()
    }

    #[test]
    fn local_dependence_dominates_exact_law() {
        let n = 20;
        for &r in &[0.2, 0.35, 0.5] {
            let law = runs_of_three_law(n, r);
            let p = vec![r.powi(3); n];
            let lambda: f64 = p.iter().sum();
            let exact = exact_dtv_pmf(
                |k| law.get(k as usize).copied().unwrap_or(0.0),
                |k| poisson_pmf(lambda, k),
                poisson_tail_index(lambda, 1e-14).max(n as u64),
                1e-14,
            )
            .unwrap();
            // strong neighbourhood |i - j| <= 2, weak remainder independent
            let mut ez = vec![0.0; n];
            let mut eiz = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    let gap = (i as i64 - j as i64).unsigned_abs();
                    if gap == 1 || gap == 2 {
                        ez[i] += r.powi(3);
                        eiz[i] += r.powi(3 + gap as i32);
                    }
                }
            }
            let bound = local_dependence_bound(&p, &ez, &eiz, &vec![0.0; n]).unwrap();
            assert!(exact <= bound.total, "r={r}: {exact} > {}", bound.total);
        }
    }

    #[test]
    fn d2_factor() {
        assert_eq!(d2_two_prm_bound(3.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(d2_two_prm_bound(800.0, 1.0).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(d2_two_prm_bound(2f64.ln(), 0.5).unwrap(), 0.375, epsilon = 1e-15);
        assert!(d2_two_prm_bound(1.0, 1.5).is_err());
    }

    #[test]
    fn intensity_distances() {
        let a = IntensitySpec::line(0.0, f64::INFINITY, |x| (-x).exp());
        assert_eq!(prm_dtv_bound(&a, &a).unwrap(), 0.0);
        let b = IntensitySpec::line(0.0, f64::INFINITY, |x| 2.0 * (-2.0 * x).exp());
        // densities cross at log 2
        let closed = 2.0 * (0.5 - 0.25);
        assert_relative_eq!(prm_dtv_bound(&a, &b).unwrap(), closed, epsilon = 1e-10);
        let c = IntensitySpec::line(1.0, 2.0, |_| 1.0);
        assert!(prm_dtv_bound(&a, &c).is_err());
        let p = IntensitySpec::atoms(Region::Interval { lo: 0.0, hi: 5.0 }, vec![(vec![1.0], 0.3), (vec![2.0], 0.2)]);
        let q = IntensitySpec::atoms(Region::Interval { lo: 0.0, hi: 5.0 }, vec![(vec![1.0], 0.1), (vec![3.0], 0.2)]);
        assert_relative_eq!(prm_dtv_bound(&p, &q).unwrap(), 0.6, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn ordering_of_bounds(n in 1usize..60, p in 0.001f64..0.999) {
            let ps = vec![p; n];
            let bh = barbour_hall_bound(&ps).unwrap();
            prop_assert!(bh.bound <= lecam_bound(&ps).unwrap() + 1e-15);
            prop_assert!(bh.bound <= bh.simple + 1e-15);
        }

        #[test]
        fn exact_dtv_under_barbour_hall(n in 1u64..80, p in 0.001f64..0.6) {
            let d = dtv_binomial_poisson(n, p, 1e-13).unwrap();
            prop_assert!(d <= barbour_hall_bound(&vec![p; n as usize]).unwrap().bound + 1e-12);
        }

        #[test]
        fn halving_tail_bound_is_stable(l1 in 0.1f64..20.0, l2 in 0.1f64..20.0, tail in 1e-10f64..1e-4) {
            let a = dtv_poisson_poisson(l1, l2, tail).unwrap();
            let b = dtv_poisson_poisson(l1, l2, tail / 2.0).unwrap();
            prop_assert!((a - b).abs() <= tail);
        }

        #[test]
        fn intensity_distance_is_symmetric(r1 in 0.2f64..3.0, r2 in 0.2f64..3.0) {
            let a = IntensitySpec::line(0.0, f64::INFINITY, move |x| r1 * (-r1 * x).exp());
            let b = IntensitySpec::line(0.0, f64::INFINITY, move |x| r2 * (-r2 * x).exp());
            let ab = prm_dtv_bound(&a, &b).unwrap();
            let ba = prm_dtv_bound(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-9);
            prop_assert!((ab == 0.0) == (r1 == r2) || ab < 1e-9);
        }
    }
}

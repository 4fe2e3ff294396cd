//! Finite point configurations in one or two dimensions, the d1 matching
//! distance, exceedance-process simulation, Poisson process sampling and
//! the spatial immigration-death process.

use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{Distribution, Exp, Poisson};
use serde::Serialize;

use crate::assignment::min_cost_assignment;
use crate::distributions::{MOExponentialLaw, MOGeometricLaw, MarginalLaw};
use crate::error::{check, Error, Result};
use crate::numeric::{bisect, quad};
use crate::rng;
use crate::stein_bounds::{Density, IntensitySpec, Region};

/// Finite multiset of points in `R^dim`, `dim` in {1, 2}; one-dimensional
/// points keep their second coordinate at zero.
#[derive(Debug, Clone, Serialize)]
pub struct PointConfiguration {
    pub dim: usize,
    pub points: Vec<[f64; 2]>,
}

impl PointConfiguration {
    pub fn empty(dim: usize) -> Self {
        PointConfiguration { dim, points: Vec::new() }
    }

    pub fn line(xs: &[f64]) -> Self {
        PointConfiguration { dim: 1, points: xs.iter().map(|&x| [x, 0.0]).collect() }
    }

    pub fn plane(ps: &[[f64; 2]]) -> Self {
        PointConfiguration { dim: 2, points: ps.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn sorted(&self) -> Vec<[f64; 2]> {
        let mut p = self.points.clone();
        p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        p
    }
}

impl PartialEq for PointConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.sorted() == other.sorted()
    }
}

/// `min(|z - w|, 1)`.
pub fn d0(z: [f64; 2], w: [f64; 2]) -> f64 {
    ((z[0] - w[0]).hypot(z[1] - w[1])).min(1.0)
}

/// 1 when the sizes differ, else the smallest average `d0` over all
/// matchings of the two configurations.
pub fn d1_distance(a: &PointConfiguration, b: &PointConfiguration) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    let m = a.len();
    if m == 0 {
        return 0.0;
    }
    let cost: Vec<Vec<f64>> = a.points.iter().map(|&z| b.points.iter().map(|&w| d0(z, w)).collect()).collect();
    let (c, _) = min_cost_assignment(&cost);
    (c / m as f64).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarkLaw {
    Marginal(MarginalLaw),
    MoExponential(MOExponentialLaw),
    MoGeometric(MOGeometricLaw),
}

impl MarkLaw {
    pub fn dim(&self) -> usize {
        match self {
            MarkLaw::Marginal(_) => 1,
            _ => 2,
        }
    }
}

/// Exceedance region in normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExceedanceRegion {
    Everything,
    Nothing,
    /// `[u, inf)` on the line.
    Ray { u: f64 },
    /// `[u1, inf) x [u2, inf)`.
    Quadrant { u: (f64, f64) },
    /// Complement of `(-inf, u1) x (-inf, u2)`: at least one coordinate exceeds.
    Union { u: (f64, f64) },
}

impl ExceedanceRegion {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            ExceedanceRegion::Everything => true,
            ExceedanceRegion::Nothing => false,
            ExceedanceRegion::Ray { u } => p[0] >= u,
            ExceedanceRegion::Quadrant { u } => p[0] >= u.0 && p[1] >= u.1,
            ExceedanceRegion::Union { u } => p[0] >= u.0 || p[1] >= u.1,
        }
    }
}

/// i.i.d. marks, normalized per coordinate by `x* = (x - b) / a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MppeSpec {
    pub marks: MarkLaw,
    pub region: ExceedanceRegion,
    pub n: usize,
    pub norming: [(f64, f64); 2],
}

impl MppeSpec {
    pub fn new(marks: MarkLaw, region: ExceedanceRegion, n: usize, norming: [(f64, f64); 2]) -> Result<Self> {
        check(norming.iter().all(|(a, _)| *a > 0.0), || "norming scale must be positive".into())?;
        Ok(MppeSpec { marks, region, n, norming })
    }
}

fn draw_mark(marks: &MarkLaw, rng: &mut rng::Rng) -> [f64; 2] {
    match marks {
        MarkLaw::Marginal(l) => [l.draw(rng), 0.0],
        MarkLaw::MoExponential(l) => {
            let (a, b) = l.draw(rng);
            [a, b]
        }
        MarkLaw::MoGeometric(l) => {
            let (a, b) = l.draw(rng);
            [a as f64, b as f64]
        }
    }
}

/// Normalized marks falling in the region; the count is `W_A`.
pub fn simulate_mppe(spec: &MppeSpec, seed: u64) -> PointConfiguration {
    let mut rng = rng::stream(seed, 3);
    let dim = spec.marks.dim();
    let [(a1, b1), (a2, b2)] = spec.norming;
    let mut points = Vec::new();
    for _ in 0..spec.n {
        let x = draw_mark(&spec.marks, &mut rng);
        let p = if dim == 1 { [(x[0] - b1) / a1, 0.0] } else { [(x[0] - b1) / a1, (x[1] - b2) / a2] };
        if spec.region.contains(p) {
            points.push(p);
        }
    }
    PointConfiguration { dim, points }
}

/// Tabulated inverse cdf of a density on `[lo, hi]` (`hi` may be infinite);
/// cumulative masses are exact per cell, locations are interpolated linearly
/// inside a cell.
#[derive(Debug, Clone)]
struct Tabulated {
    lo: f64,
    infinite: bool,
    width: f64,
    cum: Vec<f64>,
}

const CELLS: usize = 8192;

impl Tabulated {
    fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        let infinite = hi.is_infinite();
        let width = if infinite { 1.0 } else { hi - lo };
        let map = |t: f64| if infinite { lo + t / (1.0 - t) } else { lo + t * width };
        let mut cum = Vec::with_capacity(CELLS + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..CELLS {
            let (ta, tb) = (i as f64 / CELLS as f64, (i + 1) as f64 / CELLS as f64);
            let q = quad(|x| f(x).max(0.0), map(ta), map(tb), 1e-15, 1e-10);
            acc += q.value;
            cum.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::Numerical("density has no finite positive mass".into()));
        }
        Ok(Tabulated { lo, infinite, width, cum })
    }

    fn mass(&self) -> f64 {
        self.cum[CELLS]
    }

    fn sample(&self, u: f64) -> f64 {
        let target = u * self.mass();
        let i = self.cum.partition_point(|&c| c <= target).clamp(1, CELLS) - 1;
        let (ca, cb) = (self.cum[i], self.cum[i + 1]);
        let frac = if cb > ca { (target - ca) / (cb - ca) } else { 0.5 };
        let t = (i as f64 + frac) / CELLS as f64;
        if self.infinite {
            self.lo + t / (1.0 - t)
        } else {
            self.lo + t * self.width
        }
    }
}

enum Component {
    Line(Tabulated),
    /// s-marginal table plus the joint density for conditional inversion.
    Plane(Tabulated, Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>, (f64, f64)),
    Diagonal(Tabulated),
    Atom([f64; 2]),
}

/// Prepared sampler for a Poisson process with finite mean measure; the
/// mass is split over the off-diagonal density, the diagonal density and
/// the atoms.
pub struct PrmSampler {
    dim: usize,
    total: f64,
    weights: Vec<f64>,
    parts: Vec<Component>,
}

impl PrmSampler {
    pub fn new(spec: &IntensitySpec) -> Result<Self> {
        let mut weights = Vec::new();
        let mut parts = Vec::new();
        let dim = match spec.region {
            Region::Interval { .. } => 1,
            Region::Rectangle { .. } => 2,
        };
        match (&spec.density, spec.region) {
            (Some(Density::Line(f)), Region::Interval { lo, hi }) => {
                let f = f.clone();
                let tab = Tabulated::new(move |x| f(x), lo, hi)?;
                weights.push(tab.mass());
                parts.push(Component::Line(tab));
            }
            (Some(Density::Plane(f)), Region::Rectangle { s, t }) => {
                let g = f.clone();
                let marginal = Tabulated::new(
                    move |x| {
                        if x > t.0 && x < t.1 {
                            quad(|y| g(x, y), t.0, x, 1e-15, 1e-10).value + quad(|y| g(x, y), x, t.1, 1e-15, 1e-10).value
                        } else {
                            quad(|y| g(x, y), t.0, t.1, 1e-15, 1e-10).value
                        }
                    },
                    s.0,
                    s.1,
                )?;
                weights.push(marginal.mass());
                parts.push(Component::Plane(marginal, f.clone(), t));
            }
            (None, _) => {}
            _ => return Err(Error::InvalidParameter("density dimension does not match region".into())),
        }
        if let (Some(d), Region::Rectangle { s, t }) = (&spec.diagonal, spec.region) {
            let (lo, hi) = (s.0.max(t.0), s.1.min(t.1));
            if hi > lo {
                let d = d.clone();
                let tab = Tabulated::new(move |x| d(x), lo, hi)?;
                weights.push(tab.mass());
                parts.push(Component::Diagonal(tab));
            }
        }
        for (loc, m) in &spec.atoms {
            check(*m >= 0.0, || "atom masses must be nonnegative".into())?;
            weights.push(*m);
            parts.push(Component::Atom([loc[0], loc.get(1).copied().unwrap_or(0.0)]));
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() {
            return Err(Error::InvalidParameter("infinite total mass".into()));
        }
        Ok(PrmSampler { dim, total, weights, parts })
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// One location drawn from the normalized mean measure.
    pub fn location(&self, rng: &mut rng::Rng) -> [f64; 2] {
        let mut u = rng.random::<f64>() * self.total;
        let mut idx = self.parts.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            if u < *w {
                idx = i;
                break;
            }
            u -= w;
        }
        match &self.parts[idx] {
            Component::Line(t) => [t.sample(rng.random()), 0.0],
            Component::Diagonal(t) => {
                let s = t.sample(rng.random());
                [s, s]
            }
            Component::Atom(p) => *p,
            Component::Plane(marg, f, (t0, t1)) => {
                let s = marg.sample(rng.random());
                let w: f64 = rng.random();
                let cond = |y: f64| {
                    if s > *t0 && s < *t1 && y > s {
                        quad(|v| f(s, v), *t0, s, 1e-15, 1e-11).value + quad(|v| f(s, v), s, y, 1e-15, 1e-11).value
                    } else {
                        quad(|v| f(s, v), *t0, y, 1e-15, 1e-11).value
                    }
                };
                let total = cond(if t1.is_finite() { *t1 } else { f64::INFINITY });
                // conditional inversion in t = y/(1+|y|) keeps the bracket finite
                let to_y = |z: f64| if t1.is_finite() { z } else { *t0 + z / (1.0 - z) };
                let (zlo, zhi) = if t1.is_finite() { (*t0, *t1) } else { (0.0, 1.0 - 1e-15) };
                let z = bisect(|z| cond(to_y(z)) - w * total, zlo, zhi, 1e-13).unwrap_or(zhi);
                [s, to_y(z)]
            }
        }
    }

    pub fn sample(&self, rng: &mut rng::Rng) -> PointConfiguration {
        let count = if self.total > 0.0 {
            Poisson::new(self.total).map(|p| p.sample(rng) as usize).unwrap_or(0)
        } else {
            0
        };
        let points = (0..count).map(|_| self.location(rng)).collect();
        PointConfiguration { dim: self.dim, points }
    }
}

pub fn sample_prm(intensity: &IntensitySpec, seed: u64) -> Result<PointConfiguration> {
    let s = PrmSampler::new(intensity)?;
    Ok(s.sample(&mut rng::stream(seed, 4)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Immigration,
    Death,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub point: [f64; 2],
}

/// Event list of an immigration-death run; states are replayed on demand.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub initial: PointConfiguration,
    pub events: Vec<Event>,
    pub horizon: f64,
}

impl Trajectory {
    pub fn size_at(&self, t: f64) -> usize {
        let mut m = self.initial.len() as i64;
        for e in self.events.iter().take_while(|e| e.time <= t) {
            m += if e.kind == EventKind::Immigration { 1 } else { -1 };
        }
        m as usize
    }

    pub fn state_at(&self, t: f64) -> PointConfiguration {
        let mut pts = self.initial.points.clone();
        for e in self.events.iter().take_while(|e| e.time <= t) {
            match e.kind {
                EventKind::Immigration => pts.push(e.point),
                EventKind::Death => {
                    if let Some(i) = pts.iter().position(|p| p == &e.point) {
                        pts.swap_remove(i);
                    }
                }
            }
        }
        PointConfiguration { dim: self.initial.dim, points: pts }
    }

    pub fn final_state(&self) -> PointConfiguration {
        self.state_at(self.horizon)
    }
}

/// Event-driven run: hold `Exp(|xi| + lambda)`, then immigrate with
/// probability `lambda / (|xi| + lambda)` at a location from the normalized
/// intensity, otherwise remove a uniformly chosen point.
pub fn immigration_death(sampler: &PrmSampler, initial: &PointConfiguration, horizon: f64, rng: &mut rng::Rng) -> Trajectory {
    let lambda = sampler.total_mass();
    let mut pts = initial.points.clone();
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        let rate = pts.len() as f64 + lambda;
        if rate <= 0.0 {
            break;
        }
        t += Exp::new(rate).expect("positive rate").sample(rng);
        if t > horizon {
            break;
        }
        if rng.random::<f64>() * rate < lambda {
            let p = sampler.location(rng);
            pts.push(p);
            events.push(Event { time: t, kind: EventKind::Immigration, point: p });
        } else {
            let i = rng.random_range(0..pts.len());
            let p = pts.swap_remove(i);
            events.push(Event { time: t, kind: EventKind::Death, point: p });
        }
    }
    Trajectory { initial: initial.clone(), events, horizon }
}

pub fn immigration_death_simulate(
    intensity: &IntensitySpec,
    initial: &PointConfiguration,
    horizon: f64,
    seed: u64,
) -> Result<Trajectory> {
    let sampler = if intensity.density.is_none() && intensity.diagonal.is_none() && intensity.atoms.is_empty() {
        PrmSampler { dim: initial.dim, total: 0.0, weights: Vec::new(), parts: Vec::new() }
    } else {
        PrmSampler::new(intensity)?
    };
    Ok(immigration_death(&sampler, initial, horizon, &mut rng::stream(seed, 5)))
}

/// Runs `f(replicate_rng)` for every replicate on all available cores; the
/// output is ordered by replicate index and independent of scheduling.
pub fn replicate<T: Send, F: Fn(&mut rng::Rng) -> T + Sync>(seed: u64, reps: usize, f: F) -> Vec<T> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(reps.max(1));
    let chunk = reps.div_ceil(workers.max(1)).max(1);
    let mut out: Vec<Option<T>> = (0..reps).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (c, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (j, s) in slot.iter_mut().enumerate() {
                    let idx = (c * chunk + j) as u64;
                    let mut r = rng::stream(rng::replicate_seed(seed, idx), 0);
                    *s = Some(f(&mut r));
                }
            });
        }
    });
    out.into_iter().map(|x| x.expect("every replicate runs")).collect()
}

/// Empirical law of nonnegative counts as a probability vector.
pub fn empirical_law(counts: &[usize]) -> Vec<f64> {
    let m = counts.iter().copied().max().unwrap_or(0);
    let mut law = vec![0.0; m + 1];
    for &c in counts {
        law[c] += 1.0;
    }
    let n = counts.len().max(1) as f64;
    law.iter_mut().for_each(|x| *x /= n);
    law
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stein_bounds::{binomial_pmf, exact_dtv_pmf, poisson_pmf, poisson_tail_index};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn config(dim: usize) -> impl Strategy<Value = PointConfiguration> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..7).prop_map(move |v| {
            let pts: Vec<[f64; 2]> = v.into_iter().map(|(a, b)| [a, if dim == 1 { 0.0 } else { b }]).collect();
            PointConfiguration { dim, points: pts }
        })
    }

    #[test]
    fn d1_examples() {
        let a = PointConfiguration::line(&[0.1, 0.5, 2.0]);
        assert_eq!(d1_distance(&a, &a), 0.0);
        assert_eq!(d1_distance(&a, &PointConfiguration::line(&[0.1])), 1.0);
        let mut b = a.clone();
        b.points.push([0.3, 0.0]);
        let mut c = a.clone();
        c.points.push([0.45, 0.0]);
        assert_relative_eq!(d1_distance(&b, &c), 0.15 / 4.0, epsilon = 1e-15);
        let reordered = PointConfiguration::line(&[2.0, 0.1, 0.5]);
        assert_eq!(a, reordered);
    }

    #[test]
    fn mppe_examples() {
        let law = MarginalLaw::exponential(1.0).unwrap();
        let n = 10_000usize;
        let norm = [(1.0, (n as f64).ln()), (1.0, 0.0)];
        let all = MppeSpec::new(MarkLaw::Marginal(law), ExceedanceRegion::Everything, 50, norm).unwrap();
        assert_eq!(simulate_mppe(&all, 1).len(), 50);
        let none = MppeSpec::new(MarkLaw::Marginal(law), ExceedanceRegion::Nothing, 50, norm).unwrap();
        assert!(simulate_mppe(&none, 1).is_empty());
        let ray = MppeSpec::new(MarkLaw::Marginal(law), ExceedanceRegion::Ray { u: 0.0 }, n, norm).unwrap();
        let counts = replicate(3, 500, |r| simulate_mppe(&ray, r.random()).len());
        let mean = counts.iter().sum::<usize>() as f64 / 500.0;
        assert!((mean - 1.0).abs() < 6.0 * (1.0f64 / 500.0).sqrt());
    }

    #[test]
    fn mppe_counts_are_binomial() {
        let law = MarginalLaw::StdNormal;
        let n = 40usize;
        let spec = MppeSpec::new(MarkLaw::Marginal(law), ExceedanceRegion::Ray { u: 1.0 }, n, [(1.0, 0.0), (1.0, 0.0)]).unwrap();
        let counts = replicate(21, 100_000, |r| simulate_mppe(&spec, r.random()).len());
        let emp = empirical_law(&counts);
        let p = law.survival(1.0);
        let d = exact_dtv_pmf(|k| emp.get(k as usize).copied().unwrap_or(0.0), |k| binomial_pmf(n as u64, p, k), n as u64, 1e-14).unwrap();
        assert!(d <= 0.02, "{d}");
    }

    #[test]
    fn prm_samples() {
        let zero = IntensitySpec::line(0.0, 1.0, |_| 0.0);
        assert!(PrmSampler::new(&zero).is_err());
        let atoms = IntensitySpec::atoms(Region::Interval { lo: 0.0, hi: 10.0 }, vec![]);
        assert!(sample_prm(&atoms, 1).unwrap().is_empty());
        let lattice = IntensitySpec::atoms(Region::Interval { lo: 0.0, hi: 10.0 }, vec![(vec![1.0], 2.0), (vec![2.5], 1.0)]);
        let s = sample_prm(&lattice, 4).unwrap();
        assert!(s.points.iter().all(|p| p[0] == 1.0 || p[0] == 2.5));

        let e = IntensitySpec::line(0.0, f64::INFINITY, |x| (-x).exp());
        let sampler = PrmSampler::new(&e).unwrap();
        assert_relative_eq!(sampler.total_mass(), 1.0, epsilon = 1e-10);
        let runs = replicate(8, 10_000, |r| sampler.sample(r));
        let mean = runs.iter().map(|c| c.len()).sum::<usize>() as f64 / 1e4;
        assert!((mean - 1.0).abs() < 0.05);
        let mut xs: Vec<f64> = runs.iter().flat_map(|c| c.points.iter().map(|p| p[0])).collect();
        xs.sort_by(f64::total_cmp);
        let m = xs.len() as f64;
        let ks = xs.iter().enumerate().map(|(i, &x)| ((i as f64 + 1.0) / m - (1.0 - (-x).exp())).abs()).fold(0.0, f64::max);
        assert!(ks <= 0.02, "{ks}");
    }

    #[test]
    fn prm_disjoint_counts_uncorrelated() {
        let f = IntensitySpec::line(0.0, 4.0, |x| 1.0 + x);
        let sampler = PrmSampler::new(&f).unwrap();
        let runs = replicate(9, 20_000, |r| {
            let c = sampler.sample(r);
            let a = c.points.iter().filter(|p| p[0] < 1.5).count() as f64;
            (a, c.len() as f64 - a)
        });
        let n = runs.len() as f64;
        let (ma, mb) = (runs.iter().map(|x| x.0).sum::<f64>() / n, runs.iter().map(|x| x.1).sum::<f64>() / n);
        let cov = runs.iter().map(|x| (x.0 - ma) * (x.1 - mb)).sum::<f64>() / n;
        assert_relative_eq!(ma, 1.5 + 1.125, max_relative = 0.03);
        assert!(cov.abs() < 6.0 * (ma * mb / n).sqrt(), "{cov}");
    }

    #[test]
    fn prm_in_the_plane_with_diagonal() {
        let f = IntensitySpec::plane((0.0, 2.0), (0.0, 2.0), |s, t| if t > s { 1.0 } else { 0.5 }).with_diagonal(|_| 1.0);
        let sampler = PrmSampler::new(&f).unwrap();
        assert_relative_eq!(sampler.total_mass(), 2.0 + 1.0 + 2.0, max_relative = 1e-8);
        let runs = replicate(10, 4000, |r| sampler.sample(r));
        let pts: Vec<[f64; 2]> = runs.iter().flat_map(|c| c.points.clone()).collect();
        let m = pts.len() as f64;
        let diag = pts.iter().filter(|p| p[0] == p[1]).count() as f64 / m;
        let upper = pts.iter().filter(|p| p[1] > p[0]).count() as f64 / m;
        assert!((diag - 0.4).abs() < 0.02 && (upper - 0.4).abs() < 0.02);
    }

    #[test]
    fn pure_death_and_equilibrium() {
        let none = IntensitySpec::atoms(Region::Interval { lo: 0.0, hi: 1.0 }, vec![]);
        let start = PointConfiguration::line(&[0.1, 0.2, 0.3, 0.4]);
        let tr = immigration_death_simulate(&none, &start, 100.0, 2).unwrap();
        assert!(tr.events.iter().all(|e| e.kind == EventKind::Death));
        assert_eq!(tr.final_state().len(), 0);

        let lam = 2.0;
        let f = IntensitySpec::line(0.0, 1.0, move |_| lam);
        let sampler = PrmSampler::new(&f).unwrap();
        let counts = replicate(17, 20_000, |r| immigration_death(&sampler, &PointConfiguration::empty(1), 10.0, r).final_state().len());
        let emp = empirical_law(&counts);
        let m = poisson_tail_index(lam, 1e-14);
        let d = exact_dtv_pmf(|k| emp.get(k as usize).copied().unwrap_or(0.0), |k| poisson_pmf(lam, k), m.max(emp.len() as u64), 1e-14).unwrap();
        assert!(d <= 0.02, "{d}");
    }

    #[test]
    fn replicates_are_deterministic() {
        let a = replicate(5, 100, |r| r.random::<u64>());
        let b = replicate(5, 100, |r| r.random::<u64>());
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn single_point_difference(base in config(2), z in (-2.0f64..2.0, -2.0f64..2.0), w in (-2.0f64..2.0, -2.0f64..2.0)) {
            let (z, w) = ([z.0, z.1], [w.0, w.1]);
            let mut a = base.clone();
            a.points.push(z);
            let mut b = base.clone();
            b.points.push(w);
            let m = base.len() as f64;
            prop_assert!((d1_distance(&a, &b) - d0(z, w) / (m + 1.0)).abs() <= 1e-12);
        }

        #[test]
        fn d1_is_a_metric(a in config(2), b in config(2), c in config(2)) {
            let (ab, bc, ac) = (d1_distance(&a, &b), d1_distance(&b, &c), d1_distance(&a, &c));
            prop_assert!((ab - d1_distance(&b, &a)).abs() <= 1e-12);
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(d1_distance(&a, &a), 0.0);
        }
    }
}

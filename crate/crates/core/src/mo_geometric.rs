//! Exceedance processes with Marshall-Olkin geometric marks.
//!
//! Marks are normalized as `k* = k L - log n` with `L = log(1/p00)`, so the
//! mean measure lives on the lattice `(L Z+ - log n)^2`. The lattice mass is
//! spread into a piecewise continuous intensity plus a diagonal density,
//! which in turn is compared with the `(gamma, delta)` limit intensity.

use serde::Serialize;

use crate::distributions::MOGeometricLaw;
use crate::error::{check, Error, Result};
use crate::numeric::{quad, quad2};
use crate::report::BoundReport;
use crate::stein_bounds::{prm_dtv_bound, IntensitySpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MOGeoScenario {
    pub gamma: f64,
    pub delta: f64,
    pub p11: f64,
    pub n: f64,
    pub u_star: f64,
    #[serde(skip)]
    pub law: MOGeometricLaw,
}

impl MOGeoScenario {
    pub fn new(gamma: f64, delta: f64, p11: f64, n: f64, u_star: f64) -> Result<Self> {
        check(n >= 1.0 && n.is_finite(), || format!("n must be >= 1, got {n}"))?;
        check(u_star >= -n.ln(), || format!("need u* >= -log n = {}, got {u_star}", -n.ln()))?;
        let law = MOGeometricLaw::from_rates(gamma, delta, p11)?;
        Ok(MOGeoScenario { gamma, delta, p11, n, u_star, law })
    }

    pub fn c(&self) -> f64 {
        1.0 + self.gamma + self.delta
    }

    /// Lattice step `log(1/p00)`.
    pub fn step(&self) -> f64 {
        -self.law.p00.ln()
    }

    pub fn log_n(&self) -> f64 {
        self.n.ln()
    }

    /// Lattice coordinate of the integer `k`.
    pub fn lattice_point(&self, k: u64) -> f64 {
        k as f64 * self.step() - self.log_n()
    }

    /// Integer behind a lattice coordinate, if it is one.
    pub fn lattice_index(&self, x: f64) -> Option<u64> {
        let k = (x + self.log_n()) / self.step();
        let r = k.round();
        ((k - r).abs() <= 1e-9 * r.max(1.0) && r >= 0.0).then_some(r as u64)
    }

    /// First lattice index at or above `x`.
    pub fn ceil_index(&self, x: f64) -> u64 {
        let k = (x + self.log_n()) / self.step();
        let r = k.round();
        if (k - r).abs() <= 1e-9 * r.max(1.0) { r.max(0.0) as u64 } else { k.ceil().max(0.0) as u64 }
    }

    fn floor_index(&self, x: f64) -> Option<u64> {
        let k = (x + self.log_n()) / self.step();
        let r = k.round();
        let f = if (k - r).abs() <= 1e-9 * r.max(1.0) { r } else { k.floor() };
        (f >= 0.0).then_some(f.min(u64::MAX as f64 / 4.0) as u64)
    }
}

/// `P(X1* = k*, X2* = l*)` in exponential form.
pub fn normalized_pmf(sc: &MOGeoScenario, ks: f64, ls: f64) -> Result<f64> {
    let (Some(_), Some(_)) = (sc.lattice_index(ks), sc.lattice_index(ls)) else {
        return Err(Error::Domain(format!("({ks}, {ls}) is not on the lattice")));
    };
    let MOGeometricLaw { q1, q2, p00 } = sc.law;
    let lp = p00.ln();
    let n = sc.n;
    Ok(if (ks - ls).abs() <= 1e-9 * sc.step() {
        (1.0 - q1 - q2 + p00) / n * (-ks).exp()
    } else if ks < ls {
        let (a, b) = ((p00 / q2).ln() / lp, q2.ln() / lp);
        (1.0 - p00 / q2 - q2 + p00) / n * (-a * ks - b * ls).exp()
    } else {
        let (a, b) = (q1.ln() / lp, (p00 / q1).ln() / lp);
        (1.0 - q1 - p00 / q1 + p00) / n * (-a * ks - b * ls).exp()
    })
}

/// Closed rectangle `[s0, s1] x [t0, t1]` in normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub s: (f64, f64),
    pub t: (f64, f64),
}

impl Rect {
    /// `[u*, inf)^2`.
    pub fn quadrant(u: f64) -> Self {
        Rect { s: (u, f64::INFINITY), t: (u, f64::INFINITY) }
    }
}

/// `pi*(B*) = n P((X1*, X2*) in B*)`.
pub fn lattice_mean_measure(sc: &MOGeoScenario, b: &Rect) -> f64 {
    let (k0, l0) = (sc.ceil_index(b.s.0), sc.ceil_index(b.t.0));
    let (Some(k1), Some(l1)) = (sc.floor_index(b.s.1), sc.floor_index(b.t.1)) else {
        return 0.0;
    };
    if k1 < k0 || l1 < l0 {
        return 0.0;
    }
    let law = &sc.law;
    if (k1 - k0) <= 2000 && (l1 - l0) <= 2000 {
        let mut sum = 0.0;
        for k in k0..=k1 {
            for l in l0..=l1 {
                sum += law.pmf(k as i64, l as i64).unwrap_or(0.0);
            }
        }
        return sc.n * sum;
    }
    let s = |k: u64, l: u64| law.survival(k as f64, l as f64);
    let (ke, le) = (k1.saturating_add(1), l1.saturating_add(1));
    sc.n * (s(k0, l0) - s(ke, l0) - s(k0, le) + s(ke, le)).max(0.0)
}

/// Off-diagonal density of the spread lattice measure.
pub fn constructed_intensity(sc: &MOGeoScenario, s: f64, t: f64) -> f64 {
    if s == t {
        return 0.0;
    }
    let MOGeometricLaw { q1, q2, p00 } = sc.law;
    let lp = p00.ln();
    let l2 = lp * lp;
    if s < t {
        let (a, b) = ((p00 / q2).ln() / lp, q2.ln() / lp);
        (p00 / q2).ln() * q2.ln() / l2 * (-a * s - b * t).exp()
    } else {
        let (a, b) = (q1.ln() / lp, (p00 / q1).ln() / lp);
        (p00 / q1).ln() * q1.ln() / l2 * (-a * s - b * t).exp()
    }
}

/// Density on the diagonal, parameterized by projection on the `s`-axis.
pub fn constructed_diagonal(sc: &MOGeoScenario, s: f64) -> f64 {
    let MOGeometricLaw { q1, q2, p00 } = sc.law;
    (p00 / (q1 * q2)).ln() / sc.step() * (-s).exp()
}

pub fn limit_intensity_gd(gamma: f64, delta: f64, s: f64, t: f64) -> f64 {
    let c = 1.0 + gamma + delta;
    if s < t {
        gamma * (1.0 + delta) / (c * c) * (-gamma * s / c - (1.0 + delta) * t / c).exp()
    } else if s > t {
        delta * (1.0 + gamma) / (c * c) * (-(1.0 + gamma) * s / c - delta * t / c).exp()
    } else {
        0.0
    }
}

pub fn limit_diagonal_gd(gamma: f64, delta: f64, s: f64) -> f64 {
    (-s).exp() / (1.0 + gamma + delta)
}

/// Mass of the constructed measure on a rectangle, by quadrature.
pub fn constructed_mass(sc: &MOGeoScenario, b: &Rect) -> f64 {
    let sc2 = *sc;
    let area = quad2(move |s, t| constructed_intensity(&sc2, s, t), b.s, b.t, true, 1e-14, 1e-12).value;
    let (lo, hi) = (b.s.0.max(b.t.0), b.s.1.min(b.t.1));
    let diag = if hi > lo { quad(|s| constructed_diagonal(sc, s), lo, hi, 1e-15, 1e-13).value } else { 0.0 };
    area + diag
}

/// The constructed measure and the limit measure over `[u*, inf)^2`.
pub fn intensity_specs(sc: &MOGeoScenario) -> (IntensitySpec, IntensitySpec) {
    let a = Rect::quadrant(sc.u_star);
    let (s1, s2) = (*sc, *sc);
    let (g, d) = (sc.gamma, sc.delta);
    let built = IntensitySpec::plane(a.s, a.t, move |s, t| constructed_intensity(&s1, s, t))
        .with_diagonal(move |s| constructed_diagonal(&s2, s));
    let limit = IntensitySpec::plane(a.s, a.t, move |s, t| limit_intensity_gd(g, d, s, t))
        .with_diagonal(move |s| limit_diagonal_gd(g, d, s));
    (built, limit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
    /// `min(lhs - lower, upper - lhs)`.
    pub slack: f64,
}

impl Inequality {
    fn new(lhs: f64, lower: f64, upper: f64) -> Self {
        let tol = 1e-15 * (1.0 + upper.abs());
        Inequality { lhs, lower, upper, holds: lhs >= lower - tol && lhs <= upper + tol, slack: (lhs - lower).min(upper - lhs) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaConditions {
    pub items: [Inequality; 5],
}

impl LemmaConditions {
    pub fn all_hold(&self) -> bool {
        self.items.iter().all(|i| i.holds)
    }
}

/// The five exponent inequalities between the lattice law and its limit.
pub fn lemma_cond_check(gamma: f64, delta: f64, p11: f64) -> Result<LemmaConditions> {
    let c = 1.0 + gamma + delta;
    check(gamma >= 0.0 && delta >= 0.0, || format!("gamma, delta must be >= 0, got ({gamma}, {delta})"))?;
    check(p11 > 0.0 && c * p11 < 1.0, || format!("need (1+gamma+delta) p11 < 1, got {}", c * p11))?;
    let q1 = 1.0 - (1.0 + gamma) * p11;
    let q2 = 1.0 - (1.0 + delta) * p11;
    let p00 = 1.0 - c * p11;
    let d = 1.0 - c * p11;
    let lp = p00.ln();
    let inf = f64::INFINITY;
    Ok(LemmaConditions {
        items: [
            Inequality::new((1.0 + delta) / c - q2.ln() / lp, 0.0, gamma * p11 / d),
            Inequality::new((1.0 + gamma) / c - q1.ln() / lp, 0.0, delta * p11 / d),
            Inequality::new((q2 / p00).ln(), 0.0, gamma * p11 / d),
            Inequality::new((q1 / p00).ln(), 0.0, delta * p11 / d),
            Inequality::new(-lp * (p00 / (q1 * q2)).ln(), -inf, c * p11 / (d * d)),
        ],
    })
}

/// Three-stage ledger for the distance between the exceedance process
/// and the Poisson process with the limit intensity on `[u*, inf)^2`.
///
/// Stages: lattice Poisson process (total variation), spread continuous
/// intensity (`d2`), limit intensity (`d2`). The summary bound is the sum of
/// the terms; its slack over the stage sum is listed as its own term.
pub fn bound_ledger(sc: &MOGeoScenario) -> Result<BoundReport> {
    let (c, p, u) = (sc.c(), sc.p11, sc.u_star);
    let d = 1.0 - c * p;
    let e = (-u).exp();
    let m = e.min(1.65 * (-u / 2.0).exp());
    let rt8 = 2.0 * 2f64.sqrt();
    let stage1 = e / sc.n;
    let stage2 = c * p / (d * d) * (rt8 + 3.0 * m);
    let stage3 = 4.0 * c * c * p / d.powi(3) * m;
    let stage3_tv = 4.0 * c * c * p / d.powi(3) * e;
    let corollary = stage1 + c * c * p / d.powi(3) * (rt8 + 7.0 * m);
    let slack = corollary - (stage1 + stage2 + stage3);
    check(slack >= -1e-12 * corollary, || format!("summary bound below its stages by {}", -slack))?;
    Ok(BoundReport::new("mo-geometric")
        .meta("n", sc.n)
        .meta("u_star", u)
        .meta("gamma", sc.gamma)
        .meta("delta", sc.delta)
        .meta("p11", p)
        .meta("lattice_mass", lattice_mean_measure(sc, &Rect::quadrant(u)))
        .meta("stage3_tv", stage3_tv)
        .meta("corollary", corollary)
        .term("lattice", "e^-u*/n", stage1, "mo-geometric/lattice")
        .term("spread", "c p11/D^2 (2 sqrt2 + 3m)", stage2, "mo-geometric/spread")
        .term("limit", "4 c^2 p11/D^3 m", stage3, "mo-geometric/limit")
        .term("summary", "summary slack", slack.max(0.0), "mo-geometric/summary"))
}

/// `∫ |lambda* - lambda_gd|` over `[u*, inf)^2`, the quantity behind the
/// limit-stage term.
pub fn limit_stage_integral(sc: &MOGeoScenario) -> Result<f64> {
    let (a, b) = intensity_specs(sc);
    prm_dtv_bound(&a, &b)
}

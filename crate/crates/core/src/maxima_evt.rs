//! Extreme-value cdfs, Kolmogorov-distance bounds for normalized maxima of
//! i.i.d. samples, a grid-sup oracle for those distances, and bounds for
//! the Poisson approximation of the normalized exceedance process.

use serde::Serialize;

use crate::distributions::{std_normal_pdf, MarginalLaw};
use crate::error::{check, Error, Result};
use crate::numeric::bisect;
use crate::report::BoundReport;
use crate::stein_bounds::{dtv_binomial_poisson, prm_dtv_bound, IntensitySpec};

use std::f64::consts::{E, PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Evd {
    Frechet { alpha: f64 },
    Weibull { alpha: f64 },
    Gumbel,
}

impl Evd {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Evd::Frechet { alpha } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-alpha)).exp()
                }
            }
            Evd::Weibull { alpha } => {
                if x >= 0.0 {
                    1.0
                } else {
                    (-(-x).powf(alpha)).exp()
                }
            }
            Evd::Gumbel => (-(-x).exp()).exp(),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let t = -p.ln();
        match *self {
            Evd::Frechet { alpha } => t.powf(-1.0 / alpha),
            Evd::Weibull { alpha } => -t.powf(1.0 / alpha),
            Evd::Gumbel => -t.ln(),
        }
    }
}

/// Approximation stage; which stages apply depends on the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// `F^n(y)` against `exp(-n F̄(y))` (normal, Cauchy).
    Poisson,
    /// `F^n(y)` against `exp(-n phi(y)/y)` (normal, `y > 0`).
    Mills,
    /// Normalized maximum against its extreme-value limit.
    Limit,
    /// Geometric maximum against a Gumbel cdf on the lattice only.
    Lattice,
    /// Geometric maximum against the Gumbel cdf, scale `log(1/q)`.
    Discretized,
    /// Geometric maximum against the Gumbel cdf, scale `1 - q`.
    Linearized,
}

impl Stage {
    /// Stage from a family-relative letter `a`, `b`, `c` or a stage name.
    pub fn parse(law: &MarginalLaw, s: &str) -> Result<Stage> {
        let st = match (law, s) {
            (_, "poisson") => Stage::Poisson,
            (_, "mills") => Stage::Mills,
            (_, "limit") => Stage::Limit,
            (_, "lattice") => Stage::Lattice,
            (_, "discretized") => Stage::Discretized,
            (_, "linearized") => Stage::Linearized,
            (MarginalLaw::StdNormal, "a") => Stage::Poisson,
            (MarginalLaw::StdNormal, "b") => Stage::Mills,
            (MarginalLaw::StdNormal, "c") => Stage::Limit,
            (MarginalLaw::StdCauchy, "a") => Stage::Poisson,
            (MarginalLaw::StdCauchy, "b") => Stage::Limit,
            (MarginalLaw::Geometric { .. }, "a") => Stage::Lattice,
            (MarginalLaw::Geometric { .. }, "b") => Stage::Discretized,
            (MarginalLaw::Geometric { .. }, "c") => Stage::Linearized,
            (_, "a") => Stage::Limit,
            _ => return Err(Error::InvalidParameter(format!("unknown stage '{s}'"))),
        };
        Ok(st)
    }

    pub fn default_for(law: &MarginalLaw) -> Stage {
        match law {
            MarginalLaw::Geometric { .. } => Stage::Lattice,
            _ => Stage::Limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxScenario {
    pub law: MarginalLaw,
    pub n: u64,
    pub stage: Stage,
}

/// Normal norming constants `(a_n, b_n)`.
pub fn normal_norming(n: u64) -> (f64, f64) {
    let ln = (n as f64).ln();
    let r = (2.0 * ln).sqrt();
    (1.0 / r, r - (ln.ln() + (4.0 * PI).ln()) / (2.0 * r))
}

fn min_n(stage: Stage, law: &MarginalLaw) -> u64 {
    match (law, stage) {
        (MarginalLaw::StdNormal, Stage::Mills | Stage::Limit) => 21,
        (MarginalLaw::StdNormal, _) => 2,
        (MarginalLaw::Geometric { .. }, _) => 1,
        _ => 2,
    }
}

impl MaxScenario {
    pub fn new(law: MarginalLaw, n: u64, stage: Stage) -> Result<Self> {
        let ok = matches!(
            (&law, stage),
            (MarginalLaw::Exponential { .. } | MarginalLaw::Pareto { .. } | MarginalLaw::Uniform { .. }, Stage::Limit)
                | (MarginalLaw::StdNormal, Stage::Poisson | Stage::Mills | Stage::Limit)
                | (MarginalLaw::StdCauchy, Stage::Poisson | Stage::Limit)
                | (MarginalLaw::Geometric { .. }, Stage::Lattice | Stage::Discretized | Stage::Linearized)
        );
        if !ok {
            return Err(Error::InvalidParameter(format!("stage {stage:?} does not apply to {law:?}")));
        }
        let need = min_n(stage, &law);
        if n < need {
            return Err(Error::Gate(format!("stage {stage:?} needs n >= {need}, got n = {n}")));
        }
        Ok(MaxScenario { law, n, stage })
    }

    /// `(a_n, b_n)` with `y = a_n x + b_n`; `None` for comparisons made
    /// directly in the original scale.
    pub fn norming(&self) -> Option<(f64, f64)> {
        let nf = self.n as f64;
        let ln = nf.ln();
        match (self.law, self.stage) {
            (MarginalLaw::Exponential { rate }, _) => Some((1.0 / rate, ln / rate)),
            (MarginalLaw::Pareto { shape, scale }, _) => Some((scale * nf.powf(1.0 / shape), 0.0)),
            (MarginalLaw::Uniform { a, b }, _) => Some(((b - a) / nf, b)),
            (MarginalLaw::StdNormal, Stage::Limit) => Some(normal_norming(self.n)),
            (MarginalLaw::StdCauchy, Stage::Limit) => Some((nf / PI, 0.0)),
            (MarginalLaw::Geometric { q }, Stage::Lattice | Stage::Discretized) => {
                let l = -q.ln();
                Some((1.0 / l, ln / l))
            }
            (MarginalLaw::Geometric { q }, Stage::Linearized) => Some((1.0 / (1.0 - q), ln / (1.0 - q))),
            _ => None,
        }
    }

    pub fn target(&self) -> Option<Evd> {
        match (self.law, self.stage) {
            (MarginalLaw::Exponential { .. } | MarginalLaw::StdNormal | MarginalLaw::Geometric { .. }, _) => Some(Evd::Gumbel),
            (MarginalLaw::Pareto { shape, .. }, _) => Some(Evd::Frechet { alpha: shape }),
            (MarginalLaw::Uniform { .. }, _) => Some(Evd::Weibull { alpha: 1.0 }),
            (MarginalLaw::StdCauchy, Stage::Limit) => Some(Evd::Frechet { alpha: 1.0 }),
            _ => None,
        }
    }
}

fn family_tag(law: &MarginalLaw) -> &'static str {
    match law {
        MarginalLaw::Exponential { .. } => "exponential",
        MarginalLaw::Pareto { .. } => "pareto",
        MarginalLaw::Uniform { .. } => "uniform",
        MarginalLaw::StdNormal => "normal",
        MarginalLaw::StdCauchy => "cauchy",
        MarginalLaw::Geometric { .. } => "geometric",
    }
}

/// Kolmogorov-distance bound with per-term breakdown.
pub fn max_bound(sc: &MaxScenario) -> Result<BoundReport> {
    let nf = sc.n as f64;
    let ln = nf.ln();
    let tag = family_tag(&sc.law);
    let anchor = |s: &str| format!("maxima/{tag}/{s}");
    let mut r = BoundReport::new(format!("maxima/{tag}")).meta("n", nf);
    if let Some((a, b)) = sc.norming() {
        r = r.meta("a_n", a).meta("b_n", b);
    }
    r = match (sc.law, sc.stage) {
        (MarginalLaw::Exponential { .. } | MarginalLaw::Pareto { .. } | MarginalLaw::Uniform { .. }, _) => r
            .term("limit", "log n/n", ln / nf, &anchor("limit"))
            .term("limit", "1/n", 1.0 / nf, &anchor("limit")),
        (MarginalLaw::StdNormal, st) => {
            let mut r = r
                .term("poisson", "log n/n", ln / nf, &anchor("poisson"))
                .term("poisson", "1/n", 1.0 / nf, &anchor("poisson"))
                .note("normal cdf evaluated to 1e-12 absolute accuracy");
            if matches!(st, Stage::Mills | Stage::Limit) {
                r = r
                    .term("mills", "1/(2 log n)", 1.0 / (2.0 * ln), &anchor("mills"))
                    .term("mills", "exp(-0.1 sqrt(log n))", (-0.1 * ln.sqrt()).exp(), &anchor("mills"));
            }
            if st == Stage::Limit {
                let c = ln.ln() + (4.0 * PI).ln();
                r = r.term("limit", "69 (log log n + log 4pi)^2/log n", 69.0 * c * c / ln, &anchor("limit"));
            }
            r
        }
        (MarginalLaw::StdCauchy, Stage::Poisson) => r
            .term("poisson", "log n/n", ln / nf, &anchor("poisson"))
            .term("poisson", "1.74/n", 1.74 / nf, &anchor("poisson")),
        (MarginalLaw::StdCauchy, _) => r
            .term("limit", "log n/n", ln / nf, &anchor("limit"))
            .term("limit", "pi^2 log^3 n/(3 n^2)", PI * PI * ln.powi(3) / (3.0 * nf * nf), &anchor("limit"))
            .term("limit", "1/n", 1.0 / nf, &anchor("limit")),
        (MarginalLaw::Geometric { q }, st) => {
            let mut r = r
                .meta("q", q)
                .term("lattice", "log n/(q n)", ln / (q * nf), &anchor("lattice"))
                .term("lattice", "1/n", 1.0 / nf, &anchor("lattice"));
            if matches!(st, Stage::Discretized | Stage::Linearized) {
                r = r.term("discretized", "e^-1 log(1/q)", -q.ln() / E, &anchor("discretized"));
            }
            if st == Stage::Linearized {
                r = r.term(
                    "linearized",
                    "(1-q)/(2q) (log^2 n + e^-1)",
                    (1.0 - q) / (2.0 * q) * (ln * ln + 1.0 / E),
                    &anchor("linearized"),
                );
            }
            r
        }
    };
    Ok(r)
}

/// `P(max < y)` for lattice laws, `P(max <= y)` otherwise.
fn power_cdf(law: &MarginalLaw, y: f64, n: f64) -> f64 {
    let sf = law.survival(y);
    if sf >= 1.0 {
        0.0
    } else {
        (n * (-sf).ln_1p()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    /// Largest difference found; a lower bound on the true supremum.
    pub sup: f64,
    pub argmax: f64,
    /// Grid points in the final refinement (0 for exact lattice sups).
    pub points: usize,
    /// Change of the sup between the last two refinements.
    pub stability: f64,
    /// Upper bound on the difference outside the searched range.
    pub outside: f64,
}

fn grid_sup<F: Fn(f64) -> f64>(diff: F, lo: f64, hi: f64, log_scale: bool) -> Result<(f64, f64, usize, f64)> {
    if !(hi > lo) || (log_scale && lo <= 0.0) {
        return Err(Error::InvalidParameter(format!("degenerate oracle grid [{lo}, {hi}]")));
    }
    let map = |t: f64| if log_scale { (lo.ln() + t * (hi.ln() - lo.ln())).exp() } else { lo + t * (hi - lo) };
    let scan = |m: usize| {
        let mut best = (0.0f64, lo, 0usize);
        for i in 0..=m {
            let d = diff(map(i as f64 / m as f64));
            if d > best.0 {
                best = (d, map(i as f64 / m as f64), i);
            }
        }
        best
    };
    let mut m = 1024usize;
    let mut prev = scan(m);
    loop {
        m *= 2;
        let cur = scan(m);
        let change = (cur.0 - prev.0).abs();
        if (change <= 1e-9 && m >= 8192) || m >= 1 << 21 {
            // golden-section polish around the best grid point
            let h = 1.0 / m as f64;
            let t0 = cur.2 as f64 * h;
            let (mut a, mut b) = ((t0 - h).max(0.0), (t0 + h).min(1.0));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut best = (cur.0, cur.1);
            for _ in 0..60 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                let (fc, fd) = (diff(map(c)), diff(map(d)));
                for (v, t) in [(fc, c), (fd, d)] {
                    if v > best.0 {
                        best = (v, map(t));
                    }
                }
                if fc > fd {
                    b = d;
                } else {
                    a = c;
                }
            }
            return Ok((best.0, best.1, m, change));
        }
        prev = cur;
    }
}

/// Largest `y` with `decreasing(y) >= level`, by bisection on `[lo, hi]`.
fn level_point<F: Fn(f64) -> f64>(f: F, level: f64, lo: f64, hi: f64) -> f64 {
    if f(hi) >= level {
        return hi;
    }
    if f(lo) < level {
        return lo;
    }
    bisect(|y| f(y) - level, lo, hi, 1e-13 * (hi - lo).abs().max(1.0)).unwrap_or(lo)
}

/// [`level_point`] for positive `y`, bisecting in `log y`.
fn level_point_log<F: Fn(f64) -> f64>(f: F, level: f64, lo: f64, hi: f64) -> f64 {
    level_point(|z| f(z.exp()), level, lo.ln(), hi.ln()).exp()
}

/// Grid-sup (or exact lattice sup) of the Kolmogorov distance for the
/// scenario's stage.
pub fn kolmogorov_oracle(sc: &MaxScenario) -> Result<OracleResult> {
    let law = sc.law;
    let nf = sc.n as f64;
    let ln = nf.ln();
    const LO: f64 = 1e-12;
    const HI: f64 = 1.0 - 1e-12;
    match (law, sc.stage) {
        (MarginalLaw::Geometric { q }, stage) => {
            let (a, b) = sc.norming().expect("geometric stages are normed");
            let mut best = (0.0f64, 0.0f64);
            let mut k = 0u64;
            loop {
                let kf = k as f64;
                let c = (nf * (-q.powf(kf)).ln_1p()).exp();
                let c = if k == 0 { 0.0 } else { c };
                if stage == Stage::Lattice {
                    let ks = -ln + kf * (-q.ln());
                    let d = (c - Evd::Gumbel.cdf(ks)).abs();
                    if d > best.0 {
                        best = (d, ks);
                    }
                } else {
                    // P(max < y) equals c on y in (k-1, k]
                    let xr = (kf - b) / a;
                    let xl = (kf - 1.0 - b) / a;
                    for x in [xl, xr] {
                        let d = (c - Evd::Gumbel.cdf(x)).abs();
                        if d > best.0 {
                            best = (d, x);
                        }
                    }
                }
                if c > 1.0 - 1e-16 && k > 0 {
                    break;
                }
                k += 1;
                if k > 100_000_000 {
                    return Err(Error::Numerical("lattice scan did not terminate".into()));
                }
            }
            Ok(OracleResult { sup: best.0, argmax: best.1, points: 0, stability: 0.0, outside: 1e-16 })
        }
        (_, Stage::Poisson | Stage::Mills) => {
            let target = move |y: f64| -> f64 {
                match sc.stage {
                    Stage::Mills => {
                        if y <= 0.0 {
                            0.0
                        } else {
                            (-nf * std_normal_pdf(y) / y).exp()
                        }
                    }
                    _ => (-nf * law.survival(y)).exp(),
                }
            };
            let fnx = move |y: f64| power_cdf(&law, y, nf);
            let (mut lo, hi, log_scale) = match law {
                MarginalLaw::StdNormal => {
                    let lo = level_point(|y| law.survival(y), (-LO.ln() / nf).min(1.0), -40.0, 40.0);
                    let hi = level_point(|y| law.survival(y), -HI.ln() / nf, -40.0, 40.0);
                    (lo, hi, false)
                }
                _ => {
                    let lo = level_point_log(|y| law.survival(y), (-LO.ln() / nf).min(0.5), 1e-9, 1e300);
                    let hi = level_point_log(|y| law.survival(y), -HI.ln() / nf, 1e-9, 1e300);
                    (lo.max(1e-6), hi, true)
                }
            };
            if sc.stage == Stage::Mills || law == MarginalLaw::StdCauchy {
                lo = lo.max(1e-6);
            }
            let (sup, arg, points, stability) = grid_sup(|y| (fnx(y) - target(y)).abs(), lo, hi, log_scale)?;
            let outside = fnx(lo).max(target(lo)).max(1.0 - fnx(hi)).max(1.0 - target(hi));
            Ok(OracleResult { sup, argmax: arg, points, stability, outside })
        }
        (_, Stage::Limit) => {
            let evd = sc.target().expect("limit stage has a target");
            let (a, b) = sc.norming().expect("limit stage is normed");
            let fnx = move |x: f64| power_cdf(&law, a * x + b, nf);
            let (lo, hi) = (evd.quantile(LO), evd.quantile(HI));
            let log_scale = matches!(evd, Evd::Frechet { .. });
            let (sup, arg, points, stability) = grid_sup(|x| (fnx(x) - evd.cdf(x)).abs(), lo, hi, log_scale)?;
            let outside = fnx(lo).max(evd.cdf(lo)).max(1.0 - fnx(hi)).max(1.0 - evd.cdf(hi));
            Ok(OracleResult { sup, argmax: arg, points, stability, outside })
        }
        _ => Err(Error::InvalidParameter(format!("no oracle for {:?}", sc.stage))),
    }
}

/// Bound on the total variation distance between the normalized exceedance
/// process of `n` i.i.d. marks above `u_star` and its Poisson limit, split
/// into the count term (binomial against Poisson) and the intensity term.
///
/// The oracle is the exact binomial-Poisson distance plus the integrated
/// intensity difference.
pub fn exceedance_bound(law: &MarginalLaw, n: u64, u_star: f64) -> Result<BoundReport> {
    let nf = n as f64;
    let ln = nf.ln();
    let tag = family_tag(law);
    let anchor = format!("exceedances/{tag}");
    let base = BoundReport::new(format!("exceedances/{tag}")).meta("n", nf).meta("u_star", u_star);
    let count_oracle = |p: f64| dtv_binomial_poisson(n, p, 1e-14);
    let own = *law;
    let r = match *law {
        MarginalLaw::Exponential { rate } => {
            check(u_star >= -ln, || format!("need u* >= -log n = {}", -ln))?;
            let p = law.survival((u_star + ln) / rate);
            let limit = IntensitySpec::line(u_star, f64::INFINITY, |x| (-x).exp());
            let exact = IntensitySpec::line(u_star, f64::INFINITY, move |x| nf * own.density((x + ln) / rate) / rate);
            let inten = prm_dtv_bound(&exact, &limit)?;
            base.term("count", "e^-u*/n", (-u_star).exp() / nf, &anchor)
                .term("intensity", "0", 0.0, &anchor)
                .with_oracle(count_oracle(p)? + inten)
        }
        MarginalLaw::Pareto { shape, scale } => {
            let floor = nf.powf(-1.0 / shape);
            check(u_star >= floor, || format!("need u* >= n^(-1/alpha) = {floor}"))?;
            let a = scale * nf.powf(1.0 / shape);
            let p = law.survival(a * u_star);
            let exact = IntensitySpec::line(u_star, f64::INFINITY, move |x| nf * a * own.density(a * x));
            let limit = IntensitySpec::line(u_star, f64::INFINITY, move |x| shape * x.powf(-shape - 1.0));
            let inten = prm_dtv_bound(&exact, &limit)?;
            base.term("count", "1/(n u*^alpha)", 1.0 / (nf * u_star.powf(shape)), &anchor)
                .term("intensity", "0", 0.0, &anchor)
                .with_oracle(count_oracle(p)? + inten)
        }
        MarginalLaw::Uniform { a, b } => {
            check(u_star >= -nf && u_star < 0.0, || format!("need -n <= u* < 0, got {u_star}"))?;
            let p = law.survival(b + (b - a) * u_star / nf);
            base.term("count", "-u*/n", -u_star / nf, &anchor)
                .term("intensity", "0", 0.0, &anchor)
                .with_oracle(count_oracle(p)?)
        }
        MarginalLaw::StdNormal => {
            check(n >= 5, || format!("need n >= 5, got {n}"))?;
            let lln = ln.ln();
            check(u_star > -lln && u_star <= 0.0, || format!("need -log log n < u* <= 0, got {u_star}"))?;
            let (an, bn) = normal_norming(n);
            let p = law.survival(an * u_star + bn);
            let exact = IntensitySpec::line(u_star, f64::INFINITY, move |x| nf * an * std_normal_pdf(an * x + bn));
            let limit = IntensitySpec::line(u_star, f64::INFINITY, |x| (-x).exp());
            let inten = prm_dtv_bound(&exact, &limit)?;
            let c = 3.0 * lln + (4.0 * PI).ln();
            base.meta("a_n", an)
                .meta("b_n", bn)
                .term("count", "6 e^-u*/n", 6.0 * (-u_star).exp() / nf, &anchor)
                .term("intensity", "(3 log log n + log 4pi)^2/(16 log n) e^-u*", c * c / (16.0 * ln) * (-u_star).exp(), &anchor)
                .with_oracle(count_oracle(p)? + inten)
        }
        MarginalLaw::StdCauchy => {
            check(u_star > 0.0, || format!("need u* > 0, got {u_star}"))?;
            let p = law.survival(nf * u_star / PI);
            let exact = IntensitySpec::line(u_star, f64::INFINITY, move |x| 1.0 / ((PI / nf).powi(2) + x * x));
            let limit = IntensitySpec::line(u_star, f64::INFINITY, |x| x.powi(-2));
            let inten = prm_dtv_bound(&exact, &limit)?;
            base.term("count", "1/(n u*)", 1.0 / (nf * u_star), &anchor)
                .term("intensity", "pi^2/(3 n^2 u*^3)", PI * PI / (3.0 * nf * nf * u_star.powi(3)), &anchor)
                .with_oracle(count_oracle(p)? + inten)
        }
        MarginalLaw::Geometric { q } => {
            check(u_star >= -ln, || format!("need u* >= -log n = {}", -ln))?;
            let l = -q.ln();
            let p = law.survival((u_star + ln) / l);
            base.meta("q", q)
                .term("count", "e^-u*/n", (-u_star).exp() / nf, &anchor)
                .note("lattice limit; d2 distance to the continuous limit adds 2 min(log(1/q), 1)")
                .meta("d2_discretization", 2.0 * l.min(1.0))
                .with_oracle(count_oracle(p)?)
        }
    };
    Ok(r)
}

//! Bivariate copulas: evaluation, survival copulas, sampling, tail
//! dependence (closed form and extrapolated limits), Frechet-Hoeffding
//! checks and the Marshall-Olkin absolutely continuous / singular split.

use rand::distr::Open01;
use rand::Rng as _;
use serde::Serialize;

use crate::distributions::MOExponentialLaw;
use crate::error::{check, Error, Result};
use crate::numeric::{bisect, extrapolate_limit};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CopulaFamily {
    Independence,
    Comonotonic,
    Countermonotonic,
    Gumbel { theta: f64 },
    Clayton { theta: f64 },
    MarshallOlkin { alpha: f64, beta: f64 },
}

impl CopulaFamily {
    pub fn gumbel(theta: f64) -> Result<Self> {
        check(theta >= 1.0 && theta.is_finite(), || format!("Gumbel needs theta >= 1, got {theta}"))?;
        Ok(CopulaFamily::Gumbel { theta })
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        check(theta >= -1.0 && theta != 0.0 && theta.is_finite(), || {
            format!("Clayton needs theta in [-1, inf) without 0, got {theta}")
        })?;
        Ok(CopulaFamily::Clayton { theta })
    }

    pub fn marshall_olkin(alpha: f64, beta: f64) -> Result<Self> {
        check(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0, || {
            format!("Marshall-Olkin needs alpha, beta in (0,1), got ({alpha}, {beta})")
        })?;
        Ok(CopulaFamily::MarshallOlkin { alpha, beta })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CopulaFamily::Gumbel { theta } => CopulaFamily::gumbel(theta).map(|_| ()),
            CopulaFamily::Clayton { theta } => CopulaFamily::clayton(theta).map(|_| ()),
            CopulaFamily::MarshallOlkin { alpha, beta } => CopulaFamily::marshall_olkin(alpha, beta).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Evaluation without range checks.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        match *self {
            CopulaFamily::Independence => u * v,
            CopulaFamily::Comonotonic => u.min(v),
            CopulaFamily::Countermonotonic => (u + v - 1.0).max(0.0),
            CopulaFamily::Gumbel { theta } => {
                if u >= 1.0 {
                    return v.min(1.0);
                }
                if v >= 1.0 {
                    return u;
                }
                let a = (-u.ln()).powf(theta) + (-v.ln()).powf(theta);
                (-a.powf(1.0 / theta)).exp()
            }
            CopulaFamily::Clayton { theta } => {
                let s = u.powf(-theta) + v.powf(-theta) - 1.0;
                if s <= 0.0 {
                    0.0
                } else {
                    s.powf(-1.0 / theta).min(u.min(v))
                }
            }
            CopulaFamily::MarshallOlkin { alpha, beta } => {
                if u.powf(alpha) >= v.powf(beta) {
                    u.powf(1.0 - alpha) * v
                } else {
                    u * v.powf(1.0 - beta)
                }
            }
        }
    }

    /// `P(V <= v | U = u)`.
    fn conditional(&self, u: f64, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        match *self {
            CopulaFamily::Independence => v,
            CopulaFamily::Gumbel { theta } => {
                let (x, y) = (-u.ln(), -v.ln());
                let a = x.powf(theta) + y.powf(theta);
                let c = (-a.powf(1.0 / theta)).exp();
                c * a.powf(1.0 / theta - 1.0) * x.powf(theta - 1.0) / u
            }
            CopulaFamily::Clayton { theta } => {
                let s = u.powf(-theta) + v.powf(-theta) - 1.0;
                if s <= 0.0 {
                    0.0
                } else {
                    u.powf(-theta - 1.0) * s.powf(-1.0 / theta - 1.0)
                }
            }
            _ => unreachable!("sampled directly"),
        }
    }
}

fn unit(x: f64, name: &str) -> Result<()> {
    check((0.0..=1.0).contains(&x), || format!("{name} = {x} is outside [0,1]"))
}

pub fn copula_cdf(fam: &CopulaFamily, u: f64, v: f64) -> Result<f64> {
    fam.validate()?;
    unit(u, "u")?;
    unit(v, "v")?;
    Ok(fam.eval(u, v))
}

/// Cdf of `(1-U, 1-V)`: `u + v - 1 + C(1-u, 1-v)`.
pub fn survival_copula_cdf(fam: &CopulaFamily, u: f64, v: f64) -> Result<f64> {
    fam.validate()?;
    unit(u, "u")?;
    unit(v, "v")?;
    Ok((u + v - 1.0 + fam.eval(1.0 - u, 1.0 - v)).clamp(0.0, 1.0))
}

pub fn draw_pair(fam: &CopulaFamily, rng: &mut rng::Rng) -> Result<(f64, f64)> {
    let u: f64 = rng.sample(Open01);
    Ok(match *fam {
        CopulaFamily::Independence => (u, rng.sample(Open01)),
        CopulaFamily::Comonotonic => (u, u),
        CopulaFamily::Countermonotonic => (u, 1.0 - u),
        CopulaFamily::MarshallOlkin { alpha, beta } => {
            let law = MOExponentialLaw::new((1.0 - alpha) / alpha, (1.0 - beta) / beta, 1.0)?;
            let (x1, x2) = law.draw(rng);
            (law.marginal_survival(0, x1), law.marginal_survival(1, x2))
        }
        CopulaFamily::Gumbel { .. } | CopulaFamily::Clayton { .. } => {
            let w: f64 = rng.sample(Open01);
            let v = bisect(|v| fam.conditional(u, v) - w, 0.0, 1.0, 1e-12)?;
            (u, v)
        }
    })
}

/// Conditional inversion for Gumbel and Clayton, the shock construction
/// for Marshall-Olkin, `(U, U)` and `(U, 1-U)` for the Frechet bounds.
pub fn sample_copula(fam: &CopulaFamily, seed: u64, count: usize) -> Result<Vec<(f64, f64)>> {
    fam.validate()?;
    let mut rng = rng::stream(seed, 6);
    (0..count).map(|_| draw_pair(fam, &mut rng)).collect()
}

/// Closed-form `(lower, upper)` tail-dependence coefficients; `None` where
/// the coefficient is undefined.
pub fn tail_dependence(fam: &CopulaFamily) -> (Option<f64>, Option<f64>) {
    match *fam {
        CopulaFamily::Independence => (Some(0.0), Some(0.0)),
        CopulaFamily::Comonotonic => (Some(1.0), Some(1.0)),
        CopulaFamily::Countermonotonic => (None, Some(0.0)),
        CopulaFamily::Gumbel { theta } => (Some(0.0), Some(2.0 - 2f64.powf(1.0 / theta))),
        CopulaFamily::Clayton { theta } => {
            if theta > 0.0 {
                (Some(2f64.powf(-1.0 / theta)), Some(0.0))
            } else {
                (Some(0.0), Some(0.0))
            }
        }
        CopulaFamily::MarshallOlkin { alpha, beta } => (Some(0.0), Some(alpha.min(beta))),
    }
}

/// Extrapolated `lim C(q,q)/q` as `q -> 0` and `lim Ĉ(q,q)/q` as `q -> 0`,
/// for any copula given as a function.
pub fn tail_limits<C: Fn(f64, f64) -> f64>(c: C) -> Result<(f64, f64)> {
    let lower: Vec<f64> = (2..=12).map(|k| {
        let q = 2f64.powi(-2 * k);
        c(q, q) / q
    }).collect();
    let upper: Vec<f64> = (2..=12).map(|k| {
        let e = 2f64.powi(-2 * k);
        (2.0 * e - 1.0 + c(1.0 - e, 1.0 - e)) / e
    }).collect();
    let l = extrapolate_limit(&lower)?.clamp(0.0, 1.0);
    let u = extrapolate_limit(&upper)?.clamp(0.0, 1.0);
    Ok((l, u))
}

pub fn tail_dependence_numeric(fam: &CopulaFamily) -> Result<(f64, f64)> {
    fam.validate()?;
    tail_limits(|u, v| fam.eval(u, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrechetReport {
    pub holds: bool,
    /// Largest violation of either bound (0 when both hold).
    pub worst: f64,
    pub attains_upper: bool,
    pub attains_lower: bool,
}

/// Checks `max(u + v - 1, 0) <= C(u,v) <= min(u,v)` on a grid.
pub fn frechet_bounds_check(fam: &CopulaFamily, grid: &[f64]) -> Result<FrechetReport> {
    fam.validate()?;
    let mut worst = 0.0f64;
    let (mut up, mut low) = (true, true);
    for &u in grid {
        unit(u, "grid point")?;
        for &v in grid {
            let c = fam.eval(u, v);
            let (w, m) = ((u + v - 1.0).max(0.0), u.min(v));
            worst = worst.max(w - c).max(c - m);
            up &= (c - m).abs() <= 1e-15;
            low &= (c - w).abs() <= 1e-15;
        }
    }
    Ok(FrechetReport { holds: worst <= 1e-15, worst: worst.max(0.0), attains_upper: up, attains_lower: low })
}

/// `(absolutely continuous part, singular part)` of the Marshall-Olkin
/// copula; the singular mass lies on `u^alpha = v^beta`.
pub fn mo_copula_components(alpha: f64, beta: f64, u: f64, v: f64) -> Result<(f64, f64)> {
    let fam = CopulaFamily::marshall_olkin(alpha, beta)?;
    let c = copula_cdf(&fam, u, v)?;
    let k = alpha + beta - alpha * beta;
    let s = alpha * beta / k * u.powf(alpha).min(v.powf(beta)).powf(k / (alpha * beta));
    Ok((c - s, s))
}

/// Probability of the singular curve, `alpha beta / (alpha + beta - alpha beta)`.
pub fn mo_singular_mass(alpha: f64, beta: f64) -> f64 {
    alpha * beta / (alpha + beta - alpha * beta)
}

/// Rectangle mass `C(u2,v2) - C(u1,v2) - C(u2,v1) + C(u1,v1)`.
pub fn rectangle_mass(fam: &CopulaFamily, (u1, u2): (f64, f64), (v1, v2): (f64, f64)) -> f64 {
    fam.eval(u2, v2) - fam.eval(u1, v2) - fam.eval(u2, v1) + fam.eval(u1, v1)
}

pub fn parse_family(name: &str, theta: Option<f64>, alpha: Option<f64>, beta: Option<f64>) -> Result<CopulaFamily> {
    let need = |x: Option<f64>, what: &str| x.ok_or_else(|| Error::InvalidParameter(format!("{name} needs {what}")));
    match name {
        "independence" => Ok(CopulaFamily::Independence),
        "comonotonic" => Ok(CopulaFamily::Comonotonic),
        "countermonotonic" => Ok(CopulaFamily::Countermonotonic),
        "gumbel" => CopulaFamily::gumbel(need(theta, "theta")?),
        "clayton" => CopulaFamily::clayton(need(theta, "theta")?),
        "mo" | "marshall-olkin" => CopulaFamily::marshall_olkin(need(alpha, "alpha")?, need(beta, "beta")?),
        _ => Err(Error::InvalidParameter(format!("unknown copula '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn families() -> Vec<CopulaFamily> {
        vec![
            CopulaFamily::Independence,
            CopulaFamily::Comonotonic,
            CopulaFamily::Countermonotonic,
            CopulaFamily::gumbel(1.0).unwrap(),
            CopulaFamily::gumbel(2.5).unwrap(),
            CopulaFamily::clayton(2.0).unwrap(),
            CopulaFamily::clayton(-0.5).unwrap(),
            CopulaFamily::marshall_olkin(0.35, 0.75).unwrap(),
        ]
    }

    #[test]
    fn documented_values() {
        assert_relative_eq!(copula_cdf(&CopulaFamily::Independence, 0.3, 0.4).unwrap(), 0.12, epsilon = 1e-16);
        assert_relative_eq!(copula_cdf(&CopulaFamily::gumbel(1.0).unwrap(), 0.3, 0.4).unwrap(), 0.12, epsilon = 1e-15);
        let mo = CopulaFamily::marshall_olkin(0.4, 0.6).unwrap();
        let (u, v) = (0.8f64, 0.5f64);
        assert!(u.powf(0.4) >= v.powf(0.6));
        assert_relative_eq!(copula_cdf(&mo, u, v).unwrap(), u.powf(0.6) * v, epsilon = 1e-16);
        assert!(copula_cdf(&mo, 1.2, 0.5).is_err());
        assert_eq!(survival_copula_cdf(&mo, 1.0, 1.0).unwrap(), 1.0);
        for (u, v) in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)] {
            let s = survival_copula_cdf(&CopulaFamily::Independence, u, v).unwrap();
            assert_relative_eq!(s, u * v, epsilon = 1e-15);
        }
    }

    #[test]
    fn survival_identity() {
        for fam in families() {
            for &(u, v) in &[(0.1, 0.2), (0.5, 0.9), (0.33, 0.33)] {
                let lhs = survival_copula_cdf(&fam, 1.0 - u, 1.0 - v).unwrap();
                assert!((lhs - (1.0 - u - v + fam.eval(u, v))).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn shock_law_survival_factorizes_through_mo_copula() {
        let law = MOExponentialLaw::new(0.7, 1.3, 0.9).unwrap();
        let (a, b) = law.copula_params();
        let mo = CopulaFamily::marshall_olkin(a, b).unwrap();
        for y1 in [0.0, 0.3, 1.0, 2.5] {
            for y2 in [0.0, 0.2, 1.1, 3.0] {
                let joint = law.survival(y1, y2).unwrap();
                let via = mo.eval(law.marginal_survival(0, y1), law.marginal_survival(1, y2));
                assert_relative_eq!(joint, via, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn tail_table() {
        assert_relative_eq!(tail_dependence(&CopulaFamily::gumbel(2.0).unwrap()).1.unwrap(), 2.0 - 2f64.sqrt());
        assert_relative_eq!(tail_dependence(&CopulaFamily::clayton(2.0).unwrap()).0.unwrap(), 0.5f64.sqrt());
        assert_eq!(tail_dependence(&CopulaFamily::marshall_olkin(0.35, 0.75).unwrap()).1, Some(0.35));
        assert_eq!(tail_dependence(&CopulaFamily::Countermonotonic).0, None);
    }

    #[test]
    fn numeric_tail_limits_match() {
        for fam in families() {
            let (l, u) = tail_dependence_numeric(&fam).unwrap();
            let (cl, cu) = tail_dependence(&fam);
            assert!((u - cu.unwrap()).abs() <= 1e-3, "{fam:?} upper {u}");
            if let Some(cl) = cl {
                assert!((l - cl).abs() <= 1e-3, "{fam:?} lower {l}");
            }
            // upper coefficient of the survival copula is the lower one of C
            let (sl, su) = tail_limits(|a, b| (a + b - 1.0 + fam.eval(1.0 - a, 1.0 - b)).max(0.0)).unwrap();
            assert!((su - l).abs() <= 1e-3 && (sl - u).abs() <= 1e-3, "{fam:?}");
        }
    }

    #[test]
    fn frechet_checks() {
        let grid: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let co = frechet_bounds_check(&CopulaFamily::Comonotonic, &grid).unwrap();
        assert!(co.holds && co.attains_upper);
        let counter = frechet_bounds_check(&CopulaFamily::Countermonotonic, &grid).unwrap();
        assert!(counter.holds && counter.attains_lower);
        assert!(frechet_bounds_check(&CopulaFamily::gumbel(3.0).unwrap(), &grid).unwrap().holds);
    }

    #[test]
    fn mo_components() {
        let (a, b) = (0.35, 0.75);
        let (_, s) = mo_copula_components(a, b, 1.0, 1.0).unwrap();
        assert_relative_eq!(s, mo_singular_mass(a, b), epsilon = 1e-15);
        assert_eq!(mo_copula_components(a, b, 0.0, 0.4).unwrap(), (0.0, 0.0));
        // singular part as the integral of its density along t = u^alpha = v^beta
        let (_, s) = mo_copula_components(0.5, 0.5, 0.81, 0.81).unwrap();
        let m = 0.81f64.sqrt();
        let q = quad(|t: f64| t.powf(1.0 / 0.5 + 1.0 / 0.5 - 2.0), 0.0, m, 1e-15, 1e-14);
        assert_relative_eq!(s, q.value, max_relative = 1e-12);
    }

    #[test]
    fn samplers() {
        let c = sample_copula(&CopulaFamily::Comonotonic, 1, 100).unwrap();
        assert!(c.iter().all(|(u, v)| u == v));
        let c = sample_copula(&CopulaFamily::Countermonotonic, 1, 100).unwrap();
        assert!(c.iter().all(|(u, v)| (u + v - 1.0).abs() < 1e-15));
        let (a, b) = (0.35, 0.75);
        let mo = sample_copula(&CopulaFamily::marshall_olkin(a, b).unwrap(), 2, 100_000).unwrap();
        let on_curve = mo.iter().filter(|(u, v)| (u.powf(a) - v.powf(b)).abs() <= 1e-12).count() as f64 / 1e5;
        assert!((on_curve - mo_singular_mass(a, b)).abs() <= 0.01);
    }

    proptest! {
        #[test]
        fn margins(u in 0.0f64..=1.0) {
            for fam in families() {
                prop_assert!((fam.eval(u, 1.0) - u).abs() <= 1e-14);
                prop_assert!((fam.eval(1.0, u) - u).abs() <= 1e-14);
            }
        }

        #[test]
        fn rectangle_inequality(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, d in 0.0f64..1.0) {
            let (u1, u2) = (a.min(b), a.max(b));
            let (v1, v2) = (c.min(d), c.max(d));
            for fam in families() {
                prop_assert!(rectangle_mass(&fam, (u1, u2), (v1, v2)) >= -1e-14, "{:?}", fam);
            }
        }
    }
}

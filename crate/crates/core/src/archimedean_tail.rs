//! Archimedean copulas near their upper corner.
//!
//! A family is described by `phi_bar(r) = phi(1 - r)` and the normalized
//! generator `w(r) = phi_bar(r)^(1/theta)`. Derivatives of `w` come from
//! second-order jets, so `w'`, `w''` and `h'` are exact up to rounding.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{check, Error, Result};
use crate::numeric::{bisect, extrapolate_limit, Jet};
use crate::report::BoundReport;

pub const FAMILY_IDS: [u8; 7] = [2, 4, 6, 12, 14, 15, 21];
/// Families for which the K constant is tabulated.
pub const TABLE_IDS: [u8; 6] = [4, 6, 12, 14, 15, 21];

const GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchimedeanFamily {
    pub id: u8,
    pub theta: f64,
}

impl ArchimedeanFamily {
    pub fn new(id: u8, theta: f64) -> Result<Self> {
        check(FAMILY_IDS.contains(&id), || format!("unknown Archimedean family ({id}); expected one of {FAMILY_IDS:?}"))?;
        check(theta >= 1.0 && theta.is_finite(), || format!("theta must be >= 1, got {theta}"))?;
        Ok(ArchimedeanFamily { id, theta })
    }

    fn w_jet(&self, r: Jet) -> Jet {
        let th = self.theta;
        match self.id {
            2 => r,
            4 => -(-r).ln_1p(),
            6 => (-(-r.powf(th)).ln_1p()).powf(1.0 / th),
            12 => r / (1.0 - r),
            14 => ((-r).ln_1p() * (-1.0 / th)).exp_m1(),
            15 => -((-r).ln_1p() * (1.0 / th)).exp_m1(),
            21 => (-((-r.powf(th)).ln_1p() * (1.0 / th)).exp_m1()).powf(1.0 / th),
            _ => unreachable!(),
        }
    }

    pub fn w(&self, r: f64) -> f64 {
        self.w_jet(Jet::cst(r)).v
    }

    /// `(w, w', w'')` at `r`.
    pub fn w_derivs(&self, r: f64) -> (f64, f64, f64) {
        let j = self.w_jet(Jet::var(r));
        (j.v, j.d, j.dd)
    }

    pub fn phi_bar(&self, r: f64) -> f64 {
        self.w(r).powf(self.theta)
    }

    /// Supremum of `w` on `[0, 1]`.
    pub fn w_sup(&self) -> f64 {
        match self.id {
            2 | 15 | 21 => 1.0,
            _ => f64::INFINITY,
        }
    }

    pub fn w_inverse(&self, y: f64) -> f64 {
        let th = self.theta;
        if y >= self.w_sup() {
            return 1.0;
        }
        match self.id {
            2 => y,
            4 => -(-y).exp_m1(),
            6 => (-(-y.powf(th)).exp_m1()).powf(1.0 / th),
            12 => y / (1.0 + y),
            14 => -(-th * y.ln_1p()).exp_m1(),
            15 => -(th * (-y).ln_1p()).exp_m1(),
            21 => (-(th * (-y.powf(th)).ln_1p()).exp_m1()).powf(1.0 / th),
            _ => unreachable!(),
        }
    }

    /// `h(0) = w'(0)`.
    pub fn h0(&self) -> f64 {
        match self.id {
            14 | 15 => 1.0 / self.theta,
            21 => (1.0 / self.theta).powf(1.0 / self.theta),
            _ => 1.0,
        }
    }

    /// `h(r) = w(r)/r`.
    pub fn h(&self, r: f64) -> f64 {
        self.w(r) / r
    }

    /// `h'(r) = (w'(r) - h(r))/r`.
    pub fn h_prime(&self, r: f64) -> f64 {
        let (w, w1, _) = self.w_derivs(r);
        (w1 - w / r) / r
    }

    /// Copula `C(u, v) = 1 - w^-1((w^th(1-u) + w^th(1-v))^(1/th))`.
    pub fn copula(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        (1.0 - self.w_inverse(self.radial(1.0 - u, 1.0 - v))).max(0.0)
    }

    fn radial(&self, a: f64, b: f64) -> f64 {
        let th = self.theta;
        (self.w(a).powf(th) + self.w(b).powf(th)).powf(1.0 / th)
    }
}

/// Extrapolated `lim r phi_bar'(r)/phi_bar(r)` as `r -> 0`.
pub fn theta_tilde(fam: &ArchimedeanFamily) -> Result<f64> {
    if fam.id == 2 {
        return Ok(fam.theta);
    }
    let seq: Vec<f64> = (4..=30)
        .map(|k| {
            let r = 2f64.powi(-k);
            let (w, w1, _) = fam.w_derivs(r);
            fam.theta * r * w1 / w
        })
        .collect();
    extrapolate_limit(&seq)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailConstants {
    pub family: u8,
    pub theta: f64,
    pub h0: f64,
    /// Radius used in the theorem (three decimals unless overridden).
    pub r0: f64,
    /// Largest radius satisfying the derivative condition before rounding.
    pub r0_raw: f64,
    /// `max h'` over `[0, r0_raw]`.
    pub h_max: f64,
    /// `max w''` over `[0, r0_raw]`.
    pub w2_max: f64,
    pub kappa: f64,
    pub k: f64,
}

fn max_on_grid<F: Fn(f64) -> f64>(f: F, r: f64) -> f64 {
    (1..=GRID).map(|i| f(r * i as f64 / GRID as f64)).fold(f64::NEG_INFINITY, f64::max)
}

/// `w' <= 4 h0/3` on a grid of `[0, r]`.
fn derivative_condition(fam: &ArchimedeanFamily, r: f64) -> bool {
    let cap = 4.0 * fam.h0() / 3.0;
    (1..=GRID).all(|i| fam.w_derivs(r * i as f64 / GRID as f64).1 <= cap)
}

/// The theorem's constant
/// `K = (pi sqrt(2)^th / 2)[(th-1) kappa + (4/3)^(2 th) W/h0]`.
pub fn k_constant(theta: f64, h0: f64, r0: f64, h_max: f64, w2_max: f64) -> (f64, f64) {
    let a = 3.0 * r0 * h_max / h0;
    let k1 = (theta + 1.0) * (1.0 + a / 16.0) * (1.0 + a / 4.0 + a * a / 256.0).powf(theta);
    let k2 = (2.0 * theta - 1.0) * 2f64.powf(theta - 1.0) * (1.0 + a / 8.0).powf(theta - 1.0) + 2.0 * (1.0 + a / 4.0);
    let kappa = h_max / h0 * k1.max(k2);
    let k = PI * 2f64.sqrt().powf(theta) / 2.0 * ((theta - 1.0) * kappa + (4.0 / 3.0f64).powf(2.0 * theta) * w2_max / h0);
    (kappa, k)
}

/// Constants of the approximation theorem. `r0_override` replaces the
/// searched radius.
pub fn tail_constants(fam: &ArchimedeanFamily, r0_override: Option<f64>) -> Result<TailConstants> {
    if fam.id == 2 {
        return Err(Error::Domain("family (2) is exact: phi_bar(r) = r^theta, K unnecessary".into()));
    }
    check(fam.theta > 1.0, || format!("tail constants need theta > 1, got {}", fam.theta))?;
    let (r0, r0_raw) = match r0_override {
        Some(r) => {
            check(r > 0.0 && r < 1.0, || format!("r0 must lie in (0,1), got {r}"))?;
            check(derivative_condition(fam, r), || format!("w' exceeds 4 h0/3 on [0, {r}]"))?;
            (r, r)
        }
        None => {
            let (lo, hi) = (1e-6, 1.0 - 1e-9);
            if !derivative_condition(fam, lo) {
                return Err(Error::Numerical("no r0 found above 1e-6".into()));
            }
            let raw = if derivative_condition(fam, hi) {
                hi
            } else {
                bisect(|r| if derivative_condition(fam, r) { -1.0 } else { 1.0 }, lo, hi, 1e-10)?
            };
            ((raw * 1000.0 + 1e-9).floor() / 1000.0, raw)
        }
    };
    let h_max = max_on_grid(|r| fam.h_prime(r), r0_raw);
    let w2_max = max_on_grid(|r| fam.w_derivs(r).2, r0_raw);
    let h0 = fam.h0();
    let (kappa, k) = k_constant(fam.theta, h0, r0, h_max, w2_max);
    Ok(TailConstants { family: fam.id, theta: fam.theta, h0, r0, r0_raw, h_max, w2_max, kappa, k })
}

fn domain(n: f64, s: f64, t: f64) -> Result<()> {
    check(n >= 1.0, || format!("n must be >= 1, got {n}"))?;
    check(s > 0.0 && t > 0.0 && s <= n && t <= n, || format!("need 0 < s, t <= n, got ({s}, {t})"))
}

/// Density of the expected number of joint exceedances, the mixed second
/// derivative of `n P(U >= 1 - s/n, V >= 1 - t/n)`.
pub fn exact_intensity(fam: &ArchimedeanFamily, n: f64, s: f64, t: f64) -> Result<f64> {
    domain(n, s, t)?;
    let th = fam.theta;
    let (wu, du, _) = fam.w_derivs(s / n);
    let (wv, dv, _) = fam.w_derivs(t / n);
    let sr = (wu.powf(th) + wv.powf(th)).powf(1.0 / th);
    if sr >= fam.w_sup() {
        return Ok(0.0);
    }
    let (_, d1, d2) = fam.w_derivs(fam.w_inverse(sr));
    let a = (wu * wv).powf(th - 1.0) * du * dv;
    Ok((a * sr.powf(1.0 - 2.0 * th) / d1 * (d2 * sr / (d1 * d1) + th - 1.0) / n).max(0.0))
}

/// `(th-1)(st)^(th-1)(s^th + t^th)^(1/th - 2)`.
pub fn limit_intensity(theta: f64, s: f64, t: f64) -> f64 {
    (theta - 1.0) * (s * t).powf(theta - 1.0) * (s.powf(theta) + t.powf(theta)).powf(1.0 / theta - 2.0)
}

/// `s + t - (s^th + t^th)^(1/th)`, the limit mass of `(0,s] x (0,t]`.
pub fn limit_box_mass(theta: f64, s: f64, t: f64) -> f64 {
    s + t - (s.powf(theta) + t.powf(theta)).powf(1.0 / theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exceedances {
    pub exact: f64,
    pub limit: f64,
    pub gap: f64,
}

/// Expected number of joint exceedances of `1 - s/n`, `1 - t/n` among `n`
/// pairs, and its limit.
pub fn expected_exceedances(fam: &ArchimedeanFamily, n: f64, s: f64, t: f64) -> Result<Exceedances> {
    domain(n, s, t)?;
    let (u, v) = (s / n, t / n);
    let exact = (n * (u + v - fam.w_inverse(fam.radial(u, v)))).max(0.0);
    let limit = limit_box_mass(fam.theta, s, t);
    Ok(Exceedances { exact, limit, gap: (exact - limit).abs() })
}

/// Smallest `n <= n_max` such that `pred` holds on all of `[n, n_max]`.
pub fn threshold_n<F: Fn(u64) -> bool>(pred: F, n_max: u64) -> Option<u64> {
    let mut first = None;
    for n in (1..=n_max).rev() {
        if pred(n) {
            first = Some(n);
        } else {
            break;
        }
    }
    first
}

pub fn gate_holds(consts: &TailConstants, n: f64, s: f64, t: f64) -> bool {
    let cap = 3.0 * consts.r0 / 8.0;
    s / n <= cap && t / n <= cap
}

/// `min(s/n, t/n) + K (s + t)^2 / n` behind the gate `s/n, t/n <= 3 r0/8`.
pub fn total_bound(fam: &ArchimedeanFamily, consts: &TailConstants, n: f64, s: f64, t: f64) -> Result<BoundReport> {
    domain(n, s, t)?;
    if !gate_holds(consts, n, s, t) {
        let need = (8.0 * s.max(t) / (3.0 * consts.r0)).ceil();
        return Err(Error::Gate(format!(
            "s/n = {}, t/n = {} exceed 3 r0/8 = {}; with these s, t the gate needs n >= {need}",
            s / n,
            t / n,
            3.0 * consts.r0 / 8.0
        )));
    }
    let anchor = format!("archimedean/{}", fam.id);
    let mut r = BoundReport::new(format!("archimedean/{}", fam.id))
        .meta("n", n)
        .meta("s", s)
        .meta("t", t)
        .meta("theta", fam.theta)
        .meta("r0", consts.r0)
        .meta("K", consts.k)
        .term("count", "min(s/n, t/n)", (s / n).min(t / n), &anchor)
        .term("intensity", "K (s+t)^2/n", consts.k * (s + t).powi(2) / n, &anchor);
    if r.total >= 1.0 {
        r = r.note("bound is not informative at this n (total >= 1)");
    }
    Ok(r)
}

/// Family (2) has `phi_bar(r) = r^theta` exactly, so only the count term
/// remains.
pub fn exact_family_bound(fam: &ArchimedeanFamily, n: f64, s: f64, t: f64) -> Result<BoundReport> {
    check(fam.id == 2, || format!("family ({}) is not exact", fam.id))?;
    domain(n, s, t)?;
    Ok(BoundReport::new("archimedean/2")
        .meta("n", n)
        .meta("s", s)
        .meta("t", t)
        .meta("theta", fam.theta)
        .term("count", "min(s/n, t/n)", (s / n).min(t / n), "archimedean/2")
        .note("exact family, K unnecessary"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub family: u8,
    pub theta: f64,
    pub r0: f64,
    pub h_max: f64,
    pub w2_max: f64,
    pub k: f64,
}

const fn row(family: u8, theta: f64, r0: f64, h_max: f64, w2_max: f64, k: f64) -> ReferenceRow {
    ReferenceRow { family, theta, r0, h_max, w2_max, k }
}

/// Published constants for `theta = 1.5` and `theta = 3`.
pub const REFERENCE: [ReferenceRow; 12] = [
    row(4, 1.5, 0.250, 0.731, 1.778, 16.2),
    row(6, 1.5, 0.851, 2.531, 21.027, 186.0),
    row(12, 1.5, 0.133, 1.331, 3.080, 28.4),
    row(14, 1.5, 0.158, 0.754, 1.761, 24.3),
    row(15, 1.5, 0.578, 0.229, 0.703, 9.0),
    row(21, 1.5, 0.738, 0.240, 1.053, 10.8),
    row(4, 3.0, 0.250, 0.731, 1.778, 207.2),
    row(6, 3.0, 0.701, 0.375, 2.078, 1401.1),
    row(12, 3.0, 0.133, 1.331, 3.080, 372.4),
    row(14, 3.0, 0.194, 0.291, 0.736, 313.9),
    row(15, 3.0, 0.350, 1.773, 0.457, 107.3),
    row(21, 3.0, 0.774, 0.238, 1.479, 126.1),
];

pub fn reference_row(family: u8, theta: f64) -> Option<ReferenceRow> {
    REFERENCE.iter().copied().find(|r| r.family == family && r.theta == theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub computed: TailConstants,
    pub reference: Option<ReferenceRow>,
}

impl TableRow {
    /// `K` relative to the published value.
    pub fn k_ratio(&self) -> Option<f64> {
        self.reference.map(|r| self.computed.k / r.k)
    }
}

/// Constants for every tabulated family at `theta`, computed in parallel.
pub fn constant_table(theta: f64) -> Result<Vec<TableRow>> {
    let rows: Vec<Result<TableRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = TABLE_IDS
            .iter()
            .map(|&id| {
                scope.spawn(move || {
                    let fam = ArchimedeanFamily::new(id, theta)?;
                    Ok(TableRow { computed: tail_constants(&fam, None)?, reference: reference_row(id, theta) })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("table worker panicked")).collect()
    });
    rows.into_iter().collect()
}

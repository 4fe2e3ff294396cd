//! Numerical building blocks: adaptive Gauss-Kronrod quadrature (finite and
//! half-infinite ranges, nested 2-D rules with a diagonal split), bracketed
//! root finding, sequence extrapolation and second-order forward jets.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_PIECES: usize = 4000;

fn adapt<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Quad {
    if a == b {
        return Quad { value: 0.0, error: 0.0, converged: true };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut pieces = 1;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if pieces >= MAX_PIECES {
            return Quad { value: total, error: err, converged: false };
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            return Quad { value: total, error: err, converged: false };
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        pieces += 1;
    }
    // re-sum to avoid drift from the running updates
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Quad { value, error, converged: true }
}

/// Adaptive quadrature of `f` over `[a, b]`; `b` may be `+inf`.
///
/// Half-infinite ranges use `x = a + t/(1-t)` on `t in [0, 1)`.
pub fn quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Quad {
    if b < a {
        let q = quad(f, b, a, abs_tol, rel_tol);
        return Quad { value: -q.value, ..q };
    }
    if b.is_infinite() {
        adapt(
            move |t| {
                let s = 1.0 - t;
                f(a + t / s) / (s * s)
            },
            0.0,
            1.0,
            abs_tol,
            rel_tol,
        )
    } else {
        adapt(f, a, b, abs_tol, rel_tol)
    }
}

/// Like [`quad`] but fails when the error target is missed.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quad> {
    let q = quad(f, a, b, abs_tol, rel_tol);
    if q.converged && q.value.is_finite() {
        Ok(q)
    } else {
        Err(Error::Numerical(format!(
            "quadrature on [{a}, {b}] did not converge (value {}, error {})",
            q.value, q.error
        )))
    }
}

/// Nested 2-D quadrature over `[s0, s1] x [t0, t1]`.
///
/// With `split_diagonal`, the inner range is split at `t = s`, which keeps
/// densities that jump across the diagonal exact.
pub fn quad2<F: Fn(f64, f64) -> f64>(
    f: F,
    (s0, s1): (f64, f64),
    (t0, t1): (f64, f64),
    split_diagonal: bool,
    abs_tol: f64,
    rel_tol: f64,
) -> Quad {
    let mut inner_err = 0.0_f64;
    let mut inner_ok = true;
    let inner_abs = abs_tol * 0.1;
    let inner_rel = rel_tol * 0.1;
    let outer = quad(
        |s| {
            let g = |t: f64| f(s, t);
            let q = if split_diagonal && s > t0 && s < t1 {
                let q1 = quad(g, t0, s, inner_abs, inner_rel);
                let q2 = quad(g, s, t1, inner_abs, inner_rel);
                Quad {
                    value: q1.value + q2.value,
                    error: q1.error + q2.error,
                    converged: q1.converged && q2.converged,
                }
            } else {
                quad(g, t0, t1, inner_abs, inner_rel)
            };
            inner_err = inner_err.max(q.error);
            inner_ok &= q.converged;
            q.value
        },
        s0,
        s1,
        abs_tol,
        rel_tol,
    );
    Quad {
        value: outer.value,
        error: outer.error + inner_err,
        converged: outer.converged && inner_ok,
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Numerical(format!("root not bracketed on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Extrapolated limit of a sequence converging geometrically in its index,
/// via Aitken's delta-squared on the last three entries.
pub fn extrapolate_limit(seq: &[f64]) -> Result<f64> {
    let m = seq.len();
    if m < 3 {
        return Err(Error::Numerical("need at least three terms".into()));
    }
    if seq.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite term in limit sequence".into()));
    }
    let (a, b, c) = (seq[m - 3], seq[m - 2], seq[m - 1]);
    let first = (seq[1] - seq[0]).abs();
    let last = (c - b).abs();
    if last > first && last > 1e-12 * c.abs().max(1.0) {
        return Err(Error::Numerical("sequence does not converge".into()));
    }
    let den = c - 2.0 * b + a;
    if den.abs() <= 1e-300 || (c - b).abs() <= 1e-15 * c.abs().max(1e-300) {
        return Ok(c);
    }
    let acc = c - (c - b) * (c - b) / den;
    if acc.is_finite() && (acc - c).abs() <= 10.0 * (c - b).abs() {
        Ok(acc)
    } else {
        Ok(c)
    }
}

/// Second-order forward jet: value, first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Jet {
    pub fn var(x: f64) -> Self {
        Jet { v: x, d: 1.0, dd: 0.0 }
    }
    pub fn cst(x: f64) -> Self {
        Jet { v: x, d: 0.0, dd: 0.0 }
    }
    fn chain(self, f: f64, f1: f64, f2: f64) -> Self {
        Jet { v: f, d: f1 * self.d, dd: f2 * self.d * self.d + f1 * self.dd }
    }
    pub fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    pub fn ln_1p(self) -> Self {
        let x = self.v;
        let y = 1.0 + x;
        self.chain(x.ln_1p(), 1.0 / y, -1.0 / (y * y))
    }
    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    pub fn exp_m1(self) -> Self {
        let e = self.v.exp();
        self.chain(self.v.exp_m1(), e, e)
    }
    pub fn powf(self, p: f64) -> Self {
        let x = self.v;
        if x == 0.0 {
            let f1 = if p == 1.0 { 1.0 } else if p > 1.0 { 0.0 } else { f64::INFINITY };
            let f2 = if p == 2.0 { 2.0 } else if p > 2.0 || p == 1.0 { 0.0 } else { f64::INFINITY };
            return self.chain(0.0, f1, f2);
        }
        let xp = x.powf(p);
        self.chain(xp, p * xp / x, p * (p - 1.0) * xp / (x * x))
    }
    pub fn recip(self) -> Self {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d: self.d + o.d, dd: self.dd + o.dd }
    }
}
impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d: self.d - o.d, dd: self.dd - o.dd }
    }
}
impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d: -self.d, dd: -self.dd }
    }
}
impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd,
        }
    }
}
impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}
impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet { v: self.v + c, ..self }
    }
}
impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        Jet { v: self.v - c, ..self }
    }
}
impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        Jet { v: self - j.v, d: -j.d, dd: -j.dd }
    }
}
impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        Jet { v: self.v * c, d: self.d * c, dd: self.dd * c }
    }
}

//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn real_part(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn real_part(&self) -> f64 {
        *self
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn real_part(&self) -> f64 {
        self.re
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel with the embedded 7-point Gauss estimate.
pub fn kronrod15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> Estimate<T> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let value = k * h;
    let error = ((k - g) * h).magnitude();
    Estimate { value, error }
}

struct Panel<T> {
    a: f64,
    b: f64,
    est: Estimate<T>,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive integration over `[a, b]` split at `breaks`, bisecting
/// the panel with the largest error until `error ≤ max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T: QuadValue>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate<T>> {
    const MAX_PANELS: usize = 20_000;
    let mut points: Vec<f64> = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(b);

    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    for w in points.windows(2) {
        let est = kronrod15(&f, w[0], w[1]);
        total = total + est.value;
        err += est.error;
        heap.push(Panel { a: w[0], b: w[1], est });
    }
    loop {
        if err <= abs_tol.max(rel_tol * total.magnitude()) {
            // The running error drifts with rounding; confirm from the panels.
            err = heap.iter().map(|p: &Panel<T>| p.est.error).sum();
            if err <= abs_tol.max(rel_tol * total.magnitude()) {
                break;
            }
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::Quadrature { partial: total.real_part(), error: err });
        }
        let p = heap.pop().expect("at least one panel");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(Error::Quadrature { partial: total.real_part(), error: err });
        }
        let left = kronrod15(&f, p.a, m);
        let right = kronrod15(&f, m, p.b);
        total = total - p.est.value + left.value + right.value;
        err += left.error + right.error - p.est.error;
        heap.push(Panel { a: p.a, b: m, est: left });
        heap.push(Panel { a: m, b: p.b, est: right });
    }
    // Recompute the sum from the panels to shed accumulated cancellation.
    let mut value = T::zero();
    let mut error = 0.0;
    for p in heap.iter() {
        value = value + p.est.value;
        error += p.est.error;
    }
    Ok(Estimate { value, error })
}

/// Integral over `[-y_max, y_max]` on panels growing geometrically away from
/// zero, which suits integrands decaying like a power of `|y|`.
pub fn integrate_symmetric<T: QuadValue>(
    f: impl Fn(f64) -> T,
    y_max: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate<T>> {
    let mut breaks = vec![0.0];
    let mut x = 1.0;
    while x < y_max {
        breaks.push(x);
        breaks.push(-x);
        x *= 2.0;
    }
    integrate(f, -y_max, y_max, &breaks, abs_tol, rel_tol)
}

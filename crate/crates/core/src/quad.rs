//! Globally adaptive Gauss-Kronrod (7/15) quadrature with absolute error control.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_MAX_INTERVALS: usize = 4000;

/// A quadrature result together with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = kronrod.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let roundoff = 50.0 * f64::EPSILON * abs * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(roundoff);
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]` to absolute error `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    integrate_pieces(f, &[a, b], tol)
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], ...`, never
/// sampling across a breakpoint (use at discontinuities of `f` or its
/// derivatives).
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> Result<Estimate> {
    integrate_with_limit(&f, points, tol, DEFAULT_MAX_INTERVALS)
}

pub fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    tol: f64,
    max_intervals: usize,
) -> Result<Estimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "tolerance must be > 0",
        });
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(f, w[0], w[1]));
        }
    }
    if heap.is_empty() {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut total_error: f64 = heap.iter().map(|s| s.error).sum();
    while total_error > tol && heap.len() < max_intervals {
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision
            heap.push(worst);
            break;
        }
        let left = kronrod15(f, worst.a, mid);
        let right = kronrod15(f, mid, worst.b);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let value: CompensatedSum = heap.iter().map(|s| s.value).collect();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    if !value.value().is_finite() || !error.is_finite() {
        return Err(Error::Accuracy {
            requested: tol,
            achieved: f64::INFINITY,
        });
    }
    if error > tol {
        return Err(Error::Accuracy {
            requested: tol,
            achieved: error,
        });
    }
    Ok(Estimate {
        value: value.value(),
        error,
    })
}

/// Integrates `f` over `[0, ∞)`.
///
/// `tail_bound(T)` must bound `|∫_T^∞ f|` from above. The truncation point
/// starts at `start` and doubles until the tail bound is below `tol / 4`; the
/// reported error includes the tail bound.
pub fn integrate_semi_infinite<F, B>(
    f: F,
    breakpoints: &[f64],
    start: f64,
    tail_bound: B,
    tol: f64,
) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let mut upper = start.max(f64::MIN_POSITIVE);
    let mut tail = tail_bound(upper);
    let mut doublings = 0;
    while tail.is_nan() || tail > 0.25 * tol {
        upper *= 2.0;
        tail = tail_bound(upper);
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Accuracy {
                requested: tol,
                achieved: tail,
            });
        }
    }
    let points = pieces(breakpoints, upper);
    let body = integrate_pieces(f, &points, tol - tail)?;
    Ok(Estimate {
        value: body.value,
        error: body.error + tail,
    })
}

/// `[0, b1, b2, ..., upper]` keeping breakpoints strictly inside `(0, upper)`.
pub(crate) fn pieces(breakpoints: &[f64], upper: f64) -> Vec<f64> {
    let mut points = vec![0.0];
    points.extend(
        breakpoints
            .iter()
            .copied()
            .filter(|&b| b > 0.0 && b < upper),
    );
    points.push(upper);
    points
}

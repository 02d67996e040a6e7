//! Adaptive Gauss–Kronrod integration and the Gauss–Chebyshev rule.
#![allow(clippy::excessive_precision)] // published coefficient tables

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights at the odd Kronrod nodes.
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

/// Globally adaptive G7–K15 integrator (bisect the worst interval first).
#[derive(Debug, Clone, Copy)]
pub struct Integrator<T> {
    abs_tol: T,
    rel_tol: T,
    max_subdivisions: usize,
}

impl<T: Real> Integrator<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self { abs_tol, rel_tol: rel_tol.max(T::tol_floor()), max_subdivisions: 10_000 }
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n.max(1);
        self
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> Result<Quadrature<T>> {
        self.try_integrate(|x| Ok(f(x)), a, b)
    }

    /// Integrates a fallible integrand over `[a, b]`; the first integrand
    /// error aborts the integration.
    pub fn try_integrate<F>(&self, mut f: F, a: T, b: T) -> Result<Quadrature<T>>
    where
        F: FnMut(T) -> Result<T>,
    {
        if !(a.is_finite() && b.is_finite()) {
            return Err(domain!("integration limits must be finite, got [{a}, {b}]"));
        }
        if a == b {
            return Ok(Quadrature { value: T::zero(), abs_error: T::zero(), evaluations: 0 });
        }
        let first = gk15(&mut f, a, b)?;
        let mut evaluations = 15;
        let mut value = first.value;
        let mut error = first.error;
        let mut roundoff = first.roundoff;
        let mut heap = BinaryHeap::new();
        heap.push(first);

        // Error below twice the accumulated rounding floor cannot be reduced further.
        while error > self.abs_tol.max(self.rel_tol * value.abs()).max(roundoff + roundoff) {
            if heap.len() >= self.max_subdivisions {
                return Err(Error::Convergence(format!(
                    "adaptive quadrature on [{a}, {b}] hit {} subdivisions (value {value}, error {error})",
                    self.max_subdivisions
                )));
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = (worst.a + worst.b) * T::lit(0.5);
            if !(mid > worst.a && mid < worst.b) {
                return Err(Error::Convergence(format!(
                    "interval around {mid} cannot be bisected further (error {error})"
                )));
            }
            let left = gk15(&mut f, worst.a, mid)?;
            let right = gk15(&mut f, mid, worst.b)?;
            evaluations += 30;
            value = value - worst.value + left.value + right.value;
            error = error - worst.error + left.error + right.error;
            roundoff = roundoff - worst.roundoff + left.roundoff + right.roundoff;
            heap.push(left);
            heap.push(right);
        }
        // Re-add in a fixed order so rounding does not depend on the update history.
        let mut segments = heap.into_vec();
        segments.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
        let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        let abs_error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        Ok(Quadrature { value, abs_error, evaluations })
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    roundoff: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn gk15<T: Real, F: FnMut(T) -> Result<T>>(f: &mut F, a: T, b: T) -> Result<Segment<T>> {
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let half_len = (b - a) * half;
    let fc = f(center)?;
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    let mut abs_sum = kronrod.abs();
    let mut fv = [T::zero(); 14];
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        let w = T::lit(WGK[j]);
        kronrod = kronrod + w * (f1 + f2);
        abs_sum = abs_sum + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = kronrod * half;
    let mut asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        asc = asc + T::lit(WGK[j]) * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let value = kronrod * half_len;
    let abs_len = half_len.abs();
    let resabs = abs_sum * abs_len;
    let resasc = asc * abs_len;
    let mut error = ((kronrod - gauss) * half_len).abs();
    if resasc > T::zero() && error > T::zero() {
        error = resasc * T::one().min((T::lit(200.0) * error / resasc).powf(T::lit(1.5)));
    }
    let roundoff = T::epsilon() * T::lit(50.0) * resabs;
    if roundoff > error {
        error = roundoff;
    }
    if !value.is_finite() {
        return Err(domain!("integrand is not finite on [{a}, {b}]"));
    }
    Ok(Segment { a, b, value, error, roundoff })
}

/// N-point Gauss–Chebyshev (first kind) rule on `(-1, 1)`.
///
/// Nodes are `cos((2n-1)π/(2N))` and every weight is `π/N`, so
/// `∫ f(x)/√(1-x²) dx ≈ Σ wₙ f(xₙ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `√(1-νₙ²)` for every node; turns the rule into an unweighted one.
    pub fn chebyshev_factors(&self) -> Vec<T> {
        self.nodes.iter().map(|&v| (T::one() - v * v).max(T::zero()).sqrt()).collect()
    }

    /// Approximates `∫_{-1}^{1} g(x) dx` as `Σ wₙ √(1-νₙ²) g(νₙ)`.
    pub fn integrate_unweighted<F>(&self, mut g: F) -> Result<T>
    where
        F: FnMut(T) -> Result<T>,
    {
        let mut acc = T::zero();
        for ((&v, &w), xi) in self.nodes.iter().zip(&self.weights).zip(self.chebyshev_factors()) {
            acc = acc + w * xi * g(v)?;
        }
        Ok(acc)
    }
}

pub fn chebyshev_rule<T: Real>(order: usize) -> Result<QuadratureRule<T>> {
    if order == 0 {
        return Err(domain!("Gauss-Chebyshev order must be at least 1"));
    }
    let n = T::from_usize_lossy(order);
    let weight = T::PI() / n;
    let nodes = (1..=order)
        .map(|k| {
            let k = T::from_usize_lossy(2 * k - 1);
            (k * T::PI() / (T::lit(2.0) * n)).cos()
        })
        .collect();
    Ok(QuadratureRule { nodes, weights: vec![weight; order] })
}

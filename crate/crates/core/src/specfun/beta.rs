//! Incomplete Beta integral with a possibly negative first parameter.

use crate::error::{domain, Result};
use crate::scalar::Real;

use super::quadrature::Integrator;

const SERIES_RADIUS: f64 = 0.5;

/// Power series `Σ (1−b)ₙ xⁿ / (n!(a+n))`, valid for |x| ≤ ½.
fn series<T: Real>(x: T, a: T, b: T) -> T {
    let mut coeff = T::one();
    let mut power = T::one();
    let mut sum = T::one() / a;
    for n in 1..400 {
        let nf = T::from_usize_lossy(n);
        coeff = coeff * (T::one() - b + nf - T::one()) / nf;
        power = power * x;
        let term = coeff * power / (a + nf);
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

/// `B(x; a, b) = ∫₀ˣ t^(a−1) (1−t)^(b−1) dt` along the real segment from 0
/// to x, continued analytically in `a` when `−1 < a < 0`.
///
/// For `x < 0` the factor `(−1)^a` that a complex contour would produce is
/// dropped, i.e. the value is `∫₀^|x| τ^(a−1) (1+τ)^(b−1) dτ` (regularised
/// at 0 when `a < 0`). This is the quantity that appears after substituting
/// `τ = s P x^(−α) / m` into a Nakagami Laplace factor.
pub fn inc_beta_gen<T: Real>(x: T, a: T, b: T) -> Result<T> {
    if a == T::zero() || a.abs() >= T::one() || !a.is_finite() {
        return Err(domain!("incomplete beta requires 0 < |a| < 1, got a = {a}"));
    }
    if !b.is_finite() || !x.is_finite() || x >= T::one() {
        return Err(domain!("incomplete beta requires finite b and x < 1, got x = {x}, b = {b}"));
    }
    if x == T::zero() {
        if a < T::zero() {
            return Err(domain!("regularised incomplete beta is singular at x = 0 for a = {a}"));
        }
        return Ok(T::zero());
    }
    let r = T::lit(SERIES_RADIUS);
    let y = x.abs();
    if y <= r {
        return Ok(y.powf(a) * series(x, a, b));
    }
    let sign = x.signum();
    let base = r.powf(a) * series(sign * r, a, b);
    let rel = T::lit(1e-13).max(T::tol_floor());
    let tail = if x < T::zero() {
        // τ = eᵘ spreads the long tail evenly.
        Integrator::new(T::zero(), rel).integrate(
            |u| {
                let t = u.exp();
                t.powf(a) * (T::one() + t).powf(b - T::one())
            },
            r.ln(),
            y.ln(),
        )?
    } else {
        Integrator::new(T::zero(), rel).integrate(
            |t| t.powf(a - T::one()) * (T::one() - t).powf(b - T::one()),
            r,
            x,
        )?
    };
    Ok(base + tail.value)
}

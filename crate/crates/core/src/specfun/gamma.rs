//! Gamma function, incomplete gamma functions and the Pochhammer symbol.
#![allow(clippy::excessive_precision)] // published coefficient tables

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_ITER: usize = 10_000;

fn lanczos_sum<T: Real>(x: T) -> T {
    // x has already been shifted down by one.
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(T::lit(LANCZOS[0]), |acc, (i, &c)| acc + T::lit(c) / (x + T::from_usize_lossy(i + 1)))
}

/// Γ(x) for real x that is not a non-positive integer.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    if x <= T::zero() && x == x.floor() {
        return Err(domain!("gamma has a pole at {x}"));
    }
    if x < T::lit(0.5) {
        let s = (T::PI() * x).sin();
        return Ok(T::PI() / (s * gamma(T::one() - x)?));
    }
    let x = x - T::one();
    let t = x + T::lit(LANCZOS_G + 0.5);
    let two_pi_sqrt = (T::lit(2.0) * T::PI()).sqrt();
    // Split the power to postpone overflow for large arguments.
    let half = t.powf((x + T::lit(0.5)) * T::lit(0.5));
    Ok(two_pi_sqrt * half * (half * (-t).exp()) * lanczos_sum(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if x <= T::zero() {
        return Err(domain!("ln_gamma requires x > 0, got {x}"));
    }
    if x < T::lit(0.5) {
        // Reflection keeps the Lanczos sum in its accurate range.
        let s = (T::PI() * x).sin();
        return Ok((T::PI() / s).ln() - ln_gamma(T::one() - x)?);
    }
    let x = x - T::one();
    let t = x + T::lit(LANCZOS_G + 0.5);
    Ok(T::lit(0.5) * (T::lit(2.0) * T::PI()).ln() + (x + T::lit(0.5)) * t.ln() - t + lanczos_sum(x).ln())
}

/// Rising factorial (x)ₙ = x(x+1)…(x+n-1), with (x)₀ = 1.
pub fn pochhammer<T: Real>(x: T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, k| acc * (x + T::from_usize_lossy(k)))
}

fn check_gamma_args<T: Real>(s: T, x: T) -> Result<()> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(domain!("incomplete gamma requires s > 0, got {s}"));
    }
    if !(x >= T::zero()) {
        return Err(domain!("incomplete gamma requires x >= 0, got {x}"));
    }
    Ok(())
}

/// Σ xⁿ / (s(s+1)…(s+n)); γ(s,x) = xˢ e⁻ˣ times this.
fn lower_series<T: Real>(s: T, x: T) -> Result<T> {
    let mut term = T::one() / s;
    let mut sum = term;
    for n in 1..MAX_ITER {
        term = term * x / (s + T::from_usize_lossy(n));
        sum = sum + term;
        if term.abs() <= sum.abs() * T::epsilon() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!("incomplete gamma series for s={s}, x={x}")))
}

/// Continued fraction h with Γ(s,x) = xˢ e⁻ˣ h (modified Lentz).
fn upper_fraction<T: Real>(s: T, x: T) -> Result<T> {
    let tiny = T::min_positive_value() / T::epsilon();
    let two = T::lit(2.0);
    let mut b = x + T::one() - s;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let i = T::from_usize_lossy(i);
        let an = -i * (i - s);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            return Ok(h);
        }
    }
    Err(Error::Convergence(format!("incomplete gamma continued fraction for s={s}, x={x}")))
}

/// Lower incomplete gamma γ(s, x) = ∫₀ˣ tˢ⁻¹ e⁻ᵗ dt.
pub fn lower_inc_gamma<T: Real>(s: T, x: T) -> Result<T> {
    check_gamma_args(s, x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return gamma(s);
    }
    if x < s + T::one() {
        Ok((s * x.ln() - x).exp() * lower_series(s, x)?)
    } else {
        let upper = (s * x.ln() - x).exp() * upper_fraction(s, x)?;
        Ok(gamma(s)? - upper)
    }
}

/// Upper incomplete gamma Γ(s, x) = ∫ₓ^∞ tˢ⁻¹ e⁻ᵗ dt.
pub fn upper_inc_gamma<T: Real>(s: T, x: T) -> Result<T> {
    check_gamma_args(s, x)?;
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x < s + T::one() {
        Ok(gamma(s)? - lower_inc_gamma(s, x)?)
    } else {
        Ok((s * x.ln() - x).exp() * upper_fraction(s, x)?)
    }
}

/// γ(s, x) / xˢ, finite at x = 0 (where it equals 1/s) and free of the
/// overflow that γ and x⁻ˢ suffer separately for large s.
pub fn lower_inc_gamma_scaled<T: Real>(s: T, x: T) -> Result<T> {
    check_gamma_args(s, x)?;
    if x == T::zero() {
        return Ok(T::one() / s);
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x < s + T::one() {
        Ok((-x).exp() * lower_series(s, x)?)
    } else {
        let ln_x = x.ln();
        Ok((ln_gamma(s)? - s * ln_x).exp() - (-x).exp() * upper_fraction(s, x)?)
    }
}

/// Regularised P(s, x) = γ(s, x)/Γ(s), the Gamma(s, 1) CDF.
pub fn regularized_lower_gamma<T: Real>(s: T, x: T) -> Result<T> {
    check_gamma_args(s, x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(T::one());
    }
    if x < s + T::one() {
        Ok((s * x.ln() - x - ln_gamma(s)?).exp() * lower_series(s, x)?)
    } else {
        Ok(T::one() - (s * x.ln() - x - ln_gamma(s)?).exp() * upper_fraction(s, x)?)
    }
}

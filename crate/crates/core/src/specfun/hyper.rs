//! ₂F₁(1, −δ; 1−δ; z) for z ≤ 0.

use crate::error::{domain, Result};
use crate::scalar::Real;

use super::quadrature::Integrator;

fn check<T: Real>(delta: T, z: T) -> Result<()> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(domain!("delta must lie in (0, 1), got {delta}"));
    }
    if !(z <= T::zero()) {
        return Err(domain!("argument must be nonpositive, got {z}"));
    }
    Ok(())
}

/// `∫₀¹ yᵖ / (yᵖ + w) dy` with `p = 1/δ`, `w = −z`.
///
/// Differs from ₂F₁(1, −δ; 1−δ; z) by `πδ/sin(πδ) · w^δ`. That term
/// cancels in every `b²F(−k b^−α) − a²F(−k a^−α)` combination, so Laplace
/// factors are built from this bounded part instead. It lies in (0, 1] and
/// is nonincreasing in `w`.
pub fn gauss_2f1_neg_reduced<T: Real>(delta: T, z: T) -> Result<T> {
    check(delta, z)?;
    let w = -z;
    if w == T::zero() {
        return Ok(T::one());
    }
    if w.is_infinite() {
        return Ok(T::zero());
    }
    let p = delta.recip();
    let rel = T::lit(1e-12).max(T::tol_floor());
    let quad = Integrator::new(T::zero(), rel);
    if w > T::one() {
        let q = quad.integrate(
            |y| {
                let yp = y.powf(p);
                yp / (yp + w)
            },
            T::zero(),
            T::one(),
        )?;
        return Ok(q.value);
    }
    // For w ≤ 1 the integrand rises to 1 at the knee y = w^δ and its deficit
    // decays over many decades beyond it, so integrate the complement
    // w/(yᵖ + w) with y = knee·t, and t = eᵘ past t = 1.
    let knee = w.powf(delta);
    let near = quad.integrate(|t| (T::one() + t.powf(p)).recip(), T::zero(), T::one())?;
    let far = quad.integrate(|u| u.exp() / (T::one() + (p * u).exp()), T::zero(), -knee.ln())?;
    Ok(T::one() - knee * (near.value + far.value))
}

/// Gauss hypergeometric ₂F₁(1, −δ; 1−δ; z) for 0 < δ < 1 and z ≤ 0.
pub fn gauss_2f1_neg<T: Real>(delta: T, z: T) -> Result<T> {
    let reduced = gauss_2f1_neg_reduced(delta, z)?;
    let w = -z;
    if w == T::zero() {
        return Ok(reduced);
    }
    let pd = T::PI() * delta;
    Ok(reduced + pd / pd.sin() * w.powf(delta))
}

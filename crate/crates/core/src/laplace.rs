//! Per-zone Laplace factors of a single interferer.

use crate::error::{domain, Result};
use crate::geometry::{Tier, ZoneGeometry};
use crate::scalar::Real;
use crate::specfun::{gauss_2f1_neg_reduced, inc_beta_gen, Integrator};

fn inner_rel_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::tol_floor())
}

/// `E[1/(1 + k x^(−α))]` for a Rayleigh-faded interferer uniform on an annulus,
/// i.e. `(b²F(−k b^(−α)) − a²F(−k a^(−α))) / (b² − a²)` with F = ₂F₁(1, −δ; 1−δ; ·).
pub fn annulus_factor<T: Real>(k: T, zone: &ZoneGeometry<T>, alpha: T) -> Result<T> {
    if zone.tier() != Tier::Terrestrial {
        return Err(domain!("annulus factor needs a terrestrial zone"));
    }
    if !(k >= T::zero()) {
        return Err(domain!("Laplace argument must be nonnegative, got {k}"));
    }
    if k == T::zero() {
        return Ok(T::one());
    }
    let delta = T::lit(2.0) / alpha;
    let (a, b) = (zone.inner(), zone.outer());
    let fb = gauss_2f1_neg_reduced(delta, -k * b.powf(-alpha))?;
    let fa = gauss_2f1_neg_reduced(delta, -k * a.powf(-alpha))?;
    Ok((b * b * fb - a * a * fa) / zone.measure())
}

/// `E[(1 + k x^(−α))^(−m)]` for a Nakagami-m interferer uniform in a shell,
/// integrated directly over `v = x³`.
pub fn shell_factor<T: Real>(k: T, m: u32, zone: &ZoneGeometry<T>, alpha: T) -> Result<T> {
    if zone.tier() != Tier::Aerial {
        return Err(domain!("shell factor needs an aerial zone"));
    }
    if !(k >= T::zero()) {
        return Err(domain!("Laplace argument must be nonnegative, got {k}"));
    }
    if m < 1 {
        return Err(domain!("Nakagami parameter must be at least 1, got {m}"));
    }
    if k == T::zero() {
        return Ok(T::one());
    }
    let (lo, hi) = (zone.inner().powi(3), zone.outer().powi(3));
    let e = alpha / T::lit(3.0);
    let m_i = m as i32;
    let q = Integrator::new(T::zero(), inner_rel_tol()).integrate(
        |v| (T::one() + k * v.powf(-e)).powi(-m_i),
        lo,
        hi,
    )?;
    Ok(q.value / (hi - lo))
}

/// [`shell_factor`] through the incomplete Beta identity. Only defined for
/// `α > 3`; kept as an independent cross-check of the direct integral.
pub fn shell_factor_beta<T: Real>(k: T, m: u32, zone: &ZoneGeometry<T>, alpha: T) -> Result<T> {
    let delta = T::lit(3.0) / alpha;
    if !(delta < T::one()) {
        return Err(domain!("Beta form of the shell factor needs alpha > 3, got {alpha}"));
    }
    if k == T::zero() {
        return Ok(T::one());
    }
    let b_param = T::one() - T::lit(f64::from(m));
    let t_hi = k * zone.inner().powf(-alpha);
    let t_lo = k * zone.outer().powf(-alpha);
    let diff = inc_beta_gen(-t_hi, -delta, b_param)? - inc_beta_gen(-t_lo, -delta, b_param)?;
    Ok(delta * k.powf(delta) * diff / zone.measure())
}

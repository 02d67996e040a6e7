//! Coverage of terrestrial devices: Laplace transforms of both interference
//! fields and the exact, Gauss–Chebyshev, low-rate and OMA estimators.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::geometry::{NetworkConfig, Tier, ZoneGeometry};
use crate::laplace::{annulus_factor, shell_factor, shell_factor_beta};
use crate::report::{CoverageReport, Method, ReportMeta};
use crate::scalar::Real;
use crate::specfun::{chebyshev_rule, gauss_2f1_neg, lower_inc_gamma_scaled, Integrator};

/// Default Gauss–Chebyshev order.
pub const DEFAULT_GC_ORDER: usize = 100;
/// Default cap on the number of series terms per Laplace factor.
pub const DEFAULT_SERIES_TERMS: usize = 500;

const RADIAL_ABS_TOL: f64 = 1e-8;
const RADIAL_MAX_SUBDIVISIONS: usize = 10_000;

/// Laplace transform at `s` of the interference from terrestrial devices
/// farther than device `i`. Equals 1 for `i = M`.
pub fn laplace_terr<T: Real>(s: T, i: usize, cfg: &NetworkConfig<T>) -> Result<T> {
    cfg.check_index(i)?;
    let k = s * cfg.p_g();
    let mut acc = T::one();
    for c in i + 1..=cfg.devices() {
        acc = acc * annulus_factor(k, &cfg.zone(Tier::Terrestrial, c)?, cfg.alpha_g())?;
    }
    Ok(acc)
}

/// Two-device special case `(4/3)F(−sP_g R^(−α)) − (1/3)F(−sP_g 2^α R^(−α))`.
pub fn laplace_terr_closed_m2<T: Real>(s: T, cfg: &NetworkConfig<T>) -> Result<T> {
    if cfg.devices() != 2 {
        return Err(Error::Config(format!("closed two-device form needs M = 2, got M = {}", cfg.devices())));
    }
    if !(s >= T::zero()) {
        return Err(domain!("Laplace argument must be nonnegative, got {s}"));
    }
    let alpha = cfg.alpha_g();
    let delta = cfg.delta_g();
    let w = s * cfg.p_g() * cfg.radius().powf(-alpha);
    let far = gauss_2f1_neg(delta, -w)?;
    let near = gauss_2f1_neg(delta, -w * T::lit(2.0).powf(alpha))?;
    Ok((T::lit(4.0) * far - near) / T::lit(3.0))
}

/// Laplace transform at `s` of the interference from all `M` aerial devices.
pub fn laplace_aerial_into_terr<T: Real>(s: T, cfg: &NetworkConfig<T>) -> Result<T> {
    if cfg.p_u() == T::zero() {
        return Ok(T::one());
    }
    let mut acc = T::one();
    for a in 1..=cfg.devices() {
        let m = cfg.m(a)?;
        let k = s * cfg.p_u() / T::lit(f64::from(m));
        acc = acc * shell_factor(k, m, &cfg.zone(Tier::Aerial, a)?, cfg.alpha_u())?;
    }
    Ok(acc)
}

/// [`laplace_aerial_into_terr`] through the incomplete Beta identity (α_u > 3 only).
pub fn laplace_aerial_into_terr_beta<T: Real>(s: T, cfg: &NetworkConfig<T>) -> Result<T> {
    if cfg.p_u() == T::zero() {
        return Ok(T::one());
    }
    let mut acc = T::one();
    for a in 1..=cfg.devices() {
        let m = cfg.m(a)?;
        let k = s * cfg.p_u() / T::lit(f64::from(m));
        acc = acc * shell_factor_beta(k, m, &cfg.zone(Tier::Aerial, a)?, cfg.alpha_u())?;
    }
    Ok(acc)
}

/// Integrates `pdf(r)·g(r)` over a zone with the radial tolerance.
pub(crate) fn radial_average<T: Real, F>(zone: &ZoneGeometry<T>, mut g: F) -> Result<T>
where
    F: FnMut(T) -> Result<T>,
{
    let q = Integrator::new(T::lit(RADIAL_ABS_TOL), T::zero())
        .with_max_subdivisions(RADIAL_MAX_SUBDIVISIONS)
        .try_integrate(|r| Ok(zone.pdf(r) * g(r)?), zone.inner(), zone.outer())?;
    Ok(q.value)
}

fn require_power<T: Real>(cfg: &NetworkConfig<T>) -> Result<()> {
    if cfg.p_g() == T::zero() {
        return Err(domain!("terrestrial coverage is undefined for P_g = 0"));
    }
    Ok(())
}

/// Integrand `e^(−ρσ²)·L_g,i(ρ)·L_u(ρ)` at distance `r`, with `ρ = τ_i r^α_g / P_g`.
fn conditional_kernel<T: Real>(r: T, i: usize, tau: T, cfg: &NetworkConfig<T>) -> Result<T> {
    let rho = tau * r.powf(cfg.alpha_g()) / cfg.p_g();
    Ok((-rho * cfg.sigma2()).exp() * laplace_terr(rho, i, cfg)? * laplace_aerial_into_terr(rho, cfg)?)
}

/// Conditional coverage of terrestrial device `i` by adaptive radial quadrature.
pub fn coverage_exact<T: Real>(i: usize, cfg: &NetworkConfig<T>) -> Result<T> {
    cfg.check_index(i)?;
    require_power(cfg)?;
    let tau = cfg.threshold(i)?;
    if tau == T::zero() {
        return Ok(T::one());
    }
    radial_average(&cfg.zone(Tier::Terrestrial, i)?, |r| conditional_kernel(r, i, tau, cfg))
}

/// Conditional coverage of terrestrial device `i` by an `order`-point
/// Gauss–Chebyshev rule mapped onto the device's annulus.
pub fn coverage_gc<T: Real>(i: usize, cfg: &NetworkConfig<T>, order: usize) -> Result<T> {
    cfg.check_index(i)?;
    require_power(cfg)?;
    let rule = chebyshev_rule::<T>(order)?;
    let zone = cfg.zone(Tier::Terrestrial, i)?;
    let tau = cfg.threshold(i)?;
    let half = T::lit(0.5);
    let (mid, half_width) = ((zone.outer() + zone.inner()) * half, (zone.outer() - zone.inner()) * half);
    // pdf(l)·dr/dν = 2 l · half_width / (b² − a²)
    let prefactor = T::lit(2.0) * half_width / zone.measure();
    let sum = rule.integrate_unweighted(|nu| {
        let l = mid + half_width * nu;
        Ok(l * conditional_kernel(l, i, tau, cfg)?)
    })?;
    Ok(prefactor * sum)
}

/// Coefficients `β_n` of one Laplace factor as a power series in `y^α`
/// (`y = r / outer radius of zone i`), truncated once terms fall below
/// 1e−12 of the partial sum.
fn factor_series<T: Real>(c: usize, i: usize, tau: T, alpha: T, delta: T, cap: usize) -> Result<Vec<T>> {
    let cf = T::from_usize_lossy(c);
    let cm = T::from_usize_lossy(c - 1);
    let ratio_c = T::from_usize_lossy(i) / cf;
    let ratio_cm = T::from_usize_lossy(i) / cm;
    let norm = T::from_usize_lossy(2 * c - 1);
    let mut out = Vec::new();
    let mut h = T::one();
    let mut partial = T::zero();
    for n in 0..cap {
        let nf = T::from_usize_lossy(n);
        if n > 0 {
            // (−δ)ₙ/(1−δ)ₙ recursion
            h = h * (nf - T::one() - delta) / (nf - delta);
        }
        let na = nf * alpha;
        let bracket = cf * cf * ratio_c.powf(na) - cm * cm * ratio_cm.powf(na);
        let term = h * (-tau).powi(n as i32) * bracket / norm;
        out.push(term);
        partial = partial + term;
        if n > 0 && term.abs() < T::lit(1e-12).max(T::epsilon()) * partial.abs() {
            return Ok(out);
        }
    }
    Err(Error::Convergence(format!(
        "Laplace factor series for zone {c} did not converge within {cap} terms (tau = {tau})"
    )))
}

fn convolve<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (j, &x) in a.iter().enumerate() {
        for (k, &y) in b.iter().enumerate() {
            out[j + k] = out[j + k] + x * y;
        }
    }
    out
}

/// `(1/α)[G(s, ψ) − y_a^(αs)·G(s, ψ y_a^α)]` with `G(s, x) = γ(s, x)/xˢ`:
/// equals `∫_{y_a}^1 y^(αs−1) e^(−ψ y^α) dy`.
fn gamma_window<T: Real>(s: T, psi: T, y_a: T, alpha: T) -> Result<T> {
    let top = lower_inc_gamma_scaled(s, psi)?;
    let bottom = if y_a == T::zero() {
        T::zero()
    } else {
        y_a.powf(alpha * s) * lower_inc_gamma_scaled(s, psi * y_a.powf(alpha))?
    };
    Ok((top - bottom) / alpha)
}

/// Low-rate closed form for `τ_i < 1` without aerial interference: the
/// Laplace factors are expanded in powers of `r^α_g` and each power is
/// integrated against the noise term in closed form.
pub fn coverage_low_rate<T: Real>(i: usize, cfg: &NetworkConfig<T>, series_terms: usize) -> Result<T> {
    cfg.check_index(i)?;
    let tau = cfg.threshold(i)?;
    if !(tau < T::one()) {
        return Err(Error::Precondition(format!("low-rate form needs tau_i < 1, got {tau}")));
    }
    if cfg.p_u() > T::zero() {
        return Err(Error::Precondition("low-rate form needs P_u = 0".into()));
    }
    require_power(cfg)?;
    let alpha = cfg.alpha_g();
    let delta = cfg.delta_g();
    let zone = cfg.zone(Tier::Terrestrial, i)?;
    let (a, b) = (zone.inner(), zone.outer());

    let mut coeffs = vec![T::one()];
    for c in i + 1..=cfg.devices() {
        coeffs = convolve(&coeffs, &factor_series(c, i, tau, alpha, delta, series_terms)?);
    }

    let psi = tau * cfg.sigma2() / cfg.p_g() * b.powf(alpha);
    let y_a = a / b;
    let mut sum = T::zero();
    for (k, &coef) in coeffs.iter().enumerate() {
        let s = T::from_usize_lossy(k) + delta;
        sum = sum + coef * gamma_window(s, psi, y_a, alpha)?;
    }
    Ok(T::lit(2.0) * b * b / zone.measure() * sum)
}

/// Coverage of terrestrial device `i` under orthogonal access: noise only,
/// threshold `2^(M R_i/B) − 1`.
pub fn coverage_oma<T: Real>(i: usize, cfg: &NetworkConfig<T>) -> Result<T> {
    cfg.check_index(i)?;
    require_power(cfg)?;
    let alpha = cfg.alpha_g();
    let zone = cfg.zone(Tier::Terrestrial, i)?;
    let (a, b) = (zone.inner(), zone.outer());
    let tau_o = cfg.threshold_oma(i)?;
    let psi = tau_o * cfg.sigma2() / cfg.p_g() * b.powf(alpha);
    Ok(T::lit(2.0) * b * b / zone.measure() * gamma_window(cfg.delta_g(), psi, a / b, alpha)?)
}

/// Multiple-access schemes compared by resource-block demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessMode {
    Oma,
    Scma,
    Noma,
}

impl fmt::Display for AccessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessMode::Oma => "oma",
            AccessMode::Scma => "scma",
            AccessMode::Noma => "noma",
        })
    }
}

impl FromStr for AccessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "oma" => Ok(AccessMode::Oma),
            "scma" => Ok(AccessMode::Scma),
            "noma" => Ok(AccessMode::Noma),
            other => Err(Error::Config(format!("unknown access mode '{other}'"))),
        }
    }
}

/// Resource blocks needed to serve `n_devices`: one each under OMA, a 2/3
/// overload factor under SCMA and `M` per block under NOMA.
pub fn required_rbs(mode: AccessMode, n_devices: usize, m: usize) -> Result<usize> {
    if n_devices == 0 || m == 0 {
        return Err(Error::Config(format!("need at least one device and M >= 1, got {n_devices} and {m}")));
    }
    Ok(match mode {
        AccessMode::Oma => n_devices,
        AccessMode::Scma => (2 * n_devices).div_ceil(3),
        AccessMode::Noma => n_devices.div_ceil(m),
    })
}

/// Settings of the analytic estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyticSettings {
    pub gc_order: usize,
    pub series_terms: usize,
}

impl Default for AnalyticSettings {
    fn default() -> Self {
        Self { gc_order: DEFAULT_GC_ORDER, series_terms: DEFAULT_SERIES_TERMS }
    }
}

/// Every terrestrial device evaluated with one analytic `method`.
pub fn coverage_report<T: Real>(cfg: &NetworkConfig<T>, method: Method, settings: &AnalyticSettings) -> Result<CoverageReport<T>> {
    let devices = 1..=cfg.devices();
    let meta = ReportMeta::new(cfg);
    match method {
        Method::Exact => {
            let v = devices.map(|i| coverage_exact(i, cfg)).collect::<Result<_>>()?;
            CoverageReport::from_conditional(Tier::Terrestrial, method, v, meta)
        }
        Method::GaussChebyshev => {
            let v = devices.map(|i| coverage_gc(i, cfg, settings.gc_order)).collect::<Result<_>>()?;
            CoverageReport::from_conditional(Tier::Terrestrial, method, v, meta.with("gc_order", settings.gc_order))
        }
        Method::LowRate => {
            let v = devices.map(|i| coverage_low_rate(i, cfg, settings.series_terms)).collect::<Result<_>>()?;
            CoverageReport::from_conditional(Tier::Terrestrial, method, v, meta.with("series_terms", settings.series_terms))
        }
        Method::Oma => {
            let v = devices.map(|i| coverage_oma(i, cfg)).collect::<Result<_>>()?;
            CoverageReport::independent(Tier::Terrestrial, v, meta)
        }
        Method::MonteCarlo => Err(Error::Precondition("Monte Carlo reports come from the simulator".into())),
    }
}

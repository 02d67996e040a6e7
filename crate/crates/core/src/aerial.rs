//! Coverage of aerial devices: Laplace transforms, the Rayleigh-channel
//! integral, Gamma-channel coverage of the nearest device and its
//! Gauss–Chebyshev polynomial approximation.

use crate::error::{domain, Error, Result};
use crate::geometry::{NetworkConfig, Tier};
use crate::laplace::{annulus_factor, shell_factor};
use crate::report::{CoverageReport, Method, ReportMeta};
use crate::scalar::Real;
use crate::specfun::chebyshev_rule;
use crate::terrestrial::{radial_average, AnalyticSettings};

/// Laplace transform at `s` of the interference from aerial devices farther
/// than device `i`. Equals 1 for `i = M`.
pub fn laplace_aerial_i<T: Real>(s: T, i: usize, cfg: &NetworkConfig<T>) -> Result<T> {
    cfg.check_index(i)?;
    let mut acc = T::one();
    for c in i + 1..=cfg.devices() {
        let m = cfg.m(c)?;
        let k = s * cfg.p_u() / T::lit(f64::from(m));
        acc = acc * shell_factor(k, m, &cfg.zone(Tier::Aerial, c)?, cfg.alpha_u())?;
    }
    Ok(acc)
}

/// Laplace transform at `s` of the interference from all `M` terrestrial devices.
pub fn laplace_terr_into_aerial<T: Real>(s: T, cfg: &NetworkConfig<T>) -> Result<T> {
    let k = s * cfg.p_g();
    let mut acc = T::one();
    for a in 1..=cfg.devices() {
        acc = acc * annulus_factor(k, &cfg.zone(Tier::Terrestrial, a)?, cfg.alpha_g())?;
    }
    Ok(acc)
}

/// `e^(−sσ²)·L_u,i(s)·L_g(s)`: Laplace transform of interference plus noise.
fn composite<T: Real>(s: T, i: usize, cfg: &NetworkConfig<T>) -> Result<T> {
    Ok((-s * cfg.sigma2()).exp() * laplace_aerial_i(s, i, cfg)? * laplace_terr_into_aerial(s, cfg)?)
}

fn require_power<T: Real>(cfg: &NetworkConfig<T>) -> Result<()> {
    if cfg.p_u() == T::zero() {
        return Err(domain!("aerial coverage is undefined for P_u = 0"));
    }
    Ok(())
}

/// Conditional coverage of aerial device `i` whose own channel is Rayleigh (`m_i = 1`).
pub fn coverage_aerial_rayleigh<T: Real>(i: usize, cfg: &NetworkConfig<T>) -> Result<T> {
    cfg.check_index(i)?;
    if cfg.m(i)? != 1 {
        return Err(Error::Precondition(format!("Rayleigh form needs m_{i} = 1, got {}", cfg.m(i)?)));
    }
    require_power(cfg)?;
    let tau = cfg.threshold(i)?;
    if tau == T::zero() {
        return Ok(T::one());
    }
    radial_average(&cfg.zone(Tier::Aerial, i)?, |r| {
        composite(tau * r.powf(cfg.alpha_u()) / cfg.p_u(), i, cfg)
    })
}

/// Finite-difference scheme for derivatives in `ln s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilScheme {
    Central,
    /// Central differences at `h` and `h/2` combined to cancel the `h²` error.
    Richardson,
}

/// Numerical derivative operator used by the Gamma-channel coverage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeStencil {
    order: usize,
    step: f64,
    scheme: StencilScheme,
}

impl DerivativeStencil {
    pub const MIN_STEP: f64 = 1e-6;
    pub const MAX_STEP: f64 = 1e-2;
    /// Largest tolerated gap between the two Richardson levels.
    pub const RICHARDSON_TOL: f64 = 1e-4;

    /// `order`: highest derivative taken; `step`: relative step in `s`.
    pub fn new(order: usize, step: f64, scheme: StencilScheme) -> Result<Self> {
        if order > 2 {
            return Err(Error::Precondition(format!("derivative order {order} unsupported (max 2)")));
        }
        if !(Self::MIN_STEP..=Self::MAX_STEP).contains(&step) {
            return Err(Error::Precondition(format!(
                "relative step {step} outside [{}, {}]",
                Self::MIN_STEP,
                Self::MAX_STEP
            )));
        }
        Ok(Self { order, step, scheme })
    }

    /// Richardson stencil of order `m − 1` with step 1e−3.
    pub fn for_shape(m: u32) -> Result<Self> {
        Self::new(m.saturating_sub(1) as usize, 1e-3, StencilScheme::Richardson)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn scheme(&self) -> StencilScheme {
        self.scheme
    }

    /// `φ(u)`, `φ'(u)` and `φ''(u)` (as far as `order`) for `φ(u) = f(eᵘ)`.
    fn log_derivatives<T: Real, F>(&self, s: T, mut f: F) -> Result<[T; 3]>
    where
        F: FnMut(T) -> Result<T>,
    {
        let u = s.ln();
        let f0 = f(s)?;
        if self.order == 0 {
            return Ok([f0, T::zero(), T::zero()]);
        }
        let mut level = |h: T| -> Result<(T, T)> {
            let plus = f((u + h).exp())?;
            let minus = f((u - h).exp())?;
            let d1 = (plus - minus) / (h + h);
            let d2 = (plus - f0 - f0 + minus) / (h * h);
            Ok((d1, d2))
        };
        let h = T::lit(self.step);
        let (d1, d2) = level(h)?;
        if self.scheme == StencilScheme::Central {
            return Ok([f0, d1, d2]);
        }
        let (e1, e2) = level(h * T::lit(0.5))?;
        let three = T::lit(3.0);
        let r1 = (T::lit(4.0) * e1 - d1) / three;
        let r2 = (T::lit(4.0) * e2 - d2) / three;
        let tol = T::lit(Self::RICHARDSON_TOL);
        let gap1 = (r1 - e1).abs();
        let gap2 = if self.order >= 2 { (r2 - e2).abs() } else { T::zero() };
        if gap1 > tol || gap2 > tol {
            return Err(Error::Convergence(format!(
                "Richardson levels disagree at s = {s} (gaps {gap1}, {gap2})"
            )));
        }
        Ok([f0, r1, r2])
    }
}

/// `Σ_{k<m} (−s)^k/k! · ∂^k 𝓛(s)` from derivatives in `ln s`:
/// `s𝓛' = φ'` and `s²𝓛'' = φ'' − φ'`.
fn gamma_ccdf_sum<T: Real>(m: u32, d: [T; 3]) -> T {
    let [f0, d1, d2] = d;
    match m {
        1 => f0,
        2 => f0 - d1,
        _ => f0 - d1 + (d2 - d1) * T::lit(0.5),
    }
}

fn require_two_devices<T: Real>(cfg: &NetworkConfig<T>) -> Result<()> {
    if cfg.devices() != 2 {
        return Err(Error::Precondition(format!("nearest-device Gamma coverage needs M = 2, got M = {}", cfg.devices())));
    }
    Ok(())
}

/// Conditional coverage of the nearest aerial device when its own power gain
/// is Gamma(m, 1/m), `m ∈ {1, 2, 3}`. The other devices keep the fading of `cfg`.
///
/// Uses `P(g > ρ I) = Σ_{k<m} E[e^(−mρI)(mρI)^k]/k!` with the interference-plus-noise
/// transform `𝓛(s) = e^(−sσ²) L_u,1(s) L_g(s)` differentiated numerically.
pub fn coverage_aerial_nearest_gamma<T: Real>(cfg: &NetworkConfig<T>, m: u32, stencil: &DerivativeStencil) -> Result<T> {
    require_two_devices(cfg)?;
    if !(1..=3).contains(&m) {
        return Err(Error::Precondition(format!("Gamma shape m = {m} unsupported (need 1, 2 or 3)")));
    }
    if stencil.order() + 1 < m as usize {
        return Err(Error::Precondition(format!("stencil order {} too low for m = {m}", stencil.order())));
    }
    require_power(cfg)?;
    let tau = cfg.threshold(1)?;
    if tau == T::zero() {
        return Ok(T::one());
    }
    let mf = T::lit(f64::from(m));
    radial_average(&cfg.zone(Tier::Aerial, 1)?, |r| {
        let s = mf * tau * r.powf(cfg.alpha_u()) / cfg.p_u();
        let d = stencil.log_derivatives(s, |x| composite(x, 1, cfg))?;
        Ok(gamma_ccdf_sum(m, d))
    })
}

/// `1 − (1 − L)^m` for `m ∈ {2, 3}`.
pub fn nearest_polynomial<T: Real>(m: u32, l: T) -> Result<T> {
    match m {
        2 => Ok(-l * l + l + l),
        3 => Ok(l * l * l - T::lit(3.0) * l * l + T::lit(3.0) * l),
        _ => Err(Error::Precondition(format!("polynomial form covers m = 2 or 3, got {m}"))),
    }
}

/// Interference-limited Gauss–Chebyshev approximation of the nearest aerial
/// device's coverage for `m ∈ {2, 3}`, `M = 2`, `P_g = 0`: nodes
/// `t_n = R(ν_n + 1)/4` over `(0, R/2)` weighted by `6 t_n²/R²` and the
/// polynomial `1 − (1 − L_u,1(ρ))^m` with `ρ = τ₁ t_n^α_u / P_u`.
///
/// The result is not clamped. Values above `1 + ε`, with `ε` the rule's own
/// error in normalising the distance density, raise an invariant error.
pub fn coverage_aerial_nearest_closed<T: Real>(cfg: &NetworkConfig<T>, m: u32, order: usize) -> Result<T> {
    require_two_devices(cfg)?;
    if cfg.p_g() != T::zero() {
        return Err(Error::Precondition("polynomial form needs P_g = 0".into()));
    }
    if !(2..=3).contains(&m) {
        return Err(Error::Precondition(format!("polynomial form covers m = 2 or 3, got {m}")));
    }
    require_power(cfg)?;
    let rule = chebyshev_rule::<T>(order)?;
    let radius = cfg.radius();
    let tau = cfg.threshold(1)?;
    let scale = T::lit(6.0) / (radius * radius);
    let mut value = T::zero();
    let mut mass = T::zero();
    for ((&nu, &w), xi) in rule.nodes().iter().zip(rule.weights()).zip(rule.chebyshev_factors()) {
        let t = radius * (nu + T::one()) / T::lit(4.0);
        let weight = scale * w * xi * t * t;
        let l = laplace_aerial_i(tau * t.powf(cfg.alpha_u()) / cfg.p_u(), 1, cfg)?;
        value = value + weight * nearest_polynomial(m, l)?;
        mass = mass + weight;
    }
    let slack = (mass - T::one()).abs() + T::tol_floor();
    if !(value >= T::zero() && value <= T::one() + slack) {
        return Err(Error::Invariant(format!("polynomial coverage {value} outside [0, 1 + {slack}]")));
    }
    Ok(value)
}

/// Conditional coverage of aerial device `i` with the method that fits its
/// fading: the Rayleigh integral for `m_i = 1`, the Gamma-channel form for the
/// nearest of two devices otherwise.
pub fn coverage_aerial<T: Real>(i: usize, cfg: &NetworkConfig<T>) -> Result<T> {
    let m = cfg.m(i)?;
    if m == 1 {
        coverage_aerial_rayleigh(i, cfg)
    } else if i == 1 {
        coverage_aerial_nearest_gamma(cfg, m, &DerivativeStencil::for_shape(m)?)
    } else {
        Err(Error::Precondition(format!("no analytic form for aerial device {i} with m = {m}")))
    }
}

/// Every aerial device evaluated with one analytic `method`. Only the exact
/// route exists for all devices; Gauss–Chebyshev maps to the polynomial form
/// for the nearest device and is unavailable for the others.
pub fn coverage_report<T: Real>(cfg: &NetworkConfig<T>, method: Method, settings: &AnalyticSettings) -> Result<CoverageReport<T>> {
    let meta = ReportMeta::new(cfg);
    match method {
        Method::Exact => {
            let v = (1..=cfg.devices()).map(|i| coverage_aerial(i, cfg)).collect::<Result<_>>()?;
            CoverageReport::from_conditional(Tier::Aerial, method, v, meta)
        }
        Method::GaussChebyshev => {
            let m = cfg.m(1)?;
            let first = coverage_aerial_nearest_closed(cfg, m, settings.gc_order)?;
            let rest = (2..=cfg.devices()).map(|i| coverage_aerial(i, cfg));
            let v = std::iter::once(Ok(first)).chain(rest).collect::<Result<_>>()?;
            CoverageReport::from_conditional(Tier::Aerial, method, v, meta.with("gc_order", settings.gc_order))
        }
        other => Err(Error::Precondition(format!("estimator {other} is not defined for aerial devices"))),
    }
}

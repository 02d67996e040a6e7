//! Power-zone partition, device distance laws and the scenario configuration.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which of the two device populations a zone or quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    /// Ground devices in a disc around the base station.
    Terrestrial,
    /// Airborne devices in the upper half-ball.
    Aerial,
}

impl Tier {
    pub const BOTH: [Tier; 2] = [Tier::Terrestrial, Tier::Aerial];

    /// Spatial dimension of the region the tier lives in.
    pub fn dimension(self) -> i32 {
        match self {
            Tier::Terrestrial => 2,
            Tier::Aerial => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Terrestrial => "terrestrial",
            Tier::Aerial => "aerial",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "terrestrial" | "ground" | "g" => Ok(Tier::Terrestrial),
            "aerial" | "air" | "u" => Ok(Tier::Aerial),
            other => Err(Error::Config(format!("unknown tier '{other}'"))),
        }
    }
}

/// The `i`-th power zone: an annulus (terrestrial) or a spherical shell
/// (aerial) between `inner` and `outer`, holding exactly one device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneGeometry<T> {
    index: usize,
    tier: Tier,
    inner: T,
    outer: T,
}

impl<T: Real> ZoneGeometry<T> {
    /// Zone `index` (1-based) of `zones` equal-width zones over radius `radius`.
    /// The nearest zone starts at `r0` instead of the origin.
    pub fn new(tier: Tier, index: usize, zones: usize, radius: T, r0: T) -> Result<Self> {
        if zones == 0 || index == 0 || index > zones {
            return Err(Error::Config(format!("zone index {index} outside 1..={zones}")));
        }
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::Config(format!("cluster radius must be positive, got {radius}")));
        }
        let width = radius / T::from_usize_lossy(zones);
        if !(r0 > T::zero() && r0 < width) {
            return Err(Error::Config(format!("r0 must lie in (0, R/M) = (0, {width}), got {r0}")));
        }
        let inner = if index == 1 { r0 } else { width * T::from_usize_lossy(index - 1) };
        let outer = width * T::from_usize_lossy(index);
        Ok(Self { index, tier, inner, outer })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    pub fn inner(&self) -> T {
        self.inner
    }

    pub fn outer(&self) -> T {
        self.outer
    }

    /// `outer^d − inner^d` with d the tier's dimension.
    pub fn measure(&self) -> T {
        let d = self.tier.dimension();
        self.outer.powi(d) - self.inner.powi(d)
    }

    pub fn contains(&self, r: T) -> bool {
        r >= self.inner && r <= self.outer
    }

    /// Distance density of the zone's device; zero outside the zone.
    pub fn pdf(&self, r: T) -> T {
        if !self.contains(r) {
            return T::zero();
        }
        match self.tier {
            Tier::Terrestrial => T::lit(2.0) * r / self.measure(),
            Tier::Aerial => T::lit(3.0) * r * r / self.measure(),
        }
    }

    /// Distance CDF of the zone's device.
    pub fn cdf(&self, r: T) -> T {
        if r <= self.inner {
            return T::zero();
        }
        if r >= self.outer {
            return T::one();
        }
        let d = self.tier.dimension();
        (r.powi(d) - self.inner.powi(d)) / self.measure()
    }

    /// Inverse CDF: maps `u ∈ (0, 1)` to a distance in the zone.
    pub fn sample_distance(&self, u: T) -> T {
        let d = self.tier.dimension();
        let v = self.inner.powi(d) + u * self.measure();
        let r = match self.tier {
            Tier::Terrestrial => v.sqrt(),
            Tier::Aerial => v.cbrt(),
        };
        r.max(self.inner).min(self.outer)
    }
}

fn require_tier<T: Real>(zone: &ZoneGeometry<T>, tier: Tier) -> Result<()> {
    if zone.tier != tier {
        return Err(Error::Precondition(format!("expected a {tier} zone, got a {} zone", zone.tier)));
    }
    Ok(())
}

/// Terrestrial device distance density `2r/(outer² − inner²)`.
pub fn pdf_terrestrial<T: Real>(zone: &ZoneGeometry<T>, r: T) -> Result<T> {
    require_tier(zone, Tier::Terrestrial)?;
    Ok(zone.pdf(r))
}

/// Aerial device distance density `3r²/(outer³ − inner³)`.
pub fn pdf_aerial<T: Real>(zone: &ZoneGeometry<T>, r: T) -> Result<T> {
    require_tier(zone, Tier::Aerial)?;
    Ok(zone.pdf(r))
}

pub fn sample_distance<T: Real>(zone: &ZoneGeometry<T>, u: T) -> T {
    zone.sample_distance(u)
}

/// `10^((dBm − 30)/10)` watts; `-inf` maps to 0.
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    T::lit(10.0).powf((dbm - T::lit(30.0)) / T::lit(10.0))
}

pub fn watts_to_dbm<T: Real>(watts: T) -> T {
    T::lit(10.0) * watts.log10() + T::lit(30.0)
}

/// Thermal noise `−174 + 10·log10(B)` dBm, in watts.
pub fn thermal_noise<T: Real>(bandwidth: T) -> T {
    dbm_to_watts(T::lit(-174.0) + T::lit(10.0) * bandwidth.log10())
}

/// Complete scenario: geometry, propagation, powers, noise, fading and rates.
///
/// Device indices in every accessor are 1-based, matching the zone numbering.
/// Thresholds are derived on demand from the rates and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig<T> {
    devices: usize,
    radius: T,
    r0: T,
    alpha_g: T,
    alpha_u: T,
    p_g: T,
    p_u: T,
    sigma2: T,
    bandwidth: T,
    nakagami: Vec<u32>,
    rates: Vec<T>,
}

impl<T: Real> Default for NetworkConfig<T> {
    fn default() -> Self {
        NetworkConfigBuilder::default().build().expect("default scenario is valid")
    }
}

impl<T: Real> NetworkConfig<T> {
    pub fn builder() -> NetworkConfigBuilder<T> {
        NetworkConfigBuilder::default()
    }

    /// Builder preloaded with every field of `self`.
    pub fn to_builder(&self) -> NetworkConfigBuilder<T> {
        NetworkConfigBuilder {
            devices: self.devices,
            radius: self.radius,
            r0: self.r0,
            alpha_g: self.alpha_g,
            alpha_u: self.alpha_u,
            p_g: self.p_g,
            p_u: self.p_u,
            sigma2: Some(self.sigma2),
            bandwidth: self.bandwidth,
            nakagami: Some(self.nakagami.clone()),
            rates: Some(self.rates.clone()),
        }
    }

    /// Devices per tier, `M`.
    pub fn devices(&self) -> usize {
        self.devices
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn alpha_g(&self) -> T {
        self.alpha_g
    }

    pub fn alpha_u(&self) -> T {
        self.alpha_u
    }

    pub fn alpha(&self, tier: Tier) -> T {
        match tier {
            Tier::Terrestrial => self.alpha_g,
            Tier::Aerial => self.alpha_u,
        }
    }

    /// `2/α_g`.
    pub fn delta_g(&self) -> T {
        T::lit(2.0) / self.alpha_g
    }

    /// `3/α_u`.
    pub fn delta_u(&self) -> T {
        T::lit(3.0) / self.alpha_u
    }

    /// Terrestrial transmit power, watts.
    pub fn p_g(&self) -> T {
        self.p_g
    }

    /// Aerial transmit power, watts.
    pub fn p_u(&self) -> T {
        self.p_u
    }

    pub fn power(&self, tier: Tier) -> T {
        match tier {
            Tier::Terrestrial => self.p_g,
            Tier::Aerial => self.p_u,
        }
    }

    /// Noise power, watts.
    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    /// Nakagami parameters of the aerial devices, nearest first.
    pub fn nakagami(&self) -> &[u32] {
        &self.nakagami
    }

    /// Nakagami parameter of the aerial device in zone `i`.
    pub fn m(&self, i: usize) -> Result<u32> {
        self.check_index(i)?;
        Ok(self.nakagami[i - 1])
    }

    /// Target rates in bits/s, nearest first.
    pub fn rates(&self) -> &[T] {
        &self.rates
    }

    /// Target rate of device `i` in bits per channel use, `R_i/B`.
    pub fn rate_bpcu(&self, i: usize) -> Result<T> {
        self.check_index(i)?;
        Ok(self.rates[i - 1] / self.bandwidth)
    }

    /// SINR threshold `τ_i = 2^(R_i/B) − 1`.
    pub fn threshold(&self, i: usize) -> Result<T> {
        Ok(self.rate_bpcu(i)?.exp2() - T::one())
    }

    pub fn thresholds(&self) -> Vec<T> {
        (1..=self.devices).map(|i| self.threshold(i).expect("index in range")).collect()
    }

    /// OMA threshold `2^(M·R_i/B) − 1`: each device gets a 1/M share of the band.
    pub fn threshold_oma(&self, i: usize) -> Result<T> {
        Ok((self.rate_bpcu(i)? * T::from_usize_lossy(self.devices)).exp2() - T::one())
    }

    pub fn zone(&self, tier: Tier, i: usize) -> Result<ZoneGeometry<T>> {
        ZoneGeometry::new(tier, i, self.devices, self.radius, self.r0)
    }

    pub fn zones(&self, tier: Tier) -> Vec<ZoneGeometry<T>> {
        (1..=self.devices).map(|i| self.zone(tier, i).expect("validated geometry")).collect()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.devices {
            return Err(Error::Config(format!("device index {i} outside 1..={}", self.devices)));
        }
        Ok(())
    }

    /// Lossy conversion to another precision.
    pub fn cast<U: Real>(&self) -> NetworkConfig<U> {
        let c = |x: T| U::lit(x.as_f64());
        NetworkConfig {
            devices: self.devices,
            radius: c(self.radius),
            r0: c(self.r0),
            alpha_g: c(self.alpha_g),
            alpha_u: c(self.alpha_u),
            p_g: c(self.p_g),
            p_u: c(self.p_u),
            sigma2: c(self.sigma2),
            bandwidth: c(self.bandwidth),
            nakagami: self.nakagami.clone(),
            rates: self.rates.iter().map(|&r| c(r)).collect(),
        }
    }
}

/// Validating builder for [`NetworkConfig`].
///
/// Unset fading parameters default to 1 for every device, unset rates to one
/// bit per channel use, and unset noise to the thermal floor of the band.
#[derive(Debug, Clone)]
pub struct NetworkConfigBuilder<T> {
    devices: usize,
    radius: T,
    r0: T,
    alpha_g: T,
    alpha_u: T,
    p_g: T,
    p_u: T,
    sigma2: Option<T>,
    bandwidth: T,
    nakagami: Option<Vec<u32>>,
    rates: Option<Vec<T>>,
}

impl<T: Real> Default for NetworkConfigBuilder<T> {
    fn default() -> Self {
        Self {
            devices: 2,
            radius: T::lit(1000.0),
            r0: T::one(),
            alpha_g: T::lit(4.0),
            alpha_u: T::lit(3.0),
            p_g: T::lit(1e-3),
            p_u: T::zero(),
            sigma2: None,
            bandwidth: T::lit(125e3),
            nakagami: None,
            rates: None,
        }
    }
}

impl<T: Real> NetworkConfigBuilder<T> {
    pub fn devices(mut self, m: usize) -> Self {
        self.devices = m;
        self
    }

    pub fn radius(mut self, r: T) -> Self {
        self.radius = r;
        self
    }

    pub fn r0(mut self, r0: T) -> Self {
        self.r0 = r0;
        self
    }

    pub fn alpha_g(mut self, a: T) -> Self {
        self.alpha_g = a;
        self
    }

    pub fn alpha_u(mut self, a: T) -> Self {
        self.alpha_u = a;
        self
    }

    pub fn p_g(mut self, watts: T) -> Self {
        self.p_g = watts;
        self
    }

    pub fn p_u(mut self, watts: T) -> Self {
        self.p_u = watts;
        self
    }

    pub fn p_g_dbm(self, dbm: T) -> Self {
        self.p_g(dbm_to_watts(dbm))
    }

    pub fn p_u_dbm(self, dbm: T) -> Self {
        self.p_u(dbm_to_watts(dbm))
    }

    pub fn sigma2(mut self, watts: T) -> Self {
        self.sigma2 = Some(watts);
        self
    }

    /// Drops an explicit noise power so it is derived from the bandwidth again.
    pub fn thermal_sigma2(mut self) -> Self {
        self.sigma2 = None;
        self
    }

    pub fn bandwidth(mut self, hz: T) -> Self {
        self.bandwidth = hz;
        self
    }

    pub fn nakagami(mut self, m: Vec<u32>) -> Self {
        self.nakagami = Some(m);
        self
    }

    /// Target rates in bits/s.
    pub fn rates(mut self, bps: Vec<T>) -> Self {
        self.rates = Some(bps);
        self
    }

    /// Target rates in bits per channel use, scaled by the bandwidth set so far.
    pub fn rates_bpcu(self, bpcu: Vec<T>) -> Self {
        let b = self.bandwidth;
        self.rates(bpcu.into_iter().map(|r| r * b).collect())
    }

    /// Sets every rate so that the threshold equals `tau`.
    pub fn uniform_threshold(self, tau: T) -> Self {
        let m = self.devices;
        self.rates_bpcu(vec![(T::one() + tau).log2(); m])
    }

    pub fn build(self) -> Result<NetworkConfig<T>> {
        let fail = |msg: String| Err(Error::Config(msg));
        let m = self.devices;
        if m == 0 {
            return fail("M must be at least 1".into());
        }
        if !(self.radius > T::zero() && self.radius.is_finite()) {
            return fail(format!("R must be positive and finite, got {}", self.radius));
        }
        let width = self.radius / T::from_usize_lossy(m);
        if !(self.r0 > T::zero() && self.r0 < width) {
            return fail(format!("r0 must satisfy 0 < r0 < R/M = {width}, got {}", self.r0));
        }
        if !(self.alpha_g > T::lit(2.0) && self.alpha_g.is_finite()) {
            return fail(format!("alpha_g must exceed 2 (delta_g = 2/alpha_g < 1), got {}", self.alpha_g));
        }
        if !(self.alpha_u >= T::lit(3.0) && self.alpha_u.is_finite()) {
            return fail(format!("alpha_u must be at least 3, got {}", self.alpha_u));
        }
        for (name, p) in [("P_g", self.p_g), ("P_u", self.p_u)] {
            if !(p >= T::zero() && p.is_finite()) {
                return fail(format!("{name} must be a finite nonnegative power, got {p}"));
            }
        }
        if !(self.bandwidth > T::zero() && self.bandwidth.is_finite()) {
            return fail(format!("B must be positive, got {}", self.bandwidth));
        }
        let sigma2 = self.sigma2.unwrap_or_else(|| thermal_noise(self.bandwidth));
        if !(sigma2 >= T::zero() && sigma2.is_finite()) {
            return fail(format!("sigma2 must be finite and nonnegative, got {sigma2}"));
        }
        let nakagami = self.nakagami.unwrap_or_else(|| vec![1; m]);
        if nakagami.len() != m {
            return fail(format!("m_list has {} entries, expected M = {m}", nakagami.len()));
        }
        if let Some(bad) = nakagami.iter().find(|&&x| x < 1) {
            return fail(format!("Nakagami parameters must be integers >= 1, got {bad}"));
        }
        let rates = self.rates.unwrap_or_else(|| vec![self.bandwidth; m]);
        if rates.len() != m {
            return fail(format!("rates list has {} entries, expected M = {m}", rates.len()));
        }
        if let Some(bad) = rates.iter().find(|r| !(**r >= T::zero() && r.is_finite())) {
            return fail(format!("target rates must be finite and nonnegative, got {bad}"));
        }
        Ok(NetworkConfig {
            devices: m,
            radius: self.radius,
            r0: self.r0,
            alpha_g: self.alpha_g,
            alpha_u: self.alpha_u,
            p_g: self.p_g,
            p_u: self.p_u,
            sigma2,
            bandwidth: self.bandwidth,
            nakagami,
            rates,
        })
    }
}

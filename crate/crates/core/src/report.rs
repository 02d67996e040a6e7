//! Coverage results shared by the analytic estimators and the simulator.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{NetworkConfig, Tier};
use crate::scalar::Real;

/// How a coverage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Adaptive radial quadrature of the Laplace-factorised integrand.
    Exact,
    /// Fixed-order Gauss–Chebyshev sum of the same integrand.
    GaussChebyshev,
    /// Series in the threshold with incomplete Gamma terms (τ < 1, no aerial tier).
    LowRate,
    /// Orthogonal access with a 1/M share of the band.
    Oma,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Exact, Method::GaussChebyshev, Method::LowRate, Method::Oma, Method::MonteCarlo];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::GaussChebyshev => "gauss-chebyshev",
            Method::LowRate => "low-rate",
            Method::Oma => "oma",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key || (key == "gc" && *m == Method::GaussChebyshev) || (key == "mc" && *m == Method::MonteCarlo))
            .ok_or_else(|| Error::Config(format!("unknown estimator '{s}'")))
    }
}

/// Scenario snapshot and estimator settings a report was produced with.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta<T> {
    pub config: NetworkConfig<T>,
    pub settings: Vec<(String, String)>,
}

impl<T: Real> ReportMeta<T> {
    pub fn new(config: &NetworkConfig<T>) -> Self {
        Self { config: config.clone(), settings: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.settings.push((key.to_string(), value.to_string()));
        self
    }

    pub fn setting(&self, key: &str) -> Option<&str> {
        self.settings.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Conditional (`per_device`) and overall (`cumulative`) coverage of one tier,
/// nearest device first.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport<T> {
    tier: Tier,
    method: Method,
    per_device: Vec<T>,
    cumulative: Vec<T>,
    std_error: Option<(Vec<T>, Vec<T>)>,
    meta: ReportMeta<T>,
}

/// How far a Gauss–Chebyshev value may exceed 1. The finite rule does not
/// normalise the distance density exactly, so coverage close to 1 can land
/// slightly above it.
pub const GC_SLACK: f64 = 1e-3;

fn check_unit<T: Real>(what: &str, values: &[T], slack: T) -> Result<()> {
    for (k, &v) in values.iter().enumerate() {
        if !(v >= -slack && v <= T::one() + slack) {
            return Err(Error::Invariant(format!("{what} of device {} is {v}, outside [0, 1]", k + 1)));
        }
    }
    Ok(())
}

impl<T: Real> CoverageReport<T> {
    /// Analytic report: the overall coverage is the running product of the
    /// conditional values.
    pub fn from_conditional(tier: Tier, method: Method, per_device: Vec<T>, meta: ReportMeta<T>) -> Result<Self> {
        let slack = match method {
            Method::GaussChebyshev => T::lit(GC_SLACK),
            _ => T::tol_floor(),
        };
        check_unit("conditional coverage", &per_device, slack)?;
        let cumulative = per_device
            .iter()
            .scan(T::one(), |acc, &p| {
                *acc = *acc * p;
                Some(*acc)
            })
            .collect();
        Ok(Self { tier, method, per_device, cumulative, std_error: None, meta })
    }

    /// OMA report: devices are decoded independently, so nothing is chained.
    pub fn independent(tier: Tier, per_device: Vec<T>, meta: ReportMeta<T>) -> Result<Self> {
        check_unit("coverage", &per_device, T::tol_floor())?;
        let cumulative = per_device.clone();
        Ok(Self { tier, method: Method::Oma, per_device, cumulative, std_error: None, meta })
    }

    /// Simulation report. `per_device` holds the marginal success rates and
    /// `cumulative` the joint SIC event; both come with standard errors.
    pub fn from_simulation(
        tier: Tier,
        per_device: (Vec<T>, Vec<T>),
        cumulative: (Vec<T>, Vec<T>),
        meta: ReportMeta<T>,
    ) -> Result<Self> {
        check_unit("conditional coverage", &per_device.0, T::zero())?;
        check_unit("cumulative coverage", &cumulative.0, T::zero())?;
        if cumulative.0.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Invariant("simulated cumulative coverage increases with the device index".into()));
        }
        Ok(Self {
            tier,
            method: Method::MonteCarlo,
            per_device: per_device.0,
            cumulative: cumulative.0,
            std_error: Some((per_device.1, cumulative.1)),
            meta,
        })
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn per_device(&self) -> &[T] {
        &self.per_device
    }

    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    /// Standard errors of the conditional values (simulation only).
    pub fn per_device_std_error(&self) -> Option<&[T]> {
        self.std_error.as_ref().map(|s| s.0.as_slice())
    }

    /// Standard errors of the cumulative values (simulation only).
    pub fn cumulative_std_error(&self) -> Option<&[T]> {
        self.std_error.as_ref().map(|s| s.1.as_slice())
    }

    pub fn meta(&self) -> &ReportMeta<T> {
        &self.meta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_product() {
        let cfg = NetworkConfig::<f64>::default();
        let r = CoverageReport::from_conditional(Tier::Terrestrial, Method::Exact, vec![0.9, 0.5], ReportMeta::new(&cfg)).unwrap();
        assert_eq!(r.cumulative(), &[0.9, 0.45]);
        assert!(CoverageReport::from_conditional(Tier::Aerial, Method::Exact, vec![1.2, 0.5], ReportMeta::new(&cfg)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("gc".parse::<Method>().unwrap(), Method::GaussChebyshev);
        assert!("bogus".parse::<Method>().is_err());
    }
}

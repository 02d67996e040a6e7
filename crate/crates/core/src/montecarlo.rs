//! Monte Carlo simulation of the SIC decoding chain, outage sum rate and
//! finite-blocklength throughput.
//!
//! Trials are processed in fixed blocks. Coverage uses integer success counts
//! and rate averages are summed block by block in trial order, so results do
//! not depend on the number of worker threads.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;

use crate::channel::ChannelDraw;
use crate::error::{domain, Error, Result};
use crate::geometry::{NetworkConfig, Tier};
use crate::report::{CoverageReport, ReportMeta};
use crate::scalar::Real;
use crate::specfun::inverse_q;

/// Trials per work unit.
pub const BLOCK: u64 = 4096;

/// A simulated mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub trials: u64,
    pub seed: u64,
}

impl<T: Real> SimEstimate<T> {
    /// Binomial proportion `successes / trials` with `√(p(1−p)/n)`.
    pub fn proportion(successes: u64, trials: u64, seed: u64) -> Self {
        let n = T::lit(trials as f64);
        let p = T::lit(successes as f64) / n;
        Self { value: p, std_error: (p * (T::one() - p) / n).sqrt(), trials, seed }
    }
}

fn blocks(trials: u64) -> Vec<Range<u64>> {
    (0..trials.div_ceil(BLOCK)).map(|b| b * BLOCK..((b + 1) * BLOCK).min(trials)).collect()
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    Ok(())
}

#[derive(Clone)]
struct Counts {
    marginal: Vec<u64>,
    joint: Vec<u64>,
}

impl Counts {
    fn new(m: usize) -> Self {
        Self { marginal: vec![0; m], joint: vec![0; m] }
    }

    fn record<T: Real>(&mut self, sinr: &[T], tau: &[T]) {
        let mut chain = true;
        for (k, (&g, &t)) in sinr.iter().zip(tau).enumerate() {
            let ok = g > t;
            chain &= ok;
            self.marginal[k] += u64::from(ok);
            self.joint[k] += u64::from(chain);
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.marginal.iter_mut().zip(other.marginal) {
            *a += b;
        }
        for (a, b) in self.joint.iter_mut().zip(other.joint) {
            *a += b;
        }
        self
    }
}

fn report_from_counts<T: Real>(
    tier: Tier,
    counts: &Counts,
    trials: u64,
    seed: u64,
    meta: ReportMeta<T>,
) -> Result<CoverageReport<T>> {
    let split = |c: &[u64]| -> (Vec<T>, Vec<T>) {
        c.iter().map(|&k| SimEstimate::<T>::proportion(k, trials, seed)).map(|e| (e.value, e.std_error)).unzip()
    };
    CoverageReport::from_simulation(tier, split(&counts.marginal), split(&counts.joint), meta)
}

/// Simulated coverage of both tiers.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedCoverage<T> {
    pub terrestrial: CoverageReport<T>,
    pub aerial: CoverageReport<T>,
}

impl<T> SimulatedCoverage<T> {
    pub fn tier(&self, tier: Tier) -> &CoverageReport<T> {
        match tier {
            Tier::Terrestrial => &self.terrestrial,
            Tier::Aerial => &self.aerial,
        }
    }
}

/// Simulates `trials` network realizations and decodes both tiers nearest
/// first. `per_device` holds the marginal rate `P(SINR_i > τ_i)` and
/// `cumulative` the rate of the joint event that devices `1..=i` all decode.
pub fn run_coverage_sim<T: Real>(cfg: &NetworkConfig<T>, trials: u64, seed: u64) -> Result<SimulatedCoverage<T>> {
    require_trials(trials)?;
    let m = cfg.devices();
    let tau = cfg.thresholds();
    let zero = || (Counts::new(m), Counts::new(m));
    let (terr, aer) = blocks(trials)
        .into_par_iter()
        .map(|range| {
            let mut acc = zero();
            for t in range {
                let draw = ChannelDraw::sample(cfg, seed, t);
                acc.0.record(&draw.sinr(cfg, Tier::Terrestrial), &tau);
                acc.1.record(&draw.sinr(cfg, Tier::Aerial), &tau);
            }
            acc
        })
        .reduce(zero, |a, b| (a.0.merge(b.0), a.1.merge(b.1)));
    let meta = || ReportMeta::new(cfg).with("trials", trials).with("seed", seed);
    Ok(SimulatedCoverage {
        terrestrial: report_from_counts(Tier::Terrestrial, &terr, trials, seed, meta())?,
        aerial: report_from_counts(Tier::Aerial, &aer, trials, seed, meta())?,
    })
}

/// Simulated coverage of terrestrial devices under orthogonal access: each
/// device has a 1/M share of the band and sees noise only.
pub fn run_oma_sim<T: Real>(cfg: &NetworkConfig<T>, trials: u64, seed: u64) -> Result<CoverageReport<T>> {
    require_trials(trials)?;
    let m = cfg.devices();
    let tau: Vec<T> = (1..=m).map(|i| cfg.threshold_oma(i)).collect::<Result<_>>()?;
    let counts = blocks(trials)
        .into_par_iter()
        .map(|range| {
            let mut marginal = vec![0u64; m];
            for t in range {
                let draw = ChannelDraw::sample(cfg, seed, t);
                for (k, rx) in draw.received(cfg, Tier::Terrestrial).into_iter().enumerate() {
                    marginal[k] += u64::from(rx / cfg.sigma2() > tau[k]);
                }
            }
            marginal
        })
        .reduce(|| vec![0u64; m], |a, b| a.iter().zip(b).map(|(x, y)| x + y).collect());
    let est: Vec<_> = counts.iter().map(|&k| SimEstimate::<T>::proportion(k, trials, seed).value).collect();
    CoverageReport::independent(Tier::Terrestrial, est, ReportMeta::new(cfg).with("trials", trials).with("seed", seed))
}

/// Sums `f(trial)` over all trials with a fixed block decomposition.
fn block_sum<T: Real, F>(trials: u64, width: usize, f: F) -> Result<Vec<T>>
where
    F: Fn(u64, &mut [T]) -> Result<()> + Sync,
{
    let partials: Vec<Vec<T>> = blocks(trials)
        .into_par_iter()
        .map(|range| {
            let mut acc = vec![T::zero(); width];
            let mut row = vec![T::zero(); width];
            for t in range {
                row.iter_mut().for_each(|x| *x = T::zero());
                f(t, &mut row)?;
                for (a, r) in acc.iter_mut().zip(&row) {
                    *a = *a + *r;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(partials.into_iter().fold(vec![T::zero(); width], |mut acc, p| {
        for (a, x) in acc.iter_mut().zip(p) {
            *a = *a + x;
        }
        acc
    }))
}

/// Simulated Laplace transform `E[exp(−s I)]` of the interference from tier
/// `source` devices with index greater than `beyond` (0 keeps all of them).
pub fn interference_laplace<T: Real>(
    cfg: &NetworkConfig<T>,
    source: Tier,
    beyond: usize,
    s: T,
    trials: u64,
    seed: u64,
) -> Result<SimEstimate<T>> {
    require_trials(trials)?;
    let sums = block_sum(trials, 2, |t, row| {
        let draw = ChannelDraw::sample(cfg, seed, t);
        let i: T = draw.received(cfg, source).into_iter().skip(beyond).sum();
        let x = (-s * i).exp();
        row[0] = x;
        row[1] = x * x;
        Ok(())
    })?;
    let n = T::lit(trials as f64);
    let mean = sums[0] / n;
    let var = (sums[1] / n - mean * mean).max(T::zero());
    Ok(SimEstimate { value: mean, std_error: (var / n).sqrt(), trials, seed })
}

/// Packet length `N_f` in channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketLength {
    Finite(u64),
    Infinite,
}

impl fmt::Display for PacketLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PacketLength::Finite(n) => write!(f, "{n}"),
            PacketLength::Infinite => f.write_str("inf"),
        }
    }
}

/// `log2(1+γ) − √(V/N_f)·Q⁻¹(P)/ln 2` with `V = 1 − (1+γ)⁻²`, floored at 0.
pub fn finite_blocklength_rate<T: Real>(sinr: T, packet: PacketLength, outage: T) -> Result<T> {
    if !(sinr >= T::zero()) {
        return Err(domain!("SINR must be nonnegative, got {sinr}"));
    }
    if !(outage > T::zero() && outage < T::one()) {
        return Err(domain!("outage probability must lie in (0, 1), got {outage}"));
    }
    let shannon = sinr.ln_1p() / T::LN_2();
    let n = match packet {
        PacketLength::Infinite => return Ok(shannon),
        PacketLength::Finite(0) => return Err(domain!("packet length must be at least 1")),
        PacketLength::Finite(n) => T::lit(n as f64),
    };
    let v = T::one() - (T::one() + sinr).powi(-2);
    let penalty = (v / n).sqrt() * inverse_q(outage)? / T::LN_2();
    Ok((shannon - penalty).max(T::zero()))
}

/// Which SINR enters the finite-blocklength rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SinrMode {
    /// The target threshold `τ_i`, so the Shannon term is the target rate.
    #[default]
    Threshold,
    /// Per-trial SINR, averaged over trials.
    Instantaneous,
}

/// Treatment of devices whose outage probability is at least one half, where
/// `Q⁻¹(P) ≤ 0` would turn the dispersion penalty into a bonus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutageRegime {
    /// Such a device delivers no reliable rate with a finite packet.
    #[default]
    DropUnreliable,
    /// Keep the formula but never let the penalty go negative.
    ServeAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ThroughputOptions {
    pub sinr: SinrMode,
    pub regime: OutageRegime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThroughputKind {
    OutageSumRate,
    FiniteBlocklength,
}

/// Per-device and total rates in bits per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport<T> {
    pub per_device_rate: Vec<T>,
    pub sum_rate: T,
    pub packet_length: PacketLength,
    pub kind: ThroughputKind,
}

impl<T: Real> ThroughputReport<T> {
    fn new(per_device_rate: Vec<T>, packet_length: PacketLength, kind: ThroughputKind) -> Self {
        let sum_rate = per_device_rate.iter().fold(T::zero(), |a, &b| a + b);
        Self { per_device_rate, sum_rate, packet_length, kind }
    }

    /// Average rate per device, i.e. per resource block share.
    pub fn per_rb(&self) -> T {
        self.sum_rate / T::from_usize_lossy(self.per_device_rate.len())
    }
}

/// `Σ_i P_i,cov · R_i/B` for one tier of an analytic or simulated report.
pub fn outage_sum_rate_from<T: Real>(cfg: &NetworkConfig<T>, report: &CoverageReport<T>) -> Result<ThroughputReport<T>> {
    let rates = report
        .cumulative()
        .iter()
        .enumerate()
        .map(|(k, &p)| Ok(p * cfg.rate_bpcu(k + 1)?))
        .collect::<Result<_>>()?;
    Ok(ThroughputReport::new(rates, PacketLength::Infinite, ThroughputKind::OutageSumRate))
}

/// Simulated outage sum rate of one tier.
pub fn outage_sum_rate<T: Real>(cfg: &NetworkConfig<T>, tier: Tier, trials: u64, seed: u64) -> Result<ThroughputReport<T>> {
    let sim = run_coverage_sim(cfg, trials, seed)?;
    outage_sum_rate_from(cfg, sim.tier(tier))
}

fn outage_of<T: Real>(cumulative: T, packet: PacketLength, regime: OutageRegime, device: usize) -> Result<Option<T>> {
    let p = T::one() - cumulative;
    if packet == PacketLength::Infinite {
        return Ok(Some(p));
    }
    if p == T::zero() {
        return Err(Error::DegenerateCoverage(format!("device {device} never fails, Q^-1(0) is undefined")));
    }
    match regime {
        OutageRegime::DropUnreliable if p >= T::lit(0.5) => Ok(None),
        OutageRegime::ServeAll if p == T::one() => Err(Error::DegenerateCoverage(format!(
            "device {device} never decodes, Q^-1(1) is undefined"
        ))),
        _ => Ok(Some(p)),
    }
}

fn rate_with_regime<T: Real>(sinr: T, packet: PacketLength, p: T, regime: OutageRegime) -> Result<T> {
    if packet == PacketLength::Infinite {
        return Ok(sinr.ln_1p() / T::LN_2());
    }
    match regime {
        OutageRegime::DropUnreliable => finite_blocklength_rate(sinr, packet, p),
        // Q⁻¹(P) < 0 for P > ½; the penalty is floored at zero instead.
        OutageRegime::ServeAll => {
            let capped = p.min(T::lit(0.5));
            finite_blocklength_rate(sinr, packet, capped)
        }
    }
}

/// Threshold-mode finite-blocklength rates for any coverage report, analytic
/// or simulated: device `i` transmits at `τ_i` with outage `1 − P_i,cov`.
pub fn threshold_throughput<T: Real>(
    cfg: &NetworkConfig<T>,
    report: &CoverageReport<T>,
    packet: PacketLength,
    regime: OutageRegime,
) -> Result<ThroughputReport<T>> {
    let rates = report
        .cumulative()
        .iter()
        .enumerate()
        .map(|(k, &c)| match outage_of(c, packet, regime, k + 1)? {
            None => Ok(T::zero()),
            Some(p) => rate_with_regime(cfg.threshold(k + 1)?, packet, p, regime),
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(ThroughputReport::new(rates, packet, ThroughputKind::FiniteBlocklength))
}

/// Finite-blocklength throughput of one tier: the rate of every device with
/// its overall outage probability `P_i = 1 − P_i,cov` taken from simulation.
pub fn network_throughput<T: Real>(
    cfg: &NetworkConfig<T>,
    tier: Tier,
    packet: PacketLength,
    trials: u64,
    seed: u64,
    options: ThroughputOptions,
) -> Result<ThroughputReport<T>> {
    let sim = run_coverage_sim(cfg, trials, seed)?;
    throughput_from_sim(cfg, sim.tier(tier), packet, seed, options)
}

/// [`network_throughput`] on an existing simulation report; instantaneous
/// mode replays the same trials from `seed`.
pub fn throughput_from_sim<T: Real>(
    cfg: &NetworkConfig<T>,
    report: &CoverageReport<T>,
    packet: PacketLength,
    seed: u64,
    options: ThroughputOptions,
) -> Result<ThroughputReport<T>> {
    let trials = report
        .meta()
        .setting("trials")
        .and_then(|t| t.parse::<u64>().ok())
        .ok_or_else(|| Error::Precondition("throughput needs a simulated coverage report".into()))?;
    let tier = report.tier();
    let m = cfg.devices();
    let outages: Vec<Option<T>> = report
        .cumulative()
        .iter()
        .enumerate()
        .map(|(k, &c)| outage_of(c, packet, options.regime, k + 1))
        .collect::<Result<_>>()?;
    let rates = match options.sinr {
        SinrMode::Threshold => return threshold_throughput(cfg, report, packet, options.regime),
        SinrMode::Instantaneous => {
            let sums = block_sum(trials, m, |t, row| {
                let sinr = ChannelDraw::sample(cfg, seed, t).sinr(cfg, tier);
                for (k, p) in outages.iter().enumerate() {
                    if let Some(p) = p {
                        row[k] = rate_with_regime(sinr[k], packet, *p, options.regime)?;
                    }
                }
                Ok(())
            })?;
            let n = T::lit(trials as f64);
            sums.into_iter().map(|s| s / n).collect()
        }
    };
    Ok(ThroughputReport::new(rates, packet, ThroughputKind::FiniteBlocklength))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(tau: f64) -> NetworkConfig<f64> {
        NetworkConfig::builder().uniform_threshold(tau).build().unwrap()
    }

    #[test]
    fn blocks_cover_all_trials() {
        let b = blocks(10_000);
        assert_eq!(b.first().unwrap().start, 0);
        assert_eq!(b.last().unwrap().end, 10_000);
        assert_eq!(b.iter().map(|r| r.end - r.start).sum::<u64>(), 10_000);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let c = cfg(1.0).to_builder().p_u(1e-3).build().unwrap();
        let a = run_coverage_sim(&c, 20_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_coverage_sim(&c, 20_000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn limits() {
        let c = cfg(1e-12);
        let r = run_coverage_sim(&c, 5000, 1).unwrap();
        assert!(r.terrestrial.cumulative().iter().all(|&p| p == 1.0));
        let noisy = cfg(1.0).to_builder().sigma2(1e10).build().unwrap();
        let r = run_coverage_sim(&noisy, 5000, 1).unwrap();
        assert!(r.terrestrial.per_device().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn rate_formula() {
        let g = 3.0_f64;
        assert_eq!(finite_blocklength_rate(g, PacketLength::Infinite, 0.1).unwrap(), 2.0);
        let r100 = finite_blocklength_rate(g, PacketLength::Finite(100), 0.1).unwrap();
        let r300 = finite_blocklength_rate(g, PacketLength::Finite(300), 0.1).unwrap();
        assert!(r100 < r300 && r300 < 2.0);
        let v: f64 = 1.0 - 1.0 / 16.0;
        let want = 2.0 - (v / 100.0).sqrt() * 1.281_551_565_544_600_5 / std::f64::consts::LN_2;
        assert!((r100 - want).abs() < 1e-9);
        assert!(finite_blocklength_rate(1e-12, PacketLength::Finite(100), 0.1).unwrap() < 1e-6);
        assert!(finite_blocklength_rate(g, PacketLength::Finite(0), 0.1).is_err());
        assert!(finite_blocklength_rate(g, PacketLength::Finite(10), 1.0).is_err());
    }

    #[test]
    fn outage_sum_rate_cap() {
        let c = NetworkConfig::<f64>::builder().rates_bpcu(vec![1.5, 1.0]).sigma2(0.0).p_g(1e3).build().unwrap();
        let full = CoverageReport::from_conditional(Tier::Terrestrial, crate::Method::Exact, vec![1.0, 1.0], ReportMeta::new(&c)).unwrap();
        assert!((outage_sum_rate_from(&c, &full).unwrap().sum_rate - 2.5).abs() < 1e-12);
    }
}

//! Analytic estimators against Monte Carlo on a pinned grid of scenarios.

use nomacov::montecarlo::{run_coverage_sim, run_oma_sim};
use nomacov::terrestrial::AnalyticSettings;
use nomacov::{Config, Method, Tier};

use crate::error::{CliError, Result};
use crate::sweep::analytic_device;

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;
/// Agreement band in standard errors.
pub const BAND: f64 = 3.0;

const OFF: f64 = f64::NEG_INFINITY;

/// One scenario of the grid. Powers are in dBm; `OFF` silences a tier.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub devices: usize,
    pub tau: f64,
    pub p_g_dbm: f64,
    pub p_u_dbm: f64,
    pub nakagami: Vec<u32>,
}

impl GridPoint {
    fn new(devices: usize, tau: f64, p_g_dbm: f64, p_u_dbm: f64, nakagami: &[u32]) -> Self {
        let nakagami = if nakagami.is_empty() { vec![1; devices] } else { nakagami.to_vec() };
        Self { devices, tau, p_g_dbm, p_u_dbm, nakagami }
    }

    pub fn config(&self) -> nomacov::Result<Config> {
        Config::builder()
            .devices(self.devices)
            .uniform_threshold(self.tau)
            .p_g_dbm(self.p_g_dbm)
            .p_u_dbm(self.p_u_dbm)
            .nakagami(self.nakagami.clone())
            .build()
    }

    /// Tiers with a transmitting device population.
    pub fn active_tiers(&self) -> Vec<Tier> {
        let mut t = Vec::new();
        if self.p_g_dbm > OFF {
            t.push(Tier::Terrestrial);
        }
        if self.p_u_dbm > OFF {
            t.push(Tier::Aerial);
        }
        t
    }
}

/// The twenty scenarios: ten led by the terrestrial tier and ten by the
/// aerial tier, over M ∈ {2, 3, 5}, τ ∈ {0.1, 0.5, 1, 2} and powers
/// ∈ {−10, 0, 10} dBm.
pub fn pinned_grid() -> Vec<GridPoint> {
    let p = GridPoint::new;
    vec![
        p(2, 0.1, -10.0, OFF, &[]),
        p(2, 0.5, 0.0, OFF, &[]),
        p(2, 1.0, 10.0, OFF, &[]),
        p(2, 2.0, 0.0, -10.0, &[]),
        p(3, 0.1, 0.0, OFF, &[]),
        p(3, 0.5, 10.0, -10.0, &[]),
        p(3, 2.0, -10.0, OFF, &[]),
        p(5, 0.1, 10.0, OFF, &[]),
        p(5, 0.5, 0.0, OFF, &[]),
        p(5, 1.0, 10.0, 0.0, &[]),
        p(2, 0.1, OFF, 0.0, &[1, 1]),
        p(2, 0.5, OFF, -10.0, &[2, 1]),
        p(2, 1.0, OFF, 0.0, &[3, 1]),
        p(2, 2.0, 0.0, 10.0, &[2, 1]),
        p(2, 0.5, OFF, 0.0, &[1, 3]),
        p(3, 0.1, -10.0, 10.0, &[1, 1, 1]),
        p(3, 1.0, OFF, 0.0, &[1, 1, 2]),
        p(3, 2.0, OFF, 10.0, &[1, 1, 1]),
        p(5, 0.5, OFF, 10.0, &[]),
        p(5, 2.0, 0.0, 0.0, &[]),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The estimator does not cover this case.
    NotApplicable(String),
}

/// One analytic value next to its simulated counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub point: usize,
    pub tier: Tier,
    pub device: usize,
    pub estimator: Method,
    pub analytic: Option<f64>,
    pub simulated: f64,
    pub std_error: f64,
    pub verdict: Verdict,
}

impl Comparison {
    /// Distance in standard errors.
    pub fn z(&self) -> Option<f64> {
        self.analytic.map(|a| (a - self.simulated).abs() / self.std_error)
    }
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub trials: u64,
    pub seed: u64,
    pub grid: Vec<GridPoint>,
    pub comparisons: Vec<Comparison>,
}

impl SelftestReport {
    pub fn failures(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn checked(&self) -> usize {
        self.comparisons.iter().filter(|c| !matches!(c.verdict, Verdict::NotApplicable(_))).count()
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

// The simulated proportion's own error can vanish at p near 0 or 1; the
// binomial error at the analytic value and a one-count floor keep the band
// meaningful there.
fn band_error(simulated_se: f64, analytic: f64, trials: u64) -> f64 {
    let n = trials as f64;
    let p = analytic.clamp(0.0, 1.0);
    simulated_se.max((p * (1.0 - p) / n).sqrt()).max(1.0 / n)
}

fn estimators(tier: Tier) -> &'static [Method] {
    match tier {
        Tier::Terrestrial => &[Method::Exact, Method::GaussChebyshev, Method::LowRate, Method::Oma],
        Tier::Aerial => &[Method::Exact, Method::GaussChebyshev],
    }
}

fn compare_point(index: usize, point: &GridPoint, trials: u64, seed: u64) -> Result<Vec<Comparison>> {
    let cfg = point.config()?;
    let settings = AnalyticSettings::default();
    let sim = run_coverage_sim(&cfg, trials, seed)?;
    let oma = if point.p_g_dbm > OFF { Some(run_oma_sim(&cfg, trials, seed)?) } else { None };
    let mut out = Vec::new();
    for tier in point.active_tiers() {
        for &method in estimators(tier) {
            for i in 1..=cfg.devices() {
                let (simulated, sim_se) = match (method, &oma) {
                    (Method::Oma, Some(r)) => {
                        let p = r.per_device()[i - 1];
                        (p, (p * (1.0 - p) / trials as f64).sqrt())
                    }
                    _ => {
                        let r = sim.tier(tier);
                        (r.per_device()[i - 1], r.per_device_std_error().map_or(0.0, |s| s[i - 1]))
                    }
                };
                let (analytic, std_error, verdict) = match analytic_device(&cfg, tier, method, i, &settings) {
                    Ok(a) => {
                        let se = band_error(sim_se, a, trials);
                        let verdict = if (a - simulated).abs() <= BAND * se { Verdict::Pass } else { Verdict::Fail };
                        (Some(a), se, verdict)
                    }
                    Err(e @ nomacov::Error::Precondition(_)) => (None, sim_se, Verdict::NotApplicable(e.to_string())),
                    Err(e) => return Err(e.into()),
                };
                out.push(Comparison { point: index, tier, device: i, estimator: method, analytic, simulated, std_error, verdict });
            }
        }
    }
    Ok(out)
}

/// Runs the whole grid. Points run one after another; each simulation is
/// parallel inside and deterministic for any thread count.
pub fn run_selftest(trials: u64, seed: u64) -> Result<SelftestReport> {
    if trials == 0 {
        return Err(CliError::Spec("selftest needs at least one trial".into()));
    }
    let grid = pinned_grid();
    let mut comparisons = Vec::new();
    for (k, point) in grid.iter().enumerate() {
        comparisons.extend(compare_point(k + 1, point, trials, seed)?);
    }
    Ok(SelftestReport { trials, seed, grid, comparisons })
}

fn dbm(v: f64) -> String {
    if v == OFF { "off".into() } else { v.to_string() }
}

/// CSV with a commented header; identical inputs give identical bytes.
pub fn render(report: &SelftestReport) -> Result<Vec<u8>> {
    let mut out = format!(
        "# nomacov selftest\n# trials: {}\n# seed: {}\n# band: {BAND} standard errors\n# checked: {}\n# failed: {}\n",
        report.trials,
        report.seed,
        report.checked(),
        report.failures().count()
    )
    .into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "point", "M", "tau", "P_g_dBm", "P_u_dBm", "m_list", "tier", "device", "estimator", "analytic", "simulated", "std_error", "z",
        "verdict",
    ])?;
    for c in &report.comparisons {
        let p = &report.grid[c.point - 1];
        let m_list: Vec<_> = p.nakagami.iter().map(u32::to_string).collect();
        let verdict = match &c.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail => "FAIL".to_string(),
            Verdict::NotApplicable(why) => format!("n/a: {why}"),
        };
        w.write_record([
            c.point.to_string(),
            p.devices.to_string(),
            p.tau.to_string(),
            dbm(p.p_g_dbm),
            dbm(p.p_u_dbm),
            m_list.join(" "),
            c.tier.to_string(),
            c.device.to_string(),
            c.estimator.to_string(),
            c.analytic.map_or(String::new(), |a| a.to_string()),
            c.simulated.to_string(),
            c.std_error.to_string(),
            c.z().map_or(String::new(), |z| format!("{z:.3}")),
            verdict,
        ])?;
    }
    out.extend(w.into_inner().map_err(|e| CliError::Output(e.into_error().into()))?);
    Ok(out)
}

//! Parameter sweeps: one scenario, one swept variable, a grid of values and a
//! set of estimators, written as CSV behind a commented header.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use nomacov::montecarlo::{
    outage_sum_rate_from, run_coverage_sim, threshold_throughput, throughput_from_sim, OutageRegime, PacketLength,
    SimulatedCoverage, SinrMode, ThroughputOptions,
};
use nomacov::terrestrial::AnalyticSettings;
use nomacov::{aerial, terrestrial, Config, CoverageReport, Method, NetworkConfigBuilder, Tier};
use rayon::prelude::*;

use crate::config::{apply_entries, describe, parse_entries, Entry};
use crate::error::{CliError, Result};

/// The quantity a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    /// SINR threshold shared by every device.
    Tau,
    /// Terrestrial transmit power in dBm.
    Pg,
    /// Aerial transmit power in dBm.
    Pu,
    /// Cluster radius in metres.
    Radius,
    /// Nakagami parameter of the devices listed in `m_devices`.
    Fading,
    /// Packet length in channel uses; `inf` for the asymptotic rate.
    PacketLength,
    /// Number of devices per tier.
    Devices,
}

impl Variable {
    const ALL: [Variable; 7] = [
        Variable::Tau,
        Variable::Pg,
        Variable::Pu,
        Variable::Radius,
        Variable::Fading,
        Variable::PacketLength,
        Variable::Devices,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::Tau => "tau",
            Variable::Pg => "P_g",
            Variable::Pu => "P_u",
            Variable::Radius => "R",
            Variable::Fading => "m",
            Variable::PacketLength => "N_f",
            Variable::Devices => "M",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variable {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Variable::ALL.into_iter().find(|v| v.name() == s.trim()).ok_or_else(|| {
            let names: Vec<_> = Variable::ALL.iter().map(|v| v.name()).collect();
            CliError::Spec(format!("unknown variable '{s}', expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub scenario: Config,
    /// `None` evaluates the scenario once.
    pub variable: Option<Variable>,
    pub grid: Vec<f64>,
    pub estimators: Vec<Method>,
    pub tiers: Vec<Tier>,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub analytic: AnalyticSettings,
    /// Fixed packet length for the rate column; the swept value wins for `N_f`.
    pub packet_length: Option<PacketLength>,
    pub throughput: ThroughputOptions,
    /// Devices whose Nakagami parameter a `m` sweep sets (1-based).
    pub m_devices: Vec<usize>,
    pub timing: bool,
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

impl SweepSpec {
    /// Single evaluation of `scenario`.
    pub fn single(scenario: Config) -> Self {
        Self {
            scenario,
            variable: None,
            grid: vec![f64::NAN],
            estimators: vec![Method::Exact],
            tiers: Tier::BOTH.to_vec(),
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            output: None,
            analytic: AnalyticSettings::default(),
            packet_length: None,
            throughput: ThroughputOptions::default(),
            m_devices: vec![1],
            timing: false,
        }
    }

    /// Parses a spec file. Scenario keys override `base`.
    pub fn parse(text: &str, base: NetworkConfigBuilder<f64>) -> Result<Self> {
        let (builder, rest) = apply_entries(base, parse_entries(text)?)?;
        let mut spec = Self::single(builder.build()?);
        let mut grid: Option<&Entry> = None;
        for e in &rest {
            match e.key.as_str() {
                "variable" => spec.variable = Some(e.value.parse().map_err(|err: CliError| e.error(err))?),
                "grid" => grid = Some(e),
                "estimators" => spec.estimators = e.list::<Method>().map_err(|_| e.error("unknown estimator"))?,
                "tiers" => spec.tiers = e.list::<Tier>().map_err(|_| e.error("unknown tier"))?,
                "trials" => spec.trials = e.integer()?,
                "seed" => spec.seed = e.integer()?,
                "output" => spec.output = Some(PathBuf::from(e.value.trim())),
                "gc_order" => spec.analytic.gc_order = e.integer()? as usize,
                "series_terms" => spec.analytic.series_terms = e.integer()? as usize,
                "packet_length" => spec.packet_length = Some(packet_length(e.number("")?).map_err(|err| e.error(err))?),
                "sinr_mode" => {
                    spec.throughput.sinr = match e.value.trim() {
                        "threshold" => SinrMode::Threshold,
                        "instantaneous" => SinrMode::Instantaneous,
                        other => return Err(e.error(format!("expected threshold or instantaneous, got '{other}'"))),
                    }
                }
                "regime" => {
                    spec.throughput.regime = match e.value.trim() {
                        "drop-unreliable" => OutageRegime::DropUnreliable,
                        "serve-all" => OutageRegime::ServeAll,
                        other => return Err(e.error(format!("expected drop-unreliable or serve-all, got '{other}'"))),
                    }
                }
                "m_devices" => spec.m_devices = e.list()?,
                // Shorthand for rates that give every device this threshold.
                "tau" => spec.scenario = spec.scenario.to_builder().uniform_threshold(e.number("")?).build()?,
                _ => return Err(e.error("unknown key")),
            }
        }
        if let Some(e) = grid {
            spec.grid = e.items().map(grid_value).collect::<Option<_>>().ok_or_else(|| e.error("grid values must be numbers or inf"))?;
        } else if spec.variable.is_some() {
            return Err(CliError::Spec("a swept variable needs a grid".into()));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(CliError::Spec(msg.into()));
        if self.grid.is_empty() {
            return fail("grid is empty");
        }
        if self.variable.is_some() && self.grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return fail("grid must be strictly increasing");
        }
        if self.estimators.is_empty() {
            return fail("no estimators selected");
        }
        if self.tiers.is_empty() {
            return fail("no tiers selected");
        }
        if self.estimators.contains(&Method::MonteCarlo) && self.trials == 0 {
            return fail("monte-carlo needs at least one trial");
        }
        if self.m_devices.contains(&0) {
            return fail("m_devices are 1-based");
        }
        Ok(())
    }

    /// Scenario at one grid value.
    pub fn config_at(&self, value: f64) -> nomacov::Result<Config> {
        let cfg = &self.scenario;
        let b = cfg.to_builder();
        let Some(variable) = self.variable else { return Ok(cfg.clone()) };
        let count = |v: f64, what: &str| {
            if v >= 1.0 && v.fract() == 0.0 && v.is_finite() {
                Ok(v as usize)
            } else {
                Err(nomacov::Error::Config(format!("{what} must be a positive integer, got {v}")))
            }
        };
        match variable {
            Variable::Tau => b.uniform_threshold(value).build(),
            Variable::Pg => b.p_g_dbm(value).build(),
            Variable::Pu => b.p_u_dbm(value).build(),
            Variable::Radius => b.radius(value).build(),
            Variable::PacketLength => Ok(cfg.clone()),
            Variable::Fading => {
                let m = count(value, "m")? as u32;
                let mut list = cfg.nakagami().to_vec();
                let n = list.len();
                for &i in &self.m_devices {
                    *list.get_mut(i - 1).ok_or_else(|| nomacov::Error::Config(format!("m_devices names device {i} of {n}")))? = m;
                }
                b.nakagami(list).build()
            }
            // Per-device lists keep their leading entries and repeat the last one.
            Variable::Devices => {
                let m = count(value, "M")?;
                let resize = |v: &[f64]| (0..m).map(|k| v[k.min(v.len() - 1)]).collect::<Vec<_>>();
                let fading: Vec<u32> = (0..m).map(|k| cfg.nakagami()[k.min(cfg.devices() - 1)]).collect();
                b.devices(m).nakagami(fading).rates(resize(cfg.rates())).build()
            }
        }
    }

    fn packet_at(&self, value: f64) -> nomacov::Result<Option<PacketLength>> {
        match self.variable {
            Some(Variable::PacketLength) => packet_length(value).map(Some).map_err(nomacov::Error::Config),
            _ => Ok(self.packet_length),
        }
    }
}

fn grid_value(s: &str) -> Option<f64> {
    match s.to_ascii_lowercase().as_str() {
        "inf" => Some(f64::INFINITY),
        "-inf" | "off" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

/// Parses a packet length: a positive integer or `inf`.
pub fn parse_packet_length(text: &str) -> Result<PacketLength> {
    let v = grid_value(text.trim()).ok_or_else(|| CliError::Spec(format!("packet length '{text}' is not a number")))?;
    packet_length(v).map_err(CliError::Spec)
}

fn packet_length(v: f64) -> std::result::Result<PacketLength, String> {
    if v == f64::INFINITY {
        Ok(PacketLength::Infinite)
    } else if v >= 1.0 && v.fract() == 0.0 {
        Ok(PacketLength::Finite(v as u64))
    } else {
        Err(format!("packet length must be a positive integer or inf, got {v}"))
    }
}

/// One output line.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub value: f64,
    pub tier: Tier,
    /// Device index, or `None` for the per-cell summary row.
    pub device: Option<usize>,
    pub estimator: Method,
    pub conditional: Option<f64>,
    pub cumulative: Option<f64>,
    pub std_error: Option<f64>,
    pub rate_bpcu: Option<f64>,
    pub status: Result<(), String>,
    pub seconds: Option<f64>,
}

struct Cell {
    report: CoverageReport<f64>,
    rates: Option<Vec<f64>>,
}

fn evaluate(
    spec: &SweepSpec,
    cfg: &Config,
    tier: Tier,
    method: Method,
    packet: Option<PacketLength>,
    sim: &mut Option<SimulatedCoverage<f64>>,
) -> nomacov::Result<Cell> {
    let report = match (method, tier) {
        (Method::MonteCarlo, _) => {
            if sim.is_none() {
                *sim = Some(run_coverage_sim(cfg, spec.trials, spec.seed)?);
            }
            sim.as_ref().map(|s| s.tier(tier).clone()).expect("simulated above")
        }
        (_, Tier::Terrestrial) => terrestrial::coverage_report(cfg, method, &spec.analytic)?,
        (_, Tier::Aerial) => aerial::coverage_report(cfg, method, &spec.analytic)?,
    };
    let rates = match packet {
        None => outage_sum_rate_from(cfg, &report)?.per_device_rate,
        Some(p) if method == Method::MonteCarlo => throughput_from_sim(cfg, &report, p, spec.seed, spec.throughput)?.per_device_rate,
        Some(p) if spec.throughput.sinr == SinrMode::Threshold => threshold_throughput(cfg, &report, p, spec.throughput.regime)?.per_device_rate,
        Some(_) => return Ok(Cell { report, rates: None }),
    };
    Ok(Cell { report, rates: Some(rates) })
}

/// Coverage of device `i` alone with one analytic estimator.
pub fn analytic_device(cfg: &Config, tier: Tier, method: Method, i: usize, settings: &AnalyticSettings) -> nomacov::Result<f64> {
    match (tier, method) {
        (Tier::Terrestrial, Method::Exact) => terrestrial::coverage_exact(i, cfg),
        (Tier::Terrestrial, Method::GaussChebyshev) => terrestrial::coverage_gc(i, cfg, settings.gc_order),
        (Tier::Terrestrial, Method::LowRate) => terrestrial::coverage_low_rate(i, cfg, settings.series_terms),
        (Tier::Terrestrial, Method::Oma) => terrestrial::coverage_oma(i, cfg),
        (Tier::Aerial, Method::GaussChebyshev) if i == 1 => aerial::coverage_aerial_nearest_closed(cfg, cfg.m(1)?, settings.gc_order),
        (Tier::Aerial, Method::Exact | Method::GaussChebyshev) => aerial::coverage_aerial(i, cfg),
        (_, other) => Err(nomacov::Error::Precondition(format!("{other} is not an analytic {tier} estimator"))),
    }
}

fn rows_at(spec: &SweepSpec, value: f64) -> Vec<Row> {
    let blank = |tier, estimator, status, seconds| Row {
        value,
        tier,
        device: None,
        estimator,
        conditional: None,
        cumulative: None,
        std_error: None,
        rate_bpcu: None,
        status,
        seconds,
    };
    let setup = spec.config_at(value).and_then(|cfg| Ok((cfg, spec.packet_at(value)?)));
    let (cfg, packet) = match setup {
        Ok(x) => x,
        Err(e) => {
            return spec
                .tiers
                .iter()
                .flat_map(|&t| spec.estimators.iter().map(move |&m| (t, m)))
                .map(|(t, m)| blank(t, m, Err(e.to_string()), None))
                .collect()
        }
    };
    let mut sim = None;
    let mut rows = Vec::new();
    for &tier in &spec.tiers {
        for &method in &spec.estimators {
            let start = Instant::now();
            let result = evaluate(spec, &cfg, tier, method, packet, &mut sim);
            let seconds = spec.timing.then(|| start.elapsed().as_secs_f64());
            match result {
                Err(nomacov::Error::Precondition(_)) if method != Method::MonteCarlo => {
                    // Keep the devices that do have a value; cumulative
                    // coverage stops at the first device without one.
                    let mut running = Some(1.0);
                    for i in 1..=cfg.devices() {
                        let row = match analytic_device(&cfg, tier, method, i, &spec.analytic) {
                            Ok(p) => {
                                running = running.map(|c| if method == Method::Oma { p } else { c * p });
                                Row { device: Some(i), conditional: Some(p), cumulative: running, ..blank(tier, method, Ok(()), seconds) }
                            }
                            Err(e) => {
                                running = None;
                                Row { device: Some(i), ..blank(tier, method, Err(e.to_string()), seconds) }
                            }
                        };
                        rows.push(row);
                    }
                }
                Err(e) => rows.push(blank(tier, method, Err(e.to_string()), seconds)),
                Ok(cell) => {
                    let r = &cell.report;
                    for k in 0..cfg.devices() {
                        rows.push(Row {
                            device: Some(k + 1),
                            conditional: Some(r.per_device()[k]),
                            cumulative: Some(r.cumulative()[k]),
                            std_error: r.per_device_std_error().map(|s| s[k]),
                            rate_bpcu: cell.rates.as_ref().map(|v| v[k]),
                            ..blank(tier, method, Ok(()), seconds)
                        });
                    }
                    if let Some(rates) = &cell.rates {
                        rows.push(Row { rate_bpcu: Some(rates.iter().sum()), ..blank(tier, method, Ok(()), seconds) });
                    }
                }
            }
        }
    }
    rows
}

/// Evaluates every grid cell, in parallel, and returns rows in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Vec<Row> {
    spec.grid.par_iter().map(|&v| rows_at(spec, v)).collect::<Vec<_>>().into_iter().flatten().collect()
}

fn header(spec: &SweepSpec) -> String {
    let mut s = String::from("nomacov sweep\nconfig:\n");
    for line in describe(&spec.scenario).lines() {
        s.push_str("  ");
        s.push_str(line);
        s.push('\n');
    }
    let names = |v: Vec<String>| v.join(", ");
    s.push_str("sweep:\n");
    s.push_str(&format!("  variable: {}\n", spec.variable.map_or("none", Variable::name)));
    if spec.variable.is_some() {
        s.push_str(&format!("  grid: [{}]\n", names(spec.grid.iter().map(|v| v.to_string()).collect())));
    }
    s.push_str(&format!("  estimators: [{}]\n", names(spec.estimators.iter().map(|m| m.to_string()).collect())));
    s.push_str(&format!("  tiers: [{}]\n", names(spec.tiers.iter().map(|t| t.to_string()).collect())));
    s.push_str(&format!("  trials: {}\n  seed: {}\n", spec.trials, spec.seed));
    s.push_str(&format!("  gc_order: {}\n  series_terms: {}\n", spec.analytic.gc_order, spec.analytic.series_terms));
    let packet = spec.packet_length.map_or("none".to_string(), |p| p.to_string());
    s.push_str(&format!("  packet_length: {packet}\n"));
    s.push_str(&format!("  sinr_mode: {:?}\n  regime: {:?}\n", spec.throughput.sinr, spec.throughput.regime));
    if spec.variable == Some(Variable::Fading) {
        s.push_str(&format!("  m_devices: [{}]\n", names(spec.m_devices.iter().map(|i| i.to_string()).collect())));
    }
    s.lines().map(|l| format!("# {l}\n")).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// CSV text: commented header, column names, one line per row.
pub fn render(spec: &SweepSpec, rows: &[Row]) -> Result<Vec<u8>> {
    let mut out = header(spec).into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut columns =
        vec!["variable", "value", "tier", "device", "estimator", "conditional", "cumulative", "std_error", "rate_bpcu", "status"];
    if spec.timing {
        columns.push("wall_clock_s");
    }
    w.write_record(&columns)?;
    for r in rows {
        let mut rec = vec![
            spec.variable.map_or("none", Variable::name).to_string(),
            if spec.variable.is_some() { r.value.to_string() } else { String::new() },
            r.tier.to_string(),
            r.device.map_or("all".to_string(), |d| d.to_string()),
            r.estimator.to_string(),
            opt(r.conditional),
            opt(r.cumulative),
            opt(r.std_error),
            opt(r.rate_bpcu),
            match &r.status {
                Ok(()) => "ok".to_string(),
                Err(msg) => format!("error: {msg}"),
            },
        ];
        if spec.timing {
            rec.push(opt(r.seconds));
        }
        w.write_record(&rec)?;
    }
    out.extend(w.into_inner().map_err(|e| CliError::Output(e.into_error().into()))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> SweepSpec {
        SweepSpec::parse(text, Config::builder()).unwrap()
    }

    #[test]
    fn parses_and_validates() {
        let s = spec("variable = tau\ngrid = 0.1, 0.5, 1\nestimators = exact, gc\nM = 3\n");
        assert_eq!(s.variable, Some(Variable::Tau));
        assert_eq!(s.grid, vec![0.1, 0.5, 1.0]);
        assert_eq!(s.estimators, vec![Method::Exact, Method::GaussChebyshev]);
        assert_eq!(s.scenario.devices(), 3);
        let bad = |t: &str| SweepSpec::parse(t, Config::builder()).unwrap_err().to_string();
        assert!(bad("variable = tau\ngrid = 1, 0.5\n").contains("increasing"));
        assert!(bad("variable = tau\n").contains("grid"));
        assert!(bad("variable = speed\ngrid = 1\n").contains("line 1"));
        assert!(bad("estimators = mc\ntrials = 0\n").contains("trial"));
        assert!(bad("colour = red\n").contains("colour"));
    }

    #[test]
    fn variables_reach_the_config() {
        let s = spec("variable = M\ngrid = 2, 4\nm_list = 3, 1\nrates_bps_list = 187500, 125000\n");
        let c = s.config_at(4.0).unwrap();
        assert_eq!(c.nakagami(), &[3, 1, 1, 1]);
        assert_eq!(c.rates(), &[187500.0, 125000.0, 125000.0, 125000.0]);
        let s = spec("variable = m\ngrid = 1, 2\nm_devices = 2\n");
        assert_eq!(s.config_at(2.0).unwrap().nakagami(), &[1, 2]);
        let s = spec("variable = P_u\ngrid = -inf, 0\n");
        assert_eq!(s.config_at(f64::NEG_INFINITY).unwrap().p_u(), 0.0);
        let s = spec("variable = tau\ngrid = 1\n");
        assert!((s.config_at(1.0).unwrap().threshold(2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn failing_cells_do_not_stop_the_sweep() {
        let s = spec("variable = tau\ngrid = 0.5, 2\nestimators = low-rate\ntiers = terrestrial\n");
        let rows = run_sweep(&s);
        assert!(rows.iter().any(|r| r.value == 0.5 && r.status.is_ok()));
        assert!(rows.iter().any(|r| r.value == 2.0 && r.status.is_err()));
    }

    #[test]
    fn rendering_is_stable() {
        let s = spec("variable = tau\ngrid = 0.5, 1\nestimators = exact, mc\ntrials = 2000\n");
        let a = render(&s, &run_sweep(&s)).unwrap();
        let b = render(&s, &run_sweep(&s)).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("# nomacov sweep\n# config:\n#   M: 2\n"));
        assert!(text.contains("\nvariable,value,tier,device,estimator,conditional,cumulative,std_error,rate_bpcu,status\n"));
    }
}

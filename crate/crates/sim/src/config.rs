//! Run configuration: a flat `key = value` format grouped under
//! `[section]` headers.
//!
//! ```text
//! # comment
//! [scenario]
//! satellite_angles_deg = 0, -5.9, -2.8, 3, 5.7
//! noise_correlation = 1, 0.1, 0.05; 0.1, 1, 0.1; 0.05, 0.1, 1
//!
//! [detectors]
//! detectors = JML, LGSD(2/3/2), E-LGSD(2/3/2)
//! ```
//!
//! Every key is optional and defaults to the reference five-satellite
//! scenario. Unknown sections and keys are rejected. Parsing reports every
//! problem it finds, each with the line it came from when there is one.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use asi_core::detector::DEFAULT_SEARCH_BUDGET;
use asi_core::scenario::{
    wavelength_for, DEFAULT_CARRIER_HZ, DEFAULT_DISH_DIAMETER_M, DEFAULT_LNB_BORESIGHTS_DEG,
    DEFAULT_LNB_OFFSETS_WAVELENGTHS, DEFAULT_SATELLITE_ANGLES_DEG,
};
use asi_core::{CMatrix, ChannelMatrix, Constellation, LgsdConfig, Modulation, Scenario};

use crate::error::{ConfigIssue, SimError, SimResult};
use crate::harness::{DetectorSpec, ExperimentPlan, DEFAULT_MAX_BIT_ERRORS, DEFAULT_MAX_SYMBOLS, MIN_SYMBOLS_FLOOR};
use crate::io;

/// Most SNR points a sweep may contain.
pub const MAX_SNR_POINTS: usize = 1_000;

/// Detector entry as written in a config: `JML`, `LGSD(Q/Θ/Φ)` or
/// `E-LGSD(Q/Θ/Φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorChoice {
    Jml,
    Lgsd { iters: (usize, usize, usize) },
    EnhancedLgsd { iters: (usize, usize, usize) },
}

impl fmt::Display for DetectorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectorChoice::Jml => f.write_str("JML"),
            DetectorChoice::Lgsd { iters: (q, t, p) } => write!(f, "LGSD({q}/{t}/{p})"),
            DetectorChoice::EnhancedLgsd { iters: (q, t, p) } => write!(f, "E-LGSD({q}/{t}/{p})"),
        }
    }
}

impl FromStr for DetectorChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("jml") {
            return Ok(DetectorChoice::Jml);
        }
        let bad = || format!("unknown detector '{s}' (expected JML, LGSD(Q/T/P) or E-LGSD(Q/T/P))");
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let nums: Vec<usize> = inner
            .split('/')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let iters = match nums.as_slice() {
            [q, t, p] => (*q, *t, *p),
            _ => return Err(bad()),
        };
        if iters.0 == 0 || iters.1 == 0 || iters.2 == 0 {
            return Err(format!("detector '{s}': iteration counts must be at least 1"));
        }
        match s[..open].trim().to_ascii_uppercase().as_str() {
            "LGSD" => Ok(DetectorChoice::Lgsd { iters }),
            "E-LGSD" | "ELGSD" | "ENH-LGSD" => Ok(DetectorChoice::EnhancedLgsd { iters }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSection {
    pub satellite_angles_deg: Vec<f64>,
    pub lnb_boresights_deg: Vec<f64>,
    pub lnb_offsets_wavelengths: Vec<f64>,
    pub dish_diameter_m: f64,
    pub carrier_hz: f64,
    /// Real, symmetric, row-major.
    pub noise_correlation: Vec<Vec<f64>>,
    /// Replaces the synthesized channel, relative to the config file.
    pub channel_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSection {
    pub detectors: Vec<DetectorChoice>,
    /// `None` means `4N`.
    pub list_len: Option<usize>,
    /// `None` means `3, N − 3`.
    pub group_sizes: Option<Vec<usize>>,
    pub lgsd_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
    pub min_symbols: u64,
    pub max_bit_errors: u64,
    pub max_symbols: u64,
    pub reference_satellite: usize,
    /// 0 uses every available core.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    pub results_file: String,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    pub modulation: Modulation,
    pub detectors: DetectorSection,
    pub sweep: SweepSection,
    pub run: RunSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let k = asi_core::scenario::default_noise_correlation();
        Self {
            scenario: ScenarioSection {
                satellite_angles_deg: DEFAULT_SATELLITE_ANGLES_DEG.to_vec(),
                lnb_boresights_deg: DEFAULT_LNB_BORESIGHTS_DEG.to_vec(),
                lnb_offsets_wavelengths: DEFAULT_LNB_OFFSETS_WAVELENGTHS.to_vec(),
                dish_diameter_m: DEFAULT_DISH_DIAMETER_M,
                carrier_hz: DEFAULT_CARRIER_HZ,
                noise_correlation: (0..k.rows()).map(|r| k.row(r).iter().map(|z| z.re).collect()).collect(),
                channel_csv: None,
            },
            modulation: Modulation::Psk8,
            detectors: DetectorSection {
                detectors: vec![
                    DetectorChoice::Jml,
                    DetectorChoice::Lgsd { iters: (2, 3, 2) },
                    DetectorChoice::EnhancedLgsd { iters: (2, 3, 2) },
                ],
                list_len: None,
                group_sizes: None,
                lgsd_seed: 0,
            },
            sweep: SweepSection {
                snr_start_db: 0.0,
                snr_stop_db: 20.0,
                snr_step_db: 2.0,
                min_symbols: 10_000,
                max_bit_errors: DEFAULT_MAX_BIT_ERRORS,
                max_symbols: DEFAULT_MAX_SYMBOLS,
                reference_satellite: 0,
                workers: 0,
            },
            run: RunSection {
                seed: None,
                output_dir: PathBuf::from("results"),
                results_file: "ber.csv".to_string(),
            },
        }
    }
}

const KEYS: &[(&str, &[&str])] = &[
    (
        "scenario",
        &[
            "satellite_angles_deg",
            "lnb_boresights_deg",
            "lnb_offsets_wavelengths",
            "dish_diameter_m",
            "carrier_hz",
            "noise_correlation",
            "channel_csv",
        ],
    ),
    ("signal", &["constellation"]),
    ("detectors", &["detectors", "list_len", "group_sizes", "lgsd_seed"]),
    (
        "sweep",
        &[
            "snr_start_db",
            "snr_stop_db",
            "snr_step_db",
            "min_symbols",
            "max_bit_errors",
            "max_symbols",
            "reference_satellite",
            "workers",
        ],
    ),
    ("run", &["seed", "output_dir", "results_file"]),
];

// (section, key) -> (line, raw value)
type Entries = BTreeMap<(String, String), (usize, String)>;

fn tokenize(text: &str, issues: &mut Vec<ConfigIssue>) -> Entries {
    let mut entries = Entries::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                issues.push(ConfigIssue::at(line, "malformed section header"));
                section = None;
                continue;
            };
            let name = name.trim();
            if KEYS.iter().any(|(s, _)| *s == name) {
                section = Some(name.to_string());
            } else {
                issues.push(ConfigIssue::at(line, format!("unknown section [{name}]")));
                section = None;
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            issues.push(ConfigIssue::at(line, "expected 'key = value'"));
            continue;
        };
        let key = key.trim();
        let Some(sec) = &section else {
            issues.push(ConfigIssue::at(line, format!("key '{key}' outside a known section")));
            continue;
        };
        let known = KEYS
            .iter()
            .find(|(s, _)| s == sec)
            .is_some_and(|(_, ks)| ks.contains(&key));
        if !known {
            issues.push(ConfigIssue::at(line, format!("unknown key '{key}' in [{sec}]")));
            continue;
        }
        let slot = (sec.clone(), key.to_string());
        if let Some((first, _)) = entries.get(&slot) {
            issues.push(ConfigIssue::at(
                line,
                format!("duplicate key '{key}' (first set on line {first})"),
            ));
            continue;
        }
        entries.insert(slot, (line, value.trim().to_string()));
    }
    entries
}

struct Reader<'a> {
    entries: &'a Entries,
    issues: &'a mut Vec<ConfigIssue>,
}

impl Reader<'_> {
    fn line(&self, sec: &str, key: &str) -> Option<usize> {
        self.entries.get(&(sec.to_string(), key.to_string())).map(|(l, _)| *l)
    }

    /// Parses `[sec] key` with `f` into `slot`, leaving the default in place
    /// when the key is absent and recording an issue when it is malformed.
    fn get<T>(&mut self, sec: &str, key: &str, slot: &mut T, f: impl FnOnce(&str) -> Result<T, String>) {
        if let Some((line, raw)) = self.entries.get(&(sec.to_string(), key.to_string())) {
            match f(raw) {
                Ok(v) => *slot = v,
                Err(e) => self.issues.push(ConfigIssue::at(*line, format!("{key}: {e}"))),
            }
        }
    }

    fn issue(&mut self, sec: &str, key: &str, message: impl Into<String>) {
        let message = message.into();
        self.issues.push(match self.line(sec, key) {
            Some(l) => ConfigIssue::at(l, message),
            None => ConfigIssue::global(message),
        });
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{}' is not finite", s.trim()))
    }
}

fn parse_int<T: FromStr>(s: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("'{}' is not a non-negative integer", s.trim()))
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Err("empty list".into());
    }
    s.split(',').map(f).collect()
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';').map(|row| parse_list(row, parse_f64)).collect()
}

fn parse_optional<T>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, String> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        f(s).map(Some)
    }
}

/// Parses and validates `text`, returning every problem found.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<ConfigIssue>> {
    let mut issues = Vec::new();
    let entries = tokenize(text, &mut issues);
    let mut cfg = RunConfig::default();
    let mut r = Reader {
        entries: &entries,
        issues: &mut issues,
    };

    let s = &mut cfg.scenario;
    r.get("scenario", "satellite_angles_deg", &mut s.satellite_angles_deg, |v| {
        parse_list(v, parse_f64)
    });
    r.get("scenario", "lnb_boresights_deg", &mut s.lnb_boresights_deg, |v| {
        parse_list(v, parse_f64)
    });
    r.get(
        "scenario",
        "lnb_offsets_wavelengths",
        &mut s.lnb_offsets_wavelengths,
        |v| parse_list(v, parse_f64),
    );
    r.get("scenario", "dish_diameter_m", &mut s.dish_diameter_m, parse_f64);
    r.get("scenario", "carrier_hz", &mut s.carrier_hz, parse_f64);
    r.get("scenario", "noise_correlation", &mut s.noise_correlation, parse_matrix);
    r.get("scenario", "channel_csv", &mut s.channel_csv, |v| {
        if v.is_empty() {
            Err("empty path".into())
        } else {
            Ok(Some(PathBuf::from(v)))
        }
    });
    r.get("signal", "constellation", &mut cfg.modulation, |v| {
        v.parse::<Modulation>()
            .map_err(|_| format!("unknown constellation '{v}' (qpsk, 8psk, 16apsk)"))
    });
    let d = &mut cfg.detectors;
    r.get("detectors", "detectors", &mut d.detectors, |v| {
        parse_list(v, |x| x.parse())
    });
    r.get("detectors", "list_len", &mut d.list_len, |v| {
        parse_optional(v, parse_int)
    });
    r.get("detectors", "group_sizes", &mut d.group_sizes, |v| {
        parse_optional(v, |x| parse_list(x, parse_int))
    });
    r.get("detectors", "lgsd_seed", &mut d.lgsd_seed, parse_int);
    let w = &mut cfg.sweep;
    r.get("sweep", "snr_start_db", &mut w.snr_start_db, parse_f64);
    r.get("sweep", "snr_stop_db", &mut w.snr_stop_db, parse_f64);
    r.get("sweep", "snr_step_db", &mut w.snr_step_db, parse_f64);
    r.get("sweep", "min_symbols", &mut w.min_symbols, parse_int);
    r.get("sweep", "max_bit_errors", &mut w.max_bit_errors, parse_int);
    r.get("sweep", "max_symbols", &mut w.max_symbols, parse_int);
    r.get("sweep", "reference_satellite", &mut w.reference_satellite, parse_int);
    r.get("sweep", "workers", &mut w.workers, parse_int);
    r.get("run", "seed", &mut cfg.run.seed, |v| parse_optional(v, parse_int));
    r.get("run", "output_dir", &mut cfg.run.output_dir, |v| {
        if v.is_empty() {
            Err("empty path".into())
        } else {
            Ok(PathBuf::from(v))
        }
    });
    r.get("run", "results_file", &mut cfg.run.results_file, |v| {
        if v.is_empty() || v.contains(['/', '\\']) {
            Err("must be a plain file name".into())
        } else {
            Ok(v.to_string())
        }
    });

    // Keys that failed to parse keep their defaults, so the semantic
    // checks still see a complete config.
    validate(&cfg, &mut r);
    issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(issues)
    }
}

// The key a scenario construction error points at.
fn scenario_key(e: &asi_core::Error) -> &'static str {
    use asi_core::Error;
    match e {
        Error::Scenario(msg) if msg.contains("diameter") => "dish_diameter_m",
        Error::Scenario(msg) if msg.contains("wavelength") => "carrier_hz",
        Error::Scenario(msg) if msg.contains("offset") => "lnb_offsets_wavelengths",
        Error::Scenario(msg) if msg.contains("noise correlation") => "noise_correlation",
        Error::Scenario(msg) if msg.contains("LNB") => "lnb_boresights_deg",
        Error::Scenario(_) => "satellite_angles_deg",
        _ => "noise_correlation",
    }
}

fn validate(cfg: &RunConfig, r: &mut Reader<'_>) {
    let s = &cfg.scenario;
    let m = s.lnb_boresights_deg.len();
    if s.noise_correlation.len() != m || s.noise_correlation.iter().any(|row| row.len() != m) {
        r.issue(
            "scenario",
            "noise_correlation",
            format!("noise_correlation must be {m}x{m}, one row per LNB"),
        );
    } else if s.channel_csv.is_none() {
        if let Err(e) = cfg.build_scenario() {
            r.issue("scenario", scenario_key(&e), e.to_string());
        }
    } else if let Err(e) = cfg.noise_correlation().and_then(|k| {
        // Any overloaded shape will do to check K on its own.
        Scenario::new(vec![0.0; m + 1], vec![0.0; m], vec![0.0; m], 1.0, 1.0, k)
    }) {
        r.issue(
            "scenario",
            "noise_correlation",
            format!("invalid noise correlation: {e}"),
        );
    }
    if !(s.carrier_hz > 0.0) {
        r.issue("scenario", "carrier_hz", "carrier_hz must be positive");
    }

    let d = &cfg.detectors;
    if d.detectors.is_empty() {
        r.issue("detectors", "detectors", "at least one detector is required");
    }
    for (i, a) in d.detectors.iter().enumerate() {
        if d.detectors[..i].contains(a) {
            r.issue("detectors", "detectors", format!("detector {a} listed twice"));
        }
    }
    if d.list_len == Some(0) {
        r.issue("detectors", "list_len", "list_len must be at least 1");
    }
    // N is only known here when the channel is synthesized.
    if s.channel_csv.is_none() {
        let n = s.satellite_angles_deg.len();
        if let Err(e) = cfg.lgsd_config(n).validate(n) {
            r.issue("detectors", "group_sizes", e.to_string());
        }
        if d.detectors.contains(&DetectorChoice::Jml) {
            let size = (Constellation::new(cfg.modulation).size() as u128).pow(n as u32);
            if size > u128::from(DEFAULT_SEARCH_BUDGET) {
                r.issue(
                    "detectors",
                    "detectors",
                    format!("JML would visit {size} vectors, above the budget of {DEFAULT_SEARCH_BUDGET}"),
                );
            }
        }
        if cfg.sweep.reference_satellite >= n {
            r.issue(
                "sweep",
                "reference_satellite",
                format!("reference_satellite must be below N = {n}"),
            );
        }
    }

    let w = &cfg.sweep;
    if !(w.snr_step_db > 0.0) {
        r.issue("sweep", "snr_step_db", "snr_step_db must be positive");
    } else if w.snr_stop_db < w.snr_start_db {
        r.issue("sweep", "snr_stop_db", "snr_stop_db must not be below snr_start_db");
    } else if cfg.snr_points().len() > MAX_SNR_POINTS {
        r.issue(
            "sweep",
            "snr_step_db",
            format!("sweep has more than {MAX_SNR_POINTS} points"),
        );
    }
    if w.min_symbols < MIN_SYMBOLS_FLOOR {
        r.issue(
            "sweep",
            "min_symbols",
            format!("min_symbols must be at least {MIN_SYMBOLS_FLOOR}"),
        );
    }
    if w.max_symbols < w.min_symbols {
        r.issue("sweep", "max_symbols", "max_symbols must not be below min_symbols");
    }
}

impl RunConfig {
    /// `start, start + step, …` up to and including `stop`.
    pub fn snr_points(&self) -> Vec<f64> {
        let w = &self.sweep;
        let span = (w.snr_stop_db - w.snr_start_db) / w.snr_step_db;
        let count = (span + 1e-9).floor() as usize + 1;
        (0..count).map(|i| w.snr_start_db + i as f64 * w.snr_step_db).collect()
    }

    pub fn noise_correlation(&self) -> asi_core::Result<CMatrix> {
        let k = &self.scenario.noise_correlation;
        let m = k.len();
        CMatrix::from_real(m, m, &k.concat())
    }

    pub fn build_scenario(&self) -> asi_core::Result<Scenario> {
        let s = &self.scenario;
        Scenario::new(
            s.satellite_angles_deg.clone(),
            s.lnb_boresights_deg.clone(),
            s.lnb_offsets_wavelengths.clone(),
            s.dish_diameter_m,
            wavelength_for(s.carrier_hz),
            self.noise_correlation()?,
        )
    }

    /// LGSD parameters for `n` satellites with iteration counts left at 1.
    pub fn lgsd_config(&self, n: usize) -> LgsdConfig {
        let mut c = LgsdConfig::standard(n, 1, 1, 1);
        if let Some(l) = self.detectors.list_len {
            c.list_len = l;
        }
        if let Some(g) = &self.detectors.group_sizes {
            c.group_sizes = g.clone();
        }
        c.rng_seed = self.detectors.lgsd_seed;
        c
    }

    /// The channel matrix: synthesized from the geometry, or read from
    /// `channel_csv` (resolved against `base_dir`).
    pub fn channel(&self, base_dir: &Path) -> SimResult<ChannelMatrix> {
        match &self.scenario.channel_csv {
            None => Ok(self.build_scenario()?.build_channel()),
            Some(p) => {
                let path = base_dir.join(p);
                let a = io::read_complex_csv(&path)?;
                let m = self.scenario.noise_correlation.len();
                if a.rows() != m {
                    return Err(SimError::Format {
                        path,
                        message: format!("channel has {} rows but the noise correlation is {m}x{m}", a.rows()),
                    });
                }
                if a.cols() <= a.rows() {
                    return Err(SimError::Format {
                        path,
                        message: "channel must have more columns (satellites) than rows (LNBs)".into(),
                    });
                }
                ChannelMatrix::new(a).map_err(|e| SimError::Format {
                    path,
                    message: e.to_string(),
                })
            }
        }
    }

    pub fn detector_specs(&self, n: usize) -> Vec<DetectorSpec> {
        let base = self.lgsd_config(n);
        let with = |(q, t, p): (usize, usize, usize)| LgsdConfig {
            overall_iters: q,
            ble_iters: t,
            glo_iters: p,
            ..base.clone()
        };
        self.detectors
            .detectors
            .iter()
            .map(|d| match *d {
                DetectorChoice::Jml => DetectorSpec::Jml,
                DetectorChoice::Lgsd { iters } => DetectorSpec::lgsd(with(iters)),
                DetectorChoice::EnhancedLgsd { iters } => DetectorSpec::enhanced_lgsd(with(iters)),
            })
            .collect()
    }

    /// Builds the experiment. `seed` overrides `[run] seed`; having neither
    /// is an error.
    pub fn plan(&self, base_dir: &Path, seed: Option<u64>) -> SimResult<ExperimentPlan> {
        let master_seed = seed
            .or(self.run.seed)
            .ok_or_else(|| SimError::Config(vec![ConfigIssue::global("no seed: set [run] seed or pass --seed")]))?;
        let channel = self.channel(base_dir)?;
        let n = channel.num_satellites();
        let mut plan = ExperimentPlan::new(
            channel,
            self.noise_correlation()?,
            self.modulation,
            self.detector_specs(n),
            self.snr_points(),
            master_seed,
        );
        plan.min_symbols = self.sweep.min_symbols;
        plan.max_bit_errors = self.sweep.max_bit_errors;
        plan.max_symbols = self.sweep.max_symbols;
        plan.reference_satellite = self.sweep.reference_satellite;
        plan.workers = self.sweep.workers;
        plan.validate()?;
        Ok(plan)
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn or_auto<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
}

/// Writes the configuration back in the format [`parse_config`] reads,
/// listing every key.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.scenario;
        writeln!(f, "[scenario]")?;
        writeln!(f, "satellite_angles_deg = {}", join(&s.satellite_angles_deg))?;
        writeln!(f, "lnb_boresights_deg = {}", join(&s.lnb_boresights_deg))?;
        writeln!(f, "lnb_offsets_wavelengths = {}", join(&s.lnb_offsets_wavelengths))?;
        writeln!(f, "dish_diameter_m = {}", s.dish_diameter_m)?;
        writeln!(f, "carrier_hz = {}", s.carrier_hz)?;
        let rows: Vec<String> = s.noise_correlation.iter().map(|r| join(r)).collect();
        writeln!(f, "noise_correlation = {}", rows.join("; "))?;
        if let Some(p) = &s.channel_csv {
            writeln!(f, "channel_csv = {}", p.display())?;
        }
        writeln!(f, "\n[signal]")?;
        writeln!(f, "constellation = {}", self.modulation)?;
        let d = &self.detectors;
        writeln!(f, "\n[detectors]")?;
        writeln!(f, "detectors = {}", join(&d.detectors))?;
        writeln!(f, "list_len = {}", or_auto(&d.list_len))?;
        writeln!(
            f,
            "group_sizes = {}",
            d.group_sizes.as_deref().map_or_else(|| "auto".to_string(), join)
        )?;
        writeln!(f, "lgsd_seed = {}", d.lgsd_seed)?;
        let w = &self.sweep;
        writeln!(f, "\n[sweep]")?;
        writeln!(f, "snr_start_db = {}", w.snr_start_db)?;
        writeln!(f, "snr_stop_db = {}", w.snr_stop_db)?;
        writeln!(f, "snr_step_db = {}", w.snr_step_db)?;
        writeln!(f, "min_symbols = {}", w.min_symbols)?;
        writeln!(f, "max_bit_errors = {}", w.max_bit_errors)?;
        writeln!(f, "max_symbols = {}", w.max_symbols)?;
        writeln!(f, "reference_satellite = {}", w.reference_satellite)?;
        writeln!(f, "workers = {}", w.workers)?;
        writeln!(f, "\n[run]")?;
        writeln!(f, "seed = {}", or_auto(&self.run.seed))?;
        writeln!(f, "output_dir = {}", self.run.output_dir.display())?;
        writeln!(f, "results_file = {}", self.run.results_file)
    }
}

//! Monte-Carlo bit-error-rate engine.
//!
//! Every detector in a plan sees the same transmitted symbols and the same
//! noise at a given `(snr, trial)` index. Trials run in fixed-size blocks on
//! a worker pool; error counts are merged by integer addition and the
//! stopping rule is evaluated between blocks, so results do not depend on
//! the number of workers.

use std::collections::HashSet;

use asi_core::detector::{jml_squarings, SearchContext, DEFAULT_SEARCH_BUDGET};
use asi_core::{
    CMatrix, ChannelMatrix, Complex64, Constellation, LgsdConfig, Modulation, NoiseModel, Preprocessor,
    PreprocessorKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{SimError, SimResult};
use crate::stats::{wilson95, Interval};

/// Hard cap on symbols per SNR point.
pub const DEFAULT_MAX_SYMBOLS: u64 = 10_000_000;
/// Smallest accepted `min_symbols`.
pub const MIN_SYMBOLS_FLOOR: u64 = 1_000;
pub const DEFAULT_MAX_BIT_ERRORS: u64 = 100;
/// Trials per block between two evaluations of the stopping rule.
pub const BLOCK_TRIALS: u64 = 1_024;

/// A detector together with its preprocessor.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorSpec {
    /// Exhaustive search on the Wiener-Hopf whitened observation.
    Jml,
    Lgsd {
        preprocessor: PreprocessorKind,
        config: LgsdConfig,
    },
}

impl DetectorSpec {
    /// LGSD behind the MRC preprocessor.
    pub fn lgsd(config: LgsdConfig) -> Self {
        DetectorSpec::Lgsd {
            preprocessor: PreprocessorKind::Mrc,
            config,
        }
    }

    /// LGSD behind the Wiener-Hopf preprocessor.
    pub fn enhanced_lgsd(config: LgsdConfig) -> Self {
        DetectorSpec::Lgsd {
            preprocessor: PreprocessorKind::WienerHopf,
            config,
        }
    }

    pub fn preprocessor(&self) -> PreprocessorKind {
        match self {
            DetectorSpec::Jml => PreprocessorKind::WienerHopf,
            DetectorSpec::Lgsd { preprocessor, .. } => *preprocessor,
        }
    }

    /// `JML`, `LGSD(Q/Θ/Φ)` or `E-LGSD(Q/Θ/Φ)`.
    pub fn label(&self) -> String {
        match self {
            DetectorSpec::Jml => "JML".to_string(),
            DetectorSpec::Lgsd { preprocessor, config } => {
                let (q, t, p) = config.iterations();
                let name = match preprocessor {
                    PreprocessorKind::Mrc => "LGSD",
                    PreprocessorKind::WienerHopf => "E-LGSD",
                };
                format!("{name}({q}/{t}/{p})")
            }
        }
    }
}

/// Everything needed to run a BER sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub channel: ChannelMatrix,
    /// Spatial noise correlation `K` (M x M, unit diagonal).
    pub noise_correlation: CMatrix,
    pub modulation: Modulation,
    pub detectors: Vec<DetectorSpec>,
    pub snr_points: Vec<f64>,
    pub min_symbols: u64,
    /// Early-stop target on the reference satellite, for every detector.
    pub max_bit_errors: u64,
    pub max_symbols: u64,
    /// Satellite whose errors drive the stopping rule.
    pub reference_satellite: usize,
    pub master_seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
    pub search_budget: u64,
}

impl ExperimentPlan {
    /// Plan with default stopping rule and worker count.
    pub fn new(
        channel: ChannelMatrix,
        noise_correlation: CMatrix,
        modulation: Modulation,
        detectors: Vec<DetectorSpec>,
        snr_points: Vec<f64>,
        master_seed: u64,
    ) -> Self {
        Self {
            channel,
            noise_correlation,
            modulation,
            detectors,
            snr_points,
            min_symbols: 10_000,
            max_bit_errors: DEFAULT_MAX_BIT_ERRORS,
            max_symbols: DEFAULT_MAX_SYMBOLS,
            reference_satellite: 0,
            master_seed,
            workers: 0,
            search_budget: DEFAULT_SEARCH_BUDGET,
        }
    }

    pub fn validate(&self) -> SimResult<()> {
        let fail = |m: String| Err(SimError::Plan(m));
        let n = self.channel.num_satellites();
        let m = self.channel.num_lnbs();
        if self.snr_points.is_empty() {
            return fail("no SNR points".into());
        }
        if self.snr_points.iter().any(|s| !s.is_finite()) {
            return fail("SNR points must be finite".into());
        }
        if self.detectors.is_empty() {
            return fail("no detectors".into());
        }
        if self.min_symbols < MIN_SYMBOLS_FLOOR {
            return fail(format!("min_symbols must be at least {MIN_SYMBOLS_FLOOR}"));
        }
        if self.max_symbols < self.min_symbols {
            return fail("max_symbols must not be below min_symbols".into());
        }
        if self.reference_satellite >= n {
            return fail(format!(
                "reference satellite {} out of range 0..{n}",
                self.reference_satellite
            ));
        }
        if self.noise_correlation.shape() != (m, m) {
            return fail(format!("noise correlation must be {m}x{m}"));
        }
        let mut seen = HashSet::new();
        for d in &self.detectors {
            if !seen.insert(d.label()) {
                return fail(format!("duplicate detector {}", d.label()));
            }
            match d {
                DetectorSpec::Jml => {
                    let size = (self.modulation_size() as u128).pow(n as u32);
                    if size > u128::from(self.search_budget) {
                        return Err(asi_core::Error::SearchTooLarge {
                            size,
                            budget: self.search_budget,
                        }
                        .into());
                    }
                }
                DetectorSpec::Lgsd { config, .. } => config.validate(n)?,
            }
        }
        Ok(())
    }

    fn modulation_size(&self) -> usize {
        Constellation::new(self.modulation).size()
    }
}

/// Bit-error statistics of one detector on one satellite at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub detector: String,
    pub snr_db: f64,
    pub satellite: usize,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub ci95: Interval,
    /// Real squarings per detected vector.
    pub mean_squarings: f64,
}

/// One transmitted vector and what the LNBs received.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub symbols: Vec<u8>,
    pub received: Vec<Complex64>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

/// Seed of the symbol and noise stream at SNR index `snr_index`.
pub fn point_seed(master_seed: u64, snr_index: usize) -> u64 {
    mix(master_seed, snr_index as u64)
}

/// Draws trial `trial` of the stream `point_seed`: uniform symbols, then
/// `r = A·s + n`.
pub fn draw_trial(
    channel: &ChannelMatrix,
    constellation: &Constellation,
    noise: &NoiseModel,
    point_seed: u64,
    trial: u64,
) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    rng.set_stream(trial);
    let q = constellation.size();
    let symbols: Vec<u8> = (0..channel.num_satellites())
        .map(|_| rng.random_range(0..q) as u8)
        .collect();
    let x: Vec<Complex64> = symbols.iter().map(|&i| constellation.point(i)).collect();
    let n = noise.draw(&mut rng);
    let received = channel.transmit(&x).iter().zip(&n).map(|(a, b)| a + b).collect();
    Trial { symbols, received }
}

struct Tally {
    // errors[d * N + k]
    errors: Vec<u64>,
    squarings: Vec<u64>,
}

impl Tally {
    fn zero(detectors: usize, satellites: usize) -> Self {
        Self {
            errors: vec![0; detectors * satellites],
            squarings: vec![0; detectors],
        }
    }

    fn add(&mut self, other: &Tally) {
        for (a, b) in self.errors.iter_mut().zip(&other.errors) {
            *a += b;
        }
        for (a, b) in self.squarings.iter_mut().zip(&other.squarings) {
            *a += b;
        }
    }
}

struct Point<'a> {
    plan: &'a ExperimentPlan,
    constellation: &'a Constellation,
    noise: &'a NoiseModel,
    seed: u64,
    preprocessors: &'a [Preprocessor],
    contexts: Vec<SearchContext<'a>>,
}

impl<'a> Point<'a> {
    fn new(
        plan: &'a ExperimentPlan,
        constellation: &'a Constellation,
        noise: &'a NoiseModel,
        seed: u64,
        preprocessors: &'a [Preprocessor],
    ) -> SimResult<Self> {
        let contexts = preprocessors
            .iter()
            .map(|p| SearchContext::new(p.h(), constellation))
            .collect::<asi_core::Result<Vec<_>>>()?;
        Ok(Self {
            plan,
            constellation,
            noise,
            seed,
            preprocessors,
            contexts,
        })
    }

    fn run_trial(&self, trial: u64) -> SimResult<Tally> {
        let plan = self.plan;
        let n = plan.channel.num_satellites();
        let t = draw_trial(&plan.channel, self.constellation, self.noise, self.seed, trial);
        let powers = plan.channel.per_satellite_power();
        let mut tally = Tally::zero(plan.detectors.len(), n);
        for (d, spec) in plan.detectors.iter().enumerate() {
            let ctx = &self.contexts[d];
            let y = self.preprocessors[d].apply(&t.received);
            let result = match spec {
                DetectorSpec::Jml => ctx.jml(&y, plan.search_budget)?,
                DetectorSpec::Lgsd { config, .. } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(mix(config.rng_seed, self.seed));
                    rng.set_stream(trial);
                    ctx.lgsd(&y, powers, config, &mut rng)?
                }
            };
            for (k, (&sent, &got)) in t.symbols.iter().zip(&result.s_hat).enumerate() {
                tally.errors[d * n + k] += u64::from(self.constellation.bit_errors(sent, got));
            }
            tally.squarings[d] = result.squarings;
        }
        Ok(tally)
    }

    fn run_block(&self, start: u64, len: u64) -> SimResult<Tally> {
        let parts: Vec<Tally> = (start..start + len)
            .into_par_iter()
            .map(|t| self.run_trial(t))
            .collect::<SimResult<_>>()?;
        let mut total = Tally::zero(self.plan.detectors.len(), self.plan.channel.num_satellites());
        for p in &parts {
            total.add(p);
        }
        Ok(total)
    }
}

/// Runs SNR point `snr_index` of `plan` on the current worker pool.
///
/// Trials are added in blocks of [`BLOCK_TRIALS`] until every detector has
/// at least `max_bit_errors` errors on the reference satellite and
/// `min_symbols` vectors were sent, or `max_symbols` is reached. Records
/// come out in detector order, then satellite order.
pub fn run_point(plan: &ExperimentPlan, snr_index: usize) -> SimResult<Vec<BerRecord>> {
    plan.validate()?;
    let snr_db = *plan
        .snr_points
        .get(snr_index)
        .ok_or_else(|| SimError::Plan(format!("SNR index {snr_index} out of range")))?;
    let constellation = Constellation::new(plan.modulation);
    let sigma2 = plan.channel.sigma2_for_snr(snr_db);
    let noise = NoiseModel::new(sigma2, &plan.noise_correlation)?;
    let preprocessors = plan
        .detectors
        .iter()
        .map(|d| Preprocessor::build(d.preprocessor(), &plan.channel, sigma2, &plan.noise_correlation))
        .collect::<asi_core::Result<Vec<_>>>()?;
    let seed = point_seed(plan.master_seed, snr_index);
    let point = Point::new(plan, &constellation, &noise, seed, &preprocessors)?;

    let n = plan.channel.num_satellites();
    let nd = plan.detectors.len();
    let r = plan.reference_satellite;
    let mut total = Tally::zero(nd, n);
    let mut sent = 0u64;
    loop {
        let len = BLOCK_TRIALS.min(plan.max_symbols - sent);
        total.add(&point.run_block(sent, len)?);
        sent += len;
        let enough_errors = (0..nd).all(|d| total.errors[d * n + r] >= plan.max_bit_errors);
        if sent >= plan.max_symbols || (sent >= plan.min_symbols && enough_errors) {
            break;
        }
    }

    let bits = sent * constellation.bits_per_symbol() as u64;
    let mut records = Vec::with_capacity(nd * n);
    for (d, spec) in plan.detectors.iter().enumerate() {
        let mean_squarings = total.squarings[d] as f64 / sent as f64;
        for k in 0..n {
            let errors = total.errors[d * n + k];
            records.push(BerRecord {
                detector: spec.label(),
                snr_db,
                satellite: k,
                bits,
                errors,
                ber: errors as f64 / bits as f64,
                ci95: wilson95(errors, bits),
                mean_squarings,
            });
        }
    }
    Ok(records)
}

/// Runs every SNR point on a pool of `plan.workers` threads. Rows are
/// ordered by detector (plan order), SNR (plan order), then satellite.
pub fn run_sweep(plan: &ExperimentPlan) -> SimResult<Vec<BerRecord>> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    let per_point = pool.install(|| {
        (0..plan.snr_points.len())
            .map(|i| run_point(plan, i))
            .collect::<SimResult<Vec<_>>>()
    })?;
    let n = plan.channel.num_satellites();
    let mut rows = Vec::with_capacity(per_point.len() * plan.detectors.len() * n);
    for d in 0..plan.detectors.len() {
        for point in &per_point {
            rows.extend_from_slice(&point[d * n..(d + 1) * n]);
        }
    }
    Ok(rows)
}

/// Closed-form JML squaring count for the plan's size.
pub fn jml_reference_squarings(plan: &ExperimentPlan) -> u64 {
    jml_squarings(plan.channel.num_satellites(), plan.modulation_size())
}

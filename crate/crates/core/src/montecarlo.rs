//! Reproducible Monte Carlo estimation of BER, outage probability, and
//! ergodic rate over an SNR grid, for the SMA downlink and the NOMA baseline.
//!
//! Reproducibility contract: every trial draws from a dedicated ChaCha
//! substream indexed by `(master seed, metric, SNR point, trial)`, blocks of
//! trials are reduced in a fixed order, and error counting is exact integer
//! arithmetic (rates use compensated summation). Results are therefore
//! bit-identical for any number of Rayon workers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{noma_rates, sma_rates, TargetRates};
use crate::channel::{fill_cn, ChannelMatrix, NoiseSpec, SnrPoint};
use crate::detectors::{detect_noma_far, detect_noma_near_sic, detect_ue1, detect_ue2};
use crate::modem::{encode_noma, ConstellationSpec, PowerSplit};

/// Trials per work block; one block is the smallest parallel unit.
const BLOCK_TRIALS: u64 = 4096;
/// Blocks per early-stop round. The stop rule is evaluated only at round
/// boundaries so that the stopping point does not depend on worker count.
const BLOCKS_PER_ROUND: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Modem(#[from] crate::modem::ModemError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
    #[error(transparent)]
    Analytic(#[from] crate::analytic::AnalyticError),
    #[error("successes {successes} exceed trials {trials}")]
    CountsExceedTrials { successes: u64, trials: u64 },
    #[error("trials must be positive")]
    NoTrials,
}

/// Multiplexing scheme under simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Sma,
    Noma,
}

/// One simulation scenario: system dimensions, fading variances, SNR grid,
/// and the reproducibility knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scheme: Scheme,
    pub nt: usize,
    pub nr: usize,
    pub m: usize,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    /// NOMA power allocation; required for [`Scheme::Noma`].
    pub power_split: Option<PowerSplit>,
    /// Targeted user rates; required for outage runs.
    pub target_rates: Option<TargetRates>,
    pub snr_grid_db: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
    /// Stop a point once every tracked user has at least this many error
    /// events; checked at fixed round boundaries only.
    pub early_stop_errors: Option<u64>,
    /// Enforce the matched-dimension comparison mode `Nr = Nt`, `M = Nt`.
    pub fair_comparison: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::InvalidScenario(msg));
        if self.nt < 1 || !self.nt.is_power_of_two() {
            return fail(format!("nt = {} must be a power of two >= 1", self.nt));
        }
        if self.nr < 1 {
            return fail("nr must be >= 1".into());
        }
        if ConstellationSpec::for_order(self.m).is_err() {
            return fail(format!("unsupported constellation order m = {}", self.m));
        }
        if !(self.sigma1_sq.is_finite() && self.sigma1_sq > 0.0) {
            return fail(format!("sigma1_sq = {} must be positive", self.sigma1_sq));
        }
        if !(self.sigma2_sq.is_finite() && self.sigma2_sq > 0.0) {
            return fail(format!("sigma2_sq = {} must be positive", self.sigma2_sq));
        }
        if self.scheme == Scheme::Noma && self.power_split.is_none() {
            return fail("NOMA scenarios require a power split (a1, a2)".into());
        }
        if self.fair_comparison && (self.nr != self.nt || self.m != self.nt) {
            return fail(format!(
                "fair comparison mode requires nr = nt and m = nt, got nt = {}, nr = {}, m = {}",
                self.nt, self.nr, self.m
            ));
        }
        if self.snr_grid_db.is_empty() {
            return fail("SNR grid is empty".into());
        }
        if self.snr_grid_db.iter().any(|v| !v.is_finite()) {
            return fail("SNR grid entries must be finite".into());
        }
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        Ok(())
    }

    fn split(&self) -> PowerSplit {
        self.power_split.expect("validated NOMA scenario carries a split")
    }
}

/// Performance metric carried by a [`CurveSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    BerUe1,
    BerUe2,
    OutageUe1,
    OutageUe2,
    SumRate,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::BerUe1 => "ber_ue1",
            Metric::BerUe2 => "ber_ue2",
            Metric::OutageUe1 => "outage_ue1",
            Metric::OutageUe2 => "outage_ue2",
            Metric::SumRate => "sum_rate",
        }
    }
}

/// One estimated point of a performance curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub estimate: f64,
    pub standard_error: f64,
    pub trials_used: u64,
}

/// A performance metric sampled over the SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    pub metric: Metric,
    pub points: Vec<CurvePoint>,
}

/// BER curves of the two users from one simulation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    pub ue1: CurveSeries,
    pub ue2: CurveSeries,
}

/// Outage curves of the two users from one simulation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub ue1: CurveSeries,
    pub ue2: CurveSeries,
}

/// Binomial standard error of a proportion estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdError {
    pub value: f64,
    /// Set when every trial succeeded or failed, where the plug-in estimate
    /// collapses to zero and says nothing about the true uncertainty.
    pub degenerate: bool,
}

/// `sqrt(p(1-p)/trials)` with `p = successes/trials`.
pub fn standard_error(successes: u64, trials: u64) -> Result<StdError, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    if successes > trials {
        return Err(SimError::CountsExceedTrials { successes, trials });
    }
    let p = successes as f64 / trials as f64;
    let degenerate = successes == 0 || successes == trials;
    Ok(StdError { value: (p * (1.0 - p) / trials as f64).sqrt(), degenerate })
}

// ---------------------------------------------------------------------------
// Substreams
// ---------------------------------------------------------------------------

const TAG_BER: u64 = 0x01;
const TAG_OUTAGE: u64 = 0x02;
const TAG_RATE: u64 = 0x03;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the per-(metric, SNR point) ChaCha key; trials then map onto the
/// cipher's independent 64-bit stream counter.
#[derive(Debug, Clone, Copy)]
struct StreamFactory {
    key: [u8; 32],
}

impl StreamFactory {
    fn new(master_seed: u64, metric_tag: u64, point_index: u64) -> Self {
        let s1 = splitmix64(master_seed ^ metric_tag);
        let s2 = splitmix64(s1 ^ point_index);
        let mut key = [0u8; 32];
        let mut word = s2;
        for chunk in key.chunks_exact_mut(8) {
            word = splitmix64(word);
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        Self { key }
    }

    fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(trial);
        rng
    }
}

// ---------------------------------------------------------------------------
// Deterministic block driver
// ---------------------------------------------------------------------------

trait PointAccum: Send {
    fn merge(&mut self, other: Self);
    /// Smallest tracked event count; drives the early-stop rule.
    fn min_events(&self) -> u64;
}

/// Runs `trials` in blocks, reducing block results in index order so the
/// outcome is independent of scheduling. Returns the accumulator and the
/// number of trials actually consumed.
fn drive_point<A, F>(trials: u64, early_stop: Option<u64>, zero: A, kernel: F) -> (A, u64)
where
    A: PointAccum,
    F: Fn(u64, u64) -> A + Sync,
{
    let total_blocks = trials.div_ceil(BLOCK_TRIALS) as usize;
    let mut acc = zero;
    let mut blocks_done = 0usize;
    while blocks_done < total_blocks {
        let round_end = (blocks_done + BLOCKS_PER_ROUND).min(total_blocks);
        let parts: Vec<A> = (blocks_done..round_end)
            .into_par_iter()
            .map(|b| {
                let start = b as u64 * BLOCK_TRIALS;
                let len = BLOCK_TRIALS.min(trials - start);
                kernel(start, len)
            })
            .collect();
        for part in parts {
            acc.merge(part);
        }
        blocks_done = round_end;
        if let Some(threshold) = early_stop {
            if acc.min_events() >= threshold {
                break;
            }
        }
    }
    let trials_used = (blocks_done as u64 * BLOCK_TRIALS).min(trials);
    (acc, trials_used)
}

/// Integer event counts for the two users.
#[derive(Debug, Clone)]
struct TwoUserCounts {
    events1: u64,
    events2: u64,
    /// Whether UE-2's count is statistically meaningful (it is not when the
    /// user carries zero bits, or when its outage is structural).
    track2: bool,
}

impl TwoUserCounts {
    fn zero(track2: bool) -> Self {
        Self { events1: 0, events2: 0, track2 }
    }
}

impl PointAccum for TwoUserCounts {
    fn merge(&mut self, other: Self) {
        self.events1 += other.events1;
        self.events2 += other.events2;
    }

    fn min_events(&self) -> u64 {
        if self.track2 {
            self.events1.min(self.events2)
        } else {
            self.events1
        }
    }
}

/// Compensated (Neumaier) accumulation of rate samples and their squares.
#[derive(Debug, Clone, Default)]
struct RateSum {
    sum: f64,
    comp: f64,
    sum_sq: f64,
    comp_sq: f64,
}

fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl RateSum {
    fn add(&mut self, rate: f64) {
        neumaier_add(&mut self.sum, &mut self.comp, rate);
        neumaier_add(&mut self.sum_sq, &mut self.comp_sq, rate * rate);
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }

    fn total_sq(&self) -> f64 {
        self.sum_sq + self.comp_sq
    }
}

impl PointAccum for RateSum {
    fn merge(&mut self, other: Self) {
        neumaier_add(&mut self.sum, &mut self.comp, other.sum);
        neumaier_add(&mut self.sum, &mut self.comp, other.comp);
        neumaier_add(&mut self.sum_sq, &mut self.comp_sq, other.sum_sq);
        neumaier_add(&mut self.sum_sq, &mut self.comp_sq, other.comp_sq);
    }

    fn min_events(&self) -> u64 {
        0
    }
}

// ---------------------------------------------------------------------------
// Per-trial kernels
// ---------------------------------------------------------------------------

fn sum_norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|e| e.norm_sqr()).sum()
}

/// One SMA link trial for both users; returns their bit error counts.
///
/// Draw order per trial is fixed: UE-1 symbol label, antenna label, UE-1
/// active channel column, UE-1 noise, UE-2 channel matrix, UE-2 noise.
struct SmaBerKernel<'a> {
    spec: &'a ConstellationSpec,
    nt: usize,
    nr: usize,
    sigma1_sq: f64,
    sigma2_sq: f64,
    n0: f64,
    streams: StreamFactory,
}

impl SmaBerKernel<'_> {
    fn block(&self, start: u64, len: u64) -> TwoUserCounts {
        let m = self.spec.m() as u32;
        let nt_bits = self.nt.trailing_zeros() > 0;
        let mut counts = TwoUserCounts::zero(nt_bits);
        let mut h1 = vec![Complex64::ZERO; self.nr];
        let mut w = vec![Complex64::ZERO; self.nr];
        let mut y = vec![Complex64::ZERO; self.nr];
        let mut h2 = ChannelMatrix::from_parts(
            self.nr,
            self.nt,
            self.sigma2_sq,
            vec![Complex64::ZERO; self.nr * self.nt],
        )
        .expect("validated dimensions");
        for t in start..start + len {
            let mut rng = self.streams.trial_rng(t);
            let v1 = rng.random_range(0..m);
            let j = rng.random_range(0..self.nt as u32);
            let n = self.spec.index_for_label(v1).expect("label in range");
            let x = self.spec.points()[n];

            fill_cn(&mut h1, self.sigma1_sq, &mut rng);
            fill_cn(&mut w, self.n0, &mut rng);
            for i in 0..self.nr {
                y[i] = h1[i] * x + w[i];
            }
            let n_hat = detect_ue1(&y, &h1, self.spec).expect("dimensions fixed");
            let lab = self.spec.label_of(n_hat).expect("index in range");
            counts.events1 += u64::from((v1 ^ lab).count_ones());

            h2.resample(&mut rng);
            fill_cn(&mut w, self.n0, &mut rng);
            let col = h2.column(j as usize);
            for i in 0..self.nr {
                y[i] = col[i] * x + w[i];
            }
            let det = detect_ue2(&y, &h2, self.spec).expect("dimensions fixed");
            counts.events2 += u64::from((j ^ det.antenna_index as u32).count_ones());
        }
        counts
    }
}

/// One NOMA baseline trial: superposed symbol through each user's SIMO
/// channel; the near user (UE-1) runs hard SIC, the far user detects
/// directly.
struct NomaBerKernel<'a> {
    spec: &'a ConstellationSpec,
    nr: usize,
    sigma1_sq: f64,
    sigma2_sq: f64,
    n0: f64,
    split: PowerSplit,
    streams: StreamFactory,
}

impl NomaBerKernel<'_> {
    fn block(&self, start: u64, len: u64) -> TwoUserCounts {
        let m = self.spec.m() as u32;
        let mut counts = TwoUserCounts::zero(true);
        let mut h = vec![Complex64::ZERO; self.nr];
        let mut w = vec![Complex64::ZERO; self.nr];
        let mut y = vec![Complex64::ZERO; self.nr];
        for t in start..start + len {
            let mut rng = self.streams.trial_rng(t);
            let v1 = rng.random_range(0..m);
            let v2 = rng.random_range(0..m);
            let n1 = self.spec.index_for_label(v1).expect("label in range");
            let n2 = self.spec.index_for_label(v2).expect("label in range");
            let s = encode_noma(
                self.spec.points()[n1],
                self.spec.points()[n2],
                self.split,
            );

            fill_cn(&mut h, self.sigma1_sq, &mut rng);
            fill_cn(&mut w, self.n0, &mut rng);
            for i in 0..self.nr {
                y[i] = h[i] * s + w[i];
            }
            let near = detect_noma_near_sic(&y, &h, self.split, self.spec)
                .expect("dimensions fixed");
            let lab = self.spec.label_of(near).expect("index in range");
            counts.events1 += u64::from((v1 ^ lab).count_ones());

            fill_cn(&mut h, self.sigma2_sq, &mut rng);
            fill_cn(&mut w, self.n0, &mut rng);
            for i in 0..self.nr {
                y[i] = h[i] * s + w[i];
            }
            let far =
                detect_noma_far(&y, &h, self.split, self.spec).expect("dimensions fixed");
            let lab = self.spec.label_of(far).expect("index in range");
            counts.events2 += u64::from((v2 ^ lab).count_ones());
        }
        counts
    }
}

/// Per-trial instantaneous rates; shared by the outage and sum-rate runs.
/// Draw order: UE-1 fading vector, then (NOMA only) UE-2 fading vector.
struct RateKernel {
    scheme: Scheme,
    nt: usize,
    nr: usize,
    sigma1_sq: f64,
    sigma2_sq: f64,
    rho: f64,
    split: Option<PowerSplit>,
    streams: StreamFactory,
}

impl RateKernel {
    fn instantaneous(&self, rng: &mut ChaCha8Rng, h: &mut [Complex64]) -> (f64, f64) {
        fill_cn(h, self.sigma1_sq, rng);
        let gamma1 = self.rho * sum_norm_sqr(h);
        match self.scheme {
            Scheme::Sma => {
                let rates = sma_rates(gamma1, self.nt).expect("validated inputs");
                (rates.r1, rates.r2)
            }
            Scheme::Noma => {
                fill_cn(h, self.sigma2_sq, rng);
                let gamma2 = self.rho * sum_norm_sqr(h);
                let rates = noma_rates(gamma1, gamma2, self.split.expect("validated"))
                    .expect("validated inputs");
                (rates.r1, rates.r2)
            }
        }
    }

    fn outage_block(&self, start: u64, len: u64, targets: TargetRates) -> TwoUserCounts {
        // UE-2's SMA rate is deterministic, so only UE-1 is tracked for the
        // early-stop rule there.
        let mut counts = TwoUserCounts::zero(self.scheme == Scheme::Noma);
        let mut h = vec![Complex64::ZERO; self.nr];
        for t in start..start + len {
            let mut rng = self.streams.trial_rng(t);
            let (r1, r2) = self.instantaneous(&mut rng, &mut h);
            counts.events1 += u64::from(r1 < targets.r1);
            counts.events2 += u64::from(r2 < targets.r2);
        }
        counts
    }

    fn sum_rate_block(&self, start: u64, len: u64) -> RateSum {
        let mut acc = RateSum::default();
        let mut h = vec![Complex64::ZERO; self.nr];
        for t in start..start + len {
            let mut rng = self.streams.trial_rng(t);
            let (r1, r2) = self.instantaneous(&mut rng, &mut h);
            acc.add(r1 + r2);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

fn proportion_point(
    snr_db: f64,
    events: u64,
    denominator: u64,
    trials_used: u64,
) -> CurvePoint {
    if denominator == 0 {
        return CurvePoint { snr_db, estimate: 0.0, standard_error: 0.0, trials_used };
    }
    let se = standard_error(events, denominator).expect("denominator checked above");
    CurvePoint {
        snr_db,
        estimate: events as f64 / denominator as f64,
        standard_error: se.value,
        trials_used,
    }
}

/// Counts bit errors of both users over the SNR grid and returns the two BER
/// curves. Deterministic in `scenario.master_seed` regardless of parallelism.
pub fn run_ber(scenario: &Scenario) -> Result<BerResult, SimError> {
    scenario.validate()?;
    let spec = ConstellationSpec::for_order(scenario.m)?;
    let bits1 = spec.bits_per_symbol() as u64;
    let bits2 = match scenario.scheme {
        Scheme::Sma => scenario.nt.trailing_zeros() as u64,
        Scheme::Noma => bits1,
    };
    let mut ue1 = Vec::with_capacity(scenario.snr_grid_db.len());
    let mut ue2 = Vec::with_capacity(scenario.snr_grid_db.len());
    for (pi, &snr_db) in scenario.snr_grid_db.iter().enumerate() {
        let rho = SnrPoint::from_db(snr_db)?;
        let n0 = NoiseSpec::for_snr(rho).n0();
        let streams = StreamFactory::new(scenario.master_seed, TAG_BER, pi as u64);
        let (counts, used) = match scenario.scheme {
            Scheme::Sma => {
                let kernel = SmaBerKernel {
                    spec: &spec,
                    nt: scenario.nt,
                    nr: scenario.nr,
                    sigma1_sq: scenario.sigma1_sq,
                    sigma2_sq: scenario.sigma2_sq,
                    n0,
                    streams,
                };
                drive_point(
                    scenario.trials,
                    scenario.early_stop_errors,
                    TwoUserCounts::zero(bits2 > 0),
                    |s, l| kernel.block(s, l),
                )
            }
            Scheme::Noma => {
                let kernel = NomaBerKernel {
                    spec: &spec,
                    nr: scenario.nr,
                    sigma1_sq: scenario.sigma1_sq,
                    sigma2_sq: scenario.sigma2_sq,
                    n0,
                    split: scenario.split(),
                    streams,
                };
                drive_point(
                    scenario.trials,
                    scenario.early_stop_errors,
                    TwoUserCounts::zero(true),
                    |s, l| kernel.block(s, l),
                )
            }
        };
        ue1.push(proportion_point(snr_db, counts.events1, bits1 * used, used));
        ue2.push(proportion_point(snr_db, counts.events2, bits2 * used, used));
    }
    Ok(BerResult {
        ue1: CurveSeries { metric: Metric::BerUe1, points: ue1 },
        ue2: CurveSeries { metric: Metric::BerUe2, points: ue2 },
    })
}

/// Counts outage events (instantaneous rate below target) for both users.
pub fn run_outage(scenario: &Scenario) -> Result<OutageResult, SimError> {
    scenario.validate()?;
    let targets = scenario
        .target_rates
        .ok_or_else(|| SimError::InvalidScenario("outage runs require target rates".into()))?;
    let mut ue1 = Vec::with_capacity(scenario.snr_grid_db.len());
    let mut ue2 = Vec::with_capacity(scenario.snr_grid_db.len());
    for (pi, &snr_db) in scenario.snr_grid_db.iter().enumerate() {
        let rho = SnrPoint::from_db(snr_db)?;
        let kernel = RateKernel {
            scheme: scenario.scheme,
            nt: scenario.nt,
            nr: scenario.nr,
            sigma1_sq: scenario.sigma1_sq,
            sigma2_sq: scenario.sigma2_sq,
            rho: rho.rho(),
            split: scenario.power_split,
            streams: StreamFactory::new(scenario.master_seed, TAG_OUTAGE, pi as u64),
        };
        let track2 = scenario.scheme == Scheme::Noma;
        let (counts, used) = drive_point(
            scenario.trials,
            scenario.early_stop_errors,
            TwoUserCounts::zero(track2),
            |s, l| kernel.outage_block(s, l, targets),
        );
        ue1.push(proportion_point(snr_db, counts.events1, used, used));
        ue2.push(proportion_point(snr_db, counts.events2, used, used));
    }
    Ok(OutageResult {
        ue1: CurveSeries { metric: Metric::OutageUe1, points: ue1 },
        ue2: CurveSeries { metric: Metric::OutageUe2, points: ue2 },
    })
}

/// Sample mean of the instantaneous sum rate per SNR point, with the
/// standard error of the mean.
pub fn run_sum_rate(scenario: &Scenario) -> Result<CurveSeries, SimError> {
    scenario.validate()?;
    let mut points = Vec::with_capacity(scenario.snr_grid_db.len());
    for (pi, &snr_db) in scenario.snr_grid_db.iter().enumerate() {
        let rho = SnrPoint::from_db(snr_db)?;
        let kernel = RateKernel {
            scheme: scenario.scheme,
            nt: scenario.nt,
            nr: scenario.nr,
            sigma1_sq: scenario.sigma1_sq,
            sigma2_sq: scenario.sigma2_sq,
            rho: rho.rho(),
            split: scenario.power_split,
            streams: StreamFactory::new(scenario.master_seed, TAG_RATE, pi as u64),
        };
        let (acc, used) =
            drive_point(scenario.trials, None, RateSum::default(), |s, l| {
                kernel.sum_rate_block(s, l)
            });
        let n = used as f64;
        let mean = acc.total() / n;
        let variance = ((acc.total_sq() - mean * mean * n) / (n - 1.0).max(1.0)).max(0.0);
        points.push(CurvePoint {
            snr_db,
            estimate: mean,
            standard_error: (variance / n).sqrt(),
            trials_used: used,
        });
    }
    Ok(CurveSeries { metric: Metric::SumRate, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sma_scenario() -> Scenario {
        Scenario {
            scheme: Scheme::Sma,
            nt: 4,
            nr: 4,
            m: 4,
            sigma1_sq: 1.0,
            sigma2_sq: 1.0,
            power_split: None,
            target_rates: Some(TargetRates::new(2.0, 2.0).unwrap()),
            snr_grid_db: vec![0.0, 10.0],
            trials: 20_000,
            master_seed: 7,
            early_stop_errors: None,
            fair_comparison: true,
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let mut scn = sma_scenario();
        scn.trials = 0;
        assert_eq!(run_ber(&scn), Err(SimError::NoTrials));
    }

    #[test]
    fn noma_requires_power_split() {
        let mut scn = sma_scenario();
        scn.scheme = Scheme::Noma;
        scn.fair_comparison = false;
        assert!(matches!(run_ber(&scn), Err(SimError::InvalidScenario(_))));
    }

    #[test]
    fn fair_comparison_mode_enforced() {
        let mut scn = sma_scenario();
        scn.nr = 2;
        assert!(matches!(scn.validate(), Err(SimError::InvalidScenario(_))));
        scn.fair_comparison = false;
        assert!(scn.validate().is_ok());
    }

    #[test]
    fn effectively_noiseless_run_has_zero_errors() {
        let mut scn = sma_scenario();
        scn.trials = 2_000;
        scn.snr_grid_db = vec![150.0];
        let res = run_ber(&scn).unwrap();
        assert_eq!(res.ue1.points[0].estimate, 0.0);
        assert_eq!(res.ue2.points[0].estimate, 0.0);
    }

    #[test]
    fn same_seed_reproduces_exactly() {
        let scn = sma_scenario();
        let a = run_ber(&scn).unwrap();
        let b = run_ber(&scn).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let mut scn = sma_scenario();
        let a = run_ber(&scn).unwrap();
        scn.master_seed = 8;
        let b = run_ber(&scn).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn early_stop_records_trials_used() {
        let mut scn = sma_scenario();
        scn.trials = 60_000_000; // never reached at this SNR
        scn.snr_grid_db = vec![0.0];
        scn.early_stop_errors = Some(400);
        let res = run_ber(&scn).unwrap();
        let used = res.ue1.points[0].trials_used;
        assert!(used < scn.trials, "stopped early, used {used}");
        assert_eq!(used % (BLOCK_TRIALS * BLOCKS_PER_ROUND as u64), 0);
        // Both users accumulated at least the requested number of errors.
        let e1 = res.ue1.points[0].estimate * 2.0 * used as f64;
        let e2 = res.ue2.points[0].estimate * 2.0 * used as f64;
        assert!(e1 >= 400.0 && e2 >= 400.0);
    }

    #[test]
    fn ue2_outage_structurally_zero_at_matching_target() {
        let mut scn = sma_scenario();
        scn.trials = 5_000;
        let res = run_outage(&scn).unwrap();
        for p in &res.ue2.points {
            assert_eq!(p.estimate, 0.0);
        }
    }

    #[test]
    fn ue1_outage_saturates_at_vanishing_snr() {
        let mut scn = sma_scenario();
        scn.trials = 5_000;
        scn.snr_grid_db = vec![-60.0];
        let res = run_outage(&scn).unwrap();
        assert_eq!(res.ue1.points[0].estimate, 1.0);
    }

    #[test]
    fn sma_sum_rate_floors_at_antenna_bits() {
        let mut scn = sma_scenario();
        scn.trials = 5_000;
        scn.snr_grid_db = vec![-60.0];
        let res = run_sum_rate(&scn).unwrap();
        assert!((res.points[0].estimate - 2.0).abs() < 1e-3);
    }

    #[test]
    fn standard_error_cases() {
        let se = standard_error(0, 100).unwrap();
        assert_eq!(se.value, 0.0);
        assert!(se.degenerate);
        let se = standard_error(50, 100).unwrap();
        assert!((se.value - 0.05).abs() < 1e-15);
        assert!(!se.degenerate);
        let se = standard_error(100, 1_000_000).unwrap();
        assert!((se.value - 9.999_499_987_499_375e-6).abs() < 1e-18);
        assert!(standard_error(0, 0).is_err());
        assert!(standard_error(5, 4).is_err());
    }
}

//! Closed-form performance expressions: average bit error probability of both
//! users, the pairwise/union bound on UE-2's antenna-bit errors, ergodic
//! capacity and sum rate, and outage probabilities.
//!
//! Conventions: `rho` is the average SNR per receive antenna (linear),
//! constellations have unit average energy, and `sigma_i_sq` is the per-entry
//! fading variance seen by user `i`. The post-MRC SNR per bit of UE-1 is then
//! chi-square distributed with `2 Nr` degrees of freedom and per-branch mean
//! `rho * sigma1_sq / log2(M)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::modem::{ConstellationSpec, PowerSplit};
use crate::numerics::{binomial_f64, exp_scaled_e1, Probability};

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("SNR must be positive and finite, got {0}")]
    BadSnr(f64),
    #[error("average branch SNR must be positive and finite, got {0}")]
    BadGamma(f64),
    #[error("density argument must be non-negative, got {0}")]
    NegativeArgument(f64),
    #[error("receive antenna count must be >= 1")]
    BadReceiveCount,
    #[error("antenna count {0} must be a power of two >= 1")]
    BadAntennaCount(usize),
    #[error("variance must be positive and finite, got {0}")]
    BadVariance(f64),
    #[error("rate must be non-negative and finite, got {0}")]
    BadRate(f64),
    #[error("target rate must be positive and finite, got {0}")]
    BadTarget(f64),
}

/// Derived scalars feeding the closed forms, for a constant-modulus
/// constellation where the pairwise fading variance does not depend on the
/// symbol pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    /// Average post-MRC SNR per bit of UE-1: `rho * sigma1_sq / log2(M)`.
    pub gamma_bar_1b: f64,
    /// `Nr - 1`.
    pub eta: u32,
    /// `sqrt(gamma_bar_1b / (1 + gamma_bar_1b))`.
    pub mu1: f64,
    /// `(1 - sqrt(sigma_a_sq / (1 + sigma_a_sq))) / 2`.
    pub mu2: f64,
    /// Per-branch variance of the antenna-pair decision statistic:
    /// `rho * sigma2_sq (|x_n|^2 + |x_nhat|^2) / 4`, which is
    /// `rho * sigma2_sq / 2` for unit-modulus points.
    pub sigma_a_sq: f64,
}

impl AnalyticParams {
    pub fn for_constant_modulus(
        rho: f64,
        sigma1_sq: f64,
        sigma2_sq: f64,
        m: usize,
        nr: usize,
    ) -> Result<Self, AnalyticError> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(AnalyticError::BadSnr(rho));
        }
        if !(sigma1_sq.is_finite() && sigma1_sq > 0.0) {
            return Err(AnalyticError::BadVariance(sigma1_sq));
        }
        if !(sigma2_sq.is_finite() && sigma2_sq > 0.0) {
            return Err(AnalyticError::BadVariance(sigma2_sq));
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(AnalyticError::BadAntennaCount(m));
        }
        if nr < 1 {
            return Err(AnalyticError::BadReceiveCount);
        }
        let gamma_bar_1b = rho * sigma1_sq / (m as f64).log2();
        let sigma_a_sq = rho * sigma2_sq / 2.0;
        Ok(Self {
            gamma_bar_1b,
            eta: (nr - 1) as u32,
            mu1: (gamma_bar_1b / (1.0 + gamma_bar_1b)).sqrt(),
            mu2: half_one_minus_mu(sigma_a_sq),
            sigma_a_sq,
        })
    }
}

/// Stable `(1 - sqrt(s / (1 + s))) / 2` without subtractive cancellation.
fn half_one_minus_mu(s: f64) -> f64 {
    0.5 / ((1.0 + s) * (1.0 + (s / (1.0 + s)).sqrt()))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `p^Nr * sum_{k=0}^{Nr-1} C(Nr-1+k, k) (1-p)^k`, the Rayleigh/MRC fading
/// average of a Gaussian tail with diversity order `Nr`, where
/// `p = (1 - sqrt(g/(1+g)))/2`.
fn mrc_fading_average(p: f64, nr: usize) -> f64 {
    let eta = (nr - 1) as u64;
    let q = 1.0 - p;
    let mut sum = 0.0;
    let mut qk = 1.0;
    for k in 0..=eta {
        sum += binomial_f64(eta + k, k) * qk;
        qk *= q;
    }
    p.powi(nr as i32) * sum
}

/// Density of the post-MRC SNR (chi-square with `2 Nr` degrees of freedom,
/// per-branch mean `gamma_bar`): `g^(Nr-1) e^(-g/gb) / ((Nr-1)! gb^Nr)`.
pub fn pdf_gamma1b(g: f64, gamma_bar: f64, nr: usize) -> Result<f64, AnalyticError> {
    if !(gamma_bar.is_finite() && gamma_bar > 0.0) {
        return Err(AnalyticError::BadGamma(gamma_bar));
    }
    if nr < 1 {
        return Err(AnalyticError::BadReceiveCount);
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(AnalyticError::NegativeArgument(g));
    }
    let nr_u = nr as u32;
    Ok(g.powi(nr as i32 - 1) * (-g / gamma_bar).exp()
        / (factorial(nr_u - 1) * gamma_bar.powi(nr as i32)))
}

/// Average bit error probability of UE-1 for BPSK/QPSK (Gray) over Rayleigh
/// fading with `Nr`-branch MRC, at average per-bit SNR `gamma_bar_1b`.
pub fn abep_ue1(gamma_bar_1b: f64, nr: usize) -> Result<Probability, AnalyticError> {
    if !(gamma_bar_1b.is_finite() && gamma_bar_1b > 0.0) {
        return Err(AnalyticError::BadGamma(gamma_bar_1b));
    }
    if nr < 1 {
        return Err(AnalyticError::BadReceiveCount);
    }
    let p = half_one_minus_mu(gamma_bar_1b);
    Ok(Probability::new(mrc_fading_average(p, nr))
        .expect("MRC fading average stays within [0, 1]"))
}

/// Pairwise probability that joint detection prefers antenna `j_hat != j`
/// carrying `x_nhat` over the transmitted `(j, x_n)`, averaged over Rayleigh
/// fading. This is the bare two-hypothesis error probability, without the
/// bound bookkeeping factor of [`pep_sm`].
pub fn pep_sm_raw(
    rho: f64,
    sigma2_sq: f64,
    xn: Complex64,
    xnhat: Complex64,
    nr: usize,
) -> Result<f64, AnalyticError> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(AnalyticError::BadSnr(rho));
    }
    if !(sigma2_sq.is_finite() && sigma2_sq > 0.0) {
        return Err(AnalyticError::BadVariance(sigma2_sq));
    }
    if nr < 1 {
        return Err(AnalyticError::BadReceiveCount);
    }
    let sigma_a_sq = rho * sigma2_sq * (xn.norm_sqr() + xnhat.norm_sqr()) / 4.0;
    Ok(mrc_fading_average(half_one_minus_mu(sigma_a_sq), nr))
}

/// Pairwise error term as it enters the union bound, i.e. the fading-averaged
/// two-hypothesis probability multiplied by `log2(M)`. The factor makes the
/// term exceed 1 at low SNR, so it is a bound ingredient rather than a
/// probability; use [`pep_sm_raw`] for the bare probability.
pub fn pep_sm(
    rho: f64,
    sigma2_sq: f64,
    xn: Complex64,
    xnhat: Complex64,
    nr: usize,
    m: usize,
) -> Result<f64, AnalyticError> {
    if m < 2 || !m.is_power_of_two() {
        return Err(AnalyticError::BadAntennaCount(m));
    }
    Ok(pep_sm_raw(rho, sigma2_sq, xn, xnhat, nr)? * (m as f64).log2())
}

/// Union bound on UE-2's bit error probability, with the raw value and the
/// `min(raw, 0.5)` clamp used for plotting (a union bound above 0.5 carries
/// no information on a BER axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionBound {
    pub raw: f64,
    pub clamped: f64,
}

impl UnionBound {
    fn from_raw(raw: f64) -> Self {
        Self { raw, clamped: raw.min(0.5) }
    }
}

/// Union bound on the antenna-bit error probability of UE-2.
///
/// For constant-modulus constellations the pairwise term does not depend on
/// the symbol pair and the bound collapses to
/// `Nt * log2(M) * pep_raw(rho)`; for other constellations the ordered
/// antenna-pair summation of [`union_bound_ue2_pairwise`] is used.
pub fn union_bound_ue2(
    rho: f64,
    sigma2_sq: f64,
    spec: &ConstellationSpec,
    nt: usize,
    nr: usize,
) -> Result<UnionBound, AnalyticError> {
    if nt < 1 || !nt.is_power_of_two() {
        return Err(AnalyticError::BadAntennaCount(nt));
    }
    if spec.is_constant_modulus() {
        let params = AnalyticParams::for_constant_modulus(rho, 1.0, sigma2_sq, spec.m(), nr)?;
        let raw = nt as f64
            * (spec.m() as f64).log2()
            * mrc_fading_average(params.mu2, nr);
        Ok(UnionBound::from_raw(raw))
    } else {
        union_bound_ue2_pairwise(rho, sigma2_sq, spec, nt, nr)
    }
}

/// Union bound evaluated by the explicit summation over ordered antenna
/// pairs, each weighted by the pairwise term averaged over equiprobable
/// symbol pairs. Reduces exactly to the constant-modulus expression for PSK.
pub fn union_bound_ue2_pairwise(
    rho: f64,
    sigma2_sq: f64,
    spec: &ConstellationSpec,
    nt: usize,
    nr: usize,
) -> Result<UnionBound, AnalyticError> {
    if nt < 1 || !nt.is_power_of_two() {
        return Err(AnalyticError::BadAntennaCount(nt));
    }
    let m = spec.m();
    let m_sq = (m * m) as f64;
    let mut total = 0.0;
    for _j in 0..nt {
        for _j_hat in 0..nt {
            let mut pair_sum = 0.0;
            for &xn in spec.points() {
                for &xnhat in spec.points() {
                    pair_sum += pep_sm(rho, sigma2_sq, xn, xnhat, nr, m)?;
                }
            }
            total += pair_sum / m_sq;
        }
    }
    Ok(UnionBound::from_raw(total / nt as f64))
}

/// Achievable rates of the two users, bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

/// Targeted data rates used by the outage definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetRates {
    pub r1: f64,
    pub r2: f64,
}

impl TargetRates {
    pub fn new(r1: f64, r2: f64) -> Result<Self, AnalyticError> {
        if !(r1.is_finite() && r1 > 0.0) {
            return Err(AnalyticError::BadTarget(r1));
        }
        if !(r2.is_finite() && r2 > 0.0) {
            return Err(AnalyticError::BadTarget(r2));
        }
        Ok(Self { r1, r2 })
    }
}

/// Instantaneous SMA rates: UE-1 sees an interference-free link of SNR
/// `gamma1`; UE-2's rate is fixed by the number of transmit antennas.
pub fn sma_rates(gamma1: f64, nt: usize) -> Result<RatePair, AnalyticError> {
    if !(gamma1.is_finite() && gamma1 >= 0.0) {
        return Err(AnalyticError::BadRate(gamma1));
    }
    if nt < 1 || !nt.is_power_of_two() {
        return Err(AnalyticError::BadAntennaCount(nt));
    }
    Ok(RatePair { r1: (1.0 + gamma1).log2(), r2: (nt as f64).log2() })
}

/// Instantaneous NOMA rates: the near user decodes after SIC, the far user
/// treats the near user's signal as noise.
pub fn noma_rates(
    gamma1: f64,
    gamma2: f64,
    split: PowerSplit,
) -> Result<RatePair, AnalyticError> {
    if !(gamma1.is_finite() && gamma1 >= 0.0) {
        return Err(AnalyticError::BadRate(gamma1));
    }
    if !(gamma2.is_finite() && gamma2 >= 0.0) {
        return Err(AnalyticError::BadRate(gamma2));
    }
    let r1 = (1.0 + split.a1() * gamma1).log2();
    let r2 = (1.0 + split.a2() * gamma2 / (split.a1() * gamma2 + 1.0)).log2();
    Ok(RatePair { r1, r2 })
}

/// Ergodic capacity of UE-1 over chi-square fading with `2 Nr` degrees of
/// freedom and per-branch mean `gamma_bar`, in bits per channel use.
pub fn ergodic_capacity_ue1(gamma_bar: f64, nr: usize) -> Result<f64, AnalyticError> {
    if !(gamma_bar.is_finite() && gamma_bar > 0.0) {
        return Err(AnalyticError::BadGamma(gamma_bar));
    }
    if nr < 1 {
        return Err(AnalyticError::BadReceiveCount);
    }
    let eta = (nr - 1) as i32;
    // e^{1/gb} Ei(-1/gb), evaluated in its exponentially-scaled form so the
    // product stays finite for arbitrarily small gamma_bar.
    let scaled_ei = -exp_scaled_e1(1.0 / gamma_bar);
    let mut total = 0.0;
    for k in 0..=eta {
        let prefactor = factorial(eta as u32) / factorial((eta - k) as u32);
        let power = eta - k;
        let sign = if (power - 1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let mut term = sign / gamma_bar.powi(power) * scaled_ei;
        for j in 1..=power {
            term += factorial((j - 1) as u32) / (-gamma_bar).powi(power - j);
        }
        total += prefactor * term;
    }
    Ok(std::f64::consts::LOG2_E * total / factorial((nr - 1) as u32))
}

/// Ergodic sum rate of the SMA downlink with unit fading variance:
/// `log2(Nt) + ergodic_capacity_ue1(rho, Nr)`.
pub fn ergodic_sum_rate(rho: f64, nr: usize, nt: usize) -> Result<f64, AnalyticError> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(AnalyticError::BadSnr(rho));
    }
    if nt < 1 || !nt.is_power_of_two() {
        return Err(AnalyticError::BadAntennaCount(nt));
    }
    Ok((nt as f64).log2() + ergodic_capacity_ue1(rho, nr)?)
}

/// Outage probability of UE-1: the chi-square CDF evaluated at
/// `theta = 2^target - 1`, with `gamma_bar` the average symbol SNR
/// (`rho * sigma1_sq`).
pub fn outage_ue1(target: f64, gamma_bar: f64, nr: usize) -> Result<Probability, AnalyticError> {
    if !(target.is_finite() && target > 0.0) {
        return Err(AnalyticError::BadTarget(target));
    }
    if !(gamma_bar.is_finite() && gamma_bar > 0.0) {
        return Err(AnalyticError::BadGamma(gamma_bar));
    }
    if nr < 1 {
        return Err(AnalyticError::BadReceiveCount);
    }
    let theta = (2f64).powf(target) - 1.0;
    let x = theta / gamma_bar;
    let mut sum = 0.0;
    let mut xk = 1.0;
    for k in 1..=nr as u32 {
        sum += xk / factorial(k - 1);
        xk *= x;
    }
    let p = 1.0 - (-x).exp() * sum;
    // Guard against rounding slightly below zero at tiny theta.
    Ok(Probability::new(p.max(0.0)).expect("chi-square CDF stays within [0, 1]"))
}

/// Outage probability of UE-2: its rate is the deterministic `log2(Nt)`, so
/// the outage is 0 whenever the target rate is within that and 1 otherwise.
pub fn outage_ue2(target: f64, nt: usize) -> Result<Probability, AnalyticError> {
    if !(target.is_finite() && target > 0.0) {
        return Err(AnalyticError::BadTarget(target));
    }
    if nt < 1 || !nt.is_power_of_two() {
        return Err(AnalyticError::BadAntennaCount(nt));
    }
    let p = if target <= (nt as f64).log2() { 0.0 } else { 1.0 };
    Ok(Probability::new(p).expect("indicator value"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::ConstellationSpec;

    const EPS: f64 = 1e-12;

    #[test]
    fn pdf_reduces_to_exponential_for_single_branch() {
        for &g in &[0.0, 0.3, 2.0, 11.0] {
            let p = pdf_gamma1b(g, 2.0, 1).unwrap();
            assert!((p - 0.5 * (-g / 2.0).exp()).abs() < EPS);
        }
    }

    #[test]
    fn pdf_rejects_negative_argument() {
        assert!(pdf_gamma1b(-0.1, 1.0, 2).is_err());
        assert!(pdf_gamma1b(1.0, 0.0, 2).is_err());
    }

    #[test]
    fn abep_limits() {
        // Total uncertainty as the SNR vanishes, for any diversity order.
        for nr in [1usize, 2, 4, 8] {
            let p = abep_ue1(1e-14, nr).unwrap().value();
            assert!((p - 0.5).abs() < 1e-6, "nr = {nr}: {p}");
        }
        // Known single-branch value at gamma_bar = 10.
        let p = abep_ue1(10.0, 1).unwrap().value();
        assert!((p - 0.023_268_705_377_203_842).abs() < EPS);
    }

    #[test]
    fn abep_strictly_decreasing_in_snr() {
        for nr in [1usize, 2, 4] {
            let mut prev = f64::INFINITY;
            for i in 0..60 {
                let g = 10f64.powf(-2.0 + 0.1 * i as f64);
                let p = abep_ue1(g, nr).unwrap().value();
                assert!(p < prev);
                prev = p;
            }
        }
    }

    #[test]
    fn pep_low_and_high_snr_limits() {
        let one = Complex64::new(1.0, 0.0);
        // Vanishing SNR: mu2 -> 1/2, single-branch BPSK term -> 0.5.
        let p = pep_sm(1e-14, 1.0, one, one, 1, 2).unwrap();
        assert!((p - 0.5).abs() < 1e-6);
        // Large SNR: term vanishes.
        assert!(pep_sm(1e9, 1.0, one, one, 1, 2).unwrap() < 1e-8);
    }

    #[test]
    fn pep_worked_value() {
        // rho = 4, unit-modulus pair: sigma_a^2 = 2, mu2 = (1-sqrt(2/3))/2.
        let one = Complex64::new(1.0, 0.0);
        let p = pep_sm(4.0, 1.0, one, one, 1, 2).unwrap();
        assert!((p - 0.091_751_709_536_136_984).abs() < EPS);
        let raw = pep_sm_raw(4.0, 1.0, one, one, 1).unwrap();
        assert_eq!(p, raw, "log2(2) factor is one");
    }

    #[test]
    fn union_bound_low_snr_clamp() {
        let spec = ConstellationSpec::bpsk();
        let b = union_bound_ue2(1e-14, 1.0, &spec, 2, 1).unwrap();
        assert!((b.raw - 1.0).abs() < 1e-6);
        assert_eq!(b.clamped, 0.5);
    }

    #[test]
    fn union_bound_vanishes_at_high_snr() {
        let spec = ConstellationSpec::qpsk();
        let b = union_bound_ue2(1e8, 1.0, &spec, 4, 4).unwrap();
        assert!(b.raw < 1e-20);
        assert_eq!(b.raw, b.clamped);
    }

    #[test]
    fn union_bound_pairwise_matches_fast_path_for_psk() {
        // The two routes are algebraically identical for constant-modulus
        // sets; stored PSK points carry cos/sin rounded to the last ulp, so
        // the agreement is asserted at a few ulps rather than bitwise.
        for m in [2usize, 4, 8] {
            let spec = ConstellationSpec::psk(m).unwrap();
            for nr in [1usize, 2, 4] {
                for &rho_db in &[0.0, 7.5, 15.0] {
                    let rho = 10f64.powf(rho_db / 10.0);
                    let fast = union_bound_ue2(rho, 1.0, &spec, m, nr).unwrap();
                    let pairwise =
                        union_bound_ue2_pairwise(rho, 1.0, &spec, m, nr).unwrap();
                    let rel = (fast.raw - pairwise.raw).abs() / pairwise.raw;
                    assert!(rel < 1e-14, "m={m} nr={nr} rho={rho_db}dB: rel {rel}");
                }
            }
        }
    }

    #[test]
    fn rates_examples() {
        let r = sma_rates(0.0, 4).unwrap();
        assert_eq!(r.r1, 0.0);
        assert_eq!(r.r2, 2.0);
        assert!((sma_rates(3.0, 4).unwrap().r1 - 2.0).abs() < EPS);

        let split = PowerSplit::new(0.2, 0.8).unwrap();
        let r = noma_rates(0.0, 1e12, split).unwrap();
        assert_eq!(r.r1, 0.0);
        assert!((r.r2 - 5f64.log2()).abs() < 1e-9, "gamma2 -> inf limit");
        let r = noma_rates(20.0, 1.0, split).unwrap();
        assert!((r.r1 - 5f64.log2()).abs() < EPS);
    }

    #[test]
    fn noma_far_rate_below_its_ceiling() {
        let split = PowerSplit::new(0.2, 0.8).unwrap();
        let ceiling = (1.0 + split.a2() / split.a1()).log2();
        for i in 0..50 {
            let g = 10f64.powf(-2.0 + 0.12 * i as f64);
            let r = noma_rates(1.0, g, split).unwrap();
            assert!(r.r2 < ceiling);
        }
    }

    #[test]
    fn ergodic_sum_rate_examples() {
        // Single-branch closed form at rho = 10.
        let c1 = ergodic_capacity_ue1(10.0, 1).unwrap();
        assert!((c1 - 2.906_514_808_414_805).abs() < 1e-10);
        // The antenna term adds exactly log2(Nt).
        let total = ergodic_sum_rate(10.0, 1, 4).unwrap();
        assert!((total - c1 - 2.0).abs() < EPS);
        // Vanishing SNR: only the antenna bits remain.
        let low = ergodic_sum_rate(1e-9, 2, 4).unwrap();
        assert!((low - 2.0).abs() < 1e-6);
    }

    #[test]
    fn outage_ue1_examples() {
        let p = outage_ue1(1.0, 1.0, 1).unwrap().value();
        assert!((p - 0.632_120_558_828_557_7).abs() < EPS);
        // Tiny target: theta -> 0 and the CDF vanishes.
        assert!(outage_ue1(1e-12, 1.0, 4).unwrap().value() < 1e-9);
        // Decreasing in gamma_bar.
        let a = outage_ue1(2.0, 5.0, 2).unwrap().value();
        let b = outage_ue1(2.0, 50.0, 2).unwrap().value();
        assert!(b < a);
    }

    #[test]
    fn outage_ue2_threshold() {
        assert_eq!(outage_ue2(2.0, 4).unwrap().value(), 0.0);
        assert_eq!(outage_ue2(3.0, 4).unwrap().value(), 1.0);
        assert_eq!(outage_ue2(1.0, 8).unwrap().value(), 0.0);
    }

    #[test]
    fn params_invariants() {
        let p = AnalyticParams::for_constant_modulus(10.0, 1.0, 1.0, 4, 4).unwrap();
        assert!((p.gamma_bar_1b - 5.0).abs() < EPS);
        assert_eq!(p.eta, 3);
        assert!(p.mu1 > 0.0 && p.mu1 < 1.0);
        assert!(p.mu2 > 0.0 && p.mu2 <= 0.5);
        assert!((p.sigma_a_sq - 5.0).abs() < EPS);
        assert!(AnalyticParams::for_constant_modulus(-1.0, 1.0, 1.0, 4, 4).is_err());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(abep_ue1(0.0, 2).is_err());
        assert!(abep_ue1(1.0, 0).is_err());
        assert!(ergodic_sum_rate(0.0, 2, 4).is_err());
        assert!(ergodic_sum_rate(1.0, 2, 3).is_err());
        assert!(outage_ue1(0.0, 1.0, 1).is_err());
        assert!(outage_ue2(-1.0, 4).is_err());
        assert!(sma_rates(-0.5, 4).is_err());
    }
}

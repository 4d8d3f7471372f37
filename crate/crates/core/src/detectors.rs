//! Maximum-likelihood receivers for the two SMA users and the hard-decision
//! SIC receivers of the NOMA baseline.
//!
//! Tie-breaking everywhere is to the lowest antenna index, then the lowest
//! point index, so detection is deterministic across implementations.

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::ChannelMatrix;
use crate::modem::{ConstellationSpec, PowerSplit};

#[derive(Debug, Error, PartialEq)]
pub enum DetectorError {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: &'static str },
    #[error("SNR must be positive and finite, got {0}")]
    BadSnr(f64),
}

/// Joint antenna/symbol decision with the winning metric value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub antenna_index: usize,
    pub point_index: usize,
    pub metric: f64,
}

fn distance_sq(y: &[Complex64], h: &[Complex64], x: Complex64) -> f64 {
    y.iter()
        .zip(h)
        .map(|(&yv, &hv)| (yv - hv * x).norm_sqr())
        .sum()
}

/// UE-1 detection: minimum-distance search over the M constellation points,
/// given the active channel column (the transmit antenna choice does not
/// affect UE-1's decision).
pub fn detect_ue1(
    y: &[Complex64],
    h_j: &[Complex64],
    spec: &ConstellationSpec,
) -> Result<usize, DetectorError> {
    if y.len() != h_j.len() || y.is_empty() {
        return Err(DetectorError::DimensionMismatch { context: "received vs channel column" });
    }
    let mut best = 0usize;
    let mut best_metric = f64::INFINITY;
    for (n, &x) in spec.points().iter().enumerate() {
        let d = distance_sq(y, h_j, x);
        if d < best_metric {
            best_metric = d;
            best = n;
        }
    }
    Ok(best)
}

/// UE-2 detection: joint minimisation of `||y - h_j x_n||^2` over all
/// `(j, n)` hypotheses. UE-2 keeps only the antenna index for its own bits;
/// the symbol decision is returned as well for completeness.
///
/// This squared-distance metric is argmin-equivalent to the scaled
/// correlation form of [`detect_ue2_scaled_metric`]; the equivalence is
/// asserted by tests rather than assumed.
pub fn detect_ue2(
    y: &[Complex64],
    h: &ChannelMatrix,
    spec: &ConstellationSpec,
) -> Result<DetectionResult, DetectorError> {
    if y.len() != h.nr() {
        return Err(DetectorError::DimensionMismatch { context: "received vs nr" });
    }
    let mut best = DetectionResult { antenna_index: 0, point_index: 0, metric: f64::INFINITY };
    for j in 0..h.nt() {
        let col = h.column(j);
        for (n, &x) in spec.points().iter().enumerate() {
            let d = distance_sq(y, col, x);
            if d < best.metric {
                best = DetectionResult { antenna_index: j, point_index: n, metric: d };
            }
        }
    }
    Ok(best)
}

/// UE-2 detection in the literal scaled-correlation form
/// `sqrt(rho) ||g||^2 - 2 Re{y2^H g}` with `g = h_j x_n`, where `y2` is the
/// received vector renormalised to unit noise variance (`y2 = sqrt(rho) y`
/// under this crate's `N0 = 1/rho` convention).
///
/// Kept as the regression reference for [`detect_ue2`].
pub fn detect_ue2_scaled_metric(
    y: &[Complex64],
    h: &ChannelMatrix,
    spec: &ConstellationSpec,
    rho: f64,
) -> Result<DetectionResult, DetectorError> {
    if y.len() != h.nr() {
        return Err(DetectorError::DimensionMismatch { context: "received vs nr" });
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(DetectorError::BadSnr(rho));
    }
    let sqrt_rho = rho.sqrt();
    let y2: Vec<Complex64> = y.iter().map(|&v| v * sqrt_rho).collect();
    let mut best = DetectionResult { antenna_index: 0, point_index: 0, metric: f64::INFINITY };
    for j in 0..h.nt() {
        let col = h.column(j);
        for (n, &x) in spec.points().iter().enumerate() {
            let g_norm_sqr: f64 = col.iter().map(|&hv| (hv * x).norm_sqr()).sum();
            let corr: f64 = y2
                .iter()
                .zip(col)
                .map(|(&yv, &hv)| (yv.conj() * (hv * x)).re)
                .sum();
            let metric = sqrt_rho * g_norm_sqr - 2.0 * corr;
            if metric < best.metric {
                best = DetectionResult { antenna_index: j, point_index: n, metric };
            }
        }
    }
    Ok(best)
}

/// Maximal-ratio combine: `h^H y / ||h||^2`.
fn mrc(y: &[Complex64], h: &[Complex64]) -> Complex64 {
    let num: Complex64 = y.iter().zip(h).map(|(&yv, &hv)| hv.conj() * yv).sum();
    let den: f64 = h.iter().map(|&hv| hv.norm_sqr()).sum();
    num / den
}

fn nearest_scaled_point(z: Complex64, scale: f64, spec: &ConstellationSpec) -> usize {
    let mut best = 0usize;
    let mut best_metric = f64::INFINITY;
    for (n, &x) in spec.points().iter().enumerate() {
        let d = (z - x * scale).norm_sqr();
        if d < best_metric {
            best_metric = d;
            best = n;
        }
    }
    best
}

/// Far-user NOMA detection: MRC combine, then minimum-distance detection of
/// the far symbol against the `sqrt(a2)`-scaled constellation, treating the
/// near user's signal as noise.
pub fn detect_noma_far(
    y: &[Complex64],
    h: &[Complex64],
    split: PowerSplit,
    spec: &ConstellationSpec,
) -> Result<usize, DetectorError> {
    if y.len() != h.len() || y.is_empty() {
        return Err(DetectorError::DimensionMismatch { context: "received vs channel" });
    }
    Ok(nearest_scaled_point(mrc(y, h), split.a2().sqrt(), spec))
}

/// Near-user NOMA detection with hard-decision SIC: detect the far symbol,
/// reconstruct and subtract it, then detect the own symbol against the
/// `sqrt(a1)`-scaled constellation.
pub fn detect_noma_near_sic(
    y: &[Complex64],
    h: &[Complex64],
    split: PowerSplit,
    spec: &ConstellationSpec,
) -> Result<usize, DetectorError> {
    let far = detect_noma_far(y, h, split, spec)?;
    detect_noma_near_with_far(y, h, split, spec, far)
}

/// Near-user detection with the far symbol supplied externally (genie-aided
/// cancellation); used to bound SIC error propagation.
pub fn detect_noma_near_genie(
    y: &[Complex64],
    h: &[Complex64],
    split: PowerSplit,
    spec: &ConstellationSpec,
    true_far_index: usize,
) -> Result<usize, DetectorError> {
    if y.len() != h.len() || y.is_empty() {
        return Err(DetectorError::DimensionMismatch { context: "received vs channel" });
    }
    detect_noma_near_with_far(y, h, split, spec, true_far_index)
}

fn detect_noma_near_with_far(
    y: &[Complex64],
    h: &[Complex64],
    split: PowerSplit,
    spec: &ConstellationSpec,
    far_index: usize,
) -> Result<usize, DetectorError> {
    let far_sym = spec.points()[far_index] * split.a2().sqrt();
    let residual: Vec<Complex64> =
        y.iter().zip(h).map(|(&yv, &hv)| yv - hv * far_sym).collect();
    Ok(nearest_scaled_point(mrc(&residual, h), split.a1().sqrt(), spec))
}

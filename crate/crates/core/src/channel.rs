//! Rayleigh MIMO fading and AWGN sampling, and the received-vector model
//! `y = h_j x_n + w` for a single active transmit antenna.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::modem::TxVector;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("dimensions must be >= 1, got nt = {nt}, nr = {nr}")]
    BadDimensions { nt: usize, nr: usize },
    #[error("variance must be positive and finite, got {0}")]
    BadVariance(f64),
    #[error("SNR must be positive and finite, got {0}")]
    BadSnr(f64),
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: &'static str },
}

/// Per-complex-dimension AWGN variance `N0`; each of the real and imaginary
/// parts carries `N0/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    n0: f64,
}

impl NoiseSpec {
    pub fn new(n0: f64) -> Result<Self, ChannelError> {
        if !(n0.is_finite() && n0 > 0.0) {
            return Err(ChannelError::BadVariance(n0));
        }
        Ok(Self { n0 })
    }

    /// Noise level realising average SNR `rho` per receive antenna under
    /// unit-energy transmit symbols: `N0 = 1/rho`.
    pub fn for_snr(snr: SnrPoint) -> Self {
        Self { n0: 1.0 / snr.rho() }
    }

    pub fn n0(self) -> f64 {
        self.n0
    }
}

/// Average SNR per receive antenna, linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    rho: f64,
}

impl SnrPoint {
    pub fn new(rho: f64) -> Result<Self, ChannelError> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(ChannelError::BadSnr(rho));
        }
        Ok(Self { rho })
    }

    pub fn from_db(db: f64) -> Result<Self, ChannelError> {
        Self::new(10f64.powf(db / 10.0))
    }

    pub fn rho(self) -> f64 {
        self.rho
    }

    pub fn db(self) -> f64 {
        10.0 * self.rho.log10()
    }
}

/// One `Nr x Nt` fading realisation, stored column-major so that the gain
/// vector of each transmit antenna is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    nr: usize,
    nt: usize,
    sigma_sq: f64,
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    /// Builds a matrix from explicit column-major entries; `sigma_sq` records
    /// the per-entry variance the realisation is understood to come from.
    pub fn from_parts(
        nr: usize,
        nt: usize,
        sigma_sq: f64,
        data: Vec<Complex64>,
    ) -> Result<Self, ChannelError> {
        if nt < 1 || nr < 1 {
            return Err(ChannelError::BadDimensions { nt, nr });
        }
        if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
            return Err(ChannelError::BadVariance(sigma_sq));
        }
        if data.len() != nr * nt {
            return Err(ChannelError::DimensionMismatch { context: "entry count vs nr * nt" });
        }
        Ok(Self { nr, nt, sigma_sq, data })
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    /// Gain vector `h_v` of transmit antenna `v` (one entry per receive
    /// antenna).
    pub fn column(&self, v: usize) -> &[Complex64] {
        &self.data[v * self.nr..(v + 1) * self.nr]
    }

    /// All entries, column-major.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Redraws every entry in place, keeping dimensions and variance.
    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let s = (self.sigma_sq / 2.0).sqrt();
        for e in &mut self.data {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *e = Complex64::new(s * re, s * im);
        }
    }
}

/// Draws an `Nr x Nt` matrix of i.i.d. `CN(0, sigma_sq)` entries.
pub fn sample_channel<R: Rng + ?Sized>(
    nt: usize,
    nr: usize,
    sigma_sq: f64,
    rng: &mut R,
) -> Result<ChannelMatrix, ChannelError> {
    if nt < 1 || nr < 1 {
        return Err(ChannelError::BadDimensions { nt, nr });
    }
    if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
        return Err(ChannelError::BadVariance(sigma_sq));
    }
    let mut h = ChannelMatrix { nr, nt, sigma_sq, data: vec![Complex64::ZERO; nr * nt] };
    h.resample(rng);
    Ok(h)
}

/// Draws an `Nr`-dimensional AWGN vector of i.i.d. `CN(0, N0)` entries.
pub fn sample_noise<R: Rng + ?Sized>(
    nr: usize,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Vec<Complex64> {
    let s = (noise.n0() / 2.0).sqrt();
    (0..nr)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect()
}

/// Fills `out` with one complex Gaussian vector of per-entry variance
/// `var`; used by the Monte Carlo hot loop to avoid reallocation.
pub(crate) fn fill_cn<R: Rng + ?Sized>(out: &mut [Complex64], var: f64, rng: &mut R) {
    let s = (var / 2.0).sqrt();
    for e in out.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *e = Complex64::new(s * re, s * im);
    }
}

/// Received vector `y = h_j x_n + w` for the single active antenna `j` of
/// the transmit vector.
pub fn received_vector(
    h: &ChannelMatrix,
    x: &TxVector,
    w: &[Complex64],
) -> Result<Vec<Complex64>, ChannelError> {
    if x.len() != h.nt() {
        return Err(ChannelError::DimensionMismatch { context: "transmit vector length vs nt" });
    }
    if w.len() != h.nr() {
        return Err(ChannelError::DimensionMismatch { context: "noise length vs nr" });
    }
    let col = h.column(x.active_index());
    let xn = x.active_value();
    Ok(col.iter().zip(w).map(|(&hv, &wv)| hv * xn + wv).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_dimensions_and_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_channel(0, 2, 1.0, &mut rng).is_err());
        assert!(sample_channel(2, 0, 1.0, &mut rng).is_err());
        assert!(sample_channel(2, 2, 0.0, &mut rng).is_err());
        assert!(sample_channel(2, 2, -1.0, &mut rng).is_err());
        assert!(NoiseSpec::new(0.0).is_err());
        assert!(SnrPoint::new(-3.0).is_err());
    }

    #[test]
    fn snr_db_round_trip() {
        let p = SnrPoint::from_db(10.0).unwrap();
        assert!((p.rho() - 10.0).abs() < 1e-12);
        assert!((p.db() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn column_layout_matches_sampling_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = sample_channel(3, 2, 1.0, &mut rng).unwrap();
        assert_eq!(h.column(0).len(), 2);
        assert_eq!(h.column(2).len(), 2);
        // Columns partition the storage without overlap.
        let all: Vec<Complex64> =
            (0..3).flat_map(|v| h.column(v).to_vec()).collect();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn received_vector_noiseless_reads_off_the_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = sample_channel(4, 2, 1.0, &mut rng).unwrap();
        let x = TxVector::one_sparse(4, 1, Complex64::new(1.0, 0.0)).unwrap();
        let w = vec![Complex64::ZERO; 2];
        let y = received_vector(&h, &x, &w).unwrap();
        assert_eq!(y, h.column(1).to_vec());
    }

    #[test]
    fn received_vector_identity_channel_example() {
        // Nr = 2, h_j = (1, i), x_n = 1, w = 0  =>  y = (1, i).
        let h = ChannelMatrix {
            nr: 2,
            nt: 1,
            sigma_sq: 1.0,
            data: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        };
        let x = TxVector::one_sparse(1, 0, Complex64::new(1.0, 0.0)).unwrap();
        let y = received_vector(&h, &x, &[Complex64::ZERO; 2]).unwrap();
        assert_eq!(y[0], Complex64::new(1.0, 0.0));
        assert_eq!(y[1], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn received_vector_pure_noise_when_symbol_tiny() {
        // Scaling the active value by a power of two scales the signal part
        // exactly; with w fixed the difference isolates the signal term.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = sample_channel(2, 2, 1.0, &mut rng).unwrap();
        let w = sample_noise(2, &NoiseSpec::new(0.5).unwrap(), &mut rng);
        let x1 = TxVector::one_sparse(2, 0, Complex64::new(0.5, -0.25)).unwrap();
        let x2 = TxVector::one_sparse(2, 0, Complex64::new(1.0, -0.5)).unwrap();
        let y1 = received_vector(&h, &x1, &vec![Complex64::ZERO; 2]).unwrap();
        let y2 = received_vector(&h, &x2, &vec![Complex64::ZERO; 2]).unwrap();
        for i in 0..2 {
            assert_eq!(y2[i], y1[i] * 2.0, "scaling by 2 is exact");
        }
        let yw = received_vector(&h, &x1, &w).unwrap();
        for i in 0..2 {
            assert!(((yw[i] - y1[i]) - w[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn received_vector_rejects_mismatched_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = sample_channel(2, 2, 1.0, &mut rng).unwrap();
        let x = TxVector::one_sparse(3, 0, Complex64::new(1.0, 0.0)).unwrap();
        assert!(received_vector(&h, &x, &[Complex64::ZERO; 2]).is_err());
        let x = TxVector::one_sparse(2, 0, Complex64::new(1.0, 0.0)).unwrap();
        assert!(received_vector(&h, &x, &[Complex64::ZERO; 3]).is_err());
    }

    #[test]
    fn sample_moments_match_the_model() {
        // 10^5 draws keep this test quick; tolerances are ~4 sigma of the
        // sample statistics (the heavier 10^6-draw checks live in the
        // integration suite).
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 100_000usize;
        let mut pow = 0.0;
        let mut cross = 0.0;
        for _ in 0..n {
            let h = sample_channel(1, 1, 1.0, &mut rng).unwrap();
            let e = h.column(0)[0];
            pow += e.norm_sqr();
            cross += e.re * e.im;
        }
        assert!((pow / n as f64 - 1.0).abs() < 0.02);
        assert!((cross / n as f64).abs() < 0.01);

        let noise = NoiseSpec::new(1.0).unwrap();
        let mut var = 0.0;
        let mut mean = Complex64::ZERO;
        for _ in 0..n {
            let w = sample_noise(1, &noise, &mut rng);
            var += w[0].norm_sqr();
            mean += w[0];
        }
        assert!((var / n as f64 - 1.0).abs() < 0.02);
        assert!((mean / n as f64).norm() < 0.01);
    }
}

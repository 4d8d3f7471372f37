//! Link-level simulator and analytical performance library for a
//! spatial-multiple-access (SMA) downlink.
//!
//! SMA multiplexes two users over one MIMO channel use: UE-1's bits select a
//! point of an M-ary constellation and UE-2's bits select which of the `Nt`
//! transmit antennas radiates it. UE-1 runs M-ary maximum-likelihood detection
//! with maximum-ratio combining; UE-2 runs joint antenna/symbol detection and
//! keeps only the antenna decision. A conventional two-user power-domain NOMA
//! downlink (superposition coding, SIC at the near user) is included as the
//! comparison baseline.
//!
//! The crate provides:
//!
//! - [`modem`]: Gray-labelled constellations, antenna-index mapping, and the
//!   SMA/NOMA transmit symbols.
//! - [`channel`]: i.i.d. Rayleigh MIMO fading and AWGN sampling.
//! - [`detectors`]: the SMA receivers and the NOMA baseline receivers.
//! - [`analytic`]: closed-form average bit error probability, union bound,
//!   ergodic sum rate, and outage probability.
//! - [`montecarlo`]: reproducible Monte Carlo estimation of BER, outage, and
//!   ergodic rate over an SNR grid.
//! - [`config`], [`report`], [`runner`]: scenario files, CSV/plot-script
//!   emission, and the run orchestration behind the `sma` command-line tool.
//!
//! SNR convention: constellations have unit average symbol energy and the
//! per-receive-antenna average SNR `rho` is set through the noise level
//! `N0 = 1/rho`. All randomness is drawn from counter-indexed substreams of a
//! master seed, so results are bit-identical for any worker count.

pub mod analytic;
pub mod channel;
pub mod config;
pub mod detectors;
pub mod modem;
pub mod montecarlo;
pub mod numerics;
pub mod report;
pub mod runner;

pub use num_complex::Complex64;

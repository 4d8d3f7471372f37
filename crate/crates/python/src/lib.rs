//! Python bindings for the SMA link simulator: the Gray-labelled
//! constellations, both users' detectors, every closed-form performance
//! expression, and the reproducible Monte Carlo sweeps.
//!
//! Complex samples cross the boundary as `(re, im)` tuples; curves come back
//! as lists of `(snr_db, estimate, standard_error, trials_used)` tuples.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sma_core::analytic;
use sma_core::channel::ChannelMatrix;
use sma_core::detectors;
use sma_core::modem::{self, ConstellationSpec, PowerSplit};
use sma_core::montecarlo::{self, CurveSeries, Scenario as CoreScenario, Scheme};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn c64(t: (f64, f64)) -> Complex64 {
    Complex64::new(t.0, t.1)
}

fn cvec(v: Vec<(f64, f64)>) -> Vec<Complex64> {
    v.into_iter().map(c64).collect()
}

fn curve(series: &CurveSeries) -> Vec<(f64, f64, f64, u64)> {
    series
        .points
        .iter()
        .map(|p| (p.snr_db, p.estimate, p.standard_error, p.trials_used))
        .collect()
}

/// Gray-labelled unit-energy constellation.
#[pyclass(frozen)]
struct Constellation {
    inner: ConstellationSpec,
}

#[pymethods]
impl Constellation {
    #[staticmethod]
    fn bpsk() -> Self {
        Self { inner: ConstellationSpec::bpsk() }
    }

    #[staticmethod]
    fn qpsk() -> Self {
        Self { inner: ConstellationSpec::qpsk() }
    }

    #[staticmethod]
    fn for_order(m: usize) -> PyResult<Self> {
        Ok(Self { inner: ConstellationSpec::for_order(m).map_err(value_err)? })
    }

    fn m(&self) -> usize {
        self.inner.m()
    }

    fn bits_per_symbol(&self) -> usize {
        self.inner.bits_per_symbol()
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.points().iter().map(|p| (p.re, p.im)).collect()
    }

    fn label_of(&self, n: usize) -> PyResult<u32> {
        self.inner.label_of(n).map_err(value_err)
    }

    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    fn map(&self, bits: Vec<u8>) -> PyResult<usize> {
        modem::map_mary(&bits, &self.inner).map_err(value_err)
    }

    fn demap(&self, n: usize) -> PyResult<Vec<u8>> {
        modem::demap_mary(n, &self.inner).map_err(value_err)
    }

    fn bit_diff(&self, n: usize, n_hat: usize) -> PyResult<u32> {
        modem::bit_diff_count(n, n_hat, &self.inner).map_err(value_err)
    }
}

#[pyfunction]
fn q_function(x: f64) -> PyResult<f64> {
    sma_core::numerics::q_function(x).map_err(value_err)
}

#[pyfunction]
fn exp_integral_ei(x: f64) -> PyResult<f64> {
    sma_core::numerics::exp_integral_ei(x).map_err(value_err)
}

#[pyfunction]
fn binomial(n: u64, k: u64) -> PyResult<u64> {
    sma_core::numerics::binomial(n, k).map_err(value_err)
}

#[pyfunction]
fn map_ssk(bits: Vec<u8>, nt: usize) -> PyResult<usize> {
    modem::map_ssk(&bits, nt).map_err(value_err)
}

#[pyfunction]
fn demap_ssk(j: usize, nt: usize) -> PyResult<Vec<u8>> {
    modem::demap_ssk(j, nt).map_err(value_err)
}

/// SMA transmit vector for the given user bit groups; entries as tuples.
#[pyfunction]
fn encode_sma(q1: Vec<u8>, q2: Vec<u8>, m: usize, nt: usize) -> PyResult<Vec<(f64, f64)>> {
    let spec = ConstellationSpec::for_order(m).map_err(value_err)?;
    let x = modem::encode_sma(&q1, &q2, &spec, nt).map_err(value_err)?;
    Ok(x.entries().iter().map(|e| (e.re, e.im)).collect())
}

#[pyfunction]
fn encode_noma(s1: (f64, f64), s2: (f64, f64), a1: f64, a2: f64) -> PyResult<(f64, f64)> {
    let split = PowerSplit::new(a1, a2).map_err(value_err)?;
    let s = modem::encode_noma(c64(s1), c64(s2), split);
    Ok((s.re, s.im))
}

/// Minimum-distance detection of UE-1's point given the active channel column.
#[pyfunction]
fn detect_ue1(y: Vec<(f64, f64)>, h: Vec<(f64, f64)>, m: usize) -> PyResult<usize> {
    let spec = ConstellationSpec::for_order(m).map_err(value_err)?;
    detectors::detect_ue1(&cvec(y), &cvec(h), &spec).map_err(value_err)
}

/// Joint antenna/symbol detection; `h_columns[j]` is antenna `j`'s gain
/// vector. Returns `(antenna_index, point_index, metric)`.
#[pyfunction]
fn detect_ue2(
    y: Vec<(f64, f64)>,
    h_columns: Vec<Vec<(f64, f64)>>,
    m: usize,
) -> PyResult<(usize, usize, f64)> {
    let spec = ConstellationSpec::for_order(m).map_err(value_err)?;
    let nr = y.len();
    let nt = h_columns.len();
    let mut data = Vec::with_capacity(nr * nt);
    for col in h_columns {
        if col.len() != nr {
            return Err(value_err("every channel column must have len(y) entries"));
        }
        data.extend(cvec(col));
    }
    let h = ChannelMatrix::from_parts(nr, nt, 1.0, data).map_err(value_err)?;
    let r = detectors::detect_ue2(&cvec(y), &h, &spec).map_err(value_err)?;
    Ok((r.antenna_index, r.point_index, r.metric))
}

#[pyfunction]
fn abep_ue1(gamma_bar_1b: f64, nr: usize) -> PyResult<f64> {
    Ok(analytic::abep_ue1(gamma_bar_1b, nr).map_err(value_err)?.value())
}

#[pyfunction]
fn pep_sm(
    rho: f64,
    sigma2_sq: f64,
    xn: (f64, f64),
    xnhat: (f64, f64),
    nr: usize,
    m: usize,
) -> PyResult<f64> {
    analytic::pep_sm(rho, sigma2_sq, c64(xn), c64(xnhat), nr, m).map_err(value_err)
}

/// Returns `(raw, clamped)` union bound on UE-2's bit error probability.
#[pyfunction]
fn union_bound_ue2(
    rho: f64,
    sigma2_sq: f64,
    m: usize,
    nt: usize,
    nr: usize,
) -> PyResult<(f64, f64)> {
    let spec = ConstellationSpec::for_order(m).map_err(value_err)?;
    let b = analytic::union_bound_ue2(rho, sigma2_sq, &spec, nt, nr).map_err(value_err)?;
    Ok((b.raw, b.clamped))
}

#[pyfunction]
fn sma_rates(gamma1: f64, nt: usize) -> PyResult<(f64, f64)> {
    let r = analytic::sma_rates(gamma1, nt).map_err(value_err)?;
    Ok((r.r1, r.r2))
}

#[pyfunction]
fn noma_rates(gamma1: f64, gamma2: f64, a1: f64, a2: f64) -> PyResult<(f64, f64)> {
    let split = PowerSplit::new(a1, a2).map_err(value_err)?;
    let r = analytic::noma_rates(gamma1, gamma2, split).map_err(value_err)?;
    Ok((r.r1, r.r2))
}

#[pyfunction]
fn ergodic_capacity_ue1(gamma_bar: f64, nr: usize) -> PyResult<f64> {
    analytic::ergodic_capacity_ue1(gamma_bar, nr).map_err(value_err)
}

#[pyfunction]
fn ergodic_sum_rate(rho: f64, nr: usize, nt: usize) -> PyResult<f64> {
    analytic::ergodic_sum_rate(rho, nr, nt).map_err(value_err)
}

#[pyfunction]
fn outage_ue1(target: f64, gamma_bar: f64, nr: usize) -> PyResult<f64> {
    Ok(analytic::outage_ue1(target, gamma_bar, nr).map_err(value_err)?.value())
}

#[pyfunction]
fn outage_ue2(target: f64, nt: usize) -> PyResult<f64> {
    Ok(analytic::outage_ue2(target, nt).map_err(value_err)?.value())
}

/// Monte Carlo scenario, mirroring the config-file fields.
#[pyclass(frozen)]
struct Scenario {
    inner: CoreScenario,
}

#[allow(clippy::too_many_arguments)]
#[pymethods]
impl Scenario {
    #[staticmethod]
    #[pyo3(signature = (nt, nr, m, snr_db, trials, seed, sigma1_sq=1.0, sigma2_sq=1.0,
                        target_r1=None, target_r2=None, early_stop_errors=None,
                        fair_comparison=true))]
    fn sma(
        nt: usize,
        nr: usize,
        m: usize,
        snr_db: Vec<f64>,
        trials: u64,
        seed: u64,
        sigma1_sq: f64,
        sigma2_sq: f64,
        target_r1: Option<f64>,
        target_r2: Option<f64>,
        early_stop_errors: Option<u64>,
        fair_comparison: bool,
    ) -> PyResult<Self> {
        let target_rates = match (target_r1, target_r2) {
            (Some(r1), Some(r2)) => {
                Some(analytic::TargetRates::new(r1, r2).map_err(value_err)?)
            }
            (None, None) => None,
            _ => return Err(value_err("target_r1 and target_r2 must be given together")),
        };
        let scn = CoreScenario {
            scheme: Scheme::Sma,
            nt,
            nr,
            m,
            sigma1_sq,
            sigma2_sq,
            power_split: None,
            target_rates,
            snr_grid_db: snr_db,
            trials,
            master_seed: seed,
            early_stop_errors,
            fair_comparison,
        };
        scn.validate().map_err(value_err)?;
        Ok(Self { inner: scn })
    }

    #[staticmethod]
    #[pyo3(signature = (nt, nr, m, a1, a2, snr_db, trials, seed, sigma1_sq=1.0,
                        sigma2_sq=1.0, target_r1=None, target_r2=None,
                        early_stop_errors=None, fair_comparison=true))]
    fn noma(
        nt: usize,
        nr: usize,
        m: usize,
        a1: f64,
        a2: f64,
        snr_db: Vec<f64>,
        trials: u64,
        seed: u64,
        sigma1_sq: f64,
        sigma2_sq: f64,
        target_r1: Option<f64>,
        target_r2: Option<f64>,
        early_stop_errors: Option<u64>,
        fair_comparison: bool,
    ) -> PyResult<Self> {
        let split = PowerSplit::new(a1, a2).map_err(value_err)?;
        let target_rates = match (target_r1, target_r2) {
            (Some(r1), Some(r2)) => {
                Some(analytic::TargetRates::new(r1, r2).map_err(value_err)?)
            }
            (None, None) => None,
            _ => return Err(value_err("target_r1 and target_r2 must be given together")),
        };
        let scn = CoreScenario {
            scheme: Scheme::Noma,
            nt,
            nr,
            m,
            sigma1_sq,
            sigma2_sq,
            power_split: Some(split),
            target_rates,
            snr_grid_db: snr_db,
            trials,
            master_seed: seed,
            early_stop_errors,
            fair_comparison,
        };
        scn.validate().map_err(value_err)?;
        Ok(Self { inner: scn })
    }
}

/// Simulated BER curves `(ue1, ue2)` of a scenario; each a list of
/// `(snr_db, estimate, standard_error, trials_used)`.
#[pyfunction]
fn run_ber(
    py: Python<'_>,
    scenario: &Scenario,
) -> PyResult<(Vec<(f64, f64, f64, u64)>, Vec<(f64, f64, f64, u64)>)> {
    let inner = scenario.inner.clone();
    let res = py
        .detach(move || montecarlo::run_ber(&inner))
        .map_err(value_err)?;
    Ok((curve(&res.ue1), curve(&res.ue2)))
}

/// Simulated outage curves `(ue1, ue2)` of a scenario.
#[pyfunction]
fn run_outage(
    py: Python<'_>,
    scenario: &Scenario,
) -> PyResult<(Vec<(f64, f64, f64, u64)>, Vec<(f64, f64, f64, u64)>)> {
    let inner = scenario.inner.clone();
    let res = py
        .detach(move || montecarlo::run_outage(&inner))
        .map_err(value_err)?;
    Ok((curve(&res.ue1), curve(&res.ue2)))
}

/// Simulated ergodic sum-rate curve of a scenario.
#[pyfunction]
fn run_sum_rate(py: Python<'_>, scenario: &Scenario) -> PyResult<Vec<(f64, f64, f64, u64)>> {
    let inner = scenario.inner.clone();
    let res = py
        .detach(move || montecarlo::run_sum_rate(&inner))
        .map_err(value_err)?;
    Ok(curve(&res))
}

#[pymodule]
fn sma_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Constellation>()?;
    m.add_class::<Scenario>()?;
    m.add_function(wrap_pyfunction!(q_function, m)?)?;
    m.add_function(wrap_pyfunction!(exp_integral_ei, m)?)?;
    m.add_function(wrap_pyfunction!(binomial, m)?)?;
    m.add_function(wrap_pyfunction!(map_ssk, m)?)?;
    m.add_function(wrap_pyfunction!(demap_ssk, m)?)?;
    m.add_function(wrap_pyfunction!(encode_sma, m)?)?;
    m.add_function(wrap_pyfunction!(encode_noma, m)?)?;
    m.add_function(wrap_pyfunction!(detect_ue1, m)?)?;
    m.add_function(wrap_pyfunction!(detect_ue2, m)?)?;
    m.add_function(wrap_pyfunction!(abep_ue1, m)?)?;
    m.add_function(wrap_pyfunction!(pep_sm, m)?)?;
    m.add_function(wrap_pyfunction!(union_bound_ue2, m)?)?;
    m.add_function(wrap_pyfunction!(sma_rates, m)?)?;
    m.add_function(wrap_pyfunction!(noma_rates, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_capacity_ue1, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(outage_ue1, m)?)?;
    m.add_function(wrap_pyfunction!(outage_ue2, m)?)?;
    m.add_function(wrap_pyfunction!(run_ber, m)?)?;
    m.add_function(wrap_pyfunction!(run_outage, m)?)?;
    m.add_function(wrap_pyfunction!(run_sum_rate, m)?)?;
    Ok(())
}

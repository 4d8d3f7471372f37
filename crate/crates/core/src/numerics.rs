//! Special functions and combinatorial helpers used by the closed-form
//! performance expressions.
//!
//! Everything here is pure and stateless.

use thiserror::Error;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A probability value, guaranteed to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    /// Wraps `value`, rejecting anything outside `[0, 1]`.
    pub fn new(value: f64) -> Result<Self, NumericsError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(NumericsError::OutOfUnitInterval(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("argument must be finite, got {0}")]
    NonFinite(f64),
    #[error("exponential integral has a logarithmic singularity at x = 0")]
    SingularAtZero,
    #[error("binomial coefficient requires k <= n, got n = {n}, k = {k}")]
    KExceedsN { n: u64, k: u64 },
    #[error("binomial({n}, {k}) overflows the result type")]
    BinomialOverflow { n: u64, k: u64 },
    #[error("probability {0} lies outside [0, 1]")]
    OutOfUnitInterval(f64),
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
///
/// Evaluated as `erfc(x / sqrt(2)) / 2`; `libm`'s erfc kernel is accurate to
/// a few ulp, which keeps analytic curves usable far below Monte Carlo noise.
pub fn q_function(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::NonFinite(x));
    }
    Ok(0.5 * libm::erfc(x / std::f64::consts::SQRT_2))
}

/// Exponential integral `Ei(x)`.
///
/// For `x < 0` this equals `-E1(-x)`. The evaluation strategy is a power
/// series near the origin and a continued fraction (negative axis) or the
/// asymptotic expansion (large positive axis) elsewhere; the branch points
/// are validated against a quadrature oracle in the test suite.
pub fn exp_integral_ei(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::NonFinite(x));
    }
    if x == 0.0 {
        return Err(NumericsError::SingularAtZero);
    }
    if x < 0.0 {
        Ok(-e1(-x))
    } else if x < 40.0 {
        Ok(ei_series_positive(x))
    } else {
        Ok(ei_asymptotic(x))
    }
}

/// `E1(z)` for `z > 0`.
fn e1(z: f64) -> f64 {
    if z <= 6.0 {
        // Alternating series: E1(z) = -gamma - ln z - sum_k (-z)^k / (k k!).
        let mut sum = 0.0;
        let mut p = 1.0; // (-z)^k / k!
        for k in 1..=120u32 {
            p *= -z / f64::from(k);
            let term = -p / f64::from(k);
            sum += term;
            if term.abs() < 1e-17 * (1.0 + sum.abs()) {
                break;
            }
        }
        -EULER_GAMMA - z.ln() + sum
    } else {
        e1_contfrac_scaled(z) * (-z).exp()
    }
}

/// Modified Lentz continued fraction for `e^z E1(z)`, `z > 6`.
fn e1_contfrac_scaled(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=200u32 {
        let a = -f64::from(i) * f64::from(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Exponentially scaled exponential integral `e^z E1(z)` for `z > 0`.
///
/// The scaled form stays finite for arbitrarily large `z`, where the plain
/// product would overflow through the `e^z` factor.
pub(crate) fn exp_scaled_e1(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z <= 6.0 {
        z.exp() * e1(z)
    } else {
        e1_contfrac_scaled(z)
    }
}

/// Power series for `Ei(x)`, `0 < x < 40`; all terms are positive so there is
/// no cancellation on this range.
fn ei_series_positive(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut p = 1.0; // x^k / k!
    for k in 1..=400u32 {
        p *= x / f64::from(k);
        let term = p / f64::from(k);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

/// Asymptotic expansion `Ei(x) ~ e^x/x sum_k k!/x^k`, truncated at the
/// smallest term. For `x >= 40` the truncation error is below f64 epsilon.
fn ei_asymptotic(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..400u32 {
        let next = term * f64::from(k) / x;
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    x.exp() / x * sum
}

/// Exact binomial coefficient `C(n, k)`.
///
/// Computed with the multiplicative formula over u128 intermediates; a result
/// that does not fit in u64 is reported, never wrapped.
pub fn binomial(n: u64, k: u64) -> Result<u64, NumericsError> {
    if k > n {
        return Err(NumericsError::KExceedsN { n, k });
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul(u128::from(n - k + i))
            .ok_or(NumericsError::BinomialOverflow { n, k })?
            / u128::from(i);
    }
    u64::try_from(acc).map_err(|_| NumericsError::BinomialOverflow { n, k })
}

/// `C(n, k)` as f64, for the small orders used by the closed forms.
pub(crate) fn binomial_f64(n: u64, k: u64) -> f64 {
    binomial(n, k).expect("closed-form binomial orders stay far below overflow") as f64
}

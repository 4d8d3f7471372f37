//! Bit/symbol mapping: Gray-labelled M-ary constellations, antenna-index
//! (SSK) mapping, the single-active-antenna SMA transmit vector, and the
//! superposed NOMA symbol.
//!
//! Labelling conventions, fixed for reproducibility:
//!
//! - PSK rings are ordered counterclockwise starting at angle `pi/4` for
//!   QPSK and `0` otherwise, with reflected-Gray labels along the ring.
//! - Square QAM (M = 16, 64) uses independent reflected-Gray labels per
//!   I/Q axis; the first half of the bits addresses the I axis.
//! - The antenna index is the natural binary value of the SSK bits, MSB
//!   first. Antenna decisions have no distance structure, so a Gray order
//!   would change nothing.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModemError {
    #[error("constellation order {0} must be a power of two >= 2")]
    BadOrder(usize),
    #[error("square QAM supports M in {{16, 64}}, got {0}")]
    UnsupportedQam(usize),
    #[error("expected {expected} bits, got {got}")]
    BadBitLength { expected: usize, got: usize },
    #[error("bit values must be 0 or 1, got {0}")]
    BadBitValue(u8),
    #[error("antenna count {0} must be a power of two >= 1")]
    BadAntennaCount(usize),
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("power split must sum to 1 with a2 > a1 > 0, got a1 = {a1}, a2 = {a2}")]
    BadPowerSplit { a1: f64, a2: f64 },
    #[error("transmit vector must have exactly one nonzero entry")]
    NotOneSparse,
}

/// An M-ary complex constellation with Gray bit labels and the coefficients
/// `(alpha, beta)` of its conditional bit-error-probability approximation
/// `alpha * Q(sqrt(beta * snr_per_bit))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationSpec {
    m: usize,
    points: Vec<Complex64>,
    /// `labels[n]` is the Gray bit label of constellation point `n`.
    labels: Vec<u32>,
    /// `index_of_label[v]` inverts `labels`.
    index_of_label: Vec<usize>,
    alpha: f64,
    beta: f64,
    constant_modulus: bool,
}

impl ConstellationSpec {
    /// Antipodal BPSK: `+1` for bit 0, `-1` for bit 1.
    pub fn bpsk() -> Self {
        Self::psk(2).expect("order 2 is valid")
    }

    /// Gray-coded QPSK anchored at `(1+i)/sqrt(2)`.
    pub fn qpsk() -> Self {
        Self::psk(4).expect("order 4 is valid")
    }

    /// Gray-coded M-PSK ring, unit modulus.
    pub fn psk(m: usize) -> Result<Self, ModemError> {
        if m < 2 || !m.is_power_of_two() {
            return Err(ModemError::BadOrder(m));
        }
        let offset = if m == 4 { std::f64::consts::FRAC_PI_4 } else { 0.0 };
        let points: Vec<Complex64> = (0..m)
            .map(|p| {
                let theta = offset + std::f64::consts::TAU * p as f64 / m as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let labels: Vec<u32> = (0..m as u32).map(gray_encode).collect();
        let (alpha, beta) = psk_bep_coefficients(m);
        Ok(Self::assemble(m, points, labels, alpha, beta))
    }

    /// Gray-coded square QAM, unit average energy. Supported for M = 16, 64.
    pub fn square_qam(m: usize) -> Result<Self, ModemError> {
        if m != 16 && m != 64 {
            return Err(ModemError::UnsupportedQam(m));
        }
        let side = (m as f64).sqrt() as usize;
        let half_bits = side.trailing_zeros();
        // Amplitude levels -(L-1), ..., -1, 1, ..., L-1 scaled to unit mean energy.
        let scale = (3.0 / (2.0 * (m as f64 - 1.0))).sqrt();
        let level = |idx: usize| (2.0 * idx as f64 - (side as f64 - 1.0)) * scale;
        let mut points = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(m);
        for i in 0..side {
            for q in 0..side {
                points.push(Complex64::new(level(i), level(q)));
                labels.push((gray_encode(i as u32) << half_bits) | gray_encode(q as u32));
            }
        }
        let mm = m as f64;
        let bits = (m as f64).log2();
        let alpha = 4.0 * (1.0 - 1.0 / (mm).sqrt()) / bits;
        let beta = 3.0 * bits / (mm - 1.0);
        Ok(Self::assemble(m, points, labels, alpha, beta))
    }

    /// Constellation used for a given order: PSK for M <= 8, square QAM above.
    pub fn for_order(m: usize) -> Result<Self, ModemError> {
        match m {
            2 | 4 | 8 => Self::psk(m),
            16 | 64 => Self::square_qam(m),
            other => Err(ModemError::BadOrder(other)),
        }
    }

    fn assemble(m: usize, points: Vec<Complex64>, labels: Vec<u32>, alpha: f64, beta: f64) -> Self {
        let mut index_of_label = vec![usize::MAX; m];
        for (n, &v) in labels.iter().enumerate() {
            index_of_label[v as usize] = n;
        }
        debug_assert!(index_of_label.iter().all(|&n| n != usize::MAX));
        let mean = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
        debug_assert!((mean - 1.0).abs() < 1e-12, "mean symbol energy {mean}");
        let constant_modulus = points
            .iter()
            .all(|p| (p.norm_sqr() - points[0].norm_sqr()).abs() < 1e-12);
        Self { m, points, labels, index_of_label, alpha, beta, constant_modulus }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.m.trailing_zeros() as usize
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, n: usize) -> Result<Complex64, ModemError> {
        self.points
            .get(n)
            .copied()
            .ok_or(ModemError::IndexOutOfRange { index: n, size: self.m })
    }

    /// Gray bit label of point `n`.
    pub fn label_of(&self, n: usize) -> Result<u32, ModemError> {
        self.labels
            .get(n)
            .copied()
            .ok_or(ModemError::IndexOutOfRange { index: n, size: self.m })
    }

    /// Point index carrying bit label `v`.
    pub fn index_for_label(&self, v: u32) -> Result<usize, ModemError> {
        self.index_of_label
            .get(v as usize)
            .copied()
            .ok_or(ModemError::IndexOutOfRange { index: v as usize, size: self.m })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_constant_modulus(&self) -> bool {
        self.constant_modulus
    }
}

/// `alpha Q(sqrt(beta g))` coefficients per bit for Gray PSK.
fn psk_bep_coefficients(m: usize) -> (f64, f64) {
    match m {
        // Exact for BPSK and Gray QPSK.
        2 | 4 => (1.0, 2.0),
        // Nearest-neighbour approximation for larger rings.
        _ => {
            let bits = (m as f64).log2();
            let s = (std::f64::consts::PI / m as f64).sin();
            (2.0 / bits, 2.0 * bits * s * s)
        }
    }
}

/// The pair (active antenna index, constellation point index) carried by one
/// channel use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmaSymbol {
    pub antenna_index: usize,
    pub point_index: usize,
}

impl SmaSymbol {
    pub fn new(
        antenna_index: usize,
        point_index: usize,
        nt: usize,
        m: usize,
    ) -> Result<Self, ModemError> {
        if antenna_index >= nt {
            return Err(ModemError::IndexOutOfRange { index: antenna_index, size: nt });
        }
        if point_index >= m {
            return Err(ModemError::IndexOutOfRange { index: point_index, size: m });
        }
        Ok(Self { antenna_index, point_index })
    }
}

/// Length-`Nt` transmit vector with exactly one nonzero entry.
#[derive(Debug, Clone, PartialEq)]
pub struct TxVector {
    entries: Vec<Complex64>,
    active_index: usize,
}

impl TxVector {
    /// Builds the vector with `value` at `active_index` and zeros elsewhere.
    pub fn one_sparse(nt: usize, active_index: usize, value: Complex64) -> Result<Self, ModemError> {
        if active_index >= nt {
            return Err(ModemError::IndexOutOfRange { index: active_index, size: nt });
        }
        if value == Complex64::ZERO {
            return Err(ModemError::NotOneSparse);
        }
        let mut entries = vec![Complex64::ZERO; nt];
        entries[active_index] = value;
        Ok(Self { entries, active_index })
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn active_index(&self) -> usize {
        self.active_index
    }

    pub fn active_value(&self) -> Complex64 {
        self.entries[self.active_index]
    }
}

/// Power allocation of the two NOMA users; `a2` belongs to the far user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    a1: f64,
    a2: f64,
}

impl PowerSplit {
    pub fn new(a1: f64, a2: f64) -> Result<Self, ModemError> {
        let valid = a1.is_finite()
            && a2.is_finite()
            && (a1 + a2 - 1.0).abs() <= 1e-12
            && a2 > a1
            && a1 > 0.0;
        if !valid {
            return Err(ModemError::BadPowerSplit { a1, a2 });
        }
        Ok(Self { a1, a2 })
    }

    pub fn a1(self) -> f64 {
        self.a1
    }

    pub fn a2(self) -> f64 {
        self.a2
    }
}

fn check_bits(bits: &[u8], expected: usize) -> Result<(), ModemError> {
    if bits.len() != expected {
        return Err(ModemError::BadBitLength { expected, got: bits.len() });
    }
    if let Some(&b) = bits.iter().find(|&&b| b > 1) {
        return Err(ModemError::BadBitValue(b));
    }
    Ok(())
}

fn bits_to_value(bits: &[u8]) -> u32 {
    bits.iter().fold(0u32, |v, &b| (v << 1) | u32::from(b))
}

fn value_to_bits(value: u32, width: usize) -> Vec<u8> {
    (0..width)
        .rev()
        .map(|i| ((value >> i) & 1) as u8)
        .collect()
}

fn gray_encode(v: u32) -> u32 {
    v ^ (v >> 1)
}

/// Maps `log2(M)` bits to the constellation point index carrying that Gray
/// label; inverse of [`demap_mary`].
pub fn map_mary(q1: &[u8], spec: &ConstellationSpec) -> Result<usize, ModemError> {
    check_bits(q1, spec.bits_per_symbol())?;
    spec.index_for_label(bits_to_value(q1))
}

/// Recovers the bits of constellation point `n`.
pub fn demap_mary(n: usize, spec: &ConstellationSpec) -> Result<Vec<u8>, ModemError> {
    Ok(value_to_bits(spec.label_of(n)?, spec.bits_per_symbol()))
}

/// Maps `log2(Nt)` bits to the active antenna index (natural binary).
pub fn map_ssk(q2: &[u8], nt: usize) -> Result<usize, ModemError> {
    if nt < 1 || !nt.is_power_of_two() {
        return Err(ModemError::BadAntennaCount(nt));
    }
    check_bits(q2, nt.trailing_zeros() as usize)?;
    Ok(bits_to_value(q2) as usize)
}

/// Recovers the bits naming antenna `j`.
pub fn demap_ssk(j: usize, nt: usize) -> Result<Vec<u8>, ModemError> {
    if nt < 1 || !nt.is_power_of_two() {
        return Err(ModemError::BadAntennaCount(nt));
    }
    if j >= nt {
        return Err(ModemError::IndexOutOfRange { index: j, size: nt });
    }
    Ok(value_to_bits(j as u32, nt.trailing_zeros() as usize))
}

/// Builds the SMA transmit vector: UE-1's constellation point at the antenna
/// position selected by UE-2's bits, zeros elsewhere.
pub fn encode_sma(
    q1: &[u8],
    q2: &[u8],
    spec: &ConstellationSpec,
    nt: usize,
) -> Result<TxVector, ModemError> {
    let n = map_mary(q1, spec)?;
    let j = map_ssk(q2, nt)?;
    TxVector::one_sparse(nt, j, spec.point(n)?)
}

/// Superposition-coded NOMA symbol `sqrt(a1) s1 + sqrt(a2) s2`.
pub fn encode_noma(s1: Complex64, s2: Complex64, split: PowerSplit) -> Complex64 {
    split.a1().sqrt() * s1 + split.a2().sqrt() * s2
}

/// Hamming distance of the Gray labels of two constellation points.
pub fn bit_diff_count(n: usize, n_hat: usize, spec: &ConstellationSpec) -> Result<u32, ModemError> {
    Ok((spec.label_of(n)? ^ spec.label_of(n_hat)?).count_ones())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn qpsk_anchor_point() {
        let spec = ConstellationSpec::qpsk();
        let n = map_mary(&[0, 0], &spec).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(spec.point(n).unwrap(), Complex64::new(s, s)));
    }

    #[test]
    fn bpsk_antipodal_convention() {
        let spec = ConstellationSpec::bpsk();
        let p0 = spec.point(map_mary(&[0], &spec).unwrap()).unwrap();
        let p1 = spec.point(map_mary(&[1], &spec).unwrap()).unwrap();
        assert!(close(p0, Complex64::new(1.0, 0.0)));
        assert!(close(p1, Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn qpsk_gray_neighbours_are_90_degrees_apart() {
        let spec = ConstellationSpec::qpsk();
        let a = spec.point(map_mary(&[0, 0], &spec).unwrap()).unwrap();
        let b = spec.point(map_mary(&[0, 1], &spec).unwrap()).unwrap();
        let angle = (b / a).arg().abs();
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < EPS);
    }

    #[test]
    fn unit_mean_energy_for_all_supported_orders() {
        for m in [2usize, 4, 8, 16, 64] {
            let spec = ConstellationSpec::for_order(m).unwrap();
            let mean = spec.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
            assert!((mean - 1.0).abs() < EPS, "M = {m}: mean energy {mean}");
        }
    }

    #[test]
    fn gray_adjacency_on_psk_rings() {
        for m in [2usize, 4, 8] {
            let spec = ConstellationSpec::psk(m).unwrap();
            for p in 0..m {
                let a = spec.label_of(p).unwrap();
                let b = spec.label_of((p + 1) % m).unwrap();
                assert_eq!((a ^ b).count_ones(), 1, "M = {m}, ring position {p}");
            }
        }
    }

    #[test]
    fn qam_axis_neighbours_differ_in_one_bit() {
        let spec = ConstellationSpec::square_qam(16).unwrap();
        let side = 4;
        for i in 0..side {
            for q in 0..side {
                let n = i * side + q;
                if q + 1 < side {
                    let d = bit_diff_count(n, n + 1, &spec).unwrap();
                    assert_eq!(d, 1, "Q-axis neighbour at ({i}, {q})");
                }
                if i + 1 < side {
                    let d = bit_diff_count(n, n + side, &spec).unwrap();
                    assert_eq!(d, 1, "I-axis neighbour at ({i}, {q})");
                }
            }
        }
    }

    #[test]
    fn mappers_round_trip_exhaustively() {
        for m in [2usize, 4, 8, 16, 64] {
            let spec = ConstellationSpec::for_order(m).unwrap();
            for v in 0..m as u32 {
                let bits = value_to_bits(v, spec.bits_per_symbol());
                let n = map_mary(&bits, &spec).unwrap();
                assert_eq!(demap_mary(n, &spec).unwrap(), bits);
            }
        }
        for nt in [1usize, 2, 4, 8, 16, 32, 64] {
            for j in 0..nt {
                let bits = demap_ssk(j, nt).unwrap();
                assert_eq!(map_ssk(&bits, nt).unwrap(), j);
            }
        }
    }

    #[test]
    fn ssk_examples() {
        assert_eq!(map_ssk(&[0, 0], 4).unwrap(), 0);
        assert_eq!(map_ssk(&[1, 1], 4).unwrap(), 3);
        assert_eq!(map_ssk(&[1, 0, 1], 8).unwrap(), 5);
        assert_eq!(demap_ssk(2, 4).unwrap(), vec![1, 0]);
    }

    #[test]
    fn ssk_rejects_bad_input() {
        assert!(matches!(map_ssk(&[0], 3), Err(ModemError::BadAntennaCount(3))));
        assert!(matches!(
            map_ssk(&[0, 1, 1], 4),
            Err(ModemError::BadBitLength { expected: 2, got: 3 })
        ));
        assert!(matches!(map_ssk(&[2, 0], 4), Err(ModemError::BadBitValue(2))));
    }

    #[test]
    fn encode_sma_places_the_point() {
        let spec = ConstellationSpec::qpsk();
        let x = encode_sma(&[0, 0], &[0, 0], &spec, 4).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(x.entries()[0], Complex64::new(s, s)));
        assert!(x.entries()[1..].iter().all(|&e| e == Complex64::ZERO));

        let spec = ConstellationSpec::bpsk();
        let x = encode_sma(&[1], &[1], &spec, 2).unwrap();
        assert!(close(x.entries()[1], Complex64::new(-1.0, 0.0)));
        assert_eq!(x.entries()[0], Complex64::ZERO);
        assert_eq!(x.active_index(), 1);
    }

    #[test]
    fn encode_noma_examples() {
        let split = PowerSplit::new(0.2, 0.8).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let sum = encode_noma(one, one, split);
        assert!((sum.re - 1.341_640_786_499_873_8).abs() < EPS);
        let diff = encode_noma(one, -one, split);
        assert!((diff.re + 0.447_213_595_499_957_94).abs() < EPS);
    }

    #[test]
    fn encode_noma_unit_average_power_over_bpsk_pairs() {
        let split = PowerSplit::new(0.2, 0.8).unwrap();
        let pts = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let mut total = 0.0;
        for s1 in pts {
            for s2 in pts {
                total += encode_noma(s1, s2, split).norm_sqr();
            }
        }
        assert!((total / 4.0 - 1.0).abs() < EPS);
    }

    #[test]
    fn power_split_validation() {
        assert!(PowerSplit::new(0.3, 0.8).is_err());
        assert!(PowerSplit::new(0.5, 0.5).is_err());
        assert!(PowerSplit::new(0.0, 1.0).is_err());
        assert!(PowerSplit::new(0.8, 0.2).is_err());
        assert!(PowerSplit::new(0.2, 0.8).is_ok());
    }

    #[test]
    fn bit_diff_examples() {
        let spec = ConstellationSpec::qpsk();
        for n in 0..4 {
            assert_eq!(bit_diff_count(n, n, &spec).unwrap(), 0);
            assert_eq!(bit_diff_count(n, (n + 1) % 4, &spec).unwrap(), 1);
            assert_eq!(bit_diff_count(n, (n + 2) % 4, &spec).unwrap(), 2);
        }
    }

    #[test]
    fn mary_rejects_wrong_bit_length() {
        let spec = ConstellationSpec::qpsk();
        assert!(matches!(
            map_mary(&[0], &spec),
            Err(ModemError::BadBitLength { expected: 2, got: 1 })
        ));
        assert!(demap_mary(7, &spec).is_err());
    }

    #[test]
    fn bep_coefficients() {
        assert_eq!(ConstellationSpec::bpsk().alpha(), 1.0);
        assert_eq!(ConstellationSpec::bpsk().beta(), 2.0);
        assert_eq!(ConstellationSpec::qpsk().alpha(), 1.0);
        assert_eq!(ConstellationSpec::qpsk().beta(), 2.0);
        let qam = ConstellationSpec::square_qam(16).unwrap();
        assert!((qam.alpha() - 0.75).abs() < EPS);
        assert!((qam.beta() - 0.8).abs() < EPS);
    }

    #[test]
    fn constant_modulus_flag() {
        assert!(ConstellationSpec::psk(8).unwrap().is_constant_modulus());
        assert!(!ConstellationSpec::square_qam(16).unwrap().is_constant_modulus());
    }
}

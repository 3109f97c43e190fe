//! Fixed-point encoding between real vectors and bit strings, plus the
//! gray / inverse-gray transforms that child generation is built on.
//!
//! Every variable is quantized onto an affine grid of `2^b` points spanning
//! `[lo, hi]` inclusive. Each variable's index is written most significant bit
//! first, and the per-variable slices are concatenated in declaration order
//! into a single [`BitString`].

use std::fmt;
use std::str::FromStr;

use crate::error::{DgoError, Result};

/// Largest supported bits-per-variable; grid indices stay exact in an `f64`.
pub const MAX_BITS_PER_VAR: u32 = 52;

/// A concatenated binary vector. Index 0 is the most significant bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(DgoError::EmptyBitString);
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![false; len])
    }

    /// Writes `value` into `len` bits, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Result<Self> {
        let mut bits = vec![false; len];
        write_index(&mut bits, value);
        Self::new(bits)
    }

    /// Reads the whole string as an unsigned integer. Only meaningful for
    /// strings of at most 64 bits.
    pub fn to_u64(&self) -> u64 {
        read_index(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [bool] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Bitwise XOR with another string of the same length.
    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(DgoError::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn to_gray(&self) -> BitString {
        to_gray(self)
    }

    pub fn from_gray(&self) -> BitString {
        from_gray(self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = DgoError;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(DgoError::InvalidParameter(format!(
                    "invalid bit character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

/// `g[0] = s[0]`, `g[k] = s[k-1] ^ s[k]`.
pub fn to_gray(s: &BitString) -> BitString {
    let mut out = s.clone();
    to_gray_in_place(&mut out.0);
    out
}

/// Prefix-XOR scan, the inverse of [`to_gray`].
pub fn from_gray(g: &BitString) -> BitString {
    let mut out = g.clone();
    from_gray_in_place(&mut out.0);
    out
}

pub fn to_gray_in_place(bits: &mut [bool]) {
    // Walk right to left so each step still sees the original left neighbour.
    for k in (1..bits.len()).rev() {
        bits[k] ^= bits[k - 1];
    }
}

pub fn from_gray_in_place(bits: &mut [bool]) {
    for k in 1..bits.len() {
        bits[k] ^= bits[k - 1];
    }
}

fn read_index(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

fn write_index(bits: &mut [bool], mut value: u64) {
    for b in bits.iter_mut().rev() {
        *b = value & 1 == 1;
        value >>= 1;
    }
}

/// Per-dimension bounds plus the bit resolution of every variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    bounds: Vec<(f64, f64)>,
    bits_per_var: u32,
}

impl Quantizer {
    pub fn new(bounds: Vec<(f64, f64)>, bits_per_var: u32) -> Result<Self> {
        if bounds.is_empty() {
            return Err(DgoError::InvalidParameter(
                "quantizer needs at least one dimension".into(),
            ));
        }
        for (dim, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(DgoError::InvalidBounds { dim, lo, hi });
            }
        }
        if bits_per_var == 0 || bits_per_var > MAX_BITS_PER_VAR {
            return Err(DgoError::InvalidResolution {
                bits: bits_per_var,
                max: MAX_BITS_PER_VAR,
            });
        }
        Ok(Self {
            bounds,
            bits_per_var,
        })
    }

    /// Same box at a different resolution.
    pub fn with_bits(&self, bits_per_var: u32) -> Result<Self> {
        Self::new(self.bounds.clone(), bits_per_var)
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn bits_per_var(&self) -> u32 {
        self.bits_per_var
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Total encoded length `dims * bits_per_var`.
    pub fn bit_len(&self) -> usize {
        self.dims() * self.bits_per_var as usize
    }

    pub fn max_index(&self) -> u64 {
        (1u64 << self.bits_per_var) - 1
    }

    /// Distance between adjacent grid points in dimension `dim`.
    pub fn step(&self, dim: usize) -> f64 {
        let (lo, hi) = self.bounds[dim];
        (hi - lo) / self.max_index() as f64
    }

    fn index_of(&self, dim: usize, x: f64) -> u64 {
        let (lo, hi) = self.bounds[dim];
        // NaN clamps to nothing; send it to the lower bound.
        let x = if x.is_nan() { lo } else { x.clamp(lo, hi) };
        let max = self.max_index();
        let k = ((x - lo) / (hi - lo) * max as f64).round();
        (k as u64).min(max)
    }

    fn value_of(&self, dim: usize, k: u64) -> f64 {
        let (lo, hi) = self.bounds[dim];
        let max = self.max_index();
        if k >= max {
            hi
        } else {
            lo + (hi - lo) * (k as f64 / max as f64)
        }
    }

    /// Quantizes `x`, clamping out-of-box coordinates to the bounds.
    pub fn encode(&self, x: &[f64]) -> Result<BitString> {
        if x.len() != self.dims() {
            return Err(DgoError::DimensionMismatch {
                expected: self.dims(),
                actual: x.len(),
            });
        }
        let b = self.bits_per_var as usize;
        let mut bits = vec![false; self.bit_len()];
        for (dim, (&xj, slice)) in x.iter().zip(bits.chunks_mut(b)).enumerate() {
            write_index(slice, self.index_of(dim, xj));
        }
        BitString::new(bits)
    }

    pub fn decode(&self, s: &BitString) -> Result<Vec<f64>> {
        if s.len() != self.bit_len() {
            return Err(DgoError::LengthMismatch {
                expected: self.bit_len(),
                actual: s.len(),
            });
        }
        let mut out = vec![0.0; self.dims()];
        self.decode_into(s.as_slice(), &mut out);
        Ok(out)
    }

    /// Unchecked decode for hot loops; `bits` must be `bit_len()` long and
    /// `out` must hold `dims()` values.
    pub fn decode_into(&self, bits: &[bool], out: &mut [f64]) {
        debug_assert_eq!(bits.len(), self.bit_len());
        debug_assert_eq!(out.len(), self.dims());
        let b = self.bits_per_var as usize;
        for (dim, (slice, o)) in bits.chunks_exact(b).zip(out.iter_mut()).enumerate() {
            *o = self.value_of(dim, read_index(slice));
        }
    }

    /// Grid indices of every dimension.
    pub fn indices(&self, s: &BitString) -> Result<Vec<u64>> {
        if s.len() != self.bit_len() {
            return Err(DgoError::LengthMismatch {
                expected: self.bit_len(),
                actual: s.len(),
            });
        }
        Ok(s.as_slice()
            .chunks_exact(self.bits_per_var as usize)
            .map(read_index)
            .collect())
    }
}

pub fn encode_point(x: &[f64], q: &Quantizer) -> Result<BitString> {
    q.encode(x)
}

pub fn decode_point(s: &BitString, q: &Quantizer) -> Result<Vec<f64>> {
    q.decode(s)
}

/// Re-expresses `s` on the finer grid of `q_new`.
pub fn requantize(s: &BitString, q_old: &Quantizer, q_new: &Quantizer) -> Result<BitString> {
    if q_old.bounds != q_new.bounds {
        return Err(DgoError::IncompatibleQuantizers);
    }
    if q_new.bits_per_var <= q_old.bits_per_var {
        return Err(DgoError::NotFiner {
            from: q_old.bits_per_var,
            to: q_new.bits_per_var,
        });
    }
    q_new.encode(&q_old.decode(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn gray_small_cases() {
        assert_eq!(to_gray(&bs("0000")), bs("0000"));
        assert_eq!(to_gray(&bs("101")), bs("111"));
        assert_eq!(from_gray(&bs("0000")), bs("0000"));
        assert_eq!(from_gray(&bs("111")), bs("101"));
    }

    #[test]
    fn empty_strings_are_rejected() {
        assert_eq!(BitString::new(vec![]), Err(DgoError::EmptyBitString));
        assert!("".parse::<BitString>().is_err());
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn encode_endpoints() {
        let q = Quantizer::new(vec![(-1.0, 1.0)], 4).unwrap();
        assert_eq!(q.encode(&[-1.0]).unwrap(), bs("0000"));
        assert_eq!(q.encode(&[1.0]).unwrap(), bs("1111"));
        // clamped
        assert_eq!(q.encode(&[-7.0]).unwrap(), bs("0000"));
        assert_eq!(q.encode(&[3.5]).unwrap(), bs("1111"));
        assert_eq!(q.encode(&[f64::NAN]).unwrap(), bs("0000"));
    }

    #[test]
    fn encode_affine_rounding() {
        let q = Quantizer::new(vec![(-1.0, 1.0)], 2).unwrap();
        assert_eq!(q.encode(&[-0.34]).unwrap(), bs("01"));
    }

    #[test]
    fn decode_values() {
        let q4 = Quantizer::new(vec![(-1.0, 1.0)], 4).unwrap();
        assert_eq!(q4.decode(&bs("0000")).unwrap(), vec![-1.0]);
        assert_eq!(q4.decode(&bs("1111")).unwrap(), vec![1.0]);
        let q2 = Quantizer::new(vec![(-1.0, 1.0)], 2).unwrap();
        let x = q2.decode(&bs("01")).unwrap()[0];
        assert!((x - (-1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn decode_rejects_wrong_length() {
        let q = Quantizer::new(vec![(0.0, 1.0); 2], 3).unwrap();
        assert!(matches!(
            q.decode(&bs("0101")),
            Err(DgoError::LengthMismatch {
                expected: 6,
                actual: 4
            })
        ));
        assert!(q.encode(&[0.5]).is_err());
    }

    #[test]
    fn multi_dimension_layout_is_msb_first_in_declaration_order() {
        let q = Quantizer::new(vec![(0.0, 3.0), (0.0, 3.0)], 2).unwrap();
        assert_eq!(q.encode(&[1.0, 2.0]).unwrap(), bs("0110"));
        assert_eq!(q.indices(&bs("0110")).unwrap(), vec![1, 2]);
    }

    #[test]
    fn requantize_cases() {
        let q4 = Quantizer::new(vec![(-2.0, 5.0)], 4).unwrap();
        let q5 = q4.with_bits(5).unwrap();
        assert_eq!(requantize(&bs("0000"), &q4, &q5).unwrap(), bs("00000"));
        assert_eq!(requantize(&bs("1111"), &q4, &q5).unwrap(), bs("11111"));

        let q2 = Quantizer::new(vec![(0.0, 1.0)], 2).unwrap();
        let q3 = q2.with_bits(3).unwrap();
        let r = requantize(&bs("01"), &q2, &q3).unwrap();
        assert_eq!(r.to_u64(), 2);
    }

    #[test]
    fn requantize_rejects_coarser_or_mismatched() {
        let q4 = Quantizer::new(vec![(0.0, 1.0)], 4).unwrap();
        let q3 = q4.with_bits(3).unwrap();
        assert!(matches!(
            requantize(&bs("0101"), &q4, &q3),
            Err(DgoError::NotFiner { .. })
        ));
        let other = Quantizer::new(vec![(0.0, 2.0)], 5).unwrap();
        assert_eq!(
            requantize(&bs("0101"), &q4, &other),
            Err(DgoError::IncompatibleQuantizers)
        );
    }

    #[test]
    fn quantizer_validation() {
        assert!(Quantizer::new(vec![], 4).is_err());
        assert!(Quantizer::new(vec![(1.0, 1.0)], 4).is_err());
        assert!(Quantizer::new(vec![(0.0, f64::INFINITY)], 4).is_err());
        assert!(Quantizer::new(vec![(0.0, 1.0)], 0).is_err());
        assert!(Quantizer::new(vec![(0.0, 1.0)], MAX_BITS_PER_VAR + 1).is_err());
        assert!(Quantizer::new(vec![(0.0, 1.0)], MAX_BITS_PER_VAR).is_ok());
    }
}

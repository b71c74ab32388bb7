//! Unit-power symbol alphabets with DVB-S2 bit labels.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Outer to inner ring radius ratio of 16APSK (DVB-S2, rate 3/4).
pub const APSK16_RING_RATIO: f64 = 2.85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Qpsk,
    Psk8,
    Apsk16,
}

impl Modulation {
    pub const ALL: [Modulation; 3] = [Modulation::Qpsk, Modulation::Psk8, Modulation::Apsk16];

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Qpsk => "qpsk",
            Modulation::Psk8 => "8psk",
            Modulation::Apsk16 => "16apsk",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Modulation::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or(Error::Config("unknown constellation (expected qpsk, 8psk or 16apsk)"))
    }
}

/// A symbol alphabet. Point `i` carries the bit pattern `labels[i]`
/// (most significant bit first).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    modulation: Modulation,
    points: Vec<Complex64>,
    labels: Vec<u8>,
    bits_per_symbol: usize,
    // label -> point index
    by_label: Vec<u8>,
}

impl Constellation {
    pub fn new(modulation: Modulation) -> Self {
        match modulation {
            Modulation::Qpsk => {
                // Points at π/4 + kπ/2.
                let points = (0..4)
                    .map(|k| Complex64::from_polar(1.0, PI / 4.0 + k as f64 * PI / 2.0))
                    .collect();
                Self::from_table(modulation, points, &[0b00, 0b10, 0b11, 0b01])
            }
            Modulation::Psk8 => {
                // Points at kπ/4.
                let points = (0..8)
                    .map(|k| Complex64::from_polar(1.0, k as f64 * PI / 4.0))
                    .collect();
                Self::from_table(
                    modulation,
                    points,
                    &[0b001, 0b000, 0b100, 0b110, 0b010, 0b011, 0b111, 0b101],
                )
            }
            Modulation::Apsk16 => {
                // 4 inner points at π/4 + kπ/2, then 12 outer points at π/12 + kπ/6.
                let r1 = (16.0 / (4.0 + 12.0 * APSK16_RING_RATIO * APSK16_RING_RATIO)).sqrt();
                let r2 = APSK16_RING_RATIO * r1;
                let inner = (0..4).map(|k| Complex64::from_polar(r1, PI / 4.0 + k as f64 * PI / 2.0));
                let outer = (0..12).map(|k| Complex64::from_polar(r2, PI / 12.0 + k as f64 * PI / 6.0));
                Self::from_table(
                    modulation,
                    inner.chain(outer).collect(),
                    &[
                        0b1100, 0b1110, 0b1111, 0b1101, // inner ring
                        0b0100, 0b0000, 0b1000, 0b1010, 0b0010, 0b0110, //
                        0b0111, 0b0011, 0b1011, 0b1001, 0b0001, 0b0101,
                    ],
                )
            }
        }
    }

    fn from_table(modulation: Modulation, points: Vec<Complex64>, labels: &[u8]) -> Self {
        let size = points.len();
        let mut by_label = alloc::vec![u8::MAX; size];
        for (i, &l) in labels.iter().enumerate() {
            by_label[l as usize] = i as u8;
        }
        Self {
            modulation,
            points,
            labels: labels.to_vec(),
            bits_per_symbol: size.trailing_zeros() as usize,
            by_label,
        }
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    #[inline]
    pub fn point(&self, index: u8) -> Complex64 {
        self.points[index as usize]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Alphabet size `|ω|`.
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Point index carrying `label`.
    pub fn index_of_label(&self, label: u8) -> u8 {
        self.by_label[label as usize]
    }

    /// Maps bits (one `bool` per bit, MSB first within each symbol) to symbol indices.
    pub fn modulate_indices(&self, bits: &[bool]) -> Result<Vec<u8>> {
        let b = self.bits_per_symbol;
        if bits.len() % b != 0 {
            return Err(Error::Framing {
                bits: bits.len(),
                bits_per_symbol: b,
            });
        }
        Ok(bits
            .chunks(b)
            .map(|chunk| {
                let label = chunk.iter().fold(0u8, |acc, &bit| (acc << 1) | bit as u8);
                self.index_of_label(label)
            })
            .collect())
    }

    /// Maps bits to complex symbols.
    pub fn modulate(&self, bits: &[bool]) -> Result<Vec<Complex64>> {
        Ok(self
            .modulate_indices(bits)?
            .into_iter()
            .map(|i| self.point(i))
            .collect())
    }

    /// Nearest point; ties go to the lowest index.
    pub fn demap_hard(&self, y: Complex64) -> u8 {
        let mut best = 0u8;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i as u8;
            }
        }
        best
    }

    /// Hamming distance between the labels of two point indices.
    #[inline]
    pub fn bit_errors(&self, sent: u8, detected: u8) -> u32 {
        (self.labels[sent as usize] ^ self.labels[detected as usize]).count_ones()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all() -> Vec<Constellation> {
        Modulation::ALL.into_iter().map(Constellation::new).collect()
    }

    #[test]
    fn unit_power_zero_mean_distinct() {
        for c in all() {
            let n = c.size() as f64;
            let power: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / n;
            let mean: Complex64 = c.points().iter().sum::<Complex64>() / n;
            assert!((power - 1.0).abs() < 1e-12, "{}", c.modulation());
            assert!(mean.norm() < 1e-12);
            for i in 0..c.size() {
                for j in i + 1..c.size() {
                    assert!((c.points()[i] - c.points()[j]).norm() > 1e-3);
                }
            }
            let mut labels = c.labels().to_vec();
            labels.sort_unstable();
            assert_eq!(labels, (0..c.size() as u8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn apsk_ring_ratio() {
        let c = Constellation::new(Modulation::Apsk16);
        assert!((c.points()[4].norm() / c.points()[0].norm() - APSK16_RING_RATIO).abs() < 1e-12);
    }

    #[test]
    fn psk_rings_are_gray() {
        for m in [Modulation::Qpsk, Modulation::Psk8] {
            let c = Constellation::new(m);
            let n = c.size() as u8;
            for k in 0..n {
                assert_eq!(c.bit_errors(k, (k + 1) % n), 1, "{m}");
            }
        }
        // Outer 16APSK ring is Gray as well.
        let c = Constellation::new(Modulation::Apsk16);
        for k in 0..12u8 {
            assert_eq!(c.bit_errors(4 + k, 4 + (k + 1) % 12), 1);
        }
    }

    #[test]
    fn modulate_label_lookup() {
        let c = Constellation::new(Modulation::Qpsk);
        let idx = c.modulate_indices(&[false, false]).unwrap();
        assert_eq!(c.labels()[idx[0] as usize], 0);
        assert_eq!(
            c.modulate(&[true, false, true]).unwrap_err(),
            Error::Framing {
                bits: 3,
                bits_per_symbol: 2
            }
        );
    }

    #[test]
    fn label_sweep_hits_every_point_and_round_trips() {
        for c in all() {
            let b = c.bits_per_symbol();
            let bits: Vec<bool> = (0..c.size())
                .flat_map(|label| (0..b).rev().map(move |k| (label >> k) & 1 == 1))
                .collect();
            let mut idx = c.modulate_indices(&bits).unwrap();
            let symbols = c.modulate(&bits).unwrap();
            let demapped: Vec<u8> = symbols.iter().map(|&y| c.demap_hard(y)).collect();
            assert_eq!(demapped, idx);
            idx.sort_unstable();
            assert_eq!(idx, (0..c.size() as u8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn demap_ties_and_exact_points() {
        let c = Constellation::new(Modulation::Psk8);
        assert_eq!(c.demap_hard(Complex64::new(0.0, 0.0)), 0);
        for (i, &p) in c.points().iter().enumerate() {
            assert_eq!(c.demap_hard(p), i as u8);
        }
    }

    #[test]
    fn demap_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for c in all() {
            for _ in 0..10_000 {
                let y = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let dists: Vec<f64> = c.points().iter().map(|p| (y - p).norm()).collect();
                let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
                let expected = dists.iter().position(|&d| d == min).unwrap() as u8;
                assert_eq!(c.demap_hard(y), expected);
            }
        }
    }

    #[test]
    fn bit_error_counting_identity() {
        for c in all() {
            let n = c.size() as u8;
            let total: u32 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| c.bit_errors(i, j))
                .sum();
            assert_eq!(total as usize, c.size() * c.size() * c.bits_per_symbol() / 2);
            assert!((0..n).all(|i| c.bit_errors(i, i) == 0));
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("8PSK".parse::<Modulation>().unwrap(), Modulation::Psk8);
        assert_eq!("16apsk".parse::<Modulation>().unwrap(), Modulation::Apsk16);
        assert!("64qam".parse::<Modulation>().is_err());
    }
}

//! Left matrix scramble plus random shift.

use rand::Rng;

use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftKind {
    /// XOR of a uniform random digit vector (base-2 shift).
    #[default]
    Digital,
    /// Addition of a uniform random real modulo 1.
    CranleyPatterson,
}

/// Per-dimension lower-triangular unit-diagonal binary matrices and shifts.
///
/// Row `k` of a matrix is stored as a bit mask over the digit positions of a
/// `bits`-wide integer, where digit 1 is the most significant bit. Output
/// digit `k` is the parity of `row_k & x`, so it depends only on input digits
/// `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmsShiftRandomization {
    bits: u32,
    rows: Vec<Vec<u32>>,
    shifts: Vec<u32>,
    kind: ShiftKind,
}

impl LmsShiftRandomization {
    /// Independent scramble and shift per dimension, drawn from substreams
    /// keyed by `(seed, dimension)`.
    pub fn new(seed: u64, dim: usize, bits: u32, kind: ShiftKind) -> Self {
        assert!((1..=32).contains(&bits), "bit depth must be in 1..=32");
        let full = low_mask(bits);
        let rows = (0..dim)
            .map(|j| {
                let mut rng = seed::rng(seed, j as u64, Stream::Scramble);
                (0..bits)
                    .map(|k| {
                        let diag = 1u32 << (bits - 1 - k);
                        // Strictly more significant digit positions.
                        let above = full & !low_mask(bits - k);
                        diag | (rng.random::<u32>() & above)
                    })
                    .collect()
            })
            .collect();
        let shifts = (0..dim)
            .map(|j| seed::rng(seed, j as u64, Stream::Shift).random::<u32>() & full)
            .collect();
        Self {
            bits,
            rows,
            shifts,
            kind,
        }
    }

    /// Identity matrices and zero shifts.
    pub fn identity(dim: usize, bits: u32) -> Self {
        Self {
            bits,
            rows: vec![identity_rows(bits); dim],
            shifts: vec![0; dim],
            kind: ShiftKind::Digital,
        }
    }

    /// Identity matrices with the given shifts, as digit vectors of width `bits`.
    pub fn shift_only(kind: ShiftKind, shifts: Vec<u32>, bits: u32) -> Self {
        Self {
            bits,
            rows: vec![identity_rows(bits); shifts.len()],
            shifts: shifts.into_iter().map(|s| s & low_mask(bits)).collect(),
            kind,
        }
    }

    /// Scramble only; shifts are zero.
    pub fn without_shift(mut self) -> Self {
        self.shifts.iter_mut().for_each(|s| *s = 0);
        self
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn shift_kind(&self) -> ShiftKind {
        self.kind
    }

    /// Row masks of dimension `j` (0-based).
    pub fn matrix(&self, j: usize) -> &[u32] {
        &self.rows[j]
    }

    /// `L_j x` over GF(2).
    pub fn scramble(&self, j: usize, x: u32) -> u32 {
        self.rows[j].iter().enumerate().fold(0, |acc, (k, &row)| {
            acc | (((row & x).count_ones() & 1) << (self.bits - 1 - k as u32))
        })
    }

    pub fn digital_shift(&self, j: usize) -> u32 {
        self.shifts[j]
    }

    /// The shift of dimension `j` as a real in `[0, 1)`.
    pub fn real_shift(&self, j: usize) -> f64 {
        self.shifts[j] as f64 / (1u64 << self.bits) as f64
    }
}

fn low_mask(bits: u32) -> u32 {
    if bits >= 32 {
        u32::MAX
    } else {
        (1u32 << bits) - 1
    }
}

fn identity_rows(bits: u32) -> Vec<u32> {
    (0..bits).map(|k| 1u32 << (bits - 1 - k)).collect()
}

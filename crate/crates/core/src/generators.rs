//! Classical constructions: Fibonacci lattices, Halton and Hammersley sets.

use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// The golden ratio conjugate `(√5 − 1) / 2`.
pub const PHI_CONJ: f64 = 0.618_033_988_749_894_9;

const PRIMES: [u64; 17] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
];

pub const MAX_HALTON_DIM: usize = 16;
pub const MAX_HAMMERSLEY_DIM: usize = 17;

/// Placement of the two-dimensional Fibonacci-type lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FibonacciVariant {
    /// `((i + ½)/n, {iφ})`: the plain initializer.
    #[default]
    Centered,
    /// `(i/n, {iφ})`: anchored at the origin.
    Unshifted,
    /// `((i + ½)/n, {iφ + ½/n})`: both axes offset by half a cell.
    Shifted,
}

impl std::str::FromStr for FibonacciVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centered" => Ok(Self::Centered),
            "unshifted" => Ok(Self::Unshifted),
            "shifted" => Ok(Self::Shifted),
            other => Err(Error::invalid(format!(
                "unknown Fibonacci variant `{other}` (expected centered, unshifted or shifted)"
            ))),
        }
    }
}

/// `n`-point lattice `((i + ½)/n, {iφ})`, `i = 0..n`.
pub fn fibonacci_lattice(n: usize) -> Result<PointSet> {
    fibonacci_lattice_with(n, FibonacciVariant::Centered)
}

pub fn fibonacci_lattice_with(n: usize, variant: FibonacciVariant) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::invalid("Fibonacci lattice needs at least one point"));
    }
    let nf = n as f64;
    let mut coords = Vec::with_capacity(2 * n);
    for i in 0..n {
        let fi = i as f64;
        let (x, y) = match variant {
            FibonacciVariant::Centered => ((fi + 0.5) / nf, (fi * PHI_CONJ).fract()),
            FibonacciVariant::Unshifted => (fi / nf, (fi * PHI_CONJ).fract()),
            FibonacciVariant::Shifted => ((fi + 0.5) / nf, (fi * PHI_CONJ + 0.5 / nf).fract()),
        };
        coords.push(x);
        coords.push(y);
    }
    PointSet::new(2, coords)
}

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(index: u64, base: u64) -> f64 {
    debug_assert!(base >= 2);
    let mut i = index as u128;
    let b = base as u128;
    let mut reversed: u128 = 0;
    let mut denom: u128 = 1;
    while i > 0 {
        reversed = reversed * b + i % b;
        denom *= b;
        i /= b;
    }
    reversed as f64 / denom as f64
}

/// Halton points `start_index .. start_index + n` in the first `dim` prime bases.
pub fn halton_points(n: usize, dim: usize, start_index: u64) -> Result<PointSet> {
    if dim == 0 || dim > MAX_HALTON_DIM {
        return Err(Error::invalid(format!(
            "Halton dimension must be in 1..={MAX_HALTON_DIM}, got {dim}"
        )));
    }
    let mut coords = Vec::with_capacity(n * dim);
    for i in 0..n as u64 {
        let idx = start_index + i;
        coords.extend(PRIMES[..dim].iter().map(|&b| radical_inverse(idx, b)));
    }
    PointSet::new(dim, coords)
}

/// Hammersley set: `(i/n, φ_2(i), φ_3(i), …)`.
pub fn hammersley_points(n: usize, dim: usize) -> Result<PointSet> {
    if !(2..=MAX_HAMMERSLEY_DIM).contains(&dim) {
        return Err(Error::invalid(format!(
            "Hammersley dimension must be in 2..={MAX_HAMMERSLEY_DIM}, got {dim}"
        )));
    }
    let mut coords = Vec::with_capacity(n * dim);
    for i in 0..n {
        coords.push(i as f64 / n as f64);
        coords.extend(
            PRIMES[..dim - 1]
                .iter()
                .map(|&b| radical_inverse(i as u64, b)),
        );
    }
    PointSet::new(dim, coords)
}

//! Sobol' sequences.
//!
//! Direction numbers come from a [`DirectionTable`]: the Joe–Kuo parameters
//! for dimensions 2..=32, a variant with evolved parameters for dimensions
//! 4–6, or any file in the Joe–Kuo text format. Points are produced in Gray
//! code order, so consecutive points differ by a single XOR.

mod randomize;
mod table;

pub use randomize::{LmsShiftRandomization, ShiftKind};
pub use table::{
    expand_directions, load_direction_table, parse_joe_kuo, van_der_corput_directions,
    DirectionEntry, DirectionSource, DirectionTable, BUILTIN_MAX_DIM, DEFAULT_BITS,
};

use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Streaming generator over a fixed set of (possibly randomized) dimensions.
#[derive(Debug, Clone)]
pub struct SobolGenerator {
    bits: u32,
    /// `dirs[j][k]` is direction integer `k + 1` of dimension `j + 1`.
    dirs: Vec<Vec<u32>>,
    digital_shift: Vec<u32>,
    /// Mod-1 shift added after the digital part, if any.
    real_shift: Option<Vec<f64>>,
}

impl SobolGenerator {
    /// Unrandomized generator for the first `dim` dimensions of `table`.
    pub fn new(table: &DirectionTable, dim: usize) -> Result<Self> {
        check_dim(table, dim)?;
        Ok(Self {
            bits: table.bits(),
            dirs: (1..=dim).map(|j| table.directions(j).to_vec()).collect(),
            digital_shift: vec![0; dim],
            real_shift: None,
        })
    }

    /// Generator whose points are `L_j x ⊕ e_j` (then `+ s_j mod 1` for a
    /// Cranley–Patterson shift) per dimension. The scramble is applied to the
    /// direction integers, which is equivalent because `L_j` is linear over
    /// GF(2).
    pub fn randomized(
        table: &DirectionTable,
        dim: usize,
        rand: &LmsShiftRandomization,
    ) -> Result<Self> {
        check_dim(table, dim)?;
        if rand.dim() < dim || rand.bits() != table.bits() {
            return Err(Error::invalid(format!(
                "randomization covers {} dimensions at {} bits, need {dim} at {}",
                rand.dim(),
                rand.bits(),
                table.bits()
            )));
        }
        let dirs = (1..=dim)
            .map(|j| {
                table
                    .directions(j)
                    .iter()
                    .map(|&v| rand.scramble(j - 1, v))
                    .collect()
            })
            .collect();
        let (digital_shift, real_shift) = match rand.shift_kind() {
            ShiftKind::Digital => ((0..dim).map(|j| rand.digital_shift(j)).collect(), None),
            ShiftKind::CranleyPatterson => (
                vec![0; dim],
                Some((0..dim).map(|j| rand.real_shift(j)).collect()),
            ),
        };
        Ok(Self {
            bits: table.bits(),
            dirs,
            digital_shift,
            real_shift,
        })
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Largest supported point count, `2^bits`.
    pub fn capacity(&self) -> u64 {
        1u64 << self.bits
    }

    /// Writes points `start .. start + count` row-major into `out`.
    pub fn fill(&self, start: u64, count: usize, out: &mut [f64]) {
        let dim = self.dim();
        assert_eq!(out.len(), count * dim, "output buffer has wrong length");
        assert!(
            start + count as u64 <= self.capacity(),
            "index range exceeds 2^bits"
        );
        if count == 0 {
            return;
        }
        let scale = 1.0 / self.capacity() as f64;
        let gray = start ^ (start >> 1);
        let mut state: Vec<u32> = self
            .dirs
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(k, _)| (gray >> k) & 1 == 1)
                    .fold(0, |acc, (_, &d)| acc ^ d)
            })
            .collect();
        for (row, i) in out.chunks_exact_mut(dim).zip(start..) {
            if i > start {
                let k = i.trailing_zeros() as usize;
                for (s, v) in state.iter_mut().zip(&self.dirs) {
                    *s ^= v[k];
                }
            }
            for (j, c) in row.iter_mut().enumerate() {
                let mut u = (state[j] ^ self.digital_shift[j]) as f64 * scale;
                if let Some(shift) = &self.real_shift {
                    u += shift[j];
                    if u >= 1.0 {
                        u -= 1.0;
                    }
                }
                *c = u;
            }
        }
    }

    /// The first `n` points as a point set.
    pub fn points(&self, n: usize) -> Result<PointSet> {
        if n as u64 > self.capacity() {
            return Err(Error::invalid(format!(
                "{n} points exceed the 2^{} capacity of the direction table",
                self.bits
            )));
        }
        let mut coords = vec![0.0; n * self.dim()];
        self.fill(0, n, &mut coords);
        PointSet::new(self.dim(), coords)
    }
}

fn check_dim(table: &DirectionTable, dim: usize) -> Result<()> {
    if dim == 0 || dim > table.max_dim() {
        return Err(Error::invalid(format!(
            "dimension {dim} outside the table range 1..={}",
            table.max_dim()
        )));
    }
    Ok(())
}

/// First `n` points of the unrandomized sequence in `dim` dimensions.
pub fn sobol_points(table: &DirectionTable, n: usize, dim: usize) -> Result<PointSet> {
    SobolGenerator::new(table, dim)?.points(n)
}

/// First `n` points after a seeded left-matrix scramble and digital shift.
pub fn randomized_sobol_points(
    table: &DirectionTable,
    n: usize,
    dim: usize,
    seed: u64,
) -> Result<PointSet> {
    let rand = LmsShiftRandomization::new(seed, dim, table.bits(), ShiftKind::Digital);
    SobolGenerator::randomized(table, dim, &rand)?.points(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jk() -> DirectionTable {
        load_direction_table(&DirectionSource::JoeKuo, 32).unwrap()
    }

    #[test]
    fn first_dimension_is_van_der_corput_in_gray_order() {
        let ps = sobol_points(&jk(), 4, 1).unwrap();
        assert_eq!(ps.coords(), &[0.0, 0.5, 0.75, 0.25]);
    }

    #[test]
    fn second_dimension_first_points() {
        let ps = sobol_points(&jk(), 4, 2).unwrap();
        assert_eq!(ps.coords(), &[0.0, 0.0, 0.5, 0.5, 0.75, 0.25, 0.25, 0.75]);
    }

    #[test]
    fn single_point_is_origin() {
        let ps = sobol_points(&jk(), 1, 32).unwrap();
        assert!(ps.coords().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn fill_from_offset_matches_prefix() {
        let g = SobolGenerator::new(&jk(), 7).unwrap();
        let all = g.points(100).unwrap();
        let mut tail = vec![0.0; 37 * 7];
        g.fill(63, 37, &mut tail);
        assert_eq!(&all.coords()[63 * 7..], &tail[..]);
    }

    #[test]
    fn rejects_dimension_beyond_table() {
        assert!(sobol_points(&jk(), 4, 33).is_err());
        assert!(sobol_points(&jk(), 4, 0).is_err());
        let small = jk().with_bits(3).unwrap();
        assert!(sobol_points(&small, 9, 1).is_err());
        assert!(sobol_points(&small, 8, 1).is_ok());
    }

    #[test]
    fn identity_randomization_is_noop() {
        let t = jk();
        let id = LmsShiftRandomization::identity(5, t.bits());
        let g = SobolGenerator::randomized(&t, 5, &id).unwrap();
        assert_eq!(g.points(64).unwrap(), sobol_points(&t, 64, 5).unwrap());
    }

    #[test]
    fn shift_of_one_half_maps_quarter_to_three_quarters() {
        let t = jk();
        for kind in [ShiftKind::Digital, ShiftKind::CranleyPatterson] {
            let r = LmsShiftRandomization::shift_only(kind, vec![1 << 31], t.bits());
            let g = SobolGenerator::randomized(&t, 1, &r).unwrap();
            let ps = g.points(4).unwrap();
            assert_eq!(ps.coords()[3], 0.75, "{kind:?}");
        }
    }

    #[test]
    fn randomized_points_are_reproducible() {
        let t = jk();
        let a = randomized_sobol_points(&t, 128, 32, 42).unwrap();
        let b = randomized_sobol_points(&t, 128, 32, 42).unwrap();
        let c = randomized_sobol_points(&t, 128, 32, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

//! Point sets in the unit cube and their text file format.
//!
//! ```text
//! # pointset d=2 n=2
//! 0.50000000000000000 0
//! 0.25000000000000000 0.75000000000000000
//! ```
//!
//! Rows hold `d` space-separated decimals. Lines starting with `#` after the
//! header are comments. Coordinates are written with 17 significant digits so
//! every `f64` survives a round trip unchanged.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Coordinates within this distance outside `[0, 1]` are clipped on load.
pub const CLIP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from row-major coordinates, rejecting anything
    /// outside `[0, 1]`.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        Self::build(dim, coords, 0.0)
    }

    /// Like [`PointSet::new`] but clips values within [`CLIP_SLACK`] of the
    /// unit interval.
    pub fn with_slack(dim: usize, coords: Vec<f64>) -> Result<Self> {
        Self::build(dim, coords, CLIP_SLACK)
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    fn build(dim: usize, mut coords: Vec<f64>, slack: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("point set dimension must be at least 1"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not form whole {dim}-dimensional points",
                coords.len()
            )));
        }
        for (idx, c) in coords.iter_mut().enumerate() {
            let out_of_range = || Error::OutOfRange {
                point: idx / dim,
                axis: idx % dim,
                value: *c,
            };
            if !c.is_finite() || *c < -slack || *c > 1.0 + slack {
                return Err(out_of_range());
            }
            *c = c.clamp(0.0, 1.0);
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Column `axis` as a vector.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.points().map(|p| p[axis]).collect()
    }

    /// Renders the file representation.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(32 + self.coords.len() * 20);
        let _ = writeln!(out, "# pointset d={} n={}", self.dim, self.len());
        for p in self.points() {
            for (j, &c) in p.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                out.push_str(&format_coord(c));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the file representation. `origin` only labels diagnostics.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header".into()))?;
        let (dim, n) = parse_header(header).ok_or_else(|| {
            parse_err(
                1,
                format!("expected `# pointset d=<dim> n=<n>`, found `{header}`"),
            )
        })?;
        if dim == 0 {
            return Err(parse_err(1, "dimension must be at least 1".into()));
        }

        let mut coords = Vec::with_capacity(n.saturating_mul(dim).min(1 << 24));
        let mut rows = 0usize;
        for (idx, line) in lines {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.starts_with('#') || (trimmed.is_empty() && line.is_empty()) {
                continue;
            }
            if rows == n {
                return Err(parse_err(
                    line_no,
                    format!("header declares {n} rows but more follow"),
                ));
            }
            let before = coords.len();
            for tok in line.split(' ') {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("non-numeric token `{tok}`")))?;
                coords.push(v);
            }
            if coords.len() - before != dim {
                return Err(parse_err(
                    line_no,
                    format!("expected {dim} values, found {}", coords.len() - before),
                ));
            }
            rows += 1;
        }
        if rows != n {
            return Err(parse_err(
                text.lines().count().max(1),
                format!("header declares {n} rows, found {rows}"),
            ));
        }
        Self::with_slack(dim, coords)
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    if it.next()? != "#" || it.next()? != "pointset" {
        return None;
    }
    let dim = it.next()?.strip_prefix("d=")?.parse().ok()?;
    let n = it.next()?.strip_prefix("n=")?.parse().ok()?;
    it.next().is_none().then_some((dim, n))
}

/// 17 significant digits in positional notation; scientific below 1e-5.
fn format_coord(c: f64) -> String {
    if c == 0.0 {
        return "0".to_string();
    }
    if c.abs() < 1e-5 {
        return format!("{c:.16e}");
    }
    let leading_zeros = (-c.abs().log10().floor() - 1.0).max(0.0) as usize;
    let int_digits = if c.abs() >= 1.0 { 1 } else { 0 };
    format!("{c:.*}", 17 - int_digits + leading_zeros)
}

pub fn load_point_set(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    PointSet::parse(&text, path)
}

pub fn save_point_set(ps: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, ps.to_text()).map_err(|e| Error::io(path, e))
}

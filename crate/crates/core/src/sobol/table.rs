use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Bit depth of direction integers unless a table is re-expanded.
pub const DEFAULT_BITS: u32 = 32;

/// Dimensions covered by both built-in tables.
pub const BUILTIN_MAX_DIM: usize = 32;

const JOE_KUO_32: &str = include_str!("new-joe-kuo-32.txt");

/// Dimensions 4, 5 and 6 of the evolved parameter set; every other
/// dimension keeps its Joe–Kuo entry.
const EVOLVED: [(usize, u32, u32, [u32; 4]); 3] = [
    (4, 3, 1, [1, 3, 5, 0]),
    (5, 3, 2, [1, 3, 7, 0]),
    (6, 4, 1, [1, 1, 3, 7]),
];

/// Primitive polynomial and initial direction numbers for one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionEntry {
    /// 1-based dimension index, at least 2.
    pub dim_index: usize,
    /// Polynomial degree `s`.
    pub degree: u32,
    /// Interior polynomial coefficients packed with `a_1` as the most
    /// significant of `s − 1` bits.
    pub coeffs: u32,
    /// `m_1 … m_s`, each odd with `m_k < 2^k`.
    pub initial: Vec<u32>,
}

impl DirectionEntry {
    pub fn new(dim_index: usize, degree: u32, coeffs: u32, initial: Vec<u32>) -> Result<Self> {
        let entry = Self {
            dim_index,
            degree,
            coeffs,
            initial,
        };
        entry.validate()?;
        Ok(entry)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Error::InvalidDirection {
            dim: self.dim_index,
            message,
        };
        if self.dim_index < 2 {
            return Err(bad("dimension index must be at least 2".into()));
        }
        if !(1..=30).contains(&self.degree) {
            return Err(bad(format!("degree {} outside 1..=30", self.degree)));
        }
        if self.coeffs >= 1 << (self.degree - 1) {
            return Err(bad(format!(
                "coefficient mask {} does not fit in {} bits",
                self.coeffs,
                self.degree - 1
            )));
        }
        if self.initial.len() != self.degree as usize {
            return Err(bad(format!(
                "expected {} direction numbers, found {}",
                self.degree,
                self.initial.len()
            )));
        }
        for (k, &m) in (1..).zip(&self.initial) {
            if m % 2 == 0 {
                return Err(bad(format!("m_{k} = {m} is even")));
            }
            if u64::from(m) >= 1u64 << k {
                return Err(bad(format!("m_{k} = {m} is not below 2^{k}")));
            }
        }
        Ok(())
    }

    /// Coefficient `a_i` for `i = 1 … s − 1`.
    fn coeff(&self, i: u32) -> u64 {
        u64::from((self.coeffs >> (self.degree - 1 - i)) & 1)
    }
}

/// Direction integers `v_1 … v_bits` of one dimension, scaled by `2^bits`.
///
/// The first `s` come from `m_k · 2^(bits − k)`; the rest follow
/// `v_k = v_{k−s} ⊕ (v_{k−s} ≫ s) ⊕ a_1 v_{k−1} ⊕ … ⊕ a_{s−1} v_{k−s+1}`.
pub fn expand_directions(entry: &DirectionEntry, bits: u32) -> Result<Vec<u64>> {
    if !(1..=64).contains(&bits) {
        return Err(Error::invalid(format!("bit depth {bits} outside 1..=64")));
    }
    entry.validate()?;
    let s = entry.degree as usize;
    let b = bits as usize;
    let mut v = vec![0u64; b];
    for k in 0..b.min(s) {
        v[k] = u64::from(entry.initial[k]) << (b - 1 - k);
    }
    for k in s..b {
        let mut x = v[k - s] ^ (v[k - s] >> s);
        for i in 1..s {
            x ^= entry.coeff(i as u32) * v[k - i];
        }
        v[k] = x;
    }
    Ok(v)
}

/// Directions of the first dimension: `v_k = 2^(bits − k)`.
pub fn van_der_corput_directions(bits: u32) -> Vec<u64> {
    (1..=bits).map(|k| 1u64 << (bits - k)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectionSource {
    JoeKuo,
    Llm,
    File(PathBuf),
}

impl DirectionSource {
    pub fn label(&self) -> String {
        match self {
            DirectionSource::JoeKuo => "joe-kuo".into(),
            DirectionSource::Llm => "llm".into(),
            DirectionSource::File(p) => p.display().to_string(),
        }
    }
}

impl std::str::FromStr for DirectionSource {
    type Err = std::convert::Infallible;

    /// `builtin-joe-kuo` / `joe-kuo`, `builtin-llm` / `llm`, otherwise a path.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "builtin-joe-kuo" | "joe-kuo" => DirectionSource::JoeKuo,
            "builtin-llm" | "llm" => DirectionSource::Llm,
            path => DirectionSource::File(PathBuf::from(path)),
        })
    }
}

/// Parameters for dimensions `2..=max_dim` together with their expanded
/// direction integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionTable {
    entries: Vec<DirectionEntry>,
    bits: u32,
    /// `v[j]` holds the directions of dimension `j + 1`.
    v: Vec<Vec<u32>>,
}

impl DirectionTable {
    /// Builds a table from entries for dimensions `2, 3, …` in order.
    pub fn from_entries(entries: Vec<DirectionEntry>, bits: u32) -> Result<Self> {
        if !(1..=32).contains(&bits) {
            return Err(Error::invalid(format!(
                "table bit depth {bits} outside 1..=32"
            )));
        }
        let mut v = Vec::with_capacity(entries.len() + 1);
        v.push(narrow(van_der_corput_directions(bits)));
        for (expected, entry) in (2..).zip(&entries) {
            if entry.dim_index != expected {
                return Err(Error::InvalidDirection {
                    dim: entry.dim_index,
                    message: format!("expected dimension {expected} at this position"),
                });
            }
            v.push(narrow(expand_directions(entry, bits)?));
        }
        Ok(Self { entries, bits, v })
    }

    /// The same parameters expanded at another bit depth.
    pub fn with_bits(&self, bits: u32) -> Result<Self> {
        Self::from_entries(self.entries.clone(), bits)
    }

    pub fn max_dim(&self) -> usize {
        self.v.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Direction integers of 1-based dimension `dim`.
    pub fn directions(&self, dim: usize) -> &[u32] {
        &self.v[dim - 1]
    }

    /// Parameters of 1-based dimension `dim`; `None` for dimension 1.
    pub fn entry(&self, dim: usize) -> Option<&DirectionEntry> {
        dim.checked_sub(2).and_then(|i| self.entries.get(i))
    }

    pub fn entries(&self) -> &[DirectionEntry] {
        &self.entries
    }

    /// Serializes in the Joe–Kuo text format.
    pub fn to_joe_kuo_text(&self) -> String {
        let mut out = String::from("d s a m_i\n");
        for e in &self.entries {
            let _ = write!(out, "{} {} {}", e.dim_index, e.degree, e.coeffs);
            for m in &e.initial {
                let _ = write!(out, " {m}");
            }
            out.push('\n');
        }
        out
    }
}

fn narrow(v: Vec<u64>) -> Vec<u32> {
    v.into_iter().map(|x| x as u32).collect()
}

/// Parses a Joe–Kuo direction-number file: a header line, then
/// `d s a m_1 … m_s` per line.
pub fn parse_joe_kuo(text: &str, origin: &Path) -> Result<Vec<DirectionEntry>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<u64> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| parse_err(line_no, format!("non-integer token `{t}`")))
            })
            .collect::<Result<_>>()?;
        if fields.len() < 4 {
            return Err(parse_err(line_no, "expected `d s a m_1 … m_s`".into()));
        }
        let narrow = |x: u64| {
            u32::try_from(x).map_err(|_| parse_err(line_no, format!("value {x} too large")))
        };
        let dim = fields[0] as usize;
        let degree = narrow(fields[1])?;
        let coeffs = narrow(fields[2])?;
        let initial = fields[3..]
            .iter()
            .map(|&x| narrow(x))
            .collect::<Result<Vec<_>>>()?;
        let expected = entries.len() + 2;
        if dim != expected {
            return Err(parse_err(
                line_no,
                format!("expected dimension {expected}, found {dim}"),
            ));
        }
        entries.push(DirectionEntry::new(dim, degree, coeffs, initial)?);
    }
    Ok(entries)
}

/// Loads a table covering dimensions `1..=max_dim` at [`DEFAULT_BITS`].
pub fn load_direction_table(source: &DirectionSource, max_dim: usize) -> Result<DirectionTable> {
    if max_dim == 0 {
        return Err(Error::invalid("max_dim must be at least 1"));
    }
    let mut entries = match source {
        DirectionSource::JoeKuo => builtin_joe_kuo(),
        DirectionSource::Llm => {
            let mut entries = builtin_joe_kuo();
            for (dim, degree, coeffs, m) in EVOLVED {
                entries[dim - 2] =
                    DirectionEntry::new(dim, degree, coeffs, m[..degree as usize].to_vec())
                        .expect("evolved entries are valid");
            }
            entries
        }
        DirectionSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_joe_kuo(&text, path)?
        }
    };
    let available = entries.len() + 1;
    if max_dim > available {
        return Err(Error::invalid(format!(
            "requested {max_dim} dimensions but {} provides {available}",
            source.label()
        )));
    }
    entries.truncate(max_dim - 1);
    DirectionTable::from_entries(entries, DEFAULT_BITS)
}

fn builtin_joe_kuo() -> Vec<DirectionEntry> {
    parse_joe_kuo(JOE_KUO_32, Path::new("<builtin joe-kuo>")).expect("built-in table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fractions(v: &[u64], bits: u32) -> Vec<f64> {
        v.iter()
            .map(|&x| x as f64 / (1u64 << bits) as f64)
            .collect()
    }

    #[test]
    fn recurrence_for_degree_one() {
        let e = DirectionEntry::new(2, 1, 0, vec![1]).unwrap();
        let v = expand_directions(&e, 3).unwrap();
        assert_eq!(fractions(&v, 3), vec![0.5, 0.75, 0.625]);
    }

    #[test]
    fn initial_numbers_pass_through() {
        let e = DirectionEntry::new(4, 3, 1, vec![1, 3, 5]).unwrap();
        let v = expand_directions(&e, 3).unwrap();
        assert_eq!(fractions(&v, 3), vec![0.5, 0.75, 0.625]);
        assert_eq!(
            fractions(&van_der_corput_directions(3), 3),
            vec![0.5, 0.25, 0.125]
        );
    }

    #[test]
    fn recurrence_matches_joe_kuo_reference_loop() {
        // Dimension 7 of the Joe–Kuo table: s = 4, a = 4, m = 1 3 5 13.
        let e = DirectionEntry::new(7, 4, 4, vec![1, 3, 5, 13]).unwrap();
        let v = expand_directions(&e, 32).unwrap();
        // Reference loop as published with the Joe–Kuo data files.
        let (s, a) = (4usize, 4u64);
        let mut r = [0u64; 33];
        for i in 1..=s {
            r[i] = [1u64, 3, 5, 13][i - 1] << (32 - i);
        }
        for i in s + 1..=32 {
            r[i] = r[i - s] ^ (r[i - s] >> s);
            for k in 1..s {
                r[i] ^= ((a >> (s - 1 - k)) & 1) * r[i - k];
            }
        }
        assert_eq!(v, r[1..].to_vec());
    }

    #[test]
    fn entry_validation() {
        assert!(DirectionEntry::new(2, 1, 0, vec![2]).is_err());
        assert!(DirectionEntry::new(3, 2, 2, vec![1, 1]).is_err());
        assert!(DirectionEntry::new(3, 2, 1, vec![1, 5]).is_err());
        assert!(DirectionEntry::new(3, 2, 1, vec![1]).is_err());
        assert!(DirectionEntry::new(1, 1, 0, vec![1]).is_err());
        assert!(DirectionEntry::new(3, 31, 0, vec![1; 31]).is_err());
    }

    #[test]
    fn parses_file_rows() {
        let text = "d s a m_i\n2 1 0 1\n3 2 1 1 3\n4 3 1 1 3 1\n5 3 2 1 1 1\n6 4 1 1 1 3 3\n7 4 4 1 3 5 5\n";
        let entries = parse_joe_kuo(text, Path::new("t")).unwrap();
        assert_eq!(
            entries[5],
            DirectionEntry {
                dim_index: 7,
                degree: 4,
                coeffs: 4,
                initial: vec![1, 3, 5, 5]
            }
        );
        assert!(parse_joe_kuo("d s a m_i\n3 1 0 1\n", Path::new("t")).is_err());
        assert!(parse_joe_kuo("d s a m_i\n2 1 0 2\n", Path::new("t")).is_err());
        assert!(parse_joe_kuo("d s a m_i\n2 1 0 x\n", Path::new("t")).is_err());
    }

    #[test]
    fn builtin_tables() {
        let jk = load_direction_table(&DirectionSource::JoeKuo, 32).unwrap();
        let llm = load_direction_table(&DirectionSource::Llm, 32).unwrap();
        assert_eq!(jk.max_dim(), 32);
        assert_eq!(llm.entry(4).unwrap().initial, vec![1, 3, 5]);
        assert_eq!(llm.entry(6).unwrap().initial, vec![1, 1, 3, 7]);
        for dim in 1..=32 {
            let same = jk.directions(dim) == llm.directions(dim);
            assert_eq!(same, !(4..=6).contains(&dim), "dimension {dim}");
        }
        assert!(load_direction_table(&DirectionSource::JoeKuo, 33).is_err());
        assert_eq!(
            load_direction_table(&DirectionSource::Llm, 5)
                .unwrap()
                .max_dim(),
            5
        );
    }

    #[test]
    fn text_round_trip() {
        let jk = load_direction_table(&DirectionSource::JoeKuo, 32).unwrap();
        let parsed = parse_joe_kuo(&jk.to_joe_kuo_text(), Path::new("t")).unwrap();
        assert_eq!(parsed, jk.entries());
    }
}

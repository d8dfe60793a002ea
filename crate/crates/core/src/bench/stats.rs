//! Error decomposition and the paired tests used to compare methods.

use crate::error::{Error, Result};
use crate::finance::norm_cdf;
use crate::par::compensated_sum;

/// Largest number of nonzero differences handled with the exact null
/// distribution; above it the normal approximation is used.
pub const EXACT_MAX: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseParts {
    pub bias_sq: f64,
    pub variance: f64,
    pub mse: f64,
}

/// Squared bias, population variance and mean squared error of
/// `estimates` against `truth`.
pub fn mse_decompose(estimates: &[f64], truth: f64) -> Result<MseParts> {
    if estimates.len() < 2 {
        return Err(Error::invalid(
            "MSE decomposition needs at least 2 estimates",
        ));
    }
    let m = estimates.len() as f64;
    let mean = compensated_sum(estimates.iter().copied()) / m;
    let variance = compensated_sum(estimates.iter().map(|e| (e - mean) * (e - mean))) / m;
    let mse = compensated_sum(estimates.iter().map(|e| (e - truth) * (e - truth))) / m;
    Ok(MseParts {
        bias_sq: (mean - truth) * (mean - truth),
        variance,
        mse,
    })
}

/// Direction of a one-sided test on `d = b - a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// Median of `b - a` is negative (`b` tends to be smaller).
    Less,
    /// Median of `b - a` is positive.
    Greater,
}

/// Wilcoxon signed-rank p-value for paired samples against the
/// alternative `median(b - a) < 0`.
pub fn wilcoxon_one_sided(a: &[f64], b: &[f64]) -> Result<f64> {
    wilcoxon_signed_rank(a, b, Alternative::Less)
}

/// One-sided Wilcoxon signed-rank test on `d = b - a`.
///
/// Zero differences take part in the ranking and then contribute to neither
/// sign (Pratt). The null distribution is exact for up to [`EXACT_MAX`]
/// nonzero differences and normal, with continuity correction and midrank
/// variance, beyond that.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alt: Alternative) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 5 {
        return Err(Error::invalid(
            "the signed-rank test needs at least 5 pairs",
        ));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    if d.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("differences contain NaN"));
    }
    let ranks = doubled_midranks(&d);
    let nonzero: Vec<(u64, bool)> = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v != 0.0)
        .map(|(v, &r)| (r, *v > 0.0))
        .collect();
    if nonzero.is_empty() {
        return Ok(1.0);
    }
    // Statistic in doubled units: twice the positive rank sum.
    let t2: u64 = nonzero.iter().filter(|(_, pos)| *pos).map(|(r, _)| r).sum();
    let p = if nonzero.len() <= EXACT_MAX {
        let r2: Vec<u64> = nonzero.iter().map(|(r, _)| *r).collect();
        let pmf = null_pmf(&r2);
        let t2 = t2 as usize;
        match alt {
            Alternative::Less => pmf[..=t2].iter().sum::<f64>(),
            Alternative::Greater => pmf[t2..].iter().sum::<f64>(),
        }
    } else {
        let t = t2 as f64 / 2.0;
        let mean = nonzero.iter().map(|(r, _)| *r as f64 / 2.0).sum::<f64>() / 2.0;
        let var = nonzero
            .iter()
            .map(|(r, _)| (*r as f64 / 2.0).powi(2))
            .sum::<f64>()
            / 4.0;
        let sd = var.sqrt();
        match alt {
            Alternative::Less => norm_cdf((t - mean + 0.5) / sd),
            Alternative::Greater => norm_cdf((mean - t + 0.5) / sd),
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Twice the midranks of `|d|` (so ties stay integral).
fn doubled_midranks(d: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs()));
    let mut ranks = vec![0u64; d.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && d[order[end]].abs() == d[order[start]].abs() {
            end += 1;
        }
        // Positions start+1 ..= end share the rank (start + 1 + end) / 2.
        let r2 = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = r2;
        }
        start = end;
    }
    ranks
}

/// Null distribution of the sum of a random subset of `weights`, each
/// included with probability 1/2, indexed by the sum.
fn null_pmf(weights: &[u64]) -> Vec<f64> {
    let total: u64 = weights.iter().sum();
    let mut pmf = vec![0.0f64; total as usize + 1];
    pmf[0] = 1.0;
    let mut reach = 0usize;
    for &w in weights {
        let w = w as usize;
        for s in (0..=reach).rev() {
            let p = pmf[s];
            if p != 0.0 {
                pmf[s + w] += p * 0.5;
                pmf[s] = p * 0.5;
            }
        }
        reach += w;
    }
    pmf
}

/// Benjamini–Hochberg step-up adjusted p-values, in input order.
pub fn bh_adjust(pvals: &[f64]) -> Result<Vec<f64>> {
    if let Some(p) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid(format!("p-value {p} outside [0, 1]")));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pvals[i].total_cmp(&pvals[j]));
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        // Ratio first, so the top rank multiplies by exactly 1.
        running = running.min(pvals[i] * (m as f64 / (rank + 1) as f64));
        adjusted[i] = running;
    }
    Ok(adjusted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_examples() {
        let p = mse_decompose(&[1.0, 3.0], 2.0).unwrap();
        assert_eq!((p.bias_sq, p.variance, p.mse), (0.0, 1.0, 1.0));
        let p = mse_decompose(&[2.0, 2.0], 3.0).unwrap();
        assert_eq!((p.bias_sq, p.variance, p.mse), (1.0, 0.0, 1.0));
        let p = mse_decompose(&[5.0; 4], 5.0).unwrap();
        assert_eq!((p.bias_sq, p.variance, p.mse), (0.0, 0.0, 0.0));
        assert!(mse_decompose(&[1.0], 1.0).is_err());
    }

    #[test]
    fn all_negative_differences() {
        let a = [5.0, 6.0, 7.0, 8.0, 9.0];
        let b = [4.0, 4.0, 4.0, 4.0, 4.0];
        assert_eq!(wilcoxon_one_sided(&a, &b).unwrap(), 1.0 / 32.0);
        assert_eq!(
            wilcoxon_signed_rank(&a, &b, Alternative::Greater).unwrap(),
            1.0
        );
    }

    #[test]
    fn zero_differences_give_no_evidence() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(wilcoxon_one_sided(&a, &a).unwrap(), 1.0);
        assert!(wilcoxon_one_sided(&a, &a[..4]).is_err());
        assert!(wilcoxon_one_sided(&a[..4], &a[..4]).is_err());
    }

    #[test]
    fn midranks_handle_ties() {
        assert_eq!(doubled_midranks(&[0.0, -1.0, 1.0, 2.0]), vec![2, 5, 5, 8]);
    }

    #[test]
    fn pmf_sums_to_one() {
        let pmf = null_pmf(&[2, 4, 6, 8]);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(pmf[0], 1.0 / 16.0);
        assert_eq!(pmf[10], 2.0 / 16.0);
    }

    #[test]
    fn bh_examples() {
        let adj = bh_adjust(&[0.01, 0.04, 0.03]).unwrap();
        for (a, b) in adj.iter().zip([0.03, 0.04, 0.04]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(bh_adjust(&[0.2]).unwrap(), vec![0.2]);
        assert_eq!(bh_adjust(&[0.3; 4]).unwrap(), vec![0.3; 4]);
        assert!(bh_adjust(&[1.5]).is_err());
        assert!(bh_adjust(&[]).unwrap().is_empty());
    }
}

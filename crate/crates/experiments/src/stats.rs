//! Log-log rate fits and ratio statistics.

use crate::error::{Error, Result};
use crate::report::RatioSummary;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation from the fitted line in log space.
    pub residual: f64,
}

/// Least squares on `(ln h, ln value)`.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: points.len() });
    }
    if let Some(&(h, value)) = points.iter().find(|(h, v)| !(*v > 0.0) || !(*h > 0.0)) {
        return Err(Error::NonPositive { h, value });
    }
    let xs: Vec<f64> = points.iter().map(|(h, _)| h.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
    Ok(RateFit { slope, intercept, residual })
}

/// Ranks with ties averaged, 1-based.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; `None` when either side is constant or fewer than 3 points.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Summary of a ratio sequence indexed by `n`.
pub fn ratio_summary(label: impl Into<String>, series: &[(usize, f64)]) -> RatioSummary {
    let values: Vec<f64> = series.iter().map(|(_, v)| *v).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let med = median(&values);
    let ns: Vec<f64> = series.iter().map(|(n, _)| *n as f64).collect();
    RatioSummary {
        label: label.into(),
        count: values.len(),
        min,
        max,
        median: med,
        spread: max / min,
        max_over_median: max / med,
        spearman: spearman(&ns, &values),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (0.01 * i as f64, (0.01 * i as f64).powi(2))).collect();
        let fit = rate_fit(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-10);
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (0.1 * i as f64, 3.0 * (0.1 * i as f64).sqrt())).collect();
        let fit = rate_fit(&pts).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_preconditions() {
        assert!(matches!(rate_fit(&[(1.0, 1.0); 3]), Err(Error::TooFewPoints { .. })));
        assert!(matches!(rate_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(spearman(&x, &[2.0, 4.0, 8.0, 16.0, 32.0]), Some(1.0));
        assert_eq!(spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        // One adjacent swap: 1 - 6*2/(5*24) = 0.9.
        assert!((spearman(&x, &[1.0, 3.0, 2.0, 4.0, 5.0]).unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(spearman(&x, &[1.0; 5]), None);
    }

    #[test]
    fn summary_of_constant_ratios() {
        let s = ratio_summary("c", &[(4, 2.0), (8, 2.0), (16, 2.0)]);
        assert_eq!(s.spread, 1.0);
        assert_eq!(s.max_over_median, 1.0);
        assert_eq!(s.spearman, None);
    }

    proptest! {
        #[test]
        fn slope_recovers_exponent(beta in -3.0..3.0f64, c in 0.1..10.0f64) {
            let pts: Vec<(f64, f64)> = (0..8).map(|i| { let h = 1e-3 * 2f64.powi(i); (h, c * h.powf(beta)) }).collect();
            let fit = rate_fit(&pts).unwrap();
            prop_assert!((fit.slope - beta).abs() < 1e-9);
        }

        #[test]
        fn spearman_is_bounded(v in prop::collection::vec(-1e3..1e3f64, 3..20)) {
            let x: Vec<f64> = (0..v.len()).map(|i| i as f64).collect();
            if let Some(r) = spearman(&x, &v) {
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
            }
        }
    }
}

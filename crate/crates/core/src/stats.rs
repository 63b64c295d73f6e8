//! Small shared statistics helpers used across the analysis modules.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n-1 denominator); 0 for fewer than 2 points.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

/// Pearson correlation of two equal-length series. `None` when either
/// series has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Pairwise correlation matrix of the columns of a T x N matrix.
/// Zero-variance columns get unit diagonal and zero off-diagonals.
pub fn correlation_matrix(columns: &[Vec<f64>]) -> DMatrix<f64> {
    let n = columns.len();
    let mut c = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = pearson(&columns[i], &columns[j]).unwrap_or(0.0);
            c[(i, j)] = r;
            c[(j, i)] = r;
        }
    }
    c
}

/// Empirical quantile with linear interpolation between order statistics
/// (the convention many statistical environments call "type 7").
pub fn quantile_type7(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::validation("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::validation(format!("quantile level {q} outside [0,1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in quantile input"));
    let n = sorted.len();
    if n == 1 {
        return Ok(sorted[0]);
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Round half away from zero at `dp` decimal places. Used for report
/// emission where printed tables fix the precision.
pub fn round_dp(x: f64, dp: u32) -> f64 {
    let scale = 10f64.powi(dp as i32);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quantile_interpolates() {
        let v = vec![1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(quantile_type7(&v, 0.5).unwrap(), 2.5);
        assert_abs_diff_eq!(quantile_type7(&v, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(quantile_type7(&v, 1.0).unwrap(), 4.0);
        // pos = 0.85 * 3 = 2.55 -> 3 + 0.55
        assert_abs_diff_eq!(quantile_type7(&v, 0.85).unwrap(), 3.55, epsilon = 1e-12);
    }

    #[test]
    fn pearson_perfect_and_degenerate() {
        let x = vec![1.0, 2.0, 3.0];
        let y = vec![2.0, 4.0, 6.0];
        assert_abs_diff_eq!(pearson(&x, &y).unwrap(), 1.0, epsilon = 1e-12);
        let c = vec![5.0, 5.0, 5.0];
        assert!(pearson(&x, &c).is_none());
    }

    #[test]
    fn round_half_away() {
        assert_abs_diff_eq!(round_dp(0.3155, 3), 0.316);
        assert_abs_diff_eq!(round_dp(20.35, 1), 20.4, epsilon = 1e-12);
        assert_abs_diff_eq!(round_dp(-0.0015, 3), -0.002, epsilon = 1e-12);
    }
}

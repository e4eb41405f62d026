//! Small regression helpers shared by extinction estimation and rate fits.

use crate::error::FdeError;

/// Ordinary least squares y ≈ a + b·x with the coefficient of determination.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

pub fn ols(samples: &[(f64, f64)]) -> Result<LineFit, FdeError> {
    let n = samples.len();
    if n < 2 {
        return Err(FdeError::Estimation(format!(
            "need at least 2 points for a line fit, got {n}"
        )));
    }
    let nf = n as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in samples {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(FdeError::Estimation("degenerate fit: all x identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    // Perfectly flat data is a perfect fit of a flat line.
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / sxx / syy).min(1.0) };
    Ok(LineFit { intercept, slope, r2 })
}

/// Median-of-pairwise-slopes (Theil–Sen) with the OLS intercept convention;
/// robust alternative for noisy tails, available behind a flag.
pub fn median_slopes(samples: &[(f64, f64)]) -> Result<LineFit, FdeError> {
    let n = samples.len();
    if n < 2 {
        return Err(FdeError::Estimation(format!(
            "need at least 2 points for a slope estimate, got {n}"
        )));
    }
    let mut slopes = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = samples[j].0 - samples[i].0;
            if dx != 0.0 {
                slopes.push((samples[j].1 - samples[i].1) / dx);
            }
        }
    }
    if slopes.is_empty() {
        return Err(FdeError::Estimation("degenerate fit: all x identical".into()));
    }
    slopes.sort_by(|a, b| a.total_cmp(b));
    let slope = if slopes.len() % 2 == 1 {
        slopes[slopes.len() / 2]
    } else {
        0.5 * (slopes[slopes.len() / 2 - 1] + slopes[slopes.len() / 2])
    };
    let nf = n as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let intercept = mean_y - slope * mean_x;
    // Report R² of the robust line for comparability with OLS output.
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(x, y) in samples {
        ss_res += (y - intercept - slope * x).powi(2);
        ss_tot += (y - mean_y).powi(2);
    }
    let r2 = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(LineFit { intercept, slope, r2 })
}

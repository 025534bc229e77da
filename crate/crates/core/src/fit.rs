//! Least-squares power-law fits on log-log data.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Ordinary least squares y = slope·x + intercept.
pub fn least_squares(points: &[(f64, f64)]) -> LineFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    LineFit { slope, intercept, residual: (ss / n).sqrt() }
}

/// Fit of log(error) against log(t). Every error must lie in [100·tol, 1e-2].
pub fn fit_order(ts: &[f64], errors: &[f64], oracle_tol: f64) -> Result<LineFit> {
    if ts.len() != errors.len() {
        return Err(Error::invalid("grid and error lengths differ"));
    }
    if ts.len() < 5 {
        return Err(Error::Window(format!("need at least 5 points, got {}", ts.len())));
    }
    let lo = 100.0 * oracle_tol;
    if let Some((t, e)) = ts.iter().zip(errors).find(|(_, &e)| !(e >= lo && e <= 1e-2)) {
        return Err(Error::Window(format!("error {e:.3e} at t={t} outside [{lo:.1e}, 1e-2]")));
    }
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::invalid("times must be positive"));
    }
    Ok(fit_power_law(ts, errors))
}

/// Fit restricted to the points inside the trusted window.
#[derive(Clone, Debug, Serialize)]
pub struct WindowFit {
    pub fit: LineFit,
    /// Indices of the points that entered the fit.
    pub used: Vec<usize>,
}

/// Like `fit_order`, but points outside [100·tol, 1e-2] are dropped instead of rejected.
pub fn fit_order_windowed(ts: &[f64], errors: &[f64], oracle_tol: f64) -> Result<WindowFit> {
    if ts.len() != errors.len() {
        return Err(Error::invalid("grid and error lengths differ"));
    }
    let lo = 100.0 * oracle_tol;
    let used: Vec<usize> = (0..ts.len()).filter(|&i| errors[i] >= lo && errors[i] <= 1e-2).collect();
    let t: Vec<f64> = used.iter().map(|&i| ts[i]).collect();
    let e: Vec<f64> = used.iter().map(|&i| errors[i]).collect();
    let fit = fit_order(&t, &e, oracle_tol)?;
    Ok(WindowFit { fit, used })
}

/// log-log least squares with no window check.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> LineFit {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    least_squares(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windowed_fit_drops_outliers() {
        let ts: Vec<f64> = (0..8).map(|k| 0.01 * 2f64.powi(k)).collect();
        let es: Vec<f64> = ts.iter().map(|t| 0.01 * t * t).collect();
        let w = fit_order_windowed(&ts, &es, 1e-12).unwrap();
        assert_eq!(w.used, vec![0, 1, 2, 3, 4, 5, 6]);
        assert!((w.fit.slope - 2.0).abs() < 1e-12);
        assert!(matches!(fit_order_windowed(&ts[..4], &es[..4], 1e-12), Err(Error::Window(_))));
    }

    #[test]
    fn exact_power_law() {
        let ts: Vec<f64> = (0..6).map(|k| 0.01 * 1.5f64.powi(k)).collect();
        let es: Vec<f64> = ts.iter().map(|t| 0.3 * t * t * t).collect();
        let f = fit_order(&ts, &es, 1e-14).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-10);
        assert!((f.intercept - 0.3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn window_is_enforced() {
        let ts = [0.1, 0.2, 0.3, 0.4, 0.5];
        assert!(matches!(fit_order(&ts, &[1e-3, 1e-3, 1e-3, 1e-3, 0.5], 1e-12), Err(Error::Window(_))));
        assert!(matches!(fit_order(&ts, &[1e-3, 1e-3, 1e-3, 1e-3, 1e-11], 1e-12), Err(Error::Window(_))));
        assert!(matches!(fit_order(&ts[..4], &[1e-3; 4], 1e-12), Err(Error::Window(_))));
    }
}

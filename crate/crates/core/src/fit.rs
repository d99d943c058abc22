//! Log-log decay fits for oscillation profiles.

use serde::Serialize;

/// Ordinary least squares `y ≈ slope·x + intercept`; `None` for fewer than two
/// distinct abscissae.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Coefficient of determination of a linear fit.
pub fn r_squared(xs: &[f64], ys: &[f64], slope: f64, intercept: f64) -> f64 {
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Minimum number of finite points needed on a side of `r = 1`.
pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideFit {
    pub slope: f64,
    pub r2: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub below: Option<SideFit>,
    pub above: Option<SideFit>,
}

impl DecayFit {
    pub fn slope_below(&self) -> Option<f64> {
        self.below.map(|s| s.slope)
    }

    pub fn slope_above(&self) -> Option<f64> {
        self.above.map(|s| s.slope)
    }
}

fn fit_side(points: &[(f64, f64)]) -> Option<SideFit> {
    let finite: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    if finite.len() < MIN_POINTS {
        return None;
    }
    let xs: Vec<f64> = finite.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = finite.iter().map(|p| p.1).collect();
    let (slope, b) = least_squares(&xs, &ys)?;
    Some(SideFit { slope, r2: r_squared(&xs, &ys, slope, b), points: xs.len() })
}

/// Least-squares slopes of `(log r, log osc)` on each side of `log r = 0`.
/// A point at `log r = 0` belongs to both sides. Sides with fewer than
/// [`MIN_POINTS`] finite points (for instance an all-zero profile) are `None`.
pub fn fit_decay(profile: &[(f64, f64)]) -> DecayFit {
    let below: Vec<(f64, f64)> = profile.iter().copied().filter(|p| p.0 <= 0.0).collect();
    let above: Vec<(f64, f64)> = profile.iter().copied().filter(|p| p.0 >= 0.0).collect();
    DecayFit { below: fit_side(&below), above: fit_side(&above) }
}

/// Slope of `(log r, log osc)` restricted to `r ∈ [r_lo, r_hi]`.
pub fn fit_range(profile: &[(f64, f64)], r_lo: f64, r_hi: f64) -> Option<SideFit> {
    let (a, b) = (r_lo.ln() - 1e-9, r_hi.ln() + 1e-9);
    let pts: Vec<(f64, f64)> = profile.iter().copied().filter(|p| p.0 >= a && p.0 <= b).collect();
    fit_side(&pts)
}

/// Drops `count` points at each end.
pub fn trim_ends<T: Clone>(profile: &[T], count: usize) -> Vec<T> {
    if profile.len() <= 2 * count {
        return Vec::new();
    }
    profile[count..profile.len() - count].to_vec()
}

//! Vertical perimeter, vertical oscillation and their integrated forms.
//!
//! All estimators share one point sample per ball across the vertical shifts
//! `s` (common random numbers), so per-scale profiles are correlated the same
//! way the exact integrals are, and derived quantities get delta-method errors.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::group::{Ball, Point};
use crate::quadrature::{derive_seed, integrate_ball, integrate_ball_vec, Estimate, SampleConfig};
use crate::riesz::BumpSpec;

/// Default number of midpoint nodes for the `s`-average in [`osc`].
pub const S_NODES: usize = 32;

#[inline]
fn jump<D: Domain + ?Sized>(omega: &D, p: Point, inside: bool, s: f64) -> f64 {
    if omega.contains(p.shift_t(s * s)) != inside {
        1.0
    } else {
        0.0
    }
}

/// `v_Ω(U)(s) = ∫_U |χ_Ω(p) − χ_Ω(p·(0,0,s²))| dp`.
pub fn vertical_perimeter<D: Domain + ?Sized>(omega: &D, u: &Ball, s: f64, cfg: &SampleConfig) -> Result<Estimate> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("vertical shift must be positive, got {s}")));
    }
    integrate_ball(|p| jump(omega, p, omega.contains(p), s), u, cfg)
}

/// Midpoint nodes `r (k + 1/2) / m` on `(0, r]`.
pub fn s_nodes(r: f64, m: usize) -> Vec<f64> {
    (0..m).map(|k| r * (k as f64 + 0.5) / m as f64).collect()
}

/// `v_Ω(B)(s)/r⁴` at every node of `s_nodes(r, m)`, from one shared sample.
pub fn vertical_perimeter_profile<D: Domain + ?Sized>(
    omega: &D,
    ball: &Ball,
    cfg: &SampleConfig,
    m: usize,
) -> Result<Vec<(f64, Estimate)>> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one s-node".into()));
    }
    let nodes = s_nodes(ball.radius, m);
    let est = integrate_ball_vec(
        |p, out| {
            let inside = omega.contains(p);
            for (o, &s) in out.iter_mut().zip(&nodes) {
                *o = jump(omega, p, inside, s);
            }
        },
        m,
        ball,
        cfg,
        false,
    )?;
    let r4 = ball.radius.powi(4);
    Ok(nodes.iter().enumerate().map(|(k, &s)| (s, est.component(k).scale(1.0 / r4))).collect())
}

/// `osc_Ω(B(p,r)) = (1/r) ∫₀^r v_Ω(B)(s)/r⁴ ds` by the midpoint rule with `m` nodes.
pub fn osc<D: Domain + ?Sized>(omega: &D, ball: &Ball, cfg: &SampleConfig, m: usize) -> Result<Estimate> {
    if m < 8 {
        return Err(Error::InvalidArgument(format!("osc needs at least 8 s-nodes, got {m}")));
    }
    let nodes = s_nodes(ball.radius, m);
    let inv_m = 1.0 / m as f64;
    let est = integrate_ball(
        |p| {
            let inside = omega.contains(p);
            nodes.iter().map(|&s| jump(omega, p, inside, s)).sum::<f64>() * inv_m
        },
        ball,
        cfg,
    )?;
    Ok(est.scale(1.0 / ball.radius.powi(4)))
}

/// Geometric grid `s_k = s_min 2^(k/per_octave)`, `s_k ≤ s_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub per_octave: usize,
}

impl ScaleGrid {
    pub fn new(s_min: f64, s_max: f64, per_octave: usize) -> Result<Self> {
        if !(s_min > 0.0) || !(s_max > s_min) || !s_max.is_finite() || per_octave == 0 {
            return Err(Error::InvalidArgument(format!(
                "scale grid needs 0 < s_min < s_max and per_octave ≥ 1, got {s_min}:{s_max}:{per_octave}"
            )));
        }
        Ok(ScaleGrid { s_min, s_max, per_octave })
    }

    /// `[2⁻¹⁰ r0, 2¹⁰ r0]`.
    pub fn around(r0: f64, per_octave: usize) -> Result<Self> {
        ScaleGrid::new(r0 * 2f64.powi(-10), r0 * 2f64.powi(10), per_octave)
    }

    pub fn nodes(&self) -> Vec<f64> {
        let m = self.per_octave as f64;
        let k_max = (m * (self.s_max / self.s_min).log2() + 1e-9).floor() as i64;
        (0..=k_max).map(|k| self.s_min * 2f64.powf(k as f64 / m)).collect()
    }

    /// Quadrature weight of each node for the measure `ds/s`.
    pub fn log_weight(&self) -> f64 {
        LN_2 / self.per_octave as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LpPerimeter {
    pub estimate: Estimate,
    /// Upper bound on the omitted part `∫_{s_max}^∞ (v/s)^p ds/s` using `v ≤ vol(U)`.
    pub tail_bound: f64,
    pub per_scale: Vec<(f64, Estimate)>,
    pub p_exp: f64,
}

/// `℘_{Ω,p}(U) = (∫ (v_Ω(U)(s)/s)^p ds/s)^(1/p)` on a geometric grid.
pub fn lp_vertical_perimeter<D: Domain + ?Sized>(
    omega: &D,
    u: &Ball,
    p_exp: f64,
    grid: &ScaleGrid,
    cfg: &SampleConfig,
) -> Result<LpPerimeter> {
    if !(p_exp >= 1.0) || !p_exp.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent must be a finite p ≥ 1, got {p_exp}")));
    }
    let nodes = grid.nodes();
    let est = integrate_ball_vec(
        |p, out| {
            let inside = omega.contains(p);
            for (o, &s) in out.iter_mut().zip(&nodes) {
                *o = jump(omega, p, inside, s);
            }
        },
        nodes.len(),
        u,
        cfg,
        true,
    )?;
    let w = grid.log_weight();
    let sum: f64 = nodes.iter().zip(&est.value).map(|(s, v)| w * (v / s).powf(p_exp)).sum();
    let value = sum.powf(1.0 / p_exp);
    let stderr = if sum > 0.0 {
        let outer = sum.powf(1.0 / p_exp - 1.0) / p_exp;
        let g: Vec<f64> = nodes
            .iter()
            .zip(&est.value)
            .map(|(s, v)| outer * w * p_exp * v.max(0.0).powf(p_exp - 1.0) / s.powf(p_exp))
            .collect();
        est.linear_stderr(&g).unwrap_or(0.0)
    } else {
        0.0
    };
    let vol = u.volume();
    let tail_bound = (vol / grid.s_max).powf(p_exp) / p_exp;
    let per_scale = nodes.iter().enumerate().map(|(k, &s)| (s, est.component(k))).collect();
    Ok(LpPerimeter { estimate: Estimate { value, stderr, n: est.n }, tail_bound, per_scale, p_exp })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiniResult {
    pub estimate: Estimate,
    pub profile: Vec<(f64, Estimate)>,
    /// Power-law extrapolation of the omitted small-scale part; `None` when the
    /// profile does not decay towards zero.
    pub lower_tail: Option<f64>,
    pub upper_tail: Option<f64>,
}

/// Seed for the estimate at radius `r`; keyed on the radius so that grids
/// sharing a radius share its estimate.
pub fn radius_seed(seed: u64, r: f64) -> u64 {
    derive_seed(seed, r.to_bits())
}

/// Geometric-grid sum of `osc_Ω(B(p0, r_k)) Δlog r`.
pub fn dini_integral<D: Domain + ?Sized>(
    omega: &D,
    p0: Point,
    grid: &ScaleGrid,
    cfg: &SampleConfig,
    m: usize,
) -> Result<DiniResult> {
    let radii = grid.nodes();
    let profile = radii
        .iter()
        .map(|&r| {
            let ball = Ball::new(p0, r)?;
            let local = SampleConfig { seed: radius_seed(cfg.seed, r), ..*cfg };
            Ok((r, osc(omega, &ball, &local, m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let w = grid.log_weight();
    let value = profile.iter().map(|(_, e)| w * e.value).sum();
    let stderr = profile.iter().map(|(_, e)| (w * e.stderr).powi(2)).sum::<f64>().sqrt();
    let n = profile.iter().map(|(_, e)| e.n).sum();
    let lower_tail = tail_extrapolation(&profile, true);
    let upper_tail = tail_extrapolation(&profile, false);
    Ok(DiniResult { estimate: Estimate { value, stderr, n }, profile, lower_tail, upper_tail })
}

/// Fits a power law to the last two octaves at one end and integrates it to 0 or ∞.
fn tail_extrapolation(profile: &[(f64, Estimate)], lower: bool) -> Option<f64> {
    let k = profile.len().min(4);
    if k < 2 {
        return None;
    }
    let pts: Vec<&(f64, Estimate)> = if lower { profile[..k].iter().collect() } else { profile[profile.len() - k..].iter().collect() };
    if pts.iter().any(|(_, e)| e.value <= 0.0) {
        return if pts.iter().all(|(_, e)| e.value == 0.0) { Some(0.0) } else { None };
    }
    let xs: Vec<f64> = pts.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, e)| e.value.ln()).collect();
    let (slope, _) = crate::fit::least_squares(&xs, &ys)?;
    let end = if lower { pts[0].1.value } else { pts[pts.len() - 1].1.value };
    if lower && slope > 0.0 {
        Some(end / slope)
    } else if !lower && slope < 0.0 {
        Some(end / -slope)
    } else {
        None
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DtBound {
    /// `|r⁻⁴ ∫_Ω ∂_tψ|`
    pub lhs: Estimate,
    /// `sup|∂_tψ| · osc_Ω(B(p, 10r))`
    pub bound: Estimate,
}

impl DtBound {
    pub fn ratio(&self) -> Option<f64> {
        (self.bound.value > 0.0).then(|| self.lhs.value / self.bound.value)
    }
}

/// Both sides of the `∂_t`-integration bound for a bump supported in `ball`.
pub fn dt_bound_check<D: Domain + ?Sized>(omega: &D, ball: &Ball, psi: &BumpSpec, cfg: &SampleConfig) -> Result<DtBound> {
    let support = psi.support();
    if crate::group::dist(support.center, ball.center) + support.radius > ball.radius * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "bump support B({}, {}) is not inside B({}, {})",
            support.center, support.radius, ball.center, ball.radius
        )));
    }
    let r4 = ball.radius.powi(4);
    let raw = integrate_ball(|p| if omega.contains(p) { psi.dt(p) } else { 0.0 }, ball, cfg)?;
    let lhs = Estimate { value: raw.value.abs() / r4, stderr: raw.stderr / r4, n: raw.n };
    let big = ball.with_radius(10.0 * ball.radius)?;
    let o = osc(omega, &big, &cfg.child(1), S_NODES)?;
    Ok(DtBound { lhs, bound: o.scale(psi.dt_sup()) })
}

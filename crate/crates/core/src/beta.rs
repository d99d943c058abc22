//! Vertical β-numbers and the comparisons built on them.
//!
//! A candidate plane is `P(θ, c) = {x cos θ + y sin θ = c}` and
//! `dist(q, P) = |x cos θ + y sin θ − c|`, so at fixed `θ` every objective
//! reduces to a one-dimensional location problem in `c` over the projections
//! `c_i = x_i cos θ + y_i sin θ`:
//!
//! * `L∞`: half the spread, attained at the midpoint of `[min c_i, max c_i]`;
//! * `L¹`: a weighted median;
//! * `L²`: the weighted mean;
//! * other `p`: a convex problem solved by golden-section search.
//!
//! The outer problem in `θ` is scanned on a 180-point grid and refined by
//! golden-section search around the best grid node.

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{IntrinsicGraph, WeightedSample};
use crate::error::{Error, Result};
use crate::group::{Ball, Point, VerticalPlane};
use crate::oscillation::{lp_vertical_perimeter, osc, radius_seed, vertical_perimeter_profile, ScaleGrid, S_NODES};
use crate::quadrature::{derive_seed, Estimate, SampleConfig};

/// Enlargement factor for β-balls where no explicit value is forced.
pub const DEFAULT_ENLARGEMENT: f64 = 24.0;

const THETA_GRID: usize = 180;
const GOLDEN_ITERS: usize = 80;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `(r⁻³ ∫ (dist/r)^p dμ)^(1/p)`.
    Radius,
    /// `(μ(B)⁻¹ ∫ (dist/r)^p dμ)^(1/p)`, monotone in `p`.
    Mass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaResult {
    pub value: f64,
    pub plane: VerticalPlane,
    /// `f64::INFINITY` for the sup-version.
    pub p_exp: f64,
    /// Total weight of the sample inside the ball.
    pub mass: f64,
    pub count: usize,
}

/// Weighted points restricted to a ball.
fn collect(sample: &WeightedSample, ball: &Ball) -> Vec<(Point, f64)> {
    sample.in_ball(ball).map(|s| (s.point, s.weight)).collect()
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Exact minimiser of `Σ w |c_i − o|`; on a flat stretch the point of the
/// optimal interval closest to zero.
fn weighted_median(vals: &mut [(f64, f64)]) -> f64 {
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = vals.iter().map(|v| v.1).sum();
    let half = 0.5 * total;
    let mut acc = 0.0;
    for i in 0..vals.len() {
        acc += vals[i].1;
        if acc > half {
            return vals[i].0;
        }
        if acc == half {
            // every point of [c_i, c_{i+1}] is optimal
            let hi = vals.get(i + 1).map_or(vals[i].0, |v| v.0);
            return 0.0f64.clamp(vals[i].0, hi);
        }
    }
    vals.last().map_or(0.0, |v| v.0)
}

/// Best offset and the raw objective (`max |·|` or `Σ w |·|^p`) at fixed angle.
fn inner(points: &[(Point, f64)], theta: f64, p_exp: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let proj = |q: &Point| q.x * c + q.y * s;
    if p_exp.is_infinite() {
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (q, _)| {
            let v = proj(q);
            (lo.min(v), hi.max(v))
        });
        return (0.5 * (lo + hi), 0.5 * (hi - lo));
    }
    let mut vals: Vec<(f64, f64)> = points.iter().map(|(q, w)| (proj(q), *w)).collect();
    let cost = |o: f64, vals: &[(f64, f64)]| vals.iter().map(|(v, w)| w * (v - o).abs().powf(p_exp)).sum::<f64>();
    let offset = if p_exp == 1.0 {
        weighted_median(&mut vals)
    } else if p_exp == 2.0 {
        let tw: f64 = vals.iter().map(|v| v.1).sum();
        vals.iter().map(|(v, w)| v * w).sum::<f64>() / tw
    } else {
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, _)| (lo.min(*v), hi.max(*v)));
        if hi > lo {
            golden_min(|o| cost(o, &vals), lo, hi, GOLDEN_ITERS).0
        } else {
            lo
        }
    };
    (offset, cost(offset, &vals))
}

/// β of an explicit weighted point set in `ball`; `p_exp = ∞` gives the sup-version.
pub fn beta_of_points(points: &[(Point, f64)], ball: &Ball, p_exp: f64, norm: Normalization) -> Result<BetaResult> {
    if !(p_exp >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent must satisfy p ≥ 1, got {p_exp}")));
    }
    let pts: Vec<(Point, f64)> = points.iter().copied().filter(|(q, _)| ball.contains(*q)).collect();
    if pts.is_empty() {
        return Err(Error::EmptyBall);
    }
    let mass: f64 = pts.iter().map(|p| p.1).sum();
    if !p_exp.is_infinite() && !(mass > 0.0) {
        return Err(Error::InvalidArgument("zero total weight in the ball".into()));
    }
    let step = std::f64::consts::PI / THETA_GRID as f64;
    let grid: Vec<(f64, f64, f64)> = (0..THETA_GRID)
        .into_par_iter()
        .map(|k| {
            let th = k as f64 * step;
            let (o, v) = inner(&pts, th, p_exp);
            (th, o, v)
        })
        .collect();
    // first strict minimum, so ties go to the smallest angle
    let mut best = grid[0];
    for &g in &grid[1..] {
        if g.2 < best.2 {
            best = g;
        }
    }
    let (th_ref, v_ref) = golden_min(|th| inner(&pts, th, p_exp).1, best.0 - step, best.0 + step, GOLDEN_ITERS);
    // rounding-level gains would break the smallest-angle tie rule
    if v_ref < best.2 * (1.0 - 1e-9) {
        let o = inner(&pts, th_ref, p_exp).0;
        best = (th_ref, o, v_ref);
    }
    let r = ball.radius;
    let value = if p_exp.is_infinite() {
        best.2 / r
    } else {
        let denom = match norm {
            Normalization::Radius => r * r * r,
            Normalization::Mass => mass,
        };
        (best.2 / denom).powf(1.0 / p_exp) / r
    };
    Ok(BetaResult { value, plane: VerticalPlane::new(best.0, best.1), p_exp, mass, count: pts.len() })
}

/// `β_∞(B) = inf_P sup_{q ∈ B ∩ E} dist(q, P)/r`.
pub fn beta_inf(sample: &WeightedSample, ball: &Ball) -> Result<BetaResult> {
    beta_of_points(&collect(sample, ball), ball, f64::INFINITY, Normalization::Radius)
}

/// `β_p(B) = inf_P (r⁻³ ∫_{B ∩ E} (dist(q, P)/r)^p dμ)^(1/p)` (or mass-normalised).
pub fn beta_p(sample: &WeightedSample, ball: &Ball, p_exp: f64, norm: Normalization) -> Result<BetaResult> {
    if p_exp.is_infinite() {
        return beta_inf(sample, ball);
    }
    beta_of_points(&collect(sample, ball), ball, p_exp, norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscBeta {
    pub osc: Estimate,
    /// `max_s v_Ω(B)(s)/r⁴` over the midpoint `s`-nodes.
    pub max_v: Estimate,
    pub beta1: BetaResult,
    /// `max_v / β₁`, zero when both vanish and absent when only `β₁` does.
    pub ratio: Option<f64>,
}

/// `osc_Ω(B(p, r))` and `max_s v/r⁴` against `β₁(B(p, C r))` from a fresh sample.
pub fn osc_beta_compare(
    g: &IntrinsicGraph,
    ball: &Ball,
    cfg: &SampleConfig,
    n_surface: usize,
    enlargement: f64,
) -> Result<OscBeta> {
    let o = osc(g, ball, cfg, S_NODES)?;
    let profile = vertical_perimeter_profile(g, ball, &cfg.child(7), S_NODES)?;
    let max_v = profile.iter().map(|(_, e)| *e).fold(Estimate { value: 0.0, stderr: 0.0, n: 0 }, |a, b| if b.value > a.value { b } else { a });
    let big = ball.with_radius(enlargement * ball.radius)?;
    let sample = g.surface_sample_ball(&big, n_surface, derive_seed(cfg.seed, 11))?;
    let beta1 = beta_p(&sample, &big, 1.0, Normalization::Radius)?;
    let ratio = if beta1.value > 0.0 {
        Some(max_v.value / beta1.value)
    } else if max_v.value == 0.0 {
        Some(0.0)
    } else {
        None
    };
    Ok(OscBeta { osc: o, max_v, beta1, ratio })
}

/// Sampling sizes for the nested surface integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NestedConfig {
    /// Outer surface points `q`.
    pub n_centers: usize,
    /// Surface points per inner β evaluation.
    pub n_local: usize,
    pub seed: u64,
    pub enlargement: f64,
}

impl Default for NestedConfig {
    fn default() -> Self {
        NestedConfig { n_centers: 64, n_local: 1200, seed: 0, enlargement: DEFAULT_ENLARGEMENT }
    }
}

/// Coefficient integrated by [`carleson_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PackingCoefficient {
    Beta,
    Osc,
}

/// `∫_{B(p0,R0)∩Γ} F(q) dμ(q)` by Monte Carlo over surface points.
fn outer_integral<F>(g: &IntrinsicGraph, region_ball: &Ball, n: usize, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(usize, Point) -> Result<f64> + Sync,
{
    let sample = g.surface_sample_ball(region_ball, n, seed)?;
    let vals: Vec<Result<f64>> = sample
        .points
        .par_iter()
        .enumerate()
        .map(|(i, s)| if region_ball.contains(s.point) { f(i, s.point) } else { Ok(0.0) })
        .collect();
    let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(sample.integrate_indexed(|i, _| vals[i]))
}

/// `(∫₀^R β₁(B(q, C r))^p dr/r)^(1/p)` on the grid's radii.
fn beta_scale_integral(g: &IntrinsicGraph, q: Point, grid: &ScaleGrid, p_exp: f64, nested: &NestedConfig, seed: u64) -> Result<f64> {
    let mut sum = 0.0;
    for &r in &grid.nodes() {
        let big = Ball::new(q, nested.enlargement * r)?;
        let sample = g.surface_sample_ball(&big, nested.n_local, radius_seed(seed, r))?;
        let b = match beta_p(&sample, &big, 1.0, Normalization::Radius) {
            Ok(b) => b.value,
            Err(Error::EmptyBall) => 0.0,
            Err(e) => return Err(e),
        };
        sum += grid.log_weight() * b.powf(p_exp);
    }
    Ok(sum.powf(1.0 / p_exp))
}

#[derive(Debug, Clone, Serialize)]
pub struct PerimeterBeta {
    pub lhs: Estimate,
    /// `R³ + ∫ (∫ β₁^p dr/r)^(1/p) dμ`
    pub rhs: Estimate,
    pub beta_term: Estimate,
    pub tail_bound: f64,
}

impl PerimeterBeta {
    pub fn ratio(&self) -> f64 {
        self.lhs.value / self.rhs.value
    }
}

/// Both sides of `℘_{Ω,p}(B(p0,R)) ≲ R³ + ∫_{B(p0,CR)∩∂Ω} (∫₀^R β₁(B(q,Cr))^p dr/r)^(1/p) dμ(q)`.
///
/// `s_grid` discretises the vertical perimeter, `r_grid` the inner scale integral.
pub fn perimeter_beta_bound(
    g: &IntrinsicGraph,
    ball: &Ball,
    p_exp: f64,
    s_grid: &ScaleGrid,
    r_grid: &ScaleGrid,
    cfg: &SampleConfig,
    nested: &NestedConfig,
) -> Result<PerimeterBeta> {
    let lp = lp_vertical_perimeter(g, ball, p_exp, s_grid, cfg)?;
    let outer = ball.with_radius(nested.enlargement * ball.radius)?;
    let beta_term = outer_integral(g, &outer, nested.n_centers, nested.seed, |i, q| {
        beta_scale_integral(g, q, r_grid, p_exp, nested, derive_seed(nested.seed, 1000 + i as u64))
    })?;
    let r3 = ball.radius.powi(3);
    let rhs = Estimate { value: r3 + beta_term.value, stderr: beta_term.stderr, n: beta_term.n };
    Ok(PerimeterBeta { lhs: lp.estimate, rhs, beta_term, tail_bound: lp.tail_bound })
}

/// `R⁻³ ∫_{B(p0,R)∩Γ} ∫_{r_grid} coeff(B(q,r))^p dr/r dμ(q)`.
#[allow(clippy::too_many_arguments)]
pub fn carleson_scan(
    g: &IntrinsicGraph,
    p0: Point,
    big_r: f64,
    p_exp: f64,
    r_grid: &ScaleGrid,
    coefficient: PackingCoefficient,
    cfg: &SampleConfig,
    nested: &NestedConfig,
) -> Result<Estimate> {
    let ball = Ball::new(p0, big_r)?;
    let w = r_grid.log_weight();
    let est = outer_integral(g, &ball, nested.n_centers, nested.seed, |i, q| {
        let seed = derive_seed(nested.seed, 1000 + i as u64);
        let mut sum = 0.0;
        for &r in &r_grid.nodes() {
            let c = match coefficient {
                PackingCoefficient::Beta => {
                    let b = Ball::new(q, r)?;
                    let sample = g.surface_sample_ball(&b, nested.n_local, radius_seed(seed, r))?;
                    match beta_p(&sample, &b, 1.0, Normalization::Radius) {
                        Ok(b) => b.value,
                        Err(Error::EmptyBall) => 0.0,
                        Err(e) => return Err(e),
                    }
                }
                PackingCoefficient::Osc => {
                    let local = SampleConfig { seed: radius_seed(seed, r), ..*cfg };
                    osc(g, &Ball::new(q, r)?, &local, S_NODES)?.value
                }
            };
            sum += w * c.powf(p_exp);
        }
        Ok(sum)
    })?;
    Ok(est.scale(1.0 / big_r.powi(3)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_points(offsets: &[f64], n: usize) -> Vec<(Point, f64)> {
        let mut out = Vec::new();
        for &x0 in offsets {
            for i in 0..n {
                for j in 0..n {
                    // stays inside B(0, 1) for |x0| ≤ 0.2
                    let y = -0.9 + 1.8 * (i as f64 + 0.5) / n as f64;
                    let t = -0.1 + 0.2 * (j as f64 + 0.5) / n as f64;
                    // (x0, 0, 0) · (0, y, t) lies on {x = x0}
                    out.push((Point::new(x0, 0.0, 0.0).mul(Point::new(0.0, y, t)), 1.0));
                }
            }
        }
        out
    }

    #[test]
    fn single_plane_is_flat() {
        let ball = Ball::centered(1.0).unwrap();
        for x0 in [0.0, 0.1] {
            let pts = plane_points(&[x0], 40);
            let b = beta_of_points(&pts, &ball, f64::INFINITY, Normalization::Radius).unwrap();
            assert!(b.value < 1e-6, "{b:?}");
            assert!((b.plane.offset() - x0).abs() < 1e-6);
            let b1 = beta_of_points(&pts, &ball, 1.0, Normalization::Radius).unwrap();
            assert!(b1.value < 1e-6);
        }
    }

    #[test]
    fn two_planes() {
        let ball = Ball::centered(1.0).unwrap();
        let pts = plane_points(&[0.0, 0.2], 40);
        let b = beta_of_points(&pts, &ball, f64::INFINITY, Normalization::Radius).unwrap();
        assert!((b.value - 0.1).abs() < 1e-4, "{b:?}");
        assert!((b.plane.offset() - 0.1).abs() < 1e-4);
        assert_eq!(b.count, pts.len());
        let b1 = beta_of_points(&pts, &ball, 1.0, Normalization::Mass).unwrap();
        let b2 = beta_of_points(&pts, &ball, 2.0, Normalization::Mass).unwrap();
        let b3 = beta_of_points(&pts, &ball, 3.0, Normalization::Mass).unwrap();
        assert!(b1.value <= b2.value + 1e-12 && b2.value <= b3.value + 1e-12 && b3.value <= b.value + 1e-12);
    }

    /// Fine angle grid with the L¹ offset restricted to projections of data points.
    fn brute_l1(pts: &[(Point, f64)]) -> f64 {
        let mut best = f64::INFINITY;
        for k in 0..3600 {
            let (s, c) = (k as f64 * std::f64::consts::PI / 3600.0).sin_cos();
            let proj: Vec<f64> = pts.iter().map(|(q, _)| q.x * c + q.y * s).collect();
            for &o in &proj {
                let v: f64 = proj.iter().zip(pts).map(|(v, (_, w))| w * (v - o).abs()).sum();
                best = best.min(v);
            }
        }
        best
    }

    #[test]
    fn l1_matches_brute_force() {
        let ball = Ball::centered(1.0).unwrap();
        let mut pts = plane_points(&[0.0, 0.2], 8);
        for (i, p) in pts.iter_mut().enumerate() {
            p.1 = 1.0 + (i % 5) as f64;
        }
        let b1 = beta_of_points(&pts, &ball, 1.0, Normalization::Radius).unwrap();
        let oracle = brute_l1(&pts);
        assert!(b1.value <= oracle + 1e-9, "{} vs {oracle}", b1.value);
        assert!(b1.value >= oracle - 1e-3 * oracle, "{} vs {oracle}", b1.value);
    }

    #[test]
    fn weighted_median_ties_prefer_zero() {
        let mut v = vec![(-1.0, 1.0), (2.0, 1.0)];
        assert_eq!(weighted_median(&mut v), 0.0);
        let mut v = vec![(1.0, 1.0), (2.0, 1.0)];
        assert_eq!(weighted_median(&mut v), 1.0);
        let mut v = vec![(1.0, 3.0), (2.0, 1.0), (5.0, 1.0)];
        assert_eq!(weighted_median(&mut v), 1.0);
    }

    #[test]
    fn errors() {
        let ball = Ball::centered(1.0).unwrap();
        assert!(matches!(beta_of_points(&[], &ball, 1.0, Normalization::Radius), Err(Error::EmptyBall)));
        let far = vec![(Point::new(5.0, 0.0, 0.0), 1.0)];
        assert!(matches!(beta_of_points(&far, &ball, f64::INFINITY, Normalization::Radius), Err(Error::EmptyBall)));
        let zero = vec![(Point::new(0.1, 0.0, 0.0), 0.0)];
        assert!(beta_of_points(&zero, &ball, 1.0, Normalization::Radius).is_err());
        assert!(beta_of_points(&zero, &ball, 0.5, Normalization::Radius).is_err());
    }
}

//! Measurable sets as indicator oracles, with intrinsic graphs as the main case.
//!
//! An intrinsic graph is stored as a function `φ(y, t)` on the yt-plane `W`
//! plus a rotation angle `θ`. The set it bounds is
//!
//! ```text
//! Ω = { p : x' > φ(π_W(p')) },   p' = R_θ(p)
//! ```
//!
//! and its boundary is the image of the graph map `Φ(y, t) = (0, y, t) · (φ, 0, 0)`
//! pushed back by `R_θ⁻¹`. Rotations are isometric automorphisms, so all
//! metric quantities can be computed in the rotated frame.
//!
//! Surface measure is represented through the area formula: uniform points of
//! a parameter rectangle weighted by `√(1 + (∇^φφ)²)`, which equals the
//! spherical Hausdorff measure on the graph up to one global constant.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Ball, Point};
use crate::quadrature::{derive_seed, map_chunks, Estimate};

/// Indicator oracle of a set `Ω ⊂ ℍ`.
pub trait Domain: Send + Sync {
    fn contains(&self, p: Point) -> bool;

    fn label(&self) -> String;

    fn indicator(&self, p: Point) -> f64 {
        if self.contains(p) {
            1.0
        } else {
            0.0
        }
    }
}

impl<D: Domain + ?Sized> Domain for Arc<D> {
    fn contains(&self, p: Point) -> bool {
        (**self).contains(p)
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

/// Open half-space `{x cos θ + y sin θ > offset}`.
#[derive(Debug, Clone, Copy)]
pub struct HalfSpace {
    pub theta: f64,
    pub offset: f64,
}

impl Domain for HalfSpace {
    fn contains(&self, p: Point) -> bool {
        let (s, c) = self.theta.sin_cos();
        p.x * c + p.y * s > self.offset
    }

    fn label(&self) -> String {
        format!("flat:theta={},offset={}", self.theta, self.offset)
    }
}

/// Horizontal half-space `{t > level}`.
#[derive(Debug, Clone, Copy)]
pub struct Slab {
    pub level: f64,
}

impl Domain for Slab {
    fn contains(&self, p: Point) -> bool {
        p.t > self.level
    }

    fn label(&self) -> String {
        format!("slab:t>{}", self.level)
    }
}

/// `ℍ ∖ Ω`.
pub struct Complement<D>(pub D);

impl<D: Domain> Domain for Complement<D> {
    fn contains(&self, p: Point) -> bool {
        !self.0.contains(p)
    }

    fn label(&self) -> String {
        format!("complement({})", self.0.label())
    }
}

/// The image `δ_λ(g · Ω)`.
pub struct Transformed<D> {
    pub inner: D,
    pub g: Point,
    pub lambda: f64,
}

impl<D: Domain> Transformed<D> {
    pub fn new(inner: D, g: Point, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() || !g.is_finite() {
            return Err(Error::InvalidArgument(format!("bad transform g={g}, lambda={lambda}")));
        }
        Ok(Transformed { inner, g, lambda })
    }
}

impl<D: Domain> Domain for Transformed<D> {
    fn contains(&self, p: Point) -> bool {
        self.inner.contains(self.g.inv().mul(p.dilate_unchecked(1.0 / self.lambda)))
    }

    fn label(&self) -> String {
        format!("dilate({}, {} * {})", self.lambda, self.g, self.inner.label())
    }
}

pub type PhiFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Vertical Hölder bounds: `|φ(y,t) − φ(y,s)| ≤ constant · |t − s|^((1 ± τ)/2)`
/// for `|t − s| ≤ 1` and `> 1` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderMeta {
    pub constant: f64,
    pub tau: f64,
}

/// Super-graph of an intrinsic graph over the (rotated) yt-plane.
#[derive(Clone)]
pub struct IntrinsicGraph {
    phi: PhiFn,
    /// Asserted intrinsic Lipschitz constant.
    pub lip_bound: f64,
    pub holder: Option<HolderMeta>,
    pub rotation: f64,
    label: String,
}

impl fmt::Debug for IntrinsicGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntrinsicGraph")
            .field("label", &self.label)
            .field("lip_bound", &self.lip_bound)
            .field("holder", &self.holder)
            .field("rotation", &self.rotation)
            .finish()
    }
}

/// Default finite-difference step for the intrinsic gradient.
pub const FD_STEP: f64 = 1e-5;

impl IntrinsicGraph {
    pub fn new<F>(phi: F, lip_bound: f64, label: impl Into<String>) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        IntrinsicGraph { phi: Arc::new(phi), lip_bound, holder: None, rotation: 0.0, label: label.into() }
    }

    pub fn with_holder(mut self, constant: f64, tau: f64) -> Self {
        self.holder = Some(HolderMeta { constant, tau });
        self
    }

    /// Same graph rotated by `R_θ⁻¹`.
    pub fn with_rotation(mut self, theta: f64) -> Self {
        self.rotation = theta;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn phi(&self, y: f64, t: f64) -> f64 {
        (self.phi)(y, t)
    }

    #[inline]
    fn to_frame(&self, p: Point) -> Point {
        if self.rotation == 0.0 {
            p
        } else {
            p.rotate(self.rotation)
        }
    }

    #[inline]
    fn leave_frame(&self, p: Point) -> Point {
        if self.rotation == 0.0 {
            p
        } else {
            p.rotate(-self.rotation)
        }
    }

    /// Parameter `w = (y, t)` of the point `p` in the graph's own frame.
    pub fn parameter(&self, p: Point) -> (f64, f64) {
        self.to_frame(p).proj_w()
    }

    /// Graph map `Φ(y, t) = (0, y, t) · (φ(y, t), 0, 0)`.
    pub fn graph_map(&self, y: f64, t: f64) -> Point {
        let phi = self.phi(y, t);
        self.leave_frame(Point::embed_w(y, t).mul(Point::new(phi, 0.0, 0.0)))
    }

    /// Sub-graph `{x' < φ(π_W(p'))}`.
    pub fn below(&self, p: Point) -> bool {
        let q = self.to_frame(p);
        let (y, t) = q.proj_w();
        q.x < self.phi(y, t)
    }

    /// Exact test `x' = φ`; together with `contains` and `below` it partitions ℍ.
    pub fn on_graph(&self, p: Point) -> bool {
        let q = self.to_frame(p);
        let (y, t) = q.proj_w();
        q.x == self.phi(y, t)
    }

    /// `∂_y φ + φ ∂_t φ` by central differences with step `h`.
    pub fn intrinsic_gradient(&self, y: f64, t: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("difference step must be positive, got {h}")));
        }
        let phi = self.phi(y, t);
        let partials = |h: f64| {
            let dy = (self.phi(y + h, t) - self.phi(y - h, t)) / (2.0 * h);
            let dt = (self.phi(y, t + h) - self.phi(y, t - h)) / (2.0 * h);
            (dy, dt)
        };
        let (mut dy, mut dt) = partials(h);
        if phi.abs() > 10.0 {
            // Richardson step: the t-derivative error is amplified by |φ|
            let (dy2, dt2) = partials(0.5 * h);
            dy = (4.0 * dy2 - dy) / 3.0;
            dt = (4.0 * dt2 - dt) / 3.0;
        }
        let g = dy + phi * dt;
        if !g.is_finite() {
            return Err(Error::NonFinite { what: "intrinsic gradient", point: self.graph_map(y, t) });
        }
        Ok(g)
    }

    /// Inward horizontal unit normal `ν = (1 − i∇^φφ)/√(1 + (∇^φφ)²)` in world coordinates.
    pub fn normal_nu(&self, y: f64, t: f64) -> Result<Complex64> {
        Ok(nu_from_gradient(self.intrinsic_gradient(y, t, FD_STEP)?, self.rotation))
    }

    /// Parameter rectangle covering `π_W(B ∩ Γ)` in the graph frame.
    pub fn ball_w_bounds(&self, ball: &Ball) -> Rect {
        ball_w_bounds(self.to_frame(ball.center), ball.radius)
    }

    /// Uniform points of `region` pushed to the graph, weighted by the area
    /// factor `√(1 + (∇^φφ)²) · area / n`.
    pub fn surface_sample(&self, region: Rect, n: usize, seed: u64) -> Result<WeightedSample> {
        if n == 0 {
            return Err(Error::InvalidArgument("surface sample needs at least one point".into()));
        }
        region.validate()?;
        let cell = region.area() / n as f64;
        let chunks = map_chunks(n, seed, |_, rng, len| -> Result<Vec<SurfacePoint>> {
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                let y = region.y0 + (region.y1 - region.y0) * rng.random::<f64>();
                let t = region.t0 + (region.t1 - region.t0) * rng.random::<f64>();
                out.push(self.surface_point(y, t, cell)?);
            }
            Ok(out)
        });
        let mut points = Vec::with_capacity(n);
        for c in chunks {
            points.extend(c?);
        }
        Ok(WeightedSample { points, region, seed, rotation: self.rotation, strata: vec![Stratum { end: n, draws: n }] })
    }

    /// Surface sample over exactly the parameter rectangle of `ball`.
    pub fn surface_sample_ball(&self, ball: &Ball, n: usize, seed: u64) -> Result<WeightedSample> {
        self.surface_sample(self.ball_w_bounds(ball), n, seed)
    }

    /// Stratified sample concentrated around the graph point `p`.
    ///
    /// The outer stratum is uniform on `outer` with the parallelogram `P_0`
    /// removed. Level `k` is uniform on `P_k` with `P_{k+1}` removed, where
    /// `P_k` is centred at the parameter of `p`, sheared along the horizontal
    /// line through `p`, with half-width `a0 2^-k` and half-height `(a0 2^-k)²`.
    /// The last level keeps all its draws. Levels stop once the half-width
    /// drops below `a_min`. Only points of `outer ∪ P_0` are represented, so
    /// integrands must vanish outside `outer`.
    #[allow(clippy::too_many_arguments)]
    pub fn refined_sample(
        &self,
        outer: Rect,
        p: Point,
        a0: f64,
        a_min: f64,
        n_outer: usize,
        n_level: usize,
        seed: u64,
    ) -> Result<WeightedSample> {
        outer.validate()?;
        if !(a0 > 0.0 && a_min > 0.0) || n_outer == 0 || n_level == 0 {
            return Err(Error::InvalidArgument("refined sample needs positive sizes and counts".into()));
        }
        let pf = self.to_frame(p);
        let (yc, tc) = pf.proj_w();
        // the t-parameter of Φ(y, t) relative to p moves by about φ(p)·(y − yc)
        let mut levels = vec![Sheared { yc, tc, slope: pf.x, a: a0, b: a0 * a0 }];
        while levels.last().is_some_and(|l| l.a >= a_min) {
            let next = levels[levels.len() - 1].halved();
            levels.push(next);
        }
        let mut points = Vec::new();
        let mut strata = Vec::new();
        let first = levels[0];
        let outer_cell = outer.area() / n_outer as f64;
        let chunks = map_chunks(n_outer, derive_seed(seed, 0), |_, rng, len| -> Result<Vec<SurfacePoint>> {
            let mut out = Vec::new();
            for _ in 0..len {
                let (u, v): (f64, f64) = (rng.random(), rng.random());
                let (y, t) = (outer.y0 + (outer.y1 - outer.y0) * u, outer.t0 + (outer.t1 - outer.t0) * v);
                if !first.contains(y, t) {
                    out.push(self.surface_point(y, t, outer_cell)?);
                }
            }
            Ok(out)
        });
        for c in chunks {
            points.extend(c?);
        }
        strata.push(Stratum { end: points.len(), draws: n_outer });
        for (k, lvl) in levels.iter().enumerate() {
            let inner = levels.get(k + 1).copied();
            let cell = lvl.area() / n_level as f64;
            let chunks = map_chunks(n_level, derive_seed(seed, k as u64 + 1), |_, rng, len| -> Result<Vec<SurfacePoint>> {
                let mut out = Vec::new();
                for _ in 0..len {
                    let (u, v): (f64, f64) = (rng.random(), rng.random());
                    let (y, t) = lvl.at(u, v);
                    if inner.is_none_or(|i| !i.contains(y, t)) {
                        out.push(self.surface_point(y, t, cell)?);
                    }
                }
                Ok(out)
            });
            for c in chunks {
                points.extend(c?);
            }
            strata.push(Stratum { end: points.len(), draws: n_level });
        }
        Ok(WeightedSample { points, region: outer, seed, rotation: self.rotation, strata })
    }

    fn surface_point(&self, y: f64, t: f64, cell: f64) -> Result<SurfacePoint> {
        let grad = self.intrinsic_gradient(y, t, FD_STEP)?;
        Ok(SurfacePoint { w: (y, t), point: self.graph_map(y, t), weight: cell * (1.0 + grad * grad).sqrt(), grad })
    }

    /// Density ratios `μ(B(p, r)) / r³` for each radius, from one sample.
    pub fn regularity_check(&self, p: Point, radii: &[f64], sample: &WeightedSample) -> Result<Vec<(f64, Estimate)>> {
        let rmax = radii.iter().cloned().fold(0.0, f64::max);
        let need = self.ball_w_bounds(&Ball::new(p, rmax)?);
        if !sample.region.covers(&need) {
            let r = sample.region;
            return Err(Error::RegionTooSmall { y0: r.y0, y1: r.y1, t0: r.t0, t1: r.t1 });
        }
        radii
            .iter()
            .map(|&r| {
                let ball = Ball::new(p, r)?;
                Ok((r, sample.measure(&ball).scale(1.0 / (r * r * r))))
            })
            .collect()
    }

    /// Largest observed ratio `|φ(w) − φ(w')| / ‖π_W(Φ(w')⁻¹ Φ(w))‖` over random
    /// pairs in `region`.
    pub fn empirical_lipschitz(&self, region: Rect, pairs: usize, seed: u64) -> f64 {
        map_chunks(pairs, seed, |_, rng, len| {
            let mut best: f64 = 0.0;
            for _ in 0..len {
                let mut draw = || {
                    (
                        region.y0 + (region.y1 - region.y0) * rng.random::<f64>(),
                        region.t0 + (region.t1 - region.t0) * rng.random::<f64>(),
                    )
                };
                let (w, w2) = (draw(), draw());
                let (a, b) = (self.phi(w.0, w.1), self.phi(w2.0, w2.1));
                let pa = Point::embed_w(w.0, w.1).mul(Point::new(a, 0.0, 0.0));
                let pb = Point::embed_w(w2.0, w2.1).mul(Point::new(b, 0.0, 0.0));
                let (y, t) = pb.inv().mul(pa).proj_w();
                let den = Point::embed_w(y, t).norm_d();
                if den > 0.0 {
                    best = best.max((a - b).abs() / den);
                }
            }
            best
        })
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl Domain for IntrinsicGraph {
    fn contains(&self, p: Point) -> bool {
        let q = self.to_frame(p);
        let (y, t) = q.proj_w();
        q.x > self.phi(y, t)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `(1 − i g)/√(1 + g²)`, rotated back to world coordinates.
pub fn nu_from_gradient(g: f64, rotation: f64) -> Complex64 {
    let nu = Complex64::new(1.0, -g) / (1.0 + g * g).sqrt();
    if rotation == 0.0 {
        nu
    } else {
        nu * Complex64::from_polar(1.0, rotation)
    }
}

/// Axis-aligned rectangle `[y0, y1] × [t0, t1]` in the yt-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub y0: f64,
    pub y1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Rect {
    pub fn new(y0: f64, y1: f64, t0: f64, t1: f64) -> Result<Self> {
        let r = Rect { y0, y1, t0, t1 };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.y0, self.y1, self.t0, self.t1].iter().all(|v| v.is_finite()) && self.y0 < self.y1 && self.t0 < self.t1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("degenerate rectangle {self:?}")))
        }
    }

    pub fn area(&self) -> f64 {
        (self.y1 - self.y0) * (self.t1 - self.t0)
    }

    pub fn contains(&self, y: f64, t: f64) -> bool {
        y >= self.y0 && y <= self.y1 && t >= self.t0 && t <= self.t1
    }

    pub fn covers(&self, other: &Rect) -> bool {
        self.y0 <= other.y0 && self.y1 >= other.y1 && self.t0 <= other.t0 && self.t1 >= other.t1
    }

    pub fn union_hull(&self, other: &Rect) -> Rect {
        Rect {
            y0: self.y0.min(other.y0),
            y1: self.y1.max(other.y1),
            t0: self.t0.min(other.t0),
            t1: self.t1.max(other.t1),
        }
    }
}

/// Rectangle containing `π_W(B(p, r))`, with `p` given in the graph frame.
///
/// For `q = p · u` with `u ∈ B(0, r)`, `π_W(q) = (y_p + u_y, t_w(p) + u_t + x_p u_y + u_x u_y / 2)`,
/// and `|u_t + u_x u_y / 2| ≤ r²/2`.
pub fn ball_w_bounds(p: Point, r: f64) -> Rect {
    let (y, t) = p.proj_w();
    let dt = 0.5 * r * r + p.x.abs() * r;
    Rect { y0: y - r, y1: y + r, t0: t - dt, t1: t + dt }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub w: (f64, f64),
    pub point: Point,
    pub weight: f64,
    pub grad: f64,
}

/// A run of consecutive sample points drawn independently from one region.
/// `draws` counts every draw, including those discarded by stratification,
/// which enter the variance as zero contributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub end: usize,
    pub draws: usize,
}

/// Weighted sample of the surface measure on a graph.
#[derive(Debug, Clone)]
pub struct WeightedSample {
    pub points: Vec<SurfacePoint>,
    /// Parameter rectangle covered by the sample (the outer one when stratified).
    pub region: Rect,
    pub seed: u64,
    pub rotation: f64,
    pub strata: Vec<Stratum>,
}

impl WeightedSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|s| s.weight).sum()
    }

    /// Total number of draws behind the sample.
    pub fn draws(&self) -> usize {
        self.strata.iter().map(|s| s.draws).sum()
    }

    pub fn normal(&self, s: &SurfacePoint) -> Complex64 {
        nu_from_gradient(s.grad, self.rotation)
    }

    pub fn in_ball<'a>(&'a self, ball: &'a Ball) -> impl Iterator<Item = &'a SurfacePoint> + 'a {
        self.points.iter().filter(move |s| ball.contains(s.point))
    }

    /// Estimate of `∫ f dμ`, i.e. `Σ f(q) w_q`, with a stratum-wise standard error.
    pub fn integrate<F: Fn(&SurfacePoint) -> f64>(&self, f: F) -> Estimate {
        self.integrate_indexed(|_, s| f(s))
    }

    /// [`integrate`](Self::integrate) with the point index passed along.
    pub fn integrate_indexed<F: Fn(usize, &SurfacePoint) -> f64>(&self, f: F) -> Estimate {
        let mut total = 0.0;
        let mut var = 0.0;
        let mut start = 0;
        for st in &self.strata {
            let (mut sum, mut sq) = (0.0, 0.0);
            for (i, s) in self.points[start..st.end].iter().enumerate() {
                let v = f(start + i, s) * s.weight;
                sum += v;
                sq += v * v;
            }
            total += sum;
            var += stratum_variance(sum * sum, sq, st.draws);
            start = st.end;
        }
        Estimate { value: total, stderr: var.sqrt(), n: self.draws() }
    }

    /// Complex version of [`integrate`](Self::integrate); the standard error
    /// is `√(Var Re + Var Im)`.
    pub fn integrate_complex<F: Fn(&SurfacePoint) -> Complex64>(&self, f: F) -> (Complex64, f64) {
        let mut total = Complex64::new(0.0, 0.0);
        let mut var = 0.0;
        let mut start = 0;
        for st in &self.strata {
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sq = 0.0;
            for s in &self.points[start..st.end] {
                let v = f(s) * s.weight;
                sum += v;
                sq += v.norm_sqr();
            }
            total += sum;
            var += stratum_variance(sum.norm_sqr(), sq, st.draws);
            start = st.end;
        }
        (total, var.sqrt())
    }

    /// Surface measure of `B ∩ Φ(region)`.
    pub fn measure(&self, ball: &Ball) -> Estimate {
        self.integrate(|s| if ball.contains(s.point) { 1.0 } else { 0.0 })
    }
}

/// Variance of a sum of `n` i.i.d. draws given `|Σc|²` and `Σ|c|²`.
fn stratum_variance(sum_sq: f64, sq: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    (nf / (nf - 1.0) * (sq - sum_sq / nf)).max(0.0)
}

/// Parallelogram `{|y − yc| ≤ a, |t − tc − slope (y − yc)| ≤ b}` in parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sheared {
    pub yc: f64,
    pub tc: f64,
    pub slope: f64,
    pub a: f64,
    pub b: f64,
}

impl Sheared {
    pub fn contains(&self, y: f64, t: f64) -> bool {
        let dy = y - self.yc;
        dy.abs() <= self.a && (t - self.tc - self.slope * dy).abs() <= self.b
    }

    pub fn area(&self) -> f64 {
        4.0 * self.a * self.b
    }

    fn at(&self, u: f64, v: f64) -> (f64, f64) {
        let dy = self.a * (2.0 * u - 1.0);
        (self.yc + dy, self.tc + self.slope * dy + self.b * (2.0 * v - 1.0))
    }

    fn halved(&self) -> Sheared {
        Sheared { a: 0.5 * self.a, b: 0.25 * self.b, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftProfile {
    Abs,
    Zero,
    Sin,
}

/// Built-in domain families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DomainSpec {
    /// Vertical half-space bounded by the plane `{x cos θ + y sin θ = offset}`.
    Flat { theta: f64, offset: f64 },
    /// `φ(y, t) = a · φ₀(y)`, a vertical cylinder over a planar graph.
    Lift { profile: LiftProfile, a: f64 },
    /// `φ(y, t) = H s(t)` with `s` odd, `|t|^((1+τ)/2)` on `[−1, 1]` and `|t|^((1−τ)/2)` outside.
    Holder { h: f64, tau: f64 },
    /// `φ(y, t) = a|y| + ε b(y) b(t)` with `b(u) = (1 − u²)²` on `[−1, 1]`.
    PerturbedLift { a: f64, eps: f64 },
    /// `{t > level}`; not a graph.
    Slab { level: f64 },
}

/// Odd vertical profile used by the Hölder family.
pub fn holder_profile(t: f64, tau: f64) -> f64 {
    let a = t.abs();
    let e = if a <= 1.0 { 0.5 * (1.0 + tau) } else { 0.5 * (1.0 - tau) };
    t.signum() * a.powf(e)
}

fn quartic_bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        let v = 1.0 - u * u;
        v * v
    } else {
        0.0
    }
}

impl DomainSpec {
    /// Indicator oracle for this family.
    pub fn domain(&self) -> Arc<dyn Domain> {
        match *self {
            DomainSpec::Flat { theta, offset } => Arc::new(HalfSpace { theta, offset }),
            DomainSpec::Slab { level } => Arc::new(Slab { level }),
            _ => Arc::new(self.graph().expect("graph families")),
        }
    }

    pub fn is_graph(&self) -> bool {
        !matches!(self, DomainSpec::Slab { .. })
    }

    /// Graph representation, when the boundary is an intrinsic graph.
    pub fn graph(&self) -> Option<IntrinsicGraph> {
        let label = self.to_string();
        let g = match *self {
            DomainSpec::Flat { theta, offset } => {
                IntrinsicGraph::new(move |_, _| offset, 0.0, label).with_rotation(theta)
            }
            DomainSpec::Lift { profile, a } => {
                let phi: PhiFn = match profile {
                    LiftProfile::Abs => Arc::new(move |y: f64, _| a * y.abs()),
                    LiftProfile::Zero => Arc::new(|_, _| 0.0),
                    LiftProfile::Sin => Arc::new(move |y: f64, _| a * y.sin()),
                };
                let lip = if profile == LiftProfile::Zero { 0.0 } else { a.abs() };
                IntrinsicGraph { phi, lip_bound: lip, holder: None, rotation: 0.0, label }
            }
            DomainSpec::Holder { h, tau } => {
                // provable Hölder constant of H s(t) in both regimes is at most 2^((1+τ)/2) H
                let constant = 2f64.powf(0.5 * (1.0 + tau)) * h;
                IntrinsicGraph::new(move |_, t| h * holder_profile(t, tau), f64::NAN, label).with_holder(constant, tau)
            }
            DomainSpec::PerturbedLift { a, eps } => IntrinsicGraph::new(
                move |y: f64, t| a * y.abs() + eps * quartic_bump(y) * quartic_bump(t),
                f64::NAN,
                label,
            ),
            DomainSpec::Slab { .. } => return None,
        };
        Some(g)
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Flat { theta, offset } => write!(f, "flat:theta={theta},offset={offset}"),
            DomainSpec::Lift { profile, a } => {
                let name = match profile {
                    LiftProfile::Abs => "abs",
                    LiftProfile::Zero => "zero",
                    LiftProfile::Sin => "sin",
                };
                write!(f, "lift:phi0={name},a={a}")
            }
            DomainSpec::Holder { h, tau } => write!(f, "holder:H={h},tau={tau}"),
            DomainSpec::PerturbedLift { a, eps } => write!(f, "plift:a={a},eps={eps}"),
            DomainSpec::Slab { level } => write!(f, "slab:t>{level}"),
        }
    }
}

fn parse_num(key: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    let x = match v {
        "pi" | "π" => PI,
        _ => v.parse::<f64>().map_err(|_| Error::Parse(format!("bad number for `{key}`: `{v}`")))?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("`{key}` must be finite")))
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    /// Parses `family:key=value,...`, e.g. `flat:θ=0,offset=0`, `lift:phi0=abs`,
    /// `holder:H=1,tau=0.5`, `plift:a=0.5,eps=0.2`, `slab:t>0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        if family == "slab" {
            let rest = rest.trim();
            if rest.is_empty() {
                return Ok(DomainSpec::Slab { level: 0.0 });
            }
            let level = rest
                .strip_prefix("t>")
                .ok_or_else(|| Error::Parse(format!("slab expects `t>c`, got `{rest}`")))?;
            return Ok(DomainSpec::Slab { level: parse_num("t", level)? });
        }
        let mut pairs = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        fn take(pairs: &mut Vec<(String, String)>, names: &[&str], default: f64) -> Result<f64> {
            match pairs.iter().position(|(k, _)| names.contains(&k.as_str())) {
                Some(i) => {
                    let (k, v) = pairs.remove(i);
                    parse_num(&k, &v)
                }
                None => Ok(default),
            }
        }
        let spec = match family {
            "flat" => DomainSpec::Flat { theta: take(&mut pairs, &["theta", "θ"], 0.0)?, offset: take(&mut pairs, &["offset"], 0.0)? },
            "holder" => {
                let h = take(&mut pairs, &["H", "h"], 1.0)?;
                let tau = take(&mut pairs, &["tau", "τ"], 0.5)?;
                if !(tau > 0.0 && tau <= 1.0) {
                    return Err(Error::Parse(format!("tau must lie in (0, 1], got {tau}")));
                }
                if h < 0.0 {
                    return Err(Error::Parse(format!("H must be nonnegative, got {h}")));
                }
                DomainSpec::Holder { h, tau }
            }
            "plift" => DomainSpec::PerturbedLift { a: take(&mut pairs, &["a"], 0.5)?, eps: take(&mut pairs, &["eps", "ε"], 0.2)? },
            "lift" => {
                let profile = match pairs.iter().position(|(k, _)| k == "phi0" || k == "φ0") {
                    Some(i) => match pairs.remove(i).1.as_str() {
                        "abs" => LiftProfile::Abs,
                        "zero" => LiftProfile::Zero,
                        "sin" => LiftProfile::Sin,
                        other => return Err(Error::Parse(format!("unknown lift profile `{other}`"))),
                    },
                    None => LiftProfile::Abs,
                };
                let a = take(&mut pairs, &["a"], 1.0)?;
                if a.abs() > 1.0 {
                    return Err(Error::Parse(format!("lift slope must satisfy |a| ≤ 1, got {a}")));
                }
                DomainSpec::Lift { profile, a }
            }
            other => return Err(Error::Parse(format!("unknown domain family `{other}`"))),
        };
        if let Some((k, _)) = pairs.first() {
            return Err(Error::Parse(format!("unknown key `{k}` for `{family}`")));
        }
        Ok(spec)
    }
}

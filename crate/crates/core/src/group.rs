//! Algebraic and metric primitives of the first Heisenberg group.
//!
//! Points are triples `(x, y, t)` with product
//!
//! ```text
//! (x, y, t) · (x', y', t') = (x + x', y + y', t + t' + (x y' - x' y) / 2)
//! ```
//!
//! The metric is the left-invariant box distance `d(p, q) = ‖q⁻¹ · p‖` with
//! `‖(x, y, t)‖ = max(|(x, y)|, 2 √|t|)`. Its unit ball is exactly the cylinder
//! `{|(x, y)| ≤ 1, |t| ≤ 1/4}`, which the quadrature module exploits.
//!
//! # Vertical planes
//!
//! A vertical plane (left coset of a vertical subgroup) is stored as an angle
//! `theta ∈ [0, π)` and a signed `offset`:
//!
//! ```text
//! P(theta, offset) = { p : x cos(theta) + y sin(theta) = offset }
//! ```
//!
//! Distance to such a plane is `|x cos(theta) + y sin(theta) - offset|`.
//! Derivation: the rotation `R_theta` is an isometry fixing the t-axis, and its
//! first output coordinate is `x cos(theta) + y sin(theta)`, so it maps
//! `P(theta, offset)` onto `{x = offset} = (offset, 0, 0) · W`, `W` the yt-plane.
//! Left translation by `(-offset, 0, 0)` moves this onto `W` and sends `p` to a
//! point whose first coordinate is `x - offset`. For `W` itself the horizontal
//! part of `w⁻¹ · p` is `(x, y - y_w)`, so `d(p, w) ≥ |x|` for all `w ∈ W`, and
//! equality is attained at the foot of the horizontal line through `p`,
//! `w = π_W(p)`, since `π_W(p)⁻¹ · p = (x, 0, 0)`.
//!
//! The orientation convention (angle measured from the x-axis to the plane's
//! horizontal normal) is a choice; nothing downstream depends on it beyond
//! consistency.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.t)
    }
}

impl Point {
    pub const IDENTITY: Point = Point { x: 0.0, y: 0.0, t: 0.0 };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Point { x, y, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    /// Group product `self · q`.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, q: Point) -> Point {
        Point {
            x: self.x + q.x,
            y: self.y + q.y,
            t: self.t + q.t + 0.5 * (self.x * q.y - q.x * self.y),
        }
    }

    #[inline]
    pub fn inv(self) -> Point {
        Point { x: -self.x, y: -self.y, t: -self.t }
    }

    /// Heisenberg dilation `(λx, λy, λ²t)`.
    pub fn dilate(self, lambda: f64) -> Result<Point> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "dilation factor must be positive and finite, got {lambda}"
            )));
        }
        Ok(self.dilate_unchecked(lambda))
    }

    #[inline]
    pub(crate) fn dilate_unchecked(self, lambda: f64) -> Point {
        Point { x: lambda * self.x, y: lambda * self.y, t: lambda * lambda * self.t }
    }

    /// Box norm `max(|(x, y)|, 2 √|t|)`.
    #[inline]
    pub fn norm_d(self) -> f64 {
        self.x.hypot(self.y).max(2.0 * self.t.abs().sqrt())
    }

    /// Korányi norm `((x² + y²)² + 16 t²)^(1/4)`.
    #[inline]
    pub fn norm_koranyi(self) -> f64 {
        let r2 = self.x * self.x + self.y * self.y;
        (r2 * r2 + 16.0 * self.t * self.t).sqrt().sqrt()
    }

    /// Rotation about the t-axis, `(x cos θ + y sin θ, -x sin θ + y cos θ, t)`.
    pub fn rotate(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point { x: self.x * c + self.y * s, y: -self.x * s + self.y * c, t: self.t }
    }

    /// Vertical projection onto the yt-plane, as the pair `(y, t + xy/2)`.
    #[inline]
    pub fn proj_w(self) -> (f64, f64) {
        (self.y, self.t + 0.5 * self.x * self.y)
    }

    /// Horizontal projection onto the x-axis.
    #[inline]
    pub fn proj_v(self) -> f64 {
        self.x
    }

    /// The point `(0, y, t)` of the yt-plane.
    #[inline]
    pub fn embed_w(y: f64, t: f64) -> Point {
        Point { x: 0.0, y, t }
    }

    /// Vertical translate `self · (0, 0, s)`.
    #[inline]
    pub fn shift_t(self, s: f64) -> Point {
        Point { t: self.t + s, ..self }
    }
}

impl Mul for Point {
    type Output = Point;

    fn mul(self, rhs: Point) -> Point {
        Point::mul(self, rhs)
    }
}

#[inline]
pub fn dist(p: Point, q: Point) -> f64 {
    q.inv().mul(p).norm_d()
}

#[inline]
pub fn dist_koranyi(p: Point, q: Point) -> f64 {
    q.inv().mul(p).norm_koranyi()
}

/// Left coset of a vertical subgroup, `{x cos θ + y sin θ = offset}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalPlane {
    theta: f64,
    offset: f64,
}

impl VerticalPlane {
    /// The yt-plane.
    pub const W: VerticalPlane = VerticalPlane { theta: 0.0, offset: 0.0 };

    /// Builds a plane, folding `theta` into `[0, π)` (flipping the offset sign
    /// when the normal is reversed).
    pub fn new(theta: f64, offset: f64) -> Self {
        let mut th = theta.rem_euclid(2.0 * PI);
        let mut off = offset;
        if th >= PI {
            th -= PI;
            off = -off;
        }
        // rem_euclid can land exactly on the upper end through rounding
        if th >= PI {
            th = 0.0;
        }
        VerticalPlane { theta: th, offset: off }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Unit horizontal normal `(cos θ, sin θ)`.
    pub fn normal(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (c, s)
    }

    /// Signed horizontal coordinate of `p` across the plane.
    #[inline]
    pub fn signed_coordinate(&self, p: Point) -> f64 {
        let (c, s) = self.normal();
        p.x * c + p.y * s - self.offset
    }

    pub fn contains(&self, p: Point) -> bool {
        self.signed_coordinate(p) == 0.0
    }

    /// The plane point `R_θ⁻¹(offset, y, t)`.
    pub fn point_at(&self, y: f64, t: f64) -> Point {
        Point::new(self.offset, y, t).rotate(-self.theta)
    }
}

#[inline]
pub fn dist_to_plane(p: Point, plane: &VerticalPlane) -> f64 {
    plane.signed_coordinate(p).abs()
}

/// Metric ball `B(center, radius)` for the box distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidArgument(format!("ball center must be finite, got {center}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Ball::new(Point::IDENTITY, radius)
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        dist(p, self.center) <= self.radius
    }

    /// Lebesgue volume `(π/2) r⁴`, independent of the center.
    pub fn volume(&self) -> f64 {
        0.5 * PI * self.radius.powi(4)
    }

    pub fn with_radius(&self, radius: f64) -> Result<Ball> {
        Ball::new(self.center, radius)
    }

    /// Image of the ball under `q ↦ δ_λ(g · q)`.
    pub fn transform(&self, g: Point, lambda: f64) -> Result<Ball> {
        Ball::new(g.mul(self.center).dilate(lambda)?, lambda * self.radius)
    }
}

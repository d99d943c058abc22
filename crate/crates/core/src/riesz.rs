//! Heisenberg Riesz kernels, smooth bumps and truncated singular integrals on
//! graph measures.
//!
//! With `Q = |z|⁴ + 16t²` (so `‖p‖_Kor = Q^(1/4)`) and `G = Q^(-1/2)`:
//!
//! ```text
//! ∂_x G = −2x|z|² Q^(-3/2)         ∂_t G = −16t Q^(-3/2)
//! XG  = (−2x|z|² + 8yt) Q^(-3/2)   YG  = (−2y|z|² − 8xt) Q^(-3/2)
//! X̃G  = (−2x|z|² − 8yt) Q^(-3/2)   ỸG  = (−2y|z|² + 8xt) Q^(-3/2)
//! ```
//!
//! using `X = ∂_x − (y/2)∂_t`, `Y = ∂_y + (x/2)∂_t` and the right-invariant
//! `X̃ = ∂_x + (y/2)∂_t`, `Ỹ = ∂_y − (x/2)∂_t`. The Riesz kernel is
//! `K = XG − iYG` and its adjoint kernel is `K*(p) = K(p⁻¹)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{Domain, IntrinsicGraph, SurfacePoint, WeightedSample};
use crate::error::{Error, Result};
use crate::group::{dist, Ball, Point};
use crate::quadrature::{derive_seed, integrate_ball, Estimate, SampleConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum KernelId {
    G,
    K,
    Kstar,
    Ktilde,
    Khat,
    DtG,
    DtKtilde,
    DtKhat,
    XG,
    YG,
    XtG,
    YtG,
}

impl KernelId {
    pub const ALL: [KernelId; 12] = [
        KernelId::G,
        KernelId::K,
        KernelId::Kstar,
        KernelId::Ktilde,
        KernelId::Khat,
        KernelId::DtG,
        KernelId::DtKtilde,
        KernelId::DtKhat,
        KernelId::XG,
        KernelId::YG,
        KernelId::XtG,
        KernelId::YtG,
    ];

    /// Homogeneity degree under `δ_λ`.
    pub fn degree(self) -> i32 {
        match self {
            KernelId::G | KernelId::Ktilde | KernelId::Khat => -2,
            KernelId::K | KernelId::Kstar | KernelId::XG | KernelId::YG | KernelId::XtG | KernelId::YtG => -3,
            KernelId::DtG | KernelId::DtKtilde | KernelId::DtKhat => -4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelId::G => "G",
            KernelId::K => "K",
            KernelId::Kstar => "Kstar",
            KernelId::Ktilde => "Ktilde",
            KernelId::Khat => "Khat",
            KernelId::DtG => "dtG",
            KernelId::DtKtilde => "dtKtilde",
            KernelId::DtKhat => "dtKhat",
            KernelId::XG => "XG",
            KernelId::YG => "YG",
            KernelId::XtG => "XtG",
            KernelId::YtG => "YtG",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown kernel `{s}`")))
    }
}

/// `(|z|², Q, Q^(-3/2))` at `p`.
#[inline]
fn parts(p: Point) -> (f64, f64, f64) {
    let r2 = p.x * p.x + p.y * p.y;
    let q = r2 * r2 + 16.0 * p.t * p.t;
    (r2, q, 1.0 / (q * q.sqrt()))
}

#[inline]
fn xg(p: Point) -> f64 {
    let (r2, _, q32) = parts(p);
    (-2.0 * p.x * r2 + 8.0 * p.y * p.t) * q32
}

#[inline]
fn yg(p: Point) -> f64 {
    let (r2, _, q32) = parts(p);
    (-2.0 * p.y * r2 - 8.0 * p.x * p.t) * q32
}

/// `K(p) = XG(p) − i YG(p)` without the origin check.
#[inline]
pub(crate) fn riesz_kernel(p: Point) -> Complex64 {
    let (r2, _, q32) = parts(p);
    Complex64::new((-2.0 * p.x * r2 + 8.0 * p.y * p.t) * q32, (2.0 * p.y * r2 + 8.0 * p.x * p.t) * q32)
}

/// Closed-form kernel value; real kernels have zero imaginary part.
pub fn eval_kernel(id: KernelId, p: Point) -> Result<Complex64> {
    if p.x == 0.0 && p.y == 0.0 && p.t == 0.0 {
        return Err(Error::Singular { what: id.name() });
    }
    let (r2, q, q32) = parts(p);
    let q52 = q32 / q;
    let real = |v: f64| Complex64::new(v, 0.0);
    let v = match id {
        KernelId::G => real(1.0 / q.sqrt()),
        KernelId::K => riesz_kernel(p),
        KernelId::Kstar => riesz_kernel(p.inv()),
        KernelId::Ktilde => real(8.0 * p.t * r2 * q32),
        KernelId::Khat => real(2.0 * r2 * r2 * q32),
        KernelId::DtG => real(-16.0 * p.t * q32),
        KernelId::DtKtilde => real(8.0 * r2 * (r2 * r2 - 32.0 * p.t * p.t) * q52),
        KernelId::DtKhat => real(-96.0 * r2 * r2 * p.t * q52),
        KernelId::XG => real(xg(p)),
        KernelId::YG => real(yg(p)),
        KernelId::XtG => real((-2.0 * p.x * r2 - 8.0 * p.y * p.t) * q32),
        KernelId::YtG => real((-2.0 * p.y * r2 + 8.0 * p.x * p.t) * q32),
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonFinite { what: id.name(), point: p });
    }
    Ok(v)
}

fn g_value(p: Point) -> f64 {
    let (r2, _, _) = parts(p);
    1.0 / (r2 * r2 + 16.0 * p.t * p.t).sqrt()
}

/// Direction of a one-parameter horizontal subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    /// `p · (s, 0, 0)`: the left-invariant field `X`.
    X,
    /// `p · (0, s, 0)`: `Y`.
    Y,
    /// `(s, 0, 0) · p`: the right-invariant field `X̃`.
    Xt,
    /// `(0, s, 0) · p`: `Ỹ`.
    Yt,
}

impl Flow {
    #[inline]
    pub fn step(self, p: Point, s: f64) -> Point {
        match self {
            Flow::X => p.mul(Point::new(s, 0.0, 0.0)),
            Flow::Y => p.mul(Point::new(0.0, s, 0.0)),
            Flow::Xt => Point::new(s, 0.0, 0.0).mul(p),
            Flow::Yt => Point::new(0.0, s, 0.0).mul(p),
        }
    }
}

/// Central difference of `f` along a flow.
pub fn flow_derivative<F: Fn(Point) -> f64>(f: F, flow: Flow, p: Point, h: f64) -> f64 {
    (f(flow.step(p, h)) - f(flow.step(p, -h))) / (2.0 * h)
}

/// Second central difference of `f` along a flow.
pub fn flow_second_derivative<F: Fn(Point) -> f64>(f: F, flow: Flow, p: Point, h: f64) -> f64 {
    (f(flow.step(p, h)) - 2.0 * f(p) + f(flow.step(p, -h))) / (h * h)
}

/// Relative residual of `K(q⁻¹) = −X̃G(q) + iỸG(q)`, both sides in closed form.
pub fn check_inverse_kernel_identity(q: Point) -> Result<f64> {
    let lhs = eval_kernel(KernelId::K, q.inv())?;
    let rhs = Complex64::new(-eval_kernel(KernelId::XtG, q)?.re, eval_kernel(KernelId::YtG, q)?.re);
    Ok((lhs - rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceSplit {
    /// `X V₁ + Y V₂`
    pub left: f64,
    /// `X̃ V₁ + Ỹ V₂`
    pub right: f64,
    /// `∂_t(−y V₁ + x V₂)`
    pub correction: f64,
    /// `|left − right − correction|`
    pub residual: f64,
}

/// Finite-difference check of `div V = div~ V + ∂_t(−yV₁ + xV₂)` at `p`.
pub fn check_left_right_div<V: Fn(Point) -> (f64, f64)>(v: V, p: Point, h: f64) -> DivergenceSplit {
    let v1 = |q: Point| v(q).0;
    let v2 = |q: Point| v(q).1;
    let left = flow_derivative(v1, Flow::X, p, h) + flow_derivative(v2, Flow::Y, p, h);
    let right = flow_derivative(v1, Flow::Xt, p, h) + flow_derivative(v2, Flow::Yt, p, h);
    let w = |q: Point| {
        let (a, b) = v(q);
        -q.y * a + q.x * b
    };
    let correction = (w(p.shift_t(h)) - w(p.shift_t(-h))) / (2.0 * h);
    DivergenceSplit { left, right, correction, residual: (left - right - correction).abs() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Harmonicity {
    /// `|XXG + YYG|`
    pub left: f64,
    /// `|X̃X̃G + ỸỸG|`
    pub right: f64,
}

/// Nested finite-difference sub-Laplacians of `G` at `q ≠ 0`.
pub fn harmonicity_residual(q: Point, h: f64) -> Result<Harmonicity> {
    if q == Point::IDENTITY {
        return Err(Error::Singular { what: "G" });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("difference step must be positive, got {h}")));
    }
    let left = flow_second_derivative(g_value, Flow::X, q, h) + flow_second_derivative(g_value, Flow::Y, q, h);
    let right = flow_second_derivative(g_value, Flow::Xt, q, h) + flow_second_derivative(g_value, Flow::Yt, q, h);
    Ok(Harmonicity { left: left.abs(), right: right.abs() })
}

// Radial profiles. Inner bump: 1 below 0.6, 0 above 1. Exterior cut-off:
// 0 below 1.2, 1 above 2. Both in the Korányi radius, which is smooth off the
// origin; `‖·‖_d ≤ ‖·‖_Kor ≤ 2^(1/4)‖·‖_d` gives the metric-ball sandwiches.
const PSI_INNER: f64 = 0.6;
const PSI_OUTER: f64 = 1.0;
const PHI_INNER: f64 = 1.2;
const PHI_OUTER: f64 = 2.0;

#[inline]
fn smoothstep(v: f64) -> f64 {
    let v = v.clamp(0.0, 1.0);
    v * v * v * (10.0 + v * (-15.0 + 6.0 * v))
}

#[inline]
fn smoothstep_prime(v: f64) -> f64 {
    if v <= 0.0 || v >= 1.0 {
        0.0
    } else {
        30.0 * v * v * (1.0 - v) * (1.0 - v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    /// `ψ_B`, with `χ_{B(p,r/2)} ≤ ψ_B ≤ χ_{B(p,r)}`.
    PsiBall,
    /// `φ_ε`, with `χ_{ℍ∖B(p,2ε)} ≤ φ_ε ≤ χ_{ℍ∖B(p,ε)}`.
    PhiEpsExterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpSpec {
    pub center: Point,
    pub radius: f64,
    pub kind: BumpKind,
}

impl BumpSpec {
    pub fn psi(ball: &Ball) -> Self {
        BumpSpec { center: ball.center, radius: ball.radius, kind: BumpKind::PsiBall }
    }

    pub fn phi_eps(eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("truncation radius must be positive, got {eps}")));
        }
        Ok(BumpSpec { center: Point::IDENTITY, radius: eps, kind: BumpKind::PhiEpsExterior })
    }

    /// Ball outside of which the bump is constant.
    pub fn support(&self) -> Ball {
        let r = match self.kind {
            BumpKind::PsiBall => self.radius,
            BumpKind::PhiEpsExterior => 2.0 * self.radius,
        };
        Ball { center: self.center, radius: r }
    }

    #[inline]
    fn local(&self, q: Point) -> Point {
        self.center.inv().mul(q).dilate_unchecked(1.0 / self.radius)
    }

    #[inline]
    fn profile(&self, rho: f64) -> f64 {
        match self.kind {
            BumpKind::PsiBall => 1.0 - smoothstep((rho - PSI_INNER) / (PSI_OUTER - PSI_INNER)),
            BumpKind::PhiEpsExterior => smoothstep((rho - PHI_INNER) / (PHI_OUTER - PHI_INNER)),
        }
    }

    #[inline]
    fn profile_prime(&self, rho: f64) -> f64 {
        match self.kind {
            BumpKind::PsiBall => {
                -smoothstep_prime((rho - PSI_INNER) / (PSI_OUTER - PSI_INNER)) / (PSI_OUTER - PSI_INNER)
            }
            BumpKind::PhiEpsExterior => {
                smoothstep_prime((rho - PHI_INNER) / (PHI_OUTER - PHI_INNER)) / (PHI_OUTER - PHI_INNER)
            }
        }
    }

    #[inline]
    pub fn value(&self, q: Point) -> f64 {
        self.profile(self.local(q).norm_koranyi())
    }

    /// `∂_t` of the bump: with `u = δ_{1/r}(c⁻¹q)`, `∂u_t/∂t = 1/r²` and
    /// `∂‖u‖_Kor/∂u_t = 8u_t/‖u‖_Kor³`.
    pub fn dt(&self, q: Point) -> f64 {
        let u = self.local(q);
        let rho = u.norm_koranyi();
        let d = self.profile_prime(rho);
        if d == 0.0 {
            return 0.0;
        }
        d * 8.0 * u.t / (rho * rho * rho) / (self.radius * self.radius)
    }

    /// `sup |∂_t bump|`. Since `|u_t| ≤ ‖u‖_Kor²/4` with equality on the
    /// t-axis, this is `max_ρ |h'(ρ)| · 2/ρ / r²`, maximised on a fine grid.
    pub fn dt_sup(&self) -> f64 {
        let (a, b) = match self.kind {
            BumpKind::PsiBall => (PSI_INNER, PSI_OUTER),
            BumpKind::PhiEpsExterior => (PHI_INNER, PHI_OUTER),
        };
        let m = 4000;
        let best = (0..=m)
            .map(|i| {
                let rho = a + (b - a) * i as f64 / m as f64;
                self.profile_prime(rho).abs() * 2.0 / rho
            })
            .fold(0.0, f64::max);
        best / (self.radius * self.radius)
    }
}

/// `η_j = φ_{2^-j} − φ_{2^-j+1}` (centred at the origin).
pub fn eta(j: i32, p: Point) -> f64 {
    let a = BumpSpec { center: Point::IDENTITY, radius: 2f64.powi(-j), kind: BumpKind::PhiEpsExterior };
    let b = BumpSpec { radius: 2.0 * a.radius, ..a };
    a.value(p) - b.value(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// Drop `‖q⁻¹p‖ < ε`.
    Sharp,
    /// Multiply by `φ_ε(q⁻¹p)`.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Kernel `K(q⁻¹p)`.
    Direct,
    /// Kernel `K*(q⁻¹p) = K(p⁻¹q)`.
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszValue {
    pub value: Complex64,
    pub stderr: f64,
    pub n: usize,
    /// Fewer than 512 sample points in `B(p, 2ε)`, i.e. typical spacing above `ε/4`.
    pub sparse: bool,
}

/// Truncated kernel `K_(ε)` applied to the displacement `q⁻¹p`.
#[inline]
pub fn truncated_kernel(q_inv_p: Point, eps: f64, mode: Truncation, side: Side) -> Complex64 {
    let weight = match mode {
        Truncation::Sharp => {
            if q_inv_p.norm_d() < eps {
                return Complex64::new(0.0, 0.0);
            }
            1.0
        }
        Truncation::Smooth => {
            // profile of φ_ε in the Korányi radius, which is inversion-invariant
            let rho = q_inv_p.norm_koranyi() / eps;
            if rho <= PHI_INNER {
                return Complex64::new(0.0, 0.0);
            }
            smoothstep((rho - PHI_INNER) / (PHI_OUTER - PHI_INNER))
        }
    };
    let k = match side {
        Side::Direct => riesz_kernel(q_inv_p),
        Side::Adjoint => riesz_kernel(q_inv_p.inv()),
    };
    k * weight
}

/// `ℛ_ε(fμ)(p) ≈ Σ_q K_(ε)(q⁻¹p) f(q) w_q` over a surface sample.
pub fn truncated_riesz<F>(sample: &WeightedSample, f: F, p: Point, eps: f64, mode: Truncation, side: Side) -> Result<RieszValue>
where
    F: Fn(&SurfacePoint) -> Complex64,
{
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("truncation radius must be positive, got {eps}")));
    }
    let near = sample.points.iter().filter(|s| dist(s.point, p) < 2.0 * eps).count();
    let sparse = near < 512;
    if sparse {
        log::warn!("surface sample is sparse near {p} at eps={eps}: {near} points within 2*eps");
    }
    let (value, stderr) = sample.integrate_complex(|s| {
        let k = truncated_kernel(s.point.inv().mul(p), eps, mode, side);
        if k == Complex64::new(0.0, 0.0) {
            k
        } else {
            k * f(s)
        }
    });
    Ok(RieszValue { value, stderr, n: sample.draws(), sparse })
}

/// The accretive test function `b_B = ψ_B ν` on a sample.
pub fn test_function(ball: Ball, sample: &WeightedSample) -> impl Fn(&SurfacePoint) -> Complex64 + '_ {
    let psi = BumpSpec::psi(&ball);
    move |s: &SurfacePoint| {
        let v = psi.value(s.point);
        if v == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            sample.normal(s) * v
        }
    }
}

/// Sampling parameters for [`testing_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestingConfig {
    /// Draws over the ball's parameter rectangle.
    pub n_outer: usize,
    /// Draws per refinement level around the evaluation point.
    pub n_level: usize,
    pub seed: u64,
    pub mode: Truncation,
}

impl Default for TestingConfig {
    fn default() -> Self {
        TestingConfig { n_outer: 400_000, n_level: 40_000, seed: 0, mode: Truncation::Smooth }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestingRow {
    pub ball: Ball,
    pub eps: f64,
    pub point: Point,
    pub value: Complex64,
    pub stderr: f64,
    pub adjoint: Complex64,
    pub adjoint_stderr: f64,
    pub n: usize,
    pub seed: u64,
    pub sparse: bool,
}

/// `|ℛ_{s,ε}(b_B μ)(p)|` and its adjoint for every `(ball, ε, point)`.
///
/// Each `(ball, point)` pair gets its own sample: the ball's parameter
/// rectangle plus nested strata around the point down to `ε_min / 4`.
pub fn testing_scan(
    g: &IntrinsicGraph,
    balls: &[Ball],
    eps_grid: &[f64],
    points: &[Point],
    cfg: &TestingConfig,
) -> Result<Vec<TestingRow>> {
    if eps_grid.iter().any(|e| !(*e > 0.0)) || eps_grid.is_empty() {
        return Err(Error::InvalidArgument("eps grid must be non-empty and positive".into()));
    }
    let eps_min = eps_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let pairs: Vec<(usize, usize)> = (0..balls.len()).flat_map(|b| (0..points.len()).map(move |i| (b, i))).collect();
    let blocks: Vec<Result<Vec<TestingRow>>> = pairs
        .par_iter()
        .map(|&(bi, pi)| {
            let ball = balls[bi];
            let p = points[pi];
            let seed = derive_seed(cfg.seed, (bi * points.len() + pi) as u64);
            let sample = g.refined_sample(g.ball_w_bounds(&ball), p, 0.5 * ball.radius, 0.25 * eps_min, cfg.n_outer, cfg.n_level, seed)?;
            let f = test_function(ball, &sample);
            eps_grid
                .iter()
                .map(|&eps| {
                    let d = truncated_riesz(&sample, &f, p, eps, cfg.mode, Side::Direct)?;
                    let a = truncated_riesz(&sample, &f, p, eps, cfg.mode, Side::Adjoint)?;
                    Ok(TestingRow {
                        ball,
                        eps,
                        point: p,
                        value: d.value,
                        stderr: d.stderr,
                        adjoint: a.value,
                        adjoint_stderr: a.stderr,
                        n: d.n,
                        seed,
                        sparse: d.sparse,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    Ok(rows)
}

/// Compactly supported test field `V_i = ψ_B(q) · (c_i0 + c_i1 u_x + c_i2 u_y + c_i3 u_t)`,
/// `u = δ_{1/r}(c⁻¹q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSpec {
    pub ball: Ball,
    pub coeffs: [[f64; 4]; 2],
}

impl FieldSpec {
    pub fn eval(&self, q: Point) -> (f64, f64) {
        let psi = BumpSpec::psi(&self.ball).value(q);
        if psi == 0.0 {
            return (0.0, 0.0);
        }
        let u = self.ball.center.inv().mul(q).dilate_unchecked(1.0 / self.ball.radius);
        let lin = |c: &[f64; 4]| c[0] + c[1] * u.x + c[2] * u.y + c[3] * u.t;
        (psi * lin(&self.coeffs[0]), psi * lin(&self.coeffs[1]))
    }

    /// `X V₁ + Y V₂` by central differences along the flows.
    pub fn divergence(&self, q: Point, h: f64) -> f64 {
        flow_derivative(|p| self.eval(p).0, Flow::X, q, h) + flow_derivative(|p| self.eval(p).1, Flow::Y, q, h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceCheck {
    /// `−∫_Ω div V dp`
    pub lhs: Estimate,
    /// `∫_Γ ⟨V, ν_H⟩ dμ` with the area-formula weights
    pub rhs: Estimate,
    /// `lhs / rhs`, absent when flagged
    pub c_hat: Option<f64>,
    /// `rhs` indistinguishable from zero
    pub flagged: bool,
}

/// Step for the divergence finite differences.
pub const DIV_STEP: f64 = 1e-5;

/// Both sides of the divergence theorem for a field supported in `field.ball`.
pub fn divergence_check(
    g: &IntrinsicGraph,
    field: &FieldSpec,
    cfg: &SampleConfig,
    n_surface: usize,
    seed: u64,
) -> Result<DivergenceCheck> {
    let lhs = integrate_ball(
        |p| if g.contains(p) { -field.divergence(p, DIV_STEP) } else { 0.0 },
        &field.ball,
        cfg,
    )?;
    let sample = g.surface_sample_ball(&field.ball, n_surface, seed)?;
    let rhs = sample.integrate(|s| {
        let (v1, v2) = field.eval(s.point);
        if v1 == 0.0 && v2 == 0.0 {
            return 0.0;
        }
        let nu = sample.normal(s);
        v1 * nu.re + v2 * nu.im
    });
    let flagged = rhs.value == 0.0 || rhs.value.abs() <= 3.0 * rhs.stderr;
    let c_hat = (!flagged).then(|| lhs.value / rhs.value);
    Ok(DivergenceCheck { lhs, rhs, c_hat, flagged })
}

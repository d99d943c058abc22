//! Seeded Monte-Carlo and grid integration over metric balls.
//!
//! Because `B(0, r)` is exactly the cylinder `{|z| ≤ r, |t| ≤ r²/4}`, a point
//! uniform in the unit cube `(u, v, w)` maps to a uniform point of the ball by
//!
//! ```text
//! (r √u cos 2πv, r √u sin 2πv, (r²/4)(2w - 1))
//! ```
//!
//! (the `√u` makes the radial density proportional to the radius). Left
//! translation by the center has unit Jacobian, so `B(p, r) = p · B(0, r)` is
//! sampled without rejection. The volume `(π/2) r⁴` is known exactly.
//!
//! Work is split into fixed-size chunks. Chunk `c` draws from a ChaCha stream
//! keyed by `(seed, c)` and chunk results are merged in chunk order, so the
//! output does not depend on the number of worker threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Ball, Point};

/// Samples per parallel work item.
pub const CHUNK: usize = 4096;

/// Default number of samples per estimate.
pub const DEFAULT_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MonteCarlo,
    StratifiedGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    pub seed: u64,
    pub method: Method,
}

impl SampleConfig {
    pub fn monte_carlo(n: usize, seed: u64) -> Self {
        SampleConfig { n, seed, method: Method::MonteCarlo }
    }

    pub fn grid(n: usize) -> Self {
        SampleConfig { n, seed: 0, method: Method::StratifiedGrid }
    }

    /// Same configuration with a seed derived from `(seed, index)`.
    pub fn child(&self, index: u64) -> Self {
        SampleConfig { seed: derive_seed(self.seed, index), ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        Ok(())
    }

    /// Nodes per axis for the stratified grid, `⌈n^(1/3)⌉`.
    pub fn grid_nodes(&self) -> usize {
        let mut m = (self.n as f64).cbrt().round() as usize;
        while m * m * m < self.n {
            m += 1;
        }
        while m > 1 && (m - 1) * (m - 1) * (m - 1) >= self.n {
            m -= 1;
        }
        m.max(1)
    }

    /// Number of points actually evaluated.
    pub fn effective_n(&self) -> usize {
        match self.method {
            Method::MonteCarlo => self.n,
            Method::StratifiedGrid => self.grid_nodes().pow(3),
        }
    }
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig::monte_carlo(DEFAULT_SAMPLES, 0)
    }
}

/// Scalar estimate with one standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0, n: 0 }
    }

    pub fn scale(self, c: f64) -> Self {
        Estimate { value: c * self.value, stderr: c.abs() * self.stderr, n: self.n }
    }

    /// `|a - b| ≤ k · sqrt(se_a² + se_b²)`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.stderr.hypot(other.stderr)
    }

    /// `|value - target| ≤ max(k · stderr, floor)`.
    pub fn within(&self, target: f64, k: f64, floor: f64) -> bool {
        (self.value - target).abs() <= (k * self.stderr).max(floor)
    }
}

/// Estimate of a vector-valued integral. `cov` (row-major, already scaled to
/// the estimator) is present when requested.
#[derive(Debug, Clone, PartialEq)]
pub struct VecEstimate {
    pub value: Vec<f64>,
    pub variance: Vec<f64>,
    pub cov: Option<Vec<f64>>,
    pub n: usize,
}

impl VecEstimate {
    pub fn dim(&self) -> usize {
        self.value.len()
    }

    pub fn component(&self, k: usize) -> Estimate {
        Estimate { value: self.value[k], stderr: self.variance[k].max(0.0).sqrt(), n: self.n }
    }

    /// Standard error of `Σ g_k X_k`; needs the covariance.
    pub fn linear_stderr(&self, g: &[f64]) -> Option<f64> {
        let cov = self.cov.as_ref()?;
        let d = self.dim();
        let mut v = 0.0;
        for i in 0..d {
            for j in 0..d {
                v += g[i] * cov[i * d + j] * g[j];
            }
        }
        Some(v.max(0.0).sqrt())
    }
}

pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `f(chunk_index, rng, len)` over `ceil(n / CHUNK)` chunks in parallel,
/// returning results in chunk order.
pub(crate) fn map_chunks<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            f(c, &mut rng, len)
        })
        .collect()
}

/// Maps a point of the unit cube onto `B(0, r)`.
#[inline]
fn cube_to_cylinder(u: f64, v: f64, w: f64, r: f64) -> Point {
    let rho = r * u.sqrt();
    let (s, c) = (2.0 * PI * v).sin_cos();
    Point::new(rho * c, rho * s, 0.25 * r * r * (2.0 * w - 1.0))
}

#[inline]
fn grid_point(ball: &Ball, m: usize, idx: usize) -> Point {
    let i = idx / (m * m);
    let j = (idx / m) % m;
    let k = idx % m;
    let h = 1.0 / m as f64;
    let local = cube_to_cylinder((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h, ball.radius);
    ball.center.mul(local)
}

/// Uniform points of the ball (or the stratified grid nodes), in a fixed order.
pub fn sample_ball(ball: &Ball, cfg: &SampleConfig) -> Vec<Point> {
    match cfg.method {
        Method::MonteCarlo => map_chunks(cfg.n, cfg.seed, |_, rng, len| {
            (0..len)
                .map(|_| {
                    let (u, v, w): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
                    ball.center.mul(cube_to_cylinder(u, v, w, ball.radius))
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect(),
        Method::StratifiedGrid => {
            let m = cfg.grid_nodes();
            (0..m * m * m).map(|i| grid_point(ball, m, i)).collect()
        }
    }
}

/// Running first and second moments of a vector integrand (Chan et al. merge).
#[derive(Clone)]
struct Moments {
    n: usize,
    mean: Vec<f64>,
    // full co-moment matrix or only its diagonal
    m2: Vec<f64>,
    full: bool,
}

impl Moments {
    fn new(dim: usize, full: bool) -> Self {
        Moments { n: 0, mean: vec![0.0; dim], m2: vec![0.0; if full { dim * dim } else { dim }], full }
    }

    fn push(&mut self, x: &[f64], delta: &mut [f64]) {
        self.n += 1;
        let nf = self.n as f64;
        let d = self.mean.len();
        for k in 0..d {
            delta[k] = x[k] - self.mean[k];
            self.mean[k] += delta[k] / nf;
        }
        if self.full {
            for i in 0..d {
                let after_i = x[i] - self.mean[i];
                for j in 0..d {
                    self.m2[i * d + j] += after_i * delta[j];
                }
            }
        } else {
            for k in 0..d {
                self.m2[k] += delta[k] * (x[k] - self.mean[k]);
            }
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let d = self.mean.len();
        let delta: Vec<f64> = (0..d).map(|k| other.mean[k] - self.mean[k]).collect();
        if self.full {
            for i in 0..d {
                for j in 0..d {
                    self.m2[i * d + j] += other.m2[i * d + j] + delta[i] * delta[j] * na * nb / n;
                }
            }
        } else {
            for k in 0..d {
                self.m2[k] += other.m2[k] + delta[k] * delta[k] * na * nb / n;
            }
        }
        for k in 0..d {
            self.mean[k] += delta[k] * nb / n;
        }
        self.n += other.n;
    }
}

fn check_finite(values: &[f64], p: Point) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what: "integrand", point: p })
    }
}

/// Integrates a vector-valued `f` over the ball. `f` writes its `dim` values
/// into the provided slice.
pub fn integrate_ball_vec<F>(f: F, dim: usize, ball: &Ball, cfg: &SampleConfig, with_cov: bool) -> Result<VecEstimate>
where
    F: Fn(Point, &mut [f64]) + Sync,
{
    cfg.validate()?;
    let vol = ball.volume();
    let run_chunk = |points: &mut dyn Iterator<Item = Point>| -> Result<Moments> {
        let mut m = Moments::new(dim, with_cov);
        let mut buf = vec![0.0; dim];
        let mut delta = vec![0.0; dim];
        for p in points {
            buf.iter_mut().for_each(|v| *v = 0.0);
            f(p, &mut buf);
            check_finite(&buf, p)?;
            m.push(&buf, &mut delta);
        }
        Ok(m)
    };
    let parts: Vec<Result<Moments>> = match cfg.method {
        Method::MonteCarlo => map_chunks(cfg.n, cfg.seed, |_, rng, len| {
            let mut it = (0..len).map(|_| {
                let (u, v, w): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
                ball.center.mul(cube_to_cylinder(u, v, w, ball.radius))
            });
            run_chunk(&mut it)
        }),
        Method::StratifiedGrid => {
            let m = cfg.grid_nodes();
            let total = m * m * m;
            let chunks = total.div_ceil(CHUNK);
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let hi = ((c + 1) * CHUNK).min(total);
                    let mut it = (c * CHUNK..hi).map(|i| grid_point(ball, m, i));
                    run_chunk(&mut it)
                })
                .collect()
        }
    };
    let mut acc = Moments::new(dim, with_cov);
    for part in parts {
        acc.merge(&part?);
    }
    let n = acc.n;
    let value: Vec<f64> = acc.mean.iter().map(|m| vol * m).collect();
    let deterministic = cfg.method == Method::StratifiedGrid || n < 2;
    // estimator variance: vol² · sample variance / n
    let scale = if deterministic { 0.0 } else { vol * vol / ((n - 1) as f64 * n as f64) };
    let (variance, cov) = if with_cov {
        let variance = (0..dim).map(|k| scale * acc.m2[k * dim + k]).collect();
        (variance, Some(acc.m2.iter().map(|v| scale * v).collect()))
    } else {
        (acc.m2.iter().map(|v| scale * v).collect(), None)
    };
    Ok(VecEstimate { value, variance, cov, n })
}

/// `∫_B f dL³` with standard error (zero in grid mode).
pub fn integrate_ball<F>(f: F, ball: &Ball, cfg: &SampleConfig) -> Result<Estimate>
where
    F: Fn(Point) -> f64 + Sync,
{
    let est = integrate_ball_vec(|p, out| out[0] = f(p), 1, ball, cfg, false)?;
    Ok(est.component(0))
}

/// Composite midpoint rule on `[a, b]`.
pub fn integrate_1d<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, nodes: usize) -> f64 {
    assert!(nodes > 0, "integrate_1d needs at least one node");
    let h = (b - a) / nodes as f64;
    let mut sum = 0.0;
    for i in 0..nodes {
        sum += g(a + (i as f64 + 0.5) * h);
    }
    sum * h
}

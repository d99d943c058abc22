//! Reproducible experiment runner.
//!
//! An [`ExperimentConfig`] fully determines a [`Report`]: a table of rows
//! plus a summary with built-in checks and observed constants. Reports are
//! written as CSV (one `#` provenance line, then the header row) or JSON.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::beta::{
    beta_p, carleson_scan, osc_beta_compare, perimeter_beta_bound, NestedConfig, Normalization, PackingCoefficient,
};
use crate::domains::{Complement, Domain, DomainSpec, IntrinsicGraph, Rect, Transformed};
use crate::error::{Error, Result};
use crate::fit::{fit_decay, fit_range, trim_ends};
use crate::group::{dist, Ball, Point};
use crate::oscillation::{dini_integral, osc, radius_seed, ScaleGrid, S_NODES};
use crate::quadrature::{derive_seed, Estimate, SampleConfig};
use crate::riesz::{check_inverse_kernel_identity, eval_kernel, testing_scan, KernelId, TestingConfig, Truncation};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Frozen constant in `max_s v(B(p,r))(s)/r⁴ ≤ K_β β₁(B(p, 24r))`.
pub const K_BETA: f64 = 16.0;

/// Frozen constant in `℘_{Ω,p}(B(p0,R)) ≤ K (R³ + β-term)`.
pub const K_PERIMETER: f64 = 0.05;

/// Frozen constant in `|r⁻⁴ ∫_Ω ∂_tψ| ≤ K sup|∂_tψ| osc_Ω(B(p,10r))`.
pub const K_DT: f64 = 50.0;

/// Allowed `max / median` over a testing table.
pub const TESTING_SPREAD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Invariants,
    OscScan,
    BetaScan,
    OscVsBeta,
    Dini,
    RieszTest,
    Carleson,
    PerimeterBeta,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Invariants,
        ExperimentKind::OscScan,
        ExperimentKind::BetaScan,
        ExperimentKind::OscVsBeta,
        ExperimentKind::Dini,
        ExperimentKind::RieszTest,
        ExperimentKind::Carleson,
        ExperimentKind::PerimeterBeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Invariants => "invariants",
            ExperimentKind::OscScan => "osc-scan",
            ExperimentKind::BetaScan => "beta-scan",
            ExperimentKind::OscVsBeta => "osc-vs-beta",
            ExperimentKind::Dini => "dini",
            ExperimentKind::RieszTest => "riesz-test",
            ExperimentKind::Carleson => "carleson",
            ExperimentKind::PerimeterBeta => "perimeter-beta",
        }
    }

    /// Sample count used when the config leaves it unset.
    pub fn default_samples(self) -> usize {
        match self {
            ExperimentKind::Invariants => 10_000,
            ExperimentKind::OscScan => 200_000,
            ExperimentKind::BetaScan | ExperimentKind::OscVsBeta | ExperimentKind::Dini => 100_000,
            ExperimentKind::RieszTest => 400_000,
            ExperimentKind::Carleson => 20_000,
            ExperimentKind::PerimeterBeta => 100_000,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Outer surface points for nested integrals.
    #[serde(default = "default_centers")]
    pub centers: usize,
    /// Surface points per local β fit.
    #[serde(default = "default_local")]
    pub local: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { n: None, seed: 0, centers: default_centers(), local: default_local() }
    }
}

fn default_centers() -> usize {
    64
}

fn default_local() -> usize {
    1200
}

/// Geometric grid `s_min 2^(k/per_octave)`. For `carleson` and
/// `perimeter-beta` the endpoints are in units of the ball radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Scales {
    pub s_min: f64,
    pub s_max: f64,
    pub per_octave: usize,
}

impl Scales {
    pub fn grid(&self, unit: f64) -> Result<ScaleGrid> {
        ScaleGrid::new(self.s_min * unit, self.s_max * unit, self.per_octave)
    }
}

impl FromStr for Scales {
    type Err = Error;

    /// `smin:smax:per_octave`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("scales must look like smin:smax:per_octave, got `{s}`")));
        }
        let per_octave = parts[2].trim().parse().map_err(|_| Error::Parse(format!("bad per_octave `{}`", parts[2])))?;
        let sc = Scales { s_min: parse_number(parts[0])?, s_max: parse_number(parts[1])?, per_octave };
        sc.grid(1.0)?;
        Ok(sc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub domain: String,
    #[serde(default)]
    pub center: [f64; 3],
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_p")]
    pub p_exp: f64,
    #[serde(default = "default_eps")]
    pub eps_grid: Vec<f64>,
    /// Evaluation points per ball in `riesz-test`.
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_enlargement")]
    pub enlargement: f64,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Scales>,
}

fn default_radii() -> Vec<f64> {
    vec![1.0]
}

fn default_p() -> f64 {
    1.0
}

fn default_eps() -> Vec<f64> {
    (1..=6).map(|k| 2f64.powi(-k)).collect()
}

fn default_points() -> usize {
    10
}

fn default_enlargement() -> f64 {
    crate::beta::DEFAULT_ENLARGEMENT
}

/// Parses `1.5`, `pi`, `2^-4` or `-2^3`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) if rest.contains('^') => (-1.0, rest),
        _ => (1.0, s),
    };
    let x = if let Some((b, e)) = body.split_once('^') {
        let b: f64 = parse_number(b)?;
        let e: f64 = parse_number(e)?;
        sign * b.powf(e)
    } else if body == "pi" || body == "π" {
        sign * PI
    } else {
        body.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")))?
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("`{s}` is not finite")))
    }
}

/// Parses `a..b` into the geometric sequence `a, 2a, 4a, …` up to `b`
/// (`per_octave` nodes per doubling), or a comma list of numbers.
pub fn parse_range(s: &str, per_octave: usize) -> Result<Vec<f64>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_number(a)?, parse_number(b)?);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !(lo > 0.0) {
            return Err(Error::Parse(format!("range `{s}` must be positive")));
        }
        let mut out = ScaleGrid::new(lo, hi * (1.0 + 1e-12), per_octave.max(1))?.nodes();
        if a > b {
            out.reverse();
        }
        Ok(out)
    } else {
        s.split(',').map(parse_number).collect()
    }
}

/// Parses `x,y,t`.
pub fn parse_point(s: &str) -> Result<Point> {
    let v: Vec<f64> = s.split(',').map(parse_number).collect::<Result<_>>()?;
    match v[..] {
        [x, y, t] => Ok(Point::new(x, y, t)),
        _ => Err(Error::Parse(format!("expected x,y,t, got `{s}`"))),
    }
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, domain: impl Into<String>) -> Self {
        ExperimentConfig {
            experiment,
            domain: domain.into(),
            center: [0.0; 3],
            radii: default_radii(),
            p_exp: default_p(),
            eps_grid: default_eps(),
            points: default_points(),
            enlargement: default_enlargement(),
            format: Format::Csv,
            output: None,
            sampling: Sampling::default(),
            scales: None,
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn samples(&self) -> usize {
        self.sampling.n.unwrap_or_else(|| self.experiment.default_samples())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec> {
        self.domain.parse()
    }

    pub fn validate(&self) -> Result<()> {
        self.domain_spec()?;
        if self.samples() == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidArgument("radii must be non-empty, positive and finite".into()));
        }
        if !(self.p_exp >= 1.0 && self.p_exp.is_finite()) {
            return Err(Error::InvalidArgument(format!("p-exp must be a finite number ≥ 1, got {}", self.p_exp)));
        }
        if self.eps_grid.is_empty() || self.eps_grid.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::InvalidArgument("eps grid must be non-empty and positive".into()));
        }
        if !(self.enlargement >= 1.0) {
            return Err(Error::InvalidArgument("enlargement must be at least 1".into()));
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidArgument("center must be finite".into()));
        }
        if let Some(s) = &self.scales {
            s.grid(1.0)?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical TOML form, ignoring where and how output is written.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        c.format = Format::Csv;
        let text = c.to_toml().unwrap_or_default();
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub observed: f64,
    /// `None` for one-sided checks.
    pub lower: Option<f64>,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: ExperimentKind,
    pub domain: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub observed: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Summary,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.summary.checks.iter().filter(|c| !c.pass)
    }

    pub fn header_line(&self) -> String {
        format!(
            "# heisosc version={} config_hash={} seed={}",
            self.summary.version, self.summary.config_hash, self.summary.seed
        )
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        let body = String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?;
        Ok(format!("{}\n{}", self.header_line(), body))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn summary_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.summary).map_err(|e| Error::Io(e.to_string()))
    }
}

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    checks: Vec<Check>,
    observed: BTreeMap<String, f64>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), checks: Vec::new(), observed: BTreeMap::new() }
    }

    fn check(&mut self, name: impl Into<String>, observed: f64, upper: f64) {
        let pass = observed <= upper;
        self.checks.push(Check { name: name.into(), pass, observed, lower: None, upper });
    }

    fn check_range(&mut self, name: impl Into<String>, observed: f64, lower: f64, upper: f64) {
        let pass = observed >= lower && observed <= upper;
        self.checks.push(Check { name: name.into(), pass, observed, lower: Some(lower), upper });
    }

    fn observe(&mut self, key: impl Into<String>, v: f64) {
        self.observed.insert(key.into(), v);
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn point(p: Point) -> String {
    format!("{:?};{:?};{:?}", p.x, p.y, p.t)
}

const OSC_COLUMNS: [&str; 10] = ["domain_label", "cx", "cy", "ct", "r", "s", "estimate", "stderr", "n", "seed"];
const BETA_COLUMNS: [&str; 11] = ["domain_label", "cx", "cy", "ct", "r", "p_exp", "beta", "theta", "offset", "n", "seed"];
const RIESZ_COLUMNS: [&str; 12] =
    ["graph", "ball_center", "ball_radius", "eps", "point", "re", "im", "re_adj", "im_adj", "stderr", "n", "seed"];

/// Runs one experiment; `Err` means a configuration problem.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let spec = cfg.domain_spec()?;
    let table = match cfg.experiment {
        ExperimentKind::Invariants => invariants(cfg, &spec)?,
        ExperimentKind::OscScan => osc_scan(cfg, &spec)?,
        ExperimentKind::BetaScan => beta_scan(cfg, &need_graph(cfg, &spec)?)?,
        ExperimentKind::OscVsBeta => osc_vs_beta(cfg, &need_graph(cfg, &spec)?)?,
        ExperimentKind::Dini => dini(cfg, &spec)?,
        ExperimentKind::RieszTest => riesz_test(cfg, &need_graph(cfg, &spec)?)?,
        ExperimentKind::Carleson => carleson(cfg, &need_graph(cfg, &spec)?)?,
        ExperimentKind::PerimeterBeta => perimeter_beta(cfg, &need_graph(cfg, &spec)?)?,
    };
    Ok(Report {
        columns: table.columns,
        rows: table.rows,
        summary: Summary {
            experiment: cfg.experiment,
            domain: spec.to_string(),
            version: VERSION.to_string(),
            config_hash: cfg.hash(),
            seed: cfg.sampling.seed,
            checks: table.checks,
            observed: table.observed,
        },
    })
}

/// Writes the report to `cfg.output` (stdout when unset). With CSV output
/// to a file the summary goes next to it as `<stem>.summary.json`.
pub fn write_report(report: &Report, cfg: &ExperimentConfig) -> Result<()> {
    let body = match cfg.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    };
    match &cfg.output {
        None => print!("{body}"),
        Some(path) => {
            std::fs::write(path, body)?;
            if cfg.format == Format::Csv {
                std::fs::write(path.with_extension("summary.json"), report.summary_json()?)?;
            }
        }
    }
    Ok(())
}

fn need_graph(cfg: &ExperimentConfig, spec: &DomainSpec) -> Result<IntrinsicGraph> {
    spec.graph()
        .ok_or_else(|| Error::InvalidArgument(format!("{} needs a graph domain, `{spec}` is not one", cfg.experiment)))
}

fn center(cfg: &ExperimentConfig) -> Point {
    Point::new(cfg.center[0], cfg.center[1], cfg.center[2])
}

/// The graph point with the same parameter as the configured center.
fn snapped(g: &IntrinsicGraph, c: Point) -> Point {
    let (y, t) = g.parameter(c);
    g.graph_map(y, t)
}

fn mc(cfg: &ExperimentConfig, seed: u64) -> SampleConfig {
    SampleConfig::monte_carlo(cfg.samples(), seed)
}

fn osc_scan(cfg: &ExperimentConfig, spec: &DomainSpec) -> Result<Table> {
    let omega = spec.domain();
    let c = spec.graph().map_or(center(cfg), |g| snapped(&g, center(cfg)));
    let label = spec.to_string();
    let mut t = Table::new(&OSC_COLUMNS);
    let mut max_osc: f64 = 0.0;
    for &r in &cfg.radii {
        let seed = radius_seed(cfg.sampling.seed, r);
        let e = osc(&*omega, &Ball::new(c, r)?, &mc(cfg, seed), S_NODES)?;
        max_osc = max_osc.max(e.value - 3.0 * e.stderr);
        t.rows.push(osc_row(&label, c, r, e, seed));
    }
    t.observe("max_osc", max_osc);
    t.check("osc uniform bound (osc ≤ π/2)", max_osc, PI / 2.0);
    Ok(t)
}

fn osc_row(label: &str, c: Point, r: f64, e: Estimate, seed: u64) -> Vec<String> {
    vec![
        label.to_string(),
        num(c.x),
        num(c.y),
        num(c.t),
        num(r),
        "mean".into(),
        num(e.value),
        num(e.stderr),
        e.n.to_string(),
        seed.to_string(),
    ]
}

fn beta_scan(cfg: &ExperimentConfig, g: &IntrinsicGraph) -> Result<Table> {
    let c = snapped(g, center(cfg));
    let mut t = Table::new(&BETA_COLUMNS);
    let mut exps = vec![1.0];
    if cfg.p_exp != 1.0 {
        exps.push(cfg.p_exp);
    }
    exps.push(f64::INFINITY);
    let mut worst: f64 = 0.0;
    for &r in &cfg.radii {
        let ball = Ball::new(c, r)?;
        let seed = radius_seed(cfg.sampling.seed, r);
        let sample = g.surface_sample_ball(&ball, cfg.samples(), seed)?;
        let mut mass_normalised = Vec::new();
        for &p in &exps {
            let b = beta_p(&sample, &ball, p, Normalization::Radius)?;
            t.rows.push(vec![
                g.label().to_string(),
                num(c.x),
                num(c.y),
                num(c.t),
                num(r),
                if p.is_infinite() { "inf".into() } else { num(p) },
                num(b.value),
                num(b.plane.theta()),
                num(b.plane.offset()),
                b.count.to_string(),
                seed.to_string(),
            ]);
            mass_normalised.push(beta_p(&sample, &ball, p, Normalization::Mass)?.value);
        }
        for w in mass_normalised.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
    }
    t.check("beta monotone in p (mass-normalised)", worst, 1e-9);
    Ok(t)
}

fn osc_vs_beta(cfg: &ExperimentConfig, g: &IntrinsicGraph) -> Result<Table> {
    let c = snapped(g, center(cfg));
    let mut t = Table::new(&[
        "domain_label", "cx", "cy", "ct", "r", "osc", "osc_stderr", "max_v", "max_v_stderr", "beta1", "ratio", "n", "seed",
    ]);
    let mut worst = f64::NEG_INFINITY;
    let mut max_ratio: f64 = 0.0;
    for &r in &cfg.radii {
        let seed = radius_seed(cfg.sampling.seed, r);
        let ob = osc_beta_compare(g, &Ball::new(c, r)?, &mc(cfg, seed), cfg.samples(), cfg.enlargement)?;
        if let Some(q) = ob.ratio {
            max_ratio = max_ratio.max(q);
        }
        worst = worst.max(ob.max_v.value - 3.0 * ob.max_v.stderr - K_BETA * ob.beta1.value);
        t.rows.push(vec![
            g.label().to_string(),
            num(c.x),
            num(c.y),
            num(c.t),
            num(r),
            num(ob.osc.value),
            num(ob.osc.stderr),
            num(ob.max_v.value),
            num(ob.max_v.stderr),
            num(ob.beta1.value),
            ob.ratio.map_or("undefined".into(), num),
            ob.osc.n.to_string(),
            seed.to_string(),
        ]);
    }
    t.observe("max_ratio", max_ratio);
    t.observe("k_beta", K_BETA);
    t.check("vertical perimeter bounded by K_β·β₁ at 24r", worst, 0.0);
    Ok(t)
}

/// Slope windows below and above `r = 1`: `[τ − 0.3, τ + 0.4]` and `[−τ − 0.4, −τ + 0.3]`.
pub fn holder_slope_windows(tau: f64) -> ((f64, f64), (f64, f64)) {
    ((tau - 0.3, tau + 0.4), (-tau - 0.4, -tau + 0.3))
}

fn dini(cfg: &ExperimentConfig, spec: &DomainSpec) -> Result<Table> {
    let omega = spec.domain();
    let c = spec.graph().map_or(center(cfg), |g| snapped(&g, center(cfg)));
    let grid = match &cfg.scales {
        Some(s) => s.grid(1.0)?,
        None => ScaleGrid::around(1.0, 2)?,
    };
    let res = dini_integral(&*omega, c, &grid, &mc(cfg, cfg.sampling.seed), S_NODES)?;
    let label = spec.to_string();
    let mut t = Table::new(&OSC_COLUMNS);
    for (r, e) in &res.profile {
        t.rows.push(osc_row(&label, c, *r, *e, radius_seed(cfg.sampling.seed, *r)));
    }
    t.observe("dini", res.estimate.value);
    t.observe("dini_stderr", res.estimate.stderr);
    if let Some(v) = res.lower_tail {
        t.observe("lower_tail", v);
    }
    if let Some(v) = res.upper_tail {
        t.observe("upper_tail", v);
    }
    let logs: Vec<(f64, f64)> = res.profile.iter().map(|(r, e)| (r.ln(), e.value.ln())).collect();
    let trimmed = trim_ends(&logs, 2 * grid.per_octave);
    let fit = fit_decay(&trimmed);
    for (side, f) in [("below", fit.below), ("above", fit.above)] {
        if let Some(f) = f {
            t.observe(format!("slope_{side}"), f.slope);
            t.observe(format!("r2_{side}"), f.r2);
        }
    }
    if let DomainSpec::Holder { tau, .. } = spec {
        let ((lo_b, hi_b), (lo_a, hi_a)) = holder_slope_windows(*tau);
        let below = fit_range(&logs, 2f64.powi(-6), 0.5);
        let above = fit_range(&logs, 2.0, 2f64.powi(6));
        if let Some(f) = below {
            t.observe("slope_r_2^-6_to_2^-1", f.slope);
            t.check_range("Hölder decay slope for r in [2^-6, 2^-1]", f.slope, lo_b, hi_b);
        }
        if let Some(f) = above {
            t.observe("slope_r_2_to_2^6", f.slope);
            t.check_range("Hölder decay slope for r in [2, 2^6]", f.slope, lo_a, hi_a);
        }
    }
    Ok(t)
}

/// Deterministic evaluation points on the graph inside `B(c, 3r/4)`.
pub fn ball_points(g: &IntrinsicGraph, c: Point, r: f64, k: usize) -> Vec<Point> {
    let (yc, tc) = g.parameter(c);
    (0..k)
        .map(|i| {
            let u = (i as f64 + 0.5) / k as f64;
            let (mut dy, mut dt) = (0.35 * r * (2.0 * u - 1.0), 0.02 * r * r * (6.0 * PI * u).sin());
            let mut q = g.graph_map(yc + dy, tc + dt);
            for _ in 0..20 {
                if dist(c, q) <= 0.75 * r {
                    break;
                }
                dy *= 0.5;
                dt *= 0.25;
                q = g.graph_map(yc + dy, tc + dt);
            }
            q
        })
        .collect()
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `max / median` of a table of magnitudes; `0` when everything vanishes.
pub fn spread(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let m = median(&mut v);
    let max = v.last().copied().unwrap_or(0.0);
    if max == 0.0 {
        0.0
    } else {
        max / m
    }
}

fn riesz_test(cfg: &ExperimentConfig, g: &IntrinsicGraph) -> Result<Table> {
    let c = snapped(g, center(cfg));
    let n = cfg.samples();
    let tcfg = TestingConfig { n_outer: n, n_level: (n / 10).max(1), seed: cfg.sampling.seed, mode: Truncation::Smooth };
    let mut t = Table::new(&RIESZ_COLUMNS);
    let (mut direct, mut adjoint) = (Vec::new(), Vec::new());
    for &r in &cfg.radii {
        let ball = Ball::new(c, r)?;
        let pts = ball_points(g, c, r, cfg.points);
        for row in testing_scan(g, &[ball], &cfg.eps_grid, &pts, &tcfg)? {
            direct.push(row.value.norm());
            adjoint.push(row.adjoint.norm());
            t.rows.push(vec![
                g.label().to_string(),
                point(row.ball.center),
                num(row.ball.radius),
                num(row.eps),
                point(row.point),
                num(row.value.re),
                num(row.value.im),
                num(row.adjoint.re),
                num(row.adjoint.im),
                num(row.stderr),
                row.n.to_string(),
                row.seed.to_string(),
            ]);
        }
    }
    let (sd, sa) = (spread(&direct), spread(&adjoint));
    t.observe("max_abs", direct.iter().cloned().fold(0.0, f64::max));
    t.observe("max_abs_adjoint", adjoint.iter().cloned().fold(0.0, f64::max));
    t.observe("spread", sd);
    t.observe("spread_adjoint", sa);
    t.check("testing table has no divergence trend (max ≤ 10·median)", sd, TESTING_SPREAD);
    t.check("adjoint testing table has no divergence trend (max ≤ 10·median)", sa, TESTING_SPREAD);
    Ok(t)
}

fn nested(cfg: &ExperimentConfig) -> NestedConfig {
    NestedConfig {
        n_centers: cfg.sampling.centers,
        n_local: cfg.sampling.local,
        seed: derive_seed(cfg.sampling.seed, 0xC0),
        enlargement: cfg.enlargement,
    }
}

fn carleson(cfg: &ExperimentConfig, g: &IntrinsicGraph) -> Result<Table> {
    let c = snapped(g, center(cfg));
    let scales = cfg.scales.unwrap_or(Scales { s_min: 2f64.powi(-4), s_max: 1.0, per_octave: 1 });
    let mut t = Table::new(&["domain_label", "cx", "cy", "ct", "R", "p_exp", "coefficient", "ratio", "stderr", "n", "seed"]);
    for &big_r in &cfg.radii {
        let grid = scales.grid(big_r)?;
        let seed = radius_seed(cfg.sampling.seed, big_r);
        let mut nc = nested(cfg);
        nc.seed = seed;
        for (name, coeff) in [("beta", PackingCoefficient::Beta), ("osc", PackingCoefficient::Osc)] {
            let e = carleson_scan(g, c, big_r, cfg.p_exp, &grid, coeff, &mc(cfg, seed), &nc)?;
            t.observe(format!("{name}_R={big_r}"), e.value);
            t.rows.push(vec![
                g.label().to_string(),
                num(c.x),
                num(c.y),
                num(c.t),
                num(big_r),
                num(cfg.p_exp),
                name.into(),
                num(e.value),
                num(e.stderr),
                e.n.to_string(),
                seed.to_string(),
            ]);
        }
    }
    Ok(t)
}

fn perimeter_beta(cfg: &ExperimentConfig, g: &IntrinsicGraph) -> Result<Table> {
    let c = snapped(g, center(cfg));
    let s_scales = cfg.scales.unwrap_or(Scales { s_min: 2f64.powi(-8), s_max: 4.0, per_octave: 2 });
    let r_scales = Scales { s_min: 2f64.powi(-4), s_max: 1.0, per_octave: 1 };
    let mut t = Table::new(&[
        "domain_label", "cx", "cy", "ct", "R", "p_exp", "lhs", "lhs_stderr", "rhs", "rhs_stderr", "ratio", "tail_bound", "n", "seed",
    ]);
    let mut worst = f64::NEG_INFINITY;
    let mut ratios = Vec::new();
    for &big_r in &cfg.radii {
        let seed = radius_seed(cfg.sampling.seed, big_r);
        let mut nc = nested(cfg);
        nc.seed = derive_seed(seed, 1);
        let pb = perimeter_beta_bound(
            g,
            &Ball::new(c, big_r)?,
            cfg.p_exp,
            &s_scales.grid(big_r)?,
            &r_scales.grid(big_r)?,
            &mc(cfg, seed),
            &nc,
        )?;
        worst = worst.max(pb.lhs.value - 3.0 * pb.lhs.stderr - K_PERIMETER * (pb.rhs.value + 3.0 * pb.rhs.stderr));
        ratios.push(pb.ratio());
        t.rows.push(vec![
            g.label().to_string(),
            num(c.x),
            num(c.y),
            num(c.t),
            num(big_r),
            num(cfg.p_exp),
            num(pb.lhs.value),
            num(pb.lhs.stderr),
            num(pb.rhs.value),
            num(pb.rhs.stderr),
            num(pb.ratio()),
            num(pb.tail_bound),
            pb.lhs.n.to_string(),
            seed.to_string(),
        ]);
    }
    t.observe("k_perimeter", K_PERIMETER);
    t.check("vertical perimeter bounded by K·(R³ + β-term)", worst, 0.0);
    let positive: Vec<f64> = ratios.iter().copied().filter(|r| *r > 0.0).collect();
    if positive.len() >= 2 {
        let (lo, hi) = positive.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(*r), hi.max(*r)));
        t.observe("ratio_spread", hi / lo);
        t.check("lhs/rhs ratio stable across radii (factor 2)", hi / lo, 2.0);
    }
    Ok(t)
}

fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Point {
    Point::new(
        scale * (2.0 * rng.random::<f64>() - 1.0),
        scale * (2.0 * rng.random::<f64>() - 1.0),
        scale * (2.0 * rng.random::<f64>() - 1.0),
    )
}

fn point_err(a: Point, b: Point) -> f64 {
    let d = (a.x - b.x).abs().max((a.y - b.y).abs()).max((a.t - b.t).abs());
    let m = a.x.abs().max(a.y.abs()).max(a.t.abs()).max(1.0);
    d / m
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn invariants(cfg: &ExperimentConfig, spec: &DomainSpec) -> Result<Table> {
    let mut t = Table::new(&["invariant", "cases", "max_error", "tolerance", "pass"]);
    let n = cfg.samples();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sampling.seed);
    let mut record = |t: &mut Table, name: &str, cases: usize, err: f64, tol: f64| {
        t.rows.push(vec![name.into(), cases.to_string(), num(err), num(tol), (err <= tol).to_string()]);
        t.check(name, err, tol);
    };

    let (mut assoc, mut inv, mut left, mut hom_d, mut hom_k) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let (p, q, r) = (random_point(&mut rng, 10.0), random_point(&mut rng, 10.0), random_point(&mut rng, 10.0));
        let lambda = 0.1 + 9.9 * rng.random::<f64>();
        assoc = assoc.max(point_err(p.mul(q).mul(r), p.mul(q.mul(r))));
        inv = inv.max(point_err(p.mul(p.inv()), Point::IDENTITY).max(point_err(p.inv().mul(p), Point::IDENTITY)));
        left = left.max(rel(dist(r.mul(p), r.mul(q)), dist(p, q)));
        let dp = p.dilate(lambda)?;
        hom_d = hom_d.max(rel(dp.norm_d(), lambda * p.norm_d()));
        hom_k = hom_k.max(rel(dp.norm_koranyi(), lambda * p.norm_koranyi()));
    }
    record(&mut t, "group associativity", n, assoc, 1e-12);
    record(&mut t, "group inverse", n, inv, 1e-12);
    record(&mut t, "left invariance of d", n, left, 1e-12);
    record(&mut t, "dilation homogeneity of the box norm", n, hom_d, 1e-12);
    record(&mut t, "dilation homogeneity of the Korányi norm", n, hom_k, 1e-12);

    let k = 100;
    let mut hom = 0.0f64;
    let mut ident = 0.0f64;
    for _ in 0..k {
        let p = random_point(&mut rng, 2.0);
        let lambda = 0.2 + 4.8 * rng.random::<f64>();
        let dp = p.dilate(lambda)?;
        for id in KernelId::ALL {
            let a = eval_kernel(id, dp)?;
            let b = eval_kernel(id, p)? * lambda.powi(id.degree());
            let e = if b.norm() == 0.0 { a.norm() } else { (a - b).norm() / b.norm() };
            hom = hom.max(e);
        }
        ident = ident.max(check_inverse_kernel_identity(p)?);
    }
    record(&mut t, "kernel homogeneity", k * KernelId::ALL.len(), hom, 1e-10);
    record(&mut t, "kernel inversion identity", k, ident, 1e-10);

    let omega = spec.domain();
    let comp = Complement(omega.clone());
    let c = spec.graph().map_or(center(cfg), |g| snapped(&g, center(cfg)));
    let (mut bound, mut sym) = (0.0f64, 0.0f64);
    for &r in &cfg.radii {
        let ball = Ball::new(c, r)?;
        let seed = radius_seed(cfg.sampling.seed, r);
        let a = osc(&*omega, &ball, &mc(cfg, seed), S_NODES)?;
        let b = osc(&comp, &ball, &mc(cfg, derive_seed(seed, 1)), S_NODES)?;
        bound = bound.max(a.value - 3.0 * a.stderr);
        sym = sym.max(z_score(&a, &b));
    }
    record(&mut t, "osc uniform bound (osc ≤ π/2)", cfg.radii.len(), bound, PI / 2.0);
    record(&mut t, "osc complement symmetry (z-score)", cfg.radii.len(), sym, 3.0);

    let g = random_point(&mut rng, 1.0);
    let lambda = 0.5 + rng.random::<f64>();
    let r0 = cfg.radii[0];
    let moved = Transformed::new(omega.clone(), g, lambda)?;
    let base = Ball::new(c, r0)?;
    let a = osc(&*omega, &base, &mc(cfg, derive_seed(cfg.sampling.seed, 2)), S_NODES)?;
    let b = osc(&moved, &base.transform(g, lambda)?, &mc(cfg, derive_seed(cfg.sampling.seed, 3)), S_NODES)?;
    record(&mut t, "osc invariance under translation and dilation (z-score)", 1, z_score(&a, &b), 3.0);

    if let Some(gr) = spec.graph() {
        graph_invariants(&mut t, &gr, spec, &mut rng, n, &mut record)?;
    }
    Ok(t)
}

fn z_score(a: &Estimate, b: &Estimate) -> f64 {
    let s = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    let d = (a.value - b.value).abs();
    if d == 0.0 {
        0.0
    } else if s == 0.0 {
        f64::INFINITY
    } else {
        d / s
    }
}

fn graph_invariants(
    t: &mut Table,
    g: &IntrinsicGraph,
    spec: &DomainSpec,
    rng: &mut ChaCha8Rng,
    n: usize,
    record: &mut impl FnMut(&mut Table, &str, usize, f64, f64),
) -> Result<()> {
    let (mut comp, mut norm, mut vertical) = (0usize, 0.0f64, 0usize);
    for _ in 0..n {
        let p = random_point(rng, 3.0);
        let total = g.contains(p) as usize + g.below(p) as usize + g.on_graph(p) as usize;
        if total != 1 {
            comp += 1;
        }
        let (y, t0) = (p.y, p.t);
        norm = norm.max((g.normal_nu(y, t0)?.norm() - 1.0).abs());
        if matches!(spec, DomainSpec::Lift { .. }) {
            let s = 6.0 * rng.random::<f64>() - 3.0;
            if g.contains(p) != g.contains(p.shift_t(s)) {
                vertical += 1;
            }
        }
    }
    record(t, "super/sub-graph complementarity (violations)", n, comp as f64, 0.0);
    record(t, "normal has unit length", n, norm, 1e-12);
    if matches!(spec, DomainSpec::Lift { .. }) {
        record(t, "lift indicator constant along vertical lines (violations)", n, vertical as f64, 0.0);
    }
    if let Some(h) = g.holder {
        let mut worst = 0.0f64;
        for _ in 0..n {
            let y = 4.0 * rng.random::<f64>() - 2.0;
            // one pair with |t − s| ≤ 1 and one with |t − s| > 1
            let s0 = 10.0 * rng.random::<f64>() - 5.0;
            let near = s0 + 1.0 - rng.random::<f64>();
            let far = s0 + 1.0 + 5.0 * (1.0 - rng.random::<f64>());
            for (s1, e) in [(near, 0.5 * (1.0 + h.tau)), (far, 0.5 * (1.0 - h.tau))] {
                let q = (g.phi(y, s0) - g.phi(y, s1)).abs() / (s1 - s0).powf(e);
                worst = worst.max(q / h.constant);
            }
        }
        record(t, "vertical Hölder quotients (ratio to constant)", 2 * n, worst, 1.01);
        let lip = g.empirical_lipschitz(Rect::new(-2.0, 2.0, -2.0, 2.0)?, n, derive_seed(rng.random(), 0));
        t.observe("empirical_lipschitz", lip);
    }
    Ok(())
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use heisenberg_osc::experiment::{parse_number, parse_point, parse_range, run, write_report, ExperimentConfig, ExperimentKind};
use heisenberg_osc::{Error, Result};

/// Oscillation, β-number and Riesz-transform experiments on domains in the
/// first Heisenberg group.
///
/// Exit status: 0 when every built-in check passes, 1 when a check fails,
/// 2 on a configuration error.
#[derive(Debug, Parser)]
#[command(name = "heisosc", version)]
struct Cli {
    /// invariants, osc-scan, beta-scan, osc-vs-beta, dini, riesz-test, carleson or perimeter-beta
    experiment: Option<String>,

    /// TOML experiment file; flags given alongside override its values
    #[arg(long)]
    config: Option<PathBuf>,

    /// Domain spec, e.g. `flat:θ=0`, `lift:phi0=abs,a=0.5`, `holder:H=1,tau=0.5`, `slab:t>0`
    #[arg(long)]
    domain: Option<String>,

    /// Ball center `x,y,t`; graph experiments move it onto the graph along the x-direction
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,

    /// Single radius
    #[arg(long, conflicts_with = "radii")]
    radius: Option<String>,

    /// `a..b` (geometric, per-octave count from --scales, default 1) or a comma list
    #[arg(long)]
    radii: Option<String>,

    #[arg(long)]
    samples: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// `smin:smax:per_octave`
    #[arg(long)]
    scales: Option<String>,

    #[arg(long)]
    p_exp: Option<String>,

    /// `a..b` or a comma list of truncation radii
    #[arg(long)]
    eps_grid: Option<String>,

    /// Evaluation points per ball for riesz-test
    #[arg(long)]
    points: Option<usize>,

    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv or json
    #[arg(long)]
    format: Option<String>,

    /// Print the effective configuration as TOML and exit
    #[arg(long)]
    dump_config: bool,

    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let kind: ExperimentKind = cli
                .experiment
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("name an experiment or pass --config".into()))?
                .parse()?;
            let domain = cli.domain.clone().ok_or_else(|| Error::InvalidArgument("--domain is required".into()))?;
            ExperimentConfig::new(kind, domain)
        }
    };
    if let Some(e) = &cli.experiment {
        cfg.experiment = e.parse()?;
    }
    if let Some(d) = &cli.domain {
        cfg.domain = d.clone();
    }
    if let Some(s) = &cli.scales {
        cfg.scales = Some(s.parse()?);
    }
    let per_octave = cfg.scales.map_or(1, |s| s.per_octave);
    if let Some(c) = &cli.center {
        let p = parse_point(c)?;
        cfg.center = [p.x, p.y, p.t];
    }
    if let Some(r) = &cli.radius {
        cfg.radii = vec![parse_number(r)?];
    }
    if let Some(r) = &cli.radii {
        cfg.radii = parse_range(r, per_octave)?;
    }
    if let Some(n) = cli.samples {
        cfg.sampling.n = Some(n);
    }
    if let Some(s) = cli.seed {
        cfg.sampling.seed = s;
    }
    if let Some(p) = &cli.p_exp {
        cfg.p_exp = parse_number(p)?;
    }
    if let Some(e) = &cli.eps_grid {
        cfg.eps_grid = parse_range(e, 1)?;
    }
    if let Some(k) = cli.points {
        cfg.points = k;
    }
    if let Some(o) = &cli.out {
        cfg.output = Some(o.clone());
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("heisosc: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.dump_config {
        return match cfg.to_toml() {
            Ok(s) => {
                print!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("heisosc: {e}");
                ExitCode::from(2)
            }
        };
    }
    log::info!("running {} on {}", cfg.experiment, cfg.domain);
    let report = match run(&cfg).and_then(|r| write_report(&r, &cfg).map(|_| r)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("heisosc: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for c in report.failures() {
            match c.lower {
                Some(lo) => eprintln!("heisosc: check failed: {} (observed {}, allowed [{lo}, {}])", c.name, c.observed, c.upper),
                None => eprintln!("heisosc: check failed: {} (observed {}, bound {})", c.name, c.observed, c.upper),
            }
        }
        ExitCode::from(1)
    }
}

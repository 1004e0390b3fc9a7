use std::f64::consts::PI;
use std::path::PathBuf;

use bellgen_core::correlation::ChshSettings;
use bellgen_core::ParticleKind;
use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "bellgen", version, about = "Reproducible checks of the local outcome-generator model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    /// Pair correlation against angle: analytic, Monte Carlo, classical.
    Sweep,
    /// CHSH statistic, quantum and classical.
    Chsh,
    /// Agreement probability of two sequential measurements.
    Sequential,
    /// Single-particle averages.
    Singles,
    /// Frame-averaged correlation by quadrature.
    Quadrature,
    /// Two-party session with transcript and no-signaling audit.
    Locality,
    /// Gaussian continuous-variable generator.
    Cv,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Sweep => "sweep",
            CommandKind::Chsh => "chsh",
            CommandKind::Sequential => "sequential",
            CommandKind::Singles => "singles",
            CommandKind::Quadrature => "quadrature",
            CommandKind::Locality => "locality",
            CommandKind::Cv => "cv",
        }
    }

    fn takes_angles(self) -> bool {
        matches!(self, CommandKind::Sweep | CommandKind::Sequential | CommandKind::Singles | CommandKind::Quadrature)
    }

    fn takes_settings(self) -> bool {
        matches!(self, CommandKind::Chsh | CommandKind::Locality)
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Particle kind: photon or spin.
    #[arg(long, global = true, value_parser = parse_kind)]
    pub kind: Option<ParticleKind>,
    /// Comma-separated angles in radians; `pi` multiples such as `3pi/8` are accepted.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_angle, conflicts_with = "sweep")]
    pub theta: Vec<f64>,
    /// Inclusive sweep `start:stop:steps`.
    #[arg(long, global = true, value_parser = parse_sweep, allow_hyphen_values = true)]
    pub sweep: Option<SweepSpec>,
    /// Monte Carlo trials per estimate (rounds for `locality`).
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Quadrature nodes.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Machine output format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    pub format: Format,
    /// Output path; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CHSH settings `a,a',b,b'`.
    #[arg(long, global = true, value_parser = parse_settings, allow_hyphen_values = true)]
    pub settings: Option<ChshSettings>,
    /// Quality factor f of the CV generator.
    #[arg(long, global = true)]
    pub quality: Option<f64>,
    /// Center v̂ of the CV generator.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub center: Option<f64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the locality transcript as JSON lines.
    #[arg(long, global = true)]
    pub transcript: Option<PathBuf>,
    /// Inject a signaling fault of this bias into the locality session.
    #[arg(long, global = true)]
    pub fault_bias: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn angles(&self) -> Vec<f64> {
        bellgen_core::numeric::linspace(self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AngleSpec {
    List(Vec<f64>),
    Sweep(SweepSpec),
}

impl AngleSpec {
    pub fn angles(&self) -> Vec<f64> {
        match self {
            AngleSpec::List(v) => v.clone(),
            AngleSpec::Sweep(s) => s.angles(),
        }
    }
}

/// Validated configuration for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub kind: ParticleKind,
    pub angles: AngleSpec,
    pub n_trials: u64,
    pub seed: u64,
    pub nodes: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub settings: ChshSettings,
    pub quality: f64,
    pub center: f64,
    pub threads: Option<usize>,
    pub transcript: Option<PathBuf>,
    pub fault_bias: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, UsageError> {
        let Cli { command, options: o } = cli;
        let kind = o.kind.unwrap_or(ParticleKind::Photon);

        let has_angles = !o.theta.is_empty() || o.sweep.is_some();
        if has_angles && !command.takes_angles() {
            return Err(usage(format!("--theta/--sweep do not apply to `{}`", command.name())));
        }
        if o.settings.is_some() && !command.takes_settings() {
            return Err(usage(format!("--settings does not apply to `{}`", command.name())));
        }
        if o.nodes.is_some() && command != CommandKind::Quadrature {
            return Err(usage("--nodes only applies to `quadrature`"));
        }
        if (o.quality.is_some() || o.center.is_some()) && command != CommandKind::Cv {
            return Err(usage("--quality/--center only apply to `cv`"));
        }
        if (o.transcript.is_some() || o.fault_bias.is_some()) && command != CommandKind::Locality {
            return Err(usage("--transcript/--fault-bias only apply to `locality`"));
        }
        if o.kind.is_some() && command == CommandKind::Cv {
            return Err(usage("--kind does not apply to `cv`"));
        }
        if o.samples.is_some() && command == CommandKind::Quadrature {
            return Err(usage("--samples does not apply to `quadrature`"));
        }

        let n_trials = o.samples.unwrap_or(100_000);
        if n_trials < 1 {
            return Err(usage("--samples must be at least 1"));
        }
        if command == CommandKind::Cv && n_trials < 2 {
            return Err(usage("`cv` needs --samples >= 2"));
        }
        let nodes = o.nodes.unwrap_or(match kind {
            ParticleKind::Photon => 256,
            ParticleKind::SpinHalf => 10_000,
        });
        if nodes < 1 {
            return Err(usage("--nodes must be at least 1"));
        }
        if o.threads == Some(0) {
            return Err(usage("--threads must be at least 1"));
        }
        if let Some(b) = o.fault_bias {
            if !(0.0..1.0).contains(&b) {
                return Err(usage("--fault-bias must lie in [0, 1)"));
            }
        }
        let quality = o.quality.unwrap_or(1.0);
        if !(quality.is_finite() && quality > 0.0) {
            return Err(usage("--quality must be positive and finite"));
        }

        let angles = match (o.sweep, o.theta.is_empty()) {
            (Some(s), _) => AngleSpec::Sweep(s),
            (None, false) => AngleSpec::List(o.theta),
            (None, true) => default_angles(command, kind),
        };

        Ok(RunConfig {
            command,
            kind,
            angles,
            n_trials,
            seed: o.seed,
            nodes,
            format: o.format,
            out: o.out,
            settings: o.settings.unwrap_or_else(|| ChshSettings::optimal(kind)),
            quality,
            center: o.center.unwrap_or(0.0),
            threads: o.threads,
            transcript: o.transcript,
            fault_bias: o.fault_bias,
        })
    }
}

fn default_angles(command: CommandKind, kind: ParticleKind) -> AngleSpec {
    let span = match kind {
        ParticleKind::Photon => PI / 2.0,
        ParticleKind::SpinHalf => PI,
    };
    match command {
        CommandKind::Quadrature => AngleSpec::List(vec![PI / 6.0]),
        CommandKind::Sequential | CommandKind::Singles => {
            AngleSpec::Sweep(SweepSpec { start: 0.0, stop: span * 7.0 / 8.0, steps: 8 })
        }
        _ => AngleSpec::Sweep(SweepSpec { start: 0.0, stop: span, steps: 9 }),
    }
}

fn parse_kind(s: &str) -> Result<ParticleKind, String> {
    s.parse().map_err(|e: bellgen_core::Error| e.to_string())
}

/// Parses a decimal angle or a multiple of pi: `0.3`, `pi`, `-pi/4`, `3pi/8`, `3*pi/8`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.as_str()),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let bad = || format!("invalid angle `{s}`");
    let mut value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim_end_matches('*');
            let c: f64 = if coef.is_empty() { 1.0 } else { coef.parse().map_err(|_| bad())? };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    if let Some(d) = den {
        let d: f64 = d.parse().map_err(|_| bad())?;
        if d == 0.0 {
            return Err(bad());
        }
        value /= d;
    }
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(if neg { -value } else { value })
}

pub fn parse_sweep(s: &str) -> Result<SweepSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, steps] = parts[..] else {
        return Err(format!("sweep `{s}` is not start:stop:steps"));
    };
    let steps: usize = steps.trim().parse().map_err(|_| format!("invalid step count `{steps}`"))?;
    if steps < 1 {
        return Err("sweep needs at least one step".into());
    }
    Ok(SweepSpec { start: parse_angle(start)?, stop: parse_angle(stop)?, steps })
}

pub fn parse_settings(s: &str) -> Result<ChshSettings, String> {
    let v: Vec<f64> = s.split(',').map(parse_angle).collect::<Result<_, _>>()?;
    let [a, a_prime, b, b_prime] = v[..] else {
        return Err(format!("settings `{s}` need four angles a,a',b,b'"));
    };
    Ok(ChshSettings::new(a, a_prime, b, b_prime))
}

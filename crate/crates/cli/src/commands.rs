//! One function per subcommand, each returning a [`Report`].
//!
//! Monte Carlo rows use seed `seed + i` for row `i`, so any single row can be
//! reproduced from the header seed and its position.

use std::f64::consts::SQRT_2;
use std::fs::File;
use std::io::BufWriter;

use anyhow::{Context, Result};
use bellgen_core::classical::{classical_chsh_max, classical_pair_correlation, ClassicalModel};
use bellgen_core::correlation::{chsh, pair_correlation_analytic, quantum_chsh, reference_frame_average};
use bellgen_core::cv::{cv_sample, CvGenerator, CvObservable};
use bellgen_core::locality::{run_session, verify_no_signaling, LogEntry, Phase, SignalingFault, TestStatus};
use bellgen_core::measurement::{predicted_same_probability, sequential_same_probability};
use bellgen_core::montecarlo::{ensemble_correlation_at, singles_average_at};
use bellgen_core::{ChshSettings, ParticleKind};

use crate::config::{CommandKind, RunConfig};
use crate::output::{round_sig15, Cell, Report};

/// Standard errors allowed between a Monte Carlo estimate and its target.
pub const MC_TOLERANCE_SE: f64 = 5.0;

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let mut report = match cfg.command {
        CommandKind::Sweep => cmd_sweep(cfg),
        CommandKind::Chsh => cmd_chsh(cfg),
        CommandKind::Sequential => cmd_sequential(cfg),
        CommandKind::Singles => cmd_singles(cfg),
        CommandKind::Quadrature => cmd_quadrature(cfg),
        CommandKind::Locality => cmd_locality(cfg),
        CommandKind::Cv => cmd_cv(cfg),
    }?;
    let all = report.all_passed();
    report.meta("all_checks_passed", all);
    Ok(report)
}

fn header(cfg: &RunConfig, columns: &[&str]) -> Report {
    let mut r = Report::new(columns);
    r.meta("command", cfg.command.name());
    if cfg.command != CommandKind::Cv {
        r.meta("kind", cfg.kind.name());
    }
    r.meta("seed", cfg.seed);
    if cfg.command != CommandKind::Quadrature {
        r.meta("n_trials", cfg.n_trials);
    }
    if cfg.command == CommandKind::Quadrature {
        r.meta("nodes", cfg.nodes as u64);
    }
    r.meta("version", bellgen_core::VERSION);
    r
}

fn row_seed(cfg: &RunConfig, i: usize) -> u64 {
    cfg.seed.wrapping_add(i as u64)
}

fn fmt_z(z: f64) -> String {
    format!("z = {z:.3}")
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Report> {
    let mut r = header(cfg, &["theta", "analytic", "monte_carlo", "std_error", "classical_factorized"]);
    for (i, theta) in cfg.angles.angles().into_iter().enumerate() {
        let theta = round_sig15(theta);
        let analytic = pair_correlation_analytic(cfg.kind, theta);
        let mc = ensemble_correlation_at(cfg.kind, theta, 0.0, cfg.n_trials, row_seed(cfg, i))?;
        let classical = classical_pair_correlation(cfg.kind, ClassicalModel::FactorizedProjection, theta);
        r.row(vec![Cell::angle(theta), analytic.into(), mc.estimate.into(), mc.std_error.into(), classical.into()]);
        r.check(
            format!("monte_carlo_within_5se[{i}]"),
            mc.within(analytic, MC_TOLERANCE_SE),
            fmt_z(mc.z_score(analytic)),
        );
    }
    Ok(r)
}

pub fn cmd_chsh(cfg: &RunConfig) -> Result<Report> {
    let mut r = header(
        cfg,
        &[
            "term",
            "alice",
            "bob",
            "sign",
            "quantum_analytic",
            "quantum_monte_carlo",
            "std_error",
            "classical_factorized",
            "classical_sign",
        ],
    );
    let s = cfg.settings;
    for (name, v) in [("a", s.a), ("a_prime", s.a_prime), ("b", s.b), ("b_prime", s.b_prime)] {
        r.meta(&format!("setting_{name}"), Cell::angle(v));
    }

    let classical = |model| move |x: f64, y: f64| classical_pair_correlation(cfg.kind, model, x - y);
    let labels = ["E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"];
    let (mut s_mc, mut var_mc) = (0.0, 0.0);
    for (i, ((x, y, sign), label)) in s.terms().into_iter().zip(labels).enumerate() {
        let mc = ensemble_correlation_at(cfg.kind, x, y, cfg.n_trials, row_seed(cfg, i))?;
        s_mc += sign * mc.estimate;
        var_mc += mc.std_error * mc.std_error;
        r.row(vec![
            label.into(),
            Cell::angle(x),
            Cell::angle(y),
            sign.into(),
            pair_correlation_analytic(cfg.kind, x - y).into(),
            mc.estimate.into(),
            mc.std_error.into(),
            classical(ClassicalModel::FactorizedProjection)(x, y).into(),
            classical(ClassicalModel::DeterministicSign)(x, y).into(),
        ]);
    }
    let q = quantum_chsh(cfg.kind, &s);
    let fact = chsh(&s, classical(ClassicalModel::FactorizedProjection));
    let sign = chsh(&s, classical(ClassicalModel::DeterministicSign));
    let se = var_mc.sqrt();
    r.row(vec![
        "S".into(),
        Cell::text(""),
        Cell::text(""),
        Cell::text(""),
        q.signed.into(),
        s_mc.into(),
        se.into(),
        fact.signed.into(),
        sign.signed.into(),
    ]);

    let max_fact = classical_chsh_max(cfg.kind, ClassicalModel::FactorizedProjection);
    let max_sign = classical_chsh_max(cfg.kind, ClassicalModel::DeterministicSign);
    r.meta("quantum_abs", q.abs);
    r.meta("classical_factorized_max", max_fact.value);
    r.meta("classical_sign_max", max_sign.value);

    if s == ChshSettings::optimal(cfg.kind) {
        let target = 2.0 * SQRT_2;
        r.check("quantum_analytic_is_2sqrt2", (q.abs - target).abs() <= 1e-12, format!("|S| = {}", q.abs));
    }
    let z = if s_mc == q.signed { 0.0 } else { (s_mc - q.signed) / se };
    r.check("quantum_monte_carlo_within_5se", z.abs() <= MC_TOLERANCE_SE, fmt_z(z));
    for (name, v) in [("classical_factorized", fact.abs), ("classical_sign", sign.abs)] {
        r.check(format!("{name}_within_bell_bound"), v <= 2.0 + 1e-12, format!("|S| = {v}"));
    }
    for (name, v) in [("classical_factorized_max", max_fact.value), ("classical_sign_max", max_sign.value)] {
        r.check(format!("{name}_within_bell_bound"), v <= 2.0 + 1e-9, format!("max |S| = {v}"));
    }
    Ok(r)
}

pub fn cmd_sequential(cfg: &RunConfig) -> Result<Report> {
    let mut r = header(cfg, &["theta", "predicted", "empirical", "std_error"]);
    for (i, theta) in cfg.angles.angles().into_iter().enumerate() {
        let theta = round_sig15(theta);
        let predicted = predicted_same_probability(cfg.kind, theta);
        let mc = sequential_same_probability(cfg.kind, theta, cfg.n_trials, row_seed(cfg, i))?;
        r.row(vec![Cell::angle(theta), predicted.into(), mc.estimate.into(), mc.std_error.into()]);
        r.check(
            format!("empirical_within_5se[{i}]"),
            mc.within(predicted, MC_TOLERANCE_SE),
            fmt_z(mc.z_score(predicted)),
        );
    }
    Ok(r)
}

pub fn cmd_singles(cfg: &RunConfig) -> Result<Report> {
    let mut r = header(cfg, &["theta", "average", "std_error", "bound"]);
    let bound = MC_TOLERANCE_SE / (cfg.n_trials as f64).sqrt();
    for (i, theta) in cfg.angles.angles().into_iter().enumerate() {
        let theta = round_sig15(theta);
        let mc = singles_average_at(cfg.kind, theta, cfg.n_trials, row_seed(cfg, i))?;
        r.row(vec![Cell::angle(theta), mc.estimate.into(), mc.std_error.into(), bound.into()]);
        r.check(
            format!("average_within_bound[{i}]"),
            mc.estimate.abs() <= bound,
            format!("|avg| = {}", mc.estimate.abs()),
        );
    }
    Ok(r)
}

/// Absolute tolerance of the quadrature check for each kind.
pub fn quadrature_tolerance(kind: ParticleKind) -> f64 {
    match kind {
        ParticleKind::Photon => 1e-10,
        ParticleKind::SpinHalf => 1e-3,
    }
}

pub fn cmd_quadrature(cfg: &RunConfig) -> Result<Report> {
    let mut r = header(cfg, &["theta", "quadrature", "analytic", "abs_error", "tolerance"]);
    let tol = quadrature_tolerance(cfg.kind);
    for (i, theta) in cfg.angles.angles().into_iter().enumerate() {
        let theta = round_sig15(theta);
        let q = reference_frame_average(cfg.kind, theta, 0.0, cfg.nodes)?;
        let analytic = pair_correlation_analytic(cfg.kind, theta);
        let err = (q - analytic).abs();
        r.row(vec![Cell::angle(theta), q.into(), analytic.into(), err.into(), tol.into()]);
        r.check(format!("quadrature_within_tolerance[{i}]"), err <= tol, format!("error = {err:e}"));
    }
    Ok(r)
}

fn group_rows(
    r: &mut Report,
    party: &str,
    local: &[LogEntry],
    remote: &[LogEntry],
) -> bellgen_core::locality::NoSignalingReport {
    let audit = verify_no_signaling(local, remote);
    for g in &audit.groups {
        r.row(vec![party.into(), Cell::angle(g.remote_setting), g.n.into(), g.n_plus.into(), g.p_plus().into()]);
    }
    audit
}

pub fn cmd_locality(cfg: &RunConfig) -> Result<Report> {
    let mut r = header(cfg, &["party", "remote_setting", "n", "n_plus", "p_plus"]);
    let s = cfg.settings;
    // Cycle all four setting pairs so each party sees both remote settings.
    let cycle = [(s.a, s.b), (s.a, s.b_prime), (s.a_prime, s.b), (s.a_prime, s.b_prime)];
    let rounds = cfg.n_trials as usize;
    let schedule: Vec<(f64, f64)> = (0..rounds).map(|i| cycle[i % 4]).collect();
    let fault = cfg.fault_bias.map(|bias| SignalingFault { bias, trigger: s.b });
    let session = run_session(cfg.kind, &schedule, cfg.seed, fault)?;

    if let Some(path) = &cfg.transcript {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        session.transcript.write_jsonl(BufWriter::new(f))?;
    }

    let distribution = session.transcript.count_phase(Phase::Distribution) as u64;
    let inter_party = session.transcript.inter_party_measurement_messages() as u64;
    r.meta("rounds", rounds as u64);
    r.meta("distribution_messages", distribution);
    r.meta("inter_party_measurement_messages", inter_party);
    if let Some(b) = cfg.fault_bias {
        r.meta("fault_bias", b);
    }

    let audit_a = group_rows(&mut r, "A", &session.log_a, &session.log_b);
    let audit_b = group_rows(&mut r, "B", &session.log_b, &session.log_a);

    r.check("distribution_messages", distribution == 2 * rounds as u64, format!("{distribution} messages"));
    r.check("no_inter_party_measurement_messages", inter_party == 0, format!("{inter_party} messages"));
    for (party, audit) in [("A", &audit_a), ("B", &audit_b)] {
        r.meta(&format!("statistic_{party}"), audit.statistic);
        r.meta(&format!("status_{party}"), format!("{:?}", audit.status).to_lowercase());
        r.check(
            format!("marginal_independent_{party}"),
            audit.status == TestStatus::Pass,
            format!("{:?}, {}", audit.status, fmt_z(audit.statistic)),
        );
    }
    Ok(r)
}

pub fn cmd_cv(cfg: &RunConfig) -> Result<Report> {
    let mut r = header(
        cfg,
        &[
            "observable",
            "sigma",
            "center",
            "first_moment",
            "sample_mean",
            "mean_std_error",
            "sample_variance",
            "variance_std_error",
        ],
    );
    r.meta("quality", cfg.quality);
    let mut sigmas = Vec::new();
    for (i, obs) in [CvObservable::Position, CvObservable::Momentum].into_iter().enumerate() {
        let gen = CvGenerator::new(obs, cfg.center, cfg.quality)?;
        let sigma = gen.sigma()?;
        sigmas.push(sigma);
        let first = gen.first_moment_quadrature(20_001);
        let sample = cv_sample(&gen, row_seed(cfg, i), cfg.n_trials)?;
        r.row(vec![
            obs.to_string().into(),
            sigma.into(),
            cfg.center.into(),
            first.into(),
            sample.mean.into(),
            sample.mean_std_error.into(),
            sample.variance.into(),
            sample.variance_std_error.into(),
        ]);
        let tol = 1e-10 * cfg.center.abs().max(1.0);
        r.check(
            format!("first_moment_{obs}"),
            (first - cfg.center).abs() <= tol,
            format!("error = {:e}", first - cfg.center),
        );
        let z = (sample.mean - cfg.center) / (sigma / (cfg.n_trials as f64).sqrt());
        r.check(format!("sample_mean_within_5se_{obs}"), z.abs() <= MC_TOLERANCE_SE, fmt_z(z));
        let var = sigma * sigma;
        let z = (sample.variance - var) / (var * (2.0 / cfg.n_trials as f64).sqrt());
        r.check(format!("sample_variance_within_5se_{obs}"), z.abs() <= MC_TOLERANCE_SE, fmt_z(z));
    }
    let product = sigmas[0] * sigmas[1];
    r.meta("uncertainty_product", product);
    r.check("uncertainty_product_is_half", (product - 0.5).abs() <= 1e-15, format!("product = {product}"));
    Ok(r)
}

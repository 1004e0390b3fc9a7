//! Reproducible ensemble simulation.
//!
//! Every trial draws from its own ChaCha8 substream selected by
//! `(master seed, trial index)`. Trials are grouped into fixed-size chunks and
//! reduced in chunk order, so results are bit-identical for any worker count.
//!
//! [`joint_outcome_sample`] draws a pair of outcomes from the correlation `E`
//! computed from *both* parties' generators. That is ensemble bookkeeping
//! used to reproduce joint statistics; it is not a local outcome mechanism.
//! Local, per-party sampling lives in [`crate::measurement`] and
//! [`crate::locality`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::pair_correlation_frames;
use crate::error::{Error, Result};
use crate::generators::{Particle, ParticleKind, Sign, EXPECTATION_TOL};
use crate::measurement::measure;
use crate::numeric::CompensatedSum;
use crate::source::produce_pair;
use crate::with_particle;

/// Trials per reduction chunk. Part of the reproducibility contract.
pub const CHUNK_TRIALS: u64 = 4096;

/// Address of an independent random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStreamSpec {
    pub seed: u64,
    pub index: u64,
}

impl RandomStreamSpec {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }
}

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    RandomStreamSpec::new(seed, index).rng()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub estimate: f64,
    /// Sample standard deviation over `√n_trials`.
    pub std_error: f64,
    pub n_trials: u64,
    pub seed: u64,
}

impl EnsembleReport {
    /// `|estimate − target|` in units of the standard error. Differences at
    /// rounding level count as 0, so a zero-variance ensemble matches a target
    /// like `cos²(π/2) ≈ 4e-33`.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.estimate - target).abs();
        if diff <= 4.0 * f64::EPSILON * (1.0 + target.abs()) {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn within(&self, target: f64, n_se: f64) -> bool {
        self.z_score(target) <= n_se
    }
}

/// Runs `n_trials` independent trials of `trial` and reports the sample mean.
pub fn run_trials<F>(n_trials: u64, seed: u64, trial: F) -> Result<EnsembleReport>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    run_trials_offset(n_trials, seed, 0, trial)
}

/// As [`run_trials`], with trial `t` drawing from substream `first_index + t`.
pub fn run_trials_offset<F>(n_trials: u64, seed: u64, first_index: u64, trial: F) -> Result<EnsembleReport>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be at least 1".into()));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let n_chunks = n_trials.div_ceil(CHUNK_TRIALS);
    let partials: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK_TRIALS;
            let end = (start + CHUNK_TRIALS).min(n_trials);
            let mut sum = CompensatedSum::new();
            let mut sum_sq = CompensatedSum::new();
            for t in start..end {
                let mut rng = base.clone();
                rng.set_stream(first_index + t);
                let x = trial(&mut rng);
                sum.add(x);
                sum_sq.add(x * x);
            }
            (sum.value(), sum_sq.value())
        })
        .collect();

    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    for (s, q) in partials {
        sum.add(s);
        sum_sq.add(q);
    }
    let n = n_trials as f64;
    let mean = sum.value() / n;
    let std_error = if n_trials > 1 {
        let var = ((sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(EnsembleReport { estimate: mean, std_error, n_trials, seed })
}

/// Draws `(s1, s2)` from `P(s1, s2) = (1 + s1·s2·E)/4`: uniform marginals, `⟨s1 s2⟩ = E`.
pub fn joint_outcome_sample<R: Rng + ?Sized>(e: f64, rng: &mut R) -> Result<(Sign, Sign)> {
    if !e.is_finite() || e.abs() > 1.0 + EXPECTATION_TOL {
        return Err(Error::Domain { what: "pair correlation", value: e });
    }
    let p_same = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
    let s1 = Sign::random(rng);
    let same = rng.random::<f64>() < p_same;
    Ok((s1, if same { s1 } else { s1.flip() }))
}

/// Mean outcome of particle 1 measured along `a`, over freshly produced pairs.
pub fn singles_average<P: Particle>(a: &P::Direction, n_trials: u64, seed: u64) -> Result<EnsembleReport> {
    run_trials(n_trials, seed, |rng| {
        let pair = produce_pair::<P, _>(rng);
        measure::<P, _>(&pair.frame_1, a, rng).outcome.value()
    })
}

pub fn singles_average_at(kind: ParticleKind, theta: f64, n_trials: u64, seed: u64) -> Result<EnsembleReport> {
    with_particle!(kind, P => singles_average::<P>(&P::direction(theta), n_trials, seed))
}

/// Mean of `s1·s2` where each pair's outcomes are drawn at its model correlation.
pub fn ensemble_correlation<P: Particle>(
    a: &P::Direction,
    b: &P::Direction,
    n_trials: u64,
    seed: u64,
) -> Result<EnsembleReport> {
    ensemble_correlation_offset::<P>(a, b, n_trials, seed, 0)
}

pub fn ensemble_correlation_offset<P: Particle>(
    a: &P::Direction,
    b: &P::Direction,
    n_trials: u64,
    seed: u64,
    first_index: u64,
) -> Result<EnsembleReport> {
    run_trials_offset(n_trials, seed, first_index, |rng| {
        let pair = produce_pair::<P, _>(rng);
        let e = pair_correlation_frames::<P>(a, &pair.frame_1, b, &pair.frame_2);
        let (s1, s2) = joint_outcome_sample(e, rng).expect("unit generators give |E| <= 1");
        (s1 * s2).value()
    })
}

pub fn ensemble_correlation_at(
    kind: ParticleKind,
    theta_a: f64,
    theta_b: f64,
    n_trials: u64,
    seed: u64,
) -> Result<EnsembleReport> {
    with_particle!(kind, P => ensemble_correlation::<P>(&P::direction(theta_a), &P::direction(theta_b), n_trials, seed))
}

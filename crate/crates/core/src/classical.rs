//! Classical baselines.
//!
//! * `FactorizedProjection` keeps only `Re G` and factorizes the joint
//!   outcome probability given the shared frame, so each side samples from
//!   `(1 + Re G)/2` independently.
//! * `DeterministicSign` is the textbook local hidden-variable model: each
//!   outcome is the sign of `Re G`.
//!
//! Both obey `|CHSH| ≤ 2`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::wrap_signed;
use crate::correlation::{chsh, ChshSettings};
use crate::error::{Error, Result};
use crate::generators::{Particle, ParticleKind, Sign};
use crate::measurement::measure;
use crate::montecarlo::{run_trials, EnsembleReport};
use crate::source::produce_pair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalModel {
    FactorizedProjection,
    DeterministicSign,
}

impl ClassicalModel {
    pub const ALL: [ClassicalModel; 2] = [ClassicalModel::FactorizedProjection, ClassicalModel::DeterministicSign];

    pub fn name(self) -> &'static str {
        match self {
            ClassicalModel::FactorizedProjection => "factorized_projection",
            ClassicalModel::DeterministicSign => "deterministic_sign",
        }
    }
}

impl fmt::Display for ClassicalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassicalModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "factorized_projection" | "factorized" => Ok(ClassicalModel::FactorizedProjection),
            "deterministic_sign" | "sign" => Ok(ClassicalModel::DeterministicSign),
            _ => Err(Error::UnknownTag { what: "classical model", name: s.to_string() }),
        }
    }
}

/// Frame-averaged correlation of the classical baseline, in closed form.
pub fn classical_pair_correlation(kind: ParticleKind, model: ClassicalModel, theta_ab: f64) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    match (kind, model) {
        (ParticleKind::Photon, ClassicalModel::FactorizedProjection) => 0.5 * (2.0 * theta_ab).cos(),
        (ParticleKind::SpinHalf, ClassicalModel::FactorizedProjection) => -theta_ab.cos() / 3.0,
        (ParticleKind::Photon, ClassicalModel::DeterministicSign) => {
            // Period π; reduce to |θ| ∈ [0, π/2].
            let t = (wrap_signed(2.0 * theta_ab) / 2.0).abs();
            1.0 - 4.0 * t / PI
        }
        (ParticleKind::SpinHalf, ClassicalModel::DeterministicSign) => {
            let t = wrap_signed(theta_ab).abs();
            -(1.0 - t / FRAC_PI_2)
        }
    }
}

/// Deterministic outcome `sign(Re G(a|σ))`, with ties resolved to `+1`.
pub fn sign_outcome<P: Particle>(a: &P::Direction, frame: &P::Frame) -> Sign {
    Sign::from_bool(P::expectation(a, frame) >= 0.0)
}

/// Monte Carlo of the factorized baseline: both sides sample independently from their own frame.
pub fn factorized_correlation_mc<P: Particle>(
    a: &P::Direction,
    b: &P::Direction,
    n_trials: u64,
    seed: u64,
) -> Result<EnsembleReport> {
    run_trials(n_trials, seed, |rng| {
        let pair = produce_pair::<P, _>(rng);
        let s1 = measure::<P, _>(&pair.frame_1, a, rng).outcome;
        let s2 = measure::<P, _>(&pair.frame_2, b, rng).outcome;
        (s1 * s2).value()
    })
}

/// Largest `|CHSH|` found and the settings achieving it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshMaximum {
    pub value: f64,
    pub settings: ChshSettings,
}

const GRID: usize = 64;
const REFINE_SEEDS: usize = 8;
const REFINE_MIN_STEP: f64 = 1e-10;

/// Maximizes `|CHSH|` of a classical baseline over settings.
///
/// The correlation depends only on angle differences, so `a = 0` is fixed and
/// `(a′, b, b′)` are searched on a 64³ grid over one period, followed by a
/// compass search from the best grid cells.
pub fn classical_chsh_max(kind: ParticleKind, model: ClassicalModel) -> ChshMaximum {
    let period = match kind {
        ParticleKind::Photon => std::f64::consts::PI,
        ParticleKind::SpinHalf => std::f64::consts::TAU,
    };
    let objective = |x: [f64; 3]| {
        let s = ChshSettings::new(0.0, x[0], x[1], x[2]);
        chsh(&s, |p, q| classical_pair_correlation(kind, model, p - q)).abs
    };
    let h = period / GRID as f64;

    let mut grid: Vec<(f64, [f64; 3])> = (0..GRID)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..GRID).flat_map(move |j| (0..GRID).map(move |k| [i as f64 * h, j as f64 * h, k as f64 * h]))
        })
        .map(|x| (objective(x), x))
        .collect();
    grid.sort_by(|p, q| q.0.total_cmp(&p.0));

    let mut best = grid[0];
    for &(start_value, start) in grid.iter().take(REFINE_SEEDS) {
        let (value, x) = compass_search(&objective, start, start_value, h / 2.0);
        if value > best.0 {
            best = (value, x);
        }
    }
    ChshMaximum { value: best.0, settings: ChshSettings::new(0.0, best.1[0], best.1[1], best.1[2]) }
}

fn compass_search<F: Fn([f64; 3]) -> f64>(f: &F, mut x: [f64; 3], mut fx: f64, mut step: f64) -> (f64, [f64; 3]) {
    while step > REFINE_MIN_STEP {
        let mut improved = false;
        for d in 0..3 {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[d] += dir * step;
                let fy = f(y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (fx, x)
}

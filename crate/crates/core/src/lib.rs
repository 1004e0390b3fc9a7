//! Local outcome-generator model of Bell pair correlations.
//!
//! Each particle of a pair carries a local frame and a generator `G`, a unit
//! complex number for photons and a unit quaternion for spin-½. A single
//! measurement sees only `Re G`; the pair correlation is the real part of the
//! product of the two generators and reproduces `cos 2θ` (photons) and
//! `−cos θ` (spin-½), reaching `|CHSH| = 2√2`. Restricting `G` to its real
//! part gives the classical baselines in [`classical`], which stay below 2.
//!
//! Modules:
//! * [`algebra`]: complex/quaternion arithmetic, directions, rotors
//! * [`generators`]: frames, generators, outcome probabilities
//! * [`source`]: pair production
//! * [`measurement`]: sampling and the post-measurement frame update
//! * [`correlation`]: pair correlations, frame averages, CHSH
//! * [`classical`]: factorized and deterministic baselines
//! * [`montecarlo`]: reproducible ensembles
//! * [`locality`]: two-party sessions and the no-signaling audit
//! * [`cv`]: Gaussian continuous-variable generators

pub mod algebra;
pub mod classical;
pub mod correlation;
pub mod cv;
pub mod error;
pub mod generators;
pub mod locality;
pub mod measurement;
pub mod montecarlo;
pub mod numeric;
pub mod source;

pub use algebra::{
    angle_between, qmul, rotation_axis, rotor, AngleBetween, Complex, Direction2, Direction3, Hypercomplex, Quaternion,
};
pub use classical::{classical_chsh_max, classical_pair_correlation, ClassicalModel};
pub use correlation::{
    chsh, pair_correlation_analytic, pair_correlation_frames, quantum_chsh, reference_frame_average, ChshSettings,
    ChshValue,
};
pub use error::{Error, Result};
pub use generators::{
    expectation, outcome_probability, photon_generator, spin_generator, Particle, ParticleKind, Photon, PhotonFrame,
    Sign, SpinFrame, SpinHalf,
};
pub use montecarlo::{EnsembleReport, RandomStreamSpec};
pub use source::{produce_pair, PairState};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

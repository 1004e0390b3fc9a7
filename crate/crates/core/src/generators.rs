//! Outcome generators.
//!
//! Each particle carries a local frame `σ`. Its generator `G(a|σ)` for a
//! measurement direction `a` is a unit complex number (photon, `e^{±i2θ_ar}`)
//! or a unit quaternion (spin-½, `s·e^{θ_ar u}`). The measurable expectation
//! is the real part of `G`; pair correlations come from products of
//! generators, see [`crate::correlation`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{rotation_axis, rotor, AngleBetween, Complex, Direction2, Direction3, Hypercomplex, Quaternion};
use crate::error::{Error, Result};
use crate::{measurement, source};

/// Slack allowed on expectations before they are treated as out of `[−1, 1]`.
pub const EXPECTATION_TOL: f64 = 1e-9;

/// A value in `{+1, −1}`: outcomes, orientations and spin signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_bool(plus: bool) -> Sign {
        if plus {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Sign {
        Sign::from_bool(rng.random::<bool>())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bool(self == rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleKind {
    Photon,
    SpinHalf,
}

impl ParticleKind {
    /// Angular multiplicity `l` in `(−1)^l cos lθ_ab`.
    pub fn l(self) -> u32 {
        match self {
            ParticleKind::Photon => 2,
            ParticleKind::SpinHalf => 1,
        }
    }

    /// Dimension of the measurement space.
    pub fn dimension(self) -> u32 {
        match self {
            ParticleKind::Photon => 2,
            ParticleKind::SpinHalf => 3,
        }
    }

    /// `(−1)^l`: +1 for photons, −1 for spin-½.
    pub fn anticorrelation_sign(self) -> f64 {
        if self.l() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ParticleKind::Photon => "photon",
            ParticleKind::SpinHalf => "spin",
        }
    }
}

impl fmt::Display for ParticleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParticleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "photon" => Ok(ParticleKind::Photon),
            "spin" | "spin_half" | "spin-half" | "spin1/2" => Ok(ParticleKind::SpinHalf),
            _ => Err(Error::UnknownTag { what: "particle kind", name: s.to_string() }),
        }
    }
}

/// Frame `(r, ±ẑ)` on S¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonFrame {
    pub r: Direction2,
    pub orientation: Sign,
}

/// Frame `(r, ±ŷ, ±ẑ, s)` on S².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinFrame {
    pub r: Direction3,
    pub orientation: Sign,
    pub s: Sign,
}

/// `e^{i·orientation·2θ_ar}`.
pub fn photon_generator(a: &Direction2, frame: &PhotonFrame) -> Complex {
    let theta_ar = a.angle_between(&frame.r);
    Complex::from_phase(frame.orientation.value() * 2.0 * theta_ar)
}

/// `s·e^{θ_ar·orientation·u}` with `u = (r×a)/|r×a|`.
///
/// When `a ∥ r` the axis is undefined, but `sin θ_ar = 0` so the result is
/// `±s` for any axis; a fixed vector orthogonal to `r` is used.
pub fn spin_generator(a: &Direction3, frame: &SpinFrame) -> Quaternion {
    let theta_ar = a.angle_between(&frame.r);
    let u = rotation_axis(&frame.r, a).unwrap_or_else(|_| frame.r.any_orthogonal());
    let u = if frame.orientation == Sign::Plus { u } else { u.flipped() };
    rotor(theta_ar, u).scale(frame.s.value())
}

/// Classical projection `Re G`, the expected outcome `⟨S(a)⟩`.
pub fn expectation<G: Hypercomplex>(g: &G) -> f64 {
    g.scalar_part()
}

/// `P(S = +1) = (1 + ⟨S⟩)/2`.
///
/// Excursions beyond `[−1, 1]` up to [`EXPECTATION_TOL`] are clamped; larger
/// ones are rejected.
pub fn outcome_probability(expectation: f64) -> Result<f64> {
    if !expectation.is_finite() || expectation.abs() > 1.0 + EXPECTATION_TOL {
        return Err(Error::Domain { what: "expectation", value: expectation });
    }
    Ok(((1.0 + expectation) / 2.0).clamp(0.0, 1.0))
}

/// A particle species with its direction space, local frame and generator algebra.
pub trait Particle: Copy + Default + fmt::Debug + Send + Sync + 'static {
    const KIND: ParticleKind;
    type Direction: Copy + fmt::Debug + PartialEq + Send + Sync + AngleBetween;
    type Frame: Copy + fmt::Debug + PartialEq + Send + Sync;
    type Generator: Hypercomplex;

    /// Direction at angle `theta` within the measurement plane.
    fn direction(theta: f64) -> Self::Direction;

    fn generator(a: &Self::Direction, frame: &Self::Frame) -> Self::Generator;

    /// The frame handed to the other particle of a pair.
    fn partner(frame: &Self::Frame) -> Self::Frame;

    /// Draw particle 1's frame at pair production.
    fn sample_frame<R: Rng + ?Sized>(rng: &mut R) -> Self::Frame;

    /// Frame after measuring along `a` with the given outcome.
    fn post_measurement_frame(frame: &Self::Frame, a: &Self::Direction, outcome: Sign) -> Self::Frame;

    /// Whether two frames share the same reference direction.
    fn shares_reference(f1: &Self::Frame, f2: &Self::Frame) -> bool;

    fn expectation(a: &Self::Direction, frame: &Self::Frame) -> f64 {
        expectation(&Self::generator(a, frame))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Photon;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpinHalf;

impl Particle for Photon {
    const KIND: ParticleKind = ParticleKind::Photon;
    type Direction = Direction2;
    type Frame = PhotonFrame;
    type Generator = Complex;

    fn direction(theta: f64) -> Direction2 {
        Direction2::new(theta)
    }

    fn generator(a: &Direction2, frame: &PhotonFrame) -> Complex {
        photon_generator(a, frame)
    }

    fn partner(frame: &PhotonFrame) -> PhotonFrame {
        source::photon_partner(frame)
    }

    fn sample_frame<R: Rng + ?Sized>(rng: &mut R) -> PhotonFrame {
        source::sample_photon_frame(rng)
    }

    fn post_measurement_frame(frame: &PhotonFrame, a: &Direction2, outcome: Sign) -> PhotonFrame {
        measurement::photon_post_frame(frame, a, outcome)
    }

    fn shares_reference(f1: &PhotonFrame, f2: &PhotonFrame) -> bool {
        f1.r == f2.r
    }
}

impl Particle for SpinHalf {
    const KIND: ParticleKind = ParticleKind::SpinHalf;
    type Direction = Direction3;
    type Frame = SpinFrame;
    type Generator = Quaternion;

    fn direction(theta: f64) -> Direction3 {
        Direction3::in_plane(theta)
    }

    fn generator(a: &Direction3, frame: &SpinFrame) -> Quaternion {
        spin_generator(a, frame)
    }

    fn partner(frame: &SpinFrame) -> SpinFrame {
        source::spin_partner(frame)
    }

    fn sample_frame<R: Rng + ?Sized>(rng: &mut R) -> SpinFrame {
        source::sample_spin_frame(rng)
    }

    fn post_measurement_frame(frame: &SpinFrame, a: &Direction3, outcome: Sign) -> SpinFrame {
        measurement::spin_post_frame(frame, a, outcome)
    }

    fn shares_reference(f1: &SpinFrame, f2: &SpinFrame) -> bool {
        f1.r == f2.r
    }
}

/// Runs `$body` with `$p` bound to the particle type selected by `$kind`.
#[macro_export]
macro_rules! with_particle {
    ($kind:expr, $p:ident => $body:expr) => {
        match $kind {
            $crate::ParticleKind::Photon => {
                type $p = $crate::Photon;
                $body
            }
            $crate::ParticleKind::SpinHalf => {
                type $p = $crate::SpinHalf;
                $body
            }
        }
    };
}

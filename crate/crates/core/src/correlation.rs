//! Pair correlations, the reference-frame average and the CHSH combination.
//!
//! For a produced pair the correlation is the scalar part of the product of
//! the two particles' generators, `Re[G(b|σ̃)·G(a|σ)]`. It does not depend on
//! the shared frame: `cos 2θ_ab` for photons and `−a·b = −cos θ_ab` for spin-½.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::algebra::{AngleBetween, Direction2, Direction3, Hypercomplex};
use crate::error::{Error, Result};
use crate::generators::{Particle, ParticleKind, Photon, PhotonFrame, Sign, SpinFrame, SpinHalf};
use crate::numeric::CompensatedSum;
use crate::source::PairState;

/// `Re[G₂*·G₁]` for two arbitrary generator values.
pub fn overlap<G: Hypercomplex>(g1: &G, g2: &G) -> f64 {
    (g2.conjugate() * *g1).scalar_part()
}

/// Correlation carried by two frames: `Re[G(b|f2)·G(a|f1)]`.
///
/// With `f2` the partner of `f1` this is the pair correlation. The second
/// factor is the partner's generator itself, i.e. `G₂* = G(b|σ̃)`.
pub fn pair_correlation_frames<P: Particle>(a: &P::Direction, f1: &P::Frame, b: &P::Direction, f2: &P::Frame) -> f64 {
    (P::generator(b, f2) * P::generator(a, f1)).scalar_part()
}

pub fn pair_correlation<P: Particle>(a: &P::Direction, b: &P::Direction, pair: &PairState<P>) -> f64 {
    pair_correlation_frames::<P>(a, &pair.frame_1, b, &pair.frame_2)
}

/// `(−1)^l cos(l θ_ab)`.
pub fn pair_correlation_analytic(kind: ParticleKind, theta_ab: f64) -> f64 {
    kind.anticorrelation_sign() * (kind.l() as f64 * theta_ab).cos()
}

pub fn analytic_correlation<P: Particle>(a: &P::Direction, b: &P::Direction) -> f64 {
    pair_correlation_analytic(P::KIND, a.angle_between(b))
}

/// Both sides of the factorization comparison for one pair of frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorizationGap {
    /// `Re[G_a·G̃_b]`
    pub joint: f64,
    /// `Re[G_a]·Re[G̃_b]`
    pub product: f64,
}

impl FactorizationGap {
    pub fn gap(&self) -> f64 {
        (self.joint - self.product).abs()
    }
}

pub fn factorization_gap<P: Particle>(
    a: &P::Direction,
    f1: &P::Frame,
    b: &P::Direction,
    f2: &P::Frame,
) -> FactorizationGap {
    let ga = P::generator(a, f1);
    let gb = P::generator(b, f2);
    FactorizationGap { joint: (ga * gb).scalar_part(), product: ga.scalar_part() * gb.scalar_part() }
}

/// Midpoint nodes on S¹.
pub fn circle_nodes(n: usize) -> impl Iterator<Item = Direction2> {
    let h = TAU / n as f64;
    (0..n).map(move |k| Direction2::new((k as f64 + 0.5) * h))
}

/// Spherical Fibonacci lattice with `n` points (equal-area, low discrepancy).
pub fn fibonacci_sphere(n: usize) -> impl Iterator<Item = Direction3> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |k| {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
        let polar = z.clamp(-1.0, 1.0).acos();
        Direction3::from_spherical(polar, golden_angle * k as f64)
    })
}

/// Uniform average of the pair correlation over the shared frame.
///
/// Photon: midpoint rule over `r ∈ S¹` with both orientations, weight `1/(4π)`.
/// Spin-½: `n_nodes` Fibonacci points over `r ∈ S²` with both signs `s`,
/// weight `1/(8π)`.
pub fn reference_frame_average(kind: ParticleKind, theta_a: f64, theta_b: f64, n_nodes: usize) -> Result<f64> {
    if n_nodes == 0 {
        return Err(Error::InvalidArgument("n_nodes must be at least 1".into()));
    }
    let mut sum = CompensatedSum::new();
    match kind {
        ParticleKind::Photon => {
            let (a, b) = (Photon::direction(theta_a), Photon::direction(theta_b));
            for r in circle_nodes(n_nodes) {
                for orientation in [Sign::Plus, Sign::Minus] {
                    let f = PairState::<Photon>::from_frame(PhotonFrame { r, orientation });
                    sum.add(pair_correlation::<Photon>(&a, &b, &f));
                }
            }
        }
        ParticleKind::SpinHalf => {
            let (a, b) = (SpinHalf::direction(theta_a), SpinHalf::direction(theta_b));
            for r in fibonacci_sphere(n_nodes) {
                for s in [Sign::Plus, Sign::Minus] {
                    let f = PairState::<SpinHalf>::from_frame(SpinFrame { r, orientation: Sign::Plus, s });
                    sum.add(pair_correlation::<SpinHalf>(&a, &b, &f));
                }
            }
        }
    }
    Ok(sum.value() / (2 * n_nodes) as f64)
}

/// Two measurement angles per party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    pub fn new(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        Self { a, a_prime, b, b_prime }
    }

    /// Settings maximizing the model's CHSH value for each kind.
    pub fn optimal(kind: ParticleKind) -> Self {
        match kind {
            ParticleKind::Photon => Self::new(0.0, FRAC_PI_4, FRAC_PI_8, 3.0 * FRAC_PI_8),
            ParticleKind::SpinHalf => Self::new(0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4),
        }
    }

    /// The four `(alice, bob, sign)` terms in CHSH order.
    pub fn terms(&self) -> [(f64, f64, f64); 4] {
        [
            (self.a, self.b, 1.0),
            (self.a, self.b_prime, -1.0),
            (self.a_prime, self.b, 1.0),
            (self.a_prime, self.b_prime, 1.0),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshValue {
    pub signed: f64,
    pub abs: f64,
}

/// `E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)` for a correlation of the angle pair.
pub fn chsh<F: Fn(f64, f64) -> f64>(settings: &ChshSettings, corr: F) -> ChshValue {
    let signed = settings.terms().iter().map(|&(x, y, sign)| sign * corr(x, y)).sum::<f64>();
    ChshValue { signed, abs: signed.abs() }
}

pub fn quantum_chsh(kind: ParticleKind, settings: &ChshSettings) -> ChshValue {
    chsh(settings, |x, y| pair_correlation_analytic(kind, x - y))
}

//! Pair production.
//!
//! The source draws one frame uniformly (direction `r` uniform on S¹ or S²,
//! orientation and spin sign uniform on `{±1}`) and gives the second
//! particle the partner frame: same `r`, opposite orientation, and for spin
//! the opposite sign.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::algebra::{Direction2, Direction3};
use crate::generators::{Particle, ParticleKind, PhotonFrame, Sign, SpinFrame};

/// Frames of one produced pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairState<P: Particle> {
    pub frame_1: P::Frame,
    pub frame_2: P::Frame,
}

impl<P: Particle> PairState<P> {
    pub fn kind(&self) -> ParticleKind {
        P::KIND
    }

    /// Pair whose first particle carries `frame_1`.
    pub fn from_frame(frame_1: P::Frame) -> Self {
        Self { frame_1, frame_2: P::partner(&frame_1) }
    }
}

pub fn produce_pair<P: Particle, R: Rng + ?Sized>(rng: &mut R) -> PairState<P> {
    PairState::from_frame(P::sample_frame(rng))
}

pub fn partner_frame<P: Particle>(frame: &P::Frame) -> P::Frame {
    P::partner(frame)
}

pub fn photon_partner(frame: &PhotonFrame) -> PhotonFrame {
    PhotonFrame { r: frame.r, orientation: frame.orientation.flip() }
}

pub fn spin_partner(frame: &SpinFrame) -> SpinFrame {
    SpinFrame { r: frame.r, orientation: frame.orientation.flip(), s: frame.s.flip() }
}

pub fn sample_photon_frame<R: Rng + ?Sized>(rng: &mut R) -> PhotonFrame {
    let theta = rng.random::<f64>() * TAU;
    PhotonFrame { r: Direction2::new(theta), orientation: Sign::random(rng) }
}

pub fn sample_spin_frame<R: Rng + ?Sized>(rng: &mut R) -> SpinFrame {
    SpinFrame { r: uniform_sphere(rng), orientation: Sign::random(rng), s: Sign::random(rng) }
}

/// Area-uniform point on S².
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R) -> Direction3 {
    let v: [f64; 3] = UnitSphere.sample(rng);
    Direction3::normalize(v).expect("UnitSphere samples have unit norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{Photon, SpinHalf};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn photon_pair_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let pair = produce_pair::<Photon, _>(&mut rng);
            assert_eq!(pair.frame_1.r, pair.frame_2.r);
            assert_eq!(pair.frame_2.orientation, pair.frame_1.orientation.flip());
            assert_eq!(pair.kind(), ParticleKind::Photon);
        }
    }

    #[test]
    fn spin_pair_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let pair = produce_pair::<SpinHalf, _>(&mut rng);
            assert_eq!(pair.frame_1.r, pair.frame_2.r);
            assert_eq!(pair.frame_2.orientation, pair.frame_1.orientation.flip());
            assert_eq!(pair.frame_2.s, pair.frame_1.s.flip());
        }
    }

    #[test]
    fn partner_examples() {
        let f = PhotonFrame { r: Direction2::new(0.3), orientation: Sign::Plus };
        assert_eq!(partner_frame::<Photon>(&f), PhotonFrame { r: f.r, orientation: Sign::Minus });
        assert_eq!(partner_frame::<Photon>(&partner_frame::<Photon>(&f)), f);

        let f = SpinFrame { r: Direction3::Y, orientation: Sign::Plus, s: Sign::Plus };
        let p = partner_frame::<SpinHalf>(&f);
        assert_eq!((p.r, p.orientation, p.s), (f.r, Sign::Minus, Sign::Minus));
        assert_eq!(partner_frame::<SpinHalf>(&p), f);
    }

    #[test]
    fn seeded_production_is_deterministic() {
        let a = produce_pair::<SpinHalf, _>(&mut ChaCha8Rng::seed_from_u64(42));
        let b = produce_pair::<SpinHalf, _>(&mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
        let a = produce_pair::<Photon, _>(&mut ChaCha8Rng::seed_from_u64(42));
        let b = produce_pair::<Photon, _>(&mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }
}

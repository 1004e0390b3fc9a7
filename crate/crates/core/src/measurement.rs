//! Local measurement and the post-measurement frame update.
//!
//! A measurement along `a` yields `+1` with probability `(1 + Re G(a|σ))/2`.
//! Afterwards the frame forgets its previous reference direction:
//!
//! * photon: `+1 → r = a`, `−1 → r = a⊥` (a rotated by a quarter turn in the
//!   particle's own orientation);
//! * spin-½: `r = a` and `s = outcome`.
//!
//! Either way an immediate repeat along `a` returns the same outcome with
//! certainty. The orientation is never changed by a measurement.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::algebra::{Direction2, Direction3};
use crate::error::Result;
use crate::generators::{Particle, ParticleKind, PhotonFrame, Sign, SpinFrame};
use crate::montecarlo::{run_trials, EnsembleReport};
use crate::with_particle;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord<P: Particle> {
    pub direction: P::Direction,
    pub outcome: Sign,
    pub pre_frame: P::Frame,
    pub post_frame: P::Frame,
}

/// `P(+1)` for a frame and direction; rounding excursions past `[0, 1]` are clamped.
pub fn probability_plus<P: Particle>(frame: &P::Frame, a: &P::Direction) -> f64 {
    ((1.0 + P::expectation(a, frame)) / 2.0).clamp(0.0, 1.0)
}

pub fn measure<P: Particle, R: Rng + ?Sized>(frame: &P::Frame, a: &P::Direction, rng: &mut R) -> MeasurementRecord<P> {
    let p = probability_plus::<P>(frame, a);
    let outcome = Sign::from_bool(rng.random::<f64>() < p);
    collapse::<P>(frame, a, outcome)
}

/// Record for a given outcome, without sampling.
pub fn collapse<P: Particle>(frame: &P::Frame, a: &P::Direction, outcome: Sign) -> MeasurementRecord<P> {
    MeasurementRecord {
        direction: *a,
        outcome,
        pre_frame: *frame,
        post_frame: P::post_measurement_frame(frame, a, outcome),
    }
}

pub fn photon_post_frame(frame: &PhotonFrame, a: &Direction2, outcome: Sign) -> PhotonFrame {
    let r = match outcome {
        Sign::Plus => *a,
        Sign::Minus => a.rotated(frame.orientation.value() * FRAC_PI_2),
    };
    PhotonFrame { r, orientation: frame.orientation }
}

pub fn spin_post_frame(frame: &SpinFrame, a: &Direction3, outcome: Sign) -> SpinFrame {
    SpinFrame { r: *a, orientation: frame.orientation, s: outcome }
}

/// Exact joint distribution of two consecutive measurements on one particle.
///
/// Entry `[i][j]` is `P(first = ±, second = ±)` with index 0 for `+1` and 1 for `−1`.
pub fn sequential_distribution<P: Particle>(
    frame: &P::Frame,
    first: &P::Direction,
    second: &P::Direction,
) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    let p_first = probability_plus::<P>(frame, first);
    for (i, o1) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
        let w1 = if o1 == Sign::Plus { p_first } else { 1.0 - p_first };
        let post = P::post_measurement_frame(frame, first, o1);
        let p_second = probability_plus::<P>(&post, second);
        out[i][0] = w1 * p_second;
        out[i][1] = w1 * (1.0 - p_second);
    }
    out
}

/// `(1 + cos lθ)/2`: `cos²θ` for photons, `cos²(θ/2)` for spin-½.
pub fn predicted_same_probability(kind: ParticleKind, theta: f64) -> f64 {
    (1.0 + (kind.l() as f64 * theta).cos()) / 2.0
}

/// Probability of `+1` at angular distance `theta` after a `+1` at angle 0.
///
/// Each trial draws fresh source frames until a measurement along angle 0
/// gives `+1` (post-selection), then measures at `theta`.
pub fn sequential_same_probability_for<P: Particle>(theta: f64, n_trials: u64, seed: u64) -> Result<EnsembleReport> {
    let first = P::direction(0.0);
    let second = P::direction(theta);
    run_trials(n_trials, seed, |rng| {
        let prepared = loop {
            let frame = P::sample_frame(rng);
            let rec = measure::<P, _>(&frame, &first, rng);
            if rec.outcome == Sign::Plus {
                break rec.post_frame;
            }
        };
        if measure::<P, _>(&prepared, &second, rng).outcome == Sign::Plus {
            1.0
        } else {
            0.0
        }
    })
}

pub fn sequential_same_probability(kind: ParticleKind, theta: f64, n_trials: u64, seed: u64) -> Result<EnsembleReport> {
    with_particle!(kind, P => sequential_same_probability_for::<P>(theta, n_trials, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AngleBetween;
    use crate::generators::{Photon, SpinHalf};
    use crate::montecarlo::trial_rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_8};

    #[test]
    fn photon_aligned_measurement_is_certain() {
        let mut rng = trial_rng(1, 0);
        let a = Direction2::new(0.9);
        let frame = PhotonFrame { r: a, orientation: Sign::Minus };
        for _ in 0..200 {
            let rec = measure::<Photon, _>(&frame, &a, &mut rng);
            assert_eq!(rec.outcome, Sign::Plus);
            assert_eq!(rec.post_frame.r, a);
            assert_eq!(rec.post_frame.orientation, Sign::Minus);
        }
    }

    #[test]
    fn photon_orthogonal_measurement_is_certain_minus() {
        let mut rng = trial_rng(2, 0);
        let frame = PhotonFrame { r: Direction2::new(0.0), orientation: Sign::Plus };
        let a = Direction2::new(FRAC_PI_2);
        for _ in 0..200 {
            let rec = measure::<Photon, _>(&frame, &a, &mut rng);
            assert_eq!(rec.outcome, Sign::Minus);
            assert!(rec.post_frame.r.angle_between(&a.rotated(FRAC_PI_2)).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_aligned_measurement() {
        let mut rng = trial_rng(3, 0);
        let frame = SpinFrame { r: Direction3::Z, orientation: Sign::Plus, s: Sign::Plus };
        let rec = measure::<SpinHalf, _>(&frame, &Direction3::Z, &mut rng);
        assert_eq!(rec.outcome, Sign::Plus);
        assert_eq!(rec.post_frame, frame);
    }

    #[test]
    fn repeat_measurement_is_idempotent() {
        let mut rng = trial_rng(4, 0);
        for _ in 0..2000 {
            let pf = Photon::sample_frame(&mut rng);
            let a = Photon::direction(rng.random::<f64>() * 7.0);
            let rec = measure::<Photon, _>(&pf, &a, &mut rng);
            assert_eq!(
                probability_plus::<Photon>(&rec.post_frame, &a),
                if rec.outcome == Sign::Plus { 1.0 } else { 0.0 }
            );

            let sf = SpinHalf::sample_frame(&mut rng);
            let a = crate::source::uniform_sphere(&mut rng);
            let rec = measure::<SpinHalf, _>(&sf, &a, &mut rng);
            assert_eq!(
                probability_plus::<SpinHalf>(&rec.post_frame, &a),
                if rec.outcome == Sign::Plus { 1.0 } else { 0.0 }
            );
        }
    }

    #[test]
    fn sequential_small_examples() {
        let r = sequential_same_probability(ParticleKind::Photon, 0.0, 10_000, 9).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert!((predicted_same_probability(ParticleKind::Photon, FRAC_PI_3) - 0.25).abs() < 1e-15);
        assert!((predicted_same_probability(ParticleKind::SpinHalf, FRAC_PI_2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sequential_distribution_sums_to_one() {
        let frame = PhotonFrame { r: Direction2::new(0.2), orientation: Sign::Plus };
        let d = sequential_distribution::<Photon>(&frame, &Direction2::new(0.5), &Direction2::new(1.3));
        let total: f64 = d.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measurement_order_matters() {
        // Complementarity witness: swapping the order changes the joint distribution.
        let frame = PhotonFrame { r: Direction2::new(0.0), orientation: Sign::Plus };
        let a = Direction2::new(FRAC_PI_8);
        let b = Direction2::new(FRAC_PI_3);
        let ab = sequential_distribution::<Photon>(&frame, &a, &b);
        let ba = sequential_distribution::<Photon>(&frame, &b, &a);
        // Compare P(a = x, b = y) in both orders.
        let max_diff = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (ab[i][j] - ba[j][i]).abs())
            .fold(0.0, f64::max);
        assert!(max_diff > 0.05, "max diff {max_diff}");
    }
}

use bellgen_core::algebra::{cross, IDENTITY_TOL};
use bellgen_core::correlation::{analytic_correlation, factorization_gap, pair_correlation};
use bellgen_core::generators::EXPECTATION_TOL;
use bellgen_core::*;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn unit_quaternion() -> impl Strategy<Value = Quaternion> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-3)
        .prop_map(|(w, x, y, z)| {
            let n = (w * w + x * x + y * y + z * z).sqrt();
            Quaternion::new(w / n, x / n, y / n, z / n)
        })
}

fn any_quaternion() -> impl Strategy<Value = Quaternion> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
}

fn direction3() -> impl Strategy<Value = Direction3> {
    (-1.0..1.0f64, 0.0..TAU).prop_map(|(z, phi)| Direction3::from_spherical(z.acos(), phi))
}

fn sign() -> impl Strategy<Value = Sign> {
    any::<bool>().prop_map(Sign::from_bool)
}

fn photon_frame() -> impl Strategy<Value = PhotonFrame> {
    (0.0..TAU, sign()).prop_map(|(r, orientation)| PhotonFrame { r: Direction2::new(r), orientation })
}

fn spin_frame() -> impl Strategy<Value = SpinFrame> {
    (direction3(), sign(), sign()).prop_map(|(r, orientation, s)| SpinFrame { r, orientation, s })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hamilton_product_is_norm_multiplicative(p in any_quaternion(), q in any_quaternion()) {
        let lhs = qmul(p, q).norm();
        prop_assert!((lhs - p.norm() * q.norm()).abs() <= IDENTITY_TOL * (1.0 + lhs));
    }

    #[test]
    fn hamilton_product_is_associative(p in unit_quaternion(), q in unit_quaternion(), r in unit_quaternion()) {
        prop_assert!(((p * q) * r).max_abs_diff(&(p * (q * r))) <= IDENTITY_TOL);
    }

    #[test]
    fn rotor_times_conjugate_is_one(theta in -10.0..10.0f64, u in direction3()) {
        let q = rotor(theta, u);
        prop_assert!((q * q.conjugate()).max_abs_diff(&Quaternion::ONE) <= IDENTITY_TOL);
        prop_assert!((q.norm() - 1.0).abs() <= IDENTITY_TOL);
    }

    #[test]
    fn complex_embeds_in_one_k_plane(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, d in -3.0..3.0f64) {
        let (z, w) = (Complex::new(a, b), Complex::new(c, d));
        let via_q = z.to_quaternion_k() * w.to_quaternion_k();
        prop_assert!(via_q.max_abs_diff(&(z * w).to_quaternion_k()) <= IDENTITY_TOL);
        prop_assert!((via_q.conjugate()).max_abs_diff(&(z * w).conjugate().to_quaternion_k()) <= IDENTITY_TOL);
    }

    #[test]
    fn direction2_angle_is_antisymmetric(t1 in -20.0..20.0f64, t2 in -20.0..20.0f64) {
        let (a, b) = (Direction2::new(t1), Direction2::new(t2));
        let s = angle_between(&a, &b) + angle_between(&b, &a);
        // Sum is 0 mod 2π; it is exactly ±2π only when the difference sits on π.
        let wrapped = (s + PI).rem_euclid(TAU) - PI;
        prop_assert!(wrapped.abs() <= 1e-12);
    }

    #[test]
    fn cross_of_non_parallel_units_normalizes(a in direction3(), b in direction3()) {
        prop_assume!(a.cross(&b).iter().map(|c| c * c).sum::<f64>().sqrt() > 1e-6);
        let u = rotation_axis(&a, &b).unwrap();
        prop_assert!((u.dot(&u) - 1.0).abs() <= IDENTITY_TOL);
        prop_assert!(u.dot(&a).abs() <= 1e-9 && u.dot(&b).abs() <= 1e-9);
    }

    #[test]
    fn generators_have_unit_magnitude(pf in photon_frame(), sf in spin_frame(), t in 0.0..TAU, d in direction3()) {
        let g = photon_generator(&Direction2::new(t), &pf);
        prop_assert!((g.norm() - 1.0).abs() <= IDENTITY_TOL);
        let q = spin_generator(&d, &sf);
        prop_assert!((q.norm() - 1.0).abs() <= IDENTITY_TOL);
        let e1 = expectation(&g);
        let e2 = expectation(&q);
        prop_assert!(e1.abs() <= 1.0 + EXPECTATION_TOL && e2.abs() <= 1.0 + EXPECTATION_TOL);
    }

    #[test]
    fn photon_generator_matches_rotor_in_one_k_plane(pf in photon_frame(), t in 0.0..TAU) {
        let a = Direction2::new(t);
        let g = photon_generator(&a, &pf).to_quaternion_k();
        let theta_ar = angle_between(&a, &pf.r);
        let axis = if pf.orientation == Sign::Plus { Direction3::Z } else { Direction3::Z.flipped() };
        prop_assert!(g.max_abs_diff(&rotor(2.0 * theta_ar, axis)) <= IDENTITY_TOL);
    }

    #[test]
    fn spin_expectation_is_signed_projection(sf in spin_frame(), a in direction3()) {
        let e = expectation(&spin_generator(&a, &sf));
        prop_assert!((e - sf.s.value() * a.dot(&sf.r)).abs() <= IDENTITY_TOL);
    }

    #[test]
    fn photon_pair_correlation_is_frame_independent(pf in photon_frame(), ta in 0.0..TAU, tb in 0.0..TAU) {
        let pair = PairState::<Photon>::from_frame(pf);
        let (a, b) = (Direction2::new(ta), Direction2::new(tb));
        let e = pair_correlation::<Photon>(&a, &b, &pair);
        prop_assert!((e - analytic_correlation::<Photon>(&a, &b)).abs() <= IDENTITY_TOL);
        prop_assert!((e - (2.0 * (ta - tb)).cos()).abs() <= IDENTITY_TOL);
    }

    #[test]
    fn spin_pair_correlation_is_frame_independent(sf in spin_frame(), a in direction3(), b in direction3()) {
        let pair = PairState::<SpinHalf>::from_frame(sf);
        let e = pair_correlation::<SpinHalf>(&a, &b, &pair);
        prop_assert!((e - analytic_correlation::<SpinHalf>(&a, &b)).abs() <= IDENTITY_TOL);
        prop_assert!((e + a.dot(&b)).abs() <= IDENTITY_TOL);
    }

    #[test]
    fn rotor_product_scalar_part_is_dot_product(r in direction3(), a in direction3(), b in direction3()) {
        // e^{θ_ar u} e^{θ_br ũ} with u from (r, +) and ũ from the partner orientation.
        let f = SpinFrame { r, orientation: Sign::Plus, s: Sign::Plus };
        let g = PairState::<SpinHalf>::from_frame(f);
        let ga = spin_generator(&a, &g.frame_1);
        let gb = spin_generator(&b, &g.frame_2).scale(-1.0); // strip the partner's −s
        prop_assert!(((ga * gb).scalar_part() - a.dot(&b)).abs() <= IDENTITY_TOL);
    }

    #[test]
    fn partner_axis_identity(r in direction3(), a in direction3(), b in direction3()) {
        // −u·ũ equals the dot product of the unit components of a and b perpendicular to r.
        let ra = r.cross(&a);
        let rb = r.cross(&b);
        let na = ra.iter().map(|c| c * c).sum::<f64>().sqrt();
        let nb = rb.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assume!(na > 1e-3 && nb > 1e-3);
        let u = rotation_axis(&r, &a).unwrap();
        let u_tilde = rotation_axis(&r, &b).unwrap().flipped();
        let perp = |v: &Direction3| {
            let d = v.dot(&r);
            let p = [v.x() - d * r.x(), v.y() - d * r.y(), v.z() - d * r.z()];
            let n = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            [p[0] / n, p[1] / n, p[2] / n]
        };
        let (xa, xb) = (perp(&a), perp(&b));
        let lhs = -u.dot(&u_tilde);
        let rhs = xa[0] * xb[0] + xa[1] * xb[1] + xa[2] * xb[2];
        prop_assert!((lhs - rhs).abs() <= 1e-9);
        // u is orthogonal to both r and a.
        let c = cross(u.to_array(), ra);
        prop_assert!(c.iter().all(|x| x.abs() <= 1e-9));
    }
}

#[test]
fn factorization_is_violated_for_photons() {
    let r = Direction2::new(0.0);
    let frame = PhotonFrame { r, orientation: Sign::Plus };
    let pair = PairState::<Photon>::from_frame(frame);
    let a = r.rotated(PI / 8.0);
    let b = r.rotated(-PI / 8.0);
    let g = factorization_gap::<Photon>(&a, &pair.frame_1, &b, &pair.frame_2);
    assert!((g.product - 0.5).abs() <= IDENTITY_TOL);
    assert!((g.joint - (2.0 * PI / 4.0).cos()).abs() <= IDENTITY_TOL);
    assert!(g.gap() > 0.2);
}

#[test]
fn degenerate_spin_axis_is_handled() {
    for r in [Direction3::X, Direction3::Y, Direction3::Z] {
        for s in [Sign::Plus, Sign::Minus] {
            for o in [Sign::Plus, Sign::Minus] {
                let f = SpinFrame { r, orientation: o, s };
                let q = spin_generator(&r, &f);
                assert!(q.max_abs_diff(&Quaternion::ONE.scale(s.value())) <= IDENTITY_TOL);
                let q = spin_generator(&r.flipped(), &f);
                assert!(q.max_abs_diff(&Quaternion::ONE.scale(-s.value())) <= IDENTITY_TOL);
            }
        }
    }
}

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use zentner_core::gauge::{beta_apply, beta_inverse};
use zentner_core::lie::{matrix_exp, matrix_log, su2_to_so3, CMatrix, LieAlgebra, MatrixGroup, RealFormDecomposition};
use zentner_core::scenarios::build_scenario;
use zentner_core::zentner::{acs_matrix, bracket_alpha, TotalSpacePoint};

fn vec3(r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, 3)
}

fn halfspace_point() -> impl Strategy<Value = Vec<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, 0.5..2.0f64).prop_map(|(a, b, c)| vec![a, b, c])
}

fn groups() -> [MatrixGroup; 3] {
    [MatrixGroup::so3(), MatrixGroup::su2(), MatrixGroup::sl2r()]
}

fn jacobi(alg: &LieAlgebra, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let b = |p: &[f64], q: &[f64]| alg.bracket(p, q).unwrap();
    let s = b(x, b(y, z).as_slice()) + b(y, b(z, x).as_slice()) + b(z, b(x, y).as_slice());
    s.amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_of_negative_is_inverse(x in vec3(2.0)) {
        for g in groups() {
            let a = g.exp(&x).unwrap();
            let b = g.exp(&x.iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
            let n = g.matrix_size();
            prop_assert!((a * b - CMatrix::identity(n, n)).norm() < 1e-10);
        }
    }

    #[test]
    fn log_inverts_exp_near_identity(x in vec3(0.5)) {
        for g in groups() {
            let m = g.to_matrix(&x);
            prop_assert!((matrix_log(&matrix_exp(&m).unwrap()).unwrap() - m).norm() < 1e-10);
        }
    }

    #[test]
    fn exponentials_are_group_members(x in vec3(3.0)) {
        for g in groups() {
            prop_assert!(g.check_member(&g.exp(&x).unwrap()).is_ok());
        }
    }

    #[test]
    fn jacobi_on_random_elements(x in vec3(3.0), y in vec3(3.0), z in vec3(3.0)) {
        for g in groups() {
            prop_assert!(jacobi(g.algebra(), &x, &y, &z) < 1e-11);
        }
    }

    #[test]
    fn real_form_split_round_trips(theta in vec3(2.0), alpha in vec3(2.0)) {
        for rf in [RealFormDecomposition::su2_in_sl2c(), RealFormDecomposition::sl2r_in_sl2c()] {
            let (t, a) = rf.split(&rf.combine(&theta, &alpha)).unwrap();
            prop_assert!((t - DVector::from_vec(theta.clone())).amax() < 1e-12);
            prop_assert!((a - DVector::from_vec(alpha.clone())).amax() < 1e-12);
        }
    }

    #[test]
    fn double_cover_is_a_homomorphism(a in vec3(4.0), b in vec3(4.0)) {
        let su2 = MatrixGroup::su2();
        let (g, h) = (su2.exp(&a).unwrap(), su2.exp(&b).unwrap());
        let lhs = su2_to_so3(&(&g * &h)).unwrap();
        let rhs = su2_to_so3(&g).unwrap() * su2_to_so3(&h).unwrap();
        prop_assert!((lhs - rhs).amax() < 1e-10);
        let neg = su2_to_so3(&(-g.clone())).unwrap();
        prop_assert!((neg - su2_to_so3(&g).unwrap()).amax() < 1e-12);
    }

    #[test]
    fn transported_bracket_is_a_lie_bracket(
        x in halfspace_point(), u in vec3(2.0), v in vec3(2.0), w in vec3(2.0)
    ) {
        let t = build_scenario("hyperbolic-halfspace").unwrap();
        let b = |p: &[f64], q: &[f64]| bracket_alpha(&t, p, q, &x).unwrap();
        prop_assert!((b(&u, &v) + b(&v, &u)).amax() < 1e-12);
        let s = b(&u, b(&v, &w).as_slice()) + b(&v, b(&w, &u).as_slice()) + b(&w, b(&u, &v).as_slice());
        prop_assert!(s.amax() < 1e-9 * (1.0 + x[2].powi(-2)));
    }

    #[test]
    fn beta_round_trips(x in halfspace_point(), v in vec3(5.0)) {
        let t = build_scenario("hyperbolic-halfspace").unwrap();
        let xi = beta_apply(t.alpha(), &v, &x).unwrap();
        let back = beta_inverse(t.alpha(), xi.as_slice(), &x).unwrap();
        prop_assert!((back - DVector::from_vec(v)).amax() < 1e-12);
    }

    #[test]
    fn almost_complex_structure_squares_to_minus_one(x in halfspace_point(), k in vec3(0.55)) {
        for name in ["flat", "hyperbolic-halfspace"] {
            let t = build_scenario(name).unwrap();
            let j = acs_matrix(&t, &TotalSpacePoint::new(x.clone(), k.clone())).unwrap();
            prop_assert!((&j * &j + DMatrix::identity(6, 6)).amax() < 1e-10);
        }
    }
}

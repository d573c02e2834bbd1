//! Property tests for the algebraic invariants.

mod common;

use opcalc_core::{
    io, operator_exp, resolvent, spectrum, Cx64, Expr, Operator64,
};
use proptest::prelude::*;

fn entries_strategy(dim: usize, scale: f64) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-scale..scale, -scale..scale), dim * dim)
}

fn to_operator(dim: usize, entries: &[(f64, f64)]) -> Operator64 {
    let cx: Vec<Cx64> = entries.iter().map(|&(re, im)| Cx64::new(re, im)).collect();
    Operator64::from_rows(dim, &cx).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exp_of_matrix_and_its_negation_are_inverse(
        dim in 1usize..6,
        entries in entries_strategy(5, 1.0),
    ) {
        let m = to_operator(dim, &entries[..dim * dim]);
        let e = operator_exp(&m);
        let einv = operator_exp(&m.scale(Cx64::new(-1.0, 0.0)));
        let resid = e
            .try_mul(&einv)
            .unwrap()
            .try_sub(&Operator64::identity(dim))
            .unwrap()
            .norm_fro();
        prop_assert!(resid < 1e-10, "residual {resid}");
    }

    #[test]
    fn first_resolvent_identity_at_admissible_shifts(
        dim in 2usize..6,
        entries in entries_strategy(5, 0.8),
        re1 in 3.0f64..6.0,
        im1 in -2.0f64..2.0,
        re2 in -6.0f64..-3.0,
        im2 in -2.0f64..2.0,
    ) {
        let m = to_operator(dim, &entries[..dim * dim]);
        let z1 = Cx64::new(re1, im1);
        let z2 = Cx64::new(re2, im2);
        // |entries| <= 0.8 bounds the spectral radius well below |z|
        let r1 = resolvent(&m, z1).unwrap();
        let r2 = resolvent(&m, z2).unwrap();
        let lhs = r1.try_sub(&r2).unwrap();
        let rhs = r1.try_mul(&r2).unwrap().scale(z2 - z1);
        let resid = lhs.try_sub(&rhs).unwrap().norm_fro();
        prop_assert!(resid < 1e-10, "residual {resid}");
    }

    #[test]
    fn spectral_radius_bounded_by_one_norm(
        dim in 1usize..7,
        entries in entries_strategy(6, 1.5),
    ) {
        let m = to_operator(dim, &entries[..dim * dim]);
        let info = spectrum(&m).unwrap();
        prop_assert!(info.spectral_radius <= m.norm_1() + 1e-9);
    }

    #[test]
    fn matrix_json_roundtrip(
        dim in 1usize..5,
        entries in entries_strategy(4, 10.0),
    ) {
        let m = to_operator(dim, &entries[..dim * dim]);
        let text = io::operator_to_json_string(&m);
        let back: Operator64 = io::operator_from_json_str(&text).unwrap();
        prop_assert_eq!(m.matrix(), back.matrix());
    }

    #[test]
    fn symbolic_derivative_matches_finite_difference(
        c0 in -2.0f64..2.0,
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
        t in 0.1f64..2.0,
    ) {
        let src = format!("{c0} + {c1}*t + {c2}*t^2 + sin(t)*{c0}");
        let f = Expr::parse(&src, "t").unwrap();
        let df = f.derivative().unwrap();
        let h = 1e-5f64;
        let fd: f64 = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
        let sym: f64 = df.eval(t);
        prop_assert!((fd - sym).abs() < 1e-6 * (1.0 + sym.abs()), "{fd} vs {sym}");
    }
}

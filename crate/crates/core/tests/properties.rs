//! Property tests for the algebraic invariants.

mod common;

use proptest::prelude::*;
use psido::calculus::{adjoint, compose, convert_left_right, Direction};
use psido::hodge::{self, FormField};
use psido::quantize::{self, sobolev_norm, GridFunction};
use psido::symbolic::{Expr, Var};
use psido::{seeded_rng, syntax, ClassicalSymbol, HomogeneousTerm};

use common::{random_band_limited, random_differential_symbol};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn derivative_matches_central_difference(a in -2.0..2.0f64, b in 0.1..2.0f64, x in -1.0..1.0f64, xi in 0.5..2.0f64) {
        let e = syntax::parse_expr(&format!("exp({a}*x1)*sin(x1) / ({b} + xi1^2) + sqrt(1 + x1^2)*xi1"), 1).unwrap();
        let d = e.diff(Var::x(0));
        let h = 1e-5;
        let fd = (e.eval(&[x + h], &[xi]).unwrap() - e.eval(&[x - h], &[xi]).unwrap()) / (2.0 * h);
        let exact = d.eval(&[x], &[xi]).unwrap();
        prop_assert!((fd - exact).norm() < 1e-6 * (1.0 + exact.norm()));
    }

    #[test]
    fn powers_of_norm_are_homogeneous(p in -3.0..3.0f64, c in 0.1..2.0f64) {
        let e = Expr::mul(&syntax::parse_expr(&format!("{c} + sin(x1)*sin(x1)"), 2).unwrap(), &Expr::xi_norm(2).powf(p));
        let t = HomogeneousTerm::new(e, p, 2).unwrap();
        let d = t.d_xi(&psido::MultiIndex::unit(2, 0));
        prop_assert!((d.degree() - (p - 1.0)).abs() < 1e-12);
        prop_assert!(d.check_homogeneity().unwrap().accepted);
    }

    #[test]
    fn wrong_degree_is_rejected(p in 0.5..3.0f64, shift in 0.25..1.0f64) {
        let e = Expr::xi_norm(2).powf(p);
        prop_assert!(HomogeneousTerm::new(e, p + shift, 2).is_err());
    }

    #[test]
    fn sobolev_norm_is_monotone_in_s(seed in 0u64..1000, s in -2.0..2.0f64, ds in 0.0..1.0f64) {
        let u = random_band_limited(2, 16, 5, &mut seeded_rng(seed));
        prop_assert!(sobolev_norm(&u, s) <= sobolev_norm(&u, s + ds) * (1.0 + 1e-12));
    }

    #[test]
    fn fft_round_trip(seed in 0u64..1000, n in 1usize..=3) {
        let m = if n == 3 { 8 } else { 16 };
        let u = random_band_limited(n, m, (m / 2 - 1) as i64, &mut seeded_rng(seed));
        let back = u.spectrum().to_grid();
        prop_assert!(back.sub(&u).unwrap().max_abs() < 1e-13 * u.max_abs());
    }

    #[test]
    fn winding_numbers_determine_index(wp in -3i64..=3, wm in -3i64..=3, c in 1.5..4.0f64) {
        let ap = syntax::parse_expr(&format!("({c} + cos(x1))*exp(i*{wp}*x1)"), 1).unwrap();
        let am = syntax::parse_expr(&format!("exp(i*{wm}*x1)"), 1).unwrap();
        let r = quantize::circle_index(&ap, &am, 32).unwrap();
        prop_assert_eq!(r.index, wm - wp);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn adjoint_is_an_involution(seed in 0u64..10_000) {
        let p = random_differential_symbol(&mut seeded_rng(seed));
        let back = adjoint(&adjoint(&p));
        for t in back.termwise_difference(&p, p.remainder_degree()) {
            prop_assert!(t.is_zero().unwrap(), "degree {}", t.degree());
        }
    }

    #[test]
    fn left_right_conversions_are_inverse(seed in 0u64..10_000) {
        let p = random_differential_symbol(&mut seeded_rng(seed));
        let right = convert_left_right(&p, Direction::LeftToRight);
        let back = convert_left_right(&right, Direction::RightToLeft);
        prop_assert!(back.agrees_above(&p, p.remainder_degree()).unwrap());
    }

    #[test]
    fn adjoint_reverses_products(seed in 0u64..10_000) {
        let mut rng = seeded_rng(seed);
        let p = random_differential_symbol(&mut rng);
        let q = random_differential_symbol(&mut rng);
        let lhs = adjoint(&compose(&p, &q).unwrap());
        let rhs = compose(&adjoint(&q), &adjoint(&p)).unwrap();
        prop_assert!(lhs.agrees_above(&rhs, lhs.remainder_degree()).unwrap());
    }

    #[test]
    fn composition_is_associative(seed in 0u64..10_000) {
        let mut rng = seeded_rng(seed);
        let (p, q, r) = (
            random_differential_symbol(&mut rng).with_truncation(7),
            random_differential_symbol(&mut rng).with_truncation(7),
            random_differential_symbol(&mut rng).with_truncation(7),
        );
        let lhs = compose(&compose(&p, &q).unwrap(), &r).unwrap();
        let rhs = compose(&p, &compose(&q, &r).unwrap()).unwrap();
        prop_assert!(lhs.agrees_above(&rhs, lhs.remainder_degree()).unwrap());
    }

    #[test]
    fn symbol_documents_round_trip(seed in 0u64..10_000) {
        let p = random_differential_symbol(&mut seeded_rng(seed));
        let text = syntax::symbol_text("P", &p);
        let back = syntax::parse_symbol_text(&text).unwrap();
        prop_assert_eq!(back.degrees(), p.degrees());
        prop_assert!(back.agrees_above(&p, p.remainder_degree()).unwrap());
    }

    #[test]
    fn star_is_an_isometry_and_d_squares_to_zero(seed in 0u64..10_000, n in 1usize..=3, j in 0usize..=3) {
        prop_assume!(j <= n);
        let mut rng = seeded_rng(seed);
        let w = FormField::<f64>::random(n, j, 8, 3, &mut rng).unwrap();
        let s = hodge::hodge_star(&w);
        prop_assert!((s.norm() - w.norm()).abs() <= 1e-12 * w.norm());
        if j + 2 <= n {
            let dd = hodge::ext_d(&hodge::ext_d(&w).unwrap()).unwrap();
            prop_assert!(dd.max_abs() <= 1e-12 * w.max_abs());
        }
        let lap_star = hodge::laplacian(&s).unwrap();
        let star_lap = hodge::hodge_star(&hodge::laplacian(&w).unwrap());
        prop_assert!(lap_star.sub(&star_lap).unwrap().max_abs() <= 1e-10 * (1.0 + star_lap.max_abs()));
    }

    #[test]
    fn first_order_operators_are_bounded_between_sobolev_spaces(seed in 0u64..10_000, s in -2.0..2.0f64) {
        let mut rng = seeded_rng(seed);
        let u = random_band_limited(2, 32, 8, &mut rng);
        let grad = ClassicalSymbol::from_term(
            HomogeneousTerm::new(Expr::xi_norm(2), 1.0, 2).unwrap(),
            1,
        );
        let v = quantize::op_apply(&grad, &u).unwrap();
        prop_assert!(sobolev_norm(&v, s - 1.0) <= sobolev_norm(&u, s) * (1.0 + 1e-12));
    }
}

#[test]
fn single_precision_grid_agrees_with_double() {
    let u = random_band_limited(2, 16, 4, &mut seeded_rng(3));
    let u32: GridFunction<f32> = GridFunction::new(
        2,
        16,
        u.values()
            .iter()
            .map(|c| num_complex::Complex32::new(c.re as f32, c.im as f32))
            .collect(),
    )
    .unwrap();
    let (a, b) = (sobolev_norm(&u, 1.0), sobolev_norm(&u32, 1.0) as f64);
    assert!((a - b).abs() < 1e-5 * a);
}

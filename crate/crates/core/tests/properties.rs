use std::f64::consts::PI;

use invis_core::born::{born_f_2d, born_t_2d_at, Side, Sign};
use invis_core::invispot::{potential_ft_2d, potential_ft_2d_series, ConstructionParams};
use invis_core::io::{format_float, CsvTable};
use invis_core::numcore::{gauss_grid, Custom2d, Envelope, PotentialSpec, WaveContext};
use invis_core::Complex64;
use proptest::prelude::*;

fn params(ell: i32, m: i32, g0: Complex64, b: f64, k: f64, gaussian: bool) -> ConstructionParams {
    let env = if gaussian { Envelope::gaussian(g0, b) } else { Envelope::quartic(g0, b) }.unwrap();
    ConstructionParams::new(ell, m, 1.0, env, WaveContext::new(k).unwrap()).unwrap()
}

fn orders() -> impl Strategy<Value = (i32, i32)> {
    (-3i32..=3, -3i32..=3).prop_filter("distinct nonzero orders", |(l, m)| *l != 0 && *m != 0 && l != m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grids_are_symmetric(n in 1usize..60, k in 0.5f64..40.0) {
        let g = gauss_grid(2 * n + 1, &WaveContext::new(k).unwrap()).unwrap();
        prop_assert!(g.is_symmetric(0.0));
        prop_assert_eq!(g.nodes()[g.center_index()], 0.0);
        let total: f64 = g.weights().iter().sum();
        prop_assert!((total - 2.0 * k).abs() <= 1e-12 * k);
    }

    #[test]
    fn right_side_vanishes(
        (ell, m) in orders(),
        kp in 0.5f64..6.0,
        b in 0.3f64..2.0,
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
        frac in -0.99f64..0.99,
        gaussian in any::<bool>(),
    ) {
        let g0 = Complex64::new(re, im) * 1e-2;
        prop_assume!(g0.norm() > 1e-6);
        let pr = params(ell, m, g0, b, kp * PI, gaussian);
        let v = PotentialSpec::Constructed2d(pr.clone());
        let p = frac * pr.ctx().k();
        let left = born_t_2d_at(&v, Side::Left, Sign::Minus, p, pr.ctx()).unwrap().norm()
            .max(born_t_2d_at(&v, Side::Left, Sign::Plus, p, pr.ctx()).unwrap().norm());
        for s in [Sign::Plus, Sign::Minus] {
            let r = born_t_2d_at(&v, Side::Right, s, p, pr.ctx()).unwrap().norm();
            prop_assert!(r <= 1e-10 * left.max(g0.norm() * 1e-6), "r={r} left={left}");
        }
    }

    #[test]
    fn born_is_linear_in_strength(
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
        seed in 0u64..1000,
        theta in -1.5f64..4.6,
    ) {
        prop_assume!(theta.cos().abs() > 1e-2);
        let alpha = Complex64::new(re, im);
        let ctx = WaveContext::new(2.0 * PI).unwrap();
        let v = PotentialSpec::Custom2d(Custom2d::random_smooth(seed, 1.0));
        let f = born_f_2d(&v, Side::Left, theta, &ctx).unwrap();
        let g = born_f_2d(&v.scaled(alpha), Side::Left, theta, &ctx).unwrap();
        prop_assert!((g - alpha * f).norm() <= 1e-13 * (alpha.norm() * f.norm()).max(1e-300));
    }

    #[test]
    fn transform_reflects_with_envelope(
        (ell, m) in orders(),
        b in 0.3f64..2.0,
        kx in -20.0f64..20.0,
        ky in -20.0f64..20.0,
    ) {
        // The quartic bump is even about y = b/2.
        let pr = params(ell, m, Complex64::new(1.0, 0.0), b, 2.0 * PI, false);
        let a = potential_ft_2d(&pr, kx, ky);
        let mirrored = potential_ft_2d(&pr, kx, -ky);
        let expected = a * Complex64::new(0.0, ky * b).exp();
        prop_assert!((mirrored - expected).norm() <= 1e-11 * a.norm().max(1e-12));
        let series = potential_ft_2d_series(&pr, kx, ky);
        prop_assert!((a - series).norm() <= 1e-8 * a.norm().max(series.norm()).max(1e-12));
    }

    #[test]
    fn float_format_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let s = format_float(x);
        prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn csv_round_trips(rows in proptest::collection::vec(proptest::collection::vec(-1e6f64..1e6, 3), 0..20)) {
        let mut t = CsvTable::new(&["a", "b", "c"]);
        for r in &rows {
            t.push(r.clone());
        }
        t.comments.push("note".into());
        let back = CsvTable::parse(&t.to_csv()).unwrap();
        prop_assert_eq!(back, t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gaussian_transform_matches_quadrature(frac in -1.0f64..1.0, b in 0.3f64..2.0) {
        let k = 4.0 * PI;
        let e = Envelope::gaussian(Complex64::new(1.0, 0.0), b).unwrap();
        let q = 4.0 * k * frac;
        prop_assert!((e.ft(q) - e.ft_numeric(q)).norm() <= 1e-10);
    }

    #[test]
    fn real_potential_transform_is_hermitian(seed in 0u64..500, kx in -15.0f64..15.0, ky in -15.0f64..15.0) {
        let rect = invis_core::numcore::Rect::new(0.0, 1.0, -0.5, 0.5).unwrap();
        let base = Custom2d::random_smooth(seed, 1.0);
        let real = Custom2d::from_fn(rect, "real", move |x, y| Complex64::new(base.value(x, y).re, 0.0));
        let a = real.ft(kx, ky);
        let b = real.ft(-kx, -ky);
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }
}

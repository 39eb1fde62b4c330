use fracheat_core::analysis::{classify, classify_exact, critical_alpha, Rational, RegionLabel};
use fracheat_core::fields::{
    make_backward_paraboloid, make_bump, make_cylinder, make_exact_solution, make_indicator_similarity,
    make_paraboloid_power, make_slab, make_tilted_exact, rescale, rescale_inverse, BumpProfile,
};
use fracheat_core::inverse::{j_inverse, FieldFn, InverseSpec};
use fracheat_core::potentials::j_alpha;
use fracheat_core::special::{offset_gaussian_mass, sharp_constant};
use fracheat_core::{Field, QuadratureSpec};
use proptest::prelude::*;

fn catalog(n: usize) -> Vec<Field> {
    let m = sharp_constant(0.7, 0.4).unwrap();
    vec![
        make_exact_solution(0.7, 0.4).unwrap(),
        make_tilted_exact(n, 0.7, 0.4, 0.9 * m, 2.0).unwrap(),
        make_paraboloid_power(n, 1.0, 0.5).unwrap(),
        make_backward_paraboloid(n, 1.0, 1.0, 0.5, 1.0).unwrap(),
        make_indicator_similarity(n, 0.5, 0.5).unwrap(),
        make_bump(BumpProfile::Gaussian, 0.0, 1.0, 0.5).unwrap(),
        make_bump(BumpProfile::Compact { radius: 2.0 }, 0.5, 3.0, 0.25).unwrap(),
        make_slab(0.0, 1.0, 2.0).unwrap(),
        make_cylinder(1.0, 0.25, 2.0, 3.0).unwrap(),
        rescale(make_exact_solution(1.0, 0.5).unwrap(), 2.0, 0.5, 1.0, 3.0).unwrap(),
    ]
}

fn rational(max_num: i128, max_den: i128) -> impl Strategy<Value = Rational> {
    (1..=max_den).prop_flat_map(move |d| (1..=max_num * d).prop_map(move |num| Rational::new(num, d).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fields_vanish_before_time_zero_and_are_nonnegative(
        n in 1usize..=3,
        xs in prop::collection::vec(-4.0f64..4.0, 3),
        t_neg in -10.0f64..=0.0,
        t_pos in 1e-3f64..5.0,
    ) {
        let x = &xs[..n];
        for f in catalog(n) {
            prop_assert_eq!(f.eval(x, t_neg), 0.0);
            prop_assert!(f.eval(x, t_pos) >= 0.0);
        }
    }

    #[test]
    fn classification_is_exhaustive_and_exclusive(
        lambda in rational(6, 30),
        alpha in rational(4, 30),
        p in rational(4, 6).prop_filter("p >= 1", |p| p.num >= p.den),
        n in 1u32..=4,
    ) {
        let label = classify_exact(lambda, alpha, p, n).unwrap();
        let lf = lambda.to_f64();
        let thr = critical_alpha(n as usize, p.to_f64(), lf);
        let a = alpha.to_f64();
        let in_b = lambda.num < lambda.den;
        let in_a = (lambda.num == lambda.den) || (lf > 1.0 && a > thr);
        let in_c = lf > 1.0 && a < thr;
        // away from the curve exactly one of the open conditions holds
        if (a - thr).abs() > 1e-9 * thr || in_b || lambda.num == lambda.den {
            prop_assert_eq!([in_a, in_b, in_c].iter().filter(|&&c| c).count(), 1);
            let want = if in_a { RegionLabel::A } else if in_b { RegionLabel::B } else { RegionLabel::C };
            prop_assert_eq!(label, want);
            prop_assert_eq!(classify(lf, a, p.to_f64(), n as usize).unwrap(), want);
        }
    }

    #[test]
    fn boundary_points_are_region_d(
        lambda in rational(6, 30).prop_filter("lambda > 1", |l| l.num > l.den),
        p in rational(4, 6).prop_filter("p >= 1", |p| p.num >= p.den),
        n in 1u32..=4,
    ) {
        let alpha = Rational::new(
            (i128::from(n) + 2) * p.den * (lambda.num - lambda.den),
            2 * p.num * lambda.num,
        ).unwrap();
        prop_assert_eq!(classify_exact(lambda, alpha, p, n).unwrap(), RegionLabel::D);
        prop_assert_eq!(
            classify(lambda.to_f64(), alpha.to_f64(), p.to_f64(), n as usize).unwrap(),
            RegionLabel::D
        );
    }

    #[test]
    fn offset_gaussian_mass_is_monotone(
        n in 1usize..=4,
        c1 in 0.0f64..3.0,
        dc in 0.0f64..2.0,
        r1 in 0.05f64..4.0,
        dr in 0.0f64..2.0,
    ) {
        let g = |c: f64, r: f64| offset_gaussian_mass(n, c, r);
        let base = g(c1, r1);
        prop_assert!((0.0..=1.0 + 1e-14).contains(&base));
        prop_assert!(g(c1 + dc, r1) <= base + 1e-13);
        prop_assert!(g(c1, r1 + dr) >= base - 1e-13);
    }

    #[test]
    fn sharp_constant_positive_and_bounded(alpha in 1e-3f64..20.0, lambda in 1e-3f64..0.999) {
        let m = sharp_constant(alpha, lambda).unwrap();
        let e = alpha * lambda / (1.0 - lambda);
        prop_assert!(m > 0.0);
        // Γ increases beyond its minimum at 1.4616..., so M ≤ 1 from there on;
        // below it M may exceed 1, but never 1 / min Γ
        if e + 1.0 >= 1.4616321449683622 {
            prop_assert!(m <= 1.0, "M = {}", m);
        }
        prop_assert!(m <= 1.0 / 0.8856031944108887 + 1e-12, "M = {}", m);
    }

    #[test]
    fn rescale_round_trip(
        k in 0.1f64..10.0,
        big_t in 0.1f64..10.0,
        lambda in 0.1f64..0.9,
        alpha in 0.2f64..2.0,
        x in -3.0f64..3.0,
        t in 0.05f64..4.0,
    ) {
        let f = make_cylinder(1.5, 0.0, 3.0, 1.0).unwrap();
        let g = make_bump(BumpProfile::Gaussian, 0.0, 2.0, 0.5).unwrap();
        for base in [f, g] {
            let (k2, t2) = rescale_inverse(k, big_t);
            let there = rescale(base.clone(), k, lambda, alpha, big_t).unwrap();
            let back = rescale(there, k2, lambda, alpha, t2).unwrap();
            let (a, b) = (base.eval(&[x], t), back.eval(&[x], t));
            // points within rounding of the cylinder's jump are not comparable
            if (x.abs() - 1.5).abs() > 1e-9 && (t - 3.0).abs() > 1e-9 {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} vs {}", a, b);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn potential_is_monotone_in_the_field(
        alpha in 0.3f64..1.5,
        x in -2.0f64..2.0,
        t in 0.1f64..3.0,
        v in 0.0f64..2.0,
        extra in 0.0f64..2.0,
    ) {
        let quad = QuadratureSpec::default();
        let low = make_bump(BumpProfile::Gaussian, 0.0, 2.0, 0.5).unwrap();
        let high = Field::sum(vec![
            low.clone(),
            make_cylinder(1.0, 0.2, 1.5, extra).unwrap(),
            make_slab(0.0, 2.5, v).unwrap(),
        ]);
        let jl = j_alpha(&low, 1, alpha, &[x], t, &quad).unwrap().value;
        let jh = j_alpha(&high, 1, alpha, &[x], t, &quad).unwrap().value;
        prop_assert!(jl >= 0.0);
        prop_assert!(jh >= jl * (1.0 - 1e-9), "{} < {}", jh, jl);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn inverse_is_linear(
        alpha in 0.3f64..0.9,
        x in -1.0f64..1.0,
        t in 0.3f64..1.8,
    ) {
        let quad = QuadratureSpec::default().with_rel_tol(1e-10);
        let f1 = make_bump(BumpProfile::Gaussian, 0.0, 1.0, 0.5).unwrap();
        let f2 = make_bump(BumpProfile::Gaussian, 0.2, 2.0, 0.4).unwrap();
        let sum = Field::sum(vec![f1.clone(), f2.clone()]);
        let spec = InverseSpec::new(2, 0.02);
        let inv = |f: &Field| {
            let u = FieldFn { field: f, n: 1, quad };
            j_inverse(&u, alpha, &spec, &[x], t).unwrap().value
        };
        let (a, b, s) = (inv(&f1), inv(&f2), inv(&sum));
        prop_assert!((s - (a + b)).abs() <= 1e-6 * (a.abs() + b.abs()).max(1.0), "{} vs {} + {}", s, a, b);
    }
}

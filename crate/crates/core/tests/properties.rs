use approxlab_core::means::{family_mean, fourier_mean, kernel_catalog};
use approxlab_core::moduli::{lp_norm, modulus_curve, Discretization, HGrid, QuasiNormSpec};
use approxlab_core::spectral::{PeriodicFn, TrigPoly, UniformGrid};
use approxlab_core::{Complex, QuasiNormSpec32, UniformGrid32};
use proptest::prelude::*;
use std::f64::consts::PI;

fn coeffs(max_degree: usize) -> impl Strategy<Value = (usize, Vec<(f64, f64)>)> {
    (0..=max_degree).prop_flat_map(|n| (Just(n), prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * n + 1)))
}

fn poly((n, c): (usize, Vec<(f64, f64)>)) -> TrigPoly<f64> {
    TrigPoly::from_coeffs(n, c.into_iter().map(|(a, b)| Complex::new(a, b)).collect()).unwrap()
}

fn samples(len: usize) -> impl Strategy<Value = Vec<Complex<f64>>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| Complex::new(a, b)), len)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(2.0), 0.2..4.0f64]
}

fn coarse_disc() -> Discretization<f64> {
    Discretization::new(UniformGrid::new(128).unwrap(), HGrid::new(2.0 * PI * 1e-3, 2.0 * PI, 8).unwrap(), 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_round_trip(c in coeffs(12)) {
        let t = poly(c);
        let grid = UniformGrid::new(64).unwrap();
        let back = grid.dft(&t.sample(&grid, 0.0));
        for nu in -(t.degree() as i64)..=t.degree() as i64 {
            let j = nu.rem_euclid(64) as usize;
            prop_assert!((back[j] - t.coeff(nu)).norm() < 1e-12);
        }
    }

    #[test]
    fn evaluation_is_periodic(c in coeffs(10), x in -10.0..10.0f64) {
        let t = poly(c);
        prop_assert!((t.eval(x + 2.0 * PI) - t.eval(x)).norm() < 1e-10);
    }

    #[test]
    fn derivative_is_linear(a in coeffs(6), b in coeffs(6), s in -3.0..3.0f64, r in 1usize..4) {
        let (t, u) = (poly(a), poly(b));
        let n = t.degree().max(u.degree());
        let (t, u) = (t.with_degree(n), u.with_degree(n));
        let lhs = t.add(&u.scale(Complex::new(s, 0.0))).derivative(r);
        let rhs = t.derivative(r).add(&u.derivative(r).scale(Complex::new(s, 0.0)));
        prop_assert!(lhs.coeff_distance(&rhs) < 1e-9 * (1.0 + n as f64).powi(r as i32));
    }

    #[test]
    fn quasi_triangle_in_p1_power(f in samples(40), g in samples(40), p in exponent()) {
        let spec = QuasiNormSpec::new(p).unwrap();
        let p1 = spec.p1();
        let sum: Vec<_> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let lhs = lp_norm(&sum, &spec).unwrap().powf(p1);
        let rhs = lp_norm(&f, &spec).unwrap().powf(p1) + lp_norm(&g, &spec).unwrap().powf(p1);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn norm_is_homogeneous(f in samples(30), p in exponent(), re in -4.0..4.0f64, im in -4.0..4.0f64) {
        let c = Complex::new(re, im);
        for spec in [QuasiNormSpec::new(p).unwrap(), QuasiNormSpec::infinity()] {
            let scaled: Vec<_> = f.iter().map(|v| v * c).collect();
            let lhs = lp_norm(&scaled, &spec).unwrap();
            let rhs = c.norm() * lp_norm(&f, &spec).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn sup_norm_dominates(f in samples(30), p in exponent()) {
        let inf = lp_norm(&f, &QuasiNormSpec::infinity()).unwrap();
        prop_assert!(lp_norm(&f, &QuasiNormSpec::new(p).unwrap()).unwrap() <= inf * (1.0 + 1e-12));
    }

    #[test]
    fn modulus_is_monotone_and_bounded(c in coeffs(5), p in exponent(), k in 1usize..4) {
        let f = PeriodicFn::from_poly("t", &poly(c));
        let spec = QuasiNormSpec::new(p).unwrap();
        let disc = coarse_disc();
        let curve = modulus_curve(&f, k, 2.0 * PI, &spec, &disc).unwrap();
        // h decreasing, so omega must be nonincreasing along the vector.
        prop_assert!(curve.omega.windows(2).all(|w| w[0] >= w[1]));
        let norm = lp_norm(&f.sample_shifted(&disc.x, 0.0).unwrap(), &spec).unwrap();
        let bound = 2f64.powf(k as f64 / spec.p1()) * norm;
        prop_assert!(curve.omega[0] <= bound * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn family_means_reproduce_fourier_means(c in coeffs(6), lambda in -7.0..7.0f64, kind in 0usize..3) {
        let t = poly(c);
        let n = t.degree().max(1);
        let kernel = kernel_catalog::<f64>(["dirichlet", "fejer", "vp"][kind], n).unwrap();
        let f = PeriodicFn::from_poly("t", &t);
        let grid = UniformGrid::new(64).unwrap();
        let a = family_mean(&f, &kernel, lambda).unwrap();
        let b = fourier_mean(&f, &kernel, &grid).unwrap();
        prop_assert!(a.coeff_distance(&b) < 1e-10);
    }
}

#[test]
fn single_precision_pipeline() {
    let f = PeriodicFn::<f32>::closed("cos", true, |x: f32| Complex::new(x.cos(), 0.0));
    let grid = UniformGrid32::new(64).unwrap();
    let v = approxlab_core::fn_norm(&f, &grid, &QuasiNormSpec32::new(2.0).unwrap()).unwrap();
    assert!((v - 0.5f32.sqrt()).abs() < 1e-5);
    // |cos| has kinks, so the trapezoid rule needs a finer grid here.
    let fine = UniformGrid32::new(4096).unwrap();
    let one = approxlab_core::fn_norm(&f, &fine, &QuasiNormSpec32::new(1.0).unwrap()).unwrap();
    assert!((one - 2.0 / std::f32::consts::PI).abs() < 1e-5);
}

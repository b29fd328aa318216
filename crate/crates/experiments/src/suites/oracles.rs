use approxlab_core::bestapprox::best_approx;
use approxlab_core::means::{family_mean, fourier_mean, kernel_catalog, KERNEL_NAMES};
use approxlab_core::moduli::difference_norm;
use approxlab_core::spectral::{PeriodicFn, TrigPoly, UniformGrid};
use approxlab_core::testfns::lookup;
use approxlab_core::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use super::rng;
use crate::config::{norm_spec, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey};

pub const PARSEVAL_TOL: f64 = 1e-8;
pub const FAMILY_TOL: f64 = 1e-10;
pub const DIFFERENCE_TOL: f64 = 1e-10;

fn random_poly(rng: &mut impl Rng, n: usize) -> TrigPoly<f64> {
    TrigPoly::from_fn(n, |_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// `sqrt(sum_{|nu| > n} |c_nu|^2)` straight from the coefficients.
fn parseval_tail(coeffs: &[(i64, Complex<f64>)], n: usize) -> f64 {
    coeffs.iter().filter(|(nu, _)| nu.unsigned_abs() as usize > n).map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn oracles(s: &Settings) -> Result<Report> {
    let trials = s.trials.unwrap_or(100);
    let m = s.grid_size.unwrap_or(4096);
    let grid = UniformGrid::new(m)?;
    let mut rep = Report::new(
        "oracles",
        super::Suite::Oracles.checks(),
        json!({"settings": s, "trials": trials, "grid_size": m, "tolerances": {
            "parseval": PARSEVAL_TOL, "family": FAMILY_TOL, "difference": DIFFERENCE_TOL}}),
    );

    // Best L_2 approximation against the coefficient tail.
    let mut r = rng(s.seed, 7);
    let mut cases: Vec<(String, PeriodicFn<f64>, Vec<(i64, Complex<f64>)>)> = Vec::new();
    for name in ["lacunary:0.5", "odd-harmonic:2:100", "poly3"] {
        let e = lookup::<f64>(name)?;
        let c = e.f.finite_coeffs().expect("band-limited catalog entry");
        cases.push((name.to_string(), e.f, c));
    }
    for i in 0..3 {
        let t = random_poly(&mut r, 40);
        cases.push((format!("random:{i}"), t.to_fn(format!("random:{i}")), t.terms().collect()));
    }
    let mut worst = 0.0f64;
    let budget = s.budget.clone();
    for (name, f, c) in &cases {
        for n in [0usize, 4, 8, 16, 32] {
            let got = best_approx(f, n, &norm_spec(2.0)?, &budget, &grid)?.value;
            let want = parseval_tail(c, n);
            worst = worst.max((got - want).abs());
            let key = RowKey::new("oracles", name).p(2.0).n(n);
            rep.rows.push(key.row("E_n", got));
            rep.rows.push(key.row("parseval_tail", want));
        }
    }
    rep.verdict("best L2 approximation equals the Parseval tail", worst <= PARSEVAL_TOL, format!("max |E_n - tail| = {worst:.3e}"));

    // Family means reproduce Fourier means on polynomials.
    let mut r = rng(s.seed, 8);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let n = r.random_range(1..=16usize);
        let t = random_poly(&mut r, n);
        let lambda = r.random_range(0.0..2.0 * std::f64::consts::PI);
        let kernel = kernel_catalog::<f64>(KERNEL_NAMES[trial % KERNEL_NAMES.len()], n)?;
        let f = t.to_fn("T");
        let a = family_mean(&f, &kernel, lambda)?;
        let b = fourier_mean(&f, &kernel, &grid)?;
        let d = a.coeff_distance(&b);
        worst = worst.max(d);
        rep.rows.push(RowKey::new("oracles", kernel.name()).n(n).h(lambda).row("family_minus_fourier", d));
    }
    rep.verdict(
        format!("family mean equals Fourier mean on {trials} random polynomials"),
        worst <= FAMILY_TOL,
        format!("max coefficient distance {worst:.3e}"),
    );

    // Differences of exponentials.
    let small = UniformGrid::new(256)?;
    let mut worst = 0.0f64;
    for mu in [1i64, 2, 5, 13] {
        let f = PeriodicFn::sparse(format!("exp:{mu}"), vec![(mu, Complex::new(1.0, 0.0))]);
        for k in 1..=3usize {
            for h in [1e-3, 0.1, 1.0, 2.5] {
                let want = (2.0 * (mu as f64 * h / 2.0).sin().abs()).powi(k as i32);
                for p in [0.5, 1.0, 2.0, f64::INFINITY] {
                    let got = difference_norm(&f, h, k, &norm_spec(p)?, &small)?;
                    worst = worst.max((got - want).abs());
                    rep.rows.push(RowKey::new("oracles", &format!("exp:{mu}")).p(p).k(k).h(h).row("difference_norm", got));
                }
            }
        }
    }
    rep.verdict(
        "||Delta_h^k e^{i mu x}||_p = (2|sin(mu h/2)|)^k",
        worst <= DIFFERENCE_TOL,
        format!("max deviation {worst:.3e}"),
    );
    Ok(rep)
}

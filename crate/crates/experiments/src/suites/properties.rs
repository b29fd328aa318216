use std::collections::BTreeMap;

use approxlab_core::moduli::{fn_norm, lp_norm, psi, Discretization, ModulusCurve, QuasiNormSpec};
use approxlab_core::spectral::{PeriodicFn, TrigPoly, UniformGrid};
use approxlab_core::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use super::{entries, rng, CATALOG};
use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey};

/// Relative slack for inequalities whose proofs split a step into non-grid parts.
pub const QUADRATURE_TOL: f64 = 5e-3;
/// Inequalities that hold exactly for the discrete quantities, up to rounding.
/// Rounding noise where a difference vanishes is amplified by `p < 1`
/// quasi-norms, hence the loose value.
pub const EXACT_TOL: f64 = 1e-6;
const ALPHA: f64 = 0.5;
const DELTAS: [f64; 3] = [1.0, 0.25, 0.0625];
const LAMBDAS: [f64; 3] = [0.5, 2.0, 5.0];
const PSI_ORDERS: [(usize, usize); 3] = [(1, 1), (2, 1), (1, 2)];

/// Absolute allowance for rounding noise in quantities of order one.
pub const ABS_FLOOR: f64 = 1e-10;

#[derive(Default)]
struct Stat {
    worst: f64,
    tol: f64,
    count: usize,
    failures: usize,
    at: String,
}

/// Worst `lhs / rhs` and failure count per named inequality.
#[derive(Default)]
struct Tally {
    stats: BTreeMap<String, Stat>,
}

impl Tally {
    fn check(&mut self, name: &str, tol: f64, lhs: f64, rhs: f64, at: impl Fn() -> String) {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs <= ABS_FLOOR {
            0.0
        } else {
            f64::INFINITY
        };
        let e = self.stats.entry(name.to_string()).or_insert_with(|| Stat { tol, ..Default::default() });
        e.count += 1;
        if lhs > rhs * (1.0 + tol) + ABS_FLOOR {
            e.failures += 1;
            e.at = format!("{} (lhs {lhs:.6e}, rhs {rhs:.6e})", at());
        }
        if ratio > e.worst {
            e.worst = ratio;
            if e.failures == 0 {
                e.at = at();
            }
        }
    }
}

/// Norms of one sample vector in every exponent.
fn norms(values: &[Complex<f64>], specs: &[QuasiNormSpec<f64>]) -> Result<Vec<f64>> {
    specs.iter().map(|s| Ok(lp_norm(values, s)?)).collect()
}

/// Modulus curves `omega_k` for each exponent from one set of samples per step.
fn curves(f: &PeriodicFn<f64>, k: usize, disc: &Discretization<f64>, specs: &[QuasiNormSpec<f64>], shift: f64) -> Result<Vec<ModulusCurve<f64>>> {
    let hs = disc.h.values().to_vec();
    let mut per_p = vec![Vec::with_capacity(hs.len()); specs.len()];
    for &h in &hs {
        let v = f.difference(h, k).sample_shifted(&disc.x, shift)?;
        for (i, n) in norms(&v, specs)?.into_iter().enumerate() {
            per_p[i].push(n);
        }
    }
    Ok(per_p.into_iter().map(|n| ModulusCurve::from_norms(k, hs.clone(), n)).collect())
}

/// `||Delta_s^k Delta_h^r f||_p` for all steps `h, s <= 1`, indexed `[p][h][s]`.
fn psi_matrix(
    f: &PeriodicFn<f64>,
    k: usize,
    r: usize,
    hs: &[f64],
    disc: &Discretization<f64>,
    specs: &[QuasiNormSpec<f64>],
    shift: f64,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut out = vec![vec![vec![0.0; hs.len()]; hs.len()]; specs.len()];
    for (i, &h) in hs.iter().enumerate() {
        let g = f.difference(h, r);
        for (j, &s) in hs.iter().enumerate() {
            let v = g.difference(s, k).sample_shifted(&disc.x, shift)?;
            for (q, n) in norms(&v, specs)?.into_iter().enumerate() {
                out[q][i][j] = n;
            }
        }
    }
    Ok(out)
}

fn psi_from_matrix(m: &[Vec<f64>], hs: &[f64], delta: f64) -> f64 {
    let start = hs.iter().position(|&h| h <= delta * (1.0 + 1e-12)).unwrap_or(hs.len());
    let mut best = 0.0f64;
    for i in start..hs.len() {
        let inner = m[i][start..].iter().copied().fold(0.0, f64::max);
        best = best.max(inner / hs[i].powf(ALPHA));
    }
    best
}

fn check_function(
    label: &str,
    f: &PeriodicFn<f64>,
    ps: &[f64],
    disc: &Discretization<f64>,
    tally: &mut Tally,
    rep: &mut Report,
    cross_check: bool,
) -> Result<()> {
    let specs = ps.iter().map(|&p| norm_spec(p)).collect::<Result<Vec<_>>>()?;
    // Half-spacing offset keeps nodes away from jumps at multiples of pi.
    let shift = 0.5 * disc.x.spacing();
    let by_k: Vec<Vec<ModulusCurve<f64>>> = (1..=3).map(|k| curves(f, k, disc, &specs, shift)).collect::<Result<_>>()?;
    let psi_hs = disc.h.truncated(DELTAS[0])?.to_vec();
    let mats: Vec<Vec<Vec<Vec<f64>>>> =
        PSI_ORDERS.iter().map(|&(k, r)| psi_matrix(f, k, r, &psi_hs, disc, &specs, shift)).collect::<Result<_>>()?;
    let h_min = disc.h.h_min();
    let h_max = disc.h.h_max();

    for (q, (&p, spec)) in ps.iter().zip(&specs).enumerate() {
        let p1 = spec.p1();
        let norm = lp_norm(&f.sample_shifted(&disc.x, shift)?, spec)?;
        let curve = |k: usize| &by_k[k - 1][q];
        let key = RowKey::new("modulus-properties", label).p(p);
        rep.rows.push(key.row("norm", norm));

        // omega_k <= 2^{(k-r)/p1} omega_r <= 2^{k/p1} ||f||
        for (r, k) in [(1usize, 2usize), (1, 3), (2, 3)] {
            let c = 2f64.powf((k - r) as f64 / p1);
            for i in 0..curve(k).h.len() {
                tally.check("omega_k <= 2^((k-r)/p1) omega_r", EXACT_TOL, curve(k).omega[i], c * curve(r).omega[i], || {
                    format!("{label} p={p} r={r} k={k} h={:.3e}", curve(k).h[i])
                });
            }
        }
        for k in 1..=3usize {
            let c = 2f64.powf(k as f64 / p1);
            let w = *curve(k).omega.first().expect("non-empty grid");
            tally.check("omega_k <= 2^(k/p1) ||f||", EXACT_TOL, w, c * norm, || format!("{label} p={p} k={k}"));
        }

        // omega_r(lambda h) <= r^{1/p1-1} (1+lambda)^{1/p1+r-1} omega_r(h)
        for r in 1..=2usize {
            for &lam in &LAMBDAS {
                let c = (r as f64).powf(1.0 / p1 - 1.0) * (1.0 + lam).powf(1.0 / p1 + r as f64 - 1.0);
                let cv = curve(r);
                for i in 0..cv.h.len() {
                    let t = lam * cv.h[i];
                    if t > h_max || t < h_min {
                        continue;
                    }
                    tally.check("omega_r(lambda h) <= C(lambda) omega_r(h)", QUADRATURE_TOL, cv.omega_at(t)?, c * cv.omega[i], || {
                        format!("{label} p={p} r={r} lambda={lam} h={:.3e}", cv.h[i])
                    });
                }
            }
        }

        // theta_k <= 2^{(k-r)/p1} theta_r and theta_k(lambda delta) <= C theta_k(delta)
        for &delta in &DELTAS {
            for (r, k) in [(1usize, 2usize), (1, 3), (2, 3)] {
                let lhs = curve(k).theta_sweep(ALPHA, delta)?.sup;
                let rhs = 2f64.powf((k - r) as f64 / p1) * curve(r).theta_sweep(ALPHA, delta)?.sup;
                tally.check("theta_k <= 2^((k-r)/p1) theta_r", EXACT_TOL, lhs, rhs, || format!("{label} p={p} r={r} k={k} delta={delta}"));
            }
            for k in 1..=2usize {
                let base = curve(k).theta_sweep(ALPHA, delta)?.sup;
                rep.rows.push(key.clone().k(k).alpha(ALPHA).h(delta).row("theta", base));
                for &lam in &LAMBDAS {
                    let t = lam * delta;
                    if t > h_max || t < h_min {
                        continue;
                    }
                    let c = (k as f64).powf(1.0 / p1 - 1.0) * (lam + 1.0).powf(k as f64 - ALPHA + 1.0 / p1 - 1.0);
                    let lhs = curve(k).theta_sweep(ALPHA, t)?.sup;
                    tally.check("theta_k(lambda delta) <= C(lambda) theta_k(delta)", QUADRATURE_TOL, lhs, c * base, || {
                        format!("{label} p={p} k={k} lambda={lam} delta={delta}")
                    });
                }
            }
        }

        // theta_{k+r} <= psi_{k,r} <= 2^{max(k,r)/p1} theta_{min(k,r)}
        for (o, &(k, r)) in PSI_ORDERS.iter().enumerate() {
            for &delta in &DELTAS {
                let ps_val = psi_from_matrix(&mats[o][q], &psi_hs, delta);
                let low = curve(k + r).theta_sweep(ALPHA, delta)?.sup;
                let up = curve(k.min(r)).theta_sweep(ALPHA, delta)?.sup;
                let c = 2f64.powf(k.max(r) as f64 / p1);
                rep.rows.push(key.clone().k(k).r(r).alpha(ALPHA).h(delta).row("psi", ps_val));
                tally.check("theta_{k+r} <= psi_{k,r}", EXACT_TOL, low, ps_val, || format!("{label} p={p} k={k} r={r} delta={delta}"));
                tally.check("psi_{k,r} <= 2^(max(k,r)/p1) theta_min(k,r)", EXACT_TOL, ps_val, c * up, || {
                    format!("{label} p={p} k={k} r={r} delta={delta}")
                });
                if up > 0.0 {
                    rep.rows.push(key.clone().k(k).r(r).alpha(ALPHA).h(delta).row("psi_over_theta_min", ps_val / up));
                }
            }
        }
        if cross_check {
            let small = disc.h.truncated(DELTAS[2])?.to_vec();
            let mat = psi_matrix(f, 1, 1, &small, disc, &specs, 0.0)?;
            let delta = DELTAS[2];
            let lib = psi(f, 1, 1, ALPHA, delta, spec, disc)?.sup;
            let own = psi_from_matrix(&mat[q], &small, delta);
            tally.check("library psi equals the sample sweep", EXACT_TOL, (lib - own).abs(), own.abs().max(1e-300), || format!("{label} p={p}"));
        }
    }
    Ok(())
}

/// `||f + g||^{p1} <= ||f||^{p1} + ||g||^{p1}` on the grid.
fn quasi_triangle(pairs: &[(&str, &PeriodicFn<f64>, &PeriodicFn<f64>)], ps: &[f64], disc: &Discretization<f64>, tally: &mut Tally) -> Result<()> {
    for &(label, f, g) in pairs {
        let sum = PeriodicFn::linear_combination("f+g", vec![(Complex::new(1.0, 0.0), f.clone()), (Complex::new(1.0, 0.0), g.clone())]);
        for &p in ps {
            let spec = norm_spec(p)?;
            let p1 = spec.p1();
            let lhs = fn_norm(&sum, &disc.x, &spec)?.powf(p1);
            let rhs = fn_norm(f, &disc.x, &spec)?.powf(p1) + fn_norm(g, &disc.x, &spec)?.powf(p1);
            tally.check("||f+g||^p1 <= ||f||^p1 + ||g||^p1", EXACT_TOL, lhs, rhs, || format!("{label} p={p}"));
        }
    }
    Ok(())
}

pub fn modulus_properties(s: &Settings) -> Result<Report> {
    let names = s.functions_or(&CATALOG);
    let ps = s.p_or(&[0.5, 1.0, 2.0, f64::INFINITY]);
    let trials = s.trials.unwrap_or(100);
    let two_pi = 2.0 * std::f64::consts::PI;
    let geometric = s.discretization(2048, 16, two_pi * 1e-3)?;
    let disc = Discretization::new(geometric.x.clone(), geometric.h.snapped_to(&geometric.x), geometric.lambda_points);
    let poly_grid = UniformGrid::new(256)?;
    let poly_disc = Discretization::new(poly_grid.clone(), geometric.h.snapped_to(&poly_grid), geometric.lambda_points);
    let mut rep = Report::new(
        "modulus-properties",
        super::Suite::ModulusProperties.checks(),
        json!({
            "settings": s,
            "functions": names,
            "random_polynomials": trials,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "alpha": ALPHA,
            "deltas": DELTAS,
            "lambdas": LAMBDAS,
            "psi_orders": PSI_ORDERS,
            "quadrature_tol": QUADRATURE_TOL,
            "exact_tol": EXACT_TOL,
            "discretization": describe_disc(&disc),
            "h_steps": "geometric grid snapped to multiples of the x-spacing",
            "polynomial_discretization": describe_disc(&poly_disc),
        }),
    );
    let mut tally = Tally::default();
    let cat = entries(&names)?;
    for e in &cat {
        check_function(&e.name, &e.f, &ps, &disc, &mut tally, &mut rep, true)?;
    }
    let mut r = rng(s.seed, 11);
    let polys: Vec<(String, PeriodicFn<f64>)> = (0..trials)
        .map(|i| {
            let n = r.random_range(1..=8usize);
            let t = TrigPoly::from_fn(n, |_| Complex::new(r.sample(StandardNormal), r.sample(StandardNormal)));
            let label = format!("random:{i}");
            (label.clone(), t.to_fn(label))
        })
        .collect();
    for (label, f) in &polys {
        check_function(label, f, &ps, &poly_disc, &mut tally, &mut rep, false)?;
    }

    let mut pairs: Vec<(&str, &PeriodicFn<f64>, &PeriodicFn<f64>)> = cat.windows(2).map(|w| (w[0].name.as_str(), &w[0].f, &w[1].f)).collect();
    pairs.extend(polys.windows(2).map(|w| (w[0].0.as_str(), &w[0].1, &w[1].1)));
    quasi_triangle(&pairs, &ps, &disc, &mut tally)?;

    for (name, st) in &tally.stats {
        rep.verdict(
            name.clone(),
            st.failures == 0,
            format!(
                "{} cases, {} violations, max lhs/rhs = {:.6} (allowed 1 + {:e} plus {ABS_FLOOR:e}), {} at {}",
                st.count,
                st.failures,
                st.worst,
                st.tol,
                if st.failures > 0 { "last violation" } else { "worst" },
                if st.at.is_empty() { "-" } else { &st.at }
            ),
        );
    }
    Ok(rep)
}

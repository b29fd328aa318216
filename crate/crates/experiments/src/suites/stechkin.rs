use std::f64::consts::PI;

use approxlab_core::moduli::lp_norm;
use approxlab_core::spectral::{difference_multiplier, TrigPoly, UniformGrid};
use approxlab_core::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use super::rng;
use crate::config::{norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey};
use crate::stats::ratio_summary;

/// Allowed growth of the ratio spread from the smallest to the largest degree.
pub const SPREAD_GROWTH: f64 = 2.0;
/// Steps `h_j = (pi/n) 2^{-j/2}`, `j = 0..STEPS`.
pub const STEPS: usize = 13;
pub const CLOSED_FORM_TOL: f64 = 1e-10;
/// Grid points per unit of degree.
pub const OVERSAMPLE: usize = 64;

fn steps(n: usize) -> Vec<f64> {
    (0..STEPS).map(|j| PI / n as f64 * 2f64.powf(-(j as f64) / 2.0)).collect()
}

/// `h^r ||T^(r)||_p / ||Delta_h^r T||_p` for all exponents at once.
fn ratios(t: &TrigPoly<f64>, r: usize, h: f64, grid: &UniformGrid<f64>, ps: &[f64]) -> Result<Vec<f64>> {
    let d = t.derivative(r).sample(grid, 0.0);
    let diff = t.map_multiplier(|nu| difference_multiplier(nu, h, r)).sample(grid, 0.0);
    ps.iter()
        .map(|&p| {
            let spec = norm_spec(p)?;
            Ok(h.powi(r as i32) * lp_norm(&d, &spec)? / lp_norm(&diff, &spec)?)
        })
        .collect()
}

pub fn stechkin(s: &Settings) -> Result<Report> {
    let ps = s.p_or(&[0.5, 1.0, 2.0, f64::INFINITY]);
    let rs = s.r.map_or(vec![1, 2], |r| vec![r]);
    let degrees = s.degrees_or(&[8, 16, 32, 64]);
    let trials = s.trials.unwrap_or(50);
    let mut rep = Report::new(
        "stechkin",
        super::Suite::Stechkin.checks(),
        json!({
            "settings": s,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "r": rs,
            "n": degrees,
            "trials": trials,
            "steps": "h_j = (pi/n) 2^(-j/2), j = 0..12",
            "grid_points_per_degree": OVERSAMPLE,
            "spread_growth": SPREAD_GROWTH,
        }),
    );

    // ratio samples per (r, p, n)
    let mut cells: Vec<Vec<Vec<Vec<f64>>>> = vec![vec![vec![Vec::new(); degrees.len()]; ps.len()]; rs.len()];
    for (di, &n) in degrees.iter().enumerate() {
        let grid = UniformGrid::new(OVERSAMPLE * n)?;
        let mut worst_closed = 0.0f64;
        for trial in 0..trials {
            let mut r_ = rng(s.seed, ((n as u64) << 32) | trial as u64);
            let t = TrigPoly::from_fn(n, |_| Complex::new(r_.sample(StandardNormal), r_.sample(StandardNormal)));
            for (ri, &r) in rs.iter().enumerate() {
                for &h in &steps(n) {
                    for (pi, v) in ratios(&t, r, h, &grid, &ps)?.into_iter().enumerate() {
                        cells[ri][pi][di].push(v);
                    }
                }
            }
        }
        // e^{inx}: ratio (nh)^r / (2 sin(nh/2))^r in every norm
        let e = TrigPoly::monomial(n, n as i64, Complex::new(1.0, 0.0));
        for &r in &rs {
            for &h in &steps(n) {
                let want = (n as f64 * h / (2.0 * (n as f64 * h / 2.0).sin())).powi(r as i32);
                for v in ratios(&e, r, h, &grid, &ps)? {
                    worst_closed = worst_closed.max((v - want).abs() / want);
                }
            }
        }
        rep.verdict(
            format!("closed form e^(inx) n={n}"),
            worst_closed <= CLOSED_FORM_TOL,
            format!("max relative deviation {worst_closed:.3e}"),
        );
    }

    for (ri, &r) in rs.iter().enumerate() {
        for (pi, &p) in ps.iter().enumerate() {
            let mut spreads = Vec::new();
            for (di, &n) in degrees.iter().enumerate() {
                let v = &cells[ri][pi][di];
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = v.iter().copied().fold(0.0, f64::max);
                let key = RowKey::new("stechkin", "random").p(p).r(r).n(n);
                rep.rows.push(key.row("ratio_min", lo));
                rep.rows.push(key.row("ratio_max", hi));
                rep.rows.push(key.row("spread", hi / lo));
                spreads.push((n, hi / lo));
            }
            let label = format!("r={r} p={p}");
            let first = spreads.first().map_or(f64::NAN, |x| x.1);
            let last = spreads.last().map_or(f64::NAN, |x| x.1);
            rep.verdict(
                format!("uniform in n {label}"),
                last <= SPREAD_GROWTH * first,
                format!(
                    "spread {last:.4} at n={} vs {first:.4} at n={}",
                    degrees.last().copied().unwrap_or(0),
                    degrees.first().copied().unwrap_or(0)
                ),
            );
            rep.ratio_stats.push(ratio_summary(format!("spread {label}"), &spreads));
        }
    }
    Ok(rep)
}

use approxlab_core::moduli::modulus_curve;
use serde_json::json;

use super::entries;
use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey, SlopeFit};
use crate::stats::rate_fit;

/// Fit window for the modulus slopes.
pub const WINDOW: (f64, f64) = (1e-3, 1e-1);
/// Allowed shortfall of a fitted slope below the known exponent.
pub const SLOPE_SLACK: f64 = 0.2;

/// Fits `omega_k(f, h)_p ~ h^beta` on the window and compares with known exponents.
pub fn rates(s: &Settings) -> Result<Report> {
    let disc = s.discretization(1 << 20, 32, 2.0 * std::f64::consts::PI * 1e-4)?;
    let names = s.functions_or(&["odd-harmonic:1"]);
    let ps = s.p_or(&[0.5]);
    let ks = s.k_or(&[1]);
    let mut rep = Report::new(
        "rates",
        super::Suite::Rates.checks(),
        json!({
            "settings": s,
            "functions": names,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "k": ks,
            "window": [WINDOW.0, WINDOW.1],
            "slope_slack": SLOPE_SLACK,
            "discretization": describe_disc(&disc),
        }),
    );
    for e in entries(&names)? {
        for &p in &ps {
            let spec = norm_spec(p)?;
            for &k in &ks {
                let curve = modulus_curve(&e.f, k, WINDOW.1, &spec, &disc)?;
                let key = RowKey::new("rates", &e.name).p(p).k(k);
                let mut pts = Vec::new();
                for (&h, &w) in curve.h.iter().zip(&curve.omega) {
                    rep.rows.push(key.clone().h(h).row("omega", w));
                    if h >= WINDOW.0 * (1.0 - 1e-12) {
                        pts.push((h, w));
                    }
                }
                let label = format!("{} p={p} k={k}", e.name);
                if pts.iter().any(|&(_, w)| !(w > 0.0)) {
                    rep.note(format!("{label}: modulus vanishes on the window, no fit"));
                    continue;
                }
                let fit = rate_fit(&pts)?;
                let expected = e.rate(p, k).map(|r| r.exponent);
                rep.fitted_slopes.push(SlopeFit {
                    label: label.clone(),
                    slope: fit.slope,
                    intercept: fit.intercept,
                    residual: fit.residual,
                    expected,
                });
                rep.rows.push(key.row("slope", fit.slope));
                if let Some(beta) = expected {
                    rep.verdict(
                        format!("rate {label}"),
                        fit.slope >= beta - SLOPE_SLACK,
                        format!("slope {:.4} >= {:.4} - {SLOPE_SLACK}", fit.slope, beta),
                    );
                    rep.observe(
                        format!("sharpness {label}"),
                        (fit.slope - beta).abs() <= SLOPE_SLACK,
                        format!("|slope - {beta:.4}| = {:.4}", (fit.slope - beta).abs()),
                    );
                }
            }
        }
    }
    Ok(rep)
}

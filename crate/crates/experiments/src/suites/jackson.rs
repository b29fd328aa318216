use approxlab_core::bestapprox::best_approx_batch;
use approxlab_core::moduli::{fn_norm, modulus_curve};
use serde_json::json;

use super::{entries, in_space, CATALOG};
use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey};
use crate::stats::ratio_summary;

/// Largest admissible rank correlation of the ratio with `n`.
pub const MAX_TREND: f64 = 0.8;
pub const MAX_OVER_MEDIAN: f64 = 3.0;
/// `E_n` below this fraction of `||f||` counts as exact reproduction.
pub const REPRODUCTION_TOL: f64 = 1e-8;

/// `E_n(f)_p / omega_k(f, 1/n)_p` over `n`: bounded, and not growing.
pub fn jackson(s: &Settings) -> Result<Report> {
    let names = s.functions_or(&CATALOG);
    let ps = s.p_or(&[0.5, 1.0, 2.0, f64::INFINITY]);
    let ks = s.k_or(&[1, 2]);
    let degrees = s.degrees_or(&[4, 8, 16, 32, 64]);
    let disc = s.discretization(4096, 32, 2.0 * std::f64::consts::PI * 1e-4)?;
    let mut rep = Report::new(
        "jackson",
        super::Suite::Jackson.checks(),
        json!({
            "settings": s,
            "functions": names,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "k": ks,
            "n": degrees,
            "max_trend": MAX_TREND,
            "max_over_median": MAX_OVER_MEDIAN,
            "discretization": describe_disc(&disc),
            "budget": s.budget,
        }),
    );
    let t_max = 1.0 / *degrees.iter().min().unwrap_or(&1) as f64;
    for e in entries(&names)? {
        for &p in &ps {
            if p.is_infinite() && !e.continuous {
                rep.note(format!("{}: skipped at p = inf, E_n does not tend to zero for discontinuous functions", e.name));
                continue;
            }
            let spec = norm_spec(p)?;
            let results = best_approx_batch(&e.f, &degrees, &spec, &s.budget, &disc.x)?;
            let norm = fn_norm(&e.f, &disc.x, &spec)?;
            let uncertified = results.iter().filter(|r| !r.certified).count();
            if uncertified > 0 {
                rep.note(format!("{} p={p}: {uncertified} of {} E_n values are numerical upper bounds", e.name, results.len()));
            }
            for &k in &ks {
                let curve = modulus_curve(&e.f, k, t_max, &spec, &disc)?;
                let label = format!("{} p={p} k={k}", e.name);
                let mut ratios = Vec::new();
                for (&n, res) in degrees.iter().zip(&results) {
                    let key = RowKey::new("jackson", &e.name).p(p).k(k).n(n);
                    let w = curve.omega_at(1.0 / n as f64)?;
                    rep.rows.push(key.row("E_n", res.value));
                    rep.rows.push(key.row("omega", w));
                    if in_space(&e, n) {
                        rep.verdict(
                            format!("reproduction {label} n={n}"),
                            res.value <= REPRODUCTION_TOL * norm.max(1.0),
                            format!("E_n = {:.3e} for a polynomial of degree <= n", res.value),
                        );
                        continue;
                    }
                    let ratio = res.value / w;
                    rep.rows.push(key.row("ratio", ratio));
                    ratios.push((n, ratio));
                }
                if ratios.len() < 2 {
                    continue;
                }
                let st = ratio_summary(&label, &ratios);
                let trend = st.spearman;
                rep.verdict(
                    format!("no growth {label}"),
                    trend.is_none_or(|r| r < MAX_TREND) && st.max_over_median <= MAX_OVER_MEDIAN,
                    format!(
                        "spearman {} (|rho| {}), max/median {:.3}",
                        trend.map_or("n/a".into(), |r| format!("{r:.3}")),
                        trend.map_or("n/a".into(), |r| format!("{:.3}", r.abs())),
                        st.max_over_median
                    ),
                );
                rep.ratio_stats.push(st);
            }
        }
    }
    Ok(rep)
}

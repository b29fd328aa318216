use approxlab_core::moduli::{modulus_curve, psi, Discretization};
use serde_json::json;

use super::{entries, log_integral};
use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey};
use crate::stats::ratio_summary;

pub const MAX_CONSTANT: f64 = 100.0;
/// Condition counts as satisfied when its measured constant stays below this.
pub const CONDITION_MAX: f64 = 10.0;
/// Scales `delta = 2^-j`.
const SCALES: std::ops::RangeInclusive<i32> = 2..=7;

/// Integral of `omega_{r+k}` against `psi_{k,r,alpha}` on a `delta`-sweep.
pub fn integral_condition(s: &Settings) -> Result<Report> {
    let names = s.functions_or(&["triangle", "odd-harmonic:1", "odd-harmonic:2", "lacunary:1.5", "lacunary:0.5"]);
    let ps = s.p_or(&[0.5, 1.0, 2.0]);
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let k = s.k_or(&[1])[0];
    let base = s.discretization(4096, 16, 2.0 * std::f64::consts::PI * 1e-4)?;
    let disc = Discretization::new(base.x.clone(), base.h.snapped_to(&base.x), base.lambda_points);
    let deltas: Vec<f64> = SCALES.map(|j| 2f64.powi(-j)).collect();
    // alpha = r with p < 1 is open; measured without a verdict
    let mut configs = vec![(r, alpha, true)];
    if s.alpha.is_none() && alpha < r as f64 {
        configs.push((r, r as f64, false));
    }
    let mut rep = Report::new(
        "integral-condition",
        super::Suite::IntegralCondition.checks(),
        json!({
            "settings": s,
            "functions": names,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "r": r,
            "alpha": alpha,
            "k": k,
            "delta": deltas,
            "max_constant": MAX_CONSTANT,
            "condition_max": CONDITION_MAX,
            "discretization": describe_disc(&disc),
        }),
    );
    for e in entries(&names)? {
        for &p in &ps {
            let spec = norm_spec(p)?;
            let p1 = spec.p1();
            let curve = modulus_curve(&e.f, r + k, deltas[0], &spec, &disc)?;
            for &(r, a, asserted) in &configs {
                if !asserted && p >= 1.0 {
                    continue;
                }
                let label = format!("{} p={p} r={r} k={k} alpha={a}", e.name);
                let mut condition = Vec::new();
                let mut lower = Vec::new();
                let mut upper = Vec::new();
                for (j, &d) in SCALES.zip(&deltas) {
                    let int = log_integral(&curve, a, p1, d)?;
                    let ps_v = psi(&e.f, k, r, a, d, &spec, &disc)?.sup;
                    let right = curve.omega_at(d)? / d.powf(a);
                    let key = RowKey::new("integral-condition", &e.name).p(p).r(r).alpha(a).k(k).h(d);
                    rep.rows.push(key.row("integral", int.value));
                    rep.rows.push(key.row("integral_below_grid_share", int.below_grid));
                    rep.rows.push(key.row("psi", ps_v));
                    rep.rows.push(key.row("omega_r+k/delta^alpha", right));
                    let idx = j as usize;
                    condition.push((idx, int.value / right));
                    lower.push((idx, ps_v / int.value));
                    upper.push((idx, int.value / ps_v));
                }
                let cond = ratio_summary(format!("condition {label}"), &condition);
                let lo = ratio_summary(format!("psi / integral {label}"), &lower);
                let up = ratio_summary(format!("integral / psi {label}"), &upper);
                let holds = cond.max.is_finite() && cond.max <= CONDITION_MAX;
                rep.observe(
                    format!("condition {label}"),
                    holds,
                    format!("max integral / (omega_(r+k)(f, delta) / delta^alpha) = {:.4}", cond.max),
                );
                let lower_detail = format!("max psi / integral = {:.4} <= {MAX_CONSTANT}", lo.max);
                if asserted {
                    rep.verdict(format!("psi below integral {label}"), lo.max <= MAX_CONSTANT, lower_detail);
                } else {
                    rep.observe(format!("psi below integral {label}"), lo.max <= MAX_CONSTANT, lower_detail);
                }
                let upper_detail = format!("max integral / psi = {:.4} with the condition {}", up.max, if holds { "holding" } else { "failing" });
                if asserted && holds {
                    rep.verdict(format!("integral below psi {label}"), up.max <= MAX_CONSTANT, upper_detail);
                } else {
                    rep.observe(format!("integral below psi {label}"), up.max <= MAX_CONSTANT, upper_detail);
                }
                rep.ratio_stats.extend([cond, lo, up]);
            }
        }
    }
    Ok(rep)
}

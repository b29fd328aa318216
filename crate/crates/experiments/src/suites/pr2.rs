use approxlab_core::bestapprox::{best_approx_holder_batch, en_zero};
use approxlab_core::means::tilde;
use approxlab_core::moduli::{fn_norm, HolderSpec};
use serde_json::json;

use super::{entries, in_space, tilde_term};
use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey};
use crate::stats::ratio_summary;

pub const MAX_CONSTANT: f64 = 100.0;
/// Left side counted as zero for polynomials, relative to `||f||_p`.
pub const ZERO_TOL: f64 = 1e-10;

/// `n^{1-1/p} sup_h ||(Delta_h^r f)~_n||_p / h^alpha <= C E_n(f)_H`, with the
/// solver's upper bound in place of `E_n(f)_H`.
pub fn pr2_lower_bound(s: &Settings) -> Result<Report> {
    let names = s.functions_or(&["odd-harmonic:1", "poly3"]);
    let ps = s.p_or(&[0.5]);
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let degrees = s.degrees_or(&[2, 4, 8, 16]);
    let disc = s.discretization(2048, 8, 2.0 * std::f64::consts::PI * 1e-3)?;
    let mut rep = Report::new(
        "pr2",
        super::Suite::Pr2.checks(),
        json!({
            "settings": s,
            "functions": names,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "r": r,
            "alpha": alpha,
            "n": degrees,
            "max_constant": MAX_CONSTANT,
            "discretization": describe_disc(&disc),
            "budget": s.budget,
        }),
    );
    for e in entries(&names)? {
        for &p in &ps {
            let spec = norm_spec(p)?;
            let hs = HolderSpec::new(spec, r, alpha)?;
            let label = format!("{} p={p}", e.name);
            let norm = fn_norm(&e.f, &disc.x, &spec)?;
            let lhs: Vec<f64> = degrees.iter().map(|&n| tilde_term(&e.f, r, alpha, n, &spec, &disc)).collect::<Result<_>>()?;
            if degrees.iter().all(|&n| in_space(&e, n)) {
                let worst = lhs.iter().copied().fold(0.0, f64::max);
                rep.verdict(
                    format!("polynomial {label}"),
                    worst <= ZERO_TOL * norm.max(1.0),
                    format!("left side {worst:.3e} for a polynomial of degree <= n"),
                );
                continue;
            }
            let e_h = best_approx_holder_batch(&e.f, &degrees, &hs, &s.budget, &disc)?;
            let mut ratios = Vec::new();
            let mut aux = Vec::new();
            for ((&n, &l), res) in degrees.iter().zip(&lhs).zip(&e_h) {
                // c_p n^{1-1/p} ||f~_n||_p <= E_n^0(f)_p
                let t = n as f64;
                let f_tilde = t.powf(1.0 - 1.0 / p) * fn_norm(&tilde(&e.f, n)?, &disc.x, &spec)?;
                let e0 = en_zero(&e.f, n, &spec, &s.budget, &disc.x)?.value;
                let key = RowKey::new("pr2", &e.name).p(p).r(r).alpha(alpha).n(n);
                rep.rows.push(key.row("tilde_term", l));
                rep.rows.push(key.row("E_n_H_upper", res.value));
                rep.rows.push(key.row("gap", res.value - l));
                rep.rows.push(key.row("tilde_f", f_tilde));
                rep.rows.push(key.row("E_n_zero_upper", e0));
                ratios.push((n, l / res.value));
                aux.push((n, f_tilde / e0));
            }
            let st = ratio_summary(format!("C {label}"), &ratios);
            rep.verdict(
                format!("lower bound {label}"),
                st.max <= MAX_CONSTANT,
                format!("max tilde term / E_n(f)_H = {:.4} <= {MAX_CONSTANT}", st.max),
            );
            let st0 = ratio_summary(format!("zero-mean {label}"), &aux);
            rep.observe(
                format!("zero-mean {label}"),
                st0.max <= MAX_CONSTANT,
                format!("max n^(1-1/p) ||f~_n||_p / E_n^0(f)_p = {:.4}", st0.max),
            );
            rep.ratio_stats.push(st);
            rep.ratio_stats.push(st0);
        }
    }
    Ok(rep)
}

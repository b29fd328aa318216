use approxlab_core::bestapprox::best_approx_holder_batch;
use approxlab_core::moduli::{modulus_curve, psi, Discretization, HolderSpec};
use serde_json::json;

use super::{bracket_block, entries, log_integral};
use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey, SlopeFit};
use crate::stats::{rate_fit, ratio_summary};

pub const MAX_CONSTANT: f64 = 100.0;
/// Rounding allowance for the exact `theta_{k+r} <= psi <= C theta_{min(k,r)}` check.
pub const SANDWICH_TOL: f64 = 1e-6;
/// Values this small are rounding noise, amplified by `p < 1` norms.
pub const ABS_FLOOR: f64 = 1e-10;

/// Dyadic brackets of `sum_{nu=0}^{n} (nu+1)^{s p1 - 1} E_nu^{p1}` from `E` at `0, 1, 2, 4, ...`.
///
/// `E_nu` is nonincreasing, so on `[2^j, 2^{j+1})` it lies between the values at the ends.
fn partial_sum(n: usize, e: &[(usize, f64)], s: f64, p1: f64) -> (f64, f64) {
    let at = |nu: usize| e.iter().find(|(m, _)| *m == nu).map(|x| x.1).unwrap_or(f64::NAN);
    let weight = |nu: f64| (nu + 1.0).powf(s * p1 - 1.0);
    let mut lower = at(0).powf(p1);
    let mut upper = lower;
    let mut lo = 1;
    while lo < n {
        let hi = (2 * lo).min(n);
        let (l, u) = bracket_block(lo, hi, at(lo), at(hi), p1, weight);
        lower += l;
        upper += u;
        lo = hi;
    }
    if n >= 1 {
        let last = weight(n as f64) * at(n).powf(p1);
        lower += last;
        upper += last;
    }
    (lower, upper)
}

fn dyadic_upto(n: usize) -> Vec<usize> {
    std::iter::once(0).chain(std::iter::successors(Some(1), |&v| Some(2 * v)).take_while(|&v| v <= n)).collect()
}

/// Jackson-type estimates of `E_n(f)_H` by `theta` and `psi`, and their converses.
pub fn direct_inverse(s: &Settings) -> Result<Report> {
    let names = s.functions_or(&["triangle", "odd-harmonic:1", "lacunary:1.5"]);
    let ps = s.p_or(&[0.5, 1.0, 2.0, f64::INFINITY]);
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let ks = s.k_or(&[1, 2]);
    let degrees = s.degrees_or(&[4, 8, 16, 32]);
    let base = s.discretization(2048, 8, 2.0 * std::f64::consts::PI * 1e-3)?;
    // snapped steps keep the theta/psi comparisons exact on the grid
    let disc = Discretization::new(base.x.clone(), base.h.snapped_to(&base.x), base.lambda_points);
    let n_max = degrees.iter().copied().max().unwrap_or(1);
    let solved = {
        let mut d = dyadic_upto(n_max);
        d.extend(degrees.iter().copied());
        d.sort_unstable();
        d.dedup();
        d
    };
    let mut rep = Report::new(
        "direct-inverse",
        super::Suite::DirectInverse.checks(),
        json!({
            "settings": s,
            "functions": names,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "r": r,
            "alpha": alpha,
            "k": ks,
            "n": degrees,
            "E_n_H_degrees": solved,
            "max_constant": MAX_CONSTANT,
            "discretization": describe_disc(&disc),
            "budget": s.budget,
        }),
    );
    let t_max = 1.0 / *degrees.iter().min().unwrap_or(&1) as f64;
    for e in entries(&names)? {
        if e.poly_degree.is_some() && e.tail_bound.is_none() {
            rep.note(format!("{}: skipped, E_n(f)_H = 0 once n reaches the degree", e.name));
            continue;
        }
        for &p in &ps {
            if p.is_infinite() && !e.continuous {
                rep.note(format!("{}: skipped at p = inf, not in the Hölder space", e.name));
                continue;
            }
            let spec = norm_spec(p)?;
            let p1 = spec.p1();
            let hs = HolderSpec::new(spec, r, alpha)?;
            let e_h: Vec<(usize, f64)> = solved
                .iter()
                .copied()
                .zip(best_approx_holder_batch(&e.f, &solved, &hs, &s.budget, &disc)?.into_iter().map(|x| x.value))
                .collect();
            let e_at = |n: usize| e_h.iter().find(|(m, _)| *m == n).map(|x| x.1).unwrap_or(f64::NAN);
            for &(n, v) in &e_h {
                rep.rows.push(RowKey::new("direct-inverse", &e.name).p(p).r(r).alpha(alpha).n(n).row("E_n_H", v));
            }
            if let Some(gamma) = e.name.strip_prefix("lacunary:").and_then(|g| g.split(':').next()?.parse::<f64>().ok()) {
                let pts: Vec<(f64, f64)> = degrees.iter().map(|&n| (1.0 / n as f64, e_at(n))).collect();
                if pts.len() >= 4 && pts.iter().all(|x| x.1 > 0.0) {
                    let fit = rate_fit(&pts)?;
                    rep.fitted_slopes.push(SlopeFit {
                        label: format!("E_n(f)_H {} p={p}", e.name),
                        slope: fit.slope,
                        intercept: fit.intercept,
                        residual: fit.residual,
                        expected: Some(gamma - alpha),
                    });
                }
            }
            for &k in &ks {
                let label = format!("{} p={p} k={k}", e.name);
                let curve_k = modulus_curve(&e.f, k, t_max, &spec, &disc)?;
                let curve_kr = modulus_curve(&e.f, k + r, t_max, &spec, &disc)?;
                let curve_min = modulus_curve(&e.f, k.min(r), t_max, &spec, &disc)?;
                let psi_const = 2f64.powf(k.max(r) as f64 / p1);
                let theta_ok = alpha < (r.min(k)) as f64 || (alpha == k as f64 && k == r);
                let mut direct_theta = Vec::new();
                let mut direct_psi = Vec::new();
                let mut inverse_theta = Vec::new();
                let mut inverse_psi = Vec::new();
                let mut worst_sandwich = 0.0f64;
                for &n in &degrees {
                    let t = 1.0 / n as f64;
                    let th = curve_k.theta_sweep(alpha, t)?.sup;
                    let ps_v = psi(&e.f, k, r, alpha, t, &spec, &disc)?.sup;
                    let th_kr = curve_kr.theta_sweep(alpha, t)?.sup;
                    let th_min = curve_min.theta_sweep(alpha, t)?.sup;
                    let int = log_integral(&curve_kr, alpha, p1, t)?;
                    let en = e_at(n);
                    let key = RowKey::new("direct-inverse", &e.name).p(p).r(r).alpha(alpha).k(k).n(n);
                    rep.rows.push(key.row("theta_k", th));
                    rep.rows.push(key.row("psi", ps_v));
                    rep.rows.push(key.row("integral", int.value));
                    rep.rows.push(key.row("integral_below_grid_share", int.below_grid));
                    // theta_{k+r} <= psi <= C theta_{min(k,r)}
                    let slack = |lhs: f64, rhs: f64| (lhs - rhs - ABS_FLOOR).max(0.0) / rhs.max(1e-300);
                    worst_sandwich = worst_sandwich.max(slack(th_kr, ps_v)).max(slack(ps_v, psi_const * th_min));

                    if theta_ok {
                        direct_theta.push((n, en / th));
                    }
                    let rhs = if p >= 1.0 { ps_v } else { int.value };
                    direct_psi.push((n, en / rhs));

                    let (lo_t, hi_t) = partial_sum(n, &e_h, k as f64 - alpha, p1);
                    let (lo_p, hi_p) = partial_sum(n, &e_h, k as f64, p1);
                    rep.rows.push(key.row("inverse_theta_sum_upper", hi_t.powf(1.0 / p1)));
                    rep.rows.push(key.row("inverse_psi_sum_upper", hi_p.powf(1.0 / p1)));
                    let nf = n as f64;
                    if theta_ok {
                        inverse_theta.push((n, th * nf.powf(k as f64 - alpha) / lo_t.powf(1.0 / p1)));
                    }
                    inverse_psi.push((n, ps_v * nf.powi(k as i32) / lo_p.powf(1.0 / p1)));
                }
                rep.verdict(
                    format!("psi between thetas {label}"),
                    worst_sandwich <= SANDWICH_TOL,
                    format!("theta_{{k+r}} <= psi <= {psi_const:.3} theta_{{min(k,r)}}, worst relative excess above {ABS_FLOOR:e} is {worst_sandwich:.2e}"),
                );
                let rhs_name = if p >= 1.0 { "psi" } else { "integral" };
                let bounded = |rep: &mut Report, name: String, what: &str, series: &[(usize, f64)]| {
                    if series.is_empty() {
                        return;
                    }
                    let st = ratio_summary(&name, series);
                    rep.verdict(name, st.max <= MAX_CONSTANT, format!("max {what} = {:.4} <= {MAX_CONSTANT}", st.max));
                    rep.ratio_stats.push(st);
                };
                bounded(&mut rep, format!("direct theta {label}"), "E_n(f)_H / theta_k(f, 1/n)", &direct_theta);
                bounded(&mut rep, format!("direct {rhs_name} {label}"), &format!("E_n(f)_H / {rhs_name}(f, 1/n)"), &direct_psi);
                bounded(&mut rep, format!("inverse theta {label}"), "theta_k n^(k-alpha) / partial sum", &inverse_theta);
                bounded(&mut rep, format!("inverse psi {label}"), "psi n^k / partial sum", &inverse_psi);
                if !theta_ok {
                    rep.note(format!("{label}: theta estimates need alpha < min(r, k) or alpha = k = r"));
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_sum_brackets_exact_sum() {
        let e: Vec<(usize, f64)> = dyadic_upto(64).into_iter().map(|n| (n, 1.0 / (n as f64 + 1.0))).collect();
        let exact: f64 = (0..=16).map(|nu| (nu as f64 + 1.0).powf(0.5 - 1.0) / (nu as f64 + 1.0)).sum();
        let (lo, hi) = partial_sum(16, &e, 0.5, 1.0);
        assert!(lo <= exact + 1e-12 && exact <= hi + 1e-12, "{lo} {exact} {hi}");
    }

    #[test]
    fn dyadic_degrees() {
        assert_eq!(dyadic_upto(8), vec![0, 1, 2, 4, 8]);
    }
}

use approxlab_core::means::{family_means, fourier_mean, kernel_catalog};
use approxlab_core::moduli::{family_holder_error, modulus_curve, Discretization, HolderSpec, QuasiNormSpec};
use approxlab_core::spectral::{PeriodicFn, TrigPoly};
use serde_json::json;

use super::{entries, log_integral, tilde_term};
use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey};
use crate::stats::ratio_summary;

/// Largest admissible max/min of a two-sided ratio over the n-range.
pub const MAX_SPREAD: f64 = 4.0;
/// Steps at which the hypothesis on the means is also probed for `Delta_h^r f`.
const PROBE_STEPS: [f64; 2] = [1.0, 0.1];
const SMOOTH_PROBE: &str = "cosx";

struct Cell {
    n: usize,
    /// `||f - L_n f||_p` (averaged over lambda for `p < 1`).
    error_lp: f64,
    /// Same in the Hölder norm.
    error_h: f64,
    /// `omega_k(f, 1/n)_p`.
    w_lp: f64,
    /// `omega_k(f, 1/n)_H`.
    w_h: f64,
    /// `||Delta_h^r f - L_n Delta_h^r f||_p / omega_k(Delta_h^r f, 1/n)_p` at the probe steps.
    probes: Vec<f64>,
    /// `theta_{r,alpha}(f, 1/n)_p` and `omega_r(f, 1/n)_p`.
    theta: f64,
    omega_r: f64,
}

fn means_for(f: &PeriodicFn<f64>, kernel: &str, n: usize, p: f64, disc: &Discretization<f64>) -> Result<Vec<TrigPoly<f64>>> {
    let k = kernel_catalog::<f64>(kernel, n)?;
    if p >= 1.0 {
        Ok(vec![fourier_mean(f, &k, &disc.x)?])
    } else {
        Ok(family_means(f, &k, &disc.lambda_nodes())?)
    }
}

fn measure(
    f: &PeriodicFn<f64>,
    kernel: &str,
    k: usize,
    hs: &HolderSpec<f64>,
    degrees: &[usize],
    disc: &Discretization<f64>,
) -> Result<Vec<Cell>> {
    let spec = &hs.p;
    let p = spec.p();
    let t_max = 1.0 / *degrees.iter().min().unwrap_or(&1) as f64;
    let base = modulus_curve(f, k, t_max, spec, disc)?;
    let base_r = modulus_curve(f, hs.r, t_max, spec, disc)?;
    // omega_k(Delta_h^r f, .) for every step h of the grid
    let shifted: Vec<_> = disc
        .h
        .values()
        .iter()
        .map(|&h| Ok((h, modulus_curve(&f.difference(h, hs.r), k, t_max, spec, disc)?)))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for &n in degrees {
        let t = 1.0 / n as f64;
        let means = means_for(f, kernel, n, p, disc)?;
        let err = family_holder_error(f, &means, hs, disc)?;
        let mut semi = 0.0f64;
        for (h, c) in &shifted {
            semi = semi.max(c.omega_at(t)? / h.powf(hs.alpha));
        }
        let w_lp = base.omega_at(t)?;
        let mut probes = Vec::new();
        for &h in &PROBE_STEPS {
            let g = f.difference(h, hs.r);
            let flat = HolderSpec { h_max: disc.h.h_min(), ..*hs };
            let e = family_holder_error(&g, &means_for(&g, kernel, n, p, disc)?, &flat, disc)?.lp_part;
            probes.push(e / modulus_curve(&g, k, t, spec, disc)?.omega_at(t)?);
        }
        out.push(Cell {
            n,
            error_lp: err.lp_part,
            error_h: err.value,
            w_lp,
            w_h: w_lp + semi,
            probes,
            theta: base_r.theta_sweep(hs.alpha, t)?.sup,
            omega_r: base_r.omega_at(t)?,
        });
    }
    Ok(out)
}

/// Strong converse inequalities for Fourier or family means in Hölder spaces.
pub fn strong_converse(s: &Settings) -> Result<Report> {
    let kernel = s.kernel.clone().unwrap_or_else(|| "fejer".into());
    let mut names = s.functions_or(&["lacunary:0.5"]);
    let ps = s.p_or(&[2.0]);
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let k = s.k_or(&[1])[0];
    let degrees = s.degrees_or(&[4, 8, 16, 32, 64]);
    let disc = s.discretization(4096, 16, 2.0 * std::f64::consts::PI * 1e-4)?;
    // steps below the spacing do not resolve kinks of sampled functions
    let probe_disc = Discretization::new(disc.x.clone(), disc.h.snapped_to(&disc.x), s.lambda_points.unwrap_or(8));
    if !names.iter().any(|n| n == SMOOTH_PROBE) {
        names.push(SMOOTH_PROBE.into());
    }
    let mut rep = Report::new(
        "strong-converse",
        super::Suite::StrongConverse.checks(),
        json!({
            "settings": s,
            "kernel": kernel,
            "functions": names,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "r": r,
            "alpha": alpha,
            "w": format!("omega_{k}"),
            "n": degrees,
            "max_spread": MAX_SPREAD,
            "discretization": describe_disc(&probe_disc),
        }),
    );
    kernel_catalog::<f64>(&kernel, 1)?.require_bounded()?;
    for e in entries(&names)? {
        for &p in &ps {
            let spec: QuasiNormSpec<f64> = norm_spec(p)?;
            let hs = HolderSpec::new(spec, r, alpha)?;
            let cells = measure(&e.f, &kernel, k, &hs, &degrees, &probe_disc)?;
            let label = format!("{} {kernel} p={p}", e.name);
            let series = |pick: &dyn Fn(&Cell) -> f64| -> Vec<(usize, f64)> { cells.iter().map(|c| (c.n, pick(c))).collect() };
            for c in &cells {
                let key = RowKey::new("strong-converse", &e.name).p(p).r(r).alpha(alpha).k(k).n(c.n);
                rep.rows.push(key.row("error_p", c.error_lp));
                rep.rows.push(key.row("error_H", c.error_h));
                rep.rows.push(key.row("w_p", c.w_lp));
                rep.rows.push(key.row("w_H", c.w_h));
                rep.rows.push(key.row("theta_r", c.theta));
                rep.rows.push(key.row("omega_r", c.omega_r));
            }

            // hypothesis: ||g - L_n g||_p ~ omega_k(g, 1/n)_p for g = f and g = Delta_h^r f
            let mut hyp = vec![ratio_summary(format!("hypothesis {label}"), &series(&|c| c.error_lp / c.w_lp))];
            for (i, h) in PROBE_STEPS.iter().enumerate() {
                hyp.push(ratio_summary(format!("hypothesis {label} Delta_{h}"), &series(&|c| c.probes[i])));
            }
            let worst = hyp.iter().map(|h| h.spread).fold(0.0, f64::max);
            let detail = format!("max spread of ||g - L_n g||_p / omega_{k}(g, 1/n)_p over g = f, Delta_h f: {worst:.4}");
            rep.observe(format!("hypothesis {label}"), worst <= MAX_SPREAD, detail);
            rep.ratio_stats.extend(hyp);

            let main = ratio_summary(format!("strong converse {label}"), &series(&|c| c.error_h / c.w_h));
            if p >= 1.0 {
                rep.verdict(
                    format!("strong converse {label}"),
                    main.spread <= MAX_SPREAD,
                    format!(
                        "||f - L_n f||_H / omega_{k}(f, 1/n)_H in [{:.4}, {:.4}], spread {:.4} <= {MAX_SPREAD}",
                        main.min, main.max, main.spread
                    ),
                );
            } else {
                // two-sided bounds with the tilde term below and the integral above
                let curve = modulus_curve(&e.f, r + k, 1.0 / degrees[0] as f64, &spec, &probe_disc)?;
                let mut lower = Vec::new();
                let mut upper = Vec::new();
                for c in &cells {
                    let below = tilde_term(&e.f, r, alpha, c.n, &spec, &probe_disc)?;
                    let int = log_integral(&curve, alpha, p, 1.0 / c.n as f64)?;
                    let key = RowKey::new("strong-converse", &e.name).p(p).r(r).alpha(alpha).k(k).n(c.n);
                    rep.rows.push(key.row("tilde_term", below));
                    rep.rows.push(key.row("integral_term", int.value));
                    lower.push((c.n, (c.w_h + below) / c.error_h));
                    upper.push((c.n, c.error_h / (c.w_h + int.value)));
                }
                let lo = ratio_summary(format!("lower {label}"), &lower);
                let up = ratio_summary(format!("upper {label}"), &upper);
                rep.observe(
                    format!("two-sided bounds {label}"),
                    lo.max.is_finite() && up.max.is_finite(),
                    format!("(w_H + tilde term) / error_H <= {:.4}; error_H / (w_H + integral) <= {:.4}", lo.max, up.max),
                );
                rep.ratio_stats.push(lo);
                rep.ratio_stats.push(up);
                rep.observe(
                    format!("strong converse {label}"),
                    main.spread <= MAX_SPREAD,
                    format!("spread {:.4}; the E_n(f)_H term is omitted", main.spread),
                );
            }
            rep.ratio_stats.push(main);

            // theta-based two-sided estimate, and the necessity of its first term
            let with_first = ratio_summary(
                format!("theta two-sided {label}"),
                &series(&|c| ((c.n as f64).powf(alpha) * c.omega_r + c.error_h) / c.theta),
            );
            rep.observe(
                format!("theta two-sided {label}"),
                with_first.spread <= MAX_SPREAD,
                format!("(n^alpha omega_r + error_H) / theta_r spread {:.4}", with_first.spread),
            );
            rep.ratio_stats.push(with_first);
            if e.name == SMOOTH_PROBE {
                let growth: Vec<(usize, f64)> = cells
                    .iter()
                    .filter(|c| c.n >= 2)
                    .map(|c| {
                        let eps = 1.0 / (c.n as f64).ln();
                        (c.n, c.theta / (eps * (c.n as f64).powf(alpha) * c.omega_r + c.error_h))
                    })
                    .collect();
                let increasing = growth.windows(2).all(|w| w[1].1 > w[0].1);
                rep.verdict(
                    format!("first term needed {label}"),
                    increasing,
                    format!(
                        "theta_r / (n^alpha omega_r / ln n + error_H) = {}",
                        growth.iter().map(|(n, v)| format!("{v:.3} (n={n})")).collect::<Vec<_>>().join(", ")
                    ),
                );
                rep.ratio_stats.push(ratio_summary(format!("first term needed {label}"), &growth));
            }
        }
    }
    Ok(rep)
}

use approxlab_core::bestapprox::{best_approx_batch, best_approx_holder_batch};
use approxlab_core::moduli::{HolderSpec, QuasiNormSpec};
use approxlab_core::spectral::UniformGrid;
use serde_json::json;

use super::{bracket_block, entries, CATALOG};
use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey};
use crate::stats::ratio_summary;

pub const MAX_CONSTANT: f64 = 100.0;
/// Tail sums run over `n <= nu < TAIL_FACTOR n`.
pub const TAIL_FACTOR: usize = 8;
/// Largest degree for which `E_nu(f)_p` is computed.
pub const TAIL_CAP: usize = 128;

/// Dyadic degrees `lo, 2 lo, ...` up to `cap`.
fn dyadic(lo: usize, cap: usize) -> Vec<usize> {
    std::iter::successors(Some(lo.max(1)), |&v| Some(2 * v)).take_while(|&v| v <= cap).collect()
}

/// Brackets of `sum_{n <= nu < 8n} nu^{alpha p1 - 1} E_nu^{p1}` from dyadic values.
///
/// Returns `(lower, upper, missing)`: `lower` uses `E_{2^{j+1}}` on each block
/// `[2^j, 2^{j+1})` and skips blocks whose right end lies beyond the cap;
/// `upper` uses `E_{2^j}`; `missing` is the upper estimate of the skipped blocks.
pub fn tail_brackets(n: usize, e: &[(usize, f64)], alpha: f64, p1: f64) -> (f64, f64, f64) {
    let at = |nu: usize| e.iter().find(|(m, _)| *m == nu).map(|x| x.1);
    let weight = |nu: f64| nu.powf(alpha * p1 - 1.0);
    let (mut lower, mut upper, mut missing) = (0.0, 0.0, 0.0);
    let mut lo = n;
    while lo < TAIL_FACTOR * n {
        let hi = 2 * lo;
        let Some(e_lo) = at(lo) else { break };
        match at(hi) {
            Some(e_hi) => {
                let (l, u) = bracket_block(lo, hi, e_lo, e_hi, p1, weight);
                lower += l;
                upper += u;
            }
            None => {
                let (_, u) = bracket_block(lo, hi, e_lo, 0.0, p1, weight);
                upper += u;
                missing += u;
            }
        }
        lo = hi;
    }
    (lower, upper, missing)
}

/// `n^alpha E_n(f)_p <= C E_n(f)_H <= C (n^alpha E_n(f)_p + tail)`.
pub fn sandwich(s: &Settings) -> Result<Report> {
    let names = s.functions_or(&CATALOG);
    let ps = s.p_or(&[0.5, 1.0, 2.0, f64::INFINITY]);
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let degrees = s.degrees_or(&[4, 8, 16, 32]);
    let two_pi = 2.0 * std::f64::consts::PI;
    let disc = s.discretization(2048, 8, two_pi * 1e-3)?;
    let lp_grid = UniformGrid::new(disc.x.size().max(16 * (TAIL_CAP + 1)).next_power_of_two())?;
    let mut rep = Report::new(
        "sandwich",
        super::Suite::Sandwich.checks(),
        json!({
            "settings": s,
            "functions": names,
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "r": r,
            "alpha": alpha,
            "n": degrees,
            "max_constant": MAX_CONSTANT,
            "tail": format!("nu in [n, {TAIL_FACTOR} n), E_nu bracketed by dyadic values up to nu = {TAIL_CAP}"),
            "discretization": describe_disc(&disc),
            "lp_grid_size": lp_grid.size(),
            "budget": s.budget,
        }),
    );
    for e in entries(&names)? {
        if e.poly_degree.is_some() && e.tail_bound.is_none() {
            rep.note(format!("{}: skipped, a polynomial has E_n = 0 for n >= its degree", e.name));
            continue;
        }
        for &p in &ps {
            if p.is_infinite() && !e.continuous {
                rep.note(format!("{}: skipped at p = inf, not in the Hölder space", e.name));
                continue;
            }
            let spec: QuasiNormSpec<f64> = norm_spec(p)?;
            let p1 = spec.p1();
            let hs = HolderSpec::new(spec, r, alpha)?;
            let label = format!("{} p={p}", e.name);
            let e_nu_degrees = dyadic(*degrees.iter().min().unwrap_or(&1), TAIL_CAP);
            let e_lp: Vec<(usize, f64)> = e_nu_degrees
                .iter()
                .copied()
                .zip(best_approx_batch(&e.f, &e_nu_degrees, &spec, &s.budget, &lp_grid)?.into_iter().map(|x| x.value))
                .collect();
            let e_h = best_approx_holder_batch(&e.f, &degrees, &hs, &s.budget, &disc)?;
            let mut lower_ratios = Vec::new();
            let mut upper_ratios = Vec::new();
            for (&n, eh) in degrees.iter().zip(&e_h) {
                let en = match e_lp.iter().find(|(m, _)| *m == n) {
                    Some(&(_, v)) => v,
                    None => best_approx_batch(&e.f, &[n], &spec, &s.budget, &lp_grid)?[0].value,
                };
                let scaled = (n as f64).powf(alpha) * en;
                let (lo, hi, missing) = tail_brackets(n, &e_lp, alpha, p1);
                let rhs = scaled + lo.powf(1.0 / p1);
                let key = RowKey::new("sandwich", &e.name).p(p).r(r).alpha(alpha).n(n);
                rep.rows.push(key.row("E_n_p", en));
                rep.rows.push(key.row("E_n_H", eh.value));
                rep.rows.push(key.row("n^alpha E_n_p", scaled));
                rep.rows.push(key.row("tail_lower", lo.powf(1.0 / p1)));
                rep.rows.push(key.row("tail_upper", hi.powf(1.0 / p1)));
                rep.rows.push(key.row("tail_missing_estimate", missing.powf(1.0 / p1)));
                lower_ratios.push((n, scaled / eh.value));
                upper_ratios.push((n, eh.value / rhs));
            }
            let c1 = ratio_summary(format!("C1 {label}"), &lower_ratios);
            let c2 = ratio_summary(format!("C2 {label}"), &upper_ratios);
            rep.verdict(
                format!("lower {label}"),
                c1.max <= MAX_CONSTANT,
                format!("max n^alpha E_n(f)_p / E_n(f)_H = {:.4} <= {MAX_CONSTANT}", c1.max),
            );
            rep.verdict(
                format!("upper {label}"),
                c2.max <= MAX_CONSTANT,
                format!("max E_n(f)_H / (n^alpha E_n(f)_p + tail) = {:.4} <= {MAX_CONSTANT}", c2.max),
            );
            rep.ratio_stats.push(c1);
            rep.ratio_stats.push(c2);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_on_power_law() {
        // E_nu = nu^-1, alpha = 0.5, p1 = 1: summand nu^{-3/2}
        let e: Vec<(usize, f64)> = dyadic(4, 128).into_iter().map(|n| (n, 1.0 / n as f64)).collect();
        let exact: f64 = (4..32).map(|nu| (nu as f64).powf(-1.5)).sum();
        let (lo, hi, missing) = tail_brackets(4, &e, 0.5, 1.0);
        assert!(lo <= exact && exact <= hi, "{lo} {exact} {hi}");
        assert_eq!(missing, 0.0);
        let (lo, hi, missing) = tail_brackets(32, &e, 0.5, 1.0);
        assert!(missing > 0.0 && lo < hi);
    }

    #[test]
    fn dyadic_range() {
        assert_eq!(dyadic(4, 40), vec![4, 8, 16, 32]);
    }
}

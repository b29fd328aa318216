use approxlab_core::bestapprox::best_approx;
use approxlab_core::moduli::{fn_norm, lp_norm, modulus_curve, omega, Discretization};
use approxlab_core::testfns::{ramp_phi, triangle_wave};
use serde_json::json;

use crate::config::{describe_disc, norm_spec, p_json, Settings};
use crate::error::Result;
use crate::report::{Report, RowKey, SlopeFit};
use crate::stats::rate_fit;

/// Required decrease of `||f - T_n||_p` from the first to the last degree.
pub const ERROR_DECAY: f64 = 4.0;
/// Fraction of the first seminorm that must persist.
pub const SEMINORM_KEEP: f64 = 0.5;

struct Row {
    n: usize,
    error: f64,
    seminorm: f64,
    phi_error: f64,
    phi_omega: f64,
    derivative: f64,
    f_minus_phi: f64,
}

/// `T_n` = best `L_p` approximation of the ramp function `phi_n`, compared against the triangle wave.
fn measure(p: f64, n: usize, s: &Settings, disc: &Discretization<f64>) -> Result<Row> {
    let spec = norm_spec(p)?;
    let f = triangle_wave::<f64>().f;
    let phi = ramp_phi::<f64>(n)?.f;
    let best = best_approx(&phi, n, &spec, &s.budget, &disc.x)?;
    let e = f.sub_poly(&best.poly);
    let t = 1.0 / n as f64;
    // sup_{h <= 1/n} ||Delta_h (f - T_n)||_p / h
    let seminorm = modulus_curve(&e, 1, t, &spec, disc)?.theta_sweep(1.0, t)?.sup;
    Ok(Row {
        n,
        error: fn_norm(&e, &disc.x, &spec)?,
        seminorm,
        phi_error: best.value,
        phi_omega: omega(&phi, 1, t, &spec, disc)?,
        derivative: lp_norm(&best.poly.derivative(1).sample(&disc.x, 0.0), &spec)?,
        f_minus_phi: fn_norm(&f.sub(&phi), &disc.x, &spec)?,
    })
}

fn slope(rep: &mut Report, label: String, rows: &[Row], pick: fn(&Row) -> f64, expected: Option<f64>) -> Result<()> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (1.0 / r.n as f64, pick(r))).collect();
    if pts.len() < 4 || pts.iter().any(|&(_, v)| !(v > 0.0)) {
        rep.note(format!("{label}: no slope, fewer than four positive values"));
        return Ok(());
    }
    let fit = rate_fit(&pts)?;
    rep.fitted_slopes.push(SlopeFit { label, slope: fit.slope, intercept: fit.intercept, residual: fit.residual, expected });
    Ok(())
}

pub fn counterexample(s: &Settings) -> Result<Report> {
    let ps = s.p_or(&[0.5]);
    let degrees = s.degrees_or(&[4, 8, 16, 32]);
    let disc = s.discretization(1 << 16, 16, 2.0 * std::f64::consts::PI * 1e-4)?;
    let control = 2.0;
    let mut rep = Report::new(
        "counterexample",
        super::Suite::Counterexample.checks(),
        json!({
            "settings": s,
            "f": "triangle",
            "approximated": "ramp-phi:n",
            "p": ps.iter().map(|&p| p_json(p)).collect::<Vec<_>>(),
            "control_p": control,
            "n": degrees,
            "error_decay": ERROR_DECAY,
            "seminorm_keep": SEMINORM_KEEP,
            "discretization": describe_disc(&disc),
            "budget": s.budget,
        }),
    );
    let (Some(&n0), Some(&n1)) = (degrees.first(), degrees.last()) else {
        return Ok(rep);
    };
    for &p in ps.iter().chain(std::iter::once(&control)) {
        let is_control = p == control;
        let rows: Vec<Row> = degrees.iter().map(|&n| measure(p, n, s, &disc)).collect::<Result<_>>()?;
        for r in &rows {
            let key = RowKey::new("counterexample", "triangle").p(p).r(1).alpha(1.0).n(r.n);
            rep.rows.push(key.row("error", r.error));
            rep.rows.push(key.row("seminorm_below_1/n", r.seminorm));
            rep.rows.push(key.row("phi_minus_T", r.phi_error));
            rep.rows.push(key.row("omega1_phi", r.phi_omega));
            rep.rows.push(key.row("derivative_T", r.derivative));
            rep.rows.push(key.row("f_minus_phi", r.f_minus_phi));
        }
        let (a, b) = (&rows[0], &rows[rows.len() - 1]);
        let decay = a.error / b.error;
        let kept = b.seminorm / a.seminorm;
        let tag = if is_control { "control " } else { "" };
        if is_control {
            rep.verdict(
                format!("{tag}p={p}: seminorm decays"),
                kept < SEMINORM_KEEP,
                format!("seminorm(n={n1}) / seminorm(n={n0}) = {kept:.4} < {SEMINORM_KEEP}"),
            );
        } else {
            rep.verdict(
                format!("p={p}: L_p error decays"),
                decay >= ERROR_DECAY,
                format!("||f - T_n||(n={n0}) / ||f - T_n||(n={n1}) = {decay:.3} >= {ERROR_DECAY}"),
            );
            rep.verdict(
                format!("p={p}: seminorm persists"),
                kept >= SEMINORM_KEEP,
                format!("seminorm(n={n1}) / seminorm(n={n0}) = {kept:.4} >= {SEMINORM_KEEP}"),
            );
        }
        let p1 = p.min(1.0);
        slope(&mut rep, format!("{tag}p={p} ||f - T_n||"), &rows, |r| r.error, Some(1.0))?;
        slope(&mut rep, format!("{tag}p={p} ||f - phi_n||"), &rows, |r| r.f_minus_phi, Some(1.0))?;
        slope(&mut rep, format!("{tag}p={p} omega_1(phi_n, 1/n)"), &rows, |r| r.phi_omega, Some(1.0 / p1))?;
        slope(&mut rep, format!("{tag}p={p} ||T_n'||"), &rows, |r| r.derivative, Some(1.0 / p1 - 1.0))?;
    }
    Ok(rep)
}

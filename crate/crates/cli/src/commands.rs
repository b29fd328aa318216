use std::f64::consts::PI;

use approxlab_core::bestapprox::{best_approx_batch, best_approx_holder_batch, en_zero, ApproxResult};
use approxlab_core::means::{family_means, fourier_mean, kernel_catalog};
use approxlab_core::moduli::{family_holder_error, fn_norm, holder_seminorm, modulus_curve, psi, theta, Discretization, HSweep, HolderSpec};
use approxlab_core::testfns::{lookup, CatalogEntry};
use approxlab_experiments::config::{describe_disc, norm_spec, p_json};
use approxlab_experiments::report::{Report, RowKey};
use approxlab_experiments::{Settings, Suite};
use serde_json::json;

use crate::{Error, ModulusKind, Result, RunConfig};

/// Report plus the lines printed in text mode.
type Output = (Report, String);

const GRID_SIZE: usize = 4096;
const PER_DECADE: usize = 16;
const H_MIN: f64 = 2.0 * PI * 1e-4;
const DEFAULT_DEGREES: [usize; 1] = [8];

fn functions(s: &Settings) -> Result<Vec<CatalogEntry<f64>>> {
    let names = s.functions.as_ref().filter(|v| !v.is_empty()).ok_or_else(|| Error::Config("--fn is required".into()))?;
    Ok(names.iter().map(|n| lookup::<f64>(n)).collect::<std::result::Result<_, _>>()?)
}

fn disc(s: &Settings) -> Result<Discretization<f64>> {
    Ok(s.discretization(GRID_SIZE, PER_DECADE, H_MIN)?)
}

fn header(cfg: &RunConfig, command: &str, d: &Discretization<f64>) -> serde_json::Value {
    json!({
        "command": command,
        "settings": cfg.settings,
        "t": cfg.t,
        "discretization": describe_disc(d),
    })
}

fn line(out: &mut String, what: &str, f: &str, tags: &str, value: f64) {
    out.push_str(&format!("{what} {f}{tags} = {value:.10}\n"));
}

fn sweep_rows(rep: &mut Report, key: &RowKey, quantity: &str, sweep: &HSweep<f64>) {
    for &(h, v) in &sweep.values {
        rep.rows.push(key.clone().h(h).row(quantity, v));
    }
    if sweep.sup_possibly_at_zero {
        rep.note(format!("{quantity}: largest value at the smallest step, the supremum may be approached as h -> 0"));
    }
}

pub fn norm(cfg: &RunConfig) -> Result<Output> {
    let s = &cfg.settings;
    let d = disc(s)?;
    let mut rep = Report::new("norm", "||f||_p on the uniform grid", header(cfg, "norm", &d));
    let mut out = String::new();
    for e in functions(s)? {
        for p in s.p_or(&[2.0]) {
            let v = fn_norm(&e.f, &d.x, &norm_spec(p)?)?;
            rep.rows.push(RowKey::new("norm", &e.name).p(p).row("norm", v));
            line(&mut out, "norm", &e.name, &format!(" p={p}"), v);
        }
    }
    Ok((rep, out))
}

pub fn modulus(cfg: &RunConfig, kind: ModulusKind) -> Result<Output> {
    let s = &cfg.settings;
    let t = cfg.t.ok_or_else(|| Error::Config("--t is required".into()))?;
    let d = disc(s)?;
    let name = match kind {
        ModulusKind::Omega => "modulus-omega",
        ModulusKind::Theta => "modulus-theta",
        ModulusKind::Psi => "modulus-psi",
    };
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let mut rep = Report::new(name, "modulus of smoothness at scale t with its h-sweep", header(cfg, name, &d));
    let mut out = String::new();
    for e in functions(s)? {
        for p in s.p_or(&[2.0]) {
            let spec = norm_spec(p)?;
            for k in s.k_or(&[1]) {
                let key = RowKey::new(name, &e.name).p(p).k(k);
                let (quantity, tags, value) = match kind {
                    ModulusKind::Omega => {
                        let curve = modulus_curve(&e.f, k, t, &spec, &d)?;
                        for (&h, &v) in curve.h.iter().zip(&curve.norms) {
                            rep.rows.push(key.clone().h(h).row("difference_norm", v));
                        }
                        ("omega", format!(" p={p} k={k} t={t}"), curve.omega_at(t)?)
                    }
                    ModulusKind::Theta => {
                        let sw = theta(&e.f, k, alpha, t, &spec, &d)?;
                        sweep_rows(&mut rep, &key.clone().alpha(alpha), "omega/h^alpha", &sw);
                        ("theta", format!(" p={p} k={k} alpha={alpha} t={t}"), sw.sup)
                    }
                    ModulusKind::Psi => {
                        let sw = psi(&e.f, k, r, alpha, t, &spec, &d)?;
                        sweep_rows(&mut rep, &key.clone().r(r).alpha(alpha), "omega_k(Delta_h^r f)/h^alpha", &sw);
                        ("psi", format!(" p={p} k={k} r={r} alpha={alpha} t={t}"), sw.sup)
                    }
                };
                let key = match kind {
                    ModulusKind::Omega => key,
                    ModulusKind::Theta => key.alpha(alpha),
                    ModulusKind::Psi => key.r(r).alpha(alpha),
                };
                rep.rows.push(key.row(quantity, value));
                line(&mut out, quantity, &e.name, &tags, value);
            }
        }
    }
    Ok((rep, out))
}

pub fn holder_norm(cfg: &RunConfig) -> Result<Output> {
    let s = &cfg.settings;
    let d = disc(s)?;
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let mut rep = Report::new("holder-norm", "||f||_p + sup_h omega_r(f, h)_p / h^alpha", header(cfg, "holder-norm", &d));
    let mut out = String::new();
    for e in functions(s)? {
        for p in s.p_or(&[2.0]) {
            let spec = norm_spec(p)?;
            let hs = HolderSpec::new(spec, r, alpha)?;
            let norm = fn_norm(&e.f, &d.x, &spec)?;
            let semi = holder_seminorm(&e.f, &hs, &d)?;
            let key = RowKey::new("holder-norm", &e.name).p(p).r(r).alpha(alpha);
            sweep_rows(&mut rep, &key, "omega_r/h^alpha", &semi.sweep);
            rep.rows.push(key.row("norm_p", norm));
            rep.rows.push(key.row("seminorm", semi.value));
            rep.rows.push(key.row("holder_norm", norm + semi.value));
            line(&mut out, "holder-norm", &e.name, &format!(" p={p} r={r} alpha={alpha}"), norm + semi.value);
        }
    }
    Ok((rep, out))
}

pub fn best_approx(cfg: &RunConfig, holder: bool, zero_mean: bool) -> Result<Output> {
    let s = &cfg.settings;
    let d = disc(s)?;
    let degrees = s.degrees_or(&DEFAULT_DEGREES);
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let quantity = match (holder, zero_mean) {
        (true, _) => "E_n_H",
        (false, true) => "E_n_zero",
        (false, false) => "E_n",
    };
    let mut rep = Report::new("best-approx", "best approximation by trigonometric polynomials of degree <= n", header(cfg, "best-approx", &d));
    let mut out = String::new();
    let mut solutions = Vec::new();
    for e in functions(s)? {
        for p in s.p_or(&[2.0]) {
            let spec = norm_spec(p)?;
            let results: Vec<ApproxResult<f64>> = if holder {
                best_approx_holder_batch(&e.f, &degrees, &HolderSpec::new(spec, r, alpha)?, &s.budget, &d)?
            } else if zero_mean {
                degrees.iter().map(|&n| en_zero(&e.f, n, &spec, &s.budget, &d.x)).collect::<std::result::Result<_, _>>()?
            } else {
                best_approx_batch(&e.f, &degrees, &spec, &s.budget, &d.x)?
            };
            for (&n, res) in degrees.iter().zip(&results) {
                let mut key = RowKey::new("best-approx", &e.name).p(p).n(n);
                let mut tags = format!(" p={p} n={n}");
                if holder {
                    key = key.r(r).alpha(alpha);
                    tags.push_str(&format!(" r={r} alpha={alpha}"));
                }
                rep.rows.push(key.row(quantity, res.value));
                if !res.certified {
                    tags.push_str(" (upper bound)");
                }
                line(&mut out, quantity, &e.name, &tags, res.value);
                solutions.push(json!({
                    "fn": e.name,
                    "p": p_json(p),
                    "n": n,
                    "value": res.value,
                    "certified": res.certified,
                    "starts_used": res.starts_used,
                    "solver_trace": res.solver_trace,
                    "poly": res.poly.to_json(),
                }));
            }
        }
    }
    rep.parameters["solutions"] = json!(solutions);
    Ok((rep, out))
}

pub fn means(cfg: &RunConfig) -> Result<Output> {
    let s = &cfg.settings;
    let d = disc(s)?;
    let kernel = s.kernel.clone().unwrap_or_else(|| "fejer".into());
    let degrees = s.degrees_or(&DEFAULT_DEGREES);
    let (r, alpha) = s.holder_params(1, 0.5)?;
    let mut rep = Report::new(
        "means",
        "||f - L_n f|| in L_p and H_p^{r,alpha}; for p < 1 averaged over shifted families",
        header(cfg, "means", &d),
    );
    rep.parameters["kernel"] = json!(kernel);
    let mut out = String::new();
    for e in functions(s)? {
        for p in s.p_or(&[2.0]) {
            let spec = norm_spec(p)?;
            let hs = HolderSpec::new(spec, r, alpha)?;
            for &n in &degrees {
                let k = kernel_catalog::<f64>(&kernel, n)?;
                let ms = if p >= 1.0 { vec![fourier_mean(&e.f, &k, &d.x)?] } else { family_means(&e.f, &k, &d.lambda_nodes())? };
                let err = family_holder_error(&e.f, &ms, &hs, &d)?;
                let key = RowKey::new("means", &e.name).p(p).r(r).alpha(alpha).n(n);
                rep.rows.push(key.row("error_p", err.lp_part));
                rep.rows.push(key.row("error_H", err.value));
                let tags = format!(" {kernel} p={p} n={n}");
                line(&mut out, "error_p", &e.name, &tags, err.lp_part);
                line(&mut out, "error_H", &e.name, &format!("{tags} r={r} alpha={alpha}"), err.value);
            }
        }
    }
    Ok((rep, out))
}

pub fn verify(cfg: &RunConfig, suite: Suite) -> Result<Output> {
    let rep = suite.run(&cfg.settings)?;
    let text = rep.summary();
    Ok((rep, text))
}

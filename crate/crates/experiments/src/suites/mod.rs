//! Verification suites. Each one turns [`Settings`] into a [`Report`].

mod counterexample;
mod direct_inverse;
mod integral;
mod jackson;
mod oracles;
mod pr2;
mod properties;
mod rates;
mod sandwich;
mod stechkin;
mod strong_converse;

use approxlab_core::means::tilde;
use approxlab_core::moduli::{fn_norm, Discretization, ModulusCurve, QuasiNormSpec};
use approxlab_core::spectral::PeriodicFn;
use approxlab_core::testfns::{lookup, CatalogEntry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::report::Report;

pub use counterexample::counterexample;
pub use direct_inverse::direct_inverse;
pub use integral::integral_condition;
pub use jackson::jackson;
pub use oracles::oracles;
pub use pr2::pr2_lower_bound;
pub use properties::modulus_properties;
pub use rates::rates;
pub use sandwich::sandwich;
pub use stechkin::stechkin;
pub use strong_converse::strong_converse;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Jackson,
    Stechkin,
    DirectInverse,
    Sandwich,
    Counterexample,
    StrongConverse,
    Pr2,
    IntegralCondition,
    ModulusProperties,
    Rates,
    Oracles,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Jackson,
        Suite::Stechkin,
        Suite::DirectInverse,
        Suite::Sandwich,
        Suite::Counterexample,
        Suite::StrongConverse,
        Suite::Pr2,
        Suite::IntegralCondition,
        Suite::ModulusProperties,
        Suite::Rates,
        Suite::Oracles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Jackson => "jackson",
            Suite::Stechkin => "stechkin",
            Suite::DirectInverse => "direct-inverse",
            Suite::Sandwich => "sandwich",
            Suite::Counterexample => "counterexample",
            Suite::StrongConverse => "strong-converse",
            Suite::Pr2 => "pr2",
            Suite::IntegralCondition => "integral-condition",
            Suite::ModulusProperties => "modulus-properties",
            Suite::Rates => "rates",
            Suite::Oracles => "oracles",
        }
    }

    /// One line on what the suite checks.
    pub fn checks(self) -> &'static str {
        match self {
            Suite::Jackson => "Jackson-type theorem: E_n(f)_p / omega_k(f, 1/n)_p stays bounded without growth in n",
            Suite::Stechkin => {
                "Stechkin-Nikolskii type inequality: h^r ||T^(r)||_p and ||Delta_h^r T||_p are equivalent for h <= pi/n, uniformly in n"
            }
            Suite::DirectInverse => {
                "Jackson-type theorem and its converse in Hölder spaces, in terms of theta_{k,alpha} and psi_{k,r,alpha}"
            }
            Suite::Sandwich => {
                "connection between the errors of approximation in H_p^{r,alpha} and L_p: n^alpha E_n(f)_p <= C E_n(f)_H <= C (n^alpha E_n(f)_p + tail sum)"
            }
            Suite::Counterexample => {
                "for p < 1, T_n -> f in L_p while ||f - T_n||_{H_p^{1,1}} stays away from zero; p = 2 control decays"
            }
            Suite::StrongConverse => {
                "strong converse inequality ||f - L_n f||_H ~ w(f, 1/n)_H for means with ||f - L_n f||_p ~ w(f, 1/n)_p, and its theta-based variants"
            }
            Suite::Pr2 => "non-trivial estimate from below: n^{1-1/p} sup_h ||(Delta_h^r f)~_n||_p / h^alpha <= C E_n(f)_H",
            Suite::IntegralCondition => {
                "integral condition on omega_{r+k}: the integral of (omega_{r+k}(f,t)/t^alpha)^{p1} dt/t is equivalent to psi_{k,r,alpha}"
            }
            Suite::ModulusProperties => {
                "two properties of moduli of smoothness, theta-properties, psi/theta sandwich and the p1-triangle inequality"
            }
            Suite::Rates => "log-log slopes of omega_k(f, h)_p against known smoothness exponents",
            Suite::Oracles => "exact oracles: Parseval tail, family means on polynomials, differences of exponentials",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }

    /// Runs the suite and appends the monotonicity meta-check.
    pub fn run(self, settings: &Settings) -> Result<Report> {
        let mut rep = match self {
            Suite::Jackson => jackson(settings),
            Suite::Stechkin => stechkin(settings),
            Suite::DirectInverse => direct_inverse(settings),
            Suite::Sandwich => sandwich(settings),
            Suite::Counterexample => counterexample(settings),
            Suite::StrongConverse => strong_converse(settings),
            Suite::Pr2 => pr2_lower_bound(settings),
            Suite::IntegralCondition => integral_condition(settings),
            Suite::ModulusProperties => modulus_properties(settings),
            Suite::Rates => rates(settings),
            Suite::Oracles => oracles(settings),
        }?;
        rep.check_monotonicity();
        Ok(rep)
    }
}

pub(crate) fn entries(names: &[String]) -> Result<Vec<CatalogEntry<f64>>> {
    names.iter().map(|n| Ok(lookup::<f64>(n)?)).collect()
}

/// Catalog functions used when a suite is not given `functions`.
pub(crate) const CATALOG: [&str; 7] = ["triangle", "odd-harmonic:1", "odd-harmonic:2", "cosx", "poly3", "lacunary:0.5", "lacunary:1.5"];

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `true` when `f` is a polynomial of degree `<= n`.
pub(crate) fn in_space(e: &CatalogEntry<f64>, n: usize) -> bool {
    e.poly_degree.is_some_and(|d| d <= n) && e.tail_bound.is_none()
}

/// `(int_0^delta (omega(t) / t^alpha)^q dt / t)^{1/q}` from a modulus curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct LogIntegral {
    pub value: f64,
    /// Share of `value^q` contributed below the smallest grid step.
    pub below_grid: f64,
}

/// Trapezoid rule in `ln t` on the steps `<= delta`; below the grid the
/// integrand is continued as a power of `t` fitted to the two smallest steps.
/// Returns `value = inf` when that power does not decay.
pub(crate) fn log_integral(c: &ModulusCurve<f64>, alpha: f64, q: f64, delta: f64) -> Result<LogIntegral> {
    let start = c.h.iter().position(|&h| h <= delta * (1.0 + 1e-12)).ok_or(Error::InvalidSetting(format!(
        "integral scale {delta} lies below the h-grid"
    )))?;
    let pts: Vec<(f64, f64)> =
        (start..c.h.len()).map(|i| (c.h[i].ln(), (c.omega[i] / c.h[i].powf(alpha)).powf(q))).collect();
    // piece between the first step and delta, integrand taken constant
    let mut grid_part = pts[0].1 * (delta.ln() - pts[0].0);
    for w in pts.windows(2) {
        grid_part += 0.5 * (w[0].1 + w[1].1) * (w[0].0 - w[1].0);
    }
    let below = match pts.as_slice() {
        [.., (x0, g0), (x1, g1)] if *g1 > 0.0 => {
            let slope = (g0.ln() - g1.ln()) / (x0 - x1);
            if slope > 0.0 { g1 / slope } else { f64::INFINITY }
        }
        [.., (_, g1)] if *g1 == 0.0 => 0.0,
        _ => f64::INFINITY,
    };
    let total = grid_part + below;
    Ok(LogIntegral { value: total.powf(1.0 / q), below_grid: if total > 0.0 { below / total } else { 0.0 } })
}

/// `n^{1-1/p} sup_h ||(Delta_h^r f)~_n||_p / h^alpha` over the h-grid.
pub(crate) fn tilde_term(f: &PeriodicFn<f64>, r: usize, alpha: f64, n: usize, spec: &QuasiNormSpec<f64>, disc: &Discretization<f64>) -> Result<f64> {
    let scale = (n as f64).powf(1.0 - 1.0 / spec.p());
    let mut best = 0.0f64;
    for &h in disc.h.values() {
        let t = tilde(&f.difference(h, r), n)?;
        best = best.max(fn_norm(&t, &disc.x, spec)? / h.powf(alpha));
    }
    Ok(scale * best)
}

/// `E_nu` for all `nu` in `[lo, hi)` bracketed by the values at the dyadic ends.
///
/// Returns `(lower, upper)` estimates of `sum_{lo <= nu < hi} weight(nu) E_nu^{p1}`
/// using `E_hi <= E_nu <= E_lo`.
pub(crate) fn bracket_block(lo: usize, hi: usize, e_lo: f64, e_hi: f64, p1: f64, weight: impl Fn(f64) -> f64) -> (f64, f64) {
    let w: f64 = (lo..hi).map(|nu| weight(nu as f64)).sum();
    (w * e_hi.powf(p1), w * e_lo.powf(p1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()).unwrap(), s);
            assert!(!s.checks().contains('"'));
        }
        assert!(Suite::from_name("nope").is_err());
    }

    #[test]
    fn integral_of_power_law() {
        // omega(t) = t^2, alpha = 1, q = 1: int_0^d t dt/t = d
        let h: Vec<f64> = (0..200).map(|i| 0.5 * 0.95f64.powi(i)).collect();
        let norms: Vec<f64> = h.iter().map(|t| t * t).collect();
        let c = ModulusCurve::from_norms(1, h, norms);
        let v = log_integral(&c, 1.0, 1.0, 0.5).unwrap();
        assert!((v.value - 0.5).abs() < 1e-3, "{v:?}");
        let flat = ModulusCurve::from_norms(1, vec![0.5, 0.25], vec![0.5, 0.25]);
        assert!(log_integral(&flat, 1.0, 1.0, 0.5).unwrap().value.is_infinite());
    }

    #[test]
    fn block_brackets() {
        let (lo, hi) = bracket_block(4, 8, 1.0, 0.5, 1.0, |_| 1.0);
        assert_eq!((lo, hi), (2.0, 4.0));
    }
}

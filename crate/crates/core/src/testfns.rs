//! Catalog of test functions with exact evaluators and known smoothness rates.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{cis, creal, czero, Complex, Real};
use crate::spectral::{Coeffs, PeriodicFn, TrigPoly};

/// Where a known rate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Classical analytic result.
    Literature,
    /// Own calculation, checked against grid sweeps.
    Derived,
}

/// `omega_k(f, h)_p ~ h^exponent` as `h -> 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnownRate {
    /// `f64::INFINITY` for the sup norm.
    pub p: f64,
    pub k: usize,
    pub exponent: f64,
    pub provenance: Provenance,
    pub note: String,
}

impl KnownRate {
    fn new(p: f64, k: usize, exponent: f64, provenance: Provenance, note: &str) -> Self {
        Self { p, k, exponent, provenance, note: note.to_string() }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry<T: Real> {
    pub name: String,
    pub f: PeriodicFn<T>,
    pub known_rates: Vec<KnownRate>,
    pub notes: String,
    pub continuous: bool,
    /// Degree `n0` when `f` is a trigonometric polynomial of degree `n0`.
    pub poly_degree: Option<usize>,
    /// Sup-norm bound on the neglected tail of a truncated series.
    pub tail_bound: Option<f64>,
}

impl<T: Real> CatalogEntry<T> {
    fn new(name: impl Into<String>, f: PeriodicFn<T>, notes: &str) -> Self {
        Self {
            name: name.into(),
            f,
            known_rates: Vec::new(),
            notes: notes.to_string(),
            continuous: true,
            poly_degree: None,
            tail_bound: None,
        }
    }

    /// Expected exponent of `omega_k(f, h)_p`, if known.
    pub fn rate(&self, p: f64, k: usize) -> Option<&KnownRate> {
        self.known_rates.iter().find(|r| r.p == p && r.k == k)
    }

    /// Fails when the truncation tail exceeds `tol`.
    pub fn require_tail_below(&self, tol: f64) -> Result<()> {
        match self.tail_bound {
            Some(t) if !(t < tol) => Err(Error::InvalidParameter(format!(
                "truncation tail {t:e} of `{}` is not below the tolerance {tol:e}",
                self.name
            ))),
            _ => Ok(()),
        }
    }
}

fn phase_shift(r: usize) -> f64 {
    PI * (r as f64 - 1.0) / 2.0
}

/// Coefficients of `sin(m x - phi) / m^r`: `c_m = e^{-i phi}/(2i m^r)`, `c_{-m} = -e^{i phi}/(2i m^r)`.
fn odd_harmonic_coeff<T: Real>(r: usize, nu: i64) -> Complex<T> {
    if nu % 2 == 0 {
        return czero();
    }
    let m = nu.unsigned_abs() as f64;
    let phi = phase_shift(r);
    let scale = 1.0 / (2.0 * m.powi(r as i32));
    // e^{-i phi}/(2i) = -i e^{-i phi}/2
    let c = if nu > 0 {
        Complex::new(-(phi.sin()), -(phi.cos())) * scale
    } else {
        Complex::new(-(phi.sin()), phi.cos()) * scale
    };
    Complex::new(T::lit(c.re), T::lit(c.im))
}

/// `sum_{nu > N} (2 nu + 1)^{-r}` bounded by the first term plus the integral; infinite for `r = 1`.
pub fn odd_harmonic_tail(r: usize, n_max: usize) -> f64 {
    if r <= 1 {
        return f64::INFINITY;
    }
    let a = 2.0 * n_max as f64 + 3.0;
    a.powi(-(r as i32)) + a.powi(1 - r as i32) / (2.0 * (r as f64 - 1.0))
}

fn odd_harmonic_rates(r: usize) -> Vec<KnownRate> {
    let note = "jump in the (r-1)-th derivative";
    let mut rates: Vec<KnownRate> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&p| KnownRate::new(p, r, r as f64 - 1.0 + 1.0 / p, Provenance::Literature, note))
        .collect();
    rates.push(KnownRate::new(f64::INFINITY, r, r as f64 - 1.0, Provenance::Literature, note));
    rates
}

/// `sum_{nu=0}^{N} sin((2 nu + 1) x - pi (r-1)/2) / (2 nu + 1)^r`, summed directly.
pub fn odd_harmonic<T: Real>(r: usize, n_max: usize) -> Result<CatalogEntry<T>> {
    if r == 0 || n_max == 0 {
        return Err(Error::InvalidParameter("odd-harmonic series needs r >= 1 and N >= 1".into()));
    }
    let phi = T::lit(phase_shift(r));
    let eval = move |x: T| {
        let mut s = T::zero();
        for nu in 0..=n_max {
            let m = T::from_usize_lossy(2 * nu + 1);
            s = s + (m * x - phi).sin() / m.powi(r as i32);
        }
        creal(s)
    };
    let terms: Vec<(i64, Complex<T>)> = (0..=n_max as i64)
        .flat_map(|nu| {
            let m = 2 * nu + 1;
            [(m, odd_harmonic_coeff(r, m)), (-m, odd_harmonic_coeff(r, -m))]
        })
        .collect();
    let name = format!("odd-harmonic:{r}:{n_max}");
    let f = PeriodicFn::closed_with_coeffs(name.clone(), true, eval, Some(Coeffs::Sparse(terms)));
    let mut e = CatalogEntry::new(name, f, "truncated odd-harmonic series");
    e.known_rates = odd_harmonic_rates(r);
    e.poly_degree = Some(2 * n_max + 1);
    e.tail_bound = Some(odd_harmonic_tail(r, n_max));
    Ok(e)
}

/// Euler numbers `E_0..=E_n` (`1, 0, -1, 0, 5, ...`).
fn euler_numbers(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for m in (2..=n).step_by(2) {
        let mut binom = 1.0;
        let mut s = 0.0;
        for k in 0..m {
            if k % 2 == 0 {
                s += binom * e[k];
            }
            binom = binom * (m - k) as f64 / (k + 1) as f64;
        }
        e[m] = -s;
    }
    e
}

/// Coefficients of the Euler polynomial `E_n` in powers of `(x - 1/2)`, lowest first.
fn euler_polynomial_centered(n: usize) -> Vec<f64> {
    let numbers = euler_numbers(n);
    // E_n(x) = sum_k C(n,k) (E_k / 2^k) (x - 1/2)^{n-k}
    let mut out = vec![0.0; n + 1];
    let mut binom = 1.0;
    for k in 0..=n {
        out[n - k] = binom * numbers[k] / 2f64.powi(k as i32);
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    out
}

/// The full odd-harmonic series in closed form.
///
/// On `[0, pi]` it equals `pi^r / (4 (r-1)!) E_{r-1}(x / pi)` with `E_n` the
/// Euler polynomial, and `f(x + pi) = -f(x)`. For `r = 1` this is the square
/// wave `+-pi/4`, taking the value `0` at the jumps.
pub fn odd_harmonic_limit<T: Real>(r: usize) -> Result<CatalogEntry<T>> {
    if r == 0 {
        return Err(Error::InvalidParameter("odd-harmonic series needs r >= 1".into()));
    }
    let factorial: f64 = (1..r).map(|k| k as f64).product();
    let scale = PI.powi(r as i32) / (4.0 * factorial);
    let poly: Vec<T> = euler_polynomial_centered(r - 1).into_iter().map(|c| T::lit(c * scale)).collect();
    let pi = T::PI();
    let half = T::lit(0.5);
    let eval = move |x: T| {
        let y = x.wrap_2pi();
        let (y, sign) = if y < pi { (y, T::one()) } else { (y - pi, -T::one()) };
        if r == 1 && y == T::zero() {
            return czero();
        }
        let u = y / pi - half;
        let v = poly.iter().rev().fold(T::zero(), |acc, &c| acc * u + c);
        creal(sign * v)
    };
    let name = format!("odd-harmonic:{r}");
    let coeffs = Coeffs::Formula(std::sync::Arc::new(move |nu: i64| odd_harmonic_coeff::<T>(r, nu)));
    let f = PeriodicFn::closed_with_coeffs(name.clone(), true, eval, Some(coeffs));
    let mut e = CatalogEntry::new(name, f, "odd-harmonic series summed in closed form");
    e.known_rates = odd_harmonic_rates(r);
    e.continuous = r >= 2;
    Ok(e)
}

/// `x` on `[0, pi)`, `2 pi - x` on `[pi, 2 pi]`, extended periodically.
pub fn triangle_wave<T: Real>() -> CatalogEntry<T> {
    let eval = |x: T| {
        let y = x.wrap_2pi();
        creal(if y < T::PI() { y } else { T::two_pi() - y })
    };
    // pi/2 - (4/pi) sum_{m odd} cos(m x)/m^2
    let coeff = |nu: i64| -> Complex<T> {
        if nu == 0 {
            creal(T::FRAC_PI_2())
        } else if nu % 2 != 0 {
            creal(T::lit(-2.0 / (PI * (nu * nu) as f64)))
        } else {
            czero()
        }
    };
    let f = PeriodicFn::closed_with_coeffs("triangle", true, eval, Some(Coeffs::Formula(std::sync::Arc::new(coeff))));
    let mut e = CatalogEntry::new("triangle", f, "piecewise linear with slopes +-1");
    for p in [0.5, 1.0, 2.0, f64::INFINITY] {
        e.known_rates.push(KnownRate::new(p, 1, 1.0, Provenance::Derived, "slope +-1"));
        let k2 = if p.is_infinite() { 1.0 } else { 1.0 + 1.0 / p };
        e.known_rates.push(KnownRate::new(p, 2, k2, Provenance::Derived, "two kinks"));
    }
    e
}

/// `g_n` on `[0, 2]`: steps `k/n` joined by ramps of width `1/n^2`, mirrored as `1 - g_n(x - 1)`.
pub fn ramp_g(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    if x > 1.0 {
        return 1.0 - ramp_g(n, x - 1.0);
    }
    let k = ((nf * x).floor() as usize).min(n - 1);
    let kf = k as f64;
    let start = (kf + 1.0) / nf - 1.0 / (nf * nf);
    if x < start {
        kf / nf
    } else {
        (kf / nf + (x - start) * nf).min((kf + 1.0) / nf)
    }
}

/// `phi_n(x) = pi g_n(x / pi)`: a staircase with steep ramps approximating the triangle wave.
pub fn ramp_phi<T: Real>(n: usize) -> Result<CatalogEntry<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("ramp parameter n must be at least 1".into()));
    }
    let eval = move |x: T| {
        let y = x.to_f64_lossy().rem_euclid(2.0 * PI);
        creal(T::lit(PI * ramp_g(n, y / PI)))
    };
    let name = format!("ramp-phi:{n}");
    let f = PeriodicFn::closed(name.clone(), true, eval);
    let mut e = CatalogEntry::new(name, f, "staircase with ramps of width pi/n^2");
    e.known_rates.push(KnownRate::new(f64::INFINITY, 1, 1.0, Provenance::Derived, "Lipschitz with constant n"));
    Ok(e)
}

/// `sum_{nu=0}^{L} 2^{-gamma nu} cos(2^nu x)`.
pub fn lacunary<T: Real>(gamma: f64, levels: usize) -> Result<CatalogEntry<T>> {
    if !(gamma > 0.0) || levels > 40 {
        return Err(Error::InvalidParameter(format!("lacunary series needs gamma > 0 and at most 40 levels (got {gamma}, {levels})")));
    }
    let mut terms = Vec::with_capacity(2 * levels + 2);
    for nu in 0..=levels {
        let a = T::lit(0.5 * 2f64.powf(-gamma * nu as f64));
        let m = 1i64 << nu;
        terms.push((m, creal(a)));
        terms.push((-m, creal(a)));
    }
    let name = format!("lacunary:{gamma}:{levels}");
    let f = PeriodicFn::sparse(name.clone(), terms);
    let mut e = CatalogEntry::new(name, f, "lacunary cosine series, rate valid for h above 2^-L");
    for p in [0.5, 1.0, 2.0, f64::INFINITY] {
        for k in 1..=3usize {
            if gamma < k as f64 {
                e.known_rates.push(KnownRate::new(p, k, gamma, Provenance::Literature, "lacunary Hölder class"));
            }
        }
    }
    e.poly_degree = Some(1 << levels);
    e.tail_bound = Some(2f64.powf(-gamma * (levels + 1) as f64) / (1.0 - 2f64.powf(-gamma)));
    Ok(e)
}

/// Default number of lacunary levels.
pub const LACUNARY_LEVELS: usize = 10;

fn poly_entry<T: Real>(name: &str, poly: TrigPoly<T>, notes: &str) -> CatalogEntry<T> {
    let degree = poly.degree();
    let mut e = CatalogEntry::new(name, poly.to_fn(name), notes);
    e.poly_degree = Some(degree);
    for p in [0.5, 1.0, 2.0, f64::INFINITY] {
        for k in 1..=3usize {
            e.known_rates.push(KnownRate::new(p, k, k as f64, Provenance::Derived, "smooth"));
        }
    }
    e
}

/// `1 + cos x - 0.5 sin 2x + 0.25 cos 3x`.
pub fn poly3<T: Real>() -> CatalogEntry<T> {
    let half = T::lit(0.5);
    let mut t = TrigPoly::zero(3);
    t.set_coeff(0, creal(T::one()));
    t.set_coeff(1, creal(half));
    t.set_coeff(-1, creal(half));
    // -0.5 sin 2x = -0.5 (e^{2ix} - e^{-2ix}) / 2i
    t.set_coeff(2, Complex::new(T::zero(), T::lit(0.25)));
    t.set_coeff(-2, Complex::new(T::zero(), T::lit(-0.25)));
    t.set_coeff(3, creal(T::lit(0.125)));
    t.set_coeff(-3, creal(T::lit(0.125)));
    poly_entry("poly3", t, "fixed real polynomial of degree 3")
}

/// `cos(k x)`.
pub fn cos_k<T: Real>(k: usize) -> CatalogEntry<T> {
    let name = if k == 1 { "cosx".to_string() } else { format!("cos:{k}") };
    let half = creal(T::lit(0.5));
    let t = TrigPoly::from_fn(k, |nu| if nu.unsigned_abs() as usize == k { half } else { czero() });
    let t = if k == 0 { TrigPoly::constant(0, creal(T::one())) } else { t };
    poly_entry(&name, t, "single cosine")
}

/// Probes with smooth or Hölder-class behavior.
pub fn smooth_catalog<T: Real>() -> Vec<CatalogEntry<T>> {
    vec![
        cos_k(1),
        poly3(),
        lacunary(0.5, LACUNARY_LEVELS).expect("valid lacunary parameters"),
        lacunary(1.5, LACUNARY_LEVELS).expect("valid lacunary parameters"),
    ]
}

/// Catalog used by the verification suites.
pub fn default_catalog<T: Real>() -> Vec<CatalogEntry<T>> {
    let mut v = vec![
        triangle_wave(),
        odd_harmonic_limit(1).expect("r >= 1"),
        odd_harmonic_limit(2).expect("r >= 1"),
    ];
    v.extend(smooth_catalog());
    v
}

fn parse_num<V: std::str::FromStr>(name: &str, s: &str) -> Result<V> {
    s.parse().map_err(|_| Error::UnknownFunction(name.to_string()))
}

/// Looks up a catalog entry by name.
///
/// Names: `const[:c]`, `cosx`, `sinx`, `expix`, `cos:k`, `poly3`, `triangle`,
/// `odd-harmonic:r[:N]`, `lacunary:gamma[:L]`, `ramp-phi:n`.
pub fn lookup<T: Real>(name: &str) -> Result<CatalogEntry<T>> {
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["const"] | ["const", _] => {
            let c: f64 = if parts.len() == 2 { parse_num(name, parts[1])? } else { 1.0 };
            let mut e = poly_entry(name, TrigPoly::constant(0, creal(T::lit(c))), "constant");
            e.known_rates.clear();
            Ok(e)
        }
        ["cosx"] => Ok(cos_k(1)),
        ["cos", k] => Ok(cos_k(parse_num(name, k)?)),
        ["sinx"] => {
            let t = TrigPoly::from_fn(1, |nu| Complex::new(T::zero(), T::lit(-0.5 * nu as f64)));
            Ok(poly_entry("sinx", t, "single sine"))
        }
        ["expix"] => {
            let mut e = poly_entry("expix", TrigPoly::monomial(1, 1, creal(T::one())), "complex exponential");
            e.f = PeriodicFn::closed_with_coeffs("expix", false, cis, Some(Coeffs::Sparse(vec![(1, creal(T::one()))])));
            Ok(e)
        }
        ["poly3"] => Ok(poly3()),
        ["triangle"] => Ok(triangle_wave()),
        ["odd-harmonic", r] => odd_harmonic_limit(parse_num(name, r)?),
        ["odd-harmonic", r, n] => odd_harmonic(parse_num(name, r)?, parse_num(name, n)?),
        ["lacunary", g] => lacunary(parse_num(name, g)?, LACUNARY_LEVELS),
        ["lacunary", g, l] => lacunary(parse_num(name, g)?, parse_num(name, l)?),
        ["ramp-phi", n] => ramp_phi(parse_num(name, n)?),
        _ => Err(Error::UnknownFunction(name.to_string())),
    }
}

/// Names accepted by [`lookup`], as patterns.
pub const CATALOG_PATTERNS: [&str; 10] = [
    "const[:c]",
    "cosx",
    "sinx",
    "expix",
    "cos:k",
    "poly3",
    "triangle",
    "odd-harmonic:r[:N]",
    "lacunary:gamma[:L]",
    "ramp-phi:n",
];

//! Convolution Fourier means, sampled family means and their operator norms.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moduli::QuasiNormSpec;
use crate::scalar::{cis, creal, czero, Complex, Real};
use crate::spectral::{coeffs_up_to, PeriodicFn, TrigPoly, UniformGrid};

/// Kernel `K_n(x) = sum_{|nu| <= n} a_nu e^{i nu x}` with `a_0 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T: Real> {
    name: String,
    profile: TrigPoly<T>,
}

pub const KERNEL_NAMES: [&str; 3] = ["dirichlet", "fejer", "vp"];

impl<T: Real> Kernel<T> {
    /// Custom kernel; `a_0` must equal 1.
    pub fn new(name: impl Into<String>, profile: TrigPoly<T>) -> Result<Self> {
        let a0 = profile.coeff(0);
        if a0 != creal(T::one()) {
            return Err(Error::InvalidParameter(format!("kernel coefficient a_0 must be 1, got {a0}")));
        }
        Ok(Self { name: name.into(), profile })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.profile.degree()
    }

    pub fn coeff(&self, nu: i64) -> Complex<T> {
        self.profile.coeff(nu)
    }

    /// The kernel as a trigonometric polynomial.
    pub fn profile(&self) -> &TrigPoly<T> {
        &self.profile
    }

    /// Whether the catalog family `{L_n}` is uniformly bounded in `L_1` and `C`.
    pub fn is_bounded_family(&self) -> bool {
        matches!(self.name.as_str(), "fejer" | "vp")
    }

    /// Refuses kernels whose means are not uniformly bounded.
    pub fn require_bounded(&self) -> Result<()> {
        if self.is_bounded_family() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "kernel `{}` does not generate a uniformly bounded family of means",
                self.name
            )))
        }
    }
}

/// `dirichlet`: `a_nu = 1`; `fejer`: `1 - |nu|/(n+1)`;
/// `vp`: `1` for `|nu| <= floor(n/2)`, then linear down to `0` at `|nu| = n+1`.
pub fn kernel_catalog<T: Real>(name: &str, n: usize) -> Result<Kernel<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("kernel degree n must be at least 1".into()));
    }
    let n1 = (n + 1) as f64;
    let m = n / 2;
    let a = |nu: i64| -> f64 {
        let k = nu.unsigned_abs() as usize;
        match name {
            "dirichlet" => 1.0,
            "fejer" => 1.0 - k as f64 / n1,
            _ if k <= m => 1.0,
            _ => (n1 - k as f64) / (n1 - m as f64),
        }
    };
    if !KERNEL_NAMES.contains(&name) {
        return Err(Error::UnknownKernel(name.to_string()));
    }
    Kernel::new(name, TrigPoly::from_fn(n, |nu| creal(T::lit(a(nu)))))
}

/// `L_n(f)`: coefficients `a_nu c_nu(f)` for `|nu| <= n`.
///
/// Exact coefficients of `f` are used when available, discrete ones from
/// `grid` otherwise (requires `M >= 4(n+1)`).
pub fn fourier_mean<T: Real>(f: &PeriodicFn<T>, kernel: &Kernel<T>, grid: &UniformGrid<T>) -> Result<TrigPoly<T>> {
    let c = coeffs_up_to(f, kernel.degree(), grid)?;
    Ok(c.map_multiplier(|nu| kernel.coeff(nu)))
}

/// Nodes `t_j = 2 pi j / (4n + 1)`, `j = 0..4n`.
pub fn family_nodes<T: Real>(n: usize) -> Vec<T> {
    let count = 4 * n + 1;
    (0..count)
        .map(|j| T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(count))
        .collect()
}

/// `L_{n,lambda}(f, x) = (1/(4n+1)) sum_j f(t_j + lambda) K_n(x - t_j - lambda)`.
///
/// The coefficient of `e^{i nu x}` is `a_nu (1/(4n+1)) sum_j f(t_j + lambda) e^{-i nu (t_j + lambda)}`.
pub fn family_mean<T: Real>(f: &PeriodicFn<T>, kernel: &Kernel<T>, lambda: T) -> Result<TrigPoly<T>> {
    let n = kernel.degree();
    let nodes = family_nodes::<T>(n);
    let values: Vec<(T, Complex<T>)> = nodes
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let v = f.eval(t + lambda);
            if v.re.is_finite() && v.im.is_finite() {
                Ok((t + lambda, v))
            } else {
                Err(Error::NonFinite {
                    label: f.label().to_string(),
                    node: j,
                    x: (t + lambda).to_f64_lossy(),
                    value: format!("{v}"),
                })
            }
        })
        .collect::<Result<_>>()?;
    let count = T::from_usize_lossy(nodes.len());
    Ok(TrigPoly::from_fn(n, |nu| {
        let a = kernel.coeff(nu);
        if a == czero() {
            return czero();
        }
        let nu_t = T::from_i64(nu).unwrap();
        let s = values.iter().fold(czero(), |acc, &(y, v)| acc + v * cis(-nu_t * y));
        a * s / count
    }))
}

/// Family means at every lambda node, in node order.
pub fn family_means<T: Real>(f: &PeriodicFn<T>, kernel: &Kernel<T>, lambdas: &[T]) -> Result<Vec<TrigPoly<T>>> {
    lambdas.par_iter().map(|&l| family_mean(f, kernel, l)).collect()
}

/// `lambda -> (1/(4n+1)) sum_j f(t_j + lambda)`.
pub fn tilde<T: Real>(f: &PeriodicFn<T>, n: usize) -> Result<PeriodicFn<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("tilde needs n >= 1".into()));
    }
    let count = 4 * n + 1;
    let label = format!("tilde_{n}({})", f.label());
    if let Some(terms) = f.finite_coeffs() {
        let kept = terms.into_iter().filter(|(mu, _)| mu.rem_euclid(count as i64) == 0).collect();
        return Ok(PeriodicFn::sparse(label, kept));
    }
    let g = f.clone();
    let nodes = family_nodes::<T>(n);
    let scale = T::one() / T::from_usize_lossy(count);
    Ok(PeriodicFn::closed(label, f.is_real(), move |l: T| {
        nodes.iter().fold(czero(), |acc, &t| acc + g.eval(t + l)) * scale
    }))
}

/// Operator norm estimate of `L_n` on `L_p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorNorm<T: Real> {
    pub value: T,
    /// `false` when `value` is only a lower bound from probes.
    pub exact: bool,
}

/// `p = 1, inf`: normalized `L_1` mass of the kernel; `p = 2`: `max |a_nu|`;
/// other `p`: lower bound over a fixed probe set.
pub fn operator_norm<T: Real>(kernel: &Kernel<T>, spec: &QuasiNormSpec<T>) -> Result<OperatorNorm<T>> {
    let n = kernel.degree();
    let p = spec.p();
    if p == T::lit(2.0) {
        let value = kernel.profile().coeffs().iter().map(|a| a.norm()).fold(T::zero(), T::max);
        return Ok(OperatorNorm { value, exact: true });
    }
    let m = 8192.max(64 * (n + 1)).next_power_of_two();
    let grid = UniformGrid::<T>::new(m)?;
    if spec.is_infinite() || p == T::one() {
        let k = kernel.profile().sample(&grid, T::zero());
        let value = k.iter().map(|v| v.norm()).sum::<T>() / T::from_usize_lossy(m);
        return Ok(OperatorNorm { value, exact: true });
    }
    // Probes: single frequencies, the kernel itself and Fejér kernels of growing degree.
    let mut probes: Vec<TrigPoly<T>> = (0..=n as i64).map(|nu| TrigPoly::monomial(n, nu, creal(T::one()))).collect();
    probes.push(kernel.profile().clone());
    for d in [n, 2 * n, 4 * n] {
        probes.push(kernel_catalog::<T>("fejer", d)?.profile().clone());
    }
    let value = probes
        .par_iter()
        .map(|g| {
            let out = g.map_multiplier(|nu| kernel.coeff(nu));
            let num = spec.norm_unchecked(&out.sample(&grid, T::zero()));
            let den = spec.norm_unchecked(&g.sample(&grid, T::zero()));
            if den > T::zero() {
                num / den
            } else {
                T::zero()
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(T::zero(), T::max);
    Ok(OperatorNorm { value, exact: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::difference_multiplier;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn catalog_profiles() {
        let f = kernel_catalog::<f64>("fejer", 1).unwrap();
        assert_eq!(f.profile().coeffs(), &[c(0.5), c(1.0), c(0.5)]);
        let v = kernel_catalog::<f64>("vp", 4).unwrap();
        let want = [1.0 / 3.0, 2.0 / 3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0 / 3.0, 1.0 / 3.0];
        for (a, w) in v.profile().coeffs().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15);
        }
        for name in KERNEL_NAMES {
            for n in [1, 2, 7, 32] {
                let k = kernel_catalog::<f64>(name, n).unwrap();
                assert_eq!(k.coeff(0), c(1.0));
                assert!(k.profile().is_real(0.0));
            }
        }
        assert!(matches!(kernel_catalog::<f64>("gauss", 3), Err(Error::UnknownKernel(_))));
        assert!(kernel_catalog::<f64>("fejer", 0).is_err());
        assert!(kernel_catalog::<f64>("dirichlet", 3).unwrap().require_bounded().is_err());
    }

    #[test]
    fn fourier_mean_examples() {
        let grid = UniformGrid::new(256).unwrap();
        let k = kernel_catalog::<f64>("fejer", 5).unwrap();
        let one = PeriodicFn::closed("1", true, |_| c(1.0));
        let m = fourier_mean(&one, &k, &grid).unwrap();
        assert!((m.coeff(0) - c(1.0)).norm() < 1e-14);
        for nu in -5i64..=5 {
            let e = PeriodicFn::closed("e", false, move |x: f64| cis(nu as f64 * x));
            let m = fourier_mean(&e, &k, &grid).unwrap();
            let want = 1.0 - nu.abs() as f64 / 6.0;
            assert!((m.coeff(nu) - c(want)).norm() < 1e-12);
        }
    }

    #[test]
    fn mean_commutes_with_differences() {
        let grid = UniformGrid::new(512).unwrap();
        let k = kernel_catalog::<f64>("vp", 6).unwrap();
        let t = TrigPoly::from_fn(20, |nu| Complex::new(1.0 / (1.0 + (nu * nu) as f64), 0.1 * nu as f64));
        let f = PeriodicFn::closed("poly20", false, move |x: f64| t.eval(x));
        let (h, r) = (0.37, 2);
        let lhs = fourier_mean(&f, &k, &grid).unwrap().map_multiplier(|nu| difference_multiplier(nu, h, r));
        let rhs = fourier_mean(&f.difference(h, r), &k, &grid).unwrap();
        for x in [0.0, 0.5, 2.0, 4.4] {
            assert!((lhs.eval(x) - rhs.eval(x)).norm() < 1e-10);
        }
    }

    #[test]
    fn family_mean_examples() {
        let k = kernel_catalog::<f64>("fejer", 3).unwrap();
        let one = PeriodicFn::closed("1", true, |_| c(1.0));
        for l in [0.0, 0.4, 3.0] {
            let m = family_mean(&one, &k, l).unwrap();
            assert!((m.coeff(0) - c(1.0)).norm() < 1e-14);
            assert!(m.terms().filter(|(nu, _)| *nu != 0).all(|(_, v)| v.norm() < 1e-14));
        }
        // Aliased frequency 4n+1 lands on nu = 0 with a lambda-dependent phase.
        let mu = 13i64;
        let e = PeriodicFn::closed("e13", false, move |x: f64| cis(mu as f64 * x));
        let nodes = family_nodes::<f64>(3);
        for l in [0.0, 0.3, 1.1] {
            let m = family_mean(&e, &k, l).unwrap();
            for nu in -3i64..=3 {
                let direct: Complex<f64> = nodes
                    .iter()
                    .map(|&t| cis(mu as f64 * (t + l)) * cis(-(nu as f64) * (t + l)))
                    .sum::<Complex<f64>>()
                    / 13.0
                    * k.coeff(nu);
                assert!((m.coeff(nu) - direct).norm() < 1e-10);
            }
            assert!((m.coeff(0) - cis(13.0 * l)).norm() < 1e-10);
        }
    }

    #[test]
    fn tilde_examples() {
        let n = 2;
        for mu in [1i64, 3, 8, 9, 10, 18, -9] {
            let e = PeriodicFn::closed("e", false, move |x: f64| cis(mu as f64 * x));
            let t = tilde(&e, n).unwrap();
            let sparse = tilde(&PeriodicFn::sparse("e", vec![(mu, c(1.0))]), n).unwrap();
            for l in [0.0, 0.7, 2.5] {
                let want = if mu % 9 == 0 { cis(mu as f64 * l) } else { c(0.0) };
                assert!((t.eval(l) - want).norm() < 1e-12);
                assert!((sparse.eval(l) - want).norm() < 1e-12);
            }
        }
        let one = PeriodicFn::closed("1", true, |_| c(1.0));
        assert!((tilde(&one, 3).unwrap().eval(0.2) - c(1.0)).norm() < 1e-14);
        assert!(tilde(&one, 0).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        let one = QuasiNormSpec::new(1.0).unwrap();
        let two = QuasiNormSpec::new(2.0).unwrap();
        let fejer = kernel_catalog::<f64>("fejer", 8).unwrap();
        let v = operator_norm(&fejer, &one).unwrap();
        assert!(v.exact && (v.value - 1.0).abs() < 1e-10);
        assert_eq!(operator_norm(&fejer, &two).unwrap().value, 1.0);
        let inf = operator_norm(&fejer, &QuasiNormSpec::infinity()).unwrap();
        assert!((inf.value - 1.0).abs() < 1e-10);
        let leb: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&n| operator_norm(&kernel_catalog::<f64>("dirichlet", n).unwrap(), &one).unwrap().value)
            .collect();
        assert!(leb[0] < leb[1] && leb[1] < leb[2]);
        // Lebesgue constants: 4/pi^2 log n + O(1).
        for (&l, n) in leb.iter().zip([4.0f64, 8.0, 16.0]) {
            let approx = 4.0 / std::f64::consts::PI.powi(2) * n.ln() + 1.27;
            assert!((l - approx).abs() < 0.1, "{l} vs {approx}");
        }
        let lb = operator_norm(&fejer, &QuasiNormSpec::new(0.5).unwrap()).unwrap();
        assert!(!lb.exact && lb.value >= 1.0 - 1e-12);
    }
}

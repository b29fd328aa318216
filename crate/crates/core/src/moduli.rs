//! Quasi-norms, forward differences and moduli of smoothness on shared grids.
//!
//! Every supremum over a step `h` is taken over one global geometric
//! [`HGrid`], so nested suprema and monotonicity in the scale argument hold
//! exactly on the grid.

use num_traits::Float;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};
use crate::spectral::{PeriodicFn, TrigPoly, UniformGrid};

/// Exponent `p` of the (quasi-)norm, `0 < p <= inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiNormSpec<T: Real> {
    p: T,
}

impl<T: Real> QuasiNormSpec<T> {
    /// `p = inf` is given as `T::infinity()`.
    pub fn new(p: T) -> Result<Self> {
        if !(p > T::zero()) || p.is_nan() {
            return Err(Error::InvalidExponent(p.to_f64_lossy()));
        }
        Ok(Self { p })
    }

    pub fn infinity() -> Self {
        Self { p: T::infinity() }
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// `min(p, 1)`.
    pub fn p1(&self) -> T {
        self.p.min(T::one())
    }

    pub fn is_infinite(&self) -> bool {
        self.p.is_infinite()
    }

    /// `sum_j |v_j|^p` for finite `p`.
    pub fn power_sum(&self, values: &[Complex<T>]) -> T {
        let p = self.p;
        if p == T::lit(2.0) {
            values.iter().map(|v| v.norm_sqr()).sum()
        } else if p == T::one() {
            values.iter().map(|v| v.norm()).sum()
        } else if p == T::lit(0.5) {
            values.iter().map(|v| v.norm().sqrt()).sum()
        } else {
            values.iter().map(|v| v.norm().powf(p)).sum()
        }
    }

    /// Norm without the finiteness check; `values` must be nonempty.
    pub fn norm_unchecked(&self, values: &[Complex<T>]) -> T {
        if self.is_infinite() {
            return values.iter().map(|v| v.norm()).fold(T::zero(), T::max);
        }
        let mean = self.power_sum(values) / T::from_usize_lossy(values.len());
        self.root(mean)
    }

    /// Real-valued version of [`Self::norm_unchecked`].
    pub fn norm_real(&self, values: &[T]) -> T {
        if self.is_infinite() {
            return values.iter().map(|v| Float::abs(*v)).fold(T::zero(), T::max);
        }
        let p = self.p;
        let sum: T = values.iter().map(|v| Float::abs(*v).powf(p)).sum();
        self.root(sum / T::from_usize_lossy(values.len()))
    }

    /// `m^{1/p}`.
    pub fn root(&self, m: T) -> T {
        if self.p == T::lit(2.0) {
            m.sqrt()
        } else if self.p == T::one() {
            m
        } else if self.p == T::lit(0.5) {
            m * m
        } else {
            m.powf(T::one() / self.p)
        }
    }
}

/// `((1/M) sum_j |f_j|^p)^{1/p}`, or `max_j |f_j|` for `p = inf`.
pub fn lp_norm<T: Real>(values: &[Complex<T>], spec: &QuasiNormSpec<T>) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite {
            label: "samples".into(),
            node: j,
            x: f64::NAN,
            value: format!("{}", values[j]),
        });
    }
    Ok(spec.norm_unchecked(values))
}

/// Norm of `f` sampled on `grid`.
pub fn fn_norm<T: Real>(f: &PeriodicFn<T>, grid: &UniformGrid<T>, spec: &QuasiNormSpec<T>) -> Result<T> {
    lp_norm(&f.sample_shifted(grid, T::zero())?, spec)
}

/// `x -> sum_{nu=0}^k (-1)^nu C(k,nu) f(x + nu h)`.
pub fn finite_difference<T: Real>(f: &PeriodicFn<T>, h: T, k: usize) -> Result<PeriodicFn<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("difference order k must be at least 1".into()));
    }
    Ok(f.difference(h, k))
}

/// Decreasing geometric grid of steps `h_max = h_0 > h_1 > ... > h_min`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HGrid<T: Real> {
    per_decade: usize,
    values: Vec<T>,
}

impl<T: Real> Default for HGrid<T> {
    /// 32 points per decade on `[2 pi 1e-4, 2 pi]`.
    fn default() -> Self {
        Self::new(T::two_pi() * T::lit(1e-4), T::two_pi(), 32).expect("valid default grid")
    }
}

impl<T: Real> HGrid<T> {
    pub fn new(h_min: T, h_max: T, per_decade: usize) -> Result<Self> {
        if !(h_min > T::zero() && h_max > h_min) || per_decade == 0 {
            return Err(Error::InvalidParameter(format!(
                "h-grid needs 0 < h_min < h_max and at least one point per decade (got {h_min}, {h_max}, {per_decade})"
            )));
        }
        let decades = (h_max / h_min).log10().to_f64_lossy();
        let steps = (decades * per_decade as f64).round().max(1.0) as usize;
        let values = (0..=steps)
            .map(|i| {
                let e = -(i as f64) * decades / steps as f64;
                h_max * T::lit(10f64.powf(e))
            })
            .collect();
        Ok(Self { per_decade, values })
    }

    pub fn per_decade(&self) -> usize {
        self.per_decade
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn h_min(&self) -> T {
        *self.values.last().expect("nonempty grid")
    }

    pub fn h_max(&self) -> T {
        self.values[0]
    }

    /// Index of the first grid step `<= t`.
    pub fn first_at_most(&self, t: T) -> Result<usize> {
        let tol = T::one() + T::lit(1e-12);
        if !(t > T::zero()) || t * tol < self.h_min() {
            return Err(Error::ScaleBelowGrid { t: t.to_f64_lossy(), h_min: self.h_min().to_f64_lossy() });
        }
        Ok(self.values.iter().position(|&h| h <= t * tol).expect("t >= h_min"))
    }

    /// Grid steps `<= t`, decreasing.
    pub fn truncated(&self, t: T) -> Result<&[T]> {
        Ok(&self.values[self.first_at_most(t)?..])
    }

    /// Steps rounded to the nearest positive multiple of the spacing of `grid`,
    /// duplicates removed. Shifts by such steps permute the grid nodes, so
    /// discrete norms are exactly shift invariant.
    pub fn snapped_to(&self, grid: &UniformGrid<T>) -> Self {
        let dx = grid.spacing();
        let mut multiples: Vec<usize> = self
            .values
            .iter()
            .map(|&h| (h / dx).round().to_f64_lossy().max(1.0) as usize)
            .collect();
        multiples.dedup();
        let values = multiples.into_iter().map(|m| dx * T::from_usize_lossy(m)).collect();
        Self { per_decade: self.per_decade, values }
    }
}

/// Discretization shared by all moduli computations.
#[derive(Clone, Debug)]
pub struct Discretization<T: Real> {
    pub x: UniformGrid<T>,
    pub h: HGrid<T>,
    pub lambda_points: usize,
}

impl<T: Real> Discretization<T> {
    pub fn new(x: UniformGrid<T>, h: HGrid<T>, lambda_points: usize) -> Self {
        Self { x, h, lambda_points }
    }

    /// Default h-grid and 64 lambda nodes on an x-grid of `m` points.
    pub fn with_grid_size(m: usize) -> Result<Self> {
        Ok(Self::new(UniformGrid::new(m)?, HGrid::default(), 64))
    }

    pub fn lambda_nodes(&self) -> Vec<T> {
        let l = T::from_usize_lossy(self.lambda_points);
        (0..self.lambda_points).map(|i| T::two_pi() * T::from_usize_lossy(i) / l).collect()
    }
}

/// A supremum over the h-grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HSweep<T: Real> {
    /// `(h, value)` in decreasing `h`.
    pub values: Vec<(T, T)>,
    pub sup: T,
    pub argmax: T,
    /// The largest value sits at the smallest step and is still increasing
    /// there, so the true supremum may be approached only as `h -> 0`.
    pub sup_possibly_at_zero: bool,
}

impl<T: Real> HSweep<T> {
    /// `values` must be in decreasing `h`; ties go to the smaller `h`.
    pub fn from_values(values: Vec<(T, T)>) -> Self {
        let mut best = 0;
        for (i, &(_, v)) in values.iter().enumerate() {
            if v >= values[best].1 {
                best = i;
            }
        }
        let (argmax, sup) = values.get(best).copied().unwrap_or((T::zero(), T::zero()));
        let last = values.len().saturating_sub(1);
        let sup_possibly_at_zero = values.len() >= 2 && best == last && values[last].1 > values[last - 1].1;
        Self { values, sup, argmax, sup_possibly_at_zero }
    }
}

/// `||Delta_h^k f||_p` on a set of steps together with the running modulus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusCurve<T: Real> {
    pub k: usize,
    /// Steps, decreasing.
    pub h: Vec<T>,
    /// `||Delta_{h_i}^k f||_p`.
    pub norms: Vec<T>,
    /// `omega_k(f, h_i)_p = max_{h_j <= h_i} norms_j`.
    pub omega: Vec<T>,
}

impl<T: Real> ModulusCurve<T> {
    pub fn from_norms(k: usize, h: Vec<T>, norms: Vec<T>) -> Self {
        let mut omega = norms.clone();
        for i in (0..omega.len().saturating_sub(1)).rev() {
            omega[i] = omega[i].max(omega[i + 1]);
        }
        Self { k, h, norms, omega }
    }

    fn index_at(&self, t: T) -> Result<usize> {
        let tol = T::one() + T::lit(1e-12);
        let h_min = *self.h.last().ok_or(Error::EmptySamples)?;
        if !(t > T::zero()) || t * tol < h_min {
            return Err(Error::ScaleBelowGrid { t: t.to_f64_lossy(), h_min: h_min.to_f64_lossy() });
        }
        Ok(self.h.iter().position(|&h| h <= t * tol).expect("t >= h_min"))
    }

    /// `omega_k(f, t)_p` over the steps `<= t`.
    pub fn omega_at(&self, t: T) -> Result<T> {
        Ok(self.omega[self.index_at(t)?])
    }

    /// `sup_{h <= delta} omega_k(f, h)_p / h^alpha`.
    pub fn theta_sweep(&self, alpha: T, delta: T) -> Result<HSweep<T>> {
        let start = self.index_at(delta)?;
        let values = (start..self.h.len()).map(|i| (self.h[i], self.omega[i] / self.h[i].powf(alpha))).collect();
        Ok(HSweep::from_values(values))
    }
}

/// `||Delta_h^k f||_p` sampled on `grid`.
pub fn difference_norm<T: Real>(
    f: &PeriodicFn<T>,
    h: T,
    k: usize,
    spec: &QuasiNormSpec<T>,
    grid: &UniformGrid<T>,
) -> Result<T> {
    lp_norm(&f.difference(h, k).sample_shifted(grid, T::zero())?, spec)
}

/// Modulus curve of `f` over the h-grid steps `<= t_max`.
pub fn modulus_curve<T: Real>(
    f: &PeriodicFn<T>,
    k: usize,
    t_max: T,
    spec: &QuasiNormSpec<T>,
    disc: &Discretization<T>,
) -> Result<ModulusCurve<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("difference order k must be at least 1".into()));
    }
    let hs = disc.h.truncated(t_max)?.to_vec();
    let norms = hs
        .par_iter()
        .map(|&h| difference_norm(f, h, k, spec, &disc.x))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModulusCurve::from_norms(k, hs, norms))
}

/// `omega_k(f, t)_p = sup_{0 < delta <= t} ||Delta_delta^k f||_p` on the h-grid.
pub fn omega<T: Real>(f: &PeriodicFn<T>, k: usize, t: T, spec: &QuasiNormSpec<T>, disc: &Discretization<T>) -> Result<T> {
    modulus_curve(f, k, t, spec, disc)?.omega_at(t)
}

/// `theta_{k,alpha}(f, delta)_p = sup_{0 < h <= delta} omega_k(f, h)_p / h^alpha`.
pub fn theta<T: Real>(
    f: &PeriodicFn<T>,
    k: usize,
    alpha: T,
    delta: T,
    spec: &QuasiNormSpec<T>,
    disc: &Discretization<T>,
) -> Result<HSweep<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    modulus_curve(f, k, delta, spec, disc)?.theta_sweep(alpha, delta)
}

/// `psi_{k,r,alpha}(f, delta)_p = sup_{0 < h <= delta} omega_k(Delta_h^r f, delta)_p / h^alpha`.
pub fn psi<T: Real>(
    f: &PeriodicFn<T>,
    k: usize,
    r: usize,
    alpha: T,
    delta: T,
    spec: &QuasiNormSpec<T>,
    disc: &Discretization<T>,
) -> Result<HSweep<T>> {
    check_alpha(alpha, r)?;
    if k == 0 {
        return Err(Error::InvalidParameter("difference order k must be at least 1".into()));
    }
    let hs = disc.h.truncated(delta)?.to_vec();
    let values = hs
        .par_iter()
        .map(|&h| {
            let g = f.difference(h, r);
            let mut best = T::zero();
            for &d in &hs {
                best = best.max(difference_norm(&g, d, k, spec, &disc.x)?);
            }
            Ok((h, best / h.powf(alpha)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HSweep::from_values(values))
}

fn check_alpha<T: Real>(alpha: T, r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidParameter("difference order r must be at least 1".into()));
    }
    if !(alpha > T::zero() && alpha <= T::from_usize_lossy(r)) {
        return Err(Error::AlphaOutOfRange { alpha: alpha.to_f64_lossy(), r });
    }
    Ok(())
}

/// The triple `(p, r, alpha)` of a Hölder space, with `0 < alpha <= r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderSpec<T: Real> {
    pub p: QuasiNormSpec<T>,
    pub r: usize,
    pub alpha: T,
    /// Upper end of the h-sweep.
    pub h_max: T,
}

impl<T: Real> HolderSpec<T> {
    pub fn new(p: QuasiNormSpec<T>, r: usize, alpha: T) -> Result<Self> {
        check_alpha(alpha, r)?;
        Ok(Self { p, r, alpha, h_max: T::two_pi() })
    }

    pub fn with_h_max(mut self, h_max: T) -> Result<Self> {
        if !(h_max > T::zero()) {
            return Err(Error::InvalidParameter(format!("h_max must be positive, got {h_max}")));
        }
        self.h_max = h_max;
        Ok(self)
    }

    /// Bound `h_max^{-alpha} 2^{r/p1} ||f||_p` on the ratio for steps beyond `h_max`.
    pub fn tail_bound(&self, norm: T) -> T {
        self.h_max.powf(-self.alpha) * T::lit(2.0).powf(T::from_usize_lossy(self.r) / self.p.p1()) * norm
    }
}

/// Hölder seminorm with its sweep and the bound on the truncated part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderValue<T: Real> {
    pub value: T,
    pub sweep: HSweep<T>,
    /// Bound on `omega_r(f,h)_p / h^alpha` for `h > h_max`.
    pub tail_bound: T,
}

/// `sup_{h_min <= h <= h_max} omega_r(f, h)_p / h^alpha`.
pub fn holder_seminorm<T: Real>(f: &PeriodicFn<T>, hs: &HolderSpec<T>, disc: &Discretization<T>) -> Result<HolderValue<T>> {
    let sweep = modulus_curve(f, hs.r, hs.h_max, &hs.p, disc)?.theta_sweep(hs.alpha, hs.h_max)?;
    let norm = fn_norm(f, &disc.x, &hs.p)?;
    Ok(HolderValue { value: sweep.sup, tail_bound: hs.tail_bound(norm), sweep })
}

/// `||f||_p + |f|_{H_p^{r,alpha}}`.
pub fn holder_norm<T: Real>(f: &PeriodicFn<T>, hs: &HolderSpec<T>, disc: &Discretization<T>) -> Result<T> {
    Ok(fn_norm(f, &disc.x, &hs.p)? + holder_seminorm(f, hs, disc)?.value)
}

/// `|| ||F(., lambda)||_{p,x} ||_{p,lambda}` from per-lambda samples.
pub fn averaged_lp_norm<T: Real>(per_lambda: &[Vec<Complex<T>>], spec: &QuasiNormSpec<T>) -> Result<T> {
    if per_lambda.is_empty() {
        return Err(Error::EmptySamples);
    }
    let inner = per_lambda.iter().map(|v| lp_norm(v, spec)).collect::<Result<Vec<_>>>()?;
    Ok(spec.norm_real(&inner))
}

/// Averaged norm of `F(x, lambda)` on the x-grid and the lambda nodes of `disc`.
pub fn averaged_lp_norm_fn<T: Real>(
    f: impl Fn(T, T) -> Complex<T> + Sync,
    spec: &QuasiNormSpec<T>,
    disc: &Discretization<T>,
) -> Result<T> {
    let xs = disc.x.nodes();
    let rows: Vec<Vec<Complex<T>>> = disc
        .lambda_nodes()
        .into_par_iter()
        .map(|l| xs.iter().map(|&x| f(x, l)).collect())
        .collect();
    averaged_lp_norm(&rows, spec)
}

/// Error of a family of approximants `T_lambda` (one per lambda node) in the averaged Hölder norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyError<T: Real> {
    /// `||f - L_{n,lambda} f||_{p-bar}`.
    pub lp_part: T,
    /// `sup_h ||Delta_h^r (f - L_{n,lambda} f)||_{p-bar} / h^alpha`.
    pub seminorm: HSweep<T>,
    pub value: T,
}

/// Averaged Hölder error `||f - L_{n,lambda} f||_{p-bar} + sup_h h^{-alpha} ||Delta_h^r (f - L_{n,lambda} f)||_{p-bar}`.
pub fn family_holder_error<T: Real>(
    f: &PeriodicFn<T>,
    means: &[TrigPoly<T>],
    hs: &HolderSpec<T>,
    disc: &Discretization<T>,
) -> Result<FamilyError<T>> {
    if means.is_empty() {
        return Err(Error::EmptySamples);
    }
    let grid = &disc.x;
    let spec = &hs.p;
    let averaged_at = |step: Option<T>| -> Result<T> {
        let g = match step {
            Some(h) => f.difference(h, hs.r),
            None => f.clone(),
        };
        let fs = g.sample_shifted(grid, T::zero())?;
        let inner = means
            .iter()
            .map(|t| {
                let poly = match step {
                    Some(h) => t.map_multiplier(|nu| crate::spectral::difference_multiplier(nu, h, hs.r)),
                    None => t.clone(),
                };
                let ts = poly.sample(grid, T::zero());
                let diff: Vec<_> = fs.iter().zip(&ts).map(|(a, b)| a - b).collect();
                lp_norm(&diff, spec)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(spec.norm_real(&inner))
    };
    let lp_part = averaged_at(None)?;
    let steps = disc.h.truncated(hs.h_max)?.to_vec();
    let values = steps
        .par_iter()
        .map(|&h| Ok((h, averaged_at(Some(h))? / h.powf(hs.alpha))))
        .collect::<Result<Vec<_>>>()?;
    let seminorm = HSweep::from_values(values);
    Ok(FamilyError { lp_part, value: lp_part + seminorm.sup, seminorm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn disc(m: usize) -> Discretization<f64> {
        Discretization::with_grid_size(m).unwrap()
    }

    fn expi(mu: i64) -> PeriodicFn<f64> {
        PeriodicFn::sparse(format!("e^{mu}ix"), vec![(mu, c(1.0))])
    }

    fn cosx() -> PeriodicFn<f64> {
        PeriodicFn::closed("cosx", true, |x: f64| c(x.cos()))
    }

    #[test]
    fn norm_examples() {
        let grid = UniformGrid::new(1024).unwrap();
        for p in [0.3, 0.5, 1.0, 2.0, 3.7] {
            let spec = QuasiNormSpec::new(p).unwrap();
            assert!((fn_norm(&expi(1), &grid, &spec).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((fn_norm(&expi(1), &grid, &QuasiNormSpec::infinity()).unwrap() - 1.0).abs() < 1e-12);
        let two = QuasiNormSpec::new(2.0).unwrap();
        assert!((fn_norm(&cosx(), &grid, &two).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let one = QuasiNormSpec::new(1.0).unwrap();
        assert!((fn_norm(&cosx(), &grid, &one).unwrap() - 2.0 / PI).abs() < 1e-5);
        assert!(lp_norm::<f64>(&[], &one).is_err());
        assert!(matches!(lp_norm(&[c(1.0), c(f64::INFINITY)], &one), Err(Error::NonFinite { node: 1, .. })));
        assert!(QuasiNormSpec::new(0.0).is_err());
        assert!(QuasiNormSpec::new(-1.0).is_err());
    }

    #[test]
    fn difference_examples() {
        let grid = UniformGrid::new(256).unwrap();
        let konst = PeriodicFn::closed("3", true, |_| c(3.0));
        for k in 1..4 {
            let d = finite_difference(&konst, 0.7, k).unwrap().sample_shifted(&grid, 0.0).unwrap();
            assert!(d.iter().all(|v| v.norm() < 1e-12));
        }
        let sin = PeriodicFn::closed("sin", true, |x: f64| c(x.sin()));
        let d = finite_difference(&sin, PI, 1).unwrap();
        for x in [0.0, 0.4, 1.9, 5.0] {
            assert!((d.eval(x) - c(2.0 * x.sin())).norm() < 1e-12);
        }
        assert!(finite_difference(&sin, 1.0, 0).is_err());
    }

    #[test]
    fn difference_norm_of_exponential() {
        let grid = UniformGrid::new(512).unwrap();
        let closed = PeriodicFn::closed("e^3ix", false, |x: f64| cis(3.0 * x));
        for p in [0.5, 1.0, 2.0, f64::INFINITY] {
            let spec = QuasiNormSpec::new(p).unwrap();
            for k in 1..4 {
                for h in [0.01, 0.3, 1.7] {
                    let want = (2.0 * (1.5 * h).sin().abs()).powi(k as i32);
                    let a = difference_norm(&expi(3), h, k, &spec, &grid).unwrap();
                    let b = difference_norm(&closed, h, k, &spec, &grid).unwrap();
                    assert!((a - want).abs() < 1e-10 * want.max(1.0), "{a} vs {want}");
                    assert!((b - want).abs() < 1e-10 * want.max(1.0), "{b} vs {want}");
                }
            }
        }
    }

    #[test]
    fn hgrid_shape() {
        let g = HGrid::<f64>::default();
        assert_eq!(g.len(), 129);
        assert!((g.h_max() - 2.0 * PI).abs() < 1e-14);
        assert!((g.h_min() - 2.0 * PI * 1e-4).abs() < 1e-16);
        assert!(g.values().windows(2).all(|w| w[0] > w[1]));
        assert!(g.first_at_most(1e-5).is_err());
        assert_eq!(g.truncated(100.0).unwrap().len(), 129);

        let grid = UniformGrid::<f64>::new(256).unwrap();
        let s = g.snapped_to(&grid);
        assert!(s.values().windows(2).all(|w| w[0] > w[1]));
        assert!((s.h_max() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(s.h_min(), grid.spacing());
        for &h in s.values() {
            let m = h / grid.spacing();
            assert!((m - m.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn omega_examples() {
        let d = disc(1024);
        let spec2 = QuasiNormSpec::new(2.0).unwrap();
        let konst = PeriodicFn::closed("1", true, |_| c(1.0));
        assert_eq!(omega(&konst, 2, 0.5, &spec2, &d).unwrap(), 0.0);

        let sin = PeriodicFn::closed("sin", true, |x: f64| c(x.sin()));
        for t in [0.01, 0.3, 1.0, 3.0] {
            let h = d.h.values()[d.h.first_at_most(t).unwrap()];
            let want = 2f64.sqrt() * (h / 2.0).sin();
            assert!((omega(&sin, 1, t, &spec2, &d).unwrap() - want).abs() < 1e-12);
        }
        assert!(matches!(omega(&sin, 1, 1e-6, &spec2, &d), Err(Error::ScaleBelowGrid { .. })));
    }

    #[test]
    fn theta_of_exponential_tends_to_one() {
        let d = disc(1024);
        for p in [0.5, 2.0, f64::INFINITY] {
            let spec = QuasiNormSpec::new(p).unwrap();
            let s = theta(&expi(1), 1, 1.0, 1.0, &spec, &d).unwrap();
            let h = d.h.h_min();
            assert!((s.sup - 2.0 * (h / 2.0).sin() / h).abs() < 1e-10);
            assert!(s.sup > 1.0 - 1e-7);
            assert_eq!(s.argmax, h);
            assert!(s.sup_possibly_at_zero);
        }
        let konst = PeriodicFn::closed("1", true, |_| c(1.0));
        let s = theta(&konst, 2, 0.5, 1.0, &QuasiNormSpec::new(1.0).unwrap(), &d).unwrap();
        assert_eq!(s.sup, 0.0);
        assert!(!s.sup_possibly_at_zero);
    }

    #[test]
    fn psi_matches_double_loop_on_polynomial() {
        let d = disc(256);
        let t = TrigPoly::from_fn(6, |nu| Complex::new(1.0 / (1.0 + (nu * nu) as f64), 0.2 * nu as f64));
        let f = t.to_fn("t");
        let spec = QuasiNormSpec::new(0.7).unwrap();
        let delta = 1.0 / 6.0;
        let got = psi(&f, 2, 1, 0.5, delta, &spec, &d).unwrap();
        // Oracle: evaluate the double difference pointwise from the coefficients.
        let hs = d.h.truncated(delta).unwrap();
        let xs = d.x.nodes();
        let mut want = 0.0f64;
        for &h in hs {
            for &dd in hs {
                let vals: Vec<Complex<f64>> = xs
                    .iter()
                    .map(|&x| {
                        let e = |y: f64| t.eval(y);
                        let d1 = |y: f64| e(y) - e(y + h);
                        d1(x) - d1(x + dd) * 2.0 + d1(x + 2.0 * dd)
                    })
                    .collect();
                want = want.max(spec.norm_unchecked(&vals) / h.sqrt());
            }
        }
        assert!((got.sup - want).abs() < 1e-10 * want.max(1.0), "{} vs {}", got.sup, want);
        assert!(psi(&f, 2, 1, 1.5, delta, &spec, &d).is_err());
    }

    #[test]
    fn holder_examples() {
        let d = disc(1024);
        let konst = PeriodicFn::closed("2", true, |_| c(2.0));
        for p in [0.5, 1.0, f64::INFINITY] {
            let hs = HolderSpec::new(QuasiNormSpec::new(p).unwrap(), 1, 1.0).unwrap();
            assert_eq!(holder_seminorm(&konst, &hs, &d).unwrap().value, 0.0);
            assert!((holder_norm(&konst, &hs, &d).unwrap() - 2.0).abs() < 1e-12);
            let e = holder_norm(&expi(1), &hs, &d).unwrap();
            assert!((e - 2.0).abs() < 1e-7, "{e}");
        }
        let hs = HolderSpec::new(QuasiNormSpec::new(1.0).unwrap(), 1, 2.0);
        assert!(matches!(hs, Err(Error::AlphaOutOfRange { r: 1, .. })));
        let hs = HolderSpec::new(QuasiNormSpec::new(0.5).unwrap(), 2, 1.0).unwrap();
        assert!((hs.tail_bound(1.0) - 16.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn averaged_norm_examples() {
        let d = disc(256);
        let two = QuasiNormSpec::new(2.0).unwrap();
        let a = averaged_lp_norm_fn(|x: f64, l: f64| c(x.cos() * l.cos()), &two, &d).unwrap();
        assert!((a - 0.5).abs() < 1e-12);
        let b = averaged_lp_norm_fn(|x: f64, l: f64| cis(x + l), &QuasiNormSpec::new(0.5).unwrap(), &d).unwrap();
        assert!((b - 1.0).abs() < 1e-12);
        let one = QuasiNormSpec::new(1.0).unwrap();
        let flat = averaged_lp_norm_fn(|x: f64, _| c(x.cos()), &one, &d).unwrap();
        assert!((flat - fn_norm(&cosx(), &d.x, &one).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn family_error_reduces_to_single_operator() {
        let d = Discretization::new(UniformGrid::new(256).unwrap(), HGrid::new(1e-3, 2.0 * PI, 8).unwrap(), 8);
        let hs = HolderSpec::new(QuasiNormSpec::new(1.0).unwrap(), 1, 0.5).unwrap();
        let f = cosx();
        let t = TrigPoly::from_fn(1, |nu| if nu == 0 { c(0.1) } else { c(0.3) });
        let fam = family_holder_error(&f, &vec![t.clone(); 8], &hs, &d).unwrap();
        let e = f.sub_poly(&t);
        let single = holder_norm(&e, &hs, &d).unwrap();
        assert!((fam.value - single).abs() < 1e-12);
        let own = TrigPoly::from_fn(1, |nu| if nu == 0 { c(0.0) } else { c(0.5) });
        let zero = family_holder_error(&f, &[own], &hs, &d).unwrap();
        assert!(zero.value < 1e-12);
    }
}

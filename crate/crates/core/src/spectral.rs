//! Periodic functions, trigonometric polynomials and uniform-grid sampling.
//!
//! Functions are evaluator-first: a [`PeriodicFn`] is a lazily composed
//! expression (closed-form evaluators, finite spectra, shifted differences,
//! linear combinations). Sampling a sub-expression with a finite spectrum goes
//! through the FFT with exact frequency folding, everything else is evaluated
//! pointwise at the shifted nodes. Nothing is ever interpolated.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, creal, czero, Complex, Real};

/// Default grid size for polynomial degree `n`: `max(1024, 16 (n + 1))`.
pub fn default_grid_size(n: usize) -> usize {
    1024.max(16 * (n + 1))
}

/// Uniform grid `x_j = 2 pi j / M` with cached FFT plans of length `M`.
#[derive(Clone)]
pub struct UniformGrid<T: Real> {
    size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for UniformGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UniformGrid").field("size", &self.size).finish()
    }
}

impl<T: Real> UniformGrid<T> {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("grid size M must be at least 1".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        })
    }

    /// Grid sized by [`default_grid_size`].
    pub fn for_degree(n: usize) -> Self {
        Self::new(default_grid_size(n)).expect("nonzero grid size")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> T {
        T::two_pi() / T::from_usize_lossy(self.size)
    }

    pub fn node(&self, j: usize) -> T {
        T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(self.size)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.size).map(|j| self.node(j)).collect()
    }

    /// In-place `X_k = sum_j x_j e^{-2 pi i jk/M}` (unnormalized).
    pub(crate) fn forward_in_place(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.size);
        self.forward.process(buf);
    }

    /// In-place `x_j = sum_k X_k e^{2 pi i jk/M}` (unnormalized).
    pub(crate) fn inverse_in_place(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.size);
        self.inverse.process(buf);
    }

    /// Bin of frequency `nu` in an FFT of this length.
    #[inline]
    pub(crate) fn bin(&self, nu: i64) -> usize {
        nu.rem_euclid(self.size as i64) as usize
    }

    /// Discrete Fourier coefficients `(1/M) sum_j v_j e^{-i k x_j}` for every bin.
    pub fn dft(&self, values: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = values.to_vec();
        self.forward_in_place(&mut buf);
        let scale = T::one() / T::from_usize_lossy(self.size);
        buf.iter_mut().for_each(|c| *c = *c * scale);
        buf
    }

    /// Values at `x_j + shift` of the finite trigonometric sum `terms`.
    ///
    /// Frequencies above the Nyquist limit are folded, which is exact for
    /// point values on the grid.
    pub fn synthesize(&self, terms: &[(i64, Complex<T>)], shift: T) -> Vec<Complex<T>> {
        let mut buf = vec![czero(); self.size];
        for &(nu, c) in terms {
            let phase = if shift.is_zero() { creal(T::one()) } else { cis(T::from_i64(nu).unwrap() * shift) };
            buf[self.bin(nu)] = buf[self.bin(nu)] + c * phase;
        }
        self.inverse_in_place(&mut buf);
        buf
    }
}

/// Trigonometric polynomial `sum_{|nu| <= n} c_nu e^{i nu x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly<T: Real> {
    degree: usize,
    coeffs: Vec<Complex<T>>,
}

/// JSON form `{"degree": n, "re": [...], "im": [...]}`, coefficients ordered from `-n` to `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolyJson {
    pub degree: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl<T: Real> TrigPoly<T> {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coeffs: vec![czero(); 2 * degree + 1] }
    }

    pub fn constant(degree: usize, c: Complex<T>) -> Self {
        let mut t = Self::zero(degree);
        t.coeffs[degree] = c;
        t
    }

    /// `c e^{i nu x}` embedded in degree `max(degree, |nu|)`.
    pub fn monomial(degree: usize, nu: i64, c: Complex<T>) -> Self {
        let mut t = Self::zero(degree.max(nu.unsigned_abs() as usize));
        t.set_coeff(nu, c);
        t
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(Error::InvalidParameter(format!(
                "degree {degree} needs {} coefficients, got {}",
                2 * degree + 1,
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn from_fn(degree: usize, mut coeff: impl FnMut(i64) -> Complex<T>) -> Self {
        let n = degree as i64;
        Self { degree, coeffs: (-n..=n).map(&mut coeff).collect() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients ordered from `-n` to `n`.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `c_nu`, zero outside `|nu| <= n`.
    pub fn coeff(&self, nu: i64) -> Complex<T> {
        if nu.unsigned_abs() as usize > self.degree {
            czero()
        } else {
            self.coeffs[(nu + self.degree as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, nu: i64, c: Complex<T>) {
        assert!(nu.unsigned_abs() as usize <= self.degree, "frequency {nu} exceeds degree {}", self.degree);
        let idx = (nu + self.degree as i64) as usize;
        self.coeffs[idx] = c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        let n = self.degree as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - n, c))
    }

    /// Exact evaluation by Horner's rule in `z = e^{ix}`.
    pub fn eval(&self, x: T) -> Complex<T> {
        let z = cis(x);
        let mut acc: Complex<T> = czero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * cis(-T::from_usize_lossy(self.degree) * x)
    }

    /// `T(x + h)` from the coefficients.
    pub fn eval_shifted(&self, x: T, h: T) -> Complex<T> {
        let z = cis(x);
        let w = cis(h);
        let n = self.degree as i64;
        let mut acc: Complex<T> = czero();
        let mut wk = cis(-T::from_i64(n).unwrap() * h);
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            terms.push(c * wk);
            wk = wk * w;
        }
        for &c in terms.iter().rev() {
            acc = acc * z + c;
        }
        acc * cis(-T::from_i64(n).unwrap() * x)
    }

    /// `T^{(r)}`: coefficients `(i nu)^r c_nu`.
    pub fn derivative(&self, r: usize) -> Self {
        let factor = |nu: i64| Complex::new(T::zero(), T::from_i64(nu).unwrap()).powu(r as u32);
        Self::from_fn(self.degree, |nu| self.coeff(nu) * factor(nu))
    }

    /// Copy with degree `m`, dropping coefficients above `m` when shrinking.
    pub fn with_degree(&self, m: usize) -> Self {
        Self::from_fn(m, |nu| self.coeff(nu))
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|&c| c * a).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.degree.max(other.degree);
        Self::from_fn(m, |nu| self.coeff(nu) + other.coeff(nu))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.degree.max(other.degree);
        Self::from_fn(m, |nu| self.coeff(nu) - other.coeff(nu))
    }

    /// Multiplies every coefficient by `m(nu)`.
    pub fn map_multiplier(&self, m: impl Fn(i64) -> Complex<T>) -> Self {
        Self::from_fn(self.degree, |nu| self.coeff(nu) * m(nu))
    }

    /// Largest coefficient deviation from `other` (after embedding both).
    pub fn coeff_distance(&self, other: &Self) -> T {
        let m = self.degree.max(other.degree) as i64;
        (-m..=m).map(|nu| (self.coeff(nu) - other.coeff(nu)).norm()).fold(T::zero(), T::max)
    }

    /// `true` when `c_{-nu} = conj(c_nu)` within `tol`.
    pub fn is_real(&self, tol: T) -> bool {
        let n = self.degree as i64;
        (0..=n).all(|nu| (self.coeff(-nu) - self.coeff(nu).conj()).norm() <= tol)
    }

    /// Projection onto real-valued polynomials.
    pub fn real_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.degree, |nu| (self.coeff(nu) + self.coeff(-nu).conj()) * half)
    }

    /// Values at the nodes of `grid`, shifted by `shift`.
    pub fn sample(&self, grid: &UniformGrid<T>, shift: T) -> Vec<Complex<T>> {
        let terms: Vec<_> = self.terms().collect();
        grid.synthesize(&terms, shift)
    }

    pub fn to_fn(&self, label: impl Into<String>) -> PeriodicFn<T> {
        PeriodicFn::from_poly(label, self)
    }

    pub fn to_json(&self) -> TrigPolyJson {
        TrigPolyJson {
            degree: self.degree,
            re: self.coeffs.iter().map(|c| c.re.to_f64_lossy()).collect(),
            im: self.coeffs.iter().map(|c| c.im.to_f64_lossy()).collect(),
        }
    }

    pub fn from_json(json: &TrigPolyJson) -> Result<Self> {
        if json.re.len() != json.im.len() {
            return Err(Error::InvalidParameter("re and im arrays differ in length".into()));
        }
        let coeffs = json.re.iter().zip(&json.im).map(|(&a, &b)| Complex::new(T::lit(a), T::lit(b))).collect();
        Self::from_coeffs(json.degree, coeffs)
    }
}

impl<T: Real> Serialize for TrigPoly<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for TrigPoly<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = TrigPolyJson::deserialize(deserializer)?;
        Self::from_json(&json).map_err(serde::de::Error::custom)
    }
}

/// `T^{(r)}` for `r >= 1`.
pub fn poly_derivative<T: Real>(poly: &TrigPoly<T>, r: usize) -> Result<TrigPoly<T>> {
    if r == 0 {
        return Err(Error::InvalidParameter("derivative order must be at least 1".into()));
    }
    Ok(poly.derivative(r))
}

/// `T(x + h)` computed from the coefficients.
pub fn poly_eval_shifted<T: Real>(poly: &TrigPoly<T>, x: T, h: T) -> Complex<T> {
    poly.eval_shifted(x, h)
}

/// Multiplier of the forward difference: `(1 - e^{i nu h})^k`.
#[inline]
pub fn difference_multiplier<T: Real>(nu: i64, h: T, k: usize) -> Complex<T> {
    (creal(T::one()) - cis(T::from_i64(nu).unwrap() * h)).powu(k as u32)
}

/// `(-1)^nu C(k, nu)` for `nu = 0..=k`.
pub fn difference_weights<T: Real>(k: usize) -> Vec<T> {
    let mut w = Vec::with_capacity(k + 1);
    let mut binom = 1.0f64;
    for nu in 0..=k {
        let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
        w.push(T::lit(sign * binom));
        binom = binom * (k - nu) as f64 / (nu + 1) as f64;
    }
    w
}

pub type Evaluator<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;

/// Exact Fourier coefficients attached to a closed-form function.
#[derive(Clone)]
pub enum Coeffs<T: Real> {
    /// Finitely supported spectrum.
    Sparse(Vec<(i64, Complex<T>)>),
    /// Infinite spectrum given by a formula `nu -> c_nu`.
    Formula(Arc<dyn Fn(i64) -> Complex<T> + Send + Sync>),
}

impl<T: Real> Coeffs<T> {
    pub fn coeff(&self, nu: i64) -> Complex<T> {
        match self {
            Coeffs::Sparse(terms) => terms.iter().filter(|(k, _)| *k == nu).map(|(_, c)| *c).fold(czero(), |a, b| a + b),
            Coeffs::Formula(f) => f(nu),
        }
    }
}

enum Node<T: Real> {
    Closed {
        eval: Evaluator<T>,
        coeffs: Option<Coeffs<T>>,
        real: bool,
    },
    Spectral {
        terms: Vec<(i64, Complex<T>)>,
        real: bool,
    },
    Diff {
        inner: PeriodicFn<T>,
        h: T,
        k: usize,
    },
    Combo {
        terms: Vec<(Complex<T>, PeriodicFn<T>)>,
    },
}

/// A 2 pi-periodic complex function.
#[derive(Clone)]
pub struct PeriodicFn<T: Real> {
    label: Arc<str>,
    node: Arc<Node<T>>,
}

impl<T: Real> fmt::Debug for PeriodicFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFn").field("label", &self.label).field("real", &self.is_real()).finish()
    }
}

fn merge_terms<T: Real>(acc: &mut BTreeMap<i64, Complex<T>>, terms: &[(i64, Complex<T>)], scale: Complex<T>) {
    for &(nu, c) in terms {
        let e = acc.entry(nu).or_insert_with(czero);
        *e = *e + c * scale;
    }
}

fn spectrum_is_real<T: Real>(terms: &[(i64, Complex<T>)]) -> bool {
    let mut map = BTreeMap::new();
    merge_terms(&mut map, terms, creal(T::one()));
    let tol = T::epsilon().sqrt() * map.values().map(|c| c.norm()).fold(T::zero(), T::max).max(T::one());
    map.iter().all(|(&nu, &c)| {
        let mirror = map.get(&-nu).copied().unwrap_or_else(czero);
        (mirror - c.conj()).norm() <= tol
    })
}

impl<T: Real> PeriodicFn<T> {
    /// Closed-form evaluator without attached spectrum.
    pub fn closed(label: impl Into<String>, real: bool, eval: impl Fn(T) -> Complex<T> + Send + Sync + 'static) -> Self {
        Self::closed_with_coeffs(label, real, eval, None)
    }

    pub fn closed_with_coeffs(
        label: impl Into<String>,
        real: bool,
        eval: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
        coeffs: Option<Coeffs<T>>,
    ) -> Self {
        Self {
            label: Arc::from(label.into()),
            node: Arc::new(Node::Closed { eval: Arc::new(eval), coeffs, real }),
        }
    }

    /// Finite trigonometric sum `sum c_nu e^{i nu x}`.
    pub fn sparse(label: impl Into<String>, terms: Vec<(i64, Complex<T>)>) -> Self {
        let real = spectrum_is_real(&terms);
        Self { label: Arc::from(label.into()), node: Arc::new(Node::Spectral { terms, real }) }
    }

    pub fn from_poly(label: impl Into<String>, poly: &TrigPoly<T>) -> Self {
        let terms = poly.terms().filter(|(_, c)| !c.is_zero()).collect();
        Self::sparse(label, terms)
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::sparse(format!("const({})", c.re), vec![(0, c)])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same function under a different label.
    pub fn relabel(&self, label: impl Into<String>) -> Self {
        Self { label: Arc::from(label.into()), node: Arc::clone(&self.node) }
    }

    pub fn is_real(&self) -> bool {
        match &*self.node {
            Node::Closed { real, .. } | Node::Spectral { real, .. } => *real,
            Node::Diff { inner, .. } => inner.is_real(),
            Node::Combo { terms } => terms.iter().all(|(a, f)| a.im.is_zero() && f.is_real()),
        }
    }

    pub fn eval(&self, x: T) -> Complex<T> {
        match &*self.node {
            Node::Closed { eval, .. } => eval(x),
            Node::Spectral { terms, .. } => {
                terms.iter().fold(czero(), |acc, &(nu, c)| acc + c * cis(T::from_i64(nu).unwrap() * x))
            }
            Node::Diff { inner, h, k } => difference_weights::<T>(*k)
                .into_iter()
                .enumerate()
                .fold(czero(), |acc, (nu, w)| acc + inner.eval(x + T::from_usize_lossy(nu) * *h) * w),
            Node::Combo { terms } => terms.iter().fold(czero(), |acc, (a, f)| acc + *a * f.eval(x)),
        }
    }

    /// Finite spectrum when every leaf of the expression has one.
    pub fn finite_coeffs(&self) -> Option<Vec<(i64, Complex<T>)>> {
        match &*self.node {
            Node::Closed { coeffs: Some(Coeffs::Sparse(t)), .. } => Some(t.clone()),
            Node::Closed { .. } => None,
            Node::Spectral { terms, .. } => Some(terms.clone()),
            Node::Diff { inner, h, k } => inner
                .finite_coeffs()
                .map(|t| t.into_iter().map(|(nu, c)| (nu, c * difference_multiplier(nu, *h, *k))).collect()),
            Node::Combo { terms } => {
                let mut acc = BTreeMap::new();
                for (a, f) in terms {
                    merge_terms(&mut acc, &f.finite_coeffs()?, *a);
                }
                Some(acc.into_iter().collect())
            }
        }
    }

    /// Exact Fourier coefficient `c_nu`, if known.
    pub fn exact_coeff(&self, nu: i64) -> Option<Complex<T>> {
        match &*self.node {
            Node::Closed { coeffs, .. } => coeffs.as_ref().map(|c| c.coeff(nu)),
            Node::Spectral { terms, .. } => {
                Some(terms.iter().filter(|(k, _)| *k == nu).map(|(_, c)| *c).fold(czero(), |a, b| a + b))
            }
            Node::Diff { inner, h, k } => inner.exact_coeff(nu).map(|c| c * difference_multiplier(nu, *h, *k)),
            Node::Combo { terms } => {
                let mut acc: Complex<T> = czero();
                for (a, f) in terms {
                    acc = acc + *a * f.exact_coeff(nu)?;
                }
                Some(acc)
            }
        }
    }

    pub fn has_exact_coeffs(&self) -> bool {
        self.exact_coeff(0).is_some()
    }

    /// `sum_nu (-1)^nu C(k,nu) f(x + nu h)`.
    ///
    /// Differences distribute over linear combinations, so that spectral parts
    /// of a combination stay spectral.
    pub fn difference(&self, h: T, k: usize) -> Self {
        let label = format!("D^{k}_{h}({})", self.label);
        if k == 0 {
            return self.relabel(label);
        }
        match &*self.node {
            Node::Spectral { terms, real } => {
                let terms = terms.iter().map(|&(nu, c)| (nu, c * difference_multiplier(nu, h, k))).collect();
                Self { label: Arc::from(label), node: Arc::new(Node::Spectral { terms, real: *real }) }
            }
            Node::Combo { terms } => {
                let terms = terms.iter().map(|(a, f)| (*a, f.difference(h, k))).collect();
                Self { label: Arc::from(label), node: Arc::new(Node::Combo { terms }) }
            }
            _ => Self {
                label: Arc::from(label),
                node: Arc::new(Node::Diff { inner: self.clone(), h, k }),
            },
        }
    }

    pub fn linear_combination(label: impl Into<String>, terms: Vec<(Complex<T>, PeriodicFn<T>)>) -> Self {
        Self { label: Arc::from(label.into()), node: Arc::new(Node::Combo { terms }) }
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        Self::linear_combination(format!("{}*{}", a, self.label), vec![(a, self.clone())])
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_combination(
            format!("{}-{}", self.label, other.label),
            vec![(creal(T::one()), self.clone()), (creal(-T::one()), other.clone())],
        )
    }

    /// `self - poly`.
    pub fn sub_poly(&self, poly: &TrigPoly<T>) -> Self {
        self.sub(&PeriodicFn::from_poly("T", poly))
    }

    /// Values at `x_j + shift`.
    pub fn sample_shifted(&self, grid: &UniformGrid<T>, shift: T) -> Result<Vec<Complex<T>>> {
        if let Some(terms) = self.finite_coeffs() {
            let out = grid.synthesize(&terms, shift);
            return self.check_finite(grid, shift, out);
        }
        match &*self.node {
            Node::Closed { eval, .. } => {
                let out = (0..grid.size()).map(|j| eval(grid.node(j) + shift)).collect();
                self.check_finite(grid, shift, out)
            }
            Node::Spectral { .. } => unreachable!("spectral nodes always have finite coefficients"),
            Node::Diff { inner, h, k } => {
                let mut acc = vec![czero(); grid.size()];
                for (nu, w) in difference_weights::<T>(*k).into_iter().enumerate() {
                    let part = inner.sample_shifted(grid, shift + T::from_usize_lossy(nu) * *h)?;
                    acc.iter_mut().zip(part).for_each(|(a, v)| *a = *a + v * w);
                }
                Ok(acc)
            }
            Node::Combo { terms } => {
                let mut spectral = BTreeMap::new();
                let mut acc = vec![czero(); grid.size()];
                for (a, f) in terms {
                    match f.finite_coeffs() {
                        Some(t) => merge_terms(&mut spectral, &t, *a),
                        None => {
                            let part = f.sample_shifted(grid, shift)?;
                            acc.iter_mut().zip(part).for_each(|(s, v)| *s = *s + *a * v);
                        }
                    }
                }
                if !spectral.is_empty() {
                    let terms: Vec<_> = spectral.into_iter().collect();
                    let part = grid.synthesize(&terms, shift);
                    acc.iter_mut().zip(part).for_each(|(s, v)| *s = *s + v);
                }
                Ok(acc)
            }
        }
    }

    fn check_finite(&self, grid: &UniformGrid<T>, shift: T, out: Vec<Complex<T>>) -> Result<Vec<Complex<T>>> {
        if let Some(j) = out.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite {
                label: self.label.to_string(),
                node: j,
                x: (grid.node(j) + shift).to_f64_lossy(),
                value: format!("{}", out[j]),
            });
        }
        Ok(out)
    }
}

/// Values of `f` at every grid node.
pub fn sample<T: Real>(f: &PeriodicFn<T>, grid: &UniformGrid<T>) -> Result<Vec<Complex<T>>> {
    f.sample_shifted(grid, T::zero())
}

/// Discrete Fourier coefficients `c_nu = (1/M) sum_j f(x_j) e^{-i nu x_j}` for `|nu| <= n`.
pub fn spectral_coeffs<T: Real>(f: &PeriodicFn<T>, n: usize, grid: &UniformGrid<T>) -> Result<TrigPoly<T>> {
    let required = 4 * (n + 1);
    if grid.size() < required {
        return Err(Error::GridTooSmall { size: grid.size(), degree: n, required });
    }
    let spectrum = grid.dft(&sample(f, grid)?);
    Ok(TrigPoly::from_fn(n, |nu| spectrum[grid.bin(nu)]))
}

/// Coefficients up to degree `n`: exact ones when the function carries them,
/// discrete ones from `grid` otherwise.
pub fn coeffs_up_to<T: Real>(f: &PeriodicFn<T>, n: usize, grid: &UniformGrid<T>) -> Result<TrigPoly<T>> {
    if f.has_exact_coeffs() {
        Ok(TrigPoly::from_fn(n, |nu| f.exact_coeff(nu).unwrap_or_else(czero)))
    } else {
        spectral_coeffs(f, n, grid)
    }
}

/// Max-abs of a sample vector.
pub fn max_abs<T: Real>(values: &[Complex<T>]) -> T {
    values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn sample_constant_and_roots_of_unity() {
        let grid = UniformGrid::<f64>::new(4).unwrap();
        let one = PeriodicFn::closed("one", true, |_| c(1.0, 0.0));
        assert!(sample(&one, &grid).unwrap().iter().all(|v| (*v - c(1.0, 0.0)).norm() < 1e-15));

        let e = PeriodicFn::closed("e^ix", false, |x: f64| cis(x));
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (v, w) in sample(&e, &grid).unwrap().iter().zip(want) {
            assert!((v - w).norm() < 1e-15);
        }
        let spectral = PeriodicFn::sparse("e^ix", vec![(1, c(1.0, 0.0))]);
        for (v, w) in sample(&spectral, &grid).unwrap().iter().zip(want) {
            assert!((v - w).norm() < 1e-15);
        }
    }

    #[test]
    fn sample_reports_offending_node() {
        let grid = UniformGrid::<f64>::new(8).unwrap();
        let f = PeriodicFn::closed("bad", true, |x: f64| c(if x > 3.0 { f64::NAN } else { 0.0 }, 0.0));
        match sample(&f, &grid) {
            Err(Error::NonFinite { node, label, .. }) => {
                assert_eq!(node, 4);
                assert_eq!(label, "bad");
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
        assert!(UniformGrid::<f64>::new(0).is_err());
    }

    #[test]
    fn spectral_coeffs_examples() {
        let grid = UniformGrid::<f64>::new(32).unwrap();
        let f = PeriodicFn::closed("e2", false, |x: f64| cis(2.0 * x));
        let t = spectral_coeffs(&f, 3, &grid).unwrap();
        for nu in -3..=3 {
            let want = if nu == 2 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            assert!((t.coeff(nu) - want).norm() < 1e-12);
        }

        let five = PeriodicFn::closed("5", true, |_| c(5.0, 0.0));
        let t = spectral_coeffs(&five, 3, &grid).unwrap();
        assert!((t.coeff(0) - c(5.0, 0.0)).norm() < 1e-12);
        assert!(t.terms().filter(|(nu, _)| *nu != 0).all(|(_, v)| v.norm() < 1e-12));

        let g = PeriodicFn::closed("cos+cos3", true, |x: f64| c(x.cos() + (3.0 * x).cos(), 0.0));
        let t = spectral_coeffs(&g, 3, &grid).unwrap();
        for nu in [-3, -1, 1, 3] {
            assert!((t.coeff(nu) - c(0.5, 0.0)).norm() < 1e-12);
        }
        for nu in [-2, 0, 2] {
            assert!(t.coeff(nu).norm() < 1e-12);
        }

        assert!(matches!(spectral_coeffs(&g, 8, &grid), Err(Error::GridTooSmall { required: 36, .. })));
    }

    #[test]
    fn derivative_examples() {
        let e = TrigPoly::monomial(1, 1, c(1.0, 0.0));
        let d = poly_derivative(&e, 1).unwrap();
        assert!((d.coeff(1) - c(0.0, 1.0)).norm() < 1e-15);

        let k = TrigPoly::constant(2, c(3.0, 0.0));
        for r in 1..4 {
            assert!(k.derivative(r).coeffs().iter().all(|v| v.norm() == 0.0));
        }

        // cos 2x -> -4 cos 2x
        let mut cos2 = TrigPoly::zero(2);
        cos2.set_coeff(2, c(0.5, 0.0));
        cos2.set_coeff(-2, c(0.5, 0.0));
        let d2 = cos2.derivative(2);
        assert!((d2.coeff(2) - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((d2.coeff(-2) - c(-2.0, 0.0)).norm() < 1e-14);
        assert!(poly_derivative(&cos2, 0).is_err());
    }

    #[test]
    fn shifted_evaluation() {
        let e = TrigPoly::monomial(1, 1, c(1.0, 0.0));
        assert!((poly_eval_shifted(&e, 0.0, PI) - c(-1.0, 0.0)).norm() < 1e-15);
        let mut cos1 = TrigPoly::zero(1);
        cos1.set_coeff(1, c(0.5, 0.0));
        cos1.set_coeff(-1, c(0.5, 0.0));
        assert!((poly_eval_shifted(&cos1, PI / 2.0, PI / 2.0) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn shifted_evaluation_matches_direct_sum() {
        // Oracle: term-by-term sum with independent cos/sin calls.
        let t = TrigPoly::from_fn(8, |nu| c((nu as f64 * 0.37).sin(), (nu as f64 * 1.3).cos() / (1.0 + nu.abs() as f64)));
        for i in 0..200 {
            let x = i as f64 * 0.0731;
            let h = 0.013 * i as f64;
            let direct: Complex<f64> = t.terms().map(|(nu, cn)| cn * cis(nu as f64 * (x + h))).sum();
            assert!((poly_eval_shifted(&t, x, h) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn json_shape() {
        let t = TrigPoly::from_fn(1, |nu| c(nu as f64, -(nu as f64)));
        let j = t.to_json();
        assert_eq!(j.degree, 1);
        assert_eq!(j.re, vec![-1.0, 0.0, 1.0]);
        assert_eq!(j.im, vec![1.0, 0.0, -1.0]);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(text, r#"{"degree":1,"re":[-1.0,0.0,1.0],"im":[1.0,-0.0,-1.0]}"#);
        let back: TrigPoly<f64> = TrigPoly::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.coeff_distance(&t), 0.0);
        assert!(TrigPoly::<f64>::from_coeffs(2, vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn difference_of_spectral_matches_pointwise() {
        let t = TrigPoly::from_fn(5, |nu| c(1.0 / (1.0 + (nu * nu) as f64), 0.1 * nu as f64));
        let f = t.to_fn("t");
        let closed = PeriodicFn::closed("t-closed", false, move |x| t.eval(x));
        let grid = UniformGrid::<f64>::new(64).unwrap();
        let a = sample(&f.difference(0.3, 3), &grid).unwrap();
        let b = sample(&closed.difference(0.3, 3), &grid).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn f32_grid_sampling() {
        let grid = UniformGrid::<f32>::new(16).unwrap();
        let t = TrigPoly::<f32>::monomial(2, 2, Complex::new(1.0, 0.0));
        let via_fft = t.sample(&grid, 0.0);
        for (j, v) in via_fft.iter().enumerate() {
            assert!((v - cis(2.0 * grid.node(j))).norm() < 1e-5);
        }
    }
}

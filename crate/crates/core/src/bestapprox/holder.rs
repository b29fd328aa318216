//! Best approximation in the Hölder norm `||e||_p + sup_h h^{-alpha} ||Delta_h^r e||_p`.
//!
//! The inner norms are smoothed with `(|u|^2 + eps^2)`, the supremum over the
//! h-grid by a log-sum-exp with temperature `tau`; both are lowered stage by
//! stage and each stage is minimized with limited-memory BFGS. The reported
//! value is always the exact grid Hölder norm of the returned polynomial.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::{perturb, rng_for, solve, ApproxResult, SolverBudget, Target};
use crate::error::Result;
use crate::moduli::{Discretization, HolderSpec};
use crate::scalar::{creal, czero, Complex, Real};
use crate::spectral::{difference_multiplier, PeriodicFn, TrigPoly};

const LBFGS_MEMORY: usize = 10;

/// One term of the objective: `weight * ||D - Delta_h^r T||` with multiplier `m_nu(h)`.
struct Term<T: Real> {
    /// Samples of `Delta_h^r f` (or `f` for the plain norm term).
    data: Vec<Complex<T>>,
    /// Multiplier per frequency of the approximating space.
    mult: Vec<Complex<T>>,
    /// `h^{-alpha}`, or 1 for the plain norm term.
    weight: T,
}

struct Problem<'a, T: Real> {
    target: &'a Target<'a, T>,
    hs: HolderSpec<T>,
    freqs: Vec<i64>,
    plain: Term<T>,
    steps: Vec<Term<T>>,
}

/// Real parameters to coefficients and back.
#[derive(Clone, Copy)]
enum Layout {
    /// Conjugate-symmetric: `Re c_0` (unless zero-mean), then `Re c_k, Im c_k`.
    Real { zero_mean: bool, n: usize },
    /// `Re c_nu, Im c_nu` for every frequency.
    Complex,
}

impl Layout {
    fn dim(&self, freqs: usize) -> usize {
        match *self {
            Layout::Real { zero_mean, n } => 2 * n + usize::from(!zero_mean),
            Layout::Complex => 2 * freqs,
        }
    }

    fn to_coeffs<T: Real>(&self, theta: &[T], freqs: &[i64]) -> Vec<Complex<T>> {
        match *self {
            Layout::Complex => theta.chunks(2).map(|c| Complex::new(c[0], c[1])).collect(),
            Layout::Real { zero_mean, .. } => {
                let off = usize::from(!zero_mean);
                freqs
                    .iter()
                    .map(|&nu| {
                        if nu == 0 {
                            creal(theta[0])
                        } else {
                            let k = nu.unsigned_abs() as usize;
                            let (re, im) = (theta[off + 2 * (k - 1)], theta[off + 2 * (k - 1) + 1]);
                            if nu > 0 {
                                Complex::new(re, im)
                            } else {
                                Complex::new(re, -im)
                            }
                        }
                    })
                    .collect()
            }
        }
    }

    fn from_coeffs<T: Real>(&self, c: &[Complex<T>], freqs: &[i64]) -> Vec<T> {
        match *self {
            Layout::Complex => c.iter().flat_map(|v| [v.re, v.im]).collect(),
            Layout::Real { zero_mean, n } => {
                let mut theta = vec![T::zero(); self.dim(freqs.len())];
                let off = usize::from(!zero_mean);
                for (&nu, v) in freqs.iter().zip(c) {
                    if nu == 0 {
                        theta[0] = v.re;
                    } else if nu > 0 {
                        let k = nu as usize;
                        debug_assert!(k <= n);
                        theta[off + 2 * (k - 1)] = v.re;
                        theta[off + 2 * (k - 1) + 1] = v.im;
                    }
                }
                theta
            }
        }
    }

    /// Chain rule from the complex gradient `dJ/dRe c + i dJ/dIm c` to `theta`.
    fn pull_back<T: Real>(&self, g: &[Complex<T>], freqs: &[i64]) -> Vec<T> {
        match *self {
            Layout::Complex => g.iter().flat_map(|v| [v.re, v.im]).collect(),
            Layout::Real { zero_mean, .. } => {
                let mut out = vec![T::zero(); self.dim(freqs.len())];
                let off = usize::from(!zero_mean);
                for (&nu, v) in freqs.iter().zip(g) {
                    if nu == 0 {
                        out[0] = out[0] + v.re;
                    } else {
                        let k = nu.unsigned_abs() as usize;
                        let i = off + 2 * (k - 1);
                        out[i] = out[i] + v.re;
                        out[i + 1] = if nu > 0 { out[i + 1] + v.im } else { out[i + 1] - v.im };
                    }
                }
                out
            }
        }
    }
}

/// Smoothed inner norm of `u`, with `q` such that `dN = -factor Re sum_nu dc_nu m_nu conj(FFT(q u)_nu)`.
fn smoothed_norm<T: Real>(u: &[Complex<T>], p: T, infinite: bool, eps2: T, tau: T) -> (T, Vec<T>, T) {
    let m = T::from_usize_lossy(u.len());
    if infinite {
        let s: Vec<T> = u.iter().map(|v| (v.norm_sqr() + eps2).sqrt()).collect();
        let smax = s.iter().copied().fold(T::zero(), T::max);
        let ex: Vec<T> = s.iter().map(|&v| ((v - smax) / tau).exp()).collect();
        let z: T = ex.iter().copied().sum();
        let value = smax + tau * z.ln();
        let q = ex.iter().zip(&s).map(|(&e, &sv)| e / z / sv).collect();
        (value, q, T::one())
    } else {
        let half = p / T::lit(2.0);
        let base: Vec<T> = u.iter().map(|v| v.norm_sqr() + eps2).collect();
        let sum: T = base.iter().map(|&b| b.powf(half)).sum();
        let value = (sum / m).powf(T::one() / p);
        let q = base.iter().map(|&b| b.powf(half - T::one())).collect();
        (value, q, value.powf(T::one() - p) / m)
    }
}

impl<'a, T: Real> Problem<'a, T> {
    fn new(target: &'a Target<'a, T>, hs: &HolderSpec<T>, disc: &Discretization<T>, f: &PeriodicFn<T>) -> Result<Self> {
        let freqs = target.freqs();
        let plain = Term { data: target.samples.clone(), mult: vec![creal(T::one()); freqs.len()], weight: T::one() };
        let steps = disc
            .h
            .truncated(hs.h_max)?
            .par_iter()
            .map(|&h| {
                Ok(Term {
                    data: f.difference(h, hs.r).sample_shifted(target.grid, T::zero())?,
                    mult: freqs.iter().map(|&nu| difference_multiplier(nu, h, hs.r)).collect(),
                    weight: h.powf(-hs.alpha),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { target, hs: *hs, freqs, plain, steps })
    }

    fn residual(&self, term: &Term<T>, c: &[Complex<T>]) -> Vec<Complex<T>> {
        let terms: Vec<(i64, Complex<T>)> = self.freqs.iter().zip(c).zip(&term.mult).map(|((&nu, &v), &m)| (nu, v * m)).collect();
        let t = self.target.grid.synthesize(&terms, T::zero());
        term.data.iter().zip(t).map(|(a, b)| a - b).collect()
    }

    /// Exact grid Hölder norm of `f - T`.
    fn exact(&self, c: &[Complex<T>]) -> T {
        let spec = &self.hs.p;
        let base = spec.norm_unchecked(&self.residual(&self.plain, c));
        let sup = self
            .steps
            .par_iter()
            .map(|t| spec.norm_unchecked(&self.residual(t, c)) * t.weight)
            .collect::<Vec<_>>()
            .into_iter()
            .fold(T::zero(), T::max);
        base + sup
    }

    /// Smoothed objective and its complex gradient.
    fn smoothed(&self, c: &[Complex<T>], eps2: T, tau: T) -> (T, Vec<Complex<T>>) {
        let p = self.hs.p.p();
        let inf = self.hs.p.is_infinite();
        let all: Vec<&Term<T>> = std::iter::once(&self.plain).chain(self.steps.iter()).collect();
        let evals: Vec<(Vec<Complex<T>>, T, Vec<T>, T)> = all
            .par_iter()
            .map(|t| {
                let u = self.residual(t, c);
                let (v, q, factor) = smoothed_norm(&u, p, inf, eps2, tau);
                (u, v, q, factor)
            })
            .collect();
        let vs: Vec<T> = evals[1..].iter().zip(&self.steps).map(|(e, t)| e.1 * t.weight).collect();
        let vmax = vs.iter().copied().fold(T::zero(), T::max);
        let ex: Vec<T> = vs.iter().map(|&v| ((v - vmax) / tau).exp()).collect();
        let z: T = ex.iter().copied().sum();
        let value = evals[0].1 + vmax + tau * z.ln();
        let mut coef = vec![T::one()];
        coef.extend(ex.iter().zip(&self.steps).map(|(&e, t)| e / z * t.weight));
        let cmax = coef.iter().copied().fold(T::zero(), T::max);
        let grid = self.target.grid;
        let partials: Vec<Vec<Complex<T>>> = all
            .par_iter()
            .zip(evals.par_iter())
            .zip(coef.par_iter())
            .filter(|(_, &w)| w > cmax * T::lit(1e-14))
            .map(|((t, (u, _, q, factor)), &w)| {
                let mut buf: Vec<Complex<T>> = u.iter().zip(q).map(|(&a, &b)| a * b).collect();
                grid.forward_in_place(&mut buf);
                let s = -w * *factor;
                self.freqs.iter().zip(&t.mult).map(|(&nu, &m)| m.conj() * buf[grid.bin(nu)] * s).collect()
            })
            .collect();
        let mut g = vec![czero(); self.freqs.len()];
        for part in partials {
            g.iter_mut().zip(part).for_each(|(a, b)| *a = *a + b);
        }
        (value, g)
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Limited-memory BFGS with backtracking on `obj`; returns the final point.
fn lbfgs<T: Real>(mut x: Vec<T>, obj: impl Fn(&[T]) -> (T, Vec<T>), max_iter: usize, rel_tol: T) -> Vec<T> {
    let (mut fx, mut g) = obj(&x);
    let mut mem: VecDeque<(Vec<T>, Vec<T>, T)> = VecDeque::new();
    for it in 0..max_iter {
        let gnorm = dot(&g, &g).sqrt();
        if !(gnorm > T::zero()) || !fx.is_finite() {
            break;
        }
        // Two-loop recursion.
        let mut d: Vec<T> = g.iter().map(|&v| -v).collect();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = *rho * dot(s, &d);
            d.iter_mut().zip(y).for_each(|(di, &yi)| *di = *di - a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = mem.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v = *v * gamma);
        } else {
            let scale = fx.max(T::min_positive_value()) / gnorm;
            d.iter_mut().for_each(|v| *v = *v * scale / gnorm * T::lit(0.1));
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.into_iter().rev()) {
            let b = *rho * dot(y, &d);
            d.iter_mut().zip(s).for_each(|(di, &si)| *di = *di + (a - b) * si);
        }
        let mut slope = dot(&g, &d);
        if !(slope < T::zero()) {
            mem.clear();
            d = g.iter().map(|&v| -v * fx.max(T::min_positive_value()) / (gnorm * gnorm) * T::lit(0.1)).collect();
            slope = dot(&g, &d);
        }
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<T> = x.iter().zip(&d).map(|(&a, &b)| a + step * b).collect();
            let (fn_, gn) = obj(&xn);
            if fn_.is_finite() && fn_ <= fx + T::lit(1e-4) * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step = step * T::lit(0.5);
        }
        let Some((xn, fn_, gn)) = accepted else {
            if mem.is_empty() {
                break;
            }
            mem.clear();
            continue;
        };
        let s: Vec<T> = xn.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = gn.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > T::zero() {
            if mem.len() == LBFGS_MEMORY {
                mem.pop_front();
            }
            mem.push_back((s, y, T::one() / sy));
        }
        let decrease = (fx - fn_) / fx.abs().max(T::min_positive_value());
        x = xn;
        fx = fn_;
        g = gn;
        if decrease < rel_tol && it > 0 {
            break;
        }
    }
    x
}

fn refine<T: Real>(problem: &Problem<'_, T>, start: &TrigPoly<T>, budget: &SolverBudget) -> TrigPoly<T> {
    let target = problem.target;
    let layout = if target.real { Layout::Real { zero_mean: target.zero_mean, n: target.n } } else { Layout::Complex };
    let freqs = &problem.freqs;
    let start = target.admissible(start);
    let c0: Vec<Complex<T>> = freqs.iter().map(|&nu| start.coeff(nu)).collect();
    let scale = target.scale();
    let value_scale = problem.exact(&c0).max(T::min_positive_value());
    let mut theta = layout.from_coeffs(&c0, freqs);
    for stage in 0..budget.eps_stages {
        let rel = T::lit(budget.eps_start * 10f64.powi(-(stage as i32)));
        let eps = rel * scale;
        let tau = rel * value_scale;
        let obj = |th: &[T]| {
            let c = layout.to_coeffs(th, freqs);
            let (v, g) = problem.smoothed(&c, eps * eps, tau);
            (v, layout.pull_back(&g, freqs))
        };
        theta = lbfgs(theta, obj, budget.holder_iter, T::lit(budget.rel_tol));
    }
    target.poly_from(freqs, &layout.to_coeffs(&theta, freqs))
}

/// `E_n(f)_{H_p^{r,alpha}}` on the grid of `disc`.
pub fn best_approx_holder<T: Real>(
    f: &PeriodicFn<T>,
    n: usize,
    hs: &HolderSpec<T>,
    budget: &SolverBudget,
    disc: &Discretization<T>,
) -> Result<ApproxResult<T>> {
    best_approx_holder_with_hints(f, n, hs, budget, disc, &[])
}

/// Like [`best_approx_holder`]; never returns a worse value than any of `hints`.
pub fn best_approx_holder_with_hints<T: Real>(
    f: &PeriodicFn<T>,
    n: usize,
    hs: &HolderSpec<T>,
    budget: &SolverBudget,
    disc: &Discretization<T>,
    hints: &[TrigPoly<T>],
) -> Result<ApproxResult<T>> {
    budget.validate()?;
    let target = Target::new(f, n, &disc.x, false)?;
    let problem = Problem::new(&target, hs, disc, f)?;
    let (l2, e2) = target.projection();
    let lp = solve(&target, &hs.p, budget, &[])?.poly;
    let mut starts = vec![lp.clone(), l2];
    starts.extend(hints.iter().map(|h| target.admissible(h)));
    if hs.p.p() < T::one() {
        let mut rng = rng_for(&target.label, n, hs.p.p().to_f64_lossy() + 1000.0 * hs.alpha.to_f64_lossy(), budget.seed);
        let sigma = T::lit(0.3) * e2 / T::from_usize_lossy(target.freqs().len()).sqrt();
        for _ in 0..budget.holder_starts {
            starts.push(perturb(&target, &lp, sigma, &mut rng));
        }
    }
    let coeffs = |t: &TrigPoly<T>| -> Vec<Complex<T>> { problem.freqs.iter().map(|&nu| t.coeff(nu)).collect() };
    let mut finals: Vec<(TrigPoly<T>, T)> = starts
        .iter()
        .map(|s| {
            let poly = refine(&problem, s, budget);
            let v = problem.exact(&coeffs(&poly));
            (poly, v)
        })
        .collect();
    // The unrefined candidates take part in the selection too.
    for s in starts.iter() {
        let v = problem.exact(&coeffs(s));
        finals.push((s.clone(), v));
    }
    let mut best = 0;
    for (i, (_, v)) in finals.iter().enumerate() {
        if *v < finals[best].1 {
            best = i;
        }
    }
    let trace = finals[..starts.len()].iter().map(|(_, v)| *v).collect();
    let (poly, value) = finals[best].clone();
    if !value.is_finite() {
        return Err(crate::error::Error::Solver(format!("non-finite Hölder objective {value}")));
    }
    Ok(ApproxResult { poly, value, certified: false, starts_used: starts.len(), solver_trace: trace, grid_gap: None })
}

/// Hölder best approximations for increasing degrees with warm starts.
pub fn best_approx_holder_batch<T: Real>(
    f: &PeriodicFn<T>,
    degrees: &[usize],
    hs: &HolderSpec<T>,
    budget: &SolverBudget,
    disc: &Discretization<T>,
) -> Result<Vec<ApproxResult<T>>> {
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<ApproxResult<T>> = Vec::with_capacity(sorted.len());
    for &n in &sorted {
        let hints: Vec<TrigPoly<T>> = out.last().map(|r| vec![r.poly.clone()]).unwrap_or_default();
        out.push(best_approx_holder_with_hints(f, n, hs, budget, disc, &hints)?);
    }
    Ok(degrees
        .iter()
        .map(|n| out[sorted.iter().position(|m| m == n).expect("degree present")].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::{holder_norm, HGrid, QuasiNormSpec};
    use crate::spectral::UniformGrid;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn disc() -> Discretization<f64> {
        Discretization::new(UniformGrid::new(256).unwrap(), HGrid::new(2.0 * PI * 1e-3, 2.0 * PI, 8).unwrap(), 16)
    }

    fn tri() -> PeriodicFn<f64> {
        PeriodicFn::closed("tri", true, |x: f64| c((x.rem_euclid(2.0 * PI) - PI).abs()))
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let d = disc();
        for (p, real) in [(1.5, true), (0.7, false), (f64::INFINITY, true)] {
            let hs = HolderSpec::new(QuasiNormSpec::new(p).unwrap(), 1, 0.5).unwrap();
            let f = if real { tri() } else { PeriodicFn::closed("cx", false, |x: f64| Complex::new(x.cos(), (2.0 * x).sin() + 0.3 * x.cos().abs())) };
            let target = Target::new(&f, 3, &d.x, false).unwrap();
            let problem = Problem::new(&target, &hs, &d, &f).unwrap();
            let layout = if real { Layout::Real { zero_mean: false, n: 3 } } else { Layout::Complex };
            let dim = layout.dim(problem.freqs.len());
            let theta: Vec<f64> = (0..dim).map(|i| 0.1 * (i as f64 + 1.0).sin()).collect();
            let (eps2, tau) = (1e-2, 0.05);
            let eval = |th: &[f64]| {
                let cs = layout.to_coeffs(th, &problem.freqs);
                let (v, g) = problem.smoothed(&cs, eps2, tau);
                (v, layout.pull_back(&g, &problem.freqs))
            };
            let (_, g) = eval(&theta);
            for i in 0..dim {
                let hstep = 1e-6;
                let mut a = theta.clone();
                let mut b = theta.clone();
                a[i] += hstep;
                b[i] -= hstep;
                let fd = (eval(&a).0 - eval(&b).0) / (2.0 * hstep);
                assert!((fd - g[i]).abs() < 1e-5 * (1.0 + fd.abs()), "p={p} i={i}: {fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn polynomial_is_reproduced() {
        let d = disc();
        let t = TrigPoly::from_fn(2, |nu| c(1.0 / (1.0 + (nu * nu) as f64)));
        let f = t.to_fn("t");
        let hs = HolderSpec::new(QuasiNormSpec::new(0.5).unwrap(), 1, 1.0).unwrap();
        let budget = SolverBudget { holder_starts: 0, ..Default::default() };
        let r = best_approx_holder(&f, 2, &hs, &budget, &d).unwrap();
        assert!(r.value < 1e-9, "{}", r.value);
    }

    #[test]
    fn value_is_exact_norm_and_beats_lp_start() {
        let d = disc();
        let f = tri();
        let hs = HolderSpec::new(QuasiNormSpec::new(1.0).unwrap(), 1, 0.5).unwrap();
        let budget = SolverBudget::default();
        let r = best_approx_holder(&f, 4, &hs, &budget, &d).unwrap();
        let direct = holder_norm(&f.sub_poly(&r.poly), &hs, &d).unwrap();
        assert!((direct - r.value).abs() < 1e-10 * direct, "{direct} vs {}", r.value);
        let lp = super::super::best_approx(&f, 4, &hs.p, &budget, &d.x).unwrap();
        let lp_holder = holder_norm(&f.sub_poly(&lp.poly), &hs, &d).unwrap();
        assert!(r.value <= lp_holder + 1e-12);
        let rs = best_approx_holder_batch(&f, &[2, 4], &hs, &budget, &d).unwrap();
        assert!(rs[1].value <= rs[0].value + 1e-12);
    }
}

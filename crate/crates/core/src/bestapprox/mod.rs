//! Best trigonometric approximation on a uniform grid.
//!
//! * `p = 2`: discrete Fourier projection (exact).
//! * `p = inf`: discrete Remez exchange for real functions, Lawson iteration otherwise.
//! * `1 <= p < inf`: iteratively reweighted least squares on the smoothed
//!   objective `sum (|e_j|^2 + eps^2)^{p/2}` with eps-continuation.
//! * `0 < p < 1`: the same, from several deterministic starts. Results are
//!   upper bounds for the true error; global optimality is not claimed.
//! * Hölder norm: limited-memory BFGS on a smoothed objective, see [`holder`].

mod holder;
mod lp;
mod minimax;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli::{lp_norm, QuasiNormSpec};
use crate::scalar::{czero, Complex, Real};
use crate::spectral::{PeriodicFn, TrigPoly, UniformGrid};

pub use holder::{best_approx_holder, best_approx_holder_batch, best_approx_holder_with_hints};

/// Solver budget and tolerances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverBudget {
    /// Random restarts for `p < 1`.
    pub starts: usize,
    pub seed: u64,
    /// Iteration cap per smoothing stage.
    pub max_iter: usize,
    /// Stage ends when the relative objective decrease falls below this.
    pub rel_tol: f64,
    /// First smoothing level, relative to `max |f|`.
    pub eps_start: f64,
    /// Number of smoothing stages; each divides eps by 10.
    pub eps_stages: usize,
    /// Iteration cap per stage of the Hölder-norm solver.
    pub holder_iter: usize,
    /// Random restarts of the Hölder-norm solver for `p < 1`.
    pub holder_starts: usize,
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self {
            starts: 8,
            seed: 0,
            max_iter: 5000,
            rel_tol: 1e-10,
            eps_start: 1e-2,
            eps_stages: 7,
            holder_iter: 200,
            holder_starts: 2,
        }
    }
}

impl SolverBudget {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidParameter("solver budget must allow at least one start".into()));
        }
        if self.max_iter == 0 || self.eps_stages == 0 {
            return Err(Error::InvalidParameter("solver needs at least one stage and one iteration".into()));
        }
        Ok(())
    }
}

/// Outcome of a best-approximation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxResult<T: Real> {
    pub poly: TrigPoly<T>,
    /// Norm of `f - poly` on the grid.
    pub value: T,
    /// `true` only for the exact `p = 2` projection and a converged grid minimax.
    pub certified: bool,
    pub starts_used: usize,
    /// Final objective value per start.
    pub solver_trace: Vec<T>,
    /// For `p = inf`: largest jump of the error between neighboring nodes,
    /// bounding the gap between grid and continuous maxima.
    pub grid_gap: Option<T>,
}

/// Sampled target of an approximation problem.
pub(crate) struct Target<'a, T: Real> {
    pub grid: &'a UniformGrid<T>,
    pub samples: Vec<Complex<T>>,
    pub real: bool,
    pub n: usize,
    pub zero_mean: bool,
    pub label: String,
}

impl<'a, T: Real> Target<'a, T> {
    pub fn new(f: &PeriodicFn<T>, n: usize, grid: &'a UniformGrid<T>, zero_mean: bool) -> Result<Self> {
        let required = 4 * (n + 1);
        if grid.size() < required {
            return Err(Error::GridTooSmall { size: grid.size(), degree: n, required });
        }
        Ok(Self {
            grid,
            samples: f.sample_shifted(grid, T::zero())?,
            real: f.is_real(),
            n,
            zero_mean,
            label: f.label().to_string(),
        })
    }

    /// Frequencies of the approximating space.
    pub fn freqs(&self) -> Vec<i64> {
        let n = self.n as i64;
        (-n..=n).filter(|&nu| !(self.zero_mean && nu == 0)).collect()
    }

    pub fn scale(&self) -> T {
        self.samples.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    pub fn errors(&self, poly: &TrigPoly<T>) -> Vec<Complex<T>> {
        let t = poly.sample(self.grid, T::zero());
        self.samples.iter().zip(t).map(|(a, b)| a - b).collect()
    }

    pub fn value(&self, poly: &TrigPoly<T>, spec: &QuasiNormSpec<T>) -> Result<T> {
        lp_norm(&self.errors(poly), spec)
    }

    /// Embeds `poly` in degree `n`, enforcing realness and the zero-mean constraint.
    pub fn admissible(&self, poly: &TrigPoly<T>) -> TrigPoly<T> {
        let mut t = poly.with_degree(self.n);
        if self.real {
            t = t.real_part();
        }
        if self.zero_mean {
            t.set_coeff(0, czero());
        }
        t
    }

    pub fn poly_from(&self, freqs: &[i64], c: &[Complex<T>]) -> TrigPoly<T> {
        let mut t = TrigPoly::zero(self.n);
        for (&nu, &v) in freqs.iter().zip(c) {
            t.set_coeff(nu, v);
        }
        if self.real {
            t = t.real_part();
        }
        t
    }

    /// Discrete Fourier projection onto the approximating space.
    pub fn projection(&self) -> (TrigPoly<T>, T) {
        let spectrum = self.grid.dft(&self.samples);
        let mut t = TrigPoly::from_fn(self.n, |nu| spectrum[self.grid.bin(nu)]);
        if self.zero_mean {
            t.set_coeff(0, czero());
        }
        if self.real {
            t = t.real_part();
        }
        let n = self.n as i64;
        let m = self.grid.size() as i64;
        // Parseval on the grid: energy of all bins outside the projection.
        let tail: T = (0..m)
            .filter(|&k| {
                let nu = if k > m / 2 { k - m } else { k };
                !(nu.abs() <= n && !(self.zero_mean && nu == 0))
            })
            .map(|k| spectrum[k as usize].norm_sqr())
            .sum();
        (t, tail.sqrt())
    }
}

/// FNV-1a hash of the run identity, used to seed restarts.
pub(crate) fn run_seed(label: &str, n: usize, p: f64, seed: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(label.as_bytes());
    eat(&(n as u64).to_le_bytes());
    eat(&p.to_bits().to_le_bytes());
    eat(&seed.to_le_bytes());
    h
}

/// Random perturbation of `base` with per-coefficient deviation `sigma`.
pub(crate) fn perturb<T: Real>(target: &Target<'_, T>, base: &TrigPoly<T>, sigma: T, rng: &mut ChaCha8Rng) -> TrigPoly<T> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut t = base.clone();
    for nu in target.freqs() {
        let d = Complex::new(T::lit(normal.sample(rng)), T::lit(normal.sample(rng))) * sigma;
        t.set_coeff(nu, t.coeff(nu) + d);
    }
    target.admissible(&t)
}

pub(crate) fn rng_for(label: &str, n: usize, p: f64, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(run_seed(label, n, p, seed))
}

/// Best `L_2` approximation: Fourier projection with the Parseval tail as value.
pub fn best_approx_l2<T: Real>(f: &PeriodicFn<T>, n: usize, grid: &UniformGrid<T>) -> Result<ApproxResult<T>> {
    let target = Target::new(f, n, grid, false)?;
    Ok(l2_result(&target))
}

fn l2_result<T: Real>(target: &Target<'_, T>) -> ApproxResult<T> {
    let (poly, value) = target.projection();
    ApproxResult { poly, value, certified: true, starts_used: 1, solver_trace: vec![value], grid_gap: None }
}

/// `E_n(f)_p` on the grid.
pub fn best_approx<T: Real>(
    f: &PeriodicFn<T>,
    n: usize,
    spec: &QuasiNormSpec<T>,
    budget: &SolverBudget,
    grid: &UniformGrid<T>,
) -> Result<ApproxResult<T>> {
    best_approx_with_hints(f, n, spec, budget, grid, &[])
}

/// Like [`best_approx`]; never returns a worse value than any of `hints`.
pub fn best_approx_with_hints<T: Real>(
    f: &PeriodicFn<T>,
    n: usize,
    spec: &QuasiNormSpec<T>,
    budget: &SolverBudget,
    grid: &UniformGrid<T>,
    hints: &[TrigPoly<T>],
) -> Result<ApproxResult<T>> {
    solve(&Target::new(f, n, grid, false)?, spec, budget, hints)
}

/// `E_n^0(f)_p`: best approximation by polynomials with zero mean.
pub fn en_zero<T: Real>(
    f: &PeriodicFn<T>,
    n: usize,
    spec: &QuasiNormSpec<T>,
    budget: &SolverBudget,
    grid: &UniformGrid<T>,
) -> Result<ApproxResult<T>> {
    solve(&Target::new(f, n, grid, true)?, spec, budget, &[])
}

/// Best approximations for increasing degrees, each warm-started from the
/// previous one so that values are nonincreasing in `n`.
pub fn best_approx_batch<T: Real>(
    f: &PeriodicFn<T>,
    degrees: &[usize],
    spec: &QuasiNormSpec<T>,
    budget: &SolverBudget,
    grid: &UniformGrid<T>,
) -> Result<Vec<ApproxResult<T>>> {
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<ApproxResult<T>> = Vec::with_capacity(sorted.len());
    for &n in &sorted {
        let hints: Vec<TrigPoly<T>> = out.last().map(|r| vec![r.poly.clone()]).unwrap_or_default();
        out.push(best_approx_with_hints(f, n, spec, budget, grid, &hints)?);
    }
    // Report in the caller's order.
    Ok(degrees
        .iter()
        .map(|n| out[sorted.iter().position(|m| m == n).expect("degree present")].clone())
        .collect())
}

fn check_finite<T: Real>(value: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Solver(format!("non-finite objective {value}")))
    }
}

fn solve<T: Real>(
    target: &Target<'_, T>,
    spec: &QuasiNormSpec<T>,
    budget: &SolverBudget,
    hints: &[TrigPoly<T>],
) -> Result<ApproxResult<T>> {
    budget.validate()?;
    let p = spec.p();
    let mut result = if p == T::lit(2.0) {
        l2_result(target)
    } else if spec.is_infinite() {
        minimax::solve(target)?
    } else if p >= T::one() {
        let (start, _) = target.projection();
        let poly = lp::irls(target, p, &start, budget)?;
        let value = check_finite(target.value(&poly, spec)?)?;
        ApproxResult { poly, value, certified: false, starts_used: 1, solver_trace: vec![value], grid_gap: None }
    } else {
        multi_start(target, spec, budget, hints)?
    };
    // Never report worse than a supplied candidate.
    for h in hints {
        let cand = target.admissible(h);
        let v = target.value(&cand, spec)?;
        if v < result.value {
            result.poly = cand;
            result.value = v;
            result.certified = false;
        }
    }
    if spec.is_infinite() {
        let e = target.errors(&result.poly);
        let m = e.len();
        result.grid_gap = Some((0..m).map(|j| (e[(j + 1) % m] - e[j]).norm()).fold(T::zero(), T::max));
    }
    Ok(result)
}

fn multi_start<T: Real>(
    target: &Target<'_, T>,
    spec: &QuasiNormSpec<T>,
    budget: &SolverBudget,
    hints: &[TrigPoly<T>],
) -> Result<ApproxResult<T>> {
    let p = spec.p();
    let (l2, e2) = target.projection();
    let l1 = lp::irls(target, T::one(), &l2, budget)?;
    let mut starts = vec![l2.clone(), l1.clone()];
    starts.extend(hints.iter().map(|h| target.admissible(h)));
    let mut rng = rng_for(&target.label, target.n, p.to_f64_lossy(), budget.seed);
    let dim = T::from_usize_lossy(target.freqs().len());
    let sigma = T::lit(0.3) * e2 / dim.sqrt();
    for i in 0..budget.starts {
        let base = if i % 2 == 0 { &l2 } else { &l1 };
        starts.push(perturb(target, base, sigma, &mut rng));
    }
    let finals = starts
        .par_iter()
        .map(|s| {
            let poly = lp::irls(target, p, s, budget)?;
            let value = check_finite(target.value(&poly, spec)?)?;
            Ok((poly, value))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, (_, v)) in finals.iter().enumerate() {
        if *v < finals[best].1 {
            best = i;
        }
    }
    let trace = finals.iter().map(|(_, v)| *v).collect();
    let (poly, value) = finals[best].clone();
    Ok(ApproxResult { poly, value, certified: false, starts_used: starts.len(), solver_trace: trace, grid_gap: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::creal;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn cos_k(k: i64) -> PeriodicFn<f64> {
        PeriodicFn::closed(format!("cos{k}"), true, move |x: f64| c((k as f64 * x).cos()))
    }

    fn spec(p: f64) -> QuasiNormSpec<f64> {
        QuasiNormSpec::new(p).unwrap()
    }

    #[test]
    fn l2_examples() {
        let grid = UniformGrid::new(256).unwrap();
        let r = best_approx_l2(&cos_k(2), 1, &grid).unwrap();
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(r.certified);
        let f = PeriodicFn::closed("c1c3", true, |x: f64| c(x.cos() + (3.0 * x).cos() / 9.0));
        let r = best_approx_l2(&f, 2, &grid).unwrap();
        assert!((r.value - (1.0 / 9.0) / 2f64.sqrt()).abs() < 1e-12);
        let r = best_approx_l2(&f, 3, &grid).unwrap();
        assert!(r.value < 1e-12);
        assert!(matches!(best_approx_l2(&f, 100, &grid), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn polynomials_are_reproduced_for_every_p() {
        let grid = UniformGrid::new(128).unwrap();
        let t = TrigPoly::from_fn(3, |nu| Complex::new(1.0 / (1.0 + nu.abs() as f64), 0.0)).real_part();
        let f = t.to_fn("t");
        let budget = SolverBudget { starts: 2, ..Default::default() };
        for p in [0.5, 1.0, 1.5, 2.0, f64::INFINITY] {
            let r = best_approx(&f, 3, &QuasiNormSpec::new(p).unwrap(), &budget, &grid).unwrap();
            assert!(r.value < 1e-9, "p={p}: {}", r.value);
        }
    }

    #[test]
    fn sup_norm_of_next_cosine() {
        for n in 0..=3usize {
            // Divisible by 2(n+1), so the extrema of cos((n+1)x) are nodes.
            let grid = UniformGrid::new(384).unwrap();
            let r = best_approx(&cos_k(n as i64 + 1), n, &QuasiNormSpec::infinity(), &SolverBudget::default(), &grid).unwrap();
            assert!((r.value - 1.0).abs() < 1e-10, "n={n}: {}", r.value);
            assert!(r.certified);
            assert!(r.poly.coeffs().iter().all(|v| v.norm() < 1e-8));
            // Equioscillation: at least n + 2 nodes at +-value.
            let e = Target::new(&cos_k(n as i64 + 1), n, &grid, false).unwrap().errors(&r.poly);
            let extremal = e.iter().filter(|v| (v.norm() - r.value).abs() < 1e-4).count();
            assert!(extremal >= n + 2);
        }
    }

    #[test]
    fn en_zero_of_constant() {
        let grid = UniformGrid::new(128).unwrap();
        let one = PeriodicFn::closed("1", true, |_| c(1.0));
        for p in [2.0, 1.0, f64::INFINITY] {
            let r = en_zero(&one, 3, &spec(p), &SolverBudget::default(), &grid).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "p={p}: {}", r.value);
            assert_eq!(r.poly.coeff(0), c(0.0));
        }
        let zero_mean = PeriodicFn::closed("c2", true, |x: f64| c((2.0 * x).cos()));
        assert!(en_zero(&zero_mean, 2, &spec(1.0), &SolverBudget::default(), &grid).unwrap().value < 1e-9);
    }

    #[test]
    fn p2_solver_path_matches_projection() {
        let grid = UniformGrid::new(512).unwrap();
        let tri = PeriodicFn::closed("tri", true, |x: f64| c((x.rem_euclid(2.0 * PI) - PI).abs()));
        let target = Target::new(&tri, 6, &grid, false).unwrap();
        let (proj, value) = target.projection();
        let irls = lp::irls(&target, 2.0, &TrigPoly::zero(6), &SolverBudget::default()).unwrap();
        let v = target.value(&irls, &spec(2.0)).unwrap();
        assert!((v - value).abs() < 1e-10);
        assert!(irls.coeff_distance(&proj) < 1e-8);
    }

    #[test]
    fn budget_validation() {
        let grid = UniformGrid::new(64).unwrap();
        let zero = SolverBudget { starts: 0, ..Default::default() };
        assert!(best_approx(&cos_k(1), 1, &spec(0.5), &zero, &grid).is_err());
    }

    #[test]
    fn batch_is_monotone_and_respects_hints() {
        let grid = UniformGrid::new(1024).unwrap();
        let tri = PeriodicFn::closed("tri", true, |x: f64| c((x.rem_euclid(2.0 * PI) - PI).abs()));
        let budget = SolverBudget { starts: 2, ..Default::default() };
        let rs = best_approx_batch(&tri, &[2, 4, 8], &spec(0.5), &budget, &grid).unwrap();
        assert!(rs[1].value <= rs[0].value + 1e-9 && rs[2].value <= rs[1].value + 1e-9);
        let hint = rs[2].poly.clone();
        let r = best_approx_with_hints(&tri, 8, &spec(0.5), &budget, &grid, std::slice::from_ref(&hint)).unwrap();
        let t = Target::new(&tri, 8, &grid, false).unwrap();
        assert!(r.value <= t.value(&hint, &spec(0.5)).unwrap());
    }

    #[test]
    fn scaling_is_equivariant() {
        let grid = UniformGrid::new(512).unwrap();
        let tri = PeriodicFn::closed("tri", true, |x: f64| c((x.rem_euclid(2.0 * PI) - PI).abs()));
        let scaled = tri.scale(creal(-3.0));
        for p in [1.0, 2.0, f64::INFINITY] {
            let a = best_approx(&tri, 4, &spec(p), &SolverBudget::default(), &grid).unwrap();
            let b = best_approx(&scaled, 4, &spec(p), &SolverBudget::default(), &grid).unwrap();
            assert!((b.value - 3.0 * a.value).abs() < 1e-8 * b.value, "p={p}");
        }
    }

    #[test]
    fn seeds_are_stable() {
        assert_eq!(run_seed("f", 3, 0.5, 0), run_seed("f", 3, 0.5, 0));
        assert_ne!(run_seed("f", 3, 0.5, 0), run_seed("f", 4, 0.5, 0));
        assert_ne!(run_seed("f", 3, 0.5, 0), run_seed("g", 3, 0.5, 0));
    }
}

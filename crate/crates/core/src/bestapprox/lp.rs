//! Iteratively reweighted least squares for the smoothed `L_p` objective.

use super::{SolverBudget, Target};
use crate::error::{Error, Result};
use crate::linalg::hermitian_solve;
use crate::scalar::{creal, Complex, Real};
use crate::spectral::TrigPoly;

/// Minimizes `sum_j w_j |f_j - T(x_j)|^2` over the approximating space.
///
/// The normal matrix is Toeplitz, `G_{ab} = W_{nu_a - nu_b}` with `W` the DFT of the weights.
pub(crate) fn weighted_ls<T: Real>(target: &Target<'_, T>, freqs: &[i64], w: &[T]) -> Result<TrigPoly<T>> {
    let grid = target.grid;
    let mut wt: Vec<Complex<T>> = w.iter().map(|&v| creal(v)).collect();
    let mut wf: Vec<Complex<T>> = w.iter().zip(&target.samples).map(|(&v, &f)| f * v).collect();
    grid.forward_in_place(&mut wt);
    grid.forward_in_place(&mut wf);
    let d = freqs.len();
    let build = |ridge: T| {
        let mut g = vec![Complex::new(T::zero(), T::zero()); d * d];
        for (a, &na) in freqs.iter().enumerate() {
            for (b, &nb) in freqs.iter().enumerate() {
                g[a * d + b] = wt[grid.bin(na - nb)];
            }
            g[a * d + a] = g[a * d + a] + creal(ridge);
        }
        g
    };
    let rhs: Vec<Complex<T>> = freqs.iter().map(|&nu| wf[grid.bin(nu)]).collect();
    let trace = wt[0].re;
    let mut ridge = T::zero();
    for _ in 0..8 {
        let mut g = build(ridge);
        let mut x = rhs.clone();
        if hermitian_solve(&mut g, &mut x).is_ok() && x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Ok(target.poly_from(freqs, &x));
        }
        ridge = if ridge == T::zero() { trace * T::lit(1e-13) } else { ridge * T::lit(100.0) };
    }
    Err(Error::Solver("weighted least squares system is singular".into()))
}

fn smoothed_objective<T: Real>(errors: &[Complex<T>], p: T, eps2: T) -> T {
    let half = p / T::lit(2.0);
    errors.iter().map(|e| (e.norm_sqr() + eps2).powf(half)).sum()
}

/// Minimizes `sum_j (|f_j - T(x_j)|^2 + eps^2)^{p/2}` from `start`, lowering eps geometrically.
pub(crate) fn irls<T: Real>(target: &Target<'_, T>, p: T, start: &TrigPoly<T>, budget: &SolverBudget) -> Result<TrigPoly<T>> {
    let freqs = target.freqs();
    let scale = target.scale();
    if scale == T::zero() {
        return Ok(TrigPoly::zero(target.n));
    }
    let mut poly = target.admissible(start);
    let half = p / T::lit(2.0);
    for stage in 0..budget.eps_stages {
        let eps = T::lit(budget.eps_start * 10f64.powi(-(stage as i32))) * scale;
        let eps2 = eps * eps;
        let mut errors = target.errors(&poly);
        let mut obj = smoothed_objective(&errors, p, eps2);
        for _ in 0..budget.max_iter {
            let w: Vec<T> = errors.iter().map(|e| (e.norm_sqr() + eps2).powf(half - T::one())).collect();
            let next = weighted_ls(target, &freqs, &w)?;
            let dir = next.sub(&poly);
            let mut step = T::one();
            let mut accepted = None;
            for _ in 0..30 {
                let cand = poly.add(&dir.scale(creal(step)));
                let e = target.errors(&cand);
                let v = smoothed_objective(&e, p, eps2);
                if v <= obj {
                    accepted = Some((cand, e, v));
                    break;
                }
                step = step * T::lit(0.5);
            }
            let Some((cand, e, v)) = accepted else { break };
            let decrease = (obj - v) / obj.max(T::min_positive_value());
            poly = cand;
            errors = e;
            obj = v;
            if decrease < T::lit(budget.rel_tol) {
                break;
            }
        }
    }
    Ok(poly)
}

//! Grid minimax: discrete Remez exchange and Lawson iteration.

use num_traits::Float;

use super::{lp::weighted_ls, ApproxResult, Target};
use crate::error::Result;
use crate::linalg::lu_solve;
use crate::scalar::{Complex, Real};
use crate::spectral::TrigPoly;

const REMEZ_MAX_ITER: usize = 500;
const LAWSON_MAX_ITER: usize = 3000;

pub(crate) fn solve<T: Real>(target: &Target<'_, T>) -> Result<ApproxResult<T>> {
    if target.scale() == T::zero() {
        return Ok(result(TrigPoly::zero(target.n), T::zero(), true));
    }
    if target.real && !target.zero_mean {
        if let Some((poly, value, certified)) = remez(target) {
            if certified {
                return Ok(result(poly, value, true));
            }
            let (lp, lv) = lawson(target)?;
            return Ok(if lv < value { result(lp, lv, false) } else { result(poly, value, false) });
        }
    }
    let (poly, value) = lawson(target)?;
    Ok(result(poly, value, false))
}

fn result<T: Real>(poly: TrigPoly<T>, value: T, certified: bool) -> ApproxResult<T> {
    ApproxResult { poly, value, certified, starts_used: 1, solver_trace: vec![value], grid_gap: None }
}

fn max_abs<T: Real>(e: &[Complex<T>]) -> (usize, T) {
    let mut best = (0, T::zero());
    for (j, v) in e.iter().enumerate() {
        let a = v.norm();
        if a > best.1 {
            best = (j, a);
        }
    }
    best
}

/// Real basis value: index 0 is `1`, then `cos(kx)`, `sin(kx)` for `k = 1..n`.
fn basis<T: Real>(i: usize, x: T) -> T {
    if i == 0 {
        return T::one();
    }
    let k = T::from_usize_lossy(i.div_ceil(2));
    if i % 2 == 1 {
        (k * x).cos()
    } else {
        (k * x).sin()
    }
}

fn to_poly<T: Real>(n: usize, a: &[T]) -> TrigPoly<T> {
    let half = T::lit(0.5);
    let mut t = TrigPoly::zero(n);
    t.set_coeff(0, Complex::new(a[0], T::zero()));
    for k in 1..=n {
        let (ck, sk) = (a[2 * k - 1], a[2 * k]);
        t.set_coeff(k as i64, Complex::new(ck * half, -sk * half));
        t.set_coeff(-(k as i64), Complex::new(ck * half, sk * half));
    }
    t
}

/// Argmax of `|e|` over each maximal run of constant sign, cyclically.
fn sign_run_extrema<T: Real>(e: &[T]) -> Vec<usize> {
    let m = e.len();
    let sign = |j: usize| e[j] >= T::zero();
    let Some(start) = (0..m).find(|&j| sign(j) != sign((j + m - 1) % m)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut best = start;
    for step in 1..=m {
        let j = (start + step) % m;
        if step == m || sign(j) != sign(best) {
            out.push(best);
            best = j;
        } else if Float::abs(e[j]) > Float::abs(e[best]) {
            best = j;
        }
    }
    out.sort_unstable();
    out
}

/// Drops adjacent pairs around the weakest point until `want` points remain.
fn reduce_alternant<T: Real>(mut refs: Vec<usize>, e: &[T], want: usize) -> Vec<usize> {
    while refs.len() > want {
        let r = refs.len();
        let weakest = (0..r)
            .min_by(|&a, &b| Float::abs(e[refs[a]]).partial_cmp(&Float::abs(e[refs[b]])).unwrap())
            .expect("nonempty");
        let prev = (weakest + r - 1) % r;
        let next = (weakest + 1) % r;
        let partner = if Float::abs(e[refs[prev]]) <= Float::abs(e[refs[next]]) { prev } else { next };
        let (a, b) = (weakest.max(partner), weakest.min(partner));
        refs.remove(a);
        refs.remove(b);
    }
    refs
}

/// Replaces one reference point by `j` while keeping signs alternating.
fn single_exchange<T: Real>(refs: &mut [usize], e: &[T], j: usize) {
    if refs.contains(&j) {
        return;
    }
    let r = refs.len();
    let pos = refs.iter().position(|&k| k > j).unwrap_or(r);
    let before = (pos + r - 1) % r;
    let after = pos % r;
    let same = |k: usize| (e[refs[k]] >= T::zero()) == (e[j] >= T::zero());
    let slot = if same(before) { before } else { after };
    refs[slot] = j;
    refs.sort_unstable();
}

/// Discrete Remez exchange with the real trigonometric basis of dimension `2n+1`.
fn remez<T: Real>(target: &Target<'_, T>) -> Option<(TrigPoly<T>, T, bool)> {
    let n = target.n;
    let dim = 2 * n + 1;
    let m = target.grid.size();
    let xs = target.grid.nodes();
    let f: Vec<T> = target.samples.iter().map(|v| v.re).collect();
    let mut refs: Vec<usize> = (0..dim + 1).map(|k| k * m / (dim + 1)).collect();
    let mut best: Option<(TrigPoly<T>, T)> = None;
    let tol = T::lit(1e-8);
    for _ in 0..REMEZ_MAX_ITER {
        let size = dim + 1;
        let mut a = vec![T::zero(); size * size];
        let mut b = vec![T::zero(); size];
        for (row, &j) in refs.iter().enumerate() {
            for i in 0..dim {
                a[row * size + i] = basis(i, xs[j]);
            }
            a[row * size + dim] = if row % 2 == 0 { T::one() } else { -T::one() };
            b[row] = f[j];
        }
        if lu_solve(&mut a, &mut b).is_err() {
            break;
        }
        let level = Float::abs(b[dim]);
        let poly = to_poly(n, &b[..dim]);
        let err: Vec<T> = target.errors(&poly).iter().map(|v| v.re).collect();
        let (jmax, emax) = err.iter().enumerate().fold((0, T::zero()), |acc, (j, &v)| {
            if Float::abs(v) > acc.1 {
                (j, Float::abs(v))
            } else {
                acc
            }
        });
        if best.as_ref().is_none_or(|(_, v)| emax < *v) {
            best = Some((poly.clone(), emax));
        }
        if emax - level <= tol * emax {
            return Some((poly, emax, true));
        }
        let runs = sign_run_extrema(&err);
        let next = if runs.len() > dim && runs.contains(&jmax) {
            reduce_alternant(runs, &err, dim + 1)
        } else {
            let mut r = refs.clone();
            single_exchange(&mut r, &err, jmax);
            r
        };
        if next == refs {
            break;
        }
        refs = next;
    }
    best.map(|(p, v)| (p, v, false))
}

/// Lawson's reweighting `w <- w |e|`, keeping the best iterate.
fn lawson<T: Real>(target: &Target<'_, T>) -> Result<(TrigPoly<T>, T)> {
    let freqs = target.freqs();
    let m = target.grid.size();
    let mut w = vec![T::one() / T::from_usize_lossy(m); m];
    let (mut best_poly, _) = target.projection();
    let mut best = max_abs(&target.errors(&best_poly)).1;
    let mut stall = 0;
    for _ in 0..LAWSON_MAX_ITER {
        let poly = weighted_ls(target, &freqs, &w)?;
        let e = target.errors(&poly);
        let (_, emax) = max_abs(&e);
        if emax < best * (T::one() - T::lit(1e-12)) {
            best = emax;
            best_poly = poly;
            stall = 0;
        } else {
            stall += 1;
            if stall > 50 {
                break;
            }
        }
        let mut s = T::zero();
        for (wj, ej) in w.iter_mut().zip(&e) {
            *wj = *wj * ej.norm();
            s = s + *wj;
        }
        if !(s > T::zero()) {
            break;
        }
        // Keep a floor so that the normal matrix stays definite.
        let floor = T::lit(1e-14);
        w.iter_mut().for_each(|v| *v = (*v / s).max(floor));
    }
    Ok((best_poly, best))
}

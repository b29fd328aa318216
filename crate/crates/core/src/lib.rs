//! Numerical approximation in `L_p` quasi-norms on the circle.
//!
//! Everything is generic over the scalar type through [`Real`] (implemented
//! for `f32` and `f64`); the `*64` and `*32` aliases below fix the precision.
//!
//! - [`spectral`]: uniform grids, trigonometric polynomials, lazy periodic functions.
//! - [`moduli`]: quasi-norms, moduli of smoothness, Hölder norms.
//! - [`means`]: kernel means, shifted families of means, operator norms.
//! - [`bestapprox`]: best approximation in `L_p`, `0 < p <= inf`, and in Hölder norms.
//! - [`testfns`]: named test functions with known rates.
//!
//! ```
//! use approxlab_core::{fn_norm, QuasiNormSpec64, UniformGrid64, testfns};
//! let f = testfns::lookup::<f64>("cosx").unwrap().f;
//! let grid = UniformGrid64::new(64).unwrap();
//! let v = fn_norm(&f, &grid, &QuasiNormSpec64::new(2.0).unwrap()).unwrap();
//! assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
//! ```

pub mod bestapprox;
pub mod error;
pub mod linalg;
pub mod means;
pub mod moduli;
pub mod scalar;
pub mod spectral;
pub mod testfns;

pub use bestapprox::{
    best_approx, best_approx_batch, best_approx_holder, best_approx_holder_batch, best_approx_holder_with_hints,
    best_approx_l2, best_approx_with_hints, en_zero, ApproxResult, SolverBudget,
};
pub use error::{Error, Result};
pub use means::{family_mean, family_means, family_nodes, fourier_mean, kernel_catalog, operator_norm, tilde, Kernel, OperatorNorm};
pub use moduli::{
    averaged_lp_norm, averaged_lp_norm_fn, difference_norm, family_holder_error, finite_difference, fn_norm, holder_norm,
    holder_seminorm, lp_norm, modulus_curve, omega, psi, theta, Discretization, FamilyError, HGrid, HSweep, HolderSpec,
    HolderValue, ModulusCurve, QuasiNormSpec,
};
pub use scalar::{Complex, Real};
pub use spectral::{PeriodicFn, TrigPoly, UniformGrid};
pub use testfns::CatalogEntry;

pub type PeriodicFn64 = PeriodicFn<f64>;
pub type TrigPoly64 = TrigPoly<f64>;
pub type UniformGrid64 = UniformGrid<f64>;
pub type QuasiNormSpec64 = QuasiNormSpec<f64>;
pub type HGrid64 = HGrid<f64>;
pub type Discretization64 = Discretization<f64>;
pub type HolderSpec64 = HolderSpec<f64>;
pub type Kernel64 = Kernel<f64>;
pub type ApproxResult64 = ApproxResult<f64>;
pub type CatalogEntry64 = CatalogEntry<f64>;

pub type PeriodicFn32 = PeriodicFn<f32>;
pub type TrigPoly32 = TrigPoly<f32>;
pub type UniformGrid32 = UniformGrid<f32>;
pub type QuasiNormSpec32 = QuasiNormSpec<f32>;
pub type HGrid32 = HGrid<f32>;
pub type Discretization32 = Discretization<f32>;
pub type HolderSpec32 = HolderSpec<f32>;
pub type Kernel32 = Kernel<f32>;
pub type ApproxResult32 = ApproxResult<f32>;
pub type CatalogEntry32 = CatalogEntry<f32>;

//! Invariant Kähler and Kähler–Einstein metrics on cohomogeneity-one
//! bundles over flag manifolds.
//!
//! The crate is split along the data flow:
//!
//! * [`rootsys`]: classical root systems in ε-coordinates with the
//!   Killing-normalised inner product, plus [`killing`] which certifies the
//!   normalisation numerically.
//! * [`flags`]: painted Dynkin diagrams and the flag-manifold combinatorics
//!   (complementary roots, T-roots, Koszul form, Kähler classes).
//! * [`bundles`]: admissible homogeneous vector bundles over a flag manifold
//!   and the geometry of their fibre circle.
//! * [`kesolve`]: the Kähler–Einstein reduction, its singular ODE and the
//!   quadrature / Runge–Kutta machinery that solves it.
//!
//! Everything algebraic is exact ([`Q`] rationals); floating point only
//! appears in the ODE layer and in numerical cross-checks.

pub mod bundles;
pub mod error;
pub mod flags;
pub mod frac;
pub mod kesolve;
pub mod killing;
pub mod linalg;
pub mod ode;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod rootsys;
pub mod suite;

pub use bundles::{enumerate_bundles, BundleJson, BundleSpec, End, FiberGeometry};
pub use error::{Error, Result};
pub use flags::{flag_data, DiagramJson, FlagData, PaintedDiagram, Root};
pub use kesolve::{
    completeness, flat_divisibility, kaehler_profile, ode_data, profile_observables,
    quadrature_profile, rk_verify, solve_algebraic, Completeness, FlatVerdict, Infeasibility,
    KeProblem, KeProfile, OdeData, ProfileRequest, RkReport,
};
pub use rootsys::{Covector, Family, RootSystem};

/// Exact rational scalar used for all combinatorial arithmetic.
pub type Q = num_rational::Ratio<i128>;

/// Shorthand for building a rational from a numerator and denominator.
pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

/// Shorthand for an integral rational.
pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

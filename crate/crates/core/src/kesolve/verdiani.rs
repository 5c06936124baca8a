//! Smoothness conditions at the singular orbit and the non-Einstein
//! model profile `f = d(1 − e^{−κt²/(2d)})`.

use super::profile::{fd_derivative, nan_max};
use super::{EndKind, KeProfile, Quadrature};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerdianiReport {
    pub kappa: f64,
    pub f0: f64,
    pub fdot0: f64,
    pub fddot0: f64,
}

impl VerdianiReport {
    /// Worst of `|f(0)|`, `|ḟ(0)|`, `|f̈(0) − κ|`.
    pub fn max_error(&self) -> f64 {
        self.f0
            .abs()
            .max(self.fdot0.abs())
            .max((self.fddot0 - self.kappa).abs())
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_error() <= tol
    }
}

/// Richardson-extrapolated central differences of `f` at `0` with base
/// step `h` (three levels, error `O(h⁶)`).
pub fn verdiani_check<F: Fn(f64) -> f64>(f: F, kappa: f64, h: f64) -> VerdianiReport {
    let f0 = f(0.0);
    let d1 = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let d2 = |h: f64| (f(h) - 2.0 * f0 + f(-h)) / (h * h);
    let rich = |d: &dyn Fn(f64) -> f64| {
        let (a, b, c) = (d(h), d(h / 2.0), d(h / 4.0));
        let (ab, bc) = ((4.0 * b - a) / 3.0, (4.0 * c - b) / 3.0);
        (16.0 * bc - ab) / 15.0
    };
    VerdianiReport {
        kappa,
        f0,
        fdot0: rich(&d1),
        fddot0: rich(&d2),
    }
}

/// Boundary check of an Einstein profile through its even extension.
pub fn ke_boundary_check(quad: &Quadrature, h: f64) -> Result<VerdianiReport> {
    let kappa = quad.kappa();
    let eval = |t: f64| quad.eval(t).map(|s| kappa * s.u).unwrap_or(f64::NAN);
    Ok(verdiani_check(eval, kappa, h))
}

/// `(f, ḟ, f̈)` of `f = d(1 − e^{−κt²/(2d)})`.
pub fn kaehler_closed_form(d: f64, kappa: f64, t: f64) -> (f64, f64, f64) {
    let x = -kappa * t * t / (2.0 * d);
    let e = x.exp();
    (-d * x.exp_m1(), kappa * t * e, kappa * e * (1.0 - kappa * t * t / d))
}

/// Sampled non-Einstein Kähler profile with `f → d`.
pub fn kaehler_profile(d: f64, kappa: f64, t_max: f64, samples: usize) -> Result<KeProfile> {
    if !(d > 0.0 && kappa > 0.0 && t_max > 0.0) {
        return Err(Error::InvalidParameter("d, kappa and t_max must be positive".into()));
    }
    if samples < 7 {
        return Err(Error::InvalidParameter("at least 7 samples are required".into()));
    }
    let dt = t_max / (samples - 1) as f64;
    let t: Vec<f64> = (0..samples).map(|i| i as f64 * dt).collect();
    let vals: Vec<(f64, f64, f64)> = t.iter().map(|&s| kaehler_closed_form(d, kappa, s)).collect();
    let fdot: Vec<f64> = vals.iter().map(|v| v.1).collect();
    let fddot: Vec<f64> = vals.iter().map(|v| v.2).collect();
    // consistency of the sampled derivatives
    let fd = fd_derivative(&fdot, dt, true, false);
    let residual: Vec<f64> = fd
        .iter()
        .zip(&fddot)
        .map(|(a, b)| (a - b).abs() / (a.abs() + b.abs()).max(1.0))
        .collect();
    Ok(KeProfile {
        f: vals.iter().map(|v| v.0).collect(),
        t,
        fdot,
        fddot,
        residual_max: nan_max(&residual),
        residual,
        energy: vec![],
        energy_max: 0.0,
        kappa,
        c: None,
        lambda: None,
        end_kind: EndKind::Unbounded,
        domain_end: None,
        complete: true,
        warnings: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_profile_boundary() {
        for &d in &[0.25, 1.0, 3.0, 10.0] {
            for &kappa in &[0.1, 0.5, 1.0, 2.0] {
                let r = verdiani_check(|t| kaehler_closed_form(d, kappa, t).0, kappa, 1e-2);
                assert!(r.passes(1e-10), "d={d} kappa={kappa} {r:?}");
                let p = kaehler_profile(d, kappa, 20.0, 401).unwrap();
                assert!(p.f.windows(2).all(|w| w[1] >= w[0]));
                assert!((p.fddot[0] - kappa).abs() < 1e-15);
                assert!(p.f.last().unwrap() <= &d);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(kaehler_profile(0.0, 1.0, 1.0, 10).is_err());
        assert!(kaehler_profile(1.0, -1.0, 1.0, 10).is_err());
    }
}

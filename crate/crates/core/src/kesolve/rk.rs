//! Independent Runge–Kutta integration of the Einstein ODE.

use num_traits::Zero;

use super::{EndKind, KeProfile, OdeData};
use crate::error::Result;
use crate::frac;
use crate::ode::DormandPrince;

/// Seed time for the Taylor start `u = t²/2 + c₄t⁴`.
pub const RK_SEED_TIME: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct RkReport {
    /// `max |f_quad − f_rk| / max(1, |f_quad|)` over compared samples.
    pub max_discrepancy: f64,
    /// Largest normalised ODE defect of the quadrature profile.
    pub max_residual: f64,
    /// Largest energy-identity defect of the quadrature profile.
    pub max_energy: f64,
    pub compared: usize,
    pub t_compared: f64,
}

impl RkReport {
    pub fn passes(&self, tol: f64, energy_tol: f64) -> bool {
        self.max_discrepancy < tol && self.max_residual < tol && self.max_energy < energy_tol
    }
}

pub fn rk_verify(data: &OdeData, profile: &KeProfile) -> Result<RkReport> {
    let m = data.m as f64;
    let lambda = data.lambda_f64();
    let k0 = data.k0 as f64;
    let others: Vec<(f64, f64)> = data
        .pairs
        .iter()
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, b)| (frac::to_f64(a), frac::to_f64(b)))
        .collect();
    let rhs = |_t: f64, y: &[f64; 2]| -> [f64; 2] {
        let (u, v) = (y[0], y[1]);
        let mut a = k0 / u;
        for &(p, q) in &others {
            a += q / (p + u * q);
        }
        [v, m - lambda * u - 0.5 * a * v * v]
    };

    let t0 = RK_SEED_TIME;
    let c4 = data.taylor_c4();
    let y0 = [t0 * t0 / 2.0 + c4 * t0.powi(4), t0 + 4.0 * c4 * t0.powi(3)];

    // Stay clear of a chamber exit, where Ã blows up.
    let f_cut = match profile.end_kind {
        EndKind::ChamberExit => profile.f.last().copied().unwrap_or(0.0) * 0.99,
        _ => f64::INFINITY,
    };
    let idx: Vec<usize> = (0..profile.t.len())
        .filter(|&i| profile.t[i] >= t0 && profile.f[i] <= f_cut)
        .collect();
    let times: Vec<f64> = idx.iter().map(|&i| profile.t[i]).collect();
    let dp = DormandPrince {
        rtol: 1e-13,
        atol: 1e-16,
        ..Default::default()
    };
    let ys = dp.integrate(rhs, t0, y0, &times)?;
    let kappa = data.kappa;
    let mut max_discrepancy: f64 = 0.0;
    for (&i, y) in idx.iter().zip(&ys) {
        let fq = profile.f[i];
        let d = (fq - kappa * y[0]).abs() / fq.abs().max(1.0);
        if d.is_nan() {
            max_discrepancy = f64::NAN;
            break;
        }
        max_discrepancy = max_discrepancy.max(d);
    }
    Ok(RkReport {
        max_discrepancy,
        max_residual: profile.residual_max,
        max_energy: profile.energy_max,
        compared: idx.len(),
        t_compared: times.last().copied().unwrap_or(0.0),
    })
}

//! Dormand–Prince 5(4) explicit Runge–Kutta with adaptive step size.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        DormandPrince {
            rtol: 1e-12,
            atol: 1e-14,
            h_init: 1e-4,
            h_min: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl DormandPrince {
    /// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at
    /// each of the increasing `times` (all `≥ t0`). Steps are clamped so
    /// that every requested time is hit exactly.
    pub fn integrate<const N: usize, F>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        times: &[f64],
    ) -> Result<Vec<[f64; N]>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut out = Vec::with_capacity(times.len());
        let mut t = t0;
        let mut y = y0;
        let mut h = self.h_init;
        let mut steps = 0usize;
        let mut k0 = f(t, &y);
        for &target in times {
            if target < t {
                if (t - target).abs() <= 1e-15 * t.abs().max(1.0) {
                    out.push(y);
                    continue;
                }
                return Err(Error::InvalidParameter(format!(
                    "output time {target} precedes current time {t}"
                )));
            }
            while t < target {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::Numerical(format!("step budget exhausted at t = {t}")));
                }
                let last = h >= target - t;
                let hs = if last { target - t } else { h };
                let (y5, err, k7) = self.step(&f, t, &y, &k0, hs);
                if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
                    h = hs * 0.25;
                    if h < self.h_min {
                        return Err(Error::Numerical(format!("non-finite state near t = {t}")));
                    }
                    continue;
                }
                if err <= 1.0 {
                    t = if last { target } else { t + hs };
                    y = y5;
                    k0 = k7;
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                let proposed = hs * fac;
                if err > 1.0 {
                    if proposed < self.h_min {
                        return Err(Error::Numerical(format!("step size underflow at t = {t}")));
                    }
                    h = proposed;
                } else if !last || proposed > h {
                    h = proposed;
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    fn step<const N: usize, F>(
        &self,
        f: &F,
        t: f64,
        y: &[f64; N],
        k0: &[f64; N],
        h: f64,
    ) -> ([f64; N], f64, [f64; N])
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut k = [[0.0; N]; 7];
        k[0] = *k0;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = *y;
        let mut err = 0.0;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
            let e = h * (d5 - d4) / sc;
            err += e * e;
        }
        (y5, (err / N as f64).sqrt(), k[6])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let dp = DormandPrince::default();
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let ys = dp.integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], &times).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - t.sin()).abs() < 1e-10, "{t}");
            assert!((y[1] - t.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn exponential_growth_relative() {
        let dp = DormandPrince::default();
        let ys = dp.integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &[30.0]).unwrap();
        assert!((ys[0][0] / 30f64.exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_backward_times() {
        let dp = DormandPrince::default();
        assert!(dp.integrate(|_, y: &[f64; 1]| [y[0]], 1.0, [1.0], &[0.5]).is_err());
    }
}

//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: `(estimate, error)`.
fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let s = f(c - h * x) + f(c + h * x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// `∫_a^b f` to within `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b, panel(&f, a, b), 0u32)];
    let mut total = 0.0;
    let whole = stack[0].2 .0.abs();
    while let Some((lo, hi, (val, e), depth)) = stack.pop() {
        let local_tol = (abs_tol.max(rel_tol * whole)) * ((hi - lo) / (b - a)).abs();
        if e <= local_tol.max(f64::EPSILON * 50.0 * val.abs()) || depth >= 48 {
            if !val.is_finite() {
                return Err(Error::Numerical(format!("non-finite integrand on [{lo}, {hi}]")));
            }
            if depth >= 48 && e > local_tol {
                return Err(Error::Numerical(format!(
                    "quadrature did not converge on [{lo}, {hi}] (error {e:e})"
                )));
            }
            total += val;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, panel(&f, lo, mid), depth + 1));
        stack.push((mid, hi, panel(&f, mid, hi), depth + 1));
    }
    Ok(total)
}

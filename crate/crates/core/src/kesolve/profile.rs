//! Closed-form quadrature `t(u) = ∫₀^u √(P̃/Q̃)` and its inversion.
//!
//! With `P̃ = s^{k₀}R(s)` and `Q̃ = s^{k₀+1}S(s)` the substitution `s = w²`
//! turns the integrand into `2√(R(w²)/S(w²))`, analytic at `w = 0`. A
//! finite end `u_end` is handled with `w = √u_end · sin φ`: at a simple
//! root of `Q̃` the factor `u_end − s` is divided out of `S` first, at a
//! chamber exit the integrand simply picks up `cos φ`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_traits::{Signed, Zero};

use super::{energy_defect_reduced, OdeData};
use crate::error::{Error, Result};
use crate::poly::{ratio, FloatPoly};
use crate::{frac, quad};

const QUAD_ABS: f64 = 1e-16;
const QUAD_REL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndKind {
    /// `f → ∞` as `t → ∞`.
    Unbounded,
    /// `ḟ = 0` at a finite `t` (first positive root of `Q`).
    Turning,
    /// `Z_0 + fZ⁰` reaches a chamber wall at a finite `t`.
    ChamberExit,
}

impl fmt::Display for EndKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndKind::Unbounded => "unbounded",
            EndKind::Turning => "turning",
            EndKind::ChamberExit => "chamber-exit",
        })
    }
}

#[derive(Clone, Debug)]
enum Domain {
    Unbounded,
    Finite {
        kind: EndKind,
        u_end: f64,
        w_end: f64,
        /// `S(s)/(u_end − s)` for a turning end.
        deflated: Option<FloatPoly>,
        t_end: f64,
    },
}

/// Reduced-variable sample `(t, u, u̇, ü)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub u: f64,
    pub udot: f64,
    pub uddot: f64,
}

/// Evaluator for the quadrature solution of one ODE.
#[derive(Clone, Debug)]
pub struct Quadrature {
    m: f64,
    lambda: f64,
    k0: f64,
    kappa: f64,
    others: Vec<(f64, f64)>,
    r: FloatPoly,
    s: FloatPoly,
    p: FloatPoly,
    q: FloatPoly,
    domain: Domain,
}

impl Quadrature {
    pub fn new(data: &OdeData) -> Result<Self> {
        let r = data.p_tilde.shift_down(data.k0).to_f64();
        let s_exact = data.q_tilde.shift_down(data.k0 + 1);
        let s = s_exact.to_f64();
        let m = data.m as f64;
        let lambda = data.lambda_f64();
        let exit = data.chamber_exit();

        let end: Option<(EndKind, f64)> = if data.lambda.is_positive() {
            let lo = m / lambda;
            match exit {
                Some(up) if frac::to_f64(&up) <= lo => Some((EndKind::ChamberExit, frac::to_f64(&up))),
                _ => {
                    let mut hi = 2.0 * lo;
                    let mut found = None;
                    for _ in 0..200 {
                        if let Some(up) = exit {
                            let upf = frac::to_f64(&up);
                            if hi >= upf {
                                if s_exact.eval(up).is_positive() {
                                    found = Some((EndKind::ChamberExit, upf));
                                } else {
                                    hi = upf;
                                }
                                break;
                            }
                        }
                        if s.eval(hi) < 0.0 {
                            break;
                        }
                        hi *= 2.0;
                    }
                    match found {
                        Some(e) => Some(e),
                        None => Some((EndKind::Turning, bisect_root(&s, lo, hi)?)),
                    }
                }
            }
        } else {
            exit.map(|up| (EndKind::ChamberExit, frac::to_f64(&up)))
        };

        let others = data
            .pairs
            .iter()
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, b)| (frac::to_f64(a), frac::to_f64(b)))
            .collect();
        let mut quad = Quadrature {
            m,
            lambda,
            k0: data.k0 as f64,
            kappa: data.kappa,
            others,
            r,
            s,
            p: data.p_tilde.to_f64(),
            q: data.q_tilde.to_f64(),
            domain: Domain::Unbounded,
        };
        if let Some((kind, u_end)) = end {
            let deflated = (kind == EndKind::Turning).then(|| {
                let d = quad.s.deflate(u_end);
                FloatPoly::new(d.coeffs().iter().map(|c| -c).collect())
            });
            quad.domain = Domain::Finite {
                kind,
                u_end,
                w_end: u_end.sqrt(),
                deflated,
                t_end: 0.0,
            };
            let t_end = quad::integrate(|x| quad.h(x), 0.0, FRAC_PI_2, QUAD_ABS, QUAD_REL)?;
            if let Domain::Finite { t_end: te, .. } = &mut quad.domain {
                *te = t_end;
            }
        }
        Ok(quad)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn end_kind(&self) -> EndKind {
        match &self.domain {
            Domain::Unbounded => EndKind::Unbounded,
            Domain::Finite { kind, .. } => *kind,
        }
    }

    pub fn t_end(&self) -> Option<f64> {
        match &self.domain {
            Domain::Unbounded => None,
            Domain::Finite { t_end, .. } => Some(*t_end),
        }
    }

    pub fn u_end(&self) -> Option<f64> {
        match &self.domain {
            Domain::Unbounded => None,
            Domain::Finite { u_end, .. } => Some(*u_end),
        }
    }

    fn x_max(&self) -> f64 {
        match self.domain {
            Domain::Unbounded => f64::INFINITY,
            Domain::Finite { .. } => FRAC_PI_2,
        }
    }

    /// `dt/dx` for the integration variable `x` (`w` or `φ`).
    fn h(&self, x: f64) -> f64 {
        match &self.domain {
            Domain::Unbounded => 2.0 * ratio(&self.r, &self.s, x * x).sqrt(),
            Domain::Finite {
                w_end, deflated, ..
            } => {
                let w = w_end * x.sin();
                let v = w * w;
                match deflated {
                    Some(t) => 2.0 * (self.r.eval(v) / t.eval(v)).sqrt(),
                    None => 2.0 * (self.r.eval(v).max(0.0) / self.s.eval(v)).sqrt() * w_end * x.cos(),
                }
            }
        }
    }

    fn state(&self, t: f64, x: f64) -> Sample {
        let h = self.h(x);
        let (u, du_dx, up2_over_u) = match &self.domain {
            Domain::Unbounded => (x * x, 2.0 * x, 4.0 / (h * h)),
            Domain::Finite { u_end, .. } => {
                let (sn, cs) = x.sin_cos();
                (u_end * sn * sn, 2.0 * u_end * sn * cs, 4.0 * u_end * cs * cs / (h * h))
            }
        };
        let udot = du_dx / h;
        let up2 = udot * udot;
        let mut half_a = self.k0 * up2_over_u;
        for &(a, b) in &self.others {
            half_a += b / (a + u * b) * up2;
        }
        Sample {
            t,
            u,
            udot,
            uddot: self.m - self.lambda * u - 0.5 * half_a,
        }
    }

    /// Solves `t(x) = t` starting from a known point `(x0, t0)` with `t0 ≤ t`.
    fn invert(&self, t: f64, x0: f64, t0: f64) -> Result<f64> {
        if t <= t0 {
            return Ok(x0);
        }
        let g = |x: f64| -> Result<f64> {
            Ok(t0 + quad::integrate(|y| self.h(y), x0, x, QUAD_ABS, QUAD_REL)? - t)
        };
        let h0 = self.h(x0);
        let mut lo = x0;
        let mut hi;
        if self.x_max().is_finite() {
            hi = self.x_max();
        } else {
            let mut step = if h0 > 0.0 { 2.0 * (t - t0) / h0 } else { 1.0 };
            hi = x0 + step;
            let mut guard = 0;
            while g(hi)? < 0.0 {
                lo = hi;
                step *= 2.0;
                hi = x0 + step;
                guard += 1;
                if guard > 2000 || !hi.is_finite() {
                    return Err(Error::Numerical(format!("cannot bracket t = {t}")));
                }
            }
        }
        let mut x = if h0 > 0.0 { (x0 + (t - t0) / h0).clamp(lo, hi) } else { 0.5 * (lo + hi) };
        let tol = 4.0 * f64::EPSILON * t.abs().max(1.0);
        for _ in 0..200 {
            let gx = g(x)?;
            if gx.abs() <= tol {
                return Ok(x);
            }
            if gx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(1e-300) {
                return Ok(x);
            }
            let hx = self.h(x);
            let xn = x - gx / hx;
            x = if hx > 0.0 && xn > lo && xn < hi { xn } else { 0.5 * (lo + hi) };
        }
        Err(Error::Numerical(format!("inversion of t = {t} did not converge")))
    }

    /// The reduced solution at one time, integrating from `t = 0`.
    pub fn eval(&self, t: f64) -> Result<Sample> {
        let t = t.abs();
        if let Some(te) = self.t_end() {
            if t > te {
                return Err(Error::InvalidParameter(format!("t = {t} beyond domain end {te}")));
            }
        }
        Ok(self.state(t, self.invert(t, 0.0, 0.0)?))
    }

    /// Samples at increasing times, inverting from the previous point.
    pub fn sample(&self, ts: &[f64]) -> Result<Vec<Sample>> {
        let mut out = Vec::with_capacity(ts.len());
        let (mut x0, mut t0) = (0.0, 0.0);
        for &t in ts {
            if t < t0 {
                return Err(Error::InvalidParameter("sample times must increase".into()));
            }
            let x = match self.t_end() {
                Some(te) if t >= te => self.x_max(),
                _ => self.invert(t, x0, t0)?,
            };
            out.push(self.state(t, x));
            x0 = x;
            t0 = t;
        }
        Ok(out)
    }

    /// Time at which `u` reaches `u_target` (`None` if never).
    pub fn time_of(&self, u_target: f64) -> Result<Option<f64>> {
        let x = match &self.domain {
            Domain::Unbounded => u_target.sqrt(),
            Domain::Finite { u_end, .. } => {
                if u_target > *u_end {
                    return Ok(None);
                }
                (u_target / u_end).sqrt().asin()
            }
        };
        Ok(Some(quad::integrate(|y| self.h(y), 0.0, x, QUAD_ABS, QUAD_REL)?))
    }

    /// `ü` predicted by the ODE from `(u, u̇)`.
    pub fn ode_rhs(&self, u: f64, udot: f64) -> f64 {
        let mut a = self.k0 / u;
        for &(p, q) in &self.others {
            a += q / (p + u * q);
        }
        self.m - self.lambda * u - 0.5 * a * udot * udot
    }

    pub(crate) fn energy_defect(&self, u: f64, udot: f64) -> f64 {
        energy_defect_reduced(&self.p, &self.q, u, udot)
    }
}

/// Root of `p` in `[lo, hi]` given `p(lo) > 0 > p(hi)`.
fn bisect_root(p: &FloatPoly, mut lo: f64, mut hi: f64) -> Result<f64> {
    if !(p.eval(lo) > 0.0 && p.eval(hi) < 0.0) {
        return Err(Error::Numerical(format!("no sign change of Q on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileRequest {
    pub t_max: f64,
    pub samples: usize,
    /// Stop once `f` reaches this value.
    pub f_max: Option<f64>,
}

impl Default for ProfileRequest {
    fn default() -> Self {
        ProfileRequest {
            t_max: 50.0,
            samples: 5001,
            f_max: None,
        }
    }
}

/// Sampled metric profile `(t, f, ḟ, f̈)` with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct KeProfile {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub fdot: Vec<f64>,
    pub fddot: Vec<f64>,
    /// Normalised pointwise defect of the ODE with `f̈` taken from finite
    /// differences of the sampled `ḟ`.
    pub residual: Vec<f64>,
    /// Normalised defect of `ḟ²P(f) = Q(f)`.
    pub energy: Vec<f64>,
    pub kappa: f64,
    pub c: Option<f64>,
    pub lambda: Option<f64>,
    pub end_kind: EndKind,
    /// Finite end of the maximal domain, if any.
    pub domain_end: Option<f64>,
    pub residual_max: f64,
    pub energy_max: f64,
    pub complete: bool,
    pub warnings: Vec<String>,
}

pub(crate) fn nan_max(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |acc, &x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

impl KeProfile {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `t,f,fdot,fddot,residual` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,f,fdot,fddot,residual\n");
        for i in 0..self.t.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.t[i], self.f[i], self.fdot[i], self.fddot[i], self.residual[i]
            ));
        }
        out
    }

    /// Linear interpolation of `f` (for plotting and quick lookups).
    pub fn f_at(&self, t: f64) -> Option<f64> {
        let i = self.t.partition_point(|&s| s < t);
        if i == 0 {
            return (self.t.first() == Some(&t)).then(|| self.f[0]);
        }
        if i >= self.t.len() {
            return None;
        }
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        let s = (t - t0) / (t1 - t0);
        Some(self.f[i - 1] * (1.0 - s) + self.f[i] * s)
    }
}

/// Fornberg weights for the first derivative at `0` from nodes `xs`.
fn fornberg_d1(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    for i in 1..n {
        let mut c2 = 1.0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (0..=1.min(i)).rev() {
                    let prev = if k > 0 { c[i - 1][k - 1] } else { 0.0 };
                    c[i][k] = c1 * (k as f64 * prev - xs[i - 1] * c[i - 1][k]) / c2;
                }
            }
            for k in (0..=1.min(i)).rev() {
                let prev = if k > 0 { c[j][k - 1] } else { 0.0 };
                c[j][k] = (xs[i] * c[j][k] - k as f64 * prev) / c3;
            }
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Sixth-order finite-difference derivative of uniformly spaced values.
/// An odd end (the derivative of an even function) is continued by
/// reflection instead of switching to a one-sided stencil.
pub(crate) fn fd_derivative(y: &[f64], dt: f64, odd_start: bool, odd_end: bool) -> Vec<f64> {
    const HALF: isize = 3;
    let n = y.len() as isize;
    assert!(n > 2 * HALF, "need at least seven samples");
    let value = |k: isize| -> Option<f64> {
        if (0..n).contains(&k) {
            Some(y[k as usize])
        } else if k < 0 && odd_start {
            Some(-y[(-k) as usize])
        } else if k >= n && odd_end {
            Some(-y[(2 * (n - 1) - k) as usize])
        } else {
            None
        }
    };
    (0..n)
        .map(|i| {
            let mut lo = i - HALF;
            if value(lo).is_none() {
                lo = 0;
            }
            if value(lo + 2 * HALF).is_none() {
                lo = n - 1 - 2 * HALF;
            }
            let offs: Vec<f64> = (lo..=lo + 2 * HALF).map(|k| (k - i) as f64).collect();
            let w = fornberg_d1(&offs);
            (lo..=lo + 2 * HALF)
                .zip(&w)
                .map(|(k, wk)| wk * value(k).expect("stencil in range"))
                .sum::<f64>()
                / dt
        })
        .collect()
}

/// Coarser output grids get their residual from a local stencil of this step.
const RESIDUAL_STEP: f64 = 1e-2;

/// `ü` at each `t` by a seven-point stencil of step `h`, continued oddly
/// through `t = 0` and through a turning end.
fn local_derivative(quad: &Quadrature, ts: &[f64], h: f64) -> Result<Vec<f64>> {
    let te = quad.t_end();
    let turning = quad.end_kind() == EndKind::Turning;
    let reachable = |tau: f64| turning || te.is_none_or(|te| tau <= te);
    // (evaluation time, sign, sample index, weight)
    let mut pts = Vec::with_capacity(7 * ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let mut lo = -3i32;
        while lo > -6 && !reachable(t + (lo + 6) as f64 * h) {
            lo -= 1;
        }
        let offs: Vec<f64> = (lo..=lo + 6).map(f64::from).collect();
        for (k, w) in offs.iter().zip(fornberg_d1(&offs)) {
            let tau = t + k * h;
            let (tt, sign) = match te {
                _ if tau < 0.0 => (-tau, -1.0),
                Some(te) if tau > te => ((2.0 * te - tau).max(0.0), -1.0),
                _ => (tau, 1.0),
            };
            pts.push((tt, sign, i, w));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let times: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let states = quad.sample(&times)?;
    let mut out = vec![0.0; ts.len()];
    for (p, s) in pts.iter().zip(&states) {
        out[p.2] += p.3 * p.1 * s.udot / h;
    }
    Ok(out)
}

pub fn quadrature_profile(data: &OdeData, req: &ProfileRequest) -> Result<KeProfile> {
    if req.samples < 7 {
        return Err(Error::InvalidParameter("at least 7 samples are required".into()));
    }
    if req.t_max.is_nan() || req.t_max <= 0.0 {
        return Err(Error::InvalidParameter("t_max must be positive".into()));
    }
    let quad = Quadrature::new(data)?;
    let kappa = data.kappa;
    let mut warnings = Vec::new();
    let mut t_hi = req.t_max;
    if let Some(fm) = req.f_max {
        if fm.is_nan() || fm <= 0.0 {
            return Err(Error::InvalidParameter("f_max must be positive".into()));
        }
        match quad.time_of(fm / kappa)? {
            Some(tf) if tf < t_hi => t_hi = tf,
            Some(_) => {}
            None => warnings.push(format!(
                "f_max = {fm} lies beyond the end of the domain; profile truncated"
            )),
        }
    }
    if let Some(te) = quad.t_end() {
        if te < t_hi {
            t_hi = te;
            warnings.push(format!("domain ends at t = {te} ({})", quad.end_kind()));
        }
    }
    let n = req.samples;
    let dt = t_hi / (n - 1) as f64;
    let ts: Vec<f64> = (0..n).map(|i| if i + 1 == n { t_hi } else { i as f64 * dt }).collect();
    let samples = quad.sample(&ts)?;

    let ufd = if dt <= RESIDUAL_STEP {
        let udot: Vec<f64> = samples.iter().map(|s| s.udot).collect();
        let at_turning = quad.end_kind() == EndKind::Turning && quad.t_end() == Some(t_hi);
        fd_derivative(&udot, dt, true, at_turning)
    } else {
        local_derivative(&quad, &ts, RESIDUAL_STEP)?
    };
    let m = data.m as f64;
    let lambda = data.lambda_f64();
    let residual: Vec<f64> = samples
        .iter()
        .zip(&ufd)
        .map(|(s, fd)| {
            let damping = m - lambda * s.u - s.uddot;
            let scale = fd.abs() + damping.abs() + (lambda * s.u).abs() + m;
            (fd - s.uddot).abs() / scale
        })
        .collect();
    let energy: Vec<f64> = samples.iter().map(|s| quad.energy_defect(s.u, s.udot)).collect();
    let end_kind = quad.end_kind();
    Ok(KeProfile {
        t: ts,
        f: samples.iter().map(|s| kappa * s.u).collect(),
        fdot: samples.iter().map(|s| kappa * s.udot).collect(),
        fddot: samples.iter().map(|s| kappa * s.uddot).collect(),
        residual_max: nan_max(&residual),
        energy_max: nan_max(&energy),
        residual,
        energy,
        kappa,
        c: Some(data.c()),
        lambda: Some(lambda),
        end_kind,
        domain_end: quad.t_end(),
        complete: lambda <= 0.0 && end_kind == EndKind::Unbounded,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::BundleSpec;
    use crate::kesolve::{ode_data, solve_algebraic};
    use crate::{q, qi, Q};
    use std::f64::consts::SQRT_2;

    fn seed(n: usize, lambda: Q) -> OdeData {
        let spec = BundleSpec::su_seed(n).unwrap();
        ode_data(&solve_algebraic(&spec, lambda).unwrap().unwrap()).unwrap()
    }

    #[test]
    fn projective_space_closed_form() {
        for n in 2..=5usize {
            let d = seed(n, qi(n as i128 + 1));
            let quad = Quadrature::new(&d).unwrap();
            assert_eq!(quad.end_kind(), EndKind::Turning);
            assert!((quad.u_end().unwrap() - 1.0).abs() < 1e-14);
            let te = quad.t_end().unwrap();
            assert!((te - std::f64::consts::PI / SQRT_2).abs() < 1e-13);
            let kappa = ((n - 1) as f64).sqrt() / (n as f64 * SQRT_2);
            for i in 0..=50 {
                let t = 0.9 * te * i as f64 / 50.0;
                let s = quad.eval(t).unwrap();
                let exact = (t / SQRT_2).sin().powi(2);
                assert!((s.u - exact).abs() < 1e-13, "n={n} t={t}");
                assert!((kappa * s.u - kappa * exact).abs() < 1e-14);
                let exact_dot = (2.0 * t / SQRT_2).sin() / SQRT_2;
                assert!((s.udot - exact_dot).abs() < 1e-12);
                let exact_ddot = (2.0 * t / SQRT_2).cos();
                assert!((s.uddot - exact_ddot).abs() < 1e-11, "{} {}", s.uddot, exact_ddot);
            }
        }
    }

    #[test]
    fn flat_growth_is_quadratic() {
        // λ = 0 on the seed: u = t²/2 exactly
        let d = seed(3, qi(0));
        let quad = Quadrature::new(&d).unwrap();
        assert_eq!(quad.end_kind(), EndKind::Unbounded);
        for t in [0.5, 3.0, 40.0] {
            let s = quad.eval(t).unwrap();
            assert!((s.u / (t * t / 2.0) - 1.0).abs() < 1e-13);
            assert!((s.uddot - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn negative_lambda_profile() {
        let d = seed(2, qi(-1));
        let prof = quadrature_profile(&d, &ProfileRequest::default()).unwrap();
        assert!(prof.complete);
        assert!(prof.residual_max < 1e-8, "{}", prof.residual_max);
        assert!(prof.energy_max < 1e-10, "{}", prof.energy_max);
        assert!(prof.f.windows(2).all(|w| w[1] > w[0]));
        // CP^1 seed with λ = −1: u = 3 sinh²(t/√6)
        for (t, f) in prof.t.iter().zip(&prof.f).step_by(250) {
            let exact = d.kappa * 3.0 * (t / 6f64.sqrt()).sinh().powi(2);
            assert!(((f - exact) / exact.max(1.0)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn fd_is_sixth_order() {
        let dt = 0.01;
        let y: Vec<f64> = (0..200).map(|i| (i as f64 * dt).exp()).collect();
        let d = fd_derivative(&y, dt, false, false);
        for (i, v) in d.iter().enumerate() {
            assert!((v / (i as f64 * dt).exp() - 1.0).abs() < 1e-11, "{i}");
        }
        // odd continuation at both ends: y = sin on [0, π]·(derivative of an even fn)
        let n = 101;
        let dt = std::f64::consts::PI / (n - 1) as f64;
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * dt).sin()).collect();
        let d = fd_derivative(&y, dt, true, true);
        for (i, v) in d.iter().enumerate() {
            assert!((v - (i as f64 * dt).cos()).abs() < 1e-10, "{i}");
        }
        let w = fornberg_d1(&[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coarse_grids_keep_small_residuals() {
        for (n, lambda, samples) in [(3, qi(-2), 51), (2, qi(-1), 201), (3, qi(4), 9), (4, qi(1), 31)] {
            let d = seed(n, lambda);
            let prof = quadrature_profile(&d, &ProfileRequest { samples, ..Default::default() }).unwrap();
            assert!(prof.residual_max < 1e-8, "n={n} {}", prof.residual_max);
        }
    }

    #[test]
    fn f_max_truncates() {
        let d = seed(3, qi(-2));
        let req = ProfileRequest {
            f_max: Some(0.5),
            samples: 101,
            ..Default::default()
        };
        let prof = quadrature_profile(&d, &req).unwrap();
        assert!((prof.f.last().unwrap() - 0.5).abs() < 1e-12);
        let d = seed(3, q(4, 1));
        let req = ProfileRequest {
            f_max: Some(10.0),
            samples: 101,
            ..Default::default()
        };
        let prof = quadrature_profile(&d, &req).unwrap();
        assert!(!prof.warnings.is_empty());
        assert_eq!(prof.end_kind, EndKind::Turning);
        assert!(prof.fdot.last().unwrap().abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let d = seed(2, qi(3));
        let prof = quadrature_profile(&d, &ProfileRequest { samples: 11, ..Default::default() }).unwrap();
        let csv = prof.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,f,fdot,fddot,residual"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 5);
        assert_eq!(row[0], "0.0000000000000000e0");
        assert_eq!(csv.lines().count(), 12);
    }
}

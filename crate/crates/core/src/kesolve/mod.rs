//! Kähler–Einstein reduction on an admissible bundle.
//!
//! A metric is a curve `Z_t = Z_0 + f(t)Z⁰` in the chamber of `G/K`; the
//! Einstein condition splits into the algebraic identity
//! `Z^Kos = λZ_0 + κm Z⁰` and the ODE `f̈ + ½A(f)ḟ² + λf = κm`.
//!
//! Numerics run in the reduced variable `u = f/κ`, in which
//! `ü + ½Ã(u)u̇² + λu = m` with `Ã(u) = Σ b_α/(a_α + u b_α)`,
//! `a_α = α(Z_0)`, `b_α = α(P)`, and every coefficient is rational.

mod flat;
mod profile;
mod rk;
mod verdiani;

use std::fmt;

use num_traits::{One, Signed, Zero};
use num_integer::Integer;

use crate::bundles::{fiber_geometry, BundleSpec, FiberGeometry};
use crate::error::{Error, Result};
use crate::flags::{flag_data, FlagData, Root};
use crate::poly::{FloatPoly, Poly};
use crate::rootsys::Covector;
use crate::{frac, qi, Q};

pub use flat::{flat_divisibility, FlatVerdict};
pub use profile::{quadrature_profile, EndKind, KeProfile, ProfileRequest, Quadrature, Sample};
pub use rk::{rk_verify, RkReport};
pub use verdiani::{
    kaehler_closed_form, kaehler_profile, ke_boundary_check, verdiani_check, VerdianiReport,
};

/// Where the face point `Z_0` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Z0Source {
    /// `Z_0 = (Z^Kos − mP)/λ`.
    Solved,
    /// `λ = 0`: the Koszul vector of the base flag manifold.
    DefaultFace,
    /// `λ = 0`: supplied by the caller.
    Supplied,
}

impl fmt::Display for Z0Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Z0Source::Solved => "solved",
            Z0Source::DefaultFace => "default-face",
            Z0Source::Supplied => "supplied",
        })
    }
}

/// Why the algebraic condition has no admissible solution.
#[derive(Clone, Debug, PartialEq)]
pub enum Infeasibility {
    /// `λ = 0` but `Z^Kos ≠ mP`; `node` is the first black node of `G/K`
    /// (1-based) where the pairings differ.
    FlatMismatch { node: usize, koszul: Q, fibre: Q },
    /// `β(Z_0) ≠ 0`: `Z_0` is off the face.
    OffFace { value: Q },
    /// `β_j(Z_0) ≤ 0` for a black node of the base (1-based).
    Chamber { node: usize, value: Q },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::FlatMismatch { node, koszul, fibre } => write!(
                f,
                "flat-infeasible: Z^Kos != mP at node {node} ({} vs {})",
                frac::to_string(koszul),
                frac::to_string(fibre)
            ),
            Infeasibility::OffFace { value } => {
                write!(f, "off-face: beta(Z0) = {} != 0", frac::to_string(value))
            }
            Infeasibility::Chamber { node, value } => write!(
                f,
                "chamber-infeasible: beta_{node}(Z0) = {} <= 0",
                frac::to_string(value)
            ),
        }
    }
}

impl std::error::Error for Infeasibility {}

/// A complementary root of `G/K` with its pair `(a, b) = (α(Z_0), α(P))`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootPair {
    pub root: Root,
    pub a: Q,
    pub b: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeProblem {
    pub spec: BundleSpec,
    pub flag_k: FlagData,
    pub geometry: FiberGeometry,
    pub m: usize,
    pub lambda: Q,
    pub z0: Covector,
    pub z0_source: Z0Source,
    pub root_pairs: Vec<RootPair>,
}

impl KeProblem {
    pub fn kappa(&self) -> f64 {
        self.geometry.kappa()
    }

    /// `c = κm`, the only admissible right-hand side.
    pub fn c(&self) -> f64 {
        self.kappa() * self.m as f64
    }

    /// `Z_0` in the h-coordinates of `G/K` (its black pairings).
    pub fn z0_h_coords(&self) -> Vec<Q> {
        self.flag_k.h_coords(&self.z0).expect("Z0 lies in t_K")
    }

    /// `λZ_0 = Z^Kos − mP`, an invariant of the bundle.
    pub fn lambda_z0(&self) -> Covector {
        self.z0.scale(self.lambda)
    }
}

pub type Feasibility = std::result::Result<KeProblem, Infeasibility>;

/// Solves `Z^Kos = λZ_0 + mP` for `Z_0` on the face `{β = 0}`.
pub fn solve_algebraic(spec: &BundleSpec, lambda: Q) -> Result<Feasibility> {
    solve_algebraic_with(spec, lambda, None)
}

/// As [`solve_algebraic`]; for `λ = 0` a face point may be given by its
/// black pairings on the base diagram.
pub fn solve_algebraic_with(
    spec: &BundleSpec,
    lambda: Q,
    z0_override: Option<&[Q]>,
) -> Result<Feasibility> {
    let geometry = fiber_geometry(spec)?;
    let flag_k = flag_data(&geometry.k_diagram)?;
    let rs = spec.base().root_system();
    let m = spec.m();
    let mp = geometry.p.scale(qi(m as i128));
    let base = spec.base();

    if z0_override.is_some() && !lambda.is_zero() {
        return Err(Error::InvalidParameter(
            "Z0 is determined by the algebraic condition when lambda != 0".into(),
        ));
    }

    let (z0, source) = if lambda.is_zero() {
        if flag_k.koszul != mp {
            let k = &geometry.k_diagram;
            let (node, koszul, fibre) = k
                .black_nodes()
                .into_iter()
                .map(|j| {
                    (j, rs.pair(&flag_k.koszul, &k.base()[j]), rs.pair(&mp, &k.base()[j]))
                })
                .find(|(_, x, y)| x != y)
                .ok_or_else(|| Error::Internal("Koszul mismatch invisible on t_K".into()))?;
            return Ok(Err(Infeasibility::FlatMismatch {
                node: node + 1,
                koszul,
                fibre,
            }));
        }
        let flag_h = flag_data(base)?;
        match z0_override {
            Some(x) => (flag_h.from_h_coords(x)?, Z0Source::Supplied),
            None => (flag_h.koszul.clone(), Z0Source::DefaultFace),
        }
    } else {
        let z0 = (&flag_k.koszul - &mp).scale(Q::one() / lambda);
        (z0, Z0Source::Solved)
    };

    if let Some(b) = geometry.beta {
        let v = rs.pair(&z0, &base.base()[b]);
        if !v.is_zero() {
            return Ok(Err(Infeasibility::OffFace { value: v }));
        }
    }
    for j in base.black_nodes() {
        let v = rs.pair(&z0, &base.base()[j]);
        if !v.is_positive() {
            return Ok(Err(Infeasibility::Chamber {
                node: j + 1,
                value: v,
            }));
        }
    }

    let root_pairs = flag_k
        .roots_m_pos
        .iter()
        .map(|r| RootPair {
            root: r.clone(),
            a: rs.pair(&r.vector, &z0),
            b: rs.pair(&r.vector, &geometry.p),
        })
        .collect();
    Ok(Ok(KeProblem {
        spec: spec.clone(),
        flag_k,
        geometry,
        m,
        lambda,
        z0,
        z0_source: source,
        root_pairs,
    }))
}

/// Coefficients of the reduced Einstein ODE.
///
/// `P̃(u) = Π(a + ub)` and `Q̃(u) = 2∫₀^u (m − λv)P̃(v)dv` are stored up to a
/// common positive factor `scale`: every linear factor is made primitive
/// integral first, which keeps the exact coefficients small. In the
/// original variable `P(f) = P̃(f/κ)`, `Q(f) = κ²Q̃(f/κ)` and
/// `A(f) = Ã(f/κ)/κ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeData {
    pub kappa_sq: Q,
    pub kappa: f64,
    pub m: usize,
    pub lambda: Q,
    /// `(a, b)` over the positive complementary roots of `G/K`.
    pub pairs: Vec<(Q, Q)>,
    /// Number of pairs with `a = 0`.
    pub k0: usize,
    /// `Σ_{a≠0} b/a`.
    pub a1: Q,
    pub p_tilde: Poly,
    pub q_tilde: Poly,
    pub scale: f64,
}

fn primitive(a: Q, b: Q) -> (Q, Q, Q) {
    let den = a.denom().lcm(b.denom());
    let (x, y) = (a * qi(den), b * qi(den));
    let g = x.numer().gcd(y.numer());
    let s = Q::new(g, den);
    (a / s, b / s, s)
}

pub fn ode_data(problem: &KeProblem) -> Result<OdeData> {
    let mut pairs = Vec::with_capacity(problem.root_pairs.len());
    for rp in &problem.root_pairs {
        if rp.a.is_negative() || (rp.a.is_zero() && !rp.b.is_positive()) {
            return Err(Error::Chamber(format!(
                "root {:?}: a = {}, b = {}",
                rp.root.coeffs,
                frac::to_string(&rp.a),
                frac::to_string(&rp.b)
            )));
        }
        pairs.push((rp.a, rp.b));
    }
    let k0 = pairs.iter().filter(|(a, _)| a.is_zero()).count();
    if k0 + 1 != problem.m {
        return Err(Error::Internal(format!(
            "{k0} roots vanish on Z0, expected m - 1 = {}",
            problem.m - 1
        )));
    }
    let a1 = pairs
        .iter()
        .filter(|(a, _)| !a.is_zero())
        .fold(Q::zero(), |acc, (a, b)| acc + b / a);
    let mut p_tilde = Poly::constant(Q::one());
    let mut scale = 1.0;
    for &(a, b) in &pairs {
        let (x, y, s) = primitive(a, b);
        p_tilde = &p_tilde * &Poly::linear(x, y);
        scale *= frac::to_f64(&s);
    }
    let m = qi(problem.m as i128);
    let integrand = &Poly::linear(m, -problem.lambda) * &p_tilde;
    let q_tilde = integrand.integral().scale(qi(2));
    Ok(OdeData {
        kappa_sq: problem.geometry.kappa_sq,
        kappa: problem.kappa(),
        m: problem.m,
        lambda: problem.lambda,
        pairs,
        k0,
        a1,
        p_tilde,
        q_tilde,
        scale,
    })
}

impl OdeData {
    pub fn lambda_f64(&self) -> f64 {
        frac::to_f64(&self.lambda)
    }

    /// `c = κm`.
    pub fn c(&self) -> f64 {
        self.kappa * self.m as f64
    }

    /// `Ã(u)` for `u > 0`.
    pub fn a_tilde(&self, u: f64) -> f64 {
        self.pairs
            .iter()
            .map(|(a, b)| {
                let (a, b) = (frac::to_f64(a), frac::to_f64(b));
                b / (a + u * b)
            })
            .sum()
    }

    /// `A(f) = Σ α(Z⁰)/(α(Z_0) + fα(Z⁰))`.
    pub fn a_of_f(&self, f: f64) -> f64 {
        self.a_tilde(f / self.kappa) / self.kappa
    }

    /// `P(f) = Π(α(Z_0) + fα(Z⁰))`.
    pub fn p_of_f(&self, f: f64) -> f64 {
        self.scale * self.p_tilde.to_f64().eval(f / self.kappa)
    }

    /// `Q(f) = 2∫₀^f (κm − λv)P(v)dv`.
    pub fn q_of_f(&self, f: f64) -> f64 {
        self.kappa_sq_f64() * self.scale * self.q_tilde.to_f64().eval(f / self.kappa)
    }

    fn kappa_sq_f64(&self) -> f64 {
        frac::to_f64(&self.kappa_sq)
    }

    /// Coefficients of `P` in powers of `f`.
    pub fn p_coeffs(&self) -> Vec<f64> {
        self.p_tilde
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| self.scale * frac::to_f64(c) / self.kappa.powi(i as i32))
            .collect()
    }

    /// Coefficients of `Q` in powers of `f`.
    pub fn q_coeffs(&self) -> Vec<f64> {
        self.q_tilde
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| self.scale * frac::to_f64(c) * self.kappa.powi(2 - i as i32))
            .collect()
    }

    /// Relative defect of `ḟ²P(f) = Q(f)` measured against the magnitude
    /// of the terms involved; invariant under `f = κu`.
    pub fn energy_defect(&self, f: f64, fdot: f64) -> f64 {
        let u = f / self.kappa;
        let up = fdot / self.kappa;
        let (p, q) = (self.p_tilde.to_f64(), self.q_tilde.to_f64());
        energy_defect_reduced(&p, &q, u, up)
    }

    /// `u(t) = t²/2 + c₄t⁴ + …`, `c₄ = −(Σ_{a≠0} b/a + λ)/(12(m+1))`.
    pub fn taylor_c4(&self) -> f64 {
        -frac::to_f64(&(self.a1 + self.lambda)) / (12.0 * (self.m as f64 + 1.0))
    }

    /// Smallest `−a/b` over `b < 0`: where `Z_0 + uP` leaves the chamber.
    pub fn chamber_exit(&self) -> Option<Q> {
        self.pairs
            .iter()
            .filter(|(_, b)| b.is_negative())
            .map(|(a, b)| -a / b)
            .min()
    }
}

pub(crate) fn energy_defect_reduced(p: &FloatPoly, q: &FloatPoly, u: f64, up: f64) -> f64 {
    let lhs = up * up * p.eval(u);
    let rhs = q.eval(u);
    let scale = (up * up * p.eval_abs(u)).max(q.eval_abs(u));
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Completeness {
    pub complete: bool,
    /// `β_j(P) > 0` for every black node of `G/K`, so the ray `Z_0 + fZ⁰`
    /// never leaves the chamber.
    pub ray_certificate: bool,
    /// `f* = κm/λ` where `f̈` would change sign (λ > 0).
    pub turning_value: Option<f64>,
    /// Finite end of the `t`-domain, if any.
    pub domain_end: Option<f64>,
    /// Value of `f` at the finite end.
    pub f_end: Option<f64>,
    pub end_kind: EndKind,
}

pub fn completeness(problem: &KeProblem) -> Result<Completeness> {
    let rs = problem.spec.base().root_system();
    let k = &problem.geometry.k_diagram;
    let ray_certificate = k
        .black_nodes()
        .iter()
        .all(|&j| rs.pair(&problem.geometry.p, &k.base()[j]).is_positive());
    let data = ode_data(problem)?;
    let quad = Quadrature::new(&data)?;
    let lambda = data.lambda_f64();
    Ok(Completeness {
        complete: !problem.lambda.is_positive() && ray_certificate && quad.t_end().is_none(),
        ray_certificate,
        turning_value: (lambda > 0.0).then(|| data.c() / lambda),
        domain_end: quad.t_end(),
        f_end: quad.u_end().map(|u| u * data.kappa),
        end_kind: quad.end_kind(),
    })
}

/// Per-root observables along a profile.
#[derive(Clone, Debug, PartialEq)]
pub struct RootTrack {
    pub root: Root,
    pub a: Q,
    pub b: Q,
    /// `2α(Z_t)/⟨α,α⟩`.
    pub eigenvalue: Vec<f64>,
    /// `α(Z_0) + f(t)α(Z⁰)`.
    pub b_track: Vec<f64>,
    pub positive: bool,
    /// Strictly monotone (in the direction of `b`), or constant when `b = 0`.
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observables {
    pub tracks: Vec<RootTrack>,
    /// `Z_0 + f(t)Z⁰` in the closed chamber at `t = 0` (tolerance 1e-12)
    /// and the open chamber for `t > 0`.
    pub chamber_ok: bool,
    /// First `(t, root index)` where positivity fails.
    pub violation: Option<(f64, usize)>,
}

pub fn profile_observables(problem: &KeProblem, profile: &KeProfile) -> Result<Observables> {
    let rs = problem.spec.base().root_system();
    let kappa = problem.kappa();
    let mut violation = None;
    let tracks: Vec<RootTrack> = problem
        .root_pairs
        .iter()
        .enumerate()
        .map(|(idx, rp)| {
            let (a, b) = (frac::to_f64(&rp.a), frac::to_f64(&rp.b));
            let norm = frac::to_f64(&rs.norm_sq(&rp.root.vector));
            let b_track: Vec<f64> = profile.f.iter().map(|f| a + f / kappa * b).collect();
            let eigenvalue: Vec<f64> = b_track.iter().map(|x| 2.0 * x / norm).collect();
            let mut positive = true;
            for (t, x) in profile.t.iter().zip(&b_track) {
                if *t > 0.0 && *x <= 0.0 {
                    positive = false;
                    if violation.is_none_or(|(tv, _)| *t < tv) {
                        violation = Some((*t, idx));
                    }
                    break;
                }
            }
            let monotone = b_track.windows(2).all(|w| match rp.b.signum() {
                s if s.is_positive() => w[1] > w[0],
                s if s.is_negative() => w[1] < w[0],
                _ => w[1] == w[0],
            });
            RootTrack {
                root: rp.root.clone(),
                a: rp.a,
                b: rp.b,
                eigenvalue,
                b_track,
                positive,
                monotone,
            }
        })
        .collect();

    let k = &problem.geometry.k_diagram;
    let walls: Vec<(f64, f64)> = k
        .black_nodes()
        .iter()
        .map(|&j| {
            (
                frac::to_f64(&rs.pair(&problem.z0, &k.base()[j])),
                frac::to_f64(&rs.pair(&problem.geometry.p, &k.base()[j])),
            )
        })
        .collect();
    let chamber_ok = profile.t.iter().zip(&profile.f).all(|(t, f)| {
        walls.iter().all(|(z, p)| {
            let v = z + f / kappa * p;
            if *t > 0.0 {
                v > 0.0
            } else {
                v > -1e-12
            }
        })
    });
    Ok(Observables {
        tracks,
        chamber_ok,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::enumerate_bundles;
    use crate::flags::PaintedDiagram;
    use crate::{q, Family};

    #[test]
    fn su_seed_einstein_constant() {
        for n in 2..=6usize {
            let spec = BundleSpec::su_seed(n).unwrap();
            let p = solve_algebraic(&spec, qi(n as i128 + 1)).unwrap().unwrap();
            assert!(p.z0.is_zero());
            assert_eq!(p.z0_source, Z0Source::Solved);
            let d = ode_data(&p).unwrap();
            assert_eq!(d.k0, n - 1);
            assert!(d.pairs.iter().all(|&(a, b)| a.is_zero() && b == q(1, 2 * n as i128)));
            assert!((d.c() - ((n - 1) as f64 / 2.0).sqrt()).abs() < 1e-14);
            // A(f) = (n-1)/f
            let f = 0.37;
            assert!((d.a_of_f(f) - (n - 1) as f64 / f).abs() < 1e-12);
            assert!((d.taylor_c4() + 1.0 / 12.0).abs() < 1e-15);
        }
    }

    #[test]
    fn su_seed_flat_is_degenerate_but_feasible() {
        let spec = BundleSpec::su_seed(4).unwrap();
        let p = solve_algebraic(&spec, qi(0)).unwrap().unwrap();
        assert!(p.z0.is_zero());
        assert_eq!(p.z0_source, Z0Source::DefaultFace);
    }

    #[test]
    fn lambda_times_z0_is_invariant() {
        for d in PaintedDiagram::all_up_to_rank(3) {
            for spec in enumerate_bundles(&d, 2) {
                let inv = {
                    let fk = flag_data(&fiber_geometry(&spec).unwrap().k_diagram).unwrap();
                    let g = fiber_geometry(&spec).unwrap();
                    &fk.koszul - &g.p.scale(qi(spec.m() as i128))
                };
                for lambda in [q(-3, 2), qi(-1), q(1, 3), qi(2)] {
                    if let Ok(p) = solve_algebraic(&spec, lambda).unwrap() {
                        assert_eq!(p.lambda_z0(), inv);
                        let half = solve_algebraic(&spec, lambda / qi(2)).unwrap().unwrap();
                        assert_eq!(half.z0, p.z0.scale(qi(2)));
                    }
                }
            }
        }
    }

    #[test]
    fn beta_koszul_coefficient_equals_m() {
        // β(Z_0) = 0 is automatic: the Koszul coefficient of β on G/K is m
        for d in PaintedDiagram::all_up_to_rank(4) {
            for spec in enumerate_bundles(&d, 0) {
                for lambda in [qi(-1), qi(1)] {
                    let r = solve_algebraic(&spec, lambda).unwrap();
                    assert!(!matches!(r, Err(Infeasibility::OffFace { .. })), "{spec}");
                }
            }
        }
    }

    #[test]
    fn chamber_infeasibility_is_reported() {
        // A_2 black {2}, string {1}, trivial character: Z_0 for large λ of
        // the wrong sign leaves the chamber.
        let d = PaintedDiagram::new(Family::A, 2, [1]).unwrap();
        let spec = BundleSpec::new(d, vec![0], Some(crate::bundles::End::Left), vec![0]).unwrap();
        let results: Vec<_> = [qi(-1), qi(1)]
            .iter()
            .map(|l| solve_algebraic(&spec, *l).unwrap())
            .collect();
        assert!(results.iter().any(|r| matches!(r, Err(Infeasibility::Chamber { node: 2, .. }))));
        assert!(results.iter().any(|r| r.is_ok()));
    }

    #[test]
    fn override_rules() {
        let spec = BundleSpec::su_seed(3).unwrap();
        assert!(solve_algebraic_with(&spec, qi(1), Some(&[])).is_err());
        let d = PaintedDiagram::new(Family::A, 2, [1]).unwrap();
        let line = BundleSpec::new(d, vec![], None, vec![1]).unwrap();
        let p = solve_algebraic(&line, qi(0)).unwrap();
        if let Ok(p) = p {
            let alt = solve_algebraic_with(&line, qi(0), Some(&[qi(5)])).unwrap().unwrap();
            assert_eq!(alt.z0_source, Z0Source::Supplied);
            assert_eq!(alt.z0_h_coords(), vec![qi(5)]);
            assert_eq!(p.z0_source, Z0Source::DefaultFace);
            assert!(matches!(
                solve_algebraic_with(&line, qi(0), Some(&[qi(-1)])).unwrap(),
                Err(Infeasibility::Chamber { .. })
            ));
        }
    }

    #[test]
    fn primitive_factors() {
        let (x, y, s) = primitive(q(3, 4), q(-3, 8));
        assert_eq!((x, y), (qi(2), qi(-1)));
        assert_eq!(s, q(3, 8));
        let (x, y, _) = primitive(qi(0), q(1, 6));
        assert_eq!((x, y), (qi(0), qi(1)));
    }

    #[test]
    fn ode_coefficients_in_f() {
        let spec = BundleSpec::su_seed(3).unwrap();
        let p = solve_algebraic(&spec, qi(4)).unwrap().unwrap();
        let d = ode_data(&p).unwrap();
        let f: f64 = 0.05;
        let pc = d.p_coeffs();
        let direct: f64 = pc.iter().enumerate().map(|(i, c)| c * f.powi(i as i32)).sum();
        assert!((direct - d.p_of_f(f)).abs() < 1e-15);
        // Q' = 2(c − λf)P
        let h = 1e-6;
        let dq = (d.q_of_f(f + h) - d.q_of_f(f - h)) / (2.0 * h);
        assert!((dq - 2.0 * (d.c() - 4.0 * f) * d.p_of_f(f)).abs() < 1e-9);
    }
}

//! Acceptance criteria as runnable checks, shared by the test harness and
//! the `suite` command.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::time::{Duration, Instant};

use num_traits::Zero;

use crate::bundles::{enumerate_bundles, fiber_geometry, BundleSpec, End};
use crate::error::{Error, Result};
use crate::flags::{flag_data, PaintedDiagram};
use crate::kesolve::{
    completeness, flat_divisibility, kaehler_closed_form, kaehler_profile, ode_data,
    profile_observables, quadrature_profile, rk_verify, solve_algebraic, verdiani_check, EndKind,
    KeProfile, ProfileRequest,
};
use crate::killing::killing_scale_oracle;
use crate::oracle;
use crate::rootsys::{killing_scale_candidate, Family};
use crate::{frac, q, qi, Q};

pub const CPN_TOL: f64 = 1e-6;
pub const KILLING_TOL: f64 = 1e-9;
pub const DUAL_TOL: f64 = 1e-8;
pub const ENERGY_TOL: f64 = 1e-10;
pub const VERDIANI_TOL: f64 = 1e-10;
pub const LATTICE_BOUND: i64 = 20;
pub const T_FAR: f64 = 50.0;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

fn run(id: u8, name: &'static str, limit: Option<f64>, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    let start = Instant::now();
    let (mut passed, mut detail) = match body() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed.as_secs_f64() >= limit {
            passed = false;
            detail.push_str(&format!("; runtime {:.1} s exceeds {limit} s", elapsed.as_secs_f64()));
        }
    }
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed,
    }
}

/// One `SU(n)` seed end to end; returns the sup error against the closed form.
pub fn verify_cpn(n: usize) -> Result<CpnReport> {
    let spec = BundleSpec::su_seed(n)?;
    let g = fiber_geometry(&spec)?;
    let ni = n as i128;
    let kappa_exact = g.kappa_sq == q(ni - 1, 2 * ni * ni);
    let lambda = qi(ni + 1);
    let problem = solve_algebraic(&spec, lambda)?
        .map_err(|e| Error::Internal(format!("seed infeasible: {e}")))?;
    let data = ode_data(&problem)?;
    // c = κn  ⇔  c² = κ²n² = (n−1)/2
    let c_exact = g.kappa_sq * qi(ni * ni) == q(ni - 1, 2);
    let t_hi = 0.9 * PI / SQRT_2;
    let prof = quadrature_profile(
        &data,
        &ProfileRequest {
            t_max: t_hi,
            samples: 2001,
            f_max: None,
        },
    )?;
    let max_err = prof
        .t
        .iter()
        .zip(&prof.f)
        .map(|(t, f)| (f - oracle::cpn_profile(n, *t)).abs())
        .fold(0.0, f64::max);
    Ok(CpnReport {
        n,
        kappa_sq: g.kappa_sq,
        kappa_exact,
        z0_zero: problem.z0.is_zero(),
        lambda,
        c: problem.c(),
        c_exact,
        max_err,
        energy_max: prof.energy_max,
    })
}

#[derive(Clone, Debug)]
pub struct CpnReport {
    pub n: usize,
    pub kappa_sq: Q,
    pub kappa_exact: bool,
    pub z0_zero: bool,
    pub lambda: Q,
    pub c: f64,
    pub c_exact: bool,
    pub max_err: f64,
    pub energy_max: f64,
}

impl CpnReport {
    pub fn passed(&self) -> bool {
        self.kappa_exact && self.z0_zero && self.c_exact && self.max_err < CPN_TOL
    }
}

pub fn criterion_1() -> CriterionResult {
    run(1, "CP^n reproduction", None, || {
        let mut ok = true;
        let mut parts = vec![];
        for n in 2..=5 {
            let start = Instant::now();
            let r = verify_cpn(n)?;
            let secs = start.elapsed().as_secs_f64();
            ok &= r.passed() && secs < 5.0;
            parts.push(format!(
                "n={n}: kappa^2={} c={:.6} err={:.1e}",
                frac::to_string(&r.kappa_sq),
                r.c,
                r.max_err
            ));
        }
        Ok((ok, parts.join(", ")))
    })
}

pub fn criterion_2() -> CriterionResult {
    run(2, "A(f) = (n-1)/f", None, || {
        let mut ok = true;
        for n in 2..=5usize {
            let spec = BundleSpec::su_seed(n)?;
            let p = solve_algebraic(&spec, qi(n as i128 + 1))?
                .map_err(|e| Error::Internal(e.to_string()))?;
            let zero_a = p.root_pairs.iter().filter(|r| r.a.is_zero()).count();
            let b0 = p.root_pairs[0].b;
            let all_b = p.root_pairs.iter().all(|r| r.b == b0);
            ok &= zero_a == n - 1 && p.root_pairs.len() == n - 1 && all_b;
            // A(f) = Σ b/(fb/κ)/κ = (n−1)/f exactly when every a vanishes
        }
        Ok((ok, "n-1 pairs with a = 0 and equal b for n = 2..5".into()))
    })
}

pub fn criterion_3() -> CriterionResult {
    run(3, "Koszul exactness", None, || {
        let mut count = 0;
        for d in PaintedDiagram::all_up_to_rank(4) {
            let f = flag_data(&d)?;
            if f.koszul_vector != oracle::koszul_by_root_sum(&f) {
                return Ok((false, format!("mismatch on {:?}", d.to_json())));
            }
            count += 1;
        }
        for n in 2..=8 {
            let f = flag_data(&PaintedDiagram::new(Family::A, n - 1, [0])?)?;
            let rs = f.root_system();
            if rs.inner(&f.diagram.base()[0], &f.koszul)? != q(1, 2) {
                return Ok((false, format!("beta(Z^Kos) != 1/2 for n = {n}")));
            }
        }
        Ok((true, format!("{count} diagrams agree; beta(Z^Kos) = 1/2 for CP^1..CP^7")))
    })
}

pub fn criterion_4() -> CriterionResult {
    run(4, "Killing-scale certification", Some(30.0), || {
        let mut worst: f64 = 0.0;
        for family in Family::ALL {
            for rank in 2..=5 {
                let s = killing_scale_oracle(family, rank)?;
                let c = frac::to_f64(&killing_scale_candidate(family, rank));
                worst = worst.max((s - c).abs());
            }
        }
        Ok((worst < KILLING_TOL, format!("max |oracle - candidate| = {worst:.1e} over A/B/C/D ranks 2-5")))
    })
}

/// A fixed battery of feasible problems across families and signs of `λ`.
pub fn battery() -> Result<Vec<(String, BundleSpec, Q)>> {
    let d = |f: Family, r: usize, black: &[usize]| PaintedDiagram::new(f, r, black.iter().map(|i| i - 1));
    let s = |base: PaintedDiagram, string: &[usize], end: Option<End>, ch: &[i64]| {
        BundleSpec::new(base, string.iter().map(|i| i - 1).collect(), end, ch.to_vec())
    };
    let l = Some(End::Left);
    let r = Some(End::Right);
    let cases = vec![
        ("SU(3) seed", BundleSpec::su_seed(3)?, qi(-2)),
        ("A3 [1] string 2-3", s(d(Family::A, 3, &[1])?, &[2, 3], l, &[2])?, qi(-2)),
        ("D4 [1] string 3-2-4", s(d(Family::D, 4, &[1])?, &[3, 2, 4], l, &[2])?, qi(-2)),
        ("A1 line bundle", s(d(Family::A, 1, &[1])?, &[], None, &[2])?, qi(-2)),
        ("SU(4) seed", BundleSpec::su_seed(4)?, qi(-1)),
        ("B2 [1] string 2", s(d(Family::B, 2, &[1])?, &[2], l, &[2])?, qi(-1)),
        ("A2 [1] string 2", s(d(Family::A, 2, &[1])?, &[2], l, &[2])?, qi(-1)),
        ("SU(3) seed", BundleSpec::su_seed(3)?, qi(0)),
        ("C3 [3] string 1-2", s(d(Family::C, 3, &[3])?, &[1, 2], r, &[2])?, qi(0)),
        ("D4 [1,3] string 2-4", s(d(Family::D, 4, &[1, 3])?, &[2, 4], l, &[2, 2])?, qi(0)),
        ("A2 full flag line bundle", s(d(Family::A, 2, &[1, 2])?, &[], None, &[2, 2])?, qi(0)),
        ("SU(2) seed", BundleSpec::su_seed(2)?, qi(1)),
        ("B3 [2] string 3", s(d(Family::B, 3, &[2])?, &[3], l, &[1])?, qi(1)),
        ("A3 [2] string 1", s(d(Family::A, 3, &[2])?, &[1], l, &[1])?, qi(1)),
        ("A2 full flag line bundle", s(d(Family::A, 2, &[1, 2])?, &[], None, &[1, 1])?, qi(1)),
    ];
    Ok(cases.into_iter().map(|(a, b, c)| (a.to_string(), b, c)).collect())
}

#[derive(Clone, Debug)]
pub struct BatteryRun {
    pub label: String,
    pub lambda: Q,
    pub profile: KeProfile,
    pub discrepancy: f64,
    pub complete: bool,
    pub chamber_ok: bool,
}

pub fn run_battery() -> Result<Vec<BatteryRun>> {
    battery()?
        .into_iter()
        .map(|(label, spec, lambda)| {
            let p = solve_algebraic(&spec, lambda)?
                .map_err(|e| Error::Internal(format!("battery case {label} infeasible: {e}")))?;
            let data = ode_data(&p)?;
            let profile = quadrature_profile(&data, &ProfileRequest::default())?;
            let rk = rk_verify(&data, &profile)?;
            let c = completeness(&p)?;
            let obs = profile_observables(&p, &profile)?;
            Ok(BatteryRun {
                label: format!("{label} (lambda={})", frac::to_string(&lambda)),
                lambda,
                discrepancy: rk.max_discrepancy,
                complete: c.complete,
                chamber_ok: obs.chamber_ok && obs.violation.is_none(),
                profile,
            })
        })
        .collect()
}

pub fn criterion_5(runs: &Result<Vec<BatteryRun>>, elapsed: Duration) -> CriterionResult {
    let mut r = run(5, "Dual-method ODE agreement", None, || {
        let runs = runs.as_ref().map_err(Clone::clone)?;
        let disc = runs.iter().map(|r| r.discrepancy).fold(0.0, nan_max);
        let res = runs.iter().map(|r| r.profile.residual_max).fold(0.0, nan_max);
        let lambdas: std::collections::BTreeSet<Q> = runs.iter().map(|r| r.lambda).collect();
        let ok = disc < DUAL_TOL && res < DUAL_TOL && runs.len() >= 5 && lambdas.len() >= 4;
        Ok((
            ok,
            format!(
                "{} problems, lambda in {{-2,-1,0,1}}: quad vs RK {disc:.1e}, ODE residual {res:.1e}",
                runs.len()
            ),
        ))
    });
    r.elapsed += elapsed;
    if r.elapsed.as_secs_f64() >= 60.0 {
        r.passed = false;
        r.detail.push_str("; runtime exceeds 60 s");
    }
    r
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

pub fn criterion_6(runs: &Result<Vec<BatteryRun>>) -> CriterionResult {
    run(6, "Energy identity", None, || {
        let runs = runs.as_ref().map_err(Clone::clone)?;
        let mut worst = runs.iter().map(|r| r.profile.energy_max).fold(0.0, nan_max);
        for n in 2..=5 {
            worst = nan_max(worst, verify_cpn(n)?.energy_max);
        }
        Ok((worst < ENERGY_TOL, format!("max normalised |f'^2 P - Q| = {worst:.1e}")))
    })
}

pub fn criterion_7(runs: &Result<Vec<BatteryRun>>) -> CriterionResult {
    run(7, "Completeness dichotomy", None, || {
        let runs = runs.as_ref().map_err(Clone::clone)?;
        for r in runs {
            let p = &r.profile;
            if !r.chamber_ok {
                return Ok((false, format!("{}: leaves the chamber", r.label)));
            }
            if r.lambda <= Q::zero() {
                let last = *p.t.last().unwrap_or(&0.0);
                let inc = p.f.windows(2).all(|w| w[1] > w[0]);
                let f25 = p.f_at(25.0).unwrap_or(f64::NAN);
                let f50 = p.f_at(T_FAR).unwrap_or(f64::NAN);
                if !(r.complete && p.end_kind == EndKind::Unbounded && last >= T_FAR && inc && f50 > f25) {
                    return Ok((false, format!("{}: not a complete increasing profile", r.label)));
                }
            } else {
                let fdot_scale = p.fdot.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                let end_ok = p.domain_end.is_some_and(f64::is_finite)
                    && p.end_kind == EndKind::Turning
                    && p.fdot.last().is_some_and(|v| v.abs() <= 1e-8 * fdot_scale);
                if r.complete || !end_ok {
                    return Ok((false, format!("{}: no finite turning end", r.label)));
                }
            }
        }
        let neg = runs.iter().filter(|r| r.lambda <= Q::zero()).count();
        Ok((
            true,
            format!("{neg} lambda<=0 profiles reach t=50 increasing; {} lambda>0 end with f'=0", runs.len() - neg),
        ))
    })
}

pub fn criterion_8() -> CriterionResult {
    run(8, "Flat divisibility", Some(60.0), || {
        let mut cases = 0;
        let mut feasible = 0;
        let mut literal_disagree = 0;
        for d in PaintedDiagram::all_up_to_rank(4) {
            let mut specs = enumerate_bundles(&d, 0);
            if !d.black().is_empty() {
                let mut c = vec![0; d.black().len()];
                c[0] = 1;
                specs.push(BundleSpec::new(d.clone(), vec![], None, c)?);
            }
            for spec in specs {
                let v = flat_divisibility(&spec)?;
                let search = oracle::flat_lattice_search(&spec, LATTICE_BOUND)?;
                cases += 1;
                if v.feasible != search.is_some() || (search.is_some() && v.witness != search) {
                    return Ok((false, format!("{:?} {spec}: verdict {} vs search {:?}", d.to_json(), v.feasible, search)));
                }
                if v.feasible {
                    feasible += 1;
                    if !v.round_trip(&spec)? {
                        return Ok((false, format!("{spec}: witness fails solve_algebraic(0)")));
                    }
                }
                if v.divisible != v.feasible {
                    literal_disagree += 1;
                }
            }
        }
        Ok((
            true,
            format!(
                "{cases} bundles, {feasible} Ricci-flat, all witnesses round-trip; weight-lattice divisibility differs on {literal_disagree}"
            ),
        ))
    })
}

pub fn criterion_9() -> CriterionResult {
    run(9, "Verdiani checks", None, || {
        let mut worst: f64 = 0.0;
        for &d in &[0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            for &kappa in &[0.05, 0.2, 0.5, 1.0, 2.0, 4.0] {
                let r = verdiani_check(|t| kaehler_closed_form(d, kappa, t).0, kappa, 1e-2 * (d / kappa).sqrt().min(1.0));
                worst = worst.max(r.max_error());
                let p = kaehler_profile(d, kappa, 10.0, 201)?;
                worst = worst.max(p.f[0].abs()).max(p.fdot[0].abs()).max((p.fddot[0] - kappa).abs());
            }
        }
        Ok((worst < VERDIANI_TOL, format!("max boundary error {worst:.1e} over 36 (d, kappa) pairs")))
    })
}

/// Every criterion in order; the battery shared by 5–7 runs once.
pub fn run_all(parallel: bool) -> Vec<CriterionResult> {
    let battery_job = || {
        let start = Instant::now();
        let runs = run_battery();
        let elapsed = start.elapsed();
        vec![criterion_5(&runs, elapsed), criterion_6(&runs), criterion_7(&runs)]
    };
    let mut out = if parallel {
        std::thread::scope(|s| {
            let h1 = s.spawn(|| vec![criterion_1(), criterion_2(), criterion_3()]);
            let h4 = s.spawn(|| vec![criterion_4()]);
            let h5 = s.spawn(battery_job);
            let h8 = s.spawn(|| vec![criterion_8(), criterion_9()]);
            [h1, h4, h5, h8]
                .into_iter()
                .flat_map(|h| h.join().expect("criterion thread panicked"))
                .collect::<Vec<_>>()
        })
    } else {
        let mut v = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4()];
        v.extend(battery_job());
        v.push(criterion_8());
        v.push(criterion_9());
        v
    };
    out.sort_by_key(|r| r.id);
    out
}

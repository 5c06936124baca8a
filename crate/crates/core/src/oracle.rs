//! Independent reference computations used to certify the main routines.
//!
//! Each oracle takes a deliberately different route: root strings from the
//! Cartan matrix instead of ε-coordinates, reflection closure, Koszul sums
//! over pairings, closed-form profiles, and exhaustive lattice search.

use std::collections::BTreeSet;

use crate::bundles::{fiber_geometry, BundleSpec};
use crate::error::Result;
use crate::flags::{flag_data, FlagData};
use crate::rootsys::{combination, Covector, RootSystem};
use crate::{qi, Q};

fn key(x: &Covector) -> Vec<Q> {
    x.projected().coords().to_vec()
}

/// Positive roots as coefficient vectors, grown one simple root at a time
/// with the root-string rule `p − q = −⟨γ, α_i^∨⟩`.
pub fn positive_roots_by_strings(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let r = cartan.len();
    let mut all: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut layer: Vec<Vec<i64>> = (0..r)
        .map(|i| {
            let mut e = vec![0; r];
            e[i] = 1;
            e
        })
        .collect();
    all.extend(layer.iter().cloned());
    while !layer.is_empty() {
        let mut next = BTreeSet::new();
        for g in &layer {
            for i in 0..r {
                let mut q = 0;
                let mut down = g.clone();
                loop {
                    down[i] -= 1;
                    if down[i] < 0 || !all.contains(&down) {
                        break;
                    }
                    q += 1;
                }
                let pair: i64 = (0..r).map(|j| g[j] * cartan[j][i]).sum();
                if q - pair > 0 {
                    let mut up = g.clone();
                    up[i] += 1;
                    if !all.contains(&up) {
                        next.insert(up);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next.into_iter().collect();
    }
    all.into_iter().collect()
}

/// Whole root system from the Cartan-matrix string construction.
pub fn roots_by_strings(rs: &RootSystem) -> BTreeSet<Vec<Q>> {
    let base = rs.simple_roots();
    let cartan = rs.cartan_matrix(&base);
    let mut out = BTreeSet::new();
    for c in positive_roots_by_strings(&cartan) {
        let cq: Vec<Q> = c.iter().map(|&x| qi(x as i128)).collect();
        let v = combination(rs, &cq, &base);
        out.insert(key(&-&v));
        out.insert(key(&v));
    }
    out
}

/// Closure of the simple base under simple reflections.
pub fn reflection_closure(rs: &RootSystem) -> BTreeSet<Vec<Q>> {
    let base = rs.simple_roots();
    let mut seen: BTreeSet<Vec<Q>> = base.iter().map(key).collect();
    let mut frontier: Vec<Covector> = base.clone();
    while let Some(x) = frontier.pop() {
        for a in &base {
            let y = rs.reflect(&x, a);
            if seen.insert(key(&y)) {
                frontier.push(y);
            }
        }
    }
    seen
}

pub fn generated_roots(rs: &RootSystem) -> BTreeSet<Vec<Q>> {
    rs.roots().iter().map(key).collect()
}

/// `x_j = Σ_{α∈R_m⁺} ⟨β_j, α⟩` with `R_m⁺` rebuilt from root strings.
pub fn koszul_by_root_sum(flag: &FlagData) -> Vec<Q> {
    let d = &flag.diagram;
    let rs = d.root_system();
    let black = d.black_nodes();
    let comp: Vec<Vec<i64>> = positive_roots_by_strings(&d.cartan_matrix())
        .into_iter()
        .filter(|c| black.iter().any(|&j| c[j] != 0))
        .collect();
    black
        .iter()
        .map(|&j| {
            comp.iter().fold(Q::from_integer(0), |acc, c| {
                let cq: Vec<Q> = c.iter().map(|&x| qi(x as i128)).collect();
                let alpha = combination(rs, &cq, d.base());
                acc + rs.inner(&d.base()[j], &alpha).expect("same system")
            })
        })
        .collect()
}

/// `f(t) = κ sin²(t/√2)` with `κ = √(n−1)/(n√2)`: the Einstein metric on
/// `ℂⁿ ⊃ CP^{n−1}` blown up, i.e. the Fubini–Study metric on `CPⁿ`.
pub fn cpn_profile(n: usize, t: f64) -> f64 {
    let n = n as f64;
    let kappa = (n - 1.0).sqrt() / (n * std::f64::consts::SQRT_2);
    kappa * (t / std::f64::consts::SQRT_2).sin().powi(2)
}

/// Exhaustive search of `|p_j| ≤ bound` for `Z^Kos = m·P(Λ)`, using that
/// `Λ ↦ P` is affine.
pub fn flat_lattice_search(spec: &BundleSpec, bound: i64) -> Result<Option<Vec<i64>>> {
    let k = spec.base().black().len();
    let m = qi(spec.m() as i128);
    let unit = |j: usize| {
        let mut c = vec![0; k];
        c[j] = 1;
        c
    };
    let (p0, target) = if spec.m() == 1 {
        if k == 0 {
            return Ok(None);
        }
        let g = fiber_geometry(&spec.with_character(unit(0))?)?;
        let sigma = flag_data(&g.k_diagram)?.koszul;
        (spec.base().root_system().zero(), sigma)
    } else {
        let g = fiber_geometry(&spec.with_character(vec![0; k])?)?;
        let sigma = flag_data(&g.k_diagram)?.koszul;
        (g.p, sigma)
    };
    let dirs: Vec<Vec<Q>> = (0..k)
        .map(|j| {
            let pj = fiber_geometry(&spec.with_character(unit(j))?)?.p;
            Ok(key(&(&pj - &p0)))
        })
        .collect::<Result<_>>()?;
    let p0 = key(&p0);
    let target = key(&target);
    let dim = target.len();
    let mut p = vec![-bound; k];
    loop {
        let mut ok = true;
        for i in 0..dim {
            let mut v = p0[i];
            for (j, d) in dirs.iter().enumerate() {
                if p[j] != 0 {
                    v += d[i] * qi(p[j] as i128);
                }
            }
            if v * m != target[i] {
                ok = false;
                break;
            }
        }
        if ok && (spec.m() > 1 || p.iter().any(|&x| x != 0)) {
            return Ok(Some(p));
        }
        let mut j = 0;
        loop {
            if j == k {
                return Ok(None);
            }
            p[j] += 1;
            if p[j] <= bound {
                break;
            }
            p[j] = -bound;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::PaintedDiagram;
    use crate::rootsys::Family;

    #[test]
    fn closures_match_generated_roots() {
        for family in Family::ALL {
            for rank in family.min_rank()..=4 {
                let rs = RootSystem::new(family, rank).unwrap();
                let gen = generated_roots(&rs);
                assert_eq!(gen, reflection_closure(&rs), "{family}{rank}");
                assert_eq!(gen, roots_by_strings(&rs), "{family}{rank}");
            }
        }
        let rs = RootSystem::new(Family::D, 4).unwrap();
        assert_eq!(reflection_closure(&rs).len(), 24);
    }

    #[test]
    fn string_counts() {
        // G2 is not classical but the string rule is generic: 6 positive roots
        let g2 = vec![vec![2, -1], vec![-3, 2]];
        assert_eq!(positive_roots_by_strings(&g2).len(), 6);
    }

    #[test]
    fn koszul_oracle_on_projective_space() {
        for n in 2..=6 {
            let f = flag_data(&PaintedDiagram::new(Family::A, n - 1, [0]).unwrap()).unwrap();
            assert_eq!(koszul_by_root_sum(&f), vec![crate::q(1, 2)]);
        }
    }

    #[test]
    fn cpn_closed_form_boundary() {
        let h: f64 = 1e-4;
        let kappa = (1.0f64).sqrt() / (2.0 * std::f64::consts::SQRT_2);
        assert!((2.0 * cpn_profile(2, h) / (h * h) - kappa).abs() < 1e-8);
    }

    #[test]
    fn lattice_search_finds_line_bundle_witness() {
        let d = PaintedDiagram::new(Family::A, 2, [1]).unwrap();
        let spec = BundleSpec::new(d, vec![], None, vec![1]).unwrap();
        let w = flat_lattice_search(&spec, 5).unwrap();
        assert!(w.is_some());
    }
}

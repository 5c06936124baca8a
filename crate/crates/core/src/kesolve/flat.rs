//! Ricci-flat solvability: `Z^Kos = mP(Λ)` for a character `Λ ∈ Q_T`.
//!
//! Pairing with the black nodes `β_j` of the base turns the condition into
//! `n_β = m` for the painted node and `M p = r / m` with
//! `r_j = n_j − m·2⟨ω, β_j⟩/‖β_j‖²` and
//! `M_ji = 2⟨β_j, β̄_i⟩/‖β_j‖²`. The classical divisibility test asks
//! for `r_j ≡ 0 (mod m)`, i.e. `Λ` in the weight lattice; the character
//! lattice `Q_T` is spanned by the restricted roots `β̄_i` instead, and
//! `M` need not be unimodular, so both answers are reported.

use num_traits::Zero;

use super::solve_algebraic;
use crate::bundles::{fiber_geometry, restricted_black_roots, tautological_weight, BundleSpec};
use crate::error::{Error, Result};
use crate::flags::flag_data;
use crate::{linalg, qi, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct FlatVerdict {
    pub m: usize,
    /// Koszul coefficients of `G/K` on the base black nodes.
    pub koszul_coeffs: Vec<Q>,
    /// Koszul coefficient of the painted node (`None` for m = 1).
    pub beta_coeff: Option<Q>,
    /// `r_j`, the coefficients shifted by the string's weight.
    pub adjusted: Vec<Q>,
    /// `n_β = m` and every `r_j` divisible by `m`.
    pub divisible: bool,
    /// A character in `Q_T` solves `Z^Kos = mP`.
    pub feasible: bool,
    pub witness: Option<Vec<i64>>,
}

pub fn flat_divisibility(spec: &BundleSpec) -> Result<FlatVerdict> {
    let base = spec.base();
    let rs = base.root_system();
    let m = spec.m();
    let mq = qi(m as i128);
    let k_diagram = crate::bundles::build_k_diagram(spec)?;
    let flag_k = flag_data(&k_diagram)?;
    let omega = tautological_weight(spec)?;
    let coeff = |x: &crate::Covector, j: usize| {
        let b = &base.base()[j];
        qi(2) * rs.pair(x, b) / rs.norm_sq(b)
    };
    let black = base.black_nodes();
    let koszul_coeffs: Vec<Q> = black.iter().map(|&j| coeff(&flag_k.koszul, j)).collect();
    let beta_coeff = spec.painted_node().map(|b| coeff(&flag_k.koszul, b));
    let adjusted: Vec<Q> = black
        .iter()
        .zip(&koszul_coeffs)
        .map(|(&j, n)| n - mq * coeff(&omega, j))
        .collect();
    let beta_ok = beta_coeff.is_none_or(|c| c == mq);
    let divisible = beta_ok && adjusted.iter().all(|r| (r / mq).is_integer());

    let restricted = restricted_black_roots(base);
    let matrix: Vec<Vec<Q>> = black
        .iter()
        .map(|&j| restricted.iter().map(|bi| coeff(bi, j)).collect())
        .collect();
    let rhs: Vec<Q> = adjusted.iter().map(|r| r / mq).collect();
    let p = if black.is_empty() {
        Some(vec![])
    } else {
        linalg::solve(&matrix, &rhs)
    }
    .ok_or_else(|| Error::Internal("restricted black roots are dependent".into()))?;
    let integral = p.iter().all(|x| x.is_integer());
    let witness = (beta_ok && integral)
        .then(|| p.iter().map(|x| *x.numer() as i64).collect::<Vec<i64>>());
    if let Some(w) = &witness {
        let s = spec.with_character(w.clone())?;
        let g = fiber_geometry(&s)?;
        if flag_k.koszul != g.p.scale(mq) {
            return Err(Error::Internal(format!("flat witness {w:?} does not solve Z^Kos = mP")));
        }
    }
    Ok(FlatVerdict {
        m,
        koszul_coeffs,
        beta_coeff,
        adjusted,
        divisible,
        feasible: witness.is_some(),
        witness,
    })
}

impl FlatVerdict {
    /// Re-runs the algebraic solver at `λ = 0` with the witness character.
    pub fn round_trip(&self, spec: &BundleSpec) -> Result<bool> {
        let Some(w) = &self.witness else {
            return Ok(false);
        };
        let s = spec.with_character(w.clone())?;
        Ok(solve_algebraic(&s, Q::zero())?.is_ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::{enumerate_bundles, End};
    use crate::flags::PaintedDiagram;
    use crate::Family;

    #[test]
    fn line_bundles_are_always_flat() {
        for d in PaintedDiagram::all_up_to_rank(4) {
            if d.black().is_empty() {
                continue;
            }
            let mut c = vec![0; d.black().len()];
            c[0] = 1;
            let spec = BundleSpec::new(d, vec![], None, c).unwrap();
            let v = flat_divisibility(&spec).unwrap();
            assert!(v.feasible && v.divisible);
            assert!(v.round_trip(&spec).unwrap());
        }
    }

    #[test]
    fn su_seed_is_flat() {
        let v = flat_divisibility(&BundleSpec::su_seed(4).unwrap()).unwrap();
        assert_eq!(v.beta_coeff, Some(qi(4)));
        assert!(v.feasible);
        assert_eq!(v.witness, Some(vec![]));
    }

    #[test]
    fn cotangent_of_projective_plane() {
        // A_2, black {2}, string {1}: Q_T character p = 1 is Ricci-flat.
        let d = PaintedDiagram::new(Family::A, 2, [1]).unwrap();
        let spec = BundleSpec::new(d, vec![0], Some(End::Left), vec![0]).unwrap();
        let v = flat_divisibility(&spec).unwrap();
        assert!(v.feasible);
        assert!(v.round_trip(&spec).unwrap());
    }

    #[test]
    fn witnesses_round_trip() {
        for d in PaintedDiagram::all_up_to_rank(4) {
            for spec in enumerate_bundles(&d, 0) {
                let v = flat_divisibility(&spec).unwrap();
                assert_eq!(v.feasible, v.round_trip(&spec).unwrap(), "{spec}");
            }
        }
    }
}

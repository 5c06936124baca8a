//! Painted Dynkin diagrams and flag-manifold combinatorics.
//!
//! A vector `Z` of the centre `t` is always carried by its Killing dual
//! `B∘Z`, a [`Covector`] orthogonal to every white simple root, so that
//! `α(Z) = ⟨α, B∘Z⟩`. The basis `h_j` of `t` (`β_k(h_j) = δ_kj`,
//! `α_i(h_j) = 0`) is stored the same way, which makes "h-coordinates" of
//! `Z` simply the black pairings `β_j(Z)`.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootsys::{combination, Covector, Family, RootSystem};
use crate::{frac, linalg, qi, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct PaintedDiagram {
    root_system: RootSystem,
    base: Vec<Covector>,
    black: BTreeSet<usize>,
}

/// Wire form: `{"family":"A","rank":4,"black":[1]}` with 1-based nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub family: Family,
    pub rank: usize,
    pub black: Vec<usize>,
}

impl PaintedDiagram {
    /// Bourbaki base of `family_rank` with the given 0-based black nodes.
    pub fn new(family: Family, rank: usize, black: impl IntoIterator<Item = usize>) -> Result<Self> {
        let rs = RootSystem::new(family, rank)?;
        let base = rs.simple_roots();
        Self::with_base(rs, base, black)
    }

    /// Diagram on an explicit base, validated against the family's Cartan
    /// matrix.
    pub fn with_base(
        root_system: RootSystem,
        base: Vec<Covector>,
        black: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let black: BTreeSet<usize> = black.into_iter().collect();
        if base.len() != root_system.rank() {
            return Err(Error::InvalidDiagram(format!(
                "base has {} roots, rank is {}",
                base.len(),
                root_system.rank()
            )));
        }
        for b in &base {
            if b.dim() != root_system.ambient_dim() || !root_system.is_root(b) {
                return Err(Error::InvalidDiagram(format!("{b} is not a root")));
            }
        }
        let expected = root_system.cartan_matrix(&root_system.simple_roots());
        if root_system.cartan_matrix(&base) != expected {
            return Err(Error::InvalidDiagram(
                "pairings of the base do not give the Cartan matrix of the family".into(),
            ));
        }
        if let Some(&bad) = black.iter().find(|&&i| i >= base.len()) {
            return Err(Error::InvalidDiagram(format!(
                "black node {} out of range 1..={}",
                bad + 1,
                base.len()
            )));
        }
        Ok(PaintedDiagram {
            root_system,
            base,
            black,
        })
    }

    pub fn from_json(json: &DiagramJson) -> Result<Self> {
        if json.black.contains(&0) {
            return Err(Error::InvalidDiagram("node indices are 1-based".into()));
        }
        Self::new(json.family, json.rank, json.black.iter().map(|i| i - 1))
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let json: DiagramJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> DiagramJson {
        DiagramJson {
            family: self.family(),
            rank: self.rank(),
            black: self.black.iter().map(|i| i + 1).collect(),
        }
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.root_system
    }

    pub fn family(&self) -> Family {
        self.root_system.family()
    }

    pub fn rank(&self) -> usize {
        self.root_system.rank()
    }

    pub fn base(&self) -> &[Covector] {
        &self.base
    }

    pub fn black(&self) -> &BTreeSet<usize> {
        &self.black
    }

    pub fn black_nodes(&self) -> Vec<usize> {
        self.black.iter().copied().collect()
    }

    pub fn white_nodes(&self) -> Vec<usize> {
        (0..self.rank()).filter(|i| !self.black.contains(i)).collect()
    }

    pub fn is_black(&self, node: usize) -> bool {
        self.black.contains(&node)
    }

    /// Nodes joined by an edge of the Dynkin diagram.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && !self.root_system.pair(&self.base[i], &self.base[j]).is_zero()
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        self.root_system.cartan_matrix(&self.base)
    }

    /// Same base with one more node painted black.
    pub fn with_black(&self, node: usize) -> Result<Self> {
        let mut black = self.black.clone();
        black.insert(node);
        Self::with_base(self.root_system.clone(), self.base.clone(), black)
    }

    /// Same base with one node repainted white.
    pub fn without_black(&self, node: usize) -> Self {
        let mut d = self.clone();
        d.black.remove(&node);
        d
    }

    /// Every black subset of every classical diagram up to `max_rank`.
    pub fn all_up_to_rank(max_rank: usize) -> Vec<PaintedDiagram> {
        let mut out = Vec::new();
        for family in Family::ALL {
            for rank in family.min_rank()..=max_rank {
                for mask in 0u32..(1 << rank) {
                    let black = (0..rank).filter(|i| mask & (1 << i) != 0);
                    out.push(PaintedDiagram::new(family, rank, black).expect("valid diagram"));
                }
            }
        }
        out
    }
}

/// A root together with its expansion over the simple base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Root {
    pub vector: Covector,
    pub coeffs: Vec<i64>,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlagData {
    pub diagram: PaintedDiagram,
    /// Roots vanishing on the centre: expansions use white nodes only.
    pub roots_k: Vec<Root>,
    /// Complementary roots, both signs.
    pub roots_m: Vec<Root>,
    /// Positive complementary roots.
    pub roots_m_pos: Vec<Root>,
    /// Killing duals of `h_j`, one per black node in increasing node order.
    pub h_basis: Vec<Covector>,
    /// Distinct restrictions of `R_m` to `t`, as black-coefficient tuples.
    pub t_roots: Vec<Vec<i64>>,
    /// Fundamental weights of the black nodes.
    pub fundamental_weights: Vec<Covector>,
    /// Koszul form `σ = Σ_{R_m⁺} β`.
    pub koszul: Covector,
    /// h-coordinates of the Koszul vector: `β_j(Z^Kos) = ⟨β_j, σ⟩`.
    pub koszul_vector: Vec<Q>,
    /// `B∘Z^Kos` rebuilt from the h-basis.
    pub koszul_covector: Covector,
    /// `σ = Σ n_j π_j`.
    pub koszul_coeffs: Vec<Q>,
}

pub fn flag_data(d: &PaintedDiagram) -> Result<FlagData> {
    let rs = d.root_system();
    let black = d.black_nodes();

    let mut roots_k = Vec::new();
    let mut roots_m = Vec::new();
    let mut roots_m_pos = Vec::new();
    for r in rs.roots() {
        let c = rs.coordinates(r, d.base())?;
        let coeffs: Vec<i64> = c
            .iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(*x.numer() as i64)
                } else {
                    Err(Error::Internal(format!("non-integral expansion of {r}")))
                }
            })
            .collect::<Result<_>>()?;
        let positive = coeffs.iter().all(|&x| x >= 0);
        let root = Root {
            vector: r.clone(),
            coeffs,
        };
        if black.iter().all(|&j| root.coeffs[j] == 0) {
            roots_k.push(root);
        } else {
            if positive {
                roots_m_pos.push(root.clone());
            }
            roots_m.push(root);
        }
    }
    roots_m_pos.sort_by(|a, b| a.height().cmp(&b.height()).then(b.coeffs.cmp(&a.coeffs)));

    let fundamental_weights = rs.fundamental_weights(d.base(), d.black())?;
    let h_basis: Vec<Covector> = black
        .iter()
        .zip(&fundamental_weights)
        .map(|(&j, pi)| pi.scale(qi(2) / rs.norm_sq(&d.base()[j])))
        .collect();

    let mut koszul = rs.zero();
    for r in &roots_m_pos {
        koszul += &r.vector;
    }

    // Z^Kos = B⁻¹σ expressed in the h-basis through its Gram system.
    let rhs: Vec<Q> = h_basis.iter().map(|h| rs.pair(h, &koszul)).collect();
    let koszul_vector = if h_basis.is_empty() {
        vec![]
    } else {
        linalg::solve(&rs.gram(&h_basis), &rhs)
            .ok_or_else(|| Error::Internal("singular h-basis Gram matrix".into()))?
    };
    let koszul_covector = combination(rs, &koszul_vector, &h_basis);
    if koszul_covector != koszul {
        return Err(Error::Internal("Koszul form is not in the centre".into()));
    }

    let koszul_coeffs: Vec<Q> = black
        .iter()
        .map(|&j| qi(2) * rs.pair(&koszul, &d.base()[j]) / rs.norm_sq(&d.base()[j]))
        .collect();
    if combination(rs, &koszul_coeffs, &fundamental_weights) != koszul {
        return Err(Error::Internal("Koszul form is not spanned by black weights".into()));
    }

    let t_roots: Vec<Vec<i64>> = roots_m
        .iter()
        .map(|r| black.iter().map(|&j| r.coeffs[j]).collect::<Vec<_>>())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    Ok(FlagData {
        diagram: d.clone(),
        roots_k,
        roots_m,
        roots_m_pos,
        h_basis,
        t_roots,
        fundamental_weights,
        koszul,
        koszul_vector,
        koszul_covector,
        koszul_coeffs,
    })
}

impl FlagData {
    pub fn root_system(&self) -> &RootSystem {
        self.diagram.root_system()
    }

    /// Dimension of `t` (number of black nodes).
    pub fn centre_dim(&self) -> usize {
        self.h_basis.len()
    }

    /// Checks `z ∈ t` and returns its h-coordinates `β_j(Z)`.
    pub fn h_coords(&self, z: &Covector) -> Result<Vec<Q>> {
        let rs = self.root_system();
        if z.dim() != rs.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: rs.ambient_dim(),
                got: z.dim(),
            });
        }
        for i in self.diagram.white_nodes() {
            let v = rs.pair(z, &self.diagram.base()[i]);
            if !v.is_zero() {
                return Err(Error::NotInCentre {
                    node: i + 1,
                    value: frac::to_string(&v),
                });
            }
        }
        Ok(self
            .diagram
            .black_nodes()
            .iter()
            .map(|&j| rs.pair(z, &self.diagram.base()[j]))
            .collect())
    }

    /// `Σ x_j h_j` as a Killing dual.
    pub fn from_h_coords(&self, x: &[Q]) -> Result<Covector> {
        if x.len() != self.h_basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.h_basis.len(),
                got: x.len(),
            });
        }
        Ok(combination(self.root_system(), x, &self.h_basis))
    }

    /// Strict T-Weyl chamber test `β_j(Z) > 0` for every black node.
    pub fn chamber_contains(&self, z: &Covector) -> Result<bool> {
        Ok(self.h_coords(z)?.iter().all(|x| x.is_positive()))
    }

    /// Closed-chamber variant `β_j(Z) ≥ 0`.
    pub fn chamber_closure_contains(&self, z: &Covector) -> Result<bool> {
        Ok(self.h_coords(z)?.iter().all(|x| !x.is_negative()))
    }

    /// `α ↦ 2α(Z)/⟨α,α⟩` over `roots_m_pos`, in the same order.
    pub fn omega_coefficients(&self, z: &Covector) -> Result<Vec<Q>> {
        self.h_coords(z)?;
        let rs = self.root_system();
        Ok(self
            .roots_m_pos
            .iter()
            .map(|r| qi(2) * rs.pair(&r.vector, z) / rs.norm_sq(&r.vector))
            .collect())
    }

    /// Whether `ω_Z` is an invariant Kähler form for the diagram's complex
    /// structure.
    pub fn is_kaehler(&self, z: &Covector) -> Result<bool> {
        Ok(self.omega_coefficients(z)?.iter().all(|c| c.is_positive()))
    }

    /// Coordinates of `B∘Z` over the black fundamental weights.
    pub fn weight_coords(&self, z: &Covector) -> Result<Vec<Q>> {
        self.h_coords(z)?;
        let rs = self.root_system();
        let base = self.diagram.base();
        Ok(self
            .diagram
            .black_nodes()
            .iter()
            .map(|&j| qi(2) * rs.pair(z, &base[j]) / rs.norm_sq(&base[j]))
            .collect())
    }

    /// `ω_Z / 2π` is integral iff `B∘Z` has integer weight coordinates.
    pub fn integrality_check(&self, z: &Covector) -> Result<bool> {
        Ok(self.weight_coords(z)?.iter().all(|c| c.is_integer()))
    }

    /// Position of `node` among the black nodes.
    pub fn black_position(&self, node: usize) -> Option<usize> {
        self.diagram.black().iter().position(|&j| j == node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn cp(n: usize) -> FlagData {
        flag_data(&PaintedDiagram::new(Family::A, n - 1, [0]).unwrap()).unwrap()
    }

    #[test]
    fn projective_space_complementary_roots() {
        for n in 2..=6 {
            let f = cp(n);
            assert_eq!(f.roots_m_pos.len(), n - 1);
            for r in &f.roots_m_pos {
                let c = r.vector.as_ints().unwrap();
                assert_eq!(c[0], 1);
            }
            let rs = f.root_system();
            let beta = &f.diagram.base()[0];
            assert_eq!(rs.pair(beta, &f.koszul), q(1, 2));
            assert_eq!(f.koszul_vector, vec![q(1, 2)]);
            assert_eq!(f.koszul_coeffs, vec![qi(n as i128)]);
            let omega = f.omega_coefficients(&f.koszul).unwrap();
            assert!(omega.iter().all(|c| *c == qi(n as i128)));
        }
    }

    #[test]
    fn full_flag_of_a2() {
        let f = flag_data(&PaintedDiagram::new(Family::A, 2, [0, 1]).unwrap()).unwrap();
        assert_eq!(f.koszul_coeffs, vec![qi(2), qi(2)]);
        assert!(f.integrality_check(&f.koszul).unwrap());
        assert_eq!(f.t_roots.len(), 6);
        assert!(f.roots_k.is_empty());
    }

    #[test]
    fn empty_black_set() {
        let f = flag_data(&PaintedDiagram::new(Family::A, 3, []).unwrap()).unwrap();
        assert!(f.roots_m.is_empty());
        assert!(f.koszul.is_zero());
        assert_eq!(f.centre_dim(), 0);
        assert_eq!(f.roots_k.len(), 12);
    }

    #[test]
    fn chamber_tests() {
        let f = flag_data(&PaintedDiagram::new(Family::B, 3, [0, 2]).unwrap()).unwrap();
        assert!(f.chamber_contains(&f.koszul).unwrap());
        assert!(!f.chamber_contains(&f.root_system().zero()).unwrap());
        assert!(f.chamber_closure_contains(&f.root_system().zero()).unwrap());
        assert!(!f.chamber_contains(&-&f.koszul).unwrap());
        // wall point: first h-coordinate zero
        let wall = f.from_h_coords(&[qi(0), qi(1)]).unwrap();
        assert!(!f.chamber_contains(&wall).unwrap());
        assert!(!f.is_kaehler(&wall).unwrap());
        assert!(f.omega_coefficients(&wall).unwrap().iter().any(Zero::is_zero));
        assert!(f
            .omega_coefficients(&f.root_system().zero())
            .unwrap()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn vector_outside_centre_is_rejected() {
        let f = flag_data(&PaintedDiagram::new(Family::A, 2, [0]).unwrap()).unwrap();
        let alpha2 = f.diagram.base()[1].clone();
        assert!(matches!(
            f.chamber_contains(&alpha2),
            Err(Error::NotInCentre { node: 2, .. })
        ));
    }

    #[test]
    fn integrality() {
        let f = flag_data(&PaintedDiagram::new(Family::A, 2, [0, 1]).unwrap()).unwrap();
        let rs = f.root_system();
        let z = combination(rs, &[qi(1), qi(3)], &f.fundamental_weights);
        assert!(f.integrality_check(&z).unwrap());
        assert_eq!(f.weight_coords(&z).unwrap(), vec![qi(1), qi(3)]);
        assert!(!f.integrality_check(&z.scale(q(1, 2))).unwrap());
    }

    #[test]
    fn h_basis_duality() {
        for d in PaintedDiagram::all_up_to_rank(4) {
            let f = flag_data(&d).unwrap();
            let rs = f.root_system();
            for (k, &bk) in d.black_nodes().iter().enumerate() {
                for (j, h) in f.h_basis.iter().enumerate() {
                    let v = rs.pair(&d.base()[bk], h);
                    assert_eq!(v, if j == k { qi(1) } else { qi(0) });
                }
            }
            for w in d.white_nodes() {
                for h in &f.h_basis {
                    assert!(rs.pair(&d.base()[w], h).is_zero());
                }
            }
        }
    }

    #[test]
    fn partition_and_positivity() {
        for d in PaintedDiagram::all_up_to_rank(4) {
            let f = flag_data(&d).unwrap();
            let rs = f.root_system();
            assert_eq!(f.roots_k.len() + f.roots_m.len(), rs.roots().len());
            assert_eq!(2 * f.roots_m_pos.len(), f.roots_m.len());
            for (j, x) in f.koszul_vector.iter().enumerate() {
                assert!(x.is_positive(), "{:?} node {j}", d.to_json());
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"family":"A","rank":4,"black":[1]}"#;
        let d = PaintedDiagram::parse_json(text).unwrap();
        assert_eq!(d.black_nodes(), vec![0]);
        assert_eq!(serde_json::to_string(&d.to_json()).unwrap(), text);
        assert!(PaintedDiagram::parse_json(r#"{"family":"A","rank":2,"black":[0]}"#).is_err());
        assert!(PaintedDiagram::parse_json(r#"{"family":"A","rank":2,"black":[3]}"#).is_err());
        assert!(PaintedDiagram::parse_json(r#"{"family":"Q","rank":2,"black":[]}"#).is_err());
    }

    #[test]
    fn rejects_non_base() {
        let rs = RootSystem::new(Family::A, 2).unwrap();
        let mut base = rs.simple_roots();
        base[1] = &base[0] + &base[1];
        base[0] = -&base[0];
        // {-α1, α1+α2} is a base, but of reversed Cartan orientation it is fine;
        // a non-base pair like {α1, α1+α2} must be rejected.
        let bad = vec![rs.simple_roots()[0].clone(), base[1].clone()];
        assert!(PaintedDiagram::with_base(rs.clone(), bad, []).is_err());
        assert!(PaintedDiagram::with_base(rs, base, []).is_ok());
    }
}

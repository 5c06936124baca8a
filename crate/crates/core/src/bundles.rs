//! Admissible bundles `G ×_H V` over a flag manifold `G/H`: a white
//! `A_{m−1}` string, the end painted to form `G/K`, and a character.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flags::PaintedDiagram;
use crate::rootsys::{combination, Covector};
use crate::{frac, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Left,
    Right,
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            End::Left => "left",
            End::Right => "right",
        })
    }
}

impl FromStr for End {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(End::Left),
            "right" => Ok(End::Right),
            _ => Err(Error::Parse(format!("unknown end `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleSpec {
    base: PaintedDiagram,
    string: Vec<usize>,
    end: Option<End>,
    character: Vec<i64>,
}

/// Wire form `{"string":[1,2,3],"end":"left","char":[0,1]}`, 1-based nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleJson {
    pub string: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<End>,
    #[serde(rename = "char")]
    pub character: Vec<i64>,
}

impl BundleSpec {
    /// `string` holds 0-based nodes in path order.
    pub fn new(
        base: PaintedDiagram,
        string: Vec<usize>,
        end: Option<End>,
        character: Vec<i64>,
    ) -> Result<Self> {
        let k = base.black().len();
        if character.len() != k {
            return Err(Error::InvalidBundle(format!(
                "character has {} entries, diagram has {k} black nodes",
                character.len()
            )));
        }
        if string.is_empty() {
            if end.is_some() {
                return Err(Error::InvalidBundle("m = 1 bundles have no painted end".into()));
            }
            if character.iter().all(|&p| p == 0) {
                return Err(Error::InvalidBundle(
                    "m = 1 needs a nonzero character".into(),
                ));
            }
        } else {
            if end.is_none() {
                return Err(Error::InvalidBundle("painted end missing for m >= 2".into()));
            }
            check_string(&base, &string)?;
        }
        Ok(BundleSpec {
            base,
            string,
            end,
            character,
        })
    }

    pub fn from_json(base: PaintedDiagram, json: &BundleJson) -> Result<Self> {
        if json.string.contains(&0) {
            return Err(Error::InvalidBundle("node indices are 1-based".into()));
        }
        let string = json.string.iter().map(|i| i - 1).collect();
        Self::new(base, string, json.end, json.character.clone())
    }

    pub fn parse_json(base: PaintedDiagram, text: &str) -> Result<Self> {
        let json: BundleJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(base, &json)
    }

    pub fn to_json(&self) -> BundleJson {
        BundleJson {
            string: self.string.iter().map(|i| i + 1).collect(),
            end: self.end,
            character: self.character.clone(),
        }
    }

    /// The `SU(n)` seed: `A_{n−1}` all white, left end, trivial character.
    pub fn su_seed(n: usize) -> Result<Self> {
        let d = PaintedDiagram::new(crate::Family::A, n - 1, [])?;
        Self::new(d, (0..n - 1).collect(), Some(End::Left), vec![])
    }

    pub fn base(&self) -> &PaintedDiagram {
        &self.base
    }

    pub fn string(&self) -> &[usize] {
        &self.string
    }

    pub fn end(&self) -> Option<End> {
        self.end
    }

    pub fn character(&self) -> &[i64] {
        &self.character
    }

    /// Fibre dimension.
    pub fn m(&self) -> usize {
        self.string.len() + 1
    }

    /// Node painted black to form `G/K`.
    pub fn painted_node(&self) -> Option<usize> {
        match self.end? {
            End::Left => self.string.first().copied(),
            End::Right => self.string.last().copied(),
        }
    }

    pub fn with_character(&self, character: Vec<i64>) -> Result<Self> {
        Self::new(self.base.clone(), self.string.clone(), self.end, character)
    }
}

impl fmt::Display for BundleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = self.to_json();
        write!(f, "string={:?}", j.string)?;
        if let Some(e) = j.end {
            write!(f, " end={e}")?;
        }
        write!(f, " char={:?}", j.character)
    }
}

fn single_bond(d: &PaintedDiagram, i: usize, j: usize) -> bool {
    let c = d.cartan_matrix();
    c[i][j] == -1 && c[j][i] == -1
}

fn check_string(d: &PaintedDiagram, string: &[usize]) -> Result<()> {
    let set: BTreeSet<usize> = string.iter().copied().collect();
    if set.len() != string.len() {
        return Err(Error::InvalidBundle("repeated string node".into()));
    }
    if let Some(&i) = string.iter().find(|&&i| i >= d.rank() || d.is_black(i)) {
        return Err(Error::InvalidBundle(format!("node {} is not a white node", i + 1)));
    }
    for w in string.windows(2) {
        if !single_bond(d, w[0], w[1]) {
            return Err(Error::InvalidBundle(format!(
                "nodes {} and {} are not joined by a single bond",
                w[0] + 1,
                w[1] + 1
            )));
        }
    }
    for (a, &i) in string.iter().enumerate() {
        for &j in string.iter().skip(a + 2) {
            if d.adjacent(i, j) {
                return Err(Error::InvalidBundle("string is not a path".into()));
            }
        }
    }
    let comp = white_components(d)
        .into_iter()
        .find(|c| c.contains(&string[0]))
        .expect("white node lies in a component");
    if comp.len() != set.len() {
        return Err(Error::InvalidBundle(
            "string must be a full connected white component".into(),
        ));
    }
    Ok(())
}

/// Connected components of the white subdiagram, each sorted.
pub fn white_components(d: &PaintedDiagram) -> Vec<Vec<usize>> {
    let white = d.white_nodes();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in &white {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            for &j in &white {
                if d.adjacent(i, j) && seen.insert(j) {
                    comp.push(j);
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Orders a white component as an `A`-type path, or `None` if it is not one.
pub fn as_a_string(d: &PaintedDiagram, comp: &[usize]) -> Option<Vec<usize>> {
    let nbrs = |i: usize| -> Vec<usize> {
        comp.iter().copied().filter(|&j| d.adjacent(i, j)).collect()
    };
    for &i in comp {
        let ns = nbrs(i);
        if ns.len() > 2 || ns.iter().any(|&j| !single_bond(d, i, j)) {
            return None;
        }
    }
    let start = *comp.iter().find(|&&i| nbrs(i).len() <= 1)?;
    let mut path = vec![start];
    let mut prev = None;
    let mut cur = start;
    while let Some(next) = nbrs(cur).into_iter().find(|&j| Some(j) != prev) {
        prev = Some(cur);
        cur = next;
        path.push(cur);
    }
    (path.len() == comp.len()).then_some(path)
}

/// Killing duals of the restrictions `β̄_j` to `t_H`, one per black node.
pub fn restricted_black_roots(d: &PaintedDiagram) -> Vec<Covector> {
    let rs = d.root_system();
    let white: Vec<Covector> = d.white_nodes().iter().map(|&i| d.base()[i].clone()).collect();
    d.black_nodes()
        .iter()
        .map(|&j| rs.project_off(&d.base()[j], &white))
        .collect()
}

/// Every admissible bundle over `d` with characters in `[−max_char, max_char]^k`.
/// Bundles whose fibre weight vanishes are skipped.
pub fn enumerate_bundles(d: &PaintedDiagram, max_char: i64) -> Vec<BundleSpec> {
    let k = d.black().len();
    let chars = character_box(k, max_char);
    let mut out = Vec::new();
    for comp in white_components(d) {
        let Some(path) = as_a_string(d, &comp) else {
            continue;
        };
        let mut ends = vec![End::Left];
        let left = BundleSpec::new(d.clone(), path.clone(), Some(End::Left), vec![0; k])
            .expect("valid string");
        let right = BundleSpec::new(d.clone(), path.clone(), Some(End::Right), vec![0; k])
            .expect("valid string");
        let (pl, pr) = (fiber_weight(&left), fiber_weight(&right));
        if pl.ok() != pr.ok() {
            ends.push(End::Right);
        }
        for end in ends {
            for c in &chars {
                let spec = BundleSpec::new(d.clone(), path.clone(), Some(end), c.clone())
                    .expect("valid string");
                if fiber_geometry(&spec).is_ok() {
                    out.push(spec);
                }
            }
        }
    }
    for c in &chars {
        if c.iter().any(|&p| p != 0) {
            out.push(BundleSpec::new(d.clone(), vec![], None, c.clone()).expect("valid line bundle"));
        }
    }
    out
}

fn character_box(k: usize, max_char: i64) -> Vec<Vec<i64>> {
    let max_char = max_char.max(0);
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-max_char..=max_char).map(move |p| {
                    let mut w = v.clone();
                    w.push(p);
                    w
                })
            })
            .collect();
    }
    out
}

/// Diagram of `G/K`: the painted end joins the black set (unchanged for m = 1).
pub fn build_k_diagram(spec: &BundleSpec) -> Result<PaintedDiagram> {
    match spec.painted_node() {
        Some(node) => spec.base.with_black(node),
        None if spec.string.is_empty() => Ok(spec.base.clone()),
        None => Err(Error::InvalidBundle("painted end missing".into())),
    }
}

/// Tautological weight of the painted end inside `span(string)`, the
/// fundamental weight of that end node for the string's own `A_{m−1}`.
pub fn tautological_weight(spec: &BundleSpec) -> Result<Covector> {
    let rs = spec.base.root_system();
    let Some(node) = spec.painted_node() else {
        return Ok(rs.zero());
    };
    let roots: Vec<Covector> = spec.string.iter().map(|&i| spec.base.base()[i].clone()).collect();
    let pos = spec.string.iter().position(|&i| i == node).expect("end in string");
    let w = rs.fundamental_weights(&roots, &BTreeSet::from([pos]))?;
    Ok(w.into_iter().next().expect("one weight"))
}

/// `Λ = Σ p_j β̄_j`.
pub fn character_weight(spec: &BundleSpec) -> Covector {
    let c: Vec<Q> = spec.character.iter().map(|&p| qi(p as i128)).collect();
    combination(spec.base.root_system(), &c, &restricted_black_roots(&spec.base))
}

/// Restricted fibre-line weight `μ̄ = ω + Λ`.
pub fn fiber_weight(spec: &BundleSpec) -> Result<Covector> {
    Ok(&tautological_weight(spec)? + &character_weight(spec))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberGeometry {
    pub k_diagram: PaintedDiagram,
    /// Newly painted node (`None` for m = 1).
    pub beta: Option<usize>,
    pub omega: Covector,
    pub lambda_weight: Covector,
    /// `P = κ·Z⁰` as a covector on `t_K`.
    pub p: Covector,
    pub kappa_sq: Q,
    pub z0_unit: Vec<f64>,
}

impl FiberGeometry {
    pub fn kappa(&self) -> f64 {
        frac::to_f64(&self.kappa_sq).sqrt()
    }
}

pub fn fiber_geometry(spec: &BundleSpec) -> Result<FiberGeometry> {
    let k_diagram = build_k_diagram(spec)?;
    let rs = spec.base.root_system();
    let omega = tautological_weight(spec)?;
    let lambda_weight = character_weight(spec);
    let mu = &omega + &lambda_weight;
    let white_k: Vec<Covector> = k_diagram
        .white_nodes()
        .iter()
        .map(|&i| k_diagram.base()[i].clone())
        .collect();
    let mut p = rs.project_off(&mu, &white_k);
    if p.is_zero() {
        return Err(Error::DegenerateFibre(format!("fibre weight of {spec} vanishes on t_K")));
    }
    let beta = spec.painted_node();
    if let Some(b) = beta {
        let bp = rs.pair(&p, &k_diagram.base()[b]);
        if bp.is_zero() {
            return Err(Error::DegenerateFibre(format!("β(P) = 0 for {spec}")));
        }
        if bp.is_negative() {
            p = -&p;
        }
    }
    let kappa_sq = rs.norm_sq(&p);
    let kappa = frac::to_f64(&kappa_sq).sqrt();
    let z0_unit = p.to_f64().iter().map(|x| x / kappa).collect();
    Ok(FiberGeometry {
        k_diagram,
        beta,
        omega,
        lambda_weight,
        p,
        kappa_sq,
        z0_unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::flag_data;
    use crate::{q, Family};
    use proptest::prelude::*;

    fn diagram(f: Family, r: usize, black: &[usize]) -> PaintedDiagram {
        PaintedDiagram::new(f, r, black.iter().copied()).unwrap()
    }

    #[test]
    fn su_seed_geometry() {
        for n in 2..=7usize {
            let spec = BundleSpec::su_seed(n).unwrap();
            let g = fiber_geometry(&spec).unwrap();
            let n_ = n as i128;
            assert_eq!(g.kappa_sq, q(n_ - 1, 2 * n_ * n_));
            assert_eq!(g.k_diagram.black_nodes(), vec![0]);
            let rs = g.k_diagram.root_system();
            let beta = &g.k_diagram.base()[0];
            assert_eq!(rs.pair(beta, &g.p), q(1, 2 * n_));
            let bz = 1.0 / (2.0 * n as f64) / g.kappa();
            assert!((bz - 1.0 / (2.0 * (n as f64 - 1.0)).sqrt()).abs() < 1e-14);
            let fk = flag_data(&g.k_diagram).unwrap();
            assert_eq!(g.p.scale(qi(n_)), fk.koszul);
        }
    }

    #[test]
    fn enumerate_a3_all_white() {
        let d = diagram(Family::A, 3, &[]);
        let specs = enumerate_bundles(&d, 3);
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].to_json().string, vec![1, 2, 3]);
        assert_eq!(specs[0].end(), Some(End::Left));
        assert_eq!(specs[1].end(), Some(End::Right));
    }

    #[test]
    fn enumerate_a2_black_second() {
        let d = diagram(Family::A, 2, &[1]);
        let specs = enumerate_bundles(&d, 1);
        // one-node string: ends collapse; characters -1, 0, 1; plus m = 1 for ±1
        let m2: Vec<_> = specs.iter().filter(|s| s.m() == 2).collect();
        let m1: Vec<_> = specs.iter().filter(|s| s.m() == 1).collect();
        assert_eq!(m2.len(), 3);
        assert_eq!(m1.len(), 2);
        let k = build_k_diagram(m2[0]).unwrap();
        assert_eq!(k.black_nodes(), vec![0, 1]);
        assert_eq!(build_k_diagram(m1[0]).unwrap(), d);
    }

    #[test]
    fn no_a_component() {
        // B_2 all white is a double bond: no admissible string
        let d = diagram(Family::B, 2, &[]);
        assert!(enumerate_bundles(&d, 2).is_empty());
        // C_3 with black {1}: white {2,3} is C_2, not A
        let d = diagram(Family::C, 3, &[0]);
        assert!(enumerate_bundles(&d, 0).is_empty());
    }

    #[test]
    fn d4_branch_strings() {
        // D_4 with black {2}: three A_1 components
        let d = diagram(Family::D, 4, &[1]);
        let specs = enumerate_bundles(&d, 0);
        assert_eq!(specs.len(), 3);
        // D_4 with black {1}: white {2,3,4} is an A_3 path 3-2-4
        let d = diagram(Family::D, 4, &[0]);
        let comps = white_components(&d);
        assert_eq!(comps, vec![vec![1, 2, 3]]);
        let path = as_a_string(&d, &comps[0]).unwrap();
        assert_eq!(path[1], 1);
    }

    #[test]
    fn validation() {
        let d = diagram(Family::A, 3, &[1]);
        assert!(BundleSpec::new(d.clone(), vec![0], Some(End::Left), vec![0]).is_ok());
        assert!(BundleSpec::new(d.clone(), vec![0], None, vec![0]).is_err());
        assert!(BundleSpec::new(d.clone(), vec![1], Some(End::Left), vec![0]).is_err());
        assert!(BundleSpec::new(d.clone(), vec![0], Some(End::Left), vec![]).is_err());
        assert!(BundleSpec::new(d.clone(), vec![], None, vec![0]).is_err());
        assert!(BundleSpec::new(d.clone(), vec![], None, vec![2]).is_ok());
        let d = diagram(Family::A, 4, &[]);
        // partial substring rejected
        assert!(BundleSpec::new(d.clone(), vec![0, 1], Some(End::Left), vec![]).is_err());
        assert!(BundleSpec::new(d, vec![0, 2, 1, 3], Some(End::Left), vec![]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = diagram(Family::A, 4, &[3]);
        let text = r#"{"string":[1,2,3],"end":"left","char":[2]}"#;
        let s = BundleSpec::parse_json(d.clone(), text).unwrap();
        assert_eq!(s.string(), &[0, 1, 2]);
        assert_eq!(serde_json::to_string(&s.to_json()).unwrap(), text);
        let line = BundleSpec::parse_json(d, r#"{"string":[],"char":[1]}"#).unwrap();
        assert_eq!(line.m(), 1);
        assert_eq!(serde_json::to_string(&line.to_json()).unwrap(), r#"{"string":[],"char":[1]}"#);
    }

    #[test]
    fn invariants_over_enumeration() {
        for d in PaintedDiagram::all_up_to_rank(4) {
            for spec in enumerate_bundles(&d, 1) {
                let g = fiber_geometry(&spec).unwrap();
                let rs = d.root_system();
                for w in g.k_diagram.white_nodes() {
                    assert!(rs.pair(&g.p, &g.k_diagram.base()[w]).is_zero());
                }
                assert_eq!(g.kappa_sq, rs.norm_sq(&g.p));
                if let Some(b) = g.beta {
                    let bp = rs.pair(&g.p, &d.base()[b]);
                    assert!(bp.is_positive());
                    if spec.character().iter().all(|&p| p == 0) {
                        let m = qi(spec.m() as i128);
                        assert_eq!(g.kappa_sq, (m - qi(1)) / m * bp);
                    }
                } else {
                    assert_eq!(g.p, g.lambda_weight);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn character_linearity(a in proptest::collection::vec(-4i64..=4, 2),
                               b in proptest::collection::vec(-4i64..=4, 2),
                               end in prop_oneof![Just(End::Left), Just(End::Right)]) {
            // A_4 with black {1, 4}: string {2, 3}
            let d = diagram(Family::A, 4, &[0, 3]);
            let spec = BundleSpec::new(d, vec![1, 2], Some(end), vec![0, 0]).unwrap();
            let ab: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let p = |c: &[i64]| fiber_geometry(&spec.with_character(c.to_vec()).unwrap()).unwrap().p;
            let lhs = &(&p(&ab) - &p(&a)) - &(&p(&b) - &p(&[0, 0]));
            prop_assert!(lhs.is_zero());
        }

        #[test]
        fn line_bundle_linearity(a in proptest::collection::vec(-4i64..=4, 2),
                                 b in proptest::collection::vec(-4i64..=4, 2)) {
            let d = diagram(Family::B, 3, &[0, 2]);
            let ab: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let lam = |c: &[i64]| {
                let spec = BundleSpec { base: d.clone(), string: vec![], end: None, character: c.to_vec() };
                character_weight(&spec)
            };
            prop_assert_eq!(lam(&ab), &lam(&a) + &lam(&b));
            if ab.iter().any(|&x| x != 0) {
                let spec = BundleSpec::new(d.clone(), vec![], None, ab.clone()).unwrap();
                prop_assert_eq!(fiber_geometry(&spec).unwrap().p, lam(&ab));
            }
        }
    }
}

//! JSON shapes emitted by the CLI. Rationals travel as "p/q" strings.

use c1kahler::bundles::fiber_geometry;
use c1kahler::frac;
use c1kahler::kesolve::{EndKind, Z0Source};
use c1kahler::{BundleJson, BundleSpec, DiagramJson, FlagData, KeProblem, Result, Q};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagReport {
    pub diagram: DiagramJson,
    pub real_dim: usize,
    pub centre_dim: usize,
    pub t_root_count: usize,
    /// Restricted roots as coefficient tuples over the black nodes.
    pub t_roots: Vec<Vec<i64>>,
    /// `σ = Σ n_j π_j`.
    #[serde(with = "frac::vec")]
    pub koszul_coeffs: Vec<Q>,
    /// `β_j(Z^Kos)` for each black node.
    #[serde(with = "frac::vec")]
    pub koszul_pairings: Vec<Q>,
    /// Killing duals of the chamber basis, ε-coordinates.
    pub chamber_basis: Vec<FracVec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FracVec(#[serde(with = "frac::vec")] pub Vec<Q>);

impl FlagReport {
    pub fn new(f: &FlagData) -> Self {
        FlagReport {
            diagram: f.diagram.to_json(),
            real_dim: 2 * f.roots_m_pos.len(),
            centre_dim: f.centre_dim(),
            t_root_count: f.t_roots.len(),
            t_roots: f.t_roots.clone(),
            koszul_coeffs: f.koszul_coeffs.clone(),
            koszul_pairings: f.koszul_vector.clone(),
            chamber_basis: f.h_basis.iter().map(|v| FracVec(v.coords().to_vec())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleList {
    pub diagram: DiagramJson,
    pub max_char: i64,
    pub bundles: Vec<BundleJson>,
}

/// `c = coeff · √sqrt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtValue {
    #[serde(with = "frac::single")]
    pub coeff: Q,
    pub sqrt: i128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub diagram: DiagramJson,
    pub bundle: BundleJson,
    #[serde(with = "frac::single")]
    pub lambda: Q,
    pub m: usize,
    #[serde(rename = "Z0", default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<FracVec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0_source: Option<Z0Source>,
    #[serde(with = "frac::single")]
    pub kappa_sq: Q,
    pub c: SqrtValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_kind: Option<EndKind>,
    pub domain_end: Option<f64>,
    pub timestamp: u64,
}

impl SolveReport {
    pub fn base(spec: &BundleSpec, lambda: Q) -> Result<Self> {
        let g = fiber_geometry(spec)?;
        let m = spec.m() as i128;
        let (coeff, sqrt) = frac::sqrt_normal_form(&(g.kappa_sq * Q::from_integer(m * m)))?;
        Ok(SolveReport {
            feasible: false,
            reason: None,
            diagram: spec.base().to_json(),
            bundle: spec.to_json(),
            lambda,
            m: spec.m(),
            z0: None,
            z0_source: None,
            kappa_sq: g.kappa_sq,
            c: SqrtValue { coeff, sqrt },
            complete: None,
            end_kind: None,
            domain_end: None,
            timestamp: timestamp(),
        })
    }

    pub fn with_problem(mut self, p: &KeProblem) -> Self {
        self.feasible = true;
        self.z0 = Some(FracVec(p.z0_h_coords()));
        self.z0_source = Some(p.z0_source);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    #[serde(flatten)]
    pub solve: SolveReport,
    pub csv: String,
    pub samples: usize,
    pub t_max: f64,
    pub residual_max: f64,
    pub energy_max: f64,
    pub rk_discrepancy: f64,
    pub chamber_ok: bool,
    pub warnings: Vec<String>,
    pub passed: bool,
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use c1kahler::kesolve::solve_algebraic;
    use c1kahler::{flag_data, PaintedDiagram};

    #[test]
    fn reports_round_trip() {
        let spec = BundleSpec::su_seed(4).unwrap();
        let lambda = Q::new(-3, 2);
        let p = solve_algebraic(&spec, lambda).unwrap().unwrap();
        let r = SolveReport::base(&spec, lambda).unwrap().with_problem(&p);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<SolveReport>(&text).unwrap(), r);
        assert!(text.contains(r#""lambda":"-3/2""#));

        let d = PaintedDiagram::new(c1kahler::Family::C, 3, [0, 2]).unwrap();
        let f = FlagReport::new(&flag_data(&d).unwrap());
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<FlagReport>(&text).unwrap(), f);
    }
}

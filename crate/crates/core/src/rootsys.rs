//! Classical root systems in ε-coordinates.
//!
//! Roots and weights are [`Covector`]s with rational coordinates. The inner
//! product is the dual of the Killing form: `⟨x, y⟩ = s · (x · y)` where the
//! scale `s` depends only on the family and rank (see
//! [`killing_scale_candidate`]). Type A functionals live in `n = rank + 1`
//! coordinates and are taken modulo the all-ones vector, so they are projected
//! onto the traceless hyperplane before any pairing.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{frac, linalg, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];

    /// Smallest rank accepted by [`RootSystem::new`].
    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B | Family::C => 2,
            Family::D => 4,
        }
    }

    pub fn ambient_dim(self, rank: usize) -> usize {
        match self {
            Family::A => rank + 1,
            _ => rank,
        }
    }
}

/// Killing scale `s` with `⟨x, y⟩ = s · (x · y)` on ε-coordinates.
///
/// Defined for every rank ≥ 1 of the matrix algebras sl(n), so(2n+1),
/// sp(2n), so(2n); [`crate::killing::killing_scale_oracle`] certifies it.
pub fn killing_scale_candidate(family: Family, rank: usize) -> Q {
    let n = rank as i128;
    match family {
        Family::A => Q::new(1, 2 * (n + 1)),
        Family::B => Q::new(1, 2 * (2 * n - 1)),
        Family::C => Q::new(1, 4 * (n + 1)),
        Family::D => Q::new(1, 4 * (n - 1)),
    }
}

/// Rational functional in ε-coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Covector {
    #[serde(with = "frac::vec")]
    coords: Vec<Q>,
    modulo_trace: bool,
}

impl Covector {
    pub fn new(coords: Vec<Q>, modulo_trace: bool) -> Self {
        Covector {
            coords,
            modulo_trace,
        }
    }

    pub fn from_ints(coords: &[i64], modulo_trace: bool) -> Self {
        Covector::new(coords.iter().map(|&c| qi(c as i128)).collect(), modulo_trace)
    }

    pub fn zero(dim: usize, modulo_trace: bool) -> Self {
        Covector::new(vec![Q::zero(); dim], modulo_trace)
    }

    /// The ε_i coordinate functional.
    pub fn unit(dim: usize, i: usize, modulo_trace: bool) -> Self {
        let mut c = Covector::zero(dim, modulo_trace);
        c.coords[i] = qi(1);
        c
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn modulo_trace(&self) -> bool {
        self.modulo_trace
    }

    /// Canonical representative: traceless when taken modulo the trace.
    pub fn projected(&self) -> Covector {
        if !self.modulo_trace || self.coords.is_empty() {
            return self.clone();
        }
        let mean = self.coords.iter().sum::<Q>() / qi(self.coords.len() as i128);
        Covector::new(self.coords.iter().map(|c| c - mean).collect(), true)
    }

    pub fn is_zero(&self) -> bool {
        self.projected().coords.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: Q) -> Covector {
        Covector::new(self.coords.iter().map(|c| c * s).collect(), self.modulo_trace)
    }

    /// Euclidean dot product of the canonical representatives.
    pub fn dot(&self, other: &Covector) -> Q {
        let a = self.projected();
        let b = other.projected();
        a.coords.iter().zip(&b.coords).map(|(x, y)| x * y).sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.projected().coords.iter().map(frac::to_f64).collect()
    }

    /// Integer coordinates of the canonical representative, if integral.
    pub fn as_ints(&self) -> Option<Vec<i64>> {
        self.projected()
            .coords
            .iter()
            .map(|c| c.is_integer().then(|| *c.numer() as i64))
            .collect()
    }
}

impl PartialEq for Covector {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.projected().coords == other.projected().coords
    }
}

impl Eq for Covector {}

impl fmt::Display for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.projected().coords.iter().map(frac::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Add for &Covector {
    type Output = Covector;
    fn add(self, rhs: &Covector) -> Covector {
        assert_eq!(self.dim(), rhs.dim(), "covector dimension");
        Covector::new(
            self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
            self.modulo_trace,
        )
    }
}

impl AddAssign<&Covector> for Covector {
    fn add_assign(&mut self, rhs: &Covector) {
        assert_eq!(self.dim(), rhs.dim(), "covector dimension");
        for (a, b) in self.coords.iter_mut().zip(&rhs.coords) {
            *a += b;
        }
    }
}

impl Sub for &Covector {
    type Output = Covector;
    fn sub(self, rhs: &Covector) -> Covector {
        self + &(-rhs)
    }
}

impl Neg for &Covector {
    type Output = Covector;
    fn neg(self) -> Covector {
        self.scale(qi(-1))
    }
}

impl Mul<&Covector> for Q {
    type Output = Covector;
    fn mul(self, rhs: &Covector) -> Covector {
        rhs.scale(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    ambient_dim: usize,
    roots: Vec<Covector>,
    #[serde(with = "frac::single")]
    killing_scale: Q,
}

impl RootSystem {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidRootSystem {
            family,
            rank,
            reason: reason.to_string(),
        };
        if rank == 0 {
            return Err(invalid("rank must be positive"));
        }
        if rank < family.min_rank() {
            return Err(match family {
                Family::D => invalid("D_2 and D_3 coincide with A_1×A_1 and A_3; use the A family"),
                _ => invalid("rank 1 coincides with A_1; use the A family"),
            });
        }
        if rank > 16 {
            return Err(invalid("rank above 16 is not supported"));
        }
        let ambient_dim = family.ambient_dim(rank);
        let roots = generate_roots(family, ambient_dim);
        Ok(RootSystem {
            family,
            rank,
            ambient_dim,
            roots,
            killing_scale: killing_scale_candidate(family, rank),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn roots(&self) -> &[Covector] {
        &self.roots
    }

    pub fn killing_scale(&self) -> Q {
        self.killing_scale
    }

    pub fn modulo_trace(&self) -> bool {
        self.family == Family::A
    }

    pub fn zero(&self) -> Covector {
        Covector::zero(self.ambient_dim, self.modulo_trace())
    }

    pub fn covector(&self, coords: Vec<Q>) -> Result<Covector> {
        self.check_dim(coords.len())?;
        Ok(Covector::new(coords, self.modulo_trace()))
    }

    pub fn covector_from_ints(&self, coords: &[i64]) -> Result<Covector> {
        self.check_dim(coords.len())?;
        Ok(Covector::from_ints(coords, self.modulo_trace()))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got,
            });
        }
        Ok(())
    }

    /// Killing-dual inner product.
    pub fn inner(&self, x: &Covector, y: &Covector) -> Result<Q> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        Ok(self.pair(x, y))
    }

    /// [`Self::inner`] for covectors already known to have the right shape.
    pub(crate) fn pair(&self, x: &Covector, y: &Covector) -> Q {
        debug_assert_eq!(x.dim(), self.ambient_dim);
        debug_assert_eq!(y.dim(), self.ambient_dim);
        self.killing_scale * x.dot(y)
    }

    pub fn norm_sq(&self, x: &Covector) -> Q {
        self.pair(x, x)
    }

    pub fn is_root(&self, x: &Covector) -> bool {
        self.roots.iter().any(|r| r == x)
    }

    /// Simple roots in Bourbaki order.
    pub fn simple_roots(&self) -> Vec<Covector> {
        let n = self.ambient_dim;
        let mt = self.modulo_trace();
        let e = |i: usize| Covector::unit(n, i, mt);
        let mut base: Vec<Covector> = (0..n - 1).map(|i| &e(i) - &e(i + 1)).collect();
        match self.family {
            Family::A => {}
            Family::B => base.push(e(n - 1)),
            Family::C => base.push(qi(2) * &e(n - 1)),
            Family::D => base.push(&e(n - 2) + &e(n - 1)),
        }
        base
    }

    /// Reflection of `x` in the hyperplane orthogonal to `alpha`.
    pub fn reflect(&self, x: &Covector, alpha: &Covector) -> Covector {
        let c = qi(2) * self.pair(x, alpha) / self.norm_sq(alpha);
        x - &(c * alpha)
    }

    /// Cartan matrix `a_ij = 2⟨α_i, α_j⟩ / ⟨α_j, α_j⟩` of an ordered base.
    pub fn cartan_matrix(&self, base: &[Covector]) -> Vec<Vec<i64>> {
        base.iter()
            .map(|ai| {
                base.iter()
                    .map(|aj| {
                        let v = qi(2) * self.pair(ai, aj) / self.norm_sq(aj);
                        debug_assert!(v.is_integer());
                        *v.numer() as i64
                    })
                    .collect()
            })
            .collect()
    }

    /// Gram matrix of the Killing-dual inner product.
    pub fn gram(&self, vs: &[Covector]) -> Vec<Vec<Q>> {
        vs.iter()
            .map(|a| vs.iter().map(|b| self.pair(a, b)).collect())
            .collect()
    }

    /// Coordinates of `x` in the basis `base` (which must span `x`).
    pub fn coordinates(&self, x: &Covector, base: &[Covector]) -> Result<Vec<Q>> {
        let rhs: Vec<Q> = base.iter().map(|b| self.pair(x, b)).collect();
        let c = linalg::solve(&self.gram(base), &rhs)
            .ok_or_else(|| Error::Internal("singular Gram matrix".into()))?;
        let back = combination(self, &c, base);
        if back != *x {
            return Err(Error::Internal(format!("{x} is not in the span of the base")));
        }
        Ok(c)
    }

    /// Fundamental weights `π_i` of the black nodes of `base`:
    /// `2⟨π_i, β_j⟩ / ‖β_j‖² = δ_ij` on black nodes and `⟨π_i, α_j⟩ = 0` on
    /// white ones, solved inside `span(base)`.
    pub fn fundamental_weights(
        &self,
        base: &[Covector],
        black: &BTreeSet<usize>,
    ) -> Result<Vec<Covector>> {
        for b in base {
            self.check_dim(b.dim())?;
        }
        if let Some(&bad) = black.iter().find(|&&i| i >= base.len()) {
            return Err(Error::InvalidDiagram(format!("black node {} out of range", bad + 1)));
        }
        let gram = self.gram(base);
        black
            .iter()
            .map(|&i| {
                let rhs: Vec<Q> = (0..base.len())
                    .map(|j| {
                        if j == i {
                            self.norm_sq(&base[j]) / qi(2)
                        } else {
                            Q::zero()
                        }
                    })
                    .collect();
                let c = linalg::solve(&gram, &rhs)
                    .ok_or_else(|| Error::Internal("singular Gram matrix of simple base".into()))?;
                Ok(combination(self, &c, base))
            })
            .collect()
    }

    /// Orthogonal projection of `x` onto the complement of `span(vs)`.
    /// `vs` must be linearly independent.
    pub fn project_off(&self, x: &Covector, vs: &[Covector]) -> Covector {
        if vs.is_empty() {
            return x.clone();
        }
        let rhs: Vec<Q> = vs.iter().map(|v| self.pair(x, v)).collect();
        let c = linalg::solve(&self.gram(vs), &rhs).expect("independent vectors");
        x - &combination(self, &c, vs)
    }

    /// Orthogonal projection of `x` onto `span(vs)` (`vs` independent).
    pub fn project_onto(&self, x: &Covector, vs: &[Covector]) -> Covector {
        x - &self.project_off(x, vs)
    }
}

/// `Σ c_i v_i`
pub fn combination(rs: &RootSystem, c: &[Q], vs: &[Covector]) -> Covector {
    let mut acc = rs.zero();
    for (ci, v) in c.iter().zip(vs) {
        if !ci.is_zero() {
            acc += &v.scale(*ci);
        }
    }
    acc
}

fn generate_roots(family: Family, n: usize) -> Vec<Covector> {
    let mt = family == Family::A;
    let mut out = Vec::new();
    let mut push = |v: Vec<i64>| out.push(Covector::from_ints(&v, mt));
    let unit = |i: usize, s: i64| {
        let mut v = vec![0; n];
        v[i] = s;
        v
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // ε_i − ε_j
            let mut v = unit(i, 1);
            v[j] = -1;
            push(v);
            if family != Family::A && i < j {
                for s in [1, -1] {
                    let mut v = unit(i, s);
                    v[j] = s;
                    push(v);
                }
            }
        }
    }
    for i in 0..n {
        for s in [1, -1] {
            match family {
                Family::B => push(unit(i, s)),
                Family::C => push(unit(i, 2 * s)),
                _ => {}
            }
        }
    }
    out
}

/// Sign of the simple-root expansion of a root: `Some(true)` for positive.
pub fn is_positive(coeffs: &[Q]) -> Option<bool> {
    if coeffs.iter().all(|c| !c.is_negative()) {
        Some(true)
    } else if coeffs.iter().all(|c| !c.is_positive()) {
        Some(false)
    } else {
        None
    }
}

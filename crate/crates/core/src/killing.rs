//! Numerical certificate for the Killing normalisation.
//!
//! The classical algebra is realised as matrices (`sl(n)`, and the
//! `X^T J + J X = 0` algebras for B, C, D), a basis is extracted as the null
//! space of the defining linear constraints, and `tr(ad h · ad h')` is
//! evaluated on diagonal Cartan elements. The ratio against the Euclidean
//! form on ε-coordinates gives the inverse of the dual scale `s`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::rootsys::Family;

/// Largest rank the dense adjoint computation accepts.
pub const MAX_ORACLE_RANK: usize = 8;

/// Floating estimate of the dual Killing scale `s` for `family`, `rank`.
pub fn killing_scale_oracle(family: Family, rank: usize) -> Result<f64> {
    if rank == 0 || rank > MAX_ORACLE_RANK {
        return Err(Error::InvalidParameter(format!(
            "oracle rank must be in 1..={MAX_ORACLE_RANK}, got {rank}"
        )));
    }
    let algebra = MatrixAlgebra::new(family, rank);
    let cartan = cartan_coordinates(family, rank);
    let ads: Vec<DMatrix<f64>> = cartan
        .iter()
        .map(|x| algebra.ad(&algebra.embed_diagonal(x)))
        .collect();

    let mut num = 0.0;
    let mut den = 0.0;
    for (i, xi) in cartan.iter().enumerate() {
        for (j, xj) in cartan.iter().enumerate() {
            let killing = (&ads[i] * &ads[j]).trace();
            let euclid: f64 = xi.iter().zip(xj).map(|(a, b)| a * b).sum();
            num += killing * euclid;
            den += euclid * euclid;
        }
    }
    let ratio = num / den;
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::Numerical(format!("killing fit failed: ratio {ratio}")));
    }
    Ok(1.0 / ratio)
}

/// Cartan directions in ε-coordinates (traceless for type A).
fn cartan_coordinates(family: Family, rank: usize) -> Vec<Vec<f64>> {
    let n = family.ambient_dim(rank);
    let unit = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    match family {
        Family::A => (0..n - 1)
            .map(|i| {
                let mut v = unit(i);
                v[i + 1] = -1.0;
                v
            })
            .collect(),
        _ => (0..n).map(unit).collect(),
    }
}

struct MatrixAlgebra {
    family: Family,
    size: usize,
    /// Orthonormal basis of the algebra, one flattened matrix per column.
    basis: DMatrix<f64>,
}

impl MatrixAlgebra {
    fn new(family: Family, rank: usize) -> Self {
        let size = match family {
            Family::A => rank + 1,
            Family::B => 2 * rank + 1,
            Family::C | Family::D => 2 * rank,
        };
        let constraints = constraint_matrix(family, rank, size);
        let gram = constraints.transpose() * &constraints;
        let eig = SymmetricEigen::new(gram);
        let cols: Vec<DVector<f64>> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &v)| v.abs() < 1e-9)
            .map(|(k, _)| eig.eigenvectors.column(k).into_owned())
            .collect();
        let basis = DMatrix::from_columns(&cols);
        MatrixAlgebra {
            family,
            size,
            basis,
        }
    }

    fn embed_diagonal(&self, x: &[f64]) -> DMatrix<f64> {
        let mut d = vec![0.0; self.size];
        match self.family {
            Family::A => d.copy_from_slice(x),
            _ => {
                let r = x.len();
                for (i, &xi) in x.iter().enumerate() {
                    d[i] = xi;
                    d[r + i] = -xi;
                }
            }
        }
        DMatrix::from_diagonal(&DVector::from_vec(d))
    }

    fn ad(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.size;
        let dim = self.basis.ncols();
        let mut image = DMatrix::zeros(n * n, dim);
        for k in 0..dim {
            let x = DMatrix::from_column_slice(n, n, self.basis.column(k).as_slice());
            let bracket = h * &x - &x * h;
            image.column_mut(k).copy_from_slice(bracket.as_slice());
        }
        self.basis.transpose() * image
    }
}

fn form_matrix(family: Family, rank: usize, size: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(size, size);
    for i in 0..rank {
        match family {
            Family::C => {
                j[(i, rank + i)] = 1.0;
                j[(rank + i, i)] = -1.0;
            }
            _ => {
                j[(i, rank + i)] = 1.0;
                j[(rank + i, i)] = 1.0;
            }
        }
    }
    if family == Family::B {
        j[(2 * rank, 2 * rank)] = 1.0;
    }
    j
}

/// Rows are linear constraints on flattened matrices cutting out the algebra.
fn constraint_matrix(family: Family, rank: usize, size: usize) -> DMatrix<f64> {
    let n = size;
    match family {
        Family::A => {
            let mut c = DMatrix::zeros(1, n * n);
            for i in 0..n {
                c[(0, i * n + i)] = 1.0;
            }
            c
        }
        _ => {
            let j = form_matrix(family, rank, size);
            let mut c = DMatrix::zeros(n * n, n * n);
            for col in 0..n * n {
                let mut e = DMatrix::zeros(n, n);
                e[(col % n, col / n)] = 1.0;
                let image = e.transpose() * &j + &j * &e;
                c.column_mut(col).copy_from_slice(image.as_slice());
            }
            c
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac;
    use crate::rootsys::killing_scale_candidate;

    #[test]
    fn algebra_dimensions() {
        assert_eq!(MatrixAlgebra::new(Family::A, 2).basis.ncols(), 8);
        assert_eq!(MatrixAlgebra::new(Family::B, 2).basis.ncols(), 10);
        assert_eq!(MatrixAlgebra::new(Family::C, 3).basis.ncols(), 21);
        assert_eq!(MatrixAlgebra::new(Family::D, 4).basis.ncols(), 28);
    }

    #[test]
    fn oracle_examples() {
        let s = killing_scale_oracle(Family::A, 2).unwrap();
        assert!((s - 1.0 / 6.0).abs() < 1e-9);
        for (f, r) in [(Family::B, 2), (Family::C, 3)] {
            let s = killing_scale_oracle(f, r).unwrap();
            let c = frac::to_f64(&killing_scale_candidate(f, r));
            assert!((s - c).abs() < 1e-9, "{f}_{r}: {s} vs {c}");
        }
    }

    #[test]
    fn rank_bound() {
        assert!(killing_scale_oracle(Family::A, 9).is_err());
        assert!(killing_scale_oracle(Family::A, 0).is_err());
    }
}

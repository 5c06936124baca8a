//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::frac;
use crate::Q;

/// `coeffs[i]` is the coefficient of `x^i`; trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b x`
    pub fn linear(a: Q, b: Q) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(i as i128))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn integral(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Q::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c / Q::from_integer(i as i128 + 1));
        }
        Poly::new(out)
    }

    /// Multiplicity of the root at zero.
    pub fn zero_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Exact division by `x^k`; panics if `x^k` does not divide.
    pub fn shift_down(&self, k: usize) -> Poly {
        assert!(self.zero_order() >= k || self.is_zero(), "x^{k} does not divide");
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn scale(&self, s: Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Substitutes `x -> s x`.
    pub fn rescale_arg(&self, s: Q) -> Poly {
        let mut p = Q::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * p);
            p *= s;
        }
        Poly::new(out)
    }

    pub fn to_f64(&self) -> FloatPoly {
        FloatPoly::new(self.coeffs.iter().map(frac::to_f64).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(Q::zero);
        Poly::new((0..n).map(|i| get(self, i) + get(rhs, i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => frac::to_string(c),
                1 => format!("({})x", frac::to_string(c)),
                _ => format!("({})x^{i}", frac::to_string(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Floating-point shadow of a [`Poly`] used on the numerical side.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FloatPoly {
    coeffs: Vec<f64>,
}

impl FloatPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        FloatPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> FloatPoly {
        FloatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// `Σ |c_i| |x|^i`, the magnitude scale of an evaluation at `x`.
    pub fn eval_abs(&self, x: f64) -> f64 {
        let x = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.abs())
    }

    /// `x^{-deg} p(x)` evaluated as the reversed polynomial at `1/x`;
    /// stays finite for large `x`.
    fn eval_reversed(&self, x: f64) -> f64 {
        let y = 1.0 / x;
        self.coeffs.iter().fold(0.0, |acc, c| acc * y + c)
    }

    /// Divides out a simple root `r` by synthetic division, dropping the
    /// remainder.
    pub fn deflate(&self, r: f64) -> FloatPoly {
        let n = self.coeffs.len();
        if n < 2 {
            return FloatPoly::new(vec![]);
        }
        let mut out = vec![0.0; n - 1];
        let mut carry = 0.0;
        for i in (1..n).rev() {
            carry = self.coeffs[i] + carry * r;
            out[i - 1] = carry;
        }
        FloatPoly::new(out)
    }
}

/// `num(x) / den(x)` without intermediate overflow for large `|x|`.
pub fn ratio(num: &FloatPoly, den: &FloatPoly, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        return num.eval(x) / den.eval(x);
    }
    let dn = num.degree().unwrap_or(0) as i32;
    let dd = den.degree().unwrap_or(0) as i32;
    let r = num.eval_reversed(x) / den.eval_reversed(x);
    r * x.powi(dn - dd)
}

//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic. Iteration and printing therefore follow a fixed
//! order, which downstream Gram-Schmidt relies on for determinism.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// Exponent vector `x^alpha`; its length is the ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    /// `x_i` with a zero-based index.
    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::one();
        for (x, &e) in point.iter().zip(&self.0) {
            if e > 0 {
                acc *= num_traits::pow(x.clone(), e as usize);
            }
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(point)
            .map(|(&e, x)| x.powi(e as i32))
            .product()
    }

    /// All monomials of total degree `degree` in `dim` variables, in
    /// descending graded-lex order (`x1^degree` first).
    pub fn all_of_degree(dim: usize, degree: u32) -> Vec<Monomial> {
        fn fill(rest: u32, slot: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if slot + 1 == cur.len() {
                cur[slot] = rest;
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in (0..=rest).rev() {
                cur[slot] = e;
                fill(rest - e, slot + 1, cur, out);
            }
        }
        let mut out = Vec::new();
        fill(degree, 0, &mut vec![0; dim], &mut out);
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `x1..xn`, `n >= 2`. No zero coefficient is ever stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MPoly {
    pub fn zero(dim: usize) -> Self {
        MPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        MPoly::from_terms(dim, [(Monomial::one(dim), c)])
    }

    pub fn one(dim: usize) -> Self {
        MPoly::constant(dim, Rational::one())
    }

    /// `x_{i+1}` (zero-based index).
    pub fn var(dim: usize, i: usize) -> Self {
        MPoly::from_terms(dim, [(Monomial::var(dim, i), Rational::one())])
    }

    /// `|x|^2 = x1^2 + ... + xn^2`.
    pub fn norm_sq(dim: usize) -> Self {
        MPoly::from_terms(
            dim,
            (0..dim).map(|i| {
                let mut e = vec![0; dim];
                e[i] = 2;
                (Monomial(e), Rational::one())
            }),
        )
    }

    /// Validates the dimension; polynomials in fewer than two variables are rejected.
    pub fn checked_zero(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        Ok(MPoly::zero(dim))
    }

    /// Sums like terms and drops zeros.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = MPoly::zero(dim);
        for (m, c) in terms {
            assert_eq!(m.dim(), dim, "monomial length must equal the dimension");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Greatest monomial in graded-lex order.
    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.dim);
        }
        MPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(self.dim);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `|x|^(2t) * self`.
    pub fn mul_norm_pow(&self, t: u32) -> MPoly {
        if t == 0 {
            return self.clone();
        }
        self * &MPoly::norm_sq(self.dim).pow(t)
    }

    /// Partial derivative with respect to `x_{i+1}`.
    pub fn derivative(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), c * int(e as i64));
        }
        out
    }

    /// `sum_i d^2/dx_i^2`, computed termwise.
    pub fn laplacian(&self) -> MPoly {
        let mut out = MPoly::zero(self.dim);
        for (m, c) in &self.terms {
            for i in 0..self.dim {
                let e = m.0[i];
                if e < 2 {
                    continue;
                }
                let mut exps = m.0.clone();
                exps[i] -= 2;
                out.add_term(Monomial(exps), c * int(e as i64 * (e as i64 - 1)));
            }
        }
        out
    }

    /// Least `N` with `Laplacian^(N+1)(p) = 0`; `d(0) = 0`.
    pub fn polyharmonic_degree(&self) -> u32 {
        let mut n = 0;
        let mut cur = self.laplacian();
        while !cur.is_zero() {
            n += 1;
            cur = cur.laplacian();
        }
        n
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_zero()
    }

    /// Parts by total degree; index `j` holds the degree-`j` part.
    pub fn homogeneous_parts(&self) -> Vec<MPoly> {
        let mut parts = vec![MPoly::zero(self.dim); self.degree() as usize + 1];
        for (m, c) in &self.terms {
            parts[m.degree() as usize]
                .terms
                .insert(m.clone(), c.clone());
        }
        parts
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| c * m.eval(point))
            .fold(Rational::zero(), |a, b| a + b))
    }

    /// Floating-point evaluation, used only for numeric cross-checks.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| crate::rational::to_f64(c) * m.eval_f64(point))
            .sum()
    }

    fn check_dim(&self, other: &MPoly) {
        assert_eq!(
            self.dim, other.dim,
            "polynomials of different dimensions cannot be combined"
        );
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.check_dim(rhs);
        let mut out = MPoly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $f(self, rhs: MPoly) -> MPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        write!(f, "x{}", i + 1)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text: descending graded-lex terms, in the same grammar
/// accepted by [`crate::parse::parse_poly`].
impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.degree() == 0 {
                f.write_str(&format_rational(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", format_rational(&a))?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

//! Finite-point checks of uniqueness and density for measures on algebraic
//! sets: exact evaluation ranks of `U_N = {Q : Laplacian^N Q = 0}` at atoms,
//! and separating witnesses for pairs of measures.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{harmonic_basis, np_formula, BasisIndex};
use crate::linalg;
use crate::measures::{integrate_poly, sphere_point, DiscreteMeasure};
use crate::poly::{MPoly, Monomial};
use crate::rational::{self, Rational};

/// An element `|x|^(2t) Y_{k,m}` of a `U_N` basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnpElement {
    pub index: BasisIndex,
    pub poly: MPoly,
}

impl UnpElement {
    pub fn degree(&self) -> u32 {
        2 * self.index.0 + self.index.1
    }
}

/// Basis `{|x|^(2t) Y_{k,m} : t < n_bound, 2t + k <= d}` of the polynomials
/// of degree `<= d` in `U_{n_bound}`, by degree and then by descending
/// graded-lex leading monomial.
pub fn u_basis(dim: usize, n_bound: u32, d: u32) -> Vec<UnpElement> {
    let mut out = Vec::new();
    for t in 0..n_bound {
        if 2 * t > d {
            break;
        }
        for k in 0..=d - 2 * t {
            let layer = harmonic_basis(dim, k);
            for (mi, e) in layer.elements.iter().enumerate() {
                out.push(UnpElement {
                    index: (t, k, mi + 1),
                    poly: e.poly.mul_norm_pow(t),
                });
            }
        }
    }
    out.sort_by_cached_key(|e| {
        let lead = e.poly.leading_monomial().cloned().unwrap_or_else(|| Monomial::one(dim));
        (e.degree(), Reverse(lead), e.index)
    });
    out
}

/// Basis of `U_{N_P}` up to degree `d`.
pub fn unp_basis(p: &MPoly, d: u32) -> Result<Vec<MPoly>> {
    let np = np_formula(p)?;
    Ok(u_basis(p.dim(), np, d).into_iter().map(|e| e.poly).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub basis_description: String,
    pub atom_count: usize,
    pub basis_size: usize,
    pub evaluation_matrix_rank: usize,
    pub full_rank: bool,
    /// With full rank: an element of the subspace equal to 1 at the first
    /// atom and 0 at the others.
    #[serde(serialize_with = "serialize_opt_poly")]
    pub separating_witness: Option<MPoly>,
}

fn serialize_opt_poly<S: serde::Serializer>(
    p: &Option<MPoly>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.serialize_some(&p.to_string()),
        None => s.serialize_none(),
    }
}

impl RankReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn check_atoms(p: &MPoly, atoms: &[Vec<Rational>]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (index, x) in atoms.iter().enumerate() {
        if !p.eval(x)?.is_zero() {
            return Err(Error::AtomOffVariety { index });
        }
        if !seen.insert(x) {
            return Err(Error::DuplicateAtom { index });
        }
    }
    Ok(())
}

fn rank_report(
    description: String,
    basis: &[MPoly],
    atoms: &[Vec<Rational>],
) -> Result<RankReport> {
    // Rows are atoms, columns basis elements.
    let eval: Vec<Vec<Rational>> = atoms
        .iter()
        .map(|x| basis.iter().map(|b| b.eval(x)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let rank = linalg::rank(&eval, basis.len());
    let full_rank = rank == atoms.len();
    let separating_witness = if full_rank && !atoms.is_empty() {
        let target: Vec<Rational> = (0..atoms.len())
            .map(|i| if i == 0 { Rational::one() } else { Rational::zero() })
            .collect();
        let c = linalg::solve(&eval, &target, basis.len())
            .ok_or_else(|| Error::Consistency("full-rank evaluation must interpolate".into()))?;
        let dim = atoms[0].len();
        Some(
            basis
                .iter()
                .zip(&c)
                .fold(MPoly::zero(dim), |acc, (b, ci)| &acc + &b.scale(ci)),
        )
    } else {
        None
    };
    Ok(RankReport {
        basis_description: description,
        atom_count: atoms.len(),
        basis_size: basis.len(),
        evaluation_matrix_rank: rank,
        full_rank,
        separating_witness,
    })
}

/// Rank of the evaluation matrix of `U_{N_P}` up to degree `d` at the atoms.
/// Full rank means every function on the atoms is the restriction of a
/// polynomial in the subspace.
pub fn density_rank_test(p: &MPoly, atoms: &[Vec<Rational>], d: u32) -> Result<RankReport> {
    check_atoms(p, atoms)?;
    let np = np_formula(p)?;
    let basis = unp_basis(p, d)?;
    rank_report(format!("U_{np}, degree <= {d}"), &basis, atoms)
}

/// Smallest `d <= d_max` at which [`density_rank_test`] reaches full rank.
pub fn first_full_rank(p: &MPoly, atoms: &[Vec<Rational>], d_max: u32) -> Result<Option<u32>> {
    for d in 0..=d_max {
        if density_rank_test(p, atoms, d)?.full_rank {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Evaluation ranks of `U_N`, `N = 1..=N_P`, up to degree `d`. For
/// exploration only: nothing asserts how the smaller subspaces behave.
pub fn exploratory_ranks(p: &MPoly, atoms: &[Vec<Rational>], d: u32) -> Result<Vec<(u32, RankReport)>> {
    check_atoms(p, atoms)?;
    let np = np_formula(p)?;
    (1..=np)
        .map(|n| {
            let basis: Vec<MPoly> = u_basis(p.dim(), n, d).into_iter().map(|e| e.poly).collect();
            Ok((n, rank_report(format!("U_{n}, degree <= {d}"), &basis, atoms)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separation {
    Equal,
    Separated {
        witness: MPoly,
        degree: u32,
        mu_value: Rational,
        nu_value: Rational,
    },
    Inconclusive { d_max: u32 },
}

fn check_measure_on(p: &MPoly, mu: &DiscreteMeasure) -> Result<()> {
    if p.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: p.dim(),
        });
    }
    for (index, a) in mu.atoms().iter().enumerate() {
        if !p.eval(&a.point)?.is_zero() {
            return Err(Error::AtomOffVariety { index });
        }
    }
    Ok(())
}

/// Searches `U_{N_P}` by increasing degree, then basis order, for `h` with
/// `int h d(mu) != int h d(nu)`.
pub fn separation_test(
    p: &MPoly,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    d_max: u32,
) -> Result<Separation> {
    check_measure_on(p, mu)?;
    check_measure_on(p, nu)?;
    let np = np_formula(p)?;
    let equal = mu.same_measure(nu);
    for e in u_basis(p.dim(), np, d_max) {
        let a = integrate_poly(mu, &e.poly)?;
        let b = integrate_poly(nu, &e.poly)?;
        if a != b {
            if equal {
                return Err(Error::Consistency(
                    "identical measures have different moments".into(),
                ));
            }
            return Ok(Separation::Separated {
                degree: e.degree(),
                witness: e.poly,
                mu_value: a,
                nu_value: b,
            });
        }
    }
    Ok(if equal {
        Separation::Equal
    } else {
        Separation::Inconclusive { d_max }
    })
}

/// Algebraic sets with plenty of rational points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Variety {
    /// `|x|^2 - R^2` for a positive integer `R`.
    Sphere(u32),
    /// `x1 * x2`
    CoordinateCross,
    /// `x1 * (|x|^2 - 1)`
    SphereAndHyperplane,
}

impl Variety {
    pub fn catalog() -> Vec<Variety> {
        vec![
            Variety::Sphere(1),
            Variety::Sphere(2),
            Variety::CoordinateCross,
            Variety::SphereAndHyperplane,
        ]
    }

    pub fn poly(&self, dim: usize) -> MPoly {
        let one = MPoly::one(dim);
        match self {
            Variety::Sphere(r) => {
                &MPoly::norm_sq(dim) - &one.scale(&rational::int(i64::from(*r) * i64::from(*r)))
            }
            Variety::CoordinateCross => &MPoly::var(dim, 0) * &MPoly::var(dim, 1),
            Variety::SphereAndHyperplane => &MPoly::var(dim, 0) * &(&MPoly::norm_sq(dim) - &one),
        }
    }

    /// Number of components [`Variety::point`] can place points on.
    pub fn branches(&self) -> usize {
        match self {
            Variety::Sphere(_) => 1,
            Variety::CoordinateCross | Variety::SphereAndHyperplane => 2,
        }
    }

    /// A rational point on the variety from `dim - 1` parameters.
    ///
    /// Spheres use inverse stereographic projection; coordinate hyperplanes
    /// take the parameters as the remaining coordinates.
    pub fn point(&self, dim: usize, branch: usize, params: &[Rational]) -> Vec<Rational> {
        assert_eq!(params.len(), dim - 1, "a point needs dim - 1 parameters");
        let on_hyperplane = |axis: usize| {
            let mut x = params.to_vec();
            x.insert(axis, Rational::zero());
            x
        };
        match (self, branch % self.branches()) {
            (Variety::Sphere(r), _) => {
                let r = rational::int(i64::from(*r));
                sphere_point(params).into_iter().map(|c| c * &r).collect()
            }
            (Variety::CoordinateCross, b) => on_hyperplane(b),
            (Variety::SphereAndHyperplane, 0) => on_hyperplane(0),
            (Variety::SphereAndHyperplane, _) => sphere_point(params),
        }
    }
}

/// Smallest integer `R >= 1` with `|x| <= R` for every point.
pub fn radius_bound(points: &[Vec<Rational>]) -> Rational {
    let max_sq = points
        .iter()
        .map(|x| x.iter().map(|v| v * v).sum::<Rational>())
        .max()
        .unwrap_or_else(Rational::zero);
    let mut r = BigInt::one();
    while Rational::from_integer(&r * &r) < max_sq {
        r += 1;
    }
    Rational::from_integer(r)
}

//! Seeded random instances shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use polyharmonic::harmonic::harmonic_basis;
use polyharmonic::rational::{int, ratio, Rational};
use polyharmonic::verify::{radius_bound, Variety};
use polyharmonic::{Atom, DiscreteMeasure, MPoly, Monomial};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational `p/q` with `|p| <= 5`, `1 <= q <= 4`.
pub fn coeff(rng: &mut TestRng) -> Rational {
    let p = loop {
        let p = rng.gen_range(-5i64..=5);
        if p != 0 {
            break p;
        }
    };
    ratio(p, rng.gen_range(1..=4))
}

/// Rational in `[-1/2, 1/2]` with denominator at most 6.
pub fn small(rng: &mut TestRng) -> Rational {
    let q = rng.gen_range(1i64..=6);
    let p = rng.gen_range(-q..=q);
    ratio(p, 2 * q)
}

pub fn monomial(rng: &mut TestRng, dim: usize, degree: u32) -> Monomial {
    let mut e = vec![0u32; dim];
    for _ in 0..degree {
        e[rng.gen_range(0..dim)] += 1;
    }
    Monomial::new(e)
}

/// Nonzero polynomial of degree at most `max_degree` with 1 to 6 terms.
pub fn poly(rng: &mut TestRng, dim: usize, max_degree: u32) -> MPoly {
    loop {
        let terms = rng.gen_range(1..=6);
        let p = MPoly::from_terms(
            dim,
            (0..terms).map(|_| {
                let d = rng.gen_range(0..=max_degree);
                (monomial(rng, dim, d), coeff(rng))
            }),
        );
        if !p.is_zero() {
            return p;
        }
    }
}

/// Nonzero polynomial of degree exactly `degree`.
pub fn poly_of_degree(rng: &mut TestRng, dim: usize, degree: u32) -> MPoly {
    loop {
        let p = &poly(rng, dim, degree)
            + &MPoly::from_terms(dim, [(monomial(rng, dim, degree), coeff(rng))]);
        if p.degree() == degree {
            return p;
        }
    }
}

/// Random harmonic polynomial of degree at most `max_degree`, nonzero.
pub fn harmonic(rng: &mut TestRng, dim: usize, max_degree: u32) -> MPoly {
    loop {
        let mut h = MPoly::zero(dim);
        for k in 0..=max_degree {
            if rng.gen_bool(0.5) {
                continue;
            }
            let layer = harmonic_basis(dim, k);
            for e in &layer.elements {
                if rng.gen_bool(0.5) {
                    h = &h + &e.poly.scale(&coeff(rng));
                }
            }
        }
        if !h.is_zero() {
            return h;
        }
    }
}

/// Up to `max_atoms` distinct atoms with coordinates in `[-1/2, 1/2]`, radius 1.
pub fn measure(rng: &mut TestRng, dim: usize, max_atoms: usize) -> DiscreteMeasure {
    let count = rng.gen_range(1..=max_atoms);
    let mut seen = BTreeSet::new();
    let mut atoms = Vec::new();
    while atoms.len() < count {
        let point: Vec<Rational> = (0..dim).map(|_| small(rng)).collect();
        if seen.insert(point.clone()) {
            atoms.push(Atom {
                point,
                weight: coeff(rng),
            });
        }
    }
    DiscreteMeasure::new(dim, int(1), atoms).expect("valid random measure")
}

/// Distinct rational points on a catalog variety.
pub fn variety_points(rng: &mut TestRng, v: &Variety, dim: usize, count: usize) -> Vec<Vec<Rational>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let branch = rng.gen_range(0..v.branches());
        let params: Vec<Rational> = (0..dim - 1)
            .map(|_| {
                let q = rng.gen_range(1i64..=4);
                ratio(rng.gen_range(-3 * q..=3 * q), q)
            })
            .collect();
        let x = v.point(dim, branch, &params);
        if seen.insert(x.clone()) {
            out.push(x);
        }
    }
    out
}

pub fn measure_on(points: Vec<Vec<Rational>>, weights: Vec<Rational>, radius: Rational) -> DiscreteMeasure {
    let dim = points[0].len();
    DiscreteMeasure::new(
        dim,
        radius,
        points
            .into_iter()
            .zip(weights)
            .map(|(point, weight)| Atom { point, weight })
            .collect(),
    )
    .expect("valid measure on a variety")
}

/// A random measure on a catalog variety; weights positive when `positive`.
pub fn variety_measure(
    rng: &mut TestRng,
    v: &Variety,
    dim: usize,
    count: usize,
    positive: bool,
) -> DiscreteMeasure {
    let points = variety_points(rng, v, dim, count);
    let radius = radius_bound(&points);
    let weights = (0..count)
        .map(|_| {
            let w = coeff(rng);
            if positive && w < int(0) {
                -w
            } else {
                w
            }
        })
        .collect();
    measure_on(points, weights, radius)
}

pub fn choose<'a, T>(rng: &mut TestRng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("nonempty")
}

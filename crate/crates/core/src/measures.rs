//! Finitely supported signed measures with exact rational atoms.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{harmonic_basis, BasisIndex};
use crate::linalg;
use crate::poly::{MPoly, Monomial};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub point: Vec<Rational>,
    pub weight: Rational,
}

impl Atom {
    pub fn norm_sq(&self) -> Rational {
        self.point.iter().map(|x| x * x).sum()
    }
}

/// `sum_i w_i delta_{x_i}` with every `|x_i| <= R`. Weights are nonzero and
/// may be negative; the empty measure is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    dim: usize,
    radius: Rational,
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    #[serde(with = "rational::serde_string_vec")]
    point: Vec<Rational>,
    #[serde(with = "rational::serde_string")]
    weight: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    dim: usize,
    #[serde(with = "rational::serde_string")]
    radius: Rational,
    atoms: Vec<AtomDoc>,
}

impl DiscreteMeasure {
    /// Validates every invariant of a measure.
    pub fn new(dim: usize, radius: Rational, atoms: Vec<Atom>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if radius < Rational::zero() {
            return Err(Error::Schema("radius must be non-negative".into()));
        }
        let r2 = &radius * &radius;
        let mut seen = BTreeSet::new();
        for (index, a) in atoms.iter().enumerate() {
            if a.point.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.point.len(),
                });
            }
            if a.weight.is_zero() {
                return Err(Error::ZeroWeight { index });
            }
            if a.norm_sq() > r2 {
                return Err(Error::AtomOutsideRadius { index });
            }
            if !seen.insert(a.point.clone()) {
                return Err(Error::DuplicateAtom { index });
            }
        }
        Ok(DiscreteMeasure { dim, radius, atoms })
    }

    pub fn zero(dim: usize, radius: Rational) -> Result<Self> {
        DiscreteMeasure::new(dim, radius, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|a| &a.weight).sum()
    }

    /// Atoms keyed by point; two measures are equal as measures iff these agree.
    pub fn canonical(&self) -> BTreeMap<Vec<Rational>, Rational> {
        self.atoms
            .iter()
            .map(|a| (a.point.clone(), a.weight.clone()))
            .collect()
    }

    pub fn same_measure(&self, other: &DiscreteMeasure) -> bool {
        self.dim == other.dim && self.canonical() == other.canonical()
    }

    /// Reads the JSON schema
    /// `{"dim": n, "radius": "p/q", "atoms": [{"point": [...], "weight": "p/q"}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MeasureDoc =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        DiscreteMeasure::new(
            doc.dim,
            doc.radius,
            doc.atoms
                .into_iter()
                .map(|a| Atom {
                    point: a.point,
                    weight: a.weight,
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let doc = MeasureDoc {
            dim: self.dim,
            radius: self.radius.clone(),
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomDoc {
                    point: a.point.clone(),
                    weight: a.weight.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("measure serializes")
    }

    /// `count` atoms of weight `1/count` lying exactly on the unit circle at
    /// angles `2 pi j / count`, up to an angle error of order `1e-12`.
    ///
    /// The points are rational; `|x| = 1` holds exactly. When `count` is a
    /// multiple of 4 the configuration is exactly invariant under quarter
    /// turns, so only sectors `k = 0 mod 4` of its series are nonzero.
    pub fn rational_circle(count: usize) -> Self {
        assert!(count > 0);
        let w = Rational::new(1.into(), (count as i64).into());
        let base = |j: usize| {
            let mut phi = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
            if phi > std::f64::consts::PI {
                phi -= 2.0 * std::f64::consts::PI;
            }
            if j == 0 {
                vec![Rational::one(), Rational::zero()]
            } else {
                circle_point(&rational::approximate((phi / 2.0).tan(), 1 << 20))
            }
        };
        let points: Vec<Vec<Rational>> = if count.is_multiple_of(4) {
            let quarter: Vec<_> = (0..count / 4).map(base).collect();
            let mut out = quarter.clone();
            for _ in 1..4 {
                let last = &out[out.len() - quarter.len()..];
                let turned: Vec<_> = last.iter().map(|x| vec![-&x[1], x[0].clone()]).collect();
                out.extend(turned);
            }
            out
        } else {
            (0..count).map(base).collect()
        };
        let atoms = points
            .into_iter()
            .map(|point| Atom {
                point,
                weight: w.clone(),
            })
            .collect();
        DiscreteMeasure::new(2, Rational::one(), atoms).expect("valid circle measure")
    }

    /// `sum_i w_i p(x_i)`.
    pub fn integrate(&self, p: &MPoly) -> Result<Rational> {
        integrate_poly(self, p)
    }
}

/// Rational point on the unit circle with half-angle tangent `t`.
pub fn circle_point(t: &Rational) -> Vec<Rational> {
    let t2 = t * t;
    let den = Rational::one() + &t2;
    vec![
        (Rational::one() - &t2) / &den,
        (t + t) / &den,
    ]
}

/// Inverse stereographic projection of `u` in `R^(n-1)` onto `S^(n-1)`.
pub fn sphere_point(u: &[Rational]) -> Vec<Rational> {
    let s: Rational = u.iter().map(|x| x * x).sum();
    let den = &s + Rational::one();
    let mut out: Vec<Rational> = u.iter().map(|x| (x + x) / &den).collect();
    out.push((s - Rational::one()) / den);
    out
}

/// `integral of p d(mu) = sum_i w_i p(x_i)`, exact.
pub fn integrate_poly(mu: &DiscreteMeasure, p: &MPoly) -> Result<Rational> {
    if p.dim() != mu.dim {
        return Err(Error::DimensionMismatch {
            expected: mu.dim,
            found: p.dim(),
        });
    }
    let mut acc = Rational::zero();
    for a in &mu.atoms {
        acc += &a.weight * p.eval(&a.point)?;
    }
    Ok(acc)
}

/// Exact distributed moments `c_{t,k,m} = integral |x|^(2t) Y_{k,m}(x) d(mu)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentTable {
    pub dim: usize,
    pub t_max: u32,
    pub k_max: u32,
    /// Every `(t, k, m)` in range, zeros included.
    pub entries: BTreeMap<BasisIndex, Rational>,
}

#[derive(Serialize)]
struct MomentDoc<'a> {
    t: u32,
    k: u32,
    m: usize,
    #[serde(with = "rational::serde_string")]
    value: &'a Rational,
}

impl MomentTable {
    pub fn get(&self, t: u32, k: u32, m: usize) -> Option<&Rational> {
        self.entries.get(&(t, k, m))
    }

    /// JSON array of `{"t", "k", "m", "value"}`.
    pub fn to_json(&self) -> String {
        let docs: Vec<MomentDoc> = self
            .entries
            .iter()
            .map(|(&(t, k, m), value)| MomentDoc { t, k, m, value })
            .collect();
        serde_json::to_string(&docs).expect("moments serialize")
    }
}

/// All `c_{t,k,m}` with `t <= t_max`, `k <= k_max`.
pub fn distributed_moments(mu: &DiscreteMeasure, t_max: u32, k_max: u32) -> MomentTable {
    let norms: Vec<Rational> = mu.atoms.iter().map(Atom::norm_sq).collect();
    let mut entries = BTreeMap::new();
    for k in 0..=k_max {
        let layer = harmonic_basis(mu.dim, k);
        for (mi, e) in layer.elements.iter().enumerate() {
            let values: Vec<Rational> = mu
                .atoms
                .iter()
                .map(|a| &a.weight * e.poly.eval(&a.point).expect("dimension checked"))
                .collect();
            let mut powers: Vec<Rational> = vec![Rational::one(); values.len()];
            for t in 0..=t_max {
                let c: Rational = values.iter().zip(&powers).map(|(v, p)| v * p).sum();
                entries.insert((t, k, mi + 1), c);
                for (p, n) in powers.iter_mut().zip(&norms) {
                    *p *= n;
                }
            }
        }
    }
    MomentTable {
        dim: mu.dim,
        t_max,
        k_max,
        entries,
    }
}

/// `P` is orthogonal to every polynomial of degree `< order` iff
/// `integral P |x|^(2t) Y_{k,m} d(mu) = 0` for all `2t + k <= order - 1`.
pub fn orthogonality_order_direct(p: &MPoly, mu: &DiscreteMeasure, order: u32) -> Result<bool> {
    if p.dim() != mu.dim {
        return Err(Error::DimensionMismatch {
            expected: mu.dim,
            found: p.dim(),
        });
    }
    for s in 0..order {
        for t in 0..=s / 2 {
            let k = s - 2 * t;
            for e in &harmonic_basis(mu.dim, k).elements {
                let q = &e.poly.mul_norm_pow(t) * p;
                if !integrate_poly(mu, &q)?.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Orthogonality of `P` to all polynomials of degree `< order`, decided by the
/// direct moment test and confirmed against the vanishing of the rest
/// coefficients `r_0[P], ..., r_{order-1}[P]`. The two always agree; a
/// disagreement is reported as a consistency error.
pub fn orthogonality_order(p: &MPoly, mu: &DiscreteMeasure, order: u32) -> Result<bool> {
    let direct = orthogonality_order_direct(p, mu, order)?;
    let by_rest = crate::markov::rest_vanishes_below(p, mu, order)?;
    if direct != by_rest {
        return Err(Error::Consistency(format!(
            "moment test says {direct}, rest coefficients say {by_rest}"
        )));
    }
    Ok(direct)
}

/// `seed` minus its `mu`-orthogonal projection onto `span(basis)`, from the
/// exact Gram system `G c = b`. Singular Gram matrices are resolved with free
/// variables set to zero, pivoting in the order of `basis`.
pub fn project_out(mu: &DiscreteMeasure, basis: &[MPoly], seed: &MPoly) -> Result<MPoly> {
    if seed.dim() != mu.dim {
        return Err(Error::DimensionMismatch {
            expected: mu.dim,
            found: seed.dim(),
        });
    }
    if basis.is_empty() || mu.atoms.is_empty() {
        return Ok(seed.clone());
    }
    // Gram entries from values at the atoms.
    let vals: Vec<Vec<Rational>> = basis
        .iter()
        .map(|b| mu.atoms.iter().map(|a| b.eval(&a.point)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let seed_vals: Vec<Rational> = mu
        .atoms
        .iter()
        .map(|a| seed.eval(&a.point))
        .collect::<Result<_>>()?;
    let weights: Vec<&Rational> = mu.atoms.iter().map(|a| &a.weight).collect();
    let dot = |u: &[Rational], v: &[Rational]| -> Rational {
        u.iter()
            .zip(v)
            .zip(&weights)
            .map(|((x, y), w)| x * y * *w)
            .sum()
    };
    let gram: Vec<Vec<Rational>> = vals
        .iter()
        .map(|u| vals.iter().map(|v| dot(u, v)).collect())
        .collect();
    let rhs: Vec<Rational> = vals.iter().map(|u| dot(u, &seed_vals)).collect();
    let c = linalg::solve(&gram, &rhs, basis.len()).ok_or_else(|| {
        Error::Consistency("Gram system of a measure must be consistent".into())
    })?;
    Ok(basis
        .iter()
        .zip(&c)
        .fold(seed.clone(), |acc, (b, ci)| &acc - &b.scale(ci)))
}

/// `seed` made `mu`-orthogonal to all polynomials of degree `< target_degree`,
/// projecting against the monomials in ascending graded-lex order. A zero
/// result means the seed was annihilated.
pub fn orthogonalize(mu: &DiscreteMeasure, target_degree: u32, seed: &MPoly) -> Result<MPoly> {
    let basis: Vec<MPoly> = (0..target_degree)
        .flat_map(|d| Monomial::all_of_degree(mu.dim, d).into_iter().rev())
        .map(|m| MPoly::from_terms(mu.dim, [(m, Rational::one())]))
        .collect();
    project_out(mu, &basis, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::rational::{int, ratio};

    fn p(s: &str) -> MPoly {
        parse_poly(s, 2).unwrap()
    }

    fn atoms(list: &[(&[Rational], Rational)]) -> Vec<Atom> {
        list.iter()
            .map(|(pt, w)| Atom {
                point: pt.to_vec(),
                weight: w.clone(),
            })
            .collect()
    }

    fn four_points() -> DiscreteMeasure {
        let (o, z) = (int(1), int(0));
        DiscreteMeasure::new(
            2,
            int(1),
            atoms(&[
                (&[o.clone(), z.clone()], int(1)),
                (&[z.clone(), o.clone()], int(1)),
                (&[-o.clone(), z.clone()], int(1)),
                (&[z, -o], int(1)),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn loads_json_examples() {
        let mu = DiscreteMeasure::from_json(
            r#"{"dim":2,"radius":"1","atoms":[{"point":["1","0"],"weight":"1"}]}"#,
        )
        .unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert_eq!(mu.atoms()[0].point, vec![int(1), int(0)]);

        let far = DiscreteMeasure::from_json(
            r#"{"dim":2,"radius":"1","atoms":[{"point":["2","0"],"weight":"1"}]}"#,
        );
        assert_eq!(far, Err(Error::AtomOutsideRadius { index: 0 }));

        let empty = DiscreteMeasure::from_json(r#"{"dim":2,"radius":"1","atoms":[]}"#).unwrap();
        assert!(empty.atoms().is_empty());
    }

    #[test]
    fn rejects_bad_documents() {
        let dup = r#"{"dim":2,"radius":"1","atoms":[{"point":["1/2","0"],"weight":"1"},{"point":["2/4","0"],"weight":"3"}]}"#;
        assert_eq!(DiscreteMeasure::from_json(dup), Err(Error::DuplicateAtom { index: 1 }));
        let zero = r#"{"dim":2,"radius":"1","atoms":[{"point":["0","0"],"weight":"0"}]}"#;
        assert_eq!(DiscreteMeasure::from_json(zero), Err(Error::ZeroWeight { index: 0 }));
        for bad in [
            r#"{"dim":2,"radius":"1"}"#,
            r#"{"dim":2,"radius":1,"atoms":[]}"#,
            r#"{"dim":2,"radius":"1","atoms":[{"point":["x","0"],"weight":"1"}]}"#,
            r#"[1,2]"#,
        ] {
            assert!(matches!(DiscreteMeasure::from_json(bad), Err(Error::Schema(_))), "{bad}");
        }
        let short = r#"{"dim":3,"radius":"1","atoms":[{"point":["0","0"],"weight":"1"}]}"#;
        assert!(matches!(
            DiscreteMeasure::from_json(short),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let mu = DiscreteMeasure::rational_circle(7);
        assert_eq!(DiscreteMeasure::from_json(&mu.to_json()).unwrap(), mu);
    }

    #[test]
    fn integrate_examples() {
        let e1 = DiscreteMeasure::new(2, int(1), atoms(&[(&[int(1), int(0)], int(1))])).unwrap();
        assert_eq!(integrate_poly(&e1, &p("x1^2 + x2^2 - 1")).unwrap(), int(0));

        let pm = DiscreteMeasure::new(
            2,
            int(1),
            atoms(&[(&[int(1), int(0)], int(1)), (&[int(-1), int(0)], int(1))]),
        )
        .unwrap();
        assert_eq!(integrate_poly(&pm, &p("x1")).unwrap(), int(0));

        let half = DiscreteMeasure::new(
            2,
            int(1),
            atoms(&[(&[ratio(1, 2), ratio(1, 2)], int(2))]),
        )
        .unwrap();
        assert_eq!(integrate_poly(&half, &p("x1*x2")).unwrap(), ratio(1, 2));
        assert!(integrate_poly(&half, &parse_poly("x3", 3).unwrap()).is_err());
    }

    #[test]
    fn moments_examples() {
        let w = ratio(3, 7);
        let origin =
            DiscreteMeasure::new(2, int(1), atoms(&[(&[int(0), int(0)], w.clone())])).unwrap();
        let table = distributed_moments(&origin, 3, 4);
        for (&(t, k, _), v) in &table.entries {
            if t == 0 && k == 0 {
                assert_eq!(v, &w);
            } else {
                assert!(v.is_zero());
            }
        }

        let e1 = DiscreteMeasure::new(2, int(1), atoms(&[(&[int(1), int(0)], int(1))])).unwrap();
        let table = distributed_moments(&e1, 3, 4);
        for (&(_, k, m), v) in &table.entries {
            let y = harmonic_basis(2, k).element(m).poly.eval(&[int(1), int(0)]).unwrap();
            assert_eq!(v, &y);
        }

        let pm = DiscreteMeasure::new(
            2,
            int(1),
            atoms(&[(&[int(1), int(0)], int(2)), (&[int(-1), int(0)], int(2))]),
        )
        .unwrap();
        let table = distributed_moments(&pm, 2, 5);
        assert!(table
            .entries
            .iter()
            .filter(|(&(_, k, _), _)| k % 2 == 1)
            .all(|(_, v)| v.is_zero()));
        assert_eq!(table.entries.len(), 3 * (1 + 2 * 5));
    }

    #[test]
    fn moment_table_json() {
        let table = distributed_moments(&DiscreteMeasure::rational_circle(4), 0, 1);
        let v: serde_json::Value = serde_json::from_str(&table.to_json()).unwrap();
        assert_eq!(v[0]["t"], 0);
        assert_eq!(v[0]["m"], 1);
        assert_eq!(v[0]["value"], "1");
    }

    #[test]
    fn orthogonality_examples() {
        let mu = four_points();
        assert!(orthogonality_order(&p("x1"), &mu, 1).unwrap());
        assert!(!orthogonality_order(&p("x1"), &mu, 2).unwrap());
        let circle = p("x1^2 + x2^2 - 1");
        for m in 0..6 {
            assert!(orthogonality_order(&circle, &mu, m).unwrap());
        }
    }

    #[test]
    fn orthogonalize_examples() {
        let a = [ratio(1, 3), ratio(-1, 2)];
        let single =
            DiscreteMeasure::new(2, int(1), atoms(&[(&a, int(5))])).unwrap();
        let r = orthogonalize(&single, 1, &p("x1")).unwrap();
        assert_eq!(r, p("x1 - 1/3"));

        let mu = four_points();
        // x1*x2 vanishes at every atom, so all its projections are zero.
        assert_eq!(orthogonalize(&mu, 2, &p("x1*x2")).unwrap(), p("x1*x2"));

        let zero = DiscreteMeasure::zero(2, int(1)).unwrap();
        assert_eq!(orthogonalize(&zero, 3, &p("x1^2 - x2")).unwrap(), p("x1^2 - x2"));
    }

    #[test]
    fn orthogonalized_seed_is_orthogonal() {
        let mu = DiscreteMeasure::new(
            2,
            int(2),
            atoms(&[
                (&[int(1), int(0)], int(1)),
                (&[ratio(1, 2), int(1)], int(-2)),
                (&[int(0), ratio(-3, 2)], int(3)),
                (&[ratio(-1, 3), ratio(1, 3)], int(1)),
                (&[int(-1), int(1)], ratio(1, 2)),
            ]),
        )
        .unwrap();
        let q = orthogonalize(&mu, 2, &p("x1^2 + x2")).unwrap();
        assert!(orthogonality_order(&q, &mu, 2).unwrap());
    }

    #[test]
    fn rational_circle_lies_on_circle() {
        let mu = DiscreteMeasure::rational_circle(32);
        assert_eq!(mu.atoms().len(), 32);
        assert_eq!(mu.total_mass(), int(1));
        for a in mu.atoms() {
            assert_eq!(a.norm_sq(), int(1));
        }
    }
}

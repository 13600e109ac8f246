//! The multivariate Markov transform of a discrete measure as an exact
//! truncated series, the rest function `R_P`, the function of the second
//! kind `Q_P`, and the checks built on them.
//!
//! Conventions. The transform is
//!
//! ```text
//! mu_hat(zeta, theta) = sum_i w_i zeta^(n-1) / |zeta theta - x_i|^n
//!                     = sum_{t,k,m} c_{t,k,m} / norm_sq(k,m) * Y_{k,m}(theta) / zeta^(2t+k+1)
//! ```
//!
//! with sphere integrals normalized to total area 1, so the unit atom at the
//! origin has transform `1/zeta`. Pairing against `h(zeta theta)` is the
//! residue at infinity in `zeta` followed by the normalized sphere integral.
//! With these conventions `P(zeta theta) mu_hat = Q_P + R_P` holds exactly,
//! term by term.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{
    almansi_decompose, expand_in_basis, harmonic_basis, np_formula, sphere_expansion,
};
use crate::measures::DiscreteMeasure;
use crate::poly::MPoly;
use crate::rational::{self, Rational};

/// Key `(s, k, m)` of the term `Y_{k,m}(theta) / zeta^(s+1)`; `m` is 1-based.
pub type SeriesIndex = (u32, u32, usize);

/// `sum coeff(s,k,m) Y_{k,m}(theta) / zeta^(s+1)` over `s <= s_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesRep {
    pub dim: usize,
    pub s_max: u32,
    /// Nonzero entries only.
    pub coeffs: BTreeMap<SeriesIndex, Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffDoc {
    s: u32,
    k: u32,
    m: usize,
    #[serde(with = "rational::serde_string")]
    value: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesDoc {
    dim: usize,
    s_max: u32,
    coeffs: Vec<CoeffDoc>,
}

impl SeriesRep {
    pub fn coeff(&self, s: u32, k: u32, m: usize) -> Rational {
        self.coeffs.get(&(s, k, m)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Entries with `s <= s_max`, the rest dropped.
    pub fn truncate(&self, s_max: u32) -> SeriesRep {
        SeriesRep {
            dim: self.dim,
            s_max: s_max.min(self.s_max),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&(s, _, _), _)| s <= s_max)
                .map(|(i, v)| (*i, v.clone()))
                .collect(),
        }
    }

    /// The truncated sum at complex `zeta` and direction `theta` (normalized
    /// internally).
    pub fn eval_numeric(&self, zeta: Complex64, theta: &[f64]) -> Result<Complex64> {
        let theta = unit_direction(theta, self.dim)?;
        let inv = zeta.inv();
        let mut inv_pows = vec![inv];
        for s in 1..=self.s_max as usize {
            let next = inv_pows[s - 1] * inv;
            inv_pows.push(next);
        }
        let mut acc = Complex64::zero();
        let mut layer_vals: BTreeMap<(u32, usize), f64> = BTreeMap::new();
        for (&(s, k, m), c) in &self.coeffs {
            let y = *layer_vals
                .entry((k, m))
                .or_insert_with(|| harmonic_basis(self.dim, k).element(m).poly.eval_f64(&theta));
            acc += inv_pows[s as usize] * (rational::to_f64(c) * y);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> String {
        let doc = SeriesDoc {
            dim: self.dim,
            s_max: self.s_max,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(s, k, m), v)| CoeffDoc {
                    s,
                    k,
                    m,
                    value: v.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SeriesDoc =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if doc.dim < 2 {
            return Err(Error::DimensionTooSmall(doc.dim));
        }
        let mut coeffs = BTreeMap::new();
        for c in doc.coeffs {
            let a = harmonic_basis(doc.dim, c.k).len();
            if c.k > c.s || (c.s - c.k) % 2 == 1 || c.s > doc.s_max || c.m == 0 || c.m > a {
                return Err(Error::Schema(format!(
                    "invalid series index (s={}, k={}, m={})",
                    c.s, c.k, c.m
                )));
            }
            if !c.value.is_zero() {
                coeffs.insert((c.s, c.k, c.m), c.value);
            }
        }
        Ok(SeriesRep {
            dim: doc.dim,
            s_max: doc.s_max,
            coeffs,
        })
    }
}

fn unit_direction(theta: &[f64], dim: usize) -> Result<Vec<f64>> {
    let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    if theta.len() != dim || !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidDirection(dim));
    }
    Ok(theta.iter().map(|x| x / norm).collect())
}

/// A point `a / den` with integer `a`, with powers of each coordinate kept
/// so homogeneous polynomials evaluate in integer arithmetic.
struct ScaledPoint {
    powers: Vec<Vec<BigInt>>,
    den_powers: Vec<BigInt>,
}

impl ScaledPoint {
    fn new(x: &[Rational], max_degree: u32) -> Self {
        let den = x.iter().fold(BigInt::one(), |d, v| d.lcm(v.denom()));
        let table = |base: BigInt| {
            let mut out = vec![BigInt::one()];
            for _ in 0..max_degree {
                let next = out.last().unwrap() * &base;
                out.push(next);
            }
            out
        };
        let powers = x
            .iter()
            .map(|v| table(v.numer() * (&den / v.denom())))
            .collect();
        ScaledPoint {
            powers,
            den_powers: table(den),
        }
    }

    /// Value of `p`, homogeneous of degree `k`, at the point.
    fn eval_homogeneous(&self, p: &MPoly, k: u32) -> Rational {
        let mut int_part = BigInt::zero();
        let mut rest = Rational::zero();
        for (m, c) in p.terms() {
            let v = m
                .exponents()
                .iter()
                .zip(&self.powers)
                .fold(BigInt::one(), |acc, (&e, pw)| acc * &pw[e as usize]);
            if c.is_integer() {
                int_part += c.numer() * v;
            } else {
                rest += c * Rational::from_integer(v);
            }
        }
        (rest + Rational::from_integer(int_part)) / Rational::from_integer(self.den_powers[k as usize].clone())
    }
}

/// Series of `sum_i w_i delta_{x_i}` for arbitrary points and weights.
fn weighted_series(dim: usize, atoms: &[(&[Rational], Rational)], s_max: u32) -> SeriesRep {
    let norms: Vec<Rational> = atoms
        .iter()
        .map(|(x, _)| x.iter().map(|v| v * v).sum())
        .collect();
    let scaled: Vec<ScaledPoint> = atoms.iter().map(|(x, _)| ScaledPoint::new(x, s_max)).collect();
    let mut coeffs = BTreeMap::new();
    for k in 0..=s_max {
        let layer = harmonic_basis(dim, k);
        for (mi, e) in layer.elements.iter().enumerate() {
            let mut vals: Vec<Rational> = scaled
                .iter()
                .zip(atoms)
                .map(|(x, (_, w))| w * x.eval_homogeneous(&e.poly, k))
                .collect();
            let mut s = k;
            while s <= s_max {
                let c: Rational = vals.iter().sum();
                if !c.is_zero() {
                    coeffs.insert((s, k, mi + 1), c / &e.norm_sq);
                }
                for (v, n) in vals.iter_mut().zip(&norms) {
                    *v *= n;
                }
                s += 2;
            }
        }
    }
    SeriesRep { dim, s_max, coeffs }
}

/// Exact truncated expansion of the Markov transform of `mu`:
/// `coeff(2t+k, k, m) = c_{t,k,m} / norm_sq(k,m)` for `2t + k <= s_max`.
pub fn markov_series(mu: &DiscreteMeasure, s_max: u32) -> SeriesRep {
    let atoms: Vec<(&[Rational], Rational)> = mu
        .atoms()
        .iter()
        .map(|a| (a.point.as_slice(), a.weight.clone()))
        .collect();
    weighted_series(mu.dim(), &atoms, s_max)
}

/// Direct evaluation of `sum_i w_i zeta^(n-1) / q_i(zeta)^(n/2)` with
/// `q_i(zeta) = zeta^2 - 2 zeta <theta, x_i> + |x_i|^2`.
///
/// Requires `|zeta| > R`. In odd dimension the square root needs a branch,
/// so only real `zeta > R` is accepted there.
pub fn markov_eval_numeric(mu: &DiscreteMeasure, zeta: Complex64, theta: &[f64]) -> Result<Complex64> {
    let n = mu.dim();
    let theta = unit_direction(theta, n)?;
    let radius = rational::to_f64(mu.radius());
    if !(zeta.norm() > radius) {
        return Err(Error::ZetaInsideRadius { radius });
    }
    if n % 2 == 1 && (zeta.im != 0.0 || zeta.re <= 0.0) {
        return Err(Error::ComplexZetaOddDimension(n));
    }
    let lead = zeta.powu(n as u32 - 1);
    let mut acc = Complex64::zero();
    for a in mu.atoms() {
        let x: Vec<f64> = a.point.iter().map(rational::to_f64).collect();
        let dot: f64 = theta.iter().zip(&x).map(|(t, v)| t * v).sum();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let q = zeta * zeta - zeta * (2.0 * dot) + r2;
        let den = if n.is_multiple_of(2) {
            q.powu(n as u32 / 2)
        } else {
            Complex64::new(q.re.powf(n as f64 / 2.0), 0.0)
        };
        acc += lead / den * rational::to_f64(&a.weight);
    }
    Ok(acc)
}

/// `(1/2 pi i) oint (1/|S|) int_S P(zeta theta) S(zeta, theta) dtheta dzeta`
/// by residue pairing. Equals `int P d(mu)` when `series` is the Markov
/// series of `mu` truncated at `s_max >= deg P`.
pub fn moment_functional(series: &SeriesRep, p: &MPoly) -> Result<Rational> {
    if p.dim() != series.dim {
        return Err(Error::DimensionMismatch {
            expected: series.dim,
            found: p.dim(),
        });
    }
    if !p.is_zero() && series.s_max < p.degree() {
        return Err(Error::InsufficientTruncation {
            required: p.degree() as usize,
            given: series.s_max as usize,
        });
    }
    let mut acc = Rational::zero();
    for ((t, k, m), a) in expand_in_basis(p) {
        if let Some(c) = series.coeffs.get(&(2 * t + k, k, m)) {
            acc += a * c * &harmonic_basis(series.dim, k).element(m).norm_sq;
        }
    }
    Ok(acc)
}

/// Coefficients `r_s[P]` of the rest function `R_P(zeta, theta)`:
/// `coeff(2t+k, k, m) = int P |x|^(2t) Y_{k,m} d(mu) / norm_sq(k,m)`.
pub fn rest_series(p: &MPoly, mu: &DiscreteMeasure, s_max: u32) -> Result<SeriesRep> {
    if p.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: p.dim(),
        });
    }
    let atoms: Vec<(&[Rational], Rational)> = mu
        .atoms()
        .iter()
        .map(|a| Ok((a.point.as_slice(), &a.weight * p.eval(&a.point)?)))
        .collect::<Result<_>>()?;
    Ok(weighted_series(mu.dim(), &atoms, s_max))
}

/// Whether `r_0[P] = ... = r_{order-1}[P] = 0`.
pub fn rest_vanishes_below(p: &MPoly, mu: &DiscreteMeasure, order: u32) -> Result<bool> {
    if order == 0 {
        return Ok(true);
    }
    Ok(rest_series(p, mu, order - 1)?.is_zero())
}

/// The function of the second kind as polynomials `p_{k,m}(u)`, `u = zeta^2`:
/// `Q_P = sum zeta^(1-k) p_{k,m}(zeta^2) Y_{k,m}(theta) / norm_sq(k,m)`.
///
/// In general infinitely many sectors are nonzero, so the representation
/// holds the sectors `k <= k_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondKindRep {
    pub dim: usize,
    pub k_max: u32,
    /// Nonzero sectors only; coefficient vectors are trimmed.
    pub sectors: BTreeMap<(u32, usize), Vec<Rational>>,
}

#[derive(Serialize)]
struct SectorDoc<'a> {
    k: u32,
    m: usize,
    #[serde(with = "rational::serde_string_vec")]
    p: &'a [Rational],
}

#[derive(Serialize)]
struct SecondKindDoc<'a> {
    dim: usize,
    k_max: u32,
    sectors: Vec<SectorDoc<'a>>,
}

impl SecondKindRep {
    pub fn sector(&self, k: u32, m: usize) -> &[Rational] {
        self.sectors.get(&(k, m)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_zero(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = SecondKindDoc {
            dim: self.dim,
            k_max: self.k_max,
            sectors: self
                .sectors
                .iter()
                .map(|(&(k, m), p)| SectorDoc { k, m, p })
                .collect(),
        };
        serde_json::to_string(&doc).expect("second-kind data serializes")
    }

    /// Terms `(exponent of zeta, k, m) -> coefficient of zeta^e Y_{k,m}`.
    fn laurent_terms(&self) -> BTreeMap<(i64, u32, usize), Rational> {
        let mut out = BTreeMap::new();
        for (&(k, m), p) in &self.sectors {
            let layer = harmonic_basis(self.dim, k);
            let ns = &layer.element(m).norm_sq;
            for (i, c) in p.iter().enumerate() {
                if !c.is_zero() {
                    out.insert((2 * i as i64 + 1 - k as i64, k, m), c / ns);
                }
            }
        }
        out
    }
}

/// `p_{k,m}(u) = sum_{j>=1} sum_{i<j} u^i int |x|^(2(j-1-i)) h_{j,k,m} d(mu)`
/// where `P Y_{k,m} = sum_j |x|^(2j) h_{j,k,m}` is the Almansi decomposition.
/// Sectors `k <= k_max`.
pub fn second_kind(p: &MPoly, mu: &DiscreteMeasure, k_max: u32) -> Result<SecondKindRep> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: p.dim(),
        });
    }
    let dim = mu.dim();
    let norms: Vec<Rational> = mu.atoms().iter().map(|a| a.norm_sq()).collect();
    let mut sectors = BTreeMap::new();
    for k in 0..=k_max {
        let layer = harmonic_basis(dim, k);
        for (mi, e) in layer.elements.iter().enumerate() {
            let hs = almansi_decompose(&(p * &e.poly)).harmonics;
            if hs.len() < 2 {
                continue;
            }
            let mut coeffs = vec![Rational::zero(); hs.len() - 1];
            for (j, h) in hs.iter().enumerate().skip(1) {
                if h.is_zero() {
                    continue;
                }
                // int |x|^(2l) h d(mu) for l = 0..j-1
                let mut vals: Vec<Rational> = mu
                    .atoms()
                    .iter()
                    .map(|a| &a.weight * h.eval(&a.point).expect("dimension checked"))
                    .collect();
                let mut moments = Vec::with_capacity(j);
                for _ in 0..j {
                    moments.push(vals.iter().sum::<Rational>());
                    for (v, n) in vals.iter_mut().zip(&norms) {
                        *v *= n;
                    }
                }
                for (i, c) in coeffs.iter_mut().enumerate().take(j) {
                    *c += &moments[j - 1 - i];
                }
            }
            while coeffs.last().is_some_and(Zero::is_zero) {
                coeffs.pop();
            }
            if !coeffs.is_empty() {
                sectors.insert((k, mi + 1), coeffs);
            }
        }
    }
    Ok(SecondKindRep { dim, k_max, sectors })
}

/// Whether `deg p_{k,m} < d(P Y_{k,m})` in every sector.
pub fn degree_bound_holds(p: &MPoly, q: &SecondKindRep) -> bool {
    q.sectors.iter().all(|(&(k, m), coeffs)| {
        let layer = harmonic_basis(q.dim, k);
        let y = &layer.element(m).poly;
        coeffs.len() <= (p * y).polyharmonic_degree() as usize
    })
}

/// `P(zeta theta) S - Q_P - R_P` on every term `zeta^e Y_{k,m}` that the
/// truncation at `s_max` determines, i.e. `e >= deg P - s_max - 1`.
/// Nonzero entries only.
pub fn identity_residual(
    p: &MPoly,
    mu: &DiscreteMeasure,
    s_max: u32,
) -> Result<BTreeMap<(i64, u32, usize), Rational>> {
    if p.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: p.dim(),
        });
    }
    let deg = p.degree();
    if s_max < deg {
        return Err(Error::InsufficientTruncation {
            required: deg as usize,
            given: s_max as usize,
        });
    }
    let e_min = deg as i64 - s_max as i64 - 1;
    let dim = mu.dim();
    let series = markov_series(mu, s_max);
    let mut acc: BTreeMap<(i64, u32, usize), Rational> = BTreeMap::new();
    let mut add = |key: (i64, u32, usize), v: Rational| {
        if key.0 >= e_min && !v.is_zero() {
            *acc.entry(key).or_insert_with(Rational::zero) += v;
        }
    };

    // P(zeta theta) = sum_j zeta^j P_j(theta); P_j Y_{k,m} is re-expanded on the sphere.
    let parts = p.homogeneous_parts();
    let mut products: BTreeMap<(usize, u32, usize), BTreeMap<(u32, usize), Rational>> =
        BTreeMap::new();
    for (&(s, k, m), c) in &series.coeffs {
        for (j, part) in parts.iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            let e = j as i64 - s as i64 - 1;
            if e < e_min {
                continue;
            }
            let expansion = products.entry((j, k, m)).or_insert_with(|| {
                sphere_expansion(&(part * &harmonic_basis(dim, k).element(m).poly))
            });
            for (&(k2, m2), a) in expansion.iter() {
                add((e, k2, m2), a * c);
            }
        }
    }
    if !p.is_zero() {
        // Sector k of Q_P spans zeta^(1-k) .. zeta^(2 N_P - 1 - k) with
        // N_P <= deg P, so higher sectors lie below e_min.
        let q = second_kind(p, mu, s_max + deg)?;
        for (key, v) in q.laurent_terms() {
            add(key, -v);
        }
    }
    for (&(s, k, m), v) in &rest_series(p, mu, s_max)?.coeffs {
        add((-(s as i64) - 1, k, m), -v.clone());
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(acc)
}

/// `P(zeta theta) mu_hat = Q_P + R_P`, compared coefficientwise on every term
/// the truncation determines. Requires `s_max >= deg P`.
pub fn identity_check(p: &MPoly, mu: &DiscreteMeasure, s_max: u32) -> Result<bool> {
    Ok(identity_residual(p, mu, s_max)?.is_empty())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportVerdict {
    Supported,
    /// A nonzero rest coefficient `r_s[P]` at `(s, k, m)`.
    NotSupported {
        s: u32,
        k: u32,
        m: usize,
        value: Rational,
    },
    /// All rest coefficients up to `s_max` vanish, but `s_max` is below the
    /// bound that decides the question.
    Undecided { required: u32 },
}

/// Whether `mu` lives on `P = 0`, decided from the rest series: `R_P = 0`
/// exactly when it does, and for `m` atoms vanishing up to order
/// `2m + deg P` already forces `R_P = 0`. The verdict is cross-checked
/// against evaluating `P` at the atoms.
pub fn support_verdict(p: &MPoly, mu: &DiscreteMeasure, s_max: u32) -> Result<SupportVerdict> {
    let rest = rest_series(p, mu, s_max)?;
    let on_variety = mu
        .atoms()
        .iter()
        .map(|a| p.eval(&a.point).map(|v| v.is_zero()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    let required = 2 * mu.atoms().len() as u32 + p.degree();
    let verdict = match rest.coeffs.iter().next() {
        Some((&(s, k, m), v)) => SupportVerdict::NotSupported {
            s,
            k,
            m,
            value: v.clone(),
        },
        None if s_max >= required => SupportVerdict::Supported,
        None => SupportVerdict::Undecided { required },
    };
    let agrees = match verdict {
        SupportVerdict::Supported => on_variety,
        SupportVerdict::NotSupported { .. } => !on_variety,
        SupportVerdict::Undecided { .. } => true,
    };
    if !agrees {
        return Err(Error::Consistency(format!(
            "rest series verdict {verdict:?} contradicts atom evaluation"
        )));
    }
    Ok(verdict)
}

/// `(1/2 pi i) oint (1/|S|) int_S h(zeta theta) Q_P(zeta, theta) dtheta dzeta`
/// by residue pairing. Only sectors `k <= deg h` can pair with `h`.
pub fn second_kind_orthogonality(p: &MPoly, mu: &DiscreteMeasure, h: &MPoly) -> Result<Rational> {
    if h.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: h.dim(),
        });
    }
    if p.is_zero() || h.is_zero() {
        return Ok(Rational::zero());
    }
    let terms = second_kind(p, mu, h.degree())?.laurent_terms();
    let mut acc = Rational::zero();
    for ((t, k, m), a) in expand_in_basis(h) {
        // h contributes zeta^(2t+k); the residue picks zeta^(-1) overall.
        let e = -(2 * t as i64 + k as i64) - 1;
        if let Some(c) = terms.get(&(e, k, m)) {
            acc += a * c * &harmonic_basis(mu.dim(), k).element(m).norm_sq;
        }
    }
    Ok(acc)
}

/// Laurent polynomial in `r`: exponent -> coefficient.
type Laurent = BTreeMap<i64, Rational>;

/// `L_(k) = d^2/dr^2 + (n-1)/r d/dr - k(k+n-2)/r^2`, termwise
/// `r^j -> (j-k)(j+k+n-2) r^(j-2)`.
fn radial_operator(f: &Laurent, n: usize, k: u32) -> Laurent {
    let (n, k) = (n as i64, k as i64);
    f.iter()
        .filter_map(|(&j, c)| {
            let factor = (j - k) * (j + k + n - 2);
            (factor != 0).then(|| (j - 2, c * Rational::from_integer(factor.into())))
        })
        .collect()
}

/// `Q_P` is polyharmonic of degree `<= N_P` outside the ball: each sector
/// `f_{k,m}(r) = r^(2-n-k) p_{k,m}(r^2)` is annihilated by `L_(k)^(N_P)`.
/// Checks sectors `k <= k_max`.
pub fn polyharmonicity_check(p: &MPoly, mu: &DiscreteMeasure, k_max: u32) -> Result<bool> {
    let np = np_formula(p)?;
    let q = second_kind(p, mu, k_max)?;
    let n = mu.dim();
    for (&(k, _), coeffs) in &q.sectors {
        let shift = 2 - n as i64 - k as i64;
        let mut f: Laurent = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (2 * i as i64 + shift, c.clone()))
            .collect();
        for _ in 0..np {
            f = radial_operator(&f, n, k);
        }
        if !f.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{integrate_poly, Atom};
    use crate::parse::parse_poly;
    use crate::rational::{int, ratio};

    fn p2(s: &str) -> MPoly {
        parse_poly(s, 2).unwrap()
    }

    fn measure(dim: usize, radius: i64, list: &[(Vec<Rational>, Rational)]) -> DiscreteMeasure {
        DiscreteMeasure::new(
            dim,
            int(radius),
            list.iter()
                .map(|(p, w)| Atom {
                    point: p.clone(),
                    weight: w.clone(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn three_atoms() -> DiscreteMeasure {
        measure(
            2,
            1,
            &[
                (vec![ratio(1, 2), ratio(-1, 3)], int(2)),
                (vec![int(0), ratio(3, 4)], ratio(-1, 2)),
                (vec![ratio(-3, 5), ratio(4, 5)], ratio(1, 3)),
            ],
        )
    }

    #[test]
    fn origin_atom_is_one_over_zeta() {
        let mu = measure(2, 0, &[(vec![int(0), int(0)], int(1))]);
        let s = markov_series(&mu, 8);
        assert_eq!(s.coeffs.len(), 1);
        assert_eq!(s.coeff(0, 0, 1), int(1));
        let v = markov_eval_numeric(&mu, Complex64::new(2.0, 0.0), &[0.3, -0.7]).unwrap();
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn series_matches_moments() {
        let mu = three_atoms();
        let s = markov_series(&mu, 6);
        let table = crate::measures::distributed_moments(&mu, 3, 6);
        for (&(t, k, m), c) in &table.entries {
            if 2 * t + k <= 6 {
                let layer = harmonic_basis(2, k);
                let ns = &layer.element(m).norm_sq;
                assert_eq!(s.coeff(2 * t + k, k, m), c / ns);
            }
        }
    }

    #[test]
    fn numeric_eval_agrees_with_series() {
        let mu = three_atoms();
        let s = markov_series(&mu, 60);
        let zeta = Complex64::new(0.0, 3.0);
        let theta = [0.6, 0.8];
        let direct = markov_eval_numeric(&mu, zeta, &theta).unwrap();
        let summed = s.eval_numeric(zeta, &theta).unwrap();
        assert!((direct - summed).norm() <= 1e-10 * direct.norm());
    }

    #[test]
    fn numeric_eval_domain_errors() {
        let mu = three_atoms();
        assert!(matches!(
            markov_eval_numeric(&mu, Complex64::new(0.5, 0.5), &[1.0, 0.0]),
            Err(Error::ZetaInsideRadius { .. })
        ));
        assert!(matches!(
            markov_eval_numeric(&mu, Complex64::new(2.0, 0.0), &[0.0, 0.0]),
            Err(Error::InvalidDirection(2))
        ));
        let mu3 = measure(3, 1, &[(vec![int(0), int(0), int(1)], int(1))]);
        assert!(matches!(
            markov_eval_numeric(&mu3, Complex64::new(0.0, 2.0), &[1.0, 0.0, 0.0]),
            Err(Error::ComplexZetaOddDimension(3))
        ));
        let v = markov_eval_numeric(&mu3, Complex64::new(3.0, 0.0), &[0.0, 0.0, 1.0]).unwrap();
        // zeta^2 / (zeta - 1)^3 on the axis through the atom
        assert!((v.re - 9.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn odd_dimension_series_matches_direct() {
        let mu3 = measure(
            3,
            1,
            &[
                (vec![ratio(1, 2), int(0), ratio(1, 3)], int(1)),
                (vec![int(0), ratio(-2, 3), ratio(1, 4)], int(2)),
            ],
        );
        let zeta = Complex64::new(3.0, 0.0);
        let theta = [1.0, 2.0, -2.0];
        let direct = markov_eval_numeric(&mu3, zeta, &theta).unwrap();
        let summed = markov_series(&mu3, 30).eval_numeric(zeta, &theta).unwrap();
        assert!((direct - summed).norm() <= 1e-10 * direct.norm());
    }

    #[test]
    fn moment_functional_examples() {
        let mu = measure(2, 0, &[(vec![int(0), int(0)], ratio(3, 7))]);
        assert_eq!(
            moment_functional(&markov_series(&mu, 0), &MPoly::one(2)).unwrap(),
            ratio(3, 7)
        );
        let circle = DiscreteMeasure::rational_circle(5);
        let s = markov_series(&circle, 4);
        assert_eq!(moment_functional(&s, &p2("x1^2 + x2^2 - 1")).unwrap(), int(0));

        let mu = three_atoms();
        let p = p2("x1^3*x2 - 2*x2^2 + 1/3*x1 - 5");
        let s = markov_series(&mu, 4);
        assert_eq!(moment_functional(&s, &p).unwrap(), integrate_poly(&mu, &p).unwrap());
        assert_eq!(
            moment_functional(&markov_series(&mu, 3), &p),
            Err(Error::InsufficientTruncation { required: 4, given: 3 })
        );
    }

    #[test]
    fn rest_series_examples() {
        let mu = three_atoms();
        assert_eq!(rest_series(&MPoly::one(2), &mu, 7).unwrap(), markov_series(&mu, 7));
        let circle = DiscreteMeasure::rational_circle(6);
        assert!(rest_series(&p2("x1^2 + x2^2 - 1"), &circle, 9).unwrap().is_zero());

        let p = p2("x1*x2 - x2 + 2");
        let r = rest_series(&p, &mu, 5).unwrap();
        for s in 0..=5u32 {
            for t in 0..=s / 2 {
                let k = s - 2 * t;
                let layer = harmonic_basis(2, k);
                for (mi, e) in layer.elements.iter().enumerate() {
                    let direct =
                        integrate_poly(&mu, &(&p * &e.poly.mul_norm_pow(t))).unwrap() / &e.norm_sq;
                    assert_eq!(r.coeff(s, k, mi + 1), direct);
                }
            }
        }
    }

    #[test]
    fn series_json_round_trip() {
        let s = markov_series(&three_atoms(), 5);
        assert_eq!(SeriesRep::from_json(&s.to_json()).unwrap(), s);
        assert!(SeriesRep::from_json(
            r#"{"dim":2,"s_max":3,"coeffs":[{"s":1,"k":0,"m":1,"value":"1"}]}"#
        )
        .is_err());
    }

    #[test]
    fn circle_second_kind_is_zeta() {
        // Four equidistant atoms: only sectors k = 0 mod 4 survive.
        let circle = DiscreteMeasure::rational_circle(4);
        let p = p2("x1^2 + x2^2 - 1");
        let q = second_kind(&p, &circle, 10).unwrap();
        assert_eq!(q.sector(0, 1), &[int(1)]);
        assert!(q.sectors.keys().all(|&(k, _)| k % 4 == 0));
        assert!(polyharmonicity_check(&p, &circle, 10).unwrap());
        assert!(identity_check(&p, &circle, 8).unwrap());
    }

    #[test]
    fn second_kind_degenerate_cases() {
        let zero = DiscreteMeasure::zero(2, int(1)).unwrap();
        assert!(second_kind(&p2("x1^3 - x2"), &zero, 6).unwrap().is_zero());
        assert!(second_kind(&MPoly::one(2), &three_atoms(), 6).unwrap().is_zero());
        assert_eq!(
            second_kind(&MPoly::zero(2), &zero, 3),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn second_kind_degree_bound() {
        let mu = three_atoms();
        for s in ["x1*x2", "x1^2 - x2^2 + x1", "x1^3 - 3*x1*x2^2", "x1^2 + 2*x2 - 1"] {
            let p = p2(s);
            let q = second_kind(&p, &mu, 8).unwrap();
            assert!(degree_bound_holds(&p, &q), "{s}");
        }
    }

    #[test]
    fn decomposition_identity() {
        let mu = three_atoms();
        for s in ["1", "x1", "x1*x2 - x2 + 2", "x1^3 + x2^2*x1 - 1/2*x2"] {
            let p = p2(s);
            let residual = identity_residual(&p, &mu, p.degree() + 6).unwrap();
            assert!(residual.is_empty(), "{s}: {residual:?}");
        }
        assert!(matches!(
            identity_check(&p2("x1^3"), &mu, 2),
            Err(Error::InsufficientTruncation { .. })
        ));
    }

    #[test]
    fn identity_fails_for_wrong_q() {
        // Dropping one sector of Q_P must break the identity.
        let mu = three_atoms();
        let p = p2("x1^2 - x2");
        let mut q = second_kind(&p, &mu, 6).unwrap();
        let key = *q.sectors.keys().next().unwrap();
        q.sectors.remove(&key);
        let full = second_kind(&p, &mu, 6).unwrap().laurent_terms();
        assert_ne!(q.laurent_terms(), full);
    }

    #[test]
    fn support_examples() {
        let circle = DiscreteMeasure::rational_circle(4);
        let p = p2("x1^2 + x2^2 - 1");
        assert_eq!(support_verdict(&p, &circle, 20).unwrap(), SupportVerdict::Supported);
        assert_eq!(
            support_verdict(&p, &circle, 3).unwrap(),
            SupportVerdict::Undecided { required: 10 }
        );
        let off = measure(2, 1, &[(vec![ratio(1, 2), int(0)], int(1))]);
        assert_eq!(
            support_verdict(&p, &off, 4).unwrap(),
            SupportVerdict::NotSupported {
                s: 0,
                k: 0,
                m: 1,
                value: ratio(-3, 4)
            }
        );
    }

    #[test]
    fn orthogonality_of_second_kind() {
        let mu = three_atoms();
        let p = p2("x1^2*x2 - x1 + 1");
        for h in ["0", "1", "x1^4 - x2^3 + x1*x2", "x2^2 - 7"] {
            assert_eq!(second_kind_orthogonality(&p, &mu, &p2(h)).unwrap(), int(0));
        }
    }

    #[test]
    fn radial_operator_kernel() {
        // r^k and r^(2-n-k) span the kernel of L_(k).
        for n in 2..5usize {
            for k in 0..4u32 {
                let f: Laurent = [(k as i64, int(1)), (2 - n as i64 - k as i64, int(3))].into();
                assert!(radial_operator(&f, n, k).is_empty());
                let g: Laurent = [(k as i64 + 2, int(1))].into();
                assert!(!radial_operator(&g, n, k).is_empty());
            }
        }
    }

    #[test]
    fn polyharmonicity_examples() {
        let mu = three_atoms();
        for s in ["x1", "x1*x2 + x2^2", "x1^3 - x2 + 1"] {
            assert!(polyharmonicity_check(&p2(s), &mu, 8).unwrap(), "{s}");
        }
    }
}

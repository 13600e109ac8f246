//! Sphere inner products, orthogonal bases of harmonic homogeneous
//! polynomials, the Almansi (Gauss) decomposition and the invariant `N_P`.
//!
//! All sphere integrals are normalized by the area of the sphere, so
//! `sphere_inner(1, 1) = 1`. Bases are orthogonal, not orthonormal: the
//! normalizing constants would be square roots, so each element carries its
//! exact squared norm and every consumer divides by it.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{MPoly, Monomial};
use crate::rational::{common_denominator, int, Rational};

/// `(1/|S^{n-1}|) * integral of x^alpha over the unit sphere`, with `n = alpha.len()`.
///
/// Zero when an exponent is odd, otherwise
/// `prod (alpha_i - 1)!! / (n (n + 2) ... (n + |alpha| - 2))`.
pub fn sphere_monomial_integral(alpha: &Monomial) -> Rational {
    let e = alpha.exponents();
    if e.iter().any(|a| a % 2 == 1) {
        return Rational::zero();
    }
    let n = e.len() as i64;
    let mut num = BigInt::one();
    for &a in e {
        let mut j = a as i64 - 1;
        while j > 1 {
            num *= j;
            j -= 2;
        }
    }
    let half = alpha.degree() as i64 / 2;
    let mut den = BigInt::one();
    for j in 0..half {
        den *= n + 2 * j;
    }
    Rational::new(num, den)
}

fn inner_with_cache(
    p: &MPoly,
    q: &MPoly,
    cache: &mut HashMap<Monomial, Rational>,
) -> Rational {
    let mut acc = Rational::zero();
    for (ma, ca) in p.terms() {
        for (mb, cb) in q.terms() {
            let m = ma.mul(mb);
            if m.exponents().iter().any(|e| e % 2 == 1) {
                continue;
            }
            let v = cache
                .entry(m)
                .or_insert_with_key(sphere_monomial_integral);
            acc += ca * cb * &*v;
        }
    }
    acc
}

/// Normalized `L^2(S^{n-1})` inner product of the restrictions of `p` and `q`.
pub fn sphere_inner(p: &MPoly, q: &MPoly) -> Result<Rational> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(inner_with_cache(p, q, &mut HashMap::new()))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension `a_k` of the harmonic homogeneous polynomials of degree `k` in `n` variables.
pub fn harmonic_dimension(n: usize, k: u32) -> usize {
    let k = k as usize;
    let all = binomial(n + k - 1, k);
    if k < 2 {
        all
    } else {
        all - binomial(n + k - 3, k - 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerElement {
    #[serde(with = "poly_string")]
    pub poly: MPoly,
    #[serde(with = "crate::rational::serde_string")]
    pub norm_sq: Rational,
}

/// Orthogonal basis `Y_{k,1}, ..., Y_{k,a_k}` of the harmonic homogeneous
/// polynomials of one degree, with exact normalized squared sphere norms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarmonicLayer {
    pub dim: usize,
    pub degree: u32,
    pub elements: Vec<LayerElement>,
    /// Monomials that coordinatize the layer: a harmonic homogeneous
    /// polynomial of this degree is determined by its coefficients here.
    #[serde(skip)]
    free_monomials: Vec<Monomial>,
    /// Row `i`: expansion of the `i`-th kernel vector in the elements.
    #[serde(skip)]
    kernel_to_basis: Vec<Vec<Rational>>,
}

impl HarmonicLayer {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Element `Y_{k,m}` with 1-based `m`.
    pub fn element(&self, m: usize) -> &LayerElement {
        &self.elements[m - 1]
    }

    /// Coefficients `a_m` with `h = sum a_m Y_{k,m}` for a harmonic
    /// homogeneous `h` of this layer's degree.
    ///
    /// Reads the coordinates off the free monomials, so the caller must
    /// supply an element of the layer; `h` of another degree is a bug.
    pub fn coordinates(&self, h: &MPoly) -> Vec<Rational> {
        debug_assert!(h.is_zero() || (h.is_homogeneous() && h.degree() == self.degree));
        let mut out = vec![Rational::zero(); self.len()];
        for (f, row) in self.free_monomials.iter().zip(&self.kernel_to_basis) {
            let c = h.coeff(f);
            if c.is_zero() {
                continue;
            }
            for (o, s) in out.iter_mut().zip(row) {
                if !s.is_zero() {
                    *o += &c * s;
                }
            }
        }
        out
    }

    /// Coefficients of the orthogonal projection of `p|_S` onto the layer,
    /// `sphere_inner(p, Y_m) / norm_sq_m`. Valid for any polynomial.
    pub fn project(&self, p: &MPoly) -> Vec<Rational> {
        let mut cache = HashMap::new();
        self.elements
            .iter()
            .map(|e| inner_with_cache(p, &e.poly, &mut cache) / &e.norm_sq)
            .collect()
    }
}

/// Scales a nonzero polynomial to coprime integer coefficients with a
/// positive leading coefficient; returns the factor used.
fn primitive_scale(p: &MPoly) -> Rational {
    let l = common_denominator(p.terms().values());
    let g = p
        .terms()
        .values()
        .map(|c| c.numer() * (&l / c.denom()))
        .fold(BigInt::zero(), |g, v| g.gcd(&v));
    let mut f = Rational::new(l, g);
    if p.terms().values().next_back().is_some_and(|c| c.is_negative()) {
        f = -f;
    }
    f
}

/// [`sphere_inner`] for two harmonic homogeneous polynomials of the same
/// degree `k`, through the Fischer product:
/// `sum_alpha alpha! p_alpha q_alpha / (n (n + 2) ... (n + 2k - 2))`.
fn harmonic_inner(p: &MPoly, q: &MPoly) -> Rational {
    let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
    let mut acc = Rational::zero();
    for (m, a) in small.terms() {
        let b = large.coeff(m);
        if b.is_zero() {
            continue;
        }
        let fact: BigInt = m
            .exponents()
            .iter()
            .map(|&e| (1..=e as u64).map(BigInt::from).product::<BigInt>())
            .product();
        acc += a * b * Rational::from_integer(fact);
    }
    let n = p.dim() as i64;
    let k = p.degree().max(q.degree()) as i64;
    let den: BigInt = (0..k).map(|j| BigInt::from(n + 2 * j)).product();
    acc / Rational::from_integer(den)
}

/// The harmonic polynomial whose coefficients on monomials of `x_n`-degree
/// below 2 are those of `seed`.
fn harmonic_from_seed(dim: usize, seed: &Monomial) -> MPoly {
    let mut g = MPoly::from_terms(dim, [(seed.clone(), Rational::one())]);
    let mut i = seed.exponents()[dim - 1] as i64;
    let mut out = g.clone();
    loop {
        // Laplacian in x_1..x_{n-1} only
        let lap = (0..dim - 1).fold(MPoly::zero(dim), |acc, v| &acc + &g.derivative(v).derivative(v));
        if lap.is_zero() {
            return out;
        }
        let xn2 = MPoly::var(dim, dim - 1).pow(2);
        g = (&lap * &xn2).scale(&Rational::new((-1).into(), ((i + 2) * (i + 1)).into()));
        out = &out + &g;
        i += 2;
    }
}

fn build_layer(dim: usize, k: u32) -> HarmonicLayer {
    // A harmonic h = sum_i x_n^i g_i(x') is fixed by g_0 and g_1 through
    // g_{i+2} = -Laplacian'(g_i) / ((i+2)(i+1)). Seeding with one monomial
    // of x_n-degree 0 or 1 gives a kernel vector led by that monomial.
    let free_monomials: Vec<Monomial> = Monomial::all_of_degree(dim, k)
        .into_iter()
        .filter(|m| m.exponents()[dim - 1] < 2)
        .collect();
    let kpolys: Vec<MPoly> = free_monomials
        .iter()
        .map(|seed| harmonic_from_seed(dim, seed))
        .collect();

    // Gram-Schmidt in kernel coordinates under the Gram matrix.
    let a = kpolys.len();
    let mut gram = vec![vec![Rational::zero(); a]; a];
    for i in 0..a {
        for j in 0..=i {
            let g = harmonic_inner(&kpolys[i], &kpolys[j]);
            gram[i][j] = g.clone();
            gram[j][i] = g;
        }
    }
    let g_inner = |x: &[Rational], y: &[Rational]| -> Rational {
        let mut acc = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc += xi * yj * &gram[i][j];
                }
            }
        }
        acc
    };
    let mut ortho: Vec<Vec<Rational>> = Vec::with_capacity(a);
    let mut ortho_norm: Vec<Rational> = Vec::with_capacity(a);
    let mut mu = vec![vec![Rational::zero(); a]; a];
    for i in 0..a {
        let mut e = vec![Rational::zero(); a];
        e[i] = Rational::one();
        let mut v = e.clone();
        for j in 0..i {
            let c = g_inner(&e, &ortho[j]) / &ortho_norm[j];
            if c.is_zero() {
                continue;
            }
            for (vl, ol) in v.iter_mut().zip(&ortho[j]) {
                *vl -= &c * ol;
            }
            mu[i][j] = c;
        }
        let nv = g_inner(&v, &v);
        ortho_norm.push(nv);
        ortho.push(v);
    }
    let mut elements = Vec::with_capacity(a);
    let mut lambdas = Vec::with_capacity(a);
    for i in 0..a {
        let raw = ortho[i]
            .iter()
            .zip(&kpolys)
            .fold(MPoly::zero(dim), |acc, (c, kp)| &acc + &kp.scale(c));
        let lambda = primitive_scale(&raw);
        elements.push(LayerElement {
            poly: raw.scale(&lambda),
            norm_sq: &lambda * &lambda * &ortho_norm[i],
        });
        lambdas.push(lambda);
    }
    let kernel_to_basis = (0..a)
        .map(|i| {
            (0..a)
                .map(|m| match m.cmp(&i) {
                    std::cmp::Ordering::Less => &mu[i][m] / &lambdas[m],
                    std::cmp::Ordering::Equal => lambdas[i].recip(),
                    std::cmp::Ordering::Greater => Rational::zero(),
                })
                .collect()
        })
        .collect();
    HarmonicLayer {
        dim,
        degree: k,
        elements,
        free_monomials,
        kernel_to_basis,
    }
}

/// Orthogonal basis of the degree-`k` harmonic homogeneous polynomials in
/// `dim` variables.
///
/// The kernel of the Laplacian has one vector per monomial of `x_n`-degree
/// at most 1, and that monomial is its graded-lex leading monomial. The
/// vectors, in descending order of leading monomial, are orthogonalized by
/// Gram-Schmidt under [`sphere_inner`] and scaled to primitive integer
/// coefficients.
/// Layers are memoized per `(dim, k)`.
pub fn harmonic_basis(dim: usize, k: u32) -> Arc<HarmonicLayer> {
    assert!(dim >= 2, "dimension must be at least 2");
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<HarmonicLayer>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(l) = cache.lock().expect("layer cache").get(&(dim, k)) {
        return Arc::clone(l);
    }
    let layer = Arc::new(build_layer(dim, k));
    let mut guard = cache.lock().expect("layer cache");
    Arc::clone(guard.entry((dim, k)).or_insert(layer))
}

/// Harmonic components `h_0, ..., h_N` with `p = sum |x|^(2j) h_j`, `N = d(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlmansiDecomp {
    pub harmonics: Vec<MPoly>,
}

impl AlmansiDecomp {
    pub fn reconstruct(&self, dim: usize) -> MPoly {
        self.harmonics
            .iter()
            .enumerate()
            .fold(MPoly::zero(dim), |acc, (j, h)| &acc + &h.mul_norm_pow(j as u32))
    }
}

/// `Laplacian^j (|x|^(2j) h) = c h` for harmonic homogeneous `h` of degree `m`.
fn peel_constant(dim: usize, j: u32, m: u32) -> Rational {
    (1..=j as i64).fold(Rational::one(), |acc, i| {
        acc * int(2 * i * (2 * i + dim as i64 - 2 + 2 * m as i64))
    })
}

/// Almansi components of a homogeneous polynomial, by peeling the top
/// component with iterated Laplacians.
fn almansi_homogeneous(p: &MPoly) -> Vec<MPoly> {
    let dim = p.dim();
    let d = p.degree();
    let mut rest = p.clone();
    let mut out = vec![MPoly::zero(dim); p.polyharmonic_degree() as usize + 1];
    while !rest.is_zero() {
        let top = rest.polyharmonic_degree();
        let mut lap = rest.clone();
        for _ in 0..top {
            lap = lap.laplacian();
        }
        let h = lap.scale(&peel_constant(dim, top, d - 2 * top).recip());
        rest = &rest - &h.mul_norm_pow(top);
        out[top as usize] = h;
    }
    out
}

/// Gauss decomposition `p = sum_j |x|^(2j) h_j` with every `h_j` harmonic.
pub fn almansi_decompose(p: &MPoly) -> AlmansiDecomp {
    let dim = p.dim();
    let mut harmonics = vec![MPoly::zero(dim); p.polyharmonic_degree() as usize + 1];
    for part in p.homogeneous_parts() {
        if part.is_zero() {
            continue;
        }
        for (j, h) in almansi_homogeneous(&part).into_iter().enumerate() {
            harmonics[j] = &harmonics[j] + &h;
        }
    }
    AlmansiDecomp { harmonics }
}

/// Almansi decomposition by one exact linear solve per homogeneous degree:
/// the unknowns are the coefficients of `|x|^(2j) Y_{d-2j,m}` over all `j`,
/// the equations match coefficients of `p` monomial by monomial.
///
/// Independent of [`almansi_decompose`]; kept as a second route.
pub fn almansi_by_solve(p: &MPoly) -> AlmansiDecomp {
    let dim = p.dim();
    let mut harmonics = vec![MPoly::zero(dim); p.polyharmonic_degree() as usize + 1];
    for part in p.homogeneous_parts() {
        if part.is_zero() {
            continue;
        }
        let d = part.degree();
        let rows_m = Monomial::all_of_degree(dim, d);
        let row_index: HashMap<&Monomial, usize> =
            rows_m.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut columns: Vec<(u32, MPoly)> = Vec::new();
        for j in 0..=d / 2 {
            let layer = harmonic_basis(dim, d - 2 * j);
            for e in &layer.elements {
                columns.push((j, e.poly.clone()));
            }
        }
        let mut a = vec![vec![Rational::zero(); columns.len()]; rows_m.len()];
        for (c, (j, y)) in columns.iter().enumerate() {
            for (m, v) in y.mul_norm_pow(*j).terms() {
                a[row_index[m]][c] = v.clone();
            }
        }
        let b: Vec<Rational> = rows_m.iter().map(|m| part.coeff(m)).collect();
        let x = linalg::solve(&a, &b, columns.len()).expect("Gauss decomposition exists");
        for ((j, y), c) in columns.iter().zip(x) {
            if !c.is_zero() {
                let j = *j as usize;
                harmonics[j] = &harmonics[j] + &y.scale(&c);
            }
        }
    }
    AlmansiDecomp { harmonics }
}

/// Key `(t, k, m)` of the basis element `|x|^(2t) Y_{k,m}`; `m` is 1-based.
pub type BasisIndex = (u32, u32, usize);

/// Coefficients of `p` in the basis `|x|^(2t) Y_{k,m}`; zero entries omitted.
pub fn expand_in_basis(p: &MPoly) -> BTreeMap<BasisIndex, Rational> {
    let dim = p.dim();
    let mut out = BTreeMap::new();
    for part in p.homogeneous_parts() {
        if part.is_zero() {
            continue;
        }
        let d = part.degree();
        for (t, h) in almansi_homogeneous(&part).into_iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            let k = d - 2 * t as u32;
            let layer = harmonic_basis(dim, k);
            for (m, c) in layer.coordinates(&h).into_iter().enumerate() {
                if !c.is_zero() {
                    out.insert((t as u32, k, m + 1), c);
                }
            }
        }
    }
    out
}

/// The basis element `|x|^(2t) Y_{k,m}`.
pub fn basis_element(dim: usize, (t, k, m): BasisIndex) -> MPoly {
    harmonic_basis(dim, k).element(m).poly.mul_norm_pow(t)
}

/// Expansion of the restriction `p|_S` in spherical harmonics: `(k, m) -> coefficient`.
pub fn sphere_expansion(p: &MPoly) -> BTreeMap<(u32, usize), Rational> {
    let mut out: BTreeMap<(u32, usize), Rational> = BTreeMap::new();
    for ((_, k, m), c) in expand_in_basis(p) {
        let e = out.entry((k, m)).or_insert_with(Rational::zero);
        *e += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `N_P` from the closed form: for each homogeneous part `P_j` of degree
/// `N_j`, `k0` is the largest `k` with a nonzero coefficient of
/// `|x|^(2t) Y_{k,m}`, and `N_P = max_j (N_j + k0) / 2`.
pub fn np_formula(p: &MPoly) -> Result<u32> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut best = 0;
    for part in p.homogeneous_parts() {
        if part.is_zero() {
            continue;
        }
        let nj = part.degree();
        let k0 = expand_in_basis(&part)
            .keys()
            .map(|&(_, k, _)| k)
            .max()
            .expect("nonzero part has a nonzero coefficient");
        assert!(
            (nj + k0) % 2 == 0,
            "parity violated: degree {nj} with top harmonic degree {k0}"
        );
        best = best.max((nj + k0) / 2);
    }
    Ok(best)
}

/// `N_P` by definition: `max d(P * Y_{k,m})` over `k <= k_max`.
/// `k_max >= deg P` suffices.
pub fn np_search(p: &MPoly, k_max: u32) -> Result<u32> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if k_max < p.degree() {
        return Err(Error::InsufficientTruncation {
            required: p.degree() as usize,
            given: k_max as usize,
        });
    }
    let mut best = 0;
    for k in 0..=k_max {
        for e in &harmonic_basis(p.dim(), k).elements {
            best = best.max((p * &e.poly).polyharmonic_degree());
        }
    }
    Ok(best)
}

pub(crate) mod poly_string {
    use crate::poly::MPoly;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(p: &MPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&p.to_string())
    }
}

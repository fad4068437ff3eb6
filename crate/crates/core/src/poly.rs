//! Sparse multivariate real polynomials.
//!
//! A [`MultiPoly`] stores only its nonzero coefficients, keyed by exponent
//! vectors. Besides evaluation and gradients it provides the weighted norm
//! `sum |a_I|^2 I! / pi^|I|`, which is the squared L2 norm of the
//! polynomial against the Gaussian weight `exp(-pi |z|^2)` on `C^n`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Exponent vector `(i_1, ..., i_n)` of a monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Index with a single nonzero exponent `power` in slot `var`.
    pub fn unit(dim: usize, var: usize, power: u32) -> Self {
        let mut e = vec![0; dim];
        e[var] = power;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `ln(i_1! ... i_n!)`.
    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&i| ln_factorial(i)).sum()
    }

    /// All indices of total degree exactly `degree` in `dim` variables, in
    /// lexicographic order (largest first exponent first).
    pub fn all_of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        fill_degree(&mut cur, 0, degree, &mut out);
        out
    }

    /// All indices of total degree at most `max_degree`, graded by degree.
    pub fn all_up_to_degree(dim: usize, max_degree: u32) -> Vec<MultiIndex> {
        (0..=max_degree)
            .flat_map(|k| MultiIndex::all_of_degree(dim, k))
            .collect()
    }
}

fn fill_degree(cur: &mut Vec<u32>, slot: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let dim = cur.len();
    if dim == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if slot == dim - 1 {
        cur[slot] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        cur[slot] = e;
        fill_degree(cur, slot + 1, remaining - e, out);
    }
    cur[slot] = 0;
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `ln(k!)` through the log-gamma function.
pub fn ln_factorial(k: u32) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// Coefficient that makes the monomial `z^I` unit-norm for the Gaussian
/// weight `exp(-pi |z|^2)`: `sqrt(pi^|I| / I!)`.
pub fn fock_basis_weight(index: &MultiIndex) -> f64 {
    (0.5 * (index.degree() as f64 * std::f64::consts::PI.ln() - index.ln_factorial())).exp()
}

/// Sparse real polynomial in a fixed number of variables.
///
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = MultiPoly::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    /// The coordinate function `x_var`.
    pub fn variable(dim: usize, var: usize) -> Self {
        let mut p = MultiPoly::zero(dim);
        p.add_term(MultiIndex::unit(dim, var, 1), 1.0);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// exponents are summed.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = MultiPoly::zero(dim);
        for (exp, c) in terms {
            if exp.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: exp.len(),
                });
            }
            p.add_term(MultiIndex(exp), c);
        }
        Ok(p)
    }

    /// Univariate polynomial from ascending coefficients `c_0 + c_1 x + ...`.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut p = MultiPoly::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex(vec![k as u32]), c);
        }
        p
    }

    pub fn add_term(&mut self, index: MultiIndex, coef: f64) {
        assert_eq!(index.dim(), self.dim, "multi-index dimension");
        if coef == 0.0 {
            return;
        }
        let slot = self.terms.entry(index).or_insert(0.0);
        *slot += coef;
        if *slot == 0.0 {
            self.terms.retain(|_, c| *c != 0.0);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, index: &MultiIndex) -> f64 {
        self.terms.get(index).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    /// True when every term has the same total degree.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(MultiIndex::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Power table `pow[j][k] = x_j^k` for `k <= max exponent of x_j`.
    fn powers(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut max_e = vec![0u32; self.dim];
        for idx in self.terms.keys() {
            for (m, &e) in max_e.iter_mut().zip(idx.exponents()) {
                *m = (*m).max(e);
            }
        }
        x.iter()
            .zip(&max_e)
            .map(|(&xi, &m)| {
                let mut row = Vec::with_capacity(m as usize + 1);
                let mut acc = 1.0;
                for _ in 0..=m {
                    row.push(acc);
                    acc *= xi;
                }
                row
            })
            .collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let pw = self.powers(x);
        Ok(self
            .terms
            .iter()
            .map(|(idx, &c)| {
                idx.exponents()
                    .iter()
                    .enumerate()
                    .fold(c, |acc, (j, &e)| acc * pw[j][e as usize])
            })
            .sum())
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let pw = self.powers(x);
        let mut g = vec![0.0; self.dim];
        for (idx, &c) in &self.terms {
            let e = idx.exponents();
            for (k, gk) in g.iter_mut().enumerate() {
                if e[k] == 0 {
                    continue;
                }
                let mut t = c * e[k] as f64;
                for (j, &ej) in e.iter().enumerate() {
                    let p = if j == k { ej - 1 } else { ej };
                    t *= pw[j][p as usize];
                }
                *gk += t;
            }
        }
        Ok(g)
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (idx, &c) in &self.terms {
            let e = idx.exponents();
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.to_vec();
            ne[var] -= 1;
            out.add_term(MultiIndex(ne), c * e[var] as f64);
        }
        out
    }

    /// `sum |a_I|^2 I! / pi^|I|`.
    pub fn fock_norm_sq(&self) -> f64 {
        self.terms
            .iter()
            .map(|(idx, &c)| {
                let w = fock_basis_weight(idx);
                c * c / (w * w)
            })
            .sum()
    }

    pub fn scale(&self, s: f64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (idx, &c) in &self.terms {
            out.add_term(idx.clone(), c * s);
        }
        out
    }

    /// `p(lambda x)`: every term `a_I x^I` becomes `a_I lambda^|I| x^I`.
    pub fn rescale_argument(&self, lambda: f64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (idx, &c) in &self.terms {
            out.add_term(idx.clone(), c * lambda.powi(idx.degree() as i32));
        }
        out
    }

    /// Reorders variables so that new variable `j` is old variable `perm[j]`.
    pub fn permute_variables(&self, perm: &[usize]) -> MultiPoly {
        assert_eq!(perm.len(), self.dim);
        let mut out = MultiPoly::zero(self.dim);
        for (idx, &c) in &self.terms {
            let e = idx.exponents();
            let ne = perm.iter().map(|&old| e[old]).collect();
            out.add_term(MultiIndex(ne), c);
        }
        out
    }

    /// Ascending coefficient vector of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Result<Vec<f64>> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.dim,
            });
        }
        let deg = self.degree() as usize;
        let mut c = vec![0.0; deg + 1];
        for (idx, &a) in &self.terms {
            c[idx.exponents()[0] as usize] = a;
        }
        Ok(c)
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension");
        let mut out = self.clone();
        for (idx, &c) in &rhs.terms {
            out.add_term(idx.clone(), c);
        }
        out
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension");
        let mut out = MultiPoly::zero(self.dim);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                let e = a
                    .exponents()
                    .iter()
                    .zip(b.exponents())
                    .map(|(x, y)| x + y)
                    .collect();
                out.add_term(MultiIndex(e), ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiPoly")
            .field("dim", &self.dim)
            .field("terms", &self.terms)
            .finish()
    }
}

/// Value, gradient and Hessian of a polynomial at one point, computed in a
/// single sweep over the terms. Used by the grid checkers, which need all
/// three at millions of cell centres.
#[derive(Clone, Debug)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Row-major `dim x dim`.
    pub hessian: Vec<f64>,
}

/// A polynomial flattened for fast repeated evaluation of its 2-jet.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    dim: usize,
    coefs: Vec<f64>,
    exps: Vec<u32>,
    max_exp: Vec<u32>,
    /// At most four variables and every exponent below `SMALL_EXP`.
    small: bool,
}

const SMALL_EXP: usize = 24;

impl CompiledPoly {
    pub fn new(p: &MultiPoly) -> Self {
        let dim = p.dim();
        let mut coefs = Vec::with_capacity(p.num_terms());
        let mut exps = Vec::with_capacity(p.num_terms() * dim);
        let mut max_exp = vec![0u32; dim];
        for (idx, c) in p.terms() {
            coefs.push(c);
            for (j, &e) in idx.exponents().iter().enumerate() {
                exps.push(e);
                max_exp[j] = max_exp[j].max(e);
            }
        }
        let small = dim <= 4 && max_exp.iter().all(|&m| (m as usize) < SMALL_EXP);
        CompiledPoly {
            dim,
            coefs,
            exps,
            max_exp,
            small,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn powers<const N: usize>(&self, x: &[f64]) -> [[f64; SMALL_EXP]; N] {
        let mut pw = [[0.0f64; SMALL_EXP]; N];
        for j in 0..N {
            pw[j][0] = 1.0;
            for k in 1..=self.max_exp[j] as usize {
                pw[j][k] = pw[j][k - 1] * x[j];
            }
        }
        pw
    }

    fn value_small<const N: usize>(&self, x: &[f64]) -> f64 {
        let pw = self.powers::<N>(x);
        let mut s = 0.0;
        for (c, e) in self.coefs.iter().zip(self.exps.chunks_exact(N)) {
            let mut m = *c;
            for j in 0..N {
                m *= pw[j][e[j] as usize];
            }
            s += m;
        }
        s
    }

    fn jet_small<const N: usize>(&self, x: &[f64], gradient: &mut [f64], hessian: &mut [f64]) -> f64 {
        let pw = self.powers::<N>(x);
        let mut value = 0.0;
        let mut g = [0.0f64; N];
        let mut h = [[0.0f64; N]; N];
        for (c, e) in self.coefs.iter().zip(self.exps.chunks_exact(N)) {
            let mut d0 = [0.0f64; N];
            let mut d1 = [0.0f64; N];
            let mut d2 = [0.0f64; N];
            for j in 0..N {
                let ej = e[j] as usize;
                d0[j] = pw[j][ej];
                if ej >= 1 {
                    d1[j] = ej as f64 * pw[j][ej - 1];
                }
                if ej >= 2 {
                    d2[j] = (ej * (ej - 1)) as f64 * pw[j][ej - 2];
                }
            }
            let mut m = *c;
            for j in 0..N {
                m *= d0[j];
            }
            value += m;
            for k in 0..N {
                if e[k] == 0 {
                    continue;
                }
                let mut rest = *c;
                for j in 0..N {
                    if j != k {
                        rest *= d0[j];
                    }
                }
                g[k] += d1[k] * rest;
                h[k][k] += d2[k] * rest;
                for l in (k + 1)..N {
                    if e[l] == 0 {
                        continue;
                    }
                    let mut r2 = *c * d1[k] * d1[l];
                    for j in 0..N {
                        if j != k && j != l {
                            r2 *= d0[j];
                        }
                    }
                    h[k][l] += r2;
                }
            }
        }
        for k in 0..N {
            gradient[k] = g[k];
            for l in 0..N {
                hessian[k * N + l] = if l >= k { h[k][l] } else { h[l][k] };
            }
        }
        value
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        if self.small {
            match self.dim {
                1 => return self.value_small::<1>(x),
                2 => return self.value_small::<2>(x),
                3 => return self.value_small::<3>(x),
                4 => return self.value_small::<4>(x),
                _ => {}
            }
        }
        let mut s = 0.0;
        for (t, &c) in self.coefs.iter().enumerate() {
            let e = &self.exps[t * self.dim..(t + 1) * self.dim];
            let mut m = c;
            for j in 0..self.dim {
                m *= x[j].powi(e[j] as i32);
            }
            s += m;
        }
        s
    }

    /// Value, gradient and Hessian at `x`.
    pub fn jet(&self, x: &[f64]) -> Jet {
        let n = self.dim;
        let mut gradient = vec![0.0; n];
        let mut hessian = vec![0.0; n * n];
        let value = self.jet_into(x, &mut gradient, &mut hessian);
        Jet {
            value,
            gradient,
            hessian,
        }
    }

    /// Allocation-free form of [`CompiledPoly::jet`]: writes the gradient and
    /// the row-major Hessian into the given slices and returns the value.
    pub fn jet_into(&self, x: &[f64], gradient: &mut [f64], hessian: &mut [f64]) -> f64 {
        if self.small {
            match self.dim {
                1 => return self.jet_small::<1>(x, gradient, hessian),
                2 => return self.jet_small::<2>(x, gradient, hessian),
                3 => return self.jet_small::<3>(x, gradient, hessian),
                4 => return self.jet_small::<4>(x, gradient, hessian),
                _ => {}
            }
        }
        let n = self.dim;
        assert!(n <= 8, "jets are limited to 8 variables");
        gradient[..n].iter_mut().for_each(|g| *g = 0.0);
        hessian[..n * n].iter_mut().for_each(|h| *h = 0.0);
        let mut value = 0.0;
        let mut d0 = [0.0f64; 8];
        let mut d1 = [0.0f64; 8];
        let mut d2 = [0.0f64; 8];
        for (t, &c) in self.coefs.iter().enumerate() {
            let e = &self.exps[t * n..(t + 1) * n];
            for j in 0..n {
                // d^k/dx^k x^e for k = 0, 1, 2
                let (xj, ej) = (x[j], e[j]);
                match ej {
                    0 => {
                        d0[j] = 1.0;
                        d1[j] = 0.0;
                        d2[j] = 0.0;
                    }
                    1 => {
                        d0[j] = xj;
                        d1[j] = 1.0;
                        d2[j] = 0.0;
                    }
                    _ => {
                        let p2 = xj.powi(ej as i32 - 2);
                        d2[j] = (ej * (ej - 1)) as f64 * p2;
                        d1[j] = ej as f64 * p2 * xj;
                        d0[j] = p2 * xj * xj;
                    }
                }
            }
            let prod_except = |skip_a: usize, skip_b: usize| -> f64 {
                let mut p = 1.0;
                for j in 0..n {
                    if j != skip_a && j != skip_b {
                        p *= d0[j];
                    }
                }
                p
            };
            value += c * prod_except(usize::MAX, usize::MAX);
            for k in 0..n {
                if e[k] == 0 {
                    continue;
                }
                let rest = prod_except(k, usize::MAX);
                gradient[k] += c * d1[k] * rest;
                hessian[k * n + k] += c * d2[k] * rest;
                for l in (k + 1)..n {
                    if e[l] == 0 {
                        continue;
                    }
                    let h = c * d1[k] * d1[l] * prod_except(k, l);
                    hessian[k * n + l] += h;
                    hessian[l * n + k] += h;
                }
            }
        }
        value
    }
}

/// Upper bound of `sup |q|` over the box `prod_j [-r_j, r_j]` from the
/// absolute values of the coefficients.
pub fn coefficient_bound(q: &MultiPoly, radii: &[f64]) -> f64 {
    q.terms()
        .map(|(idx, c)| {
            idx.exponents()
                .iter()
                .zip(radii)
                .fold(c.abs(), |acc, (&e, &r)| acc * r.powi(e as i32))
        })
        .sum()
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, &c)| TermRepr {
                    exp: k.0.clone(),
                    coef: c,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        MultiPoly::from_terms(repr.dim, repr.terms.into_iter().map(|t| (t.exp, t.coef)))
            .map_err(serde::de::Error::custom)
    }
}

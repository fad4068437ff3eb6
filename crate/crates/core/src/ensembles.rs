//! Seeded Gaussian ensembles.
//!
//! * Kostlan: `sum_{|a| = d} xi_a sqrt(d!/a!) x^a` in `n + 1` homogeneous
//!   variables, covariance `<x, y>^d`.
//! * Truncated Bargmann-Fock: `sum_{|I| <= D} xi_I w_I x^I` with the Fock
//!   basis weights `w_I = sqrt(pi^|I| / I!)`, covariance
//!   `sum_{k <= D} (pi <x, y>)^k / k!`.
//!
//! Coefficient number `k` of the sample with seed `s` is the normal variate
//! at counter `(s, stream, k)`, so a sample is a pure function of its spec.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{fock_basis_weight, ln_factorial, MultiIndex, MultiPoly};
use crate::rng::{derive_seed, normal_at};
use crate::zeroset::Field;

const KOSTLAN_STREAM: u64 = 0x4b6f;
const FOCK_STREAM: u64 = 0x466f;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// Degree `d` forms on `RP^n` (`n + 1` variables).
    Kostlan { n: usize, d: u32 },
    /// Fock field on `R^n` truncated at total degree `truncation`.
    Fock { n: usize, truncation: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussianSampleSpec {
    #[serde(flatten)]
    pub model: Model,
    pub seed: u64,
}

/// A sample in the polynomial JSON schema, headed by the spec that made it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub spec: GaussianSampleSpec,
    #[serde(flatten)]
    pub polynomial: MultiPoly,
}

impl GaussianSampleSpec {
    pub fn sample(&self) -> Result<SampleRecord> {
        let polynomial = match self.model {
            Model::Kostlan { n, d } => sample_kostlan(n, d, self.seed)?,
            Model::Fock { n, truncation } => sample_fock(n, truncation, self.seed)?.to_polynomial(),
        };
        Ok(SampleRecord { spec: *self, polynomial })
    }
}

/// Monomials and weights of the Kostlan ensemble, shared by every sample.
#[derive(Clone, Debug)]
pub struct KostlanBasis {
    vars: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
    weights: Vec<f64>,
}

impl KostlanBasis {
    /// Basis of degree `d` forms in `n + 1` variables.
    pub fn new(n: usize, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("Kostlan degree must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::Domain("projective dimension must be at least 1".into()));
        }
        let indices = MultiIndex::all_of_degree(n + 1, d);
        let ln_d = ln_factorial(d);
        let weights = indices.iter().map(|a| (0.5 * (ln_d - a.ln_factorial())).exp()).collect();
        Ok(KostlanBasis {
            vars: n + 1,
            degree: d,
            indices,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Coefficients `xi_a sqrt(d!/a!)` in lexicographic order of `a`
    /// (largest power of the first variable first).
    pub fn coefficients(&self, seed: u64) -> Vec<f64> {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * normal_at(seed, KOSTLAN_STREAM, k as u64))
            .collect()
    }

    pub fn polynomial(&self, coefficients: &[f64]) -> MultiPoly {
        let mut p = MultiPoly::zero(self.vars);
        for (a, &c) in self.indices.iter().zip(coefficients) {
            p.add_term(a.clone(), c);
        }
        p
    }

    pub fn evaluate(&self, coefficients: &[f64], x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(coefficients)
            .map(|(a, c)| c * a.exponents().iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// A Kostlan sample: homogeneous of degree `d` in `n + 1` variables.
pub fn sample_kostlan(n: usize, d: u32, seed: u64) -> Result<MultiPoly> {
    let basis = KostlanBasis::new(n, d)?;
    Ok(basis.polynomial(&basis.coefficients(seed)))
}

/// A sampled truncated Fock field.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FockField {
    n: usize,
    truncation: u32,
    indices: Vec<MultiIndex>,
    /// Standard normal coefficients `xi_I`.
    coefficients: Vec<f64>,
    /// `xi_I w_I`, the monomial coefficients.
    #[serde(skip)]
    scaled: Vec<f64>,
}

impl FockField {
    pub fn new(n: usize, truncation: u32, coefficients: Vec<f64>) -> Result<Self> {
        let indices = MultiIndex::all_up_to_degree(n, truncation);
        if coefficients.len() != indices.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                found: coefficients.len(),
            });
        }
        let scaled = indices.iter().zip(&coefficients).map(|(i, c)| c * fock_basis_weight(i)).collect();
        Ok(FockField {
            n,
            truncation,
            indices,
            coefficients,
            scaled,
        })
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn to_polynomial(&self) -> MultiPoly {
        let mut p = MultiPoly::zero(self.n);
        for (i, &c) in self.indices.iter().zip(&self.scaled) {
            p.add_term(i.clone(), c);
        }
        p
    }

    fn powers(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(self.truncation as usize + 1);
                let mut v = 1.0;
                for _ in 0..=self.truncation {
                    p.push(v);
                    v *= xi;
                }
                p
            })
            .collect()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let pw = self.powers(x);
        let mut g = vec![0.0; self.n];
        for (idx, &c) in self.indices.iter().zip(&self.scaled) {
            let e = idx.exponents();
            for k in 0..self.n {
                if e[k] == 0 {
                    continue;
                }
                let mut m = c * e[k] as f64 * pw[k][e[k] as usize - 1];
                for j in 0..self.n {
                    if j != k {
                        m *= pw[j][e[j] as usize];
                    }
                }
                g[k] += m;
            }
        }
        g
    }

    /// Coefficient table `c[i][j]` of `x^i y^j` for `n = 2`.
    fn table_2d(&self) -> Vec<Vec<f64>> {
        let t = self.truncation as usize;
        let mut c = vec![vec![0.0; t + 1]; t + 1];
        for (idx, &v) in self.indices.iter().zip(&self.scaled) {
            let e = idx.exponents();
            c[e[0] as usize][e[1] as usize] = v;
        }
        c
    }
}

impl Field for FockField {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        let pw = self.powers(x);
        self.indices
            .iter()
            .zip(&self.scaled)
            .map(|(idx, &c)| {
                idx.exponents()
                    .iter()
                    .enumerate()
                    .fold(c, |m, (j, &e)| m * pw[j][e as usize])
            })
            .sum()
    }

    fn values_on_grid(&self, axes: &[Vec<f64>]) -> Vec<f64> {
        match axes {
            [xs, ys] if self.n == 2 => {
                let c = self.table_2d();
                let t = self.truncation as usize;
                ys.par_iter()
                    .flat_map_iter(|&y| {
                        // g_i(y) = sum_j c_ij y^j, then Horner in x
                        let g: Vec<f64> = (0..=t)
                            .map(|i| c[i][..=(t - i)].iter().rev().fold(0.0, |acc, &v| acc * y + v))
                            .collect();
                        xs.iter().map(move |&x| g.iter().rev().fold(0.0, |acc, &v| acc * x + v))
                    })
                    .collect()
            }
            [xs] if self.n == 1 => {
                let mut c = vec![0.0; self.truncation as usize + 1];
                for (idx, &v) in self.indices.iter().zip(&self.scaled) {
                    c[idx.exponents()[0] as usize] = v;
                }
                xs.iter().map(|&x| c.iter().rev().fold(0.0, |acc, &v| acc * x + v)).collect()
            }
            _ => axes_fallback(self, axes),
        }
    }
}

fn axes_fallback(f: &FockField, axes: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::new();
    let total: usize = axes.iter().map(|a| a.len()).product();
    let mut x = vec![0.0; axes.len()];
    for mut k in 0..total {
        for (j, a) in axes.iter().enumerate() {
            x[j] = a[k % a.len()];
            k /= a.len();
        }
        out.push(f.value(&x));
    }
    out
}

/// A Fock field sample with all coefficients of total degree `<= truncation`.
pub fn sample_fock(n: usize, truncation: u32, seed: u64) -> Result<FockField> {
    if truncation == 0 || n == 0 {
        return Err(Error::Domain("Fock truncation and dimension must be positive".into()));
    }
    let count = MultiIndex::all_up_to_degree(n, truncation).len();
    let xi = (0..count as u64).map(|k| normal_at(seed, FOCK_STREAM, k)).collect();
    FockField::new(n, truncation, xi)
}

/// Smallest truncation degree whose omitted variance at radius `radius`,
/// `sum_{k > D} (pi R^2)^k / k!`, is below `1e-6 exp(pi R^2)`: the upper
/// tail of a Poisson law with mean `pi R^2`.
pub fn fock_truncation(radius: f64) -> u32 {
    let lambda = std::f64::consts::PI * radius * radius;
    if lambda == 0.0 {
        return 1;
    }
    let ln_pmf = |k: u32| k as f64 * lambda.ln() - lambda - ln_factorial(k);
    let mut d = 1u32;
    loop {
        // tail beyond d, summed until terms are negligible
        let mut tail = 0.0;
        let mut k = d + 1;
        loop {
            let t = ln_pmf(k).exp();
            tail += t;
            if k as f64 > lambda && t < 1e-18 {
                break;
            }
            k += 1;
        }
        if tail < 1e-6 {
            return d;
        }
        d += 1;
    }
}

/// `sum_{k <= D} (pi s)^k / k!`, the truncated Fock kernel at `s = <x, y>`.
pub fn fock_kernel(s: f64, truncation: u32) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=truncation {
        term *= std::f64::consts::PI * s / k as f64;
        sum += term;
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoSamples);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Ok(Estimate {
            mean,
            std_err: (var / n).sqrt(),
            samples: values.len() as u64,
        })
    }
}

/// Monte Carlo estimate of `E[f(x) f(y)]` over samples seeded from
/// `spec.seed`.
pub fn covariance_probe(spec: &GaussianSampleSpec, x: &[f64], y: &[f64], samples: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let products: Vec<f64> = match spec.model {
        Model::Kostlan { n, d } => {
            let basis = KostlanBasis::new(n, d)?;
            check_len(x, n + 1)?;
            check_len(y, n + 1)?;
            (0..samples)
                .into_par_iter()
                .map(|i| {
                    let c = basis.coefficients(derive_seed(spec.seed, i));
                    basis.evaluate(&c, x) * basis.evaluate(&c, y)
                })
                .collect()
        }
        Model::Fock { n, truncation } => {
            check_len(x, n)?;
            check_len(y, n)?;
            (0..samples)
                .into_par_iter()
                .map(|i| {
                    let f = sample_fock(n, truncation, derive_seed(spec.seed, i)).expect("validated parameters");
                    f.value(x) * f.value(y)
                })
                .collect::<Vec<f64>>()
        }
    };
    Estimate::from_values(&products)
}

fn check_len(x: &[f64], n: usize) -> Result<()> {
    if x.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_kostlan_form() {
        let p = sample_kostlan(1, 1, 3).unwrap();
        assert!(p.is_homogeneous() && p.degree() == 1 && p.dim() == 2);
        assert!(sample_kostlan(1, 0, 3).is_err());
    }

    #[test]
    fn kostlan_weights_are_multinomial() {
        let b = KostlanBasis::new(1, 7).unwrap();
        // variance of the x0^(d-1) x1 coefficient is d
        assert!((b.weights[0] - 1.0).abs() < 1e-14);
        assert!((b.weights[1].powi(2) - 7.0).abs() < 1e-12);
        assert!((b.weights[2].powi(2) - 21.0).abs() < 1e-11);
        let samples = 40_000u64;
        let v: Vec<f64> = (0..samples).map(|i| b.coefficients(derive_seed(9, i))[1].powi(2)).collect();
        let e = Estimate::from_values(&v).unwrap();
        assert!((e.mean - 7.0).abs() < 3.0 * e.std_err);
    }

    #[test]
    fn samples_are_reproducible() {
        let a = sample_kostlan(2, 6, 11).unwrap();
        let b = sample_kostlan(2, 6, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_kostlan(2, 6, 12).unwrap());
        let spec = GaussianSampleSpec {
            model: Model::Fock { n: 2, truncation: 10 },
            seed: 4,
        };
        let rec = spec.sample().unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        let back: SampleRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
        assert!(json.contains("\"spec\"") && json.contains("\"terms\""));
    }

    #[test]
    fn kostlan_covariance_on_the_sphere() {
        let s = 1.0 / 2f64.sqrt();
        for (n, d, x, y) in [
            (1, 10, vec![1.0, 0.0], vec![s, s]),
            (2, 6, vec![0.0, 0.6, 0.8], vec![0.0, 1.0, 0.0]),
        ] {
            let spec = GaussianSampleSpec {
                model: Model::Kostlan { n, d },
                seed: 21,
            };
            let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let cov = covariance_probe(&spec, &x, &y, 100_000).unwrap();
            assert!((cov.mean - xy.powi(d as i32)).abs() < 3.0 * cov.std_err, "{cov:?}");
            let var = covariance_probe(&spec, &x, &x, 100_000).unwrap();
            assert!((var.mean - 1.0).abs() < 3.0 * var.std_err);
        }
    }

    #[test]
    fn rotation_invariance_of_kostlan_moments() {
        // second moment at x and at its image under a rotation agree
        let spec = GaussianSampleSpec {
            model: Model::Kostlan { n: 1, d: 5 },
            seed: 2,
        };
        let t: f64 = 0.7;
        let a = covariance_probe(&spec, &[1.0, 0.0], &[1.0, 0.0], 50_000).unwrap();
        let b = covariance_probe(&spec, &[t.cos(), t.sin()], &[t.cos(), t.sin()], 50_000).unwrap();
        assert!((a.mean - b.mean).abs() < 3.0 * a.std_err.hypot(b.std_err));
    }

    #[test]
    fn fock_covariances() {
        let spec = GaussianSampleSpec {
            model: Model::Fock { n: 1, truncation: 40 },
            seed: 5,
        };
        let c = covariance_probe(&spec, &[0.5], &[-0.5], 100_000).unwrap();
        assert!((fock_kernel(-0.25, 40) - (-PI / 4.0).exp()).abs() < 1e-12);
        assert!((c.mean - fock_kernel(-0.25, 40)).abs() < 3.0 * c.std_err, "{c:?}");
        let z = covariance_probe(&spec, &[0.0], &[0.0], 10_000).unwrap();
        assert!((z.mean - 1.0).abs() < 3.0 * z.std_err);

        let spec2 = GaussianSampleSpec {
            model: Model::Fock { n: 2, truncation: 40 },
            seed: 6,
        };
        let x = [0.6, 0.8];
        assert!((fock_kernel(1.0, 40) / PI.exp() - 1.0).abs() < 0.01);
        let v = covariance_probe(&spec2, &x, &x, 100_000).unwrap();
        assert!((v.mean - fock_kernel(1.0, 40)).abs() < 3.0 * v.std_err, "{v:?}");
    }

    #[test]
    fn truncation_rule() {
        for r in [0.5, 1.0, 1.5, 2.0] {
            let d = fock_truncation(r);
            let lambda = PI * r * r;
            let omitted = lambda.exp() - fock_kernel(r * r, d);
            assert!(omitted < 1e-6 * lambda.exp(), "r={r}");
            let prev = lambda.exp() - fock_kernel(r * r, d - 1);
            assert!(prev >= 1e-6 * lambda.exp());
        }
    }

    #[test]
    fn fock_grid_matches_pointwise() {
        let f = sample_fock(2, 20, 8).unwrap();
        let xs = vec![-1.0, 0.25, 1.5];
        let ys = vec![-0.5, 0.0, 2.0];
        let g = f.values_on_grid(&[xs.clone(), ys.clone()]);
        for (j, &y) in ys.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                let v = f.value(&[x, y]);
                assert!((g[j * 3 + i] - v).abs() < 1e-9 * (1.0 + v.abs()));
            }
        }
        let p = f.to_polynomial();
        let gp = p.gradient(&[0.3, -0.7]).unwrap();
        let gf = f.gradient(&[0.3, -0.7]);
        assert!((gp[0] - gf[0]).abs() < 1e-9 && (gp[1] - gf[1]).abs() < 1e-9);
    }
}

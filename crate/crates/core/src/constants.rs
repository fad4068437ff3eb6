//! The explicit constants attached to a regular pair.
//!
//! * `f_tau(a) = (1/sqrt(pi)) (1 - tau/a^2) int_a^inf exp(-t^2) dt` and its
//!   supremum `m_tau` over `[sqrt(tau), inf)`;
//! * `g_R(s) = ((R+s)/s)^(2n) exp(pi (R+s)^2)` and its infimum `rho_R`;
//! * `tau_(U,P) = 2 rho_R ||P||^2 inf (1/delta^2 + pi n / epsilon^2)`;
//! * the lower bound `m_tau / (2^n Vol B(R))` for `c_Sigma`.
//!
//! Everything that can leave the `f64` range is carried as a [`LogReal`].
//! For `sqrt(tau) > 8` the maximization of `f_tau` runs on `ln f_tau + tau`
//! so that the optimizer still sees the `O(1)` variation of the objective
//! when `tau` itself is astronomically large.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::logreal::LogReal;
use crate::optimize::{golden_section_min, scan_then_golden};
use crate::pairs::{family_infimum, RegularPair};
use crate::poly::ln_factorial;
use crate::rng::normal_at;

const LN_PI: f64 = 1.144_729_885_849_400_2;
/// Above this argument `ln erfc` switches to its asymptotic expansion.
const ERFC_SWITCH: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremumResult {
    pub argument: f64,
    pub value: LogReal,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// `ln(erfc(a) * exp(a^2) * a * sqrt(pi))` for large `a`, by the asymptotic
/// series `sum_k (-1)^k (2k-1)!! / (2a^2)^k`.
fn ln_erfc_asymptotic_factor(a_sq: f64) -> f64 {
    let x = 1.0 / (2.0 * a_sq);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let next = -term * (2 * k - 1) as f64 * x;
        if next.abs() >= term.abs() || next.abs() < 1e-18 {
            break;
        }
        term = next;
        sum += term;
    }
    sum.ln()
}

/// `ln erfc(a)`.
pub fn ln_erfc(a: f64) -> f64 {
    if a <= ERFC_SWITCH {
        erfc(a).ln()
    } else {
        let a_sq = a * a;
        -a_sq - a.ln() - 0.5 * LN_PI + ln_erfc_asymptotic_factor(a_sq)
    }
}

fn check_f_tau_domain(tau: f64, a: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("f_tau needs tau > 0, got {tau}")));
    }
    if !(a * a >= tau) || a < 0.0 {
        return Err(Error::Domain(format!("f_tau needs a >= sqrt(tau), got a = {a}, tau = {tau}")));
    }
    Ok(())
}

/// `f_tau(a) = (1 - tau/a^2) erfc(a) / 2`.
pub fn f_tau(tau: f64, a: f64) -> Result<f64> {
    check_f_tau_domain(tau, a)?;
    Ok(log_f_tau(tau, a)?.to_f64())
}

/// `f_tau(a)` in the log domain; exact for arguments where the double
/// underflows.
pub fn log_f_tau(tau: f64, a: f64) -> Result<LogReal> {
    check_f_tau_domain(tau, a)?;
    let gap = (a - tau.sqrt()) * (a + tau.sqrt());
    if gap <= 0.0 {
        return Ok(LogReal::ZERO);
    }
    if tau.sqrt() > ERFC_SWITCH {
        // same path as the m_tau search, so both round alike
        return Ok(LogReal::from_ln(shifted_ln_f(tau, gap, true) - tau));
    }
    Ok(LogReal::from_ln(gap.ln() - 2.0 * a.ln() - std::f64::consts::LN_2 + ln_erfc(a)))
}

/// `ln f_tau(sqrt(tau + t)) + shift(tau)` where the shift is `tau` in the
/// asymptotic regime and `0` otherwise.
fn shifted_ln_f(tau: f64, t: f64, asymptotic: bool) -> f64 {
    if t <= 0.0 {
        return f64::NEG_INFINITY;
    }
    // ln(1 - tau/a^2) = ln t - ln(tau + t)
    let ln_a_sq = tau.ln() + (t / tau).ln_1p();
    let head = t.ln() - ln_a_sq - std::f64::consts::LN_2;
    if asymptotic {
        // ln erfc(a) + tau = -t - ln(a) - ln(pi)/2 + ln S(a)
        head - t - 0.5 * ln_a_sq - 0.5 * LN_PI + ln_erfc_asymptotic_factor(tau + t)
    } else {
        head + ln_erfc((tau + t).sqrt())
    }
}

/// `m_tau` together with `ln m_tau + shift` and the shift itself.
pub(crate) struct MTauDetail {
    pub result: ExtremumResult,
    pub shifted_ln: f64,
    pub shift: f64,
}

pub(crate) fn m_tau_detail(tau: f64) -> Result<MTauDetail> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("m_tau needs a finite tau > 0, got {tau}")));
    }
    let asymptotic = tau.sqrt() > ERFC_SWITCH;
    let shift = if asymptotic { tau } else { 0.0 };
    // the maximizer lies in [sqrt(tau), sqrt(tau + 1)], i.e. t = a^2 - tau in [0, 1]
    let r = scan_then_golden(|t| -shifted_ln_f(tau, t, asymptotic), 0.0, 1.0, 1000, false, 1e-10);
    let shifted_ln = -r.value;
    let a_of = |t: f64| (tau + t).sqrt();
    Ok(MTauDetail {
        result: ExtremumResult {
            argument: a_of(r.argument),
            value: LogReal::from_ln(shifted_ln - shift),
            bracket: (a_of(r.bracket.0.max(0.0)), a_of(r.bracket.1.min(1.0))),
            iterations: r.iterations,
        },
        shifted_ln,
        shift,
    })
}

/// `m_tau = sup f_tau`, searched over `[sqrt(tau), sqrt(tau + 1)]`.
pub fn m_tau(tau: f64) -> Result<ExtremumResult> {
    Ok(m_tau_detail(tau)?.result)
}

/// `ln g_R(s) = 2n (ln(R+s) - ln s) + pi (R+s)^2`.
pub fn g_r(radius: f64, n: usize, s: f64) -> Result<LogReal> {
    if !(radius > 0.0) || !(s > 0.0) || n == 0 {
        return Err(Error::Domain(format!("g_R needs R > 0, s > 0, n >= 1 (R={radius}, s={s}, n={n})")));
    }
    Ok(LogReal::from_ln(ln_g_r(radius, n, s)))
}

fn ln_g_r(radius: f64, n: usize, s: f64) -> f64 {
    2.0 * n as f64 * ((radius + s).ln() - s.ln()) + std::f64::consts::PI * (radius + s).powi(2)
}

/// `rho_R = inf_{s > 0} g_R(s)`.
///
/// The search runs on `u = ln s`: it brackets by doubling or halving `s`
/// from `s = R`, then refines the bracket by golden section.
pub fn rho_r(radius: f64, n: usize) -> Result<ExtremumResult> {
    if !(radius > 0.0) || n == 0 {
        return Err(Error::Domain(format!("rho_R needs R > 0 and n >= 1 (R={radius}, n={n})")));
    }
    let h = |u: f64| ln_g_r(radius, n, u.exp());
    let step = std::f64::consts::LN_2;
    let u0 = radius.ln();
    let dir = if h(u0 - step) < h(u0) { -1.0 } else { 1.0 };
    let (mut prev, mut cur) = (u0 - dir * step, u0);
    let mut next = cur + dir * step;
    let mut iterations = 0;
    while h(next) < h(cur) && iterations < 2000 {
        prev = cur;
        cur = next;
        next = cur + dir * step;
        iterations += 1;
    }
    let (lo, hi) = if prev < next { (prev, next) } else { (next, prev) };
    let r = golden_section_min(h, lo, hi, 1e-10);
    Ok(ExtremumResult {
        argument: r.argument.exp(),
        value: LogReal::from_ln(r.value),
        bracket: (r.bracket.0.exp(), r.bracket.1.exp()),
        iterations: iterations + r.iterations,
    })
}

/// Volume of the Euclidean ball of radius `radius` in `R^n`.
pub fn ball_volume(n: usize, radius: f64) -> f64 {
    let v = log_ball_volume(n, radius).exp();
    debug_assert!(v <= ball_volume_envelope(n, radius) * (1.0 + 1e-12));
    v
}

pub fn log_ball_volume(n: usize, radius: f64) -> f64 {
    let nf = n as f64;
    0.5 * nf * LN_PI + nf * radius.ln() - ln_gamma(0.5 * nf + 1.0)
}

/// `2 pi^floor(n/2) / floor(n/2)! R^n`, the closed-form bound on the ball
/// volume that enters the explicit lower bound for `c_Sigma`. It dominates
/// the true volume for every `n >= 1` (with equality at `n = 1`).
pub fn ball_volume_envelope(n: usize, radius: f64) -> f64 {
    log_ball_volume_envelope(n, radius).exp()
}

pub fn log_ball_volume_envelope(n: usize, radius: f64) -> f64 {
    let k = (n / 2) as u32;
    std::f64::consts::LN_2 + k as f64 * LN_PI - ln_factorial(k) + n as f64 * radius.ln()
}

/// `tau_(U,P)` for a regular pair.
pub fn tau_pair(pair: &RegularPair) -> Result<LogReal> {
    Ok(pair_constants(pair)?.tau)
}

/// Lower bound `m_tau / (2^n Vol B(R))` for `c_Sigma` from one pair.
pub fn c_sigma_lower(pair: &RegularPair) -> Result<LogReal> {
    Ok(pair_constants(pair)?.c_lower)
}

/// The complete constant chain of a pair plus the inequalities it is
/// expected to satisfy, evaluated without leaving the log domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairConstants {
    pub n: usize,
    pub radius: f64,
    pub fock_norm_sq: f64,
    pub rho: ExtremumResult,
    /// `(delta, epsilon)` minimizing `1/delta^2 + pi n / epsilon^2` on the family.
    pub best_delta: f64,
    pub best_epsilon: f64,
    pub family_infimum: f64,
    pub tau: LogReal,
    pub m_tau: ExtremumResult,
    pub c_lower: LogReal,
    /// `ln(-ln c_lower)`.
    pub loglog_neg_c: f64,
    /// `c_lower >= floor(n/2)! exp(-(sqrt(tau+1)+1)^2) / (2^(n+1) pi^floor(n/2) R^n (1+tau) sqrt(pi))`.
    pub envelope_bound_ok: bool,
    /// `c_lower >= exp(-2 tau)`.
    pub exp_minus_two_tau_ok: bool,
}

pub fn pair_constants(pair: &RegularPair) -> Result<PairConstants> {
    let n = pair.dim();
    let radius = pair.radius();
    let fock = pair.polynomial().fock_norm_sq();
    let rho = rho_r(radius, n)?;
    let fam = family_infimum(pair)?;
    let ln_tau = std::f64::consts::LN_2 + rho.value.log_magnitude() + fock.ln() + fam.value.ln();
    let tau_f = ln_tau.exp();
    if !tau_f.is_finite() {
        return Err(Error::Unsupported(format!("tau = exp({ln_tau}) overflows the m_tau search")));
    }
    let m = m_tau_detail(tau_f)?;
    let ln_denominator = n as f64 * std::f64::consts::LN_2 + log_ball_volume(n, radius);
    let shifted_ln_c = m.shifted_ln - ln_denominator;
    let c_lower = LogReal::from_ln(shifted_ln_c - m.shift);

    // explicit envelope, shifted by the same amount as m_tau
    let k = (n / 2) as u32;
    let root = (tau_f + 1.0).sqrt();
    let shifted_envelope = if m.shift > 0.0 {
        -(2.0 + 2.0 * root)
    } else {
        -(root + 1.0).powi(2)
    } + ln_factorial(k)
        - (n + 1) as f64 * std::f64::consts::LN_2
        - k as f64 * LN_PI
        - n as f64 * radius.ln()
        - tau_f.ln_1p()
        - 0.5 * LN_PI;
    let envelope_bound_ok = shifted_ln_c >= shifted_envelope;
    let exp_minus_two_tau_ok = shifted_ln_c - m.shift >= -2.0 * tau_f;
    let loglog_neg_c = if m.shift > 0.0 {
        (m.shift - shifted_ln_c).ln()
    } else {
        c_lower.ln_neg_ln()
    };

    Ok(PairConstants {
        n,
        radius,
        fock_norm_sq: fock,
        rho,
        best_delta: fam.delta,
        best_epsilon: fam.epsilon,
        family_infimum: fam.value,
        tau: LogReal::from_ln(ln_tau),
        m_tau: m.result,
        c_lower,
        loglog_neg_c,
        envelope_bound_ok,
        exp_minus_two_tau_ok,
    })
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
    /// Set for the empty matrix, where the value 1 is a convention.
    pub degenerate: bool,
    pub convention: String,
}

pub const GOE_CONVENTION: &str = "density proportional to exp(-tr(A^2)): diagonal entries N(0, 1/2), \
off-diagonal entries N(0, 1/4); signature (i, j) = (number of negative, number of positive eigenvalues); \
estimate of E[|det A| 1{signature = (i, j)}]";

/// Inertia and determinant of a symmetric matrix through an unpivoted
/// `L D L^T` factorization (valid whenever no leading minor vanishes, which
/// holds almost surely for Gaussian draws).
pub(crate) fn inertia_det(a: &[f64], m: usize) -> (usize, usize, f64) {
    let mut l = vec![0.0; m * m];
    let mut d = vec![0.0; m];
    for k in 0..m {
        let mut dk = a[k * m + k];
        for j in 0..k {
            dk -= l[k * m + j] * l[k * m + j] * d[j];
        }
        d[k] = dk;
        for i in (k + 1)..m {
            let mut s = a[i * m + k];
            for j in 0..k {
                s -= l[i * m + j] * l[k * m + j] * d[j];
            }
            l[i * m + k] = s / dk;
        }
    }
    let neg = d.iter().filter(|&&x| x < 0.0).count();
    (neg, m - neg, d.iter().product())
}

/// Symmetric Gaussian matrix number `index` of the stream `seed`.
pub(crate) fn goe_matrix(seed: u64, index: u64, m: usize) -> Vec<f64> {
    let mut a = vec![0.0; m * m];
    let mut k = 0;
    for i in 0..m {
        for j in i..m {
            let z = normal_at(seed, index, k);
            k += 1;
            let v = if i == j { z * std::f64::consts::FRAC_1_SQRT_2 } else { 0.5 * z };
            a[i * m + j] = v;
            a[j * m + i] = v;
        }
    }
    a
}

const CHUNK: u64 = 4096;

/// `e_R(i, j) = E[|det A| 1{A has signature (i, j)}]` for Gaussian symmetric
/// matrices of size `i + j`.
pub fn e_r_constant(i: usize, j: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let m = i + j;
    if m == 0 {
        return Ok(McEstimate {
            mean: 1.0,
            std_err: 0.0,
            samples,
            degenerate: true,
            convention: GOE_CONVENTION.to_string(),
        });
    }
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (mut s, mut s2) = (0.0, 0.0);
            for idx in (c * CHUNK)..((c + 1) * CHUNK).min(samples) {
                let a = goe_matrix(seed, idx, m);
                let (neg, _, det) = inertia_det(&a, m);
                if neg == i {
                    let v = det.abs();
                    s += v;
                    s2 += v * v;
                }
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let nf = samples as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    Ok(McEstimate {
        mean,
        std_err: (var / nf).sqrt(),
        samples,
        degenerate: false,
        convention: GOE_CONVENTION.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{product_pair, sphere_pair};
    use std::f64::consts::PI;

    /// Composite Simpson rule; the oracle for the Gaussian tail integrals.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn f_tau_vanishes_at_left_endpoint() {
        for tau in [0.5, 1.0, 4.0] {
            assert_eq!(f_tau(tau, tau.sqrt()).unwrap(), 0.0);
        }
    }

    #[test]
    fn f_tau_matches_quadrature() {
        let tail = simpson(|t| (-t * t).exp(), 2f64.sqrt(), 12.0, 20_000);
        let oracle = (1.0 / PI.sqrt()) * 0.5 * tail;
        let v = f_tau(1.0, 2f64.sqrt()).unwrap();
        assert!(((v - oracle) / oracle).abs() < 1e-10, "{v} vs {oracle}");
        assert!((v - 1.138e-2).abs() < 1e-5);
    }

    #[test]
    fn f_tau_far_tail_in_log_domain() {
        let l = log_f_tau(1.0, 50.0).unwrap();
        assert!(l.log_magnitude() < 100.0 * 0.1f64.ln());
        assert!(l.sign() > 0);
    }

    #[test]
    fn asymptotic_erfc_agrees_with_direct_at_the_switch() {
        for a in [8.0, 9.5, 12.0, 20.0, 26.0] {
            let direct = erfc(a).ln();
            let a_sq = a * a;
            let asym = -a_sq - a.ln() - 0.5 * LN_PI + ln_erfc_asymptotic_factor(a_sq);
            assert!((direct - asym).abs() < 1e-12 * direct.abs(), "a={a}: {direct} {asym}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(f_tau(-1.0, 2.0).is_err());
        assert!(f_tau(4.0, 1.0).is_err());
        assert!(m_tau(0.0).is_err());
        assert!(g_r(1.0, 1, 0.0).is_err());
        assert!(rho_r(-1.0, 2).is_err());
    }

    #[test]
    fn m_tau_lower_chain() {
        assert!(m_tau(1.0).unwrap().value.to_f64() >= f_tau(1.0, 2f64.sqrt()).unwrap());
        for tau in [0.1, 1.0, 10.0, 100.0] {
            let m = m_tau(tau).unwrap();
            let bound = ((-((tau + 1.0).sqrt() + 1.0).powi(2)) - (PI.sqrt() * (tau + 1.0)).ln()).exp();
            assert!(m.value.to_f64() >= bound);
            assert!(m.argument >= tau.sqrt() && m.argument <= (tau + 1.0).sqrt());
        }
    }

    #[test]
    fn m_tau_is_the_supremum() {
        // brute force over a wide window, well past sqrt(tau + 1)
        for tau in [0.01, 0.7, 3.0, 30.0] {
            let m = m_tau(tau).unwrap().value.to_f64();
            let lo = tau.sqrt();
            let best = (1..200_000)
                .map(|k| f_tau(tau, lo + k as f64 * 5e-5).unwrap())
                .fold(0.0, f64::max);
            assert!(m >= best * (1.0 - 1e-9), "tau={tau}: {m} < {best}");
            assert!(m <= best * (1.0 + 1e-6));
        }
    }

    #[test]
    fn m_tau_huge_tau() {
        let m = m_tau(1e6).unwrap();
        assert!(m.argument >= 1000.0 && m.argument <= (1e6f64 + 1.0).sqrt());
        assert!(m.value.sign() > 0);
        let direct = log_f_tau(1e6, m.argument).unwrap().log_magnitude();
        assert!((m.value.log_magnitude() - direct).abs() < 1e-6 * direct.abs());
    }

    #[test]
    fn g_r_examples() {
        let v = g_r(1.0, 1, 1.0).unwrap().log_magnitude();
        assert!((v - (4f64.ln() + 4.0 * PI)).abs() < 1e-12);
        assert!(g_r(1.0, 1, 1e-8).unwrap().log_magnitude() > 30.0);
        let v = g_r(1.0, 2, 1.0).unwrap().log_magnitude();
        assert!((v - (16f64.ln() + 4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn rho_matches_stationarity_oracle() {
        // the minimizer solves s (R + s)^2 = n R / pi; solve by bisection
        for (r, n) in [(0.5, 1), (1.0, 1), (2.0, 3), (5f64.sqrt(), 2)] {
            let target = n as f64 * r / PI;
            let (mut lo, mut hi) = (1e-12, 1e3);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid * (r + mid).powi(2) < target { lo = mid } else { hi = mid }
            }
            let s = 0.5 * (lo + hi);
            let oracle = ln_g_r(r, n, s);
            let got = rho_r(r, n).unwrap();
            assert!((got.value.log_magnitude() - oracle).abs() < 1e-12 * oracle.abs());
            assert!(((got.argument - s) / s).abs() < 1e-4);
        }
    }

    #[test]
    fn rho_is_an_infimum() {
        let rho = rho_r(1.3, 2).unwrap().value;
        for k in 0..20 {
            let s = 0.01 * 1.6f64.powi(k);
            assert!(rho <= g_r(1.3, 2, s).unwrap());
        }
        let r = rho_r(1.0, 1).unwrap();
        assert!(r.value.to_f64() <= 4.0 * (4.0 * PI).exp());
        for n in 1..=10 {
            let v = rho_r(5f64.sqrt(), n).unwrap().value.log_magnitude();
            assert!(v.is_finite() && v <= n as f64 * 4f64.ln() + 20.0 * PI);
        }
    }

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(1, 1.0) - 2.0).abs() < 1e-14);
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-14);
        assert!((ball_volume(3, 2.0) - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
        for n in 1..=12 {
            assert!(ball_volume(n, 1.7) <= ball_volume_envelope(n, 1.7) * (1.0 + 1e-12));
        }
        assert!((ball_volume(1, 3.0) - ball_volume_envelope(1, 3.0)).abs() < 1e-12);
    }

    #[test]
    fn sphere_pair_constants() {
        for n in 1..=5 {
            let pair = sphere_pair(n).unwrap();
            let k = pair_constants(&pair).unwrap();
            let nf = n as f64;
            let ln_tau = k.tau.log_magnitude();
            let paper = k.rho.value.log_magnitude() + (10.0 * nf * (1.0 + PI * nf.sqrt() / 4.0)).ln();
            assert!(ln_tau <= paper, "n={n}");
            assert!(ln_tau <= 43.0 * nf);
            assert!(k.loglog_neg_c <= 43.0 * nf + 2f64.ln());
            assert!(k.envelope_bound_ok && k.exp_minus_two_tau_ok);
        }
    }

    #[test]
    fn product_pair_constants() {
        for n in 1..=4 {
            for i in 0..n {
                let pair = product_pair(n, i).unwrap();
                let k = pair_constants(&pair).unwrap();
                let nf = n as f64;
                let ln_tau = k.tau.log_magnitude();
                assert!(ln_tau <= (156.0 * nf.powi(3)).ln() + nf * 4f64.ln() + 20.0 * PI);
                assert!(ln_tau <= 70.0 * nf);
                assert!(k.loglog_neg_c <= 70.0 * nf + 2f64.ln());
                assert!(k.envelope_bound_ok && k.exp_minus_two_tau_ok);
            }
        }
    }

    #[test]
    fn inertia_of_known_matrices() {
        let (neg, pos, det) = inertia_det(&[2.0, 1.0, 1.0, -3.0], 2);
        assert_eq!((neg, pos), (1, 1));
        assert!((det + 7.0).abs() < 1e-14);
        let (neg, _, det) = inertia_det(&[-1.0], 1);
        assert_eq!(neg, 1);
        assert_eq!(det, -1.0);
    }

    #[test]
    fn e_r_size_one() {
        let a = e_r_constant(1, 0, 200_000, 5).unwrap();
        let b = e_r_constant(0, 1, 200_000, 5).unwrap();
        let exact = 1.0 / (2.0 * PI.sqrt());
        assert!((a.mean - exact).abs() < 3.0 * a.std_err);
        assert!((b.mean - exact).abs() < 3.0 * b.std_err);
        assert!(e_r_constant(0, 0, 10, 1).unwrap().degenerate);
        assert_eq!(e_r_constant(1, 1, 0, 1), Err(Error::NoSamples));
    }
}

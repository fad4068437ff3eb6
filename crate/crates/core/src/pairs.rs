//! Regular pairs `(U, P)`, their transversality sets and the two built-in
//! families: the round sphere and the products of spheres.
//!
//! Transversality is certified on a uniform grid with a second-order Taylor
//! model per cell. At the cell centre `c` the jet `(p0, b, H)` is exact; over
//! the cell `c + u` (with `|u| <= r`) one has
//!
//! ```text
//! |P(c+u) - p0 - b.u|        <= M2 r^2 / 2
//! |dP(c+u)| >= |b| + (H b/|b|).u - M3 r^2 / 2
//! ```
//!
//! where `M2`, `M3` bound the second and third derivative tensors. The
//! gradient clause then reduces to a small linear program over the cell cut
//! by the slab `|p0 + b.u| < delta + M2 r^2/2`, solved by enumerating the
//! vertices of the cut box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::scan_then_golden;
use crate::poly::{coefficient_bound, CompiledPoly, MultiIndex, MultiPoly};
use crate::zeroset::{grid_components, ComponentReport};

/// Relative width of the collar `U \ K` used for the boundary clause.
const COLLAR: f64 = 1e-6;
const MAX_CELLS: f64 = 4e9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    /// Open ball of radius `radius` about the origin of `R^n`.
    pub fn ball(n: usize, radius: f64) -> Domain {
        Domain::Ball {
            center: vec![0.0; n],
            radius,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { center, .. } => center.len(),
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Ball { center, radius } => {
                center.iter().zip(x).map(|(c, y)| (y - c).powi(2)).sum::<f64>() < radius * radius
            }
            Domain::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(y, (l, h))| l < y && y < h),
        }
    }

    /// `sup_{y in U} |y|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Domain::Ball { center, radius } => center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius,
            Domain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| l.abs().max(h.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    /// Image of the domain under `y -> s y`.
    pub fn scaled(&self, s: f64) -> Domain {
        match self {
            Domain::Ball { center, radius } => Domain::Ball {
                center: center.iter().map(|c| c * s).collect(),
                radius: radius * s,
            },
            Domain::Box { lo, hi } => Domain::Box {
                lo: lo.iter().map(|v| v * s).collect(),
                hi: hi.iter().map(|v| v * s).collect(),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Domain::Ball { center, radius } => !center.is_empty() && *radius > 0.0,
            Domain::Box { lo, hi } => {
                !lo.is_empty() && lo.len() == hi.len() && lo.iter().zip(hi).all(|(l, h)| l < h)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("degenerate domain {self:?}")))
        }
    }
}

/// A set of pairs `(delta, epsilon)` claimed to lie in the transversality set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `delta in (lo, hi) -> (delta, 2 sqrt(offset - delta))`.
    Curve { lo: f64, hi: f64, offset: f64 },
    Point { delta: f64, epsilon: f64 },
}

impl Family {
    pub fn epsilon_at(&self, delta: f64) -> Option<f64> {
        match *self {
            Family::Curve { lo, hi, offset } if lo < delta && delta < hi => Some(2.0 * (offset - delta).sqrt()),
            Family::Point { delta: d, epsilon } if d == delta => Some(epsilon),
            _ => None,
        }
    }

    /// `k` equally spaced interior members of a curve, or the single point.
    pub fn sample(&self, k: usize) -> Vec<(f64, f64)> {
        match *self {
            Family::Curve { lo, hi, offset } => (1..=k)
                .map(|j| {
                    let d = lo + (hi - lo) * j as f64 / (k + 1) as f64;
                    (d, 2.0 * (offset - d).sqrt())
                })
                .collect(),
            Family::Point { delta, epsilon } => vec![(delta, epsilon)],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Family::Curve { lo, hi, offset } => 0.0 <= lo && lo < hi && hi <= offset,
            Family::Point { delta, epsilon } => delta > 0.0 && epsilon > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::EmptyFamily)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairKind {
    Sphere,
    Product { i: usize },
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularPair {
    kind: PairKind,
    polynomial: MultiPoly,
    domain: Domain,
    radius: f64,
    family: Family,
}

impl RegularPair {
    /// Builds a pair; `R = max(1, sup_U |y|)` is derived from the domain.
    pub fn new(polynomial: MultiPoly, domain: Domain, family: Family) -> Result<Self> {
        domain.validate()?;
        family.validate()?;
        if polynomial.dim() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                found: polynomial.dim(),
            });
        }
        if polynomial.dim() > 8 {
            return Err(Error::Unsupported("pairs in more than 8 variables".into()));
        }
        Ok(RegularPair {
            kind: PairKind::Custom,
            radius: domain.sup_norm().max(1.0),
            polynomial,
            domain,
            family,
        })
    }

    pub fn dim(&self) -> usize {
        self.polynomial.dim()
    }

    pub fn kind(&self) -> &PairKind {
        &self.kind
    }

    pub fn polynomial(&self) -> &MultiPoly {
        &self.polynomial
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `R_(U,P)`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn family(&self) -> &Family {
        &self.family
    }
}

/// `sum x_j^2 - sqrt(n) - 1`.
pub fn sphere_polynomial(n: usize) -> MultiPoly {
    let mut p = MultiPoly::constant(n, -(n as f64).sqrt() - 1.0);
    for j in 0..n {
        p.add_term(MultiIndex::unit(n, j, 2), 1.0);
    }
    p
}

/// `(x_1^2 + ... + x_{i+1}^2 - 2)^2 + x_{i+2}^2 + ... + x_n^2 - 1`, whose
/// zero set is isotopic to `S^i x S^(n-i-1)`.
///
/// # Panics
/// If `i >= n`.
pub fn product_polynomial(n: usize, i: usize) -> MultiPoly {
    assert!(i < n, "product index {i} out of range for n = {n}");
    let mut q = MultiPoly::constant(n, 3.0);
    for j in 0..=i {
        q.add_term(MultiIndex::unit(n, j, 4), 1.0);
        q.add_term(MultiIndex::unit(n, j, 2), -4.0);
        for k in (j + 1)..=i {
            let mut e = vec![0; n];
            e[j] = 2;
            e[k] = 2;
            q.add_term(MultiIndex::new(e), 2.0);
        }
    }
    for j in (i + 1)..n {
        q.add_term(MultiIndex::unit(n, j, 2), 1.0);
    }
    q
}

/// The round sphere in the ball of radius `sqrt(sqrt(n) + 2)`, with the
/// family `delta in (0, 1) -> (delta, 2 sqrt(sqrt(n) + 1 - delta))`.
pub fn sphere_pair(n: usize) -> Result<RegularPair> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let root = (n as f64).sqrt();
    let mut pair = RegularPair::new(
        sphere_polynomial(n),
        Domain::ball(n, (root + 2.0).sqrt()),
        Family::Curve {
            lo: 0.0,
            hi: 1.0,
            offset: root + 1.0,
        },
    )?;
    pair.kind = PairKind::Sphere;
    Ok(pair)
}

/// `S^i x S^(n-i-1)` in the ball of radius `sqrt(5)` with the single member
/// `(1/(2 sqrt n), 2 sqrt(1 - 1/(2 sqrt n)))` of its transversality set.
pub fn product_pair(n: usize, i: usize) -> Result<RegularPair> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    let delta = 0.5 / (n as f64).sqrt();
    let mut pair = RegularPair::new(
        product_polynomial(n, i),
        Domain::ball(n, 5f64.sqrt()),
        Family::Point {
            delta,
            epsilon: 2.0 * (1.0 - delta).sqrt(),
        },
    )?;
    pair.kind = PairKind::Product { i };
    Ok(pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyInfimum {
    pub delta: f64,
    pub epsilon: f64,
    /// `1/delta^2 + pi n / epsilon^2` at the minimizer.
    pub value: f64,
}

/// Minimizes `1/delta^2 + pi n/epsilon^2` over the pair's family.
pub fn family_infimum(pair: &RegularPair) -> Result<FamilyInfimum> {
    let pin = std::f64::consts::PI * pair.dim() as f64;
    match *pair.family() {
        Family::Point { delta, epsilon } => Ok(FamilyInfimum {
            delta,
            epsilon,
            value: 1.0 / (delta * delta) + pin / (epsilon * epsilon),
        }),
        Family::Curve { lo, hi, offset } => {
            if !(lo < hi) {
                return Err(Error::EmptyFamily);
            }
            let phi = |d: f64| 1.0 / (d * d) + pin / (4.0 * (offset - d));
            let r = scan_then_golden(phi, lo, hi, 1000, true, 1e-10);
            Ok(FamilyInfimum {
                delta: r.argument,
                epsilon: 2.0 * (offset - r.argument).sqrt(),
                value: r.value,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransversalityWitness {
    pub delta: f64,
    pub epsilon: f64,
    pub grid_resolution: usize,
    pub verified: bool,
    /// Smaller of the two margins below; negative when the check failed.
    pub worst_margin: f64,
    /// Certified lower bound of `|P|` on `U \ K`, minus `delta`.
    pub boundary_margin: f64,
    /// Certified lower bound of `|dP|` where `|P| < delta`, minus `epsilon`.
    pub gradient_margin: f64,
}

/// Sup bounds of the first three derivative tensors over the cubes
/// `[-rho, rho]^n`, tabulated in `rho` and read off at the next grid value.
struct RemainderTable {
    step: f64,
    m1: Vec<f64>,
    m2: Vec<f64>,
    m3: Vec<f64>,
}

impl RemainderTable {
    const SIZE: usize = 1024;

    fn new(p: &MultiPoly, rho_max: f64) -> Self {
        let n = p.dim();
        let d1: Vec<MultiPoly> = (0..n).map(|k| p.derivative(k)).collect();
        let d2: Vec<MultiPoly> = d1.iter().flat_map(|q| (0..n).map(|l| q.derivative(l))).collect();
        let d3: Vec<MultiPoly> = d2.iter().flat_map(|q| (0..n).map(|l| q.derivative(l))).collect();
        let step = rho_max / (Self::SIZE - 1) as f64;
        let frob = |qs: &[MultiPoly], rho: f64| {
            let radii = vec![rho; n];
            qs.iter().map(|q| coefficient_bound(q, &radii).powi(2)).sum::<f64>().sqrt()
        };
        let column = |qs: &[MultiPoly]| (0..Self::SIZE).map(|k| frob(qs, k as f64 * step)).collect();
        RemainderTable {
            step,
            m1: column(&d1),
            m2: column(&d2),
            m3: column(&d3),
        }
    }

    fn at(&self, rho: f64) -> (f64, f64, f64) {
        let k = ((rho / self.step).ceil() as usize).min(Self::SIZE - 1);
        (self.m1[k], self.m2[k], self.m3[k])
    }
}

/// Min and max of `obj . u` over the box `|u_j| <= w_j` cut by
/// `lo <= cut . u <= hi`; `None` if the cut box is empty.
fn cut_box_range(w: &[f64], cut: &[f64], lo: f64, hi: f64, obj: &[f64]) -> Option<(f64, f64)> {
    let n = w.len();
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut u = [0.0f64; 8];
    for mask in 0..(1usize << n) {
        for j in 0..n {
            u[j] = if (mask >> j) & 1 == 1 { w[j] } else { -w[j] };
        }
        let s: f64 = (0..n).map(|j| cut[j] * u[j]).sum();
        let v: f64 = (0..n).map(|j| obj[j] * u[j]).sum();
        if lo <= s && s <= hi {
            min = min.min(v);
            max = max.max(v);
        }
        // each edge once, from its corner with u_j = -w_j
        for j in 0..n {
            if (mask >> j) & 1 == 1 || cut[j] == 0.0 {
                continue;
            }
            let rest = s - cut[j] * u[j];
            for t in [lo, hi] {
                if !t.is_finite() {
                    continue;
                }
                let uj = (t - rest) / cut[j];
                if uj.abs() <= w[j] {
                    let vj = v + obj[j] * (uj - u[j]);
                    min = min.min(vj);
                    max = max.max(vj);
                }
            }
        }
    }
    min.is_finite().then_some((min, max))
}

/// Cells per axis in a culling block.
const BLOCK: usize = 8;

struct Grid {
    n: usize,
    res: usize,
    lo: Vec<f64>,
    /// Cell half-widths.
    w: Vec<f64>,
    /// Cell half-diagonal.
    r: f64,
}

impl Grid {
    fn new(domain: &Domain, res: usize) -> Result<Self> {
        let n = domain.dim();
        if (res as f64).powi(n as i32) > MAX_CELLS {
            return Err(Error::Unsupported(format!("{res}^{n} grid cells")));
        }
        let (lo, hi) = domain.bounding_box();
        let w: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| (h - l) / (2 * res) as f64).collect();
        let r = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(Grid { n, res, lo, w, r })
    }

    fn rho_max(&self) -> f64 {
        (0..self.n)
            .map(|j| self.lo[j].abs().max((self.lo[j] + 2.0 * self.res as f64 * self.w[j]).abs()))
            .fold(0.0, f64::max)
            * (1.0 + 1e-9)
    }

    fn blocks(&self) -> usize {
        self.res.div_ceil(BLOCK)
    }

    /// Calls `visit(centre, half_widths, cell_ranges)` for every block of
    /// up to `BLOCK^n` cells with first block index `b0`.
    fn for_each_block_in_slice<F: FnMut(&[f64], &[f64], &[(usize, usize)])>(&self, b0: usize, mut visit: F) {
        let n = self.n;
        let nb = self.blocks();
        let mut idx = [0usize; 8];
        idx[0] = b0;
        let mut c = [0.0f64; 8];
        let mut hw = [0.0f64; 8];
        let mut ranges = [(0usize, 0usize); 8];
        loop {
            for j in 0..n {
                let (s, e) = (idx[j] * BLOCK, ((idx[j] + 1) * BLOCK).min(self.res));
                ranges[j] = (s, e);
                c[j] = self.lo[j] + (s + e) as f64 * self.w[j];
                hw[j] = (e - s) as f64 * self.w[j];
            }
            visit(&c[..n], &hw[..n], &ranges[..n]);
            let mut j = n;
            loop {
                if j == 1 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < nb {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Calls `visit(centre)` for every cell in the index box `ranges`.
    fn for_each_in_block<F: FnMut(&[f64])>(&self, ranges: &[(usize, usize)], mut visit: F) {
        let n = self.n;
        let mut idx = [0usize; 8];
        for j in 0..n {
            idx[j] = ranges[j].0;
        }
        let mut c = [0.0f64; 8];
        loop {
            for j in 0..n {
                c[j] = self.lo[j] + (2 * idx[j] + 1) as f64 * self.w[j];
            }
            visit(&c[..n]);
            let mut j = n;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < ranges[j].1 {
                    break;
                }
                idx[j] = ranges[j].0;
            }
        }
    }

    /// Calls `visit(centre)` for every cell with first index `i0`.
    fn for_each_in_slice<F: FnMut(&[f64])>(&self, i0: usize, mut visit: F) {
        let n = self.n;
        let mut idx = [0usize; 8];
        idx[0] = i0;
        let mut c = [0.0f64; 8];
        loop {
            for j in 0..n {
                c[j] = self.lo[j] + (2 * idx[j] + 1) as f64 * self.w[j];
            }
            visit(&c[..n]);
            let mut j = n;
            loop {
                if j == 1 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.res {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
}

/// Where a cell sits relative to the domain.
enum CellPlace {
    Outside,
    Inside,
    /// Meets the collar `U \ K`.
    Collar,
}

fn place_cell(domain: &Domain, c: &[f64], w: &[f64], collar: f64) -> CellPlace {
    match domain {
        Domain::Ball { center, radius } => {
            let (mut near, mut far) = (0.0, 0.0);
            for j in 0..c.len() {
                let d = (c[j] - center[j]).abs();
                near += (d - w[j]).max(0.0).powi(2);
                far += (d + w[j]).powi(2);
            }
            if near >= radius * radius {
                CellPlace::Outside
            } else if far >= (radius - collar).powi(2) {
                CellPlace::Collar
            } else {
                CellPlace::Inside
            }
        }
        Domain::Box { lo, hi } => {
            let touches = (0..c.len()).any(|j| c[j] + w[j] > hi[j] - collar || c[j] - w[j] < lo[j] + collar);
            if touches {
                CellPlace::Collar
            } else {
                CellPlace::Inside
            }
        }
    }
}

/// Lower bound of `|p0 + b.u|` over the part of the cell lying in the collar.
fn collar_lower_bound(domain: &Domain, c: &[f64], w: &[f64], r: f64, collar: f64, p0: f64, b: &[f64]) -> f64 {
    let n = c.len();
    let abs_min = |range: Option<(f64, f64)>| match range {
        None => f64::INFINITY,
        Some((mn, mx)) if p0 + mn <= 0.0 && p0 + mx >= 0.0 => 0.0,
        Some((mn, mx)) => (p0 + mn).abs().min((p0 + mx).abs()),
    };
    match domain {
        Domain::Ball { center, radius } => {
            let mut normal = [0.0f64; 8];
            let mut dist = 0.0;
            for j in 0..n {
                normal[j] = c[j] - center[j];
                dist += normal[j] * normal[j];
            }
            let dist = dist.sqrt();
            if dist == 0.0 {
                return abs_min(cut_box_range(w, &normal[..n], f64::NEG_INFINITY, f64::INFINITY, b));
            }
            normal[..n].iter_mut().for_each(|v| *v /= dist);
            // |c + u - centre| >= R - collar forces normal.u >= t
            let t = ((radius - collar).powi(2) - dist * dist - r * r) / (2.0 * dist);
            abs_min(cut_box_range(w, &normal[..n], t, f64::INFINITY, b))
        }
        Domain::Box { lo, hi } => {
            let mut best = f64::INFINITY;
            let mut axis = [0.0f64; 8];
            for j in 0..n {
                axis[j] = 1.0;
                if c[j] + w[j] > hi[j] - collar {
                    best = best.min(abs_min(cut_box_range(w, &axis[..n], hi[j] - collar - c[j], f64::INFINITY, b)));
                }
                if c[j] - w[j] < lo[j] + collar {
                    best = best.min(abs_min(cut_box_range(w, &axis[..n], f64::NEG_INFINITY, lo[j] + collar - c[j], b)));
                }
                axis[j] = 0.0;
            }
            best
        }
    }
}

#[derive(Clone)]
struct Accumulator {
    collar_min: f64,
    /// Per sorted delta: min of (gradient bound - epsilon) over straddling cells.
    cut_min: Vec<f64>,
    /// `full_min[k]`: min gradient bound over cells lying entirely in the
    /// slab from the `k`-th sorted delta onwards.
    full_min: Vec<f64>,
}

impl Accumulator {
    fn new(k: usize) -> Self {
        Accumulator {
            collar_min: f64::INFINITY,
            cut_min: vec![f64::INFINITY; k],
            full_min: vec![f64::INFINITY; k],
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        self.collar_min = self.collar_min.min(other.collar_min);
        for (a, b) in self.cut_min.iter_mut().zip(&other.cut_min) {
            *a = a.min(*b);
        }
        for (a, b) in self.full_min.iter_mut().zip(&other.full_min) {
            *a = a.min(*b);
        }
        self
    }
}

fn finite_or_max(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX.copysign(x)
    }
}

/// Checks both transversality clauses for `(delta, epsilon)` on a grid with
/// `resolution` cells per axis.
pub fn verify_transversality(
    pair: &RegularPair,
    delta: f64,
    epsilon: f64,
    resolution: usize,
) -> Result<TransversalityWitness> {
    Ok(verify_many(pair, &[(delta, epsilon)], resolution)?.remove(0))
}

/// [`verify_transversality`] for many `(delta, epsilon)` at once, sharing a
/// single sweep of the grid. Witnesses come back in input order.
pub fn verify_many(pair: &RegularPair, points: &[(f64, f64)], resolution: usize) -> Result<Vec<TransversalityWitness>> {
    verify_on(pair.polynomial(), pair.domain(), points, resolution)
}

fn verify_on(
    poly: &MultiPoly,
    domain: &Domain,
    points: &[(f64, f64)],
    resolution: usize,
) -> Result<Vec<TransversalityWitness>> {
    if resolution < 16 {
        return Err(Error::Domain(format!("grid resolution {resolution} below 16")));
    }
    if points.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if points.iter().any(|&(d, e)| !(d > 0.0 && e > 0.0)) {
        return Err(Error::Domain("delta and epsilon must be positive".into()));
    }
    let n = poly.dim();
    let grid = Grid::new(domain, resolution)?;
    let table = RemainderTable::new(poly, grid.rho_max());
    let compiled = CompiledPoly::new(poly);

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].0.total_cmp(&points[b].0));
    let ds: Vec<f64> = order.iter().map(|&k| points[k].0).collect();
    let es: Vec<f64> = order.iter().map(|&k| points[k].1).collect();
    let kk = ds.len();
    let d_max = ds[kk - 1];
    let collar = COLLAR * domain.sup_norm().max(1.0);
    let (w, r) = (&grid.w[..], grid.r);

    let acc = (0..grid.blocks())
        .into_par_iter()
        .map(|b0| {
            let mut acc = Accumulator::new(kk);
            let mut b = [0.0f64; 8];
            let mut h = [0.0f64; 64];
            let mut a = [0.0f64; 8];
            // `floor` is a lower bound of |P| on the enclosing block; deltas
            // at or below it (or below the cell's own bound) get no
            // contribution, which makes each (cell, delta) decision
            // independent of the other deltas in the batch
            let mut cell = |c: &[f64], floor: f64| {
                let in_collar = match place_cell(domain, c, w, collar) {
                    CellPlace::Outside => return,
                    CellPlace::Inside => false,
                    CellPlace::Collar => true,
                };
                let rho = (0..n).map(|j| c[j].abs() + w[j]).fold(0.0, f64::max);
                let (m1, m2, m3) = table.at(rho);
                let k_lo = if in_collar {
                    0
                } else {
                    let bound = floor.max(compiled.value(c).abs() - m1 * r);
                    ds.partition_point(|&d| d <= bound)
                };
                if k_lo == kk {
                    return;
                }
                let p0 = compiled.jet_into(c, &mut b, &mut h);
                let e2 = 0.5 * m2 * r * r;
                let e3 = 0.5 * m3 * r * r;
                if in_collar {
                    let lb = collar_lower_bound(domain, c, w, r, collar, p0, &b[..n]) - e2;
                    acc.collar_min = acc.collar_min.min(lb);
                }
                let spread: f64 = (0..n).map(|j| b[j].abs() * w[j]).sum();
                let s_lo = p0.abs() - spread;
                let s_hi = p0.abs() + spread;
                let k_start = ds.partition_point(|d| d + e2 <= s_lo).max(k_lo);
                if k_start == kk {
                    return;
                }
                let nb = b[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
                for k in 0..n {
                    a[k] = if nb > 0.0 {
                        (0..n).map(|l| h[k * n + l] * b[l]).sum::<f64>() / nb
                    } else {
                        0.0
                    };
                }
                let k_full = ds.partition_point(|d| d + e2 <= s_hi).max(k_start);
                if k_full < kk {
                    let g_full = nb - (0..n).map(|j| a[j].abs() * w[j]).sum::<f64>() - e3;
                    acc.full_min[k_full] = acc.full_min[k_full].min(g_full);
                }
                // the cut box can only raise the plain box minimum, so the LP
                // is skipped when that minimum cannot improve the record
                let box_bound = nb - (0..n).map(|j| a[j].abs() * w[j]).sum::<f64>() - e3;
                for k in k_start..k_full {
                    if box_bound - es[k] >= acc.cut_min[k] {
                        continue;
                    }
                    let lo = -ds[k] - e2 - p0;
                    let hi = ds[k] + e2 - p0;
                    if let Some((mn, _)) = cut_box_range(w, &b[..n], lo, hi, &a[..n]) {
                        acc.cut_min[k] = acc.cut_min[k].min(nb + mn - e3 - es[k]);
                    }
                }
            };
            let mut bb = [0.0f64; 8];
            let mut bh = [0.0f64; 64];
            grid.for_each_block_in_slice(b0, |bc, bw, ranges| {
                let floor = match place_cell(domain, bc, bw, collar) {
                    CellPlace::Outside => return,
                    CellPlace::Inside => {
                        let rb = bw.iter().map(|x| x * x).sum::<f64>().sqrt();
                        let rho = (0..n).map(|j| bc[j].abs() + bw[j]).fold(0.0, f64::max);
                        let q0 = compiled.jet_into(bc, &mut bb, &mut bh);
                        let nq = bb[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
                        let floor = q0.abs() - nq * rb - 0.5 * table.at(rho).1 * rb * rb;
                        if floor >= d_max {
                            return;
                        }
                        floor
                    }
                    CellPlace::Collar => f64::NEG_INFINITY,
                };
                grid.for_each_in_block(ranges, |c| cell(c, floor));
            });
            acc
        })
        .reduce(|| Accumulator::new(kk), Accumulator::merge);

    let mut sorted = Vec::with_capacity(kk);
    let mut running = f64::INFINITY;
    for k in 0..kk {
        running = running.min(acc.full_min[k]);
        let gradient_margin = acc.cut_min[k].min(running - es[k]);
        let boundary_margin = acc.collar_min - ds[k];
        let worst = gradient_margin.min(boundary_margin);
        sorted.push(TransversalityWitness {
            delta: ds[k],
            epsilon: es[k],
            grid_resolution: resolution,
            verified: worst > 0.0,
            worst_margin: finite_or_max(worst),
            boundary_margin: finite_or_max(boundary_margin),
            gradient_margin: finite_or_max(gradient_margin),
        });
    }
    let mut out = vec![None; kk];
    for (pos, &k) in order.iter().enumerate() {
        out[k] = Some(sorted[pos].clone());
    }
    Ok(out.into_iter().map(|w| w.expect("every slot filled")).collect())
}

/// Checks the rescaled barrier `sigma_d(y) = sqrt(d)^n P(sqrt(d) y)` on
/// `U / sqrt(d)`: `|sigma_d| < (delta/2) sqrt(d)^n` must force
/// `|d sigma_d| > (epsilon/2) sqrt(d)^(n+1)`.
pub fn barrier_rescale_check(
    pair: &RegularPair,
    d: u32,
    delta: f64,
    epsilon: f64,
    resolution: usize,
) -> Result<TransversalityWitness> {
    if d == 0 {
        return Err(Error::Domain("degree must be positive".into()));
    }
    let n = pair.dim() as i32;
    let s = (d as f64).sqrt();
    let sigma = pair.polynomial().rescale_argument(s).scale(s.powi(n));
    let domain = pair.domain().scaled(1.0 / s);
    let points = [(0.5 * delta * s.powi(n), 0.5 * epsilon * s.powi(n + 1))];
    Ok(verify_on(&sigma, &domain, &points, resolution)?.remove(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityOutcome {
    /// Component counts of `P` and `P + g` agree.
    pub unchanged: bool,
    /// Certified bounds for `sup_U |g|` and `sup_U |dg|`.
    pub sup_perturbation: f64,
    pub sup_perturbation_gradient: f64,
    pub before: ComponentReport,
    pub after: ComponentReport,
}

/// Certified `(sup |g|, sup |dg|)` over the cells meeting `domain`.
fn perturbation_bounds(g: &MultiPoly, domain: &Domain, resolution: usize) -> Result<(f64, f64)> {
    let n = g.dim();
    let grid = Grid::new(domain, resolution)?;
    let table = RemainderTable::new(g, grid.rho_max());
    let compiled = CompiledPoly::new(g);
    let (w, r) = (&grid.w[..], grid.r);
    let bounds = (0..resolution)
        .into_par_iter()
        .map(|i0| {
            let (mut sv, mut sg) = (0.0f64, 0.0f64);
            let mut b = [0.0f64; 8];
            let mut h = [0.0f64; 64];
            grid.for_each_in_slice(i0, |c| {
                if let CellPlace::Outside = place_cell(domain, c, w, 0.0) {
                    return;
                }
                let rho = (0..n).map(|j| c[j].abs() + w[j]).fold(0.0, f64::max);
                let (_, m2, _) = table.at(rho);
                let v = compiled.jet_into(c, &mut b, &mut h);
                let nb = b[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
                sv = sv.max(v.abs() + nb * r + 0.5 * m2 * r * r);
                sg = sg.max(nb + m2 * r);
            });
            (sv, sg)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Ok(bounds)
}

/// Perturbation stability: if `sup_U |g| < delta` and `sup_U |dg| < epsilon`
/// for a member `(delta, epsilon)` of the transversality set, the zero sets
/// of `P` and `P + g` in `U` are isotopic. Measured here as equal grid
/// component counts (interior and boundary-touching).
pub fn stability_check(
    pair: &RegularPair,
    delta: f64,
    epsilon: f64,
    g: &MultiPoly,
    resolution: usize,
) -> Result<StabilityOutcome> {
    if g.dim() != pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dim(),
            found: g.dim(),
        });
    }
    let (sv, sg) = perturbation_bounds(g, pair.domain(), resolution)?;
    if !(sv < delta && sg < epsilon) {
        return Err(Error::PerturbationTooLarge(format!(
            "sup|g| <= {sv:.6e} (delta {delta}), sup|dg| <= {sg:.6e} (epsilon {epsilon})"
        )));
    }
    let p = CompiledPoly::new(pair.polynomial());
    let q = CompiledPoly::new(&(pair.polynomial() + g));
    let before = grid_components(&p, pair.domain(), resolution, 3)?;
    let after = grid_components(&q, pair.domain(), resolution, 3)?;
    Ok(StabilityOutcome {
        unchanged: before.count == after.count && before.touching_boundary == after.touching_boundary,
        sup_perturbation: sv,
        sup_perturbation_gradient: sg,
        before,
        after,
    })
}

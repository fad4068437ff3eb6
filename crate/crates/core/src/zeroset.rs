//! Topology of zero sets: real roots in one variable, connected components
//! of curves in planar domains and on the 2-sphere.
//!
//! Curves are traced marching-squares style: a grid edge whose endpoint
//! signs differ (zero counts as positive) carries one crossing, and the
//! crossings of each cell are joined pairwise, saddle cells being decided
//! by the sign at the cell centre. Components are the classes of a
//! union-find over crossings. A cell is *ambiguous* when its corner
//! gradients disagree (a critical point may sit inside) while `|f|` is small
//! on the scale of the cell; such cells trigger global refinement and, if
//! they survive it, clear the `confident` flag.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::golden_section_min;
use crate::pairs::Domain;
use crate::poly::{CompiledPoly, MultiPoly};

/// Default tangency screen factor.
pub const TANGENCY_LAMBDA: f64 = 4.0;

/// A real function that can be sampled pointwise.
pub trait Field: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Values on the tensor grid spanned by `axes`, first axis fastest.
    fn values_on_grid(&self, axes: &[Vec<f64>]) -> Vec<f64> {
        match axes {
            [xs] => xs.par_iter().map(|&x| self.value(&[x])).collect(),
            [xs, ys] => ys
                .par_iter()
                .flat_map_iter(|&y| xs.iter().map(move |&x| self.value(&[x, y])))
                .collect(),
            _ => panic!("grid sampling is implemented for one and two axes"),
        }
    }
}

impl Field for CompiledPoly {
    fn dim(&self) -> usize {
        CompiledPoly::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        CompiledPoly::value(self, x)
    }
}

/// Adapts a closure to [`Field`].
pub struct FnField<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    /// Components that stay away from the domain boundary.
    pub count: usize,
    pub touching_boundary: usize,
    /// Number of grid doublings applied on top of the base resolution.
    pub refinement_depth: usize,
    pub confident: bool,
    /// Ambiguous cells left at the final depth.
    pub ambiguous_cells: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[inline]
fn positive(v: f64) -> bool {
    v >= 0.0
}

/// Vertex gradients of an `(m x m)` grid of values (first index fastest) by
/// central differences, one-sided along the border.
fn vertex_gradients(v: &[f64], m: usize, hx: f64, hy: f64) -> Vec<(f64, f64)> {
    let at = |i: usize, j: usize| v[j * m + i];
    let diff = |k: usize, lo: &dyn Fn(usize) -> f64| {
        let (l, r) = (k.saturating_sub(1), (k + 1).min(m - 1));
        (lo(r) - lo(l)) / (r - l) as f64
    };
    let mut g = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            let gx = diff(i, &|t| at(t, j)) / hx;
            let gy = diff(j, &|t| at(i, t)) / hy;
            g.push((gx, gy));
        }
    }
    g
}

/// A cell is ambiguous when its corner gradients do not all point into a
/// common half-plane (pairwise dot products) and `|f|` at the corners is
/// small against `lambda * diameter * max |grad|`.
fn cell_ambiguous(values: [f64; 4], grads: [(f64, f64); 4], diameter: f64, lambda: f64) -> bool {
    let mut consistent = true;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if grads[i].0 * grads[j].0 + grads[i].1 * grads[j].1 <= 0.0 {
                consistent = false;
            }
        }
    }
    if consistent {
        return false;
    }
    let max_grad = grads.iter().map(|g| g.0.hypot(g.1)).fold(0.0, f64::max);
    let min_abs = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    min_abs < lambda * diameter * max_grad
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

struct Pass {
    count: usize,
    touching: usize,
    ambiguous: usize,
}

fn pass_1d<F: Field + ?Sized>(f: &F, domain: &Domain, res: usize, lambda: f64) -> Pass {
    let (lo, hi) = domain.bounding_box();
    let xs = axis(lo[0], hi[0], res);
    let v = f.values_on_grid(&[xs.clone()]);
    let is_ball = matches!(domain, Domain::Ball { .. });
    let inside: Vec<bool> = xs.iter().map(|&x| !is_ball || domain.contains(&[x])).collect();
    let h = (hi[0] - lo[0]) / res as f64;
    let deriv = |i: usize| {
        let (l, r) = (i.saturating_sub(1), (i + 1).min(res));
        (v[r] - v[l]) / ((r - l) as f64 * h)
    };
    let (mut count, mut touching, mut ambiguous) = (0, 0, 0);
    for i in 0..res {
        if !(inside[i] || inside[i + 1]) {
            continue;
        }
        if positive(v[i]) != positive(v[i + 1]) {
            if is_ball {
                // where the interpolated root falls decides, not the cell
                let x = xs[i] + h * v[i] / (v[i] - v[i + 1]);
                count += domain.contains(&[x]) as usize;
            } else if i == 0 || i + 1 == res {
                touching += 1;
            } else {
                count += 1;
            }
        }
        let (d0, d1) = (deriv(i), deriv(i + 1));
        if d0 * d1 <= 0.0 && v[i].abs().min(v[i + 1].abs()) < lambda * h * d0.abs().max(d1.abs()) {
            ambiguous += 1;
        }
    }
    Pass {
        count,
        touching,
        ambiguous,
    }
}

fn pass_2d<F: Field + ?Sized>(f: &F, domain: &Domain, res: usize, lambda: f64) -> Pass {
    let (lo, hi) = domain.bounding_box();
    let xs = axis(lo[0], hi[0], res);
    let ys = axis(lo[1], hi[1], res);
    let hx = (hi[0] - lo[0]) / res as f64;
    let hy = (hi[1] - lo[1]) / res as f64;
    let v = f.values_on_grid(&[xs.clone(), ys.clone()]);
    let m = res + 1;
    let grads = vertex_gradients(&v, m, hx, hy);
    let is_ball = matches!(domain, Domain::Ball { .. });
    let inside: Vec<bool> = if is_ball {
        (0..m * m).map(|k| domain.contains(&[xs[k % m], ys[k / m]])).collect()
    } else {
        vec![true; m * m]
    };
    let vid = |i: usize, j: usize| j * m + i;
    let n_h = res * m;
    let h_edge = |i: usize, j: usize| j * res + i;
    let v_edge = |i: usize, j: usize| n_h + i * res + j;
    let n_edges = n_h + m * res;

    // edge endpoints, for sign and inclusion tests
    let ends = |e: usize| -> (usize, usize) {
        if e < n_h {
            let (i, j) = (e % res, e / res);
            (vid(i, j), vid(i + 1, j))
        } else {
            let k = e - n_h;
            let (i, j) = (k / res, k % res);
            (vid(i, j), vid(i, j + 1))
        }
    };
    let crosses = |e: usize| {
        let (p, q) = ends(e);
        positive(v[p]) != positive(v[q])
    };
    let point = |k: usize| [xs[k % m], ys[k / m]];
    // a crossing belongs to a ball when its interpolated zero does
    let included = |e: usize| {
        let (p, q) = ends(e);
        if !is_ball || (inside[p] && inside[q]) {
            return inside[p] || inside[q];
        }
        if !(inside[p] || inside[q]) {
            return false;
        }
        let s = v[p] / (v[p] - v[q]);
        let (a, b) = (point(p), point(q));
        domain.contains(&[a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])])
    };

    let mut uf = UnionFind::new(n_edges);
    let mut touch = vec![false; n_edges];
    let mut ambiguous = 0;
    let link = |uf: &mut UnionFind, touch: &mut Vec<bool>, a: usize, b: usize| match (included(a), included(b)) {
        (true, true) => uf.union(a, b),
        (true, false) => touch[a] = true,
        (false, true) => touch[b] = true,
        (false, false) => {}
    };
    for j in 0..res {
        for i in 0..res {
            let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            if !(inside[a] || inside[b] || inside[c] || inside[d]) {
                continue;
            }
            let values = [v[a], v[b], v[c], v[d]];
            if cell_ambiguous(values, [grads[a], grads[b], grads[c], grads[d]], hx.hypot(hy), lambda) {
                ambiguous += 1;
            }
            // bottom, right, top, left
            let edges = [h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)];
            let cross: Vec<usize> = edges.iter().copied().filter(|&e| crosses(e)).collect();
            match cross.len() {
                2 => link(&mut uf, &mut touch, cross[0], cross[1]),
                4 => {
                    let centre = f.value(&[xs[i] + 0.5 * hx, ys[j] + 0.5 * hy]);
                    if positive(centre) == positive(v[a]) {
                        // b and d are cut off
                        link(&mut uf, &mut touch, edges[0], edges[1]);
                        link(&mut uf, &mut touch, edges[2], edges[3]);
                    } else {
                        link(&mut uf, &mut touch, edges[0], edges[3]);
                        link(&mut uf, &mut touch, edges[1], edges[2]);
                    }
                }
                _ => {}
            }
        }
    }
    for e in 0..n_edges {
        if !crosses(e) || !included(e) {
            continue;
        }
        let on_box_boundary = if e < n_h {
            let j = e / res;
            j == 0 || j == res
        } else {
            let i = (e - n_h) / res;
            i == 0 || i == res
        };
        if !is_ball && on_box_boundary {
            touch[e] = true;
        }
    }
    let mut roots: BTreeMap<usize, bool> = BTreeMap::new();
    for e in 0..n_edges {
        if crosses(e) && included(e) {
            let r = uf.find(e);
            *roots.entry(r).or_insert(false) |= touch[e];
        }
    }
    let touching = roots.values().filter(|&&t| t).count();
    Pass {
        count: roots.len() - touching,
        touching,
        ambiguous,
    }
}

/// Components of `{f = 0}` in a one- or two-dimensional domain, doubling the
/// grid up to `max_depth` times while ambiguous cells remain.
pub fn grid_components<F: Field + ?Sized>(
    f: &F,
    domain: &Domain,
    base_resolution: usize,
    max_depth: usize,
) -> Result<ComponentReport> {
    grid_components_with(f, domain, base_resolution, max_depth, TANGENCY_LAMBDA)
}

pub fn grid_components_with<F: Field + ?Sized>(
    f: &F,
    domain: &Domain,
    base_resolution: usize,
    max_depth: usize,
    lambda: f64,
) -> Result<ComponentReport> {
    if f.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found: f.dim(),
        });
    }
    if base_resolution < 2 {
        return Err(Error::Domain("grid resolution below 2".into()));
    }
    let mut depth = 0;
    loop {
        let res = base_resolution << depth;
        let pass = match f.dim() {
            1 => pass_1d(f, domain, res, lambda),
            2 => pass_2d(f, domain, res, lambda),
            n => return Err(Error::Unsupported(format!("component counting in dimension {n}"))),
        };
        if pass.ambiguous == 0 || depth == max_depth {
            return Ok(ComponentReport {
                count: pass.count,
                touching_boundary: pass.touching,
                refinement_depth: depth,
                confident: pass.ambiguous == 0,
                ambiguous_cells: pass.ambiguous,
            });
        }
        depth += 1;
    }
}

/// Whether `{f = 0}` has a component inside the open ball that stays away
/// from its boundary.
pub fn compact_component_in_ball<F: Field + ?Sized>(
    f: &F,
    center: &[f64],
    radius: f64,
    resolution: usize,
    max_depth: usize,
) -> Result<(bool, ComponentReport)> {
    let domain = Domain::Ball {
        center: center.to_vec(),
        radius,
    };
    let report = grid_components(f, &domain, resolution, max_depth)?;
    Ok((report.count > 0, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereReport {
    /// Components on `S^2`.
    pub sphere: ComponentReport,
    /// Components after identifying antipodes, i.e. on `RP^2`.
    pub projective_count: usize,
}

/// Components of `{p = 0}` on the unit sphere for a homogeneous `p` in three
/// variables, traced on the surface of the cube `[-1, 1]^3` (the sign of a
/// homogeneous polynomial is constant along rays).
pub fn sphere_components(p: &MultiPoly, resolution: usize, max_depth: usize) -> Result<SphereReport> {
    if p.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: p.dim(),
        });
    }
    if !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let compiled = CompiledPoly::new(p);
    let terms: Vec<([u32; 3], f64)> = p
        .terms()
        .map(|(a, c)| {
            let e = a.exponents();
            ([e[0], e[1], e[2]], c)
        })
        .collect();
    let mut depth = 0;
    loop {
        let (report, projective) = sphere_pass(&compiled, &terms, resolution.max(2) << depth, TANGENCY_LAMBDA);
        if report.ambiguous_cells == 0 || depth == max_depth {
            return Ok(SphereReport {
                sphere: ComponentReport {
                    refinement_depth: depth,
                    ..report
                },
                projective_count: projective,
            });
        }
        depth += 1;
    }
}

/// Values of a three-variable polynomial on the `(n + 1)^2` grid of the cube
/// face `x[ax] = s`, row by row: each row collapses to a univariate
/// polynomial in the first free axis, evaluated by Horner.
fn face_grid(terms: &[([u32; 3], f64)], ax: usize, s: f64, n: usize) -> Vec<f64> {
    let (pa, pb) = free_axes(ax);
    let degree = terms.iter().map(|(e, _)| e[pa].max(e[pb]) as usize).max().unwrap_or(0);
    let coord = |i: usize| 2.0 * i as f64 / n as f64 - 1.0;
    let fixed: Vec<(usize, usize, f64)> = terms
        .iter()
        .map(|(e, c)| (e[pa] as usize, e[pb] as usize, c * s.powi(e[ax] as i32)))
        .collect();
    let mut vals = Vec::with_capacity((n + 1) * (n + 1));
    let mut row = vec![0.0; degree + 1];
    let mut ypow = vec![1.0; degree + 1];
    for b in 0..=n {
        let y = coord(b);
        for k in 1..=degree {
            ypow[k] = ypow[k - 1] * y;
        }
        row.iter_mut().for_each(|r| *r = 0.0);
        for &(ea, eb, c) in &fixed {
            row[ea] += c * ypow[eb];
        }
        for a in 0..=n {
            let x = coord(a);
            vals.push(row.iter().rev().fold(0.0, |acc, &r| acc * x + r));
        }
    }
    vals
}

fn sphere_pass(p: &CompiledPoly, terms: &[([u32; 3], f64)], n: usize, lambda: f64) -> (ComponentReport, usize) {
    let m = (n + 1) as u64;
    let coord = |i: usize| 2.0 * i as f64 / n as f64 - 1.0;
    let gid = |ijk: [usize; 3]| (ijk[0] as u64 * m + ijk[1] as u64) * m + ijk[2] as u64;
    let anti = |g: u64| {
        let (i, j, k) = (g / (m * m), (g / m) % m, g % m);
        ((n as u64 - i) * m + (n as u64 - j)) * m + (n as u64 - k)
    };
    let h = 2.0 / n as f64;

    // faces: fixed axis and side, the two free axes in increasing order
    let faces: Vec<(usize, usize)> = (0..3).flat_map(|ax| [(ax, 0), (ax, n)]).collect();
    let face_values: Vec<Vec<f64>> = faces
        .par_iter()
        .map(|&(ax, side)| face_grid(terms, ax, coord(side), n))
        .collect();

    let mut uf = UnionFind::new(0);
    let mut node: HashMap<(u64, u64), usize> = HashMap::new();
    let mut node_of = |uf: &mut UnionFind, g1: u64, g2: u64| -> usize {
        let key = if g1 < g2 { (g1, g2) } else { (g2, g1) };
        *node.entry(key).or_insert_with(|| uf.push())
    };
    let mut ambiguous = 0;
    for (f, &(ax, side)) in faces.iter().enumerate() {
        let (pa, pb) = free_axes(ax);
        let vals = &face_values[f];
        let grads = vertex_gradients(vals, n + 1, h, h);
        let at = |a: usize, b: usize| {
            let mut ijk = [0; 3];
            ijk[ax] = side;
            ijk[pa] = a;
            ijk[pb] = b;
            (vals[b * (n + 1) + a], gid(ijk))
        };
        for b in 0..n {
            for a in 0..n {
                let corners = [at(a, b), at(a + 1, b), at(a + 1, b + 1), at(a, b + 1)];
                let [va, vb, vc, vd] = corners.map(|c| c.0);
                let g = |a: usize, b: usize| grads[b * (n + 1) + a];
                let cg = [g(a, b), g(a + 1, b), g(a + 1, b + 1), g(a, b + 1)];
                if cell_ambiguous([va, vb, vc, vd], cg, h * std::f64::consts::SQRT_2, lambda) {
                    ambiguous += 1;
                }
                let edges = [(0, 1), (1, 2), (3, 2), (0, 3)];
                let crossing: Vec<usize> = (0..4)
                    .filter(|&e| positive(corners[edges[e].0].0) != positive(corners[edges[e].1].0))
                    .collect();
                let mut id = |uf: &mut UnionFind, e: usize| node_of(uf, corners[edges[e].0].1, corners[edges[e].1].1);
                match crossing.len() {
                    2 => {
                        let (x, y) = (id(&mut uf, crossing[0]), id(&mut uf, crossing[1]));
                        uf.union(x, y);
                    }
                    4 => {
                        let mut x = [0.0; 3];
                        x[ax] = coord(side);
                        x[pa] = coord(a) + 0.5 * h;
                        x[pb] = coord(b) + 0.5 * h;
                        let pairs = if positive(p.value(&x)) == positive(va) {
                            [(0, 1), (2, 3)]
                        } else {
                            [(0, 3), (1, 2)]
                        };
                        for (e1, e2) in pairs {
                            let (x1, x2) = (id(&mut uf, e1), id(&mut uf, e2));
                            uf.union(x1, x2);
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    let keys: Vec<((u64, u64), usize)> = {
        let mut k: Vec<_> = node.iter().map(|(&key, &v)| (key, v)).collect();
        k.sort_unstable();
        k
    };
    let mut rep: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for &(key, v) in &keys {
        let r = uf.find(v);
        rep.entry(r).or_insert(key);
    }
    let (mut fixed, mut swapped) = (0, 0);
    for (&r, &(g1, g2)) in &rep {
        let (a1, a2) = (anti(g1), anti(g2));
        let key = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        match node.get(&key) {
            Some(&v) if uf.find(v) != r => swapped += 1,
            _ => fixed += 1,
        }
    }
    let report = ComponentReport {
        count: rep.len(),
        touching_boundary: 0,
        refinement_depth: 0,
        confident: ambiguous == 0,
        ambiguous_cells: ambiguous,
    };
    (report, fixed + swapped / 2)
}

fn free_axes(ax: usize) -> (usize, usize) {
    match ax {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCount {
    /// Number of distinct real roots (the companion-matrix count).
    pub count: usize,
    pub sturm_count: usize,
    /// Set when the two methods disagree.
    pub disagreement: bool,
}

/// Distinct real roots of a univariate polynomial, on the whole line or in
/// the half-open interval `(a, b]`.
pub fn real_root_count(p: &MultiPoly, interval: Option<(f64, f64)>) -> Result<RootCount> {
    let mut c = p.univariate_coeffs()?;
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if let Some((a, b)) = interval {
        if !(a < b) {
            return Err(Error::Domain(format!("empty interval ({a}, {b}]")));
        }
    }
    let companion = companion_count(&c, interval);
    let sturm = sturm_count(&c, interval);
    Ok(RootCount {
        count: companion,
        sturm_count: sturm,
        disagreement: companion != sturm,
    })
}

fn companion_count(c: &[f64], interval: Option<(f64, f64)>) -> usize {
    let d = c.len() - 1;
    if d == 0 {
        return 0;
    }
    let lead = c[d];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    let eig = m.complex_eigenvalues();
    let mut real: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    real.sort_by(f64::total_cmp);
    let mut distinct: Vec<f64> = Vec::new();
    for x in real {
        match distinct.last() {
            Some(&y) if (x - y).abs() <= 1e-6 * (1.0 + x.abs()) => {}
            _ => distinct.push(x),
        }
    }
    match interval {
        None => distinct.len(),
        Some((a, b)) => distinct.iter().filter(|&&x| a < x && x <= b).count(),
    }
}

fn poly_rem(num: &[f64], den: &[f64]) -> Vec<f64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let k = r.len() - 1;
        let q = r[k] / den[dd];
        for j in 0..=dd {
            r[k - dd + j] -= q * den[j];
        }
        r.pop();
    }
    r
}

fn normalize(mut p: Vec<f64>) -> Vec<f64> {
    let s = p.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if s > 0.0 {
        p.iter_mut().for_each(|x| *x /= s);
    }
    p
}

fn sturm_count(c: &[f64], interval: Option<(f64, f64)>) -> usize {
    let mut chain = vec![normalize(c.to_vec())];
    let deriv: Vec<f64> = (1..c.len()).map(|k| k as f64 * c[k]).collect();
    if !deriv.is_empty() {
        chain.push(normalize(deriv));
    }
    while chain.last().map_or(false, |p| p.len() > 1) {
        let k = chain.len();
        let mut r: Vec<f64> = poly_rem(&chain[k - 2], &chain[k - 1]).iter().map(|x| -x).collect();
        // drop leading coefficients lost to cancellation
        while r.last().map_or(false, |x| x.abs() < 1e-10) {
            r.pop();
        }
        if r.is_empty() {
            break;
        }
        chain.push(normalize(r));
    }
    let variations = |signs: Vec<f64>| {
        let s: Vec<f64> = signs.into_iter().filter(|x| *x != 0.0).collect();
        s.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
    };
    let at = |x: f64| variations(chain.iter().map(|p| p.iter().rev().fold(0.0, |acc, &a| acc * x + a)).collect());
    let at_inf = |neg: bool| {
        variations(
            chain
                .iter()
                .map(|p| {
                    let lead = *p.last().unwrap_or(&0.0);
                    if neg && (p.len() - 1) % 2 == 1 {
                        -lead
                    } else {
                        lead
                    }
                })
                .collect(),
        )
    };
    let (va, vb) = match interval {
        None => (at_inf(true), at_inf(false)),
        Some((a, b)) => (at(a), at(b)),
    };
    va.saturating_sub(vb)
}

/// Roots on `RP^1` of the binary form `sum_k a_k x0^(d-k) x1^k`, counted as
/// sign changes of `theta -> p(cos theta, sin theta)` on `[0, pi)`.
///
/// The circle is sampled at `16 d` angles. Where three samples of equal sign
/// have an interpolating parabola that dips towards the other sign, the
/// extremum is located by golden section; a sign flip there is a pair of
/// close roots between samples.
pub fn projective_root_count(coeffs: &[f64]) -> Result<usize> {
    if coeffs.iter().all(|&a| a == 0.0) {
        return Err(Error::ZeroPolynomial);
    }
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(0);
    }
    let eval = |theta: f64| binary_form_at(coeffs, theta);
    let m = 16 * d.max(4);
    let step = std::f64::consts::PI / m as f64;
    let f: Vec<f64> = (0..=m).map(|j| eval(j as f64 * step)).collect();
    let mut count = 0;
    for j in 0..m {
        if positive(f[j]) != positive(f[j + 1]) {
            count += 1;
        }
    }
    // hidden pairs: a dip of the other sign between three equal-sign samples
    let mut dips: Vec<f64> = Vec::new();
    for j in 1..m {
        let (a, b, c) = (f[j - 1], f[j], f[j + 1]);
        if positive(a) != positive(b) || positive(b) != positive(c) {
            continue;
        }
        let s = if positive(b) { 1.0 } else { -1.0 };
        let curv = s * (a - 2.0 * b + c);
        if curv <= 0.0 {
            continue;
        }
        // vertex of the parabola through (-1, a), (0, b), (1, c)
        let t = (a - c) / (2.0 * (a - 2.0 * b + c));
        let vertex = b - 0.25 * (c - a) * t;
        if t.abs() > 1.0 || s * vertex > 0.25 * (s * a).min(s * c) {
            continue;
        }
        let lo = (j - 1) as f64 * step;
        let r = golden_section_min(|th| s * eval(th), lo, lo + 2.0 * step, 1e-14);
        if r.value < 0.0 && !dips.iter().any(|&x| (x - r.argument).abs() < 1e-9) {
            dips.push(r.argument);
            count += 2;
        }
    }
    Ok(count)
}

/// `p(cos theta, sin theta)` by Horner in whichever of `tan`, `cot` is at
/// most one in absolute value.
fn binary_form_at(a: &[f64], theta: f64) -> f64 {
    let d = a.len() - 1;
    let (c, s) = (theta.cos(), theta.sin());
    if c.abs() >= s.abs() {
        let t = s / c;
        a.iter().rev().fold(0.0, |acc, &x| acc * t + x) * c.powi(d as i32)
    } else {
        let t = c / s;
        a.iter().fold(0.0, |acc, &x| acc * t + x) * s.powi(d as i32)
    }
}

/// Coefficients `a_k` of `x0^(d-k) x1^k` of a binary form.
pub fn binary_form_coeffs(p: &MultiPoly) -> Result<Vec<f64>> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        });
    }
    if !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let d = p.degree() as usize;
    let mut a = vec![0.0; d + 1];
    for (idx, c) in p.terms() {
        a[idx.exponents()[1] as usize] = c;
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{product_polynomial, sphere_pair, sphere_polynomial};

    fn poly_from_roots(roots: &[f64]) -> MultiPoly {
        roots.iter().fold(MultiPoly::constant(1, 1.0), |acc, &r| &acc * &MultiPoly::univariate(&[-r, 1.0]))
    }

    #[test]
    fn simple_root_counts() {
        let p = MultiPoly::univariate(&[-1.0, 0.0, 1.0]);
        assert_eq!(real_root_count(&p, None).unwrap().count, 2);
        let q = MultiPoly::univariate(&[1.0, 0.0, 1.0]);
        assert_eq!(real_root_count(&q, None).unwrap().count, 0);
        let w = poly_from_roots(&(1..=12).map(|k| k as f64 / 10.0).collect::<Vec<_>>());
        let r = real_root_count(&w, None).unwrap();
        assert_eq!(r.count, 12);
        assert!(!r.disagreement, "{r:?}");
        assert_eq!(real_root_count(&w, Some((0.0, 0.55))).unwrap().count, 5);
        assert!(real_root_count(&MultiPoly::zero(1), None).is_err());
        // double root counted once
        let dbl = poly_from_roots(&[0.5, 0.5, -1.0]);
        assert_eq!(real_root_count(&dbl, None).unwrap().count, 2);
    }

    #[test]
    fn projective_counts_match_companion() {
        // (x1 - r x0) products: roots on RP^1 are the r's
        let roots = [-2.0, -0.3, 0.1, 0.7, 5.0];
        let aff = poly_from_roots(&roots).univariate_coeffs().unwrap();
        assert_eq!(projective_root_count(&aff).unwrap(), 5);
        // root at infinity: leading coefficient zero
        let mut inf = aff.clone();
        inf.push(0.0);
        assert_eq!(projective_root_count(&inf).unwrap(), 5 + 1);
        // two roots 1e-4 apart
        let close = poly_from_roots(&[0.3, 0.3001, 2.0]).univariate_coeffs().unwrap();
        assert_eq!(projective_root_count(&close).unwrap(), 3);
        assert_eq!(projective_root_count(&[1.0, 0.0, 1.0]).unwrap(), 0);
    }

    #[test]
    fn plane_components() {
        let pair = sphere_pair(2).unwrap();
        let p = CompiledPoly::new(pair.polynomial());
        let r = grid_components(&p, pair.domain(), 64, 3).unwrap();
        assert_eq!((r.count, r.touching_boundary, r.confident), (1, 0, true));

        let q = product_polynomial(2, 0);
        let dom = Domain::ball(2, 5f64.sqrt());
        let r = grid_components(&CompiledPoly::new(&q), &dom, 64, 3).unwrap();
        assert_eq!((r.count, r.touching_boundary), (2, 0));

        let s = sphere_polynomial(2);
        let s1 = &s + &MultiPoly::constant(2, -1.0);
        let prod = &s * &s1;
        let big = Domain::Box {
            lo: vec![-2.5, -2.5],
            hi: vec![2.5, 2.5],
        };
        let r = grid_components(&CompiledPoly::new(&prod), &big, 64, 3).unwrap();
        assert_eq!((r.count, r.touching_boundary), (2, 0));
    }

    #[test]
    fn zeros_in_boundary_cells_stay_interior() {
        // root 0.027 inside a radius sqrt(3) ball, one cell width at 128
        let dom = Domain::ball(1, 3f64.sqrt());
        let f = FnField {
            dim: 1,
            f: |x: &[f64]| (x[0] + 1.7054) * (x[0] - 1.3093),
        };
        let r = grid_components(&f, &dom, 128, 0).unwrap();
        assert_eq!((r.count, r.touching_boundary), (2, 0));
        let circle = FnField {
            dim: 2,
            f: |x: &[f64]| x[0] * x[0] + x[1] * x[1] - 0.985 * 0.985,
        };
        let r = grid_components(&circle, &Domain::ball(2, 1.0), 32, 0).unwrap();
        assert_eq!((r.count, r.touching_boundary), (1, 0));
        let outside = FnField {
            dim: 2,
            f: |x: &[f64]| x[0] * x[0] + x[1] * x[1] - 1.02 * 1.02,
        };
        let r = grid_components(&outside, &Domain::ball(2, 1.0), 32, 0).unwrap();
        assert_eq!((r.count, r.touching_boundary), (0, 0));
    }

    #[test]
    fn lines_touch_the_boundary() {
        let line = FnField {
            dim: 2,
            f: |x: &[f64]| x[0] + 0.3 * x[1] - 0.1,
        };
        let (found, r) = compact_component_in_ball(&line, &[0.0, 0.0], 1.0, 32, 2).unwrap();
        assert!(!found);
        assert_eq!((r.count, r.touching_boundary), (0, 1));
        let boxed = Domain::Box {
            lo: vec![-1.0, -1.0],
            hi: vec![1.0, 1.0],
        };
        let r = grid_components(&line, &boxed, 32, 2).unwrap();
        assert_eq!((r.count, r.touching_boundary), (0, 1));
    }

    #[test]
    fn compact_components_in_balls() {
        let pair = sphere_pair(2).unwrap();
        let p = CompiledPoly::new(pair.polynomial());
        assert!(compact_component_in_ball(&p, &[0.0, 0.0], pair.radius(), 64, 2).unwrap().0);
        let q = CompiledPoly::new(&product_polynomial(2, 0));
        let (found, r) = compact_component_in_ball(&q, &[0.0, 0.0], 5f64.sqrt(), 64, 2).unwrap();
        assert!(found && r.count == 2);
        // monotone in the radius for interior components
        let small = compact_component_in_ball(&p, &[0.0, 0.0], 1.0, 64, 2).unwrap();
        assert!(!small.0);
    }

    #[test]
    fn refinement_finds_an_oval_inside_one_cell() {
        let f = FnField {
            dim: 2,
            f: |x: &[f64]| (x[0] - 0.03).powi(2) + (x[1] - 0.04).powi(2) - 4e-4,
        };
        let dom = Domain::Box {
            lo: vec![-1.0, -1.0],
            hi: vec![1.0, 1.0],
        };
        let coarse = grid_components(&f, &dom, 16, 0).unwrap();
        assert!(!coarse.confident && coarse.count == 0);
        let r = grid_components(&f, &dom, 16, 8).unwrap();
        assert!(r.confident && r.refinement_depth > 0);
        assert_eq!(r.count, 1);
    }

    #[test]
    fn counts_are_stable_under_refinement() {
        let q = CompiledPoly::new(&product_polynomial(2, 0));
        let dom = Domain::ball(2, 5f64.sqrt());
        let mut last = None;
        for res in [64, 128, 256, 512] {
            let r = grid_components(&q, &dom, res, 0).unwrap();
            assert!(r.confident);
            if let Some(prev) = last {
                assert_eq!(prev, r.count);
            }
            last = Some(r.count);
        }
    }

    #[test]
    fn one_dimensional_counts() {
        let pair = sphere_pair(1).unwrap();
        let r = grid_components(&CompiledPoly::new(pair.polynomial()), pair.domain(), 64, 2).unwrap();
        assert_eq!((r.count, r.touching_boundary), (2, 0));
    }

    fn mono3(e: [u32; 3], c: f64) -> MultiPoly {
        MultiPoly::from_terms(3, [(e.to_vec(), c)]).unwrap()
    }

    #[test]
    fn sphere_curves() {
        let lin = mono3([1, 0, 0], 1.0);
        let r = sphere_components(&lin, 16, 2).unwrap();
        assert_eq!((r.sphere.count, r.projective_count), (1, 1));

        let cone = &(&mono3([2, 0, 0], 1.0) + &mono3([0, 2, 0], 1.0)) + &mono3([0, 0, 2], -1.0);
        let r = sphere_components(&cone, 16, 2).unwrap();
        assert_eq!((r.sphere.count, r.projective_count), (2, 1));

        let cone2 = &(&mono3([2, 0, 0], 1.0) + &mono3([0, 2, 0], 1.0)) + &mono3([0, 0, 2], -3.0);
        let quartic = &cone * &cone2;
        let r = sphere_components(&quartic, 32, 2).unwrap();
        assert_eq!((r.sphere.count, r.projective_count), (4, 2));
        assert_eq!(r.sphere.count, 2 * r.projective_count);

        assert_eq!(sphere_components(&(&lin + &MultiPoly::constant(3, 1.0)), 8, 0), Err(Error::NotHomogeneous));
    }
}

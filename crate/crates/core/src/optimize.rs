//! One-dimensional extremum search: dense scan followed by golden-section
//! refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMin {
    pub argument: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping when
/// the bracket is narrower than `tol`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> ScalarMin {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while hi - lo > tol && iterations < 500 {
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        // the interior points collapse once the bracket reaches rounding level
        if !(x1 < x2) {
            break;
        }
    }
    let (argument, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    ScalarMin {
        argument,
        value,
        bracket: (lo, hi),
        iterations,
    }
}

/// Minimizes `f` on `[lo, hi]`: evaluates `scan_points` equally spaced
/// points (endpoints excluded when `open` is set), then refines around the
/// best one with golden-section search.
pub fn scan_then_golden<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    scan_points: usize,
    open: bool,
    tol: f64,
) -> ScalarMin {
    assert!(scan_points >= 2 && hi > lo);
    let step = (hi - lo) / if open { scan_points + 1 } else { scan_points - 1 } as f64;
    let at = |k: usize| {
        if open {
            lo + step * (k + 1) as f64
        } else {
            lo + step * k as f64
        }
    };
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..scan_points {
        let v = f(at(k));
        if v < best_val {
            best_val = v;
            best = k;
        }
    }
    let left = if best == 0 { if open { lo } else { at(0) } } else { at(best - 1) };
    let right = if best + 1 == scan_points {
        if open { hi } else { at(best) }
    } else {
        at(best + 1)
    };
    let mut r = golden_section_min(&f, left, right, tol);
    if best_val < r.value {
        r.argument = at(best);
        r.value = best_val;
    }
    r.iterations += scan_points;
    r
}

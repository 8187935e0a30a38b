//! Scalar search helpers shared by the grid refinements.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of `f` on `[a, b]`.
///
/// Returns the best point seen together with its value. Non-finite values
/// compare as larger than any finite value, except `-∞`.
pub fn golden_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = key(f(x1));
    let mut f2 = key(f(x2));
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = key(f(x1));
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = key(f(x2));
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

/// Finds the boundary of a predicate that holds at `good` and fails at `bad`.
///
/// Returns the last point known to satisfy the predicate, within `tol` of the boundary.
pub fn bisect_boundary(
    mut holds: impl FnMut(f64) -> bool,
    mut good: f64,
    mut bad: f64,
    tol: f64,
    max_iter: usize,
) -> f64 {
    for _ in 0..max_iter {
        if (bad - good).abs() <= tol {
            break;
        }
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if holds(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

//! Golden-section search on a closed interval.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimise a unimodal function on `[lo, hi]`.
///
/// Stops when the bracket width falls below `rel_tol·(|lo|+|hi|)` or after
/// `max_iter` shrink steps. Returns the best abscissa seen and its value.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if hi - lo <= rel_tol * (lo.abs() + hi.abs()) {
            break;
        }
        // ties keep the left half so results lean toward smaller abscissae
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
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximise a unimodal function on `[lo, hi]`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (x, neg) = golden_section_min(|x| -f(x), lo, hi, rel_tol, max_iter);
    (x, -neg)
}

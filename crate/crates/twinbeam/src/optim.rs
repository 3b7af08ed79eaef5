//! One-dimensional minimization helpers.

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Runs until the bracket is narrower than `x_tol`, then compares the
/// interior optimum against both endpoints so the returned point is never
/// worse than either bracket edge. Returns `(x_min, f_min)`.
pub fn golden_section_minimize(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    x_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (fa_end, fb_end) = (f(a), f(b));
    let (a0, b0) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > x_tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let (xm, fm) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let mut best = (xm, fm);
    if fa_end < best.1 {
        best = (a0, fa_end);
    }
    if fb_end < best.1 {
        best = (b0, fb_end);
    }
    best
}

/// Coarse unimodality probe: local minima of `f` sampled at `n` points.
/// Returns the sample positions of every interior local minimum (endpoints
/// included when they undercut their neighbor).
pub fn sampled_local_minima(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(3);
    let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut minima = Vec::new();
    for i in 0..n {
        let left_up = i == 0 || ys[i - 1] > ys[i];
        let right_up = i == n - 1 || ys[i + 1] > ys[i];
        if left_up && right_up {
            minima.push((xs[i], ys[i]));
        }
    }
    minima
}

/// Bisection for a root of `f` on `[a, b]` with `f(a)` and `f(b)` of
/// opposite sign. Returns the midpoint after the bracket shrinks below
/// `x_tol`.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, x_tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    while (b - a).abs() > x_tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let (x, _) = golden_section_minimize(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-6);
        assert!((x - 0.3).abs() < 1e-5);
    }

    #[test]
    fn boundary_minimum_returned_exactly() {
        let (x, _) = golden_section_minimize(|x| -x, 0.5, 1.0, 1e-6);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn detects_two_minima() {
        let f = |x: f64| (x * x - 1.0) * (x * x - 1.0);
        let minima = sampled_local_minima(f, -2.0, 2.0, 41);
        assert_eq!(minima.len(), 2);
    }

    #[test]
    fn bisection_root() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-10).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-9);
    }
}

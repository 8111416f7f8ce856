use super::Tolerances;

/// An interval on which a continuous function changes sign (or touches zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Returns `None` unless `lo < hi` and `f_lo · f_hi ≤ 0`.
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Option<Self> {
        (lo < hi && f_lo * f_hi <= 0.0).then_some(Self { lo, hi, f_lo, f_hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Result of a grid scan.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootScan {
    /// Sign-change roots, ascending.
    pub roots: Vec<f64>,
    /// Grid points where |f| fell below the tangency tolerance without a sign change.
    pub near_tangent: Vec<f64>,
}

impl RootScan {
    pub fn degenerate(&self) -> bool {
        !self.near_tangent.is_empty()
    }
}

/// Refines a bracket by bisection down to `x_tol` (relative once |x| > 1) or
/// until the midpoint is no longer representable between the endpoints.
pub fn bisect<F: Fn(f64) -> f64>(f: F, bracket: Bracket, x_tol: f64) -> f64 {
    let Bracket { mut lo, mut hi, mut f_lo, f_hi } = bracket;
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    let mut f_hi = f_hi;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= x_tol * mid.abs().max(1.0) {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    if f_lo.abs() <= f_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Scans `f` on a uniform grid of `grid_n` points over `[lo, hi]` and refines every
/// sign change by bisection.
///
/// Roots that fall between grid points without producing a sign change (an even
/// number of crossings inside one cell) are invisible to the scan; grid points where
/// |f| is below `tol.tangency` but no sign change occurs are reported separately.
pub fn enumerate_roots<F: Fn(f64) -> f64>(f: F, domain: (f64, f64), grid_n: usize, tol: &Tolerances) -> RootScan {
    let (lo, hi) = domain;
    assert!(lo < hi, "enumerate_roots: empty domain ({lo}, {hi})");
    let n = grid_n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut scan = RootScan::default();
    for i in 0..n {
        if fs[i] == 0.0 {
            scan.roots.push(xs[i]);
            continue;
        }
        if i + 1 < n && fs[i + 1] != 0.0 && (fs[i] < 0.0) != (fs[i + 1] < 0.0) {
            let b = Bracket::new(xs[i], xs[i + 1], fs[i], fs[i + 1]).expect("sign change");
            scan.roots.push(bisect(&f, b, tol.x_tol));
            continue;
        }
        let left_change = i > 0 && fs[i - 1] != 0.0 && (fs[i - 1] < 0.0) != (fs[i] < 0.0);
        if fs[i].abs() < tol.tangency && !left_change {
            scan.near_tangent.push(xs[i]);
        }
    }
    scan
}

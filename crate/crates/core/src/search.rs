//! One-dimensional search routines shared by the engine and the bounds.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a unimodal function on `[a, b]`.
///
/// Stops when the bracket is narrower than `tol`; returns the best point seen.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    [(c, fc), (d, fd)]
        .into_iter()
        .fold((mid, fm), |best, p| if p.1 > best.1 { p } else { best })
}

/// Result of bisecting a monotone predicate on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Predicate already holds at 0.
    AtZero,
    /// Predicate fails even at 1.
    AtOne,
    /// `pred(lo)` is false, `pred(hi)` true, `hi - lo < tol`.
    Bracket { lo: f64, hi: f64, iterations: usize },
}

/// Locates the switch point of a predicate that is false below some point of
/// `[0, 1]` and true above it. Errors from the predicate abort the search.
pub fn bisect_predicate<E>(
    mut pred: impl FnMut(f64) -> Result<bool, E>,
    tol: f64,
) -> Result<Boundary, E> {
    if pred(0.0)? {
        return Ok(Boundary::AtZero);
    }
    if !pred(1.0)? {
        return Ok(Boundary::AtOne);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut iterations = 0;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(Boundary::Bracket { lo, hi, iterations })
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { b } else { a + k as f64 * step })
                .collect()
        }
    }
}

//! Composite Simpson quadrature, cumulative and total.

/// `n` equally spaced points covering `[a, b]` inclusive.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs at least two points");
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect()
}

/// Running integral of `f` over `grid`, starting at zero on `grid[0]`.
///
/// Each cell is integrated with Simpson's rule on its endpoints and midpoint,
/// so the grid may be non-uniform and decreasing.
pub fn cumulative_simpson_fn<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    if grid.is_empty() {
        return out;
    }
    out.push(0.0);
    let mut acc = 0.0;
    let mut f_left = f(grid[0]);
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let f_right = f(b);
        acc += (b - a) / 6.0 * (f_left + 4.0 * f(0.5 * (a + b)) + f_right);
        out.push(acc);
        f_left = f_right;
    }
    out
}

/// Integral of `f` over `[a, b]` by recursive Simpson bisection with
/// Richardson correction, to absolute tolerance `tol` or `max_depth` levels.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Running integral of `f` over `grid` with [`adaptive_simpson`] on each cell.
pub fn cumulative_adaptive<F: Fn(f64) -> f64>(f: F, grid: &[f64], tol: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    if grid.is_empty() {
        return out;
    }
    out.push(0.0);
    let mut acc = 0.0;
    for w in grid.windows(2) {
        acc += adaptive_simpson(&f, w[0], w[1], tol, 40);
        out.push(acc);
    }
    out
}

/// Running integral of uniformly spaced samples.
///
/// Even nodes carry the composite Simpson sum; odd nodes add a third-order
/// single-cell correction on top of the preceding even node.
pub fn cumulative_simpson_samples(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (y[0] + y[1]);
        return out;
    }
    let mut i = 0;
    while i + 2 < n {
        out[i + 1] = out[i] + h / 12.0 * (5.0 * y[i] + 8.0 * y[i + 1] - y[i + 2]);
        out[i + 2] = out[i] + h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        // one trailing cell
        out[i + 1] = out[i] + h / 12.0 * (-y[i - 1] + 8.0 * y[i] + 5.0 * y[i + 1]);
    }
    out
}

/// Composite Simpson integral of uniformly spaced samples. An odd number of
/// cells is closed with Simpson's 3/8 rule on the last three.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (y[0] + y[1]),
        3 => h / 3.0 * (y[0] + 4.0 * y[1] + y[2]),
        _ => {
            let cells = n - 1;
            let (simpson_end, tail) = if cells.is_multiple_of(2) {
                (n - 1, false)
            } else {
                (n - 4, true)
            };
            let mut s = 0.0;
            let mut i = 0;
            while i < simpson_end {
                s += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
                i += 2;
            }
            if tail {
                let j = n - 4;
                s += 3.0 * h / 8.0 * (y[j] + 3.0 * y[j + 1] + 3.0 * y[j + 2] + y[j + 3]);
            }
            s
        }
    }
}

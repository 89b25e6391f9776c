//! Lowest eigenpairs of a real symmetric tridiagonal matrix, optionally
//! closed into a ring by a corner entry `A[0][n-1] = A[n-1][0]`.
//!
//! Eigenvalues are bracketed by Sturm-count bisection. The count is the number
//! of negative pivots of an `LDLᵀ` factorization of `A − σI`, where the ring
//! case carries one extra column of fill ("spike") into the last row.
//! Eigenvectors come from inverse iteration with a partially pivoted band LU.
//! Numbering the unknowns `0, n−1, 1, n−2, …` makes the ring pentadiagonal.

use crate::par::{map_range, map_slice, Execution};

const MAX_BISECTIONS: usize = 256;
const INVERSE_ITERATIONS: usize = 4;
/// Eigenvalues closer than this times `‖A‖` are orthogonalized as a cluster.
const CLUSTER_GAP: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct RingTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i] = A[i][i+1]`.
    pub off: Vec<f64>,
    /// `A[0][n-1]`; zero for an open chain.
    pub corner: f64,
}

impl RingTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>, corner: f64) -> Self {
        assert!(
            diag.len() >= 3 && off.len() + 1 == diag.len(),
            "need n >= 3 and n - 1 off-diagonals"
        );
        Self { diag, off, corner }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            if i == 0 || i == n - 1 {
                r += self.corner.abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn norm(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    fn pivmin(&self) -> f64 {
        f64::MIN_POSITIVE.sqrt() * self.norm()
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let pivmin = self.pivmin();
        let guard = |d: f64| if d.abs() < pivmin { -pivmin } else { d };
        let mut count = 0;
        let mut d = self.diag[0] - sigma;
        let mut spike = self.corner;
        let mut last = self.diag[n - 1] - sigma;
        for i in 0..n - 1 {
            d = guard(d);
            count += usize::from(d < 0.0);
            last -= spike * spike / d;
            if i + 2 < n {
                let carry = if i + 2 == n - 1 { self.off[n - 2] } else { 0.0 };
                let next_spike = carry - self.off[i] * spike / d;
                d = self.diag[i + 1] - sigma - self.off[i] * self.off[i] / d;
                spike = next_spike;
            }
        }
        count + usize::from(guard(last) < 0.0)
    }

    /// `k`-th smallest eigenvalue (0-based) to about machine precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        let pad = self.pivmin() + f64::EPSILON * self.norm();
        lo -= pad;
        hi += pad;
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo
                || mid >= hi
                || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + self.pivmin()
            {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvectors (Euclidean norm) for the given ascending eigenvalues.
    pub fn eigenvectors(&self, values: &[f64], exec: Execution) -> Vec<Vec<f64>> {
        let n = self.len();
        let gap = CLUSTER_GAP * self.norm();
        let mut clusters: Vec<std::ops::Range<usize>> = Vec::new();
        let mut start = 0;
        for k in 1..=values.len() {
            if k == values.len() || values[k] - values[k - 1] > gap {
                clusters.push(start..k);
                start = k;
            }
        }
        let per_cluster = map_slice(exec, &clusters, |range| {
            let mut found: Vec<Vec<f64>> = Vec::with_capacity(range.len());
            for k in range.clone() {
                let lu = BandLu::new(self, values[k]);
                let mut x = start_vector(n, k, 0);
                for it in 0..INVERSE_ITERATIONS {
                    orthogonalize(&mut x, &found);
                    if normalize(&mut x) < 1e-8 {
                        x = start_vector(n, k, it + 1);
                        orthogonalize(&mut x, &found);
                        normalize(&mut x);
                    }
                    lu.solve(&mut x);
                    normalize(&mut x);
                }
                orthogonalize(&mut x, &found);
                normalize(&mut x);
                fix_sign(&mut x);
                found.push(x);
            }
            found
        });
        per_cluster.into_iter().flatten().collect()
    }

    /// `xᵀAx` for a unit vector.
    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut ax = self.diag[i] * x[i];
            if i > 0 {
                ax += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                ax += self.off[i] * x[i + 1];
            }
            if i == 0 {
                ax += self.corner * x[n - 1];
            }
            if i == n - 1 {
                ax += self.corner * x[0];
            }
            acc += x[i] * ax;
        }
        acc
    }

    /// Lowest `k` eigenpairs, eigenvalues ascending.
    ///
    /// Bisection brackets each eigenvalue; the reported value is the Rayleigh
    /// quotient of its vector, which stays accurate inside degenerate pairs
    /// where the ring's Sturm count is only good to about `√ε ‖A‖`.
    pub fn lowest(&self, k: usize, exec: Execution) -> (Vec<f64>, Vec<Vec<f64>>) {
        let brackets = map_range(exec, k, |i| self.eigenvalue(i));
        let vectors = self.eigenvectors(&brackets, exec);
        let mut pairs: Vec<(f64, Vec<f64>)> = vectors
            .into_iter()
            .map(|x| (self.rayleigh(&x), x))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.into_iter().unzip()
    }
}

fn start_vector(n: usize, k: usize, attempt: usize) -> Vec<f64> {
    let rate = 0.754_877_666 * (k + 1) as f64 + 0.381_966 * attempt as f64;
    (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * rate).sin())
        .collect()
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let dot: f64 = b.iter().zip(x.iter()).map(|(p, q)| p * q).sum();
        x.iter_mut().zip(b).for_each(|(q, p)| *q -= dot * p);
    }
}

/// Scales to unit length and returns the previous length.
fn normalize(x: &mut [f64]) -> f64 {
    let big = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if big == 0.0 || !big.is_finite() {
        return 0.0;
    }
    let n = big * x.iter().map(|v| (v / big).powi(2)).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
    n
}

/// Lower and upper bandwidth of the zig-zag ordered ring.
const BAND: usize = 2;
const WIDTH: usize = 3 * BAND + 1;

/// `LU = P(A − σI)` in zig-zag order, with partial pivoting inside the band.
struct BandLu {
    n: usize,
    /// Row `i` holds columns `i − BAND ..= i + 2·BAND`.
    rows: Vec<[f64; WIDTH]>,
    lower: Vec<[f64; BAND]>,
    swaps: Vec<usize>,
    /// Ring index of each zig-zag position.
    order: Vec<usize>,
}

fn zigzag(n: usize) -> Vec<usize> {
    (0..n)
        .map(|p| if p % 2 == 0 { p / 2 } else { n - 1 - p / 2 })
        .collect()
}

impl BandLu {
    fn new(t: &RingTridiagonal, sigma: f64) -> Self {
        let n = t.len();
        let order = zigzag(n);
        let mut pos = vec![0; n];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        let mut rows = vec![[0.0; WIDTH]; n];
        let mut put = |i: usize, j: usize, v: f64| {
            let (r, c) = (pos[i], pos[j]);
            rows[r][c + BAND - r] += v;
        };
        for i in 0..n {
            put(i, i, t.diag[i] - sigma);
            if i + 1 < n {
                put(i, i + 1, t.off[i]);
                put(i + 1, i, t.off[i]);
            }
        }
        if t.corner != 0.0 {
            put(0, n - 1, t.corner);
            put(n - 1, 0, t.corner);
        }
        let tiny = f64::EPSILON * t.norm();
        let mut lower = vec![[0.0; BAND]; n];
        let mut swaps = vec![0; n];
        for k in 0..n {
            let last = (k + BAND).min(n - 1);
            let mut piv = k;
            for r in k + 1..=last {
                if rows[r][k + BAND - r].abs() > rows[piv][k + BAND - piv].abs() {
                    piv = r;
                }
            }
            swaps[k] = piv;
            if piv != k {
                // both windows cover columns k ..= k + 2·BAND
                for c in k..=(k + 2 * BAND).min(n - 1) {
                    let (a, b) = (rows[k][c + BAND - k], rows[piv][c + BAND - piv]);
                    rows[k][c + BAND - k] = b;
                    rows[piv][c + BAND - piv] = a;
                }
            }
            if rows[k][BAND].abs() < tiny {
                rows[k][BAND] = if rows[k][BAND] < 0.0 { -tiny } else { tiny };
            }
            let d = rows[k][BAND];
            for r in k + 1..=last {
                let l = rows[r][k + BAND - r] / d;
                lower[k][r - k - 1] = l;
                rows[r][k + BAND - r] = 0.0;
                if l != 0.0 {
                    for c in k + 1..=(k + 2 * BAND).min(n - 1) {
                        let u = rows[k][c + BAND - k];
                        rows[r][c + BAND - r] -= l * u;
                    }
                }
            }
        }
        Self {
            n,
            rows,
            lower,
            swaps,
            order,
        }
    }

    /// Overwrites `b` (ring order) with `(A − σI)⁻¹ b`.
    #[allow(clippy::needless_range_loop)]
    fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = self.order.iter().map(|&i| b[i]).collect();
        for k in 0..n {
            y.swap(k, self.swaps[k]);
            let yk = y[k];
            for r in k + 1..=(k + BAND).min(n - 1) {
                y[r] -= self.lower[k][r - k - 1] * yk;
            }
        }
        for k in (0..n).rev() {
            let mut v = y[k];
            for c in k + 1..=(k + 2 * BAND).min(n - 1) {
                v -= self.rows[k][c + BAND - k] * y[c];
            }
            y[k] = v / self.rows[k][BAND];
        }
        for (p, &i) in self.order.iter().enumerate() {
            b[i] = y[p];
        }
    }
}

/// Largest-magnitude component made positive.
fn fix_sign(x: &mut [f64]) {
    let mut best = 0.0_f64;
    for &v in x.iter() {
        if v.abs() > best.abs() + 1e-12 {
            best = v;
        }
    }
    if best < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

//! One-variable profiles.
//!
//! [`HermiteProfile`] is the workhorse behind every synthesized curve and
//! surface: quadratures produce values on a grid while the integrand (and its
//! derivative) are known exactly at the nodes, so a piecewise quintic Hermite
//! interpolant gives a C² callable whose finite-difference jets are clean.

use std::sync::Arc;

use crate::error::{GipError, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Wraps a closure as a shareable scalar function.
pub fn scalar_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> ScalarFn {
    Arc::new(f)
}

/// C² piecewise quintic interpolant through values, slopes and second
/// derivatives on strictly increasing knots. Outside the knot range the end
/// polynomials are extended.
#[derive(Debug, Clone)]
pub struct HermiteProfile {
    knots: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
    d2y: Vec<f64>,
}

impl HermiteProfile {
    pub fn new(knots: Vec<f64>, y: Vec<f64>, dy: Vec<f64>, d2y: Vec<f64>) -> Result<Self> {
        let n = knots.len();
        if n < 2 || y.len() != n || dy.len() != n || d2y.len() != n {
            return Err(GipError::Invalid(format!(
                "hermite profile needs matching arrays of length >= 2 (got {n})"
            )));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GipError::Invalid(
                "hermite knots must be strictly increasing".into(),
            ));
        }
        if y.iter().chain(&dy).chain(&d2y).any(|v| !v.is_finite()) {
            return Err(GipError::Numeric(
                "non-finite data in hermite profile".into(),
            ));
        }
        Ok(Self { knots, y, dy, d2y })
    }

    /// Same data on knots given in decreasing order.
    pub fn new_any_order(
        knots: Vec<f64>,
        y: Vec<f64>,
        dy: Vec<f64>,
        d2y: Vec<f64>,
    ) -> Result<Self> {
        if knots.len() >= 2 && knots[0] > knots[knots.len() - 1] {
            let rev = |mut v: Vec<f64>| {
                v.reverse();
                v
            };
            Self::new(rev(knots), rev(y), rev(dy), rev(d2y))
        } else {
            Self::new(knots, y, dy, d2y)
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn slopes(&self) -> &[f64] {
        &self.dy
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    fn segment(&self, x: f64) -> usize {
        let last = self.knots.len() - 2;
        let idx = self.knots.partition_point(|&k| k <= x);
        idx.saturating_sub(1).min(last)
    }

    /// Value, first and second derivative at `x`.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let i = self.segment(x);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let dy0 = h * self.dy[i];
        let dy1 = h * self.dy[i + 1];
        let s0 = h * h * self.d2y[i];
        let s1 = h * h * self.d2y[i + 1];
        let dv = self.y[i + 1] - self.y[i];
        let c0 = self.y[i];
        let c1 = dy0;
        let c2 = 0.5 * s0;
        let c3 = 10.0 * dv - 6.0 * dy0 - 4.0 * dy1 - 1.5 * s0 + 0.5 * s1;
        let c4 = -15.0 * dv + 8.0 * dy0 + 7.0 * dy1 + 1.5 * s0 - s1;
        let c5 = 6.0 * dv - 3.0 * dy0 - 3.0 * dy1 - 0.5 * s0 + 0.5 * s1;
        let v = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
        let d = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
        let dd = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
        (v, d / h, dd / (h * h))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval3(x).0
    }

    /// Solves `p(x) = target` for x by safeguarded Newton iteration; the
    /// profile must be strictly monotone on its knot range.
    pub fn invert(&self, target: f64) -> Option<f64> {
        let n = self.knots.len();
        let increasing = self.y[n - 1] > self.y[0];
        let idx = if increasing {
            self.y.partition_point(|&v| v <= target)
        } else {
            self.y.partition_point(|&v| v >= target)
        };
        let i = idx.saturating_sub(1).min(n - 2);
        let (mut lo, mut hi) = (self.knots[i], self.knots[i + 1]);
        let mut x = {
            let (ya, yb) = (self.y[i], self.y[i + 1]);
            if yb != ya {
                lo + (target - ya) / (yb - ya) * (hi - lo)
            } else {
                0.5 * (lo + hi)
            }
        };
        for _ in 0..100 {
            let (v, d, _) = self.eval3(x);
            let r = v - target;
            if r == 0.0 {
                return Some(x);
            }
            if (r > 0.0) == increasing {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - r / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return Some(next);
            }
            x = next;
        }
        Some(x)
    }
}

/// A prescribed potential: closed form or tabulated.
#[derive(Clone)]
pub enum PotentialProfile {
    Closed(ScalarFn),
    /// Piecewise linear through `(x, value)` pairs, constant beyond the ends.
    Sampled {
        x: Vec<f64>,
        values: Vec<f64>,
    },
}

impl std::fmt::Debug for PotentialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PotentialProfile::Closed(_) => f.write_str("PotentialProfile::Closed(..)"),
            PotentialProfile::Sampled { x, .. } => {
                write!(f, "PotentialProfile::Sampled({} points)", x.len())
            }
        }
    }
}

impl PotentialProfile {
    pub fn closed<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        PotentialProfile::Closed(Arc::new(f))
    }

    pub fn constant(value: f64) -> Self {
        Self::closed(move |_| value)
    }

    pub fn sampled(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != values.len() {
            return Err(GipError::Invalid(
                "sampled potential needs >= 2 matching points".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GipError::Invalid(
                "sampled potential abscissae must increase".into(),
            ));
        }
        Ok(PotentialProfile::Sampled { x, values })
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            PotentialProfile::Closed(f) => f(s),
            PotentialProfile::Sampled { x, values } => {
                let n = x.len();
                if s <= x[0] {
                    return values[0];
                }
                if s >= x[n - 1] {
                    return values[n - 1];
                }
                let i = x.partition_point(|&k| k <= s) - 1;
                let t = (s - x[i]) / (x[i + 1] - x[i]);
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    pub fn as_fn(&self) -> ScalarFn {
        match self {
            PotentialProfile::Closed(f) => f.clone(),
            sampled => {
                let p = sampled.clone();
                Arc::new(move |s| p.eval(s))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::uniform_grid;

    fn sample(f: impl Fn(f64) -> (f64, f64, f64), knots: &[f64]) -> HermiteProfile {
        let (mut y, mut d, mut dd) = (vec![], vec![], vec![]);
        for &k in knots {
            let (a, b, c) = f(k);
            y.push(a);
            d.push(b);
            dd.push(c);
        }
        HermiteProfile::new(knots.to_vec(), y, d, dd).unwrap()
    }

    #[test]
    fn reproduces_quintics_exactly() {
        let p = |x: f64| x.powi(5) - 2.0 * x.powi(3) + x;
        let f = |x: f64| {
            (
                p(x),
                5.0 * x.powi(4) - 6.0 * x * x + 1.0,
                20.0 * x.powi(3) - 12.0 * x,
            )
        };
        let prof = sample(f, &[-1.0, -0.3, 0.4, 1.5]);
        for &x in &[-0.9, -0.1, 0.0, 0.77, 1.2] {
            let (v, d, dd) = prof.eval3(x);
            let (ev, ed, edd) = f(x);
            assert!((v - ev).abs() < 1e-12);
            assert!((d - ed).abs() < 1e-11);
            assert!((dd - edd).abs() < 1e-10);
        }
    }

    #[test]
    fn sine_is_accurate_to_sixth_order() {
        let knots = uniform_grid(0.0, 3.0, 61);
        let prof = sample(|x| (x.sin(), x.cos(), -x.sin()), &knots);
        let err = (0..300)
            .map(|i| {
                let x = 0.01 * i as f64;
                (prof.eval(x) - x.sin()).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn inversion_round_trips() {
        let knots = uniform_grid(0.1, 2.0, 40);
        let prof = sample(|x| (x.exp(), x.exp(), x.exp()), &knots);
        for &x in &[0.1, 0.5, 1.234, 2.0] {
            let y = prof.eval(x);
            assert!((prof.invert(y).unwrap() - x).abs() < 1e-12);
        }
        let dec = sample(|x| (-x * x, -2.0 * x, -2.0), &knots);
        assert!((dec.invert(-1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_potential_interpolates() {
        let p = PotentialProfile::sampled(vec![0.0, 1.0, 2.0], vec![0.0, -1.0, -3.0]).unwrap();
        assert_eq!(p.eval(0.5), -0.5);
        assert_eq!(p.eval(1.5), -2.0);
        assert_eq!(p.eval(9.0), -3.0);
        assert!(PotentialProfile::sampled(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }
}

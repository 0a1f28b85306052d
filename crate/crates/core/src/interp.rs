//! Interpolation on sorted one-dimensional grids.

use crate::error::{Error, Result};

fn check_grid(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < min_len {
        return Err(Error::WindowTooShort {
            needed: min_len,
            got: x.len(),
        });
    }
    if x.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "interpolation grid must be strictly increasing".into(),
        ));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain("interpolation data must be finite".into()));
    }
    Ok(())
}

/// Index `i` with `x[i] <= t < x[i+1]`, clamped to `0..=len-2`.
fn bracket(x: &[f64], t: f64) -> usize {
    let i = x.partition_point(|&v| v <= t);
    i.saturating_sub(1).min(x.len() - 2)
}

/// Piecewise-linear interpolant, constant beyond the end points.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Linear {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_grid(&x, &y, 1)?;
        Ok(Self { x, y })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if n == 1 || t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = bracket(&self.x, t);
        let w = (t - self.x[i]) / (self.x[i + 1] - self.x[i]);
        self.y[i] + w * (self.y[i + 1] - self.y[i])
    }
}

/// Local cubic interpolant: the Lagrange polynomial through the four knots
/// nearest the evaluation point (fewer near a short grid's ends). Constant
/// beyond the end points.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCubic {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl LocalCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_grid(&x, &y, 2)?;
        Ok(Self { x, y })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = bracket(&self.x, t);
        let lo = i.saturating_sub(1).min(n.saturating_sub(4));
        let hi = (lo + 4).min(n);
        let xs = &self.x[lo..hi];
        let ys = &self.y[lo..hi];
        let mut acc = 0.0;
        for (a, (&xa, &ya)) in xs.iter().zip(ys).enumerate() {
            let mut w = 1.0;
            for (b, &xb) in xs.iter().enumerate() {
                if a != b {
                    w *= (t - xb) / (xa - xb);
                }
            }
            acc += w * ya;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_hits_knots_and_midpoints() {
        let f = Linear::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(2.0), 1.0);
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(9.0), 0.0);
    }

    #[test]
    fn cubic_reproduces_cubics() {
        let x: Vec<f64> = (0..12).map(|i| (i as f64 / 11.0).powi(2)).collect();
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t * t;
        let f = LocalCubic::new(x.clone(), x.iter().map(|&t| p(t)).collect()).unwrap();
        for t in [0.001, 0.2, 0.55, 0.97] {
            assert!((f.eval(t) - p(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_unsorted_grid() {
        assert!(Linear::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(LocalCubic::new(vec![0.0], vec![1.0]).is_err());
    }
}

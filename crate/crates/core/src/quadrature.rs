//! Panel-adaptive Gauss–Legendre quadrature and the periodic trapezoid rule.
//!
//! The adaptive driver keeps a heap of panels keyed by the discrepancy
//! between the panel rule and the rule applied to its two halves, and
//! bisects the worst panel until the summed discrepancy is below
//! `abs_tol`. Callers pass the initial partition, which is where known
//! discontinuities and grading toward singular endpoints go.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub nodes_per_panel: usize,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes_per_panel: 32,
            abs_tol: 1e-10,
            max_panels: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_panel < 2 {
            return Err(Error::Domain(format!(
                "nodes_per_panel must be at least 2, got {}",
                self.nodes_per_panel
            )));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::Domain(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::Domain("max_panels must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Panel {
    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// A Gauss–Legendre rule bound to a configuration.
#[derive(Debug, Clone)]
pub struct Integrator {
    config: QuadratureConfig,
    rule: Vec<(f64, f64)>,
}

impl Integrator {
    pub fn new(config: QuadratureConfig) -> Result<Self> {
        config.validate()?;
        let degree = NonZeroUsize::new(config.nodes_per_panel).expect("validated above");
        let rule = GaussLegendre::new(degree).as_node_weight_pairs().to_vec();
        Ok(Self { config, rule })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    fn rule_on<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = NeumaierSum::new();
        for &(x, w) in &self.rule {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }

    fn make_panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, whole: f64) -> Result<Panel> {
        let mid = 0.5 * (a + b);
        let left = self.rule_on(f, a, mid);
        let right = self.rule_on(f, mid, b);
        let error = ((left + right) - whole).abs();
        if !(left.is_finite() && right.is_finite()) {
            return Err(Error::Domain(format!("integrand not finite on [{a}, {b}]")));
        }
        Ok(Panel {
            a,
            b,
            left,
            right,
            error,
        })
    }

    /// Integrates `f` over `[breakpoints[0], breakpoints[last]]`. The
    /// breakpoints form the initial partition and must be non-decreasing;
    /// zero-width pieces are dropped.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, breakpoints: &[f64]) -> Result<Estimate> {
        if breakpoints.len() < 2 {
            return Err(Error::Domain("need at least two breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::Domain("breakpoints must be non-decreasing".into()));
        }
        let mut heap = BinaryHeap::new();
        for w in breakpoints.windows(2) {
            if w[1] > w[0] {
                let whole = self.rule_on(&f, w[0], w[1]);
                heap.push(self.make_panel(&f, w[0], w[1], whole)?);
            }
        }
        if heap.is_empty() {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
                panels: 0,
            });
        }
        loop {
            let error: f64 = heap.iter().map(|p| p.error).sum();
            if error <= self.config.abs_tol {
                break;
            }
            if heap.len() >= self.config.max_panels {
                let value = heap
                    .iter()
                    .map(|p| p.value())
                    .collect::<NeumaierSum>()
                    .value();
                return Err(Error::Tolerance {
                    what: "adaptive quadrature".into(),
                    requested: self.config.abs_tol,
                    achieved: error,
                    estimate: value,
                });
            }
            let worst = heap.pop().expect("heap is nonempty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(worst.a < mid && mid < worst.b) {
                // Panel at floating-point resolution: nothing left to refine.
                heap.push(Panel {
                    error: 0.0,
                    ..worst
                });
                continue;
            }
            heap.push(self.make_panel(&f, worst.a, mid, worst.left)?);
            heap.push(self.make_panel(&f, mid, worst.b, worst.right)?);
        }
        let panels = heap.into_sorted_vec();
        let error = panels.iter().map(|p| p.error).sum();
        let mut ordered = panels;
        ordered.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value = ordered
            .iter()
            .map(|p| p.value())
            .collect::<NeumaierSum>()
            .value();
        Ok(Estimate {
            value,
            error,
            panels: ordered.len(),
        })
    }
}

/// Breakpoints `a`, the geometric sequence `b - (b-a) 2^{-j}` for
/// `j = 1..levels`, and `b`.
pub fn graded_toward_right(a: f64, b: f64, levels: usize) -> Vec<f64> {
    let mut pts = vec![a];
    let mut gap = b - a;
    for _ in 0..levels {
        gap *= 0.5;
        pts.push(b - gap);
    }
    pts.push(b);
    pts
}

/// Mirror image of [`graded_toward_right`]: refined toward `a`.
pub fn graded_toward_left(a: f64, b: f64, levels: usize) -> Vec<f64> {
    let mut pts = vec![a, b];
    let mut gap = b - a;
    for _ in 0..levels {
        gap *= 0.5;
        pts.push(a + gap);
    }
    pts.sort_by(f64::total_cmp);
    pts
}

/// Sorted union of breakpoint lists, clipped to `[lo, hi]`, duplicates
/// removed.
pub fn merge_breakpoints(lists: &[&[f64]], lo: f64, hi: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = lists
        .iter()
        .flat_map(|l| l.iter().copied())
        .filter(|&p| p > lo && p < hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicEstimate {
    pub value: f64,
    pub nodes: usize,
}

/// `(1/2π) ∫_0^{2π} f(θ) dθ` for an even, smooth, `2π`-periodic `f`, by the
/// trapezoid rule with node doubling until successive estimates agree to
/// `rel_tol`.
pub fn even_periodic_mean<F: Fn(f64) -> f64>(
    f: F,
    rel_tol: f64,
    max_nodes: usize,
) -> Result<PeriodicEstimate> {
    use std::f64::consts::PI;
    // n nodes at 2πi/n; evenness folds them onto [0, π].
    let mut n = 16usize;
    let mut sum = f(0.0) + f(PI);
    for i in 1..n / 2 {
        sum += 2.0 * f(2.0 * PI * i as f64 / n as f64);
    }
    let mut mean = sum / n as f64;
    loop {
        let mut odd = 0.0;
        for i in 0..n / 2 {
            odd += 2.0 * f((2 * i + 1) as f64 * PI / n as f64);
        }
        sum += odd;
        n *= 2;
        let next = sum / n as f64;
        if !next.is_finite() {
            return Err(Error::Domain("periodic integrand not finite".into()));
        }
        let change = (next - mean).abs();
        mean = next;
        if change <= rel_tol * next.abs() || change == 0.0 {
            return Ok(PeriodicEstimate {
                value: mean,
                nodes: n,
            });
        }
        if n >= max_nodes {
            return Err(Error::Tolerance {
                what: "periodic trapezoid rule".into(),
                requested: rel_tol,
                achieved: change / next.abs().max(f64::MIN_POSITIVE),
                estimate: next,
            });
        }
    }
}

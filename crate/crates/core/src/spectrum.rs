//! Essential-spectrum diagnostics for diagonal operators.
//!
//! The essential spectrum of a diagonal operator is the set of limit points
//! of its eigenvalues. A window can only estimate it: [`limit_points`]
//! clusters the tail of the window at a caller-chosen resolution.
//! [`sequence_from_path`] goes the other way and builds a sequence with
//! `(n+1)|λ_{n+1} - λ_n| <= speed` whose limit set is a given polyline.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::EigenvalueSequence;

/// A polyline `v_0 → v_1 → … → v_J` standing in for a compact connected set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathWire", into = "PathWire")]
pub struct SpectrumPath {
    vertices: Vec<Complex64>,
    /// `cumulative[i]` is the arc length from `v_0` to `v_i`.
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathWire {
    vertices: Vec<Complex64>,
}

impl TryFrom<PathWire> for SpectrumPath {
    type Error = Error;

    fn try_from(w: PathWire) -> Result<Self> {
        SpectrumPath::new(w.vertices)
    }
}

impl From<SpectrumPath> for PathWire {
    fn from(p: SpectrumPath) -> Self {
        PathWire {
            vertices: p.vertices,
        }
    }
}

impl SpectrumPath {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Domain("a path needs at least one vertex".into()));
        }
        if let Some(index) = vertices
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        if vertices.len() > 1 && vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain(
                "consecutive path vertices must differ".into(),
            ));
        }
        let mut cumulative = vec![0.0];
        for w in vertices.windows(2) {
            let last = cumulative[cumulative.len() - 1];
            cumulative.push(last + (w[1] - w[0]).norm());
        }
        Ok(Self {
            vertices,
            cumulative,
        })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn length(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// The point at arc length `s ∈ [0, L]` (clamped).
    pub fn point_at(&self, s: f64) -> Complex64 {
        if self.vertices.len() == 1 {
            return self.vertices[0];
        }
        let s = s.clamp(0.0, self.length());
        let i = self
            .cumulative
            .partition_point(|&c| c <= s)
            .clamp(1, self.vertices.len() - 1);
        let (a, b) = (self.vertices[i - 1], self.vertices[i]);
        let seg = self.cumulative[i] - self.cumulative[i - 1];
        let w = ((s - self.cumulative[i - 1]) / seg).clamp(0.0, 1.0);
        a + (b - a) * w
    }

    /// Arc-length coordinate of the point of the path nearest to `z`, and
    /// the distance to it.
    pub fn project(&self, z: Complex64) -> (f64, f64) {
        if self.vertices.len() == 1 {
            return (0.0, (z - self.vertices[0]).norm());
        }
        let mut best = (0.0, f64::INFINITY);
        for (i, w) in self.vertices.windows(2).enumerate() {
            let d = w[1] - w[0];
            let len2 = d.norm_sqr();
            let u = (((z - w[0]) * d.conj()).re / len2).clamp(0.0, 1.0);
            let dist = (z - (w[0] + d * u)).norm();
            if dist < best.1 {
                best = (self.cumulative[i] + u * len2.sqrt(), dist);
            }
        }
        best
    }
}

/// Relative shortening of each step; absorbs rounding in the seminorm
/// itself.
const STEP_CONTRACTION: f64 = 1.0 - 1e-12;

/// Walks the path by arc length with steps `speed/(n+1)` (capped at the
/// path length), reversing direction at either end.
pub fn sequence_from_path(
    path: &SpectrumPath,
    len: usize,
    speed: f64,
) -> Result<EigenvalueSequence> {
    if len < 2 {
        return Err(Error::WindowTooShort {
            needed: 2,
            got: len,
        });
    }
    if !(speed.is_finite() && speed > 0.0) {
        return Err(Error::Domain(format!(
            "speed must be positive, got {speed}"
        )));
    }
    let total = path.length();
    // Absolute shortening: covers rounding of the arc-length update and of
    // the interpolation in `point_at`, both a few ulps of the coordinates.
    let scale = path
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(total, f64::max);
    let margin = 8.0 * f64::EPSILON * scale;
    let mut values = Vec::with_capacity(len);
    let mut s = 0.0f64;
    let mut forward = true;
    values.push(path.point_at(0.0));
    for n in 0..len - 1 {
        if total > 0.0 {
            let step = (speed / (n as f64 + 1.0) * STEP_CONTRACTION - margin)
                .max(0.0)
                .min(total);
            if forward {
                s += step;
                if s > total {
                    s = 2.0 * total - s;
                    forward = false;
                }
            } else {
                s -= step;
                if s < 0.0 {
                    s = -s;
                    forward = true;
                }
            }
        }
        values.push(path.point_at(s));
    }
    EigenvalueSequence::new(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub centroid: Complex64,
    /// Number of tail entries in the cluster.
    pub size: usize,
    /// Centroids of the occupied cells of side `cluster_tol / 2`.
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPoints {
    pub tail_start: usize,
    pub cluster_tol: f64,
    pub clusters: Vec<Cluster>,
}

impl LimitPoints {
    /// All cell representatives of all clusters.
    pub fn points(&self) -> Vec<Complex64> {
        self.clusters
            .iter()
            .flat_map(|c| c.points.iter().copied())
            .collect()
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Single-linkage components of `points` at distance `tol` (sweep over
/// points sorted by real part). Returns a component label per point.
fn linkage(points: &[Complex64], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .re
            .total_cmp(&points[b].re)
            .then(points[a].im.total_cmp(&points[b].im))
    });
    let mut sets = DisjointSets::new(points.len());
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if points[b].re - points[a].re > tol {
                break;
            }
            if (points[b] - points[a]).norm() <= tol {
                sets.union(a, b);
            }
        }
    }
    (0..points.len()).map(|i| sets.find(i)).collect()
}

fn cell_key(z: Complex64, side: f64) -> (i64, i64) {
    ((z.re / side).floor() as i64, (z.im / side).floor() as i64)
}

/// Weighted bucket averages on a square lattice of the given side.
fn bucket(points: &[(Complex64, usize)], side: f64) -> Vec<(Complex64, usize)> {
    let mut cells: BTreeMap<(i64, i64), (Complex64, usize)> = BTreeMap::new();
    for &(z, w) in points {
        let e = cells
            .entry(cell_key(z, side))
            .or_insert((Complex64::new(0.0, 0.0), 0));
        e.0 += z * w as f64;
        e.1 += w;
    }
    cells
        .into_values()
        .map(|(sum, w)| (sum / w as f64, w))
        .collect()
}

/// Clusters the tail `{λ_n : n >= (1 - tail_fraction) N}` by single linkage
/// at `cluster_tol`.
pub fn limit_points(
    lambda: &EigenvalueSequence,
    tail_fraction: f64,
    cluster_tol: f64,
) -> Result<LimitPoints> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    if !(cluster_tol.is_finite() && cluster_tol > 0.0) {
        return Err(Error::Domain(format!(
            "cluster tolerance must be positive, got {cluster_tol}"
        )));
    }
    let n = lambda.len();
    let tail_len = (n as f64 * tail_fraction).floor() as usize;
    if tail_len < 10 {
        return Err(Error::WindowTooShort {
            needed: (10.0 / tail_fraction).ceil() as usize,
            got: n,
        });
    }
    let tail_start = n - tail_len;
    let tail: Vec<(Complex64, usize)> = lambda.values()[tail_start..]
        .iter()
        .map(|&z| (z, 1))
        .collect();
    // Merge near-duplicates first; linkage is exact up to this resolution.
    let merged = bucket(&tail, cluster_tol / 64.0);
    let locations: Vec<Complex64> = merged.iter().map(|p| p.0).collect();
    let labels = linkage(&locations, cluster_tol);

    let mut groups: BTreeMap<usize, Vec<(Complex64, usize)>> = BTreeMap::new();
    for (p, label) in merged.into_iter().zip(labels) {
        groups.entry(label).or_default().push(p);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .map(|members| {
            let size: usize = members.iter().map(|m| m.1).sum();
            let centroid =
                members.iter().map(|m| m.0 * m.1 as f64).sum::<Complex64>() / size as f64;
            let points = bucket(&members, cluster_tol / 2.0)
                .into_iter()
                .map(|p| p.0)
                .collect();
            Cluster {
                centroid,
                size,
                points,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.centroid
            .re
            .total_cmp(&b.centroid.re)
            .then(a.centroid.im.total_cmp(&b.centroid.im))
    });
    Ok(LimitPoints {
        tail_start,
        cluster_tol,
        clusters,
    })
}

/// Whether the graph joining points at distance `<= gap_tol` is connected.
pub fn connectedness_check(points: &[Complex64], gap_tol: f64) -> Result<bool> {
    if points.is_empty() {
        return Err(Error::Domain(
            "connectedness of an empty set is undefined".into(),
        ));
    }
    let labels = linkage(points, gap_tol);
    Ok(labels.iter().all(|&l| l == labels[0]))
}

/// Largest gap in arc length left by the projections of `points` onto the
/// path, counting both ends of the path.
pub fn path_coverage_gap(path: &SpectrumPath, points: &[Complex64]) -> f64 {
    let mut s: Vec<f64> = points.iter().map(|&z| path.project(z).0).collect();
    s.push(0.0);
    s.push(path.length());
    s.sort_by(f64::total_cmp);
    s.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::d1_seminorm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn convergent_sequence_has_one_cluster() {
        let l = EigenvalueSequence::from_real_fn(1000, |n| 2.0 + 1.0 / (n as f64 + 1.0)).unwrap();
        let lp = limit_points(&l, 0.5, 0.01).unwrap();
        assert_eq!(lp.clusters.len(), 1);
        assert!((lp.clusters[0].centroid - c(2.0, 0.0)).norm() < 0.01);
    }

    #[test]
    fn alternating_sequence_has_two_clusters() {
        let l =
            EigenvalueSequence::from_real_fn(100, |n| if n % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        let lp = limit_points(&l, 0.5, 0.5).unwrap();
        assert_eq!(lp.clusters.len(), 2);
        assert_eq!(lp.clusters[0].centroid, c(-1.0, 0.0));
        assert_eq!(lp.clusters[1].centroid, c(1.0, 0.0));
    }

    #[test]
    fn short_tail_rejected() {
        let l = EigenvalueSequence::from_real(&[0.0; 15]).unwrap();
        assert!(matches!(
            limit_points(&l, 0.5, 0.1),
            Err(Error::WindowTooShort { .. })
        ));
    }

    #[test]
    fn single_point_path_gives_constant() {
        let p = SpectrumPath::new(vec![c(0.5, -0.5)]).unwrap();
        let l = sequence_from_path(&p, 50, 1.0).unwrap();
        assert!(l.values().iter().all(|&z| z == c(0.5, -0.5)));
        assert!(connectedness_check(&limit_points(&l, 0.5, 0.1).unwrap().points(), 0.1).unwrap());
    }

    #[test]
    fn walk_respects_speed_and_bounces() {
        let p = SpectrumPath::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]).unwrap();
        let l = sequence_from_path(&p, 20_000, 1.0).unwrap();
        assert!(d1_seminorm(&l).unwrap().value <= 1.0);
        for z in l.values() {
            assert!(p.project(*z).1 < 1e-12);
        }
        // The tail from n = N/100 travels ln 100 > 2L, so it sweeps the
        // whole path.
        let lp = limit_points(&l, 0.99, 0.02).unwrap();
        assert!(path_coverage_gap(&p, &lp.points()) < 0.05);
    }

    #[test]
    fn connectedness_examples() {
        assert!(connectedness_check(&[c(0.0, 0.0)], 0.1).unwrap());
        assert!(!connectedness_check(&[c(0.0, 0.0), c(1.0, 0.0)], 0.5).unwrap());
        assert!(connectedness_check(&[], 0.5).is_err());
    }

    #[test]
    fn path_json_shape() {
        let p: SpectrumPath = serde_json::from_str(r#"{"vertices": [[0, 0], [1, 0]]}"#).unwrap();
        assert_eq!(p.length(), 1.0);
        assert!(serde_json::from_str::<SpectrumPath>(r#"{"vertices": []}"#).is_err());
        assert!(serde_json::from_str::<SpectrumPath>(r#"{"vertices": [[0, 0], [0, 0]]}"#).is_err());
    }
}

//! Core data types shared by every solver: instances, the unit-disk graph,
//! the BFS level partition around the source, and the broadcast-set
//! validator.
//!
//! All solvers work on the *normalized* instance: the source sits on the
//! y-axis and the transmission radius is 1. Normalization only translates
//! and scales, so point indices are stable and a set computed on the
//! normalized instance is a valid answer for the original one.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{BroadcastError, Result};

/// Largest strip width (for unit radius) where a disk always covers a
/// full-height slab of horizontal length 1.
pub const NARROW_LIMIT: f64 = 0.866_025_403_784_438_6;

/// Pairwise distances this close to the radius make an instance fragile.
pub const FRAGILE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }

    /// Closed unit-disk membership: `|self other| <= 1`.
    pub fn within_unit(self, other: Point) -> bool {
        self.dist2(other) <= 1.0
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Which half of the strip a point lies in, relative to the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `x < 0`
    Left,
    /// `x >= 0`
    Right,
}

impl Side {
    pub fn of(p: Point) -> Side {
        if p.x < 0.0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Maps an x-coordinate so that "outward" on this side is increasing.
    pub fn outward(self, x: f64) -> f64 {
        match self {
            Side::Left => -x,
            Side::Right => x,
        }
    }
}

/// Axis-aligned closed rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x0, self.y0),
            Point::new(self.x1, self.y0),
            Point::new(self.x0, self.y1),
            Point::new(self.x1, self.y1),
        ]
    }
}

/// The core area `[x-1/2, x+1/2] x [0, w]` of a point in a narrow strip of
/// width `w` (unit radius). It is contained in the point's disk.
pub fn core_region(p: Point, width: f64) -> Result<Rect> {
    if !(width > 0.0) || width > NARROW_LIMIT {
        return Err(BroadcastError::Contract(format!(
            "core area needs a narrow strip (0 < w <= sqrt(3)/2), got w = {width}"
        )));
    }
    Ok(Rect {
        x0: p.x - 0.5,
        x1: p.x + 0.5,
        y0: 0.0,
        y1: width,
    })
}

/// A broadcast instance: points in a horizontal strip `R x [0, w]`
/// (or the whole plane when `width` is `None`), a source index, the
/// common transmission radius and an optional hop bound.
#[derive(Debug, Clone, PartialEq)]
pub struct StripInstance {
    pub width: Option<f64>,
    pub radius: f64,
    pub points: Vec<Point>,
    pub source: usize,
    pub hops: Option<u32>,
}

impl StripInstance {
    /// Planar instance with unit radius.
    pub fn planar(points: Vec<Point>, source: usize) -> Self {
        StripInstance {
            width: None,
            radius: 1.0,
            points,
            source,
            hops: None,
        }
    }

    /// Strip instance of width `width` with unit radius.
    pub fn strip(points: Vec<Point>, width: f64, source: usize) -> Self {
        StripInstance {
            width: Some(width),
            ..StripInstance::planar(points, source)
        }
    }

    pub fn with_hops(mut self, hops: u32) -> Self {
        self.hops = Some(hops);
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(BroadcastError::Input("instance has no points".into()));
        }
        if self.source >= self.points.len() {
            return Err(BroadcastError::Input(format!(
                "source index {} out of range for {} points",
                self.source,
                self.points.len()
            )));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(BroadcastError::Input(format!(
                "radius must be positive and finite, got {}",
                self.radius
            )));
        }
        if let Some(w) = self.width {
            if !(w.is_finite() && w > 0.0) {
                return Err(BroadcastError::Input(format!(
                    "strip width must be positive and finite, got {w}"
                )));
            }
        }
        if self.hops == Some(0) {
            return Err(BroadcastError::Input("hop bound must be positive".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p.is_finite() {
                return Err(BroadcastError::Input(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
            if let Some(w) = self.width {
                if p.y < 0.0 || p.y > w {
                    return Err(BroadcastError::Input(format!(
                        "point {i} = {p} lies outside the strip [0, {w}]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Translate so the source is on the y-axis and scale to unit radius.
    pub fn normalized(&self) -> Result<StripInstance> {
        self.validate()?;
        let sx = self.points[self.source].x;
        let r = self.radius;
        let points = if r == 1.0 {
            self.points
                .iter()
                .map(|p| Point::new(p.x - sx, p.y))
                .collect()
        } else {
            self.points
                .iter()
                .map(|p| Point::new((p.x - sx) / r, p.y / r))
                .collect()
        };
        Ok(StripInstance {
            width: self.width.map(|w| w / r),
            radius: 1.0,
            points,
            source: self.source,
            hops: self.hops,
        })
    }

    /// Width in units of the radius, `None` for planar instances.
    pub fn unit_width(&self) -> Option<f64> {
        self.width.map(|w| w / self.radius)
    }

    pub fn is_narrow(&self) -> bool {
        matches!(self.unit_width(), Some(w) if w <= NARROW_LIMIT)
    }

    /// Pairs whose distance is within [`FRAGILE_EPS`] of the radius.
    pub fn fragile_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.points[i].dist(self.points[j]);
                if (d - self.radius).abs() < FRAGILE_EPS * self.radius.max(1.0) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn source_point(&self) -> Point {
        self.points[self.source]
    }
}

/// Index set of active points. Always sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BroadcastSet {
    active: Vec<usize>,
}

impl BroadcastSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut active: Vec<usize> = indices.into_iter().collect();
        active.sort_unstable();
        active.dedup();
        BroadcastSet { active }
    }

    pub fn indices(&self) -> &[usize] {
        &self.active
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.active.binary_search(&i).is_ok()
    }
}

impl fmt::Display for BroadcastSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.active.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Closed unit-disk graph over the normalized points.
#[derive(Debug, Clone)]
pub struct UnitDiskGraph {
    points: Vec<Point>,
    adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

impl UnitDiskGraph {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Normalized coordinates the graph was built from.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    pub fn adjacent(&self, p: usize, q: usize) -> bool {
        self.matrix[p * self.points.len() + q]
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adj[p]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Hop distances from `from` in the full graph.
    pub fn bfs(&self, from: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.bfs(0).iter().all(Option::is_some)
    }

    /// A shortest path from `a` to `b`, preferring smaller indices.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let dist = self.bfs(b);
        let mut d = dist[a]?;
        let mut path = vec![a];
        let mut cur = a;
        while d > 0 {
            cur = *self.adj[cur].iter().find(|&&v| dist[v] == Some(d - 1))?;
            path.push(cur);
            d -= 1;
        }
        Some(path)
    }

    /// Points whose x lies within 1/2 of the x-range spanned by the ends of
    /// `path` but that no disk of `path` covers. Always empty on narrow
    /// strips.
    pub fn path_coverage_gaps(&self, path: &[usize]) -> Vec<usize> {
        let (Some(&a), Some(&b)) = (path.first(), path.last()) else {
            return Vec::new();
        };
        let (xa, xb) = (self.points[a].x, self.points[b].x);
        let (lo, hi) = (xa.min(xb) - 0.5, xa.max(xb) + 0.5);
        (0..self.len())
            .filter(|&p| {
                let x = self.points[p].x;
                lo <= x && x <= hi && !path.iter().any(|&c| self.points[c].within_unit(self.points[p]))
            })
            .collect()
    }

    /// Multi-source BFS restricted to vertices accepted by `allowed`.
    pub fn bfs_from_set(&self, sources: &[usize], allowed: impl Fn(usize) -> bool) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() && allowed(v) {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Builds the closed unit-disk graph of the normalized instance.
pub fn build_graph(instance: &StripInstance) -> Result<UnitDiskGraph> {
    let norm = instance.normalized()?;
    Ok(graph_of_points(norm.points))
}

/// Unit-disk graph of points that are already in unit-radius coordinates.
pub fn graph_of_points(points: Vec<Point>) -> UnitDiskGraph {
    let n = points.len();
    let mut matrix = vec![false; n * n];
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if points[i].within_unit(points[j]) {
                matrix[i * n + j] = true;
                matrix[j * n + i] = true;
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    UnitDiskGraph { points, adj, matrix }
}

/// Hop-distance levels `L_0..L_t` around the source, each split by the
/// sign of the normalized x-coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPartition {
    pub level: Vec<Option<u32>>,
    pub levels: Vec<Vec<usize>>,
    pub minus: Vec<Vec<usize>>,
    pub plus: Vec<Vec<usize>>,
}

impl LevelPartition {
    /// Highest nonempty level `t`.
    pub fn max_level(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn unreachable(&self) -> Vec<usize> {
        (0..self.level.len())
            .filter(|&i| self.level[i].is_none())
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.level.iter().all(Option::is_some)
    }

    pub fn side(&self, i: usize, side: Side) -> &[usize] {
        let lists = match side {
            Side::Left => &self.minus,
            Side::Right => &self.plus,
        };
        lists.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Checks that neighboring levels overlap by at most 1/2 in x on each
    /// side. Returns the first offending level.
    pub fn check_overlap_bound(&self, points: &[Point]) -> std::result::Result<(), usize> {
        for i in 1..self.levels.len() {
            if !self.plus[i].is_empty() && !self.plus[i - 1].is_empty() {
                let prev_max = self.plus[i - 1]
                    .iter()
                    .map(|&p| points[p].x)
                    .fold(f64::NEG_INFINITY, f64::max);
                let cur_min = self.plus[i]
                    .iter()
                    .map(|&p| points[p].x)
                    .fold(f64::INFINITY, f64::min);
                if prev_max > cur_min + 0.5 {
                    return Err(i);
                }
            }
            if !self.minus[i].is_empty() && !self.minus[i - 1].is_empty() {
                let prev_min = self.minus[i - 1]
                    .iter()
                    .map(|&p| points[p].x)
                    .fold(f64::INFINITY, f64::min);
                let cur_max = self.minus[i]
                    .iter()
                    .map(|&p| points[p].x)
                    .fold(f64::NEG_INFINITY, f64::max);
                if prev_min < cur_max - 0.5 {
                    return Err(i);
                }
            }
        }
        Ok(())
    }
}

pub fn compute_levels(graph: &UnitDiskGraph, source: usize) -> LevelPartition {
    let level = graph.bfs(source);
    let t = level.iter().flatten().copied().max().unwrap_or(0) as usize;
    let mut levels = vec![Vec::new(); t + 1];
    let mut minus = vec![Vec::new(); t + 1];
    let mut plus = vec![Vec::new(); t + 1];
    for (p, l) in level.iter().enumerate() {
        if let Some(l) = *l {
            let l = l as usize;
            levels[l].push(p);
            match Side::of(graph.point(p)) {
                Side::Left => minus[l].push(p),
                Side::Right => plus[l].push(p),
            }
        }
    }
    LevelPartition {
        level,
        levels,
        minus,
        plus,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub is_dominating: bool,
    pub is_connected: bool,
    /// Largest number of hops any point needs, `None` when some point
    /// cannot be reached through active points at all.
    pub max_hops_needed: Option<u32>,
    pub hop_bound: Option<u32>,
    pub undominated: Vec<usize>,
    /// Active points not connected to the source through active points.
    pub disconnected: Vec<usize>,
    /// Points needing more hops than the bound.
    pub over_hops: Vec<usize>,
}

impl ValidationReport {
    pub fn within_hops(&self) -> bool {
        match self.hop_bound {
            None => true,
            Some(h) => matches!(self.max_hops_needed, Some(m) if m <= h),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.is_dominating && self.is_connected && self.within_hops()
    }

    pub fn witnesses(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self
            .undominated
            .iter()
            .chain(&self.disconnected)
            .chain(&self.over_hops)
            .copied()
            .collect();
        w.sort_unstable();
        w.dedup();
        w
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hops = match self.max_hops_needed {
            Some(h) => h.to_string(),
            None => "inf".into(),
        };
        write!(
            f,
            "dominating={} connected={} max_hops={}",
            self.is_dominating, self.is_connected, hops
        )?;
        if let Some(h) = self.hop_bound {
            write!(f, " hop_bound={} within={}", h, self.within_hops())?;
        }
        let w = self.witnesses();
        if !w.is_empty() {
            write!(f, " witnesses={w:?}")?;
        }
        Ok(())
    }
}

/// Validates `candidate` against the instance, using the instance's own hop
/// bound.
pub fn validate_broadcast(instance: &StripInstance, candidate: &BroadcastSet) -> Result<ValidationReport> {
    let graph = build_graph(instance)?;
    validate_in_graph(&graph, instance.source, candidate, instance.hops)
}

/// Validation against a prebuilt graph with an explicit hop bound.
pub fn validate_in_graph(
    graph: &UnitDiskGraph,
    source: usize,
    candidate: &BroadcastSet,
    hops: Option<u32>,
) -> Result<ValidationReport> {
    let n = graph.len();
    if let Some(&bad) = candidate.indices().iter().find(|&&i| i >= n) {
        return Err(BroadcastError::Input(format!(
            "candidate index {bad} out of range for {n} points"
        )));
    }
    if !candidate.contains(source) {
        return Err(BroadcastError::Input(format!(
            "candidate {candidate} does not contain the source {source}"
        )));
    }
    let mut active = vec![false; n];
    for &i in candidate.indices() {
        active[i] = true;
    }

    let undominated: Vec<usize> = (0..n)
        .filter(|&p| !active[p] && !graph.neighbors(p).iter().any(|&q| active[q]))
        .collect();

    // Hop distance through active vertices only.
    let inner = graph.bfs_from_set(&[source], |v| active[v]);
    let disconnected: Vec<usize> = candidate
        .indices()
        .iter()
        .copied()
        .filter(|&p| inner[p].is_none())
        .collect();

    let mut needed = vec![None; n];
    for p in 0..n {
        needed[p] = if active[p] {
            inner[p]
        } else {
            graph
                .neighbors(p)
                .iter()
                .filter(|&&q| active[q])
                .filter_map(|&q| inner[q])
                .min()
                .map(|d| d + 1)
        };
    }
    let max_hops_needed = needed
        .iter()
        .try_fold(0u32, |acc, d| d.map(|d| acc.max(d)));
    let over_hops = match hops {
        Some(h) => (0..n)
            .filter(|&p| needed[p].is_none_or(|d| d > h))
            .collect(),
        None => Vec::new(),
    };

    Ok(ValidationReport {
        is_dominating: undominated.is_empty(),
        is_connected: disconnected.is_empty(),
        max_hops_needed,
        hop_bound: hops,
        undominated,
        disconnected,
        over_hops,
    })
}

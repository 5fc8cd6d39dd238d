//! Minimum 2-hop broadcast in the plane.
//!
//! Every active point other than the source lies in the source disk, so the
//! problem becomes covering the outer points `Q` with as few disks as
//! possible. `Q` is ordered counterclockwise around the source and a
//! cover is assembled from circular intervals.

use std::f64::consts::TAU;

use crate::error::{BroadcastError, Result};
use crate::model::{build_graph, BroadcastSet, Point, StripInstance, UnitDiskGraph};

/// Outer points in angular order and the disks that may cover them.
#[derive(Debug, Clone)]
pub struct AngularInstance {
    pub source: usize,
    /// `q_0..q_{m-1}` as point indices, counterclockwise from angle 0.
    pub q: Vec<usize>,
    /// Candidate centers as point indices.
    pub delta: Vec<usize>,
    /// `covers[d][k]`: disk `delta[d]` contains `q_k`.
    pub covers: Vec<Vec<bool>>,
    /// `by_point[k]`: positions in `delta` of the disks containing `q_k`.
    pub by_point: Vec<Vec<usize>>,
}

impl AngularInstance {
    pub fn m(&self) -> usize {
        self.q.len()
    }

    fn covered(&self, d: usize, k: usize) -> bool {
        self.covers[d][k % self.m()]
    }

    /// Number of consecutive points from `i` covered by disk `d`.
    fn run(&self, i: usize, d: usize) -> usize {
        (0..self.m()).take_while(|&t| self.covered(d, i + t)).count()
    }
}

fn angle(s: Point, p: Point) -> f64 {
    let a = (p.y - s.y).atan2(p.x - s.x);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn angular_from_graph(graph: &UnitDiskGraph, s: usize) -> Result<AngularInstance> {
    let pts = graph.points();
    let sp = pts[s];
    let mut q: Vec<usize> = (0..graph.len())
        .filter(|&p| p != s && !graph.adjacent(s, p))
        .collect();
    q.sort_by(|&a, &b| {
        angle(sp, pts[a])
            .total_cmp(&angle(sp, pts[b]))
            .then(sp.dist2(pts[a]).total_cmp(&sp.dist2(pts[b])))
            .then(a.cmp(&b))
    });
    let delta: Vec<usize> = graph
        .neighbors(s)
        .iter()
        .copied()
        .filter(|&p| q.iter().any(|&t| graph.adjacent(p, t)))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let covers: Vec<Vec<bool>> = delta
        .iter()
        .map(|&p| q.iter().map(|&t| graph.adjacent(p, t)).collect())
        .collect();
    let by_point: Vec<Vec<usize>> = (0..q.len())
        .map(|k| (0..delta.len()).filter(|&d| covers[d][k]).collect())
        .collect();
    if let Some(k) = by_point.iter().position(Vec::is_empty) {
        return Err(BroadcastError::Infeasible(format!(
            "point {} cannot be reached within two hops",
            q[k]
        )));
    }
    Ok(AngularInstance {
        source: s,
        q,
        delta,
        covers,
        by_point,
    })
}

pub fn angular_order(instance: &StripInstance) -> Result<AngularInstance> {
    let graph = build_graph(instance)?;
    angular_from_graph(&graph, instance.source)
}

fn check_index(ai: &AngularInstance, i: usize) -> Result<()> {
    if i >= ai.m() {
        return Err(BroadcastError::Input(format!(
            "angular index {i} out of range for {} points",
            ai.m()
        )));
    }
    Ok(())
}

/// First index after `i` (cyclically) not covered by disk `d`, or by the
/// best disk containing `q_i` when `d` is `None`.
pub fn compute_next(ai: &AngularInstance, i: usize, d: Option<usize>) -> Result<usize> {
    check_index(ai, i)?;
    let run = match d {
        Some(d) => ai.run(i, d),
        None => ai.by_point[i].iter().map(|&d| ai.run(i, d)).max().unwrap_or(0),
    };
    if run >= ai.m() {
        return Err(BroadcastError::Contract(
            "a single disk covers every outer point; small solutions were not ruled out".into(),
        ));
    }
    Ok((i + run) % ai.m())
}

/// Offsets `(a-1, b+1)` relative to `i` for every maximal run `[a, b]` of
/// points covered by `d` inside the first `len` points from `i`, excluding
/// the run starting at `i`.
fn runs_after_gap(ai: &AngularInstance, i: usize, len: usize, d: usize) -> Vec<(usize, usize)> {
    let first = ai.run(i, d).min(len);
    let mut out = Vec::new();
    let mut t = first;
    while t < len {
        if ai.covered(d, i + t) {
            let a = t;
            while t < len && ai.covered(d, i + t) {
                t += 1;
            }
            out.push((a - 1, t));
        } else {
            t += 1;
        }
    }
    out
}

/// The pairs `(a-1, b+1)` as point positions for the runs of `d` inside
/// `[i, j]` after its first gap. A run ending at `j` yields `b+1 = j+1`.
pub fn interval_set(ai: &AngularInstance, i: usize, j: usize, d: usize) -> Result<Vec<(usize, usize)>> {
    check_index(ai, i)?;
    check_index(ai, j)?;
    let m = ai.m();
    let len = (j + m - i) % m + 1;
    Ok(runs_after_gap(ai, i, len, d)
        .into_iter()
        .map(|(a, b)| ((i + a) % m, (i + b) % m))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    Single(usize),
    Next(usize),
    Split { d: usize, a: usize, b: usize },
}

/// `A(i, len)`: fewest candidate disks covering the `len` points from `i`.
#[derive(Debug, Clone)]
pub struct CoverTable {
    m: usize,
    value: Vec<u32>,
    choice: Vec<Option<Choice>>,
}

impl CoverTable {
    fn at(&self, i: usize, len: usize) -> u32 {
        if len == 0 {
            0
        } else {
            self.value[(i % self.m) * (self.m + 1) + len]
        }
    }

    /// `A(i, j)` over the circular interval `[i, j]`.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.at(i, (j + self.m - i) % self.m + 1)
    }

    /// Cover of the `len` points from `i`, as length-`m` span when `len` is
    /// `m`.
    pub fn get_len(&self, i: usize, len: usize) -> u32 {
        self.at(i, len)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn witness(&self, ai: &AngularInstance, i: usize, len: usize, out: &mut Vec<usize>) {
        if len == 0 {
            return;
        }
        let i = i % self.m;
        match self.choice[i * (self.m + 1) + len].expect("filled cell") {
            Choice::Single(d) => out.push(ai.delta[d]),
            Choice::Next(d) => {
                out.push(ai.delta[d]);
                let run = ai.run(i, d);
                self.witness(ai, i + run, len - run, out);
            }
            Choice::Split { d, a, b } => {
                out.push(ai.delta[d]);
                let run = ai.run(i, d);
                self.witness(ai, i + run, a + 1 - run, out);
                self.witness(ai, i + b, len - b, out);
            }
        }
    }
}

/// Right-hand side of the recurrence for one cell.
fn evaluate(ai: &AngularInstance, t: &CoverTable, i: usize, len: usize) -> (u32, Choice) {
    let m = ai.m();
    let (best_d, best_run) = ai.by_point[i]
        .iter()
        .map(|&d| (d, ai.run(i, d)))
        .fold((usize::MAX, 0), |acc, (d, r)| if r > acc.1 { (d, r) } else { acc });
    if best_run >= len {
        return (1, Choice::Single(best_d));
    }
    let mut best = (1 + t.at((i + best_run) % m, len - best_run), Choice::Next(best_d));
    for &d in &ai.by_point[i] {
        let run = ai.run(i, d);
        for (a, b) in runs_after_gap(ai, i, len, d) {
            let v = 1 + t.at((i + run) % m, a + 1 - run) + t.at((i + b) % m, len - b);
            if v < best.0 {
                best = (v, Choice::Split { d, a, b });
            }
        }
    }
    best
}

pub fn cover_dp(ai: &AngularInstance) -> Result<CoverTable> {
    let m = ai.m();
    for i in 0..m {
        compute_next(ai, i, None)?;
    }
    let mut t = CoverTable {
        m,
        value: vec![0; m * (m + 1)],
        choice: vec![None; m * (m + 1)],
    };
    for len in 1..=m {
        for i in 0..m {
            let (v, c) = evaluate(ai, &t, i, len);
            t.value[i * (m + 1) + len] = v;
            t.choice[i * (m + 1) + len] = Some(c);
        }
    }
    Ok(t)
}

/// Cells whose stored value differs from a fresh evaluation of the
/// recurrence. Empty for a correctly filled table.
pub fn recurrence_violations(ai: &AngularInstance, t: &CoverTable) -> Vec<(usize, usize)> {
    let m = ai.m();
    let mut bad = Vec::new();
    for len in 1..=m {
        for i in 0..m {
            if evaluate(ai, t, i, len).0 != t.at(i, len) {
                bad.push((i, len));
            }
        }
    }
    bad
}

pub fn solve_two_hop(instance: &StripInstance) -> Result<BroadcastSet> {
    let graph = build_graph(instance)?;
    solve_in_graph(&graph, instance.source)
}

pub(crate) fn solve_in_graph(graph: &UnitDiskGraph, s: usize) -> Result<BroadcastSet> {
    let ai = angular_from_graph(graph, s)?;
    let m = ai.m();
    if m == 0 {
        return Ok(BroadcastSet::new([s]));
    }
    if let Some(d) = (0..ai.delta.len()).find(|&d| ai.covers[d].iter().all(|&c| c)) {
        return Ok(BroadcastSet::new([s, ai.delta[d]]));
    }
    let t = cover_dp(&ai)?;
    let mut best = (t.at(0, m), 0, m);
    for i in 0..m {
        if t.at(i, m) < best.0 {
            best = (t.at(i, m), i, m);
        }
        for l in 1..m {
            let v = t.at(i, l) + t.at(i + l, m - l);
            if v < best.0 {
                best = (v, i, l);
            }
        }
    }
    let (_, i, l) = best;
    let mut centers = vec![s];
    t.witness(&ai, i, l, &mut centers);
    t.witness(&ai, i + l, m - l, &mut centers);
    Ok(BroadcastSet::new(centers))
}

/// Checks on a 2-hop solution that back the correctness of the recurrence.
/// Not used while solving.
pub mod instrument {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exit parameter of the ray `s + t*u` from the union of the disks in
    /// `active`, and the disk whose boundary holds the exit point. Ties go
    /// to the smallest index.
    pub fn ray_exit(pts: &[Point], s: usize, active: &[usize], dir: Point) -> Option<(f64, usize)> {
        let sp = pts[s];
        let norm = (dir.x * dir.x + dir.y * dir.y).sqrt();
        let (ux, uy) = (dir.x / norm, dir.y / norm);
        let mut spans: Vec<(f64, f64, usize)> = active
            .iter()
            .filter_map(|&p| {
                let (cx, cy) = (pts[p].x - sp.x, pts[p].y - sp.y);
                let b = cx * ux + cy * uy;
                let c = cx * cx + cy * cy - 1.0;
                let disc = b * b - c;
                (disc >= 0.0).then(|| (b - disc.sqrt(), b + disc.sqrt(), p))
            })
            .collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reach = 0.0f64;
        let mut started = false;
        for &(t0, t1, _) in &spans {
            if t0 <= reach + 1e-12 {
                started |= t0 <= 0.0 + 1e-12;
                reach = reach.max(t1);
            }
        }
        if !started {
            return None;
        }
        let owner = spans
            .iter()
            .filter(|&&(t0, t1, _)| t0 <= reach && (t1 - reach).abs() <= 1e-12)
            .map(|&(_, _, p)| p)
            .min()?;
        Some((reach, owner))
    }

    /// The boundary predecessor sequence of `active` over the outer points
    /// in angular order, with runs of equal entries merged (cyclically).
    pub fn sigma(instance: &StripInstance, active: &BroadcastSet) -> Result<Vec<usize>> {
        let ai = angular_order(instance)?;
        let norm = instance.normalized()?;
        let pts = &norm.points;
        let s = instance.source;
        let mut seq: Vec<usize> = Vec::new();
        for &q in &ai.q {
            let dir = Point::new(pts[q].x - pts[s].x, pts[q].y - pts[s].y);
            let (_, p) = ray_exit(pts, s, active.indices(), dir).ok_or_else(|| {
                BroadcastError::Contract(format!("ray towards {q} misses the active union"))
            })?;
            if seq.last() != Some(&p) {
                seq.push(p);
            }
        }
        while seq.len() > 1 && seq.first() == seq.last() {
            seq.pop();
        }
        Ok(seq)
    }

    /// Largest number of occurrences of a point in a merged sequence.
    pub fn max_occurrences(seq: &[usize]) -> usize {
        seq.iter()
            .map(|p| seq.iter().filter(|&q| q == p).count())
            .max()
            .unwrap_or(0)
    }

    /// Whether some rotation of `seq` contains `p .. p' .. p .. p'` with
    /// `p != p'`.
    pub fn has_alternation(seq: &[usize]) -> bool {
        let n = seq.len();
        let mut distinct: Vec<usize> = seq.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        for &p in &distinct {
            for &p2 in distinct.iter().filter(|&&x| x != p) {
                for r in 0..n {
                    let pattern = [p, p2, p, p2];
                    let mut k = 0;
                    for t in 0..n {
                        if seq[(r + t) % n] == pattern[k] {
                            k += 1;
                            if k == 4 {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    /// Samples points of the union of the active disks and checks that the
    /// segment from the source stays inside the union. Returns the number of
    /// failing samples.
    pub fn star_shape_failures(instance: &StripInstance, active: &BroadcastSet, samples: usize, seed: u64) -> Result<usize> {
        let norm = instance.normalized()?;
        let pts = &norm.points;
        let s = pts[instance.source];
        let act: Vec<Point> = active.indices().iter().map(|&i| pts[i]).collect();
        let inside = |z: Point| act.iter().any(|c| c.dist2(z) <= 1.0 + 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fails = 0;
        for _ in 0..samples {
            let c = act[rng.gen_range(0..act.len())];
            let a = rng.gen_range(0.0..TAU);
            let r = rng.gen_range(0.0f64..=1.0).sqrt();
            let z = Point::new(c.x + r * a.cos(), c.y + r * a.sin());
            let ok = (0..=64).all(|k| {
                let t = k as f64 / 64.0;
                inside(Point::new(s.x + t * (z.x - s.x), s.y + t * (z.y - s.y)))
            });
            fails += usize::from(!ok);
        }
        Ok(fails)
    }
}

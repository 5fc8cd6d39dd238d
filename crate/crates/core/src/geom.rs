//! Membership queries against unions and intersections of unit disks, and
//! the prefix/suffix search tree used to detect bidirectional solutions.

use std::collections::HashMap;

use crate::error::{BroadcastError, Result};
use crate::model::{Point, Rect, Side};

/// How membership queries are answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MembershipStrategy {
    /// Compare every query against every center.
    #[default]
    Pairwise,
    /// Grid buckets for unions, convex hull of the centers for
    /// intersections.
    Accelerated,
}

/// Positions in `queries` lying in at least one unit disk centered at a
/// point of `centers`.
pub fn members_in_union(centers: &[Point], queries: &[Point]) -> Result<Vec<usize>> {
    members_in_union_with(centers, queries, MembershipStrategy::Pairwise)
}

/// Positions in `queries` lying in every unit disk centered at a point of
/// `centers`.
pub fn members_in_intersection(centers: &[Point], queries: &[Point]) -> Result<Vec<usize>> {
    members_in_intersection_with(centers, queries, MembershipStrategy::Pairwise)
}

pub fn members_in_union_with(
    centers: &[Point],
    queries: &[Point],
    strategy: MembershipStrategy,
) -> Result<Vec<usize>> {
    if centers.is_empty() {
        return Err(BroadcastError::Input("union of an empty disk family".into()));
    }
    Ok(match strategy {
        MembershipStrategy::Pairwise => (0..queries.len())
            .filter(|&i| centers.iter().any(|c| c.within_unit(queries[i])))
            .collect(),
        MembershipStrategy::Accelerated => union_by_grid(centers, queries),
    })
}

pub fn members_in_intersection_with(
    centers: &[Point],
    queries: &[Point],
    strategy: MembershipStrategy,
) -> Result<Vec<usize>> {
    if centers.is_empty() {
        return Err(BroadcastError::Input(
            "intersection of an empty disk family".into(),
        ));
    }
    Ok(match strategy {
        MembershipStrategy::Pairwise => (0..queries.len())
            .filter(|&i| centers.iter().all(|c| c.within_unit(queries[i])))
            .collect(),
        MembershipStrategy::Accelerated => {
            // The farthest center from any query is a hull vertex.
            let hull = convex_hull(centers);
            (0..queries.len())
                .filter(|&i| hull.iter().all(|c| c.within_unit(queries[i])))
                .collect()
        }
    })
}

fn cell_of(p: Point) -> (i64, i64) {
    (p.x.floor() as i64, p.y.floor() as i64)
}

fn union_by_grid(centers: &[Point], queries: &[Point]) -> Vec<usize> {
    let mut grid: HashMap<(i64, i64), Vec<Point>> = HashMap::new();
    for &c in centers {
        grid.entry(cell_of(c)).or_default().push(c);
    }
    (0..queries.len())
        .filter(|&i| {
            let q = queries[i];
            let (cx, cy) = cell_of(q);
            (-1..=1).any(|dx| {
                (-1..=1).any(|dy| {
                    grid.get(&(cx + dx, cy + dy))
                        .is_some_and(|cell| cell.iter().any(|c| c.within_unit(q)))
                })
            })
        })
        .collect()
}

/// Andrew's monotone chain. Collinear points are dropped, duplicates kept
/// once.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let chain = |iter: &mut dyn Iterator<Item = Point>| {
        let mut h: Vec<Point> = Vec::new();
        for p in iter {
            while h.len() >= 2 && cross(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
        h
    };
    let mut hull = chain(&mut pts.iter().copied());
    hull.extend(chain(&mut pts.iter().rev().copied()));
    hull
}

/// The right half of the unit circle around `center`, as a function of y.
fn right_arc(center: Point, y: f64) -> f64 {
    let dy = y - center.y;
    let t = 1.0 - dy * dy;
    if t < 0.0 {
        f64::NEG_INFINITY
    } else {
        center.x + t.sqrt()
    }
}

/// Lower envelope of right arcs over `[y0, y1]`: segment `i` spans
/// `[starts[i], starts[i+1])` and is bounded by the arc of disk `arcs[i]`.
#[derive(Debug, Clone, PartialEq)]
struct Envelope {
    starts: Vec<f64>,
    arcs: Vec<usize>,
}

/// y-values in the open interval `(lo, hi)` where the right arcs of `a` and
/// `b` cross.
fn arc_crossings(a: Point, b: Point, lo: f64, hi: f64) -> Vec<f64> {
    let d2 = a.dist2(b);
    if d2 == 0.0 || d2 > 4.0 {
        return Vec::new();
    }
    let d = d2.sqrt();
    let h = (1.0 - d2 / 4.0).max(0.0).sqrt();
    let mx = (a.x + b.x) / 2.0;
    let my = (a.y + b.y) / 2.0;
    let ux = (b.x - a.x) / d;
    let uy = (b.y - a.y) / d;
    let mut out = Vec::new();
    for sign in [-1.0, 1.0] {
        let px = mx - sign * h * uy;
        let py = my + sign * h * ux;
        if py > lo && py < hi && px >= a.x.min(b.x) {
            out.push(py);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

impl Envelope {
    fn single(arc: usize, y0: f64) -> Self {
        Envelope {
            starts: vec![y0],
            arcs: vec![arc],
        }
    }

    fn locate(&self, y: f64) -> usize {
        self.starts.partition_point(|&s| s <= y).saturating_sub(1)
    }

    fn merge(&self, other: &Envelope, pts: &[Point], y1: f64) -> Envelope {
        let mut cuts: Vec<f64> = self.starts.iter().chain(&other.starts).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut starts = Vec::new();
        let mut arcs: Vec<usize> = Vec::new();
        let push = |y: f64, arc: usize, starts: &mut Vec<f64>, arcs: &mut Vec<usize>| {
            if arcs.last() != Some(&arc) {
                starts.push(y);
                arcs.push(arc);
            }
        };
        for (k, &lo) in cuts.iter().enumerate() {
            let hi = cuts.get(k + 1).copied().unwrap_or(y1);
            let a = self.arcs[self.locate(lo)];
            let b = other.arcs[other.locate(lo)];
            let mut sub = vec![lo];
            if a != b {
                sub.extend(arc_crossings(pts[a], pts[b], lo, hi));
            }
            for (t, &slo) in sub.iter().enumerate() {
                let shi = sub.get(t + 1).copied().unwrap_or(hi);
                let mid = if shi > slo { (slo + shi) / 2.0 } else { slo };
                let pick = if right_arc(pts[a], mid) <= right_arc(pts[b], mid) {
                    a
                } else {
                    b
                };
                push(slo, pick, &mut starts, &mut arcs);
            }
        }
        Envelope { starts, arcs }
    }

    /// Closed containment of `p` in every disk of the subtree, assuming
    /// `p` lies in the core rectangle. The arcs of the segment holding
    /// `p.y` and its neighbors are tested with the exact disk predicate.
    fn contains(&self, p: Point, pts: &[Point]) -> bool {
        let k = self.locate(p.y);
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(self.arcs.len() - 1);
        (lo..=hi).all(|j| pts[self.arcs[j]].within_unit(p))
    }
}

#[derive(Debug, Clone)]
struct PrefixTree {
    /// Points in the (possibly mirrored) frame, in tree order.
    pts: Vec<Point>,
    /// Heap-ordered nodes over leaf ranges; `None` past the last leaf.
    nodes: Vec<Option<(usize, usize, Envelope)>>,
}

impl PrefixTree {
    fn build(pts: Vec<Point>, core: Rect) -> Self {
        let k = pts.len();
        let mut tree = PrefixTree {
            pts,
            nodes: Vec::new(),
        };
        if k > 0 {
            tree.nodes = vec![None; 4 * k];
            tree.fill(1, 0, k, core);
        }
        tree
    }

    fn fill(&mut self, node: usize, lo: usize, hi: usize, core: Rect) -> Envelope {
        let env = if hi - lo == 1 {
            Envelope::single(lo, core.y0)
        } else {
            let mid = (lo + hi) / 2;
            let l = self.fill(2 * node, lo, mid, core);
            let r = self.fill(2 * node + 1, mid, hi, core);
            l.merge(&r, &self.pts, core.y1)
        };
        self.nodes[node] = Some((lo, hi, env.clone()));
        env
    }

    /// Length of the longest prefix covered by the unit disk around `p`.
    fn covered_prefix(&self, p: Point) -> usize {
        if self.pts.is_empty() {
            return 0;
        }
        let mut node = 1;
        loop {
            let (lo, hi, _) = self.nodes[node].as_ref().unwrap();
            if hi - lo == 1 {
                return if self.pts[*lo].within_unit(p) { lo + 1 } else { *lo };
            }
            let (_, _, left) = self.nodes[2 * node].as_ref().unwrap();
            node = if left.contains(p, &self.pts) {
                2 * node + 1
            } else {
                2 * node
            };
        }
    }

    fn check_node_contains(&self, node: usize, p: Point) -> Option<bool> {
        self.nodes
            .get(node)?
            .as_ref()
            .map(|(_, _, env)| env.contains(p, &self.pts))
    }
}

/// Prefix and suffix coverage of the y-sorted outer points of one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZValues {
    /// Largest `i` such that `u_1..u_i` all lie in the disk.
    pub z_le: usize,
    /// Smallest `i` such that `u_{i+1}..u_k` all lie in the disk.
    pub z_gt: usize,
}

/// Search trees over the points of one side, sorted by increasing y with
/// index tie-break. Queries are restricted to the core area of the source.
#[derive(Debug, Clone)]
pub struct ZStructure {
    side: Side,
    core: Rect,
    order: Vec<usize>,
    prefix: PrefixTree,
    suffix: PrefixTree,
}

impl ZStructure {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Original indices `u_1..u_k`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    fn to_frame(&self, p: Point) -> Point {
        Point::new(-self.side.outward(p.x), p.y)
    }

    /// Whether `p` lies in the stored region of heap node `node` of the
    /// prefix tree (test instrumentation).
    pub fn node_contains(&self, node: usize, p: Point) -> Option<bool> {
        if !self.core.contains(p) {
            return Some(false);
        }
        self.prefix.check_node_contains(node, self.to_frame(p))
    }

    /// Leaf range `[lo, hi)` of heap node `node` of the prefix tree.
    pub fn node_range(&self, node: usize) -> Option<(usize, usize)> {
        self.prefix
            .nodes
            .get(node)?
            .as_ref()
            .map(|(lo, hi, _)| (*lo, *hi))
    }
}

/// Builds the search structure for the outer points `idx` (indices into
/// `points`) on `side`. `core` is the core area of the source; `points` are
/// normalized so the source has x = 0.
pub fn build_z_structure(points: &[Point], idx: &[usize], side: Side, core: Rect) -> ZStructure {
    let mut order = idx.to_vec();
    order.sort_by(|&a, &b| points[a].y.total_cmp(&points[b].y).then(a.cmp(&b)));
    // Left points keep their frame; right points are mirrored so that every
    // disk bounds the region by its right arc.
    let frame = |p: Point| Point::new(-side.outward(p.x), p.y);
    let fwd: Vec<Point> = order.iter().map(|&i| frame(points[i])).collect();
    let rev: Vec<Point> = fwd.iter().rev().copied().collect();
    ZStructure {
        side,
        core,
        order,
        prefix: PrefixTree::build(fwd, core),
        suffix: PrefixTree::build(rev, core),
    }
}

pub fn query_z(zs: &ZStructure, p: Point) -> Result<ZValues> {
    if !zs.core.contains(p) {
        return Err(BroadcastError::Contract(format!(
            "z-query point {p} lies outside the core area of the source"
        )));
    }
    let q = zs.to_frame(p);
    let k = zs.order.len();
    Ok(ZValues {
        z_le: zs.prefix.covered_prefix(q),
        z_gt: k - zs.suffix.covered_prefix(q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::core_region;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn union_single_center() {
        let got = members_in_union(&[pt(0.0, 0.0)], &[pt(0.5, 0.0), pt(2.0, 0.0)]).unwrap();
        assert_eq!(got, vec![0]);
    }

    #[test]
    fn union_of_queries_subset_of_centers() {
        let p = vec![pt(0.0, 0.0), pt(5.0, 1.0), pt(-3.0, 2.0)];
        let got = members_in_union(&p, &p[..2]).unwrap();
        assert_eq!(got, vec![0, 1]);
    }

    #[test]
    fn intersection_midpoint() {
        let got = members_in_intersection(&[pt(0.0, 0.0), pt(1.0, 0.0)], &[pt(0.5, 0.0)]).unwrap();
        assert_eq!(got, vec![0]);
    }

    #[test]
    fn intersection_of_disjoint_disks_is_empty() {
        let q: Vec<Point> = (0..20).map(|i| pt(i as f64 * 0.15 - 0.2, 0.0)).collect();
        let got = members_in_intersection(&[pt(0.0, 0.0), pt(2.5, 0.0)], &q).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn empty_family_is_input_error() {
        assert!(members_in_union(&[], &[pt(0.0, 0.0)]).is_err());
        assert!(members_in_intersection(&[], &[pt(0.0, 0.0)]).is_err());
    }

    fn brute_union(p: &[Point], q: &[Point]) -> Vec<usize> {
        (0..q.len()).filter(|&i| p.iter().any(|c| c.dist2(q[i]) <= 1.0)).collect()
    }

    fn brute_inter(p: &[Point], q: &[Point]) -> Vec<usize> {
        (0..q.len()).filter(|&i| p.iter().all(|c| c.dist2(q[i]) <= 1.0)).collect()
    }

    fn cloud(rng: &mut ChaCha8Rng, n: usize, span: f64) -> Vec<Point> {
        (0..n)
            .map(|_| pt(rng.gen_range(-span..span), rng.gen_range(-span..span)))
            .collect()
    }

    #[test]
    fn random_fifty_by_fifty_matches_pairwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for span in [0.6, 1.5, 3.0] {
            let p = cloud(&mut rng, 50, span);
            let q = cloud(&mut rng, 50, span);
            for s in [MembershipStrategy::Pairwise, MembershipStrategy::Accelerated] {
                assert_eq!(members_in_union_with(&p, &q, s).unwrap(), brute_union(&p, &q));
                assert_eq!(members_in_intersection_with(&p, &q, s).unwrap(), brute_inter(&p, &q));
            }
        }
    }

    proptest! {
        #[test]
        fn membership_matches_pairwise(
            p in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..60),
            q in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..60),
            scale in 0.1f64..1.0,
        ) {
            let p: Vec<Point> = p.into_iter().map(|(x, y)| pt(x * scale, y * scale)).collect();
            let q: Vec<Point> = q.into_iter().map(|(x, y)| pt(x * scale, y * scale)).collect();
            for s in [MembershipStrategy::Pairwise, MembershipStrategy::Accelerated] {
                prop_assert_eq!(members_in_union_with(&p, &q, s).unwrap(), brute_union(&p, &q));
                prop_assert_eq!(members_in_intersection_with(&p, &q, s).unwrap(), brute_inter(&p, &q));
            }
        }
    }

    /// Outer points on `side` of a narrow strip of width `w`, at x-distance
    /// in (1, 1.5) from the source.
    fn outer(rng: &mut ChaCha8Rng, k: usize, w: f64, side: Side) -> Vec<Point> {
        (0..k)
            .map(|_| {
                let x = rng.gen_range(1.0001..1.45);
                let x = match side {
                    Side::Left => -x,
                    Side::Right => x,
                };
                pt(x, rng.gen_range(0.0..=w))
            })
            .collect()
    }

    fn direct_z(pts: &[Point], zs: &ZStructure, p: Point) -> ZValues {
        let u: Vec<Point> = zs.order().iter().map(|&i| pts[i]).collect();
        let k = u.len();
        let z_le = (0..=k).rev().find(|&i| u[..i].iter().all(|c| c.within_unit(p))).unwrap();
        let z_gt = (0..=k).find(|&i| u[i..].iter().all(|c| c.within_unit(p))).unwrap();
        ZValues { z_le, z_gt }
    }

    #[test]
    fn empty_structure_queries_zero() {
        let core = core_region(pt(0.0, 0.4), 0.8).unwrap();
        let zs = build_z_structure(&[], &[], Side::Left, core);
        assert_eq!(query_z(&zs, pt(0.0, 0.4)).unwrap(), ZValues { z_le: 0, z_gt: 0 });
    }

    #[test]
    fn single_point_region_is_core_and_disk() {
        let w = 0.8;
        let core = core_region(pt(0.0, 0.0), w).unwrap();
        let pts = vec![pt(-1.2, 0.3)];
        let zs = build_z_structure(&pts, &[0], Side::Left, core);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = pt(rng.gen_range(-0.7..0.7), rng.gen_range(-0.1..0.9));
            let expect = core.contains(p) && pts[0].within_unit(p);
            assert_eq!(zs.node_contains(1, p), Some(expect));
        }
    }

    #[test]
    fn covering_all_and_none() {
        let w = 0.5;
        let core = core_region(pt(0.0, 0.0), w).unwrap();
        let pts = vec![pt(-1.1, 0.1), pt(-1.2, 0.4), pt(-1.05, 0.2)];
        let zs = build_z_structure(&pts, &[0, 1, 2], Side::Left, core);
        assert_eq!(query_z(&zs, pt(-0.4, 0.25)).unwrap(), ZValues { z_le: 3, z_gt: 0 });
        assert_eq!(query_z(&zs, pt(0.45, 0.0)).unwrap(), ZValues { z_le: 0, z_gt: 3 });
    }

    #[test]
    fn query_outside_core_is_contract_error() {
        let core = core_region(pt(0.0, 0.0), 0.5).unwrap();
        let zs = build_z_structure(&[pt(-1.1, 0.1)], &[0], Side::Left, core);
        assert!(matches!(query_z(&zs, pt(0.6, 0.1)), Err(BroadcastError::Contract(_))));
    }

    #[test]
    fn node_regions_are_intersections_of_children() {
        let w = 0.8;
        let core = core_region(pt(0.0, 0.0), w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for side in [Side::Left, Side::Right] {
            let pts = outer(&mut rng, 8, w, side);
            let idx: Vec<usize> = (0..8).collect();
            let zs = build_z_structure(&pts, &idx, side, core);
            for node in 1..32 {
                let Some((lo, hi)) = zs.node_range(node) else { continue };
                for _ in 0..1000 {
                    let p = pt(rng.gen_range(-0.5..=0.5), rng.gen_range(0.0..=w));
                    let direct = zs.order()[lo..hi].iter().all(|&i| pts[i].within_unit(p));
                    assert_eq!(zs.node_contains(node, p), Some(direct));
                    if hi - lo > 1 {
                        let l = zs.node_contains(2 * node, p).unwrap();
                        let r = zs.node_contains(2 * node + 1, p).unwrap();
                        assert_eq!(direct, l && r);
                    }
                }
            }
        }
    }

    #[test]
    fn random_queries_match_prefix_scan() {
        let w = 0.86;
        let core = core_region(pt(0.0, 0.0), w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for side in [Side::Left, Side::Right] {
            let pts = outer(&mut rng, 10, w, side);
            let idx: Vec<usize> = (0..10).collect();
            let zs = build_z_structure(&pts, &idx, side, core);
            for _ in 0..2000 {
                let p = pt(rng.gen_range(-0.5..=0.5), rng.gen_range(0.0..=w));
                assert_eq!(query_z(&zs, p).unwrap(), direct_z(&pts, &zs, p));
            }
        }
    }

    proptest! {
        #[test]
        fn z_values_match_direct_scan(
            seed in 0u64..10_000,
            k in 0usize..14,
            w in 0.05f64..0.866,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let core = core_region(pt(0.0, 0.0), w).unwrap();
            for side in [Side::Left, Side::Right] {
                let pts = outer(&mut rng, k, w, side);
                let idx: Vec<usize> = (0..k).collect();
                let zs = build_z_structure(&pts, &idx, side, core);
                for _ in 0..50 {
                    let p = pt(rng.gen_range(-0.5..=0.5), rng.gen_range(0.0..=w));
                    prop_assert_eq!(query_z(&zs, p).unwrap(), direct_z(&pts, &zs, p));
                }
            }
        }
    }
}

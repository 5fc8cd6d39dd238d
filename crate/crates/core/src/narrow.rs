//! Minimum broadcast in strips of width at most sqrt(3)/2.
//!
//! An optimum is either small (at most two points), bidirectional (the
//! source plus two centers inside the core area of the source, one covering
//! a y-prefix and the other the complementary suffix of the outer points on
//! both sides), or path-like (a shortest path from the source towards each
//! end of the strip, sharing at most their second vertex).

use crate::error::{BroadcastError, Result};
use crate::geom::{build_z_structure, members_in_intersection, members_in_union, query_z, ZValues};
use crate::model::{
    build_graph, core_region, validate_in_graph, BroadcastSet, Point, Side, StripInstance,
    UnitDiskGraph, NARROW_LIMIT,
};

/// Left- and right-covering points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringSets {
    pub q_plus: Vec<usize>,
    pub q_minus: Vec<usize>,
    /// No outer point to the right; `q_plus` holds the conventional value.
    pub plus_vacuous: bool,
    /// No outer point to the left; `q_minus` holds the conventional value.
    pub minus_vacuous: bool,
}

impl CoveringSets {
    pub fn get(&self, side: Side) -> &[usize] {
        match side {
            Side::Left => &self.q_minus,
            Side::Right => &self.q_plus,
        }
    }

    pub fn is_vacuous(&self, side: Side) -> bool {
        match side {
            Side::Left => self.minus_vacuous,
            Side::Right => self.plus_vacuous,
        }
    }
}

/// Sets `Q_1..Q_i` of points at hop distance `0..i-1` from the covering
/// set of one side, stopping at the first level meeting the source disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardLevels {
    pub side: Side,
    pub levels: Vec<Vec<usize>>,
}

impl BackwardLevels {
    /// Number of levels, which is the hop length of a shortest path from
    /// the source to the covering set. Zero when the side has no outer
    /// points.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn last(&self) -> &[usize] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NarrowStructure {
    Small,
    Bidirectional {
        centers: (usize, usize),
    },
    /// Paths start at the source and end in the covering set of their
    /// side; an empty path means the side has no outer points.
    PathLike {
        left: Vec<usize>,
        right: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NarrowSolution {
    pub set: BroadcastSet,
    pub structure: NarrowStructure,
}

/// Normalized instance together with the data every step needs.
pub(crate) struct Narrow {
    pub pts: Vec<Point>,
    pub graph: UnitDiskGraph,
    pub s: usize,
    pub w: f64,
    pub in_src: Vec<bool>,
}

impl Narrow {
    pub(crate) fn new(instance: &StripInstance) -> Result<Self> {
        let norm = instance.normalized()?;
        let w = match norm.width {
            Some(w) if w <= NARROW_LIMIT => w,
            other => {
                return Err(BroadcastError::Contract(format!(
                    "narrow solver needs width <= sqrt(3)/2 times the radius, got {other:?}"
                )))
            }
        };
        let graph = build_graph(&norm)?;
        let s = norm.source;
        let in_src = (0..graph.len())
            .map(|p| p == s || graph.adjacent(s, p))
            .collect();
        Ok(Narrow {
            pts: norm.points,
            graph,
            s,
            w,
            in_src,
        })
    }

    fn n(&self) -> usize {
        self.pts.len()
    }

    /// Outer points (outside the source disk) on `side`.
    fn outer(&self, side: Side) -> Vec<usize> {
        (0..self.n())
            .filter(|&p| !self.in_src[p] && Side::of(self.pts[p]) == side)
            .collect()
    }

    fn outer_all(&self) -> Vec<usize> {
        (0..self.n()).filter(|&p| !self.in_src[p]).collect()
    }

    fn at(&self, idx: &[usize]) -> Vec<Point> {
        idx.iter().map(|&i| self.pts[i]).collect()
    }

    pub(crate) fn ensure_connected(&self) -> Result<()> {
        let dist = self.graph.bfs(self.s);
        let cut: Vec<usize> = (0..self.n()).filter(|&p| dist[p].is_none()).collect();
        if cut.is_empty() {
            Ok(())
        } else {
            Err(BroadcastError::Infeasible(format!(
                "graph is disconnected; unreachable from the source: {cut:?}"
            )))
        }
    }

    fn covering(&self, side: Side) -> Result<(Vec<usize>, bool)> {
        let outer = self.outer(side);
        if outer.is_empty() {
            let conv = (0..self.n())
                .filter(|&p| self.in_src[p] && Side::of(self.pts[p]) == side)
                .collect();
            return Ok((conv, true));
        }
        // Work in a frame where "outward" is increasing x.
        let ox = |p: usize| side.outward(self.pts[p].x);
        let far = outer
            .iter()
            .copied()
            .max_by(|&a, &b| ox(a).total_cmp(&ox(b)))
            .unwrap();
        let xf = ox(far);
        let mut q: Vec<usize> = (0..self.n()).filter(|&p| ox(p) >= xf - 0.5).collect();
        let zone: Vec<usize> = (0..self.n())
            .filter(|&p| ox(p) >= xf - 1.0 && ox(p) < xf - 0.5)
            .collect();
        let targets: Vec<usize> = outer.iter().copied().filter(|&p| ox(p) >= xf - 0.5).collect();
        let hit = members_in_intersection(&self.at(&targets), &self.at(&zone))?;
        q.extend(hit.into_iter().map(|k| zone[k]));
        q.sort_unstable();
        Ok((q, false))
    }

    pub(crate) fn backward(&self, side: Side, cover: &CoveringSets) -> Result<BackwardLevels> {
        if cover.is_vacuous(side) {
            return Ok(BackwardLevels { side, levels: Vec::new() });
        }
        let ox = |p: usize| side.outward(self.pts[p].x);
        let mut remaining = vec![true; self.n()];
        let first = cover.get(side).to_vec();
        for &p in &first {
            remaining[p] = false;
        }
        let mut levels = vec![first];
        loop {
            let prev = levels.last().unwrap();
            if prev.is_empty() {
                return Err(BroadcastError::Infeasible(format!(
                    "no path from the source to the {side:?} covering set"
                )));
            }
            if prev.iter().any(|&p| self.in_src[p]) {
                return Ok(BackwardLevels { side, levels });
            }
            let lo = prev.iter().map(|&p| ox(p)).fold(f64::INFINITY, f64::min) - 1.0;
            let window: Vec<usize> = (0..self.n()).filter(|&t| remaining[t] && ox(t) >= lo).collect();
            let hit = members_in_union(&self.at(prev), &self.at(&window))?;
            let next: Vec<usize> = hit.into_iter().map(|k| window[k]).collect();
            for &p in &next {
                remaining[p] = false;
            }
            levels.push(next);
        }
    }

    fn small(&self) -> Result<Option<BroadcastSet>> {
        let outer = self.outer_all();
        if outer.is_empty() {
            return Ok(Some(BroadcastSet::new([self.s])));
        }
        let inner: Vec<usize> = (0..self.n()).filter(|&p| self.in_src[p] && p != self.s).collect();
        let hit = members_in_intersection(&self.at(&outer), &self.at(&inner))?;
        Ok(hit
            .into_iter()
            .map(|k| inner[k])
            .min()
            .map(|p| BroadcastSet::new([self.s, p])))
    }

    /// Lexicographically smallest pair of core points whose disks split the
    /// outer points of both sides into a y-prefix and a y-suffix.
    fn bidirectional(&self) -> Result<Option<(usize, usize)>> {
        let core = core_region(self.pts[self.s], self.w)?;
        let left = build_z_structure(&self.pts, &self.outer(Side::Left), Side::Left, core);
        let right = build_z_structure(&self.pts, &self.outer(Side::Right), Side::Right, core);
        let cand: Vec<usize> = (0..self.n())
            .filter(|&p| p != self.s && core.contains(self.pts[p]))
            .collect();
        if cand.len() < 2 {
            return Ok(None);
        }
        let mut zl: Vec<ZValues> = Vec::with_capacity(cand.len());
        let mut zr: Vec<ZValues> = Vec::with_capacity(cand.len());
        for &c in &cand {
            zl.push(query_z(&left, self.pts[c])?);
            zr.push(query_z(&right, self.pts[c])?);
        }
        let (kl, kr) = (left.len(), right.len());
        let m = cand.len();
        // `a` covers the prefixes, its partner the suffixes.
        let as_prefix = dominance_min2(
            &(0..m).map(|b| (zl[b].z_gt, zr[b].z_gt, b)).collect::<Vec<_>>(),
            &(0..m).map(|a| (zl[a].z_le, zr[a].z_le)).collect::<Vec<_>>(),
            kr,
        );
        // `a` covers the suffixes, its partner the prefixes.
        let as_suffix = dominance_min2(
            &(0..m).map(|b| (kl - zl[b].z_le, kr - zr[b].z_le, b)).collect::<Vec<_>>(),
            &(0..m).map(|a| (kl - zl[a].z_gt, kr - zr[a].z_gt)).collect::<Vec<_>>(),
            kr,
        );
        // Candidates are in index order, so the first one with any partner
        // gives the smallest pair; its partners all have larger indices.
        for a in 0..m {
            let partner = as_prefix[a]
                .iter()
                .chain(&as_suffix[a])
                .flatten()
                .copied()
                .filter(|&b| b != a)
                .min();
            if let Some(b) = partner {
                return Ok(Some((cand[a], cand[b])));
            }
        }
        Ok(None)
    }

    fn path_like(&self) -> Result<NarrowSolution> {
        let cover = self.covering_sets()?;
        let right = self.backward(Side::Right, &cover)?;
        let left = self.backward(Side::Left, &cover)?;
        let shared = right
            .last()
            .iter()
            .copied()
            .filter(|p| self.in_src[*p] && left.last().contains(p))
            .min();
        let walk = |lv: &BackwardLevels| -> Vec<usize> {
            if lv.depth() == 0 {
                return Vec::new();
            }
            let second = shared.unwrap_or_else(|| {
                lv.last().iter().copied().filter(|&p| self.in_src[p]).min().unwrap()
            });
            self.walk(lv, second)
        };
        let rp = walk(&right);
        let lp = walk(&left);
        let set = BroadcastSet::new(rp.iter().chain(&lp).copied().chain([self.s]));
        Ok(NarrowSolution {
            set,
            structure: NarrowStructure::PathLike { left: lp, right: rp },
        })
    }

    /// Greedy smallest-index shortest path `s, second, ...` down the
    /// backward levels. `second` must lie in the last level.
    pub(crate) fn walk(&self, lv: &BackwardLevels, second: usize) -> Vec<usize> {
        let mut path = vec![self.s, second];
        for level in lv.levels.iter().rev().skip(1) {
            let cur = *path.last().unwrap();
            let next = level
                .iter()
                .copied()
                .filter(|&q| self.graph.adjacent(cur, q))
                .min()
                .expect("backward levels are built by adjacency");
            path.push(next);
        }
        path
    }

    pub(crate) fn covering_sets(&self) -> Result<CoveringSets> {
        let (q_plus, plus_vacuous) = self.covering(Side::Right)?;
        let (q_minus, minus_vacuous) = self.covering(Side::Left)?;
        Ok(CoveringSets {
            q_plus,
            q_minus,
            plus_vacuous,
            minus_vacuous,
        })
    }

    pub(crate) fn solve(&self) -> Result<NarrowSolution> {
        self.ensure_connected()?;
        let sol = if let Some(set) = self.small()? {
            NarrowSolution {
                set,
                structure: NarrowStructure::Small,
            }
        } else if let Some((a, b)) = self.bidirectional()? {
            NarrowSolution {
                set: BroadcastSet::new([self.s, a, b]),
                structure: NarrowStructure::Bidirectional { centers: (a, b) },
            }
        } else {
            self.path_like()?
        };
        let rep = validate_in_graph(&self.graph, self.s, &sol.set, None)?;
        if !rep.is_valid() {
            return Err(BroadcastError::Contract(format!(
                "narrow solver produced an invalid set {}: {rep}",
                sol.set
            )));
        }
        Ok(sol)
    }
}

/// For every query `(a, b)`, the two smallest tags among points `(x, y, tag)`
/// with `x <= a` and `y <= b`. Second coordinates range over `0..=ymax`.
fn dominance_min2(
    points: &[(usize, usize, usize)],
    queries: &[(usize, usize)],
    ymax: usize,
) -> Vec<[Option<usize>; 2]> {
    fn insert(best: &mut [Option<usize>; 2], v: usize) {
        match *best {
            [None, _] => best[0] = Some(v),
            [Some(a), _] if v < a => *best = [Some(v), Some(a)],
            [Some(a), None] if v != a => best[1] = Some(v),
            [Some(a), Some(b)] if v != a && v < b => best[1] = Some(v),
            _ => {}
        }
    }
    let size = ymax + 2;
    let mut tree = vec![[None, None]; size + 1];
    let mut pts: Vec<_> = points.to_vec();
    pts.sort_by_key(|p| p.0);
    let mut order: Vec<usize> = (0..queries.len()).collect();
    order.sort_by_key(|&q| queries[q].0);
    let mut out = vec![[None, None]; queries.len()];
    let mut next = 0;
    for q in order {
        let (a, b) = queries[q];
        while next < pts.len() && pts[next].0 <= a {
            let mut i = pts[next].1.min(ymax) + 1;
            while i <= size {
                insert(&mut tree[i], pts[next].2);
                i += i & i.wrapping_neg();
            }
            next += 1;
        }
        let mut best = [None, None];
        let mut i = b.min(ymax) + 1;
        while i > 0 {
            for v in tree[i].into_iter().flatten() {
                insert(&mut best, v);
            }
            i -= i & i.wrapping_neg();
        }
        out[q] = best;
    }
    out
}

pub fn compute_covering_sets(instance: &StripInstance) -> Result<CoveringSets> {
    Narrow::new(instance)?.covering_sets()
}

pub fn backward_level_sets(instance: &StripInstance, side: Side) -> Result<BackwardLevels> {
    let nw = Narrow::new(instance)?;
    let cover = nw.covering_sets()?;
    nw.backward(side, &cover)
}

/// Optimal broadcast of size at most two, if one exists.
pub fn find_small(instance: &StripInstance) -> Result<Option<BroadcastSet>> {
    Narrow::new(instance)?.small()
}

/// A size-3 solution made of the source and two core points, if one exists.
/// Meaningful once [`find_small`] has failed.
pub fn find_bidirectional(instance: &StripInstance) -> Result<Option<BroadcastSet>> {
    let nw = Narrow::new(instance)?;
    if nw.outer_all().is_empty() {
        return Ok(None);
    }
    Ok(nw.bidirectional()?.map(|(a, b)| BroadcastSet::new([nw.s, a, b])))
}

/// The best path-like solution, ignoring the other two structures.
pub fn path_like(instance: &StripInstance) -> Result<NarrowSolution> {
    let nw = Narrow::new(instance)?;
    nw.ensure_connected()?;
    nw.path_like()
}

pub fn solve_narrow_detailed(instance: &StripInstance) -> Result<NarrowSolution> {
    Narrow::new(instance)?.solve()
}

pub fn solve_narrow(instance: &StripInstance) -> Result<BroadcastSet> {
    Ok(solve_narrow_detailed(instance)?.set)
}

//! Exhaustive ground truth for small instances. Subsets are enumerated by
//! increasing size and, within a size, in lexicographic order, so the first
//! feasible subset found is the lexicographically smallest optimum.

use std::time::{Duration, Instant};

use crate::error::{BroadcastError, Result};
use crate::model::{build_graph, BroadcastSet, StripInstance, UnitDiskGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub max_n: usize,
    pub time_budget: Option<Duration>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_n: 16,
            time_budget: Some(Duration::from_secs(60)),
        }
    }
}

/// How [`brute_min_cds`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CdsMode {
    /// Enumerate all subsets directly.
    #[default]
    Direct,
    /// Minimum over all choices of source of the minimum broadcast.
    MinOverSources,
}

/// Bitmask view of a unit-disk graph.
struct Masks {
    n: usize,
    closed: Vec<u64>,
    full: u64,
}

impl Masks {
    fn new(graph: &UnitDiskGraph) -> Self {
        let n = graph.len();
        let closed = (0..n)
            .map(|v| {
                graph
                    .neighbors(v)
                    .iter()
                    .fold(1u64 << v, |m, &u| m | (1u64 << u))
            })
            .collect();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Masks { n, closed, full }
    }

    fn connected(&self, set: u64) -> bool {
        if set == 0 {
            return false;
        }
        let mut seen = set & set.wrapping_neg();
        loop {
            let mut grow = seen;
            let mut bits = seen;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                grow |= self.closed[v] & set;
            }
            if grow == seen {
                return seen == set;
            }
            seen = grow;
        }
    }

    fn dominating(&self, set: u64) -> bool {
        let mut cov = 0u64;
        let mut bits = set;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            cov |= self.closed[v];
        }
        cov == self.full
    }

    /// Every point reachable from `s` within `h` hops through `set`.
    fn within_hops(&self, set: u64, s: usize, h: u32) -> bool {
        let mut frontier = 1u64 << s;
        let mut reached = frontier;
        let mut covered = self.closed[s];
        for _ in 1..h {
            let mut next = 0u64;
            let mut bits = frontier;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= self.closed[v] & set;
            }
            next &= !reached;
            if next == 0 {
                break;
            }
            reached |= next;
            let mut bits = next;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                covered |= self.closed[v];
            }
            frontier = next;
        }
        covered == self.full
    }
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    idx: Vec<usize>,
    n: usize,
    first: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            idx: (0..k).collect(),
            n,
            first: true,
        }
    }

    fn advance(&mut self) -> Option<&[usize]> {
        let k = self.idx.len();
        if self.first {
            self.first = false;
            return (k <= self.n).then_some(&self.idx[..]);
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx[..]);
            }
        }
        None
    }
}

struct Budget {
    start: Instant,
    limit: Option<Duration>,
    ticks: u64,
}

impl Budget {
    fn new(limit: Option<Duration>) -> Self {
        Budget {
            start: Instant::now(),
            limit,
            ticks: 0,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.ticks += 1;
        if self.ticks.is_multiple_of(4096) {
            if let Some(limit) = self.limit {
                if self.start.elapsed() > limit {
                    return Err(BroadcastError::Timeout(limit));
                }
            }
        }
        Ok(())
    }
}

fn prepare(instance: &StripInstance, cfg: &OracleConfig) -> Result<UnitDiskGraph> {
    let n = instance.len();
    if n > cfg.max_n || n > 63 {
        return Err(BroadcastError::Intractable(format!(
            "oracle refuses {n} points (cap {})",
            cfg.max_n.min(63)
        )));
    }
    build_graph(instance)
}

fn feasible(m: &Masks, set: u64, s: usize, h: Option<u32>) -> bool {
    m.connected(set) && m.dominating(set) && h.is_none_or(|h| m.within_hops(set, s, h))
}

/// Scans the subsets of `others` of size `k-1`, each joined with `s`.
fn scan_size(
    m: &Masks,
    s: usize,
    others: &[usize],
    k: usize,
    h: Option<u32>,
    budget: &mut Budget,
    mut visit: impl FnMut(u64) -> bool,
) -> Result<()> {
    let mut comb = Combinations::new(others.len(), k - 1);
    while let Some(c) = comb.advance() {
        budget.tick()?;
        let set = c.iter().fold(1u64 << s, |acc, &i| acc | (1u64 << others[i]));
        if feasible(m, set, s, h) && !visit(set) {
            break;
        }
    }
    Ok(())
}

fn to_set(mask: u64) -> BroadcastSet {
    BroadcastSet::new((0..64).filter(|&i| mask >> i & 1 == 1))
}

fn check_reachable(graph: &UnitDiskGraph, s: usize, h: Option<u32>) -> Result<()> {
    let dist = graph.bfs(s);
    if let Some(p) = dist.iter().position(Option::is_none) {
        return Err(BroadcastError::Infeasible(format!(
            "point {p} is not reachable from the source"
        )));
    }
    let t = dist.iter().flatten().copied().max().unwrap_or(0);
    if let Some(h) = h {
        if t > h {
            return Err(BroadcastError::Infeasible(format!(
                "levels reach t = {t} > h = {h}"
            )));
        }
    }
    Ok(())
}

/// Minimum broadcast set, with every point within `h` hops when `h` is
/// given. The instance's own hop bound is ignored.
pub fn brute_min_broadcast(
    instance: &StripInstance,
    h: Option<u32>,
    cfg: &OracleConfig,
) -> Result<BroadcastSet> {
    let graph = prepare(instance, cfg)?;
    let s = instance.source;
    check_reachable(&graph, s, h)?;
    let m = Masks::new(&graph);
    let others: Vec<usize> = (0..m.n).filter(|&i| i != s).collect();
    let mut budget = Budget::new(cfg.time_budget);
    for k in 1..=m.n {
        let mut found = None;
        scan_size(&m, s, &others, k, h, &mut budget, |set| {
            found = Some(set);
            false
        })?;
        if let Some(set) = found {
            return Ok(to_set(set));
        }
    }
    unreachable!("the full point set is feasible once reachability holds")
}

/// Every minimum broadcast set, in lexicographic order.
pub fn all_min_broadcasts(
    instance: &StripInstance,
    h: Option<u32>,
    cfg: &OracleConfig,
) -> Result<Vec<BroadcastSet>> {
    let graph = prepare(instance, cfg)?;
    let s = instance.source;
    check_reachable(&graph, s, h)?;
    let m = Masks::new(&graph);
    let others: Vec<usize> = (0..m.n).filter(|&i| i != s).collect();
    let mut budget = Budget::new(cfg.time_budget);
    for k in 1..=m.n {
        let mut all = Vec::new();
        scan_size(&m, s, &others, k, h, &mut budget, |set| {
            all.push(to_set(set));
            true
        })?;
        if !all.is_empty() {
            return Ok(all);
        }
    }
    unreachable!("the full point set is feasible once reachability holds")
}

/// Whether some broadcast set of exactly `k` points exists.
pub fn has_feasible_of_size(
    instance: &StripInstance,
    h: Option<u32>,
    k: usize,
    cfg: &OracleConfig,
) -> Result<bool> {
    let graph = prepare(instance, cfg)?;
    let m = Masks::new(&graph);
    let s = instance.source;
    if k == 0 || k > m.n {
        return Ok(false);
    }
    let others: Vec<usize> = (0..m.n).filter(|&i| i != s).collect();
    let mut budget = Budget::new(cfg.time_budget);
    let mut any = false;
    scan_size(&m, s, &others, k, h, &mut budget, |_| {
        any = true;
        false
    })?;
    Ok(any)
}

/// Minimum connected dominating set of the unit-disk graph, with no source
/// constraint.
pub fn brute_min_cds(instance: &StripInstance, mode: CdsMode, cfg: &OracleConfig) -> Result<BroadcastSet> {
    let graph = prepare(instance, cfg)?;
    if !graph.is_connected() {
        return Err(BroadcastError::Infeasible("graph is disconnected".into()));
    }
    match mode {
        CdsMode::Direct => {
            let m = Masks::new(&graph);
            let mut budget = Budget::new(cfg.time_budget);
            for k in 1..=m.n {
                let mut comb = Combinations::new(m.n, k);
                while let Some(c) = comb.advance() {
                    budget.tick()?;
                    let set = c.iter().fold(0u64, |acc, &i| acc | (1u64 << i));
                    if m.connected(set) && m.dominating(set) {
                        return Ok(to_set(set));
                    }
                }
            }
            unreachable!("a connected graph is its own dominating set")
        }
        CdsMode::MinOverSources => {
            let mut best: Option<BroadcastSet> = None;
            for s in 0..instance.len() {
                let mut inst = instance.clone();
                inst.source = s;
                let cand = brute_min_broadcast(&inst, None, cfg)?;
                if best.as_ref().is_none_or(|b| (cand.len(), &cand) < (b.len(), b)) {
                    best = Some(cand);
                }
            }
            Ok(best.expect("instance has at least one point"))
        }
    }
}

//! Minimum broadcast on strips of any width, by a left-to-right sweep over
//! unit slabs.
//!
//! After translating so that the leftmost point has x = 0, slab `j` holds
//! the points with `floor(x) = j`. Adjacent points lie in the same or in
//! neighboring slabs, so a partial solution is summarized by its active
//! points in the last two slabs (a 2 x w window) together with the
//! connectivity partition they inherit from everything to their left.
//! Windows with more than `mu(w)` active points are pruned: some optimum
//! never has that many.

use std::collections::HashMap;

use crate::error::{BroadcastError, Result};
use crate::model::{build_graph, validate_in_graph, BroadcastSet, StripInstance, UnitDiskGraph};

/// Largest number of active points of some optimum inside any 2 x w
/// rectangle: `floor(32 w / sqrt(3) + 14)`.
pub fn mu(w: f64) -> usize {
    // The guard keeps exact multiples of sqrt(3)/32 from rounding down.
    (32.0 * w / 3f64.sqrt() + 14.0 + 1e-9).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WideConfig {
    /// Largest number of input points allowed in one 2 x w window.
    pub max_window_points: usize,
}

impl Default for WideConfig {
    fn default() -> Self {
        WideConfig { max_window_points: 16 }
    }
}

/// Frontier of a partial solution after slab `k`: the active points of
/// slabs `k - 1` and `k` and the connectivity classes among them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowState {
    pub k: i64,
    pub prev: Vec<usize>,
    pub cur: Vec<usize>,
    /// Class label of each point of `prev` followed by `cur`, numbered by
    /// first appearance.
    pub classes: Vec<usize>,
    /// A class was completed to the left; nothing may be added any more.
    pub closed: bool,
}

impl WindowState {
    pub fn start(k: i64) -> Self {
        WindowState {
            k,
            prev: Vec::new(),
            cur: Vec::new(),
            classes: Vec::new(),
            closed: false,
        }
    }

    pub fn class_count(&self) -> usize {
        self.classes.iter().max().map_or(0, |&c| c + 1)
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, a: usize) -> usize {
        let mut r = a;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut a = a;
        while self.0[a] != r {
            let next = self.0[a];
            self.0[a] = r;
            a = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Extends `state` by the active points `added` of slab `k + 1`. Returns
/// `None` if a class would be cut off while others remain, or if points
/// are added after the solution was closed.
pub fn advance(graph: &UnitDiskGraph, state: &WindowState, added: &[usize]) -> Option<WindowState> {
    if state.closed && !added.is_empty() {
        return None;
    }
    let old: Vec<usize> = state.prev.iter().chain(&state.cur).copied().collect();
    let all: Vec<usize> = old.iter().chain(added).copied().collect();
    let mut dsu = Dsu((0..all.len()).collect());
    let mut first_of_class: HashMap<usize, usize> = HashMap::new();
    for (i, &c) in state.classes.iter().enumerate() {
        match first_of_class.get(&c) {
            Some(&j) => dsu.union(i, j),
            None => {
                first_of_class.insert(c, i);
            }
        }
    }
    let base = state.prev.len();
    // New points can only touch the current slab and each other.
    for i in old.len()..all.len() {
        for j in base..i {
            if graph.adjacent(all[i], all[j]) {
                dsu.union(i, j);
            }
        }
    }
    let keep: Vec<usize> = (base..all.len()).collect();
    let kept_roots: Vec<usize> = keep.iter().map(|&i| dsu.find(i)).collect();
    let total_roots = {
        let mut r: Vec<usize> = (0..all.len()).map(|i| dsu.find(i)).collect();
        r.sort_unstable();
        r.dedup();
        r.len()
    };
    let dead = (0..base).any(|i| {
        let r = dsu.find(i);
        !kept_roots.contains(&r)
    });
    let mut closed = state.closed;
    if dead {
        if total_roots > 1 {
            return None;
        }
        closed = true;
    }
    let mut labels = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for r in kept_roots {
        let l = match seen.iter().position(|&x| x == r) {
            Some(l) => l,
            None => {
                seen.push(r);
                seen.len() - 1
            }
        };
        labels.push(l);
    }
    Some(WindowState {
        k: state.k + 1,
        prev: state.cur.clone(),
        cur: added.to_vec(),
        classes: labels,
        closed,
    })
}

/// Whether `cur` is the extension of `prev` by its own newest slab.
pub fn compatible(graph: &UnitDiskGraph, prev: &WindowState, cur: &WindowState) -> bool {
    cur.k == prev.k + 1
        && cur.prev == prev.cur
        && advance(graph, prev, &cur.cur).is_some_and(|next| next == *cur)
}

struct Layer {
    states: Vec<WindowState>,
    cost: Vec<usize>,
    parent: Vec<usize>,
}

fn slabs_of(graph: &UnitDiskGraph) -> Vec<Vec<usize>> {
    let pts = graph.points();
    let x0 = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let slab = |x: f64| (x - x0).floor().max(0.0) as usize;
    let k = pts.iter().map(|p| slab(p.x)).max().unwrap_or(0);
    let mut slabs = vec![Vec::new(); k + 1];
    for (i, p) in pts.iter().enumerate() {
        slabs[slab(p.x)].push(i);
    }
    slabs
}

fn sweep(graph: &UnitDiskGraph, s: usize, cap: usize, cfg: &WideConfig) -> Result<BroadcastSet> {
    let slabs = slabs_of(graph);
    let slab = |j: i64| -> &[usize] {
        if j < 0 || j as usize >= slabs.len() {
            &[]
        } else {
            &slabs[j as usize]
        }
    };
    let last = slabs.len() as i64;
    let mut layers: Vec<Layer> = vec![Layer {
        states: vec![WindowState::start(-1)],
        cost: vec![0],
        parent: vec![0],
    }];
    // Step k chooses the active points of slab k; slab k - 1 is then fully
    // decided and must be dominated.
    for k in 0..=last {
        let window = slab(k - 1).len() + slab(k).len();
        if window > cfg.max_window_points {
            return Err(BroadcastError::Intractable(format!(
                "window [{}, {}) holds {window} points, cap is {}",
                k - 1,
                k + 1,
                cfg.max_window_points
            )));
        }
        let fresh = slab(k);
        let must = fresh.iter().position(|&p| p == s);
        let check = slab(k - 1);
        let prev_layer = layers.last().unwrap();
        let mut index: HashMap<WindowState, usize> = HashMap::new();
        let mut next = Layer {
            states: Vec::new(),
            cost: Vec::new(),
            parent: Vec::new(),
        };
        for (si, state) in prev_layer.states.iter().enumerate() {
            let base = prev_layer.cost[si];
            for mask in 0u32..(1u32 << fresh.len()) {
                if must.is_some_and(|b| mask & (1 << b) == 0) {
                    continue;
                }
                let added: Vec<usize> = (0..fresh.len())
                    .filter(|&b| mask & (1 << b) != 0)
                    .map(|b| fresh[b])
                    .collect();
                if state.cur.len() + added.len() > cap {
                    continue;
                }
                let dominated = check.iter().all(|&p| {
                    state
                        .prev
                        .iter()
                        .chain(&state.cur)
                        .chain(&added)
                        .any(|&a| a == p || graph.adjacent(a, p))
                });
                if !dominated {
                    continue;
                }
                let Some(ns) = advance(graph, state, &added) else { continue };
                let cost = base + added.len();
                match index.get(&ns) {
                    Some(&i) if next.cost[i] <= cost => {}
                    Some(&i) => {
                        next.cost[i] = cost;
                        next.parent[i] = si;
                    }
                    None => {
                        index.insert(ns.clone(), next.states.len());
                        next.states.push(ns);
                        next.cost.push(cost);
                        next.parent.push(si);
                    }
                }
            }
        }
        log::trace!("slab {k}: {} window states", next.states.len());
        if next.states.is_empty() {
            return Err(BroadcastError::Infeasible(format!(
                "no dominating connected set survives slab {k}"
            )));
        }
        layers.push(next);
    }
    let fin = layers.last().unwrap();
    let best = (0..fin.states.len())
        .filter(|&i| fin.states[i].closed || fin.states[i].class_count() == 1)
        .min_by_key(|&i| fin.cost[i])
        .ok_or_else(|| BroadcastError::Infeasible("no connected dominating set contains the source".into()))?;
    let mut set = Vec::new();
    let mut i = best;
    for layer in layers.iter().rev() {
        set.extend(&layer.states[i].cur);
        i = layer.parent[i];
    }
    Ok(BroadcastSet::new(set))
}

fn prepare(instance: &StripInstance) -> Result<(UnitDiskGraph, usize, f64)> {
    let norm = instance.normalized()?;
    let w = norm.width.ok_or_else(|| {
        BroadcastError::Contract("the window sweep needs a strip of finite width".into())
    })?;
    let graph = build_graph(&norm)?;
    if !graph.is_connected() {
        let dist = graph.bfs(norm.source);
        let cut: Vec<usize> = (0..graph.len()).filter(|&p| dist[p].is_none()).collect();
        return Err(BroadcastError::Infeasible(format!(
            "graph is disconnected; unreachable from the source: {cut:?}"
        )));
    }
    Ok((graph, norm.source, w))
}

pub fn solve_wide_with(instance: &StripInstance, cfg: &WideConfig) -> Result<BroadcastSet> {
    let (graph, s, w) = prepare(instance)?;
    let set = sweep(&graph, s, mu(w), cfg)?;
    let rep = validate_in_graph(&graph, s, &set, None)?;
    if !rep.is_valid() {
        return Err(BroadcastError::Contract(format!("window sweep produced an invalid set {set}: {rep}")));
    }
    Ok(set)
}

pub fn solve_wide(instance: &StripInstance) -> Result<BroadcastSet> {
    solve_wide_with(instance, &WideConfig::default())
}

/// Minimum connected dominating set: the best broadcast set over all
/// choices of source.
pub fn solve_wide_cds(instance: &StripInstance, cfg: &WideConfig) -> Result<BroadcastSet> {
    let (graph, _, w) = prepare(instance)?;
    let mut best: Option<BroadcastSet> = None;
    for s in 0..graph.len() {
        let set = sweep(&graph, s, mu(w), cfg)?;
        if best.as_ref().is_none_or(|b| set.len() < b.len()) {
            best = Some(set);
        }
    }
    best.ok_or_else(|| BroadcastError::Input("instance has no points".into()))
}

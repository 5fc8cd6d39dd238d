//! Deterministic instance generators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BroadcastError, Result};
use crate::model::{build_graph, Point, StripInstance};

/// Distances closer than this to the radius are rejected.
pub const FRAGILE_GAP: f64 = 1e-6;

const MAX_TRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    RandomStrip,
    RandomPlanar,
    Chain,
    Bundle,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::RandomStrip => "random-strip",
            GeneratorKind::RandomPlanar => "random-planar",
            GeneratorKind::Chain => "chain",
            GeneratorKind::Bundle => "bundle",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = BroadcastError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-strip" => Ok(GeneratorKind::RandomStrip),
            "random-planar" => Ok(GeneratorKind::RandomPlanar),
            "chain" => Ok(GeneratorKind::Chain),
            "bundle" => Ok(GeneratorKind::Bundle),
            other => Err(BroadcastError::Input(format!("unknown generator kind {other:?}"))),
        }
    }
}

/// Default horizontal half-extent for `n` random strip points: dense
/// enough that most instances are connected.
pub fn default_span(n: usize) -> f64 {
    (0.3 * n as f64).max(1.0)
}

fn acceptable(p: Point, placed: &[Point], min_sep: f64) -> bool {
    placed.iter().all(|q| {
        let d = p.dist(*q);
        d >= min_sep && (d - 1.0).abs() >= FRAGILE_GAP
    })
}

fn scatter(
    n: usize,
    source: Point,
    min_sep: f64,
    seed: u64,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> Point,
) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![source];
    for i in 1..n {
        let mut tries = 0;
        loop {
            let p = sample(&mut rng);
            if acceptable(p, &pts, min_sep) {
                pts.push(p);
                break;
            }
            tries += 1;
            if tries >= MAX_TRIES {
                return Err(BroadcastError::Input(format!(
                    "generator could not place point {i} after {MAX_TRIES} attempts (min_sep = {min_sep})"
                )));
            }
        }
    }
    Ok(pts)
}

fn check_args(n: usize, min_sep: f64) -> Result<()> {
    if n == 0 {
        return Err(BroadcastError::Input("generator needs n >= 1".into()));
    }
    if !(min_sep >= 0.0) {
        return Err(BroadcastError::Input(format!("min_sep must be >= 0, got {min_sep}")));
    }
    Ok(())
}

/// `n` points in a strip of width `w`: the source at x = 0 and uniform
/// height, the rest uniform in `[-span, span] x [0, w]` with
/// `span = default_span(n)`.
pub fn gen_random_strip(n: usize, w: f64, seed: u64, min_sep: f64) -> Result<StripInstance> {
    gen_random_strip_span(n, w, seed, min_sep, default_span(n))
}

pub fn gen_random_strip_span(n: usize, w: f64, seed: u64, min_sep: f64, span: f64) -> Result<StripInstance> {
    check_args(n, min_sep)?;
    if !(w > 0.0 && w.is_finite()) {
        return Err(BroadcastError::Input(format!("width must be positive, got {w}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let source = Point::new(0.0, rng.gen_range(0.0..=w));
    let pts = scatter(n, source, min_sep, seed, |r| {
        Point::new(r.gen_range(-span..=span), r.gen_range(0.0..=w))
    })?;
    Ok(StripInstance::strip(pts, w, 0))
}

/// `n` points in the plane: the source at the origin, the rest uniform in
/// the disk of radius `extent` around it.
pub fn gen_random_planar(n: usize, extent: f64, seed: u64, min_sep: f64) -> Result<StripInstance> {
    check_args(n, min_sep)?;
    let pts = scatter(n, Point::new(0.0, 0.0), min_sep, seed, |r| {
        let a = r.gen_range(0.0..std::f64::consts::TAU);
        let d = extent * r.gen_range(0.0f64..=1.0).sqrt();
        Point::new(d * a.cos(), d * a.sin())
    })?;
    Ok(StripInstance::planar(pts, 0))
}

/// Layout of [`gen_strings`].
pub mod strings {
    /// x-coordinate of the first column.
    pub const FIRST_COLUMN: f64 = 0.7;
    pub const COLUMN_STEP: f64 = 0.95;
    pub const X_JITTER: f64 = 0.01;
    /// Largest change in y between consecutive points of a string.
    pub const MAX_DRIFT: f64 = 0.25;
}

/// `k` random strings of `cols` points each, one point per column, with the
/// source at mid-height. Consecutive points of a string are adjacent, so
/// column `c` is level `c`; the strings drift apart in y, which tends to
/// make the last level need several predecessors. With `two_sided` another
/// `k` strings run to the left.
pub fn gen_strings(k: usize, cols: usize, w: f64, two_sided: bool, seed: u64) -> Result<StripInstance> {
    use strings::*;
    if k == 0 || cols == 0 || !(w > 0.0 && w.is_finite()) {
        return Err(BroadcastError::Input(format!(
            "strings need k >= 1, cols >= 1 and w > 0, got k = {k}, cols = {cols}, w = {w}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![Point::new(0.0, w / 2.0)];
    let sides: &[f64] = if two_sided { &[1.0, -1.0] } else { &[1.0] };
    for &sign in sides {
        for _ in 0..k {
            let mut y: f64 = rng.gen_range(0.0..=w);
            for c in 0..cols {
                if c > 0 {
                    y = (y + rng.gen_range(-MAX_DRIFT..=MAX_DRIFT)).clamp(0.0, w);
                }
                let x = FIRST_COLUMN + c as f64 * COLUMN_STEP + rng.gen_range(-X_JITTER..=X_JITTER);
                pts.push(Point::new(sign * x, y));
            }
        }
    }
    Ok(StripInstance::strip(pts, w, 0))
}

/// First connected instance among `tries` derived seeds.
pub fn connected_retry(
    seed: u64,
    tries: u64,
    mut make: impl FnMut(u64) -> Result<StripInstance>,
) -> Result<StripInstance> {
    for k in 0..tries {
        let inst = make(seed.wrapping_mul(1_000_003).wrapping_add(k))?;
        if build_graph(&inst)?.is_connected() {
            return Ok(inst);
        }
    }
    Err(BroadcastError::Input(format!(
        "no connected instance within {tries} attempts from seed {seed}"
    )))
}

/// `n` collinear points at the given spacing, source leftmost.
pub fn gen_chain(n: usize, spacing: f64, w: f64) -> Result<StripInstance> {
    check_args(n, 0.0)?;
    let pts = (0..n).map(|i| Point::new(i as f64 * spacing, w / 2.0)).collect();
    Ok(StripInstance::strip(pts, w, 0))
}

/// Layout of the variable gadget.
pub mod bundle {
    /// Horizontal distance between consecutive columns.
    pub const COLUMN_STEP: f64 = 0.99;
    pub const FIRST_COLUMN: f64 = 0.1;
    /// Vertical offset of the false string from the true string.
    pub const PAIR_OFFSET: f64 = 0.02;
    /// Vertical distance between the true strings of consecutive variables.
    pub const VARIABLE_GAP: f64 = 0.2;
    pub const MAX_VARIABLES: usize = 10;
}

/// Point index of column `c` (1-based) of the true (`false_string` unset)
/// or false string of variable `v` (0-based).
pub fn bundle_string_index(h: usize, v: usize, false_string: bool, c: usize) -> usize {
    1 + v * (2 * h - 1) + usize::from(false_string) * (h - 1) + (c - 1)
}

pub fn bundle_endpoint_index(h: usize, v: usize) -> usize {
    1 + v * (2 * h - 1) + 2 * (h - 1)
}

/// The variable gadget: for each variable a true and a false string of
/// `h - 1` points, one per column, both ending next to a shared endpoint in
/// column `h`. Column `c` is exactly level `c` around the source.
pub fn gen_bundle(n_v: usize, h: usize) -> Result<StripInstance> {
    use bundle::*;
    if n_v == 0 || h < 2 {
        return Err(BroadcastError::Input(format!(
            "bundle needs n_v >= 1 and h >= 2, got n_v = {n_v}, h = {h}"
        )));
    }
    if n_v > MAX_VARIABLES {
        return Err(BroadcastError::Input(format!(
            "bundle supports at most {MAX_VARIABLES} variables, got {n_v}"
        )));
    }
    let width = (n_v - 1) as f64 * VARIABLE_GAP + PAIR_OFFSET;
    let mut pts = vec![Point::new(0.0, width / 2.0)];
    let col = |c: usize| FIRST_COLUMN + (c - 1) as f64 * COLUMN_STEP;
    for v in 0..n_v {
        let y = v as f64 * VARIABLE_GAP;
        for dy in [0.0, PAIR_OFFSET] {
            for c in 1..h {
                pts.push(Point::new(col(c), y + dy));
            }
        }
        pts.push(Point::new(col(h), y + PAIR_OFFSET / 2.0));
    }
    Ok(StripInstance::strip(pts, width, 0).with_hops(h as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::compute_levels;

    #[test]
    fn single_point() {
        let inst = gen_random_strip(1, 0.5, 3, 0.0).unwrap();
        assert_eq!(inst.points.len(), 1);
        assert_eq!(inst.points[0].x, 0.0);
    }

    #[test]
    fn deterministic() {
        assert_eq!(gen_random_strip(9, 0.6, 4, 0.1).unwrap(), gen_random_strip(9, 0.6, 4, 0.1).unwrap());
        assert_ne!(gen_random_strip(9, 0.6, 4, 0.1).unwrap(), gen_random_strip(9, 0.6, 5, 0.1).unwrap());
        assert_eq!(gen_random_planar(9, 2.0, 4, 0.1).unwrap(), gen_random_planar(9, 2.0, 4, 0.1).unwrap());
    }

    #[test]
    fn respects_min_sep_and_avoids_fragile_pairs() {
        let inst = gen_random_strip(12, 0.6, 7, 0.2).unwrap();
        for i in 0..12 {
            assert!(inst.points[i].y >= 0.0 && inst.points[i].y <= 0.6);
            for j in i + 1..12 {
                let d = inst.points[i].dist(inst.points[j]);
                assert!(d >= 0.2);
                assert!((d - 1.0).abs() >= FRAGILE_GAP);
            }
        }
        assert!(inst.fragile_pairs().is_empty());
    }

    #[test]
    fn impossible_separation_fails() {
        assert!(gen_random_strip(50, 0.1, 1, 5.0).is_err());
    }

    #[test]
    fn bundle_sizes() {
        assert_eq!(gen_bundle(1, 2).unwrap().points.len(), 4);
        assert_eq!(gen_bundle(2, 3).unwrap().points.len(), 11);
        assert!(gen_bundle(11, 3).is_err());
        assert!(gen_bundle(5, 4).unwrap().is_narrow());
    }

    #[test]
    fn bundle_levels_are_columns() {
        for (n_v, h) in [(1, 2), (2, 3), (3, 4), (5, 5), (10, 3)] {
            let inst = gen_bundle(n_v, h).unwrap();
            let g = build_graph(&inst).unwrap();
            let lv = compute_levels(&g, 0);
            assert_eq!(lv.max_level(), h);
            for v in 0..n_v {
                for c in 1..h {
                    for f in [false, true] {
                        assert_eq!(lv.level[bundle_string_index(h, v, f, c)], Some(c as u32));
                    }
                }
                assert_eq!(lv.level[bundle_endpoint_index(h, v)], Some(h as u32));
            }
        }
    }

    #[test]
    fn bundle_adjacency_pattern() {
        let (n_v, h) = (3, 4);
        let inst = gen_bundle(n_v, h).unwrap();
        let g = build_graph(&inst).unwrap();
        let id = |v, f, c| bundle_string_index(h, v, f, c);
        for v in 0..n_v {
            for f in [false, true] {
                assert!(g.adjacent(0, id(v, f, 1)));
                for c in 1..h - 1 {
                    // Same variable: consecutive columns are joined, on
                    // both strings and across the pair.
                    assert!(g.adjacent(id(v, f, c), id(v, f, c + 1)));
                    assert!(g.adjacent(id(v, f, c), id(v, !f, c + 1)));
                    for u in (0..n_v).filter(|&u| u != v) {
                        assert!(!g.adjacent(id(v, f, c), id(u, f, c + 1)));
                        assert!(!g.adjacent(id(v, f, c), id(u, !f, c + 1)));
                    }
                }
                assert!(g.adjacent(id(v, f, h - 1), bundle_endpoint_index(h, v)));
                for u in (0..n_v).filter(|&u| u != v) {
                    assert!(!g.adjacent(id(v, f, h - 1), bundle_endpoint_index(h, u)));
                }
            }
        }
    }
}

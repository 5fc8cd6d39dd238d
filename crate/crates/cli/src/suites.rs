//! The acceptance criteria as runnable suites. Each suite compares a
//! solver against an independent check and reports one line.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strip_broadcast::hopdp::{one_sided_dp, solve_hop};
use strip_broadcast::io::gen::{connected_retry, gen_random_strip_span};
use strip_broadcast::io::{
    gen_bundle, gen_random_planar, gen_random_strip, gen_strings, parse_instance, render_svg, write_instance,
    InstanceMeta,
};
use strip_broadcast::narrow::NarrowStructure;
use strip_broadcast::twohop::instrument::{has_alternation, max_occurrences, sigma};
use strip_broadcast::twohop::solve_two_hop;
use strip_broadcast::wide::mu;
use strip_broadcast::{
    brute_min_broadcast, build_graph, compute_levels, core_region, solve_narrow, solve_narrow_detailed, solve_wide,
    validate_broadcast, BroadcastError, BroadcastSet, OracleConfig, StripInstance, UnitDiskGraph,
};

use crate::commands::{solve_file, Algo};

pub const NAMES: [&str; 10] = [
    "narrow", "structure", "hop", "one-sided", "two-hop", "wide", "density", "geometry", "plumbing", "bundle",
];

const NARROW_WIDTHS: [f64; 3] = [0.3, 0.6, 0.86];

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<10} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Outcome = Result<String, String>;

pub fn run_suite(name: &str) -> Option<SuiteResult> {
    let (name, limit, body): (&'static str, Option<u64>, fn() -> Outcome) = match name {
        "narrow" => ("narrow", Some(30), narrow),
        "structure" => ("structure", None, structure),
        "hop" => ("hop", Some(60), hop),
        "one-sided" => ("one-sided", None, one_sided),
        "two-hop" => ("two-hop", Some(60), two_hop),
        "wide" => ("wide", Some(120), wide),
        "density" => ("density", None, density),
        "geometry" => ("geometry", None, geometry),
        "plumbing" => ("plumbing", None, plumbing),
        "bundle" => ("bundle", None, bundle),
        _ => return None,
    };
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(secs) = limit {
        if elapsed > Duration::from_secs(secs) {
            passed = false;
            detail = format!("{detail}; over the {secs} s limit");
        }
    }
    Some(SuiteResult {
        name,
        passed,
        detail,
        elapsed,
    })
}

pub fn run_all() -> Vec<SuiteResult> {
    NAMES.iter().filter_map(|n| run_suite(n)).collect()
}

fn oracle() -> OracleConfig {
    OracleConfig::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Compares a solver result with the oracle: equal sizes, or both
/// infeasible. Returns whether a size comparison happened.
fn agree(
    what: &str,
    inst: &StripInstance,
    got: Result<BroadcastSet, BroadcastError>,
    want: Result<BroadcastSet, BroadcastError>,
) -> Result<bool, String> {
    match (got, want) {
        (Ok(g), Ok(w)) => {
            let rep = validate_broadcast(inst, &g).map_err(|e| format!("{what}: {e}"))?;
            ensure(rep.is_valid(), || format!("{what}: invalid result {g}: {rep}"))?;
            ensure(g.len() == w.len(), || format!("{what}: size {} but optimum {}", g.len(), w.len()))?;
            Ok(true)
        }
        (Err(a), Err(b)) if a.is_infeasible() && b.is_infeasible() => Ok(false),
        (a, b) => Err(format!("{what}: solver {a:?}, oracle {b:?}")),
    }
}

/// The narrow instances shared by the first two suites.
fn narrow_instances() -> Vec<(u64, StripInstance)> {
    (0..200u64)
        .map(|seed| {
            let n = 3 + (seed % 10) as usize;
            let w = NARROW_WIDTHS[seed as usize % 3];
            let inst = connected_retry(seed, 50, |sd| gen_random_strip(n, w, sd, 0.0))
                .or_else(|_| gen_random_strip(n, w, seed, 0.0))
                .expect("generator arguments are valid");
            (seed, inst)
        })
        .collect()
}

fn narrow() -> Outcome {
    let mut compared = 0;
    for (seed, inst) in narrow_instances() {
        let want = brute_min_broadcast(&inst, None, &oracle());
        compared += usize::from(agree(&format!("seed {seed}"), &inst, solve_narrow(&inst), want)?);
    }
    Ok(format!("{compared}/200 instances equal to the oracle"))
}

fn is_shortest_path(g: &UnitDiskGraph, s: usize, path: &[usize]) -> bool {
    let Some(&end) = path.last() else { return true };
    path[0] == s
        && path.windows(2).all(|e| g.adjacent(e[0], e[1]))
        && g.bfs(s)[end] == Some(path.len() as u32 - 1)
}

fn structure() -> Outcome {
    let (mut small, mut bi, mut paths) = (0, 0, 0);
    for (seed, inst) in narrow_instances() {
        let sol = match solve_narrow_detailed(&inst) {
            Ok(sol) => sol,
            Err(e) if e.is_infeasible() => continue,
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        let g = build_graph(&inst).map_err(|e| e.to_string())?;
        let s = inst.source;
        match &sol.structure {
            NarrowStructure::Small => {
                ensure(sol.set.len() <= 2, || format!("seed {seed}: small set {}", sol.set))?;
                small += 1;
            }
            NarrowStructure::Bidirectional { centers: (a, b) } => {
                let w = inst.width.unwrap_or(f64::INFINITY) / inst.radius;
                let core = core_region(inst.source_point(), w).map_err(|e| e.to_string())?;
                let pts = &inst.points;
                ensure(
                    sol.set.len() == 3 && sol.set.contains(*a) && sol.set.contains(*b),
                    || format!("seed {seed}: bidirectional set {}", sol.set),
                )?;
                ensure(core.contains(pts[*a]) && core.contains(pts[*b]), || {
                    format!("seed {seed}: centers {a} {b} outside core(s)")
                })?;
                bi += 1;
            }
            NarrowStructure::PathLike { left, right } => {
                for p in [left, right] {
                    ensure(is_shortest_path(&g, s, p), || format!("seed {seed}: {p:?} is not a shortest path"))?;
                }
                let l: HashSet<usize> = left.iter().copied().filter(|&p| p != s).collect();
                let shared = right.iter().filter(|&&p| p != s && l.contains(&p)).count();
                ensure(shared <= 1, || format!("seed {seed}: paths share {shared} points"))?;
                let union: HashSet<usize> = left.iter().chain(right).copied().chain([s]).collect();
                let set: HashSet<usize> = sol.set.indices().iter().copied().collect();
                ensure(union == set, || format!("seed {seed}: set {} is not the union of its paths", sol.set))?;
                paths += 1;
            }
        }
    }
    Ok(format!("{small} small, {bi} bidirectional, {paths} path-like, no violations"))
}

fn hop_instances() -> Vec<(String, StripInstance)> {
    let mut out = Vec::new();
    for seed in 0..240u64 {
        let n = 4 + (seed % 7) as usize;
        let w = NARROW_WIDTHS[seed as usize % 3];
        if let Ok(inst) = gen_random_strip_span(n, w, seed, 0.0, 0.18 * n as f64) {
            out.push((format!("random seed {seed}"), inst));
        }
    }
    for seed in 0..20u64 {
        for (k, cols, two) in [(3, 3, false), (2, 4, false), (2, 2, true)] {
            let w = NARROW_WIDTHS[seed as usize % 3];
            if let Ok(inst) = gen_strings(k, cols, w, two, seed) {
                if inst.len() <= 10 {
                    out.push((format!("strings {k}x{cols} seed {seed}"), inst));
                }
            }
        }
    }
    out
}

fn hop() -> Outcome {
    let insts = hop_instances();
    let (mut compared, mut infeasible) = (0, 0);
    for (label, inst) in &insts {
        for h in 2..=5u32 {
            let bounded = inst.clone().with_hops(h);
            let want = brute_min_broadcast(inst, Some(h), &oracle());
            let got = solve_hop(inst, Some(h));
            if agree(&format!("{label} h {h}"), &bounded, got, want)? {
                compared += 1;
            } else {
                infeasible += 1;
            }
        }
    }
    ensure(insts.len() >= 300, || format!("only {} instances", insts.len()))?;
    Ok(format!(
        "{} instances, {compared} bounded optima equal, {infeasible} infeasible on both sides",
        insts.len()
    ))
}

fn one_sided() -> Outcome {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 100 && seed < 1000 {
        let n = 4 + (seed % 9) as usize;
        let w = NARROW_WIDTHS[seed as usize % 3];
        let inst = if seed.is_multiple_of(2) {
            gen_strings(2 + (seed % 2) as usize, 3, w, false, seed)
        } else {
            gen_random_strip_span(n, w, seed, 0.0, 0.25 * n as f64).map(|mut i| {
                for p in &mut i.points {
                    p.x = p.x.abs();
                }
                i
            })
        }
        .map_err(|e| e.to_string())?;
        seed += 1;
        let g = build_graph(&inst).map_err(|e| e.to_string())?;
        if !g.is_connected() {
            continue;
        }
        let t = compute_levels(&g, inst.source).max_level() as u32;
        if t < 2 {
            continue;
        }
        let (table, _) = one_sided_dp(&inst, t).map_err(|e| format!("seed {}: {e}", seed - 1))?;
        let bad = table.recurrence_violations();
        ensure(bad.is_empty(), || format!("seed {}: cells {bad:?} disagree", seed - 1))?;
        checked += 1;
    }
    ensure(checked >= 100, || format!("only {checked} one-sided instances"))?;
    Ok(format!("{checked} tables, every cell satisfies the recurrence"))
}

fn two_hop() -> Outcome {
    let mut compared = 0;
    for seed in 0..200u64 {
        let n = 3 + (seed % 10) as usize;
        let inst = connected_retry(seed, 50, |sd| gen_random_planar(n, 1.3, sd, 0.0))
            .or_else(|_| gen_random_planar(n, 1.3, seed, 0.0))
            .map_err(|e| e.to_string())?;
        let got = solve_two_hop(&inst);
        let want = brute_min_broadcast(&inst, Some(2), &oracle());
        let set = got.clone().ok();
        if agree(&format!("seed {seed}"), &inst.clone().with_hops(2), got, want)? {
            let set = set.expect("compared results are Ok");
            let seq = sigma(&inst, &set).map_err(|e| e.to_string())?;
            ensure(max_occurrences(&seq) <= 2, || format!("seed {seed}: sigma {seq:?} repeats"))?;
            ensure(!has_alternation(&seq), || format!("seed {seed}: sigma {seq:?} alternates"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared}/200 instances equal to the oracle, sigma properties hold"))
}

fn wide() -> Outcome {
    let mut compared = 0;
    for seed in 0..100u64 {
        let w = [1.0, 1.5, 2.0][seed as usize % 3];
        let n = 5 + (seed % 8) as usize;
        let inst = connected_retry(seed, 100, |sd| gen_random_strip_span(n, w, sd, 0.0, 0.2 * n as f64))
            .or_else(|_| gen_random_strip_span(n, w, seed, 0.0, 0.2 * n as f64))
            .map_err(|e| e.to_string())?;
        let want = brute_min_broadcast(&inst, None, &oracle());
        compared += usize::from(agree(&format!("wide seed {seed}"), &inst, solve_wide(&inst), want)?);
    }
    let mut same = 0;
    for seed in 0..100u64 {
        let n = 3 + (seed % 10) as usize;
        let w = NARROW_WIDTHS[seed as usize % 3];
        let inst = connected_retry(5000 + seed, 50, |sd| gen_random_strip(n, w, sd, 0.0))
            .or_else(|_| gen_random_strip(n, w, 5000 + seed, 0.0))
            .map_err(|e| e.to_string())?;
        let narrow = solve_narrow(&inst);
        same += usize::from(agree(&format!("narrow seed {seed}"), &inst, solve_wide(&inst), narrow)?);
    }
    Ok(format!("{compared}/100 equal to the oracle, {same}/100 narrow instances equal to the narrow solver"))
}

fn density() -> Outcome {
    let got = (mu(3f64.sqrt() / 2.0), mu(3f64.sqrt()));
    ensure(got == (30, 46), || format!("mu values {got:?}, expected (30, 46)"))?;
    Ok("mu(sqrt(3)/2) = 30, mu(sqrt(3)) = 46".into())
}

fn geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut paths = 0;
    for seed in 0..1000u64 {
        let n = 2 + (seed % 11) as usize;
        let inst = gen_random_strip(n, NARROW_WIDTHS[seed as usize % 3], seed, 0.0).map_err(|e| e.to_string())?;
        let g = build_graph(&inst).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if let Some(path) = g.shortest_path(a, b) {
                let gaps = g.path_coverage_gaps(&path);
                ensure(gaps.is_empty(), || format!("seed {seed}: path {path:?} misses {gaps:?}"))?;
                paths += 1;
            }
        }
        let lv = compute_levels(&g, inst.source);
        lv.check_overlap_bound(g.points())
            .map_err(|l| format!("seed {seed}: level {l} overlaps its predecessor by more than 1/2"))?;
    }
    Ok(format!("1000 instances, {paths} shortest paths covered, level overlap bounded"))
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// Golden fixtures: each instance file is rendered with its `auto` solution.
pub const FIXTURES: [&str; 3] = ["narrow", "planar", "wide"];

pub fn render_fixture(name: &str) -> anyhow::Result<String> {
    let path = fixture_dir().join(format!("{name}.inst"));
    let out = solve_file(&path, Algo::Auto, None)?;
    let file = crate::commands::read_instance(&path)?;
    Ok(render_svg(&file.instance, Some(&out.set)))
}

/// Small files mixing narrow, planar and wide instances.
fn small_file(seed: u64) -> StripInstance {
    let n = 3 + (seed % 8) as usize;
    let make = |sd: u64| match seed % 4 {
        0 => gen_random_strip(n, 0.6, sd, 0.0),
        1 => gen_random_strip(n, 0.5, sd, 0.0).map(|i| i.with_hops(3)),
        2 => gen_random_planar(n, 1.3, sd, 0.0).map(|i| i.with_hops(2)),
        _ => gen_random_strip_span(n, 1.4, sd, 0.0, 0.2 * n as f64),
    };
    connected_retry(seed, 50, make)
        .or_else(|_| make(seed))
        .expect("generator arguments are valid")
}

fn plumbing() -> Outcome {
    for seed in 0..100u64 {
        let inst = match seed % 2 {
            0 => gen_random_strip(1 + (seed % 15) as usize, 0.7, seed, 0.0),
            _ => gen_random_planar(1 + (seed % 15) as usize, 2.0, seed, 0.0),
        }
        .map_err(|e| e.to_string())?
        .with_radius(0.5 + seed as f64 / 37.0);
        let meta = InstanceMeta {
            generator: Some("random-strip".into()),
            seed: Some(seed),
        };
        let text = write_instance(&inst, &meta);
        let back = parse_instance(&text).map_err(|e| format!("seed {seed}: {e}"))?;
        let bits = |i: &StripInstance| -> Vec<(u64, u64)> {
            i.points.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect()
        };
        ensure(bits(&back.instance) == bits(&inst) && back.instance == inst && back.meta == meta, || {
            format!("seed {seed}: round trip changed the instance")
        })?;
        ensure(write_instance(&back.instance, &back.meta) == text, || {
            format!("seed {seed}: re-serialization differs")
        })?;
    }

    let dir = std::env::temp_dir().join(format!("broadcast-plumbing-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let result = (|| {
        let mut compared = 0;
        for seed in 0..50u64 {
            let inst = small_file(seed);
            let path = dir.join(format!("{seed}.inst"));
            fs::write(&path, write_instance(&inst, &InstanceMeta::default())).map_err(|e| e.to_string())?;
            let auto = solve_file(&path, Algo::Auto, None);
            let brute = solve_file(&path, Algo::Brute, None);
            match (auto, brute) {
                (Ok(a), Ok(b)) => {
                    ensure(a.report.is_valid(), || format!("file {seed}: auto result invalid"))?;
                    ensure(a.set.len() == b.set.len(), || {
                        format!("file {seed}: auto ({}) size {} vs brute {}", a.algo, a.set.len(), b.set.len())
                    })?;
                    compared += 1;
                }
                (Err(a), Err(b)) => {
                    let inf = |e: &anyhow::Error| e.downcast_ref::<BroadcastError>().is_some_and(|e| e.is_infeasible());
                    ensure(inf(&a) && inf(&b), || format!("file {seed}: {a} vs {b}"))?;
                }
                (a, b) => return Err(format!("file {seed}: auto {:?} vs brute {:?}", a.err(), b.err())),
            }
        }
        Ok(compared)
    })();
    let _ = fs::remove_dir_all(&dir);
    let compared = result?;

    for name in FIXTURES {
        let golden = fs::read_to_string(fixture_dir().join(format!("{name}.svg"))).map_err(|e| format!("{name}: {e}"))?;
        let got = render_fixture(name).map_err(|e| format!("{name}: {e}"))?;
        ensure(got == golden, || format!("fixture {name}: SVG differs from the golden file"))?;
    }
    Ok(format!("100 round trips, {compared}/50 auto = brute, {} SVG goldens", FIXTURES.len()))
}

fn bundle() -> Outcome {
    let mut parts = Vec::new();
    for n_v in 1..=2usize {
        for h in 2..=3usize {
            let inst = gen_bundle(n_v, h).map_err(|e| e.to_string())?;
            let opt = brute_min_broadcast(&inst, Some(h as u32), &oracle()).map_err(|e| e.to_string())?;
            let expect = 1 + n_v * (h - 1);
            ensure(opt.len() == expect, || {
                format!("n_v {n_v} h {h}: optimum {} but expected {expect}", opt.len())
            })?;
            parts.push(format!("({n_v},{h})={expect}"));
        }
    }
    Ok(format!("optima {}", parts.join(" ")))
}

//! Subcommand implementations, independent of argument parsing.

use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use strip_broadcast::hopdp::solve_hop;
use strip_broadcast::io::gen::{gen_chain, gen_random_planar, GeneratorKind};
use strip_broadcast::io::{gen_bundle, gen_random_strip, parse_instance, render_svg, write_instance, InstanceFile, InstanceMeta};
use strip_broadcast::oracle::{brute_min_broadcast, OracleConfig};
use strip_broadcast::twohop::solve_two_hop;
use strip_broadcast::{
    solve_narrow, solve_wide, validate_broadcast, BroadcastError, BroadcastSet, StripInstance, ValidationReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    Auto,
    Narrow,
    Hop,
    TwoHop,
    Wide,
    Brute,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Auto => "auto",
            Algo::Narrow => "narrow",
            Algo::Hop => "hop",
            Algo::TwoHop => "two-hop",
            Algo::Wide => "wide",
            Algo::Brute => "brute",
        })
    }
}

/// The exact algorithm `auto` runs. Planar instances and hop-bounded wide
/// strips only have the exhaustive search, which is limited to small
/// inputs.
pub fn choose_algo(instance: &StripInstance, hops: Option<u32>) -> Result<Algo, BroadcastError> {
    let small = instance.len() <= OracleConfig::default().max_n;
    match (instance.unit_width(), hops) {
        (Some(_), None) if instance.is_narrow() => Ok(Algo::Narrow),
        (Some(_), Some(_)) if instance.is_narrow() => Ok(Algo::Hop),
        (Some(_), None) => Ok(Algo::Wide),
        (None, Some(2)) => Ok(Algo::TwoHop),
        _ if small => Ok(Algo::Brute),
        (None, h) => Err(BroadcastError::Contract(format!(
            "no exact algorithm for a planar instance of {} points with hop bound {h:?}",
            instance.len()
        ))),
        (Some(_), h) => Err(BroadcastError::Contract(format!(
            "no exact algorithm for a wide strip of {} points with hop bound {h:?}",
            instance.len()
        ))),
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub algo: Algo,
    pub set: BroadcastSet,
    pub report: ValidationReport,
}

impl fmt::Display for SolveOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algorithm {}", self.algo)?;
        writeln!(f, "size {}", self.set.len())?;
        let idx: Vec<String> = self.set.indices().iter().map(ToString::to_string).collect();
        writeln!(f, "active {}", idx.join(" "))?;
        write!(f, "validation {}", self.report)
    }
}

pub fn read_instance(path: &Path) -> anyhow::Result<InstanceFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn solve_instance(instance: &StripInstance, algo: Algo, hops: Option<u32>) -> Result<SolveOutcome, BroadcastError> {
    let hops = hops.or(instance.hops);
    let instance = StripInstance {
        hops,
        ..instance.clone()
    };
    let algo = match algo {
        Algo::Auto => choose_algo(&instance, hops)?,
        other => other,
    };
    log::info!("solving {} points with {algo}", instance.len());
    let set = match algo {
        Algo::Auto => unreachable!("resolved above"),
        Algo::Narrow => solve_narrow(&instance)?,
        Algo::Hop => solve_hop(&instance, hops)?,
        Algo::TwoHop => solve_two_hop(&instance)?,
        Algo::Wide => solve_wide(&instance)?,
        Algo::Brute => brute_min_broadcast(&instance, hops, &OracleConfig::default())?,
    };
    let report = validate_broadcast(&instance, &set)?;
    Ok(SolveOutcome { algo, set, report })
}

pub fn solve_file(path: &Path, algo: Algo, hops: Option<u32>) -> anyhow::Result<SolveOutcome> {
    let file = read_instance(path)?;
    Ok(solve_instance(&file.instance, algo, hops)?)
}

pub fn parse_set(text: &str) -> anyhow::Result<BroadcastSet> {
    let mut idx = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        idx.push(part.parse::<usize>().with_context(|| format!("bad index {part:?} in --set"))?);
    }
    Ok(BroadcastSet::new(idx))
}

pub fn verify_file(path: &Path, set: &BroadcastSet) -> anyhow::Result<ValidationReport> {
    let file = read_instance(path)?;
    Ok(validate_broadcast(&file.instance, set)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub width: f64,
    pub seed: u64,
    pub min_sep: f64,
    pub extent: f64,
    pub spacing: f64,
    pub variables: usize,
    pub hops: Option<u32>,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            kind: GeneratorKind::RandomStrip,
            n: 10,
            width: 0.6,
            seed: 0,
            min_sep: 0.0,
            extent: 1.3,
            spacing: 0.9,
            variables: 2,
            hops: None,
        }
    }
}

pub fn generate(spec: &GenSpec) -> anyhow::Result<InstanceFile> {
    let mut meta = InstanceMeta {
        generator: Some(spec.kind.to_string()),
        seed: None,
    };
    let instance = match spec.kind {
        GeneratorKind::RandomStrip => {
            meta.seed = Some(spec.seed);
            gen_random_strip(spec.n, spec.width, spec.seed, spec.min_sep)?
        }
        GeneratorKind::RandomPlanar => {
            meta.seed = Some(spec.seed);
            gen_random_planar(spec.n, spec.extent, spec.seed, spec.min_sep)?
        }
        GeneratorKind::Chain => gen_chain(spec.n, spec.spacing, spec.width)?,
        GeneratorKind::Bundle => {
            let Some(h) = spec.hops else {
                bail!("the bundle generator needs --hops");
            };
            gen_bundle(spec.variables, h as usize)?
        }
    };
    let instance = match spec.hops {
        Some(h) => instance.with_hops(h),
        None => instance,
    };
    Ok(InstanceFile { instance, meta })
}

pub fn write_file(path: &Path, file: &InstanceFile) -> anyhow::Result<()> {
    fs::write(path, write_instance(&file.instance, &file.meta)).with_context(|| format!("writing {}", path.display()))
}

pub fn render_file(path: &Path, set: Option<&BroadcastSet>) -> anyhow::Result<String> {
    let file = read_instance(path)?;
    Ok(render_svg(&file.instance, set))
}

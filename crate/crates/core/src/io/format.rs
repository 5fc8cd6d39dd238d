//! Line-oriented instance files.
//!
//! ```text
//! format 1
//! width 8.0000000000000004e-1
//! radius 1.0000000000000000e0
//! hops 3
//! source 0
//! generator random-strip
//! seed 7
//! points 2
//! 0.0000000000000000e0 4.0000000000000002e-1
//! 1.5000000000000000e0 1.0000000000000001e-1
//! ```
//!
//! `width none` marks a planar instance. `hops`, `generator` and `seed` are
//! optional. Blank lines and `#` comments are ignored.

use std::str::FromStr;

use crate::error::{BroadcastError, Result};
use crate::model::{Point, StripInstance};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstanceMeta {
    pub generator: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub instance: StripInstance,
    pub meta: InstanceMeta,
}

/// 17 significant digits, enough to round-trip any double.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_instance(instance: &StripInstance, meta: &InstanceMeta) -> String {
    let mut out = String::new();
    out.push_str(&format!("format {FORMAT_VERSION}\n"));
    match instance.width {
        Some(w) => out.push_str(&format!("width {}\n", num(w))),
        None => out.push_str("width none\n"),
    }
    out.push_str(&format!("radius {}\n", num(instance.radius)));
    if let Some(h) = instance.hops {
        out.push_str(&format!("hops {h}\n"));
    }
    out.push_str(&format!("source {}\n", instance.source));
    if let Some(g) = &meta.generator {
        out.push_str(&format!("generator {g}\n"));
    }
    if let Some(s) = meta.seed {
        out.push_str(&format!("seed {s}\n"));
    }
    out.push_str(&format!("points {}\n", instance.points.len()));
    for p in &instance.points {
        out.push_str(&format!("{} {}\n", num(p.x), num(p.y)));
    }
    out
}

fn err(line: usize, field: &str, msg: impl std::fmt::Display) -> BroadcastError {
    BroadcastError::Input(format!("line {line}: field `{field}`: {msg}"))
}

fn value<T: FromStr>(line: usize, field: &str, raw: Option<&str>) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = raw.ok_or_else(|| err(line, field, "missing value"))?;
    raw.parse::<T>()
        .map_err(|e| err(line, field, format!("cannot parse {raw:?}: {e}")))
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut version = None;
    let mut width: Option<Option<f64>> = None;
    let mut radius = 1.0;
    let mut hops = None;
    let mut source = None;
    let mut meta = InstanceMeta::default();
    let mut points = None;
    let mut last_line = 0;

    while let Some((ln, line)) = lines.next() {
        last_line = ln;
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let rest = parts.next();
        if parts.next().is_some() {
            return Err(err(ln, key, "unexpected trailing text"));
        }
        match key {
            "format" => {
                let v: u32 = value(ln, key, rest)?;
                if v != FORMAT_VERSION {
                    return Err(err(ln, key, format!("unsupported version {v}")));
                }
                version = Some(v);
            }
            "width" => {
                width = Some(match rest {
                    Some("none") => None,
                    _ => Some(value(ln, key, rest)?),
                });
            }
            "radius" => radius = value(ln, key, rest)?,
            "hops" => hops = Some(value(ln, key, rest)?),
            "source" => source = Some(value(ln, key, rest)?),
            "generator" => meta.generator = Some(value(ln, key, rest)?),
            "seed" => meta.seed = Some(value(ln, key, rest)?),
            "points" => {
                let n: usize = value(ln, key, rest)?;
                let mut pts = Vec::with_capacity(n);
                for k in 0..n {
                    let (pl, pline) = lines
                        .next()
                        .ok_or_else(|| err(ln, key, format!("expected {n} points, found {k}")))?;
                    last_line = pl;
                    let mut xy = pline.split_whitespace();
                    let x: f64 = value(pl, "x", xy.next())?;
                    let y: f64 = value(pl, "y", xy.next())?;
                    if xy.next().is_some() {
                        return Err(err(pl, "point", "expected exactly two coordinates"));
                    }
                    pts.push(Point::new(x, y));
                }
                points = Some(pts);
            }
            other => return Err(err(ln, other, "unknown field")),
        }
    }

    if version.is_none() {
        return Err(err(1, "format", "missing format line"));
    }
    let width = width.ok_or_else(|| err(last_line, "width", "missing"))?;
    let source = source.ok_or_else(|| err(last_line, "source", "missing"))?;
    let points = points.ok_or_else(|| err(last_line, "points", "missing"))?;
    let instance = StripInstance {
        width,
        radius,
        points,
        source,
        hops,
    };
    instance.validate()?;
    for (i, j) in instance.fragile_pairs() {
        log::warn!("points {i} and {j} lie within 1e-9 of the radius from each other");
    }
    Ok(InstanceFile { instance, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trip_with_metadata() {
        let inst = StripInstance::strip(vec![Point::new(0.1, 0.2), Point::new(-1.0 / 3.0, 0.5)], 0.6, 1)
            .with_hops(3);
        let meta = InstanceMeta {
            generator: Some("random-strip".into()),
            seed: Some(9),
        };
        let text = write_instance(&inst, &meta);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.instance, inst);
        assert_eq!(back.meta, meta);
    }

    #[test]
    fn planar_round_trip() {
        let inst = StripInstance::planar(vec![Point::new(1e-300, -7.5)], 0);
        let back = parse_instance(&write_instance(&inst, &InstanceMeta::default())).unwrap();
        assert_eq!(back.instance, inst);
    }

    #[test]
    fn errors_name_line_and_field() {
        let text = "format 1\nwidth 0.5\nsource 0\npoints 1\n0.0 zz\n";
        let e = parse_instance(text).unwrap_err().to_string();
        assert!(e.contains("line 5") && e.contains("`y`"), "{e}");
        let e = parse_instance("format 1\nwidth abc\n").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("`width`"), "{e}");
        let e = parse_instance("format 1\nwidth 0.5\nsource 0\npoints 2\n0 0\n").unwrap_err();
        assert!(e.to_string().contains("`points`"));
    }

    #[test]
    fn rejects_point_outside_strip() {
        let text = "format 1\nwidth 0.5\nsource 0\npoints 1\n0 0.7\n";
        assert!(parse_instance(text).is_err());
    }

    proptest! {
        #[test]
        fn bit_stable(
            pts in prop::collection::vec((any::<f64>(), any::<f64>()), 1..20),
            planar in any::<bool>(),
        ) {
            let pts: Vec<Point> = pts
                .into_iter()
                .map(|(x, y)| Point::new(if x.is_finite() { x } else { 0.0 }, if y.is_finite() { y.abs() % 1.0 } else { 0.0 }))
                .collect();
            let inst = if planar {
                StripInstance::planar(pts, 0)
            } else {
                StripInstance::strip(pts, 1.0, 0)
            };
            let back = parse_instance(&write_instance(&inst, &InstanceMeta::default())).unwrap();
            prop_assert_eq!(back.instance.points.len(), inst.points.len());
            for (a, b) in back.instance.points.iter().zip(&inst.points) {
                prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
                prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
            }
        }
    }
}

//! Hidden-set file formats and result emission.
//!
//! Binary sets: header `B d n`, then n lines of d characters over {0,1}.
//! Sphere sets: header `S d n`, then n lines of d space-separated decimals;
//! vectors within 1e-6 of unit norm are renormalized, anything further off
//! is rejected. Both forms are UTF-8 with LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cube::BinaryPoint;
use crate::error::{Error, Result};
use crate::geometry::{SpherePoint, Vector};
use crate::oracle::{HiddenPoints, HiddenSet, TieBreakPolicy};

const SPHERE_NORM_SLACK: f64 = 1e-6;

pub fn format_hidden_points(points: &HiddenPoints) -> String {
    let mut out = String::new();
    match points {
        HiddenPoints::Binary(pts) => {
            writeln!(out, "B {} {}", pts[0].dim(), pts.len()).unwrap();
            for p in pts {
                writeln!(out, "{p}").unwrap();
            }
        }
        HiddenPoints::Sphere(pts) => {
            writeln!(out, "S {} {}", pts[0].dim(), pts.len()).unwrap();
            for p in pts {
                let line: Vec<String> = p.vector().as_slice().iter().map(|c| c.to_string()).collect();
                writeln!(out, "{}", line.join(" ")).unwrap();
            }
        }
    }
    out
}

pub fn write_hidden_points(path: &Path, points: &HiddenPoints) -> Result<()> {
    fs::write(path, format_hidden_points(points))?;
    Ok(())
}

pub fn parse_hidden_points(text: &str) -> Result<HiddenPoints> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty hidden-set file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::Parse(format!("bad header {header:?}, expected `B|S d n`")));
    }
    let d: usize = fields[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension {:?}", fields[1])))?;
    let n: usize = fields[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad count {:?}", fields[2])))?;
    let body: Vec<&str> = lines.collect();
    if body.len() != n {
        return Err(Error::Parse(format!("expected {n} point lines, found {}", body.len())));
    }
    match fields[0] {
        "B" => {
            let mut points = Vec::with_capacity(n);
            for (i, line) in body.iter().enumerate() {
                if line.len() != d {
                    return Err(Error::Parse(format!("line {}: expected {d} characters", i + 2)));
                }
                let p: BinaryPoint = line.parse()?;
                if points.contains(&p) {
                    return Err(Error::Parse(format!("line {}: duplicate point {p}", i + 2)));
                }
                points.push(p);
            }
            Ok(HiddenPoints::Binary(points))
        }
        "S" => {
            let mut points = Vec::with_capacity(n);
            for (i, line) in body.iter().enumerate() {
                let coords: Vec<f64> = line
                    .split(' ')
                    .map(|tok| {
                        tok.parse::<f64>()
                            .map_err(|_| Error::Parse(format!("line {}: bad number {tok:?}", i + 2)))
                    })
                    .collect::<Result<_>>()?;
                if coords.len() != d {
                    return Err(Error::Parse(format!("line {}: expected {d} coordinates", i + 2)));
                }
                let v = Vector::new(coords)?;
                if (v.norm() - 1.0).abs() > SPHERE_NORM_SLACK {
                    return Err(Error::Parse(format!(
                        "line {}: vector norm {} is not within {SPHERE_NORM_SLACK} of 1",
                        i + 2,
                        v.norm()
                    )));
                }
                points.push(SpherePoint::renormalized(v)?);
            }
            Ok(HiddenPoints::Sphere(points))
        }
        other => Err(Error::Parse(format!("unknown variant tag {other:?}"))),
    }
}

pub fn load_hidden_set(path: &Path, policy: TieBreakPolicy, eps_tie: f64) -> Result<HiddenSet> {
    let text = fs::read_to_string(path)?;
    match parse_hidden_points(&text)? {
        HiddenPoints::Binary(pts) => HiddenSet::new_binary(pts, policy),
        HiddenPoints::Sphere(pts) => HiddenSet::new_sphere(pts, policy, eps_tie),
    }
}

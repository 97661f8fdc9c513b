//! Field dumps: flat little-endian `f64` binary (`.bin`) or CSV, each with a
//! JSON sidecar `{n, kind}` at `<path>.json`.
//!
//! Binary layout is component-major, then row-major (`j * n + i`). CSV has
//! one row per node: `i,j,x,y,<components>`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::field::{FieldKind, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::format::sig17;

#[derive(Debug, Clone, PartialEq)]
pub enum PlanarField {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl PlanarField {
    pub fn n(&self) -> usize {
        match self {
            PlanarField::Scalar(f) => f.n(),
            PlanarField::Vector(v) => v.n(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            PlanarField::Scalar(_) => FieldKind::Scalar,
            PlanarField::Vector(_) => FieldKind::Vector,
        }
    }

    fn components(&self) -> Vec<&ScalarField> {
        match self {
            PlanarField::Scalar(f) => vec![f],
            PlanarField::Vector(v) => vec![&v.x, &v.y],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: usize,
    pub kind: FieldKind,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn write_field(path: &Path, field: &PlanarField) -> Result<()> {
    let n = field.n();
    let comps = field.components();
    let bytes = if is_csv(path) {
        let mut out = String::from(if comps.len() == 1 { "i,j,x,y,value\n" } else { "i,j,x,y,u1,u2\n" });
        let h = comps[0].spacing();
        for j in 0..n {
            for i in 0..n {
                out.push_str(&format!("{i},{j},{},{}", sig17(i as f64 * h), sig17(j as f64 * h)));
                for c in &comps {
                    out.push(',');
                    out.push_str(&sig17(c.at(i, j)));
                }
                out.push('\n');
            }
        }
        out.into_bytes()
    } else {
        let mut out = Vec::with_capacity(8 * n * n * comps.len());
        for c in &comps {
            for v in c.values() {
                out.write_all(&v.to_le_bytes()).expect("writing to a Vec cannot fail");
            }
        }
        out
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let side = Sidecar { n, kind: field.kind() };
    let sp = sidecar_path(path);
    fs::write(&sp, serde_json::to_vec_pretty(&side)?).map_err(|e| Error::io(&sp, e))
}

pub fn read_field(path: &Path) -> Result<PlanarField> {
    let sp = sidecar_path(path);
    let side: Sidecar = serde_json::from_slice(&fs::read(&sp).map_err(|e| Error::io(&sp, e))?)?;
    let ncomp = match side.kind {
        FieldKind::Scalar => 1,
        FieldKind::Vector => 2,
    };
    let nn = side.n * side.n;
    let mut comps: Vec<Vec<f64>> = vec![Vec::with_capacity(nn); ncomp];

    if is_csv(path) {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (ln, line) in text.lines().skip(1).enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 + ncomp {
                return Err(Error::Integrity(format!("{}: line {} has {} columns", path.display(), ln + 2, cols.len())));
            }
            for (c, comp) in comps.iter_mut().enumerate() {
                let v: f64 = cols[4 + c]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Integrity(format!("{}: bad number on line {}", path.display(), ln + 2)))?;
                comp.push(v);
            }
        }
    } else {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() != 8 * nn * ncomp {
            return Err(Error::Integrity(format!(
                "{}: expected {} bytes, found {}",
                path.display(),
                8 * nn * ncomp,
                bytes.len()
            )));
        }
        for (k, chunk) in bytes.chunks_exact(8).enumerate() {
            comps[k / nn].push(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
    }

    let mut it = comps.into_iter();
    let first = ScalarField::from_values(side.n, it.next().unwrap())?;
    Ok(match side.kind {
        FieldKind::Scalar => PlanarField::Scalar(first),
        FieldKind::Vector => {
            PlanarField::Vector(VectorField::new(first, ScalarField::from_values(side.n, it.next().unwrap())?)?)
        }
    })
}

//! Snapshot CSV files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::format::{csv_row, sig17};
use crate::material::MaterialLaw;
use crate::radial::{RadialGrid, RadialState};

pub const SNAPSHOT_DIR: &str = "snapshots";
pub const HEADER: &str = "r_center,rho,v_face_left,F,stress";

pub fn snapshot_name(index: usize) -> String {
    format!("snapshot_{index:05}.csv")
}

/// Renders one snapshot; `F` uses `p_far` as the far-field pressure.
pub fn render_snapshot(st: &RadialState, law: &MaterialLaw, p_far: f64) -> String {
    let stress = st.stress(law);
    let flux = st.effective_flux(law, p_far);
    let mut out = format!("# t={}\n{HEADER}\n", sig17(st.t));
    for i in 0..st.n_cells() {
        out.push_str(&csv_row(&[st.grid.center(i), st.rho[i], st.v[i], flux[i], stress[i]]));
        out.push('\n');
    }
    out
}

/// Writes every snapshot under `dir/snapshots`; returns the relative paths.
pub fn write_snapshots(dir: &Path, states: &[RadialState], law: &MaterialLaw, p_far: f64) -> Result<Vec<String>> {
    let sub = dir.join(SNAPSHOT_DIR);
    fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
    let mut names = Vec::with_capacity(states.len());
    for (k, st) in states.iter().enumerate() {
        let name = snapshot_name(k);
        let path = sub.join(&name);
        fs::write(&path, render_snapshot(st, law, p_far)).map_err(|e| Error::io(&path, e))?;
        names.push(format!("{SNAPSHOT_DIR}/{name}"));
    }
    Ok(names)
}

fn parse_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Integrity(format!("{}:{line}: {msg}", path.display()))
}

/// Reads a snapshot written by [`render_snapshot`] back into a state on
/// `grid`. The outer boundary velocity is zero.
pub fn read_snapshot(path: &Path, grid: RadialGrid, delta_floor: f64) -> Result<RadialState> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let t = lines
        .next()
        .and_then(|l| l.strip_prefix("# t="))
        .ok_or_else(|| parse_err(path, 1, "missing '# t=' line"))?
        .trim()
        .parse::<f64>()
        .map_err(|e| parse_err(path, 1, e))?;
    if lines.next() != Some(HEADER) {
        return Err(parse_err(path, 2, format!("expected header '{HEADER}'")));
    }
    let mut rho = Vec::with_capacity(grid.n_cells);
    let mut v = Vec::with_capacity(grid.n_cells + 1);
    for (k, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(path, k + 3, e))?;
        if cols.len() != 5 {
            return Err(parse_err(path, k + 3, "expected 5 columns"));
        }
        rho.push(cols[1]);
        v.push(cols[2]);
    }
    if rho.len() != grid.n_cells {
        return Err(Error::Integrity(format!(
            "{}: {} rows for a grid of {} cells",
            path.display(),
            rho.len(),
            grid.n_cells
        )));
    }
    v.push(0.0);
    let st = RadialState {
        t,
        grid,
        rho,
        v,
        delta_floor,
    };
    st.check_integrity()?;
    Ok(st)
}

/// Snapshot files of a run directory in index order.
pub fn list_snapshots(dir: &Path) -> Result<Vec<PathBuf>> {
    let sub = dir.join(SNAPSHOT_DIR);
    let mut files: Vec<PathBuf> = fs::read_dir(&sub)
        .map_err(|e| Error::io(&sub, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("snapshot_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Integrity(format!("no snapshots in {}", sub.display())));
    }
    Ok(files)
}

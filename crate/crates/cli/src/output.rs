//! Curve CSV and deformed-mesh export.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use polyvem::mesh::MeshFile;
use polyvem::solver::Probe;
use polyvem::{PolygonalMesh, StepRecord};
use serde::{Deserialize, Serialize};

/// Full precision: 17 significant digits round-trip every `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column names of the curve file.
pub fn curve_header(probes: &[Probe], reaction_tags: &[String]) -> Vec<String> {
    let mut cols: Vec<String> = ["step", "time", "factor", "temperature"].map(String::from).to_vec();
    for p in probes {
        cols.push(format!("{}_ux", p.name));
        cols.push(format!("{}_uy", p.name));
    }
    for tag in reaction_tags {
        cols.push(format!("reaction_{tag}_x"));
        cols.push(format!("reaction_{tag}_y"));
    }
    cols.extend(["iterations", "substeps", "max_inelastic_strain"].map(String::from));
    cols
}

/// One row per accepted step: step, time, load factor, temperature, probe
/// displacements, reaction sums per constrained tag and Newton statistics.
pub fn curve_csv(probes: &[Probe], records: &[StepRecord]) -> String {
    let tags: Vec<String> = records.first().map(|r| r.reactions.keys().cloned().collect()).unwrap_or_default();
    let mut out = curve_header(probes, &tags).join(",");
    out.push('\n');
    for r in records {
        let mut row = vec![r.step.to_string(), num(r.time), num(r.factor), num(r.temperature)];
        for u in &r.probes {
            row.push(num(u[0]));
            row.push(num(u[1]));
        }
        for tag in &tags {
            let f = r.reactions.get(tag).copied().unwrap_or([0.0, 0.0]);
            row.push(num(f[0]));
            row.push(num(f[1]));
        }
        row.push(r.iterations.to_string());
        row.push(r.substeps.to_string());
        row.push(num(r.max_inelastic_strain));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Curve loaded back from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Curve {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let columns: Vec<String> = lines.next().context("empty curve file")?.split(',').map(String::from).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|v| v.parse::<f64>().with_context(|| format!("row {}: bad number {v:?}", i + 1)))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                bail!("row {} has {} values, header has {}", i + 1, row.len(), columns.len());
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Native mesh document with displaced vertices and the displacements that
/// produced them. Loads as a plain mesh (extra fields are ignored).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeformedMeshFile {
    #[serde(flatten)]
    pub mesh: MeshFile,
    /// Vertex displacements, unscaled, parallel to `vertices`.
    pub displacement: Vec<[f64; 2]>,
    pub scale: f64,
}

/// Mesh with vertices moved to `x + scale * u`.
pub fn deformed_mesh(mesh: &PolygonalMesh, u: &[[f64; 2]], scale: f64) -> Result<DeformedMeshFile> {
    if u.len() != mesh.vertex_count() {
        bail!("displacement has {} entries, mesh has {} vertices", u.len(), mesh.vertex_count());
    }
    // no geometry checks: a large visual scale may legitimately fold cells
    let mut data = mesh.to_file_data();
    for (x, d) in data.vertices.iter_mut().zip(u) {
        *x = [x[0] + scale * d[0], x[1] + scale * d[1]];
    }
    Ok(DeformedMeshFile {
        mesh: data,
        displacement: u.to_vec(),
        scale,
    })
}

pub fn export_deformed_mesh(mesh: &PolygonalMesh, u: &[[f64; 2]], scale: f64, path: &Path) -> Result<()> {
    let doc = deformed_mesh(mesh, u, scale)?;
    let text = serde_json::to_string(&doc)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

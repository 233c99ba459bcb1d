//! Run specs: everything needed to reproduce one analysis, as a
//! single JSON document (see `schema/run-spec.schema.json`).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use polyvem::mesh::{
    generate_annulus_quads, generate_arch_quads, generate_plate_with_hole, generate_rectangle_quads, MeshFormat,
};
use polyvem::{AnalysisConfig, Material, ModelParams, PolygonalMesh, Regime};
use serde::{Deserialize, Serialize};

/// Where the mesh comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeshSource {
    /// Mesh file; relative paths are resolved against the spec file's directory.
    File {
        path: PathBuf,
        #[serde(default)]
        format: MeshFormat,
    },
    /// `[0, lx] x [0, ly]` grid; tags `bottom`, `right`, `top`, `left`.
    Rectangle { lx: f64, ly: f64, nx: usize, ny: usize },
    /// Full or quarter annulus; tags `inner`, `outer`, `theta0`, `theta90`.
    Annulus {
        r_inner: f64,
        r_outer: f64,
        quarter: bool,
        n_r: usize,
        n_theta: usize,
    },
    /// Upper half annulus; tags `inner`, `outer`, `free`, `clamped`.
    Arch {
        r_inner: f64,
        r_outer: f64,
        n_r: usize,
        n_theta: usize,
    },
    /// Quarter plate with a central hole; tags `hole`, `symmetry-x`,
    /// `symmetry-y`, `right`, `top`.
    PlateWithHole {
        half_width: f64,
        half_height: f64,
        radius: f64,
        refinement: usize,
    },
}

impl MeshSource {
    pub fn build(&self, base_dir: &Path) -> Result<PolygonalMesh> {
        let mesh = match self {
            MeshSource::File { path, format } => {
                let full = base_dir.join(path);
                PolygonalMesh::load(&full, *format).with_context(|| format!("loading mesh {}", full.display()))?
            }
            MeshSource::Rectangle { lx, ly, nx, ny } => generate_rectangle_quads(*lx, *ly, *nx, *ny)?,
            MeshSource::Annulus {
                r_inner,
                r_outer,
                quarter,
                n_r,
                n_theta,
            } => generate_annulus_quads(*r_inner, *r_outer, *quarter, *n_r, *n_theta)?,
            MeshSource::Arch {
                r_inner,
                r_outer,
                n_r,
                n_theta,
            } => generate_arch_quads(*r_inner, *r_outer, *n_r, *n_theta)?,
            MeshSource::PlateWithHole {
                half_width,
                half_height,
                radius,
                refinement,
            } => generate_plate_with_hole(*half_width, *half_height, *radius, *refinement)?,
        };
        Ok(mesh)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory; relative paths are resolved against the spec file's directory.
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Multiplier applied to the displacements in the deformed mesh.
    #[serde(default = "default_scale")]
    pub deformed_scale: f64,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_scale() -> f64 {
    1.0
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            deformed_scale: default_scale(),
        }
    }
}

/// A complete analysis: mesh, material, regime, discretization order, load
/// program, boundary conditions, probes and output location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub mesh: MeshSource,
    pub material: ModelParams,
    pub regime: Regime,
    #[serde(flatten)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A spec with its mesh and material built and checked.
pub struct PreparedRun {
    pub mesh: PolygonalMesh,
    pub material: Material,
    pub config: AnalysisConfig,
    pub out_dir: PathBuf,
    pub deformed_scale: f64,
}

impl RunSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing run spec")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run specs always serialize")
    }

    /// Validates the spec and builds the mesh and material. Everything that
    /// can be checked before the first increment is checked here.
    pub fn prepare(&self, base_dir: &Path) -> Result<PreparedRun> {
        let k = self.analysis.order;
        if !(1..=3).contains(&k) {
            bail!("invalid field 'order': must be 1, 2 or 3 (got {k})");
        }
        for probe in &self.analysis.probes {
            if probe.name.is_empty() || probe.name.contains([',', '"', '\n', '\r']) {
                bail!("invalid probe name {:?}: must be non-empty without commas, quotes or newlines", probe.name);
            }
        }
        if !(self.output.deformed_scale.is_finite()) {
            bail!("invalid field 'output.deformed_scale': must be finite");
        }
        self.material.validate().context("invalid field 'material'")?;
        let material = Material::new(self.material.clone(), self.regime).context("invalid field 'material'")?;
        let mesh = self.mesh.build(base_dir).context("building mesh")?;
        for tag in self.analysis.dirichlet.iter().map(|d| &d.tag).chain(self.analysis.tractions.iter().map(|t| &t.tag)) {
            if !mesh.has_tag(tag) {
                let known: Vec<&str> = mesh.boundary_tags().keys().map(String::as_str).collect();
                bail!("unknown boundary tag '{tag}' (mesh has: {})", known.join(", "));
            }
        }
        self.analysis.validate(&mesh).context("invalid analysis settings")?;
        Ok(PreparedRun {
            mesh,
            material,
            config: self.analysis.clone(),
            out_dir: base_dir.join(&self.output.dir),
            deformed_scale: self.output.deformed_scale,
        })
    }
}

//! Built-in benchmark specs: a thick-walled viscoelastic cylinder under
//! sustained internal pressure, a perforated plastic plate pulled at its top
//! edge, and a shape-memory-alloy arch under a load-unload-heat program.

use std::fmt;
use std::path::PathBuf;

use anyhow::{bail, Result};
use polyvem::materials::{MaxwellParams, MisesParams, PronyTerm, SmaParams, YieldSurface};
use polyvem::solver::{
    Component, DirichletCondition, LoadBranch, LoadPoint, LoadProgram, NewtonSettings, Probe, TractionCondition,
    TractionLoad,
};
use polyvem::{AnalysisConfig, ModelParams, Regime};
use serde::{Deserialize, Serialize};

use crate::spec::{MeshSource, OutputSpec, RunSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BenchName {
    /// Cylinder with Prony weights (mu_0, mu_1) = (0.01, 0.99).
    CylinderVe1,
    /// Cylinder with Prony weights (mu_0, mu_1) = (0.3, 0.7).
    CylinderVe2,
    /// Perforated plate, perfectly plastic von Mises material.
    Plate,
    /// Shape-memory-alloy arch.
    SmaArch,
}

impl BenchName {
    pub const ALL: [BenchName; 4] = [
        BenchName::CylinderVe1,
        BenchName::CylinderVe2,
        BenchName::Plate,
        BenchName::SmaArch,
    ];

    /// Mesh density level used when none is requested.
    pub fn reference_density(self) -> usize {
        match self {
            BenchName::CylinderVe1 | BenchName::CylinderVe2 => 2,
            BenchName::Plate => 3,
            BenchName::SmaArch => 2,
        }
    }
}

impl fmt::Display for BenchName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BenchName::CylinderVe1 => "cylinder-ve1",
            BenchName::CylinderVe2 => "cylinder-ve2",
            BenchName::Plate => "plate",
            BenchName::SmaArch => "sma-arch",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub order: usize,
    /// Mesh density level (>= 1); `None` selects the reference density.
    ///
    /// * cylinder: `8 d x 8 d` quarter annulus;
    /// * plate: generator refinement `d` (`4 d` divisions per 45 degrees of hole);
    /// * sma-arch: `2 d` radial by `16 d` angular divisions.
    pub density: Option<usize>,
    /// Number of displacement increments of the plate (default 400).
    pub plate_increments: Option<usize>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            order: 2,
            density: None,
            plate_increments: None,
        }
    }
}

pub const CYLINDER_INNER_RADIUS: f64 = 2.0;
pub const CYLINDER_OUTER_RADIUS: f64 = 4.0;
pub const CYLINDER_PRESSURE: f64 = 10.0;
pub const CYLINDER_STEPS: usize = 20;

pub const PLATE_HALF_WIDTH: f64 = 100.0;
pub const PLATE_HALF_HEIGHT: f64 = 180.0;
pub const PLATE_HOLE_RADIUS: f64 = 50.0;
pub const PLATE_TOP_DISPLACEMENT: f64 = 2.0;
pub const PLATE_INCREMENTS: usize = 400;

pub const ARCH_INNER_RADIUS: f64 = 3.5;
pub const ARCH_OUTER_RADIUS: f64 = 4.5;
pub const ARCH_LOAD: f64 = 60.0;
pub const ARCH_ROOM_TEMPERATURE: f64 = 223.0;
pub const ARCH_HOT_TEMPERATURE: f64 = 303.0;
pub const ARCH_BRANCH_INCREMENTS: usize = 40;
pub const ARCH_HEATING_INCREMENTS: usize = 10;

pub fn cylinder_material(name: BenchName) -> MaxwellParams {
    let (mu0, mu1) = match name {
        BenchName::CylinderVe2 => (0.3, 0.7),
        _ => (0.01, 0.99),
    };
    MaxwellParams {
        young: 1000.0,
        poisson: 0.3,
        mu0,
        terms: vec![PronyTerm {
            weight: mu1,
            relaxation_time: 1.0,
        }],
    }
}

pub fn plate_material() -> MisesParams {
    MisesParams {
        young: 7000.0,
        poisson: 0.3,
        yield_stress: 24.3,
        kinematic_hardening: 0.0,
        isotropic_hardening: 0.0,
        yield_surface: YieldSurface::RootTwoThirds,
    }
}

pub fn arch_material() -> SmaParams {
    SmaParams {
        young: 53000.0,
        poisson: 0.36,
        eps_l: 0.04,
        m_f: 223.0,
        h: 1000.0,
        beta: 2.1,
        yield_stress: 50.0,
    }
}

fn probe(name: &str, x: f64, y: f64) -> Probe {
    Probe {
        name: name.into(),
        point: [x, y],
    }
}

/// The built-in spec of a benchmark, writing to `out_dir`.
pub fn bench_spec(name: BenchName, options: &BenchOptions, out_dir: PathBuf) -> Result<RunSpec> {
    let d = options.density.unwrap_or(name.reference_density());
    if d == 0 {
        bail!("density level must be at least 1");
    }
    if options.plate_increments.is_some() && name != BenchName::Plate {
        bail!("an increment count can only be set for the plate benchmark");
    }
    let output = OutputSpec {
        dir: out_dir,
        deformed_scale: 1.0,
    };
    let spec = match name {
        BenchName::CylinderVe1 | BenchName::CylinderVe2 => RunSpec {
            mesh: MeshSource::Annulus {
                r_inner: CYLINDER_INNER_RADIUS,
                r_outer: CYLINDER_OUTER_RADIUS,
                quarter: true,
                n_r: 8 * d,
                n_theta: 8 * d,
            },
            material: ModelParams::Maxwell(cylinder_material(name)),
            regime: Regime::PlaneStrain,
            analysis: AnalysisConfig {
                order: options.order,
                // pressure applied in the first unit step, then held
                load_program: LoadProgram {
                    start: LoadPoint::new(0.0, 0.0, 0.0),
                    branches: vec![
                        LoadBranch {
                            end: LoadPoint::new(1.0, 1.0, 0.0),
                            increments: 1,
                        },
                        LoadBranch {
                            end: LoadPoint::new(CYLINDER_STEPS as f64, 1.0, 0.0),
                            increments: CYLINDER_STEPS - 1,
                        },
                    ],
                },
                newton: NewtonSettings::default(),
                dirichlet: vec![
                    DirichletCondition::fixed("theta0", Component::Y, 0.0),
                    DirichletCondition::fixed("theta90", Component::X, 0.0),
                ],
                tractions: vec![TractionCondition {
                    tag: "inner".into(),
                    load: TractionLoad::Pressure {
                        pressure: CYLINDER_PRESSURE,
                    },
                }],
                body_force: [0.0, 0.0],
                probes: vec![
                    probe("A", CYLINDER_INNER_RADIUS, 0.0),
                    probe("B", CYLINDER_OUTER_RADIUS, 0.0),
                ],
            },
            output,
        },
        BenchName::Plate => RunSpec {
            mesh: MeshSource::PlateWithHole {
                half_width: PLATE_HALF_WIDTH,
                half_height: PLATE_HALF_HEIGHT,
                radius: PLATE_HOLE_RADIUS,
                refinement: d,
            },
            material: ModelParams::Mises(plate_material()),
            regime: Regime::PlaneStrain,
            analysis: AnalysisConfig {
                order: options.order,
                load_program: LoadProgram::proportional(options.plate_increments.unwrap_or(PLATE_INCREMENTS)),
                newton: NewtonSettings::default(),
                dirichlet: vec![
                    DirichletCondition::fixed("symmetry-x", Component::Y, 0.0),
                    DirichletCondition::fixed("symmetry-y", Component::X, 0.0),
                    DirichletCondition::fixed("right", Component::X, 0.0),
                    DirichletCondition::fixed("top", Component::Y, PLATE_TOP_DISPLACEMENT),
                ],
                tractions: Vec::new(),
                body_force: [0.0, 0.0],
                probes: vec![probe("A", PLATE_HOLE_RADIUS, 0.0), probe("B", 0.0, PLATE_HOLE_RADIUS)],
            },
            output,
        },
        BenchName::SmaArch => {
            let t = ARCH_ROOM_TEMPERATURE;
            let branch = |time: f64, factor: f64, temperature: f64, increments: usize| LoadBranch {
                end: LoadPoint::new(time, factor, temperature),
                increments,
            };
            let n = ARCH_BRANCH_INCREMENTS;
            RunSpec {
                mesh: MeshSource::Arch {
                    r_inner: ARCH_INNER_RADIUS,
                    r_outer: ARCH_OUTER_RADIUS,
                    n_r: 2 * d,
                    n_theta: 16 * d,
                },
                material: ModelParams::Sma(arch_material()),
                regime: Regime::PlaneStress,
                analysis: AnalysisConfig {
                    order: options.order,
                    load_program: LoadProgram {
                        start: LoadPoint::new(0.0, 0.0, t),
                        branches: vec![
                            branch(1.0, 1.0, t, n),
                            branch(2.0, 0.0, t, n),
                            branch(3.0, -1.0, t, n),
                            branch(4.0, 0.0, t, n),
                            branch(5.0, 0.0, ARCH_HOT_TEMPERATURE, ARCH_HEATING_INCREMENTS),
                        ],
                    },
                    newton: NewtonSettings {
                        max_bisections: 6,
                        ..NewtonSettings::default()
                    },
                    dirichlet: vec![
                        DirichletCondition::fixed("clamped", Component::X, 0.0),
                        DirichletCondition::fixed("clamped", Component::Y, 0.0),
                    ],
                    tractions: vec![TractionCondition {
                        tag: "free".into(),
                        load: TractionLoad::Uniform {
                            traction: [ARCH_LOAD, 0.0],
                        },
                    }],
                    body_force: [0.0, 0.0],
                    probes: vec![probe("A", ARCH_OUTER_RADIUS, 0.0)],
                },
                output,
            }
        }
    };
    Ok(spec)
}

//! Arbitrary-order virtual element solver for quasi-static inelastic 2D
//! solids on polygonal meshes.
//!
//! * [`mesh`]: conforming polygonal meshes, I/O and structured generators;
//! * [`quadrature`]: triangle, edge and polygon integration rules;
//! * [`vem`]: element dofs, strain projection, stabilization and loads;
//! * [`materials`]: backward-Euler constitutive updates with tangents;
//! * [`solver`]: assembly, boundary conditions and incremental Newton.

pub mod materials;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod vem;
pub mod voigt;

pub use materials::{Material, MaterialError, MaterialState, ModelParams, Regime, StepContext, UpdateResult};
pub use mesh::{ElementGeometry, MeshError, PolygonalMesh};
pub use quadrature::{QuadratureError, QuadratureRule};
pub use solver::{run_analysis, Analysis, AnalysisConfig, AnalysisResult, SolverError, StepRecord};
pub use vem::{ElementOperators, VemError};
pub use voigt::VoigtTensor;

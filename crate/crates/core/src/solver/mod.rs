//! Incremental quasi-static analysis.
//!
//! Loads, imposed displacements and temperature follow a piecewise-linear
//! program in pseudo-time. Each increment is solved with a full Newton
//! method on the unconstrained dofs: the global tangent is assembled from the
//! element consistent tangents (computed in parallel, scattered in cell
//! order) and factored with a profile LU in reverse Cuthill-McKee ordering.
//! Material states are committed only when an increment converges.

pub mod dofs;
pub mod skyline;

use std::collections::BTreeMap;

use nalgebra::{DVector, Matrix3, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::materials::{Material, MaterialState, StepContext, UpdateResult};
use crate::mesh::{MeshError, PolygonalMesh};
use crate::vem::{
    alpha_scaling, body_load_vector, element_internal_force, traction_load_vector, ElementOperators, VemError,
    MAX_ORDER,
};

pub use dofs::DofMap;
pub use skyline::{reverse_cuthill_mckee, SkylineMatrix};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("element {cell}: {source}")]
    Element {
        cell: usize,
        #[source]
        source: VemError,
    },
    #[error("unknown boundary tag '{0}'")]
    UnknownTag(String),
    #[error("conflicting constraints on dof {dof} (node at ({x:.6e}, {y:.6e})): {first} vs {second}")]
    ConflictingConstraint {
        dof: usize,
        x: f64,
        y: f64,
        first: f64,
        second: f64,
    },
    #[error("invalid analysis configuration: {0}")]
    InvalidConfig(String),
    #[error("step {step}: singular tangent at dof {dof} (pivot {pivot:.3e}); check the boundary conditions")]
    Singular { step: usize, dof: usize, pivot: f64 },
    #[error("step {step}: Newton did not converge in {iterations} iterations (residual norms {residuals:?})")]
    NotConverged {
        step: usize,
        iterations: usize,
        residuals: Vec<f64>,
    },
}

/// State of the load program at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadPoint {
    pub time: f64,
    /// Multiplier of body force, tractions and imposed displacements.
    pub factor: f64,
    #[serde(default)]
    pub temperature: f64,
}

impl LoadPoint {
    pub fn new(time: f64, factor: f64, temperature: f64) -> Self {
        Self {
            time,
            factor,
            temperature,
        }
    }

    fn lerp(&self, other: &Self, s: f64) -> Self {
        Self {
            time: self.time + s * (other.time - self.time),
            factor: self.factor + s * (other.factor - self.factor),
            temperature: self.temperature + s * (other.temperature - self.temperature),
        }
    }
}

/// Linear segment of the load program, split into equal increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadBranch {
    pub end: LoadPoint,
    pub increments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProgram {
    pub start: LoadPoint,
    pub branches: Vec<LoadBranch>,
}

impl LoadProgram {
    /// Factor rising from 0 to 1 over `t in [0, 1]` in `steps` increments.
    pub fn proportional(steps: usize) -> Self {
        Self {
            start: LoadPoint::new(0.0, 0.0, 0.0),
            branches: vec![LoadBranch {
                end: LoadPoint::new(1.0, 1.0, 0.0),
                increments: steps,
            }],
        }
    }

    pub fn step_count(&self) -> usize {
        self.branches.iter().map(|b| b.increments).sum()
    }

    /// End points of all increments (the start point excluded).
    pub fn points(&self) -> Vec<LoadPoint> {
        let mut out = Vec::with_capacity(self.step_count());
        let mut from = self.start;
        for branch in &self.branches {
            for i in 1..=branch.increments {
                if i == branch.increments {
                    out.push(branch.end);
                } else {
                    out.push(from.lerp(&branch.end, i as f64 / branch.increments as f64));
                }
            }
            from = branch.end;
        }
        out
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.branches.is_empty() || self.step_count() == 0 {
            return Err(SolverError::InvalidConfig("load_program needs at least one increment".into()));
        }
        let mut t = self.start.time;
        for (i, branch) in self.branches.iter().enumerate() {
            if branch.increments == 0 {
                return Err(SolverError::InvalidConfig(format!(
                    "load_program.branches[{i}].increments must be at least 1"
                )));
            }
            if !(branch.end.time > t) {
                return Err(SolverError::InvalidConfig(format!(
                    "load_program.branches[{i}].end.time must exceed the previous time {t}"
                )));
            }
            t = branch.end.time;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    X,
    Y,
}

impl Component {
    pub fn index(self) -> usize {
        match self {
            Component::X => 0,
            Component::Y => 1,
        }
    }
}

/// Imposed displacement component `factor * (value + gradient . x)` on every
/// node of the tagged boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCondition {
    pub tag: String,
    pub component: Component,
    #[serde(default)]
    pub value: f64,
    #[serde(default)]
    pub gradient: [f64; 2],
}

impl DirichletCondition {
    pub fn fixed(tag: &str, component: Component, value: f64) -> Self {
        Self {
            tag: tag.into(),
            component,
            value,
            gradient: [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TractionLoad {
    /// Constant traction vector per unit length.
    Uniform { traction: [f64; 2] },
    /// Normal pressure `p`: traction `-p n` with `n` the outward normal.
    Pressure { pressure: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractionCondition {
    pub tag: String,
    #[serde(flatten)]
    pub load: TractionLoad,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonSettings {
    pub tol_rel: f64,
    /// Absolute residual tolerance; by default `1e-10` times the larger of
    /// the external load and reaction norms.
    pub tol_abs: Option<f64>,
    pub max_iter: usize,
    /// Times a failed increment may be bisected (0: failures abort).
    pub max_bisections: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol_rel: 1e-8,
            tol_abs: None,
            max_iter: 25,
            max_bisections: 0,
        }
    }
}

/// Named monitoring point; snapped to the nearest mesh node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub name: String,
    pub point: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub order: usize,
    pub load_program: LoadProgram,
    #[serde(default)]
    pub newton: NewtonSettings,
    #[serde(default)]
    pub dirichlet: Vec<DirichletCondition>,
    #[serde(default)]
    pub tractions: Vec<TractionCondition>,
    #[serde(default)]
    pub body_force: [f64; 2],
    #[serde(default)]
    pub probes: Vec<Probe>,
}

impl AnalysisConfig {
    pub fn validate(&self, mesh: &PolygonalMesh) -> Result<(), SolverError> {
        if !(1..=MAX_ORDER).contains(&self.order) {
            return Err(SolverError::InvalidConfig(format!(
                "order must be in 1..={MAX_ORDER} (got {})",
                self.order
            )));
        }
        self.load_program.validate()?;
        let n = &self.newton;
        if !(n.tol_rel > 0.0) || n.tol_abs.is_some_and(|t| !(t > 0.0)) || n.max_iter == 0 {
            return Err(SolverError::InvalidConfig(
                "newton tolerances must be positive and max_iter at least 1".into(),
            ));
        }
        for tag in self.dirichlet.iter().map(|d| &d.tag).chain(self.tractions.iter().map(|t| &t.tag)) {
            if !mesh.has_tag(tag) {
                return Err(SolverError::UnknownTag(tag.clone()));
            }
        }
        let (lo, hi) = mesh.bounding_box();
        let slack = 1e-9 * mesh.diameter();
        for probe in &self.probes {
            let [x, y] = probe.point;
            if x < lo[0] - slack || x > hi[0] + slack || y < lo[1] - slack || y > hi[1] + slack {
                return Err(SolverError::InvalidConfig(format!(
                    "probe '{}' at ({x}, {y}) lies outside the mesh bounding box",
                    probe.name
                )));
            }
        }
        Ok(())
    }
}

/// Summary of one accepted increment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub factor: f64,
    pub temperature: f64,
    /// Displacement of each probe node, in probe order.
    pub probes: Vec<[f64; 2]>,
    /// Resultant reaction on the nodes of each constrained tag.
    pub reactions: BTreeMap<String, [f64; 2]>,
    /// Linear solves performed.
    pub iterations: usize,
    /// Residual norm before each solve and at convergence.
    pub residuals: Vec<f64>,
    /// Largest inelastic strain norm over all points (0 if the model has none).
    pub max_inelastic_strain: f64,
    /// Converged sub-increments (1 unless the increment was bisected).
    pub substeps: usize,
}

#[derive(Debug, Clone)]
pub struct AnalysisResult {
    pub records: Vec<StepRecord>,
    /// Final global dof vector.
    pub displacement: Vec<f64>,
    /// Final displacement of each mesh vertex.
    pub vertex_displacements: Vec<[f64; 2]>,
    /// Committed states per cell and quadrature point.
    pub states: Vec<Vec<MaterialState>>,
}

/// A single analysis with its committed state.
#[derive(Debug, Clone)]
pub struct Analysis {
    mesh: PolygonalMesh,
    config: AnalysisConfig,
    material: Material,
    dofs: DofMap,
    elements: Vec<ElementOperators>,
    /// Prescribed dofs with their value at unit factor.
    constraints: Vec<(usize, f64)>,
    /// Equation number of each dof, `None` when prescribed.
    equation: Vec<Option<usize>>,
    equation_dof: Vec<usize>,
    pattern: SkylineMatrix,
    external_unit: Vec<f64>,
    reaction_nodes: BTreeMap<String, Vec<usize>>,
    probe_nodes: Vec<usize>,
    states: Vec<Vec<MaterialState>>,
    tangents: Vec<Vec<Matrix3<f64>>>,
    u: Vec<f64>,
    current: LoadPoint,
    step: usize,
}

/// Residual and tangent at a trial state.
pub struct Linearization {
    /// `f_int - f_ext` over all dofs.
    pub residual: Vec<f64>,
    /// Tangent restricted to the unconstrained dofs, in equation order.
    pub tangent: SkylineMatrix,
    pub updates: Vec<Vec<UpdateResult>>,
}

impl Analysis {
    pub fn new(mesh: &PolygonalMesh, config: &AnalysisConfig, material: &Material) -> Result<Self, SolverError> {
        config.validate(mesh)?;
        let k = config.order;
        let dofs = DofMap::new(mesh, k);
        let elements = (0..mesh.cell_count())
            .into_par_iter()
            .map(|c| ElementOperators::new(mesh.element_geometry(c), k).map_err(|source| SolverError::Element { cell: c, source }))
            .collect::<Result<Vec<_>, _>>()?;

        // Dirichlet data
        let mut prescribed: BTreeMap<usize, f64> = BTreeMap::new();
        let mut reaction_nodes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for cond in &config.dirichlet {
            let nodes = tag_nodes(mesh, &dofs, &cond.tag)?;
            for &node in &nodes {
                let p = dofs.node_point(node);
                let value = cond.value + cond.gradient[0] * p.x + cond.gradient[1] * p.y;
                let dof = DofMap::node_dof(node, cond.component.index());
                if let Some(&old) = prescribed.get(&dof) {
                    let scale = old.abs().max(value.abs()).max(f64::MIN_POSITIVE);
                    if (old - value).abs() > 1e-12 * scale {
                        return Err(SolverError::ConflictingConstraint {
                            dof,
                            x: p.x,
                            y: p.y,
                            first: old,
                            second: value,
                        });
                    }
                } else {
                    prescribed.insert(dof, value);
                }
            }
            reaction_nodes.entry(cond.tag.clone()).or_insert(nodes);
        }
        let constraints: Vec<(usize, f64)> = prescribed.into_iter().collect();

        // equation numbering of the free dofs in reverse Cuthill-McKee order
        let n = dofs.n_dof();
        let mut is_free = vec![true; n];
        for &(d, _) in &constraints {
            is_free[d] = false;
        }
        let free: Vec<usize> = (0..n).filter(|&d| is_free[d]).collect();
        let mut compact = vec![usize::MAX; n];
        for (i, &d) in free.iter().enumerate() {
            compact[d] = i;
        }
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
        for c in 0..mesh.cell_count() {
            let local: Vec<usize> = dofs.cell_dofs(c).iter().filter(|&&d| is_free[d]).map(|&d| compact[d]).collect();
            for &a in &local {
                adjacency[a].extend(local.iter().copied().filter(|&b| b != a));
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let perm = reverse_cuthill_mckee(&adjacency);
        let mut equation = vec![None; n];
        let mut equation_dof = vec![0; free.len()];
        for (i, &d) in free.iter().enumerate() {
            equation[d] = Some(perm[i]);
            equation_dof[perm[i]] = d;
        }
        let cell_equations: Vec<Vec<usize>> = (0..mesh.cell_count())
            .map(|c| dofs.cell_dofs(c).iter().filter_map(|&d| equation[d]).collect())
            .collect();
        let pattern = SkylineMatrix::with_profile(free.len(), cell_equations.iter().map(Vec::as_slice));

        // external loads at unit factor
        let mut external_unit = vec![0.0; n];
        let b = Vector2::from(config.body_force);
        if b != Vector2::zeros() {
            for (c, ops) in elements.iter().enumerate() {
                let f = body_load_vector(ops, |_| b);
                for (a, &d) in dofs.cell_dofs(c).iter().enumerate() {
                    external_unit[d] += f[a];
                }
            }
        }
        for cond in &config.tractions {
            let edges = mesh.tagged_edges(&cond.tag).ok_or_else(|| SolverError::UnknownTag(cond.tag.clone()))?;
            for &[a, b] in edges {
                let e = mesh
                    .edge_id(a, b)
                    .ok_or_else(|| SolverError::InvalidConfig(format!("tag '{}' lists a non-edge ({a}, {b})", cond.tag)))?;
                let cell = mesh.edges()[e].cells[0].expect("every edge has a cell");
                let local = mesh.cell_edges(cell).iter().position(|&x| x == e).expect("edge belongs to its cell");
                let ops = &elements[cell];
                let geom = &ops.geometry.edges[local];
                let q = match cond.load {
                    TractionLoad::Uniform { traction } => Vector2::from(traction),
                    TractionLoad::Pressure { pressure } => -geom.normal * pressure,
                };
                let f = traction_load_vector(geom, k, |_, _| q).map_err(|source| SolverError::Element { cell, source })?;
                let cell_dofs = dofs.cell_dofs(cell);
                for (j, node) in ops.layout.edge_nodes(local).into_iter().enumerate() {
                    for comp in 0..2 {
                        external_unit[cell_dofs[ops.layout.node_dof(node, comp)]] += f[2 * j + comp];
                    }
                }
            }
        }

        let probe_nodes = config
            .probes
            .iter()
            .map(|p| dofs.nearest_node(nalgebra::Point2::new(p.point[0], p.point[1])))
            .collect();
        let state0 = material.initial_state();
        let tangent0 = material.elastic_tangent();
        let states = elements.iter().map(|e| vec![state0.clone(); e.point_count()]).collect();
        let tangents = elements.iter().map(|e| vec![tangent0; e.point_count()]).collect();
        Ok(Self {
            mesh: mesh.clone(),
            config: config.clone(),
            material: material.clone(),
            dofs,
            elements,
            constraints,
            equation,
            equation_dof,
            pattern,
            external_unit,
            reaction_nodes,
            probe_nodes,
            states,
            tangents,
            u: vec![0.0; n],
            current: config.load_program.start,
            step: 0,
        })
    }

    pub fn mesh(&self) -> &PolygonalMesh {
        &self.mesh
    }

    pub fn config(&self) -> &AnalysisConfig {
        &self.config
    }

    /// Replaces the Newton settings for the remaining increments.
    pub fn set_newton(&mut self, newton: NewtonSettings) {
        self.config.newton = newton;
    }

    pub fn dof_map(&self) -> &DofMap {
        &self.dofs
    }

    pub fn elements(&self) -> &[ElementOperators] {
        &self.elements
    }

    /// Dof of each equation.
    pub fn equation_dofs(&self) -> &[usize] {
        &self.equation_dof
    }

    pub fn equation_count(&self) -> usize {
        self.equation_dof.len()
    }

    /// Committed global dof vector.
    pub fn displacement(&self) -> &[f64] {
        &self.u
    }

    pub fn states(&self) -> &[Vec<MaterialState>] {
        &self.states
    }

    pub fn current(&self) -> LoadPoint {
        self.current
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    /// Nodes snapped to by the configured probes.
    pub fn probe_nodes(&self) -> &[usize] {
        &self.probe_nodes
    }

    /// External load vector at `factor`.
    pub fn external_load(&self, factor: f64) -> Vec<f64> {
        self.external_unit.iter().map(|f| f * factor).collect()
    }

    pub fn vertex_displacements(&self) -> Vec<[f64; 2]> {
        (0..self.mesh.vertex_count()).map(|v| [self.u[2 * v], self.u[2 * v + 1]]).collect()
    }

    /// Stabilization scalings from the committed tangents: the trace of
    /// the quadrature-averaged tangent over the number of edges.
    fn alphas(&self) -> Result<Vec<f64>, SolverError> {
        self.elements
            .iter()
            .zip(&self.tangents)
            .enumerate()
            .map(|(c, (ops, tangents))| {
                let mut mean = Matrix3::zeros();
                for (t, w) in tangents.iter().zip(&ops.quadrature.weights) {
                    mean += t * *w;
                }
                mean /= ops.geometry.area;
                alpha_scaling(&mean, ops.geometry.edge_count()).map_err(|source| SolverError::Element { cell: c, source })
            })
            .collect()
    }

    fn context(&self, to: &LoadPoint) -> StepContext {
        StepContext::new(to.time, to.time - self.current.time, to.temperature)
    }

    /// Residual and tangent at the trial dof vector `u` for the increment
    /// ending at `to`, starting from the committed state.
    pub fn linearize(&self, u: &[f64], to: &LoadPoint) -> Result<Linearization, SolverError> {
        self.linearize_with_lift(u, to, None)
    }

    /// As [`linearize`](Self::linearize), adding the tangent times `lift`
    /// (an increment of the prescribed dofs) to the residual.
    fn linearize_with_lift(&self, u: &[f64], to: &LoadPoint, lift: Option<&[f64]>) -> Result<Linearization, SolverError> {
        let ctx = self.context(to);
        let alphas = self.alphas()?;
        let responses = (0..self.elements.len())
            .into_par_iter()
            .map(|c| {
                let cell_dofs = self.dofs.cell_dofs(c);
                let u_n = DVector::from_iterator(cell_dofs.len(), cell_dofs.iter().map(|&d| self.u[d]));
                let u_t = DVector::from_iterator(cell_dofs.len(), cell_dofs.iter().map(|&d| u[d]));
                element_internal_force(&self.elements[c], &self.material, &self.states[c], &u_n, &u_t, &ctx, alphas[c])
                    .map_err(|source| SolverError::Element { cell: c, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut residual: Vec<f64> = self.external_unit.iter().map(|f| -f * to.factor).collect();
        let mut tangent = self.pattern.clone();
        let mut updates = Vec::with_capacity(responses.len());
        for (c, response) in responses.into_iter().enumerate() {
            let cell_dofs = self.dofs.cell_dofs(c);
            for (a, &da) in cell_dofs.iter().enumerate() {
                residual[da] += response.force[a];
                if let Some(lift) = lift {
                    for (b, &db) in cell_dofs.iter().enumerate() {
                        if self.equation[db].is_none() {
                            residual[da] += response.tangent[(a, b)] * lift[db];
                        }
                    }
                }
                let Some(ea) = self.equation[da] else { continue };
                for (b, &db) in cell_dofs.iter().enumerate() {
                    if let Some(eb) = self.equation[db] {
                        tangent.add(ea, eb, response.tangent[(a, b)]);
                    }
                }
            }
            updates.push(response.updates);
        }
        Ok(Linearization {
            residual,
            tangent,
            updates,
        })
    }

    /// Solves the increment ending at `to` and commits it.
    pub fn advance(&mut self, to: LoadPoint) -> Result<StepRecord, SolverError> {
        let mut record = self.advance_split(to, self.config.newton.max_bisections)?;
        self.step += 1;
        record.step = self.step;
        Ok(record)
    }

    /// Solves towards `to`, halving the increment up to `depth` times when
    /// Newton fails. State is only committed by converged increments.
    fn advance_split(&mut self, to: LoadPoint, depth: usize) -> Result<StepRecord, SolverError> {
        match self.solve_increment(to) {
            Err(SolverError::NotConverged { .. } | SolverError::Element { .. }) if depth > 0 => {
                let mid = self.current.lerp(&to, 0.5);
                let first = self.advance_split(mid, depth - 1)?;
                let mut second = self.advance_split(to, depth - 1)?;
                second.iterations += first.iterations;
                second.substeps += first.substeps;
                Ok(second)
            }
            other => other,
        }
    }

    fn solve_increment(&mut self, to: LoadPoint) -> Result<StepRecord, SolverError> {
        let step = self.step + 1;
        let settings = self.config.newton;
        // The first iterate is linearized about the committed solution, with
        // the increment of the prescribed values entering through the tangent.
        let mut u = self.u.clone();
        let mut lift = vec![0.0; u.len()];
        let mut lifted = false;
        for &(d, v) in &self.constraints {
            lift[d] = to.factor * v - u[d];
            lifted |= lift[d] != 0.0;
        }
        let external_norm = to.factor.abs() * norm(&self.external_unit);
        let mut residuals = Vec::new();
        let mut solves = 0;
        let lin = loop {
            let mut lin = self.linearize_with_lift(&u, &to, lifted.then_some(lift.as_slice()))?;
            let (free_norm, reaction_norm) = self.split_norms(&lin.residual);
            residuals.push(free_norm);
            let tol_abs = settings.tol_abs.unwrap_or(1e-10 * external_norm.max(reaction_norm));
            if !lifted && (free_norm <= tol_abs || free_norm <= settings.tol_rel * residuals[0]) {
                break lin;
            }
            if !free_norm.is_finite() || solves >= settings.max_iter {
                return Err(SolverError::NotConverged {
                    step,
                    iterations: solves,
                    residuals,
                });
            }
            lin.tangent.factor().map_err(|z| SolverError::Singular {
                step,
                dof: self.equation_dof[z.equation],
                pivot: z.value,
            })?;
            let mut rhs: Vec<f64> = self.equation_dof.iter().map(|&d| lin.residual[d]).collect();
            lin.tangent.solve_in_place(&mut rhs);
            solves += 1;
            for (e, &d) in self.equation_dof.iter().enumerate() {
                u[d] -= rhs[e];
            }
            if lifted {
                for &(d, v) in &self.constraints {
                    u[d] = to.factor * v;
                }
                lifted = false;
            }
        };

        // commit
        let mut max_inelastic: f64 = 0.0;
        for (c, updates) in lin.updates.into_iter().enumerate() {
            for (i, update) in updates.into_iter().enumerate() {
                if let Some(e) = update.state.inelastic_strain() {
                    max_inelastic = max_inelastic.max(e.norm());
                }
                self.tangents[c][i] = update.tangent;
                self.states[c][i] = update.state;
            }
        }
        self.u = u;
        self.current = to;
        let reactions = self
            .reaction_nodes
            .iter()
            .map(|(tag, nodes)| {
                let mut sum = [0.0; 2];
                for &node in nodes {
                    sum[0] += lin.residual[DofMap::node_dof(node, 0)];
                    sum[1] += lin.residual[DofMap::node_dof(node, 1)];
                }
                (tag.clone(), sum)
            })
            .collect();
        let probes = self
            .probe_nodes
            .iter()
            .map(|&node| [self.u[DofMap::node_dof(node, 0)], self.u[DofMap::node_dof(node, 1)]])
            .collect();
        Ok(StepRecord {
            step,
            time: to.time,
            factor: to.factor,
            temperature: to.temperature,
            probes,
            reactions,
            iterations: solves,
            residuals,
            max_inelastic_strain: max_inelastic,
            substeps: 1,
        })
    }

    fn split_norms(&self, residual: &[f64]) -> (f64, f64) {
        let mut free = 0.0;
        let mut fixed = 0.0;
        for (d, r) in residual.iter().enumerate() {
            if self.equation[d].is_some() {
                free += r * r;
            } else {
                fixed += r * r;
            }
        }
        (free.sqrt(), fixed.sqrt())
    }

    /// Runs the remaining increments of the load program, calling `observer`
    /// after each accepted one.
    pub fn run_with<F: FnMut(&StepRecord)>(&mut self, mut observer: F) -> Result<Vec<StepRecord>, SolverError> {
        let points = self.config.load_program.points();
        let mut records = Vec::with_capacity(points.len().saturating_sub(self.step));
        for to in points.into_iter().skip(self.step) {
            let record = self.advance(to)?;
            observer(&record);
            records.push(record);
        }
        Ok(records)
    }

    pub fn into_result(self, records: Vec<StepRecord>) -> AnalysisResult {
        let vertex_displacements = self.vertex_displacements();
        AnalysisResult {
            records,
            displacement: self.u,
            vertex_displacements,
            states: self.states,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// All nodes on the edges carrying `tag`, in ascending order.
fn tag_nodes(mesh: &PolygonalMesh, dofs: &DofMap, tag: &str) -> Result<Vec<usize>, SolverError> {
    let edges = mesh.tagged_edges(tag).ok_or_else(|| SolverError::UnknownTag(tag.into()))?;
    let mut nodes = Vec::new();
    for &[a, b] in edges {
        let e = mesh
            .edge_id(a, b)
            .ok_or_else(|| SolverError::InvalidConfig(format!("tag '{tag}' lists a non-edge ({a}, {b})")))?;
        nodes.extend(dofs.edge_nodes(mesh, e));
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}

/// Runs the whole load program.
pub fn run_analysis(mesh: &PolygonalMesh, config: &AnalysisConfig, material: &Material) -> Result<AnalysisResult, SolverError> {
    let mut analysis = Analysis::new(mesh, config, material)?;
    let records = analysis.run_with(|_| {})?;
    Ok(analysis.into_result(records))
}

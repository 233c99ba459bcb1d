//! Conforming polygonal meshes: storage, validation, file I/O, per-cell
//! geometry and the structured generators used by the benchmark drivers.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tag given to boundary edges that no explicit tag covers.
pub const DEFAULT_BOUNDARY_TAG: &str = "boundary";

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("cannot read mesh file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parse error at line {line}: {message}")]
    ParseLine { line: usize, message: String },
    #[error("cell {cell}: {message}")]
    InvalidCell { cell: usize, message: String },
    #[error("cell {cell} is degenerate (signed area {area:e})")]
    DegenerateCell { cell: usize, area: f64 },
    #[error("cell {cell} is not a simple polygon (edges {first} and {second} intersect)")]
    SelfIntersecting { cell: usize, first: usize, second: usize },
    #[error("non-conforming mesh: {0}")]
    NonConforming(String),
    #[error("vertices {first} and {second} coincide")]
    DuplicateVertex { first: usize, second: usize },
    #[error("boundary tag '{tag}': {message}")]
    InvalidTag { tag: String, message: String },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
}

/// On-disk layout of the native JSON mesh format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<[f64; 2]>,
    pub cells: Vec<Vec<usize>>,
    #[serde(default)]
    pub boundary_tags: BTreeMap<String, Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFormat {
    #[default]
    NativeJson,
    ObjLike,
}

/// Undirected mesh edge with its incident cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshEdge {
    /// Endpoints in canonical order (`vertices[0] < vertices[1]`).
    pub vertices: [usize; 2],
    /// First incident cell, and the second one for interior edges.
    pub cells: [Option<usize>; 2],
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.cells[1].is_none()
    }
}

/// A conforming mesh of simple, counter-clockwise polygons.
///
/// Construction validates every invariant; a value of this type is always a
/// valid discretization. Edge topology is derived once at construction.
#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    vertices: Vec<[f64; 2]>,
    cells: Vec<Vec<usize>>,
    boundary_tags: BTreeMap<String, Vec<[usize; 2]>>,
    edges: Vec<MeshEdge>,
    cell_edges: Vec<Vec<usize>>,
    edge_lookup: HashMap<[usize; 2], usize>,
}

impl PartialEq for PolygonalMesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.cells == other.cells
            && self.boundary_tags == other.boundary_tags
    }
}

fn canonical(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

fn signed_area(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * twice
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2], tol: f64) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))
}

impl PolygonalMesh {
    /// Validates the raw data and builds the mesh. Clockwise cells are
    /// re-oriented; boundary edges without a tag receive [`DEFAULT_BOUNDARY_TAG`].
    pub fn new(
        vertices: Vec<[f64; 2]>,
        mut cells: Vec<Vec<usize>>,
        boundary_tags: BTreeMap<String, Vec<[usize; 2]>>,
    ) -> Result<Self, MeshError> {
        if vertices.is_empty() || cells.is_empty() {
            return Err(MeshError::InvalidGeometry("mesh has no vertices or no cells".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(MeshError::InvalidGeometry(format!("vertex {i} is not finite")));
            }
        }
        let diameter = bounding_diagonal(&vertices);
        check_duplicates(&vertices, 1e-12 * diameter)?;

        let area_tol = 1e-14 * diameter * diameter;
        for (c, cell) in cells.iter_mut().enumerate() {
            if cell.len() < 3 {
                return Err(MeshError::InvalidCell {
                    cell: c,
                    message: format!("only {} vertices", cell.len()),
                });
            }
            for &v in cell.iter() {
                if v >= vertices.len() {
                    return Err(MeshError::InvalidCell {
                        cell: c,
                        message: format!("vertex index {v} out of range"),
                    });
                }
            }
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::InvalidCell {
                    cell: c,
                    message: "repeated vertex in loop".into(),
                });
            }
            let pts: Vec<[f64; 2]> = cell.iter().map(|&v| vertices[v]).collect();
            let area = signed_area(&pts);
            if area.abs() <= area_tol {
                return Err(MeshError::DegenerateCell { cell: c, area });
            }
            if area < 0.0 {
                cell.reverse();
            }
            check_simple(c, cell, &vertices, area_tol)?;
        }

        // edge topology
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut edge_lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (c, cell) in cells.iter().enumerate() {
            let m = cell.len();
            let mut ids = Vec::with_capacity(m);
            for i in 0..m {
                let a = cell[i];
                let b = cell[(i + 1) % m];
                if let Some(other) = directed.insert((a, b), c) {
                    return Err(MeshError::NonConforming(format!(
                        "edge ({a}, {b}) traversed in the same direction by cells {other} and {c} (overlap)"
                    )));
                }
                let key = canonical(a, b);
                let id = match edge_lookup.get(&key) {
                    Some(&id) => {
                        let edge = &mut edges[id];
                        if edge.cells[1].is_some() {
                            return Err(MeshError::NonConforming(format!(
                                "edge ({a}, {b}) shared by more than two cells (cell {c})"
                            )));
                        }
                        edge.cells[1] = Some(c);
                        id
                    }
                    None => {
                        edges.push(MeshEdge {
                            vertices: key,
                            cells: [Some(c), None],
                        });
                        edge_lookup.insert(key, edges.len() - 1);
                        edges.len() - 1
                    }
                };
                ids.push(id);
            }
            cell_edges.push(ids);
        }
        check_hanging_nodes(&vertices, &edges, diameter)?;

        // boundary tags
        let mut tag_of_edge: HashMap<usize, String> = HashMap::new();
        let mut normalized: BTreeMap<String, Vec<[usize; 2]>> = BTreeMap::new();
        for (tag, list) in boundary_tags {
            let mut out = Vec::with_capacity(list.len());
            for pair in list {
                let key = canonical(pair[0], pair[1]);
                let id = *edge_lookup.get(&key).ok_or_else(|| MeshError::InvalidTag {
                    tag: tag.clone(),
                    message: format!("({}, {}) is not a mesh edge", pair[0], pair[1]),
                })?;
                if !edges[id].is_boundary() {
                    return Err(MeshError::InvalidTag {
                        tag,
                        message: format!("({}, {}) is an interior edge", pair[0], pair[1]),
                    });
                }
                if let Some(prev) = tag_of_edge.insert(id, tag.clone()) {
                    return Err(MeshError::InvalidTag {
                        tag,
                        message: format!("edge ({}, {}) already tagged '{prev}'", pair[0], pair[1]),
                    });
                }
                out.push(pair);
            }
            normalized.insert(tag, out);
        }
        let untagged: Vec<[usize; 2]> = edges
            .iter()
            .enumerate()
            .filter(|(id, e)| e.is_boundary() && !tag_of_edge.contains_key(id))
            .map(|(_, e)| e.vertices)
            .collect();
        if !untagged.is_empty() {
            normalized
                .entry(DEFAULT_BOUNDARY_TAG.to_string())
                .or_default()
                .extend(untagged);
        }

        Ok(Self {
            vertices,
            cells,
            boundary_tags: normalized,
            edges,
            cell_edges,
            edge_lookup,
        })
    }

    pub fn from_file_data(data: MeshFile) -> Result<Self, MeshError> {
        Self::new(data.vertices, data.cells, data.boundary_tags)
    }

    pub fn to_file_data(&self) -> MeshFile {
        MeshFile {
            vertices: self.vertices.clone(),
            cells: self.cells.clone(),
            boundary_tags: self.boundary_tags.clone(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, MeshError> {
        let data: MeshFile = serde_json::from_str(text).map_err(|e| MeshError::Parse(e.to_string()))?;
        Self::from_file_data(data)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_file_data()).expect("mesh serialization cannot fail")
    }

    /// Parses `v x y [z]` and `f i j k ...` records (1-based indices).
    pub fn from_obj_str(text: &str) -> Result<Self, MeshError> {
        let mut vertices = Vec::new();
        let mut cells = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let err = |message: String| MeshError::ParseLine { line: n + 1, message };
            match tokens.next() {
                Some("v") => {
                    let coords: Vec<f64> = tokens
                        .map(|t| t.parse::<f64>().map_err(|e| err(format!("bad coordinate '{t}': {e}"))))
                        .collect::<Result<_, _>>()?;
                    if coords.len() < 2 {
                        return Err(err("vertex needs at least two coordinates".into()));
                    }
                    vertices.push([coords[0], coords[1]]);
                }
                Some("f") => {
                    let ids: Vec<usize> = tokens
                        .map(|t| {
                            let head = t.split('/').next().unwrap_or(t);
                            match head.parse::<usize>() {
                                Ok(i) if i >= 1 => Ok(i - 1),
                                _ => Err(err(format!("bad face index '{t}'"))),
                            }
                        })
                        .collect::<Result<_, _>>()?;
                    cells.push(ids);
                }
                Some(_) => {}
                None => {}
            }
        }
        Self::new(vertices, cells, BTreeMap::new())
    }

    pub fn load(path: &Path, format: MeshFormat) -> Result<Self, MeshError> {
        let text = fs::read_to_string(path)?;
        match format {
            MeshFormat::NativeJson => Self::from_json_str(&text),
            MeshFormat::ObjLike => Self::from_obj_str(&text),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), MeshError> {
        fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point2<f64> {
        Point2::new(self.vertices[i][0], self.vertices[i][1])
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    /// Global edge ids of a cell, local edge `i` joining local vertices `i` and `i+1`.
    pub fn cell_edges(&self, cell: usize) -> &[usize] {
        &self.cell_edges[cell]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&canonical(a, b)).copied()
    }

    pub fn boundary_tags(&self) -> &BTreeMap<String, Vec<[usize; 2]>> {
        &self.boundary_tags
    }

    pub fn tagged_edges(&self, tag: &str) -> Option<&[[usize; 2]]> {
        self.boundary_tags.get(tag).map(Vec::as_slice)
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.boundary_tags.contains_key(tag)
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        let pts: Vec<[f64; 2]> = self.cells[cell].iter().map(|&v| self.vertices[v]).collect();
        signed_area(&pts)
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn diameter(&self) -> f64 {
        bounding_diagonal(&self.vertices)
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        (lo, hi)
    }

    pub fn element_geometry(&self, cell: usize) -> ElementGeometry {
        let pts: Vec<Point2<f64>> = self.cells[cell].iter().map(|&v| self.vertex(v)).collect();
        ElementGeometry::from_vertices(&pts)
    }

    /// Copy of the mesh with vertices moved by `displacement` (same geometry checks apply).
    pub fn displaced(&self, displacement: &[[f64; 2]], scale: f64) -> Result<Self, MeshError> {
        if displacement.len() != self.vertices.len() {
            return Err(MeshError::InvalidGeometry(format!(
                "displacement has {} entries for {} vertices",
                displacement.len(),
                self.vertices.len()
            )));
        }
        let moved = self
            .vertices
            .iter()
            .zip(displacement)
            .map(|(x, u)| [x[0] + scale * u[0], x[1] + scale * u[1]])
            .collect();
        Self::new(moved, self.cells.clone(), self.boundary_tags.clone())
    }
}

fn bounding_diagonal(vertices: &[[f64; 2]]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in vertices {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
}

fn check_duplicates(vertices: &[[f64; 2]], tol: f64) -> Result<(), MeshError> {
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| vertices[a][0].total_cmp(&vertices[b][0]));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if vertices[j][0] - vertices[i][0] > tol {
                break;
            }
            let dx = vertices[j][0] - vertices[i][0];
            let dy = vertices[j][1] - vertices[i][1];
            if (dx * dx + dy * dy).sqrt() <= tol {
                return Err(MeshError::DuplicateVertex {
                    first: i.min(j),
                    second: i.max(j),
                });
            }
        }
    }
    Ok(())
}

fn check_simple(cell: usize, ids: &[usize], vertices: &[[f64; 2]], tol: f64) -> Result<(), MeshError> {
    let m = ids.len();
    if m <= 3 {
        return Ok(());
    }
    for i in 0..m {
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let p1 = vertices[ids[i]];
            let p2 = vertices[ids[(i + 1) % m]];
            let q1 = vertices[ids[j]];
            let q2 = vertices[ids[(j + 1) % m]];
            if segments_intersect(p1, p2, q1, q2, tol) {
                return Err(MeshError::SelfIntersecting {
                    cell,
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// A vertex lying strictly inside a boundary edge signals a hanging node.
/// Such a vertex always terminates two other boundary edges, so only
/// boundary vertices need to be tested.
fn check_hanging_nodes(vertices: &[[f64; 2]], edges: &[MeshEdge], diameter: f64) -> Result<(), MeshError> {
    let boundary: Vec<&MeshEdge> = edges.iter().filter(|e| e.is_boundary()).collect();
    let mut boundary_vertices: Vec<usize> = boundary.iter().flat_map(|e| e.vertices).collect();
    boundary_vertices.sort_unstable();
    boundary_vertices.dedup();
    let tol = 1e-10 * diameter;
    for edge in &boundary {
        let a = vertices[edge.vertices[0]];
        let b = vertices[edge.vertices[1]];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        for &v in &boundary_vertices {
            if v == edge.vertices[0] || v == edge.vertices[1] {
                continue;
            }
            let p = vertices[v];
            let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / (len * len);
            if t <= 0.0 || t >= 1.0 {
                continue;
            }
            let dist = orient(a, b, p).abs() / len;
            if dist <= tol {
                return Err(MeshError::NonConforming(format!(
                    "hanging node: vertex {v} lies inside edge ({}, {})",
                    edge.vertices[0], edge.vertices[1]
                )));
            }
        }
    }
    Ok(())
}

/// Straight edge of a cell, traversed counter-clockwise.
#[derive(Debug, Clone)]
pub struct EdgeGeometry {
    pub start: Point2<f64>,
    pub end: Point2<f64>,
    /// Unit outward normal.
    pub normal: Vector2<f64>,
    pub length: f64,
}

impl EdgeGeometry {
    pub fn midpoint(&self) -> Point2<f64> {
        nalgebra::center(&self.start, &self.end)
    }

    /// Point at parameter `t` in `[0, 1]` from `start` to `end`.
    pub fn point_at(&self, t: f64) -> Point2<f64> {
        self.start + (self.end - self.start) * t
    }
}

/// Geometric data of a single polygonal cell.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub vertices: Vec<Point2<f64>>,
    pub area: f64,
    pub centroid: Point2<f64>,
    /// Largest vertex-to-vertex distance.
    pub diameter: f64,
    pub edges: Vec<EdgeGeometry>,
}

impl ElementGeometry {
    /// Geometry of a counter-clockwise vertex loop.
    pub fn from_vertices(vertices: &[Point2<f64>]) -> Self {
        let m = vertices.len();
        let mut twice_area = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..m {
            let p = vertices[i];
            let q = vertices[(i + 1) % m];
            let cross = p.x * q.y - q.x * p.y;
            twice_area += cross;
            cx += (p.x + q.x) * cross;
            cy += (p.y + q.y) * cross;
        }
        let area = 0.5 * twice_area;
        let centroid = Point2::new(cx / (6.0 * area), cy / (6.0 * area));
        let mut diameter: f64 = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                diameter = diameter.max((vertices[i] - vertices[j]).norm());
            }
        }
        let edges = (0..m)
            .map(|i| {
                let start = vertices[i];
                let end = vertices[(i + 1) % m];
                let d = end - start;
                let length = d.norm();
                EdgeGeometry {
                    start,
                    end,
                    normal: Vector2::new(d.y, -d.x) / length,
                    length,
                }
            })
            .collect();
        Self {
            vertices: vertices.to_vec(),
            area,
            centroid,
            diameter,
            edges,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// `(cos, sin)` with exact values at multiples of a quarter turn.
fn unit_direction(fraction_of_turn: f64) -> (f64, f64) {
    let quarters = fraction_of_turn * 4.0;
    if (quarters - quarters.round()).abs() < 1e-14 {
        match (quarters.round() as i64).rem_euclid(4) {
            0 => return (1.0, 0.0),
            1 => return (0.0, 1.0),
            2 => return (-1.0, 0.0),
            _ => return (0.0, -1.0),
        }
    }
    let angle = 2.0 * PI * fraction_of_turn;
    (angle.cos(), angle.sin())
}

/// Structured quadrilateral mesh of an annular sector between the angles
/// `start_turn` and `end_turn` (fractions of a full turn). With a full turn
/// the sector closes on itself and has no radial edges.
fn annulus_sector(
    r_inner: f64,
    r_outer: f64,
    start_turn: f64,
    end_turn: f64,
    n_r: usize,
    n_theta: usize,
    tags: [&str; 4],
) -> Result<PolygonalMesh, MeshError> {
    if !(r_inner > 0.0 && r_outer > r_inner) {
        return Err(MeshError::InvalidGeometry(format!(
            "annulus needs 0 < inner radius < outer radius (got {r_inner}, {r_outer})"
        )));
    }
    if n_r == 0 || n_theta == 0 {
        return Err(MeshError::InvalidGeometry("division counts must be at least 1".into()));
    }
    let closed = (end_turn - start_turn - 1.0).abs() < 1e-14;
    if closed && n_theta < 3 {
        return Err(MeshError::InvalidGeometry("a closed ring needs at least 3 angular divisions".into()));
    }
    let rings = if closed { n_theta } else { n_theta + 1 };
    let mut vertices = Vec::with_capacity(rings * (n_r + 1));
    for j in 0..rings {
        let (c, s) = unit_direction(start_turn + (end_turn - start_turn) * j as f64 / n_theta as f64);
        for k in 0..=n_r {
            let r = r_inner + (r_outer - r_inner) * k as f64 / n_r as f64;
            vertices.push([r * c, r * s]);
        }
    }
    let id = |j: usize, k: usize| (j % rings) * (n_r + 1) + k;
    let mut cells = Vec::with_capacity(n_r * n_theta);
    let [inner, outer, first, last] = tags;
    let mut boundary: BTreeMap<String, Vec<[usize; 2]>> = BTreeMap::new();
    for j in 0..n_theta {
        for k in 0..n_r {
            cells.push(vec![id(j, k), id(j, k + 1), id(j + 1, k + 1), id(j + 1, k)]);
        }
        boundary.entry(inner.into()).or_default().push([id(j + 1, 0), id(j, 0)]);
        boundary.entry(outer.into()).or_default().push([id(j, n_r), id(j + 1, n_r)]);
    }
    if !closed {
        for k in 0..n_r {
            boundary.entry(first.into()).or_default().push([id(0, k), id(0, k + 1)]);
            boundary.entry(last.into()).or_default().push([id(n_theta, k + 1), id(n_theta, k)]);
        }
    }
    PolygonalMesh::new(vertices, cells, boundary)
}

/// Structured `nx x ny` quadrilateral mesh of the rectangle `[0, lx] x [0, ly]`.
/// Tags: `bottom`, `right`, `top` and `left`.
pub fn generate_rectangle_quads(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<PolygonalMesh, MeshError> {
    if !(lx > 0.0 && ly > 0.0) {
        return Err(MeshError::InvalidGeometry(format!(
            "rectangle sides must be positive (got {lx} x {ly})"
        )));
    }
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidGeometry("division counts must be at least 1".into()));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]);
        }
    }
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut tags: BTreeMap<String, Vec<[usize; 2]>> = BTreeMap::new();
    tags.insert("bottom".into(), (0..nx).map(|i| [id(i, 0), id(i + 1, 0)]).collect());
    tags.insert("top".into(), (0..nx).map(|i| [id(i + 1, ny), id(i, ny)]).collect());
    tags.insert("right".into(), (0..ny).map(|j| [id(nx, j), id(nx, j + 1)]).collect());
    tags.insert("left".into(), (0..ny).map(|j| [id(0, j + 1), id(0, j)]).collect());
    PolygonalMesh::new(vertices, cells, tags)
}

/// Structured quadrilateral mesh of an annulus, or of its first quadrant when
/// `quarter` is set. Tags: `inner`, `outer`, and for the quadrant `theta0`
/// (edge on the positive x axis) and `theta90` (edge on the positive y axis).
pub fn generate_annulus_quads(
    r_inner: f64,
    r_outer: f64,
    quarter: bool,
    n_r: usize,
    n_theta: usize,
) -> Result<PolygonalMesh, MeshError> {
    let end = if quarter { 0.25 } else { 1.0 };
    annulus_sector(r_inner, r_outer, 0.0, end, n_r, n_theta, ["inner", "outer", "theta0", "theta90"])
}

/// Semicircular arch (upper half annulus). Tags: `inner`, `outer`, `free`
/// (end on the positive x axis) and `clamped` (end on the negative x axis).
pub fn generate_arch_quads(
    r_inner: f64,
    r_outer: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<PolygonalMesh, MeshError> {
    annulus_sector(r_inner, r_outer, 0.0, 0.5, n_r, n_theta, ["inner", "outer", "free", "clamped"])
}

/// Quarter of a rectangular plate `[0, L] x [0, H]` with a circular hole of
/// radius `R` centred at the origin, meshed with structured quadrilaterals.
///
/// The square part `[0, L]^2` is split along the diagonal into two blocks
/// whose radial lines join the hole to the outer edges; the strip above
/// `y = L` is a tensor grid matching the upper block. `refinement = r` gives
/// `4r` divisions per 45 degrees of hole arc and `4r` radial divisions.
///
/// Tags: `hole`, `symmetry-x` (on the x axis), `symmetry-y` (on the y axis),
/// `right` (x = L) and `top` (y = H).
pub fn generate_plate_with_hole(
    half_width: f64,
    half_height: f64,
    radius: f64,
    refinement: usize,
) -> Result<PolygonalMesh, MeshError> {
    let (l, h, r) = (half_width, half_height, radius);
    if !(r > 0.0 && r < l && l <= h) {
        return Err(MeshError::InvalidGeometry(format!(
            "plate needs 0 < R < L <= H (got R={r}, L={l}, H={h})"
        )));
    }
    if refinement == 0 {
        return Err(MeshError::InvalidGeometry("refinement must be at least 1".into()));
    }
    let n = 4 * refinement;
    let n_r = 4 * refinement;
    let n_y = if h > l {
        ((n as f64 * (h - l) / l).round() as usize).max(1)
    } else {
        0
    };

    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut push = |p: [f64; 2]| {
        vertices.push(p);
        vertices.len() - 1
    };
    // block A: hole arc from 0 to 45 degrees towards the edge x = L
    let mut block_a = vec![vec![0usize; n_r + 1]; n + 1];
    for (j, row) in block_a.iter_mut().enumerate() {
        let (c, s) = unit_direction(0.125 * j as f64 / n as f64);
        let arc = [r * c, r * s];
        let outer = [l, l * j as f64 / n as f64];
        for (k, slot) in row.iter_mut().enumerate() {
            let t = k as f64 / n_r as f64;
            *slot = push([arc[0] + t * (outer[0] - arc[0]), arc[1] + t * (outer[1] - arc[1])]);
        }
    }
    // block B: hole arc from 45 to 90 degrees towards the line y = L
    let mut block_b = vec![vec![0usize; n_r + 1]; n + 1];
    block_b[0] = block_a[n].clone();
    for (j, row) in block_b.iter_mut().enumerate().skip(1) {
        let (c, s) = unit_direction(0.125 + 0.125 * j as f64 / n as f64);
        let arc = [r * c, r * s];
        let outer = [l * (1.0 - j as f64 / n as f64), l];
        for (k, slot) in row.iter_mut().enumerate() {
            let t = k as f64 / n_r as f64;
            *slot = push([arc[0] + t * (outer[0] - arc[0]), arc[1] + t * (outer[1] - arc[1])]);
        }
    }
    // strip above y = L, columns aligned with block B's outer nodes
    let mut strip = vec![vec![0usize; n_y + 1]; n + 1];
    for (j, col) in strip.iter_mut().enumerate() {
        col[0] = block_b[j][n_r];
        let x = l * (1.0 - j as f64 / n as f64);
        for (q, slot) in col.iter_mut().enumerate().skip(1) {
            *slot = push([x, l + (h - l) * q as f64 / n_y as f64]);
        }
    }

    let mut cells = Vec::new();
    let mut tags: BTreeMap<String, Vec<[usize; 2]>> = BTreeMap::new();
    let mut tag = |name: &str, a: usize, b: usize| tags.entry(name.to_string()).or_default().push([a, b]);
    for block in [&block_a, &block_b] {
        for j in 0..n {
            for k in 0..n_r {
                cells.push(vec![block[j][k], block[j][k + 1], block[j + 1][k + 1], block[j + 1][k]]);
            }
            tag("hole", block[j + 1][0], block[j][0]);
        }
    }
    for j in 0..n {
        tag("right", block_a[j][n_r], block_a[j + 1][n_r]);
    }
    for k in 0..n_r {
        tag("symmetry-x", block_a[0][k], block_a[0][k + 1]);
        tag("symmetry-y", block_b[n][k + 1], block_b[n][k]);
    }
    for j in 0..n {
        for q in 0..n_y {
            cells.push(vec![strip[j][q], strip[j][q + 1], strip[j + 1][q + 1], strip[j + 1][q]]);
        }
        if n_y > 0 {
            tag("top", strip[j + 1][n_y], strip[j][n_y]);
        }
    }
    for q in 0..n_y {
        tag("right", strip[0][q], strip[0][q + 1]);
        tag("symmetry-y", strip[n][q + 1], strip[n][q]);
    }
    if n_y == 0 {
        for j in 0..n {
            tag("top", block_b[j + 1][n_r], block_b[j][n_r]);
        }
    }
    PolygonalMesh::new(vertices, cells, tags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> PolygonalMesh {
        PolygonalMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![vec![0, 1, 2, 3]],
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn rectangle_generator_tags_every_side() {
        let mesh = generate_rectangle_quads(2.0, 1.0, 4, 3).unwrap();
        assert_eq!(mesh.cell_count(), 12);
        assert_eq!(mesh.vertex_count(), 20);
        let total: f64 = (0..mesh.cell_count()).map(|c| mesh.cell_area(c)).sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-14);
        for (tag, count) in [("bottom", 4), ("top", 4), ("left", 3), ("right", 3)] {
            assert_eq!(mesh.tagged_edges(tag).unwrap().len(), count, "{tag}");
        }
        assert!(!mesh.has_tag(DEFAULT_BOUNDARY_TAG));
        assert!(generate_rectangle_quads(1.0, 1.0, 0, 2).is_err());
    }

    fn euler_characteristic(mesh: &PolygonalMesh) -> i64 {
        mesh.vertex_count() as i64 - mesh.edges().len() as i64 + mesh.cell_count() as i64
    }

    #[test]
    fn unit_square_single_cell() {
        let mesh = unit_square();
        assert_eq!(mesh.vertex_count(), 4);
        assert_eq!(mesh.cell_count(), 1);
        assert_relative_eq!(mesh.cell_area(0), 1.0);
        assert_eq!(mesh.tagged_edges(DEFAULT_BOUNDARY_TAG).unwrap().len(), 4);
    }

    #[test]
    fn clockwise_triangle_is_reoriented() {
        let mesh = PolygonalMesh::from_json_str(
            r#"{"vertices": [[0,0],[0,1],[1,0]], "cells": [[0,1,2]], "boundary_tags": {}}"#,
        )
        .unwrap();
        assert!(mesh.cell_area(0) > 0.0);
        assert_eq!(mesh.cells()[0], vec![2, 1, 0]);
    }

    #[test]
    fn hanging_node_is_rejected() {
        // two unit squares side by side; the right one splits the shared edge at (1, 0.5)
        let text = r#"{"vertices": [[0,0],[1,0],[1,1],[0,1],[2,0],[2,1],[1,0.5]],
                       "cells": [[0,1,2,3],[1,4,5,2,6]]}"#;
        let err = PolygonalMesh::from_json_str(text).unwrap_err();
        assert!(err.to_string().contains("non-conforming"), "{err}");
    }

    #[test]
    fn degenerate_cell_is_rejected() {
        let err = PolygonalMesh::from_json_str(r#"{"vertices": [[0,0],[1,0],[2,0]], "cells": [[0,1,2]]}"#)
            .unwrap_err();
        assert!(matches!(err, MeshError::DegenerateCell { cell: 0, .. }));
    }

    #[test]
    fn self_intersecting_cell_is_rejected() {
        let err = PolygonalMesh::from_json_str(
            r#"{"vertices": [[0,0],[1,1],[1,0],[0,1.2]], "cells": [[0,1,2,3]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::SelfIntersecting { cell: 0, .. }), "{err}");
    }

    #[test]
    fn duplicate_vertices_are_rejected() {
        let err = PolygonalMesh::from_json_str(
            r#"{"vertices": [[0,0],[1,0],[0,1],[1e-15,0]], "cells": [[0,1,2]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::DuplicateVertex { first: 0, second: 3 }));
    }

    #[test]
    fn interior_edge_cannot_be_tagged() {
        let text = r#"{"vertices": [[0,0],[1,0],[1,1],[0,1],[2,0],[2,1]],
                       "cells": [[0,1,2,3],[1,4,5,2]], "boundary_tags": {"x": [[1,2]]}}"#;
        assert!(matches!(
            PolygonalMesh::from_json_str(text).unwrap_err(),
            MeshError::InvalidTag { .. }
        ));
    }

    #[test]
    fn obj_import_uses_one_based_indices() {
        let text = "# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        let mesh = PolygonalMesh::from_obj_str(text).unwrap();
        assert_eq!(mesh.cells()[0], vec![0, 1, 2, 3]);
        let err = PolygonalMesh::from_obj_str("v 0 0\nv 1 0\nv 0 1\nf 0 1 2\n").unwrap_err();
        assert!(matches!(err, MeshError::ParseLine { line: 4, .. }));
    }

    #[test]
    fn geometry_of_square_and_triangle() {
        let g = unit_square().element_geometry(0);
        assert_eq!(g.edge_count(), 4);
        assert_relative_eq!(g.area, 1.0);
        assert_relative_eq!(g.centroid.x, 0.5);
        assert_relative_eq!(g.centroid.y, 0.5);
        assert_relative_eq!(g.diameter, 2f64.sqrt());
        for e in &g.edges {
            assert!(e.normal.dot(&(e.midpoint() - g.centroid)) > 0.0);
            assert_relative_eq!(e.normal.norm(), 1.0);
        }
        let t = ElementGeometry::from_vertices(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)]);
        assert_relative_eq!(t.area, 0.5);
        assert_relative_eq!(t.centroid.x, 1.0 / 3.0);
        assert_relative_eq!(t.centroid.y, 1.0 / 3.0);
    }

    #[test]
    fn regular_hexagon_area() {
        let pts: Vec<Point2<f64>> = (0..6)
            .map(|i| {
                let a = PI / 3.0 * i as f64;
                Point2::new(a.cos(), a.sin())
            })
            .collect();
        let g = ElementGeometry::from_vertices(&pts);
        assert_relative_eq!(g.area, 2.598_076_211_353_316, epsilon = 1e-14);
        assert_relative_eq!(g.diameter, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn annulus_single_quarter_cell() {
        let mesh = generate_annulus_quads(2.0, 4.0, true, 1, 1).unwrap();
        assert_eq!(mesh.cell_count(), 1);
        let loop_pts: Vec<[f64; 2]> = mesh.cells()[0].iter().map(|&v| mesh.vertices()[v]).collect();
        assert_eq!(loop_pts, vec![[2.0, 0.0], [4.0, 0.0], [0.0, 4.0], [0.0, 2.0]]);
        for tag in ["inner", "outer", "theta0", "theta90"] {
            assert_eq!(mesh.tagged_edges(tag).unwrap().len(), 1, "{tag}");
        }
    }

    #[test]
    fn annulus_counts_and_euler() {
        let mesh = generate_annulus_quads(1.0, 2.0, true, 2, 2).unwrap();
        assert_eq!(mesh.cell_count(), 4);
        assert_eq!(mesh.vertex_count(), 9);
        assert_eq!(euler_characteristic(&mesh), 1);
        // a full ring has one hole
        let ring = generate_annulus_quads(1.0, 2.0, false, 2, 12).unwrap();
        assert_eq!(euler_characteristic(&ring), 0);
        assert!(!ring.has_tag(DEFAULT_BOUNDARY_TAG));
        assert!(generate_annulus_quads(2.0, 1.0, true, 1, 1).is_err());
    }

    #[test]
    fn plate_geometry_and_refinement() {
        let (l, h, r) = (100.0, 180.0, 50.0);
        let coarse = generate_plate_with_hole(l, h, r, 1).unwrap();
        let fine = generate_plate_with_hole(l, h, r, 2).unwrap();
        let ratio = fine.cell_count() as f64 / coarse.cell_count() as f64;
        assert!((ratio - 4.0).abs() <= 0.4, "ratio {ratio}");
        for mesh in [&coarse, &fine] {
            assert_eq!(euler_characteristic(mesh), 1);
            assert!(!mesh.has_tag(DEFAULT_BOUNDARY_TAG));
            for tag in ["hole", "symmetry-x", "symmetry-y", "top", "right"] {
                assert!(mesh.has_tag(tag), "{tag}");
            }
            let (lo, hi) = mesh.bounding_box();
            assert_eq!(lo, [0.0, 0.0]);
            assert_eq!(hi, [l, h]);
            // total area equals the polygonal domain area
            let total: f64 = (0..mesh.cell_count()).map(|c| mesh.cell_area(c)).sum();
            let hole = mesh.tagged_edges("hole").unwrap();
            let mut hole_poly = 0.0;
            for e in hole {
                let a = mesh.vertices()[e[0]];
                let b = mesh.vertices()[e[1]];
                hole_poly += 0.5 * (a[0] * b[1] - b[0] * a[1]).abs();
            }
            assert_relative_eq!(total, l * h - hole_poly, max_relative = 1e-12);
        }
    }

    #[test]
    fn json_round_trip_is_identical() {
        let mesh = generate_plate_with_hole(100.0, 180.0, 50.0, 1).unwrap();
        let text = mesh.to_json_string();
        let again = PolygonalMesh::from_json_str(&text).unwrap();
        assert_eq!(mesh, again);
        assert_eq!(text, again.to_json_string());
    }
}

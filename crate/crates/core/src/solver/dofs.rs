//! Global numbering of the virtual element unknowns.
//!
//! Nodes are the mesh vertices followed by the `k - 1` interior nodes of each
//! edge, listed from the edge's lower to its higher vertex index. Node `i`
//! owns dofs `2 i` and `2 i + 1`; the interior moments of all cells follow.

use nalgebra::Point2;

use crate::mesh::PolygonalMesh;
use crate::vem::{edge_node_params, monomial_count};

#[derive(Debug, Clone)]
pub struct DofMap {
    pub order: usize,
    pub moments_per_component: usize,
    node_points: Vec<Point2<f64>>,
    vertex_count: usize,
    edge_count: usize,
    cell_dofs: Vec<Vec<usize>>,
    n_dof: usize,
}

impl DofMap {
    pub fn new(mesh: &PolygonalMesh, k: usize) -> Self {
        let nv = mesh.vertex_count();
        let ne = mesh.edges().len();
        let inner = k - 1;
        let params = edge_node_params(k);
        let mut node_points: Vec<Point2<f64>> = (0..nv).map(|v| mesh.vertex(v)).collect();
        for edge in mesh.edges() {
            let a = mesh.vertex(edge.vertices[0]);
            let b = mesh.vertex(edge.vertices[1]);
            for &t in &params[1..k] {
                node_points.push(a + (b - a) * t);
            }
        }
        let nodes = nv + inner * ne;
        let moments = monomial_count(k as isize - 2);
        let mut cell_dofs = Vec::with_capacity(mesh.cell_count());
        for (c, cell) in mesh.cells().iter().enumerate() {
            let m = cell.len();
            let mut dofs = Vec::with_capacity(2 * m * k + 2 * moments);
            for (i, &e) in mesh.cell_edges(c).iter().enumerate() {
                let forward = mesh.edges()[e].vertices[0] == cell[i];
                dofs.extend([2 * cell[i], 2 * cell[i] + 1]);
                for j in 0..inner {
                    let jj = if forward { j } else { inner - 1 - j };
                    let node = nv + inner * e + jj;
                    dofs.extend([2 * node, 2 * node + 1]);
                }
            }
            let base = 2 * nodes + 2 * moments * c;
            dofs.extend(base..base + 2 * moments);
            cell_dofs.push(dofs);
        }
        Self {
            order: k,
            moments_per_component: moments,
            node_points,
            vertex_count: nv,
            edge_count: ne,
            cell_dofs,
            n_dof: 2 * nodes + 2 * moments * mesh.cell_count(),
        }
    }

    pub fn n_dof(&self) -> usize {
        self.n_dof
    }

    pub fn node_count(&self) -> usize {
        self.node_points.len()
    }

    pub fn node_point(&self, node: usize) -> Point2<f64> {
        self.node_points[node]
    }

    pub fn node_dof(node: usize, component: usize) -> usize {
        2 * node + component
    }

    /// Global dofs of a cell in the element's local order.
    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        &self.cell_dofs[cell]
    }

    /// Nodes on the mesh edge `edge` joining vertices `a` and `b`.
    pub fn edge_nodes(&self, mesh: &PolygonalMesh, edge: usize) -> Vec<usize> {
        let [a, b] = mesh.edges()[edge].vertices;
        let inner = self.order - 1;
        let mut nodes = vec![a];
        nodes.extend((0..inner).map(|j| self.vertex_count + inner * edge + j));
        nodes.push(b);
        nodes
    }

    /// Node closest to `p` (ties resolved towards the lower index).
    pub fn nearest_node(&self, p: Point2<f64>) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (i, q) in self.node_points.iter().enumerate() {
            let d = (q - p).norm_squared();
            if d < dist {
                best = i;
                dist = d;
            }
        }
        best
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }
}

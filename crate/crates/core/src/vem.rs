//! Element-level virtual element machinery for 2D solids of order `k`.
//!
//! Local degrees of freedom of an `m`-gon, in this order:
//! * displacement values at the boundary nodes, listed counter-clockwise
//!   from vertex 0: vertex `i` is node `i * k`, followed by the `k - 1`
//!   Gauss-Lobatto nodes of edge `i`; both components per node;
//! * interior moments `|E|^-1 * int_E v_c m_b` against the scaled monomials
//!   `m_b` of degree `<= k - 2`, x component first.
//!
//! The strain projection maps these onto symmetric polynomial strains of
//! degree `k - 1`, stored component-major (`xx`, `yy`, `gamma_xy`) over
//! scaled monomials `((x - c_E) / h_E)^a ((y - c_E) / h_E)^b`.

use nalgebra::{DMatrix, DVector, Matrix3, Point2, Vector2, Vector3};
use thiserror::Error;

use crate::materials::{Material, MaterialError, MaterialState, StepContext, UpdateResult};
use crate::mesh::{EdgeGeometry, ElementGeometry};
use crate::quadrature::{self, edge_rule, polygon_rule, QuadratureError, QuadratureRule};

/// Highest supported polynomial order.
pub const MAX_ORDER: usize = 3;

#[derive(Debug, Error)]
pub enum VemError {
    #[error("unsupported polynomial order {0} (supported 1..={MAX_ORDER})")]
    UnsupportedOrder(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("singular {0} matrix (degenerate element geometry)")]
    Singular(&'static str),
    #[error("material update failed at ({x:.6e}, {y:.6e}): {source}")]
    Material {
        x: f64,
        y: f64,
        #[source]
        source: MaterialError,
    },
    #[error("stabilization scaling is not finite")]
    NonFiniteScaling,
}

/// Exponents `(a, b)` of all monomials of total degree `<= degree`, ordered by
/// degree and then by decreasing `a`. Empty for negative degree.
pub fn monomial_exponents(degree: isize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if degree < 0 {
        return out;
    }
    for d in 0..=degree as usize {
        for b in 0..=d {
            out.push((d - b, b));
        }
    }
    out
}

/// Position of `x^a y^b` in [`monomial_exponents`].
pub fn monomial_index(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

/// Number of monomials of degree `<= degree`.
pub fn monomial_count(degree: isize) -> usize {
    if degree < 0 {
        0
    } else {
        let d = degree as usize;
        (d + 1) * (d + 2) / 2
    }
}

/// Scaled monomials centred on an element.
#[derive(Debug, Clone)]
pub struct ScaledMonomials {
    pub center: Point2<f64>,
    pub scale: f64,
    pub degree: isize,
    exponents: Vec<(usize, usize)>,
}

impl ScaledMonomials {
    pub fn new(center: Point2<f64>, scale: f64, degree: isize) -> Self {
        Self {
            center,
            scale,
            degree,
            exponents: monomial_exponents(degree),
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    pub fn eval(&self, p: Point2<f64>) -> Vec<f64> {
        let x = (p.x - self.center.x) / self.scale;
        let y = (p.y - self.center.y) / self.scale;
        self.exponents
            .iter()
            .map(|&(a, b)| x.powi(a as i32) * y.powi(b as i32))
            .collect()
    }
}

/// Lagrange basis on the nodes `params`, evaluated at `t`.
fn lagrange(params: &[f64], t: f64) -> Vec<f64> {
    (0..params.len())
        .map(|j| {
            params
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &pi)| (t - pi) / (params[j] - pi))
                .product()
        })
        .collect()
}

/// Node parameters in `[0, 1]` along an edge: endpoints plus Gauss-Lobatto nodes.
pub fn edge_node_params(k: usize) -> Vec<f64> {
    let mut params = vec![0.0];
    params.extend(quadrature::gauss_lobatto_interior(k).iter().map(|x| 0.5 * (1.0 + x)));
    params.push(1.0);
    params
}

#[derive(Debug, Clone)]
pub struct DofLayout {
    pub order: usize,
    pub edge_count: usize,
    /// Boundary node coordinates, counter-clockwise from vertex 0.
    pub node_points: Vec<Point2<f64>>,
    /// Parameters of the `k + 1` nodes along an edge.
    pub edge_params: Vec<f64>,
    /// Interior moments per displacement component, `dim P_{k-2}`.
    pub moments_per_component: usize,
    pub n_dof: usize,
}

impl DofLayout {
    pub fn boundary_node_count(&self) -> usize {
        self.edge_count * self.order
    }

    pub fn node_dof(&self, node: usize, component: usize) -> usize {
        2 * node + component
    }

    pub fn moment_dof(&self, component: usize, index: usize) -> usize {
        2 * self.boundary_node_count() + component * self.moments_per_component + index
    }

    /// Local node ids of edge `i`, from its start vertex to its end vertex.
    pub fn edge_nodes(&self, edge: usize) -> Vec<usize> {
        let k = self.order;
        let mut nodes: Vec<usize> = (0..k).map(|j| edge * k + j).collect();
        nodes.push(((edge + 1) % self.edge_count) * k);
        nodes
    }
}

/// Dof layout of the local space: `2 m k + k (k - 1)` unknowns.
pub fn build_dof_layout(geom: &ElementGeometry, k: usize) -> DofLayout {
    let m = geom.edge_count();
    let edge_params = edge_node_params(k);
    let mut node_points = Vec::with_capacity(m * k);
    for edge in &geom.edges {
        for &t in &edge_params[..k] {
            node_points.push(edge.point_at(t));
        }
    }
    let moments = monomial_count(k as isize - 2);
    DofLayout {
        order: k,
        edge_count: m,
        node_points,
        edge_params,
        moments_per_component: moments,
        n_dof: 2 * m * k + 2 * moments,
    }
}

/// Symmetric polynomial strains of degree `<= k - 1` in Voigt form.
#[derive(Debug, Clone)]
pub struct StrainBasis {
    pub monomials: ScaledMonomials,
}

/// Voigt weights turning a dot product of two strain vectors into the
/// tensor contraction.
const STRAIN_WEIGHTS: [f64; 3] = [1.0, 1.0, 0.5];

impl StrainBasis {
    pub fn new(geom: &ElementGeometry, k: usize) -> Self {
        Self {
            monomials: ScaledMonomials::new(geom.centroid, geom.diameter, k as isize - 1),
        }
    }

    /// `3 k (k + 1) / 2`.
    pub fn dim(&self) -> usize {
        3 * self.monomials.len()
    }

    /// `3 x dim` matrix of basis values at `p`.
    pub fn eval(&self, p: Point2<f64>) -> DMatrix<f64> {
        let n = self.monomials.len();
        let values = self.monomials.eval(p);
        let mut out = DMatrix::zeros(3, 3 * n);
        for c in 0..3 {
            for (a, v) in values.iter().enumerate() {
                out[(c, c * n + a)] = *v;
            }
        }
        out
    }

    /// Gram matrix under the tensor inner product.
    pub fn gram(&self, quad: &QuadratureRule) -> DMatrix<f64> {
        let n = self.monomials.len();
        let mass = monomial_mass(&self.monomials, &self.monomials, quad);
        let mut g = DMatrix::zeros(3 * n, 3 * n);
        for c in 0..3 {
            g.view_mut((c * n, c * n), (n, n)).copy_from(&(&mass * STRAIN_WEIGHTS[c]));
        }
        g
    }
}

fn monomial_mass(left: &ScaledMonomials, right: &ScaledMonomials, quad: &QuadratureRule) -> DMatrix<f64> {
    let mut mass = DMatrix::zeros(left.len(), right.len());
    for (p, w) in quad.points.iter().zip(&quad.weights) {
        let l = left.eval(*p);
        let r = right.eval(*p);
        for (i, li) in l.iter().enumerate() {
            for (j, rj) in r.iter().enumerate() {
                mass[(i, j)] += w * li * rj;
            }
        }
    }
    mass
}

/// Precomputed operators of one element.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub geometry: ElementGeometry,
    pub layout: DofLayout,
    pub basis: StrainBasis,
    pub quadrature: QuadratureRule,
    /// `dim x n_dof`: dof values to strain-polynomial coefficients.
    pub projection: DMatrix<f64>,
    /// Unscaled stabilization `s^E`.
    pub stabilization: DMatrix<f64>,
    /// `2 dim P_k x n_dof`: dof values to the coefficients of the polynomial
    /// displacement reconstruction, x component first.
    pub reconstruction: DMatrix<f64>,
    /// `3 x n_dof` strain operator at each quadrature point.
    pub strain_at_points: Vec<DMatrix<f64>>,
    displacement_monomials: ScaledMonomials,
}

impl ElementOperators {
    pub fn new(geometry: ElementGeometry, k: usize) -> Result<Self, VemError> {
        if k == 0 || k > MAX_ORDER {
            return Err(VemError::UnsupportedOrder(k));
        }
        let layout = build_dof_layout(&geometry, k);
        let basis = StrainBasis::new(&geometry, k);
        let quad = polygon_rule(&geometry, 2 * (k - 1))?;
        let projection = build_projection(&geometry, &layout, &basis, &quad)?;
        let displacement_monomials = ScaledMonomials::new(geometry.centroid, geometry.diameter, k as isize);
        let reconstruction =
            build_reconstruction(&geometry, &layout, &basis, &displacement_monomials, &quad, &projection)?;
        let stabilization = stabilization_matrix(&geometry, &layout, &displacement_monomials, &quad, &reconstruction);
        let strain_at_points = quad.points.iter().map(|p| basis.eval(*p) * &projection).collect();
        Ok(Self {
            geometry,
            layout,
            basis,
            quadrature: quad,
            projection,
            stabilization,
            reconstruction,
            strain_at_points,
            displacement_monomials,
        })
    }

    pub fn n_dof(&self) -> usize {
        self.layout.n_dof
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn point_count(&self) -> usize {
        self.quadrature.len()
    }

    /// `3 x n_dof` strain operator at an arbitrary point.
    pub fn strain_operator_at(&self, p: Point2<f64>) -> DMatrix<f64> {
        self.basis.eval(p) * &self.projection
    }

    /// Projected strain (Voigt, engineering shear) at quadrature point `i`.
    pub fn strain_at_point(&self, i: usize, dofs: &DVector<f64>) -> Vector3<f64> {
        let e = &self.strain_at_points[i] * dofs;
        Vector3::new(e[0], e[1], e[2])
    }

    /// `2 x n_dof` evaluation of the polynomial displacement reconstruction.
    pub fn displacement_operator_at(&self, p: Point2<f64>) -> DMatrix<f64> {
        let n = self.displacement_monomials.len();
        let values = self.displacement_monomials.eval(p);
        let mut psi = DMatrix::zeros(2, 2 * n);
        for d in 0..2 {
            for (b, v) in values.iter().enumerate() {
                psi[(d, d * n + b)] = *v;
            }
        }
        psi * &self.reconstruction
    }

    /// Degrees of freedom of a displacement field. Exact for polynomial
    /// fields of degree `<= k`.
    pub fn interpolate<F: Fn(Point2<f64>) -> Vector2<f64>>(&self, field: F) -> DVector<f64> {
        let layout = &self.layout;
        let mut dofs = DVector::zeros(layout.n_dof);
        for (node, p) in layout.node_points.iter().enumerate() {
            let u = field(*p);
            dofs[layout.node_dof(node, 0)] = u.x;
            dofs[layout.node_dof(node, 1)] = u.y;
        }
        if layout.moments_per_component > 0 {
            let moments = ScaledMonomials::new(self.geometry.centroid, self.geometry.diameter, layout.order as isize - 2);
            let area = self.geometry.area;
            for (p, w) in self.quadrature.points.iter().zip(&self.quadrature.weights) {
                let u = field(*p);
                for (b, m) in moments.eval(*p).iter().enumerate() {
                    dofs[layout.moment_dof(0, b)] += w * u.x * m / area;
                    dofs[layout.moment_dof(1, b)] += w * u.y * m / area;
                }
            }
        }
        dofs
    }
}

/// Strain projection `Pi = G^-1 B`.
///
/// `B` is obtained by integrating by parts, so only edge traces and interior
/// moments of the virtual displacement enter:
/// `int_E eps(v) : T = int_dE v . (T n) - int_E v . div T`.
pub fn build_projection(
    geom: &ElementGeometry,
    layout: &DofLayout,
    basis: &StrainBasis,
    quad: &QuadratureRule,
) -> Result<DMatrix<f64>, VemError> {
    let k = layout.order;
    let monos = &basis.monomials;
    let n_mono = monos.len();
    let h = monos.scale;
    let mut rhs = DMatrix::zeros(basis.dim(), layout.n_dof);

    // boundary terms; trace degree k times basis degree k - 1
    for (i, edge) in geom.edges.iter().enumerate() {
        let rule = edge_rule(edge.start, edge.end, 2 * k - 1)?;
        let nodes = layout.edge_nodes(i);
        let (nx, ny) = (edge.normal.x, edge.normal.y);
        for ((t, p), w) in rule.abscissae.iter().zip(&rule.points).zip(&rule.weights) {
            let shape = lagrange(&layout.edge_params, *t);
            let m = monos.eval(*p);
            for (j, &node) in nodes.iter().enumerate() {
                let dx = layout.node_dof(node, 0);
                let dy = layout.node_dof(node, 1);
                let s = w * shape[j];
                for (a, ma) in m.iter().enumerate() {
                    rhs[(a, dx)] += s * ma * nx;
                    rhs[(n_mono + a, dy)] += s * ma * ny;
                    rhs[(2 * n_mono + a, dx)] += 0.5 * s * ma * ny;
                    rhs[(2 * n_mono + a, dy)] += 0.5 * s * ma * nx;
                }
            }
        }
    }
    // interior terms through the moment dofs; d/dx m_(a,b) = (a / h) m_(a-1,b)
    let area = geom.area;
    for (a_idx, &(a, b)) in monos.exponents().iter().enumerate() {
        if a > 0 {
            let mom = monomial_index(a - 1, b);
            let coef = a as f64 / h * area;
            rhs[(a_idx, layout.moment_dof(0, mom))] -= coef;
            rhs[(2 * n_mono + a_idx, layout.moment_dof(1, mom))] -= 0.5 * coef;
        }
        if b > 0 {
            let mom = monomial_index(a, b - 1);
            let coef = b as f64 / h * area;
            rhs[(n_mono + a_idx, layout.moment_dof(1, mom))] -= coef;
            rhs[(2 * n_mono + a_idx, layout.moment_dof(0, mom))] -= 0.5 * coef;
        }
    }
    let gram = basis.gram(quad);
    let chol = gram.cholesky().ok_or(VemError::Singular("strain Gram"))?;
    Ok(chol.solve(&rhs))
}

/// Strain coefficients of `eps(p)` for each basis polynomial `p` of `[P_k]^2`.
fn strain_of_displacement_basis(basis: &StrainBasis, disp: &ScaledMonomials) -> DMatrix<f64> {
    let n = basis.monomials.len();
    let nk = disp.len();
    let h = disp.scale;
    let mut e = DMatrix::zeros(3 * n, 2 * nk);
    for (beta, &(a, b)) in disp.exponents().iter().enumerate() {
        if a > 0 {
            let i = monomial_index(a - 1, b);
            e[(i, beta)] += a as f64 / h;
            e[(2 * n + i, nk + beta)] += a as f64 / h;
        }
        if b > 0 {
            let i = monomial_index(a, b - 1);
            e[(2 * n + i, beta)] += b as f64 / h;
            e[(n + i, nk + beta)] += b as f64 / h;
        }
    }
    e
}

/// Polynomial displacement reconstruction of degree `k`: the strain-energy
/// projection onto `[P_k]^2`, with rigid motions fixed by the mean
/// translation and the mean rotation of the virtual field.
fn build_reconstruction(
    geom: &ElementGeometry,
    layout: &DofLayout,
    basis: &StrainBasis,
    disp: &ScaledMonomials,
    quad: &QuadratureRule,
    projection: &DMatrix<f64>,
) -> Result<DMatrix<f64>, VemError> {
    let k = layout.order;
    let nk = disp.len();
    let area = geom.area;
    let h = disp.scale;
    let strain = strain_of_displacement_basis(basis, disp);
    let gram = basis.gram(quad);
    let g_strain = &gram * &strain;
    let mut lhs = strain.transpose() * &g_strain;
    let mut rhs = g_strain.transpose() * projection;

    // rigid-motion constraints: rows are translation x, translation y, rotation
    let mut c_poly = DMatrix::zeros(3, 2 * nk);
    let mut c_dofs = DMatrix::zeros(3, layout.n_dof);
    let disp_mean: Vec<f64> = {
        let mut acc = vec![0.0; nk];
        for (p, w) in quad.points.iter().zip(&quad.weights) {
            for (b, v) in disp.eval(*p).iter().enumerate() {
                acc[b] += w * v / area;
            }
        }
        acc
    };
    if k == 1 {
        let m = layout.edge_count as f64;
        for node in 0..layout.edge_count {
            let values = disp.eval(layout.node_points[node * k]);
            for (b, v) in values.iter().enumerate() {
                c_poly[(0, b)] += v / m;
                c_poly[(1, nk + b)] += v / m;
            }
            c_dofs[(0, layout.node_dof(node * k, 0))] = 1.0 / m;
            c_dofs[(1, layout.node_dof(node * k, 1))] = 1.0 / m;
        }
    } else {
        for b in 0..nk {
            c_poly[(0, b)] = disp_mean[b];
            c_poly[(1, nk + b)] = disp_mean[b];
        }
        c_dofs[(0, layout.moment_dof(0, 0))] = 1.0;
        c_dofs[(1, layout.moment_dof(1, 0))] = 1.0;
    }
    // mean rotation, scaled by h / |E|: int_E (d_x p_y - d_y p_x)
    let lower = ScaledMonomials::new(geom.centroid, h, k as isize - 1);
    let lower_mean: Vec<f64> = {
        let mut acc = vec![0.0; lower.len()];
        for (p, w) in quad.points.iter().zip(&quad.weights) {
            for (b, v) in lower.eval(*p).iter().enumerate() {
                acc[b] += w * v / area;
            }
        }
        acc
    };
    for (beta, &(a, b)) in disp.exponents().iter().enumerate() {
        if a > 0 {
            c_poly[(2, nk + beta)] += a as f64 * lower_mean[monomial_index(a - 1, b)];
        }
        if b > 0 {
            c_poly[(2, beta)] -= b as f64 * lower_mean[monomial_index(a, b - 1)];
        }
    }
    for (i, edge) in geom.edges.iter().enumerate() {
        let rule = edge_rule(edge.start, edge.end, k)?;
        let nodes = layout.edge_nodes(i);
        for (t, w) in rule.abscissae.iter().zip(&rule.weights) {
            let shape = lagrange(&layout.edge_params, *t);
            for (j, &node) in nodes.iter().enumerate() {
                let s = w * shape[j] * h / area;
                c_dofs[(2, layout.node_dof(node, 1))] += s * edge.normal.x;
                c_dofs[(2, layout.node_dof(node, 0))] -= s * edge.normal.y;
            }
        }
    }
    lhs += c_poly.transpose() * &c_poly;
    rhs += c_poly.transpose() * &c_dofs;
    let lu = lhs.lu();
    lu.solve(&rhs).ok_or(VemError::Singular("displacement reconstruction"))
}

/// Dof values of the basis polynomials of `[P_k]^2` (`n_dof x 2 dim P_k`).
fn polynomial_dofs(
    geom: &ElementGeometry,
    layout: &DofLayout,
    disp: &ScaledMonomials,
    quad: &QuadratureRule,
) -> DMatrix<f64> {
    let nk = disp.len();
    let mut d = DMatrix::zeros(layout.n_dof, 2 * nk);
    for (node, p) in layout.node_points.iter().enumerate() {
        for (b, v) in disp.eval(*p).iter().enumerate() {
            d[(layout.node_dof(node, 0), b)] = *v;
            d[(layout.node_dof(node, 1), nk + b)] = *v;
        }
    }
    if layout.moments_per_component > 0 {
        let moments = ScaledMonomials::new(geom.centroid, geom.diameter, layout.order as isize - 2);
        let mass = monomial_mass(&moments, disp, quad) / geom.area;
        for g in 0..moments.len() {
            for b in 0..nk {
                d[(layout.moment_dof(0, g), b)] = mass[(g, b)];
                d[(layout.moment_dof(1, g), nk + b)] = mass[(g, b)];
            }
        }
    }
    d
}

/// `s^E = (I - P)^T (I - P)` with `P` the dof interpolant of the polynomial
/// reconstruction.
pub fn stabilization_matrix(
    geom: &ElementGeometry,
    layout: &DofLayout,
    disp: &ScaledMonomials,
    quad: &QuadratureRule,
    reconstruction: &DMatrix<f64>,
) -> DMatrix<f64> {
    let p = polynomial_dofs(geom, layout, disp, quad) * reconstruction;
    let residual = DMatrix::identity(layout.n_dof, layout.n_dof) - p;
    residual.transpose() * residual
}

/// Stabilization scaling: trace of the tangent over the number of edges.
pub fn alpha_scaling(tangent: &Matrix3<f64>, edge_count: usize) -> Result<f64, VemError> {
    let alpha = tangent.trace() / edge_count as f64;
    if alpha.is_finite() && tangent.iter().all(|v| v.is_finite()) {
        Ok(alpha)
    } else {
        Err(VemError::NonFiniteScaling)
    }
}

/// Element residual contribution, tangent and trial material states.
#[derive(Debug, Clone)]
pub struct ElementResponse {
    pub force: DVector<f64>,
    pub tangent: DMatrix<f64>,
    /// One trial update per quadrature point, not committed.
    pub updates: Vec<UpdateResult>,
}

/// Internal force and consistent tangent of one element:
/// `sum_i w_i B_i^T sigma_i + alpha s^E u` and `sum_i w_i B_i^T K_i B_i + alpha s^E`.
#[allow(clippy::too_many_arguments)]
pub fn element_internal_force(
    ops: &ElementOperators,
    material: &Material,
    states_n: &[MaterialState],
    u_n: &DVector<f64>,
    u_trial: &DVector<f64>,
    ctx: &StepContext,
    alpha: f64,
) -> Result<ElementResponse, VemError> {
    let n = ops.n_dof();
    let mut force = &ops.stabilization * u_trial * alpha;
    let mut tangent = &ops.stabilization * alpha;
    let mut updates = Vec::with_capacity(ops.point_count());
    for (i, (b, w)) in ops.strain_at_points.iter().zip(&ops.quadrature.weights).enumerate() {
        let eps_n = ops.strain_at_point(i, u_n);
        let eps = ops.strain_at_point(i, u_trial);
        let update = material
            .update(ctx, &states_n[i], &eps_n, &eps)
            .map_err(|source| VemError::Material {
                x: ops.quadrature.points[i].x,
                y: ops.quadrature.points[i].y,
                source,
            })?;
        let sigma = DVector::from_column_slice(update.stress.as_slice());
        force.gemv_tr(*w, b, &sigma, 1.0);
        let kt = DMatrix::from_column_slice(3, 3, update.tangent.as_slice());
        let kb = kt * b;
        tangent.gemm_tr(*w, b, &kb, 1.0);
        updates.push(update);
    }
    debug_assert_eq!(force.len(), n);
    Ok(ElementResponse {
        force,
        tangent,
        updates,
    })
}

/// Consistent load of a body force through the polynomial reconstruction.
pub fn body_load_vector<F: Fn(Point2<f64>) -> Vector2<f64>>(ops: &ElementOperators, body_force: F) -> DVector<f64> {
    let mut f = DVector::zeros(ops.n_dof());
    for (p, w) in ops.quadrature.points.iter().zip(&ops.quadrature.weights) {
        let b = body_force(*p);
        if b == Vector2::zeros() {
            continue;
        }
        let psi = ops.displacement_operator_at(*p);
        f += psi.transpose() * b * *w;
    }
    f
}

/// Consistent edge load of a traction `q(s, x)` (`s` the arclength from the
/// edge start). Returns `2 (k + 1)` entries, nodes from start to end, both
/// components per node.
pub fn traction_load_vector<F: Fn(f64, Point2<f64>) -> Vector2<f64>>(
    edge: &EdgeGeometry,
    k: usize,
    traction: F,
) -> Result<DVector<f64>, VemError> {
    let params = edge_node_params(k);
    let rule = edge_rule(edge.start, edge.end, 2 * k)?;
    let mut f = DVector::zeros(2 * (k + 1));
    for ((t, p), w) in rule.abscissae.iter().zip(&rule.points).zip(&rule.weights) {
        let q = traction(t * edge.length, *p);
        for (j, s) in lagrange(&params, *t).iter().enumerate() {
            f[2 * j] += w * s * q.x;
            f[2 * j + 1] += w * s * q.y;
        }
    }
    Ok(f)
}

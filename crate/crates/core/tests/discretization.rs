//! Consistency of the discretization on whole meshes: the patch test on an
//! imported Voronoi mesh and a structured grid, and exactness of the polygon
//! quadrature on the benchmark meshes.

use std::path::Path;

use polyvem::materials::ElasticParams;
use polyvem::mesh::{
    generate_annulus_quads, generate_arch_quads, generate_plate_with_hole, generate_rectangle_quads, MeshFormat,
};
use polyvem::quadrature::{polygon_rule, reference_polygon_rule};
use polyvem::solver::{Component, DirichletCondition, LoadProgram};
use polyvem::vem::ScaledMonomials;
use polyvem::{run_analysis, AnalysisConfig, Material, ModelParams, PolygonalMesh, Regime};

const TAGS: [&str; 4] = ["left", "right", "bottom", "top"];

/// `u(x) = a + G x` with a non-symmetric gradient.
const OFFSET: [f64; 2] = [0.013, -0.021];
const GRADIENT: [[f64; 2]; 2] = [[0.002, -0.0035], [0.0041, -0.0017]];

fn exact(p: [f64; 2]) -> [f64; 2] {
    [
        OFFSET[0] + GRADIENT[0][0] * p[0] + GRADIENT[0][1] * p[1],
        OFFSET[1] + GRADIENT[1][0] * p[0] + GRADIENT[1][1] * p[1],
    ]
}

fn voronoi() -> PolygonalMesh {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/voronoi25.json");
    PolygonalMesh::load(&path, MeshFormat::NativeJson).unwrap()
}

fn patch_config(k: usize) -> AnalysisConfig {
    let mut dirichlet = Vec::new();
    for tag in TAGS {
        for (c, component) in [Component::X, Component::Y].into_iter().enumerate() {
            dirichlet.push(DirichletCondition {
                tag: tag.into(),
                component,
                value: OFFSET[c],
                gradient: GRADIENT[c],
            });
        }
    }
    AnalysisConfig {
        order: k,
        load_program: LoadProgram::proportional(1),
        newton: Default::default(),
        dirichlet,
        tractions: Vec::new(),
        body_force: [0.0, 0.0],
        probes: Vec::new(),
    }
}

/// Largest nodal error relative to the largest exact nodal displacement.
fn patch_error(mesh: &PolygonalMesh, k: usize) -> f64 {
    let material = Material::new(
        ModelParams::LinearElastic(ElasticParams {
            young: 1000.0,
            poisson: 0.3,
        }),
        Regime::PlaneStrain,
    )
    .unwrap();
    let config = patch_config(k);
    let result = run_analysis(mesh, &config, &material).unwrap();
    let map = polyvem::solver::DofMap::new(mesh, k);
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for node in 0..map.node_count() {
        let p = map.node_point(node);
        let u = exact([p.x, p.y]);
        for c in 0..2 {
            let uh = result.displacement[2 * node + c];
            err = err.max((uh - u[c]).abs());
            scale = scale.max(u[c].abs());
        }
    }
    err / scale
}

#[test]
fn affine_field_is_reproduced_on_voronoi_and_grid_meshes() {
    let start = std::time::Instant::now();
    let meshes = [("voronoi25", voronoi()), ("grid4x4", generate_rectangle_quads(1.0, 1.0, 4, 4).unwrap())];
    assert_eq!(meshes[0].1.cell_count(), 25);
    for (name, mesh) in &meshes {
        for k in 1..=3 {
            let err = patch_error(mesh, k);
            assert!(err < 1e-10, "{name}, k = {k}: relative nodal error {err:.3e}");
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

fn benchmark_meshes() -> Vec<(&'static str, PolygonalMesh)> {
    vec![
        ("cylinder", generate_annulus_quads(2.0, 4.0, true, 16, 16).unwrap()),
        ("plate", generate_plate_with_hole(100.0, 180.0, 50.0, 3).unwrap()),
        ("arch", generate_arch_quads(3.5, 4.5, 4, 32).unwrap()),
        ("voronoi25", voronoi()),
    ]
}

#[test]
fn polygon_rule_matches_high_order_oracle_on_benchmark_meshes() {
    for (name, mesh) in benchmark_meshes() {
        for k in 1..=3usize {
            let degree = 2 * (k - 1);
            for c in 0..mesh.cell_count() {
                let geom = mesh.element_geometry(c);
                let rule = polygon_rule(&geom, degree).unwrap();
                let oracle = reference_polygon_rule(&geom, 10);
                let monomials = ScaledMonomials::new(geom.centroid, geom.diameter, degree as isize);
                for i in 0..monomials.len() {
                    let got = rule.integrate(|p| monomials.eval(p)[i]);
                    let want = oracle.integrate(|p| monomials.eval(p)[i]);
                    let scale = want.abs().max(geom.area);
                    assert!(
                        (got - want).abs() <= 1e-12 * scale,
                        "{name} cell {c}, k = {k}, monomial {i}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

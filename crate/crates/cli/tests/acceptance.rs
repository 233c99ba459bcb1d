//! Acceptance harness: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.
//!
//! 1. patch test on a Voronoi mesh and a structured grid;
//! 2. polygon quadrature against a high-order oracle on the benchmark meshes;
//! 3. constitutive oracles (radial return, relaxation, SMA cycle);
//! 4. consistent tangents against finite differences;
//! 5. viscoelastic cylinder against the Lame solution, creep monotonicity;
//! 6. perforated plate against the reference displacements;
//! 7. SMA arch hysteresis, shape recovery and saturation;
//! 8. byte-identical curves from repeated plate runs.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use nalgebra::Vector3;
use polyvem::materials::{
    consistent_tangent_check, relaxation_modulus, ElasticParams, MaxwellParams, MisesParams, PronyTerm, YieldSurface,
};
use polyvem::mesh::{generate_rectangle_quads, MeshFormat};
use polyvem::quadrature::{polygon_rule, reference_polygon_rule};
use polyvem::solver::{Component, DirichletCondition, DofMap, LoadProgram};
use polyvem::vem::ScaledMonomials;
use polyvem::{run_analysis, AnalysisConfig, Material, ModelParams, PolygonalMesh, Regime, StepContext, StepRecord};
use polyvem_cli::bench::{self, BenchName, BenchOptions};
use polyvem_cli::{cmd_bench, Curve, RunReport};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn timed(limit_s: f64, start: Instant, mut v: Verdict) -> Verdict {
    let secs = start.elapsed().as_secs_f64();
    v.pass &= secs < limit_s;
    v.detail = format!("{}; {secs:.1} s (limit {limit_s} s)", v.detail);
    v
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn elastic_material(regime: Regime) -> Material {
    Material::new(
        ModelParams::LinearElastic(ElasticParams {
            young: 1000.0,
            poisson: 0.3,
        }),
        regime,
    )
    .unwrap()
}

// ---------------------------------------------------------------- criterion 1

const OFFSET: [f64; 2] = [0.013, -0.021];
const GRADIENT: [[f64; 2]; 2] = [[0.002, -0.0035], [0.0041, -0.0017]];

fn patch_error(mesh: &PolygonalMesh, k: usize) -> Result<f64> {
    let mut dirichlet = Vec::new();
    for tag in ["left", "right", "bottom", "top"] {
        for (c, component) in [Component::X, Component::Y].into_iter().enumerate() {
            dirichlet.push(DirichletCondition {
                tag: tag.into(),
                component,
                value: OFFSET[c],
                gradient: GRADIENT[c],
            });
        }
    }
    let config = AnalysisConfig {
        order: k,
        load_program: LoadProgram::proportional(1),
        newton: Default::default(),
        dirichlet,
        tractions: Vec::new(),
        body_force: [0.0, 0.0],
        probes: Vec::new(),
    };
    let result = run_analysis(mesh, &config, &elastic_material(Regime::PlaneStrain))?;
    let map = DofMap::new(mesh, k);
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for node in 0..map.node_count() {
        let p = map.node_point(node);
        for c in 0..2 {
            let exact = OFFSET[c] + GRADIENT[c][0] * p.x + GRADIENT[c][1] * p.y;
            err = err.max((result.displacement[2 * node + c] - exact).abs());
            scale = scale.max(exact.abs());
        }
    }
    Ok(err / scale)
}

fn criterion_1() -> Result<Verdict> {
    let start = Instant::now();
    let voronoi = PolygonalMesh::load(&fixture("voronoi25.json"), MeshFormat::NativeJson)?;
    if voronoi.cell_count() != 25 {
        bail!("Voronoi fixture has {} cells", voronoi.cell_count());
    }
    let grid = generate_rectangle_quads(1.0, 1.0, 4, 4)?;
    let mut worst = 0.0f64;
    for mesh in [&voronoi, &grid] {
        for k in [1, 2] {
            worst = worst.max(patch_error(mesh, k)?);
        }
    }
    Ok(timed(
        5.0,
        start,
        Verdict {
            pass: worst < 1e-10,
            detail: format!("max relative nodal error {worst:.2e} (< 1e-10) over voronoi25 and 4x4 grid, k = 1, 2"),
        },
    ))
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Result<Verdict> {
    let start = Instant::now();
    let mut meshes = Vec::new();
    for name in BenchName::ALL {
        let spec = bench::bench_spec(name, &BenchOptions::default(), "out".into())?;
        meshes.push(spec.mesh.build(Path::new("."))?);
    }
    let (mut worst, mut cells) = (0.0f64, 0usize);
    for mesh in &meshes {
        for c in 0..mesh.cell_count() {
            cells += 1;
            let geom = mesh.element_geometry(c);
            let oracle = reference_polygon_rule(&geom, 10);
            for k in 1..=3usize {
                let degree = 2 * (k - 1);
                let rule = polygon_rule(&geom, degree)?;
                let monomials = ScaledMonomials::new(geom.centroid, geom.diameter, degree as isize);
                for i in 0..monomials.len() {
                    let got = rule.integrate(|p| monomials.eval(p)[i]);
                    let want = oracle.integrate(|p| monomials.eval(p)[i]);
                    worst = worst.max((got - want).abs() / want.abs().max(geom.area));
                }
            }
        }
    }
    Ok(timed(
        10.0,
        start,
        Verdict {
            pass: worst <= 1e-12,
            detail: format!("max relative error {worst:.2e} (<= 1e-12) over {cells} benchmark cells, degrees 0, 2, 4"),
        },
    ))
}

// ---------------------------------------------------------------- criterion 3

fn mises_params(hk: f64, hi: f64) -> MisesParams {
    MisesParams {
        young: 7000.0,
        poisson: 0.3,
        yield_stress: 24.3,
        kinematic_hardening: hk,
        isotropic_hardening: hi,
        yield_surface: YieldSurface::HalfRootTwo,
    }
}

/// Relative deviation of the pure-shear `Delta zeta` from the scalar return.
fn mises_shear_error() -> Result<f64> {
    let mut worst = 0.0f64;
    for (hk, hi) in [(0.0, 0.0), (300.0, 0.0), (0.0, 500.0), (200.0, 400.0)] {
        let p = mises_params(hk, hi);
        let m = Material::new(ModelParams::Mises(p), Regime::PlaneStrain)?;
        let g = p.young / (2.0 * (1.0 + p.poisson));
        let c = YieldSurface::HalfRootTwo.factor();
        for gamma in [0.01, 0.02, 0.05] {
            let r = m.update(
                &StepContext::new(1.0, 1.0, 0.0),
                &m.initial_state(),
                &Vector3::zeros(),
                &Vector3::new(0.0, 0.0, gamma),
            )?;
            // |s_tr| = 2 G (gamma / 2) sqrt(2)
            let f_trial = 2.0 * g * gamma / std::f64::consts::SQRT_2 - c * p.yield_stress;
            let expected = f_trial / (2.0 * g + hk + c * c * hi);
            worst = worst.max((r.info.delta_zeta - expected).abs() / expected);
        }
    }
    Ok(worst)
}

/// Shear stress at `t_end` after a strain ramp to `gamma` over the first
/// step of length `dt`, held afterwards.
fn relaxation_stress(p: &MaxwellParams, dt: f64, t_end: f64, gamma: f64) -> Result<f64> {
    let m = Material::new(ModelParams::Maxwell(p.clone()), Regime::PlaneStrain)?;
    let e0 = Vector3::new(0.0, 0.0, gamma);
    let steps = (t_end / dt).round() as usize;
    let mut r = m.update(&StepContext::new(dt, dt, 0.0), &m.initial_state(), &Vector3::zeros(), &e0)?;
    for n in 2..=steps {
        r = m.update(&StepContext::new(n as f64 * dt, dt, 0.0), &r.state, &e0, &e0)?;
    }
    Ok(r.stress[2])
}

/// Errors against `s = 2 G(t) e0` for halving `dt` and the observed orders.
fn relaxation_convergence() -> Result<(Vec<f64>, Vec<f64>)> {
    let p = MaxwellParams {
        young: 1000.0,
        poisson: 0.3,
        mu0: 0.3,
        terms: vec![
            PronyTerm {
                weight: 0.5,
                relaxation_time: 1.0,
            },
            PronyTerm {
                weight: 0.2,
                relaxation_time: 4.0,
            },
        ],
    };
    let (t_end, gamma) = (3.0, 1e-3);
    // engineering shear gamma = 2 e0_xy: s_xy = 2 G(t) e0_xy = G(t) gamma
    let exact = relaxation_modulus(&p, t_end) * gamma;
    let mut errors = Vec::new();
    for n in [12, 24, 48, 96, 192] {
        let s = relaxation_stress(&p, t_end / n as f64, t_end, gamma)?;
        errors.push((s - exact).abs() / exact);
    }
    let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok((errors, orders))
}

/// Uniaxial stress cycle at `T > M_f`: returns (largest KT residual, largest
/// transformation strain norm, hysteresis gap at mid strain, final stress,
/// final transformation strain norm).
fn sma_cycle() -> Result<(f64, f64, f64, f64, f64)> {
    let p = bench::arch_material();
    let m = Material::new(ModelParams::Sma(p), Regime::PlaneStress)?;
    let temperature = 253.0;
    let n = 60;
    let peak = 0.05;
    let mut path: Vec<f64> = (1..=n).map(|i| peak * i as f64 / n as f64).collect();
    path.extend((0..n).rev().map(|i| peak * i as f64 / n as f64));
    let mut state = m.initial_state();
    let mut eps_n = Vector3::zeros();
    let (mut kt, mut sat) = (0.0f64, 0.0f64);
    let mut curve = Vec::new();
    let mut last = (0.0, 0.0);
    for (i, &ex) in path.iter().enumerate() {
        let ctx = StepContext::new(i as f64 + 1.0, 1.0, temperature);
        // lateral strain chosen so that sigma_yy = 0
        let mut eps = Vector3::new(ex, eps_n[1], 0.0);
        let mut r = m.update(&ctx, &state, &eps_n, &eps)?;
        for _ in 0..50 {
            if r.stress[1].abs() < 1e-10 * p.young * peak {
                break;
            }
            eps[1] -= r.stress[1] / r.tangent[(1, 1)];
            r = m.update(&ctx, &state, &eps_n, &eps)?;
        }
        let f = r.info.yield_function / p.yield_stress;
        let residual = if r.info.delta_zeta > 0.0 { f.abs() } else { f.max(0.0) };
        kt = kt.max(residual).max((r.info.gamma * r.info.saturation).abs());
        kt = kt.max((-r.info.gamma).max(0.0));
        let norm = r.state.inelastic_strain().map_or(0.0, |e| e.norm());
        sat = sat.max(norm);
        curve.push((ex, r.stress[0]));
        last = (r.stress[0], norm);
        state = r.state;
        eps_n = eps;
    }
    // stresses at the same strain on the loading and unloading branches
    let mid = n / 2 - 1;
    let loading = curve[mid].1;
    let unloading = curve[2 * n - 2 - mid].1;
    if (curve[mid].0 - curve[2 * n - 2 - mid].0).abs() > 1e-15 {
        bail!("cycle bookkeeping: strains do not match");
    }
    Ok((kt, sat, loading - unloading, last.0, last.1))
}

fn criterion_3() -> Result<Verdict> {
    let shear = mises_shear_error()?;
    let (errors, orders) = relaxation_convergence()?;
    let first_order = orders.iter().all(|o| (o - 1.0).abs() < 0.1);
    let (kt, sat, gap, final_stress, final_tr) = sma_cycle()?;
    let eps_l = bench::arch_material().eps_l;
    let closed = final_stress.abs() < 1e-6 && final_tr < 1e-12;
    let pass = shear <= 1e-12 && first_order && kt < 1e-10 && sat <= eps_l * (1.0 + 1e-12) && gap > 0.0 && closed;
    verdict(
        pass,
        format!(
            "(a) shear return rel. error {shear:.1e}; (b) relaxation errors {:.2e} -> {:.2e}, observed orders {}; \
             (c) KT residual {kt:.1e}, max |e_tr| {sat:.4}, loop gap {gap:.2} at mid strain, final stress {final_stress:.1e}, final |e_tr| {final_tr:.1e}",
            errors[0],
            errors[errors.len() - 1],
            orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join("/"),
        ),
    )
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Result<Verdict> {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for regime in [Regime::PlaneStrain, Regime::PlaneStress] {
        // elastic
        let m = elastic_material(regime);
        let e = consistent_tangent_check(
            &m,
            &StepContext::new(1.0, 1.0, 0.0),
            &m.initial_state(),
            &Vector3::zeros(),
            &Vector3::new(1e-3, -3e-4, 5e-4),
        )?;
        // viscoelastic
        let ve = Material::new(ModelParams::Maxwell(bench::cylinder_material(BenchName::CylinderVe2)), regime)?;
        let v = consistent_tangent_check(
            &ve,
            &StepContext::new(1.0, 0.5, 0.0),
            &ve.initial_state(),
            &Vector3::new(1e-4, 0.0, 0.0),
            &Vector3::new(1e-3, -3e-4, 5e-4),
        )?;
        // plastic, with and without hardening
        let mut p = 0.0f64;
        for (hk, hi) in [(0.0, 0.0), (150.0, 300.0)] {
            let mm = Material::new(ModelParams::Mises(mises_params(hk, hi)), regime)?;
            let r = mm.update(
                &StepContext::new(1.0, 1.0, 0.0),
                &mm.initial_state(),
                &Vector3::zeros(),
                &Vector3::new(4e-3, -1e-3, 3e-3),
            )?;
            if r.info.delta_zeta <= 0.0 {
                bail!("plastic tangent probe is not plastic");
            }
            p = p.max(consistent_tangent_check(
                &mm,
                &StepContext::new(1.0, 1.0, 0.0),
                &mm.initial_state(),
                &Vector3::zeros(),
                &Vector3::new(4e-3, -1e-3, 3e-3),
            )?);
        }
        // SMA mid-transformation
        let sm = Material::new(ModelParams::Sma(bench::arch_material()), regime)?;
        let path = |x: f64| Vector3::new(x, -0.5 * x, 0.0);
        let mut state = sm.initial_state();
        let mut eps_n = Vector3::zeros();
        for i in 1..=6 {
            let eps = path(0.002 * i as f64);
            state = sm.update(&StepContext::new(i as f64, 1.0, 260.0), &state, &eps_n, &eps)?.state;
            eps_n = eps;
        }
        let norm = state.inelastic_strain().map_or(0.0, |e| e.norm());
        if !(norm > 0.0 && norm < bench::arch_material().eps_l) {
            bail!("SMA probe is not mid-transformation (|e_tr| = {norm})");
        }
        let s = consistent_tangent_check(&sm, &StepContext::new(7.0, 1.0, 260.0), &state, &eps_n, &path(0.0135))?;
        pass &= e < 1e-9 && v < 1e-9 && p < 1e-5 && s < 1e-4;
        lines.push(format!("{regime:?}: elastic {e:.1e}, maxwell {v:.1e}, mises {p:.1e}, sma {s:.1e}"));
    }
    Ok(timed(5.0, start, Verdict { pass, detail: lines.join("; ") }))
}

// ---------------------------------------------------------------- criterion 5

fn run_bench(name: BenchName, options: &BenchOptions, out: &Path) -> Result<(RunReport, Curve)> {
    let report = cmd_bench(name, options, out, |_: &StepRecord| {})?;
    let curve = Curve::load(&report.curve)?;
    Ok((report, curve))
}

/// Plane-strain Lame radial displacement of a pressurized thick cylinder.
fn lame_radial(k: f64, g: f64, a: f64, b: f64, p: f64, r: f64) -> f64 {
    let lambda = k - 2.0 * g / 3.0;
    let big_a = p * a * a / (2.0 * (lambda + g) * (b * b - a * a));
    let big_b = p * a * a * b * b / (2.0 * g * (b * b - a * a));
    big_a * r + big_b / r
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn criterion_5(tmp: &Path) -> Result<Verdict> {
    let start = Instant::now();
    let ve1 = bench::cylinder_material(BenchName::CylinderVe1);
    let k_bulk = ve1.bulk_modulus();
    let ratio0 = k_bulk / ve1.relaxation_modulus(0.0);
    let ratio_inf = k_bulk / ve1.relaxation_modulus(f64::INFINITY);
    let ratio8 = k_bulk / ve1.relaxation_modulus(8.0);
    let mut pass = (ratio0 - 2.167).abs() < 5e-4 && (ratio_inf / 216.7 - 1.0).abs() < 1e-3;
    let mut parts = vec![format!("K/G(0) = {ratio0:.4}, K/G(inf) = {ratio_inf:.2} (K/G(8) = {ratio8:.1})")];
    for name in [BenchName::CylinderVe1, BenchName::CylinderVe2] {
        let (_, curve) = run_bench(name, &BenchOptions::default(), &tmp.join(name.to_string()))?;
        let params = bench::cylinder_material(name);
        let g1 = params.step_shear_modulus(1.0);
        let (a, b, p) = (bench::CYLINDER_INNER_RADIUS, bench::CYLINDER_OUTER_RADIUS, bench::CYLINDER_PRESSURE);
        let ua = curve.column("A_ux").unwrap_or_default();
        let ub = curve.column("B_ux").unwrap_or_default();
        if ua.len() != bench::CYLINDER_STEPS || ub.len() != bench::CYLINDER_STEPS {
            bail!("{name}: expected {} rows", bench::CYLINDER_STEPS);
        }
        let ea = (ua[0] / lame_radial(params.bulk_modulus(), g1, a, b, p, a) - 1.0).abs();
        let eb = (ub[0] / lame_radial(params.bulk_modulus(), g1, a, b, p, b) - 1.0).abs();
        let mono = strictly_increasing(&ua) && strictly_increasing(&ub);
        pass &= ea < 0.01 && eb < 0.01 && mono;
        parts.push(format!(
            "{name}: first-step Lame error A {:.3}% B {:.3}%, monotone {mono}, u_A {:.4} -> {:.4}",
            100.0 * ea,
            100.0 * eb,
            ua[0],
            ua[ua.len() - 1]
        ));
    }
    Ok(timed(60.0, start, Verdict { pass, detail: parts.join("; ") }))
}

// ---------------------------------------------------------- criteria 6 and 8

const PLATE_U_A: f64 = 2.720;
const PLATE_V_B: f64 = 1.851;
const PLATE_REF_U_A: f64 = 2.741;
const PLATE_REF_V_B: f64 = 1.859;

struct PlateRun {
    u_a: f64,
    v_b: f64,
    mean_iterations: f64,
    seconds: f64,
    csv: Vec<u8>,
}

fn plate(increments: usize, out: &Path) -> Result<PlateRun> {
    let start = Instant::now();
    let options = BenchOptions {
        plate_increments: Some(increments),
        ..BenchOptions::default()
    };
    let (report, curve) = run_bench(BenchName::Plate, &options, out)?;
    let seconds = start.elapsed().as_secs_f64();
    let last = report.records.last().expect("plate has steps");
    let iterations: usize = report.records.iter().map(|r| r.iterations).sum();
    if curve.rows.len() != increments {
        bail!("plate curve has {} rows, expected {increments}", curve.rows.len());
    }
    Ok(PlateRun {
        u_a: last.probes[0][0],
        v_b: last.probes[1][1],
        mean_iterations: iterations as f64 / report.records.len() as f64,
        seconds,
        csv: std::fs::read(&report.curve)?,
    })
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x / target - 1.0).abs() <= tol
}

fn plate_line(tag: &str, r: &PlateRun) -> String {
    format!(
        "{tag}: u_A = {:.4} ({:+.2}% / ref {:+.2}%), v_B = {:.4} ({:+.2}% / ref {:+.2}%), {:.2} iterations/step, {:.0} s",
        r.u_a,
        100.0 * (r.u_a / PLATE_U_A - 1.0),
        100.0 * (r.u_a / PLATE_REF_U_A - 1.0),
        r.v_b,
        100.0 * (r.v_b / PLATE_V_B - 1.0),
        100.0 * (r.v_b / PLATE_REF_V_B - 1.0),
        r.mean_iterations,
        r.seconds
    )
}

fn criterion_6(full: &PlateRun, ci: &PlateRun) -> Result<Verdict> {
    let full_ok = within(full.u_a, PLATE_U_A, 0.02)
        && within(full.v_b, PLATE_V_B, 0.02)
        && within(full.u_a, PLATE_REF_U_A, 0.03)
        && within(full.v_b, PLATE_REF_V_B, 0.03)
        && (4.0..=9.0).contains(&full.mean_iterations)
        && full.seconds < 900.0;
    let ci_ok = within(ci.u_a, PLATE_U_A, 0.04) && within(ci.v_b, PLATE_V_B, 0.04) && (4.0..=9.0).contains(&ci.mean_iterations);
    verdict(
        full_ok && ci_ok,
        format!("{}; {}", plate_line("400 increments", full), plate_line("100 increments", ci)),
    )
}

fn criterion_8(first: &PlateRun, second: &PlateRun) -> Result<Verdict> {
    verdict(
        first.csv == second.csv,
        format!(
            "two 100-increment plate runs: {} and {} bytes, identical = {}",
            first.csv.len(),
            second.csv.len(),
            first.csv == second.csv
        ),
    )
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7(tmp: &Path) -> Result<Verdict> {
    let start = Instant::now();
    let (report, curve) = run_bench(BenchName::SmaArch, &BenchOptions::default(), &tmp.join("sma-arch"))?;
    let u = curve.column("A_ux").unwrap_or_default();
    let factor = curve.column("factor").unwrap_or_default();
    let n = bench::ARCH_BRANCH_INCREMENTS;
    let expected = 4 * n + bench::ARCH_HEATING_INCREMENTS;
    if u.len() != expected {
        bail!("arch curve has {} rows, expected {expected}", u.len());
    }
    // half load on the loading (step n/2) and unloading (step 3n/2) branches
    let (i_load, i_unload) = (n / 2 - 1, 3 * n / 2 - 1);
    if (factor[i_load] - 0.5).abs() > 1e-12 || (factor[i_unload] - 0.5).abs() > 1e-12 {
        bail!("half-load rows not found");
    }
    let peak = u[..2 * n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gap = (u[i_unload] - u[i_load]).abs();
    let hysteretic = gap > 0.05 * peak;
    let residual = u[4 * n - 1];
    let recovered = u[expected - 1];
    let recovery = 1.0 - recovered.abs() / residual.abs();
    let eps_l = bench::arch_material().eps_l;
    let max_tr = report.records.iter().map(|r| r.max_inelastic_strain).fold(0.0, f64::max);
    let saturated_ok = max_tr <= eps_l * (1.0 + 1e-10);
    let bisected = report.records.iter().filter(|r| r.substeps > 1).count();
    Ok(timed(
        600.0,
        start,
        Verdict {
            pass: hysteretic && recovery > 0.8 && saturated_ok,
            detail: format!(
                "{} steps ({bisected} bisected); (a) half-load u_A {:.4} loading vs {:.4} unloading, gap {:.1}% of peak {:.4}; \
                 (b) residual {:.4} -> {:.2e} after heating ({:.1}% recovered); (c) max |e_tr| {max_tr:.6} <= {eps_l}",
                u.len(),
                u[i_load],
                u[i_unload],
                100.0 * gap / peak,
                peak,
                residual,
                recovered,
                100.0 * recovery
            ),
        },
    ))
}

// --------------------------------------------------------------------- driver

fn report(number: usize, outcome: Result<Verdict>) -> bool {
    match outcome {
        Ok(v) => {
            println!("{} criterion {number}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
            v.pass
        }
        Err(err) => {
            println!("FAIL criterion {number}: error: {err:#}");
            false
        }
    }
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let tmp = tmp.path();
    let mut all = true;
    all &= report(1, criterion_1());
    all &= report(2, criterion_2());
    all &= report(3, criterion_3());
    all &= report(4, criterion_4());
    all &= report(5, criterion_5(tmp));

    let plate_full = plate(bench::PLATE_INCREMENTS, &tmp.join("plate-400"));
    let plate_ci = plate(100, &tmp.join("plate-100-a"));
    let plate_ci_again = plate(100, &tmp.join("plate-100-b"));
    all &= report(
        6,
        match (&plate_full, &plate_ci) {
            (Ok(full), Ok(ci)) => criterion_6(full, ci),
            (Err(e), _) | (_, Err(e)) => Err(anyhow::anyhow!("{e:#}")),
        },
    );
    all &= report(7, criterion_7(tmp));
    all &= report(
        8,
        match (&plate_ci, &plate_ci_again) {
            (Ok(a), Ok(b)) => criterion_8(a, b),
            (Err(e), _) | (_, Err(e)) => Err(anyhow::anyhow!("{e:#}")),
        },
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

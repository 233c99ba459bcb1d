//! Backward-Euler constitutive updates with consistent tangents.
//!
//! Every model is integrated in three-dimensional (Mandel) form and wrapped
//! by a 2D regime adapter: plane strain fixes `eps_zz = 0`, plane stress
//! iterates on `eps_zz` until `sigma_zz = 0` and condenses the tangent.
//! Updates are pure: the returned state is a trial state that the caller
//! commits once the global iteration has converged.

mod maxwell;
mod mises;
mod sma;
pub mod tensor;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use tensor::{Mandel, Mandel4};

pub use maxwell::relaxation_modulus;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("invalid material parameter: {0}")]
    InvalidParameter(String),
    #[error("{model} return map did not converge in {iterations} iterations (residual {residual:.3e})")]
    ReturnMap {
        model: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("plane-stress iteration did not converge in {iterations} iterations (sigma_zz = {residual:.3e})")]
    PlaneStress { iterations: usize, residual: f64 },
    #[error("internal variables do not belong to the {0} model")]
    StateMismatch(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    PlaneStrain,
    PlaneStress,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticParams {
    pub young: f64,
    pub poisson: f64,
}

impl ElasticParams {
    pub fn bulk_modulus(&self) -> f64 {
        self.young / (3.0 * (1.0 - 2.0 * self.poisson))
    }

    pub fn shear_modulus(&self) -> f64 {
        self.young / (2.0 * (1.0 + self.poisson))
    }

    fn validate(&self) -> Result<(), MaterialError> {
        if !(self.young > 0.0 && self.young.is_finite()) {
            return Err(MaterialError::InvalidParameter(format!("young = {} must be positive", self.young)));
        }
        if !(self.poisson > -1.0 && self.poisson < 0.5) {
            return Err(MaterialError::InvalidParameter(format!(
                "poisson = {} must lie in (-1, 0.5)",
                self.poisson
            )));
        }
        Ok(())
    }
}

/// One Maxwell branch of the Prony series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PronyTerm {
    /// Dimensionless weight `mu_m`.
    pub weight: f64,
    /// Relaxation time `lambda_m`.
    pub relaxation_time: f64,
}

/// Generalized Maxwell solid: elastic volumetric response, deviatoric
/// relaxation modulus `G (mu_0 + sum_m mu_m exp(-t / lambda_m))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxwellParams {
    pub young: f64,
    pub poisson: f64,
    /// Long-term weight `mu_0`.
    pub mu0: f64,
    pub terms: Vec<PronyTerm>,
}

/// Von Mises plasticity with linear isotropic and kinematic hardening.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MisesParams {
    pub young: f64,
    pub poisson: f64,
    pub yield_stress: f64,
    #[serde(default)]
    pub kinematic_hardening: f64,
    #[serde(default)]
    pub isotropic_hardening: f64,
    #[serde(default)]
    pub yield_surface: YieldSurface,
}

/// Radius factor `c` of the von Mises surface `|X| <= c (sigma_y0 + H_i ebar_p)`.
///
/// The accumulated plastic strain evolves as `d ebar_p = c dzeta`, so the
/// isotropic modulus enters the return map as `c^2 H_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YieldSurface {
    /// `c = sqrt(2) / 2`: `sigma_y0` is twice the yield stress in pure shear.
    #[default]
    HalfRootTwo,
    /// `c = sqrt(2 / 3)`: `sigma_y0` is the uniaxial yield stress.
    RootTwoThirds,
}

impl YieldSurface {
    pub fn factor(self) -> f64 {
        match self {
            YieldSurface::HalfRootTwo => std::f64::consts::FRAC_1_SQRT_2,
            YieldSurface::RootTwoThirds => (2.0f64 / 3.0).sqrt(),
        }
    }
}

/// Shape-memory alloy with saturated, traceless transformation strain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmaParams {
    pub young: f64,
    pub poisson: f64,
    /// Maximum transformation strain norm `eps_L`.
    pub eps_l: f64,
    /// Martensite finish temperature `M_f`.
    pub m_f: f64,
    /// Transformation hardening `h`.
    pub h: f64,
    /// Temperature sensitivity `beta`.
    pub beta: f64,
    /// Transformation threshold `sigma_y0`.
    pub yield_stress: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelParams {
    LinearElastic(ElasticParams),
    Maxwell(MaxwellParams),
    Mises(MisesParams),
    Sma(SmaParams),
}

impl ModelParams {
    pub fn elastic(&self) -> ElasticParams {
        let (young, poisson) = match self {
            ModelParams::LinearElastic(p) => (p.young, p.poisson),
            ModelParams::Maxwell(p) => (p.young, p.poisson),
            ModelParams::Mises(p) => (p.young, p.poisson),
            ModelParams::Sma(p) => (p.young, p.poisson),
        };
        ElasticParams { young, poisson }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::LinearElastic(_) => "linear-elastic",
            ModelParams::Maxwell(_) => "maxwell",
            ModelParams::Mises(_) => "mises",
            ModelParams::Sma(_) => "sma",
        }
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        self.elastic().validate()?;
        let bad = |msg: String| Err(MaterialError::InvalidParameter(msg));
        match self {
            ModelParams::LinearElastic(_) => Ok(()),
            ModelParams::Maxwell(p) => {
                let sum = p.mu0 + p.terms.iter().map(|t| t.weight).sum::<f64>();
                if (sum - 1.0).abs() > 1e-12 {
                    return bad(format!("Prony weights sum to {sum}, expected 1"));
                }
                if p.mu0 < 0.0 || p.terms.iter().any(|t| t.weight < 0.0) {
                    return bad("Prony weights must be non-negative".into());
                }
                if p.terms.iter().any(|t| !(t.relaxation_time > 0.0)) {
                    return bad("relaxation times must be positive".into());
                }
                Ok(())
            }
            ModelParams::Mises(p) => {
                if !(p.yield_stress > 0.0) {
                    return bad("yield_stress must be positive".into());
                }
                if p.kinematic_hardening < 0.0 || p.isotropic_hardening < 0.0 {
                    return bad("hardening moduli must be non-negative".into());
                }
                Ok(())
            }
            ModelParams::Sma(p) => {
                if !(p.eps_l > 0.0) {
                    return bad("eps_l must be positive".into());
                }
                if p.h < 0.0 || p.beta < 0.0 {
                    return bad("h and beta must be non-negative".into());
                }
                if !(p.yield_stress > 0.0) {
                    return bad("yield_stress must be positive".into());
                }
                Ok(())
            }
        }
    }
}

/// Time, step length and temperature of the step being computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepContext {
    pub time: f64,
    pub dt: f64,
    pub temperature: f64,
}

impl StepContext {
    pub fn new(time: f64, dt: f64, temperature: f64) -> Self {
        Self { time, dt, temperature }
    }
}

/// Model-specific internal variables (all strain-like tensors in Mandel form).
#[derive(Debug, Clone, PartialEq)]
pub enum InternalVariables {
    None,
    Maxwell {
        /// Recursive deviatoric history `h^(m)`, one per Prony term.
        partial_strains: Vec<Mandel>,
    },
    Mises {
        plastic_strain: Mandel,
        accumulated: f64,
        back_stress: Mandel,
    },
    Sma {
        transformation_strain: Mandel,
        back_stress: Mandel,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialState {
    pub internal: InternalVariables,
    /// `eps_zz`: zero in plane strain, solved for in plane stress.
    pub out_of_plane_strain: f64,
    pub time: f64,
}

impl MaterialState {
    /// Norm of the inelastic strain that is bounded or monotone for the
    /// model: transformation strain (SMA) or plastic strain (Mises).
    pub fn inelastic_strain(&self) -> Option<Mandel> {
        match &self.internal {
            InternalVariables::Mises { plastic_strain, .. } => Some(*plastic_strain),
            InternalVariables::Sma {
                transformation_strain, ..
            } => Some(*transformation_strain),
            _ => None,
        }
    }
}

/// Diagnostics of one update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateInfo {
    /// Inelastic multiplier increment `Delta zeta` (0 for elastic steps).
    pub delta_zeta: f64,
    /// Saturation multiplier `gamma` of `c = |e_tr|^2 / eps_L^2 - 1` (SMA only).
    pub gamma: f64,
    /// Yield or transformation function at the end of the step.
    pub yield_function: f64,
    /// Saturation function `|e_tr|^2 / eps_L^2 - 1` (SMA only).
    pub saturation: f64,
    /// Local iterations of the return map.
    pub iterations: usize,
    /// Plane-stress iterations (0 in plane strain).
    pub regime_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateResult {
    /// In-plane Voigt stress.
    pub stress: Vector3<f64>,
    pub stress_zz: f64,
    pub state: MaterialState,
    /// In-plane consistent tangent (condensed in plane stress).
    pub tangent: Matrix3<f64>,
    pub info: UpdateInfo,
}

/// Three-dimensional update result of a model.
pub(crate) struct PointUpdate {
    pub stress: Mandel,
    pub tangent: Mandel4,
    pub internal: InternalVariables,
    pub info: UpdateInfo,
}

const PLANE_STRESS_MAX_ITER: usize = 50;

/// A model bound to a 2D regime.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    params: ModelParams,
    regime: Regime,
}

impl Material {
    pub fn new(params: ModelParams, regime: Regime) -> Result<Self, MaterialError> {
        params.validate()?;
        Ok(Self { params, regime })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn initial_state(&self) -> MaterialState {
        let internal = match &self.params {
            ModelParams::LinearElastic(_) => InternalVariables::None,
            ModelParams::Maxwell(p) => InternalVariables::Maxwell {
                partial_strains: vec![Mandel::zeros(); p.terms.len()],
            },
            ModelParams::Mises(_) => InternalVariables::Mises {
                plastic_strain: Mandel::zeros(),
                accumulated: 0.0,
                back_stress: Mandel::zeros(),
            },
            ModelParams::Sma(_) => InternalVariables::Sma {
                transformation_strain: Mandel::zeros(),
                back_stress: Mandel::zeros(),
            },
        };
        MaterialState {
            internal,
            out_of_plane_strain: 0.0,
            time: 0.0,
        }
    }

    fn elastic_stiffness(&self) -> Mandel4 {
        let e = self.params.elastic();
        tensor::isotropic_stiffness(e.bulk_modulus(), e.shear_modulus())
    }

    /// In-plane elastic stiffness of the regime.
    pub fn elastic_tangent(&self) -> Matrix3<f64> {
        tensor::voigt_tangent(&self.elastic_stiffness(), self.regime == Regime::PlaneStress)
    }

    fn update_3d(
        &self,
        ctx: &StepContext,
        internal: &InternalVariables,
        eps_n: &Mandel,
        eps: &Mandel,
    ) -> Result<PointUpdate, MaterialError> {
        match &self.params {
            ModelParams::LinearElastic(_) => {
                let c = self.elastic_stiffness();
                Ok(PointUpdate {
                    stress: c * eps,
                    tangent: c,
                    internal: InternalVariables::None,
                    info: UpdateInfo::default(),
                })
            }
            ModelParams::Maxwell(p) => maxwell::update(p, ctx, internal, eps_n, eps),
            ModelParams::Mises(p) => mises::update(p, internal, eps),
            ModelParams::Sma(p) => sma::update(p, ctx, internal, eps),
        }
    }

    /// Stress, trial state and consistent tangent at the end of a step from
    /// `eps_n` (committed, with `state_n`) to `eps`.
    pub fn update(
        &self,
        ctx: &StepContext,
        state_n: &MaterialState,
        eps_n: &Vector3<f64>,
        eps: &Vector3<f64>,
    ) -> Result<UpdateResult, MaterialError> {
        let e_n = tensor::strain_to_mandel(eps_n, state_n.out_of_plane_strain);
        let (point, ezz, regime_iterations) = match self.regime {
            Regime::PlaneStrain => {
                let e = tensor::strain_to_mandel(eps, 0.0);
                (self.update_3d(ctx, &state_n.internal, &e_n, &e)?, 0.0, 0)
            }
            Regime::PlaneStress => self.plane_stress(ctx, state_n, &e_n, eps)?,
        };
        let (stress, stress_zz) = tensor::stress_to_voigt(&point.stress);
        let tangent = tensor::voigt_tangent(&point.tangent, self.regime == Regime::PlaneStress);
        let mut info = point.info;
        info.regime_iterations = regime_iterations;
        Ok(UpdateResult {
            stress,
            stress_zz,
            state: MaterialState {
                internal: point.internal,
                out_of_plane_strain: ezz,
                time: ctx.time,
            },
            tangent,
            info,
        })
    }

    /// Newton iteration on `eps_zz` driving `sigma_zz` to zero.
    fn plane_stress(
        &self,
        ctx: &StepContext,
        state_n: &MaterialState,
        e_n: &Mandel,
        eps: &Vector3<f64>,
    ) -> Result<(PointUpdate, f64, usize), MaterialError> {
        let tol = 1e-12 * self.params.elastic().young;
        // elastic predictor for the out-of-plane strain increment
        let c = self.elastic_stiffness();
        let d_in = tensor::strain_to_mandel(eps, state_n.out_of_plane_strain) - e_n;
        let mut ezz = state_n.out_of_plane_strain - (c.row(2) * d_in)[0] / c[(2, 2)];
        let mut residual = f64::INFINITY;
        for it in 1..=PLANE_STRESS_MAX_ITER {
            let e = tensor::strain_to_mandel(eps, ezz);
            let point = self.update_3d(ctx, &state_n.internal, e_n, &e)?;
            residual = point.stress[2];
            if residual.abs() <= tol {
                return Ok((point, ezz, it));
            }
            let czz = point.tangent[(2, 2)];
            ezz -= residual / if czz > 0.0 { czz } else { c[(2, 2)] };
        }
        Err(MaterialError::PlaneStress {
            iterations: PLANE_STRESS_MAX_ITER,
            residual,
        })
    }
}

/// Largest entry-wise deviation between the consistent tangent and central
/// finite differences of the stress, relative to the largest tangent entry.
/// The step is `1e-6 |eps|` with a floor of `1e-8`.
pub fn consistent_tangent_check(
    material: &Material,
    ctx: &StepContext,
    state_n: &MaterialState,
    eps_n: &Vector3<f64>,
    eps: &Vector3<f64>,
) -> Result<f64, MaterialError> {
    let base = material.update(ctx, state_n, eps_n, eps)?;
    let h = (1e-6 * eps.norm()).max(1e-8);
    let mut fd = Matrix3::zeros();
    for j in 0..3 {
        let mut plus = *eps;
        let mut minus = *eps;
        plus[j] += h;
        minus[j] -= h;
        let sp = material.update(ctx, state_n, eps_n, &plus)?.stress;
        let sm = material.update(ctx, state_n, eps_n, &minus)?.stress;
        fd.set_column(j, &((sp - sm) / (2.0 * h)));
    }
    Ok((fd - base.tangent).amax() / base.tangent.amax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn elastic_params() -> ElasticParams {
        ElasticParams {
            young: 1000.0,
            poisson: 0.3,
        }
    }

    #[test]
    fn plane_strain_stiffness_matches_lame_form() {
        let m = Material::new(ModelParams::LinearElastic(elastic_params()), Regime::PlaneStrain).unwrap();
        let (e, nu) = (1000.0, 0.3);
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let g = e / (2.0 * (1.0 + nu));
        let d = Matrix3::new(lambda + 2.0 * g, lambda, 0.0, lambda, lambda + 2.0 * g, 0.0, 0.0, 0.0, g);
        assert_relative_eq!(m.elastic_tangent(), d, epsilon = 1e-10);
        assert_relative_eq!(m.elastic_tangent().trace(), 3076.923_076_923_077, epsilon = 1e-9);
    }

    #[test]
    fn plane_stress_stiffness_matches_closed_form() {
        let m = Material::new(ModelParams::LinearElastic(elastic_params()), Regime::PlaneStress).unwrap();
        let (e, nu) = (1000.0, 0.3);
        let f = e / (1.0 - nu * nu);
        let d = Matrix3::new(f, f * nu, 0.0, f * nu, f, 0.0, 0.0, 0.0, f * (1.0 - nu) / 2.0);
        assert_relative_eq!(m.elastic_tangent(), d, epsilon = 1e-10);
        let state = m.initial_state();
        let eps = Vector3::new(1e-3, -4e-4, 2e-4);
        let r = m.update(&StepContext::new(1.0, 1.0, 0.0), &state, &Vector3::zeros(), &eps).unwrap();
        assert!(r.stress_zz.abs() < 1e-9);
        assert_relative_eq!(r.stress, d * eps, epsilon = 1e-10);
        assert_relative_eq!(r.state.out_of_plane_strain, -nu / (1.0 - nu) * (eps[0] + eps[1]), epsilon = 1e-15);
    }

    #[test]
    fn elastic_step_without_strain_change() {
        let p = MisesParams {
            young: 1000.0,
            poisson: 0.3,
            yield_stress: 10.0,
            kinematic_hardening: 0.0,
            isotropic_hardening: 0.0,
            yield_surface: YieldSurface::default(),
        };
        let m = Material::new(ModelParams::Mises(p), Regime::PlaneStrain).unwrap();
        let eps = Vector3::new(1e-3, 0.0, 0.0);
        let s0 = m.initial_state();
        let r = m.update(&StepContext::new(1.0, 1.0, 0.0), &s0, &eps, &eps).unwrap();
        assert_relative_eq!(r.stress, m.elastic_tangent() * eps, epsilon = 1e-12);
        assert_eq!(r.state.internal, s0.internal);
        assert_relative_eq!(r.tangent, m.elastic_tangent(), epsilon = 1e-10);
    }

    #[test]
    fn parameter_validation() {
        let mut e = elastic_params();
        e.poisson = 0.5;
        assert!(Material::new(ModelParams::LinearElastic(e), Regime::PlaneStrain).is_err());
        let bad = MaxwellParams {
            young: 1000.0,
            poisson: 0.3,
            mu0: 0.5,
            terms: vec![PronyTerm {
                weight: 0.6,
                relaxation_time: 1.0,
            }],
        };
        assert!(Material::new(ModelParams::Maxwell(bad), Regime::PlaneStrain).is_err());
    }

    #[test]
    fn params_serialize_with_model_tag() {
        let p = ModelParams::Mises(MisesParams {
            young: 7000.0,
            poisson: 0.3,
            yield_stress: 24.3,
            kinematic_hardening: 0.0,
            isotropic_hardening: 0.0,
            yield_surface: YieldSurface::default(),
        });
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"model\":\"mises\""));
        let back: ModelParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn elastic_tangent_check() {
        for regime in [Regime::PlaneStrain, Regime::PlaneStress] {
            let m = Material::new(ModelParams::LinearElastic(elastic_params()), regime).unwrap();
            let err = consistent_tangent_check(
                &m,
                &StepContext::new(1.0, 1.0, 0.0),
                &m.initial_state(),
                &Vector3::zeros(),
                &Vector3::new(1e-3, 2e-3, -1e-3),
            )
            .unwrap();
            assert!(err < 1e-9, "{err}");
        }
    }
}

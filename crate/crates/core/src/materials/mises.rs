//! Von Mises plasticity with linear isotropic and kinematic hardening,
//! integrated by closed-form radial return.
//!
//! Yield function `f = |X| - c (sigma_y0 + H_i ebar_p)` with the relative
//! stress `X = s - H_kin e_p`; flow `de_p = dzeta X / |X|` and
//! `d ebar_p = c dzeta`. The default radius factor is `c = sqrt(2) / 2`.

use super::tensor::{self, Mandel};
use super::{InternalVariables, MaterialError, MisesParams, PointUpdate, UpdateInfo};

/// Radius `c sigma_y` of the elastic domain.
pub(super) fn yield_radius(p: &MisesParams, accumulated: f64) -> f64 {
    p.yield_surface.factor() * (p.yield_stress + p.isotropic_hardening * accumulated)
}

pub(super) fn update(p: &MisesParams, internal: &InternalVariables, eps: &Mandel) -> Result<PointUpdate, MaterialError> {
    let InternalVariables::Mises {
        plastic_strain,
        accumulated,
        ..
    } = internal
    else {
        return Err(MaterialError::StateMismatch("mises"));
    };
    let bulk = p.young / (3.0 * (1.0 - 2.0 * p.poisson));
    let g = p.young / (2.0 * (1.0 + p.poisson));
    let volumetric = tensor::identity() * (bulk * tensor::trace(eps));
    let s_trial = (tensor::deviator(eps) - plastic_strain) * (2.0 * g);
    let x_trial = s_trial - plastic_strain * p.kinematic_hardening;
    let norm = x_trial.norm();
    let f_trial = norm - yield_radius(p, *accumulated);
    if f_trial <= 0.0 {
        return Ok(PointUpdate {
            stress: volumetric + s_trial,
            tangent: tensor::isotropic_stiffness(bulk, g),
            internal: internal.clone(),
            info: UpdateInfo {
                yield_function: f_trial,
                ..UpdateInfo::default()
            },
        });
    }
    let radius_factor = p.yield_surface.factor();
    let c = 2.0 * g + p.kinematic_hardening + radius_factor * radius_factor * p.isotropic_hardening;
    let dzeta = f_trial / c;
    let n = x_trial / norm;
    let ep = plastic_strain + n * dzeta;
    let ebar = accumulated + radius_factor * dzeta;
    let s = s_trial - n * (2.0 * g * dzeta);
    let back = ep * p.kinematic_hardening;
    let f = (s - back).norm() - yield_radius(p, ebar);
    // d s / d e = 2G (1 - 2G dzeta / |X_tr|) P_dev + (4G^2 dzeta / |X_tr| - 4G^2 / c) N N
    let theta = 1.0 - 2.0 * g * dzeta / norm;
    let nn = n * n.transpose();
    let tangent = tensor::identity() * tensor::identity().transpose() * bulk
        + tensor::dev_projector() * (2.0 * g * theta)
        + nn * (4.0 * g * g * (dzeta / norm - 1.0 / c));
    Ok(PointUpdate {
        stress: volumetric + s,
        tangent,
        internal: InternalVariables::Mises {
            plastic_strain: ep,
            accumulated: ebar,
            back_stress: back,
        },
        info: UpdateInfo {
            delta_zeta: dzeta,
            yield_function: f,
            iterations: 1,
            ..UpdateInfo::default()
        },
    })
}

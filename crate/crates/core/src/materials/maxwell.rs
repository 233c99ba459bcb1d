//! Generalized Maxwell viscoelasticity in deviatoric strain.
//!
//! Each branch carries `h^(m)`, the strain seen through its relaxation
//! kernel. Assuming the strain varies linearly within a step, the exact
//! recursion is
//! `h_{n+1} = exp(-dt / l) h_n + (l / dt) (1 - exp(-dt / l)) (e_{n+1} - e_n)`.

use super::tensor::{self, Mandel};
use super::{InternalVariables, MaterialError, MaxwellParams, PointUpdate, StepContext, UpdateInfo};

/// Relaxation modulus `G(t) = G (mu_0 + sum_m mu_m exp(-t / lambda_m))`.
pub fn relaxation_modulus(params: &MaxwellParams, t: f64) -> f64 {
    let g = params.young / (2.0 * (1.0 + params.poisson));
    g * (params.mu0
        + params
            .terms
            .iter()
            .map(|term| term.weight * (-t / term.relaxation_time).exp())
            .sum::<f64>())
}

impl MaxwellParams {
    pub fn relaxation_modulus(&self, t: f64) -> f64 {
        relaxation_modulus(self, t)
    }

    pub fn bulk_modulus(&self) -> f64 {
        self.young / (3.0 * (1.0 - 2.0 * self.poisson))
    }

    /// Effective shear modulus of a single step of length `dt` starting from
    /// a virgin state.
    pub fn step_shear_modulus(&self, dt: f64) -> f64 {
        let g = self.young / (2.0 * (1.0 + self.poisson));
        g * (self.mu0
            + self
                .terms
                .iter()
                .map(|term| term.weight * step_factors(dt, term.relaxation_time).1)
                .sum::<f64>())
    }
}

/// `(exp(-dt / l), (l / dt) (1 - exp(-dt / l)))`, with the `dt -> 0` limit.
fn step_factors(dt: f64, lambda: f64) -> (f64, f64) {
    if dt <= 0.0 {
        return (1.0, 1.0);
    }
    let x = dt / lambda;
    let decay = (-x).exp();
    let gain = if x.is_infinite() { 0.0 } else { -(-x).exp_m1() / x };
    (decay, gain)
}

pub(super) fn update(
    p: &MaxwellParams,
    ctx: &StepContext,
    internal: &InternalVariables,
    eps_n: &Mandel,
    eps: &Mandel,
) -> Result<PointUpdate, MaterialError> {
    let InternalVariables::Maxwell { partial_strains } = internal else {
        return Err(MaterialError::StateMismatch("maxwell"));
    };
    if partial_strains.len() != p.terms.len() {
        return Err(MaterialError::StateMismatch("maxwell"));
    }
    let bulk = p.bulk_modulus();
    let g = p.young / (2.0 * (1.0 + p.poisson));
    let e = tensor::deviator(eps);
    let de = e - tensor::deviator(eps_n);
    let mut dev_stress = e * p.mu0;
    let mut modulus = p.mu0;
    let mut next = Vec::with_capacity(p.terms.len());
    for (term, h_n) in p.terms.iter().zip(partial_strains) {
        let (decay, gain) = step_factors(ctx.dt, term.relaxation_time);
        let h = h_n * decay + de * gain;
        dev_stress += h * term.weight;
        modulus += term.weight * gain;
        next.push(h);
    }
    let stress = tensor::identity() * (bulk * tensor::trace(eps)) + dev_stress * (2.0 * g);
    Ok(PointUpdate {
        stress,
        tangent: tensor::isotropic_stiffness(bulk, g * modulus),
        internal: InternalVariables::Maxwell { partial_strains: next },
        info: UpdateInfo::default(),
    })
}

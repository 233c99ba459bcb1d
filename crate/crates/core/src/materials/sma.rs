//! Shape-memory alloy with a traceless, saturated transformation strain.
//!
//! Free energy `K/2 tr(eps_e)^2 + G |dev eps_e|^2 + b |e_tr| + h/2 |e_tr|^2`
//! subject to `|e_tr| <= eps_L`, with `b = beta <T - M_f>`. The relative
//! stress is `X = s - alpha`, `alpha = b e_tr / |e_tr| + h e_tr + gamma e_tr`,
//! the transformation function `f = |X| - sqrt(2/3) sigma_y0` and the flow
//! `de_tr = dzeta X / |X|`.
//!
//! The backward-Euler step is solved by enumerating the active set:
//! 1. elastic step (`e_tr` frozen, saturation reaction chosen optimally);
//! 2. complete reverse transformation to `e_tr = 0`;
//! 3. transformation without saturation (Newton in `(e_tr, dzeta)`);
//! 4. saturated transformation (Newton in `(e_tr, dzeta, gamma)`).
//!
//! All deviators are handled through their coordinates in an orthonormal
//! deviatoric basis. `|e_tr|` is regularized as `sqrt(|e_tr|^2 + delta^2)`
//! with `delta = 1e-8 eps_L` inside the back stress; the origin itself is
//! treated exactly by cases 1 and 2.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::tensor::{self, Mandel, Mandel4};
use super::{InternalVariables, MaterialError, PointUpdate, SmaParams, StepContext, UpdateInfo};

const MAX_ITER: usize = 50;

struct Setup {
    g: f64,
    h: f64,
    b: f64,
    radius: f64,
    eps_l: f64,
    delta: f64,
    /// Deviatoric strain coordinates.
    e: Vector3<f64>,
    /// Committed transformation strain coordinates.
    u_n: Vector3<f64>,
}

/// Converged local solution.
struct Solution {
    u: Vector3<f64>,
    dzeta: f64,
    gamma: f64,
    /// `d u / d e` (zero when `u` is frozen).
    du_de: Matrix3<f64>,
    iterations: usize,
}

impl Setup {
    fn reg_norm(&self, u: &Vector3<f64>) -> f64 {
        (u.norm_squared() + self.delta * self.delta).sqrt()
    }

    fn relative_stress(&self, u: &Vector3<f64>, gamma: f64) -> Vector3<f64> {
        self.e * (2.0 * self.g) - u * (2.0 * self.g + self.h + gamma) - u * (self.b / self.reg_norm(u))
    }

    fn back_stress(&self, u: &Vector3<f64>, gamma: f64) -> Vector3<f64> {
        if u.norm() == 0.0 {
            return Vector3::zeros();
        }
        u * (self.b / self.reg_norm(u) + self.h + gamma)
    }

    /// Residual and Jacobian for `y = (u, dzeta[, gamma])`.
    fn system(&self, y: &DVector<f64>, saturated: bool) -> (DVector<f64>, DMatrix<f64>, DMatrix<f64>) {
        let n_unknowns = if saturated { 5 } else { 4 };
        let u = Vector3::new(y[0], y[1], y[2]);
        let dzeta = y[3];
        let gamma = if saturated { y[4] } else { 0.0 };
        let x = self.relative_stress(&u, gamma);
        let x_norm = x.norm().max(f64::MIN_POSITIVE);
        let n = x / x_norm;
        let un = self.reg_norm(&u);
        let x_u = Matrix3::identity() * -(2.0 * self.g + self.h + gamma + self.b / un)
            + u * u.transpose() * (self.b / (un * un * un));
        let proj = (Matrix3::identity() - n * n.transpose()) / x_norm;
        let two_g = 2.0 * self.g;

        let mut f = DVector::zeros(n_unknowns);
        let mut jac = DMatrix::zeros(n_unknowns, n_unknowns);
        let mut f_e = DMatrix::zeros(n_unknowns, 3);
        let r1 = u - self.u_n - n * dzeta;
        for i in 0..3 {
            f[i] = r1[i];
        }
        f[3] = (x_norm - self.radius) / two_g;
        let j11 = Matrix3::identity() - proj * x_u * dzeta;
        let j21 = n.transpose() * x_u / two_g;
        for i in 0..3 {
            for j in 0..3 {
                jac[(i, j)] = j11[(i, j)];
            }
            jac[(i, 3)] = -n[i];
            jac[(3, i)] = j21[i];
        }
        let fe1 = proj * (-dzeta * two_g);
        for i in 0..3 {
            for j in 0..3 {
                f_e[(i, j)] = fe1[(i, j)];
            }
            f_e[(3, i)] = n[i];
        }
        if saturated {
            let norm_u = u.norm().max(f64::MIN_POSITIVE);
            f[4] = (norm_u - self.eps_l) / self.eps_l;
            let j13 = proj * u * dzeta;
            for i in 0..3 {
                jac[(i, 4)] = j13[i];
                jac[(4, i)] = u[i] / (norm_u * self.eps_l);
            }
            jac[(3, 4)] = -n.dot(&u) / two_g;
        }
        (f, jac, f_e)
    }

    /// Damped Newton from `y0`; returns the solution if the residual vanishes.
    fn newton(&self, y0: DVector<f64>, saturated: bool) -> Option<(DVector<f64>, DMatrix<f64>, DMatrix<f64>, usize)> {
        let tol = 1e-12 * self.eps_l;
        let mut y = y0;
        let (mut f, mut jac, mut f_e) = self.system(&y, saturated);
        let mut norm = f.amax();
        for it in 0..=MAX_ITER {
            if norm <= tol {
                return Some((y, jac, f_e, it));
            }
            if it == MAX_ITER {
                break;
            }
            let step = jac.clone().lu().solve(&f)?;
            let mut t = 1.0;
            loop {
                let trial = &y - &step * t;
                let (ft, jt, fet) = self.system(&trial, saturated);
                let nt = ft.amax();
                if nt < norm || t < 1e-6 {
                    y = trial;
                    f = ft;
                    jac = jt;
                    f_e = fet;
                    norm = nt;
                    break;
                }
                t *= 0.5;
            }
            if !norm.is_finite() {
                return None;
            }
        }
        None
    }

    fn finish(&self, y: &DVector<f64>, jac: &DMatrix<f64>, f_e: &DMatrix<f64>, iterations: usize, saturated: bool) -> Option<Solution> {
        let sens = jac.clone().lu().solve(f_e)?;
        let du_de = Matrix3::from_fn(|i, j| -sens[(i, j)]);
        let mut u = Vector3::new(y[0], y[1], y[2]);
        if saturated {
            // remove the residual constraint violation left by the tolerance
            u *= self.eps_l / u.norm();
        }
        Some(Solution {
            u,
            dzeta: y[3],
            gamma: if saturated { y[4] } else { 0.0 },
            du_de,
            iterations,
        })
    }

    fn frozen(u: Vector3<f64>, dzeta: f64, gamma: f64) -> Solution {
        Solution {
            u,
            dzeta,
            gamma,
            du_de: Matrix3::zeros(),
            iterations: 0,
        }
    }

    fn solve(&self) -> Result<Solution, MaterialError> {
        let two_g = 2.0 * self.g;
        let tol = 1e-12 * self.eps_l;
        // trial states within round-off of the surface are treated as elastic
        let elastic_limit = self.radius * (1.0 + 1e-10);
        let un_norm = self.u_n.norm();
        let zero_state = un_norm <= self.delta;
        let s_trial = (self.e - self.u_n) * two_g;

        // 1. elastic step
        if zero_state {
            if s_trial.norm() <= elastic_limit + self.b {
                return Ok(Self::frozen(Vector3::zeros(), 0.0, 0.0));
            }
        } else {
            let x0 = s_trial - self.u_n * (self.b / self.reg_norm(&self.u_n) + self.h);
            let saturated = un_norm >= self.eps_l * (1.0 - 1e-9);
            let gamma = if saturated {
                (x0.dot(&self.u_n) / self.u_n.norm_squared()).max(0.0)
            } else {
                0.0
            };
            if (x0 - self.u_n * gamma).norm() <= elastic_limit {
                return Ok(Self::frozen(self.u_n, 0.0, gamma));
            }
            // 2. complete reverse transformation
            let s0 = self.e * two_g;
            if (s0 + self.u_n * (self.radius / un_norm)).norm() <= self.b {
                return Ok(Self::frozen(Vector3::zeros(), un_norm, 0.0));
            }
        }

        // 3. unsaturated transformation, from a few starting points
        let s0 = self.e * two_g;
        let from_zero = {
            let a = ((s0.norm() - self.radius - self.b) / (two_g + self.h)).max(1e3 * self.delta);
            s0.normalize() * a
        };
        let mut starts: Vec<Vector3<f64>> = vec![from_zero];
        if !zero_state {
            let x0 = s_trial - self.u_n * (self.b / self.reg_norm(&self.u_n) + self.h);
            let dz = ((x0.norm() - self.radius) / (two_g + self.h)).max(0.0);
            starts.insert(0, self.u_n + x0.normalize() * dz);
        }
        if s0.norm() > 0.0 {
            starts.extend([0.5, 0.95].map(|f| s0.normalize() * (f * self.eps_l)));
        }
        let mut attempts = 0;
        for u0 in &starts {
            let y0 = DVector::from_vec(vec![u0[0], u0[1], u0[2], (u0 - self.u_n).norm()]);
            attempts += 1;
            if let Some((y, jac, f_e, it)) = self.newton(y0, false) {
                let u = Vector3::new(y[0], y[1], y[2]);
                // a negative multiplier is a spurious root: try the next start
                if y[3] < -tol {
                    continue;
                }
                if u.norm() <= self.eps_l * (1.0 + 1e-12) {
                    if let Some(sol) = self.finish(&y, &jac, &f_e, it, false) {
                        return Ok(sol);
                    }
                }
                break;
            }
        }

        // 4. saturated transformation
        for u0 in &starts {
            let u = u0.normalize() * self.eps_l;
            let along = s0.dot(&u.normalize());
            let gamma0 = ((along - self.radius) / self.eps_l - two_g - self.h - self.b / self.eps_l).max(0.0);
            let y0 = DVector::from_vec(vec![u[0], u[1], u[2], (u - self.u_n).norm(), gamma0]);
            attempts += 1;
            if let Some((y, jac, f_e, it)) = self.newton(y0, true) {
                if y[3] >= -tol && y[4] >= -1e-10 * self.g {
                    if let Some(sol) = self.finish(&y, &jac, &f_e, it, true) {
                        return Ok(sol);
                    }
                }
            }
        }
        Err(MaterialError::ReturnMap {
            model: "sma",
            iterations: attempts * MAX_ITER,
            residual: f64::NAN,
        })
    }
}

pub(super) fn update(
    p: &SmaParams,
    ctx: &StepContext,
    internal: &InternalVariables,
    eps: &Mandel,
) -> Result<PointUpdate, MaterialError> {
    let InternalVariables::Sma {
        transformation_strain, ..
    } = internal
    else {
        return Err(MaterialError::StateMismatch("sma"));
    };
    let bulk = p.young / (3.0 * (1.0 - 2.0 * p.poisson));
    let g = p.young / (2.0 * (1.0 + p.poisson));
    let setup = Setup {
        g,
        h: p.h,
        b: p.beta * (ctx.temperature - p.m_f).max(0.0),
        radius: (2.0f64 / 3.0).sqrt() * p.yield_stress,
        eps_l: p.eps_l,
        delta: 1e-8 * p.eps_l,
        e: tensor::to_dev_coords(eps),
        u_n: tensor::to_dev_coords(transformation_strain),
    };
    let sol = setup.solve()?;
    let s = (setup.e - sol.u) * (2.0 * g);
    let back = if sol.u.norm() == 0.0 && sol.dzeta > 0.0 {
        // completed reverse transformation: the flow -u_n / |u_n| requires
        // X = -radius u_n / |u_n|; admissibility |alpha| <= b was checked
        s + setup.u_n * (setup.radius / setup.u_n.norm())
    } else if sol.u.norm() == 0.0 {
        // zero state: the admissible back stress closest to s
        let limit = setup.b / s.norm().max(f64::MIN_POSITIVE);
        s * limit.min(1.0)
    } else {
        setup.back_stress(&sol.u, sol.gamma)
    };
    let yield_function = (s - back).norm() - setup.radius;
    let basis = tensor::deviatoric_basis();
    let c_dev = (Matrix3::identity() - sol.du_de) * (2.0 * g);
    let tangent: Mandel4 = tensor::identity() * tensor::identity().transpose() * bulk + basis.transpose() * c_dev * basis;
    Ok(PointUpdate {
        stress: tensor::identity() * (bulk * tensor::trace(eps)) + tensor::from_dev_coords(&s),
        tangent,
        internal: InternalVariables::Sma {
            transformation_strain: tensor::from_dev_coords(&sol.u),
            back_stress: tensor::from_dev_coords(&back),
        },
        info: UpdateInfo {
            delta_zeta: sol.dzeta,
            // multiplier of c = |e_tr|^2 / eps_L^2 - 1 (alpha contains gamma dc/de_tr)
            gamma: sol.gamma * p.eps_l * p.eps_l / 2.0,
            yield_function,
            saturation: sol.u.norm_squared() / (p.eps_l * p.eps_l) - 1.0,
            iterations: sol.iterations,
            regime_iterations: 0,
        },
    })
}

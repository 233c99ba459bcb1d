//! Symmetric tensors restricted to states with vanishing out-of-plane shear,
//! stored in Mandel form `(xx, yy, zz, sqrt(2) xy)`. Euclidean products of
//! Mandel vectors are tensor contractions.

use nalgebra::{Matrix3, Matrix3x4, Matrix4, Vector3, Vector4};
use std::f64::consts::SQRT_2;

pub type Mandel = Vector4<f64>;
pub type Mandel4 = Matrix4<f64>;

pub fn identity() -> Mandel {
    Vector4::new(1.0, 1.0, 1.0, 0.0)
}

pub fn trace(v: &Mandel) -> f64 {
    v[0] + v[1] + v[2]
}

pub fn deviator(v: &Mandel) -> Mandel {
    v - identity() * (trace(v) / 3.0)
}

/// Deviatoric projector.
pub fn dev_projector() -> Mandel4 {
    Mandel4::identity() - identity() * identity().transpose() / 3.0
}

/// Isotropic elastic stiffness `K I (x) I + 2 G P_dev`.
pub fn isotropic_stiffness(bulk: f64, shear: f64) -> Mandel4 {
    identity() * identity().transpose() * bulk + dev_projector() * (2.0 * shear)
}

/// Orthonormal basis of the deviators (columns).
pub fn deviatoric_basis() -> Matrix3x4<f64> {
    let a = 1.0 / SQRT_2;
    let b = 1.0 / 6f64.sqrt();
    Matrix3x4::new(a, -a, 0.0, 0.0, b, b, -2.0 * b, 0.0, 0.0, 0.0, 0.0, 1.0)
}

/// Coordinates of the deviatoric part of `v` in [`deviatoric_basis`].
pub fn to_dev_coords(v: &Mandel) -> Vector3<f64> {
    deviatoric_basis() * v
}

pub fn from_dev_coords(c: &Vector3<f64>) -> Mandel {
    deviatoric_basis().transpose() * c
}

/// Voigt strain (engineering shear) plus `eps_zz` to Mandel.
pub fn strain_to_mandel(voigt: &Vector3<f64>, zz: f64) -> Mandel {
    Vector4::new(voigt[0], voigt[1], zz, voigt[2] / SQRT_2)
}

/// Mandel stress to Voigt stress and `sigma_zz`.
pub fn stress_to_voigt(m: &Mandel) -> (Vector3<f64>, f64) {
    (Vector3::new(m[0], m[1], m[3] / SQRT_2), m[2])
}

const IN_PLANE: [usize; 3] = [0, 1, 3];

/// In-plane Voigt tangent from a Mandel tangent, with `eps_zz` either held
/// fixed (`condense = false`) or eliminated through `d sigma_zz = 0`.
pub fn voigt_tangent(c: &Mandel4, condense: bool) -> Matrix3<f64> {
    let t = [1.0, 1.0, 1.0 / SQRT_2];
    let czz = c[(2, 2)];
    Matrix3::from_fn(|i, j| {
        let (a, b) = (IN_PLANE[i], IN_PLANE[j]);
        let mut v = c[(a, b)];
        if condense {
            v -= c[(a, 2)] * c[(2, b)] / czz;
        }
        t[i] * v * t[j]
    })
}

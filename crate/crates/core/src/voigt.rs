//! Symmetric 2x2 tensors in Voigt form.
//!
//! Strains store the engineering shear `gamma_xy = 2 eps_xy`; stresses store
//! `sigma_xy`. With that convention the plain dot product of a stress and a
//! strain vector equals the tensor contraction `sigma : eps`.

use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VoigtTensor {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl VoigtTensor {
    pub const fn new(xx: f64, yy: f64, xy: f64) -> Self {
        Self { xx, yy, xy }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.xx, self.yy, self.xy)
    }

    /// Tensor form of a strain vector (halves the shear entry).
    pub fn strain_tensor(self) -> Matrix2<f64> {
        Matrix2::new(self.xx, 0.5 * self.xy, 0.5 * self.xy, self.yy)
    }

    /// Tensor form of a stress vector.
    pub fn stress_tensor(self) -> Matrix2<f64> {
        Matrix2::new(self.xx, self.xy, self.xy, self.yy)
    }

    pub fn from_strain_tensor(t: &Matrix2<f64>) -> Self {
        Self::new(t[(0, 0)], t[(1, 1)], t[(0, 1)] + t[(1, 0)])
    }

    pub fn from_stress_tensor(t: &Matrix2<f64>) -> Self {
        Self::new(t[(0, 0)], t[(1, 1)], 0.5 * (t[(0, 1)] + t[(1, 0)]))
    }

    /// `self` as stress contracted with `strain`.
    pub fn dot(self, strain: VoigtTensor) -> f64 {
        self.xx * strain.xx + self.yy * strain.yy + self.xy * strain.xy
    }

    pub fn trace(self) -> f64 {
        self.xx + self.yy
    }
}

impl From<Vector3<f64>> for VoigtTensor {
    fn from(v: Vector3<f64>) -> Self {
        Self::from_vector(&v)
    }
}

impl From<VoigtTensor> for Vector3<f64> {
    fn from(v: VoigtTensor) -> Self {
        v.to_vector()
    }
}

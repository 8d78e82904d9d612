use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point or vector of C² = R⁴, stored as `(Re z1, Im z1, Re z2, Im z2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Vec4([a, b, c, d])
    }

    pub fn dot(&self, other: &Vec4) -> f64 {
        let [a, b, c, d] = self.0;
        let [p, q, r, s] = other.0;
        // paired by complex coordinate so that ⟨JX, Y⟩ = -⟨X, JY⟩ holds bit for bit
        (a * p + b * q) + (c * r + d * s)
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Multiplication by `i` on each complex coordinate: `J(a, b, c, d) = (-b, a, -d, c)`.
    pub fn j(&self) -> Vec4 {
        let [a, b, c, d] = self.0;
        Vec4([-b, a, -d, c])
    }

    /// Kähler form `ω(X, Y) = ⟨JX, Y⟩`.
    pub fn kahler(&self, other: &Vec4) -> f64 {
        self.j().dot(other)
    }

    pub fn scale(&self, s: f64) -> Vec4 {
        Vec4(self.0.map(|a| a * s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, rhs: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, rhs: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        self.scale(-1.0)
    }
}

impl Mul<Vec4> for f64 {
    type Output = Vec4;
    fn mul(self, rhs: Vec4) -> Vec4 {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vec4() -> impl Strategy<Value = Vec4> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(Vec4)
    }

    #[test]
    fn j_squares_to_minus_identity() {
        let x = Vec4::new(1.0, 2.0, -3.0, 0.5);
        assert_eq!(x.j().j(), -x);
        assert_eq!(
            Vec4::new(1.0, 0.0, 0.0, 0.0).j(),
            Vec4::new(0.0, 1.0, 0.0, 0.0)
        );
    }

    proptest! {
        #[test]
        fn kahler_form_is_antisymmetric(x in vec4(), y in vec4()) {
            prop_assert_eq!(x.j().dot(&y), -x.dot(&y.j()));
        }

        #[test]
        fn j_is_an_isometry(x in vec4(), y in vec4()) {
            prop_assert_eq!(x.j().dot(&y.j()), x.dot(&y));
        }
    }
}

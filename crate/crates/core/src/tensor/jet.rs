use std::ops::{Add, Mul, Neg, Sub};

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 4;

const LEN: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

const FACTORIAL: [f64; MAX_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[inline]
fn slot(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

/// Truncated bivariate Taylor expansion of a real function of `(u, v)` about a base point.
///
/// The coefficient at bidegree `(a, b)` is `∂ᵃᵤ∂ᵇᵥ f / (a! b!)`; products are truncated at
/// total degree `a + b <= order`. Arithmetic between jets of different order is a contract
/// violation and panics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    order: usize,
    coeffs: [f64; LEN],
}

impl Jet2 {
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut coeffs = [0.0; LEN];
        coeffs[0] = value;
        Self { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    /// The coordinate function `u` expanded about `u0`.
    pub fn var_u(u0: f64, order: usize) -> Self {
        let mut jet = Self::constant(u0, order);
        if order >= 1 {
            jet.coeffs[slot(1, 0)] = 1.0;
        }
        jet
    }

    /// The coordinate function `v` expanded about `v0`.
    pub fn var_v(v0: f64, order: usize) -> Self {
        let mut jet = Self::constant(v0, order);
        if order >= 1 {
            jet.coeffs[slot(0, 1)] = 1.0;
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient at bidegree `(a, b)`; zero beyond the truncation order.
    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        if a + b > self.order {
            0.0
        } else {
            self.coeffs[slot(a, b)]
        }
    }

    pub fn set_coeff(&mut self, a: usize, b: usize, value: f64) {
        assert!(
            a + b <= self.order,
            "bidegree ({a}, {b}) beyond order {}",
            self.order
        );
        self.coeffs[slot(a, b)] = value;
    }

    /// The partial derivative `∂ᵃᵤ∂ᵇᵥ f` at the base point.
    pub fn derivative(&self, a: usize, b: usize) -> f64 {
        self.coeff(a, b) * FACTORIAL[a] * FACTORIAL[b]
    }

    /// Jet of `∂f/∂u`, one order lower.
    pub fn partial_u(&self) -> Jet2 {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let mut out = Jet2::zero(self.order - 1);
        for d in 0..self.order {
            for b in 0..=d {
                let a = d - b;
                out.coeffs[slot(a, b)] = (a + 1) as f64 * self.coeffs[slot(a + 1, b)];
            }
        }
        out
    }

    /// Jet of `∂f/∂v`, one order lower.
    pub fn partial_v(&self) -> Jet2 {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let mut out = Jet2::zero(self.order - 1);
        for d in 0..self.order {
            for b in 0..=d {
                let a = d - b;
                out.coeffs[slot(a, b)] = (b + 1) as f64 * self.coeffs[slot(a, b + 1)];
            }
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Jet2 {
        assert!(order <= self.order);
        let mut out = Jet2::zero(order);
        let n = (order + 1) * (order + 2) / 2;
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        Jet2 {
            order: self.order,
            coeffs: self.coeffs.map(|c| c * s),
        }
    }

    /// Composes a univariate function with this jet.
    ///
    /// `taylor[j]` must hold `f⁽ʲ⁾(t0) / j!` where `t0` is the value of the jet, for every
    /// `j <= order`.
    pub fn compose(&self, taylor: &[f64]) -> Jet2 {
        assert!(
            taylor.len() > self.order,
            "need {} Taylor coefficients, got {}",
            self.order + 1,
            taylor.len()
        );
        let mut delta = *self;
        delta.coeffs[0] = 0.0;
        let mut out = Jet2::constant(taylor[self.order], self.order);
        for j in (0..self.order).rev() {
            out = out * delta;
            out.coeffs[0] += taylor[j];
        }
        out
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s / 2.0, -c / 6.0, s / 24.0])
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c / 2.0, s / 6.0, c / 24.0])
    }

    /// `e^{i t}` as a complex jet.
    pub fn exp_i(&self) -> CJet {
        CJet {
            re: self.cos(),
            im: self.sin(),
        }
    }

    fn check_order(&self, other: &Jet2) {
        assert_eq!(
            self.order, other.order,
            "jet order mismatch: {} vs {}",
            self.order, other.order
        );
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        self.check_order(&rhs);
        Jet2 {
            order: self.order,
            coeffs: std::array::from_fn(|i| self.coeffs[i] + rhs.coeffs[i]),
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self.check_order(&rhs);
        Jet2 {
            order: self.order,
            coeffs: std::array::from_fn(|i| self.coeffs[i] - rhs.coeffs[i]),
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.check_order(&rhs);
        let n = self.order;
        let mut out = Jet2::zero(n);
        for d1 in 0..=n {
            for b1 in 0..=d1 {
                let x = self.coeffs[slot(d1 - b1, b1)];
                if x == 0.0 {
                    continue;
                }
                for d2 in 0..=(n - d1) {
                    for b2 in 0..=d2 {
                        out.coeffs[slot(d1 - b1 + d2 - b2, b1 + b2)] +=
                            x * rhs.coeffs[slot(d2 - b2, b2)];
                    }
                }
            }
        }
        out
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

/// Complex-valued jet, used to assemble coordinates of C².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CJet {
    pub re: Jet2,
    pub im: Jet2,
}

impl CJet {
    pub fn from_real(re: Jet2) -> Self {
        CJet {
            im: Jet2::zero(re.order()),
            re,
        }
    }

    pub fn scale(&self, s: f64) -> CJet {
        CJet {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    pub fn mul_real(&self, r: Jet2) -> CJet {
        CJet {
            re: self.re * r,
            im: self.im * r,
        }
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, rhs: CJet) -> CJet {
        CJet {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, rhs: CJet) -> CJet {
        CJet {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn product_of_affine_factors() {
        let one = Jet2::constant(1.0, 2);
        let u = Jet2::var_u(0.0, 2);
        let v = Jet2::var_v(0.0, 2);
        let p = (one + u) * (one + v);
        assert_eq!(p.coeff(0, 0), 1.0);
        assert_eq!(p.coeff(1, 0), 1.0);
        assert_eq!(p.coeff(0, 1), 1.0);
        assert_eq!(p.coeff(1, 1), 1.0);
        assert_eq!(p.coeff(2, 0), 0.0);
        assert_eq!(p.coeff(0, 2), 0.0);
    }

    #[test]
    fn multiplicative_identity() {
        let a = Jet2::var_u(0.3, 4).sin() * Jet2::var_v(1.2, 4).cos();
        assert_eq!(a * Jet2::constant(1.0, 4), a);
    }

    #[test]
    fn double_angle_matches_analytic_taylor() {
        // ½ sin(2u) = u - (2/3)u³ + ..., so the u-coefficients are 0, 1, 0, -2/3, 0.
        let u = Jet2::var_u(0.0, 4);
        let p = u.sin() * u.cos();
        let expected = [0.0, 1.0, 0.0, -2.0 / 3.0, 0.0];
        for (a, e) in expected.iter().enumerate() {
            assert_close(p.coeff(a, 0), *e, 1e-14);
        }
        let half_sin2 = (u.scale(2.0)).sin().scale(0.5);
        for a in 0..=4 {
            assert_close(p.coeff(a, 0), half_sin2.coeff(a, 0), 1e-14);
        }
    }

    #[test]
    fn sine_of_identity_jet() {
        let s = Jet2::var_u(0.0, 3).sin();
        assert_eq!(s.coeff(0, 0), 0.0);
        assert_eq!(s.coeff(1, 0), 1.0);
        assert_eq!(s.coeff(2, 0), 0.0);
        assert_close(s.coeff(3, 0), -1.0 / 6.0, 1e-16);
    }

    #[test]
    fn exp_i_at_zero_is_one() {
        let e = Jet2::constant(0.0, 4).exp_i();
        assert_eq!(e.re, Jet2::constant(1.0, 4));
        assert_eq!(e.im, Jet2::zero(4));
    }

    #[test]
    fn cosine_about_pi_over_three() {
        let c = Jet2::var_u(PI / 3.0, 2).cos();
        assert_close(c.coeff(0, 0), 0.5, 1e-15);
        assert_close(c.coeff(1, 0), -(3.0f64).sqrt() / 2.0, 1e-15);
        assert_close(c.coeff(2, 0), -0.25, 1e-15);
    }

    #[test]
    fn partials_shift_coefficients() {
        // f = u²v → f_u = 2uv, f_v = u²
        let u = Jet2::var_u(1.5, 4);
        let v = Jet2::var_v(-0.5, 4);
        let f = u * u * v;
        assert_close(f.partial_u().value(), 2.0 * 1.5 * -0.5, 1e-15);
        assert_close(f.partial_v().value(), 2.25, 1e-15);
        assert_close(f.partial_u().derivative(1, 1), 2.0, 1e-15);
        assert_eq!(f.partial_u().order(), 3);
    }

    #[test]
    #[should_panic(expected = "order mismatch")]
    fn mixed_orders_panic() {
        let _ = Jet2::var_u(0.0, 2) + Jet2::var_u(0.0, 3);
    }
}

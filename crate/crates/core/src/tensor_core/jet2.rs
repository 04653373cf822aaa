//! Second-order forward jets with a dense Hessian.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::jet::Scalar;
use crate::error::TensorError;

/// Value, gradient and (symmetric, row-major) Hessian of a scalar with
/// respect to `dim` active variables. `dim == 0` is a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2Scalar {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<f64>,
}

impl Jet2Scalar {
    pub fn constant(value: f64) -> Self {
        Self { value, gradient: Vec::new(), hessian: Vec::new() }
    }

    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut gradient = vec![0.0; dim];
        gradient[index] = 1.0;
        Self { value, gradient, hessian: vec![0.0; dim * dim] }
    }

    pub fn seed(point: &[f64]) -> Vec<Self> {
        (0..point.len()).map(|i| Self::variable(point[i], i, point.len())).collect()
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.gradient.get(i).copied().unwrap_or(0.0)
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        let d = self.dim();
        if d == 0 {
            0.0
        } else {
            self.hessian[i * d + j]
        }
    }

    /// Largest |H - H^T| entry.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.hess(i, j) - self.hess(j, i)).abs());
            }
        }
        worst
    }

    /// Expands a constant to `dim` variables so binary ops line up.
    fn widen(&self, dim: usize) -> (Vec<f64>, Vec<f64>) {
        if self.dim() == dim {
            (self.gradient.clone(), self.hessian.clone())
        } else {
            (vec![0.0; dim], vec![0.0; dim * dim])
        }
    }

    /// f(self) given f, f', f'' at the current value.
    fn lift(&self, f: f64, df: f64, d2f: f64) -> Self {
        let d = self.dim();
        let mut hessian = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                hessian[i * d + j] =
                    df * self.hessian[i * d + j] + d2f * self.gradient[i] * self.gradient[j];
            }
        }
        Self {
            value: f,
            gradient: self.gradient.iter().map(|g| df * g).collect(),
            hessian,
        }
    }

    fn binary(
        self,
        rhs: Self,
        value: f64,
        // (da, db) partials and (daa, dab, dbb) second partials of the op
        first: (f64, f64),
        second: (f64, f64, f64),
    ) -> Self {
        let d = self.dim().max(rhs.dim());
        let (ga, ha) = self.widen(d);
        let (gb, hb) = rhs.widen(d);
        let (fa, fb) = first;
        let (faa, fab, fbb) = second;
        let gradient = (0..d).map(|i| fa * ga[i] + fb * gb[i]).collect();
        let mut hessian = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                hessian[i * d + j] = fa * ha[i * d + j]
                    + fb * hb[i * d + j]
                    + faa * ga[i] * ga[j]
                    + fab * (ga[i] * gb[j] + gb[i] * ga[j])
                    + fbb * gb[i] * gb[j];
            }
        }
        Self { value, gradient, hessian }
    }
}

/// Second-order chain rule: `outer` holds the value and derivatives of a
/// function of `k` variables evaluated at the values of `inner`; each inner
/// jet depends on the same `m` variables.
pub fn jet2_compose(outer: &Jet2Scalar, inner: &[Jet2Scalar]) -> Result<Jet2Scalar, TensorError> {
    let k = outer.dim();
    if k != 0 && k != inner.len() {
        return Err(TensorError::DimensionMismatch { expected: k, found: inner.len() });
    }
    let m = inner.iter().map(Jet2Scalar::dim).max().unwrap_or(0);
    if inner.iter().any(|j| j.dim() != m && j.dim() != 0) {
        return Err(TensorError::DimensionMismatch { expected: m, found: 0 });
    }
    let widened: Vec<(Vec<f64>, Vec<f64>)> = inner.iter().map(|j| j.widen(m)).collect();
    let mut gradient = vec![0.0; m];
    let mut hessian = vec![0.0; m * m];
    for a in 0..k {
        let (ga, ha) = &widened[a];
        let fa = outer.grad(a);
        for i in 0..m {
            gradient[i] += fa * ga[i];
            for j in 0..m {
                hessian[i * m + j] += fa * ha[i * m + j];
            }
        }
        for b in 0..k {
            let fab = outer.hess(a, b);
            if fab == 0.0 {
                continue;
            }
            let gb = &widened[b].0;
            for i in 0..m {
                for j in 0..m {
                    hessian[i * m + j] += fab * ga[i] * gb[j];
                }
            }
        }
    }
    Ok(Jet2Scalar { value: outer.value, gradient, hessian })
}

impl Add for Jet2Scalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let v = self.value + rhs.value;
        self.binary(rhs, v, (1.0, 1.0), (0.0, 0.0, 0.0))
    }
}

impl Sub for Jet2Scalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let v = self.value - rhs.value;
        self.binary(rhs, v, (1.0, -1.0), (0.0, 0.0, 0.0))
    }
}

impl Mul for Jet2Scalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.value, rhs.value);
        self.binary(rhs, a * b, (b, a), (0.0, 1.0, 0.0))
    }
}

impl Div for Jet2Scalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (a, b) = (self.value, rhs.value);
        self.binary(
            rhs,
            a / b,
            (1.0 / b, -a / (b * b)),
            (0.0, -1.0 / (b * b), 2.0 * a / (b * b * b)),
        )
    }
}

impl Neg for Jet2Scalar {
    type Output = Self;
    fn neg(self) -> Self {
        self.lift(-self.value, -1.0, 0.0)
    }
}

impl Add<f64> for Jet2Scalar {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2Scalar {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2Scalar {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.lift(self.value * rhs, rhs, 0.0)
    }
}

impl Div<f64> for Jet2Scalar {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self.lift(self.value / rhs, 1.0 / rhs, 0.0)
    }
}

impl Scalar for Jet2Scalar {
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.lift(s, 0.5 / s, -0.25 / (s * s * s))
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.lift(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.lift(c, -s, -c)
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.lift(e, e, e)
    }
    fn ln(&self) -> Self {
        let x = self.value;
        self.lift(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn sinh(&self) -> Self {
        let x = self.value;
        self.lift(x.sinh(), x.cosh(), x.sinh())
    }
    fn cosh(&self) -> Self {
        let x = self.value;
        self.lift(x.cosh(), x.sinh(), x.cosh())
    }
    fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let d = 1.0 - t * t;
        self.lift(t, d, -2.0 * t * d)
    }
    fn atan(&self) -> Self {
        let x = self.value;
        let d = 1.0 / (1.0 + x * x);
        self.lift(x.atan(), d, -2.0 * x * d * d)
    }
    fn asinh(&self) -> Self {
        let x = self.value;
        let r = (1.0 + x * x).sqrt();
        self.lift(x.asinh(), 1.0 / r, -x / (r * r * r))
    }
    fn atanh(&self) -> Self {
        let x = self.value;
        let d = 1.0 / (1.0 - x * x);
        self.lift(x.atanh(), d, 2.0 * x * d * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_square_of_identity() {
        // outer f(x) = x^2 at x = 1, inner x(t) = t at t = 1
        let outer = Jet2Scalar { value: 1.0, gradient: vec![2.0], hessian: vec![2.0] };
        let inner = Jet2Scalar::variable(1.0, 0, 1);
        let c = jet2_compose(&outer, &[inner]).unwrap();
        assert_eq!((c.value, c.grad(0), c.hess(0, 0)), (1.0, 2.0, 2.0));
    }

    #[test]
    fn compose_constant_outer() {
        let outer = Jet2Scalar::constant(4.5);
        let inner = Jet2Scalar::variable(0.2, 0, 1);
        let c = jet2_compose(&outer, &[inner]).unwrap();
        assert_eq!((c.value, c.grad(0), c.hess(0, 0)), (4.5, 0.0, 0.0));
    }

    #[test]
    fn compose_sin_of_square_at_zero() {
        // d^2/dt^2 sin(t^2) at 0 = 2
        let outer = Jet2Scalar { value: 0.0, gradient: vec![1.0], hessian: vec![0.0] };
        let inner = Jet2Scalar { value: 0.0, gradient: vec![0.0], hessian: vec![2.0] };
        let c = jet2_compose(&outer, &[inner]).unwrap();
        assert_eq!((c.value, c.grad(0), c.hess(0, 0)), (0.0, 0.0, 2.0));
    }

    #[test]
    fn compose_rejects_mismatched_arity() {
        let outer = Jet2Scalar::variable(0.0, 0, 2);
        let inner = Jet2Scalar::variable(0.0, 0, 1);
        assert!(matches!(
            jet2_compose(&outer, &[inner]),
            Err(TensorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn arithmetic_hessian_of_rational_function() {
        // f(x, y) = x / y + x*y at (1, 2)
        let v = Jet2Scalar::seed(&[1.0, 2.0]);
        let f = v[0].clone() / v[1].clone() + v[0].clone() * v[1].clone();
        assert!((f.grad(0) - (0.5 + 2.0)).abs() < 1e-15);
        assert!((f.grad(1) - (-0.25 + 1.0)).abs() < 1e-15);
        assert!((f.hess(0, 1) - (-0.25 + 1.0)).abs() < 1e-15);
        assert!((f.hess(1, 1) - 0.25).abs() < 1e-15);
        assert!(f.asymmetry() == 0.0);
    }
}

//! Forward-mode scalars.
//!
//! Every geometric construction in the crate is written once, generically over
//! [`Scalar`]. Evaluating it with `f64` gives values; evaluating it with
//! [`Jet1`] (possibly nested, `Jet1<Jet1<f64>>`) gives exact first and second
//! derivatives of the whole construction with respect to the seeded inputs.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real-like scalar closed under the elementary operations used by the
/// catalog parameterizations and metrics.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    /// Innermost real value.
    fn value(&self) -> f64;

    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn tanh(&self) -> Self;
    fn atan(&self) -> Self;
    fn asinh(&self) -> Self;
    fn atanh(&self) -> Self;

    /// Absolute value; the derivative uses the sign of the value, so this is
    /// only differentiable away from zero.
    fn abs(&self) -> Self {
        if self.value() < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn recip(&self) -> Self {
        Self::cst(1.0) / self.clone()
    }

    fn powi(&self, k: i32) -> Self {
        if k < 0 {
            return self.powi(-k).recip();
        }
        let mut acc = Self::cst(1.0);
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn tanh(&self) -> Self {
        f64::tanh(*self)
    }
    fn atan(&self) -> Self {
        f64::atan(*self)
    }
    fn asinh(&self) -> Self {
        f64::asinh(*self)
    }
    fn atanh(&self) -> Self {
        f64::atanh(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
}

/// First-order jet: a value and its gradient with respect to a fixed set of
/// seeded variables. An empty gradient stands for a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1<T> {
    pub val: T,
    pub grad: Vec<T>,
}

impl<T: Scalar> Jet1<T> {
    pub fn constant(val: T) -> Self {
        Self { val, grad: Vec::new() }
    }

    /// The `index`-th of `count` independent variables, at `val`.
    pub fn variable(val: T, index: usize, count: usize) -> Self {
        let grad = (0..count)
            .map(|k| T::cst(if k == index { 1.0 } else { 0.0 }))
            .collect();
        Self { val, grad }
    }

    /// Seeds a whole point as independent variables.
    pub fn seed(point: &[T]) -> Vec<Self> {
        let count = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, v)| Self::variable(v.clone(), i, count))
            .collect()
    }

    /// Partial derivative along variable `k` (zero for constants).
    pub fn d(&self, k: usize) -> T {
        self.grad.get(k).cloned().unwrap_or_else(|| T::cst(0.0))
    }

    /// Applies a scalar function given its value and derivative at `self.val`.
    fn chain(&self, f: T, df: T) -> Self {
        Self {
            val: f,
            grad: self.grad.iter().map(|g| g.clone() * df.clone()).collect(),
        }
    }

    fn zip(a: &[T], b: &[T], op: impl Fn(T, T) -> T) -> Vec<T> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|k| {
                let x = a.get(k).cloned().unwrap_or_else(|| T::cst(0.0));
                let y = b.get(k).cloned().unwrap_or_else(|| T::cst(0.0));
                op(x, y)
            })
            .collect()
    }
}

impl<T: Scalar> Add for Jet1<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            val: self.val + rhs.val,
            grad: Self::zip(&self.grad, &rhs.grad, |a, b| a + b),
        }
    }
}

impl<T: Scalar> Sub for Jet1<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            val: self.val - rhs.val,
            grad: Self::zip(&self.grad, &rhs.grad, |a, b| a - b),
        }
    }
}

impl<T: Scalar> Mul for Jet1<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.val.clone(), rhs.val.clone());
        Self {
            val: self.val * rhs.val,
            grad: Self::zip(&self.grad, &rhs.grad, |da, db| {
                da * b.clone() + a.clone() * db
            }),
        }
    }
}

impl<T: Scalar> Div for Jet1<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.val.recip();
        let q = self.val.clone() * inv.clone();
        Self {
            grad: Self::zip(&self.grad, &rhs.grad, |da, db| {
                (da - q.clone() * db) * inv.clone()
            }),
            val: q,
        }
    }
}

impl<T: Scalar> Neg for Jet1<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            val: -self.val,
            grad: self.grad.into_iter().map(|g| -g).collect(),
        }
    }
}

impl<T: Scalar> Add<f64> for Jet1<T> {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        Self { val: self.val + rhs, grad: self.grad }
    }
}

impl<T: Scalar> Sub<f64> for Jet1<T> {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        Self { val: self.val - rhs, grad: self.grad }
    }
}

impl<T: Scalar> Mul<f64> for Jet1<T> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self {
            val: self.val * rhs,
            grad: self.grad.into_iter().map(|g| g * rhs).collect(),
        }
    }
}

impl<T: Scalar> Div<f64> for Jet1<T> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        Self {
            val: self.val / rhs,
            grad: self.grad.into_iter().map(|g| g / rhs).collect(),
        }
    }
}

impl<T: Scalar> Scalar for Jet1<T> {
    fn cst(v: f64) -> Self {
        Self::constant(T::cst(v))
    }
    fn value(&self) -> f64 {
        self.val.value()
    }
    fn sqrt(&self) -> Self {
        let s = self.val.sqrt();
        let ds = (s.clone() * 2.0).recip();
        self.chain(s, ds)
    }
    fn sin(&self) -> Self {
        self.chain(self.val.sin(), self.val.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.val.cos(), -self.val.sin())
    }
    fn exp(&self) -> Self {
        let e = self.val.exp();
        self.chain(e.clone(), e)
    }
    fn ln(&self) -> Self {
        self.chain(self.val.ln(), self.val.recip())
    }
    fn sinh(&self) -> Self {
        self.chain(self.val.sinh(), self.val.cosh())
    }
    fn cosh(&self) -> Self {
        self.chain(self.val.cosh(), self.val.sinh())
    }
    fn tanh(&self) -> Self {
        let t = self.val.tanh();
        let dt = -(t.sq()) + 1.0;
        self.chain(t, dt)
    }
    fn atan(&self) -> Self {
        let d = (self.val.sq() + 1.0).recip();
        self.chain(self.val.atan(), d)
    }
    fn asinh(&self) -> Self {
        let d = (self.val.sq() + 1.0).sqrt().recip();
        self.chain(self.val.asinh(), d)
    }
    fn atanh(&self) -> Self {
        let d = (-(self.val.sq()) + 1.0).recip();
        self.chain(self.val.atanh(), d)
    }
}

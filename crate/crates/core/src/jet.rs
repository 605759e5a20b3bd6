//! Forward-mode second-order jets in `n` variables.
//!
//! A [`Jet`] carries a value, its gradient and its (symmetric) Hessian; the
//! arithmetic propagates all three exactly via the product and chain rules.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    pub val: T,
    pub grad: Vec<T>,
    /// Row-major `n × n`.
    pub hess: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    pub fn constant(nvars: usize, val: T) -> Self {
        Self {
            val,
            grad: vec![T::zero(); nvars],
            hess: vec![T::zero(); nvars * nvars],
        }
    }

    /// The coordinate function `xᵢ` evaluated at `val`.
    pub fn variable(nvars: usize, i: usize, val: T) -> Self {
        let mut j = Self::constant(nvars, val);
        j.grad[i] = T::one();
        j
    }

    /// Seeds one jet per coordinate of `point`.
    pub fn seed(point: &[T]) -> Vec<Self> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Self::variable(n, i, v))
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    pub fn d(&self, i: usize) -> T {
        self.grad[i]
    }

    pub fn dd(&self, i: usize, j: usize) -> T {
        self.hess[i * self.nvars() + j]
    }

    /// Chain rule for a univariate `f` with known `(f(u), f′(u), f″(u))`.
    pub fn compose(&self, f: T, fp: T, fpp: T) -> Self {
        let n = self.nvars();
        let mut hess = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = fpp * self.grad[i] * self.grad[j] + fp * self.hess[i * n + j];
            }
        }
        Self {
            val: f,
            grad: self.grad.iter().map(|&g| fp * g).collect(),
            hess,
        }
    }

    pub fn exp(&self) -> Self {
        let e = self.val.exp();
        self.compose(e, e, e)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (self.val.sin(), self.val.cos());
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (self.val.sin(), self.val.cos());
        self.compose(c, -s, -c)
    }

    pub fn ln(&self) -> Self {
        let v = self.val;
        self.compose(v.ln(), T::one() / v, -T::one() / (v * v))
    }

    pub fn sqrt(&self) -> Self {
        let r = self.val.sqrt();
        self.compose(r, T::lit(0.5) / r, -T::lit(0.25) / (r * self.val))
    }

    pub fn recip(&self) -> Self {
        let v = self.val;
        self.compose(T::one() / v, -T::one() / (v * v), T::lit(2.0) / (v * v * v))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn powi(&self, k: i32) -> Self {
        let v = self.val;
        let kf = T::lit(k as f64);
        let f = v.powi(k);
        let fp = if k == 0 { T::zero() } else { kf * v.powi(k - 1) };
        let fpp = if k <= 1 {
            T::zero()
        } else {
            kf * (kf - T::one()) * v.powi(k - 2)
        };
        self.compose(f, fp, fpp)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            val: self.val * s,
            grad: self.grad.iter().map(|&g| g * s).collect(),
            hess: self.hess.iter().map(|&h| h * s).collect(),
        }
    }

    pub fn add_const(&self, c: T) -> Self {
        let mut j = self.clone();
        j.val += c;
        j
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.nvars(), other.nvars(), "jets over different variable sets");
        Self {
            val: f(self.val, other.val),
            grad: self.grad.iter().zip(&other.grad).map(|(&a, &b)| f(a, b)).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn product(&self, other: &Self) -> Self {
        let n = self.nvars();
        assert_eq!(n, other.nvars(), "jets over different variable sets");
        let (u, v) = (self.val, other.val);
        let grad = (0..n).map(|i| self.grad[i] * v + u * other.grad[i]).collect();
        let mut hess = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = self.hess[i * n + j] * v
                    + self.grad[i] * other.grad[j]
                    + self.grad[j] * other.grad[i]
                    + u * other.hess[i * n + j];
            }
        }
        Self { val: u * v, grad, hess }
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<T: Scalar> $trait<&Jet<T>> for &Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &Jet<T>) -> Jet<T> {
                let f: fn(&Jet<T>, &Jet<T>) -> Jet<T> = $body;
                f(self, rhs)
            }
        }
        impl<T: Scalar> $trait<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: Scalar> $trait<&Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &Jet<T>) -> Jet<T> {
                (&self).$method(rhs)
            }
        }
        impl<T: Scalar> $trait<Jet<T>> for &Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.zip(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.zip(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.product(b));
jet_binop!(Div, div, |a, b| a.product(&b.recip()));

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul<T> for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> Mul<T> for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> Add<T> for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        self.add_const(rhs)
    }
}

impl<T: Scalar> Add<T> for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        self.add_const(rhs)
    }
}

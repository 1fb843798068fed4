//! Scalar abstractions.
//!
//! [`Real`] is the floating point type the whole crate is generic over
//! (`f32` or `f64`). [`AdScalar`] is what expression trees are evaluated
//! over: a plain [`Complex`] value, or a [`Dual`] number whose components are
//! themselves `AdScalar`s. Nesting duals gives higher-order forward-mode
//! derivatives with respect to the real phase-space coordinates.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, One, Zero};

/// Floating point scalar: f32 or f64.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Absolute tolerance used by the internal consistency checks
    /// (1e-10 for f64, scaled up with the type's epsilon for f32).
    fn consistency_tol() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(1e3))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A number that expression trees can be evaluated over.
pub trait AdScalar:
    Copy + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    type Real: Real;

    /// Embeds a constant (all derivative parts zero).
    fn constant(c: Complex<Self::Real>) -> Self;

    /// The underlying value with every infinitesimal part dropped.
    fn primal(&self) -> Complex<Self::Real>;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    /// Component-wise complex conjugate. Derivatives are taken with respect to
    /// real coordinates, so conjugation commutes with differentiation.
    fn conj(self) -> Self;
    fn powi(self, k: i32) -> Self;

    fn from_real(x: Self::Real) -> Self {
        Self::constant(Complex::new(x, Self::Real::zero()))
    }

    fn zero() -> Self {
        Self::from_real(Self::Real::zero())
    }

    fn one() -> Self {
        Self::from_real(Self::Real::one())
    }

    fn i() -> Self {
        Self::constant(Complex::new(Self::Real::zero(), Self::Real::one()))
    }

    fn scale(self, k: Self::Real) -> Self {
        self * Self::from_real(k)
    }
}

impl<T: Real> AdScalar for Complex<T> {
    type Real = T;

    fn constant(c: Complex<T>) -> Self {
        c
    }

    fn primal(&self) -> Complex<T> {
        *self
    }

    fn sin(self) -> Self {
        Complex::sin(self)
    }

    fn cos(self) -> Self {
        Complex::cos(self)
    }

    fn exp(self) -> Self {
        Complex::exp(self)
    }

    fn ln(self) -> Self {
        Complex::ln(self)
    }

    fn conj(self) -> Self {
        Complex::conj(&self)
    }

    fn powi(self, k: i32) -> Self {
        Complex::powi(&self, k)
    }
}

/// First-order dual number `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: AdScalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Self { re, eps }
    }

    /// A variable seeded with derivative `1`.
    pub fn variable(re: S) -> Self {
        Self::new(re, S::one())
    }

    pub fn constant_of(re: S) -> Self {
        Self::new(re, S::zero())
    }
}

impl<S: AdScalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<S: AdScalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<S: AdScalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.re * rhs.re, self.re * rhs.eps + self.eps * rhs.re)
    }
}

impl<S: AdScalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let re = self.re / rhs.re;
        Self::new(re, (self.eps - re * rhs.eps) / rhs.re)
    }
}

impl<S: AdScalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<S: AdScalar> AdScalar for Dual<S> {
    type Real = S::Real;

    fn constant(c: Complex<S::Real>) -> Self {
        Self::constant_of(S::constant(c))
    }

    fn primal(&self) -> Complex<S::Real> {
        self.re.primal()
    }

    fn sin(self) -> Self {
        Self::new(self.re.sin(), self.eps * self.re.cos())
    }

    fn cos(self) -> Self {
        Self::new(self.re.cos(), -(self.eps * self.re.sin()))
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        Self::new(e, self.eps * e)
    }

    fn ln(self) -> Self {
        Self::new(self.re.ln(), self.eps / self.re)
    }

    fn conj(self) -> Self {
        Self::new(self.re.conj(), self.eps.conj())
    }

    fn powi(self, k: i32) -> Self {
        match k {
            0 => Self::one(),
            1 => self,
            _ => {
                let k_real = S::from_real(S::Real::from_i32(k).expect("integer exponent representable"));
                Self::new(self.re.powi(k), self.eps * k_real * self.re.powi(k - 1))
            }
        }
    }
}

//! Phase-space points in real `(q, p)` storage and their complex views
//! `zʲ = qʲ + i pʲ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{AdScalar, Real};

/// A point of ℂⁿ ≅ ℝ²ⁿ, stored as `[q₁..qₙ, p₁..pₙ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<T> {
    coords: Vec<T>,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(q: &[T], p: &[T]) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::Arity { expected: q.len(), got: p.len() });
        }
        if q.is_empty() {
            return Err(Error::Config("phase space dimension must be positive".into()));
        }
        let mut coords = Vec::with_capacity(2 * q.len());
        coords.extend_from_slice(q);
        coords.extend_from_slice(p);
        Self::from_coords(coords)
    }

    /// Builds a point from the flat `[q.., p..]` layout.
    pub fn from_coords(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "flat coordinate vector must have positive even length, got {}",
                coords.len()
            )));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn q(&self) -> &[T] {
        &self.coords[..self.dim()]
    }

    pub fn p(&self) -> &[T] {
        &self.coords[self.dim()..]
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// `zʲ` for 0-based `j`.
    pub fn z(&self, j: usize) -> Complex<T> {
        Complex::new(self.q()[j], self.p()[j])
    }

    pub fn norm(&self) -> T {
        self.coords.iter().fold(T::zero(), |acc, &c| acc + c * c).sqrt()
    }

    /// Coordinates lifted to an evaluation scalar.
    pub fn lift<S: AdScalar<Real = T>>(&self) -> Vec<S> {
        self.coords.iter().map(|&c| S::from_real(c)).collect()
    }
}

/// The complex view `zʲ = qʲ + i pʲ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexCoords<T> {
    pub z: Vec<Complex<T>>,
}

impl<T: Real> ComplexCoords<T> {
    pub fn new(z: Vec<Complex<T>>) -> Self {
        Self { z }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }
}

pub fn to_complex<T: Real>(pt: &PhasePoint<T>) -> ComplexCoords<T> {
    ComplexCoords::new((0..pt.dim()).map(|j| pt.z(j)).collect())
}

pub fn from_complex<T: Real>(zc: &ComplexCoords<T>) -> Result<PhasePoint<T>> {
    let q: Vec<T> = zc.z.iter().map(|z| z.re).collect();
    let p: Vec<T> = zc.z.iter().map(|z| z.im).collect();
    PhasePoint::new(&q, &p)
}

/// Wirtinger partials `(∂/∂z, ∂/∂z̄)` from the real partials `(∂/∂q, ∂/∂p)`.
pub fn wirtinger_from_real<S: AdScalar>(dq: S, dp: S) -> (S, S) {
    let half = <S::Real as Real>::lit(0.5);
    let i_dp = S::i() * dp;
    ((dq - i_dp).scale(half), (dq + i_dp).scale(half))
}

/// Inverse of [`wirtinger_from_real`]: `∂/∂q = ∂/∂z + ∂/∂z̄`, `∂/∂p = i(∂/∂z − ∂/∂z̄)`.
pub fn real_from_wirtinger<S: AdScalar>(dz: S, dzbar: S) -> (S, S) {
    (dz + dzbar, S::i() * (dz - dzbar))
}

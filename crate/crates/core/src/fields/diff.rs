//! Forward-mode differentiation of phase-space functions.
//!
//! Everything here is generic over the evaluation scalar `S`, so derivatives
//! of derived quantities (rates, brackets) are obtained by running the same
//! code one dual level up.

use crate::error::Result;
use crate::phasespace::wirtinger_from_real;
use crate::scalar::{AdScalar, Dual};

use super::expr::ScalarField;

/// A function on phase space evaluable over any AD scalar.
///
/// `x` always has the flat `[q₁..qₙ, p₁..pₙ]` layout.
pub trait PhaseFn {
    fn dim(&self) -> usize;
    fn eval_ad<S: AdScalar>(&self, x: &[S]) -> Result<S>;
}

impl PhaseFn for ScalarField {
    fn dim(&self) -> usize {
        ScalarField::dim(self)
    }

    fn eval_ad<S: AdScalar>(&self, x: &[S]) -> Result<S> {
        ScalarField::eval_ad(self, x)
    }
}

impl<F: PhaseFn + ?Sized> PhaseFn for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval_ad<S: AdScalar>(&self, x: &[S]) -> Result<S> {
        (**self).eval_ad(x)
    }
}

/// Value and the derivative along `dir` at `x`.
pub fn directional<S: AdScalar, F: PhaseFn + ?Sized>(f: &F, x: &[S], dir: &[S]) -> Result<(S, S)> {
    debug_assert_eq!(x.len(), dir.len());
    let seeded: Vec<Dual<S>> = x.iter().zip(dir).map(|(&a, &d)| Dual::new(a, d)).collect();
    let r = f.eval_ad(&seeded)?;
    Ok((r.re, r.eps))
}

/// Value and all `2n` real partials `[∂/∂q.., ∂/∂p..]`.
pub fn real_partials<S: AdScalar, F: PhaseFn + ?Sized>(f: &F, x: &[S]) -> Result<(S, Vec<S>)> {
    let mut seeded: Vec<Dual<S>> = x.iter().map(|&a| Dual::constant_of(a)).collect();
    let mut value = None;
    let mut partials = Vec::with_capacity(x.len());
    for a in 0..x.len() {
        seeded[a].eps = S::one();
        let r = f.eval_ad(&seeded)?;
        seeded[a].eps = S::zero();
        value.get_or_insert(r.re);
        partials.push(r.eps);
    }
    let value = match value {
        Some(v) => v,
        None => f.eval_ad(x)?,
    };
    Ok((value, partials))
}

/// Value plus Wirtinger partials `∂/∂zʲ`, `∂/∂z̄ʲ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    pub value: S,
    pub dz: Vec<S>,
    pub dzbar: Vec<S>,
}

impl<S: AdScalar> Jet<S> {
    pub fn dim(&self) -> usize {
        self.dz.len()
    }
}

pub fn jet<S: AdScalar, F: PhaseFn + ?Sized>(f: &F, x: &[S]) -> Result<Jet<S>> {
    let (value, partials) = real_partials(f, x)?;
    let n = partials.len() / 2;
    let (dz, dzbar) = (0..n).map(|j| wirtinger_from_real(partials[j], partials[n + j])).unzip();
    Ok(Jet { value, dz, dzbar })
}

/// Symmetric matrix of second real partials, row-major `2n × 2n`.
pub fn hessian<S: AdScalar, F: PhaseFn + ?Sized>(f: &F, x: &[S]) -> Result<Vec<S>> {
    let m = x.len();
    let mut h = vec![S::zero(); m * m];
    let mut seeded: Vec<Dual<Dual<S>>> = x.iter().map(|&a| Dual::constant_of(Dual::constant_of(a))).collect();
    for a in 0..m {
        for b in a..m {
            seeded[a].re.eps = S::one();
            seeded[b].eps.re = S::one();
            let r = f.eval_ad(&seeded)?;
            seeded[a].re.eps = S::zero();
            seeded[b].eps.re = S::zero();
            h[a * m + b] = r.eps.eps;
            h[b * m + a] = r.eps.eps;
        }
    }
    Ok(h)
}

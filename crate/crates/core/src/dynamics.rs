//! TGHS flow, S-dynamics, covariant rates and the acceleration-like second
//! covariant derivative.
//!
//! For a system `(H, s)` the thorough flow is `żʲ = −2i·DH/∂z̄ʲ` with
//! `DH/∂z̄ʲ = ∂H/∂z̄ʲ + H·∂s/∂z̄ʲ`, the S-dynamics is `w = {s,H}_PB`, and the
//! covariant time derivative of an observable is `Df/dt = df/dt + f·w`,
//! which equals the structural bracket `{f,H}`.

use num_complex::Complex;

use crate::brackets::{ensure_agree, gspb_of_jets, pb_of_jets, structural_jet, StructuredSystem};
use crate::error::{Error, Result};
use crate::fields::{check_arity, directional, jet, Jet, PhaseFn};
use crate::phasespace::PhasePoint;
use crate::scalar::{AdScalar, Real};

/// `(żʲ, dz̄ʲ/dt)` from the jets of `H` and `s`.
pub fn velocity_of_jets<S: AdScalar>(h: &Jet<S>, s: &Jet<S>) -> (Vec<S>, Vec<S>) {
    let two_i = S::i().scale(<S::Real as Real>::lit(2.0));
    let dh = structural_jet(h, s);
    let zdot = dh.dzbar.iter().map(|&d| -(two_i * d)).collect();
    let zbardot = dh.dz.iter().map(|&d| two_i * d).collect();
    (zdot, zbardot)
}

/// The TGHS vector field in real coordinates, `[q̇.., ṗ..]`.
pub fn real_velocity_ad<S: AdScalar>(sys: &StructuredSystem, x: &[S]) -> Result<Vec<S>> {
    let (h, s) = sys.jets(x)?;
    let (zdot, zbardot) = velocity_of_jets(&h, &s);
    let half = <S::Real as Real>::lit(0.5);
    let qdot = zdot.iter().zip(&zbardot).map(|(&a, &b)| (a + b).scale(half));
    let pdot = zdot.iter().zip(&zbardot).map(|(&a, &b)| -(S::i() * (a - b)).scale(half));
    Ok(qdot.chain(pdot).collect())
}

/// `Σⱼ (dz̄ʲ/dt · ∂f/∂z̄ʲ + dzʲ/dt · ∂f/∂zʲ)`.
fn chain_rule<S: AdScalar>(f: &Jet<S>, zdot: &[S], zbardot: &[S]) -> S {
    (0..f.dim()).fold(S::zero(), |acc, j| acc + zbardot[j] * f.dzbar[j] + zdot[j] * f.dz[j])
}

/// The S-dynamics `w = {s,H}_PB` as a phase-space function.
#[derive(Clone, Copy, Debug)]
pub struct SDynamics<'a>(pub &'a StructuredSystem);

impl PhaseFn for SDynamics<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval_ad<S: AdScalar>(&self, x: &[S]) -> Result<S> {
        let (h, s) = self.0.jets(x)?;
        Ok(pb_of_jets(&s, &h))
    }
}

/// Thorough rate `df/dt = {f,H}_PB − H{s,f}_PB` as a phase-space function.
#[derive(Clone, Copy, Debug)]
pub struct ThoroughRate<'a, F: ?Sized> {
    pub f: &'a F,
    pub sys: &'a StructuredSystem,
}

impl<F: PhaseFn + ?Sized> PhaseFn for ThoroughRate<'_, F> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn eval_ad<S: AdScalar>(&self, x: &[S]) -> Result<S> {
        let f = jet(self.f, x)?;
        let (h, s) = self.sys.jets(x)?;
        Ok(pb_of_jets(&f, &h) - h.value * pb_of_jets(&s, &f))
    }
}

/// Covariant rate `Df/dt = {f,H}` as a phase-space function.
#[derive(Clone, Copy, Debug)]
pub struct CovariantRateFn<'a, F: ?Sized> {
    pub f: &'a F,
    pub sys: &'a StructuredSystem,
}

impl<F: PhaseFn + ?Sized> PhaseFn for CovariantRateFn<'_, F> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn eval_ad<S: AdScalar>(&self, x: &[S]) -> Result<S> {
        let f = jet(self.f, x)?;
        let (h, s) = self.sys.jets(x)?;
        Ok(gspb_of_jets(&f, &h, &s))
    }
}

/// Coordinate rates of the TGHS.
#[derive(Clone, Debug, PartialEq)]
pub struct TghsVelocity<T> {
    /// `dzʲ/dt`
    pub dz: Vec<Complex<T>>,
    /// `dz̄ʲ/dt`
    pub dzbar: Vec<Complex<T>>,
}

/// Split of the covariant derivative `Df/dt = df/dt + f·w`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariantRate<T> {
    pub total: Complex<T>,
    pub thorough: Complex<T>,
    pub sdyn: T,
    pub value: Complex<T>,
}

/// Lifted point and the jets of `f`, `H` and `s` there.
type Setup<T> = (Vec<Complex<T>>, Jet<Complex<T>>, Jet<Complex<T>>, Jet<Complex<T>>);

fn setup<T: Real, F: PhaseFn + ?Sized>(f: &F, sys: &StructuredSystem, pt: &PhasePoint<T>) -> Result<Setup<T>> {
    check_arity(f, pt)?;
    check_arity(sys.hamiltonian(), pt)?;
    let x = pt.lift::<Complex<T>>();
    let fj = jet(f, &x)?;
    let (h, s) = sys.jets(&x)?;
    Ok((x, fj, h, s))
}

fn real_part<T: Real>(what: &str, v: Complex<T>) -> Result<T> {
    if v.im.abs() > T::consistency_tol() * v.norm().max(T::one()) {
        return Err(Error::NotReal { what: what.to_string(), imag: v.im.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(v.re)
}

pub fn tghs_velocity<T: Real>(sys: &StructuredSystem, pt: &PhasePoint<T>) -> Result<TghsVelocity<T>> {
    check_arity(sys.hamiltonian(), pt)?;
    let (h, s) = sys.jets(&pt.lift::<Complex<T>>())?;
    let (dz, dzbar) = velocity_of_jets(&h, &s);
    Ok(TghsVelocity { dz, dzbar })
}

/// `w = {s,H}_PB`, cross-checked against the structural-derivative form and
/// against `{1,H}`.
pub fn s_dynamics<T: Real>(sys: &StructuredSystem, pt: &PhasePoint<T>) -> Result<T> {
    check_arity(sys.hamiltonian(), pt)?;
    let (h, s) = sys.jets(&pt.lift::<Complex<T>>())?;
    let w = pb_of_jets(&s, &h);
    let dh = structural_jet(&h, &s);
    let two_i = Complex::new(T::zero(), T::lit(2.0));
    let structural_form = two_i
        * (0..h.dim())
            .fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + dh.dz[j] * s.dzbar[j] - dh.dzbar[j] * s.dz[j]);
    let one = Jet {
        value: Complex::new(T::one(), T::zero()),
        dz: vec![Complex::new(T::zero(), T::zero()); h.dim()],
        dzbar: vec![Complex::new(T::zero(), T::zero()); h.dim()],
    };
    let bracket_form = gspb_of_jets(&one, &h, &s);
    let scale = w.norm() + h.value.norm() * pb_of_jets(&s, &s).norm();
    ensure_agree("S-dynamics structural form", w, structural_form, scale)?;
    ensure_agree("S-dynamics {1,H}", w, bracket_form, scale)?;
    real_part("S-dynamics w", w)
}

/// Covariant rate of `f`: thorough part, S-dynamics and their sum, with the
/// sum checked against the chain rule through structural derivatives.
pub fn gchs_rate<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<CovariantRate<T>> {
    let (_, fj, h, s) = setup(f, sys, pt)?;
    let w = pb_of_jets(&s, &h);
    let thorough = pb_of_jets(&fj, &h) - h.value * pb_of_jets(&s, &fj);
    let total = thorough + fj.value * w;
    let (zdot, zbardot) = velocity_of_jets(&h, &s);
    let chain = chain_rule(&structural_jet(&fj, &s), &zdot, &zbardot);
    let scale = thorough.norm() + (fj.value * w).norm() + h.value.norm() * fj.value.norm();
    ensure_agree("covariant rate chain rule", total, chain, scale)?;
    Ok(CovariantRate { total, thorough, sdyn: real_part("S-dynamics w", w)?, value: fj.value })
}

/// Thorough time derivative `df/dt = {f,H}_PB − H{s,f}_PB`.
pub fn thorough_rate<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<Complex<T>> {
    let (_, fj, h, s) = setup(f, sys, pt)?;
    let bracket_form = pb_of_jets(&fj, &h) - h.value * pb_of_jets(&s, &fj);
    let (zdot, zbardot) = velocity_of_jets(&h, &s);
    let chain = chain_rule(&fj, &zdot, &zbardot);
    let scale = pb_of_jets(&fj, &h).norm() + h.value.norm() * pb_of_jets(&s, &fj).norm();
    ensure_agree("thorough rate chain rule", bracket_form, chain, scale)?;
    Ok(bracket_form)
}

/// `Σⱼ (dz̄ʲ/dt · Df/∂z̄ʲ + dzʲ/dt · Df/∂zʲ)` when `structural`, otherwise the
/// same sum with ordinary Wirtinger partials.
pub fn chain_rule_rate<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
    structural: bool,
) -> Result<Complex<T>> {
    let (_, fj, h, s) = setup(f, sys, pt)?;
    let (zdot, zbardot) = velocity_of_jets(&h, &s);
    let fj = if structural { structural_jet(&fj, &s) } else { fj };
    Ok(chain_rule(&fj, &zdot, &zbardot))
}

/// The two halves `Σ ż·Df/∂z` and `Σ dz̄/dt·Df/∂z̄` of the covariant chain rule.
pub fn chain_rule_halves<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let (_, fj, h, s) = setup(f, sys, pt)?;
    let (zdot, zbardot) = velocity_of_jets(&h, &s);
    let d = structural_jet(&fj, &s);
    let zero = Complex::new(T::zero(), T::zero());
    let a = (0..d.dim()).fold(zero, |acc, j| acc + zdot[j] * d.dz[j]);
    let b = (0..d.dim()).fold(zero, |acc, j| acc + zbardot[j] * d.dzbar[j]);
    Ok((a, b))
}

/// `β = dw/dt + w²`, with `dw/dt` taken along the TGHS flow by forward AD.
pub fn beta<T: Real>(sys: &StructuredSystem, pt: &PhasePoint<T>) -> Result<T> {
    check_arity(sys.hamiltonian(), pt)?;
    let x = pt.lift::<Complex<T>>();
    let v = real_velocity_ad(sys, &x)?;
    let (w, dw) = directional(&SDynamics(sys), &x, &v)?;
    real_part("beta", dw + w * w)
}

/// `(w, dw/dt)` along the TGHS.
pub fn s_dynamics_rate<T: Real>(sys: &StructuredSystem, pt: &PhasePoint<T>) -> Result<(T, T)> {
    check_arity(sys.hamiltonian(), pt)?;
    let x = pt.lift::<Complex<T>>();
    let v = real_velocity_ad(sys, &x)?;
    let (w, dw) = directional(&SDynamics(sys), &x, &v)?;
    Ok((real_part("s-dynamics", w)?, real_part("s-dynamics rate", dw)?))
}

/// `D²f/dt² = d²f/dt² + 2w·df/dt + f·β`.
pub fn covariant_acceleration<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<Complex<T>> {
    check_arity(f, pt)?;
    check_arity(sys.hamiltonian(), pt)?;
    let x = pt.lift::<Complex<T>>();
    let v = real_velocity_ad(sys, &x)?;
    let (df, d2f) = directional(&ThoroughRate { f, sys }, &x, &v)?;
    let (w, dw) = directional(&SDynamics(sys), &x, &v)?;
    let value = f.eval_ad(&x)?;
    let two = T::lit(2.0);
    Ok(d2f + df * w * two + value * (dw + w * w))
}

/// `{Df/dt, H}`: the covariant bracket applied twice, through nested AD.
pub fn covariant_acceleration_bracket<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<Complex<T>> {
    check_arity(f, pt)?;
    check_arity(sys.hamiltonian(), pt)?;
    let x = pt.lift::<Complex<T>>();
    let rate = jet(&CovariantRateFn { f, sys }, &x)?;
    let (h, s) = sys.jets(&x)?;
    Ok(gspb_of_jets(&rate, &h, &s))
}

/// `{f,H}` and the terms of the equilibrium balance
/// `{f,H}_PB = H{s,f}_PB − f·w`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumResidual<T> {
    /// `{f,H}`; zero certifies covariant equilibrium.
    pub residual: Complex<T>,
    /// `{f,H}_PB`
    pub classical: Complex<T>,
    /// `H{s,f}_PB`
    pub structural: Complex<T>,
    /// `−f·w`
    pub sdyn: Complex<T>,
}

pub fn equilibrium_residual<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<EquilibriumResidual<T>> {
    let (_, fj, h, s) = setup(f, sys, pt)?;
    let w = pb_of_jets(&s, &h);
    Ok(EquilibriumResidual {
        residual: gspb_of_jets(&fj, &h, &s),
        classical: pb_of_jets(&fj, &h),
        structural: h.value * pb_of_jets(&s, &fj),
        sdyn: -(fj.value * w),
    })
}

/// Closed-form solution `z₀·e^{−w₀t}` of `ż = −z·w₀`.
pub fn exponential_solution<T: Real>(z0: Complex<T>, w0: T, t: T) -> Complex<T> {
    z0 * (-w0 * t).exp()
}

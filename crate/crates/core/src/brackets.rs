//! Poisson brackets in real and complex coordinates, structural derivatives,
//! the geometric bracket and the generalized structural Poisson bracket.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fields::{self, check_arity, jet, real_partials, Jet, PhaseFn, ScalarField};
use crate::phasespace::PhasePoint;
use crate::scalar::{AdScalar, Real};

/// Dimension, Hamiltonian `H` and structural function `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredSystem {
    n: usize,
    hamiltonian: ScalarField,
    structural: ScalarField,
}

/// Deterministic probe points used for the realness check.
const REALNESS_PROBES: usize = 16;

impl StructuredSystem {
    /// Both fields must share dimension `n`, have no time slot, and evaluate
    /// to real numbers (checked at a fixed set of probe points).
    pub fn new(hamiltonian: ScalarField, structural: ScalarField) -> Result<Self> {
        let n = hamiltonian.dim();
        if structural.dim() != n {
            return Err(Error::Arity { expected: n, got: structural.dim() });
        }
        if hamiltonian.has_time() || structural.has_time() {
            return Err(Error::Config("H and s cannot depend on time".into()));
        }
        check_real("the Hamiltonian H", &hamiltonian)?;
        check_real("the structural function s", &structural)?;
        Ok(Self { n, hamiltonian, structural })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self) -> &ScalarField {
        &self.hamiltonian
    }

    pub fn structural(&self) -> &ScalarField {
        &self.structural
    }

    /// The same Hamiltonian with `s ≡ 0`.
    pub fn classical(&self) -> Self {
        Self { structural: ScalarField::constant(self.n, 0.0), ..self.clone() }
    }

    pub(crate) fn jets<S: AdScalar>(&self, x: &[S]) -> Result<(Jet<S>, Jet<S>)> {
        Ok((jet(&self.hamiltonian, x)?, jet(&self.structural, x)?))
    }
}

fn check_real(what: &str, f: &ScalarField) -> Result<()> {
    let n = f.dim();
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
    };
    for _ in 0..REALNESS_PROBES {
        let coords: Vec<f64> = (0..2 * n).map(|_| next()).collect();
        let pt = PhasePoint::from_coords(coords).expect("finite probe");
        let Ok(v) = fields::eval(f, &pt) else { continue };
        if v.im.abs() > 1e-12 * v.norm().max(1.0) {
            return Err(Error::NotReal { what: what.to_string(), imag: v.im });
        }
    }
    Ok(())
}

/// Raises [`Error::Inconsistent`] when two routes to the same quantity
/// disagree by more than the scalar type's consistency tolerance, relative to
/// `scale` (floored at 1).
pub(crate) fn ensure_agree<T: Real>(what: &'static str, a: Complex<T>, b: Complex<T>, scale: T) -> Result<()> {
    let dev = (a - b).norm();
    if dev.is_nan() || dev > T::consistency_tol() * scale.max(T::one()) {
        return Err(Error::Inconsistent { what, deviation: dev.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}

/// `2i Σⱼ (∂f/∂z̄ʲ ∂g/∂zʲ − ∂f/∂zʲ ∂g/∂z̄ʲ)` from precomputed jets.
pub fn pb_of_jets<S: AdScalar>(f: &Jet<S>, g: &Jet<S>) -> S {
    let two_i = S::i().scale(<S::Real as Real>::lit(2.0));
    let sum = (0..f.dim()).fold(S::zero(), |acc, j| acc + f.dzbar[j] * g.dz[j] - f.dz[j] * g.dzbar[j]);
    two_i * sum
}

/// Structural partials `Df/∂zʲ = ∂f/∂zʲ + f·∂s/∂zʲ` (and the z̄ analogue).
pub fn structural_jet<S: AdScalar>(f: &Jet<S>, s: &Jet<S>) -> Jet<S> {
    Jet {
        value: f.value,
        dz: f.dz.iter().zip(&s.dz).map(|(&a, &b)| a + f.value * b).collect(),
        dzbar: f.dzbar.iter().zip(&s.dzbar).map(|(&a, &b)| a + f.value * b).collect(),
    }
}

/// `f{s,g}_PB − g{s,f}_PB`.
pub fn geobracket_of_jets<S: AdScalar>(f: &Jet<S>, g: &Jet<S>, s: &Jet<S>) -> S {
    f.value * pb_of_jets(s, g) - g.value * pb_of_jets(s, f)
}

/// `{f,g}_PB + G(s,f,g)`.
pub fn gspb_of_jets<S: AdScalar>(f: &Jet<S>, g: &Jet<S>, s: &Jet<S>) -> S {
    pb_of_jets(f, g) + geobracket_of_jets(f, g, s)
}

/// The same bracket through structural derivatives:
/// `2i Σ (Df/∂z̄ Dg/∂z − Df/∂z Dg/∂z̄)`.
pub fn gspb_structural_form<S: AdScalar>(f: &Jet<S>, g: &Jet<S>, s: &Jet<S>) -> S {
    pb_of_jets(&structural_jet(f, s), &structural_jet(g, s))
}

/// GSPB over any AD scalar.
pub fn gspb_ad<S: AdScalar, F: PhaseFn + ?Sized, G: PhaseFn + ?Sized>(
    f: &F,
    g: &G,
    sys: &StructuredSystem,
    x: &[S],
) -> Result<S> {
    let fj = jet(f, x)?;
    let gj = jet(g, x)?;
    let sj = jet(sys.structural(), x)?;
    Ok(gspb_of_jets(&fj, &gj, &sj))
}

fn lift<T: Real>(pt: &PhasePoint<T>) -> Vec<Complex<T>> {
    pt.lift()
}

/// `Σⱼ (∂f/∂qʲ ∂g/∂pʲ − ∂f/∂pʲ ∂g/∂qʲ)`.
pub fn pb_real<T: Real, F: PhaseFn + ?Sized, G: PhaseFn + ?Sized>(
    f: &F,
    g: &G,
    pt: &PhasePoint<T>,
) -> Result<Complex<T>> {
    check_arity(f, pt)?;
    check_arity(g, pt)?;
    let x = lift(pt);
    let (_, df) = real_partials(f, &x)?;
    let (_, dg) = real_partials(g, &x)?;
    Ok(pb_real_of_partials(&df, &dg))
}

pub(crate) fn pb_real_of_partials<S: AdScalar>(df: &[S], dg: &[S]) -> S {
    let n = df.len() / 2;
    (0..n).fold(S::zero(), |acc, j| acc + df[j] * dg[n + j] - df[n + j] * dg[j])
}

/// Complex-coordinate Poisson bracket `{f,g}_PB`.
pub fn pb_complex<T: Real, F: PhaseFn + ?Sized, G: PhaseFn + ?Sized>(
    f: &F,
    g: &G,
    pt: &PhasePoint<T>,
) -> Result<Complex<T>> {
    check_arity(f, pt)?;
    check_arity(g, pt)?;
    let x = lift(pt);
    Ok(pb_of_jets(&jet(f, &x)?, &jet(g, &x)?))
}

/// Structural partials `(Df/∂zʲ, Df/∂z̄ʲ)` for every j.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuralGradient<T> {
    pub dz: Vec<Complex<T>>,
    pub dzbar: Vec<Complex<T>>,
}

pub fn structural_derivative<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<StructuralGradient<T>> {
    check_arity(f, pt)?;
    check_arity(sys.structural(), pt)?;
    let x = lift(pt);
    let d = structural_jet(&jet(f, &x)?, &jet(sys.structural(), &x)?);
    Ok(StructuralGradient { dz: d.dz, dzbar: d.dzbar })
}

pub fn geobracket<T: Real, F: PhaseFn + ?Sized, G: PhaseFn + ?Sized>(
    f: &F,
    g: &G,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<Complex<T>> {
    check_arity(f, pt)?;
    check_arity(g, pt)?;
    check_arity(sys.structural(), pt)?;
    let x = lift(pt);
    Ok(geobracket_of_jets(&jet(f, &x)?, &jet(g, &x)?, &jet(sys.structural(), &x)?))
}

/// Generalized structural Poisson bracket `{f,g} = {f,g}_PB + G(s,f,g)`.
///
/// The structural-derivative form is evaluated alongside and the two must
/// agree; a mismatch is reported as [`Error::Inconsistent`].
pub fn gspb<T: Real, F: PhaseFn + ?Sized, G: PhaseFn + ?Sized>(
    f: &F,
    g: &G,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<Complex<T>> {
    check_arity(f, pt)?;
    check_arity(g, pt)?;
    check_arity(sys.structural(), pt)?;
    let x = lift(pt);
    let (fj, gj, sj) = (jet(f, &x)?, jet(g, &x)?, jet(sys.structural(), &x)?);
    let pb = pb_of_jets(&fj, &gj);
    let geo = geobracket_of_jets(&fj, &gj, &sj);
    let direct = pb + geo;
    let via_structural = gspb_structural_form(&fj, &gj, &sj);
    let scale = pb.norm() + (fj.value * pb_of_jets(&sj, &gj)).norm() + (gj.value * pb_of_jets(&sj, &fj)).norm();
    ensure_agree("gspb structural-derivative form", direct, via_structural, scale)?;
    Ok(direct)
}

/// Brackets of `s` with the coordinates: `{s,zʲ}_PB` and `{s,z̄ʲ}_PB`.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometrio<T> {
    pub with_z: Vec<Complex<T>>,
    pub with_zbar: Vec<Complex<T>>,
}

pub fn geometrio<T: Real>(sys: &StructuredSystem, pt: &PhasePoint<T>) -> Result<Geometrio<T>> {
    check_arity(sys.structural(), pt)?;
    let sj = jet(sys.structural(), &lift(pt))?;
    let two_i = Complex::new(T::zero(), T::lit(2.0));
    Ok(Geometrio {
        with_z: sj.dzbar.iter().map(|&d| two_i * d).collect(),
        with_zbar: sj.dz.iter().map(|&d| -two_i * d).collect(),
    })
}

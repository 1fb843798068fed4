//! The structural bracket and covariant rates computed purely in real
//! `(q, p)` coordinates with the canonical symplectic structure. Nothing here
//! touches Wirtinger derivatives, so it serves as an independent route for
//! checking the complex-coordinate engine.

use num_complex::Complex;

use crate::brackets::{gspb, pb_real_of_partials, StructuredSystem};
use crate::dynamics::{gchs_rate, s_dynamics, CovariantRate};
use crate::error::Result;
use crate::fields::{check_arity, real_partials, PhaseFn};
use crate::phasespace::PhasePoint;
use crate::scalar::Real;

struct RealJet<T> {
    value: Complex<T>,
    grad: Vec<Complex<T>>,
}

fn real_jet<T: Real, F: PhaseFn + ?Sized>(f: &F, pt: &PhasePoint<T>) -> Result<RealJet<T>> {
    check_arity(f, pt)?;
    let (value, grad) = real_partials(f, &pt.lift::<Complex<T>>())?;
    Ok(RealJet { value, grad })
}

fn pb<T: Real>(a: &RealJet<T>, b: &RealJet<T>) -> Complex<T> {
    pb_real_of_partials(&a.grad, &b.grad)
}

/// `{f,g}_PB + f{s,g}_PB − g{s,f}_PB` with the real canonical bracket.
pub fn gspb_real<T: Real, F: PhaseFn + ?Sized, G: PhaseFn + ?Sized>(
    f: &F,
    g: &G,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<Complex<T>> {
    let fj = real_jet(f, pt)?;
    let gj = real_jet(g, pt)?;
    let sj = real_jet(sys.structural(), pt)?;
    Ok(pb(&fj, &gj) + fj.value * pb(&sj, &gj) - gj.value * pb(&sj, &fj))
}

/// Covariant rate of `f` in real coordinates.
pub fn gchs_real_rate<T: Real, F: PhaseFn + ?Sized>(
    f: &F,
    sys: &StructuredSystem,
    pt: &PhasePoint<T>,
) -> Result<CovariantRate<T>> {
    let fj = real_jet(f, pt)?;
    let hj = real_jet(sys.hamiltonian(), pt)?;
    let sj = real_jet(sys.structural(), pt)?;
    let thorough = pb(&fj, &hj) - hj.value * pb(&sj, &fj);
    let w = pb(&sj, &hj);
    Ok(CovariantRate { total: thorough + fj.value * w, thorough, sdyn: w.re, value: fj.value })
}

/// `w = {s,H}_PB` in real coordinates.
pub fn s_dynamics_real<T: Real>(sys: &StructuredSystem, pt: &PhasePoint<T>) -> Result<T> {
    let hj = real_jet(sys.hamiltonian(), pt)?;
    let sj = real_jet(sys.structural(), pt)?;
    Ok(pb(&sj, &hj).re)
}

/// Largest deviations between the complex- and real-coordinate engines.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CrossCheck {
    pub points: usize,
    pub gspb: f64,
    pub covariant_rate: f64,
    pub s_dynamics: f64,
}

impl CrossCheck {
    pub fn max(&self) -> f64 {
        self.gspb.max(self.covariant_rate).max(self.s_dynamics)
    }
}

pub fn cross_check<T: Real, F: PhaseFn + ?Sized, G: PhaseFn + ?Sized>(
    f: &F,
    g: &G,
    sys: &StructuredSystem,
    points: &[PhasePoint<T>],
) -> Result<CrossCheck> {
    let mut report = CrossCheck { points: points.len(), ..CrossCheck::default() };
    let dev = |a: Complex<T>, b: Complex<T>| (a - b).norm().to_f64().unwrap_or(f64::NAN);
    for pt in points {
        let d = dev(gspb(f, g, sys, pt)?, gspb_real(f, g, sys, pt)?);
        report.gspb = report.gspb.max(d);
        let d = dev(gchs_rate(f, sys, pt)?.total, gchs_real_rate(f, sys, pt)?.total);
        report.covariant_rate = report.covariant_rate.max(d);
        let wc = s_dynamics(sys, pt)?;
        let wr = s_dynamics_real(sys, pt)?;
        report.s_dynamics = report.s_dynamics.max((wc - wr).abs().to_f64().unwrap_or(f64::NAN));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brackets::pb_real;
    use crate::fields::{parse_field, ScalarField};

    type C = Complex<f64>;
    const OSC: &str = "(q1^2 + p1^2)/2";

    fn field(t: &str) -> ScalarField {
        parse_field(t, 1).unwrap()
    }

    fn pt(q: f64, p: f64) -> PhasePoint<f64> {
        PhasePoint::new(&[q], &[p]).unwrap()
    }

    #[test]
    fn gspb_real_examples() {
        let s0 = StructuredSystem::new(field(OSC), field("0")).unwrap();
        let (f, g) = (field("q1^2*p1"), field("sin(p1)"));
        let p0 = pt(0.4, 0.9);
        assert_eq!(gspb_real(&f, &g, &s0, &p0).unwrap(), pb_real(&f, &g, &p0).unwrap());

        let s_q = StructuredSystem::new(field(OSC), field("q1")).unwrap();
        let v = gspb_real(&ScalarField::z(1, 0), &ScalarField::zbar(1, 0), &s_q, &pt(1.0, 2.0)).unwrap();
        assert!((v - C::new(0.0, -4.0)).norm() < 1e-14);
        assert_eq!(gspb_real(&f, &f, &s_q, &p0).unwrap(), C::new(0.0, 0.0));
    }

    #[test]
    fn gchs_real_rate_examples() {
        let s_q = StructuredSystem::new(field(OSC), field("q1")).unwrap();
        let r = gchs_real_rate(&field("q1"), &s_q, &pt(1.0, 2.0)).unwrap();
        assert_eq!(r.thorough, C::new(2.0, 0.0));
        let r = gchs_real_rate(&field("p1"), &s_q, &pt(1.0, 2.0)).unwrap();
        assert_eq!(r.thorough, C::new(-3.5, 0.0));
        let r = gchs_real_rate(s_q.hamiltonian(), &s_q, &pt(1.0, 2.0)).unwrap();
        assert_eq!(r.total, C::new(0.0, 0.0));
    }

    #[test]
    fn cross_check_oscillator() {
        let s_q = StructuredSystem::new(field(OSC), field("q1")).unwrap();
        let points: Vec<_> = (0..20).map(|k| pt(0.1 * k as f64 - 1.0, 1.0 - 0.07 * k as f64)).collect();
        let r = cross_check(&ScalarField::z(1, 0), s_q.hamiltonian(), &s_q, &points).unwrap();
        assert_eq!(r.points, 20);
        assert!(r.max() < 1e-10, "{r:?}");
    }
}

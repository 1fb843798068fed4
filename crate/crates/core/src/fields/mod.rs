//! Scalar fields over phase space: parsing, evaluation and derivatives.

mod diff;
mod expr;
mod parse;

use num_complex::Complex;

pub use diff::{directional, hessian, jet, real_partials, Jet, PhaseFn};
pub use expr::{Expr, Func, ScalarField};
pub use parse::{parse_field, parse_time_field};

use crate::error::{Error, Result};
use crate::phasespace::PhasePoint;
use crate::scalar::Real;

/// Per-index Wirtinger partials `(∂f/∂zʲ, ∂f/∂z̄ʲ)` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct WirtingerGradient<T> {
    pub dz: Vec<Complex<T>>,
    pub dzbar: Vec<Complex<T>>,
}

/// All second partials of a field with respect to `[q.., p..]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondDerivatives<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> SecondDerivatives<T> {
    /// Number of real coordinates (`2n`).
    pub fn size(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> Complex<T> {
        self.entries[a * self.dim + b]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }
}

pub(crate) fn check_arity<T: Real, F: PhaseFn + ?Sized>(f: &F, pt: &PhasePoint<T>) -> Result<()> {
    if f.dim() != pt.dim() {
        return Err(Error::Arity { expected: f.dim(), got: pt.dim() });
    }
    Ok(())
}

pub fn eval<T: Real>(f: &ScalarField, pt: &PhasePoint<T>) -> Result<Complex<T>> {
    check_arity(f, pt)?;
    f.eval_ad(&pt.lift::<Complex<T>>())
}

/// Evaluates a time-dependent field at `(t, pt)`.
pub fn eval_with_time<T: Real>(f: &ScalarField, t: T, pt: &PhasePoint<T>) -> Result<Complex<T>> {
    check_arity(f, pt)?;
    let mut x = pt.lift::<Complex<T>>();
    if f.has_time() {
        x.push(Complex::new(t, T::zero()));
    }
    f.eval_ad(&x)
}

pub fn gradient<T: Real>(f: &ScalarField, pt: &PhasePoint<T>) -> Result<WirtingerGradient<T>> {
    check_arity(f, pt)?;
    let j = jet(f, &pt.lift::<Complex<T>>())?;
    Ok(WirtingerGradient { dz: j.dz, dzbar: j.dzbar })
}

pub fn second_derivatives<T: Real>(f: &ScalarField, pt: &PhasePoint<T>) -> Result<SecondDerivatives<T>> {
    check_arity(f, pt)?;
    let entries = hessian(f, &pt.lift::<Complex<T>>())?;
    Ok(SecondDerivatives { dim: 2 * pt.dim(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::{DomainError, ParseErrorKind};
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn pt(q: f64, p: f64) -> PhasePoint<f64> {
        PhasePoint::new(&[q], &[p]).unwrap()
    }

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn parse_oscillator() {
        let h = parse_field("(q1^2 + p1^2)/2", 1).unwrap();
        let expected = Expr::Div(
            Box::new(Expr::Add(
                Box::new(Expr::Pow(Box::new(Expr::Q(0)), 2)),
                Box::new(Expr::Pow(Box::new(Expr::P(0)), 2)),
            )),
            Box::new(Expr::Const(2.0)),
        );
        assert_eq!(h.expr(), &expected);
    }

    #[test]
    fn parse_errors() {
        let e = parse_field("q0", 1).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::IndexOutOfRange { .. }));
        let e = parse_field("q1 + q5", 2).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::IndexOutOfRange { .. }));
        assert_eq!(e.pos.column, 6);
        let e = parse_field("foo + 1", 1).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("foo".into()));
        let e = parse_field("tan(q1)", 1).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("tan".into()));
        let e = parse_field("(q1 + ", 1).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.pos.column, 7);
        let e = parse_field("q1^1.5", 1).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse_field("q1 q1", 1).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse_field("q1 # 2", 1).unwrap_err();
        assert_eq!(e.pos.column, 4);
        // `t` is only an identifier in time-dependent fields
        assert!(parse_field("t", 1).is_err());
        assert!(parse_time_field("sin(t)*q1", 1).is_ok());
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let f = parse_field("-q1^2", 1).unwrap();
        assert_eq!(eval(&f, &pt(3.0, 0.0)).unwrap(), C::new(-9.0, 0.0));
        let f = parse_field("2^-2 * 1e1", 1).unwrap();
        assert_eq!(eval(&f, &pt(0.0, 0.0)).unwrap(), C::new(2.5, 0.0));
    }

    #[test]
    fn eval_examples() {
        let h = parse_field("(q1^2 + p1^2)/2", 1).unwrap();
        assert_eq!(eval(&h, &pt(1.0, 2.0)).unwrap(), C::new(2.5, 0.0));
        let z = parse_field("z1", 1).unwrap();
        assert_eq!(eval(&z, &pt(1.0, 2.0)).unwrap(), C::new(1.0, 2.0));
        let e = parse_field("exp(q1)", 1).unwrap();
        assert_eq!(eval(&e, &pt(0.0, 0.0)).unwrap(), C::new(1.0, 0.0));
    }

    #[test]
    fn domain_errors() {
        let f = parse_field("1/q1", 1).unwrap();
        assert_eq!(eval(&f, &pt(0.0, 1.0)).unwrap_err(), Error::Domain(DomainError::DivisionByZero));
        let f = parse_field("log(q1)", 1).unwrap();
        assert_eq!(eval(&f, &pt(0.0, 1.0)).unwrap_err(), Error::Domain(DomainError::LogOfZero));
        let f = parse_field("q1^-1", 1).unwrap();
        assert!(gradient(&f, &pt(0.0, 1.0)).is_err());
        assert!(eval(&f, &PhasePoint::new(&[1.0, 1.0], &[0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn imaginary_form_of_momentum() {
        let lhs = parse_field("i*(z1 - conj(z1))", 1).unwrap();
        let rhs = parse_field("-2*p1", 1).unwrap();
        let mut x = 0.37_f64;
        for _ in 0..100 {
            x = (x * 3.7 + 0.11).fract();
            let y = (x * 7.3 + 0.29).fract();
            let point = pt(4.0 * x - 2.0, 4.0 * y - 2.0);
            let diff = eval(&lhs, &point).unwrap() - eval(&rhs, &point).unwrap();
            assert!(diff.norm() < 1e-14);
        }
    }

    #[test]
    fn gradient_examples() {
        let h = parse_field("(q1^2 + p1^2)/2", 1).unwrap();
        let g = gradient(&h, &pt(1.0, 2.0)).unwrap();
        assert!(close(g.dz[0], C::new(0.5, -1.0), 1e-15));
        assert!(close(g.dzbar[0], C::new(0.5, 1.0), 1e-15));
        let z = parse_field("z1", 1).unwrap();
        let g = gradient(&z, &pt(-0.3, 0.8)).unwrap();
        assert_eq!((g.dz[0], g.dzbar[0]), (C::new(1.0, 0.0), C::new(0.0, 0.0)));
    }

    #[test]
    fn second_derivative_examples() {
        let h = parse_field("(q1^2 + p1^2)/2", 1).unwrap();
        let d = second_derivatives(&h, &pt(0.4, -1.2)).unwrap();
        let re: Vec<f64> = d.entries().iter().map(|c| c.re).collect();
        assert_eq!(re, vec![1.0, 0.0, 0.0, 1.0]);
        let f = parse_field("q1*p1", 1).unwrap();
        let d = second_derivatives(&f, &pt(0.4, -1.2)).unwrap();
        let re: Vec<f64> = d.entries().iter().map(|c| c.re).collect();
        assert_eq!(re, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn display_round_trip() {
        for text in ["-(q1 - 2.5e-3)^-2 * sin(p2) / exp(z1)", "conj(z2)*i + log(q1*q1 + 1)", "pi - -q2"] {
            let f = parse_field(text, 2).unwrap();
            let g = parse_field(&f.to_string(), 2).unwrap();
            assert_eq!(f, g, "{text} -> {f}");
        }
        let neg = ScalarField::constant(1, -3.0) * ScalarField::q(1, 0);
        assert_eq!(parse_field(&neg.to_string(), 1).unwrap().to_string(), "((-3.0) * q1)");
    }

    #[test]
    fn f32_gradient() {
        let h = parse_field("(q1^2 + p1^2)/2", 1).unwrap();
        let g = gradient(&h, &PhasePoint::new(&[1.0f32], &[2.0f32]).unwrap()).unwrap();
        assert!((g.dz[0] - Complex::new(0.5f32, -1.0)).norm() < 1e-6);
    }

    fn field_strategy() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("q1".to_string()),
            Just("p1".to_string()),
            Just("q2".to_string()),
            Just("p2".to_string()),
            (-2.0f64..2.0).prop_map(|c| format!("({c})")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
                inner.clone().prop_map(|a| format!("sin({a})")),
                inner.clone().prop_map(|a| format!("cos({a})")),
                inner.clone().prop_map(|a| format!("({a})^3")),
            ]
        })
    }

    proptest! {
        #[test]
        fn gradient_is_linear(a in field_strategy(), b in field_strategy(),
                              ka in -2.0f64..2.0, kb in -2.0f64..2.0,
                              x in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let f = parse_field(&a, 2).unwrap();
            let g = parse_field(&b, 2).unwrap();
            let combo = f.scale(ka) + g.scale(kb);
            let point = PhasePoint::new(&x[..2], &x[2..]).unwrap();
            let gf = gradient(&f, &point).unwrap();
            let gg = gradient(&g, &point).unwrap();
            let gc = gradient(&combo, &point).unwrap();
            for j in 0..2 {
                let want = gf.dz[j] * ka + gg.dz[j] * kb;
                prop_assert!((gc.dz[j] - want).norm() <= 1e-14 * (1.0 + want.norm()) * 10.0);
            }
        }

        #[test]
        fn real_fields_are_real_with_conjugate_wirtinger(a in field_strategy(),
                              x in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let f = parse_field(&a, 2).unwrap();
            let point = PhasePoint::new(&x[..2], &x[2..]).unwrap();
            prop_assert!(eval(&f, &point).unwrap().im.abs() < 1e-14);
            let g = gradient(&f, &point).unwrap();
            for j in 0..2 {
                prop_assert_eq!(g.dzbar[j], g.dz[j].conj());
            }
        }

        #[test]
        fn display_then_parse_evaluates_identically(a in field_strategy(),
                              x in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let f = parse_field(&a, 2).unwrap();
            let g = parse_field(&f.to_string(), 2).unwrap();
            let point = PhasePoint::new(&x[..2], &x[2..]).unwrap();
            let d = eval(&f, &point).unwrap() - eval(&g, &point).unwrap();
            prop_assert!(d.norm() < 1e-14);
        }

        #[test]
        fn hessian_is_symmetric(a in field_strategy(), x in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let f = parse_field(&a, 2).unwrap();
            let point = PhasePoint::new(&x[..2], &x[2..]).unwrap();
            let d = second_derivatives(&f, &point).unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    prop_assert_eq!(d.get(r, c), d.get(c, r));
                }
            }
        }
    }
}

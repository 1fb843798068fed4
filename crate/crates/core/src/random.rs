//! Seeded generators for random polynomial fields and sample points.

use rand::Rng;

use crate::fields::{Expr, ScalarField};
use crate::phasespace::PhasePoint;
use crate::scalar::Real;

/// A real polynomial in `q₁..qₙ, p₁..pₙ` of total degree at most `degree`
/// with `terms` monomials and coefficients uniform in `[-1, 1]`.
pub fn polynomial<R: Rng + ?Sized>(rng: &mut R, n: usize, degree: u32, terms: usize) -> ScalarField {
    let mut sum: Option<Expr> = None;
    for _ in 0..terms.max(1) {
        let mut mono = Expr::Const(rng.gen_range(-1.0..=1.0));
        let deg = rng.gen_range(0..=degree);
        let mut exps = vec![0i32; 2 * n];
        for _ in 0..deg {
            exps[rng.gen_range(0..2 * n)] += 1;
        }
        for (a, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let coord = if a < n { Expr::Q(a) } else { Expr::P(a - n) };
            let factor = if e == 1 { coord } else { Expr::Pow(Box::new(coord), e) };
            mono = Expr::Mul(Box::new(mono), Box::new(factor));
        }
        sum = Some(match sum {
            None => mono,
            Some(acc) => Expr::Add(Box::new(acc), Box::new(mono)),
        });
    }
    ScalarField::from_expr(sum.expect("at least one term"), n, false).expect("indices in range")
}

/// A point with every coordinate uniform in `[-radius, radius]`.
pub fn point<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> PhasePoint<T> {
    let coords = (0..2 * n).map(|_| T::lit(rng.gen_range(-radius..=radius))).collect();
    PhasePoint::from_coords(coords).expect("finite sample")
}

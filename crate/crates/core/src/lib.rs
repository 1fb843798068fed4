//! Generalized structural Poisson brackets and covariant Hamilton flows in
//! complex phase-space coordinates.
//!
//! Phase space is ℂⁿ with `zʲ = qʲ + i pʲ`. A [`StructuredSystem`] pairs a
//! real Hamiltonian `H` with a real structural function `s`; from them the
//! crate evaluates
//!
//! * the Poisson bracket `{f,g}_PB` in real and complex form,
//! * the structural bracket `{f,g} = {f,g}_PB + f{s,g}_PB − g{s,f}_PB`,
//! * the thorough flow `żʲ = −2i(∂H/∂z̄ʲ + H ∂s/∂z̄ʲ)`, the S-dynamics
//!   `w = {s,H}_PB` and the covariant rate `Df/dt = df/dt + f·w`,
//! * second covariant derivatives through nested forward-mode AD,
//!
//! and integrates the resulting flows. All numerics are generic over
//! [`Real`] (`f32` or `f64`); the `*64` aliases below fix `f64`.
//!
//! ```
//! use gchs::{parse_field, gspb, PhasePoint64, ScalarField, StructuredSystem};
//!
//! let h = parse_field("(q1^2 + p1^2)/2", 1).unwrap();
//! let s = parse_field("q1", 1).unwrap();
//! let sys = StructuredSystem::new(h, s).unwrap();
//! let z = ScalarField::z(1, 0);
//! let zbar = ScalarField::zbar(1, 0);
//! let v = gspb(&z, &zbar, &sys, &PhasePoint64::new(&[1.0], &[2.0]).unwrap()).unwrap();
//! assert!((v.im + 4.0).abs() < 1e-12);
//! ```

pub mod brackets;
pub mod bridge;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod integrate;
pub mod phasespace;
pub mod random;
pub mod scalar;

pub use num_complex::Complex;

pub use brackets::{
    geobracket, geometrio, gspb, pb_complex, pb_real, structural_derivative, Geometrio, StructuralGradient,
    StructuredSystem,
};
pub use bridge::{cross_check, gchs_real_rate, gspb_real, s_dynamics_real, CrossCheck};
pub use dynamics::{
    beta, chain_rule_halves, chain_rule_rate, covariant_acceleration, covariant_acceleration_bracket,
    equilibrium_residual, exponential_solution, gchs_rate, s_dynamics, s_dynamics_rate, tghs_velocity, thorough_rate,
    CovariantRate, CovariantRateFn, EquilibriumResidual, SDynamics, TghsVelocity, ThoroughRate,
};
pub use error::{DomainError, Error, ParseError, ParseErrorKind, Result, SourcePos};
pub use fields::{
    eval, eval_with_time, gradient, parse_field, parse_time_field, second_derivatives, PhaseFn, ScalarField,
    SecondDerivatives, WirtingerGradient,
};
pub use integrate::{
    integrate_equilibrium, integrate_perturbed, integrate_tghs, monitor_report, Method, Monitor, MonitorReport,
    SDynamicsSource, StepperConfig, Trajectory,
};
pub use phasespace::{from_complex, to_complex, wirtinger_from_real, ComplexCoords, PhasePoint};
pub use scalar::{AdScalar, Dual, Real};

pub type C64 = Complex<f64>;
pub type PhasePoint64 = PhasePoint<f64>;
pub type PhasePoint32 = PhasePoint<f32>;
pub type ComplexCoords64 = ComplexCoords<f64>;
pub type WirtingerGradient64 = WirtingerGradient<f64>;
pub type CovariantRate64 = CovariantRate<f64>;
pub type StepperConfig64 = StepperConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type MonitorReport64 = MonitorReport<f64>;

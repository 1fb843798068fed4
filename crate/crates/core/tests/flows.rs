use std::f64::consts::PI;

use gchs::{
    exponential_solution, integrate_equilibrium, integrate_tghs, monitor_report, parse_field, Complex, PhasePoint,
    SDynamicsSource, StepperConfig, StructuredSystem,
};

type C = Complex<f64>;

fn oscillator(s: &str) -> StructuredSystem {
    StructuredSystem::new(parse_field("(q1^2 + p1^2)/2", 1).unwrap(), parse_field(s, 1).unwrap()).unwrap()
}

fn oscillator_error(step: f64) -> f64 {
    let z0: PhasePoint<f64> = PhasePoint::new(&[1.0], &[0.5]).unwrap();
    let traj = integrate_tghs(&oscillator("0"), &z0, &StepperConfig::rk4(step, PI), &[]).unwrap();
    let exact = C::new(0.0, -PI).exp() * z0.z(0);
    (traj.last().unwrap().1.z(0) - exact).norm()
}

#[test]
fn rk4_is_fourth_order() {
    let ratio = oscillator_error(PI / 32.0) / oscillator_error(PI / 64.0);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    assert!(oscillator_error(1e-3) < 1e-8);
}

#[test]
fn adaptive_and_fixed_steppers_agree() {
    let sys = oscillator("q1");
    let z0: PhasePoint<f64> = PhasePoint::new(&[1.0], &[2.0]).unwrap();
    let a = integrate_tghs(&sys, &z0, &StepperConfig::rk4(1e-3, 1.5), &[]).unwrap();
    let b = integrate_tghs(&sys, &z0, &StepperConfig::rk45(1.5), &[]).unwrap();
    let (ta, za) = a.last().unwrap();
    let (tb, zb) = b.last().unwrap();
    assert_eq!(ta, tb);
    assert!((za.z(0) - zb.z(0)).norm() < 1e-6 * za.norm().max(1.0));
}

#[test]
fn structured_flow_obeys_the_decay_law() {
    let z0: PhasePoint<f64> = PhasePoint::new(&[1.0], &[2.0]).unwrap();
    let traj = integrate_tghs(&oscillator("q1"), &z0, &StepperConfig::rk4(1e-3, 2.0), &[]).unwrap();
    let report = monitor_report(&traj).unwrap();
    assert!(report.max_decay_dev < 1e-6);
    assert!(report.max_hh_bracket < 1e-10);
    // the energy is not conserved: H grows where w < 0
    assert!(report.max_energy_drift > 1.0);
}

#[test]
fn equilibrium_flow_decays_exponentially() {
    let z0: PhasePoint<f64> = PhasePoint::new(&[1.0, -0.5], &[0.25, 2.0]).unwrap();
    let traj = integrate_equilibrium(&z0, SDynamicsSource::Constant(0.5), &StepperConfig::rk4(1e-3, 3.0)).unwrap();
    for (t, x) in traj.times.iter().zip(&traj.states) {
        for j in 0..2 {
            assert!((x.z(j) - exponential_solution(z0.z(j), 0.5, *t)).norm() < 1e-8);
        }
    }
}

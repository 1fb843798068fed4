//! `check`: seeded invariant suites over the scenario's fields and random
//! polynomial fields.
//!
//! Every invariant reports the largest deviation seen, measured relative to
//! `max(1, magnitude of the compared terms)`. Points where a field leaves its
//! domain are skipped and counted.

use std::f64::consts::PI;
use std::fmt;

use gchs::fields::real_partials;
use gchs::phasespace::real_from_wirtinger;
use gchs::random::{point, polynomial};
use gchs::{
    chain_rule_halves, chain_rule_rate, covariant_acceleration, covariant_acceleration_bracket, eval, from_complex,
    gchs_rate, gchs_real_rate, geobracket, gradient, gspb, gspb_real, integrate_tghs, monitor_report, parse_field,
    pb_complex, pb_real, s_dynamics, s_dynamics_real, second_derivatives, structural_derivative, tghs_velocity,
    thorough_rate, to_complex, wirtinger_from_real, Complex, Error, PhasePoint64, ScalarField, StepperConfig64,
    StructuredSystem,
};
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{fd_gradient, fd_hessian, flow_derivatives};
use crate::scenario::Setup;

type C = Complex<f64>;

const I: C = C::new(0.0, 1.0);
const FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Below(f64),
    Within(f64, f64),
}

impl Bound {
    fn holds(self, v: f64) -> bool {
        match self {
            Bound::Below(tol) => v <= tol,
            Bound::Within(lo, hi) => (lo..=hi).contains(&v),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub bound: Bound,
    /// Largest deviation (or the measured value for range bounds).
    pub value: f64,
    pub samples: usize,
    pub skipped: usize,
    pub error: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.samples > 0 && self.bound.holds(self.value)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let bound = match self.bound {
            Bound::Below(tol) => format!("max_dev={:.3e} tol={tol:.0e}", self.value),
            Bound::Within(lo, hi) => format!("value={:.4} range=[{lo}, {hi}]", self.value),
        };
        write!(f, "{status} {:<36} {bound} samples={} skipped={}", self.name, self.samples, self.skipped)?;
        if let Some(e) = &self.error {
            write!(f, " error={e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }

    pub fn get(&self, name: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        let failed = self.outcomes.iter().filter(|o| !o.passed()).count();
        if failed == 0 {
            writeln!(f, "all {} invariants pass", self.outcomes.len())
        } else {
            writeln!(f, "{failed} of {} invariants FAILED", self.outcomes.len())
        }
    }
}

/// Deviation of `a` from `b` relative to `max(1, scale)`.
fn rel(a: C, b: C, scale: f64) -> f64 {
    (a - b).norm() / scale.max(1.0)
}

#[derive(Default)]
struct Suites {
    stats: IndexMap<&'static str, Outcome>,
}

impl Suites {
    fn record(&mut self, name: &'static str, bound: Bound, result: gchs::Result<f64>) {
        let o = self.stats.entry(name).or_insert(Outcome {
            name,
            bound,
            value: if matches!(bound, Bound::Below(_)) { 0.0 } else { f64::NAN },
            samples: 0,
            skipped: 0,
            error: None,
        });
        match result {
            Ok(v) => {
                o.samples += 1;
                o.value = match bound {
                    Bound::Below(_) if v.is_nan() => f64::INFINITY,
                    Bound::Below(_) => o.value.max(v),
                    Bound::Within(..) => v,
                };
            }
            Err(Error::Domain(_)) => o.skipped += 1,
            Err(e) => {
                if o.error.is_none() {
                    o.error = Some(e.to_string());
                }
            }
        }
    }

    fn below(&mut self, name: &'static str, tol: f64, result: gchs::Result<f64>) {
        self.record(name, Bound::Below(tol), result);
    }
}

struct Sample {
    sys: StructuredSystem,
    f: ScalarField,
    g: ScalarField,
    x: PhasePoint64,
    a: f64,
    b: f64,
}

fn phasespace_suite(s: &mut Suites, c: &Sample) {
    s.below("phasespace.coordinate_roundtrip", 0.0, {
        from_complex(&to_complex(&c.x))
            .map(|y| y.coords().iter().zip(c.x.coords()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    });
    s.below(
        "phasespace.wirtinger_inversion",
        1e-14,
        (|| {
            let (_, partials) = real_partials(&c.f, &c.x.lift::<C>())?;
            let n = c.x.dim();
            let mut dev = 0.0f64;
            for j in 0..n {
                let (dq, dp) = (partials[j], partials[n + j]);
                let (dz, dzbar) = wirtinger_from_real(dq, dp);
                let (rq, rp) = real_from_wirtinger(dz, dzbar);
                dev = dev.max(rel(rq, dq, dq.norm())).max(rel(rp, dp, dp.norm()));
            }
            Ok(dev)
        })(),
    );
    s.below("phasespace.conjugate_symmetry", 1e-14, {
        gradient(&c.f, &c.x)
            .map(|g| g.dz.iter().zip(&g.dzbar).fold(0.0f64, |m, (dz, dzb)| m.max(rel(*dzb, dz.conj(), dz.norm()))))
    });
}

fn fields_suite(s: &mut Suites, c: &Sample) {
    s.below(
        "fields.gradient_linearity",
        1e-14,
        (|| {
            let combo = c.f.scale(c.a) + c.g.scale(c.b);
            let (gc, gf, gg) = (gradient(&combo, &c.x)?, gradient(&c.f, &c.x)?, gradient(&c.g, &c.x)?);
            let parts = gc.dz.iter().zip(&gf.dz).zip(&gg.dz).chain(gc.dzbar.iter().zip(&gf.dzbar).zip(&gg.dzbar));
            Ok(parts.fold(0.0f64, |m, ((h, f), g)| {
                let expected = f * c.a + g * c.b;
                m.max(rel(*h, expected, (f * c.a).norm() + (g * c.b).norm()))
            }))
        })(),
    );
    s.below("fields.real_fields_evaluate_real", 1e-14, eval(&c.f, &c.x).map(|v| v.im.abs() / v.re.abs().max(1.0)));
    s.below(
        "fields.print_parse_roundtrip",
        1e-14,
        (|| {
            let reparsed = parse_field(&c.f.to_string(), c.f.dim())?;
            let (a, b) = (eval(&c.f, &c.x)?, eval(&reparsed, &c.x)?);
            Ok(rel(a, b, a.norm()))
        })(),
    );
    s.below(
        "fields.first_partials_vs_fd",
        1e-6,
        (|| {
            let ad = crate::oracle::real_gradient(&c.f, &c.x)?;
            let fd = fd_gradient(&c.f, &c.x, FD_STEP)?;
            Ok(ad.iter().zip(&fd).fold(0.0f64, |m, (a, f)| m.max(rel(*a, *f, f.norm()))))
        })(),
    );
    s.below(
        "fields.second_partials_vs_fd",
        1e-4,
        (|| {
            let ad = second_derivatives(&c.f, &c.x)?;
            let fd = fd_hessian(&c.f, &c.x, FD_STEP)?;
            Ok(ad.entries().iter().zip(&fd).fold(0.0f64, |m, (a, f)| m.max(rel(*a, *f, f.norm()))))
        })(),
    );
}

fn brackets_suite(s: &mut Suites, c: &Sample) {
    let (sys, f, g, x) = (&c.sys, &c.f, &c.g, &c.x);
    let h = sys.hamiltonian();
    s.below(
        "brackets.antisymmetry",
        1e-12,
        (|| {
            let (fg, gf) = (gspb(f, g, sys, x)?, gspb(g, f, sys, x)?);
            Ok(rel(fg, -gf, fg.norm()))
        })(),
    );
    s.below(
        "brackets.bilinearity",
        1e-12,
        (|| {
            let combo = f.scale(c.a) + g.scale(c.b);
            let (l, rf, rg) = (gspb(&combo, h, sys, x)?, gspb(f, h, sys, x)?, gspb(g, h, sys, x)?);
            Ok(rel(l, rf * c.a + rg * c.b, (rf * c.a).norm() + (rg * c.b).norm()))
        })(),
    );
    s.below(
        "brackets.geobracket_bilinearity",
        1e-12,
        (|| {
            let combo = f.scale(c.a) + g.scale(c.b);
            let (l, rf, rg) = (geobracket(&combo, h, sys, x)?, geobracket(f, h, sys, x)?, geobracket(g, h, sys, x)?);
            Ok(rel(l, rf * c.a + rg * c.b, (rf * c.a).norm() + (rg * c.b).norm()))
        })(),
    );
    s.below(
        "brackets.classical_reduction",
        0.0,
        (|| {
            let classical = sys.classical();
            Ok((gspb(f, g, &classical, x)? - pb_complex(f, g, x)?).norm())
        })(),
    );
    s.below(
        "brackets.pb_real_vs_complex",
        1e-10,
        (|| {
            let (a, b) = (pb_complex(f, g, x)?, pb_real(f, g, x)?);
            Ok(rel(a, b, a.norm()))
        })(),
    );
    s.below(
        "brackets.expansion_vs_definition",
        1e-10,
        (|| {
            let (df, dg) = (structural_derivative(f, sys, x)?, structural_derivative(g, sys, x)?);
            let sum =
                (0..x.dim()).fold(C::new(0.0, 0.0), |acc, j| acc + df.dzbar[j] * dg.dz[j] - df.dz[j] * dg.dzbar[j]);
            let v = gspb(f, g, sys, x)?;
            Ok(rel(v, 2.0 * I * sum, v.norm()))
        })(),
    );
    s.below(
        "brackets.coordinate_brackets",
        1e-12,
        (|| {
            let n = x.dim();
            let gs = gradient(sys.structural(), x)?;
            let mut dev = 0.0f64;
            for j in 0..n {
                let (z, zb) = (ScalarField::z(n, j), ScalarField::zbar(n, j));
                dev = dev.max((pb_complex(&z, &zb, x)? - C::new(0.0, -2.0)).norm());
                let zj = x.z(j);
                let expected = -2.0 * I * (1.0 + zj * gs.dz[j] + zj.conj() * gs.dzbar[j]);
                dev = dev.max(rel(gspb(&z, &zb, sys, x)?, expected, expected.norm()));
                dev = dev.max(gspb(&z, &z, sys, x)?.norm()).max(gspb(&zb, &zb, sys, x)?.norm());
            }
            Ok(dev)
        })(),
    );
}

fn dynamics_suite(s: &mut Suites, c: &Sample) {
    let (sys, f, x) = (&c.sys, &c.f, &c.x);
    let h = sys.hamiltonian();
    s.below(
        "dynamics.decomposition",
        1e-10,
        (|| {
            let (b, t, w) = (gspb(f, h, sys, x)?, thorough_rate(f, sys, x)?, s_dynamics(sys, x)?);
            let fv = eval(f, x)?;
            Ok(rel(b, t + fv * w, t.norm() + (fv * w).norm()))
        })(),
    );
    s.below(
        "dynamics.covariant_conservation",
        1e-10,
        (|| {
            let exact = gspb(h, h, sys, x)?.norm();
            let chain = chain_rule_rate(h, sys, x, true)?;
            let scale = eval(h, x)?.norm() * s_dynamics(sys, x)?.abs();
            Ok(if exact == 0.0 { chain.norm() / scale.max(1.0) } else { f64::INFINITY })
        })(),
    );
    s.below(
        "dynamics.velocity_identity",
        1e-10,
        (|| {
            let (a, b) = chain_rule_halves(h, sys, x)?;
            Ok(rel(a, -b, a.norm()))
        })(),
    );
    s.below(
        "dynamics.conjugate_pairing",
        1e-12,
        (|| {
            let v = tghs_velocity(sys, x)?;
            Ok(v.dz.iter().zip(&v.dzbar).fold(0.0f64, |m, (a, b)| m.max(rel(*b, a.conj(), a.norm()))))
        })(),
    );
    s.below(
        "dynamics.structural_rate_of_s",
        1e-10,
        (|| {
            let (sh, w, sv) = (gspb(sys.structural(), h, sys, x)?, s_dynamics(sys, x)?, eval(sys.structural(), x)?);
            let expected = (1.0 + sv) * w;
            Ok(rel(sh, expected, expected.norm()))
        })(),
    );
    s.below(
        "dynamics.s_dynamics_chain_rule",
        1e-10,
        (|| {
            let w = s_dynamics(sys, x)?;
            let chain = chain_rule_rate(sys.structural(), sys, x, false)?;
            Ok(rel(chain, C::new(w, 0.0), w.abs()))
        })(),
    );
    s.below(
        "dynamics.acceleration_consistency",
        1e-8,
        (|| {
            let (a, b) = (covariant_acceleration(f, sys, x)?, covariant_acceleration_bracket(f, sys, x)?);
            Ok(rel(a, b, a.norm()))
        })(),
    );
    s.below(
        "dynamics.acceleration_identity",
        1e-8,
        (|| {
            let d = flow_derivatives(f, sys, x)?;
            let scale = d.second.norm() + (d.first * d.w).norm() * 2.0 + (d.value * d.beta).norm();
            Ok(rel(covariant_acceleration(f, sys, x)?, d.covariant_acceleration(), scale))
        })(),
    );
}

fn bridge_suite(s: &mut Suites, c: &Sample) {
    let (sys, f, g, x) = (&c.sys, &c.f, &c.g, &c.x);
    s.below(
        "bridge.gspb",
        1e-10,
        (|| {
            let (a, b) = (gspb(f, g, sys, x)?, gspb_real(f, g, sys, x)?);
            Ok(rel(a, b, a.norm()))
        })(),
    );
    s.below(
        "bridge.covariant_rate",
        1e-10,
        (|| {
            let (a, b) = (gchs_rate(f, sys, x)?, gchs_real_rate(f, sys, x)?);
            Ok(rel(a.total, b.total, a.thorough.norm() + (a.value * a.sdyn).norm()))
        })(),
    );
    s.below(
        "bridge.s_dynamics",
        1e-10,
        (|| {
            let (a, b) = (s_dynamics(sys, x)?, s_dynamics_real(sys, x)?);
            Ok((a - b).abs() / a.abs().max(1.0))
        })(),
    );
}

fn oscillator_error(step: f64) -> gchs::Result<f64> {
    let sys = StructuredSystem::new(parse_field("(q1^2 + p1^2)/2", 1)?, parse_field("0", 1)?)?;
    let z0 = PhasePoint64::new(&[1.0], &[0.5])?;
    let traj = integrate_tghs(&sys, &z0, &StepperConfig64::rk4(step, PI), &[])?;
    let mut err = 0.0f64;
    for (t, x) in traj.times.iter().zip(&traj.states) {
        err = err.max((x.z(0) - C::new(0.0, -t).exp() * z0.z(0)).norm());
    }
    Ok(err)
}

/// Trajectory-level checks along the scenario's flow.
fn integrate_suite(s: &mut Suites, setup: &Setup, extra: &ScalarField) {
    s.record(
        "integrate.rk4_order_ratio",
        Bound::Within(12.0, 20.0),
        (|| Ok(oscillator_error(PI / 32.0)? / oscillator_error(PI / 64.0)?))(),
    );

    let step = 1e-3;
    let t_end = setup.stepper.t_end.min(0.5);
    let mut fields: Vec<ScalarField> = setup.observables.values().cloned().collect();
    fields.push(extra.clone());
    let sys = &setup.system;
    for z0 in &setup.initial {
        let traj = integrate_tghs(sys, z0, &StepperConfig64::rk4(step, t_end), &[]);
        let traj = match traj {
            Ok(t) => t,
            Err(e) => {
                for name in ["integrate.decay_law", "integrate.fd_thorough_rate", "integrate.fd_covariant_rate"] {
                    s.below(name, 0.0, Err(e.clone()));
                }
                continue;
            }
        };
        s.below(
            "integrate.decay_law",
            1e-6,
            (|| {
                let r = monitor_report(&traj)?;
                let h_max = traj.monitors.iter().fold(0.0f64, |m, x| m.max(x.hamiltonian.abs()));
                Ok(r.max_decay_dev / h_max.max(1.0))
            })(),
        );
        for k in 1..traj.len().saturating_sub(1) {
            let (prev, here, next) = (&traj.states[k - 1], &traj.states[k], &traj.states[k + 1]);
            for f in &fields {
                s.below(
                    "integrate.fd_thorough_rate",
                    1e-4,
                    (|| {
                        let fd = (eval(f, next)? - eval(f, prev)?) / (2.0 * step);
                        Ok(rel(fd, thorough_rate(f, sys, here)?, fd.norm()))
                    })(),
                );
                s.below(
                    "integrate.fd_covariant_rate",
                    1e-4,
                    (|| {
                        let fd = (eval(f, next)? - eval(f, prev)?) / (2.0 * step);
                        let rate = gchs_rate(f, sys, here)?;
                        let covariant = fd + rate.value * rate.sdyn;
                        Ok(rel(covariant, rate.total, covariant.norm()))
                    })(),
                );
            }
        }
    }
}

/// Runs every suite at `count` random points drawn from `seed`.
///
/// Even-numbered points use the scenario's system, odd-numbered points a
/// random polynomial system. The first field of each point is a random
/// polynomial; the second cycles through the scenario's fields and further
/// random polynomials.
pub fn run_check(setup: &Setup, seed: u64, count: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = setup.n;
    let mut scenario_fields = vec![setup.system.hamiltonian().clone(), setup.system.structural().clone()];
    scenario_fields.extend(setup.observables.values().cloned());

    let mut suites = Suites::default();
    for k in 0..count {
        let sys = if k % 2 == 0 {
            setup.system.clone()
        } else {
            loop {
                let h = polynomial(&mut rng, n, 4, 5);
                let s = polynomial(&mut rng, n, 3, 4);
                if let Ok(sys) = StructuredSystem::new(h, s) {
                    break sys;
                }
            }
        };
        let f = polynomial(&mut rng, n, 4, 5);
        let g = if k % 3 == 0 {
            scenario_fields[(k / 3) % scenario_fields.len()].clone()
        } else {
            polynomial(&mut rng, n, 4, 5)
        };
        let sample =
            Sample { sys, f, g, x: point(&mut rng, n, 1.0), a: rng.gen_range(-2.0..2.0), b: rng.gen_range(-2.0..2.0) };
        phasespace_suite(&mut suites, &sample);
        fields_suite(&mut suites, &sample);
        brackets_suite(&mut suites, &sample);
        dynamics_suite(&mut suites, &sample);
        bridge_suite(&mut suites, &sample);
    }
    let extra = polynomial(&mut rng, n, 3, 4);
    integrate_suite(&mut suites, setup, &extra);
    Report { outcomes: suites.stats.into_values().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;
    use std::path::Path;

    fn setup(s: &str) -> Setup {
        let text = format!(
            r#"{{"n": 1, "hamiltonian": "(q1^2+p1^2)/2", "structural": "{s}",
            "observables": {{"z1": "z1"}}, "initial": {{"q": [1], "p": [2]}}}}"#
        );
        Scenario::from_json(&text).unwrap().setup(Path::new("."), "t").unwrap()
    }

    #[test]
    fn suites_pass_and_are_deterministic() {
        let a = run_check(&setup("q1"), 5, 40);
        assert!(a.passed(), "{a}");
        assert_eq!(a.to_string(), run_check(&setup("q1"), 5, 40).to_string());
        assert!(a.get("dynamics.acceleration_identity").unwrap().samples == 40);
    }

    #[test]
    fn failures_are_reported() {
        let mut s = Suites::default();
        s.below("x", 1e-3, Ok(0.5));
        s.below("y", 1e-3, Err(Error::Config("boom".into())));
        s.record("z", Bound::Within(1.0, 2.0), Ok(1.5));
        let r = Report { outcomes: s.stats.into_values().collect() };
        assert!(!r.passed());
        let text = r.to_string();
        assert!(text.contains("FAIL x"), "{text}");
        assert!(text.contains("error=invalid configuration: boom"), "{text}");
        assert!(text.contains("PASS z"), "{text}");
        assert!(text.ends_with("2 of 3 invariants FAILED\n"), "{text}");
    }
}

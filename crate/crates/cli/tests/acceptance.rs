//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;

use gchs::random::{point, polynomial};
use gchs::{
    chain_rule_rate, covariant_acceleration, eval, exponential_solution, gchs_rate, gchs_real_rate, gradient, gspb,
    gspb_real, integrate_equilibrium, integrate_tghs, monitor_report, parse_field, pb_complex, pb_real, s_dynamics,
    s_dynamics_real, second_derivatives, tghs_velocity, Complex, PhasePoint64, SDynamicsSource, ScalarField,
    StepperConfig64, StructuredSystem,
};
use gchs_cli::oracle::{fd_gradient, fd_hessian, flow_derivatives, real_gradient};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const I: C = C::new(0.0, 1.0);

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn structured(rng: &mut ChaCha8Rng, n: usize, structural: bool) -> StructuredSystem {
    let h = polynomial(rng, n, 4, 5);
    let s = if structural { polynomial(rng, n, 4, 4) } else { ScalarField::constant(n, 0.0) };
    StructuredSystem::new(h, s).unwrap()
}

fn oscillator(s: &str) -> StructuredSystem {
    StructuredSystem::new(parse_field("(q1^2 + p1^2)/2", 1).unwrap(), parse_field(s, 1).unwrap()).unwrap()
}

fn classical_reduction() -> Outcome {
    let mut r = rng(1);
    let mut max = 0.0f64;
    for k in 0..1000 {
        let n = 1 + k % 3;
        let sys = structured(&mut r, n, false);
        let (f, g) = (polynomial(&mut r, n, 4, 5), polynomial(&mut r, n, 4, 5));
        let x: PhasePoint64 = point(&mut r, n, 1.0);
        max = max.max((gspb(&f, &g, &sys, &x).unwrap() - pb_complex(&f, &g, &x).unwrap()).norm());
        // classical complex Hamilton equations żʲ = −2i ∂H/∂z̄ʲ
        let v = tghs_velocity(&sys, &x).unwrap();
        let grad = gradient(sys.hamiltonian(), &x).unwrap();
        for j in 0..n {
            max = max.max((v.dz[j] + 2.0 * I * grad.dzbar[j]).norm());
        }
        let rate = gchs_rate(&f, &sys, &x).unwrap();
        max = max.max((rate.total - pb_complex(&f, sys.hamiltonian(), &x).unwrap()).norm());
    }
    verdict(max < 1e-12, format!("1000 points, n in 1..=3, max |diff| = {max:.3e} (tol 1e-12)"))
}

fn real_complex_compatibility() -> Outcome {
    let mut r = rng(2);
    let mut max = [0.0f64; 4];
    for k in 0..1000 {
        let n = 1 + k % 3;
        let sys = structured(&mut r, n, true);
        let (f, g) = (polynomial(&mut r, n, 4, 5), polynomial(&mut r, n, 4, 5));
        let x: PhasePoint64 = point(&mut r, n, 1.0);
        let d = [
            (pb_complex(&f, &g, &x).unwrap() - pb_real(&f, &g, &x).unwrap()).norm(),
            (gspb(&f, &g, &sys, &x).unwrap() - gspb_real(&f, &g, &sys, &x).unwrap()).norm(),
            (gchs_rate(&f, &sys, &x).unwrap().total - gchs_real_rate(&f, &sys, &x).unwrap().total).norm(),
            (s_dynamics(&sys, &x).unwrap() - s_dynamics_real(&sys, &x).unwrap()).abs(),
        ];
        for (m, v) in max.iter_mut().zip(d) {
            *m = m.max(v);
        }
    }
    let worst = max.iter().fold(0.0f64, |a, &b| a.max(b));
    verdict(
        worst < 1e-10,
        format!("pb {:.3e}, gspb {:.3e}, rate {:.3e}, w {:.3e} (tol 1e-10)", max[0], max[1], max[2], max[3]),
    )
}

fn coordinate_brackets() -> Outcome {
    let mut r = rng(3);
    let (mut exact, mut formula, mut diag) = (true, 0.0f64, 0.0f64);
    for k in 0..1000 {
        let n = 1 + k % 3;
        let sys = structured(&mut r, n, true);
        let x: PhasePoint64 = point(&mut r, n, 1.0);
        let gs = gradient(sys.structural(), &x).unwrap();
        for j in 0..n {
            let (z, zb) = (ScalarField::z(n, j), ScalarField::zbar(n, j));
            exact &= pb_complex(&z, &zb, &x).unwrap() == C::new(0.0, -2.0);
            let zj = x.z(j);
            let expected = -2.0 * I * (1.0 + zj * gs.dz[j] + zj.conj() * gs.dzbar[j]);
            formula = formula.max((gspb(&z, &zb, &sys, &x).unwrap() - expected).norm());
            diag = diag.max(gspb(&z, &z, &sys, &x).unwrap().norm()).max(gspb(&zb, &zb, &sys, &x).unwrap().norm());
        }
    }
    verdict(
        exact && formula < 1e-12 && diag < 1e-12,
        format!("{{z,zbar}}_PB = -2i exact: {exact}; gspb formula {formula:.3e}; {{z,z}}, {{zbar,zbar}} {diag:.3e} (tol 1e-12)"),
    )
}

fn decomposition_and_conservation() -> Outcome {
    let mut r = rng(4);
    let (mut split, mut chain, mut s_rate) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..1000 {
        let n = 1 + k % 3;
        let sys = structured(&mut r, n, true);
        let f = polynomial(&mut r, n, 4, 5);
        let x: PhasePoint64 = point(&mut r, n, 1.0);
        let h = sys.hamiltonian();
        // df/dt and w from the real-coordinate oracle
        let d = flow_derivatives(&f, &sys, &x).unwrap();
        split = split.max((gspb(&f, h, &sys, &x).unwrap() - (d.first + d.value * d.w)).norm());
        chain = chain.max(chain_rule_rate(h, &sys, &x, true).unwrap().norm());
        let s_val = eval(sys.structural(), &x).unwrap();
        s_rate = s_rate.max((gspb(sys.structural(), h, &sys, &x).unwrap() - (1.0 + s_val) * d.w).norm());
    }
    let ok = split < 1e-10 && chain < 1e-10 && s_rate < 1e-10;
    verdict(ok, format!("{{f,H}} = df/dt + f w {split:.3e}; {{H,H}} chain form {chain:.3e}; {{s,H}} = (1+s)w {s_rate:.3e} (tol 1e-10)"))
}

fn decay_laws() -> Outcome {
    let z0 = PhasePoint64::new(&[1.0], &[2.0]).unwrap();
    let traj = integrate_tghs(&oscillator("q1"), &z0, &StepperConfig64::rk4(1e-3, 2.0), &[]).unwrap();
    let report = monitor_report(&traj).unwrap();
    // plain trapezoid over the recorded samples, for comparison
    let (h0, mut integral, mut plain) = (traj.monitors[0].hamiltonian, 0.0, 0.0f64);
    for k in 1..traj.len() {
        let (a, b) = (&traj.monitors[k - 1], &traj.monitors[k]);
        integral += (traj.times[k] - traj.times[k - 1]) * (a.w + b.w) / 2.0;
        plain = plain.max((b.hamiltonian - h0 * (-integral).exp()).abs());
    }
    let eq = integrate_equilibrium(&z0, SDynamicsSource::Constant(0.5), &StepperConfig64::rk4(1e-3, 2.0)).unwrap();
    let mut eq_dev = 0.0f64;
    for (t, x) in eq.times.iter().zip(&eq.states) {
        eq_dev = eq_dev.max((x.z(0) - exponential_solution(z0.z(0), 0.5, *t)).norm());
    }
    verdict(
        report.max_decay_dev < 1e-6 && eq_dev < 1e-8,
        format!(
            "H decay dev {:.3e} (end-corrected trapezoid, tol 1e-6; plain trapezoid {plain:.3e}); z decay dev {eq_dev:.3e} (tol 1e-8)",
            report.max_decay_dev
        ),
    )
}

fn oscillator_error(step: f64) -> f64 {
    let z0 = PhasePoint64::new(&[1.0], &[0.5]).unwrap();
    let traj = integrate_tghs(&oscillator("0"), &z0, &StepperConfig64::rk4(step, PI), &[]).unwrap();
    let (t, last) = traj.last().unwrap();
    (last.z(0) - C::new(0.0, -t).exp() * z0.z(0)).norm()
}

fn oscillator_ground_truth() -> Outcome {
    let err = oscillator_error(1e-3);
    let ratio = oscillator_error(PI / 32.0) / oscillator_error(PI / 64.0);
    verdict(
        err < 1e-8 && (12.0..=20.0).contains(&ratio),
        format!("|z(pi) - e^(-i pi) z0| = {err:.3e} (tol 1e-8); halving ratio {ratio:.3} (range [12, 20])"),
    )
}

fn transcendental_fields(n: usize) -> Vec<ScalarField> {
    let mut texts = vec!["sin(q1)*exp(p1/2) + cos(q1*p1)".to_string(), "log(2 + q1^2 + p1^2) * p1^3".to_string()];
    if n > 1 {
        texts.push("exp(q1*q2) - sin(p2)^2 + q2/(3 + p1^2)".into());
    }
    if n > 2 {
        texts.push("cos(q3 + p2) * (q1 - p3)^2".into());
    }
    texts.iter().map(|t| parse_field(t, n).unwrap()).collect()
}

fn acceleration_identity() -> Outcome {
    let mut r = rng(7);
    let mut max = 0.0f64;
    for k in 0..200 {
        let n = 1 + k % 3;
        let sys = structured(&mut r, n, true);
        let mut fields = vec![polynomial(&mut r, n, 4, 5)];
        fields.extend(transcendental_fields(n));
        let x: PhasePoint64 = point(&mut r, n, 1.0);
        for f in &fields {
            let d = flow_derivatives(f, &sys, &x).unwrap();
            max = max.max((covariant_acceleration(f, &sys, &x).unwrap() - d.covariant_acceleration()).norm());
        }
    }
    let osc = oscillator("0");
    let q = parse_field("q1", 1).unwrap();
    let mut classical = 0.0f64;
    for _ in 0..200 {
        let x: PhasePoint64 = point(&mut r, 1, 2.0);
        classical = classical.max((covariant_acceleration(&q, &osc, &x).unwrap() + x.q()[0]).norm());
    }
    verdict(
        max < 1e-8 && classical < 1e-8,
        format!("200 points, max |diff| = {max:.3e}; s = 0 oscillator |D2q + q| = {classical:.3e} (tol 1e-8)"),
    )
}

fn ad_correctness() -> Outcome {
    let mut r = rng(8);
    let rel = |a: C, b: C| (a - b).norm() / b.norm().max(1.0);
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for k in 0..500 {
        let n = 1 + k % 3;
        let mut fields = vec![polynomial(&mut r, n, 4, 5)];
        fields.extend(transcendental_fields(n));
        let x: PhasePoint64 = point(&mut r, n, 1.0);
        for f in &fields {
            let (ad, fd) = (real_gradient(f, &x).unwrap(), fd_gradient(f, &x, 1e-5).unwrap());
            first = ad.iter().zip(&fd).fold(first, |m, (a, b)| m.max(rel(*a, *b)));
            let (ad, fd) = (second_derivatives(f, &x).unwrap(), fd_hessian(f, &x, 1e-5).unwrap());
            second = ad.entries().iter().zip(&fd).fold(second, |m, (a, b)| m.max(rel(*a, *b)));
        }
    }
    verdict(
        first < 1e-6 && second < 1e-4,
        format!("500 points, first partials {first:.3e} (tol 1e-6), second partials {second:.3e} (tol 1e-4)"),
    )
}

fn cli_determinism() -> Outcome {
    let scenario = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/default.json");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gchs"))
            .args(["check", "--seed", "42", "--count", "1000"])
            .arg(&scenario)
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    let identical = a.stdout == b.stdout;
    verdict(
        a.status.success() && b.status.success() && identical,
        format!("exit codes {:?}/{:?}, byte-identical reports: {identical}", a.status.code(), b.status.code()),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("classical reduction", classical_reduction),
        ("real/complex compatibility", real_complex_compatibility),
        ("coordinate brackets", coordinate_brackets),
        ("decomposition and conservation", decomposition_and_conservation),
        ("decay laws", decay_laws),
        ("oscillator ground truth", oscillator_ground_truth),
        ("acceleration identity", acceleration_identity),
        ("AD correctness", ad_correctness),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Time integration of the TGHS, the covariant-equilibrium flow `ż = −z·w`
//! and its perturbed form `ż = −z·w + h(t, z)`.
//!
//! All flows are advanced in real `(q, p)` variables. For flows driven by a
//! [`StructuredSystem`] the integrator records a [`Monitor`] at every sample.

use num_complex::Complex;

use crate::brackets::{gspb, StructuredSystem};
use crate::dynamics::{chain_rule_rate, real_velocity_ad, s_dynamics, s_dynamics_rate, tghs_velocity};
use crate::error::{Error, Result};
use crate::fields::{self, ScalarField};
use crate::phasespace::PhasePoint;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method<T> {
    /// Classical fixed-step fourth-order Runge–Kutta. The step is shrunk
    /// slightly so that a whole number of steps lands on `t_end`.
    Rk4 { step: T },
    /// Dormand–Prince 5(4) with PI step-size control.
    Rk45 { abs_tol: T, rel_tol: T },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig<T> {
    pub method: Method<T>,
    pub t_end: T,
    /// Record every `stride`-th step (the final state is always recorded).
    pub stride: usize,
    /// State norm treated as blow-up.
    pub blowup: T,
    pub max_steps: usize,
}

impl<T: Real> StepperConfig<T> {
    pub fn rk4(step: T, t_end: T) -> Self {
        Self { method: Method::Rk4 { step }, t_end, stride: 1, blowup: T::lit(1e12), max_steps: 50_000_000 }
    }

    pub fn rk45(t_end: T) -> Self {
        Self { method: Method::Rk45 { abs_tol: T::lit(1e-9), rel_tol: T::lit(1e-9) }, ..Self::rk4(T::lit(1e-3), t_end) }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: T| x.is_finite() && x > T::zero();
        match self.method {
            Method::Rk4 { step } if !positive(step) => return Err(Error::Config("step must be positive".into())),
            Method::Rk45 { abs_tol, rel_tol } if !positive(abs_tol) || !positive(rel_tol) => {
                return Err(Error::Config("tolerances must be positive".into()))
            }
            _ => {}
        }
        if !self.t_end.is_finite() || self.t_end < T::zero() {
            return Err(Error::Config("t_end must be finite and non-negative".into()));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if !positive(self.blowup) {
            return Err(Error::Config("blow-up threshold must be positive".into()));
        }
        Ok(())
    }
}

/// Quantities recorded alongside each sample of a system-driven flow.
#[derive(Clone, Debug, PartialEq)]
pub struct Monitor<T> {
    pub hamiltonian: T,
    pub w: T,
    /// Quadrature of `w` from 0 to the sample time: the trapezoid rule over
    /// every step with the endpoint-derivative correction `−h²/12·Δẇ`.
    pub w_integral: T,
    /// `|H(t) − H(0)·exp(−∫w)|`
    pub decay_dev: T,
    /// `|{H,H}|`
    pub hh_bracket: T,
    /// `|Σ (dz̄/dt·DH/∂z̄ + dz/dt·DH/∂z)|`
    pub hh_chain: T,
    /// `maxⱼ |dz̄ʲ/dt − conj(dzʲ/dt)|`
    pub conj_violation: T,
    pub observables: Vec<Complex<T>>,
    /// `{f,H}` per observable.
    pub residuals: Vec<Complex<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<PhasePoint<T>>,
    /// One per sample for system-driven flows, empty otherwise.
    pub monitors: Vec<Monitor<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(T, &PhasePoint<T>)> {
        self.times.last().copied().zip(self.states.last())
    }
}

/// Where the S-dynamics driving `ż = −z·w` comes from.
#[derive(Clone, Copy, Debug)]
pub enum SDynamicsSource<'a, T> {
    Constant(T),
    System(&'a StructuredSystem),
}

struct Tracker<'a, T> {
    sys: &'a StructuredSystem,
    observables: &'a [ScalarField],
    h0: T,
    integral: T,
    last: Option<(T, T, T)>,
}

impl<'a, T: Real> Tracker<'a, T> {
    fn new(sys: &'a StructuredSystem, observables: &'a [ScalarField]) -> Self {
        Self { sys, observables, h0: T::zero(), integral: T::zero(), last: None }
    }

    /// Advances the running quadrature of `w` to `(t, pt)`.
    fn step(&mut self, t: T, pt: &PhasePoint<T>) -> Result<T> {
        let (w, dw) = s_dynamics_rate(self.sys, pt)?;
        match self.last {
            None => self.h0 = fields::eval(self.sys.hamiltonian(), pt)?.re,
            Some((t_prev, w_prev, dw_prev)) => {
                let h = t - t_prev;
                let trap = h * (w + w_prev) * T::lit(0.5);
                self.integral = self.integral + trap - h * h * (dw - dw_prev) / T::lit(12.0);
            }
        }
        self.last = Some((t, w, dw));
        Ok(w)
    }

    fn record(&self, w: T, pt: &PhasePoint<T>) -> Result<Monitor<T>> {
        let h = self.sys.hamiltonian();
        let hamiltonian = fields::eval(h, pt)?.re;
        let vel = tghs_velocity(self.sys, pt)?;
        let conj_violation = vel.dz.iter().zip(&vel.dzbar).fold(T::zero(), |m, (a, b)| m.max((b - a.conj()).norm()));
        let observables = self.observables.iter().map(|f| fields::eval(f, pt)).collect::<Result<_>>()?;
        let residuals = self.observables.iter().map(|f| gspb(f, h, self.sys, pt)).collect::<Result<_>>()?;
        Ok(Monitor {
            hamiltonian,
            w,
            w_integral: self.integral,
            decay_dev: (hamiltonian - self.h0 * (-self.integral).exp()).abs(),
            hh_bracket: gspb(h, h, self.sys, pt)?.norm(),
            hh_chain: chain_rule_rate(h, self.sys, pt, true)?.norm(),
            conj_violation,
            observables,
            residuals,
        })
    }
}

fn as_f64<T: Real>(t: T) -> f64 {
    t.to_f64().unwrap_or(f64::NAN)
}

fn check_state<T: Real>(t: T, y: &[T], blowup: T) -> Result<()> {
    let norm = y.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
    if !norm.is_finite() || norm > blowup {
        return Err(Error::BlowUp { t: as_f64(t) });
    }
    Ok(())
}

/// Runs the configured stepper. `on_step(t, y, sample)` is called for the
/// initial state and after every accepted step.
fn drive<T, F, O>(y0: Vec<T>, cfg: &StepperConfig<T>, mut rhs: F, mut on_step: O) -> Result<()>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
    O: FnMut(T, &[T], bool) -> Result<()>,
{
    cfg.validate()?;
    check_state(T::zero(), &y0, cfg.blowup)?;
    on_step(T::zero(), &y0, true)?;
    if cfg.t_end == T::zero() {
        return Ok(());
    }
    match cfg.method {
        Method::Rk4 { step } => rk4(y0, cfg, step, &mut rhs, &mut on_step),
        Method::Rk45 { abs_tol, rel_tol } => dopri5(y0, cfg, abs_tol, rel_tol, &mut rhs, &mut on_step),
    }
}

fn axpy<T: Real>(out: &mut [T], y: &[T], h: T, terms: &[(&[T], T)]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = y[i] + h * terms.iter().fold(T::zero(), |acc, (k, c)| acc + *c * k[i]);
    }
}

fn rk4<T, F, O>(mut y: Vec<T>, cfg: &StepperConfig<T>, step: T, rhs: &mut F, on_step: &mut O) -> Result<()>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
    O: FnMut(T, &[T], bool) -> Result<()>,
{
    let steps = ((cfg.t_end / step) - T::lit(1e-9)).ceil().max(T::one()).to_usize().unwrap_or(usize::MAX);
    if steps > cfg.max_steps {
        return Err(Error::TooManySteps { t: 0.0 });
    }
    let h = cfg.t_end / T::from_usize(steps).expect("step count representable");
    let m = y.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m]);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let third = T::one() / T::lit(3.0);
    for k in 0..steps {
        let t = h * T::from_usize(k).expect("index representable");
        rhs(t, &y, &mut k1)?;
        axpy(&mut tmp, &y, h * half, &[(&k1, T::one())]);
        rhs(t + h * half, &tmp, &mut k2)?;
        axpy(&mut tmp, &y, h * half, &[(&k2, T::one())]);
        rhs(t + h * half, &tmp, &mut k3)?;
        axpy(&mut tmp, &y, h, &[(&k3, T::one())]);
        rhs(t + h, &tmp, &mut k4)?;
        axpy(&mut tmp, &y, h, &[(&k1, sixth), (&k2, third), (&k3, third), (&k4, sixth)]);
        std::mem::swap(&mut y, &mut tmp);
        let t_next = if k + 1 == steps { cfg.t_end } else { t + h };
        check_state(t_next, &y, cfg.blowup)?;
        on_step(t_next, &y, (k + 1).is_multiple_of(cfg.stride) || k + 1 == steps)?;
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

fn dopri5<T, F, O>(mut y: Vec<T>, cfg: &StepperConfig<T>, atol: T, rtol: T, rhs: &mut F, on_step: &mut O) -> Result<()>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
    O: FnMut(T, &[T], bool) -> Result<()>,
{
    let m = y.len();
    let lit = T::lit;
    let (safety, fac_min, fac_max, beta) = (lit(0.9), lit(0.2), lit(10.0), lit(0.04));
    let alpha = lit(0.2) - beta * lit(0.75);
    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); m]; 7];
    let mut stage = vec![T::zero(); m];
    let mut t = T::zero();
    rhs(t, &y, &mut k[0])?;

    let rms = |v: &[T]| (v.iter().fold(T::zero(), |a, &x| a + x * x) / T::from_usize(m.max(1)).unwrap()).sqrt();
    let scale0: Vec<T> = y.iter().map(|&v| atol + rtol * v.abs()).collect();
    let d0 = rms(&y.iter().zip(&scale0).map(|(a, s)| *a / *s).collect::<Vec<_>>());
    let d1 = rms(&k[0].iter().zip(&scale0).map(|(a, s)| *a / *s).collect::<Vec<_>>());
    let mut h = if d0 < lit(1e-5) || d1 < lit(1e-5) { lit(1e-6) } else { lit(0.01) * d0 / d1 };
    h = h.min(cfg.t_end);

    let mut err_old = lit(1e-4);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while t < cfg.t_end {
        attempts += 1;
        if attempts > cfg.max_steps {
            return Err(Error::TooManySteps { t: as_f64(t) });
        }
        let last = t + h >= cfg.t_end;
        if last {
            h = cfg.t_end - t;
        }
        if h <= T::epsilon() * lit(16.0) * t.abs().max(T::one()) {
            return Err(Error::StepUnderflow { t: as_f64(t) });
        }
        for s in 1..7 {
            for i in 0..m {
                let inc = (0..s).fold(T::zero(), |acc, j| acc + lit(A[s][j]) * k[j][i]);
                stage[i] = y[i] + h * inc;
            }
            rhs(t + h * lit(C[s]), &stage, &mut k[s])?;
        }
        // stage now holds the fifth-order solution (row 6 of A is the b row)
        let mut err_sum = T::zero();
        for i in 0..m {
            let e = h * (0..7).fold(T::zero(), |acc, j| acc + lit(E[j]) * k[j][i]);
            let sc = atol + rtol * y[i].abs().max(stage[i].abs());
            err_sum = err_sum + (e / sc) * (e / sc);
        }
        let err = (err_sum / T::from_usize(m).unwrap()).sqrt();
        if !err.is_finite() {
            return Err(Error::BlowUp { t: as_f64(t + h) });
        }
        if err <= T::one() {
            t = if last { cfg.t_end } else { t + h };
            y.copy_from_slice(&stage);
            k.swap(0, 6);
            accepted += 1;
            check_state(t, &y, cfg.blowup)?;
            on_step(t, &y, accepted.is_multiple_of(cfg.stride) || t >= cfg.t_end)?;
            let err_c = err.max(lit(1e-10));
            let fac = safety * err_c.powf(-alpha) * err_old.powf(beta);
            h = h * fac.max(fac_min).min(fac_max);
            err_old = err_c;
        } else {
            let fac = safety * err.powf(-alpha);
            h = h * fac.max(fac_min).min(T::one());
        }
    }
    Ok(())
}

fn collect<T: Real>(
    y0: &PhasePoint<T>,
    cfg: &StepperConfig<T>,
    mut tracker: Option<Tracker<'_, T>>,
    rhs: impl FnMut(T, &[T], &mut [T]) -> Result<()>,
) -> Result<Trajectory<T>> {
    let mut traj = Trajectory { times: Vec::new(), states: Vec::new(), monitors: Vec::new() };
    drive(y0.coords().to_vec(), cfg, rhs, |t, y, sample| {
        let pt = PhasePoint::from_coords(y.to_vec()).map_err(|_| Error::BlowUp { t: as_f64(t) })?;
        if let Some(tr) = tracker.as_mut() {
            let w = tr.step(t, &pt)?;
            if sample {
                traj.monitors.push(tr.record(w, &pt)?);
            }
        }
        if sample {
            traj.times.push(t);
            traj.states.push(pt);
        }
        Ok(())
    })?;
    Ok(traj)
}

fn lift_state<T: Real>(y: &[T]) -> Vec<Complex<T>> {
    y.iter().map(|&v| Complex::new(v, T::zero())).collect()
}

/// Integrates the TGHS `żʲ = −2i·DH/∂z̄ʲ` from `z0`, monitoring the given
/// observables.
pub fn integrate_tghs<T: Real>(
    sys: &StructuredSystem,
    z0: &PhasePoint<T>,
    cfg: &StepperConfig<T>,
    observables: &[ScalarField],
) -> Result<Trajectory<T>> {
    check_dims(sys.dim(), z0, observables)?;
    collect(z0, cfg, Some(Tracker::new(sys, observables)), |_, y, dy| {
        let v = real_velocity_ad(sys, &lift_state(y))?;
        for (d, v) in dy.iter_mut().zip(v) {
            *d = v.re;
        }
        Ok(())
    })
}

fn check_dims<T: Real>(n: usize, z0: &PhasePoint<T>, fields: &[ScalarField]) -> Result<()> {
    if z0.dim() != n {
        return Err(Error::Arity { expected: n, got: z0.dim() });
    }
    if let Some(f) = fields.iter().find(|f| f.dim() != n) {
        return Err(Error::Arity { expected: n, got: f.dim() });
    }
    Ok(())
}

fn equilibrium_rhs<T: Real>(source: SDynamicsSource<'_, T>, y: &[T], dy: &mut [T]) -> Result<()> {
    let w = match source {
        SDynamicsSource::Constant(w0) => w0,
        SDynamicsSource::System(sys) => s_dynamics(sys, &PhasePoint::from_coords(y.to_vec())?)?,
    };
    for (d, &v) in dy.iter_mut().zip(y) {
        *d = -v * w;
    }
    Ok(())
}

fn source_tracker<'a, T: Real>(source: SDynamicsSource<'a, T>, z0: &PhasePoint<T>) -> Result<Option<Tracker<'a, T>>> {
    match source {
        SDynamicsSource::Constant(_) => Ok(None),
        SDynamicsSource::System(sys) => {
            check_dims(sys.dim(), z0, &[])?;
            Ok(Some(Tracker::new(sys, &[])))
        }
    }
}

/// Integrates the covariant-equilibrium flow `żʲ = −zʲ·w`.
pub fn integrate_equilibrium<T: Real>(
    z0: &PhasePoint<T>,
    source: SDynamicsSource<'_, T>,
    cfg: &StepperConfig<T>,
) -> Result<Trajectory<T>> {
    let tracker = source_tracker(source, z0)?;
    collect(z0, cfg, tracker, |_, y, dy| equilibrium_rhs(source, y, dy))
}

/// Integrates `żʲ = −zʲ·w + hʲ(t, z)`; `h` holds one (possibly
/// time-dependent) field per coordinate.
pub fn integrate_perturbed<T: Real>(
    z0: &PhasePoint<T>,
    source: SDynamicsSource<'_, T>,
    h: &[ScalarField],
    cfg: &StepperConfig<T>,
) -> Result<Trajectory<T>> {
    let n = z0.dim();
    if h.len() != n {
        return Err(Error::Arity { expected: n, got: h.len() });
    }
    check_dims(n, z0, h)?;
    let tracker = source_tracker(source, z0)?;
    collect(z0, cfg, tracker, |t, y, dy| {
        equilibrium_rhs(source, y, dy)?;
        let pt = PhasePoint::from_coords(y.to_vec())?;
        for (j, hj) in h.iter().enumerate() {
            let v = fields::eval_with_time(hj, t, &pt)?;
            dy[j] = dy[j] + v.re;
            dy[n + j] = dy[n + j] + v.im;
        }
        Ok(())
    })
}

/// Summary statistics of the covariant residual `{f,H}` of one observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualStats<T> {
    pub max: T,
    pub mean: T,
    pub last: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonitorReport<T> {
    pub samples: usize,
    pub t_end: T,
    pub max_hh_bracket: T,
    pub max_hh_chain: T,
    pub max_decay_dev: T,
    pub max_conj_violation: T,
    /// `max |H(t) − H(0)|`
    pub max_energy_drift: T,
    pub w_min: T,
    pub w_max: T,
    pub residuals: Vec<ResidualStats<T>>,
}

pub fn monitor_report<T: Real>(traj: &Trajectory<T>) -> Result<MonitorReport<T>> {
    let first = traj.monitors.first().ok_or_else(|| Error::Config("trajectory carries no monitors".into()))?;
    let fold = |get: fn(&Monitor<T>) -> T| traj.monitors.iter().map(get).fold(T::zero(), T::max);
    let h0 = first.hamiltonian;
    let count = T::from_usize(traj.monitors.len()).expect("count representable");
    let residuals = (0..first.residuals.len())
        .map(|k| {
            let mags = traj.monitors.iter().map(|m| m.residuals[k].norm());
            ResidualStats {
                max: mags.clone().fold(T::zero(), T::max),
                mean: mags.clone().fold(T::zero(), |a, b| a + b) / count,
                last: mags.last().unwrap_or_else(T::zero),
            }
        })
        .collect();
    Ok(MonitorReport {
        samples: traj.monitors.len(),
        t_end: traj.times.last().copied().unwrap_or_else(T::zero),
        max_hh_bracket: fold(|m| m.hh_bracket),
        max_hh_chain: fold(|m| m.hh_chain),
        max_decay_dev: fold(|m| m.decay_dev),
        max_conj_violation: fold(|m| m.conj_violation),
        max_energy_drift: traj.monitors.iter().map(|m| (m.hamiltonian - h0).abs()).fold(T::zero(), T::max),
        w_min: traj.monitors.iter().map(|m| m.w).fold(T::infinity(), T::min),
        w_max: traj.monitors.iter().map(|m| m.w).fold(T::neg_infinity(), T::max),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::exponential_solution;
    use crate::fields::{parse_field, parse_time_field};

    const OSC: &str = "(q1^2 + p1^2)/2";

    fn sys(s: &str) -> StructuredSystem {
        StructuredSystem::new(parse_field(OSC, 1).unwrap(), parse_field(s, 1).unwrap()).unwrap()
    }

    fn pt(q: f64, p: f64) -> PhasePoint<f64> {
        PhasePoint::new(&[q], &[p]).unwrap()
    }

    #[test]
    fn oscillator_half_turn() {
        let traj =
            integrate_tghs(&sys("0"), &pt(1.0, 0.0), &StepperConfig::rk4(1e-3, std::f64::consts::PI), &[]).unwrap();
        let (t, last) = traj.last().unwrap();
        assert_eq!(t, std::f64::consts::PI);
        assert!((last.z(0) - Complex::new(-1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn zero_horizon_gives_single_sample() {
        let z0 = pt(0.3, 0.4);
        let traj = integrate_tghs(&sys("q1"), &z0, &StepperConfig::rk4(1e-3, 0.0), &[]).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.states[0], z0);
        assert_eq!(traj.monitors.len(), 1);
    }

    #[test]
    fn decay_law_along_structured_flow() {
        let traj = integrate_tghs(&sys("q1"), &pt(1.0, 2.0), &StepperConfig::rk4(1e-3, 2.0), &[]).unwrap();
        let report = monitor_report(&traj).unwrap();
        assert!(report.max_decay_dev < 1e-6, "{report:?}");
        assert!(report.max_hh_bracket < 1e-10);
        assert!(report.max_hh_chain < 1e-10);
        assert!(report.max_conj_violation < 1e-12);
    }

    #[test]
    fn stride_keeps_final_sample() {
        let cfg = StepperConfig::rk4(0.1, 1.05).with_stride(4);
        let traj = integrate_tghs(&sys("0"), &pt(1.0, 0.0), &cfg, &[]).unwrap();
        // 11 steps of 1.05/11: samples at 0, 4, 8 and the final step
        assert_eq!(traj.len(), 4);
        assert_eq!(*traj.times.last().unwrap(), 1.05);
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn equilibrium_matches_closed_form() {
        for w0 in [0.5, -0.5, 0.0] {
            for cfg in [StepperConfig::rk4(1e-3, 1.0), StepperConfig::rk45(1.0)] {
                let traj = integrate_equilibrium(&pt(1.0, 0.0), SDynamicsSource::Constant(w0), &cfg).unwrap();
                for (t, s) in traj.times.iter().zip(&traj.states) {
                    let want = exponential_solution(Complex::new(1.0, 0.0), w0, *t);
                    assert!((s.z(0) - want).norm() < 1e-8, "w0 = {w0}, t = {t}");
                }
            }
        }
    }

    #[test]
    fn perturbed_flows() {
        let cfg = StepperConfig::rk4(1e-3, 1.0);
        let z0 = pt(0.4, -0.1);
        let zero = [parse_time_field("0", 1).unwrap()];
        let a = integrate_perturbed(&z0, SDynamicsSource::Constant(0.5), &zero, &cfg).unwrap();
        let b = integrate_equilibrium(&z0, SDynamicsSource::Constant(0.5), &cfg).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((x.z(0) - y.z(0)).norm() < 1e-12);
        }

        let c = [parse_time_field("0.3 - 0.2*i", 1).unwrap()];
        let traj = integrate_perturbed(&z0, SDynamicsSource::Constant(0.0), &c, &cfg).unwrap();
        let (t, last) = traj.last().unwrap();
        assert!((last.z(0) - (z0.z(0) + Complex::new(0.3, -0.2) * t)).norm() < 1e-8);

        let s = [parse_time_field("sin(t)", 1).unwrap()];
        let traj = integrate_perturbed(&pt(0.0, 0.0), SDynamicsSource::Constant(0.0), &s, &cfg).unwrap();
        for (t, st) in traj.times.iter().zip(&traj.states) {
            assert!((st.z(0) - Complex::new(1.0 - t.cos(), 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn blow_up_is_reported_with_time() {
        let mut cfg = StepperConfig::rk4(1e-2, 10.0);
        cfg.blowup = 100.0;
        let err = integrate_equilibrium(&pt(1.0, 0.0), SDynamicsSource::Constant(-1.0), &cfg).unwrap_err();
        match err {
            Error::BlowUp { t } => assert!((t - 100f64.ln()).abs() < 0.02, "t = {t}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = StepperConfig::rk4(0.0, 1.0);
        assert!(cfg.validate().is_err());
        cfg = StepperConfig::rk4(0.1, -1.0);
        assert!(cfg.validate().is_err());
        cfg = StepperConfig::rk4(0.1, 1.0).with_stride(0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn adaptive_oscillator() {
        let traj = integrate_tghs(&sys("0"), &pt(1.0, 0.0), &StepperConfig::rk45(std::f64::consts::PI), &[]).unwrap();
        let (_, last) = traj.last().unwrap();
        assert!((last.z(0) - Complex::new(-1.0, 0.0)).norm() < 1e-7);
        assert!(traj.len() < 1000);
    }

    #[test]
    fn report_requires_monitors() {
        let traj = integrate_equilibrium(&pt(1.0, 0.0), SDynamicsSource::Constant(0.1), &StepperConfig::rk4(0.1, 1.0))
            .unwrap();
        assert!(traj.monitors.is_empty());
        assert!(monitor_report(&traj).is_err());
    }
}

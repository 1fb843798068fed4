//! Reference computations that avoid the complex-coordinate engine.
//!
//! Finite differences use nothing but field evaluation. The second-order flow
//! quantities are assembled from real gradients and Hessians in `(q, p)`.

use gchs::{eval, gradient, second_derivatives, Complex, PhasePoint64, Result, ScalarField, StructuredSystem};

type C = Complex<f64>;

fn shifted(x: &PhasePoint64, moves: &[(usize, f64)]) -> Result<PhasePoint64> {
    let mut c = x.coords().to_vec();
    for &(a, d) in moves {
        c[a] += d;
    }
    PhasePoint64::from_coords(c)
}

/// Central differences `∂f/∂x_a` over the real coordinates `[q.., p..]`.
pub fn fd_gradient(f: &ScalarField, x: &PhasePoint64, h: f64) -> Result<Vec<C>> {
    (0..x.coords().len())
        .map(|a| {
            let up = eval(f, &shifted(x, &[(a, h)])?)?;
            let down = eval(f, &shifted(x, &[(a, -h)])?)?;
            Ok((up - down) / (2.0 * h))
        })
        .collect()
}

/// Central differences for all second partials, row-major over `[q.., p..]`.
pub fn fd_hessian(f: &ScalarField, x: &PhasePoint64, h: f64) -> Result<Vec<C>> {
    let m = x.coords().len();
    let mut out = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            let at = |da: f64, db: f64| eval(f, &shifted(x, &[(a, da), (b, db)])?);
            let v = (at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?) / (4.0 * h * h);
            out.push(v);
        }
    }
    Ok(out)
}

/// Real partials `[∂q.., ∂p..]` recovered from the Wirtinger gradient.
pub fn real_gradient(f: &ScalarField, x: &PhasePoint64) -> Result<Vec<C>> {
    let g = gradient(f, x)?;
    let i = C::new(0.0, 1.0);
    let dq = g.dz.iter().zip(&g.dzbar).map(|(a, b)| a + b);
    let dp: Vec<C> = g.dz.iter().zip(&g.dzbar).map(|(a, b)| i * (a - b)).collect();
    Ok(dq.chain(dp).collect())
}

struct Local {
    value: C,
    grad: Vec<C>,
    hess: Vec<C>,
}

fn local(f: &ScalarField, x: &PhasePoint64) -> Result<Local> {
    Ok(Local { value: eval(f, x)?, grad: real_gradient(f, x)?, hess: second_derivatives(f, x)?.entries().to_vec() })
}

/// Flow derivatives of `f` along the TGHS, built in real coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowDerivatives {
    pub value: C,
    /// `df/dt`
    pub first: C,
    /// `d²f/dt²`
    pub second: C,
    pub w: f64,
    /// `dw/dt + w²`
    pub beta: f64,
}

impl FlowDerivatives {
    /// `d²f/dt² + 2w·df/dt + f·β`
    pub fn covariant_acceleration(&self) -> C {
        self.second + self.first * (2.0 * self.w) + self.value * self.beta
    }
}

pub fn flow_derivatives(f: &ScalarField, sys: &StructuredSystem, x: &PhasePoint64) -> Result<FlowDerivatives> {
    let n = x.dim();
    let m = 2 * n;
    let (h, s, f) = (local(sys.hamiltonian(), x)?, local(sys.structural(), x)?, local(f, x)?);
    let hv = h.value;
    // q̇ = H_p + H s_p,  ṗ = −H_q − H s_q
    let mut v = vec![C::new(0.0, 0.0); m];
    let mut jac = vec![C::new(0.0, 0.0); m * m];
    for j in 0..n {
        let (qj, pj) = (j, n + j);
        v[qj] = h.grad[pj] + hv * s.grad[pj];
        v[pj] = -(h.grad[qj] + hv * s.grad[qj]);
        for a in 0..m {
            jac[qj * m + a] = h.hess[pj * m + a] + h.grad[a] * s.grad[pj] + hv * s.hess[pj * m + a];
            jac[pj * m + a] = -(h.hess[qj * m + a] + h.grad[a] * s.grad[qj] + hv * s.hess[qj * m + a]);
        }
    }
    let dot = |a: &[C], b: &[C]| a.iter().zip(b).fold(C::new(0.0, 0.0), |acc, (x, y)| acc + x * y);
    let matvec = |mat: &[C], b: &[C]| (0..m).map(|r| dot(&mat[r * m..(r + 1) * m], b)).collect::<Vec<_>>();

    let first = dot(&f.grad, &v);
    let second = dot(&v, &matvec(&f.hess, &v)) + dot(&f.grad, &matvec(&jac, &v));
    // w = Σ (s_q H_p − s_p H_q)
    let mut w = C::new(0.0, 0.0);
    let mut grad_w = vec![C::new(0.0, 0.0); m];
    for j in 0..n {
        let (qj, pj) = (j, n + j);
        w += s.grad[qj] * h.grad[pj] - s.grad[pj] * h.grad[qj];
        for (a, gw) in grad_w.iter_mut().enumerate() {
            *gw += s.hess[qj * m + a] * h.grad[pj] + s.grad[qj] * h.hess[pj * m + a]
                - s.hess[pj * m + a] * h.grad[qj]
                - s.grad[pj] * h.hess[qj * m + a];
        }
    }
    let dw = dot(&grad_w, &v);
    Ok(FlowDerivatives { value: f.value, first, second, w: w.re, beta: dw.re + w.re * w.re })
}

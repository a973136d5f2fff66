//! Independent reference solutions: adaptive Runge-Kutta integration of the
//! oscillator in `(q, p)` and in `(ψ, 𝓘)`, plus adaptive quadrature.
//!
//! Everything else in the crate is validated against this module. The
//! stepper is the Dormand-Prince 5(4) embedded pair with PI step control
//! and the standard 5-coefficient dense output.

use alloc::vec::Vec;
use core::fmt;

// method syntax for the float transcendentals in the no_std build
#[allow(unused_imports)]
use num_traits::Float;

use crate::angle_action::{self, AngleActionState};
use crate::frequency::Profile;

/// Oscillator state in canonical coordinates at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub q: f64,
    pub p: f64,
}

impl PhaseState {
    /// H(q, p; t) = (p² + ω²q²)/2 for the given ω = ω(t).
    pub fn hamiltonian(&self, omega: f64) -> f64 {
        0.5 * (self.p * self.p + omega * omega * self.q * self.q)
    }
}

/// Integration and quadrature failures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleError {
    /// Step size shrank below machine resolution at `t`.
    StepUnderflow { t: f64 },
    /// Step budget exhausted before reaching the end of the interval.
    MaxSteps { t: f64 },
    /// Adaptive quadrature hit its refinement limit; `achieved` is the
    /// remaining error estimate, `requested` the target.
    QuadratureNonConvergence { achieved: f64, requested: f64 },
    /// Tolerance or interval arguments out of range.
    BadInput,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StepUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            Self::MaxSteps { t } => write!(f, "maximum step count exceeded at t = {t}"),
            Self::QuadratureNonConvergence { achieved, requested } => write!(
                f,
                "quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}"
            ),
            Self::BadInput => write!(f, "invalid integration parameters"),
        }
    }
}

impl core::error::Error for OracleError {}

/// Options for the adaptive stepper.
#[derive(Clone, Copy, Debug)]
pub struct IntegOptions {
    /// Local error tolerance (used as both absolute and relative).
    pub tol: f64,
    /// Hard cap on the step size; bounds the dense-output error directly.
    pub h_max: f64,
    /// Step budget.
    pub max_steps: usize,
}

impl Default for IntegOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 4_000_000,
        }
    }
}

impl IntegOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Error coefficients (5th minus embedded 4th order).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output coefficients.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Clone, Copy, Debug)]
struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let s = if self.h == 0.0 {
            0.0
        } else {
            (t - self.t0) / self.h
        };
        let s1 = 1.0 - s;
        let mut y = [0.0; N];
        for i in 0..N {
            let c = &self.cont;
            y[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        }
        y
    }
}

/// Dense-output trajectory of one adaptive integration.
#[derive(Clone, Debug)]
pub struct Trajectory<const N: usize> {
    steps: Vec<DenseStep<N>>,
    t_start: f64,
    t_end: f64,
    y_end: [f64; N],
    tol: f64,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_evals: usize,
}

impl<const N: usize> Trajectory<N> {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }
    pub fn t_end(&self) -> f64 {
        self.t_end
    }
    pub fn y_end(&self) -> [f64; N] {
        self.y_end
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Accepted step boundary times, in integration order.
    pub fn times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.steps.iter().map(|s| s.t0).collect();
        ts.push(self.t_end);
        ts
    }

    /// Dense-output evaluation; `t` is clamped to the integration span.
    pub fn eval(&self, t: f64) -> [f64; N] {
        debug_assert!(!self.steps.is_empty());
        let dir = (self.t_end - self.t_start).signum();
        // binary search for the step whose span contains t
        let mut lo = 0usize;
        let mut hi = self.steps.len() - 1;
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if (t - self.steps[mid].t0) * dir >= 0.0 {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        self.steps[lo].eval(t)
    }
}

/// Hairer's starting-step heuristic for an order-5 method.
fn initial_step<const N: usize, F>(
    rhs: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    tol: f64,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let sk = |y: &[f64; N], i: usize| tol + tol * y[i].abs();
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for i in 0..N {
        d0 += (y0[i] / sk(y0, i)).powi(2);
        d1 += (f0[i] / sk(y0, i)).powi(2);
    }
    d0 = (d0 / N as f64).sqrt();
    d1 = (d1 / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y0[i] + h0 * dir * f0[i];
    }
    let f1 = rhs(t0 + h0 * dir, &y1);
    let mut d2 = 0.0f64;
    for i in 0..N {
        d2 += ((f1[i] - f0[i]) / sk(y0, i)).powi(2);
    }
    d2 = (d2 / N as f64).sqrt() / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Integrate `dy/dt = rhs(t, y)` from `t0` to `t1` (either direction) with
/// dense output. Local error is controlled at `opts.tol` by the embedded
/// 5(4) pair with PI stabilisation.
pub fn integrate<const N: usize, F>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &IntegOptions,
) -> Result<Trajectory<N>, OracleError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(opts.tol > 0.0) || !t0.is_finite() || !t1.is_finite() {
        return Err(OracleError::BadInput);
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut traj = Trajectory {
        steps: Vec::new(),
        t_start: t0,
        t_end: t0,
        y_end: y0,
        tol: opts.tol,
        n_accepted: 0,
        n_rejected: 0,
        n_evals: 1,
    };
    if span == 0.0 {
        traj.steps.push(DenseStep {
            t0,
            h: 0.0,
            cont: [y0, [0.0; N], [0.0; N], [0.0; N], [0.0; N]],
        });
        return Ok(traj);
    }

    let mut t = t0;
    let mut y = y0;
    let mut f = rhs(t, &y);
    let mut h = initial_step(&rhs, t, &y, &f, dir, opts.tol)
        .min(opts.h_max)
        .min(span);
    let mut facold = 1e-4f64;
    let expo1 = 0.2 - 0.04 * 0.75;
    let (safe, fac1, fac2) = (0.9, 0.2, 10.0);

    let mut steps = 0usize;
    loop {
        if steps >= opts.max_steps {
            return Err(OracleError::MaxSteps { t });
        }
        steps += 1;
        // don't overshoot
        if (t + dir * h - t1) * dir > 0.0 {
            h = (t1 - t) * dir;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(OracleError::StepUnderflow { t });
        }

        // stages
        let mut k = [[0.0; N]; 7];
        k[0] = f;
        for s in 1..7 {
            let mut ys = y;
            for j in 0..s {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += dir * h * a * k[j][i];
                    }
                }
            }
            k[s] = rhs(t + dir * h * C[s], &ys);
        }
        traj.n_evals += 6;
        // stage 7 state (A[6] row) is the 5th-order solution
        let mut y_new = y;
        for j in 0..6 {
            let a = A[6][j];
            if a != 0.0 {
                for i in 0..N {
                    y_new[i] += dir * h * a * k[j][i];
                }
            }
        }

        // error estimate
        let mut err = 0.0f64;
        for i in 0..N {
            let sk = opts.tol + opts.tol * y[i].abs().max(y_new[i].abs());
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            err += (dir * h * e / sk).powi(2);
        }
        err = (err / N as f64).sqrt();

        if !err.is_finite() {
            // state blew up inside the step; retry with a much smaller one
            traj.n_rejected += 1;
            h *= 0.1;
            continue;
        }

        let fac11 = err.powf(expo1);
        let fac = (fac11 / facold.powf(0.04)).max(1.0 / fac2).min(1.0 / fac1) / safe;
        let mut h_new = h / fac;

        if err <= 1.0 {
            // accept
            facold = err.max(1e-4);
            let f_new = k[6];
            let mut cont = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = dir * h * k[0][i] - ydiff;
                cont[0][i] = y[i];
                cont[1][i] = ydiff;
                cont[2][i] = bspl;
                cont[3][i] = ydiff - dir * h * f_new[i] - bspl;
                let mut dsum = 0.0;
                for j in 0..7 {
                    dsum += D[j] * k[j][i];
                }
                cont[4][i] = dir * h * dsum;
            }
            traj.steps.push(DenseStep {
                t0: t,
                h: dir * h,
                cont,
            });
            traj.n_accepted += 1;

            t += dir * h;
            y = y_new;
            f = f_new; // FSAL
            if (t - t1) * dir >= -1e-14 * t1.abs().max(1.0) {
                traj.t_end = t1;
                traj.y_end = y;
                return Ok(traj);
            }
        } else {
            traj.n_rejected += 1;
            h_new = h / (fac11 / safe).min(1.0 / fac1);
        }
        h = h_new.min(opts.h_max).abs();
    }
}

// ---------------------------------------------------------------------------
// Oscillator-specific integrations
// ---------------------------------------------------------------------------

/// Cap the step size so that the 5th-order dense output stays accurate to
/// about the local tolerance between accepted steps (the controller alone
/// only guarantees that at step endpoints).
fn dense_capped<P: Profile + ?Sized>(
    profile: &P,
    t0: f64,
    t1: f64,
    opts: &IntegOptions,
) -> IntegOptions {
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let w_max = crate::util::sample_sup_abs(|t| profile.omega(t), lo, hi, 128).max(1e-3);
    let cap = 1.5 * opts.tol.powf(0.2) / w_max;
    IntegOptions {
        h_max: opts.h_max.min(cap),
        ..*opts
    }
}

fn split_points<P: Profile + ?Sized>(profile: &P, t0: f64, t1: f64) -> Vec<f64> {
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let mut ds: Vec<f64> = profile
        .discontinuities()
        .iter()
        .copied()
        .filter(|&d| d > lo && d < hi)
        .collect();
    ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if t0 > t1 {
        ds.reverse();
    }
    ds
}

/// One-sided limits (ω₋, ω₊) of ω at a declared jump instant.
pub fn jump_limits<P: Profile + ?Sized>(profile: &P, t_d: f64) -> (f64, f64) {
    let eps = 1e-9 * t_d.abs().max(1.0);
    (profile.omega(t_d - eps), profile.omega(t_d))
}

/// Piecewise dense trajectory in `(q, p)`, split at declared jumps of ω
/// (where `q` and `p` stay continuous).
#[derive(Clone, Debug)]
pub struct QpTrajectory {
    pieces: Vec<Trajectory<2>>,
    tol: f64,
}

impl QpTrajectory {
    pub fn t_start(&self) -> f64 {
        self.pieces[0].t_start()
    }
    pub fn t_end(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].t_end()
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn piece_for(&self, t: f64) -> &Trajectory<2> {
        let dir = (self.t_end() - self.t_start()).signum();
        self.pieces
            .iter()
            .rev()
            .find(|p| (t - p.t_start()) * dir >= 0.0)
            .unwrap_or(&self.pieces[0])
    }

    pub fn eval(&self, t: f64) -> PhaseState {
        let y = self.piece_for(t).eval(t);
        PhaseState {
            t,
            q: y[0],
            p: y[1],
        }
    }

    pub fn end_state(&self) -> PhaseState {
        let y = self.pieces[self.pieces.len() - 1].y_end();
        PhaseState {
            t: self.t_end(),
            q: y[0],
            p: y[1],
        }
    }

    /// Accepted step times across all pieces.
    pub fn times(&self) -> Vec<f64> {
        let mut ts = Vec::new();
        for p in &self.pieces {
            let mut t = p.times();
            if !ts.is_empty() {
                t.remove(0);
            }
            ts.append(&mut t);
        }
        ts
    }

    pub fn total_evals(&self) -> usize {
        self.pieces.iter().map(|p| p.n_evals).sum()
    }
}

/// Integrate `q̇ = p`, `ṗ = -ω²(t) q` from `(q0, p0)` at `t0` to `t1`.
pub fn integrate_qp<P: Profile + ?Sized>(
    profile: &P,
    q0: f64,
    p0: f64,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<QpTrajectory, OracleError> {
    integrate_qp_opts(profile, q0, p0, t0, t1, &IntegOptions::with_tol(tol))
}

/// [`integrate_qp`] with full stepper options.
pub fn integrate_qp_opts<P: Profile + ?Sized>(
    profile: &P,
    q0: f64,
    p0: f64,
    t0: f64,
    t1: f64,
    opts: &IntegOptions,
) -> Result<QpTrajectory, OracleError> {
    let opts = dense_capped(profile, t0, t1, opts);
    let rhs = |t: f64, y: &[f64; 2]| {
        let w = profile.omega(t);
        [y[1], -w * w * y[0]]
    };
    let mut pieces = Vec::new();
    let mut t_from = t0;
    let mut y = [q0, p0];
    for td in split_points(profile, t0, t1)
        .into_iter()
        .chain(core::iter::once(t1))
    {
        let piece = integrate(rhs, t_from, y, td, &opts)?;
        y = piece.y_end();
        t_from = td;
        pieces.push(piece);
    }
    Ok(QpTrajectory {
        pieces,
        tol: opts.tol,
    })
}

/// Piecewise dense trajectory in `(ψ, log 𝓘)` with matching applied at
/// declared jumps of ω. The phase is stored unwrapped.
#[derive(Clone, Debug)]
pub struct AaTrajectory {
    pieces: Vec<Trajectory<2>>,
    tol: f64,
}

impl AaTrajectory {
    pub fn t_start(&self) -> f64 {
        self.pieces[0].t_start()
    }
    pub fn t_end(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].t_end()
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn piece_for(&self, t: f64) -> &Trajectory<2> {
        let dir = (self.t_end() - self.t_start()).signum();
        self.pieces
            .iter()
            .rev()
            .find(|p| (t - p.t_start()) * dir >= 0.0)
            .unwrap_or(&self.pieces[0])
    }

    /// Dense evaluation. At a jump instant this returns the right-side state.
    pub fn eval(&self, t: f64) -> AngleActionState {
        let y = self.piece_for(t).eval(t);
        AngleActionState {
            t,
            psi: y[0],
            i: y[1].exp(),
        }
    }

    /// Unwrapped phase ψ(t).
    pub fn psi(&self, t: f64) -> f64 {
        self.piece_for(t).eval(t)[0]
    }

    /// Action 𝓘(t).
    pub fn action(&self, t: f64) -> f64 {
        self.piece_for(t).eval(t)[1].exp()
    }

    pub fn end_state(&self) -> AngleActionState {
        let y = self.pieces[self.pieces.len() - 1].y_end();
        AngleActionState {
            t: self.t_end(),
            psi: y[0],
            i: y[1].exp(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        let mut ts = Vec::new();
        for p in &self.pieces {
            let mut t = p.times();
            if !ts.is_empty() {
                t.remove(0);
            }
            ts.append(&mut t);
        }
        ts
    }
}

/// Integrate the angle-action equations
/// `ψ̇ = ω + (ω̇/2ω) sin 2ψ`, `d(log 𝓘)/dt = -(ω̇/ω) cos 2ψ`
/// from `(ψ0, 𝓘0)` at `t0` to `t1`, applying the matching relations at
/// declared jumps of ω.
pub fn integrate_angle_action<P: Profile + ?Sized>(
    profile: &P,
    psi0: f64,
    i0: f64,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<AaTrajectory, OracleError> {
    integrate_angle_action_opts(profile, psi0, i0, t0, t1, &IntegOptions::with_tol(tol))
}

/// [`integrate_angle_action`] with full stepper options.
pub fn integrate_angle_action_opts<P: Profile + ?Sized>(
    profile: &P,
    psi0: f64,
    i0: f64,
    t0: f64,
    t1: f64,
    opts: &IntegOptions,
) -> Result<AaTrajectory, OracleError> {
    if !(i0 > 0.0) {
        return Err(OracleError::BadInput);
    }
    let opts = dense_capped(profile, t0, t1, opts);
    let rhs = |t: f64, y: &[f64; 2]| {
        let w = profile.omega(t);
        let wd = profile.omega_dot(t);
        let (s2, c2) = (2.0 * y[0]).sin_cos();
        [w + 0.5 * wd / w * s2, -wd / w * c2]
    };
    let forward = t1 >= t0;
    let mut pieces = Vec::new();
    let mut t_from = t0;
    let mut y = [psi0, i0.ln()];
    for td in split_points(profile, t0, t1)
        .into_iter()
        .chain(core::iter::once(t1))
    {
        let piece = integrate(rhs, t_from, y, td, &opts)?;
        y = piece.y_end();
        if td != t1 {
            // cross the declared jump: q, p continuous, (ψ, 𝓘) matched
            let (w_minus, w_plus) = jump_limits(profile, td);
            let (from, to) = if forward {
                (w_minus, w_plus)
            } else {
                (w_plus, w_minus)
            };
            let (psi_m, i_m) = angle_action::match_discontinuity(y[0], y[1].exp(), from, to);
            y = [psi_m, i_m.ln()];
        }
        t_from = td;
        pieces.push(piece);
    }
    Ok(AaTrajectory {
        pieces,
        tol: opts.tol,
    })
}

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

const QUAD_MAX_DEPTH: u32 = 48;

struct QuadState<'a, F> {
    f: &'a F,
    evals: usize,
    spill: f64, // error accumulated on intervals that hit the depth limit
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    st: &mut QuadState<'_, F>,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = (st.f)(lm);
    let frm = (st.f)(rm);
    st.evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let s2 = left + right;
    let delta = s2 - whole;
    if delta.abs() <= 15.0 * tol || depth >= QUAD_MAX_DEPTH {
        if depth >= QUAD_MAX_DEPTH && delta.abs() > 15.0 * tol {
            st.spill += delta.abs() / 15.0;
        }
        return s2 + delta / 15.0;
    }
    adapt(st, a, fa, m, fm, flm, left, 0.5 * tol, depth + 1)
        + adapt(st, m, fm, b, fb, frm, right, 0.5 * tol, depth + 1)
}

/// Adaptive composite Simpson quadrature of `f` over [a, b] with absolute
/// error target `tol`. Orientation follows the sign of `b - a`.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, OracleError> {
    if !(tol > 0.0) {
        return Err(OracleError::BadInput);
    }
    if a == b {
        return Ok(0.0);
    }
    let mut st = QuadState {
        f: &f,
        evals: 3,
        spill: 0.0,
    };
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let v = adapt(&mut st, a, fa, b, fb, fm, whole, tol, 0);
    if st.spill > tol {
        return Err(OracleError::QuadratureNonConvergence {
            achieved: st.spill,
            requested: tol,
        });
    }
    Ok(v)
}

/// [`quadrature`] with the interval pre-split at the supplied breakpoints
/// (for piecewise-continuous integrands).
pub fn quadrature_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<f64, OracleError> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&c| c > lo && c < hi)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if a > b {
        cuts.reverse();
    }
    let n_parts = (cuts.len() + 1) as f64;
    let mut total = 0.0;
    let mut from = a;
    for to in cuts.into_iter().chain(core::iter::once(b)) {
        total += quadrature(&f, from, to, tol / n_parts)?;
        from = to;
    }
    Ok(total)
}

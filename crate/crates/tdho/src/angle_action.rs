//! Angle-action core: the transformation `(q, p) ↔ (ψ, 𝓘)`, Picard iterates
//! of the decoupled phase equation with certified sup-norm bounds,
//! closed-form approximants, discontinuity matching, and the
//! monotone-frequency envelope bounds.
//!
//! The phase equation in angle-action variables reads
//! `ψ̇ = ω + (ω̇/2ω) sin 2ψ` and is equivalent to the Volterra equation
//! `ψ = φ + ∫ (ω̇/2ω) sin 2ψ dz` with `φ(t) = ψ* + ∫ ω dz`. Successive
//! substitution starting from `ψ⁽⁰⁾ = φ` yields iterates obeying
//!
//! ```text
//! |ψ - ψ⁽ʰ⁾|        ≤ g^{h+1} / (2 (h+1)!)
//! |log 𝓘 - log 𝓘⁽ʰ⁾| ≤ g^{h+1} / (h+1)!
//! ```
//!
//! with `g` the total variation of log ω from the anchor time. Those
//! rights-hand sides are the certified bounds attached to a
//! [`PicardSeries`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

// method syntax for the float transcendentals in the no_std build
#[allow(unused_imports)]
use num_traits::Float;

use crate::frequency::{self, Profile};
use crate::oracle::{self, OracleError, PhaseState};
use crate::util;

/// Angle-action state at one instant. The phase is kept unwrapped; reduce
/// mod 2π only at presentation boundaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleActionState {
    pub t: f64,
    /// Unwrapped angle ψ (radians).
    pub psi: f64,
    /// Action 𝓘 = H/ω (> 0 for nontrivial solutions).
    pub i: f64,
}

/// Errors from angle-action operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleActionError {
    /// `(q, p) = (0, 0)` carries no phase.
    OriginInput,
    /// Negative action passed to a reconstruction.
    NegativeAction,
    /// ω must be positive.
    NonPositiveOmega,
    /// The requested interval is not monotone in ω.
    NonMonotone { t: f64 },
    /// Grid too coarse for the interpolation-error budget; retry with at
    /// least the suggested number of points.
    GridTooCoarse { suggested: usize },
    /// Parameter outside its admissible range.
    Parameter(&'static str),
    /// Failure in the underlying quadrature or integration.
    Oracle(OracleError),
}

impl fmt::Display for AngleActionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OriginInput => write!(f, "phase-space origin has no angle-action image"),
            Self::NegativeAction => write!(f, "action must be nonnegative"),
            Self::NonPositiveOmega => write!(f, "omega must be positive"),
            Self::NonMonotone { t } => write!(f, "omega is not monotone near t = {t}"),
            Self::GridTooCoarse { suggested } => {
                write!(f, "grid too coarse; use at least {suggested} points")
            }
            Self::Parameter(what) => write!(f, "invalid parameter: {what}"),
            Self::Oracle(e) => write!(f, "oracle failure: {e}"),
        }
    }
}

impl core::error::Error for AngleActionError {}

impl From<OracleError> for AngleActionError {
    fn from(e: OracleError) -> Self {
        Self::Oracle(e)
    }
}

/// `(q, p) ↦ (ψ, 𝓘)`: 𝓘 = (p² + ω²q²)/2ω and ψ the azimuth of the point
/// `(p, ωq)`, so that `q = √(2𝓘/ω) sin ψ`, `p = √(2𝓘ω) cos ψ`. The
/// returned phase is the principal value in (-π, π].
pub fn to_angle_action(
    state: &PhaseState,
    omega: f64,
) -> Result<AngleActionState, AngleActionError> {
    if !(omega > 0.0) {
        return Err(AngleActionError::NonPositiveOmega);
    }
    if state.q == 0.0 && state.p == 0.0 {
        return Err(AngleActionError::OriginInput);
    }
    let i = (state.p * state.p + omega * omega * state.q * state.q) / (2.0 * omega);
    let psi = (omega * state.q).atan2(state.p);
    Ok(AngleActionState { t: state.t, psi, i })
}

/// `(ψ, 𝓘) ↦ (q, p)`: q = √(2𝓘/ω) sin ψ, p = √(2𝓘ω) cos ψ.
pub fn to_phase(state: &AngleActionState, omega: f64) -> Result<PhaseState, AngleActionError> {
    if !(omega > 0.0) {
        return Err(AngleActionError::NonPositiveOmega);
    }
    if state.i < 0.0 {
        return Err(AngleActionError::NegativeAction);
    }
    let (s, c) = state.psi.sin_cos();
    Ok(PhaseState {
        t: state.t,
        q: (2.0 * state.i / omega).sqrt() * s,
        p: (2.0 * state.i * omega).sqrt() * c,
    })
}

/// Matching of `(ψ, 𝓘)` across a declared jump ω₋ → ω₊ of the frequency,
/// from continuity of `(q, p)` there: tan ψ₊/ω₊ = tan ψ₋/ω₋ with ψ₊ in the
/// same quadrant as ψ₋ (and the same unwrapping branch), and
/// 𝓘₊ = 𝓘₋ (ω₋/ω₊) [cos²ψ₋ + (ω₊/ω₋)² sin²ψ₋].
///
/// Implemented through atan2 on the rescaled direction vector, so the
/// special values ψ₋ = hπ/2 need no limit handling: the formula is total.
pub fn match_discontinuity(psi_minus: f64, i_minus: f64, w_minus: f64, w_plus: f64) -> (f64, f64) {
    let (s, c) = psi_minus.sin_cos();
    let ratio = w_plus / w_minus;
    // principal angles before/after the jump; same quadrant, so the
    // correction is < pi/2 in magnitude and unwrapping is unambiguous
    let before = s.atan2(c);
    let after = (ratio * s).atan2(c);
    let delta = util::wrap_pi(after - before);
    let i_plus = i_minus * (w_minus / w_plus) * (c * c + ratio * ratio * s * s);
    (psi_minus + delta, i_plus)
}

// ---------------------------------------------------------------------------
// Grids and the Picard series
// ---------------------------------------------------------------------------

/// Strictly increasing sample grid on a compact interval containing the
/// anchor time t*.
#[derive(Clone, Debug)]
pub struct Grid {
    pts: Vec<f64>,
    star: usize,
}

impl Grid {
    /// Uniform grid of n+1 points on [a, b]; t* is inserted if it is not
    /// already (numerically) a grid point.
    pub fn uniform(a: f64, b: f64, n: usize, t_star: f64) -> Result<Self, AngleActionError> {
        if !(b > a) || n < 8 {
            return Err(AngleActionError::Parameter(
                "grid needs b > a and at least 8 cells",
            ));
        }
        if t_star < a || t_star > b {
            return Err(AngleActionError::Parameter("t_star must lie inside [a, b]"));
        }
        let mut pts = util::linspace(a, b, n);
        let tol = 1e-12 * (b - a);
        let star = match pts.iter().position(|&t| (t - t_star).abs() <= tol) {
            Some(j) => {
                pts[j] = t_star;
                j
            }
            None => {
                let j = pts.partition_point(|&t| t < t_star);
                pts.insert(j, t_star);
                j
            }
        };
        Ok(Self { pts, star })
    }

    /// Grid sized from the phase content: roughly `points_per_phase`
    /// points per radian of φ across [a, b] (default density 64).
    pub fn dense<P: Profile + ?Sized>(
        profile: &P,
        a: f64,
        b: f64,
        t_star: f64,
        points_per_phase: f64,
    ) -> Result<Self, AngleActionError> {
        let span_phi = oracle::quadrature(|z| profile.omega(z), a, b, 1e-6)?.abs();
        let n = ((points_per_phase * span_phi).ceil() as usize).max(64);
        Self::uniform(a, b, n, t_star)
    }

    pub fn points(&self) -> &[f64] {
        &self.pts
    }
    pub fn star_index(&self) -> usize {
        self.star
    }
    pub fn t_star(&self) -> f64 {
        self.pts[self.star]
    }
    pub fn len(&self) -> usize {
        self.pts.len()
    }
    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }
}

use crate::util::{cumulative_gl5 as cumulative_gl5_slices, interp_cubic};

/// Cumulative GL5 integral from the grid anchor (cell-indexed integrand).
fn cumulative_gl5<F: Fn(usize, f64) -> f64>(grid: &Grid, f: F) -> Vec<f64> {
    cumulative_gl5_slices(grid.points(), grid.star, f)
}

/// Cumulative adaptive quadrature of `f` from the anchor to every grid
/// point (per-cell tolerance `tol`).
fn cumulative_adaptive<F: Fn(f64) -> f64>(
    grid: &Grid,
    f: F,
    tol: f64,
) -> Result<Vec<f64>, OracleError> {
    let ts = grid.points();
    let n = ts.len();
    let mut out = vec![0.0; n];
    for c in grid.star..n - 1 {
        out[c + 1] = out[c] + oracle::quadrature(&f, ts[c], ts[c + 1], tol)?;
    }
    for c in (0..grid.star).rev() {
        out[c] = out[c + 1] - oracle::quadrature(&f, ts[c], ts[c + 1], tol)?;
    }
    Ok(out)
}

/// φ(t) = ψ* + ∫_{t*}^{t} ω dz sampled on the grid: the zeroth Picard
/// iterate, strictly increasing past t* since ω > 0.
pub fn compute_phi<P: Profile + ?Sized>(
    profile: &P,
    psi_star: f64,
    grid: &Grid,
) -> Result<Vec<f64>, AngleActionError> {
    let tol = 1e-13 / grid.len() as f64 * 1e3; // per-cell budget
    let mut phi = cumulative_adaptive(grid, |z| profile.omega(z), tol.max(1e-15))?;
    for v in &mut phi {
        *v += psi_star;
    }
    Ok(phi)
}

/// Picard iterates of the phase equation on a grid, with the certified
/// factorial bounds attached.
#[derive(Clone, Debug)]
pub struct PicardSeries {
    grid: Grid,
    /// psi[h][j] = ψ⁽ʰ⁾(t_j), h = 0..=order.
    psi: Vec<Vec<f64>>,
    /// g[j] = total variation of log ω between t* and t_j.
    g: Vec<f64>,
    order: usize,
}

impl PicardSeries {
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    /// ψ⁽ʰ⁾ samples (h ≤ order).
    pub fn psi_values(&self, h: usize) -> &[f64] {
        &self.psi[h]
    }
    /// Sampled total variation g.
    pub fn g_values(&self) -> &[f64] {
        &self.g
    }

    /// Certified phase bound at sample j for order h:
    /// |ψ(t_j) - ψ⁽ʰ⁾(t_j)| ≤ g_j^{h+1} / (2 (h+1)!).
    pub fn psi_bound(&self, h: usize, j: usize) -> f64 {
        let hp1 = (h + 1) as u32;
        self.g[j].powi(hp1 as i32) / (2.0 * util::factorial(hp1))
    }

    /// Certified action bound at sample j for order h:
    /// |log 𝓘(t_j) - log 𝓘⁽ʰ⁾(t_j)| ≤ g_j^{h+1} / (h+1)!.
    pub fn log_action_bound(&self, h: usize, j: usize) -> f64 {
        let hp1 = (h + 1) as u32;
        self.g[j].powi(hp1 as i32) / util::factorial(hp1)
    }

    /// ψ⁽ʰ⁾ interpolated off-grid (piecewise cubic).
    pub fn psi_at(&self, h: usize, t: f64) -> f64 {
        let ts = self.grid.points();
        interp_cubic(ts, &self.psi[h], util::cell_of(ts, t), t)
    }
}

/// Upper limit on the per-cell phase increment accepted before requesting
/// grid refinement: keeps cubic-interpolation error within a percent of
/// the smallest certified bounds met in practice.
const MAX_CELL_PHASE: f64 = 0.25;

/// Build the Picard series ψ⁽⁰⁾ = φ, ψ⁽ʰ⁾ = φ + ∫ (ω̇/2ω) sin 2ψ⁽ʰ⁻¹⁾ dz
/// through the given order on a grid.
///
/// The previous iterate enters the integrand through piecewise-cubic
/// interpolation; each cell is integrated with a fixed 5-point Gauss rule
/// and accumulated from t*.
pub fn picard_psi<P: Profile + ?Sized>(
    profile: &P,
    psi_star: f64,
    grid: &Grid,
    order: usize,
) -> Result<PicardSeries, AngleActionError> {
    let ts = grid.points();
    // the iterates live on one continuity interval; across a declared
    // jump the series is extended by match_discontinuity instead
    let (lo, hi) = (ts[0], ts[ts.len() - 1]);
    if profile.discontinuities().iter().any(|&d| d > lo && d < hi) {
        return Err(AngleActionError::Parameter(
            "grid crosses a declared jump of omega; split there and extend by matching",
        ));
    }
    let phi = compute_phi(profile, psi_star, grid)?;
    // refinement request if any cell swallows too much phase
    let max_cell = phi
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    if max_cell > MAX_CELL_PHASE {
        let span: f64 = (phi[phi.len() - 1] - phi[0]).abs();
        return Err(AngleActionError::GridTooCoarse {
            suggested: (span / MAX_CELL_PHASE * 2.0).ceil() as usize,
        });
    }
    let g = cumulative_gabs(profile, grid)?;

    let mut psi = Vec::with_capacity(order + 1);
    psi.push(phi.clone());
    for _h in 1..=order {
        let prev = &psi[psi.len() - 1];
        let corr = cumulative_gl5(grid, |cell, z| {
            let w = profile.omega(z);
            let wd = profile.omega_dot(z);
            0.5 * wd / w * (2.0 * interp_cubic(ts, prev, cell, z)).sin()
        });
        let next: Vec<f64> = phi.iter().zip(&corr).map(|(&a, &b)| a + b).collect();
        psi.push(next);
    }
    Ok(PicardSeries {
        grid: grid.clone(),
        psi,
        g,
        order,
    })
}

/// |g| accumulated from the anchor, adaptive per cell.
fn cumulative_gabs<P: Profile + ?Sized>(
    profile: &P,
    grid: &Grid,
) -> Result<Vec<f64>, AngleActionError> {
    let mut g = cumulative_adaptive(
        grid,
        |z| (profile.omega_dot(z) / profile.omega(z)).abs(),
        1e-12,
    )?;
    for v in &mut g {
        *v = v.abs();
    }
    Ok(g)
}

/// Action iterates 𝓘⁽ʰ⁾ on the series grid for h = 0..=order:
/// 𝓘⁽⁰⁾ ≡ 𝓘*, and 𝓘⁽ʰ⁾ = 𝓘* exp{-∫ (ω̇/ω) cos 2ψ⁽ʰ⁻¹⁾ dz} for h ≥ 1.
pub fn picard_action<P: Profile + ?Sized>(
    profile: &P,
    series: &PicardSeries,
    i_star: f64,
) -> Result<Vec<Vec<f64>>, AngleActionError> {
    if !(i_star > 0.0) {
        return Err(AngleActionError::Parameter("i_star must be positive"));
    }
    let grid = &series.grid;
    let ts = grid.points();
    let n = ts.len();
    let mut out = Vec::with_capacity(series.order + 1);
    out.push(vec![i_star; n]);
    for h in 1..=series.order {
        let prev = series.psi_values(h - 1);
        let expo = cumulative_gl5(grid, |cell, z| {
            let w = profile.omega(z);
            let wd = profile.omega_dot(z);
            wd / w * (2.0 * interp_cubic(ts, prev, cell, z)).cos()
        });
        out.push(expo.iter().map(|&e| i_star * (-e).exp()).collect());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Closed-form approximants
// ---------------------------------------------------------------------------

/// Zeroth-order approximant: `q⁽⁰⁾ = √(2𝓘*/ω(t)) sin φ(t)`,
/// `p⁽⁰⁾ = √(2𝓘* ω(t)) cos φ(t)` with φ = ψ* + ∫ω.
pub fn approx_zeroth<P: Profile + ?Sized>(
    profile: &P,
    psi_star: f64,
    i_star: f64,
    t_star: f64,
    t: f64,
) -> Result<PhaseState, AngleActionError> {
    let phi = psi_star + oracle::quadrature(|z| profile.omega(z), t_star, t, 1e-12)?;
    to_phase(
        &AngleActionState {
            t,
            psi: phi,
            i: i_star,
        },
        profile.omega(t),
    )
}

/// Naive frozen-frequency approximant:
/// `q̃ = √(2𝓘*/ω*) sin[ψ* + ω(t)(t - t*)]` and its derivative
/// `p̃ = [ω(t) + ω̇(t)(t - t*)] √(2𝓘*/ω*) cos[ψ* + ω(t)(t - t*)]`.
pub fn approx_tilde<P: Profile + ?Sized>(
    profile: &P,
    psi_star: f64,
    i_star: f64,
    t_star: f64,
    t: f64,
) -> PhaseState {
    let w_star = profile.omega(t_star);
    let w = profile.omega(t);
    let wd = profile.omega_dot(t);
    let amp = (2.0 * i_star / w_star).sqrt();
    let arg = psi_star + w * (t - t_star);
    let (s, c) = arg.sin_cos();
    PhaseState {
        t,
        q: amp * s,
        p: (w + wd * (t - t_star)) * amp * c,
    }
}

/// The intermediate approximant
/// `q̂(t) = √(2𝓘⁽¹⁾(t)/ω(t)) sin φ(t)`
/// with 𝓘⁽¹⁾ the first action iterate built on φ.
pub fn approx_hat<P: Profile + ?Sized>(
    profile: &P,
    psi_star: f64,
    i_star: f64,
    t_star: f64,
    t: f64,
) -> Result<f64, AngleActionError> {
    let phi_t = psi_star + oracle::quadrature(|z| profile.omega(z), t_star, t, 1e-12)?;
    // exponent of I^{(1)}: -∫ (omega_dot/omega) cos(2 phi(z)) dz, built on the
    // inner phase phi(z)
    let expo = oracle::quadrature(
        |z| {
            let phi_z = psi_star
                + oracle::quadrature(|u| profile.omega(u), t_star, z, 1e-12).unwrap_or(f64::NAN);
            profile.omega_dot(z) / profile.omega(z) * (2.0 * phi_z).cos()
        },
        t_star,
        t,
        1e-10,
    )?;
    let i1 = i_star * (-expo).exp();
    Ok((2.0 * i1 / profile.omega(t)).sqrt() * phi_t.sin())
}

/// Batch evaluation of the three approximants on a Picard grid, reusing
/// the series machinery (φ and 𝓘⁽¹⁾ accumulate cell by cell).
pub struct ApproximantSeries {
    pub q_zeroth: Vec<f64>,
    pub p_zeroth: Vec<f64>,
    pub q_tilde: Vec<f64>,
    pub p_tilde: Vec<f64>,
    pub q_hat: Vec<f64>,
    pub i_first: Vec<f64>,
}

/// Evaluate q⁽⁰⁾, q̃, q̂ (and 𝓘⁽¹⁾) on every grid point.
pub fn approximants_on_grid<P: Profile + ?Sized>(
    profile: &P,
    psi_star: f64,
    i_star: f64,
    grid: &Grid,
) -> Result<ApproximantSeries, AngleActionError> {
    let series = picard_psi(profile, psi_star, grid, 1)?;
    let actions = picard_action(profile, &series, i_star)?;
    let phi = series.psi_values(0);
    let i1 = &actions[1];
    let ts = grid.points();
    let t_star = grid.t_star();
    let n = ts.len();
    let mut out = ApproximantSeries {
        q_zeroth: Vec::with_capacity(n),
        p_zeroth: Vec::with_capacity(n),
        q_tilde: Vec::with_capacity(n),
        p_tilde: Vec::with_capacity(n),
        q_hat: Vec::with_capacity(n),
        i_first: i1.clone(),
    };
    for j in 0..n {
        let t = ts[j];
        let w = profile.omega(t);
        let (s, c) = phi[j].sin_cos();
        out.q_zeroth.push((2.0 * i_star / w).sqrt() * s);
        out.p_zeroth.push((2.0 * i_star * w).sqrt() * c);
        let tilde = approx_tilde(profile, psi_star, i_star, t_star, t);
        out.q_tilde.push(tilde.q);
        out.p_tilde.push(tilde.p);
        out.q_hat.push((2.0 * i1[j] / w).sqrt() * s);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Envelope bounds on monotone stretches (and the λ-norm alternative)
// ---------------------------------------------------------------------------

/// Parity of a special point: `Even` is a zero of q, `Odd` a zero of p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Two-sided envelope for ψ and 𝓘 on a monotone-ω stretch starting at a
/// special point t_h (where ψ(t_h) = hπ/2).
///
/// Phases are reported relative to ψ(t_h): both bounds apply to
/// `ψ(t) - ψ(t_h)`. Action bounds are ratios `𝓘(t)/𝓘(t_h)`; each carries
/// the instant up to which it is certified.
#[derive(Clone, Copy, Debug)]
pub struct Envelope {
    pub psi_low: f64,
    pub psi_high: f64,
    pub i_low: f64,
    pub i_high: f64,
    pub i_low_valid_to: f64,
    pub i_high_valid_to: f64,
}

/// Envelope bounds from the monotone-frequency comparison argument:
/// with φ the bare phase integral and φ⁽¹⁾ = φ + (-1)^h ½ log(ω(t)/ω(t_h)),
/// ψ is pinched between them, and 𝓘/𝓘(t_h) is pinched between
/// exp{-∫(ω̇/ω)cos 2φ} and exp{-∫(ω̇/ω)cos 2φ⁽¹⁾} (the latter certified
/// only up to where the controlling phase reaches (h+1)π/2).
pub fn envelope_bounds<P: Profile + ?Sized>(
    profile: &P,
    t_h: f64,
    t: f64,
    parity: Parity,
) -> Result<Envelope, AngleActionError> {
    if !(t > t_h) {
        return Err(AngleActionError::Parameter("need t > t_h"));
    }
    // monotonicity check by dense sampling of the derivative sign
    let n = 512;
    let mut pos = false;
    let mut neg = false;
    for i in 0..=n {
        let z = t_h + (t - t_h) * i as f64 / n as f64;
        let d = profile.omega_dot(z);
        if d > 1e-13 {
            pos = true;
        } else if d < -1e-13 {
            neg = true;
        }
        if pos && neg {
            return Err(AngleActionError::NonMonotone { t: z });
        }
    }

    let sgn = parity.sign();
    let w_h = profile.omega(t_h);
    let phase = |z: f64| -> Result<f64, AngleActionError> {
        Ok(oracle::quadrature(|u| profile.omega(u), t_h, z, 1e-12)?)
    };
    let corr = |z: f64| 0.5 * sgn * (profile.omega(z) / w_h).ln();

    let x_t = phase(t)?;
    let d_t = corr(t);
    let (psi_low, psi_high) = if d_t >= 0.0 {
        (x_t, x_t + d_t)
    } else {
        (x_t + d_t, x_t)
    };

    // cos(2ψ_abs) with ψ_abs = hπ/2 + x: cos(hπ + 2x) = (-1)^h cos 2x.
    // lower action bound from the bare phase φ, upper from φ⁽¹⁾
    let low_expo = oracle::quadrature(
        |z| {
            let x = oracle::quadrature(|u| profile.omega(u), t_h, z, 1e-12).unwrap_or(f64::NAN);
            profile.omega_dot(z) / profile.omega(z) * sgn * (2.0 * x).cos()
        },
        t_h,
        t,
        1e-10,
    )?;
    let high_expo = oracle::quadrature(
        |z| {
            let x = oracle::quadrature(|u| profile.omega(u), t_h, z, 1e-12).unwrap_or(f64::NAN);
            let arg = 2.0 * x + sgn * 2.0 * corr(z);
            profile.omega_dot(z) / profile.omega(z) * sgn * arg.cos()
        },
        t_h,
        t,
        1e-10,
    )?;
    let i_low = (-low_expo).exp();
    let i_high = (-high_expo).exp();

    // certification horizons: where the controlling phase reaches π/2
    // above hπ/2
    let half_pi = core::f64::consts::FRAC_PI_2;
    let cross = |with_corr: bool| -> Result<f64, AngleActionError> {
        let val = |z: f64| -> Result<f64, AngleActionError> {
            let mut v = phase(z)?;
            if with_corr {
                v += sgn * corr(z);
            }
            Ok(v)
        };
        if val(t)? < half_pi {
            return Ok(t); // horizon not reached inside [t_h, t]
        }
        let (mut lo, mut hi) = (t_h, t);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if val(mid)? < half_pi {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * t.abs().max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    // raising case (d ≥ 0): φ⁽¹⁾ controls the upper bound horizon;
    // lowering case: φ controls the lower bound horizon
    let (i_low_valid_to, i_high_valid_to) = if d_t >= 0.0 {
        (t, cross(true)?)
    } else {
        (cross(false)?, t)
    };

    Ok(Envelope {
        psi_low,
        psi_high,
        i_low,
        i_high,
        i_low_valid_to,
        i_high_valid_to,
    })
}

/// The fixed-point-theorem bound in the weighted norm
/// ‖u‖_λ = max e^{-λ|t-t*|}|u(t)|:
/// |ψ⁽ʰ⁾(t) - ψ(t)| < e^{λ|t-t*|} ν^h/(1-ν) ‖φ - ψ⁽¹⁾‖_λ with ν = μ/2λ.
#[derive(Clone, Copy, Debug)]
pub struct LambdaBound {
    pub lambda: f64,
    pub nu: f64,
    pub weighted_norm: f64,
    /// Bound evaluated at the far end of the grid interval.
    pub bound_at_end: f64,
}

/// Evaluate the λ-norm bound for a given λ > μ/2 on the series' interval.
/// Needs a series of order ≥ 1.
pub fn lambda_norm_bound<P: Profile + ?Sized>(
    profile: &P,
    series: &PicardSeries,
    h: usize,
    lambda: f64,
) -> Result<LambdaBound, AngleActionError> {
    if series.order() < 1 {
        return Err(AngleActionError::Parameter(
            "series must hold at least order 1",
        ));
    }
    let ts = series.grid().points();
    let (a, b) = (ts[0], ts[ts.len() - 1]);
    let mu = frequency::sup_log_derivative(profile, a, b, 4096);
    if !(lambda > 0.5 * mu) {
        return Err(AngleActionError::Parameter("lambda must exceed mu/2"));
    }
    let nu = 0.5 * mu / lambda;
    let t_star = series.grid().t_star();
    let phi = series.psi_values(0);
    let psi1 = series.psi_values(1);
    let mut norm = 0.0f64;
    for j in 0..ts.len() {
        let w = (-lambda * (ts[j] - t_star).abs()).exp();
        norm = norm.max(w * (phi[j] - psi1[j]).abs());
    }
    let reach = (b - t_star).abs().max((a - t_star).abs());
    let bound_at_end = (lambda * reach).exp() * nu.powi(h as i32) / (1.0 - nu) * norm;
    Ok(LambdaBound {
        lambda,
        nu,
        weighted_norm: norm,
        bound_at_end,
    })
}

/// Infimum of the λ-norm bound over a geometric λ-grid above μ/2.
pub fn lambda_norm_bound_infimum<P: Profile + ?Sized>(
    profile: &P,
    series: &PicardSeries,
    h: usize,
    n_lambda: usize,
) -> Result<LambdaBound, AngleActionError> {
    let ts = series.grid().points();
    let mu = frequency::sup_log_derivative(profile, ts[0], ts[ts.len() - 1], 4096);
    let mut best: Option<LambdaBound> = None;
    for k in 0..n_lambda {
        let lambda = 0.5 * mu * (1.02 + 0.2 * k as f64) + 1e-12;
        let cand = lambda_norm_bound(profile, series, h, lambda)?;
        if best
            .as_ref()
            .is_none_or(|b| cand.bound_at_end < b.bound_at_end)
        {
            best = Some(cand);
        }
    }
    best.ok_or(AngleActionError::Parameter("empty lambda grid"))
}

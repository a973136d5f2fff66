//! Periodic-frequency analysis: monodromy matrix, stability classification,
//! the trace formula through angle-action solutions, leading-order closed
//! forms for the Mathieu law, resonance conditions, and stability maps.
//!
//! For ω with period T the fundamental matrix satisfies
//! `V(t + nT) = V(t) Mⁿ` with `M = V(T)`. Since det M = 1, the eigenvalues
//! are `λ± = μ ± √(μ²-1)` with `2μ = Tr M` and `λ₊λ₋ = 1`; the trivial
//! solution is stable for |μ| < 1 and unstable for |μ| > 1.

use alloc::vec::Vec;
use core::fmt;

// method syntax for the float transcendentals in the no_std build
#[allow(unused_imports)]
use num_traits::Float;

use crate::frequency::{Mathieu, Profile};
use crate::linear_systems::{det2, mat_mul, FundamentalMatrix, Mat2};
use crate::oracle::{self, OracleError};
use crate::util;

/// Stability class of the trivial solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

/// Band around |μ| = 1 classified as marginal; maps carry the raw μ so
/// callers can re-threshold.
pub const MARGINAL_TOL: f64 = 1e-7;

/// Errors from the Floquet analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FloquetError {
    /// The profile declares no period.
    NoPeriod,
    /// Parameter outside its admissible range.
    Parameter(&'static str),
    Oracle(OracleError),
}

impl fmt::Display for FloquetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoPeriod => write!(f, "profile has no declared period"),
            Self::Parameter(what) => write!(f, "invalid parameter: {what}"),
            Self::Oracle(e) => write!(f, "oracle failure: {e}"),
        }
    }
}

impl core::error::Error for FloquetError {}

impl From<OracleError> for FloquetError {
    fn from(e: OracleError) -> Self {
        Self::Oracle(e)
    }
}

impl From<crate::linear_systems::LinearSystemsError> for FloquetError {
    fn from(e: crate::linear_systems::LinearSystemsError) -> Self {
        match e {
            crate::linear_systems::LinearSystemsError::Oracle(o) => Self::Oracle(o),
            _ => Self::Parameter("fundamental matrix construction failed"),
        }
    }
}

/// Monodromy matrix over one period with its spectral data.
#[derive(Clone, Copy, Debug)]
pub struct MonodromyReport {
    pub m: Mat2,
    /// μ = Tr(M)/2.
    pub mu: f64,
    /// det M (must be 1 up to integration error).
    pub det: f64,
    /// Eigenvalues λ± as (re, im) pairs; λ₊λ₋ = 1.
    pub eigenvalues: [(f64, f64); 2],
    pub class: Stability,
    pub period: f64,
}

fn classify(mu: f64) -> Stability {
    if (mu.abs() - 1.0).abs() < MARGINAL_TOL {
        Stability::Marginal
    } else if mu.abs() < 1.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

fn eigenvalues_of(mu: f64) -> [(f64, f64); 2] {
    let disc = mu * mu - 1.0;
    if disc >= 0.0 {
        let root = disc.sqrt();
        [(mu + root, 0.0), (mu - root, 0.0)]
    } else {
        let imag = (-disc).sqrt();
        [(mu, imag), (mu, -imag)]
    }
}

/// Integrate the fundamental pair over one declared period and classify
/// the trivial solution.
pub fn monodromy<P: Profile + ?Sized>(
    profile: &P,
    tol: f64,
) -> Result<MonodromyReport, FloquetError> {
    let period = profile.period().ok_or(FloquetError::NoPeriod)?;
    let fund = FundamentalMatrix::compute(profile, 0.0, period, tol)?;
    let m = fund.v(period);
    let mu = 0.5 * (m[0][0] + m[1][1]);
    Ok(MonodromyReport {
        m,
        mu,
        det: det2(&m),
        eigenvalues: eigenvalues_of(mu),
        class: classify(mu),
        period,
    })
}

/// V(t + nT) = V(t) Mⁿ by matrix power.
pub fn floquet_extend(report: &MonodromyReport, fund: &FundamentalMatrix, t: f64, n: u32) -> Mat2 {
    let mut power = [[1.0, 0.0], [0.0, 1.0]];
    for _ in 0..n {
        power = mat_mul(&power, &report.m);
    }
    mat_mul(&fund.v(t), &power)
}

/// 2μ through the angle-action route:
/// `2μ = e^{-Ψ₁(T)} sin ψ₁(T) + e^{-Ψ₂(T)} cos ψ₂(T)` with ψ₁(0) = π/2,
/// ψ₂(0) = 0 and `Ψₐ = ∫ (ω̇/2ω) cos 2ψₐ dz`. The exponential factors are
/// read off the action itself: e^{-Ψ} = √(𝓘(T)/𝓘(0)).
pub fn trace_via_angle_action<P: Profile + ?Sized>(
    profile: &P,
    tol: f64,
) -> Result<f64, FloquetError> {
    let period = profile.period().ok_or(FloquetError::NoPeriod)?;
    let half_pi = core::f64::consts::FRAC_PI_2;
    let aa1 = oracle::integrate_angle_action(profile, half_pi, 1.0, 0.0, period, tol)?;
    let aa2 = oracle::integrate_angle_action(profile, 0.0, 1.0, 0.0, period, tol)?;
    let s1 = aa1.end_state();
    let s2 = aa2.end_state();
    Ok(0.5 * (s1.i.sqrt() * s1.psi.sin() + s2.i.sqrt() * s2.psi.cos()))
}

/// Leading-order trace for a weakly modulated periodic law:
/// `μ⁽⁰⁾ = cos(ω̄T) cosh χ(T)` with `ω̄ = φ(T)/T` and
/// `χ(t) = ∫₀ᵗ (ω̇/2ω) cos(2ω̄z) dz`.
pub fn mu_leading_order<P: Profile + ?Sized>(profile: &P) -> Result<f64, FloquetError> {
    let period = profile.period().ok_or(FloquetError::NoPeriod)?;
    let phase = oracle::quadrature(|z| profile.omega(z), 0.0, period, 1e-12)?;
    let omega_bar = phase / period;
    let chi = oracle::quadrature(
        |z| 0.5 * profile.omega_dot(z) / profile.omega(z) * (2.0 * omega_bar * z).cos(),
        0.0,
        period,
        1e-12,
    )?;
    Ok((omega_bar * period).cos() * chi.cosh())
}

/// Switch threshold for the resonant branch of [`mathieu_chi`].
pub const RESONANT_SWITCH: f64 = 1e-9;

/// Leading-order closed form of
/// `χ(t) = ∫₀ᵗ (ω̇/2ω) cos(2ψ* + 2ω̄z) dz` for the Mathieu law
/// ω = ω̄√(1 + η sin αt); the action behaves as log[𝓘(0)/𝓘(t)] = 2χ(t)
/// up to O(η²).
///
/// At resonance (α = 2ω̄, detected within `RESONANT_SWITCH` relative) the
/// branch with the secular term `(η/4) ω̄ cos(2ψ*) t` applies; otherwise
/// the two-sinusoid form.
pub fn mathieu_chi(psi_star: f64, eta: f64, alpha: f64, omega_bar: f64, t: f64) -> f64 {
    let two_psi = 2.0 * psi_star;
    if (alpha - 2.0 * omega_bar).abs() < RESONANT_SWITCH * omega_bar {
        0.25 * eta
            * omega_bar
            * (two_psi.cos() * t
                + ((two_psi + 4.0 * omega_bar * t).sin() - two_psi.sin()) / (4.0 * omega_bar))
    } else {
        let minus = 2.0 * omega_bar - alpha;
        let plus = 2.0 * omega_bar + alpha;
        0.125
            * eta
            * alpha
            * ((two_psi + minus * t).sin() / minus + (two_psi + plus * t).sin() / plus
                - 4.0 * omega_bar * two_psi.sin() / (4.0 * omega_bar * omega_bar - alpha * alpha))
    }
}

/// Parametric-resonance centres ω̄ = jπ/T, j = 1..j_max, for a law of
/// period T.
pub fn resonance_points(period: f64, j_max: usize) -> Vec<f64> {
    (1..=j_max)
        .map(|j| j as f64 * core::f64::consts::PI / period)
        .collect()
}

/// One classified point of a stability map.
#[derive(Clone, Copy, Debug)]
pub struct MapPoint {
    pub omega_bar: f64,
    pub eta: f64,
    pub mu: f64,
    pub class: Stability,
}

/// Stability chart of the Mathieu law over an (ω̄, η) rectangle at fixed α.
#[derive(Clone, Debug)]
pub struct StabilityMap {
    pub alpha: f64,
    pub n_omega: usize,
    pub n_eta: usize,
    /// Row-major: index = i_eta * n_omega + i_omega.
    pub points: Vec<MapPoint>,
}

impl StabilityMap {
    /// First-tongue analytic boundary: instability for
    /// |η| > 4 |2ω̄/α - 1| near (ω̄, η) = (α/2, 0).
    pub fn analytic_boundary(alpha: f64, omega_bar: f64) -> f64 {
        4.0 * (2.0 * omega_bar / alpha - 1.0).abs()
    }
}

/// Scan the (ω̄, η) rectangle with an n_omega × n_eta grid, classifying
/// each point by its monodromy trace.
pub fn stability_map(
    alpha: f64,
    omega_bar_range: (f64, f64),
    eta_range: (f64, f64),
    n_omega: usize,
    n_eta: usize,
    tol: f64,
) -> Result<StabilityMap, FloquetError> {
    if n_omega < 2 || n_eta < 2 {
        return Err(FloquetError::Parameter(
            "grid needs at least 2 points per axis",
        ));
    }
    let mut points = Vec::with_capacity(n_omega * n_eta);
    for ie in 0..n_eta {
        let eta = eta_range.0 + (eta_range.1 - eta_range.0) * ie as f64 / (n_eta - 1) as f64;
        for io in 0..n_omega {
            let omega_bar = omega_bar_range.0
                + (omega_bar_range.1 - omega_bar_range.0) * io as f64 / (n_omega - 1) as f64;
            let mu = mu_of_mathieu(omega_bar, eta, alpha, tol)?;
            points.push(MapPoint {
                omega_bar,
                eta,
                mu,
                class: classify(mu),
            });
        }
    }
    Ok(StabilityMap {
        alpha,
        n_omega,
        n_eta,
        points,
    })
}

fn mu_of_mathieu(omega_bar: f64, eta: f64, alpha: f64, tol: f64) -> Result<f64, FloquetError> {
    let profile = Mathieu::new(omega_bar, eta, alpha)
        .map_err(|_| FloquetError::Parameter("invalid Mathieu parameters"))?;
    Ok(monodromy(&profile, tol)?.mu)
}

/// Measure the first instability tongue's half-width in ω̄ around α/2 at
/// fixed η, by bisecting |μ| - 1 on both sides of the centre.
pub fn measured_tongue_half_width(alpha: f64, eta: f64, tol: f64) -> Result<f64, FloquetError> {
    let centre = 0.5 * alpha;
    let predicted = eta.abs() * alpha / 8.0;
    let stable_at = |omega_bar: f64| -> Result<bool, FloquetError> {
        Ok(mu_of_mathieu(omega_bar, eta, alpha, tol)?.abs() < 1.0)
    };
    if stable_at(centre)? {
        return Err(FloquetError::Parameter(
            "centre of the tongue is not unstable",
        ));
    }
    let edge = |dir: f64| -> Result<f64, FloquetError> {
        // bracket the edge between the centre and a point past the
        // predicted width
        let mut inside = centre;
        let mut outside = centre + dir * 4.0 * predicted.max(1e-3);
        let mut tries = 0;
        while !stable_at(outside)? && tries < 8 {
            outside += dir * 2.0 * predicted.max(1e-3);
            tries += 1;
        }
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if stable_at(mid)? {
                outside = mid;
            } else {
                inside = mid;
            }
            if (outside - inside).abs() < 1e-8 {
                break;
            }
        }
        Ok(0.5 * (inside + outside))
    };
    let hi = edge(1.0)?;
    let lo = edge(-1.0)?;
    Ok(0.5 * (hi - lo))
}

/// Measured beat of log 𝓘 near (but off) resonance.
#[derive(Clone, Copy, Debug)]
pub struct BeatReport {
    /// Half peak-to-peak swing of log(𝓘/𝓘₀) over the window.
    pub amplitude: f64,
    /// |η| α / (4 |2ω̄ - α|).
    pub predicted_amplitude: f64,
    /// Beat period from zero crossings of log(𝓘/𝓘₀).
    pub period: f64,
    /// 2π/|2ω̄ - α|.
    pub predicted_period: f64,
}

/// Integrate 𝓘(t) for the Mathieu law near resonance and compare the beat
/// envelope of log 𝓘 against the leading-order prediction. Requires
/// α ≈ 2ω̄ but strictly off resonance, and a window of at least two
/// predicted beat periods.
pub fn beat_analysis(
    eta: f64,
    alpha: f64,
    omega_bar: f64,
    psi_star: f64,
    t_max: f64,
    tol: f64,
) -> Result<BeatReport, FloquetError> {
    let detune = 2.0 * omega_bar - alpha;
    if detune.abs() < RESONANT_SWITCH * omega_bar {
        return Err(FloquetError::Parameter(
            "beat analysis needs alpha != 2 omega_bar",
        ));
    }
    let predicted_period = 2.0 * core::f64::consts::PI / detune.abs();
    if t_max < 2.0 * predicted_period {
        return Err(FloquetError::Parameter(
            "window shorter than two beat periods",
        ));
    }
    let profile = Mathieu::new(omega_bar, eta, alpha)
        .map_err(|_| FloquetError::Parameter("invalid Mathieu parameters"))?;
    let aa = oracle::integrate_angle_action(&profile, psi_star, 1.0, 0.0, t_max, tol)?;

    let n = (t_max / 0.25).ceil() as usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut crossings: Vec<f64> = Vec::new();
    let mut prev_t = 0.0;
    let mut prev_v = 0.0;
    for i in 0..=n {
        let t = t_max * i as f64 / n as f64;
        let v = aa.action(t).ln();
        lo = lo.min(v);
        hi = hi.max(v);
        if i > 0 && prev_v * v < 0.0 {
            // linear interpolation of the crossing, merged into clusters
            // to ignore the fast sub-oscillation
            let tc = prev_t + (t - prev_t) * prev_v / (prev_v - v);
            match crossings.last() {
                Some(&last) if tc - last < 0.1 * predicted_period => {}
                _ => crossings.push(tc),
            }
        }
        prev_t = t;
        prev_v = v;
    }
    let period = if crossings.len() >= 2 {
        let span = crossings[crossings.len() - 1] - crossings[0];
        2.0 * span / (crossings.len() - 1) as f64
    } else {
        f64::NAN
    };
    Ok(BeatReport {
        amplitude: 0.5 * (hi - lo),
        predicted_amplitude: eta.abs() * alpha / (4.0 * detune.abs()),
        period,
        predicted_period,
    })
}

/// Fitted exponential rate of 𝓘(t) at exact resonance (α = 2ω̄): the
/// leading-order prediction is `𝓘 ~ exp[-η ω̄ cos(2ψ*) t / 2]`, growth for
/// cos 2ψ* < 0 and damping for cos 2ψ* > 0 (η > 0).
pub fn resonant_action_rate(
    eta: f64,
    omega_bar: f64,
    psi_star: f64,
    t_max: f64,
    tol: f64,
) -> Result<f64, FloquetError> {
    let profile = Mathieu::new(omega_bar, eta, 2.0 * omega_bar)
        .map_err(|_| FloquetError::Parameter("invalid Mathieu parameters"))?;
    let aa = oracle::integrate_angle_action(&profile, psi_star, 1.0, 0.0, t_max, tol)?;
    let n = 400;
    let mut ts = Vec::with_capacity(n + 1);
    let mut logs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = t_max * i as f64 / n as f64;
        ts.push(t);
        logs.push(aa.action(t).ln());
    }
    let (slope, _, _) = util::fit_line(&ts, &logs);
    Ok(slope)
}

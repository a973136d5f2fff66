//! Frequency laws ω(t): evaluation, derivative, declared discontinuities,
//! total-variation accumulation, and the built-in profile families used by
//! the experiments.
//!
//! Profiles are immutable after construction and implement [`Profile`];
//! every operation here is pure, so profiles can be shared freely across
//! threads.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

// method syntax for the float transcendentals in the no_std build
#[allow(unused_imports)]
use num_traits::Float;

use crate::oracle;
use crate::util;

/// Regularity of a frequency law, as declared by its constructor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    /// C^∞ on every continuity interval.
    CInfinity,
    /// C^{k+1} with the stored k: exactly k+1 continuous derivatives.
    CK(u32),
    /// Continuous and piecewise-C¹, or with declared jump discontinuities.
    PiecewiseC1,
}

/// A frequency law t ↦ ω(t) > 0 together with its derivative and the list
/// of declared jump instants.
///
/// Discontinuities are declared, never detected: between consecutive
/// declared instants the law must be continuously differentiable, and
/// `omega_dot` must be the true derivative of `omega` there.
pub trait Profile: Send + Sync {
    /// ω(t). Must be positive on the declared domain.
    fn omega(&self, t: f64) -> f64;
    /// ω̇(t), valid away from declared discontinuities.
    fn omega_dot(&self, t: f64) -> f64;
    /// Ordered instants where ω jumps.
    fn discontinuities(&self) -> &[f64] {
        &[]
    }
    /// Period T with ω(t+T) = ω(t), for Hill-type laws.
    fn period(&self) -> Option<f64> {
        None
    }
    /// Declared regularity class.
    fn smoothness(&self) -> Smoothness {
        Smoothness::CInfinity
    }
}

impl<P: Profile + ?Sized> Profile for &P {
    fn omega(&self, t: f64) -> f64 {
        (**self).omega(t)
    }
    fn omega_dot(&self, t: f64) -> f64 {
        (**self).omega_dot(t)
    }
    fn discontinuities(&self) -> &[f64] {
        (**self).discontinuities()
    }
    fn period(&self) -> Option<f64> {
        (**self).period()
    }
    fn smoothness(&self) -> Smoothness {
        (**self).smoothness()
    }
}

/// Errors from profile construction and evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum FrequencyError {
    /// A constructor parameter is outside its admissible range.
    InvalidParameter(&'static str),
    /// Evaluation was requested exactly at a declared jump instant.
    AtDiscontinuity(f64),
    /// The requested interval contains a declared jump instant strictly inside.
    CrossesDiscontinuity(f64),
    /// Unknown built-in profile name.
    UnknownProfile(String),
    /// A required parameter is missing from a built-in specification.
    MissingParameter(&'static str),
    /// Quadrature failed while accumulating the total variation.
    Quadrature(oracle::OracleError),
}

impl fmt::Display for FrequencyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParameter(what) => write!(f, "invalid profile parameter: {what}"),
            Self::AtDiscontinuity(t) => write!(f, "evaluation at declared discontinuity t = {t}"),
            Self::CrossesDiscontinuity(t) => {
                write!(
                    f,
                    "interval crosses declared discontinuity t = {t}; split there"
                )
            }
            Self::UnknownProfile(name) => write!(f, "unknown built-in profile `{name}`"),
            Self::MissingParameter(key) => write!(f, "missing profile parameter `{key}`"),
            Self::Quadrature(e) => write!(f, "total-variation quadrature failed: {e}"),
        }
    }
}

impl core::error::Error for FrequencyError {}

/// ζ(t) = ω̇(t)/ω²(t), the dimensionless relative variation of ω over one
/// characteristic time 1/ω.
pub fn zeta<P: Profile + ?Sized>(profile: &P, t: f64) -> Result<f64, FrequencyError> {
    if profile.discontinuities().contains(&t) {
        return Err(FrequencyError::AtDiscontinuity(t));
    }
    let w = profile.omega(t);
    Ok(profile.omega_dot(t) / (w * w))
}

/// Total variation of log ω between `t_star` and `t`:
/// g = ∫ |ω̇/ω| dz over the interval, always ≥ 0.
///
/// Equals |log(ω(t)/ω(t*))| when ω is monotone on the interval, and the
/// sum of such terms over monotonicity subintervals otherwise. Always
/// integrates |ω̇/ω| by adaptive quadrature rather than detecting
/// monotonicity. Errors out if a declared discontinuity lies strictly
/// inside the interval; the caller must split there.
pub fn total_variation<P: Profile + ?Sized>(
    profile: &P,
    t_star: f64,
    t: f64,
) -> Result<f64, FrequencyError> {
    total_variation_tol(profile, t_star, t, 1e-10)
}

/// [`total_variation`] with an explicit quadrature tolerance.
pub fn total_variation_tol<P: Profile + ?Sized>(
    profile: &P,
    t_star: f64,
    t: f64,
    tol: f64,
) -> Result<f64, FrequencyError> {
    let (lo, hi) = if t_star <= t {
        (t_star, t)
    } else {
        (t, t_star)
    };
    if let Some(&d) = profile
        .discontinuities()
        .iter()
        .find(|&&d| d > lo && d < hi)
    {
        return Err(FrequencyError::CrossesDiscontinuity(d));
    }
    let g = oracle::quadrature(
        |z| (profile.omega_dot(z) / profile.omega(z)).abs(),
        lo,
        hi,
        tol,
    )
    .map_err(FrequencyError::Quadrature)?;
    Ok(g.abs())
}

// ---------------------------------------------------------------------------
// Built-in profiles
// ---------------------------------------------------------------------------

/// Constant ω. Periodic with any period; an explicit one can be attached
/// for monodromy runs.
#[derive(Clone, Copy, Debug)]
pub struct Constant {
    omega: f64,
    period: Option<f64>,
}

impl Constant {
    pub fn new(omega: f64) -> Result<Self, FrequencyError> {
        if !(omega > 0.0) {
            return Err(FrequencyError::InvalidParameter(
                "constant profile needs omega > 0",
            ));
        }
        Ok(Self {
            omega,
            period: None,
        })
    }

    /// Attach a nominal period (constant ω is T-periodic for every T).
    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }
}

impl Profile for Constant {
    fn omega(&self, _t: f64) -> f64 {
        self.omega
    }
    fn omega_dot(&self, _t: f64) -> f64 {
        0.0
    }
    fn period(&self) -> Option<f64> {
        self.period
    }
}

/// Mathieu-type law ω(t) = ω̄ √(1 + η sin αt), period 2π/α.
#[derive(Clone, Copy, Debug)]
pub struct Mathieu {
    omega_bar: f64,
    eta: f64,
    alpha: f64,
    period: f64,
}

impl Mathieu {
    pub fn new(omega_bar: f64, eta: f64, alpha: f64) -> Result<Self, FrequencyError> {
        if !(omega_bar > 0.0) {
            return Err(FrequencyError::InvalidParameter(
                "mathieu needs omega_bar > 0",
            ));
        }
        if !(alpha > 0.0) {
            return Err(FrequencyError::InvalidParameter("mathieu needs alpha > 0"));
        }
        if !(eta.abs() < 1.0) {
            return Err(FrequencyError::InvalidParameter("mathieu needs |eta| < 1"));
        }
        Ok(Self {
            omega_bar,
            eta,
            alpha,
            period: 2.0 * core::f64::consts::PI / alpha,
        })
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Profile for Mathieu {
    fn omega(&self, t: f64) -> f64 {
        self.omega_bar * (1.0 + self.eta * (self.alpha * t).sin()).sqrt()
    }
    fn omega_dot(&self, t: f64) -> f64 {
        let s = 1.0 + self.eta * (self.alpha * t).sin();
        0.5 * self.omega_bar * self.eta * self.alpha * (self.alpha * t).cos() / s.sqrt()
    }
    fn period(&self) -> Option<f64> {
        Some(self.period)
    }
}

/// Smooth ramp ω̃(τ) = a + b tanh(τ - τ₀): C^∞ with derivative in L¹ and,
/// in fact, Schwartz-class.
#[derive(Clone, Copy, Debug)]
pub struct TanhRamp {
    base: f64,
    amplitude: f64,
    center: f64,
}

impl TanhRamp {
    pub fn new(base: f64, amplitude: f64) -> Result<Self, FrequencyError> {
        if !(base - amplitude.abs() > 0.0) {
            return Err(FrequencyError::InvalidParameter(
                "tanh ramp needs base - |amplitude| > 0",
            ));
        }
        Ok(Self {
            base,
            amplitude,
            center: 0.0,
        })
    }

    pub fn centered_at(mut self, center: f64) -> Self {
        self.center = center;
        self
    }
}

impl Profile for TanhRamp {
    fn omega(&self, t: f64) -> f64 {
        self.base + self.amplitude * (t - self.center).tanh()
    }
    fn omega_dot(&self, t: f64) -> f64 {
        let c = (t - self.center).cosh();
        self.amplitude / (c * c)
    }
}

/// C^∞ transition on [0, 1] built from f(x) = exp(-1/x):
/// S(x) = f(x)/(f(x) + f(1-x)). S ≡ 0 left of 0, ≡ 1 right of 1, and S'
/// has compact support [0, 1].
fn exp_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let f = (-1.0 / x).exp();
        let g = (-1.0 / (1.0 - x)).exp();
        f / (f + g)
    }
}

fn exp_step_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let f = (-1.0 / x).exp();
        let g = (-1.0 / (1.0 - x)).exp();
        let s = f + g;
        f * g * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / (s * s)
    }
}

/// Ramp ω̃(τ) = a + b S((τ - τ₀)/w) with S the C^∞ compact-support
/// transition above: dω̃/dτ is a C^∞ bump supported on [τ₀, τ₀ + w].
#[derive(Clone, Copy, Debug)]
pub struct BumpRamp {
    base: f64,
    amplitude: f64,
    start: f64,
    width: f64,
}

impl BumpRamp {
    pub fn new(base: f64, amplitude: f64, start: f64, width: f64) -> Result<Self, FrequencyError> {
        if !(base > 0.0) || !(base + amplitude > 0.0) {
            return Err(FrequencyError::InvalidParameter(
                "bump ramp needs positive endpoints",
            ));
        }
        if !(width > 0.0) {
            return Err(FrequencyError::InvalidParameter(
                "bump ramp needs width > 0",
            ));
        }
        Ok(Self {
            base,
            amplitude,
            start,
            width,
        })
    }
}

impl Profile for BumpRamp {
    fn omega(&self, t: f64) -> f64 {
        self.base + self.amplitude * exp_step((t - self.start) / self.width)
    }
    fn omega_dot(&self, t: f64) -> f64 {
        self.amplitude / self.width * exp_step_deriv((t - self.start) / self.width)
    }
}

/// Polynomial transition S_n on [0, 1] of class C^n (the smoothstep family):
/// S_n'(x) = c_n x^n (1-x)^n with c_n = (2n+1) C(2n, n).
fn smoothstep(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let c = smoothstep_norm(n);
    // term-by-term integral of c x^n (1-x)^n
    let mut acc = 0.0;
    let mut binom = 1.0f64; // C(n, j)
    for j in 0..=n {
        let p = (n + j + 1) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * x.powi((n + j + 1) as i32) / p;
        binom = binom * ((n - j) as f64) / ((j + 1) as f64);
    }
    c * acc
}

fn smoothstep_deriv(n: u32, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        smoothstep_norm(n) * x.powi(n as i32) * (1.0 - x).powi(n as i32)
    }
}

fn smoothstep_norm(n: u32) -> f64 {
    // (2n+1)!/(n!)^2 = (2n+1) C(2n, n)
    let mut binom = 1.0f64;
    for j in 0..n {
        binom = binom * ((2 * n - j) as f64) / ((j + 1) as f64);
    }
    (2 * n + 1) as f64 * binom
}

/// Ramp ω̃(τ) = a + b S_{k+1}((τ - τ₀)/w): exactly C^{k+1} at the knots,
/// with integrable derivatives through order k+1 — the profile family for
/// the O(ε^k) adiabatic experiments.
#[derive(Clone, Copy, Debug)]
pub struct SplineRamp {
    base: f64,
    amplitude: f64,
    start: f64,
    width: f64,
    k: u32,
}

impl SplineRamp {
    pub fn new(
        base: f64,
        amplitude: f64,
        start: f64,
        width: f64,
        k: u32,
    ) -> Result<Self, FrequencyError> {
        if !(base > 0.0) || !(base + amplitude > 0.0) {
            return Err(FrequencyError::InvalidParameter(
                "spline ramp needs positive endpoints",
            ));
        }
        if !(width > 0.0) {
            return Err(FrequencyError::InvalidParameter(
                "spline ramp needs width > 0",
            ));
        }
        if k > 16 {
            return Err(FrequencyError::InvalidParameter(
                "spline ramp supports k <= 16",
            ));
        }
        Ok(Self {
            base,
            amplitude,
            start,
            width,
            k,
        })
    }

    pub fn class(&self) -> u32 {
        self.k
    }
}

impl Profile for SplineRamp {
    fn omega(&self, t: f64) -> f64 {
        self.base + self.amplitude * smoothstep(self.k + 1, (t - self.start) / self.width)
    }
    fn omega_dot(&self, t: f64) -> f64 {
        self.amplitude / self.width * smoothstep_deriv(self.k + 1, (t - self.start) / self.width)
    }
    fn smoothness(&self) -> Smoothness {
        Smoothness::CK(self.k)
    }
}

/// Piecewise-constant law with a single declared jump at `t_jump`.
#[derive(Clone, Debug)]
pub struct Step {
    omega_minus: f64,
    omega_plus: f64,
    jump: [f64; 1],
}

impl Step {
    pub fn new(omega_minus: f64, omega_plus: f64, t_jump: f64) -> Result<Self, FrequencyError> {
        if !(omega_minus > 0.0) || !(omega_plus > 0.0) {
            return Err(FrequencyError::InvalidParameter(
                "step needs positive levels",
            ));
        }
        Ok(Self {
            omega_minus,
            omega_plus,
            jump: [t_jump],
        })
    }
}

impl Profile for Step {
    fn omega(&self, t: f64) -> f64 {
        if t < self.jump[0] {
            self.omega_minus
        } else {
            self.omega_plus
        }
    }
    fn omega_dot(&self, _t: f64) -> f64 {
        0.0
    }
    fn discontinuities(&self) -> &[f64] {
        &self.jump
    }
    fn smoothness(&self) -> Smoothness {
        Smoothness::PiecewiseC1
    }
}

/// Profile defined by a pair of closures (value, derivative).
#[derive(Clone, Copy)]
pub struct FnProfile<F, G> {
    value: F,
    derivative: G,
}

impl<F, G> FnProfile<F, G>
where
    F: Fn(f64) -> f64 + Send + Sync,
    G: Fn(f64) -> f64 + Send + Sync,
{
    pub fn new(value: F, derivative: G) -> Self {
        Self { value, derivative }
    }
}

impl<F, G> Profile for FnProfile<F, G>
where
    F: Fn(f64) -> f64 + Send + Sync,
    G: Fn(f64) -> f64 + Send + Sync,
{
    fn omega(&self, t: f64) -> f64 {
        (self.value)(t)
    }
    fn omega_dot(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }
}

/// Any built-in profile, behind one type so configs can construct profiles
/// by name.
#[derive(Clone, Debug)]
pub enum Builtin {
    Constant(Constant),
    Mathieu(Mathieu),
    TanhRamp(TanhRamp),
    BumpRamp(BumpRamp),
    SplineRamp(SplineRamp),
    Step(Step),
}

macro_rules! delegate {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            Builtin::Constant($p) => $e,
            Builtin::Mathieu($p) => $e,
            Builtin::TanhRamp($p) => $e,
            Builtin::BumpRamp($p) => $e,
            Builtin::SplineRamp($p) => $e,
            Builtin::Step($p) => $e,
        }
    };
}

impl Profile for Builtin {
    fn omega(&self, t: f64) -> f64 {
        delegate!(self, p => p.omega(t))
    }
    fn omega_dot(&self, t: f64) -> f64 {
        delegate!(self, p => p.omega_dot(t))
    }
    fn discontinuities(&self) -> &[f64] {
        delegate!(self, p => p.discontinuities())
    }
    fn period(&self) -> Option<f64> {
        delegate!(self, p => p.period())
    }
    fn smoothness(&self) -> Smoothness {
        delegate!(self, p => p.smoothness())
    }
}

/// Construct a built-in profile from its name and (key, value) parameters.
///
/// Recognised kinds and their keys:
/// - `constant`: `omega`, optional `period`
/// - `mathieu`: `omega_bar`, `eta`, `alpha`
/// - `tanh-ramp`: `base`, `amplitude`, optional `center`
/// - `bump-ramp`: `base`, `amplitude`, optional `start` (0), `width` (1)
/// - `spline-ramp`: `base`, `amplitude`, `k`, optional `start` (0), `width` (1)
/// - `step`: `omega_minus`, `omega_plus`, optional `t_jump` (0)
pub fn builtin(name: &str, params: &[(&str, f64)]) -> Result<Builtin, FrequencyError> {
    let get = |key: &'static str| -> Result<f64, FrequencyError> {
        params
            .iter()
            .find(|(k, _)| *k == key)
            .map(|&(_, v)| v)
            .ok_or(FrequencyError::MissingParameter(key))
    };
    let opt = |key: &str, default: f64| -> f64 {
        params
            .iter()
            .find(|(k, _)| *k == key)
            .map(|&(_, v)| v)
            .unwrap_or(default)
    };
    match name {
        "constant" => {
            let mut p = Constant::new(get("omega")?)?;
            if let Some(&(_, t)) = params.iter().find(|(k, _)| *k == "period") {
                p = p.with_period(t);
            }
            Ok(Builtin::Constant(p))
        }
        "mathieu" => Ok(Builtin::Mathieu(Mathieu::new(
            get("omega_bar")?,
            get("eta")?,
            get("alpha")?,
        )?)),
        "tanh-ramp" => Ok(Builtin::TanhRamp(
            TanhRamp::new(get("base")?, get("amplitude")?)?.centered_at(opt("center", 0.0)),
        )),
        "bump-ramp" => Ok(Builtin::BumpRamp(BumpRamp::new(
            get("base")?,
            get("amplitude")?,
            opt("start", 0.0),
            opt("width", 1.0),
        )?)),
        "spline-ramp" => Ok(Builtin::SplineRamp(SplineRamp::new(
            get("base")?,
            get("amplitude")?,
            opt("start", 0.0),
            opt("width", 1.0),
            get("k")? as u32,
        )?)),
        "step" => Ok(Builtin::Step(Step::new(
            get("omega_minus")?,
            get("omega_plus")?,
            opt("t_jump", 0.0),
        )?)),
        other => Err(FrequencyError::UnknownProfile(String::from(other))),
    }
}

// ---------------------------------------------------------------------------
// Slow-time families
// ---------------------------------------------------------------------------

/// Family ω(t; ε) = ω̃(εt) induced by a base law ω̃(τ) and a slow-time
/// parameter ε > 0. Implements [`Profile`] as the induced law in t.
#[derive(Clone, Debug)]
pub struct SlowTimeFamily<P> {
    base: P,
    epsilon: f64,
    disc: Vec<f64>,
}

impl<P: Profile> SlowTimeFamily<P> {
    pub fn new(base: P, epsilon: f64) -> Self {
        assert!(epsilon > 0.0, "slow-time parameter must be positive");
        let disc = base.discontinuities().iter().map(|d| d / epsilon).collect();
        Self {
            base,
            epsilon,
            disc,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The base law ω̃ in the slow time τ = εt.
    pub fn base(&self) -> &P {
        &self.base
    }

    /// ζ̃(τ) = (dω̃/dτ)/ω̃², so that ζ(t; ε) = ε ζ̃(εt).
    pub fn zeta_tilde(&self, tau: f64) -> f64 {
        let w = self.base.omega(tau);
        self.base.omega_dot(tau) / (w * w)
    }
}

impl<P: Profile> Profile for SlowTimeFamily<P> {
    fn omega(&self, t: f64) -> f64 {
        self.base.omega(self.epsilon * t)
    }
    fn omega_dot(&self, t: f64) -> f64 {
        self.epsilon * self.base.omega_dot(self.epsilon * t)
    }
    fn discontinuities(&self) -> &[f64] {
        &self.disc
    }
    fn period(&self) -> Option<f64> {
        self.base.period().map(|t| t / self.epsilon)
    }
    fn smoothness(&self) -> Smoothness {
        self.base.smoothness()
    }
}

/// sup |ω̇/ω| over [a, b] by dense sampling (n+1 points).
pub fn sup_log_derivative<P: Profile + ?Sized>(profile: &P, a: f64, b: f64, n: usize) -> f64 {
    util::sample_sup_abs(|t| profile.omega_dot(t) / profile.omega(t), a, b, n)
}

//! Adiabatic-invariance experiments in the slow-time family
//! `ω(t; ε) = ω̃(εt)`: windowed deviation of the action with the a-priori
//! bound, end-to-end scaling ΔI = O(ε^k) against the smoothness class of
//! ω̃, the first-order asymptotics of `(ψ, 𝓘)`, and order checks for the
//! Picard corrections in ε.

use alloc::vec::Vec;
use core::fmt;

// method syntax for the float transcendentals in the no_std build
#[allow(unused_imports)]
use num_traits::Float;

use crate::angle_action::{self, AngleActionError, Grid};
use crate::frequency::{Profile, SlowTimeFamily, Smoothness};
use crate::oracle::{self, IntegOptions, OracleError};
use crate::util;

/// Errors from the adiabatic experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AdiabaticError {
    Parameter(&'static str),
    Oracle(OracleError),
    AngleAction(AngleActionError),
}

impl fmt::Display for AdiabaticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parameter(what) => write!(f, "invalid parameter: {what}"),
            Self::Oracle(e) => write!(f, "oracle failure: {e}"),
            Self::AngleAction(e) => write!(f, "angle-action failure: {e}"),
        }
    }
}

impl core::error::Error for AdiabaticError {}

impl From<OracleError> for AdiabaticError {
    fn from(e: OracleError) -> Self {
        Self::Oracle(e)
    }
}

impl From<AngleActionError> for AdiabaticError {
    fn from(e: AngleActionError) -> Self {
        Self::AngleAction(e)
    }
}

/// Windowed adiabatic-invariance measurement over t ∈ [0, T/ε], with the
/// a-priori bound built from the φ-domain constants c₀ = sup|v̂| and
/// c₁ = sup|v̂'|:
///
/// ```text
/// M(ε) = ε { c₀ + T ω_u/(2 - εc₀) · [ c₁/(1 - εc₀/2) + c₀² ] }
/// |𝓘(t) - 𝓘(0)| < 𝓘(0) [e^{M(ε)} - 1]
/// ```
#[derive(Clone, Copy, Debug)]
pub struct WindowReport {
    pub epsilon: f64,
    pub i0: f64,
    /// sup over the window of |𝓘(t) - 𝓘(0)|.
    pub max_deviation: f64,
    pub m_eps: f64,
    /// 𝓘(0) (e^{M(ε)} - 1).
    pub bound: f64,
    /// The derivation needs ε c₀ < 1; outside that regime the bound value
    /// is reported but carries no guarantee.
    pub bound_applicable: bool,
    pub c0: f64,
    pub c1: f64,
    pub omega_sup: f64,
}

/// Numerical sup constants of the φ-reparametrized drive: c₀ = sup|ζ̃|,
/// c₁ = sup|ζ̃'/ω̃| over τ ∈ [0, T], by dense sampling (4096 points).
/// These are measured values, not proved suprema.
pub fn phase_domain_constants<P: Profile>(family: &SlowTimeFamily<P>, t_slow: f64) -> (f64, f64) {
    let n = 4096;
    let mut c0 = 0.0f64;
    let mut c1 = 0.0f64;
    for i in 0..=n {
        let tau = t_slow * i as f64 / n as f64;
        c0 = c0.max(family.zeta_tilde(tau).abs());
        let h = 1e-6 * tau.abs().max(1.0);
        let dz = (family.zeta_tilde(tau + h) - family.zeta_tilde(tau - h)) / (2.0 * h);
        c1 = c1.max((dz / family.base().omega(tau)).abs());
    }
    (c0, c1)
}

/// Integrate over t ∈ [0, T/ε] from (q0, p0) and report the windowed
/// action deviation together with the a-priori bound.
pub fn adiabatic_window<P: Profile>(
    family: &SlowTimeFamily<P>,
    t_slow: f64,
    q0: f64,
    p0: f64,
    tol: f64,
) -> Result<WindowReport, AdiabaticError> {
    if !(t_slow > 0.0) {
        return Err(AdiabaticError::Parameter("slow horizon must be positive"));
    }
    let eps = family.epsilon();
    let w0 = family.omega(0.0);
    let aa0 = angle_action::to_angle_action(
        &oracle::PhaseState {
            t: 0.0,
            q: q0,
            p: p0,
        },
        w0,
    )?;
    let t_end = t_slow / eps;
    let aa = oracle::integrate_angle_action_opts(
        family,
        aa0.psi,
        aa0.i,
        0.0,
        t_end,
        &IntegOptions::with_tol(tol),
    )?;
    let mut dev = 0.0f64;
    let n = 4096;
    for i in 0..=n {
        let t = t_end * i as f64 / n as f64;
        dev = dev.max((aa.action(t) - aa0.i).abs());
    }
    let (c0, c1) = phase_domain_constants(family, t_slow);
    let omega_sup = util::sample_sup_abs(|tau| family.base().omega(tau), 0.0, t_slow, 4096);
    let m_eps = eps
        * (c0 + t_slow * omega_sup / (2.0 - eps * c0) * (c1 / (1.0 - 0.5 * eps * c0) + c0 * c0));
    Ok(WindowReport {
        epsilon: eps,
        i0: aa0.i,
        max_deviation: dev,
        m_eps,
        bound: aa0.i * (m_eps.exp() - 1.0),
        bound_applicable: eps * c0 < 1.0,
        c0,
        c1,
        omega_sup,
    })
}

/// End-to-end scaling of the action change across a frequency ramp,
/// fitted as ΔI ∝ ε^slope on a log-log grid of ε values.
#[derive(Clone, Debug)]
pub struct ScalingReport {
    pub epsilons: Vec<f64>,
    pub deltas: Vec<f64>,
    pub fitted_slope: f64,
    /// max |log-log fit residual| (fit confidence).
    pub max_residual: f64,
    pub smoothness: Smoothness,
}

/// Slow-time window [τ_a, τ_b] outside of which the drive is negligible:
/// |dω̃/dτ| < 1e-12 · max |dω̃/dτ|, scanned over [lo, hi] in 8192 steps
/// and padded by one step. For compact-support ramps this recovers the
/// support; for Schwartz tails it truncates at the stated threshold.
pub fn tail_window<P: Profile + ?Sized>(base: &P, lo: f64, hi: f64) -> (f64, f64) {
    let n = 8192;
    let step = (hi - lo) / n as f64;
    let peak = util::sample_sup_abs(|tau| base.omega_dot(tau), lo, hi, n);
    let floor = 1e-12 * peak;
    let mut a = hi;
    let mut b = lo;
    for i in 0..=n {
        let tau = lo + step * i as f64;
        if base.omega_dot(tau).abs() > floor {
            a = a.min(tau);
            b = b.max(tau);
        }
    }
    (a - step, b + step)
}

/// Measure ΔI(ε) = |𝓘(t_end) - 𝓘(t_start)| over t ∈ [τ_a/ε, τ_b/ε] for
/// each ε, starting from (q, p) = (1, 0) at the left edge, and fit the
/// log-log slope. Requires at least 4 ε values spanning a factor ≥ 8.
pub fn scaling_experiment<P: Profile + Clone>(
    base: &P,
    tau_window: (f64, f64),
    epsilons: &[f64],
    tol: f64,
) -> Result<ScalingReport, AdiabaticError> {
    if epsilons.len() < 4 {
        return Err(AdiabaticError::Parameter("need at least 4 epsilon values"));
    }
    let e_max = epsilons.iter().cloned().fold(0.0f64, f64::max);
    let e_min = epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(e_min > 0.0) || e_max / e_min < 8.0 {
        return Err(AdiabaticError::Parameter(
            "epsilon values must span a factor of at least 8",
        ));
    }
    let (tau_a, tau_b) = tau_window;
    if !(tau_b > tau_a) {
        return Err(AdiabaticError::Parameter("empty slow-time window"));
    }
    let mut deltas = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let family = SlowTimeFamily::new(base.clone(), eps);
        let (t_a, t_b) = (tau_a / eps, tau_b / eps);
        let w_a = family.omega(t_a);
        let aa0 = angle_action::to_angle_action(
            &oracle::PhaseState {
                t: t_a,
                q: 1.0,
                p: 0.0,
            },
            w_a,
        )?;
        let aa = oracle::integrate_angle_action_opts(
            &family,
            aa0.psi,
            aa0.i,
            t_a,
            t_b,
            &IntegOptions::with_tol(tol),
        )?;
        deltas.push((aa.end_state().i - aa0.i).abs());
    }
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = deltas.iter().map(|d| d.max(1e-300).ln()).collect();
    let (slope, _, resid) = util::fit_line(&xs, &ys);
    Ok(ScalingReport {
        epsilons: epsilons.to_vec(),
        deltas,
        fitted_slope: slope,
        max_residual: resid,
        smoothness: base.smoothness(),
    })
}

/// First-order asymptotics in ε (anchored at t* = 0, ζ̃ = ω̃'/ω̃²):
///
/// ```text
/// ψ(t) ≈ φ(t) - (ε/4)[cos(2φ(t)) ζ̃(εt) - cos(2ψ₀) ζ̃(0)]
/// 𝓘(t) ≈ 𝓘₀ {1 - (ε/2)[sin(2φ(t)) ζ̃(εt) - sin(2ψ₀) ζ̃(0)]}
/// ```
pub fn asymptotic_psi_i<P: Profile>(
    family: &SlowTimeFamily<P>,
    psi0: f64,
    i0: f64,
    t: f64,
) -> Result<(f64, f64), AdiabaticError> {
    let eps = family.epsilon();
    let phi = psi0 + oracle::quadrature(|z| family.omega(z), 0.0, t, 1e-12)?;
    let z_t = family.zeta_tilde(eps * t);
    let z_0 = family.zeta_tilde(0.0);
    let psi = phi - 0.25 * eps * ((2.0 * phi).cos() * z_t - (2.0 * psi0).cos() * z_0);
    let i = i0 * (1.0 - 0.5 * eps * ((2.0 * phi).sin() * z_t - (2.0 * psi0).sin() * z_0));
    Ok((psi, i))
}

/// Measured ε-orders of the Picard corrections over a fixed slow window:
/// σ⁽ʰ⁾ = sup|ψ - ψ⁽ʰ⁻¹⁾| and χ⁽ʰ⁾ = sup|ψ⁽ʰ⁾ - ψ⁽ʰ⁻¹⁾| both scale as ε^h.
#[derive(Clone, Debug)]
pub struct OrderSlopes {
    pub h: usize,
    pub epsilons: Vec<f64>,
    pub sigma_sups: Vec<f64>,
    pub chi_sups: Vec<f64>,
    pub sigma_slope: f64,
    pub chi_slope: f64,
}

/// Fit the ε-order of σ⁽ʰ⁾ and χ⁽ʰ⁾ over the fixed window t ∈ [0, t_horizon].
///
/// The window must not scale with 1/ε: over windows of length ~1/ε the
/// second-order secular phase drift accumulates to O(ε) and masks the
/// fixed-time orders the expansion is about.
pub fn order_check_sigma<P: Profile + Clone>(
    base: &P,
    t_horizon: f64,
    epsilons: &[f64],
    h: usize,
    tol: f64,
) -> Result<OrderSlopes, AdiabaticError> {
    if h == 0 {
        return Err(AdiabaticError::Parameter("order must be at least 1"));
    }
    if epsilons.len() < 2 {
        return Err(AdiabaticError::Parameter("need at least 2 epsilon values"));
    }
    let psi0 = 0.3;
    let mut sigma_sups = Vec::with_capacity(epsilons.len());
    let mut chi_sups = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let family = SlowTimeFamily::new(base.clone(), eps);
        let t_end = t_horizon;
        let grid = Grid::dense(&family, 0.0, t_end, 0.0, 64.0)?;
        let series = angle_action::picard_psi(&family, psi0, &grid, h)?;
        let aa = oracle::integrate_angle_action_opts(
            &family,
            psi0,
            1.0,
            0.0,
            t_end,
            &IntegOptions::with_tol(tol),
        )?;
        let mut sig = 0.0f64;
        let mut chi = 0.0f64;
        for (j, &t) in grid.points().iter().enumerate() {
            sig = sig.max((aa.psi(t) - series.psi_values(h - 1)[j]).abs());
            chi = chi.max((series.psi_values(h)[j] - series.psi_values(h - 1)[j]).abs());
        }
        sigma_sups.push(sig);
        chi_sups.push(chi);
    }
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let s_ys: Vec<f64> = sigma_sups.iter().map(|d| d.max(1e-300).ln()).collect();
    let c_ys: Vec<f64> = chi_sups.iter().map(|d| d.max(1e-300).ln()).collect();
    let (sigma_slope, _, _) = util::fit_line(&xs, &s_ys);
    let (chi_slope, _, _) = util::fit_line(&xs, &c_ys);
    Ok(OrderSlopes {
        h,
        epsilons: epsilons.to_vec(),
        sigma_sups,
        chi_sups,
        sigma_slope,
        chi_slope,
    })
}

/// Cross-check of the φ-domain form of the phase equation,
/// dψ̂/dφ = [1 + ε (v̂/2) sin 2ψ̂]/ε with dτ/dφ = 1/ω̃(τ), against the
/// t-domain oracle after the change of variables. Returns the sup
/// discrepancy in ψ over the window.
pub fn phase_domain_check<P: Profile>(
    family: &SlowTimeFamily<P>,
    psi0: f64,
    tau_end: f64,
    tol: f64,
) -> Result<f64, AdiabaticError> {
    let eps = family.epsilon();
    let base = family.base();
    // slow phase anchored at φ(0) = ψ(0); its span is ∫ ω̃ dτ over the
    // slow window
    let phi_span = oracle::quadrature(|tau| base.omega(tau), 0.0, tau_end, 1e-12)?;
    let rhs = |_phi: f64, y: &[f64; 2]| {
        let (psi_hat, tau) = (y[0], y[1]);
        let v_hat = family.zeta_tilde(tau);
        let w = base.omega(tau);
        [
            (1.0 + eps * 0.5 * v_hat * (2.0 * psi_hat).sin()) / eps,
            1.0 / w,
        ]
    };
    let phase_traj = oracle::integrate(
        rhs,
        psi0,
        [psi0, 0.0],
        psi0 + phi_span,
        &IntegOptions::with_tol(tol),
    )?;
    let aa = oracle::integrate_angle_action_opts(
        family,
        psi0,
        1.0,
        0.0,
        tau_end / eps,
        &IntegOptions::with_tol(tol),
    )?;
    let mut worst = 0.0f64;
    let n = 512;
    for i in 0..=n {
        let phi = psi0 + phi_span * i as f64 / n as f64;
        let y = phase_traj.eval(phi);
        let t = y[1] / eps;
        worst = worst.max((y[0] - aa.psi(t)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::{BumpRamp, Constant, SplineRamp, TanhRamp};

    fn tanh_family(eps: f64) -> SlowTimeFamily<TanhRamp> {
        SlowTimeFamily::new(TanhRamp::new(1.0, 0.25).unwrap().centered_at(2.0), eps)
    }

    #[test]
    fn window_constant_base_has_no_deviation() {
        let fam = SlowTimeFamily::new(Constant::new(1.3).unwrap(), 0.05);
        let rep = adiabatic_window(&fam, 4.0, 1.0, 0.0, 1e-12).unwrap();
        assert!(rep.max_deviation < 1e-10);
        assert_eq!(rep.c0, 0.0);
        assert_eq!(rep.bound, 0.0);
    }

    #[test]
    fn window_deviation_shrinks_linearly_and_respects_bound() {
        let mut last = f64::INFINITY;
        for &eps in &[0.1, 0.05, 0.025] {
            let fam = tanh_family(eps);
            let rep = adiabatic_window(&fam, 4.0, 1.0, 0.0, 1e-12).unwrap();
            assert!(rep.bound_applicable, "eps c0 = {}", eps * rep.c0);
            assert!(
                rep.max_deviation <= rep.bound,
                "eps = {eps}: deviation {:.3e} above bound {:.3e}",
                rep.max_deviation,
                rep.bound
            );
            // deviation halves at least linearly in eps
            assert!(rep.max_deviation <= 0.6 * last, "eps = {eps}");
            last = rep.max_deviation;
        }
    }

    #[test]
    fn hamiltonian_tracks_frequency_on_monotone_stretch() {
        // H grows where omega grows (tanh ramp is nondecreasing)
        let fam = tanh_family(0.05);
        let t_end = 4.0 / 0.05;
        let qp = oracle::integrate_qp(&fam, 1.0, 0.0, 0.0, t_end, 1e-12).unwrap();
        let mut prev = qp.eval(0.0).hamiltonian(fam.omega(0.0));
        for i in 1..=400 {
            let t = t_end * i as f64 / 400.0;
            let h = qp.eval(t).hamiltonian(fam.omega(t));
            assert!(h >= prev - 1e-9, "H dipped at t = {t}");
            prev = h;
        }
    }

    #[test]
    fn scaling_experiment_validates_input() {
        let base = SplineRamp::new(1.0, 0.5, 0.0, 1.0, 2).unwrap();
        assert!(matches!(
            scaling_experiment(&base, (-0.1, 1.1), &[0.1, 0.05], 1e-12),
            Err(AdiabaticError::Parameter(_))
        ));
        assert!(matches!(
            scaling_experiment(&base, (-0.1, 1.1), &[0.1, 0.09, 0.08, 0.07], 1e-12),
            Err(AdiabaticError::Parameter(_))
        ));
    }

    #[test]
    fn scaling_spline_ramp_shows_power_law() {
        // C^{k+1} ramp with k = 2. The O(ε^k) guarantee is an upper
        // bound; the actual end-to-end decay is set by the first jumping
        // derivative at the knots (the 4th for this family), so the
        // measured slope sits near 4. Ramp width 1.6 keeps the two knot
        // contributions from cancelling at the probed ε values.
        let base = SplineRamp::new(1.0, 0.3, 0.0, 1.6, 2).unwrap();
        let rep =
            scaling_experiment(&base, (-0.08, 1.68), &[0.2, 0.1, 0.05, 0.025], 1e-13).unwrap();
        assert!(
            rep.deltas.windows(2).all(|w| w[1] < w[0]),
            "{:?}",
            rep.deltas
        );
        assert!(
            rep.fitted_slope > 1.7 && (3.5..5.2).contains(&rep.fitted_slope),
            "slope {} with deltas {:?}",
            rep.fitted_slope,
            rep.deltas
        );
        assert_eq!(rep.smoothness, Smoothness::CK(2));
    }

    #[test]
    fn scaling_bump_ramp_beats_spline() {
        let spline = SplineRamp::new(1.0, 0.3, 0.0, 1.6, 2).unwrap();
        let bump = BumpRamp::new(1.0, 0.3, 0.0, 1.6).unwrap();
        let eps = [0.2, 0.1, 0.05, 0.025];
        let rs = scaling_experiment(&spline, (-0.08, 1.68), &eps, 1e-13).unwrap();
        let rb = scaling_experiment(&bump, (-0.08, 1.68), &eps, 1e-13).unwrap();
        assert!(
            rb.fitted_slope > rs.fitted_slope,
            "bump slope {} vs spline slope {}",
            rb.fitted_slope,
            rs.fitted_slope
        );
    }

    #[test]
    fn asymptotics_exact_at_start_and_beat_zeroth_order() {
        let fam = tanh_family(0.05);
        let (psi0, i0) = (0.7, 1.3);
        let (p, i) = asymptotic_psi_i(&fam, psi0, i0, 0.0).unwrap();
        assert!((p - psi0).abs() < 1e-12 && (i - i0).abs() < 1e-12);

        // at t = 40 the first-order formula beats the bare phase clearly
        let t = 40.0;
        let aa = oracle::integrate_angle_action(&fam, psi0, i0, 0.0, t, 1e-12).unwrap();
        let truth = aa.eval(t);
        let (p1, i1) = asymptotic_psi_i(&fam, psi0, i0, t).unwrap();
        let phi = psi0 + oracle::quadrature(|z| fam.omega(z), 0.0, t, 1e-12).unwrap();
        assert!((p1 - truth.psi).abs() < (phi - truth.psi).abs() / 3.0);
        assert!((i1 - truth.i).abs() < (i0 - truth.i).abs() / 3.0);
    }

    #[test]
    fn picard_corrections_scale_with_eps_order() {
        // drive active around t = 0 for every ε (ramp centered at τ = 0),
        // fixed time window
        let base = TanhRamp::new(1.0, 0.25).unwrap();
        let o1 = order_check_sigma(&base, 10.0, &[0.2, 0.1, 0.05], 1, 1e-12).unwrap();
        assert!(
            (o1.sigma_slope - 1.0).abs() < 0.3,
            "sigma slope {}",
            o1.sigma_slope
        );
        assert!(
            (o1.chi_slope - 1.0).abs() < 0.3,
            "chi slope {}",
            o1.chi_slope
        );
        // the ε² coefficient converges slowly (an O(ε³) term with the
        // opposite sign is ~3x larger at these drives), so probe further
        // into the asymptotic regime
        let o2 = order_check_sigma(&base, 10.0, &[0.05, 0.025, 0.0125], 2, 1e-12).unwrap();
        assert!(
            (o2.sigma_slope - 2.0).abs() < 0.35,
            "sigma slope {}",
            o2.sigma_slope
        );
        assert!(
            (o2.chi_slope - 2.0).abs() < 0.35,
            "chi slope {}",
            o2.chi_slope
        );

        // constant base: all corrections vanish identically
        let flat = Constant::new(1.0).unwrap();
        let oc = order_check_sigma(&flat, 2.0, &[0.2, 0.1], 1, 1e-12).unwrap();
        assert!(oc.sigma_sups.iter().all(|&v| v < 1e-9));
        assert!(oc.chi_sups.iter().all(|&v| v < 1e-12));
    }

    #[test]
    fn phase_domain_form_reproduces_oracle() {
        let fam = tanh_family(0.05);
        let worst = phase_domain_check(&fam, 0.4, 2.0, 1e-12).unwrap();
        assert!(worst < 1e-8, "phase-domain discrepancy {worst:.3e}");
    }

    #[test]
    fn tail_window_recovers_compact_support() {
        // support is [0.3, 1.5]; the exp-step derivative dips below the
        // 1e-12 threshold a little inside the mathematical support
        let bump = BumpRamp::new(1.0, 0.5, 0.3, 1.2).unwrap();
        let (a, b) = tail_window(&bump, -5.0, 5.0);
        assert!(a > 0.29 && a < 0.40, "a = {a}");
        assert!(b > 1.40 && b < 1.51, "b = {b}");
    }
}

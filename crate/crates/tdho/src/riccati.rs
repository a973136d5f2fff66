//! Local Riccati reductions of the oscillator and the interlaced zero
//! sequence of `q, q̇`.
//!
//! Between zeros of `q` the ratio `r = q̇/q` obeys `ṙ = -ω² - r²`; between
//! zeros of `q̇` the inverse `s = q/q̇` obeys `ṡ = 1 + ω²s²`. Either
//! reduction recovers `q` by quadrature. The zeros themselves interlace
//! and are pinned down here through the unwrapped angle ψ: the special
//! instants are exactly where ψ crosses multiples of π/2, which is
//! numerically benign, unlike the Riccati blow-ups at the same points.

use alloc::vec::Vec;
use core::fmt;

// method syntax for the float transcendentals in the no_std build
#[allow(unused_imports)]
use num_traits::Float;

use crate::angle_action::{Grid, Parity};
use crate::frequency::Profile;
use crate::oracle::{self, IntegOptions, OracleError};
use crate::util;

/// Which first-order reduction is in play.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiccatiKind {
    /// r = q̇/q, finite between consecutive zeros of q.
    R,
    /// s = q/q̇, finite between consecutive zeros of q̇.
    S,
}

/// Errors from zero localization and Riccati iterates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RiccatiError {
    /// inf ω ≤ 0 on the requested window.
    NonPositiveFrequency {
        t: f64,
    },
    /// The trivial solution has no zero structure.
    TrivialSolution,
    /// Parameter outside its admissible range.
    Parameter(&'static str),
    Oracle(OracleError),
}

impl fmt::Display for RiccatiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveFrequency { t } => {
                write!(f, "omega is not positive near t = {t}")
            }
            Self::TrivialSolution => write!(f, "(q0, p0) = (0, 0) has no zero sequence"),
            Self::Parameter(what) => write!(f, "invalid parameter: {what}"),
            Self::Oracle(e) => write!(f, "oracle failure: {e}"),
        }
    }
}

impl core::error::Error for RiccatiError {}

impl From<OracleError> for RiccatiError {
    fn from(e: OracleError) -> Self {
        Self::Oracle(e)
    }
}

/// Right-hand side of the Riccati equations:
/// `ṙ = -ω² - r²` or `ṡ = 1 + ω²s²`.
pub fn riccati_rhs(kind: RiccatiKind, value: f64, omega: f64) -> f64 {
    match kind {
        RiccatiKind::R => -omega * omega - value * value,
        RiccatiKind::S => 1.0 + omega * omega * value * value,
    }
}

/// Working range beyond which iterate values are treated as diverged; the
/// reduction is only meant between the blow-up points.
pub const RICCATI_RANGE: f64 = 1e6;

/// Picard iterates of a Riccati variable on a grid, starting from the
/// constant iterate v⁽⁰⁾ ≡ v*:
/// `r⁽ʰ⁾ = r* - ∫ [(r⁽ʰ⁻¹⁾)² + ω²] dz`, `s⁽ʰ⁾ = s* + ∫ [1 + ω²(s⁽ʰ⁻¹⁾)²] dz`.
#[derive(Clone, Debug)]
pub struct RiccatiIterates {
    pub kind: RiccatiKind,
    grid: Grid,
    values: Vec<Vec<f64>>,
    /// First grid index at which the last iterate left the working range,
    /// if any; entries from there on are not trustworthy.
    pub truncated_at: Option<usize>,
}

impl RiccatiIterates {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    /// Samples of the h-th iterate.
    pub fn values(&self, h: usize) -> &[f64] {
        &self.values[h]
    }

    /// Assemble iterates from explicit samples (mainly for tests and
    /// reconstruction from externally computed ratios).
    pub fn from_samples(kind: RiccatiKind, grid: Grid, samples: Vec<f64>) -> Self {
        let truncated_at = samples
            .iter()
            .position(|v| !v.is_finite() || v.abs() > RICCATI_RANGE);
        Self {
            kind,
            grid,
            values: alloc::vec![samples],
            truncated_at,
        }
    }
}

/// Build Riccati Picard iterates through the given order. The grid must
/// stay inside one interval where the chosen variable is finite; blow-up
/// past the working range is reported through `truncated_at`.
pub fn riccati_picard<P: Profile + ?Sized>(
    kind: RiccatiKind,
    profile: &P,
    v_star: f64,
    grid: &Grid,
    order: usize,
) -> RiccatiIterates {
    let ts = grid.points();
    let star = grid.star_index();
    let n = ts.len();
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    values.push(alloc::vec![v_star; n]);
    for _h in 1..=order {
        let prev = &values[values.len() - 1];
        let integrand = |cell: usize, z: f64| {
            let v = util::interp_cubic(ts, prev, cell, z);
            riccati_rhs(kind, v, profile.omega(z))
        };
        let cum = util::cumulative_gl5(ts, star, integrand);
        values.push(cum.iter().map(|&c| v_star + c).collect());
    }
    let truncated_at = values[order]
        .iter()
        .position(|v| !v.is_finite() || v.abs() > RICCATI_RANGE);
    RiccatiIterates {
        kind,
        grid: grid.clone(),
        values,
        truncated_at,
    }
}

/// First-order closed form from the constant starting iterate:
/// `r⁽¹⁾(t) = r* - r*²(t - t*) - ∫ ω² dz`.
pub fn first_order_r<P: Profile + ?Sized>(
    profile: &P,
    r_star: f64,
    t_star: f64,
    t: f64,
) -> Result<f64, RiccatiError> {
    let int_w2 = oracle::quadrature(|z| profile.omega(z) * profile.omega(z), t_star, t, 1e-12)?;
    Ok(r_star - r_star * r_star * (t - t_star) - int_w2)
}

/// The matching first-order amplitude
/// `q⁽¹⁾(t) = q* exp{r*(t-t*) - r*²(t-t*)²/2 - ∫ (t-z) ω²(z) dz}`;
/// with `q(t*) = 1, q̇(t*) = 0` this reduces to `exp{-∫ (t-z) ω² dz}`, a
/// good small-time approximant.
pub fn q_first_order<P: Profile + ?Sized>(
    profile: &P,
    q_star: f64,
    r_star: f64,
    t_star: f64,
    t: f64,
) -> Result<f64, RiccatiError> {
    let dt = t - t_star;
    let kernel = oracle::quadrature(
        |z| (t - z) * profile.omega(z) * profile.omega(z),
        t_star,
        t,
        1e-12,
    )?;
    Ok(q_star * (r_star * dt - 0.5 * r_star * r_star * dt * dt - kernel).exp())
}

/// Rebuild the amplitude from the top Riccati iterate by quadrature:
/// `q(t) = q* exp ∫ r dz` (kind R) or `q* exp ∫ dz/s` (kind S).
/// Valid on stretches where the integrand stays finite.
pub fn reconstruct_q(iterates: &RiccatiIterates, q_star: f64) -> Vec<f64> {
    let ts = iterates.grid.points();
    let star = iterates.grid.star_index();
    let top = iterates.values(iterates.order());
    let integrand = |cell: usize, z: f64| {
        let v = util::interp_cubic(ts, top, cell, z);
        match iterates.kind {
            RiccatiKind::R => v,
            RiccatiKind::S => 1.0 / v,
        }
    };
    let cum = util::cumulative_gl5(ts, star, integrand);
    cum.iter().map(|&c| q_star * c.exp()).collect()
}

// ---------------------------------------------------------------------------
// Zero sequences
// ---------------------------------------------------------------------------

/// One located special point: a zero of q (even parity) or of q̇ (odd).
#[derive(Clone, Copy, Debug)]
pub struct Zero {
    /// Index h: the unwrapped phase satisfies ψ(tₕ) = hπ/2, with ψ(t0)
    /// normalized into [0, 2π).
    pub h: i64,
    pub t: f64,
    pub parity: Parity,
    /// Final bisection bracket width (localization certificate).
    pub bracket: f64,
}

/// Length certificate for one inter-zero gap from the interval-local
/// frequency range: π/(2 ω_sup) ≤ t_{h+1} - t_h ≤ π/(2 ω_inf).
#[derive(Clone, Copy, Debug)]
pub struct GapCertificate {
    pub gap: f64,
    pub omega_inf: f64,
    pub omega_sup: f64,
    pub lower: f64,
    pub upper: f64,
}

impl GapCertificate {
    pub fn holds(&self) -> bool {
        self.lower <= self.gap + 1e-9 && self.gap <= self.upper + 1e-9
    }
}

/// The interlaced zeros of one oscillator solution on a window, with
/// parity tags, quadrant bookkeeping, and per-gap length certificates.
#[derive(Clone, Debug)]
pub struct ZeroSequence {
    zeros: Vec<Zero>,
    gaps: Vec<GapCertificate>,
}

impl ZeroSequence {
    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    /// Certificates for the gaps between consecutive located zeros.
    pub fn gaps(&self) -> &[GapCertificate] {
        &self.gaps
    }

    /// Quadrant of the phase plane occupied on the open interval
    /// ]tₕ, tₕ₊₁[, counted 1..4 in the direction of the motion:
    /// (+,+), (+,-), (-,-), (-,+) in (q, p).
    pub fn quadrant(h: i64) -> u8 {
        (h.rem_euclid(4) as u8) + 1
    }

    /// Expected signs of (q, p) strictly between tₕ and tₕ₊₁.
    pub fn quadrant_signs(h: i64) -> (f64, f64) {
        match h.rem_euclid(4) {
            0 => (1.0, 1.0),
            1 => (1.0, -1.0),
            2 => (-1.0, -1.0),
            _ => (-1.0, 1.0),
        }
    }
}

/// Locate every zero of q and q̇ in [t0, t_max] for the solution with
/// initial data (q0, p0) at t0.
///
/// The instants are found as the (transversal) crossings of the unwrapped
/// oracle phase through multiples of π/2, then each is refined by
/// bisection on the sign of q (even h) or p (odd h) down to a bracket of
/// about 1e-11, recorded as the certificate.
pub fn find_zero_sequence<P: Profile + ?Sized>(
    profile: &P,
    q0: f64,
    p0: f64,
    t0: f64,
    t_max: f64,
) -> Result<ZeroSequence, RiccatiError> {
    if q0 == 0.0 && p0 == 0.0 {
        return Err(RiccatiError::TrivialSolution);
    }
    if !(t_max > t0) {
        return Err(RiccatiError::Parameter("need t_max > t0"));
    }
    // inf omega > 0 on the window, by dense sampling
    let n_check = 4096;
    for i in 0..=n_check {
        let t = t0 + (t_max - t0) * i as f64 / n_check as f64;
        if !(profile.omega(t) > 0.0) {
            return Err(RiccatiError::NonPositiveFrequency { t });
        }
    }

    let tol = 1e-12;
    let w0 = profile.omega(t0);
    let mut psi0 = (w0 * q0).atan2(p0);
    if psi0 < 0.0 {
        psi0 += 2.0 * core::f64::consts::PI;
    }
    let i0 = (p0 * p0 + w0 * w0 * q0 * q0) / (2.0 * w0);
    let aa = oracle::integrate_angle_action_opts(
        profile,
        psi0,
        i0,
        t0,
        t_max,
        &IntegOptions::with_tol(tol),
    )?;
    let qp = oracle::integrate_qp_opts(profile, q0, p0, t0, t_max, &IntegOptions::with_tol(tol))?;

    let half_pi = core::f64::consts::FRAC_PI_2;
    let w_sup = util::sample_sup_abs(|t| profile.omega(t), t0, t_max, n_check);
    let scan_dt = half_pi / w_sup / 16.0;
    let n_scan = ((t_max - t0) / scan_dt).ceil() as usize + 1;

    let mut zeros: Vec<Zero> = Vec::new();
    // t0 itself may sit exactly on a special point
    let m0 = (psi0 / half_pi).round();
    if (psi0 - m0 * half_pi).abs() < 1e-9 {
        let h = m0 as i64;
        zeros.push(Zero {
            h,
            t: t0,
            parity: if h % 2 == 0 {
                Parity::Even
            } else {
                Parity::Odd
            },
            bracket: 0.0,
        });
    }

    let mut next_level = ((psi0 / half_pi + 1e-9).floor() + 1.0) * half_pi;
    let mut t_prev = t0;
    for i in 1..=n_scan {
        let t = (t0 + (t_max - t0) * i as f64 / n_scan as f64).min(t_max);
        let psi = aa.psi(t);
        // each level is crossed upward exactly once (ψ̇ = ω > 0 on levels)
        while psi >= next_level {
            let h = (next_level / half_pi).round() as i64;
            let parity = if h % 2 == 0 {
                Parity::Even
            } else {
                Parity::Odd
            };
            zeros.push(refine_zero(&qp, parity, t_prev, t, h));
            next_level += half_pi;
        }
        t_prev = t;
    }

    // per-gap certificates from the interval-local frequency range
    let mut gaps = Vec::new();
    for w in zeros.windows(2) {
        let (a, b) = (w[0].t, w[1].t);
        let omega_inf = util::sample_inf(|t| profile.omega(t), a, b, 1024);
        let omega_sup = util::sample_sup_abs(|t| profile.omega(t), a, b, 1024);
        gaps.push(GapCertificate {
            gap: b - a,
            omega_inf,
            omega_sup,
            lower: half_pi / omega_sup,
            upper: half_pi / omega_inf,
        });
    }
    Ok(ZeroSequence { zeros, gaps })
}

fn refine_zero(
    qp: &oracle::QpTrajectory,
    parity: Parity,
    mut lo: f64,
    mut hi: f64,
    h: i64,
) -> Zero {
    let field = |t: f64| -> f64 {
        let s = qp.eval(t);
        match parity {
            Parity::Even => s.q,
            Parity::Odd => s.p,
        }
    };
    // widen the bracket slightly if the scan endpoints do not straddle
    let mut f_lo = field(lo);
    let mut f_hi = field(hi);
    let mut tries = 0;
    while f_lo * f_hi > 0.0 && tries < 8 {
        let w = hi - lo;
        lo = (lo - 0.25 * w).max(qp.t_start());
        hi = (hi + 0.25 * w).min(qp.t_end());
        f_lo = field(lo);
        f_hi = field(hi);
        tries += 1;
    }
    let _ = f_hi;
    // absolute bisection target, floored at a few ulps of the abscissa
    let target = 1e-11f64.max(8.0 * f64::EPSILON * hi.abs());
    while hi - lo > target {
        let mid = 0.5 * (lo + hi);
        let f_mid = field(mid);
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Zero {
        h,
        t: 0.5 * (lo + hi),
        parity,
        bracket: hi - lo,
    }
}

/// Prospective gap bounds from tₕ alone, improved by one refinement pass:
/// the window-global candidate ω_sup is re-evaluated on
/// ]tₕ, tₕ + π/(2 ω_sup)[ (dually for ω_inf), bracketing t_{h+1} - tₕ
/// before t_{h+1} is known.
pub fn prospective_gap_bounds<P: Profile + ?Sized>(
    profile: &P,
    t_h: f64,
    window_sup: f64,
    window_inf: f64,
) -> (f64, f64) {
    let half_pi = core::f64::consts::FRAC_PI_2;
    let sup1 = util::sample_sup_abs(|t| profile.omega(t), t_h, t_h + half_pi / window_inf, 512)
        .min(window_sup);
    let inf1 = util::sample_inf(|t| profile.omega(t), t_h, t_h + half_pi / window_sup, 512)
        .max(window_inf);
    (half_pi / sup1, half_pi / inf1)
}

/// Report of the strict growth of the special points tₕ as functions of
/// the initial instant t_i (at fixed initial data).
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub ti: Vec<f64>,
    /// `zeros[i][k]` = t_{h_min + k} evaluated at `ti[i]`.
    pub zeros: Vec<Vec<f64>>,
    pub h_min: i64,
    pub h_max: i64,
    /// Pairs (i, h) where `t_h(ti[i+1]) <= t_h(ti[i])`.
    pub violations: Vec<(usize, i64)>,
}

impl MonotonicityReport {
    pub fn all_strictly_growing(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For each t_i, locate the zeros of the solution with data (q_i, p_i) at
/// t_i and verify that every tₕ(t_i) with h in [h_min, h_max] grows
/// strictly in t_i. Violations are reported, not asserted.
pub fn check_monotonicity_in_ti<P: Profile + ?Sized>(
    profile: &P,
    q_i: f64,
    p_i: f64,
    ti_grid: &[f64],
    h_min: i64,
    h_max: i64,
    window: f64,
) -> Result<MonotonicityReport, RiccatiError> {
    if ti_grid.len() < 2 {
        return Err(RiccatiError::Parameter(
            "need at least two initial instants",
        ));
    }
    if h_max < h_min {
        return Err(RiccatiError::Parameter("empty h range"));
    }
    let mut zeros_per_ti = Vec::with_capacity(ti_grid.len());
    for &ti in ti_grid {
        let seq = find_zero_sequence(profile, q_i, p_i, ti, ti + window)?;
        let mut row = Vec::new();
        for h in h_min..=h_max {
            match seq.zeros().iter().find(|z| z.h == h) {
                Some(z) => row.push(z.t),
                None => {
                    return Err(RiccatiError::Parameter(
                        "window too short or h range outside the located zeros",
                    ))
                }
            }
        }
        zeros_per_ti.push(row);
    }
    let mut violations = Vec::new();
    for i in 0..ti_grid.len() - 1 {
        for (k, h) in (h_min..=h_max).enumerate() {
            if zeros_per_ti[i + 1][k] <= zeros_per_ti[i][k] {
                violations.push((i, h));
            }
        }
    }
    Ok(MonotonicityReport {
        ti: ti_grid.to_vec(),
        zeros: zeros_per_ti,
        h_min,
        h_max,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::{Constant, Mathieu};
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn rhs_reference_values() {
        assert_eq!(riccati_rhs(RiccatiKind::R, 0.0, 1.0), -1.0);
        assert_eq!(riccati_rhs(RiccatiKind::S, 0.0, 1.0), 1.0);
        assert_eq!(riccati_rhs(RiccatiKind::R, 2.0, 1.0), -5.0);
    }

    #[test]
    fn picard_converges_to_minus_tangent() {
        // constant omega = 1, r(0) = 0: r(t) = -tan t on (-pi/2, pi/2)
        let p = Constant::new(1.0).unwrap();
        let grid = Grid::uniform(-0.8, 0.8, 256, 0.0).unwrap();
        let it = riccati_picard(RiccatiKind::R, &p, 0.0, &grid, 48);
        assert!(it.truncated_at.is_none());
        for (j, &t) in grid.points().iter().enumerate() {
            let expect = -t.tan();
            assert!(
                (it.values(48)[j] - expect).abs() < 1e-9,
                "t = {t}: {} vs {expect}",
                it.values(48)[j]
            );
        }
    }

    #[test]
    fn picard_truncation_reported_past_blowup() {
        // r diverges at t = pi/2; a grid past it must trip the range check
        let p = Constant::new(1.0).unwrap();
        let grid = Grid::uniform(0.0, 3.0, 256, 0.0).unwrap();
        let it = riccati_picard(RiccatiKind::R, &p, 0.0, &grid, 60);
        assert!(it.truncated_at.is_some());
    }

    #[test]
    fn reconstruct_constant_and_cosine() {
        // r identically 0 gives a flat amplitude
        let grid = Grid::uniform(0.0, 1.0, 64, 0.0).unwrap();
        let zero_it = RiccatiIterates::from_samples(
            RiccatiKind::R,
            grid.clone(),
            alloc::vec![0.0; grid.len()],
        );
        let q = reconstruct_q(&zero_it, 2.5);
        assert!(q.iter().all(|&v| (v - 2.5).abs() < 1e-12));

        // constant omega: r -> -tan t reconstructs q = q* cos t
        let p = Constant::new(1.0).unwrap();
        let grid = Grid::uniform(0.0, 1.4, 256, 0.0).unwrap();
        let it = riccati_picard(RiccatiKind::R, &p, 0.0, &grid, 64);
        let q = reconstruct_q(&it, 1.0);
        for (j, &t) in grid.points().iter().enumerate() {
            assert!((q[j] - t.cos()).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn reconstruct_matches_oracle_between_zeros() {
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        // the (1, 0) solution keeps q > 0 well past t = 1.2
        let qp = oracle::integrate_qp(&p, 1.0, 0.0, 0.0, 1.2, 1e-12).unwrap();
        let grid = Grid::uniform(0.0, 1.2, 256, 0.0).unwrap();
        let r0 = qp.eval(0.0).p / qp.eval(0.0).q;
        let it = riccati_picard(RiccatiKind::R, &p, r0, &grid, 64);
        let q = reconstruct_q(&it, 1.0);
        for (j, &t) in grid.points().iter().enumerate() {
            let truth = qp.eval(t).q;
            assert!((q[j] - truth).abs() < 1e-6, "t = {t}: {} vs {truth}", q[j]);
        }
    }

    #[test]
    fn footnote_small_time_approximants() {
        let p = Mathieu::new(1.0, 0.5, 0.5).unwrap();
        // q(0) = 0, q'(0) = 1: q ≈ t for small t
        let qp = oracle::integrate_qp(&p, 0.0, 1.0, 0.0, 0.3, 1e-12).unwrap();
        for &t in &[0.05, 0.1, 0.2] {
            let q = qp.eval(t).q;
            assert!((q - t).abs() < 0.6 * t * t * t, "q({t}) = {q}");
        }
        // q(0) = 1, q'(0) = 0: q ≈ exp(-∫ (t-z) ω² dz), with error
        // shrinking at least cubically under halving of t
        let qp = oracle::integrate_qp(&p, 1.0, 0.0, 0.0, 0.5, 1e-12).unwrap();
        let err = |t: f64| {
            let approx = q_first_order(&p, 1.0, 0.0, 0.0, t).unwrap();
            (qp.eval(t).q - approx).abs()
        };
        let (e2, e1) = (err(0.4), err(0.2));
        assert!(
            e1 < e2 / 8.0,
            "first-order error shrinks too slowly: {e2:.3e} -> {e1:.3e}"
        );
    }

    #[test]
    fn zeros_constant_omega_are_half_periods() {
        let p = Constant::new(2.0).unwrap();
        let seq = find_zero_sequence(&p, 0.0, 1.0, 0.0, 10.0).unwrap();
        // psi(0) = 0: t_h = h pi / (2 omega)
        assert!(seq.zeros().len() >= 12);
        for z in seq.zeros() {
            let expect = z.h as f64 * PI / 4.0;
            assert!(
                (z.t - expect).abs() < 1e-10,
                "h = {}: {} vs {expect}",
                z.h,
                z.t
            );
            assert!(z.bracket <= 1e-10);
        }
        assert_eq!(seq.zeros()[0].h, 0);
        assert_eq!(seq.zeros()[0].parity, Parity::Even);
        assert_eq!(seq.zeros()[1].parity, Parity::Odd);
    }

    #[test]
    fn mathieu_zeros_interlace_and_satisfy_gap_bounds() {
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let seq = find_zero_sequence(&p, 0.0, 1.0, 0.0, 32.0).unwrap();
        assert!(seq.zeros().len() >= 20);
        for w in seq.zeros().windows(2) {
            assert!(w[1].t > w[0].t);
            assert_eq!(w[1].h, w[0].h + 1);
            assert_ne!(w[1].parity, w[0].parity);
        }
        for g in seq.gaps() {
            assert!(g.holds(), "gap certificate failed: {g:?}");
        }
    }

    #[test]
    fn quadrant_cycle_between_zeros() {
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let qp = oracle::integrate_qp(&p, 0.0, 1.0, 0.0, 32.0, 1e-12).unwrap();
        let seq = find_zero_sequence(&p, 0.0, 1.0, 0.0, 32.0).unwrap();
        for w in seq.zeros().windows(2) {
            let mid = 0.5 * (w[0].t + w[1].t);
            let s = qp.eval(mid);
            let (sq, sp) = ZeroSequence::quadrant_signs(w[0].h);
            assert!(
                s.q * sq > 0.0 && s.p * sp > 0.0,
                "quadrant mismatch after h = {}",
                w[0].h
            );
        }
    }

    #[test]
    fn prospective_bounds_bracket_real_gaps() {
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let seq = find_zero_sequence(&p, 0.0, 1.0, 0.0, 20.0).unwrap();
        let w_sup = crate::util::sample_sup_abs(|t| p.omega(t), 0.0, 21.0, 4096);
        let w_inf = crate::util::sample_inf(|t| p.omega(t), 0.0, 21.0, 4096);
        for w in seq.zeros().windows(2) {
            let (lo, hi) = prospective_gap_bounds(&p, w[0].t, w_sup, w_inf);
            let gap = w[1].t - w[0].t;
            assert!(
                lo <= gap + 1e-9 && gap <= hi + 1e-9,
                "gap {gap} outside [{lo}, {hi}]"
            );
        }
    }

    #[test]
    fn riccati_product_is_one() {
        // integrate r and s independently as ODEs from matched data on an
        // interval where both stay finite, and check r s = 1
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let (q0, p0) = (0.6f64, 1.0f64);
        let (a, b) = (0.0, 0.5);
        let opts = IntegOptions::with_tol(1e-12);
        let r = oracle::integrate(
            |t, y: &[f64; 1]| [riccati_rhs(RiccatiKind::R, y[0], p.omega(t))],
            a,
            [p0 / q0],
            b,
            &opts,
        )
        .unwrap();
        let s = oracle::integrate(
            |t, y: &[f64; 1]| [riccati_rhs(RiccatiKind::S, y[0], p.omega(t))],
            a,
            [q0 / p0],
            b,
            &opts,
        )
        .unwrap();
        for i in 0..=50 {
            let t = a + (b - a) * i as f64 / 50.0;
            let prod = r.eval(t)[0] * s.eval(t)[0];
            assert!((prod - 1.0).abs() < 1e-9, "r*s at {t} = {prod}");
        }
    }

    #[test]
    fn appendix_arc_inequality() {
        // along a solution with q of one sign, acot(r/ω_l) - acot(r*/ω_l)
        // grows at least like ω_l (t - t*)
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let qp = oracle::integrate_qp(&p, 1.0, 0.0, 0.0, 1.0, 1e-12).unwrap();
        let w_l = crate::util::sample_inf(|t| p.omega(t), 0.0, 1.0, 4096);
        let acot = |x: f64| FRAC_PI_2 - x.atan();
        let r_at = |t: f64| {
            let s = qp.eval(t);
            s.p / s.q
        };
        let r_star = r_at(0.0);
        for i in 1..=40 {
            let t = i as f64 / 40.0;
            let lhs = acot(r_at(t) / w_l) - acot(r_star / w_l);
            assert!(lhs >= w_l * t - 1e-9, "t = {t}: {lhs} < {}", w_l * t);
        }
    }

    #[test]
    fn monotonicity_in_initial_instant() {
        // constant omega: t_h(t_i) = t_i + h pi/2
        let c = Constant::new(1.0).unwrap();
        let ti: Vec<f64> = (0..8).map(|i| 0.1 * i as f64).collect();
        let rep = check_monotonicity_in_ti(&c, 0.0, 1.0, &ti, 0, 6, 15.0).unwrap();
        assert!(rep.all_strictly_growing());
        for (i, &t_i) in ti.iter().enumerate() {
            for k in 0..=6 {
                let expect = t_i + k as f64 * FRAC_PI_2;
                assert!((rep.zeros[i][k] - expect).abs() < 1e-9);
            }
        }

        // Mathieu: 16 initial instants, h in [0, 8]
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let ti: Vec<f64> = (0..16).map(|i| 0.11 * i as f64).collect();
        let rep = check_monotonicity_in_ti(&p, 0.0, 1.0, &ti, 0, 8, 20.0).unwrap();
        assert!(
            rep.all_strictly_growing(),
            "violations: {:?}",
            rep.violations
        );

        // rescaled initial data give the same zeros
        let rep2 = check_monotonicity_in_ti(&p, 0.0, 2.0, &ti, 0, 8, 20.0).unwrap();
        for (row1, row2) in rep.zeros.iter().zip(&rep2.zeros) {
            for (a, b) in row1.iter().zip(row2) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = Constant::new(1.0).unwrap();
        assert!(matches!(
            find_zero_sequence(&p, 0.0, 0.0, 0.0, 10.0),
            Err(RiccatiError::TrivialSolution)
        ));
        assert!(matches!(
            find_zero_sequence(&p, 0.0, 1.0, 5.0, 1.0),
            Err(RiccatiError::Parameter(_))
        ));
    }
}

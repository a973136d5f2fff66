//! Fundamental matrices, propagators, general inhomogeneous 2x2 systems
//! and their reduction to oscillator form, plus the Ermakov cross-check.
//!
//! With q₁, q₂ the solutions of the oscillator fixed by
//! q₁(0) = q̇₂(0) = 1, q₂(0) = q̇₁(0) = 0, the fundamental matrix is
//!
//! ```text
//! V = | q₁  q₂ |        V⁻¹ = |  q̇₂  -q₂ |
//!     | q̇₁  q̇₂ |              | -q̇₁   q₁ |
//! ```
//!
//! (det V ≡ 1 since the coefficient matrix is traceless), and the
//! propagator is 𝒱(t, t*) = V(t) V⁻¹(t*).

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

// method syntax for the float transcendentals in the no_std build
#[allow(unused_imports)]
use num_traits::Float;

use crate::frequency::Profile;
use crate::oracle::{self, IntegOptions, OracleError, QpTrajectory};
use crate::util;

/// 2x2 matrix alias for readability.
pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_vec(a: &Mat2, x: &[f64; 2]) -> [f64; 2] {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

pub fn det2(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Errors from this module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinearSystemsError {
    /// The reduction branch needs Ã¹₂ ≠ 0; it vanished (or nearly) at `t`.
    UpperRightVanishes {
        t: f64,
    },
    /// Parameter outside its admissible range.
    Parameter(&'static str),
    Oracle(OracleError),
}

impl fmt::Display for LinearSystemsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UpperRightVanishes { t } => {
                write!(
                    f,
                    "reduction needs a nonvanishing (1,2) coefficient; got ~0 at t = {t}"
                )
            }
            Self::Parameter(what) => write!(f, "invalid parameter: {what}"),
            Self::Oracle(e) => write!(f, "oracle failure: {e}"),
        }
    }
}

impl core::error::Error for LinearSystemsError {}

impl From<OracleError> for LinearSystemsError {
    fn from(e: OracleError) -> Self {
        Self::Oracle(e)
    }
}

/// Dense fundamental pair (q₁, q₂) of the oscillator with the reference
/// initial data at t = 0, covering [t_min, t_max] ∋ 0.
#[derive(Clone, Debug)]
pub struct FundamentalMatrix {
    fwd1: QpTrajectory,
    fwd2: QpTrajectory,
    back1: Option<QpTrajectory>,
    back2: Option<QpTrajectory>,
    tol: f64,
}

impl FundamentalMatrix {
    /// Integrate the fundamental pair over [t_min, t_max] (must contain 0).
    pub fn compute<P: Profile + ?Sized>(
        profile: &P,
        t_min: f64,
        t_max: f64,
        tol: f64,
    ) -> Result<Self, LinearSystemsError> {
        if !(t_min <= 0.0 && t_max > 0.0) {
            return Err(LinearSystemsError::Parameter(
                "span must contain the reference time 0",
            ));
        }
        let opts = IntegOptions::with_tol(tol);
        let fwd1 = oracle::integrate_qp_opts(profile, 1.0, 0.0, 0.0, t_max, &opts)?;
        let fwd2 = oracle::integrate_qp_opts(profile, 0.0, 1.0, 0.0, t_max, &opts)?;
        let (back1, back2) = if t_min < 0.0 {
            (
                Some(oracle::integrate_qp_opts(
                    profile, 1.0, 0.0, 0.0, t_min, &opts,
                )?),
                Some(oracle::integrate_qp_opts(
                    profile, 0.0, 1.0, 0.0, t_min, &opts,
                )?),
            )
        } else {
            (None, None)
        };
        Ok(Self {
            fwd1,
            fwd2,
            back1,
            back2,
            tol,
        })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
    pub fn t_min(&self) -> f64 {
        self.back1.as_ref().map_or(0.0, |b| b.t_end())
    }
    pub fn t_max(&self) -> f64 {
        self.fwd1.t_end()
    }

    fn pair(&self, t: f64) -> (&QpTrajectory, &QpTrajectory) {
        if t < 0.0 {
            match (&self.back1, &self.back2) {
                (Some(b1), Some(b2)) => (b1, b2),
                _ => (&self.fwd1, &self.fwd2),
            }
        } else {
            (&self.fwd1, &self.fwd2)
        }
    }

    /// The two fundamental solutions and their momenta at t:
    /// (q₁, p₁, q₂, p₂).
    pub fn columns(&self, t: f64) -> (f64, f64, f64, f64) {
        let (tr1, tr2) = self.pair(t);
        let s1 = tr1.eval(t);
        let s2 = tr2.eval(t);
        (s1.q, s1.p, s2.q, s2.p)
    }

    /// V(t).
    pub fn v(&self, t: f64) -> Mat2 {
        let (q1, p1, q2, p2) = self.columns(t);
        [[q1, q2], [p1, p2]]
    }

    /// V⁻¹(t) through the unit-Wronskian closed form.
    pub fn v_inv(&self, t: f64) -> Mat2 {
        let (q1, p1, q2, p2) = self.columns(t);
        [[p2, -q2], [-p1, q1]]
    }

    /// det V(t); identically 1 up to integration error.
    pub fn wronskian(&self, t: f64) -> f64 {
        det2(&self.v(t))
    }

    /// max |det V - 1| over n+1 samples of [a, b].
    pub fn wronskian_drift(&self, a: f64, b: f64, n: usize) -> f64 {
        util::sample_sup_abs(|t| self.wronskian(t) - 1.0, a, b, n)
    }
}

/// The propagator 𝒱(t, t*) = V(t) V⁻¹(t*), with 𝒱(t*, t*) = I.
pub fn propagator(fund: &FundamentalMatrix, t: f64, t_star: f64) -> Mat2 {
    mat_mul(&fund.v(t), &fund.v_inv(t_star))
}

/// The (1,2) entry ν(t, t*) = q₂(t)q₁(t*) - q₁(t)q₂(t*) of the propagator;
/// it solves the oscillator in t and satisfies ∂ν/∂t*|_{t=t*} = -1 and
/// ∂²ν/∂t*² = -ω²(t*) ν.
pub fn nu(fund: &FundamentalMatrix, t: f64, t_star: f64) -> f64 {
    let (q1t, _, q2t, _) = fund.columns(t);
    let (q1s, _, q2s, _) = fund.columns(t_star);
    q2t * q1s - q1t * q2s
}

/// General solution of `ẋ = A x + a` with `A = (0, 1; -ω², 0)` by
/// variation of parameters:
/// `x(t) = V(t) [V⁻¹(t*) x* + ∫ V⁻¹(z) a(z) dz]`.
pub fn solve_inhomogeneous<F>(
    fund: &FundamentalMatrix,
    forcing: F,
    x_star: [f64; 2],
    t_star: f64,
    t: f64,
    tol: f64,
) -> Result<[f64; 2], LinearSystemsError>
where
    F: Fn(f64) -> [f64; 2],
{
    let comp = |row: usize| {
        oracle::quadrature(
            |z| {
                let vinv = fund.v_inv(z);
                let a = forcing(z);
                vinv[row][0] * a[0] + vinv[row][1] * a[1]
            },
            t_star,
            t,
            tol,
        )
    };
    let mut y = mat_vec(&fund.v_inv(t_star), &x_star);
    y[0] += comp(0)?;
    y[1] += comp(1)?;
    Ok(mat_vec(&fund.v(t), &y))
}

// ---------------------------------------------------------------------------
// Reduction of a general 2x2 linear system to oscillator form
// ---------------------------------------------------------------------------

/// Time-dependent coefficient entry.
pub type TimeFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A general linear system `ẋ̃ = Ã(t) x̃ + ã(t)` with Ã¹₂ ≠ 0 on the
/// domain of interest. The derivative of the (1,2) entry is part of the
/// data (the reduction needs it exactly).
pub struct GeneralSystem {
    pub a11: TimeFn,
    pub a12: TimeFn,
    pub a21: TimeFn,
    pub a22: TimeFn,
    pub a12_dot: TimeFn,
    pub forcing: [TimeFn; 2],
}

impl GeneralSystem {
    /// Coefficient matrix at t.
    pub fn matrix(&self, t: f64) -> Mat2 {
        [
            [(self.a11)(t), (self.a12)(t)],
            [(self.a21)(t), (self.a22)(t)],
        ]
    }

    /// Right-hand side of the original system.
    pub fn rhs(&self, t: f64, x: &[f64; 2]) -> [f64; 2] {
        let m = self.matrix(t);
        let mut v = mat_vec(&m, x);
        v[0] += (self.forcing[0])(t);
        v[1] += (self.forcing[1])(t);
        v
    }
}

/// The change of variables `x = e^Λ B x̃` with
/// `B = (1, 0; b, Ã¹₂)`, `b = ½(Ã¹₁ - Ã²₂ - Ã̇¹₂/Ã¹₂)`,
/// `2Λ̇ + Ã¹₁ + Ã²₂ + d/dt log Ã¹₂ = 0`, which carries solutions of the
/// general system to solutions of `ẋ = (0, 1; -ω², 0) x + e^Λ B ã` with
/// `-ω² = ḃ + b² + Ã¹₂ Ã²₁`.
pub struct Reduction<'a> {
    sys: &'a GeneralSystem,
    t_ref: f64,
}

/// Threshold below which Ã¹₂ counts as vanishing for this branch.
const A12_FLOOR: f64 = 1e-12;

/// Build the reduction, checking Ã¹₂ away from zero on [a, b] by dense
/// sampling. The index-swapped branch (Ã²₁ ≠ 0) and time
/// reparametrizations are not implemented.
pub fn reduce_general_system(
    sys: &GeneralSystem,
    t_ref: f64,
    a: f64,
    b: f64,
) -> Result<Reduction<'_>, LinearSystemsError> {
    let n = 1024;
    for i in 0..=n {
        let t = a + (b - a) * i as f64 / n as f64;
        if (sys.a12)(t).abs() < A12_FLOOR {
            return Err(LinearSystemsError::UpperRightVanishes { t });
        }
    }
    Ok(Reduction { sys, t_ref })
}

impl Reduction<'_> {
    pub fn b(&self, t: f64) -> f64 {
        0.5 * ((self.sys.a11)(t) - (self.sys.a22)(t) - (self.sys.a12_dot)(t) / (self.sys.a12)(t))
    }

    /// The induced squared frequency -ω² = ḃ + b² + Ã¹₂Ã²₁, with ḃ by a
    /// 5-point finite difference of b.
    pub fn omega_squared(&self, t: f64) -> f64 {
        let h = 1e-4 * t.abs().max(1.0);
        let b_dot = util::fd_first(|z| self.b(z), t, h);
        let b = self.b(t);
        -(b_dot + b * b + (self.sys.a12)(t) * (self.sys.a21)(t))
    }

    /// Whether ω² stays positive on [a, b] (sampled); when it does, the
    /// reduced system is an honest oscillator.
    pub fn omega_squared_positive(&self, a: f64, b: f64, n: usize) -> bool {
        util::sample_inf(|t| self.omega_squared(t), a, b, n) > 0.0
    }

    /// Λ(t) with Λ(t_ref) = 0.
    pub fn lambda(&self, t: f64) -> Result<f64, LinearSystemsError> {
        let tr = oracle::quadrature(
            |z| (self.sys.a11)(z) + (self.sys.a22)(z),
            self.t_ref,
            t,
            1e-12,
        )?;
        let log_ratio = ((self.sys.a12)(t) / (self.sys.a12)(self.t_ref)).ln();
        Ok(-0.5 * (tr + log_ratio))
    }

    fn b_matrix(&self, t: f64) -> Mat2 {
        [[1.0, 0.0], [self.b(t), (self.sys.a12)(t)]]
    }

    /// Map a state of the original system to oscillator variables:
    /// x = e^Λ B x̃.
    pub fn map_from_original(
        &self,
        t: f64,
        x_tilde: [f64; 2],
    ) -> Result<[f64; 2], LinearSystemsError> {
        let el = self.lambda(t)?.exp();
        let v = mat_vec(&self.b_matrix(t), &x_tilde);
        Ok([el * v[0], el * v[1]])
    }

    /// Inverse map x̃ = B⁻¹ e^{-Λ} x.
    pub fn map_to_original(&self, t: f64, x: [f64; 2]) -> Result<[f64; 2], LinearSystemsError> {
        let el = (-self.lambda(t)?).exp();
        let a12 = (self.sys.a12)(t);
        let b = self.b(t);
        let y = [el * x[0], el * x[1]];
        Ok([y[0], (y[1] - b * y[0]) / a12])
    }

    /// Transformed forcing a = e^Λ B ã.
    pub fn forcing_transformed(&self, t: f64) -> Result<[f64; 2], LinearSystemsError> {
        let a_tilde = [(self.sys.forcing[0])(t), (self.sys.forcing[1])(t)];
        self.map_from_original(t, a_tilde)
    }
}

// ---------------------------------------------------------------------------
// Ermakov cross-validation
// ---------------------------------------------------------------------------

/// Ermakov cross-check built on ρ = √(q₁² + q₂²) (unit angular momentum):
/// ρ solves ρ̈ = -ω²ρ + 1/ρ³, and for every oscillator solution q the
/// quantity 2I = (qρ̇ - q̇ρ)² + (q/ρ)² is conserved.
#[derive(Clone, Copy, Debug)]
pub struct ErmakovReport {
    /// max |ρ̈ + ω²ρ - 1/ρ³| over the sample grid (ρ̈ by finite differences).
    pub max_equation_residual: f64,
    /// Relative drift of the invariant along q₁ and along q₂.
    pub invariant_drift_q1: f64,
    pub invariant_drift_q2: f64,
    /// 2I along q₁, q₂; both equal L² = 1 exactly.
    pub two_i_q1: f64,
    pub two_i_q2: f64,
    /// min ρ over the grid (must stay positive).
    pub rho_min: f64,
}

/// ρ(t) and ρ̇(t) from the fundamental pair.
pub fn ermakov_rho(fund: &FundamentalMatrix, t: f64) -> (f64, f64) {
    let (q1, p1, q2, p2) = fund.columns(t);
    let rho = (q1 * q1 + q2 * q2).sqrt();
    (rho, (q1 * p1 + q2 * p2) / rho)
}

/// The conserved combination 2I = (qρ̇ - pρ)² + (q/ρ)² for the state
/// (q, p) at time t.
pub fn ermakov_invariant(fund: &FundamentalMatrix, t: f64, q: f64, p: f64) -> f64 {
    let (rho, rho_dot) = ermakov_rho(fund, t);
    let m = q * rho_dot - p * rho;
    m * m + (q / rho) * (q / rho)
}

/// Run the Ermakov checks on [a, b] with n+1 samples.
pub fn ermakov_check<P: Profile + ?Sized>(
    profile: &P,
    fund: &FundamentalMatrix,
    a: f64,
    b: f64,
    n: usize,
) -> ErmakovReport {
    let fd_h = 1e-2;
    let mut max_res = 0.0f64;
    let mut rho_min = f64::INFINITY;
    let mut inv1 = Vec::with_capacity(n + 1);
    let mut inv2 = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = a + (b - a) * i as f64 / n as f64;
        let (rho, _) = ermakov_rho(fund, t);
        rho_min = rho_min.min(rho);
        // keep the FD stencil inside the integrated span
        if t - 2.0 * fd_h >= fund.t_min() && t + 2.0 * fd_h <= fund.t_max() {
            let rho_dd = util::fd_second(|z| ermakov_rho(fund, z).0, t, fd_h);
            let w = profile.omega(t);
            max_res = max_res.max((rho_dd + w * w * rho - 1.0 / (rho * rho * rho)).abs());
        }
        let (q1, p1, q2, p2) = fund.columns(t);
        inv1.push(ermakov_invariant(fund, t, q1, p1));
        inv2.push(ermakov_invariant(fund, t, q2, p2));
    }
    let drift = |v: &[f64]| {
        let first = v[0];
        v.iter().map(|&x| (x - first).abs()).fold(0.0f64, f64::max) / first.abs()
    };
    ErmakovReport {
        max_equation_residual: max_res,
        invariant_drift_q1: drift(&inv1),
        invariant_drift_q2: drift(&inv2),
        two_i_q1: inv1[0],
        two_i_q2: inv2[0],
        rho_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::{Constant, Mathieu};
    use core::f64::consts::PI;

    fn fund_for(profile: &impl Profile, t_max: f64) -> FundamentalMatrix {
        FundamentalMatrix::compute(profile, 0.0, t_max, 1e-12).unwrap()
    }

    #[test]
    fn fundamental_matrix_constant_omega() {
        let p = Constant::new(2.0).unwrap();
        let f = fund_for(&p, 10.0);
        for i in 0..=50 {
            let t = 10.0 * i as f64 / 50.0;
            let (q1, p1, q2, p2) = f.columns(t);
            assert!((q1 - (2.0 * t).cos()).abs() < 1e-10);
            assert!((p1 + 2.0 * (2.0 * t).sin()).abs() < 1e-10);
            assert!((q2 - (2.0 * t).sin() / 2.0).abs() < 1e-10);
            assert!((p2 - (2.0 * t).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn wronskian_stays_unit_mathieu() {
        let p = Mathieu::new(1.0, 0.5, 0.5).unwrap();
        let f = fund_for(&p, 30.0);
        assert!(f.wronskian_drift(0.0, 30.0, 600) < 1e-9);
    }

    #[test]
    fn propagator_identity_and_closed_form() {
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let f = fund_for(&p, 12.0);
        for &t in &[0.0, 1.7, 6.3] {
            let v = propagator(&f, t, t);
            assert!((v[0][0] - 1.0).abs() < 1e-9 && (v[1][1] - 1.0).abs() < 1e-9);
            assert!(v[0][1].abs() < 1e-9 && v[1][0].abs() < 1e-9);
        }
        // constant omega: rotation-like kernel
        let c = Constant::new(1.5).unwrap();
        let fc = fund_for(&c, 10.0);
        let (t, ts) = (4.0, 1.0);
        let v = propagator(&fc, t, ts);
        let d = 1.5 * (t - ts);
        assert!((v[0][0] - d.cos()).abs() < 1e-9);
        assert!((v[0][1] - d.sin() / 1.5).abs() < 1e-9);
        assert!((v[1][0] + 1.5 * d.sin()).abs() < 1e-9);
        assert!((v[1][1] - d.cos()).abs() < 1e-9);
        // unit determinant at scattered (t, t*) pairs
        for &(a, b) in &[(0.4, 3.3), (7.9, 1.2), (11.0, 10.0), (2.0, 2.0)] {
            let det = det2(&propagator(&f, a, b));
            assert!((det - 1.0).abs() < 1e-9, "det V({a}, {b}) = {det}");
        }
    }

    #[test]
    fn nu_derivative_identities() {
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let f = fund_for(&p, 12.0);
        // ∂ν/∂t*|_{t=t*} = -1
        for &t in &[0.5, 3.1, 9.4] {
            let d = util::fd_first(|s| nu(&f, t, s), t, 1e-3);
            assert!((d + 1.0).abs() < 1e-7, "t = {t}: {d}");
        }
        // ∂²ν/∂t*² = -ω²(t*) ν at scattered pairs
        for &(t, ts) in &[(5.0, 1.0), (8.0, 2.5), (11.0, 7.0)] {
            let lhs = util::fd_second(|s| nu(&f, t, s), ts, 0.02);
            let w = p.omega(ts);
            let rhs = -w * w * nu(&f, t, ts);
            assert!((lhs - rhs).abs() < 1e-5, "({t}, {ts}): {lhs} vs {rhs}");
        }
    }

    #[test]
    fn inhomogeneous_solution_and_superposition() {
        // a ≡ 0 reduces to homogeneous propagation
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let f = fund_for(&p, 10.0);
        let x0 = [0.3, -0.7];
        let hom = solve_inhomogeneous(&f, |_| [0.0, 0.0], x0, 0.0, 8.0, 1e-11).unwrap();
        let direct = oracle::integrate_qp(&p, x0[0], x0[1], 0.0, 8.0, 1e-12)
            .unwrap()
            .end_state();
        assert!((hom[0] - direct.q).abs() < 1e-9 && (hom[1] - direct.p).abs() < 1e-9);

        // constant omega = 1 with a = (0, 1): x¹(t) = 1 - cos t
        let c = Constant::new(1.0).unwrap();
        let fc = fund_for(&c, 10.0);
        for &t in &[0.5, 2.0, PI, 7.0] {
            let x = solve_inhomogeneous(&fc, |_| [0.0, 1.0], [0.0, 0.0], 0.0, t, 1e-12).unwrap();
            assert!((x[0] - (1.0 - t.cos())).abs() < 1e-9, "t = {t}");
            assert!((x[1] - t.sin()).abs() < 1e-9);
        }

        // additivity in the forcing and in the initial state
        let fa = |z: f64| [z.sin(), 0.3];
        let fb = |z: f64| [0.1, z.cos()];
        let xa = solve_inhomogeneous(&f, fa, [0.2, 0.0], 0.0, 6.0, 1e-11).unwrap();
        let xb = solve_inhomogeneous(&f, fb, [0.0, -0.4], 0.0, 6.0, 1e-11).unwrap();
        let xab = solve_inhomogeneous(
            &f,
            |z| {
                let (u, v) = (fa(z), fb(z));
                [u[0] + v[0], u[1] + v[1]]
            },
            [0.2, -0.4],
            0.0,
            6.0,
            1e-11,
        )
        .unwrap();
        assert!((xab[0] - xa[0] - xb[0]).abs() < 1e-9);
        assert!((xab[1] - xa[1] - xb[1]).abs() < 1e-9);
    }

    #[test]
    fn inhomogeneous_residual_by_finite_differences() {
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let f = fund_for(&p, 10.0);
        let forcing = |z: f64| [0.2 * z.cos(), -0.1];
        let x_at = |t: f64| solve_inhomogeneous(&f, forcing, [0.5, 0.1], 0.0, t, 1e-12).unwrap();
        for &t in &[2.0, 5.0, 8.0] {
            let x = x_at(t);
            let dx0 = util::fd_first(|s| x_at(s)[0], t, 1e-3);
            let dx1 = util::fd_first(|s| x_at(s)[1], t, 1e-3);
            let w = p.omega(t);
            let a = forcing(t);
            let r0 = dx0 - x[1] - a[0];
            let r1 = dx1 + w * w * x[0] - a[1];
            assert!(
                r0.abs() < 1e-8 && r1.abs() < 1e-8,
                "t = {t}: ({r0:.2e}, {r1:.2e})"
            );
        }
    }

    fn constant_fn(v: f64) -> TimeFn {
        Box::new(move |_| v)
    }

    #[test]
    fn reduction_identity_for_oscillator_form() {
        // already in oscillator form with omega^2 = 4: b = 0 and the
        // recovered frequency matches
        let sys = GeneralSystem {
            a11: constant_fn(0.0),
            a12: constant_fn(1.0),
            a21: constant_fn(-4.0),
            a22: constant_fn(0.0),
            a12_dot: constant_fn(0.0),
            forcing: [constant_fn(0.0), constant_fn(0.0)],
        };
        let red = reduce_general_system(&sys, 0.0, 0.0, 10.0).unwrap();
        assert_eq!(red.b(3.0), 0.0);
        assert!((red.omega_squared(3.0) - 4.0).abs() < 1e-8);
        assert!(red.omega_squared_positive(0.0, 10.0, 256));
    }

    #[test]
    fn reduction_damped_oscillator() {
        // m = 1, kappa = 4, eta = 0.2: omega^2 = kappa - eta^2/4 = 3.99
        let sys = GeneralSystem {
            a11: constant_fn(0.0),
            a12: constant_fn(1.0),
            a21: constant_fn(-4.0),
            a22: constant_fn(-0.2),
            a12_dot: constant_fn(0.0),
            forcing: [constant_fn(0.0), constant_fn(0.0)],
        };
        let red = reduce_general_system(&sys, 0.0, 0.0, 10.0).unwrap();
        assert!((red.b(1.0).abs() - 0.1).abs() < 1e-12);
        assert!((red.omega_squared(1.0) - 3.99).abs() < 1e-8);
    }

    #[test]
    fn reduction_round_trip_solutions() {
        // time-dependent stiffness: kappa(t) = 4 + sin t, eta = 0.2
        let sys = GeneralSystem {
            a11: constant_fn(0.0),
            a12: constant_fn(1.0),
            a21: Box::new(|t: f64| -(4.0 + t.sin())),
            a22: constant_fn(-0.2),
            a12_dot: constant_fn(0.0),
            forcing: [constant_fn(0.0), constant_fn(0.0)],
        };
        let red = reduce_general_system(&sys, 0.0, 0.0, 10.0).unwrap();
        assert!(red.omega_squared_positive(0.0, 10.0, 512));

        // integrate the original system, push it through the map, and
        // check the oscillator equation by finite differences
        let orig = oracle::integrate(
            |t, y: &[f64; 2]| sys.rhs(t, y),
            0.0,
            [1.0, 0.0],
            10.0,
            &IntegOptions::with_tol(1e-12),
        )
        .unwrap();
        let x_at = |t: f64| {
            let y = orig.eval(t);
            red.map_from_original(t, y).unwrap()
        };
        for &t in &[1.0, 4.0, 7.5] {
            let x = x_at(t);
            let dx0 = util::fd_first(|s| x_at(s)[0], t, 1e-3);
            let dx1 = util::fd_first(|s| x_at(s)[1], t, 1e-3);
            let r0 = dx0 - x[1];
            let r1 = dx1 + red.omega_squared(t) * x[0];
            assert!(r0.abs() < 1e-8, "t = {t}: r0 = {r0:.2e}");
            assert!(r1.abs() < 1e-7, "t = {t}: r1 = {r1:.2e}");
            // and the inverse map round-trips
            let back = red.map_to_original(t, x).unwrap();
            let y = orig.eval(t);
            assert!((back[0] - y[0]).abs() < 1e-10 && (back[1] - y[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn reduction_rejects_vanishing_upper_right() {
        let sys = GeneralSystem {
            a11: constant_fn(0.0),
            a12: Box::new(|t: f64| t - 5.0),
            a21: constant_fn(-4.0),
            a22: constant_fn(0.0),
            a12_dot: constant_fn(1.0),
            forcing: [constant_fn(0.0), constant_fn(0.0)],
        };
        assert!(matches!(
            reduce_general_system(&sys, 0.0, 0.0, 10.0),
            Err(LinearSystemsError::UpperRightVanishes { .. })
        ));
    }

    #[test]
    fn ermakov_constant_omega_unit() {
        // omega = 1: rho = 1 identically and I coincides with the action
        let p = Constant::new(1.0).unwrap();
        let f = fund_for(&p, 12.0);
        let rep = ermakov_check(&p, &f, 0.0, 12.0, 200);
        assert!(rep.max_equation_residual < 1e-5);
        assert!((rep.two_i_q1 - 1.0).abs() < 1e-10 && (rep.two_i_q2 - 1.0).abs() < 1e-10);
        assert!(rep.invariant_drift_q1 < 1e-9 && rep.invariant_drift_q2 < 1e-9);
        assert!((ermakov_rho(&f, 7.3).0 - 1.0).abs() < 1e-10);

        // arbitrary solution: I equals the action H/omega
        let traj = oracle::integrate_qp(&p, 0.6, -0.4, 0.0, 12.0, 1e-12).unwrap();
        for &t in &[0.0, 3.0, 9.0] {
            let s = traj.eval(t);
            let two_i = ermakov_invariant(&f, t, s.q, s.p);
            let action = s.hamiltonian(1.0) / 1.0;
            assert!((0.5 * two_i - action).abs() < 1e-10);
        }
    }

    #[test]
    fn ermakov_invariant_constant_along_mathieu() {
        let p = Mathieu::new(1.0, 0.5, 0.5).unwrap();
        let f = fund_for(&p, 30.0);
        let rep = ermakov_check(&p, &f, 0.0, 30.0, 600);
        assert!(rep.rho_min > 0.0);
        assert!((rep.two_i_q1 - 1.0).abs() < 1e-9 && (rep.two_i_q2 - 1.0).abs() < 1e-9);
        assert!(
            rep.invariant_drift_q1 < 1e-8 && rep.invariant_drift_q2 < 1e-8,
            "drift: {:.3e}, {:.3e}",
            rep.invariant_drift_q1,
            rep.invariant_drift_q2
        );
        assert!(
            rep.max_equation_residual < 1e-4,
            "residual {:.3e}",
            rep.max_equation_residual
        );

        // drift along an unrelated solution as well
        let traj = oracle::integrate_qp(&p, 0.3, 0.9, 0.0, 30.0, 1e-12).unwrap();
        let mut vals = Vec::new();
        for i in 0..=300 {
            let t = 30.0 * i as f64 / 300.0;
            let s = traj.eval(t);
            vals.push(ermakov_invariant(&f, t, s.q, s.p));
        }
        let first = vals[0];
        let drift = vals
            .iter()
            .map(|&v| (v - first).abs())
            .fold(0.0f64, f64::max)
            / first.abs();
        assert!(drift < 1e-8, "drift {drift:.3e}");
    }

    #[test]
    fn ermakov_general_solution_solves_oscillator() {
        // A rho sin(theta + alpha) with theta' = 1/rho² solves the
        // oscillator for random (A, alpha)
        let p = Mathieu::new(1.0, 0.2, 2.0).unwrap();
        let f = fund_for(&p, 12.0);
        let theta = |t: f64| {
            oracle::quadrature(|z| 1.0 / ermakov_rho(&f, z).0.powi(2), 0.0, t, 1e-12).unwrap()
        };
        for &(amp, alpha) in &[(1.0, 0.0), (0.7, 1.1), (2.3, -2.4)] {
            let q_at = |t: f64| amp * ermakov_rho(&f, t).0 * (theta(t) + alpha).sin();
            for &t in &[2.0, 5.0, 9.0] {
                let qdd = util::fd_second(q_at, t, 1e-2);
                let w = p.omega(t);
                let res = qdd + w * w * q_at(t);
                assert!(res.abs() < 1e-7, "t = {t}: residual {res:.3e}");
            }
        }
    }
}

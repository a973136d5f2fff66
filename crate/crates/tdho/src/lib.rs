//! Numerical machinery for the time-dependent harmonic oscillator
//! `q̈ = -ω²(t) q` with `ω(t) > 0`.
//!
//! The crate solves the oscillator through the angle-action variables
//! `(ψ, 𝓘)` with `𝓘 = H/ω`, in which the phase equation decouples:
//!
//! ```text
//! ψ̇ = ω + (ω̇/2ω) sin 2ψ,       𝓘̇/𝓘 = -(ω̇/ω) cos 2ψ
//! ```
//!
//! Picard iteration on the Volterra form of the phase equation yields a
//! sequence of closed-form approximants with certified sup-norm error
//! bounds that decay factorially in the iteration order. Around that core
//! the crate provides:
//!
//! - [`frequency`]: frequency-law profiles (Mathieu, ramps, steps) with
//!   derivatives, declared discontinuities, and total-variation bookkeeping;
//! - [`oracle`]: an adaptive Dormand-Prince 5(4) integrator with dense
//!   output plus adaptive quadrature, used as the independent reference
//!   everything else is validated against;
//! - [`angle_action`]: Picard iterates with certified bounds, phase-space
//!   reconstruction, discontinuity matching, and monotone-frequency
//!   envelope bounds;
//! - [`riccati`]: the local reductions `r = q̇/q`, `s = q/q̇` and the
//!   interlaced zero sequence of `q, q̇` with gap certificates;
//! - [`linear_systems`]: fundamental matrices, propagators, reduction of a
//!   general 2x2 linear system to oscillator form, Ermakov cross-checks;
//! - [`floquet`]: monodromy, parametric-resonance analysis, and stability
//!   maps for periodic frequency laws;
//! - [`adiabatic`]: adiabatic-invariance experiments in a slow-time family
//!   `ω(t; ε) = ω̃(εt)` and the first-order asymptotics of `(ψ, 𝓘)`.
//!
//! The core is `no_std` (with `alloc`); IO, CSV/JSON export and the CLI
//! live in the companion `tdho-cli` crate.

#![cfg_attr(not(test), no_std)]
// negated comparisons like `!(tol > 0.0)` are deliberate: they reject NaN
// parameters along with out-of-range ones
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod adiabatic;
pub mod angle_action;
pub mod floquet;
pub mod frequency;
pub mod linear_systems;
pub mod oracle;
pub mod riccati;
pub(crate) mod util;

pub use angle_action::AngleActionState;
pub use frequency::{Profile, SlowTimeFamily};
pub use oracle::PhaseState;

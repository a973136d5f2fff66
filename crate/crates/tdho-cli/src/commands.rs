#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN-rejecting range guards

//! The experiment runners behind the subcommands. Each returns whether
//! every internal certificate held, which drives the process exit code.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use serde_json::json;

use tdho::adiabatic;
use tdho::angle_action::{self, Grid};
use tdho::floquet::{self, Stability};
use tdho::frequency::{Builtin, Profile, SlowTimeFamily};
use tdho::linear_systems::FundamentalMatrix;
use tdho::oracle::{self, PhaseState};
use tdho::riccati;

use crate::config::Config;
use crate::output::{num, CsvWriter};

fn out_path(explicit: &Option<PathBuf>, default: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| PathBuf::from(default))
}

/// `solve`: oracle solution plus the closed-form approximants and the
/// order-1 certified bounds on a dense grid. A companion
/// `<stem>_picard.csv` (plus `.json` with `--format json`) carries the
/// full iterate family up to `picard_order`.
pub fn cmd_solve(cfg: &Config, out: &Option<PathBuf>, format: &str) -> Result<bool> {
    let profile: Builtin = cfg.profile()?;
    let t0 = cfg.f64("t0", 0.0)?;
    let t1 = cfg.f64("t1", 30.0)?;
    let tol = cfg.f64("tol", 1e-10)?;
    let q0 = cfg.f64("q0", 1.0)?;
    let p0 = cfg.f64("p0", 0.0)?;
    let order = cfg.usize("picard_order", 1)?.max(1);
    if !(t1 > t0) {
        bail!("need t1 > t0");
    }

    let w0 = profile.omega(t0);
    let aa0 = angle_action::to_angle_action(
        &PhaseState {
            t: t0,
            q: q0,
            p: p0,
        },
        w0,
    )
    .map_err(|e| anyhow!("initial state: {e}"))?;
    let grid = Grid::dense(&profile, t0, t1, t0, cfg.f64("points_per_phase", 64.0)?)
        .map_err(|e| anyhow!("grid: {e}"))?;
    let series = angle_action::picard_psi(&profile, aa0.psi, &grid, order)
        .map_err(|e| anyhow!("picard: {e}"))?;
    let actions = angle_action::picard_action(&profile, &series, aa0.i)
        .map_err(|e| anyhow!("picard action: {e}"))?;
    let approx = angle_action::approximants_on_grid(&profile, aa0.psi, aa0.i, &grid)
        .map_err(|e| anyhow!("approximants: {e}"))?;
    let qp = oracle::integrate_qp(&profile, q0, p0, t0, t1, tol)?;
    let aa = oracle::integrate_angle_action(&profile, aa0.psi, aa0.i, t0, t1, tol)?;

    let path = out_path(out, "solve.csv");
    let mut csv = CsvWriter::create(
        &path,
        "solve",
        &[
            "t",
            "q",
            "p",
            "psi",
            "I",
            "q_zeroth",
            "q_tilde",
            "q_hat",
            "I_first",
            "g",
            "bound_psi1",
            "bound_logI1",
        ],
    )?;
    let mut certified = true;
    for (j, &t) in grid.points().iter().enumerate() {
        let s = qp.eval(t);
        let a = aa.eval(t);
        // order-1 certificates against the oracle
        let slack = 10.0 * tol;
        if (a.psi - series.psi_values(1)[j]).abs() > series.psi_bound(1, j) + slack
            || (a.i.ln() - actions[1][j].ln()).abs() > series.log_action_bound(1, j) + slack
        {
            certified = false;
        }
        csv.row(&[
            num(t),
            num(s.q),
            num(s.p),
            num(a.psi),
            num(a.i),
            num(approx.q_zeroth[j]),
            num(approx.q_tilde[j]),
            num(approx.q_hat[j]),
            num(approx.i_first[j]),
            num(series.g_values()[j]),
            num(series.psi_bound(1, j)),
            num(series.log_action_bound(1, j)),
        ])?;
    }
    csv.finish()?;
    write_picard_series(&path, format, &grid, &series, &actions)?;
    eprintln!(
        "solve: wrote {} ({} rows); certificates {}",
        path.display(),
        grid.len(),
        if certified { "ok" } else { "VIOLATED" }
    );
    Ok(certified)
}

/// Companion export of the whole iterate family: per grid point, every
/// ψ⁽ʰ⁾ and 𝓘⁽ʰ⁾, the running total variation g, and the top-order
/// certified bounds.
fn write_picard_series(
    solve_path: &std::path::Path,
    format: &str,
    grid: &Grid,
    series: &angle_action::PicardSeries,
    actions: &[Vec<f64>],
) -> Result<()> {
    let stem = solve_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("solve");
    let order = series.order();
    let path = solve_path.with_file_name(format!("{stem}_picard.csv"));
    let mut columns: Vec<String> = vec!["t".into(), "g".into()];
    for h in 0..=order {
        columns.push(format!("psi_{h}"));
    }
    for h in 0..=order {
        columns.push(format!("I_{h}"));
    }
    columns.push(format!("bound_psi_{order}"));
    columns.push(format!("bound_logI_{order}"));
    let col_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut csv = CsvWriter::create(&path, "picard-series", &col_refs)?;
    for (j, &t) in grid.points().iter().enumerate() {
        let mut row = vec![num(t), num(series.g_values()[j])];
        for h in 0..=order {
            row.push(num(series.psi_values(h)[j]));
        }
        for action in actions.iter().take(order + 1) {
            row.push(num(action[j]));
        }
        row.push(num(series.psi_bound(order, j)));
        row.push(num(series.log_action_bound(order, j)));
        csv.row(&row)?;
    }
    csv.finish()?;
    if format == "json" {
        let jpath = solve_path.with_file_name(format!("{stem}_picard.json"));
        let doc = json!({
            "schema": "tdho picard-series v1",
            "order": order,
            "t": grid.points(),
            "g": series.g_values(),
            "psi": (0..=order).map(|h| series.psi_values(h).to_vec()).collect::<Vec<_>>(),
            "action": actions,
            "bound_psi": (0..grid.len()).map(|j| series.psi_bound(order, j)).collect::<Vec<_>>(),
            "bound_log_action": (0..grid.len()).map(|j| series.log_action_bound(order, j)).collect::<Vec<_>>(),
        });
        std::fs::write(&jpath, serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(())
}

/// `zeros`: the interlaced zero sequence with gap certificates.
pub fn cmd_zeros(cfg: &Config, out: &Option<PathBuf>) -> Result<bool> {
    let profile = cfg.profile()?;
    let t0 = cfg.f64("t0", 0.0)?;
    let t_max = cfg.f64("t_max", 30.0)?;
    let q0 = cfg.f64("q0", 0.0)?;
    let p0 = cfg.f64("p0", 1.0)?;
    let seq = riccati::find_zero_sequence(&profile, q0, p0, t0, t_max)
        .map_err(|e| anyhow!("zero localization: {e}"))?;

    let path = out_path(out, "zeros.csv");
    let mut csv = CsvWriter::create(
        &path,
        "zeros",
        &["h", "t_h", "parity", "gap", "bound_low", "bound_high"],
    )?;
    let zeros = seq.zeros();
    let gaps = seq.gaps();
    let mut certified = true;
    for (i, z) in zeros.iter().enumerate() {
        let parity = match z.parity {
            angle_action::Parity::Even => "q-zero",
            angle_action::Parity::Odd => "p-zero",
        };
        let (gap, lo, hi) = match gaps.get(i) {
            Some(g) => {
                if !g.holds() {
                    certified = false;
                }
                (num(g.gap), num(g.lower), num(g.upper))
            }
            None => (String::new(), String::new(), String::new()),
        };
        csv.row(&[z.h.to_string(), num(z.t), parity.to_string(), gap, lo, hi])?;
    }
    csv.finish()?;
    eprintln!(
        "zeros: wrote {} ({} zeros); gap certificates {}",
        path.display(),
        zeros.len(),
        if certified { "ok" } else { "VIOLATED" }
    );
    Ok(certified)
}

/// `floquet-map`: stability chart plus the first-tongue analytic boundary
/// overlay (with the resonance centres in the header).
pub fn cmd_floquet_map(
    cfg: &Config,
    out: &Option<PathBuf>,
    resolution: Option<usize>,
) -> Result<bool> {
    let alpha = cfg.f64("alpha", 2.0)?;
    let wb_min = cfg.f64("omega_bar_min", 0.8)?;
    let wb_max = cfg.f64("omega_bar_max", 1.2)?;
    let eta_min = cfg.f64("eta_min", 0.0)?;
    let eta_max = cfg.f64("eta_max", 0.3)?;
    let n = resolution.unwrap_or(cfg.usize("resolution", 64)?);
    let tol = cfg.f64("tol", 1e-9)?;

    let map = floquet::stability_map(alpha, (wb_min, wb_max), (eta_min, eta_max), n, n, tol)
        .map_err(|e| anyhow!("stability map: {e}"))?;
    let path = out_path(out, "floquet_map.csv");
    let mut csv = CsvWriter::create(&path, "floquet-map", &["omega_bar", "eta", "mu", "class"])?;
    for p in &map.points {
        let class = match p.class {
            Stability::Stable => "stable",
            Stability::Marginal => "marginal",
            Stability::Unstable => "unstable",
        };
        csv.row(&[num(p.omega_bar), num(p.eta), num(p.mu), class.to_string()])?;
    }
    csv.finish()?;

    // analytic first-tongue boundary overlay and resonance centres
    let period = 2.0 * std::f64::consts::PI / alpha;
    let resonances = floquet::resonance_points(period, 3);
    let boundary_path = path.with_file_name(format!(
        "{}_boundary.csv",
        path.file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("floquet_map")
    ));
    let file = std::fs::File::create(&boundary_path)?;
    use std::io::Write;
    let mut outp = std::io::BufWriter::new(file);
    writeln!(outp, "# tdho csv v1 floquet-map-boundary")?;
    writeln!(
        outp,
        "# resonance centres omega_bar = j*pi/T: {}",
        resonances
            .iter()
            .map(|r| num(*r))
            .collect::<Vec<_>>()
            .join(" ")
    )?;
    writeln!(outp, "omega_bar,eta_boundary")?;
    for i in 0..=256 {
        let wb = wb_min + (wb_max - wb_min) * i as f64 / 256.0;
        writeln!(
            outp,
            "{},{}",
            num(wb),
            num(4.0 * (2.0 * wb / alpha - 1.0).abs())
        )?;
    }
    writeln!(outp)?;
    eprintln!(
        "floquet-map: wrote {} and {}",
        path.display(),
        boundary_path.display()
    );
    Ok(true)
}

/// `adiabatic`: end-to-end action scaling across a slow ramp, with the
/// per-ε a-priori window bound.
pub fn cmd_adiabatic(cfg: &Config, out: &Option<PathBuf>, format: &str) -> Result<bool> {
    let base = cfg.profile()?;
    let epsilons = cfg.f64_list("epsilons", &[0.2, 0.1, 0.05, 0.025])?;
    let tol = cfg.f64("tol", 1e-12)?;
    let (lo, hi) = (
        cfg.f64("tau_scan_min", -10.0)?,
        cfg.f64("tau_scan_max", 10.0)?,
    );
    let (mut tau_a, mut tau_b) = adiabatic::tail_window(&base, lo, hi);
    tau_a = cfg.f64("tau_a", tau_a)?;
    tau_b = cfg.f64("tau_b", tau_b)?;
    let report = adiabatic::scaling_experiment(&base, (tau_a, tau_b), &epsilons, tol)
        .map_err(|e| anyhow!("scaling experiment: {e}"))?;

    // a-priori window bound per epsilon
    let mut bounds = Vec::with_capacity(epsilons.len());
    for &eps in &epsilons {
        let family = SlowTimeFamily::new(base.clone(), eps);
        let i0 = family.omega(tau_a / eps) / 2.0; // starts from (q, p) = (1, 0)
        let (c0, c1) = adiabatic::phase_domain_constants(&family, tau_b - tau_a);
        let omega_sup = (0..=4096)
            .map(|i| base.omega(tau_a + (tau_b - tau_a) * i as f64 / 4096.0))
            .fold(0.0f64, f64::max);
        let m = eps
            * (c0
                + (tau_b - tau_a) * omega_sup / (2.0 - eps * c0)
                    * (c1 / (1.0 - 0.5 * eps * c0) + c0 * c0));
        bounds.push(i0 * (m.exp() - 1.0));
    }

    let path = out_path(
        out,
        if format == "json" {
            "adiabatic.json"
        } else {
            "adiabatic.csv"
        },
    );
    if format == "json" {
        let doc = json!({
            "schema": "tdho adiabatic v1",
            "tau_window": [tau_a, tau_b],
            "epsilons": report.epsilons,
            "delta_i": report.deltas,
            "bound": bounds,
            "slope": report.fitted_slope,
            "max_residual": report.max_residual,
        });
        std::fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
    } else {
        let mut csv = CsvWriter::create(
            &path,
            "adiabatic",
            &["epsilon", "delta_I", "bound", "slope"],
        )?;
        for (i, &eps) in report.epsilons.iter().enumerate() {
            csv.row(&[
                num(eps),
                num(report.deltas[i]),
                num(bounds[i]),
                num(report.fitted_slope),
            ])?;
        }
        csv.finish()?;
    }
    // certificate: measured deltas below the a-priori bounds
    let certified = report.deltas.iter().zip(&bounds).all(|(d, b)| d <= b);
    eprintln!(
        "adiabatic: wrote {} (slope {:.3}); window bounds {}",
        path.display(),
        report.fitted_slope,
        if certified { "ok" } else { "VIOLATED" }
    );
    Ok(certified)
}

/// `trace-check`: the two monodromy-trace routes on a parameter grid.
pub fn cmd_trace_check(cfg: &Config, out: &Option<PathBuf>) -> Result<bool> {
    let alpha = cfg.f64("alpha", 2.0)?;
    let wb_min = cfg.f64("omega_bar_min", 0.8)?;
    let wb_max = cfg.f64("omega_bar_max", 1.2)?;
    let eta_min = cfg.f64("eta_min", 0.0)?;
    let eta_max = cfg.f64("eta_max", 0.3)?;
    let n = cfg.usize("resolution", 5)?;
    let tol = cfg.f64("tol", 1e-12)?;

    let path = out_path(out, "trace_check.csv");
    let mut csv = CsvWriter::create(
        &path,
        "trace-check",
        &[
            "omega_bar",
            "eta",
            "mu_monodromy",
            "mu_trace",
            "diff",
            "det_err",
        ],
    )?;
    let mut worst = 0.0f64;
    let mut certified = true;
    for i in 0..n {
        for j in 0..n {
            let wb = wb_min + (wb_max - wb_min) * i as f64 / (n - 1).max(1) as f64;
            let eta = eta_min + (eta_max - eta_min) * j as f64 / (n - 1).max(1) as f64;
            let profile = tdho::frequency::Mathieu::new(wb, eta, alpha)
                .map_err(|e| anyhow!("profile: {e}"))?;
            let rep = floquet::monodromy(&profile, tol).map_err(|e| anyhow!("monodromy: {e}"))?;
            let mu_trace = floquet::trace_via_angle_action(&profile, tol)
                .map_err(|e| anyhow!("trace: {e}"))?;
            let diff = (rep.mu - mu_trace).abs();
            let det_err = (rep.det - 1.0).abs();
            worst = worst.max(diff);
            if diff >= 1e-7 || det_err > 1e-9 {
                certified = false;
            }
            csv.row(&[
                num(wb),
                num(eta),
                num(rep.mu),
                num(mu_trace),
                num(diff),
                num(det_err),
            ])?;
        }
    }
    csv.finish()?;
    eprintln!(
        "trace-check: wrote {} (worst |mu diff| {:.3e}); certificates {}",
        path.display(),
        worst,
        if certified { "ok" } else { "VIOLATED" }
    );
    Ok(certified)
}

/// `ermakov-check`: amplitude-equation residual and exact-invariant
/// drift, plus the fundamental-matrix time series in a companion file.
pub fn cmd_ermakov_check(cfg: &Config, out: &Option<PathBuf>) -> Result<bool> {
    let profile = cfg.profile()?;
    let t_max = cfg.f64("t_max", 30.0)?;
    let tol = cfg.f64("tol", 1e-12)?;
    let fund = FundamentalMatrix::compute(&profile, 0.0, t_max, tol)
        .map_err(|e| anyhow!("fundamental matrix: {e}"))?;
    let rep = tdho::linear_systems::ermakov_check(&profile, &fund, 0.0, t_max, 600);
    let wronskian = fund.wronskian_drift(0.0, t_max, 600);

    let path = out_path(out, "ermakov_check.csv");
    let mut csv = CsvWriter::create(&path, "ermakov-check", &["quantity", "value"])?;
    csv.row(&[
        "max_equation_residual".into(),
        num(rep.max_equation_residual),
    ])?;
    csv.row(&["invariant_drift_q1".into(), num(rep.invariant_drift_q1)])?;
    csv.row(&["invariant_drift_q2".into(), num(rep.invariant_drift_q2)])?;
    csv.row(&["two_i_q1".into(), num(rep.two_i_q1)])?;
    csv.row(&["two_i_q2".into(), num(rep.two_i_q2)])?;
    csv.row(&["rho_min".into(), num(rep.rho_min)])?;
    csv.row(&["wronskian_drift".into(), num(wronskian)])?;
    csv.finish()?;

    // fundamental-matrix time series companion
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("ermakov_check");
    let series_path = path.with_file_name(format!("{stem}_series.csv"));
    let mut scsv = CsvWriter::create(
        &series_path,
        "fundamental-series",
        &["t", "q1", "p1", "q2", "p2", "det_v", "rho"],
    )?;
    let n = cfg.usize("samples", 600)?;
    for i in 0..=n {
        let t = t_max * i as f64 / n as f64;
        let (q1, p1, q2, p2) = fund.columns(t);
        let rho = tdho::linear_systems::ermakov_rho(&fund, t).0;
        scsv.row(&[
            num(t),
            num(q1),
            num(p1),
            num(q2),
            num(p2),
            num(q1 * p2 - q2 * p1),
            num(rho),
        ])?;
    }
    scsv.finish()?;

    let certified = rep.invariant_drift_q1 < 1e-8
        && rep.invariant_drift_q2 < 1e-8
        && rep.rho_min > 0.0
        && wronskian < 1e-9;
    eprintln!(
        "ermakov-check: wrote {} (drift {:.3e}/{:.3e}); certificates {}",
        path.display(),
        rep.invariant_drift_q1,
        rep.invariant_drift_q2,
        if certified { "ok" } else { "VIOLATED" }
    );
    Ok(certified)
}

/// Ensure the output's parent directory exists.
pub fn prepare_out_dir(out: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = out {
        if let Some(dir) = p.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
    }
    Ok(())
}

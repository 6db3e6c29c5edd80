use std::path::PathBuf;

use bec_cavity::finite::{finite_spectrum, perturbative_splitting, photon_current, FiniteModel, DEFAULT_SUPEROP_BUDGET};
use bec_cavity::linalg::eigenvalues;
use bec_cavity::model::{build_liouvillian, BranchKind, MeanFieldBranch, ModelParams};
use bec_cavity::moments::{
    drift_and_diffusion, evolve_moments_with, integrate_semiclassical, spin_observables, MomentState, SemiclassicalState,
    SemiclassicalVariant,
};
use bec_cavity::stability::{
    all_branch_stabilities, bogoliubov_frequencies, classify_closed_phase, closed_cubic, closed_frequencies, most_stable_superradiant,
    sweep_phase_diagram, Axis, PhaseGrid,
};
use bec_cavity::third_quantization::{eigenvalue_lattice, gamma_squared, spectral_data};
use bec_cavity::C64;
use serde_json::{json, Value};

use crate::config::ConfigFile;
use crate::error::{CliError, InModule};
use crate::output::{json_num, num, Csv, Metadata, OutDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Evolve,
    PhaseDiagram,
    Closed,
    Finite,
    Semiclassical,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Evolve => "evolve",
            Self::PhaseDiagram => "phase-diagram",
            Self::Closed => "closed",
            Self::Finite => "finite",
            Self::Semiclassical => "semiclassical",
        }
    }
}

#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub config: ConfigFile,
    pub out: PathBuf,
    pub seed_amplitude: f64,
    pub variant: SemiclassicalVariant,
    /// Cap on the squared Hilbert-space dimension of finite-size runs.
    pub finite_budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// Some sweep cells failed; their rows hold NaN.
    Partial,
}

/// Parameters used for any key missing from `[params]`.
pub fn default_params() -> ModelParams {
    ModelParams::new(46.0, 7.4, 6.3, 7.25, 1250.0, 2000.0).expect("valid defaults")
}

pub fn default_finite_budget() -> usize {
    DEFAULT_SUPEROP_BUDGET
}

pub fn run(cfg: &RunConfig) -> Result<(Status, Vec<PathBuf>), CliError> {
    let variant = match cfg.variant {
        SemiclassicalVariant::Printed => "printed",
        SemiclassicalVariant::Corrected => "corrected",
    };
    let overrides = match cfg.command {
        Command::Evolve => vec![("seed_amplitude", num(cfg.seed_amplitude))],
        Command::Semiclassical => vec![("seed_amplitude", num(cfg.seed_amplitude)), ("variant", variant.to_string())],
        Command::Finite => vec![("finite_budget", cfg.finite_budget.to_string())],
        _ => vec![],
    };
    let meta = Metadata::new(cfg.command.name(), &cfg.config.canonical(), &overrides);
    let mut out = OutDir::create(&cfg.out)?;
    let status = match cfg.command {
        Command::Spectrum => spectrum(cfg, &meta, &mut out)?,
        Command::Evolve => evolve(cfg, &meta, &mut out)?,
        Command::PhaseDiagram => phase_diagram(cfg, &meta, &mut out)?,
        Command::Closed => closed(cfg, &meta, &mut out)?,
        Command::Finite => finite(cfg, &meta, &mut out)?,
        Command::Semiclassical => semiclassical(cfg, &meta, &mut out)?,
    };
    Ok((status, out.written))
}

fn params_line(p: &ModelParams) -> String {
    format!(
        "# params: omega_khz={} omega0_khz={} lambda_d_khz={} lambda_s_khz={} kappa_khz={} n_atoms={}",
        num(p.omega),
        num(p.omega0),
        num(p.lambda_d),
        num(p.lambda_s),
        num(p.kappa),
        num(p.n_atoms)
    )
}

fn pair(z: C64) -> Value {
    json!([json_num(z.re), json_num(z.im)])
}

fn branch_json(b: &MeanFieldBranch) -> Value {
    json!({
        "kind": match b.kind { BranchKind::Normal => "normal", BranchKind::Superradiant => "superradiant" },
        "alpha": pair(b.alpha),
        "beta1": pair(b.beta1),
        "beta2": pair(b.beta2),
    })
}

fn select_branch(c: &ConfigFile, section: &str, p: &ModelParams) -> Result<MeanFieldBranch, CliError> {
    match c.choice_or(section, "branch", &["normal", "superradiant"], "normal")? {
        "normal" => Ok(MeanFieldBranch::normal()),
        _ => {
            let all = all_branch_stabilities(p).in_module("model")?;
            most_stable_superradiant(&all)
                .map(|s| s.branch)
                .ok_or_else(|| CliError::Usage("no physical superradiant branch at these parameters".into()))
        }
    }
}

fn spectrum(cfg: &RunConfig, meta: &Metadata, out: &mut OutDir) -> Result<Status, CliError> {
    let c = &cfg.config;
    let p = c.params(&default_params())?;
    let max_occ = c.usize_or("spectrum", "max_occupation", 2)? as u32;
    let b = select_branch(c, "spectrum", &p)?;
    let l = build_liouvillian(&p, &b).in_module("model")?;
    let sd = spectral_data(&l).in_module("third-quantization")?;
    out.write_json(
        "rapidities.json",
        meta,
        json!({
            "branch": branch_json(&b),
            "rapidities": sd.rapidities.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            "diagonalizable": sd.diagonalizable,
            "mode_condition_number": json_num(sd.cond),
            "stable": sd.is_stable(),
            "gamma_squared": gamma_squared(&sd, p.kappa).map(json_num),
        }),
    )?;
    let lattice = eigenvalue_lattice(&sd, max_occ).in_module("third-quantization")?;
    let mut t = Csv::new(&["n1", "n2", "n3", "n4", "n5", "n6", "re_lambda", "im_lambda"]);
    for e in &lattice.entries {
        let mut cells: Vec<String> = e.occupations.iter().map(|n| n.to_string()).collect();
        cells.extend([num(e.eigenvalue.re), num(e.eigenvalue.im)]);
        t.row(&cells);
    }
    out.write("lattice.csv", &t.render(meta, &[params_line(&p)]))?;
    Ok(Status::Complete)
}

fn evolve(cfg: &RunConfig, meta: &Metadata, out: &mut OutDir) -> Result<Status, CliError> {
    let c = &cfg.config;
    let p = c.params(&default_params())?;
    let t_end = c.f64_or("evolve", "t_end_ms", 1.0)?;
    let dt = c.f64_or("evolve", "dt_ms", 1e-3)?;
    let tol = c.f64_or("evolve", "tol", 1e-10)?;
    let squeeze = c.f64_or("evolve", "pair", 0.0)?;
    let b = select_branch(c, "evolve", &p)?;
    let l = build_liouvillian(&p, &b).in_module("model")?;
    let (a, d) = drift_and_diffusion(&l);
    let init = if squeeze == 0.0 {
        MomentState::seeded(cfg.seed_amplitude)
    } else {
        MomentState::squeezed_cavity(cfg.seed_amplitude, C64::new(squeeze, 0.0))
    };
    let tr = evolve_moments_with(&a, &d, &init, t_end, dt, tol).in_module("moments-dynamics")?;

    let mut t = Csv::new(&[
        "t_ms", "re_da", "im_da", "re_db1", "im_db1", "re_db2", "im_db2", "jx_1", "jx_2", "jy_1", "jy_2", "jz_1", "jz_2",
        "jx1_jx2_connected", "jx1_jy2_connected", "xi_y_1", "xi_y_2",
    ]);
    let mut degenerate = 0usize;
    for s in &tr.states {
        let mut cells = vec![num(s.time)];
        for z in &s.first[..3] {
            cells.extend([num(z.re), num(z.im)]);
        }
        match spin_observables(s, &p, &b) {
            Ok(o) => {
                for v in [o.jx, o.jy, o.jz] {
                    cells.extend([num(v[0]), num(v[1])]);
                }
                cells.extend([num(o.xx_connected), num(o.xy_connected), num(o.xi_y[0]), num(o.xi_y[1])]);
            }
            Err(_) => {
                degenerate += 1;
                cells.extend(std::iter::repeat(num(f64::NAN)).take(10));
            }
        }
        t.row(&cells);
    }
    out.write("timeseries.csv", &t.render(meta, &[params_line(&p)]))?;
    let max_re = eigenvalues(&a).in_module("linalg-kernel")?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    out.write_json(
        "timeseries.json",
        meta,
        json!({
            "branch": branch_json(&b),
            "status": format!("{:?}", tr.status),
            "samples": tr.states.len(),
            "drift_max_re": json_num(max_re),
            "seed_amplitude": json_num(cfg.seed_amplitude),
            "initial_pair": json_num(squeeze),
            "samples_with_degenerate_squeezing": degenerate,
        }),
    )?;
    Ok(Status::Complete)
}

fn phase_diagram(cfg: &RunConfig, meta: &Metadata, out: &mut OutDir) -> Result<Status, CliError> {
    let c = &cfg.config;
    let base = c.params(&default_params())?;
    let v = c.f64_or("phase-diagram", "v_khz", 121.65)?;
    let d = PhaseGrid::default();
    let grid = PhaseGrid {
        phi_deg: c.axis_or("phase-diagram", "phi_deg", d.phi_deg)?,
        omega: c.axis_or("phase-diagram", "omega_khz", d.omega)?,
        classify_closed: c.bool_or("phase-diagram", "classify_closed", d.classify_closed)?,
    };
    let p = base.with_couplings(v, 0.0);
    let records = sweep_phase_diagram(&grid, &p).in_module("stability-maps")?;

    let mut t = Csv::new(&["phi_deg", "omega_khz", "max_re_normal_1pt", "im_normal_1pt", "max_re_sr_1pt", "max_re_best_2pt", "closed_phase"]);
    let mut failures = Vec::new();
    for r in &records {
        t.row(&[
            num(r.phi_deg),
            num(r.omega),
            num(r.max_re_one_point),
            num(r.im_at_max_one_point),
            r.max_re_sr_one_point.map(num).unwrap_or_default(),
            num(r.max_re_best_two_point),
            r.closed_phase.map(|c| c.label().to_string()).unwrap_or_default(),
        ]);
        if let Some(e) = &r.error {
            failures.push(json!({ "phi_deg": json_num(r.phi_deg), "omega_khz": json_num(r.omega), "error": e }));
        }
    }
    out.write("phase_diagram.csv", &t.render(meta, &[params_line(&p)]))?;
    let axis = |a: &Axis| json!({ "start": json_num(a.start), "end": json_num(a.end), "points": a.points });
    out.write_json(
        "phase_diagram.json",
        meta,
        json!({
            "phi_deg": axis(&grid.phi_deg),
            "omega_khz": axis(&grid.omega),
            "v_khz": json_num(v),
            "omega0_khz": json_num(p.omega0),
            "kappa_khz": json_num(p.kappa),
            "n_atoms": json_num(p.n_atoms),
            "classify_closed": grid.classify_closed,
            "cells": records.len(),
            "failed_cells": failures,
        }),
    )?;
    Ok(if failures.is_empty() { Status::Complete } else { Status::Partial })
}

fn closed(cfg: &RunConfig, meta: &Metadata, out: &mut OutDir) -> Result<Status, CliError> {
    let p = cfg.config.params(&default_params())?;
    let f = closed_frequencies(&p).in_module("stability-maps")?;
    let nu = bogoliubov_frequencies(&f);
    let phase = classify_closed_phase(&p).in_module("stability-maps")?;
    let mut t = Csv::new(&["root", "re_f", "im_f", "re_nu", "im_nu"]);
    for k in 0..3 {
        t.row(&[k.to_string(), num(f[k].re), num(f[k].im), num(nu[k].re), num(nu[k].im)]);
    }
    out.write("closed.csv", &t.render(meta, &[params_line(&p)]))?;
    out.write_json(
        "closed.json",
        meta,
        json!({
            "cubic_coefficients_ascending": closed_cubic(&p).coeffs.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            "phase": phase.label(),
        }),
    )?;
    Ok(Status::Complete)
}

fn finite(cfg: &RunConfig, meta: &Metadata, out: &mut OutDir) -> Result<Status, CliError> {
    let c = &cfg.config;
    let p = c.params(&default_params())?;
    let spin_atoms = c.usize_or("finite", "spin_atoms", 2)?;
    let cutoff = c.usize_or("finite", "fock_cutoff", 4)?;
    let ladder: Vec<[u32; 4]> = (1..=spin_atoms.min(2) as u32).map(|n| [n, 0, 0, 0]).collect();
    let modes = c.modes_or("finite", "modes", &ladder)?;
    let want_current = c.bool_or("finite", "current", true)?;
    let fm = FiniteModel::with_budget(p, spin_atoms, cutoff, cfg.finite_budget).in_module("finite-size")?;
    let ev = finite_spectrum(&fm).in_module("finite-size")?;

    let mut t = Csv::new(&["re_lambda", "im_lambda"]);
    for z in &ev {
        t.row(&[num(z.re), num(z.im)]);
    }
    out.write("finite_spectrum.csv", &t.render(meta, &[params_line(&fm.params)]))?;

    let pert = perturbative_splitting(&fm, &modes).in_module("finite-size")?;
    let mut t = Csv::new(&["n_plus", "n_minus", "m_plus", "m_minus", "im_lambda1", "re_nearest", "im_nearest", "gap"]);
    for m in &pert {
        let near = ev.iter().copied().min_by(|a, b| (a - m.lambda1).norm().total_cmp(&(b - m.lambda1).norm())).unwrap_or(C64::new(f64::NAN, f64::NAN));
        let mut cells: Vec<String> = m.occupations.iter().map(|n| n.to_string()).collect();
        cells.extend([num(m.lambda1.im), num(near.re), num(near.im), num((near - m.lambda1).norm())]);
        t.row(&cells);
    }
    out.write("perturbative.csv", &t.render(meta, &[params_line(&fm.params)]))?;

    let current = if want_current { Some(photon_current(&fm).in_module("finite-size")?) } else { None };
    out.write_json(
        "finite.json",
        meta,
        json!({
            "spin_atoms": spin_atoms,
            "fock_cutoff": cutoff,
            "hilbert_dimension": fm.dims(),
            "budget": cfg.finite_budget,
            "eigenvalues": ev.len(),
            "photon_current": current.map(json_num),
        }),
    )?;
    Ok(Status::Complete)
}

fn semiclassical(cfg: &RunConfig, meta: &Metadata, out: &mut OutDir) -> Result<Status, CliError> {
    let c = &cfg.config;
    let p = c.params(&default_params())?;
    let t_end = c.f64_or("semiclassical", "t_end_ms", 1.0)?;
    let dt = c.f64_or("semiclassical", "dt_ms", 1e-3)?;
    let tol = c.f64_or("semiclassical", "tol", 1e-10)?;
    let alpha = C64::new(
        c.f64_or("semiclassical", "alpha_re", cfg.seed_amplitude / p.n_atoms.sqrt())?,
        c.f64_or("semiclassical", "alpha_im", 0.0)?,
    );
    let tilt = |key: &str| -> Result<(C64, f64), CliError> {
        let b = c.f64_or("semiclassical", key, 0.0)?;
        if b.abs() > 0.5 {
            return Err(CliError::Usage(format!("{key} must lie in [-0.5, 0.5]")));
        }
        Ok((C64::new(b, 0.0), -(0.25 - b * b).sqrt()))
    };
    let ((beta1, w1), (beta2, w2)) = (tilt("beta1_re")?, tilt("beta2_re")?);
    let init = SemiclassicalState { alpha, beta1, beta2, w1, w2 };
    let tr = integrate_semiclassical(&init, &p, cfg.variant, t_end, dt, tol).in_module("moments-dynamics")?;

    let mut t = Csv::new(&["t_ms", "re_alpha", "im_alpha", "re_beta1", "im_beta1", "re_beta2", "im_beta2", "w1", "w2", "jx_1", "jx_2"]);
    for (time, s) in tr.times.iter().zip(&tr.states) {
        let jx = s.jx();
        t.row(&[
            num(*time),
            num(s.alpha.re),
            num(s.alpha.im),
            num(s.beta1.re),
            num(s.beta1.im),
            num(s.beta2.re),
            num(s.beta2.im),
            num(s.w1),
            num(s.w2),
            num(jx[0]),
            num(jx[1]),
        ]);
    }
    out.write("semiclassical.csv", &t.render(meta, &[params_line(&p)]))?;
    out.write_json(
        "semiclassical.json",
        meta,
        json!({
            "variant": format!("{:?}", cfg.variant).to_lowercase(),
            "status": format!("{:?}", tr.status),
            "samples": tr.states.len(),
        }),
    )?;
    Ok(Status::Complete)
}

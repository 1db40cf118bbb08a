//! One runner per scenario kind. Each produces a fixed-column table plus
//! headline numbers for the summary file.

use std::f64::consts::PI;

use topophase_core::duality::{duality_check, AcConfig, CapacitorScenario, DipoleScenario};
use topophase_core::dynamics::{integrate_heisenberg, scalar_ab_phase, winding_number};
use topophase_core::interferometer::analyze;
use topophase_core::measurement::{
    c_pi_indistinguishability, decohere_interferometer, ensemble_precession_test,
    measured_two_path, phase_uncertainty_after_measurement, verify_precession_single,
    which_path_guess, Coupling,
};
use topophase_core::qlinalg::{DensityMatrix, Operator};
use topophase_core::{
    interferometer, Error, InterferenceReport, ProtocolConfig, Trajectory, TwoPathSetup,
};

use crate::config::{ConfigError, Kind, ScenarioConfig};
use crate::output::{fmt_float, Cell, Table};

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(m) => RunError::Numerical(m),
            Error::Dimension(_) => RunError::Numerical(e.to_string()),
            Error::Configuration(m) => RunError::Config(m),
            _ => RunError::Config(e.to_string()),
        }
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

pub struct Output {
    pub table: Table,
    /// Rows are a time series; sweeps keep only the final row.
    pub series: bool,
    pub summary: Vec<(String, String)>,
}

impl Output {
    fn single(table: Table) -> Self {
        Self {
            table,
            series: false,
            summary: Vec::new(),
        }
    }

    fn note(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into().render()));
    }
}

pub fn header(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Precession => &["t", "theta", "s_x", "s_y", "s_z", "phase"],
        Kind::TwoPath => &["visibility", "distinguishability", "relative_phase"],
        Kind::VerifyC => &[
            "s",
            "c_mean",
            "c_stderr",
            "sign_agreement",
            "mean_sigma_z",
            "delta_sigma_z",
            "trials",
            "seed",
        ],
        Kind::PhaseUncertainty => &["s", "delta_phi", "stderr", "trials", "seed"],
        Kind::Ensemble => &[
            "spins",
            "phi",
            "delta_phi_total",
            "stderr",
            "detection_power",
            "mean_correlation",
            "trials",
            "seed",
        ],
        Kind::DecohereSweep => &["s", "visibility", "distinguishability", "p_guess", "bound"],
        Kind::CPi => &[
            "tv_distance",
            "min_fidelity",
            "p_a_pp",
            "p_a_pm",
            "p_a_mp",
            "p_a_mm",
            "p_b_pp",
            "p_b_pm",
            "p_b_mp",
            "p_b_mm",
            "visibility_before",
            "visibility_after",
            "trials",
            "seed",
        ],
        Kind::TopologicalVsUniform => &[
            "relative_phase_a",
            "relative_phase_b",
            "tv_distance",
            "visibility_after_a",
            "visibility_after_b",
            "trials",
            "seed",
        ],
        Kind::ScalarAb => &["t", "field", "phase"],
        Kind::Duality => &[
            "ac_phase",
            "ab_phase",
            "winding",
            "capacitor_phase",
            "dipole_phase",
            "phases_equal",
            "samples_related",
        ],
    }
}

pub fn run(cfg: &ScenarioConfig) -> RunResult<Output> {
    let mut out = match cfg.kind {
        Kind::Precession => precession(cfg),
        Kind::TwoPath => two_path(cfg),
        Kind::VerifyC => verify_c(cfg),
        Kind::PhaseUncertainty => phase_uncertainty(cfg),
        Kind::Ensemble => ensemble(cfg),
        Kind::DecohereSweep => decohere_sweep(cfg),
        Kind::CPi => c_pi(cfg),
        Kind::TopologicalVsUniform => topological_vs_uniform(cfg),
        Kind::ScalarAb => scalar_ab(cfg),
        Kind::Duality => duality(cfg),
    }?;
    out.summary.insert(0, ("kind".into(), cfg.kind.name().into()));
    out.summary.insert(1, ("seed".into(), cfg.seed.to_string()));
    Ok(out)
}

fn table(kind: Kind) -> Table {
    Table::new(header(kind))
}

fn precession(cfg: &ScenarioConfig) -> RunResult<Output> {
    let coupling = cfg.coupling()?;
    let traj = cfg.path("trajectory", &coupling, None)?;
    let bloch0 = DensityMatrix::from_ket(&cfg.spin()?)?.bloch()?;
    let series = integrate_heisenberg(&traj, &coupling, bloch0, cfg.step)?;
    let theta0 = traj.start().theta;
    let mut t = table(Kind::Precession);
    for (&time, b) in series.times.iter().zip(&series.bloch) {
        let theta = traj.theta_at(time)?;
        t.push(vec![
            time.into(),
            theta.into(),
            b[0].into(),
            b[1].into(),
            b[2].into(),
            coupling.phase_for(theta - theta0).into(),
        ]);
    }
    let mut out = Output {
        table: t,
        series: true,
        summary: Vec::new(),
    };
    let last = series.last();
    out.note("xi", coupling.xi());
    out.note("delta_theta", traj.delta_theta());
    out.note("winding", winding_number(&traj));
    out.note("rotation", coupling.rotation_for(traj.delta_theta()));
    out.note("phase", coupling.phase_for(traj.delta_theta()));
    out.note("final_s_x", last[0]);
    out.note("final_s_y", last[1]);
    out.note("final_s_z", last[2]);
    Ok(out)
}

fn two_path_setup(cfg: &ScenarioConfig) -> RunResult<TwoPathSetup> {
    let coupling = cfg.coupling()?;
    let a = cfg.path("arm_a", &coupling, None)?;
    let b = cfg.path("arm_b", &coupling, None)?;
    Ok(TwoPathSetup::new(a, b, cfg.spin()?, coupling)?
        .with_extra_phases(cfg.extra_phase_a, cfg.extra_phase_b)
        .with_dynamical_phase(cfg.include_dynamical_phase))
}

fn phase_cell(r: &InterferenceReport) -> Cell {
    r.relative_phase.unwrap_or(f64::NAN).into()
}

fn two_path(cfg: &ScenarioConfig) -> RunResult<Output> {
    let r = analyze(&two_path_setup(cfg)?)?;
    let mut t = table(Kind::TwoPath);
    t.push(vec![r.visibility.into(), r.distinguishability.into(), phase_cell(&r)]);
    let mut out = Output::single(t);
    out.note("visibility", r.visibility);
    out.note("distinguishability", r.distinguishability);
    out.note("relative_phase", phase_cell(&r));
    Ok(out)
}

fn precession_protocol(cfg: &ScenarioConfig, s_index: usize) -> RunResult<ProtocolConfig> {
    let coupling = cfg.coupling()?;
    let traj = cfg.path("trajectory", &coupling, Some(PI / 2.0))?;
    let pointer = cfg.pointer_scan()?[s_index];
    Ok(ProtocolConfig::precession_check(
        traj,
        coupling,
        cfg.spin()?,
        pointer,
        cfg.trials_nonzero()?,
        cfg.seed,
    ))
}

fn verify_c(cfg: &ScenarioConfig) -> RunResult<Output> {
    let mut t = table(Kind::VerifyC);
    let mut out_summary = Vec::new();
    for (i, p) in cfg.pointer_scan()?.iter().enumerate() {
        let v = verify_precession_single(&precession_protocol(cfg, i)?)?;
        t.push(vec![
            p.resolution().into(),
            v.c_mean.into(),
            v.c_stderr.into(),
            v.sign_agreement.into(),
            v.mean_sigma_z.into(),
            v.delta_sigma_z.into(),
            cfg.trials.into(),
            cfg.seed.into(),
        ]);
        out_summary.push((format!("c_mean[{i}]"), fmt_float(v.c_mean)));
        out_summary.push((format!("sign_agreement[{i}]"), fmt_float(v.sign_agreement)));
    }
    let mut out = Output::single(t);
    out.summary = out_summary;
    Ok(out)
}

fn phase_uncertainty(cfg: &ScenarioConfig) -> RunResult<Output> {
    let mut t = table(Kind::PhaseUncertainty);
    let mut out_summary = Vec::new();
    for (i, p) in cfg.pointer_scan()?.iter().enumerate() {
        let u = phase_uncertainty_after_measurement(&precession_protocol(cfg, i)?)?;
        t.push(vec![
            p.resolution().into(),
            u.delta_phi.into(),
            u.stderr.into(),
            u.trials.into(),
            u.seed.into(),
        ]);
        out_summary.push((format!("delta_phi[{i}]"), fmt_float(u.delta_phi)));
        out_summary.push((format!("mean_sigma_z[{i}]"), fmt_float(u.mean_sigma_z)));
        out_summary.push((format!("window[{i}]"), fmt_float(u.window)));
    }
    let mut out = Output::single(t);
    out.summary = out_summary;
    Ok(out)
}

fn ensemble(cfg: &ScenarioConfig) -> RunResult<Output> {
    let e = cfg
        .ensemble
        .as_ref()
        .ok_or_else(|| ConfigError("ensemble needs an [ensemble] section with `spins` and `phi`".into()))?;
    let st = ensemble_precession_test(e.spins, e.phi, &cfg.pointer()?, cfg.trials, cfg.seed)?;
    let mut t = table(Kind::Ensemble);
    t.push(vec![
        st.spins.into(),
        st.phi.into(),
        st.delta_phi_total.into(),
        st.stderr.into(),
        st.detection_power.into(),
        st.mean_correlation.into(),
        st.trials.into(),
        st.seed.into(),
    ]);
    let mut out = Output::single(t);
    out.note("delta_phi_total", st.delta_phi_total);
    out.note("expected_phi_sqrt_n_over_2", st.phi * (st.spins as f64).sqrt() / 2.0);
    out.note("detection_power", st.detection_power);
    Ok(out)
}

fn decohere_sweep(cfg: &ScenarioConfig) -> RunResult<Output> {
    let setup = two_path_setup(cfg)?;
    let time = cfg.measurement.coupling_time.unwrap_or(setup.start_time());
    let obs = cfg.observable()?;
    let trials = cfg.trials_nonzero()?;
    let unmeasured = analyze(&setup)?;
    let mut t = table(Kind::DecohereSweep);
    for p in cfg.pointer_scan()? {
        let r = decohere_interferometer(&setup, &p, time, &obs)?;
        let guess = which_path_guess(&setup, &p, time, &obs, trials, cfg.seed)?;
        let bound = 0.5 * (1.0 + (1.0 - r.visibility * r.visibility).max(0.0).sqrt());
        t.push(vec![
            p.resolution().into(),
            r.visibility.into(),
            r.distinguishability.into(),
            guess.into(),
            bound.into(),
        ]);
    }
    let mut out = Output::single(t);
    out.note("coupling_time", time);
    out.note("unmeasured_visibility", unmeasured.visibility);
    Ok(out)
}

fn c_pi(cfg: &ScenarioConfig) -> RunResult<Output> {
    let coupling = cfg.coupling()?;
    let pointer = cfg.pointer()?;
    let trials = cfg.trials_nonzero()?;
    let cmp = c_pi_indistinguishability(&coupling, &pointer, trials, cfg.seed)?;

    let sweep = coupling.sweep_for_rotation(PI)?;
    let setup = TwoPathSetup::new(
        Trajectory::arc(0.0, 1.0, 0.0, sweep, 1.0)?,
        Trajectory::arc(0.0, 1.0, 0.0, -sweep, 1.0)?,
        cfg.spin()?,
        coupling,
    )?;
    let before = analyze(&setup)?.visibility;
    let couplings: Vec<Coupling> = [setup.start_time(), setup.end_time()]
        .into_iter()
        .map(|time| Coupling {
            time,
            observable: Operator::sigma_x(),
        })
        .collect();
    let after = InterferenceReport::from_joint(measured_two_path(&setup, &couplings, &pointer)?)?
        .visibility;

    let mut row: Vec<Cell> = vec![cmp.tv_distance.into(), cmp.min_fidelity.into()];
    row.extend(cmp.distribution_a.iter().map(|&p| Cell::from(p)));
    row.extend(cmp.distribution_b.iter().map(|&p| Cell::from(p)));
    row.extend([before.into(), after.into(), trials.into(), cfg.seed.into()]);
    let mut t = table(Kind::CPi);
    t.push(row);
    let mut out = Output::single(t);
    out.note("tv_distance", cmp.tv_distance);
    out.note("min_fidelity", cmp.min_fidelity);
    out.note("visibility_change", after - before);
    Ok(out)
}

fn topological_vs_uniform(cfg: &ScenarioConfig) -> RunResult<Output> {
    let coupling = cfg.coupling()?;
    let r = interferometer::topological_vs_uniform(&coupling, &cfg.pointer()?, cfg.trials, cfg.seed)?;
    let tv = r.statistics.as_ref().map_or(f64::NAN, |s| s.tv_distance);
    let mut t = table(Kind::TopologicalVsUniform);
    t.push(vec![
        r.relative_phase_a.into(),
        r.relative_phase_b.into(),
        tv.into(),
        r.visibility_after_a.into(),
        r.visibility_after_b.into(),
        cfg.trials.into(),
        cfg.seed.into(),
    ]);
    let mut out = Output::single(t);
    out.note("relative_phase_a", r.relative_phase_a);
    out.note("relative_phase_b", r.relative_phase_b);
    out.note("tv_distance", tv);
    Ok(out)
}

fn scalar_ab(cfg: &ScenarioConfig) -> RunResult<Output> {
    let coupling = cfg.coupling()?;
    let field = cfg
        .field
        .as_ref()
        .ok_or_else(|| ConfigError("scalar_ab needs a [field] section with `samples`".into()))?;
    let samples: Vec<(f64, f64)> = field.samples.iter().map(|&[t, b]| (t, b)).collect();
    let total = scalar_ab_phase(&samples, &coupling)?;
    let mut t = table(Kind::ScalarAb);
    for k in 0..samples.len() {
        let phase = if k == 0 {
            0.0
        } else {
            scalar_ab_phase(&samples[..=k], &coupling)?
        };
        t.push(vec![samples[k].0.into(), samples[k].1.into(), phase.into()]);
    }
    let mut out = Output {
        table: t,
        series: true,
        summary: Vec::new(),
    };
    out.note("phase", total);
    Ok(out)
}

fn duality(cfg: &ScenarioConfig) -> RunResult<Output> {
    let coupling = cfg.coupling()?;
    let d = cfg
        .duality
        .as_ref()
        .ok_or_else(|| ConfigError("duality needs a [duality] section with `potential`".into()))?;
    let ac = AcConfig {
        coupling,
        trajectory: cfg.duality_loop(&coupling)?,
    };
    let ab = ac.dualize();
    let pairs = |v: &[[f64; 2]]| v.iter().map(|&[t, x]| (t, x)).collect::<Vec<_>>();
    let cap = CapacitorScenario::new(pairs(&d.potential), d.charge)?;
    let dip = match &d.dipole {
        Some(series) => DipoleScenario::new(pairs(series), d.field)?,
        None => DipoleScenario::from_capacitor(&cap, d.field)?,
    };
    let rep = duality_check(&cap, &dip, &coupling)?;
    let mut t = table(Kind::Duality);
    t.push(vec![
        ac.phase().into(),
        ab.phase().into(),
        winding_number(&ab.trajectory).into(),
        rep.capacitor_phase.into(),
        rep.dipole_phase.into(),
        rep.phases_equal.into(),
        rep.samples_related.into(),
    ]);
    let mut out = Output::single(t);
    out.note("ac_phase", ac.phase());
    out.note("ab_phase", ab.phase());
    out.note("phases_equal", rep.phases_equal);
    Ok(out)
}

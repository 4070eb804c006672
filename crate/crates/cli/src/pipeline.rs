//! Scenario execution: integrate, build frames, measure the rotation and
//! optionally cross-check everything against the transport oracle.
//!
//! Every command returns its files as a name-sorted map so that writing
//! them is the only side effect and repeated runs are byte-identical.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use kerr_faraday::frame::FRAME_CSV_HEADER;
use kerr_faraday::geodesic::{integrate, Termination, TrajectoryOptions};
use kerr_faraday::oracle::{axial_rotation, check_frame, faraday_numeric};
use kerr_faraday::output::fmt_f;
use kerr_faraday::polarization::{critical_points, faraday_curve, faraday_rate};
use serde_json::{json, Map, Value};

use crate::plots;
use crate::scenario::{Loaded, Scenario, ScenarioError};

/// Pass thresholds of the verification report.
pub const NULL_RESIDUAL_MAX: f64 = 1e-10;
pub const DRIFT_MAX: f64 = 1e-8;
pub const GRAM_MAX: f64 = 1e-8;
pub const FRAME_RESIDUAL_MAX: f64 = 1e-6;
pub const CHI_DIFF_MAX: f64 = 1e-6;
pub const NORM_DRIFT_MAX: f64 = 1e-8;
pub const ZERO_ROTATION_MAX: f64 = 1e-8;

/// Photons within this distance of the equatorial plane over the whole run
/// are treated as confined to it.
const EQUATORIAL_BAND: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Core(#[from] kerr_faraday::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use kerr_faraday::Error as E;
        match self {
            CliError::Core(E::StalledOrbit { .. } | E::NonFinite { .. }) => 4,
            CliError::Verification(_) => 3,
            _ => 2,
        }
    }

    pub fn to_json(&self, file: Option<&Path>) -> Value {
        let mut v = match self {
            CliError::Scenario(e) => e.to_json(file),
            CliError::Verification(msg) => json!({ "error": "verification", "message": msg }),
            CliError::Core(e) => {
                let kind = if self.exit_code() == 4 {
                    "numerical"
                } else {
                    "precondition"
                };
                json!({ "error": kind, "message": e.to_string() })
            }
            CliError::Io { path, source } => {
                json!({ "error": "io", "path": path.display().to_string(), "message": source.to_string() })
            }
        };
        v["exit_code"] = json!(self.exit_code());
        if let Some(f) = file {
            v["file"] = json!(f.display().to_string());
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub tol: Option<f64>,
    pub s_max: Option<f64>,
    pub verify: bool,
    pub format: Format,
}

/// A float column table rendered as CSV or JSON. `None` cells are empty in
/// CSV and `null` in JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(fmt_f).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|c| c.map_or(Value::Null, num)).collect()))
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "columns": self.columns, "rows": rows })).unwrap();
        s.push('\n');
        s
    }

    pub fn render(&self, stem: &str, format: Format) -> (String, String) {
        match format {
            Format::Csv => (format!("{stem}.csv"), self.to_csv()),
            Format::Json => (format!("{stem}.json"), self.to_json()),
        }
    }
}

/// JSON number with the same 17 significant digits as the CSV files;
/// non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt_f(x).parse().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// An integrated scenario with its sample grid.
pub struct Prepared {
    pub scenario: Scenario,
    pub defaults: Vec<&'static str>,
    pub overrides: Vec<&'static str>,
    pub traj: kerr_faraday::Path,
    pub s: Vec<f64>,
}

pub fn prepare(loaded: &Loaded, opts: &Options) -> Result<Prepared, CliError> {
    let mut scenario = loaded.scenario.clone();
    let mut overrides = Vec::new();
    if let Some(tol) = opts.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(kerr_faraday::Error::InvalidArgument(format!("--tol must be positive (got {tol})")).into());
        }
        scenario.run.tol = tol;
        overrides.push("run.tol");
    }
    if let Some(s_max) = opts.s_max {
        if !s_max.is_finite() {
            return Err(kerr_faraday::Error::InvalidArgument(format!("--s-max must be finite (got {s_max})")).into());
        }
        scenario.run.s_max = s_max;
        overrides.push("run.s_max");
    }
    let traj = integrate(
        &scenario.initial_state(),
        &scenario.conserved_set(),
        &scenario.kerr(),
        &TrajectoryOptions::new(scenario.run.s_max, scenario.run.tol),
    )?;
    let s = traj.sample_parameters(scenario.run.sample_count);
    Ok(Prepared {
        scenario,
        defaults: loaded.defaults.clone(),
        overrides,
        traj,
        s,
    })
}

impl Prepared {
    pub fn is_axial(&self) -> bool {
        self.scenario.is_axial()
    }

    /// Whether a zero-rotation theorem applies: Schwarzschild, axis-confined
    /// or equatorially confined photons.
    pub fn expects_zero_rotation(&self) -> bool {
        if self.scenario.params.a == 0.0 || self.is_axial() {
            return true;
        }
        self.s.iter().all(|&s| {
            self.traj
                .state_at(s)
                .map(|st| (st.theta() - FRAC_PI_2).abs() < EQUATORIAL_BAND)
                .unwrap_or(false)
        })
    }

    pub fn trajectory_table(&self) -> Result<Table, CliError> {
        let mut t = Table::new(&[
            "s",
            "t",
            "r",
            "theta",
            "phi",
            "sign_r",
            "sign_theta",
            "null_residual",
            "E_drift",
            "Phi_drift",
            "kappa_drift",
        ]);
        for &s in &self.s {
            let st = self.traj.state_at(s)?;
            let d = self.traj.diagnostics_at(s)?;
            let p = st.point();
            t.push(
                [
                    s,
                    p.t(),
                    p.r(),
                    p.theta(),
                    p.phi(),
                    st.sign_r(),
                    st.sign_theta(),
                    d.null_residual,
                    d.e_drift,
                    d.phi_drift,
                    d.kappa_drift,
                ]
                .map(Some)
                .to_vec(),
            );
        }
        Ok(t)
    }

    /// Closed-form frame legs at every sample; `None` when the frame is
    /// undefined (`kappa = 0`).
    pub fn frame_dump(&self) -> Result<Option<String>, CliError> {
        if self.scenario.conserved_set().require_frame().is_err() {
            return Ok(None);
        }
        let mut out = String::from(FRAME_CSV_HEADER);
        out.push('\n');
        for &s in &self.s {
            out.push_str(&self.traj.frame_at(s)?.csv_rows(s));
        }
        Ok(Some(out))
    }

    /// Faraday angle at every sample. Axis-confined photons have no
    /// closed form and use transport in the regular axis chart.
    pub fn chi(&self) -> Result<Vec<f64>, CliError> {
        if self.is_axial() {
            let pol = &self.scenario.polarization;
            Ok(axial_rotation(
                &self.traj,
                pol.c1,
                pol.c2,
                &self.s,
                self.scenario.run.tol,
            )?)
        } else {
            Ok(faraday_curve(&self.traj, &self.s)?)
        }
    }

    pub fn oracle(&self) -> Result<Oracle, CliError> {
        if self.is_axial() {
            return Ok(Oracle::default());
        }
        let tol = self.scenario.run.tol;
        let fc = check_frame(&self.traj, &self.s, tol)?;
        let pol = &self.scenario.polarization;
        let chi = faraday_numeric(pol.c1, pol.c2, &self.traj, &self.s, tol)?;
        Ok(Oracle {
            chi: Some(chi),
            max_frame_residual: Some(fc.max_frame_residual),
            norm_drift: Some(fc.norm_drift.max(fc.run.orthogonality_drift)),
        })
    }

    pub fn rotation_table(&self, chi: &[f64], oracle: Option<&Oracle>) -> Result<Table, CliError> {
        let mut t = Table::new(&[
            "s",
            "r",
            "theta",
            "phi",
            "chi",
            "residual_critical",
            "chi_oracle",
            "chi_diff",
        ]);
        let axial = self.is_axial();
        let chi_o = oracle.and_then(|o| o.chi.as_deref());
        for (i, &s) in self.s.iter().enumerate() {
            let st = self.traj.state_at(s)?;
            let residual = if axial {
                None
            } else {
                Some(self.traj.critical_residual_at(s)?)
            };
            let o = chi_o.map(|c| c[i]);
            t.push(vec![
                Some(s),
                Some(st.r()),
                Some(st.theta()),
                Some(st.point().phi()),
                Some(chi[i]),
                residual,
                o,
                o.map(|o| chi[i] - o),
            ]);
        }
        Ok(t)
    }

    pub fn critical_table(&self) -> Result<Table, CliError> {
        if self.is_axial() {
            return Err(kerr_faraday::Error::InvalidArgument(
                "critical points are undefined for axis-confined photons".into(),
            )
            .into());
        }
        let roots = critical_points(&self.traj, self.scenario.run.sample_count)?;
        let p0 = *self.traj.initial().point();
        let mut t = Table::new(&["s", "r", "theta", "phi", "chi", "chi_rate"]);
        for s in roots {
            let st = self.traj.state_at(s)?;
            let chi = kerr_faraday::polarization::faraday_angle(&p0, st.point(), self.traj.params());
            t.push(
                [
                    s,
                    st.r(),
                    st.theta(),
                    st.point().phi(),
                    chi,
                    faraday_rate(&self.traj, s)?,
                ]
                .map(Some)
                .to_vec(),
            );
        }
        Ok(t)
    }

    pub fn verification(&self, chi: &[f64], oracle: Option<&Oracle>) -> Result<Verification, CliError> {
        let steps = self.traj.step_diagnostics();
        let max_null = steps.iter().map(|d| d.null_residual).fold(0.0, f64::max);
        let drift =
            |f: fn(&kerr_faraday::geodesic::StepDiagnostics<f64>) -> f64| steps.iter().map(f).fold(0.0, f64::max);
        let max_gram = if self.scenario.conserved_set().require_frame().is_ok() {
            let mut g = 0.0f64;
            for &s in &self.s {
                g = g.max(self.traj.null_quad_at(s)?.gram_defect());
            }
            Some(g)
        } else {
            None
        };
        let chi_o = oracle.and_then(|o| o.chi.as_deref());
        Ok(Verification {
            max_null_residual: max_null,
            max_e_drift: drift(|d| d.e_drift),
            max_phi_drift: drift(|d| d.phi_drift),
            max_kappa_drift: drift(|d| d.kappa_drift),
            max_gram_defect: max_gram,
            max_frame_residual: oracle.and_then(|o| o.max_frame_residual),
            max_chi_diff: chi_o.map(|o| max_abs(chi.iter().zip(o).map(|(a, b)| a - b))),
            norm_drift: oracle.and_then(|o| o.norm_drift),
            max_abs_chi: max_abs(chi.iter().copied()),
            max_abs_chi_oracle: chi_o.map(|o| max_abs(o.iter().copied())),
            zero_rotation_expected: self.expects_zero_rotation(),
            oracle_run: oracle.is_some(),
            samples: self.s.len(),
            accepted_steps: self.traj.step_count(),
            events: self.traj.events().len(),
            termination: self.traj.termination(),
            azimuth_sweep: self.traj.azimuth_sweep(),
        })
    }
}

/// Transport-oracle results; all `None` for axis-confined photons, whose
/// angle already comes from transport.
#[derive(Debug, Clone, Default)]
pub struct Oracle {
    pub chi: Option<Vec<f64>>,
    pub max_frame_residual: Option<f64>,
    pub norm_drift: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub max_null_residual: f64,
    pub max_e_drift: f64,
    pub max_phi_drift: f64,
    pub max_kappa_drift: f64,
    pub max_gram_defect: Option<f64>,
    pub max_frame_residual: Option<f64>,
    pub max_chi_diff: Option<f64>,
    pub norm_drift: Option<f64>,
    pub max_abs_chi: f64,
    pub max_abs_chi_oracle: Option<f64>,
    pub zero_rotation_expected: bool,
    pub oracle_run: bool,
    pub samples: usize,
    pub accepted_steps: usize,
    pub events: usize,
    pub termination: Termination,
    pub azimuth_sweep: f64,
}

impl Verification {
    /// Named pass/fail checks; absent quantities are not checked.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        let below = |v: Option<f64>, max: f64| v.map(|v| v < max);
        let mut out = vec![
            ("null_residual", Some(self.max_null_residual < NULL_RESIDUAL_MAX)),
            ("E_drift", Some(self.max_e_drift < DRIFT_MAX)),
            ("Phi_drift", Some(self.max_phi_drift < DRIFT_MAX)),
            ("kappa_drift", Some(self.max_kappa_drift < DRIFT_MAX)),
            ("gram_defect", below(self.max_gram_defect, GRAM_MAX)),
            ("frame_residual", below(self.max_frame_residual, FRAME_RESIDUAL_MAX)),
            ("chi_diff", below(self.max_chi_diff, CHI_DIFF_MAX)),
            ("norm_drift", below(self.norm_drift, NORM_DRIFT_MAX)),
        ];
        if self.zero_rotation_expected {
            let chi = self.max_abs_chi_oracle.unwrap_or(self.max_abs_chi);
            out.push(("zero_rotation", Some(chi < ZERO_ROTATION_MAX)));
        }
        out.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks()
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn to_json(&self, p: &Prepared) -> Value {
        let sc = &p.scenario;
        let mut thresholds = Map::new();
        for (k, v) in [
            ("null_residual", NULL_RESIDUAL_MAX),
            ("drift", DRIFT_MAX),
            ("gram_defect", GRAM_MAX),
            ("frame_residual", FRAME_RESIDUAL_MAX),
            ("chi_diff", CHI_DIFF_MAX),
            ("norm_drift", NORM_DRIFT_MAX),
            ("zero_rotation", ZERO_ROTATION_MAX),
        ] {
            thresholds.insert(k.into(), num(v));
        }
        let checks: Map<String, Value> = self
            .checks()
            .into_iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        let termination = match self.termination {
            Termination::AffineLimit => "affine_limit",
            Termination::Horizon => "horizon",
            Termination::Escape => "escape",
        };
        json!({
            "max_frame_residual": opt_num(self.max_frame_residual),
            "max_chi_diff": opt_num(self.max_chi_diff),
            "norm_drift": opt_num(self.norm_drift),
            "samples": self.samples,
            "max_null_residual": num(self.max_null_residual),
            "max_E_drift": num(self.max_e_drift),
            "max_Phi_drift": num(self.max_phi_drift),
            "max_kappa_drift": num(self.max_kappa_drift),
            "max_gram_defect": opt_num(self.max_gram_defect),
            "max_abs_chi": num(self.max_abs_chi),
            "max_abs_chi_oracle": opt_num(self.max_abs_chi_oracle),
            "zero_rotation_expected": self.zero_rotation_expected,
            "oracle": self.oracle_run,
            "accepted_steps": self.accepted_steps,
            "turning_points": self.events,
            "termination": termination,
            "azimuth_sweep": num(self.azimuth_sweep),
            "thresholds": thresholds,
            "checks": checks,
            "passed": self.passed(),
            "settings": {
                "M": num(sc.params.mass),
                "a": num(sc.params.a),
                "E": num(sc.conserved.energy),
                "tol": num(sc.run.tol),
                "s_max": num(sc.run.s_max),
                "sample_count": sc.run.sample_count,
                "c1": num(sc.polarization.c1),
                "c2": num(sc.polarization.c2),
            },
            "defaults_applied": p.defaults,
            "overrides": p.overrides,
            "note": sc.note,
        })
    }
}

/// Files produced by one command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: BTreeMap<String, String>,
    /// Failed checks, when a verification report was produced.
    pub failures: Option<Vec<&'static str>>,
}

impl Artifacts {
    fn add(&mut self, (name, body): (String, String)) {
        self.files.insert(name, body);
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        for (name, body) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(io(&path))?;
        }
        Ok(())
    }

    /// `Err(Verification)` when any check failed.
    pub fn status(&self) -> Result<(), CliError> {
        match &self.failures {
            Some(f) if !f.is_empty() => Err(CliError::Verification(f.join(", "))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Integrate,
    Faraday,
    Verify,
    CriticalPoints,
    EmitPlots,
    /// Everything: trajectory, frames, rotation, critical points, plots and
    /// the verification report.
    All,
}

fn add_verification(out: &mut Artifacts, p: &Prepared, chi: &[f64], oracle: Option<&Oracle>) -> Result<(), CliError> {
    let v = p.verification(chi, oracle)?;
    let mut body = serde_json::to_string_pretty(&v.to_json(p)).unwrap();
    body.push('\n');
    out.add(("verification.json".into(), body));
    out.failures = Some(v.failures());
    Ok(())
}

/// Runs one command on a loaded scenario.
pub fn run(loaded: &Loaded, cmd: Command, opts: &Options) -> Result<Artifacts, CliError> {
    let p = prepare(loaded, opts)?;
    let mut out = Artifacts::default();
    let fmt = opts.format;
    let verify = opts.verify || cmd == Command::Verify;
    if matches!(cmd, Command::Integrate | Command::All) {
        out.add(p.trajectory_table()?.render("trajectory", fmt));
        if let Some(frames) = p.frame_dump()? {
            out.add(("frames.csv".into(), frames));
        }
    }
    if matches!(cmd, Command::CriticalPoints) || (cmd == Command::All && !p.is_axial()) {
        out.add(p.critical_table()?.render("critical_points", fmt));
    }
    let needs_chi = verify || !matches!(cmd, Command::Integrate | Command::CriticalPoints);
    if !needs_chi {
        return Ok(out);
    }
    let chi = p.chi()?;
    let oracle = if verify { Some(p.oracle()?) } else { None };
    if matches!(cmd, Command::Faraday | Command::All) {
        out.add(p.rotation_table(&chi, oracle.as_ref())?.render("rotation", fmt));
    }
    if matches!(cmd, Command::EmitPlots | Command::All) {
        for (name, table) in plots::emit(&p, &chi)? {
            out.add(table.render(name, Format::Csv));
        }
    }
    if verify || cmd == Command::All {
        add_verification(&mut out, &p, &chi, oracle.as_ref())?;
    }
    Ok(out)
}

/// Full pipeline for one scenario: every artifact, with the oracle
/// comparison when `opts.verify` is set.
pub fn run_scenario(loaded: &Loaded, opts: &Options) -> Result<Artifacts, CliError> {
    run(loaded, Command::All, opts)
}

//! Scenario files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! note = "free text"
//! reproduces = "table1"        # optional; makes M, a and E mandatory
//!
//! [params]
//! M = 1.0                      # default 1
//! a = 0.9
//!
//! [conserved]
//! E = 1.0                      # default 1
//! Phi = 3.0
//! kappa = 12.0
//!
//! [initial]
//! t = 0.0                      # default 0
//! r = 20.0
//! theta = 1.57
//! phi = 0.0                    # default 0
//! sign_r = -1
//! sign_theta = -1
//!
//! [polarization]               # default c1 = 1, c2 = 0
//! c1 = 1.0
//! c2 = 0.0
//!
//! [run]
//! s_max = 60.0
//! tol = 1e-10                  # default 1e-10
//! sample_count = 2000          # default 2000
//! ```
//!
//! Unknown keys are rejected. Every error carries the line and column of
//! the offending key or table.

use std::ops::Range;
use std::path::Path;

use kerr_faraday::geodesic::{ConservedSet, GeodesicState};
use kerr_faraday::geometry::KerrParams;
use serde::{Deserialize, Serialize};
use toml::Spanned;

pub const DEFAULT_MASS: f64 = 1.0;
pub const DEFAULT_ENERGY: f64 = 1.0;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLE_COUNT: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "M")]
    pub mass: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conserved {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "Phi")]
    pub angular_momentum: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Initial {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub sign_r: f64,
    pub sign_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polarization {
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub s_max: f64,
    pub tol: f64,
    pub sample_count: usize,
}

/// A fully resolved scenario (defaults filled in).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproduces: Option<String>,
    pub params: Params,
    pub conserved: Conserved,
    pub initial: Initial,
    pub polarization: Polarization,
    pub run: Run,
}

/// A scenario together with the names of the fields that took defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub scenario: Scenario,
    pub defaults: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{line}:{column}: {field}: {message}")]
pub struct ScenarioError {
    pub line: usize,
    pub column: usize,
    pub field: String,
    pub message: String,
}

impl ScenarioError {
    pub fn to_json(&self, file: Option<&Path>) -> serde_json::Value {
        serde_json::json!({
            "error": "precondition",
            "file": file.map(|p| p.display().to_string()),
            "line": self.line,
            "column": self.column,
            "field": self.field,
            "message": self.message,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    note: Option<String>,
    reproduces: Option<String>,
    params: Spanned<RawParams>,
    conserved: Spanned<RawConserved>,
    initial: Spanned<RawInitial>,
    polarization: Option<Spanned<RawPolarization>>,
    run: Spanned<RawRun>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(rename = "M")]
    mass: Option<Spanned<f64>>,
    a: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConserved {
    #[serde(rename = "E")]
    energy: Option<Spanned<f64>>,
    #[serde(rename = "Phi")]
    angular_momentum: Spanned<f64>,
    kappa: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    t: Option<Spanned<f64>>,
    r: Spanned<f64>,
    theta: Spanned<f64>,
    phi: Option<Spanned<f64>>,
    sign_r: Spanned<f64>,
    sign_theta: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolarization {
    c1: Spanned<f64>,
    c2: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    s_max: Spanned<f64>,
    tol: Option<Spanned<f64>>,
    sample_count: Option<Spanned<i64>>,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn err(&self, span: Range<usize>, field: &str, message: impl Into<String>) -> ScenarioError {
        let (line, column) = position(self.src, span.start);
        ScenarioError {
            line,
            column,
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn finite(&self, v: &Spanned<f64>, field: &str) -> Result<f64, ScenarioError> {
        let x = *v.get_ref();
        if x.is_finite() {
            Ok(x)
        } else {
            Err(self.err(v.span(), field, format!("must be finite (got {x})")))
        }
    }
}

/// Parses and validates a scenario. Module preconditions (Kerr parameters,
/// horizon, allowed region, polarization, run controls) are checked here.
pub fn load_str(src: &str) -> Result<Loaded, ScenarioError> {
    let ctx = Ctx { src };
    let raw: RawScenario = toml::from_str(src).map_err(|e| {
        let span = e.span().unwrap_or(0..0);
        ctx.err(span, "document", e.message().to_string())
    })?;
    let mut defaults = Vec::new();
    let reproduction = raw.reproduces.is_some();

    let params_span = raw.params.span();
    let p = raw.params.into_inner();
    let mass = match &p.mass {
        Some(m) => ctx.finite(m, "params.M")?,
        None if reproduction => {
            return Err(ctx.err(params_span, "params.M", "M is mandatory in reproduction scenarios"));
        }
        None => {
            defaults.push("params.M");
            DEFAULT_MASS
        }
    };
    let a_spanned =
        p.a.ok_or_else(|| ctx.err(params_span.clone(), "params.a", "missing field `a`"))?;
    let spin = ctx.finite(&a_spanned, "params.a")?;
    let kerr = KerrParams::new(mass, spin).map_err(|e| {
        let (span, field) = match &p.mass {
            Some(m) if mass <= 0.0 => (m.span(), "params.M"),
            _ => (a_spanned.span(), "params.a"),
        };
        ctx.err(span, field, e.to_string())
    })?;

    let cons_span = raw.conserved.span();
    let c = raw.conserved.into_inner();
    let energy = match &c.energy {
        Some(e) => ctx.finite(e, "conserved.E")?,
        None if reproduction => {
            return Err(ctx.err(cons_span, "conserved.E", "E is mandatory in reproduction scenarios"));
        }
        None => {
            defaults.push("conserved.E");
            DEFAULT_ENERGY
        }
    };
    let phi_l = ctx.finite(&c.angular_momentum, "conserved.Phi")?;
    let kappa = ctx.finite(&c.kappa, "conserved.kappa")?;
    let conserved = ConservedSet::new(energy, phi_l, kappa).map_err(|e| {
        let (span, field) = if energy <= 0.0 {
            (c.energy.as_ref().map_or(cons_span.clone(), |s| s.span()), "conserved.E")
        } else {
            (c.kappa.span(), "conserved.kappa")
        };
        ctx.err(span, field, e.to_string())
    })?;

    let i = raw.initial.into_inner();
    let t = match &i.t {
        Some(v) => ctx.finite(v, "initial.t")?,
        None => {
            defaults.push("initial.t");
            0.0
        }
    };
    let phi = match &i.phi {
        Some(v) => ctx.finite(v, "initial.phi")?,
        None => {
            defaults.push("initial.phi");
            0.0
        }
    };
    let r = ctx.finite(&i.r, "initial.r")?;
    let theta = ctx.finite(&i.theta, "initial.theta")?;
    let point = kerr.point(t, r, theta, phi).map_err(|e| {
        let (span, field) = match e {
            kerr_faraday::Error::InsideHorizon { .. } => (i.r.span(), "initial.r"),
            _ => (i.theta.span(), "initial.theta"),
        };
        ctx.err(span, field, e.to_string())
    })?;
    let sign_r = *i.sign_r.get_ref();
    let sign_theta = *i.sign_theta.get_ref();
    for (v, field) in [(&i.sign_r, "initial.sign_r"), (&i.sign_theta, "initial.sign_theta")] {
        let x = *v.get_ref();
        if x != 1.0 && x != -1.0 {
            return Err(ctx.err(v.span(), field, format!("must be +1 or -1 (got {x})")));
        }
    }
    let state = GeodesicState::new(point, sign_r, sign_theta, 0.0)
        .map_err(|e| ctx.err(i.sign_r.span(), "initial.sign_r", e.to_string()))?;
    state.validate(&conserved, &kerr).map_err(|e| {
        let (span, field) = match &e {
            kerr_faraday::Error::ForbiddenRegion { which: "R", .. } => (i.r.span(), "initial.r"),
            kerr_faraday::Error::AxisWithAngularMomentum { .. } => (c.angular_momentum.span(), "conserved.Phi"),
            _ => (i.theta.span(), "initial.theta"),
        };
        ctx.err(span, field, e.to_string())
    })?;

    if phi_l == 0.0 && kappa > 0.0 {
        return Err(ctx.err(
            c.angular_momentum.span(),
            "conserved.Phi",
            "orbits with Phi = 0 and kappa > 0 cross the symmetry axis, which is not supported",
        ));
    }

    let polarization = match raw.polarization {
        Some(sp) => {
            let span = sp.span();
            let pol = sp.into_inner();
            let c1 = ctx.finite(&pol.c1, "polarization.c1")?;
            let c2 = ctx.finite(&pol.c2, "polarization.c2")?;
            if c1 == 0.0 && c2 == 0.0 {
                return Err(ctx.err(span, "polarization", "(c1, c2) must be nonzero"));
            }
            Polarization { c1, c2 }
        }
        None => {
            defaults.push("polarization");
            Polarization { c1: 1.0, c2: 0.0 }
        }
    };

    let run = raw.run.into_inner();
    let s_max = ctx.finite(&run.s_max, "run.s_max")?;
    let tol = match &run.tol {
        Some(v) => {
            let x = ctx.finite(v, "run.tol")?;
            if x <= 0.0 {
                return Err(ctx.err(v.span(), "run.tol", format!("must be positive (got {x})")));
            }
            x
        }
        None => {
            defaults.push("run.tol");
            DEFAULT_TOL
        }
    };
    let sample_count = match &run.sample_count {
        Some(v) => {
            let n = *v.get_ref();
            if n < 2 {
                return Err(ctx.err(v.span(), "run.sample_count", format!("must be at least 2 (got {n})")));
            }
            n as usize
        }
        None => {
            defaults.push("run.sample_count");
            DEFAULT_SAMPLE_COUNT
        }
    };

    Ok(Loaded {
        scenario: Scenario {
            note: raw.note.unwrap_or_default(),
            reproduces: raw.reproduces,
            params: Params { mass, a: spin },
            conserved: Conserved {
                energy,
                angular_momentum: phi_l,
                kappa,
            },
            initial: Initial {
                t,
                r,
                theta,
                phi,
                sign_r,
                sign_theta,
            },
            polarization,
            run: Run {
                s_max,
                tol,
                sample_count,
            },
        },
        defaults,
    })
}

/// Reads and validates a scenario file.
pub fn load(path: &Path) -> Result<Loaded, ScenarioError> {
    let src = std::fs::read_to_string(path).map_err(|e| ScenarioError {
        line: 0,
        column: 0,
        field: "file".into(),
        message: e.to_string(),
    })?;
    load_str(&src)
}

/// Serializes with every default written out.
pub fn dump(s: &Scenario) -> String {
    toml::to_string(s).expect("scenario serializes")
}

impl Scenario {
    pub fn kerr(&self) -> KerrParams<f64> {
        KerrParams::new(self.params.mass, self.params.a).expect("validated at load")
    }

    pub fn conserved_set(&self) -> ConservedSet<f64> {
        let c = &self.conserved;
        ConservedSet::new(c.energy, c.angular_momentum, c.kappa).expect("validated at load")
    }

    pub fn initial_state(&self) -> GeodesicState<f64> {
        let i = &self.initial;
        let p = self.kerr().point(i.t, i.r, i.theta, i.phi).expect("validated at load");
        GeodesicState::new(p, i.sign_r, i.sign_theta, 0.0).expect("validated at load")
    }

    /// Photon confined to the symmetry axis.
    pub fn is_axial(&self) -> bool {
        let th = self.initial.theta;
        (th == 0.0 || th == std::f64::consts::PI)
            && self.conserved.angular_momentum == 0.0
            && self.conserved.kappa == 0.0
    }
}

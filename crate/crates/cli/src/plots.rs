//! Plot-ready data: the orbit in the polar plane and in 3D, the angle
//! curve and the ergosphere boundary for overlays.

use std::f64::consts::PI;

use crate::pipeline::{CliError, Prepared, Table};

/// Samples of the ergosphere boundary `r_s(theta)` over `[0, pi]`.
pub const ERGOSPHERE_SAMPLES: usize = 181;

/// Returns `(file stem, table)` pairs in a fixed order.
pub fn emit(p: &Prepared, chi: &[f64]) -> Result<Vec<(&'static str, Table)>, CliError> {
    let mut polar = Table::new(&["x", "y"]);
    let mut orbit = Table::new(&["x", "y", "z"]);
    let mut curve = Table::new(&["s", "chi"]);
    for (&s, &c) in p.s.iter().zip(chi) {
        let x = *p.traj.state_at(s)?.point();
        let (r, th, ph) = (x.r(), x.theta(), x.phi());
        polar.push(vec![Some(r * ph.cos()), Some(r * ph.sin())]);
        orbit.push(vec![
            Some(r * th.sin() * ph.cos()),
            Some(r * th.sin() * ph.sin()),
            Some(r * th.cos()),
        ]);
        curve.push(vec![Some(s), Some(c)]);
    }
    Ok(vec![
        ("polar", polar),
        ("orbit3d", orbit),
        ("chi", curve),
        ("ergosphere", ergosphere(&p.traj)),
    ])
}

/// `theta, r_s` with the meridional-plane coordinates `x = r_s sin(theta)`,
/// `z = r_s cos(theta)`.
fn ergosphere(traj: &kerr_faraday::Path) -> Table {
    let mut t = Table::new(&["theta", "r_s", "x", "z"]);
    let last = (ERGOSPHERE_SAMPLES - 1) as f64;
    for i in 0..ERGOSPHERE_SAMPLES {
        let th = if i + 1 == ERGOSPHERE_SAMPLES {
            PI
        } else {
            PI * i as f64 / last
        };
        let rs = traj.params().ergosphere_radius(th);
        t.push(vec![Some(th), Some(rs), Some(rs * th.sin()), Some(rs * th.cos())]);
    }
    t
}

//! Time integration and conservation diagnostics.
//!
//! States are flat `f64` vectors; systems pack and unpack their forms.
//! The implicit midpoint rule is solved by fixed-point iteration and falls
//! back to a Jacobian-free Newton-GMRES iteration when the fixed point stops
//! contracting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::FormSnapshot;
use crate::systems::{HamiltonianSystem, System, SystemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    ImplicitMidpoint,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "implicit_midpoint" | "midpoint" => Ok(Method::ImplicitMidpoint),
            other => Err(Error::Config(format!(
                "unknown integrator `{other}`; expected rk4 or implicit_midpoint"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_newton_max_iter")]
    pub newton_max_iter: usize,
    /// Snapshot cadence in steps; `0` keeps only the first and last state.
    #[serde(default)]
    pub snapshot_every: usize,
}

fn default_newton_tol() -> f64 {
    1e-12
}

fn default_newton_max_iter() -> usize {
    50
}

impl IntegratorConfig {
    pub fn new(method: Method, dt: f64, steps: usize) -> Self {
        Self {
            method,
            dt,
            steps,
            newton_tol: default_newton_tol(),
            newton_max_iter: default_newton_max_iter(),
            snapshot_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.newton_tol > 0.0 && self.newton_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "newton_tol",
                reason: format!("must be positive, got {}", self.newton_tol),
            });
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "newton_max_iter",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| xi + a * yi).collect()
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn finite(v: Vec<f64>, stage: usize) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite { stage })
    }
}

/// Classical four-stage Runge-Kutta step.
pub fn rk4_step<F>(x: &[f64], rhs: &mut F, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let k1 = finite(rhs(x)?, 1)?;
    let k2 = finite(rhs(&axpy(x, 0.5 * dt, &k1))?, 2)?;
    let k3 = finite(rhs(&axpy(x, 0.5 * dt, &k2))?, 3)?;
    let k4 = finite(rhs(&axpy(x, dt, &k3))?, 4)?;
    let out = (0..x.len())
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    finite(out, 5)
}

/// Solves `x⁺ = x + dt · rhs((x + x⁺) / 2)`.
///
/// Convergence means `‖x⁺ - x - dt · rhs(mid)‖∞ ≤ tol · max(1, ‖x‖∞)`.
pub fn implicit_midpoint_step<F>(x: &[f64], rhs: &mut F, dt: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let scale = norm_inf(x).max(1.0);
    let target = tol * scale;
    let residual_of = |y: &[f64], rhs: &mut F| -> Result<(Vec<f64>, Vec<f64>)> {
        let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
        let image = axpy(x, dt, &finite(rhs(&mid)?, 1)?);
        let r = y.iter().zip(&image).map(|(a, b)| a - b).collect();
        Ok((r, image))
    };

    let mut y = x.to_vec();
    let (mut r, mut image) = residual_of(&y, rhs)?;
    let mut res = norm_inf(&r);
    let mut iterations = 0;
    let mut stalled = 0;

    while res > target && iterations < max_iter && stalled < 2 {
        iterations += 1;
        y = image;
        let (r_new, image_new) = residual_of(&y, rhs)?;
        let res_new = norm_inf(&r_new);
        stalled = if res_new > 0.5 * res { stalled + 1 } else { 0 };
        r = r_new;
        image = image_new;
        res = res_new;
    }

    while res > target && iterations < max_iter {
        iterations += 1;
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let f_mid = rhs(&mid)?;
        let mid_norm = norm2(&mid);
        let mut jv = |v: &[f64]| -> Result<Vec<f64>> {
            let vn = norm2(v);
            if vn == 0.0 {
                return Ok(vec![0.0; v.len()]);
            }
            let eps = f64::EPSILON.sqrt() * (1.0 + mid_norm) / vn;
            let shifted = rhs(&axpy(&mid, eps, v))?;
            Ok((0..v.len())
                .map(|i| v[i] - 0.5 * dt * (shifted[i] - f_mid[i]) / eps)
                .collect())
        };
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = gmres(&mut jv, &neg_r, 1e-12, 60)?;
        y = axpy(&y, 1.0, &delta);
        let (r_new, image_new) = residual_of(&y, rhs)?;
        r = r_new;
        image = image_new;
        res = norm_inf(&r);
    }

    if res > target {
        return Err(Error::NoConvergence {
            iterations,
            residual: res,
        });
    }

    // Polish down to round-off; a truncated iterate drifts the invariant
    // systematically over many steps.
    for _ in 0..max_iter {
        if res == 0.0 {
            break;
        }
        let (r_new, image_new) = residual_of(&image, rhs)?;
        let res_new = norm_inf(&r_new);
        if res_new > 0.5 * res {
            break;
        }
        y = image;
        image = image_new;
        res = res_new;
    }
    finite(y, 0)
}

/// Unrestarted GMRES for `A δ = b` with a matrix-free operator.
fn gmres<A>(apply: &mut A, b: &[f64], rel_tol: f64, max_dim: usize) -> Result<Vec<f64>>
where
    A: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let beta = norm2(b);
    if beta == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|v| v / beta).collect()];
    let mut h: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![beta];

    for j in 0..max_dim {
        let mut w = apply(&basis[j])?;
        let mut col = vec![0.0; j + 2];
        for (i, q) in basis.iter().enumerate() {
            col[i] = dot(&w, q);
            w = axpy(&w, -col[i], q);
        }
        col[j + 1] = norm2(&w);
        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let denom = col[j].hypot(col[j + 1]);
        let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (col[j] / denom, col[j + 1] / denom) };
        let w_norm = col[j + 1];
        col[j] = denom;
        col[j + 1] = 0.0;
        cs.push(c);
        sn.push(s);
        g.push(-s * g[j]);
        g[j] *= c;
        h.push(col);
        let done = g[j + 1].abs() <= rel_tol * beta || w_norm == 0.0;
        if done || j + 1 == max_dim {
            break;
        }
        basis.push(w.iter().map(|v| v / w_norm).collect());
    }

    let m = h.len();
    let mut coeff = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = ((i + 1)..m).map(|l| h[l][i] * coeff[l]).sum();
        coeff[i] = (g[i] - s) / h[i][i];
    }
    let mut out = vec![0.0; b.len()];
    for (c, q) in coeff.iter().zip(&basis) {
        out = axpy(&out, *c, q);
    }
    Ok(out)
}

/// One row of the energy trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub conserved: f64,
    /// `(H - H₀) / |H₀|`, or `H - H₀` when `H₀ = 0`.
    pub drift: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyTrace {
    pub rows: Vec<TraceRow>,
}

impl EnergyTrace {
    pub fn push(&mut self, t: f64, h: f64, conserved: f64) {
        let h0 = self.rows.first().map_or(h, |r| r.h);
        let drift = if h0 == 0.0 { h - h0 } else { (h - h0) / h0.abs() };
        self.rows.push(TraceRow { t, h, conserved, drift });
    }

    pub fn max_abs_drift(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.drift.abs()))
    }

    /// `max |c - c₀| / max(1, |c₀|)` over the conserved column.
    pub fn conserved_drift(&self) -> f64 {
        let Some(c0) = self.rows.first().map(|r| r.conserved) else {
            return 0.0;
        };
        self.rows
            .iter()
            .fold(0.0f64, |m, r| m.max((r.conserved - c0).abs()))
            / c0.abs().max(1.0)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(["t", "H", "conserved", "drift"])
                .map_err(csv_error)?;
        }
        for row in &self.rows {
            w.serialize(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Fields of the state at one recorded step.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub fields: Vec<(&'static str, FormSnapshot)>,
}

#[derive(Clone, Debug)]
pub struct SimulationOutput {
    pub system: &'static str,
    pub trace: EnergyTrace,
    pub snapshots: Vec<Snapshot>,
}

impl SimulationOutput {
    /// Writes `energy.csv` and `snapshots/step_NNNNNN_<field>.json`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir.join("snapshots"))?;
        let csv_path = dir.join("energy.csv");
        self.trace.write_csv(fs::File::create(&csv_path)?)?;
        let mut written = vec![csv_path];
        for snap in &self.snapshots {
            for (name, form) in &snap.fields {
                let path = dir.join("snapshots").join(format!("step_{:06}_{name}.json", snap.step));
                fs::write(&path, serde_json::to_string_pretty(form)?)?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

/// Integrates `system` from `state` and records the trace at every step.
pub fn integrate(system: &dyn HamiltonianSystem, state: Vec<crate::Form>, cfg: &IntegratorConfig) -> Result<SimulationOutput> {
    cfg.validate()?;
    system.check_state(&state)?;
    let mut trace = EnergyTrace::default();
    let mut snapshots = Vec::new();
    let record = |state: &[crate::Form], step: usize, t: f64, trace: &mut EnergyTrace, snapshots: &mut Vec<Snapshot>| -> Result<()> {
        trace.push(t, system.hamiltonian(state)?, system.conserved(state)?);
        let cadence = cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0;
        if step == 0 || step == cfg.steps || cadence {
            let fields = system
                .fields()
                .iter()
                .zip(state)
                .map(|((name, _), form)| (*name, FormSnapshot::from(form)))
                .collect();
            snapshots.push(Snapshot { step, t, fields });
        }
        Ok(())
    };

    record(&state, 0, 0.0, &mut trace, &mut snapshots)?;
    let mut x = system.pack(&state);
    let mut rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let forms = system.unpack(y)?;
        Ok(system.pack(&system.evolution(&forms)?))
    };
    for step in 1..=cfg.steps {
        let t = step as f64 * cfg.dt;
        let next = match cfg.method {
            Method::Rk4 => rk4_step(&x, &mut rhs, cfg.dt),
            Method::ImplicitMidpoint => implicit_midpoint_step(&x, &mut rhs, cfg.dt, cfg.newton_tol, cfg.newton_max_iter),
        };
        x = next.map_err(|e| Error::StepFailed {
            step,
            t,
            source: Box::new(e),
        })?;
        let forms = system.unpack(&x)?;
        record(&forms, step, t, &mut trace, &mut snapshots).map_err(|e| Error::StepFailed {
            step,
            t,
            source: Box::new(e),
        })?;
    }
    Ok(SimulationOutput {
        system: system.name(),
        trace,
        snapshots,
    })
}

/// Builds the system and its initial state from `spec`, then integrates.
pub fn run_simulation(spec: &SystemSpec, cfg: &IntegratorConfig) -> Result<SimulationOutput> {
    spec.validate()?;
    cfg.validate()?;
    let system = System::from_spec(spec)?;
    let state = system.initial_state(&spec.initial)?;
    integrate(&system, state, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.iter().map(|v| -v).collect())
    }

    fn oscillator(x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![x[1], -x[0]])
    }

    #[test]
    fn zero_rhs_leaves_state() {
        let x = vec![1.0, -2.0, 3.5];
        let mut zero = |y: &[f64]| -> Result<Vec<f64>> { Ok(vec![0.0; y.len()]) };
        assert_eq!(rk4_step(&x, &mut zero, 0.1).unwrap(), x);
        assert_eq!(implicit_midpoint_step(&x, &mut zero, 0.1, 1e-12, 50).unwrap(), x);
    }

    #[test]
    fn rk4_amplification_factor() {
        let x = rk4_step(&[1.0], &mut decay, 0.1).unwrap();
        assert!((x[0] - 0.9048375).abs() < 1e-15);
    }

    #[test]
    fn midpoint_conserves_oscillator_energy() {
        let mut x = vec![1.0, 0.0];
        for _ in 0..1000 {
            x = implicit_midpoint_step(&x, &mut oscillator, 0.2, 1e-12, 50).unwrap();
        }
        let h = 0.5 * (x[0] * x[0] + x[1] * x[1]);
        assert!(((h - 0.5) / 0.5).abs() <= 1e-10);
    }

    #[test]
    fn newton_fallback_handles_stiff_decay() {
        let mut stiff = |y: &[f64]| -> Result<Vec<f64>> { Ok(y.iter().map(|v| -100.0 * v).collect()) };
        let x = implicit_midpoint_step(&[1.0], &mut stiff, 0.1, 1e-12, 50).unwrap();
        assert!((x[0] - (1.0 - 5.0) / (1.0 + 5.0)).abs() < 1e-12);
    }

    #[test]
    fn nonconvergence_reports_residual() {
        let err = implicit_midpoint_step(&[1.0, 0.0], &mut oscillator, 0.2, 1e-15, 1).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 1, residual } if residual > 0.0));
    }

    #[test]
    fn rk4_reports_nonfinite_stage() {
        let mut blowup = |y: &[f64]| -> Result<Vec<f64>> { Ok(y.iter().map(|v| if *v > 1.0 { f64::NAN } else { 1.0 }).collect()) };
        assert!(matches!(rk4_step(&[1.0], &mut blowup, 1.0), Err(Error::NonFinite { stage: 2 })));
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(Method::Rk4, 0.0, 1).validate().is_err());
        assert!(IntegratorConfig::new(Method::Rk4, 0.1, 0).validate().is_err());
        assert!(IntegratorConfig::new(Method::ImplicitMidpoint, 0.1, 1).validate().is_ok());
        let parsed: IntegratorConfig = serde_json::from_str(r#"{"method": "implicit_midpoint", "dt": 0.05, "steps": 10}"#).unwrap();
        assert_eq!(parsed.newton_tol, 1e-12);
        assert_eq!(parsed.newton_max_iter, 50);
        assert_eq!("rk4".parse::<Method>().unwrap(), Method::Rk4);
        assert!("euler".parse::<Method>().is_err());
    }

    #[test]
    fn csv_header_is_fixed() {
        let mut trace = EnergyTrace::default();
        trace.push(0.0, 2.0, 1.0);
        trace.push(0.5, 2.5, 1.0);
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,H,conserved,drift\n0.0,2.0,1.0,0.0\n0.5,2.5,1.0,0.25\n");
        let mut empty = Vec::new();
        EnergyTrace::default().write_csv(&mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap(), "t,H,conserved,drift\n");
    }
}

//! Solver output and its on-disk form.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{read_snapshot, write_snapshot, Field, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Pme,
    Aniso,
    Anderson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeInfo {
    pub kind: SchemeKind,
    pub viscosity: f64,
    pub cfl_safety: f64,
    pub steps: usize,
    /// Every time step taken, in order.
    pub dt_history: Vec<f64>,
}

/// Snapshots of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: Grid,
    times: Vec<f64>,
    snapshots: Vec<Field>,
    /// Step size that produced each snapshot (0 for the initial state).
    snapshot_dt: Vec<f64>,
    pub scheme: SchemeInfo,
}

impl Trajectory {
    pub(crate) fn new(grid: Grid, scheme: SchemeInfo) -> Self {
        Trajectory {
            grid,
            times: Vec::new(),
            snapshots: Vec::new(),
            snapshot_dt: Vec::new(),
            scheme,
        }
    }

    /// Assembles a trajectory from external snapshots (e.g. an exact
    /// solution sampled in time).
    pub fn from_parts(times: Vec<f64>, snapshots: Vec<Field>, scheme: SchemeInfo) -> Result<Trajectory> {
        if times.is_empty() || times.len() != snapshots.len() {
            return Err(Error::InvalidArgument("need one time per snapshot".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("times are not strictly increasing".into()));
        }
        let grid = *snapshots[0].grid();
        if snapshots.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch("snapshots do not share a grid".into()));
        }
        let mut snapshot_dt = vec![0.0];
        snapshot_dt.extend(times.windows(2).map(|w| w[1] - w[0]));
        Ok(Trajectory {
            grid,
            times,
            snapshots,
            snapshot_dt,
            scheme,
        })
    }

    pub(crate) fn push(&mut self, t: f64, dt: f64, field: Field) {
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        self.snapshot_dt.push(dt);
        self.snapshots.push(field);
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn snapshots(&self) -> &[Field] {
        &self.snapshots
    }
    pub fn snapshot_dt(&self) -> &[f64] {
        &self.snapshot_dt
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn first(&self) -> &Field {
        &self.snapshots[0]
    }
    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("trajectory has snapshots")
    }
    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Trapezoid weights over the snapshot times.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(&self.times)
    }

    /// `sup_k max|u(t_k)|` over snapshots.
    pub fn max_abs(&self) -> f64 {
        self.snapshots.iter().fold(0.0, |a, f| a.max(f.max_abs()))
    }

    /// Writes `snap_00000.bin …` plus `index.csv` with columns
    /// `time,dt,mass,max_abs`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut idx = csv::Writer::from_path(dir.join("index.csv"))?;
        idx.write_record(["time", "dt", "mass", "max_abs"])?;
        for (k, f) in self.snapshots.iter().enumerate() {
            let file = fs::File::create(dir.join(snapshot_name(k)))?;
            write_snapshot(f, BufWriter::new(file))?;
            idx.write_record([
                format!("{:.17e}", self.times[k]),
                format!("{:.17e}", self.snapshot_dt[k]),
                format!("{:.17e}", f.integral()),
                format!("{:.17e}", f.max_abs()),
            ])?;
        }
        idx.flush()?;
        let meta = fs::File::create(dir.join("scheme.csv"))?;
        let mut w = csv::Writer::from_writer(meta);
        w.write_record(["kind", "viscosity", "cfl_safety", "steps"])?;
        w.write_record([
            format!("{:?}", self.scheme.kind).to_lowercase(),
            format!("{:.17e}", self.scheme.viscosity),
            format!("{:.17e}", self.scheme.cfl_safety),
            self.scheme.steps.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }

    /// Reads a directory written by [`Trajectory::save`]. The per-step dt
    /// history is not persisted and comes back empty.
    pub fn load(dir: &Path) -> Result<Trajectory> {
        let mut rdr = csv::Reader::from_path(dir.join("index.csv"))?;
        let mut times = Vec::new();
        let mut dts = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Format(format!("bad index.csv row {rec:?}")))
            };
            times.push(parse(0)?);
            dts.push(parse(1)?);
        }
        if times.is_empty() {
            return Err(Error::Format("empty trajectory index".into()));
        }
        let mut snaps = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            let file = fs::File::open(dir.join(snapshot_name(k)))?;
            snaps.push(read_snapshot(BufReader::new(file))?);
        }
        let grid = *snaps[0].grid();
        if snaps.iter().any(|s| *s.grid() != grid) {
            return Err(Error::Format("snapshots do not share a grid".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Format("times are not strictly increasing".into()));
        }
        let scheme = read_scheme(dir).unwrap_or(SchemeInfo {
            kind: SchemeKind::Pme,
            viscosity: 0.0,
            cfl_safety: 0.0,
            steps: 0,
            dt_history: Vec::new(),
        });
        Ok(Trajectory {
            grid,
            times,
            snapshots: snaps,
            snapshot_dt: dts,
            scheme,
        })
    }
}

fn read_scheme(dir: &Path) -> Option<SchemeInfo> {
    let mut rdr = csv::Reader::from_path(dir.join("scheme.csv")).ok()?;
    let rec = rdr.records().next()?.ok()?;
    let kind = match rec.get(0)? {
        "pme" => SchemeKind::Pme,
        "aniso" => SchemeKind::Aniso,
        "anderson" => SchemeKind::Anderson,
        _ => return None,
    };
    Some(SchemeInfo {
        kind,
        viscosity: rec.get(1)?.parse().ok()?,
        cfl_safety: rec.get(2)?.parse().ok()?,
        steps: rec.get(3)?.parse().ok()?,
        dt_history: Vec::new(),
    })
}

fn snapshot_name(k: usize) -> String {
    format!("snap_{k:05}.bin")
}

pub fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let dt = times[k + 1] - times[k];
        w[k] += 0.5 * dt;
        w[k + 1] += 0.5 * dt;
    }
    w
}

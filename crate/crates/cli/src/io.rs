//! File formats: accelerogram CSVs, trace and mesh CSVs, and output writing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use smc_atmd_core::freq::ResponseRow;
use smc_atmd_core::tuner::MeshRow;
use smc_atmd_core::{Accelerogram, SimulationTrace, TuningResult};

use crate::error::{CliError, Result};

/// How an accelerogram's amplitude is adjusted after loading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    /// Keep the recorded amplitude.
    None,
    /// Multiply every sample by this factor.
    Factor(f64),
    /// Rescale so the peak absolute sample equals this value.
    Pga(f64),
}

fn parse_number(field: &str, path: &Path, line: u64) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        CliError::parse(
            path,
            format!("line {line}: cannot parse {:?} as a number", field.trim()),
        )
    })
}

fn is_numeric(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok()
}

/// Parses either a two-column `t, accel` table (an optional non-numeric
/// header line is skipped) or a single-column record whose first line is
/// `dt=<seconds>`. Lines starting with `#` are comments.
pub fn parse_accelerogram(text: &str, path: &Path, resample_dt: f64) -> Result<Accelerogram> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut uniform_dt = None;
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(path, e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if width.is_none() {
            let first = &record[0];
            if let Some(dt) = first.strip_prefix("dt=").or_else(|| first.strip_prefix("dt =")) {
                uniform_dt = Some(parse_number(dt, path, line)?);
                width = Some(1);
                continue;
            }
            if !record.iter().all(is_numeric) {
                // Header line.
                width = Some(record.len());
                continue;
            }
            width = Some(record.len());
        }
        match (uniform_dt, record.len()) {
            (Some(_), 1) => values.push(parse_number(&record[0], path, line)?),
            (None, 2) => {
                times.push(parse_number(&record[0], path, line)?);
                values.push(parse_number(&record[1], path, line)?);
            }
            (_, n) => {
                return Err(CliError::parse(
                    path,
                    format!(
                        "line {line}: expected {} column(s), found {n}",
                        if uniform_dt.is_some() { 1 } else { 2 }
                    ),
                ))
            }
        }
    }

    let raw = match uniform_dt {
        Some(dt) => Accelerogram::new(dt, values, label)?,
        None => {
            if times.len() < 2 {
                return Err(CliError::parse(path, "record needs at least two samples"));
            }
            if let Some(k) = times.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(CliError::parse(
                    path,
                    format!("time column is not strictly increasing after t = {}", times[k]),
                ));
            }
            let dt0 = times[1] - times[0];
            let uniform = times
                .windows(2)
                .all(|w| ((w[1] - w[0]) - dt0).abs() <= 1e-9 * dt0.max(1.0));
            if uniform && times[0] == 0.0 {
                Accelerogram::new(dt0, values, label)?
            } else {
                Accelerogram::from_time_series(&times, &values, resample_dt, label)?
            }
        }
    };
    Ok(raw)
}

/// Loads, scales and resamples a record to `resample_dt`.
pub fn load_accelerogram(path: &Path, scaling: Scaling, resample_dt: f64) -> Result<Accelerogram> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let raw = parse_accelerogram(&text, path, resample_dt)?;
    let resampled = if (raw.dt - resample_dt).abs() <= 1e-12 * resample_dt {
        raw
    } else {
        raw.resample(resample_dt)?
    };
    Ok(match scaling {
        Scaling::None => resampled,
        Scaling::Factor(f) => resampled.scaled(f)?,
        Scaling::Pga(p) => resampled.scale_to_pga(p)?,
    })
}

pub fn accelerogram_csv(quake: &Accelerogram) -> String {
    let mut out = String::from("t,accel\n");
    for (k, v) in quake.samples.iter().enumerate() {
        let _ = writeln!(out, "{},{}", k as f64 * quake.dt, v);
    }
    out
}

pub const TRACE_HEADER: &str = "t,z1,z2,z3,z4,u,sigma,xg_dd";

pub fn trace_csv(trace: &SimulationTrace) -> String {
    let mut out = String::with_capacity(trace.len() * 96);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for k in 0..trace.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            trace.t[k], trace.z1[k], trace.z2[k], trace.z3[k], trace.z4[k], trace.u[k], trace.sigma[k], trace.xg_dd[k]
        );
    }
    out
}

pub fn parse_trace_csv(text: &str, path: &Path) -> Result<SimulationTrace> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| CliError::parse(path, e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != TRACE_HEADER {
        return Err(CliError::parse(path, format!("expected header {TRACE_HEADER}")));
    }
    let mut tr = SimulationTrace::default();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(path, e.to_string()))?;
        let line = i as u64 + 2;
        let v: Vec<f64> = record
            .iter()
            .map(|f| parse_number(f, path, line))
            .collect::<Result<_>>()?;
        tr.t.push(v[0]);
        tr.z1.push(v[1]);
        tr.z2.push(v[2]);
        tr.z3.push(v[3]);
        tr.z4.push(v[4]);
        tr.u.push(v[5]);
        tr.sigma.push(v[6]);
        tr.xg_dd.push(v[7]);
    }
    Ok(tr)
}

pub const MESH_HEADER: &str = "zeta,omega_n_over_omega0,kappa1,kappa2,kappa3,kappa_u";
pub const ARGMIN_MARKER: &str = "# argmin";

fn mesh_line(out: &mut String, r: &MeshRow) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        r.zeta, r.omega_ratio, r.kappa1, r.kappa2, r.kappa3, r.kappa_u
    );
}

/// One row per feasible grid point followed by a comment row
/// `# argmin,<same columns>` marking the selected tuple.
pub fn mesh_csv(result: &TuningResult) -> String {
    let mut out = String::from(MESH_HEADER);
    out.push('\n');
    for r in result.mesh() {
        mesh_line(&mut out, &r);
    }
    let b = &result.best;
    out.push_str(ARGMIN_MARKER);
    out.push(',');
    mesh_line(
        &mut out,
        &MeshRow {
            zeta: b.zeta,
            omega_ratio: b.omega_ratio,
            kappa1: b.kappa1,
            kappa2: b.kappa2,
            kappa3: b.kappa3,
            kappa_u: b.kappa_u,
        },
    );
    out
}

/// Reads a mesh file back as `(rows, argmin)`.
pub fn parse_mesh_csv(text: &str, path: &Path) -> Result<(Vec<MeshRow>, Option<MeshRow>)> {
    let mut rows = Vec::new();
    let mut argmin = None;
    for (i, line) in text.lines().enumerate() {
        let n = i as u64 + 1;
        if i == 0 {
            if line != MESH_HEADER {
                return Err(CliError::parse(path, format!("expected header {MESH_HEADER}")));
            }
            continue;
        }
        let (is_marker, body) = match line.strip_prefix(ARGMIN_MARKER) {
            Some(rest) => (true, rest.trim_start_matches(',')),
            None => (false, line),
        };
        let v: Vec<f64> = body
            .split(',')
            .map(|f| parse_number(f, path, n))
            .collect::<Result<_>>()?;
        if v.len() != 6 {
            return Err(CliError::parse(path, format!("line {n}: expected 6 columns")));
        }
        let row = MeshRow {
            zeta: v[0],
            omega_ratio: v[1],
            kappa1: v[2],
            kappa2: v[3],
            kappa3: v[4],
            kappa_u: v[5],
        };
        if is_marker {
            argmin = Some(row);
        } else {
            rows.push(row);
        }
    }
    Ok((rows, argmin))
}

pub const FREQ_HEADER: &str = "omega,h1,h2,h3,hu";

pub fn frequency_csv(rows: &[ResponseRow]) -> String {
    let mut out = String::from(FREQ_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r[0], r[1], r[2], r[3], r[4]);
    }
    out
}

/// Files to be written once every computation has succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: PathBuf, contents: impl Into<Vec<u8>>) {
        self.files.push((path, contents.into()));
    }

    pub fn json<T: serde::Serialize>(&mut self, path: PathBuf, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Validation(e.to_string()))?;
        text.push('\n');
        self.add(path, text);
        Ok(())
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// Writes each file through a temporary sibling and a rename.
    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for (path, contents) in self.files {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            let mut tmp = path.clone().into_os_string();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            fs::write(&tmp, &contents).map_err(|e| CliError::io(&tmp, e))?;
            fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_column_with_header() {
        let text = "time,accel\n0,0\n0.02,1\n0.04,-1\n";
        let q = parse_accelerogram(text, Path::new("rec.csv"), 0.001).unwrap();
        assert_eq!(q.dt, 0.02);
        assert_eq!(q.samples, vec![0.0, 1.0, -1.0]);
        assert_eq!(q.label, "rec");
    }

    #[test]
    fn single_column_with_dt_line() {
        let text = "# comment\ndt=0.01\n1\n2\n3\n";
        let q = parse_accelerogram(text, Path::new("r.csv"), 0.001).unwrap();
        assert_eq!(q.dt, 0.01);
        assert_eq!(q.samples, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn non_monotone_time_rejected() {
        let text = "0,0\n0.02,1\n0.01,2\n";
        assert!(matches!(
            parse_accelerogram(text, Path::new("r.csv"), 0.001),
            Err(CliError::Parse { .. })
        ));
    }

    #[test]
    fn malformed_value_reports_line() {
        let text = "0,0\n0.02,abc\n";
        let msg = parse_accelerogram(text, Path::new("r.csv"), 0.001)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn trace_round_trip() {
        let tr = SimulationTrace {
            t: vec![0.0, 0.001],
            z1: vec![0.0, 1e-7],
            z2: vec![0.0, -2.5e-9],
            z3: vec![0.0, 0.1],
            z4: vec![0.0, 1.0 / 3.0],
            u: vec![0.0, -24.13],
            sigma: vec![0.0, 0.05],
            xg_dd: vec![0.0, 0.5],
        };
        let back = parse_trace_csv(&trace_csv(&tr), Path::new("t.csv")).unwrap();
        assert_eq!(back, tr);
    }
}

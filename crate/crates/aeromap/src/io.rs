//! Artifact serialization: CSV matrices and JSON documents.
//!
//! Every writer goes through an atomic temp-then-rename, and every float is
//! emitted at fixed 1e-6 precision, so identical runs produce byte-identical
//! files.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::compress::LocalLosModel;
use crate::error::{Error, Result};
use crate::harvest::Trajectory;
use crate::learn::RadioMap;
use crate::map3d::HeightBounds;
use crate::sensing::StepLog;
use crate::world::channel::Measurement;
use crate::world::city::CityMap;
use crate::world::geometry::Pose3;

/// Fixed-precision float formatting; infinities use the literal `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.6}")
    }
}

/// Round to the emitted precision so JSON numbers match the CSV convention.
pub fn round6(x: f64) -> f64 {
    if x.is_finite() {
        (x * 1e6).round() / 1e6
    } else {
        x
    }
}

/// Write a file atomically: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp-write");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    match field {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => field
            .parse()
            .map_err(|_| Error::Parse(format!("bad {what}: {field:?}"))),
    }
}

// ── City ────────────────────────────────────────────────────────────────────

fn heights_path(json_path: &Path) -> PathBuf {
    json_path.with_extension("heights.csv")
}

/// City header as JSON plus the row-major height matrix as CSV
/// (`nx` rows of `ny` values) in a sibling `.heights.csv` file.
pub fn save_city(map: &CityMap, json_path: &Path) -> Result<()> {
    let hfile = heights_path(json_path);
    let header = json!({
        "cell_size": round6(map.cell_size()),
        "nx": map.nx(),
        "ny": map.ny(),
        "origin": [round6(map.origin().0), round6(map.origin().1)],
        "heights_file": hfile
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or_default(),
    });
    atomic_write(json_path, (header.to_string() + "\n").as_bytes())?;

    let mut csv = String::new();
    for ix in 0..map.nx() {
        let row: Vec<String> = (0..map.ny())
            .map(|iy| fmt_f64(map.height_at_cell(ix, iy)))
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    atomic_write(&hfile, csv.as_bytes())
}

pub fn load_city(json_path: &Path) -> Result<CityMap> {
    let header: Value = serde_json::from_slice(&fs::read(json_path)?)?;
    let cell_size = header["cell_size"]
        .as_f64()
        .ok_or_else(|| Error::Parse("city header missing cell_size".into()))?;
    let nx = header["nx"]
        .as_u64()
        .ok_or_else(|| Error::Parse("city header missing nx".into()))? as usize;
    let ny = header["ny"]
        .as_u64()
        .ok_or_else(|| Error::Parse("city header missing ny".into()))? as usize;
    let origin = (
        header["origin"][0].as_f64().unwrap_or(0.0),
        header["origin"][1].as_f64().unwrap_or(0.0),
    );
    let hfile = match header["heights_file"].as_str() {
        Some(name) => json_path
            .parent()
            .map(|p| p.join(name))
            .unwrap_or_else(|| PathBuf::from(name)),
        None => heights_path(json_path),
    };
    let text = fs::read_to_string(&hfile)?;
    let mut heights = Vec::with_capacity(nx * ny);
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        for field in line.split(',') {
            heights.push(parse_f64(field, &format!("height (row {i})"))?);
        }
    }
    CityMap::new(cell_size, nx, ny, origin, heights)
}

// ── Measurements ────────────────────────────────────────────────────────────

pub fn save_measurements(measurements: &[Measurement], path: &Path) -> Result<()> {
    let mut csv = String::from("uav_x,uav_y,uav_z,node_id,rssi,true_segment\n");
    for m in measurements {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(m.uav.x),
            fmt_f64(m.uav.y),
            fmt_f64(m.uav.z),
            m.node_id,
            fmt_f64(m.rssi_dbm),
            m.true_segment.map(|s| s.to_string()).unwrap_or_default(),
        ));
    }
    atomic_write(path, csv.as_bytes())
}

pub fn load_measurements(path: &Path) -> Result<Vec<Measurement>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 5 {
            return Err(Error::Parse(format!(
                "measurement line {i} has {} fields, need at least 5",
                fields.len()
            )));
        }
        let true_segment = match fields.get(5) {
            Some(s) if !s.is_empty() => Some(
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad segment on line {i}")))?,
            ),
            _ => None,
        };
        out.push(Measurement {
            uav: Pose3::new(
                parse_f64(fields[0], "uav_x")?,
                parse_f64(fields[1], "uav_y")?,
                parse_f64(fields[2], "uav_z")?,
            ),
            node_id: fields[3]
                .parse()
                .map_err(|_| Error::Parse(format!("bad node_id on line {i}")))?,
            rssi_dbm: parse_f64(fields[4], "rssi")?,
            true_segment,
        });
    }
    Ok(out)
}

// ── Radio maps ──────────────────────────────────────────────────────────────

/// CSV grid (`x,y,z,rssi,segment`) plus a small JSON metadata document.
pub fn save_radio_map(map: &RadioMap, csv_path: &Path, meta_path: &Path) -> Result<()> {
    let mut csv = String::from("x,y,z,rssi,segment\n");
    for (i, p) in map.grid.iter().enumerate() {
        let seg = map
            .predicted_segment
            .as_ref()
            .map(|s| s[i].to_string())
            .unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(p.z),
            fmt_f64(map.predicted_rssi[i]),
            seg
        ));
    }
    atomic_write(csv_path, csv.as_bytes())?;
    let meta = json!({
        "node_id": map.node_id,
        "points": map.grid.len(),
        "has_segments": map.predicted_segment.is_some(),
    });
    atomic_write(meta_path, (meta.to_string() + "\n").as_bytes())
}

// ── Height bounds ───────────────────────────────────────────────────────────

fn save_matrix(path: &Path, values: &[f64], nx: usize, ny: usize) -> Result<()> {
    let mut csv = String::new();
    for ix in 0..nx {
        let row: Vec<String> = (0..ny).map(|iy| fmt_f64(values[ix * ny + iy])).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    atomic_write(path, csv.as_bytes())
}

/// Three CSV matrices (lower / estimate / upper) plus JSON metadata.
/// Unconstrained cells serialize as the literal `inf`.
pub fn save_bounds(bounds: &HeightBounds, dir: &Path, stem: &str) -> Result<()> {
    save_matrix(
        &dir.join(format!("{stem}_lower.csv")),
        &bounds.lower,
        bounds.nx,
        bounds.ny,
    )?;
    save_matrix(
        &dir.join(format!("{stem}_estimate.csv")),
        &bounds.estimate,
        bounds.nx,
        bounds.ny,
    )?;
    save_matrix(
        &dir.join(format!("{stem}_upper.csv")),
        &bounds.upper,
        bounds.nx,
        bounds.ny,
    )?;
    let constrained = bounds.upper.iter().filter(|u| u.is_finite()).count();
    let meta = json!({
        "cell_size": round6(bounds.cell_size),
        "nx": bounds.nx,
        "ny": bounds.ny,
        "origin": [round6(bounds.origin.0), round6(bounds.origin.1)],
        "constrained_cells": constrained,
        "cells": bounds.cells(),
    });
    atomic_write(
        &dir.join(format!("{stem}.json")),
        (meta.to_string() + "\n").as_bytes(),
    )
}

// ── Compressed map ──────────────────────────────────────────────────────────

/// JSON array of `{node_id, a_n, b_n, samples, loglik}`.
pub fn save_compressed_map(models: &[LocalLosModel], path: &Path) -> Result<()> {
    let entries: Vec<Value> = models
        .iter()
        .map(|m| {
            json!({
                "node_id": m.node_id,
                "a_n": round6(m.slope),
                "b_n": round6(m.midpoint_deg),
                "samples": m.samples,
                "loglik": round6(m.loglik),
            })
        })
        .collect();
    atomic_write(path, (Value::Array(entries).to_string() + "\n").as_bytes())
}

pub fn load_compressed_map(path: &Path) -> Result<Vec<LocalLosModel>> {
    let doc: Value = serde_json::from_slice(&fs::read(path)?)?;
    let arr = doc
        .as_array()
        .ok_or_else(|| Error::Parse("compressed map must be a JSON array".into()))?;
    arr.iter()
        .map(|e| {
            Ok(LocalLosModel {
                node_id: e["node_id"]
                    .as_u64()
                    .ok_or_else(|| Error::Parse("missing node_id".into()))?
                    as u32,
                slope: e["a_n"]
                    .as_f64()
                    .ok_or_else(|| Error::Parse("missing a_n".into()))?,
                midpoint_deg: e["b_n"]
                    .as_f64()
                    .ok_or_else(|| Error::Parse("missing b_n".into()))?,
                samples: e["samples"].as_u64().unwrap_or(0) as usize,
                loglik: e["loglik"].as_f64().unwrap_or(0.0),
            })
        })
        .collect()
}

// ── Trajectories ────────────────────────────────────────────────────────────

pub fn save_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    let waypoints: Vec<Value> = traj
        .waypoints
        .iter()
        .map(|w| json!([round6(w.x), round6(w.y), round6(w.z)]))
        .collect();
    let realized = traj.realized_bits.as_ref().map(|r| {
        r.iter()
            .map(|nb| json!({"node_id": nb.node_id, "bits": round6(nb.bits)}))
            .collect::<Vec<_>>()
    });
    let doc = json!({
        "waypoints": waypoints,
        "schedule": traj.schedule,
        "slot_duration_s": round6(traj.slot_duration_s),
        "path_length_m": round6(traj.path_length()),
        "planned_objective_bits": round6(traj.planned_objective_bits),
        "realized_bits": realized,
        "realized_total_bits": traj
            .realized_bits
            .as_ref()
            .map(|r| round6(r.iter().map(|nb| nb.bits).sum::<f64>())),
    });
    atomic_write(path, (doc.to_string() + "\n").as_bytes())
}

/// Sweep results feeding length-budget comparison plots.
pub fn save_sweep_csv(rows: &[(u64, String, f64, f64)], path: &Path) -> Result<()> {
    let mut csv = String::from("scenario,planner,l_max,realized_bits\n");
    for (scenario, planner, l_max, bits) in rows {
        csv.push_str(&format!(
            "{scenario},{planner},{},{}\n",
            fmt_f64(*l_max),
            fmt_f64(*bits)
        ));
    }
    atomic_write(path, csv.as_bytes())
}

// ── Sensing logs ────────────────────────────────────────────────────────────

pub fn save_localization_log(steps: &[StepLog], path: &Path) -> Result<()> {
    let mut csv = String::from("step,uav_x,uav_y,uav_z,rssi,est_x,est_y,rmse\n");
    for s in steps {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.step,
            fmt_f64(s.uav.x),
            fmt_f64(s.uav.y),
            fmt_f64(s.uav.z),
            fmt_f64(s.rssi_dbm),
            fmt_f64(s.estimate_x),
            fmt_f64(s.estimate_y),
            fmt_f64(s.rmse_m),
        ));
    }
    atomic_write(path, csv.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::city::{generate_city, CitySpec};

    fn tmpdir() -> tempfile::TempDir {
        tempfile::tempdir().expect("tempdir")
    }

    #[test]
    fn city_roundtrip() {
        let spec = CitySpec {
            nx: 12,
            ny: 9,
            cell_size: 5.0,
            origin: (-10.0, 4.0),
            density: 0.3,
            height_min: 5.0,
            height_max: 30.0,
            building_min_cells: 1,
            building_max_cells: 3,
            footprints: Vec::new(),
        };
        let map = generate_city(3, &spec).unwrap();
        let dir = tmpdir();
        let path = dir.path().join("city.json");
        save_city(&map, &path).unwrap();
        let loaded = load_city(&path).unwrap();
        assert_eq!(map.nx(), loaded.nx());
        assert_eq!(map.ny(), loaded.ny());
        for (a, b) in map.heights().iter().zip(loaded.heights()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn measurements_roundtrip() {
        let ms = vec![
            Measurement {
                uav: Pose3::new(1.25, 2.5, 50.0),
                node_id: 3,
                rssi_dbm: -61.123456,
                true_segment: Some(2),
            },
            Measurement {
                uav: Pose3::new(9.0, 8.0, 42.0),
                node_id: 0,
                rssi_dbm: -55.0,
                true_segment: None,
            },
        ];
        let dir = tmpdir();
        let path = dir.path().join("m.csv");
        save_measurements(&ms, &path).unwrap();
        let loaded = load_measurements(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0].node_id, 3);
        assert_eq!(loaded[0].true_segment, Some(2));
        assert_eq!(loaded[1].true_segment, None);
        assert!((loaded[0].rssi_dbm + 61.123456).abs() < 1e-6);
    }

    #[test]
    fn bounds_emit_inf_literal() {
        let bounds = HeightBounds {
            cell_size: 5.0,
            nx: 2,
            ny: 2,
            origin: (0.0, 0.0),
            upper: vec![f64::INFINITY, 12.0, 30.0, f64::INFINITY],
            lower: vec![0.0; 4],
            estimate: vec![0.0, 6.0, 15.0, 0.0],
            los_crossings: vec![0, 3, 8, 0],
        };
        let dir = tmpdir();
        save_bounds(&bounds, dir.path(), "bounds").unwrap();
        let upper = std::fs::read_to_string(dir.path().join("bounds_upper.csv")).unwrap();
        assert!(upper.contains("inf"));
        assert!(upper.contains("12.000000"));
    }

    #[test]
    fn compressed_map_roundtrip() {
        let models = vec![LocalLosModel {
            node_id: 4,
            slope: 0.21,
            midpoint_deg: 31.5,
            samples: 2000,
            loglik: -812.75,
        }];
        let dir = tmpdir();
        let path = dir.path().join("compressed.json");
        save_compressed_map(&models, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"a_n\""));
        assert!(text.contains("\"b_n\""));
        let loaded = load_compressed_map(&path).unwrap();
        assert_eq!(loaded[0].node_id, 4);
        assert!((loaded[0].slope - 0.21).abs() < 1e-9);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tmpdir();
        let path = dir.path().join("x.txt");
        atomic_write(&path, b"one").unwrap();
        atomic_write(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
    }
}

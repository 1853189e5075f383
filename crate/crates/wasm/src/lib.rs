//! Browser bindings: three interactive views onto the simulator, each
//! returning JSON for a static page to plot.

#![allow(clippy::too_many_arguments)]

use serde::Serialize;
use wasm_bindgen::prelude::*;

use cdsim::cd::{cd_term_for, CdMethod};
use cdsim::circuit::{compile, gate_stats, optimize};
use cdsim::evolve::{build_plan, trotter_evolve};
use cdsim::models::{
    build_ising_chain, build_single_spin, build_zz_chain, AnnealingProblem, Boundary, SpinChainSpec,
};

fn build_problem(
    model: &str,
    n: usize,
    h_x: f64,
    h_z: f64,
    j0: f64,
    total_time: f64,
    dt: f64,
) -> Result<AnnealingProblem, String> {
    let result = match model {
        "single_spin" => build_single_spin(h_x, h_z, total_time, dt),
        "ising_chain" => {
            let spec = SpinChainSpec::uniform(n, h_x, h_z, j0, Boundary::Open);
            build_ising_chain(&spec, total_time, dt)
        }
        "zz_chain" => build_zz_chain(n, h_x, j0, total_time, dt),
        other => return Err(format!("unknown model '{other}'")),
    };
    result.map_err(|e| e.to_string())
}

fn parse_method(method: &str) -> Result<CdMethod, String> {
    method.parse().map_err(|e: cdsim::Error| e.to_string())
}

#[derive(Serialize)]
struct SeriesPoint {
    t: f64,
    lambda: f64,
    p_gs: f64,
    fidelity: f64,
}

#[derive(Serialize)]
struct EvolveOutput {
    steps: usize,
    target_labels: Vec<String>,
    with_cd: Vec<SeriesPoint>,
    without_cd: Vec<SeriesPoint>,
}

fn evolve_series_json(
    model: &str,
    n: usize,
    h_x: f64,
    h_z: f64,
    j0: f64,
    total_time: f64,
    dt: f64,
    method: &str,
) -> Result<String, String> {
    let problem = build_problem(model, n, h_x, h_z, j0, total_time, dt)?;
    let method = parse_method(method)?;
    let series = |m: CdMethod| -> Result<Vec<SeriesPoint>, String> {
        let cd = cd_term_for(m, &problem).map_err(|e| e.to_string())?;
        let result = trotter_evolve(&problem, &cd, true).map_err(|e| e.to_string())?;
        Ok(result
            .records
            .iter()
            .map(|r| SeriesPoint {
                t: r.t,
                lambda: r.lambda,
                p_gs: r.p_gs,
                fidelity: r.fidelity,
            })
            .collect())
    };
    let output = EvolveOutput {
        steps: problem.steps().map_err(|e| e.to_string())?,
        target_labels: problem.ground_labels(),
        with_cd: series(method)?,
        without_cd: series(CdMethod::None)?,
    };
    serde_json::to_string(&output).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SweepPoint {
    total_time: f64,
    p_gs_cd: f64,
    p_gs_plain: f64,
}

fn time_sweep_json(
    model: &str,
    n: usize,
    h_x: f64,
    h_z: f64,
    j0: f64,
    dt: f64,
    method: &str,
    t_max: f64,
    points: usize,
) -> Result<String, String> {
    if points == 0 || points > 200 {
        return Err("points must be between 1 and 200".into());
    }
    let method = parse_method(method)?;
    let mut output = Vec::with_capacity(points);
    for i in 1..=points {
        let total_time = t_max * i as f64 / points as f64;
        let steps = (total_time / dt).round().max(1.0);
        let problem = build_problem(model, n, h_x, h_z, j0, total_time, total_time / steps)?;
        let run = |m: CdMethod| -> Result<f64, String> {
            let cd = cd_term_for(m, &problem).map_err(|e| e.to_string())?;
            let result = trotter_evolve(&problem, &cd, false).map_err(|e| e.to_string())?;
            Ok(result.final_p_gs(&problem))
        };
        output.push(SweepPoint {
            total_time,
            p_gs_cd: run(method)?,
            p_gs_plain: run(CdMethod::None)?,
        });
    }
    serde_json::to_string(&output).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct GateRow {
    method: String,
    rotations: usize,
    cnots: usize,
    expected_error: f64,
    fidelity: f64,
}

fn gate_summary_json(
    model: &str,
    n: usize,
    h_x: f64,
    h_z: f64,
    j0: f64,
    total_time: f64,
    dt: f64,
    method: &str,
) -> Result<String, String> {
    let problem = build_problem(model, n, h_x, h_z, j0, total_time, dt)?;
    let method = parse_method(method)?;
    let mut rows = Vec::new();
    for m in [method, CdMethod::None] {
        let cd = cd_term_for(m, &problem).map_err(|e| e.to_string())?;
        let plan = build_plan(&problem, &cd).map_err(|e| e.to_string())?;
        let result = trotter_evolve(&problem, &cd, false).map_err(|e| e.to_string())?;
        let circuit = optimize(&compile(&plan).map_err(|e| e.to_string())?);
        let stats = gate_stats(&circuit, 5e-4, 0.015);
        rows.push(GateRow {
            method: m.to_string(),
            rotations: stats.rotations,
            cnots: stats.cnots,
            expected_error: stats.expected_error,
            fidelity: result.final_fidelity(&problem),
        });
        if m == CdMethod::None {
            break;
        }
    }
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// Per-step series with and without the CD driver, as JSON.
#[wasm_bindgen]
pub fn evolve_series(
    model: &str,
    n: usize,
    h_x: f64,
    h_z: f64,
    j0: f64,
    total_time: f64,
    dt: f64,
    method: &str,
) -> Result<String, JsError> {
    evolve_series_json(model, n, h_x, h_z, j0, total_time, dt, method).map_err(|e| JsError::new(&e))
}

/// Final ground-state probability against total time, as JSON.
#[wasm_bindgen]
pub fn time_sweep(
    model: &str,
    n: usize,
    h_x: f64,
    h_z: f64,
    j0: f64,
    dt: f64,
    method: &str,
    t_max: f64,
    points: usize,
) -> Result<String, JsError> {
    time_sweep_json(model, n, h_x, h_z, j0, dt, method, t_max, points).map_err(|e| JsError::new(&e))
}

/// Optimized gate counts and error estimate for both runs, as JSON.
#[wasm_bindgen]
pub fn gate_summary(
    model: &str,
    n: usize,
    h_x: f64,
    h_z: f64,
    j0: f64,
    total_time: f64,
    dt: f64,
    method: &str,
) -> Result<String, JsError> {
    gate_summary_json(model, n, h_x, h_z, j0, total_time, dt, method).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evolve_series_shapes_and_values() {
        let json = evolve_series_json("single_spin", 1, -1.0, 1.0, 0.0, 1.0, 0.2, "berry").unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["steps"], 5);
        assert_eq!(value["with_cd"].as_array().unwrap().len(), 5);
        let last = &value["with_cd"][4];
        assert!(last["p_gs"].as_f64().unwrap() > 0.99);
        let plain = value["without_cd"][4]["p_gs"].as_f64().unwrap();
        assert!(plain < 0.7);
    }

    #[test]
    fn bell_series_uses_manifold_labels() {
        let json = evolve_series_json("zz_chain", 2, -1.0, 0.0, -1.0, 0.03, 0.01, "nc:1").unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["target_labels"][0], "00");
        assert_eq!(value["target_labels"][1], "11");
        assert!(value["with_cd"][2]["fidelity"].as_f64().unwrap() > 0.999);
    }

    #[test]
    fn time_sweep_has_requested_points() {
        let json = time_sweep_json("single_spin", 1, -1.0, 1.0, 0.0, 0.2, "berry", 3.0, 8).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let points = value.as_array().unwrap();
        assert_eq!(points.len(), 8);
        // CD stays near one across the grid
        for p in points {
            assert!(p["p_gs_cd"].as_f64().unwrap() > 0.95);
        }
    }

    #[test]
    fn gate_summary_compares_methods() {
        let json = gate_summary_json("zz_chain", 2, -1.0, 0.0, -1.0, 0.03, 0.01, "nc:1").unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rows = value.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["method"], "nc:1");
        assert_eq!(rows[1]["method"], "none");
        assert!(rows[0]["cnots"].as_u64().unwrap() > 0);
    }

    #[test]
    fn errors_are_reported_as_strings() {
        assert!(evolve_series_json("bogus", 1, -1.0, 1.0, 0.0, 1.0, 0.2, "berry").is_err());
        assert!(evolve_series_json("single_spin", 1, -1.0, 1.0, 0.0, 1.0, 0.2, "warp").is_err());
    }
}

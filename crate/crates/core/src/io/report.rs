use std::path::Path;

use serde_json::{json, Value};

use super::IoError;
use crate::base::{BaseError, PipelineConfig, PipelineResult};
use crate::cap::{validate_cap, Cap};
use crate::forest::{ApexChoice, CutForest, ForestReport, QuadrantFrame};

pub const SCHEMA: u32 = 1;

pub fn forest_json(apex: &ApexChoice, frame: &QuadrantFrame, forest: &CutForest, report: &ForestReport) -> Value {
    json!({
        "apex": apex,
        "frame": frame,
        "roots": forest.roots,
        "parent": forest.parent,
        "quadrant": forest.quadrant_of,
        "trees": forest.trees().len(),
        "cut_edges": forest.edges().len(),
        "violations": report.violation_count(),
        "checks": report,
    })
}

fn status(outcome: &Result<PipelineResult, BaseError>) -> &'static str {
    match outcome {
        Ok(_) => "ok",
        Err(BaseError::NoSafeEdge { .. }) => "no_safe_edge",
        Err(BaseError::Cap(_)) => "invalid_cap",
        Err(_) => "error",
    }
}

/// Pipeline report. Everything outside `"timing"` depends only on the
/// input and the configuration.
pub fn pipeline_report(cap: &Cap, cfg: &PipelineConfig, outcome: &Result<PipelineResult, BaseError>) -> Value {
    let mut doc = json!({
        "schema": SCHEMA,
        "status": status(outcome),
        "config": {
            "delta_theta_deg": cfg.delta_theta.to_degrees(),
            "tol": cfg.tol,
            "edge": cfg.edge,
        },
        "cap": {
            "vertices": cap.vertices.len(),
            "faces": cap.triangles.len(),
            "boundary_sides": cap.boundary.len(),
        },
    });
    match outcome {
        Ok(r) => {
            doc["metrics"] = json!({
                "phi_max": r.metrics.phi_max,
                "omega_total": r.metrics.omega_total,
                "delta_theta_mesh": r.metrics.delta_theta,
                "max_angle_3d": r.metrics.max_angle_3d,
                "max_angle_projected": r.metrics.max_angle_projected,
                "diameter": r.metrics.diameter,
                "bounds": r.bounds,
                "bounds_pass": r.bounds.passes(),
            });
            doc["forest"] = forest_json(&r.apex, &r.frame, &r.forest, &r.forest_report);
            doc["development"] = json!(r.development);
            doc["gap_segments"] = json!(r.full.cap_net.gap_segments);
            doc["composite_centers"] = json!(r.centers);
            doc["net"] = json!(r.net);
            doc["scan_order"] = json!(r.scan_order);
            doc["edges"] = json!(r.edge_reports);
            doc["safe_edge_count"] = json!(r.safe_edge_count());
            doc["chosen_edge"] = json!(r.full.attach_edge);
            doc["base_polygon"] = json!(r.full.base_polygon);
            doc["area"] = json!({
                "net": r.full.total_area,
                "expected": r.full.expected_area,
                "relative_error": r.full.relative_area_error(),
            });
            doc["timing"] = json!(r.timing);
        }
        Err(e) => {
            doc["error"] = json!(e.to_string());
            if let Ok(m) = validate_cap(cap) {
                doc["metrics"] = json!({
                    "phi_max": m.phi_max,
                    "omega_total": m.omega_total,
                    "delta_theta_mesh": m.delta_theta,
                    "diameter": m.diameter,
                });
            }
            if let BaseError::NoSafeEdge { reports } = e {
                doc["edges"] = json!(reports);
                doc["safe_edge_count"] = json!(0);
            }
            doc["chosen_edge"] = Value::Null;
            doc["timing"] = json!({});
        }
    }
    doc
}

/// Report without its timing sub-object, for byte comparisons.
pub fn without_timing(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("timing");
    }
    v
}

pub fn write_report(report: &Value, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::unfold_polyhedron;
    use crate::cap::Point3;

    fn flat_hexagon() -> Cap {
        let mut vertices: Vec<Point3> = (0..6)
            .map(|i| {
                let a = i as f64 * std::f64::consts::PI / 3.0;
                Point3::new(a.cos(), a.sin(), 0.0)
            })
            .collect();
        vertices.push(Point3::new(0.01, 0.0, 0.0));
        Cap {
            vertices,
            triangles: (0..6).map(|i| [i, (i + 1) % 6, 6]).collect(),
            boundary: (0..6).collect(),
        }
    }

    #[test]
    fn flat_report() {
        let cap = flat_hexagon();
        let cfg = PipelineConfig::default();
        let out = unfold_polyhedron(&cap, &cfg);
        let v = pipeline_report(&cap, &cfg, &out);
        assert_eq!(v["schema"], 1);
        assert_eq!(v["status"], "ok", "{}", v["error"]);
        assert_eq!(v["metrics"]["omega_total"].as_f64(), Some(0.0));
        assert_eq!(v["safe_edge_count"], 6);
        assert!(v["timing"].is_object());
        assert!(without_timing(v).get("timing").is_none());
    }
}

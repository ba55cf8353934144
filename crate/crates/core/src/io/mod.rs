//! OFF meshes in, SVG nets and JSON reports out.

mod off;
mod report;
mod svg;

use thiserror::Error;

pub use off::{format_off, parse_off, read_off, write_off};
pub use report::{forest_json, pipeline_report, without_timing, write_report, SCHEMA};
pub use svg::{render_svg, write_svg, Layer, LayerKind, NetDocument, Shape};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("mesh is not a topological disk: {0}")]
    NonDisk(String),
    #[error(transparent)]
    Fs(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

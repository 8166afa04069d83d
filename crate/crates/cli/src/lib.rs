//! The smokeshift command line: run configuration, CSV/GeoJSON
//! interchange, command dispatch, and bit-stable serialization of
//! results. The binary in `main.rs` is a thin clap wrapper over
//! [`commands::dispatch`]; everything else lives here so tests can drive
//! the same code paths in process.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod io;
pub mod manifest;

pub use commands::{dispatch, CommandKind};
pub use config::{
    AssignConfig, DiagnoseTimingConfig, DownwindConfig, DownwindMethod, EstimateConfig,
    GtaConfig, PlumeCommandConfig, RunConfig, TreatmentAnchor,
};
pub use error::{Error, Result};
pub use format::{fmt_f64, read_json, to_json_string, write_json, Sig17};
pub use io::{
    ingest_boundaries, ingest_panel, panel_units, write_boundaries_geojson, write_contour_geojson,
    write_panel_csv, Boundaries, PANEL_HEADER,
};
pub use manifest::{sha256_hex, FileDigest, ManifestBuilder, RunManifest};

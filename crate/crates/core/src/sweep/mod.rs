//! Parallel (τ, δ) sweeps and τ scans, their persistence and the named recipes.

mod config;
mod output;
pub mod recipes;
mod run;

pub use config::{
    AxisConfig, AxisRange, AxisUnit, ImageFormat, InlineMolecule, MoleculeConfig, Observable,
    OutputConfig, RunConfig, TrainConfig, TrainKind,
};
pub use output::{
    line_rows, map, read_csv, reported_levels, rows, write_csv, write_heatmap, write_lines,
    write_outputs, write_rows, CsvRow, FileEntry, LineRow, Manifest, Map, CSV_FILE, LINES_FILE,
    MANIFEST_FILE,
};
pub use run::{
    prepare, run, run_scan, run_single, run_sweep, CellResult, Mode, SpeciesInfo, SweepResult,
};

//! Benchmark files, generation, reports, rendering and the end-to-end run.

pub mod bench;
pub mod design;
pub mod generate;
pub mod pipeline;
pub mod report;
pub mod svg;

pub use bench::Bench;
pub use design::{parse_design, write_design, DesignFile, DesignModule};
pub use generate::{generate_benchmark, GenConfig};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
pub use report::RunReport;
pub use svg::render_svg;

//! Scenario files, the built-in catalog, grid evaluation and reports.

pub mod catalog;
pub mod par;
pub mod report;
pub mod run;
pub mod scenario;

pub use catalog::{build, catalog_build, Built, CatalogEntry, Exclusion, ENTRIES};
pub use report::{emit_report, from_json, Format, IdentitySummary, PointReport, Report, Verdict, SCHEMA_VERSION};
pub use run::{run_scenario, run_scenario_with_threads, PointFits, PsiReference};
pub use scenario::{AmbientSpec, AxisRange, CheckName, ChecksSpec, GridSpec, HypersurfaceSpec, Scenario};

//! File formats: instance documents in, design reports out.

mod dot;
mod instance_file;
mod report;

pub use dot::render_dot;
pub use instance_file::{parse_instance, serialize_instance, ParseError, FORMAT_VERSION};
pub use report::{
    build_report, emit_report, parse_report, render_gap_table, CostBreakdown, DesignReport, GapReport, LinkReport,
    LogicalLinkReport, LsrReport, ReportFormat, ReportMeta, RouteReport, SolverInfo,
};

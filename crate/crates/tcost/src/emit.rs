//! Report files. Field order is fixed by the struct definitions and every
//! float is written in its shortest round-trip form, so identical runs give
//! identical bytes. The layout is documented in `docs/report-schema.md`.
//!
//! | File | Contents |
//! |------|----------|
//! | `report.json` | schema tag, tool version, config echo, summary, every report |
//! | `summary.csv` | one row per check: counts, min margin, argmin witness |
//! | `constants.csv` | estimated constants with their argmax witness |
//! | `plot-<name>.csv` | numeric tables (`small-entropy`, `t2`) |

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tcost_core::report::InequalityReport;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::suite::{number, ParamsOut, PlotTable, SuiteRun, SuiteSummary};

pub const SCHEMA: &str = "tcost-report/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool {
    name: "tcost",
    version: VERSION,
};

#[derive(Debug, Serialize)]
struct ReportOut<'a> {
    name: &'a str,
    kind: &'static str,
    status: &'static str,
    lhs: f64,
    rhs: f64,
    margin: f64,
    slack: f64,
    in_domain: bool,
    witness: Option<usize>,
    params: ParamsOut,
}

impl<'a> From<&'a InequalityReport> for ReportOut<'a> {
    fn from(r: &'a InequalityReport) -> Self {
        Self {
            name: &r.name,
            kind: match r.kind {
                tcost_core::report::CheckKind::Assertion => "assertion",
                tcost_core::report::CheckKind::Diagnostic => "diagnostic",
            },
            status: r.status().name(),
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            slack: r.slack,
            in_domain: r.in_domain,
            witness: r.witness,
            params: r.params.into(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Document<'a> {
    schema: &'static str,
    tool: &'a Tool,
    config: &'a RunConfig,
    summary: &'a SuiteSummary,
    reports: Vec<ReportOut<'a>>,
}

pub fn report_json(config: &RunConfig, run: &SuiteRun) -> String {
    let doc = Document {
        schema: SCHEMA,
        tool: &TOOL,
        config,
        summary: &run.summary,
        reports: run.reports.iter().map(ReportOut::from).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn opt_number(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

fn opt_index(x: Option<usize>) -> String {
    x.map(|k| k.to_string()).unwrap_or_default()
}

pub fn summary_csv(summary: &SuiteSummary) -> String {
    csv_text(
        &["name", "kind", "params", "passed", "failed", "out_of_domain", "min_margin", "argmin_witness"],
        summary.checks.iter().map(|c| {
            vec![
                c.name.clone(),
                c.kind.to_string(),
                c.params.label(),
                c.passed.to_string(),
                c.failed.to_string(),
                c.out_of_domain.to_string(),
                opt_number(c.min_margin),
                opt_index(c.argmin_witness),
            ]
        }),
    )
}

pub fn constants_csv(summary: &SuiteSummary) -> String {
    let c = &summary.constants;
    let mut rows = Vec::new();
    let mut plain = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            rows.push(vec![name.to_string(), number(v), String::new()]);
        }
    };
    plain("C_P", c.poincare);
    plain("C_alpha", c.lo_alpha);
    for (name, e) in [("T2_lower_bound", c.t2), ("c_a", c.tronc), ("D_a", c.var_ent)] {
        if let Some(e) = e {
            rows.push(vec![name.to_string(), number(e.value), e.argmax.to_string()]);
        }
    }
    csv_text(&["name", "value", "argmax_witness"], rows)
}

pub fn plot_csv(table: &PlotTable) -> String {
    let cell = |col: &str, x: f64| {
        if col == "witness" {
            (x as usize).to_string()
        } else {
            number(x)
        }
    };
    csv_text(
        &table.columns,
        table
            .rows
            .iter()
            .map(|r| table.columns.iter().zip(r).map(|(c, x)| cell(c, *x)).collect()),
    )
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::write(path, e))
}

/// Writes every artifact of a run into `dir` and returns the paths written.
pub fn emit_report(dir: &Path, config: &RunConfig, run: &SuiteRun) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    let mut files = vec![
        (dir.join("report.json"), report_json(config, run)),
        (dir.join("summary.csv"), summary_csv(&run.summary)),
        (dir.join("constants.csv"), constants_csv(&run.summary)),
    ];
    for t in &run.plots {
        files.push((dir.join(format!("plot-{}.csv", t.name)), plot_csv(t)));
    }
    for (path, text) in &files {
        write_file(path, text)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

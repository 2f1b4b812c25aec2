use serde::Serialize;

use super::{ClassifyReport, Num, OutputFormat, ReportError, TubeReport, VerifyReport};

pub const TUBE_CSV_HEADER: [&str; 9] =
    ["r", "sample", "phi", "eig_values", "eig_mults", "trace", "H_closed", "det_resid", "charpoly_resid"];

fn json<T: Serialize>(value: &T) -> Result<String, ReportError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| ReportError::Numerical(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn csv_table(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<String, ReportError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| ReportError::Numerical(e.to_string());
    writer.write_record(header).map_err(io)?;
    for record in records {
        writer.write_record(&record).map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| ReportError::Numerical(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ReportError::Numerical(e.to_string()))
}

fn joined(values: &[Num]) -> String {
    values.iter().map(Num::csv_text).collect::<Vec<_>>().join(";")
}

pub fn render_tube_report(report: &TubeReport, format: OutputFormat) -> Result<String, ReportError> {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => csv_table(
            &TUBE_CSV_HEADER,
            report.rows.iter().map(|row| {
                vec![
                    row.r.csv_text(),
                    row.sample.to_string(),
                    row.phi.csv_text(),
                    joined(&row.eig_values),
                    row.eig_mults.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
                    row.trace.csv_text(),
                    row.h_closed.csv_text(),
                    row.det_resid.csv_text(),
                    row.charpoly_resid.csv_text(),
                ]
            }),
        ),
    }
}

pub fn render_classify(report: &ClassifyReport, format: OutputFormat) -> Result<String, ReportError> {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let c = &report.classification;
            csv_table(
                &["n", "k", "wperp", "homogeneous", "constant_angle", "angle_spectrum", "notes"],
                [vec![
                    report.meta.n.to_string(),
                    report.meta.k.to_string(),
                    report.meta.wperp.clone(),
                    c.homogeneous.to_string(),
                    c.constant_angle.map(|a| a.csv_text()).unwrap_or_default(),
                    joined(&c.angle_spectrum),
                    c.notes.join(" | "),
                ]],
            )
        }
    }
}

pub fn render_verify(report: &VerifyReport, format: OutputFormat) -> Result<String, ReportError> {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => csv_table(
            &["suite", "checks", "failures", "worst_residual", "tol", "passed"],
            report.suites.iter().map(|s| {
                vec![
                    s.suite.clone(),
                    s.checks.to_string(),
                    s.failures.to_string(),
                    s.worst_residual.csv_text(),
                    s.tol.csv_text(),
                    s.passed.to_string(),
                ]
            }),
        ),
    }
}

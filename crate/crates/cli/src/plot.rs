//! Whitespace-delimited series files for density-vs-k and runtime-vs-k.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::{CliError, CliResult, CSV_HEADER};

struct Point {
    k: String,
    density: String,
    runtime: String,
}

/// Reads a sweep CSV and writes `density_<method>.dat` and
/// `runtime_<method>.dat` into `out_dir`, each line `k value` with the CSV
/// fields copied verbatim. Everything is validated before any file is
/// written. Returns the written paths.
pub fn emit_plot_data<R: Read>(csv_source: R, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(csv_source);
    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(CliError::Usage("empty CSV".into())),
    };
    let expected: Vec<&str> = CSV_HEADER.split(',').collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Usage(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut series: BTreeMap<String, Vec<Point>> = BTreeMap::new();
    for (row, rec) in records.enumerate() {
        let rec = rec?;
        let line = row + 2;
        let field = |i: usize| rec.get(i).unwrap_or("");
        if rec.len() != expected.len() {
            return Err(CliError::Usage(format!(
                "line {line}: expected {} fields, found {}",
                expected.len(),
                rec.len()
            )));
        }
        let method = field(1);
        if method.is_empty() || method.contains(|c: char| c == '/' || c.is_whitespace()) {
            return Err(CliError::Usage(format!("line {line}: invalid method {method:?}")));
        }
        field(0)
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("line {line}: invalid k {:?}", field(0))))?;
        for i in [2, 8] {
            field(i).parse::<f64>().map_err(|_| {
                CliError::Usage(format!("line {line}: invalid {} {:?}", expected[i], field(i)))
            })?;
        }
        series.entry(method.to_string()).or_default().push(Point {
            k: field(0).into(),
            density: field(2).into(),
            runtime: field(8).into(),
        });
    }
    if series.is_empty() {
        return Err(CliError::Usage("CSV has no data rows".into()));
    }

    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (method, points) in &series {
        for (kind, pick) in [
            ("density", (|p: &Point| p.density.as_str()) as fn(&Point) -> &str),
            ("runtime", |p: &Point| p.runtime.as_str()),
        ] {
            let mut body = format!("# k {kind}\n");
            for p in points {
                body.push_str(&p.k);
                body.push(' ');
                body.push_str(pick(p));
                body.push('\n');
            }
            let path = out_dir.join(format!("{kind}_{method}.dat"));
            fs::write(&path, body)?;
            written.push(path);
        }
    }
    Ok(written)
}

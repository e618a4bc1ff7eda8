//! CSV writing for numeric series.
//!
//! Every file starts with one `# config=<json>` comment line recording the
//! configuration that produced it, then a header row, then the data rows.

use std::io::{self, Write};

pub fn write_csv<W: Write>(
    mut out: W,
    config: &serde_json::Value,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> io::Result<()> {
    writeln!(out, "# config={config}")?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()
}

pub fn csv_string(config: &serde_json::Value, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, config, header, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv is utf-8")
}

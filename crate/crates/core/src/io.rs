//! Delimited-text point files and box-count plot files.
//!
//! Point files hold one point per line. Input may use LF or CRLF and may
//! carry a single header line; output always uses LF.
//!
//! Plot files start with the header `j, r, log2_r, S, log2_S` (joined with
//! the format's delimiter), then one row per level in ascending `j`. An
//! attached estimate is appended as `# key = value` comment lines. Reals are
//! printed with 6 significant digits; `S` is printed exactly.

use std::io::{BufRead, BufReader, Read, Write};

use crate::boxcount::BoxCountPlot;
use crate::dataset::RawDataset;
use crate::error::{Error, Result};
use crate::fit::D2Estimate;
use crate::grid::radius;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    pub delimiter: char,
    pub has_header: bool,
    pub expected_dim: Option<usize>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            delimiter: ',',
            has_header: false,
            expected_dim: None,
        }
    }
}

impl IngestOptions {
    pub fn validate(&self) -> Result<()> {
        let d = self.delimiter;
        if d.is_ascii_digit() || matches!(d, '+' | '-' | '.' | '\n' | '\r') {
            return Err(Error::InvalidDelimiter(d));
        }
        Ok(())
    }
}

/// Parses one point per non-empty line. The first data row fixes the
/// dimension unless `expected_dim` is given.
pub fn read_points<R: Read>(source: R, opts: &IngestOptions) -> Result<RawDataset> {
    opts.validate()?;
    let mut dim = opts.expected_dim;
    let mut coords = Vec::new();
    let mut header_pending = opts.has_header;
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let start = coords.len();
        for (c, field) in line.split(opts.delimiter).enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| Error::ParseNumber {
                line: line_no,
                column: c + 1,
                field: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteField {
                    line: line_no,
                    column: c + 1,
                });
            }
            coords.push(value);
        }
        let found = coords.len() - start;
        match dim {
            None => dim = Some(found),
            Some(expected) if expected != found => {
                if start == 0 && opts.expected_dim.is_some() {
                    return Err(Error::DimensionMismatch { expected, found });
                }
                return Err(Error::RaggedRow {
                    line: line_no,
                    expected,
                    found,
                });
            }
            Some(_) => {}
        }
    }
    match dim {
        Some(dim) if !coords.is_empty() => RawDataset::from_flat(dim, coords),
        _ => Err(Error::EmptyDataset),
    }
}

/// Writes one point per line. Coordinates use the shortest decimal form
/// that reads back to the same `f64`.
pub fn write_points<W: Write>(data: &RawDataset, mut sink: W, opts: &IngestOptions) -> Result<()> {
    opts.validate()?;
    let delim = opts.delimiter.to_string();
    if opts.has_header {
        let names: Vec<String> = (0..data.dim()).map(|d| format!("x{d}")).collect();
        writeln!(sink, "{}", names.join(&delim))?;
    }
    let mut line = String::new();
    for p in data.points() {
        line.clear();
        for (d, x) in p.iter().enumerate() {
            if d > 0 {
                line.push_str(&delim);
            }
            line.push_str(&x.to_string());
        }
        line.push('\n');
        sink.write_all(line.as_bytes())?;
    }
    sink.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotFormat {
    #[default]
    Tsv,
    Csv,
}

impl PlotFormat {
    pub fn delimiter(self) -> &'static str {
        match self {
            PlotFormat::Tsv => "\t",
            PlotFormat::Csv => ",",
        }
    }

    /// `.csv` files get commas, anything else tabs.
    pub fn for_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => PlotFormat::Csv,
            _ => PlotFormat::Tsv,
        }
    }
}

pub const PLOT_COLUMNS: [&str; 5] = ["j", "r", "log2_r", "S", "log2_S"];

pub fn write_plot<W: Write>(
    plot: &BoxCountPlot,
    estimate: Option<&D2Estimate>,
    mut sink: W,
    format: PlotFormat,
) -> Result<()> {
    let delim = format.delimiter();
    writeln!(sink, "{}", PLOT_COLUMNS.join(delim))?;
    for rec in &plot.records {
        let row = [
            rec.level.to_string(),
            format_sig(radius(rec.level)),
            format_sig(-(rec.level as f64)),
            rec.sum_sq.to_string(),
            format_sig((rec.sum_sq as f64).log2()),
        ];
        writeln!(sink, "{}", row.join(delim))?;
    }
    if let Some(est) = estimate {
        writeln!(sink, "# d2 = {}", format_sig(est.d2))?;
        writeln!(sink, "# r_squared = {}", format_sig(est.r_squared))?;
        writeln!(sink, "# fit_range = {}", est.range)?;
        writeln!(sink, "# algorithm = {}", est.algorithm)?;
    }
    sink.flush()?;
    Ok(())
}

/// Six significant digits in the style of C's `%g`.
pub fn format_sig(v: f64) -> String {
    const DIGITS: i32 = 6;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    // rounding to 6 digits can bump the exponent (999999.5 -> 1e6), so take
    // the exponent from the rounded scientific form
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

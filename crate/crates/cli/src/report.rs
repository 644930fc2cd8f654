//! Report emission and re-parsing.
//!
//! Three forms, all carrying the run manifest:
//!  - human-readable tables on stdout (6 significant digits),
//!  - CSV files (RFC-4180 quoting, `#`-prefixed manifest preamble,
//!    full-precision numbers that re-parse bit-exactly),
//!  - a sectioned `[name]` / `key = value` report file, also full
//!    precision.

use std::fmt::Write as _;

/// One `[name]` section of the structured report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Render the structured report format.
pub fn render_report(sections: &[Section]) -> String {
    let mut out = String::from("# cvcx report v1\n");
    for section in sections {
        let _ = writeln!(out, "[{}]", section.name);
        for (key, value) in &section.entries {
            let _ = writeln!(out, "{key} = {value}");
        }
    }
    out
}

/// Parse the structured report format. Never panics on malformed input.
pub fn parse_report_str(text: &str) -> Result<Vec<Section>, ParseError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(ParseError {
                    line,
                    message: format!("unterminated section header `{content}`"),
                });
            };
            if name.is_empty() {
                return Err(ParseError {
                    line,
                    message: "empty section name".into(),
                });
            }
            sections.push(Section::new(name));
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ParseError {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let Some(section) = sections.last_mut() else {
            return Err(ParseError {
                line,
                message: "entry before any [section] header".into(),
            });
        };
        section
            .entries
            .push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(sections)
}

/// A parsed CSV report: manifest preamble plus header and data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvDocument {
    pub preamble: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Render a CSV report with its `#`-prefixed manifest preamble.
pub fn render_csv(
    preamble: &[(String, String)],
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<String, csv::Error> {
    let mut out = String::new();
    for (key, value) in preamble {
        let _ = writeln!(out, "# {key} = {value}");
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let data = writer.into_inner().map_err(|e| e.into_error())?;
    out.push_str(&String::from_utf8_lossy(&data));
    Ok(out)
}

/// Parse a CSV report back. Lines starting with `#` are the preamble;
/// the first record is the header. Never panics on malformed input.
pub fn parse_csv_str(text: &str) -> Result<CsvDocument, ParseError> {
    let mut preamble = Vec::new();
    for raw in text.lines() {
        let Some(comment) = raw.strip_prefix('#') else {
            continue;
        };
        if let Some((key, value)) = comment.split_once('=') {
            preamble.push((key.trim().to_string(), value.trim().to_string()));
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ParseError {
            line: idx + 1,
            message: e.to_string(),
        })?;
        let fields: Vec<String> = record.iter().map(|s| s.to_string()).collect();
        if header.is_none() {
            header = Some(fields);
        } else {
            rows.push(fields);
        }
    }
    Ok(CsvDocument {
        preamble,
        header: header.unwrap_or_default(),
        rows,
    })
}

impl CsvDocument {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// A float cell by column name, or an error naming what is missing.
    pub fn f64_cell(&self, row: usize, name: &str) -> Result<f64, ParseError> {
        let col = self.column(name).ok_or_else(|| ParseError {
            line: 1,
            message: format!("no column `{name}`"),
        })?;
        let cell = self
            .rows
            .get(row)
            .and_then(|r| r.get(col))
            .ok_or_else(|| ParseError {
                line: row + 2,
                message: format!("row {row} has no `{name}` cell"),
            })?;
        cell.parse().map_err(|_| ParseError {
            line: row + 2,
            message: format!("cell `{cell}` in `{name}` is not a number"),
        })
    }
}

/// Full-precision machine formatting: shortest string that round-trips to
/// the same f64.
pub fn full(x: f64) -> String {
    format!("{x}")
}

/// Six significant digits for the human tables, %g style: fixed notation
/// in a sane magnitude range, scientific outside it, trailing zeros
/// trimmed.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&magnitude) {
        let text = format!("{x:.5e}");
        // trim mantissa zeros: 3.00000e-17 -> 3e-17
        if let Some((mantissa, exponent)) = text.split_once('e') {
            let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
            return format!("{mantissa}e{exponent}");
        }
        return text;
    }
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    let text = format!("{x:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips_bit_exactly() {
        let mut section = Section::new("result");
        let values = [
            3.4897559113742287f64,
            0.993170607582819,
            -3.0400613733227626,
            f64::MIN_POSITIVE,
            -0.0,
            1.0 / 3.0,
        ];
        for (i, v) in values.iter().enumerate() {
            section.push(&format!("v{i}"), full(*v));
        }
        let text = render_report(&[section]);
        let parsed = parse_report_str(&text).unwrap();
        for (i, v) in values.iter().enumerate() {
            let got: f64 = parsed[0].get(&format!("v{i}")).unwrap().parse().unwrap();
            assert_eq!(got.to_bits(), v.to_bits(), "value {i}");
        }
    }

    #[test]
    fn csv_round_trips_bit_exactly() {
        let rows = vec![
            vec![full(0.35), full(5.427950515865573), "with, comma".to_string()],
            vec![full(0.0), full(-3.0400613733227626), "quote \" inside".to_string()],
        ];
        let preamble = vec![("command".to_string(), "gate".to_string())];
        let text = render_csv(&preamble, &["r", "db", "note"], &rows).unwrap();
        let doc = parse_csv_str(&text).unwrap();
        assert_eq!(doc.preamble, preamble);
        assert_eq!(doc.header, vec!["r", "db", "note"]);
        assert_eq!(doc.rows, rows);
        let v = doc.f64_cell(0, "db").unwrap();
        assert_eq!(v.to_bits(), 5.427950515865573f64.to_bits());
    }

    #[test]
    fn malformed_report_is_an_error_not_a_panic() {
        assert!(parse_report_str("[unclosed\n").is_err());
        assert!(parse_report_str("key = value\n").is_err()); // entry before section
        assert!(parse_report_str("[s]\nnot a pair\n").is_err());
        assert!(parse_report_str("").unwrap().is_empty());
    }

    #[test]
    fn sig6_is_six_significant_digits() {
        assert_eq!(sig6(3.4897559113742287), "3.48976");
        assert_eq!(sig6(-3.0400613733227626), "-3.04006");
        assert_eq!(sig6(0.993170607582819), "0.993171");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(123456.789), "123457");
        assert_eq!(sig6(0.35), "0.35");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(3e-17), "3e-17");
        assert_eq!(sig6(-2.5e8), "-2.5e8");
    }
}

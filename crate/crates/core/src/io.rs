//! CSV/JSON input and output.
//!
//! Historical data is wide format, one row per study: `study,<cat_1>,...`.
//! Interval files have the columns
//! `method,category,L,U,y_hat,sep,multiplier_L,multiplier_U`; simulation files
//! `scenario_id,C,K,n,m,phi,method,coverage,mc_error,category,p_below_L,p_above_U,min_expected_count`.
//! JSON output uses the same field names. Numbers are written with six
//! significant digits.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::interval::PredictionIntervalSet;
use crate::model::HistoricalDataset;
use crate::sim::{SimulationReport, TailBalanceRow};

pub const INTERVAL_COLUMNS: [&str; 8] = ["method", "category", "L", "U", "y_hat", "sep", "multiplier_L", "multiplier_U"];
pub const SIMULATION_COLUMNS: [&str; 13] = [
    "scenario_id",
    "C",
    "K",
    "n",
    "m",
    "phi",
    "method",
    "coverage",
    "mc_error",
    "category",
    "p_below_L",
    "p_above_U",
    "min_expected_count",
];
pub const TAIL_COLUMNS: [&str; 6] = ["method", "category", "p_ge_L", "p_le_U", "reference", "mc_error"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Validation(format!("unknown format '{other}', expected csv or json"))),
        }
    }
}

impl OutputFormat {
    /// `json` for a `.json` extension, otherwise `csv`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

/// `%.6g`-style formatting: six significant digits, trailing zeros removed,
/// exponent notation outside `[1e-4, 1e6)`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // round first so that 999999.5 moves to the next decade
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig_value(x: f64) -> Value {
    if x.is_finite() {
        json!(format_sig(x).parse::<f64>().expect("formatted number parses"))
    } else {
        Value::Null
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn csv_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

/// Header labels and integer cells of a wide count table.
struct CountTable {
    categories: Vec<String>,
    studies: Vec<String>,
    counts: Vec<Vec<u64>>,
}

fn read_count_table(text: &str) -> Result<CountTable> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.len() < 2 {
        return Err(Error::Parse(
            "header must be 'study,<category_1>,...,<category_C>'".into(),
        ));
    }
    let categories: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut studies = Vec::new();
    let mut counts = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = i + 1;
        if rec.len() != header.len() {
            return Err(Error::Parse(format!(
                "row {row}: expected {} fields, found {}",
                header.len(),
                rec.len()
            )));
        }
        let study = rec[0].to_string();
        let mut cells = Vec::with_capacity(categories.len());
        for (j, cell) in rec.iter().skip(1).enumerate() {
            let v: i64 = cell.parse().map_err(|_| {
                Error::Parse(format!(
                    "row {row} (study '{study}'), column '{}': '{cell}' is not an integer",
                    categories[j]
                ))
            })?;
            if v < 0 {
                return Err(Error::Validation(format!(
                    "row {row} (study '{study}'), column '{}': negative count {v}",
                    categories[j]
                )));
            }
            cells.push(v as u64);
        }
        studies.push(study);
        counts.push(cells);
    }
    Ok(CountTable {
        categories,
        studies,
        counts,
    })
}

/// Parses wide-format historical counts.
pub fn parse_counts_str(text: &str) -> Result<HistoricalDataset> {
    let t = read_count_table(text)?;
    if t.counts.len() < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 historical studies (K >= 2), found {}",
            t.counts.len()
        )));
    }
    if t.categories.len() < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 categories (C >= 2), found {}",
            t.categories.len()
        )));
    }
    HistoricalDataset::with_labels(t.counts, t.categories, t.studies)
}

fn read_text(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|e| io_err(path, e))?;
    Ok(s)
}

pub fn parse_counts_csv(path: impl AsRef<Path>) -> Result<HistoricalDataset> {
    parse_counts_str(&read_text(path.as_ref())?)
}

/// Parses a single future count vector in the historical format. The
/// categories must match `expected` when given.
pub fn parse_future_str(text: &str, expected: Option<&[String]>) -> Result<Vec<u64>> {
    let t = read_count_table(text)?;
    if t.counts.len() != 1 {
        return Err(Error::Validation(format!(
            "future file must contain exactly one study row, found {}",
            t.counts.len()
        )));
    }
    if let Some(exp) = expected {
        if exp != t.categories.as_slice() {
            return Err(Error::Validation(format!(
                "future categories {:?} do not match historical categories {:?}",
                t.categories, exp
            )));
        }
    }
    Ok(t.counts.into_iter().next().expect("one row"))
}

pub fn parse_future_csv(path: impl AsRef<Path>, expected: Option<&[String]>) -> Result<Vec<u64>> {
    parse_future_str(&read_text(path.as_ref())?, expected)
}

fn counts_to_csv(categories: &[String], studies: &[String], rows: &[Vec<u64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["study".to_string()];
    header.extend(categories.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (s, r) in studies.iter().zip(rows) {
        let mut rec = vec![s.clone()];
        rec.extend(r.iter().map(u64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn dataset_to_csv(data: &HistoricalDataset) -> Result<String> {
    counts_to_csv(data.category_labels(), data.study_labels(), data.counts())
}

/// One-row file for a future study, readable by [`parse_future_csv`].
pub fn future_to_csv(categories: &[String], study: &str, y: &[u64]) -> Result<String> {
    counts_to_csv(categories, &[study.to_string()], &[y.to_vec()])
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| io_err(path, e))
}

/// One line of an interval file.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRow {
    pub method: String,
    pub category: String,
    pub lower: f64,
    pub upper: f64,
    pub y_hat: f64,
    pub sep: f64,
    pub multiplier_lower: Option<f64>,
    pub multiplier_upper: Option<f64>,
}

pub fn interval_rows(sets: &[PredictionIntervalSet<f64>], categories: &[String]) -> Vec<IntervalRow> {
    sets.iter()
        .flat_map(|s| {
            (0..s.categories()).map(move |c| IntervalRow {
                method: s.method.clone(),
                category: categories.get(c).cloned().unwrap_or_else(|| (c + 1).to_string()),
                lower: s.lower[c],
                upper: s.upper[c],
                y_hat: s.y_hat[c],
                sep: s.scale[c],
                multiplier_lower: s.multiplier_lower[c],
                multiplier_upper: s.multiplier_upper[c],
            })
        })
        .collect()
}

fn opt_sig(v: Option<f64>) -> String {
    v.map(format_sig).unwrap_or_default()
}

pub fn intervals_to_csv(rows: &[IntervalRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(INTERVAL_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.category.clone(),
            format_sig(r.lower),
            format_sig(r.upper),
            format_sig(r.y_hat),
            format_sig(r.sep),
            opt_sig(r.multiplier_lower),
            opt_sig(r.multiplier_upper),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn interval_row_json(r: &IntervalRow) -> Value {
    let mut o = Map::new();
    o.insert("method".into(), json!(r.method));
    o.insert("category".into(), json!(r.category));
    o.insert("L".into(), sig_value(r.lower));
    o.insert("U".into(), sig_value(r.upper));
    o.insert("y_hat".into(), sig_value(r.y_hat));
    o.insert("sep".into(), sig_value(r.sep));
    o.insert("multiplier_L".into(), r.multiplier_lower.map_or(Value::Null, sig_value));
    o.insert("multiplier_U".into(), r.multiplier_upper.map_or(Value::Null, sig_value));
    Value::Object(o)
}

/// Per-method verdict for an observed future vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Containment {
    pub method: String,
    pub contained: bool,
    /// Labels of categories outside their interval.
    pub violations: Vec<String>,
}

pub fn containment(sets: &[PredictionIntervalSet<f64>], categories: &[String], y: &[u64]) -> Vec<Containment> {
    sets.iter()
        .map(|s| {
            let violations: Vec<String> = (0..s.categories())
                .filter(|&c| !s.contains_category(c, y[c]))
                .map(|c| categories.get(c).cloned().unwrap_or_else(|| (c + 1).to_string()))
                .collect();
            Containment {
                method: s.method.clone(),
                contained: violations.is_empty(),
                violations,
            }
        })
        .collect()
}

/// `{"rows": [...], "containment": [...]}`; `containment` only when given.
pub fn intervals_to_json(rows: &[IntervalRow], verdicts: Option<&[Containment]>) -> String {
    let mut top = Map::new();
    top.insert("rows".into(), Value::Array(rows.iter().map(interval_row_json).collect()));
    if let Some(v) = verdicts {
        let arr = v
            .iter()
            .map(|c| json!({"method": c.method, "contained": c.contained, "violations": c.violations}))
            .collect();
        top.insert("containment".into(), Value::Array(arr));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json serialization");
    s.push('\n');
    s
}

fn parse_f64(field: &str, what: &str, line: usize) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: column '{what}': '{field}' is not a number")))
}

fn parse_opt(field: &str, what: &str, line: usize) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_f64(field, what, line).map(Some)
    }
}

/// Reads back a file written by [`intervals_to_csv`].
pub fn parse_intervals_csv_str(text: &str) -> Result<Vec<IntervalRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().ne(INTERVAL_COLUMNS.iter().copied()) {
        return Err(Error::Parse(format!("unexpected interval header {:?}", header)));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        out.push(IntervalRow {
            method: rec[0].to_string(),
            category: rec[1].to_string(),
            lower: parse_f64(&rec[2], "L", line)?,
            upper: parse_f64(&rec[3], "U", line)?,
            y_hat: parse_f64(&rec[4], "y_hat", line)?,
            sep: parse_f64(&rec[5], "sep", line)?,
            multiplier_lower: parse_opt(&rec[6], "multiplier_L", line)?,
            multiplier_upper: parse_opt(&rec[7], "multiplier_U", line)?,
        });
    }
    Ok(out)
}

/// Writes interval rows in the requested format.
pub fn emit_intervals(
    rows: &[IntervalRow],
    verdicts: Option<&[Containment]>,
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => intervals_to_csv(rows)?,
        OutputFormat::Json => intervals_to_json(rows, verdicts),
    };
    write_text(path, &text)
}

/// One line of a simulation file.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRow {
    pub scenario_id: String,
    pub c: usize,
    pub k: usize,
    pub n: u64,
    pub m: u64,
    pub phi: f64,
    pub method: String,
    pub coverage: f64,
    pub mc_error: f64,
    pub category: usize,
    pub p_below: f64,
    pub p_above: f64,
    pub min_expected_count: f64,
}

/// One row per method and category (1-based).
pub fn simulation_rows(report: &SimulationReport) -> Vec<SimulationRow> {
    let s = &report.scenario;
    report
        .methods
        .iter()
        .flat_map(|m| {
            (0..s.categories()).map(move |c| SimulationRow {
                scenario_id: s.id.clone(),
                c: s.categories(),
                k: s.k,
                n: s.n,
                m: s.m,
                phi: s.phi,
                method: m.method.clone(),
                coverage: m.coverage,
                mc_error: m.mc_error,
                category: c + 1,
                p_below: m.p_below[c],
                p_above: m.p_above[c],
                min_expected_count: report.min_expected_count,
            })
        })
        .collect()
}

pub fn simulation_to_csv(rows: &[SimulationRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SIMULATION_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scenario_id.clone(),
            r.c.to_string(),
            r.k.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            format_sig(r.phi),
            r.method.clone(),
            format_sig(r.coverage),
            format_sig(r.mc_error),
            r.category.to_string(),
            format_sig(r.p_below),
            format_sig(r.p_above),
            format_sig(r.min_expected_count),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

pub fn simulation_to_json(rows: &[SimulationRow]) -> String {
    let arr: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut o = Map::new();
            o.insert("scenario_id".into(), json!(r.scenario_id));
            o.insert("C".into(), json!(r.c));
            o.insert("K".into(), json!(r.k));
            o.insert("n".into(), json!(r.n));
            o.insert("m".into(), json!(r.m));
            o.insert("phi".into(), sig_value(r.phi));
            o.insert("method".into(), json!(r.method));
            o.insert("coverage".into(), sig_value(r.coverage));
            o.insert("mc_error".into(), sig_value(r.mc_error));
            o.insert("category".into(), json!(r.category));
            o.insert("p_below_L".into(), sig_value(r.p_below));
            o.insert("p_above_U".into(), sig_value(r.p_above));
            o.insert("min_expected_count".into(), sig_value(r.min_expected_count));
            Value::Object(o)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({ "rows": arr })).expect("json serialization");
    s.push('\n');
    s
}

pub fn emit_simulation(rows: &[SimulationRow], format: OutputFormat, path: impl AsRef<Path>) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => simulation_to_csv(rows)?,
        OutputFormat::Json => simulation_to_json(rows),
    };
    write_text(path, &text)
}

pub fn tail_balance_to_csv(rows: &[TailBalanceRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TAIL_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            (r.category + 1).to_string(),
            format_sig(r.p_at_or_above_lower),
            format_sig(r.p_at_or_below_upper),
            format_sig(r.reference),
            format_sig(r.mc_error),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn bounds_cell(s: &PredictionIntervalSet<f64>, c: usize) -> String {
    format!("[{:.2}, {:.2}]", s.lower[c], s.upper[c])
}

/// Category-by-method table of `[L, U]` cells, with an observed column when
/// `y` is given.
pub fn interval_table(sets: &[PredictionIntervalSet<f64>], categories: &[String], y: Option<&[u64]>) -> Vec<Vec<String>> {
    let mut header = vec!["category".to_string()];
    if y.is_some() {
        header.push("y_c".into());
    }
    header.extend(sets.iter().map(|s| s.method.clone()));
    let mut rows = vec![header];
    for (c, label) in categories.iter().enumerate() {
        let mut row = vec![label.clone()];
        if let Some(y) = y {
            row.push(y[c].to_string());
        }
        row.extend(sets.iter().map(|s| bounds_cell(s, c)));
        rows.push(row);
    }
    rows
}

pub fn interval_table_csv(table: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in table {
        w.write_record(r).map_err(csv_err)?;
    }
    finish_csv(w)
}

/// Left-aligned columns separated by two spaces.
pub fn render_table(table: &[Vec<String>]) -> String {
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|j| table.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in table {
        let line: Vec<String> = r.iter().enumerate().map(|(j, s)| format!("{s:<w$}", w = widths[j])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(20.686312), "20.6863");
        assert_eq!(format_sig(1.959963984540074), "1.95996");
        assert_eq!(format_sig(46.0), "46");
        assert_eq!(format_sig(-0.125), "-0.125");
        assert_eq!(format_sig(1234567.0), "1.23457e+06");
        assert_eq!(format_sig(0.0000123456789), "1.23457e-05");
        assert_eq!(format_sig(0.000123456789), "0.000123457");
        assert_eq!(format_sig(999999.7), "1e+06");
        assert_eq!(format_sig(0.99166666), "0.991667");
    }

    #[test]
    fn parse_good_file() {
        let d = parse_counts_str("study,a,b,c\ns1,1,2,3\ns2,4,5,6\n").unwrap();
        assert_eq!(d.clusters(), 2);
        assert_eq!(d.categories(), 3);
        assert_eq!(d.cluster_sizes(), &[6, 15]);
        assert_eq!(d.category_labels(), &["a", "b", "c"]);
    }

    #[test]
    fn parse_errors_name_location() {
        let e = parse_counts_str("study,a,b\ns1,1,2\ns2,-4,5\n").unwrap_err();
        assert!(matches!(&e, Error::Validation(m) if m.contains("row 2") && m.contains("'a'")), "{e}");
        let e = parse_counts_str("study,a,b\ns1,1,x\ns2,4,5\n").unwrap_err();
        assert!(matches!(&e, Error::Parse(m) if m.contains("row 1") && m.contains("'b'")), "{e}");
        let e = parse_counts_str("study,a,b\ns1,1\ns2,4,5\n").unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        let e = parse_counts_str("study,a,b\ns1,1,2\n").unwrap_err();
        assert!(matches!(&e, Error::Validation(m) if m.contains("K >= 2")));
        let e = parse_counts_str("study,a\ns1,1\ns2,2\n").unwrap_err();
        assert!(matches!(&e, Error::Validation(m) if m.contains("C >= 2")));
    }

    #[test]
    fn dataset_round_trip() {
        let d = parse_counts_str("study,a,b\nx,1,2\ny,3,4\n").unwrap();
        assert_eq!(dataset_to_csv(&d).unwrap(), "study,a,b\nx,1,2\ny,3,4\n");
    }

    #[test]
    fn future_categories_must_match() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert_eq!(parse_future_str("study,a,b\nnew,3,4\n", Some(&labels)).unwrap(), vec![3, 4]);
        assert!(parse_future_str("study,b,a\nnew,3,4\n", Some(&labels)).is_err());
        assert!(parse_future_str("study,a,b\nx,3,4\ny,1,1\n", Some(&labels)).is_err());
    }

    #[test]
    fn intervals_round_trip_and_empty() {
        let set = PredictionIntervalSet::from_multipliers(
            "marginal",
            0.05,
            46,
            vec![10.304, 21.436],
            vec![3.1234567, 4.7654321],
            vec![1.5, 2.5],
            vec![2.25, 3.0],
        );
        let labels = vec!["Minimal".to_string(), "Slight".to_string()];
        let rows = interval_rows(&[set], &labels);
        let back = parse_intervals_csv_str(&intervals_to_csv(&rows).unwrap()).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(format_sig(a.lower), format_sig(b.lower));
            assert_eq!(format_sig(a.sep), format_sig(b.sep));
            assert_eq!(a.multiplier_upper, b.multiplier_upper);
            assert_eq!(a.category, b.category);
        }
        assert_eq!(intervals_to_csv(&[]).unwrap(), format!("{}\n", INTERVAL_COLUMNS.join(",")));
        let j: Value = serde_json::from_str(&intervals_to_json(&rows, None)).unwrap();
        assert_eq!(j["rows"][1]["sep"], json!(4.76543));
        assert_eq!(j["rows"][0]["category"], json!("Minimal"));
    }

    #[test]
    fn table_layout() {
        let set = PredictionIntervalSet::from_bounds("bayes-scs-cauchy", 0.05, 46, vec![1.0, 10.0], vec![23.0, 37.0], vec![9.0, 21.0], vec![5.0, 6.0]);
        let labels = vec!["Minimal".to_string(), "Slight".to_string()];
        let t = interval_table(&[set], &labels, Some(&[21, 14]));
        assert_eq!(t[0], vec!["category", "y_c", "bayes-scs-cauchy"]);
        assert_eq!(t[2], vec!["Slight", "14", "[10.00, 37.00]"]);
        let text = render_table(&t);
        assert!(text.lines().nth(1).unwrap().starts_with("Minimal   21   [1.00, 23.00]"), "{text}");
    }
}

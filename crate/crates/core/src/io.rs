//! Text formats: sweep rows as CSV or JSON, `key=value` configuration files,
//! and comma-separated list flags.

use crate::error::{Error, Result};
use crate::maxwellian::EntryVariant;
use crate::sweep::{OutputFormat, OutputRow, Spacing, Status, SweepSpec};
use crate::transport::Method;

pub const CSV_HEADER: &str = "gamma,a,method,nu,chi,mu,nu_hat,chi_hat,mu_hat,diag_min_pivot,status";

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

/// Twelve significant digits in scientific notation; zero of either sign prints as `0`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return format!("{:.11e}", 0.0);
    }
    format!("{v:.11e}")
}

fn format_opt(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

pub fn csv_line(row: &OutputRow) -> String {
    [
        format_number(row.gamma),
        format_number(row.a),
        row.method.as_str().to_string(),
        format_opt(row.nu),
        format_opt(row.chi),
        format_opt(row.mu),
        format_opt(row.nu_hat),
        format_opt(row.chi_hat),
        format_opt(row.mu_hat),
        format_opt(row.diag_min_pivot),
        row.status.as_str().to_string(),
    ]
    .join(",")
}

pub fn emit_csv(rows: &[OutputRow]) -> String {
    let mut out = String::with_capacity(160 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_line(r));
        out.push('\n');
    }
    out
}

fn parse_number(field: &str, name: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::Parse(format!("{name}: not a number: {field:?}")))?;
    if !v.is_finite() {
        return parse_err(format!("{name}: not finite: {field:?}"));
    }
    Ok(v)
}

fn parse_opt(field: &str, name: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_number(field, name).map(Some)
    }
}

/// Values present iff the status is ok.
pub fn check_row(row: &OutputRow) -> Result<()> {
    let values = [row.nu, row.chi, row.mu, row.nu_hat, row.chi_hat, row.mu_hat, row.diag_min_pivot];
    let ok = row.status == Status::Ok;
    if values.iter().any(|v| v.is_some() != ok) {
        return parse_err(format!(
            "row at gamma {} has values inconsistent with status {}",
            row.gamma,
            row.status.as_str()
        ));
    }
    if values.iter().flatten().chain([&row.gamma, &row.a]).any(|v| !v.is_finite()) {
        return parse_err("row contains a non-finite value");
    }
    Ok(())
}

pub fn parse_csv_row(line: &str) -> Result<OutputRow> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 11 {
        return parse_err(format!("expected 11 fields, got {}", f.len()));
    }
    let row = OutputRow {
        gamma: parse_number(f[0], "gamma")?,
        a: parse_number(f[1], "a")?,
        method: Method::parse(f[2]).ok_or_else(|| Error::Parse(format!("unknown method {:?}", f[2])))?,
        nu: parse_opt(f[3], "nu")?,
        chi: parse_opt(f[4], "chi")?,
        mu: parse_opt(f[5], "mu")?,
        nu_hat: parse_opt(f[6], "nu_hat")?,
        chi_hat: parse_opt(f[7], "chi_hat")?,
        mu_hat: parse_opt(f[8], "mu_hat")?,
        diag_min_pivot: parse_opt(f[9], "diag_min_pivot")?,
        status: Status::parse(f[10]).ok_or_else(|| Error::Parse(format!("unknown status {:?}", f[10])))?,
    };
    check_row(&row)?;
    Ok(row)
}

pub fn parse_csv(text: &str) -> Result<Vec<OutputRow>> {
    let mut lines = text.split('\n');
    match lines.next() {
        Some(CSV_HEADER) => {}
        Some(other) => return parse_err(format!("unexpected header {other:?}")),
        None => return parse_err("empty input"),
    }
    let body: Vec<&str> = lines.collect();
    match body.split_last() {
        Some((&"", rest)) => rest.iter().map(|l| parse_csv_row(l)).collect(),
        _ => parse_err("missing final newline"),
    }
}

/// A JSON array with one row object per line.
pub fn emit_json(rows: &[OutputRow]) -> String {
    if rows.is_empty() {
        return "[]\n".into();
    }
    let body: Vec<String> = rows.iter().map(|r| serde_json::to_string(r).expect("rows serialize")).collect();
    format!("[\n{}\n]\n", body.join(",\n"))
}

pub fn parse_json_row(text: &str) -> Result<OutputRow> {
    let row: OutputRow = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    check_row(&row)?;
    Ok(row)
}

pub fn parse_json(text: &str) -> Result<Vec<OutputRow>> {
    let rows: Vec<OutputRow> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    rows.iter().try_for_each(check_row)?;
    Ok(rows)
}

pub fn emit(rows: &[OutputRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => emit_csv(rows),
        OutputFormat::Json => emit_json(rows),
    }
}

/// Comma-separated finite reals, e.g. `0,1,2.5`.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|item| parse_number(item.trim(), "list item")).collect()
}

/// Comma-separated methods, returned in the canonical order mi2, mi3, cem.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let m = Method::parse(item).ok_or_else(|| Error::Parse(format!("unknown method {:?}", item.trim())))?;
        if out.contains(&m) {
            return parse_err(format!("method {m} listed twice"));
        }
        out.push(m);
    }
    out.sort();
    Ok(out)
}

pub fn parse_spacing(s: &str) -> Result<Spacing> {
    match s.trim() {
        "log" => Ok(Spacing::Log),
        "linear" => Ok(Spacing::Linear),
        other => parse_err(format!("unknown spacing {other:?}")),
    }
}

pub fn parse_format(s: &str) -> Result<OutputFormat> {
    match s.trim() {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => parse_err(format!("unknown output format {other:?}")),
    }
}

pub fn parse_variant(s: &str) -> Result<EntryVariant> {
    EntryVariant::parse(s).ok_or_else(|| Error::Parse(format!("unknown entry variant {:?}", s.trim())))
}

/// Sweep keys accepted in configuration files, in `snake_case`.
pub const SPEC_KEYS: [&str; 11] = [
    "gamma_min",
    "gamma_max",
    "points",
    "spacing",
    "a_values",
    "methods",
    "tau",
    "n_density",
    "entry_variant",
    "output_format",
    "rel_tol",
];

/// Sets one sweep field from its textual value. Keys may use `-` or `_`.
pub fn apply_setting(spec: &mut SweepSpec, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    match key.trim().replace('-', "_").as_str() {
        "gamma_min" => spec.gamma_min = parse_number(value, key)?,
        "gamma_max" => spec.gamma_max = parse_number(value, key)?,
        "points" => spec.points = value.parse().map_err(|_| Error::Parse(format!("points: not a count: {value:?}")))?,
        "spacing" => spec.spacing = parse_spacing(value)?,
        "a_values" => spec.a_values = parse_f64_list(value)?,
        "methods" => spec.methods = parse_methods(value)?,
        "tau" => spec.tau = parse_number(value, key)?,
        "n_density" => spec.n_density = parse_number(value, key)?,
        "entry_variant" => spec.entry_variant = parse_variant(value)?,
        "output_format" => spec.output_format = parse_format(value)?,
        "rel_tol" => spec.rel_tol = parse_number(value, key)?,
        other => return parse_err(format!("unknown key {other:?}")),
    }
    Ok(())
}

/// `key = value` lines; blank lines and `#` comments are skipped, a key may
/// appear once.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
        let key = k.trim().replace('-', "_");
        if !SPEC_KEYS.contains(&key.as_str()) {
            return parse_err(format!("line {}: unknown key {key:?}", n + 1));
        }
        if out.iter().any(|(existing, _)| *existing == key) {
            return parse_err(format!("line {}: duplicate key {key:?}", n + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Applies a whole configuration file on top of `spec`.
pub fn apply_config(spec: &mut SweepSpec, text: &str) -> Result<()> {
    for (k, v) in parse_config(text)? {
        apply_setting(spec, &k, &v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(status: Status) -> OutputRow {
        let v = (status == Status::Ok).then_some(1.25);
        OutputRow {
            gamma: 10.0,
            a: 0.5,
            method: Method::Mi3,
            nu: v,
            chi: v,
            mu: v,
            nu_hat: v,
            chi_hat: v,
            mu_hat: v,
            diag_min_pivot: v,
            status,
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1234.5678901234567), "1.23456789012e3");
        assert_eq!(format_number(-0.0), "0.00000000000e0");
        assert_eq!(format_number(1e-300), "1.00000000000e-300");
    }

    #[test]
    fn csv_layout() {
        let text = emit_csv(&[row(Status::Ok), row(Status::Singular)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "1.00000000000e1,5.00000000000e-1,mi3,1.25000000000e0,1.25000000000e0,1.25000000000e0,1.25000000000e0,1.25000000000e0,1.25000000000e0,1.25000000000e0,ok");
        assert_eq!(lines[2], "1.00000000000e1,5.00000000000e-1,mi3,,,,,,,,singular");
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert_eq!(parse_csv(&text).unwrap(), vec![row(Status::Ok), row(Status::Singular)]);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("gamma,a\n").is_err());
        assert!(parse_csv(CSV_HEADER).is_err());
        let ok = csv_line(&row(Status::Ok));
        assert!(parse_csv_row(&ok.replace(",ok", ",singular")).is_err());
        assert!(parse_csv_row(&ok.replace("mi3", "mi4")).is_err());
        assert!(parse_csv_row(&ok.replacen("1.25000000000e0", "inf", 1)).is_err());
        assert!(parse_csv_row("1,2,3").is_err());
    }

    #[test]
    fn json_round_trip() {
        let rows = vec![row(Status::Ok), row(Status::Nonconverged)];
        let text = emit_json(&rows);
        assert_eq!(parse_json(&text).unwrap(), rows);
        assert_eq!(parse_json(&emit_json(&[])).unwrap(), vec![]);
        assert!(parse_json_row(r#"{"gamma":1}"#).is_err());
    }

    #[test]
    fn list_flags() {
        assert_eq!(parse_f64_list("0, 1,2.5").unwrap(), vec![0.0, 1.0, 2.5]);
        assert!(parse_f64_list("0,,1").is_err());
        assert!(parse_f64_list("nan").is_err());
        assert_eq!(parse_methods("cem,mi2").unwrap(), vec![Method::Mi2, Method::Cem]);
        assert!(parse_methods("cem,cem").is_err());
        assert!(parse_methods("").is_err());
    }

    #[test]
    fn config_files() {
        let text = "# sweep\ngamma-min = 2\n\na_values=0,1 # two gases\nmethods = cem\nentry_variant = pattern-consistent\n";
        let mut spec = SweepSpec::default();
        apply_config(&mut spec, text).unwrap();
        assert_eq!(spec.gamma_min, 2.0);
        assert_eq!(spec.a_values, vec![0.0, 1.0]);
        assert_eq!(spec.methods, vec![Method::Cem]);
        assert_eq!(spec.entry_variant, EntryVariant::PatternConsistent);
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("tau = 1\ntau = 2").is_err());
        assert!(parse_config("tau").is_err());
        assert!(apply_config(&mut spec, "points = -3").is_err());
    }
}

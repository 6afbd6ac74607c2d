use polygreen::report::{emit_report, Format, Report, ReportRow, CSV_HEADER, SCHEMA};

fn sample() -> Report {
    let mut r = Report::new("torus green");
    r.pass = true;
    r.rows.push(ReportRow::new(100.0, 0.25, 0.1234567890123, 0.5));
    r.rows.push(ReportRow::new(1e4, 0.1, 1e-300, 2e-300).with_fitted(3.5));
    r.note("seed", 7).unwrap();
    r
}

#[test]
fn json_round_trip_is_exact() {
    let r = sample();
    let text = r.to_json().unwrap();
    let back = Report::from_json(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.schema, SCHEMA);
    assert_eq!(back.rows[0].ratio, 0.1234567890123 / 0.5);
}

#[test]
fn foreign_schema_is_rejected() {
    let text = sample().to_json().unwrap().replace(SCHEMA, "other/9");
    assert!(Report::from_json(&text).is_err());
}

#[test]
fn csv_has_the_fixed_header_and_empty_missing_cells() {
    let csv = sample().to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 6);
    assert_eq!(first[5], "");
    let second: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(second[5].parse::<f64>().unwrap(), 3.5);
    assert_eq!(second[2].parse::<f64>().unwrap(), 1e-300);
}

#[test]
fn emit_writes_and_reports_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    emit_report(&sample(), Format::Json, &path).unwrap();
    assert_eq!(Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap(), sample());
    let bad = dir.path().join("missing").join("r.csv");
    assert!(emit_report(&sample(), Format::Csv, &bad).is_err());
}

#[test]
fn empty_reports_are_not_rendered() {
    let r = Report::new("x");
    assert!(r.render(Format::Csv).is_err());
}

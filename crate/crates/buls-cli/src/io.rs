use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use buls::data::{embedded, BivariateDataset};
use buls::BulsError;

use crate::CliError;

/// Resolves `--data`: an embedded name or a CSV path.
pub fn load_data(spec: &str) -> Result<BivariateDataset, CliError> {
    if let Some(d) = embedded(spec) {
        return Ok(d);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::data(format!("'{spec}' is neither an embedded data set nor a readable file")));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::data(format!("{spec}: {e}")))?;
    parse_csv(&text, path.file_stem().and_then(|s| s.to_str()))
}

/// Reads a `w1,w2` CSV, listing every rejected line.
pub fn parse_csv(text: &str, label: Option<&str>) -> Result<BivariateDataset, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| CliError::data(format!("bad CSV header: {e}")))?.clone();
    if header.len() != 2 || &header[0] != "w1" || &header[1] != "w2" {
        return Err(CliError::data(format!("expected header 'w1,w2', found '{}'", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut pairs = Vec::new();
    let mut problems = Vec::new();
    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                problems.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed.as_deref() {
            Ok(&[w1, w2]) if w1 > 0.0 && w1 < 1.0 && w2 > 0.0 && w2 < 1.0 => pairs.push((w1, w2)),
            Ok(&[w1, w2]) => problems.push(format!("line {line}: ({w1}, {w2}) is not strictly inside (0,1)")),
            _ => problems.push(format!("line {line}: expected two decimal numbers, found '{}'", rec.iter().collect::<Vec<_>>().join(","))),
        }
    }
    if !problems.is_empty() {
        return Err(CliError::data(problems.join("\n")));
    }
    if pairs.is_empty() {
        return Err(CliError::data("no observations".into()));
    }
    BivariateDataset::from_pairs(&pairs, label).map_err(CliError::from)
}

/// `w1,w2` CSV with shortest round-trip decimal representations.
pub fn dataset_csv(d: &BivariateDataset) -> String {
    let mut s = String::from("w1,w2\n");
    for p in &d.rows {
        let _ = writeln!(s, "{:?},{:?}", p.w1, p.w2);
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NA".into() } else { format!("{x}") };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let s = format!("{:.*}", (5 - mag).max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Left-aligned first column, right-aligned rest.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { format!("{c:<w$}", w = width[0]) } else { format!("{c:>w$}", w = width[i]) })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = line(header.to_vec()) + "\n";
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
        out.push('\n');
    }
    out
}

impl From<BulsError> for CliError {
    fn from(e: BulsError) -> Self {
        match e {
            BulsError::Data { .. } | BulsError::NonFinite { .. } => CliError::data(e.to_string()),
            BulsError::Convergence { .. } | BulsError::StudyAborted { .. } => CliError { code: 4, msg: e.to_string() },
            _ => CliError::usage(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(sig6(-36.69312), "-36.6931");
        assert_eq!(sig6(0.5288213), "0.528821");
        assert_eq!(sig6(83.0), "83");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(f64::NAN), "NA");
    }

    #[test]
    fn csv_rows_are_checked_with_line_numbers() {
        let err = parse_csv("w1,w2\n0.2,0.3\n1.0,0.5\n0.4,abc\n", None).unwrap_err();
        assert_eq!(err.code, 3);
        assert!(err.msg.contains("line 3") && err.msg.contains("line 4"), "{}", err.msg);
        assert_eq!(parse_csv("a,b\n0.2,0.3\n", None).unwrap_err().code, 3);
        assert_eq!(parse_csv("w1,w2\n0.25, 0.5\n", None).unwrap().pairs(), vec![(0.25, 0.5)]);
    }

    #[test]
    fn csv_round_trip() {
        let d = BivariateDataset::from_pairs(&[(0.1 + 0.2, 1.0 / 3.0), (1e-15, 0.999_999_999_999)], None).unwrap();
        assert_eq!(parse_csv(&dataset_csv(&d), None).unwrap().pairs(), d.pairs());
    }
}

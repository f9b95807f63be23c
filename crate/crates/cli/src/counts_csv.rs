//! Count-matrix and distribution CSV files.
//!
//! ```text
//! # bins_a=8 bins_b=8
//! 981742,8821,12,0,0,0,0,0,0
//! ...
//! ```
//!
//! One header line, then `bins_a + 1` rows of `bins_b + 1` comma-separated
//! values; row index is the arm-A click number, column index the arm-B one.
//! Count files hold non-negative integers, distribution files hold
//! probabilities written in shortest round-trip form.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use clickstat::{CountMatrix, JointClickDistribution};

use crate::error::{CliError, Result};

pub fn write_counts<W: Write>(mut w: W, counts: &CountMatrix) -> io::Result<()> {
    write_header(&mut w, counts.bins_a(), counts.bins_b())?;
    for a in 0..=counts.bins_a() {
        write_row(&mut w, counts.row(a))?;
    }
    w.flush()
}

pub fn write_distribution<W: Write>(mut w: W, jcd: &JointClickDistribution) -> io::Result<()> {
    write_header(&mut w, jcd.bins_a(), jcd.bins_b())?;
    for a in 0..=jcd.bins_a() {
        write_row(&mut w, jcd.row(a))?;
    }
    w.flush()
}

fn write_header<W: Write>(w: &mut W, bins_a: usize, bins_b: usize) -> io::Result<()> {
    writeln!(w, "# bins_a={bins_a} bins_b={bins_b}")
}

fn write_row<W: Write, T: Display>(w: &mut W, row: &[T]) -> io::Result<()> {
    let line: Vec<String> = row.iter().map(ToString::to_string).collect();
    writeln!(w, "{}", line.join(","))
}

pub fn read_counts(text: &str) -> Result<CountMatrix> {
    let (bins_a, bins_b, values) = parse_matrix::<u64>(text)?;
    Ok(CountMatrix::new(bins_a, bins_b, values)?)
}

/// Reads a distribution file, renormalizing the values to unit sum.
pub fn read_distribution(text: &str) -> Result<JointClickDistribution> {
    let (bins_a, bins_b, values) = parse_matrix::<f64>(text)?;
    Ok(JointClickDistribution::from_weights(
        bins_a, bins_b, values,
    )?)
}

pub fn load_counts(path: &Path) -> Result<CountMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    read_counts(&text).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_counts(path: &Path, counts: &CountMatrix) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_counts(io::BufWriter::new(file), counts).map_err(|e| CliError::io(path, e))
}

pub fn save_distribution(path: &Path, jcd: &JointClickDistribution) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_distribution(io::BufWriter::new(file), jcd).map_err(|e| CliError::io(path, e))
}

fn parse_matrix<T: FromStr>(text: &str) -> Result<(usize, usize, Vec<T>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Data("empty file".into()))?;
    let (bins_a, bins_b) = parse_header(header)?;

    let mut values = Vec::with_capacity((bins_a + 1) * (bins_b + 1));
    let mut rows = 0;
    for (line_no, line) in lines {
        if line.starts_with('#') {
            continue;
        }
        rows += 1;
        if rows > bins_a + 1 {
            return Err(CliError::Data(format!(
                "line {line_no}: more than bins_a + 1 = {} rows",
                bins_a + 1
            )));
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != bins_b + 1 {
            return Err(CliError::Data(format!(
                "line {line_no}: expected {} columns, found {}",
                bins_b + 1,
                fields.len()
            )));
        }
        for field in fields {
            let v = field
                .parse::<T>()
                .map_err(|_| CliError::Data(format!("line {line_no}: cannot parse {field:?}")))?;
            values.push(v);
        }
    }
    if rows != bins_a + 1 {
        return Err(CliError::Data(format!(
            "expected {} rows, found {rows}",
            bins_a + 1
        )));
    }
    Ok((bins_a, bins_b, values))
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| CliError::Data("missing `# bins_a=.. bins_b=..` header".into()))?;
    let mut bins_a = None;
    let mut bins_b = None;
    for token in body.split_whitespace() {
        let Some((key, value)) = token.split_once('=') else {
            continue;
        };
        let parsed = value
            .parse::<usize>()
            .map_err(|_| CliError::Data(format!("bad header value {token:?}")))?;
        match key {
            "bins_a" => bins_a = Some(parsed),
            "bins_b" => bins_b = Some(parsed),
            _ => {}
        }
    }
    match (bins_a, bins_b) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(CliError::Data(format!(
            "header must define bins_a and bins_b: {line:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_layout() {
        let text = "# bins_a=2 bins_b=3\n1,2,3,4\n0,0,0,0\n5, 6 ,7,8\n";
        let c = read_counts(text).unwrap();
        assert_eq!(c.bins_a(), 2);
        assert_eq!(c.bins_b(), 3);
        assert_eq!(c.get(2, 1), 6);
        assert_eq!(c.total(), 36);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_counts("").is_err());
        assert!(read_counts("1,2\n3,4\n").is_err());
        assert!(read_counts("# bins_a=2\n1,2,3\n").is_err());
        assert!(read_counts("# bins_a=2 bins_b=2\n1,2,3\n1,2\n1,2,3\n").is_err());
        assert!(read_counts("# bins_a=2 bins_b=2\n1,2,3\n1,2,3\n").is_err());
        assert!(read_counts("# bins_a=2 bins_b=2\n1,2,3\n1,-2,3\n1,2,3\n").is_err());
        assert!(read_counts("# bins_a=2 bins_b=2\n1,2,3\n1,2,3\n1,2,3\n1,2,3\n").is_err());
        // bins below 2
        assert!(read_counts("# bins_a=0 bins_b=0\n1\n").is_err());
    }

    #[test]
    fn distribution_round_trip_is_exact() {
        let probs: Vec<f64> = (0..9).map(|i| (i as f64 + 0.1) / 36.9).collect();
        let sum: f64 = probs.iter().sum();
        let jcd =
            JointClickDistribution::from_weights(2, 2, probs.iter().map(|p| p / sum).collect())
                .unwrap();
        let mut buf = Vec::new();
        write_distribution(&mut buf, &jcd).unwrap();
        let back = read_distribution(std::str::from_utf8(&buf).unwrap()).unwrap();
        for (x, y) in jcd.probs().iter().zip(back.probs()) {
            approx::assert_relative_eq!(x, y, max_relative = 1e-15);
        }
    }
}

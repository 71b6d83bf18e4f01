//! Bulk-data file formats.
//!
//! Event log CSV: header `index,sigma,omega,t1_s,t2_s,true_path`, one row
//! per record, timestamps in scientific notation with 17 significant digits
//! (exact f64 round trip). Spectrum CSV: header
//! `bin_center_s,count_pp,count_pm,count_mp,count_mm`.

use std::io::{BufRead, BufReader, Read, Write};

use retrolab_core::amplitude::{Arm, Outcome, PathPair, Sign};
use retrolab_core::sim::{DelaySpectrum, DetectionRecord};

use crate::error::CliError;

pub const EVENTS_HEADER: &str = "index,sigma,omega,t1_s,t2_s,true_path";
pub const SPECTRUM_HEADER: &str = "bin_center_s,count_pp,count_pm,count_mp,count_mm";

fn sign_label(sign: Sign) -> &'static str {
    match sign {
        Sign::Plus => "+1",
        Sign::Minus => "-1",
    }
}

fn parse_sign(text: &str) -> Result<Sign, CliError> {
    match text {
        "+1" | "1" | "+" => Ok(Sign::Plus),
        "-1" | "-" => Ok(Sign::Minus),
        other => Err(CliError::Config(format!("invalid sign value `{other}`"))),
    }
}

/// Compact dash-separated path label, e.g. `l-Ll` for `(l,Ll)`.
pub fn path_label(path: PathPair) -> String {
    format!(
        "{}-{}{}",
        path.photon1.symbol(),
        path.photon2.first.symbol(),
        path.photon2.second.symbol()
    )
}

fn parse_arm(c: char) -> Result<Arm, CliError> {
    match c {
        'l' => Ok(Arm::Short),
        'L' => Ok(Arm::Long),
        other => Err(CliError::Config(format!("invalid arm symbol `{other}`"))),
    }
}

pub fn parse_path(text: &str) -> Result<PathPair, CliError> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() != 4 || chars[1] != '-' {
        return Err(CliError::Config(format!("invalid path label `{text}`")));
    }
    Ok(PathPair::new(
        parse_arm(chars[0])?,
        parse_arm(chars[2])?,
        parse_arm(chars[3])?,
    ))
}

/// Write the event log. Formatting is fixed so identical records always
/// produce identical bytes.
pub fn write_events_csv<W: Write>(
    writer: &mut W,
    records: &[DetectionRecord],
) -> std::io::Result<()> {
    writeln!(writer, "{EVENTS_HEADER}")?;
    for (index, record) in records.iter().enumerate() {
        writeln!(
            writer,
            "{index},{},{},{:.16e},{:.16e},{}",
            sign_label(record.outcome.sigma),
            sign_label(record.outcome.omega),
            record.t1,
            record.t2,
            path_label(record.true_path)
        )?;
    }
    Ok(())
}

/// Read an event log produced by [`write_events_csv`].
pub fn read_events_csv<R: Read>(reader: R) -> Result<Vec<DetectionRecord>, CliError> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("empty event CSV".into()))?
        .map_err(CliError::Io)?;
    if header.trim() != EVENTS_HEADER {
        return Err(CliError::Config(format!(
            "unexpected event CSV header `{header}` (want `{EVENTS_HEADER}`)"
        )));
    }
    let mut records = Vec::new();
    for (line_no, line) in lines.enumerate() {
        let line = line.map_err(CliError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::Config(format!(
                "event CSV row {}: expected 6 fields, got {}",
                line_no + 2,
                fields.len()
            )));
        }
        let parse_time = |text: &str, name: &str| -> Result<f64, CliError> {
            text.parse::<f64>().map_err(|e| {
                CliError::Config(format!("event CSV row {}: bad {name}: {e}", line_no + 2))
            })
        };
        records.push(DetectionRecord {
            outcome: Outcome::new(parse_sign(fields[1])?, parse_sign(fields[2])?),
            t1: parse_time(fields[3], "t1_s")?,
            t2: parse_time(fields[4], "t2_s")?,
            true_path: parse_path(fields[5])?,
        });
    }
    Ok(records)
}

/// Write a delay spectrum as CSV rows in ascending bin order.
pub fn write_spectrum_csv<W: Write>(
    writer: &mut W,
    spectrum: &DelaySpectrum,
) -> std::io::Result<()> {
    writeln!(writer, "{SPECTRUM_HEADER}")?;
    for (bin_center, counts) in spectrum.rows() {
        writeln!(
            writer,
            "{bin_center:.16e},{},{},{},{}",
            counts[0], counts[1], counts[2], counts[3]
        )?;
    }
    Ok(())
}

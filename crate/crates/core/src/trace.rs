//! CSV serialization of protocol traces.
//!
//! Header `t,mz,e0,fidelity,b,rf,event`; numbers carry 12 significant
//! digits, `rf` is `0`/`1`, and `event` lists the instant's events joined by
//! `;` (empty when none fired). `e0` holds the bare-chain energy `⟨H0⟩`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::protocols::{Event, ProtocolTrace, TraceSample};

pub const HEADER: [&str; 7] = ["t", "mz", "e0", "fidelity", "b", "rf", "event"];

/// Rounds to 12 significant digits and prints the shortest decimal form.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("float formatting");
    if rounded == 0.0 {
        // drop the sign of negative zero
        return "0".into();
    }
    format!("{rounded}")
}

fn events_field(events: &[Event]) -> String {
    events
        .iter()
        .map(|e| e.name())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_csv<W: Write>(trace: &ProtocolTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for s in &trace.samples {
        w.write_record([
            format_number(s.t),
            format_number(s.mz),
            format_number(s.e0),
            format_number(s.fidelity),
            format_number(s.b),
            if s.rf { "1" } else { "0" }.to_string(),
            events_field(&s.events),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(trace: &ProtocolTrace) -> String {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn write_trace(trace: &ProtocolTrace, path: &Path) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::Config("refusing to write an empty trace".into()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(trace, std::io::BufWriter::new(file)).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    })
}

fn parse_f64(path: &Path, row: usize, field: &str) -> Result<f64> {
    field.parse().map_err(|_| Error::Format {
        path: path.to_path_buf(),
        reason: format!("row {row}: bad number `{field}`"),
    })
}

pub fn read_trace(path: &Path) -> Result<ProtocolTrace> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let bad = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut samples = Vec::new();
    for (i, record) in r.records().enumerate() {
        let row = i + 2;
        let rec = record.map_err(|e| bad(e.to_string()))?;
        let rf = match &rec[5] {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("row {row}: bad rf flag `{other}`"))),
        };
        let events = if rec[6].is_empty() {
            Vec::new()
        } else {
            rec[6]
                .split(';')
                .map(|e| Event::parse(e).ok_or_else(|| bad(format!("row {row}: bad event `{e}`"))))
                .collect::<Result<Vec<_>>>()?
        };
        samples.push(TraceSample {
            t: parse_f64(path, row, &rec[0])?,
            mz: parse_f64(path, row, &rec[1])?,
            e0: parse_f64(path, row, &rec[2])?,
            fidelity: parse_f64(path, row, &rec[3])?,
            b: parse_f64(path, row, &rec[4])?,
            rf,
            events,
        });
    }
    Ok(ProtocolTrace { samples })
}

/// Reads one numeric column of a trace file by header name.
pub fn read_column(path: &Path, column: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let trace = read_trace(path)?;
    let pick: fn(&TraceSample) -> f64 = match column {
        "t" => |s| s.t,
        "mz" => |s| s.mz,
        "e0" => |s| s.e0,
        "fidelity" => |s| s.fidelity,
        "b" => |s| s.b,
        "rf" => |s| if s.rf { 1.0 } else { 0.0 },
        other => {
            return Err(Error::Config(format!(
                "unknown column `{other}`; expected one of t, mz, e0, fidelity, b, rf"
            )))
        }
    };
    Ok(trace.samples.iter().map(|s| (s.t, pick(s))).unzip())
}

//! On-disk form of an [`EventLog`].
//!
//! Events go to a CSV file with header `node,time` (or `node,time,tau` when
//! rescaled times are requested). Node 0 appears once and every other row
//! stands for the pair `±node`. Times are written with Rust's shortest
//! round-trip formatting, so reading a file back reproduces the log bit for
//! bit. Everything else lives in a JSON sidecar ([`LogMeta`]).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relay::ModelParams;

use super::{EventLog, SolverMeta, SwitchEvent};

pub const FORMAT_VERSION: u32 = 1;

/// JSON sidecar of an events file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogMeta {
    pub format_version: u32,
    pub params: ModelParams,
    pub horizon: f64,
    pub event_count: usize,
    pub solver: SolverMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl LogMeta {
    pub fn of(log: &EventLog) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            params: log.params,
            horizon: log.horizon,
            event_count: log.events.len(),
            solver: log.meta,
            timestamp: None,
        }
    }

    /// Reassemble and validate a log from its two files.
    pub fn into_log(self, events: Vec<SwitchEvent>) -> Result<EventLog> {
        if events.len() != self.event_count {
            return Err(Error::Format(format!(
                "sidecar declares {} events, file has {}",
                self.event_count,
                events.len()
            )));
        }
        let log = EventLog {
            params: self.params,
            horizon: self.horizon,
            events,
            meta: self.solver,
        };
        log.validate()?;
        Ok(log)
    }
}

/// Write the events; with `epsilon`, add the column `tau = ε² time`.
pub fn write_events_csv<W: Write>(log: &EventLog, epsilon: Option<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match epsilon {
        Some(_) => w.write_record(["node", "time", "tau"])?,
        None => w.write_record(["node", "time"])?,
    }
    for e in &log.events {
        let node = e.node.to_string();
        let time = e.time.to_string();
        match epsilon {
            Some(eps) => w.write_record([node, time, (eps * eps * e.time).to_string()])?,
            None => w.write_record([node, time])?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_events_csv<R: Read>(input: R) -> Result<Vec<SwitchEvent>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.get(0) != Some("node") || headers.get(1) != Some("time") {
        return Err(Error::Format(format!(
            "expected header starting with node,time; got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut events = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let parse_err = |what: &str| Error::Format(format!("row {}: bad {what}", line + 1));
        let node = record
            .get(0)
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| parse_err("node"))?;
        let time = record
            .get(1)
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| parse_err("time"))?;
        events.push(SwitchEvent { node, time });
    }
    Ok(events)
}

pub fn write_meta_json<W: Write>(meta: &LogMeta, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, meta)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_meta_json<R: Read>(input: R) -> Result<LogMeta> {
    let meta: LogMeta = serde_json::from_reader(input)?;
    if meta.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {}",
            meta.format_version
        )));
    }
    Ok(meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Method;

    fn log() -> EventLog {
        EventLog {
            params: ModelParams::new(1.0, 0.5, 0.2).unwrap(),
            horizon: 20.0,
            events: vec![
                SwitchEvent { node: 0, time: 0.0 },
                SwitchEvent {
                    node: 1,
                    time: 1.0 / 3.0 + 0.5,
                },
                SwitchEvent {
                    node: 3,
                    time: 12.345678901234567,
                },
            ],
            meta: SolverMeta {
                method: Method::EventDriven,
                time_tol: 1e-9,
                value_tol: 1e-7,
                simultaneity_window: 1e-8,
                lattice_halfwidth: None,
            },
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let log = log();
        let mut csv_buf = Vec::new();
        write_events_csv(&log, None, &mut csv_buf).unwrap();
        let mut json_buf = Vec::new();
        write_meta_json(&LogMeta::of(&log), &mut json_buf).unwrap();
        let events = read_events_csv(csv_buf.as_slice()).unwrap();
        let back = read_meta_json(json_buf.as_slice())
            .unwrap()
            .into_log(events)
            .unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn header_and_tau_column() {
        let mut buf = Vec::new();
        write_events_csv(&log(), Some(0.1), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("node,time,tau\n0,0,0\n"));
        assert_eq!(read_events_csv(text.as_bytes()).unwrap().len(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_events_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_events_csv("node,time\nx,2\n".as_bytes()).is_err());
        let events = read_events_csv("node,time\n0,0\n".as_bytes()).unwrap();
        assert!(LogMeta::of(&log()).into_log(events).is_err());
    }
}

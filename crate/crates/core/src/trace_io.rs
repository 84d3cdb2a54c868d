//! Line-oriented trace files: one packet per line as
//! `<date> <length> <flow>`, `#` starts a comment, blank lines are skipped.
//! Dates are integers or `p/q` (`inf` is accepted).

use std::fmt::Write;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::literal::parse_ext_rational;
use crate::traces::{FlowId, PacketSequence};

/// Packets as read, in file order, without any ordering check. Output of a
/// per-flow bank is such a list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceRecords {
    pub dates: Vec<Ext<BigRational>>,
    pub lengths: Vec<u64>,
    pub flows: Vec<FlowId>,
}

impl TraceRecords {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn into_sequence(self) -> Result<PacketSequence<BigRational>> {
        PacketSequence::from_ext(self.dates, self.lengths, self.flows)
    }
}

impl From<&PacketSequence<BigRational>> for TraceRecords {
    fn from(seq: &PacketSequence<BigRational>) -> Self {
        TraceRecords {
            dates: seq.dates().to_vec(),
            lengths: seq.lengths().to_vec(),
            flows: seq.flows().to_vec(),
        }
    }
}

pub fn parse_records(text: &str) -> Result<TraceRecords> {
    let mut out = TraceRecords::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [date, length, flow] = fields[..] else {
            return Err(err(format!("expected `<date> <length> <flow>`, got `{content}`")));
        };
        let date = parse_ext_rational(date).map_err(|e| err(e.to_string()))?;
        let length: u64 = length.parse().map_err(|_| err(format!("bad length `{length}`")))?;
        if length == 0 {
            return Err(err("length must be positive".into()));
        }
        let flow: FlowId = flow.parse().map_err(|_| err(format!("bad flow id `{flow}`")))?;
        out.dates.push(date);
        out.lengths.push(length);
        out.flows.push(flow);
    }
    Ok(out)
}

/// Parses a trace whose dates must be wide-sense increasing.
pub fn parse_trace(text: &str) -> Result<PacketSequence<BigRational>> {
    let records = parse_records(text)?;
    if let Some(n) = (1..records.len()).find(|&n| records.dates[n] < records.dates[n - 1]) {
        return Err(Error::InvalidSequence(format!(
            "date of packet {} is earlier than the one before",
            n + 1
        )));
    }
    records.into_sequence()
}

/// Canonical text: reduced `p/q`, integers without a denominator.
pub fn write_records(records: &TraceRecords) -> String {
    let mut s = String::new();
    for n in 0..records.len() {
        writeln!(s, "{} {} {}", records.dates[n], records.lengths[n], records.flows[n]).expect("string write");
    }
    s
}

pub fn write_trace(seq: &PacketSequence<BigRational>) -> String {
    write_records(&TraceRecords::from(seq))
}

//! The two-flow reference scenario.
//!
//! Two flows share a low-priority FIFO queue served at rate 1 that is
//! preempted during `[0,3]`, `[10,13]` and `[20,23]`. Flow 1 sends packets
//! of length 2 every 5 time units in pairs, flow 2 a packet of length 1
//! alongside each second packet of flow 1. Flow 1 is regulated by packet
//! spacing 5 and flow 2 by packet spacing 10. Units are one data unit of
//! 1200 bytes and one time unit of 12 microseconds.
//!
//! The interleaved regulator keeps the overall worst-case delay of the
//! server (5) but raises flow 2 from 3 to 5, while a per-flow bank leaves
//! flow 2 untouched.

use std::collections::BTreeMap;
use std::fmt::{self, Write};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::literal::parse_ext_rational;
use crate::operators::RegulationOperator;
use crate::regulators::{minimal_interleaved_regulate, per_flow_bank};
use crate::scalar::int;
use crate::systems::{per_flow_worst_case_delay_dates, worst_case_delay_dates, FifoSystem};
use crate::traces::{FlowId, PacketSequence};

type Q = BigRational;

pub struct Scenario {
    pub input: PacketSequence<Q>,
    pub system: FifoSystem<Q>,
    pub ops: BTreeMap<FlowId, RegulationOperator<Q>>,
}

pub fn two_flow() -> Scenario {
    let input = PacketSequence::new(
        [0, 5, 5, 10, 15, 15, 20, 25, 25].map(int).to_vec(),
        vec![2, 2, 1, 2, 2, 1, 2, 2, 1],
        vec![1, 1, 2, 1, 1, 2, 1, 1, 2],
    )
    .expect("valid");
    let system = FifoSystem::preemptive_server(
        int(1),
        vec![(int(0), int(3)), (int(10), int(13)), (int(20), int(23))],
    )
    .expect("valid");
    let ops = BTreeMap::from([
        (1, RegulationOperator::packet_spacing(int(5)).expect("valid")),
        (2, RegulationOperator::packet_spacing(int(10)).expect("valid")),
    ]);
    Scenario { input, system, ops }
}

/// Every series and delay figure of a run, in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct Figures {
    pub series: Vec<(String, Vec<Ext<Q>>)>,
}

impl Figures {
    pub fn get(&self, name: &str) -> Option<&[Ext<Q>]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// One line per series: the name, then its values.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (name, values) in &self.series {
            write!(s, "{name}").unwrap();
            for v in values {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Reads the format written by [`Figures::render`]; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut series = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            let mut fields = content.split_whitespace();
            let Some(name) = fields.next() else { continue };
            let values = fields
                .map(parse_ext_rational)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            series.push((name.to_string(), values));
        }
        Ok(Figures { series })
    }

    /// First difference against `expected`: series name, zero-based index
    /// and both values (`None` where one side is missing).
    pub fn first_difference(&self, expected: &Figures) -> Option<Difference> {
        for (name, want) in &expected.series {
            let got = self.get(name).unwrap_or(&[]);
            for i in 0..want.len().max(got.len()) {
                if want.get(i) != got.get(i) {
                    return Some(Difference {
                        series: name.clone(),
                        index: i,
                        expected: want.get(i).cloned(),
                        actual: got.get(i).cloned(),
                    });
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Difference {
    pub series: String,
    pub index: usize,
    pub expected: Option<Ext<Q>>,
    pub actual: Option<Ext<Q>>,
}

impl fmt::Display for Difference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &Option<Ext<Q>>| v.as_ref().map_or("missing".to_string(), |v| v.to_string());
        write!(
            f,
            "{} differs at n={}: expected {}, got {}",
            self.series,
            self.index + 1,
            show(&self.expected),
            show(&self.actual)
        )
    }
}

impl Scenario {
    /// Input `A`, server output `D`, interleaved output `E`, bank output
    /// `E'`, and worst-case delays per flow and overall for `A -> D` and
    /// `A -> E`.
    pub fn run(&self) -> Result<Figures> {
        let d = self.system.apply(&self.input)?;
        let e = minimal_interleaved_regulate(&self.ops, &d)?;
        let e_bank = per_flow_bank(&self.ops, &d)?;
        let mut series = vec![
            ("A".to_string(), self.input.dates().to_vec()),
            ("D".to_string(), d.dates().to_vec()),
            ("E".to_string(), e.dates().to_vec()),
            ("E'".to_string(), e_bank),
        ];
        for (label, out) in [("", d.dates()), ("_tot", e.dates())] {
            for (f, v) in per_flow_worst_case_delay_dates(&self.input, out)? {
                series.push((format!("d{f}{label}"), vec![Ext::Finite(v)]));
            }
            series.push((format!("d{label}"), vec![worst_case_delay_dates(&self.input, out)?]));
        }
        Ok(Figures { series })
    }
}

/// The expected figures.
pub fn golden() -> Figures {
    let v = |xs: &[i64]| xs.iter().map(|&x| Ext::Finite(int(x))).collect::<Vec<_>>();
    let series = [
        ("A", v(&[0, 5, 5, 10, 15, 15, 20, 25, 25])),
        ("D", v(&[5, 7, 8, 15, 17, 18, 25, 27, 28])),
        ("E", v(&[5, 10, 10, 15, 20, 20, 25, 30, 30])),
        ("E'", v(&[5, 10, 8, 15, 20, 18, 25, 30, 28])),
        ("d1", v(&[5])),
        ("d2", v(&[3])),
        ("d", v(&[5])),
        ("d1_tot", v(&[5])),
        ("d2_tot", v(&[5])),
        ("d_tot", v(&[5])),
    ];
    Figures {
        series: series.into_iter().map(|(n, s)| (n.to_string(), s)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_golden() {
        let figures = two_flow().run().unwrap();
        assert_eq!(figures, golden());
        assert_eq!(figures.first_difference(&golden()), None);
    }

    #[test]
    fn render_round_trip_and_difference() {
        let g = golden();
        assert_eq!(Figures::parse(&g.render()).unwrap(), g);
        let mut altered = g.clone();
        altered.series[2].1[4] = Ext::Finite(int(21));
        let diff = g.first_difference(&altered).unwrap();
        assert_eq!((diff.series.as_str(), diff.index), ("E", 4));
        assert_eq!(diff.to_string(), "E differs at n=5: expected 21, got 20");
    }
}

//! Pipeline configuration files.
//!
//! One stage per line, applied top to bottom:
//!
//! ```text
//! # FIFO systems
//! pserver 1 [0,3] [10,13] [20,23]
//! damper 2
//! # regulators
//! regulator ps 5                      single-flow input only
//! interleaved {1: ps 5, 2: ps 10}
//! bank {1: ps 5, 2: ps 10}            per-flow regulators, must come last
//! ```

use pireg::literal::{parse_bindings, parse_operator, parse_system};
use pireg::regulators::{minimal_interleaved_regulate, minimal_regulate, per_flow_bank};
use pireg::trace_io::TraceRecords;
use pireg::{Error, FifoSystem, OperatorMap, PacketSequence, RegulationOperator, Result};

// A handful per configuration, so variant size does not matter.
#[allow(clippy::large_enum_variant)]
#[derive(Debug)]
pub enum Stage {
    System(FifoSystem),
    Regulator(RegulationOperator),
    Interleaved(OperatorMap),
    /// Outputs are not reordered, so the result may leave out of order.
    Bank(OperatorMap),
}

#[derive(Debug)]
pub struct PipelineConfig {
    pub stages: Vec<Stage>,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut stages = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (head, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            let stage = match head {
                "regulator" => parse_operator(rest).map(Stage::Regulator),
                "interleaved" => parse_bindings(rest).map(Stage::Interleaved),
                "bank" => parse_bindings(rest).map(Stage::Bank),
                _ => parse_system(content).map(Stage::System),
            }
            .map_err(|e| match e {
                Error::Parse { message, .. } => Error::Parse { line, message },
                other => other,
            })?;
            if matches!(stages.last(), Some(Stage::Bank(_))) {
                return Err(Error::Precondition(format!(
                    "line {line}: a bank must be the last stage, its output is not FIFO"
                )));
            }
            stages.push(stage);
        }
        if stages.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "configuration has no stages".into(),
            });
        }
        Ok(PipelineConfig { stages })
    }

    pub fn run(&self, input: &PacketSequence) -> Result<TraceRecords> {
        let mut seq = input.clone();
        for stage in &self.stages {
            seq = match stage {
                Stage::System(s) => s.apply(&seq)?,
                Stage::Regulator(op) => minimal_regulate(op, &seq)?,
                Stage::Interleaved(ops) => minimal_interleaved_regulate(ops, &seq)?,
                Stage::Bank(ops) => {
                    let mut records = TraceRecords::from(&seq);
                    records.dates = per_flow_bank(ops, &seq)?;
                    return Ok(records);
                }
            };
        }
        Ok(TraceRecords::from(&seq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_stages() {
        let c = PipelineConfig::parse("# two stages\npserver 1 [0,3]\n\ninterleaved {1: ps 5}\n").unwrap();
        assert!(matches!(c.stages[..], [Stage::System(_), Stage::Interleaved(_)]));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(PipelineConfig::parse("\n# nothing\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            PipelineConfig::parse("identity\nwobble 3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            PipelineConfig::parse("bank {1: ps 5}\nidentity\n"),
            Err(Error::Precondition(_))
        ));
    }
}

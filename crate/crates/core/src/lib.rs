//! Regulation of packet flows by max-plus operators.
//!
//! The crate models packet sequences, wide-sense increasing curves and their
//! pseudo-inverses, a catalog of regulation operators, minimal per-flow and
//! interleaved regulators, FIFO systems, and checkers for the properties
//! that relate them.
//!
//! Algorithms are generic over [`Scalar`](scalar::Scalar). The aliases at the
//! crate root fix the scalar to exact rationals, which is what every check
//! and the command-line tool use.

pub mod curves;
pub mod error;
pub mod ext;
pub mod literal;
pub mod operators;
pub mod regulators;
pub mod scalar;
pub mod scenario;
pub mod systems;
pub mod trace_io;
pub mod traces;
pub mod verify;

pub use error::{Error, Result};
pub use ext::Ext;
pub use scalar::Scalar;
pub use traces::FlowId;

pub type Rat = num_rational::BigRational;
pub type ExtRat = ext::Ext<Rat>;
pub type Curve = curves::Curve<Rat>;
pub type PacketSequence = traces::PacketSequence<Rat>;
pub type RegulationOperator = operators::RegulationOperator<Rat>;
pub type FifoSystem = systems::FifoSystem<Rat>;
pub type OperatorMap = verify::OperatorMap<Rat>;
pub type CheckReport = verify::CheckReport<Rat>;

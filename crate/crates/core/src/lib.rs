//! Polynomial inequality proving on boxes through Krivine-basis
//! representations found by a learned search policy.

pub mod poly;
pub mod kronfft;
pub mod lp;
pub mod problem;
pub mod stableset;
pub mod environment;
pub mod certificate;
pub mod agent;
pub mod prover;

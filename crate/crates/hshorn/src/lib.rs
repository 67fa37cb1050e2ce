//! Horn fragments of Halpern-Shoham interval logic: syntax, finite semantics, closure oracles,
//! the zone-frame decision procedure and the hardness encodings.

pub mod semantics;
pub mod syntax;
pub mod oracle;
pub mod zones;
pub mod solver;
pub mod cli;
pub mod reductions;

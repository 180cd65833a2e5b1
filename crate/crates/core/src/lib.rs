pub mod chordal;
pub mod cli;
pub mod generators;
pub mod graph;
pub mod kernel;
pub mod obstructions;
pub mod oracle;
pub mod partition;
pub mod paths;
pub mod recognizer;

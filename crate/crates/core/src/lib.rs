//! Finite first-order databases, structural updates, and exact measures of
//! coherency, relevancy, and semantic informativity.

pub mod cli;
pub mod entailment;
pub mod fixtures;
pub mod format;
pub mod golden;
pub mod metrics;
pub mod model;
pub mod planner;
pub mod reference;
pub mod report;
pub mod syntax;
pub mod updates;

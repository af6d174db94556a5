//! Rule-based propagation for finite-domain CSPs: domain reduction rules and
//! their fixpoint schedulers, arc consistency, constructive disjunction,
//! generated membership rules, and a propagate-then-split search.

pub mod arc;
pub mod bench;
pub mod cli;
pub mod disjunction;
pub mod generate;
pub mod instances;
pub mod io;
pub mod membership;
pub mod model;
pub mod oracle;
pub mod par;
pub mod propagator;
pub mod rule;
pub mod scheduler;
pub mod search;

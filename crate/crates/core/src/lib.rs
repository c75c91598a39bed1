//! Random k-XORSAT: instance generation, F₂ linear algebra, belief and
//! warning propagation, decimation algorithms, the matching asymptotic
//! formulas, and a Monte Carlo harness comparing the two.

pub mod algorithms;
pub mod analytic;
pub mod error;
pub mod experiments;
pub mod f2;
pub mod formula;
pub mod message_passing;
pub mod rng;
pub mod trit;
pub mod xnf;

pub use error::{Error, Result};
pub use trit::Trit;
pub use formula::{Clause, FactorGraph, PartialAssignment, Vertex, XorsatFormula};

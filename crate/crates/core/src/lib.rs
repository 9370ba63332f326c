//! Symbolic engine for noncommutative moment calculus: free-independence
//! moments, liberation moments (right / left / strong-right), and dilation
//! moment polynomials, with two independent verification oracles — a
//! brute-force center-expand-simplify rewriting engine and a
//! finite-dimensional Hilbert-space model built from GNS and minimal
//! Stinespring data.

pub mod dilation;
pub mod fixtures;
pub mod free;
pub mod hilbert;
pub mod ir;
pub mod liberation;
pub mod markov;
pub mod oracle;
pub mod suites;

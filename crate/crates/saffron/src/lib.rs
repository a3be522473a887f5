//! Superstructure optimization of synthetic-fuel flowsheets with embedded
//! ReLU surrogates.
//!
//! The crate builds mixed-integer quadratically constrained programs (MIQCP)
//! for process superstructures in which stream compositions are decision
//! variables, embeds trained neural-network process models as exact
//! mixed-integer linear blocks, solves the result with a built-in spatial
//! branch-and-bound over a bounded-variable simplex, and post-processes
//! solutions into fuel-production metrics (kerosene-allocated cost and CO2
//! footprint, abatement cost, Pareto fronts).
//!
//! The main data flow is:
//!
//! 1. [`core_model`] declares components, processes, ports, and connections
//!    of a superstructure, validates the wiring, and can lump hydrocarbon
//!    components into boiling-range groups.
//! 2. [`oracles`] provides synthetic steady-state process models
//!    (gasification, reverse water-gas shift, Fischer-Tropsch) used to
//!    generate training data.
//! 3. [`trainer`] fits single-hidden-layer ReLU networks to those datasets;
//!    [`surrogate`] stores the networks, propagates activation bounds, and
//!    encodes them as big-M MILP blocks.
//! 4. [`algebra`] turns a superstructure plus its surrogates into a solver
//!    independent model intermediate representation (variables, linear
//!    constraints, bilinear products, objective).
//! 5. [`solver`] relaxes bilinear products (McCormick envelopes, exact
//!    binary linearizations), runs branch-and-bound, verifies incumbents
//!    against the unrelaxed model, and exports models to LP/MPS text.
//! 6. [`scenario`] wraps everything into runnable case studies: epsilon
//!    constraint Pareto sweeps, kerosene allocation metrics, and abatement
//!    costs. [`cli`] exposes the same operations as subcommands.
//!
//! Every capability has a runnable example under `examples/`; start with
//! `examples/validate_flowsheet.rs` and `examples/solve_two_route.rs`.

pub mod algebra;
pub mod cli;
pub mod consts;
pub mod core_model;
pub mod oracles;
pub mod scenario;
pub mod solver;
pub mod surrogate;
pub mod trainer;

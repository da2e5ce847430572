//! Simulation and normal-form analysis of virus machines in generating mode.
//!
//! Machines are generic over the virus count type. [`Machine`] uses `u64`,
//! which is plenty for desk-scale exploration; [`BigMachine`] never overflows.

pub mod analysis;
pub mod constructions;
mod count;
pub mod io;
pub mod model;
pub mod reproduce;
pub mod semantics;

use num_bigint::BigUint;

pub use count::Count;
pub use model::{
    initial_configuration, validate_machine, Configuration, MachineBuilder, ModelError, Next, ValidationReport,
    Violation, VirusMachine, ENVIRONMENT,
};

pub type Machine = VirusMachine<u64>;
pub type BigMachine = VirusMachine<BigUint>;
pub type Config = Configuration<u64>;
pub type Report = semantics::GeneratedSetReport<u64>;
pub type Profile = analysis::IngredientProfile<u64>;

//! Thermal operations, recovery maps and Renyi-divergence work bounds on
//! dense complex matrices.

pub mod catalysis;
pub mod channel;
pub mod config;
pub mod divergence;
pub mod error;
pub mod json;
pub mod operator;
pub mod oscillator;
pub mod random;
pub mod workbounds;
pub mod thermo;
pub mod verify;

pub use error::{Error, Result};
pub use operator::{C64, ComplexMatrix, CompositeSpace, DensityMatrix, HermitianOperator};
pub use channel::{QuadratureSpec, Superoperator, ThermalOperation};
pub use config::Tolerances;
pub use divergence::{AlphaFamilySpec, DivergenceResult, Fidelity};
pub use json::{HamiltonianJson, MatrixJson};
pub use thermo::{GibbsState, HamiltonianSpec};
pub use workbounds::{AlphaGrid, WorkMode, WorkReport};

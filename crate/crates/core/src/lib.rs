//! Steady states of minimal two-qubit autonomous thermal machines and
//! certificates of their steering, teleportation and Bell nonlocality.

pub mod error;
pub mod filtering;
pub mod linalg;
pub mod machine;
pub mod nonclassicality;
pub mod optim;
pub mod steering;

pub use error::{Error, Result};

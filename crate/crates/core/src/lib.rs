pub mod catalog;
pub mod cli;
pub mod error;
pub mod interp;
pub mod mobius;
pub mod moore;
pub mod observables;
pub mod oracle;
pub mod quad;
pub mod roots;
pub mod stability;

pub use error::{Error, Result};

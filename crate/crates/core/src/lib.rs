pub mod asp;
pub mod causes;
pub mod cli;
pub mod conflicts;
pub mod engine;
pub mod error;
pub mod gen;
pub mod kb;
pub mod matcher;
pub mod oracle;
pub mod preference;
pub mod priority;
pub mod semantics;
pub mod solver;

pub use error::{Error, ParseError};

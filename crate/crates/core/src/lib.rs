pub mod algebra;
pub mod cyclotomic;
pub mod dimension;
pub mod error;
pub mod hermitian;
pub mod kideals;
pub mod lfunctions;
pub mod matrix;
pub mod order;
pub mod report;
pub mod scalars;
pub mod singularities;
pub mod surface;

pub use error::{Error, Result};

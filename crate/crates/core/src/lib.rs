pub mod algebra;
pub mod atlas;
pub mod error;
pub mod matrix;
pub mod seed;
pub mod grading;
pub mod compat;
pub mod unistructure;
pub mod cli;
pub mod io;

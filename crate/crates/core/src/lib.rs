pub mod chartable;
pub mod classes;
pub mod cli;
pub mod conjchar;
pub mod cyclo;
pub mod error;
pub mod ffield;
pub mod group;
pub mod modring;
pub mod ortho3;
pub mod sl2;
pub mod verify;

pub use error::{Error, Result};

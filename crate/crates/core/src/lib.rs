pub mod error;
pub mod gf2;
pub mod magnus;
pub mod massey;
pub mod modarith;
pub mod presentation;
pub mod quadfield;
pub mod redei;
pub mod report;
pub mod search;
pub mod ternary;
pub mod verify;

pub use error::{Error, Result};

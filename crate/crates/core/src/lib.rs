//! Lines on quartic surfaces in projective three-space over binary fields.

pub mod builtins;
pub mod census;
pub mod cli;
pub mod error;
pub mod field;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod pencil;
pub mod poly;
pub mod ring;
pub mod sample;
pub mod segre;
pub mod tate;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Embedding, Field, FieldElement, FieldSpec};

//! Thing-machine models: parsing, validation, simulation, graph
//! transformation and rendering.

pub mod cli;
pub mod document;
pub mod dsl;
pub mod dynamics;
pub mod error;
pub mod guard;
pub mod model;
pub mod normalize;
pub mod render;
pub mod report;
pub mod sim;
pub mod transform;
pub mod validate;

pub use document::{validate_document, ModelDocument};
pub use dsl::{parse, serialize, ParseError, ParseErrors, Parsed};
pub use error::{Error, Result};
pub use model::{ActionKind, ActionRef, Form, StaticModel, Thimac, ThimacId};
pub use normalize::normalize;
pub use report::{Diagnostic, Severity, ValidationReport};
pub use validate::validate_static;

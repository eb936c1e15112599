//! Decision procedures for the bimodal provability logic J2 over finite
//! stratified Kripke models: derivability, n-bisimulation and types,
//! projective unifiers, projective approximations, unifier bases, and
//! admissibility of inference rules.

pub mod bisim;
pub mod cli;
pub mod decide;
pub mod error;
pub mod formula;
pub mod gl;
pub mod model;
pub mod saturation;
pub mod unify;

pub use error::{Error, Result};
pub use formula::{parse, render, Formula, Modality, Substitution, VarContext};
pub use model::{PointedModel, RawModel, StratifiedModel};

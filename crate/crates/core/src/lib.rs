//! Homological representations of free-group and surface-group automorphisms
//! on finite covers, and Burau / Lawrence–Krammer spectral estimates.

pub mod braid;
pub mod burau;
pub mod catalog;
pub mod detect;
pub mod endo;
pub mod error;
pub mod expansion;
pub mod homology;
pub mod numerics;
pub mod perm;
pub mod quotient;
pub mod rep;
pub mod schreier;
pub mod word;

pub use braid::{braid_to_endo, BraidWord};
pub use endo::EndoMap;
pub use error::{Error, Result};
pub use word::{free_reduce, Presentation, PresentationKind, Word};

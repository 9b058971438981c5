//! Ternary 1-perfect codes: construction, verification, counting,
//! switching, and equivalence classification.

pub mod canonical;
pub mod classify;
pub mod collection;
pub mod concat;
pub mod error;
pub mod exactcover;
pub mod gf3;
pub mod linalg;
pub mod perfect;
pub mod permgroup;
pub mod rank1;

pub use error::{Error, Result};
pub use gf3::{apply_isometry, hamming_distance, min_distance, Code, Isometry, TernaryWord};

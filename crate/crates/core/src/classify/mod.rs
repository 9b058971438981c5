//! Classification pipelines: partial RM-like codes, RM-like subcodes of the
//! parity code, collections of disjoint RM-like codes, and partitions of
//! `F_3^4` into 1-perfect codes.

pub mod collections;
pub mod mcanon;
pub mod p4;
pub mod partial;
pub mod registry;
pub mod rmlike;

pub use partial::{extend_partial, PartialCode};
pub use registry::{ClassEntry, ClassRegistry};
pub use rmlike::{classify_rm_like, enumerate_class_orbit, ClassOrbit, RmLikeClassification};
pub use collections::{classify_collections, collections_k1, CollectionOptions};
pub use mcanon::{MCertificate, MCollectionCanon};
pub use p4::{classify_p4_partitions, P4Classification};

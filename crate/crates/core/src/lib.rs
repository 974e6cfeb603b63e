//! Quasi-cyclic LDPC codes from complete mappings of cyclic groups.
//!
//! Shift matrices over `Z/N` are lifted to block-circulant parity-check
//! matrices. The crate builds girth-6 codes from complete mappings, computes
//! girth from the shifts and from the Tanner graph, searches for the smallest
//! lifting factor, and checks girth-8 difference tables exhaustively.

pub mod cli;
pub mod girth;
pub mod girth8;
pub mod group;
pub mod lifting;
pub mod mappings;
pub mod search;
pub mod textdoc;

pub use girth::{girth_bfs, girth_from_shifts, has_girth_at_least, GirthReport};
pub use group::{Permutation, Residue};
pub use lifting::{lift, normalize, ParityCheckMatrix, ShiftMatrix};
pub use mappings::CompleteMapping;
pub use search::{min_lifting_factor, SearchResult};

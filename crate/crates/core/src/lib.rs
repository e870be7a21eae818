//! Executable workbench for finitary and finitely bounded functors on
//! computable categories with finite objects.

pub mod cats;
pub mod certificate;
pub mod colimit;
pub mod error;
pub mod functor;
pub mod hausdorff;
pub mod nominal;
pub mod strictness;
pub mod superfin;
pub mod union_find;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::Verdict;

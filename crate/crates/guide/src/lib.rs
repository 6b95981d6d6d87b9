//! The guide's chapters, compiled as doc comments so `cargo test` runs every
//! snippet in `book/src`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/landscapes.md")]
pub mod landscapes {}
#[doc = include_str!("../../../book/src/walsh.md")]
pub mod walsh {}
#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}
#[doc = include_str!("../../../book/src/nk.md")]
pub mod nk {}
#[doc = include_str!("../../../book/src/search.md")]
pub mod search {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}

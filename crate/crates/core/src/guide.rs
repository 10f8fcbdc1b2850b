//! Doc-test bridge for the mdbook guide.
//!
//! mdbook cannot run chapter snippets against this crate, so every chapter is
//! re-exposed here as a documented module and `cargo test --doc` compiles and
//! runs the fenced Rust blocks. A chapter edit that breaks the API fails the
//! test suite.

#[doc = include_str!("../../../book/src/process.md")]
pub mod process_chapter {}

#[doc = include_str!("../../../book/src/protocol.md")]
pub mod protocol_chapter {}

#[doc = include_str!("../../../book/src/captures.md")]
pub mod captures_chapter {}

#[doc = include_str!("../../../book/src/attacks.md")]
pub mod attacks_chapter {}

#[doc = include_str!("../../../book/src/side-channels.md")]
pub mod side_channels_chapter {}

#[doc = include_str!("../../../book/src/detectors.md")]
pub mod detectors_chapter {}

#[doc = include_str!("../../../book/src/datasets.md")]
pub mod datasets_chapter {}

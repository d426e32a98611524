//! Keeps the book honest: each chapter is attached as module documentation,
//! so `cargo test --doc -p absim-book` compiles and runs every fenced Rust
//! block in `book/src/`. mdbook renders the same files; this crate makes
//! sure they cannot drift away from the library.
//!
//! One module per chapter so a failing snippet names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/units.md")]
pub mod units {}

#[doc = include_str!("../../../book/src/closed-forms.md")]
pub mod closed_forms {}

#[doc = include_str!("../../../book/src/mirror.md")]
pub mod mirror {}

#[doc = include_str!("../../../book/src/propagator.md")]
pub mod propagator {}

#[doc = include_str!("../../../book/src/interference.md")]
pub mod interference {}

#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

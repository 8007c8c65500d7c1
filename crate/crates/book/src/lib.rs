//! Chapters of the guide in `book/src`, compiled here so their snippets run as doc-tests.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}
#[doc = include_str!("../../../book/src/atom.md")]
pub mod atom {}
#[doc = include_str!("../../../book/src/susceptibility.md")]
pub mod susceptibility {}
#[doc = include_str!("../../../book/src/propagation.md")]
pub mod propagation {}
#[doc = include_str!("../../../book/src/diagnostics.md")]
pub mod diagnostics {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

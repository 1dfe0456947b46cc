//! The chapters of the guide, compiled so that their snippets run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/hidden-variables.md")]
pub mod hidden_variables {}

#[doc = include_str!("../../../book/src/bell-runs.md")]
pub mod bell_runs {}

#[doc = include_str!("../../../book/src/boolean.md")]
pub mod boolean {}

#[doc = include_str!("../../../book/src/algebra.md")]
pub mod algebra {}

#[doc = include_str!("../../../book/src/reproducibility.md")]
pub mod reproducibility {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

//! Compiles the guide chapters so their snippets run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/polynomials.md")]
pub mod polynomials {}

#[doc = include_str!("../../../book/src/kronecker.md")]
pub mod kronecker {}

#[doc = include_str!("../../../book/src/lp.md")]
pub mod lp {}

#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}

#[doc = include_str!("../../../book/src/environment.md")]
pub mod environment {}

#[doc = include_str!("../../../book/src/agent.md")]
pub mod agent {}

#[doc = include_str!("../../../book/src/stable-sets.md")]
pub mod stable_sets {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

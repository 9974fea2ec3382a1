//! Resource-destroying and resource-censoring quantum channels.
//!
//! The crate models censorship of quantum resources over a network of
//! sender/receiver pairs: each link passes through a censor channel that
//! maps every state to a free state while leaving an authorized affine
//! subspace of free states untouched. [`protocol`] decides whether
//! collaborating senders can get a resource state through the product of
//! local censors.

pub mod censors;
pub mod channels;
pub mod error;
pub mod protocol;
pub mod qmath;
pub mod resources;

pub use error::{Error, Result};

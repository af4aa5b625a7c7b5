//! Exact arithmetic for the p-adic rotation groups SO(2)_p and SO(3)_p.

pub mod error;
pub mod padic;
pub mod quad_form;
pub mod so2;
pub mod so3;
pub mod decompose;
pub mod projection;

pub use error::{Error, Result};
pub use padic::{PadicContext, PadicNumber};

//! Oracles shared by the integration tests. They use their own term types
//! and share no code with the library beyond conversion at the boundary.

#![allow(dead_code)]

pub mod named;
pub mod pcf_eval;

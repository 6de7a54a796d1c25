//! Exact divisor-class arithmetic for `Z₂^m`-covers of blown-up Hirzebruch
//! surfaces, and the nine families of surfaces with canonical map of
//! degree 8 built from them.

pub mod cover;
pub mod error;
pub mod families;
pub mod group;
pub mod picard;
pub mod render;
pub mod search;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};

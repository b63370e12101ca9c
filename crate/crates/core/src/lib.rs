//! Mod-l motivic Steenrod algebra toolkit: dual algebra, Milnor basis operations,
//! finitely presented modules, Singer constructions and Ext computations.

pub mod amod;
pub mod cobar;
pub mod config;
pub mod coeff;
pub mod dualalg;
pub mod ext;
pub mod fp;
pub mod ops;
pub mod render;
pub mod registry;
pub mod singer;
pub mod verify;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("profile error: {0}")]
    Profile(String),
    #[error("element is not homogeneous")]
    NonHomogeneous,
    #[error("profile mismatch")]
    ProfileMismatch,
    #[error("algebra mismatch: {0} vs {1}")]
    TagMismatch(String, String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("out of band: {0}")]
    OutOfBand(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

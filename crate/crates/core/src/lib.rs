//! Exact symplectic exterior calculus on stratified symplectic spaces.

pub mod coeffring;
pub mod exterior;
pub mod linalg;
pub mod sample;
pub mod symplectic;
pub mod homology;
pub mod lefschetz;
pub mod stratified;
pub mod hamflow;
pub mod models;

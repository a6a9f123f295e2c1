//! Counting series for families of rooted planar maps, the composition schemes
//! that relate them, and the local algebra of moving 3/2-singularities.

pub mod series;
pub mod family;
pub mod maps;
pub mod tutte;
pub mod scheme;
pub mod singular;
pub mod pipeline;

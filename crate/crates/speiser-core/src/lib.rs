pub mod analytic;
pub mod convergence;
pub mod error;
pub mod families;
pub mod graph;
pub mod lifting;
pub mod sphere;
pub mod surgery;
pub mod typeest;

pub use error::{Error, Result};
pub use graph::{
    ball, canonical_code, faces, isometric_embed, rooted_isomorphic, validate, Color,
    ConformalType, GraphScheme, SpeiserPatch,
};
pub use sphere::{spherical_distance, BaseCurve, SphereValue};

//! Signal models, grids, dictionaries, correlation profiles, and scenes.

pub mod correlation;
pub mod dictionary;
pub mod grid;
pub mod model;
pub mod scene;

pub use correlation::{correlation_profile, CorrelationProfile};
pub use dictionary::{Dictionary, DEFAULT_MAX_ENTRIES};
pub use grid::ParameterGrid;
pub use model::ParametricModel;
pub use scene::{compose_signal, draw_random_scene, MagnitudeMode, Scene, SceneSpec};

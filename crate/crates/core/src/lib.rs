//! Length spectra, covering spectra, and slipping behavior for metric
//! graphs, graph towers, flat tori, warped products, and related model
//! spaces.

pub mod cycles;
pub mod expr;
pub mod geodesic;
pub mod graph;
pub mod group;
pub mod lattice;
pub mod models;
mod par;
pub mod spectrum;
pub mod tower;
pub mod value;
pub mod warped;
pub mod word;

pub use cycles::{
    covering_spectrum, delta_cover, enumerate_shift_classes, shift_spectrum, DeltaCover,
    GraphCovSpec, SearchBudgets, ShiftClass,
};
pub use expr::{Domain, Expr, ExprError, WarpFunction};
pub use geodesic::{
    cone_fiber_distance, exp_profile_distance, fiber_distance, variational_length, Branch,
    Geodesic, GeodesicError, ProfilePlane, Side,
};
pub use graph::{GraphError, MetricGraph};
pub use group::{normal_closure_member, MembershipReport, Method, Verdict};
pub use lattice::{lattice_covering_spectrum, lattice_shift_length};
pub use models::{
    diameter_growth_estimate, revolution_rescaled_length, End, ExactLength, GrowthReport,
    ModelError, ModelKind, SpaceModel, PRESETS,
};
pub use spectrum::{AccumulationPoint, Certainty, Provenance, Spectrum, SpectrumValue};
pub use tower::{
    pants_tower, shrinking_circles_tower, slipping_test, tower_translation_length,
    universal_delta_cover_report, universal_slipping_test, wedge_tower, CoverConclusion,
    GraphTower, TowerElement, TowerError, UniversalDeltaCoverReport,
};
pub use value::{PiRat, Value, NUMERIC_EPS};
pub use warped::{
    asym_covspec, cone_distance, cone_limit_value, cone_rescaled_spectrum,
    covspec_warped_cylinder, cylinder_shift, geometric_schedule, warped_geodesic_f,
    warped_rescaled_length, AsymReport, AsymVerdict, ConeSpace, ConeSpectra, CylinderReport,
    DoublyWarped, PowerLength, SecondFiber, ShiftEstimate, TailEstimate, WarpedError,
};
pub use word::{Letter, Word};

//! Tropical curves traced by sorting diagrams on a line arrangement, their
//! multiplicities, and the counts `N^trop_{Q,k}(w)`.

mod arrangement;
mod count;
mod curve;
mod svg;
mod weights;

pub use arrangement::{build_arrangement, Line, LineArrangement};
pub use count::{stable_diagram, tropical_count, CurveCatalog, CurveSummary, Family};
pub use curve::{
    assemble_disconnected, build_component, build_curve, build_generic_component, curve_skeleton,
    leaf_key, leg_factor, skeleton_component, Component, CurveEdge, CurveVertex, EdgeEnd, Leg,
    Point, TropicalCurve,
};
pub use svg::{curve_dump, render_svg};
pub use weights::{partitions, WeightVector};

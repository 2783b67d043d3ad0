//! Distance-ratio and quasihyperbolic metrics, Gromov products and visual metrics.

pub mod distance;
pub mod graph;
pub mod gromov;
pub mod oracle;

pub use distance::{j_distance, qh_distance, qh_exact_aligned, segment_weight, QhEstimate, QhGraph, MAX_TABLE_POINTS};
pub use graph::{dijkstra, Adjacency, Augmented, Graph};
pub use gromov::{delta_at_base, delta_estimate, four_point_defect, gromov_product, visual_data, visual_epsilon, DeltaReport, VisualData};
pub use oracle::{DistanceTable, EuclideanOracle, MetricOracle};

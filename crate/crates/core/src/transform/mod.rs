//! Maps between Eulerian and Lagrangian variables and the relabeling group.

mod to_eulerian;
mod to_lagrangian;
mod relabel;

pub use relabel::{apply_relabel, project_pi, Relabeling};
pub use to_eulerian::{to_eulerian, FLAT_THRESHOLD};
pub use to_lagrangian::{to_lagrangian, to_lagrangian_triple};

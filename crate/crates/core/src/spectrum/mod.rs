//! Path space of the canonical diagonal: slot-consistent paths, their
//! count (the connected components of the spectrum), exact thread samples
//! of a component, a sound partial classification of components, the
//! standard families, and the incompleteness witness.

mod classify;
mod families;
mod paths;
mod threads;
pub mod witness;

pub use classify::{classify_path, path_census, Census, CensusEntry, PathClassification, PathLabels, Verdict};
pub use families::{build_ah_model, build_goodearl};
pub use paths::{count_components, count_components_with, enumerate_paths, PathStep, SlotPath};
pub use threads::{approximate_component, approximate_component_with, ThreadCloud};
pub use witness::{check_simplicity_sufficient, incompleteness_witness, SimplicityReport, Witness, WitnessOptions, WitnessReport};

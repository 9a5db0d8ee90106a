//! Empirical checks of the convergence guarantees: separator incidence
//! scaling, margin estimation, mistake and margin bounds, and sink atoms.

pub mod bounds;
pub mod incidence;
pub mod margin;
pub mod sinks;

pub use bounds::{
    check_fw_margin, check_mistake_bound, lattice_equivalence, EquivalenceReport, FwMarginReport,
    MistakeBoundReport,
};
pub use incidence::{count_separator_incidence, incidence_scaling, loglog_slope, IncidenceReport, ScalingReport};
pub use margin::{direction_search_margin, estimate_margin, MarginEstimate, MarginMethod};
pub use sinks::{detect_sinks, is_sink, SinkReport, SinkSearch};

//! Bell-type tests on condensate interferometers: the BCHSH family on the
//! two-source setup, the three-station GHZ argument on the ring, and a common
//! report format for verdicts.

mod bchsh;
mod ghz;
mod report;

pub use bchsh::{
    bchsh_q, bchsh_q_gaussian, correlation_closed_form, maximize_bchsh, write_bchsh_curve,
    write_qmax_table, BchshOptimum, GAUSSIAN_THRESHOLD,
};
pub use ghz::{
    ghz_contradiction_certificate, ghz_contradiction_certificate_with, ghz_correlation_closed_form,
    ghz_correlation_exact, ghz_harmonics, GhzEvidence, GhzMode, GhzReport, HarmonicTerm,
    CERTIFICATE_ANGLES, CERTIFICATE_TOL,
};
pub use report::{ViolationKind, ViolationReport};

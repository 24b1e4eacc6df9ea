//! Concentration experiments: weak continuity along concentrating sequences
//! and the higher-integrability counterexample.

pub mod counterexample;
pub mod quad;
pub mod report;
pub mod sequence;
pub mod weak;

pub use counterexample::{
    anisotropic_norm, counterexample_sequence, gamma_integral, higher_integrability_experiment, CounterexampleSequence,
    HigherIntegrabilityOptions,
};
pub use quad::{integrate, integrate_box, Quad, QuadOptions};
pub use report::{ExperimentKind, ExperimentReport, FitReport, ReportRow, Verdict};
pub use sequence::{det_concentration_sequence, AnalyticSequence, SequenceKind};
pub use weak::{default_test_functions, richardson, weak_continuity_experiment, TestFunction, WeakOptions};

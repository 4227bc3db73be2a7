//! Lipschitz-classification invariants of Bedford–McMullen carpets.
//!
//! [`carpet`] holds the exact data model, [`geometry`] the symbolic pieces,
//! [`measure`] the exact measure calculus and `p`-adic tools, [`spectrum`] the
//! multifractal spectrum and dimensions, and [`classify`] the pairwise
//! invariant battery.

pub mod carpet;
pub mod classify;
pub mod geometry;
pub mod interval;
pub mod measure;
pub mod rational;
pub mod real;
pub mod spectrum;

pub use carpet::{
    parse_spec, profile, sigma_classify, Carpet, CarpetProfile, CarpetSpec, Certification, Digit,
    Expansion, RawCarpet, SigmaClass, SpecError,
};
pub use geometry::{
    ApproximateSquare, BasicRectangle, ComponentPartition, GeometryError, PieceKind, SymbolWord,
    DEFAULT_BUDGET,
};
pub use interval::Interval;
pub use rational::ExactRational;
pub use real::{Real, DEFAULT_PRECISION_BITS};
pub use classify::{
    class_membership, compare, permutation_equal, ClassFlags, CompareConfig, InvariantEntry,
    InvariantKind, InvariantReport, Outcome, Verdict,
};
pub use measure::{Color, MeasureError};
pub use spectrum::{
    spectra_equal, BetaModel, Certificate, Dimensions, SpectrumCurve, SpectrumError,
    SpectrumVerdict, TriVerdict,
};

//! Self-similar group actions on infinite words.
//!
//! Groups are given by wreath recursion ([`GroupSpec`]) and elements by words
//! over generators ([`GroupWord`]). The crate computes sections and the word
//! problem ([`closure`]), exact Bernoulli measures of fixed-point sets
//! ([`measure`]), nuclei of contracting actions ([`contracting`]), the KMS
//! functional on the Cuntz-Pimsner *-algebra ([`algebra`]) and the resulting
//! factor-type conclusions ([`report`]).

pub mod action;
pub mod algebra;
pub mod closure;
pub mod contracting;
mod error;
pub mod linalg;
pub mod measure;
pub mod report;
pub mod spec;
pub mod word;

pub use action::{act_letter, act_periodic, act_word, PeriodicWord};
pub use algebra::{AlgebraElement, Monomial, StarAlgebra, Term};
pub use closure::{
    element_key, equal, is_identity, section_closure, ElementKey, Limits, SectionClosure, Verdict,
};
pub use contracting::{
    afd_hypothesis_check, compute_nucleus, y_measure, AfdCheck, Inconclusive, Nucleus,
    NucleusElement,
};
pub use error::{Error, Result};
pub use measure::{
    count_fixed, count_fixed_nontrivial, count_nontrivial_sections, exact_fixed_measure,
    fixed_measure, generic_defect, genericity_classify, pre_kms_check, DefectEvidence, Genericity,
    GenericityReport, MeasureMethod, MeasureReport, Rational, TaintedCount,
};
pub use report::{build_report, Conclusion, Hypothesis, HypothesisStatus, Report};
pub use spec::GroupSpec;
pub use word::{GroupWord, Letter, Symbol};

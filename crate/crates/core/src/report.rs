//! Factor-type conclusions for the von Neumann algebra of the KMS state,
//! together with the hypotheses that license them.

use num_traits::{One, Zero};

use crate::contracting::{afd_hypothesis_check, compute_nucleus, y_measure};
use crate::measure::rational;
use crate::{
    fixed_measure, genericity_classify, AfdCheck, Genericity, GenericityReport, GroupSpec,
    GroupWord, Inconclusive, Limits, MeasureReport, Nucleus, Rational, Result,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisStatus {
    /// Machine-checked for every group element.
    Verified,
    /// Machine-checked only on the listed tested elements.
    VerifiedOnTestedSet,
    /// Asserted by the user and not checked.
    Declared,
    NotEstablished,
}

impl HypothesisStatus {
    pub fn label(self) -> &'static str {
        match self {
            HypothesisStatus::Verified => "verified",
            HypothesisStatus::VerifiedOnTestedSet => "verified on tested set",
            HypothesisStatus::Declared => "declared",
            HypothesisStatus::NotEstablished => "not established",
        }
    }

    fn holds(self) -> bool {
        self != HypothesisStatus::NotEstablished
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    pub statement: String,
    pub status: HypothesisStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    /// AFD factor of type III_λ.
    AfdTypeIII,
    /// Factor of type III_λ, hyperfiniteness not established.
    TypeIII,
    None,
}

impl Conclusion {
    pub fn label(self) -> &'static str {
        match self {
            Conclusion::AfdTypeIII => "AFD-III",
            Conclusion::TypeIII => "III-only",
            Conclusion::None => "None",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub group: String,
    pub digest: String,
    pub alphabet_size: usize,
    pub fixed_measures: Vec<(GroupWord, MeasureReport)>,
    pub genericity: GenericityReport,
    pub nucleus: std::result::Result<Nucleus, Inconclusive>,
    pub afd: Option<AfdCheck>,
    /// `μ(⋃_n Y_g^n)` for the nucleus elements, or the generators when no
    /// nucleus was found.
    pub y_measures: Vec<(GroupWord, MeasureReport)>,
    pub amenable: bool,
    pub conclusion: Conclusion,
    /// The implications used to reach the conclusion.
    pub licenses: Vec<String>,
    pub hypotheses: Vec<Hypothesis>,
}

impl Report {
    /// `λ = |X|^{-1}`.
    pub fn lambda(&self) -> Rational {
        rational(1, self.alphabet_size as u64)
    }

    /// The inverse temperature `β = log|X|`.
    pub fn beta(&self) -> String {
        format!("log {}", self.alphabet_size)
    }

    /// `AFD-III_{1/2}` style summary.
    pub fn headline(&self) -> String {
        match self.conclusion {
            Conclusion::AfdTypeIII => format!("AFD-III_{{{}}}", self.lambda()),
            Conclusion::TypeIII => format!("III_{{{}}}", self.lambda()),
            Conclusion::None => "None".to_string(),
        }
    }
}

pub const GENERICITY: &str = "mu(G_gen) = 1";
pub const AMENABLE: &str = "G is amenable";
pub const CONTRACTING: &str = "the action is contracting with a computed nucleus";
pub const TRIVIAL_SECTIONS: &str = "every nucleus element g has u with h(g, u) = e";
pub const ESCAPE: &str = "mu(U_n Y_g^n) = 1 for every g";

pub const TYPE_LICENSE: &str = "mu(G_gen) = 1 implies a type III_lambda factor";
pub const AMENABLE_LICENSE: &str =
    "mu(G_gen) = 1 and amenability of G imply an AFD type III_lambda factor";
pub const ESCAPE_LICENSE: &str =
    "mu(U_n Y_g^n) = 1 for every g implies an AFD type III_lambda factor";
pub const NUCLEUS_LICENSE: &str =
    "a contracting action whose nucleus elements all have a trivial section has mu(U_n Y_g^n) = 1 for every g";

/// Runs every check and derives the strongest licensed conclusion.
pub fn build_report(
    spec: &GroupSpec,
    group: &str,
    amenable: bool,
    limits: &Limits,
) -> Result<Report> {
    let fixed_measures = spec
        .generator_words()
        .into_iter()
        .map(|g| fixed_measure(spec, &g, limits).map(|r| (g, r)))
        .collect::<Result<Vec<_>>>()?;
    let genericity = genericity_classify(spec, limits)?;
    let nucleus = compute_nucleus(spec, limits);
    let afd = nucleus
        .as_ref()
        .ok()
        .map(|n| afd_hypothesis_check(spec, n, limits));
    let y_elements = match &nucleus {
        Ok(n) => n.words(),
        Err(_) => spec.generator_words(),
    };
    let y_measures = y_elements
        .into_iter()
        .map(|g| y_measure(spec, &g, limits).map(|r| (g, r)))
        .collect::<Result<Vec<_>>>()?;

    let generic = match genericity.class {
        Genericity::One if genericity.contracting => HypothesisStatus::Verified,
        Genericity::One => HypothesisStatus::VerifiedOnTestedSet,
        _ => HypothesisStatus::NotEstablished,
    };
    let amenability = if amenable {
        HypothesisStatus::Declared
    } else {
        HypothesisStatus::NotEstablished
    };
    let contracting = if nucleus.is_ok() {
        HypothesisStatus::Verified
    } else {
        HypothesisStatus::NotEstablished
    };
    let sections = match &afd {
        Some(a) if a.holds() => HypothesisStatus::Verified,
        _ => HypothesisStatus::NotEstablished,
    };
    let y_one = y_measures
        .iter()
        .all(|(_, r)| r.exact.as_ref().is_some_and(One::is_one));
    // The nucleus route proves the escape hypothesis for all of G; the exact
    // y-measures on the nucleus must agree with it.
    let escape = if contracting.holds() && sections.holds() && y_one {
        HypothesisStatus::Verified
    } else {
        HypothesisStatus::NotEstablished
    };

    let mut licenses = Vec::new();
    let conclusion = if escape.holds() {
        licenses.push(NUCLEUS_LICENSE.to_string());
        licenses.push(ESCAPE_LICENSE.to_string());
        if generic.holds() && amenability.holds() {
            licenses.push(AMENABLE_LICENSE.to_string());
        }
        Conclusion::AfdTypeIII
    } else if generic.holds() && amenability.holds() {
        licenses.push(AMENABLE_LICENSE.to_string());
        Conclusion::AfdTypeIII
    } else if generic.holds() {
        licenses.push(TYPE_LICENSE.to_string());
        Conclusion::TypeIII
    } else {
        Conclusion::None
    };

    let hypotheses = [
        (GENERICITY, generic),
        (AMENABLE, amenability),
        (CONTRACTING, contracting),
        (TRIVIAL_SECTIONS, sections),
        (ESCAPE, escape),
    ]
    .into_iter()
    .map(|(s, status)| Hypothesis {
        statement: s.to_string(),
        status,
    })
    .collect();

    Ok(Report {
        group: group.to_string(),
        digest: spec.digest(),
        alphabet_size: spec.alphabet_size(),
        fixed_measures,
        genericity,
        nucleus,
        afd,
        y_measures,
        amenable,
        conclusion,
        licenses,
        hypotheses,
    })
}

/// Whether every tested element has zero genericity defect.
pub fn defects_vanish(report: &GenericityReport) -> bool {
    report
        .tested
        .iter()
        .all(|t| t.exact.as_ref().is_some_and(Zero::is_zero))
}

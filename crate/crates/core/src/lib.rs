//! Core engine for bilateral natural deduction.
//!
//! Formulas are signed: `+` marks assertion, `-` denial. A connective is
//! governed by four rule families (assertive/rejective x intro/elim), each
//! of one of two shapes: conjunction-style rules of type 1 and
//! disjunction-style rules of type 2. This crate provides
//!
//! * the schema language and its s-expression DSL ([`syntax`], [`parser`],
//!   [`printer`]),
//! * canonicalization and family equality up to metavariable renaming
//!   ([`canon`]),
//! * classification of rules into the two types and the intra-polarity
//!   inversion transforms ([`inversion`]),
//! * the cross-polarity conversion transforms, the completion procedure
//!   that derives all four families from any one, and the harmony check
//!   ([`conversion`]),
//! * a checker for concrete derivations with discharge labels and the
//!   co-ordination rule ([`kernel`]),
//! * the built-in connective library including the pathological
//!   connectives tonk, conk and honk ([`library`]),
//! * a depth-bounded search used to produce and audit collapse fixtures
//!   ([`search`]).

pub mod canon;
pub mod conversion;
pub mod inversion;
pub mod kernel;
pub mod library;
pub mod parser;
pub mod printer;
pub mod search;
pub mod sexpr;
pub mod syntax;

pub use canon::{canonicalize, family_equal};
pub use conversion::{
    check_harmony, check_restriction, complete, convert_type1_elim, convert_type2_intro,
    FamilyDescriptor, HarmonyReport, Verdict, Violation,
};
pub use inversion::{
    classify, classify_family, invert_type1_elims, invert_type1_intro, invert_type2_elim,
    invert_type2_intros, ClassificationResult,
};
pub use kernel::{check_derivation, open_assumptions, parse_derivation, CheckOutcome, Derivation};
pub use parser::{parse_specs, ParseError};
pub use syntax::{
    ConnectiveSpec, FamilyKey, Formula, Polarity, Premise, Role, RuleSchema, RuleType, SchemaEnd,
    Sign, SignedFormula,
};

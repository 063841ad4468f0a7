//! Rule classification and inversion.
//!
//! Inversion relates the two families of one polarity: from a type-1
//! introduction the elimination rules are read off premise by premise, and
//! conversely; from a type-2 elimination the introduction rules are read
//! off side deduction by side deduction, and conversely. Signs are carried
//! over unchanged in both directions.
//!
//! Whether a family is of type 1 or type 2 is a property of the family as
//! a whole: a rule fits a type exactly when its family arises under the
//! corresponding inversion map from a well-formed, restriction-respecting
//! partner. Some families fit both shapes; those must carry an explicit
//! type annotation.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::canon::canonicalize;
use crate::conversion::{rule_restriction, Violation};
use crate::syntax::{
    ConnectiveSpec, FamilyKey, Premise, Role, RuleSchema, SchemaEnd, SignedFormula,
};

pub use crate::syntax::RuleType;

/// Outcome of classifying a rule or family against the two types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassificationResult {
    Definitely(RuleType),
    /// Fits both type shapes; a declared type is required to disambiguate.
    Ambiguous,
    IllFormed(String),
}

impl ClassificationResult {
    pub fn is_definitely(&self, t: RuleType) -> bool {
        matches!(self, ClassificationResult::Definitely(x) if *x == t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum FitError {
    Shape(String),
    Restriction(Violation),
}

impl FitError {
    pub(crate) fn message(&self) -> String {
        match self {
            FitError::Shape(s) => s.clone(),
            FitError::Restriction(v) => v.to_string(),
        }
    }
}

fn var_of(sf: &SignedFormula, what: &str) -> Result<String, FitError> {
    sf.formula
        .as_var()
        .map(str::to_string)
        .ok_or_else(|| FitError::Shape(format!("{what} must be a signed metavariable")))
}

/// Check that `vars` lists every declared argument variable exactly once.
fn all_and_only(vars: &[String], spec: &ConnectiveSpec, what: &str) -> Result<(), FitError> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in vars {
        if !spec.arg_vars.iter().any(|a| a == v) {
            return Err(FitError::Shape(format!("undeclared metavariable `{v}`")));
        }
        *counts.entry(v.as_str()).or_insert(0) += 1;
    }
    for a in &spec.arg_vars {
        match counts.get(a.as_str()).copied().unwrap_or(0) {
            0 => {
                return Err(FitError::Shape(format!(
                    "metavariable {a} unhoused by {what}"
                )))
            }
            1 => {}
            _ => {
                return Err(FitError::Shape(format!(
                    "metavariable {a} housed more than once by {what}"
                )))
            }
        }
    }
    Ok(())
}

fn check_governed(
    found: Option<&SignedFormula>,
    key: FamilyKey,
    spec: &ConnectiveSpec,
    what: &str,
) -> Result<(), FitError> {
    let expected = spec.governed_signed(key.polarity);
    match found {
        Some(sf) if *sf == expected => Ok(()),
        _ => Err(FitError::Shape(format!(
            "{what} is not `{}`",
            expected.sexpr()
        ))),
    }
}

/// Does `rules` form a well-formed family of the given type? Rules are
/// canonicalized first, so statement order and variable names are
/// immaterial. The per-rule discharge/premise restrictions are part of the
/// fit.
pub(crate) fn family_fit(
    rules: &[RuleSchema],
    key: FamilyKey,
    t: RuleType,
    spec: &ConnectiveSpec,
) -> Result<(), FitError> {
    let canon: Vec<RuleSchema> = rules.iter().map(|r| canonicalize(r, spec)).collect();
    for r in &canon {
        if r.role != key.role {
            return Err(FitError::Shape(format!(
                "rule role `{}` does not match family `{}`",
                r.role, key
            )));
        }
    }
    match (key.role, t) {
        (Role::Intro, RuleType::Type1) => {
            if canon.len() != 1 {
                return Err(FitError::Shape(format!(
                    "a type-1 introduction family must contain exactly one rule, found {}",
                    canon.len()
                )));
            }
            let r = &canon[0];
            check_governed(r.conclusion.as_formula(), key, spec, "conclusion")?;
            let mut housed = Vec::new();
            for p in &r.premises {
                match p {
                    Premise::Plain(sf) => housed.push(var_of(sf, "premise")?),
                    Premise::Side { discharged, end } => {
                        let end_sf = end.as_formula().ok_or_else(|| {
                            FitError::Shape(
                                "side deductions of an introduction rule cannot end in the arbitrary mark"
                                    .to_string(),
                            )
                        })?;
                        housed.push(var_of(end_sf, "side-deduction end")?);
                        for d in discharged {
                            housed.push(var_of(d, "discharged hypothesis")?);
                        }
                    }
                }
            }
            all_and_only(&housed, spec, "premises")?;
            rule_restriction(r, RuleType::Type1).map_err(FitError::Restriction)
        }
        (Role::Intro, RuleType::Type2) => {
            let mut housed = Vec::new();
            for r in &canon {
                check_governed(r.conclusion.as_formula(), key, spec, "conclusion")?;
                if r.premises.is_empty() {
                    return Err(FitError::Shape(
                        "a type-2 introduction must have at least one premise".to_string(),
                    ));
                }
                for p in &r.premises {
                    match p {
                        Premise::Plain(sf) => housed.push(var_of(sf, "premise")?),
                        Premise::Side { .. } => {
                            return Err(FitError::Shape(
                                "type-2 introductions take plain premises only".to_string(),
                            ))
                        }
                    }
                }
                rule_restriction(r, RuleType::Type2).map_err(FitError::Restriction)?;
            }
            all_and_only(&housed, spec, "premises")
        }
        (Role::Elim, RuleType::Type1) => {
            let mut housed = Vec::new();
            for r in &canon {
                check_governed(r.major.as_ref(), key, spec, "major premise")?;
                let concl = r.conclusion.as_formula().ok_or_else(|| {
                    FitError::Shape(
                        "a type-1 elimination concludes a definite signed formula".to_string(),
                    )
                })?;
                housed.push(var_of(concl, "conclusion")?);
                for p in &r.premises {
                    match p {
                        Premise::Plain(sf) => housed.push(var_of(sf, "minor premise")?),
                        Premise::Side { .. } => {
                            return Err(FitError::Shape(
                                "type-1 eliminations take plain minor premises only".to_string(),
                            ))
                        }
                    }
                }
                rule_restriction(r, RuleType::Type1).map_err(FitError::Restriction)?;
            }
            all_and_only(&housed, spec, "the elimination family")
        }
        (Role::Elim, RuleType::Type2) => {
            if canon.len() != 1 {
                return Err(FitError::Shape(format!(
                    "a type-2 elimination family must contain exactly one rule, found {}",
                    canon.len()
                )));
            }
            let r = &canon[0];
            check_governed(r.major.as_ref(), key, spec, "major premise")?;
            if !r.conclusion.is_arbitrary() {
                return Err(FitError::Shape(
                    "a type-2 elimination concludes the arbitrary mark".to_string(),
                ));
            }
            let mut housed = Vec::new();
            for p in &r.premises {
                match p {
                    Premise::Side { discharged, end } => {
                        if !end.is_arbitrary() {
                            return Err(FitError::Shape(
                                "side deductions of a type-2 elimination end in the arbitrary mark"
                                    .to_string(),
                            ));
                        }
                        if discharged.is_empty() {
                            return Err(FitError::Shape(
                                "side deduction must discharge at least one hypothesis".to_string(),
                            ));
                        }
                        for d in discharged {
                            housed.push(var_of(d, "discharged hypothesis")?);
                        }
                    }
                    Premise::Plain(_) => {
                        return Err(FitError::Shape(
                            "type-2 eliminations take side deductions only".to_string(),
                        ))
                    }
                }
            }
            all_and_only(&housed, spec, "the discharged hypotheses")?;
            rule_restriction(r, RuleType::Type2).map_err(FitError::Restriction)
        }
    }
}

/// Classify a whole family. Empty families are typed by convention (an
/// empty intro family pairs with a type-2 elimination, an empty elim family
/// with a type-1 introduction); nonempty families are matched against both
/// type shapes.
pub fn classify_family(
    rules: &[RuleSchema],
    key: FamilyKey,
    spec: &ConnectiveSpec,
) -> ClassificationResult {
    if rules.is_empty() {
        return ClassificationResult::Definitely(match key.role {
            Role::Intro => RuleType::Type2,
            Role::Elim => RuleType::Type1,
        });
    }

    let mut declared: Option<RuleType> = None;
    for r in rules {
        match (declared, r.declared_type) {
            (_, None) => {}
            (None, Some(t)) => declared = Some(t),
            (Some(a), Some(b)) if a == b => {}
            (Some(_), Some(_)) => {
                return ClassificationResult::IllFormed(
                    "conflicting type annotations within one family".to_string(),
                )
            }
        }
    }

    let fit1 = family_fit(rules, key, RuleType::Type1, spec);
    let fit2 = family_fit(rules, key, RuleType::Type2, spec);
    match declared {
        Some(t) => {
            let fit = if t == RuleType::Type1 { &fit1 } else { &fit2 };
            match fit {
                Ok(()) => ClassificationResult::Definitely(t),
                Err(e) => ClassificationResult::IllFormed(format!(
                    "declared {t} but the family does not fit: {}",
                    e.message()
                )),
            }
        }
        None => match (fit1, fit2) {
            (Ok(()), Ok(())) => ClassificationResult::Ambiguous,
            (Ok(()), Err(_)) => ClassificationResult::Definitely(RuleType::Type1),
            (Err(_), Ok(())) => ClassificationResult::Definitely(RuleType::Type2),
            (Err(e1), Err(e2)) => {
                // Report the failure of the type whose surface the family
                // most resembles.
                let looks_type2 = rules.iter().any(|r| r.conclusion.is_arbitrary());
                let msg = if key.role == Role::Elim && looks_type2 {
                    e2.message()
                } else {
                    e1.message()
                };
                ClassificationResult::IllFormed(msg)
            }
        },
    }
}

/// Classify one rule in the context of its home family within `spec`. A
/// rule that is not part of `spec` is classified as a singleton family.
pub fn classify(rule: &RuleSchema, spec: &ConnectiveSpec) -> ClassificationResult {
    let Some(polarity) = rule.polarity() else {
        return ClassificationResult::IllFormed("rule has no governed signed formula".to_string());
    };
    let key = FamilyKey::new(polarity, rule.role);
    let family = spec.family(key);
    let canon = canonicalize(rule, spec);
    if family.iter().any(|r| canonicalize(r, spec) == canon) {
        classify_family(family, key, spec)
    } else {
        classify_family(std::slice::from_ref(rule), key, spec)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InversionError {
    #[error("wrong rule type: {0}")]
    WrongType(String),
    #[error("mismatched majors: expected {expected}, found {found}")]
    MismatchedMajors { expected: String, found: String },
    #[error("mismatched conclusions: expected {expected}, found {found}")]
    MismatchedConclusions { expected: String, found: String },
    #[error("wrong shape: {0}")]
    WrongShape(String),
}

fn sign_char(sf: &SignedFormula) -> char {
    match sf.sign {
        crate::syntax::Sign::Plus => '+',
        crate::syntax::Sign::Minus => '-',
    }
}

fn named(mut rule: RuleSchema, spec: &ConnectiveSpec, index: Option<usize>) -> RuleSchema {
    let governed = rule.governed().cloned();
    if let Some(g) = governed {
        let role = match rule.role {
            Role::Intro => 'I',
            Role::Elim => 'E',
        };
        rule.name = match index {
            Some(i) => format!("{}{}{}{}", sign_char(&g), spec.name, role, i + 1),
            None => format!("{}{}{}", sign_char(&g), spec.name, role),
        };
    }
    rule
}

/// From a type-1 introduction, one elimination per premise: the premise
/// becomes the conclusion, its discharged hypotheses become minor premises,
/// and the introduction's conclusion becomes the major premise.
pub fn invert_type1_intro(
    intro: &RuleSchema,
    spec: &ConnectiveSpec,
) -> Result<Vec<RuleSchema>, InversionError> {
    if intro.declared_type == Some(RuleType::Type2) {
        return Err(InversionError::WrongType(
            "rule is declared type 2".to_string(),
        ));
    }
    let polarity = intro
        .polarity()
        .ok_or_else(|| InversionError::WrongShape("introduction has no conclusion".to_string()))?;
    let key = FamilyKey::new(polarity, Role::Intro);
    family_fit(std::slice::from_ref(intro), key, RuleType::Type1, spec)
        .map_err(|e| InversionError::WrongType(e.message()))?;

    let canon = canonicalize(intro, spec);
    let major = canon
        .conclusion
        .as_formula()
        .expect("type-1 intro concludes a formula")
        .clone();
    let many = canon.premises.len() > 1;
    let elims = canon
        .premises
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (minors, end) = match p {
                Premise::Plain(sf) => (Vec::new(), sf.clone()),
                Premise::Side { discharged, end } => (
                    discharged.clone(),
                    end.as_formula().expect("checked by fit").clone(),
                ),
            };
            let raw = RuleSchema {
                name: String::new(),
                role: Role::Elim,
                major: Some(major.clone()),
                premises: minors.into_iter().map(Premise::Plain).collect(),
                conclusion: SchemaEnd::Formula(end),
                declared_type: None,
            };
            named(canonicalize(&raw, spec), spec, many.then_some(i))
        })
        .collect();
    Ok(elims)
}

/// From the elimination rules of a type-1 pair, the unique introduction
/// making the premise-by-premise correspondence round-trip: eliminations
/// without minor premises contribute plain premises, the others side
/// deductions discharging their minors.
pub fn invert_type1_elims(
    major: &SignedFormula,
    elims: &[RuleSchema],
    spec: &ConnectiveSpec,
) -> Result<RuleSchema, InversionError> {
    let mut premises = Vec::new();
    for e in elims {
        let canon = canonicalize(e, spec);
        if canon.role != Role::Elim {
            return Err(InversionError::WrongShape(format!(
                "`{}` is not an elimination rule",
                e.name
            )));
        }
        match &canon.major {
            Some(m) if m == major => {}
            other => {
                return Err(InversionError::MismatchedMajors {
                    expected: major.sexpr(),
                    found: other.as_ref().map(|m| m.sexpr()).unwrap_or_default(),
                })
            }
        }
        let end = canon.conclusion.as_formula().ok_or_else(|| {
            InversionError::WrongShape(
                "elimination concluding the arbitrary mark is not of type 1".to_string(),
            )
        })?;
        let mut minors = Vec::new();
        for p in &canon.premises {
            match p {
                Premise::Plain(sf) if sf.formula.as_var().is_some() => minors.push(sf.clone()),
                _ => {
                    return Err(InversionError::WrongShape(
                        "minor premises must be plain signed metavariables".to_string(),
                    ))
                }
            }
        }
        premises.push(if minors.is_empty() {
            Premise::Plain(end.clone())
        } else {
            Premise::Side {
                discharged: minors,
                end: SchemaEnd::Formula(end.clone()),
            }
        });
    }
    let raw = RuleSchema {
        name: String::new(),
        role: Role::Intro,
        major: None,
        premises,
        conclusion: SchemaEnd::Formula(major.clone()),
        declared_type: None,
    };
    Ok(named(canonicalize(&raw, spec), spec, None))
}

/// From a type-2 elimination, one introduction per side deduction, with the
/// discharged hypotheses as premises and the major premise as conclusion.
pub fn invert_type2_elim(
    elim: &RuleSchema,
    spec: &ConnectiveSpec,
) -> Result<Vec<RuleSchema>, InversionError> {
    if elim.declared_type == Some(RuleType::Type1) {
        return Err(InversionError::WrongType(
            "rule is declared type 1".to_string(),
        ));
    }
    let polarity = elim.polarity().ok_or_else(|| {
        InversionError::WrongShape("elimination has no major premise".to_string())
    })?;
    let key = FamilyKey::new(polarity, Role::Elim);
    family_fit(std::slice::from_ref(elim), key, RuleType::Type2, spec)
        .map_err(|e| InversionError::WrongType(e.message()))?;

    let canon = canonicalize(elim, spec);
    let conclusion = canon.major.clone().expect("type-2 elim has a major");
    let many = canon.premises.len() > 1;
    let intros = canon
        .premises
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let Premise::Side { discharged, .. } = p else {
                unreachable!("checked by fit");
            };
            let raw = RuleSchema {
                name: String::new(),
                role: Role::Intro,
                major: None,
                premises: discharged.iter().cloned().map(Premise::Plain).collect(),
                conclusion: SchemaEnd::Formula(conclusion.clone()),
                declared_type: None,
            };
            named(canonicalize(&raw, spec), spec, many.then_some(i))
        })
        .collect();
    Ok(intros)
}

/// From the introduction rules of a type-2 pair, the unique elimination:
/// one side deduction per introduction, discharging that introduction's
/// premises and ending in the arbitrary mark.
pub fn invert_type2_intros(
    major: &SignedFormula,
    intros: &[RuleSchema],
    spec: &ConnectiveSpec,
) -> Result<RuleSchema, InversionError> {
    let mut premises = Vec::new();
    for r in intros {
        let canon = canonicalize(r, spec);
        if canon.role != Role::Intro {
            return Err(InversionError::WrongShape(format!(
                "`{}` is not an introduction rule",
                r.name
            )));
        }
        match canon.conclusion.as_formula() {
            Some(c) if c == major => {}
            other => {
                return Err(InversionError::MismatchedConclusions {
                    expected: major.sexpr(),
                    found: other.map(|c| c.sexpr()).unwrap_or_default(),
                })
            }
        }
        let mut discharged = Vec::new();
        for p in &canon.premises {
            match p {
                Premise::Plain(sf) if sf.formula.as_var().is_some() => discharged.push(sf.clone()),
                _ => {
                    return Err(InversionError::WrongShape(
                        "premises must be plain signed metavariables".to_string(),
                    ))
                }
            }
        }
        if discharged.is_empty() {
            return Err(InversionError::WrongShape(
                "an introduction without premises yields a side deduction discharging nothing"
                    .to_string(),
            ));
        }
        premises.push(Premise::Side {
            discharged,
            end: SchemaEnd::Arbitrary,
        });
    }
    let raw = RuleSchema {
        name: String::new(),
        role: Role::Elim,
        major: Some(major.clone()),
        premises,
        conclusion: SchemaEnd::Arbitrary,
        declared_type: None,
    };
    Ok(named(canonicalize(&raw, spec), spec, None))
}

//! Conversion and harmony.
//!
//! Conversion relates rules across polarities: reading a rule bottom up
//! gives the grounds or consequences of the conjugate formula. Process 1
//! turns a type-1 elimination into a type-2 introduction for the conjugate
//! (major and conclusion swap roles with their signs reversed, minor
//! premises are kept); process 2 is its converse. Together with inversion
//! this determines the remaining three rule families of a connective from
//! any given one, and a connective is harmonious exactly when its declared
//! families agree with every such completion.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::canon::{canonical_family, family_equal};
use crate::inversion::{
    classify_family, family_fit, invert_type1_elims, invert_type1_intro, invert_type2_elim,
    invert_type2_intros, ClassificationResult, FitError,
};
use crate::syntax::{
    ConnectiveSpec, FamilyKey, Polarity, Premise, Role, RuleSchema, RuleType, SchemaEnd, Sign,
    SignedFormula,
};

/// Identifies one of the four discharge/premise restrictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RestrictionCode {
    /// Type-1 intro: a side deduction discharging more than one assumption
    /// has exactly one with the sign of the conclusion.
    Intro1,
    /// Type-2 intro: a rule with more than one premise has exactly one with
    /// the sign of the conclusion.
    Intro2,
    /// Type-1 elim: a rule with more than one minor premise has exactly one
    /// with the sign of the major premise.
    Elim1,
    /// Type-2 elim: a side deduction discharging more than one assumption
    /// has exactly one with the sign of the major premise.
    Elim2,
}

impl fmt::Display for RestrictionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RestrictionCode::Intro1 => "1.i",
            RestrictionCode::Intro2 => "2.i",
            RestrictionCode::Elim1 => "1.e",
            RestrictionCode::Elim2 => "2.e",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("restriction {code} violated: {location}")]
pub struct Violation {
    pub code: RestrictionCode,
    pub location: String,
}

/// Full family coordinates: polarity, role and rule type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyDescriptor {
    pub polarity: Polarity,
    pub role: Role,
    pub rule_type: RuleType,
}

impl FamilyDescriptor {
    pub fn new(polarity: Polarity, role: Role, rule_type: RuleType) -> FamilyDescriptor {
        FamilyDescriptor {
            polarity,
            role,
            rule_type,
        }
    }

    pub fn key(&self) -> FamilyKey {
        FamilyKey::new(self.polarity, self.role)
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.key(), self.rule_type)
    }
}

fn count_with_sign(items: &[SignedFormula], sign: Sign) -> usize {
    items.iter().filter(|sf| sf.sign == sign).count()
}

/// The restriction applicable to a rule read at the given type. Rules whose
/// quantified condition does not trigger pass vacuously.
pub(crate) fn rule_restriction(rule: &RuleSchema, t: RuleType) -> Result<(), Violation> {
    match (t, rule.role) {
        (RuleType::Type1, Role::Intro) => {
            let Some(conclusion) = rule.conclusion.as_formula() else {
                return Ok(());
            };
            for (i, p) in rule.premises.iter().enumerate() {
                if let Premise::Side { discharged, .. } = p {
                    if discharged.len() > 1 && count_with_sign(discharged, conclusion.sign) != 1 {
                        return Err(Violation {
                            code: RestrictionCode::Intro1,
                            location: format!(
                                "side deduction {} discharges {} assumptions but {} share the conclusion's sign",
                                i + 1,
                                discharged.len(),
                                count_with_sign(discharged, conclusion.sign)
                            ),
                        });
                    }
                }
            }
            Ok(())
        }
        (RuleType::Type2, Role::Intro) => {
            let Some(conclusion) = rule.conclusion.as_formula() else {
                return Ok(());
            };
            let plain: Vec<SignedFormula> = rule
                .premises
                .iter()
                .filter_map(|p| match p {
                    Premise::Plain(sf) => Some(sf.clone()),
                    Premise::Side { .. } => None,
                })
                .collect();
            if plain.len() > 1 && count_with_sign(&plain, conclusion.sign) != 1 {
                return Err(Violation {
                    code: RestrictionCode::Intro2,
                    location: format!(
                        "{} premises but {} share the conclusion's sign",
                        plain.len(),
                        count_with_sign(&plain, conclusion.sign)
                    ),
                });
            }
            Ok(())
        }
        (RuleType::Type1, Role::Elim) => {
            let Some(major) = &rule.major else {
                return Ok(());
            };
            let minors: Vec<SignedFormula> = rule
                .premises
                .iter()
                .filter_map(|p| match p {
                    Premise::Plain(sf) => Some(sf.clone()),
                    Premise::Side { .. } => None,
                })
                .collect();
            if minors.len() > 1 && count_with_sign(&minors, major.sign) != 1 {
                return Err(Violation {
                    code: RestrictionCode::Elim1,
                    location: format!(
                        "{} minor premises but {} share the major premise's sign",
                        minors.len(),
                        count_with_sign(&minors, major.sign)
                    ),
                });
            }
            Ok(())
        }
        (RuleType::Type2, Role::Elim) => {
            let Some(major) = &rule.major else {
                return Ok(());
            };
            for (i, p) in rule.premises.iter().enumerate() {
                if let Premise::Side { discharged, .. } = p {
                    if discharged.len() > 1 && count_with_sign(discharged, major.sign) != 1 {
                        return Err(Violation {
                            code: RestrictionCode::Elim2,
                            location: format!(
                                "side deduction {} discharges {} assumptions but {} share the major premise's sign",
                                i + 1,
                                discharged.len(),
                                count_with_sign(discharged, major.sign)
                            ),
                        });
                    }
                }
            }
            Ok(())
        }
    }
}

/// Check the restriction named by the descriptor against a rule.
pub fn check_restriction(rule: &RuleSchema, d: FamilyDescriptor) -> Result<(), Violation> {
    rule_restriction(rule, d.rule_type)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConversionError {
    #[error("wrong rule type: {0}")]
    WrongType(String),
    #[error(transparent)]
    Restriction(#[from] Violation),
}

fn type1_elim_rule_shape(rule: &RuleSchema, spec: &ConnectiveSpec) -> Result<(), String> {
    if rule.role != Role::Elim {
        return Err("rule is not an elimination".to_string());
    }
    let governed = spec.governed_formula();
    match &rule.major {
        Some(m) if m.formula == governed => {}
        _ => return Err(format!("major premise is not `{}`", governed.sexpr())),
    }
    if rule
        .conclusion
        .as_formula()
        .and_then(|sf| sf.formula.as_var())
        .is_none()
    {
        return Err("conclusion must be a signed metavariable".to_string());
    }
    for p in &rule.premises {
        match p {
            Premise::Plain(sf) if sf.formula.as_var().is_some() => {}
            _ => return Err("minor premises must be plain signed metavariables".to_string()),
        }
    }
    Ok(())
}

fn type2_intro_rule_shape(rule: &RuleSchema, spec: &ConnectiveSpec) -> Result<(), String> {
    if rule.role != Role::Intro {
        return Err("rule is not an introduction".to_string());
    }
    let governed = spec.governed_formula();
    match rule.conclusion.as_formula() {
        Some(c) if c.formula == governed => {}
        _ => return Err(format!("conclusion is not `{}`", governed.sexpr())),
    }
    if rule.premises.is_empty() {
        return Err("a type-2 introduction must have at least one premise".to_string());
    }
    for p in &rule.premises {
        match p {
            Premise::Plain(sf) if sf.formula.as_var().is_some() => {}
            _ => return Err("premises must be plain signed metavariables".to_string()),
        }
    }
    Ok(())
}

/// Process 1: convert a type-1 elimination into a type-2 introduction for
/// the conjugate. The major premise, sign reversed, becomes the conclusion;
/// the conclusion, sign reversed, becomes a premise; minor premises are
/// kept.
pub fn convert_type1_elim(
    rule: &RuleSchema,
    spec: &ConnectiveSpec,
) -> Result<RuleSchema, ConversionError> {
    let canon = crate::canon::canonicalize(rule, spec);
    type1_elim_rule_shape(&canon, spec).map_err(ConversionError::WrongType)?;
    rule_restriction(&canon, RuleType::Type1)?;

    let major = canon.major.as_ref().expect("shape checked");
    let conclusion = canon.conclusion.as_formula().expect("shape checked");
    let mut premises = vec![Premise::Plain(conclusion.conjugate())];
    premises.extend(canon.premises.iter().cloned());
    let raw = RuleSchema {
        name: String::new(),
        role: Role::Intro,
        major: None,
        premises,
        conclusion: SchemaEnd::Formula(major.conjugate()),
        declared_type: None,
    };
    Ok(crate::canon::canonicalize(&raw, spec))
}

/// Process 2: convert a type-2 introduction into a type-1 elimination for
/// the conjugate. The conclusion, sign reversed, becomes the major premise;
/// with several premises the unique one sharing the conclusion's sign
/// becomes, sign reversed, the conclusion and the rest are kept as minors;
/// a single premise becomes the conclusion with its sign reversed.
pub fn convert_type2_intro(
    rule: &RuleSchema,
    spec: &ConnectiveSpec,
) -> Result<RuleSchema, ConversionError> {
    let canon = crate::canon::canonicalize(rule, spec);
    type2_intro_rule_shape(&canon, spec).map_err(ConversionError::WrongType)?;
    rule_restriction(&canon, RuleType::Type2)?;

    let conclusion = canon.conclusion.as_formula().expect("shape checked");
    let premises: Vec<SignedFormula> = canon
        .premises
        .iter()
        .map(|p| match p {
            Premise::Plain(sf) => sf.clone(),
            Premise::Side { .. } => unreachable!("shape checked"),
        })
        .collect();

    let (new_conclusion, minors): (SignedFormula, Vec<SignedFormula>) = if premises.len() == 1 {
        (premises[0].conjugate(), Vec::new())
    } else {
        let chosen = premises
            .iter()
            .position(|sf| sf.sign == conclusion.sign)
            .expect("restriction 2.i guarantees exactly one");
        let mut rest = premises.clone();
        let special = rest.remove(chosen);
        (special.conjugate(), rest)
    };

    let raw = RuleSchema {
        name: String::new(),
        role: Role::Elim,
        major: Some(conclusion.conjugate()),
        premises: minors.into_iter().map(Premise::Plain).collect(),
        conclusion: SchemaEnd::Formula(new_conclusion),
        declared_type: None,
    };
    Ok(crate::canon::canonicalize(&raw, spec))
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CompletionError {
    #[error("wrong rule type for {family}: {reason}")]
    WrongType { family: String, reason: String },
    #[error(transparent)]
    Restriction(#[from] Violation),
    #[error("ill-formed input family: {0}")]
    IllFormed(String),
}

impl From<ConversionError> for CompletionError {
    fn from(e: ConversionError) -> CompletionError {
        match e {
            ConversionError::WrongType(s) => CompletionError::IllFormed(s),
            ConversionError::Restriction(v) => CompletionError::Restriction(v),
        }
    }
}

fn rename_family(
    rules: Vec<RuleSchema>,
    spec: &ConnectiveSpec,
    declared: RuleType,
) -> Vec<RuleSchema> {
    let many = rules.len() > 1;
    rules
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            let sign = r
                .governed()
                .map(|g| match g.sign {
                    Sign::Plus => '+',
                    Sign::Minus => '-',
                })
                .unwrap_or('?');
            let role = match r.role {
                Role::Intro => 'I',
                Role::Elim => 'E',
            };
            r.name = if many {
                format!("{}{}{}{}", sign, spec.name, role, i + 1)
            } else {
                format!("{}{}{}", sign, spec.name, role)
            };
            r.declared_type = Some(declared);
            r
        })
        .collect()
}

/// Derive the full four-family specification of a connective from one given
/// family: the same-polarity partner by inversion, the opposite-polarity
/// families by conversion followed by inversion. Empty families propagate,
/// which is what yields the two-rule specifications of the limiting
/// constants.
pub fn complete(
    name: &str,
    arity: usize,
    d: FamilyDescriptor,
    rules: &[RuleSchema],
) -> Result<ConnectiveSpec, CompletionError> {
    let arg_vars = crate::syntax::default_arg_vars(arity);
    let mut spec = ConnectiveSpec::new(name, arity, arg_vars);

    match family_fit(rules, d.key(), d.rule_type, &spec) {
        Ok(()) => {}
        Err(FitError::Restriction(v)) => return Err(CompletionError::Restriction(v)),
        Err(FitError::Shape(reason)) => {
            // Distinguish a family that is well-formed at the opposite type
            // from one that fits neither.
            let other = d.rule_type.opposite();
            return match family_fit(rules, d.key(), other, &spec) {
                Ok(()) => Err(CompletionError::WrongType {
                    family: d.to_string(),
                    reason: format!("family fits {other} instead"),
                }),
                Err(_) => Err(CompletionError::IllFormed(reason)),
            };
        }
    }

    let rules = canonical_family(rules, &spec);
    let p = d.polarity;
    let q = p.opposite();
    let governed_p = spec.governed_signed(p);
    let governed_q = spec.governed_signed(q);
    let lift = |e: crate::inversion::InversionError| CompletionError::IllFormed(e.to_string());

    match d.rule_type {
        RuleType::Type1 => {
            let (intro1, elims1) = match d.role {
                Role::Intro => {
                    let intro = rules[0].clone();
                    let elims = invert_type1_intro(&intro, &spec).map_err(lift)?;
                    (intro, elims)
                }
                Role::Elim => {
                    let intro = invert_type1_elims(&governed_p, &rules, &spec).map_err(lift)?;
                    (intro, rules.clone())
                }
            };
            let mut intros2 = Vec::new();
            for e in &elims1 {
                intros2.push(convert_type1_elim(e, &spec)?);
            }
            let elim2 = invert_type2_intros(&governed_q, &intros2, &spec).map_err(lift)?;
            spec.set_family(
                FamilyKey::new(p, Role::Intro),
                rename_family(vec![intro1], &spec, RuleType::Type1),
            );
            spec.set_family(
                FamilyKey::new(p, Role::Elim),
                rename_family(elims1, &spec, RuleType::Type1),
            );
            spec.set_family(
                FamilyKey::new(q, Role::Intro),
                rename_family(intros2, &spec, RuleType::Type2),
            );
            spec.set_family(
                FamilyKey::new(q, Role::Elim),
                rename_family(vec![elim2], &spec, RuleType::Type2),
            );
        }
        RuleType::Type2 => {
            let (elim2, intros2) = match d.role {
                Role::Elim => {
                    let elim = rules[0].clone();
                    let intros = invert_type2_elim(&elim, &spec).map_err(lift)?;
                    (elim, intros)
                }
                Role::Intro => {
                    let elim = invert_type2_intros(&governed_p, &rules, &spec).map_err(lift)?;
                    (elim, rules.clone())
                }
            };
            let mut elims1 = Vec::new();
            for i in &intros2 {
                elims1.push(convert_type2_intro(i, &spec)?);
            }
            let intro1 = invert_type1_elims(&governed_q, &elims1, &spec).map_err(lift)?;
            spec.set_family(
                FamilyKey::new(p, Role::Elim),
                rename_family(vec![elim2], &spec, RuleType::Type2),
            );
            spec.set_family(
                FamilyKey::new(p, Role::Intro),
                rename_family(intros2, &spec, RuleType::Type2),
            );
            spec.set_family(
                FamilyKey::new(q, Role::Elim),
                rename_family(elims1, &spec, RuleType::Type1),
            );
            spec.set_family(
                FamilyKey::new(q, Role::Intro),
                rename_family(vec![intro1], &spec, RuleType::Type1),
            );
        }
    }

    // The derived intro of the type-1 pair may be premise-less only at
    // arity 0; anything else means the given family could not determine a
    // well-formed completion.
    for (key, family) in spec.families() {
        let classification = classify_family(family, key, &spec);
        if let ClassificationResult::IllFormed(reason) = classification {
            return Err(CompletionError::IllFormed(format!(
                "derived {key} family is ill-formed: {reason}"
            )));
        }
    }
    Ok(spec)
}

/// Overall harmony verdict for one connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Harmonious,
    InversionViolation,
    ConversionViolation,
    IllFormed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Harmonious => "harmonious",
            Verdict::InversionViolation => "inversion-violation",
            Verdict::ConversionViolation => "conversion-violation",
            Verdict::IllFormed => "ill-formed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyClassificationReport {
    pub family: String,
    /// "type-1", "type-2", "ambiguous" or "ill-formed: ...".
    pub result: String,
    pub empty: bool,
}

/// One comparison between a derived family and the declared one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    /// "inversion" for same-polarity comparisons, "conversion" for
    /// cross-polarity ones.
    pub kind: String,
    /// The family completion started from.
    pub from: String,
    /// The family being compared.
    pub family: String,
    pub pass: bool,
    /// Derived rules (compact rendering).
    pub expected: Vec<String>,
    /// Declared rules (compact rendering).
    pub found: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarmonyReport {
    pub connective: String,
    pub verdict: Verdict,
    pub classifications: Vec<FamilyClassificationReport>,
    pub checks: Vec<CheckReport>,
    /// Present when the verdict is ill-formed.
    pub reason: Option<String>,
}

impl HarmonyReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("connective {}: {}\n", self.connective, self.verdict);
        if let Some(reason) = &self.reason {
            s.push_str(&format!("  reason: {reason}\n"));
        }
        for c in &self.classifications {
            s.push_str(&format!(
                "  {}: {}{}\n",
                c.family,
                c.result,
                if c.empty { " (empty)" } else { "" }
            ));
        }
        for c in &self.checks {
            if c.pass {
                s.push_str(&format!("  {} {} -> {}: ok\n", c.kind, c.from, c.family));
            } else {
                s.push_str(&format!(
                    "  {} {} -> {}: MISMATCH\n    expected: {}\n    found:    {}\n",
                    c.kind,
                    c.from,
                    c.family,
                    if c.expected.is_empty() {
                        "(empty)".to_string()
                    } else {
                        c.expected.join("  ;  ")
                    },
                    if c.found.is_empty() {
                        "(empty)".to_string()
                    } else {
                        c.found.join("  ;  ")
                    },
                ));
            }
        }
        s
    }
}

fn compact_family(rules: &[RuleSchema], spec: &ConnectiveSpec) -> Vec<String> {
    canonical_family(rules, spec)
        .iter()
        .map(|r| r.display_compact())
        .collect()
}

/// Classify every family of `spec`, rerun the completion procedure from
/// each nonempty family, and compare the results with what is declared.
/// Inversion mismatches stay within one polarity, conversion mismatches
/// cross polarities; classification failures dominate both.
pub fn check_harmony(spec: &ConnectiveSpec) -> HarmonyReport {
    let mut classifications = Vec::new();
    let mut class_results: Vec<(FamilyKey, ClassificationResult)> = Vec::new();
    for (key, family) in spec.families() {
        let result = classify_family(family, key, spec);
        class_results.push((key, result));
    }
    // Empty families read their type off a definite nonempty partner.
    let resolved: Vec<(FamilyKey, ClassificationResult)> = class_results
        .iter()
        .map(|(key, result)| {
            if spec.family(*key).is_empty() {
                let partner = FamilyKey::new(
                    key.polarity,
                    match key.role {
                        Role::Intro => Role::Elim,
                        Role::Elim => Role::Intro,
                    },
                );
                if !spec.family(partner).is_empty() {
                    if let Some((_, ClassificationResult::Definitely(t))) =
                        class_results.iter().find(|(k, _)| *k == partner)
                    {
                        return (*key, ClassificationResult::Definitely(*t));
                    }
                }
            }
            (*key, result.clone())
        })
        .collect();

    let mut ill_formed_reason: Option<String> = None;
    for (key, result) in &resolved {
        let text = match result {
            ClassificationResult::Definitely(t) => match t {
                RuleType::Type1 => "type-1".to_string(),
                RuleType::Type2 => "type-2".to_string(),
            },
            ClassificationResult::Ambiguous => "ambiguous".to_string(),
            ClassificationResult::IllFormed(reason) => format!("ill-formed: {reason}"),
        };
        classifications.push(FamilyClassificationReport {
            family: key.label().to_string(),
            result: text,
            empty: spec.family(*key).is_empty(),
        });
        if ill_formed_reason.is_none() {
            match result {
                ClassificationResult::IllFormed(reason) => {
                    ill_formed_reason = Some(format!("{key}: {reason}"));
                }
                ClassificationResult::Ambiguous => {
                    ill_formed_reason = Some(format!(
                        "{key}: fits both types; add a (type 1) or (type 2) annotation"
                    ));
                }
                ClassificationResult::Definitely(_) => {}
            }
        }
    }

    if let Some(reason) = ill_formed_reason {
        return HarmonyReport {
            connective: spec.name.clone(),
            verdict: Verdict::IllFormed,
            classifications,
            checks: Vec::new(),
            reason: Some(reason),
        };
    }

    let type_of = |key: FamilyKey| -> RuleType {
        match resolved.iter().find(|(k, _)| *k == key) {
            Some((_, ClassificationResult::Definitely(t))) => *t,
            _ => unreachable!("ill-formed handled above"),
        }
    };

    let mut checks = Vec::new();
    let mut inversion_failure = false;
    let mut conversion_failure = false;

    for (from_key, family) in spec.families() {
        if family.is_empty() {
            continue;
        }
        let d = FamilyDescriptor::new(from_key.polarity, from_key.role, type_of(from_key));
        match complete(&spec.name, spec.arity, d, family) {
            Ok(completed) => {
                for (target, declared) in spec.families() {
                    if target == from_key {
                        continue;
                    }
                    let derived = completed.family(target);
                    let pass = family_equal(derived, declared, spec);
                    let kind = if target.polarity == from_key.polarity {
                        "inversion"
                    } else {
                        "conversion"
                    };
                    if !pass {
                        if kind == "inversion" {
                            inversion_failure = true;
                        } else {
                            conversion_failure = true;
                        }
                    }
                    checks.push(CheckReport {
                        kind: kind.to_string(),
                        from: from_key.label().to_string(),
                        family: target.label().to_string(),
                        pass,
                        expected: compact_family(derived, spec),
                        found: compact_family(declared, spec),
                    });
                }
            }
            Err(err) => {
                // Completion from a classified family failed outright;
                // charge it to the stage that failed.
                let same_polarity_failure = matches!(&err, CompletionError::IllFormed(_));
                if same_polarity_failure {
                    inversion_failure = true;
                } else {
                    conversion_failure = true;
                }
                checks.push(CheckReport {
                    kind: if same_polarity_failure {
                        "inversion".to_string()
                    } else {
                        "conversion".to_string()
                    },
                    from: from_key.label().to_string(),
                    family: from_key.label().to_string(),
                    pass: false,
                    expected: vec![format!("completion failed: {err}")],
                    found: compact_family(family, spec),
                });
            }
        }
    }

    let verdict = if inversion_failure {
        Verdict::InversionViolation
    } else if conversion_failure {
        Verdict::ConversionViolation
    } else {
        Verdict::Harmonious
    };

    HarmonyReport {
        connective: spec.name.clone(),
        verdict,
        classifications,
        checks,
        reason: None,
    }
}

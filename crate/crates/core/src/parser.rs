//! Parser for the connective-specification DSL.
//!
//! One connective per top-level form:
//!
//! ```text
//! (connective "and" (arity 2) (args A B)
//!   (rule "+andI" (polarity +) (role intro)
//!         (premises (+ A) (+ B)) (conclusion (+ (and A B))))
//!   (rule "-andE" (polarity -) (role elim) (major (- (and A B)))
//!         (premises (side (discharge (- A)) _ANY) (side (discharge (- B)) _ANY))
//!         (conclusion _ANY)))
//! ```
//!
//! `_ANY` is the arbitrary-signed-formula placeholder. An optional
//! `(type 1)` / `(type 2)` clause on a rule records its declared type.
//! Unicode glyphs for the standard connectives are accepted and normalized
//! to their ASCII names.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::sexpr::{read_all, Pos, Sexpr, SexprError};
use crate::syntax::{
    ConnectiveSpec, FamilyKey, Formula, Polarity, Premise, Role, RuleSchema, RuleType, SchemaEnd,
    Sign, SignedFormula,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn at(pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

impl From<SexprError> for ParseError {
    fn from(e: SexprError) -> ParseError {
        ParseError {
            line: e.line,
            col: e.col,
            message: e.message,
        }
    }
}

/// Map Unicode glyphs of the standard connectives to canonical ASCII names.
pub fn normalize_connective_name(name: &str) -> String {
    match name {
        "∧" | "&" => "and".to_string(),
        "∨" => "or".to_string(),
        "⊃" | "→" => "imp".to_string(),
        "¬" => "neg".to_string(),
        "⊥" => "bot".to_string(),
        "⊤" => "top".to_string(),
        _ => name.to_string(),
    }
}

/// Parse a DSL source into fully validated connective specifications.
pub fn parse_specs(text: &str) -> Result<Vec<ConnectiveSpec>, ParseError> {
    let forms = read_all(text)?;
    let mut specs: Vec<ConnectiveSpec> = Vec::new();
    for form in &forms {
        let spec = parse_connective(form)?;
        if specs.iter().any(|s| s.name == spec.name) {
            return Err(ParseError::at(
                form.pos(),
                format!("duplicate connective `{}`", spec.name),
            ));
        }
        specs.push(spec);
    }
    Ok(specs)
}

fn expect_form<'a>(e: &'a Sexpr, head: &str) -> Result<&'a [Sexpr], ParseError> {
    match e.as_form() {
        Some((h, rest)) if h == head => Ok(rest),
        _ => Err(ParseError::at(e.pos(), format!("expected `({head} ...)`"))),
    }
}

fn parse_connective(form: &Sexpr) -> Result<ConnectiveSpec, ParseError> {
    let items = expect_form(form, "connective")?;
    if items.len() < 3 {
        return Err(ParseError::at(
            form.pos(),
            "connective form needs a name, (arity N) and (args ...)",
        ));
    }
    let name = match &items[0] {
        Sexpr::Str(s, _) => normalize_connective_name(s),
        Sexpr::Symbol(s, _) => normalize_connective_name(s),
        other => return Err(ParseError::at(other.pos(), "expected connective name")),
    };

    let arity_items = expect_form(&items[1], "arity")?;
    let arity: usize = match arity_items {
        [Sexpr::Symbol(n, p)] => n
            .parse()
            .map_err(|_| ParseError::at(*p, "arity must be a nonnegative integer"))?,
        _ => return Err(ParseError::at(items[1].pos(), "expected `(arity N)`")),
    };

    let args_items = expect_form(&items[2], "args")?;
    let mut arg_vars = Vec::new();
    for a in args_items {
        match a.as_symbol() {
            Some(v) => arg_vars.push(v.to_string()),
            None => {
                return Err(ParseError::at(
                    a.pos(),
                    "argument variables must be symbols",
                ))
            }
        }
    }
    if arg_vars.len() != arity {
        return Err(ParseError::at(
            items[2].pos(),
            format!(
                "arity mismatch: declared arity {arity} but {} argument variables",
                arg_vars.len()
            ),
        ));
    }
    let distinct: BTreeSet<&String> = arg_vars.iter().collect();
    if distinct.len() != arg_vars.len() {
        return Err(ParseError::at(
            items[2].pos(),
            "argument variables must be distinct",
        ));
    }

    let mut spec = ConnectiveSpec::new(name, arity, arg_vars);
    for rule_form in &items[3..] {
        let (rule, key) = parse_rule(rule_form, &spec)?;
        if spec.rule(&rule.name).is_some() {
            return Err(ParseError::at(
                rule_form.pos(),
                format!("duplicate rule name `{}`", rule.name),
            ));
        }
        spec.push_rule(key, rule);
    }
    Ok(spec)
}

struct RuleParts<'a> {
    name: Option<(&'a str, Pos)>,
    polarity: Option<(Polarity, Pos)>,
    role: Option<(Role, Pos)>,
    major: Option<(&'a Sexpr, Pos)>,
    premises: Option<(&'a [Sexpr], Pos)>,
    conclusion: Option<(&'a Sexpr, Pos)>,
    declared_type: Option<RuleType>,
}

fn parse_rule(form: &Sexpr, spec: &ConnectiveSpec) -> Result<(RuleSchema, FamilyKey), ParseError> {
    let items = expect_form(form, "rule")?;
    let mut parts = RuleParts {
        name: None,
        polarity: None,
        role: None,
        major: None,
        premises: None,
        conclusion: None,
        declared_type: None,
    };

    for item in items {
        match item {
            Sexpr::Str(s, p) => {
                if parts.name.is_some() {
                    return Err(ParseError::at(*p, "rule name given twice"));
                }
                parts.name = Some((s, *p));
            }
            _ => {
                let (head, rest) = item
                    .as_form()
                    .ok_or_else(|| ParseError::at(item.pos(), "expected a rule clause"))?;
                let pos = item.pos();
                match head {
                    "polarity" => match rest {
                        [Sexpr::Symbol(s, _)] if s == "+" => {
                            parts.polarity = Some((Polarity::Assertive, pos))
                        }
                        [Sexpr::Symbol(s, _)] if s == "-" => {
                            parts.polarity = Some((Polarity::Rejective, pos))
                        }
                        _ => {
                            return Err(ParseError::at(
                                pos,
                                "expected `(polarity +)` or `(polarity -)`",
                            ))
                        }
                    },
                    "role" => match rest {
                        [Sexpr::Symbol(s, _)] if s == "intro" => {
                            parts.role = Some((Role::Intro, pos))
                        }
                        [Sexpr::Symbol(s, _)] if s == "elim" => {
                            parts.role = Some((Role::Elim, pos))
                        }
                        _ => {
                            return Err(ParseError::at(
                                pos,
                                "expected `(role intro)` or `(role elim)`",
                            ))
                        }
                    },
                    "type" => match rest {
                        [Sexpr::Symbol(s, _)] if s == "1" => {
                            parts.declared_type = Some(RuleType::Type1)
                        }
                        [Sexpr::Symbol(s, _)] if s == "2" => {
                            parts.declared_type = Some(RuleType::Type2)
                        }
                        _ => return Err(ParseError::at(pos, "expected `(type 1)` or `(type 2)`")),
                    },
                    "major" => match rest {
                        [sf] => parts.major = Some((sf, pos)),
                        _ => return Err(ParseError::at(pos, "expected `(major (SIGN FORMULA))`")),
                    },
                    "premises" => parts.premises = Some((rest, pos)),
                    "conclusion" => match rest {
                        [c] => parts.conclusion = Some((c, pos)),
                        _ => return Err(ParseError::at(pos, "expected `(conclusion ...)`")),
                    },
                    other => {
                        return Err(ParseError::at(
                            pos,
                            format!("unknown rule clause `{other}`"),
                        ))
                    }
                }
            }
        }
    }

    let (name, _) = parts
        .name
        .ok_or_else(|| ParseError::at(form.pos(), "rule is missing its name string"))?;
    let (polarity, _) = parts
        .polarity
        .ok_or_else(|| ParseError::at(form.pos(), "rule is missing `(polarity ...)`"))?;
    let (role, _) = parts
        .role
        .ok_or_else(|| ParseError::at(form.pos(), "rule is missing `(role ...)`"))?;
    let (premise_items, _) = parts
        .premises
        .ok_or_else(|| ParseError::at(form.pos(), "rule is missing `(premises ...)`"))?;
    let (conclusion_item, conclusion_pos) = parts
        .conclusion
        .ok_or_else(|| ParseError::at(form.pos(), "rule is missing `(conclusion ...)`"))?;

    let major = match (role, parts.major) {
        (Role::Elim, Some((m, mpos))) => {
            let sf = parse_signed_formula(m, spec, true)?;
            match &sf.formula {
                Formula::App(head, _) if *head == spec.name => {}
                _ => {
                    return Err(ParseError::at(
                        mpos,
                        format!("major premise must have `{}` as main operator", spec.name),
                    ))
                }
            }
            if Polarity::of_sign(sf.sign) != polarity {
                return Err(ParseError::at(
                    mpos,
                    "polarity/family mismatch: major premise sign disagrees with declared polarity",
                ));
            }
            Some(sf)
        }
        (Role::Elim, None) => {
            return Err(ParseError::at(
                form.pos(),
                "elimination rule is missing `(major ...)`",
            ))
        }
        (Role::Intro, Some((_, mpos))) => {
            return Err(ParseError::at(
                mpos,
                "introduction rule cannot have a major premise",
            ))
        }
        (Role::Intro, None) => None,
    };

    let mut premises = Vec::new();
    for p in premise_items {
        premises.push(parse_premise(p, spec)?);
    }

    let conclusion = parse_schema_end(conclusion_item, spec)?;
    match &conclusion {
        SchemaEnd::Formula(sf) => {
            if role == Role::Intro && Polarity::of_sign(sf.sign) != polarity {
                return Err(ParseError::at(
                    conclusion_pos,
                    "polarity/family mismatch: conclusion sign disagrees with declared polarity",
                ));
            }
        }
        SchemaEnd::Arbitrary => {
            let all_sides_any = premises.iter().all(|p| {
                matches!(
                    p,
                    Premise::Side {
                        end: SchemaEnd::Arbitrary,
                        ..
                    }
                )
            });
            if role != Role::Elim || !all_sides_any {
                return Err(ParseError::at(conclusion_pos, "misplaced ArbitraryMark"));
            }
        }
    }
    // A side deduction may end in _ANY only when the conclusion is _ANY too.
    if conclusion.as_formula().is_some() {
        for (p, item) in premises.iter().zip(premise_items) {
            if let Premise::Side {
                end: SchemaEnd::Arbitrary,
                ..
            } = p
            {
                return Err(ParseError::at(item.pos(), "misplaced ArbitraryMark"));
            }
        }
    }

    let rule = RuleSchema {
        name: name.to_string(),
        role,
        major,
        premises,
        conclusion,
        declared_type: parts.declared_type,
    };
    Ok((rule, FamilyKey::new(polarity, role)))
}

fn parse_premise(e: &Sexpr, spec: &ConnectiveSpec) -> Result<Premise, ParseError> {
    if let Some((head, rest)) = e.as_form() {
        if head == "side" {
            let [discharge_form, end_form] = rest else {
                return Err(ParseError::at(
                    e.pos(),
                    "expected `(side (discharge SF...) END)`",
                ));
            };
            let discharge_items = expect_form(discharge_form, "discharge")?;
            if discharge_items.is_empty() {
                return Err(ParseError::at(
                    discharge_form.pos(),
                    "side deduction must discharge at least one hypothesis",
                ));
            }
            let mut discharged = Vec::new();
            for d in discharge_items {
                discharged.push(parse_schematic_leaf(d, spec)?);
            }
            let end = match end_form.as_symbol() {
                Some("_ANY") => SchemaEnd::Arbitrary,
                _ => SchemaEnd::Formula(parse_schematic_leaf(end_form, spec)?),
            };
            return Ok(Premise::Side { discharged, end });
        }
    }
    Ok(Premise::Plain(parse_schematic_leaf(e, spec)?))
}

/// Schematic premises, discharged hypotheses and side-deduction ends are
/// restricted to signed metavariables. Compound forms are rejected here.
fn parse_schematic_leaf(e: &Sexpr, spec: &ConnectiveSpec) -> Result<SignedFormula, ParseError> {
    let sf = parse_signed_formula(e, spec, true)?;
    match &sf.formula {
        Formula::Var(_) => Ok(sf),
        Formula::App(..) => Err(ParseError::at(
            e.pos(),
            "schematic premises must be signed metavariables, not compound formulas",
        )),
    }
}

fn parse_schema_end(e: &Sexpr, spec: &ConnectiveSpec) -> Result<SchemaEnd, ParseError> {
    if e.as_symbol() == Some("_ANY") {
        return Ok(SchemaEnd::Arbitrary);
    }
    Ok(SchemaEnd::Formula(parse_signed_formula(e, spec, true)?))
}

/// Parse `(SIGN FORMULA)`. In schematic mode bare identifiers must be
/// declared argument variables; in concrete mode they are atoms.
pub(crate) fn parse_signed_formula(
    e: &Sexpr,
    spec: &ConnectiveSpec,
    schematic: bool,
) -> Result<SignedFormula, ParseError> {
    let items = e
        .as_list()
        .ok_or_else(|| ParseError::at(e.pos(), "expected `(SIGN FORMULA)`"))?;
    let [sign_item, formula_item] = items else {
        return Err(ParseError::at(e.pos(), "expected `(SIGN FORMULA)`"));
    };
    let sign = parse_sign(sign_item)?;
    let formula = if schematic {
        parse_schema_formula(formula_item, spec)?
    } else {
        parse_concrete_formula(formula_item)?
    };
    Ok(SignedFormula::new(sign, formula))
}

pub(crate) fn parse_sign(e: &Sexpr) -> Result<Sign, ParseError> {
    match e.as_symbol() {
        Some("+") => Ok(Sign::Plus),
        Some("-") | Some("−") => Ok(Sign::Minus),
        _ => Err(ParseError::at(e.pos(), "expected sign `+` or `-`")),
    }
}

fn parse_schema_formula(e: &Sexpr, spec: &ConnectiveSpec) -> Result<Formula, ParseError> {
    match e {
        Sexpr::Symbol(s, p) => {
            if s == "_ANY" {
                return Err(ParseError::at(*p, "misplaced ArbitraryMark"));
            }
            if spec.arg_vars.iter().any(|v| v == s) {
                Ok(Formula::var(s.clone()))
            } else {
                Err(ParseError::at(*p, format!("undeclared metavariable `{s}`")))
            }
        }
        Sexpr::List(items, p) => {
            let head = items
                .first()
                .and_then(Sexpr::as_symbol)
                .ok_or_else(|| ParseError::at(*p, "expected a connective application"))?;
            let name = normalize_connective_name(head);
            // A rule schema only ever mentions the connective it governs;
            // everything below the governed compound is a metavariable.
            if name != spec.name {
                return Err(ParseError::at(*p, format!("unknown connective `{head}`")));
            }
            let mut args = Vec::new();
            for a in &items[1..] {
                args.push(parse_schema_formula(a, spec)?);
            }
            if args.len() != spec.arity {
                return Err(ParseError::at(
                    *p,
                    format!(
                        "arity mismatch: `{}` takes {} arguments, found {}",
                        spec.name,
                        spec.arity,
                        args.len()
                    ),
                ));
            }
            Ok(Formula::App(name, args))
        }
        Sexpr::Str(_, p) => Err(ParseError::at(*p, "unexpected string in formula")),
    }
}

/// Concrete formulas for derivations: bare identifiers are atoms, lists are
/// applications.
pub(crate) fn parse_concrete_formula(e: &Sexpr) -> Result<Formula, ParseError> {
    match e {
        Sexpr::Symbol(s, p) => {
            if s == "_ANY" {
                return Err(ParseError::at(*p, "misplaced ArbitraryMark"));
            }
            Ok(Formula::atom(normalize_connective_name(s)))
        }
        Sexpr::List(items, p) => {
            let head = items
                .first()
                .and_then(Sexpr::as_symbol)
                .ok_or_else(|| ParseError::at(*p, "expected a connective application"))?;
            let name = normalize_connective_name(head);
            let mut args = Vec::new();
            for a in &items[1..] {
                args.push(parse_concrete_formula(a)?);
            }
            Ok(Formula::App(name, args))
        }
        Sexpr::Str(_, p) => Err(ParseError::at(*p, "unexpected string in formula")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Role;

    const AND_BLOCK: &str = r#"
(connective "and" (arity 2) (args A B)
  (rule "+andI" (polarity +) (role intro)
        (premises (+ A) (+ B)) (conclusion (+ (and A B))))
  (rule "+andE1" (polarity +) (role elim) (major (+ (and A B)))
        (premises) (conclusion (+ A))))
"#;

    #[test]
    fn parses_and_block() {
        let specs = parse_specs(AND_BLOCK).unwrap();
        assert_eq!(specs.len(), 1);
        let and = &specs[0];
        assert_eq!(and.name, "and");
        assert_eq!(and.arity, 2);
        let intro = &and.family(FamilyKey::new(Polarity::Assertive, Role::Intro))[0];
        assert_eq!(intro.premises.len(), 2);
        assert_eq!(
            intro.premises[0],
            Premise::Plain(SignedFormula::new(Sign::Plus, Formula::var("A")))
        );
        assert_eq!(
            intro.premises[1],
            Premise::Plain(SignedFormula::new(Sign::Plus, Formula::var("B")))
        );
    }

    #[test]
    fn empty_file_gives_empty_list() {
        assert_eq!(parse_specs("").unwrap(), Vec::new());
        assert_eq!(parse_specs("; just a comment\n").unwrap(), Vec::new());
    }

    #[test]
    fn rejects_any_conclusion_on_intro() {
        let src = r#"
(connective "c" (arity 1) (args A)
  (rule "+cI" (polarity +) (role intro) (premises (+ A)) (conclusion _ANY)))
"#;
        let err = parse_specs(src).unwrap_err();
        assert!(err.message.contains("misplaced ArbitraryMark"), "{err}");
    }

    #[test]
    fn rejects_undeclared_metavariable() {
        let src = r#"
(connective "c" (arity 1) (args A)
  (rule "+cI" (polarity +) (role intro) (premises (+ X)) (conclusion (+ (c A)))))
"#;
        let err = parse_specs(src).unwrap_err();
        assert!(err.message.contains("undeclared metavariable `X`"), "{err}");
    }

    #[test]
    fn rejects_polarity_mismatch() {
        let src = r#"
(connective "c" (arity 1) (args A)
  (rule "+cI" (polarity +) (role intro) (premises (+ A)) (conclusion (- (c A)))))
"#;
        let err = parse_specs(src).unwrap_err();
        assert!(err.message.contains("polarity/family mismatch"), "{err}");
    }

    #[test]
    fn rejects_compound_premise() {
        let src = r#"
(connective "c" (arity 1) (args A)
  (rule "+cI" (polarity +) (role intro) (premises (+ (c A))) (conclusion (+ (c A)))))
"#;
        let err = parse_specs(src).unwrap_err();
        assert!(err.message.contains("signed metavariables"), "{err}");
    }

    #[test]
    fn rejects_arity_mismatch_in_compound() {
        let src = r#"
(connective "c" (arity 2) (args A B)
  (rule "+cI" (polarity +) (role intro) (premises (+ A) (+ B)) (conclusion (+ (c A)))))
"#;
        let err = parse_specs(src).unwrap_err();
        assert!(err.message.contains("arity mismatch"), "{err}");
    }

    #[test]
    fn rejects_side_any_without_any_conclusion() {
        let src = r#"
(connective "c" (arity 1) (args A)
  (rule "+cE" (polarity +) (role elim) (major (+ (c A)))
        (premises (side (discharge (+ A)) _ANY)) (conclusion (+ A))))
"#;
        let err = parse_specs(src).unwrap_err();
        assert!(err.message.contains("misplaced ArbitraryMark"), "{err}");
    }

    #[test]
    fn rejects_empty_discharge() {
        let src = r#"
(connective "c" (arity 1) (args A)
  (rule "+cE" (polarity +) (role elim) (major (+ (c A)))
        (premises (side (discharge) _ANY)) (conclusion _ANY)))
"#;
        let err = parse_specs(src).unwrap_err();
        assert!(err.message.contains("at least one hypothesis"), "{err}");
    }

    #[test]
    fn rejects_foreign_connective_in_schema() {
        let src = r#"
(connective "c" (arity 1) (args A)
  (rule "+cI" (polarity +) (role intro) (premises (+ A)) (conclusion (+ (c (or A A))))))
"#;
        let err = parse_specs(src).unwrap_err();
        assert!(err.message.contains("unknown connective `or`"), "{err}");
    }

    #[test]
    fn normalizes_unicode_glyphs() {
        let src = "(connective \"∧\" (arity 2) (args A B)\n  (rule \"+I\" (polarity +) (role intro) (premises (+ A) (+ B)) (conclusion (+ (∧ A B)))))";
        let specs = parse_specs(src).unwrap();
        assert_eq!(specs[0].name, "and");
        let intro = &specs[0].family(FamilyKey::new(Polarity::Assertive, Role::Intro))[0];
        assert_eq!(
            intro.conclusion.as_formula().unwrap().formula.sexpr(),
            "(and A B)"
        );
    }
}

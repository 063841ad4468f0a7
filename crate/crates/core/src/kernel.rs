//! Checker for concrete bilateral derivations.
//!
//! A derivation is a tree of assumptions, rule applications and
//! co-ordination steps over closed signed formulas. Rule applications
//! instantiate a library schema under an explicit substitution; discharge
//! is by label, one label per side deduction, and a label may close zero
//! occurrences (vacuous discharge). The co-ordination step is primitive:
//! from subderivations of some formula and its conjugate, both allowed to
//! use a labelled assumption, conclude the conjugate of that assumption,
//! discharging it.

use std::collections::BTreeMap;
use std::fmt;

use crate::parser::{parse_concrete_formula, parse_sign, ParseError};
use crate::sexpr::{read_all, Pos, Sexpr};
use crate::syntax::{ConnectiveSpec, Formula, Premise, Role, RuleSchema, SchemaEnd, SignedFormula};

pub type Label = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Assumption {
        formula: SignedFormula,
        label: Option<Label>,
    },
    RuleApp {
        connective: String,
        rule: String,
        /// Metavariable instantiation; must bind exactly the connective's
        /// declared argument variables with closed formulas.
        subst: Vec<(String, Formula)>,
        /// One entry per side deduction of the schema, in schema order.
        discharges: Vec<(Label, Vec<SignedFormula>)>,
        /// For eliminations the first child derives the major premise.
        children: Vec<Derivation>,
        /// Required exactly when the rule concludes the arbitrary mark and
        /// has no side deductions to determine it.
        stated_conclusion: Option<SignedFormula>,
    },
    Coord {
        label: Label,
        assumption: SignedFormula,
        left: Box<Derivation>,
        right: Box<Derivation>,
    },
}

impl Derivation {
    pub fn assume(formula: SignedFormula) -> Derivation {
        Derivation::Assumption {
            formula,
            label: None,
        }
    }

    pub fn assume_labelled(formula: SignedFormula, label: Label) -> Derivation {
        Derivation::Assumption {
            formula,
            label: Some(label),
        }
    }

    fn children(&self) -> Vec<&Derivation> {
        match self {
            Derivation::Assumption { .. } => Vec::new(),
            Derivation::RuleApp { children, .. } => children.iter().collect(),
            Derivation::Coord { left, right, .. } => vec![left, right],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckErrorKind {
    UnknownConnective,
    UnknownRule,
    SubderivationCount,
    Substitution,
    PremiseMismatch,
    MajorMismatch,
    Discharge,
    ArbitraryMark,
    Coordination,
    LabelReuse,
}

impl fmt::Display for CheckErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckErrorKind::UnknownConnective => "unknown connective",
            CheckErrorKind::UnknownRule => "unknown rule",
            CheckErrorKind::SubderivationCount => "wrong number of subderivations",
            CheckErrorKind::Substitution => "bad substitution",
            CheckErrorKind::PremiseMismatch => "premise mismatch",
            CheckErrorKind::MajorMismatch => "major premise mismatch",
            CheckErrorKind::Discharge => "discharge error",
            CheckErrorKind::ArbitraryMark => "arbitrary-mark inconsistency",
            CheckErrorKind::Coordination => "co-ordination mismatch",
            CheckErrorKind::LabelReuse => "discharge label reused",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub kind: CheckErrorKind,
    pub detail: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at node {:?}: {}: {}", self.path, self.kind, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Valid {
        conclusion: SignedFormula,
        /// Sorted multiset of open assumptions.
        open: Vec<SignedFormula>,
    },
    Invalid(CheckFailure),
}

impl CheckOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckOutcome::Valid { .. })
    }
}

struct Checker<'a> {
    lib: &'a [ConnectiveSpec],
}

type NodeResult = Result<(SignedFormula, Vec<SignedFormula>), CheckFailure>;

impl<'a> Checker<'a> {
    fn fail(
        &self,
        path: &[usize],
        kind: CheckErrorKind,
        detail: impl Into<String>,
    ) -> CheckFailure {
        CheckFailure {
            path: path.to_vec(),
            kind,
            detail: detail.into(),
        }
    }

    fn check(
        &self,
        node: &Derivation,
        env: &mut Vec<(Label, Vec<SignedFormula>)>,
        path: &mut Vec<usize>,
    ) -> NodeResult {
        match node {
            Derivation::Assumption { formula, label } => {
                if let Some(l) = label {
                    if let Some((_, license)) = env.iter().rev().find(|(el, _)| el == l) {
                        return if license.contains(formula) {
                            Ok((formula.clone(), Vec::new()))
                        } else {
                            Err(self.fail(
                                path,
                                CheckErrorKind::Discharge,
                                format!(
                                    "assumption {} does not match what label {} may discharge",
                                    formula.concrete(),
                                    l
                                ),
                            ))
                        };
                    }
                }
                Ok((formula.clone(), vec![formula.clone()]))
            }
            Derivation::Coord {
                label,
                assumption,
                left,
                right,
            } => {
                env.push((*label, vec![assumption.clone()]));
                path.push(0);
                let (left_conclusion, mut open) = self.check(left, env, path)?;
                path.pop();
                path.push(1);
                let (right_conclusion, right_open) = self.check(right, env, path)?;
                path.pop();
                env.pop();
                if right_conclusion != left_conclusion.conjugate() {
                    return Err(self.fail(
                        path,
                        CheckErrorKind::Coordination,
                        format!(
                            "subderivations conclude {} and {}, not a conjugate pair",
                            left_conclusion.concrete(),
                            right_conclusion.concrete()
                        ),
                    ));
                }
                open.extend(right_open);
                Ok((assumption.conjugate(), open))
            }
            Derivation::RuleApp {
                connective,
                rule,
                subst,
                discharges,
                children,
                stated_conclusion,
            } => self.check_rule_app(
                node,
                connective,
                rule,
                subst,
                discharges,
                children,
                stated_conclusion.as_ref(),
                env,
                path,
            ),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn check_rule_app(
        &self,
        _node: &Derivation,
        connective: &str,
        rule_name: &str,
        subst: &[(String, Formula)],
        discharges: &[(Label, Vec<SignedFormula>)],
        children: &[Derivation],
        stated_conclusion: Option<&SignedFormula>,
        env: &mut Vec<(Label, Vec<SignedFormula>)>,
        path: &mut Vec<usize>,
    ) -> NodeResult {
        let spec = self
            .lib
            .iter()
            .find(|s| s.name == connective)
            .ok_or_else(|| {
                self.fail(
                    path,
                    CheckErrorKind::UnknownConnective,
                    format!("`{connective}` is not in the library"),
                )
            })?;
        let schema: &RuleSchema = spec.rule(rule_name).ok_or_else(|| {
            self.fail(
                path,
                CheckErrorKind::UnknownRule,
                format!("`{connective}` has no rule `{rule_name}`"),
            )
        })?;

        // The substitution must bind exactly the declared argument
        // variables, with closed formulas.
        let mut map: BTreeMap<String, Formula> = BTreeMap::new();
        for (var, formula) in subst {
            if !spec.arg_vars.iter().any(|v| v == var) {
                return Err(self.fail(
                    path,
                    CheckErrorKind::Substitution,
                    format!("`{var}` is not an argument variable of `{connective}`"),
                ));
            }
            if !formula.is_closed() {
                return Err(self.fail(
                    path,
                    CheckErrorKind::Substitution,
                    format!("substitution for `{var}` is not a closed formula"),
                ));
            }
            if map.insert(var.clone(), formula.clone()).is_some() {
                return Err(self.fail(
                    path,
                    CheckErrorKind::Substitution,
                    format!("variable `{var}` bound twice"),
                ));
            }
        }
        for v in &spec.arg_vars {
            if !map.contains_key(v) {
                return Err(self.fail(
                    path,
                    CheckErrorKind::Substitution,
                    format!("missing binding for argument variable `{v}`"),
                ));
            }
        }
        let inst = |sf: &SignedFormula| SignedFormula {
            sign: sf.sign,
            formula: sf.formula.substitute(&map),
        };

        let major_offset = match schema.role {
            Role::Elim => 1,
            Role::Intro => 0,
        };
        let expected_children = major_offset + schema.premises.len();
        if children.len() != expected_children {
            return Err(self.fail(
                path,
                CheckErrorKind::SubderivationCount,
                format!(
                    "rule `{rule_name}` expects {expected_children} subderivations, found {}",
                    children.len()
                ),
            ));
        }
        let side_count = schema
            .premises
            .iter()
            .filter(|p| matches!(p, Premise::Side { .. }))
            .count();
        if discharges.len() != side_count {
            return Err(self.fail(
                path,
                CheckErrorKind::Discharge,
                format!(
                    "rule `{rule_name}` has {side_count} side deductions but {} discharge entries",
                    discharges.len()
                ),
            ));
        }

        let mut open: Vec<SignedFormula> = Vec::new();

        if schema.role == Role::Elim {
            path.push(0);
            let (found_major, major_open) = self.check(&children[0], env, path)?;
            path.pop();
            let expected_major = inst(schema.major.as_ref().expect("elim has a major"));
            if found_major != expected_major {
                return Err(self.fail(
                    path,
                    CheckErrorKind::MajorMismatch,
                    format!(
                        "major premise is {}, rule instance requires {}",
                        found_major.concrete(),
                        expected_major.concrete()
                    ),
                ));
            }
            open.extend(major_open);
        }

        // The arbitrary mark must denote one signed formula throughout the
        // node; it is fixed by the first side deduction, or stated
        // explicitly when there is none.
        let mut arbitrary: Option<SignedFormula> = stated_conclusion.cloned();
        let mut side_index = 0;

        for (i, premise) in schema.premises.iter().enumerate() {
            let child = &children[major_offset + i];
            match premise {
                Premise::Plain(sf) => {
                    path.push(major_offset + i);
                    let (found, child_open) = self.check(child, env, path)?;
                    path.pop();
                    let expected = inst(sf);
                    if found != expected {
                        return Err(self.fail(
                            path,
                            CheckErrorKind::PremiseMismatch,
                            format!(
                                "premise {} is {}, rule instance requires {}",
                                i + 1,
                                found.concrete(),
                                expected.concrete()
                            ),
                        ));
                    }
                    open.extend(child_open);
                }
                Premise::Side { discharged, end } => {
                    let (label, licensed) = &discharges[side_index];
                    side_index += 1;
                    let mut expected_license: Vec<SignedFormula> =
                        discharged.iter().map(&inst).collect();
                    expected_license.sort();
                    let mut given = licensed.clone();
                    given.sort();
                    if given != expected_license {
                        return Err(self.fail(
                            path,
                            CheckErrorKind::Discharge,
                            format!(
                                "discharge {} licenses [{}], rule instance requires [{}]",
                                label,
                                given
                                    .iter()
                                    .map(|sf| sf.concrete())
                                    .collect::<Vec<_>>()
                                    .join(", "),
                                expected_license
                                    .iter()
                                    .map(|sf| sf.concrete())
                                    .collect::<Vec<_>>()
                                    .join(", ")
                            ),
                        ));
                    }
                    env.push((*label, expected_license));
                    path.push(major_offset + i);
                    let result = self.check(child, env, path);
                    path.pop();
                    env.pop();
                    let (found, child_open) = result?;
                    match end {
                        SchemaEnd::Formula(sf) => {
                            let expected = inst(sf);
                            if found != expected {
                                return Err(self.fail(
                                    path,
                                    CheckErrorKind::PremiseMismatch,
                                    format!(
                                        "side deduction {} ends in {}, rule instance requires {}",
                                        side_index,
                                        found.concrete(),
                                        expected.concrete()
                                    ),
                                ));
                            }
                        }
                        SchemaEnd::Arbitrary => match &arbitrary {
                            Some(phi) if *phi != found => {
                                return Err(self.fail(
                                    path,
                                    CheckErrorKind::ArbitraryMark,
                                    format!(
                                        "side deductions end in {} and {}; the arbitrary mark must be uniform",
                                        phi.concrete(),
                                        found.concrete()
                                    ),
                                ));
                            }
                            Some(_) => {}
                            None => arbitrary = Some(found),
                        },
                    }
                    open.extend(child_open);
                }
            }
        }

        let conclusion = match &schema.conclusion {
            SchemaEnd::Formula(sf) => {
                let computed = inst(sf);
                if let Some(stated) = stated_conclusion {
                    if *stated != computed {
                        return Err(self.fail(
                            path,
                            CheckErrorKind::ArbitraryMark,
                            format!(
                                "stated conclusion {} disagrees with rule instance {}",
                                stated.concrete(),
                                computed.concrete()
                            ),
                        ));
                    }
                }
                computed
            }
            SchemaEnd::Arbitrary => arbitrary.ok_or_else(|| {
                self.fail(
                    path,
                    CheckErrorKind::ArbitraryMark,
                    "rule concludes the arbitrary mark and has no side deductions; \
                     state the conclusion with (:conclusion (SIGN FORMULA))",
                )
            })?,
        };

        Ok((conclusion, open))
    }
}

fn collect_discharge_labels(
    node: &Derivation,
    path: &mut Vec<usize>,
    seen: &mut BTreeMap<Label, Vec<usize>>,
) -> Result<(), CheckFailure> {
    let mut record = |label: Label, path: &[usize]| -> Result<(), CheckFailure> {
        if seen.insert(label, path.to_vec()).is_some() {
            return Err(CheckFailure {
                path: path.to_vec(),
                kind: CheckErrorKind::LabelReuse,
                detail: format!("label {label} discharges at more than one node"),
            });
        }
        Ok(())
    };
    match node {
        Derivation::Assumption { .. } => {}
        Derivation::RuleApp { discharges, .. } => {
            for (label, _) in discharges {
                record(*label, path)?;
            }
        }
        Derivation::Coord { label, .. } => record(*label, path)?,
    }
    for (i, child) in node.children().into_iter().enumerate() {
        path.push(i);
        collect_discharge_labels(child, path, seen)?;
        path.pop();
    }
    Ok(())
}

/// Check a derivation against a library of connective specifications.
pub fn check_derivation(d: &Derivation, lib: &[ConnectiveSpec]) -> CheckOutcome {
    let mut seen = BTreeMap::new();
    if let Err(failure) = collect_discharge_labels(d, &mut Vec::new(), &mut seen) {
        return CheckOutcome::Invalid(failure);
    }
    let checker = Checker { lib };
    match checker.check(d, &mut Vec::new(), &mut Vec::new()) {
        Ok((conclusion, mut open)) => {
            open.sort();
            CheckOutcome::Valid { conclusion, open }
        }
        Err(failure) => CheckOutcome::Invalid(failure),
    }
}

/// The multiset of assumptions not closed by any ancestor's discharge.
/// Purely structural; no library needed.
pub fn open_assumptions(d: &Derivation) -> Vec<SignedFormula> {
    fn walk(
        node: &Derivation,
        env: &mut Vec<(Label, Vec<SignedFormula>)>,
        open: &mut Vec<SignedFormula>,
    ) {
        match node {
            Derivation::Assumption { formula, label } => {
                let closed = label.is_some_and(|l| {
                    env.iter()
                        .rev()
                        .any(|(el, license)| *el == l && license.contains(formula))
                });
                if !closed {
                    open.push(formula.clone());
                }
            }
            Derivation::RuleApp {
                discharges,
                children,
                ..
            } => {
                let depth = env.len();
                for (label, license) in discharges {
                    env.push((*label, license.clone()));
                }
                for child in children {
                    walk(child, env, open);
                }
                env.truncate(depth);
            }
            Derivation::Coord {
                label,
                assumption,
                left,
                right,
            } => {
                env.push((*label, vec![assumption.clone()]));
                walk(left, env, open);
                walk(right, env, open);
                env.pop();
            }
        }
    }
    let mut open = Vec::new();
    walk(d, &mut Vec::new(), &mut open);
    open.sort();
    open
}

fn parse_label(e: &Sexpr) -> Result<Label, ParseError> {
    e.as_symbol()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| at(e.pos(), "expected a numeric discharge label"))
}

fn at(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

fn parse_concrete_signed(e: &Sexpr) -> Result<SignedFormula, ParseError> {
    let items = e
        .as_list()
        .ok_or_else(|| at(e.pos(), "expected `(SIGN FORMULA)`"))?;
    let [sign_item, formula_item] = items else {
        return Err(at(e.pos(), "expected `(SIGN FORMULA)`"));
    };
    let sign = parse_sign(sign_item)?;
    let formula = parse_concrete_formula(formula_item)?;
    Ok(SignedFormula::new(sign, formula))
}

fn parse_node(e: &Sexpr) -> Result<Derivation, ParseError> {
    let (head, rest) = e
        .as_form()
        .ok_or_else(|| at(e.pos(), "expected (assume ...), (rule ...) or (coord ...)"))?;
    match head {
        "assume" => {
            let mut formula = None;
            let mut label = None;
            let mut items = rest.iter();
            while let Some(item) = items.next() {
                if item.as_symbol() == Some(":label") {
                    let l = items
                        .next()
                        .ok_or_else(|| at(item.pos(), ":label needs a number"))?;
                    label = Some(parse_label(l)?);
                } else if formula.is_none() {
                    formula = Some(parse_concrete_signed(item)?);
                } else {
                    return Err(at(item.pos(), "unexpected item in (assume ...)"));
                }
            }
            let formula =
                formula.ok_or_else(|| at(e.pos(), "(assume ...) needs a signed formula"))?;
            Ok(Derivation::Assumption { formula, label })
        }
        "rule" => {
            if rest.len() < 2 {
                return Err(at(e.pos(), "(rule ...) needs a connective and a rule name"));
            }
            let connective = rest[0]
                .as_str()
                .ok_or_else(|| at(rest[0].pos(), "expected connective name string"))?;
            let rule = rest[1]
                .as_str()
                .ok_or_else(|| at(rest[1].pos(), "expected rule name string"))?;
            let mut subst = Vec::new();
            let mut discharges = Vec::new();
            let mut stated_conclusion = None;
            let mut children = Vec::new();
            for item in &rest[2..] {
                match item.as_form() {
                    Some((":subst", entries)) => {
                        for entry in entries {
                            let pair = entry
                                .as_list()
                                .ok_or_else(|| at(entry.pos(), "expected (VAR FORMULA)"))?;
                            let [var, formula] = pair else {
                                return Err(at(entry.pos(), "expected (VAR FORMULA)"));
                            };
                            let var = var
                                .as_symbol()
                                .ok_or_else(|| at(var.pos(), "expected a metavariable name"))?;
                            subst.push((var.to_string(), parse_concrete_formula(formula)?));
                        }
                    }
                    Some((":discharge", entries)) => {
                        if entries.is_empty() {
                            return Err(at(item.pos(), ":discharge needs a label"));
                        }
                        let label = parse_label(&entries[0])?;
                        let mut formulas = Vec::new();
                        for f in &entries[1..] {
                            formulas.push(parse_concrete_signed(f)?);
                        }
                        discharges.push((label, formulas));
                    }
                    Some((":conclusion", entries)) => {
                        let [sf] = entries else {
                            return Err(at(item.pos(), ":conclusion needs one signed formula"));
                        };
                        stated_conclusion = Some(parse_concrete_signed(sf)?);
                    }
                    Some(("assume", _)) | Some(("rule", _)) | Some(("coord", _)) => {
                        children.push(parse_node(item)?);
                    }
                    _ => {
                        return Err(at(
                            item.pos(),
                            "unknown head form inside (rule ...); expected :subst, :discharge, \
                             :conclusion or a subderivation",
                        ))
                    }
                }
            }
            Ok(Derivation::RuleApp {
                connective: crate::parser::normalize_connective_name(connective),
                rule: rule.to_string(),
                subst,
                discharges,
                children,
                stated_conclusion,
            })
        }
        "coord" => {
            if rest.len() != 5 || rest[0].as_symbol() != Some(":label") {
                return Err(at(
                    e.pos(),
                    "expected (coord :label N (SIGN FORMULA) CHILD1 CHILD2)",
                ));
            }
            let label = parse_label(&rest[1])?;
            let assumption = parse_concrete_signed(&rest[2])?;
            let left = parse_node(&rest[3])?;
            let right = parse_node(&rest[4])?;
            Ok(Derivation::Coord {
                label,
                assumption,
                left: Box::new(left),
                right: Box::new(right),
            })
        }
        other => Err(at(e.pos(), format!("unknown head form `{other}`"))),
    }
}

/// Parse a derivation file: exactly one derivation per file, with unique
/// discharging labels.
pub fn parse_derivation(text: &str) -> Result<Derivation, ParseError> {
    let forms = read_all(text).map_err(ParseError::from)?;
    let [form] = forms.as_slice() else {
        return Err(ParseError {
            line: 1,
            col: 1,
            message: format!("expected exactly one derivation, found {}", forms.len()),
        });
    };
    let d = parse_node(form)?;
    let mut seen = BTreeMap::new();
    if let Err(failure) = collect_discharge_labels(&d, &mut Vec::new(), &mut seen) {
        return Err(ParseError {
            line: form.pos().line,
            col: form.pos().col,
            message: format!("duplicate label: {}", failure.detail),
        });
    }
    Ok(d)
}

fn write_node(node: &Derivation, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match node {
        Derivation::Assumption { formula, label } => {
            out.push_str(&pad);
            out.push_str("(assume ");
            out.push_str(&formula.concrete());
            if let Some(l) = label {
                out.push_str(&format!(" :label {l}"));
            }
            out.push(')');
        }
        Derivation::RuleApp {
            connective,
            rule,
            subst,
            discharges,
            children,
            stated_conclusion,
        } => {
            out.push_str(&pad);
            out.push_str(&format!("(rule \"{connective}\" \"{rule}\""));
            out.push_str(" (:subst");
            for (v, f) in subst {
                out.push_str(&format!(" ({v} {})", f.concrete()));
            }
            out.push(')');
            for (label, formulas) in discharges {
                out.push_str(&format!(" (:discharge {label}"));
                for f in formulas {
                    out.push(' ');
                    out.push_str(&f.concrete());
                }
                out.push(')');
            }
            if let Some(sf) = stated_conclusion {
                out.push_str(&format!(" (:conclusion {})", sf.concrete()));
            }
            for child in children {
                out.push('\n');
                write_node(child, indent + 1, out);
            }
            out.push(')');
        }
        Derivation::Coord {
            label,
            assumption,
            left,
            right,
        } => {
            out.push_str(&pad);
            out.push_str(&format!("(coord :label {label} {}", assumption.concrete()));
            out.push('\n');
            write_node(left, indent + 1, out);
            out.push('\n');
            write_node(right, indent + 1, out);
            out.push(')');
        }
    }
}

/// Render a derivation in the file format accepted by [`parse_derivation`].
pub fn derivation_to_string(d: &Derivation) -> String {
    let mut out = String::new();
    write_node(d, 0, &mut out);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::builtins;
    use crate::syntax::Sign;

    fn sf(sign: Sign, formula: Formula) -> SignedFormula {
        SignedFormula::new(sign, formula)
    }

    fn atom(name: &str) -> Formula {
        Formula::atom(name)
    }

    fn imp_bot(a: &str) -> Formula {
        Formula::App("imp".into(), vec![atom(a), atom("bot")])
    }

    fn valid(outcome: &CheckOutcome) -> (&SignedFormula, &Vec<SignedFormula>) {
        match outcome {
            CheckOutcome::Valid { conclusion, open } => (conclusion, open),
            CheckOutcome::Invalid(f) => panic!("expected valid, got {f}"),
        }
    }

    #[test]
    fn single_assumption_is_valid_and_open() {
        let d = Derivation::assume(sf(Sign::Plus, atom("p")));
        let outcome = check_derivation(&d, builtins());
        let (conclusion, open) = valid(&outcome);
        assert_eq!(*conclusion, sf(Sign::Plus, atom("p")));
        assert_eq!(*open, vec![sf(Sign::Plus, atom("p"))]);
    }

    #[test]
    fn open_assumptions_is_a_multiset() {
        // +andI over p twice: conclusion +(and p p), open {+p, +p}.
        let d = Derivation::RuleApp {
            connective: "and".into(),
            rule: "+andI".into(),
            subst: vec![("A".into(), atom("p")), ("B".into(), atom("p"))],
            discharges: vec![],
            children: vec![
                Derivation::assume(sf(Sign::Plus, atom("p"))),
                Derivation::assume(sf(Sign::Plus, atom("p"))),
            ],
            stated_conclusion: None,
        };
        let outcome = check_derivation(&d, builtins());
        let (conclusion, open) = valid(&outcome);
        assert_eq!(
            *conclusion,
            sf(
                Sign::Plus,
                Formula::App("and".into(), vec![atom("p"), atom("p")])
            )
        );
        assert_eq!(
            *open,
            vec![sf(Sign::Plus, atom("p")), sf(Sign::Plus, atom("p"))]
        );
        assert_eq!(open_assumptions(&d), *open);
    }

    /// From -p: assume +p (1), co-ordinate with vacuous -bot (2) to get
    /// +bot, then +impI discharging 1 concludes +(imp p bot).
    fn negation_intro_derivation() -> Derivation {
        Derivation::RuleApp {
            connective: "imp".into(),
            rule: "+impI".into(),
            subst: vec![("A".into(), atom("p")), ("B".into(), atom("bot"))],
            discharges: vec![(1, vec![sf(Sign::Plus, atom("p"))])],
            children: vec![Derivation::Coord {
                label: 2,
                assumption: sf(Sign::Minus, atom("bot")),
                left: Box::new(Derivation::assume_labelled(sf(Sign::Plus, atom("p")), 1)),
                right: Box::new(Derivation::assume(sf(Sign::Minus, atom("p")))),
            }],
            stated_conclusion: None,
        }
    }

    #[test]
    fn derivation_i_checks_with_open_minus_a() {
        let d = negation_intro_derivation();
        let outcome = check_derivation(&d, builtins());
        let (conclusion, open) = valid(&outcome);
        assert_eq!(*conclusion, sf(Sign::Plus, imp_bot("p")));
        assert_eq!(*open, vec![sf(Sign::Minus, atom("p"))]);
        assert_eq!(open_assumptions(&d), *open);
    }

    #[test]
    fn relabelling_preserves_validity_and_open_assumptions() {
        fn relabel(d: &Derivation) -> Derivation {
            match d {
                Derivation::Assumption { formula, label } => Derivation::Assumption {
                    formula: formula.clone(),
                    label: label.map(|l| l * 2 + 7),
                },
                Derivation::RuleApp {
                    connective,
                    rule,
                    subst,
                    discharges,
                    children,
                    stated_conclusion,
                } => Derivation::RuleApp {
                    connective: connective.clone(),
                    rule: rule.clone(),
                    subst: subst.clone(),
                    discharges: discharges
                        .iter()
                        .map(|(l, fs)| (l * 2 + 7, fs.clone()))
                        .collect(),
                    children: children.iter().map(relabel).collect(),
                    stated_conclusion: stated_conclusion.clone(),
                },
                Derivation::Coord {
                    label,
                    assumption,
                    left,
                    right,
                } => Derivation::Coord {
                    label: label * 2 + 7,
                    assumption: assumption.clone(),
                    left: Box::new(relabel(left)),
                    right: Box::new(relabel(right)),
                },
            }
        }
        let d = negation_intro_derivation();
        let r = relabel(&d);
        let a = check_derivation(&d, builtins());
        let b = check_derivation(&r, builtins());
        let (ca, oa) = valid(&a);
        let (cb, ob) = valid(&b);
        assert_eq!(ca, cb);
        assert_eq!(oa, ob);
    }

    #[test]
    fn major_mismatch_is_invalid() {
        let d = Derivation::RuleApp {
            connective: "imp".into(),
            rule: "+impE".into(),
            subst: vec![("A".into(), atom("p")), ("B".into(), atom("q"))],
            discharges: vec![],
            children: vec![
                Derivation::assume(sf(Sign::Plus, imp_bot("p"))),
                Derivation::assume(sf(Sign::Plus, atom("p"))),
            ],
            stated_conclusion: None,
        };
        match check_derivation(&d, builtins()) {
            CheckOutcome::Invalid(f) => assert_eq!(f.kind, CheckErrorKind::MajorMismatch),
            CheckOutcome::Valid { .. } => panic!("expected invalid"),
        }
    }

    #[test]
    fn wrong_assumption_under_label_is_a_discharge_error() {
        let d = Derivation::RuleApp {
            connective: "imp".into(),
            rule: "+impI".into(),
            subst: vec![("A".into(), atom("p")), ("B".into(), atom("p"))],
            discharges: vec![(1, vec![sf(Sign::Plus, atom("p"))])],
            children: vec![Derivation::assume_labelled(sf(Sign::Minus, atom("p")), 1)],
            stated_conclusion: None,
        };
        match check_derivation(&d, builtins()) {
            CheckOutcome::Invalid(f) => assert_eq!(f.kind, CheckErrorKind::Discharge),
            CheckOutcome::Valid { .. } => panic!("expected invalid"),
        }
    }

    #[test]
    fn label_reuse_is_rejected() {
        let d = Derivation::RuleApp {
            connective: "and".into(),
            rule: "+andI".into(),
            subst: vec![("A".into(), imp_bot("p")), ("B".into(), imp_bot("p"))],
            discharges: vec![],
            children: vec![negation_intro_derivation(), negation_intro_derivation()],
            stated_conclusion: None,
        };
        match check_derivation(&d, builtins()) {
            CheckOutcome::Invalid(f) => assert_eq!(f.kind, CheckErrorKind::LabelReuse),
            CheckOutcome::Valid { .. } => panic!("expected invalid"),
        }
    }

    #[test]
    fn parse_and_print_round_trip() {
        let text = r#"
(rule "imp" "+impI" (:subst (A p) (B bot)) (:discharge 1 (+ p))
  (coord :label 2 (- bot)
    (assume (+ p) :label 1)
    (assume (- p))))
"#;
        let d = parse_derivation(text).unwrap();
        assert_eq!(d, negation_intro_derivation());
        let printed = derivation_to_string(&d);
        assert_eq!(parse_derivation(&printed).unwrap(), d);
    }

    #[test]
    fn duplicate_labels_rejected_at_parse() {
        let text = r#"
(rule "and" "+andI" (:subst (A p) (B q))
  (coord :label 1 (- p) (assume (+ p)) (assume (- p)))
  (coord :label 1 (- q) (assume (+ q)) (assume (- q))))
"#;
        let err = parse_derivation(text).unwrap_err();
        assert!(err.message.contains("duplicate label"), "{err}");
    }

    #[test]
    fn premiseless_arbitrary_rule_needs_stated_conclusion() {
        let bot_elim = |stated: Option<SignedFormula>| Derivation::RuleApp {
            connective: "bot".into(),
            rule: "+botE".into(),
            subst: vec![],
            discharges: vec![],
            children: vec![Derivation::assume(sf(Sign::Plus, atom("bot")))],
            stated_conclusion: stated,
        };
        match check_derivation(&bot_elim(None), builtins()) {
            CheckOutcome::Invalid(f) => assert_eq!(f.kind, CheckErrorKind::ArbitraryMark),
            CheckOutcome::Valid { .. } => panic!("expected invalid"),
        }
        let outcome = check_derivation(&bot_elim(Some(sf(Sign::Plus, atom("q")))), builtins());
        let (conclusion, open) = valid(&outcome);
        assert_eq!(*conclusion, sf(Sign::Plus, atom("q")));
        assert_eq!(*open, vec![sf(Sign::Plus, atom("bot"))]);
    }
}

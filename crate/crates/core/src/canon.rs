//! Canonical forms for rule schemas: metavariables renamed to the
//! connective's declared argument variables in the argument order of the
//! governed compound, premises sorted by a fixed total order on their
//! printed form, metadata cleared. Family equality compares canonical
//! multisets.

use std::collections::BTreeMap;

use crate::syntax::{ConnectiveSpec, Formula, Premise, RuleSchema, SchemaEnd, SignedFormula};

/// Canonicalize a rule with respect to a connective. Idempotent and
/// invariant under metavariable renaming and premise reordering.
pub fn canonicalize(rule: &RuleSchema, spec: &ConnectiveSpec) -> RuleSchema {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    if let Some(governed) = rule.governed() {
        if let Formula::App(_, args) = &governed.formula {
            for (i, arg) in args.iter().enumerate() {
                if let (Formula::Var(v), Some(canon)) = (arg, spec.arg_vars.get(i)) {
                    map.entry(v.clone()).or_insert_with(|| canon.clone());
                }
            }
        }
    }

    let rename_sf = |sf: &SignedFormula| SignedFormula {
        sign: sf.sign,
        formula: sf.formula.rename_vars(&map),
    };
    let rename_end = |end: &SchemaEnd| match end {
        SchemaEnd::Formula(sf) => SchemaEnd::Formula(rename_sf(sf)),
        SchemaEnd::Arbitrary => SchemaEnd::Arbitrary,
    };

    let mut premises: Vec<Premise> = rule
        .premises
        .iter()
        .map(|p| match p {
            Premise::Plain(sf) => Premise::Plain(rename_sf(sf)),
            Premise::Side { discharged, end } => {
                let mut discharged: Vec<SignedFormula> =
                    discharged.iter().map(&rename_sf).collect();
                discharged.sort_by_key(|sf| sf.sexpr());
                Premise::Side {
                    discharged,
                    end: rename_end(end),
                }
            }
        })
        .collect();
    premises.sort_by_key(|p| p.sexpr());

    RuleSchema {
        name: String::new(),
        role: rule.role,
        major: rule.major.as_ref().map(&rename_sf),
        premises,
        conclusion: rename_end(&rule.conclusion),
        declared_type: None,
    }
}

pub(crate) fn canonical_family(rules: &[RuleSchema], spec: &ConnectiveSpec) -> Vec<RuleSchema> {
    let mut out: Vec<RuleSchema> = rules.iter().map(|r| canonicalize(r, spec)).collect();
    out.sort_by_key(|r| r.body_key());
    out
}

/// True iff the two families coincide as canonical multisets of rules.
pub fn family_equal(f1: &[RuleSchema], f2: &[RuleSchema], spec: &ConnectiveSpec) -> bool {
    canonical_family(f1, spec) == canonical_family(f2, spec)
}

//! Pretty-printer emitting the connective DSL. Output re-parses to the same
//! specifications.

use crate::syntax::{ConnectiveSpec, Role, RuleSchema, RuleType};

pub fn rule_to_dsl(rule: &RuleSchema, polarity_sign: &str) -> String {
    let mut s = format!("(rule \"{}\" (polarity {})", rule.name, polarity_sign);
    s.push_str(&format!(
        " (role {})",
        match rule.role {
            Role::Intro => "intro",
            Role::Elim => "elim",
        }
    ));
    if let Some(t) = rule.declared_type {
        s.push_str(match t {
            RuleType::Type1 => " (type 1)",
            RuleType::Type2 => " (type 2)",
        });
    }
    if let Some(major) = &rule.major {
        s.push_str(&format!(" (major {})", major.sexpr()));
    }
    s.push_str("\n        (premises");
    for p in &rule.premises {
        s.push(' ');
        s.push_str(&p.sexpr());
    }
    s.push(')');
    s.push_str(&format!(" (conclusion {}))", rule.conclusion.sexpr()));
    s
}

pub fn spec_to_dsl(spec: &ConnectiveSpec) -> String {
    let mut s = format!("(connective \"{}\" (arity {}) (args", spec.name, spec.arity);
    for v in &spec.arg_vars {
        s.push(' ');
        s.push_str(v);
    }
    s.push(')');
    for (key, rules) in spec.families() {
        for rule in rules {
            s.push_str("\n  ");
            s.push_str(&rule_to_dsl(
                rule,
                match key.polarity.sign() {
                    crate::syntax::Sign::Plus => "+",
                    crate::syntax::Sign::Minus => "-",
                },
            ));
        }
    }
    s.push(')');
    s
}

pub fn specs_to_dsl(specs: &[ConnectiveSpec]) -> String {
    let mut s = String::new();
    for spec in specs {
        s.push_str(&spec_to_dsl(spec));
        s.push_str("\n\n");
    }
    s
}

//! Built-in connective library: the six standard connectives of classical
//! bilateral logic plus the pathological controls tonk, conk and honk.

use std::sync::OnceLock;

use crate::parser::{normalize_connective_name, parse_specs};
use crate::syntax::ConnectiveSpec;

const BUILTIN_DSL: &str = include_str!("builtin.rules");

/// Names of the six standard connectives.
pub const STANDARD: [&str; 6] = ["and", "or", "imp", "neg", "bot", "top"];

/// All built-in connective names, standard first.
pub const ALL: [&str; 9] = [
    "and", "or", "imp", "neg", "bot", "top", "tonk", "conk", "honk",
];

pub fn builtins() -> &'static [ConnectiveSpec] {
    static SPECS: OnceLock<Vec<ConnectiveSpec>> = OnceLock::new();
    SPECS.get_or_init(|| parse_specs(BUILTIN_DSL).expect("built-in library parses"))
}

pub fn builtin(name: &str) -> Option<&'static ConnectiveSpec> {
    let name = normalize_connective_name(name);
    builtins().iter().find(|s| s.name == name)
}

/// The six standard connectives.
pub fn standard() -> Vec<&'static ConnectiveSpec> {
    STANDARD
        .iter()
        .map(|n| builtin(n).expect("standard builtin"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{FamilyKey, Polarity, Role};

    #[test]
    fn library_parses_and_is_complete() {
        let specs = builtins();
        assert_eq!(specs.len(), 9);
        for name in ALL {
            assert!(builtin(name).is_some(), "missing builtin {name}");
        }
    }

    #[test]
    fn standard_rule_counts() {
        let count = |name: &str| builtin(name).unwrap().all_rules().count();
        assert_eq!(count("and"), 6);
        assert_eq!(count("or"), 6);
        assert_eq!(count("imp"), 4);
        assert_eq!(count("neg"), 4);
        assert_eq!(count("bot"), 2);
        assert_eq!(count("top"), 2);
        assert_eq!(count("tonk"), 2);
        assert_eq!(count("conk"), 6);
        assert_eq!(count("honk"), 6);
    }

    #[test]
    fn limiting_constants_have_empty_families() {
        let bot = builtin("bot").unwrap();
        assert!(bot
            .family(FamilyKey::new(Polarity::Assertive, Role::Intro))
            .is_empty());
        assert!(bot
            .family(FamilyKey::new(Polarity::Rejective, Role::Elim))
            .is_empty());
        let top = builtin("top").unwrap();
        assert!(top
            .family(FamilyKey::new(Polarity::Assertive, Role::Elim))
            .is_empty());
        assert!(top
            .family(FamilyKey::new(Polarity::Rejective, Role::Intro))
            .is_empty());
    }

    #[test]
    fn glyph_lookup() {
        assert_eq!(builtin("∧").unwrap().name, "and");
        assert_eq!(builtin("⊥").unwrap().name, "bot");
        assert!(builtin("zonk").is_none());
    }
}

//! Signs, formulas, schematic rules and connective specifications.

use std::collections::BTreeMap;
use std::fmt;

/// The force marker of a bilateral judgement: `+` for assertion, `-` for
/// denial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// The opposite sign. Involutive: `s.conjugate().conjugate() == s`.
    pub fn conjugate(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Whether a rule family governs asserted or denied occurrences of its
/// connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Assertive,
    Rejective,
}

impl Polarity {
    pub fn sign(self) -> Sign {
        match self {
            Polarity::Assertive => Sign::Plus,
            Polarity::Rejective => Sign::Minus,
        }
    }

    pub fn opposite(self) -> Polarity {
        match self {
            Polarity::Assertive => Polarity::Rejective,
            Polarity::Rejective => Polarity::Assertive,
        }
    }

    pub fn of_sign(sign: Sign) -> Polarity {
        match sign {
            Sign::Plus => Polarity::Assertive,
            Sign::Minus => Polarity::Rejective,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Assertive => "assertive",
            Polarity::Rejective => "rejective",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Intro,
    Elim,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Intro => "intro",
            Role::Elim => "elim",
        })
    }
}

/// The two rule shapes: type 1 is conjunction/implication-style (one intro
/// built from all and only its premises and discharged hypotheses), type 2
/// is disjunction-style (one elim whose side deductions end in an arbitrary
/// signed formula).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleType {
    Type1,
    Type2,
}

impl RuleType {
    pub fn opposite(self) -> RuleType {
        match self {
            RuleType::Type1 => RuleType::Type2,
            RuleType::Type2 => RuleType::Type1,
        }
    }
}

impl fmt::Display for RuleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleType::Type1 => "type 1",
            RuleType::Type2 => "type 2",
        })
    }
}

/// A propositional formula. In rule schemas the leaves are metavariables
/// (`Var`) or nullary applications; in concrete derivations every leaf is a
/// nullary application, covering both declared constants and uninterpreted
/// atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(String),
    App(String, Vec<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    /// A nullary application: an atom in concrete contexts, a constant in
    /// schematic ones.
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::App(name.into(), Vec::new())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Formula::Var(v) => Some(v),
            Formula::App(..) => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Formula::Var(_) => false,
            Formula::App(_, args) => args.iter().all(Formula::is_closed),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::Var(v) => out.push(v.clone()),
            Formula::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Simultaneous renaming of metavariables; names absent from the map are
    /// kept.
    pub fn rename_vars(&self, map: &BTreeMap<String, String>) -> Formula {
        match self {
            Formula::Var(v) => Formula::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Formula::App(name, args) => Formula::App(
                name.clone(),
                args.iter().map(|a| a.rename_vars(map)).collect(),
            ),
        }
    }

    /// Instantiate metavariables by formulas. Unbound metavariables are kept.
    pub fn substitute(&self, map: &BTreeMap<String, Formula>) -> Formula {
        match self {
            Formula::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Formula::App(name, args) => Formula::App(
                name.clone(),
                args.iter().map(|a| a.substitute(map)).collect(),
            ),
        }
    }

    /// S-expression rendering for schematic contexts: metavariables are
    /// bare, applications are always parenthesized (`(bot)`, `(and A B)`).
    pub fn sexpr(&self) -> String {
        match self {
            Formula::Var(v) => v.clone(),
            Formula::App(name, args) => {
                let mut s = String::from("(");
                s.push_str(name);
                for a in args {
                    s.push(' ');
                    s.push_str(&a.sexpr());
                }
                s.push(')');
                s
            }
        }
    }

    /// Rendering for concrete contexts: atoms and constants are bare.
    pub fn concrete(&self) -> String {
        match self {
            Formula::Var(v) => v.clone(),
            Formula::App(name, args) if args.is_empty() => name.clone(),
            Formula::App(name, args) => {
                let mut s = String::from("(");
                s.push_str(name);
                for a in args {
                    s.push(' ');
                    s.push_str(&a.concrete());
                }
                s.push(')');
                s
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sexpr())
    }
}

/// A formula under a speech-act sign.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedFormula {
    pub sign: Sign,
    pub formula: Formula,
}

impl SignedFormula {
    pub fn new(sign: Sign, formula: Formula) -> SignedFormula {
        SignedFormula { sign, formula }
    }

    /// The same formula with its sign reversed.
    pub fn conjugate(&self) -> SignedFormula {
        SignedFormula {
            sign: self.sign.conjugate(),
            formula: self.formula.clone(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.formula.is_closed()
    }

    pub fn sexpr(&self) -> String {
        format!("({} {})", self.sign, self.formula.sexpr())
    }

    pub fn concrete(&self) -> String {
        format!("({} {})", self.sign, self.formula.concrete())
    }
}

impl fmt::Display for SignedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sexpr())
    }
}

/// The end of a side deduction or a rule conclusion: a definite signed
/// formula, or the placeholder for an arbitrary signed formula (written
/// `_ANY` in the DSL).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaEnd {
    Formula(SignedFormula),
    Arbitrary,
}

impl SchemaEnd {
    pub fn as_formula(&self) -> Option<&SignedFormula> {
        match self {
            SchemaEnd::Formula(sf) => Some(sf),
            SchemaEnd::Arbitrary => None,
        }
    }

    pub fn is_arbitrary(&self) -> bool {
        matches!(self, SchemaEnd::Arbitrary)
    }

    pub fn sexpr(&self) -> String {
        match self {
            SchemaEnd::Formula(sf) => sf.sexpr(),
            SchemaEnd::Arbitrary => "_ANY".to_string(),
        }
    }
}

impl fmt::Display for SchemaEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sexpr())
    }
}

/// One premise slot of a rule schema. A side deduction licenses the
/// discharge of its hypotheses above the deduction of its end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Premise {
    Plain(SignedFormula),
    Side {
        discharged: Vec<SignedFormula>,
        end: SchemaEnd,
    },
}

impl Premise {
    pub fn sexpr(&self) -> String {
        match self {
            Premise::Plain(sf) => sf.sexpr(),
            Premise::Side { discharged, end } => {
                let mut s = String::from("(side (discharge");
                for d in discharged {
                    s.push(' ');
                    s.push_str(&d.sexpr());
                }
                s.push_str(") ");
                s.push_str(&end.sexpr());
                s.push(')');
                s
            }
        }
    }
}

/// A single inference rule schema.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleSchema {
    /// Metadata only; equality of rules ignores names.
    pub name: String,
    pub role: Role,
    /// Present exactly when `role == Elim`.
    pub major: Option<SignedFormula>,
    pub premises: Vec<Premise>,
    pub conclusion: SchemaEnd,
    /// Optional `(type 1)` / `(type 2)` annotation resolving shape-ambiguous
    /// rules.
    pub declared_type: Option<RuleType>,
}

impl RuleSchema {
    /// The signed occurrence of the governed connective: the conclusion for
    /// intros, the major premise for elims.
    pub fn governed(&self) -> Option<&SignedFormula> {
        match self.role {
            Role::Intro => self.conclusion.as_formula(),
            Role::Elim => self.major.as_ref(),
        }
    }

    pub fn polarity(&self) -> Option<Polarity> {
        self.governed().map(|sf| Polarity::of_sign(sf.sign))
    }

    /// Order-insensitive print of the rule body, used as the fixed total
    /// order on rules and premises. Name and type annotation are excluded.
    pub fn body_key(&self) -> String {
        let mut s = String::new();
        s.push_str(match self.role {
            Role::Intro => "intro",
            Role::Elim => "elim",
        });
        if let Some(major) = &self.major {
            s.push_str(" major ");
            s.push_str(&major.sexpr());
        }
        s.push_str(" premises");
        for p in &self.premises {
            s.push(' ');
            s.push_str(&p.sexpr());
        }
        s.push_str(" conclusion ");
        s.push_str(&self.conclusion.sexpr());
        s
    }

    /// Compact human-readable rendering, e.g.
    /// `major (+ (and A B)) |- (+ A)`.
    pub fn display_compact(&self) -> String {
        let mut s = String::new();
        if let Some(major) = &self.major {
            s.push_str("major ");
            s.push_str(&major.sexpr());
            if !self.premises.is_empty() {
                s.push_str("; ");
            }
        }
        let ps: Vec<String> = self.premises.iter().map(|p| p.sexpr()).collect();
        s.push_str(&ps.join(", "));
        s.push_str(" |- ");
        s.push_str(&self.conclusion.sexpr());
        s.trim_start().to_string()
    }
}

/// Names one of the four rule families of a connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyKey {
    pub polarity: Polarity,
    pub role: Role,
}

impl FamilyKey {
    pub const ALL: [FamilyKey; 4] = [
        FamilyKey {
            polarity: Polarity::Assertive,
            role: Role::Intro,
        },
        FamilyKey {
            polarity: Polarity::Assertive,
            role: Role::Elim,
        },
        FamilyKey {
            polarity: Polarity::Rejective,
            role: Role::Intro,
        },
        FamilyKey {
            polarity: Polarity::Rejective,
            role: Role::Elim,
        },
    ];

    pub fn new(polarity: Polarity, role: Role) -> FamilyKey {
        FamilyKey { polarity, role }
    }

    pub fn label(&self) -> &'static str {
        match (self.polarity, self.role) {
            (Polarity::Assertive, Role::Intro) => "assertive-intro",
            (Polarity::Assertive, Role::Elim) => "assertive-elim",
            (Polarity::Rejective, Role::Intro) => "rejective-intro",
            (Polarity::Rejective, Role::Elim) => "rejective-elim",
        }
    }

    pub fn parse(s: &str) -> Option<FamilyKey> {
        FamilyKey::ALL.iter().copied().find(|k| k.label() == s)
    }

    fn index(&self) -> usize {
        match (self.polarity, self.role) {
            (Polarity::Assertive, Role::Intro) => 0,
            (Polarity::Assertive, Role::Elim) => 1,
            (Polarity::Rejective, Role::Intro) => 2,
            (Polarity::Rejective, Role::Elim) => 3,
        }
    }
}

impl fmt::Display for FamilyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A named connective with its arity, declared argument metavariables and
/// four rule families. Families may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectiveSpec {
    pub name: String,
    pub arity: usize,
    pub arg_vars: Vec<String>,
    families: [Vec<RuleSchema>; 4],
}

impl ConnectiveSpec {
    pub fn new(name: impl Into<String>, arity: usize, arg_vars: Vec<String>) -> ConnectiveSpec {
        ConnectiveSpec {
            name: name.into(),
            arity,
            arg_vars,
            families: Default::default(),
        }
    }

    pub fn family(&self, key: FamilyKey) -> &[RuleSchema] {
        &self.families[key.index()]
    }

    pub fn set_family(&mut self, key: FamilyKey, rules: Vec<RuleSchema>) {
        self.families[key.index()] = rules;
    }

    pub fn push_rule(&mut self, key: FamilyKey, rule: RuleSchema) {
        self.families[key.index()].push(rule);
    }

    pub fn families(&self) -> impl Iterator<Item = (FamilyKey, &[RuleSchema])> {
        FamilyKey::ALL.iter().map(move |k| (*k, self.family(*k)))
    }

    pub fn all_rules(&self) -> impl Iterator<Item = &RuleSchema> {
        self.families.iter().flatten()
    }

    pub fn rule(&self, name: &str) -> Option<&RuleSchema> {
        self.all_rules().find(|r| r.name == name)
    }

    /// The connective applied to its argument variables, e.g. `(and A B)`.
    pub fn governed_formula(&self) -> Formula {
        Formula::App(
            self.name.clone(),
            self.arg_vars
                .iter()
                .map(|v| Formula::var(v.clone()))
                .collect(),
        )
    }

    /// The governed compound under the polarity's sign.
    pub fn governed_signed(&self, polarity: Polarity) -> SignedFormula {
        SignedFormula::new(polarity.sign(), self.governed_formula())
    }
}

/// Default canonical metavariable names `A`, `B`, `C`, ...
pub fn default_arg_vars(arity: usize) -> Vec<String> {
    (0..arity)
        .map(|i| {
            let c = (b'A' + (i % 26) as u8) as char;
            if i < 26 {
                c.to_string()
            } else {
                format!("{}{}", c, i / 26)
            }
        })
        .collect()
}

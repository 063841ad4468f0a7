//! Depth-bounded, goal-directed derivation search.
//!
//! The oracle enumerates derivations over a finite universe: the given
//! atoms, the nullary constants of the library, and every library
//! connective applied once to atoms. It is used to produce the collapse
//! fixtures for conk and honk and as the negative control showing that the
//! standard library admits no such collapse at the same bound. Depth is
//! tree depth: an assumption has depth 1, a rule application one more than
//! its deepest child.

use std::collections::HashMap;

use crate::kernel::Derivation;
use crate::syntax::{
    ConnectiveSpec, Formula, Premise, Role, RuleSchema, SchemaEnd, Sign, SignedFormula,
};

type SfId = usize;

#[derive(Clone)]
enum PremiseInst {
    Plain(SfId),
    Side { hyps: Vec<SfId>, end: Option<SfId> },
}

#[derive(Clone)]
enum ConclusionInst {
    Fixed(SfId),
    Any,
}

#[derive(Clone)]
struct Inst {
    connective: String,
    rule: String,
    subst: Vec<(String, Formula)>,
    major: Option<SfId>,
    premises: Vec<PremiseInst>,
    conclusion: ConclusionInst,
}

pub struct SearchOracle {
    signed: Vec<SignedFormula>,
    ids: HashMap<SignedFormula, SfId>,
    /// Intro/elim instances with a definite conclusion, indexed by it.
    by_conclusion: Vec<Vec<Inst>>,
    /// Type-2 eliminations: applicable to any goal.
    any_conclusion: Vec<Inst>,
}

struct SearchState {
    /// Per (goal, context) the largest depth budget known to fail.
    fail_memo: HashMap<(SfId, u64), u8>,
    /// Assumptions in scope, with the label that may discharge them.
    stack: Vec<(SfId, Option<u32>)>,
    next_label: u32,
}

impl SearchState {
    fn fresh_label(&mut self) -> u32 {
        let l = self.next_label;
        self.next_label += 1;
        l
    }
}

fn enumerate_assignments(arity: usize, atoms: &[Formula]) -> Vec<Vec<Formula>> {
    let mut out: Vec<Vec<Formula>> = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for partial in &out {
            for a in atoms {
                let mut v = partial.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl SearchOracle {
    pub fn new(lib: &[ConnectiveSpec], atoms: &[&str]) -> SearchOracle {
        let atom_formulas: Vec<Formula> = atoms.iter().map(|a| Formula::atom(*a)).collect();
        let mut universe: Vec<Formula> = atom_formulas.clone();
        for spec in lib {
            if spec.arity == 0 {
                universe.push(Formula::atom(spec.name.clone()));
            } else {
                for args in enumerate_assignments(spec.arity, &atom_formulas) {
                    universe.push(Formula::App(spec.name.clone(), args));
                }
            }
        }
        universe.dedup();

        let mut signed = Vec::new();
        let mut ids = HashMap::new();
        for f in &universe {
            for sign in [Sign::Plus, Sign::Minus] {
                let sf = SignedFormula::new(sign, f.clone());
                let id = signed.len();
                ids.insert(sf.clone(), id);
                signed.push(sf);
            }
        }
        assert!(
            signed.len() <= 64,
            "search universe too large for the context mask"
        );

        let size = signed.len();
        let mut oracle = SearchOracle {
            signed,
            ids,
            by_conclusion: vec![Vec::new(); size],
            any_conclusion: Vec::new(),
        };

        for spec in lib {
            for rule in spec.all_rules() {
                for args in enumerate_assignments(spec.arity, &atom_formulas) {
                    oracle.add_instance(spec, rule, &args);
                }
            }
        }
        oracle
    }

    fn add_instance(&mut self, spec: &ConnectiveSpec, rule: &RuleSchema, args: &[Formula]) {
        let map: std::collections::BTreeMap<String, Formula> = spec
            .arg_vars
            .iter()
            .cloned()
            .zip(args.iter().cloned())
            .collect();
        let inst_sf = |sf: &SignedFormula| -> Option<SfId> {
            let instantiated = SignedFormula::new(sf.sign, sf.formula.substitute(&map));
            self.ids.get(&instantiated).copied()
        };

        let major = match (&rule.major, rule.role) {
            (Some(m), Role::Elim) => match inst_sf(m) {
                Some(id) => Some(id),
                None => return,
            },
            _ => None,
        };
        let mut premises = Vec::new();
        for p in &rule.premises {
            match p {
                Premise::Plain(sf) => match inst_sf(sf) {
                    Some(id) => premises.push(PremiseInst::Plain(id)),
                    None => return,
                },
                Premise::Side { discharged, end } => {
                    let mut hyps = Vec::new();
                    for d in discharged {
                        match inst_sf(d) {
                            Some(id) => hyps.push(id),
                            None => return,
                        }
                    }
                    let end = match end {
                        SchemaEnd::Arbitrary => None,
                        SchemaEnd::Formula(sf) => match inst_sf(sf) {
                            Some(id) => Some(id),
                            None => return,
                        },
                    };
                    premises.push(PremiseInst::Side { hyps, end });
                }
            }
        }
        let conclusion = match &rule.conclusion {
            SchemaEnd::Arbitrary => ConclusionInst::Any,
            SchemaEnd::Formula(sf) => match inst_sf(sf) {
                Some(id) => ConclusionInst::Fixed(id),
                None => return,
            },
        };

        let inst = Inst {
            connective: spec.name.clone(),
            rule: rule.name.clone(),
            subst: spec
                .arg_vars
                .iter()
                .cloned()
                .zip(args.iter().cloned())
                .collect(),
            major,
            premises,
            conclusion,
        };
        match inst.conclusion {
            ConclusionInst::Fixed(id) => self.by_conclusion[id].push(inst),
            ConclusionInst::Any => self.any_conclusion.push(inst),
        }
    }

    fn id_of(&self, sf: &SignedFormula) -> Option<SfId> {
        self.ids.get(sf).copied()
    }

    /// Search for a derivation of `goal` from the given assumptions with
    /// tree depth at most `depth`. Deepens iteratively, so the first hit is
    /// of minimal depth.
    pub fn prove(
        &mut self,
        assumptions: &[SignedFormula],
        goal: &SignedFormula,
        depth: u8,
    ) -> Option<Derivation> {
        let goal_id = self.id_of(goal)?;
        let mut state = SearchState {
            fail_memo: HashMap::new(),
            stack: Vec::new(),
            next_label: 1,
        };
        let mut mask = 0u64;
        for a in assumptions {
            let id = self.id_of(a)?;
            state.stack.push((id, None));
            mask |= 1 << id;
        }
        for bound in 1..=depth {
            state.next_label = 1;
            if let Some(d) = self.search(&mut state, goal_id, mask, bound) {
                return Some(d);
            }
        }
        None
    }

    fn search(
        &self,
        state: &mut SearchState,
        goal: SfId,
        mask: u64,
        depth: u8,
    ) -> Option<Derivation> {
        if depth == 0 {
            return None;
        }
        if let Some(&failed) = state.fail_memo.get(&(goal, mask)) {
            if failed >= depth {
                return None;
            }
        }

        if mask & (1 << goal) != 0 {
            let (_, label) = state
                .stack
                .iter()
                .rev()
                .find(|(id, _)| *id == goal)
                .expect("mask and stack agree");
            return Some(Derivation::Assumption {
                formula: self.signed[goal].clone(),
                label: *label,
            });
        }

        for inst in &self.by_conclusion[goal] {
            if let Some(d) = self.try_instance(state, inst, goal, mask, depth) {
                return Some(d);
            }
        }
        for inst in &self.any_conclusion {
            if let Some(d) = self.try_instance(state, inst, goal, mask, depth) {
                return Some(d);
            }
        }

        // Co-ordination: the discharged assumption is the goal's conjugate;
        // any conjugate pair derivable alongside it yields the goal.
        if depth >= 2 {
            let beta = goal ^ 1;
            let label = state.fresh_label();
            let saved = state.stack.len();
            state.stack.push((beta, Some(label)));
            let inner_mask = mask | (1 << beta);
            let pairs = self.signed.len() / 2;
            for alpha in (0..pairs).map(|i| 2 * i) {
                let Some(left) = self.search(state, alpha, inner_mask, depth - 1) else {
                    continue;
                };
                if let Some(right) = self.search(state, alpha ^ 1, inner_mask, depth - 1) {
                    state.stack.truncate(saved);
                    return Some(Derivation::Coord {
                        label,
                        assumption: self.signed[beta].clone(),
                        left: Box::new(left),
                        right: Box::new(right),
                    });
                }
            }
            state.stack.truncate(saved);
        }

        let entry = state.fail_memo.entry((goal, mask)).or_insert(0);
        if *entry < depth {
            *entry = depth;
        }
        None
    }

    fn try_instance(
        &self,
        state: &mut SearchState,
        inst: &Inst,
        goal: SfId,
        mask: u64,
        depth: u8,
    ) -> Option<Derivation> {
        let needs_children = inst.major.is_some() || !inst.premises.is_empty();
        if needs_children && depth < 2 {
            return None;
        }
        let mut children = Vec::new();
        let mut discharges = Vec::new();

        if let Some(major) = inst.major {
            children.push(self.search(state, major, mask, depth - 1)?);
        }
        for p in &inst.premises {
            match p {
                PremiseInst::Plain(id) => {
                    children.push(self.search(state, *id, mask, depth - 1)?);
                }
                PremiseInst::Side { hyps, end } => {
                    let label = state.fresh_label();
                    let saved = state.stack.len();
                    let mut inner_mask = mask;
                    for h in hyps {
                        state.stack.push((*h, Some(label)));
                        inner_mask |= 1 << *h;
                    }
                    let subgoal = end.unwrap_or(goal);
                    let result = self.search(state, subgoal, inner_mask, depth - 1);
                    state.stack.truncate(saved);
                    children.push(result?);
                    discharges.push((
                        label,
                        hyps.iter().map(|h| self.signed[*h].clone()).collect(),
                    ));
                }
            }
        }

        let stated_conclusion = match inst.conclusion {
            ConclusionInst::Any => Some(self.signed[goal].clone()),
            ConclusionInst::Fixed(_) => None,
        };
        Some(Derivation::RuleApp {
            connective: inst.connective.clone(),
            rule: inst.rule.clone(),
            subst: inst.subst.clone(),
            discharges,
            children,
            stated_conclusion,
        })
    }
}

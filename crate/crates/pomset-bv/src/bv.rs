//! Deep-inference rule engine: rule instance enumeration (upward for proof
//! search, downward for derivability), derivation checking, bounded proof
//! search with memoization, inclusion-derivation synthesis, and linking
//! extraction from proofs.
//!
//! # Certificate format
//!
//! A derivation is stored as lines `<rule> @ <address> : <formula>`, one
//! step per line, premise side first and the conclusion on the bottom line.
//! Each line's formula is the conclusion of its step; the premise is the
//! formula on the line above. A topmost `start` line carries the
//! derivation's premise; a topmost `ai0_down` line is a premise-less
//! interaction closing a proof. Addresses are `/`-separated child indices
//! into the line's own (raw) formula, `/` meaning the root.
//!
//! Rule lines are matched exactly at the redex; the rest of the formula is
//! compared modulo the structural congruence of the ambient system (with
//! unit laws in BV/SBV, without elsewhere), so explicit `eqv`/`eqv_p`
//! steps are only needed to restate a whole formula.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{
    formula_to_sequent, parse_formula_raw, remove_units, Formula, UnitFree,
};
use crate::rbnet::Linking;
use crate::{Budget, BudgetExceeded};

/// Inference rule identifiers across all the systems handled here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleId {
    // BV / SBV
    AiDown,
    AiUp,
    QDown,
    QUp,
    Switch,
    Eqv,
    // unit-free systems
    EqvP,
    AiNilDown,
    AiTensorDown,
    AiSeqLDown,
    AiSeqRDown,
    Q2Down,
    Q3LDown,
    Q3RDown,
    Q4Down,
    S2,
    S3,
    AiNilUp,
    AiTensorUp,
    AiSeqLUp,
    AiSeqRUp,
    Q2Up,
    Q3LUp,
    Q3RUp,
    Q4Up,
    // hatted variants (restricted instances of the unit-free down rules)
    Q2HatDown,
    Q3LHatDown,
    Q3RHatDown,
    S2Hat,
    S3Hat,
    // weak switch
    Ws,
    // identity macro
    IDown,
    IUp,
    // derivation-premise marker
    Start,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        use RuleId::*;
        match self {
            AiDown => "ai_down",
            AiUp => "ai_up",
            QDown => "q_down",
            QUp => "q_up",
            Switch => "s",
            Eqv => "eqv",
            EqvP => "eqv_p",
            AiNilDown => "ai0_down",
            AiTensorDown => "ai_tensor_down",
            AiSeqLDown => "ai_seql_down",
            AiSeqRDown => "ai_seqr_down",
            Q2Down => "q2_down",
            Q3LDown => "q3l_down",
            Q3RDown => "q3r_down",
            Q4Down => "q4_down",
            S2 => "s2",
            S3 => "s3",
            AiNilUp => "ai0_up",
            AiTensorUp => "ai_tensor_up",
            AiSeqLUp => "ai_seql_up",
            AiSeqRUp => "ai_seqr_up",
            Q2Up => "q2_up",
            Q3LUp => "q3l_up",
            Q3RUp => "q3r_up",
            Q4Up => "q4_up",
            Q2HatDown => "q2h_down",
            Q3LHatDown => "q3lh_down",
            Q3RHatDown => "q3rh_down",
            S2Hat => "s2h",
            S3Hat => "s3h",
            Ws => "ws",
            IDown => "i_down",
            IUp => "i_up",
            Start => "start",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleId> {
        ALL_RULES.iter().copied().find(|r| r.name() == s)
    }

    /// Up rules are anchored on their premise (the line above); down rules
    /// on their conclusion (the line itself).
    pub fn is_up(self) -> bool {
        use RuleId::*;
        matches!(
            self,
            AiUp | QUp
                | AiNilUp
                | AiTensorUp
                | AiSeqLUp
                | AiSeqRUp
                | Q2Up
                | Q3LUp
                | Q3RUp
                | Q4Up
                | IUp
        )
    }

    /// Does this rule consume a dual pair of atoms (interaction)?
    pub fn is_interaction_down(self) -> bool {
        use RuleId::*;
        matches!(self, AiDown | AiNilDown | AiTensorDown | AiSeqLDown | AiSeqRDown)
    }
}

const ALL_RULES: &[RuleId] = &[
    RuleId::AiDown,
    RuleId::AiUp,
    RuleId::QDown,
    RuleId::QUp,
    RuleId::Switch,
    RuleId::Eqv,
    RuleId::EqvP,
    RuleId::AiNilDown,
    RuleId::AiTensorDown,
    RuleId::AiSeqLDown,
    RuleId::AiSeqRDown,
    RuleId::Q2Down,
    RuleId::Q3LDown,
    RuleId::Q3RDown,
    RuleId::Q4Down,
    RuleId::S2,
    RuleId::S3,
    RuleId::AiNilUp,
    RuleId::AiTensorUp,
    RuleId::AiSeqLUp,
    RuleId::AiSeqRUp,
    RuleId::Q2Up,
    RuleId::Q3LUp,
    RuleId::Q3RUp,
    RuleId::Q4Up,
    RuleId::Q2HatDown,
    RuleId::Q3LHatDown,
    RuleId::Q3RHatDown,
    RuleId::S2Hat,
    RuleId::S3Hat,
    RuleId::Ws,
    RuleId::IDown,
    RuleId::IUp,
    RuleId::Start,
];

/// The proof/derivation systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    Bv,
    Sbv,
    Bvu,
    Sbvu,
    Bvhatu,
    /// The non-interaction fragment of SBVu (seq and switch rules, both
    /// directions, no ai rules).
    SbvuNonInteraction,
    /// The non-interaction fragment extended with the weak switch rule.
    Ws,
}

impl System {
    pub fn rules(self) -> Vec<RuleId> {
        use RuleId::*;
        match self {
            System::Bv => vec![AiDown, QDown, Switch, Eqv, EqvP, IDown],
            System::Sbv => {
                vec![AiDown, AiUp, QDown, QUp, Switch, Eqv, EqvP, IDown, IUp]
            }
            System::Bvu => vec![
                AiNilDown,
                AiTensorDown,
                AiSeqLDown,
                AiSeqRDown,
                Q2Down,
                Q3LDown,
                Q3RDown,
                Q4Down,
                S2,
                S3,
                EqvP,
            ],
            System::Sbvu => {
                let mut r = System::Bvu.rules();
                r.extend([
                    AiNilUp,
                    AiTensorUp,
                    AiSeqLUp,
                    AiSeqRUp,
                    Q2Up,
                    Q3LUp,
                    Q3RUp,
                    Q4Up,
                ]);
                r
            }
            System::Bvhatu => vec![
                AiNilDown,
                AiTensorDown,
                AiSeqLDown,
                AiSeqRDown,
                Q2HatDown,
                Q3LHatDown,
                Q3RHatDown,
                Q4Down,
                S2Hat,
                S3Hat,
                EqvP,
            ],
            System::SbvuNonInteraction => vec![
                Q2Down,
                Q3LDown,
                Q3RDown,
                Q4Down,
                S2,
                S3,
                Q2Up,
                Q3LUp,
                Q3RUp,
                Q4Up,
                EqvP,
            ],
            System::Ws => {
                let mut r = System::SbvuNonInteraction.rules();
                r.push(Ws);
                r
            }
        }
    }

    /// Whole-formula congruence used for step matching: with unit laws in
    /// BV/SBV, without elsewhere.
    fn canon(self, f: &Formula) -> Formula {
        match self {
            System::Bv | System::Sbv => f.canonicalize(),
            _ => f.canonicalize_prime(),
        }
    }
}

/// One certificate line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertLine {
    pub rule: RuleId,
    pub addr: Vec<usize>,
    pub formula: Formula,
}

/// A derivation: lines stored bottom-up (index 0 = conclusion line).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation(pub Vec<CertLine>);

impl Derivation {
    pub fn conclusion(&self) -> &Formula {
        &self.0[0].formula
    }

    pub fn premise(&self) -> &Formula {
        &self.0.last().unwrap().formula
    }

    /// Number of proper inference steps (excluding `start` and congruence
    /// restatements).
    pub fn step_count(&self) -> usize {
        self.0
            .iter()
            .filter(|l| !matches!(l.rule, RuleId::Start | RuleId::Eqv | RuleId::EqvP))
            .count()
    }

    pub fn parse(text: &str) -> Result<Derivation, String> {
        let mut lines = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let (head, formula_text) = raw
                .split_once(" : ")
                .ok_or_else(|| format!("line {}: missing ' : '", no + 1))?;
            let (rule_name, addr_text) = head
                .split_once(" @ ")
                .ok_or_else(|| format!("line {}: missing ' @ '", no + 1))?;
            let rule = RuleId::from_name(rule_name.trim())
                .ok_or_else(|| format!("line {}: unknown rule '{rule_name}'", no + 1))?;
            let addr = parse_addr(addr_text.trim())
                .ok_or_else(|| format!("line {}: bad address '{addr_text}'", no + 1))?;
            let formula = parse_formula_raw(formula_text.trim())
                .map_err(|e| format!("line {}: {e}", no + 1))?;
            lines.push(CertLine { rule, addr, formula });
        }
        if lines.is_empty() {
            return Err("empty derivation".into());
        }
        lines.reverse(); // file is top-down, storage is bottom-up
        Ok(Derivation(lines))
    }
}

fn parse_addr(s: &str) -> Option<Vec<usize>> {
    if s == "/" {
        return Some(Vec::new());
    }
    s.strip_prefix('/')?.split('/').map(|p| p.parse().ok()).collect()
}

fn fmt_addr(addr: &[usize]) -> String {
    if addr.is_empty() {
        "/".to_string()
    } else {
        addr.iter().map(|i| format!("/{i}")).collect()
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.0.iter().rev() {
            writeln!(f, "{} @ {} : {}", line.rule.name(), fmt_addr(&line.addr), line.formula)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid step at line {line} ({rule}): {msg}", rule = rule.name())]
pub struct CheckError {
    /// Index of the offending line, counted from the conclusion (0).
    pub line: usize,
    pub rule: RuleId,
    pub msg: String,
}

fn is_dual_atom_pair(cs: &[Formula]) -> Option<(Formula, Formula)> {
    if cs.len() != 2 {
        return None;
    }
    match (&cs[0], &cs[1]) {
        (Formula::Atom { atom: a, .. }, Formula::Atom { atom: b, .. }) if *a == b.dual() => {
            Some((cs[0].clone(), cs[1].clone()))
        }
        _ => None,
    }
}

/// For a down rule: candidate premises matching an exactly-shaped conclusion
/// redex. For an up rule: candidate conclusions matching a premise redex.
pub(crate) fn step_candidates(rule: RuleId, redex: &Formula) -> Vec<Formula> {
    use Formula::{Par, Seq, Tensor};
    let two = |cs: &Vec<Formula>| -> Option<(Formula, Formula)> {
        (cs.len() == 2).then(|| (cs[0].clone(), cs[1].clone()))
    };
    let mut out = Vec::new();
    match rule {
        RuleId::AiDown | RuleId::AiNilDown => {
            if let Par(cs) = redex {
                if is_dual_atom_pair(cs).is_some() {
                    out.push(Formula::Unit);
                }
            }
        }
        RuleId::AiUp | RuleId::AiNilUp => {
            if let Tensor(cs) = redex {
                if is_dual_atom_pair(cs).is_some() {
                    out.push(Formula::Unit);
                }
            }
        }
        RuleId::IDown => {
            if let Par(cs) = redex {
                if let Some((a, b)) = two(cs) {
                    if a.negate().canonicalize() == b.canonicalize() {
                        out.push(Formula::Unit);
                    }
                }
            }
        }
        RuleId::IUp => {
            if let Tensor(cs) = redex {
                if let Some((a, b)) = two(cs) {
                    if a.negate().canonicalize() == b.canonicalize() {
                        out.push(Formula::Unit);
                    }
                }
            }
        }
        RuleId::AiTensorDown => {
            // conclusion ([a|a'] ⊗ B), premise B
            if let Tensor(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    for (p, b) in [(&x, &y), (&y, &x)] {
                        if let Par(pcs) = p {
                            if is_dual_atom_pair(pcs).is_some() {
                                out.push(b.clone());
                            }
                        }
                    }
                }
            }
        }
        RuleId::AiTensorUp => {
            // premise [(a⊗a') | B], conclusion B
            if let Par(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    for (t, b) in [(&x, &y), (&y, &x)] {
                        if let Tensor(tcs) = t {
                            if is_dual_atom_pair(tcs).is_some() {
                                out.push(b.clone());
                            }
                        }
                    }
                }
            }
        }
        RuleId::AiSeqLDown | RuleId::AiSeqRDown => {
            // conclusion ⟨[a|a'];B⟩ resp. ⟨B;[a|a']⟩, premise B
            if let Seq(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    let (p, b) = if rule == RuleId::AiSeqLDown { (&x, &y) } else { (&y, &x) };
                    if let Par(pcs) = p {
                        if is_dual_atom_pair(pcs).is_some() {
                            out.push(b.clone());
                        }
                    }
                }
            }
        }
        RuleId::AiSeqLUp | RuleId::AiSeqRUp => {
            // premise ⟨(a⊗a');B⟩ resp. ⟨B;(a⊗a')⟩, conclusion B
            if let Seq(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    let (t, b) = if rule == RuleId::AiSeqLUp { (&x, &y) } else { (&y, &x) };
                    if let Tensor(tcs) = t {
                        if is_dual_atom_pair(tcs).is_some() {
                            out.push(b.clone());
                        }
                    }
                }
            }
        }
        RuleId::QDown | RuleId::Q4Down => {
            // conclusion [⟨A;B⟩|⟨C;D⟩], premise ⟨[A|C];[B|D]⟩
            if let Par(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    if let (Seq(xs), Seq(ys)) = (&x, &y) {
                        if let (Some((a, b)), Some((c, d))) = (two(xs), two(ys)) {
                            out.push(Seq(vec![
                                Par(vec![a.clone(), c.clone()]),
                                Par(vec![b.clone(), d.clone()]),
                            ]));
                            out.push(Seq(vec![Par(vec![c, a]), Par(vec![d, b])]));
                        }
                    }
                }
            }
        }
        RuleId::QUp | RuleId::Q4Up => {
            // premise (⟨A;B⟩⊗⟨C;D⟩), conclusion ⟨(A⊗C);(B⊗D)⟩
            if let Tensor(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    if let (Seq(xs), Seq(ys)) = (&x, &y) {
                        if let (Some((a, b)), Some((c, d))) = (two(xs), two(ys)) {
                            out.push(Seq(vec![
                                Tensor(vec![a.clone(), c.clone()]),
                                Tensor(vec![b.clone(), d.clone()]),
                            ]));
                            out.push(Seq(vec![Tensor(vec![c, a]), Tensor(vec![d, b])]));
                        }
                    }
                }
            }
        }
        RuleId::Switch | RuleId::S3 | RuleId::S3Hat => {
            // conclusion [(A⊗B)|C], premise ([A|C]⊗B)
            if let Par(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    for (t, c) in [(&x, &y), (&y, &x)] {
                        if let Tensor(tcs) = t {
                            if let Some((a, b)) = two(tcs) {
                                if rule == RuleId::S3Hat && is_par_prime(c) {
                                    continue;
                                }
                                out.push(Tensor(vec![
                                    Par(vec![a.clone(), c.clone()]),
                                    b.clone(),
                                ]));
                                out.push(Tensor(vec![Par(vec![b, c.clone()]), a]));
                            }
                        }
                    }
                }
            }
        }
        RuleId::Q2Down | RuleId::Q2HatDown => {
            // conclusion [A|B], premise ⟨A;B⟩ (both orders)
            if let Par(cs) = redex {
                if let Some((a, b)) = two(cs) {
                    if rule == RuleId::Q2HatDown && (is_par_prime(&a) || is_par_prime(&b)) {
                        // hatted: neither side may itself be a par
                    } else {
                        out.push(Seq(vec![a.clone(), b.clone()]));
                        out.push(Seq(vec![b, a]));
                    }
                }
            }
        }
        RuleId::Q2Up => {
            // premise (A⊗B), conclusion ⟨A;B⟩ (both orders)
            if let Tensor(cs) = redex {
                if let Some((a, b)) = two(cs) {
                    out.push(Seq(vec![a.clone(), b.clone()]));
                    out.push(Seq(vec![b, a]));
                }
            }
        }
        RuleId::S2 | RuleId::S2Hat => {
            // conclusion [A|B], premise (A⊗B)
            if let Par(cs) = redex {
                if let Some((a, b)) = two(cs) {
                    if rule == RuleId::S2Hat && (is_par_prime(&a) || is_par_prime(&b)) {
                        // hatted restriction
                    } else {
                        out.push(Tensor(vec![a, b]));
                    }
                }
            }
        }
        RuleId::Q3LDown | RuleId::Q3LHatDown => {
            // conclusion [⟨A;B⟩|C], premise ⟨[A|C];B⟩
            if let Par(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    for (s, c) in [(&x, &y), (&y, &x)] {
                        if let Seq(scs) = s {
                            if let Some((a, b)) = two(scs) {
                                if rule == RuleId::Q3LHatDown && is_par_prime(c) {
                                    continue;
                                }
                                out.push(Seq(vec![Par(vec![a, c.clone()]), b]));
                            }
                        }
                    }
                }
            }
        }
        RuleId::Q3RDown | RuleId::Q3RHatDown => {
            // conclusion [⟨A;B⟩|C], premise ⟨A;[B|C]⟩
            if let Par(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    for (s, c) in [(&x, &y), (&y, &x)] {
                        if let Seq(scs) = s {
                            if let Some((a, b)) = two(scs) {
                                if rule == RuleId::Q3RHatDown && is_par_prime(c) {
                                    continue;
                                }
                                out.push(Seq(vec![a, Par(vec![b, c.clone()])]));
                            }
                        }
                    }
                }
            }
        }
        RuleId::Q3LUp => {
            // premise (⟨A;B⟩⊗C), conclusion ⟨(A⊗C);B⟩
            if let Tensor(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    for (s, c) in [(&x, &y), (&y, &x)] {
                        if let Seq(scs) = s {
                            if let Some((a, b)) = two(scs) {
                                out.push(Seq(vec![Tensor(vec![a, c.clone()]), b]));
                            }
                        }
                    }
                }
            }
        }
        RuleId::Q3RUp => {
            // premise (⟨A;B⟩⊗C), conclusion ⟨A;(B⊗C)⟩
            if let Tensor(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    for (s, c) in [(&x, &y), (&y, &x)] {
                        if let Seq(scs) = s {
                            if let Some((a, b)) = two(scs) {
                                out.push(Seq(vec![a, Tensor(vec![b, c.clone()])]));
                            }
                        }
                    }
                }
            }
        }
        RuleId::Ws => {
            // conclusion [(A⊗C)|(B⊗D)], premise ([A|B]⊗[C|D])
            if let Par(cs) = redex {
                if let Some((x, y)) = two(cs) {
                    if let (Tensor(xs), Tensor(ys)) = (&x, &y) {
                        if let (Some((a, c)), Some((b, d))) = (two(xs), two(ys)) {
                            for (a, c) in [(a.clone(), c.clone()), (c, a)] {
                                for (b, d) in [(b.clone(), d.clone()), (d.clone(), b.clone())] {
                                    out.push(Tensor(vec![
                                        Par(vec![a.clone(), b]),
                                        Par(vec![c.clone(), d]),
                                    ]));
                                }
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

fn is_par_prime(f: &Formula) -> bool {
    matches!(f.canonicalize_prime(), Formula::Par(_))
}

/// Check a derivation against a system. Reports the first invalid step.
pub fn check_derivation(d: &Derivation, system: System) -> Result<(), CheckError> {
    replay(d, system).map(|_| ())
}

/// Result of a successful replay: the dual pairs (by conclusion occurrence
/// index) consumed by interaction steps.
struct Replay {
    consumed: Vec<(usize, usize)>,
}

fn replay(d: &Derivation, system: System) -> Result<Replay, CheckError> {
    let rules = system.rules();
    let err = |line: usize, rule: RuleId, msg: String| CheckError { line, rule, msg };
    let mut consumed: Vec<(usize, usize)> = Vec::new();

    // The conclusion line's atoms get tags 1..=n; tags are threaded upward
    // so interaction steps can report which occurrences they consume.
    let mut cur = d.0[0].formula.clone();
    cur.clear_tags();
    cur.assign_tags();

    for i in 0..d.0.len() {
        let line = &d.0[i];
        let top = i + 1 == d.0.len();
        let rule = line.rule;
        if rule != RuleId::Start && !rules.contains(&rule) {
            return Err(err(i, rule, format!("rule not in system {system:?}")));
        }
        match rule {
            RuleId::Start => {
                if !top {
                    return Err(err(i, rule, "start must be the topmost line".into()));
                }
                continue;
            }
            RuleId::AiNilDown if top => {
                // premise-less interaction closing a proof
                match &cur {
                    Formula::Par(cs) => match is_dual_atom_pair(cs) {
                        Some((a, b)) if tag_of(&a) > 0 && tag_of(&b) > 0 => {
                            consumed.push((tag_of(&a) - 1, tag_of(&b) - 1));
                            continue;
                        }
                        Some(_) => continue,
                        None => {
                            return Err(err(i, rule, "topmost formula is not a dual atom pair".into()))
                        }
                    },
                    _ => {
                        return Err(err(i, rule, "topmost formula is not a dual atom pair".into()))
                    }
                }
            }
            _ => {}
        }
        if top {
            return Err(err(i, rule, "topmost line must be start or ai0_down".into()));
        }
        let above = &d.0[i + 1].formula;
        match rule {
            RuleId::Eqv => {
                if cur.canonicalize() != above.canonicalize() {
                    return Err(err(i, rule, "formulas are not congruent".into()));
                }
                cur = transfer_tags(&cur, above, false)
                    .ok_or_else(|| err(i, rule, "congruence tag transfer failed".into()))?;
            }
            RuleId::EqvP => {
                if cur.canonicalize_prime() != above.canonicalize_prime() {
                    return Err(err(i, rule, "formulas are not unit-free congruent".into()));
                }
                cur = transfer_tags(&cur, above, true)
                    .ok_or_else(|| err(i, rule, "congruence tag transfer failed".into()))?;
            }
            rule if rule.is_up() => {
                // anchored on the premise (line above)
                let redex = above.subterm_at(&line.addr).ok_or_else(|| {
                    err(i, rule, format!("bad address {}", fmt_addr(&line.addr)))
                })?;
                let mut ok = false;
                for cand in step_candidates(rule, redex) {
                    let plugged = above.replace_at(&line.addr, cand).unwrap();
                    if system.canon(&plugged) == system.canon(&cur) {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    return Err(err(i, rule, "no rule instance matches".into()));
                }
                // Up rules are supported for checking only; tag threading
                // through them is not needed for linking extraction and is
                // reset conservatively.
                let mut next = above.clone();
                next.clear_tags();
                cur = next;
            }
            rule => {
                // anchored on the conclusion (this line)
                let lf = transfer_tags(&cur, &line.formula, !matches!(system, System::Bv | System::Sbv))
                    .unwrap_or_else(|| {
                        let mut f = line.formula.clone();
                        f.clear_tags();
                        f
                    });
                if system.canon(&lf) != system.canon(&cur) {
                    return Err(err(i, rule, "line formula does not match the derivation".into()));
                }
                let redex = lf.subterm_at(&line.addr).ok_or_else(|| {
                    err(i, rule, format!("bad address {}", fmt_addr(&line.addr)))
                })?;
                let mut matched = None;
                for cand in step_candidates(rule, redex) {
                    let plugged = lf.replace_at(&line.addr, cand).unwrap();
                    if system.canon(&plugged) == system.canon(above) {
                        matched = Some(plugged);
                        break;
                    }
                }
                let plugged = matched
                    .ok_or_else(|| err(i, rule, "no rule instance matches the premise".into()))?;
                if rule.is_interaction_down() || rule == RuleId::IDown {
                    // record the atoms of the deleted dual par (if atomic)
                    if let Some(pair) = consumed_pair(rule, redex) {
                        consumed.push(pair);
                    }
                }
                cur = transfer_tags(
                    &plugged,
                    above,
                    !matches!(system, System::Bv | System::Sbv),
                )
                .ok_or_else(|| err(i, rule, "premise tag transfer failed".into()))?;
            }
        }
    }
    Ok(Replay { consumed })
}

fn tag_of(f: &Formula) -> usize {
    match f {
        Formula::Atom { tag, .. } => *tag as usize,
        _ => 0,
    }
}

/// The occurrence pair consumed by an interaction step, read off the tagged
/// redex. Returns `None` for the i↓ macro over non-atomic formulas.
fn consumed_pair(rule: RuleId, redex: &Formula) -> Option<(usize, usize)> {
    let from_par = |cs: &Vec<Formula>| {
        is_dual_atom_pair(cs)
            .filter(|(a, b)| tag_of(a) > 0 && tag_of(b) > 0)
            .map(|(a, b)| (tag_of(&a) - 1, tag_of(&b) - 1))
    };
    match (rule, redex) {
        (RuleId::AiDown | RuleId::AiNilDown | RuleId::IDown, Formula::Par(cs)) => from_par(cs),
        (RuleId::AiTensorDown, Formula::Tensor(cs)) => cs.iter().find_map(|c| match c {
            Formula::Par(pcs) => from_par(pcs),
            _ => None,
        }),
        (RuleId::AiSeqLDown, Formula::Seq(cs)) => match cs.first() {
            Some(Formula::Par(pcs)) => from_par(pcs),
            _ => None,
        },
        (RuleId::AiSeqRDown, Formula::Seq(cs)) => match cs.last() {
            Some(Formula::Par(pcs)) => from_par(pcs),
            _ => None,
        },
        _ => None,
    }
}

/// Copy atom tags from `src` onto the (untagged) raw formula `dst`, pairing
/// atoms positionally through their canonical forms. Requires the formulas
/// to be congruent (`prime` selects the unit-free congruence).
fn transfer_tags(src: &Formula, dst: &Formula, prime: bool) -> Option<Formula> {
    let canon = |f: &Formula| if prime { f.canonicalize_prime() } else { f.canonicalize() };
    let canon_src = canon(src);
    let mut dst_idx = dst.clone();
    dst_idx.clear_tags();
    dst_idx.assign_tags();
    let canon_dst = canon(&dst_idx);
    if canon_src != canon_dst {
        return None;
    }
    let src_tags = canon_src.atom_tags();
    let dst_pos = canon_dst.atom_tags();
    let mut tags = vec![0u32; dst.size()];
    for (&t, &p) in src_tags.iter().zip(dst_pos.iter()) {
        tags[(p - 1) as usize] = t;
    }
    let mut out = dst.clone();
    let mut i = 0usize;
    set_tags(&mut out, &tags, &mut i);
    Some(out)
}

fn set_tags(f: &mut Formula, tags: &[u32], i: &mut usize) {
    match f {
        Formula::Unit => {}
        Formula::Atom { tag, .. } => {
            *tag = tags[*i];
            *i += 1;
        }
        Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
            for c in cs {
                set_tags(c, tags, i);
            }
        }
    }
}

/// Extract the axiom linking determined by a proof's interaction steps, as
/// occurrence-index pairs of the conclusion formula.
pub fn extract_linking(d: &Derivation, system: System) -> Result<Linking, CheckError> {
    let replayed = replay(d, system)?;
    let n = d.conclusion().size();
    let pairs = replayed.consumed;
    if pairs.len() * 2 != n {
        return Err(CheckError {
            line: 0,
            rule: RuleId::Start,
            msg: format!(
                "interaction steps consumed {} atoms out of {n}",
                pairs.len() * 2
            ),
        });
    }
    let l = Linking(pairs);
    if !crate::rbnet::linking_is_valid(&formula_to_sequent(d.conclusion()), &l) {
        return Err(CheckError {
            line: 0,
            rule: RuleId::Start,
            msg: "consumed pairs do not form a linking".into(),
        });
    }
    Ok(l)
}

// ---------------------------------------------------------------------------
// Rule instance enumeration
// ---------------------------------------------------------------------------

/// A rule instance found by enumeration.
#[derive(Clone, Debug)]
pub struct RuleApp {
    pub rule: RuleId,
    /// Raw formula exhibiting the redex as an exact binary pattern.
    pub shaped: Formula,
    /// Address of the redex within `shaped`.
    pub addr: Vec<usize>,
    /// The other side of the step, in canonical (unit-free) form. For
    /// upward enumeration this is the premise; downward, the conclusion.
    /// `None` for the premise-less `ai0_down`.
    pub other: Option<Formula>,
}

fn group(kind: &Formula, mut children: Vec<Formula>) -> Formula {
    if children.len() == 1 {
        return children.pop().unwrap();
    }
    match kind {
        Formula::Par(_) => Formula::Par(children),
        Formula::Tensor(_) => Formula::Tensor(children),
        _ => Formula::Seq(children),
    }
}

fn par2(a: Formula, b: Formula) -> Formula {
    Formula::Par(vec![a, b])
}
fn tensor2(a: Formula, b: Formula) -> Formula {
    Formula::Tensor(vec![a, b])
}
fn seq2(a: Formula, b: Formula) -> Formula {
    Formula::Seq(vec![a, b])
}

/// Nonempty proper "groupings" of a child list for metavariable matching:
/// hatted rules only allow single children, unhatted allow any subset.
fn subsets(n: usize, single_only: bool) -> Vec<Vec<usize>> {
    if single_only {
        return (0..n).map(|i| vec![i]).collect();
    }
    assert!(n <= 16, "par/tensor width too large for subset enumeration");
    (1u32..(1 << n)).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect()
}

fn pick(cs: &[Formula], idx: &[usize]) -> Vec<Formula> {
    idx.iter().map(|&i| cs[i].clone()).collect()
}

fn rest(cs: &[Formula], used: &[usize]) -> Vec<Formula> {
    (0..cs.len()).filter(|i| !used.contains(i)).map(|i| cs[i].clone()).collect()
}

/// Enumerate every instance of the given rules whose conclusion is
/// congruent to the canonical formula `c`, returning the premise of each.
pub fn premises_of(
    rules: &[RuleId],
    c: &Formula,
    budget: &mut Budget,
) -> Result<Vec<RuleApp>, BudgetExceeded> {
    let mut out = Vec::new();
    walk_up(rules, c, c, &mut Vec::new(), &mut out, budget)?;
    // top-level premise-less interaction
    if rules.contains(&RuleId::AiNilDown) {
        if let Formula::Par(cs) = c {
            if is_dual_atom_pair(cs).is_some() {
                out.push(RuleApp {
                    rule: RuleId::AiNilDown,
                    shaped: c.clone(),
                    addr: Vec::new(),
                    other: None,
                });
            }
        }
    }
    Ok(out)
}

fn has(rules: &[RuleId], r: RuleId) -> bool {
    rules.contains(&r)
}

/// Replace the subtree at `path` inside `root` with `node_replacement`,
/// producing a raw (non-canonical) formula.
fn rebuild(root: &Formula, path: &[usize], node_replacement: Formula) -> Formula {
    root.replace_at(path, node_replacement).expect("valid path")
}

#[allow(clippy::too_many_arguments)]
fn walk_up(
    rules: &[RuleId],
    root: &Formula,
    node: &Formula,
    path: &mut Vec<usize>,
    out: &mut Vec<RuleApp>,
    budget: &mut Budget,
) -> Result<(), BudgetExceeded> {
    match node {
        Formula::Par(cs) => enum_par_up(rules, root, node, cs, path, out, budget)?,
        Formula::Tensor(cs) => enum_tensor_up(rules, root, node, cs, path, out, budget)?,
        Formula::Seq(cs) => enum_seq_up(rules, root, node, cs, path, out, budget)?,
        _ => return Ok(()),
    }
    if let Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) = node {
        for (i, child) in cs.iter().enumerate() {
            path.push(i);
            walk_up(rules, root, child, path, out, budget)?;
            path.pop();
        }
    }
    Ok(())
}

/// Push a found instance: the redex pattern is placed as the last child of
/// the node (or the node itself when it consumes all children), and the
/// node-level premise is canonicalized into the whole formula.
#[allow(clippy::too_many_arguments)]
fn push_app(
    rule: RuleId,
    root: &Formula,
    node: &Formula,
    used: &[usize],
    cs: &[Formula],
    redex: Formula,
    premise_node: Formula,
    path: &[usize],
    out: &mut Vec<RuleApp>,
) {
    let rest = rest(cs, used);
    let (shaped_node, addr) = if rest.is_empty() {
        (redex, path.to_vec())
    } else {
        let mut kids = rest.clone();
        kids.push(redex);
        let mut addr = path.to_vec();
        addr.push(kids.len() - 1);
        (group(node, kids), addr)
    };
    let shaped = rebuild(root, path, shaped_node);
    let premise_whole = {
        let mut kids = rest;
        kids.push(premise_node);
        rebuild(root, path, group(node, kids)).canonicalize_prime()
    };
    out.push(RuleApp { rule, shaped, addr, other: Some(premise_whole) });
}

#[allow(clippy::too_many_arguments)]
fn enum_par_up(
    rules: &[RuleId],
    root: &Formula,
    node: &Formula,
    cs: &[Formula],
    path: &mut Vec<usize>,
    out: &mut Vec<RuleApp>,
    budget: &mut Budget,
) -> Result<(), BudgetExceeded> {
    let n = cs.len();
    // q2 / s2: conclusion [A|B]
    for (rule, hat, ordered) in [
        (RuleId::Q2Down, false, true),
        (RuleId::Q2HatDown, true, true),
        (RuleId::S2, false, false),
        (RuleId::S2Hat, true, false),
    ] {
        if !has(rules, rule) {
            continue;
        }
        let groups = subsets(n, hat);
        for ga in &groups {
            for gb in &groups {
                if ga.iter().any(|i| gb.contains(i)) {
                    continue;
                }
                if !ordered && ga[0] > gb[0] {
                    continue;
                }
                budget.tick()?;
                let a = group(node, pick(cs, ga));
                let b = group(node, pick(cs, gb));
                let used: Vec<usize> = ga.iter().chain(gb).copied().collect();
                let premise_node = match rule {
                    RuleId::Q2Down | RuleId::Q2HatDown => seq2(a.clone(), b.clone()),
                    _ => tensor2(a.clone(), b.clone()),
                };
                push_app(rule, root, node, &used, cs, par2(a, b), premise_node, path, out);
            }
        }
    }
    // q3l / q3r: conclusion [⟨A;B⟩|C]
    for (rule, hat, left) in [
        (RuleId::Q3LDown, false, true),
        (RuleId::Q3LHatDown, true, true),
        (RuleId::Q3RDown, false, false),
        (RuleId::Q3RHatDown, true, false),
    ] {
        if !has(rules, rule) {
            continue;
        }
        for (si, schild) in cs.iter().enumerate() {
            let Formula::Seq(scs) = schild else { continue };
            for split in 1..scs.len() {
                let a = group(schild, scs[..split].to_vec());
                let b = group(schild, scs[split..].to_vec());
                for gc in subsets(n, hat) {
                    if gc.contains(&si) {
                        continue;
                    }
                    budget.tick()?;
                    let cf = group(node, pick(cs, &gc));
                    let used: Vec<usize> =
                        gc.iter().copied().chain(std::iter::once(si)).collect();
                    let premise_node = if left {
                        seq2(par2(a.clone(), cf.clone()), b.clone())
                    } else {
                        seq2(a.clone(), par2(b.clone(), cf.clone()))
                    };
                    push_app(
                        rule,
                        root,
                        node,
                        &used,
                        cs,
                        par2(seq2(a.clone(), b.clone()), cf),
                        premise_node,
                        path,
                        out,
                    );
                }
            }
        }
    }
    // q4: conclusion [⟨A;B⟩|⟨C;D⟩]
    if has(rules, RuleId::Q4Down) || has(rules, RuleId::QDown) {
        let rule = if has(rules, RuleId::Q4Down) { RuleId::Q4Down } else { RuleId::QDown };
        for (si, schild) in cs.iter().enumerate() {
            let Formula::Seq(scs) = schild else { continue };
            for (ti, tchild) in cs.iter().enumerate() {
                if ti == si {
                    continue;
                }
                let Formula::Seq(tcs) = tchild else { continue };
                for sp in 1..scs.len() {
                    for tp in 1..tcs.len() {
                        budget.tick()?;
                        let a = group(schild, scs[..sp].to_vec());
                        let b = group(schild, scs[sp..].to_vec());
                        let c = group(tchild, tcs[..tp].to_vec());
                        let d = group(tchild, tcs[tp..].to_vec());
                        let premise_node =
                            seq2(par2(a.clone(), c.clone()), par2(b.clone(), d.clone()));
                        push_app(
                            rule,
                            root,
                            node,
                            &[si, ti],
                            cs,
                            par2(seq2(a, b), seq2(c, d)),
                            premise_node,
                            path,
                            out,
                        );
                    }
                }
            }
        }
    }
    // s3: conclusion [(A⊗B)|C]
    for (rule, hat) in [(RuleId::S3, false), (RuleId::S3Hat, true), (RuleId::Switch, false)] {
        if !has(rules, rule) {
            continue;
        }
        for (ti, tchild) in cs.iter().enumerate() {
            let Formula::Tensor(tcs) = tchild else { continue };
            for ga in subsets(tcs.len(), false) {
                if ga.len() == tcs.len() {
                    continue;
                }
                let a = group(tchild, pick(tcs, &ga));
                let b = group(tchild, rest(tcs, &ga));
                for gc in subsets(n, hat) {
                    if gc.contains(&ti) {
                        continue;
                    }
                    budget.tick()?;
                    let cf = group(node, pick(cs, &gc));
                    let used: Vec<usize> =
                        gc.iter().copied().chain(std::iter::once(ti)).collect();
                    push_app(
                        rule,
                        root,
                        node,
                        &used,
                        cs,
                        par2(tensor2(a.clone(), b.clone()), cf.clone()),
                        tensor2(par2(a.clone(), cf), b.clone()),
                        path,
                        out,
                    );
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn enum_tensor_up(
    rules: &[RuleId],
    root: &Formula,
    node: &Formula,
    cs: &[Formula],
    path: &mut Vec<usize>,
    out: &mut Vec<RuleApp>,
    budget: &mut Budget,
) -> Result<(), BudgetExceeded> {
    // ai⊗↓: conclusion ([a|a'] ⊗ B), premise B
    if has(rules, RuleId::AiTensorDown) {
        for (i, child) in cs.iter().enumerate() {
            let Formula::Par(pcs) = child else { continue };
            if is_dual_atom_pair(pcs).is_none() {
                continue;
            }
            budget.tick()?;
            let b = group(node, rest(cs, &[i]));
            let shaped_node = tensor2(child.clone(), b.clone());
            let shaped = rebuild(root, path, shaped_node);
            let premise = rebuild(root, path, b).canonicalize_prime();
            out.push(RuleApp {
                rule: RuleId::AiTensorDown,
                shaped,
                addr: path.clone(),
                other: Some(premise),
            });
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn enum_seq_up(
    rules: &[RuleId],
    root: &Formula,
    node: &Formula,
    cs: &[Formula],
    path: &mut Vec<usize>,
    out: &mut Vec<RuleApp>,
    budget: &mut Budget,
) -> Result<(), BudgetExceeded> {
    // ai◁L↓ / ai◁R↓: delete a dual par child of a seq
    for (i, child) in cs.iter().enumerate() {
        let Formula::Par(pcs) = child else { continue };
        if is_dual_atom_pair(pcs).is_none() {
            continue;
        }
        // prefer the L rule (a successor exists), fall back to R; the
        // address points at the binary seq redex ⟨[a|a'];B⟩ resp. ⟨B;[a|a']⟩
        let (rule, shaped_node, addr_tail) = if i + 1 < cs.len() {
            if !has(rules, RuleId::AiSeqLDown) {
                continue;
            }
            let b = group(node, cs[i + 1..].to_vec());
            let sub = seq2(child.clone(), b);
            if i == 0 {
                (RuleId::AiSeqLDown, sub, None)
            } else {
                let mut kids = cs[..i].to_vec();
                kids.push(sub);
                (RuleId::AiSeqLDown, Formula::Seq(kids), Some(i))
            }
        } else {
            if !has(rules, RuleId::AiSeqRDown) {
                continue;
            }
            let b = group(node, cs[..i].to_vec());
            (RuleId::AiSeqRDown, seq2(b, child.clone()), None)
        };
        budget.tick()?;
        let shaped = rebuild(root, path, shaped_node);
        let mut addr = path.clone();
        addr.extend(addr_tail);
        let premise = {
            let kids: Vec<Formula> =
                cs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, c)| c.clone()).collect();
            rebuild(root, path, group(node, kids)).canonicalize_prime()
        };
        out.push(RuleApp { rule, shaped, addr, other: Some(premise) });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Proof search
// ---------------------------------------------------------------------------

/// Memoizing bottom-up proof searcher over a fixed rule set. Complete for
/// the unit-free down-rule systems because every non-congruence step
/// strictly shrinks the complement of the relational graph's edge set.
pub struct Prover {
    rules: Vec<RuleId>,
    // keyed by the printed canonical form: far smaller than the tree, and
    // display is injective (parse ∘ display is the identity)
    memo: HashMap<String, Option<Rc<Vec<RuleApp>>>>,
    pub expansions: u64,
}

impl Prover {
    pub fn new(rules: Vec<RuleId>) -> Self {
        Prover { rules, memo: HashMap::new(), expansions: 0 }
    }

    pub fn for_system(system: System) -> Self {
        Prover::new(system.rules())
    }

    /// Search a proof of the canonical unit-free formula `c`. Returns the
    /// chain of rule applications from `c` up to the closing `ai0_down`.
    pub fn search(
        &mut self,
        c: &Formula,
        budget: &mut Budget,
    ) -> Result<Option<Rc<Vec<RuleApp>>>, BudgetExceeded> {
        let key = c.normalize_vars().to_string();
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        self.expansions += 1;
        // Every atom of a provable formula is eventually consumed by an
        // interaction pairing dual occurrences, so occurrence counts per
        // variable must balance.
        if !atom_counts_balance(c) {
            self.memo.insert(key, None);
            return Ok(None);
        }
        let mut apps = premises_of(&self.rules, c, budget)?;
        // Deterministic search order: interactions first (they shrink the
        // formula), then seq rules, then switches.
        apps.sort_by(|x, y| (rule_priority(x.rule), &x.addr).cmp(&(rule_priority(y.rule), &y.addr)));
        let mut seen = std::collections::HashSet::new();
        apps.retain(|a| match &a.other {
            None => true,
            Some(p) => seen.insert(p.clone()),
        });
        let mut found: Option<Rc<Vec<RuleApp>>> = None;
        for app in apps {
            match &app.other {
                None => {
                    found = Some(Rc::new(vec![app]));
                    break;
                }
                Some(premise) => {
                    if let Some(rest) = self.search(premise, budget)? {
                        let mut chain = Vec::with_capacity(rest.len() + 1);
                        chain.push(app);
                        chain.extend(rest.iter().cloned());
                        found = Some(Rc::new(chain));
                        break;
                    }
                }
            }
        }
        self.memo.insert(key, found.clone());
        Ok(found)
    }
}

fn rule_priority(r: RuleId) -> u8 {
    use RuleId::*;
    match r {
        AiNilDown => 0,
        AiDown | AiTensorDown | AiSeqLDown | AiSeqRDown => 1,
        Q2Down | Q3LDown | Q3RDown | Q4Down | QDown | Q2HatDown | Q3LHatDown | Q3RHatDown => 2,
        _ => 3,
    }
}

fn atom_counts_balance(c: &Formula) -> bool {
    let mut counts: HashMap<(&str, bool), i64> = HashMap::new();
    fn walk<'a>(f: &'a Formula, counts: &mut HashMap<(&'a str, bool), i64>) {
        match f {
            Formula::Unit => {}
            Formula::Atom { atom, .. } => {
                *counts.entry((atom.var.as_str(), atom.neg)).or_default() += 1;
            }
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                for c in cs {
                    walk(c, counts);
                }
            }
        }
    }
    walk(c, &mut counts);
    counts
        .iter()
        .all(|(&(v, neg), &n)| n == counts.get(&(v, !neg)).copied().unwrap_or(0))
}

/// Search a proof of `a` in the given system. BV proofs are found via the
/// hatted unit-free system and translated back; the BV certificate's
/// conclusion is `a` itself, reached by a closing congruence step.
pub fn prove(
    a: &Formula,
    system: System,
    budget: &mut Budget,
) -> Result<Option<Derivation>, BudgetExceeded> {
    let c = match remove_units(a) {
        UnitFree::Unit => {
            if system == System::Bv {
                // A ≡ I: the empty BV proof plus a congruence step.
                return Ok(Some(Derivation(vec![
                    CertLine { rule: RuleId::Eqv, addr: vec![], formula: a.clone() },
                    CertLine { rule: RuleId::Start, addr: vec![], formula: Formula::Unit },
                ])));
            }
            return Ok(None); // the unit-free systems have no unit
        }
        UnitFree::Formula(c) => c,
    };
    let mut prover = Prover::for_system(match system {
        System::Bv | System::Bvhatu => System::Bvhatu,
        System::Bvu => System::Bvhatu, // hatted instances are BVu instances
        other => other,
    });
    let Some(chain) = prover.search(&c, budget)? else {
        return Ok(None);
    };
    Ok(Some(assemble(a, &c, &chain, system)))
}

/// Search with an explicit rule set (used to probe restricted systems).
pub fn prove_with_rules(
    a: &Formula,
    rules: Vec<RuleId>,
    budget: &mut Budget,
) -> Result<Option<Derivation>, BudgetExceeded> {
    let c = match remove_units(a) {
        UnitFree::Unit => return Ok(None),
        UnitFree::Formula(c) => c,
    };
    let mut prover = Prover::new(rules);
    Ok(prover.search(&c, budget)?.map(|chain| assemble(a, &c, &chain, System::Bvu)))
}

fn assemble(a: &Formula, _c: &Formula, chain: &[RuleApp], system: System) -> Derivation {
    let mut lines = Vec::new();
    match system {
        System::Bv => {
            for app in chain {
                lines.push(bv_line(app));
            }
            lines.push(CertLine { rule: RuleId::Start, addr: vec![], formula: Formula::Unit });
        }
        _ => {
            let unhat = system == System::Bvu;
            for app in chain {
                let rule = if unhat { unhatted(app.rule) } else { app.rule };
                lines.push(CertLine { rule, addr: app.addr.clone(), formula: app.shaped.clone() });
            }
        }
    }
    // The certificate's bottom line must be the conclusion as given.
    if lines[0].formula != *a {
        let rule = if system == System::Bv { RuleId::Eqv } else { RuleId::EqvP };
        lines.insert(0, CertLine { rule, addr: vec![], formula: a.clone() });
    }
    Derivation(lines)
}

fn unhatted(r: RuleId) -> RuleId {
    match r {
        RuleId::Q2HatDown => RuleId::Q2Down,
        RuleId::Q3LHatDown => RuleId::Q3LDown,
        RuleId::Q3RHatDown => RuleId::Q3RDown,
        RuleId::S2Hat => RuleId::S2,
        RuleId::S3Hat => RuleId::S3,
        other => other,
    }
}

/// Translate one unit-free step into a BV certificate line, materializing
/// units where the BV rules q↓ and s need them.
fn bv_line(app: &RuleApp) -> CertLine {
    use Formula::Unit;
    let f = &app.shaped;
    let at = |addr: &[usize]| f.subterm_at(addr).unwrap().clone();
    match app.rule {
        RuleId::AiNilDown => {
            CertLine { rule: RuleId::AiDown, addr: app.addr.clone(), formula: f.clone() }
        }
        RuleId::AiTensorDown => {
            // the dual par is the first factor of the tensor redex
            let mut addr = app.addr.clone();
            addr.push(0);
            CertLine { rule: RuleId::AiDown, addr, formula: f.clone() }
        }
        RuleId::AiSeqLDown | RuleId::AiSeqRDown => {
            // the dual par sits at the first resp. second slot of the seq redex
            let mut addr = app.addr.clone();
            addr.push(if app.rule == RuleId::AiSeqLDown { 0 } else { 1 });
            CertLine { rule: RuleId::AiDown, addr, formula: f.clone() }
        }
        RuleId::Q4Down => CertLine { rule: RuleId::QDown, addr: app.addr.clone(), formula: f.clone() },
        RuleId::S3Hat | RuleId::S3 => {
            CertLine { rule: RuleId::Switch, addr: app.addr.clone(), formula: f.clone() }
        }
        RuleId::Q2HatDown | RuleId::Q2Down => {
            // [A|B] → [⟨A;I⟩|⟨I;B⟩] so that q↓ applies
            let Formula::Par(cs) = at(&app.addr) else { unreachable!() };
            let redex = par2(seq2(cs[0].clone(), Unit), seq2(Unit, cs[1].clone()));
            CertLine {
                rule: RuleId::QDown,
                addr: app.addr.clone(),
                formula: f.replace_at(&app.addr, redex).unwrap(),
            }
        }
        RuleId::Q3LHatDown | RuleId::Q3LDown => {
            // [⟨A;B⟩|C] → [⟨A;B⟩|⟨C;I⟩]
            let Formula::Par(cs) = at(&app.addr) else { unreachable!() };
            let redex = par2(cs[0].clone(), seq2(cs[1].clone(), Unit));
            CertLine {
                rule: RuleId::QDown,
                addr: app.addr.clone(),
                formula: f.replace_at(&app.addr, redex).unwrap(),
            }
        }
        RuleId::Q3RHatDown | RuleId::Q3RDown => {
            // [⟨A;B⟩|C] → [⟨A;B⟩|⟨I;C⟩]
            let Formula::Par(cs) = at(&app.addr) else { unreachable!() };
            let redex = par2(cs[0].clone(), seq2(Unit, cs[1].clone()));
            CertLine {
                rule: RuleId::QDown,
                addr: app.addr.clone(),
                formula: f.replace_at(&app.addr, redex).unwrap(),
            }
        }
        RuleId::S2Hat | RuleId::S2 => {
            // [A|B] → [(I⊗A)|B] so that s applies
            let Formula::Par(cs) = at(&app.addr) else { unreachable!() };
            let redex = par2(tensor2(Unit, cs[0].clone()), cs[1].clone());
            CertLine {
                rule: RuleId::Switch,
                addr: app.addr.clone(),
                formula: f.replace_at(&app.addr, redex).unwrap(),
            }
        }
        other => CertLine { rule: other, addr: app.addr.clone(), formula: f.clone() },
    }
}

/// A BV proof of `[A | A⊥]`, by proof search (always succeeds; the standard
/// identity derivation exists for every formula).
pub fn identity_derivation(a: &Formula) -> Derivation {
    let goal = Formula::Par(vec![a.clone(), a.negate()]);
    prove(&goal.canonicalize(), System::Bv, &mut Budget::unlimited())
        .expect("identity proof within budget")
        .expect("identity is provable")
}

// ---------------------------------------------------------------------------
// Downward (derivability) search
// ---------------------------------------------------------------------------

/// Enumerate every one-step conclusion reachable downward from the
/// canonical formula `p` using the given rules (seq/switch rules in both
/// directions plus ws; interaction rules are not part of this fragment).
pub fn conclusions_of(
    rules: &[RuleId],
    p: &Formula,
    budget: &mut Budget,
) -> Result<Vec<RuleApp>, BudgetExceeded> {
    let mut out = Vec::new();
    walk_down(rules, p, p, &mut Vec::new(), &mut out, budget)?;
    Ok(out)
}

fn walk_down(
    rules: &[RuleId],
    root: &Formula,
    node: &Formula,
    path: &mut Vec<usize>,
    out: &mut Vec<RuleApp>,
    budget: &mut Budget,
) -> Result<(), BudgetExceeded> {
    match node {
        Formula::Seq(cs) => enum_seq_down(rules, root, node, cs, path, out, budget)?,
        Formula::Tensor(cs) => enum_tensor_down(rules, root, node, cs, path, out, budget)?,
        _ => {}
    }
    if let Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) = node {
        for (i, child) in cs.iter().enumerate() {
            path.push(i);
            walk_down(rules, root, child, path, out, budget)?;
            path.pop();
        }
    }
    Ok(())
}

/// Register a downward step at a seq/tensor node: the children in `used`
/// are replaced by the single `shaped_child` (the rule's conclusion redex).
#[allow(clippy::too_many_arguments)]
fn push_down(
    rule: RuleId,
    root: &Formula,
    node: &Formula,
    cs: &[Formula],
    used: &[usize],
    shaped_child: Formula,
    path: &[usize],
    out: &mut Vec<RuleApp>,
) {
    // Keep the untouched children in place; the redex goes where the first
    // used child was (order matters inside seqs).
    let first = *used.iter().min().unwrap();
    let mut kids = Vec::new();
    let mut addr_idx = 0;
    for (i, c) in cs.iter().enumerate() {
        if i == first {
            addr_idx = kids.len();
            kids.push(shaped_child.clone());
        } else if !used.contains(&i) {
            kids.push(c.clone());
        }
    }
    let (shaped_node, addr) = if kids.len() == 1 {
        (kids.pop().unwrap(), path.to_vec())
    } else {
        let mut addr = path.to_vec();
        addr.push(addr_idx);
        (group(node, kids), addr)
    };
    let shaped = rebuild(root, path, shaped_node);
    let conclusion = shaped.canonicalize_prime();
    out.push(RuleApp { rule, shaped, addr, other: Some(conclusion) });
}

fn enum_seq_down(
    rules: &[RuleId],
    root: &Formula,
    node: &Formula,
    cs: &[Formula],
    path: &mut Vec<usize>,
    out: &mut Vec<RuleApp>,
    budget: &mut Budget,
) -> Result<(), BudgetExceeded> {
    let k = cs.len();
    // q2↓: a consecutive run ⟨A;B⟩ becomes [A|B]
    if has(rules, RuleId::Q2Down) {
        for i in 0..k {
            for j in (i + 1)..k {
                for m in i..j {
                    budget.tick()?;
                    let a = group(node, cs[i..=m].to_vec());
                    let b = group(node, cs[m + 1..=j].to_vec());
                    let used: Vec<usize> = (i..=j).collect();
                    push_down(RuleId::Q2Down, root, node, cs, &used, par2(a, b), path, out);
                }
            }
        }
    }
    // q3l↓: run ⟨[A|C];B⟩ becomes [⟨A;B⟩|C] (first run element is a par)
    if has(rules, RuleId::Q3LDown) {
        for i in 0..k {
            let Formula::Par(pcs) = &cs[i] else { continue };
            for j in (i + 1)..k {
                for ga in subsets(pcs.len(), false) {
                    if ga.len() == pcs.len() {
                        continue;
                    }
                    budget.tick()?;
                    let a = group(&cs[i], pick(pcs, &ga));
                    let cf = group(&cs[i], rest(pcs, &ga));
                    let b = group(node, cs[i + 1..=j].to_vec());
                    let used: Vec<usize> = (i..=j).collect();
                    push_down(
                        RuleId::Q3LDown,
                        root,
                        node,
                        cs,
                        &used,
                        par2(seq2(a, b), cf),
                        path,
                        out,
                    );
                }
            }
        }
    }
    // q3r↓: run ⟨A;[B|C]⟩ becomes [⟨A;B⟩|C] (last run element is a par)
    if has(rules, RuleId::Q3RDown) {
        for j in 0..k {
            let Formula::Par(pcs) = &cs[j] else { continue };
            for i in 0..j {
                for gb in subsets(pcs.len(), false) {
                    if gb.len() == pcs.len() {
                        continue;
                    }
                    budget.tick()?;
                    let b = group(&cs[j], pick(pcs, &gb));
                    let cf = group(&cs[j], rest(pcs, &gb));
                    let a = group(node, cs[i..j].to_vec());
                    let used: Vec<usize> = (i..=j).collect();
                    push_down(
                        RuleId::Q3RDown,
                        root,
                        node,
                        cs,
                        &used,
                        par2(seq2(a, b), cf),
                        path,
                        out,
                    );
                }
            }
        }
    }
    // q4↓: adjacent pair of pars ⟨[A|C];[B|D]⟩ becomes [⟨A;B⟩|⟨C;D⟩]
    if has(rules, RuleId::Q4Down) {
        for i in 0..k.saturating_sub(1) {
            let (Formula::Par(ps), Formula::Par(qs)) = (&cs[i], &cs[i + 1]) else { continue };
            for ga in subsets(ps.len(), false) {
                if ga.len() == ps.len() {
                    continue;
                }
                for gb in subsets(qs.len(), false) {
                    if gb.len() == qs.len() {
                        continue;
                    }
                    budget.tick()?;
                    let a = group(&cs[i], pick(ps, &ga));
                    let c = group(&cs[i], rest(ps, &ga));
                    let b = group(&cs[i + 1], pick(qs, &gb));
                    let d = group(&cs[i + 1], rest(qs, &gb));
                    push_down(
                        RuleId::Q4Down,
                        root,
                        node,
                        cs,
                        &[i, i + 1],
                        par2(seq2(a, b), seq2(c, d)),
                        path,
                        out,
                    );
                }
            }
        }
    }
    Ok(())
}

fn enum_tensor_down(
    rules: &[RuleId],
    root: &Formula,
    node: &Formula,
    cs: &[Formula],
    path: &mut Vec<usize>,
    out: &mut Vec<RuleApp>,
    budget: &mut Budget,
) -> Result<(), BudgetExceeded> {
    let n = cs.len();
    // s2: a tensor pair (A⊗B) becomes [A|B]; q2↑: becomes ⟨A;B⟩
    for ga in subsets(n, false) {
        let gb_pool = rest_indices(n, &ga);
        if gb_pool.is_empty() {
            continue;
        }
        for gb in subsets_of(&gb_pool) {
            let a = group(node, pick(cs, &ga));
            let b = group(node, pick(cs, &gb));
            let used: Vec<usize> = ga.iter().chain(&gb).copied().collect();
            if has(rules, RuleId::S2) && ga[0] < gb[0] {
                budget.tick()?;
                push_down(RuleId::S2, root, node, cs, &used, par2(a.clone(), b.clone()), path, out);
            }
            if has(rules, RuleId::Q2Up) {
                budget.tick()?;
                push_down(RuleId::Q2Up, root, node, cs, &used, seq2(a, b), path, out);
            }
        }
    }
    // s3: ([A|C]⊗B) becomes [(A⊗B)|C]
    if has(rules, RuleId::S3) {
        for (pi, pchild) in cs.iter().enumerate() {
            let Formula::Par(ps) = pchild else { continue };
            for gb in subsets_of(&rest_indices(n, &[pi])) {
                let b = group(node, pick(cs, &gb));
                for ga in subsets(ps.len(), false) {
                    if ga.len() == ps.len() {
                        continue;
                    }
                    budget.tick()?;
                    let a = group(pchild, pick(ps, &ga));
                    let cf = group(pchild, rest(ps, &ga));
                    let used: Vec<usize> = gb.iter().copied().chain([pi]).collect();
                    push_down(
                        RuleId::S3,
                        root,
                        node,
                        cs,
                        &used,
                        par2(tensor2(a, b.clone()), cf),
                        path,
                        out,
                    );
                }
            }
        }
    }
    // q3l↑ / q3r↑: (⟨A;B⟩⊗C) becomes ⟨(A⊗C);B⟩ resp. ⟨A;(B⊗C)⟩
    if has(rules, RuleId::Q3LUp) || has(rules, RuleId::Q3RUp) {
        for (si, schild) in cs.iter().enumerate() {
            let Formula::Seq(scs) = schild else { continue };
            for split in 1..scs.len() {
                let a = group(schild, scs[..split].to_vec());
                let b = group(schild, scs[split..].to_vec());
                for gc in subsets(n, false) {
                    if gc.contains(&si) {
                        continue;
                    }
                    let cf = group(node, pick(cs, &gc));
                    let used: Vec<usize> =
                        gc.iter().copied().chain(std::iter::once(si)).collect();
                    if has(rules, RuleId::Q3LUp) {
                        budget.tick()?;
                        push_down(
                            RuleId::Q3LUp,
                            root,
                            node,
                            cs,
                            &used,
                            seq2(tensor2(a.clone(), cf.clone()), b.clone()),
                            path,
                            out,
                        );
                    }
                    if has(rules, RuleId::Q3RUp) {
                        budget.tick()?;
                        push_down(
                            RuleId::Q3RUp,
                            root,
                            node,
                            cs,
                            &used,
                            seq2(a.clone(), tensor2(b.clone(), cf.clone())),
                            path,
                            out,
                        );
                    }
                }
            }
        }
    }
    // q4↑: (⟨A;B⟩⊗⟨C;D⟩) becomes ⟨(A⊗C);(B⊗D)⟩
    if has(rules, RuleId::Q4Up) {
        for (si, schild) in cs.iter().enumerate() {
            let Formula::Seq(scs) = schild else { continue };
            for (ti, tchild) in cs.iter().enumerate() {
                if ti <= si {
                    continue;
                }
                let Formula::Seq(tcs) = tchild else { continue };
                for sp in 1..scs.len() {
                    for tp in 1..tcs.len() {
                        budget.tick()?;
                        let a = group(schild, scs[..sp].to_vec());
                        let b = group(schild, scs[sp..].to_vec());
                        let c = group(tchild, tcs[..tp].to_vec());
                        let d = group(tchild, tcs[tp..].to_vec());
                        push_down(
                            RuleId::Q4Up,
                            root,
                            node,
                            cs,
                            &[si, ti],
                            seq2(tensor2(a, c), tensor2(b, d)),
                            path,
                            out,
                        );
                    }
                }
            }
        }
    }
    // ws: ([A|B]⊗[C|D]) becomes [(A⊗C)|(B⊗D)]
    if has(rules, RuleId::Ws) {
        for (pi, pchild) in cs.iter().enumerate() {
            let Formula::Par(ps) = pchild else { continue };
            for (qi, qchild) in cs.iter().enumerate() {
                if qi <= pi {
                    continue;
                }
                let Formula::Par(qs) = qchild else { continue };
                for ga in subsets(ps.len(), false) {
                    if ga.len() == ps.len() {
                        continue;
                    }
                    for gc in subsets(qs.len(), false) {
                        if gc.len() == qs.len() {
                            continue;
                        }
                        budget.tick()?;
                        let a = group(pchild, pick(ps, &ga));
                        let b = group(pchild, rest(ps, &ga));
                        let c = group(qchild, pick(qs, &gc));
                        let d = group(qchild, rest(qs, &gc));
                        push_down(
                            RuleId::Ws,
                            root,
                            node,
                            cs,
                            &[pi, qi],
                            par2(tensor2(a, c), tensor2(b, d)),
                            path,
                            out,
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn rest_indices(n: usize, used: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !used.contains(i)).collect()
}

fn subsets_of(pool: &[usize]) -> Vec<Vec<usize>> {
    subsets(pool.len(), false)
        .into_iter()
        .map(|s| s.into_iter().map(|i| pool[i]).collect())
        .collect()
}

/// Search a derivation from `a` (premise, top) down to `b` (conclusion,
/// bottom) in a downward fragment. Complete and terminating because every
/// step strictly removes relational edges.
pub fn derive(
    a: &Formula,
    b: &Formula,
    system: System,
    budget: &mut Budget,
) -> Result<Option<Derivation>, BudgetExceeded> {
    match system {
        System::SbvuNonInteraction | System::Ws => derive_fragment(a, b, &system.rules(), budget),
        _ => {
            // A ⊢ B in the full system iff [A⊥ | B] is provable; the
            // returned object is that proof.
            let goal = Formula::Par(vec![a.negate(), b.clone()]).canonicalize();
            prove(&goal, system, budget)
        }
    }
}

fn derive_fragment(
    a: &Formula,
    b: &Formula,
    rules: &[RuleId],
    budget: &mut Budget,
) -> Result<Option<Derivation>, BudgetExceeded> {
    let a = a.canonicalize_prime();
    let b = b.canonicalize_prime();
    if a == b {
        return Ok(Some(Derivation(vec![CertLine {
            rule: RuleId::Start,
            addr: vec![],
            formula: a,
        }])));
    }
    // Forward closure from the premise; parents recorded for path recovery.
    let mut parent: HashMap<Formula, (Formula, RuleApp)> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    parent.insert(a.clone(), (a.clone(), dummy_app()));
    queue.push_back(a.clone());
    let mut found = false;
    while let Some(p) = queue.pop_front() {
        if p == b {
            found = true;
            break;
        }
        for app in conclusions_of(rules, &p, budget)? {
            let c = app.other.clone().unwrap();
            if !parent.contains_key(&c) {
                parent.insert(c.clone(), (p.clone(), app));
                queue.push_back(c);
            }
        }
    }
    if !found {
        return Ok(None);
    }
    // Reconstruct bottom-up: conclusion line first, then each step's shaped
    // formula, then the start line with the premise.
    let mut lines = vec![CertLine { rule: RuleId::EqvP, addr: vec![], formula: b.clone() }];
    let mut cur = b;
    while cur != a {
        let (prev, app) = parent[&cur].clone();
        lines.push(CertLine { rule: app.rule, addr: app.addr, formula: app.shaped });
        cur = prev;
    }
    lines.push(CertLine { rule: RuleId::Start, addr: vec![], formula: a });
    Ok(Some(Derivation(lines)))
}

fn dummy_app() -> RuleApp {
    RuleApp { rule: RuleId::Start, shaped: Formula::Unit, addr: vec![], other: None }
}

/// Derivation witnessing relational-edge inclusion: the ⊗-free seq fragment
/// when both formulas are ⊗-free, otherwise the fragment extended with the
/// switch rules and weak switch. Succeeds iff `edge_inclusion(a, b)`.
pub fn derive_inclusion(
    a: &Formula,
    b: &Formula,
    budget: &mut Budget,
) -> Result<Option<Derivation>, BudgetExceeded> {
    let system = if a.contains_tensor() || b.contains_tensor() {
        System::Ws
    } else {
        System::SbvuNonInteraction
    };
    let rules: Vec<RuleId> = if system == System::SbvuNonInteraction {
        vec![RuleId::Q2Down, RuleId::Q3LDown, RuleId::Q3RDown, RuleId::Q4Down]
    } else {
        system.rules()
    };
    derive_fragment(a, b, &rules, budget)
}

/// The balanced formula separating pomset logic from BV: its unique linking
/// gives a correct cographic prenet, yet every one-step premise under the
/// hatted unit-free system has an æ-cycle, so no BV proof exists.
pub fn separation_formula() -> Formula {
    crate::formula::parse_formula(
        "[(<a;b> * <c;d>) | (<e;f> * <g;h>) | <a';h'> | <e';b'> | <g';d'> | <c';f'>]",
    )
    .unwrap()
}

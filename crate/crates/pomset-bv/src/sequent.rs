//! Sequent calculi on pomset sequents.
//!
//! Two calculi are implemented:
//!
//! * the dicograph sequent calculus (`check_retore`, `search_cutfree`):
//!   axiom, dimix, entropy, cut, ⅋/◁/⊗-introduction. Cut and ⊗-introduction
//!   apply only in flat contexts (to top-level parallel items);
//! * the first-level fragment of a decorated-sequent calculus
//!   (`check_slavnov`): axiom, mix, ⊗/⅋/◁-introduction on flat sequents,
//!   with a per-◁ side condition checked on tree-like prenets.
//!
//! Proof objects are explicit trees ([`SequentProof`]) with a textual
//! s-expression form `(rule "conclusion" child*)`. The checkers infer
//! principal formulas from the conclusions, comparing sequents up to
//! canonical form.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::Rng;

use crate::bv::{self, Derivation, RuleId, System};
use crate::formula::{
    parse_sequent_raw, seq, tensor, Formula, Sequent, Unfolding,
};
use crate::rbnet::{tree_prenet, Linking};
use crate::{Budget, BudgetExceeded};

/// Rules of the two sequent calculi.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequentRule {
    Axiom,
    Dimix,
    Entropy,
    Cut,
    ParIntro,
    SeqIntro,
    TensorIntro,
    SlvAxiom,
    SlvMix,
    SlvTensor,
    SlvPar,
    SlvSeq,
}

impl SequentRule {
    pub fn name(self) -> &'static str {
        match self {
            SequentRule::Axiom => "ax",
            SequentRule::Dimix => "dimix",
            SequentRule::Entropy => "entropy",
            SequentRule::Cut => "cut",
            SequentRule::ParIntro => "par",
            SequentRule::SeqIntro => "seq",
            SequentRule::TensorIntro => "tensor",
            SequentRule::SlvAxiom => "slv-ax",
            SequentRule::SlvMix => "slv-mix",
            SequentRule::SlvTensor => "slv-tensor",
            SequentRule::SlvPar => "slv-par",
            SequentRule::SlvSeq => "slv-seq",
        }
    }

    pub fn from_name(s: &str) -> Option<SequentRule> {
        use SequentRule::*;
        for r in [
            Axiom, Dimix, Entropy, Cut, ParIntro, SeqIntro, TensorIntro, SlvAxiom, SlvMix,
            SlvTensor, SlvPar, SlvSeq,
        ] {
            if r.name() == s {
                return Some(r);
            }
        }
        None
    }

    /// Number of premises.
    pub fn arity(self) -> usize {
        match self {
            SequentRule::Axiom | SequentRule::SlvAxiom => 0,
            SequentRule::Dimix
            | SequentRule::Cut
            | SequentRule::TensorIntro
            | SequentRule::SlvMix
            | SequentRule::SlvTensor => 2,
            _ => 1,
        }
    }
}

/// A sequent proof tree. The applied rule instance (principal formulas,
/// splittings, entropy map) is not stored; checkers reconstruct it from the
/// conclusions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentProof {
    pub rule: SequentRule,
    pub conclusion: Sequent,
    pub children: Vec<SequentProof>,
}

impl SequentProof {
    pub fn new(rule: SequentRule, conclusion: Sequent, children: Vec<SequentProof>) -> Self {
        SequentProof { rule, conclusion, children }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.node_count()).sum::<usize>()
    }

    /// Parse the s-expression proof format `(rule "conclusion" child*)`.
    /// Conclusions are quoted sequent strings and are kept as written
    /// (not canonicalized), so positional calculi can be checked too.
    pub fn parse(text: &str) -> Result<SequentProof, String> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let p = parse_node(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err("trailing input after proof".into());
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Symbol(String),
    Quoted(String),
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                chars.next();
                out.push(Token::Open);
            }
            ')' => {
                chars.next();
                out.push(Token::Close);
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err("unterminated string".into()),
                    }
                }
                out.push(Token::Quoted(s));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                out.push(Token::Symbol(s));
            }
        }
    }
    Ok(out)
}

fn parse_node(tokens: &[Token], pos: &mut usize) -> Result<SequentProof, String> {
    if tokens.get(*pos) != Some(&Token::Open) {
        return Err("expected '('".into());
    }
    *pos += 1;
    let rule = match tokens.get(*pos) {
        Some(Token::Symbol(s)) => {
            SequentRule::from_name(s).ok_or_else(|| format!("unknown rule '{s}'"))?
        }
        _ => return Err("expected rule name".into()),
    };
    *pos += 1;
    let conclusion = match tokens.get(*pos) {
        Some(Token::Quoted(s)) => parse_sequent_raw(s).map_err(|e| e.to_string())?,
        _ => return Err("expected quoted conclusion".into()),
    };
    *pos += 1;
    let mut children = Vec::new();
    loop {
        match tokens.get(*pos) {
            Some(Token::Close) => {
                *pos += 1;
                break;
            }
            Some(Token::Open) => children.push(parse_node(tokens, pos)?),
            _ => return Err("expected child proof or ')'".into()),
        }
    }
    Ok(SequentProof { rule, conclusion, children })
}

impl fmt::Display for SequentProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(p: &SequentProof, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let pad = "  ".repeat(depth);
            write!(f, "{pad}({} \"{}\"", p.rule.name(), p.conclusion)?;
            for c in &p.children {
                writeln!(f)?;
                go(c, depth + 1, f)?;
            }
            write!(f, ")")
        }
        go(self, 0, f)
    }
}

// ---------------------------------------------------------------------------
// Sequent order structure

/// Directed order edges between leaf occurrences (indices in `leaves()`
/// order): an edge u → v whenever u is in an earlier component than v of a
/// common `Seq` ancestor.
pub fn leaf_edges(s: &Sequent) -> HashSet<(usize, usize)> {
    fn go(s: &Sequent, next: &mut usize, out: &mut HashSet<(usize, usize)>) -> Vec<usize> {
        match s {
            Sequent::Leaf(_) => {
                let i = *next;
                *next += 1;
                vec![i]
            }
            Sequent::Par(cs) => {
                cs.iter().flat_map(|c| go(c, next, out)).collect()
            }
            Sequent::Seq(cs) => {
                let groups: Vec<Vec<usize>> = cs.iter().map(|c| go(c, next, out)).collect();
                for i in 0..groups.len() {
                    for j in i + 1..groups.len() {
                        for &u in &groups[i] {
                            for &v in &groups[j] {
                                out.insert((u, v));
                            }
                        }
                    }
                }
                groups.into_iter().flatten().collect()
            }
        }
    }
    let mut out = HashSet::new();
    let mut next = 0;
    go(s, &mut next, &mut out);
    out
}

/// Entropy validity: `conclusion` and `premise` carry the same formula
/// occurrences and some occurrence bijection maps the conclusion's order
/// edges into the premise's. (Entropy only relaxes the order.)
pub fn entropy_valid(conclusion: &Sequent, premise: &Sequent) -> bool {
    let c = conclusion.canonicalize();
    let p = premise.canonicalize();
    let lc: Vec<Formula> = c.leaves().into_iter().cloned().collect();
    let lp: Vec<Formula> = p.leaves().into_iter().cloned().collect();
    if lc.len() != lp.len() {
        return false;
    }
    let ec = leaf_edges(&c);
    let ep = leaf_edges(&p);
    // Backtracking search for a label-preserving injection σ with
    // σ(R_conclusion) ⊆ R_premise.
    let n = lc.len();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    fn bt(
        i: usize,
        n: usize,
        lc: &[Formula],
        lp: &[Formula],
        ec: &HashSet<(usize, usize)>,
        ep: &HashSet<(usize, usize)>,
        assigned: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || lc[i] != lp[j] {
                continue;
            }
            let mut ok = true;
            for k in 0..i {
                let sk = assigned[k].unwrap();
                if ec.contains(&(i, k)) && !ep.contains(&(j, sk)) {
                    ok = false;
                    break;
                }
                if ec.contains(&(k, i)) && !ep.contains(&(sk, j)) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            assigned[i] = Some(j);
            used[j] = true;
            if bt(i + 1, n, lc, lp, ec, ep, assigned, used) {
                return true;
            }
            assigned[i] = None;
            used[j] = false;
        }
        false
    }
    bt(0, n, &lc, &lp, &ec, &ep, &mut assigned, &mut used)
}

// ---------------------------------------------------------------------------
// Checking the dicograph sequent calculus

fn top_items(s: &Sequent) -> Vec<Sequent> {
    match s {
        Sequent::Par(cs) => cs.clone(),
        other => vec![other.clone()],
    }
}

fn sorted(mut v: Vec<Sequent>) -> Vec<Sequent> {
    v.sort();
    v
}

/// Remove one item canonically equal to `what`; false if absent.
fn remove_one(items: &mut Vec<Sequent>, what: &Sequent) -> bool {
    let wc = what.canonicalize();
    if let Some(i) = items.iter().position(|x| x.canonicalize() == wc) {
        items.remove(i);
        true
    } else {
        false
    }
}

/// Replace the `target`-th leaf (in `leaves()` order) by a sub-sequent.
fn replace_leaf(s: &Sequent, target: usize, replacement: &Sequent) -> Sequent {
    fn go(s: &Sequent, target: usize, replacement: &Sequent, next: &mut usize) -> Sequent {
        match s {
            Sequent::Leaf(_) => {
                let i = *next;
                *next += 1;
                if i == target {
                    replacement.clone()
                } else {
                    s.clone()
                }
            }
            Sequent::Par(cs) => {
                Sequent::Par(cs.iter().map(|c| go(c, target, replacement, next)).collect())
            }
            Sequent::Seq(cs) => {
                Sequent::Seq(cs.iter().map(|c| go(c, target, replacement, next)).collect())
            }
        }
    }
    let mut next = 0;
    go(s, target, replacement, &mut next)
}

fn subformula_of(children: &[Formula], mask: usize, op: fn(Vec<Formula>) -> Formula) -> Formula {
    let picked: Vec<Formula> = children
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, f)| f.clone())
        .collect();
    if picked.len() == 1 {
        picked.into_iter().next().unwrap()
    } else {
        op(picked)
    }
}

/// Check a proof in the dicograph sequent calculus. With `allow_cut` false
/// the proof must be cut-free.
pub fn check_retore(p: &SequentProof, allow_cut: bool) -> Result<(), String> {
    for c in &p.children {
        check_retore(c, allow_cut)?;
    }
    if p.children.len() != p.rule.arity() {
        return Err(format!("rule {} expects {} premises", p.rule.name(), p.rule.arity()));
    }
    let conc = p.conclusion.canonicalize();
    let fail = |msg: &str| Err(format!("invalid {} inference: {msg} in ⊢ {}", p.rule.name(), p.conclusion));
    match p.rule {
        SequentRule::Axiom => {
            if let Sequent::Par(cs) = &conc {
                if let [Sequent::Leaf(f1), Sequent::Leaf(f2)] = cs.as_slice() {
                    let atoms = matches!(f1, Formula::Atom { .. }) && matches!(f2, Formula::Atom { .. });
                    if atoms && f1.negate().canonicalize() == f2.canonicalize() {
                        return Ok(());
                    }
                }
            }
            fail("conclusion is not a dual atom pair")
        }
        SequentRule::Dimix => {
            let expected = Sequent::Seq(vec![
                p.children[0].conclusion.clone(),
                p.children[1].conclusion.clone(),
            ])
            .canonicalize();
            if expected == conc {
                Ok(())
            } else {
                fail("conclusion is not the series composition of the premises")
            }
        }
        SequentRule::Entropy => {
            if entropy_valid(&conc, &p.children[0].conclusion) {
                Ok(())
            } else {
                fail("conclusion is not an entropy relaxation of the premise")
            }
        }
        SequentRule::Cut => {
            if !allow_cut {
                return fail("cut is not admitted here");
            }
            let items1 = top_items(&p.children[0].conclusion.canonicalize());
            let items2 = top_items(&p.children[1].conclusion.canonicalize());
            let goal = sorted(top_items(&conc).into_iter().map(|s| s.canonicalize()).collect());
            for (i, item) in items1.iter().enumerate() {
                let Sequent::Leaf(f) = item else { continue };
                let dual = Sequent::Leaf(f.negate()).canonicalize();
                for (j, other) in items2.iter().enumerate() {
                    if other.canonicalize() != dual {
                        continue;
                    }
                    let mut rest: Vec<Sequent> = Vec::new();
                    rest.extend(items1.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, s)| s.canonicalize()));
                    rest.extend(items2.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, s)| s.canonicalize()));
                    if sorted(rest) == goal {
                        return Ok(());
                    }
                }
            }
            fail("no cut formula joins the premises into the conclusion")
        }
        SequentRule::ParIntro | SequentRule::SeqIntro => {
            let child = p.children[0].conclusion.canonicalize();
            let leaves: Vec<Formula> = conc.leaves().into_iter().cloned().collect();
            for (i, f) in leaves.iter().enumerate() {
                let (cs, node): (&Vec<Formula>, fn(Vec<Sequent>) -> Sequent) = match (p.rule, f) {
                    (SequentRule::ParIntro, Formula::Par(cs)) => (cs, Sequent::Par),
                    (SequentRule::SeqIntro, Formula::Seq(cs)) => (cs, Sequent::Seq),
                    _ => continue,
                };
                let k = cs.len();
                let splits: Vec<(Formula, Formula)> = if p.rule == SequentRule::ParIntro {
                    (1..(1usize << k) - 1)
                        .map(|m| {
                            (
                                subformula_of(cs, m, Formula::Par),
                                subformula_of(cs, !m & ((1 << k) - 1), Formula::Par),
                            )
                        })
                        .collect()
                } else {
                    (1..k)
                        .map(|cut| {
                            let a = if cut == 1 { cs[0].clone() } else { Formula::Seq(cs[..cut].to_vec()) };
                            let b = if cut == k - 1 {
                                cs[k - 1].clone()
                            } else {
                                Formula::Seq(cs[cut..].to_vec())
                            };
                            (a, b)
                        })
                        .collect()
                };
                for (a, b) in splits {
                    let rep = node(vec![Sequent::Leaf(a), Sequent::Leaf(b)]);
                    if replace_leaf(&conc, i, &rep).canonicalize() == child {
                        return Ok(());
                    }
                }
            }
            fail("no principal formula matches the premise")
        }
        SequentRule::TensorIntro => {
            let items = top_items(&conc);
            let items1 = top_items(&p.children[0].conclusion.canonicalize());
            let items2 = top_items(&p.children[1].conclusion.canonicalize());
            for (k, item) in items.iter().enumerate() {
                let Sequent::Leaf(Formula::Tensor(cs)) = item else { continue };
                let full = (1usize << cs.len()) - 1;
                for m in 1..full {
                    let a = subformula_of(cs, m, Formula::Tensor);
                    let b = subformula_of(cs, !m & full, Formula::Tensor);
                    let mut rest1 = items1.clone();
                    let mut rest2 = items2.clone();
                    if !remove_one(&mut rest1, &Sequent::Leaf(a)) {
                        continue;
                    }
                    if !remove_one(&mut rest2, &Sequent::Leaf(b)) {
                        continue;
                    }
                    let mut rest: Vec<Sequent> =
                        rest1.into_iter().chain(rest2).map(|s| s.canonicalize()).collect();
                    rest.sort();
                    let goal = sorted(
                        items
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != k)
                            .map(|(_, s)| s.canonicalize())
                            .collect(),
                    );
                    if rest == goal {
                        return Ok(());
                    }
                }
            }
            fail("no tensor item splits into the premises")
        }
        _ => fail("rule belongs to the decorated-sequent calculus"),
    }
}

// ---------------------------------------------------------------------------
// Cut-free proof search

/// Search a cut-free proof in the dicograph sequent calculus. Definitive:
/// `Ok(None)` means no cut-free proof exists. Entropy is never enumerated
/// explicitly; each series split recurses on the induced restrictions of
/// the goal and inserts a single entropy inference when needed, which is
/// complete because entropy commutes upward through every rule.
pub fn search_cutfree(s: &Sequent, budget: &mut Budget) -> Result<Option<SequentProof>, BudgetExceeded> {
    let mut memo: HashMap<Sequent, Option<SequentProof>> = HashMap::new();
    solve(&s.canonicalize(), &mut memo, budget)
}

fn solve(
    s: &Sequent,
    memo: &mut HashMap<Sequent, Option<SequentProof>>,
    budget: &mut Budget,
) -> Result<Option<SequentProof>, BudgetExceeded> {
    budget.tick()?;
    if let Some(r) = memo.get(s) {
        return Ok(r.clone());
    }
    let result = solve_inner(s, memo, budget)?;
    memo.insert(s.clone(), result.clone());
    Ok(result)
}

/// Restriction of `s` to the leaves selected by `keep`.
fn induced(s: &Sequent, keep: &[bool]) -> Option<Sequent> {
    fn go(s: &Sequent, keep: &[bool], next: &mut usize) -> Option<Sequent> {
        match s {
            Sequent::Leaf(_) => {
                let i = *next;
                *next += 1;
                keep[i].then(|| s.clone())
            }
            Sequent::Par(cs) | Sequent::Seq(cs) => {
                let kids: Vec<Sequent> = cs.iter().filter_map(|c| go(c, keep, next)).collect();
                match kids.len() {
                    0 => None,
                    1 => Some(kids.into_iter().next().unwrap()),
                    _ => Some(if matches!(s, Sequent::Par(_)) {
                        Sequent::Par(kids)
                    } else {
                        Sequent::Seq(kids)
                    }),
                }
            }
        }
    }
    let mut next = 0;
    go(s, keep, &mut next)
}

fn solve_inner(
    s: &Sequent,
    memo: &mut HashMap<Sequent, Option<SequentProof>>,
    budget: &mut Budget,
) -> Result<Option<SequentProof>, BudgetExceeded> {
    if s.is_empty() {
        return Ok(None);
    }
    let leaves: Vec<Formula> = s.leaves().into_iter().cloned().collect();
    // ⅋/◁-introduction is invertible: eagerly decompose the first non-atomic
    // non-tensor leaf.
    for (i, f) in leaves.iter().enumerate() {
        let (cs, node, rule): (&Vec<Formula>, fn(Vec<Sequent>) -> Sequent, SequentRule) = match f {
            Formula::Par(cs) => (cs, Sequent::Par, SequentRule::ParIntro),
            Formula::Seq(cs) => (cs, Sequent::Seq, SequentRule::SeqIntro),
            Formula::Unit => return Ok(None),
            _ => continue,
        };
        let a = cs[0].clone();
        let b = if cs.len() == 2 {
            cs[1].clone()
        } else {
            match f {
                Formula::Par(_) => Formula::Par(cs[1..].to_vec()),
                _ => Formula::Seq(cs[1..].to_vec()),
            }
        };
        let rep = node(vec![Sequent::Leaf(a), Sequent::Leaf(b)]);
        let premise = replace_leaf(s, i, &rep).canonicalize();
        return Ok(solve(&premise, memo, budget)?
            .map(|pf| SequentProof::new(rule, s.clone(), vec![pf])));
    }
    // All leaves are atoms or tensors.
    if let Sequent::Par(cs) = s {
        if let [Sequent::Leaf(f1), Sequent::Leaf(f2)] = cs.as_slice() {
            if matches!(f1, Formula::Atom { .. }) && f1.negate().canonicalize() == f2.canonicalize() {
                return Ok(Some(SequentProof::new(SequentRule::Axiom, s.clone(), vec![])));
            }
        }
    }
    let n = leaves.len();
    let edges = leaf_edges(s);
    // ⊗-introduction: applicable to an unordered tensor leaf whose context
    // splits into two unordered halves.
    for (i, f) in leaves.iter().enumerate() {
        let Formula::Tensor(cs) = f else { continue };
        if edges.iter().any(|&(u, v)| u == i || v == i) {
            continue;
        }
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let osz = others.len();
        for om in 0..1usize << osz {
            let left: HashSet<usize> =
                others.iter().enumerate().filter(|(k, _)| om >> k & 1 == 1).map(|(_, &j)| j).collect();
            if edges.iter().any(|&(u, v)| left.contains(&u) != left.contains(&v)) {
                continue;
            }
            let mut keep_l = vec![false; n];
            let mut keep_r = vec![false; n];
            for &j in &others {
                if left.contains(&j) {
                    keep_l[j] = true;
                } else {
                    keep_r[j] = true;
                }
            }
            let full = (1usize << cs.len()) - 1;
            for m in 1..full {
                budget.tick()?;
                let a = subformula_of(cs, m, Formula::Tensor);
                let b = subformula_of(cs, !m & full, Formula::Tensor);
                let mut l_items: Vec<Sequent> = induced(s, &keep_l).into_iter().collect();
                l_items.push(Sequent::Leaf(a));
                let mut r_items: Vec<Sequent> = induced(s, &keep_r).into_iter().collect();
                r_items.push(Sequent::Leaf(b));
                let g1 = Sequent::Par(l_items).canonicalize();
                let g2 = Sequent::Par(r_items).canonicalize();
                let (Some(p1), Some(p2)) = (solve(&g1, memo, budget)?, solve(&g2, memo, budget)?) else {
                    continue;
                };
                return Ok(Some(SequentProof::new(
                    SequentRule::TensorIntro,
                    s.clone(),
                    vec![p1, p2],
                )));
            }
        }
    }
    // Dimix: split the leaves into an ordered pair of blocks with no order
    // edge against the split, recurse on the induced restrictions, and
    // absorb the difference with one entropy inference.
    if n >= 2 {
        for m in 1..(1usize << n) - 1 {
            budget.tick()?;
            let keep1: Vec<bool> = (0..n).map(|j| m >> j & 1 == 1).collect();
            if edges.iter().any(|&(u, v)| !keep1[u] && keep1[v]) {
                continue;
            }
            let keep2: Vec<bool> = keep1.iter().map(|&b| !b).collect();
            let ind1 = induced(s, &keep1).unwrap().canonicalize();
            let ind2 = induced(s, &keep2).unwrap().canonicalize();
            let (Some(p1), Some(p2)) = (solve(&ind1, memo, budget)?, solve(&ind2, memo, budget)?) else {
                continue;
            };
            let premise = Sequent::Seq(vec![ind1, ind2]);
            let pc = premise.canonicalize();
            let dim = SequentProof::new(SequentRule::Dimix, premise, vec![p1, p2]);
            if pc == *s {
                return Ok(Some(dim));
            }
            return Ok(Some(SequentProof::new(SequentRule::Entropy, s.clone(), vec![dim])));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Translating deep-inference proofs

/// A two-sided invariant: `pf` proves ⊢ { x⊥, y }.
struct Duo {
    x: Formula,
    y: Formula,
    pf: SequentProof,
}

fn node(rule: SequentRule, conclusion: Sequent, children: Vec<SequentProof>) -> SequentProof {
    SequentProof { rule, conclusion, children }
}

fn flat2(a: Formula, b: Formula) -> Sequent {
    Sequent::Par(vec![Sequent::Leaf(a), Sequent::Leaf(b)])
}

/// ⊗-introduction joining `c1` (on item `a`) and `c2` (on item `b`).
fn tensor_intro(c1: SequentProof, c2: SequentProof, a: Formula, b: Formula) -> SequentProof {
    let mut items = top_items(&c1.conclusion);
    assert!(remove_one(&mut items, &Sequent::Leaf(a.clone())), "missing left tensor item");
    let mut items2 = top_items(&c2.conclusion);
    assert!(remove_one(&mut items2, &Sequent::Leaf(b.clone())), "missing right tensor item");
    items.extend(items2);
    items.push(Sequent::Leaf(tensor(vec![a, b])));
    node(SequentRule::TensorIntro, Sequent::Par(items), vec![c1, c2])
}

/// ⅋-introduction merging the top items `a` and `b`.
fn par_intro(child: SequentProof, a: Formula, b: Formula) -> SequentProof {
    let mut items = top_items(&child.conclusion);
    assert!(remove_one(&mut items, &Sequent::Leaf(a.clone())), "missing par item");
    assert!(remove_one(&mut items, &Sequent::Leaf(b.clone())), "missing par item");
    items.push(Sequent::Leaf(Formula::Par(vec![a, b])));
    let conclusion =
        if items.len() == 1 { items.pop().unwrap() } else { Sequent::Par(items) };
    node(SequentRule::ParIntro, conclusion, vec![child])
}

/// ◁-introduction replacing the sub-sequent ⟨{a};{b}⟩ by the formula a◁b.
fn seq_intro(child: SequentProof, a: Formula, b: Formula) -> SequentProof {
    let pattern = Sequent::Seq(vec![Sequent::Leaf(a.clone()), Sequent::Leaf(b.clone())]);
    fn replace(s: &Sequent, pattern: &Sequent, with: &Sequent, done: &mut bool) -> Sequent {
        if !*done && s == pattern {
            *done = true;
            return with.clone();
        }
        match s {
            Sequent::Leaf(_) => s.clone(),
            Sequent::Par(cs) => {
                Sequent::Par(cs.iter().map(|c| replace(c, pattern, with, done)).collect())
            }
            Sequent::Seq(cs) => {
                Sequent::Seq(cs.iter().map(|c| replace(c, pattern, with, done)).collect())
            }
        }
    }
    let mut done = false;
    let conclusion = replace(
        &child.conclusion,
        &pattern,
        &Sequent::Leaf(seq(vec![a, b])),
        &mut done,
    );
    assert!(done, "missing seq sub-sequent");
    node(SequentRule::SeqIntro, conclusion, vec![child])
}

fn dimix(c1: SequentProof, c2: SequentProof) -> SequentProof {
    let conclusion = Sequent::Seq(vec![c1.conclusion.clone(), c2.conclusion.clone()]);
    node(SequentRule::Dimix, conclusion, vec![c1, c2])
}

fn entropy_to(target: Sequent, child: SequentProof) -> SequentProof {
    node(SequentRule::Entropy, target, vec![child])
}

/// A cut-free proof of ⊢ { f⊥, f }.
pub fn identity_proof(f: &Formula) -> Result<SequentProof, String> {
    Ok(identity_duo(f)?.pf)
}

fn identity_duo(f: &Formula) -> Result<Duo, String> {
    match f {
        Formula::Unit => Err("no identity sequent for the unit".into()),
        Formula::Atom { .. } => Ok(Duo {
            x: f.clone(),
            y: f.clone(),
            pf: node(SequentRule::Axiom, flat2(f.negate(), f.clone()), vec![]),
        }),
        Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
            if cs.len() < 2 {
                return Err("malformed formula".into());
            }
            let mut duo = identity_duo(&cs[0])?;
            for c in &cs[1..] {
                duo = compose_right(duo, f, c)?;
            }
            Ok(duo)
        }
    }
}

/// Extend `duo` (⊢ {x⊥, y}) to ⊢ {(x∘d)⊥, y∘d} for the connective of `shape`.
fn compose_right(duo: Duo, shape: &Formula, d: &Formula) -> Result<Duo, String> {
    let id = identity_proof(d)?;
    let (xb, db) = (duo.x.negate(), d.negate());
    match shape {
        Formula::Par(_) => {
            let t = tensor_intro(duo.pf, id, xb.clone(), db.clone());
            let pf = par_intro(t, duo.y.clone(), d.clone());
            Ok(Duo {
                x: Formula::Par(vec![duo.x, d.clone()]),
                y: Formula::Par(vec![duo.y, d.clone()]),
                pf,
            })
        }
        Formula::Tensor(_) => {
            let t = tensor_intro(duo.pf, id, duo.y.clone(), d.clone());
            let pf = par_intro(t, xb, db);
            Ok(Duo {
                x: Formula::Tensor(vec![duo.x, d.clone()]),
                y: Formula::Tensor(vec![duo.y, d.clone()]),
                pf,
            })
        }
        Formula::Seq(_) => {
            let dm = dimix(duo.pf, id);
            let target = Sequent::Par(vec![
                Sequent::Seq(vec![Sequent::Leaf(xb.clone()), Sequent::Leaf(db.clone())]),
                Sequent::Seq(vec![Sequent::Leaf(duo.y.clone()), Sequent::Leaf(d.clone())]),
            ]);
            let ent = entropy_to(target, dm);
            let s1 = seq_intro(ent, xb, db);
            let pf = seq_intro(s1, duo.y.clone(), d.clone());
            Ok(Duo {
                x: Formula::Seq(vec![duo.x, d.clone()]),
                y: Formula::Seq(vec![duo.y, d.clone()]),
                pf,
            })
        }
        _ => Err("cannot compose on an atomic shape".into()),
    }
}

/// Extend `duo` (⊢ {x⊥, y}) to ⊢ {(d∘x)⊥, d∘y}.
fn compose_left(duo: Duo, shape: &Formula, d: &Formula) -> Result<Duo, String> {
    let id = identity_proof(d)?;
    let (xb, db) = (duo.x.negate(), d.negate());
    match shape {
        Formula::Par(_) => {
            let t = tensor_intro(id, duo.pf, db.clone(), xb.clone());
            let pf = par_intro(t, d.clone(), duo.y.clone());
            Ok(Duo {
                x: Formula::Par(vec![d.clone(), duo.x]),
                y: Formula::Par(vec![d.clone(), duo.y]),
                pf,
            })
        }
        Formula::Tensor(_) => {
            let t = tensor_intro(id, duo.pf, d.clone(), duo.y.clone());
            let pf = par_intro(t, db, xb);
            Ok(Duo {
                x: Formula::Tensor(vec![d.clone(), duo.x]),
                y: Formula::Tensor(vec![d.clone(), duo.y]),
                pf,
            })
        }
        Formula::Seq(_) => {
            let dm = dimix(id, duo.pf);
            let target = Sequent::Par(vec![
                Sequent::Seq(vec![Sequent::Leaf(db.clone()), Sequent::Leaf(xb.clone())]),
                Sequent::Seq(vec![Sequent::Leaf(d.clone()), Sequent::Leaf(duo.y.clone())]),
            ]);
            let ent = entropy_to(target, dm);
            let s1 = seq_intro(ent, db, xb);
            let pf = seq_intro(s1, d.clone(), duo.y.clone());
            Ok(Duo {
                x: Formula::Seq(vec![d.clone(), duo.x]),
                y: Formula::Seq(vec![d.clone(), duo.y]),
                pf,
            })
        }
        _ => Err("cannot compose on an atomic shape".into()),
    }
}

/// Cut-free proof of the step sequent ⊢ {premise⊥, conclusion-redex} for a
/// unit-free deep-inference rule instance with conclusion redex `r` and
/// premise redex `cand`.
fn step_duo(rule: RuleId, r: &Formula, cand: &Formula) -> Result<Duo, String> {
    use Formula::{Par, Seq, Tensor};
    let err = || format!("unsupported {} instance", rule.name());
    let two = |cs: &[Formula]| -> Option<(Formula, Formula)> {
        (cs.len() == 2).then(|| (cs[0].clone(), cs[1].clone()))
    };
    let duo = |x: &Formula, y: &Formula, pf: SequentProof| Duo { x: x.clone(), y: y.clone(), pf };
    match rule {
        RuleId::AiTensorDown => {
            // redex ([a|a'] ⊗ b), premise b
            let Tensor(cs) = r else { return Err(err()) };
            let (u, v) = two(cs).ok_or_else(err)?;
            let (p, b) = if &v == cand { (u, v) } else { (v, u) };
            let Par(pcs) = &p else { return Err(err()) };
            let (a1, a2) = two(pcs).ok_or_else(err)?;
            let ax = node(SequentRule::Axiom, flat2(a1.clone(), a2.clone()), vec![]);
            let pp = par_intro(ax, a1, a2);
            let t = tensor_intro(pp, identity_proof(&b)?, p.clone(), b.clone());
            Ok(duo(cand, r, t))
        }
        RuleId::AiSeqLDown | RuleId::AiSeqRDown => {
            // redex ⟨[a|a'];b⟩ resp. ⟨b;[a|a']⟩, premise b
            let Seq(cs) = r else { return Err(err()) };
            let (u, v) = two(cs).ok_or_else(err)?;
            let (p, b) = if rule == RuleId::AiSeqLDown { (u, v) } else { (v, u) };
            let Par(pcs) = &p else { return Err(err()) };
            let (a1, a2) = two(pcs).ok_or_else(err)?;
            let ax = node(SequentRule::Axiom, flat2(a1.clone(), a2.clone()), vec![]);
            let pp = par_intro(ax, a1, a2);
            let idb = identity_proof(&b)?;
            let bb = b.negate();
            let (dm, first, second) = if rule == RuleId::AiSeqLDown {
                (dimix(pp, idb), p.clone(), b.clone())
            } else {
                (dimix(idb, pp), b.clone(), p.clone())
            };
            let target = Sequent::Par(vec![
                Sequent::Leaf(bb),
                Sequent::Seq(vec![Sequent::Leaf(first.clone()), Sequent::Leaf(second.clone())]),
            ]);
            let ent = entropy_to(target, dm);
            Ok(duo(cand, r, seq_intro(ent, first, second)))
        }
        RuleId::Q2Down => {
            // redex [a|b], premise ⟨u;v⟩ with {u,v} = {a,b}
            let Seq(scs) = cand else { return Err(err()) };
            let (u, v) = two(scs).ok_or_else(err)?;
            let (idu, idv) = (identity_proof(&u)?, identity_proof(&v)?);
            let dm = dimix(idu, idv);
            let (ub, vb) = (u.negate(), v.negate());
            let target = Sequent::Par(vec![
                Sequent::Seq(vec![Sequent::Leaf(ub.clone()), Sequent::Leaf(vb.clone())]),
                Sequent::Leaf(u.clone()),
                Sequent::Leaf(v.clone()),
            ]);
            let ent = entropy_to(target, dm);
            let s1 = seq_intro(ent, ub, vb);
            Ok(duo(cand, r, par_intro(s1, u, v)))
        }
        RuleId::S2 => {
            // redex [a|b], premise (a⊗b)
            let Tensor(tcs) = cand else { return Err(err()) };
            let (u, v) = two(tcs).ok_or_else(err)?;
            let dm = dimix(identity_proof(&u)?, identity_proof(&v)?);
            let (ub, vb) = (u.negate(), v.negate());
            let target = Sequent::Par(vec![
                Sequent::Leaf(ub.clone()),
                Sequent::Leaf(u.clone()),
                Sequent::Leaf(vb.clone()),
                Sequent::Leaf(v.clone()),
            ]);
            let ent = entropy_to(target, dm);
            let s1 = par_intro(ent, ub, vb);
            Ok(duo(cand, r, par_intro(s1, u, v)))
        }
        RuleId::Q3LDown => {
            // redex [⟨a;b⟩|c], premise ⟨[a|c];b⟩
            let (a, b, c) = q3_parts(r, cand, true).ok_or_else(err)?;
            let t1 = tensor_intro(
                identity_proof(&a)?,
                identity_proof(&c)?,
                a.negate(),
                c.negate(),
            );
            let dm = dimix(t1, identity_proof(&b)?);
            let tac = tensor(vec![a.negate(), c.negate()]);
            let target = Sequent::Par(vec![
                Sequent::Seq(vec![Sequent::Leaf(tac.clone()), Sequent::Leaf(b.negate())]),
                Sequent::Seq(vec![Sequent::Leaf(a.clone()), Sequent::Leaf(b.clone())]),
                Sequent::Leaf(c.clone()),
            ]);
            let ent = entropy_to(target, dm);
            let s1 = seq_intro(ent, tac, b.negate());
            let s2 = seq_intro(s1, a.clone(), b.clone());
            Ok(duo(cand, r, par_intro(s2, seq(vec![a, b]), c)))
        }
        RuleId::Q3RDown => {
            // redex [⟨a;b⟩|c], premise ⟨a;[b|c]⟩
            let (a, b, c) = q3_parts(r, cand, false).ok_or_else(err)?;
            let t1 = tensor_intro(
                identity_proof(&b)?,
                identity_proof(&c)?,
                b.negate(),
                c.negate(),
            );
            let dm = dimix(identity_proof(&a)?, t1);
            let tbc = tensor(vec![b.negate(), c.negate()]);
            let target = Sequent::Par(vec![
                Sequent::Seq(vec![Sequent::Leaf(a.negate()), Sequent::Leaf(tbc.clone())]),
                Sequent::Seq(vec![Sequent::Leaf(a.clone()), Sequent::Leaf(b.clone())]),
                Sequent::Leaf(c.clone()),
            ]);
            let ent = entropy_to(target, dm);
            let s1 = seq_intro(ent, a.negate(), tbc);
            let s2 = seq_intro(s1, a.clone(), b.clone());
            Ok(duo(cand, r, par_intro(s2, seq(vec![a, b]), c)))
        }
        RuleId::QDown | RuleId::Q4Down => {
            // redex [⟨a;b⟩|⟨c;d⟩], premise ⟨[a|c];[b|d]⟩
            let Par(cs) = r else { return Err(err()) };
            let (x, y) = two(cs).ok_or_else(err)?;
            let (Seq(xs), Seq(ys)) = (&x, &y) else { return Err(err()) };
            let (a, b) = two(xs).ok_or_else(err)?;
            let (c, d) = two(ys).ok_or_else(err)?;
            let t1 = tensor_intro(
                identity_proof(&a)?,
                identity_proof(&c)?,
                a.negate(),
                c.negate(),
            );
            let t2 = tensor_intro(
                identity_proof(&b)?,
                identity_proof(&d)?,
                b.negate(),
                d.negate(),
            );
            let dm = dimix(t1, t2);
            let tac = tensor(vec![a.negate(), c.negate()]);
            let tbd = tensor(vec![b.negate(), d.negate()]);
            let target = Sequent::Par(vec![
                Sequent::Seq(vec![Sequent::Leaf(tac.clone()), Sequent::Leaf(tbd.clone())]),
                Sequent::Seq(vec![Sequent::Leaf(a.clone()), Sequent::Leaf(b.clone())]),
                Sequent::Seq(vec![Sequent::Leaf(c.clone()), Sequent::Leaf(d.clone())]),
            ]);
            let ent = entropy_to(target, dm);
            let s1 = seq_intro(ent, tac, tbd);
            let s2 = seq_intro(s1, a.clone(), b.clone());
            let s3 = seq_intro(s2, c.clone(), d.clone());
            Ok(duo(cand, r, par_intro(s3, seq(vec![a, b]), seq(vec![c, d]))))
        }
        RuleId::Switch | RuleId::S3 => {
            // redex [(a⊗b)|c], premise ([a|c]⊗b)
            let Par(cs) = r else { return Err(err()) };
            let (x, y) = two(cs).ok_or_else(err)?;
            // Identify which side is the tensor and how the premise split it.
            for (t, c) in [(&x, &y), (&y, &x)] {
                let Tensor(tcs) = t else { continue };
                let Some((a, b)) = two(tcs) else { continue };
                for (a, b) in [(a.clone(), b.clone()), (b, a)] {
                    let want = Tensor(vec![Par(vec![a.clone(), c.clone()]), b.clone()]);
                    if &want != cand {
                        continue;
                    }
                    let t1 = tensor_intro(
                        identity_proof(&a)?,
                        identity_proof(&b)?,
                        a.clone(),
                        b.clone(),
                    );
                    let t2 = tensor_intro(
                        t1,
                        identity_proof(c)?,
                        a.negate(),
                        c.negate(),
                    );
                    let p1 = par_intro(t2, tensor(vec![a.negate(), c.negate()]), b.negate());
                    let p2 = par_intro(p1, tensor(vec![a, b]), c.clone());
                    return Ok(duo(cand, r, p2));
                }
            }
            Err(err())
        }
        _ => Err(format!("rule {} has no sequent translation here", rule.name())),
    }
}

/// Decompose redex [⟨a;b⟩|c] against premise ⟨[a|c];b⟩ (left) or ⟨a;[b|c]⟩.
fn q3_parts(r: &Formula, cand: &Formula, left: bool) -> Option<(Formula, Formula, Formula)> {
    let Formula::Par(cs) = r else { return None };
    if cs.len() != 2 {
        return None;
    }
    for (s, c) in [(&cs[0], &cs[1]), (&cs[1], &cs[0])] {
        let Formula::Seq(scs) = s else { continue };
        if scs.len() != 2 {
            continue;
        }
        let (a, b) = (scs[0].clone(), scs[1].clone());
        let want = if left {
            Formula::Seq(vec![Formula::Par(vec![a.clone(), c.clone()]), b.clone()])
        } else {
            Formula::Seq(vec![a.clone(), Formula::Par(vec![b.clone(), c.clone()])])
        };
        if &want == cand {
            return Some((a, b, c.clone()));
        }
    }
    None
}

/// Translate a checked BVu proof into the dicograph sequent calculus: each
/// deep-inference step contributes a cut against a cut-free proof of its
/// step sequent ⊢ { premise⊥, conclusion }, obtained by grafting the rule
/// schema through the surrounding context.
pub fn translate_bvu_proof(d: &Derivation) -> Result<SequentProof, String> {
    bv::check_derivation(d, System::Bvu).map_err(|e| e.to_string())?;
    let lines = &d.0;
    let top = lines.last().unwrap();
    if top.rule != RuleId::AiNilDown {
        return Err("expected a proof starting from an axiom line".into());
    }
    let Formula::Par(cs) = &top.formula else {
        return Err("malformed axiom line".into());
    };
    if cs.len() != 2 {
        return Err("malformed axiom line".into());
    }
    let ax = node(SequentRule::Axiom, flat2(cs[0].clone(), cs[1].clone()), vec![]);
    let mut base = par_intro(ax, cs[0].clone(), cs[1].clone());
    for i in (0..lines.len() - 1).rev() {
        let line = &lines[i];
        let conc = &line.formula;
        let above = &lines[i + 1].formula;
        match line.rule {
            RuleId::Eqv | RuleId::EqvP | RuleId::Start => {
                base = entropy_to(Sequent::Leaf(conc.clone()), base);
            }
            rule => {
                let redex = conc
                    .subterm_at(&line.addr)
                    .ok_or_else(|| format!("bad address on line {i}"))?;
                let above_c = above.canonicalize_prime();
                let cand = bv::step_candidates(rule, redex)
                    .into_iter()
                    .find(|cand| {
                        conc.replace_at(&line.addr, cand.clone())
                            .map(|p| p.canonicalize_prime() == above_c)
                            .unwrap_or(false)
                    })
                    .ok_or_else(|| format!("no premise candidate on line {i}"))?;
                let mut duo = step_duo(rule, redex, &cand)?;
                for k in (0..line.addr.len()).rev() {
                    let parent = conc.subterm_at(&line.addr[..k]).unwrap();
                    let (kids, shape) = match parent {
                        Formula::Par(cs) => (cs, parent),
                        Formula::Tensor(cs) => (cs, parent),
                        Formula::Seq(cs) => (cs, parent),
                        _ => return Err(format!("bad context on line {i}")),
                    };
                    let j = line.addr[k];
                    if j + 1 < kids.len() {
                        let after = group(kids[j + 1..].to_vec(), shape);
                        duo = compose_right(duo, shape, &after)?;
                    }
                    if j > 0 {
                        let before = group(kids[..j].to_vec(), shape);
                        duo = compose_left(duo, shape, &before)?;
                    }
                }
                base = node(
                    SequentRule::Cut,
                    Sequent::Leaf(conc.clone()),
                    vec![base, duo.pf],
                );
            }
        }
    }
    Ok(base)
}

fn group(kids: Vec<Formula>, shape: &Formula) -> Formula {
    if kids.len() == 1 {
        return kids.into_iter().next().unwrap();
    }
    match shape {
        Formula::Par(_) => Formula::Par(kids),
        Formula::Tensor(_) => Formula::Tensor(kids),
        _ => Formula::Seq(kids),
    }
}

// ---------------------------------------------------------------------------
// An exponential-blowup family for cut elimination

/// The recursive scheme behind [`tiu_formula`]: index words over {0,1}
/// distinguish the variable families, and the two parameters thread the
/// neighbouring pars through the recursion.
pub fn xi(n: usize, i: &str, a: &Formula, b: &Formula) -> Formula {
    use crate::formula::{atom, natom};
    let v = |l: &str| atom(format!("{l}{i}"));
    let nv = |l: &str| natom(format!("{l}{i}"));
    let (left, right) = if n == 0 {
        (
            Formula::Par(vec![v("a"), v("b"), a.clone()]),
            Formula::Par(vec![nv("b"), nv("c"), b.clone()]),
        )
    } else {
        (
            xi(n - 1, &format!("{i}0"), &v("a"), &Formula::Par(vec![v("b"), a.clone()])),
            xi(n - 1, &format!("{i}1"), &nv("b"), &Formula::Par(vec![nv("c"), b.clone()])),
        )
    };
    Formula::Par(vec![
        Formula::Tensor(vec![left, v("y")]),
        Formula::Seq(vec![nv("y"), v("c")]),
        Formula::Seq(vec![nv("a"), v("z")]),
        Formula::Tensor(vec![nv("z"), right]),
    ])
}

/// The n-th member of the family: provable in BV, with only exponentially
/// larger cut-free sequent proofs. Balanced, unit-free, 20·2ⁿ − 10 atoms.
pub fn tiu_formula(n: usize) -> Formula {
    assert!(n <= 10, "the family doubles in size with each step");
    match crate::formula::remove_units(&xi(n, "0", &Formula::Unit, &Formula::Unit)) {
        crate::formula::UnitFree::Formula(f) => f,
        crate::formula::UnitFree::Unit => unreachable!("the family is never trivial"),
    }
}

// ---------------------------------------------------------------------------
// The first-level decorated-sequent calculus

fn flat_items(s: &Sequent) -> Result<Vec<Formula>, String> {
    match s {
        Sequent::Leaf(f) => Ok(vec![f.clone()]),
        Sequent::Par(cs) => cs
            .iter()
            .map(|c| match c {
                Sequent::Leaf(f) => Ok(f.clone()),
                _ => Err("sequent is not flat".to_string()),
            })
            .collect(),
        Sequent::Seq(_) => Err("sequent is not flat".to_string()),
    }
}

fn natoms(f: &Formula) -> usize {
    f.atoms().len()
}

/// Number of non-atomic subformula occurrences (= fresh pairs the unfolding
/// creates for this formula).
fn count_fresh(f: &Formula) -> usize {
    match f {
        Formula::Atom { .. } => 0,
        Formula::Unit => 1,
        Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
            1 + cs.iter().map(count_fresh).sum::<usize>()
        }
    }
}

/// First-fit assignment of the non-principal premise items to the
/// non-principal conclusion items (structural equality).
fn rest_map(
    pitems: &[Formula],
    skip: &[usize],
    citems: &[Formula],
    skipc: usize,
) -> Option<Vec<(usize, usize)>> {
    let mut used = vec![false; citems.len()];
    used[skipc] = true;
    let mut out = Vec::new();
    for (i, f) in pitems.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        let j = (0..citems.len()).find(|&j| !used[j] && &citems[j] == f)?;
        used[j] = true;
        out.push((i, j));
    }
    used.iter().all(|&u| u).then_some(out)
}

/// Atom occurrence bases of a flat item list.
fn atom_bases(items: &[Formula]) -> Vec<usize> {
    let mut out = Vec::with_capacity(items.len());
    let mut acc = 0;
    for f in items {
        out.push(acc);
        acc += natoms(f);
    }
    out
}

/// The tree-prenet vertex standing for item `idx`'s conclusion.
fn item_vertex(u: &Unfolding, items: &[Formula], idx: usize) -> usize {
    if matches!(items[idx], Formula::Atom { .. }) {
        let atoms_before: usize = items[..idx].iter().map(natoms).sum();
        u.occ_map[atoms_before]
    } else {
        let fresh_before: usize = items[..idx].iter().map(count_fresh).sum();
        u.fresh[fresh_before].pos_occ
    }
}

fn seq_side_ok(
    pitems: &[Formula],
    linking: &[(usize, usize)],
    i: usize,
    j: usize,
    budget: &mut Budget,
) -> Result<bool, BudgetExceeded> {
    let prem = Sequent::Par(pitems.iter().cloned().map(Sequent::Leaf).collect());
    let (net, u) = tree_prenet(&prem, &Linking(linking.to_vec()));
    let va = item_vertex(&u, pitems, i);
    let vb = item_vertex(&u, pitems, j);
    Ok(!net.ae_path_bb_exists(vb, va, budget)?)
}

fn slv(
    p: &SequentProof,
    check_sides: bool,
    budget: &mut Budget,
) -> Result<Result<Vec<(usize, usize)>, String>, BudgetExceeded> {
    macro_rules! bail {
        ($($t:tt)*) => { return Ok(Err(format!($($t)*))) };
    }
    macro_rules! get {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(e) => bail!("{e}"),
            }
        };
    }
    let items = get!(flat_items(&p.conclusion));
    if p.children.len() != p.rule.arity() {
        bail!("rule {} expects {} premises", p.rule.name(), p.rule.arity());
    }
    match p.rule {
        SequentRule::SlvAxiom => {
            if let [f1, f2] = items.as_slice() {
                if matches!(f1, Formula::Atom { .. }) && f1.negate() == *f2 {
                    return Ok(Ok(vec![(0, 1)]));
                }
            }
            bail!("axiom conclusion is not a dual atom pair")
        }
        SequentRule::SlvMix => {
            let l1 = get!(slv(&p.children[0], check_sides, budget)?);
            let l2 = get!(slv(&p.children[1], check_sides, budget)?);
            let i1 = get!(flat_items(&p.children[0].conclusion));
            let i2 = get!(flat_items(&p.children[1].conclusion));
            let concat: Vec<Formula> = i1.iter().chain(i2.iter()).cloned().collect();
            if items != concat {
                bail!("mix conclusion is not the premise concatenation");
            }
            let off: usize = i1.iter().map(natoms).sum();
            let mut l = l1;
            l.extend(l2.into_iter().map(|(u, v)| (u + off, v + off)));
            Ok(Ok(l))
        }
        SequentRule::SlvPar | SequentRule::SlvSeq => {
            let lk = get!(slv(&p.children[0], check_sides, budget)?);
            let pitems = get!(flat_items(&p.children[0].conclusion));
            let pbases = atom_bases(&pitems);
            let cbases = atom_bases(&items);
            for (k, f) in items.iter().enumerate() {
                let cs = match (p.rule, f) {
                    (SequentRule::SlvPar, Formula::Par(cs)) if cs.len() == 2 => cs,
                    (SequentRule::SlvSeq, Formula::Seq(cs)) if cs.len() == 2 => cs,
                    _ => continue,
                };
                for i in 0..pitems.len() {
                    for j in 0..pitems.len() {
                        if i == j || pitems[i] != cs[0] || pitems[j] != cs[1] {
                            continue;
                        }
                        let Some(rm) = rest_map(&pitems, &[i, j], &items, k) else {
                            continue;
                        };
                        if p.rule == SequentRule::SlvSeq
                            && check_sides
                            && !seq_side_ok(&pitems, &lk, i, j, budget)?
                        {
                            bail!(
                                "seq introduction of {} violates the order side condition",
                                f
                            );
                        }
                        let total: usize = pitems.iter().map(natoms).sum();
                        let mut amap = vec![0usize; total];
                        for t in 0..natoms(&pitems[i]) {
                            amap[pbases[i] + t] = cbases[k] + t;
                        }
                        let na = natoms(&pitems[i]);
                        for t in 0..natoms(&pitems[j]) {
                            amap[pbases[j] + t] = cbases[k] + na + t;
                        }
                        for &(pi, ci) in &rm {
                            for t in 0..natoms(&pitems[pi]) {
                                amap[pbases[pi] + t] = cbases[ci] + t;
                            }
                        }
                        return Ok(Ok(lk
                            .into_iter()
                            .map(|(u, v)| (amap[u], amap[v]))
                            .collect()));
                    }
                }
            }
            bail!("no principal formula matches the premise")
        }
        SequentRule::SlvTensor => {
            let l1 = get!(slv(&p.children[0], check_sides, budget)?);
            let l2 = get!(slv(&p.children[1], check_sides, budget)?);
            let i1 = get!(flat_items(&p.children[0].conclusion));
            let i2 = get!(flat_items(&p.children[1].conclusion));
            let off: usize = i1.iter().map(natoms).sum();
            let mut lk = l1;
            lk.extend(l2.into_iter().map(|(u, v)| (u + off, v + off)));
            let pitems: Vec<Formula> = i1.iter().chain(i2.iter()).cloned().collect();
            let pbases = atom_bases(&pitems);
            let cbases = atom_bases(&items);
            for (k, f) in items.iter().enumerate() {
                let Formula::Tensor(cs) = f else { continue };
                if cs.len() != 2 {
                    continue;
                }
                for i in 0..i1.len() {
                    for j in 0..i2.len() {
                        let jj = i1.len() + j;
                        if pitems[i] != cs[0] || pitems[jj] != cs[1] {
                            continue;
                        }
                        let Some(rm) = rest_map(&pitems, &[i, jj], &items, k) else {
                            continue;
                        };
                        let total: usize = pitems.iter().map(natoms).sum();
                        let mut amap = vec![0usize; total];
                        for t in 0..natoms(&pitems[i]) {
                            amap[pbases[i] + t] = cbases[k] + t;
                        }
                        let na = natoms(&pitems[i]);
                        for t in 0..natoms(&pitems[jj]) {
                            amap[pbases[jj] + t] = cbases[k] + na + t;
                        }
                        for &(pi, ci) in &rm {
                            for t in 0..natoms(&pitems[pi]) {
                                amap[pbases[pi] + t] = cbases[ci] + t;
                            }
                        }
                        return Ok(Ok(lk
                            .into_iter()
                            .map(|(u, v)| (amap[u], amap[v]))
                            .collect()));
                    }
                }
            }
            bail!("no tensor item splits into the premises")
        }
        _ => bail!("rule {} belongs to the dicograph calculus", p.rule.name()),
    }
}

/// Check a first-level pre-proof, including the per-◁ side condition on the
/// tree-like prenet of each premise. Returns the axiom linking of the
/// conclusion on success.
pub fn check_slavnov(
    p: &SequentProof,
    budget: &mut Budget,
) -> Result<Result<Linking, String>, BudgetExceeded> {
    Ok(slv(p, true, budget)?.map(Linking))
}

/// The axiom linking induced by a pre-proof, skipping the side conditions.
pub fn slavnov_linking(p: &SequentProof) -> Result<Linking, String> {
    slv(p, false, &mut Budget::unlimited())
        .expect("no search happens without side conditions")
        .map(Linking)
}

/// A random syntactically well-formed first-level pre-proof over
/// `n_axioms` axiom leaves (2·n_axioms atoms). Side conditions are not
/// consulted, so the result may or may not be accepted by
/// [`check_slavnov`].
pub fn random_slavnov_preproof<R: Rng>(rng: &mut R, n_axioms: usize) -> SequentProof {
    use crate::formula::{atom, natom};
    let mut pool: Vec<SequentProof> = (0..n_axioms.max(1))
        .map(|k| {
            let v = format!("v{k}");
            node(SequentRule::SlvAxiom, flat2(atom(v.clone()), natom(v)), vec![])
        })
        .collect();
    let unary = |rng: &mut R, p: SequentProof| -> SequentProof {
        let items = flat_items(&p.conclusion).unwrap();
        let i = rng.gen_range(0..items.len());
        let mut j = rng.gen_range(0..items.len() - 1);
        if j >= i {
            j += 1;
        }
        let (rule, combined) = if rng.gen_bool(0.5) {
            (SequentRule::SlvPar, Formula::Par(vec![items[i].clone(), items[j].clone()]))
        } else {
            (SequentRule::SlvSeq, Formula::Seq(vec![items[i].clone(), items[j].clone()]))
        };
        let mut rest: Vec<Sequent> = items
            .iter()
            .enumerate()
            .filter(|(t, _)| *t != i && *t != j)
            .map(|(_, f)| Sequent::Leaf(f.clone()))
            .collect();
        rest.push(Sequent::Leaf(combined));
        node(rule, Sequent::Par(rest), vec![p])
    };
    loop {
        let can_unary = pool
            .iter()
            .any(|p| flat_items(&p.conclusion).unwrap().len() >= 2);
        if pool.len() == 1 {
            let only_items = flat_items(&pool[0].conclusion).unwrap().len();
            if only_items < 2 || rng.gen_bool(0.4) {
                break;
            }
            let p = pool.pop().unwrap();
            pool.push(unary(rng, p));
            continue;
        }
        if can_unary && rng.gen_bool(0.4) {
            let candidates: Vec<usize> = pool
                .iter()
                .enumerate()
                .filter(|(_, p)| flat_items(&p.conclusion).unwrap().len() >= 2)
                .map(|(i, _)| i)
                .collect();
            let pi = candidates[rng.gen_range(0..candidates.len())];
            let p = pool.swap_remove(pi);
            pool.push(unary(rng, p));
        } else {
            let a = rng.gen_range(0..pool.len());
            let pa = pool.swap_remove(a);
            let b = rng.gen_range(0..pool.len());
            let pb = pool.swap_remove(b);
            let ia = flat_items(&pa.conclusion).unwrap();
            let ib = flat_items(&pb.conclusion).unwrap();
            let combined = if rng.gen_bool(0.5) {
                let items: Vec<Sequent> =
                    ia.iter().chain(ib.iter()).cloned().map(Sequent::Leaf).collect();
                node(SequentRule::SlvMix, Sequent::Par(items), vec![pa, pb])
            } else {
                let i = rng.gen_range(0..ia.len());
                let j = rng.gen_range(0..ib.len());
                let mut items: Vec<Sequent> = ia
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| *t != i)
                    .map(|(_, f)| Sequent::Leaf(f.clone()))
                    .collect();
                items.extend(
                    ib.iter()
                        .enumerate()
                        .filter(|(t, _)| *t != j)
                        .map(|(_, f)| Sequent::Leaf(f.clone())),
                );
                items.push(Sequent::Leaf(Formula::Tensor(vec![
                    ia[i].clone(),
                    ib[j].clone(),
                ])));
                node(SequentRule::SlvTensor, Sequent::Par(items), vec![pa, pb])
            };
            pool.push(combined);
        }
    }
    pool.pop().unwrap()
}

// ---------------------------------------------------------------------------
// Worked examples

/// A flat sequent provable in BV and with one cut, but not cut-free:
/// ⊢ { a⊗(c◁b⊥), a⊥◁f, c⊥◁d⊥, d⊗(e⊥◁f⊥), e◁b }.
pub fn example_sequent() -> Sequent {
    use crate::formula::{atom, natom};
    Sequent::flat(vec![
        tensor(vec![atom("a"), seq(vec![atom("c"), natom("b")])]),
        seq(vec![natom("a"), atom("f")]),
        seq(vec![natom("c"), natom("d")]),
        tensor(vec![atom("d"), seq(vec![natom("e"), natom("f")])]),
        seq(vec![atom("e"), atom("b")]),
    ])
}

/// A proof of [`example_sequent`] with a single cut on c◁(e◁f).
pub fn example_cut_proof() -> SequentProof {
    use crate::formula::{atom, natom};
    let ax = |v: &str| node(SequentRule::Axiom, flat2(atom(v), natom(v)), vec![]);
    let sq2 = |a: Formula, b: Formula| Sequent::Seq(vec![Sequent::Leaf(a), Sequent::Leaf(b)]);

    // Left branch: ⊢ { a⊗(c◁b⊥), a⊥◁f, c⊥◁(e⊥◁f⊥), e◁b }.
    let d1 = dimix(dimix(ax("c"), ax("e")), ax("b"));
    let e1 = entropy_to(
        Sequent::Par(vec![
            sq2(atom("c"), natom("b")),
            sq2(natom("c"), natom("e")),
            sq2(atom("e"), atom("b")),
        ]),
        d1,
    );
    let s1 = seq_intro(e1, atom("c"), natom("b"));
    let t1 = tensor_intro(ax("a"), s1, atom("a"), seq(vec![atom("c"), natom("b")]));
    let d2 = dimix(t1, ax("f"));
    let e2 = entropy_to(
        Sequent::Par(vec![
            Sequent::Leaf(tensor(vec![atom("a"), seq(vec![atom("c"), natom("b")])])),
            sq2(natom("a"), atom("f")),
            Sequent::Seq(vec![
                Sequent::Leaf(natom("c")),
                sq2(natom("e"), natom("f")),
            ]),
            sq2(atom("e"), atom("b")),
        ]),
        d2,
    );
    let i1 = seq_intro(e2, natom("e"), natom("f"));
    let i2 = seq_intro(i1, natom("c"), seq(vec![natom("e"), natom("f")]));
    let i3 = seq_intro(i2, natom("a"), atom("f"));
    let left = seq_intro(i3, atom("e"), atom("b"));

    // Right branch: ⊢ { c◁(e◁f), c⊥◁d⊥, d⊗(e⊥◁f⊥) }.
    let idef = identity_proof(&seq(vec![atom("e"), atom("f")])).unwrap();
    let t2 = tensor_intro(ax("d"), idef, atom("d"), seq(vec![natom("e"), natom("f")]));
    let d3 = dimix(ax("c"), t2);
    let e3 = entropy_to(
        Sequent::Par(vec![
            Sequent::Seq(vec![
                Sequent::Leaf(atom("c")),
                Sequent::Leaf(seq(vec![atom("e"), atom("f")])),
            ]),
            sq2(natom("c"), natom("d")),
            Sequent::Leaf(tensor(vec![atom("d"), seq(vec![natom("e"), natom("f")])])),
        ]),
        d3,
    );
    let j1 = seq_intro(e3, atom("c"), seq(vec![atom("e"), atom("f")]));
    let right = seq_intro(j1, natom("c"), natom("d"));

    node(SequentRule::Cut, example_sequent(), vec![left, right])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, natom, formula_to_sequent, par};
    use crate::rbnet::{is_correct, Mode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flat(fs: Vec<Formula>) -> Sequent {
        Sequent::flat(fs)
    }

    #[test]
    fn entropy_relaxes_order() {
        let p = Sequent::Seq(vec![Sequent::Leaf(atom("a")), Sequent::Leaf(atom("b"))]);
        let c = flat(vec![atom("a"), atom("b")]);
        assert!(entropy_valid(&c, &p));
        assert!(!entropy_valid(&p, &c));
        assert!(entropy_valid(&p, &p));
        assert!(entropy_valid(&c, &c));
        // A reversed order is not a relaxation.
        let r = Sequent::Seq(vec![Sequent::Leaf(atom("b")), Sequent::Leaf(atom("a"))]);
        assert!(!entropy_valid(&r, &p));
        // ... unless the formulas are interchangeable.
        let p2 = Sequent::Seq(vec![Sequent::Leaf(atom("a")), Sequent::Leaf(atom("a"))]);
        assert!(entropy_valid(&p2, &p2));
    }

    #[test]
    fn axiom_check() {
        let good = SequentProof::new(SequentRule::Axiom, flat(vec![atom("a"), natom("a")]), vec![]);
        assert!(check_retore(&good, false).is_ok());
        let bad = SequentProof::new(SequentRule::Axiom, flat(vec![atom("a"), natom("b")]), vec![]);
        assert!(check_retore(&bad, false).is_err());
        let nonatomic = SequentProof::new(
            SequentRule::Axiom,
            flat(vec![seq(vec![atom("a"), atom("b")]), seq(vec![natom("a"), natom("b")])]),
            vec![],
        );
        assert!(check_retore(&nonatomic, false).is_err());
    }

    #[test]
    fn example_proof_checks_with_cut_only() {
        let p = example_cut_proof();
        assert_eq!(p.conclusion, example_sequent());
        check_retore(&p, true).unwrap();
        assert!(check_retore(&p, false).is_err());
    }

    #[test]
    fn proof_text_roundtrip() {
        let p = example_cut_proof();
        let text = p.to_string();
        let q = SequentProof::parse(&text).unwrap();
        assert_eq!(p, q);
        check_retore(&q, true).unwrap();
    }

    #[test]
    fn identity_proofs_check() {
        for f in [
            atom("a"),
            par(vec![atom("a"), natom("b")]),
            seq(vec![atom("a"), tensor(vec![atom("b"), atom("c")])]),
            tensor(vec![par(vec![atom("a"), atom("b")]), seq(vec![atom("c"), atom("d")])]),
        ] {
            let p = identity_proof(&f).unwrap();
            check_retore(&p, false).unwrap();
            let want = flat(vec![f.negate(), f.clone()]).canonicalize();
            assert_eq!(p.conclusion.canonicalize(), want, "identity of {f}");
        }
    }

    #[test]
    fn search_finds_small_proofs() {
        let mut b = Budget::unlimited();
        // Axiom.
        let s = flat(vec![atom("a"), natom("a")]);
        let p = search_cutfree(&s, &mut b).unwrap().unwrap();
        check_retore(&p, false).unwrap();
        // Identity of a seq formula.
        let s = flat(vec![seq(vec![atom("a"), atom("b")]), seq(vec![natom("a"), natom("b")])]);
        let p = search_cutfree(&s, &mut b).unwrap().unwrap();
        check_retore(&p, false).unwrap();
        assert_eq!(p.conclusion.canonicalize(), s.canonicalize());
        // The same leaves with the second seq reversed: not provable.
        let s = flat(vec![seq(vec![atom("a"), atom("b")]), seq(vec![natom("b"), natom("a")])]);
        assert!(search_cutfree(&s, &mut b).unwrap().is_none());
        // One-sided and empty sequents.
        assert!(search_cutfree(&flat(vec![atom("a")]), &mut b).unwrap().is_none());
        assert!(search_cutfree(&Sequent::empty(), &mut b).unwrap().is_none());
        // A tensor inside a seq context.
        let s = flat(vec![
            seq(vec![tensor(vec![natom("a"), natom("c")]), tensor(vec![natom("b"), natom("d")])]),
            par(vec![seq(vec![atom("a"), atom("b")]), seq(vec![atom("c"), atom("d")])]),
        ]);
        let p = search_cutfree(&s, &mut b).unwrap().unwrap();
        check_retore(&p, false).unwrap();
        assert_eq!(p.conclusion.canonicalize(), s.canonicalize());
    }

    #[test]
    fn example_sequent_has_no_cutfree_proof() {
        let mut b = Budget::new(50_000_000);
        assert_eq!(search_cutfree(&example_sequent(), &mut b).unwrap(), None);
    }

    #[test]
    fn search_agrees_with_deep_inference() {
        // On flat sequents of balanced formulas, cut-free sequent
        // provability coincides with BV provability of the par of the
        // items (both match proof-net correctness at this scale).
        let mut b = Budget::unlimited();
        let cases = [
            (vec![atom("a"), natom("a")], true),
            (vec![seq(vec![atom("a"), atom("b")]), seq(vec![natom("a"), natom("b")])], true),
            (vec![seq(vec![atom("a"), atom("b")]), seq(vec![natom("b"), natom("a")])], false),
            (vec![tensor(vec![atom("a"), atom("b")]), natom("a"), natom("b")], true),
            (vec![tensor(vec![atom("a"), atom("b")]), par(vec![natom("a"), natom("b")])], true),
            (vec![tensor(vec![atom("a"), atom("b")]), tensor(vec![natom("a"), natom("b")])], false),
            (
                vec![
                    tensor(vec![atom("a"), atom("b")]),
                    seq(vec![natom("a"), atom("c")]),
                    seq(vec![natom("c"), natom("b")]),
                ],
                false,
            ),
            (
                vec![
                    seq(vec![atom("a"), atom("b")]),
                    seq(vec![natom("b"), atom("c")]),
                    seq(vec![natom("c"), natom("a")]),
                ],
                false,
            ),
            (
                vec![
                    seq(vec![atom("a"), atom("b")]),
                    seq(vec![natom("b"), atom("c")]),
                    par(vec![natom("c"), natom("a")]),
                ],
                true,
            ),
        ];
        for (items, expect) in cases {
            let s = flat(items.clone());
            let found = search_cutfree(&s, &mut b).unwrap();
            assert_eq!(found.is_some(), expect, "sequent {s}");
            if let Some(p) = found {
                check_retore(&p, false).unwrap();
            }
            let f = Formula::Par(items);
            let bv_res = bv::prove(&f, System::Bv, &mut b).unwrap();
            assert_eq!(bv_res.is_some(), expect, "formula {f}");
        }
    }

    #[test]
    fn translate_small_bvu_proofs() {
        let mut b = Budget::unlimited();
        let cases = [
            par(vec![atom("a"), natom("a")]),
            par(vec![seq(vec![atom("a"), atom("b")]), seq(vec![natom("a"), natom("b")])]),
            par(vec![tensor(vec![atom("a"), atom("b")]), natom("a"), natom("b")]),
            par(vec![
                seq(vec![atom("a"), atom("b")]),
                seq(vec![natom("a"), atom("c")]),
                seq(vec![natom("c"), natom("b")]),
            ]),
        ];
        for f in cases {
            let d = bv::prove(&f, System::Bvu, &mut b).unwrap().unwrap_or_else(|| {
                panic!("no deep-inference proof of {f}")
            });
            let p = translate_bvu_proof(&d).unwrap();
            check_retore(&p, true).unwrap();
            assert_eq!(
                p.conclusion.canonicalize(),
                Sequent::Leaf(f.clone()).canonicalize(),
                "translation of a proof of {f}"
            );
        }
    }

    #[test]
    fn tiu_formula_shape() {
        let r0 = tiu_formula(0);
        assert_eq!(r0.size(), 10);
        assert!(r0.is_balanced());
        let expected = crate::formula::parse_formula(
            "[([a0 | b0] * y0) | <y0' ; c0> | <a0' ; z0> | (z0' * [b0' | c0'])]",
        )
        .unwrap();
        assert_eq!(r0.canonicalize(), expected);
        let r1 = tiu_formula(1);
        assert_eq!(r1.size(), 30);
        assert!(r1.is_balanced());
        for n in 0..=4 {
            assert_eq!(tiu_formula(n).size(), 20 * (1 << n) - 10, "n = {n}");
        }
    }

    #[test]
    fn tiu_base_has_no_cutfree_proof() {
        let s = formula_to_sequent(&tiu_formula(0));
        let mut b = Budget::new(50_000_000);
        assert_eq!(search_cutfree(&s, &mut b).unwrap(), None);
    }

    #[test]
    fn slavnov_accepts_a_correct_preproof() {
        let axa = SequentProof::new(SequentRule::SlvAxiom, flat(vec![atom("a"), natom("a")]), vec![]);
        let axb = SequentProof::new(SequentRule::SlvAxiom, flat(vec![atom("b"), natom("b")]), vec![]);
        let mix = SequentProof::new(
            SequentRule::SlvMix,
            flat(vec![atom("a"), natom("a"), atom("b"), natom("b")]),
            vec![axa, axb],
        );
        let s1 = SequentProof::new(
            SequentRule::SlvSeq,
            flat(vec![natom("a"), natom("b"), seq(vec![atom("a"), atom("b")])]),
            vec![mix],
        );
        let s2 = SequentProof::new(
            SequentRule::SlvSeq,
            flat(vec![seq(vec![atom("a"), atom("b")]), seq(vec![natom("a"), natom("b")])]),
            vec![s1],
        );
        let p = SequentProof::new(
            SequentRule::SlvPar,
            flat(vec![par(vec![
                seq(vec![atom("a"), atom("b")]),
                seq(vec![natom("a"), natom("b")]),
            ])]),
            vec![s2],
        );
        let mut b = Budget::unlimited();
        let l = check_slavnov(&p, &mut b).unwrap().unwrap();
        assert!(is_correct(&p.conclusion, &l, Mode::Tree, &mut b).unwrap());
    }

    #[test]
    fn slavnov_rejects_an_incorrect_seq() {
        let axa = SequentProof::new(SequentRule::SlvAxiom, flat(vec![atom("a"), natom("a")]), vec![]);
        let axb = SequentProof::new(SequentRule::SlvAxiom, flat(vec![atom("b"), natom("b")]), vec![]);
        let t = SequentProof::new(
            SequentRule::SlvTensor,
            flat(vec![natom("a"), natom("b"), tensor(vec![atom("a"), atom("b")])]),
            vec![axa, axb],
        );
        let s = SequentProof::new(
            SequentRule::SlvSeq,
            flat(vec![tensor(vec![atom("a"), atom("b")]), seq(vec![natom("a"), natom("b")])]),
            vec![t],
        );
        let mut b = Budget::unlimited();
        assert!(check_slavnov(&s, &mut b).unwrap().is_err());
        // The linking itself exists, and yields an incorrect tree prenet.
        let l = slavnov_linking(&s).unwrap();
        assert!(!is_correct(&s.conclusion, &l, Mode::Tree, &mut b).unwrap());
    }

    #[test]
    fn slavnov_agreement_with_tree_correctness() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut b = Budget::unlimited();
        for round in 0..60 {
            let n = 1 + round % 4;
            let p = random_slavnov_preproof(&mut rng, n);
            let l = slavnov_linking(&p).unwrap();
            let accepted = check_slavnov(&p, &mut b).unwrap().is_ok();
            let correct = is_correct(&p.conclusion, &l, Mode::Tree, &mut b).unwrap();
            assert_eq!(accepted, correct, "round {round}: {p}");
        }
    }
}

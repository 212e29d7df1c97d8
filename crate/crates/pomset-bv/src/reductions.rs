//! Complexity-reduction constructions: CNF instances, the clause-choice and
//! assignment digraphs, their superposition into an RB-digraph whose
//! æ-cycles witness satisfiability, proofification of RB-digraphs into flat
//! balanced sequents, and the paired variants handling ∀∃-CNF. Brute-force
//! SAT/QBF oracles are included for cross-checking.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::dicograph::Digraph;
use crate::formula::{Atom, Formula, Sequent};
use crate::rbnet::RBDigraph;

/// A literal: variable index plus polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: usize,
    pub neg: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Lit {
        Lit { var, neg: false }
    }
    pub fn neg(var: usize) -> Lit {
        Lit { var, neg: true }
    }
}

/// A CNF instance, optionally with a universal prefix: variables
/// `0..n_universal` are universally quantified, the rest existentially.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub n_universal: usize,
    /// Clauses as sorted duplicate-free literal lists.
    pub clauses: Vec<Vec<Lit>>,
}

impl CnfInstance {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<CnfInstance, String> {
        Self::with_prefix(num_vars, 0, clauses)
    }

    pub fn with_prefix(
        num_vars: usize,
        n_universal: usize,
        clauses: Vec<Vec<Lit>>,
    ) -> Result<CnfInstance, String> {
        if n_universal > num_vars {
            return Err("universal prefix larger than variable count".into());
        }
        let mut cleaned = Vec::with_capacity(clauses.len());
        for c in clauses {
            if c.is_empty() {
                return Err("empty clause".into());
            }
            if let Some(l) = c.iter().find(|l| l.var >= num_vars) {
                return Err(format!("literal references undeclared variable {}", l.var + 1));
            }
            let set: BTreeSet<Lit> = c.into_iter().collect();
            cleaned.push(set.into_iter().collect());
        }
        Ok(CnfInstance { num_vars, n_universal, clauses: cleaned })
    }

    /// Parse DIMACS CNF. The extension line `c forall v1 v2 ...` declares
    /// universally quantified variables; they must form a prefix of the
    /// variable order (variables are renumbered universal-first otherwise).
    pub fn parse_dimacs(text: &str) -> Result<CnfInstance, String> {
        let mut num_vars = None;
        let mut universals: BTreeSet<usize> = BTreeSet::new();
        let mut lits: Vec<i64> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("c forall") {
                for tok in rest.split_whitespace() {
                    let v: usize =
                        tok.parse().map_err(|_| format!("bad variable '{tok}' in forall line"))?;
                    if v == 0 {
                        return Err("variable numbers start at 1".into());
                    }
                    universals.insert(v - 1);
                }
                continue;
            }
            if line.starts_with('c') || line.starts_with('%') || line == "0" {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p cnf") {
                let mut it = rest.split_whitespace();
                num_vars = Some(
                    it.next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .ok_or("bad p cnf header")?,
                );
                continue;
            }
            if line.starts_with('p') {
                return Err(format!("unsupported problem line: {line}"));
            }
            for tok in line.split_whitespace() {
                lits.push(tok.parse().map_err(|_| format!("bad literal '{tok}'"))?);
            }
        }
        let num_vars = num_vars.ok_or("missing p cnf header")?;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for l in lits {
            if l == 0 {
                if !cur.is_empty() {
                    clauses.push(std::mem::take(&mut cur));
                }
            } else {
                let var = l.unsigned_abs() as usize - 1;
                cur.push(Lit { var, neg: l < 0 });
            }
        }
        if !cur.is_empty() {
            clauses.push(cur);
        }
        // renumber so universals form a prefix, preserving relative order
        let mut order: Vec<usize> = (0..num_vars).collect();
        order.sort_by_key(|v| (!universals.contains(v), *v));
        let mut rename = vec![0usize; num_vars];
        for (new, &old) in order.iter().enumerate() {
            rename[old] = new;
        }
        let clauses = clauses
            .into_iter()
            .map(|c| c.into_iter().map(|l| Lit { var: rename[l.var], neg: l.neg }).collect())
            .collect();
        CnfInstance::with_prefix(num_vars, universals.len(), clauses)
    }

    /// Does every variable that occurs do so with both polarities?
    pub fn is_normalized(&self) -> bool {
        let mut pol = vec![[false; 2]; self.num_vars];
        for c in &self.clauses {
            for l in c {
                pol[l.var][l.neg as usize] = true;
            }
        }
        pol.iter().all(|p| p[0] == p[1])
    }
}

impl fmt::Display for CnfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        if self.n_universal > 0 {
            let vars: Vec<String> = (1..=self.n_universal).map(|v| v.to_string()).collect();
            writeln!(f, "c forall {}", vars.join(" "))?;
        }
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                write!(f, "{} ", if l.neg { -v } else { v })?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// Iteratively delete clauses containing a literal whose variable occurs
/// with a single polarity, until every remaining variable is balanced.
/// Equisatisfiable (the pure literal can be set to satisfy those clauses).
pub fn normalize_polarities(f: &CnfInstance) -> CnfInstance {
    let mut clauses = f.clauses.clone();
    loop {
        let mut pol = vec![[false; 2]; f.num_vars];
        for c in &clauses {
            for l in c {
                pol[l.var][l.neg as usize] = true;
            }
        }
        let before = clauses.len();
        clauses.retain(|c| {
            c.iter().all(|l| pol[l.var][0] && pol[l.var][1])
        });
        if clauses.len() == before {
            break;
        }
    }
    CnfInstance { num_vars: f.num_vars, n_universal: f.n_universal, clauses }
}

/// Literal occurrences in clause-major order; these are the shared
/// intermediate vertices of the clause-choice and assignment digraphs.
pub fn occurrences(f: &CnfInstance) -> Vec<(usize, Lit)> {
    let mut occ = Vec::new();
    for (i, c) in f.clauses.iter().enumerate() {
        for &l in c {
            occ.push((i, l));
        }
    }
    occ
}

/// Shared vertex layout for the two digraphs: `s` = 0, occurrences 1..=k,
/// `t` = k+1.
fn layout(f: &CnfInstance) -> (Vec<(usize, Lit)>, usize, usize, usize) {
    let occ = occurrences(f);
    let n = occ.len() + 2;
    let s = 0;
    let t = n - 1;
    (occ, n, s, t)
}

/// The clause-choice digraph: `s → t` paths pick one literal per clause.
pub fn build_gcl(f: &CnfInstance) -> Result<(Digraph, usize, usize), String> {
    if f.clauses.is_empty() {
        return Err("no clauses (trivially satisfiable)".into());
    }
    let (occ, n, s, t) = layout(f);
    let v = |i: usize| i + 1; // occurrence index -> vertex id
    let mut g = Digraph::new(n);
    let rows: Vec<Vec<usize>> = (0..f.clauses.len())
        .map(|i| (0..occ.len()).filter(|&k| occ[k].0 == i).collect())
        .collect();
    for &k in &rows[0] {
        g.add_edge(s, v(k));
    }
    for w in rows.windows(2) {
        for &k in &w[0] {
            for &k2 in &w[1] {
                g.add_edge(v(k), v(k2));
            }
        }
    }
    for &k in rows.last().unwrap() {
        g.add_edge(v(k), t);
    }
    Ok((g, s, t))
}

/// First and last occurrence (as vertex ids) of every literal.
fn literal_ends(f: &CnfInstance) -> HashMap<Lit, (usize, usize)> {
    let (occ, ..) = layout(f);
    let mut ends: HashMap<Lit, (usize, usize)> = HashMap::new();
    for (k, &(_, l)) in occ.iter().enumerate() {
        let v = k + 1;
        ends.entry(l).and_modify(|e| e.1 = v).or_insert((v, v));
    }
    ends
}

/// The assignment digraph: `t → s` paths choose, for each variable in
/// order, one polarity chain; the visited occurrences are exactly the
/// literals the assignment makes false.
pub fn build_gvar(f: &CnfInstance) -> Result<(Digraph, usize, usize), String> {
    let (occ, n, s, t) = layout(f);
    let mut g = Digraph::new(n);
    let ends = literal_ends(f);
    let live: Vec<usize> = (0..f.num_vars)
        .filter(|&x| ends.contains_key(&Lit::pos(x)) || ends.contains_key(&Lit::neg(x)))
        .collect();
    for &x in &live {
        if !(ends.contains_key(&Lit::pos(x)) && ends.contains_key(&Lit::neg(x))) {
            return Err(format!(
                "variable {} does not occur with both polarities (normalize first)",
                x + 1
            ));
        }
    }
    // (i) consecutive occurrences of the same literal
    let mut chains: HashMap<Lit, Vec<usize>> = HashMap::new();
    for (k, &(_, l)) in occ.iter().enumerate() {
        chains.entry(l).or_default().push(k + 1);
    }
    for chain in chains.values() {
        for w in chain.windows(2) {
            g.add_edge(w[0], w[1]);
        }
    }
    // (ii) last occurrence of either polarity of x_k to first occurrence of
    // either polarity of x_{k+1}
    for w in live.windows(2) {
        for la in [Lit::pos(w[0]), Lit::neg(w[0])] {
            for lb in [Lit::pos(w[1]), Lit::neg(w[1])] {
                g.add_edge(ends[&la].1, ends[&lb].0);
            }
        }
    }
    if let (Some(&first), Some(&last)) = (live.first(), live.last()) {
        // (iii) t to the first occurrences of both polarities of the first
        // variable; (iv) last occurrences of the last variable to s
        g.add_edge(t, ends[&Lit::pos(first)].0);
        g.add_edge(t, ends[&Lit::neg(first)].0);
        g.add_edge(ends[&Lit::pos(last)].1, s);
        g.add_edge(ends[&Lit::neg(last)].1, s);
    } else {
        g.add_edge(t, s);
    }
    Ok((g, t, s))
}

/// Vertex ids of the superposed RB-digraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupVertex {
    S1,
    S2,
    T1,
    T2,
    Plus(usize),
    Minus(usize),
}

/// Index layout for [`superpose`]: s₁, s₂, t₁, t₂, then v⊕/v⊖ per
/// intermediate vertex in ascending order.
pub fn sup_index(v: SupVertex, s: usize, t: usize) -> usize {
    let inner = |w: usize| {
        // rank of w among vertices distinct from s and t
        w - (w > s) as usize - (w > t) as usize
    };
    match v {
        SupVertex::S1 => 0,
        SupVertex::S2 => 1,
        SupVertex::T1 => 2,
        SupVertex::T2 => 3,
        SupVertex::Plus(w) => 4 + 2 * inner(w),
        SupVertex::Minus(w) => 5 + 2 * inner(w),
    }
}

fn map_edge_g1(s: usize, t: usize, a: usize, b: usize) -> (usize, usize) {
    use SupVertex::*;
    let from = if a == s { S1 } else { Minus(a) };
    let to = if b == t { T1 } else { Plus(b) };
    (sup_index(from, s, t), sup_index(to, s, t))
}

fn map_edge_g2(s: usize, t: usize, a: usize, b: usize) -> (usize, usize) {
    use SupVertex::*;
    let from = if a == t { T2 } else { Plus(a) };
    let to = if b == s { S2 } else { Minus(b) };
    (sup_index(from, s, t), sup_index(to, s, t))
}

/// Superpose two digraphs on the same vertex set into an RB-digraph whose
/// æ-cycles are in bijection with pairs of an `s → t` path in `g1` and a
/// `t → s` path in `g2` that are vertex-disjoint except at the endpoints.
pub fn superpose(
    g1: &Digraph,
    g2: &Digraph,
    s: usize,
    t: usize,
) -> Result<RBDigraph, String> {
    if g1.n() != g2.n() {
        return Err("vertex sets differ".into());
    }
    let n = g1.n();
    for u in 0..n {
        if g1.has(u, s) {
            return Err(format!("edge ({u},{s}) enters s in the first digraph"));
        }
        if g1.has(t, u) {
            return Err(format!("edge ({t},{u}) leaves t in the first digraph"));
        }
        if g2.has(u, t) {
            return Err(format!("edge ({u},{t}) enters t in the second digraph"));
        }
        if g2.has(s, u) {
            return Err(format!("edge ({s},{u}) leaves s in the second digraph"));
        }
    }
    for (g, name) in [(g1, "first"), (g2, "second")] {
        if !is_acyclic(g) {
            return Err(format!("the {name} digraph is not acyclic"));
        }
    }
    let m = n - 2; // intermediate vertices
    let mut r = Digraph::new(4 + 2 * m);
    for (a, b) in g1.edges() {
        let (x, y) = map_edge_g1(s, t, a, b);
        r.add_edge(x, y);
    }
    for (a, b) in g2.edges() {
        let (x, y) = map_edge_g2(s, t, a, b);
        r.add_edge(x, y);
    }
    let mut pairs = vec![(0usize, 1usize), (2, 3)];
    for i in 0..m {
        pairs.push((4 + 2 * i, 5 + 2 * i));
    }
    RBDigraph::new(r, &pairs).map_err(|e| format!("bad matching: {e:?}"))
}

fn is_acyclic(g: &Digraph) -> bool {
    // Kahn's algorithm
    let n = g.n();
    let mut indeg = vec![0usize; n];
    for (_, v) in g.edges() {
        indeg[v] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for v in 0..n {
            if g.has(u, v) {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
    }
    seen == n
}

/// The SAT→æ-cycle reduction: superpose the clause-choice and assignment
/// digraphs of a normalized instance. The result has an æ-cycle iff the
/// instance is satisfiable.
pub fn sat_to_rb(f: &CnfInstance) -> Result<RBDigraph, String> {
    if f.n_universal > 0 {
        return Err("instance has a universal prefix (use the paired pipeline)".into());
    }
    let f = normalize_polarities(f);
    let (g1, s, t) = build_gcl(&f)?;
    let (g2, ..) = build_gvar(&f)?;
    superpose(&g1, &g2, s, t)
}

/// Edge classification of an RB-digraph's R-edges over vertex pairs.
fn classify(g: &RBDigraph) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let n = g.n();
    let mut t_edges = Vec::new(); // (u, v) with u < v, bidirectional
    let mut s_edges = Vec::new(); // (u, v) directed, single
    for u in 0..n {
        for v in 0..n {
            if u < v && g.r.has(u, v) && g.r.has(v, u) {
                t_edges.push((u, v));
            } else if g.r.has(u, v) && !g.r.has(v, u) {
                s_edges.push((u, v));
            }
        }
    }
    (t_edges, s_edges)
}

fn atom_name(u: usize, w: usize) -> String {
    format!("a{u}_{w}")
}

/// The proofification of an RB-digraph: a flat balanced sequent with one
/// tensor formula per matching pair and one seq formula per directed
/// R-edge. Its (unique) prenet is incorrect iff the graph has an æ-cycle.
pub fn proofification(g: &RBDigraph) -> Sequent {
    paired_proofification_impl(g, &[])
}

/// An RB-digraph with disjoint unordered pairs of same-source R-edges; a
/// switching keeps exactly one edge of each pair.
#[derive(Clone, Debug)]
pub struct PairedRBDigraph {
    pub rb: RBDigraph,
    pub pairs: Vec<[(usize, usize); 2]>,
}

impl PairedRBDigraph {
    pub fn new(rb: RBDigraph, pairs: Vec<[(usize, usize); 2]>) -> Result<Self, String> {
        let mut seen = BTreeSet::new();
        for p in &pairs {
            if p[0].0 != p[1].0 {
                return Err(format!("paired edges {:?} do not share a source", p));
            }
            if p[0] == p[1] {
                return Err(format!("degenerate pair {:?}", p));
            }
            for e in p {
                if !rb.r.has(e.0, e.1) {
                    return Err(format!("paired edge {e:?} is not an edge"));
                }
                if !seen.insert(*e) {
                    return Err(format!("edge {e:?} appears in two pairs"));
                }
            }
        }
        Ok(PairedRBDigraph { rb, pairs })
    }

    /// All switchings: one sub-RB-digraph per way of keeping exactly one
    /// edge from each pair.
    pub fn switchings(&self) -> Vec<RBDigraph> {
        let k = self.pairs.len();
        let mut out = Vec::with_capacity(1 << k);
        for mask in 0u64..(1 << k) {
            let mut r = self.rb.r.clone();
            for (i, p) in self.pairs.iter().enumerate() {
                let drop = p[(mask >> i & 1) as usize];
                r.remove_edge(drop.0, drop.1);
            }
            out.push(RBDigraph::new(r, &self.rb.b_pairs()).expect("matching unchanged"));
        }
        out
    }
}

/// Apply the 3-path split wherever a paired edge's opposite edge is
/// present: the opposite edge (v,u) is replaced by v→n₁, a matched pair
/// {n₁,n₂}, and n₂→u.
fn split_opposites(g: &PairedRBDigraph) -> PairedRBDigraph {
    let mut to_split: Vec<(usize, usize)> = Vec::new();
    for p in &g.pairs {
        for &(u, v) in p {
            if g.rb.r.has(v, u) && !to_split.contains(&(v, u)) {
                to_split.push((v, u));
            }
        }
    }
    if to_split.is_empty() {
        return g.clone();
    }
    let old_n = g.rb.n();
    let n = old_n + 2 * to_split.len();
    let mut r = Digraph::new(n);
    for (a, b) in g.rb.r.edges() {
        if !to_split.contains(&(a, b)) {
            r.add_edge(a, b);
        }
    }
    let mut pairs = g.rb.b_pairs();
    for (i, &(v, u)) in to_split.iter().enumerate() {
        let n1 = old_n + 2 * i;
        let n2 = n1 + 1;
        r.add_edge(v, n1);
        r.add_edge(n2, u);
        pairs.push((n1, n2));
    }
    let rb = RBDigraph::new(r, &pairs).expect("matching still perfect");
    PairedRBDigraph { rb, pairs: g.pairs.clone() }
}

fn paired_proofification_impl(g: &RBDigraph, pairs: &[[(usize, usize); 2]]) -> Sequent {
    let (_, s_edges) = classify(g);
    // pair id per paired edge
    let mut pair_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (k, p) in pairs.iter().enumerate() {
        pair_of.insert(p[0], k);
        pair_of.insert(p[1], k);
    }
    // The atom a vertex u contributes for the edge joining it to w.
    let side_atom = |u: usize, w: usize| -> Atom {
        if u < w && g.r.has(u, w) && g.r.has(w, u) {
            Atom::pos(atom_name(u, w))
        } else if g.r.has(u, w) && g.r.has(w, u) {
            Atom::negf(atom_name(w, u))
        } else if g.r.has(u, w) {
            // outgoing directed edge
            match pair_of.get(&(u, w)) {
                Some(&k) => Atom::pos(format!("a{u}_p{k}")),
                None => Atom::pos(atom_name(u, w)),
            }
        } else {
            // incoming directed edge (w, u)
            match pair_of.get(&(w, u)) {
                Some(&k) => Atom::pos(format!("b{k}")),
                None => Atom::pos(atom_name(u, w)),
            }
        }
    };
    let conjunct = |u: usize| -> Formula {
        let mut atoms: Vec<Formula> = Vec::new();
        let mut seen_pairs = BTreeSet::new();
        for w in 0..g.n() {
            if w == u || !(g.r.has(u, w) || g.r.has(w, u)) {
                continue;
            }
            if let Some(&k) = pair_of.get(&(u, w)) {
                // source side of a pair: one shared atom for both edges
                if g.r.has(u, w) && !g.r.has(w, u) && !seen_pairs.insert(k) {
                    continue;
                }
            }
            atoms.push(Formula::Atom { atom: side_atom(u, w), tag: 0 });
        }
        match atoms.len() {
            0 => Formula::Unit,
            1 => atoms.pop().unwrap(),
            _ => Formula::Par(atoms),
        }
    };
    let mut leaves: Vec<Sequent> = Vec::new();
    for (u, v) in g.b_pairs() {
        let (u, v) = (u.min(v), u.max(v));
        leaves.push(Sequent::Leaf(Formula::Tensor(vec![conjunct(u), conjunct(v)])));
    }
    for (u, v) in s_edges {
        if pair_of.contains_key(&(u, v)) {
            continue;
        }
        leaves.push(Sequent::Leaf(Formula::Seq(vec![
            Formula::Atom { atom: Atom::negf(atom_name(u, v)), tag: 0 },
            Formula::Atom { atom: Atom::negf(atom_name(v, u)), tag: 0 },
        ])));
    }
    for (k, p) in pairs.iter().enumerate() {
        let u = p[0].0;
        let a = Atom::negf(format!("a{u}_p{k}"));
        let b = Atom::negf(format!("b{k}"));
        leaves.push(Sequent::Leaf(Formula::Par(vec![
            Formula::Seq(vec![
                Formula::Atom { atom: a, tag: 0 },
                Formula::Atom { atom: b.clone(), tag: 0 },
            ]),
            Formula::Atom { atom: b, tag: 0 },
        ])));
    }
    if leaves.len() == 1 {
        leaves.pop().unwrap()
    } else {
        Sequent::Par(leaves)
    }
}

/// Proofification extended to paired digraphs: the pair's source conjunct
/// shares one atom across the two edges, both targets share the `b` atom,
/// and the pair contributes `[⟨a⊥;b⊥⟩|b⊥]`. Linkings of the result are in
/// bijection with switchings, and the sequent is unprovable iff every
/// switching has an æ-cycle.
pub fn paired_proofification(g: &PairedRBDigraph) -> Sequent {
    let g = split_opposites(g);
    paired_proofification_impl(&g.rb, &g.pairs)
}

/// The assignment digraph together with the edge pairing 𝒫 that makes
/// universal chains adversarial: for each universal variable the two
/// chain-entry edges (from the previous variable's chain ends, or from `t`
/// for the first variable) are paired.
pub fn paired_gvar(
    f: &CnfInstance,
) -> Result<(Digraph, usize, usize, Vec<[(usize, usize); 2]>), String> {
    let (g, t, s) = build_gvar(f)?;
    let ends = literal_ends(f);
    let mut pairs = Vec::new();
    for i in 0..f.n_universal {
        let u_pos = ends
            .get(&Lit::pos(i))
            .ok_or_else(|| format!("universal variable {} does not occur", i + 1))?
            .0;
        let u_neg = ends[&Lit::neg(i)].0;
        if i == 0 {
            pairs.push([(t, u_pos), (t, u_neg)]);
        } else {
            for prev in [ends[&Lit::pos(i - 1)].1, ends[&Lit::neg(i - 1)].1] {
                pairs.push([(prev, u_pos), (prev, u_neg)]);
            }
        }
    }
    Ok((g, t, s, pairs))
}

/// The ∀∃ reduction: superpose the clause-choice digraph with the paired
/// assignment digraph, carrying the pairing through to the superposed
/// edges.
pub fn qbf_to_paired_rb(f: &CnfInstance) -> Result<PairedRBDigraph, String> {
    let (g1, s, t) = build_gcl(f)?;
    let (g2, _, _, pairs) = paired_gvar(f)?;
    let rb = superpose(&g1, &g2, s, t)?;
    let pairs = pairs
        .into_iter()
        .map(|p| p.map(|(a, b)| map_edge_g2(s, t, a, b)))
        .collect();
    PairedRBDigraph::new(rb, pairs)
}

/// End-to-end SAT reduction to a flat balanced sequent: the sequent is
/// pomset-provable iff the instance is unsatisfiable.
pub fn sat_to_sequent(f: &CnfInstance) -> Result<Sequent, String> {
    Ok(proofification(&sat_to_rb(f)?))
}

/// End-to-end ∀∃ reduction: the sequent is pomset-provable iff the
/// instance is false.
pub fn qbf_to_sequent(f: &CnfInstance) -> Result<Sequent, String> {
    Ok(paired_proofification(&qbf_to_paired_rb(f)?))
}

fn clause_satisfied(c: &[Lit], assign: u64) -> bool {
    c.iter().any(|l| (assign >> l.var & 1 == 1) != l.neg)
}

/// Exhaustive CNF satisfiability (≤ 24 variables).
pub fn brute_sat(f: &CnfInstance) -> bool {
    assert!(f.num_vars <= 24, "too many variables for the brute-force oracle");
    (0u64..(1 << f.num_vars))
        .any(|a| f.clauses.iter().all(|c| clause_satisfied(c, a)))
}

/// Exhaustive ∀∃-CNF truth (≤ 24 variables): for every assignment of the
/// universal prefix there is an extension satisfying all clauses.
pub fn brute_qbf(f: &CnfInstance) -> bool {
    assert!(f.num_vars <= 24, "too many variables for the brute-force oracle");
    let e = f.num_vars - f.n_universal;
    (0u64..(1 << f.n_universal)).all(|u| {
        (0u64..(1 << e)).any(|x| {
            let a = u | (x << f.n_universal);
            f.clauses.iter().all(|c| clause_satisfied(c, a))
        })
    })
}

/// All elementary paths from `from` to `to` (test helper; exponential).
pub fn enumerate_paths(g: &Digraph, from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = vec![from];
    let mut on_path = vec![false; g.n()];
    on_path[from] = true;
    fn rec(
        g: &Digraph,
        to: usize,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *path.last().unwrap();
        if u == to {
            out.push(path.clone());
            return;
        }
        for v in 0..g.n() {
            if g.has(u, v) && !on_path[v] {
                path.push(v);
                on_path[v] = true;
                rec(g, to, path, on_path, out);
                on_path[v] = false;
                path.pop();
            }
        }
    }
    rec(g, to, &mut path, &mut on_path, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbnet::{
        ae_cycles_brute, cographic_prenet, enumerate_linkings, pomset_prove, unique_linking, Mode,
    };
    use crate::Budget;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// The running example {{x,y,z}, {¬x,y}, {¬y,¬z}}.
    fn running() -> CnfInstance {
        CnfInstance::new(
            3,
            vec![
                vec![Lit::pos(0), Lit::pos(1), Lit::pos(2)],
                vec![Lit::neg(0), Lit::pos(1)],
                vec![Lit::neg(1), Lit::neg(2)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn normalize_examples() {
        let f = CnfInstance::new(1, vec![vec![Lit::pos(0)]]).unwrap();
        assert_eq!(normalize_polarities(&f).clauses, Vec::<Vec<Lit>>::new());
        assert_eq!(normalize_polarities(&running()), running());
        let empty = CnfInstance::new(0, vec![]).unwrap();
        assert_eq!(normalize_polarities(&empty), empty);
    }

    #[test]
    fn dimacs_roundtrip() {
        let text = "c a comment\np cnf 3 3\nc forall 1 2\n1 2 3 0\n-1 2 0\n-2 -3 0\n";
        let f = CnfInstance::parse_dimacs(text).unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.n_universal, 2);
        assert_eq!(f.clauses.len(), 3);
        let again = CnfInstance::parse_dimacs(&f.to_string()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn gcl_structure() {
        let (g, s, t) = build_gcl(&running()).unwrap();
        assert_eq!(g.n(), 9); // s + 7 occurrences + t
        // edge families: 3 from s, 3·2 + 2·2 between layers, 2 into t
        assert_eq!(g.edge_count(), 3 + 6 + 4 + 2);
        assert!(is_acyclic(&g));
        assert!((0..g.n()).all(|u| !g.has(u, s) && !g.has(t, u)));
        // one path per way of picking a literal in each clause
        assert_eq!(enumerate_paths(&g, s, t).len(), 3 * 2 * 2);
        // two-clause sanity case
        let f2 =
            CnfInstance::new(1, vec![vec![Lit::pos(0)], vec![Lit::neg(0)]]).unwrap();
        let (g2, s2, t2) = build_gcl(&f2).unwrap();
        assert_eq!(enumerate_paths(&g2, s2, t2).len(), 1);
        assert!(build_gcl(&CnfInstance::new(0, vec![]).unwrap()).is_err());
    }

    #[test]
    fn gvar_structure() {
        let f = running();
        let (g, t, s) = build_gvar(&f).unwrap();
        assert!(is_acyclic(&g));
        assert!((0..g.n()).all(|u| !g.has(u, t) && !g.has(s, u)));
        let paths = enumerate_paths(&g, t, s);
        assert_eq!(paths.len(), 1 << 3);
        // x = false, y = false, z = true visits the occurrences of the
        // false literals x, y, ¬z
        let occ = occurrences(&f);
        let want: Vec<usize> = occ
            .iter()
            .enumerate()
            .filter(|(_, &(_, l))| {
                l == Lit::pos(0) || l == Lit::pos(1) || l == Lit::neg(2)
            })
            .map(|(k, _)| k + 1)
            .collect();
        assert!(paths.iter().any(|p| p[1..p.len() - 1] == want[..]));
        // every path = one polarity chain per variable
        for p in &paths {
            let mut false_lits = BTreeSet::new();
            for &v in &p[1..p.len() - 1] {
                false_lits.insert(occ[v - 1].1);
            }
            let vars: BTreeSet<usize> = false_lits.iter().map(|l| l.var).collect();
            assert_eq!(vars.len(), false_lits.len(), "two polarities of one variable");
            assert_eq!(vars.len(), 3);
        }
    }

    #[test]
    fn superposition_figure() {
        // V = {s, u, v, w, t} = {0, 1, 2, 3, 4}
        let (s, u, v, w, t) = (0, 1, 2, 3, 4);
        let mut g1 = Digraph::new(5);
        g1.add_edge(s, u);
        g1.add_edge(u, v);
        g1.add_edge(v, t);
        g1.add_edge(u, w);
        let mut g2 = Digraph::new(5);
        g2.add_edge(t, w);
        g2.add_edge(w, s);
        let h = superpose(&g1, &g2, s, t).unwrap();
        assert_eq!(h.n(), 10);
        // the path pair (s→u→v→t, t→w→s) yields an æ-cycle; the
        // short-circuit via u and w yields none, so every æ-cycle here
        // visits v⁺
        let cycles = ae_cycles_brute(&h);
        assert!(!cycles.is_empty());
        let v_plus = sup_index(SupVertex::Plus(v), s, t);
        assert!(cycles.iter().all(|c| c.0.contains(&v_plus)));
        // no s→t path in g1 at all: no cycles
        let mut g1b = Digraph::new(5);
        g1b.add_edge(s, u);
        g1b.add_edge(u, w);
        let h2 = superpose(&g1b, &g2, s, t).unwrap();
        assert!(ae_cycles_brute(&h2).is_empty());
    }

    #[test]
    fn superposition_requires_disjoint_paths() {
        // paths sharing an intermediate vertex only: no æ-cycle
        let (s, u, t) = (0, 1, 2);
        let mut g1 = Digraph::new(3);
        g1.add_edge(s, u);
        g1.add_edge(u, t);
        let mut g2 = Digraph::new(3);
        g2.add_edge(t, u);
        g2.add_edge(u, s);
        let h = superpose(&g1, &g2, s, t).unwrap();
        assert!(ae_cycles_brute(&h).is_empty());
    }

    #[test]
    fn superposition_rejects_bad_inputs() {
        let mut g1 = Digraph::new(3);
        g1.add_edge(1, 0); // enters s
        let g2 = Digraph::new(3);
        assert!(superpose(&g1, &g2, 0, 2).is_err());
        let mut g3 = Digraph::new(4);
        g3.add_edge(1, 2);
        g3.add_edge(2, 1); // cyclic
        assert!(superpose(&g3, &Digraph::new(4), 0, 3).is_err());
    }

    #[test]
    fn sat_pipeline_matches_brute_force() {
        // the running example is satisfiable: æ-cycle present
        let h = sat_to_rb(&running()).unwrap();
        assert!(h.find_ae_cycle(&mut Budget::unlimited()).unwrap().is_some());
        // {{x}, {¬x}} is unsatisfiable: no æ-cycle
        let f =
            CnfInstance::new(1, vec![vec![Lit::pos(0)], vec![Lit::neg(0)]]).unwrap();
        let h = sat_to_rb(&f).unwrap();
        assert!(h.find_ae_cycle(&mut Budget::unlimited()).unwrap().is_none());
    }

    #[test]
    fn sat_pipeline_random() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        let mut tested = 0;
        while tested < 100 {
            let nv = rng.gen_range(1..=4);
            let nc = rng.gen_range(1..=5);
            let clauses: Vec<Vec<Lit>> = (0..nc)
                .map(|_| {
                    let w = rng.gen_range(1..=3);
                    (0..w)
                        .map(|_| Lit { var: rng.gen_range(0..nv), neg: rng.gen() })
                        .collect()
                })
                .collect();
            let Ok(f) = CnfInstance::new(nv, clauses) else { continue };
            let f = normalize_polarities(&f);
            if f.clauses.is_empty() {
                continue;
            }
            let h = sat_to_rb(&f).unwrap();
            let cycle = h.find_ae_cycle(&mut Budget::unlimited()).unwrap().is_some();
            assert_eq!(cycle, brute_sat(&f), "mismatch on {f}");
            tested += 1;
        }
    }

    #[test]
    fn proofification_figure() {
        // w=0 ↔ x=1 (T); y=2 → x and y → z=3 (S); matching {w,y}, {x,z}
        let mut r = Digraph::new(4);
        r.add_biedge(0, 1);
        r.add_edge(2, 1);
        r.add_edge(2, 3);
        let g = RBDigraph::new(r, &[(0, 2), (1, 3)]).unwrap();
        let s = proofification(&g);
        assert_eq!(
            s.to_string(),
            "[(a0_1 * [a2_1 | a2_3]) | ([a0_1' | a1_2] * a3_2) | {<a2_1' ; a1_2'>} | {<a2_3' ; a3_2'>}]"
        );
        assert!(s.is_balanced());
        assert!(s.is_flat());
    }

    #[test]
    fn proofification_degenerate() {
        // a single matching edge with no R-edges: units in the tensor
        let g = RBDigraph::new(Digraph::new(2), &[(0, 1)]).unwrap();
        let s = proofification(&g);
        assert_eq!(s.to_string(), "(I * I)");
    }

    #[test]
    fn proofification_equivalence_random() {
        let mut rng = StdRng::seed_from_u64(0xbead);
        for _ in 0..200 {
            let half = rng.gen_range(1..=4);
            let n = 2 * half;
            let mut r = Digraph::new(n);
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.3) {
                        r.add_edge(u, v);
                    }
                }
            }
            let pairs: Vec<(usize, usize)> = (0..half).map(|i| (2 * i, 2 * i + 1)).collect();
            let g = RBDigraph::new(r, &pairs).unwrap();
            let s = proofification(&g);
            assert!(s.is_balanced());
            let l = unique_linking(&s).unwrap();
            let net = cographic_prenet(&s, &l);
            let has_cycle = g.find_ae_cycle(&mut Budget::unlimited()).unwrap().is_some();
            let incorrect =
                net.find_chordless_ae_cycle(&mut Budget::unlimited()).unwrap().is_some();
            assert_eq!(has_cycle, incorrect, "proofification mismatch");
        }
    }

    fn forall_running() -> CnfInstance {
        // ∀x∀y∃z {{x,y,z}, {¬x,y}, {¬y,¬z}}
        let mut f = running();
        f.n_universal = 2;
        f
    }

    #[test]
    fn paired_gvar_structure() {
        let f = forall_running();
        let (_, t, _, pairs) = paired_gvar(&f).unwrap();
        // 2m − 1 pairs for m universal variables
        assert_eq!(pairs.len(), 3);
        assert!(pairs[0][0].0 == t && pairs[0][1].0 == t);
        let g = qbf_to_paired_rb(&f).unwrap();
        // 2^{2m−1} switchings
        assert_eq!(g.switchings().len(), 8);
        // no universal prefix: no pairs
        let g0 = qbf_to_paired_rb(&running()).unwrap();
        assert!(g0.pairs.is_empty());
    }

    #[test]
    fn linkings_match_switchings() {
        let f = forall_running();
        let g = qbf_to_paired_rb(&f).unwrap();
        let s = paired_proofification(&g);
        assert_eq!(enumerate_linkings(&s).len(), 1 << g.pairs.len());
    }

    #[test]
    fn paired_proofification_figure() {
        // the 4-vertex figure with p = {(y,x), (y,z)}
        let mut r = Digraph::new(4);
        r.add_biedge(0, 1);
        r.add_edge(2, 1);
        r.add_edge(2, 3);
        let rb = RBDigraph::new(r, &[(0, 2), (1, 3)]).unwrap();
        let g = PairedRBDigraph::new(rb, vec![[(2, 1), (2, 3)]]).unwrap();
        let s = paired_proofification(&g);
        assert_eq!(
            s.to_string(),
            "[(a0_1 * a2_p0) | ([a0_1' | b0] * b0) | {[<a2_p0' ; b0'> | b0']}]"
        );
    }

    #[test]
    fn paired_proofification_empty_pairing_is_proofification() {
        let mut r = Digraph::new(4);
        r.add_biedge(0, 1);
        r.add_edge(2, 3);
        let rb = RBDigraph::new(r, &[(0, 2), (1, 3)]).unwrap();
        let g = PairedRBDigraph::new(rb.clone(), vec![]).unwrap();
        assert_eq!(paired_proofification(&g).to_string(), proofification(&rb).to_string());
    }

    #[test]
    fn three_path_split_preserves_cycles() {
        // pair with an opposite edge present: the split keeps æ-cycle
        // existence per switching
        let mut r = Digraph::new(4);
        r.add_edge(2, 1);
        r.add_edge(2, 3);
        r.add_edge(1, 2); // opposite of a paired edge
        r.add_biedge(0, 3);
        let rb = RBDigraph::new(r, &[(0, 2), (1, 3)]).unwrap();
        let g = PairedRBDigraph::new(rb, vec![[(2, 1), (2, 3)]]).unwrap();
        let split = split_opposites(&g);
        assert_eq!(split.rb.n(), 6);
        assert!(!split.rb.r.has(1, 2));
        for (a, b) in g.switchings().iter().zip(split.switchings().iter()) {
            assert_eq!(
                a.find_ae_cycle(&mut Budget::unlimited()).unwrap().is_some(),
                b.find_ae_cycle(&mut Budget::unlimited()).unwrap().is_some()
            );
        }
    }

    #[test]
    fn qbf_oracle_examples() {
        // ∀x∀y∃z running example is false (x = true, y = false kills it)
        assert!(!brute_qbf(&forall_running()));
        // plain SAT reading is satisfiable
        assert!(brute_sat(&running()));
        assert!(brute_qbf(&running()));
        // empty CNF is true
        assert!(brute_sat(&CnfInstance::new(0, vec![]).unwrap()));
        // ∀x∃z {{x,z}, {¬x,¬z}} is true
        let f = CnfInstance::with_prefix(
            2,
            1,
            vec![vec![Lit::pos(0), Lit::pos(1)], vec![Lit::neg(0), Lit::neg(1)]],
        )
        .unwrap();
        assert!(brute_qbf(&f));
    }

    #[test]
    fn qbf_pipeline_tiny_positive_instance() {
        // positive ∀∃ instance ⟺ the reduced sequent is pomset-unprovable
        let f = CnfInstance::with_prefix(
            2,
            1,
            vec![vec![Lit::pos(0), Lit::pos(1)], vec![Lit::neg(0), Lit::neg(1)]],
        )
        .unwrap();
        assert!(brute_qbf(&f));
        let s = qbf_to_sequent(&f).unwrap();
        let provable =
            pomset_prove(&s, Mode::Cographic, &mut Budget::unlimited()).unwrap().is_some();
        assert!(!provable);
    }

    #[test]
    fn qbf_pipeline_exhaustive_small() {
        // all ∀∃ templates with 1 universal + 1 existential variable over
        // clause sets drawn from the four two-literal clauses
        let all_clauses: Vec<Vec<Lit>> = vec![
            vec![Lit::pos(0), Lit::pos(1)],
            vec![Lit::pos(0), Lit::neg(1)],
            vec![Lit::neg(0), Lit::pos(1)],
            vec![Lit::neg(0), Lit::neg(1)],
        ];
        let mut tested = 0;
        for mask in 1u32..16 {
            let clauses: Vec<Vec<Lit>> = (0..4)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| all_clauses[i as usize].clone())
                .collect();
            let f = CnfInstance::with_prefix(2, 1, clauses).unwrap();
            if !f.is_normalized() {
                continue;
            }
            let s = qbf_to_sequent(&f).unwrap();
            let provable =
                pomset_prove(&s, Mode::Cographic, &mut Budget::unlimited()).unwrap().is_some();
            assert_eq!(brute_qbf(&f), !provable, "mismatch on {f}");
            tested += 1;
        }
        assert!(tested >= 3);
    }

    #[test]
    fn sat_sequent_matches_brute() {
        for (f, expect_sat) in [
            (running(), true),
            (
                CnfInstance::new(1, vec![vec![Lit::pos(0)], vec![Lit::neg(0)]]).unwrap(),
                false,
            ),
        ] {
            assert_eq!(brute_sat(&f), expect_sat);
            let s = sat_to_sequent(&f).unwrap();
            let provable =
                pomset_prove(&s, Mode::Cographic, &mut Budget::unlimited()).unwrap().is_some();
            assert_eq!(expect_sat, !provable);
        }
    }
}

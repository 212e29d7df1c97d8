//! Directed graphs, the relational semantics of formulas and sequents
//! (`tograph`), dicograph recognition with violation witnesses, and the
//! inverse decomposition from dicographs back to formulas.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::json;

use crate::formula::{Atom, Formula, Sequent};

/// A finite directed graph on vertices `0..n` (no self-loops).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
}

/// Relation between an (unordered) vertex pair in a digraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    /// Both directions (tensor-like).
    T,
    /// Forward only: u → v.
    S,
    /// Backward only: v → u.
    Z,
    /// No edge (par-like).
    P,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { n, adj: vec![false; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        self.adj[u * self.n + v] = true;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = false;
    }

    pub fn add_biedge(&mut self, u: usize, v: usize) {
        self.add_edge(u, v);
        self.add_edge(v, u);
    }

    pub fn has(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u * self.n + v]
    }

    /// Directed edges as ordered pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if self.has(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count()
    }

    /// Relation between u and v, read in the direction u → v.
    pub fn rel(&self, u: usize, v: usize) -> Rel {
        match (self.has(u, v), self.has(v, u)) {
            (true, true) => Rel::T,
            (true, false) => Rel::S,
            (false, true) => Rel::Z,
            (false, false) => Rel::P,
        }
    }

    /// Induced subgraph on the given vertices (in the given order).
    pub fn induced(&self, verts: &[usize]) -> Digraph {
        let mut g = Digraph::new(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate() {
                if i != j && self.has(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Is the edge relation irreflexive and transitive (a strict order)?
    pub fn is_strict_order(&self) -> bool {
        for u in 0..self.n {
            if self.adj[u * self.n + u] {
                return false;
            }
            for v in 0..self.n {
                for w in 0..self.n {
                    if self.has(u, v) && self.has(v, w) && u != w && !self.has(u, w) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A digraph whose vertices are labeled by atoms, as produced by `tograph`.
/// Vertex `i` is the `i`-th atom occurrence of the source formula/sequent in
/// left-to-right order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDigraph {
    pub graph: Digraph,
    pub labels: Vec<Atom>,
}

impl LabeledDigraph {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": self.labels.iter().enumerate()
                .map(|(i, a)| json!({"id": i, "label": a.to_string()}))
                .collect::<Vec<_>>(),
            "edges": self.graph.edges().iter()
                .map(|&(u, v)| json!([u, v]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph g {\n");
        for (i, a) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{a}\"];");
        }
        let mut done = vec![false; self.n() * self.n()];
        for (u, v) in self.graph.edges() {
            if done[u * self.n() + v] {
                continue;
            }
            if self.graph.has(v, u) {
                done[v * self.n() + u] = true;
                let _ = writeln!(s, "  v{u} -> v{v} [dir=both];");
            } else {
                let _ = writeln!(s, "  v{u} -> v{v};");
            }
        }
        s.push_str("}\n");
        s
    }
}

fn tograph_into(f: &Formula, g: &mut Digraph, labels: &[Atom], next: &mut usize) -> Vec<usize> {
    match f {
        Formula::Unit => Vec::new(),
        Formula::Atom { .. } => {
            let v = *next;
            *next += 1;
            vec![v]
        }
        Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
            let parts: Vec<Vec<usize>> =
                cs.iter().map(|c| tograph_into(c, g, labels, next)).collect();
            connect_parts(f_kind(f), &parts, g);
            parts.into_iter().flatten().collect()
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Par,
    Tensor,
    Seq,
}

fn f_kind(f: &Formula) -> Kind {
    match f {
        Formula::Par(_) => Kind::Par,
        Formula::Tensor(_) => Kind::Tensor,
        Formula::Seq(_) => Kind::Seq,
        _ => unreachable!(),
    }
}

fn connect_parts(kind: Kind, parts: &[Vec<usize>], g: &mut Digraph) {
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            for &u in &parts[i] {
                for &v in &parts[j] {
                    match kind {
                        Kind::Par => {}
                        Kind::Tensor => g.add_biedge(u, v),
                        Kind::Seq => g.add_edge(u, v),
                    }
                }
            }
        }
    }
}

/// The relational semantics of a formula: one vertex per atom occurrence,
/// tensor = edges both ways, seq = left-to-right edges, par = no edges.
/// Two formulas are structurally congruent iff their graphs are isomorphic
/// as labeled digraphs.
pub fn tograph(f: &Formula) -> LabeledDigraph {
    let labels = f.atoms();
    let mut g = Digraph::new(labels.len());
    let mut next = 0;
    tograph_into(f, &mut g, &labels, &mut next);
    LabeledDigraph { graph: g, labels }
}

/// The relational semantics of a sequent (par/seq sequent structure behaves
/// exactly like the corresponding connectives).
pub fn tograph_sequent(s: &Sequent) -> LabeledDigraph {
    tograph(&s.to_formula())
}

/// Why a digraph fails to be a dicograph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DicographViolation {
    /// Four vertices inducing a path in the bidirectional-edge graph.
    P4([usize; 4]),
    /// Four vertices a,b,c,d inducing exactly a→b, c→b, c→d in the
    /// single-direction graph.
    N([usize; 4]),
    /// u,v,w with a one-directional edge composed with an edge but no
    /// composite edge.
    WeakTransitivity(usize, usize, usize),
}

/// Check the dicograph characterization: the bidirectional part is P4-free,
/// the one-directional part is N-free, and the edge relation is weakly
/// transitive. Returns the first violation found, if any.
pub fn dicograph_violation(g: &Digraph) -> Option<DicographViolation> {
    let n = g.n();
    let t = |u: usize, v: usize| g.has(u, v) && g.has(v, u);
    let s = |u: usize, v: usize| g.has(u, v) && !g.has(v, u);

    // Weak transitivity: S;E ⊆ E and E;S ⊆ E.
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            for w in 0..n {
                if w == u || w == v {
                    continue;
                }
                if s(u, v) && g.has(v, w) && !g.has(u, w) {
                    return Some(DicographViolation::WeakTransitivity(u, v, w));
                }
                if g.has(u, v) && s(v, w) && !g.has(u, w) {
                    return Some(DicographViolation::WeakTransitivity(u, v, w));
                }
            }
        }
    }

    // P4 in (V, T): an induced path w-x-y-z in the undirected T graph.
    let mut quad = [0usize; 4];
    let mut verts: Vec<usize> = (0..n).collect();
    for c in combinations(&mut verts, 4) {
        quad.copy_from_slice(&c);
        if let Some(p4) = find_p4(&quad, &t) {
            return Some(DicographViolation::P4(p4));
        }
        if let Some(nw) = find_n(&quad, &s) {
            return Some(DicographViolation::N(nw));
        }
    }
    None
}

fn combinations(verts: &mut Vec<usize>, k: usize) -> Vec<Vec<usize>> {
    let n = verts.len();
    let mut out = Vec::new();
    if n < k {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| verts[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn find_p4(quad: &[usize; 4], t: &impl Fn(usize, usize) -> bool) -> Option<[usize; 4]> {
    // Try all orderings as a path w-x-y-z: edges wx, xy, yz present,
    // wy, wz, xz absent.
    for perm in permutations4() {
        let [w, x, y, z] = [quad[perm[0]], quad[perm[1]], quad[perm[2]], quad[perm[3]]];
        if t(w, x) && t(x, y) && t(y, z) && !t(w, y) && !t(w, z) && !t(x, z) {
            return Some([w, x, y, z]);
        }
    }
    None
}

fn find_n(quad: &[usize; 4], s: &impl Fn(usize, usize) -> bool) -> Option<[usize; 4]> {
    // a→b, c→b, c→d and no other S-arc among {a,b,c,d}.
    for perm in permutations4() {
        let [a, b, c, d] = [quad[perm[0]], quad[perm[1]], quad[perm[2]], quad[perm[3]]];
        let want = [(a, b), (c, b), (c, d)];
        let verts = [a, b, c, d];
        let mut ok = true;
        for &u in &verts {
            for &v in &verts {
                if u == v {
                    continue;
                }
                let expected = want.contains(&(u, v));
                if s(u, v) != expected {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            return Some([a, b, c, d]);
        }
    }
    None
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let d = 6 - a - b - c;
                out.push([a, b, c, d]);
            }
        }
    }
    out
}

pub fn is_dicograph(g: &Digraph) -> bool {
    dicograph_violation(g).is_none()
}

/// An sp-order is a dicograph with no bidirectional edges; equivalently, an
/// N-free strict order.
pub fn is_sp_order(g: &Digraph) -> bool {
    for u in 0..g.n() {
        for v in (u + 1)..g.n() {
            if g.rel(u, v) == Rel::T {
                return false;
            }
        }
    }
    g.is_strict_order() && is_dicograph(g)
}

/// Weakly connected components under an arbitrary symmetric "linked"
/// predicate, returned with vertices named in the input numbering.
fn components(n: usize, linked: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut members = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if comp[v] == usize::MAX && (linked(u, v) || linked(v, u)) {
                    comp[v] = id;
                    stack.push(v);
                    members.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Reconstruct a formula from a labeled dicograph, so that
/// `graph_to_formula(tograph(A)) ≡ A`. Returns `None` if the graph is not a
/// dicograph (the modular decomposition gets stuck).
pub fn graph_to_formula(g: &LabeledDigraph) -> Option<Formula> {
    let verts: Vec<usize> = (0..g.n()).collect();
    let f = decompose(&g.graph, &g.labels, &verts)?;
    Some(f.canonicalize())
}

fn decompose(g: &Digraph, labels: &[Atom], verts: &[usize]) -> Option<Formula> {
    match verts.len() {
        0 => return Some(Formula::Unit),
        1 => {
            return Some(Formula::Atom { atom: labels[verts[0]].clone(), tag: 0 });
        }
        _ => {}
    }
    let h = g.induced(verts);
    let m = verts.len();

    // Par split: weak components of the whole edge relation.
    let pcomps = components(m, |u, v| h.has(u, v));
    if pcomps.len() > 1 {
        let kids = pcomps
            .iter()
            .map(|c| decompose(g, labels, &to_global(c, verts)))
            .collect::<Option<Vec<_>>>()?;
        return Some(Formula::Par(kids));
    }

    // Tensor split: components of the "not bidirectional" relation.
    let tcomps = components(m, |u, v| h.rel(u, v) != Rel::T);
    if tcomps.len() > 1 {
        let kids = tcomps
            .iter()
            .map(|c| decompose(g, labels, &to_global(c, verts)))
            .collect::<Option<Vec<_>>>()?;
        return Some(Formula::Tensor(kids));
    }

    // Seq split: components of the "not one-directional" relation, ordered
    // by the uniform direction of the cross arcs.
    let scomps = components(m, |u, v| !matches!(h.rel(u, v), Rel::S | Rel::Z));
    if scomps.len() > 1 {
        let k = scomps.len();
        // comp i must precede comp j iff every arc goes i → j
        let before = |i: usize, j: usize| -> Option<bool> {
            let mut fwd = true;
            let mut bwd = true;
            for &u in &scomps[i] {
                for &v in &scomps[j] {
                    match h.rel(u, v) {
                        Rel::S => bwd = false,
                        Rel::Z => fwd = false,
                        _ => return None,
                    }
                }
            }
            match (fwd, bwd) {
                (true, false) => Some(true),
                (false, true) => Some(false),
                _ => None,
            }
        };
        // Total order by counting predecessors.
        let mut order: Vec<(usize, usize)> = Vec::new(); // (pred count, comp)
        for i in 0..k {
            let mut preds = 0;
            for j in 0..k {
                if i != j {
                    match before(j, i) {
                        Some(true) => preds += 1,
                        Some(false) => {}
                        None => return None,
                    }
                }
            }
            order.push((preds, i));
        }
        order.sort_unstable();
        if order.iter().enumerate().any(|(rank, &(p, _))| p != rank) {
            return None;
        }
        let kids = order
            .iter()
            .map(|&(_, i)| decompose(g, labels, &to_global(&scomps[i], verts)))
            .collect::<Option<Vec<_>>>()?;
        return Some(Formula::Seq(kids));
    }

    None
}

fn to_global(local: &[usize], verts: &[usize]) -> Vec<usize> {
    local.iter().map(|&i| verts[i]).collect()
}

/// For linear formulas over the same element set: is the edge set of
/// `a`'s graph a superset of `b`'s? Returns `None` if the formulas are not
/// linear or their element sets differ.
pub fn edge_inclusion(a: &Formula, b: &Formula) -> Option<bool> {
    let ga = tograph(a);
    let gb = tograph(b);
    let map_of = |g: &LabeledDigraph| -> Option<HashMap<Atom, usize>> {
        let mut m = HashMap::new();
        for (i, l) in g.labels.iter().enumerate() {
            if m.insert(l.clone(), i).is_some() {
                return None;
            }
        }
        Some(m)
    };
    let ma = map_of(&ga)?;
    let mb = map_of(&gb)?;
    if ma.len() != mb.len() || !mb.keys().all(|k| ma.contains_key(k)) {
        return None;
    }
    for (u, v) in gb.graph.edges() {
        let (lu, lv) = (&gb.labels[u], &gb.labels[v]);
        if !ga.graph.has(ma[lu], ma[lv]) {
            return Some(false);
        }
    }
    Some(true)
}

/// Label-preserving digraph isomorphism (backtracking; intended for the
/// small graphs arising here).
pub fn graph_iso(a: &LabeledDigraph, b: &LabeledDigraph) -> bool {
    if a.n() != b.n() {
        return false;
    }
    let n = a.n();
    // Candidate targets per vertex: same label, same degree profile.
    let deg = |g: &LabeledDigraph, v: usize| -> (usize, usize) {
        let out_deg = (0..n).filter(|&w| g.graph.has(v, w)).count();
        let in_deg = (0..n).filter(|&w| g.graph.has(w, v)).count();
        (out_deg, in_deg)
    };
    let mut cands: Vec<Vec<usize>> = Vec::with_capacity(n);
    for u in 0..n {
        let c: Vec<usize> = (0..n)
            .filter(|&v| b.labels[v] == a.labels[u] && deg(b, v) == deg(a, u))
            .collect();
        if c.is_empty() {
            return false;
        }
        cands.push(c);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        u: usize,
        n: usize,
        a: &LabeledDigraph,
        b: &LabeledDigraph,
        cands: &[Vec<usize>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if u == n {
            return true;
        }
        'next: for &v in &cands[u] {
            if used[v] {
                continue;
            }
            for w in 0..u {
                if a.graph.has(u, w) != b.graph.has(v, map[w])
                    || a.graph.has(w, u) != b.graph.has(map[w], v)
                {
                    continue 'next;
                }
            }
            map[u] = v;
            used[v] = true;
            if rec(u + 1, n, a, b, cands, map, used) {
                return true;
            }
            used[v] = false;
            map[u] = usize::MAX;
        }
        false
    }
    rec(0, n, a, b, &cands, &mut map, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, parse_sequent};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn tograph_seq_par() {
        let g = tograph(&f("[<a;b> | <c;d>]"));
        assert_eq!(g.n(), 4);
        let mut edges = g.graph.edges();
        edges.sort_unstable();
        // vertex order follows atom order in canonical form: a,b,c,d
        assert_eq!(edges, vec![(0, 1), (2, 3)]);
        assert_eq!(g.labels[0], Atom::pos("a"));
    }

    #[test]
    fn tograph_tensor() {
        let g = tograph(&f("(a * <b;c>)"));
        assert_eq!(g.graph.rel(0, 1), Rel::T);
        assert_eq!(g.graph.rel(0, 2), Rel::T);
        assert_eq!(g.graph.rel(1, 2), Rel::S);
        assert_eq!(g.graph.edge_count(), 5);
    }

    #[test]
    fn congruence_iff_iso() {
        // ≡-equal formulas have isomorphic graphs
        let a = parse_formula("[<a;b>|c]").unwrap();
        let b = parse_formula("[c|<a;<I;b>>]").unwrap();
        assert_eq!(a, b);
        assert!(graph_iso(&tograph(&a), &tograph(&b)));
        // seq is order sensitive
        assert!(!graph_iso(&tograph(&f("<a;b>")), &tograph(&f("<b;a>"))));
        // tensor vs par differ
        assert!(!graph_iso(&tograph(&f("(a*b)")), &tograph(&f("[a|b]"))));
        // labels matter
        assert!(!graph_iso(&tograph(&f("[a|b]")), &tograph(&f("[a|c]"))));
        // non-trivial automorphism case
        assert!(graph_iso(&tograph(&f("[(a*b)|(a*b)]")), &tograph(&f("[(b*a)|(a*b)]"))));
    }

    #[test]
    fn dicograph_rejects_p4() {
        // undirected path on 4 vertices, all edges bidirectional
        let mut g = Digraph::new(4);
        g.add_biedge(0, 1);
        g.add_biedge(1, 2);
        g.add_biedge(2, 3);
        match dicograph_violation(&g) {
            Some(DicographViolation::P4(_)) => {}
            other => panic!("expected P4, got {other:?}"),
        }
    }

    #[test]
    fn dicograph_rejects_n() {
        // a→b, c→b, c→d: the N shape (it is a strict order, hence weakly
        // transitive, so only the N check can catch it)
        let mut g = Digraph::new(4);
        g.add_edge(0, 1);
        g.add_edge(2, 1);
        g.add_edge(2, 3);
        match dicograph_violation(&g) {
            Some(DicographViolation::N(_)) => {}
            other => panic!("expected N, got {other:?}"),
        }
        assert!(!is_sp_order(&g));
    }

    #[test]
    fn dicograph_rejects_weak_transitivity() {
        // 0→1 (S) and 1→2 (S) but no 0→2
        let mut g = Digraph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        match dicograph_violation(&g) {
            Some(DicographViolation::WeakTransitivity(0, 1, 2)) => {}
            other => panic!("expected weak transitivity violation, got {other:?}"),
        }
    }

    #[test]
    fn formula_graphs_are_dicographs() {
        for s in [
            "[<a;b> | <c;d>]",
            "(a * <b;c> * [d|e])",
            "<[a|b] ; (c*d) ; e>",
            "[(<a;b> * <c;d>) | <a';b'>]",
        ] {
            let g = tograph(&f(s));
            assert!(is_dicograph(&g.graph), "{s}");
        }
    }

    #[test]
    fn sp_order_iff_tensor_free() {
        assert!(is_sp_order(&tograph(&f("[<a;b;c> | <d;e>]")).graph));
        assert!(!is_sp_order(&tograph(&f("[(a*b) | c]")).graph));
    }

    #[test]
    fn graph_to_formula_roundtrip() {
        for s in [
            "a",
            "I",
            "[a | b']",
            "(a * b)",
            "<a ; b>",
            "[<a;b> | <c;d>]",
            "(a * <b;c> * [d|e])",
            "<[a|b] ; (c*d) ; e>",
            "[(<a;b> * <c;d>) | (<e;f> * <g;h>) | <a';h'> | <e';b'> | <g';d'> | <c';f'>]",
            "[a | a | <a;a>]",
        ] {
            let a = f(s);
            let back = graph_to_formula(&tograph(&a)).unwrap_or_else(|| panic!("stuck on {s}"));
            assert_eq!(back, a, "roundtrip failed on {s}");
        }
    }

    #[test]
    fn graph_to_formula_rejects_non_dicograph() {
        let mut g = Digraph::new(4);
        g.add_biedge(0, 1);
        g.add_biedge(1, 2);
        g.add_biedge(2, 3);
        let lg = LabeledDigraph {
            graph: g,
            labels: vec![Atom::pos("a"), Atom::pos("b"), Atom::pos("c"), Atom::pos("d")],
        };
        assert_eq!(graph_to_formula(&lg), None);
    }

    #[test]
    fn edge_inclusion_examples() {
        assert_eq!(edge_inclusion(&f("<a;b;c>"), &f("[a|<b;c>]")), Some(true));
        assert_eq!(edge_inclusion(&f("[a|<b;c>]"), &f("<a;b;c>")), Some(false));
        assert_eq!(edge_inclusion(&f("(a*b)"), &f("<a;b>")), Some(true));
        assert_eq!(edge_inclusion(&f("<a;b>"), &f("<b;a>")), Some(false));
        // different element sets
        assert_eq!(edge_inclusion(&f("<a;b>"), &f("<a;c>")), None);
        // non-linear
        assert_eq!(edge_inclusion(&f("[a|a]"), &f("[a|a]")), None);
    }

    #[test]
    fn sequent_graph_matches_formula_graph() {
        let g = parse_sequent("[{<a;b>} | {<a';b'>}]").unwrap();
        let a = f("[<a;b> | <a';b'>]");
        assert!(graph_iso(&tograph_sequent(&g), &tograph(&a)));
    }

    #[test]
    fn json_and_dot_export() {
        let g = tograph(&f("(a * b')"));
        let j = g.to_json();
        assert_eq!(j["vertices"][1]["label"], "b'");
        assert_eq!(j["edges"].as_array().unwrap().len(), 2);
        let dot = g.to_dot();
        assert!(dot.contains("dir=both"));
    }
}

//! Formula and sequent syntax, canonical forms modulo the structural
//! congruences, duality, unfolding, and related structural utilities.
//!
//! Formulas are built from atoms (a variable with a polarity), the unit `I`,
//! and three connectives: tensor `(A * B)`, par `[A | B]`, and the
//! non-commutative self-dual seq `<A ; B>`. Internally connectives are n-ary
//! (associativity is flattened away) and par/tensor children are kept sorted
//! (commutativity is normalized away), so equality of canonical forms is
//! exactly the structural congruence.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// A propositional variable together with a polarity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub var: String,
    pub neg: bool,
}

impl Atom {
    pub fn pos(var: impl Into<String>) -> Self {
        Atom { var: var.into(), neg: false }
    }

    pub fn negf(var: impl Into<String>) -> Self {
        Atom { var: var.into(), neg: true }
    }

    /// The dual atom: a fixed-point-free involution.
    pub fn dual(&self) -> Atom {
        Atom { var: self.var.clone(), neg: !self.neg }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.var, if self.neg { "'" } else { "" })
    }
}

/// A generalized formula. `Par`/`Tensor`/`Seq` children may be any number
/// of formulas; in canonical form they are ≥ 2, never of the same kind as
/// the parent, never `Unit`, and par/tensor children are sorted.
///
/// The `tag` on atoms is invisible to equality, ordering and hashing; it is
/// used by the prover to track atom occurrences through rewriting.
#[derive(Clone, Debug)]
pub enum Formula {
    Unit,
    Atom { atom: Atom, tag: u32 },
    Par(Vec<Formula>),
    Tensor(Vec<Formula>),
    Seq(Vec<Formula>),
}

pub fn atom(var: impl Into<String>) -> Formula {
    Formula::Atom { atom: Atom::pos(var), tag: 0 }
}

pub fn natom(var: impl Into<String>) -> Formula {
    Formula::Atom { atom: Atom::negf(var), tag: 0 }
}

pub fn par(children: Vec<Formula>) -> Formula {
    Formula::Par(children)
}

pub fn tensor(children: Vec<Formula>) -> Formula {
    Formula::Tensor(children)
}

pub fn seq(children: Vec<Formula>) -> Formula {
    Formula::Seq(children)
}

impl Formula {
    fn kind_rank(&self) -> u8 {
        match self {
            Formula::Unit => 0,
            Formula::Atom { .. } => 1,
            Formula::Par(_) => 2,
            Formula::Tensor(_) => 3,
            Formula::Seq(_) => 4,
        }
    }

    /// Total order ignoring atom tags. Used for canonical child sorting.
    pub fn cmp_structural(&self, other: &Formula) -> Ordering {
        match (self, other) {
            (Formula::Unit, Formula::Unit) => Ordering::Equal,
            (Formula::Atom { atom: a, .. }, Formula::Atom { atom: b, .. }) => a.cmp(b),
            (Formula::Par(a), Formula::Par(b))
            | (Formula::Tensor(a), Formula::Tensor(b))
            | (Formula::Seq(a), Formula::Seq(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    let c = x.cmp_structural(y);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                a.len().cmp(&b.len())
            }
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_structural(other) == Ordering::Equal
    }
}

impl Eq for Formula {}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_structural(other))
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_structural(other)
    }
}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind_rank().hash(state);
        match self {
            Formula::Unit => {}
            Formula::Atom { atom, .. } => atom.hash(state),
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                cs.len().hash(state);
                for c in cs {
                    c.hash(state);
                }
            }
        }
    }
}

impl Formula {
    /// Number of atom occurrences.
    pub fn size(&self) -> usize {
        match self {
            Formula::Unit => 0,
            Formula::Atom { .. } => 1,
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                cs.iter().map(|c| c.size()).sum()
            }
        }
    }

    /// All atom occurrences in left-to-right order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Formula::Unit => {}
            Formula::Atom { atom, .. } => out.push(atom.clone()),
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                for c in cs {
                    c.collect_atoms(out);
                }
            }
        }
    }

    /// Tags of all atom occurrences in left-to-right order.
    pub fn atom_tags(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_tags(&mut out);
        out
    }

    fn collect_tags(&self, out: &mut Vec<u32>) {
        match self {
            Formula::Unit => {}
            Formula::Atom { tag, .. } => out.push(*tag),
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                for c in cs {
                    c.collect_tags(out);
                }
            }
        }
    }

    /// Assign tags 1..=n to the atom occurrences in left-to-right order.
    /// (Tag 0 is reserved for "untagged".)
    pub fn assign_tags(&mut self) {
        let mut next = 1;
        self.assign_tags_from(&mut next);
    }

    fn assign_tags_from(&mut self, next: &mut u32) {
        match self {
            Formula::Unit => {}
            Formula::Atom { tag, .. } => {
                *tag = *next;
                *next += 1;
            }
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                for c in cs {
                    c.assign_tags_from(next);
                }
            }
        }
    }

    /// Canonical form modulo the full structural congruence ≡ (associativity,
    /// commutativity of par/tensor, unit laws). Idempotent; two formulas are
    /// ≡-equal iff their canonical forms are equal.
    pub fn canonicalize(&self) -> Formula {
        self.canon(true)
    }

    /// Canonical form modulo ≡′, the unit-free congruence (no unit laws).
    /// On unit-free formulas this coincides with [`Formula::canonicalize`].
    pub fn canonicalize_prime(&self) -> Formula {
        self.canon(false)
    }

    fn canon(&self, drop_units: bool) -> Formula {
        match self {
            Formula::Unit => Formula::Unit,
            Formula::Atom { .. } => self.clone(),
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                let same_kind: fn(&Formula) -> Option<&Vec<Formula>> = match self {
                    Formula::Par(_) => |f| match f {
                        Formula::Par(cs) => Some(cs),
                        _ => None,
                    },
                    Formula::Tensor(_) => |f| match f {
                        Formula::Tensor(cs) => Some(cs),
                        _ => None,
                    },
                    _ => |f| match f {
                        Formula::Seq(cs) => Some(cs),
                        _ => None,
                    },
                };
                let mut flat = Vec::new();
                for c in cs {
                    let c = c.canon(drop_units);
                    if drop_units && c == Formula::Unit {
                        continue;
                    }
                    match same_kind(&c) {
                        Some(inner) => flat.extend(inner.iter().cloned()),
                        None => flat.push(c),
                    }
                }
                if flat.is_empty() {
                    return Formula::Unit;
                }
                if flat.len() == 1 {
                    return flat.pop().unwrap();
                }
                match self {
                    Formula::Par(_) => {
                        flat.sort_by(|a, b| a.cmp_structural(b));
                        Formula::Par(flat)
                    }
                    Formula::Tensor(_) => {
                        flat.sort_by(|a, b| a.cmp_structural(b));
                        Formula::Tensor(flat)
                    }
                    _ => Formula::Seq(flat),
                }
            }
        }
    }

    /// De Morgan dual. Seq argument order is *not* reversed.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Unit => Formula::Unit,
            Formula::Atom { atom, tag } => Formula::Atom { atom: atom.dual(), tag: *tag },
            Formula::Par(cs) => Formula::Tensor(cs.iter().map(|c| c.negate()).collect()),
            Formula::Tensor(cs) => Formula::Par(cs.iter().map(|c| c.negate()).collect()),
            Formula::Seq(cs) => Formula::Seq(cs.iter().map(|c| c.negate()).collect()),
        }
    }

    /// Conjugate: atoms fixed, argument order of every connective reversed.
    pub fn conjugate(&self) -> Formula {
        match self {
            Formula::Unit | Formula::Atom { .. } => self.clone(),
            Formula::Par(cs) => Formula::Par(cs.iter().rev().map(|c| c.conjugate()).collect()),
            Formula::Tensor(cs) => {
                Formula::Tensor(cs.iter().rev().map(|c| c.conjugate()).collect())
            }
            Formula::Seq(cs) => Formula::Seq(cs.iter().rev().map(|c| c.conjugate()).collect()),
        }
    }

    /// Every element (atom with polarity) occurs at most once.
    pub fn is_linear(&self) -> bool {
        let atoms = self.atoms();
        let mut seen = std::collections::HashSet::new();
        atoms.into_iter().all(|a| seen.insert(a))
    }

    /// Every occurring variable occurs exactly once positively and exactly
    /// once negatively.
    pub fn is_balanced(&self) -> bool {
        let mut counts: HashMap<&str, (u32, u32)> = HashMap::new();
        let atoms = self.atoms();
        for a in &atoms {
            let e = counts.entry(a.var.as_str()).or_default();
            if a.neg {
                e.1 += 1;
            } else {
                e.0 += 1;
            }
        }
        counts.values().all(|&(p, n)| p == 1 && n == 1)
    }

    /// True if the formula contains no `Unit` node.
    pub fn is_unit_free(&self) -> bool {
        match self {
            Formula::Unit => false,
            Formula::Atom { .. } => true,
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                cs.iter().all(|c| c.is_unit_free())
            }
        }
    }

    pub fn contains_tensor(&self) -> bool {
        match self {
            Formula::Unit | Formula::Atom { .. } => false,
            Formula::Tensor(_) => true,
            Formula::Par(cs) | Formula::Seq(cs) => cs.iter().any(|c| c.contains_tensor()),
        }
    }

    /// Subterm at a path of child indices; `None` if the path is invalid.
    pub fn subterm_at(&self, path: &[usize]) -> Option<&Formula> {
        let mut cur = self;
        for &i in path {
            match cur {
                Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                    cur = cs.get(i)?;
                }
                _ => return None,
            }
        }
        Some(cur)
    }

    /// Replace the subterm at `path`, returning the new formula.
    pub fn replace_at(&self, path: &[usize], replacement: Formula) -> Option<Formula> {
        if path.is_empty() {
            return Some(replacement);
        }
        let rebuild = |cs: &Vec<Formula>| -> Option<Vec<Formula>> {
            let i = path[0];
            if i >= cs.len() {
                return None;
            }
            let mut out = cs.clone();
            out[i] = cs[i].replace_at(&path[1..], replacement.clone())?;
            Some(out)
        };
        match self {
            Formula::Par(cs) => Some(Formula::Par(rebuild(cs)?)),
            Formula::Tensor(cs) => Some(Formula::Tensor(rebuild(cs)?)),
            Formula::Seq(cs) => Some(Formula::Seq(rebuild(cs)?)),
            _ => None,
        }
    }

    /// Rename variables to v0, v1, ... in order of first occurrence.
    /// Provability and correctness are invariant under this renaming, so it
    /// is used as a memoization key normalizer.
    pub fn normalize_vars(&self) -> Formula {
        let mut map = HashMap::new();
        self.normalize_vars_inner(&mut map)
    }

    fn normalize_vars_inner(&self, map: &mut HashMap<String, String>) -> Formula {
        match self {
            Formula::Unit => Formula::Unit,
            Formula::Atom { atom, tag } => {
                let n = map.len();
                let var = map.entry(atom.var.clone()).or_insert_with(|| format!("v{n}")).clone();
                Formula::Atom { atom: Atom { var, neg: atom.neg }, tag: *tag }
            }
            Formula::Par(cs) => {
                Formula::Par(cs.iter().map(|c| c.normalize_vars_inner(map)).collect())
            }
            Formula::Tensor(cs) => {
                Formula::Tensor(cs.iter().map(|c| c.normalize_vars_inner(map)).collect())
            }
            Formula::Seq(cs) => {
                Formula::Seq(cs.iter().map(|c| c.normalize_vars_inner(map)).collect())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Unit => write!(f, "I"),
            Formula::Atom { atom, .. } => write!(f, "{atom}"),
            Formula::Par(cs) => {
                write!(f, "[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
            Formula::Tensor(cs) => {
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Formula::Seq(cs) => {
                write!(f, "<")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ; ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ">")
            }
        }
    }
}

/// Result of stripping units: either the formula is ≡-equal to the unit,
/// or we get a unit-free representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitFree {
    Unit,
    Formula(Formula),
}

/// Return a unit-free formula ≡-equivalent to `a`, or signal `a ≡ I`.
pub fn remove_units(a: &Formula) -> UnitFree {
    match a.canonicalize() {
        Formula::Unit => UnitFree::Unit,
        f => UnitFree::Formula(f),
    }
}

/// A sequent: a ⊗-free generalized-formula shape whose leaves are formulas.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sequent {
    Leaf(Formula),
    Par(Vec<Sequent>),
    Seq(Vec<Sequent>),
}

impl Sequent {
    pub fn empty() -> Sequent {
        Sequent::Par(Vec::new())
    }

    /// Flat sequent from a list of formulas.
    pub fn flat(formulas: Vec<Formula>) -> Sequent {
        Sequent::Par(formulas.into_iter().map(Sequent::Leaf).collect())
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Sequent::Leaf(_) => false,
            Sequent::Par(cs) | Sequent::Seq(cs) => cs.is_empty(),
        }
    }

    /// True if the sequent has no `Seq` structure above the formula level.
    pub fn is_flat(&self) -> bool {
        match self {
            Sequent::Leaf(_) => true,
            Sequent::Seq(cs) => cs.is_empty(),
            Sequent::Par(cs) => cs.iter().all(|c| matches!(c, Sequent::Leaf(_))),
        }
    }

    /// The formula leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Sequent::Leaf(f) => out.push(f),
            Sequent::Par(cs) | Sequent::Seq(cs) => {
                for c in cs {
                    c.collect_leaves(out);
                }
            }
        }
    }

    /// Atom occurrences across all leaves, in left-to-right order.
    pub fn atoms(&self) -> Vec<Atom> {
        self.leaves().into_iter().flat_map(|f| f.atoms()).collect()
    }

    pub fn size(&self) -> usize {
        self.leaves().into_iter().map(|f| f.size()).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.to_formula().is_balanced()
    }

    /// Canonical form: leaf formulas canonicalized, same-kind nesting
    /// flattened, unit leaves and empty children dropped, par children sorted.
    pub fn canonicalize(&self) -> Sequent {
        match self {
            Sequent::Leaf(f) => match f.canonicalize() {
                Formula::Unit => Sequent::empty(),
                f => Sequent::Leaf(f),
            },
            Sequent::Par(cs) | Sequent::Seq(cs) => {
                let is_par = matches!(self, Sequent::Par(_));
                let mut flat = Vec::new();
                for c in cs {
                    let c = c.canonicalize();
                    if c.is_empty() {
                        continue;
                    }
                    match (&c, is_par) {
                        (Sequent::Par(inner), true) | (Sequent::Seq(inner), false) => {
                            flat.extend(inner.iter().cloned())
                        }
                        _ => flat.push(c),
                    }
                }
                if flat.len() == 1 {
                    return flat.pop().unwrap();
                }
                if is_par {
                    flat.sort();
                    Sequent::Par(flat)
                } else {
                    Sequent::Seq(flat)
                }
            }
        }
    }

    /// The formula corresponding to this sequent (pars/seqs become the
    /// corresponding connectives).
    pub fn to_formula(&self) -> Formula {
        match self {
            Sequent::Leaf(f) => f.clone(),
            Sequent::Par(cs) => Formula::Par(cs.iter().map(|c| c.to_formula()).collect()),
            Sequent::Seq(cs) => Formula::Seq(cs.iter().map(|c| c.to_formula()).collect()),
        }
    }
}

/// A sequent corresponding to a formula: the maximal ⊗-free outer structure
/// becomes sequent structure, the rest becomes formula leaves.
pub fn formula_to_sequent(a: &Formula) -> Sequent {
    match a {
        Formula::Unit => Sequent::empty(),
        Formula::Par(cs) => Sequent::Par(cs.iter().map(formula_to_sequent).collect()),
        Formula::Seq(cs) => Sequent::Seq(cs.iter().map(formula_to_sequent).collect()),
        _ => Sequent::Leaf(a.clone()),
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequent::Leaf(formula) => {
                let s = formula.to_string();
                if s.starts_with('[') || s.starts_with('<') {
                    write!(f, "{{{s}}}")
                } else {
                    write!(f, "{s}")
                }
            }
            Sequent::Par(cs) => {
                if cs.is_empty() {
                    return write!(f, "{{}}");
                }
                write!(f, "[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
            Sequent::Seq(cs) => {
                write!(f, "<")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ; ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ">")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser { input, bytes: input.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.input[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            Some(got) => self.err(format!("expected '{c}', found '{got}'")),
            None => self.err(format!("expected '{c}', found end of input")),
        }
    }

    fn parse_list(
        &mut self,
        sep: char,
        close: char,
        mut item: impl FnMut(&mut Self) -> Result<(), ParseError>,
    ) -> Result<(), ParseError> {
        loop {
            item(self)?;
            match self.bump() {
                Some(c) if c == sep => continue,
                Some(c) if c == close => return Ok(()),
                Some(c) => {
                    return self.err(format!("expected '{sep}' or '{close}', found '{c}'"))
                }
                None => return self.err(format!("expected '{sep}' or '{close}'")),
            }
        }
    }

    fn parse_formula(&mut self) -> Result<Formula, ParseError> {
        let base = match self.peek() {
            Some('[') => {
                self.bump();
                let mut children = Vec::new();
                if self.peek() == Some(']') {
                    self.bump();
                    Formula::Par(children)
                } else {
                    self.parse_list('|', ']', |p| {
                        children.push(p.parse_formula()?);
                        Ok(())
                    })?;
                    Formula::Par(children)
                }
            }
            Some('(') => {
                self.bump();
                let mut children = Vec::new();
                self.parse_list('*', ')', |p| {
                    children.push(p.parse_formula()?);
                    Ok(())
                })?;
                Formula::Tensor(children)
            }
            Some('<') => {
                self.bump();
                let mut children = Vec::new();
                self.parse_list(';', '>', |p| {
                    children.push(p.parse_formula()?);
                    Ok(())
                })?;
                Formula::Seq(children)
            }
            Some('I') => {
                self.bump();
                Formula::Unit
            }
            Some(c) if c.is_ascii_lowercase() || c == '#' => {
                let start = self.pos;
                self.bump();
                while self.pos < self.bytes.len() {
                    let b = self.bytes[self.pos];
                    if b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let var = self.input[start..self.pos].to_string();
                Formula::Atom { atom: Atom::pos(var), tag: 0 }
            }
            Some(c) => return self.err(format!("unexpected '{c}' in formula")),
            None => return self.err("unexpected end of input"),
        };
        // Dual markers (ASCII `'` or `⊥`), only valid on atoms.
        let mut result = base;
        while matches!(self.peek_raw(), Some('\'') | Some('⊥')) {
            let c = self.bump().unwrap();
            match &mut result {
                Formula::Atom { atom, .. } => atom.neg = !atom.neg,
                _ => {
                    return self.err(format!("dual marker '{c}' applied to a non-atom"));
                }
            }
        }
        Ok(result)
    }

    // Like peek, but used only to look for postfix markers.
    fn peek_raw(&mut self) -> Option<char> {
        self.skip_ws();
        self.input[self.pos..].chars().next()
    }

    fn parse_sequent(&mut self) -> Result<Sequent, ParseError> {
        match self.peek() {
            Some('{') => {
                self.bump();
                if self.peek() == Some('}') {
                    self.bump();
                    return Ok(Sequent::empty());
                }
                let f = self.parse_formula()?;
                self.expect('}')?;
                Ok(Sequent::Leaf(f))
            }
            Some('[') => {
                self.bump();
                let mut children = Vec::new();
                if self.peek() == Some(']') {
                    self.bump();
                    return Ok(Sequent::Par(children));
                }
                self.parse_list('|', ']', |p| {
                    children.push(p.parse_sequent()?);
                    Ok(())
                })?;
                Ok(Sequent::Par(children))
            }
            Some('<') => {
                self.bump();
                let mut children = Vec::new();
                self.parse_list(';', '>', |p| {
                    children.push(p.parse_sequent()?);
                    Ok(())
                })?;
                Ok(Sequent::Seq(children))
            }
            _ => Ok(Sequent::Leaf(self.parse_formula()?)),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos != self.input.len() {
            return self.err("trailing input");
        }
        Ok(())
    }
}

fn preprocess(text: &str) -> String {
    // UTF-8 aliases accepted on input, never emitted.
    text.replace('⊗', "*").replace('⅋', "|").replace('◁', ";")
}

/// Parse a formula in the ASCII grammar (see module docs), returning its
/// canonical form.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let text = preprocess(text);
    let mut p = Parser::new(&text);
    let f = p.parse_formula()?;
    p.finish()?;
    Ok(f.canonicalize())
}

/// Parse a formula without canonicalizing (used by the certificate checker,
/// which needs exact shapes).
pub fn parse_formula_raw(text: &str) -> Result<Formula, ParseError> {
    let text = preprocess(text);
    let mut p = Parser::new(&text);
    let f = p.parse_formula()?;
    p.finish()?;
    Ok(f)
}

/// Parse a sequent, returning its canonical form.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let text = preprocess(text);
    let mut p = Parser::new(&text);
    let s = p.parse_sequent()?;
    p.finish()?;
    Ok(s.canonicalize())
}

/// Parse a sequent without canonicalizing.
pub fn parse_sequent_raw(text: &str) -> Result<Sequent, ParseError> {
    let text = preprocess(text);
    let mut p = Parser::new(&text);
    let s = p.parse_sequent()?;
    p.finish()?;
    Ok(s)
}

/// Table entry for one fresh dual pair introduced by unfolding.
#[derive(Clone, Debug)]
pub struct FreshPair {
    pub var: String,
    /// Printed form of the subformula occurrence this pair stands for.
    pub subformula: String,
    /// Atom occurrence index (in the unfolded sequent) of the positive atom.
    pub pos_occ: usize,
    /// Atom occurrence index of the negative atom.
    pub neg_occ: usize,
}

/// Result of unfolding a sequent.
#[derive(Clone, Debug)]
pub struct Unfolding {
    /// The unfolded sequent Γ↓ (structure preserved, not re-sorted, so that
    /// occurrence indices are stable).
    pub sequent: Sequent,
    /// One fresh dual pair per non-atomic subformula occurrence.
    pub fresh: Vec<FreshPair>,
    /// For each atom occurrence index of the original sequent, its index in
    /// the unfolded sequent.
    pub occ_map: Vec<usize>,
}

/// Unfold a sequent: every non-atomic subformula occurrence is named by a
/// fresh dual variable pair `#k`/`#k'`, producing a sequent of "local"
/// formulas whose cographic prenet is the tree-like prenet of the input.
pub fn unfold(gamma: &Sequent) -> Unfolding {
    // Tag original atoms so we can recover the occurrence map afterwards.
    let mut tagged = gamma.clone();
    let mut next = 1u32;
    fn tag_sequent(s: &mut Sequent, next: &mut u32) {
        match s {
            Sequent::Leaf(f) => f.assign_tags_from_pub(next),
            Sequent::Par(cs) | Sequent::Seq(cs) => {
                for c in cs {
                    tag_sequent(c, next);
                }
            }
        }
    }
    tag_sequent(&mut tagged, &mut next);
    let n_orig = (next - 1) as usize;

    let mut counter = 0usize;
    let mut fresh_names: Vec<(String, String)> = Vec::new();
    let mut sharps: Vec<Formula> = Vec::new();

    // Returns the replacement leaf for a formula (the formula itself if
    // atomic/unit-free-atomic, else the fresh positive atom).
    fn go(
        f: &Formula,
        counter: &mut usize,
        fresh: &mut Vec<(String, String)>,
        sharps: &mut Vec<Formula>,
    ) -> Formula {
        match f {
            Formula::Atom { .. } => f.clone(),
            Formula::Unit => {
                *counter += 1;
                let var = format!("#{counter}");
                fresh.push((var.clone(), f.to_string()));
                sharps.push(Formula::Atom { atom: Atom::negf(var.clone()), tag: 0 });
                Formula::Atom { atom: Atom::pos(var), tag: 0 }
            }
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                *counter += 1;
                let var = format!("#{counter}");
                fresh.push((var.clone(), f.to_string()));
                let kids: Vec<Formula> =
                    cs.iter().map(|c| go(c, counter, fresh, sharps)).collect();
                let inner = match f {
                    Formula::Par(_) => Formula::Par(kids),
                    Formula::Tensor(_) => Formula::Tensor(kids),
                    _ => Formula::Seq(kids),
                };
                sharps.push(Formula::Tensor(vec![
                    Formula::Atom { atom: Atom::negf(var.clone()), tag: 0 },
                    inner,
                ]));
                Formula::Atom { atom: Atom::pos(var), tag: 0 }
            }
        }
    }

    fn go_sequent(
        s: &Sequent,
        counter: &mut usize,
        fresh: &mut Vec<(String, String)>,
        sharps: &mut Vec<Formula>,
    ) -> Sequent {
        match s {
            Sequent::Leaf(f) => Sequent::Leaf(go(f, counter, fresh, sharps)),
            Sequent::Par(cs) => {
                Sequent::Par(cs.iter().map(|c| go_sequent(c, counter, fresh, sharps)).collect())
            }
            Sequent::Seq(cs) => {
                Sequent::Seq(cs.iter().map(|c| go_sequent(c, counter, fresh, sharps)).collect())
            }
        }
    }

    let gamma0 = go_sequent(&tagged, &mut counter, &mut fresh_names, &mut sharps);

    let mut children = match gamma0 {
        Sequent::Par(cs) => cs,
        other => vec![other],
    };
    children.extend(sharps.into_iter().map(Sequent::Leaf));
    let unfolded = Sequent::Par(children);

    // Occurrence bookkeeping over the unfolded sequent.
    let mut occ_map = vec![usize::MAX; n_orig];
    let mut fresh_pos: HashMap<String, usize> = HashMap::new();
    let mut fresh_neg: HashMap<String, usize> = HashMap::new();
    let mut idx = 0usize;
    for leaf in unfolded.leaves() {
        for (a, t) in leaf.atoms().iter().zip(leaf.atom_tags()) {
            if t != 0 {
                occ_map[(t - 1) as usize] = idx;
            } else if a.var.starts_with('#') {
                if a.neg {
                    fresh_neg.insert(a.var.clone(), idx);
                } else {
                    fresh_pos.insert(a.var.clone(), idx);
                }
            }
            idx += 1;
        }
    }
    let fresh = fresh_names
        .into_iter()
        .map(|(var, subformula)| FreshPair {
            pos_occ: fresh_pos[&var],
            neg_occ: fresh_neg[&var],
            var,
            subformula,
        })
        .collect();

    // Strip tags from the output.
    fn strip(s: &Sequent) -> Sequent {
        match s {
            Sequent::Leaf(f) => {
                let mut f = f.clone();
                f.clear_tags();
                Sequent::Leaf(f)
            }
            Sequent::Par(cs) => Sequent::Par(cs.iter().map(strip).collect()),
            Sequent::Seq(cs) => Sequent::Seq(cs.iter().map(strip).collect()),
        }
    }

    Unfolding { sequent: strip(&unfolded), fresh, occ_map }
}

impl Formula {
    /// Public wrapper used by [`unfold`] to tag leaves across a sequent.
    fn assign_tags_from_pub(&mut self, next: &mut u32) {
        self.assign_tags_from(next);
    }

    pub fn clear_tags(&mut self) {
        match self {
            Formula::Unit => {}
            Formula::Atom { tag, .. } => *tag = 0,
            Formula::Par(cs) | Formula::Tensor(cs) | Formula::Seq(cs) => {
                for c in cs {
                    c.clear_tags();
                }
            }
        }
    }
}

/// All canonical formulas obtained from `a` by replacing at most `max_kill`
/// atom occurrences with the unit.
pub fn pseudo_subformulas(a: &Formula, max_kill: usize) -> Vec<Formula> {
    let mut tagged = a.clone();
    tagged.assign_tags();
    let n = a.size();
    let mut out = std::collections::HashSet::new();
    let max_kill = max_kill.min(n);

    fn kill(f: &Formula, subset: &[bool]) -> Formula {
        match f {
            Formula::Unit => Formula::Unit,
            Formula::Atom { tag, .. } => {
                if *tag != 0 && subset[(*tag - 1) as usize] {
                    Formula::Unit
                } else {
                    f.clone()
                }
            }
            Formula::Par(cs) => Formula::Par(cs.iter().map(|c| kill(c, subset)).collect()),
            Formula::Tensor(cs) => Formula::Tensor(cs.iter().map(|c| kill(c, subset)).collect()),
            Formula::Seq(cs) => Formula::Seq(cs.iter().map(|c| kill(c, subset)).collect()),
        }
    }

    // Enumerate subsets of size ≤ max_kill.
    let mut subset = vec![false; n];
    fn rec(
        i: usize,
        left: usize,
        subset: &mut Vec<bool>,
        tagged: &Formula,
        out: &mut std::collections::HashSet<Formula>,
    ) {
        let mut killed = kill(tagged, subset);
        killed.clear_tags();
        out.insert(killed.canonicalize());
        if left == 0 || i >= subset.len() {
            return;
        }
        for j in i..subset.len() {
            subset[j] = true;
            rec(j + 1, left - 1, subset, tagged, out);
            subset[j] = false;
        }
    }
    rec(0, max_kill, &mut subset, &tagged, &mut out);
    let mut v: Vec<Formula> = out.into_iter().collect();
    v.sort();
    v
}

/// Is `b` a pseudo-subformula of `a` (b ⊑ a)?
pub fn is_pseudo_subformula(b: &Formula, a: &Formula) -> bool {
    let b = b.canonicalize();
    let kills = a.size().saturating_sub(b.size());
    if a.size() < b.size() {
        return false;
    }
    pseudo_subformulas(a, kills).contains(&b)
}

/// All canonical unit-free formulas using each of the given atoms exactly
/// once. Built by binary combination with canonicalization, which reaches
/// every n-ary canonical form.
pub fn formulas_over(atoms: &[Atom]) -> Vec<Formula> {
    assert!(!atoms.is_empty() && atoms.len() <= 16);
    let n = atoms.len();
    let full: u32 = (1 << n) - 1;
    let mut memo: Vec<Vec<Formula>> = vec![Vec::new(); 1 << n];
    for (i, a) in atoms.iter().enumerate() {
        memo[1 << i] = vec![Formula::Atom { atom: a.clone(), tag: 0 }];
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut set = std::collections::BTreeSet::new();
        // iterate proper nonempty submasks
        let mut sub = (mask - 1) & mask;
        while sub != 0 {
            let co = mask & !sub;
            let (ls, rs) = (memo[sub as usize].clone(), memo[co as usize].clone());
            for l in &ls {
                for r in &rs {
                    set.insert(Formula::Par(vec![l.clone(), r.clone()]).canonicalize());
                    set.insert(Formula::Tensor(vec![l.clone(), r.clone()]).canonicalize());
                    set.insert(Formula::Seq(vec![l.clone(), r.clone()]).canonicalize());
                }
            }
            sub = (sub - 1) & mask;
        }
        memo[mask as usize] = set.into_iter().collect();
    }
    memo[full as usize].clone()
}

/// All canonical unit-free linear formulas over the given variables, each
/// occurring once, positively.
pub fn linear_formulas(vars: &[&str]) -> Vec<Formula> {
    let atoms: Vec<Atom> = vars.iter().map(|v| Atom::pos(*v)).collect();
    formulas_over(&atoms)
}

/// All canonical balanced formulas over the given variables: each occurs
/// exactly once positively and once negatively.
pub fn balanced_formulas(vars: &[&str]) -> Vec<Formula> {
    let atoms: Vec<Atom> =
        vars.iter().flat_map(|v| [Atom::pos(*v), Atom::negf(*v)]).collect();
    formulas_over(&atoms)
}

//! Congruences of finite algebras, their bounded lattices, and the link
//! between section congruences and derivable equations.
//!
//! Everything here runs on unary translations: the maps obtained from an
//! operation by freezing all but one argument. A partition is a congruence
//! exactly when every translation respects it, and the congruence generated
//! by a pair set is the worklist closure of the pairs under all translations.
//!
//! A finite handle materializes as an ordinary finite algebra whose carrier
//! is the element section and whose operations are the substitution
//! operators, the constants and the named basic operations. Congruences of
//! that algebra are exactly the bounded deductive extensions of the
//! underlying equational theory, which is what `equation_derivable` uses.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::FinAlgebra;
use crate::block_algebra::BlockAlgebra;
use crate::clone::{term_block, term_clone};
use crate::constants::ConstantsAlgebra;
use crate::error::{Error, Result};
use crate::handle::CloneAlgebra;
use crate::ops::{Block, OpTable};
use crate::term::Term;
use crate::universe::{Elem, FinUniverse};

/// Largest carrier a congruence enumeration will accept.
pub const DEFAULT_SIZE_GUARD: usize = 40;

const LATTICE_GUARD: usize = 20_000;

/// A partition of `0..size` closed under the algebra's translations.
/// Classes are numbered by first occurrence, so equal partitions compare
/// equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Congruence {
    class_of: Vec<usize>,
    classes: usize,
}

impl Congruence {
    pub fn identity(size: usize) -> Self {
        Congruence {
            class_of: (0..size).collect(),
            classes: size,
        }
    }

    pub fn full(size: usize) -> Self {
        Congruence {
            class_of: vec![0; size],
            classes: usize::from(size > 0),
        }
    }

    fn from_raw(raw: &[usize]) -> Self {
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(raw.len());
        for &c in raw {
            let next = renumber.len();
            class_of.push(*renumber.entry(c).or_insert(next));
        }
        Congruence {
            classes: renumber.len(),
            class_of,
        }
    }

    pub fn size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn class_of(&self, x: Elem) -> usize {
        self.class_of[x]
    }

    pub fn related(&self, x: Elem, y: Elem) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    /// Classes as sorted member lists, ordered by first member.
    pub fn classes(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.classes];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// A spanning pair set: relating these pairs regenerates the congruence.
    pub fn spanning_pairs(&self) -> Vec<(Elem, Elem)> {
        let mut first = vec![None; self.classes];
        let mut out = Vec::new();
        for (x, &c) in self.class_of.iter().enumerate() {
            match first[c] {
                None => first[c] = Some(x),
                Some(f) => out.push((f, x)),
            }
        }
        out
    }

    /// Whether every class of `self` sits inside a class of `other`.
    pub fn refines(&self, other: &Congruence) -> bool {
        if self.size() != other.size() {
            return false;
        }
        let mut image = vec![None; self.classes];
        for (x, &c) in self.class_of.iter().enumerate() {
            match image[c] {
                None => image[c] = Some(other.class_of[x]),
                Some(v) => {
                    if v != other.class_of[x] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Intersection of the two relations; always a congruence when both are.
    pub fn meet(&self, other: &Congruence) -> Congruence {
        let raw: Vec<usize> = self
            .class_of
            .iter()
            .zip(&other.class_of)
            .map(|(&a, &b)| a * other.classes.max(1) + b)
            .collect();
        Congruence::from_raw(&raw)
    }

    /// Whether the partition is compatible with every operation of `a`.
    pub fn is_congruence_of(&self, a: &FinAlgebra) -> Result<bool> {
        if self.size() != a.size() {
            return Err(Error::UniverseMismatch);
        }
        let translations = unary_translations(a);
        for class in self.classes() {
            let first = class[0];
            for &x in &class[1..] {
                for t in &translations {
                    if !self.related(t[first], t[x]) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Renders as classes separated by bars, members by the given names.
    pub fn render(&self, mut name: impl FnMut(Elem) -> String) -> String {
        self.classes()
            .iter()
            .map(|c| c.iter().map(|&x| name(x)).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(|x| x.to_string()))
    }
}

/// All distinct nontrivial unary translations of the algebra: one argument
/// of one operation left free, the others frozen. Identity and constant
/// translations impose nothing and are dropped.
pub fn unary_translations(a: &FinAlgebra) -> Vec<Vec<Elem>> {
    let s = a.size();
    let mut set: BTreeSet<Vec<Elem>> = BTreeSet::new();
    for (_, op) in a.ops() {
        let m = op.arity();
        if m == 0 {
            continue;
        }
        let table = op.table();
        for p in 0..m {
            let stride = s.pow((m - 1 - p) as u32);
            for base in 0..table.len() {
                if (base / stride) % s != 0 {
                    continue;
                }
                let t: Vec<Elem> = (0..s).map(|x| table[base + x * stride]).collect();
                if t.iter().enumerate().all(|(i, &v)| v == i) {
                    continue;
                }
                if t.windows(2).all(|w| w[0] == w[1]) {
                    continue;
                }
                set.insert(t);
            }
        }
    }
    set.into_iter().collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[ry] = rx;
        true
    }
}

fn generate_with(
    size: usize,
    translations: &[Vec<Elem>],
    pairs: &[(Elem, Elem)],
) -> Result<Congruence> {
    for &(x, y) in pairs {
        if x >= size || y >= size {
            return Err(Error::ElementOutOfRange {
                entry: x.max(y),
                size,
            });
        }
    }
    let mut uf = UnionFind::new(size);
    let mut work: Vec<(Elem, Elem)> = pairs.to_vec();
    while let Some((x, y)) = work.pop() {
        if uf.union(x, y) {
            for t in translations {
                work.push((t[x], t[y]));
            }
        }
    }
    let raw: Vec<usize> = (0..size).map(|x| uf.find(x)).collect();
    Ok(Congruence::from_raw(&raw))
}

/// The smallest congruence of `a` relating every given pair.
pub fn congruence_generate(a: &FinAlgebra, pairs: &[(Elem, Elem)]) -> Result<Congruence> {
    let translations = unary_translations(a);
    generate_with(a.size(), &translations, pairs)
}

/// Every congruence of `a`: the join closure of the principal congruences.
/// Guarded on the carrier size and on runaway lattices.
pub fn congruence_enumerate(a: &FinAlgebra, guard: usize) -> Result<CongruenceLattice> {
    let s = a.size();
    if s > guard {
        return Err(Error::SizeGuard { size: s, guard });
    }
    let translations = unary_translations(a);
    let mut principals: BTreeSet<Congruence> = BTreeSet::new();
    for x in 0..s {
        for y in x + 1..s {
            principals.insert(generate_with(s, &translations, &[(x, y)])?);
        }
    }
    let mut found: BTreeSet<Congruence> = BTreeSet::new();
    let identity = Congruence::identity(s);
    let mut stack = vec![identity.clone()];
    found.insert(identity);
    while let Some(theta) = stack.pop() {
        for p in &principals {
            if p.refines(&theta) {
                continue;
            }
            let mut pairs = theta.spanning_pairs();
            pairs.extend(p.spanning_pairs());
            let join = generate_with(s, &translations, &pairs)?;
            if !found.contains(&join) {
                if found.len() >= LATTICE_GUARD {
                    return Err(Error::LatticeGuard {
                        guard: LATTICE_GUARD,
                    });
                }
                found.insert(join.clone());
                stack.push(join);
            }
        }
    }
    CongruenceLattice::new(found.into_iter().collect())
}

/// A complete congruence set ordered finest first, with the lattice
/// structure computable from refinement.
#[derive(Debug, Clone, Serialize)]
pub struct CongruenceLattice {
    size: usize,
    congruences: Vec<Congruence>,
}

impl CongruenceLattice {
    fn new(mut congruences: Vec<Congruence>) -> Result<Self> {
        let Some(first) = congruences.first() else {
            return Err(Error::Internal("empty congruence set".into()));
        };
        let size = first.size();
        if congruences.iter().any(|c| c.size() != size) {
            return Err(Error::UniverseMismatch);
        }
        congruences.sort_by(|a, b| {
            (size - a.classes, &a.class_of).cmp(&(size - b.classes, &b.class_of))
        });
        congruences.dedup();
        Ok(CongruenceLattice { size, congruences })
    }

    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    pub fn carrier_size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.congruences[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Congruence> {
        self.congruences.iter()
    }

    pub fn position(&self, c: &Congruence) -> Option<usize> {
        self.congruences.iter().position(|d| d == c)
    }

    pub fn bottom_index(&self) -> usize {
        0
    }

    pub fn top_index(&self) -> usize {
        self.congruences.len() - 1
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.congruences[i].refines(&self.congruences[j])
    }

    pub fn meet_index(&self, i: usize, j: usize) -> Result<usize> {
        let m = self.congruences[i].meet(&self.congruences[j]);
        self.position(&m)
            .ok_or_else(|| Error::Internal("meet escaped the enumerated lattice".into()))
    }

    pub fn join_index(&self, i: usize, j: usize) -> Result<usize> {
        let uppers: Vec<usize> = (0..self.len())
            .filter(|&k| self.leq(i, k) && self.leq(j, k))
            .collect();
        let minimal: Vec<usize> = uppers
            .iter()
            .copied()
            .filter(|&k| uppers.iter().all(|&l| l == k || !self.leq(l, k)))
            .collect();
        match minimal.as_slice() {
            [k] => Ok(*k),
            _ => Err(Error::Internal("join is not unique; lattice incomplete".into())),
        }
    }

    /// Hasse edges (lower, upper), deterministic order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                let between = (0..n)
                    .any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// DOT rendering of the Hasse diagram, bottom-up.
    pub fn emit_dot(&self, mut name: impl FnMut(Elem) -> String) -> String {
        let mut out = String::from("digraph congruences {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, c) in self.congruences.iter().enumerate() {
            let label = c.render(&mut name).replace('"', "\\\"");
            out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
        }
        for (lo, hi) in self.covers() {
            out.push_str(&format!("  n{lo} -> n{hi};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// A finite handle as an ordinary finite algebra: carrier = element section,
/// operations = substitution operators up to the width bound, the constants,
/// and the named basic operations. Returns the algebra plus the element
/// order backing its universe.
pub fn materialize<H: CloneAlgebra>(h: &H) -> Result<(FinAlgebra, Vec<H::Elem>)> {
    let elems = h
        .elements()
        .ok_or_else(|| Error::Internal("handle cannot enumerate its elements".into()))?;
    let cap = h
        .dim_bound()
        .ok_or_else(|| Error::Internal("handle has no width bound to materialize".into()))?;
    let symbols: Vec<String> = elems.iter().map(|a| h.label(a)).collect();
    let universe = FinUniverse::new(format!("section{}", elems.len()), symbols)?;
    let mut index: HashMap<&H::Elem, usize> = HashMap::with_capacity(elems.len());
    for (i, a) in elems.iter().enumerate() {
        index.insert(a, i);
    }
    let position = |v: &H::Elem| -> Result<usize> {
        index
            .get(v)
            .copied()
            .ok_or_else(|| Error::SectionNotClosed(format!("{} is not in the section", h.label(v))))
    };
    let table_of = |arity: usize, f: &mut dyn FnMut(&[H::Elem]) -> Result<H::Elem>| -> Result<OpTable> {
        let mut escaped = None;
        let table = OpTable::from_fn(universe.clone(), arity, |args| {
            if escaped.is_some() {
                return 0;
            }
            let tuple: Vec<H::Elem> = args.iter().map(|&i| elems[i].clone()).collect();
            match f(&tuple).and_then(|v| position(&v)) {
                Ok(i) => i,
                Err(e) => {
                    escaped = Some(e);
                    0
                }
            }
        })?;
        match escaped {
            Some(e) => Err(e),
            None => Ok(table),
        }
    };
    let mut ops: Vec<(String, OpTable)> = Vec::new();
    for n in 0..=cap {
        let table = table_of(n + 1, &mut |tuple| h.q(&tuple[0], &tuple[1..]))?;
        ops.push((format!("q{n}"), table));
    }
    for i in 1..=cap {
        let c = position(&h.e(i)?)?;
        ops.push((format!("e{i}"), OpTable::constant(universe.clone(), c, 0)?));
    }
    for (name, m) in h.signature() {
        let table = table_of(m, &mut |tuple| h.sigma(&name, tuple))?;
        ops.push((name, table));
    }
    Ok((FinAlgebra::new(universe, ops)?, elems))
}

/// The quotient algebra of `a` by a congruence. Class symbols join the
/// member symbols with `|`.
pub fn quotient(a: &FinAlgebra, theta: &Congruence) -> Result<FinAlgebra> {
    if theta.size() != a.size() {
        return Err(Error::UniverseMismatch);
    }
    if !theta.is_congruence_of(a)? {
        return Err(Error::InvalidHom(
            "partition is not a congruence; the quotient map is not well defined".into(),
        ));
    }
    let classes = theta.classes();
    let symbols: Vec<String> = classes
        .iter()
        .map(|c| {
            c.iter()
                .map(|&x| a.universe().symbol(x).to_string())
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect();
    let universe = FinUniverse::new(
        format!("{}/{}", a.universe().name(), theta.class_count()),
        symbols,
    )?;
    let reps: Vec<Elem> = classes.iter().map(|c| c[0]).collect();
    let mut ops: Vec<(String, OpTable)> = Vec::new();
    for (name, op) in a.ops() {
        let mut escaped = None;
        let table = OpTable::from_fn(universe.clone(), op.arity(), |args| {
            if escaped.is_some() {
                return 0;
            }
            let tuple: Vec<Elem> = args.iter().map(|&c| reps[c]).collect();
            match op.evaluate(&tuple) {
                Ok(v) => theta.class_of(v),
                Err(e) => {
                    escaped = Some(e);
                    0
                }
            }
        })?;
        match escaped {
            Some(e) => return Err(e),
            None => ops.push((name.to_string(), table)),
        }
    }
    FinAlgebra::new(universe, ops)
}

/// The bounded realization of the clone algebra of the variety the base
/// algebra generates: its term blocks as a pointed pure handle, the basic
/// operations surviving as distinguished constants.
pub fn clv_block_algebra(
    base: &FinAlgebra,
    cap: usize,
) -> Result<ConstantsAlgebra<BlockAlgebra>> {
    ConstantsAlgebra::new(BlockAlgebra::new(term_clone(base, cap)?)?)
}

/// Whether `lhs = rhs` follows from the axioms over the variety the base
/// algebra generates, with every term drawing its variables from v1..v{cap}.
///
/// Axioms already valid in the variety are absorbed: both sides then name
/// the same section element and relate trivially. What remains is the
/// congruence of the materialized section generated by the axiom pairs.
pub fn equation_derivable(
    base: &FinAlgebra,
    cap: usize,
    axioms: &[(Term, Term)],
    lhs: &Term,
    rhs: &Term,
) -> Result<bool> {
    let clv = clv_block_algebra(base, cap)?;
    let (alg, elems) = materialize(&clv)?;
    let mut index: HashMap<Block, usize> = HashMap::with_capacity(elems.len());
    for (i, b) in elems.iter().enumerate() {
        index.insert(b.clone(), i);
    }
    let pos = |t: &Term| -> Result<usize> {
        let b = term_block(base, t, cap)?;
        index
            .get(&b)
            .copied()
            .ok_or_else(|| Error::Internal(format!("term block {b} missing from the section")))
    };
    let mut pairs = Vec::with_capacity(axioms.len());
    for (l, r) in axioms {
        pairs.push((pos(l)?, pos(r)?));
    }
    let theta = congruence_generate(&alg, &pairs)?;
    Ok(theta.related(pos(lhs)?, pos(rhs)?))
}

/// Shared helper for matching a handle element list against a universe.
pub fn section_positions<H: CloneAlgebra>(
    elems: &[H::Elem],
) -> HashMap<H::Elem, usize> {
    elems
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect()
}

/// Convenience: the universe built by [`materialize`] for the given handle.
pub fn section_universe<H: CloneAlgebra>(h: &H) -> Result<Arc<FinUniverse>> {
    let elems = h
        .elements()
        .ok_or_else(|| Error::Internal("handle cannot enumerate its elements".into()))?;
    let symbols: Vec<String> = elems.iter().map(|a| h.label(a)).collect();
    FinUniverse::new(format!("section{}", elems.len()), symbols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn min_chain() -> FinAlgebra {
        // three-element chain with the binary minimum
        let u = FinUniverse::numeric("chain3", 3).unwrap();
        let min = OpTable::from_fn(u.clone(), 2, |xs| xs[0].min(xs[1])).unwrap();
        FinAlgebra::new(u, vec![("min".into(), min)]).unwrap()
    }

    fn or_algebra() -> FinAlgebra {
        let u = FinUniverse::numeric("bool", 2).unwrap();
        let or = OpTable::new(u.clone(), 2, vec![0, 1, 1, 1]).unwrap();
        FinAlgebra::new(u, vec![("or".into(), or)]).unwrap()
    }

    fn nand_algebra() -> FinAlgebra {
        let u = FinUniverse::numeric("bool", 2).unwrap();
        let nand = OpTable::new(u.clone(), 2, vec![1, 1, 1, 0]).unwrap();
        FinAlgebra::new(u, vec![("nand".into(), nand)]).unwrap()
    }

    fn sets_algebra(size: usize) -> FinAlgebra {
        let u = FinUniverse::numeric("set", size).unwrap();
        FinAlgebra::new(u, vec![]).unwrap()
    }

    #[test]
    fn translations_of_the_chain() {
        let a = min_chain();
        let ts = unary_translations(&a);
        // min(x,0) is constant, min(x,2) is the identity; min(x,1) survives
        assert_eq!(ts, vec![vec![0, 1, 1]]);
    }

    #[test]
    fn principal_congruences_of_the_chain() {
        let a = min_chain();
        let low = congruence_generate(&a, &[(0, 1)]).unwrap();
        assert_eq!(low.classes(), vec![vec![0, 1], vec![2]]);
        let high = congruence_generate(&a, &[(1, 2)]).unwrap();
        assert_eq!(high.classes(), vec![vec![0], vec![1, 2]]);
        // merging the endpoints drags in the middle
        let outer = congruence_generate(&a, &[(0, 2)]).unwrap();
        assert_eq!(outer.class_count(), 1);
    }

    #[test]
    fn chain_lattice_is_the_diamond() {
        let a = min_chain();
        let lat = congruence_enumerate(&a, DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(lat.len(), 4);
        assert_eq!(lat.get(lat.bottom_index()), &Congruence::identity(3));
        assert_eq!(lat.get(lat.top_index()), &Congruence::full(3));
        // the two middle congruences join to the top and meet at the bottom
        let mids: Vec<usize> = (0..lat.len())
            .filter(|&i| lat.get(i).class_count() == 2)
            .collect();
        assert_eq!(mids.len(), 2);
        assert_eq!(lat.join_index(mids[0], mids[1]).unwrap(), lat.top_index());
        assert_eq!(lat.meet_index(mids[0], mids[1]).unwrap(), lat.bottom_index());
        assert_eq!(lat.covers().len(), 4);
    }

    #[test]
    fn congruence_predicate_matches_the_enumeration() {
        let a = min_chain();
        let lat = congruence_enumerate(&a, DEFAULT_SIZE_GUARD).unwrap();
        // all 5 partitions of a 3-set, checked against membership
        let partitions = [
            vec![0usize, 1, 2], // identity
            vec![0, 0, 1],
            vec![0, 1, 1],
            vec![0, 1, 0],
            vec![0, 0, 0],
        ];
        for raw in partitions {
            let c = Congruence::from_raw(&raw);
            let in_lattice = lat.iter().any(|d| d == &c);
            assert_eq!(c.is_congruence_of(&a).unwrap(), in_lattice, "{c}");
        }
    }

    #[test]
    fn generated_congruence_is_the_meet_of_those_above_it() {
        let a = min_chain();
        let lat = congruence_enumerate(&a, DEFAULT_SIZE_GUARD).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let g = congruence_generate(&a, &[(x, y)]).unwrap();
                let mut above: Option<Congruence> = None;
                for c in lat.iter() {
                    if c.related(x, y) {
                        above = Some(match above {
                            None => c.clone(),
                            Some(m) => m.meet(c),
                        });
                    }
                }
                assert_eq!(g, above.unwrap());
            }
        }
    }

    #[test]
    fn two_element_join_semilattice_has_two_congruences() {
        let lat = congruence_enumerate(&or_algebra(), DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(lat.len(), 2);
    }

    #[test]
    fn size_guard_blocks_large_carriers() {
        let a = sets_algebra(41);
        let err = congruence_enumerate(&a, DEFAULT_SIZE_GUARD).unwrap_err();
        assert!(matches!(err, Error::SizeGuard { size: 41, guard: 40 }));
    }

    #[test]
    fn bare_sets_have_every_partition() {
        // no operations: the lattice is all partitions, Bell(3) = 5
        let lat = congruence_enumerate(&sets_algebra(3), DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(lat.len(), 5);
    }

    #[test]
    fn quotient_of_the_chain_collapses_a_class() {
        let a = min_chain();
        let theta = congruence_generate(&a, &[(0, 1)]).unwrap();
        let q = quotient(&a, &theta).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(q.universe().symbol(0), "0|1");
        // min on the two classes is the expected semilattice
        assert_eq!(q.op("min").unwrap().table(), &[0, 0, 0, 1]);
    }

    #[test]
    fn quotient_rejects_non_congruences() {
        let a = min_chain();
        let bad = Congruence::from_raw(&[0, 1, 0]);
        assert!(matches!(quotient(&a, &bad), Err(Error::InvalidHom(_))));
    }

    #[test]
    fn materialized_projection_section_is_simple() {
        // four projection blocks with substitution only: two congruences
        let clv = clv_block_algebra(&sets_algebra(2), 4).unwrap();
        let (alg, elems) = materialize(&clv).unwrap();
        assert_eq!(elems.len(), 4);
        assert_eq!(alg.op("q4").unwrap().arity(), 5);
        let lat = congruence_enumerate(&alg, DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(lat.len(), 2);
    }

    #[test]
    fn materialized_full_binary_section_is_simple() {
        let clv = clv_block_algebra(&nand_algebra(), 2).unwrap();
        let (alg, elems) = materialize(&clv).unwrap();
        assert_eq!(elems.len(), 16);
        let lat = congruence_enumerate(&alg, DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(lat.len(), 2);
    }

    #[test]
    fn materialized_tables_agree_with_the_handle() {
        let clv = clv_block_algebra(&or_algebra(), 2).unwrap();
        let (alg, elems) = materialize(&clv).unwrap();
        let q1 = alg.op("q1").unwrap();
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let direct = clv.q(a, std::slice::from_ref(b)).unwrap();
                let pos = elems.iter().position(|x| x == &direct).unwrap();
                assert_eq!(q1.evaluate(&[i, j]).unwrap(), pos);
            }
        }
        let e1 = alg.op("e1").unwrap();
        assert_eq!(elems[e1.evaluate(&[]).unwrap()], clv.e(1).unwrap());
    }

    #[test]
    fn dot_output_is_deterministic_and_complete() {
        let lat = congruence_enumerate(&min_chain(), DEFAULT_SIZE_GUARD).unwrap();
        let a = min_chain();
        let dot = lat.emit_dot(|x| a.universe().symbol(x).to_string());
        let again = lat.emit_dot(|x| a.universe().symbol(x).to_string());
        assert_eq!(dot, again);
        assert!(dot.starts_with("digraph congruences {"));
        assert_eq!(dot.matches("label=").count(), 4);
        assert_eq!(dot.matches("->").count(), 4);
    }

    #[test]
    fn valid_equations_are_derivable_from_nothing() {
        let a = or_algebra();
        let comm_l = Term::parse("(or v1 v2)").unwrap();
        let comm_r = Term::parse("(or v2 v1)").unwrap();
        assert!(equation_derivable(&a, 2, &[], &comm_l, &comm_r).unwrap());
        let idem_l = Term::parse("(or v1 v1)").unwrap();
        let v1 = Term::parse("v1").unwrap();
        assert!(equation_derivable(&a, 2, &[], &idem_l, &v1).unwrap());
    }

    #[test]
    fn invalid_equations_are_not_derivable_from_nothing() {
        let a = or_algebra();
        let lhs = Term::parse("(or v1 v2)").unwrap();
        let v1 = Term::parse("v1").unwrap();
        assert!(!equation_derivable(&a, 2, &[], &lhs, &v1).unwrap());
    }

    #[test]
    fn absorption_forces_collapse() {
        // from or(x,y) = x one derives x = y over the two-variable section
        let a = or_algebra();
        let ax = (
            Term::parse("(or v1 v2)").unwrap(),
            Term::parse("v1").unwrap(),
        );
        let v1 = Term::parse("v1").unwrap();
        let v2 = Term::parse("v2").unwrap();
        assert!(!equation_derivable(&a, 2, &[], &v1, &v2).unwrap());
        assert!(equation_derivable(&a, 2, &[ax], &v1, &v2).unwrap());
    }

    #[test]
    fn derivability_respects_the_variable_bound() {
        let a = or_algebra();
        let t = Term::parse("(or v1 v3)").unwrap();
        let v1 = Term::parse("v1").unwrap();
        let err = equation_derivable(&a, 2, &[], &t, &v1).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn spanning_pairs_regenerate() {
        let a = min_chain();
        let lat = congruence_enumerate(&a, DEFAULT_SIZE_GUARD).unwrap();
        for c in lat.iter() {
            let again = congruence_generate(&a, &c.spanning_pairs()).unwrap();
            assert_eq!(&again, c);
        }
    }
}

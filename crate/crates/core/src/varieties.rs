//! Ground-term reachability, interpretations between varieties, and the
//! independence test for pairs of varieties presented by finite algebras.
//!
//! A handle with basic operations is generated by its constants when every
//! element is the value of a ground term: basic operations applied, starting
//! from the distinguished elements `e1`, .., `ecap`. [`minimal_section`]
//! computes the reachable set to a depth bound, [`is_minimal_bounded`] turns
//! it into a three-valued verdict against the full section.
//!
//! Two varieties over one signature are independent when a single binary
//! term behaves as `v1` in the first and as `v2` in the second. The verdict
//! of [`independence_search`] must agree with minimality of the product
//! handle; [`product_minimality_check`] computes both sides and reports the
//! agreement.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::FinAlgebra;
use crate::block_algebra::BlockAlgebra;
use crate::central::advance;
use crate::clone::{term_block, term_clone};
use crate::congruence::equation_derivable;
use crate::constants::{op_constant, OpConstant, RepresentedAlgebra};
use crate::error::{Error, Result};
use crate::handle::{CloneAlgebra, ProductAlgebra};
use crate::term::Term;

/// Largest number of candidate terms a bounded search may enumerate.
const TERM_GUARD: usize = 1_000_000;

/// Largest closure-verification sweep `minimal_section` runs by itself.
const CLOSURE_GUARD: u128 = 2_000_000;

/// Depth past which an interpretation witness search gives up; reachable
/// sections stabilize far earlier.
const WITNESS_DEPTH: usize = 64;

/// The set of elements reachable from the distinguished constants by basic
/// operations, to a depth bound.
#[derive(Debug, Clone)]
pub struct MinimalSection<E> {
    /// Reached elements in canonical order.
    pub elements: Vec<E>,
    pub depth: usize,
    /// A full round added nothing, so the set is the entire reachable part.
    pub stabilized: bool,
    /// Whether the reached set is closed under every substitution operator,
    /// when the sweep fits under the internal guard.
    pub q_closed: Option<bool>,
}

/// Values of ground terms of depth at most `depth`: depth zero yields the
/// constants `e1`, .., `ecap`, and each round applies every basic operation
/// to what is already reached.
pub fn minimal_section<H: CloneAlgebra>(h: &H, depth: usize) -> Result<MinimalSection<H::Elem>> {
    let cap = h
        .dim_bound()
        .ok_or_else(|| Error::Internal("ground reachability needs a width-bounded handle".into()))?;
    let mut reached: BTreeSet<H::Elem> = (1..=cap).map(|i| h.e(i)).collect::<Result<_>>()?;
    let sig = h.signature();
    let mut stabilized = sig.is_empty();
    for _ in 0..depth {
        if stabilized {
            break;
        }
        let snapshot: Vec<H::Elem> = reached.iter().cloned().collect();
        let mut grew = false;
        for (name, m) in &sig {
            let mut idx = vec![0usize; *m];
            loop {
                let args: Vec<H::Elem> = idx.iter().map(|&i| snapshot[i].clone()).collect();
                grew |= reached.insert(h.sigma(name, &args)?);
                if !advance(&mut idx, snapshot.len()) {
                    break;
                }
            }
        }
        if !grew {
            stabilized = true;
        }
    }

    let elements: Vec<H::Elem> = reached.iter().cloned().collect();
    let sweep: u128 = (1..=cap)
        .map(|n| (elements.len() as u128).saturating_pow(n as u32 + 1))
        .sum();
    let mut q_closed = None;
    if sweep <= CLOSURE_GUARD {
        let mut ok = true;
        'widths: for n in 1..=cap {
            for a in &elements {
                let mut idx = vec![0usize; n];
                loop {
                    let bs: Vec<H::Elem> = idx.iter().map(|&i| elements[i].clone()).collect();
                    if !reached.contains(&h.q(a, &bs)?) {
                        ok = false;
                        break 'widths;
                    }
                    if !advance(&mut idx, elements.len()) {
                        break;
                    }
                }
            }
        }
        q_closed = Some(ok);
    }
    Ok(MinimalSection {
        elements,
        depth,
        stabilized,
        q_closed,
    })
}

/// Verdict of the bounded minimality check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MinimalityVerdict {
    /// Every section element is the value of a ground term within the bound.
    Minimal,
    /// Reachability stabilized below the full section, so deeper terms
    /// cannot help.
    NotMinimal { missing: String },
    /// The reached set was still growing when the depth bound cut it off.
    Undecided { missing: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalityReport {
    pub verdict: MinimalityVerdict,
    pub reached: usize,
    pub section: usize,
    pub depth: usize,
    pub stabilized: bool,
}

/// Compares ground-term reachability at the given depth against the whole
/// section.
pub fn is_minimal_bounded<H: CloneAlgebra>(h: &H, depth: usize) -> Result<MinimalityReport> {
    let ms = minimal_section(h, depth)?;
    let all = h
        .elements()
        .ok_or_else(|| Error::Internal("minimality needs an enumerable section".into()))?;
    let reached: BTreeSet<&H::Elem> = ms.elements.iter().collect();
    let missing = all.iter().find(|x| !reached.contains(x));
    let verdict = match missing {
        None => MinimalityVerdict::Minimal,
        Some(x) if ms.stabilized => MinimalityVerdict::NotMinimal {
            missing: h.label(x),
        },
        Some(x) => MinimalityVerdict::Undecided {
            missing: h.label(x),
        },
    };
    Ok(MinimalityReport {
        verdict,
        reached: ms.elements.len(),
        section: all.len(),
        depth,
        stabilized: ms.stabilized,
    })
}

/// Enumerates terms over `vars` variables in a fixed order: by depth, then
/// by operation in signature order, then by argument tuples with the
/// rightmost argument varying fastest. Stops and returns the first term on
/// which `visit` says so.
fn search_terms<F>(
    signature: &[(String, usize)],
    vars: usize,
    max_depth: usize,
    mut visit: F,
) -> Result<Option<Term>>
where
    F: FnMut(&Term) -> Result<bool>,
{
    let mut pool: Vec<Term> = Vec::new();
    let mut visited = 0usize;
    let mut level: Vec<Term> = (1..=vars).map(Term::var).collect();
    for depth in 0..=max_depth {
        if level.is_empty() {
            break;
        }
        for t in &level {
            visited += 1;
            if visited > TERM_GUARD {
                return Err(Error::SizeGuard {
                    size: visited,
                    guard: TERM_GUARD,
                });
            }
            if visit(t)? {
                return Ok(Some(t.clone()));
            }
        }
        if depth == max_depth {
            break;
        }
        // the just-visited stratum now occupies pool[newest..]
        let newest = pool.len();
        pool.append(&mut level);
        let mut generated = visited;
        for (name, m) in signature {
            if *m == 0 {
                // nullary terms exist exactly at depth one
                if newest == 0 {
                    level.push(Term::app(name.clone(), vec![]));
                }
                continue;
            }
            let mut idx = vec![0usize; *m];
            loop {
                // at least one argument from the newest stratum keeps the
                // depth exact and the enumeration duplicate-free
                if idx.iter().any(|&i| i >= newest) {
                    generated += 1;
                    if generated > TERM_GUARD {
                        return Err(Error::SizeGuard {
                            size: generated,
                            guard: TERM_GUARD,
                        });
                    }
                    let args: Vec<Term> = idx.iter().map(|&i| pool[i].clone()).collect();
                    level.push(Term::app(name.clone(), args));
                }
                if !advance(&mut idx, pool.len()) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Searches for a binary term behaving as `v1` in the variety of `a1` and
/// as `v2` in the variety of `a2`, to the given term depth. Validity of an
/// identity is the equality of the canonical blocks of its sides.
pub fn independence_search(
    a1: &FinAlgebra,
    a2: &FinAlgebra,
    depth: usize,
) -> Result<Option<Term>> {
    if a1.signature() != a2.signature() {
        return Err(Error::SignatureMismatch(
            "independence is asked of two varieties of one type".into(),
        ));
    }
    let first = term_block(a1, &Term::var(1), 2)?;
    let second = term_block(a2, &Term::var(2), 2)?;
    let sig = a1.signature();
    search_terms(&sig, 2, depth, |t| {
        Ok(term_block(a1, t, 2)? == first && term_block(a2, t, 2)? == second)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductMinimalityReport {
    /// Independence witness in prefix form, when one exists at the depth.
    pub witness: Option<String>,
    pub minimality: MinimalityReport,
    /// A witness must exist exactly when the product handle is minimal;
    /// disagreement is a defect.
    pub agree: bool,
}

/// Runs the independence search and the product-handle minimality check at
/// matching bounds and reports whether the two verdicts agree.
pub fn product_minimality_check(
    a1: &FinAlgebra,
    a2: &FinAlgebra,
    depth: usize,
    cap: usize,
) -> Result<ProductMinimalityReport> {
    let witness = independence_search(a1, a2, depth)?;
    let left = BlockAlgebra::new(term_clone(a1, cap)?)?;
    let right = BlockAlgebra::new(term_clone(a2, cap)?)?;
    let product = ProductAlgebra::new(left, right)?;
    let minimality = is_minimal_bounded(&product, depth)?;
    let agree = witness.is_some() == matches!(minimality.verdict, MinimalityVerdict::Minimal);
    Ok(ProductMinimalityReport {
        witness: witness.map(|t| t.to_string()),
        minimality,
        agree,
    })
}

/// An interpretation into the variety of a finite algebra: each source
/// operation is assigned a target term over as many variables as its arity.
/// A nullary operation is assigned a unary term that must be constant-valued
/// in the target, i.e. `t(v1) = t(v2)` must be valid there.
#[derive(Debug, Clone)]
pub struct Interpretation {
    target: FinAlgebra,
    templates: BTreeMap<String, Term>,
}

impl Interpretation {
    pub fn new(target: FinAlgebra, templates: Vec<(String, Term)>) -> Self {
        Interpretation {
            target,
            templates: templates.into_iter().collect(),
        }
    }

    pub fn target(&self) -> &FinAlgebra {
        &self.target
    }

    pub fn template(&self, name: &str) -> Option<&Term> {
        self.templates.get(name)
    }

    /// Image of a source term: every operation node is replaced by its
    /// template with the translated arguments substituted in.
    pub fn translate(&self, t: &Term) -> Result<Term> {
        t.rewrite_ops(&|name| self.templates.get(name).cloned())
    }
}

/// A map between handles that is asked to preserve only the distinguished
/// constants and the substitution operators.
#[derive(Debug, Clone)]
pub struct PureHom<A: CloneAlgebra, B: CloneAlgebra> {
    map: BTreeMap<A::Elem, B::Elem>,
}

impl<A: CloneAlgebra, B: CloneAlgebra> PureHom<A, B> {
    pub fn new(map: BTreeMap<A::Elem, B::Elem>) -> Self {
        PureHom { map }
    }

    pub fn map(&self) -> &BTreeMap<A::Elem, B::Elem> {
        &self.map
    }

    pub fn apply(&self, a: &A::Elem) -> Result<&B::Elem> {
        self.map
            .get(a)
            .ok_or_else(|| Error::InvalidHom(format!("element {a:?} has no image")))
    }

    /// Exhaustively verifies `F(ei) = ei` and `F(q(a, bs)) = q(F(a), F(bs))`
    /// over the source section, for every width up to the source bound.
    pub fn verify(&self, src: &A, dst: &B) -> Result<()> {
        let cap = src
            .dim_bound()
            .ok_or_else(|| Error::Internal("pure hom verification needs a bounded source".into()))?;
        for i in 1..=cap {
            if self.apply(&src.e(i)?)? != &dst.e(i)? {
                return Err(Error::InvalidHom(format!("e{i} is not preserved")));
            }
        }
        let elems = src
            .elements()
            .ok_or_else(|| Error::Internal("pure hom verification needs an enumerable source".into()))?;
        for n in 1..=cap {
            for a in &elems {
                let fa = self.apply(a)?.clone();
                let mut idx = vec![0usize; n];
                loop {
                    let bs: Vec<A::Elem> = idx.iter().map(|&i| elems[i].clone()).collect();
                    let lhs = self.apply(&src.q(a, &bs)?)?;
                    let fbs: Vec<B::Elem> = bs
                        .iter()
                        .map(|b| self.apply(b).cloned())
                        .collect::<Result<_>>()?;
                    if lhs != &dst.q(&fa, &fbs)? {
                        return Err(Error::InvalidHom(format!(
                            "width-{n} substitution is not preserved at {}",
                            src.label(a)
                        )));
                    }
                    if !advance(&mut idx, elems.len()) {
                        break;
                    }
                }
            }
        }
        Ok(())
    }
}

/// An interpretation turned into a verified pure homomorphism between the
/// two term sections.
#[derive(Debug, Clone)]
pub struct InterpretedHom {
    pub hom: PureHom<BlockAlgebra, BlockAlgebra>,
    pub source: BlockAlgebra,
    pub target: BlockAlgebra,
}

/// Builds the block map of an interpretation: the block of a source term
/// goes to the block of its translation. The map is derived from witness
/// terms found by the canonical enumeration, then verified to preserve the
/// constants and every substitution operator on the whole section.
pub fn interp_to_purehom(
    interp: &Interpretation,
    source: &FinAlgebra,
    cap: usize,
) -> Result<InterpretedHom> {
    for (name, m) in source.signature() {
        let t = interp.template(&name).ok_or_else(|| {
            Error::InvalidInterpretation(format!("no template for operation {name}"))
        })?;
        if m == 0 {
            if t.max_var() > 1 {
                return Err(Error::InvalidInterpretation(format!(
                    "template for nullary {name} must be a unary term, got {t}"
                )));
            }
            let swapped = t.substitute(&[Term::var(2)])?;
            if !equation_derivable(&interp.target, cap.max(2), &[], t, &swapped)? {
                return Err(Error::InvalidInterpretation(format!(
                    "template {t} for nullary {name} is not constant-valued in the target"
                )));
            }
        } else if t.max_var() > m {
            return Err(Error::InvalidInterpretation(format!(
                "template for {name} reads v{} beyond its arity {m}",
                t.max_var()
            )));
        }
    }

    let src = BlockAlgebra::new(term_clone(source, cap)?)?;
    let dst = BlockAlgebra::new(term_clone(&interp.target, cap)?)?;
    let total = src.section().len();
    let mut map = BTreeMap::new();
    let sig = source.signature();
    search_terms(&sig, cap, WITNESS_DEPTH, |t| {
        let block = term_block(source, t, cap)?;
        if !map.contains_key(&block) {
            let image = term_block(&interp.target, &interp.translate(t)?, cap)?;
            map.insert(block, image);
        }
        Ok(map.len() == total)
    })?;
    if map.len() != total {
        return Err(Error::Internal(
            "a section block has no witness term within the search depth".into(),
        ));
    }
    let hom = PureHom::new(map);
    hom.verify(&src, &dst)?;
    Ok(InterpretedHom {
        hom,
        source: src,
        target: dst,
    })
}

/// Equips the pure handle `d` with the basic operations of `c`, transported
/// along `hom`: the constant of each operation goes to its image, and the
/// operation acts by substitution into that image. Verifies that `hom` is a
/// pure homomorphism and that it commutes with every transported operation.
pub fn f_expansion<C, D>(c: &C, d: &D, hom: &PureHom<C, D>) -> Result<RepresentedAlgebra<D>>
where
    C: CloneAlgebra,
    D: CloneAlgebra + Clone,
{
    hom.verify(c, d)?;
    let mut consts = Vec::new();
    for (name, arity) in c.signature() {
        let value = hom.apply(&op_constant(c, &name)?)?.clone();
        consts.push(OpConstant { name, arity, value });
    }
    let rep = RepresentedAlgebra::new(d.clone(), consts)?;
    let elems = c
        .elements()
        .ok_or_else(|| Error::Internal("expansion needs an enumerable source".into()))?;
    for (name, m) in c.signature() {
        let mut idx = vec![0usize; m];
        loop {
            let args: Vec<C::Elem> = idx.iter().map(|&i| elems[i].clone()).collect();
            let lhs = hom.apply(&c.sigma(&name, &args)?)?;
            let mapped: Vec<D::Elem> = args
                .iter()
                .map(|a| hom.apply(a).cloned())
                .collect::<Result<_>>()?;
            if lhs != &rep.sigma(&name, &mapped)? {
                return Err(Error::InvalidHom(format!(
                    "expansion does not commute with {name}"
                )));
            }
            if !advance(&mut idx, elems.len()) {
                break;
            }
        }
    }
    Ok(rep)
}

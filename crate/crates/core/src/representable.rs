//! Representable functions on a finite handle and the second-order
//! realization they induce.
//!
//! A k-ary function f on the element set of a handle is *representable* when
//! it is a substitution section: f(xs) = q_k(a, xs) for a fixed anchor a of
//! dimension at most k. The anchor is forced to be f(e1..ek), so the test is
//! a dimension check followed by an exhaustive comparison.
//!
//! Materializing every anchor as an operation table over a derived universe
//! (one symbol per element) turns the handle into a block section again;
//! `rep_iso_check` verifies that the passage a -> block of q_.(a, ..) is
//! injective and preserves the constants and every substitution operator.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::block_algebra::q_blocks;
use crate::error::{Error, Result};
use crate::handle::{CloneAlgebra, Dimension};
use crate::ops::{Block, OpTable};
use crate::universe::FinUniverse;

/// Elements of dimension at most `k`, in section order.
pub fn fi_section<H: CloneAlgebra>(h: &H, k: usize) -> Result<Vec<H::Elem>> {
    let elems = h
        .elements()
        .ok_or_else(|| Error::Internal("handle cannot enumerate its elements".into()))?;
    let mut out = Vec::new();
    for a in elems {
        if h.dimension(&a)?.at_most(k) {
            out.push(a);
        }
    }
    Ok(out)
}

/// The anchor representing `f` at width `k`, when one exists.
///
/// The only candidate is `f(e1..ek)`; `None` means its dimension exceeds `k`
/// or some argument tuple disagrees with the substitution section.
pub fn representable_anchor<H: CloneAlgebra>(
    h: &H,
    k: usize,
    mut f: impl FnMut(&[H::Elem]) -> Result<H::Elem>,
) -> Result<Option<H::Elem>> {
    let elems = h
        .elements()
        .ok_or_else(|| Error::Internal("handle cannot enumerate its elements".into()))?;
    let es: Vec<H::Elem> = (1..=k).map(|i| h.e(i)).collect::<Result<_>>()?;
    let anchor = f(&es)?;
    if !h.dimension(&anchor)?.at_most(k) {
        return Ok(None);
    }
    let mut args = vec![0usize; k];
    let n = elems.len();
    loop {
        let tuple: Vec<H::Elem> = args.iter().map(|&i| elems[i].clone()).collect();
        if f(&tuple)? != h.q(&anchor, &tuple)? {
            return Ok(None);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(Some(anchor));
            }
            i -= 1;
            args[i] += 1;
            if args[i] < n {
                break;
            }
            args[i] = 0;
        }
    }
}

/// The element set of a handle as a derived finite universe, with the
/// machinery to materialize anchors as operation tables over it.
pub struct Representation<H: CloneAlgebra> {
    universe: Arc<FinUniverse>,
    elems: Vec<H::Elem>,
    index: HashMap<H::Elem, usize>,
}

impl<H: CloneAlgebra> Representation<H> {
    pub fn new(h: &H) -> Result<Self> {
        let elems = h
            .elements()
            .ok_or_else(|| Error::Internal("handle cannot enumerate its elements".into()))?;
        let symbols: Vec<String> = (0..elems.len()).map(|i| format!("b{i}")).collect();
        let universe = FinUniverse::new(format!("rep{}", elems.len()), symbols)?;
        let mut index = HashMap::with_capacity(elems.len());
        for (i, a) in elems.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(Error::Internal("duplicate element in section".into()));
            }
        }
        Ok(Representation {
            universe,
            elems,
            index,
        })
    }

    pub fn universe(&self) -> &Arc<FinUniverse> {
        &self.universe
    }

    pub fn elems(&self) -> &[H::Elem] {
        &self.elems
    }

    pub fn position(&self, a: &H::Elem) -> Result<usize> {
        self.index
            .get(a)
            .copied()
            .ok_or_else(|| Error::SectionNotClosed("element is not in the section".into()))
    }

    /// The table of `xs -> q_k(a, xs)` over the derived universe.
    pub fn section_table(&self, h: &H, a: &H::Elem, k: usize) -> Result<OpTable> {
        let mut escaped = None;
        let table = OpTable::from_fn(self.universe.clone(), k, |args| {
            if escaped.is_some() {
                return 0;
            }
            let tuple: Vec<H::Elem> = args.iter().map(|&i| self.elems[i].clone()).collect();
            match h.q(a, &tuple).and_then(|v| self.position(&v)) {
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
    }

    /// The block of the representable function anchored at `a`, taken at the
    /// anchor's own dimension.
    pub fn rep_block(&self, h: &H, a: &H::Elem) -> Result<Block> {
        let Dimension::Finite(d) = h.dimension(a)? else {
            return Err(Error::Internal(
                "cannot materialize an anchor of unbounded dimension".into(),
            ));
        };
        Ok(Block::canonicalize(&self.section_table(h, a, d)?))
    }
}

/// Outcome of checking that anchors embed as a block section.
#[derive(Debug, Clone, Serialize)]
pub struct RepIsoReport {
    pub handle: String,
    pub elements: usize,
    pub max_width: usize,
    pub injective: bool,
    pub constants_ok: bool,
    pub q_instances: u64,
    pub q_failures: u64,
    /// First disagreements found, capped.
    pub failures: Vec<String>,
}

impl RepIsoReport {
    pub fn passed(&self) -> bool {
        self.injective && self.constants_ok && self.q_failures == 0
    }
}

impl fmt::Display for RepIsoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} | {} elements", self.handle, self.elements)?;
        writeln!(
            f,
            "  injective: {} | constants preserved: {} | q preserved: {}/{} instances",
            self.injective,
            self.constants_ok,
            self.q_instances - self.q_failures,
            self.q_instances
        )?;
        for line in &self.failures {
            writeln!(f, "  ! {line}")?;
        }
        write!(
            f,
            "{}",
            if self.passed() {
                "section embeds as its own representable functions"
            } else {
                "representation check failed"
            }
        )
    }
}

const FAILURE_CAP: usize = 20;

/// Verifies that `a -> rep_block(a)` is an isomorphism onto a block section:
/// injective, sends `e(i)` to the i-th projection block, and turns every
/// `q_n` for n up to `max_n` into block substitution.
pub fn rep_iso_check<H: CloneAlgebra>(h: &H, max_n: usize) -> Result<RepIsoReport> {
    if let Some(bound) = h.dim_bound() {
        if max_n > bound {
            return Err(Error::CapExceeded {
                cap: bound,
                needed: max_n,
                what: "representation check width".into(),
            });
        }
    }
    let rep = Representation::new(h)?;
    let mut failures: Vec<String> = Vec::new();
    let mut images: Vec<Block> = Vec::with_capacity(rep.elems.len());
    for a in rep.elems() {
        images.push(rep.rep_block(h, a)?);
    }

    let mut seen: HashMap<&Block, usize> = HashMap::new();
    let mut injective = true;
    for (i, b) in images.iter().enumerate() {
        if let Some(&j) = seen.get(b) {
            injective = false;
            if failures.len() < FAILURE_CAP {
                failures.push(format!(
                    "anchors {} and {} share the image {b}",
                    h.label(&rep.elems[j]),
                    h.label(&rep.elems[i])
                ));
            }
        } else {
            seen.insert(b, i);
        }
    }

    let mut constants_ok = true;
    for i in 1..=max_n {
        let img = &images[rep.position(&h.e(i)?)?];
        let proj = Block::projection(rep.universe.clone(), i)?;
        if img != &proj {
            constants_ok = false;
            if failures.len() < FAILURE_CAP {
                failures.push(format!("e{i} maps to {img}, not the projection block"));
            }
        }
    }

    let mut q_instances = 0u64;
    let mut q_failures = 0u64;
    let count = rep.elems.len();
    for n in 0..=max_n {
        let mut args = vec![0usize; n];
        'tuples: loop {
            for a in 0..count {
                let tuple: Vec<H::Elem> =
                    args.iter().map(|&i| rep.elems[i].clone()).collect();
                let direct = h.q(&rep.elems[a], &tuple)?;
                let lhs = &images[rep.position(&direct)?];
                let bs: Vec<Block> = args.iter().map(|&i| images[i].clone()).collect();
                let rhs = q_blocks(&images[a], &bs)?;
                q_instances += 1;
                if lhs != &rhs {
                    q_failures += 1;
                    if failures.len() < FAILURE_CAP {
                        failures.push(format!(
                            "q_{n} at {} maps to {lhs} but block substitution gives {rhs}",
                            h.label(&rep.elems[a])
                        ));
                    }
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break 'tuples;
                }
                i -= 1;
                args[i] += 1;
                if args[i] < count {
                    break;
                }
                args[i] = 0;
            }
        }
    }

    Ok(RepIsoReport {
        handle: h.describe(),
        elements: count,
        max_width: max_n,
        injective,
        constants_ok,
        q_instances,
        q_failures,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FinAlgebra;
    use crate::block_algebra::BlockAlgebra;
    use crate::clone::{term_clone, ClonePresentation};
    use crate::handle::MutatedQ;
    use crate::universe::FinUniverse;

    fn nand_handle(cap: usize) -> BlockAlgebra {
        let u = FinUniverse::numeric("bool", 2).unwrap();
        let nand = OpTable::new(u.clone(), 2, vec![1, 1, 1, 0]).unwrap();
        let a = FinAlgebra::new(u, vec![("nand".into(), nand)]).unwrap();
        BlockAlgebra::new(term_clone(&a, cap).unwrap()).unwrap()
    }

    fn projections_handle(cap: usize) -> BlockAlgebra {
        let u = FinUniverse::numeric("bool", 2).unwrap();
        let a = FinAlgebra::new(u, vec![]).unwrap();
        let pres = ClonePresentation::new(a, vec![], vec![], cap).unwrap();
        BlockAlgebra::new(crate::clone::clone_close(&pres).unwrap()).unwrap()
    }

    #[test]
    fn dimension_filters_the_section() {
        let h = nand_handle(2);
        assert_eq!(fi_section(&h, 0).unwrap().len(), 2);
        assert_eq!(fi_section(&h, 1).unwrap().len(), 4);
        assert_eq!(fi_section(&h, 2).unwrap().len(), 16);
    }

    #[test]
    fn substitution_sections_are_representable() {
        let h = nand_handle(2);
        let nand = h.sigma_block("nand").unwrap();
        let anchor = representable_anchor(&h, 2, |xs| h.q(&nand, xs))
            .unwrap()
            .expect("a substitution section must be representable");
        assert_eq!(anchor, nand);
    }

    #[test]
    fn a_tweaked_section_is_not_representable() {
        let h = nand_handle(2);
        let c0 = h
            .elements()
            .unwrap()
            .into_iter()
            .find(|b| b.arity() == 0)
            .unwrap();
        let c1 = h
            .elements()
            .unwrap()
            .into_iter()
            .filter(|b| b.arity() == 0)
            .nth(1)
            .unwrap();
        // constant except at one point: the anchor f(e1) = c0 predicts c0
        let got = representable_anchor(&h, 1, |xs| {
            Ok(if xs[0] == c0 { c1.clone() } else { c0.clone() })
        })
        .unwrap();
        assert!(got.is_none());
    }

    #[test]
    fn anchor_dimension_above_the_width_fails_fast() {
        let h = nand_handle(2);
        let nand = h.sigma_block("nand").unwrap();
        // constantly nand: the forced anchor has dimension 2 > 1
        let got = representable_anchor(&h, 1, |_| Ok(nand.clone())).unwrap();
        assert!(got.is_none());
    }

    #[test]
    fn rep_block_of_a_constant_is_a_constant_block() {
        let h = nand_handle(2);
        let rep = Representation::new(&h).unwrap();
        let c0 = h
            .elements()
            .unwrap()
            .into_iter()
            .find(|b| b.arity() == 0)
            .unwrap();
        let b = rep.rep_block(&h, &c0).unwrap();
        assert_eq!(b.arity(), 0);
        assert_eq!(b.generator().table(), &[rep.position(&c0).unwrap()]);
    }

    #[test]
    fn rep_block_of_a_projection_is_a_projection() {
        let h = nand_handle(2);
        let rep = Representation::new(&h).unwrap();
        for i in 1..=2 {
            let b = rep.rep_block(&h, &h.e(i).unwrap()).unwrap();
            assert_eq!(b, Block::projection(rep.universe().clone(), i).unwrap());
        }
    }

    #[test]
    fn the_section_embeds_as_representable_functions() {
        let report = rep_iso_check(&nand_handle(2), 2).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.elements, 16);
        assert_eq!(report.q_instances, 16 + 16 * 16 + 16 * 16 * 16);
    }

    #[test]
    fn the_projection_section_embeds() {
        let report = rep_iso_check(&projections_handle(3), 3).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.elements, 3);
    }

    #[test]
    fn a_planted_fault_breaks_the_embedding() {
        let h = nand_handle(2);
        let u = h.section().universe().clone();
        let nand = h.sigma_block("nand").unwrap();
        let not = Block::canonicalize(&OpTable::new(u, 1, vec![1, 0]).unwrap());
        let broken = MutatedQ::new(h, nand, vec![not.clone(), not.clone()], not);
        let report = rep_iso_check(&broken, 2).unwrap();
        assert!(!report.passed());
        assert!(report.q_failures > 0 || !report.injective || !report.constants_ok);
    }

    #[test]
    fn width_above_the_bound_is_rejected() {
        let err = rep_iso_check(&nand_handle(2), 3).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn report_serializes() {
        let report = rep_iso_check(&projections_handle(2), 2).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"injective\":true"));
    }
}

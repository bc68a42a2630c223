//! Central elements and direct decompositions.
//!
//! The functions here work on finite algebras that carry a selection
//! structure of width `n`: an `(n+1)`-ary operation `qn` together with
//! nullary operations `e1`, .., `en` satisfying the selection law
//! `qn(ei, x1, .., xn) = xi`. Materialized clone sections and the selector
//! algebras have this shape; so does any direct power of them.
//!
//! An element `c` is `n`-central when the operation `f(x1, .., xn) =
//! qn(c, x1, .., xn)` is a decomposition operation anchored at `c`:
//!
//! * idempotence: `f(x, .., x) = x`,
//! * the diagonal law: `f(f(row1), .., f(rown)) = f(diagonal)` for every
//!   `n` by `n` matrix of elements,
//! * the homomorphism law: `f` commutes with every basic operation applied
//!   columnwise,
//! * the anchor: `f(e1, .., en) = c`.
//!
//! Such a `c` splits the algebra into `n` direct factors: the congruences
//! `theta_i` generated by the pair `(c, ei)` intersect to the identity, and
//! `u = qn(c, a1, .., an)` is the unique element with `u theta_i ai` for
//! every `i`. That characterization is checked directly by the `Factor`
//! route; the `Direct` route checks the decomposition laws themselves. The
//! two agree, and the cheaper one is selected by an instance budget.

use serde::Serialize;

use crate::algebra::FinAlgebra;
use crate::congruence::{congruence_generate, quotient, Congruence};
use crate::error::{Error, Result};
use crate::ops::OpTable;
use crate::universe::Elem;

/// Largest number of law instances the direct route may check before the
/// factor route takes over.
pub const CENTRAL_DIRECT_BUDGET: u64 = 100_000_000;

/// Guard on the width-`n` argument sweep `|A|^n` shared by both routes.
const SWEEP_GUARD: usize = 100_000_000;

/// Which characterization of centrality a check ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityRoute {
    /// Exhaustive check of the decomposition laws.
    Direct,
    /// Factor-congruence check: joint separation plus membership of
    /// `qn(c, ..)` in every class.
    Factor,
}

/// Outcome of a centrality check.
#[derive(Debug, Clone, Serialize)]
pub struct CentralityReport {
    pub element: String,
    pub n: usize,
    pub central: bool,
    pub route: CentralityRoute,
    /// Conditions verified before the verdict; the full count when central,
    /// the count up to the first violation otherwise.
    pub instances: u64,
    pub witness: Option<String>,
}

struct Selection<'a> {
    q: &'a OpTable,
    es: Vec<Elem>,
}

fn selection_ops(a: &FinAlgebra, n: usize) -> Result<Selection<'_>> {
    if n == 0 {
        return Err(Error::MalformedSelection {
            n,
            witness: "width must be positive".into(),
        });
    }
    let q_name = format!("q{n}");
    let q = a.op(&q_name).map_err(|_| Error::MalformedSelection {
        n,
        witness: format!("missing operation {q_name}"),
    })?;
    if q.arity() != n + 1 {
        return Err(Error::MalformedSelection {
            n,
            witness: format!("{q_name} has arity {}, expected {}", q.arity(), n + 1),
        });
    }
    let mut es = Vec::with_capacity(n);
    for i in 1..=n {
        let e_name = format!("e{i}");
        let e = a.op(&e_name).map_err(|_| Error::MalformedSelection {
            n,
            witness: format!("missing operation {e_name}"),
        })?;
        if e.arity() != 0 {
            return Err(Error::MalformedSelection {
                n,
                witness: format!("{e_name} has arity {}, expected 0", e.arity()),
            });
        }
        es.push(e.table()[0]);
    }
    Ok(Selection { q, es })
}

/// `size^n`, guarded against overflow and runaway sweeps.
fn sweep_size(s: usize, n: usize) -> Result<usize> {
    let total = s
        .checked_pow(n as u32)
        .filter(|&t| t <= SWEEP_GUARD)
        .ok_or(Error::SizeGuard {
            size: s,
            guard: SWEEP_GUARD,
        })?;
    Ok(total)
}

fn decode(mut flat: usize, s: usize, n: usize) -> Vec<Elem> {
    let mut out = vec![0usize; n];
    for d in (0..n).rev() {
        out[d] = flat % s;
        flat /= s;
    }
    out
}

fn tuple_symbols(a: &FinAlgebra, digits: &[Elem]) -> String {
    let parts: Vec<&str> = digits.iter().map(|&d| a.universe().symbol(d)).collect();
    format!("({})", parts.join(", "))
}

/// The selection law `qn(ei, x1, .., xn) = xi` must hold before centrality
/// is meaningful; violations are reported as a malformed structure.
fn verify_selection_law(a: &FinAlgebra, n: usize, sel: &Selection) -> Result<()> {
    let s = a.size();
    let rows = sweep_size(s, n)?;
    for (i, &e) in sel.es.iter().enumerate() {
        let slice = &sel.q.table()[e * rows..(e + 1) * rows];
        for (flat, &value) in slice.iter().enumerate() {
            let expect = flat / s.pow((n - 1 - i) as u32) % s;
            if value != expect {
                let args = decode(flat, s, n);
                return Err(Error::MalformedSelection {
                    n,
                    witness: format!(
                        "selection law fails: q{n}(e{}, {}) = {}, expected {}",
                        i + 1,
                        tuple_symbols(a, &args),
                        a.universe().symbol(value),
                        a.universe().symbol(expect),
                    ),
                });
            }
        }
    }
    Ok(())
}

/// Total instance count of the direct route, used to pick a route.
fn direct_cost(a: &FinAlgebra, n: usize) -> u128 {
    let s = a.size() as u128;
    let rows = s.pow(n as u32);
    let mut cost = 1 + s; // anchor + idempotence
    cost += rows.pow(n as u32); // diagonal law
    for (_, op) in a.ops() {
        cost = cost.saturating_add(rows.pow(op.arity() as u32));
    }
    cost
}

/// Checks `n`-centrality of `c`, choosing the cheaper route.
pub fn check_n_central(a: &FinAlgebra, c: Elem, n: usize) -> Result<CentralityReport> {
    let route = if direct_cost(a, n) <= CENTRAL_DIRECT_BUDGET as u128 {
        CentralityRoute::Direct
    } else {
        CentralityRoute::Factor
    };
    check_n_central_via(a, c, n, route)
}

/// Checks `n`-centrality of `c` along a fixed route.
pub fn check_n_central_via(
    a: &FinAlgebra,
    c: Elem,
    n: usize,
    route: CentralityRoute,
) -> Result<CentralityReport> {
    let s = a.size();
    if c >= s {
        return Err(Error::ElementOutOfRange { entry: c, size: s });
    }
    let sel = selection_ops(a, n)?;
    verify_selection_law(a, n, &sel)?;
    let (central, instances, witness) = match route {
        CentralityRoute::Direct => direct_route(a, c, n, &sel)?,
        CentralityRoute::Factor => factor_route(a, c, n, &sel)?,
    };
    Ok(CentralityReport {
        element: a.universe().symbol(c).to_string(),
        n,
        central,
        route,
        instances,
        witness,
    })
}

/// Convenience wrapper returning only the verdict.
pub fn is_n_central(a: &FinAlgebra, c: Elem, n: usize) -> Result<bool> {
    Ok(check_n_central(a, c, n)?.central)
}

fn direct_route(
    a: &FinAlgebra,
    c: Elem,
    n: usize,
    sel: &Selection,
) -> Result<(bool, u64, Option<String>)> {
    let s = a.size();
    let rows = sweep_size(s, n)?;
    let f = &sel.q.table()[c * rows..(c + 1) * rows];
    let mut instances: u64 = 0;

    // anchor: f(e1, .., en) = c
    let mut anchor_flat = 0usize;
    for &e in &sel.es {
        anchor_flat = anchor_flat * s + e;
    }
    instances += 1;
    if f[anchor_flat] != c {
        let witness = format!(
            "anchor fails: q{n}(c, e1, .., e{n}) = {}, expected {}",
            a.universe().symbol(f[anchor_flat]),
            a.universe().symbol(c),
        );
        return Ok((false, instances, Some(witness)));
    }

    // idempotence: f(x, .., x) = x
    for x in 0..s {
        let mut flat = 0usize;
        for _ in 0..n {
            flat = flat * s + x;
        }
        instances += 1;
        if f[flat] != x {
            let witness = format!(
                "idempotence fails: f({0}, .., {0}) = {1}",
                a.universe().symbol(x),
                a.universe().symbol(f[flat]),
            );
            return Ok((false, instances, Some(witness)));
        }
    }

    // digit table over argument tuples, shared by the matrix sweeps
    let digits: Vec<Elem> = (0..rows).flat_map(|flat| decode(flat, s, n)).collect();
    let digit = |flat: usize, k: usize| digits[flat * n + k];

    // diagonal law: f(f(row1), .., f(rown)) = f(diagonal)
    let mut idx = vec![0usize; n];
    loop {
        let mut outer = 0usize;
        let mut diag = 0usize;
        for (i, &r) in idx.iter().enumerate() {
            outer = outer * s + f[r];
            diag = diag * s + digit(r, i);
        }
        instances += 1;
        if f[outer] != f[diag] {
            let rows_txt: Vec<String> = idx
                .iter()
                .map(|&r| tuple_symbols(a, &decode(r, s, n)))
                .collect();
            let witness = format!("diagonal law fails at rows [{}]", rows_txt.join(", "));
            return Ok((false, instances, Some(witness)));
        }
        if !advance(&mut idx, rows) {
            break;
        }
    }

    // homomorphism law, one basic operation at a time: applying f to the
    // columnwise images equals the rowwise image under f
    for (name, op) in a.ops() {
        let m = op.arity();
        let g = op.table();
        let mut idx = vec![0usize; m];
        loop {
            let mut lhs_flat = 0usize;
            for k in 0..n {
                let mut col = 0usize;
                for &r in &idx {
                    col = col * s + digit(r, k);
                }
                lhs_flat = lhs_flat * s + g[col];
            }
            let mut rhs_flat = 0usize;
            for &r in &idx {
                rhs_flat = rhs_flat * s + f[r];
            }
            instances += 1;
            if f[lhs_flat] != g[rhs_flat] {
                let rows_txt: Vec<String> = idx
                    .iter()
                    .map(|&r| tuple_symbols(a, &decode(r, s, n)))
                    .collect();
                let witness = format!(
                    "homomorphism law fails for {name} at rows [{}]",
                    rows_txt.join(", ")
                );
                return Ok((false, instances, Some(witness)));
            }
            if !advance(&mut idx, rows) {
                break;
            }
        }
    }

    Ok((true, instances, None))
}

/// Odometer step over `idx` with every digit below `bound`; false when the
/// sweep is exhausted. An empty `idx` visits its single tuple once.
pub(crate) fn advance(idx: &mut [usize], bound: usize) -> bool {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < bound {
            return true;
        }
        idx[d] = 0;
    }
    false
}

fn factor_route(
    a: &FinAlgebra,
    c: Elem,
    n: usize,
    sel: &Selection,
) -> Result<(bool, u64, Option<String>)> {
    let s = a.size();
    let rows = sweep_size(s, n)?;
    let f = &sel.q.table()[c * rows..(c + 1) * rows];
    let thetas = factor_congruences_with(a, c, &sel.es)?;
    let mut instances: u64 = n as u64;

    // joint separation: the congruences intersect to the identity
    let mut meet = thetas[0].clone();
    for th in &thetas[1..] {
        meet = meet.meet(th);
    }
    instances += 1;
    if meet.class_count() != s {
        let pair = meet
            .classes()
            .into_iter()
            .find(|class| class.len() > 1)
            .expect("a non-identity congruence has a fat class");
        let witness = format!(
            "factor congruences do not separate {} and {}",
            a.universe().symbol(pair[0]),
            a.universe().symbol(pair[1]),
        );
        return Ok((false, instances, Some(witness)));
    }

    // membership: u = qn(c, a1, .., an) lies in the theta_i class of ai for
    // every i; uniqueness of u follows from joint separation
    for flat in 0..rows {
        let args = decode(flat, s, n);
        let u = f[flat];
        for (i, th) in thetas.iter().enumerate() {
            instances += 1;
            if !th.related(u, args[i]) {
                let witness = format!(
                    "q{n}(c, {}) = {} is not theta_{}-related to {}",
                    tuple_symbols(a, &args),
                    a.universe().symbol(u),
                    i + 1,
                    a.universe().symbol(args[i]),
                );
                return Ok((false, instances, Some(witness)));
            }
        }
    }

    Ok((true, instances, None))
}

fn factor_congruences_with(a: &FinAlgebra, c: Elem, es: &[Elem]) -> Result<Vec<Congruence>> {
    es.iter()
        .map(|&e| congruence_generate(a, &[(c, e)]))
        .collect()
}

/// The congruences `theta_i` generated by the pairs `(c, ei)` for `i = 1..n`.
/// When `c` is `n`-central these are the factor congruences of the direct
/// decomposition induced by `c`.
pub fn factor_congruences(a: &FinAlgebra, c: Elem, n: usize) -> Result<Vec<Congruence>> {
    let s = a.size();
    if c >= s {
        return Err(Error::ElementOutOfRange { entry: c, size: s });
    }
    let sel = selection_ops(a, n)?;
    factor_congruences_with(a, c, &sel.es)
}

/// All widths `m` at which `c` is `m`-central, among the widths whose
/// selection structure (`qm` with `e1`, .., `em`) is present.
pub fn central_range(a: &FinAlgebra, c: Elem) -> Result<Vec<usize>> {
    let mut widths: Vec<usize> = a
        .signature()
        .iter()
        .filter_map(|(name, _)| name.strip_prefix('q').and_then(|t| t.parse().ok()))
        .filter(|&m| m >= 1)
        .collect();
    widths.sort_unstable();
    widths.dedup();
    let mut out = Vec::new();
    for m in widths {
        if check_n_central(a, c, m)?.central {
            out.push(m);
        }
    }
    Ok(out)
}

/// A verified direct decomposition along a central element.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub factors: Vec<FinAlgebra>,
    pub congruences: Vec<Congruence>,
    /// For each element, its class in every factor congruence. The map
    /// `x -> assignment[x]` is an isomorphism onto the direct product of
    /// the factors.
    pub assignment: Vec<Vec<usize>>,
    pub product: FinAlgebra,
}

impl Decomposition {
    pub fn factor_sizes(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.size()).collect()
    }
}

/// Splits `a` into the direct factors induced by the `n`-central element
/// `c` and re-verifies that the canonical map is an isomorphism onto the
/// product of the quotients.
pub fn decompose(a: &FinAlgebra, c: Elem, n: usize) -> Result<Decomposition> {
    let report = check_n_central(a, c, n)?;
    if !report.central {
        return Err(Error::NotCentral {
            n,
            witness: report.witness.unwrap_or_else(|| "no witness".into()),
        });
    }
    let thetas = factor_congruences(a, c, n)?;
    let factors: Vec<FinAlgebra> = thetas
        .iter()
        .map(|th| quotient(a, th))
        .collect::<Result<_>>()?;
    let refs: Vec<&FinAlgebra> = factors.iter().collect();
    let product = FinAlgebra::product(&format!("{}*", a.universe().name()), &refs)?;
    let s = a.size();
    let assignment: Vec<Vec<usize>> = (0..s)
        .map(|x| thetas.iter().map(|th| th.class_of(x)).collect())
        .collect();

    // encode an element by its class tuple, leftmost factor most significant
    let enc = |x: Elem| -> Elem {
        let mut out = 0usize;
        for (th, fac) in thetas.iter().zip(&factors) {
            out = out * fac.size() + th.class_of(x);
        }
        out
    };
    if product.size() != s {
        return Err(Error::Internal(format!(
            "decomposition product has {} elements, source has {s}",
            product.size()
        )));
    }
    let mut seen = vec![false; s];
    for x in 0..s {
        let img = enc(x);
        if seen[img] {
            return Err(Error::Internal(
                "decomposition map is not injective".into(),
            ));
        }
        seen[img] = true;
    }
    for (name, op) in a.ops() {
        let m = op.arity();
        let mut idx = vec![0usize; m];
        loop {
            let value = op.evaluate(&idx)?;
            let mapped: Vec<Elem> = idx.iter().map(|&x| enc(x)).collect();
            if product.op(name)?.evaluate(&mapped)? != enc(value) {
                return Err(Error::Internal(format!(
                    "decomposition map does not commute with {name}"
                )));
            }
            if !advance(&mut idx, s) {
                break;
            }
        }
    }
    Ok(Decomposition {
        factors,
        congruences: thetas,
        assignment,
        product,
    })
}

/// The algebra of `n`-partitions of an `x`-element set: functions from the
/// set into the `n` selectors, with pointwise selection. This is the `x`-th
/// direct power of the `n`-element selector algebra; the `i`-th block of
/// the partition named by an element is the preimage of `ei`.
pub fn npartition_algebra(n: usize, x: usize) -> Result<FinAlgebra> {
    crate::algebra::selector_algebra(n)?.power(x, &format!("npart{n}_{x}"))
}

/// Verdict of the everywhere-central check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NbaVerdict {
    /// Every element is `n`-central.
    Nba { elements: usize },
    /// Some element is not `n`-central.
    NotNba { witness: String },
}

/// Checks whether every element of `a` is `n`-central, i.e. whether the
/// selection structure makes `a` an `n`-dimensional Boolean-like algebra.
/// A missing or law-breaking selection structure is an error, not a
/// negative verdict.
pub fn is_nba(a: &FinAlgebra, n: usize) -> Result<NbaVerdict> {
    let sel = selection_ops(a, n)?;
    verify_selection_law(a, n, &sel)?;
    for c in 0..a.size() {
        let report = check_n_central(a, c, n)?;
        if !report.central {
            return Ok(NbaVerdict::NotNba {
                witness: format!(
                    "{} is not {n}-central: {}",
                    report.element,
                    report.witness.unwrap_or_else(|| "no witness".into()),
                ),
            });
        }
    }
    Ok(NbaVerdict::Nba {
        elements: a.size(),
    })
}

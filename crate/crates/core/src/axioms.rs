//! Equational laws of the substitution operators, checked over a finite
//! handle either exhaustively or by seeded random sampling.
//!
//! With q_n the width-n substitution, e_i the distinguished constants and
//! sigma ranging over the basic operations, the core laws are
//!
//! ```text
//! C1  q_n(e_i, x1..xn) = x_i                               (1 <= i <= n)
//! C2  q_n(e_j, x1..xn) = e_j                               (j > n)
//! C3  q_n(x, e1..en) = x
//! C4  q_k(x, y1..yk) = q_n(x, y1..yk, e(k+1)..e(n))        (k < n)
//! C5  q_n(q_n(x, ys), zs) = q_n(x, q_n(y1, zs)..q_n(yn, zs))
//! C6  q_n(sigma(xs), ys) = sigma(q_n(x1, ys)..q_n(xm, ys))
//! ```
//!
//! together with the derived laws
//!
//! ```text
//! Q-LT       q_k(q_n(x, ys), zs) = q_k(x, q_k(y1, zs)..q_k(yn, zs), z(n+1)..zk)   (n < k)
//! Q-GE       q_k(q_n(x, ys), zs) = q_n(x, q_k(y1, zs)..q_k(yn, zs))               (n > k)
//! DIM-DROP   dim q_n(a, bs) <= max(dim a, dim b1, .., dim bn)
//! DIM-BOUND  dim a is within the handle's declared bound
//! ```
//!
//! Exhaustive mode interns the quantification domain plus the needed
//! constants and materializes flat lookup tables for every q_n and sigma, so
//! the law sweeps are pure index arithmetic. The domain must be substitution
//! closed: a quantified subterm whose value leaves the interned universe
//! aborts the check with [`Error::SectionNotClosed`].

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::handle::CloneAlgebra;

/// How a law sweep quantifies its variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckMode {
    /// Every instance with substitution width up to `max_n`.
    Exhaustive { max_n: usize },
    /// `per_law` seeded random instances per law, width up to `max_n`.
    Sampled {
        max_n: usize,
        per_law: usize,
        seed: u64,
    },
}

impl CheckMode {
    pub fn max_n(&self) -> usize {
        match self {
            CheckMode::Exhaustive { max_n } => *max_n,
            CheckMode::Sampled { max_n, .. } => *max_n,
        }
    }
}

const SAMPLE_CAP: usize = 8;
const REPORT_CAP: usize = 50;

pub const LAW_CODES: [&str; 10] = [
    "C1", "C2", "C3", "C4", "C5", "C6", "Q-LT", "Q-GE", "DIM-DROP", "DIM-BOUND",
];

fn law_statement(code: &str) -> &'static str {
    match code {
        "C1" => "substituting into the i-th constant selects the i-th argument",
        "C2" => "constants above the substitution width are fixed points",
        "C3" => "substituting the matching constant tuple changes nothing",
        "C4" => "padding with trailing constants changes nothing",
        "C5" => "equal-width substitutions compose",
        "C6" => "substitution commutes with every basic operation",
        "Q-LT" => "a narrower substitution followed by a wider one merges",
        "Q-GE" => "a wider substitution followed by a narrower one merges",
        "DIM-DROP" => "substitution never raises dimension",
        "DIM-BOUND" => "every dimension is within the declared bound",
        _ => "",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub law: String,
    pub statement: String,
    pub instances: u64,
    pub violations: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub law: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub handle: String,
    pub domain_size: usize,
    pub max_width: usize,
    pub mode: String,
    pub laws: Vec<LawReport>,
    /// First violations found, capped; counts are exact in `laws`.
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.violations == 0)
    }

    pub fn total_instances(&self) -> u64 {
        self.laws.iter().map(|l| l.instances).sum()
    }

    pub fn total_violations(&self) -> u64 {
        self.laws.iter().map(|l| l.violations).sum()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} | {} | domain {}", self.handle, self.mode, self.domain_size)?;
        for l in &self.laws {
            writeln!(
                f,
                "  {:<9} {:>12} instances {:>6} violations  {}",
                l.law, l.instances, l.violations, l.statement
            )?;
        }
        for v in &self.violations {
            writeln!(f, "  ! {}: {}", v.law, v.detail)?;
        }
        if self.passed() {
            write!(f, "all laws hold ({} instances)", self.total_instances())
        } else {
            write!(f, "{} violations", self.total_violations())
        }
    }
}

/// Per-law accumulator used by both sweep styles.
#[derive(Debug, Default)]
struct Acc {
    instances: u64,
    violations: u64,
    samples: Vec<String>,
}

impl Acc {
    fn hit(&mut self, detail: impl FnOnce() -> String) {
        self.violations += 1;
        if self.samples.len() < SAMPLE_CAP {
            self.samples.push(detail());
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.instances += other.instances;
        self.violations += other.violations;
        self.samples.extend(other.samples);
        self.samples.truncate(SAMPLE_CAP);
        self
    }
}

/// Checks the laws over `h.elements()`.
pub fn check_axioms_all<H: CloneAlgebra + Sync>(h: &H, mode: &CheckMode) -> Result<AxiomReport> {
    let domain = h
        .elements()
        .ok_or_else(|| Error::Internal("handle cannot enumerate its elements".into()))?;
    check_axioms(h, &domain, mode)
}

/// Checks the laws with all quantified variables ranging over `domain`.
pub fn check_axioms<H: CloneAlgebra + Sync>(
    h: &H,
    domain: &[H::Elem],
    mode: &CheckMode,
) -> Result<AxiomReport> {
    if domain.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let max_n = mode.max_n();
    if let Some(bound) = h.dim_bound() {
        if max_n > bound {
            return Err(Error::CapExceeded {
                cap: bound,
                needed: max_n,
                what: "axiom check width".into(),
            });
        }
    }
    let (laws, mode_desc) = match mode {
        CheckMode::Exhaustive { .. } => (run_exhaustive(h, domain, max_n)?, "exhaustive".to_string()),
        CheckMode::Sampled { per_law, seed, .. } => (
            run_sampled(h, domain, max_n, *per_law, *seed)?,
            format!("sampled(per_law={per_law}, seed={seed})"),
        ),
    };
    let mut reports = Vec::with_capacity(laws.len());
    let mut violations = Vec::new();
    for (code, acc) in LAW_CODES.iter().zip(laws) {
        reports.push(LawReport {
            law: code.to_string(),
            statement: law_statement(code).to_string(),
            instances: acc.instances,
            violations: acc.violations,
        });
        for detail in acc.samples {
            if violations.len() < REPORT_CAP {
                violations.push(Violation {
                    law: code.to_string(),
                    detail,
                });
            }
        }
    }
    Ok(AxiomReport {
        handle: h.describe(),
        domain_size: domain.len(),
        max_width: max_n,
        mode: mode_desc,
        laws: reports,
        violations,
    })
}

/// Calls `f` once for every base-`d` tuple of length `n`, most significant
/// digit first.
fn for_tuples(d: usize, n: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut digits = vec![0usize; n];
    if n == 0 {
        return f(&digits);
    }
    loop {
        f(&digits)?;
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < d {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn decode(mut flat: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0usize; n];
    for i in (0..n).rev() {
        out[i] = flat % d;
        flat /= d;
    }
    out
}

fn urow(digits: &[usize], u: usize) -> usize {
    digits.iter().fold(0, |r, &b| r * u + b)
}

/// Interned element universe plus flat substitution tables.
struct Tables<'h, H: CloneAlgebra> {
    h: &'h H,
    items: Vec<H::Elem>,
    /// Quantifiable prefix: ids below `u` have table rows.
    u: usize,
    /// Domain prefix: quantified variables range over ids below `d`.
    d: usize,
    max_n: usize,
    e_ids: Vec<usize>,
    /// `q[n][a * u^n + row]` with `row` the base-u encoding of the argument
    /// ids, leftmost most significant. Values may name interned ids >= u.
    q: Vec<Vec<u32>>,
    sig: Vec<(String, usize, Vec<u32>)>,
    /// `None` encodes a dimension past the handle's bound.
    dims: Vec<Option<usize>>,
}

fn intern<T: Clone + Eq + std::hash::Hash>(
    items: &mut Vec<T>,
    index: &mut HashMap<T, u32>,
    x: T,
) -> u32 {
    if let Some(&id) = index.get(&x) {
        return id;
    }
    let id = items.len() as u32;
    index.insert(x.clone(), id);
    items.push(x);
    id
}

impl<'h, H: CloneAlgebra> Tables<'h, H> {
    fn build(h: &'h H, domain: &[H::Elem], max_n: usize) -> Result<Self> {
        let mut items: Vec<H::Elem> = Vec::new();
        let mut index: HashMap<H::Elem, u32> = HashMap::new();
        for x in domain {
            if index.contains_key(x) {
                return Err(Error::Internal(format!(
                    "duplicate domain element {}",
                    h.label(x)
                )));
            }
            intern(&mut items, &mut index, x.clone());
        }
        let d = items.len();
        let mut e_ids = Vec::with_capacity(max_n);
        for i in 1..=max_n {
            e_ids.push(intern(&mut items, &mut index, h.e(i)?) as usize);
        }
        let u = items.len();
        let mut q = Vec::with_capacity(max_n + 1);
        let mut args: Vec<H::Elem> = Vec::with_capacity(max_n);
        for n in 0..=max_n {
            let rows = u.pow(n as u32);
            let mut table = vec![0u32; u * rows];
            for a in 0..u {
                let av = items[a].clone();
                for_tuples(u, n, |bs| {
                    args.clear();
                    args.extend(bs.iter().map(|&b| items[b].clone()));
                    let v = h.q(&av, &args)?;
                    table[a * rows + urow(bs, u)] = intern(&mut items, &mut index, v);
                    Ok(())
                })?;
            }
            q.push(table);
        }
        let mut sig = Vec::new();
        for (name, m) in h.signature() {
            let rows = u.pow(m as u32);
            let mut table = vec![0u32; rows];
            for_tuples(u, m, |xs| {
                args.clear();
                args.extend(xs.iter().map(|&x| items[x].clone()));
                let v = h.sigma(&name, &args)?;
                table[urow(xs, u)] = intern(&mut items, &mut index, v);
                Ok(())
            })?;
            sig.push((name, m, table));
        }
        let mut dims = Vec::with_capacity(items.len());
        for x in &items {
            dims.push(h.dimension(x)?.finite());
        }
        Ok(Tables {
            h,
            items,
            u,
            d,
            max_n,
            e_ids,
            q,
            sig,
            dims,
        })
    }

    fn rows(&self, n: usize) -> usize {
        self.u.pow(n as u32)
    }

    fn lbl(&self, id: usize) -> String {
        self.h.label(&self.items[id])
    }

    fn lbls(&self, ids: &[usize]) -> String {
        ids.iter().map(|&b| self.lbl(b)).collect::<Vec<_>>().join(", ")
    }

    fn escape(&self, id: usize) -> Error {
        Error::SectionNotClosed(format!(
            "value {} leaves the quantified universe",
            self.lbl(id)
        ))
    }

    /// Guards a table value before it is used as a table index again.
    fn inner(&self, id: u32) -> Result<usize> {
        let id = id as usize;
        if id < self.u {
            Ok(id)
        } else {
            Err(self.escape(id))
        }
    }
}

fn run_exhaustive<H: CloneAlgebra + Sync>(
    h: &H,
    domain: &[H::Elem],
    max_n: usize,
) -> Result<Vec<Acc>> {
    let t = Tables::build(h, domain, max_n)?;
    Ok(vec![
        law_c1(&t)?,
        law_c2(&t)?,
        law_c3(&t)?,
        law_c4(&t)?,
        law_c5(&t)?,
        law_c6(&t)?,
        law_q_lt(&t)?,
        law_q_ge(&t)?,
        law_dim_drop(&t)?,
        law_dim_bound(&t)?,
    ])
}

fn law_c1<H: CloneAlgebra>(t: &Tables<H>) -> Result<Acc> {
    let (u, d) = (t.u, t.d);
    let mut acc = Acc::default();
    for n in 1..=t.max_n {
        let rows = t.rows(n);
        let qn = &t.q[n];
        for i in 1..=n {
            let e = t.e_ids[i - 1];
            for_tuples(d, n, |xs| {
                let v = qn[e * rows + urow(xs, u)] as usize;
                acc.instances += 1;
                if v != xs[i - 1] {
                    acc.hit(|| {
                        format!(
                            "q_{n}(e{i}; {}) = {} but argument {i} is {}",
                            t.lbls(xs),
                            t.lbl(v),
                            t.lbl(xs[i - 1])
                        )
                    });
                }
                Ok(())
            })?;
        }
    }
    Ok(acc)
}

fn law_c2<H: CloneAlgebra>(t: &Tables<H>) -> Result<Acc> {
    let (u, d) = (t.u, t.d);
    let mut acc = Acc::default();
    for n in 0..=t.max_n {
        let rows = t.rows(n);
        let qn = &t.q[n];
        for j in n + 1..=t.max_n {
            let e = t.e_ids[j - 1];
            for_tuples(d, n, |xs| {
                let v = qn[e * rows + urow(xs, u)] as usize;
                acc.instances += 1;
                if v != e {
                    acc.hit(|| format!("q_{n}(e{j}; {}) = {} not e{j}", t.lbls(xs), t.lbl(v)));
                }
                Ok(())
            })?;
        }
    }
    Ok(acc)
}

fn law_c3<H: CloneAlgebra>(t: &Tables<H>) -> Result<Acc> {
    let u = t.u;
    let mut acc = Acc::default();
    for n in 0..=t.max_n {
        let rows = t.rows(n);
        let qn = &t.q[n];
        let erow = urow(&t.e_ids[..n], u);
        for x in 0..t.d {
            let v = qn[x * rows + erow] as usize;
            acc.instances += 1;
            if v != x {
                acc.hit(|| format!("q_{n}({}; e1..e{n}) = {}", t.lbl(x), t.lbl(v)));
            }
        }
    }
    Ok(acc)
}

fn law_c4<H: CloneAlgebra>(t: &Tables<H>) -> Result<Acc> {
    let (u, d) = (t.u, t.d);
    let mut acc = Acc::default();
    for k in 0..t.max_n {
        for n in k + 1..=t.max_n {
            let (rk, rn) = (t.rows(k), t.rows(n));
            let (qk, qn) = (&t.q[k], &t.q[n]);
            let etail = urow(&t.e_ids[k..n], u);
            let shift = u.pow((n - k) as u32);
            for x in 0..d {
                for_tuples(d, k, |ys| {
                    let yrow = urow(ys, u);
                    let lhs = qk[x * rk + yrow];
                    let rhs = qn[x * rn + yrow * shift + etail];
                    acc.instances += 1;
                    if lhs != rhs {
                        acc.hit(|| {
                            format!(
                                "q_{k}({}; {}) = {} but padding to width {n} gives {}",
                                t.lbl(x),
                                t.lbls(ys),
                                t.lbl(lhs as usize),
                                t.lbl(rhs as usize)
                            )
                        });
                    }
                    Ok(())
                })?;
            }
        }
    }
    Ok(acc)
}

fn law_c5<H: CloneAlgebra + Sync>(t: &Tables<H>) -> Result<Acc> {
    let (u, d) = (t.u, t.d);
    let mut acc = Acc::default();
    for n in 0..=t.max_n {
        let rows = t.rows(n);
        let qn = &t.q[n];
        let ztotal = d.pow(n as u32);
        let part = (0..ztotal)
            .into_par_iter()
            .map(|zflat| -> Result<Acc> {
                let zs = decode(zflat, d, n);
                let zrow = urow(&zs, u);
                let map_z: Vec<u32> = (0..u).map(|v| qn[v * rows + zrow]).collect();
                let mut acc = Acc::default();
                for_tuples(d, n, |ys| {
                    let yrow = urow(ys, u);
                    let mut yprow = 0usize;
                    for &y in ys {
                        yprow = yprow * u + t.inner(map_z[y])?;
                    }
                    for x in 0..d {
                        let v = t.inner(qn[x * rows + yrow])?;
                        let lhs = map_z[v];
                        let rhs = qn[x * rows + yprow];
                        acc.instances += 1;
                        if lhs != rhs {
                            acc.hit(|| {
                                format!(
                                    "q_{n}(q_{n}({}; {}); {}) = {} but inner-mapped form gives {}",
                                    t.lbl(x),
                                    t.lbls(ys),
                                    t.lbls(&zs),
                                    t.lbl(lhs as usize),
                                    t.lbl(rhs as usize)
                                )
                            });
                        }
                    }
                    Ok(())
                })?;
                Ok(acc)
            })
            .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?;
        acc = acc.merge(part);
    }
    Ok(acc)
}

fn law_c6<H: CloneAlgebra + Sync>(t: &Tables<H>) -> Result<Acc> {
    let (u, d) = (t.u, t.d);
    let mut acc = Acc::default();
    for (name, m, table) in &t.sig {
        for n in 0..=t.max_n {
            let rows = t.rows(n);
            let qn = &t.q[n];
            let ytotal = d.pow(n as u32);
            let part = (0..ytotal)
                .into_par_iter()
                .map(|yflat| -> Result<Acc> {
                    let ys = decode(yflat, d, n);
                    let yrow = urow(&ys, u);
                    let map_y: Vec<u32> = (0..u).map(|v| qn[v * rows + yrow]).collect();
                    let mut acc = Acc::default();
                    for_tuples(d, *m, |xs| {
                        let sx = t.inner(table[urow(xs, u)])?;
                        let lhs = map_y[sx];
                        let mut xprow = 0usize;
                        for &x in xs {
                            xprow = xprow * u + t.inner(map_y[x])?;
                        }
                        let rhs = table[xprow];
                        acc.instances += 1;
                        if lhs != rhs {
                            acc.hit(|| {
                                format!(
                                    "q_{n}({name}({}); {}) = {} but {name} of the mapped arguments is {}",
                                    t.lbls(xs),
                                    t.lbls(&ys),
                                    t.lbl(lhs as usize),
                                    t.lbl(rhs as usize)
                                )
                            });
                        }
                        Ok(())
                    })?;
                    Ok(acc)
                })
                .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?;
            acc = acc.merge(part);
        }
    }
    Ok(acc)
}

fn law_q_lt<H: CloneAlgebra + Sync>(t: &Tables<H>) -> Result<Acc> {
    let (u, d) = (t.u, t.d);
    let mut acc = Acc::default();
    for n in 0..t.max_n {
        for k in n + 1..=t.max_n {
            let (rn, rk) = (t.rows(n), t.rows(k));
            let (qn, qk) = (&t.q[n], &t.q[k]);
            let shift = u.pow((k - n) as u32);
            let ztotal = d.pow(k as u32);
            let part = (0..ztotal)
                .into_par_iter()
                .map(|zflat| -> Result<Acc> {
                    let zs = decode(zflat, d, k);
                    let zrow = urow(&zs, u);
                    let map_z: Vec<u32> = (0..u).map(|v| qk[v * rk + zrow]).collect();
                    let ztail = urow(&zs[n..], u);
                    let mut acc = Acc::default();
                    for_tuples(d, n, |ys| {
                        let yrow = urow(ys, u);
                        let mut yprow = 0usize;
                        for &y in ys {
                            yprow = yprow * u + t.inner(map_z[y])?;
                        }
                        let rhsrow = yprow * shift + ztail;
                        for x in 0..d {
                            let v = t.inner(qn[x * rn + yrow])?;
                            let lhs = map_z[v];
                            let rhs = qk[x * rk + rhsrow];
                            acc.instances += 1;
                            if lhs != rhs {
                                acc.hit(|| {
                                    format!(
                                        "q_{k}(q_{n}({}; {}); {}) = {} but widened form gives {}",
                                        t.lbl(x),
                                        t.lbls(ys),
                                        t.lbls(&zs),
                                        t.lbl(lhs as usize),
                                        t.lbl(rhs as usize)
                                    )
                                });
                            }
                        }
                        Ok(())
                    })?;
                    Ok(acc)
                })
                .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?;
            acc = acc.merge(part);
        }
    }
    Ok(acc)
}

fn law_q_ge<H: CloneAlgebra + Sync>(t: &Tables<H>) -> Result<Acc> {
    let (u, d) = (t.u, t.d);
    let mut acc = Acc::default();
    for k in 0..t.max_n {
        for n in k + 1..=t.max_n {
            let (rn, rk) = (t.rows(n), t.rows(k));
            let (qn, qk) = (&t.q[n], &t.q[k]);
            let ztotal = d.pow(k as u32);
            let part = (0..ztotal)
                .into_par_iter()
                .map(|zflat| -> Result<Acc> {
                    let zs = decode(zflat, d, k);
                    let zrow = urow(&zs, u);
                    let map_z: Vec<u32> = (0..u).map(|v| qk[v * rk + zrow]).collect();
                    let mut acc = Acc::default();
                    for_tuples(d, n, |ys| {
                        let yrow = urow(ys, u);
                        let mut yprow = 0usize;
                        for &y in ys {
                            yprow = yprow * u + t.inner(map_z[y])?;
                        }
                        for x in 0..d {
                            let v = t.inner(qn[x * rn + yrow])?;
                            let lhs = map_z[v];
                            let rhs = qn[x * rn + yprow];
                            acc.instances += 1;
                            if lhs != rhs {
                                acc.hit(|| {
                                    format!(
                                        "q_{k}(q_{n}({}; {}); {}) = {} but narrowed form gives {}",
                                        t.lbl(x),
                                        t.lbls(ys),
                                        t.lbls(&zs),
                                        t.lbl(lhs as usize),
                                        t.lbl(rhs as usize)
                                    )
                                });
                            }
                        }
                        Ok(())
                    })?;
                    Ok(acc)
                })
                .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))?;
            acc = acc.merge(part);
        }
    }
    Ok(acc)
}

fn law_dim_drop<H: CloneAlgebra>(t: &Tables<H>) -> Result<Acc> {
    let (u, d) = (t.u, t.d);
    let mut acc = Acc::default();
    for n in 0..=t.max_n {
        let rows = t.rows(n);
        let qn = &t.q[n];
        for a in 0..d {
            let da = t.dims[a];
            for_tuples(d, n, |bs| {
                let v = qn[a * rows + urow(bs, u)] as usize;
                let dv = t.dims[v];
                // None encodes a dimension past every testable index
                let mut bound = da;
                for &b in bs {
                    bound = match (bound, t.dims[b]) {
                        (Some(x), Some(y)) => Some(x.max(y)),
                        _ => None,
                    };
                }
                let bad = match (dv, bound) {
                    (_, None) => false,
                    (None, Some(_)) => true,
                    (Some(x), Some(m)) => x > m,
                };
                acc.instances += 1;
                if bad {
                    acc.hit(|| {
                        format!(
                            "dim q_{n}({}; {}) = {:?} exceeds the argument bound {:?}",
                            t.lbl(a),
                            t.lbls(bs),
                            dv,
                            bound
                        )
                    });
                }
                Ok(())
            })?;
        }
    }
    Ok(acc)
}

fn law_dim_bound<H: CloneAlgebra>(t: &Tables<H>) -> Result<Acc> {
    let mut acc = Acc::default();
    let Some(bound) = t.h.dim_bound() else {
        return Ok(acc);
    };
    for a in 0..t.d {
        acc.instances += 1;
        let ok = matches!(t.dims[a], Some(x) if x <= bound);
        if !ok {
            acc.hit(|| {
                format!(
                    "dim {} = {:?} exceeds the declared bound {bound}",
                    t.lbl(a),
                    t.dims[a]
                )
            });
        }
    }
    Ok(acc)
}

fn run_sampled<H: CloneAlgebra>(
    h: &H,
    domain: &[H::Elem],
    max_n: usize,
    per_law: usize,
    seed: u64,
) -> Result<Vec<Acc>> {
    if per_law == 0 {
        return Err(Error::Internal("per_law must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(LAW_CODES.len());
    for code in LAW_CODES {
        out.push(sample_law(h, domain, max_n, per_law, &mut rng, code)?);
    }
    Ok(out)
}

fn sample_law<H: CloneAlgebra>(
    h: &H,
    domain: &[H::Elem],
    max_n: usize,
    per_law: usize,
    rng: &mut ChaCha8Rng,
    code: &str,
) -> Result<Acc> {
    let mut acc = Acc::default();
    let sig = h.signature();
    let pick = |rng: &mut ChaCha8Rng| domain[rng.gen_range(0..domain.len())].clone();
    let picks = |rng: &mut ChaCha8Rng, n: usize| -> Vec<H::Elem> {
        (0..n).map(|_| domain[rng.gen_range(0..domain.len())].clone()).collect()
    };
    let es = |h: &H, lo: usize, hi: usize| -> Result<Vec<H::Elem>> {
        (lo..=hi).map(|i| h.e(i)).collect()
    };
    for _ in 0..per_law {
        match code {
            "C1" => {
                if max_n == 0 {
                    break;
                }
                let n = rng.gen_range(1..=max_n);
                let i = rng.gen_range(1..=n);
                let xs = picks(rng, n);
                let lhs = h.q(&h.e(i)?, &xs)?;
                acc.instances += 1;
                if lhs != xs[i - 1] {
                    acc.hit(|| format!("q_{n}(e{i}; ..) = {} not argument {i}", h.label(&lhs)));
                }
            }
            "C2" => {
                if max_n == 0 {
                    break;
                }
                let n = rng.gen_range(0..max_n);
                let j = rng.gen_range(n + 1..=max_n);
                let xs = picks(rng, n);
                let e = h.e(j)?;
                let lhs = h.q(&e, &xs)?;
                acc.instances += 1;
                if lhs != e {
                    acc.hit(|| format!("q_{n}(e{j}; ..) = {} not e{j}", h.label(&lhs)));
                }
            }
            "C3" => {
                let n = rng.gen_range(0..=max_n);
                let x = pick(rng);
                let lhs = h.q(&x, &es(h, 1, n)?)?;
                acc.instances += 1;
                if lhs != x {
                    acc.hit(|| format!("q_{n}({}; e1..e{n}) = {}", h.label(&x), h.label(&lhs)));
                }
            }
            "C4" => {
                if max_n == 0 {
                    break;
                }
                let k = rng.gen_range(0..max_n);
                let n = rng.gen_range(k + 1..=max_n);
                let x = pick(rng);
                let ys = picks(rng, k);
                let lhs = h.q(&x, &ys)?;
                let mut padded = ys.clone();
                padded.extend(es(h, k + 1, n)?);
                let rhs = h.q(&x, &padded)?;
                acc.instances += 1;
                if lhs != rhs {
                    acc.hit(|| {
                        format!(
                            "q_{k}({}; ..) = {} but padding to width {n} gives {}",
                            h.label(&x),
                            h.label(&lhs),
                            h.label(&rhs)
                        )
                    });
                }
            }
            "C5" => {
                let n = rng.gen_range(0..=max_n);
                let x = pick(rng);
                let ys = picks(rng, n);
                let zs = picks(rng, n);
                let lhs = h.q(&h.q(&x, &ys)?, &zs)?;
                let mapped: Vec<H::Elem> =
                    ys.iter().map(|y| h.q(y, &zs)).collect::<Result<_>>()?;
                let rhs = h.q(&x, &mapped)?;
                acc.instances += 1;
                if lhs != rhs {
                    acc.hit(|| {
                        format!(
                            "q_{n} composition at {} gives {} vs {}",
                            h.label(&x),
                            h.label(&lhs),
                            h.label(&rhs)
                        )
                    });
                }
            }
            "C6" => {
                if sig.is_empty() {
                    break;
                }
                let (name, m) = sig[rng.gen_range(0..sig.len())].clone();
                let n = rng.gen_range(0..=max_n);
                let xs = picks(rng, m);
                let ys = picks(rng, n);
                let lhs = h.q(&h.sigma(&name, &xs)?, &ys)?;
                let mapped: Vec<H::Elem> =
                    xs.iter().map(|x| h.q(x, &ys)).collect::<Result<_>>()?;
                let rhs = h.sigma(&name, &mapped)?;
                acc.instances += 1;
                if lhs != rhs {
                    acc.hit(|| {
                        format!(
                            "q_{n}({name}(..); ..) = {} vs {}",
                            h.label(&lhs),
                            h.label(&rhs)
                        )
                    });
                }
            }
            "Q-LT" => {
                if max_n == 0 {
                    break;
                }
                let k = rng.gen_range(1..=max_n);
                let n = rng.gen_range(0..k);
                let x = pick(rng);
                let ys = picks(rng, n);
                let zs = picks(rng, k);
                let lhs = h.q(&h.q(&x, &ys)?, &zs)?;
                let mut mapped: Vec<H::Elem> =
                    ys.iter().map(|y| h.q(y, &zs)).collect::<Result<_>>()?;
                mapped.extend_from_slice(&zs[n..]);
                let rhs = h.q(&x, &mapped)?;
                acc.instances += 1;
                if lhs != rhs {
                    acc.hit(|| {
                        format!(
                            "widening q_{n} then q_{k} at {} gives {} vs {}",
                            h.label(&x),
                            h.label(&lhs),
                            h.label(&rhs)
                        )
                    });
                }
            }
            "Q-GE" => {
                if max_n == 0 {
                    break;
                }
                let n = rng.gen_range(1..=max_n);
                let k = rng.gen_range(0..n);
                let x = pick(rng);
                let ys = picks(rng, n);
                let zs = picks(rng, k);
                let lhs = h.q(&h.q(&x, &ys)?, &zs)?;
                let mapped: Vec<H::Elem> =
                    ys.iter().map(|y| h.q(y, &zs)).collect::<Result<_>>()?;
                let rhs = h.q(&x, &mapped)?;
                acc.instances += 1;
                if lhs != rhs {
                    acc.hit(|| {
                        format!(
                            "narrowing q_{n} then q_{k} at {} gives {} vs {}",
                            h.label(&x),
                            h.label(&lhs),
                            h.label(&rhs)
                        )
                    });
                }
            }
            "DIM-DROP" => {
                let n = rng.gen_range(0..=max_n);
                let a = pick(rng);
                let bs = picks(rng, n);
                let v = h.q(&a, &bs)?;
                let dv = h.dimension(&v)?.finite();
                let mut bound = h.dimension(&a)?.finite();
                for b in &bs {
                    bound = match (bound, h.dimension(b)?.finite()) {
                        (Some(x), Some(y)) => Some(x.max(y)),
                        _ => None,
                    };
                }
                let bad = match (dv, bound) {
                    (_, None) => false,
                    (None, Some(_)) => true,
                    (Some(x), Some(m)) => x > m,
                };
                acc.instances += 1;
                if bad {
                    acc.hit(|| {
                        format!(
                            "dim q_{n}({}; ..) = {dv:?} exceeds {bound:?}",
                            h.label(&a)
                        )
                    });
                }
            }
            "DIM-BOUND" => {
                let Some(bound) = h.dim_bound() else { break };
                let a = pick(rng);
                acc.instances += 1;
                let ok = matches!(h.dimension(&a)?, crate::handle::Dimension::Finite(x) if x <= bound);
                if !ok {
                    acc.hit(|| format!("dim {} exceeds the bound {bound}", h.label(&a)));
                }
            }
            _ => unreachable!("unknown law code"),
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FinAlgebra;
    use crate::block_algebra::BlockAlgebra;
    use crate::clone::term_clone;
    use crate::handle::MutatedQ;
    use crate::ops::{Block, OpTable};
    use crate::universe::FinUniverse;

    fn nand_handle(cap: usize) -> BlockAlgebra {
        let u = FinUniverse::numeric("bool", 2).unwrap();
        let nand = OpTable::new(u.clone(), 2, vec![1, 1, 1, 0]).unwrap();
        let a = FinAlgebra::new(u, vec![("nand".into(), nand)]).unwrap();
        BlockAlgebra::new(term_clone(&a, cap).unwrap()).unwrap()
    }

    #[test]
    fn tuple_iteration_covers_the_space() {
        let mut seen = Vec::new();
        for_tuples(3, 2, |t| {
            seen.push((t[0], t[1]));
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], (0, 0));
        assert_eq!(seen[1], (0, 1));
        assert_eq!(seen[8], (2, 2));
        let mut count = 0;
        for_tuples(5, 0, |t| {
            assert!(t.is_empty());
            count += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(count, 1);
    }

    #[test]
    fn decode_matches_urow() {
        for flat in 0..27 {
            let digits = decode(flat, 3, 3);
            assert_eq!(urow(&digits, 3), flat);
        }
    }

    #[test]
    fn exhaustive_laws_hold_on_the_nand_section() {
        let h = nand_handle(2);
        let report = check_axioms_all(&h, &CheckMode::Exhaustive { max_n: 2 }).unwrap();
        assert!(report.passed(), "{report}");
        // law list is complete and every law was exercised
        assert_eq!(report.laws.len(), LAW_CODES.len());
        for l in &report.laws {
            assert!(l.instances > 0, "{} had no instances", l.law);
        }
        // d = 16: C5 has 16 + 16^3 + 16^5 instances
        let c5 = report.laws.iter().find(|l| l.law == "C5").unwrap();
        assert_eq!(c5.instances, 16 + (16u64 << 8) + (16u64 << 16));
    }

    #[test]
    fn exhaustive_instance_counts_are_exact() {
        let h = nand_handle(2);
        let report = check_axioms_all(&h, &CheckMode::Exhaustive { max_n: 2 }).unwrap();
        let d = 16u64;
        let count = |law: &str| {
            report
                .laws
                .iter()
                .find(|l| l.law == law)
                .map(|l| l.instances)
                .unwrap()
        };
        assert_eq!(count("C1"), d + 2 * d * d);
        assert_eq!(count("C2"), 2 + d); // (n=0, j=1..2), (n=1, j=2)
        assert_eq!(count("C3"), 3 * d);
        assert_eq!(count("C4"), d + d + d * d); // (0,1), (0,2), (1,2)
        assert_eq!(count("C6"), d * d + d * d * d + d * d * d * d);
        assert_eq!(count("Q-LT"), d * d + d * d * d + d * d * d * d);
        assert_eq!(count("Q-GE"), d * d + d * d * d + d * d * d * d);
        assert_eq!(count("DIM-DROP"), d + d * d + d * d * d);
        assert_eq!(count("DIM-BOUND"), d);
    }

    #[test]
    fn sampled_laws_hold_on_the_nand_section() {
        let h = nand_handle(3);
        let mode = CheckMode::Sampled {
            max_n: 3,
            per_law: 300,
            seed: 7,
        };
        let report = check_axioms_all(&h, &mode).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.total_instances(), 3000);
        // same seed, same outcome
        let again = check_axioms_all(&h, &mode).unwrap();
        assert_eq!(format!("{report}"), format!("{again}"));
    }

    #[test]
    fn a_planted_fault_is_detected_exhaustively() {
        let h = nand_handle(2);
        let e1 = Block::projection(h.section().universe().clone(), 1).unwrap();
        let not = Block::canonicalize(
            &OpTable::new(h.section().universe().clone(), 1, vec![1, 0]).unwrap(),
        );
        // break q_1(not; e1), which C3 checks directly
        let broken = MutatedQ::new(h, not.clone(), vec![e1.clone()], e1.clone());
        let report = check_axioms_all(&broken, &CheckMode::Exhaustive { max_n: 2 }).unwrap();
        assert!(!report.passed());
        let c3 = report.laws.iter().find(|l| l.law == "C3").unwrap();
        assert!(c3.violations >= 1);
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn a_planted_deep_fault_is_detected() {
        // break a q_2 instance with non-constant arguments; C3 cannot see it,
        // the composition laws must
        let h = nand_handle(2);
        let u = h.section().universe().clone();
        let nand = Block::canonicalize(&OpTable::new(u.clone(), 2, vec![1, 1, 1, 0]).unwrap());
        let not = Block::canonicalize(&OpTable::new(u.clone(), 1, vec![1, 0]).unwrap());
        let broken = MutatedQ::new(
            h,
            nand.clone(),
            vec![not.clone(), not.clone()],
            not.clone(),
        );
        let report = check_axioms_all(&broken, &CheckMode::Exhaustive { max_n: 2 }).unwrap();
        assert!(!report.passed(), "{report}");
        let c3 = report.laws.iter().find(|l| l.law == "C3").unwrap();
        assert_eq!(c3.violations, 0);
    }

    #[test]
    fn sampling_detects_a_widely_planted_fault() {
        // break q_2(nand; e1, e1): many C5/Q-law instances route through it
        let h = nand_handle(2);
        let u = h.section().universe().clone();
        let nand = Block::canonicalize(&OpTable::new(u.clone(), 2, vec![1, 1, 1, 0]).unwrap());
        let e1 = Block::projection(u.clone(), 1).unwrap();
        let broken = MutatedQ::new(h, nand.clone(), vec![e1.clone(), e1.clone()], nand.clone());
        let report = check_axioms_all(
            &broken,
            &CheckMode::Sampled {
                max_n: 2,
                per_law: 2000,
                seed: 3,
            },
        )
        .unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn width_above_the_bound_is_rejected() {
        let h = nand_handle(2);
        let err = check_axioms_all(&h, &CheckMode::Exhaustive { max_n: 3 }).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn restricted_domain_quantifies_over_it_only() {
        let h = nand_handle(3);
        let domain = h.section().members_with_arity_at_most(2);
        assert_eq!(domain.len(), 16);
        let report = check_axioms(&h, &domain, &CheckMode::Exhaustive { max_n: 2 }).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.domain_size, 16);
    }

    #[test]
    fn table_values_match_direct_evaluation() {
        let h = nand_handle(2);
        let domain = h.elements().unwrap();
        let t = Tables::build(&h, &domain, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(0..=2);
            let a = rng.gen_range(0..t.u);
            let bs: Vec<usize> = (0..n).map(|_| rng.gen_range(0..t.u)).collect();
            let via_table = t.q[n][a * t.rows(n) + urow(&bs, t.u)] as usize;
            let args: Vec<Block> = bs.iter().map(|&b| t.items[b].clone()).collect();
            let direct = h.q(&t.items[a], &args).unwrap();
            assert_eq!(t.items[via_table], direct);
        }
    }

    #[test]
    fn report_serializes() {
        let h = nand_handle(2);
        let report = check_axioms_all(&h, &CheckMode::Exhaustive { max_n: 1 }).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"law\":\"C5\""));
    }
}

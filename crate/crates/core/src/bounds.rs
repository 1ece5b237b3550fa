//! Range certification over boxes: the dictionary bound table, the
//! hypothesis constants of the error theorem, and the second-derivative
//! bounds used by the edge arguments.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{sqrt_enclosure, Ival, Rat};
use crate::fields::{
    dictionary, phi, DomainBox, Env, EvalError, Expr, FieldName, FieldSpec, Num, NPHI, NVARS, VAR_A,
};
use crate::topology::{CertKind, Certificate, Check};

pub const DEFAULT_BUDGET: usize = 100_000;
/// Digits kept by outward rounding during box evaluation.
pub const BOX_PREC: u32 = 30;

/// Interval value together with an interval gradient over the active variables.
#[derive(Clone, Debug)]
pub struct Dual {
    pub v: Ival,
    pub g: Vec<Ival>,
}

impl Dual {
    fn var(v: Ival, slot: usize, n: usize) -> Dual {
        let mut g = vec![Ival::zero(); n];
        g[slot] = Ival::point(Rat::one());
        Dual { v, g }
    }
}

fn rnd(v: Ival, prec: Option<u32>) -> Ival {
    match prec {
        Some(d) => v.round_out(d),
        None => v,
    }
}

impl Num for Dual {
    fn konst(c: &Rat, n: usize) -> Dual {
        Dual { v: Ival::point(c.clone()), g: vec![Ival::zero(); n] }
    }

    fn add(&self, o: &Dual) -> Dual {
        Dual { v: self.v.add(&o.v), g: self.g.iter().zip(&o.g).map(|(a, b)| a.add(b)).collect() }
    }

    fn neg(&self) -> Dual {
        Dual { v: self.v.neg(), g: self.g.iter().map(Ival::neg).collect() }
    }

    fn mul(&self, o: &Dual, prec: Option<u32>) -> Dual {
        let g = self
            .g
            .iter()
            .zip(&o.g)
            .map(|(a, b)| {
                let t = match (a.is_zero_point(), b.is_zero_point()) {
                    (true, true) => return Ival::zero(),
                    (true, false) => self.v.mul(b),
                    (false, true) => o.v.mul(a),
                    _ => self.v.mul(b).add(&o.v.mul(a)),
                };
                rnd(t, prec)
            })
            .collect();
        Dual { v: rnd(self.v.mul(&o.v), prec), g }
    }

    fn powi(&self, e: i32, prec: Option<u32>) -> Result<Dual, EvalError> {
        if e == 0 {
            return Ok(Dual::konst(&Rat::one(), self.g.len()));
        }
        let v = <Ival as Num>::powi(&self.v, e, prec)?;
        let d = rnd(<Ival as Num>::powi(&self.v, e - 1, prec)?.scale(&Rat::int(e as i64)), prec);
        let g = self.g.iter().map(|gi| if gi.is_zero_point() { Ival::zero() } else { rnd(d.mul(gi), prec) }).collect();
        Ok(Dual { v, g })
    }

    fn s_inv_pow(s2: &Dual, k: u32, prec: Option<u32>) -> Result<Dual, EvalError> {
        let v = <Ival as Num>::s_inv_pow(&s2.v, k, prec)?;
        let d = <Ival as Num>::s_inv_pow(&s2.v, k + 2, prec)?.scale(&Rat::frac(-(k as i64), 2));
        let g = s2.g.iter().map(|gi| if gi.is_zero_point() { Ival::zero() } else { rnd(d.mul(gi), prec) }).collect();
        Ok(Dual { v, g })
    }
}

trait ZeroPoint {
    fn is_zero_point(&self) -> bool;
}

impl ZeroPoint for Ival {
    fn is_zero_point(&self) -> bool {
        self.lo().is_zero() && self.hi().is_zero()
    }
}

/// Variable indices set in `mask`, in order.
pub fn active_vars(mask: u16) -> Vec<usize> {
    (0..NVARS).filter(|i| mask & (1 << i) != 0).collect()
}

fn eval_ival(e: &Expr, b: &[Option<Ival>], prec: u32) -> Result<Ival, EvalError> {
    Env::new(b.to_vec(), Some(prec), 0).eval(e)
}

fn eval_dual(e: &Expr, b: &[Option<Ival>], active: &[usize], prec: u32) -> Result<Dual, EvalError> {
    let n = active.len();
    let mut vars: Vec<Option<Dual>> = vec![None; NVARS];
    for (slot, &i) in active.iter().enumerate() {
        vars[i] = b[i].clone().map(|v| Dual::var(v, slot, n));
    }
    Env::new(vars, Some(prec), n).eval(e)
}

fn midpoint(b: &[Option<Ival>]) -> Vec<Option<Ival>> {
    b.iter().map(|v| v.as_ref().map(|v| Ival::point(v.mid()))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Certified,
    Inconclusive,
    /// A sample point evaluates outside the claimed bound.
    Refuted,
}

/// What a one-sided minimisation has to establish.
#[derive(Clone, Debug)]
enum Goal {
    /// min ≥ bound (or > bound when strict).
    AtLeast(Rat, bool),
    /// Close the gap between the certified lower bound and a sampled value.
    Within(Rat),
}

#[derive(Clone, Debug)]
struct MinResult {
    status: BoundStatus,
    /// Certified lower bound on the minimum.
    lower: Rat,
    witness: Option<Vec<Option<Ival>>>,
    leaves: usize,
}

struct Node {
    b: Vec<Option<Ival>>,
    enc: Ival,
    grad: Vec<Ival>,
}

/// Evaluates `e` over `b` for minimisation: coordinates along which `e` is
/// monotone are pinned to the minimising endpoint, then the natural and
/// mean-value enclosures are intersected.
fn evaluate(e: &Expr, mut b: Vec<Option<Ival>>, active: &[usize], prec: u32) -> Result<Node, EvalError> {
    let mut d = eval_dual(e, &b, active, prec)?;
    for _ in 0..active.len() {
        let mut pinned = false;
        for (slot, &i) in active.iter().enumerate() {
            let x = b[i].as_ref().unwrap();
            if x.is_point() {
                continue;
            }
            let g = &d.g[slot];
            if g.lo().signum() >= 0 {
                b[i] = Some(Ival::point(x.lo().clone()));
                pinned = true;
            } else if g.hi().signum() <= 0 {
                b[i] = Some(Ival::point(x.hi().clone()));
                pinned = true;
            }
        }
        if !pinned {
            break;
        }
        d = eval_dual(e, &b, active, prec)?;
    }
    let mid = midpoint(&b);
    let fm = eval_ival(e, &mid, prec)?;
    let mut mv = fm;
    for (slot, &i) in active.iter().enumerate() {
        let x = b[i].as_ref().unwrap();
        if x.is_point() {
            continue;
        }
        let off = x.sub(mid[i].as_ref().unwrap());
        mv = mv.add(&d.g[slot].mul(&off)).round_out(prec);
    }
    let enc = d.v.intersect(&mv).unwrap_or(d.v);
    Ok(Node { b, enc, grad: d.g })
}

fn split_var(n: &Node, active: &[usize]) -> Option<usize> {
    let mut best: Option<(Rat, usize)> = None;
    for (slot, &i) in active.iter().enumerate() {
        let w = n.b[i].as_ref().unwrap().width();
        if w.is_zero() {
            continue;
        }
        // ties and vanishing gradients fall back to plain width
        let score = &n.grad[slot].mag() * &w + &w * Rat::pow10(-40);
        if best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, i));
        }
    }
    best.map(|(_, i)| i)
}

fn minimize(e: &Expr, root: &[Option<Ival>], active: &[usize], goal: &Goal, budget: usize, prec: u32) -> Result<MinResult, EvalError> {
    let mut seq = 0u64;
    let mut nodes: Vec<Option<Node>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut sample: Option<(Rat, Vec<Option<Ival>>)> = None;
    let mut leaves = 0usize;
    let mut push = |n: Node, heap: &mut BinaryHeap<Reverse<(Rat, u64)>>, nodes: &mut Vec<Option<Node>>| {
        heap.push(Reverse((n.enc.lo().clone(), seq)));
        nodes.push(Some(n));
        seq += 1;
    };
    push(evaluate(e, root.to_vec(), active, prec)?, &mut heap, &mut nodes);
    let done = |lo: &Rat, sample: &Option<(Rat, Vec<Option<Ival>>)>| match goal {
        Goal::AtLeast(b, strict) => {
            if *strict {
                lo > b
            } else {
                lo >= b
            }
        }
        Goal::Within(tol) => sample.as_ref().is_some_and(|(s, _)| s - lo <= *tol),
    };
    loop {
        let Reverse((lo, id)) = heap.pop().expect("heap never empties before a verdict");
        let n = nodes[id as usize].take().unwrap();
        // sample the pinned midpoint; its value bounds the minimum from above
        let mid = midpoint(&n.b);
        let fm = eval_ival(e, &mid, prec)?;
        if sample.as_ref().map_or(true, |(s, _)| fm.hi() < s) {
            sample = Some((fm.hi().clone(), mid.clone()));
        }
        if done(&lo, &sample) {
            return Ok(MinResult { status: BoundStatus::Certified, lower: lo, witness: None, leaves });
        }
        if let Goal::AtLeast(b, strict) = goal {
            let below = if *strict { fm.hi() <= b } else { fm.hi() < b };
            if below {
                return Ok(MinResult {
                    status: BoundStatus::Refuted,
                    lower: lo,
                    witness: Some(mid),
                    leaves,
                });
            }
        }
        leaves += 1;
        let var = split_var(&n, active);
        if leaves >= budget || var.is_none() {
            return Ok(MinResult {
                status: BoundStatus::Inconclusive,
                lower: lo,
                witness: None,
                leaves,
            });
        }
        let var = var.unwrap();
        let (l, r) = n.b[var].as_ref().unwrap().split();
        for half in [l, r] {
            let mut b = n.b.clone();
            b[var] = Some(half);
            push(evaluate(e, b, active, prec)?, &mut heap, &mut nodes);
        }
    }
}

/// A range claim for an expression over a box.
#[derive(Clone, Debug)]
pub struct BoundTask {
    pub expr: Expr,
    pub domain: Vec<Option<Ival>>,
    pub target: Ival,
    pub strict: bool,
    pub budget: usize,
}

impl BoundTask {
    pub fn new(expr: Expr, domain: Vec<Option<Ival>>, target: Ival) -> BoundTask {
        BoundTask { expr, domain, target, strict: false, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundOutcome {
    pub status: BoundStatus,
    /// Certified enclosure of the true range (inside the target when certified).
    pub range: Ival,
    pub leaves: usize,
    /// A point whose value lies outside the target, for refuted claims.
    pub witness: Option<Vec<(String, String)>>,
}

fn describe(b: &[Option<Ival>]) -> Vec<(String, String)> {
    b.iter()
        .enumerate()
        .filter_map(|(i, v)| v.as_ref().map(|v| (crate::fields::var_name(i), v.lo().to_string())))
        .collect()
}

/// Interval branch-and-bound: certifies `target ⊇ range(expr)` over the box.
pub fn optimize_over_box(task: &BoundTask) -> BoundOutcome {
    match optimize_inner(task) {
        Ok(o) => o,
        Err(_) => BoundOutcome { status: BoundStatus::Inconclusive, range: task.target.clone(), leaves: 0, witness: None },
    }
}

fn optimize_inner(task: &BoundTask) -> Result<BoundOutcome, EvalError> {
    let active = active_vars(task.expr.vars());
    let t = &task.target;
    let lo = minimize(&task.expr, &task.domain, &active, &Goal::AtLeast(t.lo().clone(), task.strict), task.budget, BOX_PREC)?;
    let neg = -task.expr.clone();
    let hi = minimize(&neg, &task.domain, &active, &Goal::AtLeast(-t.hi(), task.strict), task.budget, BOX_PREC)?;
    let status = match (lo.status, hi.status) {
        (BoundStatus::Refuted, _) | (_, BoundStatus::Refuted) => BoundStatus::Refuted,
        (BoundStatus::Certified, BoundStatus::Certified) => BoundStatus::Certified,
        _ => BoundStatus::Inconclusive,
    };
    let witness = lo.witness.as_deref().or(hi.witness.as_deref()).map(describe);
    let range = Ival::new(lo.lower.clone(), -&hi.lower).unwrap_or_else(|_| Ival::hull_of(lo.lower, -hi.lower));
    Ok(BoundOutcome { status, range, leaves: lo.leaves + hi.leaves, witness })
}

/// A certified enclosure of the range whose endpoints are each within `tol`
/// of a sampled value, or the best sound enclosure found within the budget.
pub fn enclose_range(expr: &Expr, domain: &[Option<Ival>], tol: &Rat, budget: usize) -> Result<(Ival, bool), EvalError> {
    let active = active_vars(expr.vars());
    let lo = minimize(expr, domain, &active, &Goal::Within(tol.clone()), budget, BOX_PREC)?;
    let hi = minimize(&-expr.clone(), domain, &active, &Goal::Within(tol.clone()), budget, BOX_PREC)?;
    let ok = lo.status == BoundStatus::Certified && hi.status == BoundStatus::Certified;
    Ok((Ival::new(lo.lower, -hi.lower)?, ok))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    /// Interval evaluation with the referenced φ replaced by their certified ranges.
    Relaxation,
    BranchAndBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiBound {
    pub index: usize,
    pub claimed: Ival,
    pub status: BoundStatus,
    pub method: BoundMethod,
    /// Certified enclosure; inside `claimed` exactly when certified.
    pub range: Ival,
    pub leaves: usize,
    pub witness: Option<Vec<(String, String)>>,
    pub note: Option<String>,
}

/// Certified φ ranges: the claimed pair where it certified, our own
/// enclosure otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DictionaryReport {
    pub entries: Vec<PhiBound>,
}

impl DictionaryReport {
    pub fn get(&self, i: usize) -> Option<&PhiBound> {
        self.entries.iter().find(|e| e.index == i)
    }

    /// Range usable in downstream evaluation for φ_i.
    pub fn usable_range(&self, i: usize) -> Option<Ival> {
        self.get(i).map(|e| match e.status {
            BoundStatus::Certified => e.claimed.clone(),
            _ => e.range.clone(),
        })
    }

    /// Indexable by φ number, with `None` for entries not checked.
    pub fn ranges(&self) -> Vec<Option<Ival>> {
        (0..=NPHI).map(|i| if i == 0 { None } else { self.usable_range(i) }).collect()
    }

    pub fn certified_count(&self) -> usize {
        self.entries.iter().filter(|e| e.status == BoundStatus::Certified).count()
    }
}

fn closure(indices: &[usize]) -> Vec<usize> {
    let d = dictionary();
    let mut out: Vec<usize> = Vec::new();
    let mut stack: Vec<usize> = indices.to_vec();
    while let Some(i) = stack.pop() {
        if out.contains(&i) {
            continue;
        }
        out.push(i);
        let mut ch = Vec::new();
        d.def(i).phis(&mut ch);
        stack.extend(ch);
    }
    out.sort();
    out
}

fn base_bound(i: usize, budget: usize) -> PhiBound {
    let d = dictionary();
    let dom = DomainBox::v().bindings();
    let task = BoundTask { budget, ..BoundTask::new(phi(i), dom.clone(), d.table(i).clone()) };
    let out = optimize_over_box(&task);
    let range = if out.status == BoundStatus::Certified {
        out.range
    } else {
        match enclose_range(&phi(i), &dom, &Rat::pow10(-6), budget) {
            Ok((r, _)) => r.round_out(9),
            Err(_) => out.range,
        }
    };
    PhiBound {
        index: i,
        claimed: d.table(i).clone(),
        status: out.status,
        method: BoundMethod::BranchAndBound,
        range,
        leaves: out.leaves,
        witness: out.witness,
        note: crate::fields::dictionary_notes(i).map(String::from),
    }
}

fn composite_bound(i: usize, known: &[Option<Ival>], budget: usize) -> PhiBound {
    let d = dictionary();
    let dom = DomainBox::v().bindings();
    let claimed = d.table(i).clone();
    let mut env = Env::new(dom.clone(), Some(BOX_PREC), 0);
    let mut children = Vec::new();
    d.def(i).phis(&mut children);
    for c in children {
        if let Some(r) = &known[c] {
            env.set_phi(c, r.clone());
        }
    }
    let relaxed = env.eval(d.def(i));
    let note = crate::fields::dictionary_notes(i).map(String::from);
    if let Ok(r) = &relaxed {
        if r.subset_of(&claimed) {
            return PhiBound {
                index: i,
                claimed,
                status: BoundStatus::Certified,
                method: BoundMethod::Relaxation,
                range: r.clone(),
                leaves: 0,
                witness: None,
                note,
            };
        }
    }
    let expanded = d.def(i).expand();
    let task = BoundTask { budget, ..BoundTask::new(expanded, dom, claimed.clone()) };
    let out = optimize_over_box(&task);
    let range = if out.status == BoundStatus::Certified {
        out.range
    } else {
        let tight = enclose_range(&task.expr, &task.domain, &Rat::pow10(-6), budget).map(|(r, _)| r.round_out(9)).unwrap_or(out.range);
        match relaxed {
            Ok(r) => r.round_out(9).intersect(&tight).unwrap_or(tight),
            Err(_) => tight,
        }
    };
    PhiBound { index: i, claimed, status: out.status, method: BoundMethod::BranchAndBound, range, leaves: out.leaves, witness: out.witness, note }
}

/// Checks the selected B(φ_i) claims (all 58 when `only` is `None`), along
/// with every entry they depend on.
pub fn certify_dictionary(only: Option<&[usize]>, budget: usize, parallel: bool) -> DictionaryReport {
    let d = dictionary();
    let wanted: Vec<usize> = match only {
        Some(v) => closure(v),
        None => (1..=NPHI).collect(),
    };
    let (base, comp): (Vec<usize>, Vec<usize>) = wanted.iter().partition(|&&i| !d.is_composite(i));
    let mut entries: Vec<PhiBound> = if parallel {
        base.par_iter().map(|&i| base_bound(i, budget)).collect()
    } else {
        base.iter().map(|&i| base_bound(i, budget)).collect()
    };
    let mut known: Vec<Option<Ival>> = vec![None; NPHI + 1];
    let usable = |e: &PhiBound| if e.status == BoundStatus::Certified { e.claimed.clone() } else { e.range.clone() };
    for e in &entries {
        known[e.index] = Some(usable(e));
    }
    for i in comp {
        let e = composite_bound(i, &known, budget);
        known[i] = Some(usable(&e));
        entries.push(e);
    }
    entries.sort_by_key(|e| e.index);
    DictionaryReport { entries }
}

/// The constants of the error theorem as claimed for one field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConstants {
    pub m0: Rat,
    pub m: Vec<Rat>,
    pub k0: Rat,
    pub k1: Rat,
    /// Upper bound on sqrt(Σ M_j²).
    pub m_rss: Rat,
    /// K0 + K1·h/2.
    pub l: Rat,
}

fn rats(v: &[(i64, i64)]) -> Vec<Rat> {
    v.iter().map(|&(n, d)| Rat::frac(n, d)).collect()
}

/// (M0, K0, K1, M1..Mn) as printed for W, G and U.
pub fn published_constants(f: FieldName) -> (Rat, Rat, Rat, Vec<Rat>) {
    match f {
        FieldName::W => (
            Rat::frac(3, 2),
            Rat::frac(25282, 15625),
            Rat::frac(260901, 200000),
            rats(&[
                (19453263, 25000000),
                (493485626283, 500000000000),
                (14977713, 20000000),
                (1334089805457, 1000000000000),
                (5396988231, 125000000000),
            ]),
        ),
        FieldName::G => (
            Rat::frac(42, 25),
            Rat::frac(305541, 125000),
            Rat::frac(249309, 100000),
            rats(&[
                (778131, 1000000),
                (246743, 250000),
                (374443, 500000),
                (133409, 100000),
                (1345793, 1000000),
                (2429239, 1000000),
                (833241, 500000),
                (3298559, 1000000),
                (182893, 1000000),
            ]),
        ),
        FieldName::U => (
            Rat::frac(3, 2),
            Rat::frac(1226931, 500000),
            Rat::frac(2557349, 1000000),
            rats(&[
                (778131, 1000000),
                (246743, 250000),
                (374443, 500000),
                (133409, 100000),
                (765259, 500000),
                (533571, 200000),
                (1790753, 1000000),
                (711267, 200000),
            ]),
        ),
        other => panic!("no published constants for {other:?}"),
    }
}

impl HypothesisConstants {
    pub fn new(m0: Rat, m: Vec<Rat>, k0: Rat, k1: Rat, h: &Rat) -> HypothesisConstants {
        let sum = m.iter().fold(Rat::zero(), |s, x| s + x * x);
        let m_rss = sqrt_enclosure(&sum, &Rat::pow10(-16)).expect("nonnegative").hi().clone();
        let l = &k0 + &((&k1 * h) / Rat::int(2));
        HypothesisConstants { m0, m, k0, k1, m_rss, l }
    }

    pub fn published(f: FieldName, h: &Rat) -> HypothesisConstants {
        let (m0, k0, k1, m) = published_constants(f);
        HypothesisConstants::new(m0, m, k0, k1, h)
    }
}

/// Box of a field's U2 region as variable bindings, with a over I13.
pub fn field_bindings(spec: &FieldSpec) -> Vec<Option<Ival>> {
    let mut b: Vec<Option<Ival>> = vec![None; NVARS];
    if let Some(dom) = &spec.domain {
        for (c, v) in spec.coords.iter().zip(dom) {
            if let Some(i) = c.var {
                b[i] = Some(v.clone());
            }
        }
    }
    b[VAR_A] = Some(DomainBox::v().i(13).clone());
    b
}

fn env_with(b: &[Option<Ival>], ranges: &[Option<Ival>]) -> Env<Ival> {
    let mut env = Env::new(b.to_vec(), Some(BOX_PREC), 0);
    for (i, r) in ranges.iter().enumerate() {
        if let Some(r) = r {
            env.set_phi(i, r.clone());
        }
    }
    env
}

/// Certifies |f| ≤ M0, |F2_j| ≤ M_j, |Df| ≤ K0 and |DF1| ≤ K1 over the
/// field's box. Each claim is first tried with φ replaced by the ranges in
/// `dict` and entrywise magnitudes; a claim that fails that way is retried by
/// branch and bound on the expanded expression, which does not depend on the
/// dictionary at all.
pub fn certify_hypotheses(field: FieldName, dict: &DictionaryReport, h: &Rat) -> (HypothesisConstants, Certificate) {
    let spec = FieldSpec::get(field);
    let hc = HypothesisConstants::published(field, h);
    let ranges = dict.ranges();
    let b = field_bindings(&spec);
    let mut env = env_with(&b, &ranges);
    let mut cert = Certificate::new(CertKind::Bound, &format!("hypotheses_{}", spec.name));
    let claim = |cert: &mut Certificate, env: &mut Env<Ival>, label: &str, entries: Vec<&Expr>, square: bool, bound: &Rat| {
        let relaxed: Result<Rat, EvalError> = (|| {
            let mut acc = Rat::zero();
            for e in &entries {
                let m = env.eval(e)?.mag();
                acc = if square { acc + &m * &m } else { acc.max(m) };
            }
            Ok(acc)
        })();
        if let Ok(v) = &relaxed {
            if v <= bound {
                cert.push(Check::le(label, v, bound));
                return;
            }
        }
        let (expr, target) = if square {
            let sum = entries.iter().fold(Expr::zero(), |s, e| {
                let x = e.expand();
                s + x.clone() * x
            });
            (sum, Ival::new(Rat::zero(), bound.clone()).expect("nonnegative bound"))
        } else {
            debug_assert_eq!(entries.len(), 1);
            (entries[0].expand(), Ival::new(-bound, bound.clone()).expect("nonnegative bound"))
        };
        let out = optimize_over_box(&BoundTask { budget: 4 * DEFAULT_BUDGET, ..BoundTask::new(expr, b.clone(), target) });
        let v = if square { out.range.hi().clone() } else { out.range.mag() };
        cert.push(Check::le(label, &v, bound));
        let how = match out.status {
            BoundStatus::Certified => "certified",
            BoundStatus::Refuted => "refuted",
            BoundStatus::Inconclusive => "inconclusive",
        };
        cert.note(format!("{label}: entrywise relaxation insufficient, joint branch and bound {how} after {} leaves", out.leaves));
        if out.status == BoundStatus::Inconclusive {
            cert.set_inconclusive();
        }
    };
    let hc_k0sq = &hc.k0 * &hc.k0;
    let hc_k1sq = &hc.k1 * &hc.k1;
    let nz = |m: &[Vec<Expr>]| -> Vec<Expr> { m.iter().flatten().filter(|e| !e.is_zero()).cloned().collect() };
    for (j, c) in spec.components.iter().enumerate() {
        claim(&mut cert, &mut env, &format!("|f_{}| <= M0", j + 1), vec![c], false, &hc.m0);
    }
    let jac = nz(&spec.jac);
    claim(&mut cert, &mut env, "|Df|^2", jac.iter().collect(), true, &hc_k0sq);
    let jac1 = nz(spec.jac1.as_ref().expect("field has DF1"));
    claim(&mut cert, &mut env, "|DF1|^2", jac1.iter().collect(), true, &hc_k1sq);
    for (j, (e, mj)) in spec.f2_components().expect("field has F2").iter().zip(&hc.m).enumerate() {
        claim(&mut cert, &mut env, &format!("|F2_{}|", j + 1), vec![e], false, mj);
    }
    for (i, r) in ranges.iter().enumerate() {
        if let (Some(_), Some(pb)) = (r, dict.get(i)) {
            if pb.status != BoundStatus::Certified && spec_uses_phi(&spec, i) {
                cert.note(format!("phi{i}: printed bound pair not certified, relaxation used enclosure {}", pb.range));
            }
        }
    }
    cert.input("h", h.to_string());
    cert.input("M", hc.m_rss.to_string());
    cert.input("L", hc.l.to_string());
    cert.finish();
    (hc, cert)
}

fn spec_uses_phi(spec: &FieldSpec, i: usize) -> bool {
    let mut v = Vec::new();
    for e in spec.components.iter().chain(spec.jac.iter().flatten()).chain(spec.jac1.iter().flatten().flatten()) {
        e.phis(&mut v);
    }
    v.contains(&i)
}

/// Θ̇ = φ3, F̈ = φ1 and R̈ = φ2 over |x1 − cF| ≤ eps, |x3 − cR| ≤ eps, a ∈ I13.
pub fn second_derivative_claims() -> Vec<(&'static str, usize, Ival)> {
    vec![
        ("theta_dot", 3, Ival::frac(120689, 250000, 483453, 1000000)),
        ("f_ddot", 1, Ival::hull_of(Rat::frac(-163169, 200000), Rat::frac(-813693, 1000000))),
        ("r_ddot", 2, Ival::frac(4593, 12500, 18653, 50000)),
    ]
}

pub fn certify_second_derivative_bounds(eps: &Rat, center_f: &Rat, center_r: &Rat, budget: usize) -> Certificate {
    let mut b: Vec<Option<Ival>> = vec![None; NVARS];
    b[0] = Some(Ival::point(center_f.clone()).inflate(eps));
    b[2] = Some(Ival::point(center_r.clone()).inflate(eps));
    b[VAR_A] = Some(DomainBox::v().i(13).clone());
    let mut cert = Certificate::new(CertKind::Bound, "second_derivatives");
    for (name, i, claim) in second_derivative_claims() {
        let task = BoundTask { strict: true, budget, ..BoundTask::new(phi(i), b.clone(), claim.clone()) };
        let out = optimize_over_box(&task);
        cert.push(Check::lt(&format!("{claim_lo} < min {name}", claim_lo = claim.lo()), claim.lo(), out.range.lo()));
        cert.push(Check::lt(&format!("max {name} < {}", claim.hi()), out.range.hi(), claim.hi()));
        if out.status == BoundStatus::Inconclusive {
            cert.note(format!("{name}: branch and bound inconclusive after {} leaves", out.leaves));
        }
    }
    cert.note("the printed F-ddot pair is listed in decreasing order; certified with endpoints sorted".into());
    cert.input("eps", eps.to_string());
    cert.input("center_F", center_f.to_string());
    cert.input("center_R", center_r.to_string());
    cert.finish();
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{k, x};

    #[test]
    fn constant_expression() {
        let t = BoundTask::new(k(0), DomainBox::v().bindings(), Ival::frac(-1, 1, 1, 1));
        let o = optimize_over_box(&t);
        assert_eq!(o.status, BoundStatus::Certified);
        assert_eq!(o.range, Ival::zero());
    }

    #[test]
    fn quadratic_needs_splitting() {
        // x1*(1 - x1) on [0,1] has range [0, 1/4]
        let mut dom = vec![None; NVARS];
        dom[0] = Some(Ival::frac(0, 1, 1, 1));
        let e = x(1) * (k(1) - x(1));
        let ok = optimize_over_box(&BoundTask::new(e.clone(), dom.clone(), Ival::frac(0, 1, 1001, 4000)));
        assert_eq!(ok.status, BoundStatus::Certified);
        let bad = optimize_over_box(&BoundTask::new(e, dom, Ival::frac(0, 1, 999, 4000)));
        assert_eq!(bad.status, BoundStatus::Refuted);
        assert!(bad.witness.is_some());
    }

    #[test]
    fn phi1_and_phi54_certify() {
        let r = certify_dictionary(Some(&[1, 54]), DEFAULT_BUDGET, false);
        assert_eq!(r.get(1).unwrap().status, BoundStatus::Certified);
        assert_eq!(r.get(54).unwrap().status, BoundStatus::Certified);
    }

    #[test]
    fn phi3_enclosure_inside_claim() {
        let (r, ok) = enclose_range(&phi(3), &DomainBox::v().bindings(), &Rat::pow10(-6), 1000).unwrap();
        assert!(ok);
        assert!(r.subset_of(dictionary().table(3)));
    }

    #[test]
    fn rss_and_l() {
        let h = Rat::frac(1, 100);
        let c = HypothesisConstants::new(Rat::one(), vec![Rat::int(3), Rat::int(4)], Rat::int(2), Rat::int(2), &h);
        assert_eq!(c.m_rss, Rat::int(5));
        assert_eq!(c.l, Rat::frac(201, 100));
    }
}

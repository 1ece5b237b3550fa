//! The Round Taylor Method: Taylor steps of order 1 or 2 whose results are
//! rounded onto the grid `10^-q Z` with a certificate `|z - y| <= H`, plus the
//! global error bound and the comparison bound for perturbed fields.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::HypothesisConstants;
use crate::exact::{
    certified_floor, exp_terms_for, exp_upper_bound, nearest_grid_in, ExactError, GridSpec, Ival, RoundMode, Rat,
};
use crate::fields::{dictionary, Env, EvalError, Expr, FieldName, FieldSpec, NVARS};

/// The margin ε between U1 and the boundary of U2 used throughout the proof.
pub fn proof_epsilon() -> Rat {
    Rat::frac(1, 1000)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("order {0} not supported (1 or 2)")]
    Order(u32),
    #[error("state has {got} coordinates, field {field} needs {want}")]
    Dimension { field: String, got: usize, want: usize },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("width budget {budget} not reached; component widths {widths:?}")]
    Budget { budget: String, widths: Vec<String> },
    #[error("{0}")]
    Exact(#[from] ExactError),
}

fn needs_sqrt(e: &Expr) -> bool {
    match e {
        Expr::SInv(_) => true,
        Expr::Phi(i) => needs_sqrt(dictionary().def(*i)),
        Expr::Sum(v) | Expr::Prod(v) => v.iter().any(needs_sqrt),
        Expr::Neg(e) | Expr::Pow(e, _) => needs_sqrt(e),
        Expr::Const(_) | Expr::Var(_) => false,
    }
}

/// A field prepared for repeated stepping: components, `F1 = Df f` and
/// whether evaluation needs square roots.
#[derive(Clone, Debug)]
struct Stepper {
    field: FieldSpec,
    f1: Vec<Expr>,
    algebraic: bool,
}

impl Stepper {
    fn new(field: &FieldSpec) -> Stepper {
        let f1 = field.f1_components();
        let algebraic = field.components.iter().chain(&f1).any(needs_sqrt);
        Stepper { field: field.clone(), f1, algebraic }
    }

    fn bindings(&self, z: &[Rat], a: Option<&Rat>) -> Vec<Option<Ival>> {
        let zi: Vec<Ival> = z.iter().cloned().map(Ival::point).collect();
        let p = self.field.state_point(&zi, a.cloned().map(Ival::point));
        debug_assert_eq!(p.vars.len(), NVARS);
        p.vars
    }

    /// Enclosure of `z + f h + F1 h^2/2` (order 2) with products rounded
    /// outward to `digits` decimals, or without rounding when `digits` is
    /// `None` (square roots then carry 60 digits unless they are exact).
    fn enclose(&self, z: &[Rat], a: Option<&Rat>, h: &Rat, order: u32, digits: Option<u32>) -> Result<Vec<Ival>, StepError> {
        let prec = if self.algebraic { digits } else { None };
        let mut env = Env::new(self.bindings(z, a), prec, 0);
        let h2 = h * h / Rat::int(2);
        let mut out = Vec::with_capacity(z.len());
        for (j, zj) in z.iter().enumerate() {
            let mut y = env.eval(&self.field.components[j])?.scale(h).add_rat(zj);
            if order == 2 {
                y = y.add(&env.eval(&self.f1[j])?.scale(&h2));
            }
            out.push(match prec {
                Some(d) => y.round_out(d + 2),
                None => y,
            });
        }
        Ok(out)
    }
}

fn digits_for(budget: &Rat) -> u32 {
    let mut d = 0u32;
    while Rat::pow10(-(d as i32)) > *budget {
        d += 1;
    }
    d
}

fn check_step_args(field: &FieldSpec, z: &[Rat], order: u32) -> Result<(), StepError> {
    if order != 1 && order != 2 {
        return Err(StepError::Order(order));
    }
    if z.len() != field.dim() {
        return Err(StepError::Dimension { field: field.name.clone(), got: z.len(), want: field.dim() });
    }
    Ok(())
}

/// One Taylor step `y = z + f(z) h + F1(z) h^2/2` (the last term only for
/// order 2) as component enclosures no wider than `precision_budget`.
pub fn taylor_step(
    field: &FieldSpec,
    z: &[Rat],
    a: Option<&Rat>,
    h: &Rat,
    order: u32,
    precision_budget: &Rat,
) -> Result<Vec<Ival>, StepError> {
    check_step_args(field, z, order)?;
    let st = Stepper::new(field);
    let mut last = st.enclose(z, a, h, order, None)?;
    if last.iter().all(|c| c.width() <= *precision_budget) {
        return Ok(last);
    }
    let mut d = digits_for(precision_budget) + 4;
    for _ in 0..MAX_RETRIES {
        let y = st.enclose(z, a, h, order, Some(d))?;
        if y.iter().all(|c| c.width() <= *precision_budget) {
            return Ok(y);
        }
        last = y;
        d += 8;
    }
    Err(StepError::Budget {
        budget: precision_budget.to_string(),
        widths: last.iter().map(|c| c.width().to_string()).collect(),
    })
}

const MAX_RETRIES: usize = 4;

/// Everything a run needs. `containment` is the box U1 (already shrunk by ε
/// from the field's U2); `constants` feed H̃.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub a: Option<Rat>,
    pub initial_state: Vec<Rat>,
    pub h: Rat,
    pub grid: GridSpec,
    pub k: u32,
    pub order: u32,
    pub containment: Option<Vec<Ival>>,
    pub epsilon: Rat,
    pub constants: Option<HypothesisConstants>,
    pub keep_trajectory: bool,
}

impl RunConfig {
    /// `Z_F(t, b, a, k)`: order 2, floor grid `10^-q`, U1 = U2 shrunk by
    /// 1/1000 and the printed hypothesis constants for step `t/k`.
    pub fn proof_run(field: FieldName, t: &Rat, a: &Rat, b: &Rat, k: u32, q: u32) -> RunConfig {
        let spec = FieldSpec::get(field);
        let eps = proof_epsilon();
        let h = t / &Rat::int(k.max(1) as i64);
        let containment = spec
            .domain
            .as_ref()
            .map(|d| d.iter().map(|iv| iv.shrink(&eps).expect("U2 wider than 2 eps")).collect());
        RunConfig {
            initial_state: spec.initial_state(b),
            field: spec,
            a: Some(a.clone()),
            constants: Some(HypothesisConstants::published(field, &h)),
            h,
            grid: GridSpec::floor(q),
            k,
            order: 2,
            containment,
            epsilon: eps,
            keep_trajectory: false,
        }
    }

    /// The introductory scalar example: order 1, `y0 = 1/2`, `h = 1/100`,
    /// `H = 10^-6`, ten steps.
    pub fn intro() -> RunConfig {
        RunConfig {
            field: FieldSpec::intro(),
            a: None,
            initial_state: vec![Rat::frac(1, 2)],
            h: Rat::frac(1, 100),
            grid: GridSpec::floor(6),
            k: 10,
            order: 1,
            containment: None,
            epsilon: proof_epsilon(),
            constants: None,
            keep_trajectory: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub step: u32,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub field: String,
    pub a: Option<Rat>,
    pub h: Rat,
    pub grid: GridSpec,
    pub k: u32,
    pub order: u32,
    pub z0: Vec<Rat>,
    pub z_final: Vec<Rat>,
    /// z_0..z_k when the config asked for it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<Vec<Rat>>>,
    /// Unrounded y_1..y_k, kept with the trajectory when they are exact.
    #[serde(skip)]
    pub exact_y: Option<Vec<Vec<Rat>>>,
    /// `containment_ok[j]` says whether z_j lies in U1.
    #[serde(skip)]
    pub containment_ok: Vec<bool>,
    pub min: Vec<Rat>,
    pub max: Vec<Rat>,
    /// Smallest distance from any z_j to the boundary of U1.
    pub containment_margin: Option<Rat>,
    /// Steps where the floor could not be certified and the nearest grid point
    /// of a tight enclosure was used instead.
    pub nearest_fallbacks: u32,
    pub h_tilde: Option<Rat>,
    pub constants: Option<HypothesisConstants>,
    /// ε > M0·h + H̃.
    pub epsilon_ok: Option<bool>,
    pub certified: bool,
    pub failure: Option<RunFailure>,
}

fn margin_in(z: &[Rat], boxes: &[Ival]) -> Rat {
    z.iter()
        .zip(boxes)
        .map(|(v, b)| (v - b.lo()).min(b.hi() - v))
        .reduce(Rat::min)
        .unwrap_or_else(Rat::zero)
}

/// Grid point for the enclosure `y` of one component: the certified floor
/// when it is unambiguous, otherwise `None`.
fn round_component(y: &Ival, grid: GridSpec) -> Option<Rat> {
    match grid.mode {
        RoundMode::Floor => certified_floor(y, grid),
        RoundMode::Nearest => match nearest_grid_in(y, grid) {
            (r, true) => Some(r),
            _ => None,
        },
    }
}

/// Runs the Round Taylor Method. A run that hits a rounding, containment or
/// ε-condition problem still returns its full record, uncertified, with the
/// first failing step.
pub fn round_taylor_run(cfg: &RunConfig) -> RunRecord {
    let st = Stepper::new(&cfg.field);
    let n = cfg.field.dim();
    let big_h = cfg.grid.spacing();
    let mut z = cfg.initial_state.clone();
    let mut min = z.clone();
    let mut max = z.clone();
    let mut traj = cfg.keep_trajectory.then(|| vec![z.clone()]);
    let mut ys: Option<Vec<Vec<Rat>>> = (cfg.keep_trajectory && !st.algebraic).then(Vec::new);
    let mut failure: Option<RunFailure> = None;
    let mut fallbacks = 0u32;
    let mut contain = Vec::with_capacity(cfg.k as usize + 1);
    let mut margin: Option<Rat> = None;
    let fail = |f: &mut Option<RunFailure>, step: u32, reason: String| {
        if f.is_none() {
            *f = Some(RunFailure { step, reason });
        }
    };
    if let Err(e) = check_step_args(&cfg.field, &z, cfg.order) {
        fail(&mut failure, 0, e.to_string());
    }
    let mut check_contain = |z: &[Rat], j: u32, failure: &mut Option<RunFailure>| {
        if let Some(b) = &cfg.containment {
            let m = margin_in(z, b);
            let ok = m.signum() >= 0;
            if !ok {
                fail(failure, j, format!("z_{j} leaves U1 (margin {})", m.to_decimal(6)));
            }
            margin = Some(match margin.take() {
                Some(old) => old.min(m),
                None => m,
            });
            contain.push(ok);
        } else {
            contain.push(true);
        }
    };
    check_contain(&z, 0, &mut failure);
    let base_digits = cfg.grid.q + 4;
    'steps: for j in 1..=cfg.k {
        if failure.as_ref().is_some_and(|f| f.reason.starts_with("evaluation") || f.reason.starts_with("order")) {
            break;
        }
        let mut next = Vec::with_capacity(n);
        let mut digits = base_digits;
        let mut y = match st.enclose(&z, cfg.a.as_ref(), &cfg.h, cfg.order, Some(digits)) {
            Ok(y) => y,
            Err(e) => {
                fail(&mut failure, j, format!("evaluation at step {j}: {e}"));
                break 'steps;
            }
        };
        for c in 0..n {
            let mut tries = 0;
            loop {
                if let Some(r) = round_component(&y[c], cfg.grid) {
                    next.push(r);
                    break;
                }
                if !st.algebraic || tries == MAX_RETRIES {
                    let (r, ok) = nearest_grid_in(&y[c], cfg.grid);
                    if !ok {
                        fail(&mut failure, j, format!("rounding not certified for component {c} at step {j}"));
                    }
                    fallbacks += 1;
                    next.push(r);
                    break;
                }
                tries += 1;
                digits += 8;
                match st.enclose(&z, cfg.a.as_ref(), &cfg.h, cfg.order, Some(digits)) {
                    Ok(v) => y = v,
                    Err(e) => {
                        fail(&mut failure, j, format!("evaluation at step {j}: {e}"));
                        break 'steps;
                    }
                }
            }
        }
        if let Some(ys) = ys.as_mut() {
            ys.push(y.iter().map(|c| c.lo().clone()).collect());
        }
        z = next;
        for c in 0..n {
            if z[c] < min[c] {
                min[c] = z[c].clone();
            }
            if z[c] > max[c] {
                max[c] = z[c].clone();
            }
        }
        check_contain(&z, j, &mut failure);
        if let Some(t) = traj.as_mut() {
            t.push(z.clone());
        }
    }
    let h_tilde = cfg.constants.as_ref().map(|c| global_error_bound(c, &cfg.h, &big_h, cfg.k, cfg.order));
    let h_tilde = match h_tilde {
        Some(Ok(v)) => Some(v),
        Some(Err(e)) => {
            fail(&mut failure, cfg.k, format!("H~ not computable: {e}"));
            None
        }
        None => None,
    };
    let epsilon_ok = match (&cfg.constants, &h_tilde) {
        (Some(c), Some(ht)) => {
            let ok = cfg.epsilon > &(&c.m0 * &cfg.h) + ht;
            if !ok {
                fail(&mut failure, cfg.k, "epsilon <= M0 h + H~".into());
            }
            Some(ok)
        }
        _ => None,
    };
    RunRecord {
        field: cfg.field.name.clone(),
        a: cfg.a.clone(),
        h: cfg.h.clone(),
        grid: cfg.grid,
        k: cfg.k,
        order: cfg.order,
        z0: cfg.initial_state.clone(),
        z_final: z,
        trajectory: traj,
        exact_y: ys,
        containment_ok: contain,
        min,
        max,
        containment_margin: margin,
        nearest_fallbacks: fallbacks,
        h_tilde,
        constants: cfg.constants.clone(),
        epsilon_ok,
        certified: failure.is_none(),
        failure,
    }
}

const BOUND_DIGITS: u32 = 30;

/// Upper bound on `H̃ = (M h^m/(m+1)! + H/h)/L · (e^{L k h} - 1)`, rounded up
/// to 30 decimals.
pub fn global_error_bound(c: &HypothesisConstants, h: &Rat, big_h: &Rat, k: u32, m: u32) -> Result<Rat, ExactError> {
    if c.l.signum() <= 0 {
        return Err(ExactError::Domain("L must be positive".into()));
    }
    if h.signum() <= 0 {
        return Err(ExactError::Domain("h must be positive".into()));
    }
    let mut fact = Rat::one();
    for i in 2..=(m as i64 + 1) {
        fact = fact * Rat::int(i);
    }
    let x = &c.l * h * Rat::int(k as i64);
    let e = exp_upper_bound(&x, exp_terms_for(&x))?;
    let lead = &c.m_rss * &h.pow(m as i32)? / fact + big_h / h;
    Ok((lead / c.l.clone() * (e - Rat::one())).ceil_digits(BOUND_DIGITS))
}

/// Upper bound on `d0 e^{K Δt} + (ε/K)(e^{K Δt} - 1)`, rounded up to 30 decimals.
pub fn comparison_bound(k: &Rat, eps_f: &Rat, d0: &Rat, dt_abs: &Rat) -> Result<Rat, ExactError> {
    if k.signum() <= 0 {
        return Err(ExactError::Domain("K must be positive".into()));
    }
    if eps_f.signum() < 0 || d0.signum() < 0 || dt_abs.signum() < 0 {
        return Err(ExactError::Domain("eps_f, d0 and dt must be nonnegative".into()));
    }
    let x = k * dt_abs;
    let e = exp_upper_bound(&x, exp_terms_for(&x))?;
    Ok((d0 * &e + eps_f / k * (e - Rat::one())).ceil_digits(BOUND_DIGITS))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("run is not certified")]
    Uncertified,
    #[error("run carries no H~")]
    NoBound,
    #[error("step {0} out of range or not recorded")]
    Index(u32),
}

/// `z_j ± H̃`, which contains the true solution at `t = j h`.
pub fn certified_state(rec: &RunRecord, j: u32) -> Result<Vec<Ival>, StateError> {
    if !rec.certified {
        return Err(StateError::Uncertified);
    }
    let ht = rec.h_tilde.as_ref().ok_or(StateError::NoBound)?;
    let z = match (&rec.trajectory, j) {
        (Some(t), _) => t.get(j as usize).ok_or(StateError::Index(j))?,
        (None, 0) => &rec.z0,
        (None, j) if j == rec.k => &rec.z_final,
        _ => return Err(StateError::Index(j)),
    };
    Ok(z.iter().map(|v| Ival::point(v.clone()).inflate(ht)).collect())
}

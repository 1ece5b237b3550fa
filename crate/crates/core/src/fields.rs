//! The vector fields W, G, U, their transcribed derivative matrices, and the
//! φ1..φ58 dictionary, all as expression trees over x1..x12 and a.
//!
//! One evaluator serves point evaluation in the integrator, box evaluation in
//! the bounds module, and forward-mode gradients (see [`Num`]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{sqrt_digits, sqrt_enclosure, ExactError, Ival, Rat};

/// x1..x12 occupy 0..12, the parameter a is 12.
pub const NVARS: usize = 13;
pub const VAR_A: usize = 12;
pub const NPHI: usize = 58;

/// Digits used for square roots when a caller asks for exact evaluation.
const EXACT_SQRT_DIGITS: u32 = 60;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable {0} not bound")]
    MissingVar(String),
    #[error("no dictionary entry phi{0}")]
    UnknownPhi(usize),
    #[error("{0}")]
    Exact(#[from] ExactError),
    #[error("coordinate {var} = {value} outside the domain box {domain}")]
    OutsideDomain { var: String, value: String, domain: String },
}

pub fn var_name(i: usize) -> String {
    if i == VAR_A {
        "a".to_string()
    } else {
        format!("x{}", i + 1)
    }
}

/// Expression tree. `SInv(k)` is `s^-k` with `s = sqrt(4 x1^2 + x3^2)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rat),
    Var(usize),
    SInv(u32),
    Phi(usize),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
}

pub fn k(n: i64) -> Expr {
    Expr::Const(Rat::int(n))
}

pub fn kr(r: Rat) -> Expr {
    Expr::Const(r)
}

/// x_i with the 1-based index.
pub fn x(i: usize) -> Expr {
    assert!((1..=12).contains(&i));
    Expr::Var(i - 1)
}

pub fn a() -> Expr {
    Expr::Var(VAR_A)
}

pub fn phi(i: usize) -> Expr {
    Expr::Phi(i)
}

pub fn sinv(k: u32) -> Expr {
    Expr::SInv(k)
}

pub fn pw(e: Expr, n: i32) -> Expr {
    Expr::Pow(Box::new(e), n)
}

impl Expr {
    pub fn zero() -> Expr {
        k(0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    /// Bitmask of variables read, looking through φ references.
    pub fn vars(&self) -> u16 {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => 1 << i,
            Expr::SInv(_) => 1 | (1 << 2),
            Expr::Phi(i) => dictionary().vars[*i],
            Expr::Sum(v) | Expr::Prod(v) => v.iter().fold(0, |m, e| m | e.vars()),
            Expr::Neg(e) | Expr::Pow(e, _) => e.vars(),
        }
    }

    /// φ indices referenced directly (not transitively).
    pub fn phis(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Phi(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            Expr::Sum(v) | Expr::Prod(v) => v.iter().for_each(|e| e.phis(out)),
            Expr::Neg(e) | Expr::Pow(e, _) => e.phis(out),
            _ => {}
        }
    }

    /// Replaces every φ reference by its definition, recursively.
    pub fn expand(&self) -> Expr {
        match self {
            Expr::Phi(i) => dictionary().def(*i).expand(),
            Expr::Sum(v) => Expr::Sum(v.iter().map(Expr::expand).collect()),
            Expr::Prod(v) => Expr::Prod(v.iter().map(Expr::expand).collect()),
            Expr::Neg(e) => Expr::Neg(Box::new(e.expand())),
            Expr::Pow(e, n) => Expr::Pow(Box::new(e.expand()), *n),
            other => other.clone(),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        match self {
            Expr::Sum(mut v) => {
                v.push(o);
                Expr::Sum(v)
            }
            s => Expr::Sum(vec![s, o]),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        self + (-o)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        match self {
            Expr::Prod(mut v) => {
                v.push(o);
                Expr::Prod(v)
            }
            s => Expr::Prod(vec![s, o]),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c.denom() == 1 && c.signum() >= 0 {
                    write!(f, "{c}")
                } else {
                    write!(f, "({c})")
                }
            }
            Expr::Var(i) => write!(f, "{}", var_name(*i)),
            Expr::SInv(k) => write!(f, "s^-{k}"),
            Expr::Phi(i) => write!(f, "phi{i}"),
            Expr::Sum(v) => {
                write!(f, "(")?;
                for (j, e) in v.iter().enumerate() {
                    match e {
                        Expr::Neg(inner) => write!(f, " - {inner}")?,
                        _ if j == 0 => write!(f, "{e}")?,
                        _ => write!(f, " + {e}")?,
                    }
                }
                write!(f, ")")
            }
            Expr::Prod(v) => {
                for (j, e) in v.iter().enumerate() {
                    if j > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            Expr::Neg(e) => write!(f, "-{e}"),
            Expr::Pow(e, n) => write!(f, "{e}^{n}"),
        }
    }
}

/// Arithmetic the evaluator needs; implemented for [`Ival`] here and for
/// interval gradients in the bounds module.
pub trait Num: Clone + Sized {
    fn konst(c: &Rat, nvars: usize) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self, prec: Option<u32>) -> Self;
    fn powi(&self, e: i32, prec: Option<u32>) -> Result<Self, EvalError>;
    /// `(s2)^(-k/2)` for the squared radius `s2`.
    fn s_inv_pow(s2: &Self, k: u32, prec: Option<u32>) -> Result<Self, EvalError>;
}

fn round(v: Ival, prec: Option<u32>) -> Ival {
    match prec {
        Some(d) => v.round_out(d),
        None => v,
    }
}

fn sqrt_lo(r: &Rat, d: u32) -> Result<Rat, EvalError> {
    if r.numer().is_perfect_square() && r.denom().is_perfect_square() {
        return Ok(sqrt_enclosure(r, &Rat::one())?.lo().clone());
    }
    Ok(sqrt_digits(r, d).lo().clone())
}

fn sqrt_hi(r: &Rat, d: u32) -> Result<Rat, EvalError> {
    if r.numer().is_perfect_square() && r.denom().is_perfect_square() {
        return Ok(sqrt_enclosure(r, &Rat::one())?.hi().clone());
    }
    Ok(sqrt_digits(r, d).hi().clone())
}

impl Num for Ival {
    fn konst(c: &Rat, _: usize) -> Ival {
        Ival::point(c.clone())
    }

    fn add(&self, o: &Ival) -> Ival {
        Ival::add(self, o)
    }

    fn neg(&self) -> Ival {
        Ival::neg(self)
    }

    fn mul(&self, o: &Ival, prec: Option<u32>) -> Ival {
        round(Ival::mul(self, o), prec)
    }

    fn powi(&self, e: i32, prec: Option<u32>) -> Result<Ival, EvalError> {
        Ok(round(Ival::powi(self, e)?, prec))
    }

    fn s_inv_pow(s2: &Ival, k: u32, prec: Option<u32>) -> Result<Ival, EvalError> {
        if s2.lo().signum() <= 0 {
            return Err(ExactError::Domain(format!("s^2 enclosure {s2} not positive")).into());
        }
        let d = prec.map(|p| p + 6).unwrap_or(EXACT_SQRT_DIGITS);
        let s = Ival::new(sqrt_lo(s2.lo(), d)?, sqrt_hi(s2.hi(), d)?)?;
        let p = s.powi(-(k as i32))?;
        Ok(round(p, prec))
    }
}

/// Variable bindings plus per-evaluation caches for s-powers and φ values.
pub struct Env<N: Num> {
    pub vars: Vec<Option<N>>,
    pub prec: Option<u32>,
    pub nvars: usize,
    sinv: Vec<Option<N>>,
    phis: Vec<Option<N>>,
}

impl<N: Num> Env<N> {
    pub fn new(vars: Vec<Option<N>>, prec: Option<u32>, nvars: usize) -> Env<N> {
        assert_eq!(vars.len(), NVARS);
        Env { vars, prec, nvars, sinv: vec![None; 16], phis: vec![None; NPHI + 1] }
    }

    /// Pins φ_i to a given value (for substituting certified ranges).
    pub fn set_phi(&mut self, i: usize, v: N) {
        self.phis[i] = Some(v);
    }

    fn var(&self, i: usize) -> Result<&N, EvalError> {
        self.vars[i].as_ref().ok_or_else(|| EvalError::MissingVar(var_name(i)))
    }

    pub fn eval(&mut self, e: &Expr) -> Result<N, EvalError> {
        let p = self.prec;
        match e {
            Expr::Const(c) => Ok(N::konst(c, self.nvars)),
            Expr::Var(i) => Ok(self.var(*i)?.clone()),
            Expr::SInv(kk) => {
                let kk = *kk as usize;
                if let Some(v) = &self.sinv[kk] {
                    return Ok(v.clone());
                }
                let x1 = self.var(0)?.clone();
                let x3 = self.var(2)?.clone();
                let four = N::konst(&Rat::int(4), self.nvars);
                let s2 = four.mul(&x1.powi(2, p)?, p).add(&x3.powi(2, p)?);
                let v = N::s_inv_pow(&s2, kk as u32, p)?;
                self.sinv[kk] = Some(v.clone());
                Ok(v)
            }
            Expr::Phi(i) => {
                if *i == 0 || *i > NPHI {
                    return Err(EvalError::UnknownPhi(*i));
                }
                if let Some(v) = &self.phis[*i] {
                    return Ok(v.clone());
                }
                let v = self.eval(dictionary().def(*i))?;
                self.phis[*i] = Some(v.clone());
                Ok(v)
            }
            Expr::Sum(v) => {
                let mut acc = self.eval(&v[0])?;
                for t in &v[1..] {
                    acc = acc.add(&self.eval(t)?);
                }
                Ok(acc)
            }
            Expr::Prod(v) => {
                let mut acc = self.eval(&v[0])?;
                for t in &v[1..] {
                    acc = acc.mul(&self.eval(t)?, p);
                }
                Ok(acc)
            }
            Expr::Neg(e) => Ok(self.eval(e)?.neg()),
            Expr::Pow(e, n) => self.eval(e)?.powi(*n, p),
        }
    }
}

/// The a0 of the proof constants; φ54..φ58 are differences against it.
pub fn a0() -> Rat {
    Rat::frac(43170475352787, 10_000_000_000_000)
}

pub struct Dictionary {
    defs: Vec<Expr>,
    table: Vec<Ival>,
    vars: Vec<u16>,
}

impl Dictionary {
    pub fn def(&self, i: usize) -> &Expr {
        &self.defs[i]
    }

    /// The printed bound pair B(φ_i).
    pub fn table(&self, i: usize) -> &Ival {
        &self.table[i]
    }

    pub fn vars_of(&self, i: usize) -> u16 {
        self.vars[i]
    }

    /// True for entries defined through other φ's.
    pub fn is_composite(&self, i: usize) -> bool {
        let mut v = Vec::new();
        self.defs[i].phis(&mut v);
        !v.is_empty()
    }
}

/// Entries whose printed text differs from what is implemented.
pub fn dictionary_notes(i: usize) -> Option<&'static str> {
    match i {
        22 => Some("printed as phi21 + 2 x5 phi1 + x7 phi13; the (8,3) Jacobian entry of G needs phi11 in place of phi1"),
        58 => Some("bound pair printed under the label B(phi57)"),
        _ => None,
    }
}

const TABLE: [(usize, &str, &str); NPHI] = [
    (1, "-102003/125000", "237/50000"),
    (2, "-387429/1000000", "373771/1000000"),
    (3, "215419/500000", "483423/1000000"),
    (4, "-94797/200000", "-115837/1000000"),
    (5, "-301/200000", "101747/500000"),
    (6, "-83881/200000", "-108213/1000000"),
    (7, "-12789/125000", "-86081/1000000"),
    (8, "-3273/500000", "18809/125000"),
    (9, "-1911/1000000", "193837/1000000"),
    (10, "-52523/1000000", "73229/250000"),
    (11, "-34393/500000", "637/1000000"),
    (12, "-10507/1000000", "31051/125000"),
    (13, "44031/500000", "9611/40000"),
    (14, "-285649/1000000", "2157/500000"),
    (15, "-10719/1000000", "13/40000"),
    (16, "-75543/500000", "563009/1000000"),
    (17, "-150409/500000", "1153481/1000000"),
    (18, "-85201/500000", "113003/1000000"),
    (19, "-10003/500000", "475393/1000000"),
    (20, "-191879/1000000", "9681/200000"),
    (21, "-324799/1000000", "-257987/1000000"),
    (22, "-147363/1000000", "289227/500000"),
    (23, "-961/40000", "32973/500000"),
    (24, "-1617/125000", "69167/200000"),
    (25, "-15923/250000", "8349/500000"),
    (26, "-85577/1000000", "1011/1000000"),
    (27, "-33469/250000", "4507/200000"),
    (28, "-64021/1000000", "7643/40000"),
    (29, "-12111/125000", "314853/1000000"),
    (30, "-41247/100000", "505637/1000000"),
    (31, "-118703/1000000", "73297/1000000"),
    (32, "-337/1000000", "6067/200000"),
    (33, "-105549/1000000", "25351/1000000"),
    (34, "-1411/3125", "37563/250000"),
    (35, "-45369/1000000", "11/8000"),
    (36, "-113807/1000000", "406413/1000000"),
    (37, "-579/4000", "-2871/50000"),
    (38, "-2459/1000000", "138773/1000000"),
    (39, "-117597/1000000", "400107/1000000"),
    (40, "-2853/1000000", "32303/500000"),
    (41, "-19173/20000", "83109/500000"),
    (42, "-19549/500000", "205701/250000"),
    (43, "-9163/1000000", "256717/500000"),
    (44, "-3447/50000", "152321/500000"),
    (45, "-280299/1000000", "197197/1000000"),
    (46, "-7757/1000000", "10303/31250"),
    (47, "-12111/125000", "314853/1000000"),
    (48, "-203233/500000", "35511/62500"),
    (49, "-67831/1000000", "30533/200000"),
    (50, "-105939/250000", "218721/1000000"),
    (51, "44031/500000", "9611/40000"),
    (52, "-141351/1000000", "53783/250000"),
    (53, "-569761/1000000", "429957/1000000"),
    (54, "-19/500000", "19/500000"),
    (55, "-1/200000", "1/200000"),
    (56, "-1/40000", "1/40000"),
    (57, "-3/1000000", "3/1000000"),
    (58, "-1/1000000", "1/1000000"),
];

fn definitions() -> Vec<Expr> {
    let x1 = || x(1);
    let x3 = || x(3);
    let am = || a() - kr(a0());
    let ap = || a() + kr(a0());
    let mut d = vec![Expr::zero(); NPHI + 1];
    d[1] = k(-400) * x1() * sinv(3);
    d[2] = k(100) * pw(a(), 2) * pw(x3(), -3) - k(25) * pw(x3(), -2) - k(200) * x3() * sinv(3);
    d[3] = k(10) * a() * pw(x3(), -2);
    d[4] = k(-400) * (pw(x3(), 2) - k(8) * pw(x1(), 2)) * sinv(5);
    d[5] = k(1200) * x1() * x3() * sinv(5);
    d[6] = k(50)
        * (k(-6) * pw(a(), 2) * pw(x3(), -4) + k(12) * pw(x3(), 2) * sinv(5) - k(4) * sinv(3)
            + pw(x3(), -3));
    d[7] = k(-20) * a() * pw(x3(), -3);
    d[8] = k(-1200) * (k(16) * pw(x1(), 2) * x3() - pw(x3(), 3)) * sinv(7);
    d[9] = k(-4800) * (k(8) * pw(x1(), 3) - k(3) * x1() * pw(x3(), 2)) * sinv(7);
    d[10] = x(4) * phi(8) + x(2) * phi(9);
    d[11] = k(4800) * (pw(x1(), 3) - x1() * pw(x3(), 2)) * sinv(7);
    d[12] = x(4) * phi(11) + x(2) * phi(8);
    d[13] = k(1200) * pw(a(), 2) * pw(x3(), -5) - k(3000) * pw(x3(), 3) * sinv(7)
        + k(1800) * x3() * sinv(5)
        - k(150) * pw(x3(), -4);
    d[14] = x(4) * phi(13) + k(2) * x(2) * phi(11);
    d[15] = k(60) * a() * x(4) * pw(x3(), -4);
    d[16] = k(400)
        * (k(8) * x(5) * pw(x1(), 2) + k(3) * x3() * x(7) * x1() - pw(x3(), 2) * x(5))
        * sinv(5);
    d[17] = k(-10) * phi(7) + k(2) * x(5) * phi(5) + x(7) * phi(6);
    d[18] = k(10) * (x3() - k(2) * a() * x(7)) * pw(x3(), -3);
    d[19] = x(5) * phi(9) + x(7) * phi(8);
    d[20] = x(5) * phi(8) + x(7) * phi(11);
    d[21] = k(-600) * a() * pw(x3(), -4);
    d[22] = phi(21) + k(2) * x(5) * phi(11) + x(7) * phi(13);
    d[23] = k(60) * a() * x(7) * pw(x3(), -4) - k(20) * pw(x3(), -3);
    d[24] = x(8) * phi(8) + x(6) * phi(9);
    d[25] = k(-4800) * (k(16) * pw(x1(), 4) - k(27) * pw(x3(), 2) * pw(x1(), 2) + pw(x3(), 4)) * sinv(9);
    d[26] = k(24000) * (k(16) * pw(x1(), 3) * x3() - k(3) * x1() * pw(x3(), 3)) * sinv(9);
    d[27] = x(4) * phi(25) + x(2) * phi(26);
    d[28] = k(4800) * (k(128) * pw(x1(), 4) - k(96) * pw(x3(), 2) * pw(x1(), 2) + k(3) * pw(x3(), 4)) * sinv(9);
    d[29] = x(2) * phi(28) + x(4) * phi(26);
    d[30] = phi(24) + x(7) * phi(27) + x(5) * phi(29);
    d[31] = x(6) * phi(8) + x(8) * phi(11);
    d[32] = k(-24000) * (k(3) * pw(x1(), 3) * x3() - x1() * pw(x3(), 3)) * sinv(9);
    d[33] = x(2) * phi(25) + x(4) * phi(32);
    d[34] = phi(31) + x(7) * phi(33) + x(5) * phi(27);
    d[35] = k(2400) * a() * x(4) * pw(x3(), -5);
    d[36] = phi(35) + x(8) * phi(13) + k(2) * x(6) * phi(11);
    d[37] = k(600)
        * (k(-10) * pw(a(), 2) * pw(x3(), -6) + k(8) * pw(x3(), 4) * sinv(9)
            - k(108) * pw(x1(), 2) * pw(x3(), 2) * sinv(9)
            + k(12) * pw(x1(), 2) * sinv(7)
            + pw(x3(), -5));
    d[38] = x(4) * phi(37) + k(2) * x(2) * phi(32);
    d[39] = phi(36) + k(2) * x(5) * phi(33) + x(7) * phi(38);
    d[40] = k(60) * (x3() * (a() * x(8) + x(4)) - k(4) * a() * x(4) * x(7)) * pw(x3(), -5);
    d[41] = k(400)
        * (k(8) * x(9) * pw(x1(), 2) + k(3) * x3() * x(11) * x1() - pw(x3(), 2) * x(9))
        * sinv(5);
    d[42] = k(2) * x(9) * phi(5) + x(11) * phi(6);
    d[43] = x(11) * phi(8) + x(9) * phi(9);
    d[44] = x(11) * phi(11) + x(9) * phi(8);
    d[45] = k(2) * x(9) * phi(11) + x(11) * phi(13);
    d[46] = x(12) * phi(8) + x(10) * phi(9);
    d[47] = x(4) * phi(26) + x(2) * phi(28);
    d[48] = x(11) * phi(27) + x(9) * phi(47) + phi(46);
    d[49] = x(12) * phi(11) + x(10) * phi(8);
    d[50] = x(9) * phi(27) + x(11) * phi(33) + phi(49);
    d[51] = k(1200) * pw(a(), 2) * pw(x3(), -5) - k(1200) * pw(x3(), 5) * sinv(9)
        + k(2400) * pw(x1(), 2) * pw(x3(), 3) * sinv(9)
        + k(28800) * pw(x1(), 4) * x3() * sinv(9)
        - k(150) * pw(x3(), -4);
    d[52] = k(2) * x(10) * phi(11) + x(12) * phi(51);
    d[53] = k(2) * x(9) * phi(33) + x(11) * phi(38) + phi(52);
    d[54] = k(100) * am() * ap() * pw(x3(), -3);
    d[55] = k(10) * am() * pw(x3(), -2);
    d[56] = k(-100) * am() * (k(3) * a() * x(7) + k(3) * kr(a0()) * x(7) - k(2) * x3()) * pw(x3(), -4);
    d[57] = k(-20) * x(7) * am() * pw(x3(), -3);
    d[58] = k(-300) * x(11) * am() * ap() * pw(x3(), -4);
    d
}

/// The dictionary, built once.
pub fn dictionary() -> &'static Dictionary {
    static D: OnceLock<Dictionary> = OnceLock::new();
    D.get_or_init(|| {
        let defs = definitions();
        let mut table = vec![Ival::zero(); NPHI + 1];
        for (i, lo, hi) in TABLE {
            table[i] = Ival::new(lo.parse().unwrap(), hi.parse().unwrap()).unwrap();
        }
        // children always have smaller indices, so one forward pass resolves masks
        let mut vars = vec![0u16; NPHI + 1];
        for i in 1..=NPHI {
            vars[i] = mask_with(&defs[i], &vars);
        }
        Dictionary { defs, table, vars }
    })
}

fn mask_with(e: &Expr, known: &[u16]) -> u16 {
    match e {
        Expr::Const(_) => 0,
        Expr::Var(i) => 1 << i,
        Expr::SInv(_) => 1 | (1 << 2),
        Expr::Phi(i) => known[*i],
        Expr::Sum(v) | Expr::Prod(v) => v.iter().fold(0, |m, t| m | mask_with(t, known)),
        Expr::Neg(t) | Expr::Pow(t, _) => mask_with(t, known),
    }
}

/// I1..I13 of the dictionary, i.e. the box V.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub iv: Vec<Ival>,
}

impl DomainBox {
    pub fn v() -> DomainBox {
        let i = |a: i64, b: i64, c: i64, d: i64| Ival::frac(a, b, c, d);
        DomainBox {
            iv: vec![
                i(-1, 100, 62, 25),
                i(-1, 100, 3, 2),
                i(189, 20, 1001, 100),
                i(-33, 100, 1, 100),
                i(-1, 100, 31, 100),
                i(-1, 100, 12, 25),
                i(-1, 100, 69, 25),
                i(-1, 100, 42, 25),
                i(-1, 100, 101, 50),
                i(1, 2, 101, 100),
                i(-1, 100, 81, 100),
                i(-1, 100, 89, 100),
                i(43170106052787, 10_000_000_000_000, 43170844652787, 10_000_000_000_000),
            ],
        }
    }

    /// `I_j` with the 1-based index.
    pub fn i(&self, j: usize) -> &Ival {
        &self.iv[j - 1]
    }

    /// Bindings for every variable of the box.
    pub fn bindings(&self) -> Vec<Option<Ival>> {
        self.iv.iter().cloned().map(Some).collect()
    }
}

/// J5, the Θ box of the W run.
pub fn j5() -> Ival {
    Ival::frac(-1, 100, 7, 5)
}

/// J9, the Θ_a box of the G run.
pub fn j9() -> Ival {
    Ival::frac(-1, 100, 3, 25)
}

/// Values of x1..x12 and a; unset coordinates are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePoint {
    pub vars: Vec<Option<Ival>>,
}

impl StatePoint {
    pub fn empty() -> StatePoint {
        StatePoint { vars: vec![None; NVARS] }
    }

    pub fn with(mut self, var: usize, v: Ival) -> StatePoint {
        self.vars[var] = Some(v);
        self
    }

    /// Errors unless every variable in `mask` is bound and lies inside `dom`.
    pub fn check_inside(&self, mask: u16, dom: &DomainBox) -> Result<(), EvalError> {
        for i in 0..NVARS {
            if mask & (1 << i) == 0 {
                continue;
            }
            let v = self.vars[i].as_ref().ok_or_else(|| EvalError::MissingVar(var_name(i)))?;
            if !v.subset_of(&dom.iv[i]) {
                return Err(EvalError::OutsideDomain {
                    var: var_name(i),
                    value: v.to_string(),
                    domain: dom.iv[i].to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Sound enclosure of φ_i at `p`; the referenced coordinates must lie in V.
pub fn eval_phi(i: usize, p: &StatePoint, prec: Option<u32>) -> Result<Ival, EvalError> {
    if i == 0 || i > NPHI {
        return Err(EvalError::UnknownPhi(i));
    }
    p.check_inside(dictionary().vars_of(i), &DomainBox::v())?;
    Env::new(p.vars.clone(), prec, 0).eval(&phi(i))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldName {
    W,
    G,
    U,
    W1,
    G1,
    U1,
    W2,
    G2,
    U2,
    #[serde(rename = "dW")]
    DeltaW,
    #[serde(rename = "dG")]
    DeltaG,
    #[serde(rename = "dU")]
    DeltaU,
}

impl FieldName {
    pub fn parse(s: &str) -> Option<FieldName> {
        use FieldName::*;
        Some(match s {
            "W" => W,
            "G" => G,
            "U" => U,
            "W1" => W1,
            "G1" => G1,
            "U1" => U1,
            "W2" => W2,
            "G2" => G2,
            "U2" => U2,
            "dW" => DeltaW,
            "dG" => DeltaG,
            "dU" => DeltaU,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixName {
    DW,
    DW1,
    DG,
    DG1,
    DU,
    DU1,
}

/// One state coordinate: a label and the dictionary variable it feeds, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Coord {
    pub label: &'static str,
    pub var: Option<usize>,
}

/// A vector field with transcribed first derivative matrices.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub name: String,
    pub coords: Vec<Coord>,
    pub components: Vec<Expr>,
    /// `Df`, rows indexed like the components.
    pub jac: Vec<Vec<Expr>>,
    /// `D F1` where `F1 = Df f`; needed for the order-2 constants.
    pub jac1: Option<Vec<Vec<Expr>>>,
    /// The box U2 per coordinate, when the field has one.
    pub domain: Option<Vec<Ival>>,
}

fn z() -> Expr {
    Expr::zero()
}

fn p(i: usize) -> Expr {
    phi(i)
}

fn two(e: Expr) -> Expr {
    k(2) * e
}

pub fn matrix(m: MatrixName) -> Vec<Vec<Expr>> {
    let one = || k(1);
    match m {
        MatrixName::DW => vec![
            vec![z(), one(), z(), z(), z()],
            vec![p(4), z(), p(5), z(), z()],
            vec![z(), z(), z(), one(), z()],
            vec![two(p(5)), z(), p(6), z(), z()],
            vec![z(), z(), p(7), z(), z()],
        ],
        MatrixName::DW1 => vec![
            vec![p(4), z(), p(5), z(), z()],
            vec![p(10), p(4), p(12), p(5), z()],
            vec![two(p(5)), z(), p(6), z(), z()],
            vec![two(p(12)), two(p(5)), p(14), p(6), z()],
            vec![z(), z(), p(15), p(7), z()],
        ],
        MatrixName::DG => vec![
            vec![z(), one(), z(), z(), z(), z(), z(), z(), z()],
            vec![p(4), z(), p(5), z(), z(), z(), z(), z(), z()],
            vec![z(), z(), z(), one(), z(), z(), z(), z(), z()],
            vec![two(p(5)), z(), p(6), z(), z(), z(), z(), z(), z()],
            vec![z(), z(), z(), z(), z(), one(), z(), z(), z()],
            vec![p(19), z(), p(20), z(), p(4), z(), p(5), z(), z()],
            vec![z(), z(), z(), z(), z(), z(), z(), one(), z()],
            vec![two(p(20)), z(), p(22), z(), two(p(5)), z(), p(6), z(), z()],
            vec![z(), z(), p(23), z(), z(), z(), p(7), z(), z()],
        ],
        MatrixName::DG1 => vec![
            vec![p(4), z(), p(5), z(), z(), z(), z(), z(), z()],
            vec![p(10), p(4), p(12), p(5), z(), z(), z(), z(), z()],
            vec![two(p(5)), z(), p(6), z(), z(), z(), z(), z(), z()],
            vec![two(p(12)), two(p(5)), p(14), p(6), z(), z(), z(), z(), z()],
            vec![p(19), z(), p(20), z(), p(4), z(), p(5), z(), z()],
            vec![p(30), p(19), p(34), p(20), p(10), p(4), p(12), p(5), z()],
            vec![two(p(20)), z(), p(22), z(), two(p(5)), z(), p(6), z(), z()],
            vec![two(p(34)), two(p(20)), p(39), p(22), two(p(12)), two(p(5)), p(14), p(6), z()],
            vec![z(), z(), p(40), p(23), z(), z(), p(15), p(7), z()],
        ],
        MatrixName::DU => vec![
            vec![z(), one(), z(), z(), z(), z(), z(), z()],
            vec![p(4), z(), p(5), z(), z(), z(), z(), z()],
            vec![z(), z(), z(), one(), z(), z(), z(), z()],
            vec![two(p(5)), z(), p(6), z(), z(), z(), z(), z()],
            vec![z(), z(), z(), z(), z(), one(), z(), z()],
            vec![p(43), z(), p(44), z(), p(4), z(), p(5), z()],
            vec![z(), z(), z(), z(), z(), z(), z(), one()],
            vec![two(p(44)), z(), p(45), z(), two(p(5)), z(), p(6), z()],
        ],
        MatrixName::DU1 => vec![
            vec![p(4), z(), p(5), z(), z(), z(), z(), z()],
            vec![p(10), p(4), p(12), p(5), z(), z(), z(), z()],
            vec![two(p(5)), z(), p(6), z(), z(), z(), z(), z()],
            vec![two(p(12)), two(p(5)), p(14), p(6), z(), z(), z(), z()],
            vec![p(43), z(), p(44), z(), p(4), z(), p(5), z()],
            vec![p(48), p(43), p(50), p(44), p(10), p(4), p(12), p(5)],
            vec![two(p(44)), z(), p(45), z(), two(p(5)), z(), p(6), z()],
            vec![two(p(50)), two(p(44)), p(53), p(45), two(p(12)), two(p(5)), p(14), p(6)],
        ],
    }
}

/// `M·v` as expressions, dropping structural zeros.
pub fn mat_vec(m: &[Vec<Expr>], v: &[Expr]) -> Vec<Expr> {
    m.iter()
        .map(|row| {
            let terms: Vec<Expr> = row
                .iter()
                .zip(v)
                .filter(|(e, c)| !e.is_zero() && !c.is_zero())
                .map(|(e, c)| match e {
                    Expr::Const(one) if *one == Rat::one() => c.clone(),
                    _ => e.clone() * c.clone(),
                })
                .collect();
            match terms.len() {
                0 => Expr::zero(),
                1 => terms.into_iter().next().unwrap(),
                _ => Expr::Sum(terms),
            }
        })
        .collect()
}

fn coord(label: &'static str, var: Option<usize>) -> Coord {
    Coord { label, var }
}

impl FieldSpec {
    pub fn get(name: FieldName) -> FieldSpec {
        use FieldName::*;
        let v = DomainBox::v();
        let base = |n: &str, coords: Vec<Coord>, comps: Vec<Expr>, d: MatrixName, d1: MatrixName, dom: Vec<Ival>| FieldSpec {
            name: n.to_string(),
            coords,
            components: comps,
            jac: matrix(d),
            jac1: Some(matrix(d1)),
            domain: Some(dom),
        };
        let w_coords = || {
            vec![coord("x1", Some(0)), coord("x2", Some(1)), coord("x3", Some(2)), coord("x4", Some(3)), coord("theta", None)]
        };
        let g_coords = || {
            vec![
                coord("x1", Some(0)),
                coord("x2", Some(1)),
                coord("x3", Some(2)),
                coord("x4", Some(3)),
                coord("x5", Some(4)),
                coord("x6", Some(5)),
                coord("x7", Some(6)),
                coord("x8", Some(7)),
                coord("theta_a", None),
            ]
        };
        let u_coords = || {
            vec![
                coord("x1", Some(0)),
                coord("x2", Some(1)),
                coord("x3", Some(2)),
                coord("x4", Some(3)),
                coord("x9", Some(8)),
                coord("x10", Some(9)),
                coord("x11", Some(10)),
                coord("x12", Some(11)),
            ]
        };
        let w = || vec![x(2), p(1), x(4), p(2), p(3)];
        let g = || vec![x(2), p(1), x(4), p(2), x(6), p(16), x(8), p(17), p(18)];
        let u = || vec![x(2), p(1), x(4), p(2), x(10), p(41), x(12), p(42)];
        let w_dom = || vec![v.i(1).clone(), v.i(2).clone(), v.i(3).clone(), v.i(4).clone(), j5()];
        let g_dom = || {
            let mut d: Vec<Ival> = (1..=8).map(|j| v.i(j).clone()).collect();
            d.push(j9());
            d
        };
        let u_dom = || [1, 2, 3, 4, 9, 10, 11, 12].iter().map(|&j| v.i(j).clone()).collect::<Vec<_>>();
        let derived = |n: &str, coords: Vec<Coord>, comps: Vec<Expr>, d: Vec<Vec<Expr>>, dom: Vec<Ival>| FieldSpec {
            name: n.to_string(),
            coords,
            components: comps,
            jac: d,
            jac1: None,
            domain: Some(dom),
        };
        match name {
            W => base("W", w_coords(), w(), MatrixName::DW, MatrixName::DW1, w_dom()),
            G => base("G", g_coords(), g(), MatrixName::DG, MatrixName::DG1, g_dom()),
            U => base("U", u_coords(), u(), MatrixName::DU, MatrixName::DU1, u_dom()),
            W1 => derived("W1", w_coords(), mat_vec(&matrix(MatrixName::DW), &w()), matrix(MatrixName::DW1), w_dom()),
            G1 => derived("G1", g_coords(), mat_vec(&matrix(MatrixName::DG), &g()), matrix(MatrixName::DG1), g_dom()),
            U1 => derived("U1", u_coords(), mat_vec(&matrix(MatrixName::DU), &u()), matrix(MatrixName::DU1), u_dom()),
            W2 => derived("W2", w_coords(), mat_vec(&matrix(MatrixName::DW1), &w()), vec![], w_dom()),
            G2 => derived("G2", g_coords(), mat_vec(&matrix(MatrixName::DG1), &g()), vec![], g_dom()),
            U2 => derived("U2", u_coords(), mat_vec(&matrix(MatrixName::DU1), &u()), vec![], u_dom()),
            DeltaW => derived("dW", w_coords(), vec![z(), z(), z(), p(54), p(55)], vec![], w_dom()),
            DeltaG => derived("dG", g_coords(), vec![z(), z(), z(), p(54), z(), z(), z(), p(56), p(57)], vec![], g_dom()),
            DeltaU => derived("dU", u_coords(), vec![z(), z(), z(), p(54), z(), z(), z(), p(58)], vec![], u_dom()),
        }
    }

    /// The scalar field `y - y^2/3` of the introductory example.
    pub fn intro() -> FieldSpec {
        FieldSpec {
            name: "intro".to_string(),
            coords: vec![coord("y", Some(0))],
            components: vec![x(1) - kr(Rat::frac(1, 3)) * pw(x(1), 2)],
            jac: vec![vec![k(1) - kr(Rat::frac(2, 3)) * x(1)]],
            jac1: None,
            domain: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `F1 = Df f`.
    pub fn f1_components(&self) -> Vec<Expr> {
        mat_vec(&self.jac, &self.components)
    }

    /// `F2 = D F1 f`, available when `jac1` is transcribed.
    pub fn f2_components(&self) -> Option<Vec<Expr>> {
        self.jac1.as_ref().map(|j1| mat_vec(j1, &self.components))
    }

    /// `(0, b, 10, 0, ...)` with the extra 1 in the U slot for F_b-dot.
    pub fn initial_state(&self, b: &Rat) -> Vec<Rat> {
        let mut s = vec![Rat::zero(); self.dim()];
        if self.dim() >= 3 {
            s[1] = b.clone();
            s[2] = Rat::int(10);
        }
        if self.name == "U" || self.name == "U1" {
            s[5] = Rat::one();
        }
        s
    }

    /// Binds the coordinates and the parameter into a [`StatePoint`].
    pub fn state_point(&self, z: &[Ival], a: Option<Ival>) -> StatePoint {
        let mut p = StatePoint::empty();
        for (c, v) in self.coords.iter().zip(z) {
            if let Some(i) = c.var {
                p.vars[i] = Some(v.clone());
            }
        }
        p.vars[VAR_A] = a;
        p
    }

    /// Component-wise enclosure of the field at `p`.
    pub fn eval(&self, p: &StatePoint, prec: Option<u32>) -> Result<Vec<Ival>, EvalError> {
        let mut env = Env::new(p.vars.clone(), prec, 0);
        self.components.iter().map(|c| env.eval(c)).collect()
    }
}

/// Result of bounding a Frobenius norm: the exact sum of squared entry
/// magnitudes and a rational upper bound on its square root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusBound {
    pub sum_sq: Rat,
    pub bound: Rat,
}

/// Upper bound on `sqrt(sum of squared entries)` over `vars`, optionally with
/// some φ pinned to given ranges.
pub fn frobenius_bound(
    m: MatrixName,
    vars: &[Option<Ival>],
    phi_ranges: Option<&[Option<Ival>]>,
) -> Result<FrobeniusBound, EvalError> {
    let mut env = Env::new(vars.to_vec(), None, 0);
    if let Some(r) = phi_ranges {
        for (i, v) in r.iter().enumerate() {
            if let Some(v) = v {
                env.set_phi(i, v.clone());
            }
        }
    }
    let mut sum = Rat::zero();
    for row in matrix(m) {
        for e in row {
            if e.is_zero() {
                continue;
            }
            let mg = env.eval(&e)?.mag();
            sum = sum + &mg * &mg;
        }
    }
    let bound = sqrt_enclosure(&sum, &Rat::pow10(-12))?.hi().clone();
    Ok(FrobeniusBound { sum_sq: sum, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x1: Rat, x3: Rat, a: Rat) -> StatePoint {
        StatePoint::empty()
            .with(0, Ival::point(x1))
            .with(2, Ival::point(x3))
            .with(VAR_A, Ival::point(a))
    }

    #[test]
    fn phi1_vanishes_at_x1_zero() {
        let v = eval_phi(1, &pt(Rat::zero(), Rat::frac(39, 4), a0()), Some(30)).unwrap();
        assert_eq!(v, Ival::zero());
    }

    #[test]
    fn phi2_exact_at_s_ten() {
        let v = eval_phi(2, &pt(Rat::zero(), Rat::int(10), a0()), None).unwrap();
        let want = a0().pow(2).unwrap() * Rat::frac(1, 10) - Rat::frac(1, 4) - Rat::int(2);
        assert_eq!(v, Ival::point(want));
    }

    #[test]
    fn outside_domain_is_reported() {
        let e = eval_phi(1, &pt(Rat::int(5), Rat::int(10), a0()), Some(20));
        assert!(matches!(e, Err(EvalError::OutsideDomain { .. })));
        let e = eval_phi(1, &StatePoint::empty(), Some(20));
        assert!(matches!(e, Err(EvalError::MissingVar(_))));
    }

    #[test]
    fn w_at_initial_state_is_rational() {
        let w = FieldSpec::get(FieldName::W);
        let b0 = Rat::frac(1490359743, 1_000_000_000);
        let z: Vec<Ival> = w.initial_state(&b0).into_iter().map(Ival::point).collect();
        let vals = w.eval(&w.state_point(&z, Some(Ival::point(a0()))), None).unwrap();
        let a2 = a0().pow(2).unwrap();
        let want = [b0, Rat::zero(), Rat::zero(), a2 * Rat::frac(1, 10) - Rat::frac(9, 4), a0() * Rat::frac(1, 10)];
        for (v, w) in vals.iter().zip(want) {
            assert_eq!(*v, Ival::point(w));
        }
    }

    #[test]
    fn delta_fields_shape() {
        let d = FieldSpec::get(FieldName::DeltaW);
        assert_eq!(d.components, vec![z(), z(), z(), p(54), p(55)]);
        let d = FieldSpec::get(FieldName::DeltaG);
        assert_eq!(d.components, vec![z(), z(), z(), p(54), z(), z(), z(), p(56), p(57)]);
    }

    #[test]
    fn i13_matches_constants() {
        let v = DomainBox::v();
        let w = Rat::int(3) * (Rat::frac(1197, 100_000_000) + Rat::frac(17, 50_000_000));
        assert_eq!(*v.i(13), Ival::new(a0() - &w, a0() + &w).unwrap());
        assert_eq!(*v.i(3), Ival::frac(189, 20, 1001, 100));
    }

    #[test]
    fn zero_matrix_has_zero_norm() {
        // every entry of DW's first row except one is zero; a constant matrix check
        let b = frobenius_bound(MatrixName::DW, &DomainBox::v().bindings(), Some(&vec![Some(Ival::zero()); NPHI + 1])).unwrap();
        assert_eq!(b.sum_sq, Rat::int(2));
    }

    #[test]
    fn masks() {
        let d = dictionary();
        assert_eq!(d.vars_of(1), 0b101);
        assert_eq!(d.vars_of(3), 0b101 & 0b100 | (1 << VAR_A));
        assert!(d.is_composite(10));
        assert!(!d.is_composite(13));
    }
}

//! Certificates: Poincaré–Miranda rectangles, the implicit-function region
//! check, Θ comparisons against 7π/18, and the final periodicity assembly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exact::{pi_enclosure, Ival, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofConstants {
    pub a0: Rat,
    pub da: Rat,
    pub sa: Rat,
    pub b0: Rat,
    pub sb: Rat,
    pub t0: Rat,
    pub dt: Rat,
    pub st: Rat,
}

impl Default for ProofConstants {
    fn default() -> Self {
        ProofConstants {
            a0: Rat::frac(43170475352787, 10_000_000_000_000),
            da: Rat::frac(17, 50_000_000),
            sa: Rat::frac(1197, 100_000_000),
            b0: Rat::frac(1490359743, 1_000_000_000),
            sb: Rat::frac(1, 50_000),
            t0: Rat::frac(13366894627923, 5_000_000_000_000),
            dt: Rat::frac(1, 2_500_000),
            st: Rat::frac(11, 2_000_000),
        }
    }
}

impl ProofConstants {
    /// 6(st + dt), the half-width of the t window.
    pub fn t_window(&self) -> Rat {
        Rat::int(6) * (&self.st + &self.dt)
    }

    /// 3(sa + da), the half-width of the a window.
    pub fn a_window(&self) -> Rat {
        Rat::int(3) * (&self.sa + &self.da)
    }

    /// t0 + 6(st + dt), the time span used by the comparison bounds.
    pub fn comparison_span(&self) -> Rat {
        &self.t0 + &self.t_window()
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        [
            ("a0", &self.a0),
            ("da", &self.da),
            ("sa", &self.sa),
            ("b0", &self.b0),
            ("sb", &self.sb),
            ("t0", &self.t0),
            ("dt", &self.dt),
            ("st", &self.st),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Worst of two verdicts: fail beats inconclusive beats pass.
    pub fn and(self, o: Verdict) -> Verdict {
        use Verdict::*;
        match (self, o) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    Bound,
    Existence,
    Uniqueness,
    ThetaComparison,
    Periodicity,
}

/// One exact inequality of a transcript, or a logical fact when both sides
/// are absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Rat>,
    pub rel: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Rat>,
    /// rhs − lhs for `<`/`<=`, lhs − rhs for `>`/`>=`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<Rat>,
    pub holds: bool,
}

impl Check {
    fn cmp(label: &str, lhs: &Rat, rel: &str, rhs: &Rat) -> Check {
        let (holds, margin) = match rel {
            "<" => (lhs < rhs, rhs - lhs),
            "<=" => (lhs <= rhs, rhs - lhs),
            ">" => (lhs > rhs, lhs - rhs),
            ">=" => (lhs >= rhs, lhs - rhs),
            "=" => (lhs == rhs, rhs - lhs),
            _ => unreachable!("unknown relation {rel}"),
        };
        Check {
            label: label.to_string(),
            lhs: Some(lhs.clone()),
            rel: rel.to_string(),
            rhs: Some(rhs.clone()),
            margin: Some(margin),
            holds,
        }
    }

    pub fn lt(label: &str, lhs: &Rat, rhs: &Rat) -> Check {
        Check::cmp(label, lhs, "<", rhs)
    }

    pub fn le(label: &str, lhs: &Rat, rhs: &Rat) -> Check {
        Check::cmp(label, lhs, "<=", rhs)
    }

    pub fn gt(label: &str, lhs: &Rat, rhs: &Rat) -> Check {
        Check::cmp(label, lhs, ">", rhs)
    }

    pub fn eq(label: &str, lhs: &Rat, rhs: &Rat) -> Check {
        Check::cmp(label, lhs, "=", rhs)
    }

    pub fn fact(label: &str, holds: bool) -> Check {
        Check { label: label.to_string(), lhs: None, rel: "holds".into(), rhs: None, margin: None, holds }
    }

    /// Re-evaluates the inequality from the stored sides.
    pub fn recheck(&self) -> bool {
        match (&self.lhs, &self.rhs) {
            (Some(l), Some(r)) => Check::cmp(&self.label, l, &self.rel, r).holds == self.holds,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    pub name: String,
    pub inputs: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub transcript: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip)]
    inconclusive: bool,
}

impl Certificate {
    pub fn new(kind: CertKind, name: &str) -> Certificate {
        Certificate {
            kind,
            name: name.to_string(),
            inputs: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            transcript: Vec::new(),
            notes: Vec::new(),
            inconclusive: false,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.transcript.push(c);
    }

    pub fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    pub fn input(&mut self, k: &str, v: String) {
        self.inputs.insert(k.to_string(), v);
    }

    /// Marks the certificate undecided; a failing check still makes it fail.
    pub fn set_inconclusive(&mut self) {
        self.inconclusive = true;
    }

    pub fn finish(&mut self) {
        let all = self.transcript.iter().all(|c| c.holds);
        self.verdict = if !all {
            Verdict::Fail
        } else if self.inconclusive || self.transcript.is_empty() {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn check(&self, label: &str) -> Option<&Check> {
        self.transcript.iter().find(|c| c.label == label)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Pos,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    /// t = t_lo, needs F-dot > 0 along a.
    Bottom,
    /// t = t_hi, needs F-dot < 0 along a.
    Top,
    /// a = a_lo, needs R-dot < 0 along t.
    Left,
    /// a = a_hi, needs R-dot > 0 along t.
    Right,
}

impl Edge {
    pub fn required_sign(self) -> Sign {
        match self {
            Edge::Bottom | Edge::Right => Sign::Pos,
            Edge::Top | Edge::Left => Sign::Neg,
        }
    }
}

/// The (t, a) rectangle at fixed b.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub b: Rat,
    pub t: Ival,
    pub a: Ival,
}

impl Rect {
    pub fn centered(b: Rat, tc: &Rat, dt: &Rat, ac: &Rat, da: &Rat) -> Rect {
        Rect {
            b,
            t: Ival::new(tc - dt, tc + dt).unwrap(),
            a: Ival::new(ac - da, ac + da).unwrap(),
        }
    }
}

/// Sign evidence at one corner of a rectangle: the value from a certified
/// run together with its error bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEvidence {
    pub edge: Edge,
    pub run: String,
    pub t: Rat,
    pub a: Rat,
    pub value: Rat,
    pub h_tilde: Rat,
    pub run_certified: bool,
    /// Published (value, error bound) for the same corner, if any.
    pub printed: Option<(Rat, Rat)>,
}

impl EdgeEvidence {
    /// Distance from the certified enclosure value ± H̃ to zero, signed so
    /// that positive means the required sign holds.
    pub fn margin(&self) -> Rat {
        match self.edge.required_sign() {
            Sign::Pos => &self.value - &self.h_tilde,
            Sign::Neg => -&self.value - &self.h_tilde,
        }
    }

    pub fn printed_margin(&self) -> Option<Rat> {
        self.printed.as_ref().map(|(v, h)| match self.edge.required_sign() {
            Sign::Pos => v - h,
            Sign::Neg => -v - h,
        })
    }
}

/// Signs that let one corner value control a whole edge: F-dot_a > 0 over the
/// region (for the t edges) and R-ddot > 0 (for the a edges).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub f_dot_a_pos: Option<bool>,
    pub r_ddot_pos: Option<bool>,
}

fn edge_name(e: Edge) -> &'static str {
    match e {
        Edge::Bottom => "bottom",
        Edge::Top => "top",
        Edge::Left => "left",
        Edge::Right => "right",
    }
}

/// Checks the four edge sign conditions of the two-dimensional
/// Poincaré–Miranda theorem on `rect`.
pub fn poincare_miranda_check(name: &str, rect: &Rect, edges: &[EdgeEvidence], mono: &Monotonicity) -> Certificate {
    let mut c = Certificate::new(CertKind::Existence, name);
    c.input("b", rect.b.to_string());
    c.input("t", rect.t.to_string());
    c.input("a", rect.a.to_string());
    for want in [Edge::Bottom, Edge::Top, Edge::Left, Edge::Right] {
        let en = edge_name(want);
        let Some(ev) = edges.iter().find(|e| e.edge == want) else {
            c.note(format!("{en}: no evidence"));
            c.set_inconclusive();
            continue;
        };
        // the corner the monotonicity argument needs
        let (need_t, need_a) = match want {
            Edge::Bottom => (rect.t.lo(), rect.a.lo()),
            Edge::Top => (rect.t.hi(), rect.a.hi()),
            Edge::Left => (rect.t.hi(), rect.a.lo()),
            Edge::Right => (rect.t.lo(), rect.a.hi()),
        };
        c.push(Check::fact(&format!("{en}: run {} certified", ev.run), ev.run_certified));
        c.push(Check::fact(
            &format!("{en}: evidence at corner t={need_t}, a={need_a}"),
            ev.t == *need_t && ev.a == *need_a,
        ));
        let sign = if want.required_sign() == Sign::Pos { ">" } else { "<" };
        let comp = if matches!(want, Edge::Bottom | Edge::Top) { "F_dot" } else { "R_dot" };
        c.push(Check::gt(&format!("{en}: {comp} {sign} 0 margin"), &ev.margin(), &Rat::zero()));
        if let Some(pm) = ev.printed_margin() {
            c.push(Check::gt(&format!("{en}: printed margin"), &pm, &Rat::zero()));
        }
        let mono_ok = match want {
            Edge::Bottom | Edge::Top => mono.f_dot_a_pos,
            Edge::Left | Edge::Right => mono.r_ddot_pos,
        };
        let what = if matches!(want, Edge::Bottom | Edge::Top) { "F_dot_a > 0" } else { "R_ddot > 0" };
        match mono_ok {
            Some(ok) => c.push(Check::fact(&format!("{en}: {what} on the edge"), ok)),
            None => {
                c.note(format!("{en}: {what} not supplied"));
                c.set_inconclusive();
            }
        }
    }
    c.finish();
    c
}

/// Constants of the quantitative implicit-function check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IftParams {
    pub delta1: Rat,
    pub delta1_t: Rat,
    pub eps1: Rat,
    pub delta2: Rat,
    pub delta2_t: Rat,
    pub eps2: Rat,
    pub eps1_t: Rat,
    pub eps2_t: Rat,
    pub mu1: Rat,
    pub mu2: Rat,
    pub mu3: Rat,
}

impl IftParams {
    pub fn published(k: &ProofConstants) -> IftParams {
        IftParams {
            delta1: Rat::frac(1017, 1250),
            delta1_t: Rat::frac(8159, 10000),
            eps1: Rat::frac(2677, 5000),
            delta2: Rat::frac(16181, 10000),
            delta2_t: Rat::frac(8359, 5000),
            eps2: Rat::frac(4549, 5000),
            eps1_t: k.t_window(),
            eps2_t: k.a_window(),
            mu1: k.dt.clone(),
            mu2: k.da.clone(),
            // the anchor solution lies exactly on the plane b = b0
            mu3: Rat::zero(),
        }
    }

    pub fn denominator(&self) -> Rat {
        &self.delta1 * &self.delta2 - &self.eps1 * &self.eps2
    }

    pub fn m1(&self) -> Option<Rat> {
        let d = self.denominator();
        (!d.is_zero()).then(|| &self.eps1 * &(&self.delta2_t + &self.eps2) / d)
    }

    pub fn m2(&self) -> Option<Rat> {
        let d = self.denominator();
        (!d.is_zero()).then(|| &self.eps2 * &(&self.delta1_t + &self.eps1) / d)
    }

    pub fn rho1(&self) -> Option<Rat> {
        self.m1().filter(|m| !m.is_zero()).map(|m| (&self.eps1_t - &self.mu1) / m - &self.mu3)
    }

    pub fn rho2(&self) -> Option<Rat> {
        self.m2().filter(|m| !m.is_zero()).map(|m| (&self.eps2_t - &self.mu2) / m - &self.mu3)
    }
}

/// Certified bounds on the partial derivatives over the region, with f1 = F-dot,
/// f2 = R-dot and axes (t, a, b).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IftBounds {
    /// Range of |F-ddot|.
    pub f_tt: Ival,
    pub f_ta: Rat,
    pub f_tb: Rat,
    pub r_tt: Rat,
    /// Range of |R-dot_a|.
    pub r_ta: Ival,
    pub r_tb: Rat,
    pub sources_certified: bool,
}

pub fn ift_region_check(p: &IftParams, b: &IftBounds, sb: &Rat) -> Certificate {
    let mut c = Certificate::new(CertKind::Uniqueness, "ift_region");
    for (k, v) in [
        ("delta1", &p.delta1),
        ("delta1~", &p.delta1_t),
        ("eps1", &p.eps1),
        ("delta2", &p.delta2),
        ("delta2~", &p.delta2_t),
        ("eps2", &p.eps2),
        ("eps1~", &p.eps1_t),
        ("eps2~", &p.eps2_t),
        ("mu1", &p.mu1),
        ("mu2", &p.mu2),
        ("mu3", &p.mu3),
    ] {
        c.input(k, v.to_string());
    }
    c.push(Check::fact("derivative bounds come from certified lemmas", b.sources_certified));
    c.push(Check::lt("delta1 < |F_ddot|", &p.delta1, b.f_tt.lo()));
    c.push(Check::lt("|F_ddot| < delta1~", b.f_tt.hi(), &p.delta1_t));
    c.push(Check::lt("|F_dot_a| < eps1", &b.f_ta, &p.eps1));
    c.push(Check::lt("|F_dot_b| < eps1", &b.f_tb, &p.eps1));
    c.push(Check::lt("|R_ddot| < eps2", &b.r_tt, &p.eps2));
    c.push(Check::lt("delta2 < |R_dot_a|", &p.delta2, b.r_ta.lo()));
    c.push(Check::lt("|R_dot_a| < delta2~", b.r_ta.hi(), &p.delta2_t));
    c.push(Check::lt("|R_dot_b| < eps2", &b.r_tb, &p.eps2));
    c.push(Check::lt("mu1 < eps1", &p.mu1, &p.eps1));
    c.push(Check::lt("eps1 < delta1", &p.eps1, &p.delta1));
    c.push(Check::lt("mu2 < eps2", &p.mu2, &p.eps2));
    c.push(Check::lt("eps2 < delta2", &p.eps2, &p.delta2));
    c.push(Check::gt("delta1*delta2 > eps1*eps2", &(&p.delta1 * &p.delta2), &(&p.eps1 * &p.eps2)));
    match (p.m1(), p.m2(), p.rho1(), p.rho2()) {
        (Some(m1), Some(m2), Some(r1), Some(r2)) => {
            c.input("m1", m1.to_string());
            c.input("m2", m2.to_string());
            c.input("rho1", r1.to_string());
            c.input("rho2", r2.to_string());
            c.push(Check::gt("m1 > 0", &m1, &Rat::zero()));
            c.push(Check::gt("m2 > 0", &m2, &Rat::zero()));
            c.push(Check::gt("rho1 > 0", &r1, &Rat::zero()));
            c.push(Check::gt("rho2 > 0", &r2, &Rat::zero()));
            c.push(Check::lt("sb < rho1", sb, &r1));
            c.push(Check::lt("sb < rho2", sb, &r2));
        }
        _ => c.push(Check::fact("delta1*delta2 - eps1*eps2 nonzero", false)),
    }
    c.finish();
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

pub fn default_pi_width() -> Rat {
    Rat::pow10(-20)
}

/// Certified enclosure of 7π/18.
pub fn seven_pi_18(width: &Rat) -> Ival {
    pi_enclosure(width).expect("positive width").scale(&Rat::frac(7, 18))
}

/// Inputs of a Θ comparison over a rectangle around a center run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaInput {
    pub center: Rat,
    pub h_tilde: Rat,
    pub run_certified: bool,
    pub theta_a_bound: Rat,
    pub theta_dot_bound: Rat,
    pub da_span: Rat,
    pub dt_span: Rat,
    pub side: Side,
}

/// Θ(t,a,b) − 7π/18 keeps the claimed sign on the whole rectangle, using
/// |Θ − Θ_center| ≤ |Θ_a|·da + |Θ̇|·dt + H̃.
pub fn theta_comparison(name: &str, inp: &ThetaInput, pi_width: &Rat) -> Certificate {
    let mut c = Certificate::new(CertKind::ThetaComparison, name);
    let target = seven_pi_18(pi_width);
    c.input("7pi/18", target.to_string());
    c.input("center", inp.center.to_string());
    c.input("H~", inp.h_tilde.to_string());
    c.input("|Theta_a| bound", inp.theta_a_bound.to_string());
    c.input("|Theta_dot| bound", inp.theta_dot_bound.to_string());
    c.push(Check::fact("center run certified", inp.run_certified));
    let spread = &inp.theta_a_bound * &inp.da_span + &inp.theta_dot_bound * &inp.dt_span;
    match inp.side {
        Side::Below => {
            let at = &inp.center + &inp.h_tilde;
            c.push(Check::lt("Theta(center) + H~ < 7pi/18", &at, target.lo()));
            c.push(Check::lt("Theta(center) + H~ + spread < 7pi/18", &(&at + &spread), target.lo()));
        }
        Side::Above => {
            let at = &inp.center - &inp.h_tilde;
            c.push(Check::gt("Theta(center) - H~ > 7pi/18", &at, target.hi()));
            c.push(Check::gt("Theta(center) - H~ - spread > 7pi/18", &(&at - &spread), target.hi()));
        }
    }
    c.finish();
    c
}

/// Compares a single rational against 7π/18.
pub fn compare_seven_pi_18(label: &str, x: &Rat, side: Side, pi_width: &Rat) -> Check {
    let t = seven_pi_18(pi_width);
    match side {
        Side::Below => Check::lt(label, x, t.lo()),
        Side::Above => Check::gt(label, x, t.hi()),
    }
}

/// Joins the four lemma certificates and the two Θ comparisons into the
/// periodicity statement.
pub fn assemble_periodicity(k: &ProofConstants, parts: &[&Certificate]) -> Certificate {
    let mut c = Certificate::new(CertKind::Periodicity, "periodicity");
    for p in parts {
        c.push(Check::fact(&format!("{} passes", p.name), p.passed()));
    }
    let tw = k.t_window();
    let t_bar = Ival::new(&k.t0 - &tw, &k.t0 + &tw).unwrap();
    c.input("t_bar window", t_bar.to_string());
    c.input("a_bar window", Ival::new(&k.a0 - &k.a_window(), &k.a0 + &k.a_window()).unwrap().to_string());
    c.input("b_bar window", Ival::new(&k.b0 - &k.sb, &k.b0 + &k.sb).unwrap().to_string());
    c.input("period", "36 t_bar".into());
    c.input("period range", t_bar.scale(&Rat::int(36)).to_string());
    c.push(Check::gt("t_bar > 0 on the whole window", t_bar.lo(), &Rat::zero()));
    // rotation after one reduced period 4 t_bar is 4·(7π/18) = 14π/9
    let per_cycle = Rat::int(4) * Rat::frac(7, 18);
    c.push(Check::eq("rotation per reduced period / pi", &per_cycle, &Rat::frac(14, 9)));
    let turns = Rat::int(9) * &per_cycle / Rat::int(2);
    c.push(Check::eq("revolutions after 9 reduced periods", &turns, &Rat::int(7)));
    c.note("the stated window |a - a0| < sa + da is the published claim; the certified curve lies in |a - a0| < 3(sa + da)".into());
    c.finish();
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ift_published_constants_pass() {
        let k = ProofConstants::default();
        let p = IftParams::published(&k);
        let b = IftBounds {
            f_tt: Ival::frac(813693, 1000000, 815845, 1000000),
            f_ta: Rat::frac(1, 2),
            f_tb: Rat::frac(53, 100),
            r_tt: Rat::frac(373, 1000),
            r_ta: Ival::frac(16182, 10000, 16717, 10000),
            r_tb: Rat::frac(908, 1000),
            sources_certified: true,
        };
        let c = ift_region_check(&p, &b, &k.sb);
        assert!(c.passed(), "{c:#?}");
        // independent substitution
        let d = Rat::frac(1017, 1250) * Rat::frac(16181, 10000) - Rat::frac(2677, 5000) * Rat::frac(4549, 5000);
        assert_eq!(p.m1().unwrap(), Rat::frac(2677, 5000) * (Rat::frac(8359, 5000) + Rat::frac(4549, 5000)) / d.clone());
        assert_eq!(p.m2().unwrap(), Rat::frac(4549, 5000) * (Rat::frac(8159, 10000) + Rat::frac(2677, 5000)) / d);
    }

    #[test]
    fn ift_degenerate_fails() {
        let k = ProofConstants::default();
        let mut p = IftParams::published(&k);
        p.eps1 = Rat::int(2);
        p.eps2 = Rat::int(2);
        let b = IftBounds {
            f_tt: Ival::frac(1, 1, 1, 1),
            f_ta: Rat::zero(),
            f_tb: Rat::zero(),
            r_tt: Rat::zero(),
            r_ta: Ival::frac(1, 1, 1, 1),
            r_tb: Rat::zero(),
            sources_certified: true,
        };
        assert_eq!(ift_region_check(&p, &b, &k.sb).verdict, Verdict::Fail);
    }

    #[test]
    fn printed_theta_values() {
        let w = default_pi_width();
        assert!(compare_seven_pi_18("", &Rat::frac(122172921709501, 100000000000000), Side::Below, &w).holds);
        assert!(compare_seven_pi_18("", &Rat::frac(24434637066123, 20000000000000), Side::Above, &w).holds);
    }

    #[test]
    fn theta_zero_spans_reduce_to_center() {
        let inp = ThetaInput {
            center: Rat::frac(12217, 10000),
            h_tilde: Rat::zero(),
            run_certified: true,
            theta_a_bound: Rat::zero(),
            theta_dot_bound: Rat::zero(),
            da_span: Rat::zero(),
            dt_span: Rat::zero(),
            side: Side::Below,
        };
        assert!(theta_comparison("t", &inp, &default_pi_width()).passed());
        let inp = ThetaInput { side: Side::Above, ..inp };
        assert_eq!(theta_comparison("t", &inp, &default_pi_width()).verdict, Verdict::Fail);
    }

    fn ev(edge: Edge, t: &Rat, a: &Rat, value: Rat) -> EdgeEvidence {
        EdgeEvidence {
            edge,
            run: "r".into(),
            t: t.clone(),
            a: a.clone(),
            value,
            h_tilde: Rat::frac(1, 1000),
            run_certified: true,
            printed: None,
        }
    }

    #[test]
    fn pm_sign_flip_fails() {
        let r = Rect::centered(Rat::one(), &Rat::one(), &Rat::frac(1, 10), &Rat::one(), &Rat::frac(1, 10));
        let (tl, th, al, ah) = (r.t.lo().clone(), r.t.hi().clone(), r.a.lo().clone(), r.a.hi().clone());
        let mut edges = vec![
            ev(Edge::Bottom, &tl, &al, Rat::frac(1, 10)),
            ev(Edge::Top, &th, &ah, Rat::frac(-1, 10)),
            ev(Edge::Left, &th, &al, Rat::frac(-1, 10)),
            ev(Edge::Right, &tl, &ah, Rat::frac(1, 10)),
        ];
        let m = Monotonicity { f_dot_a_pos: Some(true), r_ddot_pos: Some(true) };
        assert!(poincare_miranda_check("pm", &r, &edges, &m).passed());
        assert_eq!(poincare_miranda_check("pm", &r, &edges, &Monotonicity::default()).verdict, Verdict::Inconclusive);
        edges[2].value = Rat::frac(1, 10);
        assert_eq!(poincare_miranda_check("pm", &r, &edges, &m).verdict, Verdict::Fail);
    }
}

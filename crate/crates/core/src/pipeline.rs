//! Orchestration of the full periodicity proof: configuration, the long and
//! edge runs, lemma certificates, Θ comparisons, the final assembly and the
//! JSON report. Also the introductory table reproduction and trajectory export.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{
    certify_dictionary, certify_hypotheses, certify_second_derivative_bounds, published_constants,
    second_derivative_claims, BoundStatus, DictionaryReport, HypothesisConstants, PhiBound, DEFAULT_BUDGET,
};
use crate::exact::{pi_enclosure, sqrt_enclosure, ExactError, GridSpec, Ival, Rat};
use crate::fields::FieldName;
use crate::integrator::{comparison_bound, global_error_bound, round_taylor_run, RunConfig, RunRecord};
use crate::topology::{
    assemble_periodicity, compare_seven_pi_18, default_pi_width, ift_region_check, poincare_miranda_check,
    theta_comparison, CertKind, Certificate, Check, Edge, EdgeEvidence, IftBounds, IftParams, Monotonicity,
    ProofConstants, Rect, Side, ThetaInput, Verdict,
};

fn q(s: &str) -> Rat {
    s.parse().expect("valid rational literal")
}

fn qs(v: &[&str]) -> Vec<Rat> {
    v.iter().map(|s| q(s)).collect()
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {key} needs a p/q rational, got {value:?}")]
    NotRational { line: usize, key: String, value: String },
    #[error("line {line}: {key} needs a nonnegative integer, got {value:?}")]
    NotInteger { line: usize, key: String, value: String },
    #[error("line {line}: {key} needs true or false, got {value:?}")]
    NotBool { line: usize, key: String, value: String },
}

/// Everything the proof pipeline can be told. The defaults are the
/// published choices; anything else is reported as a deviation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub constants: ProofConstants,
    pub grid_exp: u32,
    /// Grid exponent of the one edge run printed with `H = 10^-15`.
    pub fine_grid_exp: u32,
    pub long_steps: u32,
    pub edge_steps: u32,
    pub long_edge_steps: u32,
    pub budget: usize,
    pub pi_width: Rat,
    pub parallel: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            constants: ProofConstants::default(),
            grid_exp: 14,
            fine_grid_exp: 15,
            long_steps: 30000,
            edge_steps: 35000,
            long_edge_steps: 120000,
            budget: DEFAULT_BUDGET,
            pi_width: default_pi_width(),
            parallel: true,
        }
    }
}

impl PipelineConfig {
    /// Parses `key=value` lines; `#` starts a comment. Rationals must be
    /// written as `p/q` or integers, never as decimals.
    pub fn parse(text: &str) -> Result<PipelineConfig, ConfigError> {
        let mut c = PipelineConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::Syntax { line, text: raw.to_string() })?;
            let (k, v) = (k.trim(), v.trim());
            let rat = || -> Result<Rat, ConfigError> {
                v.parse::<Rat>().map_err(|_| ConfigError::NotRational { line, key: k.into(), value: v.into() })
            };
            let int = || -> Result<u64, ConfigError> {
                if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ConfigError::NotInteger { line, key: k.into(), value: v.into() });
                }
                v.parse::<u64>().map_err(|_| ConfigError::NotInteger { line, key: k.into(), value: v.into() })
            };
            let k32 = |x: u64| x.min(u32::MAX as u64) as u32;
            match k {
                "a0" => c.constants.a0 = rat()?,
                "da" => c.constants.da = rat()?,
                "sa" => c.constants.sa = rat()?,
                "b0" => c.constants.b0 = rat()?,
                "sb" => c.constants.sb = rat()?,
                "t0" => c.constants.t0 = rat()?,
                "dt" => c.constants.dt = rat()?,
                "st" => c.constants.st = rat()?,
                "pi_width" => c.pi_width = rat()?,
                "grid_exp" => c.grid_exp = k32(int()?),
                "fine_grid_exp" => c.fine_grid_exp = k32(int()?),
                "long_steps" => c.long_steps = k32(int()?),
                "edge_steps" => c.edge_steps = k32(int()?),
                "long_edge_steps" => c.long_edge_steps = k32(int()?),
                "budget" => c.budget = int()? as usize,
                "parallel" => {
                    c.parallel = match v {
                        "true" => true,
                        "false" => false,
                        _ => return Err(ConfigError::NotBool { line, key: k.into(), value: v.into() }),
                    }
                }
                _ => return Err(ConfigError::UnknownKey { line, key: k.into() }),
            }
        }
        Ok(c)
    }

    /// Proof-relevant settings that differ from the published ones. Worker
    /// scheduling and the search budget do not change any certified claim.
    pub fn deviations(&self) -> Vec<String> {
        let d = PipelineConfig::default();
        let mut out = Vec::new();
        let a = self.constants.to_map();
        for (k, v) in d.constants.to_map() {
            if a[&k] != v {
                out.push(format!("{k} = {} (published {v})", a[&k]));
            }
        }
        let mut num = |name: &str, x: u32, y: u32| {
            if x != y {
                out.push(format!("{name} = {x} (published {y})"));
            }
        };
        num("grid_exp", self.grid_exp, d.grid_exp);
        num("fine_grid_exp", self.fine_grid_exp, d.fine_grid_exp);
        num("long_steps", self.long_steps, d.long_steps);
        num("edge_steps", self.edge_steps, d.edge_steps);
        num("long_edge_steps", self.long_edge_steps, d.long_edge_steps);
        out
    }
}

/// Which part of the proof to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    Theta,
    Full,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Lemma1 => "lemma1",
            Target::Lemma2 => "lemma2",
            Target::Lemma3 => "lemma3",
            Target::Lemma4 => "lemma4",
            Target::Theta => "theta",
            Target::Full => "full",
        }
    }

    fn lemmas(self) -> &'static [usize] {
        match self {
            Target::Lemma1 => &[1],
            Target::Lemma2 => &[2],
            Target::Lemma3 => &[3],
            Target::Lemma4 | Target::Theta => &[],
            Target::Full => &[1, 2, 3],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Edge(Edge),
    Center,
}

/// One `Z_W(t, b, a, k, q)` run of the Poincaré–Miranda lemmas together with
/// what was printed for it.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeRun {
    pub id: usize,
    pub lemma: usize,
    pub role: Role,
    pub t: Rat,
    pub a: Rat,
    pub b: Rat,
    pub k: u32,
    pub q: u32,
    pub published: Vec<Rat>,
    /// The printed (value, H̃ bound) used for this corner's inequality.
    pub printed: (Rat, Rat),
}

/// The fourteen runs in the order they are printed.
pub fn edge_runs(cfg: &PipelineConfig) -> Vec<EdgeRun> {
    let c = &cfg.constants;
    let (t0, a0, b0) = (&c.t0, &c.a0, &c.b0);
    let (dt, da, st, sa, sb) = (&c.dt, &c.da, &c.st, &c.sa, &c.sb);
    let (k, kl, qd, qf) = (cfg.edge_steps, cfg.long_edge_steps, cfg.grid_exp, cfg.fine_grid_exp);
    let b_lo = b0 - sb;
    let b_hi = b0 + sb;
    let mk = |id, lemma, role, t: Rat, a: Rat, b: &Rat, k, q, published: &[&str], printed: (&str, &str)| EdgeRun {
        id,
        lemma,
        role,
        t,
        a,
        b: b.clone(),
        k,
        q,
        published: qs(published),
        printed: (q_(printed.0), q_(printed.1)),
    };
    use Edge::*;
    use Role::Edge as E;
    vec![
        mk(0, 1, E(Bottom), t0 - dt, a0 - da, b0, k, qd,
            &["7733069351623/3125000000000", "25787091/20000000000000", "189061375789453/20000000000000", "-44841643/20000000000000", "30543236182739/25000000000000"],
            ("25787091/20000000000000", "94851/1000000000000")),
        mk(1, 1, E(Top), t0 + dt, a0 + da, b0, kl, qd,
            &["1546614123963/625000000000", "-198811/6250000000000", "945307243792047/100000000000000", "16995193/20000000000000", "61086532113189/50000000000000"],
            ("-198811/6250000000000", "5651/200000000000")),
        mk(2, 1, E(Left), t0 + dt, a0 - da, b0, k, qd,
            &["123729109625969/50000000000000", "-196972647/100000000000000", "945306878946787/100000000000000", "-19027313/25000000000000", "122173137972697/100000000000000"],
            ("-19027313/25000000000000", "94851/1000000000000")),
        mk(3, 1, E(Right), t0 - dt, a0 + da, b0, k, qd,
            &["24745827990179/10000000000000", "55883369/25000000000000", "189061484706171/20000000000000", "52393253/50000000000000", "61086475049353/50000000000000"],
            ("52393253/50000000000000", "94851/1000000000000")),
        mk(4, 2, E(Bottom), t0 - st - dt, a0 + sa - da, &b_lo, k, qd,
            &["247454580109467/100000000000000", "14064311/50000000000000", "945308716843341/100000000000000", "-27791851/50000000000000", "7635805749249/6250000000000"],
            ("14064311/50000000000000", "94849/1000000000000")),
        mk(5, 2, E(Top), t0 - st + dt, a0 + sa + da, &b_lo, kl, qd,
            &["49490920135587/20000000000000", "-4841111/100000000000000", "29540903186787/3125000000000", "21447973/25000000000000", "122172932415207/100000000000000"],
            ("-4841111/100000000000000", "5651/200000000000")),
        mk(6, 2, E(Right), t0 - st - dt, a0 + sa + da, &b_lo, k, qd,
            &["123727300365019/50000000000000", "12058321/20000000000000", "189061780400321/20000000000000", "11254969/20000000000000", "61086446906439/50000000000000"],
            ("11254969/20000000000000", "94849/1000000000000")),
        mk(7, 2, E(Left), t0 - st + dt, a0 + sa - da, &b_lo, k, qd,
            &["4949091602187/2000000000000", "-18526257/50000000000000", "945308716843239/100000000000000", "-25964629/100000000000000", "122172930636361/100000000000000"],
            ("-25964629/100000000000000", "1897/20000000000")),
        mk(8, 2, Role::Center, t0 - st, a0 + sa, &b_lo, k, qd,
            &["247454590419723/100000000000000", "1161959/10000000000000", "945308809422539/100000000000000", "473597/3125000000000", "122172912224601/100000000000000"],
            ("122172912224601/100000000000000", "94849/1000000000000")),
        mk(9, 3, E(Bottom), t0 + st - dt, a0 - sa - da, &b_hi, k, qd,
            &["247461898442221/100000000000000", "1573331/5000000000000", "189061080098229/20000000000000", "-57188327/100000000000000", "15271644451087/12500000000000"],
            ("1573331/5000000000000", "23713/250000000000")),
        mk(10, 3, E(Top), t0 + st + dt, a0 - sa + da, &b_hi, kl, qf,
            &["1237309595658901/500000000000000", "-904301/62500000000000", "9453055857540481/1000000000000000", "842419313/1000000000000000", "244346392152949/200000000000000"],
            ("-904301/62500000000000", "77/8000000000")),
        mk(11, 3, E(Right), t0 + st - dt, a0 - sa + da, &b_hi, k, qd,
            &["49492383812687/20000000000000", "63630339/100000000000000", "945305585649929/100000000000000", "1366741/2500000000000", "24434631486741/20000000000000"],
            ("1366741/2500000000000", "23713/250000000000")),
        mk(12, 3, E(Left), t0 + st + dt, a0 - sa - da, &b_hi, k, qd,
            &["123730949221087/50000000000000", "-33715619/100000000000000", "945305400490959/100000000000000", "-6891931/25000000000000", "1908956160269/1562500000000"],
            ("-6891931/25000000000000", "23713/250000000000")),
        mk(13, 3, Role::Center, t0 + st, a0 - sa, &b_hi, k, qd,
            &["123730954376411/50000000000000", "3739331/25000000000000", "945305493070449/100000000000000", "1355097/10000000000000", "24434635169083/20000000000000"],
            ("24434635169083/20000000000000", "23713/250000000000")),
    ]
}

fn q_(s: &str) -> Rat {
    q(s)
}

/// One of the three long runs at (t0, a0, b0) with what was printed for it.
#[derive(Clone, Debug, Serialize)]
pub struct LongRun {
    pub field: FieldName,
    pub lemma: &'static str,
    pub published: Vec<Rat>,
    /// Printed upper bound on H̃ (the G value is printed as "≈").
    pub printed_h_tilde: Rat,
    /// Printed bound on |δ| and on the comparison estimate, and the lemma's ε.
    pub delta_bound: Rat,
    pub comparison_printed: Rat,
    pub eps: Rat,
    /// (label, component, printed center) of each function the lemma bounds.
    pub centers: Vec<(&'static str, usize)>,
    pub delta_phis: &'static [usize],
}

pub fn long_runs() -> Vec<LongRun> {
    let f = ["247458249564811/100000000000000", "13245901/100000000000000", "189061430242601/20000000000000", "1795639/12500000000000"];
    let with = |tail: &[&str]| -> Vec<Rat> { f.iter().chain(tail.iter()).map(|s| q(s)).collect() };
    vec![
        LongRun {
            field: FieldName::G,
            lemma: "bds",
            published: with(&["3032500537707/10000000000000", "11824770099363/25000000000000", "68073031375453/25000000000000", "164497338366219/100000000000000", "536760312951/20000000000000"]),
            printed_h_tilde: q("19/10000000"),
            delta_bound: q("23/500000"),
            comparison_printed: q("267131/10000000"),
            eps: q("2677451/100000000"),
            centers: vec![("F_a", 4), ("F_dot_a", 5), ("R_a", 6), ("R_dot_a", 7), ("Theta_a", 8)],
            delta_phis: &[54, 56, 57],
        },
        LongRun {
            field: FieldName::U,
            lemma: "bdsb",
            published: with(&["25138479462137/12500000000000", "50798112898451/100000000000000", "20014508374143/25000000000000", "88229751956717/100000000000000"]),
            printed_h_tilde: q("209/100000000"),
            delta_bound: q("1/25000"),
            comparison_printed: q("1281341/50000000"),
            eps: q("2568201/100000000"),
            centers: vec![("F_dot_b", 5), ("R_dot_b", 7)],
            delta_phis: &[54, 58],
        },
        LongRun {
            field: FieldName::W,
            lemma: "bdsw",
            published: with(&["12217304404331/10000000000000"]),
            printed_h_tilde: q("127/1000000000"),
            delta_bound: q("39/1000000"),
            comparison_printed: q("827737/250000000"),
            eps: q("134567/40000000"),
            centers: vec![("F", 0), ("R", 2)],
            delta_phis: &[54, 55],
        },
    ]
}

/// Componentwise agreement of a final state with a printed one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Agreement {
    pub band: Rat,
    pub max_deviation: Rat,
    pub worst_component: usize,
    pub holds: bool,
}

/// `|z - p| <= 2(H + H̃)` for every component.
pub fn agreement(z: &[Rat], published: &[Rat], big_h: &Rat, h_tilde: &Rat) -> Agreement {
    let band = Rat::int(2) * (big_h + h_tilde);
    let mut worst = (Rat::zero(), 0usize);
    for (i, (a, b)) in z.iter().zip(published).enumerate() {
        let d = (a - b).abs();
        if d > worst.0 {
            worst = (d, i);
        }
    }
    let holds = z.len() == published.len() && worst.0 <= band;
    Agreement { band, max_deviation: worst.0, worst_component: worst.1, holds }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub field: String,
    pub t: Rat,
    pub a: Rat,
    pub b: Rat,
    pub k: u32,
    pub q: u32,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub z_final: Vec<Rat>,
    pub h_tilde: Option<Rat>,
    pub printed_h_tilde: Option<Rat>,
    pub h_tilde_within_printed: Option<bool>,
    pub containment_margin: Option<Rat>,
    pub nearest_fallbacks: u32,
    pub published_agreement: Option<Agreement>,
}

fn summarize(name: String, t: &Rat, b: &Rat, rec: &RunRecord, published: Option<&[Rat]>, printed_h: Option<&Rat>) -> RunSummary {
    let big_h = rec.grid.spacing();
    let published_agreement = match (published, &rec.h_tilde) {
        (Some(p), Some(ht)) => Some(agreement(&rec.z_final, p, &big_h, ht)),
        _ => None,
    };
    RunSummary {
        name,
        field: rec.field.clone(),
        t: t.clone(),
        a: rec.a.clone().unwrap_or_else(Rat::zero),
        b: b.clone(),
        k: rec.k,
        q: rec.grid.q,
        certified: rec.certified,
        failure: rec.failure.as_ref().map(|f| format!("step {}: {}", f.step, f.reason)),
        z_final: rec.z_final.clone(),
        h_tilde: rec.h_tilde.clone(),
        printed_h_tilde: printed_h.cloned(),
        h_tilde_within_printed: match (&rec.h_tilde, printed_h) {
            (Some(h), Some(p)) => Some(h <= p),
            _ => None,
        },
        containment_margin: rec.containment_margin.clone(),
        nearest_fallbacks: rec.nearest_fallbacks,
        published_agreement,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub name: String,
    /// Whether the overall verdict depends on this stage.
    pub required: bool,
    pub verdict: Verdict,
    pub certificates: Vec<Certificate>,
}

impl Stage {
    fn new(name: &str, required: bool, certificates: Vec<Certificate>) -> Stage {
        let verdict = certificates.iter().fold(
            if certificates.is_empty() { Verdict::Inconclusive } else { Verdict::Pass },
            |v, c| v.and(c.verdict),
        );
        Stage { name: name.to_string(), required, verdict, certificates }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntroRow {
    pub y: Rat,
    pub z: Rat,
    pub printed_y: Rat,
    pub printed_z: Rat,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub paper_faithful: bool,
    pub deviations: Vec<String>,
    /// Printed claims that the computation does not confirm.
    pub discrepancies: Vec<String>,
    pub constants: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub intro: Vec<IntroRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dictionary: Option<Vec<PhiBound>>,
    pub stages: Vec<Stage>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub timing_ms: BTreeMap<String, u64>,
}

impl Report {
    fn new(command: &str, cfg: &PipelineConfig) -> Report {
        let deviations = cfg.deviations();
        Report {
            command: command.to_string(),
            verdict: Verdict::Inconclusive,
            paper_faithful: deviations.is_empty(),
            deviations,
            discrepancies: Vec::new(),
            constants: cfg.constants.to_map(),
            intro: Vec::new(),
            runs: Vec::new(),
            dictionary: None,
            stages: Vec::new(),
            timing_ms: BTreeMap::new(),
        }
    }

    fn finish(&mut self) {
        let req: Vec<&Stage> = self.stages.iter().filter(|s| s.required).collect();
        self.verdict = if req.is_empty() {
            Verdict::Inconclusive
        } else {
            req.iter().fold(Verdict::Pass, |v, s| v.and(s.verdict))
        };
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn certificate(&self, name: &str) -> Option<&Certificate> {
        self.stages.iter().flat_map(|s| &s.certificates).find(|c| c.name == name)
    }

    /// Pretty JSON; timings are left out unless asked for so that equal
    /// inputs give byte-identical output.
    pub fn to_json(&self, with_timing: bool) -> String {
        if with_timing {
            serde_json::to_string_pretty(self).expect("report serializes")
        } else {
            let mut r = self.clone();
            r.timing_ms.clear();
            serde_json::to_string_pretty(&r).expect("report serializes")
        }
    }

    fn time(&mut self, key: &str, since: Instant) {
        self.timing_ms.insert(key.to_string(), since.elapsed().as_millis() as u64);
    }
}

/// The printed (y_i, z_i) table of the introductory example.
pub fn intro_table() -> Vec<(Rat, Rat)> {
    [
        ("121/240", "252083/500000"),
        ("38127028661111/75000000000000", "12709/25000"),
        ("96109156319/187500000000", "256291/500000"),
        ("38762401423319/75000000000000", "16151/31250"),
        ("152668926449/292968750000", "521109/1000000"),
        ("52541490803373/100000000000000", "262707/500000"),
        ("13243698510717/25000000000000", "529747/1000000"),
        ("160232709115991/300000000000000", "534109/1000000"),
        ("161549754576119/300000000000000", "538499/1000000"),
        ("162875215826999/300000000000000", "542917/1000000"),
    ]
    .iter()
    .map(|(y, z)| (q(y), q(z)))
    .collect()
}

/// Order-1 run of `y' = y - y^2/3` from 1/2 compared with the printed table;
/// `grid_exp` other than 6 is a deviation (useful to see the comparator fail).
pub fn repro_intro(grid_exp: u32) -> Report {
    let start = Instant::now();
    let mut cfg = RunConfig::intro();
    cfg.grid = GridSpec::floor(grid_exp);
    let rec = round_taylor_run(&cfg);
    let mut report = Report::new("repro intro", &PipelineConfig::default());
    if grid_exp != 6 {
        report.deviations.push(format!("grid_exp = {grid_exp} (published 6)"));
        report.paper_faithful = false;
    }
    let traj = rec.trajectory.clone().unwrap_or_default();
    let ys = rec.exact_y.clone().unwrap_or_default();
    let mut cert = Certificate::new(CertKind::Bound, "intro_table");
    cert.input("h", cfg.h.to_string());
    cert.input("H", cfg.grid.spacing().to_string());
    cert.input("y0", cfg.initial_state[0].to_string());
    for (i, (py, pz)) in intro_table().into_iter().enumerate() {
        let y = ys.get(i).map(|v| v[0].clone()).unwrap_or_else(Rat::zero);
        let z = traj.get(i + 1).map(|v| v[0].clone()).unwrap_or_else(Rat::zero);
        cert.push(Check::eq(&format!("y_{}", i + 1), &y, &py));
        cert.push(Check::eq(&format!("z_{}", i + 1), &z, &pz));
        cert.push(Check::le(&format!("|z_{0} - y_{0}| <= H", i + 1), &(&z - &y).abs(), &cfg.grid.spacing()));
        report.intro.push(IntroRow { matches: y == py && z == pz, y, z, printed_y: py, printed_z: pz });
    }
    if let Some(first) = cert.transcript.iter().find(|c| !c.holds) {
        cert.note(format!("first mismatch: {}", first.label));
    }
    cert.finish();
    report.stages.push(Stage::new("intro", true, vec![cert]));
    report.time("total", start);
    report.finish();
    report
}

fn map_maybe_par<T: Sync, R: Send>(items: &[T], parallel: bool, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

/// Certifies the dictionary (all entries, or `only` plus what they use) and
/// the hypothesis constants of the three long runs.
pub fn verify_bounds(cfg: &PipelineConfig, only: Option<&[usize]>) -> Report {
    let start = Instant::now();
    let mut report = Report::new("verify bounds", cfg);
    let dict = certify_dictionary(only, cfg.budget, cfg.parallel);
    report.time("dictionary", start);
    let wanted: Vec<usize> = match only {
        Some(v) => v.to_vec(),
        None => dict.entries.iter().map(|e| e.index).collect(),
    };
    let dcert = dictionary_certificate(&dict, &wanted);
    dictionary_discrepancies(&dict, &mut report.discrepancies);
    report.stages.push(Stage::new("dictionary", true, vec![dcert]));
    if only.is_none() {
        let t = Instant::now();
        let h = &cfg.constants.t0 / &Rat::int(cfg.long_steps as i64);
        let fields = [FieldName::W, FieldName::G, FieldName::U];
        let certs = map_maybe_par(&fields, cfg.parallel, |f| certify_hypotheses(*f, &dict, &h).1);
        report.stages.push(Stage::new("hypotheses", true, certs));
        report.time("hypotheses", t);
    }
    report.dictionary = Some(dict.entries);
    report.time("total", start);
    report.finish();
    report
}

fn dictionary_certificate(dict: &DictionaryReport, wanted: &[usize]) -> Certificate {
    let mut c = Certificate::new(CertKind::Bound, "dictionary");
    let mut inconclusive = false;
    for e in dict.entries.iter().filter(|e| wanted.contains(&e.index)) {
        match e.status {
            BoundStatus::Certified => c.push(Check::fact(&format!("B(phi{}) = {}", e.index, e.claimed), true)),
            BoundStatus::Refuted => c.push(Check::fact(&format!("B(phi{}) = {}", e.index, e.claimed), false)),
            BoundStatus::Inconclusive => {
                inconclusive = true;
                c.note(format!("phi{}: inconclusive, best enclosure {}", e.index, e.range));
            }
        }
    }
    c.input("certified", dict.entries.iter().filter(|e| wanted.contains(&e.index) && e.status == BoundStatus::Certified).count().to_string());
    c.input("checked", wanted.len().to_string());
    if inconclusive {
        c.set_inconclusive();
    }
    c.finish();
    c
}

fn dictionary_discrepancies(dict: &DictionaryReport, out: &mut Vec<String>) {
    for e in &dict.entries {
        if e.status != BoundStatus::Certified {
            let w = e
                .witness
                .as_ref()
                .map(|w| format!("; witness {}", w.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")))
                .unwrap_or_default();
            let status = if e.status == BoundStatus::Refuted { "refuted" } else { "not certified" };
            let f = |r: &Rat| r.to_decimal(9);
            out.push(format!(
                "B(phi{}) = [{}, {}] {status}; certified enclosure [{}, {}]{w}",
                e.index,
                f(e.claimed.lo()),
                f(e.claimed.hi()),
                f(e.range.lo()),
                f(e.range.hi())
            ));
        }
    }
}

/// Upper bound on `sup sqrt(sum φ_i^2)` from the dictionary ranges.
fn delta_norm(dict: &DictionaryReport, phis: &[usize]) -> Result<Rat, ExactError> {
    let mut s = Rat::zero();
    for &i in phis {
        let r = dict.usable_range(i).ok_or_else(|| ExactError::Domain(format!("phi{i} not checked")))?;
        let m = r.mag();
        s = s + &m * &m;
    }
    Ok(sqrt_enclosure(&s, &Rat::pow10(-12))?.hi().clone())
}

/// The outcome of a lemma of the bds/bdsb/bdsw family: its certificate and
/// the certified ranges `center ± ε` of the functions it bounds.
#[derive(Clone, Debug)]
struct LemmaBounds {
    cert: Certificate,
    ranges: BTreeMap<&'static str, Ival>,
}

fn bound_lemma(cfg: &PipelineConfig, lr: &LongRun, rec: &RunRecord, hyp: &Certificate, dict: &DictionaryReport) -> LemmaBounds {
    let k = &cfg.constants;
    let mut c = Certificate::new(CertKind::Bound, &format!("lemma_{}", lr.lemma));
    c.push(Check::fact(&format!("hypotheses of {} certified", hyp.name), hyp.passed()));
    c.push(Check::fact("long run certified (containment in U1, eps > M0 h + H~)", rec.certified));
    let (m0, k0, _, _) = published_constants(lr.field);
    let h_tilde = rec.h_tilde.clone().unwrap_or_else(|| Rat::int(1));
    c.input("H~", h_tilde.to_string());
    match delta_norm(dict, lr.delta_phis) {
        Ok(dn) => {
            c.input("|delta| bound", dn.to_string());
            c.push(Check::lt("|delta f| < eps_f", &dn, &lr.delta_bound));
        }
        Err(e) => {
            c.note(format!("delta bound unavailable: {e}"));
            c.set_inconclusive();
        }
    }
    let span = k.comparison_span();
    let ranges = match comparison_bound(&k0, &lr.delta_bound, &k.sb, &span) {
        Ok(cb) => {
            c.input("comparison bound", cb.to_string());
            c.push(Check::lt("comparison bound < printed", &cb, &lr.comparison_printed));
            let total = &cb + &(&k.t_window() * &m0) + h_tilde.clone();
            c.push(Check::le("comparison + 6(st+dt) M0 + H~ <= eps", &total, &lr.eps));
            let total_printed = &lr.comparison_printed + &(&k.t_window() * &m0) + h_tilde;
            c.push(Check::le("printed comparison + 6(st+dt) M0 + H~ <= eps", &total_printed, &lr.eps));
            lr.centers
                .iter()
                .map(|(name, i)| (*name, Ival::point(rec.z_final[*i].clone()).inflate(&lr.eps)))
                .collect()
        }
        Err(e) => {
            c.note(format!("comparison bound failed: {e}"));
            c.set_inconclusive();
            BTreeMap::new()
        }
    };
    for (name, r) in &ranges {
        c.input(&format!("{name} range"), r.to_string());
    }
    c.input("eps", lr.eps.to_string());
    c.input("t window", k.t_window().to_string());
    c.input("a window", k.a_window().to_string());
    c.input("b window", k.sb.to_string());
    c.finish();
    LemmaBounds { cert: c, ranges }
}

/// Everything stages 1 to 3 produce, shared by the later stages.
struct Foundation {
    lemmas: BTreeMap<&'static str, LemmaBounds>,
    ddot: Certificate,
    dfapos: Certificate,
    theta_a_bound: Option<Rat>,
}

fn foundation(cfg: &PipelineConfig, report: &mut Report) -> Foundation {
    let k = &cfg.constants;
    let t = Instant::now();
    let dict = certify_dictionary(None, cfg.budget, cfg.parallel);
    let h = &k.t0 / &Rat::int(cfg.long_steps as i64);
    let fields = [FieldName::W, FieldName::G, FieldName::U];
    let hyps: Vec<(FieldName, HypothesisConstants, Certificate)> =
        map_maybe_par(&fields, cfg.parallel, |f| {
            let (c, cert) = certify_hypotheses(*f, &dict, &h);
            (*f, c, cert)
        });
    dictionary_discrepancies(&dict, &mut report.discrepancies);
    let all: Vec<usize> = dict.entries.iter().map(|e| e.index).collect();
    report.stages.push(Stage::new("dictionary", false, vec![dictionary_certificate(&dict, &all)]));
    report.stages.push(Stage::new("hypotheses", true, hyps.iter().map(|(_, _, c)| c.clone()).collect()));
    report.time("stage1_bounds", t);

    let t = Instant::now();
    let lrs = long_runs();
    let recs = map_maybe_par(&lrs, cfg.parallel, |lr| {
        round_taylor_run(&RunConfig::proof_run(lr.field, &k.t0, &k.a0, &k.b0, cfg.long_steps, cfg.grid_exp))
    });
    let long: Vec<(LongRun, RunRecord)> = lrs.into_iter().zip(recs).collect();
    let mut lemmas = BTreeMap::new();
    for (lr, rec) in &long {
        let hyp = &hyps.iter().find(|(f, _, _)| *f == lr.field).expect("hypotheses for every long run").2;
        lemmas.insert(lr.lemma, bound_lemma(cfg, lr, rec, hyp, &dict));
        report.runs.push(summarize(format!("long_{}", lr.lemma), &k.t0, &k.b0, rec, Some(&lr.published), Some(&lr.printed_h_tilde)));
        if let Some(ht) = &rec.h_tilde {
            if ht > &lr.printed_h_tilde {
                report.discrepancies.push(format!(
                    "H~ of the {} run is {} > printed {}",
                    lr.lemma,
                    ht.to_decimal(12),
                    lr.printed_h_tilde.to_decimal(12)
                ));
            }
        }
    }
    report.stages.push(Stage::new("long_runs", true, lemmas.values().map(|l| l.cert.clone()).collect()));
    report.time("stage2_long_runs", t);

    let t = Instant::now();
    let bds = &lemmas["bds"];
    let mut dfapos = Certificate::new(CertKind::Bound, "corollary_dFapos");
    dfapos.push(Check::fact("lemma bds certified", bds.cert.passed()));
    let mut theta_a_bound = None;
    match (bds.ranges.get("F_dot_a"), bds.ranges.get("R_dot_a"), bds.ranges.get("Theta_a")) {
        (Some(fa), Some(ra), Some(ta)) => {
            dfapos.push(Check::gt("F_dot_a > 0", fa.lo(), &Rat::zero()));
            dfapos.push(Check::gt("R_dot_a > 0", ra.lo(), &Rat::zero()));
            let tb = ta.mag();
            dfapos.input("|Theta_a| bound", tb.to_string());
            let printed = q("27/1000");
            if tb >= printed {
                report.discrepancies.push(format!(
                    "|Theta_a| < 27/1000 does not follow from lemma bds; the certified bound is {}",
                    tb.to_decimal(9)
                ));
            }
            theta_a_bound = Some(tb);
        }
        _ => {
            dfapos.note("lemma bds ranges unavailable".into());
            dfapos.set_inconclusive();
        }
    }
    dfapos.finish();
    let w_rec = &long.iter().find(|(lr, _)| lr.field == FieldName::W).expect("W run").1;
    let eps_w = long.iter().find(|(lr, _)| lr.field == FieldName::W).expect("W run").0.eps.clone();
    let mut ddot = certify_second_derivative_bounds(&eps_w, &w_rec.z_final[0], &w_rec.z_final[2], cfg.budget);
    if !lemmas["bdsw"].cert.passed() {
        ddot.push(Check::fact("lemma bdsw certified", false));
        ddot.finish();
    }
    report.stages.push(Stage::new("corollaries", true, vec![dfapos.clone(), ddot.clone()]));
    report.time("stage3_corollaries", t);
    Foundation { lemmas, ddot, dfapos, theta_a_bound }
}

fn claim(name: &str) -> Ival {
    second_derivative_claims().into_iter().find(|(n, _, _)| *n == name).expect("known claim").2
}

/// Runs the stages needed for `target` and assembles the report.
pub fn run_proof(cfg: &PipelineConfig, target: Target) -> Report {
    let start = Instant::now();
    let k = &cfg.constants;
    let mut report = Report::new(&format!("verify {}", target.name()), cfg);
    let fd = foundation(cfg, &mut report);

    let lemmas = target.lemmas();
    let want_theta = matches!(target, Target::Theta | Target::Full);
    let runs: Vec<EdgeRun> = edge_runs(cfg)
        .into_iter()
        .filter(|r| match r.role {
            Role::Edge(_) => lemmas.contains(&r.lemma),
            Role::Center => want_theta || (lemmas.contains(&r.lemma) && r.lemma != 1),
        })
        .collect();
    let t = Instant::now();
    let recs = map_maybe_par(&runs, cfg.parallel, |r| {
        round_taylor_run(&RunConfig::proof_run(FieldName::W, &r.t, &r.a, &r.b, r.k, r.q))
    });
    report.time("stage4_edge_runs", t);
    for (r, rec) in runs.iter().zip(&recs) {
        let s = summarize(format!("edge_{}", r.id), &r.t, &r.b, rec, Some(&r.published), Some(&r.printed.1));
        if let Some(ag) = &s.published_agreement {
            if !ag.holds {
                report.discrepancies.push(format!(
                    "printed Z_W vector of run {} (lemma {}, {:?}) differs from the run at its stated parameters by {} in component {} (band {})",
                    r.id,
                    r.lemma,
                    r.role,
                    ag.max_deviation.to_decimal(15),
                    ag.worst_component + 1,
                    ag.band.to_decimal(15)
                ));
            }
        }
        report.runs.push(s);
    }

    let mono = Monotonicity {
        f_dot_a_pos: Some(fd.dfapos.passed()),
        r_ddot_pos: Some(fd.ddot.passed() && claim("r_ddot").lo().signum() > 0),
    };
    let mut pm = Vec::new();
    for &lemma in lemmas {
        let (b, tc, ac) = match lemma {
            1 => (k.b0.clone(), k.t0.clone(), k.a0.clone()),
            2 => (&k.b0 - &k.sb, &k.t0 - &k.st, &k.a0 + &k.sa),
            _ => (&k.b0 + &k.sb, &k.t0 + &k.st, &k.a0 - &k.sa),
        };
        let rect = Rect::centered(b, &tc, &k.dt, &ac, &k.da);
        let edges: Vec<EdgeEvidence> = runs
            .iter()
            .zip(&recs)
            .filter(|(r, _)| r.lemma == lemma)
            .filter_map(|(r, rec)| match r.role {
                Role::Edge(e) => {
                    let comp = if matches!(e, Edge::Bottom | Edge::Top) { 1 } else { 3 };
                    Some(EdgeEvidence {
                        edge: e,
                        run: format!("edge_{}", r.id),
                        t: r.t.clone(),
                        a: r.a.clone(),
                        value: rec.z_final[comp].clone(),
                        h_tilde: rec.h_tilde.clone().unwrap_or_else(|| Rat::int(1)),
                        run_certified: rec.certified,
                        printed: Some(r.printed.clone()),
                    })
                }
                Role::Center => None,
            })
            .collect();
        pm.push(poincare_miranda_check(&format!("lemma{lemma}_poincare_miranda"), &rect, &edges, &mono));
    }
    if !pm.is_empty() {
        report.stages.push(Stage::new("poincare_miranda", true, pm.clone()));
    }

    if matches!(target, Target::Lemma4 | Target::Full) {
        let t = Instant::now();
        let bds = &fd.lemmas["bds"];
        let bdsb = &fd.lemmas["bdsb"];
        let get = |l: &LemmaBounds, n: &str| l.ranges.get(n).cloned();
        let cert = match (get(bds, "F_dot_a"), get(bds, "R_dot_a"), get(bdsb, "F_dot_b"), get(bdsb, "R_dot_b")) {
            (Some(fa), Some(ra), Some(fb), Some(rb)) => {
                let f_dd = claim("f_ddot");
                let f_tt = Ival::hull_of(f_dd.lo().abs(), f_dd.hi().abs());
                let r_ta = if ra.lo().signum() > 0 { ra.clone() } else { Ival::hull_of(ra.mig(), ra.mag()) };
                let bounds = IftBounds {
                    f_tt,
                    f_ta: fa.mag(),
                    f_tb: fb.mag(),
                    r_tt: claim("r_ddot").mag(),
                    r_ta,
                    r_tb: rb.mag(),
                    sources_certified: bds.cert.passed() && bdsb.cert.passed() && fd.ddot.passed(),
                };
                let mut c = ift_region_check(&IftParams::published(k), &bounds, &k.sb);
                c.name = "lemma4_ift".into();
                c
            }
            _ => {
                let mut c = Certificate::new(CertKind::Uniqueness, "lemma4_ift");
                c.note("derivative ranges unavailable".into());
                c.set_inconclusive();
                c.finish();
                c
            }
        };
        report.stages.push(Stage::new("implicit_function", true, vec![cert]));
        report.time("stage5_ift", t);
    }

    let mut thetas = Vec::new();
    if want_theta || lemmas.iter().any(|&l| l > 1) {
        let t = Instant::now();
        let theta_dot = claim("theta_dot").mag();
        for (r, rec) in runs.iter().zip(&recs).filter(|(r, _)| r.role == Role::Center) {
            if !(want_theta || lemmas.contains(&r.lemma)) {
                continue;
            }
            let side = if r.lemma == 2 { Side::Below } else { Side::Above };
            let h_tilde = rec.h_tilde.clone().unwrap_or_else(|| Rat::int(1));
            let inp = ThetaInput {
                center: rec.z_final[4].clone(),
                h_tilde: h_tilde.clone(),
                run_certified: rec.certified && fd.ddot.passed() && fd.dfapos.passed(),
                theta_a_bound: fd.theta_a_bound.clone().unwrap_or_else(|| Rat::int(1000)),
                theta_dot_bound: theta_dot.clone(),
                da_span: k.da.clone(),
                dt_span: k.dt.clone(),
                side,
            };
            thetas.push(theta_comparison(&format!("lemma{}_theta", r.lemma), &inp, &cfg.pi_width));
            thetas.push(printed_theta(cfg, r, &mut report.discrepancies));
        }
        report.stages.push(Stage::new("theta", true, thetas.clone()));
        report.time("stage6_theta", t);
    }

    if target == Target::Full {
        let mut parts: Vec<&Certificate> = Vec::new();
        for s in report.stages.iter().filter(|s| s.required) {
            parts.extend(s.certificates.iter());
        }
        let per = assemble_periodicity(k, &parts);
        report.stages.push(Stage::new("periodicity", true, vec![per]));
    }
    report.time("total", start);
    report.finish();
    report
}

/// The printed Θ arithmetic for a center run: the printed sum against 7π/18
/// and its rectangle version with the printed derivative bounds.
fn printed_theta(cfg: &PipelineConfig, r: &EdgeRun, disc: &mut Vec<String>) -> Certificate {
    let k = &cfg.constants;
    let mut c = Certificate::new(CertKind::ThetaComparison, &format!("lemma{}_theta_printed", r.lemma));
    let (center, ht) = &r.printed;
    let (printed_sum, side, sum) = if r.lemma == 2 {
        (q("122172921709501/100000000000000"), Side::Below, center + ht)
    } else {
        (q("24434637066123/20000000000000"), Side::Above, center - ht)
    };
    c.input("printed center", center.to_string());
    c.input("printed H~", ht.to_string());
    c.input("printed sum", printed_sum.to_string());
    if sum != printed_sum {
        disc.push(format!(
            "lemma {} Theta arithmetic: printed center and H~ combine to {}, printed as {}",
            r.lemma, sum, printed_sum
        ));
    }
    // the printed spread multiplies da by the Θ-dot bound and dt by the Θ_a bound
    let spread = q("483453/1000000") * &k.da + q("27/1000") * &k.dt;
    c.input("printed spread", spread.to_string());
    let (lbl, rect) = match side {
        Side::Below => ("printed sum + spread < 7pi/18", &printed_sum + &spread),
        Side::Above => ("printed sum - spread > 7pi/18", &printed_sum - &spread),
    };
    let rel = if side == Side::Below { "<" } else { ">" };
    c.push(compare_seven_pi_18(&format!("printed sum {rel} 7pi/18"), &printed_sum, side, &cfg.pi_width));
    c.push(compare_seven_pi_18(lbl, &rect, side, &cfg.pi_width));
    if sum != printed_sum {
        let (l2, rect2) = match side {
            Side::Below => ("recomputed sum + spread < 7pi/18", &sum + &spread),
            Side::Above => ("recomputed sum - spread > 7pi/18", &sum - &spread),
        };
        c.push(compare_seven_pi_18(&format!("recomputed sum {rel} 7pi/18"), &sum, side, &cfg.pi_width));
        c.push(compare_seven_pi_18(l2, &rect2, side, &cfg.pi_width));
    }
    c.finish();
    c
}

/// The H̃ values of the three long runs from the printed constants, without
/// integrating (criterion-style check of the error formula alone).
pub fn long_run_error_bounds(cfg: &PipelineConfig) -> Vec<(FieldName, Rat, Rat)> {
    let h = &cfg.constants.t0 / &Rat::int(cfg.long_steps as i64);
    let big_h = GridSpec::floor(cfg.grid_exp).spacing();
    long_runs()
        .into_iter()
        .map(|lr| {
            let c = HypothesisConstants::published(lr.field, &h);
            let ht = global_error_bound(&c, &h, &big_h, cfg.long_steps, 2).expect("positive L");
            (lr.field, ht, lr.printed_h_tilde)
        })
        .collect()
}

/// A single Round Taylor run of W, G or U as a report.
pub fn single_run(field: FieldName, t: &Rat, a: &Rat, b: &Rat, k: u32, q_exp: u32, order: u32, keep: bool) -> (Report, RunRecord) {
    let start = Instant::now();
    let mut cfg = RunConfig::proof_run(field, t, a, b, k, q_exp);
    cfg.order = order;
    cfg.keep_trajectory = keep;
    let rec = round_taylor_run(&cfg);
    let mut report = Report::new("run", &PipelineConfig::default());
    if order != 2 {
        report.deviations.push(format!("order = {order} (published 2)"));
        report.paper_faithful = false;
    }
    let mut c = Certificate::new(CertKind::Bound, "run");
    c.push(Check::fact("all steps rounded with |z - y| <= H", rec.failure.as_ref().map_or(true, |f| !f.reason.starts_with("rounding"))));
    c.push(Check::fact("z_j in U1 for every j", rec.containment_ok.iter().all(|&b| b)));
    if let (Some(ht), Some(con)) = (&rec.h_tilde, &rec.constants) {
        c.push(Check::lt("M0 h + H~ < eps", &(&(&con.m0 * &rec.h) + ht), &cfg.epsilon));
    }
    c.finish();
    report.runs.push(summarize("run".into(), t, b, &rec, None, None));
    report.stages.push(Stage::new("run", true, vec![c]));
    report.time("total", start);
    report.finish();
    (report, rec)
}

/// Writes the whole z-sequence of a run as CSV (one row per step).
pub fn write_run_csv(rec: &RunRecord, labels: &[&str], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "j,{}", labels.join(","))?;
    if let Some(t) = &rec.trajectory {
        for (j, z) in t.iter().enumerate() {
            let cols: Vec<String> = z.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{j},{}", cols.join(","))?;
        }
    }
    Ok(())
}

/// Midpoints of series enclosures of cos and sin, after reducing by a
/// rational approximation of 2π. Presentation grade only.
pub fn cos_sin_mid(x: &Rat) -> (Rat, Rat) {
    let pi = pi_enclosure(&Rat::pow10(-30)).expect("positive width").mid();
    let two_pi = Rat::int(2) * &pi;
    let n = (x / &two_pi).floor();
    let mut r = x - &(Rat::from_integer(n) * &two_pi);
    if r > pi {
        r = r - &two_pi;
    }
    // |r| <= π: 40 terms of each series leave a tail far below 1e-20
    let r2 = &r * &r;
    let mut c = Rat::zero();
    let mut s = Rat::zero();
    let mut tc = Rat::one();
    let mut ts = r.clone();
    for i in 0..40i64 {
        c = c + &tc;
        s = s + &ts;
        tc = -(&tc * &r2) / Rat::int((2 * i + 1) * (2 * i + 2));
        ts = -(&ts * &r2) / Rat::int((2 * i + 2) * (2 * i + 3));
        tc = tc.floor_digits(40);
        ts = ts.floor_digits(40);
    }
    (c.floor_digits(30), s.floor_digits(30))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExportSummary {
    pub rows: usize,
    pub substeps: u32,
    pub certified: bool,
    pub note: String,
}

/// Positions of the three bodies from `(F, R, Θ)`:
/// `(0, 0, F)`, `(R cos Θ, R sin Θ, -F)`, `(-R cos Θ, -R sin Θ, -F)`.
pub fn body_positions(f: &Rat, r: &Rat, theta: &Rat) -> [[Rat; 3]; 3] {
    let (c, s) = cos_sin_mid(theta);
    let x = r * &c;
    let y = r * &s;
    [[Rat::zero(), Rat::zero(), f.clone()], [x.clone(), y.clone(), -f.clone()], [-x, -y, -f.clone()]]
}

/// Integrates W from `(0, b, 10, 0, 0)` to `t_end` and writes `steps + 1`
/// rows of body positions.
pub fn export_trajectory(a: &Rat, b: &Rat, t_end: &Rat, steps: u32, out: &mut dyn Write) -> std::io::Result<ExportSummary> {
    let steps = steps.max(1);
    let row_dt = t_end / &Rat::int(steps as i64);
    // keep the integration step near the proof's t0/30000
    let target = Rat::frac(1, 10000);
    let ratio = (&row_dt.abs() / &target).ceil();
    let sub = ratio.to_u32().unwrap_or(1).max(1);
    let mut cfg = RunConfig::proof_run(FieldName::W, &(t_end), a, b, steps * sub, 14);
    cfg.containment = None;
    cfg.constants = None;
    cfg.keep_trajectory = true;
    let rec = round_taylor_run(&cfg);
    writeln!(out, "t,x1,y1,z1,x2,y2,z2,x3,y3,z3")?;
    let traj = rec.trajectory.as_ref().expect("trajectory kept");
    let mut rows = 0;
    for (j, z) in traj.iter().enumerate().step_by(sub as usize) {
        let t = &row_dt * &Rat::int((j / sub as usize) as i64);
        let p = body_positions(&z[0], &z[2], &z[4]);
        let mut cols = vec![t.to_decimal(12)];
        for body in &p {
            for v in body {
                cols.push(v.to_decimal(12));
            }
        }
        writeln!(out, "{}", cols.join(","))?;
        rows += 1;
    }
    Ok(ExportSummary {
        rows,
        substeps: sub,
        certified: false,
        note: "positions use series midpoints for cos and sin and no error bound; presentation only".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_decimals() {
        assert!(PipelineConfig::parse("a0 = 4.3").is_err());
        assert!(PipelineConfig::parse("grid_exp = 1.5").is_err());
        assert!(PipelineConfig::parse("nonsense").is_err());
        let c = PipelineConfig::parse("# defaults\nt0 = 13366894627923/5000000000000\nparallel=false\n").unwrap();
        assert!(c.deviations().is_empty());
        assert!(!c.parallel);
        let c = PipelineConfig::parse("grid_exp=15").unwrap();
        assert_eq!(c.deviations(), vec!["grid_exp = 15 (published 14)".to_string()]);
    }

    #[test]
    fn edge_run_parameters() {
        let cfg = PipelineConfig::default();
        let r = edge_runs(&cfg);
        assert_eq!(r.len(), 14);
        let k = &cfg.constants;
        assert_eq!(r[0].t, &k.t0 - &k.dt);
        assert_eq!(r[10].q, 15);
        assert_eq!(r.iter().filter(|x| x.k == 120000).count(), 3);
    }

    #[test]
    fn agreement_band() {
        let z = vec![Rat::one(), Rat::zero()];
        let p = vec![Rat::one(), Rat::frac(3, 1000)];
        let a = agreement(&z, &p, &Rat::frac(1, 1000), &Rat::zero());
        assert!(!a.holds);
        assert_eq!(a.worst_component, 1);
        assert!(agreement(&z, &p, &Rat::frac(1, 1000), &Rat::frac(1, 2000)).holds);
    }

    #[test]
    fn cos_sin_basic() {
        let (c, s) = cos_sin_mid(&Rat::zero());
        assert_eq!((c, s), (Rat::one(), Rat::zero()));
        let (c, s) = cos_sin_mid(&Rat::int(7));
        assert!((c.to_f64() - 7f64.cos()).abs() < 1e-12);
        assert!((s.to_f64() - 7f64.sin()).abs() < 1e-12);
    }
}

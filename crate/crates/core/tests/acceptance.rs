//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use rtaylor::bounds::HypothesisConstants;
use rtaylor::exact::{
    certified_floor, floor_to_grid, geometric_recurrence_closed_form, nearest_grid_in, pi_enclosure, GridSpec, Ival, Rat,
};
use rtaylor::fields::FieldName;
use rtaylor::integrator::global_error_bound;
use rtaylor::pipeline::{repro_intro, run_proof, PipelineConfig, Report, Target};
use rtaylor::topology::Verdict;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, title: &'static str, pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { id, title, pass, detail: detail.into() }
}

fn q(s: &str) -> Rat {
    s.parse().unwrap()
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let r = repro_intro(6);
    let el = t.elapsed();
    let matched = r.intro.iter().filter(|row| row.matches).count();
    let pass = r.verdict == Verdict::Pass && matched == 10 && el < Duration::from_secs(1);
    outcome("1", "intro table bit-exact", pass, format!("{matched}/10 pairs equal, {}", secs(el)))
}

fn criterion_2() -> Vec<Outcome> {
    let cfg = PipelineConfig::default();
    let h = &cfg.constants.t0 / &Rat::int(30000);
    let big_h = Rat::pow10(-14);
    let mut out = Vec::new();
    for (id, f, bound) in [
        ("2a", FieldName::W, q("127/1000000000")),
        ("2b", FieldName::U, q("209/100000000")),
        ("2c", FieldName::G, q("19/10000000")),
    ] {
        let t = Instant::now();
        let c = HypothesisConstants::published(f, &h);
        let ht = global_error_bound(&c, &h, &big_h, 30000, 2).unwrap();
        let el = t.elapsed();
        let pass = ht <= bound && el < Duration::from_secs(1);
        out.push(outcome(
            id,
            match f {
                FieldName::W => "error bound, W constants",
                FieldName::U => "error bound, U constants",
                _ => "error bound, G constants",
            },
            pass,
            format!("H~ = {} vs {} ({}), {}", ht.to_decimal(13), bound, bound.to_decimal(13), secs(el)),
        ));
    }
    out
}

fn criterion_3(r: &Report) -> Vec<Outcome> {
    let mut out = Vec::new();
    for (id, title, prefix, expect) in [("3a", "long runs agree with printed vectors", "long_", 3), ("3b", "edge and center runs agree with printed vectors", "edge_", 14)] {
        let runs: Vec<_> = r.runs.iter().filter(|s| s.name.starts_with(prefix)).collect();
        let bad: Vec<String> = runs
            .iter()
            .filter(|s| !s.published_agreement.as_ref().is_some_and(|a| a.holds))
            .map(|s| {
                let a = s.published_agreement.as_ref();
                format!(
                    "{} off by {} (band {})",
                    s.name,
                    a.map_or("?".into(), |a| a.max_deviation.to_decimal(15)),
                    a.map_or("?".into(), |a| a.band.to_decimal(15))
                )
            })
            .collect();
        let pass = runs.len() == expect && bad.is_empty();
        let detail = if bad.is_empty() {
            format!("{}/{} within 2(H + H~)", runs.len(), expect)
        } else {
            format!("{}/{} within 2(H + H~); {}", runs.len() - bad.len(), expect, bad.join("; "))
        };
        out.push(outcome(id, title, pass, detail));
    }
    out
}

fn criterion_4(r: &Report) -> Outcome {
    let d = r.certificate("dictionary").expect("dictionary certificate");
    let certified: usize = d.inputs["certified"].parse().unwrap();
    let unlisted: Vec<&String> = d.notes.iter().filter(|n| n.contains("inconclusive")).collect();
    let listed = unlisted.iter().all(|n| r.discrepancies.iter().any(|x| x.contains(n.split(':').next().unwrap())));
    let hyp = r.stage("hypotheses").expect("hypotheses stage");
    let pass = certified >= 50 && listed && hyp.verdict == Verdict::Pass && hyp.certificates.len() == 3;
    let not: Vec<String> = r
        .discrepancies
        .iter()
        .filter(|x| x.starts_with("B(phi"))
        .map(|x| x.split(' ').next().unwrap().to_string())
        .collect();
    outcome(
        "4",
        "dictionary and hypothesis tables certify",
        pass,
        format!("{certified}/58 certified (not: {}), hypothesis tables {:?}", not.join(", "), hyp.verdict),
    )
}

fn criterion_5(r: &Report) -> Outcome {
    let pm = r.stage("poincare_miranda").expect("poincare_miranda stage");
    let ours: Vec<_> = pm.certificates.iter().flat_map(|c| &c.transcript).filter(|c| c.label.ends_with("> 0 margin") || c.label.ends_with("< 0 margin")).collect();
    let printed: Vec<_> = pm.certificates.iter().flat_map(|c| &c.transcript).filter(|c| c.label.ends_with("printed margin")).collect();
    let min = ours.iter().chain(&printed).filter_map(|c| c.margin.clone()).reduce(Rat::min);
    // independent recomputation of one printed margin
    let sample = q("25787091/20000000000000") - q("94851/1000000000000");
    let pass = ours.len() == 12
        && printed.len() == 12
        && ours.iter().chain(&printed).all(|c| c.holds && c.recheck())
        && sample.signum() > 0
        && pm.verdict == Verdict::Pass;
    outcome(
        "5",
        "edge sign margins",
        pass,
        format!(
            "{} computed and {} printed margins positive, smallest {}",
            ours.iter().filter(|c| c.holds).count(),
            printed.iter().filter(|c| c.holds).count(),
            min.map_or("?".into(), |m| m.to_decimal(15))
        ),
    )
}

fn criterion_6(r: &Report) -> Outcome {
    let c = r.certificate("lemma4_ift").expect("ift certificate");
    let sb = &PipelineConfig::default().constants.sb;
    let get = |k: &str| c.inputs.get(k).map(|v| q(v));
    let (r1, r2) = (get("rho1"), get("rho2"));
    let indep = matches!((&r1, &r2), (Some(a), Some(b)) if sb < a && sb < b);
    let pass = c.verdict == Verdict::Pass && indep && c.check("sb < rho1").is_some_and(|x| x.holds) && c.check("sb < rho2").is_some_and(|x| x.holds);
    let f = |x: Option<Rat>| x.map_or("?".into(), |v| v.to_decimal(9));
    outcome(
        "6",
        "implicit function region",
        pass,
        format!("m1 = {}, m2 = {}, rho1 = {}, rho2 = {}, sb = {}", f(get("m1")), f(get("m2")), f(r1), f(r2), sb.to_decimal(9)),
    )
}

fn criterion_7(r: &Report) -> Outcome {
    let names = ["lemma2_theta", "lemma2_theta_printed", "lemma3_theta", "lemma3_theta_printed"];
    let certs: Vec<_> = names.iter().map(|n| r.certificate(n)).collect();
    let all = certs.iter().all(|c| c.is_some_and(|c| c.passed() && c.transcript.iter().all(|x| x.recheck())));
    let pi = pi_enclosure(&Rat::pow10(-30)).unwrap().scale(&Rat::frac(7, 18));
    let below = q("122172921709501/100000000000000");
    let above = q("24434637066123/20000000000000");
    let indep = &below < pi.lo() && &above > pi.hi();
    let margins: Vec<String> = certs
        .iter()
        .flatten()
        .flat_map(|c| &c.transcript)
        .filter(|x| x.label.contains("spread"))
        .filter_map(|x| x.margin.as_ref().map(|m| m.to_decimal(10)))
        .collect();
    outcome("7", "theta comparisons against 7pi/18", all && indep, format!("rectangle margins {}", margins.join(", ")))
}

fn criterion_8(r: &Report) -> Outcome {
    let c = r.certificate("periodicity").expect("periodicity certificate");
    let k = &PipelineConfig::default().constants;
    let tw = Rat::int(6) * (&k.st + &k.dt);
    let window = Ival::new(&k.t0 - &tw, &k.t0 + &tw).unwrap().to_string();
    let pass = r.verdict == Verdict::Pass
        && c.passed()
        && c.inputs.get("period").map(String::as_str) == Some("36 t_bar")
        && c.inputs.get("t_bar window") == Some(&window);
    outcome("8", "full pipeline periodicity certificate", pass, format!("verdict {:?}, t_bar in {window}, period 36 t_bar", r.verdict))
}

fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-1_000_000i64..1_000_000, 1i64..100_000).prop_map(|(n, d)| Rat::frac(n, d))
}

fn ival_strategy() -> impl Strategy<Value = (Rat, Ival)> {
    (rat_strategy(), 0i64..1000, 0i64..1000).prop_map(|(x, a, b)| {
        let iv = Ival::new(&x - &Rat::frac(a, 997), &x + &Rat::frac(b, 991)).unwrap();
        (x, iv)
    })
}

fn criterion_9() -> Vec<Outcome> {
    let mut out = Vec::new();

    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    let res = runner.run(&(ival_strategy(), ival_strategy()), |((x, ix), (y, iy))| {
        prop_assert!(ix.add(&iy).contains(&(&x + &y)));
        prop_assert!(ix.sub(&iy).contains(&(&x - &y)));
        prop_assert!(ix.mul(&iy).contains(&(&x * &y)));
        prop_assert!(ix.neg().contains(&-&x));
        prop_assert!(ix.scale(&y).contains(&(&x * &y)));
        prop_assert!(ix.add_rat(&y).contains(&(&x + &y)));
        prop_assert!(ix.powi(2).unwrap().contains(&(&x * &x)));
        prop_assert!(ix.powi(3).unwrap().contains(&(&(&x * &x) * &x)));
        if !iy.contains_zero() {
            prop_assert!(ix.div(&iy).unwrap().contains(&(&x / &y)));
            prop_assert!(iy.recip().unwrap().contains(&y.recip().unwrap()));
        }
        prop_assert!(ix.hull(&iy).contains(&x) && ix.hull(&iy).contains(&y));
        prop_assert!(ix.round_out(4).contains(&x));
        Ok(())
    });
    out.push(outcome("9a", "interval soundness fuzz, 10^4 points", res.is_ok(), format!("{res:?}")));

    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    let res = runner.run(&(rat_strategy(), 1u32..16), |(x, qe)| {
        let g = GridSpec::floor(qe);
        let h = g.spacing();
        let f = floor_to_grid(&x, g);
        let d = &x - &f;
        prop_assert!(d.signum() >= 0 && d < h);
        prop_assert!(g.is_on_grid(&f));
        prop_assert_eq!(certified_floor(&Ival::point(x.clone()), g), Some(f.clone()));
        let (n, ok) = nearest_grid_in(&Ival::point(x.clone()), GridSpec::nearest(qe));
        prop_assert!(ok && (&n - &x).abs() <= &h / &Rat::int(2));
        Ok(())
    });
    out.push(outcome("9b", "grid rounding invariants", res.is_ok(), format!("{res:?}")));

    let mut runner = TestRunner::new(Config { cases: 1_000, failure_persistence: None, ..Config::default() });
    let res = runner.run(&(rat_strategy(), (1i64..1000, 1i64..1000), rat_strategy(), 0u32..40), |(p, (ln, ld), q0, k)| {
        let l = Rat::frac(ln, ld);
        let mut it = q0.clone();
        for _ in 0..k {
            it = (Rat::one() + &l) * &it + &p;
        }
        prop_assert_eq!(geometric_recurrence_closed_form(&p, &l, &q0, k).unwrap(), it);
        Ok(())
    });
    out.push(outcome("9c", "recurrence closed form equals iteration, 10^3 draws", res.is_ok(), format!("{res:?}")));
    out
}

fn main() {
    let start = Instant::now();
    let mut results = vec![criterion_1()];
    results.extend(criterion_2());

    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let parallel = pool.install(|| run_proof(&PipelineConfig::default(), Target::Full));
    results.extend(criterion_3(&parallel));
    results.push(criterion_4(&parallel));
    results.push(criterion_5(&parallel));
    results.push(criterion_6(&parallel));
    results.push(criterion_7(&parallel));
    results.push(criterion_8(&parallel));
    results.extend(criterion_9());

    let serial = run_proof(&PipelineConfig { parallel: false, ..PipelineConfig::default() }, Target::Full);
    let (a, b) = (parallel.to_json(false), serial.to_json(false));
    results.push(outcome(
        "9d",
        "report determinism across worker counts",
        a == b,
        format!("4 workers vs serial: {} vs {} bytes, {}", a.len(), b.len(), if a == b { "identical" } else { "different" }),
    ));

    println!();
    for o in &results {
        println!("criterion {:<3} {} {}: {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.title, o.detail);
    }
    let failed = results.iter().filter(|o| !o.pass).count();
    println!("{} passed, {} failed, {}", results.len() - failed, failed, secs(start.elapsed()));
    if failed > 0 {
        std::process::exit(1);
    }
}

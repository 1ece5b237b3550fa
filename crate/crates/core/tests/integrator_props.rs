use proptest::prelude::*;

use rtaylor::bounds::{published_constants, HypothesisConstants};
use rtaylor::exact::{geometric_recurrence_closed_form, GridSpec, Rat};
use rtaylor::fields::{a0, FieldName};
use rtaylor::integrator::{certified_state, global_error_bound, round_taylor_run, RunConfig};

fn short_w(b: &Rat, k: u32, keep: bool) -> RunConfig {
    let mut c = RunConfig::proof_run(FieldName::W, &Rat::frac(1, 5), &a0(), b, k, 14);
    c.keep_trajectory = keep;
    c
}

#[test]
fn identical_configs_give_identical_records() {
    let cfg = short_w(&Rat::frac(1, 10), 500, true);
    let a = round_taylor_run(&cfg);
    let b = std::thread::spawn(move || round_taylor_run(&cfg)).join().unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn states_live_on_the_grid() {
    for f in [FieldName::W, FieldName::G, FieldName::U] {
        let mut cfg = RunConfig::proof_run(f, &Rat::frac(1, 20), &a0(), &Rat::zero(), 100, 12);
        cfg.keep_trajectory = true;
        let rec = round_taylor_run(&cfg);
        assert!(rec.certified, "{f:?}: {:?}", rec.failure);
        for z in rec.trajectory.as_ref().unwrap() {
            assert!(z.iter().all(|v| cfg.grid.is_on_grid(v)));
        }
    }
}

#[test]
fn intro_steps_stay_within_h_of_exact() {
    let rec = round_taylor_run(&RunConfig::intro());
    let ys = rec.exact_y.as_ref().unwrap();
    let zs = rec.trajectory.as_ref().unwrap();
    let h = Rat::pow10(-6);
    for (y, z) in ys.iter().zip(&zs[1..]) {
        assert!((&y[0] - &z[0]).abs() <= h);
    }
}

#[test]
fn recursion_envelope_dominates_drift() {
    // y' = y - y^2/3 near y = 1/2: |f'| <= 1 and |y''| <= 1
    let mut fine = RunConfig::intro();
    fine.grid = GridSpec::floor(9);
    let coarse = round_taylor_run(&RunConfig::intro());
    let fine = round_taylor_run(&fine);
    let h = Rat::frac(1, 100);
    let env = |big_h: Rat, i: u32| geometric_recurrence_closed_form(&(&h * &h / Rat::int(2) + big_h), &h, &Rat::zero(), i).unwrap();
    let (c, f) = (coarse.trajectory.unwrap(), fine.trajectory.unwrap());
    for i in 1..=10u32 {
        let drift = (&c[i as usize][0] - &f[i as usize][0]).abs();
        assert!(drift <= env(Rat::pow10(-6), i) + env(Rat::pow10(-9), i), "step {i}");
    }
}

#[test]
fn reflected_runs_overlap() {
    // W is odd in (F, F-dot): starting from -b mirrors the F components,
    // and the mirrored run lives in the mirrored box with the same constants
    let k = 400;
    let p = round_taylor_run(&short_w(&Rat::frac(3, 10), k, true));
    let mut mc = short_w(&Rat::frac(-3, 10), k, true);
    let boxes = mc.containment.take().unwrap();
    mc.containment = Some(boxes.iter().enumerate().map(|(i, iv)| if i < 2 { iv.neg() } else { iv.clone() }).collect());
    let m = round_taylor_run(&mc);
    assert!(p.certified && m.certified, "{:?} / {:?}", p.failure, m.failure);
    for j in (0..=k).step_by(40) {
        let a = certified_state(&p, j).unwrap();
        let b = certified_state(&m, j).unwrap();
        for (i, (u, v)) in a.iter().zip(&b).enumerate() {
            let v = if i < 2 { v.neg() } else { v.clone() };
            assert!(u.intersect(&v).is_some(), "step {j} component {i}: {u} vs {v}");
        }
    }
}

#[test]
fn uncertified_run_keeps_its_states() {
    let mut cfg = short_w(&Rat::zero(), 10, true);
    cfg.epsilon = Rat::pow10(-12);
    let rec = round_taylor_run(&cfg);
    assert!(!rec.certified);
    assert_eq!(rec.trajectory.as_ref().unwrap().len(), 11);
    assert!(certified_state(&rec, 3).is_err());
}

fn constants(f: FieldName, h: &Rat, scale: &Rat) -> HypothesisConstants {
    let (m0, k0, k1, m) = published_constants(f);
    HypothesisConstants::new(m0, m.iter().map(|v| v * scale).collect(), k0, k1, h)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn error_bound_monotone(k in 1u32..40000, dk in 0u32..1000, q in 8u32..16, s in 1i64..100, ds in 0i64..100, hn in 1i64..1000) {
        let h = Rat::frac(hn, 10_000_000);
        let c = constants(FieldName::W, &h, &Rat::frac(s, 10));
        let c2 = constants(FieldName::W, &h, &Rat::frac(s + ds, 10));
        let big = GridSpec::floor(q).spacing();
        let bigger = GridSpec::floor(q - 1).spacing();
        let base = global_error_bound(&c, &h, &big, k, 2).unwrap();
        prop_assert!(base <= global_error_bound(&c, &h, &big, k + dk, 2).unwrap());
        prop_assert!(base <= global_error_bound(&c, &h, &bigger, k, 2).unwrap());
        prop_assert!(base <= global_error_bound(&c2, &h, &big, k, 2).unwrap());
    }
}

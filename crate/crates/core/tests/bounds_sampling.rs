use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use rtaylor::bounds::{certify_dictionary, optimize_over_box, BoundStatus, BoundTask, DEFAULT_BUDGET};
use rtaylor::exact::{Ival, Rat};
use rtaylor::fields::{dictionary, eval_phi, k, x, DomainBox, StatePoint, NVARS};

fn point_in_v() -> impl Strategy<Value = StatePoint> {
    proptest::collection::vec(0i64..=997, NVARS).prop_map(|u| {
        let v = DomainBox::v();
        let vars = v.iv.iter().zip(u).map(|(iv, k)| Some(Ival::point(iv.lo() + &(iv.width() * Rat::frac(k, 997))))).collect();
        StatePoint { vars }
    })
}

#[test]
fn certified_ranges_survive_sampling() {
    let only: Vec<usize> = (1..=20).collect();
    let rep = certify_dictionary(Some(&only), DEFAULT_BUDGET, true);
    let certified: Vec<(usize, Ival)> = rep
        .entries
        .iter()
        .filter(|e| e.status == BoundStatus::Certified)
        .map(|e| (e.index, e.range.clone()))
        .collect();
    assert!(certified.len() >= 15);
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner
        .run(&point_in_v(), |p| {
            for (i, range) in &certified {
                let v = eval_phi(*i, &p, Some(30)).unwrap();
                prop_assert!(v.subset_of(range), "phi{i}: {v} not in {range}");
                prop_assert!(v.subset_of(dictionary().table(*i)));
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn refuted_entries_have_real_witnesses() {
    let rep = certify_dictionary(Some(&[58]), DEFAULT_BUDGET, true);
    let e = rep.get(58).unwrap();
    assert_eq!(e.status, BoundStatus::Refuted);
    let w = e.witness.as_ref().expect("witness");
    let mut p = StatePoint::empty();
    for (name, val) in w {
        let idx = if name == "a" { 12 } else { name[1..].parse::<usize>().unwrap() - 1 };
        p = p.with(idx, Ival::point(val.parse().unwrap()));
    }
    let v = eval_phi(58, &p, Some(30)).unwrap();
    assert!(!v.subset_of(&e.claimed), "{v} inside {}", e.claimed);
}

#[test]
fn more_budget_never_loses_a_certificate() {
    // x1 (x1 - 1) on [0, 2] has range [-1/4, 2]
    let mut dom = vec![None; NVARS];
    dom[0] = Some(Ival::frac(0, 1, 2, 1));
    let e = x(1) * (x(1) - k(1));
    let target = Ival::new(Rat::frac(-26, 100), Rat::frac(201, 100)).unwrap();
    let mut prev = false;
    for budget in [1usize, 4, 16, 64, 256, 1024, 4096] {
        let mut t = BoundTask::new(e.clone(), dom.clone(), target.clone());
        t.budget = budget;
        let out = optimize_over_box(&t);
        let ok = out.status == BoundStatus::Certified;
        assert!(!prev || ok, "budget {budget} lost the certificate");
        assert_ne!(out.status, BoundStatus::Refuted);
        assert!(out.range.lo() <= &Rat::frac(-1, 4) && out.range.hi() >= &Rat::int(2));
        prev = ok;
    }
    assert!(prev);
}

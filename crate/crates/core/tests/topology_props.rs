use proptest::prelude::*;

use rtaylor::exact::{Ival, Rat};
use rtaylor::topology::{
    default_pi_width, ift_region_check, poincare_miranda_check, theta_comparison, Edge, EdgeEvidence, IftBounds, IftParams,
    Monotonicity, ProofConstants, Rect, Side, ThetaInput, Verdict,
};

fn small() -> impl Strategy<Value = Rat> {
    (-500i64..500, 1i64..200).prop_map(|(n, d)| Rat::frac(n, d))
}

fn ev(edge: Edge, t: &Rat, a: &Rat, value: Rat) -> EdgeEvidence {
    EdgeEvidence { edge, run: "synthetic".into(), t: t.clone(), a: a.clone(), value, h_tilde: Rat::zero(), run_certified: true, printed: None }
}

fn published_bounds() -> IftBounds {
    IftBounds {
        f_tt: Ival::frac(813693, 1000000, 815845, 1000000),
        f_ta: Rat::frac(1, 2),
        f_tb: Rat::frac(53, 100),
        r_tt: Rat::frac(373, 1000),
        r_ta: Ival::frac(16182, 10000, 16717, 10000),
        r_tb: Rat::frac(908, 1000),
        sources_certified: true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    // f1 = -p (t - t*) + q (a - a*), f2 = r (t - t*) + s (a - a*): F_dot_a > 0 and R_ddot > 0
    #[test]
    fn poincare_miranda_matches_brute_force(
        (p, q, r, s) in (1i64..50, 1i64..50, 1i64..50, 1i64..50),
        ts in small(),
        as_ in small(),
    ) {
        let (p, q, r, s) = (Rat::int(p), Rat::int(q), Rat::int(r), Rat::int(s));
        let rect = Rect::centered(Rat::zero(), &Rat::zero(), &Rat::int(1), &Rat::zero(), &Rat::int(1));
        let f1 = |t: &Rat, a: &Rat| -(&p * &(t - &ts)) + &q * &(a - &as_);
        let f2 = |t: &Rat, a: &Rat| &r * &(t - &ts) + &s * &(a - &as_);
        let (tl, th, al, ah) = (rect.t.lo().clone(), rect.t.hi().clone(), rect.a.lo().clone(), rect.a.hi().clone());
        let edges = vec![
            ev(Edge::Bottom, &tl, &al, f1(&tl, &al)),
            ev(Edge::Top, &th, &ah, f1(&th, &ah)),
            ev(Edge::Left, &th, &al, f2(&th, &al)),
            ev(Edge::Right, &tl, &ah, f2(&tl, &ah)),
        ];
        let mono = Monotonicity { f_dot_a_pos: Some(true), r_ddot_pos: Some(true) };
        let cert = poincare_miranda_check("synthetic", &rect, &edges, &mono);

        let grid: Vec<Rat> = (0..=40).map(|i| Rat::frac(i - 20, 20)).collect();
        let brute = grid.iter().all(|u| {
            f1(&tl, u).signum() > 0 && f1(&th, u).signum() < 0 && f2(u, &al).signum() < 0 && f2(u, &ah).signum() > 0
        });
        prop_assert_eq!(cert.passed(), brute);
        if cert.passed() {
            // the unique common zero (t*, a*) must lie inside
            prop_assert!(rect.t.contains(&ts) && rect.a.contains(&as_));
        }
    }

    #[test]
    fn theta_margin_monotone(off in 1i64..10_000_000, extra in 0i64..10_000_000, below in any::<bool>()) {
        let base = Rat::frac(12217304763960, 10000000000000);
        let side = if below { Side::Below } else { Side::Above };
        let sign = if below { -1 } else { 1 };
        let mk = |d: i64| ThetaInput {
            center: &base + &Rat::frac(sign * d, 10_000_000_000_000),
            h_tilde: Rat::frac(1, 10_000_000_000_000),
            run_certified: true,
            theta_a_bound: Rat::frac(1, 100),
            theta_dot_bound: Rat::frac(1, 2),
            da_span: Rat::frac(1, 10_000_000_000),
            dt_span: Rat::frac(1, 10_000_000_000),
            side,
        };
        let w = default_pi_width();
        let near = theta_comparison("t", &mk(off), &w).passed();
        let far = theta_comparison("t", &mk(off + extra), &w).passed();
        // moving the center away from 7pi/18 can only help
        prop_assert!(!near || far);
    }

    #[test]
    fn ift_row_scaling_is_invariant(n in 1i64..1000, d in 1i64..1000) {
        let c = Rat::frac(n, d);
        let k = ProofConstants::default();
        let p = IftParams::published(&k);
        let mut ps = p.clone();
        ps.delta1 = &p.delta1 * &c;
        ps.delta1_t = &p.delta1_t * &c;
        ps.eps1 = &p.eps1 * &c;
        let b = published_bounds();
        let mut bs = b.clone();
        bs.f_tt = b.f_tt.scale(&c);
        bs.f_ta = &b.f_ta * &c;
        bs.f_tb = &b.f_tb * &c;
        prop_assert_eq!(p.m1(), ps.m1());
        prop_assert_eq!(p.m2(), ps.m2());
        prop_assert_eq!(ift_region_check(&p, &b, &k.sb).verdict, ift_region_check(&ps, &bs, &k.sb).verdict);
    }
}

#[test]
fn transcripts_recheck() {
    let k = ProofConstants::default();
    let c = ift_region_check(&IftParams::published(&k), &published_bounds(), &k.sb);
    assert_eq!(c.verdict, Verdict::Pass);
    assert!(c.transcript.iter().all(|x| x.recheck()));
}

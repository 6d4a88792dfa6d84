use lipfree::d2p::{
    ld2p_certificate, lip_ltp_witness, sd2p_certificate, two_lip_ltp_witness, D2pError, Ld2pOutcome, Ld2pRoute, Sd2pOutcome,
    TwoLipLtpOutcome,
};
use lipfree::example52::{core_points, epsilon, fixture_function, level_of};
use lipfree::functionals::{slice_diameter, PairMeasure, UnitBall};
use lipfree::lipschitz::{slope, LipschitzFunction};
use lipfree::lpcore::solve_lp;
use lipfree::metric::{build_example52, FiniteMetricSpace, PairSet, PointIndex};
use lipfree::monotone::{check_augmented, Gamma};
use lipfree::random::{random_integer_metric, random_optimal_measure};
use lipfree::{Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn gamma(n: i64, d: i64) -> Gamma<Rational> {
    Gamma::new(q(n, d)).unwrap()
}

fn unit(space: &FiniteMetricSpace<Rational>, a: &str, b: &str) -> PairMeasure<Rational> {
    PairMeasure::unit(space.pair(a, b).unwrap())
}

fn level(space: &FiniteMetricSpace<Rational>, p: PointIndex) -> Option<usize> {
    level_of(space.label(p).as_str())
}

#[test]
fn two_lip_ltp_on_example_with_one_pair() {
    let s = build_example52::<Rational>(2).unwrap();
    let set: PairSet = [s.pair("x1", "y1").unwrap()].into_iter().collect();
    let TwoLipLtpOutcome::Found { witness, rejected } = two_lip_ltp_witness(&s, &set, &q(1, 2)).unwrap() else {
        panic!("no witness");
    };
    witness.verify(&s, &set).unwrap();
    assert!(rejected.iter().all(|r| r.forward.is_some() || r.backward.is_some()));
    let gamma = gamma(1, 2);
    for (u, v) in [(witness.u, witness.v), (witness.v, witness.u)] {
        assert!(check_augmented(&s, &set, &gamma, u, v).unwrap().verdict.is_monotone());
    }
}

#[test]
fn ld2p_unit_atom_uses_its_support() {
    let s = build_example52::<Rational>(1).unwrap();
    let mu = unit(&s, "x1", "y1");
    for g in [gamma(1, 2), gamma(1, 10)] {
        let cert = ld2p_certificate(&s, &mu, &g).unwrap();
        let cert = cert.certificate().expect("certificate");
        assert_eq!(cert.set, mu.support());
        assert_eq!(cert.route, Ld2pRoute::IntegerRounding);
        let (u, v) = (s.label(cert.u).as_str(), s.label(cert.v).as_str());
        assert!(u.starts_with('u') && v.starts_with('v') && u[1..] == v[1..], "({u}, {v})");
        assert_eq!(level(&s, cert.u), Some(1));
        cert.verify(&s, &mu).unwrap();
        for p in &cert.set {
            assert!(slope(&s, &cert.f, p) >= *g.value());
            assert!(slope(&s, &cert.g, p) >= *g.value());
        }
    }
}

#[test]
fn ld2p_rejects_non_optimal_measures() {
    let s = build_example52::<Rational>(1).unwrap();
    let mut mu = PairMeasure::new();
    mu.add(s.pair("x1", "y1").unwrap(), q(1, 2));
    mu.add(s.pair("y1", "x1").unwrap(), q(1, 2));
    assert!(matches!(ld2p_certificate(&s, &mu, &gamma(1, 2)), Err(D2pError::NotOptimal)));
    let heavy = unit(&s, "x1", "y1").scaled(&q(2, 1));
    assert!(matches!(ld2p_certificate(&s, &heavy, &gamma(1, 2)), Err(D2pError::NotNormalized(_))));
    assert!(matches!(ld2p_certificate(&s, &unit(&s, "x1", "y1"), &Gamma::one()), Err(D2pError::GammaNotBelowOne)));
}

#[test]
fn ld2p_certificates_spread_slices_on_random_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut found = 0;
    for _ in 0..40 {
        let n = rng.gen_range(3..=6);
        let space: FiniteMetricSpace<Rational> = random_integer_metric(&mut rng, n, 3);
        let Some(mu) = random_optimal_measure(&mut rng, &space, 2, |_| true) else {
            continue;
        };
        // γ² = 1 - α/2
        for (g, alpha) in [(gamma(1, 2), q(3, 2)), (gamma(3, 4), q(7, 8))] {
            if let Ld2pOutcome::Found(cert) = ld2p_certificate(&space, &mu, &g).unwrap() {
                found += 1;
                cert.verify(&space, &mu).unwrap();
                let d = slice_diameter(&space, &mu, &alpha, false).unwrap();
                assert!(d.diameter >= q(2, 1) * g.value().clone());
            }
        }
    }
    assert!(found > 10, "{found}");
}

#[test]
fn sd2p_with_one_measure_matches_ld2p() {
    let s = build_example52::<Rational>(1).unwrap();
    for (a, b) in [("x1", "y1"), ("y2", "x3"), ("x2", "y3")] {
        let mu = unit(&s, a, b);
        for g in [gamma(1, 2), gamma(9, 10)] {
            let single = sd2p_certificate(&s, std::slice::from_ref(&mu), &g).unwrap();
            let ld2p = ld2p_certificate(&s, &mu, &g).unwrap();
            assert_eq!(single.certificate().is_some(), ld2p.certificate().is_some());
        }
    }
}

#[test]
fn sd2p_two_disjoint_atoms_share_a_pair() {
    let s = build_example52::<Rational>(2).unwrap();
    let measures = [unit(&s, "x1", "y1"), unit(&s, "x2", "y2")];
    let g = gamma(1, 2);
    let Sd2pOutcome::Found(cert) = sd2p_certificate(&s, &measures, &g).unwrap() else {
        panic!("no common pair");
    };
    cert.verify(&s, &measures).unwrap();
    // the declaration-order scan stops at a core pair; a pair inside an
    // untouched level qualifies as well
    let level_pair = s.pairs().find(|p| {
        level(&s, p.from()).is_some()
            && level(&s, p.from()) == level(&s, p.to())
            && measures.iter().all(|mu| {
                let set = mu.support();
                check_augmented(&s, &set, &g, p.from(), p.to()).unwrap().verdict.is_monotone()
                    && check_augmented(&s, &set, &g, p.to(), p.from()).unwrap().verdict.is_monotone()
            })
    });
    assert!(level_pair.is_some());
    // γ² = 1/4 = 1 - α/2 at α = 3/2
    for weights in [[q(1, 2), q(1, 2)], [q(1, 3), q(2, 3)], [q(1, 1), q(0, 1)]] {
        let s_uv = cert.verify_convex_combination(&s, &measures, &weights, &q(3, 2)).unwrap();
        assert!(s_uv >= q(1, 1));
    }
    assert!(cert.verify_convex_combination(&s, &measures, &[q(1, 2), q(1, 4)], &q(3, 2)).is_err());
    assert!(cert.verify_convex_combination(&s, &measures, &[q(1, 2), q(1, 2)], &q(1, 2)).is_err());
}

/// Largest `‖g - h‖` over unit-ball functions within `delta` of `f` on `near`.
fn neighbourhood_diameter(
    space: &FiniteMetricSpace<Rational>,
    f: &LipschitzFunction<Rational>,
    near: &[PointIndex],
    delta: &Rational,
) -> Rational {
    let ball = UnitBall::new(space);
    let mut lp = ball.program().clone();
    for &x in near {
        if let Some(i) = ball.variable(x) {
            lp.add_sparse(&[(i, q(1, 1))], f.value(x).clone() + delta.clone()).unwrap();
            lp.add_sparse(&[(i, q(-1, 1))], delta.clone() - f.value(x).clone()).unwrap();
        }
    }
    let best = |p: &lipfree::metric::OrderedPair| -> Rational {
        let (value, _) = solve_lp(&lp.with_objective(ball.slope_row(space, p)).unwrap()).optimal().unwrap();
        value
    };
    space
        .pairs()
        .filter(|p| p.from() < p.to())
        .map(|p| best(&p) + best(&p.reflect()))
        .max()
        .unwrap()
}

#[test]
fn absent_lip_ltp_shrinks_weak_star_neighbourhoods() {
    for levels in 1..=2 {
        let s = build_example52::<Rational>(levels).unwrap();
        let near: Vec<PointIndex> = core_points(&s).unwrap().into_iter().collect();
        let f = fixture_function(&s).unwrap();
        let set = near.iter().copied().collect();
        assert!(!lip_ltp_witness(&s, &set, &epsilon(), &f).unwrap().is_found());
        let delta = q(1, 100);
        let d = neighbourhood_diameter(&s, &f, &near, &delta);
        assert!(d < q(2, 1) - delta, "J={levels}: diameter {d}");
    }
}

#[test]
fn outcomes_replay_including_exhaustion() {
    let s = lipfree::metric::line::<Rational>(2).unwrap();
    let mu = unit(&s, "1", "0");
    let g = gamma(1, 2);
    let outcome = ld2p_certificate(&s, &mu, &g).unwrap();
    let Ld2pOutcome::Absent { tried } = &outcome else { panic!("found on two points") };
    assert_eq!(tried.len(), 1);
    outcome.verify(&s, &mu, &g).unwrap();
    // a forged log with a rejection removed no longer replays
    let mut forged = tried.clone();
    forged[0].failures.pop();
    assert!(Ld2pOutcome::Absent { tried: forged }.verify(&s, &mu, &g).is_err());

    let sd = sd2p_certificate(&s, std::slice::from_ref(&mu), &g).unwrap();
    assert!(sd.certificate().is_none());
    sd.verify(&s, std::slice::from_ref(&mu), &g).unwrap();

    let set = mu.support();
    let two = two_lip_ltp_witness(&s, &set, &q(1, 2)).unwrap();
    assert!(!two.is_found());
    two.verify(&s, &set, &q(1, 2)).unwrap();
    assert!(two.verify(&s, &set, &q(1, 3)).is_err());

    let big = build_example52::<Rational>(1).unwrap();
    let mu = unit(&big, "x1", "y1");
    let found = ld2p_certificate(&big, &mu, &g).unwrap();
    found.verify(&big, &mu, &g).unwrap();
    assert!(found.verify(&big, &mu, &gamma(1, 3)).is_err());
    let set = mu.support();
    let two = two_lip_ltp_witness(&big, &set, &q(1, 2)).unwrap();
    two.verify(&big, &set, &q(1, 2)).unwrap();
}

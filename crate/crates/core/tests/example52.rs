use std::time::Instant;

use lipfree::d2p::{ld2p_certificate, lip_ltp_witness, verify_lip_ltp, LipLtpWitness, Ld2pOutcome};
use lipfree::example52::{core_pairs, core_points, epsilon, fixture_function};
use lipfree::functionals::slice_diameter;
use lipfree::{build_example52, Gamma, PairMeasure, Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

#[test]
fn lip_ltp_absent_with_sharp_rows() {
    for levels in 1..=3 {
        let t = Instant::now();
        let s = build_example52::<Rational>(levels).unwrap();
        let n = core_points(&s).unwrap();
        let f = fixture_function(&s).unwrap();
        let w = lip_ltp_witness(&s, &n, &epsilon(), &f).unwrap();
        let LipLtpWitness::Absent { candidates } = &w else { panic!("witness found at J={levels}") };
        assert_eq!(candidates.len(), s.len() * (s.len() - 1));
        verify_lip_ltp(&s, &n, &epsilon(), &f, &w).unwrap();
        let has = |lhs: Rational, rhs: Rational, bracket: Rational| {
            candidates.iter().any(|c| c.violations.iter().any(|v| v.lhs == lhs && v.rhs == rhs && v.bracket == bracket))
        };
        assert!(has(q(65, 28), q(2, 1), q(5, 2)));
        assert!(has(q(91, 28), q(3, 1), q(7, 2)));
        eprintln!("J={levels}: {:?}", t.elapsed());
    }
}

#[test]
fn lip_ltp_found_at_half() {
    let s = build_example52::<Rational>(1).unwrap();
    let n = core_points(&s).unwrap();
    let f = fixture_function(&s).unwrap();
    assert!(lip_ltp_witness(&s, &n, &q(1, 2), &f).unwrap().is_found());
}

#[test]
fn ld2p_unit_atoms_with_slice_diameter() {
    let t = Instant::now();
    let s = build_example52::<Rational>(3).unwrap();
    for (g, alpha) in [(q(1, 2), q(3, 2)), (q(9, 10), q(19, 50))] {
        let gamma = Gamma::new(g.clone()).unwrap();
        for p in core_pairs(&s).unwrap() {
            let mu = PairMeasure::unit(p);
            let Ld2pOutcome::Found(c) = ld2p_certificate(&s, &mu, &gamma).unwrap() else { panic!() };
            c.verify(&s, &mu).unwrap();
            let d = slice_diameter(&s, &mu, &alpha, false).unwrap();
            assert!(d.diameter >= q(2, 1) * g.clone(), "{:?}", d.diameter);
        }
        eprintln!("gamma {g}: {:?}", t.elapsed());
    }
}

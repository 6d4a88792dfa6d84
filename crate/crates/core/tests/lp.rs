use lipfree::lpcore::{solve_lp, vertex_enumeration_oracle, LinearProgram, LpOutcome};
use lipfree::random::random_lp;
use lipfree::{Rational, Scalar};
use rand::SeedableRng;
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;

fn int(n: i64) -> Rational {
    Rational::from_i64(n)
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let big = int(1_000_000_000);
    let programs: Vec<LinearProgram<Rational>> = (0..500).map(|_| random_lp(&mut rng, 5, 8)).collect();
    let kinds: Vec<usize> = programs
        .par_iter()
        .enumerate()
        .map(|(case, lp)| {
            let got = solve_lp(lp);
            let want = vertex_enumeration_oracle(lp, &big);
            match (&got, &want) {
                (LpOutcome::Optimal { value, point }, LpOutcome::Optimal { value: v, .. }) => {
                    assert_eq!(value, v, "case {case}");
                    assert!(lp.is_feasible(point), "case {case}");
                    assert_eq!(lp.objective_value(point), *value, "case {case}");
                    0
                }
                (LpOutcome::Infeasible, LpOutcome::Infeasible) => 1,
                (LpOutcome::Unbounded, LpOutcome::Unbounded) => 2,
                _ => panic!("case {case}: simplex {got:?}, oracle {want:?}"),
            }
        })
        .collect();
    let mut counts = [0usize; 3];
    for k in kinds {
        counts[k] += 1;
    }
    // the generator should exercise every outcome
    assert!(counts.iter().all(|&c| c > 0), "{counts:?}");
}

#[test]
fn degenerate_program_terminates() {
    // many constraints tight at the optimum vertex (1, 1)
    let mut lp = LinearProgram::maximize(vec![int(1), int(1)]);
    for (a, b, c) in [(1, 0, 1), (0, 1, 1), (1, 1, 2), (2, 1, 3), (1, 2, 3), (3, 3, 6)] {
        lp.add_constraint(vec![int(a), int(b)], int(c)).unwrap();
    }
    let (value, point) = solve_lp(&lp).optimal().unwrap();
    assert_eq!(value, int(2));
    assert_eq!(point, vec![int(1), int(1)]);
}

use std::time::{Duration, Instant};

use star_urd::arrays::construct_urd;
use star_urd::oracle::{brute_force_urd, OracleOutcome, DEFAULT_BUDGET};
use star_urd::verify::verify_urd;

fn timed_witness(n: u32, v: u32, limit: Duration) {
    let start = Instant::now();
    let outcome = brute_force_urd(n, v, DEFAULT_BUDGET).unwrap();
    let elapsed = start.elapsed();
    let OracleOutcome::Witness {
        decomposition,
        nodes,
    } = outcome
    else {
        panic!("({n}, {v}): no witness: {outcome:?}");
    };
    eprintln!("({n}, {v}): {nodes} nodes in {elapsed:?}");
    assert!(verify_urd(&decomposition).ok);
    assert!(elapsed < limit, "({n}, {v}) took {elapsed:?}");
}

#[test]
fn base_instances_agree_with_constructor() {
    for n in [3, 5, 7, 9, 11] {
        let v = 2 * (n + 1);
        timed_witness(n, v, Duration::from_secs(1));
        assert!(verify_urd(&construct_urd(n, v).unwrap()).ok);
    }
}

#[test]
fn second_instance_for_three_stars() {
    timed_witness(3, 20, Duration::from_secs(60));
    assert!(verify_urd(&construct_urd(3, 20).unwrap()).ok);
}

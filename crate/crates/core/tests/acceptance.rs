//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use star_urd::almost::{build_almost_factor, check_almost_factor, Construction};
use star_urd::arrays::{construct_with_stages, Row};
use star_urd::io::{from_json, to_json, DocumentError};
use star_urd::oracle::{brute_force_urd, OracleOutcome, DEFAULT_BUDGET};
use star_urd::verify::{verify_balanced_array, ViolationKind, Witness};
use star_urd::{construct_urd, derive_params, enumerate_admissible, verify_urd, Congruence, Error};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("1 main sweep n<=11, v<=700", main_sweep),
        ("2 oracle agreement", oracle_agreement),
        ("3 necessity v<=200", necessity),
        ("4 balanced arrays for v=162", v162_arrays),
        ("5 almost factor properties", almost_properties),
        ("6 serialization and tamper fuzz", tamper_fuzz),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}

fn main_sweep() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for n in [3, 5, 7, 9, 11] {
        for p in enumerate_admissible(n, 700).map_err(|e| e.to_string())? {
            let d = construct_urd(n, p.v).map_err(|e| format!("({n}, {}): {e}", p.v))?;
            let report = verify_urd(&d);
            if let Some(v) = report.violations.first() {
                return Err(format!("({n}, {}): {v}", p.v));
            }
            let expected = u64::from(p.v) * u64::from(p.v - 1) / 2;
            if report.total_edges() != expected || d.star_classes.len() as u32 != p.s {
                return Err(format!("({n}, {}): census mismatch", p.v));
            }
            count += 1;
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(10) {
        return Err(format!("{count} instances verified but took {took:?}"));
    }
    Ok(format!("{count} instances verified"))
}

fn oracle_agreement() -> Outcome {
    let mut notes = Vec::new();
    for (n, v, limit) in [
        (3, 8, 1),
        (5, 12, 1),
        (7, 16, 1),
        (9, 20, 1),
        (11, 24, 1),
        (3, 20, 60),
    ] {
        let start = Instant::now();
        let outcome = brute_force_urd(n, v, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        let OracleOutcome::Witness { decomposition, .. } = outcome else {
            return Err(format!("({n}, {v}): oracle gave {outcome:?}"));
        };
        if !verify_urd(&decomposition).ok {
            return Err(format!("({n}, {v}): oracle witness rejected"));
        }
        if took > Duration::from_secs(limit) {
            return Err(format!("({n}, {v}): oracle took {took:?}"));
        }
        let built = construct_urd(n, v).map_err(|e| format!("({n}, {v}): {e}"))?;
        if !verify_urd(&built).ok {
            return Err(format!("({n}, {v}): constructed decomposition rejected"));
        }
        notes.push(format!("({n},{v}) {:.0}ms", took.as_secs_f64() * 1e3));
    }
    Ok(notes.join(", "))
}

fn expected_failure(n: u32, v: u32) -> Option<Congruence> {
    let block = v.is_multiple_of(n + 1);
    let two = (i64::from(v) - 2).rem_euclid(i64::from(n)) == 0;
    match (block, two) {
        (true, true) => None,
        (false, true) => Some(Congruence::DivisibleByStarOrder),
        (true, false) => Some(Congruence::TwoModN),
        (false, false) => Some(Congruence::Both),
    }
}

fn necessity() -> Outcome {
    let (mut rejected, mut accepted) = (0, 0);
    for n in [3, 5] {
        for v in 1..=200 {
            match (expected_failure(n, v), construct_urd(n, v)) {
                (Some(want), Err(Error::Inadmissible { failing, .. })) if failing == want => {
                    rejected += 1
                }
                (None, Ok(_)) => accepted += 1,
                (want, got) => {
                    return Err(format!(
                        "({n}, {v}): expected {want:?}, got {:?}",
                        got.map(|_| ())
                    ))
                }
            }
        }
    }
    Ok(format!(
        "{rejected} rejected with the right congruence, {accepted} admissible"
    ))
}

fn rows(table: &[&[u32]]) -> Vec<Row> {
    table
        .iter()
        .map(|r| {
            let mut row: Row = r.iter().map(|&x| Some(x)).collect();
            row.resize(5, None);
            row
        })
        .collect()
}

/// Expected T^1 rows for n = 5, v = 162.
fn expected_t1() -> Vec<Vec<Row>> {
    vec![
        rows(&[&[37, 32, 21, 16, 11], &[49, 50, 51, 52, 53], &[67, 80]]),
        rows(&[&[37, 32, 21, 16, 5], &[1, 56, 3, 4, 47], &[67, 80]]),
        rows(&[&[37, 32, 21, 10, 5], &[67, 80]]),
        rows(&[&[37, 32, 15, 10, 5], &[67, 80]]),
        rows(&[&[37, 26, 15, 10, 5], &[55, 56, 51, 52, 53], &[67, 74]]),
        rows(&[&[31, 26, 15, 10, 5], &[61, 74]]),
    ]
}

fn sorted(mut r: Vec<Row>) -> Vec<Row> {
    r.sort();
    r
}

fn fmt_rows(r: &[Row]) -> String {
    let cell = |c: &Option<u32>| c.map_or("*".to_string(), |x| x.to_string());
    r.iter()
        .map(|row| format!("({})", row.iter().map(cell).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn v162_arrays() -> Outcome {
    let p = derive_params(5, 162).map_err(|e| e.to_string())?;
    let c = construct_with_stages(&p).map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    for (a, want) in c.arrays.iter().zip(expected_t1()) {
        let check = verify_balanced_array(a, &p);
        if !check.ok {
            problems.push(format!("T{} invalid: {:?}", a.residue, check.witness));
        }
        if sorted(a.t1().to_vec()) != sorted(want.clone()) {
            problems.push(format!(
                "T{}^1 is {} but expected {}",
                a.residue,
                fmt_rows(a.t1()),
                fmt_rows(&want)
            ));
        }
    }
    let first_t2 = c.arrays[0].t2().first().cloned();
    if first_t2 != Some(rows(&[&[1, 2, 3, 4, 5]]).remove(0)) {
        problems.push(format!("T0^2 starts with {first_t2:?}"));
    }
    if problems.is_empty() {
        Ok("all six T^1 tables match and all arrays are balanced".into())
    } else {
        Err(problems.join("; "))
    }
}

fn almost_properties() -> Outcome {
    let mut checked = 0;
    for n in [3u32, 5, 7, 9, 11] {
        for k_prime in 1..=12u32 {
            let v = n * (n + 1) * k_prime + 2 * (n + 1);
            let p = derive_params(n, v).map_err(|e| e.to_string())?;
            let f = build_almost_factor(&p).map_err(|e| format!("(n={n}, k'={k_prime}): {e}"))?;
            let r = check_almost_factor(&f, &p);
            if let Some(v) = r.violations.first() {
                return Err(format!("(n={n}, k'={k_prime}): {v}"));
            }
            let q = (n - 1) / 2;
            let k = k_prime / 2;
            // Backward prime edges of the mixed star, by regime.
            let backward = match (k_prime % 2, k) {
                (0, _) => None,
                (_, 0) => Some(q),
                (_, k) if k <= q => Some(q + 1 - k),
                _ => Some(0),
            };
            let got = (
                r.mixed_stars,
                r.mixed_pure_edges,
                r.mixed_forward_primes,
                r.mixed_backward_primes,
            );
            let want = match backward {
                None => (0, 0, 0, 0),
                Some(b) => (1, q + 1, q - b, b),
            };
            if got != want {
                return Err(format!(
                    "(n={n}, k'={k_prime}) {:?}: mixed star counts {got:?}, want {want:?}",
                    f.construction
                ));
            }
            if k_prime % 2 == 1 && f.construction == Construction::EvenGeneral {
                return Err(format!("(n={n}, k'={k_prime}): wrong construction"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} almost factors clean"))
}

fn tamper_fuzz() -> Outcome {
    let instances: Vec<_> = [
        (3, 8),
        (3, 20),
        (3, 32),
        (5, 12),
        (5, 42),
        (7, 16),
        (7, 72),
        (9, 20),
    ]
    .iter()
    .map(|&(n, v)| construct_urd(n, v).map_err(|e| e.to_string()))
    .collect::<Result<_, _>>()?;
    for d in &instances {
        let text = to_json(d);
        let back = from_json(&text, false).map_err(|e| format!("({}, {}): {e}", d.n, d.v))?;
        if &back != d || to_json(&back) != text {
            return Err(format!(
                "({}, {}): round trip changed the document",
                d.n, d.v
            ));
        }
    }

    let mut rng = StdRng::seed_from_u64(0x005e_ed1f);
    let mut tally = [0; 3];
    for round in 0..100 {
        let mut d = instances[rng.gen_range(0..instances.len())].clone();
        let op = rng.gen_range(0..3);
        tally[op] += 1;
        let ci = rng.gen_range(0..d.star_classes.len());
        let stars = d.star_classes[ci].stars.len();
        let expected: Vec<(ViolationKind, Option<Witness>)> = match op {
            0 => {
                let si = rng.gen_range(0..stars);
                let star = &mut d.star_classes[ci].stars[si];
                let li = rng.gen_range(0..star.leaves.len());
                let leaf = star.leaves.remove(li);
                let (u, x) = (star.center.min(leaf), star.center.max(leaf));
                vec![(
                    ViolationKind::UncoveredEdge,
                    Some(Witness::Edge { u, x, times: 0 }),
                )]
            }
            1 => {
                let a = rng.gen_range(0..stars);
                let b = (a + rng.gen_range(1..stars)) % stars;
                let la = rng.gen_range(0..d.n as usize);
                let lb = rng.gen_range(0..d.n as usize);
                let class = &mut d.star_classes[ci].stars;
                let (ca, leaf_a) = (class[a].center, class[a].leaves[la]);
                let leaf_b = class[b].leaves[lb];
                class[a].leaves[la] = leaf_b;
                class[b].leaves[lb] = leaf_a;
                vec![
                    (
                        ViolationKind::UncoveredEdge,
                        Some(Witness::Edge {
                            u: ca.min(leaf_a),
                            x: ca.max(leaf_a),
                            times: 0,
                        }),
                    ),
                    (
                        ViolationKind::DoublyCoveredEdge,
                        Some(Witness::Edge {
                            u: ca.min(leaf_b),
                            x: ca.max(leaf_b),
                            times: 2,
                        }),
                    ),
                ]
            }
            _ => {
                let copy = d.star_classes[ci].clone();
                d.star_classes.push(copy);
                vec![
                    (ViolationKind::DoublyCoveredEdge, None),
                    (ViolationKind::WrongClassCount, None),
                ]
            }
        };
        let report = verify_urd(&d);
        if report.ok {
            return Err(format!("round {round}: tampered document accepted"));
        }
        for (kind, witness) in expected {
            let found = report
                .violations
                .iter()
                .any(|v| v.kind == kind && witness.as_ref().is_none_or(|w| &v.witness == w));
            if !found {
                return Err(format!(
                    "round {round}: no {kind} violation with witness {witness:?}"
                ));
            }
        }
        if !matches!(
            from_json(&to_json(&d), false),
            Err(DocumentError::Invalid(_))
        ) {
            return Err(format!("round {round}: tampered document parsed as valid"));
        }
    }
    Ok(format!(
        "{} round trips; 100 tampered documents rejected ({} deletes, {} swaps, {} duplications)",
        instances.len(),
        tally[0],
        tally[1],
        tally[2]
    ))
}

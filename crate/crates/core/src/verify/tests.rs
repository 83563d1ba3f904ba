use super::*;
use crate::quiver::small_fragments;

#[test]
#[ignore]
fn measure_routes() {
    for m in [2, 3] {
        for k in [1, 2] {
            let qs = small_fragments(m, 6).unwrap();
            let t = std::time::Instant::now();
            let r = route_sweep(&qs, k).unwrap();
            eprintln!(
                "m={m} k={k} fragments={} {r} first={:?} slopes={:?} {:?}",
                qs.len(),
                r.first,
                r.failing_slopes
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>(),
                t.elapsed()
            );
        }
    }
    for m in [2, 3] {
        for dbar in [(1, 1), (1, 2), (2, 3)] {
            let t = std::time::Instant::now();
            let s = soft_identity(m, dbar).unwrap();
            eprintln!(
                "soft m={m} {dbar:?} counts={} chi={} {:?}",
                s.counts,
                s.chi,
                t.elapsed()
            );
        }
    }
}

#[test]
#[ignore]
fn measure_oracle_sweep() {
    for m in [2] {
        for n in 6..=8 {
            let qs: Vec<_> = small_fragments(m, n)
                .unwrap()
                .into_iter()
                .filter(|q| q.n() == n)
                .collect();
            for k in [1, 2] {
                let t = std::time::Instant::now();
                let mut worst = std::time::Duration::ZERO;
                let mut over = 0;
                for q in &qs {
                    let s = std::time::Instant::now();
                    match oracle_check_within(q, k, 30_000_000) {
                        Ok(r) => assert_eq!(r, None),
                        Err(_) => over += 1,
                    }
                    worst = worst.max(s.elapsed());
                }
                eprintln!(
                    "m={m} n={n} k={k} count={} over_budget={over} total={:?} worst={worst:?}",
                    qs.len(),
                    t.elapsed()
                );
            }
        }
    }
}

#[test]
fn set_independence_on_small_quivers() {
    use crate::quiver::tests::{q1, q2};
    for (q, k) in [(q1(), 2), (q2(), 2), (q1(), 3)] {
        assert_eq!(
            set_independence(&q, k).unwrap(),
            Vec::<String>::new(),
            "k={k}"
        );
    }
}

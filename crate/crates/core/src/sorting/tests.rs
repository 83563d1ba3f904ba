use super::*;
use crate::algebra::{nil_product, Levels};
use crate::quiver::tests::{q1, q2, q3};

fn names(d: &SortingDiagram, seq: &[OpId]) -> Vec<String> {
    seq.iter().map(|&i| d.node(i).op.d.to_string()).collect()
}

fn find(d: &SortingDiagram, name: &str) -> OpId {
    d.seq()
        .iter()
        .copied()
        .find(|&i| d.node(i).op.d.to_string() == name)
        .unwrap_or_else(|| panic!("{name} not in diagram"))
}

fn with_history(q: &Quiver) -> SortingDiagram {
    SortingDiagram::new(
        q,
        None,
        SortOptions {
            keep_history: true,
            ..Default::default()
        },
    )
    .unwrap()
}

#[test]
fn q1_golden_sequences() {
    let mut d = with_history(&q1());
    d.stabilize().unwrap();
    let h: Vec<Vec<String>> = d.history().iter().map(|s| names(&d, s)).collect();
    assert_eq!(h[0], ["i1", "i2", "i3"]);
    assert_eq!(h[1], ["i1", "i3", "i2+i3", "i2"]);
    assert_eq!(h[2], ["i3", "i1+i3", "i2+i3", "i1+i2+i3", "i1", "i2"]);
    assert_eq!(d.stabilization_index(), 2);
    assert!(d.is_descending());
}

#[test]
fn q2_golden_sequences() {
    let mut d = with_history(&q2());
    d.stabilize().unwrap();
    let h: Vec<Vec<String>> = d.history().iter().map(|s| names(&d, s)).collect();
    assert_eq!(h[1], ["i1", "i2", "i4", "i5", "i3+i5", "i3"]);
    assert_eq!(
        h[2],
        ["i1", "i4", "i2+i4", "i5", "i2+i5", "i3+i5", "i2+i3+i5", "i2", "i3"]
    );
    assert_eq!(
        h[3],
        [
            "i4", "i1+i4", "i2+i4", "i1+i2+i4", "i5", "i2+i5", "i3+i5", "i2+i3+i5", "i1", "i2",
            "i3"
        ]
    );
    assert_eq!(
        h[4],
        [
            "i4",
            "i1+i4",
            "i2+i4",
            "i5",
            "i1+i2+i4+i5",
            "i2+i5",
            "i3+i5",
            "i1+i2+i3+i4+i5",
            "i1+i2+i4",
            "i2+i3+i5",
            "i1",
            "i2",
            "i3"
        ]
    );
    assert_eq!(d.stabilization_index(), 6);
}

#[test]
fn q3_naive_violation() {
    let q = q3();
    let mut d = initial_diagram(&q, 1, Mode::Naive).unwrap();
    let err = d.stabilize().unwrap_err();
    let Error::Assumption(v) = err else {
        panic!("expected violation, got {err}");
    };
    assert_eq!(v.step, 9);
    assert_eq!(v.bracket, -1);
    assert_eq!(v.d1.to_string(), "i1+i2+i3+i5+i6");
    assert_eq!(v.d2.to_string(), "i1+2i2+i3+i5+i6+i7");
    // the diagram is left at S^9, which contains the displayed segment
    assert_eq!(d.step_count(), 9);
    let names = names(&d, d.seq());
    let at = names.iter().position(|s| s == "i1+i2+i3+i5+i6").unwrap();
    assert_eq!(
        &names[at..at + 5],
        [
            "i1+i2+i3+i5+i6",
            "i7",
            "i1+i2+i5+i7",
            "i2+i3+i6+i7",
            "i1+2i2+i3+i5+i6+i7"
        ]
    );
}

#[test]
fn q3_eta_breaks_unique_child() {
    let q = q3();
    let mut d = initial_diagram(&q, 1, Mode::Naive).unwrap();
    let _ = d.stabilize();
    let eta = find(&d, "i1+2i2+i3+i5+i6+i7");
    let err = build_trees(&d, eta).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("T[i2] is parent to 2"), "{msg}");
}

#[test]
fn nilpotent_sorting_is_sound() {
    for (q, k) in [(q1(), 1), (q1(), 2), (q2(), 1), (q2(), 2), (q3(), 1)] {
        let levels = Levels::uniform(q.n(), k).unwrap();
        let mut d = SortingDiagram::new(&q, Some(levels.clone()), SortOptions::default()).unwrap();
        let before = nil_product(&q, &d.ops(), &levels).unwrap();
        d.stabilize().unwrap();
        assert!(d.is_descending());
        let after = nil_product(&q, &d.ops(), &levels).unwrap();
        assert_eq!(before, after);
        assert!(d.max_generation() < d.step_bound().unwrap());
    }
}

#[test]
fn exponent_cap_keeps_low_terms() {
    let q = q2();
    let levels = Levels::uniform(q.n(), 2).unwrap();
    let cap = DimVec::from_entries(vec![1, 1, 1, 1, 1]);
    let mut full = SortingDiagram::new(&q, Some(levels.clone()), SortOptions::default()).unwrap();
    full.stabilize().unwrap();
    let mut capped = SortingDiagram::new(
        &q,
        Some(levels),
        SortOptions {
            exponent_cap: Some(cap.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    capped.stabilize().unwrap();
    let low = |d: &SortingDiagram| -> Vec<String> {
        d.seq()
            .iter()
            .filter(|&&i| d.node(i).op.exponent().le(&cap))
            .map(|&i| d.op_line(i))
            .collect()
    };
    assert_eq!(low(&full), low(&capped));
}

#[test]
fn initial_nilpotent_layout() {
    let q = Quiver::from_arrows(1, 1, 1, &[(1, 0)]).unwrap();
    let d = initial_diagram(&q, 2, Mode::Nilpotent).unwrap();
    let lines: Vec<String> = d.seq().iter().map(|&i| d.op_line(i)).collect();
    assert_eq!(
        lines,
        [
            "0\t1\t1\ti1\t{(1,1)}",
            "0\t1\t1\ti1\t{(1,2)}",
            "0\t-1\t2\ti1\t{(1,1),(1,2)}",
            "1\t1\t1\ti2\t{(2,1)}",
            "1\t1\t1\ti2\t{(2,2)}",
            "1\t-1\t2\ti2\t{(2,1),(2,2)}",
        ]
    );
    assert!(initial_diagram(&q, 0, Mode::Nilpotent).is_err());
}

#[test]
fn q1_tree() {
    let mut d = initial_diagram(&q1(), 1, Mode::Naive).unwrap();
    d.stabilize().unwrap();
    let root = find(&d, "i1+i2+i3");
    let (b, u) = build_trees(&d, root).unwrap();
    assert_eq!(b.vertices.len(), 5);
    assert_eq!(b.edges.len(), 4);
    assert_eq!(names(&d, &b.leaves), ["i1", "i2", "i3"]);
    let edge = |t: &SortingTree, from: &str| {
        let e = t
            .edges
            .iter()
            .find(|e| d.node(e.op).op.d.to_string() == from)
            .unwrap();
        e.head.map(|h| d.node(h).op.d.to_string())
    };
    assert_eq!(edge(&b, "i2").as_deref(), Some("i2+i3"));
    assert_eq!(edge(&b, "i3").as_deref(), Some("i2+i3"));
    assert_eq!(edge(&b, "i2+i3").as_deref(), Some("i1+i2+i3"));
    assert_eq!(edge(&b, "i1").as_deref(), Some("i1+i2+i3"));
    assert_eq!(u.vertices.len(), 2);
    assert_eq!(u.edges.len(), 5);
    assert!(u.is_trivalent());
    assert!(u.edges.iter().all(|e| e.weight == 1));
}

#[test]
fn q2_tree() {
    let mut d = initial_diagram(&q2(), 1, Mode::Naive).unwrap();
    d.stabilize().unwrap();
    let root = find(&d, "i1+i2+i3+i4+i5");
    let (b, u) = build_trees(&d, root).unwrap();
    let mut shape: Vec<(String, String)> = b
        .edges
        .iter()
        .map(|e| {
            (
                d.node(e.op).op.d.to_string(),
                d.node(e.head.unwrap()).op.d.to_string(),
            )
        })
        .collect();
    shape.sort();
    let mut want: Vec<(String, String)> = [
        ("i1", "i1+i2+i4"),
        ("i2", "i2+i4"),
        ("i4", "i2+i4"),
        ("i2+i4", "i1+i2+i4"),
        ("i3", "i3+i5"),
        ("i5", "i3+i5"),
        ("i1+i2+i4", "i1+i2+i3+i4+i5"),
        ("i3+i5", "i1+i2+i3+i4+i5"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    want.sort();
    assert_eq!(shape, want);
    assert!(u.is_trivalent());
}

#[test]
fn initial_operator_trees_are_degenerate() {
    let mut d = initial_diagram(&q1(), 1, Mode::Naive).unwrap();
    d.stabilize().unwrap();
    let (b, u) = build_trees(&d, find(&d, "i1")).unwrap();
    assert_eq!(b.vertices.len(), 1);
    assert!(b.edges.is_empty());
    assert!(u.vertices.is_empty());
    assert_eq!(u.edges.len(), 1);
    assert_eq!((u.edges[0].tail, u.edges[0].head), (None, None));
}

#[test]
fn dump_matches_golden_files() {
    for (name, q, k, mode) in [
        ("q1_naive", q1(), 1, Mode::Naive),
        ("q2_naive", q2(), 1, Mode::Naive),
        ("q1_nil_k1", q1(), 1, Mode::Nilpotent),
    ] {
        let mut d = initial_diagram(&q, k, mode).unwrap();
        d.stabilize().unwrap();
        let path = format!("{}/tests/golden/{name}.txt", env!("CARGO_MANIFEST_DIR"));
        let golden = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {path}"));
        assert_eq!(d.dump(), golden, "{name}");
    }
}

#[test]
#[ignore]
fn write_golden_files() {
    for (name, q, k, mode) in [
        ("q1_naive", q1(), 1, Mode::Naive),
        ("q2_naive", q2(), 1, Mode::Naive),
        ("q1_nil_k1", q1(), 1, Mode::Nilpotent),
    ] {
        let mut d = initial_diagram(&q, k, mode).unwrap();
        d.stabilize().unwrap();
        let dir = format!("{}/tests/golden", env!("CARGO_MANIFEST_DIR"));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(format!("{dir}/{name}.txt"), d.dump()).unwrap();
    }
}

#[test]
#[ignore]
fn diagnostics() {
    let mut d = with_history(&q3());
    let e = d.stabilize();
    println!("{e:?}");
    for (i, s) in d.history().iter().enumerate() {
        println!("S{i}: {}", names(&d, s).join(", "));
    }
    for (q, k) in [(q1(), 2), (q2(), 2), (q3(), 1), (q3(), 2)] {
        let t = std::time::Instant::now();
        let levels = Levels::uniform(q.n(), k).unwrap();
        let opts = SortOptions {
            max_steps: Some(50_000_000),
            ..Default::default()
        };
        let mut d = SortingDiagram::new(&q, Some(levels), opts).unwrap();
        d.stabilize().unwrap();
        println!(
            "n={} k={k} steps={} bound={:?} len={} nodes={} {:?}",
            q.n(),
            d.step_count(),
            d.step_bound(),
            d.seq().len(),
            d.nodes().len(),
            t.elapsed()
        );
    }
}

use proptest::prelude::*;

use kscatter::algebra::oracle::{nil_product, products_agree};
use kscatter::algebra::{Cap, ElemAuto, Levels};
use kscatter::quiver::{build_covering_fragment, RootKind};
use kscatter::sorting::{SortOptions, SortingDiagram};
use kscatter::tropical::{curve_skeleton, stable_diagram};
use kscatter::{DimVec, Quiver};

fn fragment() -> impl Strategy<Value = Quiver> {
    (2u32..=3, 1u32..=3, any::<bool>()).prop_map(|(m, depth, sink)| {
        let root = if sink {
            RootKind::Sink
        } else {
            RootKind::Source
        };
        build_covering_fragment(m, depth, root).unwrap()
    })
}

fn small_fragment() -> impl Strategy<Value = Quiver> {
    fragment().prop_filter("at most 5 vertices", |q| {
        q.n() <= 5 && !q.arrows().is_empty()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dsz_is_antisymmetric(q in fragment(), seed in prop::collection::vec(-4i64..=4, 26)) {
        let n = q.n();
        let a = &seed[..n];
        let b = &seed[13..13 + n];
        prop_assert_eq!(q.bracket(a, b), -q.bracket(b, a));
        prop_assert_eq!(q.bracket(a, a), 0);
    }

    #[test]
    fn pentagon_on_every_arrow(q in small_fragment(), pick in any::<prop::sample::Index>()) {
        let arrow = q.arrows()[pick.index(q.arrows().len())];
        let n = q.n();
        let sink = DimVec::unit(n, arrow.target);
        let source = DimVec::unit(n, arrow.source);
        prop_assert_eq!(q.dsz(&sink, &source).unwrap(), 1);
        let lhs = [ElemAuto::naive(sink.clone()).unwrap(), ElemAuto::naive(source.clone()).unwrap()];
        let rhs = [
            ElemAuto::naive(source.clone()).unwrap(),
            ElemAuto::naive(sink.add(&source)).unwrap(),
            ElemAuto::naive(sink).unwrap(),
        ];
        prop_assert!(products_agree(&q, &lhs, &rhs, &Cap::degree(5)).unwrap());
    }

    #[test]
    fn stable_diagram_matches_the_oracle(q in small_fragment(), k in 1u32..=2) {
        let levels = Levels::uniform(q.n(), k).unwrap();
        let mut d = SortingDiagram::new(&q, Some(levels.clone()), SortOptions::default()).unwrap();
        let before = nil_product(&q, &d.ops(), &levels).unwrap();
        d.stabilize().unwrap();
        prop_assert!(d.is_descending());
        prop_assert_eq!(before, nil_product(&q, &d.ops(), &levels).unwrap());
    }

    #[test]
    fn curves_balance_and_legs_partition(q in small_fragment(), k in 1u32..=2) {
        let d = stable_diagram(&q, k, None).unwrap();
        for id in 0..d.nodes().len() {
            let h = curve_skeleton(&d, id).unwrap();
            prop_assert!(h.is_balanced());
            // d_out is the leg sum
            let mut sum = vec![0i64; q.n()];
            for (v, mask) in h.family() {
                sum[v] += i64::from(mask.count_ones());
            }
            prop_assert_eq!(&sum[..], h.d_out.entries());
            if let Some((a, b)) = d.parents(id) {
                let fa = curve_skeleton(&d, a).unwrap().family();
                let fb = curve_skeleton(&d, b).unwrap().family();
                let mut union = fa.clone();
                union.extend(fb.iter().copied());
                union.sort_unstable();
                prop_assert_eq!(union, h.family());
                for &(v, m) in &fa {
                    prop_assert!(fb.iter().all(|&(w, n)| v != w || m & n == 0));
                }
            }
        }
    }
}

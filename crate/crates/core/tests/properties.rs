use proptest::prelude::*;

use padic_lfun::arith::{q, q_frac, Ring, Zp, Q};
use padic_lfun::cli::{CacheKey, HeckeCache, Overrides};
use padic_lfun::evalpair::{ev_classical, injectivity_test};
use padic_lfun::irregular::{
    bianchi_family, build_irregular, deformation_scenarios, planted_family, rational_family,
    run_lab, Kind,
};
use padic_lfun::linalg::Matrix;
use padic_lfun::modsym::Newform;

fn small_q() -> impl Strategy<Value = Q> {
    (-20i64..20, 1i64..6).prop_map(|(n, d)| q_frac(n, d))
}

fn square(n: usize) -> impl Strategy<Value = Matrix<Q>> {
    prop::collection::vec(small_q(), n * n)
        .prop_map(move |v| Matrix::from_rows(v.chunks(n).map(|r| r.to_vec()).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn zp_is_a_ring_with_unit_inverses(a in -10_000i128..10_000, b in -10_000i128..10_000, c in -10_000i128..10_000) {
        let (x, y, z) = (Zp::new(5, 8, a), Zp::new(5, 8, b), Zp::new(5, 8, c));
        prop_assert_eq!(x.add(&y).mul(&z), x.mul(&z).add(&y.mul(&z)));
        prop_assert_eq!(x.sub(&x), Zp::zero(5, 8));
        if let Some(i) = x.inv() {
            prop_assert_eq!(x.mul(&i), Zp::one(5, 8));
        } else {
            prop_assert!(!x.is_unit());
        }
    }

    #[test]
    fn determinant_is_multiplicative(a in square(3), b in square(3)) {
        prop_assert_eq!(a.mul(&b).det(), a.det() * b.det());
    }

    #[test]
    fn cayley_hamilton(a in square(3)) {
        let c = a.charpoly().c;
        let mut acc = Matrix::zeros(3, 3, &Q::from_integer(0.into()));
        for coeff in c.iter().rev() {
            acc = acc.mul(&a).add(&Matrix::identity(3, coeff).scale(coeff));
        }
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn irregular_lab_holds_for_every_odd_prime(p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), k in prop::sample::select(vec![1u32, 3, 5])) {
        let rep = run_lab(p, k).unwrap();
        prop_assert!(rep.pass, "{:?}", rep.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn truncated_families_are_free(n in 1usize..5, u in small_q().prop_filter("nonzero", |x| *x != q(0))) {
        let r = build_irregular(Kind::Rational, 3, 1).unwrap();
        let b = build_irregular(Kind::Bianchi, 3, 1).unwrap();
        let rep = deformation_scenarios(&r, &b, n, &u).unwrap();
        prop_assert!(rep.pass, "{}", rep.summary());
    }

    #[test]
    fn large_enough_grids_detect_exactly_the_planted_kernel(
        n in 1usize..4,
        u in small_q().prop_filter("nonzero", |x| *x != q(0)),
        pts in prop::collection::btree_set(-30i64..30, 6),
    ) {
        let grid: Vec<Q> = pts.iter().map(|&x| q(x)).collect();
        let fam = rational_family(n, &u).unwrap();
        let need = n + fam.degree();
        let v = injectivity_test(&fam, &grid[..need]).unwrap();
        prop_assert!(v.injective, "{:?}", v);
        let planted = injectivity_test(&planted_family(n, &u).unwrap(), &grid[..need]).unwrap();
        prop_assert!(!planted.injective);
        prop_assert!(planted.kernel_dim >= n);
        if need > 1 {
            prop_assert!(injectivity_test(&fam, &grid[..need - 1]).is_err());
        }
    }

    #[test]
    fn base_change_family_pairs_injectively(n in 1usize..3, pts in prop::collection::btree_set(-20i64..20, 6)) {
        let fam = bianchi_family(n, &q(1)).unwrap();
        let grid: Vec<Q> = pts.iter().map(|&x| q(x)).collect();
        let need = n + fam.degree();
        prop_assert!(injectivity_test(&fam, &grid[..need]).unwrap().injective);
    }

    #[test]
    fn cache_round_trip_is_exact(m in square(4), level in 1u64..500, op in 2u64..50) {
        let dir = std::env::temp_dir().join(format!("padic-prop-{}-{level}-{op}", std::process::id()));
        let cache = HeckeCache::new(&dir);
        let key = CacheKey { level, k: 0, eps: "trivial".into(), sign: "plus".into(), op: format!("T{op}") };
        cache.store(&key, &m).unwrap();
        prop_assert_eq!(cache.load(&key).unwrap(), Some(m));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn later_sources_win(a in proptest::option::of(3u64..50), b in proptest::option::of(3u64..50), pa in proptest::option::of(1u32..20), pb in proptest::option::of(1u32..20)) {
        let x = Overrides { p: a, prec: pa, ..Overrides::default() };
        let y = Overrides { p: b, prec: pb, ..Overrides::default() };
        let z = x.layered(y);
        prop_assert_eq!(z.p, b.or(a));
        prop_assert_eq!(z.prec, pb.or(pa));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn ev_is_linear(a in -50i64..50, b in -50i64..50) {
        let f = Newform::find("11a", 1, 3).unwrap();
        let g = Newform::find("14a", 1, 3).unwrap();
        let mut sum = f.phi.clone();
        sum.symbol = f.phi.symbol.scale(&q(a)).add(&f.phi.symbol.scale(&q(b)));
        prop_assert_eq!(ev_classical(&sum), q(a + b) * ev_classical(&f.phi));
        let mut other = g.phi.clone();
        other.symbol = g.phi.symbol.scale(&q(a));
        prop_assert_eq!(ev_classical(&other), q(a) * ev_classical(&g.phi));
    }
}

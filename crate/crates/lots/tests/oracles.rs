//! Cross-checks that pit the fast arithmetic and derivative rules against
//! slower, structurally independent computations.

use lots::construct::catalogue;
use lots::oracle;
use lots::space::{Point, PredicateSpec, SpaceExpr};
use lots::topology::{cb_derivative, derived_expr, is_isolated};
use lots::verify::{certify, CheckConfig};
use lots::Ordinal;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

/// Every sum and product on the small-ordinal pool embeds correctly: the
/// translates sit inside the claimed total in order, and every small member
/// of the total decomposes back.
#[test]
fn arithmetic_agrees_with_order_embeddings_on_all_small_pairs() {
    let pool = Ordinal::enumerate_up_to(6);
    assert_eq!(pool.len(), 161);
    for a in &pool {
        for b in &pool {
            let sum = a.add(b);
            if let Err(e) = oracle::check_add_embedding(a, b, &sum, 6) {
                panic!("sum {a} + {b} = {sum}: {e}");
            }
            let prod = a.mul(b);
            if let Err(e) = oracle::check_mul_embedding(a, b, &prod, 5, 3) {
                panic!("product {a} * {b} = {prod}: {e}");
            }
        }
    }
}

/// Below the exponent towers the definitional descent is affordable, and it
/// must reproduce the term-surgery arithmetic exactly.
#[test]
fn definitional_descent_matches_term_surgery_below_the_towers() {
    let flat = |k: u64| -> Vec<Ordinal> {
        Ordinal::enumerate_up_to(k)
            .into_iter()
            .filter(|x| x.leading_exponent().is_none_or(|e| e.is_finite()))
            .collect()
    };
    let add_pool = flat(6);
    assert!(add_pool.iter().any(|x| *x == o("w^3")));
    for a in &add_pool {
        for b in &add_pool {
            assert_eq!(oracle::add(a, b), a.add(b), "sum {a} + {b}");
        }
    }
    let mul_pool = flat(5);
    for a in &mul_pool {
        for b in &mul_pool {
            assert_eq!(oracle::mul(a, b), a.mul(b), "product {a} * {b}");
        }
    }
}

fn small_pool() -> Vec<Ordinal> {
    Ordinal::enumerate_up_to(4)
}

fn pick(rng: &mut ChaCha8Rng, pool: &[Ordinal]) -> Ordinal {
    pool[rng.random_range(0..pool.len())].clone()
}

fn random_carrier_expr(rng: &mut ChaCha8Rng, depth: u64, pool: &[Ordinal]) -> SpaceExpr {
    if depth == 0 || rng.random_range(0..3) == 0 {
        let lam = pick(rng, pool);
        match rng.random_range(0..3) {
            0 => SpaceExpr::ClosedSeg(lam),
            1 => SpaceExpr::HalfOpenSeg(lam),
            _ => {
                let mut lo = pick(rng, pool);
                let mut hi = lam;
                if hi < lo {
                    std::mem::swap(&mut lo, &mut hi);
                }
                SpaceExpr::interval(SpaceExpr::ClosedSeg(hi.clone()), lo, hi)
            }
        }
    } else {
        let inner = random_carrier_expr(rng, depth - 1, pool);
        let spec = match rng.random_range(0..3) {
            0 => PredicateSpec::IsolatedInAmbient,
            1 => PredicateSpec::LimitInAmbient,
            _ => PredicateSpec::ExplicitSet(vec![pick(rng, pool), pick(rng, pool)]),
        };
        SpaceExpr::omit(inner, spec)
    }
}

/// The lexicographic product of well-ordered factors has the reversed
/// product type. The check merges the truncated factor listings in
/// lexicographic order and embeds the merge into the claimed total, pair by
/// pair, through position arithmetic.
#[test]
fn lex_product_type_is_the_reversed_ordinal_product() {
    let pool = small_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e9);
    for round in 0..50 {
        let x = random_carrier_expr(&mut rng, 3, &pool);
        let y = random_carrier_expr(&mut rng, 3, &pool);
        let tx = x.order_type().unwrap();
        let ty = y.order_type().unwrap();
        let claimed = SpaceExpr::lex(x.clone(), y.clone()).order_type().unwrap();
        assert_eq!(claimed, ty.mul(&tx), "round {round}: {x} and {y}");
        if claimed.is_zero() {
            continue;
        }
        let mx = x.members().unwrap();
        let my = y.members().unwrap();
        let ords = |s: &SpaceExpr| -> Vec<Ordinal> {
            s.enumerate(4)
                .unwrap()
                .into_iter()
                .map(|p| match p {
                    Point::Ord(v) => v,
                    _ => unreachable!(),
                })
                .collect()
        };
        let xs = ords(&x);
        let ys = ords(&y);
        let mut prev: Option<Ordinal> = None;
        for u in &xs {
            for v in &ys {
                let pos = ty.mul(&mx.type_below(u)).add(&my.type_below(v));
                assert!(
                    pos < claimed,
                    "round {round}: pair ({u}, {v}) lands at {pos}, past {claimed}"
                );
                if let Some(p) = &prev {
                    assert!(*p < pos, "round {round}: pair ({u}, {v}) does not advance");
                }
                prev = Some(pos);
            }
        }
        for z in Ordinal::enumerate_up_to(5) {
            if z < claimed {
                let (q, r) = z.div_rem(&ty).unwrap();
                assert!(q < tx && r < ty, "round {round}: {z} escapes the grid");
            }
        }
    }
}

/// One or two derivative steps computed by the exponent-band rule agree
/// pointwise with literal derived-set iteration on closed segments.
#[test]
fn exponent_band_derivatives_track_iterated_derived_sets() {
    for lam in Ordinal::enumerate_up_to(6) {
        let seg = SpaceExpr::ClosedSeg(lam.clone());
        let pts = seg.enumerate(6).unwrap();
        let d1 = derived_expr(&seg).unwrap();
        let d2 = derived_expr(&d1).unwrap();
        for (delta, by_iteration) in [(1u64, &d1), (2, &d2)] {
            let banded = cb_derivative(&seg, &Ordinal::from(delta)).unwrap();
            let bm = banded.members().unwrap();
            let im = by_iteration.members().unwrap();
            for p in &pts {
                let Point::Ord(v) = p else { unreachable!() };
                assert_eq!(
                    bm.member(v),
                    im.member(v),
                    "step {delta} disagrees at {v} inside seg[{lam}]"
                );
            }
        }
    }
}

/// Swapping the images of one limit point and one isolated point keeps the
/// map a bijection but tears the filter match, so certification must fail.
#[test]
fn tampered_catalogue_maps_fail_certification() {
    let cfg = CheckConfig { depth: 4, n_max: 6, ..CheckConfig::default() };
    for map in catalogue() {
        let source = map.source().clone();
        let corner = map.corner().unwrap();
        let pts = source.enumerate(cfg.depth).unwrap();
        let limit = pts
            .iter()
            .find(|p| **p != corner && !is_isolated(&source, p).unwrap())
            .expect("a non-corner limit point in range")
            .clone();
        let isolated = pts
            .iter()
            .find(|p| is_isolated(&source, p).unwrap())
            .expect("an isolated point in range")
            .clone();
        let cert = certify(&map, &cfg).unwrap();
        assert!(cert.pass, "{} should certify before tampering", map.id());
        let torn = map.transposed(limit.clone(), isolated.clone());
        let cert = certify(&torn, &cfg).unwrap();
        assert!(
            !cert.pass,
            "{} with {limit} and {isolated} exchanged should fail",
            map.id()
        );
    }
}

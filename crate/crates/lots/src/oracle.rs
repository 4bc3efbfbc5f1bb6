//! Cross-checks for the normal-form arithmetic, built so the fast path has
//! something honest to disagree with.
//!
//! Two independent mechanisms. [`add`] and [`mul`] recompute both
//! operations from the defining transfinite recursion, taking suprema by
//! sampling canonical approaching sequences and closing off the observed
//! growth pattern; they owe nothing to the absorption identities the
//! normal form collapses through, but their cost is the full canonical
//! descent of the right operand, which is astronomical once exponents
//! nest past omega times a few. [`check_add_embedding`] and
//! [`check_mul_embedding`] instead verify the claimed result of the fast
//! path directly, by building the canonical order embedding on a finite
//! prefix and checking it point by point with raw comparisons; they stay
//! cheap for every shape.

use std::collections::HashMap;

use crate::ordinal::{Kind, Ordinal};

/// Sample indices for suprema. They start at 2 because an index below that
/// can zero out a leading coefficient and hide the growth pattern.
const SAMPLES: [u64; 3] = [2, 3, 4];

/// a + b from a + 0 = a, a + (b+1) = (a + b) + 1, a + lim = sup.
pub fn add(a: &Ordinal, b: &Ordinal) -> Ordinal {
    add_in(a, b, &mut HashMap::new())
}

/// The memo holds results for the fixed left argument, keyed by the right,
/// which the recursion walks down repeatedly.
fn add_in(a: &Ordinal, b: &Ordinal, memo: &mut HashMap<Ordinal, Ordinal>) -> Ordinal {
    if let Some(hit) = memo.get(b) {
        return hit.clone();
    }
    let out = match b.classify() {
        Kind::Zero => a.clone(),
        Kind::Successor => bump(&add_in(a, &b.pred().expect("successor"), memo)),
        Kind::Limit => {
            let s = SAMPLES.map(|n| add_in(a, &approach(b, n), memo));
            sup_of(&s)
        }
    };
    memo.insert(b.clone(), out.clone());
    out
}

/// a * b from a * 0 = 0, a * (b+1) = a*b + a, a * lim = sup.
pub fn mul(a: &Ordinal, b: &Ordinal) -> Ordinal {
    if a.is_zero() {
        return Ordinal::zero();
    }
    mul_in(a, b, &mut HashMap::new())
}

fn mul_in(a: &Ordinal, b: &Ordinal, memo: &mut HashMap<Ordinal, Ordinal>) -> Ordinal {
    if let Some(hit) = memo.get(b) {
        return hit.clone();
    }
    let out = match b.classify() {
        Kind::Zero => Ordinal::zero(),
        Kind::Successor => {
            let p = mul_in(a, &b.pred().expect("successor"), memo);
            add(&p, a)
        }
        Kind::Limit => {
            let s = SAMPLES.map(|n| mul_in(a, &approach(b, n), memo));
            sup_of(&s)
        }
    };
    memo.insert(b.clone(), out.clone());
    out
}

/// x + 1 by term surgery.
fn bump(x: &Ordinal) -> Ordinal {
    let mut t = x.terms().to_vec();
    match t.last_mut() {
        Some((e, c)) if e.is_zero() => *c += 1,
        _ => t.push((Ordinal::zero(), 1)),
    }
    Ordinal::from_terms(t)
}

/// The n-th member of a canonical sequence converging to the limit `l`,
/// rebuilt by term surgery so the oracle owes nothing to the arithmetic it
/// checks.
fn approach(l: &Ordinal, n: u64) -> Ordinal {
    let ts = l.terms();
    let (b, c) = ts.last().expect("limits are nonzero").clone();
    let mut out: Vec<(Ordinal, u64)> = ts[..ts.len() - 1].to_vec();
    if c > 1 {
        out.push((b.clone(), c - 1));
    }
    match b.classify() {
        Kind::Successor => {
            if n > 0 {
                out.push((b.pred().expect("successor"), n));
            }
        }
        Kind::Limit => out.push((approach(&b, n), 1)),
        Kind::Zero => unreachable!("a limit's last exponent is positive"),
    }
    Ordinal::from_terms(out)
}

/// Least upper bound of an increasing sequence, inferred from three
/// samples: the shared prefix of terms survives, and the first moving term
/// closes off one power up (growing multiple) or at the supremum of its
/// own exponents (growing power). Panics on a pattern outside those two,
/// which canonical approaching sequences do not produce.
fn sup_of(s: &[Ordinal; 3]) -> Ordinal {
    let [x, y, z] = s;
    assert!(x < y && y < z, "sup samples must increase: {x}, {y}, {z}");
    let (tx, ty, tz) = (x.terms(), y.terms(), z.terms());
    let mut i = 0;
    while i < tx.len() && tx.get(i) == ty.get(i) && ty.get(i) == tz.get(i) {
        i += 1;
    }
    let (ey, cy) = ty.get(i).expect("y grows past the shared prefix");
    let (ez, cz) = tz.get(i).expect("z grows past the shared prefix");
    let close = if ey == ez {
        let cx = match tx.get(i) {
            Some((ex, cx)) => {
                assert_eq!(ex, ey, "mixed growth pattern at {x}, {y}, {z}");
                *cx
            }
            None => 0,
        };
        assert!(cx < *cy && cy < cz, "coefficients must climb: {x}, {y}, {z}");
        bump(ey)
    } else {
        let (ex, _) = tx.get(i).expect("three samples of a growing power");
        assert!(ex < ey && ey < ez, "exponents must climb: {x}, {y}, {z}");
        sup_of(&[ex.clone(), ey.clone(), ez.clone()])
    };
    close_at(&tz[..i], close)
}

/// The prefix followed by omega^e, merged canonically.
fn close_at(prefix: &[(Ordinal, u64)], e: Ordinal) -> Ordinal {
    let mut t = prefix.to_vec();
    match t.last_mut() {
        Some((pe, pc)) if *pe == e => *pc += 1,
        Some((pe, _)) => {
            assert!(*pe > e, "closing off may not reorder terms");
            t.push((e, 1));
        }
        None => t.push((e, 1)),
    }
    Ordinal::from_terms(t)
}

/// Check that `claimed` names the order type of a copy of `a` followed by
/// a copy of `b`: the canonical embedding d -> a + d must send the prefix
/// of ordinals of complexity <= k below b order-isomorphically onto the
/// part of the claim at or above a, with nothing left over. Every judgment
/// in the check is a raw term comparison.
pub fn check_add_embedding(
    a: &Ordinal,
    b: &Ordinal,
    claimed: &Ordinal,
    k: u64,
) -> Result<(), String> {
    let total = claimed.clone();
    let prefix = Ordinal::enumerate_up_to(k);
    let mut prev: Option<Ordinal> = None;
    for d in prefix.iter().take_while(|d| *d < b) {
        let y = a.add(d);
        if y < *a || y >= total {
            return Err(format!("{a} + {d} = {y} lands outside [{a}, {total})"));
        }
        if let Some(p) = prev {
            if p >= y {
                return Err(format!("{a} + d is not increasing at d = {d}"));
            }
        }
        prev = Some(y);
    }
    for y in prefix.iter().take_while(|y| *y < &total) {
        if y < a {
            continue;
        }
        let d = a
            .left_sub(y)
            .map_err(|e| format!("no difference for {y} past {a}: {e}"))?;
        if a.add(&d) != *y {
            return Err(format!("{a} + ({y} - {a}) misses {y}"));
        }
        if d >= *b {
            return Err(format!("{y} < {a} + {b} but {y} - {a} = {d} >= {b}"));
        }
    }
    Ok(())
}

/// Check that `claimed` names the order type of b copies of a laid end to
/// end: pairs (q, r) with q < b, r < a, ordered with q as the major
/// coordinate, must embed order-isomorphically onto the claim via
/// (q, r) -> a*q + r, and division must recover every point below it.
/// Pairs are drawn at complexity <= pair_k, points at <= k.
pub fn check_mul_embedding(
    a: &Ordinal,
    b: &Ordinal,
    claimed: &Ordinal,
    k: u64,
    pair_k: u64,
) -> Result<(), String> {
    let total = claimed.clone();
    if a.is_zero() || b.is_zero() {
        return if total.is_zero() {
            Ok(())
        } else {
            Err(format!("{a} * {b} = {total}, expected 0"))
        };
    }
    let small = Ordinal::enumerate_up_to(pair_k);
    let mut prev: Option<Ordinal> = None;
    for q in small.iter().take_while(|q| *q < b) {
        let base = a.mul(q);
        for r in small.iter().take_while(|r| *r < a) {
            let z = base.add(r);
            if z >= total {
                return Err(format!("{a}*{q} + {r} = {z} overflows {a} * {b} = {total}"));
            }
            if let Some(p) = prev {
                if p >= z {
                    return Err(format!(
                        "pair order breaks at ({q}, {r}): {p} then {z}"
                    ));
                }
            }
            prev = Some(z);
        }
    }
    for y in Ordinal::enumerate_up_to(k).iter().take_while(|y| *y < &total) {
        let (q, r) = y.div_rem(a).map_err(|e| format!("dividing {y} by {a}: {e}"))?;
        if r >= *a {
            return Err(format!("{y} div {a} leaves remainder {r} >= {a}"));
        }
        if q >= *b {
            return Err(format!("{y} < {a} * {b} but its quotient {q} >= {b}"));
        }
        if a.mul(&q).add(&r) != *y {
            return Err(format!("{a}*{q} + {r} fails to rebuild {y}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().expect("test ordinal")
    }

    #[test]
    fn absorption_identities_reappear() {
        let cases = [
            ("3", "w", "w"),
            ("w", "3", "w+3"),
            ("w+1", "w", "w*2"),
            ("w^2+w", "w^2*2", "w^2*3"),
            ("w*2+5", "w*3", "w*5"),
        ];
        for (a, b, want) in cases {
            assert_eq!(add(&o(a), &o(b)), o(want), "{a} + {b}");
        }
        let cases = [
            ("2", "w", "w"),
            ("w", "2", "w*2"),
            ("w+1", "w", "w^2"),
            ("w+1", "w+1", "w^2+w+1"),
            ("w^2", "w*2+1", "w^3*2+w^2"),
            ("w", "w^w", "w^w"),
            ("w^w", "w", "w^(w+1)"),
        ];
        for (a, b, want) in cases {
            assert_eq!(mul(&o(a), &o(b)), o(want), "{a} * {b}");
        }
    }

    #[test]
    fn sup_patterns_close_correctly() {
        // growing multiple under a stable prefix
        assert_eq!(sup_of(&[o("w^2+w*2"), o("w^2+w*3"), o("w^2+w*4")]), o("w^2*2"));
        // growing power washes out its own tail
        assert_eq!(sup_of(&[o("w^3*2"), o("w^4*3"), o("w^5*4")]), o("w^w"));
        // closing off merges into the prefix
        assert_eq!(sup_of(&[o("w^w+w^2"), o("w^w+w^3"), o("w^w+w^4")]), o("w^w*2"));
    }

    #[test]
    fn agrees_with_fast_path_below_the_tower_line() {
        // the canonical descent of w^w and beyond is too wide to walk
        let flat: Vec<Ordinal> = Ordinal::enumerate_up_to(4)
            .into_iter()
            .filter(|x| x.leading_exponent().is_none_or(|e| e.is_finite()))
            .collect();
        assert!(flat.iter().any(|x| *x == o("w^3")));
        for a in &flat {
            for b in &flat {
                assert_eq!(add(a, b), a.add(b), "{a} + {b}");
                assert_eq!(mul(a, b), a.mul(b), "{a} * {b}");
            }
        }
    }

    #[test]
    fn embeddings_accept_towers() {
        for (a, b) in [
            ("w^(w^2)", "w^w+w*2"),
            ("w^w", "w^(w*2)"),
            ("w^(w+1)*2+5", "w^(w^3)"),
        ] {
            let (a, b) = (o(a), o(b));
            check_add_embedding(&a, &b, &a.add(&b), 5).unwrap();
            check_mul_embedding(&a, &b, &a.mul(&b), 5, 3).unwrap();
        }
    }

    #[test]
    fn embeddings_reject_wrong_claims() {
        // forgetting absorption of the finite part
        assert!(check_add_embedding(&o("w+3"), &o("w"), &o("w*2+3"), 5).is_err());
        // too small and too large claims both surface
        assert!(check_add_embedding(&o("w"), &o("1"), &o("w"), 5).is_err());
        assert!(check_add_embedding(&o("w"), &o("1"), &o("w+2"), 5).is_err());
        // multiplying in the wrong order: 2 * w is w, not w * 2
        assert!(check_mul_embedding(&o("2"), &o("w"), &o("w*2"), 5, 3).is_err());
        assert!(check_mul_embedding(&o("w"), &o("2"), &o("w"), 5, 3).is_err());
    }
}

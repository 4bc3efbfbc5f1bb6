//! Topological queries: order neighbors, isolated points, derived sets,
//! compactness, discreteness, the rank/degree invariant of compact countable
//! spaces, and a homeomorphism decision built from those invariants.
//!
//! Each space is queried under its natural topology: an `Omit` (and the
//! internal `Carrier` and `Interval`) carries the subspace topology of the
//! ambient segment, a `Product` the product topology, everything else the
//! topology of its own order. The two readings differ exactly where a
//! removed point leaves a one-sided gap.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::ordinal::Ordinal;
use crate::ordset::{Band, Below, OrdinalSet};
use crate::space::{Point, ReorderCtx, SpaceExpr, SubsetSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

/// What a point sees next to itself on one side, in the order of the space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Neighbor {
    Immediate(Point),
    /// Points on this side come arbitrarily close without a nearest one.
    LimitSide,
    /// Nothing on this side at all.
    EndpointSide,
}

fn carrier_shaped(space: &SpaceExpr) -> bool {
    matches!(
        space,
        SpaceExpr::ClosedSeg(_)
            | SpaceExpr::HalfOpenSeg(_)
            | SpaceExpr::Interval { .. }
            | SpaceExpr::Omit { .. }
            | SpaceExpr::LGamma(_)
            | SpaceExpr::Carrier(_)
    )
}

fn expect_ord(p: &Point) -> Result<&Ordinal> {
    p.as_ord().ok_or_else(|| Error::Invalid("expected an ordinal point".into()))
}

fn neighbor_in_set(m: &OrdinalSet, x: &Ordinal, dir: Dir) -> Neighbor {
    match dir {
        Dir::Down => match m.prev_below(x) {
            Below::Empty => Neighbor::EndpointSide,
            Below::Max(y) => Neighbor::Immediate(Point::Ord(y)),
            Below::NoMaxSup(_) => Neighbor::LimitSide,
        },
        Dir::Up => match m.next_above(x) {
            Some(y) => Neighbor::Immediate(Point::Ord(y)),
            None => Neighbor::EndpointSide,
        },
    }
}

/// The nearest member on one side of `p`, or the kind of gap found there.
pub fn neighbor(space: &SpaceExpr, p: &Point, dir: Dir) -> Result<Neighbor> {
    if !space.member(p)? {
        return Err(Error::NotAMember { point: p.to_string() });
    }
    match space {
        SpaceExpr::Reorder(inner) => {
            let ctx = ReorderCtx::build(inner)?;
            Ok(neighbor_reorder(&ctx, expect_ord(p)?, dir))
        }
        SpaceExpr::Rev(x) => {
            let flipped = match dir {
                Dir::Down => Dir::Up,
                Dir::Up => Dir::Down,
            };
            neighbor(x, p, flipped)
        }
        SpaceExpr::OrderedSum(parts) => {
            let Point::At(k, q) = p else {
                return Err(Error::Invalid("expected a summand-tagged point".into()));
            };
            match neighbor(&parts[*k], q, dir)? {
                Neighbor::Immediate(r) => Ok(Neighbor::Immediate(Point::at(*k, r))),
                Neighbor::LimitSide => Ok(Neighbor::LimitSide),
                Neighbor::EndpointSide => match dir {
                    Dir::Down => {
                        for j in (0..*k).rev() {
                            if !parts[j].is_empty()? {
                                return Ok(match parts[j].max_point()? {
                                    Some(mp) => Neighbor::Immediate(Point::at(j, mp)),
                                    None => Neighbor::LimitSide,
                                });
                            }
                        }
                        Ok(Neighbor::EndpointSide)
                    }
                    Dir::Up => {
                        for (j, part) in parts.iter().enumerate().skip(*k + 1) {
                            if !part.is_empty()? {
                                return Ok(match part.min_point()? {
                                    Some(mp) => Neighbor::Immediate(Point::at(j, mp)),
                                    None => Neighbor::LimitSide,
                                });
                            }
                        }
                        Ok(Neighbor::EndpointSide)
                    }
                },
            }
        }
        SpaceExpr::Lex(a, b) => {
            let Point::Pair(u, v) = p else {
                return Err(Error::Invalid("expected a pair".into()));
            };
            match neighbor(b, v, dir)? {
                Neighbor::Immediate(w) => {
                    Ok(Neighbor::Immediate(Point::pair((**u).clone(), w)))
                }
                Neighbor::LimitSide => Ok(Neighbor::LimitSide),
                // the minor coordinate is at its extreme: step the major and
                // land on the far end of the adjacent copy
                Neighbor::EndpointSide => match neighbor(a, u, dir)? {
                    Neighbor::EndpointSide => Ok(Neighbor::EndpointSide),
                    Neighbor::LimitSide => Ok(Neighbor::LimitSide),
                    Neighbor::Immediate(u2) => {
                        let far = match dir {
                            Dir::Down => b.max_point()?,
                            Dir::Up => b.min_point()?,
                        };
                        Ok(match far {
                            Some(w) => Neighbor::Immediate(Point::pair(u2, w)),
                            None => Neighbor::LimitSide,
                        })
                    }
                },
            }
        }
        SpaceExpr::Sub { .. } => neighbor_sub(space, p, dir),
        SpaceExpr::Product(..) | SpaceExpr::Union(_) | SpaceExpr::Derived(_) => Err(
            Error::Invalid("neighbors are an order notion; this space has no distinguished order".into()),
        ),
        _ => Ok(neighbor_in_set(&space.members()?, expect_ord(p)?, dir)),
    }
}

fn neighbor_reorder(ctx: &ReorderCtx, x: &Ordinal, dir: Dir) -> Neighbor {
    let m = &ctx.members;
    match ctx.block_of(x) {
        Some(a) => {
            let n = a.left_sub(x).expect("run offset").as_nat().expect("finite offset");
            let at = |k: u64| a.add(&Ordinal::from_nat(k));
            match dir {
                Dir::Down => {
                    if n % 2 == 1 {
                        let cand = at(n + 2);
                        if m.member(&cand) {
                            Neighbor::Immediate(Point::Ord(cand))
                        } else {
                            outside_below(ctx, &a)
                        }
                    } else if n == 2 {
                        Neighbor::Immediate(Point::Ord(at(1)))
                    } else {
                        Neighbor::Immediate(Point::Ord(at(n - 2)))
                    }
                }
                Dir::Up => {
                    if n % 2 == 0 {
                        let cand = at(n + 2);
                        if m.member(&cand) {
                            Neighbor::Immediate(Point::Ord(cand))
                        } else {
                            outside_above(ctx, &a)
                        }
                    } else if n == 1 {
                        let cand = at(2);
                        if m.member(&cand) {
                            Neighbor::Immediate(Point::Ord(cand))
                        } else {
                            outside_above(ctx, &a)
                        }
                    } else {
                        Neighbor::Immediate(Point::Ord(at(n - 2)))
                    }
                }
            }
        }
        None => match dir {
            Dir::Down => match m.prev_below(x) {
                Below::Empty => Neighbor::EndpointSide,
                Below::NoMaxSup(_) => Neighbor::LimitSide,
                Below::Max(y) => Neighbor::Immediate(Point::Ord(arrive_from_above(ctx, y))),
            },
            Dir::Up => match m.next_above(x) {
                None => Neighbor::EndpointSide,
                Some(z) => enter_from_below(ctx, z),
            },
        },
    }
}

fn outside_below(ctx: &ReorderCtx, a: &Ordinal) -> Neighbor {
    match ctx.members.prev_below(&a.succ()) {
        Below::Empty => Neighbor::EndpointSide,
        Below::NoMaxSup(_) => Neighbor::LimitSide,
        Below::Max(y) => Neighbor::Immediate(Point::Ord(arrive_from_above(ctx, y))),
    }
}

fn outside_above(ctx: &ReorderCtx, a: &Ordinal) -> Neighbor {
    match ctx.members.next_geq(&a.add(&Ordinal::omega())) {
        None => Neighbor::EndpointSide,
        Some(z) => enter_from_below(ctx, z),
    }
}

/// The last element, in block order, of the run y belongs to; y itself when
/// it is not in a block. A maximal member below something is never inside an
/// infinite block, whose members have no maximum.
fn arrive_from_above(ctx: &ReorderCtx, y: Ordinal) -> Ordinal {
    match ctx.block_of(&y) {
        None => y,
        Some(b) => {
            debug_assert!(!ctx.start_is_infinite(&b));
            ctx.block_listing(&b).last().expect("nonempty block").clone()
        }
    }
}

fn enter_from_below(ctx: &ReorderCtx, z: Ordinal) -> Neighbor {
    match ctx.block_of(&z) {
        None => Neighbor::Immediate(Point::Ord(z)),
        Some(b) => {
            if ctx.start_is_infinite(&b) {
                // odd offsets descend without a first element
                Neighbor::LimitSide
            } else {
                Neighbor::Immediate(Point::Ord(
                    ctx.block_listing(&b).first().expect("nonempty block").clone(),
                ))
            }
        }
    }
}

fn neighbor_sub(space: &SpaceExpr, p: &Point, dir: Dir) -> Result<Neighbor> {
    let SpaceExpr::Sub { ambient, spec } = space else {
        return Err(Error::Invalid("not a subset space".into()));
    };
    let SpaceExpr::Lex(a, b) = &**ambient else {
        return Err(Error::Invalid("sub needs a lexicographic ambient".into()));
    };
    match spec {
        SubsetSpec::TopCopyKeepMin | SubsetSpec::TopCopyKeepMax => {
            let (lex_part, corner) = space.keep_parts()?;
            if *p == corner {
                match dir {
                    Dir::Up => Ok(Neighbor::EndpointSide),
                    Dir::Down => {
                        if lex_part.is_empty()? {
                            Ok(Neighbor::EndpointSide)
                        } else {
                            Ok(match lex_part.max_point()? {
                                Some(mp) => Neighbor::Immediate(mp),
                                None => Neighbor::LimitSide,
                            })
                        }
                    }
                }
            } else {
                match neighbor(&lex_part, p, dir)? {
                    Neighbor::EndpointSide if dir == Dir::Up => {
                        Ok(Neighbor::Immediate(corner))
                    }
                    other => Ok(other),
                }
            }
        }
        SubsetSpec::IsolatedMajorOrMinorMax => {
            let Point::Pair(u, v) = p else {
                return Err(Error::Invalid("expected a pair".into()));
            };
            let am = a.members()?;
            let u_ord = expect_ord(u)?;
            let b_min = b.min_point()?.ok_or_else(|| {
                Error::Unsupported("this subset needs a minor minimum".into())
            })?;
            let b_max = b.max_point()?.ok_or_else(|| {
                Error::Unsupported("this subset needs a minor maximum".into())
            })?;
            let u_isolated = !am.is_cofinal_below(u_ord);
            let step_up = |next: Option<Ordinal>| -> Result<Neighbor> {
                Ok(match next {
                    None => Neighbor::EndpointSide,
                    Some(z) => {
                        let z_isolated = !am.is_cofinal_below(&z);
                        let w = if z_isolated { b_min.clone() } else { b_max.clone() };
                        Neighbor::Immediate(Point::pair(Point::Ord(z), w))
                    }
                })
            };
            if u_isolated {
                match dir {
                    Dir::Down => match neighbor(b, v, Dir::Down)? {
                        Neighbor::Immediate(w) => {
                            Ok(Neighbor::Immediate(Point::pair((**u).clone(), w)))
                        }
                        Neighbor::LimitSide => Ok(Neighbor::LimitSide),
                        Neighbor::EndpointSide => match am.prev_below(u_ord) {
                            Below::Empty => Ok(Neighbor::EndpointSide),
                            // every major ends with its point at the minor
                            // maximum, a full column and a singleton alike
                            Below::Max(y) => Ok(Neighbor::Immediate(Point::pair(
                                Point::Ord(y),
                                b_max.clone(),
                            ))),
                            Below::NoMaxSup(_) => Ok(Neighbor::LimitSide),
                        },
                    },
                    Dir::Up => match neighbor(b, v, Dir::Up)? {
                        Neighbor::Immediate(w) => {
                            Ok(Neighbor::Immediate(Point::pair((**u).clone(), w)))
                        }
                        Neighbor::LimitSide => Ok(Neighbor::LimitSide),
                        Neighbor::EndpointSide => step_up(am.next_above(u_ord)),
                    },
                }
            } else {
                // a limit major carries only its point at the minor maximum
                match dir {
                    Dir::Down => Ok(Neighbor::LimitSide),
                    Dir::Up => step_up(am.next_above(u_ord)),
                }
            }
        }
    }
}

/// Whether `p` has a neighborhood in `space` containing no other point.
pub fn is_isolated(space: &SpaceExpr, p: &Point) -> Result<bool> {
    if !space.member(p)? {
        return Err(Error::NotAMember { point: p.to_string() });
    }
    match space {
        SpaceExpr::Rev(x) => is_isolated(x, p),
        SpaceExpr::Product(a, b) => {
            let Point::Pair(u, v) = p else {
                return Err(Error::Invalid("expected a pair".into()));
            };
            Ok(is_isolated(a, u)? && is_isolated(b, v)?)
        }
        SpaceExpr::Union(parts) => union_isolated(parts, p),
        SpaceExpr::Derived(inner) => derived_isolated(inner, p),
        SpaceExpr::Lex(..)
        | SpaceExpr::OrderedSum(_)
        | SpaceExpr::Reorder(_)
        | SpaceExpr::Sub { .. } => Ok(neighbor(space, p, Dir::Down)? != Neighbor::LimitSide
            && neighbor(space, p, Dir::Up)? != Neighbor::LimitSide),
        // order topology on a carrier: a point is a limit exactly when its
        // position is, regardless of gaps in the values
        _ => Ok(!space.members()?.type_below(expect_ord(p)?).is_limit()),
    }
}

/// Isolation in the subspace topology inherited from the ambient ordinal
/// line, where a gap left by removed points does not create a limit. Only
/// ordinal subspaces carry this second topology.
pub fn is_isolated_ambient(space: &SpaceExpr, p: &Point) -> Result<bool> {
    match space {
        SpaceExpr::Omit { .. } | SpaceExpr::Carrier(_) | SpaceExpr::Interval { .. } => {
            if !space.member(p)? {
                return Err(Error::NotAMember { point: p.to_string() });
            }
            Ok(!space.members()?.is_cofinal_below(expect_ord(p)?))
        }
        _ => Err(Error::Unsupported(
            "ambient-subspace isolation needs an ordinal subspace".into(),
        )),
    }
}

/// Isolation inside a finite union of products of ordinal carriers. Shrinking
/// a box neighborhood of p, each factor cell settles to the point itself, to
/// nothing, or to an infinite tail; a part keeps extra points exactly when
/// all its cells stay nonempty and one stays infinite.
fn union_isolated(parts: &[SpaceExpr], p: &Point) -> Result<bool> {
    for part in parts {
        let mut cells = Vec::new();
        collect_product_cells(part, p, &mut cells)?;
        let all_nonempty = cells
            .iter()
            .all(|(s, x)| s.member(x) || s.is_cofinal_below(x));
        let some_big = cells.iter().any(|(s, x)| s.is_cofinal_below(x));
        if all_nonempty && some_big {
            return Ok(false);
        }
    }
    Ok(true)
}

fn collect_product_cells(
    part: &SpaceExpr,
    p: &Point,
    out: &mut Vec<(OrdinalSet, Ordinal)>,
) -> Result<()> {
    match (part, p) {
        (SpaceExpr::Product(a, b), Point::Pair(x, y)) => {
            collect_product_cells(a, x, out)?;
            collect_product_cells(b, y, out)
        }
        (_, Point::Ord(x)) if carrier_shaped(part) => {
            out.push((part.members()?, x.clone()));
            Ok(())
        }
        _ => Err(Error::Unsupported(
            "union isolation needs products of ordinal carriers".into(),
        )),
    }
}

fn derived_isolated(inner: &SpaceExpr, p: &Point) -> Result<bool> {
    if carrier_shaped(inner) {
        let d = inner.members()?.order_derived_step()?;
        return Ok(!d.order_derived_step()?.member(expect_ord(p)?));
    }
    // an order-isomorphic copy has the same derived structure; read it off
    // the position line
    let t = inner.order_type()?;
    let positions = OrdinalSet::interval(&Ordinal::zero(), &t, Band::all());
    let d = positions.derived_step();
    let pos = inner.position_of(p)?;
    Ok(!d.is_cofinal_below(&pos))
}

/// One exact step of the derived-set operator, as a space expression.
pub fn derived_expr(space: &SpaceExpr) -> Result<SpaceExpr> {
    match space {
        _ if carrier_shaped(space) => {
            // limit members are read off positions, not values: over a gap
            // the next member inherits the limit position
            Ok(SpaceExpr::Carrier(space.members()?.order_derived_step()?))
        }
        SpaceExpr::Product(a, b) => Ok(SpaceExpr::Union(vec![
            SpaceExpr::product(derived_expr(a)?, (**b).clone()),
            SpaceExpr::product((**a).clone(), derived_expr(b)?),
        ])),
        SpaceExpr::Union(parts) => Ok(SpaceExpr::Union(
            parts.iter().map(derived_expr).collect::<Result<_>>()?,
        )),
        _ => Ok(SpaceExpr::Derived(Box::new(space.clone()))),
    }
}

/// The delta-th derived set. For an ordinal carrier the result is the exact
/// carrier; for a product shape, the structural union (finite delta only);
/// for any other well-ordered space, the canonical order-isomorphic copy,
/// carried on the positions of the space's enumeration.
pub fn cb_derivative(space: &SpaceExpr, delta: &Ordinal) -> Result<SpaceExpr> {
    if carrier_shaped(space) {
        let m = space.members()?;
        return Ok(SpaceExpr::Carrier(m.order_derived_iterate(delta)?));
    }
    if matches!(space, SpaceExpr::Product(..) | SpaceExpr::Union(_)) {
        let n = delta.as_nat().ok_or_else(|| {
            Error::Unsupported(
                "transfinite derived sets of products are not iterated".into(),
            )
        })?;
        if n > 16 {
            return Err(Error::Unsupported(
                "derived-set iteration on products is capped at 16 steps".into(),
            ));
        }
        let mut cur = space.clone();
        for _ in 0..n {
            cur = derived_expr(&cur)?;
        }
        return Ok(cur);
    }
    Ok(SpaceExpr::Carrier(cb_positions(space, delta)?))
}

/// Positions (in the canonical enumeration) of the delta-th derived set of a
/// well-ordered space taken with its order topology.
pub fn cb_positions(space: &SpaceExpr, delta: &Ordinal) -> Result<OrdinalSet> {
    let t = space.order_type()?;
    OrdinalSet::interval(&Ordinal::zero(), &t, Band::all()).derived_iterate(delta)
}

/// Rank and degree of a compact countable space: the unique (r, d) with the
/// r-th derived set finite of size d and the next one empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MsInvariant {
    pub rank: Ordinal,
    pub degree: u64,
}

impl fmt::Display for MsInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {}, degree {}", self.rank, self.degree)
    }
}

pub fn ms_invariant(space: &SpaceExpr) -> Result<MsInvariant> {
    if let Some(tuples) = flatten_products(space)? {
        return ms_product_route(tuples);
    }
    if matches!(space, SpaceExpr::Product(..) | SpaceExpr::Union(_)) {
        return Err(Error::Unsupported(
            "the product invariant needs ordinal-carrier factors".into(),
        ));
    }
    if !is_compact(space)? {
        return Err(Error::Invalid("the invariant needs a compact space".into()));
    }
    let t = space.order_type()?;
    if t.is_zero() {
        return Err(Error::Invalid("the empty space has no invariant".into()));
    }
    let rank = t.leading_exponent().expect("nonzero").clone();
    let degree = t.leading_coefficient().expect("nonzero");
    // cross-check the arithmetic reading against the derived-set algebra,
    // on the values when the space is an ordinal carrier
    let base = match space.members() {
        Ok(m) => m,
        _ => OrdinalSet::interval(&Ordinal::zero(), &t, Band::all()),
    };
    let dr = base.order_derived_iterate(&rank)?;
    if dr.order_type() != Ordinal::from_nat(degree) {
        return Err(Error::Invalid(format!(
            "invariant cross-check failed: rank-{rank} derived set has type {}, expected {degree} points",
            dr.order_type()
        )));
    }
    if !dr.derived_step().is_empty() {
        return Err(Error::Invalid(
            "invariant cross-check failed: derived set past the rank is nonempty".into(),
        ));
    }
    Ok(MsInvariant { rank, degree })
}

/// A product/union shape flattened to factor tuples of exact carriers;
/// None when some factor is not an ordinal carrier.
fn flatten_products(space: &SpaceExpr) -> Result<Option<Vec<Vec<OrdinalSet>>>> {
    match space {
        SpaceExpr::Product(a, b) => {
            let (Some(la), Some(lb)) = (flatten_products(a)?, flatten_products(b)?) else {
                return Ok(None);
            };
            let mut out = Vec::new();
            for ta in &la {
                for tb in &lb {
                    let mut t = ta.clone();
                    t.extend(tb.iter().cloned());
                    out.push(t);
                }
            }
            Ok(Some(out))
        }
        SpaceExpr::Union(parts) => {
            let mut out = Vec::new();
            for part in parts {
                match flatten_products(part)? {
                    Some(ts) => out.extend(ts),
                    None => return Ok(None),
                }
            }
            Ok(Some(out))
        }
        _ if carrier_shaped(space) => Ok(Some(vec![vec![space.members()?]])),
        _ => Ok(None),
    }
}

fn prune_level(level: Vec<Vec<OrdinalSet>>) -> Vec<Vec<OrdinalSet>> {
    let mut out: Vec<Vec<OrdinalSet>> = Vec::new();
    for part in level {
        if part.iter().any(|s| s.is_empty()) {
            continue;
        }
        if !out.contains(&part) {
            out.push(part);
        }
    }
    out
}

fn derive_level(level: &[Vec<OrdinalSet>]) -> Result<Vec<Vec<OrdinalSet>>> {
    let mut next = Vec::new();
    for part in level {
        for i in 0..part.len() {
            let mut child = part.clone();
            child[i] = child[i].order_derived_step()?;
            next.push(child);
        }
    }
    Ok(prune_level(next))
}

fn level_count(level: &[Vec<OrdinalSet>]) -> Option<u64> {
    // exact count of the union, done by enumeration; None when infinite
    let mut points: BTreeSet<Vec<Ordinal>> = BTreeSet::new();
    for part in level {
        let factors: Option<Vec<Vec<Ordinal>>> =
            part.iter().map(|s| s.enumerate_finite()).collect();
        let factors = factors?;
        let mut tuples: Vec<Vec<Ordinal>> = vec![Vec::new()];
        for f in &factors {
            let mut grown = Vec::new();
            for t in &tuples {
                for x in f {
                    let mut t2 = t.clone();
                    t2.push(x.clone());
                    grown.push(t2);
                }
            }
            tuples = grown;
        }
        points.extend(tuples);
    }
    Some(points.len() as u64)
}

fn ms_product_route(tuples: Vec<Vec<OrdinalSet>>) -> Result<MsInvariant> {
    let mut level = prune_level(tuples);
    for k in 0..=32u64 {
        if level.is_empty() {
            return Err(Error::Invalid("the empty space has no invariant".into()));
        }
        if level
            .iter()
            .all(|part| part.iter().all(|s| s.order_type().is_finite()))
        {
            let degree = level_count(&level).expect("all factors finite");
            let next = derive_level(&level)?;
            if !next.is_empty() {
                return Err(Error::Invalid(
                    "invariant cross-check failed: a finite level has a nonempty derived set"
                        .into(),
                ));
            }
            return Ok(MsInvariant { rank: Ordinal::from_nat(k), degree });
        }
        level = derive_level(&level)?;
    }
    Err(Error::Unsupported(
        "derived iteration of the product did not bottom out in 32 steps".into(),
    ))
}

pub fn is_compact(space: &SpaceExpr) -> Result<bool> {
    match space {
        // order compactness: interior cuts of a well-ordered carrier always
        // have a least upper point, so only a missing top can break it
        SpaceExpr::Omit { .. } | SpaceExpr::Carrier(_) | SpaceExpr::Interval { .. } => {
            Ok(!matches!(space.members()?.last(), Below::NoMaxSup(_)))
        }
        SpaceExpr::Product(a, b) => Ok(is_compact(a)? && is_compact(b)?),
        SpaceExpr::Rev(x) => is_compact(x),
        SpaceExpr::Reorder(inner) => {
            let ctx = ReorderCtx::build(inner)?;
            if ctx.has_infinite_block() {
                // the reversed odd offsets form an infinite closed discrete set
                return Ok(false);
            }
            let t = ctx.members.order_type();
            Ok(t.is_zero() || t.is_successor())
        }
        SpaceExpr::Union(_) | SpaceExpr::Derived(_) => Err(Error::Unsupported(
            "compactness of internal derived forms is not computed".into(),
        )),
        _ => match space.order_type() {
            Ok(t) => Ok(t.is_zero() || t.is_successor()),
            Err(_) => match discreteness(space)? {
                // a space too tangled for an order type is infinite, and an
                // infinite discrete space is never compact
                Discreteness::Discrete => Ok(false),
                Discreteness::NotDiscrete { .. } => Err(Error::Unsupported(
                    "compactness of a non-well-orderable, non-discrete space".into(),
                )),
            },
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discreteness {
    Discrete,
    NotDiscrete { witness: Point },
}

pub fn discreteness(space: &SpaceExpr) -> Result<Discreteness> {
    match space {
        SpaceExpr::Rev(x) => discreteness(x),
        SpaceExpr::Product(a, b) => match (discreteness(a)?, discreteness(b)?) {
            (Discreteness::Discrete, Discreteness::Discrete) => Ok(Discreteness::Discrete),
            (Discreteness::NotDiscrete { witness }, _) => Ok(Discreteness::NotDiscrete {
                witness: Point::pair(witness, sample_point(b)?),
            }),
            (_, Discreteness::NotDiscrete { witness }) => Ok(Discreteness::NotDiscrete {
                witness: Point::pair(sample_point(a)?, witness),
            }),
        },
        SpaceExpr::Lex(a, b) => discreteness_lex(space, a, b),
        SpaceExpr::OrderedSum(parts) => discreteness_sum(parts),
        SpaceExpr::Reorder(inner) => discreteness_reorder(inner),
        SpaceExpr::Sub { .. } => discreteness_sub(space),
        SpaceExpr::Union(_) | SpaceExpr::Derived(_) => Err(Error::Unsupported(
            "discreteness of internal derived forms is not computed".into(),
        )),
        _ => {
            // the w-th point, when there is one, is the least limit position
            let m = space.members()?;
            if m.order_type() <= Ordinal::omega() {
                return Ok(Discreteness::Discrete);
            }
            let x = m.nth(&Ordinal::omega()).expect("position below the type");
            Ok(Discreteness::NotDiscrete { witness: Point::Ord(x) })
        }
    }
}

fn pick_least(space: &SpaceExpr, cands: Vec<Point>) -> Result<Discreteness> {
    let mut best: Option<Point> = None;
    for c in cands {
        best = Some(match best {
            None => c,
            Some(b) => {
                if space.cmp_points(&c, &b)? == std::cmp::Ordering::Less {
                    c
                } else {
                    b
                }
            }
        });
    }
    Ok(match best {
        Some(witness) => Discreteness::NotDiscrete { witness },
        None => Discreteness::Discrete,
    })
}

fn discreteness_lex(space: &SpaceExpr, a: &SpaceExpr, b: &SpaceExpr) -> Result<Discreteness> {
    if space.is_empty()? {
        return Ok(Discreteness::Discrete);
    }
    let mut cands: Vec<Point> = Vec::new();
    // a minor limit shows up in every copy; the first copy carries the least
    if let Discreteness::NotDiscrete { witness } = discreteness(b)? {
        let col = match a.min_point()? {
            Some(u) => u,
            None => sample_point(a)?,
        };
        cands.push(Point::pair(col, witness));
    }
    // a copy's first point is approached through the previous copies
    if let Some(b_min) = b.min_point()? {
        if b.max_point()?.is_none() {
            if let Some(u) = least_with_lower_side(a)? {
                cands.push(Point::pair(u, b_min.clone()));
            }
        }
        if let Some(u) = least_lower_limit(a)? {
            cands.push(Point::pair(u, b_min));
        }
    }
    // a copy's last point is approached through the following copies
    if let Some(b_max) = b.max_point()? {
        if b.min_point()?.is_none() {
            if let Some(u) = least_with_upper_side(a)? {
                cands.push(Point::pair(u, b_max.clone()));
            }
        }
        if let Some(u) = least_upper_limit(a)? {
            cands.push(Point::pair(u, b_max));
        }
    }
    pick_least(space, cands)
}

fn discreteness_sum(parts: &[SpaceExpr]) -> Result<Discreteness> {
    let nonempty: Vec<usize> = {
        let mut v = Vec::new();
        for (j, p) in parts.iter().enumerate() {
            if !p.is_empty()? {
                v.push(j);
            }
        }
        v
    };
    for (idx, &j) in nonempty.iter().enumerate() {
        // the part minimum swallowed by the previous part's endless tail
        if idx > 0 {
            if let Some(mn) = parts[j].min_point()? {
                if parts[nonempty[idx - 1]].max_point()?.is_none() {
                    return Ok(Discreteness::NotDiscrete { witness: Point::at(j, mn) });
                }
            }
        }
        if let Discreteness::NotDiscrete { witness } = discreteness(&parts[j])? {
            return Ok(Discreteness::NotDiscrete { witness: Point::at(j, witness) });
        }
        // the part maximum approached from the next part descending into it
        if idx + 1 < nonempty.len() {
            if let Some(mx) = parts[j].max_point()? {
                if parts[nonempty[idx + 1]].min_point()?.is_none() {
                    return Ok(Discreteness::NotDiscrete { witness: Point::at(j, mx) });
                }
            }
        }
    }
    Ok(Discreteness::Discrete)
}

fn discreteness_reorder(inner: &SpaceExpr) -> Result<Discreteness> {
    let ctx = ReorderCtx::build(inner)?;
    let m = ctx.members.clone();
    let approach = m.approach_set();
    let omega = Ordinal::omega();
    let mut cands: Vec<Ordinal> = Vec::new();

    // members approached in place; approached points are limits, so never
    // block members, and the block order agrees with the plain order on them
    let c1 = m.intersect(&approach);
    if let Some(x) = c1.first() {
        cands.push(x);
    }

    for a in ctx.finite_starts() {
        let listing = ctx.block_listing(a);
        // the block's first element in block order inherits an approach from below
        if matches!(m.prev_below(&a.succ()), Below::NoMaxSup(_)) {
            cands.push(listing.first().expect("nonempty block").clone());
        }
        // its last element faces whatever starts just above the run
        if let Some(z) = m.next_geq(&a.add(&omega)) {
            if ctx.block_of(&z).is_some_and(|s| ctx.start_is_infinite(&s)) {
                cands.push(listing.last().expect("nonempty block").clone());
            }
        }
    }

    // a maximal member sitting directly below an infinite block is approached
    // by the reversed odd offsets descending toward it
    let before = ctx.infinite_starts().minus(&approach);
    let before = before.enumerate_finite().ok_or_else(|| {
        Error::Unsupported("reorder with infinitely many unapproached block starts".into())
    })?;
    for a in before {
        if let Below::Max(y) = m.prev_below(&a.succ()) {
            cands.push(arrive_from_above(&ctx, y));
        }
    }

    // a member just past an approached gap has no immediate predecessor
    let gaps = approach.minus(&m).minus(ctx.infinite_starts());
    let gaps = gaps.enumerate_finite().ok_or_else(|| {
        Error::Unsupported("reorder with infinitely many approached gaps".into())
    })?;
    for s in gaps {
        if let Some(z) = m.next_above(&s) {
            match ctx.block_of(&z) {
                None => cands.push(z),
                Some(b) if !ctx.start_is_infinite(&b) => {
                    cands.push(ctx.block_listing(&b).first().expect("nonempty").clone())
                }
                _ => {}
            }
        }
    }

    let mut best: Option<Ordinal> = None;
    for c in cands {
        best = Some(match best {
            None => c,
            Some(b) => {
                if ctx.cmp(&c, &b) == std::cmp::Ordering::Less {
                    c
                } else {
                    b
                }
            }
        });
    }
    Ok(match best {
        Some(x) => Discreteness::NotDiscrete { witness: Point::Ord(x) },
        None => Discreteness::Discrete,
    })
}

fn discreteness_sub(space: &SpaceExpr) -> Result<Discreteness> {
    let SpaceExpr::Sub { ambient, spec } = space else {
        return Err(Error::Invalid("not a subset space".into()));
    };
    let SpaceExpr::Lex(a, b) = &**ambient else {
        return Err(Error::Invalid("sub needs a lexicographic ambient".into()));
    };
    match spec {
        SubsetSpec::TopCopyKeepMin | SubsetSpec::TopCopyKeepMax => {
            let (lex_part, corner) = space.keep_parts()?;
            if let Discreteness::NotDiscrete { witness } = discreteness(&lex_part)? {
                return Ok(Discreteness::NotDiscrete { witness });
            }
            if !lex_part.is_empty()? && lex_part.max_point()?.is_none() {
                return Ok(Discreteness::NotDiscrete { witness: corner });
            }
            Ok(Discreteness::Discrete)
        }
        SubsetSpec::IsolatedMajorOrMinorMax => {
            let am = a.members()?;
            let b_max = b.max_point()?.ok_or_else(|| {
                Error::Unsupported("this subset needs a minor maximum".into())
            })?;
            let mut cands: Vec<Point> = Vec::new();
            let limits = am.order_derived_step()?;
            let isolated = am.minus(&limits);
            if let Discreteness::NotDiscrete { witness } = discreteness(b)? {
                if let Some(u0) = isolated.first() {
                    cands.push(Point::pair(Point::Ord(u0), witness));
                }
            }
            if let Some(u) = limits.first() {
                cands.push(Point::pair(Point::Ord(u), b_max));
            }
            pick_least(space, cands)
        }
    }
}

fn sample_point(space: &SpaceExpr) -> Result<Point> {
    if let Ok(Some(p)) = space.min_point() {
        return Ok(p);
    }
    for d in 1..=8 {
        if let Some(p) = space.enumerate(d)?.into_iter().next() {
            return Ok(p);
        }
    }
    Err(Error::Unsupported("could not find a sample point".into()))
}

fn point_beyond(space: &SpaceExpr, avoid: &Point) -> Result<Point> {
    if let Some(mx) = space.max_point()? {
        if mx != *avoid {
            return Ok(mx);
        }
    }
    for d in 1..=8 {
        for p in space.enumerate(d)? {
            if p != *avoid {
                return Ok(p);
            }
        }
    }
    Err(Error::Unsupported("could not find a second point".into()))
}

/// Least point with anything below it (best effort when the space has no
/// least element at all).
fn least_with_lower_side(space: &SpaceExpr) -> Result<Option<Point>> {
    match space.min_point()? {
        None => {
            if space.is_empty()? {
                Ok(None)
            } else {
                Ok(Some(sample_point(space)?))
            }
        }
        Some(mn) => match neighbor(space, &mn, Dir::Up)? {
            Neighbor::Immediate(z) => Ok(Some(z)),
            Neighbor::LimitSide => Ok(Some(point_beyond(space, &mn)?)),
            Neighbor::EndpointSide => Ok(None),
        },
    }
}

/// Least point with anything above it (best effort when the space has no
/// least element).
fn least_with_upper_side(space: &SpaceExpr) -> Result<Option<Point>> {
    match space.min_point()? {
        Some(mn) => match neighbor(space, &mn, Dir::Up)? {
            Neighbor::EndpointSide => Ok(None),
            _ => Ok(Some(mn)),
        },
        None => {
            if space.is_empty()? {
                return Ok(None);
            }
            let s = sample_point(space)?;
            match space.max_point()? {
                Some(mx) if mx == s => Ok(Some(point_beyond(space, &mx)?)),
                _ => Ok(Some(s)),
            }
        }
    }
}

/// Least point approached strictly from below, if any.
fn least_lower_limit(space: &SpaceExpr) -> Result<Option<Point>> {
    match space {
        _ if carrier_shaped(space) => {
            // a member has no immediate predecessor exactly at limit positions
            Ok(space.members()?.nth(&Ordinal::omega()).map(Point::Ord))
        }
        SpaceExpr::Rev(x) => {
            if least_upper_limit(x)?.is_none() {
                Ok(None)
            } else {
                Err(Error::Unsupported(
                    "least limit of a reversal of a space with upper limits".into(),
                ))
            }
        }
        SpaceExpr::OrderedSum(parts) => {
            let mut prev_nonempty: Option<usize> = None;
            for (j, part) in parts.iter().enumerate() {
                if part.is_empty()? {
                    continue;
                }
                if let Some(i) = prev_nonempty {
                    if parts[i].max_point()?.is_none() {
                        if let Some(mn) = part.min_point()? {
                            return Ok(Some(Point::at(j, mn)));
                        }
                    }
                }
                if let Some(w) = least_lower_limit(part)? {
                    return Ok(Some(Point::at(j, w)));
                }
                prev_nonempty = Some(j);
            }
            Ok(None)
        }
        SpaceExpr::Lex(a, b) => {
            let mut cands: Vec<Point> = Vec::new();
            if let Some(w) = least_lower_limit(b)? {
                let col = match a.min_point()? {
                    Some(u) => u,
                    None => sample_point(a)?,
                };
                cands.push(Point::pair(col, w));
            }
            if let Some(b_min) = b.min_point()? {
                if b.max_point()?.is_none() {
                    if let Some(u) = least_with_lower_side(a)? {
                        cands.push(Point::pair(u, b_min.clone()));
                    }
                }
                if let Some(u) = least_lower_limit(a)? {
                    cands.push(Point::pair(u, b_min));
                }
            }
            least_of(space, cands)
        }
        _ => Err(Error::Unsupported(
            "least limit points are not computed for this shape".into(),
        )),
    }
}

/// Least point approached strictly from above, if any.
fn least_upper_limit(space: &SpaceExpr) -> Result<Option<Point>> {
    match space {
        // nothing is approached from above in a well-ordered carrier
        _ if carrier_shaped(space) => Ok(None),
        SpaceExpr::Rev(x) => {
            if least_lower_limit(x)?.is_none() {
                Ok(None)
            } else {
                Err(Error::Unsupported(
                    "least limit of a reversal of a space with lower limits".into(),
                ))
            }
        }
        SpaceExpr::OrderedSum(parts) => {
            let nonempty: Vec<usize> = {
                let mut v = Vec::new();
                for (j, p) in parts.iter().enumerate() {
                    if !p.is_empty()? {
                        v.push(j);
                    }
                }
                v
            };
            for (idx, &j) in nonempty.iter().enumerate() {
                if let Some(w) = least_upper_limit(&parts[j])? {
                    return Ok(Some(Point::at(j, w)));
                }
                if idx + 1 < nonempty.len() {
                    if let Some(mx) = parts[j].max_point()? {
                        if parts[nonempty[idx + 1]].min_point()?.is_none() {
                            return Ok(Some(Point::at(j, mx)));
                        }
                    }
                }
            }
            Ok(None)
        }
        SpaceExpr::Lex(a, b) => {
            let mut cands: Vec<Point> = Vec::new();
            if let Some(w) = least_upper_limit(b)? {
                let col = match a.min_point()? {
                    Some(u) => u,
                    None => sample_point(a)?,
                };
                cands.push(Point::pair(col, w));
            }
            if let Some(b_max) = b.max_point()? {
                if b.min_point()?.is_none() {
                    if let Some(u) = least_with_upper_side(a)? {
                        cands.push(Point::pair(u, b_max.clone()));
                    }
                }
                if let Some(u) = least_upper_limit(a)? {
                    cands.push(Point::pair(u, b_max));
                }
            }
            least_of(space, cands)
        }
        _ => Err(Error::Unsupported(
            "least limit points are not computed for this shape".into(),
        )),
    }
}

fn least_of(space: &SpaceExpr, cands: Vec<Point>) -> Result<Option<Point>> {
    match pick_least(space, cands)? {
        Discreteness::Discrete => Ok(None),
        Discreteness::NotDiscrete { witness } => Ok(Some(witness)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomeoDecision {
    Yes { reason: String },
    No { reason: String, witness: Option<Point> },
    Unknown { reason: String },
}

/// Decide homeomorphism where the classification theorems reach: compact
/// countable spaces by rank and degree, discrete spaces by cardinality,
/// mismatched pairs by the differing property.
pub fn homeo_decide(x: &SpaceExpr, y: &SpaceExpr) -> Result<HomeoDecision> {
    let cx = is_compact(x)?;
    let cy = is_compact(y)?;
    if cx != cy {
        let (c, n) = if cx { ("left", "right") } else { ("right", "left") };
        return Ok(HomeoDecision::No {
            reason: format!("the {c} space is compact, the {n} space is not"),
            witness: None,
        });
    }
    if cx {
        let mx = match ms_invariant(x) {
            Ok(m) => m,
            Err(Error::Unsupported(msg)) => {
                return Ok(HomeoDecision::Unknown { reason: msg })
            }
            Err(e) => return Err(e),
        };
        let my = match ms_invariant(y) {
            Ok(m) => m,
            Err(Error::Unsupported(msg)) => {
                return Ok(HomeoDecision::Unknown { reason: msg })
            }
            Err(e) => return Err(e),
        };
        return Ok(if mx == my {
            HomeoDecision::Yes {
                reason: format!(
                    "both compact countable with {mx}; the invariant classifies them"
                ),
            }
        } else {
            HomeoDecision::No {
                reason: format!("invariants differ: {mx} against {my}"),
                witness: None,
            }
        });
    }
    let dx = discreteness(x)?;
    let dy = discreteness(y)?;
    match (dx, dy) {
        (Discreteness::Discrete, Discreteness::Discrete) => Ok(HomeoDecision::Yes {
            reason: "both are countably infinite discrete spaces".into(),
        }),
        (Discreteness::Discrete, Discreteness::NotDiscrete { witness }) => {
            Ok(HomeoDecision::No {
                reason: "the right space has a limit point, the left is discrete".into(),
                witness: Some(witness),
            })
        }
        (Discreteness::NotDiscrete { witness }, Discreteness::Discrete) => {
            Ok(HomeoDecision::No {
                reason: "the left space has a limit point, the right is discrete".into(),
                witness: Some(witness),
            })
        }
        (Discreteness::NotDiscrete { .. }, Discreteness::NotDiscrete { .. }) => {
            match (derived_profile(x), derived_profile(y)) {
                (Ok(px), Ok(py)) if px != py => Ok(HomeoDecision::No {
                    reason: format!(
                        "derived-set size profiles differ: {px:?} against {py:?}"
                    ),
                    witness: None,
                }),
                (Ok(_), Ok(_)) => Ok(HomeoDecision::Unknown {
                    reason: "noncompact spaces with matching derived-set profiles are outside the decided classes".into(),
                }),
                _ => Ok(HomeoDecision::Unknown {
                    reason: "no decision procedure applies to this pair".into(),
                }),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SizeClass {
    Empty,
    Finite(u64),
    Infinite,
}

/// Sizes of the first few derived sets; a homeomorphism preserves each.
/// Computed on the position line, which carries the same order topology and
/// never falls outside the banded sets.
fn derived_profile(space: &SpaceExpr) -> Result<Vec<SizeClass>> {
    let t = space.members()?.order_type();
    let mut cur = OrdinalSet::interval(&Ordinal::zero(), &t, Band::all());
    let mut out = Vec::new();
    for _ in 0..3 {
        cur = cur.derived_step();
        out.push(match cur.order_type().as_nat() {
            Some(0) => SizeClass::Empty,
            Some(n) => SizeClass::Finite(n),
            None => SizeClass::Infinite,
        });
    }
    Ok(out)
}

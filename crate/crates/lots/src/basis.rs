//! Basic open sets and shrinking neighborhood families, the raw material
//! for finite continuity certificates.
//!
//! A family at a point p is indexed by a natural number; `at(n+1)` is
//! contained in `at(n)`, p belongs to every member, and on each side where p
//! is approached the bounds move in toward p as the index grows. Bounds come
//! from the exact position arithmetic where the space is well-ordered, and
//! from enumeration at a growing depth otherwise.

use std::cmp::Ordering;

use crate::space::{Point, SpaceExpr};
use crate::topology::{neighbor, Dir, Neighbor};
use crate::{Error, Result};

const APPROACH_BASE_DEPTH: u64 = 3;

/// A basic open set: an order interval with exclusive bounds, or a box.
#[derive(Debug, Clone)]
pub enum Nbhd {
    Interval {
        space: SpaceExpr,
        lo: Option<Point>,
        hi: Option<Point>,
    },
    Rect(Box<Nbhd>, Box<Nbhd>),
}

impl Nbhd {
    pub fn contains(&self, q: &Point) -> Result<bool> {
        match self {
            Nbhd::Interval { space, lo, hi } => {
                if !space.member(q)? {
                    return Ok(false);
                }
                if let Some(l) = lo {
                    if space.cmp_points(l, q)? != Ordering::Less {
                        return Ok(false);
                    }
                }
                if let Some(h) = hi {
                    if space.cmp_points(q, h)? != Ordering::Less {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Nbhd::Rect(a, b) => {
                let Point::Pair(u, v) = q else {
                    return Ok(false);
                };
                Ok(a.contains(u)? && b.contains(v)?)
            }
        }
    }

    /// Members of the neighborhood among points of notation size at most
    /// `depth`.
    pub fn sample(&self, depth: u64) -> Result<Vec<Point>> {
        match self {
            Nbhd::Interval { space, .. } => {
                let mut out = Vec::new();
                for p in space.enumerate(depth)? {
                    if self.contains(&p)? {
                        out.push(p);
                    }
                }
                Ok(out)
            }
            Nbhd::Rect(a, b) => {
                let us = a.sample(depth)?;
                let vs = b.sample(depth)?;
                let mut out = Vec::new();
                for u in &us {
                    for v in &vs {
                        out.push(Point::pair(u.clone(), v.clone()));
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Nbhd::Interval { lo, hi, .. } => {
                let l = lo.as_ref().map_or("min".to_string(), |p| p.to_string());
                let h = hi.as_ref().map_or("max".to_string(), |p| p.to_string());
                format!("({l}, {h})")
            }
            Nbhd::Rect(a, b) => format!("{} x {}", a.describe(), b.describe()),
        }
    }
}

#[derive(Debug, Clone)]
enum SidePlan {
    Unbounded,
    Fixed(Point),
    Approach,
}

#[derive(Debug, Clone)]
enum FamilyKind {
    Order { down: SidePlan, up: SidePlan },
    Box(Box<NbhdFamily>, Box<NbhdFamily>),
}

/// Shrinking family of basic neighborhoods at one point.
#[derive(Debug, Clone)]
pub struct NbhdFamily {
    space: SpaceExpr,
    point: Point,
    kind: FamilyKind,
}

/// The canonical neighborhood family of `p` in `space`.
pub fn family(space: &SpaceExpr, p: &Point) -> Result<NbhdFamily> {
    if let SpaceExpr::Product(a, b) = space {
        let Point::Pair(u, v) = p else {
            return Err(Error::Invalid("expected a pair".into()));
        };
        return Ok(NbhdFamily {
            space: space.clone(),
            point: p.clone(),
            kind: FamilyKind::Box(Box::new(family(a, u)?), Box::new(family(b, v)?)),
        });
    }
    let down = side_plan(space, p, Dir::Down)?;
    let up = side_plan(space, p, Dir::Up)?;
    Ok(NbhdFamily {
        space: space.clone(),
        point: p.clone(),
        kind: FamilyKind::Order { down, up },
    })
}

fn side_plan(space: &SpaceExpr, p: &Point, dir: Dir) -> Result<SidePlan> {
    Ok(match neighbor(space, p, dir)? {
        Neighbor::EndpointSide => SidePlan::Unbounded,
        Neighbor::Immediate(q) => SidePlan::Fixed(q),
        Neighbor::LimitSide => SidePlan::Approach,
    })
}

impl NbhdFamily {
    pub fn point(&self) -> &Point {
        &self.point
    }

    /// Whether every index yields the same neighborhood (the point is
    /// isolated, so the family is a constant singleton).
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            FamilyKind::Order { down, up } => {
                !matches!(down, SidePlan::Approach) && !matches!(up, SidePlan::Approach)
            }
            FamilyKind::Box(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn at(&self, n: u64) -> Result<Nbhd> {
        match &self.kind {
            FamilyKind::Box(a, b) => {
                Ok(Nbhd::Rect(Box::new(a.at(n)?), Box::new(b.at(n)?)))
            }
            FamilyKind::Order { down, up } => {
                let lo = match down {
                    SidePlan::Unbounded => None,
                    SidePlan::Fixed(q) => Some(q.clone()),
                    SidePlan::Approach => {
                        Some(approach(&self.space, &self.point, Dir::Down, n)?)
                    }
                };
                let hi = match up {
                    SidePlan::Unbounded => None,
                    SidePlan::Fixed(q) => Some(q.clone()),
                    SidePlan::Approach => {
                        Some(approach(&self.space, &self.point, Dir::Up, n)?)
                    }
                };
                Ok(Nbhd::Interval { space: self.space.clone(), lo, hi })
            }
        }
    }

    /// Candidate points hugging the center just inside `at(n)`: approach
    /// points at indexes past n on each approaching side, paired through
    /// boxes. Fallback approaches can stall on the boundary, so callers
    /// keep only the candidates the neighborhood actually contains.
    pub fn probe(&self, n: u64, count: u64) -> Result<Vec<Point>> {
        match &self.kind {
            FamilyKind::Order { down, up } => {
                let mut out = Vec::new();
                for (plan, dir) in [(down, Dir::Down), (up, Dir::Up)] {
                    if matches!(plan, SidePlan::Approach) {
                        for k in (n + 1)..=(n + count) {
                            out.push(approach(&self.space, &self.point, dir, k)?);
                        }
                    }
                }
                Ok(out)
            }
            FamilyKind::Box(a, b) => {
                let Point::Pair(u0, v0) = &self.point else {
                    return Err(Error::Invalid("expected a pair".into()));
                };
                let mut xs = a.probe(n, count)?;
                xs.push((**u0).clone());
                let mut ys = b.probe(n, count)?;
                ys.push((**v0).clone());
                let mut out = Vec::new();
                for x in &xs {
                    for y in &ys {
                        let cand = Point::Pair(Box::new(x.clone()), Box::new(y.clone()));
                        if cand != self.point {
                            out.push(cand);
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// A point strictly on the given side of p, moving toward p as n grows.
fn approach(space: &SpaceExpr, p: &Point, dir: Dir, n: u64) -> Result<Point> {
    if dir == Dir::Down {
        // exact route: the canonical sequence under the point's position
        if let Ok(pd) = space.position_of(p) {
            if let Ok(c) = pd.fundamental(n) {
                return space.point_at(&c);
            }
        }
    }
    // fallback: nearest listed point on that side at a growing depth
    let mut best: Option<Point> = None;
    for q in space.enumerate(APPROACH_BASE_DEPTH + n)? {
        let rel = space.cmp_points(&q, p)?;
        let on_side = match dir {
            Dir::Down => rel == Ordering::Less,
            Dir::Up => rel == Ordering::Greater,
        };
        if !on_side {
            continue;
        }
        best = Some(match best {
            None => q,
            Some(b) => {
                let closer = match dir {
                    Dir::Down => space.cmp_points(&q, &b)? == Ordering::Greater,
                    Dir::Up => space.cmp_points(&q, &b)? == Ordering::Less,
                };
                if closer {
                    q
                } else {
                    b
                }
            }
        });
    }
    best.ok_or_else(|| {
        Error::Unsupported("no approaching point found at this enumeration depth".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;
    use crate::space::SubsetSpec;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn po(s: &str) -> Point {
        Point::Ord(o(s))
    }

    fn pp(a: &str, b: &str) -> Point {
        Point::pair_ord(o(a), o(b))
    }

    #[test]
    fn isolated_point_family_is_a_singleton() {
        let x = SpaceExpr::ClosedSeg(o("w*2"));
        let f = family(&x, &po("5")).unwrap();
        assert!(f.is_constant());
        let n = f.at(0).unwrap();
        assert!(n.contains(&po("5")).unwrap());
        assert!(!n.contains(&po("4")).unwrap());
        assert!(!n.contains(&po("6")).unwrap());
        assert_eq!(n.sample(8).unwrap(), vec![po("5")]);
    }

    #[test]
    fn limit_point_family_shrinks() {
        let x = SpaceExpr::ClosedSeg(o("w*2"));
        let f = family(&x, &po("w")).unwrap();
        assert!(!f.is_constant());
        let n3 = f.at(3).unwrap();
        assert!(n3.contains(&po("w")).unwrap());
        assert!(n3.contains(&po("5")).unwrap());
        assert!(!n3.contains(&po("2")).unwrap());
        assert!(!n3.contains(&po("w+1")).unwrap());
        let n9 = f.at(9).unwrap();
        assert!(!n9.contains(&po("5")).unwrap());
        for q in n9.sample(10).unwrap() {
            assert!(n3.contains(&q).unwrap());
        }
    }

    #[test]
    fn box_family_in_a_square() {
        let x = SpaceExpr::product(SpaceExpr::ClosedSeg(o("w")), SpaceExpr::ClosedSeg(o("w")));
        let f = family(&x, &pp("w", "w")).unwrap();
        let n = f.at(2).unwrap();
        assert!(n.contains(&pp("w", "w")).unwrap());
        assert!(n.contains(&pp("5", "w")).unwrap());
        assert!(n.contains(&pp("5", "7")).unwrap());
        assert!(!n.contains(&pp("1", "w")).unwrap());
        let g = family(&x, &pp("3", "w")).unwrap();
        let m = g.at(2).unwrap();
        assert!(m.contains(&pp("3", "5")).unwrap());
        assert!(!m.contains(&pp("4", "5")).unwrap());
    }

    #[test]
    fn corner_family_of_the_kept_top_copy() {
        let amb = SpaceExpr::lex(SpaceExpr::ClosedSeg(o("w")), SpaceExpr::ClosedSeg(o("w")));
        let z = SpaceExpr::sub(amb, SubsetSpec::TopCopyKeepMin);
        let f = family(&z, &pp("w", "0")).unwrap();
        let n3 = f.at(3).unwrap();
        assert!(n3.contains(&pp("w", "0")).unwrap());
        assert!(n3.contains(&pp("5", "2")).unwrap());
        assert!(!n3.contains(&pp("2", "w")).unwrap());
        assert!(!n3.contains(&pp("w", "w")).unwrap());
        let n6 = f.at(6).unwrap();
        assert!(!n6.contains(&pp("5", "2")).unwrap());
    }

    #[test]
    fn junction_family_in_a_sum() {
        let s = SpaceExpr::OrderedSum(vec![
            SpaceExpr::HalfOpenSeg(o("w")),
            SpaceExpr::rev(SpaceExpr::HalfOpenSeg(o("w"))),
        ]);
        let p = Point::at(1, po("0"));
        let f = family(&s, &p).unwrap();
        assert!(f.is_constant());
        let n = f.at(0).unwrap();
        assert!(n.contains(&p).unwrap());
        assert!(!n.contains(&Point::at(1, po("1"))).unwrap());
        assert!(!n.contains(&Point::at(0, po("3"))).unwrap());
    }
}

//! The catalogue of explicit piecewise homeomorphisms between Cartesian and
//! lexicographic squares of layered segments, plus the decomposition and
//! embedding constructions they rest on.
//!
//! Throughout, `I` is the convergent sequence [0, w] and `L` the layered
//! segment [0, w^2], viewed as the sum of clopen blocks `I_0 = [0, w]`,
//! `I_m = [w*m+1, w*(m+1)]` converging to the top point. Every map here
//! splits its domain into vertical and horizontal strips, sends each strip
//! onto one block (or one lexicographic column group), and sends the corner
//! of the square to the single point kept from the top column of the target.
//! Strips with the same orientation land on copies of the same parity, so
//! the two orientations interleave along the target.

use std::fmt;

use crate::ordinal::Ordinal;
use crate::ordset::{Band, OrdinalSet};
use crate::space::{Point, PredicateSpec, SpaceExpr, SubsetSpec};
use crate::{Error, Result};

fn omega() -> Ordinal {
    Ordinal::omega()
}

fn omega_sq() -> Ordinal {
    "w^2".parse().expect("literal")
}

fn nat(n: u64) -> Ordinal {
    Ordinal::from_nat(n)
}

/// First point of block m of the layered segment: 0 for the head block,
/// w*m + 1 after that.
pub fn block_base(m: u64) -> Ordinal {
    if m == 0 {
        Ordinal::zero()
    } else {
        omega().mul(&nat(m)).add(&Ordinal::one())
    }
}

/// Top point of block m: w*(m+1).
pub fn block_top(m: u64) -> Ordinal {
    omega().mul(&nat(m + 1))
}

/// Which block of the layered segment holds y; None for the top point w^2.
pub fn block_index(y: &Ordinal) -> Option<u64> {
    if *y >= omega_sq() {
        return None;
    }
    let (q, r) = y.div_rem(&omega()).expect("division by w");
    let q = q.as_nat().expect("finite quotient below w^2");
    if r.is_zero() && q >= 1 {
        Some(q - 1)
    } else {
        Some(q)
    }
}

/// Offset of y within its block, an element of [0, w].
pub fn block_offset(m: u64, y: &Ordinal) -> Result<Ordinal> {
    Ok(block_base(m).left_sub(y)?)
}

fn seg_omega() -> SpaceExpr {
    SpaceExpr::ClosedSeg(omega())
}

fn layered() -> SpaceExpr {
    SpaceExpr::LGamma(omega())
}

fn seg_at(gamma: &Ordinal) -> SpaceExpr {
    SpaceExpr::ClosedSeg(gamma.clone())
}

fn layered_at(gamma: &Ordinal) -> SpaceExpr {
    SpaceExpr::LGamma(gamma.clone())
}

fn expect_pair_ords(p: &Point) -> Result<(&Ordinal, &Ordinal)> {
    if let Point::Pair(a, b) = p {
        if let (Some(u), Some(v)) = (a.as_ord(), b.as_ord()) {
            return Ok((u, v));
        }
    }
    Err(Error::Invalid(format!("expected a pair of ordinals, got {p}")))
}

// Core formulas, one pair per map. All inputs are assumed to be members of
// the respective source; `PiecewiseMap::apply` checks that first.

/// Square of the convergent sequence onto the trimmed lexicographic square:
/// vertical strip n at or above the diagonal to copy 2n, horizontal strip n
/// below the diagonal to copy 2n+1, corner to the kept point.
fn conv_apply(u: &Ordinal, v: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let w = omega();
    if *u == w && *v == w {
        return Ok((w, Ordinal::zero()));
    }
    if *u < w && u <= v {
        let n = u.as_nat().expect("finite");
        Ok((nat(2 * n), u.left_sub(v)?))
    } else {
        let n = v.as_nat().expect("finite");
        Ok((nat(2 * n + 1), v.succ().left_sub(u)?))
    }
}

fn conv_invert(m: &Ordinal, y: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let w = omega();
    if *m == w {
        return Ok((w.clone(), w));
    }
    let m = m.as_nat().expect("finite copy index");
    let n = m / 2;
    if m % 2 == 0 {
        Ok((nat(n), nat(n).add(y)))
    } else {
        Ok((nat(n + 1).add(y), nat(n)))
    }
}

/// Square of the convergent sequence onto the layered segment: vertical
/// strip n onto block 2n+1, horizontal strip n onto block 2n, corner to the
/// top point.
fn blocks_apply(u: &Ordinal, v: &Ordinal) -> Result<Ordinal> {
    let w = omega();
    if *u == w && *v == w {
        return Ok(omega_sq());
    }
    if *u < w && u <= v {
        let n = u.as_nat().expect("finite");
        Ok(block_base(2 * n + 1).add(&u.left_sub(v)?))
    } else {
        let n = v.as_nat().expect("finite");
        Ok(block_base(2 * n).add(&v.succ().left_sub(u)?))
    }
}

fn blocks_invert(y: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let w = omega();
    let Some(m) = block_index(y) else {
        return Ok((w.clone(), w));
    };
    let j = block_offset(m, y)?;
    let n = m / 2;
    if m % 2 == 1 {
        Ok((nat(n), nat(n).add(&j)))
    } else {
        Ok((nat(n + 1).add(&j), nat(n)))
    }
}

/// Sequence-by-layered rectangle onto its trimmed lexicographic form. The
/// strip over block m (majors from m up) factors through `blocks_apply`
/// onto the even copy 2m; the tail of column n past block n lands on the
/// odd copy 2n+1 by a plain shift.
fn rect_apply(u: &Ordinal, x: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let w = omega();
    let top = omega_sq();
    if *u == w && *x == top {
        return Ok((w, Ordinal::zero()));
    }
    if *u < w {
        let n = u.as_nat().expect("finite");
        if *x >= block_base(n + 1) {
            return Ok((nat(2 * n + 1), block_base(n + 1).left_sub(x)?));
        }
    }
    let m = block_index(x).expect("x below the top point here");
    let p = nat(m).left_sub(u)?;
    let q = block_offset(m, x)?;
    Ok((nat(2 * m), blocks_apply(&p, &q)?))
}

fn rect_invert(m: &Ordinal, y: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let w = omega();
    if *m == w {
        return Ok((w, omega_sq()));
    }
    let m = m.as_nat().expect("finite copy index");
    let n = m / 2;
    if m % 2 == 1 {
        Ok((nat(n), block_base(n + 1).add(y)))
    } else {
        let (p, q) = blocks_invert(y)?;
        Ok((nat(n).add(&p), block_base(n).add(&q)))
    }
}

// Position-level absorption of a w^2-sized tail: a homeomorphism between
// the segments [0, w^3 + w^2] and [0, w^3]. The w^2-chunks below w^3 shift
// up one slot, freeing the first chunk, which then receives the tail above
// w^3 block by block. The two rank-3 points correspond to each other.

fn w3() -> Ordinal {
    "w^3".parse().expect("literal")
}

pub(crate) fn absorb_tail(x: &Ordinal) -> Result<Ordinal> {
    let w = omega();
    let w2 = omega_sq();
    let w3 = w3();
    if *x == w3 {
        return Ok(w3);
    }
    if *x < w3 {
        // shift chunk k of [0, w^3) to chunk k+1
        let (q, r) = x.div_rem(&w2)?;
        let q = q.as_nat().expect("finite chunk index");
        let k = if r.is_zero() && q >= 1 { q - 1 } else { q };
        return Ok(if k == 0 {
            w2.add(&Ordinal::one()).add(x)
        } else {
            let off = w2.mul(&nat(k)).add(&Ordinal::one()).left_sub(x)?;
            w2.mul(&nat(k + 1)).add(&Ordinal::one()).add(&off)
        });
    }
    let y = w3.left_sub(x)?;
    if y == w2 {
        Ok(w2)
    } else if y <= w {
        Ok(Ordinal::one().left_sub(&y)?)
    } else {
        Ok(y)
    }
}

pub(crate) fn absorb_tail_inv(z: &Ordinal) -> Result<Ordinal> {
    let w = omega();
    let w2 = omega_sq();
    let w3 = w3();
    if *z == w3 {
        return Ok(w3);
    }
    if *z == w2 {
        return Ok(w3.add(&w2));
    }
    if *z < w {
        return Ok(w3.add(z).add(&Ordinal::one()));
    }
    if *z == w {
        return Ok(w3.add(&w));
    }
    if *z < w2 {
        return Ok(w3.add(z));
    }
    // chunk k+1 of [0, w^3) came from chunk k
    let (q, r) = z.div_rem(&w2)?;
    let q = q.as_nat().expect("finite chunk index");
    let k = if r.is_zero() && q >= 1 { q - 1 } else { q };
    debug_assert!(k >= 1);
    let off = w2.mul(&nat(k)).add(&Ordinal::one()).left_sub(z)?;
    Ok(if k == 1 {
        off
    } else {
        w2.mul(&nat(k - 1)).add(&Ordinal::one()).add(&off)
    })
}

/// The rectangle map upgraded to land on the full lexicographic rectangle:
/// compose with the position-level tail absorption, which turns the trimmed
/// image into the whole product.
fn rect_full_apply(u: &Ordinal, x: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let (m, y) = rect_apply(u, x)?;
    let z = rect_target(&omega());
    let pos = z.position_of(&Point::pair_ord(m, y))?;
    let full = SpaceExpr::lex(seg_omega(), layered());
    let q = full.point_at(&absorb_tail_inv(&pos)?)?;
    let (a, b) = expect_pair_ords(&q)?;
    Ok((a.clone(), b.clone()))
}

fn rect_full_invert(m: &Ordinal, y: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let full = SpaceExpr::lex(seg_omega(), layered());
    let pos = full.position_of(&Point::pair_ord(m.clone(), y.clone()))?;
    let z = rect_target(&omega());
    let q = z.point_at(&absorb_tail(&pos)?)?;
    let (a, b) = expect_pair_ords(&q)?;
    rect_invert(a, b)
}

/// Square of the layered segment onto its trimmed lexicographic square.
/// The strip of block-n majors against everything past block n goes onto
/// the odd block 2n+1 of major copies; what is left of the strip against
/// block m, the tail of majors from block m on, goes onto the even block
/// 2m. Both kinds factor through the full rectangle map after shifting
/// their tail factor down to a whole layered segment.
fn full_apply(u: &Ordinal, x: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let top = omega_sq();
    if *u == top && *x == top {
        return Ok((top, Ordinal::zero()));
    }
    if *u < top {
        let a = block_index(u).expect("below the top point");
        if *x >= block_base(a + 1) {
            let p = block_offset(a, u)?;
            let t = block_base(a + 1).left_sub(x)?;
            let (q1, q2) = rect_full_apply(&p, &t)?;
            return Ok((block_base(2 * a + 1).add(&q1), q2));
        }
    }
    let m = block_index(x).expect("below the top point here");
    let p = block_offset(m, x)?;
    let tail = block_base(m).left_sub(u)?;
    let (q1, q2) = rect_full_apply(&p, &tail)?;
    Ok((block_base(2 * m).add(&q1), q2))
}

fn full_invert(w_maj: &Ordinal, y: &Ordinal) -> Result<(Ordinal, Ordinal)> {
    let top = omega_sq();
    if *w_maj == top {
        return Ok((top.clone(), top));
    }
    let c = block_index(w_maj).expect("below the top point");
    let q1 = block_offset(c, w_maj)?;
    let (s1, s2) = rect_full_invert(&q1, y)?;
    let n = c / 2;
    if c % 2 == 1 {
        Ok((block_base(n).add(&s1), block_base(n + 1).add(&s2)))
    } else {
        Ok((block_base(n).add(&s2), block_base(n).add(&s1)))
    }
}

fn conv_target(gamma: &Ordinal) -> SpaceExpr {
    SpaceExpr::sub(
        SpaceExpr::lex(seg_at(gamma), seg_at(gamma)),
        SubsetSpec::TopCopyKeepMin,
    )
}

fn rect_target(gamma: &Ordinal) -> SpaceExpr {
    SpaceExpr::sub(
        SpaceExpr::lex(seg_at(gamma), layered_at(gamma)),
        SubsetSpec::TopCopyKeepMin,
    )
}

fn full_target(gamma: &Ordinal) -> SpaceExpr {
    SpaceExpr::sub(
        SpaceExpr::lex(layered_at(gamma), layered_at(gamma)),
        SubsetSpec::TopCopyKeepMin,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MapKind {
    ConvSeq,
    Blocks,
    Rect,
    Full,
}

/// An explicit piecewise homeomorphism from the catalogue, evaluable point
/// by point in both directions.
///
/// Maps are declared at a layer width `gamma`; the spaces and strip shapes
/// make sense for any countable gamma, but pointwise evaluation needs a
/// finitary enumeration, so it is implemented only at gamma = w.
#[derive(Debug, Clone)]
pub struct PiecewiseMap {
    id: &'static str,
    source: SpaceExpr,
    target: SpaceExpr,
    kind: MapKind,
    gamma: Ordinal,
    /// The images of these two points are exchanged.
    swap: Option<(Point, Point)>,
}

/// Summary of one strip family of a map, for reports.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PieceInfo {
    pub name: String,
    pub domain: String,
    pub image: String,
}

impl PiecewiseMap {
    pub fn id(&self) -> &'static str {
        self.id
    }

    pub fn source(&self) -> &SpaceExpr {
        &self.source
    }

    pub fn target(&self) -> &SpaceExpr {
        &self.target
    }

    pub fn gamma(&self) -> &Ordinal {
        &self.gamma
    }

    fn need_omega(&self) -> Result<()> {
        if self.gamma == omega() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "the {} construction is declared at gamma = {}; pointwise \
                 evaluation is implemented only at gamma = w, since larger \
                 layers have no finite exhaustion",
                self.id, self.gamma
            )))
        }
    }

    /// A copy that exchanges the images of `a` and `b`. Still a bijection,
    /// but continuity near a swapped limit is torn; this feeds the
    /// certifier maps that must fail.
    pub fn transposed(&self, a: Point, b: Point) -> PiecewiseMap {
        PiecewiseMap {
            swap: Some((a, b)),
            ..self.clone()
        }
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        self.need_omega()?;
        if !self.source.member(p)? {
            return Err(Error::NotAMember { point: p.to_string() });
        }
        let p = match &self.swap {
            Some((a, b)) if p == a => b,
            Some((a, b)) if p == b => a,
            _ => p,
        };
        let (u, v) = expect_pair_ords(p)?;
        Ok(match self.kind {
            MapKind::ConvSeq => {
                let (a, b) = conv_apply(u, v)?;
                Point::pair_ord(a, b)
            }
            MapKind::Blocks => Point::Ord(blocks_apply(u, v)?),
            MapKind::Rect => {
                let (a, b) = rect_apply(u, v)?;
                Point::pair_ord(a, b)
            }
            MapKind::Full => {
                let (a, b) = full_apply(u, v)?;
                Point::pair_ord(a, b)
            }
        })
    }

    pub fn invert(&self, q: &Point) -> Result<Point> {
        self.need_omega()?;
        if !self.target.member(q)? {
            return Err(Error::NotAMember { point: q.to_string() });
        }
        let x = self.invert_raw(q)?;
        Ok(match &self.swap {
            Some((a, b)) if x == *a => b.clone(),
            Some((a, b)) if x == *b => a.clone(),
            _ => x,
        })
    }

    fn invert_raw(&self, q: &Point) -> Result<Point> {
        Ok(match self.kind {
            MapKind::Blocks => {
                let y = q
                    .as_ord()
                    .ok_or_else(|| Error::Invalid("expected an ordinal".into()))?;
                let (a, b) = blocks_invert(y)?;
                Point::pair_ord(a, b)
            }
            MapKind::ConvSeq => {
                let (m, y) = expect_pair_ords(q)?;
                let (a, b) = conv_invert(m, y)?;
                Point::pair_ord(a, b)
            }
            MapKind::Rect => {
                let (m, y) = expect_pair_ords(q)?;
                let (a, b) = rect_invert(m, y)?;
                Point::pair_ord(a, b)
            }
            MapKind::Full => {
                let (m, y) = expect_pair_ords(q)?;
                let (a, b) = full_invert(m, y)?;
                Point::pair_ord(a, b)
            }
        })
    }

    /// The top corner of the source box, the one point every strip family
    /// accumulates at.
    pub fn corner(&self) -> Result<Point> {
        let SpaceExpr::Product(a, b) = &self.source else {
            return Err(Error::Invalid("the source is not a box".into()));
        };
        match (a.max_point()?, b.max_point()?) {
            (Some(x), Some(y)) => Ok(Point::pair(x, y)),
            _ => Err(Error::Invalid("the source has no top corner".into())),
        }
    }

    /// Least possible image, in target order, over all points other than
    /// the corner in the box with strict lower bounds `lo1` x `lo2`.
    ///
    /// Each strip formula is monotone in its strip index and sends the
    /// index to the image major, so the floor is set by the lowest strip
    /// the box still meets. This turns the corner continuity check into a
    /// single order comparison per neighborhood instead of a point sweep.
    pub fn corner_floor(&self, lo1: &Point, lo2: &Point) -> Result<Point> {
        self.need_omega()?;
        let fin = |p: &Point| -> Result<u64> {
            p.as_ord()
                .and_then(|o| o.as_nat())
                .ok_or_else(|| Error::Unsupported(format!("bound {p} is not finite")))
        };
        let quot = |p: &Point| -> Result<u64> {
            let o = p
                .as_ord()
                .ok_or_else(|| Error::Unsupported(format!("bound {p} is not an ordinal")))?;
            let (q, _) = o.div_rem(&omega())?;
            q.as_nat()
                .ok_or_else(|| Error::Unsupported(format!("bound {p} is too high")))
        };
        Ok(match self.kind {
            // verticals with u > a have major 2u >= 2a+2, horizontals
            // with v > b have major 2v+1 >= 2b+3
            MapKind::ConvSeq => {
                let (a, b) = (fin(lo1)?, fin(lo2)?);
                Point::pair_ord(nat((2 * a + 2).min(2 * b + 3)), nat(0))
            }
            // same strips, landing at block_base(2u+1) and block_base(2v)
            MapKind::Blocks => {
                let (a, b) = (fin(lo1)?, fin(lo2)?);
                Point::Ord(block_base((2 * a + 3).min(2 * b + 2)))
            }
            // tails with u > a start at major 2u+1; strips need their
            // block to meet (lo2, top], so the strip index is at least
            // the omega-quotient of lo2
            MapKind::Rect => {
                let (a, b) = (fin(lo1)?, quot(lo2)?);
                Point::pair_ord(nat((2 * a + 3).min(2 * b)), nat(0))
            }
            // both coordinates now live in blocks; tails start at
            // block_base(2*block+1), strips at block_base(2*block)
            MapKind::Full => {
                let (a, b) = (quot(lo1)?, quot(lo2)?);
                Point::pair_ord(block_base((2 * a + 1).min(2 * b)), nat(0))
            }
        })
    }

    /// Name of the strip family the point falls in.
    pub fn piece_name(&self, p: &Point) -> Result<String> {
        if !self.source.member(p)? {
            return Err(Error::NotAMember { point: p.to_string() });
        }
        let (u, v) = expect_pair_ords(p)?;
        let w = omega();
        let top = omega_sq();
        Ok(match self.kind {
            MapKind::ConvSeq | MapKind::Blocks => {
                if *u == w && *v == w {
                    "corner".into()
                } else if *u < w && u <= v {
                    format!("vertical({u})")
                } else {
                    format!("horizontal({v})")
                }
            }
            MapKind::Rect => {
                if *u == w && *v == top {
                    "corner".into()
                } else if *u < w && *v >= block_base(u.as_nat().expect("finite") + 1) {
                    format!("tail({u})")
                } else {
                    format!("strip({})", block_index(v).expect("in a block"))
                }
            }
            MapKind::Full => {
                if *u == top && *v == top {
                    "corner".into()
                } else if *u < top
                    && *v >= block_base(block_index(u).expect("below top") + 1)
                {
                    format!("tail({})", block_index(u).expect("below top"))
                } else {
                    format!("strip({})", block_index(v).expect("in a block"))
                }
            }
        })
    }

    pub fn pieces(&self) -> Vec<PieceInfo> {
        let info = |name: &str, domain: &str, image: &str| PieceInfo {
            name: name.into(),
            domain: domain.into(),
            image: image.into(),
        };
        match self.kind {
            MapKind::ConvSeq => vec![
                info("vertical(n)", "{(n, k): n <= k <= w}", "copy 2n of [0, w]"),
                info("horizontal(n)", "{(k, n): n < k <= w}", "copy 2n+1 of [0, w]"),
                info("corner", "{(w, w)}", "the kept point (w, 0)"),
            ],
            MapKind::Blocks => vec![
                info("vertical(n)", "{(n, k): n <= k <= w}", "block 2n+1 of [0, w^2]"),
                info("horizontal(n)", "{(k, n): n < k <= w}", "block 2n of [0, w^2]"),
                info("corner", "{(w, w)}", "the top point w^2"),
            ],
            MapKind::Rect => vec![
                info(
                    "strip(m)",
                    "[m, w] x block m",
                    "copy 2m of [0, w^2], through the block square map",
                ),
                info("tail(n)", "{n} x [w*(n+1)+1, w^2]", "copy 2n+1 of [0, w^2]"),
                info("corner", "{(w, w^2)}", "the kept point (w, 0)"),
            ],
            MapKind::Full => vec![
                info(
                    "strip(m)",
                    "[0, w^2] x block m",
                    "majors in block 2m, through the rectangle map",
                ),
                info(
                    "tail(n)",
                    "block n x [w*(n+1)+1, w^2]",
                    "majors in block 2n+1, through the rectangle map",
                ),
                info("corner", "{(w^2, w^2)}", "the kept point (w^2, 0)"),
            ],
        }
    }
}

impl fmt::Display for PiecewiseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.id, self.source, self.target)
    }
}

/// [0,g] x [0,g] onto the lexicographic square with the top copy trimmed
/// to its first point.
pub fn conv_square_map_at(gamma: Ordinal) -> PiecewiseMap {
    PiecewiseMap {
        id: "convseq",
        source: SpaceExpr::product(seg_at(&gamma), seg_at(&gamma)),
        target: conv_target(&gamma),
        kind: MapKind::ConvSeq,
        gamma,
        swap: None,
    }
}

pub fn conv_square_map() -> PiecewiseMap {
    conv_square_map_at(omega())
}

/// [0,g] x [0,g] onto the layered segment.
pub fn block_square_map_at(gamma: Ordinal) -> PiecewiseMap {
    PiecewiseMap {
        id: "lgamma-square",
        source: SpaceExpr::product(seg_at(&gamma), seg_at(&gamma)),
        target: layered_at(&gamma),
        kind: MapKind::Blocks,
        gamma,
        swap: None,
    }
}

pub fn block_square_map() -> PiecewiseMap {
    block_square_map_at(omega())
}

/// [0,g] x layered onto the trimmed lexicographic rectangle.
pub fn rect_map_at(gamma: Ordinal) -> PiecewiseMap {
    PiecewiseMap {
        id: "lgamma-rect",
        source: SpaceExpr::product(seg_at(&gamma), layered_at(&gamma)),
        target: rect_target(&gamma),
        kind: MapKind::Rect,
        gamma,
        swap: None,
    }
}

pub fn rect_map() -> PiecewiseMap {
    rect_map_at(omega())
}

/// layered x layered onto the trimmed lexicographic square of the layered
/// segment.
pub fn full_square_map_at(gamma: Ordinal) -> PiecewiseMap {
    PiecewiseMap {
        id: "lgamma-full",
        source: SpaceExpr::product(layered_at(&gamma), layered_at(&gamma)),
        target: full_target(&gamma),
        kind: MapKind::Full,
        gamma,
        swap: None,
    }
}

pub fn full_square_map() -> PiecewiseMap {
    full_square_map_at(omega())
}

pub fn catalogue() -> Vec<PiecewiseMap> {
    vec![conv_square_map(), block_square_map(), rect_map(), full_square_map()]
}

pub fn map_by_id(id: &str) -> Option<PiecewiseMap> {
    map_by_id_at(id, omega())
}

pub fn map_by_id_at(id: &str, gamma: Ordinal) -> Option<PiecewiseMap> {
    match id {
        "convseq" => Some(conv_square_map_at(gamma)),
        "lgamma-square" => Some(block_square_map_at(gamma)),
        "lgamma-rect" => Some(rect_map_at(gamma)),
        "lgamma-full" => Some(full_square_map_at(gamma)),
        _ => None,
    }
}

// Decomposing a set-of-ordinals space into clopen single-limit intervals
// plus a discrete rest, the shape every space embeddable over a block
// structure must have.

/// Splitting of a carrier-shaped space into clopen intervals around its
/// limit points, each holding exactly one limit, plus the discrete tail.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub limit_points: Vec<Ordinal>,
    /// One carrier per limit point, in order; the limit is its maximum.
    pub pieces: Vec<OrdinalSet>,
    /// Members above the last limit point.
    pub discrete_rest: OrdinalSet,
}

impl Decomposition {
    pub fn piece_exprs(&self) -> Vec<SpaceExpr> {
        self.pieces.iter().cloned().map(SpaceExpr::Carrier).collect()
    }
}

#[derive(Debug, Clone)]
pub enum ClassCheck {
    InClass(Decomposition),
    /// The space has no such splitting; the witness breaks it.
    NotInClass { witness: Ordinal, reason: String },
}

/// Split a space into single-limit clopen intervals and a discrete rest,
/// or exhibit a point around which no such splitting can exist. Needs the
/// space to have a plain set of ordinals as carrier, with finitely many
/// limit members.
///
/// Limits are read off the member positions, not the member values: a
/// member is a limit point of the subspace exactly when infinitely many
/// members precede it, and the splitting cuts after each such member.
pub fn decompose(space: &SpaceExpr) -> Result<ClassCheck> {
    let m = space.members()?;
    let tau = m.order_type();
    let w = Ordinal::omega();
    let w2 = w.mul(&w);
    if w2 < tau {
        // the member at position w^2 has limit members cofinally below it
        let witness = m.nth(&w2).expect("position below the type");
        return Ok(ClassCheck::NotInClass {
            witness,
            reason: "a limit of limit members has no neighborhood with a single limit"
                .into(),
        });
    }
    if tau == w2 {
        return Err(Error::Unsupported(
            "decomposition needs finitely many limit members".into(),
        ));
    }
    // tau = w*k + r with k, r finite; limit positions are w, w*2, ..
    let (k, r) = tau.div_rem(&w)?;
    let k = k.as_nat().expect("quotient of a type below w^2");
    let cuts = if r.is_zero() { k.saturating_sub(1) } else { k };
    let mut lims = Vec::with_capacity(cuts as usize);
    for i in 1..=cuts {
        let pos = w.mul(&Ordinal::from(i));
        lims.push(m.nth(&pos).expect("position below the type"));
    }
    let mut pieces = Vec::with_capacity(lims.len());
    let mut lo = Ordinal::zero();
    for l in &lims {
        let piece = m.intersect(&OrdinalSet::interval(&lo, &l.succ(), Band::all()));
        debug_assert_eq!(piece.order_type(), w.succ());
        lo = l.succ();
        pieces.push(piece);
    }
    let covered = pieces
        .iter()
        .fold(OrdinalSet::empty(), |acc, p| acc.union(p));
    let rest = m.minus(&covered);
    debug_assert!(rest.order_type() <= w);
    Ok(ClassCheck::InClass(Decomposition {
        limit_points: lims,
        pieces,
        discrete_rest: rest,
    }))
}

/// An embedding of a decomposable space into the layered segment: piece i
/// fills block 2i+1 wholesale, the j-th leftover isolated member sits at
/// the first point of block 2j.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub source: SpaceExpr,
    pub target: SpaceExpr,
    pub decomposition: Decomposition,
}

impl Embedding {
    /// Where piece i lands.
    pub fn block_of_piece(&self, i: usize) -> u64 {
        2 * (i as u64) + 1
    }

    pub fn apply(&self, x: &Ordinal) -> Result<Ordinal> {
        for (i, piece) in self.decomposition.pieces.iter().enumerate() {
            if piece.member(x) {
                let p = piece.type_below(x);
                return Ok(block_base(2 * (i as u64) + 1).add(&p));
            }
        }
        let rest = &self.decomposition.discrete_rest;
        if rest.member(x) {
            let j = rest
                .type_below(x)
                .as_nat()
                .ok_or_else(|| {
                    Error::Unsupported(
                        "the leftover discrete part must have type at most w".into(),
                    )
                })?;
            return Ok(block_base(2 * j));
        }
        Err(Error::NotAMember { point: x.to_string() })
    }

    /// The member mapped to y, or None when y is outside the image.
    pub fn preimage(&self, y: &Ordinal) -> Result<Option<Ordinal>> {
        let Some(c) = block_index(y) else {
            return Ok(None);
        };
        let off = block_offset(c, y)?;
        if c % 2 == 1 {
            let i = (c as usize - 1) / 2;
            let Some(piece) = self.decomposition.pieces.get(i) else {
                return Ok(None);
            };
            Ok(piece.nth(&off))
        } else {
            if !off.is_zero() {
                return Ok(None);
            }
            let j = nat(c / 2);
            Ok(self.decomposition.discrete_rest.nth(&j))
        }
    }
}

/// Embed a decomposable space into the layered segment over w.
pub fn embed_in_layered(space: &SpaceExpr) -> Result<Embedding> {
    let deco = match decompose(space)? {
        ClassCheck::InClass(d) => d,
        ClassCheck::NotInClass { witness, reason } => {
            return Err(Error::Unsupported(format!(
                "no embedding around {witness}: {reason}"
            )));
        }
    };
    for piece in &deco.pieces {
        // a piece fills its block exactly when it is a convergent sequence
        if piece.order_type() != omega().succ() {
            return Err(Error::Unsupported(
                "each piece must be a convergent sequence with its limit".into(),
            ));
        }
    }
    Ok(Embedding {
        source: SpaceExpr::Carrier(space.members()?),
        target: layered(),
        decomposition: deco,
    })
}

/// The two-run demonstration space before rearranging: the isolated points
/// of [0, w*2]. Ambient topology makes it discrete, its own order topology
/// does not (w+1 loses its left neighbor with w gone).
pub fn two_block_space() -> SpaceExpr {
    SpaceExpr::omit(
        SpaceExpr::ClosedSeg(omega().mul(&nat(2))),
        PredicateSpec::LimitInAmbient,
    )
}

/// Fixture for the block-reorder demonstrations: the two runs of
/// `two_block_space` rearranged so that order topology and ambient
/// topology agree.
pub fn zlike_space() -> SpaceExpr {
    SpaceExpr::reorder(two_block_space())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn pp(a: &str, b: &str) -> Point {
        Point::pair_ord(o(a), o(b))
    }

    #[test]
    fn conv_map_values() {
        let f = conv_square_map();
        assert_eq!(f.apply(&pp("3", "7")).unwrap(), pp("6", "4"));
        assert_eq!(f.apply(&pp("7", "3")).unwrap(), pp("7", "3"));
        assert_eq!(f.apply(&pp("5", "w")).unwrap(), pp("10", "w"));
        assert_eq!(f.apply(&pp("w", "5")).unwrap(), pp("11", "w"));
        assert_eq!(f.apply(&pp("w", "w")).unwrap(), pp("w", "0"));
        assert_eq!(f.piece_name(&pp("3", "7")).unwrap(), "vertical(3)");
        assert_eq!(f.piece_name(&pp("7", "3")).unwrap(), "horizontal(3)");
        assert!(f.apply(&pp("w+1", "0")).is_err());
    }

    #[test]
    fn blocks_map_values() {
        let f = block_square_map();
        assert_eq!(f.apply(&pp("0", "0")).unwrap(), Point::Ord(o("w+1")));
        assert_eq!(f.apply(&pp("1", "0")).unwrap(), Point::Ord(o("0")));
        assert_eq!(f.apply(&pp("w", "0")).unwrap(), Point::Ord(o("w")));
        assert_eq!(f.apply(&pp("0", "w")).unwrap(), Point::Ord(o("w*2")));
        assert_eq!(f.apply(&pp("w", "w")).unwrap(), Point::Ord(o("w^2")));
        assert_eq!(f.apply(&pp("2", "5")).unwrap(), Point::Ord(o("w*5+4")));
    }

    #[test]
    fn round_trips_on_samples() {
        for f in catalogue() {
            let pts = f.source().enumerate(5).unwrap();
            assert!(pts.len() >= 25, "{} sample too small", f.id());
            for p in pts {
                let q = f.apply(&p).unwrap();
                assert!(
                    f.target().member(&q).unwrap(),
                    "{}: image {q} of {p} outside the target",
                    f.id()
                );
                let back = f.invert(&q).unwrap();
                assert_eq!(back, p, "{}: round trip failed at {p}", f.id());
            }
            for q in f.target().enumerate(5).unwrap() {
                let p = f.invert(&q).unwrap();
                assert!(f.source().member(&p).unwrap());
                assert_eq!(f.apply(&p).unwrap(), q, "{}: co-round trip at {q}", f.id());
            }
        }
    }

    #[test]
    fn absorption_is_a_position_bijection() {
        let w3v = o("w^3");
        let samples = [
            "0", "1", "17", "w", "w+3", "w*4", "w*4+9", "w^2", "w^2+1", "w^2+w",
            "w^2*3+w*2+5", "w^3",
        ];
        for s in samples {
            let x = o(s);
            let z = absorb_tail(&x).unwrap();
            assert!(z <= w3v);
            assert_eq!(absorb_tail_inv(&z).unwrap(), x, "round trip at {s}");
        }
        // tail points fold into the freed first chunk
        assert_eq!(absorb_tail(&o("w^3+3")).unwrap(), o("2"));
        assert_eq!(absorb_tail(&o("w^3+w")).unwrap(), o("w"));
        assert_eq!(absorb_tail(&o("w^3+w*2+1")).unwrap(), o("w*2+1"));
        assert_eq!(absorb_tail(&o("w^3+w^2")).unwrap(), o("w^2"));
        assert_eq!(absorb_tail(&o("5")).unwrap(), o("w^2+6"));
        assert_eq!(absorb_tail(&o("w^3")).unwrap(), o("w^3"));
        for s in ["w^3+1", "w^3+w", "w^3+w*5+2", "w^3+w^2"] {
            let x = o(s);
            let z = absorb_tail(&x).unwrap();
            assert_eq!(absorb_tail_inv(&z).unwrap(), x);
        }
    }

    #[test]
    fn rect_map_values() {
        let f = rect_map();
        assert_eq!(f.apply(&pp("0", "w+1")).unwrap(), pp("1", "0"));
        assert_eq!(f.apply(&pp("0", "w^2")).unwrap(), pp("1", "w^2"));
        assert_eq!(f.apply(&pp("3", "0")).unwrap(), pp("0", "2"));
        assert_eq!(f.apply(&pp("w", "w^2")).unwrap(), pp("w", "0"));
        assert_eq!(f.piece_name(&pp("0", "w+1")).unwrap(), "tail(0)");
        assert_eq!(f.piece_name(&pp("3", "0")).unwrap(), "strip(0)");
    }

    #[test]
    fn decompose_splits_clean_segments() {
        let x = SpaceExpr::ClosedSeg(o("w*3"));
        let ClassCheck::InClass(d) = decompose(&x).unwrap() else {
            panic!("should decompose");
        };
        assert_eq!(d.limit_points, vec![o("w"), o("w*2"), o("w*3")]);
        assert_eq!(d.pieces.len(), 3);
        assert_eq!(d.pieces[1].first().unwrap(), o("w+1"));
        assert_eq!(d.pieces[1].order_type(), o("w+1"));
        assert!(d.pieces[1].member(&o("w*2")));
        assert!(d.discrete_rest.is_empty());

        let discrete = SpaceExpr::HalfOpenSeg(o("w"));
        let ClassCheck::InClass(d) = decompose(&discrete).unwrap() else {
            panic!("discrete spaces split trivially");
        };
        assert!(d.pieces.is_empty());
        assert_eq!(d.discrete_rest.order_type(), o("w"));
    }

    #[test]
    fn decompose_rejects_stacked_and_lopsided_limits() {
        // a limit of limits
        let x = SpaceExpr::ClosedSeg(o("w^2"));
        let ClassCheck::NotInClass { witness, .. } = decompose(&x).unwrap() else {
            panic!("w^2 is approached by limits");
        };
        assert_eq!(witness, o("w^2"));

        // two limit values, but every block boundary is a limit position,
        // so the top member still sits above infinitely many limit points
        let succs = OrdinalSet::interval(
            &o("0"),
            &o("w^2"),
            crate::ordset::Band::below(Ordinal::one()),
        );
        let m = succs.union(&OrdinalSet::points([o("w"), o("w^2")]));
        let ClassCheck::NotInClass { witness, .. } =
            decompose(&SpaceExpr::Carrier(m.clone())).unwrap()
        else {
            panic!("the top member caps a tower of limits");
        };
        assert_eq!(witness, o("w^2"));

        // drop the top and the limit points no longer fit a finite split
        let open = m.minus(&OrdinalSet::points([o("w^2")]));
        assert!(decompose(&SpaceExpr::Carrier(open)).is_err());
    }

    #[test]
    fn embedding_round_trips_and_respects_blocks() {
        let x = SpaceExpr::ClosedSeg(o("w*2"));
        let e = embed_in_layered(&x).unwrap();
        assert_eq!(e.apply(&o("5")).unwrap(), o("w+6"));
        assert_eq!(e.apply(&o("w")).unwrap(), o("w*2"));
        assert_eq!(e.apply(&o("w+3")).unwrap(), o("w*3+3"));
        assert_eq!(e.apply(&o("w*2")).unwrap(), o("w*4"));
        for s in ["0", "3", "w", "w+1", "w+17", "w*2"] {
            let y = e.apply(&o(s)).unwrap();
            assert_eq!(e.preimage(&y).unwrap(), Some(o(s)), "round trip at {s}");
        }
        assert_eq!(e.preimage(&o("w*2+1")).unwrap(), None);

        // finite tail after the limit goes to the leftover blocks
        let x = SpaceExpr::ClosedSeg(o("w+2"));
        let e = embed_in_layered(&x).unwrap();
        assert_eq!(e.apply(&o("0")).unwrap(), o("w+1"));
        assert_eq!(e.apply(&o("w")).unwrap(), o("w*2"));
        assert_eq!(e.apply(&o("w+1")).unwrap(), o("0"));
        assert_eq!(e.apply(&o("w+2")).unwrap(), o("w*2+1"));

        // leftover isolated members take the even blocks
        let m = OrdinalSet::interval(&o("0"), &o("w+1"), crate::ordset::Band::all())
            .union(&OrdinalSet::points([o("w+1"), o("w+2"), o("w+3")]));
        let e = embed_in_layered(&SpaceExpr::Carrier(m)).unwrap();
        assert_eq!(e.apply(&o("w+1")).unwrap(), o("0"));
        assert_eq!(e.apply(&o("w+2")).unwrap(), o("w*2+1"));
        assert_eq!(e.apply(&o("w+3")).unwrap(), o("w*4+1"));
        assert_eq!(e.preimage(&o("w*2+1")).unwrap(), Some(o("w+2")));
        assert_eq!(e.preimage(&o("w*2+2")).unwrap(), None);
    }

    #[test]
    fn full_map_hits_limit_columns() {
        let f = full_square_map();
        // the corner of a strip factor lands on a limit major with the
        // whole layered segment behind it
        let q = f.apply(&pp("w^2", "w")).unwrap();
        let (maj, _) = match &q {
            Point::Pair(a, b) => (a.as_ord().unwrap(), b.as_ord().unwrap()),
            _ => panic!(),
        };
        assert_eq!(*maj, o("w"), "strip(0) corner should reach the top of block 0");
        assert_eq!(f.apply(&pp("w^2", "w^2")).unwrap(), pp("w^2", "0"));
        assert_eq!(f.invert(&pp("w^2", "0")).unwrap(), pp("w^2", "w^2"));
    }
}

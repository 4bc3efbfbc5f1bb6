//! Finite certification of point maps between spaces: sampled bijection
//! checks, neighborhood-filter continuity checks, and an invariant
//! cross-check, gathered into a serializable certificate.
//!
//! The continuity check is the executable reading of the filter condition:
//! at a checkpoint p, every tail of the neighborhood family at f(p) must
//! swallow the image of some tail of the family at p. At the corner where
//! all strips accumulate the inclusion is settled symbolically from the
//! strip formulas; everywhere else finitely many family indexes and sample
//! points are inspected. A pass certifies the sampled approximation, while
//! any recorded failure is a genuine counterexample.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::basis::{self, Nbhd};
use crate::construct::PiecewiseMap;
use crate::ordinal::Ordinal;
use crate::space::{Point, SpaceExpr};
use crate::topology::{self, MsInvariant};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct CheckConfig {
    /// Enumeration depth for sample points.
    pub depth: u64,
    /// How many neighborhood indexes of the target family to match.
    pub n_max: u64,
    /// Largest source family index tried per target index.
    pub search_cap: u64,
    /// Most checkpoints per direction.
    pub max_checkpoints: usize,
}

impl Default for CheckConfig {
    fn default() -> CheckConfig {
        CheckConfig { depth: 5, n_max: 8, search_cap: 24, max_checkpoints: 24 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Depths {
    pub k: u64,
    pub n_max: u64,
}

/// Outcome of the two-sided point sweep. Any point that breaks injectivity,
/// lands outside the claimed range, or fails a round trip is recorded.
#[derive(Debug, Clone, Serialize)]
pub struct BijectionReport {
    pub checked: usize,
    pub orphans: Vec<String>,
}

/// One checkpoint's filter comparison. `matched` pairs a target family
/// index with the source index whose image fits inside it.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuityRow {
    pub point: String,
    pub direction: &'static str,
    pub n_max: u64,
    pub mode: &'static str,
    pub pass: bool,
    pub matched: Vec<(u64, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Independent cross-check: the rank and degree of both sides, which a
/// homeomorphism must preserve.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub invariant_src: Option<MsInvariant>,
    pub invariant_tgt: Option<MsInvariant>,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub id: String,
    pub source: String,
    pub target: String,
    pub depths: Depths,
    pub bijection: BijectionReport,
    pub continuity: Vec<ContinuityRow>,
    pub oracle: OracleReport,
    pub pass: bool,
}

/// Match the neighborhood filters of f at checkpoint p by sampling.
pub(crate) fn sampled_row<F>(
    source: &SpaceExpr,
    target: &SpaceExpr,
    mut f: F,
    p: &Point,
    direction: &'static str,
    cfg: &CheckConfig,
) -> Result<ContinuityRow>
where
    F: FnMut(&Point) -> Result<Point>,
{
    let fam_p = basis::family(source, p)?;
    let q = f(p)?;
    let fam_q = basis::family(target, &q)?;
    let mut row = ContinuityRow {
        point: p.to_string(),
        direction,
        n_max: cfg.n_max,
        mode: "sampled",
        pass: true,
        matched: Vec::new(),
        failure: None,
    };
    for n in 0..cfg.n_max {
        let v = fam_q.at(n)?;
        let mut hit = None;
        for m in 0..=cfg.search_cap {
            let u = fam_p.at(m)?;
            let mut pts: BTreeSet<Point> = u.sample(cfg.depth)?.into_iter().collect();
            for cand in fam_p.probe(m, cfg.depth)? {
                if u.contains(&cand)? {
                    pts.insert(cand);
                }
            }
            pts.insert(p.clone());
            let mut inside = true;
            for x in &pts {
                if !v.contains(&f(x)?)? {
                    inside = false;
                    break;
                }
            }
            if inside {
                hit = Some(m);
                break;
            }
        }
        match hit {
            Some(m) => row.matched.push((n, m)),
            None => {
                row.pass = false;
                row.failure = Some(format!(
                    "no neighborhood of {p} maps into index {n} around {q}"
                ));
                return Ok(row);
            }
        }
    }
    Ok(row)
}

/// Settle the corner checkpoint symbolically: every target neighborhood is
/// an upward ray, and the strip formulas give a floor below which no image
/// from a small enough box can fall, so inclusion is one order comparison.
/// Returns None when the families are not shaped for this argument.
fn symbolic_corner_row(
    map: &PiecewiseMap,
    corner: &Point,
    cfg: &CheckConfig,
) -> Result<Option<ContinuityRow>> {
    let fam_p = basis::family(map.source(), corner)?;
    let top = map.apply(corner)?;
    let fam_q = basis::family(map.target(), &top)?;
    let mut row = ContinuityRow {
        point: corner.to_string(),
        direction: "forward",
        n_max: cfg.n_max,
        mode: "symbolic",
        pass: true,
        matched: Vec::new(),
        failure: None,
    };
    for n in 0..cfg.n_max {
        let Nbhd::Interval { lo: Some(vlo), hi: None, .. } = fam_q.at(n)? else {
            return Ok(None);
        };
        let mut hit = None;
        for m in 0..=cfg.search_cap {
            let Nbhd::Rect(s1, s2) = fam_p.at(m)? else {
                return Ok(None);
            };
            let (
                Nbhd::Interval { lo: Some(l1), .. },
                Nbhd::Interval { lo: Some(l2), .. },
            ) = (s1.as_ref(), s2.as_ref())
            else {
                return Ok(None);
            };
            let floor = map.corner_floor(l1, l2)?;
            if map.target().cmp_points(&floor, &vlo)? == Ordering::Greater {
                hit = Some(m);
                break;
            }
        }
        match hit {
            Some(m) => row.matched.push((n, m)),
            None => {
                row.pass = false;
                row.failure = Some(format!(
                    "no box at {corner} keeps its image floor above index {n}"
                ));
                return Ok(Some(row));
            }
        }
    }
    Ok(Some(row))
}

fn checkpoints(
    space: &SpaceExpr,
    first: &Point,
    pts: &[Point],
    cap: usize,
) -> Result<Vec<Point>> {
    let mut out = vec![first.clone()];
    for p in pts {
        if p != first && !topology::is_isolated(space, p)? {
            out.push(p.clone());
            if out.len() == cap {
                break;
            }
        }
    }
    Ok(out)
}

fn oracle_report(source: &SpaceExpr, target: &SpaceExpr) -> Result<OracleReport> {
    let side = |s: &SpaceExpr| -> Result<Option<MsInvariant>> {
        if topology::is_compact(s)? {
            Ok(Some(topology::ms_invariant(s)?))
        } else {
            Ok(None)
        }
    };
    let invariant_src = side(source)?;
    let invariant_tgt = side(target)?;
    let equal = match (&invariant_src, &invariant_tgt) {
        (Some(a), Some(b)) => a == b,
        (None, None) => true,
        _ => false,
    };
    Ok(OracleReport { invariant_src, invariant_tgt, equal })
}

/// Certify a catalogue map: sampled bijectivity both ways, filter matching
/// at every non-isolated sample point in both directions, and agreement of
/// the rank and degree invariants. Mathematical failures land in the
/// certificate; only structural problems (such as a layer width with no
/// finite exhaustion) abort it.
pub fn certify(map: &PiecewiseMap, cfg: &CheckConfig) -> Result<Certificate> {
    if *map.gamma() != Ordinal::omega() {
        return Err(Error::Unsupported(format!(
            "cannot certify {} at gamma = {}: certification works through \
             finite exhaustions, which exist only at gamma = w",
            map.id(),
            map.gamma()
        )));
    }
    let source = map.source();
    let target = map.target();
    let src_pts = source.enumerate(cfg.depth)?;
    let tgt_pts = target.enumerate(cfg.depth)?;

    let mut orphans = Vec::new();
    let mut images = BTreeSet::new();
    for p in &src_pts {
        let q = match map.apply(p) {
            Ok(q) => q,
            Err(e) => {
                orphans.push(format!("{p}: {e}"));
                continue;
            }
        };
        if !target.member(&q)? {
            orphans.push(format!("image {q} of {p} is outside the target"));
        }
        if !images.insert(q.clone()) {
            orphans.push(format!("two sample points map to {q}"));
        }
        match map.invert(&q) {
            Ok(back) if back == *p => {}
            Ok(back) => orphans.push(format!("inverse sends {q} to {back}, not {p}")),
            Err(e) => orphans.push(format!("{q}: {e}")),
        }
    }
    for q in &tgt_pts {
        let p = match map.invert(q) {
            Ok(p) => p,
            Err(e) => {
                orphans.push(format!("{q}: {e}"));
                continue;
            }
        };
        if !source.member(&p)? {
            orphans.push(format!("preimage {p} of {q} is outside the source"));
        }
        match map.apply(&p) {
            Ok(fwd) if fwd == *q => {}
            Ok(fwd) => orphans.push(format!("map sends {p} to {fwd}, not {q}")),
            Err(e) => orphans.push(format!("{p}: {e}")),
        }
    }
    let bijection =
        BijectionReport { checked: src_pts.len() + tgt_pts.len(), orphans };

    // the corner and its image are where every strip accumulates, so they
    // are checked first regardless of the checkpoint budget
    let corner = map.corner()?;
    let top = map.apply(&corner)?;
    let mut continuity = Vec::new();
    for p in checkpoints(source, &corner, &src_pts, cfg.max_checkpoints)? {
        let row = if p == corner {
            match symbolic_corner_row(map, &p, cfg)? {
                Some(row) => row,
                None => sampled_row(source, target, |x| map.apply(x), &p, "forward", cfg)?,
            }
        } else {
            sampled_row(source, target, |x| map.apply(x), &p, "forward", cfg)?
        };
        continuity.push(row);
    }
    for q in checkpoints(target, &top, &tgt_pts, cfg.max_checkpoints)? {
        continuity.push(sampled_row(target, source, |x| map.invert(x), &q, "inverse", cfg)?);
    }

    let oracle = oracle_report(source, target)?;
    let pass = bijection.orphans.is_empty()
        && continuity.iter().all(|r| r.pass)
        && oracle.equal;

    Ok(Certificate {
        id: map.id().to_string(),
        source: source.to_string(),
        target: target.to_string(),
        depths: Depths { k: cfg.depth, n_max: cfg.n_max },
        bijection,
        continuity,
        oracle,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn pp(a: &str, b: &str) -> Point {
        Point::pair_ord(o(a), o(b))
    }

    #[test]
    fn catalogue_maps_certify() {
        let cfg = CheckConfig::default();
        for map in construct::catalogue() {
            let cert = certify(&map, &cfg).unwrap_or_else(|e| {
                panic!("{} should certify: {e}", map.id());
            });
            assert!(cert.pass, "{} certificate failed", map.id());
            assert!(cert.bijection.checked >= 45);
            assert!(cert.bijection.orphans.is_empty());
            assert!(!cert.continuity.is_empty(), "{} has no checkpoints", map.id());
            for row in &cert.continuity {
                assert!(row.pass, "{}: {:?}", map.id(), row.failure);
                assert_eq!(row.matched.len(), cfg.n_max as usize);
            }
            assert!(cert.oracle.equal, "{} invariant mismatch", map.id());
        }
    }

    #[test]
    fn corner_rows_are_symbolic() {
        let cfg = CheckConfig::default();
        for map in construct::catalogue() {
            let cert = certify(&map, &cfg).unwrap();
            let corner = map.corner().unwrap().to_string();
            let row = cert
                .continuity
                .iter()
                .find(|r| r.direction == "forward" && r.point == corner)
                .unwrap_or_else(|| panic!("{}: corner row missing", map.id()));
            assert_eq!(row.mode, "symbolic", "{}", map.id());
            assert!(row.pass);
        }
    }

    #[test]
    fn tampering_breaks_continuity() {
        // swapping two columns' images does not disturb bijectivity but
        // tears the filter at the swapped limit points
        let map = construct::conv_square_map();
        let a = pp("0", "w");
        let b = pp("1", "w");
        let tampered = |x: &Point| -> Result<Point> {
            if *x == a {
                map.apply(&b)
            } else if *x == b {
                map.apply(&a)
            } else {
                map.apply(x)
            }
        };
        let cfg = CheckConfig::default();
        let row = sampled_row(map.source(), map.target(), tampered, &a, "forward", &cfg)
            .unwrap();
        assert!(!row.pass, "swapped limits must fail the filter check");
        assert!(row.failure.is_some());
    }

    #[test]
    fn refuses_wide_layers() {
        let map = construct::full_square_map_at(o("w^2"));
        let err = certify(&map, &CheckConfig::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gamma = w^2"), "{msg}");
        assert!(msg.contains("finite exhaustions"), "{msg}");
    }

    #[test]
    fn certificates_serialize() {
        let cfg = CheckConfig { depth: 4, ..CheckConfig::default() };
        let cert = certify(&construct::block_square_map(), &cfg).unwrap();
        let text = serde_json::to_string_pretty(&cert).unwrap();
        assert!(text.contains("\"id\": \"lgamma-square\""));
        assert!(text.contains("\"orphans\""));
        assert!(text.contains("\"mode\""));
        assert!(text.contains("\"invariant_src\""));
        let again = serde_json::to_string_pretty(
            &certify(&construct::block_square_map(), &cfg).unwrap(),
        )
        .unwrap();
        assert_eq!(text, again, "certification is deterministic");
    }
}

//! Exact sets of ordinals, closed under boolean operations and the
//! derived-set operator of the order topology on a segment.
//!
//! A set is a finite union of atoms. An atom pairs a half-open interval
//! `[lo, hi_ex)` with a list of half-open bands on the last CNF exponent:
//! `x` belongs when `lo <= x < hi_ex` and `last_exponent(x)` falls in some
//! band. The last exponent of zero counts as zero. This shape is closed
//! under union, intersection, and complement, and also under one step of
//! "points approached from below", which is what makes Cantor-Bendixson
//! derivatives of segment subspaces computable symbolically.
//!
//! Key facts the queries rely on, for an atom with band floor `b`:
//! - band members cofinally approach a limit x exactly when b < last_exponent(x)
//!   (offsets w^big*j + w^b below x realize the approach);
//! - the largest band member <= u is the truncation of u to exponents >= b,
//!   unless that truncation overshoots the band ceiling, in which case the
//!   band members have no maximum below it;
//! - left addition x -> lo + x is an order isomorphism carrying last
//!   exponents through unchanged (for positive offsets), which reduces every
//!   order-type computation to a shifted one starting at zero.

use crate::ordinal::{Kind, Ordinal};
use crate::{Error, Result};

/// Half-open exponent band `[lo, hi_ex)`; `hi_ex = None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub lo: Ordinal,
    pub hi_ex: Option<Ordinal>,
}

impl Band {
    pub fn at_least(lo: Ordinal) -> Band {
        Band { lo, hi_ex: None }
    }

    pub fn all() -> Band {
        Band::at_least(Ordinal::zero())
    }

    /// Exponents below `hi_ex`.
    pub fn below(hi_ex: Ordinal) -> Band {
        Band { lo: Ordinal::zero(), hi_ex: Some(hi_ex) }
    }

    fn contains(&self, e: &Ordinal) -> bool {
        *e >= self.lo && self.hi_ex.as_ref().is_none_or(|h| e < h)
    }

    fn is_empty(&self) -> bool {
        self.hi_ex.as_ref().is_some_and(|h| *h <= self.lo)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Atom {
    lo: Ordinal,
    hi_ex: Ordinal,
    bands: Vec<Band>,
}

/// Largest or limiting element of a set restricted below some point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Below {
    Empty,
    Max(Ordinal),
    /// No maximum; the supremum of the restriction is this limit ordinal.
    NoMaxSup(Ordinal),
}

impl Below {
    /// Outcome for the union of the two underlying sets.
    fn join(self, other: Below) -> Below {
        use Below::*;
        match (self, other) {
            (Empty, b) => b,
            (a, Empty) => a,
            (Max(a), Max(b)) => Max(a.max(b)),
            (NoMaxSup(a), NoMaxSup(b)) => NoMaxSup(a.max(b)),
            (Max(a), NoMaxSup(s)) | (NoMaxSup(s), Max(a)) => {
                // an attained point at or past the sup beats the unattained one
                if a >= s {
                    Max(a)
                } else {
                    NoMaxSup(s)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalSet(Vec<Atom>);

fn omega_pow(e: &Ordinal) -> Ordinal {
    Ordinal::pow_omega(e)
}

/// Least multiple of omega^d that is >= s, treating zero as matching only d = 0.
fn grid_ceil(s: &Ordinal, d: &Ordinal) -> Ordinal {
    if d.is_zero() {
        return s.clone();
    }
    let t = s.truncate_at(d);
    if t == *s && !s.is_zero() {
        s.clone()
    } else {
        t.add(&omega_pow(d))
    }
}

/// Least x >= s with last_exponent(x) in the band.
fn band_ceil(s: &Ordinal, band: &Band) -> Ordinal {
    let t0 = grid_ceil(s, &band.lo);
    if band.contains(&t0.last_exponent()) {
        t0
    } else {
        // t0 overshoots the ceiling; the next band point sits one w^lo above
        t0.add(&omega_pow(&band.lo))
    }
}

/// Largest x <= u with last_exponent(x) in the band, or the unattained sup.
fn band_floor(u: &Ordinal, band: &Band) -> Below {
    let t = u.truncate_at(&band.lo);
    if t.is_zero() {
        return if band.lo.is_zero() {
            // here u itself must be zero (truncation at zero keeps everything)
            Below::Max(Ordinal::zero())
        } else {
            Below::Empty
        };
    }
    if band.contains(&t.last_exponent()) {
        // points in (t, u] all have last exponent under the band floor
        Below::Max(t)
    } else {
        // t is on the floor grid but above the ceiling; band points pile up
        // cofinally under t without reaching it
        Below::NoMaxSup(t)
    }
}

/// Largest band member strictly below a limit ordinal mu.
fn band_prev_under_limit(mu: &Ordinal, band: &Band) -> Below {
    let e = mu.last_exponent();
    if band.lo < e {
        return Below::NoMaxSup(mu.clone());
    }
    let anchor = if band.lo == e {
        // drop one omega^e from mu: the largest multiple of omega^e below it
        let terms = mu.terms();
        let (last_e, c) = terms.last().expect("mu is a limit");
        let mut t: Vec<_> = terms[..terms.len() - 1].to_vec();
        if *c > 1 {
            t.push((last_e.clone(), c - 1));
        }
        Ordinal::from_terms(t)
    } else {
        mu.truncate_at(&band.lo)
    };
    if anchor.is_zero() {
        Below::Empty
    } else {
        band_floor(&anchor, band)
    }
}

fn clip_lo(out: Below, lo: &Ordinal) -> Below {
    match out {
        Below::Max(y) if y >= *lo => Below::Max(y),
        Below::NoMaxSup(s) if s > *lo => Below::NoMaxSup(s),
        _ => Below::Empty,
    }
}

fn normalize_bands(mut bands: Vec<Band>) -> Vec<Band> {
    bands.retain(|b| !b.is_empty());
    bands.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut out: Vec<Band> = Vec::new();
    for b in bands {
        match out.last_mut() {
            Some(prev) if prev.hi_ex.as_ref().is_none_or(|h| *h >= b.lo) => {
                prev.hi_ex = match (prev.hi_ex.take(), b.hi_ex) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    _ => None,
                };
            }
            _ => out.push(b),
        }
    }
    out
}

fn bands_intersect(a: &[Band], b: &[Band]) -> Vec<Band> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let lo = x.lo.clone().max(y.lo.clone());
            let hi_ex = match (&x.hi_ex, &y.hi_ex) {
                (Some(p), Some(q)) => Some(p.clone().min(q.clone())),
                (Some(p), None) | (None, Some(p)) => Some(p.clone()),
                (None, None) => None,
            };
            let band = Band { lo, hi_ex };
            if !band.is_empty() {
                out.push(band);
            }
        }
    }
    normalize_bands(out)
}

fn bands_complement(bands: &[Band]) -> Vec<Band> {
    // input must be normalized (sorted, disjoint, non-adjacent)
    let mut out = Vec::new();
    let mut from = Ordinal::zero();
    for b in bands {
        if b.lo > from {
            out.push(Band { lo: from, hi_ex: Some(b.lo.clone()) });
        }
        match &b.hi_ex {
            Some(h) => from = h.clone(),
            None => return out,
        }
    }
    out.push(Band::at_least(from));
    out
}

fn bands_contain(bands: &[Band], e: &Ordinal) -> bool {
    bands.iter().any(|b| b.contains(e))
}

impl Atom {
    fn first(&self) -> Option<Ordinal> {
        self.member_geq(&self.lo)
    }

    /// Least member >= s (s may be below lo).
    fn member_geq(&self, s: &Ordinal) -> Option<Ordinal> {
        let s = s.clone().max(self.lo.clone());
        self.bands
            .iter()
            .map(|b| band_ceil(&s, b))
            .filter(|y| *y < self.hi_ex)
            .min()
    }

    fn contains(&self, x: &Ordinal) -> bool {
        *x >= self.lo && *x < self.hi_ex && bands_contain(&self.bands, &x.last_exponent())
    }

    /// Largest member strictly below x.
    fn prev_below(&self, x: &Ordinal) -> Below {
        if self.lo >= *x {
            return Below::Empty;
        }
        let mu = x.clone().min(self.hi_ex.clone());
        let mut acc = Below::Empty;
        for band in &self.bands {
            let out = match mu.classify() {
                Kind::Zero => Below::Empty,
                Kind::Successor => band_floor(&mu.pred().expect("successor"), band),
                Kind::Limit => band_prev_under_limit(&mu, band),
            };
            acc = acc.join(clip_lo(out, &self.lo));
        }
        acc
    }

    /// Order type of {member : member < x}; pass hi_ex or above for the whole atom.
    fn type_below(&self, x: &Ordinal) -> Ordinal {
        if *x <= self.lo {
            return Ordinal::zero();
        }
        let mu = x.clone().min(self.hi_ex.clone());
        let head = if bands_contain(&self.bands, &self.lo.last_exponent()) { 1 } else { 0 };
        let delta = self.lo.left_sub(&mu).expect("lo < mu");
        Ordinal::from_nat(head).add(&banded_type(&delta, &self.bands))
    }

    fn order_type(&self) -> Ordinal {
        self.type_below(&self.hi_ex)
    }

    /// Member at position p within the atom, p < order_type().
    fn nth(&self, p: &Ordinal) -> Ordinal {
        let head = bands_contain(&self.bands, &self.lo.last_exponent());
        if head && p.is_zero() {
            return self.lo.clone();
        }
        let q = if head {
            Ordinal::one().left_sub(p).expect("p >= 1")
        } else {
            p.clone()
        };
        let delta = self.lo.left_sub(&self.hi_ex).expect("lo < hi_ex");
        self.lo.add(&nth_banded(&delta, &self.bands, &q))
    }
}

/// Order type of {t : 0 < t < delta, last_exponent(t) in bands}.
fn banded_type(delta: &Ordinal, bands: &[Band]) -> Ordinal {
    if bands.is_empty() || *delta <= Ordinal::one() {
        return Ordinal::zero();
    }
    let d = &bands[0].lo;
    if !d.is_zero() {
        // members are the multiples of omega^d; divide out the grid
        let (q, r) = delta.div_rem(&omega_pow(d)).expect("nonzero divisor");
        let bound = if r.is_zero() { q } else { q.succ() };
        let shifted: Vec<Band> = bands
            .iter()
            .map(|b| Band {
                lo: d.left_sub(&b.lo).expect("floors >= d"),
                hi_ex: b.hi_ex.as_ref().map(|h| d.left_sub(h).expect("ceiling > d")),
            })
            .collect();
        return banded_type(&bound, &shifted);
    }
    match &bands[0].hi_ex {
        None => {
            // everything in (0, delta)
            match delta.as_nat() {
                Some(n) => Ordinal::from_nat(n - 1),
                None => delta.clone(),
            }
        }
        Some(h) => {
            // blocks of low points of full type omega^h, separated by grid
            // points governed by the remaining bands
            let (q, r) = delta.div_rem(&omega_pow(h)).expect("nonzero divisor");
            let full = omega_pow(h).mul(&q);
            if r.is_zero() {
                return full;
            }
            let grid = !q.is_zero() && bands_contain(&bands[1..], &h.add(&q.last_exponent()));
            let low = match r.as_nat() {
                Some(n) => Ordinal::from_nat(n - 1),
                None => r.clone(),
            };
            full.add(&Ordinal::from_nat(grid as u64).add(&low))
        }
    }
}

/// Member of {t : 0 < t < delta, last_exponent(t) in bands} at position p.
fn nth_banded(delta: &Ordinal, bands: &[Band], p: &Ordinal) -> Ordinal {
    debug_assert!(*p < banded_type(delta, bands));
    let d = &bands[0].lo;
    if !d.is_zero() {
        let (q, r) = delta.div_rem(&omega_pow(d)).expect("nonzero divisor");
        let bound = if r.is_zero() { q } else { q.succ() };
        let shifted: Vec<Band> = bands
            .iter()
            .map(|b| Band {
                lo: d.left_sub(&b.lo).expect("floors >= d"),
                hi_ex: b.hi_ex.as_ref().map(|h| d.left_sub(h).expect("ceiling > d")),
            })
            .collect();
        return omega_pow(d).mul(&nth_banded(&bound, &shifted, p));
    }
    match &bands[0].hi_ex {
        None => match p.as_nat() {
            Some(n) => Ordinal::from_nat(n + 1),
            None => p.clone(),
        },
        Some(h) => {
            let (q, r) = p.div_rem(&omega_pow(h)).expect("nonzero divisor");
            let base = omega_pow(h).mul(&q);
            let grid = !q.is_zero() && bands_contain(&bands[1..], &h.add(&q.last_exponent()));
            if grid && r.is_zero() {
                return base;
            }
            let s = if grid {
                // positions after the leading grid point line up with offsets
                r
            } else {
                match r.as_nat() {
                    Some(n) => Ordinal::from_nat(n + 1),
                    None => r,
                }
            };
            base.add(&s)
        }
    }
}

impl OrdinalSet {
    pub fn empty() -> OrdinalSet {
        OrdinalSet(Vec::new())
    }

    /// Closed segment [lo, hi].
    pub fn segment(lo: &Ordinal, hi: &Ordinal) -> OrdinalSet {
        OrdinalSet::banded_segment(lo, hi, Band::all())
    }

    /// {x in [lo, hi] : last_exponent(x) in band}.
    pub fn banded_segment(lo: &Ordinal, hi: &Ordinal, band: Band) -> OrdinalSet {
        if lo > hi {
            return OrdinalSet::empty();
        }
        OrdinalSet::from_atoms(vec![Atom {
            lo: lo.clone(),
            hi_ex: hi.succ(),
            bands: vec![band],
        }])
    }

    /// {x in [lo, hi_ex) : last_exponent(x) in band}.
    pub fn interval(lo: &Ordinal, hi_ex: &Ordinal, band: Band) -> OrdinalSet {
        if lo >= hi_ex {
            return OrdinalSet::empty();
        }
        OrdinalSet::from_atoms(vec![Atom {
            lo: lo.clone(),
            hi_ex: hi_ex.clone(),
            bands: vec![band],
        }])
    }

    /// Least strict upper bound of the covered range: every member is below
    /// it. Zero for the empty set.
    pub fn span_hi_ex(&self) -> Ordinal {
        self.0.last().map(|a| a.hi_ex.clone()).unwrap_or_else(Ordinal::zero)
    }

    pub fn points<I: IntoIterator<Item = Ordinal>>(points: I) -> OrdinalSet {
        let mut ps: Vec<Ordinal> = points.into_iter().collect();
        ps.sort();
        ps.dedup();
        OrdinalSet::from_atoms(
            ps.into_iter()
                .map(|p| Atom { hi_ex: p.succ(), lo: p, bands: vec![Band::all()] })
                .collect(),
        )
    }

    fn from_atoms(mut atoms: Vec<Atom>) -> OrdinalSet {
        for a in &mut atoms {
            a.bands = normalize_bands(std::mem::take(&mut a.bands));
        }
        atoms.retain(|a| a.lo < a.hi_ex && a.first().is_some());
        atoms.sort_by(|a, b| a.lo.cmp(&b.lo));
        for w in atoms.windows(2) {
            assert!(w[0].hi_ex <= w[1].lo, "atoms overlap");
        }
        let mut out: Vec<Atom> = Vec::new();
        for a in atoms {
            match out.last_mut() {
                Some(prev) if prev.hi_ex == a.lo && prev.bands == a.bands => {
                    prev.hi_ex = a.hi_ex;
                }
                _ => out.push(a),
            }
        }
        OrdinalSet(out)
    }

    pub fn member(&self, x: &Ordinal) -> bool {
        self.0.iter().any(|a| a.contains(x))
    }

    /// One contiguous run admitting every exponent, so that positions and
    /// values move in step and value-based limit reasoning is exact.
    pub fn is_plain_interval(&self) -> bool {
        match self.0.as_slice() {
            [] => true,
            [a] => a.bands.iter().any(|b| b.lo.is_zero() && b.hi_ex.is_none()),
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Ordinal> {
        self.0.first().and_then(|a| a.first())
    }

    /// Least member >= x.
    pub fn next_geq(&self, x: &Ordinal) -> Option<Ordinal> {
        self.0.iter().find_map(|a| {
            if a.hi_ex <= *x {
                None
            } else {
                a.member_geq(x)
            }
        })
    }

    /// Least member > x.
    pub fn next_above(&self, x: &Ordinal) -> Option<Ordinal> {
        self.next_geq(&x.succ())
    }

    /// Largest member below x, or the supremum when no maximum exists.
    pub fn prev_below(&self, x: &Ordinal) -> Below {
        for a in self.0.iter().rev() {
            let out = a.prev_below(x);
            if out != Below::Empty {
                return out;
            }
        }
        Below::Empty
    }

    /// Members approach x from below without reaching a last one.
    pub fn is_cofinal_below(&self, x: &Ordinal) -> bool {
        self.prev_below(x) == Below::NoMaxSup(x.clone())
    }

    /// Largest member, or sup when there is none.
    pub fn last(&self) -> Below {
        match self.0.last() {
            None => Below::Empty,
            Some(a) => self.prev_below(&a.hi_ex),
        }
    }

    pub fn order_type(&self) -> Ordinal {
        self.0
            .iter()
            .fold(Ordinal::zero(), |acc, a| acc.add(&a.order_type()))
    }

    /// Order type of {member : member < x}: the position x would occupy.
    pub fn type_below(&self, x: &Ordinal) -> Ordinal {
        self.0
            .iter()
            .fold(Ordinal::zero(), |acc, a| acc.add(&a.type_below(x)))
    }

    /// Member at position p in the increasing enumeration.
    pub fn nth(&self, p: &Ordinal) -> Option<Ordinal> {
        let mut seen = Ordinal::zero();
        for a in &self.0 {
            let t = a.order_type();
            let end = seen.add(&t);
            if *p < end {
                let inner = seen.left_sub(p).expect("p >= seen");
                return Some(a.nth(&inner));
            }
            seen = end;
        }
        None
    }

    /// Exact listing when the set is finite.
    pub fn enumerate_finite(&self) -> Option<Vec<Ordinal>> {
        let n = self.order_type().as_nat()?;
        Some((0..n).map(|i| self.nth(&Ordinal::from_nat(i)).expect("i < type")).collect())
    }

    pub fn union(&self, other: &OrdinalSet) -> OrdinalSet {
        self.overlay(other, |a, b| normalize_bands([a, b].concat()))
    }

    pub fn intersect(&self, other: &OrdinalSet) -> OrdinalSet {
        self.overlay(other, |a, b| bands_intersect(&a, &b))
    }

    pub fn minus(&self, other: &OrdinalSet) -> OrdinalSet {
        self.overlay(other, |a, b| bands_intersect(&a, &bands_complement(&normalize_bands(b))))
    }

    /// Complement within [0, bound].
    pub fn complement_within(&self, bound: &Ordinal) -> OrdinalSet {
        OrdinalSet::segment(&Ordinal::zero(), bound).minus(self)
    }

    fn overlay(
        &self,
        other: &OrdinalSet,
        op: impl Fn(Vec<Band>, Vec<Band>) -> Vec<Band>,
    ) -> OrdinalSet {
        let mut cuts: Vec<Ordinal> = Vec::new();
        for a in self.0.iter().chain(other.0.iter()) {
            cuts.push(a.lo.clone());
            cuts.push(a.hi_ex.clone());
        }
        cuts.sort();
        cuts.dedup();
        let mut atoms = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi_ex) = (&w[0], &w[1]);
            let take = |s: &OrdinalSet| {
                s.0.iter()
                    .find(|a| a.lo <= *lo && *hi_ex <= a.hi_ex)
                    .map(|a| a.bands.clone())
                    .unwrap_or_default()
            };
            let bands = op(take(self), take(other));
            if !bands.is_empty() {
                atoms.push(Atom { lo: lo.clone(), hi_ex: hi_ex.clone(), bands });
            }
        }
        OrdinalSet::from_atoms(atoms)
    }

    /// All ordinals the members of this set approach from below, members or
    /// not. Always a set of limit ordinals.
    pub fn approach_set(&self) -> OrdinalSet {
        let mut acc = OrdinalSet::empty();
        for a in &self.0 {
            for b in &a.bands {
                acc = acc.union(&OrdinalSet::from_atoms(vec![Atom {
                    lo: a.lo.succ(),
                    hi_ex: a.hi_ex.succ(),
                    bands: vec![Band::at_least(b.lo.succ())],
                }]));
            }
        }
        acc
    }

    /// Points of the set that its own members approach from below: one exact
    /// step of the derived-set operator in the ambient segment topology.
    /// (Nothing is approached from above in a well-order.)
    pub fn derived_step(&self) -> OrdinalSet {
        self.intersect(&self.approach_set())
    }

    /// delta-fold derived set. Finite deltas iterate the exact step; an
    /// infinite delta needs the set to simplify to at most one atom with one
    /// band within a bounded number of steps, where the closed form
    /// "raise the band floor by delta" applies.
    pub fn derived_iterate(&self, delta: &Ordinal) -> Result<OrdinalSet> {
        if delta.is_zero() {
            return Ok(self.clone());
        }
        if let Some(n) = delta.as_nat() {
            let mut s = self.clone();
            for _ in 0..n {
                if s.is_empty() {
                    break;
                }
                s = s.derived_step();
            }
            return Ok(s);
        }
        let mut s = self.clone();
        for _ in 0..64 {
            if s.is_empty() {
                return Ok(s);
            }
            if s.0.len() == 1 && s.0[0].bands.len() == 1 {
                let a = &s.0[0];
                let b = &a.bands[0];
                return Ok(OrdinalSet::from_atoms(vec![Atom {
                    lo: a.lo.succ(),
                    hi_ex: a.hi_ex.clone(),
                    bands: vec![Band {
                        lo: b.lo.add(delta),
                        hi_ex: b.hi_ex.clone(),
                    }],
                }]));
            }
            s = s.derived_step();
        }
        Err(Error::Unsupported(
            "transfinite derived set of a set that does not simplify".into(),
        ))
    }

    /// Members sitting at limit positions: the derived set of the order
    /// topology the set carries as a space in its own right. Differs from
    /// `derived_step` over gaps, where a run's supremum falls outside the
    /// set and the next member inherits the limit position without being
    /// approached in value.
    ///
    /// Errs when the answer is not a banded set (infinitely many runs
    /// ending outside the set, with band-inexpressible successors).
    pub fn order_derived_step(&self) -> Result<OrdinalSet> {
        let mut out = OrdinalSet::empty();
        let mut prior = Below::Empty;
        for a in &self.0 {
            let Some(first) = a.first() else { continue };
            let single = OrdinalSet::from_atoms(vec![a.clone()]);
            let b1 = a
                .bands
                .iter()
                .map(|b| b.lo.clone())
                .min()
                .expect("atoms keep at least one band");
            // a member with band room beneath its last term is approached
            // in value by within-atom members
            let raised = bands_intersect(&a.bands, &[Band::at_least(b1.succ())]);
            let mut part = OrdinalSet::from_atoms(vec![Atom {
                lo: a.lo.clone(),
                hi_ex: a.hi_ex.clone(),
                bands: raised,
            }]);
            // a run piling up to a non-member supremum leaves the next
            // member with no predecessor, hence at a limit position
            let sups = single.approach_set().minus(&single);
            if !sups.is_empty() {
                let caps = sups.enumerate_finite().ok_or_else(|| {
                    Error::Unsupported(
                        "the derived set of this order is not a banded set: \
                         infinitely many runs end outside it"
                            .into(),
                    )
                })?;
                let step = omega_pow(&b1);
                part = part.union(&OrdinalSet::points(
                    caps.iter()
                        .map(|y| y.add(&step))
                        .filter(|x| single.member(x)),
                ));
            }
            // the first member has no within-atom prefix; whether its
            // position is a limit is decided by everything earlier
            let first_set = OrdinalSet::points([first]);
            part = if matches!(prior, Below::NoMaxSup(_)) {
                part.union(&first_set)
            } else {
                part.minus(&first_set)
            };
            out = out.union(&part);
            prior = prior.join(a.prev_below(&a.hi_ex));
        }
        Ok(out)
    }

    /// delta-fold derived set of the own order topology. Finite deltas
    /// iterate the exact step; a transfinite delta goes through the position
    /// line and is mapped back pointwise, which needs finitely many
    /// survivors.
    pub fn order_derived_iterate(&self, delta: &Ordinal) -> Result<OrdinalSet> {
        if self.is_plain_interval() {
            // positions and values coincide up to the left offset
            return self.derived_iterate(delta);
        }
        if let Some(n) = delta.as_nat() {
            let mut s = self.clone();
            for _ in 0..n {
                if s.is_empty() {
                    break;
                }
                s = s.order_derived_step()?;
            }
            return Ok(s);
        }
        let positions =
            OrdinalSet::interval(&Ordinal::zero(), &self.order_type(), Band::all());
        let surviving = positions.derived_iterate(delta)?;
        let Some(ps) = surviving.enumerate_finite() else {
            return Err(Error::Unsupported(
                "a transfinite derivative with infinitely many survivors is \
                 not mapped back to members"
                    .into(),
            ));
        };
        Ok(OrdinalSet::points(
            ps.iter().map(|p| self.nth(p).expect("position below the order type")),
        ))
    }
}

impl std::fmt::Display for OrdinalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            if a.lo.succ() == a.hi_ex {
                write!(f, "{{{}}}", a.lo)?;
                continue;
            }
            write!(f, "[{}, {})", a.lo, a.hi_ex)?;
            let all = a.bands.len() == 1
                && a.bands[0].lo.is_zero()
                && a.bands[0].hi_ex.is_none();
            if !all {
                for (j, b) in a.bands.iter().enumerate() {
                    write!(f, "{}", if j == 0 { ":" } else { "," })?;
                    let succ_band = b.lo.is_zero()
                        && b.hi_ex.as_ref().is_some_and(|h| *h == Ordinal::one());
                    let limit_band = b.lo == Ordinal::one() && b.hi_ex.is_none();
                    if succ_band {
                        write!(f, "succ")?;
                    } else if limit_band {
                        write!(f, "lim")?;
                    } else {
                        match &b.hi_ex {
                            Some(h) if b.lo.is_zero() => write!(f, "exp<{h}")?,
                            Some(h) => write!(f, "exp[{},{})", b.lo, h)?,
                            None => write!(f, "exp>={}", b.lo)?,
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn seg(hi: &str) -> OrdinalSet {
        OrdinalSet::segment(&o("0"), &o(hi))
    }

    fn isolated_upto(hi: &str) -> OrdinalSet {
        OrdinalSet::banded_segment(&o("0"), &o(hi), Band::below(o("1")))
    }

    fn limits_upto(hi: &str) -> OrdinalSet {
        OrdinalSet::banded_segment(&o("0"), &o(hi), Band::at_least(o("1")))
    }

    #[test]
    fn membership() {
        let s = isolated_upto("w^2");
        assert!(s.member(&o("0")));
        assert!(s.member(&o("7")));
        assert!(s.member(&o("w+1")));
        assert!(!s.member(&o("w")));
        assert!(!s.member(&o("w^2")));
        assert!(!s.member(&o("w^2+1")));

        let l = limits_upto("w^2");
        assert!(!l.member(&o("0")));
        assert!(l.member(&o("w")));
        assert!(l.member(&o("w*3")));
        assert!(l.member(&o("w^2")));
        assert!(!l.member(&o("w+2")));
    }

    #[test]
    fn next_and_prev() {
        let s = isolated_upto("w^2");
        assert_eq!(s.next_above(&o("3")), Some(o("4")));
        assert_eq!(s.next_above(&o("w")), Some(o("w+1")));
        assert_eq!(s.next_geq(&o("w")), Some(o("w+1")));
        assert_eq!(s.prev_below(&o("5")), Below::Max(o("4")));
        assert_eq!(s.prev_below(&o("w")), Below::NoMaxSup(o("w")));
        assert_eq!(s.prev_below(&o("w+1")), Below::NoMaxSup(o("w")));
        assert_eq!(s.prev_below(&o("0")), Below::Empty);
        assert!(s.is_cofinal_below(&o("w")));
        assert!(!s.is_cofinal_below(&o("w+1")));

        let l = limits_upto("w^2");
        assert_eq!(l.first(), Some(o("w")));
        assert_eq!(l.next_above(&o("w")), Some(o("w*2")));
        assert_eq!(l.prev_below(&o("w^2")), Below::NoMaxSup(o("w^2")));
        assert_eq!(l.prev_below(&o("w*3")), Below::Max(o("w*2")));
        assert_eq!(l.prev_below(&o("w")), Below::Empty);

        let deep = OrdinalSet::banded_segment(&o("0"), &o("w^2"), Band::at_least(o("2")));
        assert_eq!(deep.first(), Some(o("w^2")));
        assert_eq!(deep.prev_below(&o("w^2")), Below::Empty);

        // a bounded band has grid points above its ceiling: no max under them
        let iso = isolated_upto("w^3");
        assert_eq!(iso.prev_below(&o("w^2+w")), Below::NoMaxSup(o("w^2+w")));
        assert_eq!(iso.last(), Below::NoMaxSup(o("w^3")));
        assert_eq!(seg("w^3").last(), Below::Max(o("w^3")));
    }

    #[test]
    fn order_types_by_hand() {
        assert_eq!(seg("w^2").order_type(), o("w^2+1"));
        assert_eq!(isolated_upto("w^2").order_type(), o("w^2"));
        assert_eq!(limits_upto("w^2").order_type(), o("w+1"));
        assert_eq!(isolated_upto("w*3+4").order_type(), o("w*3+4"));
        assert_eq!(limits_upto("w*3+4").order_type(), o("3"));
        assert_eq!(limits_upto("w^3").order_type(), o("w^2+1"));
        assert_eq!(
            OrdinalSet::banded_segment(&o("0"), &o("w^3"), Band::at_least(o("2"))).order_type(),
            o("w+1")
        );
        assert_eq!(OrdinalSet::points([o("w"), o("w*2"), o("w+1")]).order_type(), o("3"));
        assert_eq!(OrdinalSet::empty().order_type(), o("0"));
        // interval not starting at zero
        assert_eq!(OrdinalSet::segment(&o("w"), &o("w*2")).order_type(), o("w+1"));
        assert_eq!(OrdinalSet::segment(&o("5"), &o("w")).order_type(), o("w+1"));
        assert_eq!(OrdinalSet::segment(&o("w+1"), &o("w*2")).order_type(), o("w+1"));
    }

    #[test]
    fn positions_round_trip() {
        let sets = [
            seg("w^2"),
            isolated_upto("w^2"),
            limits_upto("w^3"),
            seg("w^2").minus(&OrdinalSet::points([o("w"), o("w*2+1"), o("5")])),
            OrdinalSet::segment(&o("w"), &o("w^2+w*2")),
        ];
        for s in &sets {
            for x in Ordinal::enumerate_up_to(6) {
                if !s.member(&x) {
                    continue;
                }
                let p = s.type_below(&x);
                assert_eq!(s.nth(&p), Some(x.clone()), "position of {x}");
            }
        }
        // positions are strictly monotone in the member
        let s = isolated_upto("w^2");
        let mut last: Option<Ordinal> = None;
        for x in Ordinal::enumerate_up_to(6) {
            if !s.member(&x) {
                continue;
            }
            let p = s.type_below(&x);
            if let Some(prev) = last {
                assert!(p > prev);
            }
            last = Some(p);
        }
    }

    #[test]
    fn nth_against_known_layout() {
        let s = isolated_upto("w^2");
        assert_eq!(s.nth(&o("0")), Some(o("0")));
        assert_eq!(s.nth(&o("3")), Some(o("3")));
        assert_eq!(s.nth(&o("w")), Some(o("w+1")));
        assert_eq!(s.nth(&o("w+1")), Some(o("w+2")));
        assert_eq!(s.nth(&o("w*2")), Some(o("w*2+1")));
        assert_eq!(s.nth(&o("w^2")), None);

        let l = limits_upto("w^2");
        assert_eq!(l.nth(&o("0")), Some(o("w")));
        assert_eq!(l.nth(&o("2")), Some(o("w*3")));
        assert_eq!(l.nth(&o("w")), Some(o("w^2")));
        assert_eq!(l.nth(&o("w+1")), None);
    }

    #[test]
    fn boolean_algebra_agrees_pointwise() {
        let a = seg("w^2").minus(&OrdinalSet::points([o("w"), o("7")]));
        let b = limits_upto("w^3");
        let samples = Ordinal::enumerate_up_to(6);
        let u = a.union(&b);
        let i = a.intersect(&b);
        let m = a.minus(&b);
        let c = a.complement_within(&o("w^3"));
        for x in &samples {
            assert_eq!(u.member(x), a.member(x) || b.member(x), "union at {x}");
            assert_eq!(i.member(x), a.member(x) && b.member(x), "intersect at {x}");
            assert_eq!(m.member(x), a.member(x) && !b.member(x), "minus at {x}");
            if *x <= o("w^3") {
                assert_eq!(c.member(x), !a.member(x), "complement at {x}");
            }
        }
    }

    #[test]
    fn minimality_of_next_above() {
        let sets = [
            isolated_upto("w^2"),
            limits_upto("w^3"),
            seg("w^2").minus(&OrdinalSet::points([o("w"), o("w+1"), o("3")])),
        ];
        let samples = Ordinal::enumerate_up_to(6);
        for s in &sets {
            for x in &samples {
                if let Some(y) = s.next_above(x) {
                    assert!(y > *x);
                    assert!(s.member(&y));
                    for z in &samples {
                        assert!(!(*z > *x && *z < y && s.member(z)), "{z} between {x} and {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn derived_chain_of_a_segment() {
        let s = seg("w^3");
        let d1 = s.derived_step();
        assert!(d1.member(&o("w")));
        assert!(d1.member(&o("w^3")));
        assert!(!d1.member(&o("w+1")));
        assert!(!d1.member(&o("0")));
        assert_eq!(d1.order_type(), o("w^2+1"));
        let d2 = d1.derived_step();
        assert_eq!(d2.order_type(), o("w+1"));
        assert!(d2.member(&o("w^2")));
        assert!(!d2.member(&o("w")));
        let d3 = d2.derived_step();
        assert_eq!(d3.enumerate_finite(), Some(vec![o("w^3")]));
        assert!(d3.derived_step().is_empty());
    }

    #[test]
    fn derived_step_sees_cross_atom_approach() {
        // isolated points below w^2 approach w^2 itself
        let s = isolated_upto("w^2").union(&OrdinalSet::points([o("w^2")]));
        let d = s.derived_step();
        assert_eq!(d.enumerate_finite(), Some(vec![o("w^2")]));
        assert!(d.derived_step().is_empty());
        // but isolated points alone are discrete in the ambient order
        assert!(isolated_upto("w^2").derived_step().is_empty());
    }

    #[test]
    fn transfinite_derived_iterate() {
        let s = seg("w^w");
        let dw = s.derived_iterate(&o("w")).unwrap();
        assert_eq!(dw.enumerate_finite(), Some(vec![o("w^w")]));
        assert!(dw.derived_step().is_empty());
        assert_eq!(s.derived_iterate(&o("w+1")).unwrap(), OrdinalSet::empty());
        // finite iterate agrees with stepping
        let d2 = s.derived_iterate(&o("2")).unwrap();
        assert_eq!(d2, s.derived_step().derived_step());
        //0 steps is the identity
        assert_eq!(s.derived_iterate(&o("0")).unwrap(), s);
    }

    #[test]
    fn enumerate_finite_lists_members() {
        let s = OrdinalSet::points([o("2"), o("w"), o("w^2+1")]);
        assert_eq!(s.enumerate_finite(), Some(vec![o("2"), o("w"), o("w^2+1")]));
        assert_eq!(seg("w").enumerate_finite(), None);
        assert_eq!(seg("4").enumerate_finite(), Some(vec![o("0"), o("1"), o("2"), o("3"), o("4")]));
    }

    #[test]
    fn explicit_points_and_gaps() {
        let s = seg("w*2").minus(&OrdinalSet::points([o("w")]));
        assert!(!s.member(&o("w")));
        assert!(s.member(&o("w+1")));
        assert_eq!(s.next_above(&o("w")), Some(o("w+1")));
        // removing the limit leaves its approach intact but no member there
        assert_eq!(s.prev_below(&o("w+1")), Below::NoMaxSup(o("w")));
        assert_eq!(s.order_type(), o("w*2+1"));
    }

    #[test]
    fn order_derived_agrees_with_value_derived_on_segments() {
        let same = |a: &OrdinalSet, b: &OrdinalSet, tag: &str| {
            assert_eq!(a.order_type(), b.order_type(), "{tag}");
            for x in Ordinal::enumerate_up_to(6) {
                assert_eq!(a.member(&x), b.member(&x), "{tag} at {x}");
            }
        };
        for hi in ["w", "w^2", "w^3", "w*2+5"] {
            let s = seg(hi);
            same(&s.order_derived_step().unwrap(), &s.derived_step(), hi);
            let d = s.derived_step();
            same(&d.order_derived_step().unwrap(), &d.derived_step(), hi);
        }
    }

    #[test]
    fn order_derived_sees_gap_successors() {
        // successor values only: nothing is approached in value, but the
        // member past each removed limit sits at a limit position
        let s = seg("w*2").minus(&OrdinalSet::points([o("w"), o("w*2")]));
        assert!(s.derived_step().is_empty());
        let d = s.order_derived_step().unwrap();
        assert_eq!(d.enumerate_finite(), Some(vec![o("w+1")]));
        assert!(d.order_derived_step().unwrap().is_empty());

        // multiples of w that are not multiples of w^2: the runs pile up to
        // the missing squares, whose grid successors take the positions
        let grid = OrdinalSet::banded_segment(&o("0"), &o("w^2*3"), Band::at_least(o("1")))
            .minus(&OrdinalSet::points([o("w^2"), o("w^2*2"), o("w^2*3")]));
        assert_eq!(
            grid.order_derived_step().unwrap().enumerate_finite(),
            Some(vec![o("w^2+w"), o("w^2*2+w")])
        );
    }

    #[test]
    fn order_derived_refuses_unbanded_answers() {
        // cofinally many runs end outside the set; the gap successors have
        // no band description
        let grid = limits_upto("w^w").minus(&OrdinalSet::banded_segment(
            &o("0"),
            &o("w^w"),
            Band::at_least(o("2")),
        ));
        assert!(grid.order_derived_step().is_err());
    }

    #[test]
    fn order_derived_iterate_matches_positions() {
        let s = seg("w*3").minus(&OrdinalSet::points([o("w"), o("w*2")]));
        // type w*3+1: the limit positions w, w*2, w*3 map to the members
        // just past each gap and to the top
        let d1 = s.order_derived_iterate(&o("1")).unwrap();
        assert_eq!(d1.enumerate_finite(), Some(vec![o("w+1"), o("w*2+1"), o("w*3")]));
        // the survivors scatter, so one more step clears them
        assert!(s.order_derived_iterate(&o("2")).unwrap().is_empty());
        // transfinite deltas go through the position line
        let t = seg("w^w").minus(&OrdinalSet::points([o("w")]));
        let dw = t.order_derived_iterate(&o("w")).unwrap();
        assert_eq!(dw.enumerate_finite(), Some(vec![o("w^w")]));
    }
}

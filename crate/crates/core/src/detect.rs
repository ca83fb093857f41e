//! Induced-restriction detection, isomorphism, canonical forms, and the
//! affine / odd-circuit characterization.
//!
//! Every detector reports witnesses as the images of a generating tuple of
//! the pattern: for `I_k` the independent set itself, for `C_k` the first
//! `k - 1` circuit elements, for generic patterns the images of a basis of
//! the pattern chosen inside its ground set.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::catalog::{build, PatternId};
use crate::error::Error;
use crate::gf2::{closure, combine, enumerate_flats, insert_reduced, solve_coords, span_points, Flat, LinearMap, Point, PointSet};
use crate::matroid::Matroid;

/// Certificate that `M | flat` is isomorphic to a pattern: `map` sends the
/// pattern's ambient space onto `flat` and its ground set onto `E ∩ flat`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub flat: Flat,
    pub map: LinearMap,
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    flat_basis: Vec<Point>,
    map: Vec<Point>,
}

impl Witness {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(WitnessJson { flat_basis: self.flat.basis().to_vec(), map: self.map.images().to_vec() })
            .expect("serializable")
    }

    /// Re-checks the certificate from scratch against `m` and `pattern`.
    pub fn validate(&self, m: &Matroid, pattern: &Matroid) -> bool {
        self.map.source_dim() == pattern.dim()
            && self.map.target_dim() == m.dim()
            && self.map.image_flat() == self.flat
            && pattern.map(&self.map).ground() == &m.ground().intersection(self.flat.members())
    }
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WitnessJson { flat_basis: self.flat.basis().to_vec(), map: self.map.images().to_vec() }.serialize(s)
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Triangle,
    Independent(usize),
    Circuit(usize),
    Affine(usize),
    Embed(Embedding),
    FlatScan,
}

/// Compiled search for one forbidden pattern.
#[derive(Clone, Debug)]
pub struct Detector {
    kind: Kind,
    pattern: Matroid,
    monotone: bool,
    label: String,
}

impl Detector {
    pub fn new(id: PatternId) -> Result<Detector, Error> {
        let pattern = build(id)?;
        let kind = match id {
            PatternId::Triangle | PatternId::C(3) | PatternId::PG(2) => Kind::Triangle,
            PatternId::I(k) => Kind::Independent(k),
            PatternId::C(k) => Kind::Circuit(k),
            PatternId::AG(d) => Kind::Affine(d),
            _ => Kind::Embed(Embedding::new(&pattern)),
        };
        let monotone = pattern.len() == crate::gf2::num_points(pattern.dim());
        Ok(Detector { kind, pattern, monotone, label: id.to_string() })
    }

    /// Detector for an arbitrary pattern matroid, using the generic routes.
    pub fn from_matroid(pattern: &Matroid) -> Detector {
        let kind = if pattern.is_full_rank() && !pattern.is_empty() {
            Kind::Embed(Embedding::new(pattern))
        } else {
            Kind::FlatScan
        };
        let monotone = pattern.len() == crate::gf2::num_points(pattern.dim());
        Detector { kind, pattern: pattern.clone(), monotone, label: format!("{} points in dim {}", pattern.len(), pattern.dim()) }
    }

    pub fn pattern(&self) -> &Matroid {
        &self.pattern
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// True when the pattern's ground set is its whole geometry, so adding
    /// points can never destroy a copy.
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn is_triangle(&self) -> bool {
        matches!(self.kind, Kind::Triangle)
    }

    /// Visits the generating tuples of induced copies of the pattern in the
    /// set `set` (with `pts` its sorted points). Stops when `f` breaks.
    pub fn visit(&self, set: &PointSet, pts: &[Point], f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>) -> ControlFlow<()> {
        if self.pattern.dim() > set.dim() {
            return ControlFlow::Continue(());
        }
        match &self.kind {
            Kind::Triangle => visit_triangles(set, pts, f),
            Kind::Independent(k) => visit_independent(*k, set, pts, f),
            Kind::Circuit(k) => visit_circuits(*k, set, pts, f),
            Kind::Affine(d) => visit_affine(*d, set, pts, f),
            Kind::Embed(e) => e.visit(set, pts, None, f),
            Kind::FlatScan => {
                let n = set.dim();
                let m = Matroid::from_set(set.clone());
                for flat in enumerate_flats(n, self.pattern.dim()) {
                    if let Some(phi) = find_isomorphism(&self.pattern, &m.restrict(&flat).expect("same ambient")) {
                        let images: Vec<Point> = phi.images().iter().map(|&c| flat.point_at(c)).collect();
                        f(&images)?;
                    }
                }
                ControlFlow::Continue(())
            }
        }
    }

    /// Converts a generating tuple reported by [`Detector::visit`] to a witness.
    pub fn witness_from_images(&self, images: &[Point], ambient: usize) -> Witness {
        let unit_images = match &self.kind {
            Kind::Embed(e) => e.unit_images(images),
            // AG(d) is the coset of e_d; the tuple is p0, p1, ... with p0 the image of e_d
            Kind::Affine(_) => {
                let p0 = images[0];
                images[1..].iter().map(|&p| p ^ p0).chain([p0]).collect()
            }
            Kind::Triangle if self.pattern.dim() == 2 => images.to_vec(),
            _ => images.to_vec(),
        };
        let map = LinearMap::new(unit_images, ambient).expect("witness images are independent");
        Witness { flat: map.image_flat(), map }
    }

    pub fn find(&self, m: &Matroid) -> Option<Witness> {
        let pts = m.points();
        let mut found = None;
        let _ = self.visit(m.ground(), &pts, &mut |imgs| {
            found = Some(imgs.to_vec());
            ControlFlow::Break(())
        });
        found.map(|imgs| self.witness_from_images(&imgs, m.dim()))
    }

    pub fn count(&self, m: &Matroid) -> usize {
        let pts = m.points();
        let mut n = 0;
        let _ = self.visit(m.ground(), &pts, &mut |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }
}

fn visit_triangles(set: &PointSet, pts: &[Point], f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>) -> ControlFlow<()> {
    for (i, &x) in pts.iter().enumerate() {
        for &y in &pts[i + 1..] {
            let z = x ^ y;
            if z > y && set.contains(z) {
                f(&[x, y])?;
            }
        }
    }
    ControlFlow::Continue(())
}

/// Independent `Z ⊆ E`, `|Z| = k`, whose span meets `E` only in `Z`.
fn visit_independent(k: usize, set: &PointSet, pts: &[Point], f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>) -> ControlFlow<()> {
    fn rec(
        k: usize,
        set: &PointSet,
        pts: &[Point],
        start: usize,
        chosen: &mut Vec<Point>,
        span: &mut Vec<Point>,
        f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if chosen.len() == k {
            return f(chosen);
        }
        let need = k - chosen.len();
        for i in start..pts.len() {
            if pts.len() - i < need {
                break;
            }
            let z = pts[i];
            if span[1..].iter().all(|&s| {
                let v = z ^ s;
                v != 0 && !set.contains(v)
            }) {
                let len = span.len();
                for c in 0..len {
                    let v = span[c] ^ z;
                    span.push(v);
                }
                chosen.push(z);
                rec(k, set, pts, i + 1, chosen, span, f)?;
                chosen.pop();
                span.truncate(len);
            }
        }
        ControlFlow::Continue(())
    }
    if k == 0 {
        return f(&[]);
    }
    let mut span = Vec::with_capacity(1 << k);
    span.push(0);
    rec(k, set, pts, 0, &mut Vec::with_capacity(k), &mut span, f)
}

/// Induced `C_k`: the circuit is reported by its `k - 1` smallest elements;
/// the largest element is their sum.
fn visit_circuits(k: usize, set: &PointSet, pts: &[Point], f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>) -> ControlFlow<()> {
    fn rec(
        last: usize,
        set: &PointSet,
        pts: &[Point],
        start: usize,
        chosen: &mut Vec<Point>,
        span: &mut Vec<Point>,
        f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if chosen.len() == last {
            return f(chosen);
        }
        let final_level = chosen.len() + 1 == last;
        let full = span.len() - 1;
        for i in start..pts.len() {
            if pts.len() - i < last - chosen.len() {
                break;
            }
            let z = pts[i];
            let ok = (1..span.len()).all(|c| {
                let v = z ^ span[c];
                if v == 0 {
                    return false;
                }
                if final_level && c == full {
                    v > z && set.contains(v)
                } else {
                    !set.contains(v)
                }
            });
            // with a single chosen element the "full" combination is that element
            let ok = ok && (!final_level || last > 1);
            if ok {
                let len = span.len();
                for c in 0..len {
                    let v = span[c] ^ z;
                    span.push(v);
                }
                chosen.push(z);
                rec(last, set, pts, i + 1, chosen, span, f)?;
                chosen.pop();
                span.truncate(len);
            }
        }
        ControlFlow::Continue(())
    }
    if k < 3 {
        return ControlFlow::Continue(());
    }
    let mut span = Vec::with_capacity(1 << (k - 1));
    span.push(0);
    rec(k - 1, set, pts, 0, &mut Vec::with_capacity(k - 1), &mut span, f)
}

/// Induced `AG(d)`: a coset `p0 + W` inside `E` whose directions `W \ 0`
/// avoid `E`. Each copy is reported once, by its greedy-minimal affine basis:
/// `p_i` is the least coset point outside the affine span of the earlier ones.
fn visit_affine(d: usize, set: &PointSet, pts: &[Point], f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>) -> ControlFlow<()> {
    fn greedy_basis(coset: &mut [Point], d: usize) -> Vec<Point> {
        coset.sort_unstable();
        let p0 = coset[0];
        let mut out = vec![p0];
        let mut dirs = vec![0];
        for &q in &coset[1..] {
            if out.len() == d {
                break;
            }
            if !dirs.contains(&(q ^ p0)) {
                let len = dirs.len();
                for c in 0..len {
                    dirs.push(dirs[c] ^ q ^ p0);
                }
                out.push(q);
            }
        }
        out
    }
    fn rec(
        d: usize,
        set: &PointSet,
        pts: &[Point],
        start: usize,
        chosen: &mut Vec<Point>,
        dirs: &mut Vec<Point>,
        f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if chosen.len() == d {
            let mut coset: Vec<Point> = dirs.iter().map(|&w| w ^ chosen[0]).collect();
            if greedy_basis(&mut coset, d) == *chosen {
                return f(chosen);
            }
            return ControlFlow::Continue(());
        }
        let p0 = chosen[0];
        for i in start..pts.len() {
            let y = pts[i];
            let t = y ^ p0;
            let ok = dirs.iter().all(|&w| {
                let q = y ^ w;
                let dir = t ^ w;
                q >= y && q > p0 && set.contains(q) && dir != 0 && !set.contains(dir)
            });
            if ok {
                let len = dirs.len();
                for c in 0..len {
                    let v = dirs[c] ^ t;
                    dirs.push(v);
                }
                chosen.push(y);
                rec(d, set, pts, i + 1, chosen, dirs, f)?;
                chosen.pop();
                dirs.truncate(len);
            }
        }
        ControlFlow::Continue(())
    }
    if d == 0 {
        return ControlFlow::Continue(());
    }
    let mut dirs = Vec::with_capacity(1 << d);
    let mut chosen = Vec::with_capacity(d);
    for (i, &p0) in pts.iter().enumerate() {
        dirs.clear();
        dirs.push(0);
        chosen.clear();
        chosen.push(p0);
        rec(d, set, pts, i + 1, &mut chosen, &mut dirs, f)?;
    }
    ControlFlow::Continue(())
}

/// Backtracking embedding of a full-rank pattern: an ordered basis of the
/// pattern, taken inside its ground set, is mapped point by point into the
/// target ground set, and every new span element must agree on membership.
#[derive(Clone, Debug)]
struct Embedding {
    dim: usize,
    basis: Vec<Point>,
    /// `member[c]`: is `sum c_i basis_i` in the pattern's ground set.
    member: Vec<bool>,
    unit_coords: Vec<Point>,
}

impl Embedding {
    fn new(pattern: &Matroid) -> Embedding {
        let d = pattern.dim();
        let pts = pattern.points();
        // greedy: each new basis element maximizes ground-set hits in the new span layer
        let mut basis: Vec<Point> = Vec::with_capacity(d);
        let mut reduced: Vec<Point> = Vec::new();
        while basis.len() < d {
            let table = span_points(&basis);
            let mut best: Option<(usize, Point)> = None;
            for &p in &pts {
                let mut tmp = reduced.clone();
                if !insert_reduced(&mut tmp, p) {
                    continue;
                }
                let hits = table.iter().filter(|&&s| pattern.contains(p ^ s)).count();
                if best.is_none_or(|(h, _)| hits > h) {
                    best = Some((hits, p));
                }
            }
            let (_, p) = best.expect("full-rank pattern");
            insert_reduced(&mut reduced, p);
            basis.push(p);
        }
        let member = span_points(&basis).iter().map(|&v| pattern.contains(v)).collect();
        let unit_coords = (0..d).map(|i| solve_coords(&basis, 1 << i).expect("basis spans")).collect();
        Embedding { dim: d, basis, member, unit_coords }
    }

    fn unit_images(&self, images: &[Point]) -> Vec<Point> {
        self.unit_coords.iter().map(|&c| combine(images, c)).collect()
    }

    /// `filter(j, y)` may veto mapping basis element `j` to `y`.
    fn visit(
        &self,
        set: &PointSet,
        pts: &[Point],
        filter: Option<&dyn Fn(usize, Point) -> bool>,
        f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut images = Vec::with_capacity(self.dim);
        let mut table = Vec::with_capacity(1 << self.dim);
        table.push(0);
        self.rec(set, pts, filter, &mut images, &mut table, f)
    }

    fn rec(
        &self,
        set: &PointSet,
        pts: &[Point],
        filter: Option<&dyn Fn(usize, Point) -> bool>,
        images: &mut Vec<Point>,
        table: &mut Vec<Point>,
        f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let j = images.len();
        if j == self.dim {
            return f(images);
        }
        let layer = &self.member[1 << j..2 << j];
        for &y in pts {
            if filter.is_some_and(|flt| !flt(j, y)) {
                continue;
            }
            let ok = table.iter().zip(layer).all(|(&s, &want)| {
                let v = y ^ s;
                v != 0 && set.contains(v) == want
            });
            if ok {
                let len = table.len();
                for c in 0..len {
                    let v = table[c] ^ y;
                    table.push(v);
                }
                images.push(y);
                self.rec(set, pts, filter, images, table, f)?;
                images.pop();
                table.truncate(len);
            }
        }
        ControlFlow::Continue(())
    }
}

pub fn find_triangle(m: &Matroid) -> Option<Witness> {
    Detector::new(PatternId::Triangle).expect("valid").find(m)
}

pub fn is_triangle_free(m: &Matroid) -> bool {
    find_triangle(m).is_none()
}

/// Induced copy of a catalog pattern, through the specialized detector.
pub fn find_induced(m: &Matroid, p: PatternId) -> Result<Option<Witness>, Error> {
    Ok(Detector::new(p)?.find(m))
}

pub fn has_induced(m: &Matroid, p: PatternId) -> Result<bool, Error> {
    Ok(find_induced(m, p)?.is_some())
}

/// Induced copy of an arbitrary pattern matroid.
pub fn find_induced_matroid(m: &Matroid, pattern: &Matroid) -> Option<Witness> {
    Detector::from_matroid(pattern).find(m)
}

/// Reference detector: scans every flat of the pattern's dimension in
/// lexicographic order and tests the restriction for isomorphism.
pub fn find_induced_by_flats(m: &Matroid, pattern: &Matroid) -> Option<Witness> {
    let d = pattern.dim();
    if d > m.dim() {
        return None;
    }
    for flat in enumerate_flats(m.dim(), d) {
        let r = m.restrict(&flat).expect("same ambient");
        if r.len() != pattern.len() {
            continue;
        }
        if let Some(phi) = find_isomorphism(pattern, &r) {
            let images = phi.images().iter().map(|&c| flat.point_at(c)).collect();
            let map = LinearMap::new(images, m.dim()).expect("injective");
            return Some(Witness { flat, map });
        }
    }
    None
}

/// Some hyperplane avoids `E`: the system `<h, x> = 1` for all `x ∈ E` is
/// consistent, i.e. appending a constant coordinate does not raise the rank.
pub fn is_affine(m: &Matroid) -> bool {
    let n = m.dim() as u32;
    let mut plain = Vec::new();
    let mut augmented = Vec::new();
    for x in m.ground().iter() {
        insert_reduced(&mut plain, x);
        insert_reduced(&mut augmented, x | (1 << n));
    }
    plain.len() == augmented.len()
}

/// Same question answered by scanning every hyperplane normal.
pub fn is_affine_by_scan(m: &Matroid) -> bool {
    if m.is_empty() {
        return true;
    }
    let pts = m.points();
    (1..(1u32 << m.dim())).any(|h| pts.iter().all(|&x| (h & x).count_ones() % 2 == 1))
}

/// No induced odd circuit `C_3, C_5, ...` up to length `n + 1`.
pub fn odd_circuit_free(m: &Matroid) -> bool {
    let pts = m.points();
    let mut k = 3;
    while k <= m.dim() + 1 {
        let det = Detector::new(if k == 3 { PatternId::Triangle } else { PatternId::C(k) }).expect("valid");
        if det.visit(m.ground(), &pts, &mut |_| ControlFlow::Break(())).is_break() {
            return false;
        }
        k += 2;
    }
    true
}

/// Per-point isomorphism invariant: triangles through the point and
/// 4-circuit incidences.
pub(crate) fn point_invariants(set: &PointSet, pts: &[Point]) -> Vec<(u32, u32)> {
    pts.iter()
        .map(|&x| {
            let mut tri = 0;
            let mut quad = 0;
            for (i, &y) in pts.iter().enumerate() {
                if y == x {
                    continue;
                }
                if set.contains(x ^ y) {
                    tri += 1;
                }
                for &z in &pts[i + 1..] {
                    if z != x && set.contains(x ^ y ^ z) {
                        quad += 1;
                    }
                }
            }
            (tri, quad)
        })
        .collect()
}

/// Isomorphism between two full-rank matroids of equal dimension.
fn core_isomorphism(a: &Matroid, b: &Matroid) -> Option<LinearMap> {
    let n = a.dim();
    if n != b.dim() || a.len() != b.len() {
        return None;
    }
    if n == 0 {
        return Some(LinearMap::identity(0));
    }
    let pa = a.points();
    let pb = b.points();
    let ia = point_invariants(a.ground(), &pa);
    let ib = point_invariants(b.ground(), &pb);
    let (mut sa, mut sb) = (ia.clone(), ib.clone());
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    let emb = Embedding::new(a);
    let inv_of = |pts: &[Point], inv: &[(u32, u32)], p: Point| inv[pts.binary_search(&p).unwrap()];
    let wanted: Vec<(u32, u32)> = emb.basis.iter().map(|&p| inv_of(&pa, &ia, p)).collect();
    let filter = |j: usize, y: Point| inv_of(&pb, &ib, y) == wanted[j];
    let mut found = None;
    let _ = emb.visit(b.ground(), &pb, Some(&filter), &mut |imgs| {
        found = Some(imgs.to_vec());
        ControlFlow::Break(())
    });
    found.map(|imgs| LinearMap::new(emb.unit_images(&imgs), n).expect("isomorphism"))
}

/// An invertible linear map `φ` with `φ(E_a) = E_b`, if one exists. Rank
/// deficient inputs are matched on their closures and the complements paired up.
pub fn find_isomorphism(a: &Matroid, b: &Matroid) -> Option<LinearMap> {
    let n = a.dim();
    if n != b.dim() || a.len() != b.len() {
        return None;
    }
    let fa = closure(a.ground());
    let fb = closure(b.ground());
    if fa.dim() != fb.dim() {
        return None;
    }
    let psi = core_isomorphism(&a.restrict(&fa).ok()?, &b.restrict(&fb).ok()?)?;
    // domain basis: fa's basis then its complement; images likewise in b
    let mut dom: Vec<Point> = fa.basis().to_vec();
    let mut img: Vec<Point> = psi.images().iter().map(|&c| fb.point_at(c)).collect();
    dom.extend(fa.complement_basis());
    img.extend(fb.complement_basis());
    let images = (0..n).map(|i| combine(&img, solve_coords(&dom, 1 << i).expect("basis"))).collect();
    LinearMap::new(images, n).ok()
}

pub fn is_isomorphic(a: &Matroid, b: &Matroid) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Cheap isomorphism invariant carried alongside canonical forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub size: usize,
    pub rank: usize,
    /// Sorted number of triangles through each point.
    pub triangle_degrees: Vec<u32>,
}

pub fn fingerprint(m: &Matroid) -> Fingerprint {
    let pts = m.points();
    let mut triangle_degrees: Vec<u32> =
        pts.iter().map(|&x| pts.iter().filter(|&&y| y != x && m.contains(x ^ y)).count() as u32 / 2).collect();
    triangle_degrees.sort_unstable();
    Fingerprint { size: m.len(), rank: m.rank(), triangle_degrees }
}

/// Canonical representative of an isomorphism class.
///
/// `points` is the ground set of the full-rank core written in coordinates of
/// a canonically chosen ordered basis taken from `E`: the lexicographically
/// least sorted coordinate list over all admissible ordered bases. When the
/// core fills more than half of its span, `points` is instead the complement
/// of the embedded canonical form of the missing points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub rank: usize,
    pub corank: usize,
    pub points: Vec<Point>,
    pub fingerprint: Fingerprint,
}

impl CanonicalForm {
    pub fn dim(&self) -> usize {
        self.rank + self.corank
    }

    /// The representative matroid in the original ambient dimension.
    pub fn matroid(&self) -> Matroid {
        Matroid::new(self.dim(), self.points.iter().copied()).expect("canonical points are in range")
    }
}

/// Comparison of freshly revealed coordinate layers: first difference
/// decides, and a proper prefix loses because all later coordinates are larger.
fn cmp_layer(a: &[Point], b: &[Point]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    b.len().cmp(&a.len())
}

pub fn canonical_form(m: &Matroid) -> CanonicalForm {
    let fp = fingerprint(m);
    let flat = closure(m.ground());
    let core = m.restrict(&flat).expect("same ambient");
    CanonicalForm { rank: core.dim(), corank: m.dim() - core.dim(), points: canonical_key(&core), fingerprint: fp }
}

/// Key of a full-rank core. Dense cores go through their complement, whose
/// isomorphism class determines theirs; the route depends only on the size.
fn canonical_key(core: &Matroid) -> Vec<Point> {
    let r = core.dim();
    let total = (1usize << r) - 1;
    if total - core.len() < core.len() {
        let comp = Matroid::new(r, (1..=total as Point).filter(|&p| !core.contains(p))).expect("in range");
        let c = canonical_form(&comp);
        let mut taken = PointSet::new(r);
        for &p in &c.points {
            taken.insert(p);
        }
        return (1..=total as Point).filter(|&p| !taken.contains(p)).collect();
    }
    let pts = core.points();
    let set = core.ground();
    let inv = point_invariants(set, &pts);
    let mut branches: Vec<Vec<Point>> = vec![Vec::new()];
    let mut key: Vec<Point> = Vec::with_capacity(pts.len());
    for j in 0..r {
        let mut next: Vec<Vec<Point>> = Vec::new();
        let mut best: Option<Vec<Point>> = None;
        for basis in &branches {
            let table = span_points(basis);
            let mut in_span = PointSet::new(r);
            for &v in &table[1..] {
                in_span.insert(v);
            }
            let min_inv = pts
                .iter()
                .zip(&inv)
                .filter(|(p, _)| !in_span.contains(**p))
                .map(|(_, i)| *i)
                .min()
                .expect("full-rank core has a point outside any proper span");
            for (&y, _) in pts.iter().zip(&inv).filter(|(p, i)| !in_span.contains(**p) && **i == min_inv) {
                let layer: Vec<Point> =
                    (0..table.len() as Point).filter(|&c| set.contains(y ^ table[c as usize])).map(|c| (1 << j) + c).collect();
                let ord = best.as_ref().map_or(Ordering::Less, |b| cmp_layer(&layer, b));
                match ord {
                    Ordering::Less => {
                        best = Some(layer);
                        next.clear();
                        let mut nb = basis.clone();
                        nb.push(y);
                        next.push(nb);
                    }
                    Ordering::Equal => {
                        let mut nb = basis.clone();
                        nb.push(y);
                        next.push(nb);
                    }
                    Ordering::Greater => {}
                }
            }
        }
        key.extend(best.expect("at least one branch"));
        branches = next;
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(n: usize, pts: &[Point]) -> Matroid {
        Matroid::new(n, pts.iter().copied()).unwrap()
    }

    fn pat(id: PatternId) -> Matroid {
        build(id).unwrap()
    }

    fn all_sets(n: usize) -> impl Iterator<Item = Matroid> {
        let np = (1u32 << n) - 1;
        (0u64..(1u64 << np)).map(move |mask| m(n, &(1..=np).filter(|p| mask >> (p - 1) & 1 == 1).collect::<Vec<_>>()))
    }

    fn random_set(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Matroid {
        m(n, &(1..(1u32 << n)).filter(|_| rng.gen_bool(density)).collect::<Vec<_>>())
    }

    #[test]
    fn triangle_examples() {
        assert!(is_triangle_free(&pat(PatternId::AG(4))));
        let w = find_triangle(&pat(PatternId::PG(2))).unwrap();
        assert_eq!(w.flat.points(), vec![1, 2, 3]);
        assert!(is_triangle_free(&pat(PatternId::Kite)));
    }

    #[test]
    fn induced_examples() {
        let i6 = pat(PatternId::I(6));
        let w = find_induced(&i6, PatternId::I(5)).unwrap().unwrap();
        assert!(w.validate(&i6, &pat(PatternId::I(5))));
        for d in 1..=6 {
            assert!(!has_induced(&pat(PatternId::AG(d)), PatternId::C(5)).unwrap());
        }
        let dk = pat(PatternId::DoubledKite(0));
        let w = find_induced(&dk, PatternId::C(6)).unwrap().unwrap();
        assert!(w.validate(&dk, &pat(PatternId::C(6))));
        // pattern larger than the ambient space
        assert!(!has_induced(&pat(PatternId::I(3)), PatternId::I(5)).unwrap());
    }

    #[test]
    fn witnesses_validate_for_every_kind() {
        let host = pat(PatternId::DoubledKite(1));
        for id in [PatternId::I(3), PatternId::I(4), PatternId::C(4), PatternId::C(6), PatternId::AG(3), PatternId::AG(4), PatternId::Kite] {
            let w = find_induced(&host, id).unwrap().unwrap_or_else(|| panic!("{id} in dkite1"));
            assert!(w.validate(&host, &pat(id)), "{id}");
        }
        let fano_host = pat(PatternId::PGS(1, 3));
        let w = find_induced(&fano_host, PatternId::Triangle).unwrap().unwrap();
        assert!(w.validate(&fano_host, &pat(PatternId::Triangle)));
        let w = find_induced(&fano_host, PatternId::PG(3)).unwrap().unwrap();
        assert!(w.validate(&fano_host, &pat(PatternId::PG(3))));
    }

    #[test]
    fn affine_examples() {
        assert!(is_affine(&pat(PatternId::AG(5))));
        assert!(!is_affine(&pat(PatternId::C(5))));
        assert!(is_affine(&Matroid::empty(3)));
        assert!(!odd_circuit_free(&pat(PatternId::Triangle)));
        assert!(!odd_circuit_free(&pat(PatternId::C(5))));
        assert!(odd_circuit_free(&pat(PatternId::AG(5))));
    }

    #[test]
    fn affine_routes_agree_exhaustively_n3() {
        for mat in all_sets(3) {
            assert_eq!(is_affine(&mat), is_affine_by_scan(&mat), "{mat:?}");
            assert_eq!(is_affine(&mat), odd_circuit_free(&mat), "{mat:?}");
        }
    }

    #[test]
    fn specialized_agree_with_flat_scan_n3() {
        let ids = [PatternId::Triangle, PatternId::I(3), PatternId::I(2), PatternId::C(4)];
        for mat in all_sets(3) {
            for id in ids {
                let fast = find_induced(&mat, id).unwrap();
                let slow = find_induced_by_flats(&mat, &pat(id));
                assert_eq!(fast.is_some(), slow.is_some(), "{id} {mat:?}");
            }
        }
    }

    #[test]
    fn specialized_agree_with_flat_scan_random_n5() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ids = [PatternId::Triangle, PatternId::I(3), PatternId::I(4), PatternId::C(4), PatternId::C(5), PatternId::TwoT, PatternId::AG(3)];
        for _ in 0..150 {
            let d = rng.gen_range(0.1..0.6);
            let mat = random_set(5, d, &mut rng);
            for id in ids {
                let fast = find_induced(&mat, id).unwrap();
                let slow = find_induced_by_flats(&mat, &pat(id));
                assert_eq!(fast.is_some(), slow.is_some(), "{id} {mat:?}");
            }
        }
    }

    #[test]
    fn affine_detector_reports_each_copy_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let d = rng.gen_range(0.2..0.7);
            let mat = random_set(5, d, &mut rng);
            for k in 1..=4 {
                let det = Detector::new(PatternId::AG(k)).unwrap();
                let mut flats = Vec::new();
                let _ = det.visit(mat.ground(), &mat.points(), &mut |imgs| {
                    let w = det.witness_from_images(imgs, 5);
                    assert!(w.validate(&mat, &pat(PatternId::AG(k))));
                    flats.push(w.flat.basis().to_vec());
                    ControlFlow::Continue(())
                });
                let mut expected: Vec<Vec<Point>> = enumerate_flats(5, k)
                    .filter(|f| is_isomorphic(&mat.restrict(f).unwrap(), &pat(PatternId::AG(k))))
                    .map(|f| f.basis().to_vec())
                    .collect();
                flats.sort();
                expected.sort();
                assert_eq!(flats, expected, "AG{k} {mat:?}");
            }
        }
    }

    #[test]
    fn isomorphism_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = pat(PatternId::Kite);
        let phi = LinearMap::random_invertible(6, &mut rng);
        let img = k.map(&phi);
        let psi = find_isomorphism(&k, &img).unwrap();
        assert_eq!(k.map(&psi), img);
        assert!(!is_isomorphic(&pat(PatternId::I(4)), &pat(PatternId::C(4))));
        let ag3 = pat(PatternId::AG(3));
        assert!(!is_isomorphic(&ag3.direct_sum(&ag3), &ag3.double_k(3)));
        // C4 and AG3 coincide
        assert!(is_isomorphic(&pat(PatternId::C(4)), &ag3));
        assert!(!is_isomorphic(&pat(PatternId::PGS(1, 3)), &pat(PatternId::AG(4))));
    }

    #[test]
    fn isomorphism_rank_deficient() {
        let a = m(4, &[1, 2]);
        let b = m(4, &[3, 12]);
        let phi = find_isomorphism(&a, &b).unwrap();
        assert_eq!(a.map(&phi), b);
        assert!(!is_isomorphic(&m(4, &[1, 2, 3]), &m(4, &[1, 2, 4])));
    }

    #[test]
    fn canonical_form_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for id in [PatternId::I(3), PatternId::C(5), PatternId::Kite, PatternId::PGS(1, 2), PatternId::AG(4)] {
            let base = pat(id);
            let cf = canonical_form(&base);
            for _ in 0..20 {
                let phi = LinearMap::random_invertible(base.dim(), &mut rng);
                assert_eq!(canonical_form(&base.map(&phi)), cf, "{id}");
            }
            assert_eq!(canonical_form(&cf.matroid()), cf, "idempotent {id}");
            assert!(is_isomorphic(&cf.matroid(), &base));
        }
    }

    #[test]
    fn canonical_form_dense_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pg6 = pat(PatternId::PG(6));
        assert_eq!(canonical_form(&pg6).points, (1..64).collect::<Vec<Point>>());
        for _ in 0..200 {
            let n = rng.gen_range(3..=5);
            let top = (1u32 << n) - 1;
            let a = Matroid::new(n, (1..=top).filter(|_| rng.gen_bool(0.7))).unwrap();
            let b = Matroid::new(n, (1..=top).filter(|_| rng.gen_bool(0.7))).unwrap();
            let phi = LinearMap::random_invertible(n, &mut rng);
            let ca = canonical_form(&a);
            assert_eq!(canonical_form(&a.map(&phi)), ca);
            assert!(is_isomorphic(&ca.matroid(), &a));
            assert_eq!(canonical_form(&b) == ca, is_isomorphic(&a, &b));
        }
    }

    #[test]
    fn canonical_forms_separate_extremal_families() {
        let d_pgs12 = pat(PatternId::PGS(1, 2)).double();
        let forms = [canonical_form(&pat(PatternId::AG(4))), canonical_form(&d_pgs12), canonical_form(&pat(PatternId::PGS(1, 3)))];
        let mats = [pat(PatternId::AG(4)), d_pgs12.clone(), pat(PatternId::PGS(1, 3))];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(forms[i] == forms[j], is_isomorphic(&mats[i], &mats[j]), "{i} {j}");
            }
        }
    }

    #[test]
    fn canonical_form_rank_deficient() {
        let a = m(5, &[1, 2, 4, 7]);
        let b = m(5, &[8, 16, 1, 25]);
        let ca = canonical_form(&a);
        assert_eq!((ca.rank, ca.corank), (3, 2));
        assert_eq!(ca, canonical_form(&b));
    }
}

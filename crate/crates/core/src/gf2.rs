//! Linear algebra over GF(2) on an explicit ambient geometry.
//!
//! A point of `PG(n-1, 2)` is a nonzero vector of `F_2^n`, stored as an `n`-bit
//! mask with coordinate `i` in bit `i`. Addition is XOR. Ground sets, flats and
//! cosets are all [`PointSet`]s: dense bitsets indexed by the point value.

use std::fmt;

use num_bigint::BigUint;

use crate::error::Error;

/// A nonzero vector of `F_2^n` as a bitmask.
pub type Point = u32;

/// Hard cap on the ambient dimension. A dense set over `2^24 - 1` points is 2 MiB.
pub const MAX_DIM: usize = 24;

pub fn check_dim(n: usize) -> Result<(), Error> {
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: n, max: MAX_DIM });
    }
    Ok(())
}

/// Number of points of `PG(n-1, 2)`.
#[inline]
pub fn num_points(n: usize) -> usize {
    (1usize << n) - 1
}

#[inline]
fn leading_bit(v: Point) -> u32 {
    31 - v.leading_zeros()
}

/// Dense bitset over the points of an `n`-dimensional ambient geometry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    dim: usize,
    words: Vec<u64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "ambient dimension {dim} exceeds {MAX_DIM}");
        let words = ((1usize << dim) + 63) / 64;
        PointSet { dim, words: vec![0; words] }
    }

    /// Every point of the geometry.
    pub fn full(dim: usize) -> Self {
        let mut s = PointSet::new(dim);
        for p in 1..(1u32 << dim) {
            s.insert(p);
        }
        s
    }

    /// Builds a set from points, rejecting zero and out-of-range values.
    pub fn from_points<I: IntoIterator<Item = Point>>(dim: usize, points: I) -> Result<Self, Error> {
        check_dim(dim)?;
        let mut s = PointSet::new(dim);
        for p in points {
            if p == 0 || (p as u64) >= (1u64 << dim) {
                return Err(Error::PointOutOfRange { point: p as u64, dim });
            }
            s.insert(p);
        }
        Ok(s)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn in_range(&self, p: Point) -> bool {
        p != 0 && (p as u64) < (1u64 << self.dim)
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        if !self.in_range(p) {
            return false;
        }
        (self.words[(p >> 6) as usize] >> (p & 63)) & 1 == 1
    }

    /// Inserts `p`; returns true if it was absent. Panics on an invalid point.
    #[inline]
    pub fn insert(&mut self, p: Point) -> bool {
        assert!(self.in_range(p), "point {p} is not in PG({}, 2)", self.dim as i64 - 1);
        let w = &mut self.words[(p >> 6) as usize];
        let bit = 1u64 << (p & 63);
        let was = *w & bit != 0;
        *w |= bit;
        !was
    }

    #[inline]
    pub fn remove(&mut self, p: Point) -> bool {
        if !self.in_range(p) {
            return false;
        }
        let w = &mut self.words[(p >> 6) as usize];
        let bit = 1u64 << (p & 63);
        let was = *w & bit != 0;
        *w &= !bit;
        was
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Points in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = (i as u32) << 6;
            BitIter(w).map(move |b| base + b)
        })
    }

    pub fn to_vec(&self) -> Vec<Point> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<Point> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<Point> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| ((i as u32) << 6) + 63 - w.leading_zeros())
    }

    fn same_dim(&self, other: &PointSet) {
        assert_eq!(self.dim, other.dim, "point sets live in different ambient spaces");
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        self.same_dim(other);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        PointSet { dim: self.dim, words }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        self.same_dim(other);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        PointSet { dim: self.dim, words }
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        self.same_dim(other);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        PointSet { dim: self.dim, words }
    }

    pub fn intersection_len(&self, other: &PointSet) -> usize {
        self.same_dim(other);
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.same_dim(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.same_dim(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// `{x + w : x in self}`; `None` if the translate would contain the zero vector.
    pub fn translate(&self, w: Point) -> Option<PointSet> {
        if self.contains(w) {
            return None;
        }
        let mut out = PointSet::new(self.dim);
        for x in self.iter() {
            out.insert(x ^ w);
        }
        Some(out)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// A flat (subspace minus zero) together with its reduced echelon basis.
///
/// The basis is fully reduced: each basis vector's leading bit (its pivot)
/// appears in no other basis vector, and pivots strictly increase. That makes
/// the basis a unique representative of the flat.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Flat {
    basis: Vec<Point>,
    members: PointSet,
}

impl Flat {
    pub fn empty(dim: usize) -> Flat {
        Flat { basis: Vec::new(), members: PointSet::new(dim) }
    }

    /// The span of `gens` in an ambient space of dimension `dim`.
    pub fn span<I: IntoIterator<Item = Point>>(dim: usize, gens: I) -> Flat {
        let mut basis: Vec<Point> = Vec::new();
        for g in gens {
            insert_reduced(&mut basis, g);
        }
        Flat::from_reduced(dim, basis)
    }

    /// The whole geometry.
    pub fn full(dim: usize) -> Flat {
        Flat::span(dim, (0..dim).map(|i| 1 << i))
    }

    fn from_reduced(dim: usize, basis: Vec<Point>) -> Flat {
        let mut members = PointSet::new(dim);
        for v in span_points(&basis).into_iter().skip(1) {
            members.insert(v);
        }
        Flat { basis, members }
    }

    /// Dimension of the flat as a vector space.
    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.members.dim()
    }

    #[inline]
    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    #[inline]
    pub fn members(&self) -> &PointSet {
        &self.members
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.members.contains(p)
    }

    /// Number of points, `2^dim - 1`.
    pub fn len(&self) -> usize {
        (1usize << self.dim()) - 1
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = u32> + '_ {
        self.basis.iter().map(|&b| leading_bit(b))
    }

    /// Coordinates of `p` (or zero) with respect to the basis: bit `i` is the
    /// coefficient of `basis[i]`. `None` if `p` is outside the flat.
    pub fn coords(&self, p: Point) -> Option<Point> {
        let mut c = 0;
        let mut r = p;
        for (i, &b) in self.basis.iter().enumerate() {
            if (p >> leading_bit(b)) & 1 == 1 {
                c |= 1 << i;
                r ^= b;
            }
        }
        (r == 0).then_some(c)
    }

    /// The point with the given coordinates.
    pub fn point_at(&self, coords: Point) -> Point {
        combine(&self.basis, coords)
    }

    /// Representative of `p + <F>` with every pivot bit cleared.
    pub fn reduce(&self, p: Point) -> Point {
        let mut r = p;
        for &b in &self.basis {
            if (r >> leading_bit(b)) & 1 == 1 {
                r ^= b;
            }
        }
        r
    }

    /// Unit vectors on the non-pivot coordinates, in increasing order. They
    /// span a complement of this flat.
    pub fn complement_basis(&self) -> Vec<Point> {
        let pivots: u32 = self.pivots().fold(0, |acc, p| acc | (1 << p));
        (0..self.ambient_dim() as u32).filter(|i| pivots >> i & 1 == 0).map(|i| 1 << i).collect()
    }

    pub fn is_subflat_of(&self, other: &Flat) -> bool {
        self.basis.iter().all(|&b| other.contains(b))
    }

    pub fn meets(&self, other: &Flat) -> bool {
        !self.members.is_disjoint(&other.members)
    }

    /// Sorted member list.
    pub fn points(&self) -> Vec<Point> {
        self.members.to_vec()
    }
}

impl fmt::Debug for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Flat(dim {}, basis {:?})", self.dim(), self.basis)
    }
}

/// Inserts `v` into a fully reduced echelon basis kept sorted by pivot.
/// Returns false if `v` was already in the span.
pub(crate) fn insert_reduced(basis: &mut Vec<Point>, v: Point) -> bool {
    let mut r = v;
    for &b in basis.iter() {
        if (r >> leading_bit(b)) & 1 == 1 {
            r ^= b;
        }
    }
    if r == 0 {
        return false;
    }
    let pivot = leading_bit(r);
    for b in basis.iter_mut() {
        if (*b >> pivot) & 1 == 1 {
            *b ^= r;
        }
    }
    let pos = basis.partition_point(|&b| leading_bit(b) < pivot);
    basis.insert(pos, r);
    true
}

/// `sum_i c_i * gens[i]` for the bits `c_i` of `coords`.
#[inline]
pub fn combine(gens: &[Point], coords: Point) -> Point {
    let mut acc = 0;
    let mut c = coords;
    while c != 0 {
        let i = c.trailing_zeros() as usize;
        acc ^= gens[i];
        c &= c - 1;
    }
    acc
}

/// All `2^k` combinations of `gens`, indexed by coordinate vector (entry 0 is zero).
pub fn span_points(gens: &[Point]) -> Vec<Point> {
    let mut out = Vec::with_capacity(1 << gens.len());
    out.push(0);
    for &g in gens {
        let len = out.len();
        for i in 0..len {
            out.push(out[i] ^ g);
        }
    }
    out
}

pub fn is_independent(points: &[Point]) -> bool {
    let mut basis = Vec::with_capacity(points.len());
    points.iter().all(|&p| insert_reduced(&mut basis, p))
}

/// Span of a point set.
pub fn closure(s: &PointSet) -> Flat {
    Flat::span(s.dim(), s.iter())
}

pub fn rank_of(s: &PointSet) -> usize {
    let mut basis = Vec::new();
    for p in s.iter() {
        insert_reduced(&mut basis, p);
        if basis.len() == s.dim() {
            break;
        }
    }
    basis.len()
}

/// Number of `k`-dimensional subspaces of `F_2^n`; zero when `k > n`.
pub fn gaussian_binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let one = BigUint::from(1u32);
    let mut num = one.clone();
    let mut den = one.clone();
    for i in 0..k {
        num *= (&one << (n - i)) - &one;
        den *= (&one << (i + 1)) - &one;
    }
    num / den
}

/// Calls `f` on the reduced basis of every `k`-dimensional subspace of `F_2^n`.
pub(crate) fn for_each_reduced_basis(n: usize, k: usize, mut f: impl FnMut(&[Point])) {
    if k > n {
        return;
    }
    let mut pivots = Vec::with_capacity(k);
    choose_pivots(n, k, 0, &mut pivots, &mut f);
}

fn choose_pivots(n: usize, k: usize, start: usize, pivots: &mut Vec<u32>, f: &mut impl FnMut(&[Point])) {
    if pivots.len() == k {
        let pivot_mask: u32 = pivots.iter().fold(0, |a, &p| a | (1 << p));
        // free coordinates of each row: non-pivot bits below its pivot
        let free: Vec<Vec<u32>> = pivots
            .iter()
            .map(|&p| (0..p).filter(|q| pivot_mask >> q & 1 == 0).collect())
            .collect();
        let total_free: usize = free.iter().map(Vec::len).sum();
        let mut basis = vec![0 as Point; k];
        for assignment in 0u64..(1u64 << total_free) {
            let mut bit = 0;
            for (row, &p) in pivots.iter().enumerate() {
                let mut v = 1 << p;
                for &q in &free[row] {
                    if assignment >> bit & 1 == 1 {
                        v |= 1 << q;
                    }
                    bit += 1;
                }
                basis[row] = v;
            }
            f(&basis);
        }
        return;
    }
    for p in start..n {
        if n - p < k - pivots.len() {
            break;
        }
        pivots.push(p as u32);
        choose_pivots(n, k, p + 1, pivots, f);
        pivots.pop();
    }
}

/// Every `k`-flat of `PG(n-1, 2)` exactly once, ordered lexicographically by
/// sorted member list.
pub fn enumerate_flats(n: usize, k: usize) -> impl Iterator<Item = Flat> {
    let mut flats = Vec::new();
    for_each_reduced_basis(n, k, |b| flats.push(Flat::from_reduced(n, b.to_vec())));
    flats.sort_by_cached_key(|f| f.points());
    flats.into_iter()
}

/// Every `l`-flat disjoint from `avoid`, in the same order as [`enumerate_flats`].
pub fn enumerate_flats_avoiding(n: usize, l: usize, avoid: &Flat) -> impl Iterator<Item = Flat> + '_ {
    enumerate_flats(n, l).filter(move |f| !f.meets(avoid))
}

/// The cosets `x + <F>` for `x` outside `F`, ordered by smallest member. The
/// flat itself is not a coset.
pub fn cosets(f: &Flat) -> Vec<PointSet> {
    let n = f.ambient_dim();
    let vs = span_points(f.basis());
    let mut seen = f.members().clone();
    let mut out = Vec::with_capacity((1usize << (n - f.dim())).saturating_sub(1));
    for x in 1..(1u32 << n) {
        if seen.contains(x) {
            continue;
        }
        let mut c = PointSet::new(n);
        for &v in &vs {
            c.insert(x ^ v);
            seen.insert(x ^ v);
        }
        out.push(c);
    }
    out
}

/// Result of [`stabilizer`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub flat: Flat,
    /// True when the input set was empty, so every translation fixes it.
    pub vacuous: bool,
}

/// `{w in W : S + w = S}`, which is always a subflat of `W`.
pub fn stabilizer(s: &PointSet, w: &Flat) -> Stabilizer {
    if s.is_empty() {
        return Stabilizer { flat: w.clone(), vacuous: true };
    }
    let fixing = w.members().iter().filter(|&t| s.iter().all(|x| x != t && s.contains(x ^ t)));
    Stabilizer { flat: Flat::span(w.ambient_dim(), fixing), vacuous: false }
}

/// An injective linear map `F_2^k -> F_2^n`, given by the images of the unit vectors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearMap {
    images: Vec<Point>,
    target_dim: usize,
}

impl LinearMap {
    pub fn new(images: Vec<Point>, target_dim: usize) -> Result<Self, Error> {
        check_dim(target_dim)?;
        if images.iter().any(|&p| p == 0 || (p as u64) >= (1u64 << target_dim)) || !is_independent(&images) {
            return Err(Error::SingularMap);
        }
        Ok(LinearMap { images, target_dim })
    }

    pub fn identity(n: usize) -> Self {
        LinearMap { images: (0..n).map(|i| 1 << i).collect(), target_dim: n }
    }

    /// A uniformly random element of `GL(n, 2)`.
    pub fn random_invertible<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let images: Vec<Point> = (0..n).map(|_| rng.gen_range(1..(1u32 << n))).collect();
            if is_independent(&images) {
                return LinearMap { images, target_dim: n };
            }
        }
    }

    #[inline]
    pub fn apply(&self, x: Point) -> Point {
        combine(&self.images, x)
    }

    pub fn images(&self) -> &[Point] {
        &self.images
    }

    pub fn source_dim(&self) -> usize {
        self.images.len()
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn is_invertible(&self) -> bool {
        self.images.len() == self.target_dim
    }

    pub fn image_flat(&self) -> Flat {
        Flat::span(self.target_dim, self.images.iter().copied())
    }

    pub fn inverse(&self) -> Option<LinearMap> {
        if !self.is_invertible() {
            return None;
        }
        let n = self.target_dim;
        let flat = Flat::span(n, self.images.iter().copied());
        // coords w.r.t. the reduced basis, then convert to coords w.r.t. images
        let to_reduced: Vec<Point> = self.images.iter().map(|&p| flat.coords(p).unwrap()).collect();
        let mut inv = Vec::with_capacity(n);
        for i in 0..n {
            let target = flat.coords(1 << i).unwrap();
            inv.push(solve_coords(&to_reduced, target)?);
        }
        Some(LinearMap { images: inv, target_dim: n })
    }
}

/// Finds `c` with `combine(gens, c) == target`, if the target is in the span.
pub fn solve_coords(gens: &[Point], target: Point) -> Option<Point> {
    // elimination carrying the combination that produced each row
    let mut rows: Vec<(Point, Point)> = Vec::new();
    for (i, &g) in gens.iter().enumerate() {
        let mut v = (g, 1 << i);
        for &(r, c) in &rows {
            if (v.0 >> leading_bit(r)) & 1 == 1 {
                v.0 ^= r;
                v.1 ^= c;
            }
        }
        if v.0 != 0 {
            rows.push(v);
            rows.sort_by_key(|&(r, _)| std::cmp::Reverse(leading_bit(r)));
        }
    }
    let mut t = (target, 0);
    for &(r, c) in &rows {
        if t.0 != 0 && (t.0 >> leading_bit(r)) & 1 == 1 {
            t.0 ^= r;
            t.1 ^= c;
        }
    }
    (t.0 == 0).then_some(t.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn set(n: usize, pts: &[Point]) -> PointSet {
        PointSet::from_points(n, pts.iter().copied()).unwrap()
    }

    #[test]
    fn closure_examples() {
        let f = closure(&set(3, &[1, 2]));
        assert_eq!(f.points(), vec![1, 2, 3]);
        assert_eq!(f.dim(), 2);
        let e = closure(&PointSet::new(3));
        assert!(e.points().is_empty());
        assert_eq!(e.dim(), 0);
        let all = closure(&set(3, &[3, 5, 6]));
        // 3 + 5 = 6, so only rank 2
        assert_eq!(all.dim(), 2);
        assert_eq!(all.points(), vec![3, 5, 6]);
    }

    #[test]
    fn closure_of_three_independent_weight_two_vectors() {
        // {3, 5, 7}: 3+5 = 6, 3+7 = 4, so rank 3
        let f = closure(&set(3, &[3, 5, 7]));
        assert_eq!(f.dim(), 3);
        assert_eq!(f.len(), 7);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_of(&set(3, &[1, 2, 3])), 2);
        assert_eq!(rank_of(&PointSet::new(3)), 0);
        let kite = set(6, &[1, 2, 4, 8, 16, 32, 7, 14, 21, 35]);
        assert_eq!(rank_of(&kite), 6);
    }

    #[test]
    fn reduced_basis_is_unique_per_flat() {
        let a = Flat::span(4, [3, 5]);
        let b = Flat::span(4, [6, 5]);
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[3, 5]);
        let piv: Vec<u32> = a.pivots().collect();
        assert!(piv.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn coords_round_trip() {
        let f = Flat::span(5, [3, 12, 17]);
        for p in f.points() {
            let c = f.coords(p).unwrap();
            assert_eq!(f.point_at(c), p);
        }
        assert_eq!(f.coords(8), None);
    }

    #[test]
    fn gaussian_binomial_values() {
        assert_eq!(gaussian_binomial(3, 1), BigUint::from(7u32));
        assert_eq!(gaussian_binomial(4, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(9, 0), BigUint::from(1u32));
        assert_eq!(gaussian_binomial(3, 4), BigUint::from(0u32));
        // exceeds u64 range comfortably below the cap
        let big = gaussian_binomial(24, 12);
        assert!(big.bits() > 64);
    }

    fn brute_force_subspace_count(n: usize, k: usize) -> usize {
        // all k-tuples of points whose span is k-dimensional, deduplicated by member set
        let mut seen = BTreeSet::new();
        let pts: Vec<Point> = (1..(1u32 << n)).collect();
        fn rec(pts: &[Point], start: usize, k: usize, cur: &mut Vec<Point>, n: usize, seen: &mut BTreeSet<Vec<Point>>) {
            if cur.len() == k {
                if is_independent(cur) {
                    let mut m: Vec<Point> = span_points(cur).into_iter().skip(1).collect();
                    m.sort_unstable();
                    seen.insert(m);
                }
                return;
            }
            for i in start..pts.len() {
                cur.push(pts[i]);
                rec(pts, i + 1, k, cur, n, seen);
                cur.pop();
            }
        }
        rec(&pts, 0, k, &mut Vec::new(), n, &mut seen);
        if k == 0 {
            return 1;
        }
        seen.len()
    }

    #[test]
    fn enumerate_flats_matches_brute_force() {
        assert_eq!(enumerate_flats(3, 2).count(), 7);
        assert_eq!(enumerate_flats(3, 3).count(), 1);
        assert_eq!(enumerate_flats(4, 1).count(), 15);
        for n in 0..=4 {
            for k in 0..=n {
                assert_eq!(enumerate_flats(n, k).count(), brute_force_subspace_count(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn enumerate_flats_counts_equal_gaussian_binomial() {
        for n in 0..=6 {
            for k in 0..=n {
                let count = enumerate_flats(n, k).count();
                assert_eq!(BigUint::from(count), gaussian_binomial(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn enumerate_flats_is_lexicographic_and_distinct() {
        let all: Vec<Vec<Point>> = enumerate_flats(5, 2).map(|f| f.points()).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn avoiding_examples() {
        let d = Flat::span(3, [1]);
        assert_eq!(enumerate_flats_avoiding(3, 1, &d).count(), 6);
        assert_eq!(enumerate_flats_avoiding(2, 1, &Flat::empty(2)).count(), 3);
        let d = Flat::span(6, [1]);
        assert_eq!(enumerate_flats_avoiding(6, 4, &d).count(), 496);
    }

    #[test]
    fn cosets_examples() {
        let c = cosets(&Flat::span(2, [1]));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].to_vec(), vec![2, 3]);
        let c = cosets(&Flat::span(3, [1, 2]));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len(), 4);
        let c = cosets(&Flat::empty(3));
        assert_eq!(c.len(), 7);
        assert!(c.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn cosets_partition_the_complement() {
        for n in 1..=5 {
            for k in 0..=n {
                for f in enumerate_flats(n, k) {
                    let cs = cosets(&f);
                    assert_eq!(cs.len(), (1 << (n - k)) - 1);
                    let mut union = f.members().clone();
                    let mut total = f.len();
                    for c in &cs {
                        assert_eq!(c.len(), 1 << k);
                        assert!(c.is_disjoint(&union));
                        union = union.union(c);
                        total += c.len();
                    }
                    assert_eq!(total, num_points(n));
                }
            }
        }
    }

    #[test]
    fn stabilizer_examples() {
        let w = Flat::span(4, [1, 2]);
        // full coset 4 + <W>
        let coset = set(4, &[4, 5, 6, 7]);
        assert_eq!(stabilizer(&coset, &w).flat, w);
        assert!(stabilizer(&set(4, &[9]), &w).flat.is_empty());
        let pair = set(4, &[8, 8 ^ 3]);
        assert_eq!(stabilizer(&pair, &w).flat, Flat::span(4, [3]));
        let vac = stabilizer(&PointSet::new(4), &w);
        assert!(vac.vacuous);
        assert_eq!(vac.flat, w);
    }

    #[test]
    fn linear_map_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=7 {
            let m = LinearMap::random_invertible(n, &mut rng);
            let inv = m.inverse().unwrap();
            for _ in 0..20 {
                let x = rng.gen_range(1..(1u32 << n));
                assert_eq!(inv.apply(m.apply(x)), x);
            }
        }
        assert!(LinearMap::new(vec![1, 2, 3], 3).is_err());
    }

    #[test]
    fn point_set_bounds() {
        assert!(PointSet::from_points(2, [5]).is_err());
        assert!(PointSet::from_points(2, [0]).is_err());
        let s = set(7, &[1, 64, 127]);
        assert_eq!(s.max(), Some(127));
        assert_eq!(s.min(), Some(1));
        assert_eq!(s.to_vec(), vec![1, 64, 127]);
    }
}

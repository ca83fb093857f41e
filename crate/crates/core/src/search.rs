//! Exhaustive extremal search and constrained random generation.
//!
//! Full-rank searches fix the standard basis inside `E` and add further
//! points in increasing order. A node is kept only if its set of added
//! points is the least member of its orbit under coordinate permutations
//! (orderly generation); removing the largest point of such a set leaves a
//! set with the same property, so every orbit is reached exactly once.
//!
//! A copy of a non-monotone pattern on a flat `W` can only be destroyed by a
//! later point of `W \ E`. Branches where some copy has no admissible later
//! point, or where more disjoint repairs are needed than slots remain, are cut.

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::PatternId;
use crate::detect::{canonical_form, is_affine, CanonicalForm, Detector};
use crate::error::Error;
use crate::gf2::{num_points, span_points, Flat, Point, PointSet};
use crate::matroid::Matroid;

/// Default dimension cap for exhaustive search.
pub const DEFAULT_MAX_SEARCH_DIM: usize = 8;

/// Coordinate permutations are used for symmetry reduction up to this dimension.
const MAX_PERM_DIM: usize = 8;

/// Dimension cap, overridable through `BINMAT_MAX_DIM`.
pub fn max_search_dim() -> usize {
    std::env::var("BINMAT_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_SEARCH_DIM)
        .min(crate::gf2::MAX_DIM)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub dim: usize,
    pub forbidden: Vec<PatternId>,
    pub require_full_rank: bool,
    pub max_size: Option<usize>,
    pub classify: bool,
    pub seed: u64,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub threads: Option<usize>,
    pub max_dim: usize,
    /// Pattern planted on a flat whose other points stay outside `E`.
    pub forcing: Option<Forcing>,
}

impl SearchSpec {
    pub fn new(dim: usize, forbidden: Vec<PatternId>) -> SearchSpec {
        SearchSpec {
            dim,
            forbidden,
            require_full_rank: false,
            max_size: None,
            classify: false,
            seed: 0,
            node_limit: None,
            time_limit: None,
            threads: None,
            max_dim: max_search_dim(),
            forcing: None,
        }
    }

    pub fn full_rank(mut self) -> Self {
        self.require_full_rank = true;
        self
    }

    pub fn classify(mut self) -> Self {
        self.classify = true;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.dim == 0 {
            return Err(Error::Spec("dimension must be at least 1".into()));
        }
        if self.dim > self.max_dim {
            return Err(Error::DimensionTooLarge { dim: self.dim, max: self.max_dim });
        }
        if self.forbidden.is_empty() {
            return Err(Error::Spec("no forbidden patterns".into()));
        }
        for p in &self.forbidden {
            p.validate()?;
        }
        if let Some(f) = &self.forcing {
            if f.flat.ambient_dim() != self.dim {
                return Err(Error::AmbientMismatch { flat: f.flat.ambient_dim(), matroid: self.dim });
            }
        }
        Ok(())
    }

    /// Points every matroid in the search contains, and points none contains.
    fn base(&self) -> (PointSet, PointSet) {
        let n = self.dim;
        let mut base = PointSet::new(n);
        let mut frozen = PointSet::new(n);
        let mut flat = Flat::empty(n);
        if let Some(f) = &self.forcing {
            base = f.pattern.place_on(&f.flat).expect("checked dimensions").ground().clone();
            frozen = f.flat.members().clone();
            flat = f.flat.clone();
        }
        if self.require_full_rank {
            for p in flat.complement_basis() {
                base.insert(p);
            }
        }
        (base, frozen)
    }

    fn size_range(&self) -> (usize, usize) {
        let lo = self.base().0.len();
        let hi = self.max_size.unwrap_or(num_points(self.dim)).min(num_points(self.dim));
        (lo, hi)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    /// Least size admitting a matroid that meets the spec, if one was found.
    pub min_size: Option<usize>,
    /// Every size below this one was searched completely without success.
    pub lower_bound: usize,
    /// Isomorphism classes at `min_size` (filled when classifying).
    pub extremal: Vec<CanonicalForm>,
    /// One matroid of size `min_size`.
    pub example: Option<Matroid>,
    /// Generated representatives at `min_size`, before isomorphism merging.
    pub solutions: u64,
    pub nodes: u64,
    pub elapsed_ms: u64,
    pub exhaustive: bool,
}

/// True when `m` has no induced copy of any pattern in `forbidden` and,
/// if asked, is full-rank. Uses fresh detectors only.
pub fn satisfies(m: &Matroid, forbidden: &[PatternId], full_rank: bool) -> Result<bool, Error> {
    if full_rank && !m.is_full_rank() {
        return Ok(false);
    }
    for &p in forbidden {
        if Detector::new(p)?.find(m).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Budget {
    start: Instant,
    node_limit: Option<u64>,
    time_limit: Option<Duration>,
    nodes: AtomicU64,
    hit: AtomicBool,
}

impl Budget {
    fn new(spec: &SearchSpec) -> Budget {
        Budget {
            start: Instant::now(),
            node_limit: spec.node_limit,
            time_limit: spec.time_limit,
            nodes: AtomicU64::new(0),
            hit: AtomicBool::new(false),
        }
    }

    /// Accounts for a batch of nodes; returns false once the budget is spent.
    fn charge(&self, batch: u64) -> bool {
        let total = self.nodes.fetch_add(batch, Ordering::Relaxed) + batch;
        if self.node_limit.is_some_and(|l| total > l) || self.time_limit.is_some_and(|t| self.start.elapsed() > t) {
            self.hit.store(true, Ordering::Relaxed);
        }
        !self.hit.load(Ordering::Relaxed)
    }

    fn exhausted(&self) -> bool {
        self.hit.load(Ordering::Relaxed)
    }
}

#[derive(Default)]
struct PassOut {
    nodes: u64,
    solutions: u64,
    first: Option<Vec<Point>>,
    classes: BTreeSet<CanonicalForm>,
}

impl PassOut {
    fn merge(&mut self, other: PassOut) {
        self.nodes += other.nodes;
        self.solutions += other.solutions;
        if self.first.is_none() {
            self.first = other.first;
        }
        self.classes.extend(other.classes);
    }
}

struct Node {
    set: PointSet,
    pts: Vec<Point>,
    extras: Vec<Point>,
    pending: u64,
}

impl Node {
    fn add(&mut self, p: Point) {
        self.set.insert(p);
        let at = self.pts.binary_search(&p).unwrap_err();
        self.pts.insert(at, p);
        self.extras.push(p);
    }

    fn pop(&mut self) {
        let p = self.extras.pop().expect("nonempty");
        self.set.remove(p);
        let at = self.pts.binary_search(&p).expect("present");
        self.pts.remove(at);
    }
}

/// Compiled constraints shared by search and generation.
struct Constraints {
    n: usize,
    triangle: bool,
    monotone: Vec<Detector>,
    repairable: Vec<Detector>,
}

impl Constraints {
    fn new(n: usize, forbidden: &[PatternId]) -> Result<Constraints, Error> {
        let mut triangle = false;
        let mut monotone = Vec::new();
        let mut repairable = Vec::new();
        for &p in forbidden {
            let d = Detector::new(p)?;
            if d.pattern().dim() > n {
                continue;
            }
            if d.is_triangle() {
                triangle = true;
            } else if d.is_monotone() {
                monotone.push(d);
            } else {
                repairable.push(d);
            }
        }
        Ok(Constraints { n, triangle, monotone, repairable })
    }

    /// Points completing a triangle with two points of the set, if triangles
    /// are forbidden.
    fn blocked(&self, set: &PointSet, pts: &[Point]) -> PointSet {
        let mut b = PointSet::new(set.dim());
        if self.triangle {
            for (i, &x) in pts.iter().enumerate() {
                for &y in &pts[i + 1..] {
                    b.insert(x ^ y);
                }
            }
        }
        b
    }

    /// Adding `p` to `set` creates no copy of a monotone pattern.
    fn admissible_monotone(&self, set: &PointSet, pts: &[Point], p: Point) -> bool {
        if self.monotone.is_empty() {
            return true;
        }
        let mut s = set.clone();
        s.insert(p);
        let mut v = pts.to_vec();
        v.push(p);
        v.sort_unstable();
        self.monotone.iter().all(|d| d.visit(&s, &v, &mut |_| ControlFlow::Break(())).is_continue())
    }

    /// A monotone copy inside the given set (these can never be repaired).
    fn has_copy_among(&self, set: &PointSet, pts: &[Point]) -> bool {
        (self.triangle && pts.iter().enumerate().any(|(i, &x)| pts[i + 1..].iter().any(|&y| set.contains(x ^ y))))
            || self.monotone.iter().any(|d| d.visit(set, pts, &mut |_| ControlFlow::Break(())).is_break())
    }

    /// Lower bound on points still needed: `None` if some copy cannot be
    /// destroyed by any point of `allowed`, else a greedy count of copies
    /// with pairwise disjoint repair sets (capped at `cap + 1`).
    fn repairs_needed(&self, set: &PointSet, pts: &[Point], allowed: &PointSet, cap: usize) -> Option<usize> {
        let mut used = PointSet::new(self.n);
        let mut count = 0usize;
        let mut fixers: Vec<Point> = Vec::with_capacity(32);
        let mut dead = false;
        for d in &self.repairable {
            let flow = d.visit(set, pts, &mut |imgs| {
                fixers.clear();
                fixers.extend(span_points(imgs).into_iter().skip(1).filter(|&v| allowed.contains(v)));
                if fixers.is_empty() {
                    dead = true;
                    return ControlFlow::Break(());
                }
                if fixers.iter().all(|&v| !used.contains(v)) {
                    for &v in &fixers {
                        used.insert(v);
                    }
                    count += 1;
                    if count > cap {
                        return ControlFlow::Break(());
                    }
                }
                ControlFlow::Continue(())
            });
            if dead {
                return None;
            }
            if flow.is_break() {
                break;
            }
        }
        Some(count)
    }
}

struct Engine {
    n: usize,
    cons: Constraints,
    base: Vec<Point>,
    candidates: Vec<Point>,
    /// Point images under every non-identity coordinate permutation.
    perms: Vec<Vec<u8>>,
    classify: bool,
}

fn permutation_tables(n: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    if n > MAX_PERM_DIM {
        return Vec::new();
    }
    let mut all = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n], &mut all);
    all.into_iter()
        .filter(|s| s.iter().enumerate().any(|(i, &j)| i != j))
        .map(|s| {
            (0..1usize << n)
                .map(|p| (0..n).filter(|&i| p >> i & 1 == 1).fold(0u8, |acc, i| acc | (1 << s[i])))
                .collect()
        })
        .collect()
}

impl Engine {
    fn new(spec: &SearchSpec) -> Result<Engine, Error> {
        Engine::build(spec, true)
    }

    fn build(spec: &SearchSpec, symmetry: bool) -> Result<Engine, Error> {
        spec.validate()?;
        let n = spec.dim;
        let cons = Constraints::new(n, &spec.forbidden)?;
        let (base_set, frozen) = spec.base();
        let base = base_set.to_vec();
        let candidates = (1..(1u32 << n)).filter(|&p| !base_set.contains(p) && !frozen.contains(p)).collect();
        // only permutations preserving the fixed part act on the search space
        let perms = if symmetry { permutation_tables(n) } else { Vec::new() }
            .into_iter()
            .filter(|t| base.iter().all(|&b| base_set.contains(t[b as usize] as Point)) && frozen.iter().all(|f| frozen.contains(t[f as usize] as Point)))
            .collect();
        Ok(Engine { n, cons, base, candidates, perms, classify: spec.classify })
    }

    fn root(&self) -> Node {
        let mut set = PointSet::new(self.n);
        for &b in &self.base {
            set.insert(b);
        }
        Node { set, pts: self.base.clone(), extras: Vec::new(), pending: 0 }
    }

    /// The added points form the least set of their orbit, comparing sets
    /// by the smallest element of the symmetric difference.
    fn is_canonical(&self, extras: &[Point]) -> bool {
        let mut xb = [0u64; 4];
        for &x in extras {
            xb[(x >> 6) as usize] |= 1 << (x & 63);
        }
        'perm: for tab in &self.perms {
            let mut sb = [0u64; 4];
            for &x in extras {
                let y = tab[x as usize];
                sb[(y >> 6) as usize] |= 1 << (y & 63);
            }
            for w in 0..4 {
                let d = sb[w] ^ xb[w];
                if d != 0 {
                    if sb[w] & d & d.wrapping_neg() != 0 {
                        return false;
                    }
                    continue 'perm;
                }
            }
        }
        true
    }

    /// Admissible future points of a node, or `None` if the node is cut.
    fn expand(&self, node: &Node, target: usize) -> Option<Vec<Point>> {
        self.expand_within(node, target, &self.candidates)
    }

    fn expand_within(&self, node: &Node, target: usize, candidates: &[Point]) -> Option<Vec<Point>> {
        let remaining = target - node.pts.len();
        let last = node.extras.last().copied().unwrap_or(0);
        let start = candidates.partition_point(|&p| p <= last);
        let blocked = self.cons.blocked(&node.set, &node.pts);
        let adm: Vec<Point> = candidates[start..]
            .iter()
            .copied()
            .filter(|&p| !node.set.contains(p) && !blocked.contains(p) && self.cons.admissible_monotone(&node.set, &node.pts, p))
            .collect();
        if adm.len() < remaining {
            return None;
        }
        let mut allowed = PointSet::new(self.n);
        for &p in &adm {
            allowed.insert(p);
        }
        match self.cons.repairs_needed(&node.set, &node.pts, &allowed, remaining) {
            Some(k) if k <= remaining => Some(adm),
            _ => None,
        }
    }

    fn leaf_ok(&self, node: &Node) -> bool {
        let empty = PointSet::new(self.n);
        self.cons.repairs_needed(&node.set, &node.pts, &empty, 0) == Some(0)
            && self.cons.monotone.iter().all(|d| d.visit(&node.set, &node.pts, &mut |_| ControlFlow::Break(())).is_continue())
    }

    fn record(&self, node: &Node, out: &mut PassOut) {
        out.solutions += 1;
        if out.first.is_none() {
            out.first = Some(node.pts.clone());
        }
        if self.classify {
            out.classes.insert(canonical_form(&Matroid::from_set(node.set.clone())));
        }
    }

    /// Depth-first exploration below `node`. With `split` set, nodes at
    /// that depth are collected instead of explored.
    fn explore(&self, node: &mut Node, target: usize, budget: &Budget, out: &mut PassOut, split: Option<(usize, &mut Vec<Vec<Point>>)>) {
        if let Some((depth, frontier)) = split {
            if node.extras.len() == depth && node.pts.len() < target {
                frontier.push(node.extras.clone());
                return;
            }
            out.nodes += 1;
            if node.pts.len() == target {
                if self.leaf_ok(node) {
                    self.record(node, out);
                }
                return;
            }
            let Some(adm) = self.expand(node, target) else { return };
            let remaining = target - node.pts.len();
            for (i, &p) in adm.iter().enumerate() {
                if adm.len() - i < remaining {
                    break;
                }
                node.add(p);
                if self.is_canonical(&node.extras) {
                    self.explore(node, target, budget, out, Some((depth, &mut *frontier)));
                }
                node.pop();
            }
            return;
        }
        out.nodes += 1;
        node.pending += 1;
        if node.pending >= 1024 {
            let ok = budget.charge(node.pending);
            node.pending = 0;
            if !ok {
                return;
            }
        } else if budget.exhausted() {
            return;
        }
        if node.pts.len() == target {
            if self.leaf_ok(node) {
                self.record(node, out);
            }
            return;
        }
        let Some(adm) = self.expand(node, target) else { return };
        let remaining = target - node.pts.len();
        for (i, &p) in adm.iter().enumerate() {
            if adm.len() - i < remaining {
                break;
            }
            node.add(p);
            if self.is_canonical(&node.extras) {
                self.explore(node, target, budget, out, None);
            }
            node.pop();
        }
    }

    /// Complete search of all canonical sets of exactly `target` points.
    fn pass(&self, target: usize, budget: &Budget) -> PassOut {
        let mut out = PassOut::default();
        let mut root = self.root();
        if target < root.pts.len() || self.cons.has_copy_among(&root.set, &root.pts) {
            return out;
        }
        let depth = (target - root.pts.len()).min(2);
        let mut frontier = Vec::new();
        self.explore(&mut root, target, budget, &mut out, Some((depth, &mut frontier)));
        let parts: Vec<PassOut> = frontier
            .par_iter()
            .map(|extras| {
                let mut node = self.root();
                for &p in extras {
                    node.add(p);
                }
                let mut o = PassOut::default();
                self.explore(&mut node, target, budget, &mut o, None);
                budget.charge(node.pending);
                o
            })
            .collect();
        for p in parts {
            out.merge(p);
        }
        out
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

fn revalidate(spec: &SearchSpec, classes: &[CanonicalForm], example: &Option<Matroid>) -> Result<(), Error> {
    for m in classes.iter().map(|c| c.matroid()).chain(example.iter().cloned()) {
        assert!(
            satisfies(&m, &spec.forbidden, spec.require_full_rank)?,
            "search emitted a matroid violating its constraints: {m:?}"
        );
    }
    Ok(())
}

fn finish(spec: &SearchSpec, engine: &Engine, target: Option<usize>, lower_bound: usize, out: PassOut, budget: &Budget) -> Result<SearchReport, Error> {
    let example = out.first.map(|pts| Matroid::new(engine.n, pts).expect("in range"));
    let extremal: Vec<CanonicalForm> = out.classes.into_iter().collect();
    revalidate(spec, &extremal, &example)?;
    Ok(SearchReport {
        min_size: target,
        lower_bound,
        extremal,
        example,
        solutions: out.solutions,
        nodes: out.nodes,
        elapsed_ms: budget.start.elapsed().as_millis() as u64,
        exhaustive: !budget.exhausted(),
    })
}

/// Least ground-set size of a matroid meeting `spec`, found by running a
/// complete pass for each size in turn.
pub fn minimum_size_search(spec: &SearchSpec) -> Result<SearchReport, Error> {
    let engine = Engine::new(spec)?;
    let budget = Budget::new(spec);
    let (lo, hi) = spec.size_range();
    with_pool(spec.threads, || {
        let mut nodes = 0;
        for t in lo..=hi {
            let mut out = engine.pass(t, &budget);
            nodes += out.nodes;
            if budget.exhausted() {
                out.nodes = nodes;
                let found = out.solutions > 0;
                return finish(spec, &engine, if found { Some(t) } else { None }, t, out, &budget);
            }
            if out.solutions > 0 {
                out.nodes = nodes;
                return finish(spec, &engine, Some(t), t, out, &budget);
            }
        }
        let out = PassOut { nodes, ..PassOut::default() };
        finish(spec, &engine, None, hi + 1, out, &budget)
    })
}

/// Isomorphism classes of matroids of exactly `size` points meeting `spec`.
pub fn classify_extremal(spec: &SearchSpec, size: usize) -> Result<(Vec<CanonicalForm>, SearchReport), Error> {
    let mut spec = spec.clone();
    spec.classify = true;
    let engine = Engine::new(&spec)?;
    let budget = Budget::new(&spec);
    let out = with_pool(spec.threads, || engine.pass(size, &budget));
    let found = out.solutions > 0;
    let report = finish(&spec, &engine, found.then_some(size), size, out, &budget)?;
    Ok((report.extremal.clone(), report))
}

/// Classes at every size in the spec's range, with total node count.
pub fn enumerate_classes(spec: &SearchSpec) -> Result<(Vec<(usize, Vec<CanonicalForm>)>, u64, bool), Error> {
    let mut spec = spec.clone();
    spec.classify = true;
    let engine = Engine::new(&spec)?;
    let budget = Budget::new(&spec);
    let (lo, hi) = spec.size_range();
    let mut all = Vec::new();
    let mut nodes = 0;
    with_pool(spec.threads, || -> Result<(), Error> {
        for t in lo..=hi {
            let out = engine.pass(t, &budget);
            nodes += out.nodes;
            let classes: Vec<CanonicalForm> = out.classes.into_iter().collect();
            revalidate(&spec, &classes, &None)?;
            if !classes.is_empty() {
                all.push((t, classes));
            }
        }
        Ok(())
    })?;
    Ok((all, nodes, !budget.exhausted()))
}

/// A pattern to be planted on a designated flat. The flat's points are
/// frozen: none outside the planted copy are ever added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forcing {
    pub pattern: Matroid,
    pub flat: Flat,
}

impl Forcing {
    pub fn new(pattern: Matroid, flat: Flat) -> Result<Forcing, Error> {
        if pattern.dim() != flat.dim() {
            return Err(Error::AmbientMismatch { flat: flat.dim(), matroid: pattern.dim() });
        }
        Ok(Forcing { pattern, flat })
    }

    /// Plants the pattern on the flat spanned by the first coordinates.
    pub fn on_leading_coordinates(pattern: Matroid, n: usize) -> Result<Forcing, Error> {
        let d = pattern.dim();
        if d > n {
            return Err(Error::InfeasibleForcing(format!("pattern of dimension {d} in dimension {n}")));
        }
        Forcing::new(pattern, Flat::span(n, (0..d).map(|i| 1 << i)))
    }
}

/// Randomized depth-first search for matroids meeting a spec. It walks the
/// tree of the exhaustive search (points added in increasing order, with
/// the same repair-count pruning) in random child order, without symmetry
/// reduction, and restarts after a node budget.
///
/// When the forbidden list forces every admissible set to be affine, the
/// candidates are further restricted to the complement of a random
/// hyperplane avoiding the fixed points. This loses nothing: a linear map
/// fixing the planted flat and the rank completion moves any such
/// hyperplane onto any other.
pub struct Generator {
    spec: SearchSpec,
    affine: bool,
    /// Node budget of a single attempt.
    pub attempt_nodes: u64,
    pub restarts: usize,
}

impl Generator {
    pub fn new(spec: &SearchSpec) -> Result<Generator, Error> {
        let mut spec = spec.clone();
        spec.forcing = None;
        spec.max_dim = spec.max_dim.max(spec.dim).min(crate::gf2::MAX_DIM);
        spec.validate()?;
        Ok(Generator { affine: forces_affine(&spec.forbidden), spec, attempt_nodes: 400, restarts: 3 })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    fn check_forcing(&self, f: &Forcing, cons: &Constraints) -> Result<(), Error> {
        if f.flat.ambient_dim() != self.spec.dim {
            return Err(Error::AmbientMismatch { flat: f.flat.ambient_dim(), matroid: self.spec.dim });
        }
        let m = &f.pattern;
        let pts = m.points();
        if cons.triangle && pts.iter().enumerate().any(|(i, &x)| pts[i + 1..].iter().any(|&y| m.contains(x ^ y))) {
            return Err(Error::InfeasibleForcing("the planted matroid contains a triangle".into()));
        }
        let bad = cons.monotone.iter().chain(&cons.repairable).find(|d| {
            d.pattern().dim() <= m.dim() && d.visit(m.ground(), &pts, &mut |_| ControlFlow::Break(())).is_break()
        });
        if let Some(d) = bad {
            return Err(Error::InfeasibleForcing(format!("the planted matroid contains {}", d.label())));
        }
        Ok(())
    }

    /// One sample of exactly `target` points, or `None` when every attempt
    /// runs out of nodes or no such matroid exists.
    pub fn generate<R: Rng>(&self, rng: &mut R, target: usize, forcing: Option<&Forcing>) -> Result<Option<Matroid>, Error> {
        let mut spec = self.spec.clone();
        spec.forcing = forcing.cloned();
        let mut engine = Engine::build(&spec, false)?;
        if let Some(f) = forcing {
            self.check_forcing(f, &engine.cons)?;
        }
        if self.affine {
            // inside an affine set only affine patterns can occur
            engine.cons.monotone.retain(|d| is_affine(d.pattern()));
            engine.cons.repairable.retain(|d| is_affine(d.pattern()));
            engine.cons.triangle = false;
        }
        let n = engine.n;
        let root = engine.root();
        if target < root.pts.len() || engine.cons.has_copy_among(&root.set, &root.pts) {
            return Ok(None);
        }
        let hyperplanes: Vec<Point> = if self.affine {
            (1..(1u32 << n)).filter(|&w| root.pts.iter().all(|&p| (p & w).count_ones() % 2 == 1)).collect()
        } else {
            vec![0]
        };
        if hyperplanes.is_empty() {
            return Ok(None);
        }
        for _ in 0..=self.restarts {
            let w = *hyperplanes.choose(rng).expect("nonempty");
            let candidates: Vec<Point> = engine.candidates.iter().copied().filter(|&p| w == 0 || (p & w).count_ones() % 2 == 1).collect();
            let mut node = engine.root();
            let mut left = self.attempt_nodes;
            match engine.sample(&mut node, target, &candidates, rng, &mut left) {
                Some(true) => return Ok(Some(Matroid::from_set(node.set))),
                Some(false) => return Ok(None),
                None => {}
            }
        }
        Ok(None)
    }
}

impl Engine {
    /// `Some(true)` with the sample left in `node`, `Some(false)` when the
    /// subtree holds no solution, `None` when the budget ran out.
    fn sample<R: Rng>(&self, node: &mut Node, target: usize, candidates: &[Point], rng: &mut R, left: &mut u64) -> Option<bool> {
        if *left == 0 {
            return None;
        }
        *left -= 1;
        if node.pts.len() == target {
            return Some(self.leaf_ok(node));
        }
        let Some(adm) = self.expand_within(node, target, candidates) else {
            return Some(false);
        };
        let remaining = target - node.pts.len();
        let mut order: Vec<usize> = (0..=adm.len() - remaining).collect();
        order.shuffle(rng);
        for i in order {
            node.add(adm[i]);
            let r = self.sample(node, target, candidates, rng, left);
            if r != Some(false) {
                if r.is_none() {
                    node.pop();
                }
                return r;
            }
            node.pop();
        }
        Some(false)
    }
}

/// True when the forbidden list excludes every odd circuit: triangles, and
/// `C5` directly or through `I3`, and the longer ones through some `I_k`
/// with `k <= 5` (a circuit of length `k + 2` restricts to `I_k`).
pub fn forces_affine(forbidden: &[PatternId]) -> bool {
    let has = |f: &dyn Fn(&PatternId) -> bool| forbidden.iter().any(f);
    has(&|p| matches!(p, PatternId::Triangle | PatternId::C(3)))
        && has(&|p| matches!(p, PatternId::C(5)) || matches!(p, PatternId::I(k) if *k <= 3))
        && has(&|p| matches!(p, PatternId::I(k) if *k <= 5))
}

/// Seeded one-shot wrapper around [`Generator`].
pub fn random_constrained(spec: &SearchSpec, target: usize, forcing: Option<&Forcing>) -> Result<Option<Matroid>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Generator::new(spec)?.generate(&mut rng, target, forcing)
}

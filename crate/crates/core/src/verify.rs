//! Desk-scale checks of the quantitative and conditional statements about
//! `I_5`-free, triangle-free binary matroids and the tools around them.
//!
//! Exhaustive claims run the complete search at a parameter point. Sampled
//! claims draw instances from seeded generator families, confirm every
//! hypothesis with fresh detectors, and only then test the conclusion. A
//! sampled claim passes only after [`VACUITY_MIN`] instances met all
//! hypotheses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{balanced_parts, build, PatternId};
use crate::detect::{find_induced, is_affine, is_isomorphic, odd_circuit_free, Detector, Witness};
use crate::error::Error;
use crate::gf2::{closure, cosets, enumerate_flats_avoiding, gaussian_binomial, num_points, Flat, Point, PointSet};
use crate::matroid::Matroid;
use crate::search::{enumerate_classes, max_search_dim, minimum_size_search, satisfies, Forcing, Generator, SearchReport, SearchSpec};

/// Hypothesis-satisfying instances a sampled claim needs before it can pass.
pub const VACUITY_MIN: u64 = 100;

/// Trial count of a sampled claim when none is given.
pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClaimId {
    MainThm,
    MrtBound,
    I3Ext,
    I3tfAg,
    AffOdd,
    C5Contr,
    Apex1,
    C5NotExt,
    MaxagContr,
    DblclawI3,
    D0,
    Dk,
    CountFlats,
    KiteBig,
    TwoTFree,
    Pqr,
    I32tExt,
    I4Bound,
}

impl ClaimId {
    pub const ALL: [ClaimId; 18] = [
        ClaimId::MainThm,
        ClaimId::MrtBound,
        ClaimId::I3Ext,
        ClaimId::I3tfAg,
        ClaimId::AffOdd,
        ClaimId::C5Contr,
        ClaimId::Apex1,
        ClaimId::C5NotExt,
        ClaimId::MaxagContr,
        ClaimId::DblclawI3,
        ClaimId::D0,
        ClaimId::Dk,
        ClaimId::CountFlats,
        ClaimId::KiteBig,
        ClaimId::TwoTFree,
        ClaimId::Pqr,
        ClaimId::I32tExt,
        ClaimId::I4Bound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClaimId::MainThm => "MAIN-THM",
            ClaimId::MrtBound => "MRT-BOUND",
            ClaimId::I3Ext => "I3-EXT",
            ClaimId::I3tfAg => "I3TF-AG",
            ClaimId::AffOdd => "AFF-ODD",
            ClaimId::C5Contr => "C5-CONTR",
            ClaimId::Apex1 => "APEX1",
            ClaimId::C5NotExt => "C5-NOT-EXT",
            ClaimId::MaxagContr => "MAXAG-CONTR",
            ClaimId::DblclawI3 => "DBLCLAW-I3",
            ClaimId::D0 => "D0",
            ClaimId::Dk => "DK",
            ClaimId::CountFlats => "COUNT-FLATS",
            ClaimId::KiteBig => "KITE-BIG",
            ClaimId::TwoTFree => "2T-FREE",
            ClaimId::Pqr => "PQR",
            ClaimId::I32tExt => "I32T-EXT",
            ClaimId::I4Bound => "I4-BOUND",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ClaimId::MainThm => "full-rank I5-free triangle-free: |E| >= 2^(floor(r/2)-1) + 2^(ceil(r/2)-1), unique extremal AG+AG for r >= 6",
            ClaimId::MrtBound => "no independent flat of rank t+1: the minimum is |M_{r,t}|, uniquely for r >= 2t",
            ClaimId::I3Ext => "full-rank I3-free: |E| >= 2^floor(r/2) + 2^ceil(r/2) - 2",
            ClaimId::I3tfAg => "full-rank I3-free triangle-free matroids are affine geometries",
            ClaimId::AffOdd => "affine iff no induced odd circuit",
            ClaimId::C5Contr => "contracting an induced C5 of a full-rank I5-free triangle-free matroid leaves an I3-free matroid",
            ClaimId::Apex1 => "cosets A, B, C = A + B of a C5 flat with |A| = 1 and 0 < |C| >= |B|: |B| <= 2 forces |C| >= 3",
            ClaimId::C5NotExt => "an induced C5 forces |E| >= the main bound, strictly for r >= 6",
            ClaimId::MaxagContr => "contracting an affine geometry with a claw above it: a larger affine geometry or a doubled kite",
            ClaimId::DblclawI3 => "with maximum affine dimension k+3, contracting an induced D^(k+1)(I3) leaves an I3-free matroid",
            ClaimId::D0 => "a hyperplane carrying C6 with a nonempty complement has at least 4 complement elements",
            ClaimId::Dk => "a hyperplane carrying D^k(C6) with a nonempty complement has at least 3*2^k + 1 complement elements",
            ClaimId::CountFlats => "l-flats avoiding a k-flat in dimension n number 2^(kl) [n-k choose l]_2",
            ClaimId::KiteBig => "an induced kite with maximum affine dimension 3 forces |E| above the main bound",
            ClaimId::TwoTFree => "contracting a maximal affine geometry leaves a 2T-free matroid unless a larger one exists",
            ClaimId::Pqr => "triangle-condition partitions (P, Q, R): cl(P) in P u Q, cosets of cl(P) inside Q or R",
            ClaimId::I32tExt => "full-rank I3-free 2T-free: |E| >= 2^(r-1), extremal AG(r) or doubled PG-sums",
            ClaimId::I4Bound => "full-rank I4-free triangle-free: |E| >= 2^(r-2) + 1",
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(
            self,
            ClaimId::C5Contr | ClaimId::Apex1 | ClaimId::MaxagContr | ClaimId::DblclawI3 | ClaimId::Dk | ClaimId::TwoTFree | ClaimId::KiteBig | ClaimId::Pqr
        )
    }

    fn stream(&self) -> u64 {
        ClaimId::ALL.iter().position(|c| c == self).expect("registered") as u64
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.trim().to_ascii_uppercase().replace('_', "-");
        ClaimId::ALL.into_iter().find(|c| c.name() == key).ok_or_else(|| Error::UnknownClaim(s.to_string()))
    }
}

impl Serialize for ClaimId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Parameters of a claim run. Unset values take the claim's default.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClaimParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_limit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_limit_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
}

impl ClaimParams {
    pub fn r(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }

    pub fn t(mut self, t: usize) -> Self {
        self.t = Some(t);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = Some(trials);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn max_dim(&self) -> usize {
        self.max_dim.unwrap_or_else(max_search_dim)
    }

    fn spec(&self, dim: usize, forbidden: &[PatternId]) -> SearchSpec {
        let mut s = SearchSpec::new(dim, forbidden.to_vec()).full_rank().seed(self.seed);
        s.threads = self.threads;
        s.node_limit = self.node_limit;
        s.time_limit = self.time_limit_ms.map(std::time::Duration::from_millis);
        s.max_dim = self.max_dim();
        s
    }

    fn trial_count(&self) -> usize {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    fn guard(&self, dim: usize) -> Result<(), Error> {
        if dim > self.max_dim() {
            return Err(Error::DimensionTooLarge { dim, max: self.max_dim() });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// A matroid refuting a claim. `revalidated` records a from-scratch check
/// with fresh detectors, done when the counterexample is built.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub matroid: Matroid,
    /// Basis of the flat the claim speaks about, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flat: Option<Vec<Point>>,
    /// Witness of the offending pattern, living in `witness_host`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_host: Option<String>,
    pub note: String,
    pub revalidated: bool,
}

impl Counterexample {
    /// `m` meets every constraint of a search although the claim rules it out.
    pub fn meeting(m: &Matroid, forbidden: &[PatternId], full_rank: bool, note: String) -> Counterexample {
        let revalidated = satisfies(m, forbidden, full_rank).unwrap_or(false);
        Counterexample { matroid: m.clone(), flat: None, witness: None, witness_host: None, note, revalidated }
    }

    /// `m` contains the pattern although the claim rules it out.
    pub fn containing(m: &Matroid, p: PatternId, note: String) -> Counterexample {
        let w = find_induced(m, p).ok().flatten();
        let revalidated = w.as_ref().is_some_and(|w| w.validate(m, &build(p).expect("valid")));
        Counterexample { matroid: m.clone(), flat: None, witness: w, witness_host: Some("matroid".into()), note, revalidated }
    }

    /// `m / f` contains the pattern although the claim rules it out.
    pub fn contraction_containing(m: &Matroid, f: &Flat, p: PatternId, note: String) -> Counterexample {
        let c = m.contract(f).ok();
        let w = c.as_ref().and_then(|c| find_induced(c, p).ok().flatten());
        let revalidated = match (&c, &w) {
            (Some(c), Some(w)) => w.validate(c, &build(p).expect("valid")),
            _ => false,
        };
        Counterexample {
            matroid: m.clone(),
            flat: Some(f.basis().to_vec()),
            witness: w,
            witness_host: Some("contraction".into()),
            note,
            revalidated,
        }
    }

    /// Anything else; `check` is the caller's independent recomputation.
    pub fn other(m: &Matroid, f: Option<&Flat>, note: String, check: bool) -> Counterexample {
        Counterexample { matroid: m.clone(), flat: f.map(|f| f.basis().to_vec()), witness: None, witness_host: None, note, revalidated: check }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub claim: ClaimId,
    pub params: ClaimParams,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Whether every search behind the verdict ran to completion.
    pub exhaustive: bool,
    pub trials: u64,
    pub samples: u64,
    pub hypothesis_hits: u64,
    pub nodes: u64,
    pub seed: u64,
    pub elapsed_ms: u64,
}

impl ClaimResult {
    fn new(claim: ClaimId, params: &ClaimParams) -> ClaimResult {
        ClaimResult {
            claim,
            params: params.clone(),
            status: Status::Pass,
            detail: String::new(),
            counterexample: None,
            exhaustive: !claim.is_sampled(),
            trials: 0,
            samples: 0,
            hypothesis_hits: 0,
            nodes: 0,
            seed: params.seed,
            elapsed_ms: 0,
        }
    }

    /// One-line summary, e.g. for the acceptance printout.
    pub fn summary(&self) -> String {
        format!("{} {} [{}]: {}", self.status, self.claim, self.param_label(), self.detail)
    }

    pub fn param_label(&self) -> String {
        let p = &self.params;
        let mut parts = Vec::new();
        for (name, v) in [("r", p.r), ("t", p.t), ("n", p.n), ("k", p.k), ("l", p.l), ("trials", p.trials)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if self.claim.is_sampled() {
            parts.push(format!("seed={}", p.seed));
        }
        parts.join(" ")
    }

    fn note(&mut self, s: impl AsRef<str>) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(s.as_ref());
    }

    fn fail(&mut self, cx: Option<Counterexample>, why: impl AsRef<str>) {
        self.status = Status::Fail;
        self.note(why);
        if self.counterexample.is_none() {
            self.counterexample = cx;
        }
    }

    fn inconclusive(&mut self, why: impl AsRef<str>) {
        if self.status == Status::Pass {
            self.status = Status::Inconclusive;
        }
        self.note(why);
    }

    fn absorb(&mut self, report: &SearchReport) {
        self.nodes += report.nodes;
        self.exhaustive &= report.exhaustive;
    }
}

/// `2^(floor(r/2)-1) + 2^(ceil(r/2)-1)`, the main bound (`r >= 2`).
pub fn main_bound(r: usize) -> usize {
    (1 << (r / 2 - 1)) + (1 << (r.div_ceil(2) - 1))
}

/// `2^floor(r/2) + 2^ceil(r/2) - 2`.
pub fn i3_bound(r: usize) -> usize {
    (1 << (r / 2)) + (1 << r.div_ceil(2)) - 2
}

pub fn mrt_size(r: usize, t: usize) -> usize {
    balanced_parts(r, t).into_iter().map(|d| (1usize << d) - 1).sum()
}

/// Outcome of [`check_minimum`].
#[derive(Clone, Debug)]
pub struct MinCheck {
    pub status: Status,
    pub report: SearchReport,
    pub counterexample: Option<Counterexample>,
    pub detail: String,
}

/// Runs the exhaustive minimum search and compares with `expected`. A
/// smaller minimum fails with the found matroid as counterexample; a larger
/// one (or none) fails without a matroid to show.
pub fn check_minimum(spec: &SearchSpec, expected: usize) -> Result<MinCheck, Error> {
    let report = minimum_size_search(spec)?;
    let (status, cx, detail) = match report.min_size {
        _ if !report.exhaustive => (Status::Inconclusive, None, format!("budget exhausted; sizes below {} excluded", report.lower_bound)),
        Some(m) if m == expected => (Status::Pass, None, format!("min {m}")),
        Some(m) if m < expected => {
            let ex = report.example.clone().expect("example at the minimum");
            let note = format!("a matroid of size {m} meets the constraints, below the expected {expected}");
            (Status::Fail, Some(Counterexample::meeting(&ex, &spec.forbidden, spec.require_full_rank, note.clone())), note)
        }
        Some(m) => (Status::Fail, None, format!("min {m} exceeds the expected {expected}")),
        None => (Status::Fail, None, format!("no matroid meets the constraints; expected {expected}")),
    };
    Ok(MinCheck { status, report, counterexample: cx, detail })
}

/// Name of the first candidate isomorphic to `m`.
pub fn identify(m: &Matroid, named: &[(String, Matroid)]) -> Option<String> {
    named.iter().find(|(_, c)| is_isomorphic(m, c)).map(|(n, _)| n.clone())
}

fn pat(p: PatternId) -> Matroid {
    build(p).expect("valid pattern")
}

pub fn run_claim(id: ClaimId, params: &ClaimParams) -> Result<ClaimResult, Error> {
    let start = Instant::now();
    let mut res = ClaimResult::new(id, params);
    match id {
        ClaimId::MainThm => main_thm(params, &mut res)?,
        ClaimId::MrtBound => mrt_bound(params, &mut res)?,
        ClaimId::I3Ext => i3_ext(params, &mut res)?,
        ClaimId::I3tfAg => i3tf_ag(params, &mut res)?,
        ClaimId::AffOdd => aff_odd(params, &mut res)?,
        ClaimId::C5Contr => c5_contr(params, &mut res)?,
        ClaimId::Apex1 => apex1(params, &mut res)?,
        ClaimId::C5NotExt => c5_not_ext(params, &mut res)?,
        ClaimId::MaxagContr => maxag_contr(params, &mut res)?,
        ClaimId::DblclawI3 => dblclaw(params, &mut res)?,
        ClaimId::D0 => d0(params, &mut res)?,
        ClaimId::Dk => dk(params, &mut res)?,
        ClaimId::CountFlats => count_flats(params, &mut res)?,
        ClaimId::KiteBig => kite_big(params, &mut res)?,
        ClaimId::TwoTFree => two_t_free(params, &mut res)?,
        ClaimId::Pqr => pqr(params, &mut res)?,
        ClaimId::I32tExt => i32t_ext(params, &mut res)?,
        ClaimId::I4Bound => i4_bound(params, &mut res)?,
    }
    res.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(res)
}

/// Every claim at every registry parameter point within `max_dim`, with
/// `trials` per sampled claim.
pub fn run_all_with(max_dim: usize, seed: u64, trials: Option<usize>) -> Vec<ClaimResult> {
    let base = ClaimParams { seed, trials, max_dim: Some(max_dim), ..ClaimParams::default() };
    let mut points: Vec<(ClaimId, ClaimParams)> = Vec::new();
    let upto = |hi: usize| 2..=hi.min(max_dim);
    for r in upto(7) {
        points.push((ClaimId::MainThm, base.clone().r(r)));
    }
    for (r, t) in [(2, 1), (3, 1), (4, 2), (5, 2), (6, 2), (6, 3)] {
        if r <= max_dim {
            points.push((ClaimId::MrtBound, base.clone().r(r).t(t)));
        }
    }
    for r in upto(6) {
        points.push((ClaimId::I3Ext, base.clone().r(r)));
    }
    for r in upto(5) {
        points.push((ClaimId::I3tfAg, base.clone().r(r)));
    }
    for n in 1..=6.min(max_dim) {
        points.push((ClaimId::AffOdd, base.clone().n(n)));
    }
    for r in 4..=7.min(max_dim) {
        points.push((ClaimId::C5NotExt, base.clone().r(r)));
    }
    points.push((ClaimId::CountFlats, base.clone()));
    points.push((ClaimId::Pqr, base.clone().n(5.min(max_dim))));
    for r in upto(5) {
        points.push((ClaimId::I32tExt, base.clone().r(r)));
    }
    for r in upto(6) {
        points.push((ClaimId::I4Bound, base.clone().r(r)));
    }
    points.push((ClaimId::D0, base.clone()));
    for id in [ClaimId::C5Contr, ClaimId::Apex1, ClaimId::MaxagContr, ClaimId::TwoTFree] {
        points.push((id, base.clone()));
    }
    points.push((ClaimId::DblclawI3, base.clone().k(0)));
    if max_dim >= 8 {
        points.push((ClaimId::DblclawI3, base.clone().k(1)));
    }
    points.push((ClaimId::Dk, base.clone().k(1)));
    points.push((ClaimId::KiteBig, base.clone().r(7)));
    points
        .into_iter()
        .map(|(id, p)| {
            run_claim(id, &p).unwrap_or_else(|e| {
                let mut r = ClaimResult::new(id, &p);
                r.inconclusive(format!("not run: {e}"));
                r
            })
        })
        .collect()
}

pub fn run_all(max_dim: usize, seed: u64) -> Vec<ClaimResult> {
    run_all_with(max_dim, seed, None)
}

fn need(v: Option<usize>, default: usize) -> usize {
    v.unwrap_or(default)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ClaimParams(msg.into())
}

fn apply_min(res: &mut ClaimResult, mc: &MinCheck, what: &str) {
    res.absorb(&mc.report);
    match mc.status {
        Status::Pass => res.note(format!("{what}: {}", mc.detail)),
        Status::Inconclusive => res.inconclusive(format!("{what}: {}", mc.detail)),
        Status::Fail => res.fail(mc.counterexample.clone(), format!("{what}: {}", mc.detail)),
    }
}

/// Checks that every class is one of the named ones; unknown classes fail.
fn check_classes(res: &mut ClaimResult, classes: &[Matroid], named: &[(String, Matroid)], spec: &SearchSpec) {
    let mut seen = BTreeSet::new();
    for c in classes {
        match identify(c, named) {
            Some(name) => {
                seen.insert(name);
            }
            None => {
                let note = format!("extremal class {c} is none of the expected constructions");
                res.fail(Some(Counterexample::meeting(c, &spec.forbidden, spec.require_full_rank, note.clone())), note);
                return;
            }
        }
    }
    res.note(format!("{} class(es): {}", classes.len(), seen.into_iter().collect::<Vec<_>>().join(", ")));
}

fn main_thm(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let r = need(p.r, 6);
    res.params.r = Some(r);
    if r < 2 {
        return Err(bad("MAIN-THM needs r >= 2"));
    }
    p.guard(r)?;
    let mut spec = p.spec(r, &[PatternId::I(5), PatternId::Triangle]);
    spec.classify = r >= 6;
    let mc = check_minimum(&spec, main_bound(r))?;
    apply_min(res, &mc, "minimum");
    if r >= 6 && mc.status == Status::Pass {
        let expected = pat(PatternId::AG(r / 2)).direct_sum(&pat(PatternId::AG(r.div_ceil(2))));
        let classes: Vec<Matroid> = mc.report.extremal.iter().map(|c| c.matroid()).collect();
        check_classes(res, &classes, &[(format!("AG{}+AG{}", r / 2, r.div_ceil(2)), expected)], &spec);
        if res.status == Status::Pass && classes.len() != 1 {
            res.fail(None, "extremal class is not unique");
        }
    }
    Ok(())
}

fn mrt_bound(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let (r, t) = (need(p.r, 6), need(p.t, 2));
    (res.params.r, res.params.t) = (Some(r), Some(t));
    if t < 1 || r < t {
        return Err(bad("MRT-BOUND needs r >= t >= 1"));
    }
    p.guard(r)?;
    let mut spec = p.spec(r, &[PatternId::I(t + 1)]);
    spec.classify = r >= 2 * t;
    let mc = check_minimum(&spec, mrt_size(r, t))?;
    apply_min(res, &mc, "minimum");
    if spec.classify && mc.status == Status::Pass {
        let classes: Vec<Matroid> = mc.report.extremal.iter().map(|c| c.matroid()).collect();
        check_classes(res, &classes, &[(format!("M{r},{t}"), pat(PatternId::Mrt(r, t)))], &spec);
        if res.status == Status::Pass && classes.len() != 1 {
            res.fail(None, "extremal class is not unique");
        }
    }
    Ok(())
}

fn i3_ext(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let r = need(p.r, 6);
    res.params.r = Some(r);
    if r < 1 {
        return Err(bad("I3-EXT needs r >= 1"));
    }
    p.guard(r)?;
    let mc = check_minimum(&p.spec(r, &[PatternId::I(3)]), i3_bound(r))?;
    apply_min(res, &mc, "minimum");
    Ok(())
}

fn i3tf_ag(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let r = need(p.r, 5);
    res.params.r = Some(r);
    if !(1..=5).contains(&r) {
        return Err(bad("I3TF-AG enumerates dimensions 1 to 5"));
    }
    p.guard(r)?;
    let spec = p.spec(r, &[PatternId::I(3), PatternId::Triangle]);
    let (classes, nodes, exhaustive) = enumerate_classes(&spec)?;
    res.nodes += nodes;
    res.exhaustive &= exhaustive;
    let all: Vec<Matroid> = classes.iter().flat_map(|(_, cs)| cs.iter().map(|c| c.matroid())).collect();
    if !exhaustive {
        res.inconclusive("budget exhausted");
    }
    if all.is_empty() {
        res.fail(None, "no matroid found, but AG(r) itself qualifies");
        return Ok(());
    }
    check_classes(res, &all, &[(format!("AG{r}"), pat(PatternId::AG(r)))], &spec);
    Ok(())
}

fn aff_odd(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let n = need(p.n, 4);
    res.params.n = Some(n);
    if !(1..=6).contains(&n) {
        return Err(bad("AFF-ODD runs for 1 <= n <= 6"));
    }
    let mut affine = 0u64;
    let mut check = |m: &Matroid, res: &mut ClaimResult| -> bool {
        res.hypothesis_hits += 1;
        let (a, o) = (is_affine(m), odd_circuit_free(m));
        affine += a as u64;
        if a != o {
            let note = format!("is_affine = {a} but odd_circuit_free = {o}");
            let recheck = crate::detect::is_affine_by_scan(m) != o;
            res.fail(Some(Counterexample::other(m, None, note.clone(), recheck)), note);
            return false;
        }
        true
    };
    if n <= 4 {
        let np = num_points(n) as u32;
        for mask in 0u64..(1u64 << np) {
            let m = Matroid::new(n, (1..=np).filter(|&q| mask >> (q - 1) & 1 == 1)).expect("in range");
            res.trials += 1;
            if !check(&m, res) {
                return Ok(());
            }
        }
        res.note(format!("all {} subsets of PG({}, 2) agree ({affine} affine)", res.trials, n - 1));
    } else {
        res.exhaustive = false;
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        rng.set_stream(ClaimId::AffOdd.stream());
        for _ in 0..p.trial_count() {
            res.trials += 1;
            // half the samples are planted inside an affine geometry, so both answers occur
            let density = rng.gen_range(0.02..0.5);
            let top = rng.gen_range(1u32..(1 << n));
            let affine_only = rng.gen_bool(0.5);
            let m = Matroid::new(n, (1..(1u32 << n)).filter(|&q| (!affine_only || (q & top).count_ones() % 2 == 1) && rng.gen_bool(density)))
                .expect("in range");
            if !check(&m, res) {
                return Ok(());
            }
        }
        res.note(format!("{} seeded samples agree ({affine} affine)", res.trials));
    }
    Ok(())
}

fn count_flats(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let points: Vec<(usize, usize, usize)> = match (p.n, p.k, p.l) {
        (None, None, None) => (1..=6).flat_map(|n| (0..=n).flat_map(move |k| (0..=n - k).map(move |l| (n, k, l)))).collect(),
        (Some(n), Some(k), Some(l)) => {
            if n > 8 || k + l > n {
                return Err(bad("COUNT-FLATS needs k + l <= n <= 8"));
            }
            vec![(n, k, l)]
        }
        _ => return Err(bad("COUNT-FLATS takes all of n, k, l or none")),
    };
    for &(n, k, l) in &points {
        let avoid = Flat::span(n, (0..k).map(|i| 1u32 << i));
        let counted = enumerate_flats_avoiding(n, l, &avoid).count() as u64;
        let formula = gaussian_binomial(n - k, l) * (1u64 << (k * l));
        res.trials += 1;
        res.hypothesis_hits += 1;
        if num_bigint::BigUint::from(counted) != formula {
            res.fail(None, format!("n={n} k={k} l={l}: enumerated {counted}, formula {formula}"));
            return Ok(());
        }
        if points.len() == 1 {
            res.note(format!("n={n} k={k} l={l}: both counts {counted}"));
        }
    }
    if points.len() > 1 {
        res.note(format!("{} parameter triples with n <= 6 agree", points.len()));
    }
    Ok(())
}

fn i32t_ext(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let r = need(p.r, 5);
    res.params.r = Some(r);
    if r < 2 {
        return Err(bad("I32T-EXT needs r >= 2"));
    }
    p.guard(r)?;
    let mut spec = p.spec(r, &[PatternId::I(3), PatternId::TwoT]);
    spec.classify = true;
    let mc = check_minimum(&spec, 1 << (r - 1))?;
    apply_min(res, &mc, "minimum");
    if mc.status == Status::Pass {
        let mut named = vec![(format!("AG{r}"), pat(PatternId::AG(r)))];
        for t in 1..r {
            let j = r - 1 - t;
            let name = if j == 0 { format!("PGS1,{t}") } else { format!("D^{j}(PGS1,{t})") };
            named.push((name, pat(PatternId::PGS(1, t)).double_k(j)));
        }
        let classes: Vec<Matroid> = mc.report.extremal.iter().map(|c| c.matroid()).collect();
        check_classes(res, &classes, &named, &spec);
    }
    Ok(())
}

fn i4_bound(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let r = need(p.r, 6);
    res.params.r = Some(r);
    if r < 2 {
        return Err(bad("I4-BOUND needs r >= 2"));
    }
    p.guard(r)?;
    let mc = check_minimum(&p.spec(r, &[PatternId::I(4), PatternId::Triangle]), (1 << (r - 2)) + 1)?;
    apply_min(res, &mc, "minimum");
    Ok(())
}

/// Exhaustive forced search: least full-rank matroid meeting `forbidden`
/// with `planted` on the leading coordinates.
fn forced_minimum(p: &ClaimParams, dim: usize, forbidden: &[PatternId], planted: &Matroid) -> Result<(SearchSpec, SearchReport), Error> {
    let mut spec = p.spec(dim, forbidden);
    spec.forcing = Some(Forcing::on_leading_coordinates(planted.clone(), dim)?);
    let report = minimum_size_search(&spec)?;
    Ok((spec, report))
}

fn c5_not_ext(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let r = need(p.r, 6);
    res.params.r = Some(r);
    if r < 4 {
        return Err(bad("C5-NOT-EXT needs r >= 4"));
    }
    p.guard(r)?;
    let bound = main_bound(r);
    let forb = [PatternId::I(5), PatternId::Triangle];
    if r >= 6 {
        let mut spec = p.spec(r, &forb);
        spec.classify = true;
        let report = minimum_size_search(&spec)?;
        res.absorb(&report);
        if !report.exhaustive {
            res.inconclusive("main classification ran out of budget");
        }
        for c in &report.extremal {
            let m = c.matroid();
            if find_induced(&m, PatternId::C(5))?.is_some() {
                let note = "an extremal matroid contains an induced C5".to_string();
                res.fail(Some(Counterexample::containing(&m, PatternId::C(5), note.clone())), note);
                return Ok(());
            }
        }
        res.note(format!("{} extremal class(es) of size {:?} are C5-free", report.extremal.len(), report.min_size));
    }
    let (spec, report) = forced_minimum(p, r, &forb, &pat(PatternId::C(5)))?;
    res.absorb(&report);
    match report.min_size {
        _ if !report.exhaustive => res.inconclusive("forced C5 search ran out of budget"),
        Some(m) if m > bound || (r < 6 && m == bound) => {
            res.note(format!("with an induced C5 the minimum is {m} against the bound {bound}"))
        }
        Some(m) => {
            let ex = report.example.clone().expect("example");
            let note = format!("full-rank I5-free triangle-free matroid with an induced C5 and {m} <= {bound} elements");
            let mut cx = Counterexample::meeting(&ex, &spec.forbidden, true, note.clone());
            cx.revalidated &= find_induced(&ex, PatternId::C(5))?.is_some() && (m < bound || r >= 6);
            res.fail(Some(cx), note);
            return Ok(());
        }
        None => res.note("no full-rank matroid with an induced C5 meets the constraints"),
    }
    if let Some(trials) = p.trials {
        let fams = c5_families();
        let mut tally = Tally::default();
        let out = sample_loop(ClaimId::C5NotExt, p.seed, trials, &fams, &mut tally, |m, fam, tally| {
            if !c5_hypotheses(m, fam) {
                return Ok(None);
            }
            tally.hit(m.dim());
            let b = main_bound(m.dim());
            if m.len() < b || (m.dim() >= 6 && m.len() == b) {
                let note = format!("sampled matroid with {} elements at dimension {}", m.len(), m.dim());
                let check = satisfies(m, &forb, true)? && m.len() <= b;
                return Ok(Some(Counterexample::other(m, Some(&fam.flat), note, check)));
            }
            Ok(None)
        })?;
        // the exhaustive part decides; a replay with few hits only adds evidence
        let mut replay = ClaimResult::new(ClaimId::C5NotExt, p);
        tally.finish(&mut replay, out, "size replay");
        if replay.status == Status::Fail {
            res.fail(replay.counterexample, replay.detail);
        } else {
            res.note(replay.detail);
        }
        res.trials += replay.trials;
        res.samples += replay.samples;
        res.hypothesis_hits += replay.hypothesis_hits;
    }
    Ok(())
}

fn d0(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let forb = [PatternId::I(5), PatternId::C(5), PatternId::Triangle];
    let c6 = pat(PatternId::C(6));
    // C6 spans its hyperplane at dimension 6; at dimension 7 it sits inside
    // a 6-dimensional hyperplane whose other points stay outside E
    for dim in [6usize, 7] {
        p.guard(dim)?;
        let h = Flat::span(dim, (0..dim - 1).map(|i| 1u32 << i));
        let base = Matroid::new(dim, c6.points()).expect("in range");
        let outside: Vec<Point> = (1..(1u32 << dim)).filter(|&q| !h.contains(q)).collect();
        let dets: Vec<Detector> = forb.iter().map(|&f| Detector::new(f).expect("valid")).collect();
        let mut cases = 0u64;
        let mut chosen = Vec::new();
        let mut failure = None;
        let _ = subsets_upto(&outside, 3, &mut chosen, 0, &mut |s| {
            cases += 1;
            let mut set = base.ground().clone();
            for &q in s {
                set.insert(q);
            }
            let pts = set.to_vec();
            if dets.iter().all(|d| d.visit(&set, &pts, &mut |_| ControlFlow::Break(())).is_continue()) {
                failure = Some(Matroid::from_set(set));
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        res.trials += cases;
        res.hypothesis_hits += cases;
        if let Some(m) = failure {
            let note = format!("dimension {dim}: a complement of at most 3 elements avoids I5, C5 and triangles");
            res.fail(Some(Counterexample::meeting(&m, &forb, false, note.clone())), note);
            return Ok(());
        }
        res.note(format!("dimension {dim}: all {cases} complements of 1 to 3 elements create I5, C5 or a triangle"));
    }
    Ok(())
}

fn subsets_upto(items: &[Point], k: usize, chosen: &mut Vec<Point>, start: usize, f: &mut dyn FnMut(&[Point]) -> ControlFlow<()>) -> ControlFlow<()> {
    if !chosen.is_empty() {
        f(chosen)?;
    }
    if chosen.len() == k {
        return ControlFlow::Continue(());
    }
    for i in start..items.len() {
        chosen.push(items[i]);
        subsets_upto(items, k, chosen, i + 1, f)?;
        chosen.pop();
    }
    ControlFlow::Continue(())
}

fn pqr(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let n = need(p.n, 5);
    res.params.n = Some(n);
    if !(1..=5).contains(&n) {
        return Err(bad("PQR runs for 1 <= n <= 5"));
    }
    res.exhaustive = n <= 4;
    let mut per_n = Vec::new();
    for m in 1..=n.min(4) {
        let mut count = 0u64;
        let mut labels = vec![0u8; 1 << m];
        let mut failure = None;
        let _ = pqr_enumerate(m, 1, &mut labels, None, &mut |lab| {
            count += 1;
            match pqr_check(m, lab) {
                Ok(()) => ControlFlow::Continue(()),
                Err(note) => {
                    failure = Some((lab.to_vec(), note));
                    ControlFlow::Break(())
                }
            }
        });
        res.trials += count;
        res.hypothesis_hits += count;
        if let Some((lab, note)) = failure {
            pqr_fail(res, m, &lab, note);
            return Ok(());
        }
        per_n.push(format!("n={m}: {count}"));
    }
    res.note(format!("exhaustive partitions ({})", per_n.join(", ")));
    if n == 5 {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        rng.set_stream(ClaimId::Pqr.stream());
        let trials = p.trial_count();
        let mut seen = BTreeSet::new();
        for _ in 0..trials {
            res.trials += 1;
            let mut labels = vec![0u8; 1 << n];
            let mut found = None;
            let _ = pqr_enumerate(n, 1, &mut labels, Some(&mut rng), &mut |lab| {
                found = Some(lab.to_vec());
                ControlFlow::Break(())
            });
            let lab = found.expect("all-Q is always valid");
            res.hypothesis_hits += 1;
            seen.insert(lab.clone());
            if let Err(note) = pqr_check(n, &lab) {
                pqr_fail(res, n, &lab, note);
                return Ok(());
            }
        }
        res.note(format!("n=5: {trials} randomized partitions ({} distinct)", seen.len()));
    }
    Ok(())
}

const LP: u8 = 0;
const LQ: u8 = 1;
const LR: u8 = 2;

/// Backtracking over labelings of `1..2^n` with no triangle holding a `P`
/// and exactly one `R`. A triangle is checked when its largest point gets a
/// label. With an rng, labels are tried in random order.
fn pqr_enumerate(n: usize, q: u32, labels: &mut [u8], mut rng: Option<&mut ChaCha8Rng>, f: &mut dyn FnMut(&[u8]) -> ControlFlow<()>) -> ControlFlow<()> {
    if q == 1 << n {
        return f(labels);
    }
    let mut order = [LP, LQ, LR];
    if let Some(r) = rng.as_deref_mut() {
        order.shuffle(r);
    }
    for lab in order {
        labels[q as usize] = lab;
        let ok = (1..q).all(|x| {
            let y = x ^ q;
            if y >= x || y == 0 {
                return true;
            }
            let t = [labels[x as usize], labels[y as usize], lab];
            let ps = t.iter().filter(|&&l| l == LP).count();
            let rs = t.iter().filter(|&&l| l == LR).count();
            !(ps >= 1 && rs == 1)
        });
        if ok {
            pqr_enumerate(n, q + 1, labels, rng.as_deref_mut(), f)?;
        }
    }
    ControlFlow::Continue(())
}

fn pqr_check(n: usize, labels: &[u8]) -> Result<(), String> {
    let class = |l: u8| {
        let mut s = PointSet::new(n);
        for q in 1..(1u32 << n) {
            if labels[q as usize] == l {
                s.insert(q);
            }
        }
        s
    };
    let (p, q, r) = (class(LP), class(LQ), class(LR));
    // independent re-check of the hypothesis
    for x in 1..(1u32 << n) {
        for y in x + 1..(1u32 << n) {
            let z = x ^ y;
            if z > y {
                let t = [x, y, z];
                let ps = t.iter().filter(|&&v| p.contains(v)).count();
                let rs = t.iter().filter(|&&v| r.contains(v)).count();
                if ps >= 1 && rs == 1 {
                    return Err("enumerated partition violates the triangle condition".into());
                }
            }
        }
    }
    let cl = closure(&p);
    if !cl.members().is_subset(&p.union(&q)) {
        return Err("cl(P) leaves P u Q".into());
    }
    if cl.dim() < n {
        for c in cosets(&cl) {
            if !c.is_subset(&q) && !c.is_subset(&r) {
                return Err(format!("a coset of cl(P) meets both Q and R: {c:?}"));
            }
        }
    }
    Ok(())
}

fn pqr_fail(res: &mut ClaimResult, n: usize, labels: &[u8], note: String) {
    let p: Vec<Point> = (1..(1u32 << n)).filter(|&q| labels[q as usize] == LP).collect();
    let r: Vec<Point> = (1..(1u32 << n)).filter(|&q| labels[q as usize] == LR).collect();
    let m = Matroid::new(n, p.iter().copied()).expect("in range");
    let full = format!("{note}; P = {p:?}, R = {r:?}, Q = the rest");
    let recheck = pqr_check(n, labels).is_err();
    res.fail(Some(Counterexample::other(&m, None, full.clone(), recheck)), full);
}

// ---------------------------------------------------------------------------
// sampled families

/// A generator family: full-rank matroids meeting `forbidden`, with
/// `planted` on `flat`, of a random size in `lo..=hi`.
struct Family {
    dim: usize,
    forbidden: Vec<PatternId>,
    planted: Matroid,
    flat: Flat,
    lo: usize,
    hi: usize,
    /// Relative frequency among the claim's families.
    weight: usize,
    attempt_nodes: u64,
}

impl Family {
    fn leading(dim: usize, forbidden: &[PatternId], planted: Matroid, lo: usize, hi: usize, weight: usize) -> Family {
        let flat = Flat::span(dim, (0..planted.dim()).map(|i| 1u32 << i));
        Family { dim, forbidden: forbidden.to_vec(), planted, flat, lo, hi, weight, attempt_nodes: 400 }
    }

    fn nodes(mut self, n: u64) -> Family {
        self.attempt_nodes = n;
        self
    }

    fn forcing(&self) -> Forcing {
        Forcing::new(self.planted.clone(), self.flat.clone()).expect("dimensions agree")
    }

    /// The planted restriction is still there (checked from scratch).
    fn planted_intact(&self, m: &Matroid) -> bool {
        m.restrict(&self.flat).is_ok_and(|r| is_isomorphic(&r, &self.planted))
    }
}

const FREE3: [PatternId; 3] = [PatternId::I(5), PatternId::C(5), PatternId::Triangle];

fn c5_families() -> Vec<Family> {
    let c5 = pat(PatternId::C(5));
    let forb = [PatternId::I(5), PatternId::Triangle];
    vec![Family::leading(7, &forb, c5.clone(), 15, 26, 4), Family::leading(8, &forb, c5, 23, 50, 1).nodes(2000)]
}

fn c5_hypotheses(m: &Matroid, fam: &Family) -> bool {
    m.is_full_rank() && satisfies(m, &[PatternId::I(5), PatternId::Triangle], true).unwrap_or(false) && fam.planted_intact(m)
}

#[derive(Default)]
struct Tally {
    samples: u64,
    hits: u64,
    instances: u64,
    by_dim: BTreeMap<usize, u64>,
}

impl Tally {
    fn hit(&mut self, dim: usize) {
        self.hits += 1;
        *self.by_dim.entry(dim).or_default() += 1;
    }

    fn finish(&self, res: &mut ClaimResult, out: LoopOut, what: &str) {
        res.trials += out.trials;
        res.samples += self.samples;
        res.hypothesis_hits += self.hits;
        res.exhaustive = false;
        let dims: Vec<String> = self.by_dim.iter().map(|(d, c)| format!("dim {d}: {c}")).collect();
        let mut line = format!("{what}: {} trials, {} samples, {} hypothesis hits ({})", out.trials, self.samples, self.hits, dims.join(", "));
        if self.instances > 0 {
            line.push_str(&format!(", {} flat instances", self.instances));
        }
        if let Some(cx) = out.violation {
            let note = format!("{line}; violated: {}", cx.note);
            res.fail(Some(cx), note);
        } else if self.hits < VACUITY_MIN {
            res.inconclusive(format!("{line}; fewer than {VACUITY_MIN} hypothesis hits"));
        } else {
            res.note(line);
        }
    }
}

struct LoopOut {
    trials: u64,
    violation: Option<Counterexample>,
}

type Check<'a> = dyn FnMut(&Matroid, &Family, &mut Tally) -> Result<Option<Counterexample>, Error> + 'a;

/// Draws `trials` samples, cycling through the families by weight, and
/// stops at the first violation.
fn sample_loop(claim: ClaimId, seed: u64, trials: usize, fams: &[Family], tally: &mut Tally, mut check: impl FnMut(&Matroid, &Family, &mut Tally) -> Result<Option<Counterexample>, Error>) -> Result<LoopOut, Error> {
    sample_loop_dyn(claim, seed, trials, fams, tally, &mut check)
}

fn sample_loop_dyn(claim: ClaimId, seed: u64, trials: usize, fams: &[Family], tally: &mut Tally, check: &mut Check<'_>) -> Result<LoopOut, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(claim.stream());
    let mut gens = Vec::new();
    for f in fams {
        let mut spec = SearchSpec::new(f.dim, f.forbidden.clone()).full_rank();
        spec.max_dim = f.dim;
        let mut g = Generator::new(&spec)?;
        g.attempt_nodes = f.attempt_nodes;
        gens.push((g, f.forcing()));
    }
    let schedule: Vec<usize> = fams.iter().enumerate().flat_map(|(i, f)| std::iter::repeat_n(i, f.weight)).collect();
    let mut out = LoopOut { trials: 0, violation: None };
    for t in 0..trials {
        let i = schedule[t % schedule.len()];
        let fam = &fams[i];
        let target = rng.gen_range(fam.lo..=fam.hi);
        out.trials += 1;
        let Some(m) = gens[i].0.generate(&mut rng, target, Some(&gens[i].1))? else { continue };
        tally.samples += 1;
        if let Some(cx) = check(&m, fam, tally)? {
            out.violation = Some(cx);
            break;
        }
    }
    Ok(out)
}

/// Distinct flats carrying induced copies of `det`'s pattern, at most `cap`.
fn copies(m: &Matroid, det: &Detector, cap: usize) -> Vec<Flat> {
    let pts = m.points();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let _ = det.visit(m.ground(), &pts, &mut |imgs| {
        let w = det.witness_from_images(imgs, m.dim());
        if seen.insert(w.flat.basis().to_vec()) {
            out.push(w.flat);
        }
        if out.len() >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

/// Point of `E` in the coset of `f` named by the quotient point `q` of
/// [`Matroid::contract`].
fn lift(m: &Matroid, f: &Flat, q: Point) -> Option<Point> {
    let free: Vec<u32> = f.complement_basis().iter().map(|b| b.trailing_zeros()).collect();
    let rep = free.iter().enumerate().filter(|(i, _)| q >> i & 1 == 1).fold(0, |acc, (_, &bit)| acc | (1 << bit));
    m.ground().iter().find(|&x| f.reduce(x) == rep)
}

/// Claws of `m / f`, each as three points of `E` in the three cosets.
fn claws_above(m: &Matroid, f: &Flat, cap: usize) -> Vec<[Point; 3]> {
    let c = m.contract(f).expect("proper flat");
    let det = Detector::new(PatternId::I(3)).expect("valid");
    let mut out = Vec::new();
    let _ = det.visit(c.ground(), &c.points(), &mut |imgs| {
        let lifted: Vec<Point> = imgs.iter().filter_map(|&q| lift(m, f, q)).collect();
        out.push([lifted[0], lifted[1], lifted[2]]);
        if out.len() >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

fn contraction_has(m: &Matroid, f: &Flat, p: PatternId) -> bool {
    m.contract(f).is_ok_and(|c| find_induced(&c, p).ok().flatten().is_some())
}

fn span_with(f: &Flat, extra: &[Point]) -> Flat {
    Flat::span(f.ambient_dim(), f.basis().iter().copied().chain(extra.iter().copied()))
}

fn c5_contr(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let fams = c5_families();
    let c5 = Detector::new(PatternId::C(5))?;
    let mut tally = Tally::default();
    let out = sample_loop(ClaimId::C5Contr, p.seed, p.trial_count(), &fams, &mut tally, |m, fam, tally| {
        if !c5_hypotheses(m, fam) {
            return Ok(None);
        }
        tally.hit(m.dim());
        // the planted copy first, then other copies present in the sample
        let mut flats = vec![fam.flat.clone()];
        flats.extend(copies(m, &c5, 8).into_iter().filter(|f| *f != fam.flat));
        for f in flats {
            tally.instances += 1;
            if contraction_has(m, &f, PatternId::I(3)) {
                let note = "the contraction of an induced C5 contains a claw".to_string();
                return Ok(Some(Counterexample::contraction_containing(m, &f, PatternId::I(3), note)));
            }
        }
        Ok(None)
    })?;
    tally.finish(res, out, "sampled");
    Ok(())
}

/// Number of points of `E` in each coset of `f`, keyed by the reduced
/// representative (which adds like the cosets do).
fn coset_counts(m: &Matroid, f: &Flat) -> BTreeMap<Point, usize> {
    let mut counts: BTreeMap<Point, usize> = BTreeMap::new();
    for q in 1..(1u32 << m.dim()) {
        if !f.contains(q) {
            counts.entry(f.reduce(q)).or_default();
        }
    }
    for x in m.ground().iter() {
        if !f.contains(x) {
            *counts.get_mut(&f.reduce(x)).expect("listed") += 1;
        }
    }
    counts
}

fn apex1(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let fams = c5_families();
    let c5 = Detector::new(PatternId::C(5))?;
    let mut tally = Tally::default();
    let mut triples = 0u64;
    let out = sample_loop(ClaimId::Apex1, p.seed, p.trial_count(), &fams, &mut tally, |m, fam, tally| {
        if !c5_hypotheses(m, fam) {
            return Ok(None);
        }
        let mut flats = vec![fam.flat.clone()];
        flats.extend(copies(m, &c5, 8).into_iter().filter(|f| *f != fam.flat));
        let mut any = false;
        for f in flats {
            let counts = coset_counts(m, &f);
            for (&a, &na) in &counts {
                if na != 1 {
                    continue;
                }
                for (&b, &nb) in &counts {
                    let c = a ^ b;
                    if b >= c || b == a {
                        continue;
                    }
                    let nc = counts[&c];
                    let (lo, hi) = if nb <= nc { (nb, nc) } else { (nc, nb) };
                    if hi == 0 || lo > 2 {
                        continue;
                    }
                    any = true;
                    triples += 1;
                    tally.instances += 1;
                    if hi < 3 {
                        // recount straight from the coset lists
                        let by_list = |rep: Point| cosets(&f).into_iter().find(|s| s.contains(rep)).map(|s| s.intersection_len(m.ground()));
                        let check = by_list(a) == Some(1) && by_list(b) == Some(nb) && by_list(c) == Some(nc);
                        let note = format!("cosets with {na}, {nb}, {nc} elements (representatives {a}, {b}, {c})");
                        return Ok(Some(Counterexample::other(m, Some(&f), note, check)));
                    }
                }
            }
        }
        if any {
            tally.hit(m.dim());
        }
        Ok(None)
    })?;
    tally.finish(res, out, "sampled");
    res.note(format!("{triples} coset triples with |B| <= 2 tested"));
    Ok(())
}

/// Every induced `AG(d)` with `d >= 3` that leaves room for `room`
/// dimensions above it, at most `cap` per dimension.
fn affine_flats(m: &Matroid, room: usize, cap: usize) -> Vec<(usize, Flat)> {
    let mut out = Vec::new();
    for d in 3..=m.dim().saturating_sub(room) {
        let det = Detector::new(PatternId::AG(d)).expect("valid");
        let found = copies(m, &det, cap);
        if found.is_empty() {
            break;
        }
        out.extend(found.into_iter().map(|f| (d, f)));
    }
    out
}

fn free3_hypotheses(m: &Matroid, fam: &Family) -> bool {
    m.is_full_rank() && satisfies(m, &fam.forbidden, true).unwrap_or(false) && satisfies(m, &FREE3, true).unwrap_or(false) && fam.planted_intact(m)
}

fn maxag_families() -> Vec<Family> {
    let no_ag4 = [PatternId::I(5), PatternId::C(5), PatternId::Triangle, PatternId::AG(4)];
    vec![
        Family::leading(7, &no_ag4, pat(PatternId::Kite), 16, 24, 2),
        Family::leading(7, &FREE3, pat(PatternId::AG(3)), 10, 24, 2),
        Family::leading(8, &FREE3, pat(PatternId::AG(3)), 16, 40, 1).nodes(2000),
    ]
}

fn maxag_contr(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let fams = maxag_families();
    let mut tally = Tally::default();
    let mut maximum = 0u64;
    let out = sample_loop(ClaimId::MaxagContr, p.seed, p.trial_count(), &fams, &mut tally, |m, fam, tally| {
        if !free3_hypotheses(m, fam) {
            return Ok(None);
        }
        let mut any = false;
        let mut top = 0;
        let flats = affine_flats(m, 3, 12);
        for (d, _) in &flats {
            top = top.max(*d);
        }
        for (d, f) in &flats {
            for [a1, a2, a3] in claws_above(m, f, 8) {
                any = true;
                tally.instances += 1;
                if *d == top {
                    maximum += 1;
                }
                let grows = [a1, a2, a3].iter().any(|&a| {
                    let r = m.restrict(&span_with(f, &[a])).expect("same ambient");
                    r.len() == 1 << d && is_affine(&r)
                });
                if grows {
                    continue;
                }
                let closed = m.restrict(&span_with(f, &[a1, a2, a3])).expect("same ambient");
                if !is_isomorphic(&closed, &pat(PatternId::DoubledKite(d - 3))) {
                    let note = format!("AG{d} with a claw above it: no larger affine geometry through a claw coset and no doubled kite of order {}", d - 3);
                    return Ok(Some(Counterexample::contraction_containing(m, f, PatternId::I(3), note)));
                }
            }
        }
        if any {
            tally.hit(m.dim());
        }
        Ok(None)
    })?;
    tally.finish(res, out, "sampled");
    res.note(format!("{maximum} instances on a maximum affine geometry"));
    Ok(())
}

fn two_t_free(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let fams = maxag_families();
    let mut tally = Tally::default();
    let mut vacuous = 0u64;
    let out = sample_loop(ClaimId::TwoTFree, p.seed, p.trial_count(), &fams, &mut tally, |m, fam, tally| {
        if !free3_hypotheses(m, fam) {
            return Ok(None);
        }
        let mut any = false;
        let mut larger: BTreeMap<usize, bool> = BTreeMap::new();
        for (d, f) in affine_flats(m, 4, 12) {
            // maximality: no induced AG of one more dimension anywhere
            let has_larger = *larger.entry(d).or_insert_with(|| find_induced(m, PatternId::AG(d + 1)).ok().flatten().is_some());
            if has_larger {
                vacuous += 1;
                continue;
            }
            any = true;
            tally.instances += 1;
            if contraction_has(m, &f, PatternId::TwoT) {
                let note = format!("maximum AG{d} whose contraction contains 2T");
                return Ok(Some(Counterexample::contraction_containing(m, &f, PatternId::TwoT, note)));
            }
        }
        if any {
            tally.hit(m.dim());
        }
        Ok(None)
    })?;
    tally.finish(res, out, "sampled");
    res.note(format!("{vacuous} affine flats skipped because a larger affine geometry exists"));
    Ok(())
}

fn dblclaw_families(k: usize) -> Vec<Family> {
    let claw = pat(PatternId::I(3)).double_k(k + 1);
    let forb = |a: usize| vec![PatternId::I(5), PatternId::C(5), PatternId::Triangle, PatternId::AG(a)];
    match k {
        // at dimension 8, forbidding AG4 leaves the generator without hits
        0 => vec![Family::leading(7, &forb(4), claw, 16, 24, 1)],
        _ => vec![Family::leading(8, &forb(5), claw, 24, 48, 1).nodes(2000)],
    }
}

fn dblclaw(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let k = need(p.k, 0);
    if k > 1 {
        return Err(bad("DBLCLAW-I3 runs for k = 0 or 1"));
    }
    res.params.k = Some(k);
    let trials = p.trial_count();
    p.guard(if k == 0 { 7 } else { 8 })?;
    let fams = dblclaw_families(k);
    let claw = pat(PatternId::I(3)).double_k(k + 1);
    let det = Detector::from_matroid(&claw);
    let mut tally = Tally::default();
    let out = sample_loop(ClaimId::DblclawI3, p.seed ^ (k as u64), trials, &fams, &mut tally, |m, fam, tally| {
        if !free3_hypotheses(m, fam) {
            return Ok(None);
        }
        // maximum affine dimension exactly k + 3
        if find_induced(m, PatternId::AG(k + 3))?.is_none() || find_induced(m, PatternId::AG(k + 4))?.is_some() {
            return Ok(None);
        }
        tally.hit(m.dim());
        let mut flats = vec![fam.flat.clone()];
        flats.extend(copies(m, &det, 8).into_iter().filter(|f| *f != fam.flat));
        for f in flats {
            tally.instances += 1;
            if contraction_has(m, &f, PatternId::I(3)) {
                let note = format!("contracting an induced D^{}(I3) leaves a claw", k + 1);
                return Ok(Some(Counterexample::contraction_containing(m, &f, PatternId::I(3), note)));
            }
        }
        Ok(None)
    })?;
    tally.finish(res, out, "sampled");
    Ok(())
}

fn dk(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let k = need(p.k, 1);
    res.params.k = Some(k);
    if k > 2 {
        return Err(bad("DK runs for k <= 2"));
    }
    let n_pat = pat(PatternId::C(6)).double_k(k);
    let d = n_pat.dim();
    p.guard(d + 1)?;
    // D^k(C6) spanning the hyperplane, and (when it fits) inside a larger
    // hyperplane whose remaining points stay outside E
    let mut fams = vec![Family::leading(d + 1, &FREE3, n_pat.clone(), n_pat.len() + 1, n_pat.len() + 20, 4)];
    if d + 2 <= p.max_dim() {
        let wide = Matroid::new(d + 1, n_pat.points()).expect("in range");
        fams.push(Family::leading(d + 2, &FREE3, wide, n_pat.len() + 1, n_pat.len() + 28, 1).nodes(2000));
    }
    let need_out = 3 * (1 << k) + 1;
    let mut tally = Tally::default();
    let out = sample_loop(ClaimId::Dk, p.seed, p.trial_count(), &fams, &mut tally, |m, fam, tally| {
        if !free3_hypotheses(m, fam) {
            return Ok(None);
        }
        let outside = m.len() - m.ground().intersection_len(fam.flat.members());
        if outside == 0 {
            return Ok(None);
        }
        tally.hit(m.dim());
        if outside < need_out {
            let note = format!("{outside} elements outside the hyperplane, fewer than {need_out}");
            let check = satisfies(m, &FREE3, false)? && fam.planted_intact(m);
            return Ok(Some(Counterexample::other(m, Some(&fam.flat), note, check)));
        }
        Ok(None)
    })?;
    tally.finish(res, out, "sampled");
    Ok(())
}

fn kite_big(p: &ClaimParams, res: &mut ClaimResult) -> Result<(), Error> {
    let r = need(p.r, 7);
    res.params.r = Some(r);
    if !(6..=8).contains(&r) {
        return Err(bad("KITE-BIG runs for 6 <= r <= 8"));
    }
    p.guard(r)?;
    let bound = main_bound(r);
    let forb = [PatternId::I(5), PatternId::C(5), PatternId::Triangle, PatternId::AG(4)];
    let kite = pat(PatternId::Kite);
    let (spec, report) = forced_minimum(p, r, &forb, &kite)?;
    res.absorb(&report);
    match report.min_size {
        _ if !report.exhaustive => res.inconclusive("forced kite search ran out of budget"),
        Some(m) if m > bound => res.note(format!("exhaustive: with an induced kite the minimum is {m} > {bound}")),
        Some(m) => {
            let ex = report.example.clone().expect("example");
            let note = format!("a kite completion with {m} <= {bound} elements");
            res.fail(Some(Counterexample::meeting(&ex, &spec.forbidden, true, note.clone())), note);
            return Ok(());
        }
        None => res.note("no full-rank completion of a kite meets the constraints"),
    }
    let fams = vec![Family::leading(r, &forb, kite.clone(), kite.len().max(bound - 2), bound + 14, 1)];
    let mut tally = Tally::default();
    let out = sample_loop(ClaimId::KiteBig, p.seed, p.trial_count(), &fams, &mut tally, |m, fam, tally| {
        if !free3_hypotheses(m, fam) || find_induced(m, PatternId::AG(3))?.is_none() {
            return Ok(None);
        }
        tally.hit(m.dim());
        if m.len() <= bound {
            let note = format!("sampled kite completion with {} <= {bound} elements", m.len());
            return Ok(Some(Counterexample::meeting(m, &fam.forbidden, true, note)));
        }
        Ok(None)
    })?;
    tally.finish(res, out, "sampled");
    Ok(())
}

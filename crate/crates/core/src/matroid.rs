//! The matroid value `M = (E, G)`: a ground set inside an explicit ambient
//! geometry, with induced restriction, contraction, doubling and direct sums.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gf2::{check_dim, rank_of, Flat, LinearMap, Point, PointSet};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matroid {
    ground: PointSet,
}

impl Matroid {
    pub fn new<I: IntoIterator<Item = Point>>(dim: usize, points: I) -> Result<Self, Error> {
        Ok(Matroid { ground: PointSet::from_points(dim, points)? })
    }

    pub fn from_set(ground: PointSet) -> Self {
        Matroid { ground }
    }

    pub fn empty(dim: usize) -> Self {
        Matroid { ground: PointSet::new(dim) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.ground.dim()
    }

    /// `|E|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    #[inline]
    pub fn ground(&self) -> &PointSet {
        &self.ground
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.ground.contains(p)
    }

    /// Ground set in increasing order.
    pub fn points(&self) -> Vec<Point> {
        self.ground.to_vec()
    }

    pub fn rank(&self) -> usize {
        rank_of(&self.ground)
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    fn check_ambient(&self, f: &Flat) -> Result<(), Error> {
        if f.ambient_dim() != self.dim() {
            return Err(Error::AmbientMismatch { flat: f.ambient_dim(), matroid: self.dim() });
        }
        Ok(())
    }

    /// `M | F`, re-coordinatized so that the `i`-th reduced basis vector of `F` becomes `e_i`.
    pub fn restrict(&self, f: &Flat) -> Result<Matroid, Error> {
        self.check_ambient(f)?;
        let mut out = PointSet::new(f.dim());
        for p in self.ground.intersection(f.members()).iter() {
            out.insert(f.coords(p).expect("point of the flat"));
        }
        Ok(Matroid { ground: out })
    }

    /// `M / F`. The quotient is realized on the complement spanned by the
    /// non-pivot unit vectors of `F`, compressed onto the low bits.
    pub fn contract(&self, f: &Flat) -> Result<Matroid, Error> {
        self.check_ambient(f)?;
        if f.dim() == self.dim() {
            return Err(Error::ContractEntireGeometry);
        }
        let free: Vec<u32> = f.complement_basis().iter().map(|b| b.trailing_zeros()).collect();
        let mut out = PointSet::new(free.len());
        for p in self.ground.iter() {
            let r = f.reduce(p);
            if r == 0 {
                continue;
            }
            let mut q = 0;
            for (i, &bit) in free.iter().enumerate() {
                q |= ((r >> bit) & 1) << i;
            }
            out.insert(q);
        }
        Ok(Matroid { ground: out })
    }

    /// `D(M)`: one more dimension, apex `e_{n+1}`, ground set `{x, x + apex}`.
    pub fn double(&self) -> Matroid {
        let n = self.dim();
        let apex = 1 << n;
        let mut out = PointSet::new(n + 1);
        for x in self.ground.iter() {
            out.insert(x);
            out.insert(x ^ apex);
        }
        Matroid { ground: out }
    }

    /// `D^k(M)`. The apex flat is spanned by `e_{n+1}, ..., e_{n+k}`.
    pub fn double_k(&self, k: usize) -> Matroid {
        (0..k).fold(self.clone(), |m, _| m.double())
    }

    /// Block direct sum: `self` on the low coordinates, `other` shifted above it.
    pub fn direct_sum(&self, other: &Matroid) -> Matroid {
        let n1 = self.dim();
        let mut out = PointSet::new(n1 + other.dim());
        for x in self.ground.iter() {
            out.insert(x);
        }
        for y in other.ground.iter() {
            out.insert(y << n1);
        }
        Matroid { ground: out }
    }

    /// Image under a linear map into a space of the map's target dimension.
    pub fn map(&self, phi: &LinearMap) -> Matroid {
        assert_eq!(phi.source_dim(), self.dim(), "map source dimension");
        let mut out = PointSet::new(phi.target_dim());
        for x in self.ground.iter() {
            out.insert(phi.apply(x));
        }
        Matroid { ground: out }
    }

    /// Embeds the matroid onto `flat`: `e_i` goes to the `i`-th reduced basis vector.
    pub fn place_on(&self, flat: &Flat) -> Result<Matroid, Error> {
        if flat.dim() != self.dim() {
            return Err(Error::AmbientMismatch { flat: flat.dim(), matroid: self.dim() });
        }
        let mut out = PointSet::new(flat.ambient_dim());
        for x in self.ground.iter() {
            out.insert(flat.point_at(x));
        }
        Ok(Matroid { ground: out })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("dim {}\npoints", self.dim());
        for p in self.ground.iter() {
            s.push(' ');
            s.push_str(&p.to_string());
        }
        s.push('\n');
        s
    }

    pub fn to_file(&self) -> MatroidFile {
        MatroidFile { dim: self.dim(), points: self.points() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("serializable")
    }

    pub fn serialize(&self, format: FileFormat) -> String {
        match format {
            FileFormat::Text => self.to_text(),
            FileFormat::Json => self.to_json() + "\n",
        }
    }

    /// Parses the text format: `dim <n>` then `points <p1> <p2> ...`; `#` lines are comments.
    pub fn parse_text(src: &str) -> Result<Matroid, Error> {
        let mut dim: Option<usize> = None;
        let mut points: Option<(usize, Vec<u64>)> = None;
        for (i, raw) in src.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().unwrap();
            let err = |msg: String| Error::Parse { line: line_no, msg };
            match key {
                "dim" if dim.is_none() => {
                    let v = words.next().ok_or_else(|| err("missing dimension".into()))?;
                    let n: usize = v.parse().map_err(|_| err(format!("bad dimension `{v}`")))?;
                    if words.next().is_some() {
                        return Err(err("trailing tokens after dimension".into()));
                    }
                    check_dim(n).map_err(|e| err(e.to_string()))?;
                    dim = Some(n);
                }
                "points" if dim.is_some() && points.is_none() => {
                    let mut ps = Vec::new();
                    for w in words {
                        ps.push(w.parse::<u64>().map_err(|_| err(format!("bad point `{w}`")))?);
                    }
                    points = Some((line_no, ps));
                }
                "dim" => return Err(err("duplicate `dim` header".into())),
                "points" if dim.is_none() => return Err(err("`points` before `dim` header".into())),
                "points" => return Err(err("duplicate `points` line".into())),
                other => return Err(err(format!("unexpected `{other}`"))),
            }
        }
        let n = dim.ok_or(Error::Parse { line: 1, msg: "missing `dim` header".into() })?;
        let (line, ps) = points.ok_or(Error::Parse { line: 2, msg: "missing `points` line".into() })?;
        build_checked(n, &ps, line)
    }

    pub fn parse_json(src: &str) -> Result<Matroid, Error> {
        let file: RawFile =
            serde_json::from_str(src).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        check_dim(file.dim).map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
        build_checked(file.dim, &file.points, 1)
    }

    pub fn parse(src: &str, format: FileFormat) -> Result<Matroid, Error> {
        match format {
            FileFormat::Text => Matroid::parse_text(src),
            FileFormat::Json => Matroid::parse_json(src),
        }
    }

    /// Parses either format, choosing JSON when the first non-blank character is `{`.
    pub fn parse_any(src: &str) -> Result<Matroid, Error> {
        Matroid::parse(src, FileFormat::detect(src))
    }
}

fn build_checked(n: usize, ps: &[u64], line: usize) -> Result<Matroid, Error> {
    let mut set = PointSet::new(n);
    for &p in ps {
        if p == 0 || p >= (1u64 << n) {
            return Err(Error::Parse { line, msg: format!("point {p} is outside [1, 2^{n} - 1]") });
        }
        if !set.insert(p as Point) {
            return Err(Error::Parse { line, msg: format!("duplicate point {p}") });
        }
    }
    Ok(Matroid { ground: set })
}

impl Serialize for Matroid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matroid(dim {}, {:?})", self.dim(), self.ground)
    }
}

impl fmt::Display for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Matroid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Matroid::parse_any(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileFormat {
    Text,
    Json,
}

impl FileFormat {
    pub fn detect(src: &str) -> FileFormat {
        if src.trim_start().starts_with('{') {
            FileFormat::Json
        } else {
            FileFormat::Text
        }
    }
}

/// JSON form of a matroid file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatroidFile {
    pub dim: usize,
    pub points: Vec<Point>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    dim: usize,
    points: Vec<u64>,
}

impl MatroidFile {
    pub fn to_matroid(&self) -> Result<Matroid, Error> {
        Matroid::new(self.dim, self.points.iter().copied())
    }
}

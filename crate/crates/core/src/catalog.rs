//! Named matroids, addressable by a [`PatternId`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gf2::{Point, PointSet};
use crate::matroid::Matroid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternId {
    /// `I_k`: a basis of a `k`-dimensional geometry.
    I(usize),
    /// `C_k`: `k` points of rank `k - 1` summing to zero.
    C(usize),
    Triangle,
    /// `AG(d-1, 2)`: the `d`-dimensional affine geometry, `2^(d-1)` points.
    AG(usize),
    /// `PG(d-1, 2)`: the full `d`-dimensional geometry.
    PG(usize),
    /// Direct sum of projective geometries of dimensions `t1` and `t2`.
    PGS(usize, usize),
    Kite,
    /// `D^k(kite)`.
    DoubledKite(usize),
    /// Direct sum of two triangles.
    TwoT,
    /// `M_{r,t}`: direct sum of `t` geometries with balanced dimensions summing to `r`.
    Mrt(usize, usize),
}

impl PatternId {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: &str| Err(Error::Pattern(self.to_string(), msg.to_string()));
        match *self {
            PatternId::I(k) if k < 1 => bad("k >= 1 required"),
            PatternId::C(k) if k < 3 => bad("k >= 3 required"),
            PatternId::AG(d) | PatternId::PG(d) if d < 1 => bad("d >= 1 required"),
            PatternId::PGS(a, b) if a < 1 || b < 1 => bad("t1, t2 >= 1 required"),
            PatternId::Mrt(r, t) if t < 1 || r < t => bad("r >= t >= 1 required"),
            _ => Ok(()),
        }
    }

    /// Ambient dimension of the built matroid.
    pub fn dim(&self) -> usize {
        match *self {
            PatternId::I(k) => k,
            PatternId::C(k) => k - 1,
            PatternId::Triangle => 2,
            PatternId::AG(d) | PatternId::PG(d) => d,
            PatternId::PGS(a, b) => a + b,
            PatternId::Kite => 6,
            PatternId::DoubledKite(k) => 6 + k,
            PatternId::TwoT => 4,
            PatternId::Mrt(r, _) => r,
        }
    }

    /// Parses a comma-separated list. Bare integers attach to a preceding
    /// two-parameter pattern, so `PGS1,3,I5` is `[PGS(1,3), I(5)]`.
    pub fn parse_list(s: &str) -> Result<Vec<PatternId>, Error> {
        let tokens: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let tok = tokens[i];
            let two_param = (tok.starts_with("PGS") || (tok.starts_with('M') && tok.len() > 1))
                && tokens.get(i + 1).is_some_and(|n| n.chars().all(|c| c.is_ascii_digit()));
            if two_param {
                out.push(format!("{tok},{}", tokens[i + 1]).parse()?);
                i += 2;
            } else {
                out.push(tok.parse()?);
                i += 1;
            }
        }
        if out.is_empty() {
            return Err(Error::Pattern(s.to_string(), "empty pattern list".into()));
        }
        Ok(out)
    }
}

fn parse_usize(src: &str, whole: &str) -> Result<usize, Error> {
    src.parse().map_err(|_| Error::Pattern(whole.to_string(), format!("bad integer `{src}`")))
}

fn parse_pair(src: &str, whole: &str) -> Result<(usize, usize), Error> {
    let (a, b) = src
        .split_once(',')
        .ok_or_else(|| Error::Pattern(whole.to_string(), "expected two comma-separated integers".into()))?;
    Ok((parse_usize(a, whole)?, parse_usize(b, whole)?))
}

impl FromStr for PatternId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        let id = match t.to_ascii_lowercase().as_str() {
            "triangle" => PatternId::Triangle,
            "kite" => PatternId::Kite,
            "2t" => PatternId::TwoT,
            _ => {
                if let Some(rest) = t.strip_prefix("dkite") {
                    PatternId::DoubledKite(parse_usize(rest, t)?)
                } else if let Some(rest) = t.strip_prefix("PGS") {
                    let (a, b) = parse_pair(rest, t)?;
                    PatternId::PGS(a, b)
                } else if let Some(rest) = t.strip_prefix("AG") {
                    PatternId::AG(parse_usize(rest, t)?)
                } else if let Some(rest) = t.strip_prefix("PG") {
                    PatternId::PG(parse_usize(rest, t)?)
                } else if let Some(rest) = t.strip_prefix('I') {
                    PatternId::I(parse_usize(rest, t)?)
                } else if let Some(rest) = t.strip_prefix('C') {
                    PatternId::C(parse_usize(rest, t)?)
                } else if let Some(rest) = t.strip_prefix('M') {
                    let (r, tt) = parse_pair(rest, t)?;
                    PatternId::Mrt(r, tt)
                } else {
                    return Err(Error::Pattern(t.to_string(), "unknown pattern name".into()));
                }
            }
        };
        id.validate()?;
        Ok(id)
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PatternId::I(k) => write!(f, "I{k}"),
            PatternId::C(k) => write!(f, "C{k}"),
            PatternId::Triangle => f.write_str("triangle"),
            PatternId::AG(d) => write!(f, "AG{d}"),
            PatternId::PG(d) => write!(f, "PG{d}"),
            PatternId::PGS(a, b) => write!(f, "PGS{a},{b}"),
            PatternId::Kite => f.write_str("kite"),
            PatternId::DoubledKite(k) => write!(f, "dkite{k}"),
            PatternId::TwoT => f.write_str("2T"),
            PatternId::Mrt(r, t) => write!(f, "M{r},{t}"),
        }
    }
}

/// Kite on the standard basis `x_i = e_i`.
pub const KITE_POINTS: [Point; 10] = [1, 2, 4, 8, 16, 32, 1 | 2 | 4, 2 | 4 | 8, 1 | 4 | 16, 1 | 2 | 32];

pub fn projective(d: usize) -> Matroid {
    Matroid::from_set(PointSet::full(d))
}

pub fn affine(d: usize) -> Matroid {
    let top = 1u32 << (d - 1);
    Matroid::new(d, (1..(1u32 << d)).filter(|p| p & top != 0)).expect("in range")
}

/// Balanced dimensions for `M_{r,t}`, larger parts first.
pub fn balanced_parts(r: usize, t: usize) -> Vec<usize> {
    let (q, rem) = (r / t, r % t);
    (0..t).map(|i| if i < rem { q + 1 } else { q }).collect()
}

pub fn build(p: PatternId) -> Result<Matroid, Error> {
    p.validate()?;
    let m = match p {
        PatternId::I(k) => Matroid::new(k, (0..k).map(|i| 1 << i))?,
        PatternId::C(k) => {
            let n = k - 1;
            Matroid::new(n, (0..n).map(|i| 1 << i).chain([(1u32 << n) - 1]))?
        }
        PatternId::Triangle => build(PatternId::C(3))?,
        PatternId::AG(d) => affine(d),
        PatternId::PG(d) => projective(d),
        PatternId::PGS(a, b) => projective(a).direct_sum(&projective(b)),
        PatternId::Kite => Matroid::new(6, KITE_POINTS)?,
        PatternId::DoubledKite(k) => build(PatternId::Kite)?.double_k(k),
        PatternId::TwoT => {
            let t = build(PatternId::Triangle)?;
            t.direct_sum(&t)
        }
        PatternId::Mrt(r, t) => balanced_parts(r, t)
            .into_iter()
            .fold(Matroid::empty(0), |acc, d| acc.direct_sum(&projective(d))),
    };
    Ok(m)
}

/// The pattern registry, in a fixed order.
pub fn list_patterns() -> Vec<(PatternId, &'static str)> {
    vec![
        (PatternId::I(3), "claw: basis of a 3-dimensional geometry"),
        (PatternId::I(4), "independent flat of four elements"),
        (PatternId::I(5), "independent flat of five elements"),
        (PatternId::Triangle, "two-dimensional flat"),
        (PatternId::C(4), "4-circuit, equal to AG3"),
        (PatternId::C(5), "5-circuit, the smallest odd circuit after the triangle"),
        (PatternId::C(6), "6-circuit"),
        (PatternId::AG(3), "affine geometry of dimension 3"),
        (PatternId::AG(4), "affine geometry of dimension 4"),
        (PatternId::PG(3), "Fano plane"),
        (PatternId::PGS(1, 2), "point plus triangle"),
        (PatternId::PGS(1, 3), "point plus Fano plane"),
        (PatternId::Kite, "10-element, 6-dimensional kite"),
        (PatternId::DoubledKite(1), "kite doubled once"),
        (PatternId::TwoT, "direct sum of two triangles"),
        (PatternId::Mrt(4, 2), "two triangles (M_{4,2})"),
        (PatternId::Mrt(6, 2), "two Fano planes (M_{6,2})"),
        (PatternId::Mrt(6, 3), "three triangles (M_{6,3})"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kite_points() {
        let k = build(PatternId::Kite).unwrap();
        assert_eq!(k.dim(), 6);
        assert_eq!(k.points(), vec![1, 2, 4, 7, 8, 14, 16, 21, 32, 35]);
    }

    #[test]
    fn sizes_and_dims() {
        let cases = [
            (PatternId::I(5), 5, 5),
            (PatternId::C(5), 4, 5),
            (PatternId::AG(3), 3, 4),
            (PatternId::AG(5), 5, 16),
            (PatternId::PG(3), 3, 7),
            (PatternId::PGS(1, 3), 4, 8),
            (PatternId::PGS(2, 2), 4, 6),
            (PatternId::Kite, 6, 10),
            (PatternId::DoubledKite(2), 8, 40),
            (PatternId::TwoT, 4, 6),
            (PatternId::Mrt(4, 2), 4, 6),
            (PatternId::Mrt(5, 2), 5, 10),
            (PatternId::Mrt(6, 3), 6, 9),
            (PatternId::Mrt(3, 1), 3, 7),
        ];
        for (id, dim, size) in cases {
            let m = build(id).unwrap();
            assert_eq!((m.dim(), m.len()), (dim, size), "{id}");
            assert_eq!(id.dim(), dim);
            assert!(m.is_full_rank(), "{id}");
        }
    }

    #[test]
    fn triangle_is_c3() {
        let t = build(PatternId::Triangle).unwrap();
        assert_eq!(t, build(PatternId::C(3)).unwrap());
        assert_eq!(t.points(), vec![1, 2, 3]);
    }

    #[test]
    fn circuits_sum_to_zero() {
        for k in 3..=8 {
            let c = build(PatternId::C(k)).unwrap();
            assert_eq!(c.points().iter().fold(0, |a, p| a ^ p), 0);
            assert_eq!(c.rank(), k - 1);
        }
    }

    #[test]
    fn affine_geometry_has_no_triangle() {
        let ag = build(PatternId::AG(3)).unwrap();
        assert_eq!(ag.points(), vec![4, 5, 6, 7]);
        let pts = ag.points();
        for &x in &pts {
            for &y in &pts {
                assert!(x == y || !ag.contains(x ^ y));
            }
        }
    }

    #[test]
    fn two_t_is_sum_of_triangles() {
        let t = build(PatternId::Triangle).unwrap();
        assert_eq!(build(PatternId::TwoT).unwrap(), t.direct_sum(&t));
        assert_eq!(build(PatternId::TwoT).unwrap(), build(PatternId::Mrt(4, 2)).unwrap());
    }

    #[test]
    fn mrt_partition() {
        assert_eq!(balanced_parts(7, 3), vec![3, 2, 2]);
        assert_eq!(balanced_parts(2, 1), vec![2]);
        let m = build(PatternId::Mrt(7, 3)).unwrap();
        assert_eq!(m.len(), 7 + 3 + 3);
    }

    #[test]
    fn parsing_round_trips() {
        for (id, _) in list_patterns() {
            assert_eq!(id.to_string().parse::<PatternId>().unwrap(), id);
        }
        for s in ["I5", "C5", "triangle", "AG4", "PG3", "PGS1,3", "kite", "dkite2", "2T", "M6,2"] {
            assert_eq!(s.parse::<PatternId>().unwrap().to_string(), s);
        }
        assert_eq!(
            PatternId::parse_list("I5,triangle").unwrap(),
            vec![PatternId::I(5), PatternId::Triangle]
        );
        assert_eq!(
            PatternId::parse_list("PGS1,3,I5,M6,2").unwrap(),
            vec![PatternId::PGS(1, 3), PatternId::I(5), PatternId::Mrt(6, 2)]
        );
    }

    #[test]
    fn invalid_parameters() {
        assert!("C2".parse::<PatternId>().is_err());
        assert!("I0".parse::<PatternId>().is_err());
        assert!("M2,3".parse::<PatternId>().is_err());
        assert!("AG0".parse::<PatternId>().is_err());
        assert!("hexagon".parse::<PatternId>().is_err());
        assert!(build(PatternId::C(1)).is_err());
    }

    #[test]
    fn registry() {
        let reg = list_patterns();
        assert!(reg.len() >= 10);
        assert!(reg.iter().any(|(p, _)| *p == PatternId::Kite && p.dim() == 6));
        assert!(reg.iter().any(|(p, _)| *p == PatternId::I(5)));
    }
}

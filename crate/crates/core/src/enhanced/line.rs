use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

use super::cylinder::{Cylinder, CylinderModel, Fiber};
use crate::complex::{CellComplex, CellMap};
use crate::error::{Error, Result};

/// A point of `R̄`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtT {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl ExtT {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtT::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for ExtT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtT::NegInf => write!(f, "-inf"),
            ExtT::PosInf => write!(f, "+inf"),
            ExtT::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Where a curve is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Both,
    Positive,
    Negative,
}

/// The graph `t = a + b/(x - pole)` over the part of the line selected by `side`, which
/// is taken relative to the pole (never over the pole itself when `b ≠ 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Curve {
    pub a: BigRational,
    pub b: BigRational,
    pub pole: BigRational,
    pub side: Side,
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact square root of a non-negative rational, if it is rational.
fn rational_sqrt(v: &BigRational) -> Option<BigRational> {
    let (n, d) = (v.numer(), v.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

impl Curve {
    pub fn new(a: BigRational, b: BigRational, side: Side) -> Curve {
        Curve::with_pole(a, b, BigRational::zero(), side)
    }

    pub fn with_pole(a: BigRational, b: BigRational, pole: BigRational, side: Side) -> Curve {
        Curve { a, b, pole, side }
    }

    pub fn constant(a: BigRational) -> Curve {
        Curve::new(a, BigRational::zero(), Side::Both)
    }

    pub fn negated(&self) -> Curve {
        Curve {
            a: -self.a.clone(),
            b: -self.b.clone(),
            ..self.clone()
        }
    }

    pub fn translated(&self, by: &BigRational) -> Curve {
        Curve {
            a: &self.a + by,
            ..self.clone()
        }
    }

    fn is_constant(&self) -> bool {
        self.b.is_zero() && self.side == Side::Both
    }

    pub fn at(&self, x: &BigRational) -> BigRational {
        if self.b.is_zero() {
            self.a.clone()
        } else {
            &self.a + &self.b / (x - &self.pole)
        }
    }

    fn defined_at(&self, x: &BigRational) -> bool {
        let side_ok = match self.side {
            Side::Both => true,
            Side::Positive => x > &self.pole,
            Side::Negative => x < &self.pole,
        };
        side_ok && (self.b.is_zero() || x != &self.pole)
    }

    /// Whether the curve is defined on the whole open interval `(l, r)`.
    fn defined_on(&self, l: Option<&BigRational>, r: Option<&BigRational>) -> bool {
        let pos = l.is_some_and(|l| l >= &self.pole);
        let neg = r.is_some_and(|r| r <= &self.pole);
        match self.side {
            Side::Positive if !pos => false,
            Side::Negative if !neg => false,
            _ => self.b.is_zero() || pos || neg,
        }
    }

    /// Whether the curve runs off to `±∞` at `v`.
    fn blows_up_at(&self, v: &BigRational) -> bool {
        !self.b.is_zero() && v == &self.pole
    }

    /// Points where the two curves meet. Errors when a crossing is irrational.
    fn crossings(&self, other: &Curve) -> Result<Vec<BigRational>> {
        // clear denominators: da (x-p)(x-q) + b1 (x-q) - b2 (x-p) = 0, with constant
        // curves contributing no factor
        let (f, g) = (self, other);
        let da = &f.a - &g.a;
        let mut cands = Vec::new();
        let (p, qq) = (&f.pole, &g.pole);
        let (fb, gb) = (&f.b, &g.b);
        if fb.is_zero() && gb.is_zero() {
            return Ok(cands);
        }
        let lin = |c1: &BigRational, c0: &BigRational, out: &mut Vec<BigRational>| {
            if !c1.is_zero() {
                out.push(-c0 / c1);
            }
        };
        if fb.is_zero() {
            lin(&da, &(-(&da * qq) - gb), &mut cands);
        } else if gb.is_zero() {
            lin(&da, &(-(&da * p) + fb), &mut cands);
        } else if p == qq {
            lin(&da, &(-(&da * p) + fb - gb), &mut cands);
        } else {
            let two = BigRational::from_integer(2.into());
            let a2 = da.clone();
            let a1 = -(&da * (p + qq)) + fb - gb;
            let a0 = &da * p * qq - fb * qq + gb * p;
            if a2.is_zero() {
                lin(&a1, &a0, &mut cands);
            } else {
                let disc = &a1 * &a1 - BigRational::from_integer(4.into()) * &a2 * &a0;
                if !disc.is_negative() {
                    let r = rational_sqrt(&disc).ok_or_else(|| {
                        Error::InvalidModel(format!(
                            "curves {} and {} cross at an irrational point",
                            f.label(),
                            g.label()
                        ))
                    })?;
                    cands.push((-&a1 + &r) / (&two * &a2));
                    cands.push((-&a1 - &r) / (&two * &a2));
                }
            }
        }
        Ok(cands
            .into_iter()
            .filter(|x| f.defined_at(x) && g.defined_at(x) && f.at(x) == g.at(x))
            .collect())
    }

    fn label(&self) -> String {
        let den = if self.pole.is_zero() {
            "x".to_string()
        } else if self.pole.is_negative() {
            format!("(x+{})", -self.pole.clone())
        } else {
            format!("(x-{})", self.pole)
        };
        let b = if self.b.is_zero() {
            String::new()
        } else if self.b.is_one() {
            format!("1/{den}")
        } else if self.b == -BigRational::one() {
            format!("-1/{den}")
        } else if self.b.is_integer() {
            format!("{}/{den}", self.b)
        } else {
            format!("({})/{den}", self.b)
        };
        match (self.a.is_zero(), b.is_empty()) {
            (_, true) => self.a.to_string(),
            (true, false) => b,
            (false, false) if b.starts_with('-') => format!("{}{}", self.a, b),
            (false, false) => format!("{}+{}", self.a, b),
        }
    }
}

/// Region of `R × R̄` given by a predicate on exact sample points.
pub type Region = Arc<dyn Fn(&BigRational, &ExtT) -> bool + Send + Sync>;

/// Description of a t-model over the real line: the curves stratifying the plane,
/// extra base vertices, and `F = k_S[shift]` with `S` given by a predicate.
#[derive(Clone)]
pub struct LineSpec {
    pub name: String,
    pub vertices: Vec<BigRational>,
    pub curves: Vec<Curve>,
    pub support: Region,
    pub shift: i32,
    /// Add the mirror image of every curve so that `t ↦ -t` is cellular.
    pub symmetric: bool,
}

impl fmt::Debug for LineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineSpec")
            .field("name", &self.name)
            .field("vertices", &self.vertices)
            .field("curves", &self.curves)
            .field("shift", &self.shift)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

/// The cylinder built from a [`LineSpec`], with an exact sample point for every cell.
#[derive(Clone, Debug)]
pub struct LineModel {
    pub cylinder: CylinderModel,
    pub vertices: Vec<BigRational>,
    pub samples: Vec<(BigRational, ExtT)>,
}

fn fmt_x(v: &BigRational) -> String {
    v.to_string()
}

/// Line complex with the given sorted vertices, cells ordered left to right.
/// Returns the complex and, per cell, its closed endpoint data `(left, right)`.
pub fn line_complex(vertices: &[BigRational]) -> Result<(Arc<CellComplex>, Vec<BaseCell>)> {
    let mut cells = Vec::new();
    let mut info = Vec::new();
    let n = vertices.len();
    if n == 0 {
        cells.push(("x".to_string(), 1));
        info.push(BaseCell::Open(None, None));
    }
    for i in 0..n {
        let left = if i == 0 {
            None
        } else {
            Some(vertices[i - 1].clone())
        };
        let name = match &left {
            None => format!("x<{}", fmt_x(&vertices[0])),
            Some(l) => format!("{}<x<{}", fmt_x(l), fmt_x(&vertices[i])),
        };
        if i == 0 {
            cells.push((name, 1));
            info.push(BaseCell::Open(None, Some(vertices[0].clone())));
        }
        cells.push((format!("x={}", fmt_x(&vertices[i])), 0));
        info.push(BaseCell::Vertex(vertices[i].clone()));
        let right = vertices.get(i + 1).cloned();
        let name = match &right {
            None => format!("x>{}", fmt_x(&vertices[i])),
            Some(r) => format!("{}<x<{}", fmt_x(&vertices[i]), fmt_x(r)),
        };
        cells.push((name, 1));
        info.push(BaseCell::Open(Some(vertices[i].clone()), right));
    }
    let mut inc = Vec::new();
    for (i, c) in info.iter().enumerate() {
        if let BaseCell::Vertex(_) = c {
            inc.push((i - 1, i, 1i8));
            inc.push((i + 1, i, -1i8));
        }
    }
    Ok((Arc::new(CellComplex::from_indices(cells, inc)?), info))
}

#[derive(Clone, Debug, PartialEq)]
pub enum BaseCell {
    Vertex(BigRational),
    Open(Option<BigRational>, Option<BigRational>),
}

impl BaseCell {
    pub fn sample(&self) -> BigRational {
        match self {
            BaseCell::Vertex(v) => v.clone(),
            BaseCell::Open(None, None) => BigRational::zero(),
            BaseCell::Open(Some(l), None) => l + BigRational::one(),
            BaseCell::Open(None, Some(r)) => r - BigRational::one(),
            BaseCell::Open(Some(l), Some(r)) => (l + r) / BigRational::from_integer(2.into()),
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        match self {
            BaseCell::Vertex(v) => v == x,
            BaseCell::Open(l, r) => {
                l.as_ref().is_none_or(|l| l < x) && r.as_ref().is_none_or(|r| x < r)
            }
        }
    }
}

/// Cellular map from a finer line complex onto a coarser one, sending each cell to the
/// coarse cell containing it.
pub fn coarsening(fine: &[BigRational], coarse: &[BigRational]) -> Result<CellMap> {
    let (kf, inf) = line_complex(fine)?;
    let (kc, inc) = line_complex(coarse)?;
    let map = inf
        .iter()
        .map(|c| {
            let x = c.sample();
            inc.iter()
                .position(|d| d.contains(&x))
                .ok_or_else(|| Error::InvalidParameter("coarse line misses a point".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    CellMap::new(kf, kc, map)
}

fn midpoint_above(lo: &ExtT, hi: &ExtT) -> ExtT {
    let one = BigRational::one();
    match (lo, hi) {
        (ExtT::Finite(a), ExtT::Finite(b)) => {
            ExtT::Finite((a + b) / BigRational::from_integer(2.into()))
        }
        (ExtT::NegInf, ExtT::Finite(b)) => ExtT::Finite(b - one),
        (ExtT::Finite(a), ExtT::PosInf) => ExtT::Finite(a + one),
        _ => ExtT::Finite(BigRational::zero()),
    }
}

impl LineSpec {
    fn all_curves(&self) -> Vec<Curve> {
        let mut cs: Vec<Curve> = Vec::new();
        let mut push = |c: Curve| {
            if !cs.contains(&c) {
                cs.push(c);
            }
        };
        push(Curve::constant(BigRational::zero()));
        for c in &self.curves {
            push(c.clone());
            if self.symmetric {
                push(c.negated());
            }
        }
        cs
    }

    /// Base vertices: the requested ones, the poles of non-constant curves, and every
    /// crossing point of two curves.
    fn all_vertices(&self, curves: &[Curve]) -> Result<Vec<BigRational>> {
        let mut vs: Vec<BigRational> = self.vertices.clone();
        vs.extend(
            curves
                .iter()
                .filter(|c| !c.is_constant())
                .map(|c| c.pole.clone()),
        );
        for (i, f) in curves.iter().enumerate() {
            for g in &curves[i + 1..] {
                vs.extend(f.crossings(g)?);
            }
        }
        vs.sort();
        vs.dedup();
        Ok(vs)
    }

    pub fn build(&self) -> Result<LineModel> {
        let curves = self.all_curves();
        let vertices = self.all_vertices(&curves)?;
        let (base, info) = line_complex(&vertices)?;
        // finite sections per base cell, as values at the sample point plus the curve
        let mut sections: Vec<Vec<(ExtT, Option<Curve>)>> = Vec::with_capacity(info.len());
        for c in &info {
            let x = c.sample();
            let mut list: Vec<(ExtT, Option<Curve>)> = Vec::new();
            if let BaseCell::Open(l, r) = c {
                for cv in curves
                    .iter()
                    .filter(|cv| cv.defined_on(l.as_ref(), r.as_ref()))
                {
                    let v = ExtT::Finite(cv.at(&x));
                    if !list.iter().any(|(w, _)| *w == v) {
                        list.push((v, Some(cv.clone())));
                    }
                }
            }
            sections.push(list);
        }
        // vertex fibers: values of curves defined there and finite limits from the sides
        for (i, c) in info.iter().enumerate() {
            let BaseCell::Vertex(v) = c else { continue };
            let mut vals: Vec<ExtT> = curves
                .iter()
                .filter(|cv| cv.defined_at(v))
                .map(|cv| ExtT::Finite(cv.at(v)))
                .collect();
            for side in [i - 1, i + 1] {
                for (_, cv) in &sections[side] {
                    let cv = cv.as_ref().expect("open cells carry curves");
                    if !cv.blows_up_at(v) {
                        vals.push(ExtT::Finite(cv.at(v)));
                    }
                }
            }
            vals.sort();
            vals.dedup();
            sections[i] = vals.into_iter().map(|v| (v, None)).collect();
        }
        for s in sections.iter_mut() {
            s.sort_by(|a, b| a.0.cmp(&b.0));
            s.insert(0, (ExtT::NegInf, None));
            s.push((ExtT::PosInf, None));
        }
        let labels: Vec<Vec<String>> = sections
            .iter()
            .map(|s| {
                s.iter()
                    .map(|(v, cv)| match cv {
                        Some(cv) => cv.label(),
                        None => v.to_string(),
                    })
                    .collect()
            })
            .collect();
        let mut limits = HashMap::new();
        for (i, c) in info.iter().enumerate() {
            let BaseCell::Vertex(v) = c else { continue };
            for (side, from_right) in [(i - 1, false), (i + 1, true)] {
                let lim: Vec<usize> = sections[side]
                    .iter()
                    .map(|(val, cv)| {
                        let target = match (val, cv) {
                            (ExtT::Finite(_), Some(cv)) if !cv.blows_up_at(v) => {
                                ExtT::Finite(cv.at(v))
                            }
                            (ExtT::Finite(_), Some(cv)) => {
                                if cv.b.is_positive() == from_right {
                                    ExtT::PosInf
                                } else {
                                    ExtT::NegInf
                                }
                            }
                            (other, _) => other.clone(),
                        };
                        sections[i]
                            .iter()
                            .position(|(w, _)| *w == target)
                            .expect("limit is a section")
                    })
                    .collect();
                limits.insert((side, i), lim);
            }
        }
        let cylinder = Cylinder {
            base: base.clone(),
            labels,
            limits,
            symmetric: self.symmetric,
        }
        .build()?;
        let samples = cylinder
            .cells
            .iter()
            .map(|(b, x)| {
                let s = &sections[*b];
                let t = match x {
                    Fiber::Point(j) => s[*j].0.clone(),
                    Fiber::Band(j) => midpoint_above(&s[*j].0, &s[*j + 1].0),
                };
                (info[*b].sample(), t)
            })
            .collect();
        check_order(&sections)?;
        Ok(LineModel {
            cylinder,
            vertices,
            samples,
        })
    }
}

fn check_order(sections: &[Vec<(ExtT, Option<Curve>)>]) -> Result<()> {
    for s in sections {
        if s.windows(2).any(|w| w[0].0.cmp(&w[1].0) != Ordering::Less) {
            return Err(Error::Internal(
                "fiber sections are not strictly ordered".into(),
            ));
        }
    }
    Ok(())
}

impl LineModel {
    pub fn cells_where(
        &self,
        pred: impl Fn(&BigRational, &ExtT) -> bool,
    ) -> crate::complex::ConstructibleSet {
        crate::complex::ConstructibleSet::from_mask(
            self.cylinder.total.clone(),
            self.samples.iter().map(|(x, t)| pred(x, t)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(curves: Vec<Curve>) -> LineSpec {
        LineSpec {
            name: "test".into(),
            vertices: vec![],
            curves,
            support: Arc::new(|_, _| false),
            shift: 0,
            symmetric: true,
        }
    }

    #[test]
    fn hyperbola_plane_has_three_base_cells() {
        let m = spec(vec![Curve::new(q(0, 1), q(-1, 1), Side::Positive)])
            .build()
            .unwrap();
        assert_eq!(m.vertices, vec![q(0, 1)]);
        assert_eq!(m.cylinder.projection.target.len(), 3);
        assert_eq!(m.cylinder.total.len(), 19);
        assert!(m.cylinder.t_flip.is_some());
    }

    #[test]
    fn crossings_become_vertices() {
        let m = spec(vec![Curve::new(q(1, 1), q(-1, 1), Side::Positive)])
            .build()
            .unwrap();
        // 1 - 1/x meets 0 at x = 1 and its mirror at x = 1
        assert_eq!(m.vertices, vec![q(0, 1), q(1, 1)]);
    }

    #[test]
    fn coarsening_is_monotone() {
        let c = coarsening(&[q(0, 1), q(1, 2)], &[q(0, 1)]).unwrap();
        assert_eq!(c.as_slice(), &[0, 1, 2, 2, 2]);
    }
}

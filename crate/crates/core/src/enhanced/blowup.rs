//! Cell model of the real oriented blow-up of a disk at the origin, times `R̄`, carrying
//! `F = k_{r>0, t ≥ a − φ}` with `φ = r^{-d} cos(dθ)`, the real part of a pole of
//! order `d`.
//!
//! The circle is cut at the `2d` zeros of `cos(dθ)`. Sector `k` has `φ > 0` for even
//! `k`. When `a ≠ 0` the sectors where `φ` has the sign of `a` are split by the curve
//! `φ = a`, along which `a − φ` crosses `0`.

use std::collections::HashMap;
use std::sync::Arc;

use num::{BigRational, Signed, Zero};

use super::cylinder::{Cylinder, Fiber};
use super::TModel;
use crate::complex::{CellComplex, CellMap};
use crate::error::{Error, Result};
use crate::linalg::Field;
use crate::sheaf::Sheaf;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Piece {
    Whole,
    Inner,
    Outer,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Corner,
    Arc,
    Ray,
    Curve,
    Sector(Piece),
}

struct BaseCellSpec {
    id: String,
    kind: Kind,
    /// Sign of `φ` on the sector this cell belongs to, for arcs, curves and sectors.
    phi_sign: i32,
    labels: Vec<&'static str>,
    /// Lowest section of the region `t ≥ a − φ`, when the cell has `r > 0`.
    region_from: Option<&'static str>,
    facets: Vec<String>,
}

fn limit_label(label: &str, to: Kind, phi_sign: i32) -> &'static str {
    match (label, to) {
        ("-inf", _) => "-inf",
        ("+inf", _) => "+inf",
        ("0", _) => "0",
        ("a", _) => "a",
        ("a-phi", Kind::Arc) => {
            if phi_sign > 0 {
                "-inf"
            } else {
                "+inf"
            }
        }
        ("a-phi", Kind::Ray) => "a",
        ("a-phi", _) => "0",
        ("-|phi|", Kind::Arc) => "-inf",
        ("|phi|", Kind::Arc) => "+inf",
        (_, _) => "0",
    }
}

struct Upstairs {
    cyl: super::cylinder::CylinderModel,
    f: Sheaf,
    /// Blow-up base cell to disk cell.
    down: Vec<usize>,
    disk: Arc<CellComplex>,
}

fn build(d: usize, a: Option<&BigRational>, field: Field) -> Result<Upstairs> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "pole order d must be positive".into(),
        ));
    }
    let a_sign = a.map_or(0, |a| {
        if a.is_zero() {
            0
        } else if a.is_positive() {
            1
        } else {
            -1
        }
    });
    let n = 2 * d;
    let mut cells: Vec<BaseCellSpec> = Vec::new();
    let ray_labels: Vec<&'static str> = match a_sign {
        0 => vec!["-inf", "0", "+inf"],
        1 => vec!["-inf", "0", "a", "+inf"],
        _ => vec!["-inf", "a", "0", "+inf"],
    };
    for k in 0..n {
        cells.push(BaseCellSpec {
            id: format!("C{k}"),
            kind: Kind::Corner,
            phi_sign: 0,
            labels: ray_labels.clone(),
            region_from: None,
            facets: vec![],
        });
    }
    for k in 0..n {
        let s = if k % 2 == 0 { 1 } else { -1 };
        let (c0, c1) = (format!("C{k}"), format!("C{}", (k + 1) % n));
        cells.push(BaseCellSpec {
            id: format!("A{k}"),
            kind: Kind::Arc,
            phi_sign: s,
            labels: vec!["-inf", "0", "+inf"],
            region_from: None,
            facets: vec![c0.clone(), c1.clone()],
        });
        cells.push(BaseCellSpec {
            id: format!("R{k}"),
            kind: Kind::Ray,
            phi_sign: 0,
            labels: ray_labels.clone(),
            region_from: Some(if a_sign == 0 { "0" } else { "a" }),
            facets: vec![c0.clone()],
        });
    }
    for k in 0..n {
        let s: i32 = if k % 2 == 0 { 1 } else { -1 };
        let (r0, r1) = (format!("R{k}"), format!("R{}", (k + 1) % n));
        let arc = format!("A{k}");
        let (c0, c1) = (format!("C{k}"), format!("C{}", (k + 1) % n));
        // a − φ has sign `inner` near r = 0 and the sign of a far out
        let below = vec!["-inf", "a-phi", "0", "+inf"];
        let above = vec!["-inf", "0", "a-phi", "+inf"];
        if a_sign == 0 {
            cells.push(BaseCellSpec {
                id: format!("S{k}"),
                kind: Kind::Sector(Piece::Whole),
                phi_sign: s,
                labels: vec!["-inf", "-|phi|", "0", "|phi|", "+inf"],
                region_from: Some(if s > 0 { "-|phi|" } else { "|phi|" }),
                facets: vec![arc, r0, r1],
            });
        } else if s == a_sign {
            let (inner, outer) = if a_sign > 0 {
                (below, above)
            } else {
                (above, below)
            };
            cells.push(BaseCellSpec {
                id: format!("G{k}"),
                kind: Kind::Curve,
                phi_sign: s,
                labels: vec!["-inf", "0", "+inf"],
                region_from: Some("0"),
                facets: vec![c0, c1],
            });
            cells.push(BaseCellSpec {
                id: format!("S{k}in"),
                kind: Kind::Sector(Piece::Inner),
                phi_sign: s,
                labels: inner,
                region_from: Some("a-phi"),
                facets: vec![arc, format!("G{k}")],
            });
            cells.push(BaseCellSpec {
                id: format!("S{k}out"),
                kind: Kind::Sector(Piece::Outer),
                phi_sign: s,
                labels: outer,
                region_from: Some("a-phi"),
                facets: vec![format!("G{k}"), r0, r1],
            });
        } else {
            cells.push(BaseCellSpec {
                id: format!("S{k}"),
                kind: Kind::Sector(Piece::Whole),
                phi_sign: s,
                labels: if a_sign > 0 { above } else { below },
                region_from: Some("a-phi"),
                facets: vec![arc, r0, r1],
            });
        }
    }
    let dim = |k: Kind| match k {
        Kind::Corner => 0,
        Kind::Arc | Kind::Ray | Kind::Curve => 1,
        Kind::Sector(_) => 2,
    };
    let named: Vec<(String, usize)> = cells.iter().map(|c| (c.id.clone(), dim(c.kind))).collect();
    let faces: Vec<(String, String)> = cells
        .iter()
        .flat_map(|c| c.facets.iter().map(move |f| (c.id.clone(), f.clone())))
        .collect();
    let base = Arc::new(CellComplex::orient(named, &faces)?);
    let mut limits = HashMap::new();
    for (tau, c) in cells.iter().enumerate() {
        for (sigma, _) in base.facets(tau) {
            let to = &cells[*sigma];
            let lim = c
                .labels
                .iter()
                .map(|l| {
                    let target = limit_label(l, to.kind, c.phi_sign);
                    to.labels.iter().position(|x| *x == target).ok_or_else(|| {
                        Error::Internal(format!(
                            "section {l} of {} has no limit over {}",
                            c.id, to.id
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            limits.insert((tau, *sigma), lim);
        }
    }
    let cyl = Cylinder {
        base: base.clone(),
        labels: cells
            .iter()
            .map(|c| c.labels.iter().map(|s| s.to_string()).collect())
            .collect(),
        limits,
        symmetric: a_sign == 0,
    }
    .build()?;
    let region = cyl.cells_where(|b, x| {
        let c = &cells[b];
        let Some(from) = c.region_from else {
            return false;
        };
        let lo = c
            .labels
            .iter()
            .position(|l| *l == from)
            .expect("region label exists");
        let top = c.labels.len() - 1;
        match x {
            Fiber::Point(j) => j >= lo && j < top,
            Fiber::Band(j) => j >= lo,
        }
    });
    let f = Sheaf::constant_on(&region, field, 0)?;
    // the disk: origin, the 2d rays and the 2d sectors
    let mut disk_cells = vec![("O".to_string(), 0)];
    let mut disk_faces = Vec::new();
    for k in 0..n {
        disk_cells.push((format!("R{k}"), 1));
        disk_faces.push((format!("R{k}"), "O".to_string()));
    }
    for k in 0..n {
        disk_cells.push((format!("S{k}"), 2));
        disk_faces.push((format!("S{k}"), format!("R{k}")));
        disk_faces.push((format!("S{k}"), format!("R{}", (k + 1) % n)));
    }
    let disk = Arc::new(CellComplex::orient(disk_cells, &disk_faces)?);
    let down = cells
        .iter()
        .map(|c| {
            let id = match c.kind {
                Kind::Corner | Kind::Arc => "O".to_string(),
                Kind::Ray => c.id.clone(),
                Kind::Curve | Kind::Sector(_) => {
                    format!(
                        "S{}",
                        c.id.trim_start_matches(['G', 'S'])
                            .trim_end_matches(['i', 'n', 'o', 'u', 't'])
                    )
                }
            };
            disk.index_of(&id)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Upstairs { cyl, f, down, disk })
}

/// The model over the blow-up itself: its associated sheaf is `k_{I ⊔ Ẋ}`.
pub fn blowup_pole_upstairs(d: usize, a: Option<&BigRational>, field: Field) -> Result<TModel> {
    let up = build(d, a, field)?;
    TModel::from_cylinder(&format!("blowup-pole(d={d})|upstairs"), &up.cyl, up.f)
}

/// The model over the disk, through the blow-up map: its associated sheaf is
/// `Rp_* k_{I ⊔ Ẋ}`.
pub fn blowup_pole(d: usize, a: Option<&BigRational>, field: Field) -> Result<TModel> {
    let up = build(d, a, field)?;
    let mut m = TModel::from_cylinder(&format!("blowup-pole(d={d})"), &up.cyl, up.f)?;
    let p = CellMap::new(m.base.clone(), up.disk.clone(), up.down)?;
    m.projection = m.projection.compose(&p)?;
    m.base = up.disk;
    m.validate()?;
    Ok(m)
}

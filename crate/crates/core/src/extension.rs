//! Open extensions of locally closed sets and their section certificates.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::complex::{
    check_join_condition, subdivide_complex, transport_constructible, ConstructibleSet,
};
use crate::error::{Error, Result};
use crate::linalg::GradedDims;
use crate::sheaf::{pullback, restriction_between, sections, Sheaf};

/// Evidence that sections over an open neighbourhood `U` of `Z` agree with sections
/// over `Z`.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionCertificate {
    pub digest: String,
    pub subdivision_depth: usize,
    /// Cells of `U` in the subdivision.
    pub u: Vec<String>,
    pub sections_u: GradedDims,
    pub sections_z: GradedDims,
    /// Sections over `Z` computed on the original complex.
    pub sections_z_unsubdivided: GradedDims,
    pub iso_flags: BTreeMap<i32, bool>,
    pub u_open: bool,
    pub z_closed_in_u: bool,
    pub u_inside_w: bool,
    pub join_closed: bool,
    pub valid: bool,
}

fn digest(f: &Sheaf, z: &ConstructibleSet, w: Option<&ConstructibleSet>) -> String {
    let mut h = DefaultHasher::new();
    let k = f.complex();
    for c in k.cells() {
        c.id.hash(&mut h);
        c.dim.hash(&mut h);
    }
    for t in 0..k.len() {
        for (s, sign) in k.facets(t) {
            (t, *s, *sign).hash(&mut h);
        }
    }
    f.field().to_string().hash(&mut h);
    for (i, st) in f.stalks().iter().enumerate() {
        (i, st.start(), st.end(), st.total_dim()).hash(&mut h);
    }
    for ((s, t), g) in f.restriction_table() {
        for (deg, m) in &g.0 {
            (s, t, *deg).hash(&mut h);
            for (r, c, v) in m.entries() {
                (r, c, v.to_string()).hash(&mut h);
            }
        }
    }
    z.mask().hash(&mut h);
    if let Some(w) = w {
        w.mask().hash(&mut h);
    }
    format!("{:016x}", h.finish())
}

/// Subdivides once, transports `F`, `Z` and `W`, builds `U` as the union of open stars
/// of the transported `Z`, and compares `RΓ(U; F) → RΓ(Z; F)`.
pub fn extend_and_certify(
    f: &Sheaf,
    z: &ConstructibleSet,
    w: Option<&ConstructibleSet>,
) -> Result<ExtensionCertificate> {
    z.require_locally_closed()?;
    let k = f.complex();
    if **z.complex() != **k {
        return Err(Error::InvalidParameter(
            "Z lives on a different complex".into(),
        ));
    }
    let w_all = ConstructibleSet::all(k.clone());
    let w_set = w.unwrap_or(&w_all);
    if !w_set.is_open() {
        return Err(Error::Classification {
            expected: "open".into(),
            reason: "W has a member whose coface is missing".into(),
        });
    }
    if !z.is_subset(w_set) {
        return Err(Error::InvalidParameter("W does not contain Z".into()));
    }
    let (_, carrier) = subdivide_complex(k);
    let fb = pullback(&carrier, f)?;
    let zt = transport_constructible(z, &carrier);
    let wt = transport_constructible(w_set, &carrier);
    let join_closed = check_join_condition(&zt)?;
    if !join_closed {
        return Err(Error::Internal(format!(
            "transported set {:?} is not join closed",
            zt.ids()
        )));
    }
    let u = zt.up_closure();
    let u_open = u.is_open();
    let z_closed_in_u = zt.is_closed_in(&u);
    let u_inside_w = u.is_subset(&wt);
    let r = restriction_between(&fb, &u, &zt)?;
    let sections_u = r.source.cohomology();
    let sections_z = r.target.cohomology();
    let iso_flags = r.iso_flags();
    let quasi_iso = r.is_quasi_iso();
    let sections_z_unsubdivided = sections(z, f)?.cohomology();
    let valid = u_open
        && z_closed_in_u
        && u_inside_w
        && quasi_iso
        && iso_flags.values().all(|b| *b)
        && sections_z == sections_z_unsubdivided;
    Ok(ExtensionCertificate {
        digest: digest(f, z, w),
        subdivision_depth: 1,
        u: u.ids(),
        sections_u,
        sections_z,
        sections_z_unsubdivided,
        iso_flags,
        u_open,
        z_closed_in_u,
        u_inside_w,
        join_closed,
        valid,
    })
}

/// Behaviour of sections along a decreasing family of open neighbourhoods of `Z`.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub stages: Vec<GradedDims>,
    pub target: GradedDims,
    /// Whether each consecutive restriction is a quasi-isomorphism.
    pub stage_isos: Vec<bool>,
    /// Whether the last neighbourhood already computes sections over `Z`.
    pub stabilized: bool,
}

pub fn cofinal_family_probe(
    f: &Sheaf,
    z: &ConstructibleSet,
    opens: &[ConstructibleSet],
) -> Result<ProbeReport> {
    z.require_locally_closed()?;
    if opens.is_empty() {
        return Err(Error::InvalidParameter("empty family".into()));
    }
    for (i, u) in opens.iter().enumerate() {
        if !u.is_open() {
            return Err(Error::Classification {
                expected: "open".into(),
                reason: format!("member {i} of the family"),
            });
        }
        if !z.is_subset(u) {
            return Err(Error::InvalidParameter(format!(
                "member {i} does not contain Z"
            )));
        }
        if i > 0 && !u.is_subset(&opens[i - 1]) {
            return Err(Error::InvalidParameter(format!("member {i} is not nested")));
        }
    }
    let mut stages = Vec::new();
    let mut stage_isos = Vec::new();
    for (i, u) in opens.iter().enumerate() {
        if i + 1 < opens.len() {
            let r = restriction_between(f, u, &opens[i + 1])?;
            stages.push(r.source.cohomology());
            stage_isos.push(r.is_quasi_iso());
        }
    }
    let last = restriction_between(f, opens.last().unwrap(), z)?;
    stages.push(last.source.cohomology());
    Ok(ProbeReport {
        stages,
        target: last.target.cohomology(),
        stage_isos,
        stabilized: last.is_quasi_iso(),
    })
}

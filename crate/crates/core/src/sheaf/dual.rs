use std::collections::{BTreeMap, HashMap};

use super::{GradedMap, Sheaf};
use crate::linalg::{CochainComplex, Matrix, MatrixBuilder};

/// Layout of `⊕_{τ ≥ σ} F(τ)^*`: block `(τ, q)` sits in degree `-dim τ - q`.
struct DualStalk {
    complex: CochainComplex,
    offsets: HashMap<(usize, i32), usize>,
}

fn dual_stalk(f: &Sheaf, sigma: usize) -> DualStalk {
    let k = f.complex();
    let field = f.field();
    let up = k.cofaces(sigma);
    let mut offsets = HashMap::new();
    let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
    for &tau in &up {
        let st = f.stalk(tau);
        for q in st.start()..st.end() {
            if st.dim(q) == 0 {
                continue;
            }
            let n = -(k.dim_of(tau) as i32) - q;
            let slot = dims.entry(n).or_insert(0);
            offsets.insert((tau, q), *slot);
            *slot += st.dim(q);
        }
    }
    let Some((&lo, _)) = dims.iter().next() else {
        return DualStalk {
            complex: CochainComplex::zero(field),
            offsets,
        };
    };
    let hi = *dims.keys().last().unwrap();
    let dim = |n: i32| dims.get(&n).copied().unwrap_or(0);
    let mut builders: BTreeMap<i32, MatrixBuilder> = (lo..hi)
        .map(|n| (n, MatrixBuilder::new(field, dim(n + 1), dim(n))))
        .collect();
    let in_star: Vec<bool> = {
        let mut m = vec![false; k.len()];
        for t in &up {
            m[*t] = true;
        }
        m
    };
    for (&(tau, q), &col) in &offsets {
        let n = -(k.dim_of(tau) as i32) - q;
        let Some(b) = builders.get_mut(&n) else {
            continue;
        };
        let st = f.stalk(tau);
        if let Some(&row) = offsets.get(&(tau, q - 1)) {
            let m: Matrix = st.diff(q - 1).transpose();
            b.push_block(row, col, &m, &field.sign(k.dim_of(tau) % 2 == 1));
        }
        for (j, (face, s)) in k.facets(tau).iter().enumerate() {
            if !in_star[*face] {
                continue;
            }
            let Some(&row) = offsets.get(&(*face, q)) else {
                continue;
            };
            let r = f
                .facet_restriction(tau, j)
                .component(q, f.stalk(*face), st)
                .transpose();
            b.push_block(row, col, &r, &field.from_i64(*s as i64));
        }
    }
    let dimv: Vec<usize> = (lo..=hi).map(dim).collect();
    let diffs = builders.into_values().map(|b| b.build()).collect();
    DualStalk {
        complex: CochainComplex::new_unchecked(field, lo, dimv, diffs).expect("dual shapes"),
        offsets,
    }
}

/// Stalk of the Verdier dual at `σ`: the linear dual of compactly supported cochains
/// on the open star of `σ`.
pub(crate) fn dual_stalk_complex(f: &Sheaf, sigma: usize) -> CochainComplex {
    dual_stalk(f, sigma).complex
}

/// Verdier dual `D F`. Its value at `σ` is `⊕_{τ ≥ σ} F(τ)^*` with `F(τ)^{q*}` in
/// degree `-dim τ - q`; restrictions are the projections onto the smaller stars.
pub fn verdier_dual(f: &Sheaf) -> Sheaf {
    let k = f.complex();
    let field = f.field();
    let stalks: Vec<DualStalk> = (0..k.len()).map(|s| dual_stalk(f, s)).collect();
    let mut restr = Vec::with_capacity(k.len());
    for tau in 0..k.len() {
        let mut row = Vec::new();
        for (sigma, _) in k.facets(tau) {
            let (src, tgt) = (&stalks[*sigma], &stalks[tau]);
            let mut builders: BTreeMap<i32, MatrixBuilder> = BTreeMap::new();
            for (&(cell, q), &row_off) in &tgt.offsets {
                let col = src.offsets[&(cell, q)];
                let n = -(k.dim_of(cell) as i32) - q;
                builders
                    .entry(n)
                    .or_insert_with(|| {
                        MatrixBuilder::new(field, tgt.complex.dim(n), src.complex.dim(n))
                    })
                    .push_identity(row_off, col, f.stalk(cell).dim(q), &field.one());
            }
            row.push(GradedMap(
                builders.into_iter().map(|(n, b)| (n, b.build())).collect(),
            ));
        }
        restr.push(row);
    }
    Sheaf::from_parts(
        k.clone(),
        field,
        stalks.into_iter().map(|s| s.complex).collect(),
        restr,
    )
}

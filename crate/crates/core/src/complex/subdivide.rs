use std::sync::Arc;

use itertools::Itertools;

use super::{CarrierMap, CellComplex, CellMap, SimplicialComplex};

/// Chains of the face poset, each listed by increasing dimension.
fn chains(k: &CellComplex) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..k.len()).collect();
    order.sort_by_key(|i| (k.dim_of(*i), *i));
    let mut out: Vec<Vec<usize>> = Vec::new();
    // extend chains upward through strict cofaces
    let ups: Vec<Vec<usize>> = (0..k.len())
        .map(|i| {
            let mut c = k.cofaces(i);
            c.retain(|j| *j != i);
            c.sort_by_key(|j| (k.dim_of(*j), *j));
            c
        })
        .collect();
    let mut stack: Vec<Vec<usize>> = order.iter().rev().map(|i| vec![*i]).collect();
    while let Some(ch) = stack.pop() {
        let last = *ch.last().unwrap();
        for u in ups[last].iter().rev() {
            let mut next = ch.clone();
            next.push(*u);
            stack.push(next);
        }
        out.push(ch);
    }
    out
}

/// Barycentric subdivision of a cell complex, defined as the order complex of its
/// face poset. Cells are named `[σ0,…,σn]` after their chains.
pub fn subdivide_complex(k: &Arc<CellComplex>) -> (Arc<CellComplex>, CarrierMap) {
    let mut order: Vec<usize> = (0..k.len()).collect();
    order.sort_by_key(|i| (k.dim_of(*i), *i));
    let mut rank = vec![0; k.len()];
    for (r, i) in order.iter().enumerate() {
        rank[*i] = r;
    }
    let vertices: Vec<String> = order.iter().map(|i| k.id(*i).to_string()).collect();
    let simplices: Vec<Vec<usize>> = chains(k)
        .into_iter()
        .map(|c| c.iter().map(|i| rank[*i]).collect())
        .collect();
    let sc = SimplicialComplex::new(vertices, simplices).expect("chains are downward closed");
    let bd = Arc::new(named_chain_complex(&sc));
    let carrier = sc
        .simplices()
        .iter()
        .map(|s| order[*s.last().unwrap()])
        .collect();
    let map = CellMap::new(bd.clone(), k.clone(), carrier).expect("carrier is monotone");
    (bd, map)
}

fn chain_name(sc: &SimplicialComplex, s: &[usize]) -> String {
    format!(
        "[{}]",
        s.iter().map(|v| sc.vertices()[*v].as_str()).join(",")
    )
}

fn named_chain_complex(sc: &SimplicialComplex) -> CellComplex {
    let base = sc.to_cell_complex();
    let cells: Vec<(String, usize)> = sc
        .simplices()
        .iter()
        .map(|s| (chain_name(sc, s), s.len() - 1))
        .collect();
    let mut inc = Vec::new();
    for i in 0..base.len() {
        for (f, s) in base.facets(i) {
            inc.push((i, *f, *s));
        }
    }
    CellComplex::assemble(cells, inc, base.vertex_sets().map(|v| v.to_vec()))
        .expect("renamed complex is valid")
}

/// Barycentric subdivision of a simplicial complex: vertices are the simplexes,
/// simplexes are chains, and the carrier map sends a chain to its maximum.
pub fn barycentric_subdivide(
    sc: &SimplicialComplex,
) -> (SimplicialComplex, Arc<CellComplex>, CarrierMap) {
    let k = Arc::new(sc.to_cell_complex());
    let (bd, carrier) = subdivide_complex(&k);
    let vertices: Vec<usize> = bd.cells_of_dim(0);
    let names: Vec<String> = vertices
        .iter()
        .map(|v| bd.id(*v).trim_matches(['[', ']']).to_string())
        .collect();
    let mut pos = vec![usize::MAX; bd.len()];
    for (j, v) in vertices.iter().enumerate() {
        pos[*v] = j;
    }
    let simplices = bd
        .vertex_sets()
        .expect("order complexes are simplicial")
        .iter()
        .map(|vs| vs.iter().map(|v| pos[*v]).collect())
        .collect();
    let out = SimplicialComplex::new(names, simplices).expect("chains are downward closed");
    (out, bd, carrier)
}

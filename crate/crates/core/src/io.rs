//! JSON documents. Every top-level document carries `"format": "shv/1"`; scalars are
//! exact rational strings.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::complex::{CellComplex, CellMap, ConstructibleSet, SimplicialComplex};
use crate::enhanced::TModel;
use crate::error::{Error, Result};
use crate::linalg::{CochainComplex, Field, Matrix};
use crate::sheaf::{GradedMap, Sheaf};

pub const FORMAT: &str = "shv/1";

fn check_format(f: &str) -> Result<()> {
    if f != FORMAT {
        return Err(Error::Format(format!(
            "expected format {FORMAT:?}, found {f:?}"
        )));
    }
    Ok(())
}

/// Parses a JSON document, reporting line and column on schema violations.
pub fn from_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s)
        .map_err(|e| Error::Format(format!("line {} column {}: {e}", e.line(), e.column())))
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let s =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_str(&s).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn to_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("documents serialize")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellJson {
    pub id: String,
    pub dim: usize,
}

/// A codimension-one pair. Without signs the complex is oriented automatically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceJson {
    pub cell: String,
    pub face: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

/// A cell complex, given either by cells and incidences or by simplexes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub format: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<CellJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub incidence: Vec<IncidenceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Vec<String>>>,
}

impl ComplexJson {
    pub fn from_complex(k: &CellComplex) -> ComplexJson {
        let cells = k
            .cells()
            .iter()
            .map(|c| CellJson {
                id: c.id.clone(),
                dim: c.dim,
            })
            .collect();
        let incidence = (0..k.len())
            .flat_map(|t| {
                k.facets(t).iter().map(move |(s, sign)| IncidenceJson {
                    cell: k.id(t).to_string(),
                    face: k.id(*s).to_string(),
                    sign: Some(*sign),
                })
            })
            .collect();
        ComplexJson {
            format: FORMAT.into(),
            cells,
            incidence,
            simplices: None,
        }
    }

    pub fn to_complex(&self) -> Result<Arc<CellComplex>> {
        check_format(&self.format)?;
        if let Some(simplices) = &self.simplices {
            if !self.cells.is_empty() {
                return Err(Error::Format(
                    "give either simplices or cells, not both".into(),
                ));
            }
            let mut names: Vec<String> = simplices.iter().flatten().cloned().collect();
            names.sort();
            names.dedup();
            let idx: BTreeMap<&str, usize> = names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.as_str(), i))
                .collect();
            let facets: Vec<Vec<usize>> = simplices
                .iter()
                .map(|s| s.iter().map(|v| idx[v.as_str()]).collect())
                .collect();
            let sc = SimplicialComplex::from_facets(names.clone(), &facets)?;
            return Ok(Arc::new(sc.to_cell_complex()));
        }
        let cells: Vec<(String, usize)> =
            self.cells.iter().map(|c| (c.id.clone(), c.dim)).collect();
        let signed = self.incidence.iter().filter(|i| i.sign.is_some()).count();
        if signed == 0 {
            let faces: Vec<(&str, &str)> = self
                .incidence
                .iter()
                .map(|i| (i.cell.as_str(), i.face.as_str()))
                .collect();
            return Ok(Arc::new(CellComplex::orient(cells, &faces)?));
        }
        if signed != self.incidence.len() {
            return Err(Error::Format(
                "either every incidence carries a sign or none does".into(),
            ));
        }
        let inc: Vec<(&str, &str, i8)> = self
            .incidence
            .iter()
            .map(|i| (i.cell.as_str(), i.face.as_str(), i.sign.unwrap_or_default()))
            .collect();
        Ok(Arc::new(CellComplex::new(cells, &inc)?))
    }
}

/// Dense row-major matrix of exact values such as `"-3/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<String>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix) -> MatrixJson {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data: m.to_flat().iter().map(Field::format).collect(),
        }
    }

    pub fn to_matrix(&self, field: Field) -> Result<Matrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Format(format!(
                "matrix {}x{} lists {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        let data = self
            .data
            .iter()
            .map(|v| field.parse_scalar(v))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_dense(field, self.rows, self.cols, &data)
    }
}

/// A bounded complex `C^start → …`; missing differentials are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StalkJson {
    #[serde(default)]
    pub start: i32,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diffs: Vec<MatrixJson>,
}

impl StalkJson {
    fn from_complex(c: &CochainComplex) -> StalkJson {
        let (a, b) = (c.start(), c.end());
        StalkJson {
            start: a,
            dims: (a..b).map(|k| c.dim(k)).collect(),
            diffs: (a..b.saturating_sub(1).max(a))
                .map(|k| MatrixJson::from_matrix(&c.diff(k)))
                .collect(),
        }
    }

    fn to_complex(&self, field: Field) -> Result<CochainComplex> {
        let diffs = if self.diffs.is_empty() {
            (1..self.dims.len())
                .map(|i| Matrix::zeros(field, self.dims[i], self.dims[i - 1]))
                .collect()
        } else {
            self.diffs
                .iter()
                .map(|m| m.to_matrix(field))
                .collect::<Result<Vec<_>>>()?
        };
        CochainComplex::new(field, self.start, self.dims.clone(), diffs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionJson {
    pub face: String,
    pub cell: String,
    /// Degree to matrix.
    pub maps: BTreeMap<i32, MatrixJson>,
}

/// A cellular sheaf on a complex given separately. `constant_on` is a shorthand for
/// `k_Z[shift]`; otherwise stalks and facet restrictions are listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheafJson {
    pub format: String,
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_on: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub shift: i32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stalks: BTreeMap<String, StalkJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub restrictions: Vec<RestrictionJson>,
}

fn default_field() -> String {
    "Q".into()
}

fn is_zero(v: &i32) -> bool {
    *v == 0
}

impl SheafJson {
    pub fn from_sheaf(f: &Sheaf) -> SheafJson {
        let k = f.complex();
        let stalks = (0..k.len())
            .filter(|i| !f.stalk(*i).is_zero())
            .map(|i| (k.id(i).to_string(), StalkJson::from_complex(f.stalk(i))))
            .collect();
        let restrictions = (0..k.len())
            .flat_map(|t| {
                k.facets(t)
                    .iter()
                    .enumerate()
                    .filter_map(move |(j, (s, _))| {
                        let g = f.facet_restriction(t, j);
                        let maps: BTreeMap<i32, MatrixJson> =
                            g.0.iter()
                                .filter(|(_, m)| !m.is_zero())
                                .map(|(d, m)| (*d, MatrixJson::from_matrix(m)))
                                .collect();
                        (!maps.is_empty()).then(|| RestrictionJson {
                            face: k.id(*s).to_string(),
                            cell: k.id(t).to_string(),
                            maps,
                        })
                    })
            })
            .collect();
        SheafJson {
            format: FORMAT.into(),
            field: f.field().to_string(),
            constant_on: None,
            shift: 0,
            stalks,
            restrictions,
        }
    }

    pub fn to_sheaf(&self, k: &Arc<CellComplex>, field_override: Option<Field>) -> Result<Sheaf> {
        check_format(&self.format)?;
        let field = match field_override {
            Some(f) => f,
            None => Field::parse(&self.field)?,
        };
        if let Some(ids) = &self.constant_on {
            if !self.stalks.is_empty() || !self.restrictions.is_empty() {
                return Err(Error::Format("constant_on excludes explicit stalks".into()));
            }
            let z = ConstructibleSet::from_ids(k.clone(), ids)?;
            return Sheaf::constant_on(&z, field, self.shift);
        }
        if self.shift != 0 {
            return Err(Error::Format("shift applies to constant_on only".into()));
        }
        let mut stalks = vec![CochainComplex::zero(field); k.len()];
        for (id, s) in &self.stalks {
            stalks[k.index_of(id)?] = s.to_complex(field)?;
        }
        let mut restr = BTreeMap::new();
        for r in &self.restrictions {
            let (s, t) = (k.index_of(&r.face)?, k.index_of(&r.cell)?);
            let maps = r
                .maps
                .iter()
                .map(|(d, m)| Ok((*d, m.to_matrix(field)?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            restr.insert((s, t), GradedMap(maps));
        }
        Sheaf::new(k.clone(), field, stalks, restr)
    }
}

/// A set of cells of a complex given separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetJson {
    pub format: String,
    pub cells: Vec<String>,
}

impl SetJson {
    pub fn from_set(z: &ConstructibleSet) -> SetJson {
        SetJson {
            format: FORMAT.into(),
            cells: z.ids(),
        }
    }

    pub fn to_set(&self, k: &Arc<CellComplex>) -> Result<ConstructibleSet> {
        check_format(&self.format)?;
        ConstructibleSet::from_ids(k.clone(), &self.cells)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkersJson {
    pub interior: Vec<String>,
    pub minus_inf: Vec<String>,
    pub plus_inf: Vec<String>,
    pub t_zero: Vec<String>,
    pub t_nonneg: Vec<String>,
}

/// A t-model: total and base complexes, the projection, the t-strata markers, the
/// representative and optionally the involution `t ↦ -t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TModelJson {
    pub format: String,
    pub name: String,
    pub total: ComplexJson,
    pub base: ComplexJson,
    pub projection: BTreeMap<String, String>,
    pub markers: MarkersJson,
    pub f: SheafJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_flip: Option<BTreeMap<String, String>>,
}

fn map_json(m: &CellMap) -> BTreeMap<String, String> {
    (0..m.source.len())
        .map(|i| {
            (
                m.source.id(i).to_string(),
                m.target.id(m.apply(i)).to_string(),
            )
        })
        .collect()
}

fn map_from_json(
    src: &Arc<CellComplex>,
    tgt: &Arc<CellComplex>,
    m: &BTreeMap<String, String>,
) -> Result<CellMap> {
    let mut v = vec![usize::MAX; src.len()];
    for (a, b) in m {
        v[src.index_of(a)?] = tgt.index_of(b)?;
    }
    if let Some(i) = v.iter().position(|x| *x == usize::MAX) {
        return Err(Error::Format(format!("map misses cell {}", src.id(i))));
    }
    CellMap::new(src.clone(), tgt.clone(), v)
}

impl TModelJson {
    pub fn from_model(m: &TModel) -> TModelJson {
        TModelJson {
            format: FORMAT.into(),
            name: m.name.clone(),
            total: ComplexJson::from_complex(&m.total),
            base: ComplexJson::from_complex(&m.base),
            projection: map_json(&m.projection),
            markers: MarkersJson {
                interior: m.interior.ids(),
                minus_inf: m.minus_inf.ids(),
                plus_inf: m.plus_inf.ids(),
                t_zero: m.t_zero.ids(),
                t_nonneg: m.t_nonneg.ids(),
            },
            f: SheafJson::from_sheaf(&m.f),
            t_flip: m.t_flip.as_ref().map(map_json),
        }
    }

    pub fn to_model(&self, field_override: Option<Field>) -> Result<TModel> {
        check_format(&self.format)?;
        let total = self.total.to_complex()?;
        let base = self.base.to_complex()?;
        let set = |ids: &Vec<String>| ConstructibleSet::from_ids(total.clone(), ids);
        let m = TModel {
            name: self.name.clone(),
            total: total.clone(),
            base: base.clone(),
            projection: map_from_json(&total, &base, &self.projection)?,
            interior: set(&self.markers.interior)?,
            minus_inf: set(&self.markers.minus_inf)?,
            plus_inf: set(&self.markers.plus_inf)?,
            t_zero: set(&self.markers.t_zero)?,
            t_nonneg: set(&self.markers.t_nonneg)?,
            f: self.f.to_sheaf(&total, field_override)?,
            t_flip: match &self.t_flip {
                Some(m) => Some(map_from_json(&total, &total, m)?),
                None => None,
            },
        };
        m.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplicial_input() {
        let s = r#"{"format":"shv/1","simplices":[["a","b"],["b","c"]]}"#;
        let k = from_str::<ComplexJson>(s).unwrap().to_complex().unwrap();
        assert_eq!(k.len(), 5);
    }

    #[test]
    fn wrong_format_is_rejected() {
        let s = r#"{"format":"shv/0","cells":[{"id":"a","dim":0}]}"#;
        assert!(from_str::<ComplexJson>(s).unwrap().to_complex().is_err());
    }

    #[test]
    fn schema_errors_carry_positions() {
        let e = from_str::<ComplexJson>("{\"format\": 3}").unwrap_err();
        assert!(e.to_string().contains("line 1"));
    }
}

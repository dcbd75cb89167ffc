//! JSON interchange for posets, complexes, maps, diagrams and cubes.
//!
//! Matrices are row-major with entries as decimal strings (rationals as
//! `p/q`), so the format is exact and unambiguous. Diagram arrows are keyed
//! `"a<=b"` and carry the map `value(b) -> value(a)` (the contravariant
//! convention); cube arrows are keyed the same way but ascend,
//! `vertex(a) -> vertex(b)`, matching the covariant cube orientation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, ChainMap, Connectivity, HomologySummary};
use crate::error::{Error, Result};
use crate::holim::{CubeDiagram, Diagram};
use crate::matrix::Matrix;
use crate::poset::FinitePoset;
use crate::ring::Ring;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub relations: Vec<(String, String)>,
}

impl PosetJson {
    pub fn from_poset(p: &FinitePoset) -> Self {
        PosetJson {
            elements: p.elements().to_vec(),
            relations: p.relation_pairs(),
        }
    }

    pub fn to_poset(&self) -> Result<FinitePoset> {
        FinitePoset::new(self.elements.clone(), &self.relations)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub coeff: String,
    #[serde(default)]
    pub ranks: BTreeMap<String, usize>,
    #[serde(default)]
    pub diff: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, Vec<String>>,
}

fn parse_degree(s: &str) -> Result<i64> {
    s.parse::<i64>()
        .map_err(|_| Error::Input(format!("bad degree key `{s}`")))
}

fn matrix_to_rows<R: Ring>(m: &Matrix<R>) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].render()).collect())
        .collect()
}

fn rows_to_matrix<R: Ring>(
    rows: &[Vec<String>],
    want_rows: usize,
    want_cols: usize,
) -> Result<Matrix<R>> {
    if rows.len() != want_rows || rows.iter().any(|r| r.len() != want_cols) {
        let got_cols = rows.first().map_or(0, |r| r.len());
        return Err(Error::ShapeMismatch(
            rows.len(),
            got_cols,
            want_rows,
            want_cols,
        ));
    }
    let mut m = Matrix::zero(want_rows, want_cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            m[(i, j)] = R::parse(s)?;
        }
    }
    Ok(m)
}

impl ComplexJson {
    pub fn from_complex<R: Ring>(c: &ChainComplex<R>) -> Self {
        ComplexJson {
            coeff: R::NAME.to_string(),
            ranks: c
                .ranks()
                .iter()
                .map(|(&d, &r)| (d.to_string(), r))
                .collect(),
            diff: c
                .diffs()
                .iter()
                .map(|(&d, m)| (d.to_string(), matrix_to_rows(m)))
                .collect(),
            labels: c
                .all_labels()
                .iter()
                .map(|(&d, l)| (d.to_string(), l.clone()))
                .collect(),
        }
    }

    pub fn to_complex<R: Ring>(&self) -> Result<ChainComplex<R>> {
        if self.coeff != R::NAME {
            return Err(Error::RingMismatch(R::NAME, "other"));
        }
        let mut ranks = BTreeMap::new();
        for (k, &r) in &self.ranks {
            ranks.insert(parse_degree(k)?, r);
        }
        let rank_of = |d: i64| ranks.get(&d).copied().unwrap_or(0);
        let mut diffs = BTreeMap::new();
        for (k, rows) in &self.diff {
            let d = parse_degree(k)?;
            diffs.insert(d, rows_to_matrix(rows, rank_of(d - 1), rank_of(d))?);
        }
        let mut labels = BTreeMap::new();
        for (k, l) in &self.labels {
            labels.insert(parse_degree(k)?, l.clone());
        }
        ChainComplex::new(ranks, diffs, labels)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    #[serde(default)]
    pub mats: BTreeMap<String, Vec<Vec<String>>>,
}

impl MapJson {
    pub fn from_map<R: Ring>(f: &ChainMap<R>) -> Self {
        MapJson {
            mats: f
                .mats()
                .iter()
                .map(|(&d, m)| (d.to_string(), matrix_to_rows(m)))
                .collect(),
        }
    }

    pub fn to_map<R: Ring>(
        &self,
        source: &ChainComplex<R>,
        target: &ChainComplex<R>,
    ) -> Result<ChainMap<R>> {
        let mut mats = BTreeMap::new();
        for (k, rows) in &self.mats {
            let d = parse_degree(k)?;
            mats.insert(d, rows_to_matrix(rows, target.rank(d), source.rank(d))?);
        }
        ChainMap::new(source.clone(), target.clone(), mats)
    }
}

/// Splits an arrow key `"a<=b"` into element ids, given the valid id set.
fn split_arrow_key<'k>(key: &'k str, is_id: &dyn Fn(&str) -> bool) -> Result<(&'k str, &'k str)> {
    let mut found = None;
    let mut start = 0;
    while let Some(pos) = key[start..].find("<=") {
        let at = start + pos;
        let (a, b) = (&key[..at], &key[at + 2..]);
        if is_id(a) && is_id(b) {
            if found.is_some() {
                return Err(Error::Input(format!("ambiguous arrow key `{key}`")));
            }
            found = Some((a, b));
        }
        start = at + 1;
    }
    found.ok_or_else(|| Error::Input(format!("cannot split arrow key `{key}`")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramJson {
    pub poset: PosetJson,
    pub values: BTreeMap<String, ComplexJson>,
    #[serde(default)]
    pub arrows: BTreeMap<String, MapJson>,
}

impl DiagramJson {
    pub fn from_diagram<R: Ring>(d: &Diagram<R>) -> Self {
        let shape = d.shape();
        let values = (0..shape.len())
            .map(|i| {
                (
                    shape.id(i).to_string(),
                    ComplexJson::from_complex(d.value(i)),
                )
            })
            .collect();
        let arrows = d
            .arrows()
            .iter()
            .map(|(&(lo, hi), f)| {
                (
                    format!("{}<={}", shape.id(lo), shape.id(hi)),
                    MapJson::from_map(f),
                )
            })
            .collect();
        DiagramJson {
            poset: PosetJson::from_poset(shape),
            values,
            arrows,
        }
    }

    /// The coefficient tag, read off the first value.
    pub fn coeff(&self) -> Option<&str> {
        self.values.values().next().map(|c| c.coeff.as_str())
    }

    pub fn to_diagram<R: Ring>(&self) -> Result<Diagram<R>> {
        let shape = self.poset.to_poset()?;
        let mut values = Vec::with_capacity(shape.len());
        for i in 0..shape.len() {
            let id = shape.id(i);
            let cj = self
                .values
                .get(id)
                .ok_or_else(|| Error::Input(format!("missing value for `{id}`")))?;
            values.push(cj.to_complex::<R>()?);
        }
        let mut arrows = BTreeMap::new();
        for (key, mj) in &self.arrows {
            let (a, b) = split_arrow_key(key, &|s: &str| shape.index_of(s).is_ok())?;
            let lo = shape.index_of(a)?;
            let hi = shape.index_of(b)?;
            arrows.insert((lo, hi), mj.to_map(&values[hi], &values[lo])?);
        }
        Diagram::new(shape, values, arrows)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CubeJson {
    pub labels: Vec<String>,
    pub vertices: BTreeMap<String, ComplexJson>,
    #[serde(default)]
    pub arrows: BTreeMap<String, MapJson>,
}

impl CubeJson {
    pub fn from_cube<R: Ring>(cube: &CubeDiagram<R>) -> Self {
        let full = cube.full_mask();
        let vertices = (0..=full)
            .map(|mk| {
                (
                    cube.vertex_id(mk),
                    ComplexJson::from_complex(cube.vertex(mk)),
                )
            })
            .collect();
        let mut arrows = BTreeMap::new();
        for s in 0..=full {
            for u in 0..=full {
                if s != u && s & !u == 0 {
                    arrows.insert(
                        format!("{}<={}", cube.vertex_id(s), cube.vertex_id(u)),
                        MapJson::from_map(&cube.arrow(s, u)),
                    );
                }
            }
        }
        CubeJson {
            labels: cube.labels().to_vec(),
            vertices,
            arrows,
        }
    }

    pub fn coeff(&self) -> Option<&str> {
        self.vertices.values().next().map(|c| c.coeff.as_str())
    }

    pub fn to_cube<R: Ring>(&self) -> Result<CubeDiagram<R>> {
        let dim = self.labels.len();
        if dim > crate::holim::MAX_CUBE_DIM {
            return Err(Error::CubeTooLarge(dim, crate::holim::MAX_CUBE_DIM));
        }
        let count = 1usize << dim;
        let id_of = |mask: u32| crate::poset::subset_id(&self.labels, mask as u64);
        let mut vertices = Vec::with_capacity(count);
        for mask in 0..count as u32 {
            let id = id_of(mask);
            let cj = self
                .vertices
                .get(&id)
                .ok_or_else(|| Error::Input(format!("missing vertex `{id}`")))?;
            vertices.push(cj.to_complex::<R>()?);
        }
        let mask_of = |id: &str| -> Option<u32> { (0..count as u32).find(|&mk| id_of(mk) == id) };
        let mut arrows = BTreeMap::new();
        for (key, mj) in &self.arrows {
            let (a, b) = split_arrow_key(key, &|s: &str| mask_of(s).is_some())?;
            let s = mask_of(a).expect("validated");
            let u = mask_of(b).expect("validated");
            // ascending: vertex(s) -> vertex(u)
            arrows.insert(
                (s, u),
                mj.to_map(&vertices[s as usize], &vertices[u as usize])?,
            );
        }
        CubeDiagram::new(self.labels.clone(), vertices, arrows)
    }
}

/// Homology rendered per degree: free rank plus torsion coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomologyJson(pub BTreeMap<String, HomologyGroupJson>);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomologyGroupJson {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<String>,
}

impl HomologyJson {
    pub fn from_summary(h: &HomologySummary) -> Self {
        HomologyJson(
            h.iter()
                .map(|(&d, g)| {
                    (
                        d.to_string(),
                        HomologyGroupJson {
                            rank: g.rank,
                            torsion: g.torsion.iter().map(|t| t.to_string()).collect(),
                        },
                    )
                })
                .collect(),
        )
    }
}

/// Connectivity rendered as a number, or the string `"inf"`.
pub fn connectivity_json(c: &Connectivity) -> serde_json::Value {
    match c {
        Connectivity::Finite(k) => serde_json::json!(k),
        Connectivity::Infinite => serde_json::json!("inf"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{punctured_cube, MultiIndex};
    use crate::random::{random_diagram, rng, GenConfig};
    use crate::ring::{Int, Rat};

    #[test]
    fn poset_roundtrip_sorted() {
        let p = punctured_cube(&["1", "2"]).unwrap();
        let j = PosetJson::from_poset(&p);
        let mut sorted = j.relations.clone();
        sorted.sort();
        assert_eq!(j.relations, sorted, "relations are emitted sorted");
        assert_eq!(j.to_poset().unwrap(), p);
    }

    #[test]
    fn complex_roundtrip_with_torsion() {
        let mut ranks = BTreeMap::new();
        ranks.insert(0, 1);
        ranks.insert(1, 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(1, Matrix::<Int>::from_i64(1, 1, &[2]));
        let c = ChainComplex::new(ranks, diffs, BTreeMap::new()).unwrap();
        let j = ComplexJson::from_complex(&c);
        assert_eq!(j.coeff, "Z");
        let back = j.to_complex::<Int>().unwrap();
        assert_eq!(c, back);
        assert!(j.to_complex::<Rat>().is_err(), "ring tags must match");
    }

    #[test]
    fn diagram_roundtrip() {
        let mut r = rng(17);
        let shape = punctured_cube(&["1", "2"]).unwrap();
        let d: Diagram<Rat> = random_diagram(&shape, &GenConfig::default(), &mut r);
        let j = DiagramJson::from_diagram(&d);
        let text = serde_json::to_string(&j).unwrap();
        let parsed: DiagramJson = serde_json::from_str(&text).unwrap();
        let back = parsed.to_diagram::<Rat>().unwrap();
        assert_eq!(back.shape(), d.shape());
        for i in 0..shape.len() {
            assert_eq!(back.value(i).ranks(), d.value(i).ranks());
        }
        for (&(lo, hi), f) in d.arrows() {
            assert!(back.arrow(lo, hi).same_matrices(f));
        }
    }

    #[test]
    fn cube_roundtrip() {
        let j = MultiIndex::new(vec![1, 1]).unwrap();
        let cube = crate::linkmodel::derivative_cube(&j, 3).unwrap();
        let cj = CubeJson::from_cube(&cube);
        let text = serde_json::to_string_pretty(&cj).unwrap();
        let parsed: CubeJson = serde_json::from_str(&text).unwrap();
        let back = parsed.to_cube::<Rat>().unwrap();
        assert_eq!(back.labels(), cube.labels());
        for s in 0..=cube.full_mask() {
            assert_eq!(back.vertex(s).ranks(), cube.vertex(s).ranks());
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let text = r#"{"poset": {"elements": ["a"], "relations": []},
                       "values": {}, "arrows": {}}"#;
        let parsed: DiagramJson = serde_json::from_str(text).unwrap();
        assert!(parsed.to_diagram::<Rat>().is_err(), "missing value");

        let bad_entry = r#"{"coeff": "Q", "ranks": {"0": 1},
                            "diff": {}, "labels": {}}"#;
        let parsed: ComplexJson = serde_json::from_str(bad_entry).unwrap();
        assert!(parsed.to_complex::<Rat>().is_ok());
        let bad_entry = r#"{"coeff": "Q", "ranks": {"zero": 1}}"#;
        let parsed: ComplexJson = serde_json::from_str(bad_entry).unwrap();
        assert!(parsed.to_complex::<Rat>().is_err(), "bad degree key");
    }
}

//! JSON interchange for complexes and cocycles.
//!
//! ```json
//! { "dim": 2, "cells": [1, 2, 1],
//!   "incidence": [{ "cell": [1, 0], "faces": [[0, 1], [0, -1]] }, …],
//!   "flags": { "is_closed_manifold": true, "is_orientable": true },
//!   "cycles": [[[0, 1]], [[1, 1]]] }
//! ```
//!
//! A face entry is `[j, sign]` or `[j, sign, path]` with `path` a list of
//! `[edge, ±1]` steps. Cocycles are `{ "edge_values": [...] }` where each
//! value is an integer or a rational string such as `"1/10"`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CellComplex, Cocycle, ComplexFlags, FaceIncidence, HomologyError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub cells: Vec<usize>,
    #[serde(default)]
    pub incidence: Vec<IncidenceJson>,
    #[serde(default)]
    pub flags: FlagsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<Vec<Vec<(usize, i64)>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncidenceJson {
    pub cell: (usize, usize),
    pub faces: Vec<FaceJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FaceJson {
    WithPath(usize, i64, Vec<(usize, i64)>),
    Plain(usize, i64),
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct FlagsJson {
    #[serde(default)]
    pub is_closed_manifold: bool,
    #[serde(default)]
    pub is_orientable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleJson {
    pub edge_values: Vec<Value>,
}

impl ComplexJson {
    pub fn into_complex(self) -> Result<CellComplex, HomologyError> {
        let counts = self.cells;
        if let Some(dim) = self.dim {
            if dim + 1 != counts.len() {
                return Err(HomologyError::InvalidComplex(format!(
                    "dim {dim} but {} cell counts",
                    counts.len()
                )));
            }
        }
        let mut incidence: Vec<Vec<Option<Vec<FaceIncidence>>>> =
            counts.iter().map(|&c| vec![None; c]).collect();
        for entry in self.incidence {
            let (k, i) = entry.cell;
            if k == 0 || k >= counts.len() || i >= counts[k] {
                return Err(HomologyError::InvalidComplex(format!(
                    "incidence for nonexistent cell [{k}, {i}]"
                )));
            }
            if incidence[k][i].is_some() {
                return Err(HomologyError::InvalidComplex(format!(
                    "duplicate incidence for cell [{k}, {i}]"
                )));
            }
            let faces = entry
                .faces
                .into_iter()
                .map(|f| match f {
                    FaceJson::Plain(j, c) => FaceIncidence::new(j, c),
                    FaceJson::WithPath(j, c, p) => FaceIncidence::with_path(j, c, p),
                })
                .collect();
            incidence[k][i] = Some(faces);
        }
        let incidence = incidence
            .into_iter()
            .map(|cells| cells.into_iter().map(Option::unwrap_or_default).collect())
            .collect();
        let flags = ComplexFlags {
            is_closed_manifold: self.flags.is_closed_manifold,
            is_orientable: self.flags.is_orientable,
        };
        let cx = CellComplex::new(counts, incidence, flags)?;
        match self.cycles {
            Some(cycles) => cx.with_cycles(cycles),
            None => Ok(cx),
        }
    }

    pub fn from_complex(cx: &CellComplex) -> Self {
        let mut incidence = Vec::new();
        for k in 1..=cx.dim() {
            for i in 0..cx.count(k) {
                let faces = cx
                    .faces(k, i)
                    .iter()
                    .map(|f| match &f.path {
                        Some(p) => FaceJson::WithPath(f.face, f.coeff, p.clone()),
                        None => FaceJson::Plain(f.face, f.coeff),
                    })
                    .collect();
                incidence.push(IncidenceJson { cell: (k, i), faces });
            }
        }
        let flags = cx.flags();
        ComplexJson {
            dim: Some(cx.dim()),
            cells: cx.counts().to_vec(),
            incidence,
            flags: FlagsJson {
                is_closed_manifold: flags.is_closed_manifold,
                is_orientable: flags.is_orientable,
            },
            cycles: cx.cycles().map(<[_]>::to_vec),
        }
    }
}

impl CocycleJson {
    pub fn into_cocycle(self) -> Result<Cocycle, HomologyError> {
        let values = self
            .edge_values
            .iter()
            .map(parse_value)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Cocycle::rational(values))
    }

    pub fn from_integral(values: &[i64]) -> Self {
        CocycleJson {
            edge_values: values.iter().map(|&v| Value::from(v)).collect(),
        }
    }
}

fn parse_value(v: &Value) -> Result<BigRational, HomologyError> {
    let bad = || HomologyError::InvalidComplex(format!("cocycle value {v} is not an integer or p/q string"));
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from_integer(BigInt::from(i)))
            .ok_or_else(bad),
        Value::String(s) => BigRational::from_str(s.trim()).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

pub fn parse_complex(text: &str) -> Result<CellComplex, HomologyError> {
    let json: ComplexJson = serde_json::from_str(text)
        .map_err(|e| HomologyError::InvalidComplex(format!("complex JSON: {e}")))?;
    json.into_complex()
}

/// Reads `{"edge_values": [...]}` or a bare list of edge values.
pub fn parse_cocycle(text: &str) -> Result<Cocycle, HomologyError> {
    let bad = |e: serde_json::Error| HomologyError::InvalidComplex(format!("cocycle JSON: {e}"));
    let json = match serde_json::from_str::<Value>(text).map_err(bad)? {
        Value::Array(edge_values) => CocycleJson { edge_values },
        other => serde_json::from_value(other).map_err(bad)?,
    };
    json.into_cocycle()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_standard_complexes() {
        for cx in [
            CellComplex::circle(),
            CellComplex::torus(),
            CellComplex::torus_n(3),
            CellComplex::klein_bottle(),
        ] {
            let text = serde_json::to_string(&ComplexJson::from_complex(&cx)).unwrap();
            assert_eq!(parse_complex(&text).unwrap(), cx);
        }
    }

    #[test]
    fn torus_from_text() {
        let text = r#"{"dim": 2, "cells": [1, 2, 1],
            "incidence": [
              {"cell": [1, 0], "faces": [[0, 1], [0, -1]]},
              {"cell": [1, 1], "faces": [[0, 1], [0, -1]]},
              {"cell": [2, 0], "faces": [[0, 1], [1, 1], [0, -1], [1, -1]]}],
            "flags": {"is_closed_manifold": true, "is_orientable": true}}"#;
        let cx = parse_complex(text).unwrap();
        assert_eq!(cx.counts(), &[1, 2, 1]);
        assert!(cx.flags().is_orientable);
    }

    #[test]
    fn rational_cocycle_values() {
        let c = parse_cocycle(r#"{"edge_values": [1, "1/10", "-3/4"]}"#).unwrap();
        assert_eq!(c.values()[1], BigRational::new(1.into(), 10.into()));
        assert!(parse_cocycle(r#"{"edge_values": [0.5]}"#).is_err());
        assert_eq!(parse_cocycle(r#"[1, "1/10", "-3/4"]"#).unwrap(), c);
    }

    #[test]
    fn rejects_bad_incidence() {
        let text = r#"{"cells": [1, 1], "incidence": [{"cell": [1, 3], "faces": []}]}"#;
        assert!(parse_complex(text).is_err());
    }
}

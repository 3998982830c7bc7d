//! JSON schema for bodies.
//!
//! ```json
//! {"schema_version": 1, "metadata": {"name": "square"},
//!  "body": {"type": "polytope", "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]}}
//! ```
//!
//! Node types: `polytope`, `ball`, `ellipsoid`, `sum`, `scaled`, `rotated`,
//! plus `sampled` (grid description and values) and `mollified` (the lazy
//! mollified body with its smoothing scale and quadrature resolution; the
//! bump is always the standard one). A bare node is accepted as a document.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::body::{BodyRep, SupportSamples};
use crate::geometry::rotation::Rotation;
use crate::quadrature::GridSpec;
use crate::regularization::{mollified, RegularizationParams};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct BodyDocument {
    pub schema_version: u64,
    pub body: BodyRep,
    pub metadata: BTreeMap<String, String>,
}

impl BodyDocument {
    pub fn new(body: BodyRep) -> Self {
        BodyDocument {
            schema_version: SCHEMA_VERSION,
            body,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }
}

fn parse_err(pointer: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        pointer: if pointer.is_empty() { "/".into() } else { pointer.into() },
        message: message.into(),
    }
}

fn invalid(pointer: &str, e: Error) -> Error {
    let message = match e {
        Error::InvalidBody(m) | Error::InvalidArgument(m) | Error::Representation(m) => m,
        other => other.to_string(),
    };
    Error::Validation {
        node: if pointer.is_empty() { "/".into() } else { pointer.into() },
        message,
    }
}

pub fn parse_body(text: &str) -> Result<BodyDocument> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_err("", format!("malformed JSON: {e}")))?;
    document_from_value(&value)
}

pub fn document_from_value(value: &Value) -> Result<BodyDocument> {
    let obj = value.as_object().ok_or_else(|| parse_err("", "expected an object"))?;
    if obj.contains_key("type") {
        return Ok(BodyDocument::new(node_from_value(value, "")?));
    }
    let schema_version = match obj.get("schema_version") {
        None => SCHEMA_VERSION,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| parse_err("/schema_version", "expected a nonnegative integer"))?,
    };
    if schema_version != SCHEMA_VERSION {
        return Err(parse_err(
            "/schema_version",
            format!("unsupported schema version {schema_version}"),
        ));
    }
    let body = node_from_value(
        obj.get("body").ok_or_else(|| parse_err("/body", "missing field"))?,
        "/body",
    )?;
    let mut metadata = BTreeMap::new();
    if let Some(m) = obj.get("metadata") {
        let m = m.as_object().ok_or_else(|| parse_err("/metadata", "expected an object"))?;
        for (k, v) in m {
            let s = v
                .as_str()
                .ok_or_else(|| parse_err(&format!("/metadata/{}", escape(k)), "expected a string"))?;
            metadata.insert(k.clone(), s.to_string());
        }
    }
    Ok(BodyDocument {
        schema_version,
        body,
        metadata,
    })
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ptr: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| parse_err(&format!("{ptr}/{key}"), "missing field"))
}

fn real(v: &Value, ptr: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(ptr, "expected a number"))
}

fn uint(v: &Value, ptr: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(ptr, "expected a nonnegative integer"))
}

fn vector(v: &Value, ptr: &str) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| parse_err(ptr, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| real(x, &format!("{ptr}/{i}")))
        .collect()
}

fn rows(v: &Value, ptr: &str) -> Result<Vec<Vec<f64>>> {
    let arr = v.as_array().ok_or_else(|| parse_err(ptr, "expected an array of arrays"))?;
    arr.iter()
        .enumerate()
        .map(|(i, r)| vector(r, &format!("{ptr}/{i}")))
        .collect()
}

fn square_matrix(v: &Value, ptr: &str) -> Result<DMatrix<f64>> {
    let r = rows(v, ptr)?;
    let n = r.len();
    if n == 0 || r.iter().any(|row| row.len() != n) {
        return Err(parse_err(ptr, "expected a nonempty square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| r[i][j]))
}

pub fn node_from_value(value: &Value, ptr: &str) -> Result<BodyRep> {
    let obj = value.as_object().ok_or_else(|| parse_err(ptr, "expected a body object"))?;
    let kind = field(obj, "type", ptr)?
        .as_str()
        .ok_or_else(|| parse_err(&format!("{ptr}/type"), "expected a string"))?;
    let sub = |key: &str| format!("{ptr}/{key}");
    let child = |key: &str| -> Result<BodyRep> { node_from_value(field(obj, key, ptr)?, &sub(key)) };
    let same_dim = |a: &BodyRep, b: &BodyRep| -> Result<()> {
        if a.dim() != b.dim() {
            return Err(invalid(
                ptr,
                Error::InvalidBody(format!("summands have dimensions {} and {}", a.dim(), b.dim())),
            ));
        }
        Ok(())
    };
    match kind {
        "polytope" => {
            let vertices = rows(field(obj, "vertices", ptr)?, &sub("vertices"))?;
            BodyRep::polytope(vertices).map_err(|e| invalid(ptr, e))
        }
        "ball" => {
            let center = vector(field(obj, "center", ptr)?, &sub("center"))?;
            let radius = real(field(obj, "radius", ptr)?, &sub("radius"))?;
            BodyRep::ball(center, radius).map_err(|e| invalid(ptr, e))
        }
        "ellipsoid" => {
            let center = vector(field(obj, "center", ptr)?, &sub("center"))?;
            let matrix = square_matrix(field(obj, "matrix", ptr)?, &sub("matrix"))?;
            BodyRep::ellipsoid(center, matrix).map_err(|e| invalid(ptr, e))
        }
        "sum" => {
            let (l, r) = (child("left")?, child("right")?);
            same_dim(&l, &r)?;
            BodyRep::sum(l, r).map_err(|e| invalid(ptr, e))
        }
        "scaled" => {
            let factor = real(field(obj, "factor", ptr)?, &sub("factor"))?;
            BodyRep::scaled(factor, child("inner")?).map_err(|e| invalid(ptr, e))
        }
        "rotated" => {
            let m = square_matrix(field(obj, "matrix", ptr)?, &sub("matrix"))?;
            let g = Rotation::new(m).map_err(|e| invalid(ptr, e))?;
            BodyRep::rotated(g, child("inner")?).map_err(|e| invalid(ptr, e))
        }
        "sampled" => {
            let spec = grid_from_value(field(obj, "grid", ptr)?, &sub("grid"))?;
            let grid = Arc::new(spec.build().map_err(|e| invalid(&sub("grid"), e))?);
            let values = vector(field(obj, "values", ptr)?, &sub("values"))?;
            Ok(BodyRep::Sampled(
                SupportSamples::new(grid, values).map_err(|e| invalid(ptr, e))?,
            ))
        }
        "mollified" => {
            let t = real(field(obj, "t", ptr)?, &sub("t"))?;
            let radial = uint(field(obj, "radial_nodes", ptr)?, &sub("radial_nodes"))?;
            let angular = uint(field(obj, "angular_nodes", ptr)?, &sub("angular_nodes"))?;
            let params = RegularizationParams::with_resolution(t, radial, angular).map_err(|e| invalid(ptr, e))?;
            if t == 0.0 {
                return Err(invalid(ptr, Error::InvalidArgument("a mollified node needs t > 0".into())));
            }
            mollified(&child("inner")?, &params).map_err(|e| invalid(ptr, e))
        }
        other => Err(parse_err(&sub("type"), format!("unknown body type {other:?}"))),
    }
}

fn grid_from_value(v: &Value, ptr: &str) -> Result<GridSpec> {
    let obj = v.as_object().ok_or_else(|| parse_err(ptr, "expected a grid object"))?;
    let kind = field(obj, "kind", ptr)?
        .as_str()
        .ok_or_else(|| parse_err(&format!("{ptr}/kind"), "expected a string"))?;
    let get = |k: &str| -> Result<usize> { uint(field(obj, k, ptr)?, &format!("{ptr}/{k}")) };
    match kind {
        "circle" => Ok(GridSpec::Circle { m: get("m")? }),
        "latlon" => Ok(GridSpec::LatLon {
            n_lat: get("n_lat")?,
            n_lon: get("n_lon")?,
        }),
        "monte_carlo" => Ok(GridSpec::MonteCarlo {
            dim: get("dim")?,
            count: get("count")?,
            seed: field(obj, "seed", ptr)?
                .as_u64()
                .ok_or_else(|| parse_err(&format!("{ptr}/seed"), "expected a nonnegative integer"))?,
        }),
        other => Err(parse_err(&format!("{ptr}/kind"), format!("unknown grid kind {other:?}"))),
    }
}

fn grid_to_value(spec: &GridSpec) -> Value {
    match *spec {
        GridSpec::Circle { m } => json!({"kind": "circle", "m": m}),
        GridSpec::LatLon { n_lat, n_lon } => json!({"kind": "latlon", "n_lat": n_lat, "n_lon": n_lon}),
        GridSpec::MonteCarlo { dim, count, seed } => {
            json!({"kind": "monte_carlo", "dim": dim, "count": count, "seed": seed})
        }
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn node_to_value(body: &BodyRep) -> Value {
    match body {
        BodyRep::Polytope { vertices } => json!({"type": "polytope", "vertices": vertices}),
        BodyRep::Ball { center, radius } => json!({"type": "ball", "center": center, "radius": radius}),
        BodyRep::Ellipsoid { center, matrix } => {
            json!({"type": "ellipsoid", "center": center, "matrix": matrix_rows(matrix)})
        }
        BodyRep::Sum { left, right } => {
            json!({"type": "sum", "left": node_to_value(left), "right": node_to_value(right)})
        }
        BodyRep::Scaled { factor, inner } => {
            json!({"type": "scaled", "factor": factor, "inner": node_to_value(inner)})
        }
        BodyRep::Rotated { rotation, inner } => {
            json!({"type": "rotated", "matrix": rotation.rows(), "inner": node_to_value(inner)})
        }
        BodyRep::Sampled(s) => json!({
            "type": "sampled",
            "grid": grid_to_value(s.grid.spec()),
            "values": s.values,
        }),
        BodyRep::Mollified { inner, kernel } => json!({
            "type": "mollified",
            "t": kernel.t(),
            "radial_nodes": kernel.radial_nodes(),
            "angular_nodes": kernel.angular_nodes(),
            "inner": node_to_value(inner),
        }),
    }
}

pub fn document_to_value(doc: &BodyDocument) -> Value {
    json!({
        "schema_version": doc.schema_version,
        "metadata": doc.metadata,
        "body": node_to_value(&doc.body),
    })
}

/// Pretty-printed JSON. Numbers are written in shortest round-trip form, so
/// `parse_body(serialize_body(d)) == d` for every finite document.
pub fn serialize_body(doc: &BodyDocument) -> String {
    let mut s = serde_json::to_string_pretty(&document_to_value(doc)).expect("values are serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_document() {
        let doc = parse_body(r#"{"type":"ball","center":[0,0],"radius":1}"#).unwrap();
        assert_eq!(doc.body, BodyRep::centered_ball(2, 1.0).unwrap());
    }

    #[test]
    fn nonorthogonal_rotation_is_a_validation_error() {
        let text = r#"{"schema_version":1,"body":{"type":"rotated","matrix":[[1.000001,0],[0,1]],
            "inner":{"type":"ball","center":[0,0],"radius":1}}}"#;
        match parse_body(text) {
            Err(Error::Validation { node, .. }) => assert_eq!(node, "/body"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let text = r#"{"body":{"type":"sum","left":{"type":"ball","center":[0,0],"radius":1},
            "right":{"type":"polytope","vertices":[[0,0],[1,"x"]]}}}"#;
        match parse_body(text) {
            Err(Error::Parse { pointer, .. }) => assert_eq!(pointer, "/body/right/vertices/1/1"),
            other => panic!("{other:?}"),
        }
        match parse_body(r#"{"body":{"type":"ball","center":[0,0],"radius":-1}}"#) {
            Err(Error::Validation { node, .. }) => assert_eq!(node, "/body"),
            other => panic!("{other:?}"),
        }
        match parse_body(r#"{"body":{"type":"cone"}}"#) {
            Err(Error::Parse { pointer, .. }) => assert_eq!(pointer, "/body/type"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_tree_round_trips_bit_exactly() {
        let p = BodyRep::polytope(vec![vec![0.1, 0.2], vec![1.0 / 3.0, -2.0f64.sqrt()], vec![-0.7, 1e-300]]).unwrap();
        let body = BodyRep::sum(
            BodyRep::scaled(0.3, p.clone()).unwrap(),
            BodyRep::scaled(std::f64::consts::PI, p).unwrap(),
        )
        .unwrap();
        assert_eq!(body.depth(), 3);
        let doc = BodyDocument::new(body).with_metadata("name", "tree");
        let back = parse_body(&serialize_body(&doc)).unwrap();
        assert_eq!(back, doc);
        let turned = BodyDocument::new(BodyRep::rotated(Rotation::from_angle(0.123), back.body).unwrap());
        assert_eq!(parse_body(&serialize_body(&turned)).unwrap(), turned);
    }

    #[test]
    fn extension_nodes_round_trip() {
        let grid = Arc::new(crate::quadrature::make_grid_2d(16).unwrap());
        let sq = BodyRep::cuboid(&[1.0, 0.5]).unwrap();
        let sampled = BodyRep::Sampled(crate::geometry::body::sample_support(&sq, &grid).unwrap());
        let lazy = mollified(&sq, &RegularizationParams::new(0.1).unwrap()).unwrap();
        for body in [sampled, lazy] {
            let doc = BodyDocument::new(body);
            assert_eq!(parse_body(&serialize_body(&doc)).unwrap(), doc);
        }
    }
}

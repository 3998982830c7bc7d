//! Seeded random polytope corpora.
//!
//! A generator spec is a `;`-separated list of entries
//! `n=<dim>,vertices=<count>,bodies=<count>`, e.g.
//! `n=2,vertices=12,bodies=20;n=3,vertices=30,bodies=10`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::body::BodyRep;
use crate::geometry::hull::PolytopeGeometry;
use crate::io::json::{document_from_value, document_to_value, BodyDocument};

/// Hull of `vertex_count` i.i.d. uniform points in [−1, 1]ⁿ, resampled until
/// it is full-dimensional.
pub fn random_polytope(seed: u64, n: usize, vertex_count: usize) -> Result<BodyRep> {
    if vertex_count < n + 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} points for a full-dimensional polytope in dimension {n}",
            n + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let points: Vec<Vec<f64>> = (0..vertex_count)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect();
        if (2..=3).contains(&n) {
            let geo = PolytopeGeometry::new(&points)?;
            if geo.is_full_dimensional() {
                return BodyRep::polytope(geo.vertices.iter().map(|v| v.to_vec()).collect());
            }
        } else {
            let (rank, _) = crate::linalg::affine_frame(&points, 1e-10);
            if rank == n {
                return BodyRep::polytope(points);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusEntry {
    pub dim: usize,
    pub vertices: usize,
    pub bodies: usize,
}

pub fn parse_generator_spec(spec: &str) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (mut dim, mut vertices, mut bodies) = (None, None, None);
        for kv in part.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("bad generator entry {kv:?}")))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad number in {kv:?}")))?;
            match k.trim() {
                "n" => dim = Some(v),
                "vertices" => vertices = Some(v),
                "bodies" => bodies = Some(v),
                other => return Err(Error::InvalidArgument(format!("unknown generator key {other:?}"))),
            }
        }
        match (dim, vertices, bodies) {
            (Some(dim), Some(vertices), Some(bodies)) => out.push(CorpusEntry { dim, vertices, bodies }),
            _ => return Err(Error::InvalidArgument(format!("incomplete generator entry {part:?}"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub seed: u64,
    pub generator_spec: String,
    pub bodies: Vec<BodyDocument>,
}

fn body_seed(seed: u64, entry: usize, index: usize) -> u64 {
    // splitmix-style mixing keeps per-body streams independent
    let mut z = seed ^ ((entry as u64) << 32) ^ index as u64;
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Corpus {
    pub fn generate(seed: u64, generator_spec: &str) -> Result<Self> {
        let entries = parse_generator_spec(generator_spec)?;
        let mut bodies = Vec::new();
        for (e, entry) in entries.iter().enumerate() {
            for i in 0..entry.bodies {
                let s = body_seed(seed, e, i);
                let body = random_polytope(s, entry.dim, entry.vertices)?;
                bodies.push(
                    BodyDocument::new(body)
                        .with_metadata("generator", format!("n={},vertices={}", entry.dim, entry.vertices))
                        .with_metadata("seed", s.to_string()),
                );
            }
        }
        Ok(Corpus {
            seed,
            generator_spec: generator_spec.to_string(),
            bodies,
        })
    }

    pub fn to_json(&self) -> String {
        let v = json!({
            "seed": self.seed,
            "generator_spec": self.generator_spec,
            "bodies": self.bodies.iter().map(document_to_value).collect::<Vec<_>>(),
        });
        let mut s = serde_json::to_string_pretty(&v).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            pointer: "/".into(),
            message: format!("malformed JSON: {e}"),
        })?;
        let perr = |p: &str, m: &str| Error::Parse {
            pointer: p.into(),
            message: m.into(),
        };
        let seed = v["seed"].as_u64().ok_or_else(|| perr("/seed", "expected an integer"))?;
        let generator_spec = v["generator_spec"]
            .as_str()
            .ok_or_else(|| perr("/generator_spec", "expected a string"))?
            .to_string();
        let arr = v["bodies"].as_array().ok_or_else(|| perr("/bodies", "expected an array"))?;
        let bodies = arr
            .iter()
            .enumerate()
            .map(|(i, b)| {
                document_from_value(b).map_err(|e| match e {
                    Error::Parse { pointer, message } => Error::Parse {
                        pointer: format!("/bodies/{i}{}", pointer.trim_end_matches('/')),
                        message,
                    },
                    other => other,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Corpus {
            seed,
            generator_spec,
            bodies,
        })
    }
}

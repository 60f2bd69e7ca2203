//! Relation graphs stored under the SHA-256 digest of their inputs.

use std::path::PathBuf;

use anyhow::Result;
use serde_json::json;
use sha2::{Digest, Sha256};
use spine_core::relations::{compute_pi, compute_rho, DeltaKind, LineRelationGraph};
use spine_core::{SpineParams, SpineSpace};

const FORMAT: u32 = 1;

pub fn digest(params: &SpineParams, kind: DeltaKind) -> String {
    let key = json!({ "format": FORMAT, "params": params, "relation": kind.name() });
    hex::encode(Sha256::digest(key.to_string().as_bytes()))
}

pub struct GraphCache {
    pub dir: Option<PathBuf>,
    pub hits: usize,
}

impl GraphCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        GraphCache { dir, hits: 0 }
    }

    pub fn graph(&mut self, space: &SpineSpace, kind: DeltaKind) -> Result<LineRelationGraph> {
        let compute = || match kind {
            DeltaKind::Pi => compute_pi(space),
            DeltaKind::Rho => compute_rho(space),
        };
        let Some(dir) = &self.dir else {
            return Ok(compute());
        };
        let path = dir.join(format!("{}.json", digest(&space.params, kind)));
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(g) = serde_json::from_str(&text)
                .map_err(anyhow::Error::from)
                .and_then(|v| LineRelationGraph::from_json(&v).map_err(anyhow::Error::from))
            {
                if g.count() == space.lines.len() && g.kind == kind {
                    self.hits += 1;
                    return Ok(g);
                }
            }
        }
        let g = compute();
        std::fs::create_dir_all(dir)?;
        std::fs::write(&path, g.to_json().to_string())?;
        Ok(g)
    }
}

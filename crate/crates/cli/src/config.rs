use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use spine_core::relations::DeltaKind;
use spine_core::SpineParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Delta {
    Pi,
    Rho,
    Both,
}

impl Delta {
    pub fn kinds(self) -> Vec<DeltaKind> {
        match self {
            Delta::Pi => vec![DeltaKind::Pi],
            Delta::Rho => vec![DeltaKind::Rho],
            Delta::Both => vec![DeltaKind::Pi, DeltaKind::Rho],
        }
    }
}

/// Command-line flags; any unset flag falls back to the JSON config file,
/// then to the defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// JSON file with any of the fields below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<u8>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long, value_enum)]
    pub delta: Option<Delta>,
    /// Seed of the line-id permutation.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest line count for which Bron–Kerbosch runs.
    #[arg(long)]
    pub bk_threshold: Option<usize>,
    /// Homology scalar for the counterexample.
    #[arg(long)]
    pub lambda: Option<u8>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Recompute relation graphs instead of reading the cache.
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    q: Option<u8>,
    n: Option<usize>,
    k: Option<usize>,
    m: Option<usize>,
    w: Option<usize>,
    delta: Option<Delta>,
    seed: Option<u64>,
    bk_threshold: Option<usize>,
    lambda: Option<u8>,
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub params: SpineParams,
    pub delta: Delta,
    pub seed: u64,
    pub bk_threshold: usize,
    pub lambda: u8,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub use_cache: bool,
}

impl RunConfig {
    pub fn resolve(a: &ConfigArgs) -> Result<Self> {
        let f: FileConfig = match &a.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => FileConfig::default(),
        };
        let params = SpineParams::new(
            a.q.or(f.q).unwrap_or(2),
            a.n.or(f.n).unwrap_or(6),
            a.k.or(f.k).unwrap_or(2),
            a.m.or(f.m).unwrap_or(1),
            a.w.or(f.w).unwrap_or(3),
        );
        Ok(RunConfig {
            params,
            delta: a.delta.or(f.delta).unwrap_or(Delta::Both),
            seed: a.seed.or(f.seed).unwrap_or(1),
            bk_threshold: a
                .bk_threshold
                .or(f.bk_threshold)
                .unwrap_or(spine_core::cliques::BK_THRESHOLD),
            lambda: a.lambda.or(f.lambda).unwrap_or(2),
            out: a
                .out
                .clone()
                .or(f.out)
                .unwrap_or_else(|| PathBuf::from("spine-out")),
            use_cache: !a.no_cache,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        let p = &self.params;
        self.out.join(format!(
            "q{}-n{}-k{}-m{}-w{}-{name}",
            p.q, p.n, p.k, p.m, p.w
        ))
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.out.join("cache")
    }
}

pub fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

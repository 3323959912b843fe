use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use hijack_core::graph::{generate_synthetic, parse_snapshot, ChannelGraph, NodeId, SyntheticSpec};
use hijack_core::routing::{
    CLightningParams, EclairParams, LndParams, PolicyKind, RoutingPolicy, SuggestedParams,
};
use hijack_core::PairSample;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Where the channel graph comes from.
#[derive(Args, Clone, Debug)]
#[group(required = true, multiple = false)]
pub struct GraphArgs {
    /// `describegraph` JSON snapshot.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Synthetic preferential-attachment graph, e.g. `n=4000,m=4,seed=7`.
    /// The seed defaults to `--seed`.
    #[arg(long)]
    pub synthetic: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyName {
    Lnd,
    Clightning,
    Eclair,
    Suggested,
}

#[derive(Args, Clone, Debug)]
pub struct PolicyArgs {
    #[arg(long, value_enum, default_value_t = PolicyName::Lnd)]
    pub policy: PolicyName,
    /// C-lightning fee fuzz.
    #[arg(long)]
    pub fuzz: Option<f64>,
    /// Eclair's number of candidate routes.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Suggested policy's weight per satoshi-block of capacity times age.
    #[arg(long)]
    pub interest_ratio: Option<f64>,
    /// Suggested policy's Gaussian scale spread.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Disable lnd's success-probability penalty.
    #[arg(long)]
    pub no_probability_penalty: bool,
    #[arg(long)]
    pub max_hops: Option<usize>,
    /// Full policy as JSON; replaces every other policy flag.
    #[arg(long)]
    pub policy_file: Option<PathBuf>,
}

impl PolicyArgs {
    pub fn resolve(&self) -> Result<RoutingPolicy> {
        self.resolve_as(self.policy)
    }

    pub fn resolve_as(&self, name: PolicyName) -> Result<RoutingPolicy> {
        if let Some(path) = &self.policy_file {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text)
                .with_context(|| format!("parsing policy {}", path.display()));
        }
        let kind = match name {
            PolicyName::Lnd => PolicyKind::Lnd(LndParams {
                probability_penalty: !self.no_probability_penalty,
                ..LndParams::default()
            }),
            PolicyName::Clightning => {
                let mut c = CLightningParams::default();
                if let Some(f) = self.fuzz {
                    if !(0.0..1.0).contains(&f) {
                        bail!("--fuzz must lie in [0, 1), got {f}");
                    }
                    c.fuzz = f;
                }
                PolicyKind::CLightning(c)
            }
            PolicyName::Eclair => {
                let mut e = EclairParams::default();
                if let Some(k) = self.top_k {
                    if k == 0 {
                        bail!("--top-k must be positive");
                    }
                    e.top_k = k;
                }
                PolicyKind::Eclair(e)
            }
            PolicyName::Suggested => {
                let ratio = self
                    .interest_ratio
                    .ok_or_else(|| anyhow!("the suggested policy needs --interest-ratio"))?;
                let mut s = SuggestedParams::new(ratio);
                if let Some(sigma) = self.sigma {
                    s.sigma = sigma;
                }
                PolicyKind::Suggested(s)
            }
        };
        let mut policy = RoutingPolicy::new(kind);
        if let Some(h) = self.max_hops {
            policy.limits.max_hops = h;
        }
        Ok(policy)
    }
}

/// Which ordered pairs to route.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairSpec {
    All,
    Sample(usize),
    File(PathBuf),
}

impl FromStr for PairSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(PairSpec::All);
        }
        if let Some(n) = s.strip_prefix("sample:") {
            return n
                .parse()
                .map(PairSpec::Sample)
                .map_err(|e| format!("bad sample size {n:?}: {e}"));
        }
        if let Some(p) = s.strip_prefix("file:") {
            return Ok(PairSpec::File(PathBuf::from(p)));
        }
        Err(format!("expected all, sample:N or file:PATH, got {s:?}"))
    }
}

#[derive(Args, Clone, Debug)]
pub struct CommonArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Payment amounts in millisatoshi.
    #[arg(long = "amount", default_values_t = [1_000u64, 1_000_000])]
    pub amounts: Vec<u64>,
    /// `all`, `sample:N` or `file:PATH` (CSV of source,target node ids).
    #[arg(long, default_value = "sample:1000")]
    pub pairs: PairSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output; the JSON sidecar goes next to it with `.json` appended.
    #[arg(long)]
    pub out: PathBuf,
}

/// The graph's origin as recorded in the sidecar.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSource {
    Snapshot { path: PathBuf, sha256: String },
    Synthetic(SyntheticSpec),
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn parse_synthetic(text: &str, default_seed: u64) -> Result<SyntheticSpec> {
    let (mut n, mut m, mut seed) = (None, 2usize, default_seed);
    for part in text.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("synthetic spec entries look like key=value, got {part:?}"))?;
        let bad = |e: std::num::ParseIntError| anyhow!("bad value for {key}: {e}");
        match key.trim() {
            "n" | "nodes" => n = Some(value.trim().parse().map_err(bad)?),
            "m" | "attachment" => m = value.trim().parse().map_err(bad)?,
            "seed" => seed = value.trim().parse().map_err(bad)?,
            other => bail!("unknown synthetic spec key {other:?}"),
        }
    }
    let n = n.ok_or_else(|| anyhow!("synthetic spec needs n=<nodes>"))?;
    Ok(SyntheticSpec::new(n, m, seed))
}

pub fn load_graph(args: &GraphArgs, seed: u64) -> Result<(ChannelGraph, GraphSource)> {
    if let Some(path) = &args.graph {
        let bytes =
            fs::read(path).with_context(|| format!("reading snapshot {}", path.display()))?;
        let graph = parse_snapshot(&bytes)
            .with_context(|| format!("parsing snapshot {}", path.display()))?;
        let source = GraphSource::Snapshot {
            path: path.clone(),
            sha256: sha256_hex(&bytes),
        };
        return Ok((graph, source));
    }
    let text = args
        .synthetic
        .as_deref()
        .ok_or_else(|| anyhow!("pass --graph or --synthetic"))?;
    let spec = parse_synthetic(text, seed)?;
    let graph = generate_synthetic(&spec)?;
    Ok((graph, GraphSource::Synthetic(spec)))
}

fn read_pairs(path: &Path, graph: &ChannelGraph) -> Result<Vec<(usize, usize)>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading pairs {}", path.display()))?;
    let mut pairs = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let [s, t] = [0, 1].map(|i| record.get(i).unwrap_or("").trim().to_string());
        let find = |id: &str| {
            graph
                .node_index(&NodeId::new(id))
                .ok_or_else(|| anyhow!("{}: row {}: unknown node {id:?}", path.display(), line + 1))
        };
        pairs.push((find(&s)?, find(&t)?));
    }
    Ok(pairs)
}

/// Pairs at `amount`. Sampled pairs depend only on the seed, so every
/// amount routes the same pairs.
pub fn pair_sample(
    spec: &PairSpec,
    graph: &ChannelGraph,
    amount: u64,
    seed: u64,
) -> Result<PairSample> {
    if amount == 0 {
        bail!("amounts must be positive");
    }
    let n = graph.node_count();
    Ok(match spec {
        PairSpec::All => PairSample::all(n, amount),
        PairSpec::Sample(count) => PairSample::sampled(n, *count, seed, amount),
        PairSpec::File(path) => PairSample::from_pairs(read_pairs(path, graph)?, amount)?,
    })
}

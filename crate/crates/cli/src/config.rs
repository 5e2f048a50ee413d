//! Layered TOML configuration: built-in desk defaults, an optional config
//! file, then dotted-path `--set` overrides, resolved into a validated
//! experiment description.

use driftlab_core::env::RewardSupport;
use driftlab_core::experiment::{
    scaled_layout, DatasetSpec, Dynamics, MatrixOptions, ScheduleTemplate,
};
use driftlab_core::ingest::{
    bernoulli_pools, click_pools, cluster_rating_pools, drop_orphans, encode_users, kmeans,
    parse_click_log, parse_ratings, parse_users, ratings_pools, ClickLogConfig, KMeansConfig,
};
use driftlab_core::policy::PolicyKind;
use driftlab_core::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub experiment: ExperimentSection,
    pub policies: PoliciesSection,
    pub drift: DriftSection,
    pub sources: SourcesSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// Scale applied to the reference layout (horizon 100000, changepoints
    /// 30000/45000/60000/90000, gradual windows at 30000 and 60000 lasting
    /// 10000) to derive the default horizon and drift times.
    pub scale: f64,
    /// Explicit horizon; overrides the scaled one.
    pub horizon: Option<u64>,
    pub num_runs: u32,
    pub base_seed: u64,
    pub record_stride: u64,
    pub datasets: Vec<String>,
    pub dynamics: Vec<String>,
    pub parallel: bool,
    /// Replay every policy of a (scenario, run) pair against one shared
    /// pre-sampled reward tape instead of independent streams.
    pub shared_tape: bool,
    /// Write full per-step trajectory files next to the curves.
    pub keep_steps: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            scale: 0.1,
            horizon: None,
            num_runs: 3,
            base_seed: 42,
            record_stride: 100,
            datasets: vec!["ml".into(), "obd".into()],
            dynamics: vec!["stationary".into(), "abrupt".into(), "gradual".into()],
            parallel: true,
            shared_tape: false,
            keep_steps: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoliciesSection {
    pub ids: Vec<String>,
    pub alpha: f64,
    pub gamma: f64,
    /// Window heuristic factor: tau = round(c * horizon / changepoints).
    pub window_c: f64,
    /// Explicit window for drifting scenarios, replacing the heuristic.
    pub window_tau: Option<u64>,
    /// Window for stationary scenarios; defaults to the horizon.
    pub stationary_tau: Option<u64>,
    pub fdsw_discounted_alpha: Option<f64>,
    pub fdsw_windowed_alpha: Option<f64>,
}

impl Default for PoliciesSection {
    fn default() -> Self {
        PoliciesSection {
            ids: vec![
                "ucb1".into(),
                "ducb".into(),
                "swucb".into(),
                "fdsw-min".into(),
                "fdsw-mean".into(),
                "fdsw-max".into(),
            ],
            alpha: 1.0,
            gamma: 0.999,
            window_c: 0.25,
            window_tau: None,
            stationary_tau: Some(1000),
            fdsw_discounted_alpha: Some(0.1),
            fdsw_windowed_alpha: Some(0.5),
        }
    }
}

/// Explicit drift times; unset lists fall back to the scaled reference
/// layout.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftSection {
    pub abrupt_changepoints: Option<Vec<u64>>,
    pub gradual_starts: Option<Vec<u64>>,
    pub gradual_duration: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourcesSection {
    pub ml: MlSource,
    pub obd: ObdSource,
}

/// Ratings-support arm source: synthetic pools at fixed target means, or a
/// MovieLens-style log pair clustered into arms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlSource {
    /// "synthetic-ratings" or "movielens".
    pub kind: String,
    pub pool_size: usize,
    /// Target means for the synthetic kind, one arm each.
    pub means: Vec<f64>,
    pub users_path: Option<String>,
    pub ratings_path: Option<String>,
    /// Cluster count (arms) for the movielens kind.
    pub clusters: usize,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub kmeans_seed: u64,
    pub elbow_min_k: usize,
    pub elbow_max_k: usize,
}

impl Default for MlSource {
    fn default() -> Self {
        MlSource {
            kind: "synthetic-ratings".into(),
            pool_size: 500,
            means: (0..9).map(|i| 3.9 - 0.15 * i as f64).collect(),
            users_path: None,
            ratings_path: None,
            clusters: 9,
            kmeans_restarts: 10,
            kmeans_max_iters: 300,
            kmeans_seed: 0,
            elbow_min_k: 2,
            elbow_max_k: 15,
        }
    }
}

/// Bernoulli-support arm source: synthetic click-rate ladder, or an
/// OBD-style click log grouped by item.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObdSource {
    /// "synthetic-bernoulli" or "obd-log".
    pub kind: String,
    pub pool_size: usize,
    pub num_arms: usize,
    /// Synthetic means are mean_start + i * mean_step unless `means` is set.
    pub mean_start: f64,
    pub mean_step: f64,
    pub means: Option<Vec<f64>>,
    pub path: Option<String>,
    pub item_column: String,
    pub click_column: String,
    pub min_samples: usize,
}

impl Default for ObdSource {
    fn default() -> Self {
        ObdSource {
            kind: "synthetic-bernoulli".into(),
            pool_size: 1000,
            num_arms: 80,
            mean_start: 0.005,
            mean_step: 0.001,
            means: None,
            path: None,
            item_column: "item_id".into(),
            click_column: "click".into(),
            min_samples: 1,
        }
    }
}

fn merge_value(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge_value(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn parse_override_value(raw: &str) -> toml::Value {
    let attempt: std::result::Result<toml::Table, _> = format!("v = {raw}").parse();
    match attempt {
        Ok(mut t) => t.remove("v").expect("just parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn apply_override(root: &mut toml::Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override '{spec}' is not KEY=VALUE")))?;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::config(format!("override '{spec}' has an empty key segment")));
    }
    let mut node = root;
    for k in &keys[..keys.len() - 1] {
        node = node
            .as_table_mut()
            .ok_or_else(|| Error::config(format!("override '{spec}' crosses a non-table key")))?
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::config(format!("override '{spec}' crosses a non-table key")))?;
    table.insert(keys[keys.len() - 1].to_string(), parse_override_value(raw));
    Ok(())
}

/// Defaults, overlaid by the config file (when given), overlaid by `--set`
/// overrides. Unknown keys anywhere are rejected.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<Config> {
    let mut root = toml::Value::try_from(Config::default())
        .map_err(|e| Error::invariant(format!("default config does not serialize: {e}")))?;
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| io_at(path, e))?;
        let file_table: toml::Table = text
            .parse()
            .map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
        merge_value(&mut root, toml::Value::Table(file_table));
    }
    for spec in overrides {
        apply_override(&mut root, spec)?;
    }
    root.try_into()
        .map_err(|e| Error::config(format!("invalid configuration: {e}")))
}

/// Wrap an I/O error with the path it concerns.
pub fn io_at(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// A fully built dataset: the spec handed to the matrix plus per-arm source
/// labels for the metadata table.
pub struct BuiltDataset {
    pub spec: DatasetSpec,
    pub arm_labels: Vec<String>,
}

fn synth_label(mean: f64) -> String {
    format!("synthetic(mean={mean})")
}

fn build_ml_dataset(src: &MlSource) -> Result<BuiltDataset> {
    match src.kind.as_str() {
        "synthetic-ratings" => {
            let pools = ratings_pools(&src.means, src.pool_size)?;
            Ok(BuiltDataset {
                spec: DatasetSpec {
                    id: "ml".into(),
                    pools: Arc::new(pools),
                    support: RewardSupport::RATINGS,
                },
                arm_labels: src.means.iter().map(|&m| synth_label(m)).collect(),
            })
        }
        "movielens" => {
            let (users, ratings) = read_movielens(src)?;
            let points = encode_users(&users);
            let cfg = KMeansConfig {
                max_iters: src.kmeans_max_iters,
                restarts: src.kmeans_restarts,
                seed: src.kmeans_seed,
            };
            let model = kmeans(&points, src.clusters, &cfg)?;
            let pools =
                cluster_rating_pools(&users, &model.assignments, model.k, &ratings)?;
            Ok(BuiltDataset {
                spec: DatasetSpec {
                    id: "ml".into(),
                    pools: Arc::new(pools),
                    support: RewardSupport::RATINGS,
                },
                arm_labels: (0..model.k).map(|c| format!("cluster-{c}")).collect(),
            })
        }
        other => Err(Error::config(format!(
            "sources.ml.kind '{other}' (expected synthetic-ratings or movielens)"
        ))),
    }
}

/// Parse the MovieLens-style pair named in the config and drop orphan
/// ratings. Shared by dataset building and the cluster command.
pub fn read_movielens(src: &MlSource) -> Result<(Vec<driftlab_core::ingest::UserRecord>, Vec<driftlab_core::ingest::RatingRecord>)> {
    let users_path = src
        .users_path
        .as_deref()
        .ok_or_else(|| Error::config("sources.ml.users_path is required for kind movielens"))?;
    let ratings_path = src
        .ratings_path
        .as_deref()
        .ok_or_else(|| Error::config("sources.ml.ratings_path is required for kind movielens"))?;
    let users_file =
        File::open(users_path).map_err(|e| io_at(Path::new(users_path), e))?;
    let (users, _) = parse_users(BufReader::new(users_file))?;
    let ratings_file =
        File::open(ratings_path).map_err(|e| io_at(Path::new(ratings_path), e))?;
    let (ratings, _) = parse_ratings(BufReader::new(ratings_file))?;
    let (ratings, _) = drop_orphans(ratings, &users);
    Ok((users, ratings))
}

fn obd_means(src: &ObdSource) -> Vec<f64> {
    match &src.means {
        Some(m) => m.clone(),
        None => (0..src.num_arms)
            .map(|i| src.mean_start + i as f64 * src.mean_step)
            .collect(),
    }
}

fn build_obd_dataset(src: &ObdSource) -> Result<BuiltDataset> {
    match src.kind.as_str() {
        "synthetic-bernoulli" => {
            let means = obd_means(src);
            let pools = bernoulli_pools(&means, src.pool_size)?;
            Ok(BuiltDataset {
                spec: DatasetSpec {
                    id: "obd".into(),
                    pools: Arc::new(pools),
                    support: RewardSupport::BERNOULLI,
                },
                arm_labels: means.iter().map(|&m| synth_label(m)).collect(),
            })
        }
        "obd-log" => {
            let path = src
                .path
                .as_deref()
                .ok_or_else(|| Error::config("sources.obd.path is required for kind obd-log"))?;
            let file = File::open(path).map_err(|e| io_at(Path::new(path), e))?;
            let log_cfg = ClickLogConfig {
                item_column: src.item_column.clone(),
                click_column: src.click_column.clone(),
            };
            let records = parse_click_log(BufReader::new(file), &log_cfg)?;
            let (ids, pools) = click_pools(&records, src.min_samples)?;
            Ok(BuiltDataset {
                spec: DatasetSpec {
                    id: "obd".into(),
                    pools: Arc::new(pools),
                    support: RewardSupport::BERNOULLI,
                },
                arm_labels: ids.iter().map(|id| format!("item-{id}")).collect(),
            })
        }
        other => Err(Error::config(format!(
            "sources.obd.kind '{other}' (expected synthetic-bernoulli or obd-log)"
        ))),
    }
}

/// The executable form of a configuration, plus the provenance copy with
/// every derived value made explicit.
pub struct Resolved {
    pub options: MatrixOptions,
    pub arm_labels: BTreeMap<String, Vec<String>>,
    pub provenance: Config,
}

pub fn resolve(config: &Config) -> Result<Resolved> {
    let exp = &config.experiment;
    let (scaled_horizon, scaled_template) = scaled_layout(exp.scale)?;
    let horizon = exp.horizon.unwrap_or(scaled_horizon);
    let template = ScheduleTemplate {
        abrupt_changepoints: config
            .drift
            .abrupt_changepoints
            .clone()
            .unwrap_or(scaled_template.abrupt_changepoints),
        gradual_starts: config
            .drift
            .gradual_starts
            .clone()
            .unwrap_or(scaled_template.gradual_starts),
        gradual_duration: config
            .drift
            .gradual_duration
            .unwrap_or(scaled_template.gradual_duration),
    };

    let mut datasets = Vec::new();
    let mut arm_labels = BTreeMap::new();
    for id in &exp.datasets {
        let built = match id.as_str() {
            "ml" => build_ml_dataset(&config.sources.ml)?,
            "obd" => build_obd_dataset(&config.sources.obd)?,
            other => {
                return Err(Error::config(format!(
                    "unknown dataset '{other}' (expected ml or obd)"
                )))
            }
        };
        arm_labels.insert(built.spec.id.clone(), built.arm_labels);
        datasets.push(built.spec);
    }

    let dynamics = exp
        .dynamics
        .iter()
        .map(|d| Dynamics::from_id(d))
        .collect::<Result<Vec<_>>>()?;
    let policies = config
        .policies
        .ids
        .iter()
        .map(|p| PolicyKind::from_id(p))
        .collect::<Result<Vec<_>>>()?;

    let mut options = MatrixOptions::desk(Vec::new());
    options.datasets = datasets;
    options.dynamics = dynamics;
    options.policies = policies;
    options.horizon = horizon;
    options.template = template.clone();
    options.alpha = config.policies.alpha;
    options.gamma = config.policies.gamma;
    options.window_c = config.policies.window_c;
    options.window_tau = config.policies.window_tau;
    options.stationary_tau = config.policies.stationary_tau;
    options.fdsw_discounted_alpha = config.policies.fdsw_discounted_alpha;
    options.fdsw_windowed_alpha = config.policies.fdsw_windowed_alpha;
    options.num_runs = exp.num_runs;
    options.base_seed = exp.base_seed;
    options.record_stride = exp.record_stride;
    options.shared_tape = exp.shared_tape;
    options.keep_steps = exp.keep_steps;
    options.parallel = exp.parallel;

    let mut provenance = config.clone();
    provenance.experiment.horizon = Some(horizon);
    provenance.drift.abrupt_changepoints = Some(template.abrupt_changepoints);
    provenance.drift.gradual_starts = Some(template.gradual_starts);
    provenance.drift.gradual_duration = Some(template.gradual_duration);

    Ok(Resolved { options, arm_labels, provenance })
}

/// Serialize the provenance copy.
pub fn config_toml(config: &Config) -> Result<String> {
    toml::to_string(config)
        .map_err(|e| Error::invariant(format!("config does not serialize: {e}")))
}

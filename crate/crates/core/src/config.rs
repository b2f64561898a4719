//! Pipeline configuration: a single TOML file driving every stage.
//!
//! The file names its inputs, the seed, and per-stage settings; everything
//! except the seed and the article dump path has a default. Relative paths
//! are resolved against the config file's directory at load time, so a
//! config travels with its data. The canonical JSON serialization of the
//! resolved config is hashed into the output manifest, which ties every
//! corpus to the exact settings that produced it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{Category, LengthClass, Polarity, SimilarityBand, Tense};
use crate::sample::DistributionSpec;

/// Errors from loading or validating a config file.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// The config file could not be read.
    #[error("failed to read config {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// The config file is not valid TOML for this schema.
    #[error("invalid config file")]
    Parse(#[from] toml::de::Error),
    /// A setting value is out of range or inconsistent.
    #[error("invalid config: {reason}")]
    Invalid { reason: String },
    /// A configured input file does not exist.
    #[error("{role} file not found: {path}")]
    MissingFile { role: &'static str, path: String },
}

fn default_threads() -> usize {
    1
}

fn default_test_fraction() -> f64 {
    0.25
}

fn default_advert_phrases() -> Vec<String> {
    vec!["सूचना तथा सुझाव".to_string()]
}

fn default_typo_fixes() -> Vec<(String, String)> {
    vec![("न््".to_string(), "न्".to_string())]
}

fn default_prefix_separators() -> Vec<char> {
    vec![':', '–', '-']
}

fn default_max_prefix_tokens() -> usize {
    3
}

fn default_max_special_chars() -> usize {
    5
}

fn default_threshold() -> f64 {
    0.8
}

fn default_provider() -> String {
    "builtin".to_string()
}

fn default_dimension() -> usize {
    512
}

/// Input file locations. Only the article dump is required; the optional
/// entries override compiled-in defaults or enable extra stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    /// Line-delimited JSON article dump.
    pub article_dump: PathBuf,
    /// Keyword map TOML (defaults to the compiled-in map).
    #[serde(default)]
    pub keyword_map: Option<PathBuf>,
    /// Category funnel TOML (defaults to the compiled-in layers).
    #[serde(default)]
    pub layer_rules: Option<PathBuf>,
    /// Classifier pattern tables TOML (defaults to the compiled-in tables).
    #[serde(default)]
    pub pattern_tables: Option<PathBuf>,
    /// Precomputed embedding sidecar (required when `dedup.provider` is
    /// "file").
    #[serde(default)]
    pub embedding_vectors: Option<PathBuf>,
    /// Tab-separated `sentence_id<TAB>translation` file; sentences without
    /// a row stay untranslated and unsplit.
    #[serde(default)]
    pub translations: Option<PathBuf>,
    /// Line-delimited JSON of pre-translated pairs to merge in.
    #[serde(default)]
    pub borrowed_pairs: Option<PathBuf>,
}

/// Cleaner settings (see the cleaner module for semantics).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleanerSection {
    #[serde(default = "default_advert_phrases")]
    pub advert_phrases: Vec<String>,
    #[serde(default = "default_typo_fixes")]
    pub typo_fixes: Vec<(String, String)>,
    #[serde(default = "default_prefix_separators")]
    pub prefix_separators: Vec<char>,
    #[serde(default = "default_max_prefix_tokens")]
    pub max_prefix_tokens: usize,
    #[serde(default = "default_max_special_chars")]
    pub max_special_chars: usize,
}

impl Default for CleanerSection {
    fn default() -> Self {
        CleanerSection {
            advert_phrases: default_advert_phrases(),
            typo_fixes: default_typo_fixes(),
            prefix_separators: default_prefix_separators(),
            max_prefix_tokens: default_max_prefix_tokens(),
            max_special_chars: default_max_special_chars(),
        }
    }
}

/// Near-duplicate filter settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DedupSection {
    /// Cosine similarity above which a sentence is a near-duplicate.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// "builtin" (hashed character n-grams) or "file" (sidecar vectors).
    #[serde(default = "default_provider")]
    pub provider: String,
    /// Vector dimension for the built-in embedder.
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    /// Band edges `[low_max, medium_max]`; defaults to thirds of the
    /// threshold.
    #[serde(default)]
    pub band_boundaries: Option<[f64; 2]>,
}

impl Default for DedupSection {
    fn default() -> Self {
        DedupSection {
            threshold: default_threshold(),
            provider: default_provider(),
            dimension: default_dimension(),
            band_boundaries: None,
        }
    }
}

/// Sampling settings. Omitted proportions fall back to the built-in
/// distribution; `total_requested = None` skips sampling entirely.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    /// Number of sentences to sample; absent means keep everything.
    #[serde(default)]
    pub total_requested: Option<usize>,
    #[serde(default)]
    pub category: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub length: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub tense: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub polarity: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub band: Option<BTreeMap<String, f64>>,
}

/// Everything the pipeline needs, parsed from one TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Root seed for all random draws.
    pub seed: u64,
    /// Worker threads for per-sentence stages (results are identical for
    /// any value).
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Fraction of pairs assigned to the test split.
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    /// Keep sentences under the minimum length instead of dropping them.
    #[serde(default)]
    pub keep_below_min: bool,
    pub paths: PathsConfig,
    #[serde(default)]
    pub cleaner: CleanerSection,
    #[serde(default)]
    pub dedup: DedupSection,
    #[serde(default)]
    pub sampling: SamplingSection,
}

impl PipelineConfig {
    /// Parses a config from TOML text, resolving relative paths against
    /// `base_dir` when given.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<PipelineConfig, ConfigError> {
        let mut config: PipelineConfig = toml::from_str(text)?;
        if let Some(base) = base_dir {
            let resolve = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            resolve(&mut config.paths.article_dump);
            for opt in [
                &mut config.paths.keyword_map,
                &mut config.paths.layer_rules,
                &mut config.paths.pattern_tables,
                &mut config.paths.embedding_vectors,
                &mut config.paths.translations,
                &mut config.paths.borrowed_pairs,
            ] {
                if let Some(p) = opt.as_mut() {
                    resolve(p);
                }
            }
        }
        Ok(config)
    }

    /// Loads a config file, resolving relative paths against its directory.
    pub fn from_toml_path(path: &Path) -> Result<PipelineConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        PipelineConfig::from_toml_str(&text, path.parent())
    }

    /// Checks ranges and that every configured input file exists.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |reason: String| Err(ConfigError::Invalid { reason });
        if self.threads == 0 {
            return invalid("threads must be at least 1".to_string());
        }
        if !self.test_fraction.is_finite() || !(0.0..=1.0).contains(&self.test_fraction) {
            return invalid(format!(
                "test_fraction {} is not in [0, 1]",
                self.test_fraction
            ));
        }
        if !self.dedup.threshold.is_finite() || !(0.0..=1.0).contains(&self.dedup.threshold) {
            return invalid(format!(
                "dedup.threshold {} is not in [0, 1]",
                self.dedup.threshold
            ));
        }
        if self.dedup.dimension < 2 {
            return invalid("dedup.dimension must be at least 2".to_string());
        }
        match self.dedup.provider.as_str() {
            "builtin" => {}
            "file" => {
                if self.paths.embedding_vectors.is_none() {
                    return invalid(
                        "dedup.provider \"file\" requires paths.embedding_vectors".to_string(),
                    );
                }
            }
            other => return invalid(format!("unknown dedup.provider {other:?}")),
        }
        if let Some([low, medium]) = self.dedup.band_boundaries {
            if !(low.is_finite() && medium.is_finite()) || low < 0.0 || medium < low {
                return invalid(format!(
                    "band_boundaries [{low}, {medium}] must satisfy 0 <= low <= medium"
                ));
            }
        }
        let mut files: Vec<(&'static str, &PathBuf)> =
            vec![("article dump", &self.paths.article_dump)];
        for (role, path) in [
            ("keyword map", &self.paths.keyword_map),
            ("layer rules", &self.paths.layer_rules),
            ("pattern tables", &self.paths.pattern_tables),
            ("embedding vectors", &self.paths.embedding_vectors),
            ("translations", &self.paths.translations),
            ("borrowed pairs", &self.paths.borrowed_pairs),
        ] {
            if let Some(p) = path {
                files.push((role, p));
            }
        }
        for (role, path) in files {
            if !path.is_file() {
                return Err(ConfigError::MissingFile {
                    role,
                    path: path.display().to_string(),
                });
            }
        }
        Ok(())
    }

    /// Builds the sampling distribution for `total` sentences, starting at
    /// the built-in defaults and applying any configured overrides.
    pub fn distribution_spec(&self, total: usize) -> Result<DistributionSpec, ConfigError> {
        let mut spec = DistributionSpec::with_total(total);
        fn apply<K: Ord + Copy>(
            axis: &'static str,
            overrides: &Option<BTreeMap<String, f64>>,
            target: &mut BTreeMap<K, f64>,
            parse: impl Fn(&str) -> Option<K>,
        ) -> Result<(), ConfigError> {
            if let Some(map) = overrides {
                for (label, &weight) in map {
                    let key = parse(label).ok_or_else(|| ConfigError::Invalid {
                        reason: format!("sampling.{axis} has unknown class {label:?}"),
                    })?;
                    target.insert(key, weight);
                }
            }
            Ok(())
        }
        apply("category", &self.sampling.category, &mut spec.category, Category::parse)?;
        apply("length", &self.sampling.length, &mut spec.length, LengthClass::parse)?;
        apply("tense", &self.sampling.tense, &mut spec.tense, Tense::parse)?;
        apply("polarity", &self.sampling.polarity, &mut spec.polarity, Polarity::parse)?;
        apply("band", &self.sampling.band, &mut spec.band, SimilarityBand::parse)?;
        Ok(spec)
    }

    /// SHA-256 hex digest of the canonical (JSON) serialization, with all
    /// paths as resolved. Any output-affecting settings change changes the
    /// hash; the thread count is pinned before hashing because it never
    /// affects the corpus produced.
    pub fn config_hash(&self) -> String {
        let mut pinned = self.clone();
        pinned.threads = default_threads();
        let canonical = serde_json::to_string(&pinned).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

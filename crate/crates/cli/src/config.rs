//! Experiment configuration (TOML) and problem materialization.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use asls_core::problems::{
    gen_matrix_factorization, gen_separable, logistic_objective, parse_libsvm, rbf_map, Dataset,
    KernelConfig, SeparableConfig,
};
use asls_core::{FiniteSumObjective, RunConfig};

use crate::CliError;

/// A full experiment: one problem, a grid of named runs, optional repetitions
/// with shifted seeds.
#[derive(Debug, Clone, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    pub problem: ProblemSpec,
    #[serde(rename = "run", default)]
    pub runs: Vec<NamedRun>,
}

fn default_repetitions() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedRun {
    pub name: String,
    #[serde(flatten)]
    pub config: RunConfig,
}

/// What to optimize. LIBSVM paths are resolved against ASLS_DATA_DIR when
/// relative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Separable {
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_d")]
        d: usize,
        margin: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        rbf_bandwidth: Option<f64>,
    },
    Libsvm {
        path: PathBuf,
        #[serde(default)]
        rbf_bandwidth: Option<f64>,
    },
    MatrixFactorization {
        rank: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_n() -> usize {
    1000
}
fn default_d() -> usize {
    20
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let config: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.runs.is_empty() {
            return Err(CliError::Usage("config defines no [[run] ] entries".into()));
        }
        if self.repetitions == 0 {
            return Err(CliError::Usage("repetitions must be positive".into()));
        }
        let mut names: Vec<&str> = self.runs.iter().map(|r| r.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.runs.len() {
            return Err(CliError::Usage("run names must be distinct".into()));
        }
        Ok(())
    }
}

impl ProblemSpec {
    /// Build the dataset behind this spec, when it is a dataset problem.
    pub fn build_dataset(&self, data_dir: &Path) -> Result<Dataset, CliError> {
        let (base, bandwidth) = match self {
            ProblemSpec::Separable {
                n,
                d,
                margin,
                seed,
                rbf_bandwidth,
            } => {
                let cfg = SeparableConfig {
                    n: *n,
                    d: *d,
                    margin: *margin,
                    seed: *seed,
                };
                let (ds, _) = gen_separable(&cfg).map_err(CliError::from_core)?;
                (ds, *rbf_bandwidth)
            }
            ProblemSpec::Libsvm {
                path,
                rbf_bandwidth,
            } => {
                let resolved = if path.is_absolute() {
                    path.clone()
                } else {
                    data_dir.join(path)
                };
                let file = std::fs::File::open(&resolved).map_err(|e| {
                    CliError::Failure(format!("cannot open dataset {}: {e}", resolved.display()))
                })?;
                let ds = parse_libsvm(std::io::BufReader::new(file)).map_err(CliError::from_core)?;
                (ds, *rbf_bandwidth)
            }
            ProblemSpec::MatrixFactorization { .. } => {
                return Err(CliError::Usage(
                    "matrix factorization is not a dataset problem".into(),
                ))
            }
        };
        match bandwidth {
            Some(bw) => rbf_map(&base, &KernelConfig { bandwidth: bw }).map_err(CliError::from_core),
            None => Ok(base),
        }
    }

    pub fn build_objective(
        &self,
        data_dir: &Path,
    ) -> Result<Box<dyn FiniteSumObjective + Send + Sync>, CliError> {
        match self {
            ProblemSpec::MatrixFactorization { rank, seed } => {
                let (_, obj) = gen_matrix_factorization(*rank, *seed).map_err(CliError::from_core)?;
                Ok(Box::new(obj))
            }
            _ => {
                let ds = self.build_dataset(data_dir)?;
                Ok(Box::new(logistic_objective(ds)))
            }
        }
    }

    /// Content hash of the spec, used to name cached dataset files.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }

    pub fn cache_file_name(&self) -> String {
        let kind = match self {
            ProblemSpec::Separable { .. } => "separable",
            ProblemSpec::Libsvm { .. } => "libsvm",
            ProblemSpec::MatrixFactorization { .. } => "matrix-factorization",
        };
        format!("{kind}-{}.svm", self.content_hash())
    }
}

/// Dataset cache directory: ASLS_DATA_DIR, or the current directory.
pub fn data_dir() -> PathBuf {
    std::env::var_os("ASLS_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

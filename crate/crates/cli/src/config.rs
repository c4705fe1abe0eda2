//! Run configuration: command-line flags merged over an optional TOML file
//! (flags win on conflict). Scalar values inside the file use the same
//! literal grammar as the flags.

use std::path::PathBuf;

use maxdyn_core::{Scalar, Tuple4};
use serde::Deserialize;

use crate::{CliError, CommonArgs, OutputFormat};

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    init: Option<Vec<String>>,
    steps: Option<u64>,
    max_steps: Option<u64>,
    epsilon: Option<f64>,
    format: Option<String>,
    coords: Option<String>,
    out: Option<PathBuf>,
    count: Option<usize>,
    param: Option<String>,
    tropical_eps: Option<String>,
    verify: Option<bool>,
    float: Option<bool>,
}

/// Fully merged configuration used by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub init: Option<Vec<String>>,
    pub steps: Option<u64>,
    pub max_steps: Option<u64>,
    pub epsilon: f64,
    pub format: OutputFormat,
    pub coords: Option<String>,
    pub out: Option<PathBuf>,
    pub count: usize,
    pub param: String,
    pub tropical_eps: Option<String>,
    pub verify: bool,
    pub float: bool,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<RunConfig, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("invalid config file: {e}")))?
            }
            None => FileConfig::default(),
        };
        let format = match (&args.format, file.format.as_deref()) {
            (Some(f), _) => *f,
            (None, Some("csv")) => OutputFormat::Csv,
            (None, Some("json-lines")) => OutputFormat::JsonLines,
            (None, Some(other)) => {
                return Err(CliError::Usage(format!(
                    "invalid format {other:?} in config (expected \"csv\" or \"json-lines\")"
                )))
            }
            (None, None) => OutputFormat::Csv,
        };
        let epsilon = args.epsilon.or(file.epsilon).unwrap_or(1e-9);
        if !(epsilon > 0.0) {
            return Err(CliError::Usage("epsilon must be positive".into()));
        }
        Ok(RunConfig {
            init: args.init.clone().or(file.init),
            steps: args.steps.or(file.steps),
            max_steps: args.max_steps.or(file.max_steps),
            epsilon,
            format,
            coords: args.coords.clone().or(file.coords),
            out: args.out.clone().or(file.out),
            count: args.count.or(file.count).unwrap_or(4),
            param: args.param.clone().or(file.param).unwrap_or_else(|| "1".into()),
            tropical_eps: args.tropical_eps.clone().or(file.tropical_eps),
            verify: args.verify || file.verify.unwrap_or(false),
            float: args.float || file.float.unwrap_or(false),
        })
    }

    /// The four initial values, parsed exactly.
    pub fn tuple(&self) -> Result<Tuple4, CliError> {
        let lits = self.init.as_ref().ok_or_else(|| {
            CliError::Usage("missing initial conditions: pass --init X1 X2 X3 X4".into())
        })?;
        if lits.len() != 4 {
            return Err(CliError::Usage(format!(
                "--init needs exactly 4 literals, got {}",
                lits.len()
            )));
        }
        let mut parsed: Vec<Scalar> = Vec::with_capacity(4);
        for lit in lits {
            parsed.push(lit.parse()?);
        }
        let [a, b, c, d]: [Scalar; 4] = parsed.try_into().expect("length checked");
        Ok(Tuple4::new(a, b, c, d))
    }

    /// `--coords i,j,k`: three distinct 1-based window coordinates.
    pub fn coords(&self) -> Result<[usize; 3], CliError> {
        let text = self.coords.as_deref().unwrap_or("1,2,3");
        let parts: Vec<usize> = text
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("invalid --coords {text:?}")))?;
        let [i, j, k]: [usize; 3] = parts
            .try_into()
            .map_err(|_| CliError::Usage("--coords needs exactly three entries".into()))?;
        for c in [i, j, k] {
            if !(1..=4).contains(&c) {
                return Err(CliError::Usage("coordinates must be in 1..=4".into()));
            }
        }
        if i == j || j == k || i == k {
            return Err(CliError::Usage("coordinates must be distinct".into()));
        }
        Ok([i, j, k])
    }

    pub fn tropical_eps_list(&self) -> Result<Vec<f64>, CliError> {
        match &self.tropical_eps {
            None => Ok(vec![1e-1, 1e-2, 1e-3]),
            Some(text) => text
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|e| *e > 0.0)
                        .ok_or_else(|| CliError::Usage(format!("invalid --tropical-eps {text:?}")))
                })
                .collect(),
        }
    }
}

//! Flat `key = value` run-configuration files.
//!
//! Recognized keys: `N` and `k` (comma-separated positive integers),
//! `reps`, `seed`, `estimators` (comma-separated ids), `criterion`.
//! Blank lines and `#` comments are skipped; unknown or duplicate keys
//! are rejected.

use tankest_core::{Criterion, EstimatorId};

#[derive(Debug, Default, Clone, PartialEq)]
pub struct FileConfig {
    pub n_values: Option<Vec<u64>>,
    pub k_values: Option<Vec<u64>>,
    pub reps: Option<u64>,
    pub seed: Option<u64>,
    pub estimators: Option<Vec<EstimatorId>>,
    pub criterion: Option<Criterion>,
}

fn parse_u64_list(key: &str, value: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for piece in value.split(',') {
        let piece = piece.trim();
        let v: u64 = piece
            .parse()
            .map_err(|_| format!("config key `{key}`: `{piece}` is not an integer"))?;
        if v == 0 {
            return Err(format!("config key `{key}`: values must be >= 1"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(format!("config key `{key}`: empty list"));
    }
    Ok(out)
}

pub fn parse_config_file(text: &str) -> Result<FileConfig, String> {
    let mut cfg = FileConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {lineno}: expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        let dup = |set: bool| {
            if set {
                Err(format!("config line {lineno}: duplicate key `{key}`"))
            } else {
                Ok(())
            }
        };
        match key {
            "N" => {
                dup(cfg.n_values.is_some())?;
                cfg.n_values = Some(parse_u64_list(key, value)?);
            }
            "k" => {
                dup(cfg.k_values.is_some())?;
                cfg.k_values = Some(parse_u64_list(key, value)?);
            }
            "reps" => {
                dup(cfg.reps.is_some())?;
                let v: u64 = value
                    .parse()
                    .map_err(|_| format!("config key `reps`: `{value}` is not an integer"))?;
                if v < 2 {
                    return Err("config key `reps`: must be >= 2".to_string());
                }
                cfg.reps = Some(v);
            }
            "seed" => {
                dup(cfg.seed.is_some())?;
                cfg.seed = Some(
                    value
                        .parse()
                        .map_err(|_| format!("config key `seed`: `{value}` is not an integer"))?,
                );
            }
            "estimators" => {
                dup(cfg.estimators.is_some())?;
                let mut ids = Vec::new();
                for piece in value.split(',') {
                    let piece = piece.trim();
                    ids.push(
                        piece
                            .parse::<EstimatorId>()
                            .map_err(|e| format!("config key `estimators`: {e}"))?,
                    );
                }
                if ids.is_empty() {
                    return Err("config key `estimators`: empty list".to_string());
                }
                cfg.estimators = Some(ids);
            }
            "criterion" => {
                dup(cfg.criterion.is_some())?;
                cfg.criterion = Some(
                    value
                        .parse::<Criterion>()
                        .map_err(|e| format!("config key `criterion`: {e}"))?,
                );
            }
            other => {
                return Err(format!("config line {lineno}: unknown config key `{other}`"));
            }
        }
    }
    Ok(cfg)
}

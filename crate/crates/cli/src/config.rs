//! Scenario configuration for the simulate subcommand: a TOML file with
//! top-level defaults and one `[[scenario]]` block per simulation cell.

use serde::{Deserialize, Serialize};
use ujel_core::{FgmParetoParams, GroupModel, MobveParams, Scenario};

use crate::{AppError, AppResult};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Confidence level used when a scenario does not override it.
    #[serde(default = "default_level")]
    pub level: f64,
    /// Replications per (scenario, size, method) row.
    #[serde(default = "default_reps")]
    pub reps: usize,
    /// Bootstrap replicates for the kernel-smoothed method.
    #[serde(default = "default_boot_b")]
    pub boot_b: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(rename = "scenario")]
    pub scenarios: Vec<ScenarioConfig>,
}

fn default_level() -> f64 {
    0.95
}
fn default_reps() -> usize {
    500
}
fn default_boot_b() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    /// "mobve" (3 rates per group) or "fgm-pareto" (2 scales, 2 shapes,
    /// dependence per group).
    pub model: String,
    /// One parameter row per group.
    pub groups: Vec<Vec<f64>>,
    /// Size tuples to sweep; each must have one entry per group.
    pub sizes: Vec<Vec<usize>>,
    /// Subset of {"jel", "normal", "kernel-boot"}.
    pub methods: Vec<String>,
    #[serde(default)]
    pub level: Option<f64>,
    #[serde(default)]
    pub boot_b: Option<usize>,
}

pub fn parse_config(text: &str) -> AppResult<SimulateConfig> {
    let config: SimulateConfig = toml::from_str(text)
        .map_err(|e| AppError::usage(format!("config parse error: {e}")))?;
    if config.scenarios.is_empty() {
        return Err(AppError::usage("config declares no [[scenario]] blocks"));
    }
    Ok(config)
}

pub fn parse_method(name: &str) -> AppResult<ujel_core::CiMethod> {
    match name {
        "jel" => Ok(ujel_core::CiMethod::Jel),
        "normal" => Ok(ujel_core::CiMethod::NormalApprox),
        "kernel-boot" => Ok(ujel_core::CiMethod::KernelBootstrap),
        other => Err(AppError::usage(format!(
            "unknown method '{other}'; expected jel, normal, or kernel-boot"
        ))),
    }
}

fn build_model(scenario_idx: usize, group_idx: usize, model: &str, params: &[f64]) -> AppResult<GroupModel> {
    let at = |msg: String| {
        AppError::usage(format!("scenario[{scenario_idx}].groups[{group_idx}]: {msg}"))
    };
    match model {
        "mobve" => {
            if params.len() != 3 {
                return Err(at(format!("mobve takes 3 rates, got {}", params.len())));
            }
            MobveParams::new(params[0], params[1], params[2])
                .map(GroupModel::Mobve)
                .map_err(|e| at(e.to_string()))
        }
        "fgm-pareto" => {
            if params.len() != 5 {
                return Err(at(format!(
                    "fgm-pareto takes scale1, scale2, shape1, shape2, dependence; got {} values",
                    params.len()
                )));
            }
            FgmParetoParams::new(params[0], params[1], params[2], params[3], params[4])
                .map(GroupModel::FgmPareto)
                .map_err(|e| at(e.to_string()))
        }
        other => Err(AppError::usage(format!(
            "scenario[{scenario_idx}].model: unknown model '{other}'; expected mobve or fgm-pareto"
        ))),
    }
}

/// One fully resolved simulation row.
#[derive(Debug)]
pub struct ResolvedRow {
    pub scenario: Scenario,
    pub method: ujel_core::CiMethod,
}

/// Expands the config into (scenario, size, method) rows in declaration
/// order.
pub fn resolve_rows(config: &SimulateConfig, reps_override: Option<usize>) -> AppResult<(usize, Vec<ResolvedRow>)> {
    let reps = reps_override.unwrap_or(config.reps);
    if reps == 0 {
        return Err(AppError::usage("reps must be at least 1"));
    }
    let mut rows = Vec::new();
    for (si, sc) in config.scenarios.iter().enumerate() {
        if sc.groups.len() < 2 {
            return Err(AppError::usage(format!(
                "scenario[{si}].groups: need at least 2 groups"
            )));
        }
        let models = sc
            .groups
            .iter()
            .enumerate()
            .map(|(gi, params)| build_model(si, gi, &sc.model, params))
            .collect::<AppResult<Vec<_>>>()?;
        if sc.methods.is_empty() {
            return Err(AppError::usage(format!("scenario[{si}].methods is empty")));
        }
        let methods = sc
            .methods
            .iter()
            .map(|m| parse_method(m))
            .collect::<AppResult<Vec<_>>>()?;
        for (zi, sizes) in sc.sizes.iter().enumerate() {
            if sizes.len() != models.len() {
                return Err(AppError::usage(format!(
                    "scenario[{si}].sizes[{zi}]: {} entries for {} groups",
                    sizes.len(),
                    models.len()
                )));
            }
            for &method in &methods {
                let scenario = Scenario {
                    id: sc.id.clone(),
                    models: models.clone(),
                    sizes: sizes.clone(),
                    level: sc.level.unwrap_or(config.level),
                    bootstrap_b: sc.boot_b.unwrap_or(config.boot_b),
                };
                scenario
                    .validate()
                    .map_err(|e| AppError::usage(format!("scenario[{si}]: {e}")))?;
                rows.push(ResolvedRow { scenario, method });
            }
        }
    }
    Ok((reps, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
level = 0.95
reps = 10
boot_b = 25

[[scenario]]
id = "sym"
model = "mobve"
groups = [[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]]
sizes = [[10, 10, 10], [20, 20, 20]]
methods = ["jel", "normal"]

[[scenario]]
id = "fgm"
model = "fgm-pareto"
groups = [[1, 1, 1, 1, 0.5], [1, 1, 1, 1, 0.5], [1, 1, 1, 1, -0.5]]
sizes = [[10, 10, 10]]
methods = ["kernel-boot"]
"#;

    #[test]
    fn parses_and_expands() {
        let config = parse_config(SAMPLE).unwrap();
        let (reps, rows) = resolve_rows(&config, None).unwrap();
        assert_eq!(reps, 10);
        // 2 sizes x 2 methods + 1 x 1
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].scenario.key(), "(1,1,1;1,1,1;1,1,1)");
        assert_eq!(rows[4].scenario.key(), "(1,1,1,1,0.5;1,1,1,1,0.5;1,1,1,1,-0.5)");
    }

    #[test]
    fn bad_parameter_paths_are_reported() {
        let text = SAMPLE.replace("[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]", "[1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]");
        let config = parse_config(&text).unwrap();
        let err = resolve_rows(&config, None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("scenario[0].groups[0]"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = format!("{SAMPLE}\nbogus_key = 1\n");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn unknown_method_is_usage_error() {
        let text = SAMPLE.replace("\"jel\", \"normal\"", "\"jel\", \"bayes\"");
        let config = parse_config(&text).unwrap();
        let err = resolve_rows(&config, None).unwrap_err();
        assert!(err.to_string().contains("bayes"));
    }
}

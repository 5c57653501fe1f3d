//! Resolved run parameters, embedded in every output so a run can be
//! repeated exactly.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub px: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub py: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Gram accumulation block; part of the result's identity because it
    /// fixes the summation order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory_px: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory_py: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values_out: Option<String>,
    pub scaled: bool,
    pub format: String,
    /// Edge formula behind the reported band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, format: &str) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            format: format.into(),
            ..Self::default()
        }
    }

    /// Command-line arguments (without the program name) that repeat this
    /// run. Floats print in shortest round-trip form.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![self.command.clone()];
        let mut push = |flag: &str, v: Option<String>| {
            if let Some(v) = v {
                args.push(format!("--{flag}"));
                args.push(v);
            }
        };
        let f = |v: Option<f64>| v.map(|x| x.to_string());
        let u = |v: Option<usize>| v.map(|x| x.to_string());
        push("px", f(self.px));
        push("py", f(self.py));
        push("t", u(self.t));
        push("nx", u(self.nx));
        push("ny", u(self.ny));
        push("sigma-x", f(self.sigma_x));
        push("sigma-y", f(self.sigma_y));
        push("representation", self.representation.clone());
        push("grid-points", u(self.grid_points));
        push("eta", f(self.eta));
        push("bins", u(self.bins));
        push("realizations", u(self.realizations));
        push("seed", self.seed.map(|s| s.to_string()));
        push("block-size", u(self.block_size));
        push("theory-px", f(self.theory_px));
        push("theory-py", f(self.theory_py));
        push("margin", f(self.margin));
        push("tol", f(self.tol));
        push("mode", self.mode.clone());
        push("values", self.values.clone());
        push("values-out", self.values_out.clone());
        push("format", Some(self.format.clone()));
        if self.scaled {
            args.push("--scaled".into());
        }
        args
    }
}

//! `paretail asymptotics`: limiting MSE curves over lambda.

use std::fs;
use std::io::Write;

use serde::Serialize;

use paretail::asymptotics::{asym_mean, asym_var, limit_mse, mse_opt, AsymptoticRegime, LimitKind};
use paretail::study::format_sig;

use crate::args::{AsymptoticsArgs, Format};
use crate::manifest::{manifest_path, RunManifest};
use crate::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub mse_hill: f64,
    pub mse_ml: f64,
    pub mse_opt: f64,
    pub bias_opt: f64,
    pub var_opt: f64,
}

fn grid(a: &AsymptoticsArgs) -> CliResult<Vec<f64>> {
    let lambdas = match &a.lambdas {
        Some(l) => l.clone(),
        None => {
            if a.lambda_points < 2 || a.lambda_max <= a.lambda_min || a.lambda_max.is_nan() {
                return Err(CliError::Usage(
                    "need --lambda-points >= 2 and --lambda-max > --lambda-min".into(),
                ));
            }
            let step = (a.lambda_max - a.lambda_min) / (a.lambda_points - 1) as f64;
            (0..a.lambda_points).map(|i| a.lambda_min + step * i as f64).collect()
        }
    };
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(CliError::Usage("lambda values must be finite and non-negative".into()));
    }
    Ok(lambdas)
}

pub fn curve(a: &AsymptoticsArgs) -> CliResult<Vec<CurvePoint>> {
    grid(a)?
        .into_iter()
        .map(|lambda| {
            let r = AsymptoticRegime::optimal(a.xi, a.rho, lambda)?;
            Ok(CurvePoint {
                lambda,
                mse_hill: limit_mse(LimitKind::Hill, a.xi, a.rho, lambda),
                mse_ml: limit_mse(LimitKind::EpdMl, a.xi, a.rho, lambda),
                mse_opt: mse_opt(a.xi, a.rho, lambda),
                bias_opt: asym_mean(&r),
                var_opt: asym_var(&r),
            })
        })
        .collect()
}

pub fn run(a: &AsymptoticsArgs) -> CliResult<()> {
    let points = curve(a)?;
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("lambda,mse_hill,mse_ml,mse_opt,bias_opt,var_opt\n");
            for p in &points {
                let fields = [p.lambda, p.mse_hill, p.mse_ml, p.mse_opt, p.bias_opt, p.var_opt];
                s.push_str(&fields.map(format_sig).join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&points).expect("curve serialises") + "\n",
    };
    match &a.out {
        Some(path) => {
            fs::write(path, &text)?;
            let mut m = RunManifest::new("asymptotics", serde_json::to_value(a).expect("arguments serialise"), vec![]);
            m.outputs = vec![path.clone()];
            m.write(&manifest_path(path))?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

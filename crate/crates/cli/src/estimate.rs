//! `paretail estimate`: estimator paths over k for one data file.

use std::fs;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use paretail::bayes::{bayes_mcmc, MetropolisConfig};
use paretail::epd::MIN_FIT_K;
use paretail::second_order::RhoSource;
use paretail::study::{cell_seed, format_sig};
use paretail::{
    bayes_closed_form, bayes_tail_prob, epd_ml_fit, epd_tail_prob, hill, load_sample, tau_hat,
    weissman_tail_prob, PriorSpec, SortedSample, TailError,
};

use crate::args::{EstimateArgs, Format, Method};
use crate::manifest::{digest_bytes, manifest_path, RunManifest};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Default, Serialize)]
pub struct Row {
    pub k: usize,
    pub threshold: f64,
    pub hill: f64,
    pub tau: Option<f64>,
    pub epd_xi: Option<f64>,
    pub epd_delta: Option<f64>,
    pub bayes_xi: Option<f64>,
    pub bayes_delta: Option<f64>,
    pub hpd_lower: Option<f64>,
    pub hpd_upper: Option<f64>,
    pub p_weissman: Option<f64>,
    pub p_epd: Option<f64>,
    pub p_bayes: Option<f64>,
    /// `ok`, or the failures of this row separated by `; `.
    pub status: String,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    n: usize,
    rho: f64,
    rho_source: RhoSource,
    method: Method,
    x: Option<f64>,
    rows: &'a [Row],
}

fn validate(a: &EstimateArgs, n: usize) -> CliResult<Vec<usize>> {
    let usage = |m: String| Err(CliError::Usage(m));
    if a.k_min < MIN_FIT_K {
        return usage(format!("--k-min must be at least {MIN_FIT_K}"));
    }
    if a.k_step == 0 {
        return usage("--k-step must be positive".into());
    }
    let k_max = a.k_max.unwrap_or(n - 1);
    if k_max >= n {
        return usage(format!("--k-max {k_max} must be below the sample size {n}"));
    }
    if a.k_min > k_max {
        return usage(format!("--k-min {} exceeds --k-max {k_max}", a.k_min));
    }
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return usage(format!("--alpha must lie in (0,1), got {}", a.alpha));
    }
    if a.method == Method::Mcmc && a.mcmc_iters < 2 {
        return usage("--mcmc-iters must be at least 2".into());
    }
    if let Some(x) = a.x {
        if !(x > 0.0 && x.is_finite()) {
            return usage(format!("--x must be positive, got {x}"));
        }
    }
    Ok((a.k_min..=k_max).step_by(a.k_step).collect())
}

fn estimate_row(a: &EstimateArgs, s: &SortedSample, k: usize, rho: f64) -> CliResult<Row> {
    let e = s.excesses(k)?;
    let h = hill(&e).xi;
    let mut row = Row {
        k,
        threshold: e.threshold(),
        hill: h,
        ..Row::default()
    };
    let mut issues = Vec::new();
    let mut note = |stage: &str, err: TailError| issues.push(format!("{stage}: {err}"));

    if let Some(x) = a.x {
        match weissman_tail_prob(s, k, x, h) {
            Ok(p) => row.p_weissman = Some(p),
            Err(err) => note("weissman", err),
        }
    }
    let tau = match tau_hat(rho, h) {
        Ok(t) => t,
        Err(err) => {
            note("tau", err);
            row.status = issues.join("; ");
            return Ok(row);
        }
    };
    row.tau = Some(tau);

    match epd_ml_fit(&e, tau) {
        Ok(fit) => {
            row.epd_xi = Some(fit.params.xi);
            row.epd_delta = Some(fit.params.delta);
            if let Some(x) = a.x {
                match epd_tail_prob(s, k, x, &fit.params) {
                    Ok(p) => row.p_epd = Some(p),
                    Err(err) => note("epd_ml", err),
                }
            }
        }
        Err(err) => note("epd_ml", err),
    }

    let bayes = PriorSpec::practical(k, s.n(), rho, tau).and_then(|prior| match a.method {
        Method::Closed => bayes_closed_form(&e, tau, &prior),
        Method::Mcmc => {
            let cfg = MetropolisConfig {
                iterations: a.mcmc_iters + a.burn_in,
                burn_in: a.burn_in,
                seed: cell_seed(a.seed, 0, k),
                ..MetropolisConfig::default()
            };
            bayes_mcmc(&e, tau, &prior, &cfg, a.alpha).map(|(est, _)| est)
        }
    });
    match bayes {
        Ok(est) => {
            row.bayes_xi = Some(est.xi);
            row.bayes_delta = Some(est.delta);
            if let Some(hpd) = est.hpd_xi {
                row.hpd_lower = Some(hpd.lower);
                row.hpd_upper = Some(hpd.upper);
            }
            if let Some(x) = a.x {
                match bayes_tail_prob(s, k, x, &est, tau) {
                    Ok(p) => row.p_bayes = Some(p),
                    Err(err) => note("bayes", err),
                }
            }
        }
        Err(err) => note("bayes", err),
    }
    row.status = if issues.is_empty() { "ok".into() } else { issues.join("; ") };
    Ok(row)
}

fn columns(a: &EstimateArgs) -> Vec<&'static str> {
    let mut c = vec!["k", "threshold", "hill", "tau", "epd_xi", "epd_delta", "bayes_xi", "bayes_delta"];
    if a.method == Method::Mcmc {
        c.extend(["hpd_lower", "hpd_upper"]);
    }
    if a.x.is_some() {
        c.extend(["p_weissman", "p_epd", "p_bayes"]);
    }
    c.push("status");
    c
}

pub fn to_csv(a: &EstimateArgs, rows: &[Row]) -> String {
    let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
    let cols = columns(a);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&cols).expect("in-memory write");
    for r in rows {
        let rec: Vec<String> = cols
            .iter()
            .map(|&c| match c {
                "k" => r.k.to_string(),
                "threshold" => format_sig(r.threshold),
                "hill" => format_sig(r.hill),
                "tau" => opt(r.tau),
                "epd_xi" => opt(r.epd_xi),
                "epd_delta" => opt(r.epd_delta),
                "bayes_xi" => opt(r.bayes_xi),
                "bayes_delta" => opt(r.bayes_delta),
                "hpd_lower" => opt(r.hpd_lower),
                "hpd_upper" => opt(r.hpd_upper),
                "p_weissman" => opt(r.p_weissman),
                "p_epd" => opt(r.p_epd),
                "p_bayes" => opt(r.p_bayes),
                _ => r.status.clone(),
            })
            .collect();
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub fn run(a: &EstimateArgs) -> CliResult<()> {
    let bytes = fs::read(&a.data)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", a.data.display())))?;
    let s = load_sample(bytes.as_slice(), a.column)?;
    let grid = validate(a, s.n())?;
    let (rho, rho_source) = a.rho.mode(a.rho_k1, a.rho_tuning).resolve(&s)?;

    let rows = grid
        .par_iter()
        .map(|&k| estimate_row(a, &s, k, rho))
        .collect::<CliResult<Vec<Row>>>()?;

    let text = match a.format {
        Format::Csv => to_csv(a, &rows),
        Format::Json => {
            let report = Report {
                n: s.n(),
                rho,
                rho_source,
                method: a.method,
                x: a.x,
                rows: &rows,
            };
            serde_json::to_string_pretty(&report).expect("report serialises") + "\n"
        }
    };
    match &a.out {
        Some(path) => {
            fs::write(path, &text)?;
            let config = serde_json::to_value(a).expect("arguments serialise");
            let mut m = RunManifest::new("estimate", config, vec![a.seed]);
            m.input_digest = Some(digest_bytes(&bytes));
            m.outputs = vec![path.clone()];
            m.write(&manifest_path(path))?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

use std::path::Path;
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use supralap_core::approx::RunConfig;
use supralap_core::dft::block_cosine;
use supralap_core::sweep::{run_cell, SweepConfig};
use supralap_core::{
    constant_model_blocks, eigenvalue_table, er_temporal, error_profile, full_spectrum,
    oracle_eigh, sales_pardo_temporal, supra_laplacian, zero_mode_basis, ConstantModelBlocks,
    ErConfig, InterLayerWeights, LayerMode, SalesPardoConfig, TemporalNetwork,
};

use crate::error::{generation, numeric, CliError};
use crate::output::{fmt_f64, sidecar, write_atomic, write_json, Csv};
use crate::{
    edgelist, ApproxArgs, Command, GenArgs, Method, Model, ReducedArgs, SpectrumArgs, SweepArgs,
    DEFAULT_MAX_DENSE_ORDER, MAX_DENSE_ENV,
};

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen(a) => generate(&a),
        Command::Spectrum(a) => spectrum(&a),
        Command::Approx(a) => approx(&a),
        Command::ApproxSweep(a) => approx_sweep(&a),
        Command::Reduced(a) => reduced(&a),
    }
}

fn require<T>(value: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --model {model}")))
}

pub fn generate(a: &GenArgs) -> Result<(), CliError> {
    let weights = InterLayerWeights::uniform(a.omega, a.coupling.into())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let (layers, mut echo) = match a.model {
        Model::Er | Model::ConstantEr => {
            let name = if a.model == Model::Er {
                "er"
            } else {
                "constant-er"
            };
            let cfg = ErConfig {
                n_nodes: require(a.n, "n", name)?,
                edge_prob: require(a.p, "p", name)?,
                n_layers: require(a.t, "t", name)?,
                seed: a.seed,
            };
            let mode = if a.model == Model::Er {
                LayerMode::Independent
            } else {
                LayerMode::Replicated
            };
            let layers = er_temporal(&cfg, mode).map_err(generation)?;
            let echo =
                json!({ "model": name, "n": cfg.n_nodes, "p": cfg.edge_prob, "t": cfg.n_layers });
            (layers, echo)
        }
        Model::SalesPardo => {
            let d = SalesPardoConfig::default();
            let cfg = SalesPardoConfig {
                n_nodes: a.n.unwrap_or(d.n_nodes),
                levels: a.levels.unwrap_or(d.levels),
                branching: a.branching.unwrap_or(d.branching),
                avg_degree: a.avg_degree.unwrap_or(d.avg_degree),
                rho: a.rho.unwrap_or(d.rho),
                level_probs: a.level_probs.clone(),
                n_layers: a.t.unwrap_or(d.n_layers),
                seed: a.seed,
            };
            let probs = cfg.level_probabilities().map_err(generation)?;
            let layers = sales_pardo_temporal(&cfg).map_err(generation)?;
            let echo = json!({
                "model": "sales-pardo",
                "n": cfg.n_nodes,
                "t": cfg.n_layers,
                "levels": cfg.levels,
                "branching": cfg.branching,
                "avg_degree": cfg.avg_degree,
                "rho": cfg.rho,
                "level_probs": probs,
            });
            (layers, echo)
        }
    };
    let net = TemporalNetwork::new(layers, weights).map_err(generation)?;
    write_atomic(&a.out, edgelist::write(&net).as_bytes())?;

    let map = echo.as_object_mut().expect("object literal");
    map.insert("omega".into(), json!(a.omega));
    map.insert("coupling".into(), json!(net.weights().coupling().as_str()));
    map.insert("seed".into(), json!(a.seed));
    map.insert("out".into(), json!(a.out.display().to_string()));
    println!("{}", serde_json::to_string(&echo).expect("json value"));
    Ok(())
}

fn load(path: &Path) -> Result<TemporalNetwork, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    edgelist::read(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn dense_cap() -> Result<usize, CliError> {
    match std::env::var(MAX_DENSE_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{MAX_DENSE_ENV} must be a positive integer, got '{v}'"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_DENSE_ORDER),
    }
}

fn check_dense_order(net: &TemporalNetwork) -> Result<(), CliError> {
    let cap = dense_cap()?;
    if net.order() > cap {
        return Err(CliError::Mismatch(format!(
            "the supra-Laplacian has order {} > {cap}; raise {MAX_DENSE_ENV} to run the dense method",
            net.order()
        )));
    }
    Ok(())
}

fn constant_blocks(net: &TemporalNetwork) -> Result<ConstantModelBlocks, CliError> {
    if !net.is_constant_model() {
        return Err(CliError::Mismatch(
            "the block-DFT method needs identical layers, a uniform weight and periodic coupling"
                .into(),
        ));
    }
    let omega = net.weights().uniform_omega().expect("uniform weights");
    constant_model_blocks(&net.layers()[0], omega, net.n_layers()).map_err(numeric)
}

fn write_timing(
    out: &Path,
    command: &str,
    extra: Value,
    elapsed: Duration,
) -> Result<(), CliError> {
    let mut v = json!({ "command": command, "seconds": elapsed.as_secs_f64() });
    if let (Some(map), Value::Object(more)) = (v.as_object_mut(), extra) {
        map.extend(more);
    }
    write_json(&sidecar(out, ".timing.json"), &v)
}

pub fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let net = load(&a.input)?;
    let started = Instant::now();
    // (eigenvalue, source block, eigenvector) in ascending order
    let rows: Vec<(f64, Option<usize>, Option<Vec<f64>>)> = match a.method {
        Method::Dense => {
            check_dense_order(&net)?;
            let l = supra_laplacian(&net).map_err(numeric)?;
            let spec = oracle_eigh(&l.matrix).map_err(numeric)?;
            let m = a.top.unwrap_or(spec.len()).min(spec.len());
            (0..m)
                .map(|i| {
                    let v = a.vectors.as_ref().map(|_| spec.eigenvector(i).to_vec());
                    (spec.eigenvalues[i], None, v)
                })
                .collect()
        }
        Method::BlockDft => {
            let merged = full_spectrum(&constant_blocks(&net)?).map_err(numeric)?;
            let m = a.top.unwrap_or(merged.len()).min(merged.len());
            (0..m)
                .map(|i| {
                    let p = &merged.pairs[i];
                    let v = match a.vectors {
                        Some(_) => Some(merged.full_eigenvector(i).map_err(numeric)?),
                        None => None,
                    };
                    Ok((p.eigenvalue, Some(p.k), v))
                })
                .collect::<Result<_, CliError>>()?
        }
    };
    let elapsed = started.elapsed();

    let mut csv = Csv::new(&["index", "eigenvalue", "k", "method"]);
    for (i, (lambda, k, _)) in rows.iter().enumerate() {
        csv.row(&[
            (i + 1).to_string(),
            fmt_f64(*lambda),
            k.map_or(String::new(), |k| k.to_string()),
            a.method.as_str().to_string(),
        ]);
    }
    csv.write(&a.out)?;

    if let Some(path) = &a.vectors {
        let header: Vec<String> = (1..=rows.len()).map(|i| format!("v{i}")).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut vcsv = Csv::new(&header);
        for c in 0..net.order() {
            let cells = rows
                .iter()
                .map(|(_, _, v)| fmt_f64(v.as_ref().expect("vectors requested")[c]))
                .collect::<Vec<_>>();
            vcsv.row(&cells);
        }
        vcsv.write(path)?;
    }
    if a.timing {
        write_timing(
            &a.out,
            "spectrum",
            json!({ "method": a.method.as_str(), "order": net.order() }),
            elapsed,
        )?;
    }
    Ok(())
}

pub fn approx(a: &ApproxArgs) -> Result<(), CliError> {
    let net = load(&a.input)?;
    check_dense_order(&net)?;
    let started = Instant::now();
    let l = supra_laplacian(&net).map_err(numeric)?;
    let spec = oracle_eigh(&l.matrix).map_err(numeric)?;
    let basis = zero_mode_basis(&net).map_err(numeric)?;
    let m = a.top.min(spec.len());
    let report = error_profile(&spec, &basis, m)
        .map_err(numeric)?
        .with_thresholds(a.ratio, a.floor)
        .with_config(RunConfig {
            n_nodes: net.n_per_layer(),
            n_layers: net.n_layers(),
            edge_prob: None,
            omega: net.weights().uniform_omega(),
            coupling: net.weights().coupling(),
            seed: None,
        });
    let elapsed = started.elapsed();

    write_json(&a.out, &report)?;
    let csv_path = a.csv.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    let mut csv = Csv::new(&["index", "eigenvalue", "epsilon"]);
    for (i, (lambda, eps)) in report.eigenvalues.iter().zip(&report.errors).enumerate() {
        csv.row(&[(i + 1).to_string(), fmt_f64(*lambda), fmt_f64(*eps)]);
    }
    csv.write(&csv_path)?;
    if a.timing {
        write_timing(&a.out, "approx", json!({ "order": net.order() }), elapsed)?;
    }
    Ok(())
}

/// Parses `key=v1,v2,...` grid entries into the `p` and `omega` lists.
pub fn parse_grid(entries: &[String]) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut p = None;
    let mut omega = None;
    for entry in entries {
        let (key, values) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("grid entry '{entry}' is not key=values")))?;
        let values = values
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("grid entry '{entry}' has a bad number")))?;
        match key {
            "p" => p = Some(values),
            "omega" => omega = Some(values),
            _ => return Err(CliError::Usage(format!("unknown grid key '{key}'"))),
        }
    }
    match (p, omega) {
        (Some(p), Some(o)) if !p.is_empty() && !o.is_empty() => Ok((p, o)),
        _ => Err(CliError::Usage(
            "the grid needs both p=... and omega=...".into(),
        )),
    }
}

pub fn approx_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let (ps, omegas) = parse_grid(&a.grid)?;
    if a.seeds == 0 {
        return Err(CliError::Usage("--seeds must be positive".into()));
    }
    let order = a.n * a.t;
    let cap = dense_cap()?;
    if order > cap {
        return Err(CliError::Mismatch(format!(
            "the supra-Laplacian has order {order} > {cap}; raise {MAX_DENSE_ENV}"
        )));
    }
    let mut cfg = SweepConfig::new(a.n, a.t, a.coupling.into(), a.top.min(order));
    cfg.ratio_threshold = a.ratio;
    cfg.abs_floor = a.floor;
    let seeds: Vec<u64> = (a.seed_start..a.seed_start + a.seeds).collect();

    let started = Instant::now();
    let mut csv = Csv::new(&["p", "omega", "index", "mean_epsilon", "sd_epsilon"]);
    let mut cells = Vec::new();
    for &p in &ps {
        for &omega in &omegas {
            let cell = run_cell(&cfg, p, omega, &seeds).map_err(|e| match e {
                supralap_core::Error::GenerationFailed { .. } => {
                    CliError::Generation(e.to_string())
                }
                other => numeric(other),
            })?;
            for (i, (mean, sd)) in cell.mean_errors.iter().zip(&cell.sd_errors).enumerate() {
                csv.row(&[
                    fmt_f64(p),
                    fmt_f64(omega),
                    (i + 1).to_string(),
                    fmt_f64(*mean),
                    fmt_f64(*sd),
                ]);
            }
            cells.push(json!({
                "p": p,
                "omega": omega,
                "n_seeds": cell.n_seeds,
                "mean_index": cell.mean_index,
                "sd_index": cell.sd_index,
                "n_detected": cell.n_detected,
                "seeds": cell.runs.iter().map(|r| r.seed).collect::<Vec<_>>(),
                "lambda_star_index": cell.runs.iter().map(|r| r.lambda_star_index).collect::<Vec<_>>(),
                "effective_index": cell.runs.iter().map(|r| r.effective_index).collect::<Vec<_>>(),
            }));
        }
    }
    csv.write(&a.out)?;
    if let Some(path) = &a.summary {
        let summary = json!({ "config": cfg, "cells": cells });
        write_json(path, &summary)?;
    }
    if a.timing {
        write_timing(
            &a.out,
            "approx-sweep",
            json!({ "order": order }),
            started.elapsed(),
        )?;
    }
    Ok(())
}

pub fn reduced(a: &ReducedArgs) -> Result<(), CliError> {
    let net = load(&a.input)?;
    let blocks = constant_blocks(&net)?;
    let started = Instant::now();
    let m = a.top.min(net.n_per_layer());
    let table = eigenvalue_table(&blocks, m).map_err(numeric)?;
    let elapsed = started.elapsed();
    let t = net.n_layers();
    let mut csv = Csv::new(&["k", "j", "eigenvalue", "cos"]);
    for k in 0..t {
        let c = fmt_f64(block_cosine(k, t));
        for (j, lambda) in table.column(k).iter().enumerate() {
            csv.row(&[
                k.to_string(),
                (j + 1).to_string(),
                fmt_f64(*lambda),
                c.clone(),
            ]);
        }
    }
    csv.write(&a.out)?;
    if a.timing {
        write_timing(&a.out, "reduced", json!({ "order": net.order() }), elapsed)?;
    }
    Ok(())
}

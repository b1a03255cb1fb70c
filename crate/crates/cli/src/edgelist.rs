//! The layered edge-list text format.
//!
//! ```text
//! # supralap v1 N=<int> T=<int>
//! t i j                      one line per edge, 1-based layer, 0-based nodes, i < j
//! # weights uniform <path|periodic>
//! <omega>
//! ```
//!
//! or, for per-node weights, `# weights per-node <coupling>` followed by
//! lines `t i omega` giving the weight of node `i` between layers `t` and
//! `t + 1` (pair `T` wraps to layer 1 under periodic coupling). Pairs that
//! are not listed default to zero. A file without a weight section is read
//! as uncoupled path layers.

use std::fmt::Write as _;

use supralap_core::{Coupling, InterLayerWeights, LayerGraph, TemporalNetwork, WeightMode};

use crate::output::fmt_f64;

const MAGIC: &str = "# supralap v1";

pub fn write(net: &TemporalNetwork) -> String {
    let (n, t) = (net.n_per_layer(), net.n_layers());
    let mut out = format!("{MAGIC} N={n} T={t}\n");
    for (l, layer) in net.layers().iter().enumerate() {
        for (i, j) in layer.edges() {
            writeln!(out, "{} {i} {j}", l + 1).unwrap();
        }
    }
    let w = net.weights();
    let coupling = w.coupling().as_str();
    match w.mode() {
        WeightMode::Uniform(omega) => {
            writeln!(out, "# weights uniform {coupling}\n{}", fmt_f64(*omega)).unwrap();
        }
        WeightMode::PerNode(table) => {
            writeln!(out, "# weights per-node {coupling}").unwrap();
            for (p, row) in table.iter().enumerate() {
                for (i, omega) in row.iter().enumerate() {
                    writeln!(out, "{} {i} {}", p + 1, fmt_f64(*omega)).unwrap();
                }
            }
        }
    }
    out
}

pub fn read(text: &str) -> Result<TemporalNetwork, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or("empty file")?;
    let (n, t) = parse_header(header)?;
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t];
    let mut weights: Option<(bool, Coupling)> = None;
    let mut weight_lines = Vec::new();

    for (no, line) in lines {
        let err = |msg: &str| format!("line {no}: {msg}: '{line}'");
        if let Some(rest) = line.strip_prefix("# weights") {
            if weights.is_some() {
                return Err(err("duplicate weight section"));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let [mode, coupling] = parts[..] else {
                return Err(err("expected '# weights <uniform|per-node> <coupling>'"));
            };
            let per_node = match mode {
                "uniform" => false,
                "per-node" => true,
                _ => return Err(err("unknown weight mode")),
            };
            let coupling = coupling
                .parse::<Coupling>()
                .map_err(|e| err(&e.to_string()))?;
            weights = Some((per_node, coupling));
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if weights.is_some() {
            weight_lines.push((no, fields));
            continue;
        }
        let [l, i, j] = fields[..] else {
            return Err(err("expected 't i j'"));
        };
        let l: usize = l.parse().map_err(|_| err("bad layer"))?;
        let i: usize = i.parse().map_err(|_| err("bad node"))?;
        let j: usize = j.parse().map_err(|_| err("bad node"))?;
        if l == 0 || l > t {
            return Err(err("layer out of range"));
        }
        if i >= j || j >= n {
            return Err(err("expected 0 <= i < j < N"));
        }
        edges[l - 1].push((i, j));
    }

    let layers = edges
        .iter()
        .enumerate()
        .map(|(l, e)| LayerGraph::from_edges(n, e).map_err(|err| format!("layer {}: {err}", l + 1)))
        .collect::<Result<Vec<_>, _>>()?;

    let weights = match weights {
        None => InterLayerWeights::uniform(0.0, Coupling::Path),
        Some((false, coupling)) => {
            let [(no, ref fields)] = weight_lines[..] else {
                return Err("uniform weight section needs exactly one value".into());
            };
            let [omega] = fields[..] else {
                return Err(format!("line {no}: expected a single weight"));
            };
            let omega: f64 = omega
                .parse()
                .map_err(|_| format!("line {no}: bad weight"))?;
            InterLayerWeights::uniform(omega, coupling)
        }
        Some((true, coupling)) => {
            let pairs = coupling.n_pairs(t);
            let mut table = vec![vec![0.0; n]; pairs];
            for (no, fields) in &weight_lines {
                let [p, i, omega] = fields[..] else {
                    return Err(format!("line {no}: expected 't i omega'"));
                };
                let p: usize = p.parse().map_err(|_| format!("line {no}: bad layer"))?;
                let i: usize = i.parse().map_err(|_| format!("line {no}: bad node"))?;
                let omega: f64 = omega
                    .parse()
                    .map_err(|_| format!("line {no}: bad weight"))?;
                if p == 0 || p > pairs || i >= n {
                    return Err(format!("line {no}: pair or node out of range"));
                }
                table[p - 1][i] = omega;
            }
            InterLayerWeights::per_node(table, coupling)
        }
    }
    .map_err(|e| e.to_string())?;

    TemporalNetwork::new(layers, weights).map_err(|e| e.to_string())
}

fn parse_header(line: &str) -> Result<(usize, usize), String> {
    let rest = line
        .strip_prefix(MAGIC)
        .ok_or_else(|| format!("missing '{MAGIC} N=<int> T=<int>' header"))?;
    let mut n = None;
    let mut t = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("N", v)) => n = v.parse().ok(),
            Some(("T", v)) => t = v.parse().ok(),
            _ => return Err(format!("unexpected header field '{field}'")),
        }
    }
    match (n, t) {
        (Some(n), Some(t)) if n > 0 && t > 0 => Ok((n, t)),
        _ => Err("header needs positive N and T".into()),
    }
}

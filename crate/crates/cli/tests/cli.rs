use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use supralap_cli::edgelist;

fn supralap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supralap"))
        .args(args)
        .output()
        .expect("run supralap")
}

fn ok(args: &[&str]) -> Output {
    let out = supralap(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(args: &[&str]) -> i32 {
    supralap(args).status.code().expect("exit code")
}

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_owned()
    }
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_owned();
    let rows = lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn gen_constant(dir: &Dir, name: &str, n: &str, t: &str, omega: &str) -> String {
    let out = dir.s(name);
    ok(&[
        "gen",
        "--model",
        "constant-er",
        "--n",
        n,
        "--p",
        "0.3",
        "--t",
        t,
        "--omega",
        omega,
        "--coupling",
        "periodic",
        "--seed",
        "1",
        "--out",
        &out,
    ]);
    out
}

#[test]
fn gen_er_writes_all_layers_deterministically() {
    let dir = Dir::new();
    let args = |out: &str| {
        vec![
            "gen".to_owned(),
            "--model".into(),
            "er".into(),
            "--n".into(),
            "100".into(),
            "--p".into(),
            "0.1".into(),
            "--t".into(),
            "30".into(),
            "--omega".into(),
            "0.01".into(),
            "--coupling".into(),
            "path".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            out.to_owned(),
        ]
    };
    let a = dir.s("a.txt");
    let b = dir.s("b.txt");
    let out = ok(&args(&a).iter().map(String::as_str).collect::<Vec<_>>());
    ok(&args(&b).iter().map(String::as_str).collect::<Vec<_>>());

    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("# supralap v1 N=100 T=30\n"));
    let net = edgelist::read(&text).unwrap();
    assert_eq!(net.n_layers(), 30);
    assert_eq!(edgelist::write(&net), text);

    let echo: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(echo["model"], "er");
    assert_eq!(echo["t"], 30);
    assert_eq!(echo["seed"], 7);
    assert_eq!(echo["coupling"], "path");
}

#[test]
fn gen_sales_pardo_round_trips() {
    let dir = Dir::new();
    let out = dir.s("sp.txt");
    ok(&[
        "gen",
        "--model",
        "sales-pardo",
        "--n",
        "64",
        "--t",
        "3",
        "--level-probs",
        "0.98,0.9,0.005",
        "--omega",
        "0.1",
        "--seed",
        "3",
        "--out",
        &out,
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let net = edgelist::read(&text).unwrap();
    assert_eq!(net.n_per_layer(), 64);
    assert_eq!(edgelist::write(&net), text);
}

#[test]
fn dense_and_block_dft_agree() {
    let dir = Dir::new();
    let input = gen_constant(&dir, "c.txt", "20", "6", "1");
    let dense = dir.s("dense.csv");
    let block = dir.s("block.csv");
    ok(&[
        "spectrum", "--method", "dense", "--in", &input, "--out", &dense,
    ]);
    ok(&[
        "spectrum",
        "--method",
        "block-dft",
        "--in",
        &input,
        "--out",
        &block,
        "--timing",
    ]);

    let (h1, d) = read_csv(Path::new(&dense));
    let (h2, b) = read_csv(Path::new(&block));
    assert_eq!(h1, "index,eigenvalue,k,method");
    assert_eq!(h2, h1);
    assert_eq!(d.len(), 120);
    assert_eq!(b.len(), 120);
    for (x, y) in d.iter().zip(&b) {
        let (a, c): (f64, f64) = (x[1].parse().unwrap(), y[1].parse().unwrap());
        assert!((a - c).abs() <= 1e-8);
        assert_eq!(x[2], "");
        assert_eq!(x[3], "dense");
        assert!(y[2].parse::<usize>().unwrap() < 6);
        assert_eq!(y[3], "block-dft");
    }
    let timing: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path("block.csv.timing.json")).unwrap())
            .unwrap();
    assert_eq!(timing["method"], "block-dft");
    assert!(timing["seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn top_zero_writes_header_only() {
    let dir = Dir::new();
    let input = gen_constant(&dir, "c.txt", "10", "4", "1");
    let out = dir.s("s.csv");
    ok(&[
        "spectrum", "--method", "dense", "--top", "0", "--in", &input, "--out", &out,
    ]);
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "index,eigenvalue,k,method\n"
    );
}

#[test]
fn eigenvector_sidecar_layout() {
    let dir = Dir::new();
    let input = gen_constant(&dir, "c.txt", "8", "5", "0.5");
    for method in ["dense", "block-dft"] {
        let out = dir.s("s.csv");
        let vecs = dir.s("v.csv");
        ok(&[
            "spectrum",
            "--method",
            method,
            "--top",
            "3",
            "--in",
            &input,
            "--out",
            &out,
            "--vectors",
            &vecs,
        ]);
        let (header, rows) = read_csv(Path::new(&vecs));
        assert_eq!(header, "v1,v2,v3");
        assert_eq!(rows.len(), 40);
        let col: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
        let n: f64 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }
}

#[test]
fn block_dft_rejects_non_constant_input() {
    let dir = Dir::new();
    let input = dir.s("er.txt");
    ok(&[
        "gen",
        "--model",
        "er",
        "--n",
        "10",
        "--p",
        "0.4",
        "--t",
        "4",
        "--omega",
        "1",
        "--coupling",
        "periodic",
        "--out",
        &input,
    ]);
    let out = dir.s("s.csv");
    assert_eq!(
        code(&[
            "spectrum",
            "--method",
            "block-dft",
            "--in",
            &input,
            "--out",
            &out
        ]),
        4
    );
    assert_eq!(code(&["reduced", "--in", &input, "--out", &out]), 4);
    // path coupling on identical layers is not the periodic constant model either
    let path_input = dir.s("path.txt");
    ok(&[
        "gen",
        "--model",
        "constant-er",
        "--n",
        "10",
        "--p",
        "0.4",
        "--t",
        "4",
        "--omega",
        "1",
        "--coupling",
        "path",
        "--out",
        &path_input,
    ]);
    assert_eq!(code(&["reduced", "--in", &path_input, "--out", &out]), 4);
}

#[test]
fn reduced_table_layout() {
    let dir = Dir::new();
    let input = gen_constant(&dir, "c.txt", "12", "7", "1");
    let out = dir.s("r.csv");
    ok(&["reduced", "--top", "5", "--in", &input, "--out", &out]);
    let (header, rows) = read_csv(Path::new(&out));
    assert_eq!(header, "k,j,eigenvalue,cos");
    assert_eq!(rows.len(), 35);
    let column = |k: usize| -> Vec<&str> {
        rows.iter()
            .filter(|r| r[0] == k.to_string())
            .map(|r| r[2].as_str())
            .collect()
    };
    for k in 1..7 {
        assert_eq!(column(k), column(7 - k));
    }
    let cos0: f64 = rows[0][3].parse().unwrap();
    assert_eq!(cos0, 1.0);
}

#[test]
fn approx_on_uncoupled_input() {
    let dir = Dir::new();
    let input = dir.s("u.txt");
    ok(&[
        "gen", "--model", "er", "--n", "15", "--p", "0.4", "--t", "4", "--omega", "0", "--out",
        &input,
    ]);
    let report = dir.s("report.json");
    ok(&["approx", "--top", "10", "--in", &input, "--out", &report]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["lambda_star_index"], 5);
    assert_eq!(json["ratio_threshold"], 10.0);
    assert_eq!(json["config"]["n_layers"], 4);
    let (header, rows) = read_csv(&dir.path("report.csv"));
    assert_eq!(header, "index,eigenvalue,epsilon");
    assert_eq!(rows.len(), 10);
    for r in &rows[..4] {
        assert!(r[2].parse::<f64>().unwrap() <= 1e-8);
    }
}

#[test]
fn sweep_writes_aggregate_rows() {
    let dir = Dir::new();
    let out = dir.s("sweep.csv");
    let summary = dir.s("sweep.json");
    ok(&[
        "approx-sweep",
        "--grid",
        "p=0.4,0.5",
        "omega=0.01",
        "--seeds",
        "2",
        "--n",
        "10",
        "--t",
        "3",
        "--top",
        "6",
        "--out",
        &out,
        "--summary",
        &summary,
    ]);
    let (header, rows) = read_csv(Path::new(&out));
    assert_eq!(header, "p,omega,index,mean_epsilon,sd_epsilon");
    assert_eq!(rows.len(), 2 * 6);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(json["cells"].as_array().unwrap().len(), 2);
    assert_eq!(json["cells"][0]["lambda_star_index"][0], 4);
}

#[test]
fn exit_codes() {
    let dir = Dir::new();
    let out = dir.s("x.txt");
    assert_eq!(code(&["gen", "--model", "er", "--out", &out]), 2);
    assert_eq!(code(&["gen", "--model", "nope", "--out", &out]), 2);
    assert_eq!(
        code(&["gen", "--model", "er", "--n", "10", "--p", "1.5", "--t", "2", "--out", &out]),
        2
    );
    assert_eq!(
        code(&["gen", "--model", "er", "--n", "200", "--p", "0.0001", "--t", "2", "--out", &out]),
        3
    );
    assert_eq!(
        code(&[
            "gen",
            "--model",
            "sales-pardo",
            "--n",
            "64",
            "--t",
            "2",
            "--out",
            &out
        ]),
        3
    );
    assert_eq!(
        code(&["spectrum", "--in", &dir.s("missing.txt"), "--out", &out]),
        1
    );

    std::fs::write(dir.path("bad.txt"), "not a network\n").unwrap();
    assert_eq!(
        code(&["spectrum", "--in", &dir.s("bad.txt"), "--out", &out]),
        1
    );

    let input = gen_constant(&dir, "c.txt", "10", "4", "1");
    let capped = Command::new(env!("CARGO_BIN_EXE_supralap"))
        .args([
            "spectrum", "--method", "dense", "--in", &input, "--out", &out,
        ])
        .env("SUPRALAP_MAX_DENSE_ORDER", "39")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("SUPRALAP_MAX_DENSE_ORDER"));
}

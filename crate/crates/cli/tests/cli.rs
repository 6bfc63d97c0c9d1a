use std::path::Path;
use std::process::{Command, Output};

use mcshane::export::{from_csv, NodeRecord};
use mcshane::fricke::satisfies_adjusted;
use mcshane::{Exact, FrickeParams};

fn mcshane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcshane")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn identity_exit_status_follows_tolerance() {
    assert_eq!(code(&mcshane(&["identity", "--max-depth", "12", "--tol", "1e-3"])), 0);
    let shallow = mcshane(&["identity", "--max-depth", "1"]);
    assert_eq!(code(&shallow), 1);
    assert!(stdout(&shallow).contains("deficiency"));
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(code(&mcshane(&["identity", "--a", "2", "--b", "2", "--c", "2"])), 2);
    assert_eq!(code(&mcshane(&["identity", "--a", "3", "--b", "3", "--c", "4"])), 2);
    assert_eq!(code(&mcshane(&["tree", "--precision", "32"])), 2);
    assert_eq!(code(&mcshane(&["render", "--window", "1,1,0,1"])), 2);
    assert_eq!(code(&mcshane(&["render", "--layers", "shadows"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[run]\ndepth = 3\n");
    assert_eq!(code(&mcshane(&["tree", "--config", &cfg])), 2);
}

#[test]
fn tree_csv_reads_back() {
    let o = mcshane(&["tree", "--max-z", "200"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<NodeRecord> = from_csv(&stdout(&o)).unwrap();
    let p = FrickeParams::modular();
    let zero = Exact::from_int(0);
    assert!(rows.len() > 10);
    for r in &rows {
        let t = r.triple(&zero).unwrap();
        assert!(satisfies_adjusted(&t, &p));
        assert_eq!(r.move_path().unwrap().depth(), r.depth);
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "[params]\na = \"5/2\"\nb = \"41/12\"\nc = \"89/24\"\n[run]\nmax_depth = 3\n");
    let rows = |extra: &[&str]| {
        let mut args = vec!["tree", "--config", &cfg];
        args.extend_from_slice(extra);
        let o = mcshane(&args);
        assert_eq!(code(&o), 0);
        stdout(&o).lines().count() - 1
    };
    // the minimal root has three children, every other node two
    assert_eq!(rows(&[]), 1 + 3 * 7);
    assert_eq!(rows(&["--max-depth", "2"]), 1 + 3 * 3);
}

#[test]
fn non_rational_parameters_use_reals() {
    let o = mcshane(&["identity", "--a", "2.9", "--b", "3", "--solve-c", "--precision", "128", "--max-depth", "6", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d: f64 = v["deficiency"].as_str().unwrap().parse().unwrap();
    assert!(d > 0.0 && d < 0.05, "{d}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (i, args) in [
        vec!["tree", "--max-depth", "6", "--format", "json"],
        vec!["intervals", "--max-depth", "6"],
        vec!["dimension", "--depths", "4-7"],
        vec!["scan", "--block", "LLR", "--iterations", "8"],
        vec!["render", "--max-depth", "3"],
        vec!["verify", "--samples", "200", "--nodes", "200"],
    ]
    .into_iter()
    .enumerate()
    {
        let cfg = write(dir.path(), &format!("v{i}.toml"), "[verify]\ncrossing_nodes = 50\nlayout_depth = 4\nsum_depth = 6\nbranches = 20\n");
        let run = |n: usize| {
            let out = dir.path().join(format!("out{i}-{n}"));
            let mut a = args.clone();
            let out_s = out.to_str().unwrap().to_string();
            a.extend_from_slice(&["--out", &out_s]);
            if args[0] == "verify" {
                a.extend_from_slice(&["--config", &cfg]);
            }
            let o = mcshane(&a);
            assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(out).unwrap()
        };
        let first = run(1);
        assert!(!first.is_empty());
        assert_eq!(first, run(2), "{args:?}");
    }
}

#[test]
fn verify_notices_an_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.toml", "[verify]\ncrossing_nodes = 20\nlayout_depth = 3\nsum_depth = 5\nbranches = 10\n");
    let o = mcshane(&["verify", "--samples", "50", "--nodes", "50", "--inject-fault", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_passed"], false);
    let relation = v["groups"].as_array().unwrap().iter().find(|g| g["name"] == "group-relation").unwrap();
    assert_eq!(relation["passed"], false);
}

#[test]
fn render_writes_svg() {
    let o = mcshane(&["render", "--max-depth", "2", "--layers", "uplift,punctures,hexagon"]);
    assert_eq!(code(&o), 0);
    let svg = stdout(&o);
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
}

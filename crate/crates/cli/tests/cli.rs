use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cascade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn fn_prints_curve_csv() {
    let out = cascade(&[
        "fn", "--family", "clog", "--phi", "60", "--beta", "0.2", "--points", "101",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,f_m");
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[1], "0,0");
    assert_eq!(lines[101], "1,1");
}

#[test]
fn fn_reports_fixed_points() {
    let out = cascade(&["fn", "--phi", "60", "--beta", "0.2", "--fixed-points"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let summary: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(
        summary,
        [("0", "stable"), ("0.7", "unstable"), ("1", "stable")]
    );

    let out = cascade(&["fn", "--phi", "45", "--fixed-points"]);
    assert_eq!(
        stdout(&out),
        "location,stability,derivative\ncontinuum,marginal,1\n"
    );
}

#[test]
fn fn_writes_both_tables_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = cascade(&[
        "fn",
        "--family",
        "logistic",
        "--phi",
        "40",
        "--fixed-points",
        "--out-dir",
        d,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_lines(&dir.path().join("curve.csv")).len(), 102);
    let fp = read_lines(&dir.path().join("fixed_points.csv"));
    assert_eq!(fp.len(), 2);
    assert!(fp[1].starts_with("0.5,stable,"), "{fp:?}");
}

#[test]
fn out_of_range_parameters_are_usage_errors() {
    let out = cascade(&["fn", "--phi", "30"]);
    assert_eq!(out.status.code(), Some(1));
    let out = cascade(&["fn", "--beta", "0.7"]);
    assert_eq!(out.status.code(), Some(1));
    let out = cascade(&["fn", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_defaults() {
    let out = cascade(&["fn", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("[default: 101]"));
    assert!(text.contains("[default: clog]"));

    let text = stdout(&cascade(&["sweep", "--help"]));
    for flag in [
        "--seed",
        "--workers",
        "--preset",
        "--out-dir",
        "--conditional",
    ] {
        assert!(text.contains(flag), "{flag} missing");
    }
    assert!(text.contains("[default: nearby]"));
}

#[test]
fn sweep_without_seed_is_a_usage_error() {
    let out = cascade(&["sweep"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("seed"), "{err}");
    assert!(err.contains("--help"), "{err}");
}

#[test]
fn net_writes_edges_and_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = cascade(&[
        "net",
        "--n",
        "64",
        "--attach",
        "2",
        "--seed",
        "3",
        "--out-dir",
        d,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let edges = read_lines(&dir.path().join("edges.csv"));
    assert_eq!(edges[0], "src,dst");
    assert_eq!(edges.len() - 1, 3 + 2 * 61);
    let nodes = read_lines(&dir.path().join("nodes.csv"));
    assert_eq!(nodes[0], "id,degree");
    let degree_sum: usize = nodes[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(degree_sum, 2 * (edges.len() - 1));

    let again = cascade(&["net", "--n", "64", "--attach", "2", "--seed", "3"]);
    assert_eq!(
        stdout(&again),
        fs::read_to_string(dir.path().join("edges.csv")).unwrap()
    );
}

#[test]
fn run_dumps_a_node_table() {
    let args = [
        "run",
        "--scenario",
        "nearby",
        "--phi",
        "90",
        "--degree",
        "3",
        "--seed",
        "7",
        "--dump-nodes",
    ];
    let out = cascade(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,degree,beta,distance,m_final");
    assert_eq!(lines.len(), 257);

    let rows: Vec<Vec<f64>> = lines[1..]
        .iter()
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let innovators: Vec<&Vec<f64>> = rows.iter().filter(|r| r[3] == 0.0).collect();
    assert_eq!(innovators.len(), 1);
    assert_eq!(innovators[0][1], 3.0);
    assert!(rows
        .iter()
        .all(|r| r[2].abs() <= 0.5 && (0.0..=1.0).contains(&r[4])));
    let beta_sum: f64 = rows.iter().map(|r| r[2]).sum();
    assert!(beta_sum.abs() < 1e-9);

    // Same seed, same table.
    assert_eq!(stdout(&cascade(&args)), text);
}

#[test]
fn run_writes_trajectory_and_nodes_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = cascade(&[
        "run",
        "--scenario",
        "hubs",
        "--phi",
        "80",
        "--degree",
        "2",
        "--seed",
        "11",
        "--max-iters",
        "50",
        "--dump-nodes",
        "--dump-trajectory",
        "--out-dir",
        d,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let traj = read_lines(&dir.path().join("trajectory.csv"));
    assert_eq!(traj[0], "t,mbar");
    assert_eq!(traj[1], format!("0,{}", 1.0 / 256.0));
    assert!(traj.len() <= 52);
    assert_eq!(read_lines(&dir.path().join("nodes.csv")).len(), 257);
    assert!(dir.path().join("edges.csv").exists());
}

#[test]
fn run_requires_an_angle_unless_neutral() {
    let out = cascade(&[
        "run",
        "--scenario",
        "random",
        "--degree",
        "3",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = cascade(&[
        "run",
        "--scenario",
        "neutral",
        "--degree",
        "3",
        "--seed",
        "1",
        "--max-iters",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn sweep_writes_cells_runs_and_conditional() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cfg = dir.path().join("sweep.conf");
    fs::write(
        &cfg,
        "# small sweep\nscenario = random\nphi = 80,90\nruns = 3\nseed = 99\n",
    )
    .unwrap();
    let out = cascade(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--degrees",
        "2,4",
        "--max-iters",
        "200",
        "--conditional",
        "survival",
        "--out-dir",
        d,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cells = read_lines(&dir.path().join("cells.csv"));
    assert_eq!(cells.len(), 5);
    assert!(cells[1].starts_with("80,2,3,"), "{}", cells[1]);
    let runs = read_lines(&dir.path().join("runs.csv"));
    assert_eq!(
        runs[0],
        "scenario,phi_deg,degree,run_index,mbar_final,t_final,outcome"
    );
    assert_eq!(runs.len(), 13);
    assert!(runs[1..].iter().all(|l| l.starts_with("random,")));
    let cond = read_lines(&dir.path().join("conditional.csv"));
    assert_eq!(
        cond[0],
        "degree,runs,cascades,p_cascade_given_degree,p_degree_given_cascade"
    );
    assert_eq!(cond.len(), 3);

    // A flag overrides the file.
    let out = cascade(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--degrees",
        "2",
        "--phi",
        "90",
        "--max-iters",
        "200",
        "--out-dir",
        d,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_lines(&dir.path().join("cells.csv")).len(), 2);
}

#[test]
fn sweep_with_unreachable_degree_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = cascade(&[
        "sweep",
        "--scenario",
        "random",
        "--phi",
        "90",
        "--degrees",
        "200",
        "--runs",
        "2",
        "--regen-limit",
        "2",
        "--seed",
        "5",
        "--out-dir",
        d,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let runs = read_lines(&dir.path().join("runs.csv"));
    assert_eq!(runs.len(), 3);
    assert!(runs[1].ends_with("regen_failure"));
}

#[test]
fn unknown_config_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = cascade(&["sweep", "--config", cfg.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("colour"));
}

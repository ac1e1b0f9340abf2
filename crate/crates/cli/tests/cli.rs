use std::path::Path;
use std::process::{Command, Output};

use imcmc::targets::ar1_generate;

fn imcmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imcmc")).args(args).env_remove("IMCMC_SEED").output().expect("spawn imcmc")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sample_writes_traces_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = imcmc(&[
        "sample", "--kind", "hmc", "--target", "mog2", "--steps", "1000", "--chains", "2", "--seed", "7", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = std::fs::read_to_string(out.join("chain_000.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("step,accepted,x_0,x_1"));
    // without --burn-in a 1000-step run drops its first 100 steps
    assert!(lines.next().unwrap().starts_with("100,"));
    assert_eq!(trace.lines().count(), 901);
    assert!(out.join("chain_001.csv").exists());
    let s = json(&out.join("summary.json"));
    assert_eq!(s["kind"], "hmc");
    assert_eq!(s["chains"], 2);
    assert!(s["ess"]["mean"].as_f64().unwrap() > 0.0);
    assert!(s["ess"]["std"].as_f64().is_some());
}

#[test]
fn same_seed_gives_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let o = imcmc(&[
            "sample", "--kind", "irr_nice_mc", "--alpha", "0.8", "--steps", "600", "--burn-in", "100", "--chains", "3",
            "--seed", "11", "--jobs", jobs, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (0..3).map(|i| std::fs::read(out.join(format!("chain_{i:03}.csv"))).unwrap()).collect::<Vec<_>>()
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "3"));
    assert_ne!(a[0], a[1]);
}

#[test]
fn summary_records_resolved_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = imcmc(&[
        "sample", "--kind", "irr_nice_mc", "--steps", "300", "--burn-in", "50", "--chains", "1", "--format", "summary",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(&out.join("summary.json"));
    assert_eq!(s["params"]["alpha"], 0.8);
    assert_eq!(s["seed"], 0);
    assert!(!out.join("chain_000.csv").exists());
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = Command::new(env!("CARGO_BIN_EXE_imcmc"))
        .args(["sample", "--kind", "rwm", "--steps", "300", "--burn-in", "50", "--chains", "1", "--out"])
        .arg(&out)
        .env("IMCMC_SEED", "42")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&out.join("summary.json"))["seed"], 42);
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("r");
    std::fs::write(
        &cfg,
        format!("kind = \"mala\"\ntarget = \"normal\"\ndim = 3\neps = 0.5\nsteps = 400\nburn-in = 100\nchains = 2\nseed = 5\nout = \"{}\"\n", out.display()),
    )
    .unwrap();
    let o = imcmc(&["sample", "--config", cfg.to_str().unwrap(), "--eps", "0.3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(&out.join("summary.json"));
    assert_eq!(s["params"]["eps"], 0.3);
    assert_eq!(s["dims"], 3);
    assert_eq!(s["seed"], 5);
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["sample", "--kind", "nope"][..],
        &["sample", "--kind", "hmc", "--steps", "100", "--burn-in", "100"],
        &["sample", "--kind", "hmc", "--chains", "0"],
        &["sample", "--kind", "hmc", "--target", "nowhere"],
        &["sample", "--kind", "hmc", "--set", "eps"],
        &["sample", "--kind", "gibbs", "--target", "mog2"],
        &["sample", "--kind", "rwm", "--target", "logistic", "--dataset", "/definitely/missing.csv"],
    ] {
        let o = imcmc(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn verify_exit_codes() {
    let o = imcmc(&["verify", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = imcmc(&["verify", "stationarity", "--mutant"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    assert_eq!(imcmc(&["verify"]).status.code(), Some(2));
    assert_eq!(imcmc(&["verify", ""]).status.code(), Some(2));
    let o = imcmc(&["verify", "balance", "--json"]);
    let lines: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(lines.as_array().unwrap().iter().all(|l| l["pass"] == true));
}

fn write_series(path: &Path, s: &[f64]) {
    let mut text = String::from("step,accepted,x_0\n");
    for (i, a) in s.iter().enumerate() {
        text.push_str(&format!("{i},1,{a}\n"));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn ess_of_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let n = 100_000;
    for (rho, want) in [(0.5, 1.0 / 3.0), (0.0, 1.0)] {
        let p = dir.path().join(format!("ar{rho}.csv"));
        write_series(&p, &ar1_generate(rho, n, 3));
        let o = imcmc(&["ess", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let ratio = r["ess"].as_f64().unwrap() / n as f64;
        assert!((ratio - want).abs() / want < 0.2, "rho {rho}: {ratio}");
        assert_eq!(r["n"], n);
    }
    let short = dir.path().join("short.csv");
    write_series(&short, &[0.1, 0.4, -0.2, 0.3]);
    assert_eq!(imcmc(&["ess", short.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(imcmc(&["ess", dir.path().join("none.csv").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn ess_of_sampler_trace_with_burn_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = imcmc(&["sample", "--kind", "mala", "--steps", "2000", "--burn-in", "0", "--chains", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = imcmc(&["ess", out.join("chain_000.csv").to_str().unwrap(), "--burn-in", "500"]);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["n"], 1500);
    assert_eq!(r["dims"], 2);
}

#[test]
fn bench_emits_table() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bench/table.csv");
    let o = imcmc(&[
        "bench", "--samplers", "mala,irr_mala", "--chains", "3", "--steps", "500", "--burn-in", "100", "--seed", "2",
        "--out", file.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sampler,target,chains,n,ess_mean,ess_std,ess_per_sec_mean,ess_per_sec_std,accept_rate_mean");
    assert!(lines[1].starts_with("mala,mog2,3,400,"));
    assert!(lines[2].starts_with("irr_mala,mog2,3,400,"));
    assert_eq!(std::fs::read_to_string(&file).unwrap(), text);

    let o = imcmc(&["bench", "--samplers", "mala", "--chains", "2", "--steps", "300", "--burn-in", "50", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["sampler"], "mala");
    assert!(rows[0]["ess_std"].as_f64().is_some());
}

#[test]
fn bench_missing_dataset_is_an_error() {
    let o = imcmc(&["bench", "--target", "logistic", "--dataset", "/no/such/german.csv", "--chains", "2", "--steps", "300", "--burn-in", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not found"));
}

#[test]
fn transdimensional_trace_leaves_missing_cells_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = imcmc(&["sample", "--kind", "nrj", "--target", "nested", "--steps", "3000", "--burn-in", "500", "--chains", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = std::fs::read_to_string(out.join("chain_000.csv")).unwrap();
    assert!(trace.starts_with("step,accepted,x_0,x_1\n500,"));
    assert!(trace.lines().any(|l| l.ends_with(',')));
    let s = json(&out.join("summary.json"));
    let p = s["model_probs"].as_array().unwrap();
    assert_eq!(p.len(), 2);
}

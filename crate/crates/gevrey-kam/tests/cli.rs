use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("gevrey-kam-cli-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&p);
        std::fs::create_dir_all(&p).unwrap();
        Scratch(p)
    }

    fn run(&self, cmd: &str, cfg: &str) -> Output {
        let path = self.0.join("exp.cfg");
        std::fs::write(&path, cfg).unwrap();
        Command::new(env!("CARGO_BIN_EXE_gevrey-kam"))
            .args([cmd, "--config"])
            .arg(&path)
            .arg("--out")
            .arg(self.0.join("out"))
            .args(["--threads", "1"])
            .output()
            .unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&self.text(name)).unwrap()
    }

    fn text(&self, name: &str) -> String {
        std::fs::read_to_string(self.out().join(name)).unwrap()
    }

    fn out(&self) -> PathBuf {
        self.0.join("out")
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn reduce_amo_trace() {
    let s = Scratch::new("reduce");
    let o = s.run("reduce", "alpha = golden\npotential = amo: 1e-5\nenergy = 0.6180339887498949\nr0 = 0.5\nr = 0.25\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = s.json("trace.json");
    assert!(j["trace"]["steps"].as_array().unwrap().len() >= 3);
    assert_eq!(j["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(j["meta"]["config_hash"].as_str().unwrap().len(), 64);
    let step = &j["trace"]["steps"][0];
    for key in ["j", "r_j", "eps_j", "N_j", "case", "n_star", "norms", "residual"] {
        assert!(step.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn reduce_zero_perturbation() {
    let s = Scratch::new("zero");
    let o = s.run("reduce", "alpha = golden\npotential = zero\nenergy = 0.5\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(s.json("trace.json")["trace"]["steps"].as_array().unwrap().is_empty());
}

#[test]
fn schema_errors_exit_2() {
    let s = Scratch::new("schema");
    let o = s.run("reduce", "alpha = golden\npotential = zero\nenergy = 0.5\nbogus = 1\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
    let o = s.run("gaps", "alpha = golden\npotential = amo: 0.25\nr0 = 0.5\nr = 0.6\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r0"));
    let o = s.run("gaps", "alpha = golden\npotential = amo: 0.25\nlabel_tol = -1\n");
    assert_eq!(o.status.code(), Some(2));
    let o = s.run("thickness", "cantor_level = 2\nlambda = 1\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gaps_free_operator_is_empty() {
    let s = Scratch::new("gaps0");
    let o = s.run("gaps", "alpha = golden\npotential = zero\nk_max = 3\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = s.text("gaps.csv");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, vec!["k,E_minus,E_plus,length,bound,pass"]);
    assert!(s.json("decay.json")["pass_fraction"].is_null());
}

#[test]
fn gaps_amo_records() {
    let s = Scratch::new("gaps");
    let o = s.run("gaps", "alpha = golden\npotential = amo: 0.25\nk_max = 4\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = s.text("gaps.csv");
    let rows: Vec<Vec<&str>> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').collect()).collect();
    assert!(rows.len() >= 4);
    for r in &rows {
        let (lo, hi): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(lo < hi);
        assert_eq!(r[5], "true");
    }
}

#[test]
fn interval_free_operators() {
    let s = Scratch::new("iv0");
    let o = s.run("interval", "alpha = golden\npotential_1 = zero\npotential_2 = zero\nk_max = 2\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = s.json("interval.json");
    assert_eq!(j["verdict"], "interval");
    let sum = j["report"]["sum"].as_array().unwrap();
    assert_eq!(sum.len(), 1);
    assert!((sum[0][0].as_f64().unwrap() + 4.0).abs() < 1e-6);
    assert!((sum[0][1].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert_eq!(j["report"]["components"][0]["thickness"]["tau"], "inf");
}

#[test]
fn interval_planted_violation() {
    let s = Scratch::new("ivbad");
    let o = s.run("interval", "set_1 = [[0, 0.1], [2, 3]]\nset_2 = [[0, 0.1], [2, 3]]\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = s.json("interval.json");
    assert_eq!(j["verdict"], "fail");
    assert!(!j["report"]["newhouse"]["violations"].as_array().unwrap().is_empty());
    assert_eq!(j["report"]["components"][0]["thickness"]["witness"]["gap"][0], 0.1);
}

#[test]
fn duality_free_operator() {
    let s = Scratch::new("dual0");
    let o = s.run("duality", "alpha = golden\npotential = zero\nlambda = 3\nenergy = 0.5\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = s.text("eigenfunction.csv");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,re,im");
    assert_eq!(rows.len(), 2);
    let f: Vec<f64> = rows[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(f[0], 0.0);
    assert!((f[1].hypot(f[2]) - 1.0).abs() < 1e-14);
}

#[test]
fn duality_amo_dual() {
    let s = Scratch::new("dual");
    let o = s.run("duality", "alpha = golden\npotential = amo: 1\nlambda = 1e5\nenergy = -0.6180339887498949\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = s.json("duality.json");
    assert!(j["eigen"]["residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(j["goodness"]["report"]["pass"], true);
}

#[test]
fn duality_window_overflow() {
    let s = Scratch::new("dualw");
    let o = s.run("duality", "alpha = golden\npotential = amo: 1\nlambda = 1e5\nenergy = -0.6180339887498949\nwindow = 1\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("window overflow"));
}

#[test]
fn thickness_and_sumset() {
    let s = Scratch::new("sets");
    let o = s.run("thickness", "cantor_level = 3\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(s.json("thickness.json")["thickness"]["tau"], 1.0);
    let o = s.run("thickness", "set = [[0, 1]]\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(s.json("thickness.json")["thickness"]["tau"], "inf");
    let o = s.run("sumset", "set_1 = [[0, 1], [2, 3]]\nset_2 = [[0, 1], [2, 3]]\n");
    assert_eq!(o.status.code(), Some(0));
    let j = s.json("sumset.json");
    assert_eq!(j["sum"], serde_json::json!([[0.0, 6.0]]));
    assert_eq!(j["newhouse"]["pass"], true);
}

#[test]
fn threads_env() {
    let s = Scratch::new("env");
    let path = s.0.join("t.cfg");
    std::fs::write(&path, "cantor_level = 1\n").unwrap();
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_gevrey-kam"))
            .args(["thickness", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(s.0.join("o"))
            .env("THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("2").status.code(), Some(0));
    assert_eq!(run("zero").status.code(), Some(2));
}

use msing::config::RunConfig;
use std::process::{Command, Output};

fn msing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msing")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn chart_of_trivial_module() {
    let args = ["chart", "--module", "trivial", "--envelope", "1", "--window", "s=0..4,ts=0..8"];
    let a = msing(&args);
    assert_eq!(a.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let has = |s: i64, t: i64, u: i64| v["entries"].as_array().unwrap().iter().any(|e| e["s"] == s && e["t"] == t && e["u"] == u);
    assert!(has(1, 1, 0) && has(1, 2, 1));
    assert_eq!(v["window"]["s"], serde_json::json!([0, 4]));
    // byte-identical on rerun
    assert_eq!(a.stdout, msing(&args).stdout);
    let svg = msing(&["chart", "--module", "trivial", "--envelope", "1", "--format", "svg"]);
    assert!(stdout(&svg).starts_with("<svg"));
}

#[test]
fn chart_modes() {
    let o = msing(&["chart", "--module", "lens:m=2,n=6"]);
    assert_eq!(o.status.code(), Some(0));
    let o = msing(&["chart", "--module", "tower:lens:m0=0,m1=4,n=8", "--mode", "total-complex", "--format", "txt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("s=1"));
    assert_eq!(msing(&["chart", "--mode", "cobar", "--module", "lens:m=1,n=2"]).status.code(), Some(3));
    assert_eq!(msing(&["chart", "--module", "nonsense"]).status.code(), Some(3));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(msing(&["verify", "--profile", "complex", "--prime", "3"]).status.code(), Some(3));
    let o = msing(&["verify", "--suite", "adem", "--max-deg", "20", "--format", "txt"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("PASS adem/")), "{out}");
    assert_eq!(msing(&["verify", "--suite", "singer", "--profile", "real"]).status.code(), Some(3));
    assert_eq!(msing(&["verify", "--prime", "2", "--profile", "real", "--max-deg", "12"]).status.code(), Some(0));
    assert_eq!(msing(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn singer_and_resolve() {
    let o = msing(&["singer", "--construction", "small", "--module", "trivial", "--op", "Sq2", "--element", "Sq-1|1", "--format", "txt"]);
    assert_eq!(stdout(&o), "Sq1|1\n");
    let o = msing(&["singer", "--construction", "large", "--module", "trivial", "--op", "Sq1", "--element", "uv^-1|1", "--format", "txt"]);
    assert_eq!(stdout(&o), "S1|1\n");
    let o = msing(&["resolve", "--module", "trivial", "--envelope", "0", "--window", "s=0..3,ts=0..2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"], true);
    assert_eq!(v["levels"].as_array().unwrap().len(), 4);
}

#[test]
fn lin_failure_modes() {
    let o = msing(&["lin", "--window", "s=0..2,ts=0..3", "--k-max", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["axis"], "band");
    let o = msing(&["lin", "--window", "s=0..1,ts=0..2", "--k-max", "16", "--zero-map", "--format", "txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL at (0,0,0)"), "{}", stdout(&o));
    assert_eq!(msing(&["lin", "--profile", "real"]).status.code(), Some(3));
}

#[test]
fn config_file_round_trip_and_flags_win() {
    let mut c = RunConfig::default();
    c.module = "susp:1,0:bmu:-4..4".into();
    c.envelope = 1;
    c.window = msing::ext::ExtWindow::new(2, -1, 3);
    c.out = Some("x.json".into());
    c.zero_map = true;
    assert_eq!(RunConfig::from_text(&c.to_text()).unwrap(), c);

    let dir = std::env::temp_dir().join(format!("msing-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# chart config\nmodule = trivial\nenvelope = 0\nwindow = s=0..2,ts=0..2\nformat = txt\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = stdout(&msing(&["chart", "--config", cfg]));
    assert!(a.contains("envelope 0"), "{a}");
    let b = stdout(&msing(&["chart", "--config", cfg, "--envelope", "1"]));
    assert!(b.contains("envelope 1") && b.contains("u=1"), "{b}");
    std::fs::write(dir.join("bad.cfg"), "colour = blue\n").unwrap();
    assert_eq!(msing(&["chart", "--config", dir.join("bad.cfg").to_str().unwrap()]).status.code(), Some(3));
}

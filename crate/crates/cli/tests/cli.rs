use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn satplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satplan"))
        .args(args)
        .env_remove("SATPLAN_LLM_ENDPOINT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn gen_small(dir: &Path) -> String {
    let suite = dir.join("suite");
    let s = suite.to_str().unwrap().to_owned();
    let out = satplan(&[
        "gen", "--rows", "12", "--cols", "12", "--maps", "3", "--pairs", "2", "--min-separation", "5",
        "--seed", "9", "--out", &s,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    s
}

fn write_map(dir: &Path, name: &str, blocked: &str) -> String {
    let path = dir.join(name);
    fs::write(
        &path,
        format!(r#"{{"format":"hexmap/v1","rows":3,"cols":4,"map_id":"m","blocked":[{blocked}]}}"#),
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (sa, sb) = (gen_small(a.path()), gen_small(b.path()));
    let manifest = |s: &str| fs::read(Path::new(s).join("manifest.json")).unwrap();
    assert_eq!(manifest(&sa), manifest(&sb));
    for i in 0..3 {
        let m = json(&Path::new(&sa).join("manifest.json"));
        let file = m["maps"][i]["file"].as_str().unwrap().to_owned();
        assert_eq!(fs::read(Path::new(&sa).join(&file)).unwrap(), fs::read(Path::new(&sb).join(&file)).unwrap());
    }
}

#[test]
fn run_on_open_map_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_map(dir.path(), "open.json", "");
    let render = dir.path().join("r.txt");
    let out = satplan(&[
        "run", "--map", &map, "--start", "0,0", "--goal", "2,2", "--render", render.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let trace: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(trace["outcome"], "success");
    let picture = fs::read_to_string(render).unwrap();
    assert_eq!(picture.lines().count(), 3);
    assert!(picture.contains('S') && picture.contains('G'));
}

#[test]
fn sealed_goal_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_map(dir.path(), "sealed.json", "[1,2],[2,1],[3,1]");
    for planner in ["satplanner", "astar"] {
        let out = satplan(&["run", "--map", &map, "--start", "0,0", "--goal", "2,2", "--planner", planner]);
        assert_eq!(code(&out), 1, "{planner}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_map(dir.path(), "open.json", "");
    let http = satplan(&["run", "--map", &map, "--start", "0,0", "--goal", "2,2", "--backend", "http"]);
    assert_eq!(code(&http), 2);
    assert!(String::from_utf8_lossy(&http.stderr).contains("SATPLAN_LLM_ENDPOINT"));

    let out = dir.path().join("x").to_str().unwrap().to_owned();
    assert_eq!(code(&satplan(&["gen", "--density", "1.5", "--out", &out])), 2);
    assert_eq!(code(&satplan(&["run", "--map", "/nonexistent/map.json"])), 2);
    assert_eq!(code(&satplan(&["frobnicate"])), 2);
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let suite = gen_small(dir.path());
    let out = satplan(&["bench", "--suite", &suite, "--out", "/proc/satplan/report.json"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn bench_ablate_and_scaling_reports() {
    let dir = tempfile::tempdir().unwrap();
    let suite = gen_small(dir.path());
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();

    let bench = satplan(&["bench", "--suite", &suite, "--out", &p("bench.json"), "--csv", &p("bench.csv"), "--jobs", "2"]);
    assert_eq!(code(&bench), 0, "{}", String::from_utf8_lossy(&bench.stderr));
    let report = json(Path::new(&p("bench.json")));
    let names: Vec<&str> = report["planners"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["planner"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["satplanner", "astar", "dijkstra", "apf"]);
    assert_eq!(fs::read_to_string(p("bench.csv")).unwrap().lines().count(), 1 + 4 * 6);

    let ablate = satplan(&["ablate", "--suite", &suite, "--out", &p("ablate.json")]);
    assert_eq!(code(&ablate), 0);
    assert_eq!(json(Path::new(&p("ablate.json")))["planners"].as_array().unwrap().len(), 4);

    let scaling = satplan(&["scaling", "--family", "open", "--scales", "4,6,8,10", "--reps", "2", "--out", &p("scaling.json")]);
    assert_eq!(code(&scaling), 0, "{}", String::from_utf8_lossy(&scaling.stderr));
    assert_eq!(json(Path::new(&p("scaling.json")))["scaling"].as_array().unwrap().len(), 2);
}

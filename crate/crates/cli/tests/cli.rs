use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use strip_broadcast_cli::suites::{fixture_dir, render_fixture, FIXTURES};

fn broadcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_broadcast")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("broadcast-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn file(&self, name: &str, body: &str) -> String {
        let p = self.0.join(name);
        fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn size_of(out: &str) -> usize {
    out.lines()
        .find_map(|l| l.strip_prefix("size "))
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn single_point_has_size_one() {
    let dir = TempDir::new("single");
    let f = dir.file("one.inst", "format 1\nwidth 0.5\nradius 1\nsource 0\npoints 1\n0 0.2\n");
    let o = broadcast(&["solve", &f]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("size 1"), "{}", stdout(&o));
}

#[test]
fn full_set_verifies() {
    let path = fixture_dir().join("narrow.inst");
    let all: Vec<String> = (0..9).map(|i| i.to_string()).collect();
    let o = broadcast(&["verify", path.to_str().unwrap(), "--set", &all.join(",")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn invalid_set_exits_one() {
    let path = fixture_dir().join("narrow.inst");
    let o = broadcast(&["verify", path.to_str().unwrap(), "--set", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn brute_and_narrow_agree_on_generated_file() {
    let dir = TempDir::new("agree");
    let f = dir.path("g.inst");
    for seed in ["3", "4", "11"] {
        let g = broadcast(&["gen", "--kind", "random-strip", "--n", "9", "--width", "0.6", "--seed", seed, "-o", &f]);
        assert!(g.status.success());
        let a = broadcast(&["solve", &f, "--algo", "narrow"]);
        let b = broadcast(&["solve", &f, "--algo", "brute"]);
        assert_eq!(a.status.code(), b.status.code(), "seed {seed}");
        if a.status.success() {
            assert_eq!(size_of(&stdout(&a)), size_of(&stdout(&b)), "seed {seed}");
        }
    }
}

#[test]
fn infeasible_exits_two() {
    let dir = TempDir::new("infeasible");
    let f = dir.file("far.inst", "format 1\nwidth 0.5\nradius 1\nsource 0\npoints 2\n0 0\n5 0\n");
    assert_eq!(broadcast(&["solve", &f]).status.code(), Some(2));
    let h = dir.file("hops.inst", "format 1\nwidth 0.5\nradius 1\nsource 0\npoints 3\n0 0\n0.9 0\n1.8 0\n");
    assert_eq!(broadcast(&["solve", &h, "--hops", "1"]).status.code(), Some(2));
    assert_eq!(broadcast(&["solve", &h, "--hops", "2"]).status.code(), Some(0));
}

#[test]
fn malformed_file_names_line() {
    let dir = TempDir::new("bad");
    let f = dir.file("bad.inst", "format 1\nwidth abc\n");
    let o = broadcast(&["solve", &f]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("width"), "{err}");
}

#[test]
fn auto_uses_hop_solver_with_bound() {
    let path = fixture_dir().join("narrow.inst");
    let o = broadcast(&["solve", path.to_str().unwrap(), "--hops", "5"]);
    assert!(stdout(&o).contains("algorithm hop"), "{}", stdout(&o));
    let planar = fixture_dir().join("planar.inst");
    assert!(stdout(&broadcast(&["solve", planar.to_str().unwrap()])).contains("algorithm two-hop"));
    let wide = fixture_dir().join("wide.inst");
    assert!(stdout(&broadcast(&["solve", wide.to_str().unwrap()])).contains("algorithm wide"));
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new("gen");
    let (a, b) = (dir.path("a.inst"), dir.path("b.inst"));
    for out in [&a, &b] {
        let o = broadcast(&["gen", "--kind", "bundle", "--variables", "2", "--hops", "3", "-o", out]);
        assert!(o.status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.contains("points 11"));
}

#[test]
fn render_matches_goldens() {
    let dir = TempDir::new("render");
    for name in FIXTURES {
        let golden = fs::read_to_string(fixture_dir().join(format!("{name}.svg"))).unwrap();
        assert_eq!(render_fixture(name).unwrap(), golden, "{name}");
        let inst = fixture_dir().join(format!("{name}.inst"));
        let solved = stdout(&broadcast(&["solve", inst.to_str().unwrap()]));
        let set = solved.lines().find_map(|l| l.strip_prefix("active ")).unwrap().replace(' ', ",");
        let out = dir.path(&format!("{name}.svg"));
        assert!(broadcast(&["render", inst.to_str().unwrap(), "--set", &set, "-o", &out]).status.success());
        assert_eq!(fs::read_to_string(Path::new(&out)).unwrap(), golden, "{name}");
    }
}

#[test]
fn bench_runs_a_single_suite() {
    let o = broadcast(&["bench", "--suite", "density"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS density"));
    assert_eq!(broadcast(&["bench", "--suite", "nope"]).status.code(), Some(1));
}

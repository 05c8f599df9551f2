//! File formats, command-line exit codes and thread-count determinism.

use std::path::PathBuf;
use std::sync::OnceLock;

use quartic_lines::builtins;
use quartic_lines::geometry::enumerate_lines;
use quartic_lines::io::{load_model, parse_surface, LineRecord, ModelFile, SurfaceFile};
use quartic_lines::tate::WeierstrassModel;
use quartic_lines::{cli, Field};

fn scratch_dir() -> &'static std::path::Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| tempfile::tempdir().unwrap()).path()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let p = scratch_dir().join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("quartic-lines").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn surface_file_round_trip() {
    let s = builtins::s5_mu0().unwrap();
    let text = serde_json::to_string_pretty(&SurfaceFile::of(&s)).unwrap();
    let back = parse_surface(&text, "copy").unwrap();
    assert_eq!(back.poly(), s.poly());
    assert_eq!(back.field().spec(), s.field().spec());
}

#[test]
fn line_records_round_trip() {
    let s = builtins::z0().unwrap();
    let (_, lines) = enumerate_lines(&s, 2).unwrap();
    assert!(!lines.is_empty());
    for (i, l) in lines.iter().enumerate() {
        let r = LineRecord::of(i, l);
        let json = serde_json::to_string(&r).unwrap();
        let back: LineRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(&back.line().unwrap(), l);
    }
}

#[test]
fn model_file_round_trip_and_tate_command() {
    let f = Field::standard(1).unwrap();
    let m = WeierstrassModel::new(&f, [vec![1], vec![], vec![], vec![], vec![0, 0, 0, 1]], 1).unwrap();
    let p = scratch("model.json", &serde_json::to_string(&ModelFile::of(&m)).unwrap());
    let back = load_model(p.to_str().unwrap()).unwrap();
    assert_eq!(back.discriminant(), m.discriminant());
    let (code, out, err) = run(&["tate", "--model", p.to_str().unwrap(), "--place", "0x0"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("I3"), "{out}");
}

#[test]
fn lines_command_reads_surface_files() {
    let s = builtins::z0().unwrap();
    let p = scratch("z0.json", &serde_json::to_string(&SurfaceFile::of(&s)).unwrap());
    let (code, from_file, err) = run(&["lines", "--surface", p.to_str().unwrap(), "--ext", "2"]);
    assert_eq!(code, 0, "{err}");
    let (_, from_id, _) = run(&["lines", "--surface", "z0", "--ext", "2"]);
    let a: serde_json::Value = serde_json::from_str(&from_file).unwrap();
    let b: serde_json::Value = serde_json::from_str(&from_id).unwrap();
    assert_eq!(a["lines"], b["lines"]);
    let (code, csv, _) = run(&["lines", "--surface", "z0", "--ext", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().count(), b["lines"].as_array().unwrap().len() + 1);
}

#[test]
fn input_errors_exit_with_two() {
    let bad_modulus = r#"{"field": {"degree": 2, "modulus": "0x5"}, "terms": [{"exps": [4,0,0,0], "coeff": 1}]}"#;
    let p = scratch("bad-modulus.json", bad_modulus);
    let (code, _, err) = run(&["lines", "--surface", p.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("irreducible"), "{err}");

    let p = scratch("garbage.json", "{not json");
    assert_eq!(run(&["lines", "--surface", p.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["lines", "--surface", "no-such-surface"]).0, 2);
    assert_eq!(run(&["tate", "--model", "/nonexistent/model.json"]).0, 2);
    assert_eq!(run(&["verify", "nothing"]).0, 2);
    assert_eq!(run(&["lines"]).0, 2);
    assert_eq!(run(&["lines", "--surface", "fermat_char2"]).0, 2);
}

#[test]
fn verification_outcomes_set_the_exit_code() {
    let (code, out, _) = run(&["verify", "config-table"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn census_output_does_not_depend_on_thread_count() {
    let args = |t: &'static str| ["--threads", t, "census", "--surface", "s5_mu0", "--ext", "2", "--singular-ext", "1"];
    let (c1, one, _) = run(&args("1"));
    let (c2, two, _) = run(&args("2"));
    let (c3, three, _) = run(&args("3"));
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert_eq!(one, two);
    assert_eq!(one, three);
}

#[test]
fn out_flag_writes_the_report() {
    let p = scratch_dir().join("configs.json");
    let (code, _, err) = run(&["--out", p.to_str().unwrap(), "configs", "--preset", "psi-square-case", "--min-lines", "21"]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.contains("6I4"), "{text}");
}

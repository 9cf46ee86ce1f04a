use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn heptatile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heptatile"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn patch_lists_every_tile() {
    let o = heptatile(&["patch", "--apex", "G", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let tiles = stdout(&o).lines().filter(|l| l.starts_with("tile ")).count();
    assert_eq!(tiles, 1 + 3 + 8);
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(heptatile(&["patch", "--depth", "-1"]).status.code(), Some(2));
    assert_eq!(heptatile(&["--phase", "8", "patch"]).status.code(), Some(2));
    assert_eq!(heptatile(&["patch", "--apex", "Q"]).status.code(), Some(2));
    assert_eq!(heptatile(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(heptatile(&["render", "--layers", "status,nope"]).status.code(), Some(2));
}

#[test]
fn triangles_csv_has_header_and_rows() {
    let o = heptatile(&["triangles", "--length", "8", "--max-gen", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("generation,index,colour,attribute,vertex,mid,basis"));
    // Four generation-0 vertices below 8 and two of generation 1.
    assert_eq!(lines.count(), 6);
}

#[test]
fn decorate_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let patch: PathBuf = dir.path().join("p.txt");
    let o = heptatile(&["decorate", "--depth", "6", "--max-gen", "2", "--out", path_str(&patch)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let tileset = dir.path().join("p.txt.tileset");
    assert!(tileset.exists());
    let o = heptatile(&["verify", path_str(&patch), path_str(&tileset)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("OK"));

    // Point one tile at a different prototile: verification must fail.
    let text = std::fs::read_to_string(&patch).unwrap();
    let mut changed = false;
    let edited: Vec<String> = text
        .lines()
        .map(|l| {
            if !changed && l.starts_with("tile 2.") {
                if let Some(pos) = l.rfind("proto ") {
                    let id: usize = l[pos + 6..].trim().parse().unwrap();
                    changed = true;
                    return format!("{}proto {}", &l[..pos], if id == 0 { 1 } else { 0 });
                }
            }
            l.to_string()
        })
        .collect();
    assert!(changed);
    std::fs::write(&patch, edited.join("\n") + "\n").unwrap();
    let o = heptatile(&["verify", path_str(&patch), path_str(&tileset)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation"));
}

#[test]
fn verify_of_missing_file_is_a_usage_error() {
    let o = heptatile(&["verify", "/nonexistent/p", "/nonexistent/t"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_reports_targets() {
    let o = heptatile(&["catalog", "--depth", "6", "--max-gen", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("target   29"));
    assert!(text.contains("base total"));
}

#[test]
fn machine_commands() {
    let (tm, data) = (fixture("halt4.tm"), fixture("halt4.data"));
    let o = heptatile(&["compile-tm", &tm, &data]);
    assert_eq!(o.status.code(), Some(0));
    // Four instructions, two letters, one data letter.
    assert!(stdout(&o).contains(&format!("{}", 7 * 4 + 12 * 2 + 1 + 8)));

    let o = heptatile(&["simulate", &tm, &data, "--generation", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("HALTED steps=4"));

    let o = heptatile(&["reduce", &tm, &data]);
    assert_eq!(stdout(&o).trim(), "BLOCKED g=3");
    let o = heptatile(&["reduce", &fixture("loop.tm"), &fixture("loop.data")]);
    assert_eq!(stdout(&o).trim(), "EXTENSIBLE upto=9");
    let o = heptatile(&["reduce", &fixture("loop.tm"), &fixture("loop.data"), "--max-gen", "5"]);
    assert_eq!(stdout(&o).trim(), "EXTENSIBLE upto=5");
}

#[test]
fn malformed_machine_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tm");
    std::fs::write(&bad, "TM v1\nstates: a\n").unwrap();
    let o = heptatile(&["compile-tm", path_str(&bad), &fixture("halt4.data")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn render_and_schematic_write_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("d.svg");
    let o = heptatile(&[
        "render",
        "--depth",
        "4",
        "--layers",
        "status,isoclines",
        "--out",
        path_str(&svg),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.trim_end().ends_with("</svg>"));

    let o = heptatile(&["schematic", "--length", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("</svg>"));
}

#[test]
fn help_exits_zero() {
    let o = heptatile(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in [
        "patch",
        "triangles",
        "decorate",
        "catalog",
        "verify",
        "compile-tm",
        "simulate",
        "reduce",
        "render",
        "schematic",
    ] {
        assert!(stdout(&o).contains(sub), "{sub} missing from help");
    }
}

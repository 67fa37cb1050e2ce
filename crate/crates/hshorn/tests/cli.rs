use std::path::PathBuf;
use std::process::Command;

use hshorn::cli::{run, EXIT_FAIL, EXIT_OK, EXIT_UNSUPPORTED, EXIT_USAGE};

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn tmp(name: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name).to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String) {
    run(std::iter::once("hshorn").chain(args.iter().copied()))
}

fn first_line(text: &str) -> &str {
    text.lines().next().unwrap_or("")
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hshorn");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let unsat = status(&["decide", "--class", "den", "--semantics", "irrefl", "-f", &fixture("formulas/contradiction.hs")]);
    assert_eq!(unsat.status.code(), Some(EXIT_FAIL));
    assert_eq!(String::from_utf8_lossy(&unsat.stdout).lines().next(), Some("UNSAT"));
    let usage = status(&["decide", "--class", "den"]);
    assert_eq!(usage.status.code(), Some(EXIT_USAGE));
    assert!(usage.stdout.is_empty());
}

#[test]
fn decide_verdicts() {
    let contra = fixture("formulas/contradiction.hs");
    let (code, out) = call(&["decide", "--class", "den", "--semantics", "irrefl", "-f", &contra]);
    assert_eq!((code, first_line(&out)), (EXIT_FAIL, "UNSAT"));
    let teaches = fixture("formulas/teaches.hs");
    let (code, out) = call(&["decide", "--class", "dis", "--semantics", "irrefl", "-f", &teaches]);
    assert_eq!(code, EXIT_UNSUPPORTED);
    assert!(first_line(&out).starts_with("UNSUPPORTED") && out.contains("undecidable"), "{out}");
    let (code, out) = call(&["decide", "--class", "den", "--semantics", "irrefl", "-f", &teaches]);
    assert_eq!(code, EXIT_OK);
    assert!(first_line(&out).starts_with("SAT "), "{out}");
    let (code, _) = call(&["decide", "--class", "den", "--semantics", "irrefl", "--strict", "-f", &teaches]);
    assert_eq!(code, EXIT_UNSUPPORTED);
}

#[test]
fn decide_dump_reloads_through_eval() {
    for (class, sem, file) in [
        ("den", "irrefl", "formulas/teaches.hs"),
        ("den", "refl", "formulas/later.hs"),
        ("dis", "refl", "formulas/example_3_1.hs"),
        ("lin", "refl", "formulas/timetable.hs"),
    ] {
        let f = fixture(file);
        let dump = tmp(&format!("{class}-{sem}-{}.model", file.replace('/', "_")));
        let (code, out) = call(&["decide", "--class", class, "--semantics", sem, "-f", &f, "--dump-model", &dump]);
        assert_eq!(code, EXIT_OK, "{out}");
        let (code, out) = call(&["eval", "-f", &f, "-m", &dump]);
        assert_eq!(code, EXIT_OK, "{class} {sem} {file}: {out}");
        assert!(first_line(&out).starts_with("HOLDS"), "{out}");
    }
}

#[test]
fn eval_reports_failures() {
    let model = tmp("contra.model");
    std::fs::write(&model, "order: chain 2\nsemantics: refl\nstrict: false\nval p: (0,1)\n").unwrap();
    let (code, out) = call(&["eval", "-f", &fixture("formulas/contradiction.hs"), "-m", &model, "--at", "(0,1)"]);
    assert_eq!(code, EXIT_FAIL, "{out}");
    assert!(first_line(&out).starts_with("FAILS"), "{out}");
    let (code, _) = call(&["eval", "-f", &fixture("formulas/contradiction.hs"), "-m", &model, "--at", "(0,7)"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn oracle_closure_labels() {
    let f = fixture("formulas/later.hs");
    let (code, out) = call(&["oracle-closure", "-f", &f, "--chain", "3", "--semantics", "irrefl", "--seed", "(0,0)"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(first_line(&out).starts_with("CLOSURE CONSISTENT"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("(1,2):") && l.contains('q')), "{out}");
    let c = fixture("formulas/contradiction.hs");
    let (code, out) = call(&["oracle-closure", "-f", &c, "--chain", "2", "--semantics", "refl", "--seed", "(0,1)"]);
    assert_eq!((code, first_line(&out).starts_with("CLOSURE BOT")), (EXIT_FAIL, true), "{out}");
}

#[test]
fn gen_pspace_core_is_core() {
    let out_path = tmp("bouncer-pspace-core.hs");
    let (code, out) = call(&["gen", "--reduction", "pspace-core", "--tm", &fixture("tm/bouncer.tm"), "--cells", "3", "-o", &out_path]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(first_line(&out).contains("fragment=core "), "{out}");
    let (code, out) = call(&["classify", "-f", &out_path]);
    assert_eq!((code, first_line(&out)), (EXIT_OK, "FRAGMENT core"));
    let (code, _) = call(&["gen", "--reduction", "nope", "--tm", &fixture("tm/bouncer.tm"), "-o", &out_path]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn tm_run_halter() {
    let (code, out) = call(&["tm-run", "--tm", &fixture("tm/halter.tm"), "--steps", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(first_line(&out), "RUN steps=5 configurations=2 halted=true");
}

#[test]
fn verify_zones_den_irrefl() {
    let (code, out) = call(&["verify-zones", "--class", "den", "--semantics", "irrefl"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(first_line(&out).starts_with("REPORT verify-zones ok"), "{out}");
}

#[test]
fn reports_are_deterministic() {
    let f = fixture("formulas/example_3_1.hs");
    let args = ["decide", "--class", "den", "--semantics", "refl", "-f", &f];
    assert_eq!(call(&args), call(&args));
}

use std::path::{Path, PathBuf};
use std::process::Command;

fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().expect("deps directory").to_path_buf()
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bloch_scope.h");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .status()
        .expect("a C compiler");
    assert!(status.success());
}

#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = artifact_dir().join("libbloch_scope_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("bloch_scope_smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-O1"])
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("a C compiler");
    assert!(status.success(), "compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}{}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

//! Compiles `smoke.c` against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Test binaries live in <target>/<profile>/deps; the static library sits one level up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libtrustprop_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("run cc");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status.code());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        format!("{} 1.000", env!("CARGO_PKG_VERSION"))
    );
}

use std::path::PathBuf;
use std::process::Command;

fn library() -> Option<PathBuf> {
    // target/<profile>/deps/smoke-<hash> -> target/<profile>
    let profile_dir = std::env::current_exe().ok()?.parent()?.parent()?.to_path_buf();
    ["libtopics_qif_py.so", "libtopics_qif_py.dylib"].iter().map(|n| profile_dir.join(n)).find(|p| p.exists())
}

#[test]
fn python_smoke_script() {
    let Some(lib) = library() else {
        eprintln!("extension library not found next to the test binary; skipping");
        return;
    };
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../python/smoke_test.py");
    let out = match Command::new("python3").arg(&script).arg(&lib).output() {
        Ok(out) => out,
        Err(e) => {
            eprintln!("python3 unavailable ({e}); skipping");
            return;
        }
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("smoke test passed"));
}

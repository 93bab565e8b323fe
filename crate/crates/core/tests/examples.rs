use std::path::PathBuf;
use std::process::Command;

// cargo test builds the examples next to the test binaries' deps directory
fn example(name: &str) -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let dir = exe.parent().unwrap().parent().unwrap().join("examples");
    dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

#[test]
fn every_example_runs() {
    let names = [
        "phi_product", "tsvd", "transforms", "svt", "incoherence", "complete", "bounds", "metrics",
        "file_formats", "phase_transition",
    ];
    for name in names {
        let path = example(name);
        assert!(path.exists(), "{} not built", path.display());
        let out = Command::new(&path).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}

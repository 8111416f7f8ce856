use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

fn static_lib() -> PathBuf {
    let lib = target_dir().join("libggame_ffi.a");
    if !lib.exists() {
        let status = Command::new(env!("CARGO")).args(["build", "-p", "ggame-ffi"]).status().expect("run cargo build");
        assert!(status.success());
    }
    assert!(lib.exists(), "{} missing", lib.display());
    lib
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ggame.h")).unwrap();
    for name in [
        "gg_version",
        "gg_last_error_message",
        "gg_params_new",
        "gg_params_free",
        "gg_env_baseline",
        "gg_env_exogenous",
        "gg_env_market",
        "gg_env_actions",
        "gg_env_free",
        "gg_game_from_json",
        "gg_solve",
        "gg_uniqueness",
        "gg_strategy_uniqueness",
        "gg_solve_market",
        "gg_simulate_attack",
        "GG_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
#[cfg(unix)]
fn c_program_links_and_runs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ggame_smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(dir.join("include"))
        .arg(dir.join("tests/c/smoke.c"))
        .arg(static_lib())
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("run C compiler");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let lines: Vec<f64> = String::from_utf8(run.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.windows(2).all(|w| w[0] < w[1]));
}

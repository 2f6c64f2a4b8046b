use std::path::Path;
use std::process::{Command, Output};

fn beingsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beingsel")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn onemax_defaults_converge() {
    let out = beingsel(&["onemax", "--seed", "1"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("generation,best_fitness,mean_fitness\n"));
    let best = csv_column(&stdout, 1);
    assert_eq!(best.len(), 200);
    assert!(*best.last().unwrap() >= 95.0);
}

#[test]
fn quad_finds_origin() {
    let mut good = 0;
    for seed in 1..=10 {
        let out = beingsel(&["quad", "--lo", "-2", "--hi", "2", "--seed", &seed.to_string()]);
        assert!(out.status.success());
        let stderr = String::from_utf8(out.stderr).unwrap();
        let x: f64 = stderr.split_whitespace().nth(2).unwrap().parse().unwrap();
        if x.abs() < 0.05 {
            good += 1;
        }
    }
    assert!(good >= 8, "{good}/10");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(beingsel(&["select", "--bogus"]).status.code(), Some(2));
    assert_eq!(beingsel(&[]).status.code(), Some(2));
    assert_eq!(beingsel(&["quad", "--lo", "1", "--hi", "0"]).status.code(), Some(2));
}

#[test]
fn end_to_end_select_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let run = dir.path().join("run");
    assert!(beingsel(&["gen-corpus", "--seed", "3", "--out", path(&corpus)]).status.success());
    assert!(corpus.join("c11_v08.pbm").is_file());

    let out = beingsel(&["select", "--corpus", path(&corpus), "--out", path(&run), "--generations", "1", "--quiet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(run.join("history.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# seed=0");
    assert_eq!(lines[1], "generation,best_error,mean_error,best_is_pure");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].ends_with(",true"));

    let out = beingsel(&["select", "--corpus", path(&corpus), "--out", path(&run), "--generations", "6", "--seed", "4", "-q"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(run.join("history.csv")).unwrap();
    let best = csv_column(&csv, 1);
    assert_eq!(best.len(), 6);
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
    for slot in 0..12 {
        let text = std::fs::read_to_string(run.join("best_being").join(format!("slot{slot:02}.pbm"))).unwrap();
        assert!(text.starts_with("P1\n16 16\n"));
    }

    let out = beingsel(&["dump-being", "--run", path(&run), "--slot", "3", "--pbm"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, std::fs::read_to_string(run.join("best_being/slot03.pbm")).unwrap());

    let out = beingsel(&["dump-being", "--run", path(&run)]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().matches("slot").count(), 12);
    assert_eq!(beingsel(&["dump-being", "--run", path(&run), "--slot", "12"]).status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    assert!(beingsel(&["gen-corpus", "--seed", "9", "--classes", "6", "--variants", "4", "--out", path(&corpus)]).status.success());
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let run = dir.path().join(name);
        let args = ["select", "--corpus", path(&corpus), "--out", path(&run), "--generations", "5", "--seed", "2", "-q"];
        assert!(beingsel(&args).status.success());
        outputs.push(std::fs::read(run.join("history.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn train_full_reports() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("one");
    assert!(beingsel(&["gen-corpus", "--classes", "1", "--variants", "1", "--out", path(&corpus)]).status.success());

    let out = beingsel(&["train-full", "--corpus", path(&corpus)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("converged=true"), "{text}");
    let residual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("residual_error="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual < 0.05);

    let out = beingsel(&["train-full", "--corpus", path(&corpus), "--max-epochs", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("converged=false") && text.contains("epochs=0"));
}

#[test]
fn corpus_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("manifest.txt"), "classes=2\nvariants=2\n").unwrap();
    let out = beingsel(&["select", "--corpus", path(dir.path()), "--out", path(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing pattern"));
}

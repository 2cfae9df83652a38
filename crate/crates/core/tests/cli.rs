use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_legendre-parity"))
}

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn legendre_prints_symbol() {
    let o = run(&["legendre", "--p", "7", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "-1\n");
    assert_eq!(stdout(&run(&["legendre", "--p", "1000003", "0"])), "0\n");
    assert_eq!(stdout(&run(&["legendre", "--p", "1000003", "1"])), "+1\n");
}

#[test]
fn exit_codes() {
    // usage: composite modulus, bad flag, bad set spec
    assert_eq!(run(&["legendre", "--p", "15", "2"]).status.code(), Some(1));
    assert_eq!(run(&["legendre", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        run(&["charsum", "--p", "7", "--set", "list:x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["theorem1", "--p", "7", "--n", "3", "--set", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["theorem1", "--n", "4", "--c", "2", "--set", "1"])
            .status
            .code(),
        Some(1)
    );
    // data: malformed DIMACS, missing file
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cnf");
    std::fs::write(&bad, "p cnf 2 1\n1 5 0\n").unwrap();
    let o = run(&["sat", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run(&["sat", "/nonexistent.cnf"]).status.code(), Some(2));
    // capacity: oversized exhaustive prime, too many variables, exact scan at n = 16
    assert_eq!(
        run(&["charsum", "--p", "67108879", "--set", "1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["theorem1", "--n", "43", "--set", "1"]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&["sat", &data("sat/random_3cnf_n16.cnf"), "--exact-scan"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn charsum_row() {
    let o = run(&["charsum", "--p", "7", "--set", "list:1,2"]);
    assert_eq!(
        stdout(&o),
        "p,set_size,sum,bound,holds,zero_shifts\n7,2,-1,2.645751,true,2\n"
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("charsum"));
}

#[test]
fn theorem1_exact_and_sampled() {
    let o = run(&[
        "theorem1", "--p", "7", "--set", "list:1,2", "--trials", "1000",
    ]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "mode,p,set_size,odd_count,total,p_hat,std_err,seed"
    );
    assert!(lines[1].starts_with("exact,7,2,4,7,0.5714285714285714,0,0"));
    assert!(lines[2].starts_with("sampled,7,2,"));
    let o = run(&[
        "theorem1", "--p", "1000003", "--set", "list:", "--mode", "sampled",
    ]);
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        "sampled,1000003,0,0,10000,0,0,0"
    );
}

#[test]
fn sat_reports() {
    let o = run(&["sat", &data("sat/unique_model.cnf"), "--exact-scan"]);
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    // n = 2, c = 3: p = 67, unique model -> 33 odd shifts
    assert_eq!(&row[1..4], &["2", "1", "67"]);
    assert_eq!(row[4], (33.0f64 / 67.0).to_string());
    assert_eq!(row[6], "67");

    for file in std::fs::read_dir(data("unsat")).unwrap() {
        let path = file.unwrap().path();
        let o = run(&[
            "sat",
            path.to_str().unwrap(),
            "--trials",
            "500",
            "--seed",
            "9",
        ]);
        assert!(o.status.success());
        let text = stdout(&o);
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[2], "0");
        assert_eq!(row[4], "0");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vv.csv");
    let args = [
        "vv",
        "--n",
        "4",
        "--set",
        "list:1,2,3",
        "--trials",
        "300",
        "--seed",
        "2",
    ];
    let o = bin()
        .args(args)
        .args(["--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, run(&args).stdout);
}

use std::path::Path;
use std::process::{Command as Process, Output};

use holevo_cli::{parse_args, ChannelSource, Command, Fmt, ParseError, SearchKind};
use holevo_core::channel::lambda4;

const L4_AFFINE: [&str; 4] = ["--affine", "0.6 0 0;0 0.601 0;0 0 0.5", "--shift", "0.021 0 0.495"];

fn holevo(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_holevo"))
        .args(args)
        .env_remove("HOLEVO_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn argv<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["holevo"];
    v.extend_from_slice(args);
    v
}

#[test]
fn parses_the_documented_invocations() {
    let c = parse_args(argv(&["capacity", "--pauli", "0.5,0.1667,0.1667,0.1667", "--tol", "1e-6"])).unwrap();
    let Command::Capacity { channel, tol } = &c.command else { panic!("{c:?}") };
    assert_eq!(*tol, 1e-6);
    let ChannelSource::Pauli { p } = channel.source else { panic!() };
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);

    let mut args = vec!["capacity"];
    args.extend(L4_AFFINE);
    let c = parse_args(argv(&args)).unwrap();
    let Command::Capacity { channel, .. } = &c.command else { panic!() };
    assert_eq!(channel.channel, lambda4());
    assert_eq!(c.digits, 10);

    let c = parse_args(argv(&["superadd", "--mode", "random", "--samples", "10000", "--seed", "42"])).unwrap();
    let Command::Superadd { mode, samples, seed, .. } = c.command else { panic!() };
    assert_eq!((mode, samples, seed), (SearchKind::Random, 10_000, 42));
}

#[test]
fn rejects_bad_arguments() {
    assert!(matches!(parse_args(argv(&["capacity", "--bogus"])), Err(ParseError::Clap(_))));
    assert!(matches!(parse_args(argv(&["capacity"])), Err(ParseError::Invalid(_))));
    assert!(parse_args(argv(&["capacity", "--channel-file", "/nonexistent/channels.txt"])).is_err());
    assert!(parse_args(argv(&["gap", "--p", "0.5,0.5"])).is_err());
    assert!(parse_args(argv(&["gap", "--p", "0.5,0.2,0.2,0.2"])).is_err());
    assert!(parse_args(argv(&["--digits", "18", "teleport"])).is_err());
    assert!(parse_args(argv(&["superadd", "--samples", "0"])).is_err());
    assert!(parse_args(argv(&["capacity", "--affine", "1 0 0;0 1 0"])).is_err());
}

#[test]
fn help_lists_every_command() {
    let o = holevo(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for cmd in [
        "capacity",
        "engaging",
        "gap",
        "gap-scan",
        "superadd",
        "antisym",
        "lattice-convergence",
        "additivity-scan",
        "teleport",
    ] {
        assert!(text.contains(&format!("  {cmd} ")), "{cmd} missing from\n{text}");
    }
    assert_eq!(holevo(&["capacity", "--bogus"]).status.code(), Some(1));
    assert_eq!(holevo(&["capacity"]).status.code(), Some(1));
}

#[test]
fn capacity_of_the_four_input_channel() {
    let mut args = vec!["capacity"];
    args.extend(L4_AFFINE);
    let o = holevo(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("capacity         0.3214851589"), "{text}");
    assert!(text.contains("engaging inputs  4"));

    let mut args = vec!["engaging", "--json"];
    args.extend(L4_AFFINE);
    let o = holevo(&args);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["command"], "engaging");
    let rows = v["result"]["engaging"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let mut polar: Vec<f64> = rows.iter().map(|r| r["polar_deg"].as_f64().unwrap()).collect();
    polar.sort_by(f64::total_cmp);
    for (got, want) in polar.iter().zip([14.66, 78.07, 99.68, 99.68]) {
        assert!((got - want).abs() < 0.01);
    }
}

#[test]
fn gap_reports_and_signals_a_gap() {
    let o = holevo(&["gap", "--p", "0.5,0.1667,0.1667,0.1667"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("gap_holds=true"));
    assert!(text.contains("E_C              0.918"), "{text}");
    // Noiseless channel: no entanglement to compare.
    let o = holevo(&["gap", "--p", "1,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("gap_holds=false"));
}

#[test]
fn exhaustive_teleportation() {
    let o = holevo(&["teleport", "--d", "3", "--exhaustive"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains("fidelity 1.000000000")).count(), 9);
    assert!(text.contains("9 outcomes"));
}

#[test]
fn search_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let o = holevo(&[
            "superadd",
            "--samples",
            "300",
            "--seed",
            "42",
            "--threads",
            threads,
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "4");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("# holevo {"));
    assert!(header.contains("\"seed\":42"));
    assert_eq!(text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count(), 300);
}

#[test]
fn channel_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("channels.txt");
    std::fs::write(
        &file,
        "# name then matrix rows and shift, or pauli probabilities\n\
         l4 0.6 0 0 0 0.601 0 0 0 0.5 0.021 0 0.495\n\
         flip pauli 0.9 0.1 0 0\n\
         broken 0.6 0 0 0 0.601 0 0 0 0.5 0.1 0 0.495\n",
    )
    .unwrap();
    let f = file.to_str().unwrap();
    let o = holevo(&["capacity", "--channel-file", f]);
    assert!(stdout(&o).contains("0.3214851589"));
    let o = holevo(&["capacity", "--channel-file", f, "--channel-name", "flip", "--digits", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("capacity         1.000"), "{}", stdout(&o));
    // Shift 0.1 breaks complete positivity.
    let o = holevo(&["capacity", "--channel-file", f, "--channel-name", "broken"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("CPTP"));
    assert_eq!(holevo(&["capacity", "--channel-file", f, "--channel-name", "nope"]).status.code(), Some(1));
}

#[test]
fn json_record_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("antisym.json");
    let o = holevo(&["antisym", "--samples", "200", "--n", "2", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["command"], "antisym");
    assert!((v["result"]["lower_bound"].as_f64().unwrap() - 0.5849625007).abs() < 1e-9);
    assert!(v["result"]["pair_spectrum"]["entropy"].as_f64().unwrap() >= 2.0);
    assert!(v["result"]["max_reduced_eigenvalue"].as_f64().unwrap() <= 4.0 / 9.0);
    assert!(!Path::new(&path).with_extension("csv").exists());
}

#[test]
fn significant_digits() {
    assert_eq!(Fmt(10).num(0.32148515891234), "0.3214851589");
    assert_eq!(Fmt(4).num(1234.5678), "1235");
    assert_eq!(Fmt(3).num(1.0e-7), "1.00e-7");
    assert_eq!(Fmt(3).num(123456.0), "1.23e5");
    assert_eq!(Fmt(17).num(0.1), "0.10000000000000001");
    assert_eq!(Fmt(5).num(0.0), "0");
}

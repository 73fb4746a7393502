use std::process::{Command, Output};

use moonshine::chartab::CharacterTable;
use moonshine::modgroup::{load_monster_symbols, Q};
use moonshine::qseries::j_series;
use moonshine::rademacher::{bessel_i, rounded_tg_series, PrecisionConfig};
use moonshine::real::{BigReal, Real};
use moonshine_cli::commands::{self, RunConfig};
use moonshine_cli::report::{Format, Report};
use num_bigint::BigInt;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moonshine")).args(args).env_remove("MOONSHINE_DATA_DIR").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn jcoeffs_lists_exact_coefficients() {
    let csv = stdout(&["jcoeffs", "--n-max", "6", "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,c(n)");
    assert_eq!(lines[1], "-1,1");
    assert_eq!(lines[2], "0,0");
    assert_eq!(lines[3], "1,196884");
    assert_eq!(lines[8], "6,4252023300096");
    assert_eq!(lines.len(), 9);
}

#[test]
fn single_term_convergence_row() {
    // with only c = 1 the sum is 2π/√n · I_1(4π√n)
    let r = commands::convergence(&RunConfig { class: Some("1A".into()), n: vec![1, 4], cmax: vec![1], ..Default::default() }).unwrap();
    let bits = 256;
    for (k, n) in [1i64, 4].iter().enumerate() {
        let rn = BigReal::from_i64(*n, bits).sqrt();
        let two_pi = BigReal::pi(bits).ldexp(1);
        let v = two_pi.clone() / rn.clone() * bessel_i(Q::from(1), &(two_pi.ldexp(1) * rn)).unwrap();
        assert_eq!(r.rows[0][k + 1], v.to_fixed(3), "n = {n}");
    }
    assert_eq!(r.rows[1][0], "exact");
    assert_eq!(r.rows[1][1], "196884");
}

#[test]
fn tower_matches_series_oracle() {
    let r = commands::tower(&RunConfig { class: Some("1A".into()), m: 2, n_max: Some(8), ..Default::default() }).unwrap();
    let j = j_series(12);
    let sq = &j * &j;
    for row in &r.rows {
        let n: i64 = row[0].parse().unwrap();
        let want = if n == 0 { BigInt::from(0) } else { sq.coeff(n).unwrap() };
        assert_eq!(row[1], want.to_string(), "n = {n}");
    }
    assert_eq!(r.data["faber_polynomial"], serde_json::json!(["-393768", "0", "1"]));

    let one = commands::tower(&RunConfig { class: Some("1A".into()), m: 1, n_max: Some(5), ..Default::default() }).unwrap();
    assert_eq!(one.data["faber_polynomial"], serde_json::json!(["0", "1"]));
}

#[test]
fn tower_for_4b_matches_adams_route() {
    let r = commands::tower(&RunConfig { class: Some("4B".into()), m: 2, n_max: Some(6), ..Default::default() }).unwrap();
    let syms = load_monster_symbols().unwrap();
    let table = CharacterTable::bundled().unwrap();
    assert_eq!(table.power("4B", 2), Some("2A"));
    let cfg = PrecisionConfig::default();
    let (t4b, _) = rounded_tg_series(&syms["4B"], 16, &cfg).unwrap();
    let (t2a, _) = rounded_tg_series(&syms["2A"], 16, &cfg).unwrap();
    for n in 1..=6i64 {
        // 2·tr(g | V_2n) + tr(g² | V_{n/2})
        let mut want: BigInt = t4b.coeff(2 * n).unwrap() * 2;
        if n % 2 == 0 {
            want += t2a.coeff(n / 2).unwrap();
        }
        assert_eq!(r.cell(&n.to_string(), "coefficient"), Some(want.to_string().as_str()), "n = {n}");
    }
}

#[test]
fn multiplicities_report_and_json_round_trip() {
    let json = stdout(&["multiplicities", "--n-max", "4", "--chars", "1,2,6", "--format", "json"]);
    let parsed: Report = serde_json::from_str(&json).unwrap();
    let direct = commands::multiplicities(&RunConfig { n_max: Some(4), chars: vec![1, 2, 6], ..Default::default() }).unwrap();
    assert_eq!(parsed, direct);
    assert_eq!(parsed.header, ["n", "dimension", "m_1", "m_2", "m_6"]);
    assert_eq!(parsed.cell("4", "m_6"), Some("1"));
    assert_eq!(parsed.data["audit_passed"], true);
    // the dimension identity holds where only χ1..χ6 occur
    for row in &direct.rows {
        let n: i64 = row[0].parse().unwrap();
        assert_eq!(row[1], j_series(8).coeff(n).unwrap().to_string());
    }
    assert_eq!(direct.render(Format::Json), json);
}

#[test]
fn text_output_is_column_aligned() {
    let text = stdout(&["convergence", "--class", "4B", "--n", "1,5"]);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("c "));
    assert!(lines[4].starts_with("<=100  51.894"));
    assert!(lines[5].starts_with("exact  52 "));
    assert!(lines.last().unwrap().starts_with("# class 4B"));
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let args = ["convergence", "--class", "3A", "--n", "1,2,7", "--format", "json"];
    let mut outs = Vec::new();
    for threads in ["1", "3"] {
        let out = Command::new(env!("CARGO_BIN_EXE_moonshine")).args(args).env("RAYON_NUM_THREADS", threads).output().unwrap();
        assert!(out.status.success());
        outs.push(out.stdout);
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(run(&args).stdout, outs[0]);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("moonshine-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("j.csv");
    let out = run(&["jcoeffs", "--n-max", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "n,c(n)\n-1,1\n0,0\n1,196884\n2,21493760\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["convergence"]).status.code(), Some(2));
    assert_eq!(run(&["convergence", "--class", "99Z"]).status.code(), Some(2));
    assert_eq!(run(&["tower", "--class", "1A", "--m", "0", "--n-max", "3"]).status.code(), Some(2));
    assert_eq!(run(&["jcoeffs"]).status.code(), Some(2));
    assert_eq!(run(&["jcoeffs", "--n-max", "3", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["tower", "--class", "1A", "--n-max", "3", "--cmax", "10,20"]).status.code(), Some(2));
    assert_eq!(run(&["multiplicities", "--n-max", "2", "--chars", "50"]).status.code(), Some(2));
    assert_eq!(run(&["tower", "--class", "1A", "--n-max", "30", "--cmax", "20"]).status.code(), Some(3));
    assert_eq!(run(&["multiplicities", "--n-max", "2", "--chartab", "/nonexistent/table.json"]).status.code(), Some(4));
    let d = run(&["distribution", "--n-max", "2"]);
    assert_eq!(d.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&d.stderr).contains("complete table"));
}

#[test]
fn data_dir_override() {
    let dir = std::env::temp_dir().join(format!("moonshine-data-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bin = env!("CARGO_BIN_EXE_moonshine");
    let with_dir = |args: &[&str]| Command::new(bin).args(args).env("MOONSHINE_DATA_DIR", &dir).output().unwrap();

    // an empty directory is a data error
    assert_eq!(with_dir(&["convergence", "--class", "2A", "--n", "1"]).status.code(), Some(4));

    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/../moonshine/data");
    for f in ["monster_groups", "monster_partial.json"] {
        std::fs::copy(format!("{data}/{f}"), dir.join(f)).unwrap();
    }
    let out = with_dir(&["multiplicities", "--n-max", "1", "--chars", "2", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("1,196884,1\n"));

    // a damaged table is caught on load
    let text = std::fs::read_to_string(dir.join("monster_partial.json")).unwrap();
    std::fs::write(dir.join("monster_partial.json"), text.replacen("\"196883\"", "\"196884\"", 1)).unwrap();
    assert_eq!(with_dir(&["multiplicities", "--n-max", "1"]).status.code(), Some(4));
    std::fs::remove_dir_all(&dir).unwrap();
}

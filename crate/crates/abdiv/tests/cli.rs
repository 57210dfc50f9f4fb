//! End-to-end checks of the `abdiv` binary and its argument parser.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use abdiv::cli::{exit, parse_args};
use abdiv::imageio::{decode_ppm, encode_ppm};
use abdiv_core::segmentation::RgbImage;
use proptest::prelude::*;

fn abdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abdiv"))
        .args(args)
        .output()
        .expect("spawn abdiv")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn exit_codes() {
    assert_eq!(code(&abdiv(&["--help"])), exit::SUCCESS);
    assert_eq!(
        code(&abdiv(&[
            "div",
            "--spec",
            "hellinger",
            "--x",
            "1",
            "--y",
            "2"
        ])),
        exit::SUCCESS
    );
    assert_eq!(
        code(&abdiv(&["div", "--spec", "hellinger", "--x", "1"])),
        exit::USAGE
    );
    assert_eq!(
        code(&abdiv(&[
            "div", "--spec", "nonsense", "--x", "1", "--y", "2"
        ])),
        exit::USAGE
    );
    assert_eq!(code(&abdiv(&["bench", "--data", "synth"])), exit::USAGE);
    assert_eq!(
        code(&abdiv(&[
            "bench", "--data", "synth", "--seed", "1", "--bogus"
        ])),
        exit::USAGE
    );
    assert_eq!(code(&abdiv(&["frobnicate"])), exit::USAGE);
    assert_eq!(
        code(&abdiv(&[
            "div", "--spec", "dt:0.5", "--x", "-1", "--y", "2"
        ])),
        exit::DATA
    );
}

#[test]
fn missing_dataset_is_a_data_error() {
    let out = abdiv(&[
        "bench",
        "--data",
        "/definitely/missing/gene.csv",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), exit::DATA);
    assert!(String::from_utf8_lossy(&out.stderr).contains("gene.csv"));
}

#[test]
fn budget_exhaustion_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("svm.kv");
    let out = abdiv(&[
        "svm",
        "--spec",
        "euclidean",
        "--kernel",
        "direct",
        "--data",
        "cats",
        "--seed",
        "3",
        "--c",
        "100",
        "--kkt-tol",
        "1e-12",
        "--max-passes",
        "0",
        "--out",
        kv.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        exit::NOT_CONVERGED,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(fs::read_to_string(kv).unwrap().contains("converged=false"));
}

#[test]
fn help_lists_every_flag_and_the_itakura_saito_note() {
    let cases: [(&str, &[&str]); 6] = [
        ("div", &["--spec", "--x", "--y", "--p", "--q", "--weights"]),
        (
            "gram",
            &[
                "--spec",
                "--kernel",
                "--sigma",
                "--input",
                "--density",
                "--n",
                "--atoms",
                "--seed",
                "--tol",
                "--out",
            ],
        ),
        (
            "probe",
            &[
                "--spec", "--n", "--trials", "--atoms", "--seed", "--tol", "--out",
            ],
        ),
        (
            "svm",
            &[
                "--spec",
                "--kernel",
                "--data",
                "--label-column",
                "--positive",
                "--density",
                "--epsilon",
                "--seed",
                "--c",
                "--sigma",
                "--folds",
                "--train-fraction",
                "--conditioning",
                "--kkt-tol",
                "--max-passes",
                "--out",
            ],
        ),
        (
            "segment",
            &[
                "--spec",
                "--k",
                "--norm",
                "--mode",
                "--epsilon",
                "--in",
                "--out",
            ],
        ),
        (
            "bench",
            &[
                "--data",
                "--label-column",
                "--positive",
                "--density",
                "--epsilon",
                "--seed",
                "--c",
                "--sigma",
                "--folds",
                "--train-fraction",
                "--conditioning",
                "--kkt-tol",
                "--max-passes",
                "--out-dir",
                "--stem",
            ],
        ),
    ];
    for (cmd, flags) in cases {
        let out = abdiv(&[cmd, "--help"]);
        assert_eq!(code(&out), exit::SUCCESS);
        let help = String::from_utf8(out.stdout).unwrap();
        for flag in flags {
            assert!(
                help.contains(&format!("{flag} ")),
                "`{cmd} --help` lacks {flag}"
            );
        }
        if cmd != "bench" {
            assert!(
                help.contains("itakura-saito") && help.contains("dt:-0.5"),
                "{cmd}"
            );
        } else {
            assert!(help.contains("Itakura-Saito = dt:-0.5"));
        }
    }
}

#[test]
fn gram_from_csv_input() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    fs::write(&csv, "a,b,c\n1,2,3\n3,2,1\n1,1,1\n").unwrap();
    let matrix = dir.path().join("g.csv");
    let out = abdiv(&[
        "gram",
        "--spec",
        "hellinger-dt",
        "--kernel",
        "gaussian",
        "--sigma",
        "1",
        "--input",
        csv.to_str().unwrap(),
        "--out",
        matrix.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), exit::SUCCESS);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict=psd"), "{stdout}");
    let rows: Vec<Vec<f64>> = fs::read_to_string(matrix)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[i], 1.0);
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, rows[j][i]);
        }
    }
}

#[test]
fn bench_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = abdiv(&[
            "bench",
            "--data",
            "cats",
            "--seed",
            "11",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(
            code(&out),
            exit::SUCCESS,
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        ["txt", "kv"].map(|ext| fs::read(out_dir.join(format!("bench-cats-11.{ext}"))).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn cats_can_be_overridden_by_the_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("Sex,Bwt,Hwt\n");
    for i in 0..10 {
        csv.push_str(&format!("F,2.{i},7.{i}\nM,3.{i},12.{i}\n"));
    }
    fs::write(dir.path().join("cats.csv"), csv).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_abdiv"))
        .args([
            "svm",
            "--spec",
            "euclidean",
            "--data",
            "cats",
            "--seed",
            "1",
            "--density",
            "raw-positive",
            "--folds",
            "2",
        ])
        .env("ABDIV_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(
        code(&out),
        exit::SUCCESS,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("test_error=0.000000"), "{stdout}");
}

fn write_ppm(path: &Path, image: &RgbImage) {
    fs::write(path, encode_ppm(image)).unwrap();
}

#[test]
fn segment_two_tone_edge() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    let output = dir.path().join("out.ppm");
    let image = RgbImage::from_fn(
        6,
        4,
        |_, j| if j < 3 { [10, 10, 10] } else { [200, 200, 200] },
    )
    .unwrap();
    write_ppm(&input, &image);
    let out = abdiv(&[
        "segment",
        "--spec",
        "euclidean",
        "--k",
        "1",
        "--norm",
        "raw",
        "--mode",
        "current",
        "--in",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        exit::SUCCESS,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mask = decode_ppm(&fs::read(&output).unwrap()).unwrap();
    for i in 0..4 {
        for j in 0..6 {
            let flat_interior = i > 0 && j > 0 && j != 3;
            assert_eq!(
                mask.get(i, j),
                if flat_interior { [255; 3] } else { [0; 3] },
                "({i},{j})"
            );
        }
    }
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("foreground=12"));
}

#[test]
fn segment_rejects_garbage_image() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.ppm");
    fs::write(&input, b"P6\n2 2\n255\n\x00").unwrap();
    let out = abdiv(&[
        "segment",
        "--spec",
        "hellinger",
        "--k",
        "1",
        "--norm",
        "unit",
        "--in",
        input.to_str().unwrap(),
        "--out",
        dir.path().join("o.ppm").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), exit::DATA);
}

fn number() -> impl Strategy<Value = String> {
    prop_oneof![
        (-5i32..=5).prop_map(|v| v.to_string()),
        (-3.0f64..3.0).prop_map(|v| v.to_string()),
        (1e-6f64..1e3).prop_map(|v| format!("{v:e}")),
    ]
}

fn positive() -> impl Strategy<Value = String> {
    (1e-4f64..1e3).prop_map(|v| v.to_string())
}

fn spec() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(vec![
            "hellinger",
            "euclidean",
            "jeffrey",
            "itakura-saito",
            "S-Euclidean",
            "v1-hellinger"
        ])
        .prop_map(str::to_owned),
        (number(), number()).prop_map(|(a, b)| format!("abs:{a},{b}")),
        (number(), number()).prop_map(|(a, b)| format!("ab:{a},{b}")),
        number().prop_map(|t| format!("dt:{t}")),
    ]
}

fn argv() -> impl Strategy<Value = Vec<String>> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    prop_oneof![
        (spec(), number(), number()).prop_map(move |(sp, x, y)| {
            let mut a = s(&["abdiv", "div", "--spec"]);
            a.extend([sp, "--x".into(), x, "--y".into(), y]);
            a
        }),
        (spec(), positive(), any::<u64>(), 3usize..40).prop_map(move |(sp, sigma, seed, n)| {
            let mut a = s(&["abdiv", "gram", "--kernel", "gaussian", "--spec"]);
            a.extend([
                sp,
                "--sigma".into(),
                sigma,
                "--seed".into(),
                seed.to_string(),
                "--n".into(),
                n.to_string(),
            ]);
            a
        }),
        (spec(), any::<u64>(), 1usize..100).prop_map(move |(sp, seed, trials)| {
            let mut a = s(&["abdiv", "probe", "--spec"]);
            a.extend([
                sp,
                "--seed".into(),
                seed.to_string(),
                "--trials".into(),
                trials.to_string(),
            ]);
            a
        }),
        (
            spec(),
            any::<u64>(),
            prop::collection::vec(positive(), 1..4),
            any::<bool>()
        )
            .prop_map(move |(sp, seed, cs, direct)| {
                let mut a = s(&["abdiv", "svm", "--data", "cats", "--spec"]);
                a.extend([
                    sp,
                    "--seed".into(),
                    seed.to_string(),
                    "--c".into(),
                    cs.join(","),
                ]);
                if direct {
                    a.extend(s(&[
                        "--kernel",
                        "direct",
                        "--conditioning",
                        "jitter",
                        "--density",
                        "raw-positive",
                    ]));
                }
                a
            }),
        (spec(), number(), any::<bool>()).prop_map(move |(sp, k, unit)| {
            let mut a = s(&[
                "abdiv", "segment", "--in", "a.ppm", "--out", "b.png", "--spec",
            ]);
            a.extend([
                sp,
                "--k".into(),
                k,
                "--norm".into(),
                if unit { "unit" } else { "raw" }.into(),
            ]);
            a
        }),
        (any::<u64>(), prop::option::of("[a-z]{1,8}"), 0.05f64..0.95).prop_map(
            move |(seed, stem, frac)| {
                let mut a = s(&["abdiv", "bench", "--data", "synth", "--seed"]);
                a.extend([
                    seed.to_string(),
                    "--train-fraction".into(),
                    frac.to_string(),
                ]);
                if let Some(stem) = stem {
                    a.extend(["--stem".into(), stem]);
                }
                a
            }
        ),
    ]
}

proptest! {
    #[test]
    fn rendered_config_round_trips(argv in argv()) {
        // Random specs can hit singular or invalid parameters; those must be rejected, not panic.
        if let Ok(cfg) = parse_args(&argv) {
            let rendered = cfg.to_argv();
            prop_assert_eq!(parse_args(&rendered).unwrap(), cfg.clone());
            prop_assert_eq!(parse_args(&rendered).unwrap().to_argv(), rendered);
        }
    }

    #[test]
    fn parser_is_total(words in prop::collection::vec("[-a-z0-9:,.]{0,12}", 0..8)) {
        let _ = parse_args(std::iter::once("abdiv".to_owned()).chain(words));
    }
}

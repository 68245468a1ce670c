use clap::Parser;

use super::*;

fn exec(args: &[&str]) -> Result<(Output, bool), CliError> {
    let cli = Cli::try_parse_from(std::iter::once("sidki").chain(args.iter().copied()))
        .map_err(|e| CliError::Parse(e.to_string()))?;
    run(&cli)
}

fn body(args: &[&str]) -> String {
    let (out, ok) = exec(args).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    assert!(ok, "{args:?}");
    out.body
}

fn code(args: &[&str]) -> u8 {
    match exec(args) {
        Ok((_, true)) => 0,
        Ok((_, false)) => 1,
        Err(e) => e.code(),
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["eval", "x", "--p", "3", "--depth", "2"]), 0);
    assert_eq!(code(&["eval", "x ?", "--p", "3", "--depth", "2"]), 2);
    assert_eq!(code(&["eval", "x", "--p", "4", "--depth", "2"]), 2);
    assert_eq!(code(&["eval", "x", "--p", "3", "--depth", "11"]), 3);
    assert_eq!(
        code(&[
            "eval",
            "x",
            "--p",
            "3",
            "--depth",
            "11",
            "--max-degree",
            "200000"
        ]),
        0
    );
    assert_eq!(
        code(&[
            "nielsen",
            "explore",
            "--group",
            "quotient:p=3,depth=3",
            "--k",
            "2",
            "--cap",
            "10"
        ]),
        4
    );
    assert_eq!(
        code(&[
            "nielsen",
            "explore",
            "--group",
            "abelian:5,5",
            "--k",
            "3",
            "--tuple-cap",
            "100"
        ]),
        4
    );
    assert_eq!(
        code(&[
            "nielsen",
            "explore",
            "--group",
            "abelian:5,5",
            "--k",
            "2",
            "--seeds",
            "[1,0];[0,1]",
            "x;x"
        ]),
        5
    );
    assert_eq!(
        code(&["nielsen", "explore", "--group", "free:2", "--k", "2"]),
        2
    );
    assert_eq!(
        code(&[
            "nielsen",
            "certify",
            "--group",
            "abelian:5,5",
            "--pairA",
            "x;y",
            "--pairB",
            "x;y"
        ]),
        2
    );
}

#[test]
fn trivial_and_stabilizer_examples() {
    assert_eq!(
        body(&["eval", "comm(x,y)", "--p", "3", "--depth", "1"]),
        "()\n"
    );
    assert_eq!(
        body(&["eval", "y z(3)", "--p", "3", "--depth", "3"]),
        body(&["eval", "y", "--p", "3", "--depth", "3"])
    );
    let ct = body(&["eval", "x", "--p", "3", "--depth", "2", "--cycle-type"]);
    assert!(ct.ends_with("cycle type: 3^3\n"), "{ct}");
}

#[test]
fn explore_and_quotient_reports() {
    assert!(
        body(&["nielsen", "explore", "--group", "abelian:5,5", "--k", "2"])
            .contains("components: 2\n")
    );
    assert_eq!(
        body(&["quotient", "order", "--p", "3", "--depth", "1"]),
        "3\n"
    );
    let text = body(&[
        "quotient",
        "order",
        "--p",
        "3",
        "--depth",
        "2",
        "--enumerate",
        "1000",
    ]);
    let mut lines = text.lines();
    let order = lines.next().unwrap();
    assert_eq!(lines.next().unwrap(), format!("enumerated: {order}"));
    assert_eq!(
        body(&[
            "quotient",
            "project-check",
            "--p",
            "3",
            "--depth",
            "3",
            "--samples",
            "100"
        ]),
        "compatible: 100/100\n"
    );
}

#[test]
fn andrews_curtis_moves_from_the_command_line() {
    let text = body(&[
        "nielsen",
        "explore",
        "--group",
        "abelian:3,3",
        "--k",
        "2",
        "--moves",
        "ac",
        "--conjugators",
        "xy;y",
    ]);
    assert!(
        text.contains("moves: andrews-curtis:k=2,conjugators=xy;y;YX;Y\n"),
        "{text}"
    );
    assert!(text.contains("components: 1\n"));
}

#[test]
fn threads_do_not_change_reports() {
    let args = |t: &'static str| {
        [
            "nielsen",
            "explore",
            "--group",
            "abelian:7,7",
            "--k",
            "2",
            "--threads",
            t,
        ]
    };
    assert_eq!(body(&args("1")), body(&args("3")));
}

#[test]
fn seeded_commutator_pairs_are_certified_distinct() {
    let json = body(&[
        "nielsen",
        "explore",
        "--group",
        "quotient:p=3,depth=4",
        "--k",
        "2",
        "--seeds",
        "x ; y",
        "comm(x,y) x ; y",
        "--node-cap",
        "10000",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["verdict"], "certified-distinct");
    assert_eq!(v["component_count"], 2);
}

#[test]
fn certificate_for_swapped_pairs() {
    let text = body(&[
        "nielsen",
        "certify",
        "--group",
        "quotient:p=3,depth=4",
        "--pairA",
        "x;y",
        "--pairB",
        "y;x",
    ]);
    assert!(text.ends_with("verdict: not-distinct\n"));
}

#[test]
fn separation_probe_reports_observations() {
    let json = body(&[
        "nielsen",
        "separation",
        "--p",
        "3",
        "--k",
        "3",
        "--j",
        "4",
        "--maxdepth",
        "6",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(!v["observations"].as_array().unwrap().is_empty());
}

#[test]
fn flipped_convention_breaks_the_goldens() {
    let (out, ok) = exec(&[
        "verify",
        "paper",
        "--deterministic",
        "--convention",
        "right-to-left",
    ])
    .unwrap();
    assert!(!ok);
    assert!(out.body.contains("FAIL  golden pi(y x^-1 y^-1 x y)"));
    assert!(out.body.contains("FAIL  golden [u, v] for (x, y)"));
    // single letters do not see the convention
    assert!(out.body.contains("PASS  golden pi(y)"));
    assert!(body(&["verify", "paper", "--deterministic"]).ends_with(", 0 failed\n"));
}

#[test]
fn reports_are_written_to_the_out_dir() {
    let dir = std::env::temp_dir().join(format!("sidki-out-{}", std::process::id()));
    let (out, _) = exec(&["eval", "x", "--p", "3", "--depth", "2", "--format", "json"]).unwrap();
    write_report(&dir, &out).unwrap();
    let written = std::fs::read_to_string(dir.join("eval.json")).unwrap();
    assert_eq!(written, out.body);
    std::fs::remove_dir_all(&dir).unwrap();
}

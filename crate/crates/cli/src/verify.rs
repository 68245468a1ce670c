//! The `verify paper` suite: every printed computation re-done from scratch.

use std::time::Instant;

use serde::Serialize;

use sidki::catalog::{self, identities, ScenarioPair, GOLDEN};
use sidki::group::GroupHandle;
use sidki::nielsen;
use sidki::perm::Permutation;
use sidki::syntax::parse_element;
use sidki::tree::{Evaluator, TreeElement, TreeParams, WordConvention};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Serialize)]
pub struct Scenario {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diff: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub convention: WordConvention,
    pub scenarios: Vec<Scenario>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for sc in &self.scenarios {
            let status = match sc.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            s.push_str(&format!("{status}  {}: {}", sc.name, sc.detail));
            if let Some(ms) = sc.elapsed_ms {
                s.push_str(&format!(" [{ms} ms]"));
            }
            s.push('\n');
            for d in &sc.diff {
                s.push_str(&format!("      {d}\n"));
            }
        }
        s.push_str(&format!(
            "summary: {} passed, {} failed\n",
            self.passed, self.failed
        ));
        s
    }
}

struct Outcome {
    ok: bool,
    detail: String,
    diff: Vec<String>,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            ok,
            detail: detail.into(),
            diff: Vec::new(),
        }
    }
}

/// Points where `got` and `want` disagree, at most `limit` of them.
fn perm_diff(got: &Permutation, want: &Permutation, limit: usize) -> Vec<String> {
    if got.degree() != want.degree() {
        return vec![format!(
            "degree {} vs expected {}",
            got.degree(),
            want.degree()
        )];
    }
    let mut out: Vec<String> = (1..=got.degree())
        .filter(|&i| got.apply(i) != want.apply(i))
        .take(limit)
        .map(|i| format!("{i} -> {} (expected {})", got.apply(i), want.apply(i)))
        .collect();
    if !out.is_empty() {
        out.push(format!(
            "cycle type {} (expected {})",
            got.cycle_type(),
            want.cycle_type()
        ));
    }
    out
}

fn word(text: &str, q: TreeParams) -> TreeElement {
    parse_element(text, q).expect("fixed scenario text")
}

fn golden(ev: &mut Evaluator, index: usize) -> Outcome {
    let g = GOLDEN[index];
    let q = ev.params();
    let want = match g.permutation(q) {
        Ok(p) => p,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let got = ev.evaluate(&word(g.word, q), g.depth);
    let diff = perm_diff(&got, &want, 5);
    let detail = if diff.is_empty() {
        format!(
            "level {} image of {} matches the printed listing",
            g.depth, g.word
        )
    } else {
        format!(
            "level {} image of {} differs from the printed listing",
            g.depth, g.word
        )
    };
    Outcome {
        ok: diff.is_empty(),
        detail,
        diff,
    }
}

fn example_cycle_type(ev: &mut Evaluator) -> Outcome {
    let q = ev.params();
    let a = ev.evaluate(&word("y X Y x y", q), 4).cycle_type();
    let b = ev.evaluate(&word("y", q), 4).cycle_type();
    Outcome::new(a != b, format!("{a} vs {b}"))
}

fn certificate(ev: &mut Evaluator) -> Outcome {
    let q = ev.params();
    let cert =
        nielsen::certify_distinct(ev, &ScenarioPair::standard(), &ScenarioPair::perturbed(), 4);
    let mut diff = Vec::new();
    for (text, g) in [
        (&cert.commutator_a, GOLDEN[3]),
        (&cert.commutator_b, GOLDEN[4]),
    ] {
        match (
            Permutation::parse_cycles(text, cert.degree),
            g.permutation(q),
        ) {
            (Ok(got), Ok(want)) => diff.extend(perm_diff(&got, &want, 3)),
            (_, Err(e)) => diff.push(e.to_string()),
            (Err(e), _) => diff.push(e.to_string()),
        }
    }
    Outcome {
        ok: cert.distinct && diff.is_empty(),
        detail: format!(
            "{} | {}: {}",
            cert.cycle_type_a, cert.cycle_type_b, cert.verdict
        ),
        diff,
    }
}

fn identity(ev: &mut Evaluator, lhs: TreeElement, rhs: TreeElement, depths: &[usize]) -> Outcome {
    let r = catalog::verify_identity(ev, &lhs, &rhs, depths);
    let bad: Vec<String> = r
        .depths
        .iter()
        .filter(|d| !d.equal)
        .map(|d| format!("level {} differs", d.depth))
        .collect();
    Outcome {
        ok: r.passed,
        detail: format!("levels {}..={}", depths[0], depths[depths.len() - 1]),
        diff: bad,
    }
}

fn assumptions(ev: &mut Evaluator, depth: usize) -> Outcome {
    match catalog::assumption_checks(ev, depth) {
        Ok(r) => Outcome {
            ok: r.passed,
            detail: r
                .checks
                .iter()
                .map(|c| {
                    format!(
                        "{} at level {}: {}",
                        c.label,
                        c.depth,
                        c.cycle_types.join(" / ")
                    )
                })
                .collect::<Vec<_>>()
                .join("; "),
            diff: Vec::new(),
        },
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

fn z_levels(ev: &mut Evaluator, max_n: usize) -> Outcome {
    let q = ev.params();
    let mut diff = Vec::new();
    for n in 1..=max_n {
        let zn = catalog::z(n, q).expect("n >= 1");
        if !ev.evaluate(&zn, n).is_identity() {
            diff.push(format!("z_{n} moves level {n}"));
        }
        if ev.evaluate(&zn, n + 1).is_identity() {
            diff.push(format!("z_{n} fixes level {}", n + 1));
        }
    }
    Outcome {
        ok: diff.is_empty(),
        detail: format!("z_n fixes level n and moves level n+1 for n <= {max_n}"),
        diff,
    }
}

fn first_quotient() -> Outcome {
    let h = GroupHandle::quotient(TreeParams::new(3).expect("prime"), 1);
    let order = h.order();
    Outcome::new(order == 3u32.into(), format!("|G_3/St(1)| = {order}"))
}

struct Recorder {
    deterministic: bool,
    scenarios: Vec<Scenario>,
}

impl Recorder {
    fn check(&mut self, name: impl Into<String>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let o = f();
        self.scenarios.push(Scenario {
            name: name.into(),
            status: if o.ok { Status::Pass } else { Status::Fail },
            detail: o.detail,
            diff: o.diff,
            elapsed_ms: (!self.deterministic).then(|| start.elapsed().as_millis()),
        });
    }
}

pub fn run_paper_suite(convention: WordConvention, deterministic: bool) -> SuiteReport {
    let q3 = TreeParams::new(3).expect("prime");
    let q5 = TreeParams::new(5).expect("prime");
    let mut ev = Evaluator::with_convention(q3, convention);
    let mut ev5 = Evaluator::with_convention(q5, convention);
    let mut r = Recorder {
        deterministic,
        scenarios: Vec::new(),
    };

    for (i, g) in GOLDEN.iter().enumerate() {
        r.check(format!("golden {}", g.name), || golden(&mut ev, i));
    }
    r.check("example cycle type differs from pi(y)", || {
        example_cycle_type(&mut ev)
    });
    r.check(
        "commutator certificate for (x, y) and (x^-1y^-1xy x, y)",
        || certificate(&mut ev),
    );
    r.check("identity z_1 = (y^-1x, x, xy)", || {
        let (l, rhs) = identities::z1_sections(q3);
        identity(&mut ev, l, rhs, &[1, 2, 3, 4])
    });
    for n in 2..=4 {
        r.check(
            format!(
                "identity [x, y z_{n}] = (z_{m}^-1 y^-1 x, x, x y z_{m})",
                m = n - 1
            ),
            || {
                let (l, rhs) = identities::commutator_yz_p3(n, q3).expect("n >= 2");
                identity(&mut ev, l, rhs, &[1, 2, 3, 4])
            },
        );
    }
    r.check("identity [x, y z_3] for p = 5", || {
        let (l, rhs) = identities::commutator_yz_general(3, q5).expect("p = 5, k = 3");
        identity(&mut ev5, l, rhs, &[1, 2, 3])
    });
    r.check("level-3 cycle types separate x from its companions", || {
        assumptions(&mut ev, 3)
    });
    r.check("z_n lies in St(n) but not St(n+1)", || z_levels(&mut ev, 5));
    r.check("G_3/St(1) has order 3", first_quotient);

    let scenarios = r.scenarios;
    let passed = scenarios
        .iter()
        .filter(|s| s.status == Status::Pass)
        .count();
    SuiteReport {
        suite: "paper",
        convention,
        failed: scenarios.len() - passed,
        passed,
        scenarios,
    }
}

//! Acceptance suite. Each criterion prints one PASS/FAIL line with its
//! runtime; the process exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use quasi_measure::cli::{run_to, Command, OutputFormat, RunConfig};
use quasi_measure::cover::{check_outer_properties, outer, outer_exhaustive, OuterMeasureCache};
use quasi_measure::extension::{
    extend, is_caratheodory_measurable, verify_premeasure, Measurability,
};
use quasi_measure::interval::{exp_eval, verify_example_axioms, IntervalSet};
use quasi_measure::quasi::{check_alt_conditions, check_axioms, CoverMode, Variant};
use quasi_measure::report::{Status, Violation};
use quasi_measure::testkit::{
    corpus_instance, random_instance, random_power_set_instance, CorpusCaps,
};
use quasi_measure::{parse_instance, Budget, QuasiMeasure, SubsetMask};

use common::{brute_algebra, brute_outer, brute_outer_table, coat_weights};

type Outcome = Result<String, String>;

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn uniform_instance() -> QuasiMeasure {
    let text = fs::read_to_string(fixture("uniform.qm")).expect("fixture");
    parse_instance(&text)
        .and_then(|s| s.quasi_measure())
        .expect("fixture parses")
}

/// Checks an extension table against brute-force closure, covers and
/// additivity over all disjoint pairs.
fn oracle_extension(qm: &QuasiMeasure) -> Result<(), String> {
    let n = qm.ground().len();
    let table = extend(qm);
    let family: Vec<u32> = qm.coat().members().iter().map(|m| m.bits()).collect();
    let algebra = brute_algebra(&family, n);
    let got: BTreeSet<u32> = table.algebra().members().iter().map(|m| m.bits()).collect();
    ensure(got == algebra, || {
        format!("algebra mismatch: {got:?} vs {algebra:?}")
    })?;
    let outer_values = brute_outer_table(qm);
    for &w in &algebra {
        let v = table
            .value(SubsetMask::from_bits(w, n))
            .expect("row")
            .ratio();
        ensure(*v == outer_values[w as usize], || {
            format!("row {w:b} disagrees with brute cover")
        })?;
    }
    for &a in &algebra {
        for &b in &algebra {
            if a & b == 0 && a < b {
                let lhs = &outer_values[(a | b) as usize];
                let rhs = &outer_values[a as usize] + &outer_values[b as usize];
                ensure(*lhs == rhs, || format!("{a:b} + {b:b} not additive"))?;
            }
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let tol = 1e-12;
    let ln2 = std::f64::consts::LN_2;
    let half = exp_eval(&IntervalSet::closed(0.0, ln2).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure((half - 0.5).abs() <= tol, || format!("[0,ln 2] -> {half}"))?;
    let empty = exp_eval(&IntervalSet::empty()).map_err(|e| e.to_string())?;
    ensure(empty == 0.0, || format!("empty -> {empty}"))?;
    let whole = exp_eval(&IntervalSet::positive_reals()).map_err(|e| e.to_string())?;
    ensure(whole == 1.0, || format!("[0,inf) -> {whole}"))?;
    let a = IntervalSet::interval(0.0, true, 1.0, false).map_err(|e| e.to_string())?;
    let b = IntervalSet::interval(2.0, false, 3.0, true).map_err(|e| e.to_string())?;
    let two = exp_eval(&a.union(&b)).map_err(|e| e.to_string())?;
    let want = 1.0 - (-1f64).exp() + (-2f64).exp() - (-3f64).exp();
    ensure((two - want).abs() <= tol, || {
        format!("[0,1) u (2,3] -> {two} vs {want}")
    })?;
    Ok(format!(
        "[0,1) u (2,3] = {two:.15}, |err| = {:.1e}",
        (two - want).abs()
    ))
}

fn criterion_2() -> Outcome {
    let report = verify_example_axioms(1000, 0, 1e-12);
    let mut checked = 0;
    for item in [
        "endpoints",
        "splitting",
        "meet-witness",
        "diff-witness",
        "cover-subadditivity",
    ] {
        let o = report
            .item(item)
            .ok_or_else(|| format!("missing item {item}"))?;
        ensure(
            o.status == Status::Pass && o.failures == 0 && o.checked > 0,
            || {
                format!(
                    "{item}: {:?}, {} failures, {:?}",
                    o.status,
                    o.failures,
                    o.witnesses.first()
                )
            },
        )?;
        checked += o.checked;
    }
    Ok(format!("{checked} checks, 0 failures"))
}

fn criterion_3() -> Outcome {
    let caps = CorpusCaps::default();
    let mut passing = 0u64;
    let mut seed = 0u64;
    while passing < 500 {
        ensure(seed < 5000, || {
            format!("only {passing} passing instances in 5000 seeds")
        })?;
        let inst = corpus_instance(seed, caps);
        let qm = &inst.quasi;
        ensure(qm.ground().len() <= 5 && qm.coat().len() <= 8, || {
            format!("seed {seed} over caps")
        })?;
        if check_axioms(qm, Variant::Restricted, CoverMode::All, qm.coat().len()).passed() {
            passing += 1;
            let report = verify_premeasure(&extend(qm));
            ensure(report.passed(), || {
                format!("seed {seed}: {:?}", report.failed_items())
            })?;
            ensure(
                report.items.iter().all(|o| o.status == Status::Pass),
                || format!("seed {seed}: an additivity item was skipped"),
            )?;
            oracle_extension(qm).map_err(|e| format!("seed {seed}: {e}"))?;
        }
        seed += 1;
    }
    Ok(format!(
        "{passing} passing instances from seeds 0..{seed}, 0 exceptions"
    ))
}

fn criterion_4() -> Outcome {
    let qm = uniform_instance();
    let g = qm.ground();
    let set = |labels: &[&str]| g.subset(labels.iter().copied()).expect("labels");
    let (one, two, one_two, two_three) =
        (set(&["1"]), set(&["2"]), set(&["1", "2"]), set(&["2", "3"]));

    let report = check_axioms(&qm, Variant::Restricted, CoverMode::All, qm.coat().len());
    let meet = report.item("meet-witness").ok_or("missing meet-witness")?;
    ensure(meet.status == Status::Fail, || {
        "item (iii) did not fail".into()
    })?;
    ensure(
        meet.witnesses
            .iter()
            .any(|w| w.mask("X") == Some(one_two) && w.mask("Y") == Some(two_three)),
        || format!("no X={{1,2}}, Y={{2,3}} witness: {:?}", meet.witnesses),
    )?;

    let table = extend(&qm);
    let weights = coat_weights(&qm);
    for m in [one, two, one_two] {
        let v = table.value(m).ok_or("row missing")?.ratio().clone();
        ensure(
            v == r(1, 2) && brute_outer(&weights, m.bits()) == r(1, 2),
            || format!("{} -> {v}", g.render(m)),
        )?;
    }
    let verdict = verify_premeasure(&table);
    let pairs = verdict
        .item("pair-additive")
        .ok_or("missing pair-additive")?;
    ensure(
        pairs.witnesses.iter().any(|w| {
            w.masks("E") == vec![one, two]
                && w.mask("union") == Some(one_two)
                && w.violation
                    == Violation::NotEqual {
                        lhs: r(1, 2),
                        rhs: r(1, 1),
                    }
        }),
        || format!("no {{1}}+{{2}} additivity witness: {:?}", pairs.witnesses),
    )?;

    // A = {1,2} is a subset of W = {1,2}, so it always
    // splits; the same arithmetic refutes W = {1} instead.
    let mut cache = OuterMeasureCache::new();
    let brute = |m: SubsetMask| brute_outer(&weights, m.bits());
    let trivial = brute(one_two) == brute(one_two.meet(one_two)) + brute(one_two.minus(one_two));
    ensure(trivial, || {
        "A = {1,2} unexpectedly refutes W = {1,2}".into()
    })?;
    let got = is_caratheodory_measurable(&qm, one_two, &mut cache, Budget::default())
        .map_err(|e| e.to_string())?;
    let Measurability::NotMeasurable { a, whole, split } = got else {
        return Err("W = {1,2} reported measurable".into());
    };
    ensure(
        whole == brute(a) && split == brute(a.meet(one_two)) + brute(a.minus(one_two)),
        || "counterexample values disagree with brute covers".into(),
    )?;
    ensure(whole != split, || {
        "counterexample does not violate splitting".into()
    })?;
    let first = g
        .subsets()
        .find(|&x| brute(x) != brute(x.meet(one_two)) + brute(x.minus(one_two)));
    ensure(first == Some(a), || {
        "counterexample is not the first in mask order".into()
    })?;
    let w1 = is_caratheodory_measurable(&qm, one, &mut cache, Budget::default())
        .map_err(|e| e.to_string())?;
    ensure(
        w1 == Measurability::NotMeasurable {
            a: one_two,
            whole: r(1, 2),
            split: r(1, 1),
        },
        || format!("W = {{1}}: {w1:?}"),
    )?;
    Ok(format!(
        "(iii) X={{1,2}} Y={{2,3}}; {{1}}+{{2}} = 1 != 1/2; W={{1,2}} refuted by A={} ({} vs {}); A={{1,2}} refutes W={{1}}",
        g.render(a),
        quasi_measure::value::format_ratio(&whole),
        quasi_measure::value::format_ratio(&split)
    ))
}

fn criterion_5() -> Outcome {
    let mut full_passes = 0;
    let mut instances = 0;
    let mut seed = 0u64;
    while instances < 100 {
        ensure(seed < 5000, || {
            format!("only {instances} quasi-measures in 5000 seeds")
        })?;
        let qm = corpus_instance(seed, CorpusCaps::default()).quasi;
        seed += 1;
        if !check_axioms(&qm, Variant::Restricted, CoverMode::All, qm.coat().len()).passed() {
            continue;
        }
        instances += 1;
        let n = qm.ground().len();
        let report = check_outer_properties(&qm, 1 << n);
        for o in &report.items {
            ensure(o.passed(), || {
                format!("seed {seed}: {} failed {:?}", o.item, o.witnesses.first())
            })?;
            ensure(o.status == Status::NotApplicable || o.exhaustive, || {
                format!("seed {seed}: {} was sampled", o.item)
            })?;
        }
        let values = brute_outer_table(&qm);
        let size = 1u32 << n;
        ensure(
            values[0].is_zero() && values[(size - 1) as usize] == r(1, 1),
            || format!("seed {seed}: endpoints"),
        )?;
        for a in 0..size {
            for b in 0..size {
                let (va, vb) = (&values[a as usize], &values[b as usize]);
                ensure(a & !b != 0 || va <= vb, || {
                    format!("seed {seed}: monotone {a:b} {b:b}")
                })?;
                ensure(values[(a | b) as usize] <= va + vb, || {
                    format!("seed {seed}: pair {a:b} {b:b}")
                })?;
                for c in b..size {
                    let u = values[(a | b | c) as usize].clone();
                    ensure(u <= va + vb + &values[c as usize], || {
                        format!("seed {seed}: triple")
                    })?;
                }
            }
        }
        let agrees = qm
            .coat()
            .members()
            .iter()
            .all(|&m| values[m.bits() as usize] == *qm.value_at(m).ratio());
        let item = report
            .item("agrees-on-coat")
            .ok_or("missing agrees-on-coat")?;
        ensure((item.status == Status::Pass) == agrees, || {
            format!(
                "seed {seed}: agrees-on-coat status {:?} vs oracle {agrees}",
                item.status
            )
        })?;
        if report.items.iter().all(|o| o.status == Status::Pass) {
            full_passes += 1;
        }
    }
    Ok(format!("{instances} quasi-measures from seeds 0..{seed}; {full_passes} with every item applicable, all exhaustive"))
}

fn criterion_6() -> Outcome {
    let mut alt_pass = 0;
    let mut seed = 0u64;
    while alt_pass < 200 {
        ensure(seed < 5000, || {
            format!("only {alt_pass} instances pass the alternative conditions")
        })?;
        let qm = corpus_instance(seed, CorpusCaps::default()).quasi;
        if check_alt_conditions(&qm).passed() {
            alt_pass += 1;
            let report = check_axioms(&qm, Variant::Restricted, CoverMode::All, qm.coat().len());
            ensure(report.passed(), || {
                format!("seed {seed}: {:?}", report.failed_items())
            })?;
        }
        seed += 1;
    }
    Ok(format!(
        "{alt_pass} instances from seeds 0..{seed}, 0 counterexamples"
    ))
}

fn criterion_7() -> Outcome {
    let mut targets = 0;
    for seed in 0..50u64 {
        let n = 4 + (seed % 3) as usize;
        let coat_size = 6 + (seed % 5) as usize;
        let (_, coat, qm) = random_instance(seed, n, coat_size, 64);
        ensure(coat.len() <= 10, || {
            format!("seed {seed}: coat of {}", coat.len())
        })?;
        let weights = coat_weights(&qm);
        let mut cache = OuterMeasureCache::new();
        for a in qm.ground().subsets() {
            let (fast, _) = outer(&qm, a, &mut cache);
            let (slow, _) = outer_exhaustive(&qm, a).map_err(|e| e.to_string())?;
            ensure(
                fast == slow && *fast.ratio() == brute_outer(&weights, a.bits()),
                || format!("seed {seed}: {} {fast} vs {slow}", qm.ground().render(a)),
            )?;
            targets += 1;
        }
    }
    Ok(format!("50 instances, {targets} targets, exact agreement"))
}

fn criterion_8() -> Outcome {
    let mut rows = 0;
    for seed in 0..100u64 {
        let n = 1 + (seed % 5) as usize;
        let (tm, qm) = random_power_set_instance(seed, n);
        let table = extend(&qm);
        for a in qm.ground().subsets() {
            let want = a
                .elements()
                .fold(BigRational::zero(), |acc, i| acc + tm.weights()[i].ratio());
            let got = table.value(a).ok_or("row missing")?.ratio();
            ensure(*got == want, || {
                format!("seed {seed}: {} -> {got} vs {want}", qm.ground().render(a))
            })?;
            rows += 1;
        }
    }
    Ok(format!("100 instances, {rows} subsets recovered exactly"))
}

fn machine(command: Command, input: Option<PathBuf>) -> RunConfig {
    let mut config = RunConfig::new(command);
    config.input = input;
    config.format = OutputFormat::Machine;
    config
}

fn criterion_9() -> Outcome {
    let uniform = Some(fixture("uniform.qm"));
    let power = Some(fixture("power_set.qm"));
    let configs = [
        machine(Command::Check, power.clone()),
        machine(Command::Check, uniform.clone()),
        machine(Command::Outer { set: "2".into() }, uniform.clone()),
        machine(Command::Extend, uniform.clone()),
        machine(
            Command::Example {
                samples: 200,
                seed: 7,
                tol: 1e-12,
            },
            None,
        ),
        machine(Command::Search { seeds: 0..60 }, None),
    ];
    let mut bytes = 0;
    for config in &configs {
        let runs: Vec<(i32, Vec<u8>)> = (0..3)
            .map(|_| {
                let mut out = Vec::new();
                let code = run_to(config, &mut out, &mut std::io::sink());
                (code, out)
            })
            .collect();
        ensure(runs.iter().all(|x| *x == runs[0]), || {
            format!("{} differs between runs", config.command.name())
        })?;
        ensure(!runs[0].1.is_empty(), || {
            format!("{} wrote nothing", config.command.name())
        })?;
        bytes += runs[0].1.len();
    }
    let exe = env!("CARGO_BIN_EXE_qmcheck");
    let path = fixture("uniform.qm");
    let spawn = || {
        Process::new(exe)
            .args(["extend", "--format", "machine"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())
    };
    let (first, second) = (spawn()?, spawn()?);
    ensure(
        first.stdout == second.stdout && first.status == second.status,
        || "binary output differs between runs".into(),
    )?;
    let mut in_process = Vec::new();
    run_to(&configs[3], &mut in_process, &mut std::io::sink());
    ensure(first.stdout == in_process, || {
        "binary and library reports differ".into()
    })?;
    Ok(format!(
        "{} configurations x 3 runs plus 2 process runs, {bytes} bytes identical",
        configs.len()
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "example closed forms",
            limit: Duration::from_secs(1),
            run: criterion_1,
        },
        Criterion {
            id: 2,
            name: "example axiom suite",
            limit: Duration::from_secs(5),
            run: criterion_2,
        },
        Criterion {
            id: 3,
            name: "extension is a pre-measure",
            limit: Duration::from_secs(120),
            run: criterion_3,
        },
        Criterion {
            id: 4,
            name: "negative instance",
            limit: Duration::from_secs(1),
            run: criterion_4,
        },
        Criterion {
            id: 5,
            name: "exterior measure properties",
            limit: Duration::from_secs(60),
            run: criterion_5,
        },
        Criterion {
            id: 6,
            name: "alternative conditions imply axioms",
            limit: Duration::from_secs(120),
            run: criterion_6,
        },
        Criterion {
            id: 7,
            name: "cover search matches enumeration",
            limit: Duration::from_secs(60),
            run: criterion_7,
        },
        Criterion {
            id: 8,
            name: "ground-truth recovery",
            limit: Duration::from_secs(60),
            run: criterion_8,
        },
        Criterion {
            id: 9,
            name: "deterministic reports",
            limit: Duration::from_secs(60),
            run: criterion_9,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let result = match outcome {
            Ok(detail) if elapsed <= c.limit => Ok(detail),
            Ok(detail) => Err(format!("{detail}; over the {:?} limit", c.limit)),
            Err(e) => Err(e),
        };
        let ms = elapsed.as_secs_f64() * 1e3;
        match result {
            Ok(detail) => println!(
                "PASS criterion {} ({}) in {ms:.1} ms: {detail}",
                c.id, c.name
            ),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {} ({}) in {ms:.1} ms: {e}", c.id, c.name);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
